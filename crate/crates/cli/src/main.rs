use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use centroaffine::catalog;
use centroaffine::report::{self, InputSource, RunConfig};
use centroaffine::{Error, Exec};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "centroaffine", version, about = "Centroaffine analysis of level sets {h = 1} of homogeneous functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify, check boundary regularity, decide completeness, report residuals.
    Analyze(AnalyzeArgs),
    /// Recompute the reference numbers and print expected vs computed.
    Repro(CommonArgs),
    /// SVG of a planar level curve with its boundary rays.
    Plot(PlotArgs),
    /// Built-in examples.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List entry ids with their expected verdicts.
    List,
    /// Analyze one entry.
    Run {
        id: String,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Homogeneous polynomial, e.g. "x^3 - x*y^2".
    #[arg(long, conflicts_with_all = ["poly_json", "example"])]
    poly: Option<String>,
    /// Polynomial as a JSON file of terms.
    #[arg(long, conflicts_with = "example")]
    poly_json: Option<PathBuf>,
    /// Catalog entry id.
    #[arg(long)]
    example: Option<String>,
    /// Degree of the analytic example.
    #[arg(long)]
    k: Option<f64>,
    /// Seed point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    seed: Option<Vec<f64>>,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Definiteness tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol_def: f64,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol_quad: f64,
    /// Finite-difference step (chosen per point when absent).
    #[arg(long)]
    fd_step: Option<f64>,
    /// Chart samples for the signature classification.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// ε values for the concavity route, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Run every sampled check on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot (planar curves only).
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Write a geodesic from the chart centre as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Half-width of the view square.
    #[arg(long, default_value_t = 4.0)]
    radius: f64,
    /// Draw the geodesic from the chart centre.
    #[arg(long)]
    trace: bool,
}

fn source(input: &InputArgs) -> Result<InputSource, Error> {
    match (&input.poly, &input.poly_json, &input.example) {
        (Some(text), None, None) => Ok(InputSource::Polynomial { text: text.clone() }),
        (None, Some(path), None) => Ok(InputSource::PolynomialJson {
            json: fs::read_to_string(path)
                .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?,
        }),
        (None, None, Some(id)) => Ok(InputSource::Example {
            id: id.clone(),
            k: input.k,
        }),
        _ => Err(Error::Precondition("give exactly one of --poly, --poly-json, --example".into())),
    }
}

fn config(source: InputSource, seed: Option<Vec<f64>>, c: &CommonArgs) -> RunConfig {
    RunConfig {
        source,
        seed,
        tol_def: c.tol_def,
        tol_quad: c.tol_quad,
        fd_step: c.fd_step,
        samples: c.samples,
        eps_grid: c.eps_grid.clone(),
        rng_seed: c.rng_seed,
        exec: if c.sequential { Exec::Sequential } else { Exec::Parallel },
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn analyze(cfg: &RunConfig, out: Option<&PathBuf>, plot: Option<&PathBuf>, trace: Option<&PathBuf>) -> Result<i32, Error> {
    let rep = report::run_analyze(cfg)?;
    let mut curve = None;
    if trace.is_some() || plot.is_some() {
        let frame = cfg.frame()?;
        let tr = report::default_trace(&frame)?;
        if let Some(path) = plot {
            emit(&report::plot_svg(&frame, Some(&tr.ambient), 4.0)?, Some(path))?;
        }
        curve = Some(tr);
    }
    if let (Some(path), Some(tr)) = (trace, &curve) {
        emit(&tr.to_csv(), Some(path))?;
    }
    emit(&report::to_json_string(&rep)?, out)?;
    eprintln!(
        "{}: {}{}",
        rep.source,
        rep.verdict.status,
        rep.verdict.route.map(|r| format!(" via {r}")).unwrap_or_default()
    );
    Ok(rep.exit_code())
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Analyze(a) => {
            let cfg = config(source(&a.input)?, a.input.seed.clone(), &a.common);
            analyze(&cfg, a.out.as_ref(), a.plot.as_ref(), a.trace.as_ref())
        }
        Command::Repro(c) => {
            let cfg = config(InputSource::Example { id: "analytic".into(), k: None }, None, &c);
            let rep = report::run_repro(&cfg)?;
            print!("{}", rep.table());
            println!("{}", if rep.pass { "all claims pass" } else { "some claims FAIL" });
            Ok(rep.exit_code())
        }
        Command::Plot(p) => {
            let cfg = config(source(&p.input)?, p.input.seed.clone(), &p.common);
            let frame = cfg.frame()?;
            let tr = if p.trace { Some(report::default_trace(&frame)?) } else { None };
            emit(&report::plot_svg(&frame, tr.as_ref().map(|t| t.ambient.as_slice()), p.radius)?, p.out.as_ref())?;
            Ok(0)
        }
        Command::Catalog(CatalogCommand::List) => {
            for e in catalog::entries() {
                println!(
                    "{:<18} {:<13} {:<22} {}",
                    e.id,
                    e.expected.status,
                    e.expected.route.unwrap_or("-"),
                    e.description
                );
            }
            Ok(0)
        }
        Command::Catalog(CatalogCommand::Run { id, common, out }) => {
            let cfg = config(InputSource::Example { id, k: None }, None, &common);
            analyze(&cfg, out.as_ref(), None, None)
        }
    }
}

fn main() -> ExitCode {
    // usage errors are input errors: exit 1, keeping 2 for inconclusive verdicts
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
