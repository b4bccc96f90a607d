//! Dense univariate polynomials with a deterministic real root finder.

use std::fmt;

/// Coefficients in ascending order: `c[0] + c[1] t + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct UPoly {
    coeffs: Vec<f64>,
}

const ROOT_RADIUS: f64 = 1e6;

impl UPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        while p.coeffs.len() > 1 && p.coeffs[p.coeffs.len() - 1] == 0.0 {
            p.coeffs.pop();
        }
        if p.coeffs.is_empty() {
            p.coeffs.push(0.0);
        }
        p
    }

    pub fn zero() -> Self {
        Self::new(vec![0.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + other.coeffs.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Largest absolute coefficient.
    pub fn scale_factor(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Drops leading coefficients that are negligible relative to the rest.
    fn trimmed(&self) -> Self {
        let s = self.scale_factor();
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c[c.len() - 1].abs() <= 1e-14 * s {
            c.pop();
        }
        Self::new(c)
    }

    /// Sum of |c_i| max(1,|t|)^i, the scale against which a value at `t`
    /// counts as zero.
    fn magnitude_at(&self, t: f64) -> f64 {
        let r = t.abs().max(1.0);
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
    }

    /// Real roots in ascending order within radius 1e6, including roots of
    /// even multiplicity that touch zero without a sign change.
    pub fn real_roots(&self) -> Vec<f64> {
        let p = self.trimmed();
        let n = p.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = p.coeffs[n];
        if n == 1 {
            let r = -p.coeffs[0] / lead;
            return if r.abs() <= ROOT_RADIUS { vec![r] } else { Vec::new() };
        }
        let cauchy = 1.0
            + p.coeffs[..n]
                .iter()
                .fold(0.0_f64, |m, c| m.max((c / lead).abs()));
        let radius = cauchy.min(ROOT_RADIUS);

        let mut knots = vec![-radius];
        knots.extend(
            p.derivative()
                .real_roots()
                .into_iter()
                .filter(|c| c.abs() < radius),
        );
        knots.push(radius);

        // p is monotone between knots; a knot accepted as a touching root
        // counts as an exact zero so rounding cannot split it into a pair.
        let mut roots = Vec::new();
        let mut values = Vec::with_capacity(knots.len());
        for (idx, &c) in knots.iter().enumerate() {
            let interior = idx > 0 && idx + 1 < knots.len();
            let mut v = p.eval(c);
            if v == 0.0 || (interior && v.abs() <= 1e-12 * p.magnitude_at(c)) {
                roots.push(c);
                v = 0.0;
            }
            values.push(v);
        }
        for (w, fv) in knots.windows(2).zip(values.windows(2)) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (fv[0], fv[1]);
            if fa != 0.0 && fb != 0.0 && fa.signum() != fb.signum() {
                roots.push(bisect(&p, a, b, fa));
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * (1.0 + b.abs()));
        roots
    }
}

fn bisect(p: &UPoly, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 && !(first && i == self.degree()) {
                continue;
            }
            if first {
                write!(f, "{c:?}")?;
            } else if *c < 0.0 {
                write!(f, " - {:?}", -c)?;
            } else {
                write!(f, " + {c:?}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "*t")?,
                _ => write!(f, "*t^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}
