//! Exact homogeneous polynomials: parsing, serialization, differentiation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::univariate::UPoly;
use super::{HomogeneousFunction, SymTensor3};
use crate::error::{Error, Result};
use crate::forms::SymmetricForm;

const LETTERS: [char; 4] = ['x', 'y', 'z', 'w'];

/// Monomial exponents. Ordered graded-lexicographically with larger
/// monomials first, so `x^3` precedes `x*y^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
struct TermTable {
    terms: Vec<(Vec<u32>, f64)>,
}

impl TermTable {
    fn eval(&self, pows: &[Vec<f64>]) -> f64 {
        let mut s = 0.0;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= pows[i][k as usize];
                }
            }
            s += m;
        }
        s
    }
}

/// Differentiate every term in `base` with respect to variable `var`.
fn differentiate(base: &[(Vec<u32>, f64)], var: usize) -> Vec<(Vec<u32>, f64)> {
    base.iter()
        .filter(|(e, _)| e[var] > 0)
        .map(|(e, c)| {
            let mut e2 = e.clone();
            e2[var] -= 1;
            (e2, c * e[var] as f64)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct HomogeneousPolynomial {
    dim: usize,
    degree: u32,
    terms: BTreeMap<Exponents, f64>,
    grad: Vec<TermTable>,
    hess: Vec<TermTable>,
    third: Vec<TermTable>,
}

impl PartialEq for HomogeneousPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.degree == other.degree && self.terms == other.terms
    }
}

fn upper_pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |i| (i..d).map(move |j| (i, j)))
}

fn upper_triples(d: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..d).flat_map(move |i| (i..d).flat_map(move |j| (j..d).map(move |l| (i, j, l))))
}

impl HomogeneousPolynomial {
    /// Builds a polynomial from explicit terms. Like terms are collected and
    /// exact zeros dropped; every exponent must have length `dim` and sum to
    /// `degree`.
    pub fn from_terms(
        dim: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::pre("dimension must be positive"));
        }
        let mut map: BTreeMap<Exponents, f64> = BTreeMap::new();
        let mut first: Option<Vec<u32>> = None;
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: e.len(),
                });
            }
            let s: u32 = e.iter().sum();
            if s != degree {
                return Err(Error::MixedDegree {
                    first: first.map_or_else(|| format!("degree {degree}"), |f| monomial_string(&f, dim)),
                    first_degree: degree,
                    second: monomial_string(&e, dim),
                    second_degree: s,
                });
            }
            if !c.is_finite() {
                return Err(Error::pre("coefficient is not finite"));
            }
            first.get_or_insert_with(|| e.clone());
            *map.entry(Exponents(e)).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        Ok(Self::build(dim, degree, map))
    }

    fn build(dim: usize, degree: u32, terms: BTreeMap<Exponents, f64>) -> Self {
        let base: Vec<(Vec<u32>, f64)> = terms.iter().map(|(e, c)| (e.0.clone(), *c)).collect();
        let grad1: Vec<Vec<(Vec<u32>, f64)>> = (0..dim).map(|i| differentiate(&base, i)).collect();
        let hess = upper_pairs(dim)
            .map(|(i, j)| TermTable {
                terms: differentiate(&grad1[i], j),
            })
            .collect();
        let third = upper_triples(dim)
            .map(|(i, j, l)| TermTable {
                terms: differentiate(&differentiate(&grad1[i], j), l),
            })
            .collect();
        Self {
            dim,
            degree,
            terms,
            grad: grad1.into_iter().map(|terms| TermTable { terms }).collect(),
            hess,
            third,
        }
    }

    /// Drops coefficients below `rel` times the largest one. Used after
    /// floating-point substitutions that leave rounding residue behind.
    pub fn pruned(&self, rel: f64) -> Self {
        let s = self.terms.values().fold(0.0_f64, |m, c| m.max(c.abs()));
        let mut t = self.terms.clone();
        t.retain(|_, c| c.abs() > rel * s);
        Self::build(self.dim, self.degree, t)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse(text, None)
    }

    pub fn parse_with_dim(text: &str, dim: usize) -> Result<Self> {
        parse(text, Some(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), *c))
    }

    pub fn coefficient(&self, exp: &[u32]) -> f64 {
        self.terms.get(&Exponents(exp.to_vec())).copied().unwrap_or(0.0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest absolute coefficient.
    pub fn coefficient_scale(&self) -> f64 {
        self.terms.values().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    fn powers(&self, x: &[f64], max: u32) -> Vec<Vec<f64>> {
        x.iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(max as usize + 1);
                let mut acc = 1.0;
                for _ in 0..=max {
                    p.push(acc);
                    acc *= xi;
                }
                p
            })
            .collect()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let pows = self.powers(x, self.degree);
        let mut s = 0.0;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    m *= pows[i][k as usize];
                }
            }
            s += m;
        }
        s
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let pows = self.powers(x, self.degree);
        self.grad.iter().map(|t| t.eval(&pows)).collect()
    }

    pub fn hess(&self, x: &[f64]) -> SymmetricForm {
        let pows = self.powers(x, self.degree);
        let vals: Vec<f64> = self.hess.iter().map(|t| t.eval(&pows)).collect();
        let mut it = vals.into_iter();
        SymmetricForm::from_fn(self.dim, |_, _| it.next().unwrap())
    }

    pub fn third_tensor(&self, x: &[f64]) -> SymTensor3 {
        let pows = self.powers(x, self.degree);
        let vals: Vec<f64> = self.third.iter().map(|t| t.eval(&pows)).collect();
        let mut it = vals.into_iter();
        SymTensor3::from_upper(self.dim, |_, _, _| it.next().unwrap())
    }

    /// Exact coefficients of `t ↦ h(x + t v)`.
    pub fn restrict_to_line(&self, x: &[f64], v: &[f64]) -> Result<UPoly> {
        self.check_dim(x)?;
        self.check_dim(v)?;
        if v.iter().all(|c| *c == 0.0) {
            return Err(Error::pre("line direction must be nonzero"));
        }
        let factors: Vec<UPoly> = (0..self.dim).map(|i| UPoly::new(vec![x[i], v[i]])).collect();
        let mut total = UPoly::zero();
        for (e, c) in &self.terms {
            let mut m = UPoly::new(vec![*c]);
            for (i, &k) in e.0.iter().enumerate() {
                for _ in 0..k {
                    m = m.mul(&factors[i]);
                }
            }
            total = total.add(&m);
        }
        Ok(total)
    }

    /// The linear form `Σ a_i x_i` as a degree-1 polynomial.
    pub fn linear_form(a: &[f64]) -> Result<Self> {
        let d = a.len();
        Self::from_terms(
            d,
            1,
            a.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; d];
                e[i] = 1;
                (e, *c)
            }),
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut map: BTreeMap<Exponents, f64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e: Vec<u32> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                *map.entry(Exponents(e)).or_insert(0.0) += ca * cb;
            }
        }
        map.retain(|_, c| *c != 0.0);
        Ok(Self::build(self.dim, self.degree + other.degree, map))
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let one = BTreeMap::from([(Exponents(vec![0; self.dim]), 1.0)]);
        let mut acc = Self::build(self.dim, 0, one);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut t = self.terms.clone();
        for c in t.values_mut() {
            *c *= s;
        }
        t.retain(|_, c| *c != 0.0);
        Self::build(self.dim, self.degree, t)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::pre("polynomials differ in dimension or degree"));
        }
        let mut t = self.terms.clone();
        for (e, c) in &other.terms {
            *t.entry(e.clone()).or_insert(0.0) += c;
        }
        t.retain(|_, c| *c != 0.0);
        Ok(Self::build(self.dim, self.degree, t))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// `y ↦ h(A y)` where `columns[j]` is the image of the j-th new
    /// coordinate vector, i.e. `x_i = Σ_j columns[j][i] y_j`.
    pub fn linear_substitute(&self, columns: &[Vec<f64>]) -> Result<Self> {
        let new_dim = columns.len();
        if let Some(c) = columns.iter().find(|c| c.len() != self.dim) {
            return Err(Error::Dimension {
                expected: self.dim,
                got: c.len(),
            });
        }
        let forms: Vec<Self> = (0..self.dim)
            .map(|i| {
                let row: Vec<f64> = columns.iter().map(|c| c[i]).collect();
                Self::linear_form(&row)
            })
            .collect::<Result<_>>()?;
        let one = Self::build(new_dim, 0, BTreeMap::from([(Exponents(vec![0; new_dim]), 1.0)]));
        let mut total = Self::build(new_dim, self.degree, BTreeMap::new());
        for (e, c) in &self.terms {
            let mut m = one.scale(*c);
            for (i, &k) in e.0.iter().enumerate() {
                for _ in 0..k {
                    m = m.mul(&forms[i])?;
                }
            }
            total = total.add(&m)?;
        }
        Ok(total)
    }

    /// The symmetric trilinear form with `H(v,v,v) = h(v)`, equal to
    /// `∇³h / 6`.
    pub fn polarization(&self) -> Result<SymTensor3> {
        if self.degree != 3 {
            return Err(Error::Degree(format!(
                "polarization needs a cubic, got degree {}",
                self.degree
            )));
        }
        Ok(self.third_tensor(&vec![0.0; self.dim]).scaled(1.0 / 6.0))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(PolyJson::from(self)).expect("polynomial json")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let pj: PolyJson = serde_json::from_str(text)?;
        pj.try_into()
    }
}

impl HomogeneousFunction for HomogeneousPolynomial {
    fn dim(&self) -> usize {
        self.dim
    }
    fn degree(&self) -> f64 {
        self.degree as f64
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.eval(x))
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.grad(x))
    }
    fn hessian(&self, x: &[f64]) -> Result<SymmetricForm> {
        self.check_dim(x)?;
        Ok(self.hess(x))
    }
    fn third(&self, x: &[f64]) -> Result<SymTensor3> {
        self.check_dim(x)?;
        Ok(self.third_tensor(x))
    }
    fn as_polynomial(&self) -> Option<&HomogeneousPolynomial> {
        Some(self)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyJson {
    pub dim: usize,
    pub degree: u32,
    pub terms: Vec<TermJson>,
}

impl From<&HomogeneousPolynomial> for PolyJson {
    fn from(h: &HomogeneousPolynomial) -> Self {
        Self {
            dim: h.dim,
            degree: h.degree,
            terms: h
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.0.clone(),
                    c: *c,
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyJson> for HomogeneousPolynomial {
    type Error = Error;
    fn try_from(pj: PolyJson) -> Result<Self> {
        if pj.degree < 2 {
            return Err(Error::Degree(format!("degree must be at least 2, got {}", pj.degree)));
        }
        let h = Self::from_terms(pj.dim, pj.degree, pj.terms.into_iter().map(|t| (t.exp, t.c)))?;
        if h.terms.is_empty() {
            return Err(Error::pre("polynomial has no nonzero terms"));
        }
        Ok(h)
    }
}

fn var_name(i: usize, dim: usize) -> String {
    if dim <= 4 {
        LETTERS[i].to_string()
    } else {
        format!("x{i}")
    }
}

fn monomial_string(e: &[u32], dim: usize) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, k)| **k > 0)
        .map(|(i, &k)| {
            if k == 1 {
                var_name(i, dim)
            } else {
                format!("{}^{k}", var_name(i, dim))
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if idx == 0 {
                if *c < 0.0 {
                    write!(f, "-")?;
                }
            } else if *c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = monomial_string(&e.0, self.dim);
            if mono == "1" {
                write!(f, "{mag:?}")?;
            } else if mag == 1.0 {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag:?}*{mono}")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    indexed: Option<bool>,
}

struct RawTerm {
    coeff: f64,
    vars: Vec<(usize, u32)>,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let mut n = self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += self.digits();
        }
        if n == 0 {
            self.pos = start;
            return Err(self.err("expected a number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                self.pos = save;
                return Err(self.err("malformed exponent in number"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map_err(|_| Error::Syntax {
            pos: start,
            msg: format!("invalid number '{text}'"),
        })
    }

    fn variable(&mut self) -> Result<usize> {
        let start = self.pos;
        let c = match self.src.get(self.pos) {
            Some(c) => *c as char,
            None => return Err(self.err("expected a variable")),
        };
        let Some(letter) = LETTERS.iter().position(|l| *l == c) else {
            return Err(self.err(format!("unexpected character '{c}'")));
        };
        self.pos += 1;
        let indexed = c == 'x' && self.src.get(self.pos).is_some_and(u8::is_ascii_digit);
        if let Some(prev) = self.indexed {
            if prev != indexed {
                self.pos = start;
                return Err(self.err("cannot mix x,y,z,w with indexed variables x0..xN"));
            }
        }
        self.indexed = Some(indexed);
        if indexed {
            let s = self.pos;
            self.digits();
            let text = std::str::from_utf8(&self.src[s..self.pos]).expect("ascii");
            text.parse::<usize>().map_err(|_| Error::Syntax {
                pos: s,
                msg: "variable index too large".into(),
            })
        } else {
            Ok(letter)
        }
    }

    fn factor(&mut self) -> Result<(usize, u32)> {
        self.skip_ws();
        let v = self.variable()?;
        let mut k = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let s = self.pos;
            if self.digits() == 0 {
                return Err(self.err("expected an integer exponent"));
            }
            let text = std::str::from_utf8(&self.src[s..self.pos]).expect("ascii");
            k = text.parse::<u32>().map_err(|_| Error::Syntax {
                pos: s,
                msg: "exponent too large".into(),
            })?;
        }
        Ok((v, k))
    }

    fn term(&mut self, sign: f64) -> Result<RawTerm> {
        let mut coeff = sign;
        let mut vars = Vec::new();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                coeff *= self.number()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    vars.push(self.factor()?);
                }
            }
            _ => vars.push(self.factor()?),
        }
        while self.peek() == Some(b'*') {
            self.pos += 1;
            vars.push(self.factor()?);
        }
        Ok(RawTerm { coeff, vars })
    }
}

fn parse(text: &str, dim: Option<usize>) -> Result<HomogeneousPolynomial> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        indexed: None,
    };
    let mut raw = Vec::new();
    let mut starts = Vec::new();
    let mut sign = 1.0;
    match p.peek() {
        Some(b'-') => {
            sign = -1.0;
            p.pos += 1;
        }
        Some(b'+') => p.pos += 1,
        None => return Err(p.err("empty polynomial")),
        _ => {}
    }
    loop {
        p.skip_ws();
        starts.push(p.pos);
        raw.push(p.term(sign)?);
        match p.peek() {
            None => break,
            Some(b'+') => sign = 1.0,
            Some(b'-') => sign = -1.0,
            Some(c) => return Err(p.err(format!("unexpected character '{}'", c as char))),
        }
        p.pos += 1;
    }

    let max_var = raw.iter().flat_map(|t| t.vars.iter().map(|v| v.0)).max().unwrap_or(0);
    let dim = match dim {
        Some(d) => {
            if max_var >= d {
                return Err(Error::Dimension {
                    expected: d,
                    got: max_var + 1,
                });
            }
            d
        }
        None => max_var + 1,
    };
    if p.indexed == Some(false) && dim > 4 {
        return Err(Error::pre("letter variables only cover dimension up to 4; use x0..xN"));
    }

    let mut exps = Vec::with_capacity(raw.len());
    for t in &raw {
        let mut e = vec![0u32; dim];
        for &(v, k) in &t.vars {
            e[v] += k;
        }
        exps.push(e);
    }
    let first_degree: u32 = exps[0].iter().sum();
    for e in &exps[1..] {
        let d: u32 = e.iter().sum();
        if d != first_degree {
            return Err(Error::MixedDegree {
                first: monomial_string(&exps[0], dim),
                first_degree,
                second: monomial_string(e, dim),
                second_degree: d,
            });
        }
    }
    if first_degree < 2 {
        return Err(Error::Degree(format!("degree must be at least 2, got {first_degree}")));
    }
    let h = HomogeneousPolynomial::from_terms(
        dim,
        first_degree,
        raw.iter().zip(exps).map(|(t, e)| (e, t.coeff)),
    )?;
    if h.terms.is_empty() {
        return Err(Error::pre("polynomial has no nonzero terms"));
    }
    Ok(h)
}
