//! Deterministic direction and point sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::linalg;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// `count` unit vectors in `R^n`, spread with a low-discrepancy rule: the
/// two signs for `n = 1`, golden-angle steps on the circle for `n = 2`, and
/// a Halton sequence pushed through the inverse normal CDF otherwise.
pub fn directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        0 => Vec::new(),
        1 => (0..count).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let th = golden * i as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        _ => {
            assert!(n <= PRIMES.len(), "direction sampling supports n <= {}", PRIMES.len());
            let normal = Normal::standard();
            (1..=count as u64)
                .map(|i| {
                    let v: Vec<f64> = PRIMES[..n]
                        .iter()
                        .map(|&b| normal.inverse_cdf(radical_inverse(i, b)))
                        .collect();
                    linalg::unit(&v)
                })
                .collect()
        }
    }
}

/// Halton point in the unit cube `[0,1)^n`, skipping index 0.
pub fn halton(i: usize, n: usize) -> Vec<f64> {
    PRIMES[..n].iter().map(|&b| radical_inverse(i as u64 + 1, b)).collect()
}

pub fn random_unit(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = linalg::norm(&v);
        if r > 1e-3 && r <= 1.0 {
            return linalg::scale(&v, 1.0 / r);
        }
    }
}
