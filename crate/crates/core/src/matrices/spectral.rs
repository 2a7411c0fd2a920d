//! Perron root of nonnegative matrices by repeated squaring.
//!
//! Matrices are carried as `exp(log_scale) * entries` with the largest entry
//! normalised to 1, so powers `A^(2^s)` never overflow. The estimate at step
//! `s` is `(log ||A^(2N)|| - log ||A^N||) / N` with `N = 2^s` and the entry-sum
//! norm; it needs no irreducibility or aperiodicity and handles nilpotent input.

use super::{CountMatrix, MatrixFamily};
use crate::bignum::ln_big;
use crate::error::{Error, Result};
use crate::shape::Shape;

const MAX_SQUARINGS: u32 = 64;
const TOL: f64 = 1e-12;

/// Nonnegative matrix `exp(log_scale) * entries`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledMatrix {
    dim: usize,
    entries: Vec<f64>,
    log_scale: f64,
}

impl ScaledMatrix {
    pub fn from_f64(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::NotSquare { rows: dim, cols: entries.len() / dim.max(1) });
        }
        if let Some(k) = entries.iter().position(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::NegativeEntry { row: k / dim, col: k % dim });
        }
        let mut m = ScaledMatrix { dim, entries, log_scale: 0.0 };
        m.normalize();
        Ok(m)
    }

    pub fn from_counts(c: &CountMatrix) -> Self {
        let logs: Vec<f64> = c.entries().iter().map(ln_big).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return ScaledMatrix { dim: c.dim(), entries: vec![0.0; logs.len()], log_scale: 0.0 };
        }
        let entries = logs.iter().map(|&l| (l - top).exp()).collect();
        ScaledMatrix { dim: c.dim(), entries, log_scale: top }
    }

    pub fn identity(dim: usize) -> Self {
        ScaledMatrix::from_counts(&CountMatrix::identity(dim))
    }

    /// `M^p` formed in log-scaled floating point.
    pub fn power_product(family: &MatrixFamily, p: &Shape) -> Self {
        let mut acc = ScaledMatrix::identity(family.letters());
        for j in 0..family.rank() {
            if p.get(j) > 0 {
                let m = ScaledMatrix::from_counts(&CountMatrix::from_zero_one(family.matrix(j)));
                acc = acc.mul(&m.pow(p.get(j)));
            }
        }
        acc
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0)
    }

    /// Entry `(a, b)` as a natural log.
    pub fn ln_entry(&self, a: usize, b: usize) -> f64 {
        self.log_scale + self.entries[a * self.dim + b].ln()
    }

    /// `log ⟨e, M e⟩`.
    pub fn ln_total(&self) -> f64 {
        self.log_scale + self.entries.iter().sum::<f64>().ln()
    }

    fn normalize(&mut self) {
        let top = self.entries.iter().copied().fold(0.0, f64::max);
        if top > 0.0 {
            for x in &mut self.entries {
                *x /= top;
            }
            self.log_scale += top.ln();
        } else {
            self.log_scale = 0.0;
        }
    }

    pub fn mul(&self, other: &ScaledMatrix) -> ScaledMatrix {
        let n = self.dim;
        let mut entries = vec![0.0; n * n];
        for a in 0..n {
            for c in 0..n {
                let x = self.entries[a * n + c];
                if x == 0.0 {
                    continue;
                }
                for b in 0..n {
                    entries[a * n + b] += x * other.entries[c * n + b];
                }
            }
        }
        let mut m = ScaledMatrix { dim: n, entries, log_scale: self.log_scale + other.log_scale };
        m.normalize();
        m
    }

    pub fn pow(&self, mut k: usize) -> ScaledMatrix {
        let mut acc = ScaledMatrix::identity(self.dim);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `diag(exp(g)) * self`.
    pub fn scale_rows_ln(&self, g: &[f64]) -> ScaledMatrix {
        assert_eq!(g.len(), self.dim);
        let top = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let n = self.dim;
        let mut entries = self.entries.clone();
        for a in 0..n {
            let w = (g[a] - top).exp();
            for b in 0..n {
                entries[a * n + b] *= w;
            }
        }
        let mut m = ScaledMatrix { dim: n, entries, log_scale: self.log_scale + top };
        m.normalize();
        m
    }
}

/// Natural log of the spectral radius; `-inf` when the radius is 0.
pub fn log_spectral_radius(m: &ScaledMatrix) -> f64 {
    if m.is_zero() {
        return f64::NEG_INFINITY;
    }
    let mut power = m.clone();
    let mut prev_norm = power.ln_total();
    let mut prev_est: Option<f64> = None;
    let mut n = 1.0f64;
    for _ in 0..MAX_SQUARINGS {
        power = power.mul(&power);
        if power.is_zero() {
            return f64::NEG_INFINITY;
        }
        let norm = power.ln_total();
        let est = (norm - prev_norm) / n;
        if let Some(p) = prev_est {
            let r = est.exp();
            if (est - p).abs() * r.max(f64::MIN_POSITIVE) < TOL * r.max(1.0) {
                return est;
            }
        }
        prev_est = Some(est);
        prev_norm = norm;
        n *= 2.0;
    }
    prev_est.expect("at least one squaring")
}

/// Spectral radius of an exact nonnegative integer matrix.
pub fn spectral_radius(m: &CountMatrix) -> f64 {
    log_spectral_radius(&ScaledMatrix::from_counts(m)).exp()
}

/// Spectral radius of a nonnegative real matrix given by rows.
pub fn spectral_radius_rows(rows: &[Vec<f64>]) -> Result<f64> {
    let dim = rows.len();
    let mut entries = Vec::with_capacity(dim * dim);
    for row in rows {
        if row.len() != dim {
            return Err(Error::NotSquare { rows: dim, cols: row.len() });
        }
        entries.extend_from_slice(row);
    }
    Ok(log_spectral_radius(&ScaledMatrix::from_f64(dim, entries)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Largest real root of `x^2 - t x + d` by bisection on `[0, t + |d| + 1]`.
    fn quadratic_root(t: f64, d: f64) -> f64 {
        let f = |x: f64| x * x - t * x + d;
        let (mut lo, mut hi) = ((t / 2.0).max(0.0), t.abs() + d.abs() + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn counts(rows: &[Vec<u64>]) -> CountMatrix {
        CountMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn all_ones_and_identity() {
        assert!((spectral_radius(&counts(&[vec![1, 1], vec![1, 1]])) - 2.0).abs() < 1e-12);
        assert!((spectral_radius(&CountMatrix::identity(4)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_against_bisection() {
        let want = quadratic_root(1.0, -1.0);
        let got = spectral_radius(&counts(&[vec![1, 1], vec![1, 0]]));
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        assert!((got - 1.6180339887).abs() < 1e-9);
    }

    #[test]
    fn reducible_periodic_and_nilpotent() {
        assert_eq!(spectral_radius(&counts(&[vec![0, 1], vec![0, 0]])), 0.0);
        assert_eq!(spectral_radius(&counts(&[vec![0, 0], vec![0, 0]])), 0.0);
        let perm = counts(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert!((spectral_radius(&perm) - 1.0).abs() < 1e-12);
        // Jordan block with eigenvalue 1.
        let jordan = counts(&[vec![1, 1], vec![0, 1]]);
        assert!((spectral_radius(&jordan) - 1.0).abs() < 1e-10);
        // Block triangular: max of the diagonal blocks' radii.
        let tri = counts(&[vec![1, 1, 1], vec![1, 0, 1], vec![0, 0, 2]]);
        assert!((spectral_radius(&tri) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn weighted_matrix_against_bisection() {
        let e = 0.5f64.exp();
        let rows = vec![vec![1.0, 1.0], vec![e, 0.0]];
        let want = quadratic_root(1.0, -e);
        assert!((spectral_radius_rows(&rows).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_real_input() {
        assert!(matches!(spectral_radius_rows(&[vec![1.0, -1.0], vec![0.0, 1.0]]), Err(Error::NegativeEntry { row: 0, col: 1 })));
        assert!(matches!(spectral_radius_rows(&[vec![1.0, 1.0], vec![0.0]]), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn huge_exact_powers() {
        let a = counts(&[vec![1, 1], vec![1, 0]]);
        let r = spectral_radius(&a.pow(1000)).ln();
        let phi = quadratic_root(1.0, -1.0);
        assert!((r - 1000.0 * phi.ln()).abs() < 1e-8);
    }
}
