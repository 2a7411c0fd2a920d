use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::spectral::{log_spectral_radius, ScaledMatrix};
use super::{MatrixFamily, ZeroOneMatrix};
use crate::error::{Error, Result};
use crate::shape::Shape;

/// Square matrix of exact nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountMatrix {
    dim: usize,
    entries: Vec<BigUint>,
}

impl CountMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigUint::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigUint::one();
        }
        CountMatrix { dim, entries }
    }

    pub fn from_zero_one(m: &ZeroOneMatrix) -> Self {
        let n = m.dim();
        let entries = (0..n * n).map(|k| BigUint::from(m.get(k / n, k % n) as u8)).collect();
        CountMatrix { dim: n, entries }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare { rows: dim, cols: row.len() });
            }
            entries.extend(row.iter().map(|&v| BigUint::from(v)));
        }
        Ok(CountMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> &BigUint {
        &self.entries[a * self.dim + b]
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    /// `⟨e, M e⟩`, the sum of all entries.
    pub fn total(&self) -> BigUint {
        self.entries.iter().sum()
    }

    pub fn row_sum(&self, a: usize) -> BigUint {
        self.entries[a * self.dim..(a + 1) * self.dim].iter().sum()
    }

    pub fn mul(&self, other: &CountMatrix) -> CountMatrix {
        let n = self.dim;
        let mut entries = vec![BigUint::zero(); n * n];
        for a in 0..n {
            for c in 0..n {
                let x = &self.entries[a * n + c];
                if x.is_zero() {
                    continue;
                }
                for b in 0..n {
                    let y = &other.entries[c * n + b];
                    if !y.is_zero() {
                        entries[a * n + b] += x * y;
                    }
                }
            }
        }
        CountMatrix { dim: n, entries }
    }

    pub fn pow(&self, mut k: usize) -> CountMatrix {
        let mut acc = CountMatrix::identity(self.dim);
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

    pub fn to_u64_rows(&self) -> Option<Vec<Vec<u64>>> {
        use num_traits::ToPrimitive;
        (0..self.dim).map(|a| (0..self.dim).map(|b| self.get(a, b).to_u64()).collect()).collect()
    }
}

/// Limit on exact big-integer work. Entries of `M^l` have at most
/// `|l| * log10(|B|) + 1` decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SizeGuard {
    pub max_digits: f64,
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard { max_digits: 1e6 }
    }
}

impl SizeGuard {
    pub fn estimated_digits(dim: usize, l: &Shape) -> f64 {
        l.total() as f64 * (dim.max(1) as f64).log10() + 1.0
    }

    pub fn check(&self, dim: usize, l: &Shape) -> Result<()> {
        let need = Self::estimated_digits(dim, l);
        if need > self.max_digits {
            return Err(Error::BudgetExceeded { what: format!("exact power M^{l}"), required: need, limit: self.max_digits });
        }
        Ok(())
    }
}

/// `M_1^{l_1} ... M_r^{l_r}` with exact entries. `l = 0` gives the identity.
pub fn matrix_power_product(family: &MatrixFamily, l: &Shape) -> Result<CountMatrix> {
    matrix_power_product_guarded(family, l, SizeGuard::default())
}

pub fn matrix_power_product_guarded(family: &MatrixFamily, l: &Shape, guard: SizeGuard) -> Result<CountMatrix> {
    family.require_valid()?;
    family.require_rank(l)?;
    guard.check(family.letters(), l)?;
    Ok(ordered_power_product(family, l, &(0..family.rank()).collect::<Vec<_>>()))
}

/// Power product with factors taken in the given direction order. For a
/// valid family the order is irrelevant; exposed so that can be checked.
pub fn ordered_power_product(family: &MatrixFamily, l: &Shape, order: &[usize]) -> CountMatrix {
    let mut acc = CountMatrix::identity(family.letters());
    for &j in order {
        if l.get(j) > 0 {
            acc = acc.mul(&CountMatrix::from_zero_one(family.matrix(j)).pow(l.get(j)));
        }
    }
    acc
}

/// `w_l = ⟨e, M^l e⟩`, the number of words of shape `l`.
pub fn word_count(family: &MatrixFamily, l: &Shape) -> Result<BigUint> {
    Ok(matrix_power_product(family, l)?.total())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMethod {
    ExactPower,
    /// Exact powers exceeded the size guard; the power product was formed in
    /// log-scaled floating point instead.
    FloatFallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub nats: f64,
    pub method: EntropyMethod,
}

/// `log r(M_1^{p_1} ... M_r^{p_r})` in nats.
pub fn entropy_exact(family: &MatrixFamily, p: &Shape) -> Result<f64> {
    Ok(entropy_exact_report(family, p, SizeGuard::default())?.nats)
}

pub fn entropy_exact_report(family: &MatrixFamily, p: &Shape, guard: SizeGuard) -> Result<EntropyReport> {
    family.require_valid()?;
    family.require_rank(p)?;
    if p.is_zero() {
        return Err(Error::ZeroDirection);
    }
    match matrix_power_product_guarded(family, p, guard) {
        Ok(mp) => Ok(EntropyReport { nats: log_spectral_radius(&ScaledMatrix::from_counts(&mp)), method: EntropyMethod::ExactPower }),
        Err(Error::BudgetExceeded { .. }) => {
            let mp = ScaledMatrix::power_product(family, p);
            Ok(EntropyReport { nats: log_spectral_radius(&mp), method: EntropyMethod::FloatFallback })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::families::*;

    fn s(v: &[usize]) -> Shape {
        Shape::new(v.to_vec())
    }

    #[test]
    fn golden_cube_power() {
        let g1 = golden_mean();
        let m = matrix_power_product(&g1, &s(&[3])).unwrap();
        assert_eq!(m.to_u64_rows().unwrap(), vec![vec![3, 2], vec![2, 1]]);
        assert_eq!(word_count(&g1, &s(&[3])).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn zero_shape_is_identity() {
        for f in [golden_mean(), golden_tensor(), identity_pair()] {
            let l = Shape::zero(f.rank());
            assert_eq!(matrix_power_product(&f, &l).unwrap(), CountMatrix::identity(f.letters()));
        }
        let g4 = identity_pair();
        assert_eq!(matrix_power_product(&g4, &s(&[5, 7])).unwrap(), CountMatrix::identity(3));
        assert_eq!(word_count(&g4, &s(&[5, 7])).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn full_shift_counts() {
        assert_eq!(word_count(&full_two_shift(), &s(&[2])).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn factor_order_is_irrelevant() {
        let g = golden_cube();
        let l = s(&[2, 3, 1]);
        let a = ordered_power_product(&g, &l, &[0, 1, 2]);
        let b = ordered_power_product(&g, &l, &[2, 0, 1]);
        assert_eq!(a, b);
    }

    #[test]
    fn size_guard_trips_and_entropy_falls_back() {
        let g1 = golden_mean();
        let guard = SizeGuard { max_digits: 5.0 };
        assert!(matches!(matrix_power_product_guarded(&g1, &s(&[100]), guard), Err(Error::BudgetExceeded { .. })));
        let rep = entropy_exact_report(&g1, &s(&[100]), guard).unwrap();
        assert_eq!(rep.method, EntropyMethod::FloatFallback);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((rep.nats - 100.0 * phi.ln()).abs() < 1e-8);
    }

    #[test]
    fn entropy_errors() {
        assert!(matches!(entropy_exact(&golden_mean(), &s(&[0])), Err(Error::ZeroDirection)));
        assert!(matches!(entropy_exact(&golden_mean(), &s(&[1, 0])), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn identity_family_has_zero_entropy() {
        let g4 = identity_pair();
        for p in [s(&[1, 0]), s(&[0, 3]), s(&[2, 2])] {
            assert!(entropy_exact(&g4, &p).unwrap().abs() < 1e-12);
        }
    }
}
