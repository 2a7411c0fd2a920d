//! Transition-matrix families `M = (M_1, ..., M_r)` and their linear algebra.
//!
//! A family of `r` commuting 0-1 matrices over an alphabet `B` defines the
//! rank-`r` word model: a word of shape `m` labels the box `[0, m]` with
//! letters so that every edge `l -> l + e_j` is allowed by `M_j`. Counting,
//! powers and spectral radii of such families live here.

mod exact;
mod spectral;
mod validate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::Shape;

pub use exact::{
    entropy_exact, entropy_exact_report, matrix_power_product, word_count, CountMatrix, EntropyMethod, EntropyReport, SizeGuard,
};
pub use spectral::{log_spectral_radius, spectral_radius, spectral_radius_rows, ScaledMatrix};
pub use validate::{validate_family, ValidationReport, Violation};

/// Ordered list of distinct letter names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet(Vec<String>);

impl Alphabet {
    pub fn new(letters: Vec<String>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Parse("alphabet must contain at least one letter".into()));
        }
        for (i, a) in letters.iter().enumerate() {
            if letters[..i].contains(a) {
                return Err(Error::Parse(format!("duplicate letter {a:?}")));
            }
        }
        Ok(Alphabet(letters))
    }

    /// Letters named `"0"`, `"1"`, ...
    pub fn numbered(size: usize) -> Self {
        Alphabet((0..size).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|l| l == name)
    }
}

/// Square matrix with entries in {0, 1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZeroOneMatrix {
    dim: usize,
    bits: Vec<bool>,
}

impl ZeroOneMatrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let dim = rows.len();
        let mut bits = Vec::with_capacity(dim * dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare { rows: dim, cols: row.len() });
            }
            for (c, &v) in row.iter().enumerate() {
                match v {
                    0 => bits.push(false),
                    1 => bits.push(true),
                    _ => return Err(Error::ShapeMismatch(format!("entry ({r},{c}) = {v} is not 0 or 1"))),
                }
            }
        }
        Ok(ZeroOneMatrix { dim, bits })
    }

    pub fn identity(dim: usize) -> Self {
        let mut bits = vec![false; dim * dim];
        for i in 0..dim {
            bits[i * dim + i] = true;
        }
        ZeroOneMatrix { dim, bits }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                bits.push(f(a, b));
            }
        }
        ZeroOneMatrix { dim, bits }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.dim + b]
    }

    pub fn is_zero(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.dim).map(|a| (0..self.dim).map(|b| self.get(a, b) as u8).collect()).collect()
    }

    /// Letters `b` with `M(a, b) = 1`, ascending.
    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).filter(move |&b| self.get(a, b))
    }

    /// Integer product, entries may exceed 1.
    pub fn product_counts(&self, other: &ZeroOneMatrix) -> Vec<u32> {
        let n = self.dim;
        let mut out = vec![0u32; n * n];
        for a in 0..n {
            for c in self.successors(a) {
                for b in other.successors(c) {
                    out[a * n + b] += 1;
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`; letter `(x, y)` has index `x * other.dim + y`.
    pub fn kron(&self, other: &ZeroOneMatrix) -> ZeroOneMatrix {
        let (n, k) = (self.dim, other.dim);
        ZeroOneMatrix::from_fn(n * k, |a, b| self.get(a / k, b / k) && other.get(a % k, b % k))
    }
}

/// On-disk form of a family. `matrices[i][row][col]` is `M_{i+1}(row, col)`.
///
/// Entries are read as signed integers so that bad input survives parsing and
/// is reported by [`validate_family`] instead of failing in serde.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub rank: usize,
    pub alphabet: Vec<String>,
    pub matrices: Vec<Vec<Vec<i64>>>,
}

impl FamilyFile {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("family serializes")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Unvalidated,
    Valid,
    Invalid(ValidationReport),
}

/// A tuple of `r` square 0-1 matrices over a common alphabet.
///
/// Operations that rely on the factorization property require
/// `status == Status::Valid` and return [`Error::InvalidFamily`] otherwise.
#[derive(Clone, Debug)]
pub struct MatrixFamily {
    alphabet: Alphabet,
    matrices: Vec<ZeroOneMatrix>,
    status: Status,
    // succ[j][a] = letters reachable from a along direction j
    succ: Vec<Vec<Vec<u32>>>,
}

impl PartialEq for MatrixFamily {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.matrices == other.matrices
    }
}

impl MatrixFamily {
    /// Builds an unvalidated family. Fails only on structural problems
    /// (empty rank, mismatched dimensions).
    pub fn unvalidated(alphabet: Alphabet, matrices: Vec<ZeroOneMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::ShapeMismatch("family needs at least one matrix".into()));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.dim() != alphabet.len() {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {} has dimension {} but the alphabet has {} letters",
                    i + 1,
                    m.dim(),
                    alphabet.len()
                )));
            }
        }
        let succ = matrices.iter().map(|m| (0..m.dim()).map(|a| m.successors(a).map(|b| b as u32).collect()).collect()).collect();
        Ok(MatrixFamily { alphabet, matrices, status: Status::Unvalidated, succ })
    }

    /// Builds and validates. The result may carry `Status::Invalid`.
    pub fn new(alphabet: Alphabet, matrices: Vec<ZeroOneMatrix>) -> Result<Self> {
        let mut fam = Self::unvalidated(alphabet, matrices)?;
        let report = validate::validate_matrices(&fam.matrices);
        fam.status = if report.is_valid() { Status::Valid } else { Status::Invalid(report) };
        Ok(fam)
    }

    /// Builds, validates and insists on validity.
    pub fn new_valid(alphabet: Alphabet, matrices: Vec<ZeroOneMatrix>) -> Result<Self> {
        let fam = Self::new(alphabet, matrices)?;
        fam.require_valid()?;
        Ok(fam)
    }

    /// Convenience constructor with numbered letters.
    pub fn from_rows(matrices: &[Vec<Vec<u8>>]) -> Result<Self> {
        let ms = matrices.iter().map(|m| ZeroOneMatrix::from_rows(m)).collect::<Result<Vec<_>>>()?;
        let dim = ms.first().map(|m| m.dim()).unwrap_or(0);
        Self::new(Alphabet::numbered(dim), ms)
    }

    pub fn from_file(file: &FamilyFile) -> Result<Self> {
        let report = validate_family(file);
        if let Some(v) = report.violations.iter().find(|v| v.is_structural()) {
            return Err(Error::InvalidFamily(format!("{}: {}", v.code, v.witness)));
        }
        let alphabet = Alphabet::new(file.alphabet.clone())?;
        let ms = file
            .matrices
            .iter()
            .map(|m| {
                let rows: Vec<Vec<u8>> = m.iter().map(|r| r.iter().map(|&v| v as u8).collect()).collect();
                ZeroOneMatrix::from_rows(&rows)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut fam = Self::unvalidated(alphabet, ms)?;
        fam.status = if report.is_valid() { Status::Valid } else { Status::Invalid(report) };
        Ok(fam)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&FamilyFile::from_json(s)?)
    }

    pub fn to_file(&self) -> FamilyFile {
        FamilyFile {
            rank: self.rank(),
            alphabet: self.alphabet.letters().to_vec(),
            matrices: self
                .matrices
                .iter()
                .map(|m| m.rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        self.to_file().to_json()
    }

    /// `M_1 = A_1 ⊗ I`, `M_2 = I ⊗ A_2`: the canonical valid rank-2 construction.
    pub fn tensor_pair(a1: &ZeroOneMatrix, a2: &ZeroOneMatrix) -> Result<Self> {
        let m1 = a1.kron(&ZeroOneMatrix::identity(a2.dim()));
        let m2 = ZeroOneMatrix::identity(a1.dim()).kron(a2);
        Self::new(Alphabet::numbered(a1.dim() * a2.dim()), vec![m1, m2])
    }

    pub fn rank(&self) -> usize {
        self.matrices.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn matrices(&self) -> &[ZeroOneMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, j: usize) -> &ZeroOneMatrix {
        &self.matrices[j]
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }

    /// Successor letters of `a` in direction `j`.
    #[inline]
    pub fn successors(&self, j: usize, a: usize) -> &[u32] {
        &self.succ[j][a]
    }

    #[inline]
    pub fn allowed(&self, j: usize, a: usize, b: usize) -> bool {
        self.matrices[j].get(a, b)
    }

    pub fn require_valid(&self) -> Result<()> {
        match &self.status {
            Status::Valid => Ok(()),
            Status::Unvalidated => Err(Error::InvalidFamily("family has not been validated".into())),
            Status::Invalid(report) => Err(Error::InvalidFamily(report.summary())),
        }
    }

    pub fn require_rank(&self, shape: &Shape) -> Result<()> {
        if shape.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), found: shape.rank() });
        }
        Ok(())
    }

    /// The unique letter `d` with `M_j(a, d) = M_i(d, b) = 1`, i.e. the missing
    /// corner of the unit square whose other path is `a ->_i c ->_j b`.
    pub fn complete_square(&self, j: usize, i: usize, a: usize, b: usize) -> std::result::Result<usize, usize> {
        let mut found = None;
        let mut count = 0;
        for &d in self.successors(j, a) {
            if self.allowed(i, d as usize, b) {
                count += 1;
                found.get_or_insert(d as usize);
            }
        }
        match (count, found) {
            (1, Some(d)) => Ok(d),
            _ => Err(count),
        }
    }
}

/// Test families used throughout the crate's tests, benches and docs.
pub mod families {
    use super::*;

    /// Golden mean shift: `A = [[1,1],[1,0]]`, rank 1.
    pub fn golden_mean() -> MatrixFamily {
        MatrixFamily::from_rows(&[vec![vec![1, 1], vec![1, 0]]]).unwrap()
    }

    /// Full 2-shift: `J = [[1,1],[1,1]]`, rank 1.
    pub fn full_two_shift() -> MatrixFamily {
        MatrixFamily::from_rows(&[vec![vec![1, 1], vec![1, 1]]]).unwrap()
    }

    /// `M_1 = A ⊗ I`, `M_2 = I ⊗ A` with `A` the golden mean matrix, on 4 letters.
    pub fn golden_tensor() -> MatrixFamily {
        let a = golden_mean().matrix(0).clone();
        MatrixFamily::tensor_pair(&a, &a).unwrap()
    }

    /// `M_1 = M_2 = I` on 3 letters.
    pub fn identity_pair() -> MatrixFamily {
        let i = ZeroOneMatrix::identity(3);
        MatrixFamily::new(Alphabet::numbered(3), vec![i.clone(), i]).unwrap()
    }

    /// Rank 3: `A ⊗ I ⊗ I`, `I ⊗ A ⊗ I`, `I ⊗ I ⊗ A` on 8 letters.
    pub fn golden_cube() -> MatrixFamily {
        let a = golden_mean().matrix(0).clone();
        let i = ZeroOneMatrix::identity(2);
        let m1 = a.kron(&i).kron(&i);
        let m2 = i.kron(&a).kron(&i);
        let m3 = i.kron(&i).kron(&a);
        MatrixFamily::new(Alphabet::numbered(8), vec![m1, m2, m3]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn reference_families_are_valid() {
        for f in [golden_mean(), full_two_shift(), golden_tensor(), identity_pair(), golden_cube()] {
            assert!(f.is_valid(), "{:?}", f.status());
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let g3 = golden_tensor();
        let s = g3.to_json();
        assert!(s.starts_with("{\"rank\":2,\"alphabet\":[\"0\",\"1\",\"2\",\"3\"],\"matrices\":[[[1,0,1,0],"));
        let back = MatrixFamily::from_json(&s).unwrap();
        assert_eq!(back, g3);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn square_completion_on_tensor() {
        let g3 = golden_tensor();
        // letters (x, y) -> 2x + y; M_1 moves x, M_2 moves y.
        // (0,0) ->_1 (1,0) ->_2 (1,1): the other corner is (0,1).
        assert_eq!(g3.complete_square(1, 0, 0, 3), Ok(1));
    }

    #[test]
    fn unvalidated_family_is_rejected_by_operations() {
        let i = ZeroOneMatrix::identity(2);
        let f = MatrixFamily::unvalidated(Alphabet::numbered(2), vec![i]).unwrap();
        assert!(matches!(f.require_valid(), Err(Error::InvalidFamily(_))));
    }
}
