//! Words of the rank-`r` model: labelings of lattice boxes by letters.

mod compose;
mod enumerate;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::MatrixFamily;
use crate::shape::Shape;

pub use compose::{compose, compose_all};
pub use enumerate::{collect_words, collect_words_with, enumerate_words, EnumBudget, WordIter};
pub use oracle::{count_oracle_check, CountOracleReport, CountRow};

/// A word of shape `m`: letters on every point of the box `[0, m]`, stored in
/// row-major order (last coordinate fastest).
///
/// Constructed through [`Word::new`] or the enumeration and composition
/// routines, all of which guarantee every edge is allowed by the family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    shape: Shape,
    labels: Vec<u32>,
}

impl Word {
    /// Checks the labeling against the family's edge constraints.
    pub fn new(family: &MatrixFamily, shape: Shape, labels: Vec<u32>) -> Result<Self> {
        family.require_rank(&shape)?;
        let w = Word::from_parts(shape, labels)?;
        if let Some((point, j)) = w.first_bad_edge(family) {
            return Err(Error::ShapeMismatch(format!("edge from {point:?} in direction {} is not allowed", j + 1)));
        }
        Ok(w)
    }

    /// Checks only that the label count matches the box and letters are in range.
    pub(crate) fn from_parts(shape: Shape, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != shape.volume() {
            return Err(Error::ShapeMismatch(format!("shape {shape} needs {} labels, got {}", shape.volume(), labels.len())));
        }
        Ok(Word { shape, labels })
    }

    /// The shape-0 word on letter `a`.
    pub fn letter(rank: usize, a: usize) -> Self {
        Word { shape: Shape::zero(rank), labels: vec![a as u32] }
    }

    /// Rank-1 word from a letter sequence; shape is `len - 1`.
    pub fn path(family: &MatrixFamily, letters: &[u32]) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::ShapeMismatch("a path needs at least one letter".into()));
        }
        Word::new(family, Shape::new(vec![letters.len() - 1]), letters.to_vec())
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.shape.rank()
    }

    pub fn at(&self, point: &[usize]) -> usize {
        self.labels[self.shape.index_of(point)] as usize
    }

    /// `o(w) = w(0)`.
    pub fn origin(&self) -> usize {
        self.labels[0] as usize
    }

    /// `t(w) = w(σ(w))`.
    pub fn terminal(&self) -> usize {
        *self.labels.last().expect("nonempty") as usize
    }

    /// Letters of `[offset, offset + shape]`, re-based at 0.
    pub fn sub_box(&self, offset: &Shape, shape: &Shape) -> Result<Word> {
        let end = offset + shape;
        if !end.le(&self.shape) {
            return Err(Error::ShapeNotDominated { inner: end.to_string(), outer: self.shape.to_string() });
        }
        let labels = shape
            .box_points()
            .map(|p| {
                let q: Vec<usize> = p.iter().zip(offset.coords()).map(|(a, b)| a + b).collect();
                self.labels[self.shape.index_of(&q)]
            })
            .collect();
        Ok(Word { shape: shape.clone(), labels })
    }

    /// `w|_{k]}`: the restriction to `[0, k]`.
    pub fn restrict_prefix(&self, k: &Shape) -> Result<Word> {
        self.sub_box(&Shape::zero(self.rank()), k)
    }

    /// `w|_{[k}`: the restriction to `k + [0, m - k]`, re-based at 0.
    pub fn restrict_tail(&self, k: &Shape) -> Result<Word> {
        let rest =
            self.shape.checked_sub(k).ok_or_else(|| Error::ShapeNotDominated { inner: k.to_string(), outer: self.shape.to_string() })?;
        self.sub_box(k, &rest)
    }

    /// First edge `(point, direction)` not allowed by the family, if any.
    pub fn first_bad_edge(&self, family: &MatrixFamily) -> Option<(Vec<usize>, usize)> {
        for (idx, p) in self.shape.box_points().enumerate() {
            let a = self.labels[idx] as usize;
            if a >= family.letters() {
                return Some((p, usize::MAX));
            }
            for j in 0..self.rank() {
                if p[j] < self.shape.get(j) {
                    let mut q = p.clone();
                    q[j] += 1;
                    let b = self.labels[self.shape.index_of(&q)] as usize;
                    if b >= family.letters() || !family.allowed(j, a, b) {
                        return Some((p, j));
                    }
                }
            }
        }
        None
    }

    /// Rank-1 words rendered as digit strings, e.g. `"1010"`.
    pub fn as_string(&self) -> String {
        self.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(if self.labels.iter().any(|&l| l > 9) { "," } else { "" })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("word serializes")
    }

    pub fn from_json(family: &MatrixFamily, s: &str) -> Result<Word> {
        let raw: Word = serde_json::from_str(s)?;
        Word::new(family, raw.shape, raw.labels)
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
    fn prefix_and_tail_of_a_path() {
        let g1 = golden_mean();
        let w = Word::path(&g1, &[1, 0, 1, 0]).unwrap();
        assert_eq!(w.restrict_prefix(&s(&[1])).unwrap().labels(), &[1, 0]);
        assert_eq!(w.restrict_tail(&s(&[1])).unwrap().labels(), &[0, 1, 0]);
        assert_eq!(w.restrict_prefix(&s(&[0])).unwrap(), Word::letter(1, w.origin()));
        assert_eq!(w.restrict_tail(&s(&[0])).unwrap(), w);
        assert_eq!(w.restrict_prefix(&s(&[3])).unwrap(), w);
        assert_eq!(w.restrict_tail(&s(&[3])).unwrap(), Word::letter(1, w.terminal()));
        assert!(matches!(w.restrict_prefix(&s(&[4])), Err(Error::ShapeNotDominated { .. })));
    }

    #[test]
    fn new_rejects_forbidden_edges() {
        let g1 = golden_mean();
        assert!(Word::path(&g1, &[1, 1]).is_err());
        assert!(Word::new(&g1, s(&[1]), vec![0]).is_err());
        assert!(Word::new(&g1, s(&[1]), vec![0, 5]).is_err());
    }

    #[test]
    fn json_shape() {
        let g1 = golden_mean();
        let w = Word::path(&g1, &[0, 1, 0]).unwrap();
        assert_eq!(w.to_json(), r#"{"shape":[2],"labels":[0,1,0]}"#);
        assert_eq!(Word::from_json(&g1, &w.to_json()).unwrap(), w);
    }

    #[test]
    fn two_dimensional_restriction() {
        let g3 = golden_tensor();
        let words = collect_words(&g3, &s(&[1, 2]), None).unwrap();
        let w = &words[words.len() / 2];
        let pre = w.restrict_prefix(&s(&[1, 1])).unwrap();
        let tail = w.restrict_tail(&s(&[1, 1])).unwrap();
        assert_eq!(pre.shape(), &s(&[1, 1]));
        assert_eq!(tail.shape(), &s(&[0, 1]));
        assert_eq!(pre.terminal(), tail.origin());
        assert_eq!(pre.at(&[1, 0]), w.at(&[1, 0]));
        assert_eq!(tail.at(&[0, 1]), w.at(&[1, 2]));
    }
}
