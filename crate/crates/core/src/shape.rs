//! Multi-indices in `Z_+^r` with the coordinatewise partial order.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `Z_+^r`. Also used as the shape (multidegree) of a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(coords: Vec<usize>) -> Self {
        assert!(!coords.is_empty(), "shape rank must be at least 1");
        Shape(coords)
    }

    pub fn zero(rank: usize) -> Self {
        Shape::new(vec![0; rank])
    }

    /// The diagonal point `(k, ..., k)`.
    pub fn cube(rank: usize, k: usize) -> Self {
        Shape::new(vec![k; rank])
    }

    /// The `j`-th standard basis vector (0-based direction).
    pub fn unit(rank: usize, j: usize) -> Self {
        let mut c = vec![0; rank];
        c[j] = 1;
        Shape::new(c)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, j: usize) -> usize {
        self.0[j]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Coordinatewise `self <= other`.
    pub fn le(&self, other: &Shape) -> bool {
        self.rank() == other.rank() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Coordinatewise maximum.
    pub fn sup(&self, other: &Shape) -> Shape {
        debug_assert_eq!(self.rank(), other.rank());
        Shape(self.0.iter().zip(&other.0).map(|(&a, &b)| a.max(b)).collect())
    }

    /// `self - other`, or `None` unless `other <= self`.
    pub fn checked_sub(&self, other: &Shape) -> Option<Shape> {
        if !other.le(self) {
            return None;
        }
        Some(Shape(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, k: usize) -> Shape {
        Shape(self.0.iter().map(|c| c * k).collect())
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max_coord(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn min_coord(&self) -> usize {
        self.0.iter().copied().min().unwrap_or(0)
    }

    /// Number of lattice points in the box `[0, self]`.
    pub fn volume(&self) -> usize {
        self.0.iter().map(|c| c + 1).product()
    }

    /// Row-major index of `point` inside the box `[0, self]` (last coordinate fastest).
    pub fn index_of(&self, point: &[usize]) -> usize {
        debug_assert_eq!(point.len(), self.rank());
        let mut idx = 0;
        for (p, m) in point.iter().zip(&self.0) {
            debug_assert!(p <= m);
            idx = idx * (m + 1) + p;
        }
        idx
    }

    /// Inverse of [`Shape::index_of`].
    pub fn point_of(&self, mut idx: usize) -> Vec<usize> {
        let mut point = vec![0; self.rank()];
        for j in (0..self.rank()).rev() {
            let side = self.0[j] + 1;
            point[j] = idx % side;
            idx /= side;
        }
        point
    }

    /// All points of the box `[0, self]` in row-major order.
    pub fn box_points(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.volume()).map(move |i| self.point_of(i))
    }

    /// All shapes `l` with `0 <= l <= self`, in row-major order.
    pub fn dominated(&self) -> impl Iterator<Item = Shape> + '_ {
        self.box_points().map(Shape)
    }

    /// Parses `"3"` or `"1,2"`. A single value is broadcast to the diagonal of the given rank.
    pub fn parse(s: &str, rank: usize) -> Result<Shape> {
        let coords = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("bad shape {s:?}: {e}")))?;
        match coords.len() {
            1 => Ok(Shape::cube(rank, coords[0])),
            n if n == rank => Ok(Shape::new(coords)),
            n => Err(Error::RankMismatch { expected: rank, found: n }),
        }
    }
}

impl Add for &Shape {
    type Output = Shape;

    fn add(self, rhs: &Shape) -> Shape {
        debug_assert_eq!(self.rank(), rhs.rank());
        Shape(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Add for Shape {
    type Output = Shape;

    fn add(self, rhs: Shape) -> Shape {
        &self + &rhs
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<usize>> for Shape {
    fn from(v: Vec<usize>) -> Self {
        Shape::new(v)
    }
}
