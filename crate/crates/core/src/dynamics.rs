//! Bowen entropy of the shifts `T^p` and of the full `Z_+^r` action.
//!
//! Points of the path space are represented by finite truncations (words).
//! The metric is `d(x, y) = 1/(k+1)` where `k` is the side of the smallest
//! diagonal cube `[0, k̄]` on which `x` and `y` differ. At scale
//! `ε_k = 1/(k+2)` and with `k̄ >= p`, two points are `(n, ε_k)`-separated
//! exactly when their restrictions to `[0, k̄ + np]` differ, so a maximal
//! separated set has `w_{k̄+np}` elements.

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::Serialize;

use crate::bignum::ln_big;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrices::{matrix_power_product, word_count, CountMatrix, MatrixFamily, SizeGuard};
use crate::shape::Shape;
use crate::words::{collect_words_with, EnumBudget, Word};

/// Distance between two truncated points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    /// First disagreement on the cube of side `k`; `d = 1/(k+1)`.
    Separated { k: usize },
    /// Equal on every available cube up to side `side`. As truncations they
    /// are equal (distance 0); the underlying points satisfy `d <= 1/(side+2)`.
    EqualOnCube { side: usize },
}

impl Distance {
    pub fn value(&self) -> Ratio<u64> {
        match *self {
            Distance::Separated { k } => Ratio::new(1, k as u64 + 1),
            Distance::EqualOnCube { .. } => Ratio::from_integer(0),
        }
    }

    pub fn upper_bound(&self) -> Ratio<u64> {
        match *self {
            Distance::Separated { k } => Ratio::new(1, k as u64 + 1),
            Distance::EqualOnCube { side } => Ratio::new(1, side as u64 + 2),
        }
    }
}

/// `ε_k = 1/(k+2)`.
pub fn epsilon(k: usize) -> Ratio<u64> {
    Ratio::new(1, k as u64 + 2)
}

/// The metric on truncations of equal shape, using the largest diagonal cube
/// contained in the shape.
pub fn metric(x: &Word, y: &Word) -> Result<Distance> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch(format!("{} vs {}", x.shape(), y.shape())));
    }
    let side = x.shape().min_coord();
    let first = x
        .shape()
        .box_points()
        .zip(x.labels().iter().zip(y.labels()))
        .filter(|(p, (a, b))| a != b && p.iter().all(|&c| c <= side))
        .map(|(p, _)| p.into_iter().max().unwrap_or(0))
        .min();
    Ok(match first {
        Some(k) => Distance::Separated { k },
        None => Distance::EqualOnCube { side },
    })
}

/// Truncation of `T^p x`: the tail of `x` from `p`.
pub fn shift_truncation(x: &Word, p: &Shape) -> Result<Word> {
    x.restrict_tail(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    Formula,
    Bruteforce,
}

fn check_scale(family: &MatrixFamily, p: &Shape, k: usize) -> Result<()> {
    family.require_valid()?;
    family.require_rank(p)?;
    if !p.le(&Shape::cube(p.rank(), k)) {
        return Err(Error::ScaleTooFine { k, p: p.to_string() });
    }
    Ok(())
}

/// `d_n(x, y) = max_{0<=l<=n} d(T^{lp} x, T^{lp} y)` on truncations.
pub fn bowen_distance(x: &Word, y: &Word, p: &Shape, n: usize) -> Result<Ratio<u64>> {
    let mut best = Ratio::from_integer(0);
    for l in 0..=n {
        let lp = p.scale(l);
        let d = metric(&shift_truncation(x, &lp)?, &shift_truncation(y, &lp)?)?.value();
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// Size of a maximal `(n, ε_k)`-separated set for `T^p`.
///
/// `Formula` returns `w_{k̄+np}`. `Bruteforce` enumerates `Λ_{k̄+np}`, computes
/// all pairwise Bowen distances and builds a separated set greedily in
/// enumeration order.
pub fn separated_count(family: &MatrixFamily, p: &Shape, k: usize, n: usize, mode: CountMode) -> Result<BigUint> {
    separated_count_with(family, p, k, n, mode, EnumBudget::default(), Exec::default())
}

pub fn separated_count_with(
    family: &MatrixFamily,
    p: &Shape,
    k: usize,
    n: usize,
    mode: CountMode,
    budget: EnumBudget,
    exec: Exec,
) -> Result<BigUint> {
    check_scale(family, p, k)?;
    let shape = &Shape::cube(p.rank(), k) + &p.scale(n);
    match mode {
        CountMode::Formula => word_count(family, &shape),
        CountMode::Bruteforce => {
            let words = collect_words_with(family, &shape, None, budget, exec)?;
            let pairs = (words.len() as f64).powi(2);
            let pair_limit = budget.max_ln_words.exp();
            if pairs > pair_limit {
                return Err(Error::BudgetExceeded { what: "pairwise Bowen distances".into(), required: pairs, limit: pair_limit });
            }
            let eps = epsilon(k);
            let rows = exec.try_map_range(words.len(), |i| -> Result<Vec<bool>> {
                (0..i).map(|j| Ok(bowen_distance(&words[i], &words[j], p, n)? > eps)).collect()
            })?;
            let mut chosen: Vec<usize> = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                if chosen.iter().all(|&j| row[j]) {
                    chosen.push(i);
                }
            }
            Ok(BigUint::from(chosen.len()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BowenEstimate {
    /// `a_n = log(w_{k̄+np}) / n` for `n = 1..=n_max`.
    pub sequence: Vec<f64>,
    /// `b_n = log w_{k̄+(n+1)p} - log w_{k̄+np}` for `n = 1..n_max`.
    pub diffs: Vec<f64>,
    /// `b_{n_max - 1}`.
    pub estimate: f64,
}

/// `log w_{base + n p}` for `n = 0..=n_max`, by repeated exact multiplication.
pub(crate) fn log_counts_along(family: &MatrixFamily, base: &Shape, p: &Shape, n_max: usize) -> Result<Vec<f64>> {
    SizeGuard::default().check(family.letters(), &(base + &p.scale(n_max)))?;
    let step = matrix_power_product(family, p)?;
    let mut acc: CountMatrix = matrix_power_product(family, base)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(ln_big(&acc.total()));
    for _ in 0..n_max {
        acc = acc.mul(&step);
        out.push(ln_big(&acc.total()));
    }
    Ok(out)
}

/// Entropy of `T^p` from separated-set growth at scale `ε_k`.
pub fn bowen_entropy_estimate(family: &MatrixFamily, p: &Shape, k: usize, n_max: usize) -> Result<BowenEstimate> {
    check_scale(family, p, k)?;
    if p.is_zero() {
        return Err(Error::ZeroDirection);
    }
    if n_max < 2 {
        return Err(Error::Parse(format!("n_max must be at least 2, got {n_max}")));
    }
    let logs = log_counts_along(family, &Shape::cube(p.rank(), k), p, n_max)?;
    Ok(estimate_from_logs(&logs))
}

/// Turns `L_n` for `n = 0..=n_max` into the `(1/n) L_n` and `L_{n+1} - L_n` sequences.
pub(crate) fn estimate_from_logs(logs: &[f64]) -> BowenEstimate {
    let n_max = logs.len() - 1;
    let sequence = (1..=n_max).map(|n| logs[n] / n as f64).collect();
    let diffs: Vec<f64> = (1..n_max).map(|n| logs[n + 1] - logs[n]).collect();
    let estimate = *diffs.last().expect("n_max >= 2");
    BowenEstimate { sequence, diffs, estimate }
}

/// `(1/n^r) log w_{(k+n)ē}`: the bound on the `Z_+^r` action entropy at
/// scale `ε_k` over the Følner cubes `{a : max a_i <= n}`. Tends to 0 for `r >= 2`.
pub fn action_entropy_estimate(family: &MatrixFamily, k: usize, n: usize) -> Result<f64> {
    family.require_valid()?;
    let r = family.rank();
    if r < 2 {
        return Err(Error::RankOne);
    }
    if n == 0 {
        return Err(Error::Parse("n must be positive".into()));
    }
    let w = word_count(family, &Shape::cube(r, k + n))?;
    Ok(ln_big(&w) / (n as f64).powi(r as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::entropy_exact;
    use crate::matrices::families::*;
    use crate::words::collect_words;

    fn s(v: &[usize]) -> Shape {
        Shape::new(v.to_vec())
    }

    #[test]
    fn metric_examples() {
        let g1 = golden_mean();
        let x = Word::path(&g1, &[1, 0, 1, 0, 1]).unwrap();
        let y = Word::path(&g1, &[1, 0, 0, 1, 0]).unwrap();
        assert_eq!(metric(&x, &x).unwrap().value(), Ratio::from_integer(0));
        assert_eq!(metric(&x, &y).unwrap(), Distance::Separated { k: 2 });
        assert_eq!(metric(&x, &y).unwrap().value(), Ratio::new(1, 3));
        let z = Word::path(&g1, &[0, 0, 1, 0, 1]).unwrap();
        assert_eq!(metric(&x, &z).unwrap().value(), Ratio::from_integer(1));
        assert_eq!(metric(&x, &x).unwrap(), Distance::EqualOnCube { side: 4 });
        assert!(metric(&x, &Word::path(&g1, &[1, 0]).unwrap()).is_err());
    }

    #[test]
    fn metric_uses_diagonal_cubes_in_rank_two() {
        let g3 = golden_tensor();
        let ws = collect_words(&g3, &s(&[2, 2]), None).unwrap();
        for x in ws.iter().take(20) {
            for y in ws.iter().take(20) {
                let d = metric(x, y).unwrap();
                let k = (0..=2).find(|&j| x.restrict_prefix(&Shape::cube(2, j)).unwrap() != y.restrict_prefix(&Shape::cube(2, j)).unwrap());
                match k {
                    Some(k) => assert_eq!(d, Distance::Separated { k }),
                    None => assert_eq!(d, Distance::EqualOnCube { side: 2 }),
                }
            }
        }
    }

    #[test]
    fn shifting() {
        let g1 = golden_mean();
        let x = Word::path(&g1, &[1, 0, 1, 0, 0]).unwrap();
        assert_eq!(shift_truncation(&x, &s(&[0])).unwrap(), x);
        assert_eq!(shift_truncation(&x, &s(&[1])).unwrap().as_string(), "0100");
        let twice = shift_truncation(&shift_truncation(&x, &s(&[2])).unwrap(), &s(&[2])).unwrap();
        assert_eq!(twice, shift_truncation(&x, &s(&[4])).unwrap());
    }

    #[test]
    fn separated_count_examples() {
        let g2 = full_two_shift();
        for mode in [CountMode::Formula, CountMode::Bruteforce] {
            assert_eq!(separated_count(&g2, &s(&[1]), 1, 1, mode).unwrap(), BigUint::from(8u32));
            assert_eq!(separated_count(&golden_mean(), &s(&[1]), 1, 2, mode).unwrap(), BigUint::from(8u32));
            assert_eq!(separated_count(&identity_pair(), &s(&[1, 1]), 2, 3, mode).unwrap(), BigUint::from(3u32));
        }
        assert!(matches!(separated_count(&g2, &s(&[2]), 1, 1, CountMode::Formula), Err(Error::ScaleTooFine { .. })));
    }

    #[test]
    fn separation_iff_restrictions_differ() {
        for (fam, p, k, n) in [(golden_mean(), s(&[1]), 1usize, 2usize), (golden_tensor(), s(&[1, 0]), 1, 1)] {
            let window = &Shape::cube(p.rank(), k) + &p.scale(n);
            let bigger = &window + &Shape::cube(p.rank(), 1);
            let ws = collect_words(&fam, &bigger, None).unwrap();
            let eps = epsilon(k);
            for x in ws.iter().step_by(3) {
                for y in ws.iter().step_by(5) {
                    let sep = bowen_distance(x, y, &p, n).unwrap() > eps;
                    let differ = x.restrict_prefix(&window).unwrap() != y.restrict_prefix(&window).unwrap();
                    assert_eq!(sep, differ);
                }
            }
        }
    }

    #[test]
    fn separated_sets_grow_with_resolution() {
        let g1 = golden_mean();
        for n in 1..4 {
            let coarse = separated_count(&g1, &s(&[1]), 1, n, CountMode::Bruteforce).unwrap();
            let fine = separated_count(&g1, &s(&[1]), 2, n, CountMode::Bruteforce).unwrap();
            assert!(fine >= coarse);
        }
    }

    #[test]
    fn full_shift_differences_are_log_two() {
        let est = bowen_entropy_estimate(&full_two_shift(), &s(&[1]), 1, 10).unwrap();
        assert_eq!(est.sequence.len(), 10);
        assert_eq!(est.diffs.len(), 9);
        for b in est.diffs {
            assert!((b - 2f64.ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn golden_mean_estimate_converges() {
        let g1 = golden_mean();
        let est = bowen_entropy_estimate(&g1, &s(&[1]), 1, 40).unwrap();
        let exact = entropy_exact(&g1, &s(&[1])).unwrap();
        assert!((est.estimate - exact).abs() < 1e-6);
        // the raw sequence carries an O(1/n) bias
        assert!((est.sequence[39] - exact).abs() > 1e-4);
    }

    #[test]
    fn action_entropy() {
        let v = action_entropy_estimate(&identity_pair(), 0, 10).unwrap();
        assert!((v - 3f64.ln() / 100.0).abs() < 1e-15);
        let g3 = golden_tensor();
        let v100 = action_entropy_estimate(&g3, 1, 100).unwrap();
        let v10 = action_entropy_estimate(&g3, 1, 10).unwrap();
        assert!(v100 <= 0.01 && v100 < v10);
        assert!(matches!(action_entropy_estimate(&golden_mean(), 1, 10), Err(Error::RankOne)));
    }
}
