//! Topological pressure of locally constant potentials for `T^p`.
//!
//! For `k̄ >= p` and a potential whose window fits in `[0, k̄]`, the
//! cylinder partition function is
//!
//! ```text
//! Z_n = Σ_{u ∈ Λ_{k̄+np}} exp( f(u) + f(T^p u) + ... + f(T^{np} u) )
//! ```
//!
//! where each term is read off `u` directly because `f ∘ T^{lp}` is constant
//! on the cylinder `Z_u`. `Z_n` is computed either by enumerating `Λ_{k̄+np}`
//! or, for large `n`, by a transfer recursion over `Λ_{k̄}`: a word of shape
//! `k̄+np` is the same thing as a chain `c_0, ..., c_n ∈ Λ_{k̄}` whose
//! consecutive members overlap on a box of shape `k̄ - p`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::dynamics::{estimate_from_logs, BowenEstimate};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrices::{log_spectral_radius, matrix_power_product, MatrixFamily, ScaledMatrix};
use crate::shape::Shape;
use crate::words::{collect_words_with, EnumBudget, Word};

/// `f(x) = table[x|_{[0, s̄]}]`, falling back to `default`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    rank: usize,
    window: usize,
    default: f64,
    table: BTreeMap<Vec<u32>, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialEntry {
    pub word: Word,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialFile {
    pub window: usize,
    pub default: f64,
    pub entries: Vec<PotentialEntry>,
}

impl Potential {
    pub fn constant(rank: usize, c: f64) -> Self {
        Potential { rank, window: 0, default: c, table: BTreeMap::new() }
    }

    /// `f(x) = g(x(0))`.
    pub fn vertex(rank: usize, g: &[f64]) -> Self {
        let table = g.iter().enumerate().map(|(a, &v)| (vec![a as u32], v)).collect();
        Potential { rank, window: 0, default: 0.0, table }
    }

    pub fn from_table(family: &MatrixFamily, window: usize, default: f64, entries: Vec<(Word, f64)>) -> Result<Self> {
        let shape = Shape::cube(family.rank(), window);
        let mut table = BTreeMap::new();
        for (w, v) in entries {
            if w.shape() != &shape {
                return Err(Error::ShapeMismatch(format!("potential entry has shape {}, window is {shape}", w.shape())));
            }
            if let Some((point, _)) = w.first_bad_edge(family) {
                return Err(Error::ShapeMismatch(format!("potential entry is not a word (bad edge at {point:?})")));
            }
            table.insert(w.labels().to_vec(), v);
        }
        Ok(Potential { rank: family.rank(), window, default, table })
    }

    pub fn from_file(family: &MatrixFamily, file: &PotentialFile) -> Result<Self> {
        let entries = file.entries.iter().map(|e| (e.word.clone(), e.value)).collect();
        Self::from_table(family, file.window, file.default, entries)
    }

    pub fn from_json(family: &MatrixFamily, s: &str) -> Result<Self> {
        Self::from_file(family, &serde_json::from_str(s)?)
    }

    pub fn to_file(&self) -> PotentialFile {
        let shape = Shape::cube(self.rank, self.window);
        PotentialFile {
            window: self.window,
            default: self.default,
            entries: self
                .table
                .iter()
                .map(|(labels, &value)| PotentialEntry {
                    word: Word::from_parts(shape.clone(), labels.clone()).expect("stored with window shape"),
                    value,
                })
                .collect(),
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// `f + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Potential {
            rank: self.rank,
            window: self.window,
            default: self.default + c,
            table: self.table.iter().map(|(k, v)| (k.clone(), v + c)).collect(),
        }
    }

    /// Value on a word of shape `s̄`.
    pub fn eval_window(&self, labels: &[u32]) -> f64 {
        self.table.get(labels).copied().unwrap_or(self.default)
    }

    /// Value on any point whose truncation `x` covers the window.
    pub fn eval(&self, x: &Word) -> Result<f64> {
        let w = x.restrict_prefix(&Shape::cube(self.rank, self.window))?;
        Ok(self.eval_window(w.labels()))
    }

    /// Largest value the table can take (default included).
    pub fn max_value(&self) -> f64 {
        self.table.values().copied().fold(self.default, f64::max)
    }
}

/// Recovers `k` from `σ(u) = k̄ + np` and checks the preconditions.
fn cylinder_scale(u: &Word, f: &Potential, p: &Shape, n: usize) -> Result<usize> {
    let base =
        u.shape().checked_sub(&p.scale(n)).ok_or_else(|| Error::ShapeMismatch(format!("word shape {} is not k̄ + {n}·{p}", u.shape())))?;
    let k = base.get(0);
    if base != Shape::cube(p.rank(), k) {
        return Err(Error::ShapeMismatch(format!("word shape {} is not k̄ + {n}·{p}", u.shape())));
    }
    if k < f.window {
        return Err(Error::WindowTooWide { window: f.window, k });
    }
    if !p.le(&base) {
        return Err(Error::ScaleTooFine { k, p: p.to_string() });
    }
    Ok(k)
}

/// `Σ_{l=0}^{n} f(T^{lp} x)` for any `x ∈ Z_u`.
pub fn birkhoff_sum_on_cylinder(family: &MatrixFamily, u: &Word, f: &Potential, p: &Shape, n: usize) -> Result<f64> {
    family.require_rank(u.shape())?;
    family.require_rank(p)?;
    cylinder_scale(u, f, p, n)?;
    let win = Shape::cube(p.rank(), f.window);
    let mut total = 0.0;
    for l in 0..=n {
        total += f.eval_window(u.sub_box(&p.scale(l), &win)?.labels());
    }
    Ok(total)
}

/// `log Σ exp(v)`, shifted by the maximum and summed pairwise in a fixed
/// tree so the result is independent of scheduling.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if top == f64::INFINITY {
        return f64::INFINITY;
    }
    let shifted: Vec<f64> = values.iter().map(|v| (v - top).exp()).collect();
    top + pairwise_sum(&shifted).ln()
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumMethod {
    /// Enumerate `Λ_{k̄+np}`.
    Enumerate,
    /// Overlapping-window recursion over `Λ_{k̄}`.
    Transfer,
}

fn check_pressure_args(family: &MatrixFamily, f: &Potential, p: &Shape, k: usize) -> Result<()> {
    family.require_valid()?;
    family.require_rank(p)?;
    if f.rank != family.rank() {
        return Err(Error::RankMismatch { expected: family.rank(), found: f.rank });
    }
    if k < f.window {
        return Err(Error::WindowTooWide { window: f.window, k });
    }
    if !p.le(&Shape::cube(p.rank(), k)) {
        return Err(Error::ScaleTooFine { k, p: p.to_string() });
    }
    Ok(())
}

/// `log Z_n` by enumeration of `Λ_{k̄+np}`.
pub fn partition_function_log(family: &MatrixFamily, f: &Potential, p: &Shape, k: usize, n: usize) -> Result<f64> {
    partition_function_log_with(family, f, p, k, n, EnumBudget::default(), Exec::default())
}

pub fn partition_function_log_with(
    family: &MatrixFamily,
    f: &Potential,
    p: &Shape,
    k: usize,
    n: usize,
    budget: EnumBudget,
    exec: Exec,
) -> Result<f64> {
    check_pressure_args(family, f, p, k)?;
    let shape = &Shape::cube(p.rank(), k) + &p.scale(n);
    let words = collect_words_with(family, &shape, None, budget, exec)?;
    let sums = exec.try_map(words, |u| birkhoff_sum_on_cylinder(family, &u, f, p, n))?;
    Ok(log_sum_exp(&sums))
}

/// `log Z_n` for `n = 0..=n_max` via the overlapping-window recursion.
pub fn partition_function_logs_transfer(
    family: &MatrixFamily,
    f: &Potential,
    p: &Shape,
    k: usize,
    n_max: usize,
    budget: EnumBudget,
    exec: Exec,
) -> Result<Vec<f64>> {
    check_pressure_args(family, f, p, k)?;
    let r = p.rank();
    let cube = Shape::cube(r, k);
    let overlap = cube.checked_sub(p).expect("k̄ >= p checked");
    let states = collect_words_with(family, &cube, None, budget, exec)?;
    let weight: Vec<f64> = states.iter().map(|c| f.eval(c)).collect::<Result<_>>()?;
    // c -> c' allowed iff tail(c, p) == prefix(c', k̄ - p)
    let mut by_prefix: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for (i, c) in states.iter().enumerate() {
        by_prefix.entry(c.restrict_prefix(&overlap)?.labels().to_vec()).or_default().push(i);
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (i, c) in states.iter().enumerate() {
        if let Some(next) = by_prefix.get(c.restrict_tail(p)?.labels()) {
            for &j in next {
                preds[j].push(i);
            }
        }
    }
    let mut v = weight.clone();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(log_sum_exp(&v));
    for _ in 0..n_max {
        let prev = v;
        v = exec.map_range(states.len(), |j| {
            let incoming: Vec<f64> = preds[j].iter().map(|&i| prev[i]).collect();
            weight[j] + log_sum_exp(&incoming)
        });
        out.push(log_sum_exp(&v));
    }
    Ok(out)
}

pub type PressureEstimate = BowenEstimate;

/// Pressure of `f` for `T^p` from the growth of `Z_n`, `n = 1..=n_max`.
///
/// The sequence is `(1/n) log Z_n`, the differences `log Z_{n+1} - log Z_n`,
/// and the estimate the last difference. Both use `n + 1` Birkhoff terms, so
/// a constant `c` shifts the differences by exactly `c` and the raw sequence
/// by `(n+1)c/n`.
pub fn pressure_estimate(family: &MatrixFamily, f: &Potential, p: &Shape, k: usize, n_max: usize) -> Result<PressureEstimate> {
    pressure_estimate_with(family, f, p, k, n_max, SumMethod::Transfer, EnumBudget::default(), Exec::default())
}

#[allow(clippy::too_many_arguments)]
pub fn pressure_estimate_with(
    family: &MatrixFamily,
    f: &Potential,
    p: &Shape,
    k: usize,
    n_max: usize,
    method: SumMethod,
    budget: EnumBudget,
    exec: Exec,
) -> Result<PressureEstimate> {
    check_pressure_args(family, f, p, k)?;
    if n_max < 2 {
        return Err(Error::Parse(format!("n_max must be at least 2, got {n_max}")));
    }
    let logs = match method {
        SumMethod::Transfer => partition_function_logs_transfer(family, f, p, k, n_max, budget, exec)?,
        SumMethod::Enumerate => {
            (0..=n_max).map(|n| partition_function_log_with(family, f, p, k, n, budget, exec)).collect::<Result<_>>()?
        }
    };
    Ok(estimate_from_logs(&logs))
}

/// `log r(diag(e^g) M^p)`: the pressure of `f(x) = g(x(0))` for `T^p`.
pub fn pressure_oracle_vertex(family: &MatrixFamily, g: &[f64], p: &Shape) -> Result<f64> {
    family.require_valid()?;
    family.require_rank(p)?;
    if p.is_zero() {
        return Err(Error::ZeroDirection);
    }
    if g.len() != family.letters() {
        return Err(Error::ShapeMismatch(format!("g has {} values for {} letters", g.len(), family.letters())));
    }
    let mp = ScaledMatrix::from_counts(&matrix_power_product(family, p)?);
    Ok(log_spectral_radius(&mp.scale_rows_ln(g)))
}
