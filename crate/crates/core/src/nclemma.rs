//! Index-level check of the matrix-unit decomposition of the shifted graph algebra.
//!
//! With `ρ_m(X) = Σ_{a,b ∈ Λ_m} e_{a,b} ⊗ s_a^* X s_b` and `Φ^p(X) = Σ_{ν ∈ Λ_p} s_ν X s_ν^*`,
//! the image `ρ_m(Φ^p(s_u s_w^*))` splits as `Σ_{κ,λ} T_{κ,λ} ⊗ s_κ s_λ^*` with
//!
//! ```text
//! T_{κ,λ} = Σ e_{νuγ, (νwγκ)|_{m]}}   over ν ∈ Λ_p, γ ∈ Λ_{m-p-σ(u)} with (νwγκ)|_{[m} = λ
//! ```
//!
//! for `κ ∈ Λ_{n-σ(w)}`, `λ ∈ Λ_{n-σ(u)}`, `n = sup(σ(u), σ(w))`, `m >= p + n`.
//! Composites with mismatched endpoints vanish. Each `T_{κ,λ}` is a 0-1
//! pattern; it is a partial isometry iff every row and column holds at most
//! one entry.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrices::{word_count, MatrixFamily};
use crate::pressure::Potential;
use crate::shape::Shape;
use crate::words::{collect_words_with, compose, compose_all, EnumBudget, Word};

/// Sparse 0-1 matrix indexed by `Λ_m` (positions in enumeration order).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PatternMatrix {
    pub dim: usize,
    /// `(row, col)` positions, sorted.
    pub cells: Vec<(usize, usize)>,
}

impl PatternMatrix {
    pub fn new(dim: usize, mut cells: Vec<(usize, usize)>) -> Self {
        cells.sort_unstable();
        cells.dedup();
        PatternMatrix { dim, cells }
    }
}

/// True iff no row and no column holds two entries.
pub fn check_partial_isometry(pat: &PatternMatrix) -> bool {
    isometry_conflict(pat).is_none()
}

/// First `("row" | "col", index)` holding two entries.
fn isometry_conflict(pat: &PatternMatrix) -> Option<(&'static str, usize)> {
    let mut rows = vec![false; pat.dim];
    let mut cols = vec![false; pat.dim];
    for &(r, c) in &pat.cells {
        if std::mem::replace(&mut rows[r], true) {
            return Some(("row", r));
        }
        if std::mem::replace(&mut cols[c], true) {
            return Some(("col", c));
        }
    }
    None
}

/// One cell of a `T_{κ,λ}` with the words that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellSource {
    pub row: usize,
    pub col: usize,
    pub nu: Word,
    pub gamma: Word,
}

/// All `T_{κ,λ}` for one generator `s_u s_w^*`.
#[derive(Clone, Debug, Serialize)]
pub struct TFamily {
    pub u: Word,
    pub w: Word,
    pub p: Shape,
    pub m: Shape,
    pub n: Shape,
    /// `Λ_m` in enumeration order.
    #[serde(skip)]
    pub index: Vec<Word>,
    /// `|Λ_{n-σ(w)}|` and `|Λ_{n-σ(u)}|`; patterns absent from `patterns` are empty.
    pub kappa_count: usize,
    pub lambda_count: usize,
    #[serde(skip)]
    pub patterns: BTreeMap<(Word, Word), PatternMatrix>,
    #[serde(skip)]
    pub sources: BTreeMap<(Word, Word), Vec<CellSource>>,
}

/// Builds every nonempty `T_{κ,λ}` for `s_u s_w^*` under `Φ^p`, compressed by `ρ_m`.
pub fn build_t(family: &MatrixFamily, u: &Word, w: &Word, p: &Shape, m: &Shape) -> Result<TFamily> {
    let index = collect_words_with(family, m, None, EnumBudget::default(), Exec::default())?;
    build_t_indexed(family, u, w, p, m, index, Exec::default())
}

fn build_t_indexed(family: &MatrixFamily, u: &Word, w: &Word, p: &Shape, m: &Shape, index: Vec<Word>, exec: Exec) -> Result<TFamily> {
    family.require_valid()?;
    for s in [u.shape(), w.shape(), p, m] {
        family.require_rank(s)?;
    }
    let n = u.shape().sup(w.shape());
    let need = p + &n;
    if !need.le(m) {
        return Err(Error::ShapeTooSmall { m: m.to_string(), required: need.to_string() });
    }
    let budget = EnumBudget::default();
    let kappa_shape = n.checked_sub(w.shape()).expect("n >= σ(w)");
    let lambda_shape = n.checked_sub(u.shape()).expect("n >= σ(u)");
    let gamma_shape = m.checked_sub(&(p + u.shape())).expect("m >= p + σ(u)");
    let kappa_count = count_usize(family, &kappa_shape)?;
    let lambda_count = count_usize(family, &lambda_shape)?;
    let pos: HashMap<&[u32], usize> = index.iter().enumerate().map(|(i, a)| (a.labels(), i)).collect();

    let mut patterns: BTreeMap<(Word, Word), Vec<(usize, usize)>> = BTreeMap::new();
    let mut sources: BTreeMap<(Word, Word), Vec<CellSource>> = BTreeMap::new();
    if u.origin() == w.origin() && u.terminal() == w.terminal() {
        let nus =
            collect_words_with(family, p, None, budget, exec)?.into_iter().filter(|nu| nu.terminal() == u.origin()).collect::<Vec<_>>();
        let gammas = collect_words_with(family, &gamma_shape, Some(u.terminal()), budget, exec)?;
        let kappas = collect_words_with(family, &kappa_shape, None, budget, exec)?;
        let pairs: Vec<(&Word, &Word)> = nus.iter().flat_map(|nu| gammas.iter().map(move |g| (nu, g))).collect();
        let cells = exec.try_map(pairs, |(nu, gamma)| -> Result<Vec<(Word, Word, CellSource)>> {
            let row = compose_all(family, &[nu, u, gamma])?;
            let row = pos[row.labels()];
            let nwg = compose_all(family, &[nu, w, gamma])?;
            let mut out = Vec::new();
            for kappa in kappas.iter().filter(|k| k.origin() == gamma.terminal()) {
                let full = compose(family, &nwg, kappa)?;
                let col = pos[full.restrict_prefix(m)?.labels()];
                let lambda = full.restrict_tail(m)?;
                out.push((kappa.clone(), lambda, CellSource { row, col, nu: nu.clone(), gamma: gamma.clone() }));
            }
            Ok(out)
        })?;
        for (kappa, lambda, src) in cells.into_iter().flatten() {
            patterns.entry((kappa.clone(), lambda.clone())).or_default().push((src.row, src.col));
            sources.entry((kappa, lambda)).or_default().push(src);
        }
    }
    let dim = index.len();
    Ok(TFamily {
        u: u.clone(),
        w: w.clone(),
        p: p.clone(),
        m: m.clone(),
        n,
        index,
        kappa_count,
        lambda_count,
        patterns: patterns.into_iter().map(|(k, cells)| (k, PatternMatrix::new(dim, cells))).collect(),
        sources,
    })
}

fn count_usize(family: &MatrixFamily, s: &Shape) -> Result<usize> {
    use num_traits::ToPrimitive;
    word_count(family, s)?.to_usize().ok_or_else(|| Error::BudgetExceeded {
        what: format!("words of shape {s}"),
        required: f64::INFINITY,
        limit: usize::MAX as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaFailure {
    pub kappa: Word,
    pub lambda: Word,
    /// `"row"` or `"col"`.
    pub axis: String,
    pub position: usize,
    /// The clashing cells with their `ν`, `γ`.
    pub cells: Vec<CellSource>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TFamilyReport {
    pub u: Word,
    pub w: Word,
    pub p: Shape,
    pub m: Shape,
    pub n: Shape,
    pub dim: usize,
    pub grid: (usize, usize),
    pub nonempty_patterns: usize,
    pub cells: usize,
    pub all_partial_isometries: bool,
    pub failures: Vec<LemmaFailure>,
}

impl TFamily {
    pub fn report(&self) -> TFamilyReport {
        let mut failures = Vec::new();
        for (key, pat) in &self.patterns {
            if let Some((axis, position)) = isometry_conflict(pat) {
                let cells = self.sources[key]
                    .iter()
                    .filter(|c| if axis == "row" { c.row == position } else { c.col == position })
                    .cloned()
                    .collect();
                failures.push(LemmaFailure { kappa: key.0.clone(), lambda: key.1.clone(), axis: axis.into(), position, cells });
            }
        }
        TFamilyReport {
            u: self.u.clone(),
            w: self.w.clone(),
            p: self.p.clone(),
            m: self.m.clone(),
            n: self.n.clone(),
            dim: self.index.len(),
            grid: (self.kappa_count, self.lambda_count),
            nonempty_patterns: self.patterns.len(),
            cells: self.patterns.values().map(|p| p.cells.len()).sum(),
            all_partial_isometries: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub p: Shape,
    pub max_gen_shape: Shape,
    pub generators: usize,
    pub patterns_checked: usize,
    pub failures: usize,
    pub all_pass: bool,
    pub reports: Vec<TFamilyReport>,
}

/// Runs [`build_t`] and the partial-isometry check for every pair `(u, w)`
/// with `σ(u), σ(w) <= max_gen_shape`. `m` defaults to `p + sup(σ(u), σ(w))`;
/// `m_override` is used instead when given (it must dominate that minimum).
pub fn verify_lemma(
    family: &MatrixFamily,
    p: &Shape,
    max_gen_shape: &Shape,
    m_override: Option<&Shape>,
    exec: Exec,
) -> Result<LemmaReport> {
    family.require_valid()?;
    family.require_rank(p)?;
    family.require_rank(max_gen_shape)?;
    let budget = EnumBudget::default();
    let mut gens = Vec::new();
    for s in max_gen_shape.dominated() {
        gens.extend(collect_words_with(family, &s, None, budget, exec)?);
    }
    let pairs: Vec<(usize, usize)> = (0..gens.len()).flat_map(|i| (0..gens.len()).map(move |j| (i, j))).collect();
    let work = pairs.len() as f64;
    if work > budget.max_ln_words.exp() {
        return Err(Error::BudgetExceeded { what: "generator pairs".into(), required: work, limit: budget.max_ln_words.exp() });
    }
    let mut indices: HashMap<Shape, Vec<Word>> = HashMap::new();
    for &(i, j) in &pairs {
        let m = match m_override {
            Some(m) => m.clone(),
            None => p + &gens[i].shape().sup(gens[j].shape()),
        };
        if !indices.contains_key(&m) {
            indices.insert(m.clone(), collect_words_with(family, &m, None, budget, exec)?);
        }
    }
    // Each pair builds sequentially inside; parallelism is across pairs.
    let reports = exec.try_map(pairs, |(i, j)| -> Result<TFamilyReport> {
        let (u, w) = (&gens[i], &gens[j]);
        let m = match m_override {
            Some(m) => m.clone(),
            None => p + &u.shape().sup(w.shape()),
        };
        let t = build_t_indexed(family, u, w, p, &m, indices[&m].clone(), Exec::Sequential)?;
        Ok(t.report())
    })?;
    let patterns_checked = reports.iter().map(|r| r.nonempty_patterns).sum();
    let failures = reports.iter().map(|r| r.failures.len()).sum();
    Ok(LemmaReport {
        p: p.clone(),
        max_gen_shape: max_gen_shape.clone(),
        generators: gens.len(),
        patterns_checked,
        failures,
        all_pass: failures == 0,
        reports,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    pub m: Shape,
    pub probe: Shape,
    /// Extensions of distinct `u ≠ w` never coincide and together exhaust `Λ_probe`.
    pub cylinders_disjoint: bool,
    /// Every extension value is at most the cylinder maximum, which is attained.
    pub bounds_hold: bool,
    pub words_checked: usize,
    pub ok: bool,
}

/// Orthogonality of distinct cylinders of equal shape and the cylinder-max
/// bound for `f`, checked on extensions to `probe = sup(m, s̄) + 1̄`.
///
/// Extensions of each `u` are generated by composition (`u` followed by every
/// word of shape `probe - m` from `t(u)`), independently of the enumeration
/// of `Λ_probe` they are compared against.
pub fn check_orthogonality(family: &MatrixFamily, m: &Shape, f: &Potential, exec: Exec) -> Result<OrthogonalityReport> {
    family.require_valid()?;
    family.require_rank(m)?;
    let r = m.rank();
    let budget = EnumBudget::default();
    let reach = m.sup(&Shape::cube(r, f.window()));
    let probe = &reach + &Shape::cube(r, 1);
    let all_probe = collect_words_with(family, &probe, None, budget, exec)?;
    let us = collect_words_with(family, m, None, budget, exec)?;
    let tails_to_reach = reach.checked_sub(m).expect("reach >= m");
    let tails_to_probe = probe.checked_sub(m).expect("probe >= m");
    let per_u = exec.try_map(us.clone(), |u| -> Result<(Vec<Word>, bool)> {
        let ext = |s: &Shape| -> Result<Vec<Word>> {
            collect_words_with(family, s, Some(u.terminal()), budget, Exec::Sequential)?.iter().map(|v| compose(family, &u, v)).collect()
        };
        let cyl_max =
            ext(&tails_to_reach)?.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::NEG_INFINITY, f64::max);
        let probes = ext(&tails_to_probe)?;
        let vals = probes.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()?;
        let bound = vals.iter().all(|&v| v <= cyl_max) && vals.contains(&cyl_max);
        Ok((probes, bound))
    })?;
    let mut seen: HashMap<&[u32], usize> = HashMap::new();
    let mut disjoint = true;
    for (i, (probes, _)) in per_u.iter().enumerate() {
        for x in probes {
            if seen.insert(x.labels(), i).is_some() {
                disjoint = false;
            }
        }
    }
    let exhaust = seen.len() == all_probe.len() && all_probe.iter().all(|x| seen.contains_key(x.labels()));
    let bounds_hold = per_u.iter().all(|(_, b)| *b);
    let cylinders_disjoint = disjoint && exhaust;
    Ok(OrthogonalityReport {
        m: m.clone(),
        probe,
        cylinders_disjoint,
        bounds_hold,
        words_checked: all_probe.len(),
        ok: cylinders_disjoint && bounds_hold,
    })
}
