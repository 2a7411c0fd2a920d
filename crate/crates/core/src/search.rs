//! Sweeps over small valid families for the spectral-radius gap
//! `Σ_i log r(M_i^{p_i}) - log r(M_1^{p_1} ⋯ M_r^{p_r})`.
//!
//! The gap is always `>= 0`; whether it can be strictly positive for a valid
//! family is open. The harness records extremes with full reproduction data
//! and makes no claim either way.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrices::{log_spectral_radius, Alphabet, CountMatrix, MatrixFamily, ScaledMatrix, ZeroOneMatrix};
use crate::numfmt::fmt12;
use crate::shape::Shape;

/// Gaps above this (negated) are treated as numerical noise.
pub const GAP_SLACK: f64 = 1e-9;

fn log_radius(m: &CountMatrix) -> f64 {
    log_spectral_radius(&ScaledMatrix::from_counts(m))
}

/// Per-factor log radii, and the log radius of the product, for direction `p`.
pub fn gap_parts(family: &MatrixFamily, p: &Shape) -> Result<(Vec<f64>, f64)> {
    family.require_valid()?;
    family.require_rank(p)?;
    if family.rank() < 2 {
        return Err(Error::RankOne);
    }
    let factors: Vec<f64> = (0..family.rank()).map(|j| log_radius(&CountMatrix::from_zero_one(family.matrix(j)).pow(p.get(j)))).collect();
    let prod = log_radius(&crate::matrices::matrix_power_product(family, p)?);
    Ok((factors, prod))
}

/// `Σ_i log r(M_i^{p_i}) - log r(M^p)`.
pub fn gap(family: &MatrixFamily, p: &Shape) -> Result<f64> {
    let (factors, prod) = gap_parts(family, p)?;
    Ok(factors.iter().sum::<f64>() - prod)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRecord {
    pub fingerprint: String,
    pub size: usize,
    pub matrices: Vec<Vec<Vec<u8>>>,
    /// `r(M_i)` for each direction.
    pub radii: Vec<f64>,
    pub r_prod: f64,
    pub gap: f64,
    pub provenance: String,
    /// Wall time of the evaluation; excluded from CSV output.
    pub runtime_ns: u64,
}

impl GapRecord {
    pub fn family(&self) -> Result<MatrixFamily> {
        MatrixFamily::from_rows(&self.matrices)
    }
}

/// First 16 hex digits of SHA-256 over the family's canonical JSON.
pub fn fingerprint(family: &MatrixFamily) -> String {
    let canonical = MatrixFamily::from_rows(&family.matrices().iter().map(|m| m.rows()).collect::<Vec<_>>())
        .map(|f| f.to_json())
        .unwrap_or_else(|_| family.to_json());
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn record(family: &MatrixFamily, provenance: String) -> Result<GapRecord> {
    let start = Instant::now();
    let (factors, prod) = gap_parts(family, &Shape::cube(family.rank(), 1))?;
    let gap = factors.iter().sum::<f64>() - prod;
    Ok(GapRecord {
        fingerprint: fingerprint(family),
        size: family.letters(),
        matrices: family.matrices().iter().map(|m| m.rows()).collect(),
        radii: factors.iter().map(|l| l.exp()).collect(),
        r_prod: prod.exp(),
        gap,
        provenance,
        runtime_ns: start.elapsed().as_nanos() as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchSummary {
    pub size: usize,
    pub rank: usize,
    pub candidates: u64,
    pub valid: usize,
    pub emitted: usize,
    pub min_gap: Option<f64>,
    pub max_gap: Option<f64>,
    /// Records with `|gap| <= 1e-9`.
    pub zero_gap: usize,
    /// Records with `gap < -1e-9`; always expected to be 0.
    pub negative_gap: usize,
    /// Positive gaps in bins of width 0.1.
    pub histogram: Vec<HistogramBin>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub summary: SearchSummary,
    pub records: Vec<GapRecord>,
}

fn summarize(size: usize, rank: usize, candidates: u64, valid: usize, records: &[GapRecord]) -> SearchSummary {
    let gaps: Vec<f64> = records.iter().map(|r| r.gap).collect();
    let min_gap = gaps.iter().copied().reduce(f64::min);
    let max_gap = gaps.iter().copied().reduce(f64::max);
    let zero_gap = gaps.iter().filter(|g| g.abs() <= GAP_SLACK).count();
    let negative_gap = gaps.iter().filter(|&&g| g < -GAP_SLACK).count();
    let mut histogram = Vec::new();
    if let Some(max) = max_gap.filter(|&m| m > GAP_SLACK) {
        let bins = (max / 0.1).floor() as usize + 1;
        for b in 0..bins {
            let (lo, hi) = (b as f64 * 0.1, (b + 1) as f64 * 0.1);
            let count = gaps.iter().filter(|&&g| g > GAP_SLACK && g >= lo && g < hi).count();
            histogram.push(HistogramBin { lo, hi, count });
        }
    }
    SearchSummary { size, rank, candidates, valid, emitted: records.len(), min_gap, max_gap, zero_gap, negative_gap, histogram }
}

/// Smallest flattened form over all simultaneous letter permutations.
pub fn canonical_form(matrices: &[ZeroOneMatrix]) -> Vec<u8> {
    let n = matrices[0].dim();
    let mut perm: Vec<usize> = (0..n).collect();
    let flat = |perm: &[usize]| -> Vec<u8> {
        matrices.iter().flat_map(|m| (0..n).flat_map(move |a| (0..n).map(move |b| m.get(perm[a], perm[b]) as u8))).collect()
    };
    let mut best = flat(&perm);
    while next_permutation(&mut perm) {
        best = best.min(flat(&perm));
    }
    best
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExhaustiveConfig {
    pub size: usize,
    pub rank: usize,
    pub canonicalize: bool,
    /// Cap on candidate tuples after the no-zero-row pruning.
    pub max_candidates: f64,
}

impl ExhaustiveConfig {
    pub fn new(size: usize) -> Self {
        ExhaustiveConfig { size, rank: 2, canonicalize: false, max_candidates: 5e7 }
    }
}

/// 0-1 matrices of the given size with no zero row, in increasing bit order.
fn matrices_without_zero_rows(size: usize) -> Vec<ZeroOneMatrix> {
    let rows: Vec<u32> = (1..(1u32 << size)).collect();
    let mut out = Vec::new();
    let total = rows.len().pow(size as u32);
    for mut code in 0..total {
        let mut chosen = Vec::with_capacity(size);
        for _ in 0..size {
            chosen.push(rows[code % rows.len()]);
            code /= rows.len();
        }
        chosen.reverse();
        out.push(ZeroOneMatrix::from_fn(size, |a, b| chosen[a] >> (size - 1 - b) & 1 == 1));
    }
    out
}

/// Every tuple of 0-1 matrices over `size` letters that passes validation.
///
/// Tuples with a zero row in some matrix fail the no-sources check, so they
/// are pruned before validation; `summary.candidates` counts the survivors.
/// Records are sorted by fingerprint.
pub fn exhaustive_search(cfg: ExhaustiveConfig, exec: Exec) -> Result<SearchOutcome> {
    if cfg.rank < 2 {
        return Err(Error::RankOne);
    }
    if cfg.size == 0 || cfg.size > 6 {
        return Err(Error::Parse(format!("alphabet size {} is outside 1..=6", cfg.size)));
    }
    let per = ((1u64 << cfg.size) - 1).pow(cfg.size as u32) as f64;
    let candidates = per.powi(cfg.rank as i32);
    if candidates > cfg.max_candidates {
        return Err(Error::BudgetExceeded {
            what: format!("exhaustive rank-{} search over {} letters", cfg.rank, cfg.size),
            required: candidates,
            limit: cfg.max_candidates,
        });
    }
    let singles = matrices_without_zero_rows(cfg.size);
    let k = singles.len();
    // tuples indexed by their first factor; the rest are enumerated inside
    let chunks = exec.try_map_range(k, |first| -> Result<Vec<GapRecord>> {
        let mut out = Vec::new();
        let rest = cfg.rank - 1;
        for mut code in 0..k.pow(rest as u32) {
            let mut ms = vec![singles[first].clone()];
            let mut tail = Vec::with_capacity(rest);
            for _ in 0..rest {
                tail.push(singles[code % k].clone());
                code /= k;
            }
            tail.reverse();
            ms.extend(tail);
            let fam = MatrixFamily::new(Alphabet::numbered(cfg.size), ms)?;
            if fam.is_valid() {
                out.push(record(&fam, "exhaustive".into())?);
            }
        }
        Ok(out)
    })?;
    let mut records: Vec<GapRecord> = chunks.into_iter().flatten().collect();
    let valid = records.len();
    if cfg.canonicalize {
        records = dedupe_canonical(records)?;
    }
    records.sort_by(|a, b| a.fingerprint.cmp(&b.fingerprint).then_with(|| a.matrices.cmp(&b.matrices)));
    let summary = summarize(cfg.size, cfg.rank, candidates as u64, valid, &records);
    Ok(SearchOutcome { summary, records })
}

fn dedupe_canonical(records: Vec<GapRecord>) -> Result<Vec<GapRecord>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for r in records {
        let ms = r.family()?.matrices().to_vec();
        if seen.insert(canonical_form(&ms)) {
            out.push(r);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomConfig {
    pub size: usize,
    pub rank: usize,
    pub density: f64,
    pub trials: usize,
    pub seed: u64,
    /// Number of tensor-product positive controls to inject.
    pub controls: usize,
    pub canonicalize: bool,
}

impl RandomConfig {
    pub fn new(size: usize, density: f64, trials: usize, seed: u64) -> Self {
        RandomConfig { size, rank: 2, density, trials, seed, controls: 0, canonicalize: false }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, size: usize, density: f64) -> ZeroOneMatrix {
    let mut rows: Vec<Vec<u8>> = (0..size).map(|_| (0..size).map(|_| rng.gen_bool(density) as u8).collect()).collect();
    for row in &mut rows {
        if row.iter().all(|&x| x == 0) {
            let c = rng.gen_range(0..size);
            row[c] = 1;
        }
    }
    ZeroOneMatrix::from_rows(&rows).expect("square 0-1")
}

/// Bernoulli(density) entries with zero rows repaired by one random 1.
/// Deterministic for a fixed configuration: all sampling happens up front
/// on one seeded stream, evaluation order does not matter, and records are
/// sorted by fingerprint.
pub fn random_search(cfg: RandomConfig, exec: Exec) -> Result<SearchOutcome> {
    if cfg.rank < 2 {
        return Err(Error::RankOne);
    }
    if cfg.size == 0 || !(cfg.density > 0.0 && cfg.density <= 1.0) {
        return Err(Error::Parse(format!("need size >= 1 and density in (0, 1], got {} and {}", cfg.size, cfg.density)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples: Vec<(Vec<ZeroOneMatrix>, String)> = Vec::with_capacity(cfg.trials + cfg.controls);
    for t in 0..cfg.trials {
        let ms = (0..cfg.rank).map(|_| random_matrix(&mut rng, cfg.size, cfg.density)).collect();
        samples.push((ms, format!("random:seed={}:trial={t}", cfg.seed)));
    }
    if cfg.controls > 0 && cfg.rank == 2 {
        if let Some(a) = (2..cfg.size).find(|&a| cfg.size.is_multiple_of(a) && cfg.size / a >= 2) {
            let b = cfg.size / a;
            for c in 0..cfg.controls {
                let a1 = random_matrix(&mut rng, a, 0.5);
                let a2 = random_matrix(&mut rng, b, 0.5);
                let fam = MatrixFamily::tensor_pair(&a1, &a2)?;
                samples.push((fam.matrices().to_vec(), format!("control:tensor:{a}x{b}:{c}")));
            }
        }
    }
    let attempted = samples.len();
    let recs = exec.try_map(samples, |(ms, prov)| -> Result<Option<GapRecord>> {
        let fam = MatrixFamily::new(Alphabet::numbered(cfg.size), ms)?;
        if fam.is_valid() {
            record(&fam, prov).map(Some)
        } else {
            Ok(None)
        }
    })?;
    let mut records: Vec<GapRecord> = recs.into_iter().flatten().collect();
    let valid = records.len();
    if cfg.canonicalize {
        records = dedupe_canonical(records)?;
    }
    records.sort_by(|a, b| a.fingerprint.cmp(&b.fingerprint).then_with(|| a.provenance.cmp(&b.provenance)));
    let summary = summarize(cfg.size, cfg.rank, attempted as u64, valid, &records);
    Ok(SearchOutcome { summary, records })
}

fn flatten(ms: &[Vec<Vec<u8>>]) -> String {
    ms.iter()
        .map(|m| m.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<String>()).collect::<Vec<_>>().join(";"))
        .collect::<Vec<_>>()
        .join("|")
}

/// CSV with columns `fingerprint, size, matrices, r1, ..., rR, r_prod, gap`.
/// Matrices are flattened as rows joined by `;`, matrices joined by `|`.
/// Floats are printed at 12 significant digits.
pub fn records_to_csv(records: &[GapRecord]) -> Result<String> {
    let rank = records.first().map(|r| r.radii.len()).unwrap_or(2);
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["fingerprint".to_string(), "size".into(), "matrices".into()];
    header.extend((1..=rank).map(|i| format!("r{i}")));
    header.extend(["r_prod".to_string(), "gap".into()]);
    wtr.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row = vec![r.fingerprint.clone(), r.size.to_string(), flatten(&r.matrices)];
        row.extend(r.radii.iter().map(|&x| fmt12(x)));
        row.push(fmt12(r.r_prod));
        row.push(fmt12(r.gap));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::families::*;

    #[test]
    fn tensor_and_identity_gaps_vanish() {
        assert!(gap(&golden_tensor(), &Shape::cube(2, 1)).unwrap().abs() < 1e-9);
        assert!(gap(&identity_pair(), &Shape::cube(2, 1)).unwrap().abs() < 1e-12);
        assert!(gap(&golden_tensor(), &Shape::new(vec![3, 2])).unwrap().abs() < 1e-9);
        assert!(matches!(gap(&golden_mean(), &Shape::new(vec![1])), Err(Error::RankOne)));
    }

    #[test]
    fn one_letter_search() {
        let out = exhaustive_search(ExhaustiveConfig::new(1), Exec::default()).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].matrices, vec![vec![vec![1]], vec![vec![1]]]);
        assert!(out.records[0].gap.abs() < 1e-12);
    }

    #[test]
    fn two_letter_search_respects_inequality() {
        let out = exhaustive_search(ExhaustiveConfig::new(2), Exec::default()).unwrap();
        assert_eq!(out.summary.candidates, 81);
        assert!(out.summary.valid > 0);
        assert_eq!(out.summary.negative_gap, 0);
        assert!(out.records.iter().all(|r| r.gap >= -GAP_SLACK));
        // the violating pair from the validation tests is never emitted
        let bad = vec![vec![vec![1, 1], vec![0, 1]], vec![vec![1, 0], vec![1, 1]]];
        assert!(out.records.iter().all(|r| r.matrices != bad));
        for r in &out.records {
            assert!(r.family().unwrap().is_valid());
        }
    }

    #[test]
    fn canonicalization_only_removes_relabelings() {
        let all = exhaustive_search(ExhaustiveConfig::new(2), Exec::default()).unwrap();
        let mut cfg = ExhaustiveConfig::new(2);
        cfg.canonicalize = true;
        let canon = exhaustive_search(cfg, Exec::default()).unwrap();
        assert!(canon.records.len() < all.records.len());
        assert!(canon.records.len() * 2 >= all.records.len());
    }

    #[test]
    fn random_search_is_deterministic() {
        let cfg = RandomConfig { controls: 3, ..RandomConfig::new(4, 0.3, 200, 7) };
        let a = random_search(cfg, Exec::Parallel).unwrap();
        let b = random_search(cfg, Exec::Sequential).unwrap();
        assert_eq!(records_to_csv(&a.records).unwrap(), records_to_csv(&b.records).unwrap());
        let controls: Vec<_> = a.records.iter().filter(|r| r.provenance.starts_with("control")).collect();
        assert_eq!(controls.len(), 3);
        for c in controls {
            assert!(c.gap.abs() < 1e-9);
        }
    }

    #[test]
    fn full_density_is_rejected() {
        let out = random_search(RandomConfig::new(3, 1.0, 5, 1), Exec::default()).unwrap();
        assert_eq!(out.summary.valid, 0);
    }

    #[test]
    fn csv_layout() {
        let out = exhaustive_search(ExhaustiveConfig::new(1), Exec::default()).unwrap();
        let csv = records_to_csv(&out.records).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("fingerprint,size,matrices,r1,r2,r_prod,gap"));
        assert!(lines.next().unwrap().ends_with(",1,1|1,1,1,1,0"));
    }

    #[test]
    fn permutations() {
        let mut v = vec![0, 1, 2];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 6);
    }
}
