use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{FamilyFile, ZeroOneMatrix};

/// One failed check: a machine-readable code plus the data that exhibits it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub witness: Value,
}

impl Violation {
    fn new(code: &str, witness: Value) -> Self {
        Violation { code: code.to_string(), witness }
    }

    /// Structural problems prevent building a family at all.
    pub fn is_structural(&self) -> bool {
        matches!(self.code.as_str(), "ShapeMismatch" | "NonBinaryEntry" | "RankMismatch" | "AlphabetInvalid")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub status: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        let status = if violations.is_empty() { "valid" } else { "invalid" };
        ValidationReport { status: status.to_string(), violations }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<&str> {
        self.violations.iter().map(|v| v.code.as_str()).collect()
    }

    pub fn summary(&self) -> String {
        match self.violations.first() {
            None => "valid".into(),
            Some(v) => format!("{} violation(s), first {} {}", self.violations.len(), v.code, v.witness),
        }
    }
}

/// Full validation of a family file.
///
/// Structural checks (rank, alphabet, square shapes, binary entries) come
/// first; if any fail the algebraic checks are skipped. Then, in order:
/// nonzero matrices, no sources, unique square filling for every pair of
/// directions, and for rank >= 3 consistency of cube filling.
pub fn validate_family(file: &FamilyFile) -> ValidationReport {
    let mut v = Vec::new();
    let dim = file.alphabet.len();
    if file.rank != file.matrices.len() || file.rank == 0 {
        v.push(Violation::new("RankMismatch", json!({"rank": file.rank, "matrices": file.matrices.len()})));
    }
    if dim == 0 {
        v.push(Violation::new("AlphabetInvalid", json!({"reason": "empty alphabet"})));
    }
    for (i, a) in file.alphabet.iter().enumerate() {
        if file.alphabet[..i].contains(a) {
            v.push(Violation::new("AlphabetInvalid", json!({"duplicate": a})));
        }
    }
    for (i, m) in file.matrices.iter().enumerate() {
        let square = m.len() == dim && m.iter().all(|row| row.len() == dim);
        if !square {
            let cols: Vec<usize> = m.iter().map(|r| r.len()).collect();
            v.push(Violation::new("ShapeMismatch", json!({"matrix": i + 1, "rows": m.len(), "cols": cols, "alphabet": dim})));
            continue;
        }
        for (r, row) in m.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                if x != 0 && x != 1 {
                    v.push(Violation::new("NonBinaryEntry", json!({"matrix": i + 1, "row": r, "col": c, "value": x})));
                }
            }
        }
    }
    if !v.is_empty() {
        return ValidationReport::from_violations(v);
    }
    let ms: Vec<ZeroOneMatrix> = file
        .matrices
        .iter()
        .map(|m| {
            let rows: Vec<Vec<u8>> = m.iter().map(|r| r.iter().map(|&x| x as u8).collect()).collect();
            ZeroOneMatrix::from_rows(&rows).expect("checked square and binary")
        })
        .collect();
    validate_matrices(&ms)
}

pub(crate) fn validate_matrices(ms: &[ZeroOneMatrix]) -> ValidationReport {
    let mut v = Vec::new();
    let r = ms.len();
    for (i, m) in ms.iter().enumerate() {
        if m.is_zero() {
            v.push(Violation::new("ZeroMatrix", json!({"matrix": i + 1})));
        }
    }
    for (i, m) in ms.iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        for a in 0..m.dim() {
            if m.successors(a).next().is_none() {
                v.push(Violation::new("NoSources", json!({"matrix": i + 1, "row": a})));
            }
        }
    }
    let mut squares_ok = true;
    for i in 0..r {
        for j in i + 1..r {
            let ij = ms[i].product_counts(&ms[j]);
            let ji = ms[j].product_counts(&ms[i]);
            let n = ms[i].dim();
            for a in 0..n {
                for b in 0..n {
                    let (x, y) = (ij[a * n + b], ji[a * n + b]);
                    if x > 1 || y > 1 || x != y {
                        squares_ok = false;
                        v.push(Violation::new(
                            "UniqueFactorizationViolation",
                            json!({"i": i + 1, "j": j + 1, "a": a, "b": b, "count": x, "count_reversed": y}),
                        ));
                    }
                }
            }
        }
    }
    if r >= 3 && squares_ok {
        check_cubes(ms, &mut v);
    }
    ValidationReport::from_violations(v)
}

/// Letter `d` with `M_j(a, d) = M_i(d, b) = 1`, or the number of candidates.
fn middle(ms: &[ZeroOneMatrix], j: usize, i: usize, a: usize, b: usize) -> Result<usize, usize> {
    let cands: Vec<usize> = ms[j].successors(a).filter(|&d| ms[i].get(d, b)).collect();
    if cands.len() == 1 {
        Ok(cands[0])
    } else {
        Err(cands.len())
    }
}

fn check_cubes(ms: &[ZeroOneMatrix], v: &mut Vec<Violation>) {
    let r = ms.len();
    let n = ms[0].dim();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                if i == j || j == k || i == k {
                    continue;
                }
                for a in 0..n {
                    for b in ms[i].successors(a) {
                        for c in ms[j].successors(b) {
                            for d in ms[k].successors(c) {
                                if let Some(w) = cube_witness(ms, (i, j, k), [a, b, c, d]) {
                                    v.push(Violation::new("CubeInconsistency", w));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Fills the unit cube spanned by directions `(i, j, k)` from the chain
/// `a ->_i b ->_j c ->_k d` in two orders. Returns a witness on disagreement.
fn cube_witness(ms: &[ZeroOneMatrix], (i, j, k): (usize, usize, usize), [a, b, c, d]: [usize; 4]) -> Option<serde_json::Value> {
    let fail = |stage: &str, corners: Value| {
        Some(json!({
            "i": i + 1, "j": j + 1, "k": k + 1,
            "chain": [a, b, c, d], "stage": stage, "corners": corners,
        }))
    };
    let xj = match middle(ms, j, i, a, c) {
        Ok(x) => x,
        Err(n) => return fail("corner j", json!({"candidates": n})),
    };
    let xik = match middle(ms, k, j, b, d) {
        Ok(x) => x,
        Err(n) => return fail("corner ik", json!({"candidates": n})),
    };
    let xk = match middle(ms, k, i, a, xik) {
        Ok(x) => x,
        Err(n) => return fail("corner k", json!({"candidates": n})),
    };
    let via_j = middle(ms, k, i, xj, d);
    let via_k = middle(ms, j, i, xk, d);
    let corners = json!({
        "o": a, "i": b, "ij": c, "ijk": d, "j": xj, "k": xk, "ik": xik,
        "jk_via_j": via_j.ok(), "jk_via_k": via_k.ok(),
    });
    match (via_j, via_k) {
        (Ok(p), Ok(q)) if p == q => {
            let face_ok = ms[j].get(a, xj) && ms[k].get(xj, p) && ms[k].get(a, xk) && ms[j].get(xk, p);
            if face_ok {
                None
            } else {
                fail("face jk", corners)
            }
        }
        _ => fail("corner jk", corners),
    }
}
