use serde::Serialize;

use super::enumerate::{enumerate_words, EnumBudget};
use crate::error::Result;
use crate::exec::Exec;
use crate::matrices::{word_count, MatrixFamily};
use crate::shape::Shape;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRow {
    pub shape: Shape,
    /// Decimal string; counts can exceed 64 bits.
    pub enumerated: String,
    pub formula: String,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountOracleReport {
    pub max_shape: Shape,
    pub rows: Vec<CountRow>,
    pub all_equal: bool,
}

/// Compares brute-force enumeration with `⟨e, M^l e⟩` for every `l <= max_shape`.
pub fn count_oracle_check(family: &MatrixFamily, max_shape: &Shape, budget: EnumBudget, exec: Exec) -> Result<CountOracleReport> {
    family.require_valid()?;
    family.require_rank(max_shape)?;
    budget.check(family, max_shape)?;
    let shapes: Vec<Shape> = max_shape.dominated().collect();
    let rows = exec.try_map(shapes, |l| -> Result<CountRow> {
        let formula = word_count(family, &l)?;
        let enumerated = enumerate_words(family, &l, None)?.count() as u64;
        Ok(CountRow { equal: formula == enumerated.into(), enumerated: enumerated.to_string(), formula: formula.to_string(), shape: l })
    })?;
    let all_equal = rows.iter().all(|r| r.equal);
    Ok(CountOracleReport { max_shape: max_shape.clone(), rows, all_equal })
}
