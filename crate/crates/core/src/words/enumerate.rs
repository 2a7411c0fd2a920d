use super::Word;
use crate::bignum::ln_big;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrices::{word_count, MatrixFamily};
use crate::shape::Shape;

/// Cap on brute-force enumeration, as a natural log of the number of words.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnumBudget {
    pub max_ln_words: f64,
}

impl Default for EnumBudget {
    fn default() -> Self {
        // 5 * 10^7 words
        EnumBudget { max_ln_words: (5e7f64).ln() }
    }
}

impl EnumBudget {
    pub fn unlimited() -> Self {
        EnumBudget { max_ln_words: f64::INFINITY }
    }

    pub fn check(&self, family: &MatrixFamily, m: &Shape) -> Result<()> {
        let need = ln_big(&word_count(family, m)?);
        if need > self.max_ln_words {
            return Err(Error::BudgetExceeded {
                what: format!("enumerating words of shape {m}"),
                required: need.exp(),
                limit: self.max_ln_words.exp(),
            });
        }
        Ok(())
    }
}

/// Depth-first enumeration of `Λ_m` in lexicographic order of the row-major
/// label sequence.
///
/// Points are assigned in row-major order, so when a point is reached all of
/// its predecessors `l - e_j` already carry letters and the candidate set is
/// the intersection of their successor lists.
pub struct WordIter<'a> {
    family: &'a MatrixFamily,
    shape: Shape,
    // preds[i] = (direction, index of point i - e_j)
    preds: Vec<Vec<(usize, usize)>>,
    labels: Vec<u32>,
    // candidate letters per position and the cursor into them
    cands: Vec<Vec<u32>>,
    cursor: Vec<usize>,
    depth: usize,
    done: bool,
}

impl<'a> WordIter<'a> {
    fn new(family: &'a MatrixFamily, shape: Shape, origin: Option<usize>) -> Self {
        let vol = shape.volume();
        let preds = shape
            .box_points()
            .map(|p| {
                (0..shape.rank())
                    .filter(|&j| p[j] > 0)
                    .map(|j| {
                        let mut q = p.clone();
                        q[j] -= 1;
                        (j, shape.index_of(&q))
                    })
                    .collect()
            })
            .collect();
        let first: Vec<u32> = match origin {
            Some(a) => vec![a as u32],
            None => (0..family.letters() as u32).collect(),
        };
        let mut cands = vec![Vec::new(); vol];
        cands[0] = first;
        WordIter { family, shape, preds, labels: vec![0; vol], cands, cursor: vec![0; vol], depth: 0, done: false }
    }

    fn fill_candidates(&mut self, i: usize) {
        let preds = &self.preds[i];
        let (j0, p0) = preds[0];
        let base = self.family.successors(j0, self.labels[p0] as usize);
        let out: Vec<u32> = base
            .iter()
            .copied()
            .filter(|&b| preds[1..].iter().all(|&(j, p)| self.family.allowed(j, self.labels[p] as usize, b as usize)))
            .collect();
        self.cands[i] = out;
        self.cursor[i] = 0;
    }

    // Advances to the next complete assignment. Depth-first with explicit stack.
    fn advance(&mut self) -> bool {
        let vol = self.labels.len();
        loop {
            let i = self.depth;
            if self.cursor[i] < self.cands[i].len() {
                self.labels[i] = self.cands[i][self.cursor[i]];
                self.cursor[i] += 1;
                if i + 1 == vol {
                    return true;
                }
                self.depth += 1;
                self.fill_candidates(self.depth);
            } else {
                if i == 0 {
                    return false;
                }
                self.depth -= 1;
            }
        }
    }
}

impl Iterator for WordIter<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if self.advance() {
            Some(Word { shape: self.shape.clone(), labels: self.labels.clone() })
        } else {
            self.done = true;
            None
        }
    }
}

/// Stream of all words of shape `m`, optionally only those with origin `origin`.
pub fn enumerate_words<'a>(family: &'a MatrixFamily, m: &Shape, origin: Option<usize>) -> Result<WordIter<'a>> {
    family.require_valid()?;
    family.require_rank(m)?;
    if let Some(a) = origin {
        if a >= family.letters() {
            return Err(Error::UnknownLetter(a));
        }
    }
    Ok(WordIter::new(family, m.clone(), origin))
}

/// All words of shape `m`, in enumeration order, within the default budget.
pub fn collect_words(family: &MatrixFamily, m: &Shape, origin: Option<usize>) -> Result<Vec<Word>> {
    collect_words_with(family, m, origin, EnumBudget::default(), Exec::default())
}

/// Enumerates partitioned by origin letter; partitions are concatenated in
/// letter order, so the result equals the sequential stream.
pub fn collect_words_with(family: &MatrixFamily, m: &Shape, origin: Option<usize>, budget: EnumBudget, exec: Exec) -> Result<Vec<Word>> {
    family.require_valid()?;
    family.require_rank(m)?;
    budget.check(family, m)?;
    let letters: Vec<usize> = match origin {
        Some(a) => vec![a],
        None => (0..family.letters()).collect(),
    };
    let parts = exec.try_map(letters, |a| enumerate_words(family, m, Some(a)).map(|it| it.collect::<Vec<_>>()))?;
    Ok(parts.into_iter().flatten().collect())
}
