use super::Word;
use crate::error::{Error, Result};
use crate::matrices::MatrixFamily;

/// The unique word `w` of shape `σ(u) + σ(v)` with `w|_{σ(u)]} = u` and
/// `w|_{[σ(u)} = v`.
///
/// `u` and `v` are placed on the box and every other point is filled by
/// square completion: if `a = d - e_j`, `c = d - e_j + e_i` and `b = d + e_i`
/// are known, `d` is the unique letter with `M_j(a, d) = M_i(d, b) = 1`.
/// Passes repeat until the box is full. A missing or ambiguous completion
/// means the family only claimed to be valid and is reported as an error.
pub fn compose(family: &MatrixFamily, u: &Word, v: &Word) -> Result<Word> {
    family.require_valid()?;
    family.require_rank(u.shape())?;
    family.require_rank(v.shape())?;
    if u.terminal() != v.origin() {
        return Err(Error::OriginMismatch { terminal: u.terminal(), origin: v.origin() });
    }
    let r = u.rank();
    let shape = u.shape() + v.shape();
    let vol = shape.volume();
    let mut labels: Vec<Option<u32>> = vec![None; vol];
    for (p, &l) in u.shape().box_points().zip(u.labels()) {
        labels[shape.index_of(&p)] = Some(l);
    }
    for (p, &l) in v.shape().box_points().zip(v.labels()) {
        let q: Vec<usize> = p.iter().zip(u.shape().coords()).map(|(a, b)| a + b).collect();
        labels[shape.index_of(&q)] = Some(l);
    }
    let mut missing: Vec<usize> = (0..vol).filter(|&i| labels[i].is_none()).collect();
    while !missing.is_empty() {
        let before = missing.len();
        let mut still = Vec::new();
        for &idx in &missing {
            let d = shape.point_of(idx);
            let mut found: Option<u32> = None;
            'dirs: for j in 0..r {
                if d[j] == 0 {
                    continue;
                }
                for i in 0..r {
                    if i == j || d[i] == shape.get(i) {
                        continue;
                    }
                    let mut a = d.clone();
                    a[j] -= 1;
                    let mut b = d.clone();
                    b[i] += 1;
                    let mut c = a.clone();
                    c[i] += 1;
                    let (la, lb, lc) = (labels[shape.index_of(&a)], labels[shape.index_of(&b)], labels[shape.index_of(&c)]);
                    if let (Some(la), Some(lb), Some(_)) = (la, lb, lc) {
                        match family.complete_square(j, i, la as usize, lb as usize) {
                            Ok(x) => {
                                let x = x as u32;
                                if let Some(prev) = found {
                                    if prev != x {
                                        return Err(Error::NonUniqueFilling { point: d, candidates: 2 });
                                    }
                                }
                                found = Some(x);
                                if !cfg!(debug_assertions) {
                                    break 'dirs;
                                }
                            }
                            Err(0) => return Err(Error::NoFilling { point: d }),
                            Err(n) => return Err(Error::NonUniqueFilling { point: d, candidates: n }),
                        }
                    }
                }
            }
            match found {
                Some(x) => labels[idx] = Some(x),
                None => still.push(idx),
            }
        }
        if still.len() == before {
            return Err(Error::NoFilling { point: shape.point_of(still[0]) });
        }
        missing = still;
    }
    let w = Word::from_parts(shape, labels.into_iter().map(|l| l.expect("filled")).collect())?;
    if let Some((point, _)) = w.first_bad_edge(family) {
        return Err(Error::NoFilling { point });
    }
    Ok(w)
}

/// Left fold of [`compose`] over a nonempty sequence.
pub fn compose_all(family: &MatrixFamily, parts: &[&Word]) -> Result<Word> {
    let (first, rest) = parts.split_first().expect("at least one word");
    let mut acc = (*first).clone();
    for w in rest {
        acc = compose(family, &acc, w)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::families::*;
    use crate::shape::Shape;
    use crate::words::collect_words;

    fn s(v: &[usize]) -> Shape {
        Shape::new(v.to_vec())
    }

    #[test]
    fn tensor_square_fills_fourth_corner() {
        let g3 = golden_tensor();
        // letter (x, y) has index 2x + y; direction 1 moves x, direction 2 moves y.
        let u = Word::new(&g3, s(&[1, 0]), vec![0, 2]).unwrap(); // (0,0) -> (1,0)
        let v = Word::new(&g3, s(&[0, 1]), vec![2, 3]).unwrap(); // (1,0) -> (1,1)
        let w = compose(&g3, &u, &v).unwrap();
        assert_eq!(w.shape(), &s(&[1, 1]));
        assert_eq!(w.labels(), &[0, 1, 2, 3]);
        assert_eq!(w.restrict_prefix(u.shape()).unwrap(), u);
        assert_eq!(w.restrict_tail(u.shape()).unwrap(), v);
    }

    #[test]
    fn constant_words_compose() {
        let g4 = identity_pair();
        let u = collect_words(&g4, &s(&[2, 1]), Some(2)).unwrap().remove(0);
        let v = collect_words(&g4, &s(&[0, 3]), Some(2)).unwrap().remove(0);
        let w = compose(&g4, &u, &v).unwrap();
        assert_eq!(w.shape(), &s(&[2, 4]));
        assert!(w.labels().iter().all(|&l| l == 2));
    }

    #[test]
    fn mismatched_endpoints() {
        let g1 = golden_mean();
        let u = Word::path(&g1, &[0, 1]).unwrap();
        let v = Word::path(&g1, &[0, 0]).unwrap();
        assert!(matches!(compose(&g1, &u, &v), Err(Error::OriginMismatch { terminal: 1, origin: 0 })));
    }

    #[test]
    fn rank_one_is_concatenation() {
        let g1 = golden_mean();
        let u = Word::path(&g1, &[1, 0]).unwrap();
        let v = Word::path(&g1, &[0, 1, 0]).unwrap();
        assert_eq!(compose(&g1, &u, &v).unwrap().as_string(), "1010");
    }

    #[test]
    fn rank_three_composition_round_trips() {
        let g = golden_cube();
        for w in collect_words(&g, &s(&[1, 1, 1]), None).unwrap().iter().step_by(7) {
            for k in s(&[1, 1, 1]).dominated() {
                let pre = w.restrict_prefix(&k).unwrap();
                let tail = w.restrict_tail(&k).unwrap();
                assert_eq!(&compose(&g, &pre, &tail).unwrap(), w);
            }
        }
    }
}
