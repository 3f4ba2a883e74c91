//! Monotone maps between finite ordinals [n] = {0, ..., n}.
//!
//! These index the structure maps of everything else: a face map is the
//! coface `delta(i)` applied contravariantly, a degeneracy the codegeneracy
//! `sigma(i)`. `apply` on a simplicial set factors an arbitrary monotone map
//! into those generators.

use crate::{Error, Result};
use serde::Serialize;

/// A weakly monotone map [source_rank] -> [target_rank], stored pointwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MonotoneMap {
    source_rank: usize,
    target_rank: usize,
    values: Vec<usize>,
}

impl MonotoneMap {
    /// Builds a map from its value table; rejects non-monotone or
    /// out-of-range tables.
    pub fn new(target_rank: usize, values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::BadStructure {
                detail: "a monotone map needs at least one value".into(),
            });
        }
        for w in values.windows(2) {
            if w[0] > w[1] {
                return Err(Error::BadStructure {
                    detail: format!("values {:?} are not monotone", values),
                });
            }
        }
        if *values.last().unwrap() > target_rank {
            return Err(Error::BadStructure {
                detail: format!("value {} exceeds target rank {}", values.last().unwrap(), target_rank),
            });
        }
        Ok(MonotoneMap {
            source_rank: values.len() - 1,
            target_rank,
            values,
        })
    }

    pub fn identity(rank: usize) -> Self {
        MonotoneMap {
            source_rank: rank,
            target_rank: rank,
            values: (0..=rank).collect(),
        }
    }

    /// The coface [n-1] -> [n] that skips `i`.
    pub fn coface(n: usize, i: usize) -> Self {
        assert!(n >= 1 && i <= n);
        let values = (0..n).map(|k| if k < i { k } else { k + 1 }).collect();
        MonotoneMap {
            source_rank: n - 1,
            target_rank: n,
            values,
        }
    }

    /// The codegeneracy [n+1] -> [n] that hits `i` twice.
    pub fn codegeneracy(n: usize, i: usize) -> Self {
        assert!(i <= n);
        let values = (0..=n + 1).map(|k| if k <= i { k } else { k - 1 }).collect();
        MonotoneMap {
            source_rank: n + 1,
            target_rank: n,
            values,
        }
    }

    /// The spine edge inclusion [1] -> [m] with image {i, i+1}.
    pub fn spine_edge(m: usize, i: usize) -> Self {
        assert!(m >= 1 && i + 1 <= m);
        MonotoneMap {
            source_rank: 1,
            target_rank: m,
            values: vec![i, i + 1],
        }
    }

    /// The vertex inclusion [0] -> [m] hitting `i`.
    pub fn vertex(m: usize, i: usize) -> Self {
        assert!(i <= m);
        MonotoneMap {
            source_rank: 0,
            target_rank: m,
            values: vec![i],
        }
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply_to(&self, k: usize) -> usize {
        self.values[k]
    }

    pub fn is_identity(&self) -> bool {
        self.source_rank == self.target_rank
            && self.values.iter().enumerate().all(|(k, &v)| k == v)
    }
}

/// Diagrammatic composition: `f` followed by `g`, so the result sends
/// `k` to `g(f(k))`. Errors when `f`'s target rank is not `g`'s source rank.
pub fn compose_monotone(f: &MonotoneMap, g: &MonotoneMap) -> Result<MonotoneMap> {
    if f.target_rank != g.source_rank {
        return Err(Error::RankMismatch {
            left: f.target_rank,
            right: g.source_rank,
        });
    }
    Ok(MonotoneMap {
        source_rank: f.source_rank,
        target_rank: g.target_rank,
        values: f.values.iter().map(|&v| g.values[v]).collect(),
    })
}

/// One step of the generator factorization of a monotone map, read off the
/// *target* side first: applying a simplicial set contravariantly, `Face`
/// steps run before `Degeneracy` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorStep {
    /// Drop value `i` at level `level` (a face map X_level -> X_{level-1}).
    Face { level: usize, i: usize },
    /// Insert a repeat at `i`, landing on level `level + 1`.
    Degeneracy { level: usize, i: usize },
}

/// Factors `f` as cofaces after codegeneracies and returns the steps in the
/// order a simplicial set must apply them contravariantly: all faces first
/// (largest skipped value first), then degeneracies.
pub fn generator_steps(f: &MonotoneMap) -> Vec<GeneratorStep> {
    let mut steps = Vec::new();
    let mut values = f.values.clone();
    let mut level = f.target_rank;

    // Peel cofaces: remove the largest value missing from the image.
    loop {
        let image: std::collections::BTreeSet<usize> = values.iter().copied().collect();
        let missing = (0..=level).rev().find(|j| !image.contains(j));
        match missing {
            Some(j) => {
                steps.push(GeneratorStep::Face { level, i: j });
                for v in values.iter_mut() {
                    if *v > j {
                        *v -= 1;
                    }
                }
                level -= 1;
            }
            None => break,
        }
    }

    // Now surjective onto [level]; peel codegeneracies. The first peeled
    // codegeneracy is applied last, so collect and reverse.
    let mut degens = Vec::new();
    while values.len() > level + 1 {
        let i = (0..values.len() - 1)
            .find(|&i| values[i] == values[i + 1])
            .expect("surjective non-injective map repeats a value");
        degens.push(i);
        values.remove(i);
    }
    for &i in degens.iter().rev() {
        steps.push(GeneratorStep::Degeneracy { level, i });
        level += 1;
    }
    steps
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent pointwise oracle for composition.
    fn pointwise(f: &MonotoneMap, g: &MonotoneMap) -> Vec<usize> {
        (0..=f.source_rank())
            .map(|k| g.apply_to(f.apply_to(k)))
            .collect()
    }

    #[test]
    fn compose_identities() {
        for rank in 0..4 {
            let id = MonotoneMap::identity(rank);
            let c = compose_monotone(&id, &id).unwrap();
            assert_eq!(c, id);
        }
    }

    #[test]
    fn coface_then_codegeneracy() {
        // delta_1: [1] -> [2] followed by sigma_0: [2] -> [1].
        let d1 = MonotoneMap::coface(2, 1);
        assert_eq!(d1.values(), &[0, 2]);
        let s0 = MonotoneMap::codegeneracy(1, 0);
        assert_eq!(s0.values(), &[0, 0, 1]);
        let c = compose_monotone(&d1, &s0).unwrap();
        assert_eq!(c.values(), &[0, 1]);
        assert_eq!(c.values(), pointwise(&d1, &s0).as_slice());
        assert!(c.is_identity());
    }

    #[test]
    fn vertex_and_coface_compositions() {
        // Both endpoint inclusions [0] -> [1], pushed into [2] by delta_2.
        let d2 = MonotoneMap::coface(2, 2);
        let top = MonotoneMap::coface(1, 0); // hits 1
        let bottom = MonotoneMap::coface(1, 1); // hits 0
        let via_top = compose_monotone(&top, &d2).unwrap();
        let via_bottom = compose_monotone(&bottom, &d2).unwrap();
        assert_eq!(via_top.values(), pointwise(&top, &d2).as_slice());
        assert_eq!(via_bottom.values(), pointwise(&bottom, &d2).as_slice());
        assert_eq!(via_top.values(), &[1]);
        assert_eq!(via_bottom.values(), &[0]);
    }

    #[test]
    fn rank_mismatch_rejected() {
        let f = MonotoneMap::identity(2);
        let g = MonotoneMap::identity(3);
        assert!(matches!(
            compose_monotone(&f, &g),
            Err(Error::RankMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn non_monotone_rejected() {
        assert!(MonotoneMap::new(2, vec![1, 0]).is_err());
        assert!(MonotoneMap::new(1, vec![0, 2]).is_err());
    }

    #[test]
    fn factorization_reassembles() {
        // Every monotone [p] -> [q] with p, q <= 3 factors back to itself.
        fn all_monotone(p: usize, q: usize) -> Vec<Vec<usize>> {
            let mut out = vec![vec![]];
            for _ in 0..=p {
                let mut next = Vec::new();
                for v in &out {
                    let lo = v.last().copied().unwrap_or(0);
                    for x in lo..=q {
                        let mut w = v.clone();
                        w.push(x);
                        next.push(w);
                    }
                }
                out = next;
            }
            out
        }
        for p in 0..=3 {
            for q in 0..=3 {
                for values in all_monotone(p, q) {
                    let f = MonotoneMap::new(q, values).unwrap();
                    let steps = generator_steps(&f);
                    // Reassemble on the coface/codegeneracy side.
                    let mut g = MonotoneMap::identity(f.source_rank());
                    for step in steps.iter().rev() {
                        g = match *step {
                            GeneratorStep::Face { level, i } => {
                                compose_monotone(&g, &MonotoneMap::coface(level, i)).unwrap()
                            }
                            GeneratorStep::Degeneracy { level, i } => {
                                compose_monotone(&g, &MonotoneMap::codegeneracy(level, i)).unwrap()
                            }
                        };
                    }
                    assert_eq!(g, f, "factorization of {:?}", f.values());
                }
            }
        }
    }
}
