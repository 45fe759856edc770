//! Finite matroids given by an explicit family of independent sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{self, Mask};
use crate::verdict::Verdict;

/// Enumeration-heavy operations are capped at this ground set size.
pub const MAX_ELEMENTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum MatroidViolation {
    /// The family has no members.
    Empty,
    /// `set` is in the family but its subset `missing` is not.
    NotDownwardClosed {
        set: Vec<usize>,
        missing: Vec<usize>,
    },
    /// `|larger| > |smaller|` and no element of `larger \ smaller` extends `smaller`.
    NoAugmentation {
        larger: Vec<usize>,
        smaller: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatroidError {
    #[error("ground set of size {0} exceeds the cap of {MAX_ELEMENTS}")]
    TooLarge(usize),
    #[error("element {0} is outside the ground set")]
    ElementOutOfRange(usize),
    #[error("not a matroid: {0:?}")]
    Invalid(MatroidViolation),
    #[error("sizes {a} + {b} do not sum to the ground set size {n}")]
    BadSizes { a: usize, b: usize, n: usize },
}

/// Checks the two independence axioms on a family of subsets of `{0..n-1}`.
pub fn validate(family: &[Mask], n: usize) -> Verdict<MatroidViolation> {
    if family.is_empty() {
        return Verdict::Fails(MatroidViolation::Empty);
    }
    let mut member = vec![false; 1usize << n];
    for &s in family {
        member[s as usize] = true;
    }
    let sets: Vec<Mask> = (0..=bits::full(n))
        .filter(|&s| member[s as usize])
        .collect();
    // Downward closure reduces to single-element deletions.
    for &s in &sets {
        for e in bits::elements(s) {
            let sub = s & !(1 << e);
            if !member[sub as usize] {
                return Verdict::Fails(MatroidViolation::NotDownwardClosed {
                    set: bits::to_vec(s),
                    missing: bits::to_vec(sub),
                });
            }
        }
    }
    // Given downward closure, augmentation for |I| = |J| + 1 implies the general case.
    let witness = sets.par_iter().find_map_first(|&big| {
        let k = bits::size(big);
        if k == 0 {
            return None;
        }
        sets.iter()
            .filter(|&&small| bits::size(small) + 1 == k)
            .find(|&&small| {
                !bits::elements(big & !small).any(|e| member[(small | 1 << e) as usize])
            })
            .map(|&small| (big, small))
    });
    match witness {
        Some((big, small)) => Verdict::Fails(MatroidViolation::NoAugmentation {
            larger: bits::to_vec(big),
            smaller: bits::to_vec(small),
        }),
        None => Verdict::Holds,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matroid {
    n: usize,
    independent: Vec<bool>,
}

impl Matroid {
    pub fn new(n: usize, family: &[Mask]) -> Result<Self, MatroidError> {
        if n > MAX_ELEMENTS {
            return Err(MatroidError::TooLarge(n));
        }
        if let Some(&s) = family.iter().find(|&&s| s & !bits::full(n) != 0) {
            return Err(MatroidError::ElementOutOfRange(
                bits::elements(s).max().unwrap_or(0),
            ));
        }
        if let Verdict::Fails(v) = validate(family, n) {
            return Err(MatroidError::Invalid(v));
        }
        let mut independent = vec![false; 1usize << n];
        for &s in family {
            independent[s as usize] = true;
        }
        Ok(Matroid { n, independent })
    }

    /// The matroid whose independent sets are the subsets of `bases`.
    pub fn from_bases(n: usize, bases: &[Mask]) -> Result<Self, MatroidError> {
        if n > MAX_ELEMENTS {
            return Err(MatroidError::TooLarge(n));
        }
        let mut closed = vec![false; 1usize << n];
        for &b in bases {
            if b & !bits::full(n) != 0 {
                return Err(MatroidError::ElementOutOfRange(
                    bits::elements(b).max().unwrap_or(0),
                ));
            }
            for s in bits::submasks(b) {
                closed[s as usize] = true;
            }
        }
        let family: Vec<Mask> = (0..=bits::full(n))
            .filter(|&s| closed[s as usize])
            .collect();
        Self::new(n, &family)
    }

    /// Uniform matroid `U_{d,n}`.
    pub fn uniform(d: usize, n: usize) -> Result<Self, MatroidError> {
        let family: Vec<Mask> = (0..=bits::full(n))
            .filter(|&s| bits::size(s) <= d)
            .collect();
        Self::new(n, &family)
    }

    pub fn free(n: usize) -> Result<Self, MatroidError> {
        Self::uniform(n, n)
    }

    /// Cycle matroid of a multigraph: independent sets are the forests.
    /// A loop `(v, v)` is never independent.
    pub fn graphic(edges: &[(usize, usize)]) -> Result<Self, MatroidError> {
        let m = edges.len();
        if m > MAX_ELEMENTS {
            return Err(MatroidError::TooLarge(m));
        }
        let nv = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let family: Vec<Mask> = (0..=bits::full(m))
            .filter(|&s| is_forest(nv, edges, s))
            .collect();
        Self::new(m, &family)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn is_independent(&self, s: Mask) -> bool {
        self.independent.get(s as usize).copied().unwrap_or(false)
    }

    pub fn independent_sets(&self) -> impl Iterator<Item = Mask> + '_ {
        (0..=bits::full(self.n)).filter(move |&s| self.independent[s as usize])
    }

    pub fn rank(&self, s: Mask) -> usize {
        bits::submasks(s & bits::full(self.n))
            .filter(|&t| self.is_independent(t))
            .map(bits::size)
            .max()
            .unwrap_or(0)
    }

    /// Ranks of all subsets, indexed by mask.
    pub fn rank_function(&self) -> Vec<usize> {
        let mut rk = vec![0usize; 1usize << self.n];
        for s in 0..=bits::full(self.n) {
            rk[s as usize] = if self.independent[s as usize] {
                bits::size(s)
            } else {
                bits::elements(s)
                    .map(|e| rk[(s & !(1 << e)) as usize])
                    .max()
                    .unwrap_or(0)
            };
        }
        rk
    }

    pub fn matroid_rank(&self) -> usize {
        self.independent_sets().map(bits::size).max().unwrap_or(0)
    }

    pub fn bases(&self) -> Vec<Mask> {
        let r = self.matroid_rank();
        self.independent_sets()
            .filter(|&s| bits::size(s) == r)
            .collect()
    }

    /// `(I_0, ..., I_n)`: the number of independent sets of each size.
    pub fn ik_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n + 1];
        for s in self.independent_sets() {
            counts[bits::size(s)] += 1;
        }
        counts
    }

    /// Number of ordered partitions `E = A ⊔ B` with `|A| = a`, `|B| = b`
    /// and both parts independent.
    pub fn n_partitions(&self, a: usize, b: usize) -> Result<u64, MatroidError> {
        if a + b != self.n {
            return Err(MatroidError::BadSizes { a, b, n: self.n });
        }
        let all = bits::full(self.n);
        Ok(bits::subsets_of_size(self.n, a)
            .filter(|&s| self.is_independent(s) && self.is_independent(all & !s))
            .count() as u64)
    }
}

fn is_forest(nv: usize, edges: &[(usize, usize)], s: Mask) -> bool {
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in bits::elements(s) {
        let (u, v) = edges[e];
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru == rv {
            return false;
        }
        parent[ru] = rv;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::from_elements as set;

    fn triangle() -> Matroid {
        Matroid::graphic(&[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&[0, set([0]), set([1])], 2).holds());
        assert_eq!(
            validate(&[0, set([0]), set([0, 1])], 2),
            Verdict::Fails(MatroidViolation::NotDownwardClosed {
                set: vec![0, 1],
                missing: vec![1]
            })
        );
        assert_eq!(
            validate(&[0, set([0]), set([1]), set([2]), set([0, 1])], 3),
            Verdict::Fails(MatroidViolation::NoAugmentation {
                larger: vec![0, 1],
                smaller: vec![2]
            })
        );
        assert_eq!(validate(&[], 2), Verdict::Fails(MatroidViolation::Empty));
    }

    #[test]
    fn rank_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        assert_eq!(u23.rank(set([0, 1, 2])), 2);
        assert_eq!(u23.rank(0), 0);
        let t = triangle();
        for s in [set([0, 1]), set([1, 2]), set([0, 2])] {
            assert_eq!(t.rank(s), 2);
        }
        assert_eq!(t.rank(set([0, 1, 2])), 2);
        assert_eq!(t.rank_function()[set([0, 1, 2]) as usize], 2);
    }

    #[test]
    fn ik_count_examples() {
        assert_eq!(
            Matroid::uniform(2, 4).unwrap().ik_counts(),
            vec![1, 4, 6, 0, 0]
        );
        assert_eq!(triangle().ik_counts(), vec![1, 3, 3, 0]);
        assert_eq!(Matroid::free(3).unwrap().ik_counts(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn partition_examples() {
        let u23 = Matroid::uniform(2, 3).unwrap();
        assert_eq!(u23.n_partitions(1, 2).unwrap(), 3);
        assert_eq!(u23.n_partitions(0, 3).unwrap(), 0);
        assert_eq!(u23.n_partitions(2, 1).unwrap(), 3);
        assert_eq!(Matroid::free(2).unwrap().n_partitions(1, 1).unwrap(), 2);
        assert_eq!(
            u23.n_partitions(1, 1),
            Err(MatroidError::BadSizes { a: 1, b: 1, n: 3 })
        );
    }

    #[test]
    fn graphic_loops_and_parallels() {
        let m = Matroid::graphic(&[(0, 0), (0, 1), (0, 1)]).unwrap();
        assert!(!m.is_independent(set([0])));
        assert!(m.is_independent(set([1])));
        assert!(!m.is_independent(set([1, 2])));
        assert_eq!(m.matroid_rank(), 1);
    }

    #[test]
    fn from_bases_closes_downward() {
        let m = Matroid::from_bases(3, &[set([0, 1]), set([0, 2]), set([1, 2])]).unwrap();
        assert_eq!(m, Matroid::uniform(2, 3).unwrap());
        assert!(matches!(
            Matroid::from_bases(4, &[set([0, 1]), set([2, 3])]),
            Err(MatroidError::Invalid(
                MatroidViolation::NoAugmentation { .. }
            ))
        ));
    }
}
