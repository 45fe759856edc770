//! Set functions `2^E -> Q ∪ {-inf}` on small ground sets, stored densely by
//! bitmask, and valuated matroids.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{self, Mask};
use crate::exactnum::{ExtValue, NumError, QWeight, Rational};
use crate::matroid::Matroid;
use crate::trees::{TreeError, UltrametricFn};
use crate::verdict::Verdict;

pub const MAX_ELEMENTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetFnError {
    #[error("ground set of size {0} exceeds the cap of {MAX_ELEMENTS}")]
    TooLarge(usize),
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("effective domain is empty")]
    EmptyDomain,
    #[error("element {0} is outside the ground set")]
    ElementOutOfRange(usize),
    #[error("rank {d} exceeds the ground set size {n}")]
    BadRank { d: usize, n: usize },
    #[error("set {0:?} does not have the rank's size")]
    NotBasisSize(Vec<usize>),
    #[error("set {0:?} is outside the effective domain")]
    DomainTooSmall(Vec<usize>),
    #[error("element {element} has multiplicity {multiplicity}, at most 2 is allowed")]
    MultiplicityTooHigh { element: usize, multiplicity: usize },
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunction {
    n: usize,
    values: Vec<ExtValue>,
}

impl SetFunction {
    pub fn new(n: usize, values: Vec<ExtValue>) -> Result<Self, SetFnError> {
        if n > MAX_ELEMENTS {
            return Err(SetFnError::TooLarge(n));
        }
        if values.len() != 1 << n {
            return Err(SetFnError::WrongLength {
                expected: 1 << n,
                got: values.len(),
            });
        }
        if !values.iter().any(ExtValue::is_finite) {
            return Err(SetFnError::EmptyDomain);
        }
        Ok(SetFunction { n, values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(Mask) -> ExtValue) -> Result<Self, SetFnError> {
        if n > MAX_ELEMENTS {
            return Err(SetFnError::TooLarge(n));
        }
        Self::new(n, (0..=bits::full(n)).map(&mut f).collect())
    }

    /// A function given on listed sets, `default` elsewhere.
    pub fn from_entries(
        n: usize,
        default: ExtValue,
        entries: &[(Mask, ExtValue)],
    ) -> Result<Self, SetFnError> {
        if n > MAX_ELEMENTS {
            return Err(SetFnError::TooLarge(n));
        }
        let mut values = vec![default; 1 << n];
        for (s, v) in entries {
            if s & !bits::full(n) != 0 {
                return Err(SetFnError::ElementOutOfRange(
                    bits::elements(*s).max().unwrap_or(0),
                ));
            }
            values[*s as usize] = v.clone();
        }
        Self::new(n, values)
    }

    pub fn zero(n: usize) -> Result<Self, SetFnError> {
        Self::from_fn(n, |_| ExtValue::zero())
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn value(&self, s: Mask) -> &ExtValue {
        &self.values[s as usize]
    }

    pub fn values(&self) -> &[ExtValue] {
        &self.values
    }

    pub fn domain(&self) -> impl Iterator<Item = Mask> + '_ {
        (0..=bits::full(self.n)).filter(move |&s| self.values[s as usize].is_finite())
    }

    /// Every set with at most two elements lies in the effective domain.
    pub fn first_small_set_outside_domain(&self) -> Option<Mask> {
        (0..=bits::full(self.n))
            .find(|&s| bits::size(s) <= 2 && !self.values[s as usize].is_finite())
    }

    pub fn is_integer_valued(&self) -> bool {
        self.values.iter().all(ExtValue::is_integer)
    }
}

/// Tropical scalars for the exchange scans: `Option<i64>` (None = -inf) for
/// small integer data, `ExtValue` otherwise.
trait Tropical: Ord + Send + Sync {
    fn plus(&self, other: &Self) -> Self;
    fn is_neg_inf(&self) -> bool;
}

impl Tropical for Option<i64> {
    fn plus(&self, other: &Self) -> Self {
        Some((*self)? + (*other)?)
    }
    fn is_neg_inf(&self) -> bool {
        self.is_none()
    }
}

impl Tropical for ExtValue {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn is_neg_inf(&self) -> bool {
        !self.is_finite()
    }
}

/// Small-integer view of the values, if every finite value is an integer of
/// modest size (sums of four never overflow).
fn small_ints(values: &[ExtValue]) -> Option<Vec<Option<i64>>> {
    const LIMIT: i64 = 1 << 40;
    values
        .iter()
        .map(|v| match v {
            ExtValue::NegInfinity => Some(None),
            ExtValue::Finite(r) if r.is_integer() => {
                let k: i64 = num_traits::ToPrimitive::to_i64(r.numer())?;
                (k.abs() < LIMIT).then_some(Some(k))
            }
            ExtValue::Finite(_) => None,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeWitness {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub element: usize,
}

fn exchange_witness(a: Mask, b: Mask, e: usize) -> ExchangeWitness {
    ExchangeWitness {
        first: bits::to_vec(a),
        second: bits::to_vec(b),
        element: e,
    }
}

fn mnat_scan<V: Tropical>(n: usize, vals: &[V]) -> Option<(Mask, Mask, usize)> {
    let full = bits::full(n);
    (0..=full).into_par_iter().find_map_first(|i1| {
        if vals[i1 as usize].is_neg_inf() {
            return None;
        }
        for i2 in 0..=full {
            if vals[i2 as usize].is_neg_inf() {
                continue;
            }
            let lhs = vals[i1 as usize].plus(&vals[i2 as usize]);
            for a in bits::elements(i1 & !i2) {
                let without = i1 & !(1 << a);
                if vals[without as usize].plus(&vals[(i2 | 1 << a) as usize]) >= lhs {
                    continue;
                }
                let swapped = bits::elements(i2 & !i1).any(|b| {
                    vals[(without | 1 << b) as usize]
                        .plus(&vals[((i2 & !(1 << b)) | 1 << a) as usize])
                        >= lhs
                });
                if !swapped {
                    return Some((i1, i2, a));
                }
            }
        }
        None
    })
}

/// Exhaustive M♮-concavity check. On failure, reports the least
/// `(I1, I2, i1)` in bitmask order for which neither exchange works.
pub fn is_mnat_concave(nu: &SetFunction) -> Verdict<ExchangeWitness> {
    let hit = match small_ints(&nu.values) {
        Some(v) => mnat_scan(nu.n, &v),
        None => mnat_scan(nu.n, &nu.values),
    };
    hit.map(|(a, b, e)| exchange_witness(a, b, e)).into()
}

/// `ν/i (S) = ν(S ∪ i)` on `E \ i`; the remaining elements keep their order
/// and are renumbered `0..n-2`.
pub fn contract(nu: &SetFunction, i: usize) -> Result<SetFunction, SetFnError> {
    if i >= nu.n {
        return Err(SetFnError::ElementOutOfRange(i));
    }
    SetFunction::from_fn(nu.n - 1, |s| {
        nu.value(bits::insert_gap(s, i) | 1 << i).clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatroidFunction {
    Indicator,
    Rank,
}

pub fn from_matroid(m: &Matroid, kind: MatroidFunction) -> SetFunction {
    let n = m.ground_size();
    let values = match kind {
        MatroidFunction::Indicator => (0..=bits::full(n))
            .map(|s| {
                if m.is_independent(s) {
                    ExtValue::zero()
                } else {
                    ExtValue::NegInfinity
                }
            })
            .collect(),
        MatroidFunction::Rank => m
            .rank_function()
            .into_iter()
            .map(|r| ExtValue::from_int(r as i64))
            .collect(),
    };
    SetFunction::new(n, values).expect("the empty set is independent")
}

/// A function on the `d`-subsets of `{0..n-1}`, not identically `-inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuatedMatroid {
    n: usize,
    d: usize,
    values: Vec<ExtValue>,
}

impl ValuatedMatroid {
    pub fn new(n: usize, d: usize, entries: &[(Mask, ExtValue)]) -> Result<Self, SetFnError> {
        if n > MAX_ELEMENTS {
            return Err(SetFnError::TooLarge(n));
        }
        if d > n {
            return Err(SetFnError::BadRank { d, n });
        }
        let mut values = vec![ExtValue::NegInfinity; 1 << n];
        for (s, v) in entries {
            if s & !bits::full(n) != 0 {
                return Err(SetFnError::ElementOutOfRange(
                    bits::elements(*s).max().unwrap_or(0),
                ));
            }
            if bits::size(*s) != d {
                return Err(SetFnError::NotBasisSize(bits::to_vec(*s)));
            }
            values[*s as usize] = v.clone();
        }
        if !values.iter().any(ExtValue::is_finite) {
            return Err(SetFnError::EmptyDomain);
        }
        Ok(ValuatedMatroid { n, d, values })
    }

    pub fn from_fn(
        n: usize,
        d: usize,
        mut f: impl FnMut(Mask) -> ExtValue,
    ) -> Result<Self, SetFnError> {
        if n > MAX_ELEMENTS {
            return Err(SetFnError::TooLarge(n));
        }
        if d > n {
            return Err(SetFnError::BadRank { d, n });
        }
        let entries: Vec<(Mask, ExtValue)> =
            bits::subsets_of_size(n, d).map(|s| (s, f(s))).collect();
        Self::new(n, d, &entries)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn value(&self, b: Mask) -> &ExtValue {
        &self.values[b as usize]
    }

    /// `(basis, value)` over all `d`-subsets in bitmask order.
    pub fn entries(&self) -> impl Iterator<Item = (Mask, &ExtValue)> + '_ {
        bits::subsets_of_size(self.n, self.d).map(move |s| (s, &self.values[s as usize]))
    }

    pub fn bases(&self) -> Vec<Mask> {
        self.entries()
            .filter(|(_, v)| v.is_finite())
            .map(|(s, _)| s)
            .collect()
    }
}

fn valuated_scan<V: Tropical>(n: usize, d: usize, vals: &[V]) -> Option<(Mask, Mask, usize)> {
    let sets: Vec<Mask> = bits::subsets_of_size(n, d)
        .filter(|&s| !vals[s as usize].is_neg_inf())
        .collect();
    sets.par_iter().find_map_first(|&b1| {
        for &b2 in &sets {
            let lhs = vals[b1 as usize].plus(&vals[b2 as usize]);
            for a in bits::elements(b1 & !b2) {
                let ok = bits::elements(b2 & !b1).any(|b| {
                    let x = (b1 & !(1 << a)) | 1 << b;
                    let y = (b2 & !(1 << b)) | 1 << a;
                    vals[x as usize].plus(&vals[y as usize]) >= lhs
                });
                if !ok {
                    return Some((b1, b2, a));
                }
            }
        }
        None
    })
}

/// Symmetric basis exchange; the witness is the least `(B1, B2, b1)`.
pub fn is_valuated_matroid(v: &ValuatedMatroid) -> Verdict<ExchangeWitness> {
    let hit = match small_ints(&v.values) {
        Some(ints) => valuated_scan(v.n, v.d, &ints),
        None => valuated_scan(v.n, v.d, &v.values),
    };
    hit.map(|(a, b, e)| exchange_witness(a, b, e)).into()
}

/// `ν(S) = max { ν̲(B) : B ⊇ S, |B| = d }`, with `max ∅ = -inf`.
pub fn murota_extension(v: &ValuatedMatroid) -> SetFunction {
    let mut values = vec![ExtValue::NegInfinity; 1 << v.n];
    for (b, val) in v.entries().filter(|(_, val)| val.is_finite()) {
        for s in bits::submasks(b) {
            if *val > values[s as usize] {
                values[s as usize] = val.clone();
            }
        }
    }
    SetFunction::new(v.n, values).expect("some basis is finite")
}

/// `d(i, j) = 2 q^{-ν(ij) + ν(i) + ν(j) - ν(∅)}` for `i != j`.
pub fn ultrametric_from(nu: &SetFunction, w: &QWeight) -> Result<UltrametricFn, SetFnError> {
    if let Some(s) = nu.first_small_set_outside_domain() {
        return Err(SetFnError::DomainTooSmall(bits::to_vec(s)));
    }
    let n = nu.n;
    let fin = |s: Mask| {
        nu.value(s)
            .finite()
            .expect("small sets are in the domain")
            .clone()
    };
    let empty = fin(0);
    let mut rows = vec![vec![Rational::from_integer(0.into()); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let e = fin(1 << i | 1 << j) - fin(1 << i) - fin(1 << j) + &empty;
            let d = w.weight(&ExtValue::Finite(e))? * Rational::from_integer(2.into());
            rows[i][j] = d.clone();
            rows[j][i] = d;
        }
    }
    Ok(UltrametricFn::new(rows)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateExtension {
    pub function: SetFunction,
    /// `origin[k]` is the original element that position `k` of `E'` copies.
    /// A doubled element `e` occupies two adjacent positions.
    pub origin: Vec<usize>,
}

impl DuplicateExtension {
    pub fn doubled(&self) -> usize {
        self.origin.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// `π(I)`, or `None` if `I` contains both copies of some element.
    pub fn collapse(&self, s: Mask) -> Option<Mask> {
        collapse(&self.origin, s)
    }
}

/// Extends `ν` to the multiset with the given multiplicities (each at most
/// 2): `ν'(I) = ν(π(I))` when the copy-collapsing map `π` is injective on
/// `I`, `-inf` otherwise.
pub fn duplicate_extend(
    nu: &SetFunction,
    multiplicity: &[usize],
) -> Result<DuplicateExtension, SetFnError> {
    if multiplicity.len() != nu.n {
        return Err(SetFnError::WrongLength {
            expected: nu.n,
            got: multiplicity.len(),
        });
    }
    if let Some((element, &m)) = multiplicity.iter().enumerate().find(|(_, &m)| m > 2) {
        return Err(SetFnError::MultiplicityTooHigh {
            element,
            multiplicity: m,
        });
    }
    let origin: Vec<usize> = multiplicity
        .iter()
        .enumerate()
        .flat_map(|(e, &m)| std::iter::repeat_n(e, m))
        .collect();
    if origin.len() > MAX_ELEMENTS {
        return Err(SetFnError::TooLarge(origin.len()));
    }
    let function = SetFunction::from_fn(origin.len(), |s| match collapse(&origin, s) {
        Some(t) => nu.value(t).clone(),
        None => ExtValue::NegInfinity,
    })?;
    Ok(DuplicateExtension { function, origin })
}

fn collapse(origin: &[usize], s: Mask) -> Option<Mask> {
    let mut out: Mask = 0;
    for k in bits::elements(s) {
        let bit = 1 << origin[k];
        if out & bit != 0 {
            return None;
        }
        out |= bit;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::from_elements as set;
    use crate::exactnum::{int, rat};

    const NEG: ExtValue = ExtValue::NegInfinity;

    fn v(k: i64) -> ExtValue {
        ExtValue::from_int(k)
    }

    fn u12_indicator() -> SetFunction {
        from_matroid(&Matroid::uniform(1, 2).unwrap(), MatroidFunction::Indicator)
    }

    #[test]
    fn mnat_examples() {
        assert!(is_mnat_concave(&u12_indicator()).holds());
        let bad = SetFunction::new(2, vec![v(0), v(0), v(0), v(1)]).unwrap();
        assert_eq!(
            is_mnat_concave(&bad),
            Verdict::Fails(ExchangeWitness {
                first: vec![0, 1],
                second: vec![],
                element: 0
            })
        );
        for n in 1..=6 {
            for d in 0..=n {
                let m = Matroid::uniform(d, n).unwrap();
                assert!(is_mnat_concave(&from_matroid(&m, MatroidFunction::Rank)).holds());
            }
        }
    }

    #[test]
    fn rational_values_take_the_general_path() {
        let f = SetFunction::new(
            2,
            vec![
                v(0),
                ExtValue::Finite(rat(1, 2)),
                v(0),
                ExtValue::Finite(rat(3, 2)),
            ],
        )
        .unwrap();
        assert!(small_ints(f.values()).is_none());
        assert!(!is_mnat_concave(&f).holds());
    }

    #[test]
    fn contract_examples() {
        let z = contract(&SetFunction::zero(2).unwrap(), 0).unwrap();
        assert_eq!(z.values(), &[v(0), v(0)]);
        let c = contract(&u12_indicator(), 0).unwrap();
        assert_eq!(c.values(), &[v(0), NEG]);
        let rk = from_matroid(&Matroid::uniform(2, 3).unwrap(), MatroidFunction::Rank);
        let c = contract(&rk, 0).unwrap();
        assert_eq!(c.values(), &[v(1), v(2), v(2), v(2)]);
    }

    #[test]
    fn contracting_a_loop_empties_the_domain() {
        let m = Matroid::graphic(&[(0, 0), (0, 1)]).unwrap();
        let f = from_matroid(&m, MatroidFunction::Indicator);
        assert_eq!(contract(&f, 0), Err(SetFnError::EmptyDomain));
    }

    #[test]
    fn matroid_function_examples() {
        let m = Matroid::uniform(2, 3).unwrap();
        let ind = from_matroid(&m, MatroidFunction::Indicator);
        assert_eq!(ind.domain().count(), 7);
        assert_eq!(ind.value(set([0, 1, 2])), &NEG);
        let rk = from_matroid(&m, MatroidFunction::Rank);
        for s in 0..8u32 {
            assert_eq!(rk.value(s), &v(bits::size(s).min(2) as i64));
        }
        let tri = Matroid::graphic(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(from_matroid(&tri, MatroidFunction::Rank).value(7), &v(2));
    }

    fn split(sign: i64) -> ValuatedMatroid {
        ValuatedMatroid::from_fn(4, 2, |b| {
            if b == set([0, 1]) || b == set([2, 3]) {
                v(sign)
            } else {
                v(0)
            }
        })
        .unwrap()
    }

    #[test]
    fn valuated_examples() {
        assert!(is_valuated_matroid(&ValuatedMatroid::from_fn(4, 2, |_| v(0)).unwrap()).holds());
        assert!(is_valuated_matroid(&split(-1)).holds());
        assert_eq!(
            is_valuated_matroid(&split(1)),
            Verdict::Fails(ExchangeWitness {
                first: vec![0, 1],
                second: vec![2, 3],
                element: 0
            })
        );
    }

    #[test]
    fn valuated_construction_errors() {
        assert_eq!(
            ValuatedMatroid::new(3, 4, &[]),
            Err(SetFnError::BadRank { d: 4, n: 3 })
        );
        assert_eq!(
            ValuatedMatroid::new(3, 2, &[(set([0]), v(0))]),
            Err(SetFnError::NotBasisSize(vec![0]))
        );
        assert_eq!(
            ValuatedMatroid::new(3, 2, &[]),
            Err(SetFnError::EmptyDomain)
        );
    }

    #[test]
    fn murota_examples() {
        let u = murota_extension(&ValuatedMatroid::from_fn(3, 2, |_| v(0)).unwrap());
        for s in 0..8u32 {
            assert_eq!(u.value(s), &if bits::size(s) <= 2 { v(0) } else { NEG });
        }
        let e = murota_extension(&split(-1));
        assert_eq!(e.value(set([0, 1])), &v(-1));
        assert_eq!(e.value(set([0, 2])), &v(0));
        assert_eq!(e.value(set([0])), &v(0));
        assert_eq!(e.value(0), &v(0));
        assert!(bits::subsets_of_size(4, 3).all(|s| e.value(s) == &NEG));

        let no_first =
            ValuatedMatroid::from_fn(3, 2, |b| if b & 1 != 0 { NEG } else { v(0) }).unwrap();
        assert_eq!(murota_extension(&no_first).value(set([0])), &NEG);
    }

    #[test]
    fn ultrametric_examples() {
        let half = QWeight::exact(rat(1, 2)).unwrap();
        let d = ultrametric_from(&SetFunction::zero(3).unwrap(), &half).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d.get(i, j), &if i == j { int(0) } else { int(2) });
            }
        }
        // elements 0 and 1 parallel
        let par = Matroid::graphic(&[(0, 1), (0, 1), (1, 2)]).unwrap();
        let d = ultrametric_from(&from_matroid(&par, MatroidFunction::Rank), &half).unwrap();
        assert_eq!(d.get(0, 1), &int(1));
        assert_eq!(d.get(0, 2), &int(2));
        assert_eq!(d.get(1, 2), &int(2));

        let third = QWeight::exact(rat(1, 3)).unwrap();
        let rk = from_matroid(&Matroid::uniform(2, 3).unwrap(), MatroidFunction::Rank);
        let d = ultrametric_from(&rk, &third).unwrap();
        assert_eq!(d.get(0, 2), &int(2));
    }

    #[test]
    fn ultrametric_needs_small_sets() {
        let half = QWeight::exact(rat(1, 2)).unwrap();
        assert_eq!(
            ultrametric_from(&u12_indicator(), &half),
            Err(SetFnError::DomainTooSmall(vec![0, 1]))
        );
    }

    #[test]
    fn duplicate_examples() {
        let nu = SetFunction::from_fn(3, |s| v(bits::size(s) as i64)).unwrap();
        let plain = duplicate_extend(&nu, &[1, 1, 0]).unwrap();
        assert_eq!(plain.function.ground_size(), 2);
        assert_eq!(plain.function.value(set([0, 1])), &v(2));

        let zero = SetFunction::zero(2).unwrap();
        let ext = duplicate_extend(&zero, &[2, 1]).unwrap();
        assert_eq!(ext.origin, vec![0, 0, 1]);
        assert_eq!(ext.doubled(), 1);
        assert_eq!(ext.function.value(set([0, 1])), &NEG);
        assert_eq!(ext.function.value(set([1, 2])), &v(0));
        assert_eq!(ext.function.value(set([0, 1, 2])), &NEG);

        assert_eq!(
            duplicate_extend(&zero, &[3, 0]),
            Err(SetFnError::MultiplicityTooHigh {
                element: 0,
                multiplicity: 3
            })
        );
    }
}
