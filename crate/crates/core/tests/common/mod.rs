//! Brute-force reference checkers written directly from the definitions,
//! sharing no code with the library scans. Sets are sorted `Vec<usize>`,
//! values are `Option<i64>` with `None` for minus infinity.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lorentzcert::exactnum::{ExtValue, Rational};
use lorentzcert::poly::Exponent;
use lorentzcert::setfn::{SetFunction, ValuatedMatroid};

pub type Table = BTreeMap<Vec<usize>, Option<i64>>;

pub fn all_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for e in 0..n {
        let with: Vec<Vec<usize>> = out
            .iter()
            .map(|s| {
                let mut t = s.clone();
                t.push(e);
                t
            })
            .collect();
        out.extend(with);
    }
    out
}

fn with(s: &[usize], add: Option<usize>, remove: Option<usize>) -> Vec<usize> {
    let mut set: BTreeSet<usize> = s.iter().copied().collect();
    if let Some(r) = remove {
        set.remove(&r);
    }
    if let Some(a) = add {
        set.insert(a);
    }
    set.into_iter().collect()
}

fn plus(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

/// `None < Some(_)` matches the order on `R ∪ {-inf}`.
fn geq(a: Option<i64>, b: Option<i64>) -> bool {
    a >= b
}

/// For all X, Y in the domain and i in X \ Y:
/// ν(X) + ν(Y) <= ν(X - i) + ν(Y + i), or
/// ν(X) + ν(Y) <= ν(X - i + j) + ν(Y + i - j) for some j in Y \ X.
pub fn mnat_reference(table: &Table) -> bool {
    for (x, &vx) in table {
        for (y, &vy) in table {
            if vx.is_none() || vy.is_none() {
                continue;
            }
            let lhs = plus(vx, vy);
            for &i in x.iter().filter(|e| !y.contains(e)) {
                let first = plus(
                    table[&with(x, None, Some(i))],
                    table[&with(y, Some(i), None)],
                );
                if geq(first, lhs) {
                    continue;
                }
                let second = y.iter().filter(|e| !x.contains(e)).any(|&j| {
                    let v = plus(
                        table[&with(x, Some(j), Some(i))],
                        table[&with(y, Some(i), Some(j))],
                    );
                    geq(v, lhs)
                });
                if !second {
                    return false;
                }
            }
        }
    }
    true
}

/// Symmetric exchange on the d-subsets with finite value.
pub fn valuated_reference(table: &Table) -> bool {
    for (b1, &v1) in table {
        for (b2, &v2) in table {
            if v1.is_none() || v2.is_none() {
                continue;
            }
            let lhs = plus(v1, v2);
            for &a in b1.iter().filter(|e| !b2.contains(e)) {
                let ok = b2.iter().filter(|e| !b1.contains(e)).any(|&b| {
                    let v = plus(
                        table[&with(b1, Some(b), Some(a))],
                        table[&with(b2, Some(a), Some(b))],
                    );
                    geq(v, lhs)
                });
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// For α, β in J and i with α_i > β_i there is j with β_j > α_j such that
/// α - e_i + e_j and β + e_i - e_j are both in J.
pub fn mconvex_reference(points: &[Vec<u32>]) -> bool {
    let set: BTreeSet<&Vec<u32>> = points.iter().collect();
    for a in points {
        for b in points {
            for i in 0..a.len() {
                if a[i] <= b[i] {
                    continue;
                }
                let ok = (0..a.len()).any(|j| {
                    if b[j] <= a[j] {
                        return false;
                    }
                    let mut a2 = a.clone();
                    a2[i] -= 1;
                    a2[j] += 1;
                    let mut b2 = b.clone();
                    b2[j] -= 1;
                    b2[i] += 1;
                    set.contains(&a2) && set.contains(&b2)
                });
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

fn ext(v: Option<i64>) -> ExtValue {
    match v {
        Some(x) => ExtValue::from_int(x),
        None => ExtValue::NegInfinity,
    }
}

pub fn mask(s: &[usize]) -> u32 {
    s.iter().map(|&e| 1u32 << e).sum()
}

pub fn set_function(n: usize, table: &Table) -> SetFunction {
    let mut values = vec![ExtValue::NegInfinity; 1 << n];
    for (s, &v) in table {
        values[mask(s) as usize] = ext(v);
    }
    SetFunction::new(n, values).unwrap()
}

pub fn valuated(n: usize, d: usize, table: &Table) -> ValuatedMatroid {
    let entries: Vec<(u32, ExtValue)> = table.iter().map(|(s, &v)| (mask(s), ext(v))).collect();
    ValuatedMatroid::new(n, d, &entries).unwrap()
}

/// Reads an integer-valued set function back into a table.
pub fn table_of(nu: &SetFunction) -> Table {
    let n = nu.ground_size();
    all_subsets(n)
        .into_iter()
        .map(|s| {
            let v = nu.value(mask(&s));
            let v = v.finite().map(|r: &Rational| {
                assert!(r.is_integer());
                i64::try_from(r.to_integer()).unwrap()
            });
            (s, v)
        })
        .collect()
}

/// Every table on `sets` with values drawn from `choices`, in odometer order.
pub fn all_tables(sets: &[Vec<usize>], choices: &[Option<i64>]) -> Vec<Table> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; sets.len()];
    loop {
        out.push(
            sets.iter()
                .zip(&idx)
                .map(|(s, &k)| (s.clone(), choices[k]))
                .collect(),
        );
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < choices.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// The lattice points of the simplex `{a in N^n : |a| = d}`.
pub fn simplex(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in simplex(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn exponents(points: &[Vec<u32>]) -> Vec<Exponent> {
    points.iter().map(|p| Exponent(p.clone())).collect()
}

#[derive(Debug, Default)]
pub struct Agreement {
    pub checked: usize,
    pub disagreements: Vec<String>,
}

impl Agreement {
    fn record(&mut self, what: &str, ours: bool, reference: bool, input: impl FnOnce() -> String) {
        self.checked += 1;
        if ours != reference {
            self.disagreements.push(format!(
                "{what}: library {ours}, reference {reference} on {}",
                input()
            ));
        }
    }
}

fn nonempty(t: &Table) -> bool {
    t.values().any(Option::is_some)
}

/// M♮-concavity on every function with `n <= 4` and values in a small range:
/// `{-inf, 0, 1, 2}` up to `n = 2`, `{-inf, 0, 1}` for `n = 3` and
/// `{-inf, 0}` for `n = 4`.
pub fn mnat_agreement(acc: &mut Agreement) {
    use lorentzcert::setfn::is_mnat_concave;
    let ranges: [&[Option<i64>]; 5] = [
        &[None, Some(0), Some(1), Some(2)],
        &[None, Some(0), Some(1), Some(2)],
        &[None, Some(0), Some(1), Some(2)],
        &[None, Some(0), Some(1)],
        &[None, Some(0)],
    ];
    for (n, choices) in ranges.iter().enumerate() {
        let sets = all_subsets(n);
        for t in all_tables(&sets, choices).iter().filter(|t| nonempty(t)) {
            let ours = is_mnat_concave(&set_function(n, t)).holds();
            acc.record("is_mnat_concave", ours, mnat_reference(t), || {
                format!("{t:?}")
            });
        }
    }
}

/// Valuated matroids of every rank on `n <= 4` elements with values in
/// `{-inf, 0, 1, 2}`.
pub fn valuated_agreement(acc: &mut Agreement) {
    use lorentzcert::setfn::is_valuated_matroid;
    let choices = [None, Some(0), Some(1), Some(2)];
    for n in 0..=4 {
        for d in 0..=n {
            let sets: Vec<Vec<usize>> = all_subsets(n)
                .into_iter()
                .filter(|s| s.len() == d)
                .collect();
            for t in all_tables(&sets, &choices).iter().filter(|t| nonempty(t)) {
                let ours = is_valuated_matroid(&valuated(n, d, t)).holds();
                acc.record("is_valuated_matroid", ours, valuated_reference(t), || {
                    format!("n={n} d={d} {t:?}")
                });
            }
        }
    }
}

/// Every subset of `Δ_n^d` for `n <= 4` whenever the simplex has at most
/// ten points.
pub fn mconvex_agreement(acc: &mut Agreement) {
    use lorentzcert::poly::is_mconvex_set;
    for n in 1..=4usize {
        for d in 0..=9u32 {
            let pts = simplex(n, d);
            if pts.len() > 10 {
                continue;
            }
            for bits in 0u32..(1 << pts.len()) {
                let chosen: Vec<Vec<u32>> = pts
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| bits >> k & 1 == 1)
                    .map(|(_, p)| p.clone())
                    .collect();
                let ours = is_mconvex_set(&exponents(&chosen)).holds();
                acc.record("is_mconvex_set", ours, mconvex_reference(&chosen), || {
                    format!("{chosen:?}")
                });
            }
        }
    }
}
