//! Seeded random instances. Every generator draws from a ChaCha8 stream
//! derived from `(seed, label)`, so instances are reproducible and
//! independent streams do not interfere.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{self, Mask};
use crate::exactnum::{int, ExtValue, Rational};
use crate::matroid::Matroid;
use crate::poly::LatticeFunction;
use crate::setfn::{
    contract, from_matroid, is_mnat_concave, is_valuated_matroid, murota_extension,
    MatroidFunction, SetFunction, ValuatedMatroid,
};
use crate::trees::{UltrametricTree, UpperSubtree};

pub type GenRng = ChaCha8Rng;

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// The stream for `label` under `seed`.
pub fn stream(seed: u64, label: &str) -> GenRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(label));
    rng
}

/// Cycle matroid of a random multigraph with `edges` edges on `vertices`
/// vertices. Loops appear with small probability.
pub fn graphic_matroid(rng: &mut GenRng, vertices: usize, edges: usize) -> Matroid {
    let list: Vec<(usize, usize)> = (0..edges)
        .map(|_| {
            let u = rng.gen_range(0..vertices);
            let v = if rng.gen_bool(0.05) {
                u
            } else {
                rng.gen_range(0..vertices)
            };
            (u.min(v), u.max(v))
        })
        .collect();
    Matroid::graphic(&list).expect("edge count within the matroid cap")
}

/// A random matroid on `n` elements: uniform or graphic, chosen at random.
pub fn random_matroid(rng: &mut GenRng, n: usize) -> Matroid {
    if rng.gen_bool(0.3) {
        let d = rng.gen_range(0..=n);
        Matroid::uniform(d, n).expect("n within the cap")
    } else {
        let vertices = rng.gen_range(2..=n.max(2) + 1);
        graphic_matroid(rng, vertices, n)
    }
}

/// A random laminar family on `{0..n-1}`, always containing the ground set
/// and every singleton.
pub fn laminar_family(rng: &mut GenRng, n: usize) -> Vec<Mask> {
    fn split(rng: &mut GenRng, set: Vec<usize>, out: &mut Vec<Mask>) {
        out.push(bits::from_elements(set.iter().copied()));
        if set.len() <= 1 {
            return;
        }
        let mut set = set;
        set.shuffle(rng);
        let cut = rng.gen_range(1..set.len());
        let (a, b) = set.split_at(cut);
        split(rng, a.to_vec(), out);
        split(rng, b.to_vec(), out);
    }
    let mut out = Vec::new();
    if n > 0 {
        split(rng, (0..n).collect(), &mut out);
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// A concave integer sequence `φ(0..=len)` with `φ(0) = 0`: increments
/// drawn in `[-span, span]` and sorted decreasingly.
fn concave_sequence(rng: &mut GenRng, len: usize, span: i64) -> Vec<i64> {
    let mut steps: Vec<i64> = (0..len).map(|_| rng.gen_range(-span..=span)).collect();
    steps.sort_unstable_by(|a, b| b.cmp(a));
    std::iter::once(0)
        .chain(steps.iter().scan(0, |acc, s| {
            *acc += s;
            Some(*acc)
        }))
        .collect()
}

/// `ν(S) = Σ_{A ∈ L} φ_A(|S ∩ A|)` for a random laminar family `L` and
/// concave `φ_A`: M♮-concave with full domain.
pub fn laminar_concave(rng: &mut GenRng, n: usize, span: i64) -> SetFunction {
    let family = laminar_family(rng, n);
    let phis: Vec<Vec<i64>> = family
        .iter()
        .map(|&a| concave_sequence(rng, bits::size(a), span))
        .collect();
    SetFunction::from_fn(n, |s| {
        ExtValue::from_int(
            family
                .iter()
                .zip(&phis)
                .map(|(&a, phi)| phi[bits::size(s & a)])
                .sum(),
        )
    })
    .expect("full domain")
}

/// Max-weight matching valuation: `ν(B) = max_σ Σ_r W[r][σ(r)]` over
/// bijections from the rows onto `B`, with `None` entries as `-inf`.
fn transversal_valuation(w: &[Vec<Option<i64>>], b: Mask) -> ExtValue {
    let cols = bits::to_vec(b);
    let d = w.len();
    // DP over subsets of the chosen columns, one row at a time.
    let mut best: Vec<Option<i64>> = vec![None; 1 << d];
    best[0] = Some(0);
    for used in 0..(1usize << d) {
        let Some(cur) = best[used] else { continue };
        let row = used.count_ones() as usize;
        if row == d {
            continue;
        }
        for (c, &col) in cols.iter().enumerate() {
            if used & (1 << c) != 0 {
                continue;
            }
            if let Some(x) = w[row][col] {
                let next = used | 1 << c;
                best[next] = Some(best[next].map_or(cur + x, |v| v.max(cur + x)));
            }
        }
    }
    best[(1 << d) - 1].map_or(ExtValue::NegInfinity, ExtValue::from_int)
}

/// A random integer valuated matroid of rank `d` on `n` elements. Raw random
/// proposals are tried first and kept only if they pass the exchange check;
/// otherwise a max-weight-matching (transversal) valuation is used, which is
/// again confirmed by the exchange check.
pub fn valuated_matroid(rng: &mut GenRng, n: usize, d: usize, span: i64) -> ValuatedMatroid {
    for _ in 0..20 {
        let proposal = ValuatedMatroid::from_fn(n, d, |_| {
            if rng.gen_bool(0.15) {
                ExtValue::NegInfinity
            } else {
                ExtValue::from_int(rng.gen_range(-span..=span))
            }
        });
        if let Ok(v) = proposal {
            if is_valuated_matroid(&v).holds() {
                return v;
            }
        }
    }
    loop {
        let w: Vec<Vec<Option<i64>>> = (0..d)
            .map(|_| {
                (0..n)
                    .map(|_| (!rng.gen_bool(0.2)).then(|| rng.gen_range(-span..=span)))
                    .collect()
            })
            .collect();
        if let Ok(v) = ValuatedMatroid::from_fn(n, d, |b| transversal_valuation(&w, b)) {
            assert!(
                is_valuated_matroid(&v).holds(),
                "max-weight matchings give a valuated matroid"
            );
            return v;
        }
    }
}

pub fn murota(rng: &mut GenRng, n: usize, d: usize, span: i64) -> SetFunction {
    murota_extension(&valuated_matroid(rng, n, d, span))
}

/// Contracts a random element whose singleton lies in the domain.
pub fn random_contraction(rng: &mut GenRng, nu: &SetFunction) -> Option<SetFunction> {
    let candidates: Vec<usize> = (0..nu.ground_size())
        .filter(|&i| nu.value(1 << i).is_finite())
        .collect();
    let &i = candidates.choose(rng)?;
    contract(nu, i).ok()
}

/// Perturbs values of an M♮-concave function until the exchange property
/// fails. Returns the perturbed function.
pub fn non_mnat(rng: &mut GenRng, n: usize, span: i64) -> SetFunction {
    assert!(
        n >= 2,
        "every function on at most one element is M-natural concave"
    );
    loop {
        let base = laminar_concave(rng, n, span);
        let mut values = base.values().to_vec();
        for _ in 0..3 {
            let s = rng.gen_range(0..values.len());
            let bump = rng.gen_range(1..=span.max(1) + 1);
            if let ExtValue::Finite(v) = &values[s] {
                values[s] = ExtValue::Finite(v + int(bump));
            }
            let f = SetFunction::new(n, values.clone()).expect("domain unchanged");
            if !is_mnat_concave(&f).holds() {
                return f;
            }
        }
    }
}

/// Random rational in `{0, 1/den, ..., 1}` times `h`.
fn fraction_of(rng: &mut GenRng, h: &Rational, lo: i64, den: i64) -> Rational {
    h * Rational::new(rng.gen_range(lo..=den).into(), den.into())
}

/// A random radius-1 ultrametric tree with `n_leaves` leaves (ids `0..n`,
/// internal vertices numbered from `n` in creation order), built by
/// recursive random height splitting. With `leaf_positive`, every internal
/// vertex has positive height, so every leaf edge is positive. Needs at
/// least two leaves.
pub fn random_tree(rng: &mut GenRng, n_leaves: usize, leaf_positive: bool) -> UltrametricTree {
    assert!(n_leaves >= 2, "a radius-1 tree needs at least two leaves");
    let mut edges = Vec::new();
    let mut next = n_leaves as u32;
    let root = next;
    next += 1;
    let leaves: Vec<u32> = (0..n_leaves as u32).collect();
    grow(
        rng,
        leaves,
        root,
        int(1),
        leaf_positive,
        &mut next,
        &mut edges,
    );
    UltrametricTree::new(root, &edges).expect("generator builds a valid tree")
}

fn grow(
    rng: &mut GenRng,
    mut leaves: Vec<u32>,
    node: u32,
    height: Rational,
    leaf_positive: bool,
    next: &mut u32,
    edges: &mut Vec<(u32, u32, Rational)>,
) {
    leaves.shuffle(rng);
    let parts = rng.gen_range(2..=leaves.len().min(4));
    let mut cuts: Vec<usize> = (1..leaves.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut groups = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(leaves.len())) {
        groups.push(leaves[start..c].to_vec());
        start = c;
    }
    for g in groups {
        if g.len() == 1 {
            edges.push((node, g[0], height.clone()));
            continue;
        }
        let child = *next;
        *next += 1;
        let h = if leaf_positive {
            fraction_of(rng, &height, 1, 8)
        } else {
            fraction_of(rng, &height, 0, 8)
        };
        edges.push((node, child, &height - &h));
        grow(rng, g, child, h, leaf_positive, next, edges);
    }
}

/// A random ancestor-closed vertex set containing the root.
pub fn random_upper_subtree(rng: &mut GenRng, t: &UltrametricTree) -> UpperSubtree {
    let p = rng.gen_range(0.2..0.9);
    let mut chosen = vec![t.root()];
    for v in 0..t.vertex_count() {
        if rng.gen_bool(p) {
            chosen.push(v);
            chosen.extend(t.ancestors(v));
        }
    }
    chosen.sort_unstable();
    chosen.dedup();
    UpperSubtree::new(t, &chosen).expect("ancestor-closed by construction")
}

/// The `n`-leaf star with unit edges.
pub fn star(n: usize) -> UltrametricTree {
    let edges: Vec<_> = (0..n as u32).map(|i| (n as u32, i, int(1))).collect();
    UltrametricTree::new(n as u32, &edges).expect("star is valid")
}

fn all_lattice_points(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in all_lattice_points(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A laminar convex function on `Δ_n^d`, optionally with upper bounds on
/// coordinates: `ν(α) = Σ_{A ∈ L} ψ_A(α(A))` with convex `ψ_A`.
pub fn laminar_convex_lattice(rng: &mut GenRng, n: usize, d: u32, span: i64) -> LatticeFunction {
    loop {
        let family = laminar_family(rng, n);
        let psis: Vec<Vec<i64>> = family
            .iter()
            .map(|_| {
                concave_sequence(rng, d as usize, span)
                    .into_iter()
                    .map(|v| -v)
                    .collect()
            })
            .collect();
        let caps: Vec<u32> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    rng.gen_range(0..=d)
                } else {
                    d
                }
            })
            .collect();
        let entries: Vec<(Vec<u32>, Rational)> = all_lattice_points(n, d)
            .into_iter()
            .filter(|a| a.iter().zip(&caps).all(|(x, c)| x <= c))
            .map(|a| {
                let v: i64 = family
                    .iter()
                    .zip(&psis)
                    .map(|(&set, psi)| {
                        psi[bits::elements(set).map(|i| a[i] as usize).sum::<usize>()]
                    })
                    .sum();
                (a, int(v))
            })
            .collect();
        if let Ok(f) = LatticeFunction::new(n, d, entries) {
            return f;
        }
    }
}

/// The M♮-concave instance families used by the suites, in a fixed order.
#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub function: SetFunction,
}

/// `count` M♮-concave functions on at most `max_n` elements cycling through
/// matroid indicators, rank functions, Murota extensions, contractions and
/// laminar concave functions.
pub fn mnat_instances(seed: u64, count: usize, max_n: usize) -> Vec<Family> {
    let mut rng = stream(seed, "mnat_instances");
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let n = rng.gen_range(2..=max_n);
        let (kind, f) = match idx % 5 {
            0 => (
                "indicator",
                from_matroid(&random_matroid(&mut rng, n), MatroidFunction::Indicator),
            ),
            1 => (
                "rank",
                from_matroid(&random_matroid(&mut rng, n), MatroidFunction::Rank),
            ),
            2 => {
                let d = rng.gen_range(1..=n);
                ("murota", murota(&mut rng, n, d, 3))
            }
            3 => {
                let m = (n + 1).min(max_n);
                let base = if rng.gen_bool(0.5) {
                    let d = rng.gen_range(1..=m);
                    murota(&mut rng, m, d, 3)
                } else {
                    laminar_concave(&mut rng, m, 3)
                };
                let c = random_contraction(&mut rng, &base).unwrap_or(base);
                ("contraction", c)
            }
            _ => ("laminar", laminar_concave(&mut rng, n, 3)),
        };
        out.push(Family {
            name: format!("{kind}_{idx:03}"),
            function: f,
        });
    }
    out
}

/// Parameters for [`generate`]; which ones are needed depends on the kind.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct GenParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaves: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<i64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub leaf_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("unknown generator {0:?}")]
    UnknownKind(String),
    #[error("generator {kind} needs parameter {param}")]
    MissingParam { kind: String, param: &'static str },
    #[error("{param} = {value} exceeds the cap of {cap}")]
    CapExceeded {
        param: &'static str,
        value: usize,
        cap: usize,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Generator names accepted by [`generate`].
pub const KINDS: &[&str] = &[
    "uniform",
    "graphic",
    "matroid",
    "indicator",
    "rank",
    "valuated",
    "murota",
    "contraction",
    "laminar",
    "non_mnat",
    "tree",
];

/// Largest ground set for generated set functions; the exchange checks
/// behind the generators are quartic in `2^n`.
pub const MAX_GEN_N: usize = 10;
pub const MAX_GEN_LEAVES: usize = 64;

/// One instance of `kind`, determined by `(kind, params, seed)`, with its
/// provenance attached.
pub fn generate(
    kind: &str,
    params: &GenParams,
    seed: u64,
) -> Result<crate::io::InstanceFile, GenError> {
    use crate::io::Instance;
    let need = |v: Option<usize>, param: &'static str| {
        v.ok_or_else(|| GenError::MissingParam {
            kind: kind.into(),
            param,
        })
    };
    let capped = |v: usize, param: &'static str, cap: usize| {
        if v > cap {
            Err(GenError::CapExceeded {
                param,
                value: v,
                cap,
            })
        } else {
            Ok(v)
        }
    };
    let span = params.span.unwrap_or(3).max(0);
    let mut rng = stream(seed, kind);
    let instance = match kind {
        "uniform" => {
            let n = capped(need(params.n, "n")?, "n", crate::matroid::MAX_ELEMENTS)?;
            let d = need(params.d, "d")?;
            if d > n {
                return Err(GenError::Invalid(format!("rank {d} exceeds n = {n}")));
            }
            Instance::Matroid(Matroid::uniform(d, n).map_err(|e| GenError::Invalid(e.to_string()))?)
        }
        "graphic" => {
            let n = capped(need(params.n, "n")?, "n", crate::matroid::MAX_ELEMENTS)?;
            let vertices = params.vertices.unwrap_or(n.max(1) + 1).max(1);
            Instance::Matroid(graphic_matroid(&mut rng, vertices, n))
        }
        "matroid" | "indicator" | "rank" => {
            let n = capped(need(params.n, "n")?, "n", MAX_GEN_N)?;
            let m = random_matroid(&mut rng, n);
            match kind {
                "matroid" => Instance::Matroid(m),
                "indicator" => Instance::SetFunction(from_matroid(&m, MatroidFunction::Indicator)),
                _ => Instance::SetFunction(from_matroid(&m, MatroidFunction::Rank)),
            }
        }
        "valuated" | "murota" => {
            let n = capped(need(params.n, "n")?, "n", MAX_GEN_N)?;
            let d = need(params.d, "d")?;
            if d > n {
                return Err(GenError::Invalid(format!("rank {d} exceeds n = {n}")));
            }
            let v = valuated_matroid(&mut rng, n, d, span);
            if kind == "valuated" {
                Instance::Valuated(v)
            } else {
                Instance::SetFunction(murota_extension(&v))
            }
        }
        "contraction" => {
            let n = capped(need(params.n, "n")?, "n", MAX_GEN_N - 1)?;
            let base = laminar_concave(&mut rng, n + 1, span);
            let c = random_contraction(&mut rng, &base)
                .ok_or_else(|| GenError::Invalid("no contractible element".into()))?;
            Instance::SetFunction(c)
        }
        "laminar" => {
            let n = capped(need(params.n, "n")?, "n", MAX_GEN_N)?;
            Instance::SetFunction(laminar_concave(&mut rng, n, span))
        }
        "non_mnat" => {
            let n = capped(need(params.n, "n")?, "n", MAX_GEN_N)?;
            if n < 2 {
                return Err(GenError::Invalid(
                    "every function on at most one element is M-natural concave".into(),
                ));
            }
            Instance::SetFunction(non_mnat(&mut rng, n, span.max(1)))
        }
        "tree" => {
            let leaves = capped(need(params.leaves, "leaves")?, "leaves", MAX_GEN_LEAVES)?;
            if leaves < 2 {
                return Err(GenError::Invalid("a tree needs at least two leaves".into()));
            }
            Instance::Tree(random_tree(&mut rng, leaves, params.leaf_positive))
        }
        other => return Err(GenError::UnknownKind(other.into())),
    };
    let provenance = serde_json::json!({
        "generator": kind,
        "seed": seed,
        "params": params,
    });
    Ok(crate::io::InstanceFile {
        instance,
        provenance: Some(provenance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::is_mconvex_function;
    use crate::symmat::is_psd;
    use crate::trees::{classify, tree_psd_matrix};

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: Vec<u32> = (0..4).map(|_| stream(7, "x").gen()).collect();
        let b: Vec<u32> = (0..4).map(|_| stream(7, "x").gen()).collect();
        assert_eq!(a, b);
        let mut r1 = stream(7, "x");
        let mut r2 = stream(7, "y");
        assert_ne!(r1.gen::<u64>(), r2.gen::<u64>());
    }

    #[test]
    fn laminar_concave_is_mnat() {
        let mut rng = stream(1, "laminar");
        for n in 1..=5 {
            for _ in 0..5 {
                assert!(is_mnat_concave(&laminar_concave(&mut rng, n, 3)).holds());
            }
        }
    }

    #[test]
    fn valuated_generator_passes_exchange() {
        let mut rng = stream(2, "valuated");
        for _ in 0..10 {
            let n = rng.gen_range(2..=6);
            let d = rng.gen_range(0..=n);
            let v = valuated_matroid(&mut rng, n, d, 3);
            assert!(is_valuated_matroid(&v).holds());
            assert!(is_mnat_concave(&murota_extension(&v)).holds());
        }
    }

    #[test]
    fn non_mnat_generator_fails_exchange() {
        let mut rng = stream(3, "non_mnat");
        for n in 2..=5 {
            assert!(!is_mnat_concave(&non_mnat(&mut rng, n, 2)).holds());
        }
    }

    #[test]
    fn random_trees_are_normalized_and_psd() {
        let mut rng = stream(4, "trees");
        for n in 2..=9 {
            let t = random_tree(&mut rng, n, n % 2 == 0);
            assert_eq!(t.n_leaves(), n);
            assert_eq!(t.radius(), &int(1));
            assert!(is_psd(&tree_psd_matrix(&t)).is_psd());
            if n % 2 == 0 {
                assert!(classify(&t).unwrap().leaf_positive);
            }
        }
    }

    #[test]
    fn laminar_convex_is_mconvex() {
        let mut rng = stream(5, "mconvex");
        for _ in 0..10 {
            let n = rng.gen_range(2..=4);
            let d = rng.gen_range(1..=3);
            assert!(is_mconvex_function(&laminar_convex_lattice(&mut rng, n, d, 3)).holds());
        }
    }

    #[test]
    fn instance_mix_is_mnat() {
        let fams = mnat_instances(11, 25, 5);
        assert_eq!(fams.len(), 25);
        for f in &fams {
            assert!(is_mnat_concave(&f.function).holds(), "{}", f.name);
        }
    }

    #[test]
    fn transversal_valuation_values() {
        let w = vec![
            vec![Some(1), Some(2), None],
            vec![Some(0), Some(5), Some(1)],
        ];
        assert_eq!(transversal_valuation(&w, 0b011), ExtValue::from_int(6));
        assert_eq!(transversal_valuation(&w, 0b101), ExtValue::from_int(2));
        assert_eq!(transversal_valuation(&w, 0b110), ExtValue::from_int(3));
    }

    #[test]
    fn generate_uniform_and_determinism() {
        let p = GenParams {
            n: Some(4),
            d: Some(2),
            ..GenParams::default()
        };
        let f = generate("uniform", &p, 7).unwrap();
        let crate::io::Instance::Matroid(m) = &f.instance else {
            panic!("not a matroid")
        };
        assert_eq!(m.ik_counts(), vec![1, 4, 6, 0, 0]);
        for kind in KINDS {
            let p = GenParams {
                n: Some(4),
                d: Some(2),
                leaves: Some(5),
                ..GenParams::default()
            };
            let a = crate::io::to_canonical_string(&generate(kind, &p, 11).unwrap());
            let b = crate::io::to_canonical_string(&generate(kind, &p, 11).unwrap());
            assert_eq!(a, b, "{kind}");
        }
    }

    #[test]
    fn generated_tree_is_normalized() {
        let p = GenParams {
            leaves: Some(5),
            ..GenParams::default()
        };
        let f = generate("tree", &p, 3).unwrap();
        let crate::io::Instance::Tree(t) = &f.instance else {
            panic!("not a tree")
        };
        assert_eq!(t.n_leaves(), 5);
        assert_eq!(t.radius(), &int(1));
        assert!(crate::trees::UltrametricFn::from_matrix(&t.leaf_distance_matrix()).is_ok());
    }

    #[test]
    fn generate_rejects_bad_params() {
        let p = GenParams::default();
        assert!(matches!(
            generate("uniform", &p, 0),
            Err(GenError::MissingParam { .. })
        ));
        assert!(matches!(
            generate("nope", &p, 0),
            Err(GenError::UnknownKind(_))
        ));
        let big = GenParams {
            n: Some(40),
            ..GenParams::default()
        };
        assert!(matches!(
            generate("laminar", &big, 0),
            Err(GenError::CapExceeded { .. })
        ));
    }
}
