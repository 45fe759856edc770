//! The theorem suites: each claim expands into independent cells over
//! generated (and optionally corpus) instances, and the report lists every
//! cell sorted by key so it does not depend on scheduling.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::exactnum::{
    factorial_q, fmt_rational, int, rat, ExtValue, Mode, NumError, QWeight, Rational,
};
use crate::gen::{self, Family};
use crate::inequalities::{
    check_cor_partition, check_lc4acoeff, check_poly_family, check_poly_ulc, check_qpolynomial,
    check_sequence_family, check_ulc, family_indices, iq_counts, multisets, IneqError, IneqReport,
    UlcStyle,
};
use crate::io::{read_instance, Instance, InstanceFile, IoError};
use crate::matroid::Matroid;
use crate::poly::{
    hessian, is_lorentzian, z_poly, HomogPoly, LorentzianOptions, LorentzianWitness,
};
use crate::setfn::{
    from_matroid, is_mnat_concave, is_valuated_matroid, murota_extension, ultrametric_from,
    MatroidFunction, SetFunction,
};
use crate::symmat::{congruence_rescale, inertia, is_psd, schur_complement, Inertia, SymMatrix};
use crate::trees::{
    a_matrix, angle, c_t, certify_a_psd, classify, shifted_distance_matrix, tree_from_ultrametric,
    tree_psd_matrix, UltrametricTree, UpperSubtree,
};

/// Every claim the suite knows, in run order.
pub const CLAIMS: &[&str] = &[
    "thm_psd",
    "thm_psd_sharp",
    "prop_psd_general",
    "prop_equality_psd",
    "lemma_ultra",
    "thm_qlorentzian",
    "thm_qlorentzian_converse",
    "thm_valuated",
    "thm_qpolynomial",
    "qpoly_family",
    "lc4acoeff",
    "cor_partition",
    "pak_counterexample",
    "footnote2",
    "pipeline",
];

/// `{1, 9/10, 3/4, 1/2, 1/4, 1/10, 1/100}`
pub fn default_q_grid() -> Vec<Rational> {
    vec![
        int(1),
        rat(9, 10),
        rat(3, 4),
        rat(1, 2),
        rat(1, 4),
        rat(1, 10),
        rat(1, 100),
    ]
}

/// Instance counts per claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteSizes {
    pub trees: usize,
    pub tree_pairs: usize,
    pub equality_trees: usize,
    pub mnat: usize,
    pub max_n: usize,
    pub non_mnat: usize,
    pub refinements: usize,
    pub pipelines: usize,
    pub matroids: usize,
    pub max_matroid_n: usize,
    pub lc4a_max_n: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes {
            trees: 200,
            tree_pairs: 200,
            equality_trees: 100,
            mnat: 60,
            max_n: 6,
            non_mnat: 24,
            refinements: 10,
            pipelines: 20,
            matroids: 40,
            max_matroid_n: 10,
            lc4a_max_n: 4,
        }
    }
}

impl SuiteSizes {
    /// No generated instances; only corpus instances are checked.
    pub fn none() -> Self {
        SuiteSizes {
            trees: 0,
            tree_pairs: 0,
            equality_trees: 0,
            mnat: 0,
            non_mnat: 0,
            pipelines: 0,
            matroids: 0,
            ..SuiteSizes::default()
        }
    }

    /// A quick configuration for smoke runs.
    pub fn small() -> Self {
        SuiteSizes {
            trees: 20,
            tree_pairs: 20,
            equality_trees: 10,
            mnat: 10,
            max_n: 4,
            non_mnat: 6,
            refinements: 10,
            pipelines: 5,
            matroids: 8,
            max_matroid_n: 6,
            lc4a_max_n: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub q_grid: Vec<Rational>,
    pub seed: u64,
    /// Bound on `|Δ_n^{d-2}|` in Lorentzian checks.
    pub cap: u64,
    /// Bisection tolerance for `c_T`.
    pub tol: Rational,
    pub claims: Vec<String>,
    pub sizes: SuiteSizes,
    /// Named instances checked alongside the generated ones.
    pub corpus: Vec<(String, InstanceFile)>,
    /// Include the fixed cells (stars, pinned examples, equality cases).
    pub pinned: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Exact,
            q_grid: default_q_grid(),
            seed: 0,
            cap: crate::poly::DEFAULT_CAP,
            tol: crate::trees::default_tolerance(),
            claims: CLAIMS.iter().map(|c| c.to_string()).collect(),
            sizes: SuiteSizes::default(),
            corpus: Vec::new(),
            pinned: true,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown claim {0:?}")]
    UnknownClaim(String),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("{path}: {source}")]
    Corpus { path: String, source: IoError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Failed as expected, with the expected witness.
    Xfail,
    /// Expected to fail but passed.
    Xpass,
    /// Failed as expected but with a different witness.
    WrongWitness,
    /// No failing parameter was found within the search budget.
    Inconclusive,
    /// The check itself raised an error.
    Error,
}

impl Status {
    pub fn is_ok(self) -> bool {
        matches!(self, Status::Pass | Status::Xfail)
    }
}

/// One row of the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub claim: String,
    pub instance: String,
    pub params: BTreeMap<String, Value>,
    pub verdict: bool,
    pub expected: Expect,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<String>,
    pub certifying: bool,
}

impl Cell {
    fn new(claim: &str, instance: &str, params: BTreeMap<String, Value>) -> Self {
        Cell {
            claim: claim.into(),
            instance: instance.into(),
            params,
            verdict: false,
            expected: Expect::Pass,
            status: Status::Error,
            witness: None,
            margin: None,
            certifying: true,
        }
    }

    fn passes(mut self, verdict: bool, witness: Option<Value>) -> Self {
        self.verdict = verdict;
        self.status = if verdict { Status::Pass } else { Status::Fail };
        self.witness = if verdict { None } else { witness };
        self
    }

    fn margin(mut self, m: Option<&Rational>) -> Self {
        self.margin = m.map(fmt_rational);
        self
    }

    fn error(mut self, e: impl std::fmt::Display) -> Self {
        self.verdict = false;
        self.status = Status::Error;
        self.witness = Some(json!({"error": e.to_string()}));
        self
    }

    fn key(&self) -> (String, String, String) {
        (
            self.claim.clone(),
            self.instance.clone(),
            serde_json::to_string(&self.params).unwrap_or_default(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub cells: Vec<Cell>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| !c.status.is_ok())
    }

    pub fn all_ok(&self) -> bool {
        self.failures().next().is_none()
    }

    /// 0 when every cell is ok, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_ok() {
            0
        } else {
            1
        }
    }

    /// The report file: a JSON array of cells, pretty printed.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.cells).expect("cells serialize");
        s.push('\n');
        s
    }

    /// Per-claim `(ok, total)` counts.
    pub fn summary(&self) -> BTreeMap<String, (usize, usize)> {
        let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for c in &self.cells {
            let e = out.entry(c.claim.clone()).or_default();
            e.1 += 1;
            if c.status.is_ok() {
                e.0 += 1;
            }
        }
        out
    }
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn q_value(q: &Rational) -> Value {
    Value::String(fmt_rational(q))
}

/// Instances gathered from a corpus directory.
#[derive(Default)]
struct Corpus {
    trees: Vec<(String, UltrametricTree)>,
    mnat: Vec<Family>,
    non_mnat: Vec<Family>,
    matroids: Vec<(String, Matroid)>,
}

/// Reads every `instances/<kind>/*.json` below `dir`, named
/// `corpus:<kind>/<file stem>`, in path order.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<(String, InstanceFile)>, SuiteError> {
    let root = dir.join("instances");
    let mut files = Vec::new();
    let kinds = std::fs::read_dir(&root).map_err(|source| SuiteError::Corpus {
        path: root.display().to_string(),
        source: IoError::File {
            path: root.display().to_string(),
            source,
        },
    })?;
    for kind in kinds.flatten() {
        if let Ok(entries) = std::fs::read_dir(kind.path()) {
            for e in entries.flatten() {
                let p = e.path();
                if p.extension().is_some_and(|x| x == "json") {
                    files.push(p);
                }
            }
        }
    }
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let name = path
                .strip_prefix(&root)
                .unwrap_or(&path)
                .with_extension("")
                .display()
                .to_string();
            let file = read_instance(&path).map_err(|source| SuiteError::Corpus {
                path: path.display().to_string(),
                source,
            })?;
            Ok((format!("corpus:{name}"), file))
        })
        .collect()
}

fn sort_corpus(files: &[(String, InstanceFile)]) -> Corpus {
    let mut corpus = Corpus::default();
    for (name, file) in files {
        let name = name.clone();
        match &file.instance {
            Instance::Tree(t) => {
                if let Ok(t) = t.normalized() {
                    if t.n_leaves() >= 2 {
                        corpus.trees.push((name, t));
                    }
                }
            }
            Instance::SetFunction(f) => {
                let fam = Family {
                    name,
                    function: f.clone(),
                };
                if is_mnat_concave(&fam.function).holds() {
                    corpus.mnat.push(fam);
                } else if fam.function.ground_size() >= 2 {
                    corpus.non_mnat.push(fam);
                }
            }
            Instance::Valuated(v) => {
                if is_valuated_matroid(v).holds() {
                    corpus.mnat.push(Family {
                        name,
                        function: murota_extension(v),
                    });
                }
            }
            Instance::Matroid(m) => {
                if m.ground_size() <= 6 {
                    for (kind, tag) in [
                        (MatroidFunction::Indicator, "indicator"),
                        (MatroidFunction::Rank, "rank"),
                    ] {
                        corpus.mnat.push(Family {
                            name: format!("{name}:{tag}"),
                            function: from_matroid(m, kind),
                        });
                    }
                }
                corpus.matroids.push((name, m.clone()));
            }
            Instance::Poly(_) => {}
        }
    }
    corpus
}

struct Ctx<'a> {
    config: &'a RunConfig,
    weights: Vec<QWeight>,
    corpus: Corpus,
}

impl Ctx<'_> {
    fn sizes(&self) -> &SuiteSizes {
        &self.config.sizes
    }

    fn rng(&self, label: &str) -> gen::GenRng {
        gen::stream(self.config.seed, label)
    }

    fn lorentzian_opts(&self, w: &QWeight) -> LorentzianOptions {
        LorentzianOptions {
            cap: self.config.cap,
            ..LorentzianOptions::for_weight(w)
        }
    }

    fn mnat(&self) -> Vec<Family> {
        let s = self.sizes();
        let mut out = gen::mnat_instances(self.config.seed, s.mnat, s.max_n);
        out.extend(self.corpus.mnat.iter().cloned());
        out
    }

    /// `(instance, q)` pairs over the M-natural families.
    fn mnat_grid(&self) -> Vec<(Family, QWeight)> {
        let fams = self.mnat();
        fams.iter()
            .flat_map(|f| self.weights.iter().map(move |w| (f.clone(), w.clone())))
            .collect()
    }
}

/// Runs the selected claims and returns the sorted report.
pub fn run_suite(config: &RunConfig) -> Result<Report, SuiteError> {
    for c in &config.claims {
        if !CLAIMS.contains(&c.as_str()) {
            return Err(SuiteError::UnknownClaim(c.clone()));
        }
    }
    let weights = config
        .q_grid
        .iter()
        .map(|q| QWeight::new(q.clone(), config.mode))
        .collect::<Result<Vec<_>, _>>()?;
    let corpus = sort_corpus(&config.corpus);
    let ctx = Ctx {
        config,
        weights,
        corpus,
    };
    let mut cells = Vec::new();
    for claim in CLAIMS {
        if !config.claims.iter().any(|c| c == claim) {
            continue;
        }
        let found = match *claim {
            "thm_psd" => thm_psd(&ctx),
            "thm_psd_sharp" if config.pinned => thm_psd_sharp(&ctx),
            "pak_counterexample" if config.pinned => vec![pak_counterexample()],
            "footnote2" if config.pinned => footnote2(),
            "thm_psd_sharp" | "pak_counterexample" | "footnote2" => Vec::new(),
            "prop_psd_general" => prop_psd_general(&ctx),
            "prop_equality_psd" => prop_equality_psd(&ctx),
            "lemma_ultra" => lemma_ultra(&ctx),
            "thm_qlorentzian" => thm_qlorentzian(&ctx),
            "thm_qlorentzian_converse" => thm_qlorentzian_converse(&ctx),
            "thm_valuated" => thm_valuated(&ctx),
            "thm_qpolynomial" => thm_qpolynomial(&ctx),
            "qpoly_family" => qpoly_family(&ctx),
            "lc4acoeff" => lc4acoeff(&ctx),
            "cor_partition" => cor_partition(&ctx),
            "pipeline" => pipeline(&ctx),
            _ => unreachable!("claim list checked above"),
        };
        cells.extend(found);
    }
    cells.sort_by_cached_key(Cell::key);
    Ok(Report { cells })
}

fn psd_cell(claim: &str, name: &str, t: &UltrametricTree) -> Cell {
    let cell = Cell::new(claim, name, params(&[("n_leaves", json!(t.n_leaves()))]));
    let m = tree_psd_matrix(t);
    let cert = is_psd(&m);
    if !cert.verify(&m) {
        return cell.error("PSD certificate does not replay");
    }
    let witness = cert
        .witness()
        .map(|w| json!(w.iter().map(fmt_rational).collect::<Vec<_>>()));
    cell.passes(cert.is_psd(), witness)
}

fn thm_psd(ctx: &Ctx) -> Vec<Cell> {
    let mut rng = ctx.rng("thm_psd");
    let mut trees: Vec<(String, UltrametricTree)> = (0..ctx.sizes().trees)
        .map(|i| {
            let n = rng.gen_range(2..=10);
            (format!("tree_{i:03}"), gen::random_tree(&mut rng, n, false))
        })
        .collect();
    trees.extend(ctx.corpus.trees.iter().cloned());
    trees
        .par_iter()
        .map(|(name, t)| psd_cell("thm_psd", name, t))
        .collect()
}

fn thm_psd_sharp(ctx: &Ctx) -> Vec<Cell> {
    (2..=10usize)
        .into_par_iter()
        .map(|n| {
            let cell = Cell::new(
                "thm_psd_sharp",
                &format!("star_{n:02}"),
                params(&[("n", json!(n))]),
            );
            let t = gen::star(n);
            let (ct, cls) = match (c_t(&t, &ctx.config.tol), classify(&t)) {
                (Ok(ct), Ok(cls)) => (ct, cls),
                (Err(e), _) | (_, Err(e)) => return cell.error(e),
            };
            let bound = angle(n);
            let ok = ct.exact.as_ref() == Some(&bound) && ct.contains(&bound) && cls.star_metric;
            let witness = json!({"interval": ct, "star_metric": cls.star_metric});
            cell.passes(ok, Some(witness))
        })
        .collect()
}

fn a_psd_cell(name: &str, t: &UltrametricTree, u: &UpperSubtree) -> Cell {
    let cell = Cell::new(
        "prop_psd_general",
        name,
        params(&[
            ("n_leaves", json!(t.n_leaves())),
            ("upper_size", json!(u.vertices().len())),
        ]),
    );
    let a = match a_matrix(t, u) {
        Ok(a) => a,
        Err(e) => return cell.error(e),
    };
    let cert = match certify_a_psd(t, u) {
        Ok(c) => c,
        Err(e) => return cell.error(e),
    };
    let labels: Vec<u32> = a.rows.iter().map(|&v| t.id(v)).collect();
    let replay = cert.verify(&a.matrix, &labels);
    let pivots_ok = cert.pivots().iter().all(|p| !p.is_negative());
    let psd = is_psd(&a.matrix);
    let ok = psd.is_psd() && replay.is_ok() && pivots_ok;
    let witness = json!({
        "psd": psd.is_psd(),
        "replay": replay.err().map(|e| e.to_string()),
        "pivots_nonnegative": pivots_ok,
    });
    cell.passes(ok, Some(witness))
}

fn prop_psd_general(ctx: &Ctx) -> Vec<Cell> {
    let mut rng = ctx.rng("prop_psd_general");
    let mut pairs: Vec<(String, UltrametricTree, UpperSubtree)> = (0..ctx.sizes().tree_pairs)
        .map(|i| {
            let n = rng.gen_range(2..=8);
            let leaf_positive = rng.gen_bool(0.5);
            let t = gen::random_tree(&mut rng, n, leaf_positive);
            let u = gen::random_upper_subtree(&mut rng, &t);
            (format!("pair_{i:03}"), t, u)
        })
        .collect();
    for (name, t) in &ctx.corpus.trees {
        pairs.push((name.clone(), t.clone(), UpperSubtree::whole(t)));
    }
    pairs
        .par_iter()
        .map(|(name, t, u)| a_psd_cell(name, t, u))
        .collect()
}

/// Stars are the only leaf-positive trees attaining the bound, so a
/// fraction of the instances are (possibly subdivided) stars.
fn prop_equality_psd(ctx: &Ctx) -> Vec<Cell> {
    let mut rng = ctx.rng("prop_equality_psd");
    let mut trees: Vec<(String, UltrametricTree)> = (0..ctx.sizes().equality_trees)
        .map(|i| {
            let n = rng.gen_range(2..=8);
            let t = if i % 5 == 0 {
                subdivided_star(&mut rng, n)
            } else {
                gen::random_tree(&mut rng, n, true)
            };
            (format!("tree_{i:03}"), t)
        })
        .collect();
    trees.extend(
        ctx.corpus
            .trees
            .iter()
            .filter(|(_, t)| classify(t).is_ok_and(|c| c.leaf_positive))
            .cloned(),
    );
    trees
        .par_iter()
        .map(|(name, t)| {
            let cell = Cell::new(
                "prop_equality_psd",
                name,
                params(&[("n_leaves", json!(t.n_leaves()))]),
            );
            let (ct, cls) = match (c_t(t, &ctx.config.tol), classify(t)) {
                (Ok(ct), Ok(cls)) => (ct, cls),
                (Err(e), _) | (_, Err(e)) => return cell.error(e),
            };
            let attains = ct.contains(&angle(t.n_leaves()));
            let witness = json!({
                "interval": ct,
                "star_metric": cls.star_metric,
                "leaf_positive": cls.leaf_positive,
            });
            cell.passes(attains == cls.star_metric, Some(witness))
        })
        .collect()
}

/// Unit star whose leaf edges are split at random heights.
fn subdivided_star(rng: &mut gen::GenRng, n: usize) -> UltrametricTree {
    let root = n as u32;
    let mut next = root + 1;
    let mut edges = Vec::new();
    for leaf in 0..n as u32 {
        if rng.gen_bool(0.5) {
            let h = rat(rng.gen_range(1..8), 8);
            edges.push((root, next, Rational::one() - &h));
            edges.push((next, leaf, h));
            next += 1;
        } else {
            edges.push((root, leaf, Rational::one()));
        }
    }
    UltrametricTree::new(root, &edges).expect("star edges form a tree")
}

fn lemma_ultra(ctx: &Ctx) -> Vec<Cell> {
    let jobs: Vec<(Family, QWeight)> = ctx
        .mnat_grid()
        .into_iter()
        .filter(|(f, _)| f.function.first_small_set_outside_domain().is_none())
        .collect();
    jobs.par_iter()
        .map(|(fam, w)| {
            let mut cell = Cell::new("lemma_ultra", &fam.name, params(&[("q", q_value(w.q()))]));
            cell.certifying = w.is_certifying();
            match ultrametric_from(&fam.function, w) {
                Ok(d) => {
                    let n = d.size();
                    let two = int(2) + w.tolerance();
                    let far = (0..n)
                        .flat_map(|i| (0..n).map(move |j| (i, j)))
                        .find(|&(i, j)| d.get(i, j) > &two);
                    let witness = far.map(
                        |(i, j)| json!({"pair": [i, j], "distance": fmt_rational(d.get(i, j))}),
                    );
                    cell.passes(far.is_none(), witness)
                }
                Err(e) => cell.passes(false, Some(json!({"error": e.to_string()}))),
            }
        })
        .collect()
}

fn lorentzian_witness_json(w: &LorentzianWitness) -> Value {
    serde_json::to_value(w).unwrap_or(Value::Null)
}

fn thm_qlorentzian(ctx: &Ctx) -> Vec<Cell> {
    ctx.mnat_grid()
        .par_iter()
        .map(|(fam, w)| {
            let mut cell = Cell::new(
                "thm_qlorentzian",
                &fam.name,
                params(&[("q", q_value(w.q()))]),
            );
            cell.certifying = w.is_certifying();
            let z = match z_poly(&fam.function, w) {
                Ok(z) => z,
                Err(e) => return cell.error(e),
            };
            match is_lorentzian(&z, &ctx.lorentzian_opts(w)) {
                Ok(v) => {
                    let witness = v.witness().map(lorentzian_witness_json);
                    cell.passes(v.holds(), witness)
                }
                Err(e) => cell.error(e),
            }
        })
        .collect()
}

/// `ν(12) = 1`, zero elsewhere on `2^{{1,2}}`.
pub fn pinned_non_mnat() -> SetFunction {
    SetFunction::from_fn(2, |s| ExtValue::from_int((s == 0b11) as i64)).expect("finite values")
}

/// Searches the grid, then `q_min / 10^k` for `k = 1..=refinements`, for a
/// `q` at which `Z_{q,ν}` is not Lorentzian. Returns the cell.
fn converse_cell(ctx: &Ctx, fam: &Family) -> Cell {
    let mut cell = Cell::new("thm_qlorentzian_converse", &fam.name, BTreeMap::new());
    cell.expected = Expect::Fail;
    let q_min = ctx
        .config
        .q_grid
        .iter()
        .min()
        .cloned()
        .unwrap_or_else(Rational::one);
    let refined = (1..=ctx.sizes().refinements as i32)
        .map(|k| &q_min / Rational::from_integer(10.into()).pow(k));
    let candidates: Vec<(usize, Rational)> = ctx
        .config
        .q_grid
        .iter()
        .cloned()
        .map(|q| (0, q))
        .chain(refined.enumerate().map(|(k, q)| (k + 1, q)))
        .collect();
    cell.verdict = true;
    cell.status = Status::Inconclusive;
    for (refinement, q) in candidates {
        let w = match QWeight::new(q.clone(), ctx.config.mode) {
            Ok(w) => w,
            Err(e) => return cell.error(e),
        };
        cell.certifying = w.is_certifying();
        let z = match z_poly(&fam.function, &w) {
            Ok(z) => z,
            Err(e) => return cell.error(e),
        };
        let v = match is_lorentzian(&z, &ctx.lorentzian_opts(&w)) {
            Ok(v) => v,
            Err(e) => return cell.error(e),
        };
        if let Some(wit) = v.witness() {
            cell.params = params(&[("q", q_value(&q)), ("refinements", json!(refinement))]);
            cell.verdict = false;
            cell.witness = Some(lorentzian_witness_json(wit));
            cell.status = if wit.recheck(&z) {
                Status::Xfail
            } else {
                Status::WrongWitness
            };
            return cell;
        }
    }
    let smallest = &q_min / Rational::from_integer(10.into()).pow(ctx.sizes().refinements as i32);
    cell.params = params(&[("q_min_tried", q_value(&smallest))]);
    cell
}

fn thm_qlorentzian_converse(ctx: &Ctx) -> Vec<Cell> {
    let mut rng = ctx.rng("thm_qlorentzian_converse");
    let mut fams = Vec::new();
    if ctx.config.pinned {
        fams.push(Family {
            name: "pinned_nu12".into(),
            function: pinned_non_mnat(),
        });
    }
    for i in 0..ctx.sizes().non_mnat {
        let n = rng.gen_range(2..=ctx.sizes().max_n.clamp(2, 5));
        fams.push(Family {
            name: format!("non_mnat_{i:03}"),
            function: gen::non_mnat(&mut rng, n, 3),
        });
    }
    fams.extend(ctx.corpus.non_mnat.iter().cloned());
    let mut cells: Vec<Cell> = fams.par_iter().map(|f| converse_cell(ctx, f)).collect();
    if ctx.config.pinned {
        cells.push(pinned_converse_cell(ctx.config.mode));
    }
    cells
}

/// The pinned example fails at `q = 1/2` at `α = 0` with inertia (2, 0, 1).
fn pinned_converse_cell(mode: Mode) -> Cell {
    let q = rat(1, 2);
    let mut cell = Cell::new(
        "thm_qlorentzian_converse",
        "pinned_nu12",
        params(&[("q", q_value(&q)), ("pinned", json!(true))]),
    );
    cell.expected = Expect::Fail;
    let w = QWeight::new(q, mode).expect("1/2 is a valid q");
    cell.certifying = w.is_certifying();
    let z = match z_poly(&pinned_non_mnat(), &w) {
        Ok(z) => z,
        Err(e) => return cell.error(e),
    };
    let v = match is_lorentzian(&z, &LorentzianOptions::for_weight(&w)) {
        Ok(v) => v,
        Err(e) => return cell.error(e),
    };
    cell.verdict = v.holds();
    cell.witness = v.witness().map(lorentzian_witness_json);
    let expected = LorentzianWitness::Hessian {
        alpha: vec![0, 0, 0].into(),
        inertia: Inertia::new(2, 0, 1),
    };
    cell.status = match v.witness() {
        None => Status::Xpass,
        Some(wit) if *wit == expected && wit.recheck(&z) => Status::Xfail,
        Some(_) => Status::WrongWitness,
    };
    cell
}

/// Folds per-index reports into one cell: all must hold, the witness is the
/// first failure and the margin the smallest one.
fn fold_reports(mut cell: Cell, reports: Result<Vec<IneqReport>, IneqError>) -> Cell {
    let reports = match reports {
        Ok(r) => r,
        Err(e) => return cell.error(e),
    };
    cell.certifying = reports.iter().all(|r| r.certifying);
    let margin = reports.iter().map(|r| &r.margin).min().cloned();
    let failure = reports.iter().find(|r| !r.verdict).map(|r| {
        json!({"claim": r.claim, "params": r.params, "witness": r.witness, "margin": fmt_rational(&r.margin)})
    });
    cell.passes(failure.is_none(), failure)
        .margin(margin.as_ref())
}

fn thm_valuated(ctx: &Ctx) -> Vec<Cell> {
    let mut cells: Vec<Cell> = ctx
        .mnat_grid()
        .par_iter()
        .map(|(fam, w)| {
            let cell = Cell::new("thm_valuated", &fam.name, params(&[("q", q_value(w.q()))]));
            let n = fam.function.ground_size();
            let reports = iq_counts(&fam.function, w)
                .map(|seq| ulc_with_tolerance(check_ulc(&seq, UlcStyle::M3, n), w))
                .map_err(IneqError::from);
            let mut cell = fold_reports(cell, reports);
            cell.certifying = w.is_certifying();
            cell
        })
        .collect();
    let equality_cases: &[(usize, usize, i64)] = if ctx.config.pinned {
        &[(2, 3, 9), (2, 4, 16)]
    } else {
        &[]
    };
    for &(d, n, expect_k1) in equality_cases {
        let mut cell = Cell::new(
            "thm_valuated",
            &format!("equality_U_{d}_{n}"),
            params(&[("k", json!(1))]),
        );
        let m = Matroid::uniform(d, n).expect("small uniform matroid");
        let seq: Vec<Rational> = m
            .ik_counts()
            .iter()
            .map(|&c| Rational::from_integer(c.into()))
            .collect();
        let r = &check_ulc(&seq, UlcStyle::M3, n)[0];
        let lhs = &seq[1] * &seq[1];
        let ok = r.verdict && r.margin.is_zero() && lhs == int(expect_k1);
        cell.margin = Some(fmt_rational(&r.margin));
        cell = cell.passes(ok, Some(json!({"lhs": fmt_rational(&lhs)})));
        cells.push(cell);
    }
    cells
}

fn ulc_with_tolerance(mut reports: Vec<IneqReport>, w: &QWeight) -> Vec<IneqReport> {
    if !w.is_certifying() {
        let tol = w.tolerance();
        for r in &mut reports {
            r.certifying = false;
            if !r.verdict && r.margin >= -tol.clone() {
                r.verdict = true;
                r.witness = None;
            }
        }
    }
    reports
}

fn thm_qpolynomial(ctx: &Ctx) -> Vec<Cell> {
    ctx.mnat_grid()
        .par_iter()
        .map(|(fam, w)| {
            let cell = Cell::new(
                "thm_qpolynomial",
                &fam.name,
                params(&[("q", q_value(w.q()))]),
            );
            let n = fam.function.ground_size();
            let reports = (1..n)
                .map(|k| check_qpolynomial(&fam.function, w, k))
                .collect();
            fold_reports(cell, reports)
        })
        .collect()
}

fn qpoly_family(ctx: &Ctx) -> Vec<Cell> {
    ctx.mnat_grid()
        .par_iter()
        .map(|(fam, w)| {
            let cell = Cell::new("qpoly_family", &fam.name, params(&[("q", q_value(w.q()))]));
            let n = fam.function.ground_size();
            let reports = family_indices(n)
                .into_iter()
                .map(|idx| check_poly_family(&fam.function, w, idx))
                .collect();
            fold_reports(cell, reports)
        })
        .collect()
}

fn lc4acoeff(ctx: &Ctx) -> Vec<Cell> {
    let max_n = ctx.sizes().lc4a_max_n;
    let jobs: Vec<(Family, QWeight)> = ctx
        .mnat_grid()
        .into_iter()
        .filter(|(f, _)| f.function.ground_size() <= max_n)
        .collect();
    jobs.par_iter()
        .map(|(fam, w)| {
            let cell = Cell::new("lc4acoeff", &fam.name, params(&[("q", q_value(w.q()))]));
            let n = fam.function.ground_size();
            let mut reports = Vec::new();
            for total in 0..=2 * n {
                let tuples: Vec<_> = family_indices(total)
                    .into_iter()
                    .filter(|&(i, _, _, l)| i + l == total)
                    .collect();
                for s in multisets(n, total) {
                    for &t in &tuples {
                        reports.push(check_lc4acoeff(&fam.function, w, &s, t));
                    }
                }
            }
            fold_reports(cell, reports.into_iter().collect())
        })
        .collect()
}

fn cor_partition(ctx: &Ctx) -> Vec<Cell> {
    let mut rng = ctx.rng("cor_partition");
    let max_n = ctx.sizes().max_matroid_n.max(1);
    let mut ms: Vec<(String, Matroid)> = (0..ctx.sizes().matroids)
        .map(|i| {
            let n = 1 + i % max_n;
            (format!("matroid_{i:03}"), gen::random_matroid(&mut rng, n))
        })
        .collect();
    ms.extend(
        ctx.corpus
            .matroids
            .iter()
            .filter(|(_, m)| m.ground_size() <= 10)
            .cloned(),
    );
    let mut cells: Vec<Cell> = ms
        .par_iter()
        .map(|(name, m)| {
            let n = m.ground_size();
            let cell = Cell::new("cor_partition", name, params(&[("n", json!(n))]));
            let reports = family_indices(n)
                .into_iter()
                .filter(|&(i, _, _, l)| i + l == n)
                .map(|t| check_cor_partition(m, t))
                .collect();
            fold_reports(cell, reports)
        })
        .collect();
    if !ctx.config.pinned {
        return cells;
    }
    let u23 = Matroid::uniform(2, 3).expect("U_{2,3}");
    let cell = Cell::new("cor_partition", "pinned_U_2_3", params(&[("n", json!(3))]));
    let (n12, n03) = (u23.n_partitions(1, 2), u23.n_partitions(0, 3));
    let ok = matches!((&n12, &n03), (Ok(3), Ok(0)));
    cells.push(cell.passes(
        ok,
        Some(json!({"N(1,2)": format!("{n12:?}"), "N(0,3)": format!("{n03:?}")})),
    ));
    cells
}

/// Expected-failure cell: passes when `report` fails with exactly the
/// pinned witness.
fn xfail_cell(mut cell: Cell, report: Result<IneqReport, IneqError>, pinned: &Value) -> Cell {
    cell.expected = Expect::Fail;
    let r = match report {
        Ok(r) => r,
        Err(e) => return cell.error(e),
    };
    cell.verdict = r.verdict;
    cell.margin = Some(fmt_rational(&r.margin));
    cell.witness = r.witness.clone();
    cell.status = match &r.witness {
        _ if r.verdict => Status::Xpass,
        Some(w) if w == pinned => Status::Xfail,
        _ => Status::WrongWitness,
    };
    cell
}

/// `(I_1/2)^2 ⪰ I_0 I_2` fails for `U_{2,2}` with difference `(x_1 - x_2)^2 / 4`.
fn pak_counterexample() -> Cell {
    let nu = from_matroid(
        &Matroid::uniform(2, 2).expect("U_{2,2}"),
        MatroidFunction::Indicator,
    );
    let w = QWeight::exact(int(1)).expect("q = 1");
    let cell = Cell::new(
        "pak_counterexample",
        "U_2_2",
        params(&[("k", json!(1)), ("q", json!("1"))]),
    );
    let pinned = json!({"monomial": [1, 1], "coefficient": "-1/2"});
    xfail_cell(cell, check_poly_ulc(&nu, &w, 1), &pinned)
}

/// `x, x + y, x + 7/4 y, 3y`: log-concave locally but not globally.
pub fn footnote2_sequence() -> Vec<HomogPoly> {
    let lin = |a: Rational, b: Rational| {
        HomogPoly::from_terms(2, 1, [(vec![1, 0], a), (vec![0, 1], b)]).expect("linear forms")
    };
    vec![
        lin(int(1), int(0)),
        lin(int(1), int(1)),
        lin(int(1), rat(7, 4)),
        lin(int(0), int(3)),
    ]
}

fn footnote2() -> Vec<Cell> {
    let seq = footnote2_sequence();
    let global = xfail_cell(
        Cell::new(
            "footnote2",
            "sequence",
            params(&[("indices", json!([0, 1, 2, 3]))]),
        ),
        check_sequence_family(&seq, (0, 1, 2, 3), false),
        &json!({"monomial": [1, 1], "coefficient": "-1/4"}),
    );
    let local = fold_reports(
        Cell::new("footnote2", "sequence", params(&[("local", json!(true))])),
        [(0, 1, 1, 2), (1, 2, 2, 3)]
            .into_iter()
            .map(|t| check_sequence_family(&seq, t, false))
            .collect(),
    );
    vec![global, local]
}

/// The matrices of the Lorentzian argument for `Z_{q,ν}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineTrace {
    /// Hessian of `∂_y^{n-2} Z_{q,ν}`.
    pub hessian: SymMatrix,
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub c: SymMatrix,
    /// Leaf distances from the ultrametric of `ν`.
    pub d: SymMatrix,
    pub inertia_a: Inertia,
    pub inertia_b: Inertia,
    /// Named checks, in order.
    pub checks: Vec<(&'static str, bool)>,
}

impl PipelineTrace {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| *n)
            .collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("the pipeline needs at least two elements")]
    TooSmall,
    #[error("a set with at most two elements is outside the domain")]
    SmallSetsOutsideDomain,
    #[error("{0}")]
    Step(String),
}

fn step<E: std::fmt::Display>(e: E) -> PipelineError {
    PipelineError::Step(e.to_string())
}

fn close(a: &SymMatrix, b: &SymMatrix, tol: &Rational) -> bool {
    a.size() == b.size()
        && (0..a.size()).all(|i| (0..a.size()).all(|j| (a.get(i, j) - b.get(i, j)).abs() <= *tol))
}

/// `Z → ∂_y^{n-2} Z → A(ν) → Schur → B(ν) → rescale → C(ν)`, each matrix
/// checked against its closed form, with `C(ν) = -[(1 - 1/n) 𝟙 - D/2]` for
/// the ultrametric `D` of `ν`.
pub fn pipeline_trace(nu: &SetFunction, w: &QWeight) -> Result<PipelineTrace, PipelineError> {
    let n = nu.ground_size();
    if n < 2 {
        return Err(PipelineError::TooSmall);
    }
    if nu.first_small_set_outside_domain().is_some() {
        return Err(PipelineError::SmallSetsOutsideDomain);
    }
    let tol = w.tolerance();
    let wt = |s: u32| w.weight(nu.value(s)).map_err(step);
    let val = |s: u32| {
        nu.value(s)
            .finite()
            .cloned()
            .expect("small sets are finite")
    };
    let single = |i: usize| 1u32 << i;

    let z = z_poly(nu, w).map_err(step)?;
    let mut alpha = vec![0u32; n + 1];
    alpha[n] = (n - 2) as u32;
    let g = z.partial_multi(&alpha);
    let h = hessian(&g);

    // A(ν) = P H P / (n-2)! with P = diag(1, ..., 1, 1/(n-1)).
    let mut p = vec![Rational::one(); n + 1];
    p[n] = Rational::new(1.into(), ((n - 1) as i64).into());
    let a = congruence_rescale(&h, &p)
        .map_err(step)?
        .scale(&factorial_q((n - 2) as u32).recip());
    let nn = Rational::from_integer((n as i64).into());
    let a_formula = SymMatrix::from_fn(n + 1, |i, j| -> Rational {
        match (i == n, j == n) {
            (true, true) => &nn / (&nn - int(1)) * wt(0).unwrap_or_default(),
            (true, false) => wt(single(j)).unwrap_or_default(),
            (false, true) => wt(single(i)).unwrap_or_default(),
            _ if i == j => Rational::zero(),
            _ => wt(single(i) | single(j)).unwrap_or_default(),
        }
    })
    .map_err(step)?;

    let b = schur_complement(&a, &[n]).map_err(step)?;
    let factor = (int(1) - &nn) / &nn;
    let b_formula = SymMatrix::from_fn(n, |i, j| -> Rational {
        let cross = w
            .weight(&ExtValue::Finite(val(single(i)) + val(single(j)) - val(0)))
            .unwrap_or_default();
        if i == j {
            &factor * cross
        } else {
            &factor * cross + wt(single(i) | single(j)).unwrap_or_default()
        }
    })
    .map_err(step)?;

    // C(ν)_ij = q^{ν(i) + ν(j) - ν(∅)} B(ν)_ij.
    let s: Vec<Rational> = (0..n)
        .map(|i| w.weight_pos(&val(single(i))))
        .collect::<Result<_, _>>()
        .map_err(step)?;
    let c = congruence_rescale(&b, &s).map_err(step)?.scale(&wt(0)?);
    let ultra = ultrametric_from(nu, w).map_err(step)?;
    let d = ultra.to_matrix();
    let c_formula = shifted_distance_matrix(&d, &angle(n)).neg();

    let tree = tree_from_ultrametric(&ultra).map_err(step)?;
    let tree_d = tree.leaf_distance_matrix();
    let tree_psd = is_psd(&tree_psd_matrix(&tree)).is_psd();
    let b_nsd = is_psd(&b.neg()).is_psd();
    let c_nsd = is_psd(&c.neg()).is_psd();

    let inertia_a = inertia(&a);
    let inertia_b = inertia(&b);
    let schur_ok =
        inertia_a == Inertia::new(1 + inertia_b.n_pos, inertia_b.n_zero, inertia_b.n_neg);
    let checks = vec![
        ("a_matches_hessian", close(&a, &a_formula, &tol)),
        ("b_matches_formula", close(&b, &b_formula, &tol)),
        ("c_matches_tree_matrix", close(&c, &c_formula, &tol)),
        ("tree_distances_match", close(&tree_d, &d, &tol)),
        ("schur_inertia", schur_ok || !w.is_certifying()),
        ("nsd_chain_consistent", b_nsd == c_nsd && c_nsd == tree_psd),
        ("b_negative_semidefinite", b_nsd || !w.is_certifying()),
    ];
    Ok(PipelineTrace {
        hessian: h,
        a,
        b,
        c,
        d,
        inertia_a,
        inertia_b,
        checks,
    })
}

fn pipeline(ctx: &Ctx) -> Vec<Cell> {
    let seed = ctx.config.seed ^ 0x5049_5045_4c49_4e45;
    let want = ctx.sizes().pipelines;
    let mut fams: Vec<Family> = gen::mnat_instances(seed, want * 6, ctx.sizes().max_n)
        .into_iter()
        .filter(|f| f.function.first_small_set_outside_domain().is_none())
        .take(want)
        .collect();
    fams.extend(
        ctx.corpus
            .mnat
            .iter()
            .filter(|f| {
                f.function.ground_size() >= 2
                    && f.function.first_small_set_outside_domain().is_none()
            })
            .cloned(),
    );
    let jobs: Vec<(Family, QWeight)> = fams
        .iter()
        .flat_map(|f| ctx.weights.iter().map(move |w| (f.clone(), w.clone())))
        .collect();
    jobs.par_iter()
        .map(|(fam, w)| {
            let mut cell = Cell::new("pipeline", &fam.name, params(&[("q", q_value(w.q()))]));
            cell.certifying = w.is_certifying();
            match pipeline_trace(&fam.function, w) {
                Ok(t) => {
                    let witness = json!({
                        "failed_checks": t.failed(),
                        "inertia_a": t.inertia_a,
                        "inertia_b": t.inertia_b,
                    });
                    cell.passes(t.all_hold(), Some(witness))
                }
                Err(e) => cell.error(e),
            }
        })
        .collect()
}
