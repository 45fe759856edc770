//! JSON instance files: parsing with positioned errors, format detection
//! and canonical output.
//!
//! Canonical output has sorted keys, sets as increasing element lists sorted
//! by size and then lexicographically, polynomial terms in lex order and
//! rationals in lowest terms. Matroids are always written as their full
//! independent-set family; trees always as edge lists.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bits::{self, Mask};
use crate::exactnum::{fmt_rational, parse_rational, ExtValue, Rational};
use crate::matroid::{Matroid, MatroidError};
use crate::poly::{HomogPoly, PolyError};
use crate::setfn::{SetFnError, SetFunction, ValuatedMatroid};
use crate::trees::{tree_from_ultrametric, TreeError, UltrametricFn, UltrametricTree};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unrecognized instance format (keys: {0})")]
    UnknownFormat(String),
    #[error("set {set:?}: {reason}")]
    BadSet { set: Vec<usize>, reason: String },
    #[error(transparent)]
    SetFn(#[from] SetFnError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the message bare.
        let message = match message.rfind(" at line ") {
            Some(cut) => message[..cut].to_string(),
            None => message,
        };
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    SetFunction(SetFunction),
    Valuated(ValuatedMatroid),
    Matroid(Matroid),
    Tree(UltrametricTree),
    Poly(HomogPoly),
}

impl Instance {
    /// Directory name used in the corpus layout.
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::SetFunction(_) => "setfn",
            Instance::Valuated(_) => "valuated",
            Instance::Matroid(_) => "matroid",
            Instance::Tree(_) => "tree",
            Instance::Poly(_) => "poly",
        }
    }
}

/// An instance with optional provenance (generator, seed, parameters).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub instance: Instance,
    pub provenance: Option<Value>,
}

impl From<Instance> for InstanceFile {
    fn from(instance: Instance) -> Self {
        InstanceFile {
            instance,
            provenance: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    set: Vec<usize>,
    v: ExtValue,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetFn {
    n: usize,
    #[serde(default = "neg_inf")]
    default: ExtValue,
    values: Vec<RawEntry>,
    #[serde(default)]
    provenance: Option<Value>,
}

fn neg_inf() -> ExtValue {
    ExtValue::NegInfinity
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValuated {
    n: usize,
    d: usize,
    values: Vec<RawEntry>,
    #[serde(default)]
    provenance: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatroid {
    n: Option<usize>,
    independent: Option<Vec<Vec<usize>>>,
    uniform_rank: Option<usize>,
    graph_edges: Option<Vec<(usize, usize)>>,
    bases: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    provenance: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTree {
    root: Option<u32>,
    edges: Option<Vec<(u32, u32, String)>>,
    d: Option<Vec<Vec<String>>>,
    #[serde(default)]
    provenance: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    exp: Vec<u32>,
    #[serde(with = "crate::exactnum::serde_rational")]
    c: Rational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoly {
    nvars: usize,
    degree: u32,
    terms: Vec<RawTerm>,
    #[serde(default)]
    provenance: Option<Value>,
}

fn to_mask(set: &[usize], n: usize) -> Result<Mask, IoError> {
    let bad = |reason: &str| IoError::BadSet {
        set: set.to_vec(),
        reason: reason.into(),
    };
    let mut s: Mask = 0;
    for &i in set {
        if i >= n || i >= 32 {
            return Err(bad(&format!("element {i} outside 0..{n}")));
        }
        if bits::contains(s, i) {
            return Err(bad(&format!("element {i} repeated")));
        }
        s |= 1 << i;
    }
    Ok(s)
}

fn entries(values: &[RawEntry], n: usize) -> Result<Vec<(Mask, ExtValue)>, IoError> {
    values
        .iter()
        .map(|e| Ok((to_mask(&e.set, n)?, e.v.clone())))
        .collect()
}

fn masks(sets: &[Vec<usize>], n: usize) -> Result<Vec<Mask>, IoError> {
    sets.iter().map(|s| to_mask(s, n)).collect()
}

fn parse_with<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, IoError> {
    Ok(serde_json::from_str(text)?)
}

/// Parses any recognized instance file.
pub fn parse_instance(text: &str) -> Result<InstanceFile, IoError> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Object(obj) = &value else {
        return Err(IoError::UnknownFormat("not an object".into()));
    };
    let has = |k: &str| obj.contains_key(k);
    if has("terms") {
        let raw: RawPoly = parse_with(text)?;
        let p = HomogPoly::from_terms(
            raw.nvars,
            raw.degree,
            raw.terms.into_iter().map(|t| (t.exp, t.c)),
        )?;
        return Ok(InstanceFile {
            instance: Instance::Poly(p),
            provenance: raw.provenance,
        });
    }
    if has("values") && obj.get("d").is_some_and(Value::is_number) {
        let raw: RawValuated = parse_with(text)?;
        let v = ValuatedMatroid::new(raw.n, raw.d, &entries(&raw.values, raw.n)?)?;
        return Ok(InstanceFile {
            instance: Instance::Valuated(v),
            provenance: raw.provenance,
        });
    }
    if has("values") {
        let raw: RawSetFn = parse_with(text)?;
        if raw.n > crate::setfn::MAX_ELEMENTS {
            return Err(SetFnError::TooLarge(raw.n).into());
        }
        let f = SetFunction::from_entries(raw.n, raw.default, &entries(&raw.values, raw.n)?)?;
        return Ok(InstanceFile {
            instance: Instance::SetFunction(f),
            provenance: raw.provenance,
        });
    }
    if has("edges") || has("d") {
        let raw: RawTree = parse_with(text)?;
        return Ok(InstanceFile {
            instance: Instance::Tree(tree_from_raw(raw.root, raw.edges, raw.d)?),
            provenance: raw.provenance,
        });
    }
    if ["independent", "uniform_rank", "graph_edges", "bases"]
        .iter()
        .any(|k| has(k))
    {
        let raw: RawMatroid = parse_with(text)?;
        let provenance = raw.provenance.clone();
        return Ok(InstanceFile {
            instance: Instance::Matroid(matroid_from_raw(raw)?),
            provenance,
        });
    }
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    Err(IoError::UnknownFormat(keys.join(", ")))
}

fn need_n(n: Option<usize>) -> Result<usize, IoError> {
    n.ok_or_else(|| IoError::UnknownFormat("matroid file without \"n\"".into()))
}

fn matroid_from_raw(raw: RawMatroid) -> Result<Matroid, IoError> {
    let given = [
        raw.independent.is_some(),
        raw.uniform_rank.is_some(),
        raw.graph_edges.is_some(),
        raw.bases.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(IoError::UnknownFormat(
            "matroid file needs exactly one of independent, uniform_rank, graph_edges, bases"
                .into(),
        ));
    }
    if let Some(sets) = raw.independent {
        let n = need_n(raw.n)?;
        if n > crate::matroid::MAX_ELEMENTS {
            return Err(MatroidError::TooLarge(n).into());
        }
        return Ok(Matroid::new(n, &masks(&sets, n)?)?);
    }
    if let Some(d) = raw.uniform_rank {
        let n = need_n(raw.n)?;
        if n > crate::matroid::MAX_ELEMENTS {
            return Err(MatroidError::TooLarge(n).into());
        }
        if d > n {
            return Err(MatroidError::BadSizes { a: d, b: 0, n }.into());
        }
        return Ok(Matroid::uniform(d, n)?);
    }
    if let Some(sets) = raw.bases {
        let n = need_n(raw.n)?;
        if n > crate::matroid::MAX_ELEMENTS {
            return Err(MatroidError::TooLarge(n).into());
        }
        return Ok(Matroid::from_bases(n, &masks(&sets, n)?)?);
    }
    let edges = raw.graph_edges.unwrap_or_default();
    if let Some(n) = raw.n {
        if n != edges.len() {
            return Err(IoError::UnknownFormat(format!(
                "\"n\" is {n} but the graph has {} edges",
                edges.len()
            )));
        }
    }
    Ok(Matroid::graphic(&edges)?)
}

fn rational(s: &str) -> Result<Rational, IoError> {
    parse_rational(s).map_err(|e| IoError::Parse {
        line: 0,
        column: 0,
        message: format!("{s:?}: {e}"),
    })
}

fn tree_from_raw(
    root: Option<u32>,
    edges: Option<Vec<(u32, u32, String)>>,
    d: Option<Vec<Vec<String>>>,
) -> Result<UltrametricTree, IoError> {
    match (root, edges, d) {
        (Some(root), Some(edges), None) => {
            let edges = edges
                .into_iter()
                .map(|(p, c, len)| Ok((p, c, rational(&len)?)))
                .collect::<Result<Vec<_>, IoError>>()?;
            Ok(UltrametricTree::new(root, &edges)?)
        }
        (None, None, Some(rows)) => {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|s| rational(s)).collect())
                .collect::<Result<Vec<Vec<_>>, IoError>>()?;
            Ok(tree_from_ultrametric(&UltrametricFn::new(rows)?)?)
        }
        _ => Err(IoError::UnknownFormat(
            "tree file needs either \"root\" and \"edges\" or \"d\"".into(),
        )),
    }
}

/// Sets sort by size, then lexicographically by element list.
fn set_key(s: Mask) -> (usize, Vec<usize>) {
    (bits::size(s), bits::to_vec(s))
}

fn sorted_sets(mut sets: Vec<Mask>) -> Vec<Mask> {
    sets.sort_by_key(|&s| set_key(s));
    sets
}

fn entry_list<'a>(items: impl Iterator<Item = (Mask, &'a ExtValue)>) -> Value {
    let mut items: Vec<(Mask, &ExtValue)> = items.collect();
    items.sort_by_key(|(s, _)| set_key(*s));
    Value::Array(
        items
            .into_iter()
            .map(|(s, v)| json!({"set": bits::to_vec(s), "v": v.to_string()}))
            .collect(),
    )
}

/// Canonical JSON value; keys come out sorted because `serde_json::Map` is
/// ordered.
pub fn instance_to_value(file: &InstanceFile) -> Value {
    let mut obj = Map::new();
    match &file.instance {
        Instance::SetFunction(f) => {
            let default = if f.values().iter().any(|v| !v.is_finite()) {
                ExtValue::NegInfinity
            } else {
                ExtValue::zero()
            };
            let n = f.ground_size();
            obj.insert("n".into(), json!(n));
            obj.insert("default".into(), json!(default.to_string()));
            obj.insert(
                "values".into(),
                entry_list(
                    (0..=bits::full(n))
                        .map(|s| (s, f.value(s)))
                        .filter(|(_, v)| **v != default),
                ),
            );
        }
        Instance::Valuated(v) => {
            obj.insert("n".into(), json!(v.ground_size()));
            obj.insert("d".into(), json!(v.rank()));
            obj.insert(
                "values".into(),
                entry_list(v.entries().filter(|(_, x)| x.is_finite())),
            );
        }
        Instance::Matroid(m) => {
            obj.insert("n".into(), json!(m.ground_size()));
            let sets = sorted_sets(m.independent_sets().collect());
            obj.insert(
                "independent".into(),
                Value::Array(sets.into_iter().map(|s| json!(bits::to_vec(s))).collect()),
            );
        }
        Instance::Tree(t) => {
            let mut edges = t.edges();
            edges.sort_by_key(|e| (e.0, e.1));
            obj.insert("root".into(), json!(t.id(t.root())));
            obj.insert(
                "edges".into(),
                Value::Array(
                    edges
                        .iter()
                        .map(|(p, c, len)| json!([p, c, fmt_rational(len)]))
                        .collect(),
                ),
            );
        }
        Instance::Poly(p) => {
            obj.insert("nvars".into(), json!(p.nvars()));
            obj.insert("degree".into(), json!(p.degree()));
            obj.insert(
                "terms".into(),
                Value::Array(
                    p.terms()
                        .map(|(e, c)| json!({"exp": e, "c": fmt_rational(c)}))
                        .collect(),
                ),
            );
        }
    }
    if let Some(p) = &file.provenance {
        obj.insert("provenance".into(), p.clone());
    }
    Value::Object(obj)
}

/// Pretty-printed canonical text with a trailing newline.
pub fn to_canonical_string(file: &InstanceFile) -> String {
    to_pretty(&instance_to_value(file))
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn read_instance(path: &std::path::Path) -> Result<InstanceFile, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

/// Reads `path_in` and writes its canonical form to `path_out`.
pub fn convert(path_in: &std::path::Path, path_out: &std::path::Path) -> Result<(), IoError> {
    let file = read_instance(path_in)?;
    std::fs::write(path_out, to_canonical_string(&file)).map_err(|source| IoError::File {
        path: path_out.display().to_string(),
        source,
    })
}
