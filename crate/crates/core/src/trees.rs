//! Ultrametric trees and the positive semidefinite bounds on their leaf
//! distance matrices.
//!
//! Vertices carry caller-chosen integer ids and are stored sorted by id, so
//! "vertex-index order" and "id order" coincide. Leaves are the vertices
//! without children, ordered by id; row `i` of a leaf distance matrix is the
//! `i`-th leaf in that order.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exactnum::{fmt_rational, int, Rational};
use crate::symmat::{is_psd, CongruenceStep, MatrixError, SymMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("vertex {0} has more than one parent")]
    DuplicateParent(u32),
    #[error("the root {0} appears as a child")]
    RootHasParent(u32),
    #[error("edge into vertex {0} has negative length")]
    NegativeLength(u32),
    #[error("vertex {0} is not reachable from the root")]
    Disconnected(u32),
    #[error("leaves {0} and {1} are at different distances from the root")]
    UnequalLeafDepths(u32, u32),
    #[error("tree has radius {0}, expected 1")]
    WrongRadius(String),
    #[error("tree has radius 0 and cannot be normalized")]
    DegenerateRadius,
    #[error("not an upper subtree: {0}")]
    InvalidUpperSubtree(String),
    #[error(
        "distance matrix is not an ultrametric: maximum of triple ({0}, {1}, {2}) is attained once"
    )]
    NotUltrametric(usize, usize, usize),
    #[error("invalid distance function: {0}")]
    InvalidDistance(String),
    #[error("unknown vertex id {0}")]
    UnknownVertex(u32),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrametricTree {
    ids: Vec<u32>,
    parent: Vec<Option<usize>>,
    length: Vec<Rational>,
    children: Vec<Vec<usize>>,
    root: usize,
    depth: Vec<Rational>,
    radius: Rational,
    leaves: Vec<usize>,
}

impl UltrametricTree {
    /// Builds and validates a tree from `(parent, child, length)` edges.
    pub fn new(root_id: u32, edges: &[(u32, u32, Rational)]) -> Result<Self, TreeError> {
        let mut ids: Vec<u32> = edges.iter().flat_map(|(p, c, _)| [*p, *c]).collect();
        ids.push(root_id);
        ids.sort_unstable();
        ids.dedup();
        let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let nv = ids.len();
        let mut parent = vec![None; nv];
        let mut length = vec![Rational::zero(); nv];
        let mut children = vec![Vec::new(); nv];
        for (p, c, len) in edges {
            let (pi, ci) = (index[p], index[c]);
            if *c == root_id {
                return Err(TreeError::RootHasParent(root_id));
            }
            if parent[ci].is_some() {
                return Err(TreeError::DuplicateParent(*c));
            }
            if len.is_negative() {
                return Err(TreeError::NegativeLength(*c));
            }
            parent[ci] = Some(pi);
            length[ci] = len.clone();
            children[pi].push(ci);
        }
        for ch in &mut children {
            ch.sort_unstable();
        }
        let root = index[&root_id];
        let mut depth = vec![None; nv];
        depth[root] = Some(Rational::zero());
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let dv = depth[v].clone().expect("visited vertex has a depth");
            for &c in &children[v] {
                depth[c] = Some(&dv + &length[c]);
                stack.push(c);
            }
        }
        if let Some(v) = (0..nv).find(|&v| depth[v].is_none()) {
            return Err(TreeError::Disconnected(ids[v]));
        }
        let depth: Vec<Rational> = depth
            .into_iter()
            .map(|d| d.expect("checked above"))
            .collect();
        let leaves: Vec<usize> = (0..nv).filter(|&v| children[v].is_empty()).collect();
        let radius = depth[leaves[0]].clone();
        if let Some(&bad) = leaves.iter().find(|&&l| depth[l] != radius) {
            return Err(TreeError::UnequalLeafDepths(ids[leaves[0]], ids[bad]));
        }
        Ok(UltrametricTree {
            ids,
            parent,
            length,
            children,
            root,
            depth,
            radius,
            leaves,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn id(&self, v: usize) -> u32 {
        self.ids[v]
    }

    pub fn index_of(&self, id: u32) -> Result<usize, TreeError> {
        self.ids
            .binary_search(&id)
            .map_err(|_| TreeError::UnknownVertex(id))
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Length of the edge from `v` to its parent (0 for the root).
    pub fn edge_length(&self, v: usize) -> &Rational {
        &self.length[v]
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn depth(&self, v: usize) -> &Rational {
        &self.depth[v]
    }

    /// Distance from `v` to its furthest descendant.
    pub fn height(&self, v: usize) -> Rational {
        &self.radius - &self.depth[v]
    }

    /// Edges `(parent id, child id, length)` ordered by child id.
    pub fn edges(&self) -> Vec<(u32, u32, Rational)> {
        (0..self.vertex_count())
            .filter_map(|v| {
                self.parent[v].map(|p| (self.ids[p], self.ids[v], self.length[v].clone()))
            })
            .collect()
    }

    pub fn ancestors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.parent[v], move |&u| self.parent[u])
    }

    pub fn is_ancestor_or_self(&self, a: usize, v: usize) -> bool {
        a == v || self.ancestors(v).any(|u| u == a)
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let path: Vec<usize> = std::iter::once(a).chain(self.ancestors(a)).collect();
        std::iter::once(b)
            .chain(self.ancestors(b))
            .find(|u| path.contains(u))
            .expect("vertices of one tree share the root")
    }

    /// Number of leaves below each vertex (a leaf counts itself).
    pub fn leaf_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.vertex_count()];
        for &l in &self.leaves {
            counts[l] += 1;
            for a in self.ancestors(l) {
                counts[a] += 1;
            }
        }
        counts
    }

    pub fn leaf_distance_matrix(&self) -> SymMatrix {
        let leaves = &self.leaves;
        SymMatrix::from_fn(leaves.len(), |i, j| {
            if i == j {
                return Rational::zero();
            }
            let (a, b) = (leaves[i], leaves[j]);
            let m = self.lca(a, b);
            &self.depth[a] + &self.depth[b] - &self.depth[m] * int(2)
        })
        .expect("leaf count is within the matrix cap")
    }

    /// The same tree with every edge length multiplied by `c >= 0`.
    pub fn scaled(&self, c: &Rational) -> UltrametricTree {
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(p, ch, l)| (p, ch, l * c))
            .collect();
        UltrametricTree::new(self.ids[self.root], &edges).expect("scaling preserves validity")
    }

    /// Rescales to radius 1.
    pub fn normalized(&self) -> Result<UltrametricTree, TreeError> {
        if self.radius.is_zero() {
            return Err(TreeError::DegenerateRadius);
        }
        Ok(self.scaled(&self.radius.recip()))
    }

    fn require_unit_radius(&self) -> Result<(), TreeError> {
        if self.radius.is_one() {
            Ok(())
        } else {
            Err(TreeError::WrongRadius(fmt_rational(&self.radius)))
        }
    }

    fn max_id(&self) -> u32 {
        *self.ids.last().expect("a tree has at least one vertex")
    }
}

/// A symmetric, nonnegative function on pairs of `{0..n-1}` with zero
/// diagonal. Distinct points may be at distance zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrametricFn {
    n: usize,
    d: Vec<Rational>,
}

impl UltrametricFn {
    /// Validates symmetry, zero diagonal, nonnegativity and the three-point
    /// condition.
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, TreeError> {
        let f = Self::unchecked(rows)?;
        if let Some((i, j, k)) = f.three_point_violation() {
            return Err(TreeError::NotUltrametric(i, j, k));
        }
        Ok(f)
    }

    fn unchecked(rows: Vec<Vec<Rational>>) -> Result<Self, TreeError> {
        let n = rows.len();
        if n == 0 {
            return Err(TreeError::InvalidDistance("empty".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(TreeError::InvalidDistance(format!(
                    "row {i} has length {}",
                    r.len()
                )));
            }
            if !r[i].is_zero() {
                return Err(TreeError::InvalidDistance(format!(
                    "d({i},{i}) is not zero"
                )));
            }
            for (j, v) in r.iter().enumerate() {
                if v.is_negative() {
                    return Err(TreeError::InvalidDistance(format!(
                        "d({i},{j}) is negative"
                    )));
                }
                if rows[j][i] != *v {
                    return Err(TreeError::InvalidDistance(format!(
                        "d({i},{j}) != d({j},{i})"
                    )));
                }
            }
        }
        Ok(UltrametricFn {
            n,
            d: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_matrix(m: &SymMatrix) -> Result<Self, TreeError> {
        Self::new(m.to_rows())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.d[i * self.n + j]
    }

    pub fn to_matrix(&self) -> SymMatrix {
        SymMatrix::from_fn(self.n, |i, j| self.get(i, j).clone()).expect("size within cap")
    }

    /// The lexicographically first triple `i < j < k` whose maximum distance
    /// is attained only once.
    pub fn three_point_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let t = [self.get(i, j), self.get(j, k), self.get(i, k)];
                    let max = t.iter().max().expect("three entries");
                    if t.iter().filter(|v| *v == max).count() < 2 {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    fn diameter_of(&self, class: &[usize]) -> Rational {
        let mut best = Rational::zero();
        for (a, &i) in class.iter().enumerate() {
            for &j in &class[a + 1..] {
                if *self.get(i, j) > best {
                    best = self.get(i, j).clone();
                }
            }
        }
        best
    }
}

/// Single-linkage reconstruction of the ultrametric tree realizing `d`.
///
/// Leaves get ids `0..n`; internal vertices get ids `n, n+1, ..` in preorder.
pub fn tree_from_ultrametric(d: &UltrametricFn) -> Result<UltrametricTree, TreeError> {
    if let Some((i, j, k)) = d.three_point_violation() {
        return Err(TreeError::NotUltrametric(i, j, k));
    }
    let n = d.size();
    if n == 1 {
        return UltrametricTree::new(0, &[]);
    }
    let mut edges = Vec::new();
    let mut next_id = n as u32;
    let root_id = next_id;
    next_id += 1;
    let all: Vec<usize> = (0..n).collect();
    let root_height = d.diameter_of(&all) / int(2);
    grow(d, &all, root_id, &root_height, &mut next_id, &mut edges);
    UltrametricTree::new(root_id, &edges)
}

fn grow(
    d: &UltrametricFn,
    class: &[usize],
    node: u32,
    height: &Rational,
    next_id: &mut u32,
    edges: &mut Vec<(u32, u32, Rational)>,
) {
    let diam = height * int(2);
    if diam.is_zero() {
        for &leaf in class {
            edges.push((node, leaf as u32, Rational::zero()));
        }
        return;
    }
    // Classes of the relation d(i, j) < diam, listed by smallest member.
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &leaf in class {
        match blocks.iter_mut().find(|b| *d.get(b[0], leaf) < diam) {
            Some(b) => b.push(leaf),
            None => blocks.push(vec![leaf]),
        }
    }
    for block in blocks {
        if block.len() == 1 {
            edges.push((node, block[0] as u32, height.clone()));
            continue;
        }
        let child = *next_id;
        *next_id += 1;
        let child_height = d.diameter_of(&block) / int(2);
        edges.push((node, child, height - &child_height));
        grow(d, &block, child, &child_height, next_id, edges);
    }
}

/// Splits every vertex with `k > 2` children into a left comb of `k - 1`
/// binary vertices joined by zero-length edges. New vertices get fresh ids
/// above the current maximum, in order of the vertex being split.
pub fn binarize(t: &UltrametricTree) -> UltrametricTree {
    let mut next_id = t.max_id() + 1;
    let mut edges = Vec::new();
    for v in 0..t.vertex_count() {
        let ch = t.children(v);
        if ch.len() <= 2 {
            for &c in ch {
                edges.push((t.id(v), t.id(c), t.edge_length(c).clone()));
            }
            continue;
        }
        // v -> (w1, c_k), w1 -> (w2, c_{k-1}), ..., w_{k-2} -> (c_1, c_2)
        let k = ch.len();
        let mut top = t.id(v);
        for idx in (2..k).rev() {
            let w = next_id;
            next_id += 1;
            edges.push((top, w, Rational::zero()));
            edges.push((top, t.id(ch[idx]), t.edge_length(ch[idx]).clone()));
            top = w;
        }
        edges.push((top, t.id(ch[0]), t.edge_length(ch[0]).clone()));
        edges.push((top, t.id(ch[1]), t.edge_length(ch[1]).clone()));
    }
    UltrametricTree::new(t.id(t.root()), &edges).expect("binarizing preserves validity")
}

/// A nonempty, ancestor-closed set of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperSubtree {
    members: Vec<bool>,
}

impl UpperSubtree {
    pub fn new(t: &UltrametricTree, vertices: &[usize]) -> Result<Self, TreeError> {
        if vertices.is_empty() {
            return Err(TreeError::InvalidUpperSubtree("empty".into()));
        }
        let mut members = vec![false; t.vertex_count()];
        for &v in vertices {
            if v >= t.vertex_count() {
                return Err(TreeError::InvalidUpperSubtree(format!(
                    "vertex index {v} out of range"
                )));
            }
            members[v] = true;
        }
        for &v in vertices {
            if let Some(a) = t.ancestors(v).find(|&a| !members[a]) {
                return Err(TreeError::InvalidUpperSubtree(format!(
                    "ancestor {} of {} is missing",
                    t.id(a),
                    t.id(v)
                )));
            }
        }
        Ok(UpperSubtree { members })
    }

    pub fn from_ids(t: &UltrametricTree, ids: &[u32]) -> Result<Self, TreeError> {
        let idx = ids
            .iter()
            .map(|&id| t.index_of(id))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(t, &idx)
    }

    pub fn whole(t: &UltrametricTree) -> Self {
        UpperSubtree {
            members: vec![true; t.vertex_count()],
        }
    }

    pub fn root_only(t: &UltrametricTree) -> Self {
        let mut members = vec![false; t.vertex_count()];
        members[t.root()] = true;
        UpperSubtree { members }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.get(v).copied().unwrap_or(false)
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&v| self.members[v])
            .collect()
    }

    /// Members with no child in the set, in index order.
    pub fn minimal(&self, t: &UltrametricTree) -> Vec<usize> {
        self.vertices()
            .into_iter()
            .filter(|&v| !t.children(v).iter().any(|&c| self.members[c]))
            .collect()
    }

    /// The matching upper subtree of `binarize(t)`: original members plus every
    /// comb vertex with a member below it.
    pub fn lift_to_binarized(&self, t: &UltrametricTree, b: &UltrametricTree) -> UpperSubtree {
        let mut members = vec![false; b.vertex_count()];
        for v in self.vertices() {
            let bv = b.index_of(t.id(v)).expect("binarize keeps original ids");
            members[bv] = true;
            for a in b.ancestors(bv) {
                members[a] = true;
            }
        }
        UpperSubtree { members }
    }
}

/// `<a> = 1 - 1/a`.
pub fn angle(a: usize) -> Rational {
    Rational::one() - Rational::new(1.into(), a.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AMatrix {
    pub matrix: SymMatrix,
    /// Vertex indices of the minimal elements, one per row.
    pub rows: Vec<usize>,
    /// Total number of leaves below the minimal elements.
    pub n: usize,
}

/// `A^{T,U}` on the minimal elements `M` of `U`: off-diagonal
/// `<n> - H(i v j)`, diagonal `<n> - <n_i> H(i)`.
pub fn a_matrix(t: &UltrametricTree, u: &UpperSubtree) -> Result<AMatrix, TreeError> {
    t.require_unit_radius()?;
    let rows = u.minimal(t);
    let counts = t.leaf_counts();
    let n: usize = rows.iter().map(|&v| counts[v]).sum();
    let an = angle(n);
    let matrix = SymMatrix::from_fn(rows.len(), |a, b| {
        let (i, j) = (rows[a], rows[b]);
        if a == b {
            &an - angle(counts[i]) * t.height(i)
        } else {
            &an - t.height(t.lca(i, j))
        }
    })?;
    Ok(AMatrix { matrix, rows, n })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ReductionStep {
    /// Case (1): the minimal element `leaf` has no sibling in U; its parent is
    /// removed and the edges `grandparent - parent - leaf` become one edge.
    Contract {
        leaf: u32,
        removed_parent: u32,
        grandparent: u32,
        #[serde(with = "crate::exactnum::serde_rational")]
        new_length: Rational,
    },
    /// Case (2): sibling minimal elements `first`, `second` below `parent`.
    /// Their diagonal entries are lowered by `relax_*` (heights raised to
    /// H(parent)), then row/col `first -= second` and
    /// `second += factor * first` split off `pivot`.
    Merge {
        first: u32,
        second: u32,
        parent: u32,
        #[serde(with = "crate::exactnum::serde_rational")]
        relax_first: Rational,
        #[serde(with = "crate::exactnum::serde_rational")]
        relax_second: Rational,
        #[serde(with = "crate::exactnum::serde_rational")]
        factor: Rational,
        #[serde(with = "crate::exactnum::serde_rational")]
        pivot: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("row labels do not match the certificate")]
    LabelMismatch,
    #[error("step {0} refers to a vertex that is not a current row")]
    UnknownRow(usize),
    #[error("step {0} has a negative relaxation or pivot")]
    Negative(usize),
    #[error("step {0}: pivot or zero pattern does not match")]
    PivotMismatch(usize),
    #[error("final 1x1 entry does not match")]
    BaseMismatch,
    #[error("reconstructed matrix differs from the input")]
    ReconstructionMismatch,
}

/// Record of the inductive PSD argument for `A^{T,U}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionCertificate {
    /// Ids of the rows of `A^{T,U}`, in matrix order.
    pub labels: Vec<u32>,
    /// Number of zero-length comb vertices added by binarization.
    pub binarize_added: usize,
    pub steps: Vec<ReductionStep>,
    pub base_label: u32,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub base_entry: Rational,
}

impl ReductionCertificate {
    /// Merge pivots in order, followed by the final 1x1 entry.
    pub fn pivots(&self) -> Vec<Rational> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                ReductionStep::Merge { pivot, .. } => Some(pivot.clone()),
                ReductionStep::Contract { .. } => None,
            })
            .chain(std::iter::once(self.base_entry.clone()))
            .collect()
    }

    /// Forward replay on `a` (rows labelled by `labels`): applies every
    /// relaxation and congruence and checks the recorded pivots, zero
    /// patterns and final entry.
    pub fn replay(&self, a: &SymMatrix, labels: &[u32]) -> Result<(), ReplayError> {
        if labels != self.labels.as_slice() || a.size() != labels.len() {
            return Err(ReplayError::LabelMismatch);
        }
        let mut cur = a.to_rows();
        let mut lab = labels.to_vec();
        for (k, step) in self.steps.iter().enumerate() {
            let ReductionStep::Merge {
                first,
                second,
                parent,
                relax_first,
                relax_second,
                factor,
                pivot,
            } = step
            else {
                if let ReductionStep::Contract { leaf, .. } = step {
                    if !lab.contains(leaf) {
                        return Err(ReplayError::UnknownRow(k));
                    }
                }
                continue;
            };
            let pi = lab
                .iter()
                .position(|l| l == first)
                .ok_or(ReplayError::UnknownRow(k))?;
            let pj = lab
                .iter()
                .position(|l| l == second)
                .ok_or(ReplayError::UnknownRow(k))?;
            if relax_first.is_negative() || relax_second.is_negative() || pivot.is_negative() {
                return Err(ReplayError::Negative(k));
            }
            cur[pi][pi] -= relax_first;
            cur[pj][pj] -= relax_second;
            CongruenceStep {
                target: pi,
                source: pj,
                factor: -Rational::one(),
            }
            .apply(&mut cur);
            CongruenceStep {
                target: pj,
                source: pi,
                factor: factor.clone(),
            }
            .apply(&mut cur);
            let row_ok = (0..cur.len()).all(|c| {
                if c == pi {
                    cur[pi][c] == *pivot
                } else {
                    cur[pi][c].is_zero()
                }
            });
            if !row_ok {
                return Err(ReplayError::PivotMismatch(k));
            }
            cur.remove(pi);
            for r in &mut cur {
                r.remove(pi);
            }
            lab.remove(pi);
            let pj = lab
                .iter()
                .position(|l| l == second)
                .expect("second row survives");
            lab[pj] = *parent;
        }
        if cur.len() != 1
            || lab[0] != self.base_label
            || cur[0][0] != self.base_entry
            || self.base_entry.is_negative()
        {
            return Err(ReplayError::BaseMismatch);
        }
        Ok(())
    }

    /// Rebuilds `A^{T,U}` from the certificate alone by undoing every step,
    /// starting from the final 1x1 entry.
    pub fn reconstruct(&self) -> SymMatrix {
        let mut cur = vec![vec![self.base_entry.clone()]];
        let mut lab = vec![self.base_label];
        for step in self.steps.iter().rev() {
            let ReductionStep::Merge {
                first,
                second,
                parent,
                relax_first,
                relax_second,
                factor,
                pivot,
            } = step
            else {
                continue;
            };
            let pj = lab
                .iter()
                .position(|l| l == parent)
                .expect("merge parent is a current row");
            lab[pj] = *second;
            for r in &mut cur {
                r.push(Rational::zero());
            }
            let mut new_row = vec![Rational::zero(); cur.len() + 1];
            new_row[cur.len()] = pivot.clone();
            cur.push(new_row);
            lab.push(*first);
            let pi = lab.len() - 1;
            CongruenceStep {
                target: pj,
                source: pi,
                factor: -factor,
            }
            .apply(&mut cur);
            CongruenceStep {
                target: pi,
                source: pj,
                factor: Rational::one(),
            }
            .apply(&mut cur);
            cur[pi][pi] += relax_first;
            cur[pj][pj] += relax_second;
        }
        let order: Vec<usize> = self
            .labels
            .iter()
            .map(|l| {
                lab.iter()
                    .position(|x| x == l)
                    .expect("every label is rebuilt")
            })
            .collect();
        SymMatrix::from_fn(order.len(), |a, b| cur[order[a]][order[b]].clone())
            .expect("size within cap")
    }

    pub fn verify(&self, a: &SymMatrix, labels: &[u32]) -> Result<(), ReplayError> {
        self.replay(a, labels)?;
        if self.reconstruct() != *a {
            return Err(ReplayError::ReconstructionMismatch);
        }
        Ok(())
    }
}

/// Working copy of a binarized tree for the reduction.
struct Reducer {
    ids: Vec<u32>,
    parent: Vec<Option<usize>>,
    length: Vec<Rational>,
    children: Vec<Vec<usize>>,
    height: Vec<Rational>,
    leaf: Vec<bool>,
    in_u: Vec<bool>,
}

impl Reducer {
    fn leaf_count(&self, v: usize) -> usize {
        if self.leaf[v] {
            return 1;
        }
        self.children[v].iter().map(|&c| self.leaf_count(c)).sum()
    }

    fn minimal(&self) -> Vec<usize> {
        (0..self.ids.len())
            .filter(|&v| self.in_u[v] && !self.children[v].iter().any(|&c| self.in_u[c]))
            .collect()
    }
}

/// Runs the inductive argument that `A^{T,U}` is PSD and records it.
pub fn certify_a_psd(
    t: &UltrametricTree,
    u: &UpperSubtree,
) -> Result<ReductionCertificate, TreeError> {
    let a = a_matrix(t, u)?;
    let labels: Vec<u32> = a.rows.iter().map(|&v| t.id(v)).collect();
    let b = binarize(t);
    let ub = u.lift_to_binarized(t, &b);
    let nv = b.vertex_count();
    let mut w = Reducer {
        ids: (0..nv).map(|v| b.id(v)).collect(),
        parent: (0..nv).map(|v| b.parent(v)).collect(),
        length: (0..nv).map(|v| b.edge_length(v).clone()).collect(),
        children: (0..nv).map(|v| b.children(v).to_vec()).collect(),
        height: (0..nv).map(|v| b.height(v)).collect(),
        leaf: (0..nv).map(|v| b.is_leaf(v)).collect(),
        in_u: (0..nv).map(|v| ub.contains(v)).collect(),
    };
    let mut steps = Vec::new();
    loop {
        let m = w.minimal();
        if m.len() == 1 {
            let v = m[0];
            let nv_leaves = w.leaf_count(v);
            let base_entry = angle(nv_leaves) - angle(nv_leaves) * &w.height[v];
            return Ok(ReductionCertificate {
                labels,
                binarize_added: b.vertex_count() - t.vertex_count(),
                steps,
                base_label: w.ids[v],
                base_entry,
            });
        }
        let is_min = |v: usize, m: &[usize]| m.contains(&v);
        // Case (2): a parent whose two children are both minimal.
        let pair = m.iter().find_map(|&i| {
            let h = w.parent[i]?;
            let ch = &w.children[h];
            if ch.len() == 2 && ch.iter().all(|&c| is_min(c, &m)) && ch[0] == i {
                Some((i, ch[1], h))
            } else {
                None
            }
        });
        if let Some((i, j, h)) = pair {
            let (ni, nj) = (w.leaf_count(i), w.leaf_count(j));
            let hh = w.height[h].clone();
            let relax_first = angle(ni) * (&hh - &w.height[i]);
            let relax_second = angle(nj) * (&hh - &w.height[j]);
            let factor = Rational::new(ni.into(), (ni + nj).into());
            let pivot =
                (Rational::new(1.into(), ni.into()) + Rational::new(1.into(), nj.into())) * &hh;
            steps.push(ReductionStep::Merge {
                first: w.ids[i],
                second: w.ids[j],
                parent: w.ids[h],
                relax_first,
                relax_second,
                factor,
                pivot,
            });
            w.in_u[i] = false;
            w.in_u[j] = false;
            continue;
        }
        // Case (1): a minimal element without siblings in U.
        let i = *m
            .iter()
            .find(|&&i| {
                let h = w.parent[i].expect("a non-root minimal element exists when |M| >= 2");
                w.children[h].iter().all(|&c| c == i || !w.in_u[c])
            })
            .expect("one of the two reduction cases applies when |M| >= 2");
        let h = w.parent[i].expect("checked above");
        let g = w.parent[h].expect("parent of a sibling-free minimal element is not the root");
        let new_length = &w.length[h] + &w.length[i];
        steps.push(ReductionStep::Contract {
            leaf: w.ids[i],
            removed_parent: w.ids[h],
            grandparent: w.ids[g],
            new_length: new_length.clone(),
        });
        let pos = w.children[g]
            .iter()
            .position(|&c| c == h)
            .expect("h is a child of g");
        w.children[g][pos] = i;
        w.children[g].sort_unstable();
        w.parent[i] = Some(g);
        w.length[i] = new_length;
        let dropped: Vec<usize> = w.children[h].iter().copied().filter(|&c| c != i).collect();
        let mut stack = dropped;
        while let Some(v) = stack.pop() {
            stack.append(&mut w.children[v]);
            w.leaf[v] = false;
            w.in_u[v] = false;
            w.parent[v] = None;
        }
        w.children[h].clear();
        w.in_u[h] = false;
        w.parent[h] = None;
        w.leaf[h] = false;
    }
}

/// `c * 1 - D/2`.
pub fn shifted_distance_matrix(d: &SymMatrix, c: &Rational) -> SymMatrix {
    SymMatrix::from_fn(d.size(), |i, j| c - d.get(i, j) / int(2)).expect("same size as d")
}

/// `(1 - 1/n) 1 - D/2`, the matrix bounded below by zero for radius-1 trees.
pub fn tree_psd_matrix(t: &UltrametricTree) -> SymMatrix {
    shifted_distance_matrix(&t.leaf_distance_matrix(), &angle(t.n_leaves()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CtInterval {
    #[serde(with = "crate::exactnum::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub hi: Rational,
    /// Set when the value is known exactly.
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub exact: Option<Rational>,
    /// All leaves coincide (`D = 0`); then `c_T = 0`.
    pub degenerate: bool,
}

impl CtInterval {
    pub fn contains(&self, c: &Rational) -> bool {
        self.lo <= *c && *c <= self.hi
    }
}

mod opt_rational {
    use crate::exactnum::{fmt_rational, Rational};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&fmt_rational(r)),
            None => s.serialize_none(),
        }
    }
}

/// Default bisection tolerance for [`c_t`].
pub fn default_tolerance() -> Rational {
    Rational::new(1.into(), 1_000_000_000.into())
}

/// Brackets the smallest `c` with `c * 1 - D/2` PSD by exact bisection on
/// `[0, 1 - 1/n]`.
pub fn c_t(t: &UltrametricTree, tol: &Rational) -> Result<CtInterval, TreeError> {
    t.require_unit_radius()?;
    assert!(tol.is_positive(), "tolerance must be positive");
    let d = t.leaf_distance_matrix();
    let bound = angle(t.n_leaves());
    let psd_at = |c: &Rational| is_psd(&shifted_distance_matrix(&d, c)).is_psd();
    let zero = Rational::zero();
    if psd_at(&zero) {
        return Ok(CtInterval {
            lo: zero.clone(),
            hi: zero.clone(),
            exact: Some(zero),
            degenerate: true,
        });
    }
    let (mut lo, mut hi) = (zero, bound.clone());
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / int(2);
        if psd_at(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let below = &bound - tol;
    let exact = if classify(t)?.star_metric && (below.is_negative() || !psd_at(&below)) {
        Some(bound)
    } else {
        None
    };
    Ok(CtInterval {
        lo,
        hi,
        exact,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub leaf_positive: bool,
    pub star_metric: bool,
}

pub fn classify(t: &UltrametricTree) -> Result<Classification, TreeError> {
    t.require_unit_radius()?;
    let leaf_positive = t
        .leaves()
        .iter()
        .all(|&l| t.parent(l).is_none() || t.edge_length(l).is_positive());
    let leaves = t.leaves();
    let star_metric = leaves.iter().enumerate().all(|(a, &i)| {
        leaves[a + 1..].iter().all(|&j| {
            let h = t.height(t.lca(i, j));
            h.is_zero() || h.is_one()
        })
    });
    Ok(Classification {
        leaf_positive,
        star_metric,
    })
}
