//! The polytopes R_T and R_T(I): vertices, closed-form facets, the hull
//! oracle and the caterpillar / zig-zag order polytope map.

pub mod hull;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{affine_independent_count, rank_i64};
use crate::paths::{enumerate_top_vectors, even_labelings, top_vector_of};
use crate::tree::{enumerate_clusters, neighbor_set, NodeId, OrderIdeal, RootedBinaryTree};

pub use hull::{hull_facets, AffineHull};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    Nonneg,
    Adjacency,
    Cluster,
    CfnLocal,
    RootEquality,
    /// 0 ≤ x ≤ 1 bounds needed only on the 2-leaf tree
    Bound,
    /// x_m + y_m ≤ 1 for a maximal non-root vertex m of I
    TopEdge,
    /// -y_s ≤ 0 on a root edge when the root is the only vertex outside I
    EdgeNonneg,
    /// produced by the hull oracle
    Hull,
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        write!(f, "{}", s.as_str().unwrap())
    }
}

/// coeffs·x ≤ rhs; for `RootEquality` the relation is an equation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Inequality {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
    pub kind: InequalityKind,
}

impl Inequality {
    /// Divide through by the gcd of the coefficients.
    pub fn normalized(mut coeffs: Vec<i64>, mut rhs: i64, kind: InequalityKind) -> Self {
        let g = coeffs.iter().fold(0i64, |g, &x| gcd(g, x.abs()));
        if g > 1 {
            coeffs.iter_mut().for_each(|x| *x /= g);
            rhs = rhs.div_euclid(g);
        }
        Inequality { coeffs, rhs, kind }
    }

    pub fn lhs(&self, x: &[i64]) -> i64 {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn holds(&self, x: &[i64]) -> bool {
        match self.kind {
            InequalityKind::RootEquality => self.lhs(x) == self.rhs,
            _ => self.lhs(x) <= self.rhs,
        }
    }

    pub fn is_equality(&self) -> bool {
        self.kind == InequalityKind::RootEquality
    }

    /// Human form with coordinate names.
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (c, n) in self.coeffs.iter().zip(names) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else { "+" };
            if s.is_empty() {
                if *c < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            if c.abs() != 1 {
                s.push_str(&c.abs().to_string());
            }
            s.push_str(n);
        }
        if s.is_empty() {
            s.push('0');
        }
        let rel = if self.is_equality() { "=" } else { "<=" };
        format!("{s} {rel} {}", self.rhs)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    /// affine dimension
    pub dim: usize,
    pub coords: Vec<String>,
    pub vertices: Vec<Vec<i64>>,
    pub facets: Vec<Inequality>,
}

impl Polytope {
    pub fn ambient(&self) -> usize {
        self.coords.len()
    }

    pub fn to_json(&self) -> Value {
        let facets: Vec<Value> = self
            .facets
            .iter()
            .map(|f| json!({ "coeffs": f.coeffs, "rhs": f.rhs, "kind": f.kind }))
            .collect();
        json!({
            "dim": self.dim,
            "coords": self.coords,
            "vertices": self.vertices,
            "facets": facets,
        })
    }

    /// Check every vertex against every facet.
    pub fn vertices_satisfy_facets(&self) -> bool {
        self.vertices
            .iter()
            .all(|v| self.facets.iter().all(|f| f.holds(v)))
    }
}

fn x_name(i: usize) -> String {
    format!("x{i}")
}

fn y_name(tree: &RootedBinaryTree, v: NodeId) -> String {
    format!("y{}", tree.node_name(v))
}

pub fn build_rt(tree: &RootedBinaryTree) -> Polytope {
    let vertices = enumerate_top_vectors(tree)
        .into_iter()
        .map(|t| t.as_i64())
        .collect();
    Polytope {
        dim: tree.n_interior(),
        coords: (0..tree.n_interior()).map(x_name).collect(),
        vertices,
        facets: facets_corollary(tree),
    }
}

/// Nonnegativity, adjacency and cluster inequalities, in that order.
/// The 2-leaf tree also gets x0 ≤ 1, which no family supplies there.
pub fn facets_corollary(tree: &RootedBinaryTree) -> Vec<Inequality> {
    let d = tree.n_interior();
    let mut out = Vec::new();
    for i in 0..d {
        let mut c = vec![0; d];
        c[i] = -1;
        out.push(Inequality::normalized(c, 0, InequalityKind::Nonneg));
    }
    for (i, j) in tree.interior_edges() {
        let mut c = vec![0; d];
        c[i] = 1;
        c[j] = 1;
        out.push(Inequality::normalized(c, 1, InequalityKind::Adjacency));
    }
    for cl in enumerate_clusters(tree) {
        let mut c = vec![0; d];
        for &m in &cl.members {
            c[m] = 2;
        }
        for &m in &cl.neighbors {
            c[m] = 1;
        }
        out.push(Inequality::normalized(
            c,
            cl.members.len() as i64 + 1,
            InequalityKind::Cluster,
        ));
    }
    if tree.n_leaves() == 2 {
        out.push(Inequality::normalized(vec![1], 1, InequalityKind::Bound));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedCoords {
    /// interior indices of I
    pub x: Vec<usize>,
    /// child endpoints j of the edges e(j) not below I, in preorder
    pub y: Vec<NodeId>,
}

impl MixedCoords {
    pub fn new(tree: &RootedBinaryTree, ideal: &OrderIdeal) -> Self {
        let y = tree
            .preorder()
            .iter()
            .copied()
            .filter(|&v| match tree.parent(v) {
                Some(p) => !ideal.contains(tree.interior_index(p).unwrap()),
                None => false,
            })
            .collect();
        MixedCoords {
            x: ideal.members().to_vec(),
            y,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_pos(&self, i: usize) -> Option<usize> {
        self.x.iter().position(|&k| k == i)
    }

    pub fn y_pos(&self, v: NodeId) -> Option<usize> {
        self.y
            .iter()
            .position(|&k| k == v)
            .map(|p| p + self.x.len())
    }

    pub fn names(&self, tree: &RootedBinaryTree) -> Vec<String> {
        self.x
            .iter()
            .map(|&i| x_name(i))
            .chain(self.y.iter().map(|&v| y_name(tree, v)))
            .collect()
    }
}

/// A point of R_T(I): x over I, y over E(T - I).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MixedPoint {
    pub x: Vec<i64>,
    pub y: Vec<i64>,
}

impl MixedPoint {
    pub fn concat(&self) -> Vec<i64> {
        self.x.iter().chain(&self.y).copied().collect()
    }
}

pub fn mixed_point(tree: &RootedBinaryTree, coords: &MixedCoords, labeling: &[u8]) -> MixedPoint {
    let top = top_vector_of(tree, labeling);
    let mut par = vec![0u8; tree.n_nodes()];
    for &v in tree.preorder().iter().rev() {
        par[v] = match tree.children(v) {
            None => labeling[tree.leaf_position(v).unwrap()],
            Some([a, b]) => par[a] ^ par[b],
        };
    }
    MixedPoint {
        x: coords.x.iter().map(|&i| top.bits[i] as i64).collect(),
        y: coords.y.iter().map(|&v| par[v] as i64).collect(),
    }
}

pub fn build_rti(tree: &RootedBinaryTree, ideal: &OrderIdeal) -> Polytope {
    let coords = MixedCoords::new(tree, ideal);
    let set: BTreeSet<Vec<i64>> = even_labelings(tree.n_leaves())
        .map(|l| mixed_point(tree, &coords, &l.bits).concat())
        .collect();
    let vertices: Vec<Vec<i64>> = set.into_iter().collect();
    let dim = {
        let diffs: Vec<Vec<i64>> = vertices[1..]
            .iter()
            .map(|p| p.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
            .collect();
        rank_i64(&diffs)
    };
    Polytope {
        dim,
        coords: coords.names(tree),
        vertices,
        facets: facets_rti(tree, ideal),
    }
}

/// Root equality first (when the root is outside I), then CFN triples at
/// non-root vertices outside I, nonnegativity and adjacency inside I, and
/// cluster inequalities for clusters contained in I.
pub fn facets_rti(tree: &RootedBinaryTree, ideal: &OrderIdeal) -> Vec<Inequality> {
    let coords = MixedCoords::new(tree, ideal);
    let len = coords.len();
    let mut out = Vec::new();
    let root = tree.root();
    let [s, t] = tree.children(root).unwrap();
    if !ideal.contains(0) {
        let mut c = vec![0; len];
        c[coords.y_pos(s).unwrap()] = 1;
        c[coords.y_pos(t).unwrap()] = -1;
        out.push(Inequality::normalized(c, 0, InequalityKind::RootEquality));
    }
    for (idx, &v) in tree.interior_nodes().iter().enumerate() {
        if idx == 0 || ideal.contains(idx) {
            continue;
        }
        let [a, b] = tree.children(v).unwrap();
        let e = [
            coords.y_pos(v).unwrap(),
            coords.y_pos(a).unwrap(),
            coords.y_pos(b).unwrap(),
        ];
        for k in 0..3 {
            let mut c = vec![0; len];
            for (m, &p) in e.iter().enumerate() {
                c[p] = if m == k { 1 } else { -1 };
            }
            out.push(Inequality::normalized(c, 0, InequalityKind::CfnLocal));
        }
        let mut c = vec![0; len];
        for &p in &e {
            c[p] = 1;
        }
        out.push(Inequality::normalized(c, 2, InequalityKind::CfnLocal));
    }
    for &i in ideal.members() {
        let mut c = vec![0; len];
        c[coords.x_pos(i).unwrap()] = -1;
        out.push(Inequality::normalized(c, 0, InequalityKind::Nonneg));
    }
    for (i, j) in tree.interior_edges() {
        if ideal.contains(i) && ideal.contains(j) {
            let mut c = vec![0; len];
            c[coords.x_pos(i).unwrap()] = 1;
            c[coords.x_pos(j).unwrap()] = 1;
            out.push(Inequality::normalized(c, 1, InequalityKind::Adjacency));
        }
    }
    let within: BTreeSet<usize> = ideal.members().iter().copied().collect();
    for cl in enumerate_clusters(tree) {
        if !cl.members.iter().all(|&m| ideal.contains(m)) {
            continue;
        }
        let members: BTreeSet<usize> = cl.members.iter().copied().collect();
        let mut c = vec![0; len];
        for &m in &cl.members {
            c[coords.x_pos(m).unwrap()] = 2;
        }
        for m in neighbor_set(tree, &members, Some(&within)) {
            c[coords.x_pos(m).unwrap()] = 1;
        }
        let top = cl.max_vertex;
        let maximal = tree.parent_index(top).map_or(true, |p| !ideal.contains(p));
        if maximal {
            c[coords.y_pos(tree.interior_node(top)).unwrap()] = 1;
        }
        out.push(Inequality::normalized(
            c,
            cl.members.len() as i64 + 1,
            InequalityKind::Cluster,
        ));
    }
    if tree.n_leaves() == 2 && ideal.contains(0) {
        out.push(Inequality::normalized(vec![1], 1, InequalityKind::Bound));
    }
    if tree.n_leaves() == 2 && !ideal.contains(0) {
        let mut lo = vec![0; len];
        lo[coords.y_pos(s).unwrap()] = -1;
        out.push(Inequality::normalized(lo, 0, InequalityKind::Bound));
        let mut hi = vec![0; len];
        hi[coords.y_pos(s).unwrap()] = 1;
        out.push(Inequality::normalized(hi, 1, InequalityKind::Bound));
    }
    out
}

/// `facets_rti` plus the two families the hull needs beyond it: x_m + y_m ≤ 1
/// at each maximal non-root m of I, and -y_s ≤ 0 when only the root lies
/// outside I.
pub fn facets_rti_complete(tree: &RootedBinaryTree, ideal: &OrderIdeal) -> Vec<Inequality> {
    let coords = MixedCoords::new(tree, ideal);
    let len = coords.len();
    let mut out = facets_rti(tree, ideal);
    for m in ideal.maximal(tree) {
        if m == 0 {
            continue;
        }
        let mut c = vec![0; len];
        c[coords.x_pos(m).unwrap()] = 1;
        c[coords.y_pos(tree.interior_node(m)).unwrap()] = 1;
        out.push(Inequality::normalized(c, 1, InequalityKind::TopEdge));
    }
    if tree.n_leaves() > 2 && !ideal.contains(0) && ideal.members().len() == tree.n_interior() - 1 {
        let [s, _] = tree.children(tree.root()).unwrap();
        let mut c = vec![0; len];
        c[coords.y_pos(s).unwrap()] = -1;
        out.push(Inequality::normalized(c, 0, InequalityKind::EdgeNonneg));
    }
    out
}

/// Compare a closed-form facet list with the hull of `vertices`, modulo the
/// affine hull. Returns (missing from closed form, extra in closed form).
pub fn compare_with_hull(
    vertices: &[Vec<i64>],
    facets: &[Inequality],
) -> (Vec<(Vec<i64>, i64)>, Vec<(Vec<i64>, i64)>) {
    let h = AffineHull::of(vertices);
    let oracle: BTreeSet<(Vec<i64>, i64)> = hull::facets_in(&h, vertices).into_iter().collect();
    let mut closed = BTreeSet::new();
    let mut extra = Vec::new();
    for f in facets {
        if f.is_equality() {
            // must vanish on the hull
            if h.reduce(&f.coeffs, f.rhs).is_some() || !vertices.iter().all(|v| f.holds(v)) {
                extra.push((f.coeffs.clone(), f.rhs));
            }
            continue;
        }
        match h.reduce(&f.coeffs, f.rhs) {
            Some(r) => {
                closed.insert(r);
            }
            None => extra.push((f.coeffs.clone(), f.rhs)),
        }
    }
    let missing: Vec<_> = oracle.difference(&closed).cloned().collect();
    extra.extend(closed.difference(&oracle).cloned());
    (missing, extra)
}

/// Largest number of affinely independent vertices on which `f` is tight.
pub fn tight_independent(vertices: &[Vec<i64>], f: &Inequality) -> usize {
    let tight: Vec<Vec<i64>> = vertices
        .iter()
        .filter(|v| f.lhs(v) == f.rhs)
        .cloned()
        .collect();
    affine_independent_count(&tight)
}

/// Image of vert R_T(I - {r}) under x_r = (-y_r + y_a + y_b)/2, with y_a, y_b
/// (children of r) dropped. Coordinates follow `MixedCoords` of I.
pub fn project_ideal(
    tree: &RootedBinaryTree,
    ideal: &OrderIdeal,
    r: usize,
) -> Result<Vec<Vec<i64>>> {
    if !ideal.maximal(tree).contains(&r) {
        return Err(Error::NotOrderIdeal(r));
    }
    let smaller = OrderIdeal::new(tree, ideal.members().iter().copied().filter(|&i| i != r))?;
    let from = MixedCoords::new(tree, &smaller);
    let to = MixedCoords::new(tree, ideal);
    let rid = tree.interior_node(r);
    let [a, b] = tree.children(rid).unwrap();
    let src = build_rti(tree, &smaller);
    let mut out = BTreeSet::new();
    for v in &src.vertices {
        let get = |node: NodeId| from.y_pos(node).map(|p| v[p]).unwrap_or(0);
        let yr = if r == 0 { 0 } else { get(rid) };
        let twice = -yr + get(a) + get(b);
        let mut w = vec![0; to.len()];
        for (k, &i) in to.x.iter().enumerate() {
            w[k] = if i == r {
                twice / 2
            } else {
                v[from.x_pos(i).unwrap()]
            };
        }
        for (k, &node) in to.y.iter().enumerate() {
            w[to.x.len() + k] = v[from.y_pos(node).unwrap()];
        }
        out.insert(w);
    }
    Ok(out.into_iter().collect())
}

/// φ(x) = Dx + a with D = diag(1, -1, 1, ...) and a = (0, 1, 0, 1, ...).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub diag: Vec<i64>,
    pub shift: Vec<i64>,
}

impl AffineMap {
    pub fn apply(&self, x: &[i64]) -> Result<Vec<i64>> {
        if x.len() != self.diag.len() {
            return Err(Error::LengthMismatch {
                expected: self.diag.len(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.diag.iter().zip(&self.shift))
            .map(|(v, (d, a))| d * v + a)
            .collect())
    }

    pub fn det(&self) -> i64 {
        self.diag.iter().product()
    }
}

pub fn caterpillar_zigzag_map(n: usize) -> Result<AffineMap> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "dimension",
            value: n,
            range: ">= 1",
        });
    }
    Ok(AffineMap {
        diag: (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect(),
        shift: (0..n).map(|i| (i % 2) as i64).collect(),
    })
}

/// Vertices of the order polytope of the zig-zag poset p1 < p2 > p3 < ...:
/// 0/1 vectors with f_i ≤ f_{i+1} for odd i (1-based) and f_i ≥ f_{i+1} for even i.
pub fn zigzag_order_polytope_vertices(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for k in 0u32..1 << n {
        let f: Vec<i64> = (0..n).map(|i| ((k >> (n - 1 - i)) & 1) as i64).collect();
        let ok = (0..n.saturating_sub(1)).all(|i| {
            if i % 2 == 0 {
                f[i] <= f[i + 1]
            } else {
                f[i] >= f[i + 1]
            }
        });
        if ok {
            out.push(f);
        }
    }
    out
}
