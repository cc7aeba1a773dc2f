//! Even leaf labelings, systems of disjoint paths and top vectors.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::tree::{NniTriple, NodeId, RootedBinaryTree};

/// Leaf labeling in label order, with even coordinate sum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvenLabeling {
    pub bits: Vec<u8>,
}

impl EvenLabeling {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidTopVector(format!("{bits:?}")));
        }
        if bits.iter().map(|&b| b as usize).sum::<usize>() % 2 == 1 {
            return Err(Error::OddParity);
        }
        Ok(EvenLabeling { bits })
    }
}

impl fmt::Display for EvenLabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// All 2^(n-1) even labelings in lexicographic order.
pub fn even_labelings(n: usize) -> impl Iterator<Item = EvenLabeling> {
    assert!((1..=30).contains(&n), "labeling length out of range");
    (0u64..1 << n).filter_map(move |k| {
        if k.count_ones() % 2 == 1 {
            return None;
        }
        let bits = (0..n).map(|i| ((k >> (n - 1 - i)) & 1) as u8).collect();
        Some(EvenLabeling { bits })
    })
}

/// 0/1 vector over interior nodes in canonical index order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TopVector {
    pub bits: Vec<u8>,
}

impl TopVector {
    pub fn zeros(len: usize) -> Self {
        TopVector { bits: vec![0; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.bits[i] = on as u8;
    }

    pub fn ones(&self) -> Vec<usize> {
        (0..self.bits.len())
            .filter(|&i| self.bits[i] == 1)
            .collect()
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.bits.iter().map(|&b| b as i64).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::InvalidTopVector(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(TopVector { bits })
    }
}

impl fmt::Display for TopVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    /// edges as (parent, child) node ids, from one end leaf up to the apex and down
    pub edges: Vec<(NodeId, NodeId)>,
    pub apex: NodeId,
    pub ends: (NodeId, NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSystem {
    /// edges as (parent, child), sorted
    pub edges: Vec<(NodeId, NodeId)>,
    pub paths: Vec<Path>,
}

impl PathSystem {
    pub fn contains_edge(&self, child: NodeId, tree: &RootedBinaryTree) -> bool {
        match tree.parent(child) {
            Some(p) => self.edges.binary_search(&(p, child)).is_ok(),
            None => false,
        }
    }

    /// Sorted "(parent,child)" strings with interior indices and leaves as L<label>.
    pub fn edge_strings(&self, tree: &RootedBinaryTree) -> Vec<String> {
        let mut v: Vec<String> = self
            .edges
            .iter()
            .map(|&(p, c)| format!("({},{})", tree.node_name(p), tree.node_name(c)))
            .collect();
        v.sort();
        v
    }
}

/// Parity of 1-labelled leaves below each node.
fn parities(tree: &RootedBinaryTree, lab: &[u8]) -> Vec<u8> {
    let mut par = vec![0u8; tree.n_nodes()];
    for &v in tree.preorder().iter().rev() {
        par[v] = match tree.children(v) {
            None => lab[tree.leaf_position(v).unwrap()],
            Some([a, b]) => par[a] ^ par[b],
        };
    }
    par
}

fn check_labeling(tree: &RootedBinaryTree, lab: &EvenLabeling) -> Result<()> {
    if lab.bits.len() != tree.n_leaves() {
        return Err(Error::LengthMismatch {
            expected: tree.n_leaves(),
            got: lab.bits.len(),
        });
    }
    if lab.bits.iter().map(|&b| b as usize).sum::<usize>() % 2 == 1 {
        return Err(Error::OddParity);
    }
    Ok(())
}

pub fn path_system(tree: &RootedBinaryTree, lab: &EvenLabeling) -> Result<PathSystem> {
    check_labeling(tree, lab)?;
    let par = parities(tree, &lab.bits);
    let mut edges: Vec<(NodeId, NodeId)> = tree
        .preorder()
        .iter()
        .filter_map(|&v| tree.parent(v).filter(|_| par[v] == 1).map(|p| (p, v)))
        .collect();
    edges.sort_unstable();
    // descend from an apex child along used edges to the leaf
    let descend = |mut v: NodeId| -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        loop {
            match tree.children(v) {
                None => return out,
                Some([a, b]) => {
                    let next = if par[a] == 1 { a } else { b };
                    out.push((v, next));
                    v = next;
                }
            }
        }
    };
    let mut paths = Vec::new();
    for &v in tree.preorder() {
        if let Some([a, b]) = tree.children(v) {
            if par[a] == 1 && par[b] == 1 {
                let down_a = descend(a);
                let down_b = descend(b);
                let left_end = down_a.last().map_or(a, |e| e.1);
                let right_end = down_b.last().map_or(b, |e| e.1);
                let mut es: Vec<(NodeId, NodeId)> = down_a.into_iter().rev().collect();
                es.push((v, a));
                es.push((v, b));
                es.extend(down_b);
                paths.push(Path {
                    edges: es,
                    apex: v,
                    ends: (left_end, right_end),
                });
            }
        }
    }
    Ok(PathSystem { edges, paths })
}

pub fn top_vector(tree: &RootedBinaryTree, ps: &PathSystem) -> TopVector {
    let mut t = TopVector::zeros(tree.n_interior());
    for p in &ps.paths {
        t.set(tree.interior_index(p.apex).unwrap(), true);
    }
    t
}

/// Top vector of a labeling without materialising the paths.
pub fn top_vector_of(tree: &RootedBinaryTree, lab: &[u8]) -> TopVector {
    let par = parities(tree, lab);
    let mut t = TopVector::zeros(tree.n_interior());
    for (i, &v) in tree.interior_nodes().iter().enumerate() {
        let [a, b] = tree.children(v).unwrap();
        if par[a] == 1 && par[b] == 1 {
            t.set(i, true);
        }
    }
    t
}

/// Vertices of R_T, sorted lexicographically.
pub fn enumerate_top_vectors(tree: &RootedBinaryTree) -> Vec<TopVector> {
    let set: BTreeSet<TopVector> = even_labelings(tree.n_leaves())
        .map(|l| top_vector_of(tree, &l.bits))
        .collect();
    set.into_iter().collect()
}

fn check_len(tree: &RootedBinaryTree, v: &TopVector) -> Result<()> {
    if v.len() != tree.n_interior() {
        return Err(Error::LengthMismatch {
            expected: tree.n_interior(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Bottom-up: a node is free if some descent to a leaf avoids the top set.
/// A top node needs both children free and is itself not free.
fn free_map(tree: &RootedBinaryTree, v: &TopVector) -> Option<Vec<bool>> {
    let mut free = vec![true; tree.n_nodes()];
    for &x in tree.preorder().iter().rev() {
        if let Some([a, b]) = tree.children(x) {
            let i = tree.interior_index(x).unwrap();
            if v.get(i) {
                if !(free[a] && free[b]) {
                    return None;
                }
                free[x] = false;
            } else {
                free[x] = free[a] || free[b];
            }
        }
    }
    Some(free)
}

pub fn is_valid_top_vector(tree: &RootedBinaryTree, v: &TopVector) -> Result<bool> {
    check_len(tree, v)?;
    Ok(free_map(tree, v).is_some())
}

/// A labeling realising a valid top vector: every top node sends one path
/// down each side along free nodes.
pub fn realize(tree: &RootedBinaryTree, v: &TopVector) -> Result<EvenLabeling> {
    check_len(tree, v)?;
    let free = free_map(tree, v).ok_or_else(|| Error::InvalidTopVector(v.to_string()))?;
    let mut bits = vec![0u8; tree.n_leaves()];
    let go_down = |mut x: NodeId, bits: &mut Vec<u8>| loop {
        match tree.children(x) {
            None => {
                bits[tree.leaf_position(x).unwrap()] = 1;
                return;
            }
            Some([a, b]) => x = if free[a] { a } else { b },
        }
    };
    for i in v.ones() {
        let [a, b] = tree.children(tree.interior_node(i)).unwrap();
        go_down(a, &mut bits);
        go_down(b, &mut bits);
    }
    Ok(EvenLabeling { bits })
}

/// Every descent from x to a leaf meets the top set. Leaves are never blocked.
pub fn is_blocked(tree: &RootedBinaryTree, topset: &TopVector, x: NodeId) -> bool {
    match tree.children(x) {
        None => false,
        Some([a, b]) => {
            topset.get(tree.interior_index(x).unwrap())
                || (is_blocked(tree, topset, a) && is_blocked(tree, topset, b))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Traversability {
    pub root_leaf_traversable: bool,
    pub root_augmentable: bool,
}

pub fn traversability(tree: &RootedBinaryTree, topset: &TopVector) -> Result<Traversability> {
    check_len(tree, topset)?;
    let root_leaf_traversable = !is_blocked(tree, topset, tree.root());
    let root_augmentable = !topset.get(0) && {
        let mut w = topset.clone();
        w.set(0, true);
        free_map(tree, &w).is_some()
    };
    Ok(Traversability {
        root_leaf_traversable,
        root_augmentable,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Maintaining {
    pub maintaining: bool,
    /// image in the interior ordering of T'
    pub image: TopVector,
}

/// Transport a vector indexed by interior nodes of `from` to the indexing of `to`
/// (same node ids).
pub fn reindex(v: &TopVector, from: &RootedBinaryTree, to: &RootedBinaryTree) -> TopVector {
    let mut out = TopVector::zeros(to.n_interior());
    for j in 0..to.n_interior() {
        let id = to.interior_node(j);
        out.bits[j] = v.bits[from.interior_index(id).expect("shared interior node")];
    }
    out
}

pub fn classify_maintaining(
    t: &RootedBinaryTree,
    t2: &RootedBinaryTree,
    triple: NniTriple,
    v: &TopVector,
) -> Result<Maintaining> {
    triple.validate(t)?;
    if !is_valid_top_vector(t, v)? {
        return Err(Error::InvalidTopVector(v.to_string()));
    }
    let bi = t.interior_index(triple.b).unwrap();
    let ci = t.interior_index(triple.c).unwrap();
    let maintaining = if v.get(bi) {
        !is_blocked(t, v, triple.d(t))
    } else if v.get(ci) {
        !is_blocked(t, v, triple.f(t))
    } else {
        true
    };
    let mut w = v.clone();
    if !maintaining {
        w.bits.swap(bi, ci);
    }
    Ok(Maintaining {
        maintaining,
        image: reindex(&w, t, t2),
    })
}
