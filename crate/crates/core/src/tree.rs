//! Rooted binary trees with canonical interior indexing.
//!
//! Children are ordered by the smallest leaf label below them, and interior
//! nodes are numbered in preorder (root = 0, left before right). Every vector
//! indexed by interior nodes elsewhere in the crate uses this numbering.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub children: Option<[NodeId; 2]>,
    pub label: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct RootedBinaryTree {
    nodes: Vec<Node>,
    root: NodeId,
    /// interior index -> node id
    interior: Vec<NodeId>,
    interior_index: Vec<Option<usize>>,
    /// leaves sorted by label
    leaves: Vec<NodeId>,
    leaf_pos: Vec<Option<usize>>,
    preorder: Vec<NodeId>,
    min_label: Vec<u32>,
}

impl PartialEq for RootedBinaryTree {
    fn eq(&self, other: &Self) -> bool {
        self.to_newick() == other.to_newick()
    }
}

impl Eq for RootedBinaryTree {}

/// Recursive description used to assemble new trees.
#[derive(Clone, Debug)]
pub(crate) enum Build {
    Leaf(Option<u32>),
    Node(Option<NodeId>, Box<Build>, Box<Build>),
}

impl RootedBinaryTree {
    fn from_arena(mut nodes: Vec<Node>, root: NodeId) -> Result<Self> {
        let n = nodes.len();
        // postorder pass for min labels
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            if let Some([a, b]) = nodes[v].children {
                stack.push(a);
                stack.push(b);
            }
        }
        if order.len() != n {
            return Err(Error::Syntax {
                pos: 0,
                msg: "arena contains unreachable nodes".into(),
            });
        }
        let mut min_label = vec![u32::MAX; n];
        for &v in order.iter().rev() {
            match nodes[v].children {
                Some([a, b]) => {
                    if min_label[b] < min_label[a] {
                        nodes[v].children = Some([b, a]);
                    }
                    min_label[v] = min_label[a].min(min_label[b]);
                }
                None => {
                    min_label[v] = nodes[v].label.ok_or_else(|| Error::Syntax {
                        pos: 0,
                        msg: "unlabeled leaf".into(),
                    })?;
                }
            }
        }
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            preorder.push(v);
            if let Some([a, b]) = nodes[v].children {
                stack.push(b);
                stack.push(a);
            }
        }
        let mut interior = Vec::new();
        let mut interior_index = vec![None; n];
        for &v in &preorder {
            if nodes[v].children.is_some() {
                interior_index[v] = Some(interior.len());
                interior.push(v);
            }
        }
        let mut leaves: Vec<NodeId> = (0..n).filter(|&v| nodes[v].children.is_none()).collect();
        leaves.sort_by_key(|&v| nodes[v].label);
        for w in leaves.windows(2) {
            if nodes[w[0]].label == nodes[w[1]].label {
                return Err(Error::DuplicateLabel(nodes[w[0]].label.unwrap_or(0)));
            }
        }
        if leaves.len() < 2 {
            return Err(Error::OutOfRange {
                what: "leaf count",
                value: leaves.len(),
                range: ">= 2",
            });
        }
        let mut leaf_pos = vec![None; n];
        for (i, &v) in leaves.iter().enumerate() {
            leaf_pos[v] = Some(i);
        }
        Ok(RootedBinaryTree {
            nodes,
            root,
            interior,
            interior_index,
            leaves,
            leaf_pos,
            preorder,
            min_label,
        })
    }

    /// Assemble a tree, labelling unlabeled leaves 1.. left to right.
    /// Returns the tree and, for each new interior index, the origin tag.
    pub(crate) fn from_build(b: &Build) -> Result<(Self, Vec<Option<NodeId>>)> {
        fn go(
            b: &Build,
            parent: Option<NodeId>,
            nodes: &mut Vec<Node>,
            origin: &mut Vec<Option<NodeId>>,
            next: &mut u32,
        ) -> NodeId {
            let id = nodes.len();
            nodes.push(Node {
                parent,
                children: None,
                label: None,
            });
            origin.push(None);
            match b {
                Build::Leaf(l) => {
                    let lab = l.unwrap_or_else(|| {
                        *next += 1;
                        *next
                    });
                    nodes[id].label = Some(lab);
                }
                Build::Node(o, l, r) => {
                    origin[id] = *o;
                    let a = go(l, Some(id), nodes, origin, next);
                    let c = go(r, Some(id), nodes, origin, next);
                    nodes[id].children = Some([a, c]);
                }
            }
            id
        }
        let mut nodes = Vec::new();
        let mut origin = Vec::new();
        let mut next = 0;
        go(b, None, &mut nodes, &mut origin, &mut next);
        let t = Self::from_arena(nodes, 0)?;
        let map = t.interior.iter().map(|&v| origin[v]).collect();
        Ok((t, map))
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn n_edges(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, v: NodeId) -> &Node {
        &self.nodes[v]
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v].children.is_none()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v].parent
    }

    pub fn children(&self, v: NodeId) -> Option<[NodeId; 2]> {
        self.nodes[v].children
    }

    pub fn label(&self, v: NodeId) -> Option<u32> {
        self.nodes[v].label
    }

    /// Node ids of all nodes in preorder.
    pub fn preorder(&self) -> &[NodeId] {
        &self.preorder
    }

    /// Interior node ids ordered by interior index.
    pub fn interior_nodes(&self) -> &[NodeId] {
        &self.interior
    }

    pub fn interior_node(&self, i: usize) -> NodeId {
        self.interior[i]
    }

    pub fn interior_index(&self, v: NodeId) -> Option<usize> {
        self.interior_index[v]
    }

    /// Leaf ids sorted by label.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    /// Position of a leaf in label order.
    pub fn leaf_position(&self, v: NodeId) -> Option<usize> {
        self.leaf_pos[v]
    }

    pub fn min_label(&self, v: NodeId) -> u32 {
        self.min_label[v]
    }

    pub fn sibling(&self, v: NodeId) -> Option<NodeId> {
        let p = self.nodes[v].parent?;
        let [a, b] = self.nodes[p].children?;
        Some(if a == v { b } else { a })
    }

    /// Interior index of the parent of interior node `i`.
    pub fn parent_index(&self, i: usize) -> Option<usize> {
        self.parent(self.interior[i])
            .and_then(|p| self.interior_index[p])
    }

    /// Interior indices of the interior children of interior node `i`.
    pub fn interior_children(&self, i: usize) -> Vec<usize> {
        match self.children(self.interior[i]) {
            Some(cs) => cs.iter().filter_map(|&c| self.interior_index[c]).collect(),
            None => Vec::new(),
        }
    }

    /// Interior neighbours of interior node `i`, i.e. parent and interior children.
    pub fn interior_neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.parent_index(i).into_iter().collect();
        out.extend(self.interior_children(i));
        out.sort_unstable();
        out
    }

    /// Unordered pairs (i, j), i < j, of adjacent interior nodes.
    pub fn interior_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n_interior() {
            if let Some(p) = self.parent_index(i) {
                out.push((p.min(i), p.max(i)));
            }
        }
        out.sort_unstable();
        out
    }

    /// True if `a` lies strictly below `b`.
    pub fn is_descendant(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = self.nodes[a].parent;
        while let Some(p) = cur {
            if p == b {
                return true;
            }
            cur = self.nodes[p].parent;
        }
        false
    }

    /// Number of leaves below (or equal to) `v`.
    pub fn leaf_count(&self, v: NodeId) -> usize {
        match self.children(v) {
            None => 1,
            Some([a, b]) => self.leaf_count(a) + self.leaf_count(b),
        }
    }

    /// Display name: interior nodes by index, leaves as `L<label>`.
    pub fn node_name(&self, v: NodeId) -> String {
        match self.interior_index[v] {
            Some(i) => i.to_string(),
            None => format!("L{}", self.nodes[v].label.unwrap_or(0)),
        }
    }

    pub fn to_newick(&self) -> String {
        fn go(t: &RootedBinaryTree, v: NodeId, out: &mut String) {
            match t.children(v) {
                None => out.push_str(&t.nodes[v].label.unwrap_or(0).to_string()),
                Some([a, b]) => {
                    out.push('(');
                    go(t, a, out);
                    out.push(',');
                    go(t, b, out);
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(self, self.root, &mut s);
        s.push(';');
        s
    }

    /// Label-free canonical form; two trees have the same shape iff keys match.
    pub fn shape_key(&self) -> String {
        fn go(t: &RootedBinaryTree, v: NodeId) -> String {
            match t.children(v) {
                None => "*".into(),
                Some([a, b]) => {
                    let (x, y) = (go(t, a), go(t, b));
                    if x <= y {
                        format!("({x},{y})")
                    } else {
                        format!("({y},{x})")
                    }
                }
            }
        }
        go(self, self.root)
    }

    pub fn to_json(&self) -> Value {
        let interior: Vec<Value> = (0..self.n_interior())
            .map(|i| {
                let v = self.interior[i];
                let children: Vec<Value> = self
                    .children(v)
                    .unwrap()
                    .iter()
                    .map(|&c| match self.interior_index[c] {
                        Some(j) => json!({ "interior": j }),
                        None => json!({ "leaf": self.nodes[c].label }),
                    })
                    .collect();
                json!({ "index": i, "parent": self.parent_index(i), "children": children })
            })
            .collect();
        json!({ "n_leaves": self.n_leaves(), "interior": interior })
    }

    pub(crate) fn to_build(&self, v: NodeId) -> Build {
        match self.children(v) {
            None => Build::Leaf(None),
            Some([a, b]) => Build::Node(
                Some(v),
                Box::new(self.to_build(a)),
                Box::new(self.to_build(b)),
            ),
        }
    }

    /// Caterpillar ((((1,2),3),...),n).
    pub fn caterpillar(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfRange {
                what: "leaf count",
                value: n,
                range: ">= 2",
            });
        }
        let mut s = "1".to_string();
        for k in 2..=n {
            s = format!("({s},{k})");
        }
        s.push(';');
        parse_newick(&s)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    nodes: Vec<Node>,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn token(&mut self) -> (usize, String) {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if b"(),;:".contains(&c) || c.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        (
            start,
            String::from_utf8_lossy(&self.s[start..self.pos]).into_owned(),
        )
    }

    fn no_branch_length(&mut self) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(b':') {
            return Err(Error::Syntax {
                pos: self.pos,
                msg: "branch lengths are not supported".into(),
            });
        }
        Ok(())
    }

    fn subtree(&mut self) -> Result<NodeId> {
        self.skip_ws();
        let open = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let mut kids = vec![self.subtree()?];
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            kids.push(self.subtree()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) => {
                            return Err(Error::Syntax {
                                pos: self.pos,
                                msg: format!("expected ',' or ')', found {:?}", c as char),
                            })
                        }
                        None => {
                            return Err(Error::Syntax {
                                pos: self.pos,
                                msg: "unexpected end of input".into(),
                            })
                        }
                    }
                }
                if kids.len() != 2 {
                    return Err(Error::NonBinary {
                        pos: open,
                        arity: kids.len(),
                    });
                }
                self.skip_ws();
                // internal labels are accepted and discarded
                self.token();
                self.no_branch_length()?;
                let id = self.nodes.len();
                self.nodes.push(Node {
                    parent: None,
                    children: Some([kids[0], kids[1]]),
                    label: None,
                });
                for k in kids {
                    self.nodes[k].parent = Some(id);
                }
                Ok(id)
            }
            _ => {
                let (start, tok) = self.token();
                if tok.is_empty() {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: match self.peek() {
                            Some(c) => format!("expected leaf label, found {:?}", c as char),
                            None => "unexpected end of input".into(),
                        },
                    });
                }
                let label = match tok.parse::<u32>() {
                    Ok(l) if l > 0 && tok.bytes().all(|b| b.is_ascii_digit()) => l,
                    _ => {
                        return Err(Error::BadLabel {
                            pos: start,
                            label: tok,
                        })
                    }
                };
                self.no_branch_length()?;
                let id = self.nodes.len();
                self.nodes.push(Node {
                    parent: None,
                    children: None,
                    label: Some(label),
                });
                Ok(id)
            }
        }
    }
}

pub fn parse_newick(text: &str) -> Result<RootedBinaryTree> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
        nodes: Vec::new(),
    };
    let root = p.subtree()?;
    p.skip_ws();
    if p.peek() != Some(b';') {
        return Err(Error::Syntax {
            pos: p.pos,
            msg: "expected ';'".into(),
        });
    }
    p.pos += 1;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(Error::Syntax {
            pos: p.pos,
            msg: "trailing input after ';'".into(),
        });
    }
    let mut seen = BTreeSet::new();
    for n in &p.nodes {
        if let Some(l) = n.label {
            if !seen.insert(l) {
                return Err(Error::DuplicateLabel(l));
            }
        }
    }
    if p.nodes[root].children.is_none() {
        return Err(Error::NonBinary { pos: 0, arity: 0 });
    }
    RootedBinaryTree::from_arena(p.nodes, root)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    /// interior indices, sorted
    pub members: Vec<usize>,
    pub neighbors: Vec<usize>,
    pub max_vertex: usize,
}

/// Interior nodes adjacent to three interior nodes.
pub fn cluster_nodes(tree: &RootedBinaryTree) -> Vec<usize> {
    (0..tree.n_interior())
        .filter(|&i| tree.interior_neighbors(i).len() == 3)
        .collect()
}

pub fn enumerate_clusters(tree: &RootedBinaryTree) -> Vec<Cluster> {
    let is_cluster: BTreeSet<usize> = cluster_nodes(tree).into_iter().collect();
    // connected member sets whose topmost node is v
    fn rooted(tree: &RootedBinaryTree, v: usize, ok: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let mut acc = vec![vec![v]];
        for c in tree.interior_children(v) {
            if !ok.contains(&c) {
                continue;
            }
            let subs = rooted(tree, c, ok);
            let mut next = Vec::with_capacity(acc.len() * (subs.len() + 1));
            for a in &acc {
                next.push(a.clone());
                for s in &subs {
                    let mut m = a.clone();
                    m.extend_from_slice(s);
                    next.push(m);
                }
            }
            acc = next;
        }
        acc
    }
    let mut out = Vec::new();
    for &v in &is_cluster {
        for mut members in rooted(tree, v, &is_cluster) {
            members.sort_unstable();
            let set: BTreeSet<usize> = members.iter().copied().collect();
            let neighbors = neighbor_set(tree, &set, None);
            out.push(Cluster {
                members,
                neighbors,
                max_vertex: v,
            });
        }
    }
    out.sort_by(|a, b| a.members.cmp(&b.members));
    out
}

/// Interior nodes outside `members` adjacent to a member; with `within`,
/// only nodes of that set are counted.
pub fn neighbor_set(
    tree: &RootedBinaryTree,
    members: &BTreeSet<usize>,
    within: Option<&BTreeSet<usize>>,
) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for &m in members {
        for w in tree.interior_neighbors(m) {
            if !members.contains(&w) && within.map_or(true, |s| s.contains(&w)) {
                out.insert(w);
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderIdeal {
    members: Vec<usize>,
}

impl OrderIdeal {
    pub fn new(tree: &RootedBinaryTree, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        for &v in &set {
            if v >= tree.n_interior() {
                return Err(Error::OutOfRange {
                    what: "interior index",
                    value: v,
                    range: "< n-1",
                });
            }
            for c in tree.interior_children(v) {
                if !set.contains(&c) {
                    return Err(Error::NotOrderIdeal(v));
                }
            }
        }
        Ok(OrderIdeal {
            members: set.into_iter().collect(),
        })
    }

    pub fn full(tree: &RootedBinaryTree) -> Self {
        OrderIdeal {
            members: (0..tree.n_interior()).collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Members whose parent is not a member.
    pub fn maximal(&self, tree: &RootedBinaryTree) -> Vec<usize> {
        self.members
            .iter()
            .copied()
            .filter(|&i| tree.parent_index(i).map_or(true, |p| !self.contains(p)))
            .collect()
    }
}

/// All order ideals of the descendant poset on interior nodes. An ideal
/// containing a node contains its whole subtree.
pub fn order_ideals(tree: &RootedBinaryTree) -> Vec<OrderIdeal> {
    fn subtree(tree: &RootedBinaryTree, i: usize, out: &mut Vec<usize>) {
        out.push(i);
        for c in tree.interior_children(i) {
            subtree(tree, c, out);
        }
    }
    fn any(tree: &RootedBinaryTree, i: usize) -> Vec<Vec<usize>> {
        let mut acc = vec![vec![]];
        for c in tree.interior_children(i) {
            let subs = any(tree, c);
            let mut next = Vec::new();
            for a in &acc {
                for s in &subs {
                    let mut m = a.clone();
                    m.extend_from_slice(s);
                    next.push(m);
                }
            }
            acc = next;
        }
        let mut full = Vec::new();
        subtree(tree, i, &mut full);
        acc.push(full);
        acc
    }
    let mut out: Vec<OrderIdeal> = any(tree, 0)
        .into_iter()
        .map(|mut m| {
            m.sort_unstable();
            OrderIdeal { members: m }
        })
        .collect();
    out.sort_by(|a, b| (a.members.len(), &a.members).cmp(&(b.members.len(), &b.members)));
    out
}

/// Wedderburn-Etherington number of shapes with n leaves.
pub fn shape_count(n: usize) -> u64 {
    let mut w = vec![0u64; n.max(2) + 1];
    w[1] = 1;
    for k in 2..=n {
        let mut s = 0;
        for a in 1..k {
            let b = k - a;
            if a > b {
                s += w[a] * w[b];
            } else if a == b {
                s += w[a] * (w[a] + 1) / 2;
            }
        }
        w[k] = s;
    }
    w[n]
}

pub fn enumerate_topologies(n: usize) -> Result<Vec<RootedBinaryTree>> {
    if !(2..=10).contains(&n) {
        return Err(Error::OutOfRange {
            what: "leaf count",
            value: n,
            range: "2..=10",
        });
    }
    #[derive(Clone)]
    enum Shape {
        Leaf,
        Node(usize, usize, usize, usize),
    }
    // shapes[k] lists shapes with k leaves; a Node refers to (size, index) pairs
    let mut shapes: Vec<Vec<Shape>> = vec![Vec::new(), vec![Shape::Leaf]];
    for k in 2..=n {
        let mut here = Vec::new();
        for a in (1..k).rev() {
            let b = k - a;
            if a < b {
                break;
            }
            for i in 0..shapes[a].len() {
                for j in 0..shapes[b].len() {
                    if a == b && j > i {
                        continue;
                    }
                    here.push(Shape::Node(a, i, b, j));
                }
            }
        }
        shapes.push(here);
    }
    fn build(shapes: &[Vec<Shape>], k: usize, i: usize, next: &mut u32) -> Build {
        match shapes[k][i] {
            Shape::Leaf => {
                *next += 1;
                Build::Leaf(Some(*next))
            }
            Shape::Node(a, x, b, y) => {
                let l = build(shapes, a, x, next);
                let r = build(shapes, b, y, next);
                Build::Node(None, Box::new(l), Box::new(r))
            }
        }
    }
    (0..shapes[n].len())
        .map(|i| {
            let mut next = 0;
            RootedBinaryTree::from_build(&build(&shapes, n, i, &mut next)).map(|(t, _)| t)
        })
        .collect()
}

/// A descending chain b -> c -> e; e may be a leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NniTriple {
    pub b: NodeId,
    pub c: NodeId,
    pub e: NodeId,
}

impl NniTriple {
    pub fn validate(&self, tree: &RootedBinaryTree) -> Result<()> {
        let n = tree.n_nodes();
        if self.b >= n || self.c >= n || self.e >= n {
            return Err(Error::BadTriple("node id out of range".into()));
        }
        if tree.is_leaf(self.b) || tree.is_leaf(self.c) {
            return Err(Error::BadTriple("b and c must be interior".into()));
        }
        if tree.parent(self.c) != Some(self.b) {
            return Err(Error::BadTriple("c is not a child of b".into()));
        }
        if tree.parent(self.e) != Some(self.c) {
            return Err(Error::BadTriple("e is not a child of c".into()));
        }
        Ok(())
    }

    /// Sibling of e under c.
    pub fn d(&self, tree: &RootedBinaryTree) -> NodeId {
        tree.sibling(self.e).expect("valid triple")
    }

    /// Sibling of c under b.
    pub fn f(&self, tree: &RootedBinaryTree) -> NodeId {
        tree.sibling(self.c).expect("valid triple")
    }
}

/// Every valid NNI triple of the tree, in preorder of (b, c, e).
pub fn nni_triples(tree: &RootedBinaryTree) -> Vec<NniTriple> {
    let mut out = Vec::new();
    for &b in tree.interior_nodes() {
        for c in tree.children(b).unwrap() {
            if let Some(es) = tree.children(c) {
                for e in es {
                    out.push(NniTriple { b, c, e });
                }
            }
        }
    }
    out
}

/// Move c with the e-subtree onto the other child edge of b. Node ids are
/// kept; b ends up with children {d, c} and c with children {e, f}.
pub fn apply_nni(tree: &RootedBinaryTree, t: NniTriple) -> Result<RootedBinaryTree> {
    t.validate(tree)?;
    let d = t.d(tree);
    let f = t.f(tree);
    let mut nodes = tree.nodes.clone();
    nodes[t.b].children = Some([d, t.c]);
    nodes[t.c].children = Some([t.e, f]);
    nodes[d].parent = Some(t.b);
    nodes[f].parent = Some(t.c);
    RootedBinaryTree::from_arena(nodes, tree.root)
}

#[derive(Clone, Debug)]
pub struct TfpSplit {
    pub t1: RootedBinaryTree,
    pub t2: RootedBinaryTree,
    /// interior index of the splitting node in the original tree
    pub shared: usize,
    pub shared1: usize,
    pub shared2: usize,
    /// interior index of t1 / t2 -> interior index of the original tree
    pub map1: Vec<usize>,
    pub map2: Vec<usize>,
}

/// Split at the first interior node (in index order) adjacent to exactly two
/// interior nodes. A 3-leaf tree is split at its cherry. Returns `None` for
/// cluster trees and for the 2-leaf tree.
pub fn tfp_split(tree: &RootedBinaryTree) -> Option<TfpSplit> {
    let v = if tree.n_leaves() == 3 {
        Some(1)
    } else {
        (0..tree.n_interior()).find(|&i| tree.interior_neighbors(i).len() == 2)
    }?;
    let vid = tree.interior_node(v);
    let (b1, b2) = if v == 0 {
        let [l, r] = tree.children(vid).unwrap();
        (
            Build::Node(
                Some(vid),
                Box::new(tree.to_build(l)),
                Box::new(Build::Leaf(None)),
            ),
            Build::Node(
                Some(vid),
                Box::new(Build::Leaf(None)),
                Box::new(tree.to_build(r)),
            ),
        )
    } else {
        fn replace(t: &RootedBinaryTree, at: NodeId, cur: NodeId) -> Build {
            if cur == at {
                return Build::Node(
                    Some(at),
                    Box::new(Build::Leaf(None)),
                    Box::new(Build::Leaf(None)),
                );
            }
            match t.children(cur) {
                None => Build::Leaf(None),
                Some([a, b]) => Build::Node(
                    Some(cur),
                    Box::new(replace(t, at, a)),
                    Box::new(replace(t, at, b)),
                ),
            }
        }
        (replace(tree, vid, tree.root()), tree.to_build(vid))
    };
    let (t1, o1) = RootedBinaryTree::from_build(&b1).ok()?;
    let (t2, o2) = RootedBinaryTree::from_build(&b2).ok()?;
    let to_index = |o: Vec<Option<NodeId>>| -> Vec<usize> {
        o.into_iter()
            .map(|x| tree.interior_index(x.expect("origin")).expect("interior"))
            .collect()
    };
    let map1 = to_index(o1);
    let map2 = to_index(o2);
    let shared1 = map1.iter().position(|&x| x == v)?;
    let shared2 = map2.iter().position(|&x| x == v)?;
    Some(TfpSplit {
        t1,
        t2,
        shared: v,
        shared1,
        shared2,
        map1,
        map2,
    })
}

/// True iff the tree has a cluster of size (n-3)/2.
pub fn is_cluster_tree(tree: &RootedBinaryTree) -> bool {
    let n = tree.n_leaves();
    if n < 5 || n % 2 == 0 {
        return false;
    }
    enumerate_clusters(tree)
        .iter()
        .any(|c| c.members.len() == (n - 3) / 2)
}
