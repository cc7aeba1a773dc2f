//! The toric ideal I_T: matrix A_T, kernel membership, the recursive
//! quadratic Gröbner basis construction and its checks.
//!
//! Markings come from explicit integer weights built recursively. Each level
//! ends with a lexicographic tie-break (smaller bitstring = heavier variable)
//! folded into the weight, so every weight separates all distinct quadratic
//! monomials and all markings at a level come from one term order.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::paths::{enumerate_top_vectors, traversability, TopVector};
use crate::tree::{tfp_split, RootedBinaryTree, TfpSplit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricMatrix {
    n_interior: usize,
    cols: Vec<TopVector>,
    keys: Vec<String>,
    index: HashMap<String, usize>,
}

impl ToricMatrix {
    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn n_rows(&self) -> usize {
        self.n_interior + 1
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn key(&self, j: usize) -> &str {
        &self.keys[j]
    }

    pub fn top_vector(&self, j: usize) -> &TopVector {
        &self.cols[j]
    }

    pub fn index_of(&self, key: &str) -> Result<usize> {
        self.index
            .get(key)
            .copied()
            .ok_or_else(|| Error::UnknownKey(key.to_string()))
    }

    /// Column (1, s) for the bitstring s.
    pub fn column(&self, j: usize) -> Vec<i64> {
        std::iter::once(1)
            .chain(self.cols[j].bits.iter().map(|&b| b as i64))
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![1u8; self.n_cols()]];
        for i in 0..self.n_interior {
            out.push(self.cols.iter().map(|c| c.bits[i]).collect());
        }
        out
    }

    /// A_T applied to a multiset of column indices.
    pub fn image(&self, mono: &[usize]) -> Vec<i64> {
        let mut s = vec![0i64; self.n_rows()];
        for &j in mono {
            s[0] += 1;
            for (i, &b) in self.cols[j].bits.iter().enumerate() {
                s[i + 1] += b as i64;
            }
        }
        s
    }
}

pub fn build_matrix(tree: &RootedBinaryTree) -> ToricMatrix {
    let cols = enumerate_top_vectors(tree);
    let keys: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
    let index = keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    ToricMatrix {
        n_interior: tree.n_interior(),
        cols,
        keys,
        index,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Lift,
    Quad0,
    Quad1,
    Root,
    Swap,
    #[serde(rename = "oracle")]
    Oracle,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        write!(f, "{}", s.as_str().unwrap())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkedBinomial {
    pub plus: Vec<String>,
    pub minus: Vec<String>,
    pub initial: Option<Side>,
    pub provenance: Provenance,
}

impl MarkedBinomial {
    pub fn new(
        plus: &[&str],
        minus: &[&str],
        initial: Option<Side>,
        provenance: Provenance,
    ) -> Self {
        MarkedBinomial {
            plus: plus.iter().map(|s| s.to_string()).collect(),
            minus: minus.iter().map(|s| s.to_string()).collect(),
            initial,
            provenance,
        }
    }

    pub fn degree(&self) -> usize {
        self.plus.len().max(self.minus.len())
    }

    pub fn initial_term(&self) -> Option<&[String]> {
        match self.initial? {
            Side::Plus => Some(&self.plus),
            Side::Minus => Some(&self.minus),
        }
    }

    pub fn other_term(&self) -> Option<&[String]> {
        match self.initial? {
            Side::Plus => Some(&self.minus),
            Side::Minus => Some(&self.plus),
        }
    }

    /// Keys sorted within each term; the initial term (or the smaller term,
    /// when unmarked) becomes `plus`.
    pub fn canonical(&self) -> Self {
        let mut p = self.plus.clone();
        let mut m = self.minus.clone();
        p.sort();
        m.sort();
        let swap = match self.initial {
            Some(Side::Minus) => true,
            Some(Side::Plus) => false,
            None => m < p,
        };
        if swap {
            std::mem::swap(&mut p, &mut m);
        }
        MarkedBinomial {
            plus: p,
            minus: m,
            initial: self.initial.map(|_| Side::Plus),
            provenance: self.provenance,
        }
    }

    /// The same binomial with the other term marked.
    pub fn flipped(&self) -> Self {
        let mut b = self.clone();
        b.initial = b.initial.map(|s| match s {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        });
        b
    }

    pub fn to_json(&self) -> Value {
        json!({
            "plus": self.plus,
            "minus": self.minus,
            "initial": self.initial,
            "provenance": self.provenance,
        })
    }
}

impl fmt::Display for MarkedBinomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |t: &[String]| -> String {
            t.iter()
                .map(|k| format!("r{k}"))
                .collect::<Vec<_>>()
                .join("*")
        };
        let (a, b) = match self.initial {
            Some(Side::Minus) => (&self.minus, &self.plus),
            _ => (&self.plus, &self.minus),
        };
        write!(f, "{} - {}", term(a), term(b))
    }
}

/// Canonical JSON of a generator list, sorted by provenance then terms.
pub fn canonical_json(gens: &[MarkedBinomial]) -> String {
    let mut c: Vec<MarkedBinomial> = gens.iter().map(|g| g.canonical()).collect();
    c.sort_by(|a, b| (a.provenance, &a.plus, &a.minus).cmp(&(b.provenance, &b.plus, &b.minus)));
    let v: Vec<Value> = c.iter().map(|g| g.to_json()).collect();
    serde_json::to_string(&v).unwrap()
}

fn indices(m: &ToricMatrix, keys: &[String]) -> Result<Vec<usize>> {
    let mut v: Vec<usize> = keys.iter().map(|k| m.index_of(k)).collect::<Result<_>>()?;
    v.sort_unstable();
    Ok(v)
}

pub fn kernel_member(m: &ToricMatrix, b: &MarkedBinomial) -> Result<bool> {
    let p = indices(m, &b.plus)?;
    let q = indices(m, &b.minus)?;
    Ok(m.image(&p) == m.image(&q))
}

/// Every degree-2 kernel binomial, once up to sign, unmarked.
pub fn quadratic_kernel_oracle(m: &ToricMatrix) -> Result<Vec<MarkedBinomial>> {
    const CAP: usize = 500;
    if m.n_cols() > CAP {
        return Err(Error::CapExceeded(format!(
            "{} columns > {CAP}",
            m.n_cols()
        )));
    }
    let mut fibers: BTreeMap<Vec<i64>, Vec<[usize; 2]>> = BTreeMap::new();
    for i in 0..m.n_cols() {
        for j in i..m.n_cols() {
            fibers.entry(m.image(&[i, j])).or_default().push([i, j]);
        }
    }
    let mut out = Vec::new();
    for monos in fibers.values() {
        for a in 0..monos.len() {
            for b in a + 1..monos.len() {
                let key = |x: &[usize; 2]| vec![m.key(x[0]).to_string(), m.key(x[1]).to_string()];
                out.push(MarkedBinomial {
                    plus: key(&monos[a]),
                    minus: key(&monos[b]),
                    initial: None,
                    provenance: Provenance::Oracle,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockTag {
    NonTraversable,
    Traversable,
    NonAugmentable,
    Augmentable,
}

impl BlockTag {
    pub fn is_high(self) -> bool {
        matches!(self, BlockTag::NonTraversable | BlockTag::NonAugmentable)
    }
}

/// The term order behind the construction: an integer weight per column
/// (distinct on quadratic monomials) and, for cluster, bicluster and 3-leaf
/// trees, the block of each column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftableOrder {
    pub keys: Vec<String>,
    pub weight: Vec<BigUint>,
    pub blocks: Option<Vec<BlockTag>>,
}

impl LiftableOrder {
    fn weight_of(&self, m: &ToricMatrix, term: &[String]) -> Result<BigUint> {
        let mut s = BigUint::zero();
        for k in term {
            s += &self.weight[m.index_of(k)?];
        }
        Ok(s)
    }

    /// True iff every generator's initial term is strictly heavier.
    pub fn induces(&self, m: &ToricMatrix, gens: &[MarkedBinomial]) -> Result<bool> {
        for g in gens {
            let (Some(a), Some(b)) = (g.initial_term(), g.other_term()) else {
                return Ok(false);
            };
            if self.weight_of(m, a)? <= self.weight_of(m, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Block property at the level of the marking: whenever the two terms
    /// have different numbers of high-block variables, the initial term has more.
    pub fn block_property(&self, m: &ToricMatrix, gens: &[MarkedBinomial]) -> Result<bool> {
        let Some(blocks) = &self.blocks else {
            return Ok(true);
        };
        let high = |t: &[String]| -> Result<usize> {
            let mut c = 0;
            for k in t {
                if blocks[m.index_of(k)?].is_high() {
                    c += 1;
                }
            }
            Ok(c)
        };
        for g in gens {
            let (Some(a), Some(b)) = (g.initial_term(), g.other_term()) else {
                return Ok(false);
            };
            if high(a)? < high(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "keys": self.keys,
            "weight": self.weight.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "blocks": self.blocks,
        })
    }
}

#[derive(Clone, Debug)]
struct IBin {
    lead: Vec<usize>,
    tail: Vec<usize>,
    prov: Provenance,
}

impl IBin {
    fn key(&self) -> (Vec<usize>, Vec<usize>) {
        if self.lead <= self.tail {
            (self.lead.clone(), self.tail.clone())
        } else {
            (self.tail.clone(), self.lead.clone())
        }
    }
}

struct Built {
    matrix: ToricMatrix,
    gens: Vec<IBin>,
    weight: Vec<BigUint>,
    blocks: Option<Vec<BlockTag>>,
}

fn term_weight(w: &[BigUint], t: &[usize]) -> BigUint {
    t.iter().fold(BigUint::zero(), |s, &j| s + &w[j])
}

fn mark(w: &[BigUint], mut a: Vec<usize>, mut b: Vec<usize>, prov: Provenance) -> IBin {
    a.sort_unstable();
    b.sort_unstable();
    let (wa, wb) = (term_weight(w, &a), term_weight(w, &b));
    debug_assert!(wa != wb, "weight ties on distinct quadratic monomials");
    if wa > wb {
        IBin {
            lead: a,
            tail: b,
            prov,
        }
    } else {
        IBin {
            lead: b,
            tail: a,
            prov,
        }
    }
}

fn max_weight(w: &[BigUint]) -> BigUint {
    w.iter().max().cloned().unwrap_or_else(BigUint::zero)
}

/// Fold the lexicographic tie-break under `base`.
fn finalize(base: &[BigUint]) -> Vec<BigUint> {
    let n = base.len();
    let three = BigUint::from(3u32);
    let lex: Vec<BigUint> = (0..n).map(|j| three.pow((n - 1 - j) as u32)).collect();
    let big = BigUint::from(2u32) * max_weight(&lex) + BigUint::one();
    base.iter().zip(lex).map(|(b, l)| b * &big + l).collect()
}

fn augmentability(tree: &RootedBinaryTree, m: &ToricMatrix) -> Vec<BlockTag> {
    (0..m.n_cols())
        .map(|j| {
            if traversability(tree, m.top_vector(j))
                .unwrap()
                .root_augmentable
            {
                BlockTag::Augmentable
            } else {
                BlockTag::NonAugmentable
            }
        })
        .collect()
}

fn traversable(tree: &RootedBinaryTree, m: &ToricMatrix) -> Vec<bool> {
    (0..m.n_cols())
        .map(|j| {
            traversability(tree, m.top_vector(j))
                .unwrap()
                .root_leaf_traversable
        })
        .collect()
}

fn dedup(gens: Vec<IBin>) -> Vec<IBin> {
    let mut seen = HashSet::new();
    gens.into_iter().filter(|g| seen.insert(g.key())).collect()
}

fn build(tree: &RootedBinaryTree) -> Built {
    if tree.n_leaves() <= 3 {
        let matrix = build_matrix(tree);
        let blocks = augmentability(tree, &matrix);
        let base: Vec<BigUint> = blocks
            .iter()
            .map(|b| BigUint::from(b.is_high() as u32))
            .collect();
        return Built {
            weight: finalize(&base),
            matrix,
            gens: Vec::new(),
            blocks: Some(blocks),
        };
    }
    match tfp_split(tree) {
        Some(s) => build_tfp(tree, &s, false),
        None => build_cluster(tree),
    }
}

fn restrict(bits: &[u8], map: &[usize]) -> String {
    map.iter().map(|&i| char::from(b'0' + bits[i])).collect()
}

fn build_tfp(tree: &RootedBinaryTree, s: &TfpSplit, bicluster: bool) -> Built {
    let c1 = build(&s.t1);
    let c2 = build(&s.t2);
    let matrix = build_matrix(tree);
    let n = matrix.n_cols();
    let mut pair = Vec::with_capacity(n);
    let mut glue: HashMap<(usize, usize), usize> = HashMap::new();
    for j in 0..n {
        let bits = &matrix.top_vector(j).bits;
        let i1 = c1
            .matrix
            .index_of(&restrict(bits, &s.map1))
            .expect("restriction is a vertex");
        let i2 = c2
            .matrix
            .index_of(&restrict(bits, &s.map2))
            .expect("restriction is a vertex");
        pair.push((i1, i2));
        glue.insert((i1, i2), j);
    }
    let vbit1 = |i: usize| c1.matrix.top_vector(i).bits[s.shared1];
    let vbit2 = |i: usize| c2.matrix.top_vector(i).bits[s.shared2];
    debug_assert_eq!(
        n,
        (0..c1.matrix.n_cols())
            .map(|a| (0..c2.matrix.n_cols())
                .filter(|&b| vbit1(a) == vbit2(b))
                .count())
            .sum::<usize>()
    );
    // M_k rows and columns, root-augmentable classes first
    let aug1 = augmentability(&s.t1, &c1.matrix);
    let aug2 = augmentability(&s.t2, &c2.matrix);
    let side = |cols: usize, bit: &dyn Fn(usize) -> u8, aug: &[BlockTag], k: u8| -> Vec<usize> {
        let mut v: Vec<usize> = (0..cols).filter(|&i| bit(i) == k).collect();
        v.sort_by_key(|&i| (aug[i].is_high(), i));
        v
    };
    let mut omega = vec![BigUint::zero(); n];
    let mut quads = Vec::new();
    let mut grids = Vec::new();
    for k in 0..2u8 {
        let a = side(c1.matrix.n_cols(), &vbit1, &aug1, k);
        let b = side(c2.matrix.n_cols(), &vbit2, &aug2, k);
        for (i, &x) in a.iter().enumerate() {
            for (jj, &y) in b.iter().enumerate() {
                omega[glue[&(x, y)]] = BigUint::one() << (i + jj);
            }
        }
        grids.push((a, b));
    }
    let kk = BigUint::from(2u32) * max_weight(&omega) + BigUint::one();
    let pre: Vec<BigUint> = (0..n)
        .map(|j| {
            let (i1, i2) = pair[j];
            (&c1.weight[i1] + &c2.weight[i2]) * &kk + &omega[j]
        })
        .collect();
    let (base, blocks) = if bicluster {
        let trav = traversable(tree, &matrix);
        let big = BigUint::from(2u32) * max_weight(&pre) + BigUint::one();
        let base: Vec<BigUint> = (0..n)
            .map(|j| {
                if trav[j] {
                    pre[j].clone()
                } else {
                    &pre[j] + &big
                }
            })
            .collect();
        let blocks = trav
            .iter()
            .map(|&t| {
                if t {
                    BlockTag::Traversable
                } else {
                    BlockTag::NonTraversable
                }
            })
            .collect();
        (base, Some(blocks))
    } else {
        (pre.clone(), None)
    };
    let weight = finalize(&base);
    let pre_weight = finalize(&pre);
    for (k, (a, b)) in grids.iter().enumerate() {
        let prov = if k == 0 {
            Provenance::Quad0
        } else {
            Provenance::Quad1
        };
        for i in 0..a.len() {
            for i2 in i + 1..a.len() {
                for j in 0..b.len() {
                    for j2 in j + 1..b.len() {
                        let p = vec![glue[&(a[i], b[j])], glue[&(a[i2], b[j2])]];
                        let q = vec![glue[&(a[i], b[j2])], glue[&(a[i2], b[j])]];
                        quads.push(mark(&weight, p, q, prov));
                    }
                }
            }
        }
    }
    let mut lifts = Vec::new();
    // lift generators of one side along all compatible classes of the other
    let mut lift = |g: &IBin, first: bool| {
        let (own_bit, other_cols): (&dyn Fn(usize) -> u8, usize) = if first {
            (&vbit1, c2.matrix.n_cols())
        } else {
            (&vbit2, c1.matrix.n_cols())
        };
        let other_bit: &dyn Fn(usize) -> u8 = if first { &vbit2 } else { &vbit1 };
        let p = g.lead.clone();
        let mut q = g.tail.clone();
        if own_bit(p[0]) != own_bit(q[0]) {
            q.swap(0, 1);
        }
        let compat = |x: usize| -> Vec<usize> {
            (0..other_cols)
                .filter(|&r| other_bit(r) == own_bit(x))
                .collect()
        };
        let join = |x: usize, r: usize| if first { glue[&(x, r)] } else { glue[&(r, x)] };
        for &r1 in &compat(p[0]) {
            for &r2 in &compat(p[1]) {
                let lead = vec![join(p[0], r1), join(p[1], r2)];
                let tail = vec![join(q[0], r1), join(q[1], r2)];
                let b = mark(&weight, lead.clone(), tail.clone(), Provenance::Lift);
                if bicluster {
                    let before = mark(&pre_weight, lead, tail, Provenance::Lift);
                    if before.lead != b.lead {
                        continue;
                    }
                }
                lifts.push(b);
            }
        }
    };
    for g in &c1.gens {
        lift(g, true);
    }
    for g in &c2.gens {
        lift(g, false);
    }
    let mut gens = lifts;
    gens.extend(quads);
    Built {
        matrix,
        gens: dedup(gens),
        weight,
        blocks,
    }
}

/// The subtree below the root of a cluster tree, which is a bicluster tree.
fn bicluster_part(tree: &RootedBinaryTree) -> (RootedBinaryTree, Vec<usize>) {
    let root = tree.root();
    let [a, b] = tree.children(root).unwrap();
    let inner = if tree.is_leaf(a) { b } else { a };
    let (t, origin) = RootedBinaryTree::from_build(&tree.to_build(inner)).expect("subtree");
    let map = origin
        .into_iter()
        .map(|o| tree.interior_index(o.unwrap()).unwrap())
        .collect();
    (t, map)
}

fn build_bicluster(tree: &RootedBinaryTree) -> (RootedBinaryTree, Vec<usize>, Built) {
    let (tp, map) = bicluster_part(tree);
    let split = tfp_split(&tp).expect("bicluster tree splits at its root");
    debug_assert_eq!(split.shared, 0);
    let built = build_tfp(&tp, &split, true);
    (tp, map, built)
}

fn build_cluster(tree: &RootedBinaryTree) -> Built {
    let (tp, map, inner) = build_bicluster(tree);
    let matrix = build_matrix(tree);
    let n = matrix.n_cols();
    let mut col: HashMap<(u8, usize), usize> = HashMap::new();
    let mut parts = Vec::with_capacity(n);
    for j in 0..n {
        let bits = &matrix.top_vector(j).bits;
        let p = inner
            .matrix
            .index_of(&restrict(bits, &map))
            .expect("restriction is a vertex");
        col.insert((bits[0], p), j);
        parts.push((bits[0], p));
    }
    let trav = traversable(&tp, &inner.matrix);
    let big = BigUint::from(2u32) * max_weight(&inner.weight) + BigUint::one();
    let base: Vec<BigUint> = parts
        .iter()
        .map(|&(b, p)| {
            let w = &inner.weight[p];
            if b == 1 {
                w * &big + w
            } else {
                w * &big
            }
        })
        .collect();
    let weight = finalize(&base);
    let mut gens = Vec::new();
    for f in &inner.gens {
        let (p, q) = (&f.lead, &f.tail);
        for i in 0..4u8 {
            let (i1, i2) = (i >> 1, i & 1);
            if (i1 == 1 && !trav[p[0]]) || (i2 == 1 && !trav[p[1]]) {
                continue;
            }
            for j in 0..4u8 {
                let (j1, j2) = (j >> 1, j & 1);
                if i1 + i2 != j1 + j2 || (j1 == 1 && !trav[q[0]]) || (j2 == 1 && !trav[q[1]]) {
                    continue;
                }
                let lead = vec![col[&(i1, p[0])], col[&(i2, p[1])]];
                let tail = vec![col[&(j1, q[0])], col[&(j2, q[1])]];
                gens.push(mark(&weight, lead, tail, Provenance::Root));
            }
        }
    }
    let tr: Vec<usize> = (0..inner.matrix.n_cols()).filter(|&p| trav[p]).collect();
    for (a, &p) in tr.iter().enumerate() {
        for &q in &tr[a + 1..] {
            let lead = vec![col[&(1, p)], col[&(0, q)]];
            let tail = vec![col[&(0, p)], col[&(1, q)]];
            gens.push(mark(&weight, lead, tail, Provenance::Swap));
        }
    }
    let blocks = augmentability(tree, &matrix);
    Built {
        matrix,
        gens: dedup(gens),
        weight,
        blocks: Some(blocks),
    }
}

fn export(b: Built) -> (ToricMatrix, Vec<MarkedBinomial>, LiftableOrder) {
    let gens = b
        .gens
        .iter()
        .map(|g| MarkedBinomial {
            plus: g
                .lead
                .iter()
                .map(|&j| b.matrix.key(j).to_string())
                .collect(),
            minus: g
                .tail
                .iter()
                .map(|&j| b.matrix.key(j).to_string())
                .collect(),
            initial: Some(Side::Plus),
            provenance: g.prov,
        })
        .collect();
    let order = LiftableOrder {
        keys: b.matrix.keys().to_vec(),
        weight: b.weight,
        blocks: b.blocks,
    };
    (b.matrix, gens, order)
}

/// Quadratic Gröbner basis candidate of I_T with its term order.
pub fn construct_generators(
    tree: &RootedBinaryTree,
) -> Result<(Vec<MarkedBinomial>, LiftableOrder)> {
    if tree.n_leaves() < 3 {
        return Err(Error::OutOfRange {
            what: "leaf count",
            value: tree.n_leaves(),
            range: ">= 3",
        });
    }
    let (_, gens, order) = export(build(tree));
    Ok((gens, order))
}

/// For a cluster tree: the intermediate bicluster tree (root removed), its
/// matrix, generators and order with traversability blocks.
pub fn bicluster_generators(
    tree: &RootedBinaryTree,
) -> Option<(
    RootedBinaryTree,
    ToricMatrix,
    Vec<MarkedBinomial>,
    LiftableOrder,
)> {
    if tree.n_leaves() < 5 || tfp_split(tree).is_some() {
        return None;
    }
    let (tp, _, built) = build_bicluster(tree);
    let (m, g, o) = export(built);
    Some((tp, m, g, o))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroebnerReport {
    pub generators: usize,
    pub pairs_checked: usize,
    pub squarefree: bool,
    pub kernel: bool,
    pub s_pairs_reduce: bool,
    pub reduced: bool,
    pub verified: bool,
    /// first S-pair (by generator indices) whose normal forms differ
    pub failing_pair: Option<(usize, usize)>,
}

struct Reducer {
    gens: Vec<IBin>,
    by_var: Vec<Vec<usize>>,
}

const STEP_CAP: usize = 100_000;

impl Reducer {
    fn new(gens: Vec<IBin>, n: usize) -> Self {
        let mut by_var = vec![Vec::new(); n];
        for (k, g) in gens.iter().enumerate() {
            let mut seen = g.lead.clone();
            seen.dedup();
            for v in seen {
                by_var[v].push(k);
            }
        }
        Reducer { gens, by_var }
    }

    /// Normal form of a sorted monomial, or None if reduction does not stop.
    fn normal_form(&self, mono: &[usize]) -> Option<Vec<usize>> {
        let mut cur = mono.to_vec();
        for _ in 0..STEP_CAP {
            let hit = cur
                .iter()
                .flat_map(|&v| self.by_var[v].iter())
                .copied()
                .filter(|&k| divides(&self.gens[k].lead, &cur))
                .min();
            match hit {
                None => return Some(cur),
                Some(k) => {
                    cur = replace(&cur, &self.gens[k].lead, &self.gens[k].tail);
                }
            }
        }
        None
    }
}

fn divides(a: &[usize], b: &[usize]) -> bool {
    // both sorted multisets
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

fn replace(mono: &[usize], out: &[usize], inn: &[usize]) -> Vec<usize> {
    let mut rest = mono.to_vec();
    for x in out {
        let p = rest.iter().position(|y| y == x).unwrap();
        rest.remove(p);
    }
    rest.extend_from_slice(inn);
    rest.sort_unstable();
    rest
}

fn lcm(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut ca: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in a {
        *ca.entry(x).or_default() += 1;
    }
    let mut cb: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in b {
        *cb.entry(x).or_default() += 1;
    }
    for (k, v) in cb {
        let e = ca.entry(k).or_default();
        *e = (*e).max(v);
    }
    ca.into_iter()
        .flat_map(|(k, v)| std::iter::repeat(k).take(v))
        .collect()
}

fn to_ibins(m: &ToricMatrix, gens: &[MarkedBinomial]) -> Result<Vec<IBin>> {
    gens.iter()
        .map(|g| {
            let (Some(a), Some(b)) = (g.initial_term(), g.other_term()) else {
                return Err(Error::Unmarked(g.to_string()));
            };
            Ok(IBin {
                lead: indices(m, a)?,
                tail: indices(m, b)?,
                prov: g.provenance,
            })
        })
        .collect()
}

/// Buchberger's criterion for marked binomials (coprime pairs skipped).
pub fn groebner_verify(m: &ToricMatrix, gens: &[MarkedBinomial]) -> Result<GroebnerReport> {
    let bins = to_ibins(m, gens)?;
    let squarefree = bins.iter().all(|g| g.lead.windows(2).all(|w| w[0] != w[1]));
    let kernel = bins.iter().all(|g| m.image(&g.lead) == m.image(&g.tail));
    let red = Reducer::new(bins.clone(), m.n_cols());
    let pairs: Vec<(usize, usize)> = (0..bins.len())
        .flat_map(|i| (i + 1..bins.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| bins[i].lead.iter().any(|x| bins[j].lead.contains(x)))
        .collect();
    let failing = pairs
        .par_iter()
        .filter(|&&(i, j)| {
            let l = lcm(&bins[i].lead, &bins[j].lead);
            let a = replace(&l, &bins[i].lead, &bins[i].tail);
            let b = replace(&l, &bins[j].lead, &bins[j].tail);
            match (red.normal_form(&a), red.normal_form(&b)) {
                (Some(x), Some(y)) => x != y,
                _ => true,
            }
        })
        .min()
        .copied();
    let leads: HashSet<&Vec<usize>> = bins.iter().map(|g| &g.lead).collect();
    let reduced = leads.len() == bins.len()
        && bins.iter().all(|g| {
            bins.iter().all(|h| !divides(&h.lead, &g.tail))
                && bins
                    .iter()
                    .all(|h| std::ptr::eq(g, h) || !divides(&h.lead, &g.lead))
        });
    let s_pairs_reduce = failing.is_none();
    Ok(GroebnerReport {
        generators: bins.len(),
        pairs_checked: pairs.len(),
        squarefree,
        kernel,
        s_pairs_reduce,
        reduced,
        verified: squarefree && s_pairs_reduce,
        failing_pair: failing,
    })
}

/// True iff the two monomials have the same normal form.
pub fn reduces_to_zero(
    m: &ToricMatrix,
    gens: &[MarkedBinomial],
    b: &MarkedBinomial,
) -> Result<bool> {
    let red = Reducer::new(to_ibins(m, gens)?, m.n_cols());
    let p = indices(m, &b.plus)?;
    let q = indices(m, &b.minus)?;
    Ok(match (red.normal_form(&p), red.normal_form(&q)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    })
}

/// Monomials of degree d divisible by no initial term.
pub fn standard_monomial_count(m: &ToricMatrix, gens: &[MarkedBinomial], d: usize) -> Result<u64> {
    let bins = to_ibins(m, gens)?;
    let mut count = 0;
    for_each_multiset(m.n_cols(), d, |mono| {
        if !bins.iter().any(|g| divides(&g.lead, mono)) {
            count += 1;
        }
    });
    Ok(count)
}

fn for_each_multiset(n: usize, d: usize, mut f: impl FnMut(&[usize])) {
    if n == 0 {
        if d == 0 {
            f(&[]);
        }
        return;
    }
    let mut idx = vec![0usize; d];
    loop {
        f(&idx);
        let mut p = d;
        let mut moved = false;
        while p > 0 {
            p -= 1;
            if idx[p] + 1 < n {
                idx[p] += 1;
                let v = idx[p];
                idx[p + 1..].iter_mut().for_each(|q| *q = v);
                moved = true;
                break;
            }
        }
        if !moved {
            return;
        }
    }
}

fn multiset_count(n: usize, d: usize) -> u128 {
    let mut c: u128 = 1;
    for k in 0..d as u128 {
        c = c * (n as u128 + k) / (k + 1);
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub degree_cap: usize,
    pub fibers: usize,
    pub connected: bool,
    /// a disconnected fiber: its A_T image
    pub counterexample: Option<Vec<i64>>,
}

/// Every fiber of degree ≤ cap is connected by the moves of `gens`.
pub fn fiber_connectivity(
    m: &ToricMatrix,
    gens: &[MarkedBinomial],
    degree_cap: usize,
) -> Result<FiberReport> {
    const CAP: u128 = 3_000_000;
    let total: u128 = (1..=degree_cap)
        .map(|d| multiset_count(m.n_cols(), d))
        .sum();
    if total > CAP {
        return Err(Error::CapExceeded(format!(
            "{total} monomials up to degree {degree_cap}"
        )));
    }
    let moves: Vec<(Vec<usize>, Vec<usize>)> = gens
        .iter()
        .map(|g| Ok((indices(m, &g.plus)?, indices(m, &g.minus)?)))
        .collect::<Result<_>>()?;
    let mut fibers: Vec<(Vec<i64>, Vec<Vec<usize>>)> = Vec::new();
    for d in 1..=degree_cap {
        let mut by: BTreeMap<Vec<i64>, Vec<Vec<usize>>> = BTreeMap::new();
        for_each_multiset(m.n_cols(), d, |mono| {
            by.entry(m.image(mono)).or_default().push(mono.to_vec());
        });
        fibers.extend(by.into_iter().filter(|(_, v)| v.len() > 1));
    }
    let bad = fibers
        .par_iter()
        .find_first(|(_, monos)| !connected(monos, &moves))
        .map(|(img, _)| img.clone());
    Ok(FiberReport {
        degree_cap,
        fibers: fibers.len(),
        connected: bad.is_none(),
        counterexample: bad,
    })
}

fn connected(monos: &[Vec<usize>], moves: &[(Vec<usize>, Vec<usize>)]) -> bool {
    let all: BTreeSet<&Vec<usize>> = monos.iter().collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(monos[0].clone());
    queue.push_back(monos[0].clone());
    while let Some(u) = queue.pop_front() {
        for (a, b) in moves {
            for (from, to) in [(a, b), (b, a)] {
                if divides(from, &u) {
                    let w = replace(&u, from, to);
                    if seen.insert(w.clone()) {
                        debug_assert!(all.contains(&w));
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    seen.len() == all.len()
}
