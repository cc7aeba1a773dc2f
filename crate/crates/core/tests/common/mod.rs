#![allow(dead_code)]

use std::collections::BTreeSet;

use cfnmc::tree::{enumerate_topologies, NodeId};
use cfnmc::{parse_newick, RootedBinaryTree};
use proptest::prelude::*;

pub const FIVE_LEAF: &str = "(((1,2),(3,4)),5);";
pub const SIX_LEAF: &str = "(((1,2),(3,4)),(5,6));";
pub const CLUSTER_TREE: &str = "((((1,2),(3,4)),(5,6)),7);";
pub const SEVEN_LEAF: &str = "((((1,2),(3,4)),5),(6,7));";
pub const NINE_LEAF: &str = "((((1,2),(3,4)),((5,6),(7,8))),9);";
pub const SPINE_T2: &str = "(((((1,2),(3,4)),((5,6),(7,8))),((9,10),(11,12))),13);";

pub fn tree(s: &str) -> RootedBinaryTree {
    parse_newick(s).unwrap()
}

pub fn shapes(lo: usize, hi: usize) -> Vec<RootedBinaryTree> {
    (lo..=hi)
        .flat_map(|n| enumerate_topologies(n).unwrap())
        .collect()
}

/// Newick string of a tree grown by random splits of a shuffled label list.
pub fn random_newick(n: usize, seeds: &[u32]) -> String {
    let mut labels: Vec<u32> = (1..=n as u32).collect();
    for i in (1..n).rev() {
        let j = seeds[i % seeds.len()] as usize % (i + 1);
        labels.swap(i, j);
    }
    let mut k = 0usize;
    fn go(labels: &[u32], seeds: &[u32], k: &mut usize) -> String {
        if labels.len() == 1 {
            return labels[0].to_string();
        }
        *k += 1;
        let cut = 1 + seeds[*k % seeds.len()] as usize % (labels.len() - 1);
        let a = go(&labels[..cut], seeds, k);
        let b = go(&labels[cut..], seeds, k);
        format!("({a},{b})")
    }
    format!("{};", go(&labels, seeds, &mut k))
}

pub fn arb_tree(lo: usize, hi: usize) -> impl Strategy<Value = RootedBinaryTree> {
    (lo..=hi, proptest::collection::vec(any::<u32>(), 1..24))
        .prop_map(|(n, seeds)| parse_newick(&random_newick(n, &seeds)).unwrap())
}

/// Label-free shape string computed from the child structure only.
pub fn shape_of(t: &RootedBinaryTree, v: NodeId) -> String {
    match t.children(v) {
        None => "x".into(),
        Some([a, b]) => {
            let mut s = [shape_of(t, a), shape_of(t, b)];
            s.sort();
            format!("({},{})", s[0], s[1])
        }
    }
}

/// Every shape with n leaves, by brute-force splitting and isomorphism rejection.
pub fn brute_shapes(n: usize) -> BTreeSet<String> {
    if n == 1 {
        return ["x".to_string()].into();
    }
    let mut out = BTreeSet::new();
    for a in 1..n {
        for l in brute_shapes(a) {
            for r in brute_shapes(n - a) {
                let mut s = [l.clone(), r];
                s.sort();
                out.insert(format!("({},{})", s[0], s[1]));
            }
        }
    }
    out
}

/// Interior index of the node whose subtree has exactly these leaf labels.
pub fn node_with_leaves(t: &RootedBinaryTree, labels: &[u32]) -> usize {
    let want: BTreeSet<u32> = labels.iter().copied().collect();
    (0..t.n_interior())
        .find(|&i| leaf_labels(t, t.interior_node(i)) == want)
        .expect("no node with that leaf set")
}

pub fn leaf_labels(t: &RootedBinaryTree, v: NodeId) -> BTreeSet<u32> {
    match t.children(v) {
        None => [t.label(v).unwrap()].into(),
        Some([a, b]) => {
            let mut s = leaf_labels(t, a);
            s.extend(leaf_labels(t, b));
            s
        }
    }
}

pub fn leaf_node(t: &RootedBinaryTree, label: u32) -> NodeId {
    *t.leaves()
        .iter()
        .find(|&&v| t.label(v) == Some(label))
        .unwrap()
}

pub fn bits(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}
