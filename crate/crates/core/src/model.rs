//! The CFN model under a molecular clock: leaf distributions, the Hadamard
//! transform and numeric evaluation of binomials on Fourier coordinates.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::MarkedBinomial;
use crate::paths::{top_vector_of, TopVector};
use crate::tree::RootedBinaryTree;

/// Rate and interior node heights (by interior index); leaves sit at height 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClockParams {
    pub alpha: f64,
    pub heights: Vec<f64>,
}

impl ClockParams {
    pub fn new(tree: &RootedBinaryTree, alpha: f64, heights: Vec<f64>) -> Result<Self> {
        if heights.len() != tree.n_interior() {
            return Err(Error::LengthMismatch {
                expected: tree.n_interior(),
                got: heights.len(),
            });
        }
        let p = ClockParams { alpha, heights };
        p.validate(tree)?;
        Ok(p)
    }

    fn validate(&self, tree: &RootedBinaryTree) -> Result<()> {
        for i in 0..tree.n_interior() {
            let t = self.branch_above_index(tree, i);
            if !(t > 0.0) && tree.parent_index(i).is_some() {
                return Err(Error::BranchLength(t, i));
            }
            if !(self.heights[i] > 0.0) {
                return Err(Error::BranchLength(self.heights[i], i));
            }
        }
        Ok(())
    }

    fn branch_above_index(&self, tree: &RootedBinaryTree, i: usize) -> f64 {
        match tree.parent_index(i) {
            Some(p) => self.heights[p] - self.heights[i],
            None => f64::INFINITY,
        }
    }

    /// Height of any node (0 for leaves).
    pub fn height(&self, tree: &RootedBinaryTree, v: usize) -> f64 {
        tree.interior_index(v).map_or(0.0, |i| self.heights[i])
    }

    /// Length t_e of the edge above node v.
    pub fn branch_length(&self, tree: &RootedBinaryTree, v: usize) -> f64 {
        let p = tree.parent(v).expect("non-root node");
        self.height(tree, p) - self.height(tree, v)
    }

    /// Root height uniform in [0.5, 2], each child uniform below its parent.
    pub fn sample(tree: &RootedBinaryTree, rng: &mut impl Rng) -> Self {
        let mut heights = vec![0.0; tree.n_interior()];
        for i in 0..tree.n_interior() {
            heights[i] = match tree.parent_index(i) {
                None => rng.gen_range(0.5..=2.0),
                Some(p) => loop {
                    let h = rng.gen_range(0.0..heights[p]);
                    if h > 0.0 {
                        break h;
                    }
                },
            };
        }
        ClockParams {
            alpha: 1.0,
            heights,
        }
    }

    /// Deterministic draw number `index` of a seeded stream.
    pub fn sample_seeded(tree: &RootedBinaryTree, seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self::sample(tree, &mut rng)
    }
}

/// Probabilities indexed by the leaf labeling read as a binary number,
/// leaf 1 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafDistribution {
    pub n: usize,
    pub probs: Vec<f64>,
}

impl LeafDistribution {
    pub fn get(&self, bits: &[u8]) -> f64 {
        self.probs[to_index(bits)]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |k, &b| (k << 1) | b as usize)
}

fn to_bits(k: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((k >> (n - 1 - i)) & 1) as u8).collect()
}

fn bitstring(bits: &[u8]) -> String {
    bits.iter().map(|&b| char::from(b'0' + b)).collect()
}

/// Sum over all interior states of the product of transition entries,
/// uniform root.
pub fn leaf_distribution(
    tree: &RootedBinaryTree,
    params: &ClockParams,
) -> Result<LeafDistribution> {
    params.validate(tree)?;
    let n = tree.n_leaves();
    let k = tree.n_interior();
    let nodes = tree.n_nodes();
    // flip probability along the edge above each node
    let mut flip = vec![0.0; nodes];
    for v in 0..nodes {
        if tree.parent(v).is_some() {
            let t = params.branch_length(tree, v);
            if !(t > 0.0) {
                let i = tree.interior_index(v).unwrap_or(usize::MAX);
                return Err(Error::BranchLength(t, i));
            }
            flip[v] = (1.0 - (-2.0 * params.alpha * t).exp()) / 2.0;
        }
    }
    let m = |v: usize, a: u8, b: u8| if a == b { 1.0 - flip[v] } else { flip[v] };
    let probs: Vec<f64> = (0..1usize << n)
        .into_par_iter()
        .map(|x| {
            let leaf_bits = to_bits(x, n);
            let mut state = vec![0u8; nodes];
            for (p, &l) in tree.leaves().iter().enumerate() {
                state[l] = leaf_bits[p];
            }
            let mut total = 0.0;
            for y in 0..1usize << k {
                for (i, &v) in tree.interior_nodes().iter().enumerate() {
                    state[v] = ((y >> i) & 1) as u8;
                }
                let mut w = 0.5;
                for v in 0..nodes {
                    if let Some(p) = tree.parent(v) {
                        w *= m(v, state[p], state[v]);
                    }
                }
                total += w;
            }
            total
        })
        .collect();
    Ok(LeafDistribution { n, probs })
}

/// Unnormalised Walsh-Hadamard transform.
pub fn hadamard(values: &[f64]) -> Vec<f64> {
    let mut a = values.to_vec();
    let mut h = 1;
    while h < a.len() {
        for i in (0..a.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (a[j], a[j + h]);
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
    a
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierPoint {
    /// even labelings only
    pub qhat: BTreeMap<String, f64>,
    pub rcoords: BTreeMap<String, f64>,
    pub max_odd: f64,
}

/// Hadamard transform of the distribution, collapsed to top-vector classes.
pub fn fourier_transform(
    tree: &RootedBinaryTree,
    dist: &LeafDistribution,
    tol: f64,
) -> Result<FourierPoint> {
    let n = dist.n;
    if n != tree.n_leaves() {
        return Err(Error::LengthMismatch {
            expected: tree.n_leaves(),
            got: n,
        });
    }
    let all = hadamard(&dist.probs);
    let mut qhat = BTreeMap::new();
    let mut rcoords: BTreeMap<String, f64> = BTreeMap::new();
    let mut max_odd: f64 = 0.0;
    for (k, &val) in all.iter().enumerate() {
        let bits = to_bits(k, n);
        let key = bitstring(&bits);
        if k.count_ones() % 2 == 1 {
            if val.abs() > tol {
                return Err(Error::NonzeroOdd { key, value: val });
            }
            max_odd = max_odd.max(val.abs());
            continue;
        }
        let top = top_vector_of(tree, &bits).to_string();
        if let Some(&prev) = rcoords.get(&top) {
            if (prev - val).abs() > tol {
                return Err(Error::ClassDisagreement {
                    key: top,
                    a: prev,
                    b: val,
                });
            }
        } else {
            rcoords.insert(top, val);
        }
        qhat.insert(key, val);
    }
    Ok(FourierPoint {
        qhat,
        rcoords,
        max_odd,
    })
}

/// Node parameters (b_0, b_1) per interior index, from the path products a_i^v.
pub fn b_parameters(tree: &RootedBinaryTree, params: &ClockParams) -> (Vec<f64>, Vec<f64>) {
    let k = tree.n_interior();
    let a0 = vec![1.0; k];
    let a1: Vec<f64> = params
        .heights
        .iter()
        .map(|h| (-2.0 * params.alpha * h).exp())
        .collect();
    let b1 = (0..k)
        .map(|i| {
            if tree.parent_index(i).is_none() {
                a1[i] * a1[i]
            } else {
                a1[i] * a1[i] / a0[i]
            }
        })
        .collect();
    (a0, b1)
}

/// Value of the monomial parametrisation at a top vector.
pub fn monomial_value(b0: &[f64], b1: &[f64], top: &TopVector) -> f64 {
    top.bits
        .iter()
        .enumerate()
        .map(|(i, &t)| if t == 1 { b1[i] } else { b0[i] })
        .product()
}

pub fn evaluate(point: &FourierPoint, b: &MarkedBinomial) -> Result<f64> {
    let term = |t: &[String]| -> Result<f64> {
        t.iter()
            .map(|k| {
                point
                    .rcoords
                    .get(k)
                    .copied()
                    .ok_or_else(|| Error::UnknownKey(k.clone()))
            })
            .product()
    };
    Ok(term(&b.plus)? - term(&b.minus)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub binomial: String,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub residuals: Vec<Residual>,
    pub max_residual: f64,
    pub pass: bool,
}

/// Evaluate every binomial on the Fourier coordinates of random clock draws.
pub fn invariant_check(
    tree: &RootedBinaryTree,
    gens: &[MarkedBinomial],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<InvariantReport> {
    let per_sample: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let params = ClockParams::sample_seeded(tree, seed, s as u64);
            let dist = leaf_distribution(tree, &params)?;
            let point = fourier_transform(tree, &dist, tol)?;
            gens.iter()
                .map(|g| Ok(evaluate(&point, g)?.abs()))
                .collect()
        })
        .collect::<Result<_>>()?;
    let residuals: Vec<Residual> = gens
        .iter()
        .enumerate()
        .map(|(j, g)| Residual {
            binomial: g.to_string(),
            max_residual: per_sample.iter().map(|r| r[j]).fold(0.0, f64::max),
        })
        .collect();
    let max_residual = residuals.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    Ok(InvariantReport {
        seed,
        samples,
        tol,
        residuals,
        max_residual,
        pass: max_residual <= tol,
    })
}
