//! Lattice points in dilates, Ehrhart polynomials and the NNI count checks.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::rref;
use crate::paths::{classify_maintaining, enumerate_top_vectors, is_blocked, TopVector};
use crate::polytope::{build_rt, Polytope};
use crate::tree::{apply_nni, NniTriple, RootedBinaryTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DilateCount {
    pub m: usize,
    pub count: u64,
}

/// Integer points of mP by a pruned scan of the scaled bounding box.
pub fn count_lattice_points(p: &Polytope, m: usize) -> Result<u64> {
    if p.facets.is_empty() {
        return Err(Error::MissingFacets);
    }
    let d = p.ambient();
    if d == 0 {
        return Ok(1);
    }
    let m = m as i64;
    let lo: Vec<i64> = (0..d)
        .map(|j| m * p.vertices.iter().map(|v| v[j]).min().unwrap_or(0))
        .collect();
    let hi: Vec<i64> = (0..d)
        .map(|j| m * p.vertices.iter().map(|v| v[j]).max().unwrap_or(0))
        .collect();
    // equalities are scanned as two inequalities
    let mut rows: Vec<(Vec<i64>, i64)> = Vec::new();
    for f in &p.facets {
        rows.push((f.coeffs.clone(), m * f.rhs));
        if f.is_equality() {
            rows.push((f.coeffs.iter().map(|c| -c).collect(), -m * f.rhs));
        }
    }
    // suffix minima of each row's remaining contribution
    let slack: Vec<Vec<i64>> = rows
        .iter()
        .map(|(c, _)| {
            let mut s = vec![0i64; d + 1];
            for j in (0..d).rev() {
                s[j] = s[j + 1] + (c[j] * lo[j]).min(c[j] * hi[j]);
            }
            s
        })
        .collect();
    let scan = |first: i64| -> u64 {
        let mut partial: Vec<i64> = rows.iter().map(|(c, _)| c[0] * first).collect();
        if rows
            .iter()
            .zip(&partial)
            .zip(&slack)
            .any(|(((_, r), s), sl)| s + sl[1] > *r)
        {
            return 0;
        }
        let mut x = vec![0i64; d];
        x[0] = first;
        count_rec(1, &mut x, &mut partial, &rows, &slack, &lo, &hi)
    };
    Ok((lo[0]..=hi[0]).into_par_iter().map(scan).sum())
}

fn count_rec(
    j: usize,
    x: &mut [i64],
    partial: &mut [i64],
    rows: &[(Vec<i64>, i64)],
    slack: &[Vec<i64>],
    lo: &[i64],
    hi: &[i64],
) -> u64 {
    let d = x.len();
    if j == d {
        return 1;
    }
    let mut total = 0;
    for v in lo[j]..=hi[j] {
        let mut ok = true;
        for (k, (c, r)) in rows.iter().enumerate() {
            if partial[k] + c[j] * v + slack[k][j + 1] > *r {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        for (k, (c, _)) in rows.iter().enumerate() {
            partial[k] += c[j] * v;
        }
        x[j] = v;
        total += count_rec(j + 1, x, partial, rows, slack, lo, hi);
        for (k, (c, _)) in rows.iter().enumerate() {
            partial[k] -= c[j] * v;
        }
    }
    total
}

/// Distinct sums of m vertices. Equals the lattice point count of mP when P is normal.
pub fn count_vertex_sums(vertices: &[Vec<i64>], m: usize) -> u64 {
    let d = vertices.first().map_or(0, |v| v.len());
    let mut cur: HashSet<Vec<i64>> = HashSet::new();
    cur.insert(vec![0; d]);
    for _ in 0..m {
        let mut next = HashSet::with_capacity(cur.len() * 2);
        for s in &cur {
            for v in vertices {
                next.insert(s.iter().zip(v).map(|(a, b)| a + b).collect::<Vec<i64>>());
            }
        }
        cur = next;
    }
    cur.len() as u64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EhrhartPolynomial {
    /// coefficients of m^0, m^1, ...
    pub coefficients: Vec<BigRational>,
}

impl EhrhartPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, m: usize) -> BigRational {
        let x = BigRational::from_integer(BigInt::from(m));
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &x + c)
    }

    pub fn normalized_volume(&self) -> Result<BigInt> {
        let lead = self
            .coefficients
            .last()
            .cloned()
            .unwrap_or_else(BigRational::one);
        let fact: BigInt = (1..=self.degree()).map(BigInt::from).product();
        let v = lead * BigRational::from_integer(fact);
        if !v.is_integer() {
            return Err(Error::NonIntegerVolume(v.to_string()));
        }
        Ok(v.to_integer())
    }

    /// h*_k = Σ_j (-1)^j C(d+1, j) i(k - j), for k = 0..d.
    pub fn h_star(&self) -> Vec<BigInt> {
        let d = self.degree();
        (0..=d)
            .map(|k| {
                let mut s = BigRational::zero();
                for j in 0..=k {
                    let c =
                        BigRational::from_integer(binomial(BigInt::from(d + 1), BigInt::from(j)));
                    let term = c * self.eval(k - j);
                    if j % 2 == 0 {
                        s += term;
                    } else {
                        s -= term;
                    }
                }
                s.to_integer()
            })
            .collect()
    }

    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coefficients.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for EhrhartPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        write!(f, "m")?;
                    } else {
                        write!(f, "m^{k}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Interpolate through (m, i(m)) for m = 0..=dim; i(dim+1) is checked.
pub fn interpolate(counts: &[u64]) -> EhrhartPolynomial {
    let n = counts.len();
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|m| {
            let mut r: Vec<BigRational> = (0..n)
                .map(|k| BigRational::from_integer(BigInt::from(m).pow(k as u32)))
                .collect();
            r.push(BigRational::from_integer(BigInt::from(counts[m])));
            r
        })
        .collect();
    rref(&mut rows);
    EhrhartPolynomial {
        coefficients: rows.into_iter().map(|r| r[n].clone()).collect(),
    }
}

#[derive(Clone, Debug)]
pub struct EhrhartData {
    pub polynomial: EhrhartPolynomial,
    pub counts: Vec<DilateCount>,
}

pub fn ehrhart_polynomial(p: &Polytope) -> Result<EhrhartData> {
    let d = p.dim;
    let counts: Vec<u64> = (0..=d + 1)
        .map(|m| count_lattice_points(p, m))
        .collect::<Result<_>>()?;
    let poly = interpolate(&counts[..=d]);
    let predicted = poly.eval(d + 1);
    if predicted != BigRational::from_integer(BigInt::from(counts[d + 1])) {
        return Err(Error::Interpolation {
            m: d + 1,
            predicted: predicted.to_string(),
            counted: counts[d + 1].to_string(),
        });
    }
    Ok(EhrhartData {
        polynomial: poly,
        counts: counts
            .iter()
            .enumerate()
            .map(|(m, &count)| DilateCount { m, count })
            .collect(),
    })
}

pub fn normalized_volume(p: &Polytope) -> Result<BigInt> {
    ehrhart_polynomial(p)?.polynomial.normalized_volume()
}

/// Euler zig-zag numbers E_0, E_1, ... (1, 1, 1, 2, 5, 16, 61, 272, ...).
pub fn euler_zigzag(n: usize) -> BigInt {
    // Seidel-Entringer triangle
    let mut row = vec![BigInt::one()];
    for k in 1..=n {
        let mut next = vec![BigInt::zero(); k + 1];
        for j in 1..=k {
            next[j] = &next[j - 1] + &row[k - j];
        }
        row = next;
    }
    row.last().cloned().unwrap_or_else(BigInt::one)
}

/// Fibonacci-type count with F_0 = F_1 = 1.
pub fn fib(n: usize) -> u64 {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 0..n {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

/// Order-preserving maps from the zig-zag poset p1 < p2 > p3 < ... on n
/// elements to the chain {0..m}.
pub fn zigzag_order_preserving_count(n: usize, m: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    let mut ways = vec![1u64; m + 1];
    for i in 1..n {
        let mut next = vec![0u64; m + 1];
        for (v, slot) in next.iter_mut().enumerate() {
            *slot = if i % 2 == 1 {
                // p_i < p_{i+1}: value v is at least the previous
                ways[..=v].iter().sum()
            } else {
                ways[v..].iter().sum()
            };
        }
        ways = next;
    }
    ways.iter().sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NniCount {
    pub m: usize,
    pub count_t: u64,
    pub count_t2: u64,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DfAudit {
    pub m: usize,
    pub points: usize,
    pub minimal_representations: usize,
    pub pass: bool,
    /// a lattice point with a minimal representation that is not df-compressed
    pub counterexample: Option<(Vec<i64>, Vec<String>)>,
}

pub fn nni_count_check(t: &RootedBinaryTree, triple: NniTriple, m: usize) -> Result<NniCount> {
    let t2 = apply_nni(t, triple)?;
    let a = count_lattice_points(&build_rt(t), m)?;
    let b = count_lattice_points(&build_rt(&t2), m)?;
    Ok(NniCount {
        m,
        count_t: a,
        count_t2: b,
        equal: a == b,
    })
}

/// For every lattice point of mR_T, every representation of minimum
/// nonmaintaining count must be df-compressed.
pub fn df_compression_audit(t: &RootedBinaryTree, triple: NniTriple, m: usize) -> Result<DfAudit> {
    if m > 3 {
        return Err(Error::OutOfRange {
            what: "dilate",
            value: m,
            range: "<= 3",
        });
    }
    let t2 = apply_nni(t, triple)?;
    let verts = enumerate_top_vectors(t);
    let bi = t.interior_index(triple.b).unwrap();
    let ci = t.interior_index(triple.c).unwrap();
    let d = triple.d(t);
    let f = triple.f(t);
    struct Info {
        non: bool,
        has_b: bool,
        has_c: bool,
        d_blocked: bool,
        f_blocked: bool,
    }
    let info: Vec<Info> = verts
        .iter()
        .map(|v| {
            let c = classify_maintaining(t, &t2, triple, v).expect("valid vertex");
            Info {
                non: !c.maintaining,
                has_b: v.get(bi),
                has_c: v.get(ci),
                d_blocked: is_blocked(t, v, d),
                f_blocked: is_blocked(t, v, f),
            }
        })
        .collect();
    let mut reps: BTreeMap<Vec<i64>, Vec<Vec<usize>>> = BTreeMap::new();
    let n = verts.len();
    let mut idx = vec![0usize; m];
    loop {
        let mut s = vec![0i64; t.n_interior()];
        for &k in &idx {
            for (a, &b) in s.iter_mut().zip(&verts[k].bits) {
                *a += b as i64;
            }
        }
        reps.entry(s).or_default().push(idx.clone());
        if !next_multiset(&mut idx, n) {
            break;
        }
    }
    let compressed = |rep: &[usize]| -> bool {
        let neutral = |k: &usize| !info[*k].has_b && !info[*k].has_c;
        let d_ok = rep
            .iter()
            .filter(|k| neutral(k))
            .all(|&k| info[k].d_blocked)
            || rep
                .iter()
                .filter(|&&k| info[k].has_b)
                .all(|&k| !info[k].non);
        let f_ok = rep
            .iter()
            .filter(|k| neutral(k))
            .all(|&k| info[k].f_blocked)
            || rep
                .iter()
                .filter(|&&k| info[k].has_c)
                .all(|&k| !info[k].non);
        d_ok && f_ok
    };
    let mut minimal_representations = 0;
    let mut counterexample = None;
    for (point, rs) in &reps {
        let nonc = |r: &Vec<usize>| r.iter().filter(|&&k| info[k].non).count();
        let best = rs.iter().map(nonc).min().unwrap();
        for r in rs.iter().filter(|r| nonc(r) == best) {
            minimal_representations += 1;
            if counterexample.is_none() && !compressed(r) {
                counterexample = Some((
                    point.clone(),
                    r.iter().map(|&k| verts[k].to_string()).collect(),
                ));
            }
        }
    }
    Ok(DfAudit {
        m,
        points: reps.len(),
        minimal_representations,
        pass: counterexample.is_none(),
        counterexample,
    })
}

/// Advance a nondecreasing index tuple; false when exhausted.
fn next_multiset(idx: &mut [usize], n: usize) -> bool {
    for p in (0..idx.len()).rev() {
        if idx[p] + 1 < n {
            idx[p] += 1;
            let v = idx[p];
            idx[p + 1..].iter_mut().for_each(|q| *q = v);
            return true;
        }
    }
    false
}

/// φ^{T,T'} images of all vertices of R_T, in R_{T'} indexing.
pub fn vertex_images(
    t: &RootedBinaryTree,
    triple: NniTriple,
) -> Result<Vec<(TopVector, TopVector, bool)>> {
    let t2 = apply_nni(t, triple)?;
    enumerate_top_vectors(t)
        .into_iter()
        .map(|v| {
            let c = classify_maintaining(t, &t2, triple, &v)?;
            Ok((v, c.image, c.maintaining))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NniVertexCheck {
    pub vertices: usize,
    pub nonmaintaining: usize,
    /// φ^{T,T'} maps vert R_T onto vert R_{T'} injectively
    pub bijection: bool,
    /// φ^{T',T} ∘ φ^{T,T'} is the identity
    pub involution: bool,
}

pub fn nni_vertex_check(t: &RootedBinaryTree, triple: NniTriple) -> Result<NniVertexCheck> {
    let t2 = apply_nni(t, triple)?;
    let imgs = vertex_images(t, triple)?;
    let target: BTreeSet<TopVector> = enumerate_top_vectors(&t2).into_iter().collect();
    let got: BTreeSet<TopVector> = imgs.iter().map(|(_, w, _)| w.clone()).collect();
    let bijection = got.len() == imgs.len() && got == target;
    let mut involution = true;
    for (v, w, _) in &imgs {
        let back = classify_maintaining(&t2, t, triple, w)?;
        involution &= &back.image == v;
    }
    Ok(NniVertexCheck {
        vertices: imgs.len(),
        nonmaintaining: imgs.iter().filter(|x| !x.2).count(),
        bijection,
        involution,
    })
}
