//! Exact convex hull by double description. Used to check the closed-form
//! facet lists.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{Inequality, InequalityKind};
use crate::error::{Error, Result};
use crate::linalg::{det_i128, primitive, primitive_from_rationals, rref, to_rat};

/// Affine hull of a point set, parametrised by a subset of free coordinates.
#[derive(Clone, Debug)]
pub struct AffineHull {
    pub ambient: usize,
    pub dim: usize,
    /// coordinates that parametrise the hull
    pub free: Vec<usize>,
    base: Vec<BigRational>,
    /// rows of the RREF of the difference space, one per free coordinate
    basis: Vec<Vec<BigRational>>,
}

impl AffineHull {
    pub fn of(points: &[Vec<i64>]) -> Self {
        let ambient = points.first().map_or(0, |p| p.len());
        let base: Vec<BigRational> = points
            .first()
            .map(|p| p.iter().map(|&x| to_rat(x)).collect())
            .unwrap_or_default();
        let mut diffs: Vec<Vec<BigRational>> = points
            .iter()
            .skip(1)
            .map(|p| p.iter().zip(&base).map(|(&a, b)| to_rat(a) - b).collect())
            .collect();
        let free = rref(&mut diffs);
        diffs.truncate(free.len());
        AffineHull {
            ambient,
            dim: free.len(),
            free,
            base,
            basis: diffs,
        }
    }

    pub fn is_full(&self) -> bool {
        self.dim == self.ambient
    }

    /// Integer equations c·x = r cutting out the hull.
    pub fn equalities(&self) -> Vec<(Vec<i64>, i64)> {
        let mut out = Vec::new();
        for j in 0..self.ambient {
            if self.free.contains(&j) {
                continue;
            }
            // x_j - sum_k basis[k][j] x_{free_k} = base_j - sum_k basis[k][j] base_{free_k}
            let mut c = vec![BigRational::zero(); self.ambient + 1];
            c[j] = to_rat(1);
            let mut rhs = self.base[j].clone();
            for (k, &s) in self.free.iter().enumerate() {
                let a = &self.basis[k][j];
                c[s] -= a;
                rhs -= a * &self.base[s];
            }
            c[self.ambient] = rhs;
            let p = primitive_from_rationals(&c);
            let coeffs = p[..self.ambient]
                .iter()
                .map(|x| x.to_i64().unwrap())
                .collect();
            out.push((coeffs, p[self.ambient].to_i64().unwrap()));
        }
        out
    }

    /// Project a point onto the free coordinates.
    pub fn project(&self, p: &[i64]) -> Vec<i64> {
        self.free.iter().map(|&s| p[s]).collect()
    }

    /// Rewrite c·x ≤ r in the free coordinates, jointly primitive. Returns
    /// `None` when the left side vanishes identically on the hull.
    pub fn reduce(&self, coeffs: &[i64], rhs: i64) -> Option<(Vec<i64>, i64)> {
        let mut out = vec![BigRational::zero(); self.dim + 1];
        let mut constant = BigRational::zero();
        for (k, &s) in self.free.iter().enumerate() {
            out[k] = to_rat(coeffs[s]);
        }
        for j in 0..self.ambient {
            if self.free.contains(&j) || coeffs[j] == 0 {
                continue;
            }
            let c = to_rat(coeffs[j]);
            let mut cst = self.base[j].clone();
            for (k, &s) in self.free.iter().enumerate() {
                let a = &self.basis[k][j];
                out[k] += &c * a;
                cst -= a * &self.base[s];
            }
            constant += c * cst;
        }
        if out[..self.dim].iter().all(|x| x.is_zero()) {
            return None;
        }
        out[self.dim] = to_rat(rhs) - constant;
        let p = primitive_from_rationals(&out);
        let v: Vec<i64> = p.iter().map(|x| x.to_i64().unwrap()).collect();
        Some((v[..self.dim].to_vec(), v[self.dim]))
    }
}

/// Facets of a full-dimensional point set.
pub fn hull_facets(vertices: &[Vec<i64>]) -> Result<Vec<Inequality>> {
    let h = AffineHull::of(vertices);
    if !h.is_full() || vertices.is_empty() {
        return Err(Error::Degenerate {
            dim: h.dim,
            ambient: h.ambient,
            equalities: h.equalities(),
        });
    }
    Ok(facets_in(&h, vertices)
        .into_iter()
        .map(|(coeffs, rhs)| Inequality {
            coeffs,
            rhs,
            kind: InequalityKind::Hull,
        })
        .collect())
}

/// Facets in the free coordinates of the affine hull, as jointly primitive
/// (coeffs, rhs) with coeffs·x ≤ rhs, sorted.
pub fn facets_in(h: &AffineHull, vertices: &[Vec<i64>]) -> Vec<(Vec<i64>, i64)> {
    if h.dim == 0 {
        return Vec::new();
    }
    // cone {(a, beta) : a·v + beta >= 0}; its extreme rays give a·x + beta >= 0
    let rows: Vec<Vec<i128>> = vertices
        .iter()
        .map(|v| {
            let mut r: Vec<i128> = h.project(v).iter().map(|&x| x as i128).collect();
            r.push(1);
            r
        })
        .collect();
    let rays = extreme_rays(&rows);
    let mut out: Vec<(Vec<i64>, i64)> = rays
        .into_iter()
        .filter(|r| r[..h.dim].iter().any(|&x| x != 0))
        .map(|r| {
            let coeffs = r[..h.dim].iter().map(|&x| (-x) as i64).collect();
            (coeffs, r[h.dim] as i64)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Clone)]
struct Ray {
    v: Vec<i128>,
    zeros: Vec<u64>,
}

fn bit_set(z: &mut [u64], i: usize) {
    z[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Extreme rays of the pointed cone {y : row·y >= 0 for all rows}.
fn extreme_rays(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let d = rows[0].len();
    let words = rows.len().div_ceil(64);
    // greedy choice of d independent rows
    let mut chosen: Vec<usize> = Vec::new();
    let mut ech: Vec<Vec<BigRational>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial = ech.clone();
        trial.push(
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        );
        let rank = rref(&mut trial).len();
        if rank > chosen.len() {
            chosen.push(i);
            trial.truncate(rank);
            ech = trial;
            if chosen.len() == d {
                break;
            }
        }
    }
    assert_eq!(chosen.len(), d, "cone is not pointed");
    let mut rays: Vec<Ray> = Vec::new();
    for (j, &rj) in chosen.iter().enumerate() {
        let others: Vec<&Vec<i128>> = chosen
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &i)| &rows[i])
            .collect();
        // kernel vector of the (d-1)×d matrix by signed minors
        let mut v: Vec<i128> = (0..d)
            .map(|col| {
                let minor: Vec<Vec<i128>> = others
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != col)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let s = if col % 2 == 0 { 1 } else { -1 };
                s * det_i128(&minor)
            })
            .collect();
        if dot(&v, &rows[rj]) < 0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        primitive(&mut v);
        let mut zeros = vec![0u64; words];
        for (k, &i) in chosen.iter().enumerate() {
            if k != j {
                bit_set(&mut zeros, i);
            }
        }
        rays.push(Ray { v, zeros });
    }
    let mut processed: Vec<bool> = vec![false; rows.len()];
    for &i in &chosen {
        processed[i] = true;
    }
    for i in 0..rows.len() {
        if processed[i] {
            continue;
        }
        processed[i] = true;
        let s: Vec<i128> = rays.iter().map(|r| dot(&r.v, &rows[i])).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| s[k] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| s[k] < 0).collect();
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if s[k] == 0 {
                    bit_set(&mut r.zeros, i);
                }
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = rays[p]
                    .zeros
                    .iter()
                    .zip(&rays[q].zeros)
                    .map(|(a, b)| a & b)
                    .collect();
                let cnt: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (cnt as usize) + 2 < d {
                    continue;
                }
                let adjacent =
                    (0..rays.len()).all(|k| k == p || k == q || !subset(&common, &rays[k].zeros));
                if !adjacent {
                    continue;
                }
                let mut v: Vec<i128> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(&a, &b)| s[p] * a - s[q] * b)
                    .collect();
                primitive(&mut v);
                let mut zeros = common;
                bit_set(&mut zeros, i);
                next.push(Ray { v, zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (k, r) in rays.into_iter().enumerate() {
            if s[k] > 0 {
                kept.push(r);
            } else if s[k] == 0 {
                let mut r = r;
                bit_set(&mut r.zeros, i);
                kept.push(r);
            }
        }
        kept.extend(next);
        rays = kept;
    }
    rays.into_iter().map(|r| r.v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrant_rays() {
        let mut rays = extreme_rays(&[vec![1, 0], vec![0, 1], vec![1, 1]]);
        rays.sort();
        assert_eq!(rays, [vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn square_pyramid_cone() {
        // cone over a square: four rays
        let rows = vec![vec![1, 0, 0], vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 1]];
        assert_eq!(extreme_rays(&rows).len(), 4);
    }

    #[test]
    fn affine_hull_of_segment() {
        let h = AffineHull::of(&[vec![0, 0, 1], vec![1, 1, 1]]);
        assert_eq!(h.dim, 1);
        assert!(!h.is_full());
        assert_eq!(h.equalities().len(), 2);
    }
}
