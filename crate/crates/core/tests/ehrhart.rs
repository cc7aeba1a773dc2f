mod common;

use cfnmc::ehrhart::*;
use cfnmc::polytope::{build_rt, hull_facets, Polytope};
use cfnmc::tree::{apply_nni, nni_triples, RootedBinaryTree};
use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// Seidel triangle for the Euler zig-zag numbers.
fn euler_ref(n: usize) -> u64 {
    let mut row = vec![1u64];
    let mut out = vec![1u64];
    for k in 1..=n {
        let mut next = vec![0u64; k + 1];
        if k % 2 == 1 {
            for j in 1..=k {
                next[j] = next[j - 1] + row[j - 1];
            }
            out.push(next[k]);
        } else {
            for j in (0..k).rev() {
                next[j] = next[j + 1] + row[j];
            }
            out.push(next[0]);
        }
        row = next;
    }
    out[n]
}

/// Brute force over every point of the box [0, m]^d against the hull facets.
fn brute_count(p: &Polytope, m: usize) -> u64 {
    let facets = hull_facets(&p.vertices).unwrap();
    let d = p.ambient();
    let m = m as i64;
    let mut x = vec![0i64; d];
    let mut count = 0;
    loop {
        if facets.iter().all(|f| f.lhs(&x) <= m * f.rhs) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == d {
                return count;
            }
            x[k] += 1;
            if x[k] <= m {
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

/// Order-preserving maps from the fence on n elements to {0..m}, by listing
/// every map.
fn brute_order_preserving(n: usize, m: usize) -> u64 {
    let total = (m + 1).pow(n as u32);
    (0..total)
        .filter(|&k| {
            let f: Vec<usize> = (0..n)
                .map(|i| k / (m + 1).pow(i as u32) % (m + 1))
                .collect();
            (0..n - 1).all(|i| {
                if i % 2 == 0 {
                    f[i] <= f[i + 1]
                } else {
                    f[i] >= f[i + 1]
                }
            })
        })
        .count() as u64
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn trivial_counts() {
    let p = build_rt(&tree("((1,2),3);"));
    assert_eq!(count_lattice_points(&p, 0).unwrap(), 1);
    assert_eq!(count_lattice_points(&p, 2).unwrap(), 6);
    for m in 0..6 {
        assert_eq!(
            count_lattice_points(&p, m).unwrap(),
            ((m + 1) * (m + 2) / 2) as u64
        );
    }
    let e = ehrhart_polynomial(&p).unwrap().polynomial;
    assert_eq!(e.coefficients, [rat(1, 1), rat(3, 2), rat(1, 2)]);
}

#[test]
fn missing_facets_error() {
    let mut p = build_rt(&tree(FIVE_LEAF));
    p.facets.clear();
    assert!(count_lattice_points(&p, 1).is_err());
}

#[test]
fn first_dilate_is_vertex_count() {
    for t in shapes(2, 8) {
        let p = build_rt(&t);
        assert_eq!(count_lattice_points(&p, 1).unwrap(), fib(t.n_leaves()));
        assert_eq!(p.vertices.len() as u64, fib(t.n_leaves()));
    }
}

#[test]
fn box_scan_matches_vertex_sums() {
    for t in shapes(3, 6) {
        let p = build_rt(&t);
        for m in 0..=p.dim + 1 {
            let scan = count_lattice_points(&p, m).unwrap();
            assert_eq!(
                scan,
                count_vertex_sums(&p.vertices, m),
                "{} m={m}",
                t.to_newick()
            );
            if p.dim <= 4 && m <= 4 {
                assert_eq!(scan, brute_count(&p, m));
            }
        }
    }
}

#[test]
fn polynomial_out_of_sample() {
    for t in shapes(3, 6) {
        let p = build_rt(&t);
        let data = ehrhart_polynomial(&p).unwrap();
        for m in 0..=p.dim + 2 {
            let want = BigRational::from_integer(count_lattice_points(&p, m).unwrap().into());
            assert_eq!(data.polynomial.eval(m), want);
        }
        let h = data.polynomial.h_star();
        assert!(h.iter().all(|x| *x >= BigInt::from(0)));
        let sum: BigInt = h.iter().sum();
        assert_eq!(sum, data.polynomial.normalized_volume().unwrap());
    }
}

#[test]
fn interpolation_of_known_sequence() {
    // (m+1)^2
    let e = interpolate(&[1, 4, 9]);
    assert_eq!(e.coefficients, [rat(1, 1), rat(2, 1), rat(1, 1)]);
    assert_eq!(e.degree(), 2);
    assert_eq!(e.eval(10), rat(121, 1));
}

#[test]
fn reference_sequences() {
    let fibs: Vec<u64> = (0..10).map(fib).collect();
    assert_eq!(fibs, [1, 1, 2, 3, 5, 8, 13, 21, 34, 55]);
    let e: Vec<BigInt> = (0..8).map(euler_zigzag).collect();
    let listed = [1, 1, 1, 2, 5, 16, 61, 272];
    assert_eq!(e, listed.map(BigInt::from));
    for n in 0..20 {
        assert_eq!(euler_zigzag(n), BigInt::from(euler_ref(n)));
    }
}

#[test]
fn volumes_are_euler_numbers() {
    for n in 3..=7 {
        let mut polys = Vec::new();
        for t in shapes(n, n) {
            let p = build_rt(&t);
            let data = ehrhart_polynomial(&p).unwrap();
            assert_eq!(
                data.polynomial.normalized_volume().unwrap(),
                euler_zigzag(n - 1)
            );
            assert_eq!(normalized_volume(&p).unwrap(), euler_zigzag(n - 1));
            polys.push(data.polynomial.coefficients);
        }
        assert!(polys.windows(2).all(|w| w[0] == w[1]), "n = {n}");
    }
    let c5 = build_rt(&RootedBinaryTree::caterpillar(5).unwrap());
    assert_eq!(normalized_volume(&c5).unwrap(), BigInt::from(5));
}

#[test]
fn five_leaf_polynomial() {
    let e = ehrhart_polynomial(&build_rt(&tree(FIVE_LEAF)))
        .unwrap()
        .polynomial;
    assert_eq!(
        e.coefficient_strings(),
        ["1", "11/4", "67/24", "5/4", "5/24"]
    );
}

#[test]
fn caterpillar_counts_order_preserving_maps() {
    for n in 1..=6 {
        let t = RootedBinaryTree::caterpillar(n + 1).unwrap();
        let p = build_rt(&t);
        for m in 0..=5 {
            let want = brute_order_preserving(n, m);
            assert_eq!(zigzag_order_preserving_count(n, m), want);
            assert_eq!(count_lattice_points(&p, m).unwrap(), want, "n={n} m={m}");
        }
    }
}

#[test]
fn nni_counts() {
    let t = RootedBinaryTree::caterpillar(5).unwrap();
    for tr in nni_triples(&t) {
        let c = nni_count_check(&t, tr, 2).unwrap();
        assert!(c.equal);
        let t2 = apply_nni(&t, tr).unwrap();
        assert_eq!(c.count_t, count_lattice_points(&build_rt(&t), 2).unwrap());
        assert_eq!(c.count_t2, count_lattice_points(&build_rt(&t2), 2).unwrap());
        let one = nni_count_check(&t, tr, 1).unwrap();
        assert_eq!((one.count_t, one.count_t2), (fib(5), fib(5)));
    }
}

#[test]
fn nni_vertex_bijection() {
    for t in shapes(4, 7) {
        for tr in nni_triples(&t) {
            let c = nni_vertex_check(&t, tr).unwrap();
            assert!(c.bijection && c.involution);
            assert_eq!(c.vertices as u64, fib(t.n_leaves()));
            let imgs = vertex_images(&t, tr).unwrap();
            assert_eq!(imgs.iter().filter(|x| !x.2).count(), c.nonmaintaining);
        }
    }
}

#[test]
fn df_audit_small() {
    for t in shapes(5, 6) {
        for tr in nni_triples(&t) {
            for m in 1..=3 {
                let a = df_compression_audit(&t, tr, m).unwrap();
                assert!(a.pass, "{} m={m} {:?}", t.to_newick(), a.counterexample);
                assert!(a.points as u64 == count_lattice_points(&build_rt(&t), m).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn nni_preserves_counts(t in arb_tree(4, 7), k in any::<usize>(), m in 0usize..4) {
        let triples = nni_triples(&t);
        let tr = triples[k % triples.len()];
        let c = nni_count_check(&t, tr, m).unwrap();
        prop_assert!(c.equal);
        prop_assert_eq!(c.count_t, count_vertex_sums(&build_rt(&t).vertices, m));
    }
}
