mod common;

use std::collections::BTreeSet;

use cfnmc::paths::{enumerate_top_vectors, even_labelings};
use cfnmc::polytope::*;
use cfnmc::tree::{enumerate_clusters, order_ideals, OrderIdeal, RootedBinaryTree};
use common::*;
use proptest::prelude::*;

fn ineq(coeffs: Vec<i64>, rhs: i64) -> (Vec<i64>, i64) {
    (coeffs, rhs)
}

fn as_set(fs: &[Inequality]) -> BTreeSet<(Vec<i64>, i64)> {
    fs.iter().map(|f| (f.coeffs.clone(), f.rhs)).collect()
}

#[test]
fn small_rt_vertices() {
    let p = build_rt(&tree("((1,2),3);"));
    assert_eq!(p.vertices, [vec![0, 0], vec![0, 1], vec![1, 0]]);
    assert_eq!(p.dim, 2);
    assert!(p.vertices_satisfy_facets());
    let p = build_rt(&tree(FIVE_LEAF));
    assert_eq!(p.vertices.len(), 8);
    assert_eq!(
        build_rt(&RootedBinaryTree::caterpillar(8).unwrap())
            .vertices
            .len(),
        34
    );
}

#[test]
fn simplex_and_square_hulls() {
    let simplex = hull_facets(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
    let want: BTreeSet<_> = [
        ineq(vec![-1, 0], 0),
        ineq(vec![0, -1], 0),
        ineq(vec![1, 1], 1),
    ]
    .into();
    assert_eq!(as_set(&simplex), want);
    let square = hull_facets(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
    assert_eq!(square.len(), 4);
    assert!(hull_facets(&[vec![0, 0], vec![1, 1]]).is_err());
}

#[test]
fn seven_leaf_facets() {
    let t = tree(SEVEN_LEAF);
    let idx = |l: &[u32]| node_with_leaves(&t, l);
    let (a, b, c) = (0, idx(&[1, 2, 3, 4, 5]), idx(&[1, 2, 3, 4]));
    let (d, e, f) = (idx(&[1, 2]), idx(&[3, 4]), idx(&[6, 7]));
    let fs = facets_corollary(&t);
    let count = |k| fs.iter().filter(|x| x.kind == k).count();
    assert_eq!(count(InequalityKind::Nonneg), 6);
    assert_eq!(count(InequalityKind::Adjacency), 5);
    assert_eq!(count(InequalityKind::Cluster), 1);
    let unit = |pairs: &[(usize, i64)]| {
        let mut v = vec![0; 6];
        for &(i, c) in pairs {
            v[i] = c;
        }
        v
    };
    let got = as_set(&fs);
    for (i, j) in [(a, b), (b, c), (c, d), (c, e), (a, f)] {
        assert!(got.contains(&ineq(unit(&[(i, 1), (j, 1)]), 1)));
    }
    assert!(got.contains(&ineq(unit(&[(b, 1), (c, 2), (d, 1), (e, 1)]), 2)));
    let hull = hull_facets(&build_rt(&t).vertices).unwrap();
    assert_eq!(as_set(&hull), got);
}

#[test]
fn caterpillar_facet_count() {
    for n in 3..=9 {
        let t = RootedBinaryTree::caterpillar(n).unwrap();
        assert_eq!(facets_corollary(&t).len(), 2 * n - 3, "n = {n}");
    }
}

#[test]
fn spine_cluster_facets() {
    let t = tree(SPINE_T2);
    let s1 = node_with_leaves(&t, &(1..=12).collect::<Vec<_>>());
    let s2 = node_with_leaves(&t, &(1..=8).collect::<Vec<_>>());
    let fs = facets_corollary(&t);
    let with_spine = fs
        .iter()
        .filter(|f| f.kind == InequalityKind::Cluster && f.coeffs[s1] == 2 && f.coeffs[s2] == 2)
        .count();
    assert!(with_spine >= 8);
}

#[test]
fn rt_facets_equal_hull() {
    for t in shapes(3, 6) {
        let p = build_rt(&t);
        let hull = hull_facets(&p.vertices).unwrap();
        assert_eq!(as_set(&hull), as_set(&p.facets), "{}", t.to_newick());
        assert_eq!(hull.len(), p.facets.len());
    }
    let t = tree("(1,2);");
    assert_eq!(
        as_set(&hull_facets(&build_rt(&t).vertices).unwrap()),
        as_set(&facets_corollary(&t))
    );
}

#[test]
fn cluster_facets_tight() {
    for t in shapes(3, 8) {
        let p = build_rt(&t);
        for f in p
            .facets
            .iter()
            .filter(|f| f.kind == InequalityKind::Cluster)
        {
            assert!(tight_independent(&p.vertices, f) >= t.n_leaves() - 1);
        }
    }
}

#[test]
fn four_leaf_mixed_vertices() {
    let t = tree("((1,2),(3,4));");
    let three = node_with_leaves(&t, &[3, 4]);
    let ideal = OrderIdeal::new(&t, [three]).unwrap();
    let p = build_rti(&t, &ideal);
    let pos = |name: &str| p.coords.iter().position(|c| c == name).unwrap();
    let two = t.interior_node(node_with_leaves(&t, &[1, 2]));
    let order = [
        pos(&format!("y{}", t.node_name(two))),
        pos(&format!("y{three}")),
        pos("yL1"),
        pos("yL2"),
        pos(&format!("x{three}")),
    ];
    let got: BTreeSet<Vec<i64>> = p
        .vertices
        .iter()
        .map(|v| order.iter().map(|&k| v[k]).collect())
        .collect();
    let cols = [
        [0, 0, 0, 0, 0],
        [1, 1, 1, 0, 0],
        [1, 1, 0, 1, 0],
        [0, 0, 1, 1, 0],
        [0, 0, 0, 0, 1],
        [0, 0, 1, 1, 1],
    ];
    let want: BTreeSet<Vec<i64>> = cols.iter().map(|c| c.to_vec()).collect();
    assert_eq!(got, want);
    assert_eq!(p.dim, 4);
}

#[test]
fn full_ideal_is_rt() {
    for t in shapes(2, 5) {
        let p = build_rti(&t, &OrderIdeal::full(&t));
        assert_eq!(p.vertices, build_rt(&t).vertices);
    }
}

#[test]
fn empty_ideal_is_cfn() {
    let t = tree(FIVE_LEAF);
    let fs = facets_rti(&t, &OrderIdeal::new(&t, []).unwrap());
    assert_eq!(fs[0].kind, InequalityKind::RootEquality);
    assert!(fs[1..].iter().all(|f| f.kind == InequalityKind::CfnLocal));
    assert_eq!(fs.len(), 1 + 4 * 3);
}

#[test]
fn seven_leaf_mixed_facets() {
    let t = tree(SEVEN_LEAF);
    let idx = |l: &[u32]| node_with_leaves(&t, l);
    let (b, c, d, e, f) = (
        idx(&[1, 2, 3, 4, 5]),
        idx(&[1, 2, 3, 4]),
        idx(&[1, 2]),
        idx(&[3, 4]),
        idx(&[6, 7]),
    );
    let ideal = OrderIdeal::new(&t, [b, c, d, e]).unwrap();
    let p = build_rti(&t, &ideal);
    let pos = |name: String| p.coords.iter().position(|x| *x == name).unwrap();
    let [xb, xc, xd, xe] = [b, c, d, e].map(|i| pos(format!("x{i}")));
    let yb = pos(format!("y{b}"));
    let yf = pos(format!("y{f}"));
    let (yg, yh) = (pos("yL6".into()), pos("yL7".into()));
    let n = p.coords.len();
    let vec_of = |pairs: &[(usize, i64)]| {
        let mut v = vec![0; n];
        for &(k, c) in pairs {
            v[k] = c;
        }
        v
    };
    let got = as_set(&p.facets);
    for s in [[1, -1, -1], [-1, 1, -1], [-1, -1, 1]] {
        assert!(got.contains(&ineq(vec_of(&[(yf, s[0]), (yg, s[1]), (yh, s[2])]), 0)));
    }
    assert!(got.contains(&ineq(vec_of(&[(yf, 1), (yg, 1), (yh, 1)]), 2)));
    for (i, j) in [(xb, xc), (xc, xd), (xc, xe)] {
        assert!(got.contains(&ineq(vec_of(&[(i, 1), (j, 1)]), 1)));
    }
    for x in [xb, xc, xd, xe] {
        assert!(got.contains(&ineq(vec_of(&[(x, -1)]), 0)));
    }
    assert!(p.vertices.iter().all(|v| v[yb] == v[yf]));
    assert!(p.vertices_satisfy_facets());

    // the cluster inequality holds without y_b; with y_b it fails at a vertex
    let cluster = vec_of(&[(xb, 1), (xc, 2), (xd, 1), (xe, 1)]);
    assert!(got.contains(&ineq(cluster.clone(), 2)));
    let with_yb = vec_of(&[(xb, 1), (xc, 2), (xd, 1), (xe, 1), (yb, 1)]);
    let worst = p
        .vertices
        .iter()
        .map(|v| with_yb.iter().zip(v).map(|(a, b)| a * b).sum::<i64>())
        .max()
        .unwrap();
    assert_eq!(worst, 3);

    // the hull also needs x_b + y_b ≤ 1
    let (missing, extra) = compare_with_hull(&p.vertices, &p.facets);
    assert!(extra.is_empty());
    assert_eq!(missing.len(), 1);
    let complete = facets_rti_complete(&t, &ideal);
    let supplement = &complete[p.facets.len()..];
    assert_eq!(supplement.len(), 1);
    assert_eq!(supplement[0].kind, InequalityKind::TopEdge);
    assert_eq!(
        (supplement[0].coeffs.clone(), supplement[0].rhs),
        ineq(vec_of(&[(xb, 1), (yb, 1)]), 1)
    );
    let (missing, extra) = compare_with_hull(&p.vertices, &complete);
    assert!(missing.is_empty() && extra.is_empty());
}

#[test]
fn rti_against_hull() {
    for t in shapes(2, 5) {
        for ideal in order_ideals(&t) {
            let p = build_rti(&t, &ideal);
            let (missing, extra) = compare_with_hull(&p.vertices, &p.facets);
            assert!(extra.is_empty(), "{} {:?}", t.to_newick(), ideal.members());
            let complete = facets_rti_complete(&t, &ideal);
            let supplement = &complete[p.facets.len()..];
            assert_eq!(
                missing.len(),
                supplement.len(),
                "{} {:?}",
                t.to_newick(),
                ideal.members()
            );
            let (m2, e2) = compare_with_hull(&p.vertices, &complete);
            assert!(
                m2.is_empty() && e2.is_empty(),
                "{} {:?}",
                t.to_newick(),
                ideal.members()
            );
        }
    }
}

#[test]
fn projection_property() {
    for t in shapes(2, 5) {
        for ideal in order_ideals(&t) {
            for r in ideal.maximal(&t) {
                let img = project_ideal(&t, &ideal, r).unwrap();
                assert_eq!(img, build_rti(&t, &ideal).vertices, "{} {r}", t.to_newick());
            }
            for i in 0..t.n_interior() {
                if !ideal.maximal(&t).contains(&i) {
                    assert!(project_ideal(&t, &ideal, i).is_err());
                }
            }
        }
    }
}

#[test]
fn zigzag_map_values() {
    let phi = caterpillar_zigzag_map(4).unwrap();
    assert_eq!(phi.apply(&[0, 0, 0, 0]).unwrap(), [0, 1, 0, 1]);
    assert_eq!(phi.apply(&[1, 0, 0, 0]).unwrap(), [1, 1, 0, 1]);
    assert_eq!(phi.det().abs(), 1);
    assert!(phi.apply(&[0, 0]).is_err());
    assert!(caterpillar_zigzag_map(0).is_err());
}

/// 0/1 labelings of the fence p1 < p2 > p3 < p4 ... that respect every cover.
fn fence_ideals(n: usize) -> BTreeSet<Vec<i64>> {
    // covers as (smaller, larger)
    let covers: Vec<(usize, usize)> = (0..n - 1)
        .map(|i| if i % 2 == 0 { (i, i + 1) } else { (i + 1, i) })
        .collect();
    let mut out = BTreeSet::new();
    for k in 0u32..1 << n {
        let f: Vec<i64> = (0..n).map(|i| (k >> i & 1) as i64).collect();
        if covers.iter().all(|&(lo, hi)| f[lo] <= f[hi]) {
            out.insert(f);
        }
    }
    out
}

#[test]
fn zigzag_vertices() {
    let listed: BTreeSet<Vec<i64>> = [
        [0, 1, 0, 1],
        [1, 1, 0, 1],
        [0, 0, 0, 1],
        [0, 1, 1, 1],
        [0, 1, 0, 0],
        [1, 1, 1, 1],
        [1, 1, 0, 0],
        [0, 0, 0, 0],
    ]
    .iter()
    .map(|c| c.to_vec())
    .collect();
    assert_eq!(fence_ideals(4), listed);
    for n in 3..=9 {
        let d = n - 1;
        let ours: BTreeSet<Vec<i64>> = zigzag_order_polytope_vertices(d).into_iter().collect();
        assert_eq!(ours, fence_ideals(d));
        let phi = caterpillar_zigzag_map(d).unwrap();
        let t = RootedBinaryTree::caterpillar(n).unwrap();
        let img: BTreeSet<Vec<i64>> = enumerate_top_vectors(&t)
            .iter()
            .map(|v| phi.apply(&v.as_i64()).unwrap())
            .collect();
        assert_eq!(img, ours, "n = {n}");
    }
}

#[test]
fn inequality_normalization_and_render() {
    let f = Inequality::normalized(vec![2, -4], 5, InequalityKind::Hull);
    assert_eq!((f.coeffs.clone(), f.rhs), (vec![1, -2], 2));
    let names = vec!["x0".to_string(), "x1".to_string()];
    assert_eq!(f.render(&names), "x0 - 2x1 <= 2");
    let g = Inequality::normalized(vec![0, -1], 0, InequalityKind::Nonneg);
    assert_eq!(g.render(&names), "-x1 <= 0");
}

proptest! {
    #[test]
    fn rt_facets_valid_and_tight(t in arb_tree(3, 10)) {
        let p = build_rt(&t);
        prop_assert!(p.vertices_satisfy_facets());
        let n = t.n_leaves();
        for f in &p.facets {
            prop_assert!(tight_independent(&p.vertices, f) >= n - 1);
        }
        prop_assert_eq!(
            p.facets.iter().filter(|f| f.kind == InequalityKind::Cluster).count(),
            enumerate_clusters(&t).len()
        );
    }

    #[test]
    fn mixed_vertices_from_labelings(t in arb_tree(3, 8), k in any::<u64>()) {
        let ideals = order_ideals(&t);
        let ideal = &ideals[(k % ideals.len() as u64) as usize];
        let p = build_rti(&t, ideal);
        prop_assert!(p.vertices_satisfy_facets());
        let coords = MixedCoords::new(&t, ideal);
        let pts: BTreeSet<Vec<i64>> = even_labelings(t.n_leaves())
            .map(|l| mixed_point(&t, &coords, &l.bits).concat())
            .collect();
        prop_assert_eq!(pts.len(), p.vertices.len());
        // no vertex is a midpoint of two others: 0/1 points are always extreme
        prop_assert!(p.vertices.iter().flatten().all(|&x| x == 0 || x == 1));
    }
}
