use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cfnmc::ehrhart::{
    df_compression_audit, ehrhart_polynomial, euler_zigzag, fib, nni_count_check, nni_vertex_check,
};
use cfnmc::ideal::{
    build_matrix, canonical_json, construct_generators, fiber_connectivity, groebner_verify,
    MarkedBinomial,
};
use cfnmc::model::invariant_check;
use cfnmc::paths::enumerate_top_vectors;
use cfnmc::polytope::{
    build_rt, build_rti, compare_with_hull, facets_rti_complete, AffineHull, Inequality,
    MixedCoords,
};
use cfnmc::tree::{enumerate_topologies, nni_triples, parse_newick, OrderIdeal};
use cfnmc::{Error, RootedBinaryTree};

#[derive(Parser)]
#[command(
    name = "cfnmc",
    version,
    about = "CFN-MC polytopes, Ehrhart data and toric ideals"
)]
struct Cli {
    /// machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,
    /// worker threads (0 = rayon default)
    #[arg(long, global = true, env = "CFNMC_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct TreeArg {
    /// rooted binary Newick string with integer leaf labels
    #[arg(long)]
    tree: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Vertices of R_T; checks the Fibonacci count
    Vertices(TreeArg),
    /// Closed-form facets of R_T
    Facets {
        #[command(flatten)]
        t: TreeArg,
        /// compare with an exact hull computation
        #[arg(long)]
        verify_hull: bool,
    },
    /// Facets of R_T(I) for an order ideal I
    RtiFacets {
        #[command(flatten)]
        t: TreeArg,
        /// comma-separated interior indices ("" for the empty ideal)
        #[arg(long, allow_hyphen_values = true)]
        ideal: String,
        #[arg(long)]
        verify_hull: bool,
    },
    /// Ehrhart polynomial, dilate counts and h*
    Ehrhart(TreeArg),
    /// Normalized volume; checks the Euler zig-zag number
    Volume(TreeArg),
    /// Quadratic generators of I_T with provenance
    Gens(TreeArg),
    /// Buchberger check of the constructed generators
    GroebnerCheck(TreeArg),
    /// Fiber connectivity of the constructed generators
    MarkovCheck {
        #[command(flatten)]
        t: TreeArg,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    /// Numeric vanishing of the generators on random clock parameters
    ModelCheck {
        #[command(flatten)]
        t: TreeArg,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// NNI vertex bijection, dilate counts and df audit for every NNI move
    NniCheck {
        #[command(flatten)]
        t: TreeArg,
        #[arg(long, default_value_t = 2)]
        dilate: usize,
    },
    /// All shapes with n leaves
    Survey {
        #[arg(long)]
        leaves: usize,
    },
}

struct Outcome {
    json: Value,
    human: String,
    pass: bool,
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Syntax { .. }
            | Error::NonBinary { .. }
            | Error::BadLabel { .. }
            | Error::DuplicateLabel(_)
            | Error::NotOrderIdeal(_)
            | Error::OutOfRange { .. }
            | Error::BadTriple(_)
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .expect("thread pool");
    }
    match run(&cli.cmd) {
        Ok(out) => {
            let text = if cli.json {
                format!("{}\n", serde_json::to_string_pretty(&out.json).unwrap())
            } else {
                out.human
            };
            // a closed pipe is not an error
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(if is_input_error(&e) { 2 } else { 1 })
        }
    }
}

fn parse_ideal(tree: &RootedBinaryTree, s: &str) -> cfnmc::Result<OrderIdeal> {
    let mut members = Vec::new();
    for (pos, part) in s.split(',').enumerate() {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let i: usize = part.parse().map_err(|_| Error::BadLabel {
            pos,
            label: part.to_string(),
        })?;
        if i >= tree.n_interior() {
            return Err(Error::OutOfRange {
                what: "interior index",
                value: i,
                range: "0..n-1",
            });
        }
        members.push(i);
    }
    OrderIdeal::new(tree, members)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn render_facets(facets: &[Inequality], names: &[String]) -> String {
    let mut s = String::new();
    for f in facets {
        s += &format!("  {:<14} {}\n", f.kind.to_string(), f.render(names));
    }
    s
}

fn pairs_json(v: &[(Vec<i64>, i64)]) -> Value {
    Value::Array(
        v.iter()
            .map(|(c, r)| json!({ "coeffs": c, "rhs": r }))
            .collect(),
    )
}

fn run(cmd: &Cmd) -> cfnmc::Result<Outcome> {
    match cmd {
        Cmd::Vertices(t) => {
            let tree = parse_newick(&t.tree)?;
            let verts: Vec<String> = enumerate_top_vectors(&tree)
                .iter()
                .map(|v| v.to_string())
                .collect();
            let expected = fib(tree.n_leaves());
            let pass = verts.len() as u64 == expected;
            let mut human = format!(
                "{} vertices (F_{} = {expected}) {}\n",
                verts.len(),
                tree.n_leaves(),
                verdict(pass)
            );
            for v in &verts {
                human += &format!("  {v}\n");
            }
            Ok(Outcome {
                json: json!({ "tree": tree.to_newick(), "vertices": verts, "count": verts.len(), "expected": expected, "pass": pass }),
                human,
                pass,
            })
        }
        Cmd::Facets { t, verify_hull } => {
            let tree = parse_newick(&t.tree)?;
            let p = build_rt(&tree);
            let mut json = p.to_json();
            let mut human = format!(
                "R_T: dim {}, {} vertices, {} facets\n",
                p.dim,
                p.vertices.len(),
                p.facets.len()
            );
            human += &render_facets(&p.facets, &p.coords);
            let mut pass = p.vertices_satisfy_facets();
            if *verify_hull {
                let (missing, extra) = compare_with_hull(&p.vertices, &p.facets);
                let ok = missing.is_empty() && extra.is_empty();
                pass &= ok;
                human += &format!(
                    "hull check: {} (missing {}, extra {})\n",
                    verdict(ok),
                    missing.len(),
                    extra.len()
                );
                json["hull"] = json!({ "missing": pairs_json(&missing), "extra": pairs_json(&extra), "pass": ok });
            }
            json["pass"] = json!(pass);
            Ok(Outcome { json, human, pass })
        }
        Cmd::RtiFacets {
            t,
            ideal,
            verify_hull,
        } => {
            let tree = parse_newick(&t.tree)?;
            let ideal = parse_ideal(&tree, ideal)?;
            let p = build_rti(&tree, &ideal);
            let names = MixedCoords::new(&tree, &ideal).names(&tree);
            let complete = facets_rti_complete(&tree, &ideal);
            let supplementary = &complete[p.facets.len()..];
            let mut json = p.to_json();
            json["ideal"] = json!(ideal.members());
            json["supplementary"] = Value::Array(
                supplementary
                    .iter()
                    .map(|f| json!({ "coeffs": f.coeffs, "rhs": f.rhs, "kind": f.kind }))
                    .collect(),
            );
            let mut human = format!(
                "R_T(I), I = {:?}: dim {} in R^{}, {} vertices\n",
                ideal.members(),
                p.dim,
                p.ambient(),
                p.vertices.len()
            );
            human += &render_facets(&p.facets, &names);
            if !supplementary.is_empty() {
                human += "supplementary:\n";
                human += &render_facets(supplementary, &names);
            }
            let mut pass = complete
                .iter()
                .all(|f| p.vertices.iter().all(|v| f.holds(v)));
            if *verify_hull {
                let (_, extra) = compare_with_hull(&p.vertices, &p.facets);
                let (missing, extra_c) = compare_with_hull(&p.vertices, &complete);
                let ok = extra.is_empty() && missing.is_empty() && extra_c.is_empty();
                pass &= ok;
                let h = AffineHull::of(&p.vertices);
                human += &format!(
                    "hull check (affine dim {}): {} (missing {}, extra {})\n",
                    h.dim,
                    verdict(ok),
                    missing.len(),
                    extra.len() + extra_c.len()
                );
                json["hull"] = json!({
                    "missing": pairs_json(&missing),
                    "extra": pairs_json(&[extra, extra_c].concat()),
                    "pass": ok,
                });
            }
            json["pass"] = json!(pass);
            Ok(Outcome { json, human, pass })
        }
        Cmd::Ehrhart(t) => {
            let tree = parse_newick(&t.tree)?;
            let e = ehrhart_polynomial(&build_rt(&tree))?;
            let vol = e.polynomial.normalized_volume()?;
            let hstar: Vec<String> = e
                .polynomial
                .h_star()
                .iter()
                .map(|x| x.to_string())
                .collect();
            let mut human = format!(
                "i(m) = {}\nnormalized volume {vol}\nh* = {:?}\n",
                e.polynomial, hstar
            );
            for c in &e.counts {
                human += &format!("  m = {:<2} {}\n", c.m, c.count);
            }
            Ok(Outcome {
                json: json!({
                    "polynomial": e.polynomial.coefficient_strings(),
                    "normalized_volume": vol.to_string(),
                    "h_star": hstar,
                    "counts": e.counts,
                }),
                human,
                pass: true,
            })
        }
        Cmd::Volume(t) => {
            let tree = parse_newick(&t.tree)?;
            let vol = ehrhart_polynomial(&build_rt(&tree))?
                .polynomial
                .normalized_volume()?;
            let expected = euler_zigzag(tree.n_leaves() - 1);
            let pass = vol == expected;
            Ok(Outcome {
                json: json!({ "normalized_volume": vol.to_string(), "expected": expected.to_string(), "pass": pass }),
                human: format!(
                    "normalized volume {vol} (E_{} = {expected}) {}\n",
                    tree.n_leaves() - 1,
                    verdict(pass)
                ),
                pass,
            })
        }
        Cmd::Gens(t) => {
            let tree = parse_newick(&t.tree)?;
            let (gens, _) = construct_generators(&tree)?;
            let canon: Value = serde_json::from_str(&canonical_json(&gens)).unwrap();
            let mut human = format!("{} generators\n", gens.len());
            for g in canon.as_array().unwrap() {
                let b: MarkedBinomial = serde_json::from_value(g.clone()).unwrap();
                human += &format!("  {:<6} {b}\n", b.provenance.to_string());
            }
            Ok(Outcome {
                json: canon,
                human,
                pass: true,
            })
        }
        Cmd::GroebnerCheck(t) => {
            let tree = parse_newick(&t.tree)?;
            let m = build_matrix(&tree);
            let (gens, order) = construct_generators(&tree)?;
            let r = groebner_verify(&m, &gens)?;
            let weight_ok = order.induces(&m, &gens)?;
            let blocks_ok = order.block_property(&m, &gens)?;
            let pass = r.verified && r.kernel && weight_ok && blocks_ok;
            let mut json = json!({
                "report": r,
                "weight_consistent": weight_ok,
                "block_property": blocks_ok,
                "pass": pass,
            });
            let mut human = format!(
                "{} generators, {} S-pairs: squarefree {}, kernel {}, S-pairs reduce {}, reduced {}, weight {}, blocks {} => {}\n",
                r.generators, r.pairs_checked, r.squarefree, r.kernel, r.s_pairs_reduce, r.reduced, weight_ok, blocks_ok, verdict(pass)
            );
            if let Some((i, j)) = r.failing_pair {
                json["counterexample"] = json!([gens[i].to_json(), gens[j].to_json()]);
                human += &format!("  failing pair: {} / {}\n", gens[i], gens[j]);
            }
            Ok(Outcome { json, human, pass })
        }
        Cmd::MarkovCheck { t, degree } => {
            let tree = parse_newick(&t.tree)?;
            let m = build_matrix(&tree);
            let (gens, _) = construct_generators(&tree)?;
            let r = fiber_connectivity(&m, &gens, *degree)?;
            let human = format!(
                "{} nontrivial fibers up to degree {}: connected {} {}\n{}",
                r.fibers,
                degree,
                r.connected,
                verdict(r.connected),
                r.counterexample.as_ref().map_or(String::new(), |c| format!(
                    "  disconnected fiber at A u = {c:?}\n"
                ))
            );
            let pass = r.connected;
            Ok(Outcome {
                json: json!(r),
                human,
                pass,
            })
        }
        Cmd::ModelCheck {
            t,
            samples,
            seed,
            tol,
        } => {
            let tree = parse_newick(&t.tree)?;
            let (gens, _) = construct_generators(&tree)?;
            let r = invariant_check(&tree, &gens, *samples, *seed, *tol)?;
            let mut human = format!(
                "{} binomials, {} samples (seed {}), max residual {:.3e} (tol {:e}) {}\n",
                gens.len(),
                r.samples,
                r.seed,
                r.max_residual,
                r.tol,
                verdict(r.pass)
            );
            for x in &r.residuals {
                human += &format!("  {:.3e}  {}\n", x.max_residual, x.binomial);
            }
            let pass = r.pass;
            Ok(Outcome {
                json: json!(r),
                human,
                pass,
            })
        }
        Cmd::NniCheck { t, dilate } => {
            let tree = parse_newick(&t.tree)?;
            let mut rows = Vec::new();
            let mut human = String::new();
            let mut pass = true;
            for triple in nni_triples(&tree) {
                let v = nni_vertex_check(&tree, triple)?;
                let counts = (1..=*dilate)
                    .map(|m| nni_count_check(&tree, triple, m))
                    .collect::<cfnmc::Result<Vec<_>>>()?;
                let audits = (1..=(*dilate).min(3))
                    .map(|m| df_compression_audit(&tree, triple, m))
                    .collect::<cfnmc::Result<Vec<_>>>()?;
                let ok = v.bijection
                    && v.involution
                    && counts.iter().all(|c| c.equal)
                    && audits.iter().all(|a| a.pass);
                pass &= ok;
                let name = format!(
                    "({},{},{})",
                    tree.node_name(triple.b),
                    tree.node_name(triple.c),
                    tree.node_name(triple.e)
                );
                let neighbor = cfnmc::tree::apply_nni(&tree, triple)?.to_newick();
                human += &format!(
                    "  {name:<12} -> {neighbor:<28} vertices {} nonmaintaining {} bijection {} counts {:?} df {} {}\n",
                    v.vertices,
                    v.nonmaintaining,
                    v.bijection && v.involution,
                    counts.iter().map(|c| c.count_t).collect::<Vec<_>>(),
                    audits.iter().all(|a| a.pass),
                    verdict(ok)
                );
                rows.push(json!({
                    "triple": name,
                    "neighbor": neighbor,
                    "vertices": v,
                    "counts": counts,
                    "df_audit": audits,
                    "pass": ok,
                }));
            }
            Ok(Outcome {
                json: json!({ "tree": tree.to_newick(), "moves": rows, "pass": pass }),
                human,
                pass,
            })
        }
        Cmd::Survey { leaves } => survey(*leaves),
    }
}

fn survey(n: usize) -> cfnmc::Result<Outcome> {
    let shapes = enumerate_topologies(n)?;
    let expected_vertices = fib(n);
    let expected_volume = euler_zigzag(n - 1);
    let mut rows = Vec::new();
    let mut polys = Vec::new();
    let mut pass = true;
    let mut human = format!(
        "n = {n}: {} shapes, F_{n} = {expected_vertices}, E_{} = {expected_volume}\n",
        shapes.len(),
        n - 1
    );
    for t in &shapes {
        let p = build_rt(t);
        let e = ehrhart_polynomial(&p)?;
        let vol = e.polynomial.normalized_volume()?;
        let (missing, extra) = compare_with_hull(&p.vertices, &p.facets);
        let facets_ok = missing.is_empty() && extra.is_empty();
        let ok =
            p.vertices.len() as u64 == expected_vertices && vol == expected_volume && facets_ok;
        pass &= ok;
        human += &format!(
            "  {:<32} vertices {:<4} facets {:<4} volume {:<6} hull {} {}\n",
            t.to_newick(),
            p.vertices.len(),
            p.facets.len(),
            vol.to_string(),
            facets_ok,
            verdict(ok)
        );
        rows.push(json!({
            "tree": t.to_newick(),
            "vertices": p.vertices.len(),
            "facets": p.facets.len(),
            "normalized_volume": vol.to_string(),
            "facets_match_hull": facets_ok,
            "pass": ok,
        }));
        polys.push(e.polynomial.coefficient_strings());
    }
    let identical = polys.windows(2).all(|w| w[0] == w[1]);
    pass &= identical;
    human += &format!(
        "Ehrhart polynomials identical: {identical}\n{}\n",
        verdict(pass)
    );
    Ok(Outcome {
        json: json!({
            "leaves": n,
            "shapes": rows,
            "ehrhart_polynomial": polys.first(),
            "ehrhart_identical": identical,
            "pass": pass,
        }),
        human,
        pass,
    })
}
