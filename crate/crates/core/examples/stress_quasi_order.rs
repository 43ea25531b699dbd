//! Stress harness: random rank-one systems (with ω-edges, sources and
//! breaking vertices, plus an involution-symmetric family) must give the
//! same tails and the same quasi-orbit order through the closed-form rules
//! and through the truncated orbit-closure oracle.
use gtails_core::action::{close_group, GeneratorSpec, Letter};
use gtails_core::graph::{Graph, GraphSpec, Multiplicity};
use gtails_core::{corpus, oracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Two disjoint copies of a random graph joined at a fresh sink, with the
/// copy-swapping involution acting as a graph automorphism.
fn doubled_system(rng: &mut ChaCha8Rng) -> gtails_core::SelfSimilarSystem {
    let nv = rng.gen_range(1..=3usize);
    let ne = rng.gen_range(0..=4usize);
    let mut vertices = vec!["z".to_string()];
    for side in ["a", "b"] {
        for i in 0..nv {
            vertices.push(format!("{side}{i}"));
        }
    }
    let mut edges = Vec::new();
    for j in 0..ne {
        let r = rng.gen_range(0..nv);
        let s = rng.gen_range(0..nv);
        let mult = if rng.gen_ratio(1, 6) {
            Multiplicity::Omega
        } else {
            Multiplicity::One
        };
        for side in ["a", "b"] {
            edges.push((
                format!("{side}e{j}"),
                format!("{side}{r}"),
                format!("{side}{s}"),
                mult,
            ));
        }
    }
    // occasionally tie both copies into the sink z
    if rng.gen_bool(0.5) && nv > 0 {
        let s = rng.gen_range(0..nv);
        for side in ["a", "b"] {
            edges.push((
                format!("{side}d"),
                "z".to_string(),
                format!("{side}{s}"),
                Multiplicity::One,
            ));
        }
    }
    let graph = Graph::build(&GraphSpec { vertices, edges }).unwrap();
    let mut vperm: Vec<u32> = (0..graph.num_vertices() as u32).collect();
    for i in 0..graph.num_vertices() {
        let name = graph.vertex_name(gtails_core::VertexId(i as u32));
        let image = match name.chars().next().unwrap() {
            'a' => format!("b{}", &name[1..]),
            'b' => format!("a{}", &name[1..]),
            _ => name.to_string(),
        };
        vperm[i] = graph.vertex_by_name(&image).unwrap().0;
    }
    let mut eperm: Vec<u32> = (0..graph.num_edges() as u32).collect();
    for i in 0..graph.num_edges() {
        let name = &graph.edge(gtails_core::EdgeId(i as u32)).name;
        let image = match name.chars().next().unwrap() {
            'a' => format!("b{}", &name[1..]),
            'b' => format!("a{}", &name[1..]),
            _ => name.clone(),
        };
        eperm[i] = graph.edge_by_name(&image).unwrap().0 as u32;
    }
    let restrictions = vec![vec![Letter { gen: 0, inv: false }]; graph.num_edges()];
    let gen = GeneratorSpec {
        name: "s".into(),
        vertex_perm: vperm,
        edge_perm: eperm,
        restrictions,
    };
    close_group(&graph, &[gen], 1000).unwrap()
}

fn check(sys: &gtails_core::SelfSimilarSystem, label: &str) {
    let main: Vec<BTreeSet<_>> = sys
        .enumerate_maximal_g_tails()
        .into_iter()
        .map(|t| t.vertices)
        .collect();
    let brute = oracle::maximal_tails_bruteforce(sys);
    assert_eq!(main, brute, "tails mismatch {label}");
    let q = sys.quasi_orbit_space();
    assert!(q.is_partial_order(), "order violation {label}");
    let o = oracle::oracle_quasi_order(sys, &q, 12, 3);
    if o != q.leq {
        for v in sys.graph.vertex_ids() {
            for &e in sys.graph.received_edges(v) {
                let ed = sys.graph.edge(e);
                eprintln!(
                    "  {} : {} <- {} {:?}",
                    ed.name,
                    sys.graph.vertex_name(ed.range),
                    sys.graph.vertex_name(ed.source),
                    ed.multiplicity
                );
            }
        }
        for (i, p) in q.points.iter().enumerate() {
            eprintln!("  point {i}: {} tail {:?}", p.label, p.tail);
        }
        eprintln!("  main leq {:?}\n  oracle   {o:?}", q.leq);
        panic!("quasi-order mismatch {label}");
    }
}

fn main() {
    let mut checked = 0;
    for seed in 0..12u64 {
        for sys in corpus::random_trivial_corpus(seed * 7919 + 13, 60) {
            check(&sys, &format!("trivial seed {seed}"));
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..200 {
        let sys = doubled_system(&mut rng);
        check(&sys, &format!("doubled {i}"));
        checked += 1;
    }
    println!("fuzz ok: {checked} systems agreed");
}
