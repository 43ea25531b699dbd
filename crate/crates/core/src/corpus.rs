//! Ready-made example systems and deterministic random corpora used by the
//! test and acceptance suites.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{close_group, GeneratorSpec, Letter, Word};
use crate::graph::{Graph, GraphSpec, Multiplicity};
use crate::kgraph::{KGraphSkeleton, KGraphSpec, KSystem};
use crate::SelfSimilarSystem;

/// Builds a generator spec from name-level permutation/restriction maps.
/// Unmentioned vertices and edges stay fixed; unmentioned restrictions are
/// the identity word.
pub fn generator(
    graph: &Graph,
    name: &str,
    vmap: &[(&str, &str)],
    emap: &[(&str, &str)],
    restrictions: &[(&str, Word)],
) -> GeneratorSpec {
    let mut vperm: Vec<u32> = (0..graph.num_vertices() as u32).collect();
    for (a, b) in vmap {
        let va = graph.vertex_by_name(a).expect("vertex");
        let vb = graph.vertex_by_name(b).expect("vertex");
        vperm[va.idx()] = vb.0;
    }
    let mut eperm: Vec<u32> = (0..graph.num_edges() as u32).collect();
    for (a, b) in emap {
        let ea = graph.edge_by_name(a).expect("edge");
        let eb = graph.edge_by_name(b).expect("edge");
        eperm[ea.idx()] = eb.0;
    }
    let mut rest: Vec<Word> = vec![Vec::new(); graph.num_edges()];
    for (e, w) in restrictions {
        let ee = graph.edge_by_name(e).expect("edge");
        rest[ee.idx()] = w.clone();
    }
    GeneratorSpec {
        name: name.into(),
        vertex_perm: vperm,
        edge_perm: eperm,
        restrictions: rest,
    }
}

pub fn letter(gen: u16) -> Word {
    vec![Letter { gen, inv: false }]
}

/// One vertex with a single loop.
pub fn single_loop() -> Graph {
    Graph::build(&GraphSpec {
        vertices: vec!["v".into()],
        edges: vec![("e".into(), "v".into(), "v".into(), Multiplicity::One)],
    })
    .unwrap()
}

pub fn single_loop_trivial() -> SelfSimilarSystem {
    close_group(&single_loop(), &[], 1000).unwrap()
}

/// One vertex with two loops `a`, `b` (the O₂ shape).
pub fn two_loops_graph() -> Graph {
    Graph::build(&GraphSpec {
        vertices: vec!["v".into()],
        edges: vec![
            ("a".into(), "v".into(), "v".into(), Multiplicity::One),
            ("b".into(), "v".into(), "v".into(), Multiplicity::One),
        ],
    })
    .unwrap()
}

pub fn two_loops_trivial() -> SelfSimilarSystem {
    close_group(&two_loops_graph(), &[], 1000).unwrap()
}

/// The graph E_{2,2}: vertices v0, v1, v2; loops l1 at v1 and l2 at v2;
/// connecting edges a1: v1→v0 and a2: v2→v0 (range v0); loops e1, e2 at v0.
pub fn e22_graph() -> Graph {
    Graph::build(&GraphSpec {
        vertices: vec!["v0".into(), "v1".into(), "v2".into()],
        edges: vec![
            ("e1".into(), "v0".into(), "v0".into(), Multiplicity::One),
            ("e2".into(), "v0".into(), "v0".into(), Multiplicity::One),
            ("a1".into(), "v0".into(), "v1".into(), Multiplicity::One),
            ("a2".into(), "v0".into(), "v2".into(), Multiplicity::One),
            ("l1".into(), "v1".into(), "v1".into(), Multiplicity::One),
            ("l2".into(), "v2".into(), "v2".into(), Multiplicity::One),
        ],
    })
    .unwrap()
}

/// E_{2,2} with the full Z/2 swap: v1↔v2, l1↔l2, a1↔a2, e1↔e2, acting by a
/// graph automorphism (constant restrictions).
pub fn e22_z2() -> SelfSimilarSystem {
    let g = e22_graph();
    let s = generator(
        &g,
        "s",
        &[("v1", "v2"), ("v2", "v1")],
        &[
            ("l1", "l2"),
            ("l2", "l1"),
            ("a1", "a2"),
            ("a2", "a1"),
            ("e1", "e2"),
            ("e2", "e1"),
        ],
        &[
            ("e1", letter(0)),
            ("e2", letter(0)),
            ("a1", letter(0)),
            ("a2", letter(0)),
            ("l1", letter(0)),
            ("l2", letter(0)),
        ],
    );
    close_group(&g, &[s], 1000).unwrap()
}

/// E_{2,2} with trivial group.
pub fn e22_trivial() -> SelfSimilarSystem {
    close_group(&e22_graph(), &[], 1000).unwrap()
}

/// The Z/2 variant that swaps v1↔v2 and their attached edges but fixes the
/// loops e1, e2 at v0. Violates essential centrality on the tail {v0}.
pub fn e22_z2_fixing_loops() -> SelfSimilarSystem {
    let g = e22_graph();
    let s = generator(
        &g,
        "s",
        &[("v1", "v2"), ("v2", "v1")],
        &[("l1", "l2"), ("l2", "l1"), ("a1", "a2"), ("a2", "a1")],
        &[
            ("e1", letter(0)),
            ("e2", letter(0)),
            ("a1", letter(0)),
            ("a2", letter(0)),
            ("l1", letter(0)),
            ("l2", letter(0)),
        ],
    );
    close_group(&g, &[s], 1000).unwrap()
}

/// E_{2,∞}-style variant: the two loops at v0 are ω-families swapped by the
/// Z/2 generator, so v0 is an infinite receiver but no breaking vertex.
pub fn e2inf_z2() -> SelfSimilarSystem {
    let g = Graph::build(&GraphSpec {
        vertices: vec!["v0".into(), "v1".into(), "v2".into()],
        edges: vec![
            ("e1".into(), "v0".into(), "v0".into(), Multiplicity::Omega),
            ("e2".into(), "v0".into(), "v0".into(), Multiplicity::Omega),
            ("a1".into(), "v0".into(), "v1".into(), Multiplicity::One),
            ("a2".into(), "v0".into(), "v2".into(), Multiplicity::One),
            ("l1".into(), "v1".into(), "v1".into(), Multiplicity::One),
            ("l2".into(), "v2".into(), "v2".into(), Multiplicity::One),
        ],
    })
    .unwrap();
    let s = generator(
        &g,
        "s",
        &[("v1", "v2"), ("v2", "v1")],
        &[
            ("e1", "e2"),
            ("e2", "e1"),
            ("a1", "a2"),
            ("a2", "a1"),
            ("l1", "l2"),
            ("l2", "l1"),
        ],
        &[
            ("e1", letter(0)),
            ("e2", letter(0)),
            ("a1", letter(0)),
            ("a2", letter(0)),
            ("l1", letter(0)),
            ("l2", letter(0)),
        ],
    );
    close_group(&g, &[s], 1000).unwrap()
}

/// One vertex, loops a and b. The generator fixes a with trivial restriction
/// and fixes b with restriction h, where h swaps a and b. Not pseudo-free.
pub fn non_pseudo_free_system() -> SelfSimilarSystem {
    let g = two_loops_graph();
    let gen_g = generator(
        &g,
        "g",
        &[],
        &[],
        &[("b", vec![Letter { gen: 1, inv: false }])],
    );
    let gen_h = generator(&g, "h", &[], &[("a", "b"), ("b", "a")], &[]);
    close_group(&g, &[gen_g, gen_h], 1000).unwrap()
}

/// Two vertices u, v with double edges both ways; the generator swaps the
/// sides with restriction g on one parallel pair and 1 on the other.
/// Pseudo-free, finite, with a genuinely nonconstant restriction table.
pub fn nonconstant_restriction_system() -> SelfSimilarSystem {
    let g = Graph::build(&GraphSpec {
        vertices: vec!["u".into(), "v".into()],
        edges: vec![
            ("e".into(), "u".into(), "v".into(), Multiplicity::One),
            ("e2".into(), "u".into(), "v".into(), Multiplicity::One),
            ("f".into(), "v".into(), "u".into(), Multiplicity::One),
            ("f2".into(), "v".into(), "u".into(), Multiplicity::One),
        ],
    })
    .unwrap();
    let s = generator(
        &g,
        "g",
        &[("u", "v"), ("v", "u")],
        &[("e", "f"), ("f", "e"), ("e2", "f2"), ("f2", "e2")],
        &[("e", letter(0)), ("f", letter(0))],
    );
    close_group(&g, &[s], 1000).unwrap()
}

fn cycle_rotation_generator(g: &Graph, p: usize) -> GeneratorSpec {
    let vmap: Vec<(String, String)> = (0..p)
        .map(|i| (format!("c{i}"), format!("c{}", (i + 1) % p)))
        .collect();
    let emap: Vec<(String, String)> = (0..p)
        .map(|i| (format!("x{i}"), format!("x{}", (i + 1) % p)))
        .collect();
    let rest: Vec<(String, Word)> = (0..p).map(|i| (format!("x{i}"), letter(0))).collect();
    let vmap_ref: Vec<(&str, &str)> = vmap.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let emap_ref: Vec<(&str, &str)> = emap.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let rest_ref: Vec<(&str, Word)> = rest.iter().map(|(a, w)| (a.as_str(), w.clone())).collect();
    generator(g, "r", &vmap_ref, &emap_ref, &rest_ref)
}

/// Cycle graph C_p with vertices c0…c(p-1) and edges x_i with r(x_i) = c_i,
/// s(x_i) = c_{i+1 mod p}.
pub fn cycle_graph(p: usize) -> Graph {
    let vertices: Vec<String> = (0..p).map(|i| format!("c{i}")).collect();
    let edges = (0..p)
        .map(|i| {
            (
                format!("x{i}"),
                format!("c{i}"),
                format!("c{}", (i + 1) % p),
                Multiplicity::One,
            )
        })
        .collect();
    Graph::build(&GraphSpec { vertices, edges }).unwrap()
}

/// C_p with the rotation c_i ↦ c_{i+1} acting as a graph automorphism.
pub fn cycle_rotation(p: usize) -> SelfSimilarSystem {
    let g = cycle_graph(p);
    let s = cycle_rotation_generator(&g, p);
    close_group(&g, &[s], 1000).unwrap()
}

/// The rotated cycle as a 1-graph system; its no-entry circuits close
/// against rotation powers, so cycline states carry nontrivial twists.
pub fn cycle_rotation_k(p: usize) -> KSystem {
    let g = cycle_graph(p);
    let skel = KGraphSkeleton::validate(&as_1graph(&g)).unwrap();
    let s = cycle_rotation_generator(&g, p);
    KSystem::close(&skel, &[s], 1000).unwrap()
}

/// A case-3 breaking vertex: v receives an ω-family from the dead-end source
/// u plus a single edge from w, and sits on the no-entry cycle v→w→v.
pub fn bv_case3_system() -> SelfSimilarSystem {
    let g = Graph::build(&GraphSpec {
        vertices: vec!["u".into(), "v".into(), "w".into()],
        edges: vec![
            ("e".into(), "v".into(), "w".into(), Multiplicity::One),
            ("f".into(), "v".into(), "u".into(), Multiplicity::Omega),
            ("h".into(), "w".into(), "v".into(), Multiplicity::One),
        ],
    })
    .unwrap();
    close_group(&g, &[], 1000).unwrap()
}

/// Same shape plus an extra loop at w, which gives the cycle an entry and
/// makes the tail of v aperiodic (a case-4 breaking vertex).
pub fn bv_case4_system() -> SelfSimilarSystem {
    let g = Graph::build(&GraphSpec {
        vertices: vec!["u".into(), "v".into(), "w".into()],
        edges: vec![
            ("e".into(), "v".into(), "w".into(), Multiplicity::One),
            ("f".into(), "v".into(), "u".into(), Multiplicity::Omega),
            ("h".into(), "w".into(), "v".into(), Multiplicity::One),
            ("k".into(), "w".into(), "w".into(), Multiplicity::One),
        ],
    })
    .unwrap();
    close_group(&g, &[], 1000).unwrap()
}

/// Deterministic random digraph corpus used by the acceptance suite:
/// ≤ `max_v` vertices, ≤ `max_e` edges, occasional ω-edges and sources.
pub fn random_graph(rng: &mut ChaCha8Rng, max_v: usize, max_e: usize) -> Graph {
    let nv = rng.gen_range(1..=max_v);
    let ne = rng.gen_range(0..=max_e);
    let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..ne {
        let r = rng.gen_range(0..nv);
        let s = rng.gen_range(0..nv);
        let mult = if rng.gen_ratio(1, 8) {
            Multiplicity::Omega
        } else {
            Multiplicity::One
        };
        edges.push((format!("e{i}"), format!("v{r}"), format!("v{s}"), mult));
    }
    Graph::build(&GraphSpec { vertices, edges }).unwrap()
}

pub fn random_trivial_corpus(seed: u64, count: usize) -> Vec<SelfSimilarSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| close_group(&random_graph(&mut rng, 6, 10), &[], 1000).unwrap())
        .collect()
}

/// Hand-picked singular cases: sources, ω-receivers and breaking vertices.
pub fn singular_case_corpus() -> Vec<SelfSimilarSystem> {
    let mut out = vec![bv_case3_system(), bv_case4_system()];
    // A bare source above a loop.
    let g = Graph::build(&GraphSpec {
        vertices: vec!["s".into(), "v".into()],
        edges: vec![
            ("e".into(), "v".into(), "v".into(), Multiplicity::One),
            ("f".into(), "s".into(), "v".into(), Multiplicity::One),
        ],
    })
    .unwrap();
    out.push(close_group(&g, &[], 1000).unwrap());
    // An isolated vertex (a source equal to its own tail).
    let g = Graph::build(&GraphSpec {
        vertices: vec!["w".into()],
        edges: vec![],
    })
    .unwrap();
    out.push(close_group(&g, &[], 1000).unwrap());
    // ω-receiver fed from inside its own tail.
    let g = Graph::build(&GraphSpec {
        vertices: vec!["a".into(), "b".into()],
        edges: vec![
            ("e".into(), "a".into(), "b".into(), Multiplicity::Omega),
            ("f".into(), "b".into(), "a".into(), Multiplicity::One),
            ("l".into(), "b".into(), "b".into(), Multiplicity::One),
        ],
    })
    .unwrap();
    out.push(close_group(&g, &[], 1000).unwrap());
    out
}

/// The 2-graph torus: one vertex, one blue and one red loop.
pub fn torus_2graph() -> KGraphSkeleton {
    let spec = KGraphSpec {
        rank: 2,
        vertices: vec!["v".into()],
        edges: vec![
            ("b".into(), 0, "v".into(), "v".into()),
            ("r".into(), 1, "v".into(), "v".into()),
        ],
        factorizations: vec![(("b".into(), "r".into()), ("r".into(), "b".into()))],
    };
    KGraphSkeleton::validate(&spec).unwrap()
}

pub fn torus_system() -> KSystem {
    KSystem::close(&torus_2graph(), &[], 1000).unwrap()
}

/// Product of directed cycles C_a × C_b as a 2-graph. Vertices are `(i,j)`;
/// blue edges move the first coordinate, red edges the second, and the
/// factorization squares commute componentwise.
pub fn cycle_product_2graph(a: usize, b: usize) -> KGraphSkeleton {
    let mut vertices = Vec::new();
    for i in 0..a {
        for j in 0..b {
            vertices.push(format!("v{i}_{j}"));
        }
    }
    let mut edges = Vec::new();
    for i in 0..a {
        for j in 0..b {
            // blue: range (i,j), source (i+1, j)
            edges.push((
                format!("b{i}_{j}"),
                0,
                format!("v{i}_{j}"),
                format!("v{}_{}", (i + 1) % a, j),
            ));
            // red: range (i,j), source (i, j+1)
            edges.push((
                format!("r{i}_{j}"),
                1,
                format!("v{i}_{j}"),
                format!("v{}_{}", i, (j + 1) % b),
            ));
        }
    }
    let mut factorizations = Vec::new();
    for i in 0..a {
        for j in 0..b {
            // blue b{i}_{j} then red r{(i+1),j}: range (i,j), source (i+1, j+1)
            // equals red r{i}_{j} then blue b{i,(j+1)}.
            factorizations.push((
                (format!("b{i}_{j}"), format!("r{}_{}", (i + 1) % a, j)),
                (format!("r{i}_{j}"), format!("b{}_{}", i, (j + 1) % b)),
            ));
        }
    }
    KGraphSkeleton::validate(&KGraphSpec {
        rank: 2,
        vertices,
        edges,
        factorizations,
    })
    .unwrap()
}

pub fn cycle_product_system(a: usize, b: usize) -> KSystem {
    KSystem::close(&cycle_product_2graph(a, b), &[], 1000).unwrap()
}

/// A layered 2-graph with two maximal tails: a torus component that drains
/// into a second torus component.
pub fn layered_2graph() -> KGraphSkeleton {
    // Vertices p (upper) and q (lower); each carries a torus loop pair, and
    // p also reaches q in both colors. Factorizations complete every
    // blue/red corner.
    let spec = KGraphSpec {
        rank: 2,
        vertices: vec!["p".into(), "q".into()],
        edges: vec![
            ("bp".into(), 0, "p".into(), "p".into()),
            ("rp".into(), 1, "p".into(), "p".into()),
            ("bq".into(), 0, "q".into(), "q".into()),
            ("rq".into(), 1, "q".into(), "q".into()),
            ("bd".into(), 0, "p".into(), "q".into()),
            ("rd".into(), 1, "p".into(), "q".into()),
        ],
        factorizations: vec![
            (("bp".into(), "rp".into()), ("rp".into(), "bp".into())),
            (("bq".into(), "rq".into()), ("rq".into(), "bq".into())),
            // mixed corners p→q: blue-then-red = red-then-blue
            (("bp".into(), "rd".into()), ("rd".into(), "bq".into())),
            (("bd".into(), "rq".into()), ("rp".into(), "bd".into())),
        ],
    };
    KGraphSkeleton::validate(&spec).unwrap()
}

pub fn layered_system() -> KSystem {
    KSystem::close(&layered_2graph(), &[], 1000).unwrap()
}

/// Rank-one graphs reinterpreted as 1-graphs (no ω-edges, no sources).
pub fn as_1graph(graph: &Graph) -> KGraphSpec {
    KGraphSpec {
        rank: 1,
        vertices: (0..graph.num_vertices())
            .map(|i| graph.vertex_name(crate::graph::VertexId(i as u32)).to_string())
            .collect(),
        edges: graph
            .edge_ids()
            .map(|e| {
                let ed = graph.edge(e);
                (
                    ed.name.clone(),
                    0,
                    graph.vertex_name(ed.range).to_string(),
                    graph.vertex_name(ed.source).to_string(),
                )
            })
            .collect(),
        factorizations: vec![],
    }
}

/// Small k-graph corpus for the property suites.
pub fn kgraph_corpus() -> Vec<KSystem> {
    let mut out = vec![
        torus_system(),
        cycle_product_system(2, 3),
        cycle_product_system(2, 2),
        cycle_product_system(3, 4),
        layered_system(),
    ];
    // Rank-one members, with and without symmetry.
    let skel = KGraphSkeleton::validate(&as_1graph(&single_loop())).unwrap();
    out.push(KSystem::close(&skel, &[], 1000).unwrap());
    let skel = KGraphSkeleton::validate(&as_1graph(&two_loops_graph())).unwrap();
    out.push(KSystem::close(&skel, &[], 1000).unwrap());
    let sys = nonconstant_restriction_system();
    let skel = KGraphSkeleton::validate(&as_1graph(&sys.graph)).unwrap();
    let gens = nonconstant_generators(&sys.graph);
    out.push(KSystem::close(&skel, &gens, 1000).unwrap());
    out.push(kgraph_swap_system());
    out.push(kgraph_nonconstant_system());
    out.push(cycle_rotation_k(3));
    out.push(cycle_rotation_k(4));
    out
}

fn nonconstant_generators(graph: &Graph) -> Vec<GeneratorSpec> {
    vec![generator(
        graph,
        "g",
        &[("u", "v"), ("v", "u")],
        &[("e", "f"), ("f", "e"), ("e2", "f2"), ("f2", "e2")],
        &[("e", letter(0)), ("f", letter(0))],
    )]
}

/// A rank-2 action with a genuinely nonconstant restriction table: the
/// generator swaps the parallel blue loops with trivial restriction and
/// fixes the red loop with restriction s itself, so it flips exactly the
/// first blue choice of every infinite path.
pub fn kgraph_nonconstant_system() -> KSystem {
    let spec = KGraphSpec {
        rank: 2,
        vertices: vec!["v".into()],
        edges: vec![
            ("b1".into(), 0, "v".into(), "v".into()),
            ("b2".into(), 0, "v".into(), "v".into()),
            ("r".into(), 1, "v".into(), "v".into()),
        ],
        factorizations: vec![
            (("b1".into(), "r".into()), ("r".into(), "b1".into())),
            (("b2".into(), "r".into()), ("r".into(), "b2".into())),
        ],
    };
    let skel = KGraphSkeleton::validate(&spec).unwrap();
    let b1 = skel.edge_by_name("b1").unwrap();
    let b2 = skel.edge_by_name("b2").unwrap();
    let r = skel.edge_by_name("r").unwrap();
    let mut eperm: Vec<u32> = (0..3).collect();
    eperm.swap(b1, b2);
    let mut restrictions = vec![Vec::new(), Vec::new(), Vec::new()];
    restrictions[r] = letter(0);
    let gens = vec![GeneratorSpec {
        name: "s".into(),
        vertex_perm: vec![0],
        edge_perm: eperm,
        restrictions,
    }];
    KSystem::close(&skel, &gens, 1000).unwrap()
}

/// A Z/2 action on a 2-graph: two parallel blue loops swapped, red loop
/// fixed, with θ respected.
pub fn kgraph_swap_system() -> KSystem {
    let spec = KGraphSpec {
        rank: 2,
        vertices: vec!["v".into()],
        edges: vec![
            ("b1".into(), 0, "v".into(), "v".into()),
            ("b2".into(), 0, "v".into(), "v".into()),
            ("r".into(), 1, "v".into(), "v".into()),
        ],
        factorizations: vec![
            (("b1".into(), "r".into()), ("r".into(), "b1".into())),
            (("b2".into(), "r".into()), ("r".into(), "b2".into())),
        ],
    };
    let skel = KGraphSkeleton::validate(&spec).unwrap();
    let mut eperm: Vec<u32> = (0..3).collect();
    let b1 = skel.edge_by_name("b1").unwrap();
    let b2 = skel.edge_by_name("b2").unwrap();
    eperm.swap(b1, b2);
    let gens = vec![GeneratorSpec {
        name: "s".into(),
        vertex_perm: vec![0],
        edge_perm: eperm,
        restrictions: vec![letter(0), letter(0), letter(0)],
    }];
    KSystem::close(&skel, &gens, 1000).unwrap()
}

/// Name-keyed lookup for the fixture systems shipped with the CLI.
pub fn named_systems() -> BTreeMap<&'static str, SelfSimilarSystem> {
    BTreeMap::from([
        ("e22_z2", e22_z2()),
        ("e22_trivial", e22_trivial()),
        ("e2inf_z2", e2inf_z2()),
        ("single_loop", single_loop_trivial()),
        ("two_loops", two_loops_trivial()),
    ])
}
