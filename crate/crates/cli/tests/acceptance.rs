//! Acceptance suite: one test per criterion, each printing a pass line with
//! its runtime. Run with `cargo test --test acceptance -- --nocapture` to see
//! the per-criterion report.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use gtails_core::kgraph::KSystem;
use gtails_core::oracle;
use gtails_core::spectrum::PrimComponent;
use gtails_core::tails::TailTag;
use gtails_core::{corpus, Error, SelfSimilarSystem, VertexId};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../systems")
        .join(name)
}

fn finish(criterion: &str, start: Instant, limit: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= limit,
        "criterion {criterion} took {elapsed:?}, limit {limit:?}"
    );
    println!("criterion {criterion}: PASS ({elapsed:?})");
}

fn tail_sets(sys: &SelfSimilarSystem) -> Vec<BTreeSet<VertexId>> {
    sys.enumerate_maximal_g_tails()
        .into_iter()
        .map(|t| t.vertices)
        .collect()
}

fn vnames(sys: &SelfSimilarSystem, set: &BTreeSet<VertexId>) -> Vec<String> {
    set.iter()
        .map(|&v| sys.graph.vertex_name(v).to_string())
        .collect()
}

#[test]
fn criterion_1_e22_z2_exact() {
    let start = Instant::now();
    let sys = corpus::e22_z2();
    let tails = tail_sets(&sys);
    assert_eq!(tails.len(), 2);
    assert_eq!(vnames(&sys, &tails[0]), ["v0"]);
    assert_eq!(vnames(&sys, &tails[1]), ["v0", "v1", "v2"]);

    let spec = sys.prim_spectrum().expect("spectrum");
    assert_eq!(spec.components.len(), 2);
    assert_eq!(spec.components[0], PrimComponent::ClosedPoint);
    assert_eq!(spec.components[1], PrimComponent::Circle { period: 1 });
    // The point {v0} is closed and lies below the circle: the closure of the
    // circle is the circle plus the point, and nothing sits below the point.
    assert_eq!(spec.quasi.leq, vec![vec![true, true], vec![false, true]]);
    finish("1 [E22 with Z/2: tails and spectrum]", start, Duration::from_secs(1));
}

#[test]
fn criterion_2_e2inf_variant() {
    let start = Instant::now();
    let sys = corpus::e2inf_z2();
    assert!(sys.breaking_vertices().is_empty());
    // Conditions (a)/(b): the vertex action on {v1,v2} is free and the edge
    // action is effective, so essential central isotropy holds.
    assert!(sys.essential_central_isotropy().unwrap().is_empty());
    let spec = sys.prim_spectrum().expect("spectrum");
    assert_eq!(spec.components.len(), 2);
    assert_eq!(spec.components[0], PrimComponent::ClosedPoint);
    assert_eq!(spec.components[1], PrimComponent::Circle { period: 1 });
    assert_eq!(spec.quasi.leq, vec![vec![true, true], vec![false, true]]);
    finish("2 [E2∞ variant shape]", start, Duration::from_secs(1));
}

#[test]
fn criterion_3_trivial_group_corpus_vs_oracle() {
    let start = Instant::now();
    let mut systems = corpus::random_trivial_corpus(0xA11CE, 50);
    systems.extend(corpus::singular_case_corpus());
    let mut disagreements = 0;
    for sys in &systems {
        let main: Vec<BTreeSet<VertexId>> = tail_sets(sys);
        let brute = oracle::maximal_tails_bruteforce(sys);
        if main != brute {
            disagreements += 1;
            continue;
        }
        let q = sys.quasi_orbit_space();
        assert!(q.is_partial_order());
        let oracle_order = oracle::oracle_quasi_order(sys, &q, 12, 3);
        if oracle_order != q.leq {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
    finish(
        "3 [trivial-group corpus: tails and quasi-orbit order vs oracle]",
        start,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_4_free_automorphism_corpus() {
    let start = Instant::now();
    for p in 2..=7usize {
        let rotated = corpus::cycle_rotation(p);
        let trivial = gtails_core::action::close_group(&corpus::cycle_graph(p), &[], 100).unwrap();
        // G-saturations of the classical maximal tails.
        let saturations: BTreeSet<BTreeSet<VertexId>> = oracle::maximal_tails_bruteforce(&trivial)
            .into_iter()
            .map(|t| {
                let mut s = BTreeSet::new();
                for v in t {
                    s.extend(rotated.group.vertex_orbit(v));
                }
                s
            })
            .collect();
        let g_tails: BTreeSet<BTreeSet<VertexId>> = tail_sets(&rotated).into_iter().collect();
        assert_eq!(saturations, g_tails, "C_{p} saturation mismatch");
    }
    finish(
        "4 [cyclic rotations: G-tails are saturations of tails]",
        start,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_5_pseudo_freeness_vs_bruteforce() {
    let start = Instant::now();
    let mut systems = corpus::random_trivial_corpus(0xBEEF, 50);
    systems.extend(corpus::singular_case_corpus());
    systems.extend((2..=7).map(corpus::cycle_rotation));
    systems.push(corpus::e22_z2());
    systems.push(corpus::e22_trivial());
    systems.push(corpus::e22_z2_fixing_loops());
    systems.push(corpus::e2inf_z2());
    systems.push(corpus::non_pseudo_free_system());
    systems.push(corpus::nonconstant_restriction_system());
    for sys in &systems {
        let brute = oracle::pseudo_free_bruteforce(sys, 10);
        assert_eq!(
            sys.is_pseudo_free(),
            brute.is_none(),
            "pseudo-freeness disagreement"
        );
        if let Some((g, path)) = brute {
            assert_eq!(sys.act_on_path(g, &path), path);
            assert_eq!(sys.restrict_path(g, &path), sys.group.identity());
        }
    }
    finish("5 [pseudo-freeness vs brute force]", start, Duration::from_secs(30));
}

#[test]
fn criterion_6_simplicity_verdicts() {
    let start = Instant::now();
    let v = corpus::two_loops_trivial().is_simple().unwrap();
    assert!(v.simple);

    let v = corpus::single_loop_trivial().is_simple().unwrap();
    assert!(!v.simple);
    assert!(v.failures.iter().any(|f| matches!(
        f,
        gtails_core::spectrum::SimplicityFailure::NoEntryCircuit { circuit } if circuit.path.len() == 1
    )));

    let v = corpus::e22_z2().is_simple().unwrap();
    assert!(!v.simple);
    assert!(v
        .failures
        .iter()
        .any(|f| matches!(f, gtails_core::spectrum::SimplicityFailure::NotMinimal { .. })));
    finish("6 [simplicity verdicts]", start, Duration::from_secs(1));
}

#[test]
fn criterion_7_higher_rank_periodicity() {
    // Torus 2-graph: Per = Z² at box 2.
    let start = Instant::now();
    let sys = corpus::torus_system();
    let m: BTreeSet<VertexId> = sys.skeleton.vertex_ids().collect();
    let (per, _) = sys.periodicity_group(&m, 2);
    assert!(per.is_full() && per.ambient() == 2);
    finish("7a [torus Per = Z²]", start, Duration::from_secs(5));

    // C2×C3: Per = 2Z ⊕ 3Z at box 4.
    let start = Instant::now();
    let sys = corpus::cycle_product_system(2, 3);
    let m: BTreeSet<VertexId> = sys.skeleton.vertex_ids().collect();
    let (per, _) = sys.periodicity_group(&m, 4);
    assert_eq!(per.basis(), &[vec![2, 0], vec![0, 3]]);
    finish("7b [C2×C3 Per = 2Z⊕3Z]", start, Duration::from_secs(5));

    // Rank-one loop through the k-graph route matches n_L = 1.
    let start = Instant::now();
    let rank1 = corpus::single_loop_trivial();
    let full: BTreeSet<VertexId> = rank1.graph.vertex_ids().collect();
    assert_eq!(rank1.g_period(&full), Some(1));
    let skel =
        gtails_core::kgraph::KGraphSkeleton::validate(&corpus::as_1graph(&corpus::single_loop()))
            .unwrap();
    let ksys = KSystem::close(&skel, &[], 100).unwrap();
    let km: BTreeSet<VertexId> = ksys.skeleton.vertex_ids().collect();
    let (per, _) = ksys.periodicity_group(&km, 2);
    assert_eq!(per.basis(), &[vec![1]]);
    finish("7c [rank-one loop Per = Z = n_L·Z]", start, Duration::from_secs(5));
}

#[test]
fn criterion_8_property_suites() {
    let start = Instant::now();
    let ksystems = corpus::kgraph_corpus();
    let mut sigma_samples = 0usize;

    for sys in &ksystems {
        let k = sys.skeleton.rank;
        for m in sys.maximal_g_tails() {
            // Per is closed under negation and addition within the box.
            let (per, cert) = sys.periodicity_group(&m, 3);
            for l in &cert.found {
                let neg: Vec<i64> = l.iter().map(|&x| -x).collect();
                assert!(cert.found.contains(&neg));
                for l2 in &cert.found {
                    let sum: Vec<i64> = l.iter().zip(l2).map(|(&a, &b)| a + b).collect();
                    if sum.iter().all(|&x| x.abs() <= 3) {
                        assert!(cert.found.contains(&sum), "Per not closed under +");
                    }
                }
                assert!(per.contains(l));
            }

            // M_PerG is nonempty, G-invariant and hereditary.
            let mperg = sys.m_perg(&m, 3);
            assert!(!mperg.is_empty());
            assert!(sys.group.is_invariant_vertex_set(&mperg));
            for &v in &mperg {
                for &w in &m {
                    if sys.skeleton.vertex_ge(v, w) {
                        assert!(mperg.contains(&w), "M_PerG not hereditary");
                    }
                }
            }

            // Surviving cycline states expand correctly to depth 6.
            for l in cert.found.iter().take(4) {
                for st in sys.cycline_fixpoint(l, &m).into_iter().take(8) {
                    assert!(
                        oracle::cycline_bruteforce(sys, &st.alpha, st.elem, &st.beta, Some(&m), 6),
                        "surviving state fails depth-6 expansion"
                    );
                }
            }

            // Σ properties: diagonal shifts, addition, G-invariance.
            let vs: Vec<VertexId> = m.iter().copied().collect();
            let degrees: Vec<Vec<u32>> = [0u32, 1]
                .iter()
                .flat_map(|&a| [0u32, 1].iter().map(move |&b| {
                    (0..k).map(|i| if i == 0 { a } else { b }).collect()
                }))
                .collect();
            for &v in vs.iter().take(3) {
                let members: Vec<(Vec<u32>, Vec<u32>)> = degrees
                    .iter()
                    .flat_map(|p| degrees.iter().map(move |q| (p.clone(), q.clone())))
                    .filter(|(p, q)| sys.sigma_membership(&m, v, p, q))
                    .collect();
                for p in &degrees {
                    for q in &degrees {
                        sigma_samples += 1;
                        if !sys.sigma_membership(&m, v, p, q) {
                            continue;
                        }
                        // diagonal shift (Lemma part 3)
                        let unit = vec![1u32; k];
                        let p1: Vec<u32> = p.iter().zip(&unit).map(|(a, b)| a + b).collect();
                        let q1: Vec<u32> = q.iter().zip(&unit).map(|(a, b)| a + b).collect();
                        assert!(
                            sys.sigma_membership(&m, v, &p1, &q1),
                            "Σ diagonal shift violated"
                        );
                        // closure of Σ_v under addition (part 6), mixed pairs
                        for (p2, q2) in members.iter().take(4) {
                            let ps: Vec<u32> = p.iter().zip(p2).map(|(a, b)| a + b).collect();
                            let qs: Vec<u32> = q.iter().zip(q2).map(|(a, b)| a + b).collect();
                            assert!(sys.sigma_membership(&m, v, &ps, &qs), "Σ addition violated");
                        }
                        // G-invariance (part 1)
                        for g in sys.group.elem_ids() {
                            let gv = sys.group.act_vertex(g, v);
                            assert!(
                                sys.sigma_membership(&m, gv, p, q),
                                "Σ G-invariance violated"
                            );
                        }
                        // monotonicity (parts 1 and 4): v ≥ g·w ⇒ Σ_v ⊆ Σ_w
                        for &w in &m {
                            let below = sys.group.elem_ids().any(|g| {
                                sys.skeleton.vertex_ge(v, sys.group.act_vertex(g, w))
                            });
                            if below {
                                assert!(
                                    sys.sigma_membership(&m, w, p, q),
                                    "Σ monotonicity violated"
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(sigma_samples >= 100, "only {sigma_samples} Σ samples");

    // No-entry circuit lengths are multiples of n_M on the rank-one corpora.
    let mut rank1 = corpus::random_trivial_corpus(0xC0FFEE, 30);
    rank1.push(corpus::e22_z2());
    rank1.extend(corpus::singular_case_corpus());
    for sys in &rank1 {
        for t in sys.enumerate_maximal_g_tails() {
            if let Some(n) = sys.g_period(&t.vertices) {
                for c in sys.g_circuits_without_entry(&t.vertices) {
                    assert_eq!(c.path.len() % n, 0, "circuit length not a multiple of n_M");
                }
                if let TailTag::Circuit { period, .. } = t.tag {
                    assert_eq!(period, n);
                }
            }
        }
    }

    // Rank-one inputs through the k-graph route: Per(tail) = n_M·Z or 0,
    // both with trivial groups and under rotation twists.
    let candidates = [
        corpus::single_loop(),
        corpus::two_loops_graph(),
        corpus::cycle_graph(4),
        corpus::e22_graph(),
    ];
    let mut pairs: Vec<(SelfSimilarSystem, KSystem)> = candidates
        .iter()
        .map(|g| {
            let rsys = gtails_core::action::close_group(g, &[], 100).unwrap();
            let skel =
                gtails_core::kgraph::KGraphSkeleton::validate(&corpus::as_1graph(g)).unwrap();
            (rsys, KSystem::close(&skel, &[], 100).unwrap())
        })
        .collect();
    for p in [3usize, 5] {
        pairs.push((corpus::cycle_rotation(p), corpus::cycle_rotation_k(p)));
    }
    for (rsys, ksys) in &pairs {
        // Rank-one and 1-graph tail enumerations coincide.
        let k_tails = ksys.maximal_g_tails();
        let r_tails: Vec<BTreeSet<VertexId>> = tail_sets(rsys);
        assert_eq!(k_tails, r_tails);
        for t in rsys.enumerate_maximal_g_tails() {
            let (per, _) = ksys.periodicity_group(&t.vertices, 4);
            match rsys.g_period(&t.vertices) {
                Some(n) => assert_eq!(per.basis(), &[vec![n as i64]]),
                None => assert!(per.is_trivial()),
            }
        }
    }

    finish("8 [property suites]", start, Duration::from_secs(60));
}

#[test]
fn criterion_9_refusal_with_witness() {
    let start = Instant::now();
    // Library level: the witness names (s, v0).
    let sys = corpus::e22_z2_fixing_loops();
    match sys.prim_spectrum() {
        Err(Error::EssentialCentralityViolated { witness }) => {
            assert!(witness.contains("s"), "witness should name the element: {witness}");
            assert!(witness.contains("v0"), "witness should name the vertex: {witness}");
        }
        other => panic!("expected refusal, got {other:?}"),
    }
    // Process level: exit code 2 and the witness on stderr.
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_gtails"))
        .args(["spectrum"])
        .arg(fixture("e22_fixing_loops.json"))
        .output()
        .expect("spawn gtails");
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("(s, v0)"), "stderr: {stderr}");
    finish("9 [refusal with witness, exit 2]", start, Duration::from_secs(10));
}
