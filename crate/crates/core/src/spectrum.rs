//! The quasi-orbit space and the primitive-spectrum component diagram of a
//! rank-one system, essential central isotropy, minimality and simplicity.
//!
//! Points of the quasi-orbit space are the maximal G-tails together with the
//! G-orbits of breaking vertices. Specialization `p' ≤ p` (meaning `p'` lies
//! in the closure of `p`) is decided by closed-form rules: a vertex-type
//! point (a finite-type tail or a breaking-vertex orbit, represented by a
//! vertex `v`) specializes under `p` iff `v ∈ τ(p)` and infinitely many edges
//! enter `v` from `τ(p)`; a path-type point does iff its tail is contained in
//! `τ(p)`. The brute-force orbit-closure oracle validates these rules on the
//! corpora.

use std::collections::BTreeSet;

use crate::action::{ElemId, SelfSimilarSystem};
use crate::graph::{Path, VertexId};
use crate::tails::{GCircuit, GTail, TailTag};
use crate::{Error, Result};

/// Representative boundary path of a quasi-orbit point, used by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitRep {
    /// A singular vertex (finite boundary path of length 0).
    Vertex(VertexId),
    /// The infinite path `γ⁽¹⁾γ⁽²⁾…` determined by a G-circuit `(twist, γ)`.
    Periodic { twist: ElemId, circuit: Path },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointKind {
    /// A maximal G-tail (index into the tail list).
    Tail,
    /// A G-orbit of breaking vertices.
    BreakingOrbit(BTreeSet<VertexId>),
}

#[derive(Debug, Clone)]
pub struct QuasiPoint {
    pub kind: PointKind,
    /// τ(p): the tail the point lives over.
    pub tail: BTreeSet<VertexId>,
    /// For tail points, the classification of the tail.
    pub tag: Option<TailTag>,
    pub rep: OrbitRep,
    pub label: String,
}

impl QuasiPoint {
    /// Vertex-type points are finite-type tails and breaking-vertex orbits.
    pub fn vertex_like(&self) -> bool {
        matches!(self.rep, OrbitRep::Vertex(_))
    }
}

/// The quasi-orbit space: points plus the specialization partial order.
#[derive(Debug, Clone)]
pub struct QuasiOrbitSpace {
    pub points: Vec<QuasiPoint>,
    /// `leq[p'][p]`: `p'` lies in the closure of `p`.
    pub leq: Vec<Vec<bool>>,
}

/// One component of the primitive spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimComponent {
    ClosedPoint,
    /// A circle with parameter `w = z^period`.
    Circle { period: usize },
}

/// The primitive spectrum as a component diagram over the quasi-orbit points.
#[derive(Debug, Clone)]
pub struct PrimSpectrum {
    pub quasi: QuasiOrbitSpace,
    /// Parallel to `quasi.points`.
    pub components: Vec<PrimComponent>,
}

/// A violation of essential central isotropy.
#[derive(Debug, Clone)]
pub enum EciViolation {
    /// (i) a breaking or no-entry singular vertex with nontrivial stabilizer.
    SingularStabilizer { elem: ElemId, vertex: VertexId },
    /// (ii) a no-entry circuit base with nontrivial stabilizer.
    CircuitStabilizer { elem: ElemId, vertex: VertexId },
    /// (iii) an element acting trivially on `vE*M` for an aperiodic tail `M`.
    TriviallyActing {
        elem: ElemId,
        vertex: VertexId,
        tail: BTreeSet<VertexId>,
    },
}

impl EciViolation {
    pub fn describe(&self, sys: &SelfSimilarSystem) -> String {
        match self {
            EciViolation::SingularStabilizer { elem, vertex } => format!(
                "stabilizer of singular vertex {} contains {}",
                sys.graph.vertex_name(*vertex),
                sys.group.name(*elem)
            ),
            EciViolation::CircuitStabilizer { elem, vertex } => format!(
                "stabilizer of circuit vertex {} contains {}",
                sys.graph.vertex_name(*vertex),
                sys.group.name(*elem)
            ),
            EciViolation::TriviallyActing { elem, vertex, tail } => format!(
                "({}, {}) acts trivially on {}E*M for M={}",
                sys.group.name(*elem),
                sys.graph.vertex_name(*vertex),
                sys.graph.vertex_name(*vertex),
                sys.graph.format_vertex_set(tail)
            ),
        }
    }
}

/// Simplicity report: the failing clauses, empty when simple.
#[derive(Debug, Clone)]
pub enum SimplicityFailure {
    /// Clause (i): a maximal G-tail other than E⁰.
    NotMinimal { tail: BTreeSet<VertexId> },
    /// Clause (ii): a G-circuit without entry in E⁰.
    NoEntryCircuit { circuit: GCircuit },
    /// Clause (iii): an element acting trivially on some vE*.
    TriviallyActing { elem: ElemId, vertex: VertexId },
}

#[derive(Debug, Clone)]
pub struct SimplicityVerdict {
    pub simple: bool,
    pub failures: Vec<SimplicityFailure>,
}

impl SelfSimilarSystem {
    /// Builds the quasi-orbit space. Pseudo-freeness is not required.
    pub fn quasi_orbit_space(&self) -> QuasiOrbitSpace {
        let tails = self.enumerate_maximal_g_tails();
        let mut points: Vec<QuasiPoint> = Vec::new();
        for t in &tails {
            points.push(self.tail_point(t));
        }
        // One point per G-orbit of breaking vertices.
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        for v in self.breaking_vertices() {
            if seen.contains(&v) {
                continue;
            }
            let orbit = self.group.vertex_orbit(v);
            seen.extend(orbit.iter().copied());
            let tail = self.up_orbit_closure(&BTreeSet::from([v]));
            let label = format!(
                "bv{}",
                self.graph.format_vertex_set(&orbit)
            );
            points.push(QuasiPoint {
                kind: PointKind::BreakingOrbit(orbit),
                tail,
                tag: None,
                rep: OrbitRep::Vertex(v),
                label,
            });
        }
        let n = points.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, p1) in points.iter().enumerate() {
            for (j, p2) in points.iter().enumerate() {
                leq[i][j] = self.specializes(p1, p2, i == j);
            }
        }
        QuasiOrbitSpace { points, leq }
    }

    fn tail_point(&self, t: &GTail) -> QuasiPoint {
        let rep = match &t.tag {
            TailTag::Circuit { witness, .. } => OrbitRep::Periodic {
                twist: witness.twist,
                circuit: witness.path.clone(),
            },
            TailTag::Finite { witness } => OrbitRep::Vertex(*witness),
            TailTag::Aperiodic => {
                let cycle = self
                    .aperiodic_cycle(&t.vertices)
                    .expect("aperiodic tail has a cycle through a minimal vertex");
                OrbitRep::Periodic {
                    twist: self.group.identity(),
                    circuit: cycle,
                }
            }
        };
        QuasiPoint {
            kind: PointKind::Tail,
            tail: t.vertices.clone(),
            tag: Some(t.tag.clone()),
            rep,
            label: self.graph.format_vertex_set(&t.vertices),
        }
    }

    /// A cycle through a minimal vertex of an aperiodic tail; any infinite
    /// path along it has the whole tail as its MT_G.
    fn aperiodic_cycle(&self, m: &BTreeSet<VertexId>) -> Option<Path> {
        for &v in &self.minimal_vertices(m) {
            let (plain, omega) = self.received_in(v, m);
            let first = plain.first().copied().or_else(|| {
                if omega {
                    self.graph
                        .received_edges(v)
                        .iter()
                        .copied()
                        .find(|&e| m.contains(&self.graph.edge(e).source))
                } else {
                    None
                }
            });
            let Some(first) = first else { continue };
            let w = self.graph.edge(first).source;
            // path from w back down to v, staying in m automatically
            if let Some(back) = self.shortest_path(w, v) {
                let mut cycle = Path::vertex(v);
                cycle = cycle.extended(
                    &self.graph,
                    crate::graph::PathStep {
                        edge: first,
                        copy: 0,
                    },
                );
                for step in back.steps {
                    cycle = cycle.extended(&self.graph, step);
                }
                return Some(cycle);
            }
        }
        None
    }

    fn shortest_path(&self, from: VertexId, to: VertexId) -> Option<Path> {
        use std::collections::VecDeque;
        if from == to {
            return Some(Path::vertex(from));
        }
        let mut prev: Vec<Option<(VertexId, crate::graph::EdgeId)>> =
            vec![None; self.graph.num_vertices()];
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &e in self.graph.received_edges(u) {
                let w = self.graph.edge(e).source;
                if w != from && prev[w.idx()].is_none() {
                    prev[w.idx()] = Some((u, e));
                    if w == to {
                        let mut steps = Vec::new();
                        let mut cur = w;
                        while cur != from {
                            let (p, edge) = prev[cur.idx()].unwrap();
                            steps.push(crate::graph::PathStep { edge, copy: 0 });
                            cur = p;
                        }
                        steps.reverse();
                        let mut path = Path::vertex(from);
                        for s in steps {
                            path = path.extended(&self.graph, s);
                        }
                        return Some(path);
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn specializes(&self, p1: &QuasiPoint, p2: &QuasiPoint, same: bool) -> bool {
        if same {
            return true;
        }
        match &p1.rep {
            OrbitRep::Vertex(v) => {
                if !p2.tail.contains(v) {
                    return false;
                }
                // Infinitely many entries from τ(p2): an ω-family sourced
                // inside the tail.
                let (_, omega) = self.received_in(*v, &p2.tail);
                omega
            }
            OrbitRep::Periodic { .. } => p1.tail.is_subset(&p2.tail),
        }
    }

    /// Checks conditions (i)–(iii) for essentially central isotropy and
    /// returns the violations (empty = satisfied). Requires pseudo-freeness.
    pub fn essential_central_isotropy(&self) -> Result<Vec<EciViolation>> {
        self.require_pseudo_free()?;
        let mut violations = Vec::new();
        let mut special: BTreeSet<VertexId> = self.breaking_vertices();
        special.extend(self.sing0());
        for v in special {
            for g in self.vertex_stabilizer(v) {
                if g != self.group.identity() {
                    violations.push(EciViolation::SingularStabilizer { elem: g, vertex: v });
                }
            }
        }
        for t in self.enumerate_maximal_g_tails() {
            match &t.tag {
                TailTag::Circuit { witness, .. } => {
                    // One circuit suffices: the stabilizer condition is
                    // independent of the chosen no-entry circuit.
                    let base = witness.path.range();
                    for g in self.vertex_stabilizer(base) {
                        if g != self.group.identity() {
                            violations.push(EciViolation::CircuitStabilizer {
                                elem: g,
                                vertex: base,
                            });
                        }
                    }
                }
                TailTag::Aperiodic => {
                    for (g, v) in self.trivially_acting_pairs(&t.vertices) {
                        violations.push(EciViolation::TriviallyActing {
                            elem: g,
                            vertex: v,
                            tail: t.vertices.clone(),
                        });
                    }
                }
                TailTag::Finite { .. } => {}
            }
        }
        Ok(violations)
    }

    /// The primitive spectrum as a component diagram: closed points for
    /// finite-type and aperiodic tails and breaking orbits, circles with
    /// period `n_L` for circuit-type tails. Refuses when essential central
    /// isotropy fails.
    pub fn prim_spectrum(&self) -> Result<PrimSpectrum> {
        let violations = self.essential_central_isotropy()?;
        if let Some(first) = violations.first() {
            return Err(Error::EssentialCentralityViolated {
                witness: first.describe(self),
            });
        }
        let quasi = self.quasi_orbit_space();
        let components = quasi
            .points
            .iter()
            .map(|p| match &p.tag {
                Some(TailTag::Circuit { period, .. }) => PrimComponent::Circle { period: *period },
                _ => PrimComponent::ClosedPoint,
            })
            .collect();
        Ok(PrimSpectrum { quasi, components })
    }

    /// Minimality: the only maximal G-tail is E⁰.
    pub fn is_minimal(&self) -> bool {
        let tails = self.enumerate_maximal_g_tails();
        tails.len() == 1 && tails[0].vertices.len() == self.graph.num_vertices()
    }

    /// Simplicity of the reduced algebra: minimality, no no-entry G-circuit
    /// in E⁰, and no nontrivial element acting trivially on some vE*.
    pub fn is_simple(&self) -> Result<SimplicityVerdict> {
        self.require_pseudo_free()?;
        let mut failures = Vec::new();
        let full: BTreeSet<VertexId> = self.graph.vertex_ids().collect();
        for t in self.enumerate_maximal_g_tails() {
            if t.vertices != full {
                failures.push(SimplicityFailure::NotMinimal { tail: t.vertices });
            }
        }
        for c in self.g_circuits_without_entry(&full) {
            failures.push(SimplicityFailure::NoEntryCircuit { circuit: c });
        }
        for (g, v) in self.trivially_acting_pairs(&full) {
            failures.push(SimplicityFailure::TriviallyActing { elem: g, vertex: v });
        }
        Ok(SimplicityVerdict {
            simple: failures.is_empty(),
            failures,
        })
    }
}

impl QuasiOrbitSpace {
    /// Verifies that `leq` is a partial order.
    pub fn is_partial_order(&self) -> bool {
        let n = self.points.len();
        for i in 0..n {
            if !self.leq[i][i] {
                return false;
            }
            for j in 0..n {
                if i != j && self.leq[i][j] && self.leq[j][i] {
                    return false;
                }
                for k in 0..n {
                    if self.leq[i][j] && self.leq[j][k] && !self.leq[i][k] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn e22_quasi_orbits() {
        let sys = corpus::e22_z2();
        let q = sys.quasi_orbit_space();
        assert_eq!(q.points.len(), 2);
        assert!(q.is_partial_order());
        // P1 = {v0} below P2 = {v0,v1,v2}, not conversely.
        assert!(q.leq[0][1]);
        assert!(!q.leq[1][0]);
    }

    #[test]
    fn single_loop_single_point() {
        let sys = corpus::single_loop_trivial();
        let q = sys.quasi_orbit_space();
        assert_eq!(q.points.len(), 1);
    }

    #[test]
    fn bv_case4_order() {
        let sys = corpus::bv_case4_system();
        let q = sys.quasi_orbit_space();
        // The breaking vertex contributes its own point; the tail point of
        // the aperiodic path lies in its closure but not conversely.
        let bv_idx = q
            .points
            .iter()
            .position(|p| matches!(p.kind, PointKind::BreakingOrbit(_)))
            .unwrap();
        let tail_idx = q
            .points
            .iter()
            .position(|p| {
                matches!(p.kind, PointKind::Tail)
                    && matches!(p.tag, Some(TailTag::Aperiodic))
                    && p.tail == q.points[bv_idx].tail
            })
            .unwrap();
        assert!(q.leq[tail_idx][bv_idx]);
        assert!(!q.leq[bv_idx][tail_idx]);
    }

    #[test]
    fn eci_examples() {
        assert!(corpus::e22_z2().essential_central_isotropy().unwrap().is_empty());
        assert!(corpus::e22_trivial()
            .essential_central_isotropy()
            .unwrap()
            .is_empty());
        let violations = corpus::e22_z2_fixing_loops()
            .essential_central_isotropy()
            .unwrap();
        assert_eq!(violations.len(), 1);
        match &violations[0] {
            EciViolation::TriviallyActing { vertex, tail, .. } => {
                let sys = corpus::e22_z2_fixing_loops();
                assert_eq!(sys.graph.vertex_name(*vertex), "v0");
                assert_eq!(tail.len(), 1);
            }
            other => panic!("unexpected violation {other:?}"),
        }
    }

    #[test]
    fn e22_spectrum_shape() {
        let sys = corpus::e22_z2();
        let spec = sys.prim_spectrum().unwrap();
        assert_eq!(spec.components.len(), 2);
        assert_eq!(spec.components[0], PrimComponent::ClosedPoint);
        assert_eq!(spec.components[1], PrimComponent::Circle { period: 1 });
        assert!(spec.quasi.leq[0][1]);
    }

    #[test]
    fn single_loop_spectrum_is_circle() {
        let sys = corpus::single_loop_trivial();
        let spec = sys.prim_spectrum().unwrap();
        assert_eq!(spec.components, vec![PrimComponent::Circle { period: 1 }]);
    }

    #[test]
    fn source_only_graph_is_one_closed_point() {
        let g = crate::graph::Graph::build(&crate::graph::GraphSpec {
            vertices: vec!["w".into()],
            edges: vec![],
        })
        .unwrap();
        let sys = crate::action::close_group(&g, &[], 10).unwrap();
        let spec = sys.prim_spectrum().unwrap();
        assert_eq!(spec.components, vec![PrimComponent::ClosedPoint]);
    }

    #[test]
    fn spectrum_refuses_on_violation() {
        let sys = corpus::e22_z2_fixing_loops();
        match sys.prim_spectrum() {
            Err(Error::EssentialCentralityViolated { witness }) => {
                assert!(witness.contains("v0"));
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn minimality() {
        assert!(!corpus::e22_z2().is_minimal());
        assert!(corpus::single_loop_trivial().is_minimal());
        assert!(corpus::two_loops_trivial().is_minimal());
        assert!(corpus::nonconstant_restriction_system().is_minimal());
    }

    #[test]
    fn simplicity_verdicts() {
        // One vertex, two loops, trivial group: simple.
        let v = corpus::two_loops_trivial().is_simple().unwrap();
        assert!(v.simple);
        // E_{2,2}: clause (i).
        let v = corpus::e22_z2().is_simple().unwrap();
        assert!(!v.simple);
        assert!(v
            .failures
            .iter()
            .any(|f| matches!(f, SimplicityFailure::NotMinimal { .. })));
        // Single loop: clause (ii), the loop is a no-entry circuit.
        let v = corpus::single_loop_trivial().is_simple().unwrap();
        assert!(!v.simple);
        assert!(v
            .failures
            .iter()
            .any(|f| matches!(f, SimplicityFailure::NoEntryCircuit { .. })));
    }

    #[test]
    fn rotated_cycle_spectrum_periods() {
        // One circle with period 1 under the rotation, period p without it.
        for p in [3usize, 5] {
            let spec = corpus::cycle_rotation(p).prim_spectrum().unwrap();
            assert_eq!(spec.components, vec![PrimComponent::Circle { period: 1 }]);
            let trivial =
                crate::action::close_group(&corpus::cycle_graph(p), &[], 100).unwrap();
            let spec = trivial.prim_spectrum().unwrap();
            assert_eq!(spec.components, vec![PrimComponent::Circle { period: p }]);
        }
    }

    #[test]
    fn e33_with_z3_orbit_bookkeeping() {
        let g = crate::graph::Graph::build(&crate::graph::GraphSpec {
            vertices: vec!["v0".into(), "v1".into(), "v2".into(), "v3".into()],
            edges: vec![
                ("e1".into(), "v0".into(), "v0".into(), crate::graph::Multiplicity::One),
                ("e2".into(), "v0".into(), "v0".into(), crate::graph::Multiplicity::One),
                ("e3".into(), "v0".into(), "v0".into(), crate::graph::Multiplicity::One),
                ("a1".into(), "v0".into(), "v1".into(), crate::graph::Multiplicity::One),
                ("a2".into(), "v0".into(), "v2".into(), crate::graph::Multiplicity::One),
                ("a3".into(), "v0".into(), "v3".into(), crate::graph::Multiplicity::One),
                ("l1".into(), "v1".into(), "v1".into(), crate::graph::Multiplicity::One),
                ("l2".into(), "v2".into(), "v2".into(), crate::graph::Multiplicity::One),
                ("l3".into(), "v3".into(), "v3".into(), crate::graph::Multiplicity::One),
            ],
        })
        .unwrap();
        let c = corpus::generator(
            &g,
            "c",
            &[("v1", "v2"), ("v2", "v3"), ("v3", "v1")],
            &[
                ("e1", "e2"),
                ("e2", "e3"),
                ("e3", "e1"),
                ("a1", "a2"),
                ("a2", "a3"),
                ("a3", "a1"),
                ("l1", "l2"),
                ("l2", "l3"),
                ("l3", "l1"),
            ],
            &(["e1", "e2", "e3", "a1", "a2", "a3", "l1", "l2", "l3"]
                .map(|e| (e, corpus::letter(0)))),
        );
        let sys = crate::action::close_group(&g, &[c], 100).unwrap();
        assert_eq!(sys.group.size(), 3);
        // One Z/3-orbit on {v1,v2,v3}: tails {v0} and everything.
        let spec = sys.prim_spectrum().unwrap();
        assert_eq!(
            spec.components,
            vec![PrimComponent::ClosedPoint, PrimComponent::Circle { period: 1 }]
        );
        // Trivial subgroup: three orbits, hence three circles.
        let trivial = crate::action::close_group(&g, &[], 100).unwrap();
        let spec = trivial.prim_spectrum().unwrap();
        let circles = spec
            .components
            .iter()
            .filter(|c| matches!(c, PrimComponent::Circle { .. }))
            .count();
        assert_eq!(spec.components.len(), 4);
        assert_eq!(circles, 3);
    }

    #[test]
    fn component_count_matches_bijection() {
        // |components| = |M_γ| + |G\BV| + |L| exactly.
        for sys in [
            corpus::e22_z2(),
            corpus::e22_trivial(),
            corpus::single_loop_trivial(),
            corpus::two_loops_trivial(),
            corpus::bv_case3_system(),
            corpus::bv_case4_system(),
        ] {
            let tails = sys.enumerate_maximal_g_tails();
            let n_l = tails
                .iter()
                .filter(|t| matches!(t.tag, TailTag::Circuit { .. }))
                .count();
            let n_gamma = tails.len() - n_l;
            let mut bv_orbits: BTreeSet<BTreeSet<crate::graph::VertexId>> = BTreeSet::new();
            for v in sys.breaking_vertices() {
                bv_orbits.insert(sys.group.vertex_orbit(v));
            }
            match sys.prim_spectrum() {
                Ok(spec) => {
                    assert_eq!(spec.components.len(), n_gamma + bv_orbits.len() + n_l);
                    let circles = spec
                        .components
                        .iter()
                        .filter(|c| matches!(c, PrimComponent::Circle { .. }))
                        .count();
                    assert_eq!(circles, n_l);
                }
                Err(e) => panic!("unexpected refusal: {e}"),
            }
        }
    }

    #[test]
    fn e2inf_variant_matches_e22_shape() {
        let sys = corpus::e2inf_z2();
        assert!(sys.breaking_vertices().is_empty());
        let spec = sys.prim_spectrum().unwrap();
        assert_eq!(spec.components.len(), 2);
        assert_eq!(spec.components[0], PrimComponent::ClosedPoint);
        assert_eq!(spec.components[1], PrimComponent::Circle { period: 1 });
        assert!(spec.quasi.leq[0][1] && !spec.quasi.leq[1][0]);
    }
}
