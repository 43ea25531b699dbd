//! Maximal G-tails of a rank-one system: enumeration, classification into
//! circuit-type (L), finite-type (M₀) and aperiodic-type (M∞) tails,
//! G-circuits without entry, G-periods, breaking vertices and the
//! singular-vertex case split.

use std::collections::BTreeSet;

use crate::action::{ElemId, SelfSimilarSystem};
use crate::graph::{Path, PathStep, VertexId};
use crate::{Error, Result};

/// A G-circuit `(g, γ)` with `s(γ) = g·r(γ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GCircuit {
    pub twist: ElemId,
    pub path: Path,
}

/// Classification tag of a maximal G-tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailTag {
    /// A G-circuit without entry exists; `period` is the shortest length.
    Circuit { period: usize, witness: GCircuit },
    /// Some minimal vertex `v` has `vE¹M = ∅`.
    Finite { witness: VertexId },
    /// Neither: the tail is represented by an aperiodic infinite path.
    Aperiodic,
}

impl TailTag {
    pub fn short(&self) -> &'static str {
        match self {
            TailTag::Circuit { .. } => "L",
            TailTag::Finite { .. } => "M0",
            TailTag::Aperiodic => "Minf",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GTail {
    pub vertices: BTreeSet<VertexId>,
    pub tag: TailTag,
    pub minimal_vertices: BTreeSet<VertexId>,
}

/// Case split for singular vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularCase {
    /// `vE¹MT_G(v) = ∅`.
    NoEntry = 1,
    /// `|vE¹MT_G(v)| = ∞`.
    InfiniteFromTail = 2,
    /// Breaking vertex whose tail has a no-entry circuit.
    BreakingCircuit = 3,
    /// Breaking vertex with an aperiodic tail.
    BreakingAperiodic = 4,
}

impl SelfSimilarSystem {
    /// `MT_G(v)`-style upward closure `{w : w ≥ g·u, u ∈ seed}`.
    pub fn up_orbit_closure(&self, seed: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        let mut saturated = BTreeSet::new();
        for &u in seed {
            saturated.extend(self.group.vertex_orbit(u));
        }
        self.graph.up_closure(&saturated)
    }

    /// Conditions (i)–(iii) of the maximal G-tail definition.
    pub fn is_maximal_g_tail(&self, m: &BTreeSet<VertexId>) -> bool {
        if m.is_empty() || !self.group.is_invariant_vertex_set(m) {
            return false;
        }
        for &w in m {
            for v in self.graph.vertex_ids() {
                if self.graph.vertex_ge(v, w) && !m.contains(&v) {
                    return false;
                }
            }
        }
        for &v in m {
            if self.graph.is_regular(v) {
                let has_continuation = self
                    .graph
                    .received_edges(v)
                    .iter()
                    .any(|&e| m.contains(&self.graph.edge(e).source));
                if !has_continuation {
                    return false;
                }
            }
        }
        for &v in m {
            for &w in m {
                let ok = m.iter().any(|&u| {
                    self.graph.vertex_ge(v, u)
                        && self
                            .group
                            .elem_ids()
                            .any(|g| self.graph.vertex_ge(w, self.group.act_vertex(g, u)))
                });
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// The smallest maximal G-tail containing the seed, or `NotATail` when the
    /// upward G-closure of the seed fails conditions (ii)/(iii).
    pub fn mt_generated_by(&self, seed: &BTreeSet<VertexId>) -> Result<GTail> {
        if seed.is_empty() {
            return Err(Error::NotATail {
                reason: "empty seed".into(),
            });
        }
        let m = self.up_orbit_closure(seed);
        if !self.is_maximal_g_tail(&m) {
            return Err(Error::NotATail {
                reason: format!(
                    "closure {} fails the continuation or directedness condition",
                    self.graph.format_vertex_set(&m)
                ),
            });
        }
        Ok(self.classify_tail(m))
    }

    /// All maximal G-tails. Below 16 vertices this filters all vertex subsets
    /// against the definition; larger graphs fall back to candidate
    /// generation from vertex-orbit closures.
    pub fn enumerate_maximal_g_tails(&self) -> Vec<GTail> {
        let nv = self.graph.num_vertices();
        let mut sets: Vec<BTreeSet<VertexId>> = Vec::new();
        if nv <= 15 {
            for mask in 1u32..(1 << nv) {
                let set: BTreeSet<VertexId> = (0..nv)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| VertexId(i as u32))
                    .collect();
                if self.is_maximal_g_tail(&set) {
                    sets.push(set);
                }
            }
        } else {
            let mut found: BTreeSet<BTreeSet<VertexId>> = BTreeSet::new();
            for v in self.graph.vertex_ids() {
                let m = self.up_orbit_closure(&BTreeSet::from([v]));
                if self.is_maximal_g_tail(&m) {
                    found.insert(m);
                }
            }
            sets.extend(found);
        }
        sets.sort();
        sets.into_iter().map(|m| self.classify_tail(m)).collect()
    }

    /// Minimal vertices of `m`: those below which everything in `m` is
    /// equivalent.
    pub fn minimal_vertices(&self, m: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        m.iter()
            .copied()
            .filter(|&v| {
                m.iter()
                    .all(|&w| !self.graph.vertex_ge(v, w) || self.graph.vertex_ge(w, v))
            })
            .collect()
    }

    fn classify_tail(&self, m: BTreeSet<VertexId>) -> GTail {
        let minimal = self.minimal_vertices(&m);
        let circuits = self.g_circuits_without_entry(&m);
        if let Some(first) = circuits.first() {
            let period = circuits.iter().map(|c| c.path.len()).min().unwrap();
            return GTail {
                vertices: m,
                tag: TailTag::Circuit {
                    period,
                    witness: first.clone(),
                },
                minimal_vertices: minimal,
            };
        }
        let finite_witness = minimal.iter().copied().find(|&v| {
            let (plain, omega) = self.received_in(v, &m);
            plain.is_empty() && !omega
        });
        let tag = match finite_witness {
            Some(v) => TailTag::Finite { witness: v },
            None => TailTag::Aperiodic,
        };
        GTail {
            vertices: m,
            tag,
            minimal_vertices: minimal,
        }
    }

    /// All no-entry G-circuits found by walking the deterministic subgraph
    /// `{v ∈ M : |vE¹M| = 1}` for at most `|E⁰|·|G|` steps from each vertex.
    pub fn g_circuits_without_entry(&self, m: &BTreeSet<VertexId>) -> Vec<GCircuit> {
        let unique_edge = |v: VertexId| -> Option<crate::graph::EdgeId> {
            let (plain, omega) = self.received_in(v, m);
            if omega || plain.len() != 1 {
                None
            } else {
                Some(plain[0])
            }
        };
        let bound = self.graph.num_vertices() * self.group.size();
        let mut out = Vec::new();
        for &start in m.iter() {
            let mut path = Path::vertex(start);
            let mut at = start;
            for _ in 0..bound {
                let Some(e) = unique_edge(at) else { break };
                path = path.extended(&self.graph, PathStep { edge: e, copy: 0 });
                at = self.graph.edge(e).source;
                if let Some(closing_edge) = unique_edge(at) {
                    for g in self.group.elem_ids() {
                        if self.group.act_vertex(g, start) != at {
                            continue;
                        }
                        let first = path.steps[0].edge;
                        if self.group.act_edge_raw(g, first.idx()) == closing_edge.idx() {
                            out.push(GCircuit {
                                twist: g,
                                path: path.clone(),
                            });
                        }
                    }
                }
            }
        }
        out.sort_by_key(|c| (c.path.len(), c.path.steps.clone(), c.twist));
        out.dedup_by(|a, b| a.twist == b.twist && a.path == b.path);
        out
    }

    /// The G-period `n_M`: length of a shortest no-entry G-circuit. Every
    /// other no-entry circuit length is a multiple of it.
    pub fn g_period(&self, m: &BTreeSet<VertexId>) -> Option<usize> {
        let circuits = self.g_circuits_without_entry(m);
        let n = circuits.iter().map(|c| c.path.len()).min()?;
        debug_assert!(circuits.iter().all(|c| c.path.len() % n == 0));
        Some(n)
    }

    /// `|vE¹MT_G(v)|` classified as 0, finite-positive, or infinite.
    fn tail_entry_count(&self, v: VertexId) -> (usize, bool) {
        let mt = self.up_orbit_closure(&BTreeSet::from([v]));
        let (plain, omega) = self.received_in(v, &mt);
        (plain.len(), omega)
    }

    /// Singular vertices with `0 < |vE¹MT_G(v)| < ∞`.
    pub fn breaking_vertices(&self) -> BTreeSet<VertexId> {
        self.graph
            .singular_vertices()
            .into_iter()
            .filter(|&v| {
                let (count, omega) = self.tail_entry_count(v);
                !omega && count > 0
            })
            .collect()
    }

    /// Singular vertices with `vE¹MT_G(v) = ∅`.
    pub fn sing0(&self) -> BTreeSet<VertexId> {
        self.graph
            .singular_vertices()
            .into_iter()
            .filter(|&v| {
                let (count, omega) = self.tail_entry_count(v);
                !omega && count == 0
            })
            .collect()
    }

    pub fn classify_singular_vertex(&self, v: VertexId) -> Result<SingularCase> {
        if !self.graph.singular_vertices().contains(&v) {
            return Err(Error::NotSingular {
                vertex: self.graph.vertex_name(v).to_string(),
            });
        }
        let (count, omega) = self.tail_entry_count(v);
        if omega {
            return Ok(SingularCase::InfiniteFromTail);
        }
        if count == 0 {
            return Ok(SingularCase::NoEntry);
        }
        let mt = self.up_orbit_closure(&BTreeSet::from([v]));
        if self.g_circuits_without_entry(&mt).is_empty() {
            Ok(SingularCase::BreakingAperiodic)
        } else {
            Ok(SingularCase::BreakingCircuit)
        }
    }
}
