//! Directed-graph substrate: vertices, edges with multiplicity tags, paths,
//! the reachability preorder and singular-vertex detection.
//!
//! Conventions follow graph-algebra usage: an edge `e` points from its source
//! `s(e)` to its range `r(e)`, a path `e1 e2 … en` satisfies
//! `s(e_i) = r(e_{i+1})`, and `v ≥ w` means there is a finite path with range
//! `v` and source `w`. `vE¹` denotes the set of edges with range `v`.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// Index of a vertex in canonical (lexicographic-by-name) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Index of an edge record in canonical order. An `Omega` record stands for a
/// countable family of parallel edges sharing range and source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Multiplicity {
    One,
    /// Countably many parallel copies, indexed by natural numbers.
    Omega,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub range: VertexId,
    pub source: VertexId,
    pub multiplicity: Multiplicity,
}

/// Plain description used to build a [`Graph`].
#[derive(Debug, Clone, Default)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    /// `(name, range, source, multiplicity)`
    pub edges: Vec<(String, String, String, Multiplicity)>,
}

/// A validated directed graph, immutable after construction.
#[derive(Debug, Clone)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    /// `received[v]` = edges `e` with `r(e) = v`, i.e. `vE¹`.
    received: Vec<Vec<EdgeId>>,
    /// `ge[v][w]` = `v ≥ w`, the reflexive-transitive reachability preorder.
    ge: Vec<Vec<bool>>,
    /// Strongly connected component id per vertex (w.r.t. the ≥ digraph).
    scc_id: Vec<usize>,
    scc_count: usize,
}

impl Graph {
    /// Builds and validates a graph, putting vertices and edges in canonical
    /// lexicographic order.
    pub fn build(spec: &GraphSpec) -> Result<Graph> {
        let mut vertices = spec.vertices.clone();
        vertices.sort();
        for pair in vertices.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateName {
                    kind: "vertex",
                    name: pair[0].clone(),
                });
            }
        }
        let vid = |name: &str| -> Option<VertexId> {
            vertices
                .binary_search_by(|v| v.as_str().cmp(name))
                .ok()
                .map(|i| VertexId(i as u32))
        };
        let mut edges: Vec<Edge> = Vec::with_capacity(spec.edges.len());
        for (name, range, source, mult) in &spec.edges {
            let r = vid(range).ok_or_else(|| Error::DanglingEndpoint {
                edge: name.clone(),
                vertex: range.clone(),
            })?;
            let s = vid(source).ok_or_else(|| Error::DanglingEndpoint {
                edge: name.clone(),
                vertex: source.clone(),
            })?;
            edges.push(Edge {
                name: name.clone(),
                range: r,
                source: s,
                multiplicity: *mult,
            });
        }
        edges.sort_by(|a, b| a.name.cmp(&b.name));
        for pair in edges.windows(2) {
            if pair[0].name == pair[1].name {
                return Err(Error::DuplicateName {
                    kind: "edge",
                    name: pair[0].name.clone(),
                });
            }
        }

        let n = vertices.len();
        let mut received = vec![Vec::new(); n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            received[e.range.idx()].push(EdgeId(i as u32));
            succ[e.range.idx()].push(e.source.idx());
        }
        let (scc_id, scc_count) = tarjan_scc(&succ);
        let ge = reach_closure(&succ, &scc_id, scc_count);

        Ok(Graph {
            vertices,
            edges,
            received,
            ge,
            scc_id,
            scc_count,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.idx()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices
            .binary_search_by(|v| v.as_str().cmp(name))
            .ok()
            .map(|i| VertexId(i as u32))
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.idx()]
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edges
            .binary_search_by(|e| e.name.as_str().cmp(name))
            .ok()
            .map(|i| EdgeId(i as u32))
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    /// `vE¹`: the edge records with range `v`.
    pub fn received_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.received[v.idx()]
    }

    /// `v ≥ w`: a finite path with range `v` and source `w` exists.
    pub fn vertex_ge(&self, v: VertexId, w: VertexId) -> bool {
        self.ge[v.idx()][w.idx()]
    }

    pub fn scc_id(&self, v: VertexId) -> usize {
        self.scc_id[v.idx()]
    }

    pub fn scc_count(&self) -> usize {
        self.scc_count
    }

    /// `v ∼ w`: mutually reachable.
    pub fn vertex_equiv(&self, v: VertexId, w: VertexId) -> bool {
        self.scc_id[v.idx()] == self.scc_id[w.idx()]
    }

    /// Vertices `v` with `vE¹` empty or infinite (an ω-record present).
    pub fn singular_vertices(&self) -> BTreeSet<VertexId> {
        self.vertex_ids()
            .filter(|&v| {
                let recv = self.received_edges(v);
                recv.is_empty()
                    || recv
                        .iter()
                        .any(|&e| self.edge(e).multiplicity == Multiplicity::Omega)
            })
            .collect()
    }

    /// `0 < |vE¹| < ∞`.
    pub fn is_regular(&self, v: VertexId) -> bool {
        !self.singular_vertices().contains(&v)
    }

    /// Upward closure `{w : w ≥ v for some v ∈ set}`.
    pub fn up_closure(&self, set: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        self.vertex_ids()
            .filter(|&w| set.iter().any(|&v| self.vertex_ge(w, v)))
            .collect()
    }

    /// All paths with range `v` of length exactly `len`, with ω-copy indices
    /// restricted to `0..window`.
    pub fn paths_from(&self, v: VertexId, len: usize, window: u32) -> Vec<Path> {
        let mut out = Vec::new();
        let mut cur = Path::vertex(v);
        self.extend_paths(&mut cur, len, window, &mut out);
        out
    }

    fn extend_paths(&self, cur: &mut Path, remaining: usize, window: u32, out: &mut Vec<Path>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        let at = cur.source(self);
        for &e in self.received_edges(at) {
            let copies = match self.edge(e).multiplicity {
                Multiplicity::One => 1,
                Multiplicity::Omega => window,
            };
            for copy in 0..copies {
                cur.steps.push(PathStep { edge: e, copy });
                self.extend_paths(cur, remaining - 1, window, out);
                cur.steps.pop();
            }
        }
    }

    pub fn format_vertex_set(&self, set: &BTreeSet<VertexId>) -> String {
        let names: Vec<&str> = set.iter().map(|&v| self.vertex_name(v)).collect();
        format!("{{{}}}", names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathStep {
    pub edge: EdgeId,
    /// Copy index within an ω-family; always 0 for ordinary edges.
    pub copy: u32,
}

/// A finite path. `base` is the range vertex; a length-0 path is a vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub base: VertexId,
    pub steps: Vec<PathStep>,
}

impl Path {
    pub fn vertex(v: VertexId) -> Path {
        Path {
            base: v,
            steps: Vec::new(),
        }
    }

    pub fn from_edges(graph: &Graph, edges: &[EdgeId]) -> Path {
        assert!(!edges.is_empty());
        let mut p = Path::vertex(graph.edge(edges[0]).range);
        for &e in edges {
            p = p.extended(graph, PathStep { edge: e, copy: 0 });
        }
        p
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Range vertex `r(path)`.
    pub fn range(&self) -> VertexId {
        self.base
    }

    /// Source vertex `s(path)`.
    pub fn source(&self, graph: &Graph) -> VertexId {
        match self.steps.last() {
            Some(step) => graph.edge(step.edge).source,
            None => self.base,
        }
    }

    /// Appends one step at the source end, checking composability.
    pub fn extended(&self, graph: &Graph, step: PathStep) -> Path {
        debug_assert_eq!(graph.edge(step.edge).range, self.source(graph));
        let mut p = self.clone();
        p.steps.push(step);
        p
    }

    /// The prefix of length `k` (same range).
    pub fn prefix(&self, k: usize) -> Path {
        Path {
            base: self.base,
            steps: self.steps[..k].to_vec(),
        }
    }

    /// Drops the first `k` steps (the shift applied `k` times).
    pub fn shifted(&self, graph: &Graph, k: usize) -> Path {
        assert!(k <= self.len());
        if k == 0 {
            return self.clone();
        }
        Path {
            base: graph.edge(self.steps[k - 1].edge).source,
            steps: self.steps[k..].to_vec(),
        }
    }

    pub fn display<'a>(&'a self, graph: &'a Graph) -> PathDisplay<'a> {
        PathDisplay { path: self, graph }
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    graph: &'a Graph,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            return write!(f, "{}", self.graph.vertex_name(self.path.base));
        }
        let mut first = true;
        for step in &self.path.steps {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let e = self.graph.edge(step.edge);
            match e.multiplicity {
                Multiplicity::One => write!(f, "{}", e.name)?,
                Multiplicity::Omega => write!(f, "{}[{}]", e.name, step.copy)?,
            }
        }
        Ok(())
    }
}

/// Tarjan's algorithm; returns `(component id per vertex, component count)`.
/// Component ids are numbered in reverse topological order of the condensation
/// (a component only reaches components with smaller or equal id).
fn tarjan_scc(succ: &[Vec<usize>]) -> (Vec<usize>, usize) {
    struct State<'a> {
        succ: &'a [Vec<usize>],
        index: usize,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        comp: Vec<usize>,
        ncomp: usize,
    }
    fn connect(v: usize, st: &mut State<'_>) {
        st.idx[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in &st.succ[v] {
            if st.idx[w].is_none() {
                connect(w, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.idx[w].unwrap());
            }
        }
        if st.low[v] == st.idx[v].unwrap() {
            loop {
                let w = st.stack.pop().expect("scc stack underflow");
                st.on_stack[w] = false;
                st.comp[w] = st.ncomp;
                if w == v {
                    break;
                }
            }
            st.ncomp += 1;
        }
    }
    let n = succ.len();
    let mut st = State {
        succ,
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        stack: Vec::new(),
        on_stack: vec![false; n],
        comp: vec![usize::MAX; n],
        ncomp: 0,
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            connect(v, &mut st);
        }
    }
    (st.comp, st.ncomp)
}

/// Reflexive-transitive closure computed on the condensation DAG.
fn reach_closure(succ: &[Vec<usize>], scc_id: &[usize], ncomp: usize) -> Vec<Vec<bool>> {
    let n = succ.len();
    // comp_reach[c][d] = some vertex of c reaches some vertex of d.
    let mut comp_reach = vec![vec![false; ncomp]; ncomp];
    for c in comp_reach.iter_mut().enumerate() {
        c.1[c.0] = true;
    }
    // Tarjan numbers components so edges go from larger to smaller ids;
    // process in increasing order so successors are complete.
    let mut comp_succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncomp];
    for v in 0..n {
        for &w in &succ[v] {
            if scc_id[v] != scc_id[w] {
                comp_succ[scc_id[v]].insert(scc_id[w]);
            }
        }
    }
    for c in 0..ncomp {
        let targets: Vec<usize> = comp_succ[c].iter().copied().collect();
        for d in targets {
            for t in 0..ncomp {
                if comp_reach[d][t] {
                    comp_reach[c][t] = true;
                }
            }
        }
    }
    let mut ge = vec![vec![false; n]; n];
    for v in 0..n {
        for w in 0..n {
            ge[v][w] = comp_reach[scc_id[v]][scc_id[w]];
        }
    }
    ge
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn single_loop_graph() {
        let g = corpus::single_loop();
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.num_edges(), 1);
        assert!(g.singular_vertices().is_empty());
    }

    #[test]
    fn e22_shape() {
        let g = corpus::e22_graph();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 6);
        let v0 = g.vertex_by_name("v0").unwrap();
        let v1 = g.vertex_by_name("v1").unwrap();
        assert!(g.vertex_ge(v0, v0));
        assert!(g.vertex_ge(v0, v1));
        assert!(!g.vertex_ge(v1, v0));
        assert!(g.singular_vertices().is_empty());
    }

    #[test]
    fn dangling_endpoint_rejected() {
        let spec = GraphSpec {
            vertices: vec!["v".into()],
            edges: vec![("e".into(), "v".into(), "w".into(), Multiplicity::One)],
        };
        match Graph::build(&spec) {
            Err(Error::DanglingEndpoint { edge, vertex }) => {
                assert_eq!(edge, "e");
                assert_eq!(vertex, "w");
            }
            other => panic!("expected DanglingEndpoint, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let spec = GraphSpec {
            vertices: vec!["v".into(), "v".into()],
            edges: vec![],
        };
        assert!(matches!(
            Graph::build(&spec),
            Err(Error::DuplicateName { kind: "vertex", .. })
        ));
    }

    #[test]
    fn source_vertex_is_singular() {
        // w receives nothing.
        let spec = GraphSpec {
            vertices: vec!["v".into(), "w".into()],
            edges: vec![("e".into(), "v".into(), "w".into(), Multiplicity::One)],
        };
        let g = Graph::build(&spec).unwrap();
        let w = g.vertex_by_name("w").unwrap();
        let v = g.vertex_by_name("v").unwrap();
        assert_eq!(g.singular_vertices(), BTreeSet::from([w]));
        assert!(g.is_regular(v));
    }

    #[test]
    fn omega_receiver_is_singular() {
        let spec = GraphSpec {
            vertices: vec!["u".into(), "v".into()],
            edges: vec![
                ("f".into(), "v".into(), "u".into(), Multiplicity::Omega),
                ("l".into(), "u".into(), "u".into(), Multiplicity::One),
            ],
        };
        let g = Graph::build(&spec).unwrap();
        let v = g.vertex_by_name("v").unwrap();
        assert_eq!(g.singular_vertices(), BTreeSet::from([v]));
    }

    #[test]
    fn vertex_ge_is_a_preorder_on_random_graphs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..25 {
            let g = corpus::random_graph(&mut rng, 6, 10);
            for v in g.vertex_ids() {
                assert!(g.vertex_ge(v, v));
                for w in g.vertex_ids() {
                    for u in g.vertex_ids() {
                        if g.vertex_ge(v, w) && g.vertex_ge(w, u) {
                            assert!(g.vertex_ge(v, u));
                        }
                    }
                }
            }
            // one-step soundness: every edge witnesses r(e) ≥ s(e)
            for e in g.edge_ids() {
                assert!(g.vertex_ge(g.edge(e).range, g.edge(e).source));
            }
        }
    }

    #[test]
    fn path_enumeration_monotone() {
        let g = corpus::e22_graph();
        let v0 = g.vertex_by_name("v0").unwrap();
        let mut prev = 0;
        for d in 0..5 {
            let count = g.paths_from(v0, d, 3).len();
            assert!(count >= prev);
            prev = count;
        }
        // Monotone in the window as well.
        assert!(g.paths_from(v0, 3, 1).len() <= g.paths_from(v0, 3, 2).len());
    }
}
