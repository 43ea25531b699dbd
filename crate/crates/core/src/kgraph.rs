//! Higher-rank graph support: skeleton validation (factorization bijections
//! and the associativity cube for k ≥ 3), a normal-form path calculus,
//! self-similar actions over k-graphs, maximal G-tails and the lattice of
//! G-invariant hereditary saturated vertex sets.
//!
//! All k-graphs here are finite, row-finite and source-free. Paths are kept
//! in color-sorted normal form; composition and factorization renormalize via
//! the factorization squares, which is well-defined by the unique
//! factorization property once validation passes.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::action::{close_table, ActionSubstrate, ElemId, GeneratorSpec, GroupTable};
use crate::graph::VertexId;
use crate::{Error, Result};

/// Degree vector in Z₊^k.
pub type Degree = Vec<u32>;

pub fn deg_add(a: &Degree, b: &Degree) -> Degree {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn deg_sub(a: &Degree, b: &Degree) -> Degree {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn deg_le(a: &Degree, b: &Degree) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn ones(k: usize) -> Degree {
    vec![1; k]
}

pub fn zeros(k: usize) -> Degree {
    vec![0; k]
}

/// Splits `l ∈ Z^k` into `(l⁺, l⁻)` with `l⁺ ∧ l⁻ = 0`.
pub fn split_signs(l: &[i64]) -> (Degree, Degree) {
    let pos = l.iter().map(|&x| x.max(0) as u32).collect();
    let neg = l.iter().map(|&x| (-x).max(0) as u32).collect();
    (pos, neg)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KEdge {
    pub name: String,
    pub color: usize,
    pub range: VertexId,
    pub source: VertexId,
}

/// Plain description used to build a [`KGraphSkeleton`].
#[derive(Debug, Clone)]
pub struct KGraphSpec {
    pub rank: usize,
    pub vertices: Vec<String>,
    /// `(name, color, range, source)`
    pub edges: Vec<(String, usize, String, String)>,
    /// `((a, b), (c, d))`: the path `a·b` (colors i < j) equals `c·d`
    /// (colors j, i).
    pub factorizations: Vec<((String, String), (String, String))>,
}

/// A validated k-graph skeleton.
#[derive(Debug, Clone)]
pub struct KGraphSkeleton {
    pub rank: usize,
    vertices: Vec<String>,
    edges: Vec<KEdge>,
    /// `swap[(a, b)] = (c, d)` whenever the composable pair `a·b` equals
    /// `c·d` with the two colors exchanged; stored in both directions.
    swap: HashMap<(usize, usize), (usize, usize)>,
    /// `received[color][v]` = color-`color` edges with range `v`.
    received: Vec<Vec<Vec<usize>>>,
    ge: Vec<Vec<bool>>,
}

impl KGraphSkeleton {
    pub fn validate(spec: &KGraphSpec) -> Result<KGraphSkeleton> {
        if spec.rank == 0 {
            return Err(Error::Schema("rank must be at least 1".into()));
        }
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
        let vid = |name: &str| -> Result<VertexId> {
            vertices
                .binary_search_by(|v| v.as_str().cmp(name))
                .map(|i| VertexId(i as u32))
                .map_err(|_| Error::Schema(format!("unknown vertex `{name}`")))
        };
        let mut edges: Vec<KEdge> = Vec::new();
        for (name, color, range, source) in &spec.edges {
            if *color >= spec.rank {
                return Err(Error::Schema(format!(
                    "edge `{name}` has color {color} but rank is {}",
                    spec.rank
                )));
            }
            edges.push(KEdge {
                name: name.clone(),
                color: *color,
                range: vid(range)?,
                source: vid(source)?,
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
        let eid = |name: &str| -> Result<usize> {
            edges
                .binary_search_by(|e| e.name.as_str().cmp(name))
                .map_err(|_| Error::Schema(format!("unknown edge `{name}`")))
        };

        let mut received = vec![vec![Vec::new(); vertices.len()]; spec.rank];
        for (i, e) in edges.iter().enumerate() {
            received[e.color][e.range.idx()].push(i);
        }
        for (v, name) in vertices.iter().enumerate() {
            for color in 0..spec.rank {
                if received[color][v].is_empty() {
                    return Err(Error::SourcePresent {
                        vertex: name.clone(),
                        color,
                    });
                }
            }
        }

        // Factorization bijections per color pair.
        let mut swap: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut seen_left: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut seen_right: BTreeSet<(usize, usize)> = BTreeSet::new();
        for ((a, b), (c, d)) in &spec.factorizations {
            let (a, b, c, d) = (eid(a)?, eid(b)?, eid(c)?, eid(d)?);
            let (ea, eb, ec, ed) = (&edges[a], &edges[b], &edges[c], &edges[d]);
            if ea.color >= eb.color || ec.color != eb.color || ed.color != ea.color {
                return Err(Error::FactorizationNotBijective {
                    detail: format!(
                        "square `{}`·`{}` = `{}`·`{}` has inconsistent colors",
                        ea.name, eb.name, ec.name, ed.name
                    ),
                });
            }
            if ea.source != eb.range
                || ec.source != ed.range
                || ea.range != ec.range
                || eb.source != ed.source
            {
                return Err(Error::FactorizationNotBijective {
                    detail: format!(
                        "square `{}`·`{}` = `{}`·`{}` has mismatched endpoints",
                        ea.name, eb.name, ec.name, ed.name
                    ),
                });
            }
            if !seen_left.insert((a, b)) || !seen_right.insert((c, d)) {
                return Err(Error::FactorizationNotBijective {
                    detail: format!("pair `{}`·`{}` factored twice", ea.name, eb.name),
                });
            }
            swap.insert((a, b), (c, d));
            swap.insert((c, d), (a, b));
        }
        // Totality and surjectivity: every composable bicolored pair appears.
        for (i, ei) in edges.iter().enumerate() {
            for (j, ej) in edges.iter().enumerate() {
                if ei.source != ej.range || ei.color == ej.color {
                    continue;
                }
                if !swap.contains_key(&(i, j)) {
                    return Err(Error::FactorizationNotBijective {
                        detail: format!("composable pair `{}`·`{}` has no square", ei.name, ej.name),
                    });
                }
            }
        }

        let skel = KGraphSkeleton {
            rank: spec.rank,
            vertices,
            edges,
            swap,
            received,
            ge: Vec::new(),
        };
        let skel = {
            let mut s = skel;
            s.ge = s.reachability();
            s
        };

        // Associativity cube for rank ≥ 3.
        if skel.rank >= 3 {
            skel.check_cubes()?;
        }
        Ok(skel)
    }

    fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.vertices.len();
        let mut ge = vec![vec![false; n]; n];
        for v in 0..n {
            // BFS from v along edges (range → source).
            let mut queue = VecDeque::from([v]);
            ge[v][v] = true;
            while let Some(u) = queue.pop_front() {
                for e in &self.edges {
                    if e.range.idx() == u && !ge[v][e.source.idx()] {
                        ge[v][e.source.idx()] = true;
                        queue.push_back(e.source.idx());
                    }
                }
            }
        }
        ge
    }

    fn check_cubes(&self) -> Result<()> {
        for (f, ef) in self.edges.iter().enumerate() {
            for (g, eg) in self.edges.iter().enumerate() {
                if ef.source != eg.range || ef.color >= eg.color {
                    continue;
                }
                for (h, eh) in self.edges.iter().enumerate() {
                    if eg.source != eh.range || eg.color >= eh.color {
                        continue;
                    }
                    // Route A: swap(1,2), swap(2,3), swap(1,2).
                    let (g1, f1) = self.swap[&(f, g)];
                    let (h1, f2) = self.swap[&(f1, h)];
                    let (h2, g2) = self.swap[&(g1, h1)];
                    // Route B: swap(2,3), swap(1,2), swap(2,3).
                    let (h3, g3) = self.swap[&(g, h)];
                    let (h4, f3) = self.swap[&(f, h3)];
                    let (g4, f4) = self.swap[&(f3, g3)];
                    if (h2, g2, f2) != (h4, g4, f4) {
                        return Err(Error::CubeConditionFailed {
                            detail: format!(
                                "(`{}`,`{}`,`{}`)",
                                ef.name, eg.name, eh.name
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
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

    pub fn edge(&self, e: usize) -> &KEdge {
        &self.edges[e]
    }

    pub fn edge_by_name(&self, name: &str) -> Option<usize> {
        self.edges
            .binary_search_by(|e| e.name.as_str().cmp(name))
            .ok()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    /// `vΛ^{e_color}` as edge ids.
    pub fn received_by_color(&self, v: VertexId, color: usize) -> &[usize] {
        &self.received[color][v.idx()]
    }

    /// `v ≥ w`: `vΛw ≠ ∅`.
    pub fn vertex_ge(&self, v: VertexId, w: VertexId) -> bool {
        self.ge[v.idx()][w.idx()]
    }

    pub fn format_vertex_set(&self, set: &BTreeSet<VertexId>) -> String {
        let names: Vec<&str> = set.iter().map(|&v| self.vertex_name(v)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Sorts an edge sequence into color-ascending normal form using the
    /// factorization squares.
    fn normalize(&self, edges: &mut Vec<usize>) {
        loop {
            let mut swapped = false;
            for i in 0..edges.len().saturating_sub(1) {
                let (a, b) = (edges[i], edges[i + 1]);
                if self.edges[a].color > self.edges[b].color {
                    let (c, d) = self.swap[&(a, b)];
                    edges[i] = c;
                    edges[i + 1] = d;
                    swapped = true;
                }
            }
            if !swapped {
                return;
            }
        }
    }
}

/// A finite k-graph path in color-sorted normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KPath {
    pub base: VertexId,
    pub edges: Vec<usize>,
}

impl KPath {
    pub fn vertex(v: VertexId) -> KPath {
        KPath {
            base: v,
            edges: Vec::new(),
        }
    }

    pub fn range(&self) -> VertexId {
        self.base
    }

    pub fn source(&self, skel: &KGraphSkeleton) -> VertexId {
        match self.edges.last() {
            Some(&e) => skel.edge(e).source,
            None => self.base,
        }
    }

    pub fn degree(&self, skel: &KGraphSkeleton) -> Degree {
        let mut d = zeros(skel.rank);
        for &e in &self.edges {
            d[skel.edge(e).color] += 1;
        }
        d
    }

    pub fn compose(&self, skel: &KGraphSkeleton, other: &KPath) -> KPath {
        debug_assert_eq!(self.source(skel), other.range());
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().copied());
        skel.normalize(&mut edges);
        KPath {
            base: self.base,
            edges,
        }
    }

    /// Moves the first color-`c` edge to the front and removes it, returning
    /// the edge and the (still normal-form) remainder.
    fn split_color(&self, skel: &KGraphSkeleton, color: usize) -> (usize, KPath) {
        let pos = self
            .edges
            .iter()
            .position(|&e| skel.edge(e).color == color)
            .expect("color present in path");
        let mut edges = self.edges.clone();
        for i in (1..=pos).rev() {
            // edges[i] has the wanted color; edges[i-1] has a smaller color.
            let (c, d) = skel.swap[&(edges[i - 1], edges[i])];
            edges[i - 1] = c;
            edges[i] = d;
        }
        let head = edges.remove(0);
        (
            head,
            KPath {
                base: skel.edge(head).source,
                edges,
            },
        )
    }

    /// `(λ(0,n), λ(n, d(λ)))`.
    pub fn factor(&self, skel: &KGraphSkeleton, n: &Degree) -> (KPath, KPath) {
        debug_assert!(deg_le(n, &self.degree(skel)));
        let mut head = Vec::new();
        let mut rest = self.clone();
        for (color, &count) in n.iter().enumerate() {
            for _ in 0..count {
                let (e, r) = rest.split_color(skel, color);
                head.push(e);
                rest = r;
            }
        }
        (
            KPath {
                base: self.base,
                edges: head,
            },
            rest,
        )
    }

    /// `λ(a, b)`.
    pub fn segment(&self, skel: &KGraphSkeleton, a: &Degree, b: &Degree) -> KPath {
        let (_, tail) = self.factor(skel, a);
        let (mid, _) = tail.factor(skel, &deg_sub(b, a));
        mid
    }

    pub fn display<'a>(&'a self, skel: &'a KGraphSkeleton) -> String {
        if self.edges.is_empty() {
            return skel.vertex_name(self.base).to_string();
        }
        self.edges
            .iter()
            .map(|&e| skel.edge(e).name.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A self-similar k-graph system: skeleton plus closed automaton group.
#[derive(Debug, Clone)]
pub struct KSystem {
    pub skeleton: KGraphSkeleton,
    pub group: GroupTable,
    pub closure_cap: usize,
    pseudo_free: bool,
    pseudo_free_witness: Option<(ElemId, KPath)>,
}

impl KSystem {
    /// Closes the generators, validating color preservation and compatibility
    /// of the action with every factorization square.
    pub fn close(skel: &KGraphSkeleton, gens: &[GeneratorSpec], cap: usize) -> Result<KSystem> {
        for g in gens {
            for e in 0..skel.num_edges() {
                let img = g.edge_perm.get(e).copied().unwrap_or(u32::MAX) as usize;
                if img >= skel.num_edges() || skel.edge(img).color != skel.edge(e).color {
                    return Err(Error::EquivarianceViolation {
                        generator: g.name.clone(),
                        edge: skel.edge(e).name.clone(),
                    });
                }
            }
        }
        let substrate = ActionSubstrate {
            num_vertices: skel.num_vertices(),
            edge_range: skel.edges.iter().map(|e| e.range.0).collect(),
            edge_source: skel.edges.iter().map(|e| e.source.0).collect(),
        };
        let group = close_table(&substrate, gens, cap)?;

        // The action must commute with every factorization square:
        // g·(a b) computed through (a,b) and through swap(a,b) must agree.
        for g in group.elem_ids() {
            for (&(a, b), &(c, d)) in &skel.swap {
                if skel.edge(a).color > skel.edge(b).color {
                    continue;
                }
                let ga = group.act_edge_raw(g, a);
                let gb = group.act_edge_raw(group.restrict_raw(g, a), b);
                let gc = group.act_edge_raw(g, c);
                let gd = group.act_edge_raw(group.restrict_raw(g, c), d);
                if skel.swap.get(&(ga, gb)) != Some(&(gc, gd)) {
                    return Err(Error::FactorizationEquivarianceViolation {
                        generator: group.name(g),
                        detail: format!(
                            "`{}`·`{}` = `{}`·`{}`",
                            skel.edge(a).name,
                            skel.edge(b).name,
                            skel.edge(c).name,
                            skel.edge(d).name
                        ),
                    });
                }
                // Restrictions along the two factorizations must also agree.
                let r1 = group.restrict_raw(group.restrict_raw(g, a), b);
                let r2 = group.restrict_raw(group.restrict_raw(g, c), d);
                if r1 != r2 {
                    return Err(Error::FactorizationEquivarianceViolation {
                        generator: group.name(g),
                        detail: format!(
                            "restriction differs along `{}`·`{}` and `{}`·`{}`",
                            skel.edge(a).name,
                            skel.edge(b).name,
                            skel.edge(c).name,
                            skel.edge(d).name
                        ),
                    });
                }
            }
        }

        let mut sys = KSystem {
            skeleton: skel.clone(),
            group,
            closure_cap: cap,
            pseudo_free: true,
            pseudo_free_witness: None,
        };
        let witness = sys.pseudo_free_search();
        sys.pseudo_free = witness.is_none();
        sys.pseudo_free_witness = witness;
        Ok(sys)
    }

    pub fn is_pseudo_free(&self) -> bool {
        self.pseudo_free
    }

    pub fn pseudo_free_witness(&self) -> Option<&(ElemId, KPath)> {
        self.pseudo_free_witness.as_ref()
    }

    pub fn require_pseudo_free(&self) -> Result<()> {
        match &self.pseudo_free_witness {
            None => Ok(()),
            Some((g, p)) => Err(Error::NotPseudoFree {
                witness: format!(
                    "{} fixes {} with trivial restriction",
                    self.group.name(*g),
                    p.display(&self.skeleton)
                ),
            }),
        }
    }

    fn pseudo_free_search(&self) -> Option<(ElemId, KPath)> {
        // A witness exists iff a single fixed edge with trivial restriction
        // exists for some g ≠ 1: take the first index at which the running
        // restriction of a longer witness becomes trivial.
        for g in self.group.elem_ids() {
            if g == self.group.identity() {
                continue;
            }
            for e in 0..self.skeleton.num_edges() {
                if self.group.act_edge_raw(g, e) == e
                    && self.group.restrict_raw(g, e) == self.group.identity()
                {
                    return Some((
                        g,
                        KPath {
                            base: self.skeleton.edge(e).range,
                            edges: vec![e],
                        },
                    ));
                }
            }
        }
        None
    }

    pub fn act_on_path(&self, g: ElemId, path: &KPath) -> KPath {
        let mut out = KPath::vertex(self.group.act_vertex(g, path.base));
        let mut h = g;
        for &e in &path.edges {
            out.edges.push(self.group.act_edge_raw(h, e));
            h = self.group.restrict_raw(h, e);
        }
        out
    }

    pub fn restrict_path(&self, g: ElemId, path: &KPath) -> ElemId {
        let mut h = g;
        for &e in &path.edges {
            h = self.group.restrict_raw(h, e);
        }
        h
    }

    /// All paths with range `v` and degree `n`, restricted to vertices in `m`
    /// when given.
    pub fn paths_with_range(
        &self,
        v: VertexId,
        n: &Degree,
        m: Option<&BTreeSet<VertexId>>,
    ) -> Vec<KPath> {
        let mut out = Vec::new();
        if let Some(m) = m {
            if !m.contains(&v) {
                return out;
            }
        }
        let mut cur = KPath::vertex(v);
        self.extend_paths(&mut cur, n, 0, 0, m, &mut out);
        out
    }

    fn extend_paths(
        &self,
        cur: &mut KPath,
        n: &Degree,
        color: usize,
        used: u32,
        m: Option<&BTreeSet<VertexId>>,
        out: &mut Vec<KPath>,
    ) {
        if color == self.skeleton.rank {
            out.push(cur.clone());
            return;
        }
        if used == n[color] {
            self.extend_paths(cur, n, color + 1, 0, m, out);
            return;
        }
        let at = cur.source(&self.skeleton);
        for &e in self.skeleton.received_by_color(at, color) {
            let src = self.skeleton.edge(e).source;
            if let Some(m) = m {
                if !m.contains(&src) {
                    continue;
                }
            }
            cur.edges.push(e);
            self.extend_paths(cur, n, color, used + 1, m, out);
            cur.edges.pop();
        }
    }

    /// All maximal G-tails, by brute-force subset filtering for ≤ 15 vertices
    /// and candidate generation above that.
    pub fn maximal_g_tails(&self) -> Vec<BTreeSet<VertexId>> {
        let nv = self.skeleton.num_vertices();
        if nv <= 15 {
            let mut out = Vec::new();
            for mask in 1u32..(1 << nv) {
                let set: BTreeSet<VertexId> = (0..nv)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| VertexId(i as u32))
                    .collect();
                if self.is_maximal_tail(&set) {
                    out.push(set);
                }
            }
            out.sort();
            return out;
        }
        let mut out: BTreeSet<BTreeSet<VertexId>> = BTreeSet::new();
        for v in self.skeleton.vertex_ids() {
            let seed: BTreeSet<VertexId> = self
                .group
                .vertex_orbit(v)
                .into_iter()
                .collect();
            let mut m: BTreeSet<VertexId> = BTreeSet::new();
            for w in self.skeleton.vertex_ids() {
                if seed.iter().any(|&u| self.skeleton.vertex_ge(w, u)) {
                    m.insert(w);
                }
            }
            if self.is_maximal_tail(&m) {
                out.insert(m);
            }
        }
        out.into_iter().collect()
    }

    /// Conditions (i)–(iii) of the maximal G-tail definition for k-graphs.
    pub fn is_maximal_tail(&self, m: &BTreeSet<VertexId>) -> bool {
        if m.is_empty() || !self.group.is_invariant_vertex_set(m) {
            return false;
        }
        // (i) upward closed
        for w in m {
            for v in self.skeleton.vertex_ids() {
                if self.skeleton.vertex_ge(v, *w) && !m.contains(&v) {
                    return false;
                }
            }
        }
        // (ii) every vertex continues inside m in every color
        for &v in m {
            for color in 0..self.skeleton.rank {
                let ok = self
                    .skeleton
                    .received_by_color(v, color)
                    .iter()
                    .any(|&e| m.contains(&self.skeleton.edge(e).source));
                if !ok {
                    return false;
                }
            }
        }
        // (iii) cofinal directedness with a group twist
        for &v in m {
            for &w in m {
                let ok = m.iter().any(|&u| {
                    self.skeleton.vertex_ge(v, u)
                        && self.group.elem_ids().any(|g| {
                            self.skeleton.vertex_ge(w, self.group.act_vertex(g, u))
                        })
                });
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// All G-invariant hereditary saturated subsets of Λ⁰, ordered by
    /// inclusion (sorted by size, then lexicographically).
    pub fn hereditary_saturated_lattice(&self) -> Vec<BTreeSet<VertexId>> {
        let nv = self.skeleton.num_vertices();
        assert!(nv <= 20, "lattice enumeration is exponential in |Λ⁰|");
        let mut out = Vec::new();
        for mask in 0u32..(1 << nv) {
            let set: BTreeSet<VertexId> = (0..nv)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| VertexId(i as u32))
                .collect();
            if self.is_hereditary_saturated(&set) {
                out.push(set);
            }
        }
        out.sort_by_key(|s| (s.len(), s.iter().copied().collect::<Vec<_>>()));
        out
    }

    pub fn is_hereditary_saturated(&self, h: &BTreeSet<VertexId>) -> bool {
        if !self.group.is_invariant_vertex_set(h) {
            return false;
        }
        // hereditary: v ∈ H and v ≥ w forces w ∈ H
        for &v in h {
            for w in self.skeleton.vertex_ids() {
                if self.skeleton.vertex_ge(v, w) && !h.contains(&w) {
                    return false;
                }
            }
        }
        // saturated: single-color checks suffice for source-free skeletons
        for v in self.skeleton.vertex_ids() {
            if h.contains(&v) {
                continue;
            }
            for color in 0..self.skeleton.rank {
                let all_in = self
                    .skeleton
                    .received_by_color(v, color)
                    .iter()
                    .all(|&e| h.contains(&self.skeleton.edge(e).source));
                if all_in {
                    return false;
                }
            }
        }
        true
    }

    /// The set of vertices admitting an infinite path that avoids `h`
    /// (greatest fixpoint of per-color continuation outside `h`).
    pub fn survives_outside(&self, h: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        let mut alive: BTreeSet<VertexId> = self
            .skeleton
            .vertex_ids()
            .filter(|v| !h.contains(v))
            .collect();
        loop {
            let snapshot: Vec<VertexId> = alive.iter().copied().collect();
            let mut removed = false;
            for v in snapshot {
                for color in 0..self.skeleton.rank {
                    let ok = self
                        .skeleton
                        .received_by_color(v, color)
                        .iter()
                        .any(|&e| alive.contains(&self.skeleton.edge(e).source));
                    if !ok {
                        alive.remove(&v);
                        removed = true;
                        break;
                    }
                }
            }
            if !removed {
                return alive;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn torus_is_valid() {
        let t = corpus::torus_2graph();
        assert_eq!(t.rank, 2);
        assert_eq!(t.num_vertices(), 1);
    }

    #[test]
    fn cycle_product_is_valid() {
        let g = corpus::cycle_product_2graph(2, 3);
        assert_eq!(g.num_vertices(), 6);
        assert_eq!(g.num_edges(), 12);
    }

    #[test]
    fn missing_square_rejected() {
        let spec = KGraphSpec {
            rank: 2,
            vertices: vec!["v".into()],
            edges: vec![
                ("b".into(), 0, "v".into(), "v".into()),
                ("r".into(), 1, "v".into(), "v".into()),
            ],
            factorizations: vec![],
        };
        assert!(matches!(
            KGraphSkeleton::validate(&spec),
            Err(Error::FactorizationNotBijective { .. })
        ));
    }

    #[test]
    fn source_rejected() {
        let spec = KGraphSpec {
            rank: 2,
            vertices: vec!["v".into()],
            edges: vec![("b".into(), 0, "v".into(), "v".into())],
            factorizations: vec![],
        };
        assert!(matches!(
            KGraphSkeleton::validate(&spec),
            Err(Error::SourcePresent { .. })
        ));
    }

    #[test]
    fn rank1_degenerates_to_graph() {
        let skel = KGraphSkeleton::validate(&corpus::as_1graph(&corpus::two_loops_graph())).unwrap();
        assert_eq!(skel.rank, 1);
        assert_eq!(skel.num_edges(), 2);
    }

    #[test]
    fn path_factorization_roundtrip() {
        let sys = corpus::cycle_product_system(2, 3);
        let skel = &sys.skeleton;
        let v = skel.vertex_by_name("v0_0").unwrap();
        for p in sys.paths_with_range(v, &vec![2, 1], None) {
            assert_eq!(p.degree(skel), vec![2, 1]);
            let (head, tail) = p.factor(skel, &vec![1, 1]);
            assert_eq!(head.degree(skel), vec![1, 1]);
            assert_eq!(tail.degree(skel), vec![1, 0]);
            assert_eq!(head.source(skel), tail.range());
            assert_eq!(head.compose(skel, &tail), p);
        }
    }

    #[test]
    fn trivial_group_closure_over_kgraph() {
        let sys = corpus::torus_system();
        assert_eq!(sys.group.size(), 1);
        assert!(sys.is_pseudo_free());
    }

    #[test]
    fn swap_action_closes_to_z2() {
        let sys = corpus::kgraph_swap_system();
        assert_eq!(sys.group.size(), 2);
        assert!(sys.is_pseudo_free());
    }

    #[test]
    fn theta_breaking_generator_rejected() {
        // Swap only one of the two blue loops' squares: b1↔b2 but keep the
        // red restriction map inconsistent by permuting squares away.
        let spec = KGraphSpec {
            rank: 2,
            vertices: vec!["v".into()],
            edges: vec![
                ("b1".into(), 0, "v".into(), "v".into()),
                ("b2".into(), 0, "v".into(), "v".into()),
                ("r".into(), 1, "v".into(), "v".into()),
            ],
            factorizations: vec![
                (("b1".into(), "r".into()), ("r".into(), "b2".into())),
                (("b2".into(), "r".into()), ("r".into(), "b1".into())),
            ],
        };
        let skel = KGraphSkeleton::validate(&spec).unwrap();
        let b1 = skel.edge_by_name("b1").unwrap();
        let b2 = skel.edge_by_name("b2").unwrap();
        let mut eperm: Vec<u32> = (0..3).collect();
        eperm.swap(b1, b2);
        // Swapping b1,b2 sends the square (b1,r)→(r,b2) to (b2,r)→(r,b2),
        // which does not match the skeleton's (b2,r)→(r,b1).
        let gens = vec![GeneratorSpec {
            name: "s".into(),
            vertex_perm: vec![0],
            edge_perm: eperm,
            restrictions: vec![vec![], vec![], vec![]],
        }];
        assert!(matches!(
            KSystem::close(&skel, &gens, 100),
            Err(Error::FactorizationEquivarianceViolation { .. })
        ));
    }

    #[test]
    fn torus_tail_is_single_vertex() {
        let sys = corpus::torus_system();
        let tails = sys.maximal_g_tails();
        assert_eq!(tails.len(), 1);
        assert_eq!(tails[0].len(), 1);
    }

    #[test]
    fn layered_has_two_tails_and_chain_lattice() {
        let sys = corpus::layered_system();
        let tails = sys.maximal_g_tails();
        assert_eq!(tails.len(), 2);
        let lattice = sys.hereditary_saturated_lattice();
        assert_eq!(lattice.len(), 3);
        assert!(lattice[0].is_empty());
        assert_eq!(lattice[2].len(), 2);
    }

    #[test]
    fn torus_lattice_is_two_elements() {
        let sys = corpus::torus_system();
        let lattice = sys.hereditary_saturated_lattice();
        assert_eq!(lattice.len(), 2);
    }

    #[test]
    fn omega_h_roundtrip() {
        for sys in [corpus::layered_system(), corpus::cycle_product_system(2, 2)] {
            for h in sys.hereditary_saturated_lattice() {
                // every vertex outside H must start an infinite path avoiding H
                let alive = sys.survives_outside(&h);
                let outside: BTreeSet<VertexId> = sys
                    .skeleton
                    .vertex_ids()
                    .filter(|v| !h.contains(v))
                    .collect();
                assert_eq!(alive, outside);
            }
        }
    }

    #[test]
    fn cube_condition_violation_detected() {
        // Two parallel loops per color; the ab- and bc-squares twist in an
        // incompatible way, so the hexagon routes for (a1,b1,c1) disagree.
        let f = |a: &str, b: &str, c: &str, d: &str| {
            (
                (a.to_string(), b.to_string()),
                (c.to_string(), d.to_string()),
            )
        };
        let spec = KGraphSpec {
            rank: 3,
            vertices: vec!["v".into()],
            edges: vec![
                ("a1".into(), 0, "v".into(), "v".into()),
                ("a2".into(), 0, "v".into(), "v".into()),
                ("b1".into(), 1, "v".into(), "v".into()),
                ("b2".into(), 1, "v".into(), "v".into()),
                ("c1".into(), 2, "v".into(), "v".into()),
                ("c2".into(), 2, "v".into(), "v".into()),
            ],
            factorizations: vec![
                f("a1", "b1", "b1", "a2"),
                f("a2", "b1", "b1", "a1"),
                f("a1", "b2", "b2", "a1"),
                f("a2", "b2", "b2", "a2"),
                f("a1", "c1", "c1", "a1"),
                f("a2", "c1", "c1", "a2"),
                f("a1", "c2", "c2", "a1"),
                f("a2", "c2", "c2", "a2"),
                f("b1", "c1", "c1", "b2"),
                f("b2", "c1", "c1", "b1"),
                f("b1", "c2", "c2", "b1"),
                f("b2", "c2", "c2", "b2"),
            ],
        };
        assert!(matches!(
            KGraphSkeleton::validate(&spec),
            Err(Error::CubeConditionFailed { .. })
        ));
    }

    #[test]
    fn cube_condition_on_3_torus() {
        let spec = KGraphSpec {
            rank: 3,
            vertices: vec!["v".into()],
            edges: vec![
                ("a".into(), 0, "v".into(), "v".into()),
                ("b".into(), 1, "v".into(), "v".into()),
                ("c".into(), 2, "v".into(), "v".into()),
            ],
            factorizations: vec![
                (("a".into(), "b".into()), ("b".into(), "a".into())),
                (("a".into(), "c".into()), ("c".into(), "a".into())),
                (("b".into(), "c".into()), ("c".into(), "b".into())),
            ],
        };
        assert!(KGraphSkeleton::validate(&spec).is_ok());
    }
}
