//! Independent brute-force reference implementations over truncated path
//! spaces. Everything here is deliberately naive and written directly from
//! the definitions; the main modules are validated against these on small
//! instances.

use std::collections::BTreeSet;

use crate::action::{ElemId, SelfSimilarSystem};
use crate::graph::{Graph, Multiplicity, Path, PathStep, VertexId};
use crate::kgraph::{deg_le, KPath, KSystem};
use crate::spectrum::{OrbitRep, QuasiOrbitSpace};

/// Finite-depth surrogate of the boundary-path space: all path prefixes up to
/// `depth` with ω-copy indices below `window`, each marked when it is itself
/// a boundary path (a finite path with singular source).
#[derive(Debug, Clone)]
pub struct TruncatedPathSpace {
    pub depth: usize,
    pub window: u32,
    /// `(prefix, complete)`: `complete` marks a singular endpoint.
    pub prefixes: Vec<(Path, bool)>,
}

pub fn truncated_path_space(graph: &Graph, depth: usize, window: u32) -> TruncatedPathSpace {
    let singular = graph.singular_vertices();
    let mut prefixes = Vec::new();
    for v in graph.vertex_ids() {
        for len in 0..=depth {
            for p in graph.paths_from(v, len, window) {
                let complete = singular.contains(&p.source(graph));
                prefixes.push((p, complete));
            }
        }
    }
    TruncatedPathSpace {
        depth,
        window,
        prefixes,
    }
}

/// Literal subset filter on conditions (i)–(iii) of the maximal G-tail
/// definition; guarded to 15 vertices.
pub fn maximal_tails_bruteforce(sys: &SelfSimilarSystem) -> Vec<BTreeSet<VertexId>> {
    let nv = sys.graph.num_vertices();
    assert!(nv <= 15, "brute force guarded to 15 vertices");
    let vertices: Vec<VertexId> = sys.graph.vertex_ids().collect();
    let mut out = Vec::new();
    'subsets: for mask in 1u32..(1 << nv) {
        let m: BTreeSet<VertexId> = vertices
            .iter()
            .copied()
            .filter(|v| mask & (1 << v.idx()) != 0)
            .collect();
        // G-invariance
        for &v in &m {
            for g in sys.group.elem_ids() {
                if !m.contains(&sys.group.act_vertex(g, v)) {
                    continue 'subsets;
                }
            }
        }
        // (i) if v ≥ w for some w ∈ M then v ∈ M
        for v in sys.graph.vertex_ids() {
            if m.contains(&v) {
                continue;
            }
            for &w in &m {
                if sys.graph.vertex_ge(v, w) {
                    continue 'subsets;
                }
            }
        }
        // (ii) regular vertices continue inside M
        for &v in &m {
            if sys.graph.is_regular(v) {
                let any = sys
                    .graph
                    .received_edges(v)
                    .iter()
                    .any(|&e| m.contains(&sys.graph.edge(e).source));
                if !any {
                    continue 'subsets;
                }
            }
        }
        // (iii) for all v,w ∈ M there are g and u ∈ M with v ≥ u, w ≥ g·u
        for &v in &m {
            for &w in &m {
                let mut found = false;
                'search: for &u in &m {
                    if !sys.graph.vertex_ge(v, u) {
                        continue;
                    }
                    for g in sys.group.elem_ids() {
                        if sys.graph.vertex_ge(w, sys.group.act_vertex(g, u)) {
                            found = true;
                            break 'search;
                        }
                    }
                }
                if !found {
                    continue 'subsets;
                }
            }
        }
        out.push(m);
    }
    out.sort();
    out
}

/// Brute-force pseudo-freeness: searches all paths of length ≤ depth that are
/// fixed stepwise by some g ≠ 1 and whose full restriction is trivial.
pub fn pseudo_free_bruteforce(
    sys: &SelfSimilarSystem,
    depth: usize,
) -> Option<(ElemId, Path)> {
    fn dfs(sys: &SelfSimilarSystem, h: ElemId, path: &mut Path, depth: usize) -> Option<Path> {
        if !path.is_empty() && h == sys.group.identity() {
            return Some(path.clone());
        }
        if path.len() == depth {
            return None;
        }
        let at = path.source(&sys.graph);
        for &e in sys.graph.received_edges(at) {
            if sys.group.act_edge_raw(h, e.idx()) != e.idx() {
                continue;
            }
            path.steps.push(PathStep { edge: e, copy: 0 });
            let h2 = sys.group.restrict_raw(h, e.idx());
            if let Some(found) = dfs(sys, h2, path, depth) {
                return Some(found);
            }
            path.steps.pop();
        }
        None
    }
    for g in sys.group.elem_ids() {
        if g == sys.group.identity() {
            continue;
        }
        for v in sys.graph.vertex_ids() {
            let mut path = Path::vertex(v);
            if let Some(found) = dfs(sys, g, &mut path, depth) {
                return Some((g, found));
            }
        }
    }
    None
}

/// Expansion of an orbit representative to a concrete edge sequence of the
/// requested length, following the inductive rule γ⁽ⁿ⁺¹⁾ = gₙ·γ⁽ⁿ⁾,
/// gₙ₊₁ = gₙ|_{γ⁽ⁿ⁾}.
fn expand_rep(sys: &SelfSimilarSystem, rep: &OrbitRep, len: usize) -> (VertexId, Vec<PathStep>) {
    match rep {
        OrbitRep::Vertex(v) => (*v, Vec::new()),
        OrbitRep::Periodic { twist, circuit } => {
            let mut steps = Vec::new();
            let mut gamma = circuit.clone();
            let mut g = *twist;
            while steps.len() < len {
                steps.extend(gamma.steps.iter().copied());
                let next_gamma = sys.act_on_path(g, &gamma);
                let next_g = sys.restrict_path(g, &gamma);
                gamma = next_gamma;
                g = next_g;
            }
            steps.truncate(len);
            (circuit.range(), steps)
        }
    }
}

/// Decides whether the cylinder of `y` meets the depth-bounded saturation of
/// the orbit of `x` under shifts, inverse shifts (path prolongation) and the
/// G-action.
pub fn orbit_closure_member(
    sys: &SelfSimilarSystem,
    y: &OrbitRep,
    x: &OrbitRep,
    depth: usize,
    window: u32,
) -> bool {
    let _ = window;
    let (x_base, x_steps) = expand_rep(sys, x, 2 * depth);
    let shift_range = |n: usize| -> Option<VertexId> {
        if n == 0 {
            return Some(x_base);
        }
        if matches!(x, OrbitRep::Vertex(_)) {
            return None;
        }
        x_steps.get(n - 1).map(|s| sys.graph.edge(s.edge).source)
    };
    let max_shift = match x {
        OrbitRep::Vertex(_) => 0,
        OrbitRep::Periodic { .. } => depth,
    };

    // A prefix p extends into the orbit of x iff either some shifted, twisted
    // copy of x matches the tail of p directly, or p can be prolonged to a
    // vertex of the orbit.
    let prefix_meets_orbit = |p: &Path| -> bool {
        for n in 0..=max_shift {
            let Some(rx) = shift_range(n) else { break };
            for g in sys.group.elem_ids() {
                // element μ(g·σⁿx) with |μ| ≥ |p|
                if sys.graph.vertex_ge(p.source(&sys.graph), sys.group.act_vertex(g, rx)) {
                    return true;
                }
                // element μ(g·σⁿx) with |μ| = j < |p|: match the tail of p
                // against g·σⁿx edge by edge.
                for j in 0..p.len() {
                    let anchor = if j == 0 {
                        p.base
                    } else {
                        sys.graph.edge(p.steps[j - 1].edge).source
                    };
                    if anchor != sys.group.act_vertex(g, rx) {
                        continue;
                    }
                    let mut h = g;
                    let mut matched = true;
                    for (offset, step) in p.steps[j..].iter().enumerate() {
                        let Some(xs) = x_steps.get(n + offset) else {
                            matched = false;
                            break;
                        };
                        let image = PathStep {
                            edge: crate::graph::EdgeId(
                                sys.group.act_edge_raw(h, xs.edge.idx()) as u32
                            ),
                            copy: xs.copy,
                        };
                        if image != *step {
                            matched = false;
                            break;
                        }
                        h = sys.group.restrict_raw(h, xs.edge.idx());
                    }
                    if matched {
                        return true;
                    }
                }
            }
        }
        false
    };

    match y {
        OrbitRep::Vertex(v) => {
            // Exact orbit membership, or escape along an ω-family whose
            // source prolongs into the orbit.
            if let OrbitRep::Vertex(u) = x {
                if sys.group.elem_ids().any(|g| sys.group.act_vertex(g, *u) == *v) {
                    return true;
                }
            }
            sys.graph.received_edges(*v).iter().any(|&e| {
                sys.graph.edge(e).multiplicity == Multiplicity::Omega && {
                    let src = sys.graph.edge(e).source;
                    (0..=max_shift).any(|n| {
                        shift_range(n).is_some_and(|rx| {
                            sys.group
                                .elem_ids()
                                .any(|g| sys.graph.vertex_ge(src, sys.group.act_vertex(g, rx)))
                        })
                    })
                }
            })
        }
        OrbitRep::Periodic { .. } => {
            let (y_base, y_steps) = expand_rep(sys, y, depth);
            (0..=depth).all(|k| {
                let p = Path {
                    base: y_base,
                    steps: y_steps[..k.min(y_steps.len())].to_vec(),
                };
                prefix_meets_orbit(&p)
            })
        }
    }
}

/// Specialization matrix recomputed through orbit closures of the point
/// representatives.
pub fn oracle_quasi_order(
    sys: &SelfSimilarSystem,
    space: &QuasiOrbitSpace,
    depth: usize,
    window: u32,
) -> Vec<Vec<bool>> {
    let n = space.points.len();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            leq[i][j] = if i == j {
                true
            } else {
                orbit_closure_member(sys, &space.points[i].rep, &space.points[j].rep, depth, window)
            };
        }
    }
    leq
}

/// Tests `μ(g·λ) = νλ` as prefix equality for every λ up to degree
/// `depth·(1,…,1)`, restricted to the tail subgraph when `m` is given.
pub fn cycline_bruteforce(
    sys: &KSystem,
    mu: &KPath,
    g: ElemId,
    nu: &KPath,
    m: Option<&BTreeSet<VertexId>>,
    depth: u32,
) -> bool {
    let skel = &sys.skeleton;
    if mu.range() != nu.range()
        || sys.group.act_vertex(g, nu.source(skel)) != mu.source(skel)
    {
        return false;
    }
    let full = vec![depth; skel.rank];
    for lambda in sys.paths_with_range(nu.source(skel), &full, m) {
        let a = mu.compose(skel, &sys.act_on_path(g, &lambda));
        let b = nu.compose(skel, &lambda);
        let da = a.degree(skel);
        let db = b.degree(skel);
        let common: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| x.min(y)).collect();
        debug_assert!(deg_le(&common, &da) && deg_le(&common, &db));
        let za = vec![0; skel.rank];
        if a.segment(skel, &za, &common) != b.segment(skel, &za, &common) {
            return false;
        }
    }
    true
}
