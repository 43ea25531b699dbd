//! Periodicity analysis of self-similar k-graphs: cycline-triple fixpoints,
//! box-certified periodicity lattices Per_G(ΛM), Σ-monoid membership, the
//! M_PerG vertex sets, spectrum components for higher-rank systems, and a
//! bounded checker for convergence certificates in the spectrum topology.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::action::ElemId;
use crate::kgraph::{deg_add, deg_le, deg_sub, ones, split_signs, zeros, Degree, KPath, KSystem};
use crate::lattice::IntegerLattice;
use crate::{Error, Result};

/// A candidate cycline triple `(α, h, β)` with `r(α) = r(β)` and
/// `s(α) = h·s(β)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclineState {
    pub alpha: KPath,
    pub elem: ElemId,
    pub beta: KPath,
}

/// Result of the box-bounded periodicity search.
#[derive(Debug, Clone)]
pub struct PerCertificate {
    pub box_bound: u32,
    /// All lattice points found inside the box (including 0).
    pub found: BTreeSet<Vec<i64>>,
}

/// One spectrum component of a higher-rank system: a maximal G-tail together
/// with the periodicity lattice whose character group parameterizes it.
#[derive(Debug, Clone)]
pub struct KSpectrumComponent {
    pub tail: BTreeSet<crate::graph::VertexId>,
    pub per: IntegerLattice,
    pub certificate: PerCertificate,
}

#[derive(Debug, Clone)]
pub struct KSpectrum {
    pub components: Vec<KSpectrumComponent>,
    /// `leq[i][j]`: component `i` lies in the closure of component `j`
    /// (tails ordered by inclusion).
    pub leq: Vec<Vec<bool>>,
}

/// Exact rational used for characters of Per ⊆ Z^k: the character sends
/// `l ↦ exp(2πi·⟨t, l⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i64,
    den: i64,
}

impl Rat {
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        let sign = den.signum();
        let (num, den) = (num * sign, den * sign);
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        Rat {
            num: num / g,
            den: den / g,
        }
    }

    pub fn zero() -> Rat {
        Rat { num: 0, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn add(self, other: Rat) -> Rat {
        Rat::new(self.num * other.den + other.num * self.den, self.den * other.den)
    }

    pub fn sub(self, other: Rat) -> Rat {
        Rat::new(self.num * other.den - other.num * self.den, self.den * other.den)
    }

    pub fn mul_int(self, k: i64) -> Rat {
        Rat::new(self.num * k, self.den)
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    /// Distance to the nearest integer, as a fraction of one turn.
    pub fn circle_distance(self) -> f64 {
        let f = (self.num.rem_euclid(self.den)) as f64 / self.den as f64;
        f.min(1.0 - f)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn dot(t: &[Rat], l: &[i64]) -> Rat {
    t.iter()
        .zip(l)
        .fold(Rat::zero(), |acc, (r, &x)| acc.add(r.mul_int(x)))
}

/// Convergence query against the higher-rank spectrum topology. The sequence
/// is finite with the final entry repeating forever.
#[derive(Debug, Clone)]
pub struct ConvergenceQuery {
    pub target_tail: BTreeSet<crate::graph::VertexId>,
    pub target_char: Vec<Rat>,
    pub sequence: Vec<(BTreeSet<crate::graph::VertexId>, Vec<Rat>)>,
    /// λ ranges over paths of degree ≤ path_len·(1,…,1).
    pub path_len: u32,
    /// F ranges over the periodicity elements with coordinates in
    /// `[-char_box, char_box]`.
    pub char_box: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvergenceOutcome {
    Verified,
    Refuted {
        epsilon: f64,
        l: Vec<i64>,
        lambda: String,
    },
    Inconclusive {
        reason: String,
    },
}

impl KSystem {
    /// Degree-(1,…,1) continuation blocks inside `m`, per source vertex.
    fn unit_blocks(&self, m: &BTreeSet<crate::graph::VertexId>) -> BTreeMap<crate::graph::VertexId, Vec<KPath>> {
        let unit = ones(self.skeleton.rank);
        m.iter()
            .map(|&v| (v, self.paths_with_range(v, &unit, Some(m))))
            .collect()
    }

    /// Greatest fixpoint of cycline candidates of degrees `(p, q)` over the
    /// tail subgraph ΛM. A state `(α, h, β)` survives iff for every
    /// degree-(1,…,1) block λ from `s(β)`, the unit prefixes of `α(h·λ)` and
    /// `βλ` coincide and the stripped successor survives.
    pub fn cycline_survivors(
        &self,
        m: &BTreeSet<crate::graph::VertexId>,
        p: &Degree,
        q: &Degree,
    ) -> HashSet<CyclineState> {
        let skel = &self.skeleton;
        let unit = ones(skel.rank);
        let blocks = self.unit_blocks(m);
        let mut alive: HashSet<CyclineState> = HashSet::new();
        for &v in m {
            for alpha in self.paths_with_range(v, p, Some(m)) {
                for beta in self.paths_with_range(v, q, Some(m)) {
                    for h in self.group.elem_ids() {
                        if self.group.act_vertex(h, beta.source(skel)) == alpha.source(skel) {
                            alive.insert(CyclineState {
                                alpha: alpha.clone(),
                                elem: h,
                                beta: beta.clone(),
                            });
                        }
                    }
                }
            }
        }
        loop {
            let mut removed = false;
            let snapshot: Vec<CyclineState> = alive.iter().cloned().collect();
            for st in snapshot {
                let survive = blocks[&st.beta.source(skel)].iter().all(|lambda| {
                    let h_lambda = self.act_on_path(st.elem, lambda);
                    let a_ext = st.alpha.compose(skel, &h_lambda);
                    let b_ext = st.beta.compose(skel, lambda);
                    if a_ext.segment(skel, &zeros(skel.rank), &unit)
                        != b_ext.segment(skel, &zeros(skel.rank), &unit)
                    {
                        return false;
                    }
                    let succ = CyclineState {
                        alpha: a_ext.segment(skel, &unit, &deg_add(&unit, p)),
                        elem: self.restrict_path(st.elem, lambda),
                        beta: b_ext.segment(skel, &unit, &deg_add(&unit, q)),
                    };
                    alive.contains(&succ)
                });
                if !survive {
                    alive.remove(&st);
                    removed = true;
                }
            }
            if !removed {
                return alive;
            }
        }
    }

    /// Surviving states for `l ∈ Z^k` under the normalization `l⁺ ∧ l⁻ = 0`.
    pub fn cycline_fixpoint(
        &self,
        l: &[i64],
        m: &BTreeSet<crate::graph::VertexId>,
    ) -> HashSet<CyclineState> {
        let (p, q) = split_signs(l);
        self.cycline_survivors(m, &p, &q)
    }

    /// Box-bounded periodicity group of ΛM: the subgroup of Z^k generated by
    /// the degree differences of surviving cycline states with coordinates
    /// bounded by `box_bound`. Asserts group closure of the found set inside
    /// the box.
    pub fn periodicity_group(
        &self,
        m: &BTreeSet<crate::graph::VertexId>,
        box_bound: u32,
    ) -> (IntegerLattice, PerCertificate) {
        let k = self.skeleton.rank;
        let mut found: BTreeSet<Vec<i64>> = BTreeSet::new();
        found.insert(vec![0; k]);
        for l in box_vectors(k, box_bound as i64) {
            if l.iter().all(|&x| x == 0) {
                continue;
            }
            if !self.cycline_fixpoint(&l, m).is_empty() {
                found.insert(l);
            }
        }
        // Group closure inside the box: negation and addition.
        let b = box_bound as i64;
        for l in &found {
            let neg: Vec<i64> = l.iter().map(|&x| -x).collect();
            assert!(found.contains(&neg), "periodicity set not symmetric");
            for l2 in &found {
                let sum: Vec<i64> = l.iter().zip(l2).map(|(&x, &y)| x + y).collect();
                if sum.iter().all(|&x| x.abs() <= b) {
                    assert!(found.contains(&sum), "periodicity set not additively closed");
                }
            }
        }
        let gens: Vec<Vec<i64>> = found.iter().cloned().collect();
        (
            IntegerLattice::from_generators(k, &gens),
            PerCertificate {
                box_bound,
                found,
            },
        )
    }

    /// Σ_v-membership: every `μ ∈ vΛ^pM` completes to a cycline triple
    /// `(μ, g, ν)` with `d(ν) = q`.
    pub fn sigma_membership(
        &self,
        m: &BTreeSet<crate::graph::VertexId>,
        v: crate::graph::VertexId,
        p: &Degree,
        q: &Degree,
    ) -> bool {
        let survivors = self.cycline_survivors(m, p, q);
        let alphas: HashSet<&KPath> = survivors.iter().map(|s| &s.alpha).collect();
        self.paths_with_range(v, p, Some(m))
            .iter()
            .all(|mu| alphas.contains(mu))
    }

    /// `M_PerG`: vertices whose Σ-set contains all generator pairs of the
    /// box-certified periodicity group plus all diagonal shifts within the
    /// box. The result is G-invariant, hereditary and nonempty.
    pub fn m_perg(
        &self,
        m: &BTreeSet<crate::graph::VertexId>,
        box_bound: u32,
    ) -> BTreeSet<crate::graph::VertexId> {
        let (per, _) = self.periodicity_group(m, box_bound);
        let k = self.skeleton.rank;
        let shifts: Vec<Degree> = nonneg_box_vectors(k, box_bound);
        let mut pairs: BTreeSet<(Degree, Degree)> = BTreeSet::new();
        for l in per.basis() {
            let (lp, lm) = split_signs(l);
            for n in &shifts {
                pairs.insert((deg_add(&lp, n), deg_add(&lm, n)));
            }
        }
        let mut survivor_cache: HashMap<(Degree, Degree), HashSet<KPath>> = HashMap::new();
        let out: BTreeSet<crate::graph::VertexId> = m
            .iter()
            .copied()
            .filter(|&v| {
                pairs.iter().all(|(p, q)| {
                    let alphas = survivor_cache.entry((p.clone(), q.clone())).or_insert_with(|| {
                        self.cycline_survivors(m, p, q)
                            .into_iter()
                            .map(|s| s.alpha)
                            .collect()
                    });
                    self.paths_with_range(v, p, Some(m))
                        .iter()
                        .all(|mu| alphas.contains(mu))
                })
            })
            .collect();
        debug_assert!(!out.is_empty(), "M_PerG must be nonempty");
        debug_assert!(self.group.is_invariant_vertex_set(&out));
        out
    }

    /// Pairs `(g ≠ 1, v)` with `g` acting trivially on `vΛM` (the l = 0
    /// cycline fixpoint).
    pub fn trivially_acting_on_tail(
        &self,
        m: &BTreeSet<crate::graph::VertexId>,
    ) -> Vec<(ElemId, crate::graph::VertexId)> {
        let z = zeros(self.skeleton.rank);
        self.cycline_survivors(m, &z, &z)
            .into_iter()
            .filter(|s| s.elem != self.group.identity())
            .map(|s| (s.elem, s.alpha.range()))
            .collect()
    }

    /// Spectrum components of a pseudo-free higher-rank system satisfying the
    /// central-isotropy condition: one per maximal G-tail, carrying the
    /// box-certified periodicity lattice, with the tail-inclusion preorder.
    pub fn spectrum_components(&self, box_bound: u32) -> Result<KSpectrum> {
        self.require_pseudo_free()?;
        let tails = self.maximal_g_tails();
        for m in &tails {
            if let Some((g, v)) = self.trivially_acting_on_tail(m).first() {
                return Err(Error::EssentialCentralityViolated {
                    witness: format!(
                        "({}, {}) acts trivially on {}ΛM for M={}",
                        self.group.name(*g),
                        self.skeleton.vertex_name(*v),
                        self.skeleton.vertex_name(*v),
                        self.skeleton.format_vertex_set(m)
                    ),
                });
            }
        }
        let components: Vec<KSpectrumComponent> = tails
            .iter()
            .map(|m| {
                let (per, certificate) = self.periodicity_group(m, box_bound);
                KSpectrumComponent {
                    tail: m.clone(),
                    per,
                    certificate,
                }
            })
            .collect();
        let n = components.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = components[i].tail.is_subset(&components[j].tail);
            }
        }
        Ok(KSpectrum { components, leq })
    }

    /// The unique `g` completing `μ = λ(0, p)` to a cycline triple with
    /// `d(ν) = q` in ΛM, available for `r(μ) ∈ M_PerG`.
    fn cycline_completion(
        &self,
        survivors: &HashSet<CyclineState>,
        mu: &KPath,
    ) -> Option<(ElemId, KPath)> {
        let mut hits = survivors
            .iter()
            .filter(|s| &s.alpha == mu)
            .map(|s| (s.elem, s.beta.clone()));
        let first = hits.next()?;
        debug_assert!(
            hits.all(|(g, _)| g == first.0),
            "cycline completion element must be unique"
        );
        Some(first)
    }

    /// Bounded checker for spectrum convergence. The sequence is taken as
    /// eventually constant at its final entry; the criterion is evaluated for
    /// that entry with `F` the periodicity elements inside the character box
    /// and `λ` up to the path bound. `Verified` needs the bounds to exhaust
    /// the finite data; a definite counterexample yields `Refuted`; anything
    /// else is `Inconclusive`.
    pub fn convergence_certificate(&self, query: &ConvergenceQuery) -> Result<ConvergenceOutcome> {
        let k = self.skeleton.rank;
        if query.sequence.is_empty() {
            return Err(Error::MalformedSequence("empty sequence".into()));
        }
        if query.target_char.len() != k
            || query.sequence.iter().any(|(_, c)| c.len() != k)
        {
            return Err(Error::MalformedSequence(format!(
                "characters must be rational vectors of length {k}"
            )));
        }
        if !self.is_maximal_tail(&query.target_tail) {
            return Err(Error::MalformedSequence(
                "target tail is not a maximal G-tail".into(),
            ));
        }
        for (m, _) in &query.sequence {
            if !self.is_maximal_tail(m) {
                return Err(Error::MalformedSequence(
                    "sequence tail is not a maximal G-tail".into(),
                ));
            }
        }

        let m = &query.target_tail;
        let (m_n, chi_n) = query.sequence.last().unwrap();
        let (_, cert) = self.periodicity_group(m, query.char_box);
        let f_max: Vec<Vec<i64>> = cert
            .found
            .iter()
            .filter(|l| l.iter().any(|&x| x != 0))
            .cloned()
            .collect();

        // Fast path: the constant tail equals the target and the characters
        // agree on every periodicity element in the box.
        if m_n == m
            && f_max
                .iter()
                .all(|l| dot(&sub_chars(&query.target_char, chi_n), l).is_integer())
        {
            return Ok(ConvergenceOutcome::Verified);
        }

        let (_, cert_n) = self.periodicity_group(m_n, query.char_box);
        let per_n: BTreeSet<Vec<i64>> = cert_n.found.clone();

        // Fixed base vertex in M_PerG.
        let mperg = self.m_perg(m, query.char_box);
        let v0 = *mperg.iter().next().expect("M_PerG nonempty");
        let mperg_n = self.m_perg(m_n, query.char_box);

        // Precompute survivors and completions per l.
        let mut survivors_m: HashMap<Vec<i64>, HashSet<CyclineState>> = HashMap::new();
        let mut survivors_n: HashMap<Vec<i64>, HashSet<CyclineState>> = HashMap::new();
        for l in &f_max {
            let (p, q) = split_signs(l);
            survivors_m.insert(l.clone(), self.cycline_survivors(m, &p, &q));
            survivors_n.insert(l.clone(), self.cycline_survivors(m_n, &p, &q));
        }

        let diff = sub_chars(&query.target_char, chi_n);
        let deterministic_tail = m_n.iter().all(|&v| {
            (0..k).all(|c| {
                self.skeleton
                    .received_by_color(v, c)
                    .iter()
                    .filter(|&&e| m_n.contains(&self.skeleton.edge(e).source))
                    .count()
                    == 1
            })
        });
        let extra_max =
            self.skeleton.num_vertices() as u32 * self.group.size() as u32 + query.char_box + 1;
        let saturation = self.skeleton.num_vertices() as u32 * self.group.size() as u32;

        for lam_deg in degree_grid(&vec![query.path_len; k]) {
            for lambda in self.paths_with_range(v0, &lam_deg, Some(m)) {
                let f_lambda: Vec<&Vec<i64>> = f_max
                    .iter()
                    .filter(|l| {
                        let (p, _) = split_signs(l);
                        deg_le(&p, &lam_deg)
                    })
                    .collect();
                // g_l = g_{M, λ(0,p(l)), q(l)}
                let mut g_of_l: HashMap<&Vec<i64>, ElemId> = HashMap::new();
                let mut ok = true;
                for &l in &f_lambda {
                    let (p, _) = split_signs(l);
                    let mu0 = lambda.segment(&self.skeleton, &zeros(k), &p);
                    match self.cycline_completion(&survivors_m[l], &mu0) {
                        Some((g, _)) => {
                            g_of_l.insert(l, g);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    // v0 ∈ M_PerG guarantees completions; missing ones mean
                    // the box under-approximates Per and we cannot decide.
                    return Ok(ConvergenceOutcome::Inconclusive {
                        reason: "periodicity box too small for a cycline completion".into(),
                    });
                }

                match self.search_mu(
                    &lambda,
                    &f_lambda,
                    &g_of_l,
                    m_n,
                    &mperg_n,
                    &per_n,
                    &survivors_n,
                    &diff,
                    extra_max,
                ) {
                    MuSearch::Found => {}
                    MuSearch::NoneWithinBound { definite } => {
                        if definite || deterministic_tail {
                            let eps = f_lambda
                                .iter()
                                .map(|l| dot(&diff, l).circle_distance())
                                .filter(|&d| d > 0.0)
                                .fold(f64::INFINITY, f64::min);
                            let eps = if eps.is_finite() { eps / 2.0 } else { 0.25 };
                            let l_witness = f_lambda
                                .iter()
                                .find(|l| !dot(&diff, l).is_integer())
                                .map(|l| (*l).clone())
                                .unwrap_or_else(|| vec![0; k]);
                            return Ok(ConvergenceOutcome::Refuted {
                                epsilon: eps,
                                l: l_witness,
                                lambda: lambda.display(&self.skeleton),
                            });
                        }
                        return Ok(ConvergenceOutcome::Inconclusive {
                            reason: format!(
                                "no admissible continuation within {} extra blocks",
                                extra_max
                            ),
                        });
                    }
                }
            }
        }

        if query.path_len >= saturation {
            Ok(ConvergenceOutcome::Verified)
        } else {
            Ok(ConvergenceOutcome::Inconclusive {
                reason: format!(
                    "passed all paths up to length {}, below the saturation bound {}",
                    query.path_len, saturation
                ),
            })
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn search_mu(
        &self,
        lambda: &KPath,
        f_lambda: &[&Vec<i64>],
        g_of_l: &HashMap<&Vec<i64>, ElemId>,
        m_n: &BTreeSet<crate::graph::VertexId>,
        mperg_n: &BTreeSet<crate::graph::VertexId>,
        per_n: &BTreeSet<Vec<i64>>,
        survivors_n: &HashMap<Vec<i64>, HashSet<CyclineState>>,
        diff: &[Rat],
        extra_max: u32,
    ) -> MuSearch {
        let skel = &self.skeleton;
        let k = skel.rank;
        // μ must extend λ inside ΛM_n.
        if lambda
            .edges
            .iter()
            .any(|&e| !m_n.contains(&skel.edge(e).source))
            || !m_n.contains(&lambda.range())
        {
            return MuSearch::NoneWithinBound { definite: true };
        }
        let lam_deg = lambda.degree(skel);
        for extra in 0..=extra_max {
            let ext_deg: Degree = vec![extra; k];
            for ext in self.paths_with_range(lambda.source(skel), &ext_deg, Some(m_n)) {
                let mu = lambda.compose(skel, &ext);
                let mu_deg = deg_add(&lam_deg, &ext_deg);
                // entry degrees m with μ(m) ∈ (M_n)_PerG and room for p∨q
                for entry in degree_grid(&mu_deg) {
                    let at = mu.segment(skel, &zeros(k), &entry).source(skel);
                    if !mperg_n.contains(&at) {
                        continue;
                    }
                    let room = deg_sub(&mu_deg, &entry);
                    let applicable: Vec<&&Vec<i64>> = f_lambda
                        .iter()
                        .filter(|l| per_n.contains(**l))
                        .collect();
                    if !applicable.iter().all(|l| {
                        let (p, q) = split_signs(l);
                        let pq: Degree = p.iter().zip(&q).map(|(&a, &b)| a.max(b)).collect();
                        deg_le(&pq, &room)
                    }) {
                        continue;
                    }
                    let all_ok = applicable.iter().all(|&&l| {
                        let (p, q) = split_signs(l);
                        let g_l = g_of_l[l];
                        // (1) g_l·(μ(q, q+m)) ≠ μ(p, p+m)
                        let chunk_q = mu.segment(skel, &q, &deg_add(&q, &entry));
                        let chunk_p = mu.segment(skel, &p, &deg_add(&p, &entry));
                        if self.act_on_path(g_l, &chunk_q) != chunk_p {
                            return true;
                        }
                        // (2) the shifted triple is not cycline in ΛM_n
                        let state = CyclineState {
                            alpha: mu.segment(skel, &entry, &deg_add(&entry, &p)),
                            elem: self.restrict_path(g_l, &chunk_q),
                            beta: mu.segment(skel, &entry, &deg_add(&entry, &q)),
                        };
                        if !survivors_n[l].contains(&state) {
                            return true;
                        }
                        // (3) characters agree at l (then any ε works)
                        dot(diff, l).is_integer()
                    });
                    if all_ok {
                        return MuSearch::Found;
                    }
                }
            }
        }
        MuSearch::NoneWithinBound { definite: false }
    }
}

enum MuSearch {
    Found,
    NoneWithinBound { definite: bool },
}

fn sub_chars(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x.sub(*y)).collect()
}

/// All vectors in `[-b, b]^k`.
fn box_vectors(k: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for v in &out {
            for x in -b..=b {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// All vectors in `[0, b]^k`.
fn nonneg_box_vectors(k: usize, b: u32) -> Vec<Degree> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for v in &out {
            for x in 0..=b {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// All degree vectors `m ≤ bound`.
fn degree_grid(bound: &Degree) -> Vec<Degree> {
    let mut out = vec![vec![]];
    for &b in bound {
        let mut next = Vec::new();
        for v in &out {
            for x in 0..=b {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}
