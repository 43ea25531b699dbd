//! Closure of a finitely generated self-similar action into a finite automaton
//! group with restriction cocycle, plus the decision procedures that live
//! directly on the closed group: pseudo-freeness, vertex stabilizers and
//! trivially-acting pairs.
//!
//! A generator is given by a vertex permutation, an edge permutation and one
//! restriction word per edge. Closure first explores the automaton of
//! freely-reduced words under the restriction transitions, minimizes it by
//! bisimulation (two states are one group element iff they share vertex/edge
//! action and coinductively equal restrictions), and then closes the minimized
//! states under products and inverses. Exceeding the cap is reported as
//! [`Error::ClosureCapExceeded`]; infinite automaton groups like the binary
//! adding machine fail there.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::graph::{Graph, Multiplicity, Path, VertexId};
use crate::{Error, Result};

/// Canonical id of a group element inside a closed [`GroupTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemId(pub u32);

impl ElemId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// One letter of a word in the generators; `inv` marks the inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: u16,
    pub inv: bool,
}

pub type Word = Vec<Letter>;

/// Generator data over an abstract edge substrate.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub name: String,
    /// Image of each vertex id.
    pub vertex_perm: Vec<u32>,
    /// Image of each edge id.
    pub edge_perm: Vec<u32>,
    /// Restriction word per edge id.
    pub restrictions: Vec<Word>,
}

/// The part of a graph the closure algorithm needs.
#[derive(Debug, Clone)]
pub(crate) struct ActionSubstrate {
    pub num_vertices: usize,
    pub edge_range: Vec<u32>,
    pub edge_source: Vec<u32>,
}

impl ActionSubstrate {
    pub(crate) fn of_graph(graph: &Graph) -> ActionSubstrate {
        ActionSubstrate {
            num_vertices: graph.num_vertices(),
            edge_range: graph.edge_ids().map(|e| graph.edge(e).range.0).collect(),
            edge_source: graph.edge_ids().map(|e| graph.edge(e).source.0).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ActionKey {
    vperm: Vec<u32>,
    eperm: Vec<u32>,
}

#[derive(Debug, Clone)]
struct Elem {
    vperm: Vec<u32>,
    eperm: Vec<u32>,
    /// Restriction per edge; `u32::MAX` while an element is being filled in.
    rest: Vec<u32>,
    word: Word,
}

const UNSET: u32 = u32::MAX;

/// A closed automaton group: canonical elements, Cayley steps by generator
/// letters, inverses and per-edge restrictions.
#[derive(Debug, Clone)]
pub struct GroupTable {
    elems: Vec<Elem>,
    identity: ElemId,
    gen_ids: Vec<ElemId>,
    gen_names: Vec<String>,
    /// `cayley[g][letter]` with letters ordered `g0, g0', g1, g1', …`.
    cayley: Vec<Vec<ElemId>>,
    inv: Vec<ElemId>,
}

impl GroupTable {
    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn identity(&self) -> ElemId {
        self.identity
    }

    pub fn elem_ids(&self) -> impl Iterator<Item = ElemId> {
        (0..self.elems.len() as u32).map(ElemId)
    }

    /// Canonical ids of the (deduplicated) generators, in input order.
    pub fn generator_ids(&self) -> &[ElemId] {
        &self.gen_ids
    }

    pub fn act_vertex(&self, g: ElemId, v: VertexId) -> VertexId {
        VertexId(self.elems[g.idx()].vperm[v.idx()])
    }

    pub fn act_edge_raw(&self, g: ElemId, e: usize) -> usize {
        self.elems[g.idx()].eperm[e] as usize
    }

    pub fn restrict_raw(&self, g: ElemId, e: usize) -> ElemId {
        ElemId(self.elems[g.idx()].rest[e])
    }

    pub fn inv(&self, g: ElemId) -> ElemId {
        self.inv[g.idx()]
    }

    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        // a·b = a·l1·…·lm where word(b) = l1…lm.
        let word = self.elems[b.idx()].word.clone();
        let mut acc = a;
        for l in word {
            acc = self.cayley[acc.idx()][letter_index(l)];
        }
        acc
    }

    /// A shortest-found generator word presenting `g`; `1` for the identity.
    pub fn name(&self, g: ElemId) -> String {
        let w = &self.elems[g.idx()].word;
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|l| {
                let mut s = self.gen_names[l.gen as usize].clone();
                if l.inv {
                    s.push('\'');
                }
                s
            })
            .collect::<Vec<_>>()
            .join("·")
    }

    /// Orbit of a vertex under the whole group, sorted.
    pub fn vertex_orbit(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.elem_ids().map(|g| self.act_vertex(g, v)).collect()
    }

    pub fn is_invariant_vertex_set(&self, set: &BTreeSet<VertexId>) -> bool {
        set.iter()
            .all(|&v| self.gen_ids.iter().all(|&g| set.contains(&self.act_vertex(g, v))))
    }

    pub fn vertex_stabilizer(&self, v: VertexId) -> Vec<ElemId> {
        self.elem_ids().filter(|&g| self.act_vertex(g, v) == v).collect()
    }
}

fn letter_index(l: Letter) -> usize {
    (l.gen as usize) * 2 + usize::from(l.inv)
}

fn invert_word(w: &[Letter]) -> Word {
    w.iter()
        .rev()
        .map(|l| Letter {
            gen: l.gen,
            inv: !l.inv,
        })
        .collect()
}

fn reduce_word(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if let Some(&top) = out.last() {
            if top.gen == l.gen && top.inv != l.inv {
                out.pop();
                continue;
            }
        }
        out.push(l);
    }
    out
}

fn invert_perm(p: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j as usize] = i as u32;
    }
    out
}

fn is_perm(p: &[u32], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &i in p {
        if (i as usize) >= n || seen[i as usize] {
            return false;
        }
        seen[i as usize] = true;
    }
    true
}

/// Closure construction: the word automaton over freely-reduced generator
/// words, explored under restriction transitions.
struct WordAutomaton<'a> {
    substrate: &'a ActionSubstrate,
    gens: &'a [GeneratorSpec],
    gen_eperm_inv: Vec<Vec<u32>>,
    states: Vec<Word>,
    index: HashMap<Word, usize>,
    actions: Vec<ActionKey>,
    trans: Vec<Vec<usize>>,
    cap: usize,
}

impl<'a> WordAutomaton<'a> {
    fn letter_act_vertex(&self, l: Letter, v: u32) -> u32 {
        let g = &self.gens[l.gen as usize];
        if l.inv {
            // inverse permutation, computed lazily through the cached table
            self.gen_vperm_inv(l.gen as usize)[v as usize]
        } else {
            g.vertex_perm[v as usize]
        }
    }

    fn gen_vperm_inv(&self, g: usize) -> Vec<u32> {
        invert_perm(&self.gens[g].vertex_perm)
    }

    fn letter_act_edge(&self, l: Letter, e: u32) -> u32 {
        if l.inv {
            self.gen_eperm_inv[l.gen as usize][e as usize]
        } else {
            self.gens[l.gen as usize].edge_perm[e as usize]
        }
    }

    fn word_act_edge(&self, w: &[Letter], e: u32) -> u32 {
        let mut cur = e;
        for &l in w.iter().rev() {
            cur = self.letter_act_edge(l, cur);
        }
        cur
    }

    fn action_of(&self, w: &[Letter]) -> ActionKey {
        let vperm = (0..self.substrate.num_vertices as u32)
            .map(|v| {
                let mut cur = v;
                for &l in w.iter().rev() {
                    cur = self.letter_act_vertex(l, cur);
                }
                cur
            })
            .collect();
        let eperm = (0..self.substrate.edge_range.len() as u32)
            .map(|e| self.word_act_edge(w, e))
            .collect();
        ActionKey { vperm, eperm }
    }

    /// `l|_e` as a word.
    fn letter_restriction(&self, l: Letter, e: u32) -> Word {
        if l.inv {
            // (g⁻¹)|_e = (g|_{g⁻¹·e})⁻¹
            let f = self.gen_eperm_inv[l.gen as usize][e as usize];
            invert_word(&self.gens[l.gen as usize].restrictions[f as usize])
        } else {
            self.gens[l.gen as usize].restrictions[e as usize].clone()
        }
    }

    /// `w|_e` as a freely-reduced word, via `(u v)|_e = u|_{v·e} · v|_e`.
    fn word_restriction(&self, w: &[Letter], e: u32) -> Word {
        if w.is_empty() {
            return Vec::new();
        }
        let head = w[0];
        let tail = &w[1..];
        let tail_e = self.word_act_edge(tail, e);
        let mut out = self.letter_restriction(head, tail_e);
        out.extend(self.word_restriction(tail, e));
        reduce_word(&out)
    }

    fn intern(&mut self, w: Word) -> Result<usize> {
        if let Some(&i) = self.index.get(&w) {
            return Ok(i);
        }
        if self.states.len() >= self.cap {
            return Err(Error::ClosureCapExceeded { cap: self.cap });
        }
        let i = self.states.len();
        self.actions.push(self.action_of(&w));
        self.states.push(w.clone());
        self.trans.push(Vec::new());
        self.index.insert(w, i);
        Ok(i)
    }

    fn explore(&mut self) -> Result<()> {
        let mut queue: VecDeque<usize> = VecDeque::new();
        let mut seeds: Vec<Word> = vec![Vec::new()];
        for g in 0..self.gens.len() as u16 {
            seeds.push(vec![Letter { gen: g, inv: false }]);
            seeds.push(vec![Letter { gen: g, inv: true }]);
        }
        for w in seeds {
            queue.push_back(self.intern(w)?);
        }
        let mut done = 0usize;
        while done < self.states.len() {
            let s = done;
            done += 1;
            let w = self.states[s].clone();
            let mut row = Vec::with_capacity(self.substrate.edge_range.len());
            for e in 0..self.substrate.edge_range.len() as u32 {
                let t = self.word_restriction(&w, e);
                row.push(self.intern(t)?);
            }
            self.trans[s] = row;
        }
        Ok(())
    }
}

/// Moore-style partition refinement; returns the block id per state.
fn refine(actions: &[ActionKey], trans: &[Vec<usize>]) -> Vec<usize> {
    let n = actions.len();
    let mut block: Vec<usize> = vec![0; n];
    let mut by_action: HashMap<&ActionKey, usize> = HashMap::new();
    let mut next = 0;
    for (i, a) in actions.iter().enumerate() {
        let b = *by_action.entry(a).or_insert_with(|| {
            let b = next;
            next += 1;
            b
        });
        block[i] = b;
    }
    loop {
        let mut sig_map: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut new_block = vec![0usize; n];
        let mut count = 0;
        for i in 0..n {
            let sig = (
                block[i],
                trans[i].iter().map(|&t| block[t]).collect::<Vec<_>>(),
            );
            let b = *sig_map.entry(sig).or_insert_with(|| {
                let b = count;
                count += 1;
                b
            });
            new_block[i] = b;
        }
        let stable = count == block.iter().copied().collect::<BTreeSet<_>>().len();
        block = new_block;
        if stable {
            return block;
        }
    }
}

struct ClosureState {
    n_edges: usize,
    elems: Vec<Elem>,
    by_action: HashMap<ActionKey, Vec<u32>>,
    mul_memo: HashMap<(u32, u32), u32>,
    inv_memo: HashMap<u32, u32>,
    cap: usize,
}

impl ClosureState {
    fn action_key(&self, i: u32) -> ActionKey {
        ActionKey {
            vperm: self.elems[i as usize].vperm.clone(),
            eperm: self.elems[i as usize].eperm.clone(),
        }
    }

    fn product_action(&self, a: u32, b: u32) -> ActionKey {
        let ea = &self.elems[a as usize];
        let eb = &self.elems[b as usize];
        ActionKey {
            vperm: eb.vperm.iter().map(|&v| ea.vperm[v as usize]).collect(),
            eperm: eb.eperm.iter().map(|&e| ea.eperm[e as usize]).collect(),
        }
    }

    fn alloc(&mut self, key: ActionKey, word: Word) -> Result<u32> {
        if self.elems.len() >= self.cap {
            return Err(Error::ClosureCapExceeded { cap: self.cap });
        }
        let id = self.elems.len() as u32;
        self.elems.push(Elem {
            vperm: key.vperm.clone(),
            eperm: key.eperm.clone(),
            rest: vec![UNSET; self.n_edges],
            word,
        });
        self.by_action.entry(key).or_default().push(id);
        Ok(id)
    }

    /// Does `a·b = c`? Coinductive: assumed pairs are taken as equal unless a
    /// finite unfolding refutes them. Unfilled restrictions refute
    /// conservatively; duplicates this may create are merged afterwards.
    fn eq_product(&self, a: u32, b: u32, c: u32, assumed: &mut BTreeSet<(u32, u32, u32)>) -> bool {
        if let Some(&m) = self.mul_memo.get(&(a, b)) {
            return m == c;
        }
        if self.product_action(a, b) != self.action_key(c) {
            return false;
        }
        if !assumed.insert((a, b, c)) {
            return true;
        }
        for e in 0..self.n_edges {
            let be = self.elems[b as usize].eperm[e] as usize;
            let ra = self.elems[a as usize].rest[be];
            let rb = self.elems[b as usize].rest[e];
            let rc = self.elems[c as usize].rest[e];
            if ra == UNSET || rb == UNSET || rc == UNSET {
                return false;
            }
            if !self.eq_product(ra, rb, rc, assumed) {
                return false;
            }
        }
        true
    }

    fn mul(&mut self, a: u32, b: u32) -> Result<u32> {
        if let Some(&m) = self.mul_memo.get(&(a, b)) {
            return Ok(m);
        }
        let key = self.product_action(a, b);
        if let Some(cands) = self.by_action.get(&key) {
            for &c in cands.clone().iter() {
                let mut assumed = BTreeSet::new();
                if self.eq_product(a, b, c, &mut assumed) {
                    self.mul_memo.insert((a, b), c);
                    return Ok(c);
                }
            }
        }
        let word = {
            let mut w = self.elems[a as usize].word.clone();
            w.extend(self.elems[b as usize].word.iter().copied());
            reduce_word(&w)
        };
        let id = self.alloc(key, word)?;
        self.mul_memo.insert((a, b), id);
        for e in 0..self.n_edges {
            let be = self.elems[b as usize].eperm[e] as usize;
            let ra = self.elems[a as usize].rest[be];
            let rb = self.elems[b as usize].rest[e];
            debug_assert!(ra != UNSET && rb != UNSET);
            let r = self.mul(ra, rb)?;
            self.elems[id as usize].rest[e] = r;
        }
        Ok(id)
    }

    fn inverse_action(&self, a: u32) -> ActionKey {
        ActionKey {
            vperm: invert_perm(&self.elems[a as usize].vperm),
            eperm: invert_perm(&self.elems[a as usize].eperm),
        }
    }

    fn eq_inverse(&self, a: u32, c: u32, assumed: &mut BTreeSet<(u32, u32)>) -> bool {
        if let Some(&m) = self.inv_memo.get(&a) {
            return m == c;
        }
        if self.inverse_action(a) != self.action_key(c) {
            return false;
        }
        if !assumed.insert((a, c)) {
            return true;
        }
        for e in 0..self.n_edges {
            // (a⁻¹)|_e = (a|_{a⁻¹·e})⁻¹ and a⁻¹·e = c·e
            let ce = self.elems[c as usize].eperm[e] as usize;
            let ra = self.elems[a as usize].rest[ce];
            let rc = self.elems[c as usize].rest[e];
            if ra == UNSET || rc == UNSET {
                return false;
            }
            if !self.eq_inverse(ra, rc, assumed) {
                return false;
            }
        }
        true
    }

    fn inv(&mut self, a: u32) -> Result<u32> {
        if let Some(&m) = self.inv_memo.get(&a) {
            return Ok(m);
        }
        let key = self.inverse_action(a);
        if let Some(cands) = self.by_action.get(&key) {
            for &c in cands.clone().iter() {
                let mut assumed = BTreeSet::new();
                if self.eq_inverse(a, c, &mut assumed) {
                    self.inv_memo.insert(a, c);
                    return Ok(c);
                }
            }
        }
        let word = invert_word(&self.elems[a as usize].word);
        let id = self.alloc(key, word)?;
        self.inv_memo.insert(a, id);
        for e in 0..self.n_edges {
            let ce = self.elems[id as usize].eperm[e] as usize;
            let ra = self.elems[a as usize].rest[ce];
            debug_assert!(ra != UNSET);
            let r = self.inv(ra)?;
            self.elems[id as usize].rest[e] = r;
        }
        Ok(id)
    }
}

/// Closes the generators into an automaton group over the substrate.
pub(crate) fn close_table(
    substrate: &ActionSubstrate,
    gens: &[GeneratorSpec],
    cap: usize,
) -> Result<GroupTable> {
    let nv = substrate.num_vertices;
    let ne = substrate.edge_range.len();
    for g in gens {
        if !is_perm(&g.vertex_perm, nv) || !is_perm(&g.edge_perm, ne) {
            return Err(Error::Schema(format!(
                "generator `{}` does not define bijections on vertices and edges",
                g.name
            )));
        }
        if g.restrictions.len() != ne {
            return Err(Error::Schema(format!(
                "generator `{}` must restrict every edge",
                g.name
            )));
        }
        for e in 0..ne {
            let image = g.edge_perm[e] as usize;
            if substrate.edge_range[image] != g.vertex_perm[substrate.edge_range[e] as usize]
                || substrate.edge_source[image] != g.vertex_perm[substrate.edge_source[e] as usize]
            {
                return Err(Error::EquivarianceViolation {
                    generator: g.name.clone(),
                    edge: format!("#{e}"),
                });
            }
        }
    }

    // Phase A: word automaton reachable from the generator letters.
    let mut wa = WordAutomaton {
        substrate,
        gens,
        gen_eperm_inv: gens.iter().map(|g| invert_perm(&g.edge_perm)).collect(),
        states: Vec::new(),
        index: HashMap::new(),
        actions: Vec::new(),
        trans: Vec::new(),
        cap,
    };
    wa.explore()?;

    // Phase B: bisimulation classes of word states.
    let block = refine(&wa.actions, &wa.trans);
    let nblocks = block.iter().copied().collect::<BTreeSet<_>>().len();
    let mut rep_word: Vec<Option<Word>> = vec![None; nblocks];
    for (i, w) in wa.states.iter().enumerate() {
        let b = block[i];
        let better = match &rep_word[b] {
            None => true,
            Some(old) => w.len() < old.len() || (w.len() == old.len() && w < old),
        };
        if better {
            rep_word[b] = Some(w.clone());
        }
    }

    let mut st = ClosureState {
        n_edges: ne,
        elems: Vec::new(),
        by_action: HashMap::new(),
        mul_memo: HashMap::new(),
        inv_memo: HashMap::new(),
        cap,
    };
    // Allocate one element per class, identity's class first.
    let empty_idx = wa.index[&Vec::new()];
    let id_block = block[empty_idx];
    let mut class_elem: Vec<u32> = vec![UNSET; nblocks];
    let mut order: Vec<usize> = vec![id_block];
    order.extend((0..nblocks).filter(|&b| b != id_block));
    for &b in &order {
        let i = wa
            .states
            .iter()
            .enumerate()
            .position(|(i, _)| block[i] == b)
            .expect("block has a member");
        let key = wa.actions[i].clone();
        let id = st.alloc(key, rep_word[b].clone().unwrap())?;
        class_elem[b] = id;
    }
    for (i, row) in wa.trans.iter().enumerate() {
        let e = class_elem[block[i]];
        for (edge, &t) in row.iter().enumerate() {
            let target = class_elem[block[t]];
            let slot = &mut st.elems[e as usize].rest[edge];
            debug_assert!(*slot == UNSET || *slot == target);
            *slot = target;
        }
    }

    let identity = class_elem[id_block];
    debug_assert_eq!(identity, 0);
    let mut gen_elem: Vec<u32> = (0..gens.len())
        .map(|g| {
            let w = vec![Letter {
                gen: g as u16,
                inv: false,
            }];
            class_elem[block[wa.index[&w]]]
        })
        .collect();

    // Phase C: close under products with generator letters and inverses, then
    // merge any duplicates the conservative equality may have produced.
    loop {
        let mut done = 0usize;
        while done < st.elems.len() {
            let a = done as u32;
            done += 1;
            st.inv(a)?;
            for &g in &gen_elem {
                st.mul(a, g)?;
                let gi = st.inv(g)?;
                st.mul(a, gi)?;
            }
        }
        let actions: Vec<ActionKey> = (0..st.elems.len() as u32)
            .map(|i| st.action_key(i))
            .collect();
        let trans: Vec<Vec<usize>> = st
            .elems
            .iter()
            .map(|e| e.rest.iter().map(|&r| r as usize).collect())
            .collect();
        let block2 = refine(&actions, &trans);
        let nb = block2.iter().copied().collect::<BTreeSet<_>>().len();
        if nb == st.elems.len() {
            break;
        }
        // Merge: keep the first element of each class, remap restrictions.
        let mut class_rep: Vec<u32> = vec![UNSET; nb];
        let mut keep: Vec<u32> = Vec::new();
        for (i, &b) in block2.iter().enumerate() {
            if class_rep[b] == UNSET {
                class_rep[b] = keep.len() as u32;
                keep.push(i as u32);
            }
        }
        let remap: Vec<u32> = block2.iter().map(|&b| class_rep[b]).collect();
        gen_elem = gen_elem.iter().map(|&g| remap[g as usize]).collect();
        let mut new_elems = Vec::with_capacity(nb);
        for &old in &keep {
            let mut e = st.elems[old as usize].clone();
            e.rest = e.rest.iter().map(|&r| remap[r as usize]).collect();
            new_elems.push(e);
        }
        let mut by_action: HashMap<ActionKey, Vec<u32>> = HashMap::new();
        for (i, e) in new_elems.iter().enumerate() {
            by_action
                .entry(ActionKey {
                    vperm: e.vperm.clone(),
                    eperm: e.eperm.clone(),
                })
                .or_default()
                .push(i as u32);
        }
        st = ClosureState {
            n_edges: ne,
            elems: new_elems,
            by_action,
            mul_memo: HashMap::new(),
            inv_memo: HashMap::new(),
            cap,
        };
    }

    // Finalize tables.
    let n = st.elems.len();
    let mut cayley = vec![Vec::with_capacity(gens.len() * 2); n];
    for a in 0..n as u32 {
        for g in 0..gens.len() {
            let ge = st.mul_memo[&(a, gen_elem[g])];
            let gi = st.inv_memo[&gen_elem[g]];
            let gie = st.mul_memo[&(a, gi)];
            cayley[a as usize].push(ElemId(ge));
            cayley[a as usize].push(ElemId(gie));
        }
    }
    let inv = (0..n as u32).map(|a| ElemId(st.inv_memo[&a])).collect();
    let table = GroupTable {
        elems: st.elems,
        identity: ElemId(identity),
        gen_ids: gen_elem.iter().map(|&g| ElemId(g)).collect(),
        gen_names: gens.iter().map(|g| g.name.clone()).collect(),
        cayley,
        inv,
    };

    // Cocycle law (gh)|_e = g|_{h·e} h|_e, checked exhaustively on small
    // closures and on generator pairs otherwise.
    let exhaustive = n <= 256;
    let pairs: Vec<(ElemId, ElemId)> = if exhaustive {
        table
            .elem_ids()
            .flat_map(|a| table.elem_ids().map(move |b| (a, b)))
            .collect()
    } else {
        table
            .gen_ids
            .iter()
            .flat_map(|&a| table.gen_ids.iter().map(move |&b| (a, b)))
            .collect()
    };
    for (g, h) in pairs {
        let gh = table.mul(g, h);
        for e in 0..ne {
            let he = table.act_edge_raw(h, e);
            let lhs = table.restrict_raw(gh, e);
            let rhs = table.mul(table.restrict_raw(g, he), table.restrict_raw(h, e));
            if lhs != rhs {
                return Err(Error::CocycleViolation {
                    left: table.name(g),
                    right: table.name(h),
                    edge: format!("#{e}"),
                });
            }
        }
    }

    Ok(table)
}

/// A validated rank-one self-similar system: graph plus closed group.
#[derive(Debug, Clone)]
pub struct SelfSimilarSystem {
    pub graph: Graph,
    pub group: GroupTable,
    pub closure_cap: usize,
    pseudo_free: bool,
    pseudo_free_witness: Option<(ElemId, Path)>,
}

/// Closes the generators over a graph and decides pseudo-freeness.
pub fn close_group(
    graph: &Graph,
    gens: &[GeneratorSpec],
    cap: usize,
) -> Result<SelfSimilarSystem> {
    for g in gens {
        for e in graph.edge_ids() {
            let img = g
                .edge_perm
                .get(e.idx())
                .copied()
                .filter(|&i| (i as usize) < graph.num_edges())
                .ok_or_else(|| Error::Schema(format!("generator `{}`: bad edge perm", g.name)))?;
            if graph.edge(crate::graph::EdgeId(img)).multiplicity != graph.edge(e).multiplicity {
                return Err(Error::EquivarianceViolation {
                    generator: g.name.clone(),
                    edge: graph.edge(e).name.clone(),
                });
            }
        }
    }
    let substrate = ActionSubstrate::of_graph(graph);
    let group = close_table(&substrate, gens, cap)?;
    let mut sys = SelfSimilarSystem {
        graph: graph.clone(),
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

impl SelfSimilarSystem {
    pub fn is_pseudo_free(&self) -> bool {
        self.pseudo_free
    }

    /// `(g, μ)` with `g ≠ 1`, `g·μ = μ`, `g|_μ = 1`, when one exists.
    pub fn pseudo_free_witness(&self) -> Option<&(ElemId, Path)> {
        self.pseudo_free_witness.as_ref()
    }

    pub fn require_pseudo_free(&self) -> Result<()> {
        match &self.pseudo_free_witness {
            None => Ok(()),
            Some((g, p)) => Err(Error::NotPseudoFree {
                witness: format!(
                    "{} fixes {} with trivial restriction",
                    self.group.name(*g),
                    p.display(&self.graph)
                ),
            }),
        }
    }

    /// Reachability in the fixing automaton on states `(g, vertex)` whose
    /// transitions follow edges fixed by `g`, looking for the identity.
    fn pseudo_free_search(&self) -> Option<(ElemId, Path)> {
        let g = &self.graph;
        let gr = &self.group;
        let nv = g.num_vertices();
        let ng = gr.size();
        let state = |e: ElemId, v: VertexId| e.idx() * nv + v.idx();
        // parent[s] = (previous state, edge taken)
        let mut parent: Vec<Option<(usize, crate::graph::EdgeId)>> = vec![None; ng * nv];
        let mut origin: Vec<Option<(ElemId, VertexId)>> = vec![None; ng * nv];
        let mut queue = VecDeque::new();
        for e in gr.elem_ids() {
            if e == gr.identity() {
                continue;
            }
            for v in g.vertex_ids() {
                let s = state(e, v);
                if origin[s].is_none() {
                    origin[s] = Some((e, v));
                    queue.push_back((e, v));
                }
            }
        }
        while let Some((h, u)) = queue.pop_front() {
            let s = state(h, u);
            for &edge in g.received_edges(u) {
                if gr.act_edge_raw(h, edge.idx()) != edge.idx() {
                    continue;
                }
                let h2 = gr.restrict_raw(h, edge.idx());
                let u2 = g.edge(edge).source;
                let t = state(h2, u2);
                if origin[t].is_none() {
                    origin[t] = origin[s];
                    parent[t] = Some((s, edge));
                    queue.push_back((h2, u2));
                }
                if h2 == gr.identity() {
                    // reconstruct the fixed path
                    let mut edges_rev = vec![edge];
                    let mut cur = s;
                    while let Some((prev, e_taken)) = parent[cur] {
                        edges_rev.push(e_taken);
                        cur = prev;
                    }
                    edges_rev.reverse();
                    let (g0, v0) = origin[s].unwrap();
                    let mut path = Path::vertex(v0);
                    for e_taken in edges_rev {
                        path = path.extended(
                            &self.graph,
                            crate::graph::PathStep {
                                edge: e_taken,
                                copy: 0,
                            },
                        );
                    }
                    return Some((g0, path));
                }
            }
        }
        None
    }

    /// `g·μ`, acting diagonally on ω-copies.
    pub fn act_on_path(&self, g: ElemId, path: &Path) -> Path {
        let mut out = Path::vertex(self.group.act_vertex(g, path.base));
        let mut h = g;
        for step in &path.steps {
            let e2 = self.group.act_edge_raw(h, step.edge.idx());
            out.steps.push(crate::graph::PathStep {
                edge: crate::graph::EdgeId(e2 as u32),
                copy: step.copy,
            });
            h = self.group.restrict_raw(h, step.edge.idx());
        }
        out
    }

    /// `g|_μ`.
    pub fn restrict_path(&self, g: ElemId, path: &Path) -> ElemId {
        let mut h = g;
        for step in &path.steps {
            h = self.group.restrict_raw(h, step.edge.idx());
        }
        h
    }

    /// `{g : g·v = v}`.
    pub fn vertex_stabilizer(&self, v: VertexId) -> Vec<ElemId> {
        self.group.vertex_stabilizer(v)
    }

    /// Ordinary edges of `vE¹` with source in `m`, plus whether an ω-family
    /// from `m` makes the count infinite.
    pub fn received_in(&self, v: VertexId, m: &BTreeSet<VertexId>) -> (Vec<crate::graph::EdgeId>, bool) {
        let mut plain = Vec::new();
        let mut omega = false;
        for &e in self.graph.received_edges(v) {
            if !m.contains(&self.graph.edge(e).source) {
                continue;
            }
            match self.graph.edge(e).multiplicity {
                Multiplicity::One => plain.push(e),
                Multiplicity::Omega => omega = true,
            }
        }
        (plain, omega)
    }

    /// Greatest fixpoint of `(g,v) ∈ T  iff  g·v = v and for every e ∈ vE¹M:
    /// g·e = e and (g|_e, s(e)) ∈ T`. Returns the pairs with `g ≠ 1`.
    pub fn trivially_acting_pairs(&self, m: &BTreeSet<VertexId>) -> Vec<(ElemId, VertexId)> {
        debug_assert!(self.group.is_invariant_vertex_set(m));
        let mut alive: BTreeSet<(ElemId, VertexId)> = BTreeSet::new();
        for g in self.group.elem_ids() {
            for &v in m {
                if self.group.act_vertex(g, v) == v {
                    alive.insert((g, v));
                }
            }
        }
        loop {
            let mut removed = false;
            let snapshot: Vec<(ElemId, VertexId)> = alive.iter().copied().collect();
            for (g, v) in snapshot {
                let ok = self.graph.received_edges(v).iter().all(|&e| {
                    if !m.contains(&self.graph.edge(e).source) {
                        return true;
                    }
                    self.group.act_edge_raw(g, e.idx()) == e.idx()
                        && alive.contains(&(
                            self.group.restrict_raw(g, e.idx()),
                            self.graph.edge(e).source,
                        ))
                });
                if !ok {
                    alive.remove(&(g, v));
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        alive
            .into_iter()
            .filter(|&(g, _)| g != self.group.identity())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn trivial_group_closure() {
        let g = corpus::single_loop();
        let sys = close_group(&g, &[], 100).unwrap();
        assert_eq!(sys.group.size(), 1);
        assert!(sys.is_pseudo_free());
    }

    #[test]
    fn e22_swap_closure_has_two_elements() {
        let sys = corpus::e22_z2();
        assert_eq!(sys.group.size(), 2);
        let s = sys.group.generator_ids()[0];
        assert_eq!(sys.group.mul(s, s), sys.group.identity());
        assert_eq!(sys.group.inv(s), s);
    }

    #[test]
    fn adding_machine_exceeds_cap() {
        // One vertex, loops 0 and 1; g·0 = 1 with g|_0 = 1, g·1 = 0 with
        // g|_1 = g. The closure is infinite cyclic.
        let g = corpus::two_loops_graph();
        let e0 = g.edge_by_name("a").unwrap();
        let e1 = g.edge_by_name("b").unwrap();
        let mut eperm = vec![0u32; 2];
        eperm[e0.idx()] = e1.0;
        eperm[e1.idx()] = e0.0;
        let mut restrictions = vec![Vec::new(), Vec::new()];
        restrictions[e1.idx()] = vec![Letter { gen: 0, inv: false }];
        let gen = GeneratorSpec {
            name: "g".into(),
            vertex_perm: vec![0],
            edge_perm: eperm,
            restrictions,
        };
        match close_group(&g, &[gen], 64) {
            Err(Error::ClosureCapExceeded { cap }) => assert_eq!(cap, 64),
            other => panic!("expected cap failure, got {:?}", other.map(|s| s.group.size())),
        }
    }

    #[test]
    fn axiom_iv_and_automorphism_restriction() {
        let sys = corpus::e22_z2();
        let s = sys.group.generator_ids()[0];
        let v1 = sys.graph.vertex_by_name("v1").unwrap();
        // g·v is the permuted vertex and g|_v = g.
        let p = Path::vertex(v1);
        assert_eq!(
            sys.act_on_path(s, &p).base,
            sys.graph.vertex_by_name("v2").unwrap()
        );
        assert_eq!(sys.restrict_path(s, &p), s);
        // Automorphism action: g|_μ = g for every path.
        let v0 = sys.graph.vertex_by_name("v0").unwrap();
        for path in sys.graph.paths_from(v0, 3, 1) {
            assert_eq!(sys.restrict_path(s, &path), s);
        }
    }

    #[test]
    fn two_step_restriction_matches_one_step_composition() {
        let sys = corpus::nonconstant_restriction_system();
        let g0 = sys.group.generator_ids()[0];
        for v in sys.graph.vertex_ids() {
            for path in sys.graph.paths_from(v, 2, 1) {
                let direct = sys.restrict_path(g0, &path);
                let step1 = sys.restrict_path(g0, &path.prefix(1));
                let tail = path.shifted(&sys.graph, 1);
                let two_step = sys.restrict_path(step1, &tail);
                assert_eq!(direct, two_step);
            }
        }
    }

    #[test]
    fn group_action_law_on_paths() {
        let sys = corpus::nonconstant_restriction_system();
        for a in sys.group.elem_ids() {
            for b in sys.group.elem_ids() {
                let ab = sys.group.mul(a, b);
                for v in sys.graph.vertex_ids() {
                    for path in sys.graph.paths_from(v, 2, 1) {
                        assert_eq!(
                            sys.act_on_path(ab, &path),
                            sys.act_on_path(a, &sys.act_on_path(b, &path))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pseudo_free_verdicts() {
        // Graph automorphisms are always pseudo-free.
        assert!(corpus::e22_z2().is_pseudo_free());
        // g fixes edge a with trivial restriction but is nontrivial through b.
        let sys = corpus::non_pseudo_free_system();
        assert!(!sys.is_pseudo_free());
        let (g, path) = sys.pseudo_free_witness().unwrap();
        assert_ne!(*g, sys.group.identity());
        assert!(path.len() >= 1);
        let fixed = sys.act_on_path(*g, path);
        assert_eq!(&fixed, path);
        assert_eq!(sys.restrict_path(*g, path), sys.group.identity());
    }

    #[test]
    fn e22_stabilizers() {
        let sys = corpus::e22_z2();
        let v0 = sys.graph.vertex_by_name("v0").unwrap();
        let v1 = sys.graph.vertex_by_name("v1").unwrap();
        assert_eq!(sys.vertex_stabilizer(v0).len(), 2);
        assert_eq!(sys.vertex_stabilizer(v1), vec![sys.group.identity()]);
    }

    #[test]
    fn trivially_acting_pairs_examples() {
        // Full swap moves e1, so nothing acts trivially on E⁰.
        let sys = corpus::e22_z2();
        let all: std::collections::BTreeSet<_> = sys.graph.vertex_ids().collect();
        assert!(sys.trivially_acting_pairs(&all).is_empty());
        // The variant fixing e1, e2 acts trivially on v0E*{v0}.
        let sys = corpus::e22_z2_fixing_loops();
        let v0 = sys.graph.vertex_by_name("v0").unwrap();
        let m = std::collections::BTreeSet::from([v0]);
        let pairs = sys.trivially_acting_pairs(&m);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].1, v0);
        // Fixpoint agrees with the literal path search: the pair fixes every
        // path over the tail up to length 10, and no other nontrivial pair
        // does so over the whole vertex set.
        let (g, v) = pairs[0];
        for len in 0..=10 {
            for path in sys.graph.paths_from(v, len, 2) {
                if path.steps.iter().all(|s| m.contains(&sys.graph.edge(s.edge).source)) {
                    assert_eq!(sys.act_on_path(g, &path), path);
                }
            }
        }
        let all: std::collections::BTreeSet<_> = sys.graph.vertex_ids().collect();
        for h in sys.group.elem_ids() {
            if h == sys.group.identity() {
                continue;
            }
            for w in sys.graph.vertex_ids() {
                let fixes_all = (0..=10).all(|len| {
                    sys.graph
                        .paths_from(w, len, 2)
                        .iter()
                        .all(|p| sys.act_on_path(h, p) == *p)
                });
                let in_fixpoint = sys.trivially_acting_pairs(&all).contains(&(h, w));
                assert_eq!(fixes_all, in_fixpoint);
            }
        }
    }

    #[test]
    fn redundant_generator_presentations_collapse() {
        // h is g written through g's name; bisimulation merges them.
        let graph = corpus::two_loops_graph();
        let g = corpus::generator(
            &graph,
            "g",
            &[],
            &[("a", "b"), ("b", "a")],
            &[("a", corpus::letter(0)), ("b", corpus::letter(0))],
        );
        let h = corpus::generator(
            &graph,
            "h",
            &[],
            &[("a", "b"), ("b", "a")],
            &[("a", corpus::letter(0)), ("b", corpus::letter(0))],
        );
        let sys = close_group(&graph, &[g, h], 100).unwrap();
        assert_eq!(sys.group.size(), 2);
        assert_eq!(sys.group.generator_ids()[0], sys.group.generator_ids()[1]);
    }

    #[test]
    fn cyclic_rotation_closure_sizes() {
        for p in 2..=7usize {
            let sys = corpus::cycle_rotation(p);
            assert_eq!(sys.group.size(), p);
        }
    }

    #[test]
    fn symmetric_group_closure() {
        // Transposition and 3-cycle on three loops generate S₃.
        let graph = crate::graph::Graph::build(&crate::graph::GraphSpec {
            vertices: vec!["v".into()],
            edges: vec![
                ("x".into(), "v".into(), "v".into(), Multiplicity::One),
                ("y".into(), "v".into(), "v".into(), Multiplicity::One),
                ("z".into(), "v".into(), "v".into(), Multiplicity::One),
            ],
        })
        .unwrap();
        let t = corpus::generator(
            &graph,
            "t",
            &[],
            &[("x", "y"), ("y", "x")],
            &[
                ("x", corpus::letter(0)),
                ("y", corpus::letter(0)),
                ("z", corpus::letter(0)),
            ],
        );
        let c = corpus::generator(
            &graph,
            "c",
            &[],
            &[("x", "y"), ("y", "z"), ("z", "x")],
            &[
                ("x", corpus::letter(1)),
                ("y", corpus::letter(1)),
                ("z", corpus::letter(1)),
            ],
        );
        let sys = close_group(&graph, &[t, c], 100).unwrap();
        assert_eq!(sys.group.size(), 6);
        let gt = sys.group.generator_ids()[0];
        let gc = sys.group.generator_ids()[1];
        // tc ≠ ct in S₃
        assert_ne!(sys.group.mul(gt, gc), sys.group.mul(gc, gt));
        assert_eq!(sys.group.mul(gc, sys.group.mul(gc, gc)), sys.group.identity());
    }

    #[test]
    fn cocycle_law_holds_exhaustively() {
        let sys = corpus::nonconstant_restriction_system();
        let gr = &sys.group;
        for g in gr.elem_ids() {
            for h in gr.elem_ids() {
                let gh = gr.mul(g, h);
                for e in 0..sys.graph.num_edges() {
                    let he = gr.act_edge_raw(h, e);
                    assert_eq!(
                        gr.restrict_raw(gh, e),
                        gr.mul(gr.restrict_raw(g, he), gr.restrict_raw(h, e))
                    );
                }
            }
        }
    }
}
