//! Precongruences, the subset expansion, the minimal refinement problem and
//! its equivalence with the extension of sequential transducers.
//!
//! Relations are stored as one bitmask per state, so base automata have at
//! most 64 states.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::automata::{AutomatonError, Dfa, Nfa, StateNames};
use crate::guard::{Guard, ResourceError};
use crate::transducers::{Fst, SeqTransducer, TransducerError};
use crate::words::{Alphabet, Symbol, Word, WordError};

pub const MAX_STATES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefinementError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Transducer(#[from] TransducerError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("{states} states exceed the supported maximum of {MAX_STATES}")]
    TooManyStates { states: usize },
    #[error("relation is not transition-closed: {p} ≈ {q} but not after {symbol}")]
    NotClosed { p: String, q: String, symbol: Symbol },
    #[error("transition from {state} on {symbol} does not output exactly one symbol")]
    NotLetterToLetter { state: String, symbol: Symbol },
    #[error("transducer is neither letter-to-letter nor has a prefix-closed domain")]
    NotApplicable,
    #[error("automaton is not finer than the compatibility relation: {u:?} and {v:?} reach the same state")]
    NotFiner { u: Word, v: Word },
}

/// A reflexive, symmetric, transition-closed relation on the states of a complete DFA.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precongruence {
    dfa: Dfa,
    compat: Vec<u64>,
}

fn bit(q: usize) -> u64 {
    1u64 << q
}

fn members(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let q = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            q
        })
    })
}

impl Precongruence {
    /// Validates `pairs` (plus reflexivity and symmetry) against transition closure.
    pub fn new(dfa: Dfa, pairs: &[(usize, usize)]) -> Result<Self, RefinementError> {
        let n = dfa.num_states();
        if n > MAX_STATES {
            return Err(RefinementError::TooManyStates { states: n });
        }
        let mut compat: Vec<u64> = (0..n).map(bit).collect();
        for &(p, q) in pairs {
            for s in [p, q] {
                if s >= n {
                    return Err(AutomatonError::StateOutOfRange(s).into());
                }
            }
            compat[p] |= bit(q);
            compat[q] |= bit(p);
        }
        Precongruence::from_masks(dfa, compat)
    }

    pub fn from_names(dfa: Dfa, pairs: &[(&str, &str)]) -> Result<Self, RefinementError> {
        let ids = pairs
            .iter()
            .map(|(p, q)| Ok((dfa.states().id(p)?, dfa.states().id(q)?)))
            .collect::<Result<Vec<_>, AutomatonError>>()?;
        Precongruence::new(dfa, &ids)
    }

    pub fn identity(dfa: Dfa) -> Result<Self, RefinementError> {
        Precongruence::new(dfa, &[])
    }

    /// Every pair compatible.
    pub fn total(dfa: Dfa) -> Result<Self, RefinementError> {
        let n = dfa.num_states();
        let pairs: Vec<_> = (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).collect();
        Precongruence::new(dfa, &pairs)
    }

    fn from_masks(dfa: Dfa, compat: Vec<u64>) -> Result<Self, RefinementError> {
        dfa.check_complete()?;
        let n = dfa.num_states();
        if n > MAX_STATES {
            return Err(RefinementError::TooManyStates { states: n });
        }
        for p in 0..n {
            for q in p..n {
                if compat[p] & bit(q) == 0 {
                    continue;
                }
                for s in 0..dfa.alphabet().len() {
                    let (p1, q1) = (dfa.step(p, s).expect("complete"), dfa.step(q, s).expect("complete"));
                    if compat[p1] & bit(q1) == 0 {
                        return Err(RefinementError::NotClosed {
                            p: dfa.states().name(p).to_string(),
                            q: dfa.states().name(q).to_string(),
                            symbol: dfa.alphabet().symbol(s).clone(),
                        });
                    }
                }
            }
        }
        Ok(Precongruence { dfa, compat })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn num_states(&self) -> usize {
        self.dfa.num_states()
    }

    pub fn compatible(&self, p: usize, q: usize) -> bool {
        self.compat[p] & bit(q) != 0
    }

    /// Compatible pairs `p < q`.
    pub fn compatible_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.num_states();
        (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).filter(|&(p, q)| self.compatible(p, q)).collect()
    }

    /// Incompatible pairs `p < q`.
    pub fn incompatible_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.num_states();
        (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).filter(|&(p, q)| !self.compatible(p, q)).collect()
    }

    pub fn is_clique(&self, mask: u64) -> bool {
        members(mask).all(|q| mask & !self.compat[q] == 0)
    }

    /// `u ≈ v` iff `q0·u ≈ q0·v`.
    pub fn relates_words(&self, u: &Word, v: &Word) -> Result<bool, RefinementError> {
        let p = self.dfa.run(u)?.expect("complete");
        let q = self.dfa.run(v)?.expect("complete");
        Ok(self.compatible(p, q))
    }

    /// `{p·σ : p ∈ mask}`.
    fn image(&self, mask: u64, s: usize) -> u64 {
        members(mask).fold(0, |acc, p| acc | bit(self.dfa.step(p, s).expect("complete")))
    }

    /// The largest transition-closed set of states compatible with every state.
    ///
    /// Adding such states to a clique never breaks it, so transitions whose
    /// image lies inside this set are unconstrained.
    fn dont_care(&self) -> u64 {
        let n = self.num_states();
        let all = if n == 64 { u64::MAX } else { bit(n) - 1 };
        let mut set: u64 = (0..n).filter(|&q| self.compat[q] == all).fold(0, |a, q| a | bit(q));
        loop {
            let next = members(set)
                .filter(|&q| (0..self.dfa.alphabet().len()).all(|s| self.image(bit(q), s) & !set == 0))
                .fold(0, |a, q| a | bit(q));
            if next == set {
                return set;
            }
            set = next;
        }
    }

    /// All nonempty cliques containing `required`, generated on demand.
    pub fn cliques_extending(&self, required: u64) -> Vec<u64> {
        let mut out = Vec::new();
        if !self.is_clique(required) {
            return out;
        }
        let n = self.num_states();
        let all = if n == 64 { u64::MAX } else { bit(n) - 1 };
        let cands = members(required).fold(all, |acc, q| acc & self.compat[q]) & !required;
        self.extend_cliques(required, cands, &mut out);
        out.retain(|&c| c != 0);
        out
    }

    fn extend_cliques(&self, cur: u64, mut cands: u64, out: &mut Vec<u64>) {
        out.push(cur);
        while cands != 0 {
            let v = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            self.extend_cliques(cur | bit(v), cands & self.compat[v], out);
        }
    }

    /// `{p,q}` style label built from base state names.
    pub fn clique_label(&self, mask: u64) -> String {
        let names: Vec<&str> = members(mask).map(|q| self.dfa.states().name(q)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Two words reaching the same state of `b` but incompatible states of the base.
    pub fn finer_witness(&self, b: &Dfa) -> Result<Option<(Word, Word)>, RefinementError> {
        if b.alphabet() != self.dfa.alphabet() {
            return Err(AutomatonError::AlphabetMismatch {
                left: Box::new(b.alphabet().clone()),
                right: Box::new(self.dfa.alphabet().clone()),
            }
            .into());
        }
        b.check_complete()?;
        let sigma = self.dfa.alphabet().len();
        let mut access: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut by_b: Vec<Vec<usize>> = vec![Vec::new(); b.num_states()];
        let start = (b.initial(), self.dfa.initial());
        access.insert(start, Vec::new());
        let mut queue = VecDeque::from([start]);
        while let Some((p, q)) = queue.pop_front() {
            if let Some(&other) = by_b[p].iter().find(|&&o| !self.compatible(o, q)) {
                let u = self.dfa.alphabet().decode(&access[&(p, other)]);
                let v = self.dfa.alphabet().decode(&access[&(p, q)]);
                return Ok(Some((u, v)));
            }
            by_b[p].push(q);
            for s in 0..sigma {
                let next = (b.step(p, s).expect("complete"), self.dfa.step(q, s).expect("complete"));
                if !access.contains_key(&next) {
                    let mut w = access[&(p, q)].clone();
                    w.push(s);
                    access.insert(next, w);
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    /// Whether `≡_b` is finer than `≈`: every state of `b` is reached only by
    /// words leading to pairwise compatible base states.
    pub fn is_finer(&self, b: &Dfa) -> Result<bool, RefinementError> {
        Ok(self.finer_witness(b)?.is_none())
    }
}

/// The NFA of pairwise-compatible subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetExpansion {
    /// Clique of base states for each NFA state.
    pub cliques: Vec<u64>,
    pub nfa: Nfa,
}

/// Builds the full expansion: initial states contain `q0`, every state is
/// final, and `(P, σ, Q)` is a transition whenever `P·σ ⊆ Q`.
pub fn subset_expansion(pc: &Precongruence) -> SubsetExpansion {
    let mut cliques = pc.cliques_extending(0);
    cliques.sort_by_key(|c| (c.count_ones(), c.reverse_bits()));
    let index: BTreeMap<u64, usize> = cliques.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let names = StateNames::new(cliques.iter().map(|&c| pc.clique_label(c))).expect("distinct labels");
    let mut transitions = BTreeSet::new();
    for (i, &c) in cliques.iter().enumerate() {
        for s in 0..pc.dfa.alphabet().len() {
            let img = pc.image(c, s);
            for t in pc.cliques_extending(img) {
                transitions.insert((i, s, index[&t]));
            }
        }
    }
    let q0 = pc.dfa.initial();
    let initials = cliques.iter().enumerate().filter(|(_, &c)| c & bit(q0) != 0).map(|(i, _)| i).collect();
    let finals = (0..cliques.len()).collect();
    let nfa = Nfa::new(names, pc.dfa.alphabet().clone(), initials, finals, transitions).expect("consistent");
    SubsetExpansion { cliques, nfa }
}

fn labelled_dfa(pc: &Precongruence, labels: &[u64], table: Vec<Vec<Option<usize>>>) -> Dfa {
    let mut names = StateNames::default();
    for &l in labels {
        names.push_fresh(&pc.clique_label(l));
    }
    let finals = (0..labels.len()).collect();
    Dfa::new(names, pc.dfa.alphabet().clone(), 0, finals, table).expect("consistent")
}

/// Every complete deterministic subautomaton of the expansion with at most
/// `k` reachable states, each listed once. States are named by their cliques.
pub fn enumerate_finer_dfas(pc: &Precongruence, k: usize) -> Vec<Dfa> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let sigma = pc.dfa.alphabet().len();
    for init in pc.cliques_extending(bit(pc.dfa.initial())) {
        let mut chosen = vec![init];
        let mut table = vec![vec![None; sigma]];
        enumerate_rec(pc, k, &mut chosen, &mut table, &mut out);
    }
    out
}

fn enumerate_rec(pc: &Precongruence, k: usize, chosen: &mut Vec<u64>, table: &mut Vec<Vec<Option<usize>>>, out: &mut Vec<Dfa>) {
    let sigma = pc.dfa.alphabet().len();
    let next = table.iter().enumerate().find_map(|(i, row)| row.iter().position(Option::is_none).map(|s| (i, s)));
    let Some((i, s)) = next else {
        out.push(labelled_dfa(pc, chosen, table.clone()));
        return;
    };
    let img = pc.image(chosen[i], s);
    for j in 0..chosen.len() {
        if chosen[j] & img == img {
            table[i][s] = Some(j);
            enumerate_rec(pc, k, chosen, table, out);
        }
    }
    if chosen.len() < k {
        for c in pc.cliques_extending(img) {
            if chosen.contains(&c) {
                continue;
            }
            table[i][s] = Some(chosen.len());
            chosen.push(c);
            table.push(vec![None; sigma]);
            enumerate_rec(pc, k, chosen, table, out);
            table.pop();
            chosen.pop();
        }
    }
    table[i][s] = None;
}

/// Result of [`minimal_refinement`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalRefinement {
    pub k_min: usize,
    /// Every minimal solution up to renaming; transitions whose target does
    /// not matter are drawn as self-loops.
    pub witnesses: Vec<Dfa>,
}

/// Backtracking over DFAs whose states carry the set of base states they
/// represent. Sets only grow, so a non-clique prunes the branch for good.
struct ReachSearch<'a> {
    pc: &'a Precongruence,
    k: usize,
    dont_care: u64,
    nodes: usize,
    limit: usize,
    all: bool,
    found: Vec<(Vec<Vec<Option<usize>>>, Vec<u64>)>,
}

impl ReachSearch<'_> {
    fn propagate(&self, table: &[Vec<Option<usize>>], reach: &mut [u64], start: usize) -> bool {
        let mut work = vec![start];
        while let Some(p) = work.pop() {
            for (s, t) in table[p].iter().enumerate() {
                let Some(t) = *t else { continue };
                let grown = reach[t] | self.pc.image(reach[p], s);
                if grown != reach[t] {
                    if !self.pc.is_clique(grown) {
                        return false;
                    }
                    reach[t] = grown;
                    work.push(t);
                }
            }
        }
        true
    }

    fn next_item(&self, table: &[Vec<Option<usize>>], reach: &[u64]) -> Option<(usize, usize)> {
        table.iter().enumerate().find_map(|(p, row)| {
            row.iter()
                .enumerate()
                .find(|&(s, t)| t.is_none() && self.pc.image(reach[p], s) & !self.dont_care != 0)
                .map(|(s, _)| (p, s))
        })
    }

    /// Returns `true` when the search should stop.
    fn run(&mut self, table: Vec<Vec<Option<usize>>>, reach: Vec<u64>) -> Result<bool, ResourceError> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(ResourceError { what: "refinement search nodes", limit: self.limit });
        }
        let Some((p, s)) = self.next_item(&table, &reach) else {
            self.found.push((table, reach));
            return Ok(!self.all);
        };
        let sigma = self.pc.dfa.alphabet().len();
        let count = table.len();
        let img = self.pc.image(reach[p], s);
        for t in 0..=count.min(self.k.saturating_sub(1)) {
            let (mut table, mut reach) = (table.clone(), reach.clone());
            if t == count {
                table.push(vec![None; sigma]);
                reach.push(0);
            }
            table[p][s] = Some(t);
            let grown = reach[t] | img;
            if !self.pc.is_clique(grown) {
                continue;
            }
            reach[t] = grown;
            if !self.propagate(&table, &mut reach, t) {
                continue;
            }
            if self.run(table, reach)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn solve(pc: &Precongruence, k: usize, all: bool, guard: &Guard) -> Result<Vec<Dfa>, ResourceError> {
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut search =
            ReachSearch { pc, k, dont_care: pc.dont_care(), nodes: 0, limit: guard.search_nodes, all, found: Vec::new() };
        let sigma = pc.dfa.alphabet().len();
        search.run(vec![vec![None; sigma]], vec![bit(pc.dfa.initial())])?;
        Ok(search
            .found
            .into_iter()
            .map(|(table, reach)| {
                let table = table
                    .into_iter()
                    .enumerate()
                    .map(|(p, row)| row.into_iter().map(|t| Some(t.unwrap_or(p))).collect())
                    .collect();
                let labels: Vec<u64> =
                    reach.iter().map(|&r| if r & !search.dont_care != 0 { r & !search.dont_care } else { r }).collect();
                labelled_dfa(pc, &labels, table)
            })
            .collect())
    }
}

/// Some DFA with at most `k` states finer than `≈`, if one exists.
pub fn find_refinement(pc: &Precongruence, k: usize, guard: &Guard) -> Result<Option<Dfa>, ResourceError> {
    Ok(ReachSearch::solve(pc, k, false, guard)?.into_iter().next())
}

/// The least number of states of a DFA finer than `≈`, with all minimal solutions.
pub fn minimal_refinement(pc: &Precongruence) -> MinimalRefinement {
    minimal_refinement_guarded(pc, &Guard::unlimited()).expect("unlimited guard")
}

pub fn minimal_refinement_guarded(pc: &Precongruence, guard: &Guard) -> Result<MinimalRefinement, ResourceError> {
    for k in 1.. {
        let witnesses = ReachSearch::solve(pc, k, true, guard)?;
        if !witnesses.is_empty() {
            return Ok(MinimalRefinement { k_min: k, witnesses });
        }
    }
    unreachable!("the base automaton is always a solution")
}

/// Exhaustive oracle: tries every complete transition table with at most `k`
/// states and returns the first automaton finer than `≈`.
pub fn brute_force_refinement(pc: &Precongruence, k: usize, guard: &Guard) -> Result<Option<Dfa>, RefinementError> {
    let sigma = pc.dfa.alphabet().len();
    if k > guard.brute_states {
        return Err(ResourceError { what: "brute-force states", limit: guard.brute_states }.into());
    }
    if sigma > guard.brute_letters {
        return Err(ResourceError { what: "brute-force letters", limit: guard.brute_letters }.into());
    }
    for m in 1..=k {
        let mut flat = vec![0usize; m * sigma];
        loop {
            if table_is_finer(pc, m, &flat) {
                let table = flat.chunks(sigma).map(|row| row.iter().map(|&t| Some(t)).collect()).collect();
                return Ok(Some(Dfa::from_table(pc.dfa.alphabet().clone(), 0, 0..m, table)?));
            }
            let mut i = 0;
            while i < flat.len() && flat[i] + 1 == m {
                flat[i] = 0;
                i += 1;
            }
            if i == flat.len() {
                break;
            }
            flat[i] += 1;
        }
    }
    Ok(None)
}

/// Product exploration from `(0, q0)`, collecting base states per candidate state.
fn table_is_finer(pc: &Precongruence, m: usize, flat: &[usize]) -> bool {
    let sigma = pc.dfa.alphabet().len();
    let n = pc.num_states();
    let mut seen = vec![false; m * n];
    let mut sets = vec![0u64; m];
    let mut stack = vec![(0usize, pc.dfa.initial())];
    seen[pc.dfa.initial()] = true;
    while let Some((p, q)) = stack.pop() {
        sets[p] |= bit(q);
        for s in 0..sigma {
            let (p1, q1) = (flat[p * sigma + s], pc.dfa.step(q, s).expect("complete"));
            if !seen[p1 * n + q1] {
                seen[p1 * n + q1] = true;
                stack.push((p1, q1));
            }
        }
    }
    sets.iter().all(|&s| pc.is_clique(s))
}

/// `p ≈ q` iff `p ⊢ w = q ⊢ w` for every `w` on which both productions are
/// defined, and the final outputs agree where both states are final.
///
/// The base is the underlying automaton completed with a sink, which is
/// compatible with every state. Transitions into states that cannot reach a
/// final state are dropped first, since runs through them never matter.
pub fn compatibility(t: &SeqTransducer) -> Result<Precongruence, RefinementError> {
    let t = &t.trim();
    let dfa = t.dfa.complete_with_sink("sink");
    let n = dfa.num_states();
    if n > MAX_STATES {
        return Err(RefinementError::TooManyStates { states: n });
    }
    let sigma = dfa.alphabet().len();
    let out = |q: usize, s: usize| t.step_out.get(q).and_then(|row| row[s].as_ref());
    let fin = |q: usize| t.final_out.get(q).and_then(Option::as_ref);
    let mut compat = vec![0u64; n];
    for p in 0..n {
        for q in 0..n {
            let finals_agree = match (fin(p), fin(q)) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            };
            let steps_agree = (0..sigma).all(|s| match (out(p, s), out(q, s)) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            });
            if finals_agree && steps_agree {
                compat[p] |= bit(q);
            }
        }
    }
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in 0..n {
                if compat[p] & bit(q) == 0 {
                    continue;
                }
                let broken = (0..sigma).any(|s| {
                    let (p1, q1) = (dfa.step(p, s).expect("complete"), dfa.step(q, s).expect("complete"));
                    compat[p1] & bit(q1) == 0
                });
                if broken {
                    compat[p] &= !bit(q);
                    compat[q] &= !bit(p);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Precongruence::from_masks(dfa, compat)
}

fn check_letter_to_letter(t: &SeqTransducer) -> Result<(), RefinementError> {
    for (q, row) in t.step_out.iter().enumerate() {
        for (s, o) in row.iter().enumerate() {
            if o.as_ref().is_some_and(|o| o.len() != 1) {
                return Err(RefinementError::NotLetterToLetter {
                    state: t.dfa.states().name(q).to_string(),
                    symbol: t.dfa.alphabet().symbol(s).clone(),
                });
            }
        }
    }
    Ok(())
}

/// The compatibility relation of a sequential letter-to-letter transducer.
pub fn compat_letter_to_letter(t: &Fst) -> Result<Precongruence, RefinementError> {
    let seq = t.as_sequential()?;
    check_letter_to_letter(&seq)?;
    compatibility(&seq)
}

/// Why the extension problem of a transducer reduces to minimal refinement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionClass {
    LetterToLetter,
    /// Every nonempty prefix of a word in the domain is in the domain.
    PrefixClosed,
}

/// Classifies a sequential transducer, or `None` if neither condition holds.
pub fn extension_class(t: &SeqTransducer) -> Option<ExtensionClass> {
    if check_letter_to_letter(t).is_ok() {
        return Some(ExtensionClass::LetterToLetter);
    }
    let dfa = &t.dfa;
    let reachable = dfa.reachable();
    let n = dfa.num_states();
    let mut coreach: Vec<bool> = (0..n).map(|q| dfa.is_final(q) && t.final_out[q].is_some()).collect();
    loop {
        let mut changed = false;
        for p in 0..n {
            if !coreach[p] && dfa.table()[p].iter().flatten().any(|&q| coreach[q]) {
                coreach[p] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut nonempty_prefix_states = BTreeSet::new();
    for &p in &reachable {
        for q in dfa.table()[p].iter().flatten() {
            nonempty_prefix_states.insert(*q);
        }
    }
    let closed = nonempty_prefix_states
        .into_iter()
        .filter(|&q| coreach[q])
        .all(|q| dfa.is_final(q) && t.final_out[q].is_some());
    closed.then_some(ExtensionClass::PrefixClosed)
}

/// A minimal refinement instance derived from an extension instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementInstance {
    pub precongruence: Precongruence,
    pub k: usize,
    pub class: ExtensionClass,
}

/// Forward reduction: the completed underlying automaton with the compatibility relation.
pub fn extension_to_refinement(t: &Fst, k: usize) -> Result<RefinementInstance, RefinementError> {
    let seq = t.as_sequential()?;
    let class = extension_class(&seq).ok_or(RefinementError::NotApplicable)?;
    Ok(RefinementInstance { precongruence: compatibility(&seq)?, k, class })
}

/// Reverse reduction: the base automaton outputting its input, with a fresh
/// letter per incompatible pair looping on both states and printing the state name.
pub fn refinement_to_extension(pc: &Precongruence) -> Fst {
    let dfa = pc.dfa();
    let sigma = dfa.alphabet();
    let mut input: Vec<Symbol> = sigma.symbols().to_vec();
    let mut fresh = Vec::new();
    for (p, q) in pc.incompatible_pairs() {
        let mut name = format!("sigma[{},{}]", dfa.states().name(p), dfa.states().name(q));
        while input.iter().any(|s| s.as_str() == name) {
            name.push('\'');
        }
        let sym = Symbol::new(&name).expect("state names have no whitespace");
        fresh.push((input.len(), p, q));
        input.push(sym);
    }
    let input = Alphabet::new(input).expect("fresh letters are distinct");
    let state_syms: Vec<Symbol> =
        dfa.states().names().iter().map(|n| Symbol::new(n).expect("state names have no whitespace")).collect();
    let output = sigma.union(&Alphabet::collect(&[Word::from_symbols(state_syms.clone())]));
    let mut trans = BTreeMap::new();
    for p in 0..dfa.num_states() {
        for s in 0..sigma.len() {
            let q = dfa.step(p, s).expect("complete");
            trans.insert((p, s, q), Word::from_symbols(vec![sigma.symbol(s).clone()]));
        }
    }
    for (letter, p, q) in fresh {
        trans.insert((p, letter, p), Word::from_symbols(vec![state_syms[p].clone()]));
        trans.insert((q, letter, q), Word::from_symbols(vec![state_syms[q].clone()]));
    }
    let fin = dfa.finals().iter().map(|&q| (q, Word::empty())).collect();
    Fst::new(
        dfa.states().clone(),
        input,
        output,
        BTreeMap::from([(dfa.initial(), Word::empty())]),
        trans,
        fin,
    )
    .expect("consistent by construction")
}

/// Output used where the original transducer is undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputDefault {
    /// Output the letter read.
    #[default]
    Sigma,
    Epsilon,
}

/// Transfers the outputs of `t` onto `b` through representatives.
///
/// The result is total and agrees with `t` on its domain. Fails with two
/// words reaching the same state of `b` on which `t` produces different
/// outputs.
pub fn extend_sequential(t: &SeqTransducer, b: &Dfa, default: OutputDefault) -> Result<SeqTransducer, RefinementError> {
    if b.alphabet() != t.dfa.alphabet() {
        return Err(AutomatonError::AlphabetMismatch { left: Box::new(b.alphabet().clone()), right: Box::new(t.dfa.alphabet().clone()) }.into());
    }
    b.check_complete()?;
    let t = &t.trim();
    let sigma = b.alphabet();
    let nb = b.num_states();
    let mut step_out: Vec<Vec<Option<(Word, Vec<usize>)>>> = vec![vec![None; sigma.len()]; nb];
    let mut final_out: Vec<Option<(Word, Vec<usize>)>> = vec![None; nb];
    let mut access: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let start = (b.initial(), t.dfa.initial());
    access.insert(start, Vec::new());
    let mut queue = VecDeque::from([start]);
    let conflict = |u: &[usize], v: &[usize]| RefinementError::NotFiner { u: sigma.decode(u), v: sigma.decode(v) };
    while let Some((p, q)) = queue.pop_front() {
        let u = access[&(p, q)].clone();
        if let Some(f) = &t.final_out[q] {
            match &final_out[p] {
                Some((g, v)) if g != f => return Err(conflict(v, &u)),
                Some(_) => {}
                None => final_out[p] = Some((f.clone(), u.clone())),
            }
        }
        for s in 0..sigma.len() {
            let (Some(o), Some(q1)) = (&t.step_out[q][s], t.dfa.step(q, s)) else { continue };
            match &step_out[p][s] {
                Some((g, v)) if g != o => return Err(conflict(v, &u)),
                Some(_) => {}
                None => step_out[p][s] = Some((o.clone(), u.clone())),
            }
            let next = (b.step(p, s).expect("complete"), q1);
            if !access.contains_key(&next) {
                let mut w = u.clone();
                w.push(s);
                access.insert(next, w);
                queue.push_back(next);
            }
        }
    }
    let output = match default {
        OutputDefault::Sigma => t.output.union(sigma),
        OutputDefault::Epsilon => t.output.clone(),
    };
    let step_out = step_out
        .into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .map(|(s, o)| {
                    Some(o.map(|(w, _)| w).unwrap_or_else(|| match default {
                        OutputDefault::Sigma => Word::from_symbols(vec![sigma.symbol(s).clone()]),
                        OutputDefault::Epsilon => Word::empty(),
                    }))
                })
                .collect()
        })
        .collect();
    let final_out = final_out.into_iter().map(|f| Some(f.map(|(w, _)| w).unwrap_or_default())).collect();
    let dfa = Dfa::new(b.states().clone(), sigma.clone(), b.initial(), (0..nb).collect(), b.table().to_vec())?;
    Ok(SeqTransducer { dfa, output, init_out: t.init_out.clone(), step_out, final_out })
}

/// [`extend_sequential`] on transducer values.
pub fn build_extended_transducer(t: &Fst, b: &Dfa, default: OutputDefault) -> Result<Fst, RefinementError> {
    Ok(extend_sequential(&t.as_sequential()?, b, default)?.to_fst())
}
