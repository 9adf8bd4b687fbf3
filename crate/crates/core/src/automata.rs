//! Finite automata over symbol alphabets.
//!
//! States are opaque names backed by dense indices. [`Dfa`] allows partial
//! transition functions; completeness is a checked property, not an
//! assumption.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::words::{Alphabet, Symbol, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("state name must be a non-empty token without whitespace, got {0:?}")]
    BadStateName(String),
    #[error("duplicate state {0:?}")]
    DuplicateState(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("symbol index {0} out of range")]
    SymbolOutOfRange(usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("two transitions from {state:?} on {symbol}")]
    NonDeterministic { state: String, symbol: Symbol },
    #[error("automaton has no states")]
    NoStates,
    #[error("automaton is not complete: no transition from {state:?} on {symbol}")]
    Incomplete { state: String, symbol: Symbol },
    #[error("alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Box<Alphabet>, right: Box<Alphabet> },
    #[error("automaton needs exactly one initial state, found {0}")]
    InitialCount(usize),
}

/// Ordered, duplicate-free state names with a reverse index.
///
/// Names are whitespace-free tokens, like symbols, so that derived symbols
/// such as `(l,a)` stay valid.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct StateNames {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl StateNames {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, AutomatonError> {
        let mut out = StateNames::default();
        for n in names {
            out.push(n.into())?;
        }
        Ok(out)
    }

    /// `q0, q1, …, q{n-1}`.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        StateNames::new((0..n).map(|i| format!("{prefix}{i}"))).expect("distinct by construction")
    }

    pub fn push(&mut self, name: String) -> Result<usize, AutomatonError> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(AutomatonError::BadStateName(name));
        }
        if self.index.contains_key(&name) {
            return Err(AutomatonError::DuplicateState(name));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    /// Adds `base`, or `base'`, `base''`, … if taken.
    pub fn push_fresh(&mut self, base: &str) -> usize {
        let mut name = base.to_string();
        while self.index.contains_key(&name) {
            name.push('\'');
        }
        self.push(name).expect("fresh name")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Result<usize, AutomatonError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| AutomatonError::UnknownState(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn check(&self, i: usize) -> Result<(), AutomatonError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(AutomatonError::StateOutOfRange(i))
        }
    }
}

impl fmt::Debug for StateNames {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

fn check_symbol(alphabet: &Alphabet, s: usize) -> Result<(), AutomatonError> {
    if s < alphabet.len() {
        Ok(())
    } else {
        Err(AutomatonError::SymbolOutOfRange(s))
    }
}

/// A nondeterministic automaton `(Q, I, Δ, F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    states: StateNames,
    alphabet: Alphabet,
    initials: BTreeSet<usize>,
    finals: BTreeSet<usize>,
    /// `(from, symbol index, to)`.
    transitions: BTreeSet<(usize, usize, usize)>,
}

impl Nfa {
    pub fn new(
        states: StateNames,
        alphabet: Alphabet,
        initials: BTreeSet<usize>,
        finals: BTreeSet<usize>,
        transitions: BTreeSet<(usize, usize, usize)>,
    ) -> Result<Self, AutomatonError> {
        for &q in initials.iter().chain(finals.iter()) {
            states.check(q)?;
        }
        for &(p, s, q) in &transitions {
            states.check(p)?;
            states.check(q)?;
            check_symbol(&alphabet, s)?;
        }
        Ok(Nfa { states, alphabet, initials, finals, transitions })
    }

    /// Builds an automaton from state names and named transitions.
    pub fn from_names(
        states: &[&str],
        alphabet: Alphabet,
        initials: &[&str],
        finals: &[&str],
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self, AutomatonError> {
        let names = StateNames::new(states.iter().copied())?;
        let ids = |xs: &[&str]| -> Result<BTreeSet<usize>, AutomatonError> {
            xs.iter().map(|n| names.id(n)).collect()
        };
        let initials = ids(initials)?;
        let finals = ids(finals)?;
        let mut delta = BTreeSet::new();
        for (p, s, q) in transitions {
            let sym = Symbol::new(s)?;
            let si = alphabet.index_of(&sym).ok_or(WordError::UnknownSymbol(sym))?;
            delta.insert((names.id(p)?, si, names.id(q)?));
        }
        Nfa::new(names, alphabet, initials, finals, delta)
    }

    pub fn states(&self) -> &StateNames {
        &self.states
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initials(&self) -> &BTreeSet<usize> {
        &self.initials
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn transitions(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.transitions
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Reverses every transition and swaps initial and final states.
    pub fn mirror(&self) -> Nfa {
        Nfa {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            initials: self.finals.clone(),
            finals: self.initials.clone(),
            transitions: self.transitions.iter().map(|&(p, s, q)| (q, s, p)).collect(),
        }
    }

    /// One initial state and at most one transition per (state, symbol).
    pub fn is_deterministic(&self) -> bool {
        if self.initials.len() != 1 {
            return false;
        }
        let mut seen = BTreeSet::new();
        self.transitions.iter().all(|&(p, s, _)| seen.insert((p, s)))
    }

    pub fn is_codeterministic(&self) -> bool {
        self.mirror().is_deterministic()
    }

    pub fn post(&self, set: &BTreeSet<usize>, s: usize) -> BTreeSet<usize> {
        self.transitions
            .iter()
            .filter(|&&(p, t, _)| t == s && set.contains(&p))
            .map(|&(_, _, q)| q)
            .collect()
    }

    pub fn accepts(&self, w: &Word) -> Result<bool, AutomatonError> {
        let idx = self.alphabet.encode(w)?;
        let mut cur = self.initials.clone();
        for s in idx {
            cur = self.post(&cur, s);
            if cur.is_empty() {
                return Ok(false);
            }
        }
        Ok(cur.iter().any(|q| self.finals.contains(q)))
    }

    /// Converts a deterministic automaton; fails with the first witness otherwise.
    pub fn to_dfa(&self) -> Result<Dfa, AutomatonError> {
        if self.initials.len() != 1 {
            return Err(AutomatonError::InitialCount(self.initials.len()));
        }
        let mut delta = vec![vec![None; self.alphabet.len()]; self.num_states()];
        for &(p, s, q) in &self.transitions {
            if delta[p][s].replace(q).is_some() {
                return Err(AutomatonError::NonDeterministic {
                    state: self.states.name(p).to_string(),
                    symbol: self.alphabet.symbol(s).clone(),
                });
            }
        }
        let initial = *self.initials.iter().next().expect("one initial");
        Dfa::new(self.states.clone(), self.alphabet.clone(), initial, self.finals.clone(), delta)
    }
}

/// A deterministic automaton `(Q, q0, δ, F)` with a possibly partial `δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    states: StateNames,
    alphabet: Alphabet,
    initial: usize,
    finals: BTreeSet<usize>,
    /// `delta[q][symbol index]`.
    delta: Vec<Vec<Option<usize>>>,
}

impl Dfa {
    pub fn new(
        states: StateNames,
        alphabet: Alphabet,
        initial: usize,
        finals: BTreeSet<usize>,
        delta: Vec<Vec<Option<usize>>>,
    ) -> Result<Self, AutomatonError> {
        if states.is_empty() {
            return Err(AutomatonError::NoStates);
        }
        states.check(initial)?;
        for &q in &finals {
            states.check(q)?;
        }
        if delta.len() != states.len() {
            return Err(AutomatonError::StateOutOfRange(delta.len()));
        }
        for row in &delta {
            if row.len() != alphabet.len() {
                return Err(AutomatonError::SymbolOutOfRange(row.len()));
            }
            for q in row.iter().flatten() {
                states.check(*q)?;
            }
        }
        Ok(Dfa { states, alphabet, initial, finals, delta })
    }

    /// Builds a DFA over `q0..q{n-1}` from a dense table.
    pub fn from_table(
        alphabet: Alphabet,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        delta: Vec<Vec<Option<usize>>>,
    ) -> Result<Self, AutomatonError> {
        let states = StateNames::numbered("q", delta.len());
        Dfa::new(states, alphabet, initial, finals.into_iter().collect(), delta)
    }

    pub fn from_names(
        states: &[&str],
        alphabet: Alphabet,
        initial: &str,
        finals: &[&str],
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self, AutomatonError> {
        Nfa::from_names(states, alphabet, &[initial], finals, transitions)?.to_dfa()
    }

    pub fn states(&self) -> &StateNames {
        &self.states
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn table(&self) -> &[Vec<Option<usize>>] {
        &self.delta
    }

    pub fn step(&self, q: usize, s: usize) -> Option<usize> {
        self.delta[q][s]
    }

    pub fn run_from(&self, q: usize, symbols: &[usize]) -> Option<usize> {
        symbols.iter().try_fold(q, |p, &s| self.delta[p][s])
    }

    /// `q0 · w`, or `None` when a step is undefined.
    pub fn run(&self, w: &Word) -> Result<Option<usize>, AutomatonError> {
        let idx = self.alphabet.encode(w)?;
        Ok(self.run_from(self.initial, &idx))
    }

    pub fn accepts(&self, w: &Word) -> Result<bool, AutomatonError> {
        Ok(self.run(w)?.is_some_and(|q| self.is_final(q)))
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|row| row.iter().all(Option::is_some))
    }

    /// Fails with the first missing transition.
    pub fn check_complete(&self) -> Result<(), AutomatonError> {
        for (q, row) in self.delta.iter().enumerate() {
            if let Some(s) = row.iter().position(Option::is_none) {
                return Err(AutomatonError::Incomplete {
                    state: self.states.name(q).to_string(),
                    symbol: self.alphabet.symbol(s).clone(),
                });
            }
        }
        Ok(())
    }

    /// Adds a non-final sink state absorbing every missing transition.
    ///
    /// Complete automata are returned unchanged. The sink is always the last state.
    pub fn complete_with_sink(&self, sink: &str) -> Dfa {
        if self.is_complete() {
            return self.clone();
        }
        let mut states = self.states.clone();
        let sink_id = states.push_fresh(sink);
        let mut delta = self.delta.clone();
        delta.push(vec![Some(sink_id); self.alphabet.len()]);
        for row in delta.iter_mut() {
            for t in row.iter_mut() {
                t.get_or_insert(sink_id);
            }
        }
        Dfa { states, alphabet: self.alphabet.clone(), initial: self.initial, finals: self.finals.clone(), delta }
    }

    pub fn to_nfa(&self) -> Nfa {
        let mut transitions = BTreeSet::new();
        for (p, row) in self.delta.iter().enumerate() {
            for (s, q) in row.iter().enumerate() {
                if let Some(q) = q {
                    transitions.insert((p, s, *q));
                }
            }
        }
        Nfa {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            initials: BTreeSet::from([self.initial]),
            finals: self.finals.clone(),
            transitions,
        }
    }

    /// States reachable from the initial state, in BFS order.
    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            let p = order[i];
            i += 1;
            for q in self.delta[p].iter().flatten() {
                if !seen[*q] {
                    seen[*q] = true;
                    order.push(*q);
                }
            }
        }
        order
    }

    /// A shortest word leading from the initial state to each reachable state.
    pub fn access_words(&self) -> Vec<Option<Word>> {
        let mut out: Vec<Option<Vec<usize>>> = vec![None; self.num_states()];
        out[self.initial] = Some(Vec::new());
        let mut queue = VecDeque::from([self.initial]);
        while let Some(p) = queue.pop_front() {
            for (s, q) in self.delta[p].iter().enumerate() {
                if let Some(q) = *q {
                    if out[q].is_none() {
                        let mut w = out[p].clone().expect("visited");
                        w.push(s);
                        out[q] = Some(w);
                        queue.push_back(q);
                    }
                }
            }
        }
        out.into_iter().map(|w| w.map(|w| self.alphabet.decode(&w))).collect()
    }

    /// Reachable structure renumbered in BFS order: `(table, finals)`.
    pub fn canonical_form(&self) -> (Vec<Vec<Option<usize>>>, BTreeSet<usize>) {
        let order = self.reachable();
        let mut rank = vec![usize::MAX; self.num_states()];
        for (i, &q) in order.iter().enumerate() {
            rank[q] = i;
        }
        let table = order
            .iter()
            .map(|&q| self.delta[q].iter().map(|t| t.map(|t| rank[t])).collect())
            .collect();
        let finals = order.iter().filter(|q| self.is_final(**q)).map(|q| rank[*q]).collect();
        (table, finals)
    }

    /// Equality up to renaming of states (reachable parts and state counts).
    pub fn is_isomorphic(&self, other: &Dfa) -> bool {
        self.alphabet == other.alphabet
            && self.num_states() == other.num_states()
            && self.canonical_form() == other.canonical_form()
    }

    /// Language equality by product exploration. Alphabets must match.
    pub fn same_language(&self, other: &Dfa) -> Result<bool, AutomatonError> {
        self.same_alphabet(other)?;
        let mut seen = BTreeSet::new();
        let mut stack = vec![(Some(self.initial), Some(other.initial))];
        while let Some((p, q)) = stack.pop() {
            if !seen.insert((p, q)) {
                continue;
            }
            let fp = p.is_some_and(|p| self.is_final(p));
            let fq = q.is_some_and(|q| other.is_final(q));
            if fp != fq {
                return Ok(false);
            }
            for s in 0..self.alphabet.len() {
                let np = p.and_then(|p| self.delta[p][s]);
                let nq = q.and_then(|q| other.delta[q][s]);
                if np.is_some() || nq.is_some() {
                    stack.push((np, nq));
                }
            }
        }
        Ok(true)
    }

    fn same_alphabet(&self, other: &Dfa) -> Result<(), AutomatonError> {
        if self.alphabet != other.alphabet {
            return Err(AutomatonError::AlphabetMismatch {
                left: Box::new(self.alphabet.clone()),
                right: Box::new(other.alphabet.clone()),
            });
        }
        Ok(())
    }

    /// The mapping `q0·u ↦ q0'·u` on reachable states, if it is a function.
    ///
    /// Both automata must be complete and share their alphabet.
    pub fn refinement_map(&self, coarser: &Dfa) -> Result<Option<Vec<Option<usize>>>, AutomatonError> {
        self.same_alphabet(coarser)?;
        self.check_complete()?;
        coarser.check_complete()?;
        let mut map: Vec<Option<usize>> = vec![None; self.num_states()];
        map[self.initial] = Some(coarser.initial);
        let mut stack = vec![self.initial];
        while let Some(p) = stack.pop() {
            let img = map[p].expect("mapped");
            for s in 0..self.alphabet.len() {
                let np = self.delta[p][s].expect("complete");
                let nq = coarser.delta[img][s].expect("complete");
                match map[np] {
                    None => {
                        map[np] = Some(nq);
                        stack.push(np);
                    }
                    Some(existing) if existing != nq => return Ok(None),
                    Some(_) => {}
                }
            }
        }
        Ok(Some(map))
    }
}

/// `q0 ·_A w`; unknown symbols are an input error.
pub fn run_dfa(a: &Dfa, w: &Word) -> Result<Option<usize>, AutomatonError> {
    a.run(w)
}

pub fn mirror(a: &Nfa) -> Nfa {
    a.mirror()
}

/// Whether `≡_a` is finer than `≡_b`; both automata must be complete.
pub fn finer_than(a: &Dfa, b: &Dfa) -> Result<bool, AutomatonError> {
    Ok(a.refinement_map(b)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_letter_dfa() -> Dfa {
        Dfa::from_names(
            &["0", "1"],
            Alphabet::letters("ab"),
            "0",
            &["0", "1"],
            &[("0", "a", "0"), ("0", "b", "1"), ("1", "a", "0"), ("1", "b", "1")],
        )
        .unwrap()
    }

    fn parity() -> Dfa {
        Dfa::from_names(&["even", "odd"], Alphabet::letters("a"), "even", &["even"], &[
            ("even", "a", "odd"),
            ("odd", "a", "even"),
        ])
        .unwrap()
    }

    fn trivial(letters: &str) -> Dfa {
        let sigma = Alphabet::letters(letters);
        let n = sigma.len();
        Dfa::from_table(sigma, 0, [0], vec![vec![Some(0); n]]).unwrap()
    }

    #[test]
    fn runs() {
        let a = last_letter_dfa();
        assert_eq!(a.run(&Word::empty()).unwrap(), Some(0));
        assert_eq!(a.run(&Word::letters("ab")).unwrap(), Some(1));
        let p = parity();
        assert_eq!(p.states().name(p.run(&Word::letters("aaa")).unwrap().unwrap()), "odd");
        assert!(matches!(a.run(&Word::letters("ac")), Err(AutomatonError::Word(_))));
    }

    #[test]
    fn partial_run_is_absent() {
        let a = Dfa::from_names(&["p", "q"], Alphabet::letters("ab"), "p", &["q"], &[("p", "a", "q")]).unwrap();
        assert_eq!(a.run(&Word::letters("ab")).unwrap(), None);
        assert!(!a.is_complete());
        let c = a.complete_with_sink("sink");
        assert!(c.is_complete());
        assert_eq!(c.states().name(c.run(&Word::letters("ab")).unwrap().unwrap()), "sink");
    }

    #[test]
    fn mirror_examples() {
        let chain = Nfa::from_names(&["p", "q"], Alphabet::letters("a"), &["p"], &["q"], &[("p", "a", "q")]).unwrap();
        let m = chain.mirror();
        let expected = Nfa::from_names(&["p", "q"], Alphabet::letters("a"), &["q"], &["p"], &[("q", "a", "p")]).unwrap();
        assert_eq!(m, expected);
        assert_eq!(m.mirror(), chain);
        let loop1 = Nfa::from_names(&["s"], Alphabet::letters("a"), &["s"], &["s"], &[("s", "a", "s")]).unwrap();
        assert_eq!(loop1.mirror(), loop1);
    }

    #[test]
    fn determinism_predicates() {
        assert!(last_letter_dfa().to_nfa().is_deterministic());
        let two_init = Nfa::from_names(&["p", "q"], Alphabet::letters("a"), &["p", "q"], &[], &[]).unwrap();
        assert!(!two_init.is_deterministic());
        // Right automaton of the swap bimachine: reading backwards from r_f is deterministic.
        let right = Nfa::from_names(
            &["r_f", "r_a", "r_b"],
            Alphabet::letters("ab"),
            &["r_f", "r_a", "r_b"],
            &["r_f"],
            &[("r_a", "a", "r_f"), ("r_b", "b", "r_f"), ("r_a", "a", "r_a"), ("r_a", "b", "r_a"), ("r_b", "a", "r_b"), ("r_b", "b", "r_b")],
        )
        .unwrap();
        assert!(right.is_codeterministic());
        assert!(!right.is_deterministic());
    }

    #[test]
    fn finer_than_examples() {
        let p = parity();
        assert!(finer_than(&p, &p).unwrap());
        assert!(finer_than(&p, &trivial("a")).unwrap());
        assert!(!finer_than(&trivial("a"), &p).unwrap());
        assert!(matches!(finer_than(&p, &trivial("ab")), Err(AutomatonError::AlphabetMismatch { .. })));
    }

    #[test]
    fn isomorphism_ignores_names() {
        let a = parity();
        let b = Dfa::from_names(&["x", "y"], Alphabet::letters("a"), "x", &["x"], &[("x", "a", "y"), ("y", "a", "x")]).unwrap();
        assert!(a.is_isomorphic(&b));
        assert!(a.same_language(&b).unwrap());
        assert!(!a.same_language(&trivial("a")).unwrap());
    }

    #[test]
    fn nondeterminism_is_reported() {
        let n = Nfa::from_names(&["p", "q"], Alphabet::letters("a"), &["p"], &[], &[("p", "a", "p"), ("p", "a", "q")]).unwrap();
        assert!(matches!(n.to_dfa(), Err(AutomatonError::NonDeterministic { .. })));
    }
}
