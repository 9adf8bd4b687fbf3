//! Finite-state transducers `(Q, 𝗂, 𝗈, 𝖿)` with initial, transition and final outputs.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::automata::{AutomatonError, Dfa, Nfa, StateNames};
use crate::guard::{Guard, ResourceError};
use crate::words::{Alphabet, Symbol, Word, WordError};
use crate::WordFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransducerError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("output word {word:?} uses symbols outside the output alphabet")]
    OutputAlphabet { word: Word },
    #[error("transducer is not sequential")]
    NotSequential,
    #[error("transducer {which} is not functional: {word:?} has outputs {outputs:?}")]
    NotFunctional { which: usize, word: Word, outputs: Vec<Word> },
    #[error("input alphabets differ")]
    AlphabetMismatch,
    #[error(transparent)]
    Resource(#[from] ResourceError),
}

/// A transducer whose underlying automaton is `(Q, dom 𝗂, dom 𝗈, dom 𝖿)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fst {
    states: StateNames,
    input: Alphabet,
    output: Alphabet,
    init: BTreeMap<usize, Word>,
    /// `(from, symbol index, to) ↦ output`.
    trans: BTreeMap<(usize, usize, usize), Word>,
    fin: BTreeMap<usize, Word>,
}

impl Fst {
    pub fn new(
        states: StateNames,
        input: Alphabet,
        output: Alphabet,
        init: BTreeMap<usize, Word>,
        trans: BTreeMap<(usize, usize, usize), Word>,
        fin: BTreeMap<usize, Word>,
    ) -> Result<Self, TransducerError> {
        let check_out = |w: &Word| {
            if w.iter().all(|s| output.contains(s)) {
                Ok(())
            } else {
                Err(TransducerError::OutputAlphabet { word: w.clone() })
            }
        };
        for (&q, w) in init.iter().chain(fin.iter()) {
            if q >= states.len() {
                return Err(AutomatonError::StateOutOfRange(q).into());
            }
            check_out(w)?;
        }
        for (&(p, s, q), w) in &trans {
            if p >= states.len() || q >= states.len() {
                return Err(AutomatonError::StateOutOfRange(p.max(q)).into());
            }
            if s >= input.len() {
                return Err(AutomatonError::SymbolOutOfRange(s).into());
            }
            check_out(w)?;
        }
        Ok(Fst { states, input, output, init, trans, fin })
    }

    /// Builds a transducer from names; output words are space-separated tokens.
    pub fn from_names(
        states: &[&str],
        input: Alphabet,
        output: Alphabet,
        init: &[(&str, &str)],
        trans: &[(&str, &str, &str, &str)],
        fin: &[(&str, &str)],
    ) -> Result<Self, TransducerError> {
        let names = StateNames::new(states.iter().copied())?;
        let mut i = BTreeMap::new();
        for (q, w) in init {
            i.insert(names.id(q)?, Word::parse(w)?);
        }
        let mut t = BTreeMap::new();
        for (p, s, q, w) in trans {
            let sym = Symbol::new(s)?;
            let si = input.index_of(&sym).ok_or(WordError::UnknownSymbol(sym))?;
            t.insert((names.id(p)?, si, names.id(q)?), Word::parse(w)?);
        }
        let mut f = BTreeMap::new();
        for (q, w) in fin {
            f.insert(names.id(q)?, Word::parse(w)?);
        }
        Fst::new(names, input, output, i, t, f)
    }

    pub fn states(&self) -> &StateNames {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn init_out(&self) -> &BTreeMap<usize, Word> {
        &self.init
    }

    pub fn trans_out(&self) -> &BTreeMap<(usize, usize, usize), Word> {
        &self.trans
    }

    pub fn final_out(&self) -> &BTreeMap<usize, Word> {
        &self.fin
    }

    pub fn underlying(&self) -> Nfa {
        Nfa::new(
            self.states.clone(),
            self.input.clone(),
            self.init.keys().copied().collect(),
            self.fin.keys().copied().collect(),
            self.trans.keys().copied().collect(),
        )
        .expect("validated on construction")
    }

    pub fn is_sequential(&self) -> bool {
        self.underlying().is_deterministic()
    }

    pub fn is_cosequential(&self) -> bool {
        self.underlying().is_codeterministic()
    }

    /// All outputs of accepting runs, with the default guard.
    pub fn eval(&self, w: &Word) -> Result<BTreeSet<Word>, ResourceError> {
        self.eval_guarded(w, &Guard::default())
    }

    /// Breadth-first run enumeration; configurations are merged per state.
    ///
    /// Words with symbols outside the input alphabet have no runs.
    pub fn eval_guarded(&self, w: &Word, guard: &Guard) -> Result<BTreeSet<Word>, ResourceError> {
        let Ok(idx) = self.input.encode(w) else {
            return Ok(BTreeSet::new());
        };
        let mut cur: BTreeMap<usize, BTreeSet<Word>> = BTreeMap::new();
        for (&q, out) in &self.init {
            cur.entry(q).or_default().insert(out.clone());
        }
        for s in idx {
            let mut next: BTreeMap<usize, BTreeSet<Word>> = BTreeMap::new();
            let mut count = 0usize;
            for (&p, outs) in &cur {
                for (&(_, _, q), o) in self.trans.range((p, s, 0)..=(p, s, usize::MAX)) {
                    let slot = next.entry(q).or_default();
                    for prefix in outs {
                        if slot.insert(prefix.concat(o)) {
                            count += 1;
                        }
                    }
                }
            }
            if count > guard.runs {
                return Err(ResourceError { what: "transducer configurations", limit: guard.runs });
            }
            if next.is_empty() {
                return Ok(BTreeSet::new());
            }
            cur = next;
        }
        let mut result = BTreeSet::new();
        for (q, outs) in cur {
            if let Some(f) = self.fin.get(&q) {
                result.extend(outs.into_iter().map(|o| o.concat(f)));
            }
        }
        Ok(result)
    }

    /// The unique transition of a sequential transducer from `q` on symbol index `s`.
    pub fn seq_step(&self, q: usize, s: usize) -> Option<(usize, &Word)> {
        self.trans
            .range((q, s, 0)..=(q, s, usize::MAX))
            .next()
            .map(|(&(_, _, t), o)| (t, o))
    }

    /// `q ⊢ w`: the concatenated transition outputs along the run from `q`.
    pub fn production(&self, q: usize, w: &Word) -> Result<Option<Word>, TransducerError> {
        if !self.is_sequential() {
            return Err(TransducerError::NotSequential);
        }
        let idx = self.input.encode(w)?;
        Ok(self.production_idx(q, &idx))
    }

    pub(crate) fn production_idx(&self, q: usize, idx: &[usize]) -> Option<Word> {
        let mut state = q;
        let mut out = Word::empty();
        for &s in idx {
            let (t, o) = self.seq_step(state, s)?;
            out.extend_from(o);
            state = t;
        }
        Some(out)
    }

    /// Reverses transitions and swaps initial and final outputs; labels are kept.
    pub fn mirror(&self) -> Fst {
        Fst {
            states: self.states.clone(),
            input: self.input.clone(),
            output: self.output.clone(),
            init: self.fin.clone(),
            trans: self.trans.iter().map(|(&(p, s, q), o)| ((q, s, p), o.clone())).collect(),
            fin: self.init.clone(),
        }
    }

    /// The mirror with every output word reversed, realizing `w ↦ T(wᴿ)ᴿ`.
    pub fn reverse(&self) -> Fst {
        let rev = |m: &BTreeMap<usize, Word>| m.iter().map(|(&q, o)| (q, o.reversed())).collect();
        Fst {
            states: self.states.clone(),
            input: self.input.clone(),
            output: self.output.clone(),
            init: rev(&self.fin),
            trans: self.trans.iter().map(|(&(p, s, q), o)| ((q, s, p), o.reversed())).collect(),
            fin: rev(&self.init),
        }
    }

    /// Sequential view: underlying DFA plus dense output tables.
    pub fn as_sequential(&self) -> Result<SeqTransducer, TransducerError> {
        let dfa = self.underlying().to_dfa().map_err(|_| TransducerError::NotSequential)?;
        let n = self.num_states();
        let mut step_out = vec![vec![None; self.input.len()]; n];
        for (&(p, s, _), o) in &self.trans {
            step_out[p][s] = Some(o.clone());
        }
        let final_out = (0..n).map(|q| self.fin.get(&q).cloned()).collect();
        let init_out = self.init.get(&dfa.initial()).cloned().unwrap_or_default();
        Ok(SeqTransducer { dfa, output: self.output.clone(), init_out, step_out, final_out })
    }
}

impl WordFunction for Fst {
    /// The least output, which is the only one for functional transducers.
    fn apply(&self, w: &Word) -> Option<Word> {
        self.eval(w).ok().and_then(|s| s.into_iter().next())
    }
}

/// A sequential transducer as a DFA with dense output tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqTransducer {
    pub dfa: Dfa,
    pub output: Alphabet,
    pub init_out: Word,
    /// `step_out[q][s]` is defined exactly when `δ(q, s)` is.
    pub step_out: Vec<Vec<Option<Word>>>,
    pub final_out: Vec<Option<Word>>,
}

impl SeqTransducer {
    pub fn eval_idx(&self, idx: &[usize]) -> Option<Word> {
        let mut q = self.dfa.initial();
        let mut out = self.init_out.clone();
        for &s in idx {
            out.extend_from(self.step_out[q][s].as_ref()?);
            q = self.dfa.step(q, s)?;
        }
        let f = self.final_out[q].as_ref()?;
        out.extend_from(f);
        Some(out)
    }

    /// Every transition outputs exactly one symbol.
    pub fn is_letter_to_letter(&self) -> bool {
        self.step_out.iter().flatten().flatten().all(|o| o.len() == 1)
    }

    /// States from which some final state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let n = self.dfa.num_states();
        let mut co: Vec<bool> = (0..n).map(|q| self.final_out[q].is_some()).collect();
        loop {
            let mut changed = false;
            for p in 0..n {
                if !co[p] && self.dfa.table()[p].iter().flatten().any(|&q| co[q]) {
                    co[p] = true;
                    changed = true;
                }
            }
            if !changed {
                return co;
            }
        }
    }

    /// Drops the transitions into states that cannot reach a final state.
    /// The realized function is unchanged.
    pub fn trim(&self) -> SeqTransducer {
        let co = self.coaccessible();
        let mut delta = self.dfa.table().to_vec();
        let mut step_out = self.step_out.clone();
        for (p, row) in delta.iter_mut().enumerate() {
            for (s, t) in row.iter_mut().enumerate() {
                if t.is_some_and(|q| !co[q]) {
                    *t = None;
                    step_out[p][s] = None;
                }
            }
        }
        let dfa = Dfa::new(
            self.dfa.states().clone(),
            self.dfa.alphabet().clone(),
            self.dfa.initial(),
            self.dfa.finals().clone(),
            delta,
        )
        .expect("same shape");
        SeqTransducer { dfa, output: self.output.clone(), init_out: self.init_out.clone(), step_out, final_out: self.final_out.clone() }
    }

    pub fn to_fst(&self) -> Fst {
        let mut trans = BTreeMap::new();
        for (p, row) in self.step_out.iter().enumerate() {
            for (s, o) in row.iter().enumerate() {
                if let (Some(o), Some(q)) = (o, self.dfa.step(p, s)) {
                    trans.insert((p, s, q), o.clone());
                }
            }
        }
        let fin = self
            .final_out
            .iter()
            .enumerate()
            .filter_map(|(q, o)| o.clone().map(|o| (q, o)))
            .collect();
        Fst::new(
            self.dfa.states().clone(),
            self.dfa.alphabet().clone(),
            self.output.clone(),
            BTreeMap::from([(self.dfa.initial(), self.init_out.clone())]),
            trans,
            fin,
        )
        .expect("consistent tables")
    }
}

impl WordFunction for SeqTransducer {
    fn apply(&self, w: &Word) -> Option<Word> {
        self.eval_idx(&self.dfa.alphabet().encode(w).ok()?)
    }
}

/// What [`check_equal_on_domain_bounded`] compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceMode {
    /// Only words in `dom(t1)` count; `t2` must agree there.
    AgreeOnDomain,
    /// Equality as partial functions, domains included.
    Equal,
}

/// The shortest word of length at most `max_len` on which the transducers disagree.
pub fn check_equal_on_domain_bounded(
    t1: &Fst,
    t2: &Fst,
    max_len: usize,
    mode: EquivalenceMode,
) -> Result<Option<Word>, TransducerError> {
    if t1.input_alphabet() != t2.input_alphabet() {
        return Err(TransducerError::AlphabetMismatch);
    }
    let single = |which: usize, w: &Word, outs: BTreeSet<Word>| -> Result<Option<Word>, TransducerError> {
        if outs.len() > 1 {
            return Err(TransducerError::NotFunctional { which, word: w.clone(), outputs: outs.into_iter().collect() });
        }
        Ok(outs.into_iter().next())
    };
    for w in t1.input_alphabet().words_up_to(max_len) {
        let a = single(1, &w, t1.eval(&w)?)?;
        let b = single(2, &w, t2.eval(&w)?)?;
        let differ = match mode {
            EquivalenceMode::Equal => a != b,
            EquivalenceMode::AgreeOnDomain => a.is_some() && a != b,
        };
        if differ {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Finds a word of length at most `max_len` with two distinct outputs.
pub fn functionality_witness(t: &Fst, max_len: usize) -> Result<Option<(Word, Vec<Word>)>, ResourceError> {
    for w in t.input_alphabet().words_up_to(max_len) {
        let outs = t.eval(&w)?;
        if outs.len() > 1 {
            return Ok(Some((w, outs.into_iter().collect())));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(s: &str) -> Word {
        Word::letters(s)
    }

    #[test]
    fn last_letter_eval() {
        let t = fixtures::last_letter_fst();
        assert_eq!(t.eval(&w("aab")).unwrap(), BTreeSet::from([w("bbb")]));
        assert_eq!(t.eval(&Word::empty()).unwrap(), BTreeSet::from([Word::empty()]));
        assert_eq!(t.eval(&w("ba")).unwrap(), BTreeSet::from([w("aa")]));
        assert!(t.is_cosequential());
        assert!(!t.is_sequential());
    }

    #[test]
    fn production_basics() {
        let t = fixtures::identity_fst(&Alphabet::letters("ab"));
        assert_eq!(t.production(0, &Word::empty()).unwrap(), Some(Word::empty()));
        assert_eq!(t.production(0, &w("ab")).unwrap(), Some(w("ab")));
        let partial = Fst::from_names(&["p"], Alphabet::letters("ab"), Alphabet::letters("x"), &[("p", "")], &[("p", "a", "p", "x")], &[("p", "")]).unwrap();
        assert_eq!(partial.production(0, &w("b")).unwrap(), None);
        assert_eq!(partial.production(0, &w("aa")).unwrap(), Some(Word::parse("x x").unwrap()));
    }

    #[test]
    fn bounded_equivalence() {
        let t = fixtures::last_letter_fst();
        assert_eq!(check_equal_on_domain_bounded(&t, &t, 6, EquivalenceMode::Equal).unwrap(), None);
        let id = fixtures::identity_fst(&Alphabet::letters("ab"));
        assert_eq!(check_equal_on_domain_bounded(&t, &id, 2, EquivalenceMode::Equal).unwrap(), Some(w("ab")));
    }

    #[test]
    fn non_functional_is_reported() {
        let t = Fst::from_names(
            &["p", "q"],
            Alphabet::letters("a"),
            Alphabet::letters("xy"),
            &[("p", ""), ("q", "")],
            &[("p", "a", "p", "x"), ("q", "a", "q", "y")],
            &[("p", ""), ("q", "")],
        )
        .unwrap();
        let err = check_equal_on_domain_bounded(&t, &t, 2, EquivalenceMode::Equal).unwrap_err();
        assert!(matches!(err, TransducerError::NotFunctional { which: 1, .. }));
        assert!(functionality_witness(&t, 2).unwrap().is_some());
    }

    #[test]
    fn reverse_realizes_mirrored_function() {
        let t = fixtures::last_letter_fst();
        let r = t.reverse();
        for u in Alphabet::letters("ab").words_up_to(5) {
            let expect = t.apply(&u.reversed()).map(|o| o.reversed());
            assert_eq!(r.apply(&u), expect);
        }
        assert!(r.is_sequential());
    }

    #[test]
    fn guard_caps_configurations() {
        let t = Fst::from_names(
            &["p"],
            Alphabet::letters("a"),
            Alphabet::letters("xy"),
            &[("p", "")],
            &[("p", "a", "p", "x")],
            &[("p", "")],
        )
        .unwrap();
        let tight = Guard { runs: 0, ..Guard::default() };
        assert!(t.eval_guarded(&w("a"), &tight).is_err());
    }
}
