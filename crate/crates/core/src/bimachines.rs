//! Bimachines and asynchronous bimachines.
//!
//! A bimachine reads its input with a deterministic left automaton and a
//! codeterministic right automaton at once; the output at each position
//! depends on the left state before the letter and the right state after it.
//! The right automaton of an asynchronous bimachine reads the input annotated
//! with the left run, i.e. words over `L × Σ`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::automata::{AutomatonError, Dfa, Nfa, StateNames};
use crate::transducers::Fst;
use crate::words::{Alphabet, Symbol, Word, WordError};
use crate::WordFunction;

/// Name of the end-of-word marker inside pair symbols.
pub const END_MARKER: &str = "<end>";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BimachineError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("left and right automata read different alphabets")]
    AlphabetMismatch,
    #[error("right automaton is not codeterministic with a single final state")]
    NotCodeterministic,
    #[error("ω({l}, {symbol}, {r}) is missing although both automaton steps exist")]
    MissingOmega { l: String, symbol: Symbol, r: String },
    #[error("output function entry {0} is outside its domain")]
    StrayOutput(String),
    #[error("word {0:?} uses symbols outside the output alphabet")]
    OutputAlphabet(Word),
    #[error("right state {0:?} must be initial")]
    NotInitial(String),
    #[error("({l},{symbol})·{r} is undefined although {l}·{symbol} is defined")]
    MissingRightStep { l: String, symbol: Symbol, r: String },
}

/// The symbol `(l,σ)` of the annotated alphabet.
pub fn pair_symbol(l: &str, sigma: &str) -> Symbol {
    Symbol::new(&format!("({l},{sigma})")).expect("state names and symbols are tokens")
}

/// Splits `(l,σ)` back into its parts.
pub fn split_pair(s: &Symbol) -> Option<(&str, &str)> {
    let inner = s.as_str().strip_prefix('(')?.strip_suffix(')')?;
    inner.rsplit_once(',')
}

fn check_output(output: &Alphabet, w: &Word) -> Result<(), BimachineError> {
    if w.iter().all(|s| output.contains(s)) {
        Ok(())
    } else {
        Err(BimachineError::OutputAlphabet(w.clone()))
    }
}

/// Which automaton recognizes the domain of the realized function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainSides {
    pub left: bool,
    pub right: bool,
}

/// `(𝓛, 𝓡, λ, ω, ρ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimachine {
    left: Dfa,
    right: Nfa,
    output: Alphabet,
    lambda: BTreeMap<usize, Word>,
    /// `(l, symbol, r) ↦ ω(l, σ, r)`, where `r` is the right state after `σ`.
    omega: BTreeMap<(usize, usize, usize), Word>,
    rho: BTreeMap<usize, Word>,
    /// `back[r][s] = σ ·_𝓡 r`.
    back: Vec<Vec<Option<usize>>>,
    r_final: usize,
    sides: DomainSides,
}

impl Bimachine {
    pub fn new(
        left: Dfa,
        right: Nfa,
        output: Alphabet,
        lambda: BTreeMap<usize, Word>,
        omega: BTreeMap<(usize, usize, usize), Word>,
        rho: BTreeMap<usize, Word>,
    ) -> Result<Self, BimachineError> {
        if left.alphabet() != right.alphabet() {
            return Err(BimachineError::AlphabetMismatch);
        }
        if !right.is_codeterministic() {
            return Err(BimachineError::NotCodeterministic);
        }
        let r_final = *right.finals().iter().next().expect("one final state");
        let nr = right.num_states();
        let sigma = left.alphabet().len();
        let mut back = vec![vec![None; sigma]; nr];
        for &(p, s, q) in right.transitions() {
            back[q][s] = Some(p);
        }
        for (r, w) in &lambda {
            if !right.initials().contains(r) {
                return Err(BimachineError::StrayOutput(format!("λ({})", right.states().name(*r))));
            }
            check_output(&output, w)?;
        }
        for (l, w) in &rho {
            if !left.is_final(*l) {
                return Err(BimachineError::StrayOutput(format!("ρ({})", left.states().name(*l))));
            }
            check_output(&output, w)?;
        }
        for (&(l, s, r), w) in &omega {
            if l >= left.num_states() || s >= sigma || r >= nr {
                return Err(BimachineError::StrayOutput("ω".into()));
            }
            check_output(&output, w)?;
        }
        for l in 0..left.num_states() {
            for s in 0..sigma {
                if left.step(l, s).is_none() {
                    continue;
                }
                for r in 0..nr {
                    if back[r][s].is_some() && !omega.contains_key(&(l, s, r)) {
                        return Err(BimachineError::MissingOmega {
                            l: left.states().name(l).to_string(),
                            symbol: left.alphabet().symbol(s).clone(),
                            r: right.states().name(r).to_string(),
                        });
                    }
                }
            }
        }
        let mut b = Bimachine {
            left,
            right,
            output,
            lambda,
            omega,
            rho,
            back,
            r_final,
            sides: DomainSides { left: false, right: false },
        };
        b.sides = b.compute_domain_sides();
        Ok(b)
    }

    pub fn left(&self) -> &Dfa {
        &self.left
    }

    pub fn right(&self) -> &Nfa {
        &self.right
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        self.left.alphabet()
    }

    pub fn lambda(&self) -> &BTreeMap<usize, Word> {
        &self.lambda
    }

    pub fn omega(&self) -> &BTreeMap<(usize, usize, usize), Word> {
        &self.omega
    }

    pub fn rho(&self) -> &BTreeMap<usize, Word> {
        &self.rho
    }

    pub fn r_final(&self) -> usize {
        self.r_final
    }

    /// `σ ·_𝓡 r`.
    pub fn right_step(&self, s: usize, r: usize) -> Option<usize> {
        self.back[r][s]
    }

    pub fn domain_sides(&self) -> DomainSides {
        self.sides
    }

    /// `w ·_𝓡 r`, reading `w` from right to left.
    pub fn right_run_idx(&self, idx: &[usize], r: usize) -> Option<usize> {
        idx.iter().rev().try_fold(r, |r, &s| self.back[r][s])
    }

    /// `ω(l, u, r)`, extended to words by `ω(l, uv, r) = ω(l, u, v·r)·ω(l·u, v, r)`.
    pub fn omega_extend(&self, l: usize, u: &Word, r: usize) -> Option<Word> {
        let idx = self.left.alphabet().encode(u).ok()?;
        self.omega_extend_idx(l, &idx, r)
    }

    fn omega_extend_idx(&self, l: usize, idx: &[usize], r: usize) -> Option<Word> {
        let n = idx.len();
        let mut rights = vec![0; n + 1];
        rights[n] = r;
        for i in (1..n).rev() {
            rights[i] = self.back[rights[i + 1]][idx[i]]?;
        }
        let mut out = Word::empty();
        let mut cur = l;
        for i in 0..n {
            out.extend_from(self.omega.get(&(cur, idx[i], rights[i + 1]))?);
            if i + 1 < n {
                cur = self.left.step(cur, idx[i])?;
            }
        }
        Some(out)
    }

    /// `λ(w·r_f) ω(l_i, w, r_f) ρ(l_i·w)`.
    pub fn eval(&self, w: &Word) -> Option<Word> {
        let idx = self.left.alphabet().encode(w).ok()?;
        self.eval_idx(&idx)
    }

    pub fn eval_idx(&self, idx: &[usize]) -> Option<Word> {
        let l_end = self.left.run_from(self.left.initial(), idx)?;
        let rho = self.rho.get(&l_end)?;
        let r0 = self.right_run_idx(idx, self.r_final)?;
        let lambda = self.lambda.get(&r0)?;
        let mid = self.omega_extend_idx(self.left.initial(), idx, self.r_final)?;
        Some(lambda.concat(&mid).concat(rho))
    }

    /// Decides exactly whether `L(𝓛)` and `L(𝓡)` equal the domain.
    ///
    /// The left check runs the left DFA forward alongside the set of right
    /// states that are still consistent with defined outputs; the right check
    /// is the mirror image.
    fn compute_domain_sides(&self) -> DomainSides {
        let nl = self.left.num_states();
        let nr = self.right.num_states();
        let sigma = self.left.alphabet().len();

        let start: BTreeSet<usize> = self.lambda.keys().copied().collect();
        let mut seen = BTreeSet::new();
        let mut stack = vec![(self.left.initial(), start)];
        let mut left_ok = true;
        while let Some((l, set)) = stack.pop() {
            if !seen.insert((l, set.clone())) {
                continue;
            }
            if self.left.is_final(l) && (!self.rho.contains_key(&l) || !set.contains(&self.r_final)) {
                left_ok = false;
                break;
            }
            for s in 0..sigma {
                let Some(l2) = self.left.step(l, s) else { continue };
                let next: BTreeSet<usize> = (0..nr)
                    .filter(|&r2| {
                        self.back[r2][s].is_some_and(|r1| set.contains(&r1)) && self.omega.contains_key(&(l, s, r2))
                    })
                    .collect();
                stack.push((l2, next));
            }
        }

        let start: BTreeSet<usize> = self.rho.keys().copied().collect();
        let mut seen = BTreeSet::new();
        let mut stack = vec![(self.r_final, start)];
        let mut right_ok = true;
        while let Some((r, set)) = stack.pop() {
            if !seen.insert((r, set.clone())) {
                continue;
            }
            if self.right.initials().contains(&r) && (!self.lambda.contains_key(&r) || !set.contains(&self.left.initial())) {
                right_ok = false;
                break;
            }
            for s in 0..sigma {
                let Some(r1) = self.back[r][s] else { continue };
                let next: BTreeSet<usize> = (0..nl)
                    .filter(|&l| {
                        self.left.step(l, s).is_some_and(|l2| set.contains(&l2)) && self.omega.contains_key(&(l, s, r))
                    })
                    .collect();
                stack.push((r1, next));
            }
        }
        DomainSides { left: left_ok, right: right_ok }
    }
}

impl WordFunction for Bimachine {
    fn apply(&self, w: &Word) -> Option<Word> {
        self.eval(w)
    }
}

/// An asynchronous bimachine; the right automaton reads `L × Σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsyncBimachine {
    left: Dfa,
    right_states: StateNames,
    right_initials: BTreeSet<usize>,
    r_final: usize,
    /// `back[l][s][r] = (l, σ) ·_𝓡 r`.
    back: Vec<Vec<Vec<Option<usize>>>>,
    output: Alphabet,
    lambda: BTreeMap<usize, Word>,
    /// `(l, s, r) ↦ ω(r', (l, σ), r)` with `r' = (l, σ)·r`.
    omega: BTreeMap<(usize, usize, usize), Word>,
    rho: BTreeMap<usize, Word>,
}

impl AsyncBimachine {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        left: Dfa,
        right_states: StateNames,
        right_initials: BTreeSet<usize>,
        r_final: usize,
        back: Vec<Vec<Vec<Option<usize>>>>,
        output: Alphabet,
        lambda: BTreeMap<usize, Word>,
        omega: BTreeMap<(usize, usize, usize), Word>,
        rho: BTreeMap<usize, Word>,
    ) -> Result<Self, BimachineError> {
        let nl = left.num_states();
        let nr = right_states.len();
        let sigma = left.alphabet().len();
        if r_final >= nr {
            return Err(AutomatonError::StateOutOfRange(r_final).into());
        }
        if back.len() != nl
            || back.iter().any(|row| row.len() != sigma || row.iter().any(|col| col.len() != nr))
        {
            return Err(AutomatonError::StateOutOfRange(back.len()).into());
        }
        for r in back.iter().flatten().flatten().flatten() {
            if *r >= nr {
                return Err(AutomatonError::StateOutOfRange(*r).into());
            }
        }
        for (r, w) in &lambda {
            if !right_initials.contains(r) {
                return Err(BimachineError::StrayOutput(format!("λ({})", right_states.name(*r))));
            }
            check_output(&output, w)?;
        }
        for (l, w) in &rho {
            if !left.is_final(*l) {
                return Err(BimachineError::StrayOutput(format!("ρ({})", left.states().name(*l))));
            }
            check_output(&output, w)?;
        }
        for (&(l, s, r), w) in &omega {
            if l >= nl || s >= sigma || r >= nr || back[l][s][r].is_none() {
                return Err(BimachineError::StrayOutput("ω".into()));
            }
            check_output(&output, w)?;
        }
        Ok(AsyncBimachine { left, right_states, right_initials, r_final, back, output, lambda, omega, rho })
    }

    pub fn left(&self) -> &Dfa {
        &self.left
    }

    pub fn right_states(&self) -> &StateNames {
        &self.right_states
    }

    pub fn right_initials(&self) -> &BTreeSet<usize> {
        &self.right_initials
    }

    pub fn r_final(&self) -> usize {
        self.r_final
    }

    pub fn right_step(&self, l: usize, s: usize, r: usize) -> Option<usize> {
        self.back[l][s][r]
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        self.left.alphabet()
    }

    pub fn lambda(&self) -> &BTreeMap<usize, Word> {
        &self.lambda
    }

    pub fn omega(&self) -> &BTreeMap<(usize, usize, usize), Word> {
        &self.omega
    }

    pub fn rho(&self) -> &BTreeMap<usize, Word> {
        &self.rho
    }

    /// Pair symbols `(l,σ)` for every defined `l·σ`, in `(l, σ)` order.
    pub fn pair_alphabet(&self) -> Alphabet {
        let mut syms = Vec::new();
        for l in 0..self.left.num_states() {
            for s in 0..self.left.alphabet().len() {
                if self.left.step(l, s).is_some() {
                    syms.push(pair_symbol(self.left.states().name(l), self.left.alphabet().symbol(s).as_str()));
                }
            }
        }
        Alphabet::new(syms).expect("pairs are distinct")
    }

    /// The right automaton as an NFA over the pair alphabet.
    pub fn right_nfa(&self) -> Nfa {
        let pairs = self.pair_alphabet();
        let mut transitions = BTreeSet::new();
        for l in 0..self.left.num_states() {
            for s in 0..self.left.alphabet().len() {
                let sym = pair_symbol(self.left.states().name(l), self.left.alphabet().symbol(s).as_str());
                let Some(si) = pairs.index_of(&sym) else { continue };
                for r in 0..self.right_states.len() {
                    if let Some(r1) = self.back[l][s][r] {
                        transitions.insert((r1, si, r));
                    }
                }
            }
        }
        Nfa::new(
            self.right_states.clone(),
            pairs,
            self.right_initials.clone(),
            BTreeSet::from([self.r_final]),
            transitions,
        )
        .expect("consistent by construction")
    }

    /// The first `(l, σ, r)` breaking the convention that every right state is
    /// initial and `(l,σ)·r` exists whenever `l·σ` does.
    pub fn check_convention(&self) -> Result<(), BimachineError> {
        for r in 0..self.right_states.len() {
            if !self.right_initials.contains(&r) {
                return Err(BimachineError::NotInitial(self.right_states.name(r).to_string()));
            }
        }
        for l in 0..self.left.num_states() {
            for s in 0..self.left.alphabet().len() {
                if self.left.step(l, s).is_none() {
                    continue;
                }
                for r in 0..self.right_states.len() {
                    if self.back[l][s][r].is_none() {
                        return Err(BimachineError::MissingRightStep {
                            l: self.left.states().name(l).to_string(),
                            symbol: self.left.alphabet().symbol(s).clone(),
                            r: self.right_states.name(r).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// `λ(r_0) ∏ ω(r_{j−1}, (l_{j−1}, a_j), r_j) ρ(l_n)`.
    pub fn eval(&self, w: &Word) -> Option<Word> {
        let idx = self.left.alphabet().encode(w).ok()?;
        self.eval_idx(&idx)
    }

    pub fn eval_idx(&self, idx: &[usize]) -> Option<Word> {
        let n = idx.len();
        let mut lefts = Vec::with_capacity(n + 1);
        lefts.push(self.left.initial());
        for &s in idx {
            lefts.push(self.left.step(*lefts.last().expect("nonempty"), s)?);
        }
        let rho = self.rho.get(&lefts[n])?;
        let mut rights = vec![0; n + 1];
        rights[n] = self.r_final;
        for j in (1..=n).rev() {
            rights[j - 1] = self.back[lefts[j - 1]][idx[j - 1]][rights[j]]?;
        }
        if !self.right_initials.contains(&rights[0]) {
            return None;
        }
        let mut out = self.lambda.get(&rights[0])?.clone();
        for j in 1..=n {
            out.extend_from(self.omega.get(&(lefts[j - 1], idx[j - 1], rights[j]))?);
        }
        out.extend_from(rho);
        Some(out)
    }

    /// `(T_𝓛, T_𝓡)` with `⟦𝓑⟧ = ⟦T_𝓡⟧ ∘ ⟦T_𝓛⟧`.
    ///
    /// `T_𝓛` annotates the input with left states and appends `(l_n,<end>)`;
    /// `T_𝓡` is cosequential and emits `ρ(l)` on the marker.
    pub fn decompose(&self) -> Result<(Fst, Fst), BimachineError> {
        self.check_convention()?;
        let sigma = self.left.alphabet();
        let lnames = self.left.states();
        let mut syms = self.pair_alphabet().symbols().to_vec();
        let mut end_syms = BTreeMap::new();
        for &l in self.left.finals() {
            let sym = pair_symbol(lnames.name(l), END_MARKER);
            end_syms.insert(l, syms.len());
            syms.push(sym);
        }
        let annotated = Alphabet::new(syms)?;
        let pair_index = |l: usize, s: usize| {
            annotated
                .index_of(&pair_symbol(lnames.name(l), sigma.symbol(s).as_str()))
                .expect("pair exists")
        };

        let mut t_trans = BTreeMap::new();
        for l in 0..self.left.num_states() {
            for s in 0..sigma.len() {
                if let Some(l2) = self.left.step(l, s) {
                    t_trans.insert((l, s, l2), Word::from_symbols(vec![annotated.symbol(pair_index(l, s)).clone()]));
                }
            }
        }
        let t_fin = end_syms
            .iter()
            .map(|(&l, &i)| (l, Word::from_symbols(vec![annotated.symbol(i).clone()])))
            .collect();
        let t_left = Fst::new(
            lnames.clone(),
            sigma.clone(),
            annotated.clone(),
            BTreeMap::from([(self.left.initial(), Word::empty())]),
            t_trans,
            t_fin,
        )
        .map_err(|_| BimachineError::AlphabetMismatch)?;

        let mut r_trans = BTreeMap::new();
        for (&(l, s, r), w) in &self.omega {
            let r1 = self.back[l][s][r].expect("validated");
            r_trans.insert((r1, pair_index(l, s), r), w.clone());
        }
        for (&l, &i) in &end_syms {
            if let Some(w) = self.rho.get(&l) {
                r_trans.insert((self.r_final, i, self.r_final), w.clone());
            }
        }
        let r_init = self.lambda.clone();
        let t_right = Fst::new(
            self.right_states.clone(),
            annotated,
            self.output.clone(),
            r_init,
            r_trans,
            BTreeMap::from([(self.r_final, Word::empty())]),
        )
        .map_err(|_| BimachineError::AlphabetMismatch)?;
        Ok((t_left, t_right))
    }
}

impl WordFunction for AsyncBimachine {
    fn apply(&self, w: &Word) -> Option<Word> {
        self.eval(w)
    }
}

/// `eval_bimachine` under its operational name.
pub fn eval_bimachine(b: &Bimachine, w: &Word) -> Option<Word> {
    b.eval(w)
}

pub fn eval_async(b: &AsyncBimachine, w: &Word) -> Option<Word> {
    b.eval(w)
}

pub fn decompose_async(b: &AsyncBimachine) -> Result<(Fst, Fst), BimachineError> {
    b.decompose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(s: &str) -> Word {
        Word::letters(s)
    }

    #[test]
    fn swap_eval() {
        let b = fixtures::swap_bimachine();
        assert_eq!(b.eval(&w("abab")), Some(w("bbaa")));
        assert_eq!(b.eval(&w("a")), Some(w("a")));
        assert_eq!(b.eval(&Word::empty()), Some(Word::empty()));
        assert_eq!(b.domain_sides(), DomainSides { left: true, right: true });
    }

    #[test]
    fn omega_extension() {
        let b = fixtures::swap_bimachine();
        let li = b.left().initial();
        let rf = b.r_final();
        assert_eq!(b.omega_extend(li, &Word::empty(), rf), Some(Word::empty()));
        assert_eq!(b.omega_extend(li, &w("ab"), rf), Some(w("ba")));
        let ra = b.right().states().id("r_a").unwrap();
        assert_eq!(b.omega_extend(li, &w("b"), ra), Some(w("a")));
    }

    #[test]
    fn async_swap_and_decomposition() {
        let b = fixtures::swap_async();
        assert_eq!(b.eval(&w("abab")), Some(w("bbaa")));
        let (tl, tr) = b.decompose().unwrap();
        assert!(tl.is_sequential());
        assert!(tr.is_cosequential());
        let ann = tl.eval(&w("ab")).unwrap().into_iter().next().unwrap();
        assert_eq!(ann.to_string(), "(l_i,a) (l_a,b) (l_a,<end>)");
        assert_eq!(tr.eval(&ann).unwrap().into_iter().next(), Some(w("ba")));
        let empty = tl.eval(&Word::empty()).unwrap().into_iter().next().unwrap();
        assert_eq!(empty.to_string(), "(l_i,<end>)");
    }

    #[test]
    fn empty_word_async_uses_lambda_and_rho() {
        let b = fixtures::swap_async();
        assert_eq!(b.eval(&Word::empty()), Some(Word::empty()));
    }

    #[test]
    fn pair_symbols_round_trip() {
        let s = pair_symbol("l_a", "b");
        assert_eq!(split_pair(&s), Some(("l_a", "b")));
        assert_eq!(split_pair(&Symbol::from_static("a")), None);
    }

    #[test]
    fn domain_sides_detect_partial_right() {
        // Right automaton accepts only words ending in a; left accepts everything.
        let sigma = Alphabet::letters("ab");
        let left = Dfa::from_names(&["l"], sigma.clone(), "l", &["l"], &[("l", "a", "l"), ("l", "b", "l")]).unwrap();
        let right = Nfa::from_names(&["r", "f"], sigma.clone(), &["r"], &["f"], &[("r", "a", "f"), ("r", "a", "r"), ("r", "b", "r")]).unwrap();
        let omega = [(0, 0, 1), (0, 0, 0), (0, 1, 0)].into_iter().map(|k| (k, Word::empty())).collect();
        let b = Bimachine::new(left, right, sigma, BTreeMap::from([(0, Word::empty())]), omega, BTreeMap::from([(0, Word::empty())])).unwrap();
        assert_eq!(b.domain_sides(), DomainSides { left: false, right: true });
        assert_eq!(b.eval(&w("ab")), None);
        assert_eq!(b.eval(&w("ba")), Some(Word::empty()));
    }
}
