//! Appending streaming string transducers.
//!
//! An aSST is a DFA whose transitions update write-only registers with
//! expressions `X·w`. Updates may be partial; a register left out of an update
//! becomes undefined, and reading an undefined register leaves the output
//! undefined.

mod analysis;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{AutomatonError, Dfa, StateNames};
use crate::words::{Alphabet, Symbol, Word, WordError};
use crate::WordFunction;

pub use analysis::{DomainCheck, FlowEdge, FlowGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsstError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("register index {0} out of range")]
    RegisterOutOfRange(usize),
    #[error("initial valuation has {got} entries for {expected} registers")]
    InitialValuation { expected: usize, got: usize },
    #[error("update on {state:?}/{symbol} has {got} entries for {expected} registers")]
    UpdateArity { state: String, symbol: Symbol, expected: usize, got: usize },
    #[error("word {0:?} uses symbols outside the output alphabet")]
    OutputAlphabet(Word),
    #[error("transition table has the wrong shape")]
    TableShape,
}

/// `X·w`: the contents of register `src` followed by `append`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AppendExpr {
    pub src: usize,
    pub append: Word,
}

impl AppendExpr {
    pub fn new(src: usize, append: Word) -> Self {
        AppendExpr { src, append }
    }

    /// `X·ε`.
    pub fn copy(src: usize) -> Self {
        AppendExpr { src, append: Word::empty() }
    }
}

/// A possibly partial map from registers to expressions, indexed by register.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Substitution(pub Vec<Option<AppendExpr>>);

impl Substitution {
    pub fn identity(registers: usize) -> Self {
        Substitution((0..registers).map(|x| Some(AppendExpr::copy(x))).collect())
    }

    pub fn total(exprs: Vec<AppendExpr>) -> Self {
        Substitution(exprs.into_iter().map(Some).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, x: usize) -> Option<&AppendExpr> {
        self.0.get(x).and_then(Option::as_ref)
    }

    pub fn is_total(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    /// `self ∘ inner`: `X ↦ self(Y)·w` where `inner(X) = Y·w`.
    ///
    /// With `v ∘ s` denoting one step of evaluation, `v ∘ (s ∘ s')` is
    /// `(v ∘ s) ∘ s'`.
    pub fn compose(&self, inner: &Substitution) -> Substitution {
        Substitution(
            inner
                .0
                .iter()
                .map(|e| {
                    let e = e.as_ref()?;
                    let outer = self.get(e.src)?;
                    Some(AppendExpr::new(outer.src, outer.append.concat(&e.append)))
                })
                .collect(),
        )
    }
}

/// A partial assignment of words to registers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Valuation(pub Vec<Option<Word>>);

impl Valuation {
    pub fn total(words: Vec<Word>) -> Self {
        Valuation(words.into_iter().map(Some).collect())
    }

    pub fn get(&self, x: usize) -> Option<&Word> {
        self.0.get(x).and_then(Option::as_ref)
    }

    pub fn eval(&self, e: &AppendExpr) -> Option<Word> {
        self.get(e.src).map(|v| v.concat(&e.append))
    }

    /// `v ∘ s`.
    pub fn apply(&self, s: &Substitution) -> Valuation {
        Valuation(s.0.iter().map(|e| e.as_ref().and_then(|e| self.eval(e))).collect())
    }
}

/// One transition: the target state and the register update.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub target: usize,
    pub update: Substitution,
}

/// `(Q, 𝒳, q0, v0, δˢ, δʳ, γ)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Asst {
    states: StateNames,
    registers: StateNames,
    input: Alphabet,
    output: Alphabet,
    initial: usize,
    v0: Vec<Word>,
    /// `delta[q][symbol index]`.
    delta: Vec<Vec<Option<Step>>>,
    gamma: Vec<Option<AppendExpr>>,
}

impl Asst {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        states: StateNames,
        registers: StateNames,
        input: Alphabet,
        output: Alphabet,
        initial: usize,
        v0: Vec<Word>,
        delta: Vec<Vec<Option<Step>>>,
        gamma: Vec<Option<AppendExpr>>,
    ) -> Result<Self, AsstError> {
        let n = states.len();
        let k = registers.len();
        if n == 0 {
            return Err(AutomatonError::NoStates.into());
        }
        if initial >= n {
            return Err(AutomatonError::StateOutOfRange(initial).into());
        }
        if v0.len() != k {
            return Err(AsstError::InitialValuation { expected: k, got: v0.len() });
        }
        if delta.len() != n || gamma.len() != n || delta.iter().any(|r| r.len() != input.len()) {
            return Err(AsstError::TableShape);
        }
        let check_word = |w: &Word| {
            if w.iter().all(|s| output.contains(s)) {
                Ok(())
            } else {
                Err(AsstError::OutputAlphabet(w.clone()))
            }
        };
        let check_expr = |e: &AppendExpr| {
            if e.src >= k {
                return Err(AsstError::RegisterOutOfRange(e.src));
            }
            check_word(&e.append)
        };
        for w in &v0 {
            check_word(w)?;
        }
        for (q, row) in delta.iter().enumerate() {
            for (s, step) in row.iter().enumerate() {
                let Some(step) = step else { continue };
                if step.target >= n {
                    return Err(AutomatonError::StateOutOfRange(step.target).into());
                }
                if step.update.len() != k {
                    return Err(AsstError::UpdateArity {
                        state: states.name(q).to_string(),
                        symbol: input.symbol(s).clone(),
                        expected: k,
                        got: step.update.len(),
                    });
                }
                for e in step.update.0.iter().flatten() {
                    check_expr(e)?;
                }
            }
        }
        for e in gamma.iter().flatten() {
            check_expr(e)?;
        }
        Ok(Asst { states, registers, input, output, initial, v0, delta, gamma })
    }

    pub fn states(&self) -> &StateNames {
        &self.states
    }

    pub fn registers(&self) -> &StateNames {
        &self.registers
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_registers(&self) -> usize {
        self.registers.len()
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn v0(&self) -> &[Word] {
        &self.v0
    }

    pub fn step(&self, q: usize, s: usize) -> Option<&Step> {
        self.delta[q][s].as_ref()
    }

    pub fn table(&self) -> &[Vec<Option<Step>>] {
        &self.delta
    }

    pub fn gamma(&self, q: usize) -> Option<&AppendExpr> {
        self.gamma[q].as_ref()
    }

    pub fn gammas(&self) -> &[Option<AppendExpr>] {
        &self.gamma
    }

    /// `(Q, q0, δˢ, dom γ)`.
    pub fn underlying(&self) -> Dfa {
        let table = self
            .delta
            .iter()
            .map(|row| row.iter().map(|s| s.as_ref().map(|s| s.target)).collect())
            .collect();
        let finals = (0..self.num_states()).filter(|&q| self.gamma[q].is_some()).collect();
        Dfa::new(self.states.clone(), self.input.clone(), self.initial, finals, table)
            .expect("validated on construction")
    }

    pub fn has_total_updates(&self) -> bool {
        self.delta.iter().flatten().flatten().all(|s| s.update.is_total())
    }

    /// The register read by every output expression, if there is a single one.
    pub fn fixed_output_register(&self) -> Option<usize> {
        let mut srcs = self.gamma.iter().flatten().map(|e| e.src);
        let first = srcs.next()?;
        srcs.all(|x| x == first).then_some(first)
    }

    /// Runs the machine on symbol indices, returning the final state and valuation.
    pub fn run_idx(&self, idx: &[usize]) -> Option<(usize, Valuation)> {
        let mut q = self.initial;
        let mut v = Valuation::total(self.v0.clone());
        for &s in idx {
            let step = self.delta[q][s].as_ref()?;
            v = v.apply(&step.update);
            q = step.target;
        }
        Some((q, v))
    }

    pub fn eval_idx(&self, idx: &[usize]) -> Option<Word> {
        let (q, v) = self.run_idx(idx)?;
        v.eval(self.gamma[q].as_ref()?)
    }

    /// `⟦S⟧(w)`; words outside the input alphabet are outside the domain.
    pub fn eval(&self, w: &Word) -> Option<Word> {
        self.eval_idx(&self.input.encode(w).ok()?)
    }

    /// The same machine with extra registers that copy themselves and are never read.
    pub fn pad_registers(&self, target: usize) -> Asst {
        let mut out = self.clone();
        while out.registers.len() < target {
            let x = out.registers.push_fresh(&format!("Z{}", out.registers.len()));
            out.v0.push(Word::empty());
            for step in out.delta.iter_mut().flatten().flatten() {
                step.update.0.push(Some(AppendExpr::copy(x)));
            }
        }
        out
    }

    /// Equality up to renaming of states and registers.
    ///
    /// States are matched through the BFS order of the underlying automaton, so
    /// every state must be reachable; registers are matched by search.
    pub fn is_isomorphic(&self, other: &Asst) -> bool {
        if self.input != other.input
            || self.num_states() != other.num_states()
            || self.num_registers() != other.num_registers()
        {
            return false;
        }
        let (a, b) = (self.underlying(), other.underlying());
        if !a.is_isomorphic(&b) {
            return false;
        }
        let (oa, ob) = (a.reachable(), b.reachable());
        if oa.len() != self.num_states() {
            return false;
        }
        let mut state_map = vec![0; self.num_states()];
        for (&p, &q) in oa.iter().zip(ob.iter()) {
            state_map[p] = q;
        }
        let k = self.num_registers();
        let mut perm = vec![usize::MAX; k];
        let mut used = vec![false; k];
        self.match_registers(other, &state_map, &mut perm, &mut used, 0)
    }

    fn match_registers(
        &self,
        other: &Asst,
        state_map: &[usize],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        x: usize,
    ) -> bool {
        let k = self.num_registers();
        if x == k {
            return self.registers_agree(other, state_map, perm);
        }
        for y in 0..k {
            if used[y] {
                continue;
            }
            perm[x] = y;
            used[y] = true;
            if self.match_registers(other, state_map, perm, used, x + 1) {
                return true;
            }
            used[y] = false;
        }
        perm[x] = usize::MAX;
        false
    }

    fn registers_agree(&self, other: &Asst, state_map: &[usize], perm: &[usize]) -> bool {
        let map_expr = |e: &AppendExpr| AppendExpr::new(perm[e.src], e.append.clone());
        if (0..self.num_registers()).any(|x| self.v0[x] != other.v0[perm[x]]) {
            return false;
        }
        for q in 0..self.num_states() {
            let q2 = state_map[q];
            if self.gamma[q].as_ref().map(map_expr) != other.gamma[q2] {
                return false;
            }
            for s in 0..self.input.len() {
                match (&self.delta[q][s], &other.delta[q2][s]) {
                    (None, None) => {}
                    (Some(a), Some(b)) => {
                        for x in 0..self.num_registers() {
                            if a.update.0[x].as_ref().map(map_expr) != b.update.0[perm[x]] {
                                return false;
                            }
                        }
                    }
                    _ => return false,
                }
            }
        }
        true
    }
}

impl WordFunction for Asst {
    fn apply(&self, w: &Word) -> Option<Word> {
        self.eval(w)
    }
}

impl fmt::Debug for Asst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reg = |x: usize| self.registers.name(x);
        let expr = |e: &AppendExpr| {
            if e.append.is_empty() {
                reg(e.src).to_string()
            } else {
                format!("{}·{}", reg(e.src), e.append)
            }
        };
        writeln!(f, "Asst {{ q0: {}, registers: {:?}", self.states.name(self.initial), self.registers)?;
        for (x, w) in self.v0.iter().enumerate() {
            writeln!(f, "  v0({}) = {:?}", reg(x), w)?;
        }
        for (q, row) in self.delta.iter().enumerate() {
            for (s, step) in row.iter().enumerate() {
                let Some(step) = step else { continue };
                let upd: Vec<String> = step
                    .update
                    .0
                    .iter()
                    .enumerate()
                    .map(|(x, e)| match e {
                        Some(e) => format!("{} := {}", reg(x), expr(e)),
                        None => format!("{} := ⊥", reg(x)),
                    })
                    .collect();
                writeln!(
                    f,
                    "  {} -{}-> {}  [{}]",
                    self.states.name(q),
                    self.input.symbol(s),
                    self.states.name(step.target),
                    upd.join(", ")
                )?;
            }
        }
        for (q, g) in self.gamma.iter().enumerate() {
            if let Some(e) = g {
                writeln!(f, "  γ({}) = {}", self.states.name(q), expr(e))?;
            }
        }
        write!(f, "}}")
    }
}

/// Convenience builder for hand-written machines.
pub struct AsstBuilder {
    states: StateNames,
    registers: StateNames,
    input: Alphabet,
    output: Alphabet,
    v0: Vec<Word>,
    delta: Vec<Vec<Option<Step>>>,
    gamma: Vec<Option<AppendExpr>>,
    initial: usize,
}

impl AsstBuilder {
    pub fn new(states: &[&str], registers: &[&str], input: Alphabet, output: Alphabet) -> Self {
        let states = StateNames::new(states.iter().copied()).expect("distinct state names");
        let registers = StateNames::new(registers.iter().copied()).expect("distinct register names");
        let n = states.len();
        let k = registers.len();
        AsstBuilder {
            delta: vec![vec![None; input.len()]; n],
            gamma: vec![None; n],
            v0: vec![Word::empty(); k],
            states,
            registers,
            input,
            output,
            initial: 0,
        }
    }

    fn reg(&self, name: &str) -> usize {
        self.registers.id(name).expect("known register")
    }

    fn parse_expr(&self, text: &str) -> AppendExpr {
        let mut parts = text.split_whitespace();
        let src = self.reg(parts.next().expect("source register"));
        let append = parts.map(Symbol::from_static).collect();
        AppendExpr::new(src, append)
    }

    pub fn initial(mut self, q: &str) -> Self {
        self.initial = self.states.id(q).expect("known state");
        self
    }

    pub fn v0(mut self, x: &str, w: &str) -> Self {
        let x = self.reg(x);
        self.v0[x] = Word::parse(w).expect("valid word");
        self
    }

    /// `updates` lists `(register, "SRC sym sym …")`; unlisted registers are undefined.
    pub fn trans(mut self, from: &str, symbol: &str, to: &str, updates: &[(&str, &str)]) -> Self {
        let p = self.states.id(from).expect("known state");
        let q = self.states.id(to).expect("known state");
        let s = self.input.index_of(&Symbol::from_static(symbol)).expect("known symbol");
        let mut update = Substitution(vec![None; self.registers.len()]);
        for (x, e) in updates {
            let x = self.reg(x);
            update.0[x] = Some(self.parse_expr(e));
        }
        self.delta[p][s] = Some(Step { target: q, update });
        self
    }

    pub fn output(mut self, q: &str, expr: &str) -> Self {
        let q = self.states.id(q).expect("known state");
        self.gamma[q] = Some(self.parse_expr(expr));
        self
    }

    pub fn build(self) -> Result<Asst, AsstError> {
        Asst::new(
            self.states,
            self.registers,
            self.input,
            self.output,
            self.initial,
            self.v0,
            self.delta,
            self.gamma,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(s: &str) -> Word {
        Word::letters(s)
    }

    #[test]
    fn last_letter_examples() {
        let s = fixtures::last_letter_asst();
        assert_eq!(s.eval(&w("aab")), Some(w("bbb")));
        assert_eq!(s.eval(&Word::empty()), Some(Word::empty()));
        assert_eq!(s.eval(&w("ba")), Some(w("aa")));
        assert_eq!(s.fixed_output_register(), Some(0));
        assert!(s.has_total_updates());
    }

    #[test]
    fn composition_matches_sequential_application() {
        let s1 = Substitution(vec![Some(AppendExpr::new(1, w("a"))), None]);
        let s2 = Substitution(vec![Some(AppendExpr::new(0, w("b"))), Some(AppendExpr::new(0, w("c")))]);
        let v = Valuation::total(vec![w("x"), w("y")]);
        assert_eq!(v.apply(&s1.compose(&s2)), v.apply(&s1).apply(&s2));
        assert_eq!(v.apply(&s1).apply(&s2).get(0), Some(&w("yab")));
    }

    #[test]
    fn partial_update_undefines_output() {
        let s = AsstBuilder::new(&["q"], &["X", "Y"], Alphabet::letters("ab"), Alphabet::letters("ab"))
            .trans("q", "a", "q", &[("X", "X a")])
            .trans("q", "b", "q", &[("X", "Y b"), ("Y", "Y")])
            .output("q", "X")
            .build()
            .unwrap();
        assert_eq!(s.eval(&w("b")), Some(w("b")));
        assert_eq!(s.eval(&w("ab")), None);
        assert!(!s.has_total_updates());
    }

    #[test]
    fn isomorphism_detects_register_renaming() {
        let s = fixtures::last_letter_asst();
        let renamed = AsstBuilder::new(&["p", "r"], &["B", "A"], Alphabet::letters("ab"), Alphabet::letters("ab"))
            .trans("p", "a", "p", &[("A", "A a"), ("B", "B b")])
            .trans("p", "b", "r", &[("A", "B b"), ("B", "A a")])
            .trans("r", "a", "p", &[("A", "B a"), ("B", "A b")])
            .trans("r", "b", "r", &[("A", "A b"), ("B", "B a")])
            .output("p", "A")
            .output("r", "A")
            .build()
            .unwrap();
        assert!(s.is_isomorphic(&renamed));
        assert!(!s.is_isomorphic(&fixtures::last_letter_iffo()));
    }

    #[test]
    fn padding_keeps_semantics() {
        let s = fixtures::last_letter_asst();
        let p = s.pad_registers(4);
        assert_eq!(p.num_registers(), 4);
        for u in Alphabet::letters("ab").words_up_to(5) {
            assert_eq!(p.eval(&u), s.eval(&u));
        }
    }
}
