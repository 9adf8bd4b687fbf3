//! Appending streaming string transducers, bimachines and register minimization.
//!
//! The crate covers four equivalent presentations of rational word functions
//! (functional transducers, appending SSTs, bimachines and asynchronous
//! bimachines), the size-preserving translations between them, and the
//! refinement machinery used to minimize the number of registers of an aSST
//! whose underlying automaton is fixed.
//!
//! Every exact procedure that is expensive or only semi-decidable comes with a
//! bounded counterpart, and those are guarded by [`guard::Guard`].

pub mod asst;
pub mod automata;
pub mod bimachines;
pub mod congruences;
pub mod conversions;
pub mod dot;
pub mod fixtures;
pub mod generators;
pub mod guard;
pub mod json;
pub mod minimization;
pub mod refinement;
pub mod transducers;
pub mod words;

pub use asst::{AppendExpr, Asst, Substitution, Valuation};
pub use automata::{Dfa, Nfa};
pub use bimachines::{AsyncBimachine, Bimachine};
pub use refinement::Precongruence;
pub use transducers::Fst;
pub use words::{Alphabet, Symbol, Word};

/// A partial word function, the common denominator of every machine model.
pub trait WordFunction {
    fn apply(&self, w: &Word) -> Option<Word>;
}

impl<F: Fn(&Word) -> Option<Word>> WordFunction for F {
    fn apply(&self, w: &Word) -> Option<Word> {
        self(w)
    }
}

/// Returns the first word of length at most `max_len` (length-lexicographic order)
/// on which `f` and `g` differ as partial functions.
pub fn first_disagreement(
    sigma: &Alphabet,
    max_len: usize,
    f: &dyn WordFunction,
    g: &dyn WordFunction,
) -> Option<Word> {
    sigma.words_up_to(max_len).find(|w| f.apply(w) != g.apply(w))
}

/// Like [`first_disagreement`], but only words in the domain of `f` are compared.
pub fn first_disagreement_on_domain(
    sigma: &Alphabet,
    max_len: usize,
    f: &dyn WordFunction,
    g: &dyn WordFunction,
) -> Option<Word> {
    sigma.words_up_to(max_len).find(|w| match f.apply(w) {
        Some(out) => g.apply(w).as_ref() != Some(&out),
        None => false,
    })
}
