//! Reference machines and closed-form functions used by tests, the CLI and docs.

use std::collections::{BTreeMap, BTreeSet};

use crate::asst::{Asst, AsstBuilder};
use crate::automata::{Dfa, Nfa, StateNames};
use crate::bimachines::{AsyncBimachine, Bimachine};
use crate::refinement::Precongruence;
use crate::transducers::Fst;
use crate::words::{Alphabet, Word};

fn ab() -> Alphabet {
    Alphabet::letters("ab")
}

/// Two states, two registers, always outputting `X`; realizes `w ↦ σ^{|w|}`
/// where `σ` is the last letter of `w`. Its flows depend on the state.
pub fn last_letter_asst() -> Asst {
    AsstBuilder::new(&["0", "1"], &["X", "Y"], ab(), ab())
        .trans("0", "a", "0", &[("X", "X a"), ("Y", "Y b")])
        .trans("0", "b", "1", &[("X", "Y b"), ("Y", "X a")])
        .trans("1", "a", "0", &[("X", "Y a"), ("Y", "X b")])
        .trans("1", "b", "1", &[("X", "X b"), ("Y", "Y a")])
        .output("0", "X")
        .output("1", "X")
        .build()
        .expect("valid fixture")
}

/// [`last_letter_asst`] with the update `Y := X·a` removed from `0 -b-> 1`.
pub fn last_letter_partial() -> Asst {
    AsstBuilder::new(&["0", "1"], &["X", "Y"], ab(), ab())
        .trans("0", "a", "0", &[("X", "X a"), ("Y", "Y b")])
        .trans("0", "b", "1", &[("X", "Y b")])
        .trans("1", "a", "0", &[("X", "Y a"), ("Y", "X b")])
        .trans("1", "b", "1", &[("X", "X b"), ("Y", "Y a")])
        .output("0", "X")
        .output("1", "X")
        .build()
        .expect("valid fixture")
}

/// The last-letter function with independent flows but state-dependent output register.
pub fn last_letter_split_output() -> Asst {
    let upd: &[(&str, &str)] = &[("Xa", "Xa a"), ("Xb", "Xb b")];
    let mut b = AsstBuilder::new(&["0", "A", "B"], &["Xa", "Xb"], ab(), ab());
    for q in ["0", "A", "B"] {
        b = b.trans(q, "a", "A", upd).trans(q, "b", "B", upd);
    }
    b.output("0", "Xa").output("A", "Xa").output("B", "Xb").build().expect("valid fixture")
}

/// One state, three registers, output register `O`: the last-letter function as an aSST_iffo.
pub fn last_letter_iffo() -> Asst {
    AsstBuilder::new(&["q"], &["Xa", "Xb", "O"], ab(), ab())
        .trans("q", "a", "q", &[("Xa", "Xa a"), ("Xb", "Xb b"), ("O", "Xa a")])
        .trans("q", "b", "q", &[("Xa", "Xa a"), ("Xb", "Xb b"), ("O", "Xb b")])
        .output("q", "O")
        .build()
        .expect("valid fixture")
}

/// One state, one register: the identity.
pub fn identity_asst(sigma: &Alphabet) -> Asst {
    let names: Vec<&str> = sigma.symbols().iter().map(|s| s.as_str()).collect();
    let mut b = AsstBuilder::new(&["q"], &["X"], sigma.clone(), sigma.clone());
    for s in &names {
        b = b.trans("q", s, "q", &[("X", &format!("X {s}"))]);
    }
    b.output("q", "X").build().expect("valid fixture")
}

/// A cosequential transducer for the last-letter function: it guesses the
/// last letter at the start and checks it at the end.
pub fn last_letter_fst() -> Fst {
    Fst::from_names(
        &["A", "B", "F"],
        ab(),
        ab(),
        &[("A", ""), ("B", ""), ("F", "")],
        &[
            ("A", "a", "A", "a"),
            ("A", "b", "A", "a"),
            ("A", "a", "F", "a"),
            ("B", "a", "B", "b"),
            ("B", "b", "B", "b"),
            ("B", "b", "F", "b"),
        ],
        &[("F", "")],
    )
    .expect("valid fixture")
}

pub fn identity_fst(sigma: &Alphabet) -> Fst {
    let trans = (0..sigma.len())
        .map(|s| ((0, s, 0), Word::from_symbols(vec![sigma.symbol(s).clone()])))
        .collect();
    Fst::new(
        StateNames::new(["q"]).expect("valid name"),
        sigma.clone(),
        sigma.clone(),
        BTreeMap::from([(0, Word::empty())]),
        trans,
        BTreeMap::from([(0, Word::empty())]),
    )
    .expect("valid fixture")
}

fn swap_left() -> Dfa {
    Dfa::from_names(
        &["l_i", "l_a", "l_b"],
        ab(),
        "l_i",
        &["l_i", "l_a", "l_b"],
        &[
            ("l_i", "a", "l_a"),
            ("l_i", "b", "l_b"),
            ("l_a", "a", "l_a"),
            ("l_a", "b", "l_a"),
            ("l_b", "a", "l_b"),
            ("l_b", "b", "l_b"),
        ],
    )
    .expect("valid fixture")
}

/// `ω(l, σ, r)` of the swap machine: `τ` at `(l_i, σ, r_τ)` and `(l_τ, σ, r_f)`, else `σ`.
fn swap_omega(l: &str, sigma: &str, r: &str) -> Word {
    let out = match (l, r) {
        ("l_i", "r_a") | ("l_a", "r_f") => "a",
        ("l_i", "r_b") | ("l_b", "r_f") => "b",
        _ => sigma,
    };
    Word::letters(out)
}

/// The bimachine swapping the first and last letters.
///
/// The left automaton remembers the first letter, the right one the last.
/// All left states are final and all right states initial, so `ε ↦ ε`.
pub fn swap_bimachine() -> Bimachine {
    let left = swap_left();
    let right = Nfa::from_names(
        &["r_f", "r_a", "r_b"],
        ab(),
        &["r_f", "r_a", "r_b"],
        &["r_f"],
        &[
            ("r_a", "a", "r_f"),
            ("r_b", "b", "r_f"),
            ("r_a", "a", "r_a"),
            ("r_a", "b", "r_a"),
            ("r_b", "a", "r_b"),
            ("r_b", "b", "r_b"),
        ],
    )
    .expect("valid fixture");
    let mut omega = BTreeMap::new();
    for l in 0..3 {
        for s in 0..2 {
            for r in 0..3 {
                let defined = right.transitions().iter().any(|&(_, t, q)| t == s && q == r);
                if defined {
                    let w = swap_omega(left.states().name(l), ab().symbol(s).as_str(), right.states().name(r));
                    omega.insert((l, s, r), w);
                }
            }
        }
    }
    let lambda = (0..3).map(|r| (r, Word::empty())).collect();
    let rho = (0..3).map(|l| (l, Word::empty())).collect();
    Bimachine::new(left, right, ab(), lambda, omega, rho).expect("valid fixture")
}

/// The swap function as an asynchronous bimachine: `(l,σ)·r_f = r_σ`, `(l,σ)·r_τ = r_τ`.
pub fn swap_async() -> AsyncBimachine {
    let left = swap_left();
    let rnames = StateNames::new(["r_f", "r_a", "r_b"]).expect("valid names");
    let mut back = vec![vec![vec![None; 3]; 2]; 3];
    let mut omega = BTreeMap::new();
    for (l, row) in back.iter_mut().enumerate() {
        for (s, col) in row.iter_mut().enumerate() {
            col[0] = Some(1 + s);
            col[1] = Some(1);
            col[2] = Some(2);
            for r in 0..3 {
                let w = swap_omega(left.states().name(l), ab().symbol(s).as_str(), rnames.name(r));
                omega.insert((l, s, r), w);
            }
        }
    }
    let lambda = (0..3).map(|r| (r, Word::empty())).collect();
    let rho = (0..3).map(|l| (l, Word::empty())).collect();
    AsyncBimachine::new(left, rnames, BTreeSet::from([0, 1, 2]), 0, back, ab(), lambda, omega, rho)
        .expect("valid fixture")
}

/// A three-state complete DFA over `{a, b}` with `0 ≈ 1` and `0 ≈ 2` but `1 ≉ 2`.
///
/// `0 -a-> 1, 0 -b-> 2, 1 -a-> 0, 1 -b-> 2, 2 -a-> 1, 2 -b-> 0`.
pub fn three_state_precongruence() -> Precongruence {
    let dfa = Dfa::from_table(
        ab(),
        0,
        [0, 1, 2],
        vec![vec![Some(1), Some(2)], vec![Some(0), Some(2)], vec![Some(1), Some(0)]],
    )
    .expect("valid fixture");
    Precongruence::new(dfa, &[(0, 1), (0, 2)]).expect("transition-closed")
}

/// `w ↦ σ^{|w|}` where `σ` is the last letter; `ε ↦ ε`.
pub fn last_letter(w: &Word) -> Option<Word> {
    match w.last() {
        None => Some(Word::empty()),
        Some(s) => Some(std::iter::repeat_n(s.clone(), w.len()).collect()),
    }
}

/// Exchanges the first and last letters.
pub fn swap(w: &Word) -> Option<Word> {
    let mut v = w.symbols().to_vec();
    if let Some(last) = v.len().checked_sub(1) {
        v.swap(0, last);
    }
    Some(Word::from_symbols(v))
}

/// `uσ ↦ σu` on words of length exactly `n + 1`.
pub fn rotate_last_to_front(n: usize, w: &Word) -> Option<Word> {
    if w.len() != n + 1 {
        return None;
    }
    let mut out = Word::from_symbols(vec![w.last()?.clone()]);
    out.extend_from(&w.prefix(n));
    Some(out)
}
