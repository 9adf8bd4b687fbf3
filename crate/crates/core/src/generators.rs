//! Seeded random instances for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asst::{AppendExpr, Asst, Step, Substitution};
use crate::automata::{Dfa, StateNames};
use crate::minimization::Graph;
use crate::refinement::Precongruence;
use crate::transducers::SeqTransducer;
use crate::words::{Alphabet, Symbol, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn letters(n: usize) -> Alphabet {
    Alphabet::letters(&"abcdefgh"[..n])
}

fn random_word(rng: &mut impl Rng, out: &Alphabet, max_len: usize) -> Word {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| out.symbol(rng.gen_range(0..out.len())).clone()).collect()
}

/// A complete DFA with `n` states over the first `k` letters; state 0 is initial.
pub fn random_complete_dfa(rng: &mut impl Rng, n: usize, k: usize) -> Dfa {
    let delta = (0..n).map(|_| (0..k).map(|_| Some(rng.gen_range(0..n))).collect()).collect();
    let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    Dfa::from_table(letters(k), 0, finals, delta).expect("valid table")
}

/// A random symmetric relation on a random complete DFA, shrunk to its
/// largest transition-closed part.
pub fn random_precongruence(rng: &mut impl Rng, n: usize, k: usize, density: f64) -> Precongruence {
    let dfa = random_complete_dfa(rng, n, k);
    let mut rel = vec![vec![false; n]; n];
    for p in 0..n {
        rel[p][p] = true;
        for q in p + 1..n {
            let b = rng.gen_bool(density);
            rel[p][q] = b;
            rel[q][p] = b;
        }
    }
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in p + 1..n {
                if rel[p][q] && (0..k).any(|s| !rel[dfa.step(p, s).unwrap()][dfa.step(q, s).unwrap()]) {
                    rel[p][q] = false;
                    rel[q][p] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).filter(|&(p, q)| rel[p][q]).collect();
    Precongruence::new(dfa, &pairs).expect("closed by construction")
}

/// A letter-to-letter sequential transducer with `n` states over `k` letters.
/// Transitions exist with probability `p_defined`. State 0 is final, the
/// others with probability one half.
pub fn random_letter_to_letter(rng: &mut impl Rng, n: usize, k: usize, p_defined: f64) -> SeqTransducer {
    let sigma = letters(k);
    let mut delta = vec![vec![None; k]; n];
    let mut step_out = vec![vec![None; k]; n];
    for p in 0..n {
        for s in 0..k {
            if rng.gen_bool(p_defined) {
                delta[p][s] = Some(rng.gen_range(0..n));
                step_out[p][s] = Some(Word::from_symbols(vec![sigma.symbol(rng.gen_range(0..k)).clone()]));
            }
        }
    }
    let final_out: Vec<Option<Word>> =
        (0..n).map(|p| (p == 0 || rng.gen_bool(0.5)).then(Word::empty)).collect();
    let finals = (0..n).filter(|&p| final_out[p].is_some()).collect();
    let dfa = Dfa::new(StateNames::numbered("q", n), sigma.clone(), 0, finals, delta).expect("valid table");
    SeqTransducer { dfa, output: sigma, init_out: Word::empty(), step_out, final_out }
}

/// Parameters for [`random_partial_asst`].
#[derive(Clone, Copy, Debug)]
pub struct AsstShape {
    pub states: usize,
    pub registers: usize,
    pub letters: usize,
    pub max_append: usize,
    /// Probability that a register update is left undefined.
    pub p_undefined: f64,
    /// Probability that a transition is missing.
    pub p_missing: f64,
}

impl Default for AsstShape {
    fn default() -> Self {
        AsstShape { states: 3, registers: 2, letters: 2, max_append: 2, p_undefined: 0.2, p_missing: 0.1 }
    }
}

/// An aSST whose updates may be partial.
pub fn random_partial_asst(rng: &mut impl Rng, shape: AsstShape) -> Asst {
    let sigma = letters(shape.letters);
    let out = Alphabet::letters("ab");
    let (n, k) = (shape.states, shape.registers);
    let expr = |rng: &mut ChaCha8Rng| AppendExpr::new(rng.gen_range(0..k), random_word(rng, &out, shape.max_append));
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let delta = (0..n)
        .map(|_| {
            (0..shape.letters)
                .map(|_| {
                    if r.gen_bool(shape.p_missing) {
                        return None;
                    }
                    let target = r.gen_range(0..n);
                    let update = (0..k)
                        .map(|_| if r.gen_bool(shape.p_undefined) { None } else { Some(expr(&mut r)) })
                        .collect();
                    Some(Step { target, update: Substitution(update) })
                })
                .collect()
        })
        .collect();
    let gamma = (0..n).map(|q| (q == 0 || r.gen_bool(0.6)).then(|| expr(&mut r))).collect();
    let v0 = (0..k).map(|_| random_word(&mut r, &out, 1)).collect();
    Asst::new(
        StateNames::numbered("q", n),
        StateNames::numbered("X", k),
        sigma,
        out,
        0,
        v0,
        delta,
        gamma,
    )
    .expect("valid by construction")
}

/// A G(n, p) random graph with vertices `v0..`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let vs = (0..n).map(|i| Symbol::new(&format!("v{i}")).expect("valid")).collect();
    let mut edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    edges.shuffle(rng);
    edges.retain(|_| rng.gen_bool(p));
    Graph::from_indices(vs, edges).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_precongruence(&mut rng(7), 4, 2, 0.6);
        let b = random_precongruence(&mut rng(7), 4, 2, 0.6);
        assert_eq!(a.compatible_pairs(), b.compatible_pairs());
        assert_eq!(a.dfa(), b.dfa());
        let s = random_partial_asst(&mut rng(3), AsstShape::default());
        assert_eq!(s, random_partial_asst(&mut rng(3), AsstShape::default()));
    }

    #[test]
    fn shapes() {
        let mut r = rng(1);
        let t = random_letter_to_letter(&mut r, 5, 2, 0.8);
        assert!(t.is_letter_to_letter());
        assert_eq!(t.dfa.num_states(), 5);
        let g = random_graph(&mut r, 5, 1.0);
        assert_eq!(g.edges().len(), 10);
        let s = random_partial_asst(&mut r, AsstShape { registers: 3, states: 4, ..AsstShape::default() });
        assert_eq!((s.num_states(), s.num_registers()), (4, 3));
    }
}
