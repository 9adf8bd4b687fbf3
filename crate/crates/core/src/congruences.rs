//! Bounded approximations of the Myhill–Nerode congruence and of the left and
//! right syntactic congruences of a word function.
//!
//! Words of length at most `W` are compared against test contexts of length
//! at most `W`. Separations are certified by a concrete context and stay
//! valid for larger horizons; merges only mean "not separated yet".

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::words::{dist, dist_suffix, Alphabet, Word};
use crate::WordFunction;

/// A named word function with its alphabets.
#[derive(Clone)]
pub struct FunctionOracle {
    pub name: String,
    pub input: Alphabet,
    pub output: Alphabet,
    eval: Arc<dyn Fn(&Word) -> Option<Word> + Send + Sync>,
}

impl FunctionOracle {
    pub fn new(
        name: impl Into<String>,
        input: Alphabet,
        output: Alphabet,
        eval: impl Fn(&Word) -> Option<Word> + Send + Sync + 'static,
    ) -> Self {
        FunctionOracle { name: name.into(), input, output, eval: Arc::new(eval) }
    }

    /// Wraps a machine evaluator.
    pub fn of<M: WordFunction + Send + Sync + 'static>(name: impl Into<String>, input: Alphabet, output: Alphabet, m: M) -> Self {
        FunctionOracle::new(name, input, output, move |w| m.apply(w))
    }
}

impl WordFunction for FunctionOracle {
    fn apply(&self, w: &Word) -> Option<Word> {
        (self.eval)(w)
    }
}

impl fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionOracle").field("name", &self.name).field("input", &self.input).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeparationReason {
    /// Exactly one of the two extensions by `context` is in the domain.
    Domain,
    /// Both are defined and their outputs are at distance `distance > D`.
    Distance { distance: usize },
}

/// Why two class representatives are distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separation {
    pub u: Word,
    pub v: Word,
    pub context: Word,
    pub reason: SeparationReason,
}

/// A merged pair whose output distance keeps growing with the context length
/// up to the horizon, so a larger horizon may separate it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub u: Word,
    pub v: Word,
    /// Largest distance seen for each context length `0..=W`.
    pub profile: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundedPartition {
    pub horizon: usize,
    pub threshold: Option<usize>,
    /// Classes of `Σ^{≤W}`, each in length-lexicographic order; the first word is the representative.
    pub classes: Vec<Vec<Word>>,
    /// Whether the partition is known to be the exact restriction of the congruence.
    pub exact: bool,
    /// One witness for each pair of distinct classes.
    pub separations: Vec<Separation>,
    pub divergence: Vec<Divergence>,
}

impl BoundedPartition {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, w: &Word) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(w))
    }

    pub fn same_class(&self, u: &Word, v: &Word) -> bool {
        matches!((self.class_of(u), self.class_of(v)), (Some(a), Some(b)) if a == b)
    }

    pub fn representatives(&self) -> Vec<&Word> {
        self.classes.iter().map(|c| &c[0]).collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        // Keep the smaller index as root so representatives are the shortest words.
        if a < b {
            self.0[b] = a;
        } else {
            self.0[a] = b;
        }
    }
}

fn group(words: &[Word], uf: &mut UnionFind) -> Vec<Vec<usize>> {
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); words.len()];
    for i in 0..words.len() {
        let r = uf.find(i);
        by_root[r].push(i);
    }
    by_root.into_iter().filter(|c| !c.is_empty()).collect()
}

/// Cached function values on all words up to a length.
struct Table<'a> {
    f: &'a dyn WordFunction,
    cache: HashMap<Word, Option<Word>>,
}

impl Table<'_> {
    fn get(&mut self, w: Word) -> Option<Word> {
        if let Some(v) = self.cache.get(&w) {
            return v.clone();
        }
        let v = self.f.apply(&w);
        self.cache.insert(w, v.clone());
        v
    }
}

enum Verdict {
    Related(Vec<usize>),
    Separated(Word, SeparationReason),
}

fn compare(t: &mut Table, side: Side, u: &Word, v: &Word, contexts: &[Word], d: usize, horizon: usize) -> Verdict {
    let mut profile = vec![0; horizon + 1];
    for w in contexts {
        let (a, b) = match side {
            Side::Left => (w.concat(u), w.concat(v)),
            Side::Right => (u.concat(w), v.concat(w)),
        };
        match (t.get(a), t.get(b)) {
            (None, None) => {}
            (Some(_), None) | (None, Some(_)) => return Verdict::Separated(w.clone(), SeparationReason::Domain),
            (Some(x), Some(y)) => {
                let distance = match side {
                    Side::Left => dist(&x, &y),
                    Side::Right => dist_suffix(&x, &y),
                };
                if distance > d {
                    return Verdict::Separated(w.clone(), SeparationReason::Distance { distance });
                }
                let slot = &mut profile[w.len()];
                *slot = (*slot).max(distance);
            }
        }
    }
    Verdict::Related(profile)
}

/// Strictly increasing over the last three context lengths.
fn grows(profile: &[usize]) -> bool {
    profile.len() >= 3 && profile.windows(2).rev().take(2).all(|p| p[0] < p[1])
}

/// The bounded left (`side = Left`) or right syntactic congruence.
///
/// For the left side, `u` and `v` are related when for every context `w` with
/// `|w| ≤ W`, `wu` and `wv` are both in or both out of the domain, and
/// `dist(f(wu), f(wv)) ≤ D` (longest common prefix distance). The right side
/// uses `uw`, `vw` and the longest common suffix. Classes are the connected
/// components of this relation, so words in different classes are always
/// separated by a witness.
pub fn syntactic_classes(f: &dyn WordFunction, sigma: &Alphabet, side: Side, horizon: usize, threshold: usize) -> BoundedPartition {
    let words: Vec<Word> = sigma.words_up_to(horizon).collect();
    let mut t = Table { f, cache: HashMap::new() };
    let mut uf = UnionFind((0..words.len()).collect());
    let mut divergence = Vec::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if uf.find(i) == uf.find(j) {
                continue;
            }
            if let Verdict::Related(profile) = compare(&mut t, side, &words[i], &words[j], &words, threshold, horizon) {
                uf.union(i, j);
                if grows(&profile) {
                    divergence.push(Divergence { u: words[i].clone(), v: words[j].clone(), profile });
                }
            }
        }
    }
    let classes = group(&words, &mut uf);
    let mut separations = Vec::new();
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let (u, v) = (&words[classes[a][0]], &words[classes[b][0]]);
            if let Verdict::Separated(context, reason) = compare(&mut t, side, u, v, &words, threshold, horizon) {
                separations.push(Separation { u: u.clone(), v: v.clone(), context, reason });
            }
        }
    }
    BoundedPartition {
        horizon,
        threshold: Some(threshold),
        classes: classes.into_iter().map(|c| c.into_iter().map(|i| words[i].clone()).collect()).collect(),
        exact: false,
        separations,
        divergence,
    }
}

/// Left syntactic classes with horizon `W` and distance threshold `D`.
pub fn left_syntactic_classes(f: &FunctionOracle, horizon: usize, threshold: usize) -> BoundedPartition {
    syntactic_classes(f, &f.input, Side::Left, horizon, threshold)
}

pub fn right_syntactic_classes(f: &FunctionOracle, horizon: usize, threshold: usize) -> BoundedPartition {
    syntactic_classes(f, &f.input, Side::Right, horizon, threshold)
}

/// The default threshold `D = 2W`.
pub fn default_threshold(horizon: usize) -> usize {
    2 * horizon
}

/// Myhill–Nerode classes of `Σ^{≤W}`: `u ∼ v` when `uw ∈ L ⟺ vw ∈ L` for all `|w| ≤ W`.
pub fn myhill_nerode_classes(member: &dyn Fn(&Word) -> bool, sigma: &Alphabet, horizon: usize) -> BoundedPartition {
    let words: Vec<Word> = sigma.words_up_to(horizon).collect();
    let mut classes: Vec<(Vec<bool>, Vec<Word>)> = Vec::new();
    for u in &words {
        let sig: Vec<bool> = words.iter().map(|w| member(&u.concat(w))).collect();
        match classes.iter_mut().find(|(s, _)| *s == sig) {
            Some((_, c)) => c.push(u.clone()),
            None => classes.push((sig, vec![u.clone()])),
        }
    }
    let mut separations = Vec::new();
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let i = (0..words.len()).find(|&i| classes[a].0[i] != classes[b].0[i]).expect("distinct signatures");
            separations.push(Separation {
                u: classes[a].1[0].clone(),
                v: classes[b].1[0].clone(),
                context: words[i].clone(),
                reason: SeparationReason::Domain,
            });
        }
    }
    BoundedPartition {
        horizon,
        threshold: None,
        classes: classes.into_iter().map(|(_, c)| c).collect(),
        exact: false,
        separations,
        divergence: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ab() -> Alphabet {
        Alphabet::letters("ab")
    }

    fn oracle(name: &str, f: fn(&Word) -> Option<Word>) -> FunctionOracle {
        FunctionOracle::new(name, ab(), ab(), f)
    }

    #[test]
    fn last_letter_has_three_left_classes() {
        let f = oracle("last", fixtures::last_letter);
        let p = left_syntactic_classes(&f, 6, 6);
        assert_eq!(p.num_classes(), 3);
        let w = Word::letters;
        assert_eq!(p.classes[0], vec![Word::empty()]);
        assert!(p.same_class(&w("a"), &w("bba")));
        assert!(p.same_class(&w("b"), &w("aab")));
        assert!(!p.same_class(&w("a"), &w("b")));
        assert_eq!(p.separations.len(), 3);
        for s in [4, 5] {
            assert_eq!(left_syntactic_classes(&f, s, default_threshold(s)).num_classes(), 3);
        }
    }

    #[test]
    fn identity_and_constant_are_one_class() {
        let id = oracle("id", |w| Some(w.clone()));
        assert_eq!(left_syntactic_classes(&id, 4, 8).num_classes(), 1);
        assert_eq!(right_syntactic_classes(&id, 4, 8).num_classes(), 1);
        let eps = oracle("eps", |_| Some(Word::empty()));
        assert_eq!(right_syntactic_classes(&eps, 4, 8).num_classes(), 1);
    }

    #[test]
    fn last_letter_right_side_is_one_class() {
        let f = oracle("last", fixtures::last_letter);
        assert_eq!(right_syntactic_classes(&f, 5, 10).num_classes(), 1);
    }

    #[test]
    fn swap_left_classes_see_last_letter() {
        let f = oracle("swap2", |w| if w.len() >= 2 { fixtures::swap(w) } else { None });
        let p = left_syntactic_classes(&f, 5, 10);
        let w = Word::letters;
        assert!(!p.same_class(&w("aa"), &w("ab")));
        assert!(p.same_class(&w("aa"), &w("aba")));
    }

    #[test]
    fn machine_and_closed_form_agree() {
        let m = FunctionOracle::of("iffo", ab(), ab(), fixtures::last_letter_iffo());
        let c = oracle("closed", fixtures::last_letter);
        assert_eq!(left_syntactic_classes(&m, 4, 8).classes, left_syntactic_classes(&c, 4, 8).classes);
    }

    #[test]
    fn myhill_nerode_examples() {
        let all = myhill_nerode_classes(&|_| true, &ab(), 3);
        assert_eq!(all.num_classes(), 1);
        let ends_a = myhill_nerode_classes(&|w: &Word| w.last().is_some_and(|s| s.as_str() == "a"), &ab(), 2);
        assert_eq!(ends_a.num_classes(), 2);
        for n in 1..=3 {
            let p = myhill_nerode_classes(&|w: &Word| w.len() == n + 1, &ab(), n + 2);
            assert_eq!(p.num_classes(), n + 3);
        }
    }
}
