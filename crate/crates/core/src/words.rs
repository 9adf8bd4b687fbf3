//! Symbols, words and alphabets.
//!
//! A [`Symbol`] is an opaque whitespace-free token, so multi-character letters
//! such as `(l_a,b)` survive a round trip through the command line. Words are
//! plain sequences of symbols.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("symbol must be a non-empty token without whitespace, got {0:?}")]
    BadSymbol(String),
    #[error("duplicate symbol {0} in alphabet")]
    DuplicateSymbol(Symbol),
    #[error("symbol {0} is not in the alphabet")]
    UnknownSymbol(Symbol),
}

/// A letter of some alphabet.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(token: &str) -> Result<Self, WordError> {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(WordError::BadSymbol(token.to_string()));
        }
        Ok(Symbol(Arc::from(token)))
    }

    /// Builds a symbol from a token the caller knows to be valid.
    ///
    /// Panics on empty or whitespace-containing tokens.
    pub fn from_static(token: &str) -> Self {
        Symbol::new(token).expect("invalid symbol literal")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Symbol::new(&raw).map_err(serde::de::Error::custom)
    }
}

/// A finite word. The empty word is `Word::default()`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    /// One symbol per character: `Word::letters("aab")` is `a a b`.
    pub fn letters(text: &str) -> Self {
        Word(
            text.chars()
                .map(|c| Symbol::from_static(c.encode_utf8(&mut [0; 4])))
                .collect(),
        )
    }

    /// Parses whitespace-separated tokens; the empty string is the empty word.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        text.split_whitespace()
            .map(Symbol::new)
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word(self.0[n..].to_vec())
    }

    pub fn last(&self) -> Option<&Symbol> {
        self.0.last()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Symbol;
    type IntoIter = std::slice::Iter<'a, Symbol>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Space-separated symbols; ε prints as the empty string.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(s.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        write!(f, "\"{self}\"")
    }
}

/// A finite, duplicate-free, ordered set of symbols.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl Alphabet {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, WordError> {
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(WordError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// `Alphabet::letters("ab")` is `{a, b}`.
    pub fn letters(text: &str) -> Self {
        Alphabet::new(Word::letters(text).0).expect("duplicate letter")
    }

    /// Builds an alphabet from the distinct symbols of `words`, in first-seen order.
    pub fn collect<'a>(words: impl IntoIterator<Item = &'a Word>) -> Self {
        let mut symbols = Vec::new();
        let mut index = HashMap::new();
        for w in words {
            for s in w {
                if !index.contains_key(s) {
                    index.insert(s.clone(), symbols.len());
                    symbols.push(s.clone());
                }
            }
        }
        Alphabet { symbols, index }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.index.contains_key(s)
    }

    /// Maps a word to symbol indices.
    pub fn encode(&self, w: &Word) -> Result<Vec<usize>, WordError> {
        w.iter()
            .map(|s| self.index_of(s).ok_or_else(|| WordError::UnknownSymbol(s.clone())))
            .collect()
    }

    pub fn decode(&self, idx: &[usize]) -> Word {
        Word(idx.iter().map(|&i| self.symbols[i].clone()).collect())
    }

    /// Adds the symbols of `other` that are missing.
    pub fn union(&self, other: &Alphabet) -> Alphabet {
        let mut out = self.clone();
        for s in &other.symbols {
            if !out.index.contains_key(s) {
                out.index.insert(s.clone(), out.symbols.len());
                out.symbols.push(s.clone());
            }
        }
        out
    }

    /// All words of length at most `max_len`, in length-lexicographic order.
    pub fn words_up_to(&self, max_len: usize) -> WordsUpTo<'_> {
        WordsUpTo::new(self, max_len)
    }

    /// All words of exactly length `len`, lexicographically.
    pub fn words_of_len(&self, len: usize) -> impl Iterator<Item = Word> + '_ {
        self.words_up_to(len).filter(move |w| w.len() == len)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.symbols.iter()).finish()
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.symbols.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let symbols = Vec::<Symbol>::deserialize(d)?;
        Alphabet::new(symbols).map_err(serde::de::Error::custom)
    }
}

/// Length-lexicographic enumeration of `Σ^{≤n}` as index vectors.
pub struct WordsUpTo<'a> {
    alphabet: &'a Alphabet,
    max_len: usize,
    current: Option<Vec<usize>>,
}

impl<'a> WordsUpTo<'a> {
    fn new(alphabet: &'a Alphabet, max_len: usize) -> Self {
        WordsUpTo { alphabet, max_len, current: Some(Vec::new()) }
    }
}

/// Advances `word` to its length-lex successor over `k` letters, bounded by `max_len`.
pub(crate) fn next_index_word(word: &mut Vec<usize>, k: usize, max_len: usize) -> bool {
    if k == 0 {
        return false;
    }
    for i in (0..word.len()).rev() {
        if word[i] + 1 < k {
            word[i] += 1;
            for x in word.iter_mut().skip(i + 1) {
                *x = 0;
            }
            return true;
        }
    }
    if word.len() < max_len {
        let n = word.len() + 1;
        word.clear();
        word.resize(n, 0);
        return true;
    }
    false
}

impl Iterator for WordsUpTo<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let cur = self.current.take()?;
        let out = self.alphabet.decode(&cur);
        let mut next = cur;
        if next_index_word(&mut next, self.alphabet.len(), self.max_len) {
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Longest common prefix `u ∧ v`.
pub fn lcp(u: &Word, v: &Word) -> Word {
    let n = common_prefix_len(u, v);
    u.prefix(n)
}

/// Longest common suffix.
pub fn lcs(u: &Word, v: &Word) -> Word {
    let n = common_suffix_len(u, v);
    u.suffix_from(u.len() - n)
}

fn common_prefix_len(u: &Word, v: &Word) -> usize {
    u.iter().zip(v.iter()).take_while(|(a, b)| a == b).count()
}

fn common_suffix_len(u: &Word, v: &Word) -> usize {
    u.symbols()
        .iter()
        .rev()
        .zip(v.symbols().iter().rev())
        .take_while(|(a, b)| a == b)
        .count()
}

/// Prefix distance `|u| + |v| − 2|u ∧ v|`.
pub fn dist(u: &Word, v: &Word) -> usize {
    u.len() + v.len() - 2 * common_prefix_len(u, v)
}

/// Suffix distance, the mirror of [`dist`].
pub fn dist_suffix(u: &Word, v: &Word) -> usize {
    u.len() + v.len() - 2 * common_suffix_len(u, v)
}
