//! Clopen subsets of `A^N` as canonical reduced prefix antichains.
//!
//! A [`Clopen`] is stored as the unique antichain of words such that no word
//! is a prefix of another, no full sibling family is present, and the words
//! are sorted length-then-lexicographically. With this normal form, set
//! equality is structural equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite word over the alphabet `0..d`, addressing a cylinder.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_slice(s: &[u8]) -> Self {
        Word(s.to_vec())
    }

    pub fn is_prefix_of(&self, other: &[u8]) -> bool {
        other.starts_with(&self.0)
    }

    pub fn comparable(&self, other: &[u8]) -> bool {
        self.is_prefix_of(other) || self.0.starts_with(other)
    }

    pub fn concat(&self, tail: &[u8]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + tail.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(tail);
        Word(v)
    }

    pub fn child(&self, letter: u8) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    pub fn check(&self, arity: u8) -> Result<()> {
        match self.0.iter().find(|&&l| l >= arity) {
            Some(&letter) => Err(Error::LetterOutOfRange { letter, arity }),
            None => Ok(()),
        }
    }

    /// All words of length `n` in lexicographic order.
    pub fn all_of_length(arity: u8, n: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            out = out
                .iter()
                .flat_map(|w| (0..arity).map(move |x| w.child(x)))
                .collect();
        }
        out
    }
}

impl Deref for Word {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("~");
        }
        for &l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl From<&str> for Word {
    /// Parses a digit string; `~` or `""` is the empty word. Panics on non-digits.
    fn from(s: &str) -> Self {
        if s == "~" {
            return Word::empty();
        }
        Word(
            s.bytes()
                .map(|b| {
                    assert!(b.is_ascii_digit(), "bad letter in word literal {s:?}");
                    b - b'0'
                })
                .collect(),
        )
    }
}

/// A clopen subset of `A^N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clopen {
    arity: u8,
    words: Vec<Word>,
}

impl Clopen {
    pub fn empty(arity: u8) -> Self {
        Clopen { arity, words: Vec::new() }
    }

    pub fn full(arity: u8) -> Self {
        Clopen { arity, words: vec![Word::empty()] }
    }

    pub fn cylinder(arity: u8, w: Word) -> Self {
        Clopen { arity, words: vec![w] }
    }

    /// Canonical form of the union of the cylinders of `words`.
    pub fn normalize<I>(arity: u8, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = Word>,
    {
        if arity < 2 {
            return Err(Error::BadArity(arity));
        }
        let words: Vec<Word> = words.into_iter().collect();
        for w in &words {
            w.check(arity)?;
        }
        Ok(Self::normalize_unchecked(arity, words))
    }

    pub(crate) fn normalize_unchecked(arity: u8, words: Vec<Word>) -> Self {
        let slices: Vec<&[u8]> = words.iter().map(|w| &w[..]).collect();
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        reduce_into(arity, &slices, &mut prefix, &mut out);
        out.sort();
        Clopen { arity, words: out }
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.words.len() == 1 && self.words[0].is_empty()
    }

    /// Length of the longest word in the antichain.
    pub fn depth(&self) -> usize {
        self.words.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    fn same_alphabet(&self, other: &Clopen) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::AlphabetMismatch { left: self.arity, right: other.arity });
        }
        Ok(())
    }

    pub fn union(&self, other: &Clopen) -> Result<Clopen> {
        self.same_alphabet(other)?;
        let words = self.words.iter().chain(&other.words).cloned().collect();
        Ok(Self::normalize_unchecked(self.arity, words))
    }

    pub fn meet(&self, other: &Clopen) -> Result<Clopen> {
        self.same_alphabet(other)?;
        let mut words = Vec::new();
        for u in &self.words {
            for v in &other.words {
                if u.is_prefix_of(v) {
                    words.push(v.clone());
                } else if v.is_prefix_of(u) {
                    words.push(u.clone());
                }
            }
        }
        Ok(Self::normalize_unchecked(self.arity, words))
    }

    pub fn complement(&self) -> Clopen {
        let slices: Vec<&[u8]> = self.words.iter().map(|w| &w[..]).collect();
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        complement_into(self.arity, &slices, &mut prefix, &mut out);
        Self::normalize_unchecked(self.arity, out)
    }

    pub fn minus(&self, other: &Clopen) -> Result<Clopen> {
        self.meet(&other.complement())
    }

    /// Containment `self ⊆ other`.
    pub fn leq(&self, other: &Clopen) -> Result<bool> {
        self.same_alphabet(other)?;
        Ok(self
            .words
            .iter()
            .all(|u| covered(self.arity, u, &other.words)))
    }

    pub fn disjoint(&self, other: &Clopen) -> Result<bool> {
        self.same_alphabet(other)?;
        Ok(!self
            .words
            .iter()
            .any(|u| other.words.iter().any(|v| u.comparable(v))))
    }

    /// Whether the infinite word with prefix `w` (any extension) lies in the set.
    pub fn contains_cylinder(&self, w: &[u8]) -> bool {
        self.words.iter().any(|u| u.is_prefix_of(w))
    }

    /// The `d^n` depth-`n` cylinders in lexicographic order.
    pub fn atoms(arity: u8, n: usize) -> Vec<Clopen> {
        Word::all_of_length(arity, n)
            .into_iter()
            .map(|w| Clopen::cylinder(arity, w))
            .collect()
    }

    /// The same set written as depth-`n` cylinders, or `None` if some word is deeper.
    pub fn refine_to_depth(&self, n: usize) -> Option<Vec<Word>> {
        let mut out = Vec::new();
        for w in &self.words {
            if w.len() > n {
                return None;
            }
            for tail in Word::all_of_length(self.arity, n - w.len()) {
                out.push(w.concat(&tail));
            }
        }
        out.sort();
        Some(out)
    }
}

fn covered(arity: u8, u: &[u8], words: &[Word]) -> bool {
    // u ⊆ ∪words iff some word is a prefix of u, or all children of u are covered.
    if words.iter().any(|v| v.is_prefix_of(u)) {
        return true;
    }
    if !words.iter().any(|v| v.starts_with(u)) {
        return false;
    }
    let mut child = u.to_vec();
    child.push(0);
    (0..arity).all(|x| {
        *child.last_mut().unwrap() = x;
        covered(arity, &child, words)
    })
}

fn reduce_into(arity: u8, words: &[&[u8]], prefix: &mut Vec<u8>, out: &mut Vec<Word>) {
    if words.is_empty() {
        return;
    }
    if words.iter().any(|w| w.is_empty()) {
        out.push(Word(prefix.clone()));
        return;
    }
    let start = out.len();
    let mut full_children = 0;
    for x in 0..arity {
        let sub: Vec<&[u8]> = words
            .iter()
            .filter(|w| w[0] == x)
            .map(|w| &w[1..])
            .collect();
        prefix.push(x);
        let before = out.len();
        reduce_into(arity, &sub, prefix, out);
        if out.len() == before + 1 && out[before].len() == prefix.len() {
            full_children += 1;
        }
        prefix.pop();
    }
    if full_children == arity as usize {
        out.truncate(start);
        out.push(Word(prefix.clone()));
    }
}

fn complement_into(arity: u8, words: &[&[u8]], prefix: &mut Vec<u8>, out: &mut Vec<Word>) {
    if words.is_empty() {
        out.push(Word(prefix.clone()));
        return;
    }
    if words.iter().any(|w| w.is_empty()) {
        return;
    }
    for x in 0..arity {
        let sub: Vec<&[u8]> = words
            .iter()
            .filter(|w| w[0] == x)
            .map(|w| &w[1..])
            .collect();
        prefix.push(x);
        complement_into(arity, &sub, prefix, out);
        prefix.pop();
    }
}

/// Whether `parts` are pairwise disjoint, nonempty, and cover `X`.
pub fn is_partition(parts: &[Clopen]) -> bool {
    let Some(first) = parts.first() else {
        return false;
    };
    let arity = first.arity;
    if parts.iter().any(|p| p.arity != arity || p.is_empty()) {
        return false;
    }
    for (i, a) in parts.iter().enumerate() {
        for b in &parts[i + 1..] {
            if !a.disjoint(b).unwrap_or(false) {
                return false;
            }
        }
    }
    let mut all = Clopen::empty(arity);
    for p in parts {
        all = all.union(p).expect("same alphabet");
    }
    all.is_full()
}

/// Index of the unique part containing `c`, or `None` if `c` is empty or straddles parts.
pub fn part_of(parts: &[Clopen], c: &Clopen) -> Option<usize> {
    if c.is_empty() {
        return None;
    }
    parts
        .iter()
        .position(|p| c.leq(p).unwrap_or(false))
}

impl fmt::Display for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Clopen {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
