//! Deduplication by semantic equality and breadth-first word balls.

use std::collections::HashMap;

use crate::clopen::{Clopen, Word};
use crate::pmap::{Eval, PartialMap};

const PROBE_LEN: usize = 32;
const PROBE_KEEP: usize = 8;
const MAX_PROBES: usize = 64;

/// One probe through every cylinder of the deepest level with at most `MAX_PROBES`
/// cylinders, padded by a fixed xorshift stream (independent of any caller seed).
fn probe_words(arity: u8) -> Vec<Vec<u8>> {
    let mut depth = 0;
    while (arity as usize).pow(depth as u32 + 1) <= MAX_PROBES {
        depth += 1;
    }
    let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
    Word::all_of_length(arity, depth)
        .into_iter()
        .map(|w| {
            let mut v = w.0;
            v.extend((depth..PROBE_LEN).map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s % arity as u64) as u8
            }));
            v
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Shallow(Clopen, Clopen, Vec<Option<Vec<u8>>>),
    Deep(Clopen, Clopen),
}

/// Fingerprint buckets with [`PartialMap::eq`] as the final arbiter.
pub struct EqIndex<T> {
    probes: Vec<Vec<u8>>,
    buckets: HashMap<Key, Vec<usize>>,
    items: Vec<(PartialMap, T)>,
}

impl<T> EqIndex<T> {
    pub fn new(arity: u8) -> Self {
        EqIndex { probes: probe_words(arity), buckets: HashMap::new(), items: Vec::new() }
    }

    fn key(&self, m: &PartialMap) -> Key {
        let mut imgs = Vec::with_capacity(self.probes.len());
        for p in &self.probes {
            match m.eval(p) {
                Eval::Image(w, _) => imgs.push(Some(w[..w.len().min(PROBE_KEEP)].to_vec())),
                Eval::Undefined => imgs.push(None),
                Eval::TooShallow => return Key::Deep(m.dom(), m.ran()),
            }
        }
        Key::Shallow(m.dom(), m.ran(), imgs)
    }

    pub fn find(&self, m: &PartialMap) -> Option<usize> {
        self.buckets
            .get(&self.key(m))?
            .iter()
            .copied()
            .find(|&i| self.items[i].0.eq(m))
    }

    /// Inserts unless an eq-equal element is present; returns the new index.
    pub fn insert(&mut self, m: PartialMap, payload: T) -> Option<usize> {
        let key = self.key(&m);
        let bucket = self.buckets.entry(key).or_default();
        if bucket.iter().any(|&i| self.items[i].0.eq(&m)) {
            return None;
        }
        bucket.push(self.items.len());
        self.items.push((m, payload));
        Some(self.items.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(PartialMap, T)] {
        &self.items
    }

    pub fn into_items(self) -> Vec<(PartialMap, T)> {
        self.items
    }
}

/// Distinct elements of word length ≤ `max_len` over `gens`, each with its shortest
/// (then lexicographically least) word; a word `[i, j]` denotes `gens[i] · gens[j]`.
pub struct Ball {
    pub elems: Vec<(PartialMap, Vec<usize>)>,
    pub nodes: u64,
    pub complete: bool,
}

pub fn word_ball(arity: u8, gens: &[PartialMap], max_len: usize, budget: u64) -> Ball {
    let mut index: EqIndex<Vec<usize>> = EqIndex::new(arity);
    index.insert(PartialMap::one(arity), Vec::new());
    let mut frontier = vec![0usize];
    let mut nodes = 0u64;
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &i in &frontier {
            for (g_idx, g) in gens.iter().enumerate() {
                if nodes >= budget {
                    return Ball { elems: index.into_items(), nodes, complete: false };
                }
                nodes += 1;
                let (m, w) = &index.items()[i];
                let p = m.mul(g);
                let mut word = w.clone();
                word.push(g_idx);
                if let Some(j) = index.insert(p, word) {
                    next.push(j);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ball { elems: index.into_items(), nodes, complete: true }
}

/// Evaluates a word over `gens`.
pub fn eval_word(arity: u8, gens: &[PartialMap], word: &[usize]) -> PartialMap {
    PartialMap::product(arity, word.iter().map(|&i| &gens[i]))
}
