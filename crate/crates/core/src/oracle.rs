//! Pointwise evaluation on long finite words, independent of branch-table algebra.
//!
//! A probe is a depth-`n` word followed by a fixed padding, long enough that
//! every branch selection is determined. Two images agree when one is a
//! prefix of the other (both approximate the same infinite word).

use crate::clopen::Word;
use crate::pmap::{Eval, PartialMap};

const PAD: [u8; 12] = [1, 0, 0, 1, 1, 1, 0, 1, 0, 0, 0, 1];

/// All depth-`n` words, each padded by two fixed tails of length `pad`.
pub fn probes(arity: u8, n: usize, pad: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for w in Word::all_of_length(arity, n) {
        for shift in 0..2 {
            let mut v = w.0.clone();
            v.extend((0..pad).map(|i| PAD[(i + shift * 5) % PAD.len()] % arity));
            out.push(v);
        }
    }
    out
}

/// `Some(image prefix)`, `None` if undefined. Panics if the probe is too shallow.
pub fn point(f: &PartialMap, w: &[u8]) -> Option<Vec<u8>> {
    match f.eval(w) {
        Eval::Image(p, _) => Some(p.0),
        Eval::Undefined => None,
        Eval::TooShallow => panic!("probe {w:?} too shallow for {f}"),
    }
}

/// Pointwise evaluation of `f1 ∘ f2 ∘ ... ∘ fk` (rightmost first).
pub fn point_chain(fs: &[&PartialMap], w: &[u8]) -> Option<Vec<u8>> {
    let mut cur = w.to_vec();
    for f in fs.iter().rev() {
        cur = point(f, &cur)?;
    }
    Some(cur)
}

pub fn agree(a: &Option<Vec<u8>>, b: &Option<Vec<u8>>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => {
            let n = x.len().min(y.len());
            x[..n] == y[..n]
        }
        _ => false,
    }
}

/// Whether `f` and `g` agree on every probe of depth `n`.
pub fn same_on_probes(f: &PartialMap, g: &PartialMap, n: usize) -> bool {
    let pad = f.depth().max(g.depth()) + 8;
    probes(f.arity(), n, pad)
        .iter()
        .all(|w| agree(&point(f, w), &point(g, w)))
}
