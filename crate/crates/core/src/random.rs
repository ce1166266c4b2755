//! Seeded random sampling of clopens and partial maps, for property tests and sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clopen::{Clopen, Word};
use crate::pmap::{Branch, PartialMap};
use crate::tail::{adding_machine, grig, TailElement};

pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Which tails may decorate sampled branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailMix {
    Trivial,
    Automata,
}

fn random_tail<R: Rng>(rng: &mut R, arity: u8, mix: TailMix) -> TailElement {
    if mix == TailMix::Trivial || rng.gen_bool(0.4) {
        return TailElement::identity();
    }
    let add = TailElement::state(&adding_machine(arity).unwrap(), 0);
    let mut pool = vec![add.clone(), add.invert()];
    if arity == 2 {
        pool.extend(["a", "b", "c", "d"].iter().map(|s| grig(s)));
    }
    let len = rng.gen_range(1..=2);
    (0..len).fold(TailElement::identity(), |t, _| t.mul(pool.choose(rng).unwrap()))
}

/// A random complete prefix code obtained by `splits` leaf splittings, leaves of depth < `max_depth` only.
pub fn random_code<R: Rng>(rng: &mut R, arity: u8, max_depth: usize, splits: usize) -> Vec<Word> {
    let mut leaves = vec![Word::empty()];
    for _ in 0..splits {
        let open: Vec<usize> = (0..leaves.len()).filter(|&i| leaves[i].len() < max_depth).collect();
        let Some(&i) = open.choose(rng) else { break };
        let w = leaves.swap_remove(i);
        leaves.extend((0..arity).map(|x| w.child(x)));
    }
    leaves
}

fn max_splits(arity: u8, max_depth: usize) -> usize {
    // a full tree of depth max_depth has (d^n - 1)/(d - 1) internal nodes
    let d = arity as usize;
    (d.pow(max_depth as u32) - 1) / (d - 1)
}

/// A random unit whose branch words have length ≤ `max_depth`.
pub fn random_unit<R: Rng>(rng: &mut R, arity: u8, max_depth: usize, mix: TailMix) -> PartialMap {
    let cap = max_splits(arity, max_depth).min(6);
    let splits = rng.gen_range(0..=cap);
    let dom = random_code(rng, arity, max_depth, splits);
    let mut ran = random_code(rng, arity, max_depth, splits);
    while ran.len() != dom.len() {
        ran = random_code(rng, arity, max_depth, splits);
    }
    ran.shuffle(rng);
    let branches = dom
        .into_iter()
        .zip(ran)
        .map(|(d, r)| Branch::new(d, r, random_tail(rng, arity, mix)))
        .collect();
    PartialMap::new(arity, branches).expect("codes are antichains")
}

/// A random partial map: a random sub-table of a random unit.
pub fn random_map<R: Rng>(rng: &mut R, arity: u8, max_depth: usize, mix: TailMix) -> PartialMap {
    let u = random_unit(rng, arity, max_depth, mix);
    let keep: Vec<Branch> = u.branches().iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
    PartialMap::new(arity, keep).expect("sub-table of a valid table")
}

/// A random union of depth-`n` atoms.
pub fn random_clopen<R: Rng>(rng: &mut R, arity: u8, n: usize) -> Clopen {
    let words = Word::all_of_length(arity, n).into_iter().filter(|_| rng.gen_bool(0.5));
    Clopen::normalize_unchecked(arity, words.collect())
}

/// A random partition of `X` into cylinders of depth ≤ `max_depth`, grouped into at most `parts` blocks.
pub fn random_partition<R: Rng>(rng: &mut R, arity: u8, max_depth: usize, parts: usize) -> Vec<Clopen> {
    let splits = rng.gen_range(0..=max_splits(arity, max_depth).min(4));
    let code = random_code(rng, arity, max_depth, splits);
    let k = rng.gen_range(1..=parts.max(1)).min(code.len());
    let mut blocks: Vec<Vec<Word>> = vec![Vec::new(); k];
    for (i, w) in code.into_iter().enumerate() {
        let j = if i < k { i } else { rng.gen_range(0..k) };
        blocks[j].push(w);
    }
    blocks.into_iter().map(|b| Clopen::normalize_unchecked(arity, b)).collect()
}
