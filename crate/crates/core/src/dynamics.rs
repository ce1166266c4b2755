//! Finite-depth certificates for minimality, expansivity and compressibility of a group
//! of units, plus the splitting constructions that go with them.

use std::collections::HashSet;

use serde::Serialize;
use serde_json::json;

use crate::certificate::{bounds, Certificate};
use crate::clopen::{is_partition, part_of, Clopen, Word};
use crate::completion::GeneratorTable;
use crate::error::{Error, Result};
use crate::pmap::PartialMap;
use crate::search::EqIndex;

pub const DEFAULT_BUDGET: u64 = 100_000;

/// The group generated by a table of units.
#[derive(Clone, Debug)]
pub struct DynContext {
    arity: u8,
    names: Vec<String>,
    gens: Vec<PartialMap>,
    pub budget: u64,
}

impl DynContext {
    /// With `symmetric`, inverses missing from the table are added.
    pub fn new(table: &GeneratorTable, symmetric: bool) -> Result<Self> {
        if let Some((name, _)) = table.iter().find(|(_, m)| !m.is_unit()) {
            return Err(Error::BadParameters(format!("generator `{name}` is not a unit")));
        }
        let t = if symmetric { table.symmetrized() } else { table.clone() };
        Ok(DynContext {
            arity: t.arity(),
            names: t.names().to_vec(),
            gens: t.maps().to_vec(),
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn gens(&self) -> &[PartialMap] {
        &self.gens
    }

    /// Generator names of a word, leftmost acting last.
    pub fn spell(&self, w: &[usize]) -> Vec<String> {
        w.iter().map(|&i| self.names[i].clone()).collect()
    }

    /// Visits the distinct elements of word length ≤ `max_len` in breadth-first order
    /// (identity first) until `visit` returns true.
    fn walk(&self, max_len: usize, mut visit: impl FnMut(usize, &PartialMap, &[usize]) -> bool) -> Walk {
        let mut index: EqIndex<Vec<usize>> = EqIndex::new(self.arity);
        index.insert(PartialMap::one(self.arity), Vec::new());
        let mut nodes = 1u64;
        if visit(0, &index.items()[0].0, &[]) {
            return Walk { nodes, complete: false };
        }
        let mut frontier = vec![0usize];
        for len in 1..=max_len {
            let mut next = Vec::new();
            for &i in &frontier {
                for (g, m) in self.gens.iter().enumerate() {
                    if nodes >= self.budget {
                        return Walk { nodes, complete: false };
                    }
                    nodes += 1;
                    let (x, w) = &index.items()[i];
                    let y = x.mul(m);
                    let mut word = w.clone();
                    word.push(g);
                    if let Some(j) = index.insert(y, word) {
                        next.push(j);
                        let (y, word) = &index.items()[j];
                        if visit(len, y, word) {
                            return Walk { nodes, complete: false };
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Walk { nodes, complete: true }
    }
}

struct Walk {
    nodes: u64,
    /// Every element up to the length bound was visited.
    complete: bool,
}

fn inconclusive<W>(complete: bool, what: serde_json::Value, b: serde_json::Map<String, serde_json::Value>, nodes: u64) -> Certificate<W> {
    if complete {
        Certificate::refuted(what, b, nodes)
    } else {
        Certificate::exhausted(what, b, nodes)
    }
}

fn atoms(arity: u8, n: usize) -> Vec<Word> {
    Word::all_of_length(arity, n)
}

/// Deepest cell depth used when comparing translates.
const MAX_CELL_DEPTH: usize = 18;

#[derive(Clone, Debug, Serialize)]
pub struct ExpansiveWitness {
    pub depth: usize,
    /// Shortest length at which every pair is already separated.
    pub word_len: usize,
    pub translates: usize,
    pub pairs: usize,
}

/// Whether the Boolean algebra generated by the translates `w(α)`, `α ∈ p`, `|w| ≤ max_len`,
/// separates every pair of depth-`n` cylinders.
pub fn expansive_certificate(ctx: &DynContext, p: &[Clopen], n: usize, max_len: usize) -> Result<Certificate<ExpansiveWitness>> {
    if !is_partition(p) {
        return Err(Error::NotAPartition);
    }
    let b = bounds(&[("depth", n as u64), ("max_len", max_len as u64), ("budget", ctx.budget)]);
    let mut seen: HashSet<Clopen> = HashSet::new();
    let mut translates: Vec<(usize, Clopen)> = Vec::new();
    let walk = ctx.walk(max_len, |len, m, _| {
        for a in p {
            let t = m.image(a);
            if seen.insert(t.clone()) {
                translates.push((len, t));
            }
        }
        false
    });
    let depth = translates.iter().map(|(_, t)| t.depth()).max().unwrap_or(0).max(n);
    if depth > MAX_CELL_DEPTH {
        return Ok(Certificate::exhausted(json!({ "translate_depth": depth }), b, walk.nodes));
    }
    // signature of each depth-`depth` cell: which translates contain it
    let words = 64;
    let cells = atoms(ctx.arity, depth);
    let sig: Vec<Vec<u64>> = cells
        .iter()
        .map(|c| {
            let mut s = vec![0u64; translates.len().div_ceil(words)];
            for (k, (_, t)) in translates.iter().enumerate() {
                if t.contains_cylinder(c) {
                    s[k / words] |= 1 << (k % words);
                }
            }
            s
        })
        .collect();
    let per_atom = (ctx.arity as usize).pow((depth - n) as u32);
    let top = atoms(ctx.arity, n);
    let unseparated = |upto: usize| -> Option<(usize, usize)> {
        let mask = |s: &Vec<u64>| -> Vec<u64> {
            let mut v = s.clone();
            for (k, x) in v.iter_mut().enumerate() {
                let lo = k * words;
                if upto <= lo {
                    *x = 0;
                } else if upto < lo + words {
                    *x &= (1u64 << (upto - lo)) - 1;
                }
            }
            v
        };
        let sets: Vec<HashSet<Vec<u64>>> =
            (0..top.len()).map(|i| sig[i * per_atom..(i + 1) * per_atom].iter().map(mask).collect()).collect();
        (0..top.len()).flat_map(|i| (i + 1..top.len()).map(move |j| (i, j))).find(|&(i, j)| !sets[i].is_disjoint(&sets[j]))
    };
    if let Some((i, j)) = unseparated(translates.len()) {
        let r = json!({ "pair": [top[i].to_string(), top[j].to_string()], "translates": translates.len() });
        return Ok(inconclusive(walk.complete, r, b, walk.nodes));
    }
    let word_len = (0..=max_len)
        .find(|&l| unseparated(translates.iter().filter(|(len, _)| *len <= l).count()).is_none())
        .unwrap_or(max_len);
    let pairs = top.len() * top.len().saturating_sub(1) / 2;
    Ok(Certificate::witness(ExpansiveWitness { depth: n, word_len, translates: translates.len(), pairs }, b, walk.nodes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeEntry {
    Part(usize),
    TooShallow,
}

/// The window `(part of w(x))_w` of the coding of any point `x` with the given prefix.
pub fn subshift_code(p: &[Clopen], prefix: &Word, words: &[PartialMap]) -> Vec<CodeEntry> {
    words
        .iter()
        .map(|w| match w.image_prefix(prefix) {
            Some(img) => match part_of(p, &Clopen::cylinder(w.arity(), img)) {
                Some(i) => CodeEntry::Part(i),
                None => CodeEntry::TooShallow,
            },
            None => CodeEntry::TooShallow,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Hit {
    pub from: Word,
    pub to: Word,
    pub word: Vec<usize>,
}

/// Whether every ordered pair `(α, β)` of depth-`n` cylinders has `w(α) ∩ β ≠ ∅` for some
/// `|w| ≤ max_len`.
pub fn minimal_certificate(ctx: &DynContext, n: usize, max_len: usize) -> Certificate<Vec<Hit>> {
    let b = bounds(&[("depth", n as u64), ("max_len", max_len as u64), ("budget", ctx.budget)]);
    let top = atoms(ctx.arity, n);
    let k = top.len();
    let mut hit: Vec<Option<Vec<usize>>> = vec![None; k * k];
    let mut open = k * k;
    let walk = ctx.walk(max_len, |_, m, w| {
        for (i, a) in top.iter().enumerate() {
            let img = m.image(&Clopen::cylinder(ctx.arity, a.clone()));
            for (j, c) in top.iter().enumerate() {
                if hit[i * k + j].is_none() && !img.disjoint(&Clopen::cylinder(ctx.arity, c.clone())).unwrap_or(true) {
                    hit[i * k + j] = Some(w.to_vec());
                    open -= 1;
                }
            }
        }
        open == 0
    });
    match hit.iter().position(Option::is_none) {
        None => {
            let hits = hit
                .into_iter()
                .enumerate()
                .map(|(x, w)| Hit { from: top[x / k].clone(), to: top[x % k].clone(), word: w.expect("all hit") })
                .collect();
            Certificate::witness(hits, b, walk.nodes)
        }
        Some(x) => {
            let r = json!({ "pair": [top[x / k].to_string(), top[x % k].to_string()] });
            inconclusive(walk.complete, r, b, walk.nodes)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Compression {
    pub word: Vec<usize>,
    pub image: Clopen,
}

/// Searches for `|w| ≤ max_len` with `w(y)` a proper subset of `z`.
pub fn compress_search(ctx: &DynContext, y: &Clopen, z: &Clopen, max_len: usize) -> Result<Certificate<Compression>> {
    if y.is_empty() || z.is_empty() {
        return Err(Error::EmptyInput);
    }
    if z.is_full() {
        return Err(Error::BadParameters("target clopen must be proper".into()));
    }
    let b = bounds(&[("max_len", max_len as u64), ("budget", ctx.budget)]);
    let mut found = None;
    let walk = ctx.walk(max_len, |_, m, w| {
        let img = m.image(y);
        if strictly_inside(&img, z) {
            found = Some(Compression { word: w.to_vec(), image: img });
        }
        found.is_some()
    });
    Ok(match found {
        Some(c) => Certificate::witness(c, b, walk.nodes),
        None => Certificate::exhausted(json!({ "y": y.to_string(), "z": z.to_string() }), b, walk.nodes),
    })
}

fn strictly_inside(a: &Clopen, z: &Clopen) -> bool {
    a.leq(z).unwrap_or(false) && a != z
}

#[derive(Clone, Debug, Serialize)]
pub struct CompressReport {
    pub depth: usize,
    pub max_len: usize,
    pub pairs: usize,
    pub passed: usize,
    pub failures: Vec<(Clopen, Clopen)>,
    pub all_pass: bool,
    pub nodes_explored: u64,
    /// Whether the whole ball was searched (otherwise failures may be budget artefacts).
    pub complete: bool,
}

/// Runs the compression search over every ordered pair of proper nonempty unions of
/// depth-`n` cylinders, sharing one breadth-first walk.
pub fn fully_compressible_sample(ctx: &DynContext, n: usize, max_len: usize) -> CompressReport {
    let top = atoms(ctx.arity, n);
    let sets: Vec<Clopen> = (1..(1usize << top.len()).saturating_sub(1))
        .map(|mask| {
            let words = top.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| w.clone()).collect();
            Clopen::normalize_unchecked(ctx.arity, words)
        })
        .collect();
    let k = sets.len();
    let mut done = vec![false; k * k];
    let mut open = k * k;
    let walk = if open == 0 {
        Walk { nodes: 0, complete: true }
    } else {
        ctx.walk(max_len, |_, m, _| {
            for (i, y) in sets.iter().enumerate() {
                let img = m.image(y);
                for (j, z) in sets.iter().enumerate() {
                    if !done[i * k + j] && strictly_inside(&img, z) {
                        done[i * k + j] = true;
                        open -= 1;
                    }
                }
            }
            open == 0
        })
    };
    let failures: Vec<(Clopen, Clopen)> = (0..k * k)
        .filter(|&x| !done[x])
        .map(|x| (sets[x / k].clone(), sets[x % k].clone()))
        .collect();
    CompressReport {
        depth: n,
        max_len,
        pairs: k * k,
        passed: k * k - failures.len(),
        all_pass: failures.is_empty(),
        failures,
        nodes_explored: walk.nodes,
        complete: walk.complete || open == 0,
    }
}

/// Searches for `k` words whose images of the cylinder `[u]` are pairwise disjoint.
pub fn orbit_lower_bound(ctx: &DynContext, u: &Word, k: usize, max_len: usize) -> Result<Certificate<Vec<Compression>>> {
    if k == 0 {
        return Err(Error::BadParameters("k must be at least 1".into()));
    }
    u.check(ctx.arity)?;
    let b = bounds(&[("k", k as u64), ("max_len", max_len as u64), ("budget", ctx.budget)]);
    let cyl = Clopen::cylinder(ctx.arity, u.clone());
    let mut images: Vec<Compression> = Vec::new();
    let mut seen: HashSet<Clopen> = HashSet::new();
    let mut chosen: Option<Vec<usize>> = None;
    let mut nodes = 0u64;
    let walk = ctx.walk(max_len, |_, m, w| {
        let img = m.image(&cyl);
        if !seen.insert(img.clone()) {
            return false;
        }
        images.push(Compression { word: w.to_vec(), image: img });
        // only look for sets containing the newest image
        let last = images.len() - 1;
        let mut pick = vec![last];
        let mut local = 0;
        chosen = extend_disjoint(&images, &mut pick, last, k, &mut local);
        nodes += local;
        chosen.is_some()
    });
    let nodes = nodes + walk.nodes;
    Ok(match chosen {
        Some(ix) => Certificate::witness(ix.into_iter().map(|i| images[i].clone()).collect(), b, nodes),
        None => Certificate::exhausted(json!({ "distinct_images": images.len(), "complete": walk.complete }), b, nodes),
    })
}

/// Per-image cap on the backtracking search for disjoint images.
const DISJOINT_SEARCH_CAP: u64 = 20_000;

fn extend_disjoint(images: &[Compression], pick: &mut Vec<usize>, below: usize, k: usize, nodes: &mut u64) -> Option<Vec<usize>> {
    if pick.len() == k {
        return Some(pick.clone());
    }
    for i in (0..below).rev() {
        *nodes += 1;
        if *nodes > DISJOINT_SEARCH_CAP {
            return None;
        }
        if pick.iter().all(|&j| images[i].image.disjoint(&images[j].image).unwrap_or(false)) {
            pick.push(i);
            if let Some(r) = extend_disjoint(images, pick, i, k, nodes) {
                return Some(r);
            }
            pick.pop();
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct Split {
    pub g1: PartialMap,
    pub g2: PartialMap,
    pub z: Clopen,
    pub h: PartialMap,
    pub h_word: Vec<usize>,
    /// Nonempty clopens fixed pointwise by `g1` and `g2`.
    pub fixed: [Clopen; 2],
}

impl Split {
    /// Re-checks `g1·g2 = g` and the two fixed sets.
    pub fn verify(&self, g: &PartialMap) -> bool {
        self.g1.mul(&self.g2).eq(g)
            && self.fixed.iter().zip([&self.g1, &self.g2]).all(|(f, gi)| {
                !f.is_empty() && gi.restrict(f).eq(&PartialMap::as_idempotent(f))
            })
    }
}

/// Writes `g = g1·g2` with each factor fixing a nonempty clopen pointwise: `g1` is `g` on
/// `Z ∪ hZ`, `g⁻¹` on `gZ ∪ ghZ` and the identity elsewhere, for a cylinder `Z` and an `h`
/// from the context making the four sets pairwise disjoint with a proper union.
/// Cylinders are tried shallowest first, then lexicographically.
pub fn split_unit(g: &PartialMap, ctx: &DynContext, max_depth: usize, max_len: usize) -> Result<Certificate<Split>> {
    let arity = ctx.arity;
    if g.arity() != arity {
        return Err(Error::AlphabetMismatch { left: arity, right: g.arity() });
    }
    if !g.is_unit() {
        return Err(Error::NotAUnit);
    }
    if g.eq(&PartialMap::one(arity)) {
        return Err(Error::IdentityInput);
    }
    let b = bounds(&[("max_depth", max_depth as u64), ("max_len", max_len as u64), ("budget", ctx.budget)]);
    let mut ball: Vec<(PartialMap, Vec<usize>)> = Vec::new();
    let walk = ctx.walk(max_len, |_, m, w| {
        ball.push((m.clone(), w.to_vec()));
        false
    });
    let mut nodes = walk.nodes;
    let gi = g.star();
    for depth in 1..=max_depth {
        for x in atoms(arity, depth) {
            let z = Clopen::cylinder(arity, x);
            let gz = g.image(&z);
            if !z.disjoint(&gz)? {
                continue;
            }
            for (h, hw) in &ball {
                nodes += 1;
                let hz = h.image(&z);
                let ghz = g.image(&hz);
                let four = [&z, &gz, &hz, &ghz];
                let disjoint = (0..4).all(|i| (i + 1..4).all(|j| four[i].disjoint(four[j]).unwrap_or(false)));
                if !disjoint {
                    continue;
                }
                let moved = z.union(&hz)?;
                let back = gz.union(&ghz)?;
                let rest = moved.union(&back)?.complement();
                if rest.is_empty() {
                    continue;
                }
                let g1 = PartialMap::join(&[g.restrict(&moved), gi.restrict(&back), PartialMap::as_idempotent(&rest)])?;
                let g2 = g1.star().mul(g);
                let split = Split { g1, g2, z: z.clone(), h: h.clone(), h_word: hw.clone(), fixed: [rest, z.clone()] };
                return Ok(Certificate::witness(split, b, nodes));
            }
        }
    }
    Ok(Certificate::exhausted(json!({ "ball": ball.len() }), b, nodes))
}

/// Splits a unit stabilizing every part of `p` into the factors `g_Y` (`g` on `Y`, the
/// identity elsewhere).
pub fn rigid_parts(g: &PartialMap, p: &[Clopen]) -> Result<Vec<PartialMap>> {
    if !is_partition(p) {
        return Err(Error::NotAPartition);
    }
    if !g.is_unit() {
        return Err(Error::NotAUnit);
    }
    if let Some(i) = p.iter().position(|y| g.image(y) != *y) {
        return Err(Error::NotPartwiseStabilizing(i));
    }
    p.iter()
        .map(|y| PartialMap::join(&[g.restrict(y), PartialMap::as_idempotent(&y.complement())]))
        .collect()
}
