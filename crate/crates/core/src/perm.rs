//! Permutations of `0..n` as image vectors: `p[i]` is the image of `i`.

use itertools::Itertools;

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

pub fn is_perm(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

/// `(p ∘ q)(i) = p(q(i))`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&i| p[i]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

pub fn is_even(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for i in 0..p.len() {
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    transpositions % 2 == 0
}

/// The cycle `c[0] -> c[1] -> ... -> c[0]` on `0..n`.
pub fn cycle(n: usize, c: &[usize]) -> Perm {
    let mut p = identity(n);
    for (k, &i) in c.iter().enumerate() {
        p[i] = c[(k + 1) % c.len()];
    }
    p
}

/// `[p, q] = p q p⁻¹ q⁻¹`.
pub fn commutator(p: &[usize], q: &[usize]) -> Perm {
    compose(&compose(p, q), &compose(&inverse(p), &inverse(q)))
}

/// All permutations of `0..n` in lexicographic order.
pub fn symmetric(n: usize) -> Vec<Perm> {
    (0..n).permutations(n).collect()
}

pub fn alternating(n: usize) -> Vec<Perm> {
    symmetric(n).into_iter().filter(|p| is_even(p)).collect()
}

/// The permutation of `0..n` acting as `p` on the positions `at` and fixing the rest.
pub fn embed(n: usize, at: &[usize], p: &[usize]) -> Perm {
    let mut out = identity(n);
    for (k, &i) in at.iter().enumerate() {
        out[i] = at[p[k]];
    }
    out
}
