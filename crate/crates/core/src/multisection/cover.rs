use serde::Serialize;

use super::Multisection;
use crate::certificate::{bounds, Certificate};
use crate::clopen::Clopen;
use crate::error::{Error, Result};
use crate::perm::{self, Perm};
use crate::pmap::PartialMap;
use crate::search::EqIndex;

/// A parent multisection together with restrictions of it whose bases cover its base.
#[derive(Clone, Debug)]
pub struct Cover {
    parent: Multisection,
    pieces: Vec<Multisection>,
}

/// One letter of a factorization: `element(pieces[piece], perm)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceWord {
    pub piece: usize,
    pub perm: Perm,
}

impl Cover {
    /// Checks the cover axioms: piece idempotent `i` lies below parent idempotent `i`,
    /// piece transporters are restrictions of the parent's, and each parent transporter
    /// is the join of the corresponding piece transporters.
    pub fn new(parent: Multisection, pieces: Vec<Multisection>) -> Result<Self> {
        let d = parent.degree();
        if pieces.is_empty() {
            return Err(Error::BadSubdivision);
        }
        for p in &pieces {
            if p.degree() != d {
                return Err(Error::BadSubdivision);
            }
            for i in 0..d {
                if !p.idems()[i].leq(&parent.idems()[i])? || !p.transporters()[i].leq(&parent.transporters()[i]) {
                    return Err(Error::BadSubdivision);
                }
            }
        }
        for i in 0..d {
            let parts: Vec<PartialMap> = pieces.iter().map(|p| p.transporters()[i].clone()).collect();
            let joined = PartialMap::join(&parts).map_err(|_| Error::BadSubdivision)?;
            if !joined.eq(&parent.transporters()[i]) {
                return Err(Error::BadSubdivision);
            }
        }
        Ok(Cover { parent, pieces })
    }

    pub fn parent(&self) -> &Multisection {
        &self.parent
    }

    pub fn pieces(&self) -> &[Multisection] {
        &self.pieces
    }

    pub fn pairwise_disjoint(&self) -> bool {
        self.pieces.iter().enumerate().all(|(i, a)| {
            self.pieces[i + 1..].iter().all(|b| a.base().disjoint(b.base()).unwrap_or(false))
        })
    }
}

/// The cover of `s` by its restrictions to the parts of a partition of `e_1`.
pub fn cover_of(s: &Multisection, subdivision: &[Clopen]) -> Result<Cover> {
    let mut seen = Clopen::empty(s.arity());
    for part in subdivision {
        if part.is_empty() || !seen.disjoint(part)? {
            return Err(Error::BadSubdivision);
        }
        seen = seen.union(part)?;
    }
    if seen != *s.base() {
        return Err(Error::BadSubdivision);
    }
    let pieces = subdivision.iter().map(|p| s.restrict_msec(p)).collect::<Result<Vec<_>>>()?;
    Cover::new(s.clone(), pieces)
}

impl Multisection {
    pub fn cover_of(&self, subdivision: &[Clopen]) -> Result<Cover> {
        cover_of(self, subdivision)
    }
}

pub fn eval_piece_word(arity: u8, pieces: &[Multisection], word: &[PieceWord]) -> PartialMap {
    let elems: Vec<PartialMap> =
        word.iter().map(|w| pieces[w.piece].element(&w.perm).expect("valid letter")).collect();
    PartialMap::product(arity, elems.iter())
}

fn commutator_pair(p: &[usize]) -> Option<(Perm, Perm)> {
    let alt = perm::alternating(p.len());
    for a in &alt {
        for b in &alt {
            if perm::commutator(a, b) == p {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

/// Words acting as `π` on the orbit of the union of the first `k` piece bases.
struct Seeder<'a> {
    cover: &'a Cover,
    max_len: usize,
}

impl Seeder<'_> {
    fn word(&self, k: usize, p: &[usize]) -> Option<Vec<PieceWord>> {
        let pieces = self.cover.pieces();
        let letter = |q: &[usize]| PieceWord { piece: k - 1, perm: q.to_vec() };
        if k == 1 {
            return Some(vec![letter(p)]);
        }
        let covered = union(&pieces[..k - 1]);
        let b = pieces[k - 1].base();
        let w = if covered.disjoint(b).ok()? {
            let mut w = self.word(k - 1, p)?;
            w.push(letter(p));
            w
        } else if b.leq(&covered).ok()? {
            self.word(k - 1, p)?
        } else if covered.leq(b).ok()? {
            vec![letter(p)]
        } else {
            // (π,π,1)·(1,π,π)·[(α,α,1),(1,β,β)] with [α,β] = π⁻¹
            let (a, bb) = commutator_pair(&perm::inverse(p))?;
            let mut w = self.word(k - 1, p)?;
            w.push(letter(p));
            w.extend(self.word(k - 1, &a)?);
            w.push(letter(&bb));
            w.extend(self.word(k - 1, &perm::inverse(&a))?);
            w.push(letter(&perm::inverse(&bb)));
            w
        };
        (w.len() <= self.max_len).then_some(w)
    }
}

fn union(pieces: &[Multisection]) -> Clopen {
    let words = pieces.iter().flat_map(|p| p.base().words().iter().cloned()).collect();
    Clopen::normalize_unchecked(pieces[0].arity(), words)
}

/// Factors `element(parent, π)` over the Alt groups of the pieces.
///
/// Disjoint pieces give the commuting product directly; overlapping ones are handled by
/// commutator seeding, then by breadth-first search over the generated group.
pub fn factor_over_cover(target: &PartialMap, p: &[usize], cover: &Cover, budget: u64) -> Result<Certificate<Vec<PieceWord>>> {
    if !perm::is_perm(p) || p.len() != cover.parent().degree() {
        return Err(Error::BadPermutation(p.len()));
    }
    if !perm::is_even(p) {
        return Err(Error::NotInAlt);
    }
    if !cover.parent().element(p)?.eq(target) {
        return Err(Error::BadParameters("target is not element(S, π)".into()));
    }
    let arity = target.arity();
    let b = bounds(&[("budget", budget)]);
    let seeded = if cover.pairwise_disjoint() {
        Some((0..cover.pieces().len()).map(|k| PieceWord { piece: k, perm: p.to_vec() }).collect())
    } else {
        Seeder { cover, max_len: budget as usize }.word(cover.pieces().len(), p)
    };
    if let Some(w) = seeded {
        if eval_piece_word(arity, cover.pieces(), &w).eq(target) {
            let n = w.len() as u64;
            return Ok(Certificate::witness(w, b, n));
        }
    }
    factor_over_pieces(target, cover.pieces(), budget)
}

/// Breadth-first search over products of Alt elements of `pieces` for `target`.
pub fn factor_over_pieces(target: &PartialMap, pieces: &[Multisection], budget: u64) -> Result<Certificate<Vec<PieceWord>>> {
    let arity = target.arity();
    let b = bounds(&[("budget", budget)]);
    let mut gens: Vec<(PieceWord, PartialMap)> = Vec::new();
    for (k, s) in pieces.iter().enumerate() {
        for q in perm::alternating(s.degree()).into_iter().filter(|q| !perm::is_identity(q)) {
            let e = s.element(&q)?;
            gens.push((PieceWord { piece: k, perm: q }, e));
        }
    }
    let mut index: EqIndex<Vec<usize>> = EqIndex::new(arity);
    index.insert(PartialMap::one(arity), Vec::new());
    let to_word = |w: &[usize]| -> Vec<PieceWord> { w.iter().map(|&g| gens[g].0.clone()).collect() };
    if let Some(i) = index.find(target) {
        return Ok(Certificate::witness(to_word(&index.items()[i].1), b, 0));
    }
    let mut frontier = vec![0usize];
    let mut nodes = 0u64;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &i in &frontier {
            for (g, (_, e)) in gens.iter().enumerate() {
                if nodes >= budget {
                    let f = serde_json::json!({ "elements_found": index.len() });
                    return Ok(Certificate::exhausted(f, b, nodes));
                }
                nodes += 1;
                let (m, w) = &index.items()[i];
                let prod = m.mul(e);
                let mut word = w.clone();
                word.push(g);
                let hit = prod.eq(target);
                if let Some(j) = index.insert(prod, word) {
                    if hit {
                        return Ok(Certificate::witness(to_word(&index.items()[j].1), b, nodes));
                    }
                    next.push(j);
                }
            }
        }
        frontier = next;
    }
    let r = serde_json::json!({ "group_order": index.len() });
    Ok(Certificate::refuted(r, b, nodes))
}
