//! Multisections: families of pairwise disjoint clopens `e_1..e_d` with transporters
//! `f_i: e_1 -> e_i`, and the units `element(S, π)` permuting them.

mod cover;
pub mod express;
mod extend;
pub mod kit;

pub use cover::{eval_piece_word, factor_over_cover, factor_over_pieces, Cover, PieceWord};
pub use extend::extend_degree;

use std::fmt;

use serde::Serialize;

use crate::clopen::Clopen;
use crate::error::{Error, Result};
use crate::perm;
use crate::pmap::PartialMap;

#[derive(Clone, Debug)]
pub struct Multisection {
    arity: u8,
    idems: Vec<Clopen>,
    trans: Vec<PartialMap>,
}

impl Multisection {
    /// `maps` supply `f_2..f_d`; each must have domain exactly `e1`.
    pub fn build(e1: &Clopen, maps: &[PartialMap]) -> Result<Self> {
        let arity = e1.arity();
        if e1.is_empty() {
            return Err(Error::EmptyRestriction);
        }
        let mut idems = vec![e1.clone()];
        let mut trans = vec![PartialMap::as_idempotent(e1)];
        for (i, m) in maps.iter().enumerate() {
            if m.arity() != arity {
                return Err(Error::AlphabetMismatch { left: arity, right: m.arity() });
            }
            if m.dom() != *e1 {
                return Err(Error::DomainMismatch(i));
            }
            let r = m.ran();
            if idems.iter().any(|e| !e.disjoint(&r).unwrap_or(false)) {
                return Err(Error::OverlappingIdempotents);
            }
            idems.push(r);
            trans.push(m.clone());
        }
        Ok(Multisection { arity, idems, trans })
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn degree(&self) -> usize {
        self.idems.len()
    }

    pub fn idems(&self) -> &[Clopen] {
        &self.idems
    }

    pub fn transporters(&self) -> &[PartialMap] {
        &self.trans
    }

    pub fn base(&self) -> &Clopen {
        &self.idems[0]
    }

    /// `f_{ij} = f_j · f_i*`, from `e_i` onto `e_j`.
    pub fn f(&self, i: usize, j: usize) -> PartialMap {
        self.trans[j].mul(&self.trans[i].star())
    }

    pub fn support(&self) -> Clopen {
        let words = self.idems.iter().flat_map(|e| e.words().iter().cloned()).collect();
        Clopen::normalize_unchecked(self.arity, words)
    }

    /// Index of the idempotent containing `c`, if any.
    pub fn idem_containing(&self, c: &Clopen) -> Option<usize> {
        self.idems.iter().position(|e| c.leq(e).unwrap_or(false))
    }

    /// The unit moving `e_i` onto `e_{π(i)}` and fixing everything off the support.
    pub fn element(&self, p: &[usize]) -> Result<PartialMap> {
        if p.len() != self.degree() || !perm::is_perm(p) {
            return Err(Error::BadPermutation(p.len()));
        }
        let mut parts: Vec<PartialMap> = (0..self.degree()).map(|i| self.f(i, p[i])).collect();
        parts.push(PartialMap::as_idempotent(&self.support().complement()));
        Ok(PartialMap::join_unchecked(self.arity, &parts))
    }

    pub fn sym_group(&self) -> Vec<PartialMap> {
        perm::symmetric(self.degree()).iter().map(|p| self.element(p).expect("valid perm")).collect()
    }

    pub fn alt_group(&self) -> Vec<PartialMap> {
        perm::alternating(self.degree()).iter().map(|p| self.element(p).expect("valid perm")).collect()
    }

    /// Restriction to a nonempty `e ≤ e_1`.
    pub fn restrict_msec(&self, e: &Clopen) -> Result<Self> {
        if e.is_empty() || !e.leq(self.base())? {
            return Err(Error::EmptyRestriction);
        }
        let maps: Vec<PartialMap> = self.trans[1..].iter().map(|f| f.restrict(e)).collect();
        Self::build(e, &maps)
    }

    /// The sub-multisection on the idempotents `at`, based at `e_{at[0]}`.
    pub fn sub(&self, at: &[usize]) -> Result<Self> {
        if at.is_empty() || at.iter().any(|&i| i >= self.degree()) || !distinct(at) {
            return Err(Error::BadParameters(format!("bad index list {at:?}")));
        }
        let maps: Vec<PartialMap> = at[1..].iter().map(|&j| self.f(at[0], j)).collect();
        Self::build(&self.idems[at[0]], &maps)
    }

    /// Re-checks every axiom from scratch.
    pub fn verify(&self) -> bool {
        let d = self.degree();
        if d < 1 || self.idems.iter().any(|e| e.is_empty()) {
            return false;
        }
        for i in 0..d {
            for j in i + 1..d {
                if !self.idems[i].disjoint(&self.idems[j]).unwrap_or(false) {
                    return false;
                }
            }
        }
        if !self.trans[0].eq(&PartialMap::as_idempotent(&self.idems[0])) {
            return false;
        }
        (0..d).all(|i| {
            (0..d).all(|j| {
                let f = self.f(i, j);
                f.dom() == self.idems[i] && f.ran() == self.idems[j] && (i != j || f.is_idempotent())
            })
        })
    }
}

fn distinct(at: &[usize]) -> bool {
    at.iter().enumerate().all(|(k, x)| !at[..k].contains(x))
}

impl fmt::Display for Multisection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "msec({};", self.idems[0])?;
        for (k, t) in self.trans[1..].iter().enumerate() {
            write!(f, "{} {t}", if k == 0 { "" } else { "," })?;
        }
        write!(f, ")")
    }
}

impl Serialize for Multisection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Combines `s1` and `s2` along the idempotents `i1` of `s1` and `i2` of `s2`.
///
/// The output is based at `e = e1_{i1} ∩ e2_{i2}`; its idempotents are `e`, then the
/// images of `e` in the other idempotents of `s1` (in order), then those of `s2`.
pub fn combine(s1: &Multisection, i1: usize, s2: &Multisection, i2: usize) -> Result<Multisection> {
    if i1 >= s1.degree() || i2 >= s2.degree() {
        return Err(Error::BadParameters("combine index out of range".into()));
    }
    let e = s1.idems[i1].meet(&s2.idems[i2])?;
    if e.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    if s1.support().meet(&s2.support())? != e {
        return Err(Error::SupportsOverlapElsewhere);
    }
    let mut maps = Vec::new();
    for (s, i) in [(s1, i1), (s2, i2)] {
        for j in (0..s.degree()).filter(|&j| j != i) {
            maps.push(s.f(i, j).restrict(&e));
        }
    }
    Multisection::build(&e, &maps)
}

/// Where `combine(s1, i1, s2, i2)` places the idempotents of `s1` and of `s2`.
pub fn combine_positions(d1: usize, i1: usize, d2: usize, i2: usize) -> (Vec<usize>, Vec<usize>) {
    let mut next = 1;
    let mut place = |d: usize, i: usize| -> Vec<usize> {
        (0..d)
            .map(|j| {
                if j == i {
                    0
                } else {
                    next += 1;
                    next - 1
                }
            })
            .collect()
    };
    let p1 = place(d1, i1);
    let p2 = place(d2, i2);
    (p1, p2)
}
