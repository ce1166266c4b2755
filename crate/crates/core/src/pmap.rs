//! Clopen partial homeomorphisms of `A^N` as finite branch tables.
//!
//! A branch `u -> v : t` maps `u·z` to `v·t(z)`. Tables are kept in a
//! semi-canonical form: identity-acting tails are erased, full sibling
//! families that are verbatim the expansion of a parent branch are merged,
//! and branches are sorted by domain word. For trivial tails this is the
//! minimal tree-pair form, so structural equality coincides with [`PartialMap::eq`];
//! with automaton tails only [`PartialMap::eq`] is authoritative.

use std::collections::HashMap;
use std::fmt;

use crate::clopen::{Clopen, Word};
use crate::error::{Error, Result};
use crate::tail::{TailElement, DEFAULT_TAIL_BUDGET};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Branch {
    pub dom: Word,
    pub ran: Word,
    pub tail: TailElement,
}

impl Branch {
    pub fn new(dom: Word, ran: Word, tail: TailElement) -> Self {
        Branch { dom, ran, tail }
    }

    pub fn plain(dom: Word, ran: Word) -> Self {
        Branch { dom, ran, tail: TailElement::identity() }
    }

    /// The same branch restricted to the cylinder `dom·z`.
    pub fn refine(&self, z: &[u8]) -> Branch {
        let (img, sec) = self.tail.apply_prefix(z);
        Branch { dom: self.dom.concat(z), ran: self.ran.concat(&img), tail: sec }
    }

    /// The same branch corestricted to the cylinder `ran·z`.
    pub fn corefine(&self, z: &[u8]) -> Branch {
        let pre = self.tail.invert().apply_prefix(z).0;
        self.refine(&pre)
    }
}

/// Result of evaluating a partial map at a finite prefix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Eval {
    Undefined,
    TooShallow,
    Image(Word, TailElement),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialMap {
    arity: u8,
    branches: Vec<Branch>,
}

impl PartialMap {
    pub fn zero(arity: u8) -> Self {
        PartialMap { arity, branches: Vec::new() }
    }

    pub fn one(arity: u8) -> Self {
        PartialMap { arity, branches: vec![Branch::plain(Word::empty(), Word::empty())] }
    }

    pub fn as_idempotent(c: &Clopen) -> Self {
        PartialMap {
            arity: c.arity(),
            branches: c.words().iter().map(|w| Branch::plain(w.clone(), w.clone())).collect(),
        }
    }

    /// Validates a branch table and brings it to semi-canonical form.
    pub fn new(arity: u8, branches: Vec<Branch>) -> Result<Self> {
        if arity < 2 {
            return Err(Error::BadArity(arity));
        }
        for b in &branches {
            b.dom.check(arity)?;
            b.ran.check(arity)?;
            if let Some(a) = b.tail.arity() {
                if a != arity {
                    return Err(Error::AlphabetMismatch { left: arity, right: a });
                }
            }
        }
        for (i, b) in branches.iter().enumerate() {
            for c in &branches[i + 1..] {
                if b.dom.comparable(&c.dom) {
                    return Err(Error::ComparableDomains(b.dom.clone(), c.dom.clone()));
                }
                if b.ran.comparable(&c.ran) {
                    return Err(Error::ComparableRanges(b.ran.clone(), c.ran.clone()));
                }
            }
        }
        Ok(Self::from_branches(arity, branches))
    }

    /// Trivial-tail map from `(dom, ran)` word literals. Panics on invalid input.
    pub fn from_pairs(arity: u8, pairs: &[(&str, &str)]) -> Self {
        let branches = pairs
            .iter()
            .map(|(d, r)| Branch::plain(Word::from(*d), Word::from(*r)))
            .collect();
        Self::new(arity, branches).expect("valid branch table")
    }

    pub(crate) fn from_branches(arity: u8, branches: Vec<Branch>) -> Self {
        let mut m = PartialMap { arity, branches };
        m.canonicalize();
        m
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn is_zero(&self) -> bool {
        self.branches.is_empty()
    }

    /// Longest prefix word in the table.
    pub fn depth(&self) -> usize {
        self.branches
            .iter()
            .map(|b| b.dom.len().max(b.ran.len()))
            .max()
            .unwrap_or(0)
    }

    pub fn has_trivial_tails(&self) -> bool {
        self.branches.iter().all(|b| b.tail.is_empty())
    }

    fn canonicalize(&mut self) {
        for b in &mut self.branches {
            if !b.tail.is_empty() && b.tail.is_identity().unwrap_or(false) {
                b.tail = TailElement::identity();
            }
        }
        while self.merge_once() {}
        self.branches.sort_by(|a, b| a.dom.cmp(&b.dom));
    }

    fn merge_once(&mut self) -> bool {
        let d = self.arity as usize;
        let mut families: HashMap<&[u8], Vec<usize>> = HashMap::new();
        for (i, b) in self.branches.iter().enumerate() {
            if !b.dom.is_empty() && !b.ran.is_empty() {
                families.entry(&b.dom[..b.dom.len() - 1]).or_default().push(i);
            }
        }
        let mut merged: Option<(Vec<usize>, Branch)> = None;
        for (parent, idx) in &families {
            if idx.len() != d {
                continue;
            }
            if let Some(b) = self.merge_family(parent, idx) {
                merged = Some((idx.clone(), b));
                break;
            }
        }
        let Some((mut idx, parent)) = merged else {
            return false;
        };
        idx.sort_unstable();
        for i in idx.into_iter().rev() {
            self.branches.swap_remove(i);
        }
        self.branches.push(parent);
        true
    }

    fn merge_family(&self, parent: &[u8], idx: &[usize]) -> Option<Branch> {
        let d = self.arity as usize;
        let mut child: Vec<Option<&Branch>> = vec![None; d];
        for &i in idx {
            let b = &self.branches[i];
            child[*b.dom.last().unwrap() as usize] = Some(b);
        }
        let child: Vec<&Branch> = child.into_iter().collect::<Option<_>>()?;
        let r = &child[0].ran[..child[0].ran.len() - 1];
        let mut rho = Vec::with_capacity(d);
        for b in &child {
            if b.ran.len() != r.len() + 1 || &b.ran[..r.len()] != r {
                return None;
            }
            rho.push(*b.ran.last().unwrap());
        }
        let tail = if child.iter().all(|b| b.tail.is_empty())
            && rho.iter().enumerate().all(|(x, &y)| x as u8 == y)
        {
            TailElement::identity()
        } else {
            self.parent_tail(&child, &rho)?
        };
        Some(Branch::new(Word::from_slice(parent), Word::from_slice(r), tail))
    }

    // A single signed state from the children's machines whose expansion is the family.
    fn parent_tail(&self, child: &[&Branch], rho: &[u8]) -> Option<TailElement> {
        let mut tried: Vec<&str> = Vec::new();
        for b in child {
            for f in b.tail.factors() {
                let m = &f.machine;
                if tried.contains(&m.name()) {
                    continue;
                }
                tried.push(m.name());
                for s in 0..m.state_names().len() as u32 {
                    let q = TailElement::state(m, s);
                    for cand in [q.clone(), q.invert()] {
                        if cand.is_empty() || cand.root_perm(self.arity) != rho {
                            continue;
                        }
                        if (0..self.arity).all(|x| cand.act_letter(x).1 == child[x as usize].tail) {
                            return Some(cand);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn dom(&self) -> Clopen {
        Clopen::normalize_unchecked(self.arity, self.branches.iter().map(|b| b.dom.clone()).collect())
    }

    pub fn ran(&self) -> Clopen {
        Clopen::normalize_unchecked(self.arity, self.branches.iter().map(|b| b.ran.clone()).collect())
    }

    pub fn star(&self) -> PartialMap {
        let branches = self
            .branches
            .iter()
            .map(|b| Branch::new(b.ran.clone(), b.dom.clone(), b.tail.invert()))
            .collect();
        Self::from_branches(self.arity, branches)
    }

    /// `self ∘ g`: first `g`, then `self`, defined on `g⁻¹(dom(self) ∩ ran(g))`.
    pub fn compose(&self, g: &PartialMap) -> Result<PartialMap> {
        if self.arity != g.arity {
            return Err(Error::AlphabetMismatch { left: self.arity, right: g.arity });
        }
        Ok(self.mul(g))
    }

    pub(crate) fn mul(&self, g: &PartialMap) -> PartialMap {
        let mut out = Vec::new();
        for bg in &g.branches {
            for bf in &self.branches {
                if bg.ran.is_prefix_of(&bf.dom) {
                    let z = &bf.dom[bg.ran.len()..];
                    let r = bg.corefine(z);
                    out.push(Branch::new(r.dom, bf.ran.clone(), bf.tail.mul(&r.tail)));
                } else if bf.dom.is_prefix_of(&bg.ran) {
                    let z = &bg.ran[bf.dom.len()..];
                    let r = bf.refine(z);
                    out.push(Branch::new(bg.dom.clone(), r.ran, r.tail.mul(&bg.tail)));
                }
            }
        }
        Self::from_branches(self.arity, out)
    }

    /// Product of a sequence, leftmost acting last.
    pub fn product<'a, I>(arity: u8, items: I) -> PartialMap
    where
        I: IntoIterator<Item = &'a PartialMap>,
    {
        items.into_iter().fold(PartialMap::one(arity), |acc, x| acc.mul(x))
    }

    /// `self · e`: restriction of the domain to `e`.
    pub fn restrict(&self, e: &Clopen) -> PartialMap {
        let mut out = Vec::new();
        for b in &self.branches {
            for c in e.words() {
                if c.is_prefix_of(&b.dom) {
                    out.push(b.clone());
                } else if b.dom.is_prefix_of(c) {
                    out.push(b.refine(&c[b.dom.len()..]));
                }
            }
        }
        Self::from_branches(self.arity, out)
    }

    /// `e · self`: restriction of the range to `e`.
    pub fn corestrict(&self, e: &Clopen) -> PartialMap {
        let mut out = Vec::new();
        for b in &self.branches {
            for c in e.words() {
                if c.is_prefix_of(&b.ran) {
                    out.push(b.clone());
                } else if b.ran.is_prefix_of(c) {
                    out.push(b.corefine(&c[b.ran.len()..]));
                }
            }
        }
        Self::from_branches(self.arity, out)
    }

    /// The image `self(c ∩ dom)`.
    pub fn image(&self, c: &Clopen) -> Clopen {
        self.restrict(c).ran()
    }

    pub fn is_unit(&self) -> bool {
        self.dom().is_full() && self.ran().is_full()
    }

    pub fn is_idempotent(&self) -> bool {
        self.branches
            .iter()
            .all(|b| b.dom == b.ran && (b.tail.is_empty() || b.tail.is_identity().unwrap_or(false)))
    }

    /// Decides equality of the underlying partial homeomorphisms.
    pub fn try_eq(&self, other: &PartialMap) -> Result<bool> {
        if self == other {
            return Ok(true);
        }
        if self.arity != other.arity || self.dom() != other.dom() {
            return Ok(false);
        }
        for bx in &self.branches {
            for by in &other.branches {
                let (rx, ry) = if bx.dom.is_prefix_of(&by.dom) {
                    (bx.refine(&by.dom[bx.dom.len()..]), by.clone())
                } else if by.dom.is_prefix_of(&bx.dom) {
                    (bx.clone(), by.refine(&bx.dom[by.dom.len()..]))
                } else {
                    continue;
                };
                if rx.ran != ry.ran || !rx.tail.same_action(&ry.tail)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Semantic equality. Panics if a tail identity check exceeds the default budget.
    pub fn eq(&self, other: &PartialMap) -> bool {
        self.try_eq(other).unwrap_or_else(|e| {
            panic!("equality undecided within {DEFAULT_TAIL_BUDGET} section nodes: {e}")
        })
    }

    pub fn leq(&self, other: &PartialMap) -> bool {
        self.eq(&other.restrict(&self.dom()))
    }

    pub fn compatible(&self, other: &PartialMap) -> bool {
        self.star().mul(other).is_idempotent() && self.mul(&other.star()).is_idempotent()
    }

    pub fn disjoint(&self, other: &PartialMap) -> bool {
        self.dom().disjoint(&other.dom()).unwrap_or(false)
            && self.ran().disjoint(&other.ran()).unwrap_or(false)
    }

    /// Least upper bound of a pairwise compatible family.
    pub fn join(elems: &[PartialMap]) -> Result<PartialMap> {
        let Some(first) = elems.first() else {
            return Err(Error::EmptyInput);
        };
        let arity = first.arity;
        for (i, x) in elems.iter().enumerate() {
            if x.arity != arity {
                return Err(Error::AlphabetMismatch { left: arity, right: x.arity });
            }
            for (j, y) in elems.iter().enumerate().skip(i + 1) {
                if !(x.disjoint(y) || x.compatible(y)) {
                    return Err(Error::IncompatiblePair(i, j));
                }
            }
        }
        Ok(Self::join_unchecked(arity, elems))
    }

    pub(crate) fn join_unchecked(arity: u8, elems: &[PartialMap]) -> PartialMap {
        let all: Vec<&Branch> = elems.iter().flat_map(|e| e.branches.iter()).collect();
        let mut keep: Vec<Branch> = Vec::new();
        for (i, b) in all.iter().enumerate() {
            let covered = all.iter().enumerate().any(|(j, c)| {
                c.dom.is_prefix_of(&b.dom) && (c.dom.len() < b.dom.len() || j < i)
            });
            if !covered {
                keep.push((*b).clone());
            }
        }
        Self::from_branches(arity, keep)
    }

    pub fn eval(&self, w: &[u8]) -> Eval {
        for b in &self.branches {
            if b.dom.is_prefix_of(w) {
                let (img, sec) = b.tail.apply_prefix(&w[b.dom.len()..]);
                return Eval::Image(b.ran.concat(&img), sec);
            }
            if w.len() < b.dom.len() && b.dom.starts_with(w) {
                return Eval::TooShallow;
            }
        }
        Eval::Undefined
    }

    /// Image prefix of `w` (same length as `w` when `w` is deep enough).
    pub fn image_prefix(&self, w: &[u8]) -> Option<Word> {
        match self.eval(w) {
            Eval::Image(p, _) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.branches.is_empty() {
            return f.write_str("0");
        }
        if self.branches.len() == 1 {
            let b = &self.branches[0];
            if b.dom.is_empty() && b.ran.is_empty() && b.tail.is_empty() {
                return f.write_str("1");
            }
        }
        f.write_str("[")?;
        for (i, b) in self.branches.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", b.dom, b.ran)?;
            if !b.tail.is_empty() {
                write!(f, ":{}", b.tail)?;
            }
        }
        f.write_str("]")
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for PartialMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{agree, point, point_chain, probes, same_on_probes};
    use crate::random::{random_clopen, random_map, rng, TailMix};
    use crate::tail::{grig, odometer};

    fn pm(pairs: &[(&str, &str)]) -> PartialMap {
        PartialMap::from_pairs(2, pairs)
    }

    fn c(words: &[&str]) -> Clopen {
        Clopen::normalize(2, words.iter().map(|w| Word::from(*w))).unwrap()
    }

    fn with_tail(d: &str, r: &str, t: TailElement) -> PartialMap {
        PartialMap::new(2, vec![Branch::new(Word::from(d), Word::from(r), t)]).unwrap()
    }

    #[test]
    fn compose_examples() {
        let f = pm(&[("0", "10")]);
        let g = pm(&[("1", "0")]);
        let fg = f.compose(&g).unwrap();
        assert_eq!(fg, pm(&[("1", "10")]));
        for w in probes(2, 5, 6) {
            assert!(agree(&point(&fg, &w), &point_chain(&[&f, &g], &w)));
        }
        assert!(pm(&[("0", "1")]).compose(&pm(&[("0", "1")])).unwrap().is_zero());
        let ff = f.compose(&f.star()).unwrap();
        assert!(ff.is_idempotent());
        assert_eq!(ff.dom(), f.ran());
        assert_eq!(f.compose(&PartialMap::one(2)).unwrap(), f);
        assert!(f.compose(&PartialMap::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn star_examples() {
        let t = odometer();
        let f = with_tail("0", "10", t.clone());
        assert_eq!(f.star(), with_tail("10", "0", t.invert()));
        assert!(PartialMap::zero(2).star().is_zero());
        let e = PartialMap::as_idempotent(&c(&["01", "1"]));
        assert!(e.star().eq(&e));
    }

    #[test]
    fn dom_ran_examples() {
        let f = pm(&[("0", "10")]);
        assert_eq!(f.dom(), c(&["0"]));
        assert_eq!(f.ran(), c(&["10"]));
        assert!(PartialMap::as_idempotent(&Clopen::empty(2)).is_zero());
        let j = PartialMap::join(&[pm(&[("0", "1")]), pm(&[("10", "01")])]).unwrap();
        assert_eq!(j.dom(), c(&["0", "10"]));
    }

    #[test]
    fn restrict_examples() {
        let f = pm(&[("0", "1")]);
        assert_eq!(f.restrict(&c(&["00"])), pm(&[("00", "10")]));
        assert_eq!(f.restrict(&Clopen::full(2)), f);
        assert!(f.restrict(&Clopen::empty(2)).is_zero());
        let g = with_tail("0", "1", odometer());
        let e = c(&["01", "001"]);
        let ge = g.restrict(&e);
        assert!(same_on_probes(&ge, &g.compose(&PartialMap::as_idempotent(&e)).unwrap(), 6));
        let eg = g.corestrict(&c(&["10"]));
        assert!(eg.eq(&PartialMap::as_idempotent(&c(&["10"])).mul(&g)));
    }

    #[test]
    fn order_and_compatibility() {
        assert!(pm(&[("00", "100")]).leq(&pm(&[("0", "10")])));
        assert!(PartialMap::zero(2).leq(&pm(&[("0", "1")])));
        assert!(!pm(&[("0", "1")]).leq(&pm(&[("0", "0")])));
        let x = pm(&[("0", "1")]);
        let y = pm(&[("10", "01")]);
        assert!(x.disjoint(&y) && x.compatible(&y));
        assert!(!pm(&[("0", "0")]).compatible(&pm(&[("0", "1")])));
        assert!(x.compatible(&x));
    }

    #[test]
    fn join_examples() {
        let j = PartialMap::join(&[pm(&[("0", "1")]), pm(&[("10", "01")])]).unwrap();
        assert_eq!(j, pm(&[("0", "1"), ("10", "01")]));
        let e = PartialMap::as_idempotent(&c(&["0"]));
        let f = PartialMap::as_idempotent(&c(&["10"]));
        assert_eq!(PartialMap::join(&[e, f]).unwrap(), PartialMap::as_idempotent(&c(&["0", "10"])));
        assert_eq!(
            PartialMap::join(&[pm(&[("0", "1")]), pm(&[("01", "10")])]),
            Err(Error::IncompatiblePair(0, 1))
        );
        // a restriction joins back into its source
        let g = with_tail("~", "~", grig("b"));
        let parts = [g.restrict(&c(&["0"])), g.restrict(&c(&["1"]))];
        assert!(PartialMap::join(&parts).unwrap().eq(&g));
    }

    #[test]
    fn eq_examples() {
        let t = odometer();
        let f = with_tail("0", "1", t.clone());
        assert!(f.eq(&f));
        let rho = t.root_perm(2);
        let expanded = PartialMap::new(
            2,
            vec![
                Branch::new(Word::from("00"), Word(vec![1, rho[0]]), t.section(&[0])),
                Branch::new(Word::from("01"), Word(vec![1, rho[1]]), t.section(&[1])),
            ],
        )
        .unwrap();
        assert!(f.eq(&expanded));
        let a2 = with_tail("~", "~", grig("a").mul(&grig("a")));
        assert!(a2.eq(&PartialMap::one(2)));
        let bcd = with_tail("~", "~", grig("b").mul(&grig("c")).mul(&grig("d")));
        assert_eq!(bcd, PartialMap::one(2));
        assert!(!pm(&[("0", "1"), ("1", "0")]).eq(&PartialMap::one(2)));
        // Grigorchuk a is the root swap
        let a = with_tail("~", "~", grig("a"));
        assert!(a.eq(&pm(&[("0", "1"), ("1", "0")])));
    }

    #[test]
    fn merge_recovers_parent() {
        let f = pm(&[("00", "10"), ("01", "11")]);
        assert_eq!(f, pm(&[("0", "1")]));
        let g = pm(&[("00", "11"), ("01", "10")]);
        assert_eq!(g.branches().len(), 2);
        let a = with_tail("1", "0", odometer());
        let split = PartialMap::new(2, vec![a.branches()[0].refine(&[0]), a.branches()[0].refine(&[1])]).unwrap();
        assert_eq!(split, a);
    }

    #[test]
    fn eval_examples() {
        let f = pm(&[("0", "10")]);
        assert_eq!(f.eval(&[0, 1, 1]), Eval::Image(Word::from("1011"), TailElement::identity()));
        assert_eq!(f.eval(&[1]), Eval::Undefined);
        assert_eq!(pm(&[("01", "1")]).eval(&[0]), Eval::TooShallow);
        let g = with_tail("0", "1", odometer());
        assert_eq!(g.eval(&[0, 1, 1]), Eval::Image(Word::from("100"), odometer()));
    }

    #[test]
    fn units() {
        assert!(PartialMap::one(2).is_unit());
        assert!(pm(&[("0", "1"), ("1", "0")]).is_unit());
        assert!(!pm(&[("0", "10")]).is_unit());
    }

    #[test]
    fn construction_errors() {
        let b = |d: &str, r: &str| Branch::plain(Word::from(d), Word::from(r));
        assert!(matches!(
            PartialMap::new(2, vec![b("0", "1"), b("01", "00")]),
            Err(Error::ComparableDomains(..))
        ));
        assert!(matches!(
            PartialMap::new(2, vec![b("0", "1"), b("1", "10")]),
            Err(Error::ComparableRanges(..))
        ));
        assert!(PartialMap::new(2, vec![b("2", "1")]).is_err());
    }

    #[test]
    fn random_ops_match_oracle() {
        let mut r = rng(7);
        for _ in 0..60 {
            let f = random_map(&mut r, 2, 3, TailMix::Automata);
            let g = random_map(&mut r, 2, 3, TailMix::Automata);
            let e = random_clopen(&mut r, 2, 3);
            let ws = probes(2, 6, 10);
            let fg = f.mul(&g);
            let fs = f.star();
            let fe = f.restrict(&e);
            let ef = f.corestrict(&e);
            let ide = PartialMap::as_idempotent(&e);
            for w in &ws {
                assert!(agree(&point(&fg, w), &point_chain(&[&f, &g], w)), "{f} ∘ {g} at {w:?}");
                assert!(agree(&point(&fe, w), &point_chain(&[&f, &ide], w)));
                assert!(agree(&point(&ef, w), &point_chain(&[&ide, &f], w)));
                if let Some(y) = point(&f, w) {
                    let back = point(&fs, &y).expect("star defined on the image");
                    assert!(agree(&Some(back), &Some(w.clone())));
                }
            }
            assert!(f.mul(&fs).mul(&f).eq(&f));
        }
    }
}
