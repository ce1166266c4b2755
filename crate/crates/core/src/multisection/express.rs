//! Writing units as words over the kit `K`.
//!
//! Every intermediate 5-section is kept together with a recipe for the Alt words of its
//! elements: kit sections are letters, sub-sections reuse their parent's words, and a
//! combined section solves a breadth-first search over the permutation actions of its two
//! inputs.

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use serde_json::json;

use super::kit::{GeneratingKit, KLetter};
use super::{combine, combine_positions, factor_over_cover, Cover, Multisection};
use crate::certificate::{bounds, Certificate};
use crate::clopen::{Clopen, Word};
use crate::error::{Error, Result};
use crate::perm::{self, Perm};
use crate::pmap::{Branch, PartialMap};
use crate::search::EqIndex;

pub const DEFAULT_MAX_PATH: usize = 8;

enum Recipe {
    Kit(usize),
    Sub(Rc<Built>, Vec<usize>),
    Combine(Box<CombineTable>),
}

struct CombineTable {
    inputs: [Rc<Built>; 2],
    /// For each reachable state, the previous state and the move `(input, σ)`.
    parent: HashMap<State, (State, usize, Perm)>,
}

type State = (Perm, Perm, Perm);

struct Built {
    msec: Multisection,
    recipe: Recipe,
    memo: RefCell<HashMap<Perm, Rc<Vec<KLetter>>>>,
}

impl Built {
    fn new(msec: Multisection, recipe: Recipe) -> Rc<Self> {
        Rc::new(Built { msec, recipe, memo: RefCell::new(HashMap::new()) })
    }

    fn word(&self, p: &[usize]) -> Result<Rc<Vec<KLetter>>> {
        if let Some(w) = self.memo.borrow().get(p) {
            return Ok(w.clone());
        }
        let w: Vec<KLetter> = if perm::is_identity(p) {
            Vec::new()
        } else {
            match &self.recipe {
                Recipe::Kit(s) => vec![KLetter { section: *s, perm: p.to_vec() }],
                Recipe::Sub(parent, at) => parent.word(&perm::embed(parent.msec.degree(), at, p))?.to_vec(),
                Recipe::Combine(t) => {
                    let (d1, d2) = (t.inputs[0].msec.degree(), t.inputs[1].msec.degree());
                    let mut state: State = (p.to_vec(), perm::identity(d1), perm::identity(d2));
                    if !t.parent.contains_key(&state) {
                        return Err(Error::NotInAlt);
                    }
                    let mut w = Vec::new();
                    while let Some((prev, side, s)) = t.parent.get(&state) {
                        w.extend(t.inputs[*side].word(s)?.iter().cloned());
                        state = prev.clone();
                    }
                    w
                }
            }
        };
        let w = Rc::new(w);
        self.memo.borrow_mut().insert(p.to_vec(), w.clone());
        Ok(w)
    }
}

/// Combines two built sections and tabulates how their Alt groups reach the output's.
fn combine_built(b1: &Rc<Built>, i1: usize, b2: &Rc<Built>, i2: usize) -> Result<Rc<Built>> {
    let (s1, s2) = (&b1.msec, &b2.msec);
    let msec = combine(s1, i1, s2, i2)?;
    let e = msec.base().clone();
    let (pos1, pos2) = combine_positions(s1.degree(), i1, s2.degree(), i2);
    let track = [
        !s1.idems()[i1].minus(&e)?.is_empty(),
        !s2.idems()[i2].minus(&e)?.is_empty(),
    ];
    let d3 = msec.degree();
    let dims = [s1.degree(), s2.degree()];
    let moves: Vec<(usize, Perm)> = (0..2)
        .flat_map(|side| {
            perm::alternating(dims[side])
                .into_iter()
                .filter(|q| !perm::is_identity(q))
                .map(move |q| (side, q))
        })
        .collect();
    let start: State = (perm::identity(d3), perm::identity(dims[0]), perm::identity(dims[1]));
    let mut parent: HashMap<State, (State, usize, Perm)> = HashMap::new();
    let mut seen = std::collections::HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(st) = queue.pop_front() {
        for (side, q) in &moves {
            let pos = if *side == 0 { &pos1 } else { &pos2 };
            let mut next = st.clone();
            next.0 = perm::compose(&perm::embed(d3, pos, q), &st.0);
            let slot = if *side == 0 { &mut next.1 } else { &mut next.2 };
            if track[*side] {
                *slot = perm::compose(q, slot);
            }
            if seen.insert(next.clone()) {
                parent.insert(next.clone(), (st.clone(), *side, q.clone()));
                queue.push_back(next);
            }
        }
    }
    let table = CombineTable { inputs: [b1.clone(), b2.clone()], parent };
    Ok(Built::new(msec, Recipe::Combine(Box::new(table))))
}

fn sub_built(b: &Rc<Built>, at: &[usize]) -> Result<Rc<Built>> {
    Ok(Built::new(b.msec.sub(at)?, Recipe::Sub(b.clone(), at.to_vec())))
}

struct Exhausted(serde_json::Value);

enum Fail {
    Hard(Error),
    Out(Exhausted),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Hard(e)
    }
}

struct Ctx<'a> {
    kit: &'a GeneratingKit,
    budget: u64,
    nodes: u64,
    max_path: usize,
    lemmas: HashMap<Vec<usize>, (Rc<Built>, usize, usize)>,
}

impl Ctx<'_> {
    fn tick(&mut self, what: &str) -> std::result::Result<(), Fail> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Fail::Out(Exhausted(json!({ "stage": what }))));
        }
        Ok(())
    }

    fn product(&self, word: &[usize]) -> PartialMap {
        PartialMap::product(self.kit.arity, word.iter().map(|&i| &self.kit.a[i]))
    }

    fn part_of_map(&self, m: &PartialMap) -> Option<(usize, usize)> {
        Some((self.kit.part(&m.dom())?, self.kit.part(&m.ran())?))
    }

    /// A section containing the product of the `A`-word `w` as `f_{src,dst}`.
    fn lemma(&mut self, w: &[usize]) -> std::result::Result<(Rc<Built>, usize, usize), Fail> {
        if let Some(hit) = self.lemmas.get(w) {
            return Ok(hit.clone());
        }
        self.tick("length reduction")?;
        let q = self.product(w);
        let (dq, rq) = self.part_of_map(&q).ok_or(Error::NotAPartition)?;
        if dq == rq {
            return Err(Fail::Out(Exhausted(json!({ "stage": "same part", "word": w }))));
        }
        let out = if w.len() <= 3 {
            let s = self.kit.section_for(&q).ok_or(Error::KitConstructionFailed { element: 0, part: dq })?;
            (Built::new(self.kit.sections[s].section.clone(), Recipe::Kit(s)), 0, 1)
        } else {
            let (a0, a1) = (&self.kit.a[w[0]], &self.kit.a[w[1]]);
            let e1 = self.kit.part(&a1.dom()).ok_or(Error::NotAPartition)?;
            let found = self.kit.spread_from(e1).find(|(_, a)| {
                self.kit.part(&a.ran()).is_some_and(|r| r != dq && r != rq)
            });
            let Some((ai, a)) = found else {
                return Err(Fail::Out(Exhausted(json!({ "stage": "no spreading element", "part": e1 }))));
            };
            let t = a0.mul(a1).mul(&a.star());
            let mut rest = vec![ai];
            rest.extend(&w[2..]);
            let (h, hs, hd) = self.lemma(&rest)?;
            let gs = self.kit.section_for(&t).ok_or(Error::KitConstructionFailed { element: 0, part: e1 })?;
            let g = Built::new(self.kit.sections[gs].section.clone(), Recipe::Kit(gs));
            self.join_lemma(&g, &h, hs, hd, &q)?
        };
        self.lemmas.insert(w.to_vec(), out.clone());
        Ok(out)
    }

    /// Combines `g ∋ t = f_{0,1}` with `h ∋ m' = f_{hs,hd}` into a section holding `t·m'`.
    fn join_lemma(&mut self, g: &Rc<Built>, h: &Rc<Built>, hs: usize, hd: usize, q: &PartialMap) -> std::result::Result<(Rc<Built>, usize, usize), Fail> {
        for g3 in 2..g.msec.degree() {
            for h3 in (0..h.msec.degree()).filter(|&k| k != hs && k != hd) {
                let g1 = sub_built(g, &[0, 1, g3])?;
                let h1 = sub_built(h, &[hs, hd, h3])?;
                match combine_built(&g1, 0, &h1, 1) {
                    Ok(f) => {
                        // positions: g1 -> [0, 1, 2], h1 -> [3, 0, 4]
                        if f.msec.f(3, 1).eq(q) {
                            return Ok((f, 3, 1));
                        }
                    }
                    Err(Error::SupportsOverlapElsewhere) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Err(Fail::Out(Exhausted(json!({ "stage": "combine", "target": q.to_string() }))))
    }

    /// Shortest table words whose restrictions to `d` equal each of `targets`.
    fn unit_paths(&mut self, d: &Clopen, targets: &[PartialMap]) -> std::result::Result<Vec<Vec<usize>>, Fail> {
        let kit = self.kit;
        if kit.gens.is_empty() {
            return Err(Fail::Out(Exhausted(json!({ "stage": "path search", "reason": "kit has no generator table" }))));
        }
        let mut found: Vec<Option<Vec<usize>>> = vec![None; targets.len()];
        let mut index: EqIndex<Vec<usize>> = EqIndex::new(kit.arity);
        index.insert(PartialMap::as_idempotent(d), Vec::new());
        let mut frontier = vec![0usize];
        let mut len = 0;
        loop {
            for &j in &frontier {
                let (psi, w) = &index.items()[j];
                for (t, slot) in targets.iter().zip(found.iter_mut()) {
                    if slot.is_none() && psi.eq(t) {
                        *slot = Some(w.clone());
                    }
                }
            }
            if found.iter().all(Option::is_some) {
                return Ok(found.into_iter().map(Option::unwrap).collect());
            }
            if frontier.is_empty() || len == self.max_path {
                let missing: Vec<String> =
                    targets.iter().zip(&found).filter(|(_, f)| f.is_none()).map(|(t, _)| t.to_string()).collect();
                return Err(Fail::Out(Exhausted(json!({ "stage": "path search", "unreached": missing }))));
            }
            len += 1;
            let mut next = Vec::new();
            for &j in &frontier {
                for (g, u) in kit.gens.iter().enumerate() {
                    let (psi, w) = &index.items()[j];
                    let y = u.mul(psi);
                    let mut w2 = w.clone();
                    w2.push(g);
                    if let Some(k) = index.insert(y, w2) {
                        self.tick("path search")?;
                        next.push(k);
                    }
                }
            }
            frontier = next;
        }
    }

    /// Splits the table word `w` (first letter applied first) restricted to the part `d`
    /// into `A`-words by the sequence of parts visited; their domains partition `d`.
    fn itinerary(&mut self, d: &Clopen, w: &[usize]) -> std::result::Result<Vec<(Clopen, Vec<usize>)>, Fail> {
        let kit = self.kit;
        let mut pieces: Vec<(PartialMap, Vec<usize>)> = vec![(PartialMap::as_idempotent(d), Vec::new())];
        for &g in w {
            let u = &kit.gens[g];
            let mut next = Vec::new();
            for (psi, letters) in &pieces {
                let ran = psi.ran();
                for (e, pe) in kit.p.iter().enumerate() {
                    if ran.disjoint(pe)? {
                        continue;
                    }
                    for (f, pf) in kit.p.iter().enumerate() {
                        let x = u.restrict(pe).corestrict(pf);
                        let y = x.mul(psi);
                        if y.is_zero() {
                            continue;
                        }
                        self.tick("itinerary")?;
                        let mut l = if e != f { vec![self.letter(&x)?] } else { self.detour(&x)? };
                        l.extend(letters);
                        next.push((y, l));
                    }
                }
            }
            pieces = next;
        }
        let mut out = Vec::new();
        for (psi, letters) in pieces {
            if !self.product(&letters).eq(&psi) {
                return Err(Error::BadParameters("itinerary word does not match".into()).into());
            }
            out.push((psi.dom(), letters));
        }
        Ok(out)
    }

    fn letter(&self, x: &PartialMap) -> std::result::Result<usize, Fail> {
        self.kit
            .a_position(x)
            .ok_or_else(|| Fail::Out(Exhausted(json!({ "stage": "itinerary", "missing_piece": x.to_string() }))))
    }

    /// `[s1, s0]` with `s1·s0 = x`, both in `A`, for a part-preserving piece `x`.
    fn detour(&self, x: &PartialMap) -> std::result::Result<Vec<usize>, Fail> {
        let kit = self.kit;
        let dom = x.dom();
        for (i, b) in kit.a.iter().enumerate() {
            if b.dom() != dom {
                continue;
            }
            if let Some(j) = kit.a_position(&x.mul(&b.star())) {
                if kit.a[j].mul(b).eq(x) {
                    return Ok(vec![j, i]);
                }
            }
        }
        Err(Fail::Out(Exhausted(json!({ "stage": "itinerary", "missing_detour": x.to_string() }))))
    }

    /// Sections of degree 5 on `[base, m_a·base, ·, m_b·base, ·]`, one per piece.
    fn pair_sections(&mut self, pa: &[(Clopen, Vec<usize>)], pb: &[(Clopen, Vec<usize>)]) -> std::result::Result<Vec<Rc<Built>>, Fail> {
        let mut out = Vec::new();
        for (ca, wa) in pa {
            for (cb, wb) in pb {
                if ca.disjoint(cb)? {
                    continue;
                }
                let (s1, a1, b1) = self.lemma(wa)?;
                let (s2, a2, b2) = self.lemma(wb)?;
                out.push(self.pair(&s1, a1, b1, &s2, a2, b2)?);
            }
        }
        Ok(out)
    }

    fn pair(&mut self, s1: &Rc<Built>, a1: usize, b1: usize, s2: &Rc<Built>, a2: usize, b2: usize) -> std::result::Result<Rc<Built>, Fail> {
        for x1 in (0..s1.msec.degree()).filter(|&k| k != a1 && k != b1) {
            for x2 in (0..s2.msec.degree()).filter(|&k| k != a2 && k != b2) {
                self.tick("pairing")?;
                let u = sub_built(s1, &[a1, b1, x1])?;
                let v = sub_built(s2, &[a2, b2, x2])?;
                match combine_built(&u, 0, &v, 0) {
                    Ok(f) => return Ok(f),
                    Err(Error::SupportsOverlapElsewhere) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Err(Fail::Out(Exhausted(json!({ "stage": "pairing" }))))
    }
}

fn prefix_map(arity: u8, from: &Word, to: &Word) -> PartialMap {
    PartialMap::new(arity, vec![Branch::plain(from.clone(), to.clone())]).expect("single branch")
}

/// Expresses `element(s, π)` over the kit.
///
/// `s` has degree at most 4 and a cylinder base. A fresh cylinder `D` in a part missing
/// the support is joined to `s` to form a 5-section `N`; the transporters out of `D` are
/// covered by `A`-words, each word is turned into a section by length reduction, pairs of
/// them are combined, and the resulting cover of `N` is factored.
pub fn express_alt(s: &Multisection, p: &[usize], kit: &GeneratingKit, budget: u64) -> Result<Certificate<Vec<KLetter>>> {
    let b = bounds(&[("budget", budget), ("max_path", DEFAULT_MAX_PATH as u64)]);
    if !perm::is_perm(p) || p.len() != s.degree() {
        return Err(Error::BadPermutation(p.len()));
    }
    if !perm::is_even(p) {
        return Err(Error::NotInAlt);
    }
    let k = s.degree();
    if k > 4 || s.base().words().len() != 1 {
        return Err(Error::BadParameters("express_alt needs degree ≤ 4 and a cylinder base".into()));
    }
    let arity = s.arity();
    let target = s.element(p)?;
    let w1 = s.base().words()[0].clone();
    let support = s.support();
    let free = |c: &Clopen| c.disjoint(&support).unwrap_or(false);
    let dpart = kit.p.iter().position(|c| c.words().len() == 1 && free(c));
    let Some(dpart) = dpart else {
        return Ok(Certificate::exhausted(json!({ "stage": "no free cylinder part" }), b, 0));
    };
    let dc = kit.p[dpart].clone();
    let dw = dc.words()[0].clone();
    let m1 = prefix_map(arity, &dw, &w1);
    let mut maps: Vec<PartialMap> = (0..k).map(|i| s.f(0, i).mul(&m1)).collect();
    let mut used = support.union(&dc)?;
    for w in Word::all_of_length(arity, w1.len()) {
        if maps.len() == 4 {
            break;
        }
        let c = Clopen::cylinder(arity, w.clone());
        if used.disjoint(&c)? {
            used = used.union(&c)?;
            maps.push(prefix_map(arity, &dw, &w));
        }
    }
    if maps.len() < 4 {
        return Ok(Certificate::exhausted(json!({ "stage": "no room for a 5-section" }), b, 0));
    }
    let n = Multisection::build(&dc, &maps)?;
    let ph = perm::embed(5, &[1, 2, 3, 4][..k], p);
    let mut ctx = Ctx { kit, budget, nodes: 0, max_path: DEFAULT_MAX_PATH, lemmas: HashMap::new() };
    let result = (|| -> std::result::Result<Vec<KLetter>, Fail> {
        let paths = ctx.unit_paths(&dc, &maps)?;
        let mut pieces = Vec::new();
        for w in &paths {
            pieces.push(ctx.itinerary(&dc, w)?);
        }
        let fs = ctx.pair_sections(&pieces[0], &pieces[1])?;
        let gs = ctx.pair_sections(&pieces[2], &pieces[3])?;
        let mut hs = Vec::new();
        for f in &fs {
            for g in &gs {
                if f.msec.base().disjoint(g.msec.base())? {
                    continue;
                }
                let u = sub_built(f, &[0, 1, 3])?;
                let v = sub_built(g, &[0, 1, 3])?;
                hs.push(combine_built(&u, 0, &v, 0)?);
            }
        }
        let cover = Cover::new(n.clone(), hs.iter().map(|h| h.msec.clone()).collect())?;
        let rest = ctx.budget.saturating_sub(ctx.nodes);
        let cert = factor_over_cover(&target, &ph, &cover, rest)?;
        ctx.nodes += cert.nodes_explored;
        let Some(pw) = cert.witness else {
            return Err(Fail::Out(Exhausted(json!({ "stage": "cover factorization" }))));
        };
        let mut word = Vec::new();
        for l in &pw {
            word.extend(hs[l.piece].word(&l.perm)?.iter().cloned());
        }
        Ok(word)
    })();
    match result {
        Ok(word) => {
            if !kit.eval(&word).eq(&target) {
                return Err(Error::BadParameters("express produced a word that does not verify".into()));
            }
            Ok(Certificate::witness(word, b, ctx.nodes))
        }
        Err(Fail::Out(Exhausted(f))) => Ok(Certificate::exhausted(f, b, ctx.nodes)),
        Err(Fail::Hard(e)) => Err(e),
    }
}

/// Looks `target` up in `K`, then among products of two elements of `K`.
pub fn express_short(target: &PartialMap, kit: &GeneratingKit, budget: u64) -> Certificate<Vec<KLetter>> {
    let b = bounds(&[("budget", budget), ("max_len", 2)]);
    let k = kit.k();
    let mut ix: EqIndex<usize> = EqIndex::new(kit.arity);
    for (i, (m, _)) in k.iter().enumerate() {
        ix.insert(m.clone(), i);
    }
    if target.eq(&PartialMap::one(kit.arity)) {
        return Certificate::witness(Vec::new(), b, 0);
    }
    if let Some(i) = ix.find(target) {
        return Certificate::witness(vec![k[ix.items()[i].1].1.clone()], b, 1);
    }
    let mut nodes = 1;
    for (m, l) in k {
        if nodes >= budget {
            return Certificate::exhausted(json!({ "stage": "length 2" }), b, nodes);
        }
        nodes += 1;
        if let Some(i) = ix.find(&target.mul(&m.star())) {
            return Certificate::witness(vec![k[ix.items()[i].1].1.clone(), l.clone()], b, nodes);
        }
    }
    Certificate::refuted(json!({ "max_len": 2 }), b, nodes)
}
