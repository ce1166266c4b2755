//! Separating sets, the set `T` of short part-separated products, and the kit of
//! 5-sections whose Alt groups generate.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::Serialize;
use serde_json::{json, Value};

use super::Multisection;
use crate::clopen::{part_of, Clopen, Word};
use crate::completion::GeneratorTable;
use crate::error::{Error, Result};
use crate::perm::{self, Perm};
use crate::pmap::PartialMap;
use crate::search::{word_ball, EqIndex};

#[derive(Clone, Debug, Serialize)]
pub struct Condition {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Condition {
    fn ok() -> Self {
        Condition { pass: true, witness: None }
    }

    fn fail(w: Value) -> Self {
        Condition { pass: false, witness: Some(w) }
    }
}

/// Outcome of the four separating-set checks, in order.
#[derive(Clone, Debug, Serialize)]
pub struct SeparatingReport {
    pub orbits: Condition,
    pub separated: Condition,
    pub spread: Condition,
    pub base: Condition,
}

impl SeparatingReport {
    pub fn all_pass(&self) -> bool {
        [&self.orbits, &self.separated, &self.spread, &self.base].iter().all(|c| c.pass)
    }
}

fn parts_of(p: &[Clopen], m: &PartialMap) -> Option<(usize, usize)> {
    Some((part_of(p, &m.dom())?, part_of(p, &m.ran())?))
}

fn separated(p: &[Clopen], m: &PartialMap) -> bool {
    matches!(parts_of(p, m), Some((a, b)) if a != b)
}

/// Checks conditions (1)–(4) for `a` over the partition `p`.
///
/// (1) each depth-`depth` cylinder reaches at least `n_orbit` parts under `a`-words;
/// (2) every element has domain and range in distinct single parts;
/// (3) each part is contained in the domains of `n_orbit - 1` elements with ranges in
/// distinct parts; (4) every depth-`depth` cylinder is a meet of domains of products of
/// at most `max_len` elements.
pub fn verify_separating(a: &[PartialMap], p: &[Clopen], n_orbit: usize, depth: usize, max_len: usize, budget: u64) -> SeparatingReport {
    let arity = p.first().map_or(2, |c| c.arity());
    let separated_c = match a.iter().position(|m| !separated(p, m)) {
        None => Condition::ok(),
        Some(i) => Condition::fail(json!({ "index": i, "element": a[i].to_string() })),
    };

    let mut spread = Condition::ok();
    for (k, e) in p.iter().enumerate() {
        let ranges: BTreeSet<usize> = a
            .iter()
            .filter(|m| e.leq(&m.dom()).unwrap_or(false))
            .filter_map(|m| part_of(p, &m.ran()))
            .filter(|&r| r != k)
            .collect();
        if ranges.len() + 1 < n_orbit {
            spread = Condition::fail(json!({ "part": e.to_string(), "range_parts": ranges.len() }));
            break;
        }
    }

    let mut orbits = Condition::ok();
    for w in Word::all_of_length(arity, depth) {
        let start = Clopen::cylinder(arity, w);
        let mut seen = std::collections::HashSet::from([start.clone()]);
        let mut queue = std::collections::VecDeque::from([start.clone()]);
        let mut hit = BTreeSet::new();
        while let Some(x) = queue.pop_front() {
            if hit.len() >= n_orbit || (seen.len() as u64) >= budget {
                break;
            }
            if let Some(k) = part_of(p, &x) {
                hit.insert(k);
            }
            for m in a {
                if x.leq(&m.dom()).unwrap_or(false) {
                    let y = m.image(&x);
                    if seen.insert(y.clone()) {
                        queue.push_back(y);
                    }
                }
            }
        }
        if hit.len() < n_orbit {
            orbits = Condition::fail(json!({ "cylinder": start.to_string(), "parts_reached": hit.len() }));
            break;
        }
    }

    let mut doms: Vec<Clopen> = p.to_vec();
    let ball = word_ball(arity, a, max_len, budget);
    doms.extend(ball.elems.iter().skip(1).map(|(m, _)| m.dom()));
    let mut base = Condition::ok();
    for w in Word::all_of_length(arity, depth) {
        let c = Clopen::cylinder(arity, w);
        let mut meet = Clopen::full(arity);
        for d in doms.iter().filter(|d| c.leq(d).unwrap_or(false)) {
            meet = meet.meet(d).expect("same alphabet");
        }
        if meet != c {
            base = Condition::fail(json!({ "cylinder": c.to_string(), "smallest_idempotent": meet.to_string() }));
            break;
        }
    }
    SeparatingReport { orbits, separated: separated_c, spread, base }
}

/// Builds a symmetric separating set from a table of units over the partition `p`:
/// for each part, `n_orbit - 1` restricted words onto distinct other parts, and every
/// generator cut into part-to-part pieces, part-preserving pieces detoured through
/// another part.
pub fn separating_set(table: &GeneratorTable, p: &[Clopen], n_orbit: usize, max_len: usize) -> Vec<PartialMap> {
    let arity = table.arity();
    let sym = table.symmetrized();
    let ball = word_ball(arity, sym.maps(), max_len, 1_000_000);
    let mut index: EqIndex<()> = EqIndex::new(arity);
    let mut spread: Vec<Option<PartialMap>> = Vec::new();
    for (k, e) in p.iter().enumerate() {
        let mut used = BTreeSet::new();
        let mut first = None;
        for (u, _) in &ball.elems {
            if used.len() + 1 >= n_orbit {
                break;
            }
            let m = u.restrict(e);
            match part_of(p, &m.ran()) {
                Some(r) if r != k && !used.contains(&r) => {
                    used.insert(r);
                    first.get_or_insert_with(|| m.clone());
                    index.insert(m, ());
                }
                _ => {}
            }
        }
        spread.push(first);
    }
    for s in sym.maps() {
        for (k, e) in p.iter().enumerate() {
            for (q, f) in p.iter().enumerate() {
                let x = s.restrict(e).corestrict(f);
                if x.is_zero() {
                    continue;
                }
                if k != q {
                    index.insert(x, ());
                } else if let Some(m) = &spread[k] {
                    let s0 = m.restrict(&x.dom());
                    let s1 = x.mul(&m.star());
                    index.insert(s0, ());
                    index.insert(s1, ());
                }
            }
        }
    }
    let mut a: Vec<PartialMap> = index.items().iter().map(|(m, _)| m.clone()).collect();
    for m in a.clone() {
        if index.insert(m.star(), ()).is_some() {
            a.push(m.star());
        }
    }
    a
}

/// All products of at most three elements of `a` with domain and range inside distinct
/// single parts, deduplicated, each with its shortest word.
pub fn build_t(a: &[PartialMap], p: &[Clopen]) -> Vec<(PartialMap, Vec<usize>)> {
    let Some(first) = a.first() else {
        return Vec::new();
    };
    let arity = first.arity();
    let mut out: EqIndex<Vec<usize>> = EqIndex::new(arity);
    let mut layer: Vec<(PartialMap, Vec<usize>)> = a.iter().enumerate().map(|(i, m)| (m.clone(), vec![i])).collect();
    for len in 1..=3 {
        for (m, w) in &layer {
            if separated(p, m) {
                out.insert(m.clone(), w.clone());
            }
        }
        if len == 3 {
            break;
        }
        let mut next = Vec::new();
        for (m, w) in &layer {
            for (i, x) in a.iter().enumerate() {
                let y = x.mul(m);
                if !y.is_zero() {
                    let mut w2 = vec![i];
                    w2.extend(w);
                    next.push((y, w2));
                }
            }
        }
        layer = next;
    }
    out.into_items()
}

/// A 5-section `F_{m,e}` of the kit: base `dom(m)`, transporters `m` and three
/// restricted elements of `A` with domain the part `e`.
#[derive(Clone, Debug, Serialize)]
pub struct KitSection {
    pub section: Multisection,
    pub t: usize,
    pub part: usize,
    pub aux: [usize; 3],
}

/// One kit letter: `element(sections[section], perm)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct KLetter {
    pub section: usize,
    pub perm: Perm,
}

pub struct GeneratingKit {
    pub arity: u8,
    /// Units the separating set was cut from; empty when `A` was supplied directly.
    pub gens: Vec<PartialMap>,
    pub a: Vec<PartialMap>,
    pub p: Vec<Clopen>,
    pub t: Vec<(PartialMap, Vec<usize>)>,
    pub sections: Vec<KitSection>,
    t_index: EqIndex<usize>,
    a_index: EqIndex<usize>,
    k: OnceLock<Vec<(PartialMap, KLetter)>>,
}

impl GeneratingKit {
    /// Builds `T` and one 5-section per element of `T`.
    pub fn build(a: Vec<PartialMap>, p: Vec<Clopen>) -> Result<Self> {
        let arity = p.first().map_or(2, |c| c.arity());
        let t = build_t(&a, &p);
        let mut t_index = EqIndex::new(arity);
        let mut sections = Vec::with_capacity(t.len());
        for (ti, (m, _)) in t.iter().enumerate() {
            let (e, r) = parts_of(&p, m).expect("T is part-separated");
            let mut used = vec![e, r];
            let mut aux = Vec::new();
            for (i, x) in a.iter().enumerate() {
                if aux.len() == 3 {
                    break;
                }
                if x.dom() != p[e] {
                    continue;
                }
                if let Some(q) = part_of(&p, &x.ran()) {
                    if !used.contains(&q) {
                        used.push(q);
                        aux.push(i);
                    }
                }
            }
            if aux.len() < 3 {
                return Err(Error::KitConstructionFailed { element: ti, part: e });
            }
            let base = m.dom();
            let mut maps = vec![m.clone()];
            maps.extend(aux.iter().map(|&i| a[i].restrict(&base)));
            let section = Multisection::build(&base, &maps)?;
            sections.push(KitSection { section, t: ti, part: e, aux: [aux[0], aux[1], aux[2]] });
            t_index.insert(m.clone(), ti);
        }
        let mut a_index = EqIndex::new(arity);
        for (i, x) in a.iter().enumerate() {
            a_index.insert(x.clone(), i);
        }
        Ok(GeneratingKit { arity, gens: Vec::new(), a, p, t, sections, t_index, a_index, k: OnceLock::new() })
    }

    /// Cuts a separating set out of `table` (see [`separating_set`]) and builds the kit,
    /// keeping the symmetrized table for path searches.
    pub fn from_table(table: &GeneratorTable, p: Vec<Clopen>, n_orbit: usize, max_len: usize) -> Result<Self> {
        let a = separating_set(table, &p, n_orbit, max_len);
        let mut kit = Self::build(a, p)?;
        kit.gens = table.symmetrized().maps().to_vec();
        Ok(kit)
    }

    pub fn a_position(&self, m: &PartialMap) -> Option<usize> {
        self.a_index.find(m).map(|i| self.a_index.items()[i].1)
    }

    /// The kit section containing `m` as the transporter `f_{0,1}`, if `m ∈ T`.
    pub fn section_for(&self, m: &PartialMap) -> Option<usize> {
        self.t_index.find(m).map(|i| self.t_index.items()[i].1)
    }

    pub fn letter(&self, l: &KLetter) -> PartialMap {
        self.sections[l.section].section.element(&l.perm).expect("valid letter")
    }

    pub fn eval(&self, word: &[KLetter]) -> PartialMap {
        word.iter().fold(PartialMap::one(self.arity), |acc, l| acc.mul(&self.letter(l)))
    }

    /// `K`: the nontrivial Alt elements of all sections, deduplicated.
    pub fn k(&self) -> &[(PartialMap, KLetter)] {
        self.k.get_or_init(|| {
            let mut ix = EqIndex::new(self.arity);
            for (s, sec) in self.sections.iter().enumerate() {
                for q in perm::alternating(5).into_iter().filter(|q| !perm::is_identity(q)) {
                    let m = sec.section.element(&q).expect("valid perm");
                    ix.insert(m, KLetter { section: s, perm: q });
                }
            }
            ix.into_items()
        })
    }

    /// Elements of `A` whose domain is exactly the part `k`.
    pub fn spread_from(&self, k: usize) -> impl Iterator<Item = (usize, &PartialMap)> {
        let part = self.p[k].clone();
        self.a.iter().enumerate().filter(move |(_, m)| m.dom() == part)
    }

    pub fn part(&self, c: &Clopen) -> Option<usize> {
        part_of(&self.p, c)
    }

    pub fn summary(&self) -> Value {
        json!({ "A": self.a.len(), "P": self.p.len(), "T": self.t.len(), "sections": self.sections.len() })
    }
}
