//! Expressions over named generators, bounded enumeration of the Boolean
//! completion, and piecewise membership.

use std::fmt;

use itertools::Itertools;
use serde::{Serialize, Serializer};

use crate::certificate::{bounds, Certificate};
use crate::clopen::{Clopen, Word};
use crate::error::{Error, Result};
use crate::pmap::PartialMap;
use crate::search::{word_ball, EqIndex};

/// An ordered table of named partial maps.
#[derive(Clone, Debug)]
pub struct GeneratorTable {
    arity: u8,
    names: Vec<String>,
    maps: Vec<PartialMap>,
}

impl GeneratorTable {
    pub fn new(arity: u8) -> Self {
        GeneratorTable { arity, names: Vec::new(), maps: Vec::new() }
    }

    pub fn insert(&mut self, name: &str, map: PartialMap) -> Result<()> {
        if map.arity() != self.arity {
            return Err(Error::AlphabetMismatch { left: self.arity, right: map.arity() });
        }
        if self.names.iter().any(|n| n == name) {
            return Err(Error::BadParameters(format!("duplicate generator name {name}")));
        }
        self.names.push(name.to_string());
        self.maps.push(map);
        Ok(())
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn maps(&self) -> &[PartialMap] {
        &self.maps
    }

    pub fn get(&self, name: &str) -> Option<&PartialMap> {
        self.names.iter().position(|n| n == name).map(|i| &self.maps[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PartialMap)> {
        self.names.iter().map(String::as_str).zip(&self.maps)
    }

    /// Adds `name_inv` for every star not already present up to eq.
    pub fn symmetrized(&self) -> GeneratorTable {
        let mut out = self.clone();
        for (name, m) in self.iter() {
            let s = m.star();
            if !out.maps.iter().any(|x| x.eq(&s)) {
                out.names.push(format!("{name}_inv"));
                out.maps.push(s);
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.maps.iter().all(|m| {
            let s = m.star();
            self.maps.iter().any(|x| x.eq(&s))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Gen(String),
    Idem(Clopen),
    Product(Vec<Expr>),
    Star(Box<Expr>),
    Join(Vec<Expr>),
    Restrict(Box<Expr>, Clopen),
}

impl Expr {
    pub fn gen(name: &str) -> Expr {
        Expr::Gen(name.to_string())
    }

    pub fn star(self) -> Expr {
        Expr::Star(Box::new(self))
    }

    pub fn restrict(self, c: Clopen) -> Expr {
        Expr::Restrict(Box::new(self), c)
    }

    pub fn evaluate(&self, table: &GeneratorTable) -> Result<PartialMap> {
        let mut path = Vec::new();
        self.eval_at(table, &mut path)
    }

    fn eval_at(&self, table: &GeneratorTable, path: &mut Vec<usize>) -> Result<PartialMap> {
        let d = table.arity;
        let children = |xs: &[Expr], path: &mut Vec<usize>| -> Result<Vec<PartialMap>> {
            xs.iter()
                .enumerate()
                .map(|(i, x)| {
                    path.push(i);
                    let r = x.eval_at(table, path);
                    path.pop();
                    r
                })
                .collect()
        };
        match self {
            Expr::Gen(n) => table.get(n).cloned().ok_or_else(|| Error::UnknownGenerator(n.clone())),
            Expr::Idem(c) => {
                if c.arity() != d {
                    return Err(Error::AlphabetMismatch { left: d, right: c.arity() });
                }
                Ok(PartialMap::as_idempotent(c))
            }
            Expr::Product(xs) => {
                let ms = children(xs, path)?;
                Ok(PartialMap::product(d, ms.iter()))
            }
            Expr::Star(x) => {
                path.push(0);
                let m = x.eval_at(table, path)?;
                path.pop();
                Ok(m.star())
            }
            Expr::Join(xs) => {
                let ms = children(xs, path)?;
                if ms.is_empty() {
                    return Ok(PartialMap::zero(d));
                }
                PartialMap::join(&ms).map_err(|e| match e {
                    Error::IncompatiblePair(..) => Error::IncompatibleJoin(path.clone()),
                    other => other,
                })
            }
            Expr::Restrict(x, c) => {
                path.push(0);
                let m = x.eval_at(table, path)?;
                path.pop();
                Ok(m.restrict(c))
            }
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Expr::Gen(_) | Expr::Idem(_) | Expr::Join(_) | Expr::Star(_) | Expr::Restrict(..))
            || matches!(self, Expr::Product(xs) if xs.len() != 1)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |x: &Expr, f: &mut fmt::Formatter<'_>| {
            if x.is_atomic() {
                write!(f, "{x}")
            } else {
                write!(f, "({x})")
            }
        };
        match self {
            Expr::Gen(n) => f.write_str(n),
            Expr::Idem(c) => write!(f, "{c}"),
            Expr::Product(xs) if xs.is_empty() => f.write_str("{~}"),
            Expr::Product(xs) if xs.len() == 1 => write!(f, "{}", xs[0]),
            Expr::Product(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Expr::Star(x) => {
                wrap(x, f)?;
                f.write_str("^-1")
            }
            Expr::Join(xs) if xs.is_empty() => f.write_str("{}"),
            Expr::Join(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Expr::Restrict(x, c) => {
                wrap(x, f)?;
                write!(f, "@{c}")
            }
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Generators and their stars (deduplicated by eq) with expressions, in table order.
fn letters(table: &GeneratorTable) -> (Vec<PartialMap>, Vec<Expr>) {
    let mut maps: Vec<PartialMap> = Vec::new();
    let mut exprs = Vec::new();
    for (name, m) in table.iter() {
        for (x, e) in [(m.clone(), Expr::gen(name)), (m.star(), Expr::gen(name).star())] {
            if !maps.iter().any(|y| y.eq(&x)) {
                maps.push(x);
                exprs.push(e);
            }
        }
    }
    (maps, exprs)
}

fn word_expr(exprs: &[Expr], word: &[usize]) -> Expr {
    if word.len() == 1 {
        exprs[word[0]].clone()
    } else {
        Expr::Product(word.iter().map(|&i| exprs[i].clone()).collect())
    }
}

/// All unions of depth-`n` atoms, each as a canonical clopen.
pub fn clopens_at_depth(arity: u8, n: usize) -> Vec<Clopen> {
    let atoms = Word::all_of_length(arity, n);
    assert!(atoms.len() <= 16, "too many atoms to enumerate all unions");
    (0u32..1 << atoms.len())
        .map(|mask| {
            let ws = atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| w.clone());
            Clopen::normalize_unchecked(arity, ws.collect())
        })
        .collect()
}

/// Elements expressible as joins of at most `j` restrictions, to depth-`n` clopens,
/// of words of length at most `l` in the generators and their stars.
pub fn bi_enumerate(table: &GeneratorTable, l: usize, j: usize, n: usize) -> Vec<(PartialMap, Expr)> {
    let d = table.arity;
    let (maps, exprs) = letters(table);
    let ball = word_ball(d, &maps, l, u64::MAX);
    let clopens = clopens_at_depth(d, n);
    let mut pieces: EqIndex<Expr> = EqIndex::new(d);
    for (w, word) in &ball.elems {
        for c in &clopens {
            let e = if word.is_empty() {
                Expr::Idem(c.clone())
            } else if c.is_full() {
                word_expr(&exprs, word)
            } else {
                word_expr(&exprs, word).restrict(c.clone())
            };
            pieces.insert(w.restrict(c), e);
        }
    }
    let pieces = pieces.into_items();
    let mut out: EqIndex<Expr> = EqIndex::new(d);
    for (m, e) in &pieces {
        out.insert(m.clone(), e.clone());
    }
    for k in 2..=j {
        for combo in (0..pieces.len()).combinations(k) {
            let ms: Vec<PartialMap> = combo.iter().map(|&i| pieces[i].0.clone()).collect();
            if ms.iter().any(PartialMap::is_zero) {
                continue;
            }
            let Ok(m) = PartialMap::join(&ms) else { continue };
            let e = Expr::Join(combo.iter().map(|&i| pieces[i].1.clone()).collect());
            out.insert(m, e);
        }
    }
    out.into_items()
}

/// Searches for a partition into cylinders of depth ≤ `n` on each of which `h`
/// agrees with a word of length ≤ `l` over the generators and their stars.
pub fn piecewise_member(h: &PartialMap, table: &GeneratorTable, l: usize, n: usize) -> Result<Certificate<Expr>> {
    if !h.is_unit() {
        return Err(Error::NotAUnit);
    }
    let d = table.arity;
    let (maps, exprs) = letters(table);
    let ball = word_ball(d, &maps, l, u64::MAX);
    let mut nodes = ball.nodes;
    let mut assigned: Vec<(usize, Word)> = Vec::new();
    let mut stack = vec![Word::empty()];
    let mut failed: Option<Word> = None;
    while let Some(c) = stack.pop() {
        let cyl = Clopen::cylinder(d, c.clone());
        let target = h.restrict(&cyl);
        let hit = ball.elems.iter().position(|(w, _)| {
            nodes += 1;
            w.restrict(&cyl).eq(&target)
        });
        match hit {
            Some(i) => assigned.push((i, c)),
            None if c.len() < n => stack.extend((0..d).rev().map(|x| c.child(x))),
            None => {
                failed = Some(c);
                break;
            }
        }
    }
    let b = bounds(&[("len", l as u64), ("depth", n as u64)]);
    if let Some(c) = failed {
        return Ok(Certificate::exhausted(
            serde_json::json!({ "unmatched_cylinder": c.to_string() }),
            b,
            nodes,
        ));
    }
    let mut groups: Vec<(usize, Vec<Word>)> = Vec::new();
    for (i, c) in assigned {
        match groups.iter_mut().find(|g| g.0 == i) {
            Some(g) => g.1.push(c),
            None => groups.push((i, vec![c])),
        }
    }
    let expr = Expr::Join(
        groups
            .into_iter()
            .map(|(i, cs)| {
                let word = &ball.elems[i].1;
                let base = if word.is_empty() { Expr::Idem(Clopen::full(d)) } else { word_expr(&exprs, word) };
                base.restrict(Clopen::normalize_unchecked(d, cs))
            })
            .collect(),
    );
    debug_assert!(expr.evaluate(table).map(|m| m.eq(h)).unwrap_or(false));
    Ok(Certificate::witness(expr, b, nodes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(words: &[&str]) -> Clopen {
        Clopen::normalize(2, words.iter().map(|w| Word::from(*w))).unwrap()
    }

    fn swap_table() -> GeneratorTable {
        let mut t = GeneratorTable::new(2);
        t.insert("s", PartialMap::from_pairs(2, &[("0", "1"), ("1", "0")])).unwrap();
        t
    }

    #[test]
    fn evaluate_examples() {
        let mut t = swap_table();
        let x = PartialMap::from_pairs(2, &[("0", "10")]);
        t.insert("x", x.clone()).unwrap();
        let p = Expr::Product(vec![Expr::gen("x"), Expr::gen("x").star()]).evaluate(&t).unwrap();
        assert!(p.is_idempotent() && p.dom() == x.ran());
        let one = Expr::Idem(Clopen::full(2));
        let glued = Expr::Join(vec![one.clone().restrict(c(&["0"])), one.restrict(c(&["1"]))]);
        assert!(glued.evaluate(&t).unwrap().eq(&PartialMap::one(2)));
        let r = Expr::gen("s").restrict(c(&["01"])).evaluate(&t).unwrap();
        assert_eq!(r, PartialMap::from_pairs(2, &[("01", "11")]));
        assert_eq!(Expr::gen("q").evaluate(&t), Err(Error::UnknownGenerator("q".into())));
        let bad = Expr::Product(vec![Expr::Join(vec![Expr::gen("s"), Expr::Idem(Clopen::full(2))])]);
        assert_eq!(bad.evaluate(&t), Err(Error::IncompatibleJoin(vec![0])));
    }

    #[test]
    fn enumerate_swap() {
        let got = bi_enumerate(&swap_table(), 1, 1, 1);
        let want = [
            PartialMap::from_pairs(2, &[("0", "1"), ("1", "0")]),
            PartialMap::one(2),
            PartialMap::zero(2),
            PartialMap::from_pairs(2, &[("0", "1")]),
            PartialMap::from_pairs(2, &[("1", "0")]),
            PartialMap::as_idempotent(&c(&["0"])),
            PartialMap::as_idempotent(&c(&["1"])),
        ];
        for w in &want {
            assert!(got.iter().any(|(m, _)| m.eq(w)), "missing {w}");
        }
        assert_eq!(got.len(), want.len());
        for (m, e) in &got {
            assert!(e.evaluate(&swap_table()).unwrap().eq(m));
        }
    }

    #[test]
    fn enumerate_without_generators() {
        for n in 0..3 {
            let got = bi_enumerate(&GeneratorTable::new(2), 2, 2, n);
            assert_eq!(got.len(), 1 << (1 << n));
            assert!(got.iter().all(|(m, _)| m.is_idempotent()));
            assert_eq!(bi_enumerate(&swap_table(), 0, 2, n).len(), got.len());
        }
    }

    #[test]
    fn membership() {
        let t = swap_table();
        let s = t.get("s").unwrap().clone();
        let cert = piecewise_member(&s, &t, 1, 0).unwrap();
        assert!(cert.is_witness());
        assert_eq!(cert.witness.as_ref().unwrap().to_string(), "(s@{~})");
        let mut t2 = GeneratorTable::new(2);
        let h = PartialMap::from_pairs(2, &[("00", "01"), ("01", "00"), ("1", "1")]);
        t2.insert("s01", h.clone()).unwrap();
        let cert = piecewise_member(&h, &t2, 1, 2).unwrap();
        assert!(cert.witness.unwrap().evaluate(&t2).unwrap().eq(&h));
        assert_eq!(piecewise_member(&PartialMap::zero(2), &t2, 1, 1).unwrap_err(), Error::NotAUnit);
        let glued = PartialMap::from_pairs(2, &[("00", "01"), ("01", "00"), ("10", "11"), ("11", "10")]);
        let cert = piecewise_member(&glued, &t, 2, 1).unwrap();
        assert!(!cert.is_witness());
    }
}
