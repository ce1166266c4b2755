//! Ready-made generator tables for rooted-tree examples.

use serde::Serialize;

use crate::clopen::{Clopen, Word};
use crate::completion::GeneratorTable;
use crate::error::{Error, Result};
use crate::pmap::{Branch, PartialMap};
use crate::tail::{grig, TailElement};

#[derive(Clone, Debug, Serialize)]
pub struct NamedFamily {
    pub name: String,
    pub params: String,
    #[serde(skip)]
    pub table: GeneratorTable,
    pub notes: String,
}

/// Units exchanging two disjoint cylinders (identity elsewhere) for all cylinder pairs up
/// to depth 2, plus the depth-1 cycle `x -> x + 1 mod d` and its inverse.
///
/// Only one root (`k = 1`) is modelled.
pub fn higman_thompson(d: u8, k: usize) -> Result<NamedFamily> {
    if d < 2 || k != 1 {
        return Err(Error::BadParameters(format!("higman_thompson needs d >= 2 and k = 1, got d={d}, k={k}")));
    }
    let mut table = GeneratorTable::new(d);
    let cyl: Vec<Word> = (1..=2).flat_map(|n| Word::all_of_length(d, n)).collect();
    let mut seen: Vec<PartialMap> = Vec::new();
    let mut add = |table: &mut GeneratorTable, name: String, m: PartialMap| {
        if !seen.iter().any(|s| s.eq(&m)) {
            seen.push(m.clone());
            table.insert(&name, m).expect("fresh name");
        }
    };
    let cycle: Vec<Branch> =
        (0..d).map(|x| Branch::plain(Word(vec![x]), Word(vec![(x + 1) % d]))).collect();
    let cycle = PartialMap::new(d, cycle).expect("valid");
    add(&mut table, "c".into(), cycle.clone());
    if d > 2 {
        add(&mut table, "c_inv".into(), cycle.star());
    }
    for (i, u) in cyl.iter().enumerate() {
        for v in &cyl[i + 1..] {
            if !u.comparable(v) {
                add(&mut table, format!("s{u}_{v}"), swap(d, u, v));
            }
        }
    }
    Ok(NamedFamily {
        name: "higman_thompson".into(),
        params: format!("d={d},k={k}"),
        table,
        notes: "prefix exchanges of disjoint cylinders of depth <= 2 and the depth-1 cycle".into(),
    })
}

fn swap(d: u8, u: &Word, v: &Word) -> PartialMap {
    let both = Clopen::normalize(d, [u.clone(), v.clone()]).expect("valid words");
    let mut b = vec![Branch::plain(u.clone(), v.clone()), Branch::plain(v.clone(), u.clone())];
    b.extend(both.complement().words().iter().map(|w| Branch::plain(w.clone(), w.clone())));
    PartialMap::new(d, b).expect("valid")
}

fn root_unit(t: TailElement) -> PartialMap {
    PartialMap::new(2, vec![Branch::new(Word::empty(), Word::empty(), t)]).expect("valid")
}

pub fn grigorchuk_units() -> NamedFamily {
    let mut table = GeneratorTable::new(2);
    for s in ["a", "b", "c", "d"] {
        table.insert(s, root_unit(grig(s))).expect("fresh name");
    }
    NamedFamily {
        name: "grigorchuk".into(),
        params: String::new(),
        table,
        notes: "the four standard generators acting at the root".into(),
    }
}

pub fn rover_units() -> NamedFamily {
    let mut table = grigorchuk_units().table;
    for (n, m) in higman_thompson(2, 1).expect("valid").table.iter() {
        table.insert(&format!("v_{n}"), m.clone()).expect("names differ");
    }
    NamedFamily {
        name: "rover".into(),
        params: String::new(),
        table,
        notes: "grigorchuk generators together with higman_thompson(2), the latter prefixed `v_`".into(),
    }
}

/// Every automorphism of the `d`-ary tree truncated at depth `k` (letter permutations at
/// each vertex above depth `k`), as units with trivial tails.
pub fn depth_aut_units(d: u8, k: usize) -> Result<NamedFamily> {
    let vertices = (0..k).map(|n| (d as usize).pow(n as u32)).sum::<usize>();
    let perms = crate::perm::symmetric(d as usize);
    let total = (perms.len() as f64).powi(vertices as i32);
    if d < 2 || k == 0 || total > 20_000.0 {
        return Err(Error::BadParameters(format!("depth_aut_units: d={d}, k={k} too large or invalid")));
    }
    let leaves = Word::all_of_length(d, k);
    let mut table = GeneratorTable::new(d);
    let mut choice = vec![0usize; vertices];
    for idx in 0..total as usize {
        let mut x = idx;
        for c in choice.iter_mut() {
            *c = x % perms.len();
            x /= perms.len();
        }
        let branches = leaves
            .iter()
            .map(|w| {
                // vertices numbered breadth-first
                let mut v = 0usize;
                let mut img = Vec::with_capacity(k);
                for (depth, &letter) in w.iter().enumerate() {
                    img.push(perms[choice[v]][letter as usize] as u8);
                    let first = (0..depth + 1).map(|n| (d as usize).pow(n as u32)).sum::<usize>();
                    let rank = w[..=depth].iter().fold(0usize, |acc, &l| acc * d as usize + l as usize);
                    v = first + rank;
                }
                Branch::plain(w.clone(), Word(img))
            })
            .collect();
        table.insert(&format!("g{idx}"), PartialMap::new(d, branches)?)?;
    }
    Ok(NamedFamily {
        name: "depth_aut".into(),
        params: format!("d={d},k={k}"),
        table,
        notes: "all level-k tree automorphisms".into(),
    })
}

/// Each generator of `inner` relabelled under the prefix `u`, extended by the identity.
pub fn rist_generators(u: &Word, inner: &NamedFamily) -> Result<NamedFamily> {
    let d = inner.table.arity();
    u.check(d)?;
    let outside = Clopen::cylinder(d, u.clone()).complement();
    let mut table = GeneratorTable::new(d);
    for (n, m) in inner.table.iter() {
        let mut b: Vec<Branch> = m
            .branches()
            .iter()
            .map(|x| Branch::new(u.concat(&x.dom), u.concat(&x.ran), x.tail.clone()))
            .collect();
        b.extend(outside.words().iter().map(|w| Branch::plain(w.clone(), w.clone())));
        table.insert(n, PartialMap::new(d, b)?)?;
    }
    Ok(NamedFamily {
        name: format!("rist({u},{})", inner.name),
        params: format!("u={u}"),
        table,
        notes: format!("{} supported inside the cylinder {u}", inner.name),
    })
}

/// Looks a family up by `name:param,...`, e.g. `higman_thompson:2`, `depth_aut:2,3`.
pub fn by_name(spec: &str) -> Result<NamedFamily> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums: Vec<usize> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|a| a.trim().parse().map_err(|_| Error::BadParameters(format!("bad parameter `{a}`"))))
            .collect::<Result<_>>()?
    };
    let arg = |i: usize, default: usize| nums.get(i).copied().unwrap_or(default);
    match name {
        "higman_thompson" | "ht" | "V" => higman_thompson(arg(0, 2) as u8, arg(1, 1)),
        "grigorchuk" => Ok(grigorchuk_units()),
        "rover" => Ok(rover_units()),
        "depth_aut" => depth_aut_units(arg(0, 2) as u8, arg(1, 1)),
        _ => Err(Error::UnknownFamily(name.to_string())),
    }
}

pub const FAMILIES: &[&str] = &["higman_thompson:d[,k]", "grigorchuk", "rover", "depth_aut:d,k"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn higman_thompson_two() {
        let f = higman_thompson(2, 1).unwrap();
        let t = &f.table;
        assert!(t.maps().iter().all(|m| m.is_unit()));
        let flip = PartialMap::from_pairs(2, &[("0", "1"), ("1", "0")]);
        assert!(t.maps().iter().any(|m| m.eq(&flip)));
        let s = PartialMap::from_pairs(2, &[("00", "01"), ("01", "00"), ("1", "1")]);
        assert!(t.maps().iter().any(|m| m.eq(&s)));
        assert!(t.maps().iter().all(|m| t.maps().iter().any(|x| x.eq(&m.star()))));
        assert_eq!(t.len(), 11);
        assert!(higman_thompson(1, 1).is_err());
    }

    #[test]
    fn higman_thompson_three_is_symmetric() {
        let t = higman_thompson(3, 1).unwrap().table;
        assert!(t.maps().iter().all(|m| t.maps().iter().any(|x| x.eq(&m.star()))));
    }

    #[test]
    fn grigorchuk_relations() {
        let t = grigorchuk_units().table;
        let g = |s: &str| t.get(s).unwrap().clone();
        let one = PartialMap::one(2);
        assert!(g("a").mul(&g("a")).eq(&one));
        assert!(g("b").mul(&g("b")).eq(&one));
        assert!(g("b").mul(&g("c")).mul(&g("d")).eq(&one));
        let r = rover_units().table;
        assert_eq!(r.len(), 4 + higman_thompson(2, 1).unwrap().table.len());
        assert!(r.maps().iter().all(|m| m.is_unit()));
    }

    #[test]
    fn automorphisms_and_rist() {
        let f = depth_aut_units(2, 1).unwrap();
        assert_eq!(f.table.len(), 2);
        assert!(f.table.maps()[0].eq(&PartialMap::one(2)));
        assert!(f.table.maps()[1].eq(&PartialMap::from_pairs(2, &[("0", "1"), ("1", "0")])));
        assert_eq!(depth_aut_units(2, 2).unwrap().table.len(), 8);
        let mut inner = GeneratorTable::new(2);
        inner.insert("s", PartialMap::from_pairs(2, &[("0", "1"), ("1", "0")])).unwrap();
        let fam = NamedFamily { name: "flip".into(), params: String::new(), table: inner, notes: String::new() };
        let r = rist_generators(&Word::from("0"), &fam).unwrap();
        let m = &r.table.maps()[0];
        assert!(m.eq(&PartialMap::from_pairs(2, &[("00", "01"), ("01", "00"), ("1", "1")])));
        for w in oracle::probes(2, 4, 3) {
            if w[0] == 1 {
                assert_eq!(oracle::point(m, &w).unwrap(), w);
            }
        }
    }
}
