use cantor_full::clopen::{Clopen, Word};
use cantor_full::completion::GeneratorTable;
use cantor_full::dynamics::{compress_search, expansive_certificate, minimal_certificate, DynContext};
use cantor_full::multisection::Multisection;
use cantor_full::parse::{parse_clopen, parse_element};
use cantor_full::perm;
use cantor_full::pmap::{Branch, PartialMap};
use cantor_full::random::{random_clopen, random_map, random_unit, rng, TailMix};
use cantor_full::tail::TailRegistry;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn mul(f: &PartialMap, g: &PartialMap) -> PartialMap {
    f.compose(g).expect("same alphabet")
}

fn mix(tails: bool) -> TailMix {
    if tails {
        TailMix::Automata
    } else {
        TailMix::Trivial
    }
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn inverse_semigroup_laws(seed: u64, arity in 2u8..=3, tails: bool) {
        let mut r = rng(seed);
        let [f, g, h] = [0; 3].map(|_| random_map(&mut r, arity, 2, mix(tails)));
        prop_assert!(mul(&mul(&f, &f.star()), &f).eq(&f));
        prop_assert!(f.star().star().eq(&f));
        prop_assert!(mul(&f, &g).star().eq(&mul(&g.star(), &f.star())));
        prop_assert!(mul(&mul(&f, &g), &h).eq(&mul(&f, &mul(&g, &h))));
        let (e, k) = (mul(&f, &f.star()), mul(&g, &g.star()));
        prop_assert!(mul(&e, &k).eq(&mul(&k, &e)));
        prop_assert!(e.is_idempotent());
        prop_assert!(e.eq(&PartialMap::as_idempotent(&f.ran())));
    }

    #[test]
    fn units_form_a_group(seed: u64, arity in 2u8..=3, tails: bool) {
        let mut r = rng(seed);
        let u = random_unit(&mut r, arity, 3, mix(tails));
        prop_assert!(u.is_unit());
        prop_assert!(mul(&u, &u.star()).eq(&PartialMap::one(arity)));
        prop_assert!(mul(&u.star(), &u).eq(&PartialMap::one(arity)));
    }

    #[test]
    fn print_parse_round_trip(seed: u64, arity in 2u8..=3, tails: bool) {
        let mut r = rng(seed);
        let reg = TailRegistry::default();
        let f = random_map(&mut r, arity, 3, mix(tails));
        let back = parse_element(&f.to_string(), arity, &reg).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_string(), f.to_string());
        let c = random_clopen(&mut r, arity, 3);
        prop_assert_eq!(parse_clopen(&c.to_string(), arity).unwrap(), c);
    }

    #[test]
    fn composition_is_pointwise(seed: u64, tails: bool) {
        let mut r = rng(seed);
        let (f, g) = (random_map(&mut r, 2, 2, mix(tails)), random_map(&mut r, 2, 2, mix(tails)));
        let fg = mul(&f, &g);
        for w in Word::all_of_length(2, 5) {
            let two_step = g.image_prefix(&w).and_then(|v| f.image_prefix(&v));
            match (fg.image_prefix(&w), two_step) {
                (Some(a), Some(b)) => prop_assert_eq!(a, b),
                (a, b) => prop_assert!(a.is_none() && b.is_none(), "{w}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn boolean_algebra(seed: u64, arity in 2u8..=3) {
        let mut r = rng(seed);
        let [a, b, c] = [0; 3].map(|_| random_clopen(&mut r, arity, 3));
        let (ab, ac) = (a.meet(&b).unwrap(), a.meet(&c).unwrap());
        prop_assert_eq!(a.meet(&b.union(&c).unwrap()).unwrap(), ab.union(&ac).unwrap());
        prop_assert_eq!(a.union(&b).unwrap().complement(), a.complement().meet(&b.complement()).unwrap());
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.leq(&b).unwrap(), ab == a);
        prop_assert_eq!(a.disjoint(&b).unwrap(), ab.is_empty());
        prop_assert!(a.union(&a.complement()).unwrap().is_full());
    }

    #[test]
    fn restriction_and_image(seed: u64, tails: bool) {
        let mut r = rng(seed);
        let f = random_map(&mut r, 2, 3, mix(tails));
        let e = random_clopen(&mut r, 2, 3);
        prop_assert_eq!(f.restrict(&e).dom(), f.dom().meet(&e).unwrap());
        prop_assert_eq!(f.corestrict(&e).ran(), f.ran().meet(&e).unwrap());
        prop_assert_eq!(f.image(&e), f.restrict(&e).ran());
        prop_assert!(f.restrict(&e).leq(&f));
        let whole = PartialMap::join(&[f.restrict(&e), f.restrict(&e.complement())]).unwrap();
        prop_assert!(whole.eq(&f));
        prop_assert!(f.restrict(&e).compatible(&f.restrict(&e.complement())));
    }

    #[test]
    fn section_elements_are_homomorphic(seed: u64, d in 2usize..=5) {
        let mut r = rng(seed);
        let cyls: Vec<Word> = Word::all_of_length(2, 3).choose_multiple(&mut r, d).cloned().collect();
        let maps: Vec<PartialMap> = cyls[1..]
            .iter()
            .map(|c| PartialMap::new(2, vec![Branch::plain(cyls[0].clone(), c.clone())]).unwrap())
            .collect();
        let s = Multisection::build(&Clopen::cylinder(2, cyls[0].clone()), &maps).unwrap();
        let mut p: Vec<usize> = (0..d).collect();
        let mut q = p.clone();
        p.shuffle(&mut r);
        q.shuffle(&mut r);
        let lhs = s.element(&perm::compose(&p, &q)).unwrap();
        prop_assert!(lhs.eq(&mul(&s.element(&p).unwrap(), &s.element(&q).unwrap())));
        prop_assert!(s.element(&perm::inverse(&p)).unwrap().eq(&s.element(&p).unwrap().star()));
    }
}

fn random_table(seed: u64) -> GeneratorTable {
    let mut r = rng(seed);
    let mut t = GeneratorTable::new(2);
    for name in ["x", "y"] {
        t.insert(name, random_unit(&mut r, 2, 2, TailMix::Trivial)).unwrap();
    }
    t.insert("c", PartialMap::from_pairs(2, &[("0", "1"), ("1", "0")])).unwrap();
    t
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn certificates_monotone_in_length(seed: u64, len in 0usize..3) {
        let ctx = DynContext::new(&random_table(seed), true).unwrap().with_budget(20_000);
        if minimal_certificate(&ctx, 1, len).is_witness() {
            prop_assert!(minimal_certificate(&ctx, 1, len + 1).is_witness());
        }
        let atoms = Clopen::atoms(2, 1);
        if expansive_certificate(&ctx, &atoms, 2, len).unwrap().is_witness() {
            prop_assert!(expansive_certificate(&ctx, &atoms, 2, len + 1).unwrap().is_witness());
        }
        let (y, z) = (parse_clopen("{00}", 2).unwrap(), parse_clopen("{1}", 2).unwrap());
        if compress_search(&ctx, &y, &z, len).unwrap().is_witness() {
            prop_assert!(compress_search(&ctx, &y, &z, len + 1).unwrap().is_witness());
        }
    }
}
