//! End-to-end acceptance run: one line per criterion, then a single overall assertion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use cantor_full::clopen::{Clopen, Word};
use cantor_full::oracle::{point, probes};
use cantor_full::pmap::{Branch, PartialMap};
use cantor_full::random::{random_map, random_partition, random_unit, rng, TailMix};

type Outcome = Result<String, String>;

fn mul(a: &PartialMap, b: &PartialMap) -> PartialMap {
    a.compose(b).unwrap()
}

fn within(t0: Instant, limit: Duration) -> Outcome {
    let e = t0.elapsed();
    if e <= limit {
        Ok(format!("{:.1}s", e.as_secs_f64()))
    } else {
        Err(format!("took {:.1}s, limit {}s", e.as_secs_f64(), limit.as_secs()))
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(String::new())
    } else {
        Err(msg())
    }
}

fn law_suite() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(1);
    let mut fails = 0;
    for i in 0..2000 {
        let d = if i % 2 == 0 { 2 } else { 3 };
        let x = random_map(&mut r, d, 4, TailMix::Automata);
        let y = random_map(&mut r, d, 4, TailMix::Automata);
        let (xs, ys) = (x.star(), y.star());
        let e = mul(&x, &xs);
        let f = mul(&y, &ys);
        let ok = mul(&mul(&x, &xs), &x).eq(&x)
            && mul(&x, &y).star().eq(&mul(&ys, &xs))
            && mul(&e, &f).eq(&mul(&f, &e));
        fails += usize::from(!ok);
    }
    check(fails == 0, || format!("{fails} law failures"))?;
    within(t0, Duration::from_secs(60)).map(|t| format!("2000 elements, 0 failures, {t}"))
}

/// Image of a probe under a chain of maps (rightmost first), `None` once undefined.
fn chain(fs: &[&PartialMap], w: &[u8]) -> Option<Vec<u8>> {
    let mut cur = w.to_vec();
    for f in fs.iter().rev() {
        cur = point(f, &cur)?;
    }
    Some(cur)
}

fn agree(a: Option<Vec<u8>>, b: Option<Vec<u8>>, n: usize) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x[..n] == y[..n],
        _ => false,
    }
}

fn pointwise_oracle() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(2);
    let mut fails = Vec::new();
    for i in 0..500 {
        let d = if i % 3 == 2 { 3 } else { 2 };
        let x = random_map(&mut r, d, 4, TailMix::Automata);
        let y = random_map(&mut r, d, 4, TailMix::Automata);
        let e = cantor_full::random::random_clopen(&mut r, d, 2);
        // a compatible pair: two restrictions of the same element
        let u = random_unit(&mut r, d, 3, TailMix::Automata);
        let (ua, ub) = (u.restrict(&e), u.restrict(&e.complement()));
        let j = PartialMap::join(&[ua.clone(), ub.clone()]).unwrap();
        let xy = mul(&x, &y);
        let xs = x.star();
        let xe = x.restrict(&e);
        for w in probes(d, 6, 24) {
            let ok = agree(chain(&[&xy], &w), chain(&[&x, &y], &w), 12)
                && (point(&x, &w).is_none() || agree(chain(&[&xs, &x], &w), Some(w.clone()), 12))
                && (point(&xs, &w).is_none() || agree(chain(&[&x, &xs], &w), Some(w.clone()), 12))
                && agree(point(&j, &w), point(&u, &w), 12)
                && agree(point(&xe, &w), if e.contains_cylinder(&w) { point(&x, &w) } else { None }, 12);
            if !ok {
                fails.push(i);
                break;
            }
        }
    }
    check(fails.is_empty(), || format!("instances {fails:?} disagree"))?;
    within(t0, Duration::from_secs(60)).map(|t| format!("500 instances on all depth-6 words, {t}"))
}

fn distributivity() -> Outcome {
    let mut r = rng(3);
    let mut fails = 0;
    for _ in 0..500 {
        let s = random_map(&mut r, 2, 4, TailMix::Automata);
        let t = random_map(&mut r, 2, 4, TailMix::Automata);
        let ps = random_partition(&mut r, 2, 2, 3);
        let pt = random_partition(&mut r, 2, 2, 3);
        let si: Vec<PartialMap> = ps.iter().map(|c| s.restrict(c)).collect();
        let tj: Vec<PartialMap> = pt.iter().map(|c| t.restrict(c)).collect();
        let lhs = mul(&PartialMap::join(&si).unwrap(), &PartialMap::join(&tj).unwrap());
        let terms: Vec<PartialMap> = si.iter().flat_map(|a| tj.iter().map(move |b| mul(a, b))).collect();
        let ok = lhs.eq(&mul(&s, &t)) && lhs.eq(&PartialMap::join(&terms).unwrap());
        fails += usize::from(!ok);
    }
    check(fails == 0, || format!("{fails} failures")).map(|_| "500 families, 0 failures".into())
}

use cantor_full::completion::GeneratorTable;
use cantor_full::library::higman_thompson;
use cantor_full::multisection::{combine, eval_piece_word, extend_degree, factor_over_cover, Cover, Multisection};
use cantor_full::perm;
use cantor_full::search::EqIndex;

fn cyl(w: &Word) -> Clopen {
    Clopen::cylinder(2, w.clone())
}

fn prefix_map(from: &Word, to: &Word) -> PartialMap {
    PartialMap::new(2, vec![Branch::plain(from.clone(), to.clone())]).unwrap()
}

/// A section on `d` distinct cylinders drawn from `pool`, based at the first.
fn section_on(cyls: &[Word]) -> Multisection {
    let maps: Vec<PartialMap> = cyls[1..].iter().map(|c| prefix_map(&cyls[0], c)).collect();
    Multisection::build(&cyl(&cyls[0]), &maps).unwrap()
}

fn homomorphism() -> Outcome {
    let mut r = rng(4);
    let pool = Word::all_of_length(2, 3);
    for d in 3..=5 {
        let cyls: Vec<Word> = pool.choose_multiple(&mut r, d).cloned().collect();
        let s = section_on(&cyls);
        let all = perm::symmetric(d);
        let elems: Vec<PartialMap> = all.iter().map(|p| s.element(p).unwrap()).collect();
        for (i, p) in all.iter().enumerate() {
            for (j, q) in all.iter().enumerate() {
                let pq = perm::compose(p, q);
                let k = all.iter().position(|x| *x == pq).unwrap();
                check(mul(&elems[i], &elems[j]).eq(&elems[k]), || format!("d={d}: {p:?}·{q:?}"))?;
            }
        }
        let mut distinct = EqIndex::new(2);
        for e in &elems {
            distinct.insert(e.clone(), ());
        }
        check(distinct.len() == all.len(), || format!("d={d}: only {} distinct units", distinct.len()))?;
        let c = s.element(&perm::cycle(d, &(0..d).collect::<Vec<_>>())).unwrap();
        let mut x = c.clone();
        let one = PartialMap::one(2);
        for k in 1..d {
            check(!x.eq(&one), || format!("d={d}: cycle has order {k}"))?;
            x = mul(&x, &c);
        }
        check(x.eq(&one), || format!("d={d}: cycle^d != 1"))?;
    }
    Ok("d = 3, 4, 5: homomorphic, injective, d-cycles of order d".into())
}

fn five() -> Multisection {
    section_on(&["000", "001", "010", "011", "100"].map(Word::from))
}

fn cover_factorization() -> Outcome {
    let n = five();
    let halves = [Clopen::cylinder(2, Word::from("0000")), Clopen::cylinder(2, Word::from("0001"))];
    let disjoint = n.cover_of(&halves).unwrap();
    // overlapping pieces, each combined from two 3-sections sharing its base
    let bases = [
        Clopen::normalize(2, [Word::from("0000"), Word::from("00010")]).unwrap(),
        Clopen::normalize(2, [Word::from("00010"), Word::from("00011")]).unwrap(),
    ];
    let pieces: Vec<Multisection> = bases
        .iter()
        .map(|b| {
            let r = n.restrict_msec(b).unwrap();
            combine(&r.sub(&[0, 1, 2]).unwrap(), 0, &r.sub(&[0, 3, 4]).unwrap(), 0).unwrap()
        })
        .collect();
    let overlapping = Cover::new(n.clone(), pieces).unwrap();
    let mut longest = 0;
    for p in perm::alternating(5) {
        let t = n.element(&p).unwrap();
        let w = factor_over_cover(&t, &p, &disjoint, 100_000).unwrap().witness.ok_or("disjoint cover: no witness")?;
        check(w.len() == 2 && eval_piece_word(2, disjoint.pieces(), &w).eq(&t), || format!("{p:?}: length {}", w.len()))?;
        let cert = factor_over_cover(&t, &p, &overlapping, 100_000).unwrap();
        check(cert.nodes_explored <= 100_000, || format!("{p:?}: {} nodes", cert.nodes_explored))?;
        let w = cert.witness.ok_or_else(|| format!("{p:?}: overlapping cover, no witness"))?;
        check(eval_piece_word(2, overlapping.pieces(), &w).eq(&t), || format!("{p:?}: re-evaluation differs"))?;
        longest = longest.max(w.len());
    }
    Ok(format!("60/60 with length 2 on the disjoint cover; 60/60 on the overlapping cover (longest word {longest})"))
}

fn degree_extension() -> Outcome {
    let table: GeneratorTable = higman_thompson(2, 1).unwrap().table.symmetrized();
    let mut r = rng(6);
    let pool = Word::all_of_length(2, 3);
    let cyls: Vec<Word> = pool.choose_multiple(&mut r, 3).cloned().collect();
    let s = section_on(&cyls);
    let four = extend_degree(&s, &table, 3, 3, 100_000).witness.ok_or("no 4-section cover")?;
    let mut fives = 0;
    for (piece, n4) in four.subdivision.iter().zip(&four.sections) {
        check(n4.degree() == 4 && n4.verify(), || format!("bad 4-piece on {piece}"))?;
        let restricted = s.restrict_msec(piece).unwrap();
        check(n4.transporters()[..3].iter().zip(restricted.transporters()).all(|(a, b)| a.eq(b)), || "4-piece does not extend".into())?;
        let five = extend_degree(n4, &table, 3, 3, 100_000).witness.ok_or("no 5-section cover")?;
        for n5 in &five.sections {
            check(n5.degree() == 5 && n5.verify(), || "bad 5-piece".into())?;
            fives += 1;
        }
    }
    Ok(format!("3-section on {cyls:?}: {} 4-pieces, {fives} 5-pieces, all verified", four.sections.len()))
}

use cantor_full::dynamics::{expansive_certificate, fully_compressible_sample, orbit_lower_bound, rigid_parts, split_unit, DynContext};
use cantor_full::multisection::express::express_alt;
use cantor_full::multisection::kit::{verify_separating, GeneratingKit};
use cantor_full::tail::{grig, odometer, TailElement};

fn v2_table() -> GeneratorTable {
    higman_thompson(2, 1).unwrap().table.symmetrized()
}

/// Three pairwise incomparable cylinders of depth 4 or 5.
fn deep_cylinders<R: Rng>(r: &mut R) -> Vec<Word> {
    let pool = Word::all_of_length(2, 4);
    pool.choose_multiple(r, 3)
        .map(|w| if r.gen_bool(0.5) { w.child(r.gen_range(0..2)) } else { w.clone() })
        .collect()
}

fn generating_kit() -> Outcome {
    let t0 = Instant::now();
    let kit = GeneratingKit::from_table(&v2_table(), Clopen::atoms(2, 3), 5, 3).map_err(|e| e.to_string())?;
    let report = verify_separating(&kit.a, &kit.p, 5, 4, 3, 100_000);
    check(report.all_pass(), || format!("separating conditions fail: {}", serde_json::to_string(&report).unwrap()))?;
    let mut r = rng(7);
    let mut longest = 0;
    for i in 0..20 {
        let s = section_on(&deep_cylinders(&mut r));
        let p = if i % 2 == 0 { vec![1, 2, 0] } else { vec![2, 0, 1] };
        let cert = express_alt(&s, &p, &kit, 100_000).map_err(|e| format!("{s}: {e}"))?;
        check(cert.nodes_explored <= 100_000, || format!("{s}: {} nodes", cert.nodes_explored))?;
        let w = cert.witness.ok_or_else(|| format!("{s}: no witness ({:?})", cert.frontier))?;
        check(kit.eval(&w).eq(&s.element(&p).unwrap()), || format!("{s}: word does not evaluate to the target"))?;
        longest = longest.max(w.len());
    }
    let t = within(t0, Duration::from_secs(600))?;
    Ok(format!("kit {}; 20/20 three-cycles expressed (longest word {longest}), {t}", kit.summary()))
}

fn dynamics_fixtures() -> Outcome {
    let ctx = DynContext::new(&v2_table(), true).unwrap();
    let atoms1 = Clopen::atoms(2, 1);
    let e = expansive_certificate(&ctx, &atoms1, 5, 6).unwrap();
    check(e.is_witness(), || format!("expansive V: {:?}", e.status))?;
    let mut t = GeneratorTable::new(2);
    t.insert("a", PartialMap::new(2, vec![Branch::new(Word::empty(), Word::empty(), odometer())]).unwrap()).unwrap();
    let odo = DynContext::new(&t, false).unwrap();
    let e = expansive_certificate(&odo, &atoms1, 2, 32).unwrap();
    check(e.status == cantor_full::certificate::Status::RefutedAtBound, || format!("adding machine: {:?}", e.status))?;
    let fc = fully_compressible_sample(&ctx, 2, 8);
    check(fc.all_pass, || format!("compression failures {:?}", fc.failures))?;
    let o = orbit_lower_bound(&ctx, &Word::from("0"), 5, 6).unwrap();
    check(o.is_witness(), || format!("orbit bound: {:?}", o.status))?;
    Ok(format!("expansive W, adding machine R, {}/{} compression pairs, orbit ≥ 5", fc.passed, fc.pairs))
}

fn splitting() -> Outcome {
    let table = v2_table();
    let ctx = DynContext::new(&table, true).unwrap();
    let mut r = rng(9);
    let one = PartialMap::one(2);
    let mut done = 0;
    while done < 200 {
        let len = r.gen_range(1..=4);
        let g = (0..len).fold(one.clone(), |acc, _| mul(&acc, table.maps().choose(&mut r).unwrap()));
        if g.eq(&one) {
            continue;
        }
        let s = split_unit(&g, &ctx, 6, 2).unwrap().witness.ok_or_else(|| format!("no split for {g}"))?;
        check(s.verify(&g), || format!("split of {g} does not verify"))?;
        done += 1;
    }
    Ok("200/200 units split".into())
}

/// A unit permuting the children of the words of `y` one level down (with random tails),
/// so it maps `y` onto itself.
fn unit_on<R: Rng>(r: &mut R, y: &Clopen) -> Vec<Branch> {
    let cells: Vec<Word> = y.words().iter().flat_map(|w| (0..2).map(move |x| w.child(x))).collect();
    let mut image = cells.clone();
    image.shuffle(r);
    let tails = [TailElement::identity(), grig("a"), grig("b"), odometer(), odometer().invert()];
    cells.into_iter().zip(image).map(|(d, i)| Branch::new(d, i, tails.choose(r).unwrap().clone())).collect()
}

fn rigid_decomposition() -> Outcome {
    let mut r = rng(10);
    for _ in 0..100 {
        let p = random_partition(&mut r, 2, 2, 3);
        let branches: Vec<Branch> = p.iter().flat_map(|y| unit_on(&mut r, y)).collect();
        let g = PartialMap::new(2, branches).unwrap();
        let f = rigid_parts(&g, &p).map_err(|e| format!("{g}: {e}"))?;
        let prod = f.iter().fold(PartialMap::one(2), |acc, x| mul(&acc, x));
        check(prod.eq(&g), || format!("{g}: factors do not re-compose"))?;
        for a in &f {
            for b in &f {
                check(mul(a, b).eq(&mul(b, a)), || format!("{g}: factors do not commute"))?;
            }
        }
    }
    Ok("100/100 decompositions re-compose and commute".into())
}

/// Direct recursive action of the Grigorchuk generators on a finite word:
/// `a` flips the first letter, `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
fn grig_act(g: char, w: &mut [u8]) {
    let Some((first, rest)) = w.split_first_mut() else { return };
    match (g, *first) {
        ('a', x) => *first = 1 - x,
        ('b', 0) | ('c', 0) => grig_act('a', rest),
        ('b', _) => grig_act('c', rest),
        ('c', _) => grig_act('d', rest),
        ('d', 0) => {}
        ('d', _) => grig_act('b', rest),
        _ => unreachable!(),
    }
}

fn grigorchuk_oracle() -> Outcome {
    let word = |s: &str, k: usize| -> TailElement {
        let one: TailElement = s.chars().map(|c| grig(&c.to_string())).fold(TailElement::identity(), |acc, x| acc.compose(&x).unwrap());
        (0..k).fold(TailElement::identity(), |acc, _| acc.compose(&one).unwrap())
    };
    // `s` applied rightmost first, `k` times, letter by letter
    let direct = |s: &str, k: usize, w: &[u8]| -> Vec<u8> {
        let mut v = w.to_vec();
        for _ in 0..k {
            for c in s.chars().rev() {
                grig_act(c, &mut v);
            }
        }
        v
    };
    let cases = [("aa", 1, true), ("bb", 1, true), ("cc", 1, true), ("dd", 1, true), ("bcd", 1, true), ("ab", 8, false), ("ab", 16, true)];
    let words = Word::all_of_length(2, 8);
    for (s, k, trivial) in cases {
        let t = word(s, k);
        check(t.is_identity().unwrap() == trivial, || format!("({s})^{k}: is_identity disagrees"))?;
        let mut moved = false;
        for w in &words {
            let (img, _) = t.apply_prefix(w);
            check(img.0 == direct(s, k, w), || format!("({s})^{k} on {w}: evaluation disagrees"))?;
            moved |= img.0 != w.0;
        }
        check(moved != trivial, || format!("({s})^{k}: depth-8 action contradicts the verdict"))?;
    }
    Ok("a²=b²=c²=d²=bcd=1, (ab)^8≠1, (ab)^16=1; agrees with direct evaluation on all depth-8 words".into())
}

// Runs without the libtest harness so the per-criterion lines are always shown.
fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("inverse-monoid laws", law_suite),
        ("pointwise oracle equivalence", pointwise_oracle),
        ("distributivity over joins", distributivity),
        ("multisection homomorphism", homomorphism),
        ("cover factorization", cover_factorization),
        ("degree extension", degree_extension),
        ("generating kit", generating_kit),
        ("dynamics fixtures", dynamics_fixtures),
        ("constructive splitting", splitting),
        ("rigid decomposition", rigid_decomposition),
        ("automaton tail oracle", grigorchuk_oracle),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
