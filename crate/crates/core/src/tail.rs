//! Tree automorphisms given by invertible Mealy machines.
//!
//! A [`TailElement`] is a word `f1 f2 ... fn` of signed machine states acting
//! as `f1 ∘ f2 ∘ ... ∘ fn` (the rightmost factor acts first). Sections of such
//! a word are words of the same length, so the identity problem is decided by
//! a finite section closure.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use crate::clopen::Word;
use crate::error::{Error, Result};

pub const DEFAULT_TAIL_BUDGET: usize = 1_000_000;

/// An invertible Mealy machine: `q(x w) = perm[q][x] · trans[q][x](w)`.
pub struct MealyMachine {
    name: String,
    arity: u8,
    state_names: Vec<String>,
    trans: Vec<Vec<u32>>,
    perm: Vec<Vec<u8>>,
    inv_perm: Vec<Vec<u8>>,
    trivial: Vec<bool>,
    // cancel[sgn(p) * 2n + sgn(q)]: the signed pair p q acts trivially
    cancel: Vec<bool>,
}

type Signed = (u32, bool);

fn sgn((s, inv): Signed) -> usize {
    2 * s as usize + inv as usize
}

impl MealyMachine {
    pub fn new(
        name: &str,
        arity: u8,
        state_names: Vec<String>,
        perm: Vec<Vec<u8>>,
        trans: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMachine(format!("{name}: {msg}")));
        if arity < 2 {
            return Err(Error::BadArity(arity));
        }
        let n = state_names.len();
        if n == 0 || perm.len() != n || trans.len() != n {
            return bad("state, output and transition tables must have equal nonzero length".into());
        }
        let mut inv_perm = Vec::with_capacity(n);
        for (q, p) in perm.iter().enumerate() {
            let mut inv = vec![u8::MAX; arity as usize];
            if p.len() != arity as usize {
                return bad(format!("output of state {} has wrong length", state_names[q]));
            }
            for (x, &y) in p.iter().enumerate() {
                if y >= arity || inv[y as usize] != u8::MAX {
                    return bad(format!("output of state {} is not a permutation", state_names[q]));
                }
                inv[y as usize] = x as u8;
            }
            inv_perm.push(inv);
        }
        for (q, t) in trans.iter().enumerate() {
            if t.len() != arity as usize || t.iter().any(|&r| r as usize >= n) {
                return bad(format!("transitions of state {} are invalid", state_names[q]));
            }
        }
        let mut seen = HashSet::new();
        for s in &state_names {
            if !seen.insert(s) {
                return bad(format!("duplicate state name {s}"));
            }
        }
        let mut m = MealyMachine {
            name: name.to_string(),
            arity,
            state_names,
            trans,
            perm,
            inv_perm,
            trivial: Vec::new(),
            cancel: Vec::new(),
        };
        m.trivial = m.trivial_states();
        m.cancel = m.cancel_table();
        Ok(m)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn state_index(&self, name: &str) -> Option<u32> {
        self.state_names.iter().position(|s| s == name).map(|i| i as u32)
    }

    pub fn output(&self, state: u32) -> &[u8] {
        &self.perm[state as usize]
    }

    pub fn transition(&self, state: u32, letter: u8) -> u32 {
        self.trans[state as usize][letter as usize]
    }

    pub fn is_trivial_state(&self, state: u32) -> bool {
        self.trivial[state as usize]
    }

    fn act(&self, (s, inv): Signed, x: u8) -> (u8, Signed) {
        let s_ = s as usize;
        if inv {
            let y = self.inv_perm[s_][x as usize];
            (y, (self.trans[s_][y as usize], true))
        } else {
            (self.perm[s_][x as usize], (self.trans[s_][x as usize], false))
        }
    }

    fn trivial_states(&self) -> Vec<bool> {
        let mut cand: Vec<bool> = self
            .perm
            .iter()
            .map(|p| p.iter().enumerate().all(|(x, &y)| x as u8 == y))
            .collect();
        loop {
            let mut changed = false;
            for q in 0..cand.len() {
                if cand[q] && self.trans[q].iter().any(|&r| !cand[r as usize]) {
                    cand[q] = false;
                    changed = true;
                }
            }
            if !changed {
                return cand;
            }
        }
    }

    fn cancels(&self, a: Signed, b: Signed) -> bool {
        let n2 = 2 * self.state_names.len();
        !self.cancel.is_empty() && self.cancel[sgn(a) * n2 + sgn(b)]
    }

    fn cancel_table(&self) -> Vec<bool> {
        let n = self.state_names.len() as u32;
        let signed: Vec<Signed> = (0..n).flat_map(|s| [(s, false), (s, true)]).collect();
        let mut out = Vec::with_capacity(signed.len() * signed.len());
        for &a in &signed {
            for &b in &signed {
                out.push(self.raw_is_identity(vec![a, b]));
            }
        }
        out
    }

    fn raw_reduce(&self, w: Vec<Signed>) -> Vec<Signed> {
        let mut out: Vec<Signed> = Vec::with_capacity(w.len());
        for f in w {
            if self.trivial[f.0 as usize] {
                continue;
            }
            match out.last() {
                Some(&g) if g.0 == f.0 && g.1 != f.1 => {
                    out.pop();
                }
                _ => out.push(f),
            }
        }
        out
    }

    // Identity test for a word over this machine using free reduction only.
    fn raw_is_identity(&self, w: Vec<Signed>) -> bool {
        let start = self.raw_reduce(w);
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(w) = queue.pop_front() {
            for x in 0..self.arity {
                let mut y = x;
                let mut sec = w.clone();
                for i in (0..w.len()).rev() {
                    let (y2, s) = self.act(w[i], y);
                    y = y2;
                    sec[i] = s;
                }
                if y != x {
                    return false;
                }
                let sec = self.raw_reduce(sec);
                if seen.insert(sec.clone()) {
                    queue.push_back(sec);
                }
            }
        }
        true
    }

    /// Parses `machine NAME ARITY` followed by lines `state: p0 p1 .. | t0 t1 ..`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::InvalidMachine(format!("line {line}: {msg}"));
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| bad(1, "empty machine text"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[0] != "machine" {
            return Err(bad(hl, "expected `machine NAME ARITY`"));
        }
        let arity: u8 = h[2].parse().map_err(|_| bad(hl, "bad arity"))?;
        let mut rows = Vec::new();
        for (ln, l) in lines {
            let (st, rest) = l.split_once(':').ok_or_else(|| bad(ln, "expected `state:`"))?;
            let (p, t) = rest.split_once('|').ok_or_else(|| bad(ln, "expected `|`"))?;
            let perm = p
                .split_whitespace()
                .map(|x| x.parse::<u8>().map_err(|_| bad(ln, "bad output letter")))
                .collect::<Result<Vec<_>>>()?;
            let next: Vec<String> = t.split_whitespace().map(str::to_string).collect();
            rows.push((st.trim().to_string(), perm, next, ln));
        }
        let names: Vec<String> = rows.iter().map(|r| r.0.clone()).collect();
        let mut trans = Vec::new();
        for (_, _, next, ln) in &rows {
            let t = next
                .iter()
                .map(|s| {
                    names
                        .iter()
                        .position(|n| n == s)
                        .map(|i| i as u32)
                        .ok_or_else(|| bad(*ln, &format!("unknown state {s}")))
                })
                .collect::<Result<Vec<_>>>()?;
            trans.push(t);
        }
        let perm = rows.into_iter().map(|r| r.1).collect();
        MealyMachine::new(h[1], arity, names, perm, trans)
    }
}

impl fmt::Debug for MealyMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MealyMachine({}, d={}, {} states)", self.name, self.arity, self.state_names.len())
    }
}

/// A signed state of a machine.
#[derive(Clone)]
pub struct Factor {
    pub machine: Arc<MealyMachine>,
    pub state: u32,
    pub inv: bool,
}

impl Factor {
    pub fn new(machine: &Arc<MealyMachine>, state: u32) -> Self {
        Factor { machine: machine.clone(), state, inv: false }
    }

    pub fn inverse(&self) -> Self {
        Factor { inv: !self.inv, ..self.clone() }
    }

    fn signed(&self) -> Signed {
        (self.state, self.inv)
    }

    fn same_machine(&self, other: &Factor) -> bool {
        Arc::ptr_eq(&self.machine, &other.machine) || self.machine.name == other.machine.name
    }
}

impl PartialEq for Factor {
    fn eq(&self, other: &Self) -> bool {
        self.state == other.state && self.inv == other.inv && self.same_machine(other)
    }
}

impl Eq for Factor {}

impl Hash for Factor {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.machine.name.hash(h);
        self.state.hash(h);
        self.inv.hash(h);
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.machine.state_names[self.state as usize])?;
        if self.inv {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

/// A tree automorphism written as a word of signed machine states; always kept reduced.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TailElement {
    factors: Vec<Factor>,
}

thread_local! {
    static IDENTITY_CACHE: RefCell<HashMap<TailElement, bool>> = RefCell::new(HashMap::new());
}

const IDENTITY_CACHE_CAP: usize = 200_000;

impl TailElement {
    pub fn identity() -> Self {
        TailElement { factors: Vec::new() }
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        let mut t = TailElement { factors: Vec::new() };
        for f in factors {
            t.push(f);
        }
        t
    }

    pub fn state(machine: &Arc<MealyMachine>, state: u32) -> Self {
        Self::from_factors(vec![Factor::new(machine, state)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// True for the empty factor word (structurally the identity).
    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn arity(&self) -> Option<u8> {
        self.factors.first().map(|f| f.machine.arity)
    }

    // Appends a factor on the right, applying the reduction rules.
    fn push(&mut self, mut f: Factor) {
        if f.machine.trivial[f.state as usize] {
            return;
        }
        if f.inv && f.machine.cancels((f.state, false), (f.state, false)) {
            f.inv = false;
        }
        if let Some(g) = self.factors.last() {
            if g.same_machine(&f) && g.machine.cancels(g.signed(), f.signed()) {
                self.factors.pop();
                return;
            }
        }
        self.factors.push(f);
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &TailElement) -> Result<TailElement> {
        if let (Some(a), Some(b)) = (self.arity(), other.arity()) {
            if a != b {
                return Err(Error::AlphabetMismatch { left: a, right: b });
            }
        }
        Ok(self.mul(other))
    }

    pub(crate) fn mul(&self, other: &TailElement) -> TailElement {
        let mut t = self.clone();
        for f in &other.factors {
            t.push(f.clone());
        }
        t
    }

    pub fn invert(&self) -> TailElement {
        Self::from_factors(self.factors.iter().rev().map(Factor::inverse).collect())
    }

    /// Image of the letter `x` and the section at `x`.
    pub fn act_letter(&self, x: u8) -> (u8, TailElement) {
        let mut y = x;
        let mut secs = Vec::with_capacity(self.factors.len());
        for f in self.factors.iter().rev() {
            let (y2, (s, inv)) = f.machine.act(f.signed(), y);
            y = y2;
            secs.push(Factor { machine: f.machine.clone(), state: s, inv });
        }
        secs.reverse();
        (y, Self::from_factors(secs))
    }

    /// The action on first letters.
    pub fn root_perm(&self, arity: u8) -> Vec<u8> {
        (0..arity).map(|x| self.act_letter(x).0).collect()
    }

    /// Image of the prefix `w` and the section of `self` at `w`.
    pub fn apply_prefix(&self, w: &[u8]) -> (Word, TailElement) {
        let mut t = self.clone();
        let mut img = Vec::with_capacity(w.len());
        for &x in w {
            if t.is_empty() {
                img.push(x);
                continue;
            }
            let (y, s) = t.act_letter(x);
            img.push(y);
            t = s;
        }
        (Word(img), t)
    }

    pub fn section(&self, w: &[u8]) -> TailElement {
        self.apply_prefix(w).1
    }

    /// Decides whether `self` acts trivially, exploring at most `budget` section words.
    pub fn is_identity_with_budget(&self, budget: usize) -> Result<bool> {
        if self.is_empty() {
            return Ok(true);
        }
        if let Some(v) = IDENTITY_CACHE.with(|c| c.borrow().get(self).copied()) {
            return Ok(v);
        }
        let arity = self.arity().unwrap_or(2);
        let mut seen: HashSet<TailElement> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.clone());
        queue.push_back(self.clone());
        let mut result = true;
        'bfs: while let Some(t) = queue.pop_front() {
            for x in 0..arity {
                let (y, s) = t.act_letter(x);
                if y != x {
                    result = false;
                    break 'bfs;
                }
                if !s.is_empty() && seen.insert(s.clone()) {
                    if seen.len() > budget {
                        return Err(Error::TailBudgetExceeded { budget });
                    }
                    queue.push_back(s);
                }
            }
        }
        IDENTITY_CACHE.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() >= IDENTITY_CACHE_CAP {
                c.clear();
            }
            if result {
                // every explored section is trivial as well
                for s in seen {
                    c.insert(s, true);
                }
            } else {
                c.insert(self.clone(), false);
            }
        });
        Ok(result)
    }

    pub fn is_identity(&self) -> Result<bool> {
        self.is_identity_with_budget(DEFAULT_TAIL_BUDGET)
    }

    /// Whether `self` and `other` act identically.
    pub fn same_action(&self, other: &TailElement) -> Result<bool> {
        if self == other {
            return Ok(true);
        }
        self.invert().mul(other).is_identity()
    }
}

impl fmt::Display for TailElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TailElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// A one-state machine whose state acts trivially.
pub fn trivial() -> Arc<MealyMachine> {
    static M: OnceLock<Arc<MealyMachine>> = OnceLock::new();
    M.get_or_init(|| {
        Arc::new(MealyMachine::new("trivial", 2, names(&["id"]), vec![vec![0, 1]], vec![vec![0, 0]]).unwrap())
    })
    .clone()
}

/// The first Grigorchuk group: states `a, b, c, d` and the identity `e`.
pub fn grigorchuk() -> Arc<MealyMachine> {
    static M: OnceLock<Arc<MealyMachine>> = OnceLock::new();
    M.get_or_init(|| {
        // a = swap, b = (a, c), c = (a, d), d = (e, b)
        let perm = vec![vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 1]];
        let trans = vec![vec![4, 4], vec![0, 2], vec![0, 3], vec![4, 1], vec![4, 4]];
        Arc::new(MealyMachine::new("grigorchuk", 2, names(&["a", "b", "c", "d", "e"]), perm, trans).unwrap())
    })
    .clone()
}

/// The `d`-ary odometer; state 0 is the adding machine (`add` for `d = 2`, `add{d}` otherwise).
pub fn adding_machine(d: u8) -> Result<Arc<MealyMachine>> {
    static M2: OnceLock<Arc<MealyMachine>> = OnceLock::new();
    static M3: OnceLock<Arc<MealyMachine>> = OnceLock::new();
    let build = |d: u8| -> Result<MealyMachine> {
        if d < 2 {
            return Err(Error::BadArity(d));
        }
        let name = if d == 2 { "add".to_string() } else { format!("add{d}") };
        let perm = vec![(0..d).map(|x| (x + 1) % d).collect(), (0..d).collect()];
        let mut carry = vec![1u32; d as usize];
        carry[d as usize - 1] = 0;
        let trans = vec![carry, vec![1; d as usize]];
        MealyMachine::new(&name, d, vec![name.clone(), format!("{name}.e")], perm, trans)
    };
    match d {
        2 => Ok(M2.get_or_init(|| Arc::new(build(2).unwrap())).clone()),
        3 => Ok(M3.get_or_init(|| Arc::new(build(3).unwrap())).clone()),
        _ => Ok(Arc::new(build(d)?)),
    }
}

/// The finite-depth automorphism permuting depth-`k` words as `assignment`
/// (indexed lexicographically), extended trivially below depth `k`.
/// Returns the machine and its root state.
pub fn depth_perm(arity: u8, k: usize, assignment: &[Word]) -> Result<(Arc<MealyMachine>, u32)> {
    let bad = |m: &str| Err(Error::InvalidDepthPerm(m.to_string()));
    let words = Word::all_of_length(arity, k);
    if assignment.len() != words.len() {
        return bad("assignment must list one image per depth-k word");
    }
    if assignment.iter().any(|w| w.len() != k || w.check(arity).is_err()) {
        return bad("images must be depth-k words over the alphabet");
    }
    let index = |v: &[u8]| v.iter().fold(0usize, |acc, &x| acc * arity as usize + x as usize);
    // vertices of depth < k, then one identity state
    let mut verts: Vec<Word> = Vec::new();
    for j in 0..k {
        verts.extend(Word::all_of_length(arity, j));
    }
    let id_state = verts.len() as u32;
    let pos: HashMap<Word, u32> = verts.iter().cloned().enumerate().map(|(i, v)| (v, i as u32)).collect();
    let mut perm = Vec::new();
    let mut trans = Vec::new();
    for v in &verts {
        let j = v.len();
        let p: Vec<u8> = (0..arity)
            .map(|x| {
                let mut probe = v.child(x).0;
                probe.resize(k, 0);
                assignment[index(&probe)][j]
            })
            .collect();
        perm.push(p);
        trans.push(
            (0..arity)
                .map(|x| if j + 1 < k { pos[&v.child(x)] } else { id_state })
                .collect(),
        );
    }
    perm.push((0..arity).collect());
    trans.push(vec![id_state; arity as usize]);
    let label: String = assignment.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(".");
    let name = format!("dp{arity}_{k}_{label}");
    let mut state_names: Vec<String> = verts.iter().map(|v| format!("{name}_v{v}")).collect();
    state_names[0] = name.clone();
    state_names.push(format!("{name}.e"));
    let m = MealyMachine::new(&name, arity, state_names, perm, trans)
        .map_err(|e| Error::InvalidDepthPerm(e.to_string()))?;
    let m = Arc::new(m);
    let t = TailElement::state(&m, 0);
    for (w, img) in words.iter().zip(assignment) {
        if &t.apply_prefix(w).0 != img {
            return bad("assignment is not induced by a tree automorphism");
        }
    }
    Ok((m, 0))
}

/// Name lookup for machine states used in tail literals.
#[derive(Clone)]
pub struct TailRegistry {
    states: HashMap<String, (Arc<MealyMachine>, u32)>,
}

impl Default for TailRegistry {
    fn default() -> Self {
        let mut r = TailRegistry { states: HashMap::new() };
        r.register(grigorchuk());
        r.register(adding_machine(2).unwrap());
        r.register(adding_machine(3).unwrap());
        r
    }
}

impl TailRegistry {
    pub fn empty() -> Self {
        TailRegistry { states: HashMap::new() }
    }

    /// Adds every state of `m` under its name; later registrations shadow earlier ones.
    pub fn register(&mut self, m: Arc<MealyMachine>) {
        for (i, s) in m.state_names.iter().enumerate() {
            self.states.insert(s.clone(), (m.clone(), i as u32));
        }
    }

    pub fn lookup(&self, name: &str) -> Result<TailElement> {
        self.states
            .get(name)
            .map(|(m, s)| TailElement::state(m, *s))
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }
}

/// Convenience: a Grigorchuk generator by name.
pub fn grig(name: &str) -> TailElement {
    let m = grigorchuk();
    let s = m.state_index(name).expect("grigorchuk state");
    TailElement::state(&m, s)
}

/// Convenience: the binary adding machine.
pub fn odometer() -> TailElement {
    TailElement::state(&adding_machine(2).unwrap(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Binary odometer on a finite word: add one with carry to the right.
    fn odometer_oracle(w: &[u8]) -> Vec<u8> {
        let mut v = w.to_vec();
        for x in v.iter_mut() {
            if *x == 0 {
                *x = 1;
                return v;
            }
            *x = 0;
        }
        v
    }

    fn pow(t: &TailElement, n: usize) -> TailElement {
        (0..n).fold(TailElement::identity(), |acc, _| acc.mul(t))
    }

    #[test]
    fn apply_prefix_examples() {
        let id = TailElement::identity();
        assert_eq!(id.apply_prefix(&[0, 1, 0, 1]), (Word(vec![0, 1, 0, 1]), id.clone()));
        let a = odometer();
        assert_eq!(a.apply_prefix(&[1, 1]), (Word(vec![0, 0]), a.clone()));
        assert_eq!(a.apply_prefix(&[0, 1]), (Word(vec![1, 1]), id.clone()));
        assert_eq!(a.apply_prefix(&[1, 1, 1]), (Word(vec![0, 0, 0]), a.clone()));
        for w in Word::all_of_length(2, 7) {
            assert_eq!(a.apply_prefix(&w).0 .0, odometer_oracle(&w));
        }
    }

    #[test]
    fn compose_and_invert() {
        let a = odometer();
        assert_eq!(a.compose(&TailElement::identity()).unwrap(), a);
        assert!(a.compose(&a.invert()).unwrap().is_identity().unwrap());
        assert!(a.invert().invert().same_action(&a).unwrap());
        let a3 = TailElement::state(&adding_machine(3).unwrap(), 0);
        assert!(matches!(a.compose(&a3), Err(Error::AlphabetMismatch { .. })));
        // (s ∘ t)(x) = s(t(x))
        let g = grig("b").mul(&a);
        for w in Word::all_of_length(2, 6) {
            let inner = a.apply_prefix(&w).0;
            assert_eq!(g.apply_prefix(&w).0, grig("b").apply_prefix(&inner).0);
        }
    }

    #[test]
    fn grigorchuk_relations() {
        for s in ["a", "b", "c", "d"] {
            let t = grig(s);
            assert!(!t.is_identity().unwrap());
            assert!(t.mul(&t).is_identity().unwrap());
        }
        assert!(grig("b").mul(&grig("c")).mul(&grig("d")).is_identity().unwrap());
        let ab = grig("a").mul(&grig("b"));
        assert!(!pow(&ab, 8).is_identity().unwrap());
        assert!(pow(&ab, 16).is_identity().unwrap());
    }

    #[test]
    fn involutions_reduce() {
        assert_eq!(grig("a").invert(), grig("a"));
        assert!(grig("a").mul(&grig("a")).is_empty());
        assert!(odometer().mul(&odometer().invert()).is_empty());
        assert!(!odometer().mul(&odometer()).is_empty());
    }

    #[test]
    fn depth_perm_examples() {
        let swap = [Word::from("1"), Word::from("0")];
        let (m, r) = depth_perm(2, 1, &swap).unwrap();
        let t = TailElement::state(&m, r);
        assert_eq!(t.apply_prefix(&[0, 1, 1]), (Word(vec![1, 1, 1]), TailElement::identity()));
        // swap only below 0
        let w: Vec<Word> = ["01", "00", "10", "11"].iter().map(|s| Word::from(*s)).collect();
        let (m, r) = depth_perm(2, 2, &w).unwrap();
        let t = TailElement::state(&m, r);
        assert_eq!(t.apply_prefix(&[0, 0, 1]).0, Word(vec![0, 1, 1]));
        assert_eq!(t.apply_prefix(&[1, 0, 1]).0, Word(vec![1, 0, 1]));
        // not induced by letter permutations along the tree
        let bad: Vec<Word> = ["10", "01", "00", "11"].iter().map(|s| Word::from(*s)).collect();
        assert!(matches!(depth_perm(2, 2, &bad), Err(Error::InvalidDepthPerm(_))));
    }

    #[test]
    fn machine_text_format() {
        let m = MealyMachine::parse(
            "machine lamp 2\n\
             p: 1 0 | q p\n\
             q: 0 1 | q p # comment\n",
        )
        .unwrap();
        assert_eq!(m.name(), "lamp");
        assert_eq!(m.state_index("q"), Some(1));
        let mut reg = TailRegistry::empty();
        reg.register(Arc::new(m));
        let p = reg.lookup("p").unwrap();
        assert!(!p.is_identity().unwrap());
        assert!(reg.lookup("zz").is_err());
        assert!(MealyMachine::parse("machine x 2\np: 0 0 | p p").is_err());
        assert!(MealyMachine::parse("machine x 2\np: 1 0 | p r").is_err());
    }

    #[test]
    fn budget_is_reported() {
        let t = pow(&grig("a").mul(&grig("b")), 16);
        assert!(matches!(
            t.invert().mul(&grig("c")).is_identity_with_budget(1),
            Err(Error::TailBudgetExceeded { budget: 1 }) | Ok(false)
        ));
    }

    #[test]
    fn display() {
        let t = grig("b").mul(&odometer().invert());
        assert_eq!(t.to_string(), "b*add^-1");
        assert_eq!(TailElement::identity().to_string(), "1");
    }
}
