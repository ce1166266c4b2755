//! The `cfl` command line. Exit codes: 0 witness/true, 1 refuted/false, 2 exhausted at
//! bound, 3 usage or input error.

use std::ffi::OsString;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::certificate::Certificate;
use crate::clopen::{Clopen, Word};
use crate::completion::GeneratorTable;
use crate::parse;
use crate::pmap::{Eval, PartialMap};
use crate::random::DEFAULT_SEED;
use crate::tail::TailRegistry;

pub const USAGE_ERROR: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cfl", version, about = "Clopen partial homeomorphisms of the Cantor space")]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Alphabet size
    #[arg(long, global = true, default_value_t = 2)]
    arity: u8,
    /// Generator family (e.g. `higman_thompson:2`) or a file of `name = element` lines
    #[arg(long, global = true)]
    gens: Option<String>,
    /// Node budget for searches
    #[arg(long, global = true, default_value_t = 100_000)]
    budget: u64,
    /// Seed for random sampling
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print an element or clopen in normal form
    Normalize { input: String },
    /// Product f1·f2·…·fk (rightmost acts first)
    Compose {
        #[arg(required = true, num_args = 2..)]
        elems: Vec<String>,
    },
    Star { elem: String },
    /// Join of pairwise compatible elements
    Join {
        #[arg(required = true)]
        elems: Vec<String>,
    },
    /// f·e, restricting the domain to the clopen e
    Restrict { elem: String, clopen: String },
    /// e·f, restricting the range to the clopen e
    Corestrict { clopen: String, elem: String },
    Eq { a: String, b: String },
    /// Image of a finite word
    Eval { elem: String, word: String },
    Leq { a: String, b: String },
    /// Compatibility and disjointness of two elements
    Compat { a: String, b: String },
    #[command(subcommand)]
    Msec(MsecCmd),
    #[command(subcommand)]
    Genkit(GenkitCmd),
    #[command(subcommand)]
    Dyn(DynCmd),
    #[command(subcommand)]
    Bi(BiCmd),
    #[command(subcommand)]
    Gen(GenCmd),
    /// Sample a random unit, partial map or clopen
    Random {
        #[arg(value_parser = ["unit", "map", "clopen"])]
        kind: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
enum MsecCmd {
    /// Check a literal `msec(e1; f2, …)` against the axioms
    Build { msec: String },
    /// The unit permuting the idempotents by a permutation like `1,2,0`
    Element { msec: String, perm: String },
    /// Restrictions to a subdivision of e1
    Cover {
        msec: String,
        #[arg(required = true)]
        pieces: Vec<String>,
    },
    /// Combine along idempotent i1 of the first and i2 of the second
    Combine { a: String, i1: usize, b: String, i2: usize },
    /// Extend the degree by one over the generator table
    Extend {
        msec: String,
        #[arg(long, default_value_t = 3)]
        len: usize,
        /// Extra subdivision levels
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Factor an Alt element over the cover given by a subdivision of e1
    Factor {
        msec: String,
        perm: String,
        #[arg(long = "piece", required = true)]
        pieces: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct KitArgs {
    /// Partition: `atoms:n` or clopens separated by `;`
    #[arg(long, default_value = "atoms:3")]
    partition: String,
    #[arg(long, default_value_t = 5)]
    orbit: usize,
    /// Word length when searching for separating elements and meets
    #[arg(long, default_value_t = 3)]
    len: usize,
}

#[derive(Subcommand, Debug)]
enum GenkitCmd {
    /// Check the separating conditions for the table's kit elements
    Verify {
        #[command(flatten)]
        kit: KitArgs,
        /// Cylinder depth for the orbit and meet conditions
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    Build {
        #[command(flatten)]
        kit: KitArgs,
    },
    /// Express element(S, π) (or a short target element) as a word over the kit
    Express {
        #[command(flatten)]
        kit: KitArgs,
        #[arg(long, conflicts_with = "target")]
        msec: Option<String>,
        #[arg(long, requires = "msec")]
        perm: Option<String>,
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum DynCmd {
    Expansive {
        #[arg(long, default_value = "atoms:1")]
        partition: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        len: usize,
    },
    /// Parts visited by w(x) for points x with the given prefix
    Code {
        #[arg(long, default_value = "atoms:1")]
        partition: String,
        #[arg(long)]
        prefix: String,
        /// Expressions over the generators
        #[arg(required = true)]
        words: Vec<String>,
    },
    Minimal {
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        len: usize,
    },
    Compress {
        y: String,
        z: String,
        #[arg(long, default_value_t = 6)]
        len: usize,
    },
    Fullcompress {
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        len: usize,
    },
    Orbit {
        u: String,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        len: usize,
    },
    Split {
        elem: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        len: usize,
    },
    Rigid {
        elem: String,
        #[arg(long, default_value = "atoms:1")]
        partition: String,
    },
}

#[derive(Subcommand, Debug)]
enum BiCmd {
    Enumerate {
        #[arg(long, default_value_t = 1)]
        len: usize,
        #[arg(long, default_value_t = 2)]
        join: usize,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Piecewise membership of a unit in the full group of the table
    Member {
        elem: String,
        #[arg(long, default_value_t = 3)]
        len: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
enum GenCmd {
    List,
    Show { name: String },
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(code: i32, stdout: String) -> Self {
        Output { code, stdout, stderr: String::new() }
    }

    fn usage(msg: String) -> Self {
        Output { code: USAGE_ERROR, stdout: String::new(), stderr: msg }
    }
}

type Res<T> = std::result::Result<T, String>;

struct Env {
    arity: u8,
    json: bool,
    budget: u64,
    seed: u64,
    gens: Option<String>,
    reg: TailRegistry,
}

impl Env {
    fn elem(&self, s: &str) -> Res<PartialMap> {
        parse::parse_element(s, self.arity, &self.reg).map_err(|e| format!("element `{s}`: {e}"))
    }

    fn clopen(&self, s: &str) -> Res<Clopen> {
        parse::parse_clopen(s, self.arity).map_err(|e| format!("clopen `{s}`: {e}"))
    }

    fn word(&self, s: &str) -> Res<Word> {
        parse::parse_word(s, self.arity).map_err(|e| format!("word `{s}`: {e}"))
    }

    fn msec(&self, s: &str) -> Res<crate::multisection::Multisection> {
        let (e1, maps) = parse::parse_msec(s, self.arity, &self.reg).map_err(|e| format!("multisection `{s}`: {e}"))?;
        crate::multisection::Multisection::build(&e1, &maps).map_err(|e| e.to_string())
    }

    fn table(&self) -> Res<GeneratorTable> {
        let name = self.gens.as_deref().ok_or("this subcommand needs --gens <family|file>")?;
        if Path::new(name).is_file() {
            let text = std::fs::read_to_string(name).map_err(|e| format!("{name}: {e}"))?;
            return table_from_text(&text, self.arity, &self.reg);
        }
        let fam = crate::library::by_name(name).map_err(|e| e.to_string())?;
        if fam.table.arity() != self.arity {
            return Err(format!("family `{name}` has arity {}, but --arity is {}", fam.table.arity(), self.arity));
        }
        Ok(fam.table)
    }

    fn partition(&self, s: &str) -> Res<Vec<Clopen>> {
        let parts = match s.strip_prefix("atoms:") {
            Some(n) => Clopen::atoms(self.arity, n.trim().parse().map_err(|_| format!("bad partition `{s}`"))?),
            None => s.split(';').map(|c| self.clopen(c.trim())).collect::<Res<_>>()?,
        };
        if !crate::clopen::is_partition(&parts) {
            return Err(format!("`{s}` is not a partition"));
        }
        Ok(parts)
    }

    fn text_or_json(&self, text: String, value: Value) -> Output {
        Output::ok(0, if self.json { pretty(&value) } else { text })
    }

    fn verdict(&self, what: &str, v: bool) -> Output {
        let out = if self.json { pretty(&json!({ what: v })) } else { v.to_string() };
        Output::ok(if v { 0 } else { 1 }, out)
    }

    fn cert<W: Serialize>(&self, c: &Certificate<W>, text: impl FnOnce(&W) -> String) -> Output {
        let code = c.status.exit_code();
        if self.json {
            return Output::ok(code, pretty(&c.to_json()));
        }
        let mut s = format!("{}", serde_json::to_value(c.status).unwrap().as_str().unwrap_or("?"));
        if let Some(w) = &c.witness {
            s.push('\n');
            s.push_str(&text(w));
        }
        for v in [&c.refutation, &c.frontier].into_iter().flatten() {
            s.push('\n');
            s.push_str(&v.to_string());
        }
        s.push_str(&format!("\nbounds {} nodes {}", Value::Object(c.bounds.clone()), c.nodes_explored));
        Output::ok(code, s)
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value")
}

/// A generator table from lines `name = element`; blank lines and `#` comments are skipped.
pub fn table_from_text(text: &str, arity: u8, reg: &TailRegistry) -> Res<GeneratorTable> {
    let mut t = GeneratorTable::new(arity);
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, elem) = line.split_once('=').ok_or(format!("line {}: expected `name = element`", n + 1))?;
        let m = parse::parse_element(elem.trim(), arity, reg).map_err(|e| format!("line {}: {e}", n + 1))?;
        t.insert(name.trim(), m).map_err(|e| format!("line {}: {e}", n + 1))?;
    }
    Ok(t)
}

fn perm_arg(s: &str) -> Res<Vec<usize>> {
    s.split(',').map(|x| x.trim().parse().map_err(|_| format!("bad permutation `{s}`"))).collect()
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { Output::ok(0, text) } else { Output::usage(text) };
        }
    };
    if cli.arity < 2 {
        return Output::usage(format!("--arity must be at least 2, got {}", cli.arity));
    }
    let env = Env { arity: cli.arity, json: cli.json, budget: cli.budget, seed: cli.seed, gens: cli.gens, reg: TailRegistry::default() };
    match dispatch(&env, cli.cmd) {
        Ok(out) => out,
        Err(msg) => Output::usage(format!("error: {msg}")),
    }
}

fn dispatch(env: &Env, cmd: Cmd) -> Res<Output> {
    let s = |m: &PartialMap| m.to_string();
    Ok(match cmd {
        Cmd::Normalize { input } => match env.elem(&input) {
            Ok(m) => env.text_or_json(s(&m), json!({ "element": s(&m), "depth": m.depth() })),
            Err(e) => match env.clopen(&input) {
                Ok(c) => env.text_or_json(c.to_string(), json!({ "clopen": c })),
                Err(_) => return Err(e),
            },
        },
        Cmd::Compose { elems } => {
            let ms = elems.iter().map(|e| env.elem(e)).collect::<Res<Vec<_>>>()?;
            let mut acc = ms.last().cloned().expect("two or more");
            for m in ms.iter().rev().skip(1) {
                acc = m.compose(&acc).map_err(|e| e.to_string())?;
            }
            env.text_or_json(s(&acc), json!({ "element": s(&acc) }))
        }
        Cmd::Star { elem } => {
            let m = env.elem(&elem)?.star();
            env.text_or_json(s(&m), json!({ "element": s(&m) }))
        }
        Cmd::Join { elems } => {
            let ms = elems.iter().map(|e| env.elem(e)).collect::<Res<Vec<_>>>()?;
            let m = PartialMap::join(&ms).map_err(|e| e.to_string())?;
            env.text_or_json(s(&m), json!({ "element": s(&m) }))
        }
        Cmd::Restrict { elem, clopen } => {
            let m = env.elem(&elem)?.restrict(&env.clopen(&clopen)?);
            env.text_or_json(s(&m), json!({ "element": s(&m) }))
        }
        Cmd::Corestrict { clopen, elem } => {
            let m = env.elem(&elem)?.corestrict(&env.clopen(&clopen)?);
            env.text_or_json(s(&m), json!({ "element": s(&m) }))
        }
        Cmd::Eq { a, b } => {
            let v = env.elem(&a)?.try_eq(&env.elem(&b)?).map_err(|e| e.to_string())?;
            env.verdict("equal", v)
        }
        Cmd::Leq { a, b } => env.verdict("leq", env.elem(&a)?.leq(&env.elem(&b)?)),
        Cmd::Compat { a, b } => {
            let (a, b) = (env.elem(&a)?, env.elem(&b)?);
            let (c, d) = (a.compatible(&b), a.disjoint(&b));
            let text = format!("compatible {c}\ndisjoint {d}");
            let mut out = env.text_or_json(text, json!({ "compatible": c, "disjoint": d }));
            out.code = if c { 0 } else { 1 };
            out
        }
        Cmd::Eval { elem, word } => {
            let (m, w) = (env.elem(&elem)?, env.word(&word)?);
            let (text, v, code) = match m.eval(&w) {
                Eval::Image(img, tail) => {
                    let t = tail.to_string();
                    (format!("{img} {t}"), json!({ "image": img, "section": t }), 0)
                }
                Eval::TooShallow => ("too_shallow".into(), json!({ "too_shallow": true }), 2),
                Eval::Undefined => ("undefined".into(), json!({ "undefined": true }), 1),
            };
            let mut out = env.text_or_json(text, v);
            out.code = code;
            out
        }
        Cmd::Msec(c) => msec(env, c)?,
        Cmd::Genkit(c) => genkit(env, c)?,
        Cmd::Dyn(c) => dynamics(env, c)?,
        Cmd::Bi(c) => bi(env, c)?,
        Cmd::Gen(c) => gen(env, c)?,
        Cmd::Random { kind, depth } => {
            use crate::random::{random_clopen, random_map, random_unit, rng, TailMix};
            let mut r = rng(env.seed);
            let text = match kind.as_str() {
                "unit" => random_unit(&mut r, env.arity, depth, TailMix::Trivial).to_string(),
                "map" => random_map(&mut r, env.arity, depth, TailMix::Trivial).to_string(),
                _ => random_clopen(&mut r, env.arity, depth).to_string(),
            };
            env.text_or_json(text.clone(), json!({ kind: text, "seed": env.seed }))
        }
    })
}

fn msec(env: &Env, cmd: MsecCmd) -> Res<Output> {
    use crate::multisection::{combine, extend_degree, factor_over_cover, Multisection};
    let show = |m: &Multisection| env.text_or_json(m.to_string(), serde_json::to_value(m).expect("msec json"));
    Ok(match cmd {
        MsecCmd::Build { msec } => {
            let m = env.msec(&msec)?;
            show(&m)
        }
        MsecCmd::Element { msec, perm } => {
            let m = env.msec(&msec)?.element(&perm_arg(&perm)?).map_err(|e| e.to_string())?;
            env.text_or_json(m.to_string(), json!({ "element": m.to_string() }))
        }
        MsecCmd::Cover { msec, pieces } => {
            let m = env.msec(&msec)?;
            let sub = pieces.iter().map(|p| env.clopen(p)).collect::<Res<Vec<_>>>()?;
            let cover = m.cover_of(&sub).map_err(|e| e.to_string())?;
            let text = cover.pieces().iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\n");
            env.text_or_json(text, json!({ "pieces": cover.pieces(), "disjoint": cover.pairwise_disjoint() }))
        }
        MsecCmd::Combine { a, i1, b, i2 } => {
            let m = combine(&env.msec(&a)?, i1, &env.msec(&b)?, i2).map_err(|e| e.to_string())?;
            show(&m)
        }
        MsecCmd::Extend { msec, len, depth } => {
            let m = env.msec(&msec)?;
            let c = extend_degree(&m, &env.table()?, len, depth, env.budget);
            env.cert(&c, |x| x.sections.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\n"))
        }
        MsecCmd::Factor { msec, perm, pieces } => {
            let m = env.msec(&msec)?;
            let p = perm_arg(&perm)?;
            let target = m.element(&p).map_err(|e| e.to_string())?;
            let sub = pieces.iter().map(|x| env.clopen(x)).collect::<Res<Vec<_>>>()?;
            let cover = m.cover_of(&sub).map_err(|e| e.to_string())?;
            let c = factor_over_cover(&target, &p, &cover, env.budget).map_err(|e| e.to_string())?;
            env.cert(&c, |w| serde_json::to_string(w).expect("word json"))
        }
    })
}

fn kit(env: &Env, k: &KitArgs) -> Res<crate::multisection::kit::GeneratingKit> {
    let table = env.table()?;
    let p = env.partition(&k.partition)?;
    crate::multisection::kit::GeneratingKit::from_table(&table, p, k.orbit, k.len).map_err(|e| e.to_string())
}

fn genkit(env: &Env, cmd: GenkitCmd) -> Res<Output> {
    use crate::multisection::express::{express_alt, express_short};
    use crate::multisection::kit::{separating_set, verify_separating};
    Ok(match cmd {
        GenkitCmd::Verify { kit: k, depth } => {
            let table = env.table()?;
            let p = env.partition(&k.partition)?;
            let a = separating_set(&table, &p, k.orbit, k.len);
            let rep = verify_separating(&a, &p, k.orbit, depth, k.len, env.budget);
            let v = serde_json::to_value(&rep).expect("report json");
            let text = format!("separating set of {} elements\n{}", a.len(), v);
            let mut out = env.text_or_json(text, json!({ "size": a.len(), "report": v }));
            out.code = if rep.all_pass() { 0 } else { 1 };
            out
        }
        GenkitCmd::Build { kit: k } => {
            let kit = kit(env, &k)?;
            let v = kit.summary();
            env.text_or_json(v.to_string(), v)
        }
        GenkitCmd::Express { kit: k, msec, perm, target } => {
            let kit = kit(env, &k)?;
            let c = match (msec, perm, target) {
                (Some(m), Some(p), None) => express_alt(&env.msec(&m)?, &perm_arg(&p)?, &kit, env.budget).map_err(|e| e.to_string())?,
                (None, None, Some(t)) => express_short(&env.elem(&t)?, &kit, env.budget),
                _ => return Err("express needs either --msec with --perm, or --target".into()),
            };
            env.cert(&c, |w| serde_json::to_string(w).expect("word json"))
        }
    })
}

fn dynamics(env: &Env, cmd: DynCmd) -> Res<Output> {
    use crate::dynamics as d;
    let table = env.table()?;
    let ctx = || d::DynContext::new(&table, true).map(|c| c.with_budget(env.budget)).map_err(|e| e.to_string());
    let err = |e: crate::error::Error| e.to_string();
    Ok(match cmd {
        DynCmd::Expansive { partition, depth, len } => {
            let c = d::expansive_certificate(&ctx()?, &env.partition(&partition)?, depth, len).map_err(err)?;
            env.cert(&c, |w| serde_json::to_string(w).expect("witness json"))
        }
        DynCmd::Code { partition, prefix, words } => {
            let p = env.partition(&partition)?;
            let prefix = env.word(&prefix)?;
            let ms = words
                .iter()
                .map(|w| parse::parse_expr(w, env.arity).and_then(|e| e.evaluate(&table)).map_err(|e| format!("word `{w}`: {e}")))
                .collect::<Res<Vec<_>>>()?;
            let code = d::subshift_code(&p, &prefix, &ms);
            let text = code
                .iter()
                .map(|c| match c {
                    d::CodeEntry::Part(i) => i.to_string(),
                    d::CodeEntry::TooShallow => "?".into(),
                })
                .collect::<Vec<_>>()
                .join(" ");
            env.text_or_json(text, json!({ "code": code }))
        }
        DynCmd::Minimal { depth, len } => {
            let c = d::minimal_certificate(&ctx()?, depth, len);
            env.cert(&c, |w| format!("{} hits", w.len()))
        }
        DynCmd::Compress { y, z, len } => {
            let ctx = ctx()?;
            let c = d::compress_search(&ctx, &env.clopen(&y)?, &env.clopen(&z)?, len).map_err(err)?;
            env.cert(&c, |w| format!("{} -> {}", spell(&ctx, &w.word), w.image))
        }
        DynCmd::Fullcompress { depth, len } => {
            let r = d::fully_compressible_sample(&ctx()?, depth, len);
            let v = serde_json::to_value(&r).expect("report json");
            let text = format!("{}/{} pairs compressible, complete {}", r.passed, r.pairs, r.complete);
            let mut out = env.text_or_json(text, v);
            out.code = match (r.all_pass, r.complete) {
                (true, _) => 0,
                (false, true) => 1,
                (false, false) => 2,
            };
            out
        }
        DynCmd::Orbit { u, k, len } => {
            let ctx = ctx()?;
            let c = d::orbit_lower_bound(&ctx, &env.word(&u)?, k, len).map_err(err)?;
            env.cert(&c, |w| w.iter().map(|x| format!("{} -> {}", spell(&ctx, &x.word), x.image)).collect::<Vec<_>>().join("\n"))
        }
        DynCmd::Split { elem, depth, len } => {
            let c = d::split_unit(&env.elem(&elem)?, &ctx()?, depth, len).map_err(err)?;
            env.cert(&c, |w| format!("g1 {}\ng2 {}\nz {}", w.g1, w.g2, w.z))
        }
        DynCmd::Rigid { elem, partition } => {
            let parts = d::rigid_parts(&env.elem(&elem)?, &env.partition(&partition)?).map_err(err)?;
            let strs: Vec<String> = parts.iter().map(|m| m.to_string()).collect();
            env.text_or_json(strs.join("\n"), json!({ "factors": strs }))
        }
    })
}

fn spell(ctx: &crate::dynamics::DynContext, w: &[usize]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        ctx.spell(w).join(" ")
    }
}

fn bi(env: &Env, cmd: BiCmd) -> Res<Output> {
    use crate::completion::{bi_enumerate, piecewise_member};
    let table = env.table()?;
    Ok(match cmd {
        BiCmd::Enumerate { len, join, depth } => {
            let items = bi_enumerate(&table, len, join, depth);
            let text = items.iter().map(|(m, e)| format!("{m}  = {e}")).collect::<Vec<_>>().join("\n");
            let v: Vec<Value> = items.iter().map(|(m, e)| json!({ "element": m.to_string(), "expr": e })).collect();
            env.text_or_json(text, json!({ "count": items.len(), "elements": v }))
        }
        BiCmd::Member { elem, len, depth } => {
            let c = piecewise_member(&env.elem(&elem)?, &table, len, depth).map_err(|e| e.to_string())?;
            env.cert(&c, |e| e.to_string())
        }
    })
}

fn gen(env: &Env, cmd: GenCmd) -> Res<Output> {
    Ok(match cmd {
        GenCmd::List => env.text_or_json(crate::library::FAMILIES.join("\n"), json!({ "families": crate::library::FAMILIES })),
        GenCmd::Show { name } => {
            let fam = crate::library::by_name(&name).map_err(|e| e.to_string())?;
            let gens: Vec<(String, String)> = fam.table.iter().map(|(n, m)| (n.to_string(), m.to_string())).collect();
            let text = std::iter::once(format!("# {} {}: {}", fam.name, fam.params, fam.notes))
                .chain(gens.iter().map(|(n, m)| format!("{n} = {m}")))
                .collect::<Vec<_>>()
                .join("\n");
            let map: serde_json::Map<String, Value> = gens.into_iter().map(|(n, m)| (n, Value::String(m))).collect();
            env.text_or_json(text, json!({ "family": fam, "arity": fam.table.arity(), "generators": map }))
        }
    })
}
