use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use valdetect_core::fields::{Context, FieldTower, TowerSpec, ValuationId};
use valdetect_core::galois::{self, KerTheta};
use valdetect_core::linalg_fl::Subspace;
use valdetect_core::milnor::{self, K2Class, K2Key, Place};
use valdetect_core::projective_replay;
use valdetect_core::rigidity::{Analyzer, Verdict};
use valdetect_core::suites::{self, RunReport};

#[derive(Parser)]
#[command(name = "valdetect", version, about = "Valuations from rigid subgroups, K_2 mod ℓ and Kummer duality")]
struct Cli {
    /// JSON tower description.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Representative degree bound over a rational base (default: the tower file's, else 4).
    #[arg(long, global = true)]
    bound: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exit with status 2 when the computed verdict is negative.
    #[arg(long, global = true)]
    assert: bool,
    /// Zero the timing fields.
    #[arg(long, global = true)]
    stable: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Class of an element in K^×/K^{×ℓ}.
    ClassOf { elem: String },
    /// The symbol {x, y} in K_2/ℓ.
    Symbol { x: String, y: String },
    /// Rigidity of a context subgroup, e.g. "zeta" or "s, zeta^2*t".
    Rigid { t: String },
    Hull { t: String },
    Valuative { h: String },
    /// Coarsest chain valuation whose units lie in H.
    VOf { h: String },
    VkTk,
    /// Center I(Z) of a subgroup of characters, e.g. "s* + 2 t*, zeta*".
    AclCenter { z: String },
    Ak,
    /// D¹ and I¹ of the chain valuation at a level.
    D1i1 { level: usize },
    ReplayClaim {
        #[arg(long, default_value_t = suites::DEFAULT_RANGE)]
        range: i64,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

struct Env {
    k: FieldTower,
    ctx: Context,
    bound: usize,
}

fn load(cli: &Cli) -> anyhow::Result<Option<Env>> {
    let Some(path) = &cli.spec else { return Ok(None) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: TowerSpec = serde_json::from_str(&text).with_context(|| format!("parsing spec {}", path.display()))?;
    let (k, ctx) = FieldTower::from_spec(&spec)?;
    let bound = cli.bound.or(spec.context.degree_bound).unwrap_or(suites::DEFAULT_BOUND);
    Ok(Some(Env { k, ctx, bound }))
}

fn need(env: &Option<Env>) -> anyhow::Result<&Env> {
    env.as_ref().ok_or_else(|| anyhow!("this command needs --spec <file>"))
}

fn render_sub(k: &FieldTower, ctx: &Context, s: &Subspace) -> Value {
    json!(s.rows().iter().map(|r| k.render_dense(ctx, r)).collect::<Vec<_>>())
}

fn render_chars(k: &FieldTower, ctx: &Context, s: &Subspace) -> Value {
    json!(s.rows().iter().map(|r| galois::render_character(k, ctx, r)).collect::<Vec<_>>())
}

fn render_k2(k: &FieldTower, c: &K2Class) -> Value {
    let mut m = Map::new();
    for (key, e) in c.iter() {
        let name = match key {
            K2Key::Place(Place::Finite(p)) => format!("place ({})", k.render_poly(p)),
            K2Key::Place(Place::Infinity) => "place inf".into(),
            K2Key::Tame { layer, index } => format!("tame {}: {}", k.vars()[*layer], k.basis_name(index)),
        };
        m.insert(name, json!(e));
    }
    Value::Object(m)
}

fn render_verdict(k: &FieldTower, v: &Verdict) -> Value {
    json!({
        "holds": v.holds,
        "certified": v.is_certified(),
        "assurance": suites::assurance_label(v.assurance),
        "witness": v.witness.as_ref().map(|w| json!([k.render_class(&w.x), k.render_class(&w.y)])),
        "notes": v.notes,
    })
}

fn header(cli: &Cli, env: &Option<Env>, command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!("valdetect"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    if let Some(e) = env {
        m.insert("field".into(), json!(e.k.name()));
        m.insert("bound".into(), json!(e.bound));
    }
    m.insert("seed".into(), json!(cli.seed));
    m
}

/// Runs one query; the flag is the verdict that `--assert` tests.
fn query(cli: &Cli, env: &Option<Env>) -> anyhow::Result<(Value, bool)> {
    let mut out = header(cli, env, command_name(&cli.cmd));
    let mut holds = true;
    let mut put = |k: &str, v: Value| {
        out.insert(k.into(), v);
    };
    match &cli.cmd {
        Cmd::ClassOf { elem } => {
            let e = need(env)?;
            let c = e.k.class_of(&e.k.parse_elem(elem)?)?;
            put("class", json!(e.k.render_class(&c)));
            put("zero", json!(c.is_zero()));
            put("in_context", json!(e.ctx.to_dense(&c).is_ok()));
        }
        Cmd::Symbol { x, y } => {
            let e = need(env)?;
            let s = milnor::symbol_of(&e.k, &e.k.parse_elem(x)?, &e.k.parse_elem(y)?)?;
            holds = s.is_zero();
            put("zero", json!(s.is_zero()));
            put("components", render_k2(&e.k, &s));
            put("reciprocity", json!(milnor::reciprocity_check(&e.k, &s)));
        }
        Cmd::Rigid { t } => {
            let e = need(env)?;
            let t = e.k.parse_subgroup(&e.ctx, t)?;
            let v = Analyzer::new(&e.k, &e.ctx, e.bound).is_rigid(&t)?;
            holds = v.holds;
            put("verdict", json!(if v.holds { "rigid" } else { "not rigid" }));
            put("certified", json!(v.is_certified()));
            put("detail", render_verdict(&e.k, &v));
        }
        Cmd::Hull { t } => {
            let e = need(env)?;
            let t = e.k.parse_subgroup(&e.ctx, t)?;
            let h = Analyzer::new(&e.k, &e.ctx, e.bound).hull(&t)?;
            put("hull", render_sub(&e.k, &e.ctx, &h.hull));
            put("dim", json!(h.hull.dim()));
            put("rigid", json!(h.hull == t));
            put("partner_span", render_sub(&e.k, &e.ctx, &h.partner_span));
            put("detail", render_verdict(&e.k, &h.verdict));
        }
        Cmd::Valuative { h } => {
            let e = need(env)?;
            let h = e.k.parse_subgroup(&e.ctx, h)?;
            let v = Analyzer::new(&e.k, &e.ctx, e.bound).is_valuative(&h)?;
            holds = v.holds;
            put("verdict", json!(if v.holds { "valuative" } else { "not valuative" }));
            put("certified", json!(v.is_certified()));
            put("detail", render_verdict(&e.k, &v));
        }
        Cmd::VOf { h } => {
            let e = need(env)?;
            let h = e.k.parse_subgroup(&e.ctx, h)?;
            let v = Analyzer::new(&e.k, &e.ctx, e.bound).v_from_h(&h)?;
            put("level", json!(v.level));
        }
        Cmd::VkTk => {
            let e = need(env)?;
            let r = Analyzer::new(&e.k, &e.ctx, e.bound).enumerate_vk_tk()?;
            holds = r.bijection_holds();
            let chain: Vec<Value> = r
                .chain
                .iter()
                .map(|c| {
                    json!({
                        "level": c.valuation.level,
                        "gamma_ok": c.gamma_ok,
                        "noncyclic": c.noncyclic,
                        "hull_full": render_verdict(&e.k, &c.hull_full),
                        "partners": c.partners.iter().map(|(x, p)| json!([e.k.render_class(x), p.as_ref().map(|p| e.k.render_class(p))])).collect::<Vec<_>>(),
                        "admitted": c.admitted(),
                    })
                })
                .collect();
            put("vk", json!(r.vk.iter().map(|v| v.level).collect::<Vec<_>>()));
            put("tk", json!(r.tk.iter().map(|t| render_sub(&e.k, &e.ctx, &t.t)).collect::<Vec<_>>()));
            put("injective", json!(r.injective));
            put("surjective", json!(r.surjective));
            put("coarsening_commutes", json!(r.coarsening.iter().all(|c| c.commutes)));
            put("bijection", json!(r.bijection_holds()));
            put("assurance", json!(suites::assurance_label(r.assurance)));
            put("candidates_examined", json!(r.candidates_examined));
            put("chain", json!(chain));
            put("notes", json!(r.notes));
        }
        Cmd::AclCenter { z } => {
            let e = need(env)?;
            let an = Analyzer::new(&e.k, &e.ctx, e.bound);
            let gens = split_chars(z).iter().map(|g| e.k.parse_character(&e.ctx, g)).collect::<Result<Vec<_>, _>>()?;
            let z = Subspace::span(e.k.ell(), e.ctx.dim(), &gens)?;
            let kt = KerTheta::of(&an)?;
            let center = kt.acl_center(&z)?;
            let (dual, v) = galois::acl_center_dual(&an, &z)?;
            holds = center == dual;
            put("center", render_chars(&e.k, &e.ctx, &center));
            put("is_acl", json!(kt.is_acl(&z)?));
            put("dual_agrees", json!(center == dual));
            put("dual_assurance", json!(suites::assurance_label(v.assurance)));
        }
        Cmd::Ak => {
            let e = need(env)?;
            let an = Analyzer::new(&e.k, &e.ctx, e.bound);
            let ak = galois::enumerate_ak(&KerTheta::of(&an)?)?;
            holds = ak.centralizer_agrees;
            let entries: Vec<Value> = ak
                .entries
                .iter()
                .map(|a| json!({"z": render_chars(&e.k, &e.ctx, &a.z), "center": render_chars(&e.k, &e.ctx, &a.center)}))
                .collect();
            put("entries", json!(entries));
            put("subspaces_examined", json!(ak.subspaces_examined));
            put("centralizer_agrees", json!(ak.centralizer_agrees));
        }
        Cmd::D1i1 { level } => {
            let e = need(env)?;
            let v = ValuationId { level: *level };
            let (d1, i1) = galois::d1_i1_of_v(&e.k, &e.ctx, v)?;
            put("level", json!(level));
            put("d1", render_chars(&e.k, &e.ctx, &d1));
            put("i1", render_chars(&e.k, &e.ctx, &i1));
            put("d_mu", render_chars(&e.k, &e.ctx, &galois::d_mu_of_v(&e.k, &e.ctx, v)?));
        }
        Cmd::ReplayClaim { range } => {
            if *range < 1 {
                bail!("--range must be positive");
            }
            let r = projective_replay::replay_claim(*range);
            holds = r.all_passed;
            let steps: Vec<Value> = r
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "step": s.step,
                        "statement": s.statement,
                        "instances": s.instances,
                        "failures": s.failures,
                        "closure": s.closure,
                        "passed": s.passed,
                        "detail": s.detail,
                    })
                })
                .collect();
            put("range", json!(r.range));
            put("steps", json!(steps));
            put("established", json!(r.established));
            put("passed_steps", json!(r.passed_steps()));
            put("status", json!(if r.all_passed { "pass" } else { "fail" }));
        }
        Cmd::Verify { .. } => unreachable!("handled by verify"),
    }
    Ok((Value::Object(out), holds))
}

fn command_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::ClassOf { .. } => "class-of",
        Cmd::Symbol { .. } => "symbol",
        Cmd::Rigid { .. } => "rigid",
        Cmd::Hull { .. } => "hull",
        Cmd::Valuative { .. } => "valuative",
        Cmd::VOf { .. } => "v-of",
        Cmd::VkTk => "vk-tk",
        Cmd::AclCenter { .. } => "acl-center",
        Cmd::Ak => "ak",
        Cmd::D1i1 { .. } => "d1i1",
        Cmd::ReplayClaim { .. } => "replay-claim",
        Cmd::Verify { .. } => "verify",
    }
}

// Characters are separated by commas outside parentheses.
fn split_chars(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.retain(|g| !g.is_empty() && *g != "0");
    out
}

fn verify(cli: &Cli, env: &Option<Env>, suite: &str) -> anyhow::Result<RunReport> {
    let bound = env.as_ref().map_or(cli.bound.unwrap_or(suites::DEFAULT_BOUND), |e| e.bound);
    let on = env.as_ref().map(|e| (&e.k, &e.ctx));
    let field = env.as_ref().map_or_else(|| suites::laurent_st().0.name(), |e| e.k.name());
    let checks = suites::run(suite, cli.seed, bound, on)
        .ok_or_else(|| anyhow!("unknown suite {suite:?}; expected one of {} or all", suites::SUITES.join(", ")))?;
    let r = RunReport::new(suite, &field, cli.seed, bound, checks);
    Ok(if cli.stable { r.without_timing() } else { r })
}

fn text_of(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || (x.is_array() && x.as_array().is_some_and(|a| a.iter().any(|y| y.is_object()))) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    text_of(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", inline(x)));
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                out.push_str(&format!("{pad}-\n"));
                text_of(x, indent + 1, out);
            }
        }
        x => out.push_str(&format!("{pad}{}\n", inline(x))),
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        x => x.to_string(),
    }
}

fn report_text(r: &RunReport) -> String {
    let w = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
    let mut s = format!("{} {}  suite {}  field {}  seed {}  bound {}\n", r.tool, r.version, r.suite, r.field, r.seed, r.bound);
    s.push_str(&format!("{:<w$}  {:<4}  {:<13}  {:>9}  summary\n", "check", "ok", "assurance", "ms"));
    for c in &r.checks {
        s.push_str(&format!("{:<w$}  {:<4}  {:<13}  {:>9.1}  {}\n", c.name, if c.passed { "PASS" } else { "FAIL" }, c.assurance, c.millis, c.summary));
        for wt in &c.witnesses {
            s.push_str(&format!("{:<w$}    witness: {wt}\n", ""));
        }
    }
    s.push_str(&format!("{} passed, {} failed: {}\n", r.passed, r.failed, r.status));
    s
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let env = load(cli)?;
    if let Cmd::Verify { suite } = &cli.cmd {
        let r = verify(cli, &env, suite)?;
        match cli.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&r)?),
            Format::Text => print!("{}", report_text(&r)),
        }
        return Ok(r.all_passed());
    }
    let (v, holds) = query(cli, &env)?;
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&v)?),
        Format::Text => {
            let mut s = String::new();
            text_of(&v, 0, &mut s);
            print!("{s}");
        }
    }
    Ok(holds || !cli.assert)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
