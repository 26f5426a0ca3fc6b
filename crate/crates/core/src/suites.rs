//! Verification suites over fixed small towers, shared by the CLI and the tests.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fields::{Base, BasisIndex, Context, Elem, FieldTower, KClass, Poly, ValuationId};
use crate::galois::{self, KerTheta};
use crate::linalg_fl::{self, Subspace};
use crate::milnor;
use crate::projective_replay;
use crate::rigidity::{Analyzer, Assurance};

pub const SUITES: [&str; 6] = ["steinberg", "lattice", "vk-tk", "acl-dual", "prop33", "claim"];
pub const DEFAULT_BOUND: usize = 4;
pub const DEFAULT_RANGE: i64 = 25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub assurance: String,
    pub summary: String,
    pub witnesses: Vec<String>,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub suite: String,
    /// The tower the lattice suite ran on; the other suites use fixed instances.
    pub field: String,
    pub seed: u64,
    pub bound: usize,
    pub checks: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
    pub status: String,
}

impl RunReport {
    pub fn new(suite: &str, field: &str, seed: u64, bound: usize, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().filter(|c| c.passed).count();
        let failed = checks.len() - passed;
        Self {
            tool: "valdetect".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            suite: suite.into(),
            field: field.into(),
            seed,
            bound,
            checks,
            passed,
            failed,
            status: if failed == 0 { "pass" } else { "fail" }.into(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// Zeroes the timings so that repeated runs compare byte for byte.
    pub fn without_timing(mut self) -> Self {
        for c in &mut self.checks {
            c.millis = 0.0;
        }
        self
    }
}

struct Outcome {
    passed: bool,
    assurance: String,
    summary: String,
    witnesses: Vec<String>,
}

fn outcome(passed: bool, assurance: &str, summary: String) -> Outcome {
    Outcome { passed, assurance: assurance.into(), summary, witnesses: Vec::new() }
}

fn timed(name: &str, f: impl FnOnce() -> Outcome) -> CheckRecord {
    let start = Instant::now();
    let o = f();
    CheckRecord {
        name: name.into(),
        passed: o.passed,
        assurance: o.assurance,
        summary: o.summary,
        witnesses: o.witnesses,
        millis: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn errored(name: &str, e: impl std::fmt::Display) -> CheckRecord {
    CheckRecord { name: name.into(), passed: false, assurance: "none".into(), summary: format!("error: {e}"), witnesses: Vec::new(), millis: 0.0 }
}

pub fn assurance_label(a: Assurance) -> String {
    match a {
        Assurance::Certified => "certified".into(),
        Assurance::Bounded(d) => format!("bounded(D={d})"),
    }
}

// ---------- instances ----------

fn lin(c: u32) -> Poly {
    Poly::from_coeffs(vec![c % 7, 1])
}

/// F_7((s))((t)) with ℓ = 3 and context {ζ, s, t}.
pub fn laurent_st() -> (FieldTower, Context) {
    let k = FieldTower::new(3, 7, Base::Finite, vec!["s".into(), "t".into()]).expect("valid tower");
    let ctx = k.default_context();
    (k, ctx)
}

/// F_7((t)) with ℓ = 3.
pub fn laurent_t() -> (FieldTower, Context) {
    let k = FieldTower::new(3, 7, Base::Finite, vec!["t".into()]).expect("valid tower");
    let ctx = k.default_context();
    (k, ctx)
}

/// F_7(x) with ℓ = 3 and context {ζ, x, x+1}.
pub fn rational_x() -> (FieldTower, Context) {
    let k = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec![]).expect("valid tower");
    let ctx = k.context(&[lin(0), lin(1)]).expect("valid context");
    (k, ctx)
}

/// F_7(x)((t)) with ℓ = 3 and context {ζ, x, x+1, x−1, t}.
pub fn rational_t() -> (FieldTower, Context) {
    let k = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec!["t".into()]).expect("valid tower");
    let ctx = k.context(&[lin(0), lin(1), lin(6)]).expect("valid context");
    (k, ctx)
}

/// F_7(x)((s))((t)) with ℓ = 3 and context irreducibles {x, x±1, x±2}.
pub fn rational_st() -> (FieldTower, Context) {
    let k = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec!["s".into(), "t".into()]).expect("valid tower");
    let ctx = k.context(&[lin(0), lin(1), lin(6), lin(2), lin(5)]).expect("valid context");
    (k, ctx)
}

// ---------- random elements ----------

fn random_poly(k: &FieldTower, rng: &mut ChaCha8Rng, max_deg: usize, monic: bool) -> Poly {
    let q = k.q();
    loop {
        let d = rng.gen_range(0..=max_deg);
        let mut c: Vec<u32> = (0..=d).map(|_| rng.gen_range(0..q)).collect();
        if monic {
            c[d] = 1;
        }
        let p = Poly::from_coeffs(c);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A random nonzero exact element of `level`: rational functions of degree ≤ `deg`
/// at a rational base, sums of up to three monomials on Laurent layers.
pub fn random_elem(k: &FieldTower, level: usize, deg: usize, rng: &mut ChaCha8Rng) -> Elem {
    if level == 0 {
        return match k.base() {
            Base::Finite => Elem::Fq(rng.gen_range(1..k.q())),
            Base::Rational { .. } => {
                let num = random_poly(k, rng, deg, false);
                let den = random_poly(k, rng, deg, true);
                Elem::Rat(k.rat(num, den).expect("nonzero denominator"))
            }
        };
    }
    let mut exps: Vec<i64> = (-3..=3).collect();
    let terms = rng.gen_range(1..=3);
    let mut out = k.zero_at(level);
    for _ in 0..terms {
        let e = exps.swap_remove(rng.gen_range(0..exps.len()));
        let c = random_elem(k, level - 1, deg, rng);
        out = k.add_at(level, &out, &k.monomial(level, e, c));
    }
    out
}

/// A random element outside {0, 1}.
pub fn random_nontrivial(k: &FieldTower, deg: usize, rng: &mut ChaCha8Rng) -> Elem {
    let one = k.one_at(k.top());
    loop {
        let x = random_elem(k, k.top(), deg, rng);
        if x != one && !k.is_zero_at(k.top(), &x) {
            return x;
        }
    }
}

fn random_subspace(ell: u8, n: usize, rng: &mut ChaCha8Rng) -> Subspace {
    let gens: Vec<Vec<u8>> = (0..rng.gen_range(0..=n)).map(|_| (0..n).map(|_| rng.gen_range(0..ell)).collect()).collect();
    Subspace::span(ell, n, &gens).expect("dimensions agree")
}

// ---------- suites ----------

fn steinberg_on(name: &str, k: &FieldTower, n: usize, seed: u64) -> CheckRecord {
    timed(name, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let one = k.one_at(k.top());
        let mut failures = Vec::new();
        for _ in 0..n {
            let x = random_nontrivial(k, 3, &mut rng);
            let y = k.sub_at(k.top(), &one, &x);
            let (cx, cy) = (k.class_of(&x).expect("nonzero"), k.class_of(&y).expect("nonzero"));
            if !milnor::symbol(k, &cx, &cy).is_zero() {
                failures.push(k.render_class(&cx));
            }
        }
        let mut o = outcome(failures.is_empty(), "certified", format!("{}/{n} pairs {{x, 1−x}} vanish", n - failures.len()));
        o.witnesses = failures.into_iter().take(5).collect();
        o
    })
}

fn bilinear_on(name: &str, k: &FieldTower, n: usize, seed: u64) -> CheckRecord {
    timed(name, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ell = k.ell();
        let mut bad = 0;
        for _ in 0..n {
            let [a, b, c]: [KClass; 3] =
                std::array::from_fn(|_| k.class_of(&random_nontrivial(k, 3, &mut rng)).expect("nonzero"));
            let lhs = milnor::symbol(k, &a.add(&b, ell), &c);
            let rhs = milnor::symbol(k, &a, &c).add(&milnor::symbol(k, &b, &c), ell);
            let anti = milnor::symbol(k, &a, &b).add(&milnor::symbol(k, &b, &a), ell);
            if lhs != rhs || !anti.is_zero() || !milnor::symbol(k, &c, &c).is_zero() {
                bad += 1;
            }
        }
        outcome(bad == 0, "certified", format!("{}/{n} triples bilinear, antisymmetric and alternating", n - bad))
    })
}

/// {x, 1−x} = 0 on random elements, multilinearity, and reciprocity over F_7(x).
pub fn steinberg(seed: u64) -> Vec<CheckRecord> {
    let (kx, _) = rational_x();
    let (kst, _) = laurent_st();
    let mut out = vec![
        steinberg_on("steinberg.rational", &kx, 500, seed),
        steinberg_on("steinberg.laurent", &kst, 500, seed.wrapping_add(1)),
        bilinear_on("bilinearity.rational", &kx, 200, seed.wrapping_add(2)),
        bilinear_on("bilinearity.laurent", &kst, 200, seed.wrapping_add(3)),
    ];
    out.push(timed("reciprocity.rational", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
        let mut bad = Vec::new();
        for _ in 0..100 {
            let x = kx.class_of(&random_elem(&kx, 0, 3, &mut rng)).expect("nonzero");
            let y = kx.class_of(&random_elem(&kx, 0, 3, &mut rng)).expect("nonzero");
            if !milnor::reciprocity_check(&kx, &milnor::symbol(&kx, &x, &y)) {
                bad.push(format!("{{{}, {}}}", kx.render_class(&x), kx.render_class(&y)));
            }
        }
        let mut o = outcome(bad.is_empty(), "certified", format!("{}/100 symbols have vanishing norm-class sum", 100 - bad.len()));
        o.witnesses = bad;
        o
    }));
    out
}

/// Exhaustive rigidity lattice of a context: three predicates, hull laws, decomposition.
pub fn lattice(k: &FieldTower, ctx: &Context, bound: usize) -> Vec<CheckRecord> {
    let an = Analyzer::new(k, ctx, bound);
    let label = assurance_label(if k.is_rational() { Assurance::Bounded(bound) } else { Assurance::Certified });
    let all: Vec<Subspace> = match linalg_fl::enumerate_subspaces(k.ell(), ctx.dim(), |_| true, 5_000) {
        Ok(it) => it.collect(),
        Err(e) => return vec![errored("lattice.agreement", e)],
    };
    let n = all.len();
    let hulls: Vec<Subspace> = match all.iter().map(|t| an.hull(t).map(|h| h.hull)).collect() {
        Ok(h) => h,
        Err(e) => return vec![errored("lattice.agreement", e)],
    };
    let mut out = Vec::new();
    out.push(timed("lattice.agreement", || {
        let mut bad = Vec::new();
        for (t, h) in all.iter().zip(&hulls) {
            let def = an.is_rigid_by_definition(t);
            let sym = an.is_rigid_symbolic(t);
            if def != sym || sym != (h == t) {
                bad.push(format!("{:?}: definition {def}, symbol {sym}, hull fixed {}", t.rows(), h == t));
            }
        }
        let mut o = outcome(bad.is_empty(), &label, format!("{}/{n} subgroups: definition, symbol and hull predicates agree", n - bad.len()));
        o.witnesses = bad;
        o
    }));
    out.push(timed("lattice.idempotent", || {
        let ok = hulls.iter().filter(|h| an.hull(h).is_ok_and(|hh| hh.hull == **h)).count();
        outcome(ok == n, &label, format!("{ok}/{n} hulls are fixed by the hull"))
    }));
    out.push(timed("lattice.closure", || {
        let rigid: Vec<bool> = all.iter().map(|t| an.is_rigid_symbolic(t)).collect();
        let mut bad = Vec::new();
        let mut pairs = 0usize;
        for (i, t) in all.iter().enumerate() {
            if !t.is_subspace_of(&hulls[i]) || !an.is_rigid_symbolic(&hulls[i]) {
                bad.push(format!("hull of {:?}", t.rows()));
            }
            for (j, tp) in all.iter().enumerate() {
                if rigid[i] && t.is_subspace_of(tp) {
                    pairs += 1;
                    if !rigid[j] {
                        bad.push(format!("{:?} rigid below non-rigid {:?}", t.rows(), tp.rows()));
                    }
                }
            }
        }
        // intersections of pairwise-rigid families, up to three members
        let rs: Vec<&Subspace> = all.iter().zip(&rigid).filter(|(_, r)| **r).map(|(t, _)| t).collect();
        let meet = |a: &Subspace, b: &Subspace| a.intersect(b).expect("same ambient");
        let mut families = 0usize;
        for (a, x) in rs.iter().enumerate() {
            for (b, y) in rs.iter().enumerate().skip(a) {
                let xy = meet(x, y);
                if !an.is_rigid_symbolic(&xy) {
                    continue;
                }
                for z in rs.iter().skip(b) {
                    let (xz, yz) = (meet(x, z), meet(y, z));
                    if an.is_rigid_symbolic(&xz) && an.is_rigid_symbolic(&yz) {
                        families += 1;
                        if !an.is_rigid_symbolic(&meet(&xy, z)) {
                            bad.push(format!("meet of {:?}, {:?}, {:?}", x.rows(), y.rows(), z.rows()));
                        }
                    }
                }
            }
        }
        let mut o = outcome(
            bad.is_empty(),
            &label,
            format!("hull extensive and rigid-valued on {n}; rigidity upward closed over {pairs} pairs; {families} pairwise-rigid families meet rigidly"),
        );
        o.witnesses = bad.into_iter().take(5).collect();
        o
    }));
    out.push(timed("lattice.decompose", || {
        let mut total = 0;
        let mut bad = Vec::new();
        for t in &all {
            let Ok(v) = an.is_rigid(t) else { continue };
            if !(v.holds && v.is_certified()) {
                continue;
            }
            total += 1;
            let ok = match an.decompose_rigid(t) {
                Ok((h, val)) => {
                    let u1 = k.units_subgroups(val, ctx).map(|(_, u1)| u1);
                    t.is_subspace_of(&h)
                        && h.dim() <= t.dim() + 1
                        && an.chain_level(&h) == Some(val)
                        && an.is_valuative(&h).is_ok_and(|v| v.holds)
                        && u1.is_ok_and(|u1| u1.is_subspace_of(t))
                }
                Err(_) => false,
            };
            if !ok {
                bad.push(format!("{:?}", t.rows()));
            }
        }
        let mut o = outcome(bad.is_empty() && total > 0, &label, format!("{}/{total} certified-rigid subgroups decompose", total - bad.len()));
        o.witnesses = bad;
        o
    }));
    out
}

/// V_K against T_K on F_7((s))((t)) and on F_7(x)((s))((t)).
pub fn vk_tk(bound: usize) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    out.push(timed("vk-tk.laurent", || {
        let (k, ctx) = laurent_st();
        let an = Analyzer::new(&k, &ctx, bound);
        match an.enumerate_vk_tk() {
            Ok(r) => {
                let s = KClass::unit(BasisIndex::Var(0));
                let s_exhausted = r.chain.iter().any(|e| e.partners.iter().any(|(x, p)| *x == s && p.is_none()));
                let ok = r.vk.is_empty() && r.tk.is_empty() && r.bijection_holds() && s_exhausted;
                let mut o = outcome(
                    ok,
                    &assurance_label(r.assurance),
                    format!("V_K = {:?}, |T_K| = {}, [s] without partner: {s_exhausted}", r.vk.iter().map(|v| v.level).collect::<Vec<_>>(), r.tk.len()),
                );
                o.witnesses = r
                    .chain
                    .iter()
                    .flat_map(|e| {
                        let k = &k;
                        e.partners.iter().filter(|(_, p)| p.is_none()).map(move |(x, _)| format!("level {}: [{}] has no vanishing partner", e.valuation.level, k.render_class(x)))
                    })
                    .collect();
                o
            }
            Err(e) => outcome(false, "none", format!("error: {e}")),
        }
    }));
    out.push(timed("vk-tk.rational", || {
        let (k, ctx) = rational_st();
        let an = Analyzer::new(&k, &ctx, bound);
        match an.enumerate_vk_tk() {
            Ok(r) => {
                let zero = Subspace::zero(k.ell(), ctx.dim());
                let ok = r.vk == [ValuationId { level: 2 }]
                    && r.tk.len() == 1
                    && r.tk[0].t == zero
                    && r.bijection_holds()
                    && r.coarsening.iter().all(|c| c.commutes);
                outcome(
                    ok,
                    &assurance_label(r.assurance),
                    format!(
                        "V_K = {:?}, T_K dims = {:?}, {} candidates, bijection {}, coarsening {}",
                        r.vk.iter().map(|v| v.level).collect::<Vec<_>>(),
                        r.tk.iter().map(|t| t.t.dim()).collect::<Vec<_>>(),
                        r.candidates_examined,
                        r.bijection_holds(),
                        r.coarsening.iter().all(|c| c.commutes)
                    ),
                )
            }
            Err(e) => outcome(false, "none", format!("error: {e}")),
        }
    }));
    out
}

fn dual_track(an: &Analyzer<'_>, kt: &KerTheta, zs: &[Subspace]) -> (usize, usize, Vec<String>) {
    let mut agree = 0;
    let mut certified = 0;
    let mut bad = Vec::new();
    for z in zs {
        match (kt.acl_center(z), galois::acl_center_dual(an, z)) {
            (Ok(a), Ok((b, v))) => {
                if v.is_certified() {
                    certified += 1;
                }
                if a == b {
                    agree += 1;
                } else {
                    bad.push(format!("Z = {:?}: center {:?}, dual {:?}", z.rows(), a.rows(), b.rows()));
                }
            }
            (a, b) => bad.push(format!("Z = {:?}: {:?} / {:?}", z.rows(), a.err(), b.err())),
        }
    }
    (agree, certified, bad)
}

/// **I**(Z) against ann H(ann Z), and A_K against V_K and T_K.
pub fn acl_dual(seed: u64, bound: usize) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    out.push(timed("acl-dual.laurent", || {
        let (k, ctx) = laurent_st();
        let an = Analyzer::new(&k, &ctx, bound);
        let kt = match KerTheta::of(&an) {
            Ok(kt) => kt,
            Err(e) => return outcome(false, "none", format!("error: {e}")),
        };
        let zs: Vec<Subspace> = linalg_fl::enumerate_subspaces(3, ctx.dim(), |_| true, 100).expect("small").collect();
        let (agree, _, bad) = dual_track(&an, &kt, &zs);
        let mut o = outcome(bad.is_empty(), "certified", format!("{agree}/{} dual subgroups agree", zs.len()));
        o.witnesses = bad;
        o
    }));
    out.push(timed("acl-dual.rational", || {
        let (k, ctx) = rational_t();
        let an = Analyzer::new(&k, &ctx, bound);
        let kt = match KerTheta::of(&an) {
            Ok(kt) => kt,
            Err(e) => return outcome(false, "none", format!("error: {e}")),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zs: Vec<Subspace> = (0..20).map(|_| random_subspace(k.ell(), ctx.dim(), &mut rng)).collect();
        let (agree, certified, bad) = dual_track(&an, &kt, &zs);
        let mut o = outcome(bad.is_empty(), &assurance_label(Assurance::Bounded(bound)), format!("{agree}/20 seeded dual subgroups agree ({certified} hulls certified)"));
        o.witnesses = bad;
        o
    }));
    out.push(timed("ak.laurent", || {
        let (k, ctx) = laurent_st();
        let an = Analyzer::new(&k, &ctx, bound);
        let res = KerTheta::of(&an).and_then(|kt| Ok((galois::enumerate_ak(&kt)?, an.enumerate_vk_tk()?)));
        match res {
            Ok((ak, r)) => outcome(
                ak.entries.is_empty() && r.vk.is_empty() && ak.centralizer_agrees,
                "certified",
                format!("|A_K| = {} over {} subgroups, |V_K| = {}", ak.entries.len(), ak.subspaces_examined, r.vk.len()),
            ),
            Err(e) => outcome(false, "none", format!("error: {e}")),
        }
    }));
    out.push(timed("ak.rational", || {
        let (k, ctx) = rational_t();
        let an = Analyzer::new(&k, &ctx, bound);
        let res = KerTheta::of(&an).and_then(|kt| {
            let ak = galois::enumerate_ak(&kt)?;
            let r = an.enumerate_vk_tk()?;
            let tk: Vec<Subspace> = r.tk.iter().map(|t| t.t.clone()).collect();
            let bij = galois::ak_bijection(&kt, &k, &ctx, &ak, &r.vk, &tk)?;
            let (_, i1) = galois::d1_i1_of_v(&k, &ctx, ValuationId { level: 1 })?;
            Ok((ak, r, bij, i1))
        });
        match res {
            Ok((ak, r, bij, i1)) => {
                let full = Subspace::full(k.ell(), ctx.dim());
                let ok = ak.entries.len() == 1
                    && ak.entries[0].z == full
                    && ak.entries[0].center == i1
                    && ak.centralizer_agrees
                    && r.vk == [ValuationId { level: 1 }]
                    && bij.holds();
                outcome(
                    ok,
                    &assurance_label(r.assurance),
                    format!(
                        "A_K = {:?} over {} subgroups, center = {}, V_K = {:?}, bijection {}",
                        ak.entries.iter().map(|e| e.z.dim()).collect::<Vec<_>>(),
                        ak.subspaces_examined,
                        ak.entries
                            .first()
                            .map(|e| e.center.rows().iter().map(|r| galois::render_character(&k, &ctx, r)).collect::<Vec<_>>().join(", "))
                            .unwrap_or_default(),
                        r.vk.iter().map(|v| v.level).collect::<Vec<_>>(),
                        bij.holds()
                    ),
                )
            }
            Err(e) => outcome(false, "none", format!("error: {e}")),
        }
    }));
    out
}

fn prop33_on(name: &str, k: &FieldTower, ctx: &Context) -> CheckRecord {
    timed(name, || {
        let an = Analyzer::new(k, ctx, DEFAULT_BOUND);
        let kt = match KerTheta::of(&an) {
            Ok(kt) => kt,
            Err(e) => return outcome(false, "none", format!("error: {e}")),
        };
        let mut checks = 0;
        let mut bad = Vec::new();
        for v in k.valuation_chain() {
            let Ok((d1, i1)) = galois::d1_i1_of_v(k, ctx, v) else { continue };
            let Ok(dmu) = galois::d_mu_of_v(k, ctx, v) else { continue };
            for s in i1.rows() {
                let sb = Subspace::span_unchecked(k.ell(), kt.dim(), vec![kt.beta_class(s).expect("matching")]);
                for t in dmu.rows() {
                    checks += 1;
                    if !linalg_fl::is_zero(&kt.comm_class(t, s).expect("matching")) {
                        bad.push(format!("level {}: [{}, {}] ≠ 0", v.level, galois::render_character(k, ctx, t), galois::render_character(k, ctx, s)));
                    }
                }
                for t in d1.rows() {
                    checks += 1;
                    if !sb.contains(&kt.comm_class(t, s).expect("matching")) {
                        bad.push(format!("level {}: [{}, {}] ∉ ⟨σ^β⟩", v.level, galois::render_character(k, ctx, t), galois::render_character(k, ctx, s)));
                    }
                }
            }
        }
        let mut o = outcome(bad.is_empty(), "certified", format!("{}/{checks} commutator memberships hold", checks - bad.len()));
        o.witnesses = bad;
        o
    })
}

/// Inertia against decomposition commutators, and [σ_ζ, σ_t] = 2·σ_t^β.
pub fn prop33() -> Vec<CheckRecord> {
    let (kst, cst) = laurent_st();
    let (kt_, ct) = rational_t();
    let mut out = vec![prop33_on("commutation.laurent", &kst, &cst), prop33_on("commutation.rational", &kt_, &ct)];
    out.push(timed("commutation.instance", || {
        let an = Analyzer::new(&kst, &cst, DEFAULT_BOUND);
        let Ok(kt) = KerTheta::of(&an) else { return outcome(false, "none", "ker Θ failed".into()) };
        let e = |i| linalg_fl::unit_vector(3, i);
        let c = kt.comm_class(&e(0), &e(2)).expect("matching");
        let b = kt.beta_class(&e(2)).expect("matching");
        let ok = !linalg_fl::is_zero(&c) && c == linalg_fl::scale(&b, 2, 3);
        outcome(ok, "certified", format!("[σ_ζ, σ_t] = {c:?}, σ_t^β = {b:?}"))
    }));
    out
}

/// The projective replay at range `m`.
pub fn claim(m: i64) -> Vec<CheckRecord> {
    vec![timed("claim.replay", || {
        let r = projective_replay::replay_claim(m);
        let mut o = outcome(r.all_passed, "certified", format!("{}/{} steps pass at M = {}, {} values established", r.passed_steps(), r.steps.len(), r.range, r.established));
        o.witnesses = r.steps.iter().filter(|s| !s.passed).map(|s| format!("step {}: {:?}", s.step, s.detail)).collect();
        o
    })]
}

/// Runs a named suite, or all of them.
pub fn run(suite: &str, seed: u64, bound: usize, lattice_on: Option<(&FieldTower, &Context)>) -> Option<Vec<CheckRecord>> {
    let lattice_default = || {
        let (k, ctx) = laurent_st();
        lattice(&k, &ctx, bound)
    };
    let lat = || match lattice_on {
        Some((k, ctx)) => lattice(k, ctx, bound),
        None => lattice_default(),
    };
    Some(match suite {
        "steinberg" => steinberg(seed),
        "lattice" => lat(),
        "vk-tk" => vk_tk(bound),
        "acl-dual" => acl_dual(seed, bound),
        "prop33" => prop33(),
        "claim" => claim(DEFAULT_RANGE),
        "all" => {
            let mut v = steinberg(seed);
            v.extend(lat());
            v.extend(vk_tk(bound));
            v.extend(acl_dual(seed, bound));
            v.extend(prop33());
            v.extend(claim(DEFAULT_RANGE));
            v
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_a_passing_skeleton() {
        let r = RunReport::new("all", "F_7", 0, 4, Vec::new());
        let j = serde_json::to_value(&r).unwrap();
        assert_eq!(j["status"], "pass");
        assert_eq!(j["checks"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn failing_checks_round_trip_with_witnesses() {
        let bad = CheckRecord {
            name: "b".into(),
            passed: false,
            assurance: "certified".into(),
            summary: "0/1".into(),
            witnesses: vec!["x".into()],
            millis: 1.5,
        };
        let good = CheckRecord { name: "a".into(), passed: true, witnesses: Vec::new(), ..bad.clone() };
        let r = RunReport::new("all", "F_7", 3, 4, vec![bad, good]);
        assert_eq!(r.status, "fail");
        assert_eq!(r.checks[0].name, "a");
        let text = serde_json::to_string(&r).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.checks[1].witnesses, ["x"]);
        assert!(r.without_timing().checks.iter().all(|c| c.millis == 0.0));
    }

    #[test]
    fn random_elements_are_nontrivial() {
        let (k, _) = rational_t();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let x = random_nontrivial(&k, 3, &mut rng);
            assert!(k.class_of(&x).is_ok());
            assert_ne!(x, k.one_at(k.top()));
        }
    }
}
