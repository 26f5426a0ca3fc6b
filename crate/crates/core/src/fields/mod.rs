//! The supported field universe: F_q, F_q(x), and iterated Laurent layers
//! over either, together with the class map K^× → K^×/ℓ.

pub mod elem;
pub mod ff;
pub mod parse;
pub mod poly;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use elem::{Elem, RatFn, Series};
pub use ff::FiniteField;
pub use poly::{Poly, PolyRing};

use crate::linalg_fl::{self, FlVector, IndexedBasis, LinalgError, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("unsupported ell {0}: need an odd prime at most 13")]
    UnsupportedEll(u32),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("zero element: {0}")]
    ZeroElement(String),
    #[error("not exactly representable: {0}")]
    NotExact(String),
    #[error("out of context: {0}")]
    OutOfContext(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("valuation level {0} is not in the chain")]
    NotInChain(usize),
    #[error("subgroup is not sandwiched between U_v^1 and U_v")]
    NotSandwiched,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    Finite,
    Rational { var: String },
}

/// Basis labels of the class space: the constant generator ζ (the class of
/// g), monic irreducibles of the rational base, and Laurent variables by
/// layer index (0 = innermost).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BasisIndex {
    Zeta,
    Irred(Poly),
    Var(usize),
}

/// A class in K^×/K^{×ℓ}.
pub type KClass = FlVector<BasisIndex>;

/// A finite window into the class space.
pub type Context = IndexedBasis<BasisIndex>;

/// Chain valuation collapsing the outermost `level` Laurent variables; value group ℤ^level, lex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ValuationId {
    pub level: usize,
}

impl ValuationId {
    /// Coarser valuations have smaller level.
    pub fn coarsens(&self, other: &ValuationId) -> bool {
        self.level <= other.level
    }
}

#[derive(Clone)]
pub struct FieldTower {
    pub(crate) ell: u8,
    pub(crate) fq: Arc<FiniteField>,
    pub(crate) base: Base,
    pub(crate) vars: Vec<String>,
    omega: u32,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// JSON description of a tower plus its starting context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub ell: u32,
    pub base: BaseSpec,
    #[serde(default)]
    pub laurent: Vec<String>,
    #[serde(default)]
    pub context: ContextSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseSpec {
    Finite { q: u32 },
    Rational { q: u32, var: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSpec {
    #[serde(default)]
    pub irreducibles: Vec<String>,
    #[serde(default)]
    pub degree_bound: Option<usize>,
}

/// Whether a set-valued answer is complete or only exhausted up to a degree bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certification {
    Certified,
    AssuranceOnly(usize),
}

/// Output of [`FieldTower::one_minus_classes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneMinus {
    pub classes: BTreeSet<KClass>,
    /// Set when every class occurs (class 0 at a Laurent layer); `classes` is then empty.
    pub all_classes: bool,
    pub certification: Certification,
}

impl FieldTower {
    pub fn new(ell: u32, q: u32, base: Base, vars: Vec<String>) -> Result<Self, FieldError> {
        if !(3..=13).contains(&ell) || !linalg_fl::is_prime(ell as u64) {
            return Err(FieldError::UnsupportedEll(ell));
        }
        if q % (2 * ell) != 1 {
            return Err(FieldError::BadModulus(format!("q = {q} is not 1 mod 2ℓ = {}", 2 * ell)));
        }
        let fq = FiniteField::new(q)?;
        let mut names: BTreeSet<&str> = BTreeSet::new();
        if let Base::Rational { var } = &base {
            names.insert(var);
        }
        for v in &vars {
            if v == "zeta" || !names.insert(v) {
                return Err(FieldError::Parse(format!("variable name {v:?} repeated or reserved")));
            }
        }
        let omega = fq.pow(fq.generator(), ((q - 1) / ell) as i64);
        Ok(Self { ell: ell as u8, fq: Arc::new(fq), base, vars, omega })
    }

    pub fn from_spec(spec: &TowerSpec) -> Result<(Self, Context), FieldError> {
        let (q, base) = match &spec.base {
            BaseSpec::Finite { q } => (*q, Base::Finite),
            BaseSpec::Rational { q, var } => (*q, Base::Rational { var: var.clone() }),
        };
        let k = Self::new(spec.ell, q, base, spec.laurent.clone())?;
        let mut irr = Vec::new();
        for s in &spec.context.irreducibles {
            irr.push(k.parse_poly(s)?);
        }
        let ctx = k.context(&irr)?;
        Ok((k, ctx))
    }

    pub fn ell(&self) -> u8 {
        self.ell
    }

    pub fn q(&self) -> u32 {
        self.fq.q()
    }

    pub fn field(&self) -> &FiniteField {
        &self.fq
    }

    pub fn poly_ring(&self) -> PolyRing<'_> {
        PolyRing::new(&self.fq)
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.base, Base::Rational { .. })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// The primitive root g.
    pub fn generator(&self) -> u32 {
        self.fq.generator()
    }

    /// ω = g^((q−1)/ℓ), a fixed primitive ℓ-th root of unity.
    pub fn omega(&self) -> u32 {
        self.omega
    }

    pub fn omega_class(&self) -> KClass {
        self.class_of_at(0, &self.constant_at(0, self.omega)).expect("ω is a unit")
    }

    pub fn base_var(&self) -> Option<&str> {
        match &self.base {
            Base::Rational { var } => Some(var),
            Base::Finite => None,
        }
    }

    pub fn name(&self) -> String {
        let mut s = match &self.base {
            Base::Finite => format!("F_{}", self.q()),
            Base::Rational { var } => format!("F_{}({var})", self.q()),
        };
        for v in &self.vars {
            s = format!("{s}(({v}))");
        }
        s
    }

    /// The tower with the outermost `level` Laurent variables removed.
    pub fn residue_tower(&self, level: usize) -> Result<FieldTower, FieldError> {
        if level > self.vars.len() {
            return Err(FieldError::NotInChain(level));
        }
        let mut k = self.clone();
        k.vars.truncate(self.vars.len() - level);
        Ok(k)
    }

    /// Context {ζ} ∪ irreducibles ∪ Laurent variables (innermost first).
    pub fn context(&self, irreducibles: &[Poly]) -> Result<Context, FieldError> {
        let mut labels = vec![BasisIndex::Zeta];
        if !irreducibles.is_empty() && !self.is_rational() {
            return Err(FieldError::OutOfContext("irreducibles need a rational base".into()));
        }
        let r = self.poly_ring();
        for p in irreducibles {
            if !p.is_monic() || !r.is_irreducible(p) {
                return Err(FieldError::OutOfContext(format!("{} is not a monic irreducible", self.render_poly(p))));
            }
            labels.push(BasisIndex::Irred(p.clone()));
        }
        labels.extend((0..self.vars.len()).map(BasisIndex::Var));
        Ok(Context::new(labels))
    }

    pub fn default_context(&self) -> Context {
        self.context(&[]).expect("default context is valid")
    }

    /// The residue-field context of a chain level: collapsed variables dropped.
    pub fn residue_context(&self, ctx: &Context, v: ValuationId) -> Result<Context, FieldError> {
        self.check_level(v)?;
        let keep = self.vars.len() - v.level;
        Ok(Context::new(ctx.labels().iter().filter(|b| !matches!(b, BasisIndex::Var(j) if *j >= keep)).cloned().collect()))
    }

    fn check_level(&self, v: ValuationId) -> Result<(), FieldError> {
        if v.level > self.vars.len() {
            Err(FieldError::NotInChain(v.level))
        } else {
            Ok(())
        }
    }

    // ---------- rendering ----------

    pub fn render_poly(&self, p: &Poly) -> String {
        p.render(self.base_var().unwrap_or("x"))
    }

    pub fn basis_name(&self, b: &BasisIndex) -> String {
        match b {
            BasisIndex::Zeta => "zeta".into(),
            BasisIndex::Irred(p) => format!("({})", self.render_poly(p)),
            BasisIndex::Var(j) => self.vars[*j].clone(),
        }
    }

    /// E.g. `zeta^2*s*t`; `1` for the zero class.
    pub fn render_class(&self, c: &KClass) -> String {
        if c.is_zero() {
            return "1".into();
        }
        c.iter()
            .map(|(b, e)| if e == 1 { self.basis_name(b) } else { format!("{}^{e}", self.basis_name(b)) })
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn render_dense(&self, ctx: &Context, v: &[u8]) -> String {
        self.render_class(&ctx.to_sparse(v, self.ell))
    }

    // ---------- classes ----------

    pub fn dlog(&self, u: u32) -> u32 {
        self.fq.dlog(u)
    }

    pub fn class_of(&self, x: &Elem) -> Result<KClass, FieldError> {
        self.class_of_at(self.top(), x)
    }

    pub fn class_of_at(&self, level: usize, x: &Elem) -> Result<KClass, FieldError> {
        let ell = self.ell;
        match x {
            Elem::Fq(0) => Err(FieldError::ZeroElement("class of 0".into())),
            Elem::Fq(u) => {
                let mut c = KClass::zero();
                c.set(BasisIndex::Zeta, (self.dlog(*u) % ell as u32) as u8, ell);
                Ok(c)
            }
            Elem::Rat(r) => {
                if r.num.is_zero() {
                    return Err(FieldError::ZeroElement("class of 0".into()));
                }
                let ring = self.poly_ring();
                let (lc, fnum) = ring.factor(&r.num);
                let (_, fden) = ring.factor(&r.den);
                let mut c = KClass::zero();
                c.set(BasisIndex::Zeta, (self.dlog(lc) % ell as u32) as u8, ell);
                for (p, e) in fnum {
                    c.add_at(BasisIndex::Irred(p), (e % ell as usize) as u8, ell);
                }
                for (p, e) in fden {
                    c.add_at(BasisIndex::Irred(p), linalg_fl::neg_mod((e % ell as usize) as u8, ell), ell);
                }
                Ok(c)
            }
            Elem::Ser(_) => {
                let (e, lc) = self.leading(level, x)?;
                let mut c = self.class_of_at(level - 1, &lc)?;
                c.set(BasisIndex::Var(level - 1), linalg_fl::reduce_i64(e, ell), ell);
                Ok(c)
            }
        }
    }

    /// Class in context coordinates; fails if it has support outside the context.
    pub fn class_in(&self, ctx: &Context, x: &Elem) -> Result<Vec<u8>, FieldError> {
        Ok(ctx.to_dense(&self.class_of(x)?)?)
    }

    /// Context grown by every irreducible in the support of `c`.
    pub fn extend_context(&self, ctx: &Context, c: &KClass) -> Context {
        let mut out = ctx.clone();
        let mut added = Vec::new();
        for b in c.support() {
            if !out.contains(b) {
                added.push(b.clone());
            }
        }
        if added.is_empty() {
            return out;
        }
        // keep variables last
        let mut labels: Vec<BasisIndex> = ctx.labels().iter().filter(|b| !matches!(b, BasisIndex::Var(_))).cloned().collect();
        labels.extend(added);
        labels.extend(ctx.labels().iter().filter(|b| matches!(b, BasisIndex::Var(_))).cloned());
        out = Context::new(labels);
        out
    }

    /// The class layer coordinates that live strictly below `level`.
    fn restrict_below(&self, c: &KClass, level: usize) -> KClass {
        let mut r = c.clone();
        r.retain(|b| !matches!(b, BasisIndex::Var(j) if *j >= level));
        r
    }

    /// Tame symbol at the outermost layer: class of (−1)^{ab} x^b / y^a in the residue field.
    pub fn tame_symbol(&self, x: &Elem, y: &Elem) -> Result<KClass, FieldError> {
        let n = self.top();
        if n == 0 {
            return Err(FieldError::OutOfContext("tame symbol needs a Laurent layer".into()));
        }
        let (a, ux) = self.leading(n, x)?;
        let (b, uy) = self.leading(n, y)?;
        let ell = self.ell;
        let cx = self.class_of_at(n - 1, &ux)?;
        let cy = self.class_of_at(n - 1, &uy)?;
        let minus_one = self.class_of_at(n - 1, &self.constant_at(n - 1, self.fq.neg(1)))?;
        let out = cx
            .scale(linalg_fl::reduce_i64(b, ell), ell)
            .sub(&cy.scale(linalg_fl::reduce_i64(a, ell), ell), ell)
            .add(&minus_one.scale(linalg_fl::reduce_i64(a * b, ell), ell), ell);
        Ok(out)
    }

    // ---------- representatives ----------

    /// Exact elements of class `c`, bounded by `d` over a rational base.
    pub fn representatives(&self, c: &KClass, d: usize) -> Vec<Elem> {
        self.representatives_at(self.top(), c, d)
    }

    pub fn representatives_at(&self, level: usize, c: &KClass, d: usize) -> Vec<Elem> {
        let ell = self.ell as i64;
        if level == 0 {
            return match self.base {
                Base::Finite => self.units_of_class(c.get(&BasisIndex::Zeta)).into_iter().map(Elem::Fq).collect(),
                Base::Rational { .. } => self.rational_representatives(c, d),
            };
        }
        let a = c.get(&BasisIndex::Var(level - 1)) as i64;
        let inner_c = self.restrict_below(c, level - 1);
        let inner = self.representatives_at(level - 1, &inner_c, d);
        let mut out = Vec::new();
        for k in -1..=1 {
            let e = a + k * ell;
            for r in &inner {
                out.push(self.monomial(level, e, r.clone()));
            }
        }
        out
    }

    /// Units of F_q whose class has ζ-coordinate `k`.
    pub fn units_of_class(&self, k: u8) -> Vec<u32> {
        let ell = self.ell as u32;
        let mut v: Vec<u32> = self.fq.units().filter(|&u| self.dlog(u) % ell == k as u32).collect();
        v.sort();
        v
    }

    fn rational_representatives(&self, c: &KClass, d: usize) -> Vec<Elem> {
        let ell = self.ell as i64;
        let ring = self.poly_ring();
        let support: Vec<(Poly, i64)> = c
            .iter()
            .filter_map(|(b, e)| match b {
                BasisIndex::Irred(p) => Some((p.clone(), e as i64)),
                _ => None,
            })
            .collect();
        // exponent choices e or e − ℓ per irreducible, canonical choice first
        let mut combos: Vec<(Poly, Poly)> = Vec::new();
        let m = support.len();
        for mask in 0u32..(1 << m) {
            let (mut num, mut den) = (Poly::one(), Poly::one());
            for (i, (p, e)) in support.iter().enumerate() {
                let ex = if mask >> i & 1 == 1 { *e - ell } else { *e };
                if ex >= 0 {
                    num = ring.mul(&num, &ring.pow(p, ex as u64));
                } else {
                    den = ring.mul(&den, &ring.pow(p, (-ex) as u64));
                }
            }
            if mask == 0 || (num.deg().max(den.deg()) <= d) {
                combos.push((num, den));
            }
        }
        let fdeg = (d / self.ell as usize).max(1);
        let mut powers = vec![Poly::one()];
        for k in 1..=fdeg {
            for f in ring.monics_of_degree(k) {
                powers.push(ring.pow(&f, self.ell as u64));
            }
        }
        let units = self.units_of_class(c.get(&BasisIndex::Zeta));
        let mut out = Vec::new();
        for (num, den) in &combos {
            for (i, f) in powers.iter().enumerate() {
                for flip in [false, true] {
                    if i == 0 && flip {
                        continue;
                    }
                    let (n2, d2) = if flip { (num.clone(), ring.mul(den, f)) } else { (ring.mul(num, f), den.clone()) };
                    for &u in &units {
                        if let Ok(r) = self.rat(ring.scale(&n2, u), d2.clone()) {
                            out.push(Elem::Rat(r));
                        }
                    }
                }
            }
        }
        out
    }

    // ---------- the class of 1 − x ----------

    /// {class(1 − x) : class(x) = c}.
    pub fn one_minus_classes(&self, c: &KClass, d: usize) -> OneMinus {
        self.one_minus_at(self.top(), c, d)
    }

    fn one_minus_at(&self, level: usize, c: &KClass, d: usize) -> OneMinus {
        let cert = if self.is_rational() { Certification::AssuranceOnly(d) } else { Certification::Certified };
        if level == 0 {
            let mut classes = BTreeSet::new();
            let one = self.one_at(0);
            for u in self.representatives_at(0, c, d) {
                if u == one {
                    continue;
                }
                let v = self.sub_at(0, &one, &u);
                classes.insert(self.class_of_at(0, &v).expect("1 − u is a nonzero element"));
            }
            return OneMinus { classes, all_classes: false, certification: cert };
        }
        if c.is_zero() {
            // x = 1 + y with y ∈ m arbitrary, so 1 − x = −y takes every class.
            return OneMinus { classes: BTreeSet::new(), all_classes: true, certification: cert };
        }
        let mut classes = BTreeSet::new();
        // v(x) > 0 gives class 0; v(x) < 0 gives class(−x) = c.
        classes.insert(KClass::zero());
        classes.insert(c.clone());
        if c.get(&BasisIndex::Var(level - 1)) == 0 {
            let inner = self.one_minus_at(level - 1, c, d);
            debug_assert!(!inner.all_classes, "inner class is nonzero");
            classes.extend(inner.classes);
        }
        OneMinus { classes, all_classes: false, certification: cert }
    }

    // ---------- valuations ----------

    pub fn valuation_chain(&self) -> Vec<ValuationId> {
        (0..=self.vars.len()).map(|level| ValuationId { level }).collect()
    }

    /// (U_v, U_v¹) in context coordinates; U_v¹ is always zero in this universe.
    pub fn units_subgroups(&self, v: ValuationId, ctx: &Context) -> Result<(Subspace, Subspace), FieldError> {
        self.check_level(v)?;
        let keep = self.vars.len() - v.level;
        let n = ctx.dim();
        let gens: Vec<Vec<u8>> = (0..n)
            .filter(|&i| !matches!(ctx.label(i), BasisIndex::Var(j) if *j >= keep))
            .map(|i| linalg_fl::unit_vector(n, i))
            .collect();
        Ok((Subspace::span(self.ell, n, &gens)?, Subspace::zero(self.ell, n)))
    }

    /// Image of U_v¹ ≤ T ≤ U_v in residue-field coordinates.
    pub fn residue_transfer(&self, v: ValuationId, ctx: &Context, t: &Subspace) -> Result<Subspace, FieldError> {
        let (u, u1) = self.units_subgroups(v, ctx)?;
        if !u1.is_subspace_of(t) || !t.is_subspace_of(&u) {
            return Err(FieldError::NotSandwiched);
        }
        let rctx = self.residue_context(ctx, v)?;
        let keep: Vec<usize> = (0..ctx.dim()).filter(|&i| rctx.contains(ctx.label(i))).collect();
        let rows: Vec<Vec<u8>> = t.rows().iter().map(|r| keep.iter().map(|&i| r[i]).collect()).collect();
        Ok(Subspace::span(self.ell, rctx.dim(), &rows)?)
    }

    /// Inverse of [`residue_transfer`](Self::residue_transfer): the unique U_v¹ ≤ T ≤ U_v with T_v = `tr`.
    pub fn residue_lift(&self, v: ValuationId, ctx: &Context, tr: &Subspace) -> Result<Subspace, FieldError> {
        let rctx = self.residue_context(ctx, v)?;
        let n = ctx.dim();
        let rows: Vec<Vec<u8>> = tr
            .rows()
            .iter()
            .map(|r| {
                let mut out = vec![0u8; n];
                for (j, &c) in r.iter().enumerate() {
                    out[ctx.position(rctx.label(j)).expect("residue label in context")] = c;
                }
                out
            })
            .collect();
        let (_, u1) = self.units_subgroups(v, ctx)?;
        Ok(Subspace::span(self.ell, n, &rows)?.sum(&u1)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fst() -> FieldTower {
        FieldTower::new(3, 7, Base::Finite, vec!["s".into(), "t".into()]).unwrap()
    }

    #[test]
    fn build_examples() {
        let k = fst();
        assert_eq!(k.generator(), 3);
        assert_eq!(k.omega(), 2);
        assert!(matches!(FieldTower::new(3, 4, Base::Finite, vec![]), Err(FieldError::BadModulus(_))));
        assert!(matches!(FieldTower::new(2, 7, Base::Finite, vec![]), Err(FieldError::UnsupportedEll(2))));
        let r = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec!["t".into()]).unwrap();
        assert_eq!(r.name(), "F_7(x)((t))");
    }

    #[test]
    fn class_examples() {
        let k = fst();
        let x = k.parse_elem("5*s*t^4").unwrap();
        let c = k.class_of(&x).unwrap();
        assert_eq!(c.get(&BasisIndex::Zeta), 2);
        assert_eq!(c.get(&BasisIndex::Var(0)), 1);
        assert_eq!(c.get(&BasisIndex::Var(1)), 1);
        let y = k.parse_elem("(2*s+t)^3").unwrap();
        assert!(k.class_of(&y).unwrap().is_zero());
        let r = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec![]).unwrap();
        let c = r.class_of(&r.parse_elem("x^2+1").unwrap()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.get(&BasisIndex::Irred(Poly::from_coeffs(vec![1, 0, 1]))), 1);
    }

    #[test]
    fn one_minus_examples() {
        let f7 = FieldTower::new(3, 7, Base::Finite, vec![]).unwrap();
        let z = KClass::unit(BasisIndex::Zeta);
        let om = f7.one_minus_classes(&z, 4);
        let want: BTreeSet<KClass> = [z.clone(), z.scale(2, 3)].into_iter().collect();
        assert_eq!(om.classes, want);
        assert_eq!(om.certification, Certification::Certified);
        let f7t = FieldTower::new(3, 7, Base::Finite, vec!["t".into()]).unwrap();
        let t = KClass::unit(BasisIndex::Var(0));
        let want: BTreeSet<KClass> = [KClass::zero(), t.clone()].into_iter().collect();
        assert_eq!(f7t.one_minus_classes(&t, 4).classes, want);
        let want: BTreeSet<KClass> = [KClass::zero(), z.clone(), z.scale(2, 3)].into_iter().collect();
        assert_eq!(f7t.one_minus_classes(&z, 4).classes, want);
    }

    #[test]
    fn representatives_examples() {
        let f7 = FieldTower::new(3, 7, Base::Finite, vec![]).unwrap();
        let reps = f7.representatives(&KClass::unit(BasisIndex::Zeta), 4);
        assert_eq!(reps, vec![Elem::Fq(3), Elem::Fq(4)]);
        assert!(f7.representatives(&KClass::zero(), 4).contains(&Elem::Fq(1)));
        let f7t = FieldTower::new(3, 7, Base::Finite, vec!["t".into()]).unwrap();
        let reps = f7t.representatives(&KClass::unit(BasisIndex::Var(0)), 4);
        for s in ["t", "t^4", "t^-2"] {
            assert!(reps.contains(&f7t.parse_elem(s).unwrap()), "{s}");
        }
    }

    #[test]
    fn units_and_transfer() {
        let k = fst();
        let ctx = k.default_context();
        let (u, u1) = k.units_subgroups(ValuationId { level: 2 }, &ctx).unwrap();
        assert_eq!(u, Subspace::span(3, 3, &[vec![1, 0, 0]]).unwrap());
        assert!(u1.is_zero());
        let (u0, _) = k.units_subgroups(ValuationId { level: 0 }, &ctx).unwrap();
        assert!(u0.is_full());
        let tr = k.residue_transfer(ValuationId { level: 2 }, &ctx, &u).unwrap();
        assert!(tr.is_full() && tr.ambient() == 1);
        assert!(k.residue_transfer(ValuationId { level: 2 }, &ctx, &Subspace::full(3, 3)).is_err());
        assert!(k.units_subgroups(ValuationId { level: 3 }, &ctx).is_err());
    }

    #[test]
    fn tame_examples() {
        let k = FieldTower::new(3, 7, Base::Finite, vec!["t".into()]).unwrap();
        let t = k.parse_elem("t").unwrap();
        let five = k.parse_elem("5").unwrap();
        assert_eq!(k.tame_symbol(&t, &five).unwrap(), KClass::unit(BasisIndex::Zeta));
        assert!(k.tame_symbol(&t, &t).unwrap().is_zero());
        assert!(k.tame_symbol(&five, &k.parse_elem("3").unwrap()).unwrap().is_zero());
    }
}
