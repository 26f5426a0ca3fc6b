//! Rigid and valuative subgroups, the hull H(T), v_H, rigid decomposition and
//! the correspondence between V_K and T_K.
//!
//! A subgroup given in context coordinates stands for its preimage in
//! K^×/ℓ under projection onto the context. Symbols are then read in the
//! model quotient of K_2/ℓ (see [`K2Mode::Model`]), which is exact for a
//! tower of Laurent layers over F_q.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::fields::{BasisIndex, Context, Elem, FieldError, FieldTower, KClass, ValuationId};
use crate::linalg_fl::{self, LinalgError, Subspace};
use crate::milnor::{self, K2Mode, K2Table};
use crate::par;

#[derive(Debug, Error)]
pub enum RigidityError {
    #[error("subgroup lives in dimension {got}, the context has dimension {want}")]
    ContextMismatch { want: usize, got: usize },
    #[error("subgroup is not rigid")]
    NotRigid,
    #[error("subgroup is not valuative through the chain")]
    NotValuative,
    #[error("no valuative cyclic extension found")]
    NoWitnessFound,
    #[error("internal disagreement: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Assurance {
    Certified,
    /// Exhausted over representatives up to this degree bound.
    Bounded(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub x: KClass,
    pub y: KClass,
}

/// Negative verdicts carry a witness. They are certified unless they record an exhausted bounded search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub assurance: Assurance,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn certified() -> Self {
        Self { holds: true, assurance: Assurance::Certified, witness: None, notes: Vec::new() }
    }

    pub fn refuted(x: KClass, y: KClass) -> Self {
        Self { holds: false, assurance: Assurance::Certified, witness: Some(Witness { x, y }), notes: Vec::new() }
    }

    pub fn bounded(d: usize) -> Self {
        Self { holds: true, assurance: Assurance::Bounded(d), witness: None, notes: Vec::new() }
    }

    pub fn is_certified(&self) -> bool {
        self.assurance == Assurance::Certified
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HullResult {
    pub hull: Subspace,
    pub verdict: Verdict,
    /// Span of T and every class with an independent vanishing partner mod T.
    pub partner_span: Subspace,
}

#[derive(Clone, Debug, Serialize)]
pub struct VkEntry {
    pub valuation: ValuationId,
    pub gamma_ok: bool,
    pub noncyclic: bool,
    pub hull_full: Verdict,
    /// Basis classes of the residue context and their first vanishing partner.
    pub partners: Vec<(KClass, Option<KClass>)>,
}

impl VkEntry {
    pub fn admitted(&self) -> bool {
        self.gamma_ok && self.noncyclic && self.hull_full.holds
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TkEntry {
    pub t: Subspace,
    pub hull: Subspace,
    pub minimal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoarseningCheck {
    pub valuation: ValuationId,
    pub vk_v: Vec<ValuationId>,
    pub tk_v: Vec<Subspace>,
    pub residue_vk_lifted: Vec<ValuationId>,
    pub residue_tk_lifted: Vec<Subspace>,
    pub commutes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VkTkReport {
    /// Every chain level with its three conditions, admitted or not.
    pub chain: Vec<VkEntry>,
    pub vk: Vec<ValuationId>,
    pub tk: Vec<TkEntry>,
    pub injective: bool,
    pub surjective: bool,
    pub coarsening: Vec<CoarseningCheck>,
    pub assurance: Assurance,
    pub candidates_examined: usize,
    pub notes: Vec<String>,
}

impl VkTkReport {
    pub fn bijection_holds(&self) -> bool {
        self.injective && self.surjective && self.coarsening.iter().all(|c| c.commutes)
    }
}

/// Classes examined by the bounded 1−x search over a rational base.
const PHASE2_CLASS_CAP: usize = 729;
/// Proper subgroups examined per T_K candidate in the minimality clause.
const MINIMALITY_CAP: u128 = 50_000;

/// Rigidity computations over a fixed tower and context.
pub struct Analyzer<'a> {
    k: &'a FieldTower,
    ctx: Context,
    bound: usize,
    model: K2Table,
}

impl<'a> Analyzer<'a> {
    pub fn new(k: &'a FieldTower, ctx: &Context, bound: usize) -> Self {
        let model = K2Table::new(k, ctx, K2Mode::Model);
        Self { k, ctx: ctx.clone(), bound, model }
    }

    pub fn tower(&self) -> &FieldTower {
        self.k
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// The model K_2 table the symbol computations run on.
    pub fn model(&self) -> &K2Table {
        &self.model
    }

    fn ell(&self) -> u8 {
        self.k.ell()
    }

    fn pure(&self) -> bool {
        !self.k.is_rational()
    }

    fn assurance(&self) -> Assurance {
        if self.pure() {
            Assurance::Certified
        } else {
            Assurance::Bounded(self.bound)
        }
    }

    fn check(&self, t: &Subspace) -> Result<(), RigidityError> {
        if t.ambient() != self.dim() || t.ell() != self.ell() {
            return Err(RigidityError::ContextMismatch { want: self.dim(), got: t.ambient() });
        }
        Ok(())
    }

    fn sparse(&self, v: &[u8]) -> KClass {
        self.ctx.to_sparse(v, self.ell())
    }

    // ---------- symbols ----------

    /// {y : {x, y} ∈ I_T}, the classes whose symbol with x vanishes mod T.
    pub fn partner_space(&self, x: &[u8], ideal: &Subspace) -> Subspace {
        let rows: Vec<Vec<u8>> = self.model.sym_map(x).iter().map(|r| ideal.reduce(r)).collect();
        linalg_fl::linear_relations(self.ell(), self.model.key_dim(), &rows)
    }

    pub fn ideal(&self, t: &Subspace) -> Subspace {
        self.model.ideal(t)
    }

    /// First x ∉ T, in canonical order, with an independent y such that {x, y}_T = 0.
    fn symbol_route(&self, t: &Subspace) -> Option<(Vec<u8>, Vec<u8>)> {
        let ideal = self.ideal(t);
        for x in complement_points(t) {
            let p = self.partner_space(&x, &ideal);
            let span = t.with_vector(&x);
            if let Some(y) = p.rows().iter().find(|r| !span.contains(r)) {
                return Some((x, y.clone()));
            }
        }
        None
    }

    /// Rigidity of S with dim V/S ≤ 2: a single symbol decides it.
    fn small_quotient_rigid(&self, s: &Subspace) -> bool {
        if s.codim() <= 1 {
            return true;
        }
        debug_assert_eq!(s.codim(), 2);
        let c = s.complement_basis();
        let v = self.model.sym(&c[0], &c[1]);
        !self.ideal(s).contains(&v)
    }

    // ---------- definition route ----------

    /// Projected classes of 1 − x for class(x) = c, or `None` when every class occurs.
    fn one_minus_projected(&self, c: &[u8]) -> Option<Vec<Vec<u8>>> {
        let om = self.k.one_minus_classes(&self.sparse(c), self.bound);
        if om.all_classes {
            return None;
        }
        Some(om.classes.iter().map(|d| self.ctx.project(d)).collect())
    }

    fn violates_rigidity(&self, t: &Subspace, c: &[u8], ds: Option<Vec<Vec<u8>>>) -> Option<Witness> {
        let span = t.with_vector(c);
        match ds {
            None => span.complement_basis().first().map(|d| Witness { x: self.sparse(c), y: self.sparse(d) }),
            Some(ds) => ds.into_iter().find(|d| !span.contains(d)).map(|d| Witness { x: self.sparse(c), y: self.sparse(&d) }),
        }
    }

    /// Every class c ∉ T checked exactly; pure Laurent towers only.
    fn definition_route_exact(&self, t: &Subspace) -> Option<Witness> {
        let full = Subspace::full(self.ell(), self.dim());
        let found = full.vectors().filter(|c| !t.contains(c)).find_map(|c| self.violates_rigidity(t, &c, self.one_minus_projected(&c)));
        found
    }

    /// Canonical representatives of the basis classes, in context order.
    fn definition_phase1(&self, t: &Subspace) -> Option<Witness> {
        let n = self.dim();
        for i in 0..n {
            let c = linalg_fl::unit_vector(n, i);
            if t.contains(&c) {
                continue;
            }
            let x = self.canonical_rep(self.ctx.label(i));
            let one = self.k.one_at(self.k.top());
            if x == one {
                continue;
            }
            let Ok(d) = self.k.class_of(&self.k.sub_at(self.k.top(), &one, &x)) else {
                continue;
            };
            if let Some(w) = self.violates_rigidity(t, &c, Some(vec![self.ctx.project(&d)])) {
                return Some(Witness { x: w.x, y: d });
            }
        }
        None
    }

    fn definition_phase2(&self, t: &Subspace) -> Option<Witness> {
        let full = Subspace::full(self.ell(), self.dim());
        let classes: Vec<Vec<u8>> = if full.vectors().count() <= PHASE2_CLASS_CAP {
            full.vectors().filter(|c| !t.contains(c)).collect()
        } else {
            full.projective_points().filter(|c| !t.contains(c)).take(PHASE2_CLASS_CAP).collect()
        };
        classes.iter().find_map(|c| self.violates_rigidity(t, c, self.one_minus_projected(c)))
    }

    fn canonical_rep(&self, b: &BasisIndex) -> Elem {
        let k = self.k;
        let n = k.top();
        match b {
            BasisIndex::Zeta => k.constant_at(n, k.generator()),
            BasisIndex::Irred(p) => k.lift(0, n, Elem::Rat(k.rat(p.clone(), crate::fields::Poly::one()).expect("monic"))),
            BasisIndex::Var(j) => k.lift(j + 1, n, k.var_elem(j + 1)),
        }
    }

    // ---------- rigidity ----------

    pub fn is_rigid(&self, t: &Subspace) -> Result<Verdict, RigidityError> {
        self.check(t)?;
        if t.codim() <= 1 {
            return Ok(Verdict::certified());
        }
        if self.pure() {
            let sym = self.symbol_route(t);
            let def = self.definition_route_exact(t);
            return match (sym, def) {
                (None, None) => Ok(Verdict::certified()),
                (Some(_), Some(w)) => Ok(Verdict::refuted(w.x, w.y)),
                (s, d) => Err(RigidityError::Inconsistent(format!(
                    "symbol route {} a vanishing pair, definition route {} a witness for T = {t:?}",
                    if s.is_some() { "found" } else { "found no" },
                    if d.is_some() { "found" } else { "found no" }
                ))),
            };
        }
        if let Some(w) = self.definition_phase1(t) {
            return Ok(Verdict::refuted(w.x, w.y).note("element witness: class of x and of 1 − x"));
        }
        if let Some((x, y)) = self.symbol_route(t) {
            return Ok(Verdict::refuted(self.sparse(&x), self.sparse(&y)).note("independent pair with vanishing symbol mod T"));
        }
        if let Some(w) = self.definition_phase2(t) {
            return Ok(Verdict::refuted(w.x, w.y).note("element witness: class of x and of 1 − x"));
        }
        Ok(Verdict::bounded(self.bound))
    }

    /// Symbol-route rigidity alone; exact in the model.
    pub fn is_rigid_symbolic(&self, t: &Subspace) -> bool {
        t.codim() <= 1 || self.symbol_route(t).is_none()
    }

    /// Definition-route rigidity alone; exact for pure Laurent towers.
    pub fn is_rigid_by_definition(&self, t: &Subspace) -> bool {
        if t.codim() <= 1 {
            return true;
        }
        if self.pure() {
            self.definition_route_exact(t).is_none()
        } else {
            self.definition_phase1(t).is_none() && self.definition_phase2(t).is_none()
        }
    }

    // ---------- hull ----------

    /// The span of T and all classes x ∉ T with an independent y, {x, y}_T = 0.
    pub fn partner_span(&self, t: &Subspace) -> Subspace {
        let ideal = self.ideal(t);
        let mut out = t.clone();
        for x in complement_points(t) {
            if out.contains(&x) {
                continue;
            }
            let p = self.partner_space(&x, &ideal);
            let span = t.with_vector(&x);
            if !p.is_subspace_of(&span) {
                out = out.with_vector(&x);
            }
        }
        out
    }

    /// Intersection of the codim ≤ 1 overgroups H of T with H ∩ H′ rigid
    /// for every codim ≤ 1 overgroup H′, computed on ann(T).
    pub fn hull_by_definition(&self, t: &Subspace) -> Subspace {
        if t.codim() <= 1 {
            // every overgroup intersection is an overgroup of T with cyclic quotient
            return t.clone();
        }
        let dual = t.annihilator();
        let points: Vec<Vec<u8>> = dual.projective_points().collect();
        let mut cache: HashMap<Subspace, bool> = HashMap::new();
        let mut qualifying = Vec::new();
        for phi in &points {
            let mut ok = true;
            for psi in &points {
                if psi == phi {
                    continue;
                }
                let plane = Subspace::span_unchecked(self.ell(), self.dim(), vec![phi.clone(), psi.clone()]);
                let rigid = *cache.entry(plane.clone()).or_insert_with(|| self.small_quotient_rigid(&plane.annihilator()));
                if !rigid {
                    ok = false;
                    break;
                }
            }
            if ok {
                qualifying.push(phi.clone());
            }
        }
        // K^× itself always qualifies, so an empty family leaves the whole space
        Subspace::span_unchecked(self.ell(), self.dim(), qualifying).annihilator()
    }

    pub fn hull(&self, t: &Subspace) -> Result<HullResult, RigidityError> {
        self.check(t)?;
        let hull = self.hull_by_definition(t);
        let partner_span = self.partner_span(t);
        if !partner_span.is_subspace_of(&hull) {
            return Err(RigidityError::Inconsistent(format!(
                "partner-witnessed classes {partner_span:?} escape the hull {hull:?} of {t:?}"
            )));
        }
        let mut verdict = match self.assurance() {
            Assurance::Certified => Verdict::certified(),
            Assurance::Bounded(d) => Verdict::bounded(d),
        };
        if partner_span != hull {
            verdict.notes.push("hull strictly larger than the partner span".into());
        }
        Ok(HullResult { hull, verdict, partner_span })
    }

    // ---------- valuations ----------

    pub fn units(&self, v: ValuationId) -> Result<Subspace, RigidityError> {
        Ok(self.k.units_subgroups(v, &self.ctx)?.0)
    }

    /// The coarsest chain valuation whose unit classes lie in H.
    pub fn chain_level(&self, h: &Subspace) -> Option<ValuationId> {
        self.k.valuation_chain().into_iter().find(|&v| self.units(v).is_ok_and(|u| u.is_subspace_of(h)))
    }

    pub fn v_from_h(&self, h: &Subspace) -> Result<ValuationId, RigidityError> {
        self.check(h)?;
        self.chain_level(h).ok_or(RigidityError::NotValuative)
    }

    /// First class c ∉ H whose 1 + x classes leave H ∪ (c + H).
    fn valuative_clause1(&self, h: &Subspace) -> Option<Witness> {
        let full = Subspace::full(self.ell(), self.dim());
        let classes: Vec<Vec<u8>> = full.vectors().filter(|c| !h.contains(c)).take(PHASE2_CLASS_CAP).collect();
        for c in classes {
            // class(1 + x) over class(x) = c equals class(1 − x′) over class(x′) = c, as −1 is an ℓ-th power
            let Some(ds) = self.one_minus_projected(&c) else {
                let d = h.complement_basis().into_iter().find(|d| !h.contains(&linalg_fl::sub(d, &c, self.ell())));
                if let Some(d) = d {
                    return Some(Witness { x: self.sparse(&c), y: self.sparse(&d) });
                }
                continue;
            };
            if let Some(d) = ds.into_iter().find(|d| !h.contains(d) && !h.contains(&linalg_fl::sub(d, &c, self.ell()))) {
                return Some(Witness { x: self.sparse(&c), y: self.sparse(&d) });
            }
        }
        None
    }

    /// x, y ∉ H with 1 + x, 1 + y ∈ H must give 1 + x(1 + y) ∈ H; checked on representatives.
    fn valuative_composite(&self, h: &Subspace) -> Option<Witness> {
        const CLASSES: usize = 27;
        const REPS: usize = 6;
        let k = self.k;
        let n = k.top();
        let one = k.one_at(n);
        let in_h = |e: &Elem| k.class_of(e).ok().map(|c| h.contains(&self.ctx.project(&c)));
        let mut pool: Vec<Elem> = Vec::new();
        let full = Subspace::full(self.ell(), self.dim());
        for c in full.vectors().filter(|c| !h.contains(c)).take(CLASSES) {
            for x in k.representatives(&self.sparse(&c), self.bound).into_iter().take(REPS) {
                if in_h(&k.add_at(n, &one, &x)) == Some(true) {
                    pool.push(x);
                }
            }
        }
        for x in &pool {
            for y in &pool {
                let z = k.add_at(n, &one, &k.mul_at(n, x, &k.add_at(n, &one, y)));
                if in_h(&z) == Some(false) {
                    let cx = k.class_of(x).ok()?;
                    return Some(Witness { x: cx, y: k.class_of(&z).ok()? });
                }
            }
        }
        None
    }

    pub fn is_valuative(&self, h: &Subspace) -> Result<Verdict, RigidityError> {
        self.check(h)?;
        let chain = self.chain_level(h);
        let clause1 = self.valuative_clause1(h);
        match (chain, clause1) {
            (Some(v), None) => Ok(Verdict::certified().note(format!("units of chain level {} lie in H", v.level))),
            (Some(v), Some(w)) => {
                if self.pure() {
                    Err(RigidityError::Inconsistent(format!("chain level {} is valuative but the criterion fails at {w:?}", v.level)))
                } else {
                    Ok(Verdict::certified().note(format!("units of chain level {} lie in H", v.level)))
                }
            }
            (None, Some(w)) => Ok(Verdict::refuted(w.x, w.y).note("1 + x leaves H ∪ xH")),
            (None, None) => {
                if let Some(w) = self.valuative_composite(h) {
                    return Ok(Verdict::refuted(w.x, w.y).note("1 + x(1 + y) leaves H"));
                }
                Ok(Verdict::bounded(self.bound).note("criterion holds on all representatives but no chain valuation has its units in H"))
            }
        }
    }

    /// H ⊇ T with dim H/T ≤ 1, valuative through the chain, and U¹_{v_H} ≤ T.
    pub fn decompose_rigid(&self, t: &Subspace) -> Result<(Subspace, ValuationId), RigidityError> {
        if !self.is_rigid(t)?.holds {
            return Err(RigidityError::NotRigid);
        }
        let mut candidates = vec![t.clone()];
        candidates.extend(complement_points(t).map(|c| t.with_vector(&c)));
        for h in candidates {
            if let Some(v) = self.chain_level(&h) {
                let (_, u1) = self.k.units_subgroups(v, &self.ctx)?;
                if u1.is_subspace_of(t) {
                    return Ok((h, v));
                }
            }
        }
        Err(RigidityError::NoWitnessFound)
    }

    // ---------- V_K and T_K ----------

    fn vk_entry(&self, v: ValuationId) -> Result<VkEntry, RigidityError> {
        let residue = self.k.residue_tower(v.level)?;
        let rctx = self.k.residue_context(&self.ctx, v)?;
        let noncyclic = residue.is_rational() || rctx.dim() >= 2;
        let res = Analyzer::new(&residue, &rctx, self.bound);
        let partners: Vec<(KClass, Option<KClass>)> = rctx
            .labels()
            .iter()
            .map(|b| {
                let x = KClass::unit(b.clone());
                let p = find_vanishing_partner(&residue, &rctx, &x, self.bound);
                (x, p)
            })
            .collect();
        let h0 = res.hull_by_definition(&Subspace::zero(self.ell(), rctx.dim()));
        let mut hull_full = if residue.is_rational() {
            if h0.is_full() && partners.iter().all(|(_, p)| p.is_some()) {
                Verdict::bounded(self.bound).note("every residue basis class has a vanishing partner")
            } else if !h0.is_full() {
                let x = h0.complement_basis().first().map(|c| rctx.to_sparse(c, self.ell())).unwrap_or_default();
                Verdict::refuted(x, KClass::zero()).note("residue hull of the trivial subgroup is proper")
            } else {
                // exhausting the partner search up to the bound is not a proof
                let x = partners.iter().find(|(_, p)| p.is_none()).map(|(x, _)| x.clone()).unwrap_or_default();
                let mut v = Verdict::refuted(x, KClass::zero()).note("a residue basis class has no vanishing partner within the bound");
                v.assurance = Assurance::Bounded(self.bound);
                v
            }
        } else if h0.is_full() {
            Verdict::certified()
        } else {
            let x = h0.complement_basis().first().map(|c| rctx.to_sparse(c, self.ell())).unwrap_or_default();
            Verdict::refuted(x, KClass::zero()).note("residue hull of the trivial subgroup is proper")
        };
        if !noncyclic {
            hull_full.notes.push("residue class group is cyclic".into());
        }
        Ok(VkEntry { valuation: v, gamma_ok: true, noncyclic, hull_full, partners })
    }

    /// All T with T ≠ H(T) and H(T′) ≰ H(T) for every T′ ⊊ T.
    ///
    /// With H₀ = H(0): if every basis vector h of H₀ lies in T or has a
    /// vanishing partner outside ⟨h⟩ + T, then H₀ ≤ H(T) and T fails
    /// minimality against T′ = 0. The remaining candidates satisfy
    /// P₀(h) + ⟨h⟩ ≤ T + ⟨h⟩ for some such h with h ∉ T, and are enumerated
    /// as hyperplanes of overspaces of P₀(h) + ⟨h⟩.
    fn enumerate_tk(&self) -> Result<(Vec<TkEntry>, usize), RigidityError> {
        let ell = self.ell();
        let n = self.dim();
        let zero = Subspace::zero(ell, n);
        let h0 = self.hull_by_definition(&zero);
        let mut out = Vec::new();
        if h0.is_zero() {
            return Ok((out, 0));
        }
        out.push(TkEntry { t: zero.clone(), hull: h0.clone(), minimal: true });
        let ideal0 = self.ideal(&zero);
        let mut candidates: BTreeSet<Subspace> = BTreeSet::new();
        for h in h0.rows() {
            let q = self.partner_space(h, &ideal0).with_vector(h);
            for w in linalg_fl::enumerate_overspaces(&q, |_| true, u128::MAX)? {
                for t in linalg_fl::enumerate_subspaces_of(&w, |d| d + 1 == w.dim(), u128::MAX)? {
                    if !t.contains(h) && !t.is_zero() {
                        candidates.insert(t);
                    }
                }
            }
        }
        let candidates: Vec<Subspace> = candidates.into_iter().collect();
        let examined = candidates.len();
        let results = par::map_ordered(&candidates, |t| -> Result<Option<TkEntry>, RigidityError> {
            let hull = self.hull_by_definition(t);
            if hull == *t || h0.is_subspace_of(&hull) {
                return Ok(None);
            }
            for tp in linalg_fl::enumerate_subspaces_of(t, |d| d < t.dim(), MINIMALITY_CAP)? {
                if self.hull_by_definition(&tp).is_subspace_of(&hull) {
                    return Ok(None);
                }
            }
            Ok(Some(TkEntry { t: t.clone(), hull, minimal: true }))
        });
        for r in results {
            if let Some(e) = r? {
                out.push(e);
            }
        }
        Ok((out, examined))
    }

    pub fn enumerate_vk_tk(&self) -> Result<VkTkReport, RigidityError> {
        if self.dim() > 8 {
            return Err(LinalgError::TooLarge { count: self.dim() as u128, cap: 8 }.into());
        }
        let chain: Vec<VkEntry> = self.k.valuation_chain().into_iter().map(|v| self.vk_entry(v)).collect::<Result<_, _>>()?;
        let vk: Vec<ValuationId> = chain.iter().filter(|e| e.admitted()).map(|e| e.valuation).collect();
        let (tk, examined) = self.enumerate_tk()?;
        let images: Vec<Subspace> =
            vk.iter().map(|&v| self.k.units_subgroups(v, &self.ctx).map(|(_, u1)| u1)).collect::<Result<_, _>>()?;
        let distinct: BTreeSet<&Subspace> = images.iter().collect();
        let injective = distinct.len() == images.len();
        let tk_set: BTreeSet<&Subspace> = tk.iter().map(|e| &e.t).collect();
        let surjective = distinct == tk_set;
        let mut coarsening = Vec::new();
        for &v in &vk {
            coarsening.push(self.coarsening_check(v, &vk, &tk)?);
        }
        let mut notes = vec!["V_K^v is taken to include v itself".to_string()];
        if !self.pure() {
            notes.push(format!("assurance bounded by representative degree {}", self.bound));
        }
        Ok(VkTkReport { chain, vk, tk, injective, surjective, coarsening, assurance: self.assurance(), candidates_examined: examined, notes })
    }

    fn coarsening_check(&self, v: ValuationId, vk: &[ValuationId], tk: &[TkEntry]) -> Result<CoarseningCheck, RigidityError> {
        let (u, u1) = self.k.units_subgroups(v, &self.ctx)?;
        let vk_v: Vec<ValuationId> = vk.iter().copied().filter(|w| v.coarsens(w)).collect();
        let tk_v: Vec<Subspace> =
            tk.iter().filter(|e| u1.is_subspace_of(&e.t) && e.hull.is_subspace_of(&u)).map(|e| e.t.clone()).collect();
        let residue = self.k.residue_tower(v.level)?;
        let rctx = self.k.residue_context(&self.ctx, v)?;
        let (res_vk, res_tk): (Vec<ValuationId>, Vec<Subspace>) = if v.level == 0 {
            (vk.to_vec(), tk.iter().map(|e| e.t.clone()).collect())
        } else {
            let sub = Analyzer::new(&residue, &rctx, self.bound).enumerate_vk_tk()?;
            let lifted_v: Vec<ValuationId> = sub.vk.iter().map(|w| ValuationId { level: w.level + v.level }).collect();
            let lifted_t = sub.tk.iter().map(|e| self.k.residue_lift(v, &self.ctx, &e.t)).collect::<Result<Vec<_>, _>>()?;
            (lifted_v, lifted_t)
        };
        let set = |x: &[Subspace]| x.iter().cloned().collect::<BTreeSet<_>>();
        // the square commutes when both lifts land on the level-v pieces and U¹ is carried along
        let images_ok = res_vk.iter().all(|w| {
            self.k.units_subgroups(*w, &self.ctx).map(|(_, u1w)| tk_v.contains(&u1w)).unwrap_or(false)
        });
        let commutes = vk_v == res_vk && set(&tk_v) == set(&res_tk) && images_ok;
        Ok(CoarseningCheck { valuation: v, vk_v, tk_v, residue_vk_lifted: res_vk, residue_tk_lifted: res_tk, commutes })
    }
}

/// Lifts of the projective points of V/T, in canonical order.
pub fn complement_points(t: &Subspace) -> impl Iterator<Item = Vec<u8>> {
    let c = Subspace::span_unchecked(t.ell(), t.ambient(), t.complement_basis());
    let pts: Vec<Vec<u8>> = c.projective_points().collect();
    pts.into_iter()
}

fn independent(ell: u8, x: &KClass, y: &KClass) -> bool {
    !y.is_zero() && (1..ell).all(|c| x.scale(c, ell) != *y)
}

/// Some y independent of x with {x, y} = 0 in K_2/ℓ itself.
///
/// Candidates: ζ, the context irreducibles, monic irreducibles of degree ≤ D,
/// then every nonzero context class; the first verified hit is returned.
pub fn find_vanishing_partner(k: &FieldTower, ctx: &Context, x: &KClass, bound: usize) -> Option<KClass> {
    let ell = k.ell();
    if x.is_zero() {
        return None;
    }
    let mut cands: Vec<KClass> = vec![KClass::unit(BasisIndex::Zeta)];
    cands.extend(ctx.labels().iter().filter(|b| matches!(b, BasisIndex::Irred(_))).map(|b| KClass::unit(b.clone())));
    if k.is_rational() {
        for p in k.poly_ring().irreducibles_up_to(bound) {
            let b = BasisIndex::Irred(p);
            if !ctx.contains(&b) {
                cands.push(KClass::unit(b));
            }
        }
    }
    if ctx.dim() <= 8 {
        cands.extend(Subspace::full(ell, ctx.dim()).vectors().filter(|v| !linalg_fl::is_zero(v)).map(|v| ctx.to_sparse(&v, ell)));
    }
    cands.into_iter().find(|y| independent(ell, x, y) && milnor::symbol(k, x, y).is_zero())
}

// ---------- free-function entry points ----------

pub fn is_rigid(k: &FieldTower, ctx: &Context, t: &Subspace, bound: usize) -> Result<Verdict, RigidityError> {
    Analyzer::new(k, ctx, bound).is_rigid(t)
}

pub fn is_valuative(k: &FieldTower, ctx: &Context, h: &Subspace, bound: usize) -> Result<Verdict, RigidityError> {
    Analyzer::new(k, ctx, bound).is_valuative(h)
}

pub fn hull(k: &FieldTower, ctx: &Context, t: &Subspace, bound: usize) -> Result<HullResult, RigidityError> {
    Analyzer::new(k, ctx, bound).hull(t)
}

pub fn v_from_h(k: &FieldTower, ctx: &Context, h: &Subspace) -> Result<ValuationId, RigidityError> {
    Analyzer::new(k, ctx, 0).v_from_h(h)
}

pub fn decompose_rigid(k: &FieldTower, ctx: &Context, t: &Subspace, bound: usize) -> Result<(Subspace, ValuationId), RigidityError> {
    Analyzer::new(k, ctx, bound).decompose_rigid(t)
}

pub fn enumerate_vk_tk(k: &FieldTower, ctx: &Context, bound: usize) -> Result<VkTkReport, RigidityError> {
    Analyzer::new(k, ctx, bound).enumerate_vk_tk()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Base;

    fn fst() -> (FieldTower, Context) {
        let k = FieldTower::new(3, 7, Base::Finite, vec!["s".into(), "t".into()]).unwrap();
        let c = k.default_context();
        (k, c)
    }

    fn f7x() -> (FieldTower, Context) {
        let k = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec![]).unwrap();
        let irr: Vec<_> = ["x", "x+1", "x-1"].iter().map(|s| k.parse_poly(s).unwrap()).collect();
        let c = k.context(&irr).unwrap();
        (k, c)
    }

    #[test]
    fn rigidity_examples() {
        let (k, ctx) = fst();
        let a = Analyzer::new(&k, &ctx, 4);
        let v = a.is_rigid(&Subspace::zero(3, 3)).unwrap();
        assert!(v.holds && v.is_certified());
        assert!(a.is_rigid(&Subspace::full(3, 3)).unwrap().holds);
        let (k, ctx) = f7x();
        let v = is_rigid(&k, &ctx, &Subspace::zero(3, 4), 4).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.x, k.class_of(&k.parse_elem("x").unwrap()).unwrap());
        assert_eq!(w.y, k.class_of(&k.parse_elem("x-1").unwrap()).unwrap());
    }

    #[test]
    fn hull_examples() {
        let (k, ctx) = fst();
        let a = Analyzer::new(&k, &ctx, 4);
        let z = k.parse_subgroup(&ctx, "zeta").unwrap();
        assert_eq!(a.hull(&z).unwrap().hull, z);
        assert!(a.hull(&Subspace::full(3, 3)).unwrap().hull.is_full());
        let (k, ctx) = f7x();
        let h = hull(&k, &ctx, &Subspace::zero(3, 4), 4).unwrap();
        assert!(h.hull.contains(&k.parse_class(&ctx, "x").unwrap()));
        assert_eq!(h.verdict.assurance, Assurance::Bounded(4));
    }

    #[test]
    fn valuative_examples() {
        let (k, ctx) = fst();
        let z = k.parse_subgroup(&ctx, "zeta").unwrap();
        assert!(is_valuative(&k, &ctx, &z, 4).unwrap().holds);
        assert_eq!(v_from_h(&k, &ctx, &z).unwrap().level, 2);
        let zs = k.parse_subgroup(&ctx, "zeta, s").unwrap();
        assert_eq!(v_from_h(&k, &ctx, &zs).unwrap().level, 1);
        assert_eq!(v_from_h(&k, &ctx, &Subspace::full(3, 3)).unwrap().level, 0);
        let k = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec![]).unwrap();
        let ctx = k.context(&[k.parse_poly("x").unwrap()]).unwrap();
        let h = k.parse_subgroup(&ctx, "x").unwrap();
        let v = is_valuative(&k, &ctx, &h, 4).unwrap();
        assert!(!v.holds && v.witness.is_some());
    }

    #[test]
    fn decomposition_examples() {
        let (k, ctx) = fst();
        let (h, v) = decompose_rigid(&k, &ctx, &Subspace::zero(3, 3), 4).unwrap();
        assert_eq!((h, v.level), (k.parse_subgroup(&ctx, "zeta").unwrap(), 2));
        let k1 = FieldTower::new(3, 7, Base::Finite, vec!["t".into()]).unwrap();
        let c1 = k1.default_context();
        let (h, v) = decompose_rigid(&k1, &c1, &Subspace::zero(3, 2), 4).unwrap();
        assert_eq!((h, v.level), (k1.parse_subgroup(&c1, "zeta").unwrap(), 1));
    }

    #[test]
    fn partner_examples() {
        let k = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec![]).unwrap();
        let irr: Vec<_> = ["x", "x+1", "x-1", "x+2", "x-2"].iter().map(|s| k.parse_poly(s).unwrap()).collect();
        let ctx = k.context(&irr).unwrap();
        let c = |s: &str| k.class_of(&k.parse_elem(s).unwrap()).unwrap();
        assert_eq!(find_vanishing_partner(&k, &ctx, &c("x"), 4), Some(c("x+1")));
        assert_eq!(find_vanishing_partner(&k, &ctx, &c("x+2"), 4), Some(c("x+1")));
        assert_eq!(find_vanishing_partner(&k, &ctx, &c("x-1"), 4), Some(c("x")));
        assert_eq!(find_vanishing_partner(&k, &ctx, &c("x-2"), 4), Some(c("x-1")));
        let z = find_vanishing_partner(&k, &ctx, &c("3"), 4).unwrap();
        let (_, p) = z.iter().next().map(|(b, _)| ((), b.clone())).unwrap();
        assert!(matches!(p, BasisIndex::Irred(ref q) if q.deg() == 3));
        let ks = FieldTower::new(3, 7, Base::Finite, vec!["s".into()]).unwrap();
        let cs = ks.default_context();
        assert_eq!(find_vanishing_partner(&ks, &cs, &KClass::unit(BasisIndex::Var(0)), 4), None);
    }

    #[test]
    fn vk_tk_pure_laurent_is_empty() {
        let (k, ctx) = fst();
        let r = enumerate_vk_tk(&k, &ctx, 4).unwrap();
        assert!(r.vk.is_empty() && r.tk.is_empty());
        assert!(r.bijection_holds());
        let f7 = FieldTower::new(3, 7, Base::Finite, vec![]).unwrap();
        let r = enumerate_vk_tk(&f7, &f7.default_context(), 4).unwrap();
        assert!(r.vk.is_empty());
        assert!(!r.chain[0].noncyclic);
    }
}
