//! The Kummer-dual side.
//!
//! A character is a functional on the context classes, stored by its values
//! on the basis; every functional is allowed. The map
//! Θ: ∧²(classes) ⊕ classes → K_2, x∧y ⊕ z ↦ {x,y} + {z,ω}, is evaluated in
//! the model K_2 table, and functionals on ker Θ stand in for the classes
//! [σ,τ] and σ^β of the abelian-by-central quotient.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::fields::{Context, FieldError, FieldTower, ValuationId};
use crate::linalg_fl::{self, LinalgError, Subspace};
use crate::milnor::K2Table;
use crate::par;
use crate::rigidity::{Analyzer, RigidityError, Verdict};

/// Values of a character on the context basis.
pub type Character = Vec<u8>;
/// A functional on ker Θ, in the coordinates of its stored basis.
pub type CommClass = Vec<u8>;

/// Context dimension accepted by [`KerTheta`].
pub const MAX_THETA_DIM: usize = 10;
/// Context dimension accepted by the exhaustive A_K scan.
pub const MAX_AK_DIM: usize = 6;
/// Dual subgroups the A_K scan may examine.
pub const AK_SUBSPACE_CAP: u128 = 50_000;

#[derive(Debug, Error)]
pub enum GaloisError {
    #[error("context dimension {dim} exceeds the limit {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("character space has dimension {got}, the context has dimension {want}")]
    ContextMismatch { want: usize, got: usize },
    #[error("subgroup is not ACL")]
    NotACL,
    #[error("internal disagreement: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Overall signs of the commutator and β functionals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SignConvention {
    pub negate_comm: bool,
    pub negate_beta: bool,
}

/// Nullspace of Θ with a fixed basis. Coordinates of a Θ-source vector are
/// the pairs b_i∧b_j (i < j, lexicographic) followed by β_{b_r}.
#[derive(Clone, Debug)]
pub struct KerTheta {
    ell: u8,
    n: usize,
    pairs: Vec<(usize, usize)>,
    columns: Vec<Vec<u8>>,
    basis: Vec<Vec<u8>>,
    signs: SignConvention,
}

impl KerTheta {
    pub fn new(table: &K2Table, omega: &[u8], ell: u8, signs: SignConvention) -> Result<Self, GaloisError> {
        let n = table.ctx_dim();
        if n > MAX_THETA_DIM {
            return Err(GaloisError::TooLarge { dim: n, cap: MAX_THETA_DIM });
        }
        if omega.len() != n {
            return Err(GaloisError::ContextMismatch { want: n, got: omega.len() });
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut columns: Vec<Vec<u8>> = pairs.iter().map(|&(i, j)| table.entry(i, j).to_vec()).collect();
        columns.extend((0..n).map(|r| table.sym(&linalg_fl::unit_vector(n, r), omega)));
        let kernel = linalg_fl::linear_relations(ell, table.key_dim(), &columns);
        let kt = Self { ell, n, pairs, columns, basis: kernel.rows().to_vec(), signs };
        for b in &kt.basis {
            if !linalg_fl::is_zero(&kt.theta(b)) {
                return Err(GaloisError::Inconsistent("Θ does not vanish on its nullspace basis".into()));
            }
        }
        Ok(kt)
    }

    /// ker Θ for the model table of an analyzer.
    pub fn of(an: &Analyzer<'_>) -> Result<Self, GaloisError> {
        Self::with_signs(an, SignConvention::default())
    }

    pub fn with_signs(an: &Analyzer<'_>, signs: SignConvention) -> Result<Self, GaloisError> {
        let omega = an.context().project(&an.tower().omega_class());
        Self::new(an.model(), &omega, an.tower().ell(), signs)
    }

    pub fn ell(&self) -> u8 {
        self.ell
    }

    /// Dimension of the character space.
    pub fn ctx_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Nullspace basis in source coordinates.
    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    /// Θ of a source vector, as a model K_2 key vector.
    pub fn theta(&self, src: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; self.columns.first().map_or(0, Vec::len)];
        for (c, col) in src.iter().zip(&self.columns) {
            linalg_fl::axpy(&mut out, *c, col, self.ell);
        }
        out
    }

    fn check(&self, v: &[u8]) -> Result<(), GaloisError> {
        if v.len() != self.n {
            return Err(GaloisError::ContextMismatch { want: self.n, got: v.len() });
        }
        Ok(())
    }

    fn check_sub(&self, z: &Subspace) -> Result<(), GaloisError> {
        if z.ambient() != self.n {
            return Err(GaloisError::ContextMismatch { want: self.n, got: z.ambient() });
        }
        Ok(())
    }

    fn signed(&self, v: Vec<u8>, neg: bool) -> Vec<u8> {
        if neg {
            v.iter().map(|&c| linalg_fl::neg_mod(c, self.ell)).collect()
        } else {
            v
        }
    }

    fn comm_raw(&self, s: &[u8], t: &[u8]) -> CommClass {
        let ell = self.ell as u32;
        let w: Vec<u32> = self
            .pairs
            .iter()
            .map(|&(i, j)| (s[i] as u32 * t[j] as u32 + (ell - s[j] as u32) * t[i] as u32) % ell)
            .collect();
        let v = self
            .basis
            .iter()
            .map(|b| (b.iter().zip(&w).map(|(&c, &x)| c as u32 * x).sum::<u32>() % ell) as u8)
            .collect();
        self.signed(v, self.signs.negate_comm)
    }

    fn beta_raw(&self, s: &[u8]) -> CommClass {
        let p = self.pairs.len();
        let v = self.basis.iter().map(|b| linalg_fl::dot(&b[p..], s, self.ell)).collect();
        self.signed(v, self.signs.negate_beta)
    }

    /// [σ, τ]: x∧y ⊕ z ↦ σ(x)τ(y) − σ(y)τ(x).
    pub fn comm_class(&self, s: &[u8], t: &[u8]) -> Result<CommClass, GaloisError> {
        self.check(s)?;
        self.check(t)?;
        Ok(self.comm_raw(s, t))
    }

    /// σ^β: x∧y ⊕ z ↦ σ(z).
    pub fn beta_class(&self, s: &[u8]) -> Result<CommClass, GaloisError> {
        self.check(s)?;
        Ok(self.beta_raw(s))
    }

    /// A^β as a subspace of functionals on ker Θ.
    pub fn beta_span(&self, a: &Subspace) -> Subspace {
        Subspace::span_unchecked(self.ell, self.dim(), a.rows().iter().map(|r| self.beta_raw(r)).collect())
    }

    // Characters σ among `candidates` combinations with [σ, τ] ∈ B for every τ in `taus`.
    fn solve(&self, candidates: &[Vec<u8>], taus: &[Vec<u8>], b: &Subspace) -> Subspace {
        if candidates.is_empty() {
            return Subspace::zero(self.ell, self.n);
        }
        let rows: Vec<Vec<u8>> =
            candidates.iter().map(|c| taus.iter().flat_map(|t| b.reduce(&self.comm_raw(c, t))).collect()).collect();
        let alphas = linalg_fl::linear_relations(self.ell, taus.len() * self.dim(), &rows);
        let gens = alphas
            .rows()
            .iter()
            .map(|a| {
                let mut v = vec![0u8; self.n];
                for (c, z) in a.iter().zip(candidates) {
                    linalg_fl::axpy(&mut v, *c, z, self.ell);
                }
                v
            })
            .collect();
        Subspace::span_unchecked(self.ell, self.n, gens)
    }

    /// **I**(Z) = {σ ∈ Z : [σ, τ] ∈ Z^β for all τ ∈ Z}.
    pub fn acl_center(&self, z: &Subspace) -> Result<Subspace, GaloisError> {
        self.check_sub(z)?;
        Ok(self.solve(z.rows(), z.rows(), &self.beta_span(z)))
    }

    pub fn is_acl(&self, z: &Subspace) -> Result<bool, GaloisError> {
        Ok(self.acl_center(z)? == *z)
    }

    fn centralizer_unchecked(&self, a: &Subspace) -> Subspace {
        let units: Vec<Vec<u8>> = (0..self.n).map(|i| linalg_fl::unit_vector(self.n, i)).collect();
        self.solve(&units, a.rows(), &self.beta_span(a))
    }

    /// C(A) = {σ : [σ, τ] ∈ A^β for all τ ∈ A}, for ACL A.
    pub fn centralizer(&self, a: &Subspace) -> Result<Subspace, GaloisError> {
        if !self.is_acl(a)? {
            return Err(GaloisError::NotACL);
        }
        Ok(self.centralizer_unchecked(a))
    }
}

/// ann(hull(ann Z)), with the verdict of the hull computation.
pub fn acl_center_dual(an: &Analyzer<'_>, z: &Subspace) -> Result<(Subspace, Verdict), GaloisError> {
    if z.ambient() != an.dim() {
        return Err(GaloisError::ContextMismatch { want: an.dim(), got: z.ambient() });
    }
    let h = an.hull(&z.annihilator())?;
    Ok((h.hull.annihilator(), h.verdict))
}

/// (D_v¹, I_v¹) as the annihilators of the principal units and the units.
pub fn d1_i1_of_v(k: &FieldTower, ctx: &Context, v: ValuationId) -> Result<(Subspace, Subspace), GaloisError> {
    let (u, u1) = k.units_subgroups(v, ctx)?;
    Ok((u1.annihilator(), u.annihilator()))
}

/// The annihilator of the principal units together with ω.
pub fn d_mu_of_v(k: &FieldTower, ctx: &Context, v: ValuationId) -> Result<Subspace, GaloisError> {
    let (_, u1) = k.units_subgroups(v, ctx)?;
    let omega = ctx.project(&k.omega_class());
    Ok(u1.with_vector(&omega).annihilator())
}

#[derive(Clone, Debug, Serialize)]
pub struct AkEntry {
    pub z: Subspace,
    pub center: Subspace,
}

#[derive(Clone, Debug, Serialize)]
pub struct AkReport {
    pub entries: Vec<AkEntry>,
    pub subspaces_examined: usize,
    /// Z ∈ A_K exactly when Z = C(**I**(Z)) and Z ≠ **I**(Z), over every Z examined.
    pub centralizer_agrees: bool,
    /// Subgroups where the two descriptions disagree.
    pub disagreements: Vec<Subspace>,
}

/// Every Z with **I**(Z) ≠ Z and **I**(Z) ≰ **I**(Z′) for all Z′ ⊋ Z.
pub fn enumerate_ak(kt: &KerTheta) -> Result<AkReport, GaloisError> {
    let n = kt.ctx_dim();
    if n > MAX_AK_DIM {
        return Err(GaloisError::TooLarge { dim: n, cap: MAX_AK_DIM });
    }
    let all: Vec<Subspace> = linalg_fl::enumerate_subspaces(kt.ell(), n, |_| true, AK_SUBSPACE_CAP)?.collect();
    let centers: Vec<Subspace> = par::map_ordered(&all, |z| kt.solve(z.rows(), z.rows(), &kt.beta_span(z)));
    let center_of: HashMap<&Subspace, &Subspace> = all.iter().zip(&centers).collect();
    let verdicts: Vec<Result<(bool, bool), GaloisError>> = par::map_ordered(&all, |z| {
        let iz = center_of[z];
        let member = iz != z
            && linalg_fl::enumerate_overspaces(z, |d| d > z.dim(), AK_SUBSPACE_CAP)?
                .iter()
                .all(|zp| !iz.is_subspace_of(center_of[zp]));
        let alt = iz != z && kt.centralizer_unchecked(iz) == *z;
        Ok((member, alt))
    });
    let mut entries = Vec::new();
    let mut disagreements = Vec::new();
    for ((z, c), v) in all.iter().zip(&centers).zip(verdicts) {
        let (member, alt) = v?;
        if member {
            entries.push(AkEntry { z: z.clone(), center: c.clone() });
        }
        if member != alt {
            disagreements.push(z.clone());
        }
    }
    Ok(AkReport { entries, subspaces_examined: all.len(), centralizer_agrees: disagreements.is_empty(), disagreements })
}

#[derive(Clone, Debug, Serialize)]
pub struct AkPair {
    pub valuation: ValuationId,
    pub d1: Subspace,
    pub i1: Subspace,
    pub in_ak: bool,
    pub center_is_inertia: bool,
}

/// The comparison of v ↦ D_v¹ against A_K, and of Z ↦ Z^⊥ against T_K.
#[derive(Clone, Debug, Serialize)]
pub struct AkBijection {
    pub pairs: Vec<AkPair>,
    pub injective: bool,
    pub surjective: bool,
    pub perp_matches_tk: bool,
}

impl AkBijection {
    pub fn holds(&self) -> bool {
        self.injective && self.surjective && self.perp_matches_tk && self.pairs.iter().all(|p| p.in_ak && p.center_is_inertia)
    }
}

pub fn ak_bijection(
    kt: &KerTheta,
    k: &FieldTower,
    ctx: &Context,
    ak: &AkReport,
    vk: &[ValuationId],
    tk: &[Subspace],
) -> Result<AkBijection, GaloisError> {
    let mut pairs = Vec::new();
    for &v in vk {
        let (d1, i1) = d1_i1_of_v(k, ctx, v)?;
        let in_ak = ak.entries.iter().any(|e| e.z == d1);
        let center_is_inertia = kt.acl_center(&d1)? == i1;
        pairs.push(AkPair { valuation: v, d1, i1, in_ak, center_is_inertia });
    }
    let images: BTreeSet<&Subspace> = pairs.iter().map(|p| &p.d1).collect();
    let injective = images.len() == pairs.len();
    let surjective = ak.entries.iter().all(|e| images.contains(&e.z));
    let perps: BTreeSet<Subspace> = ak.entries.iter().map(|e| e.z.annihilator()).collect();
    let tks: BTreeSet<Subspace> = tk.iter().cloned().collect();
    Ok(AkBijection { pairs, injective, surjective, perp_matches_tk: perps == tks })
}

/// A character as a dual-basis combination, e.g. `s* + 2 t*`.
pub fn render_character(k: &FieldTower, ctx: &Context, s: &[u8]) -> String {
    let terms: Vec<String> = s
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let name = k.basis_name(ctx.label(i));
            if c == 1 {
                format!("{name}*")
            } else {
                format!("{c} {name}*")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Base, Poly};

    fn st() -> FieldTower {
        FieldTower::new(3, 7, Base::Finite, vec!["s".into(), "t".into()]).unwrap()
    }

    fn sub(n: usize, gens: &[Vec<u8>]) -> Subspace {
        Subspace::span(3, n, gens).unwrap()
    }

    #[test]
    fn kernel_for_two_laurent_layers() {
        let k = st();
        let ctx = k.default_context();
        let an = Analyzer::new(&k, &ctx, 4);
        let kt = KerTheta::of(&an).unwrap();
        assert_eq!(kt.dim(), 3);
        // source coordinates: ζ∧s, ζ∧t, s∧t, β_ζ, β_s, β_t
        let expect = sub(6, &[vec![0, 0, 0, 1, 0, 0], vec![1, 0, 0, 0, 2, 0], vec![0, 1, 0, 0, 0, 2]]);
        assert_eq!(Subspace::span(3, 6, kt.basis()).unwrap(), expect);

        let e = |i| linalg_fl::unit_vector(3, i);
        assert!(linalg_fl::is_zero(&kt.comm_class(&e(1), &e(2)).unwrap()));
        let c = kt.comm_class(&e(0), &e(2)).unwrap();
        let b = kt.beta_class(&e(2)).unwrap();
        assert_eq!(c, linalg_fl::scale(&b, 2, 3));
        assert!(!linalg_fl::is_zero(&c));
    }

    #[test]
    fn centers_and_centralizers() {
        let k = st();
        let ctx = k.default_context();
        let an = Analyzer::new(&k, &ctx, 4);
        let kt = KerTheta::of(&an).unwrap();
        let full = Subspace::full(3, 3);
        assert_eq!(kt.acl_center(&full).unwrap(), full);
        let zs = sub(3, &[vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(kt.acl_center(&zs).unwrap(), zs);
        assert_eq!(acl_center_dual(&an, &zs).unwrap().0, zs);
        let a = sub(3, &[vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(kt.centralizer(&a).unwrap(), full);
        assert!(enumerate_ak(&kt).unwrap().entries.is_empty());
        let (d1, i1) = d1_i1_of_v(&k, &ctx, ValuationId { level: 2 }).unwrap();
        assert_eq!((d1, i1), (full, a));
    }

    #[test]
    fn rational_base_with_one_layer() {
        let k = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec!["t".into()]).unwrap();
        let lin = |c: u32| Poly::from_coeffs(vec![c, 1]);
        let ctx = k.context(&[lin(0), lin(1), lin(6)]).unwrap();
        let an = Analyzer::new(&k, &ctx, 4);
        let kt = KerTheta::of(&an).unwrap();
        assert_eq!(kt.dim(), 11);
        let full = Subspace::full(3, 5);
        let sigma_t = sub(5, &[linalg_fl::unit_vector(5, 4)]);
        assert_eq!(kt.acl_center(&full).unwrap(), sigma_t);
        let (_, i1) = d1_i1_of_v(&k, &ctx, ValuationId { level: 1 }).unwrap();
        assert_eq!(i1, sigma_t);
        let ak = enumerate_ak(&kt).unwrap();
        assert!(ak.centralizer_agrees);
        assert_eq!(ak.entries.len(), 1);
        assert_eq!(ak.entries[0].z, full);
        assert_eq!(ak.entries[0].center, sigma_t);
    }

    #[test]
    fn flipped_signs_give_the_same_subgroups() {
        let k = st();
        let ctx = k.default_context();
        let an = Analyzer::new(&k, &ctx, 4);
        let a = KerTheta::of(&an).unwrap();
        let b = KerTheta::with_signs(&an, SignConvention { negate_comm: true, negate_beta: false }).unwrap();
        for z in linalg_fl::enumerate_subspaces(3, 3, |_| true, 100).unwrap() {
            assert_eq!(a.acl_center(&z).unwrap(), b.acl_center(&z).unwrap());
        }
    }

    #[test]
    fn characters_render() {
        let k = st();
        let ctx = k.default_context();
        assert_eq!(render_character(&k, &ctx, &[0, 1, 2]), "s* + 2 t*");
        assert_eq!(render_character(&k, &ctx, &[0, 0, 0]), "0");
    }
}
