//! K_2^M(K)/ℓ by recursive tame splitting.
//!
//! For a Laurent layer k((t)), K_2/ℓ = K_2(k)/ℓ ⊕ K_1(k)/ℓ; K_2 of a finite
//! field vanishes; over F_q(x) a class is its vector of tame components at
//! the places, each identified with Z/ℓ through the norm to F_q. A class is
//! stored flat, keyed by [`K2Key`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::fields::{BasisIndex, Context, Elem, FieldError, FieldTower, KClass, Poly};
use crate::linalg_fl::{self, FlVector, IndexedBasis, LinalgError, Subspace, MAX_ENUM_DIM};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum K2Key {
    /// Tame component at a place of the rational base.
    Place(Place),
    /// Tame component of Laurent layer `layer`, a K_1 class of its residue field.
    Tame { layer: usize, index: BasisIndex },
}

pub type K2Class = FlVector<K2Key>;

/// `Literal` is K_2/ℓ itself. `Model` keeps only Laurent tame components
/// whose residue class lies in the context, i.e. the quotient of K_2/ℓ by
/// the part no context computation can see.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum K2Mode {
    Literal,
    Model,
}

fn norm_class(k: &FieldTower, a: &Poly, p: &Poly) -> u8 {
    let n = k.poly_ring().norm_mod(a, p);
    (k.dlog(n) % k.ell() as u32) as u8
}

// {b1, b2} for basis labels of the rational base.
fn base_pair(k: &FieldTower, b1: &BasisIndex, b2: &BasisIndex) -> K2Class {
    let ell = k.ell();
    let mut out = K2Class::zero();
    match (b1, b2) {
        (BasisIndex::Zeta, BasisIndex::Irred(p)) | (BasisIndex::Irred(p), BasisIndex::Zeta) => {
            let d = (p.deg() % ell as usize) as u8;
            let d = if matches!(b1, BasisIndex::Zeta) { d } else { linalg_fl::neg_mod(d, ell) };
            out.set(K2Key::Place(Place::Finite(p.clone())), d, ell);
            out.set(K2Key::Place(Place::Infinity), linalg_fl::neg_mod(d, ell), ell);
        }
        (BasisIndex::Irred(p), BasisIndex::Irred(q)) if p != q => {
            // at P: 1/Q; at Q: P; at ∞ a unit with residue (−1)^{deg P deg Q}, of class 0
            out.set(K2Key::Place(Place::Finite(p.clone())), linalg_fl::neg_mod(norm_class(k, q, p), ell), ell);
            out.set(K2Key::Place(Place::Finite(q.clone())), norm_class(k, p, q), ell);
            let minus = k.class_of_at(0, &k.constant_at(0, k.field().neg(1))).expect("unit");
            let s = ((p.deg() * q.deg()) % ell as usize) as u8;
            let m = minus.get(&BasisIndex::Zeta);
            out.add_at(K2Key::Place(Place::Infinity), (s as u16 * m as u16 % ell as u16) as u8, ell);
        }
        _ => {}
    }
    out
}

fn below(c: &KClass, level: usize) -> KClass {
    let mut r = c.clone();
    r.retain(|b| !matches!(b, BasisIndex::Var(j) if *j >= level));
    r
}

fn symbol_at(k: &FieldTower, level: usize, x: &KClass, y: &KClass) -> K2Class {
    let ell = k.ell();
    if level == 0 {
        let mut out = K2Class::zero();
        if !k.is_rational() {
            return out;
        }
        for (b1, c1) in x.iter() {
            for (b2, c2) in y.iter() {
                let c = (c1 as u16 * c2 as u16 % ell as u16) as u8;
                out = out.add(&base_pair(k, b1, b2).scale(c, ell), ell);
            }
        }
        return out;
    }
    let var = BasisIndex::Var(level - 1);
    let (a, b) = (x.get(&var), y.get(&var));
    let (xu, yu) = (below(x, level - 1), below(y, level - 1));
    let mut out = symbol_at(k, level - 1, &xu, &yu);
    let minus = k.class_of_at(0, &k.constant_at(0, k.field().neg(1))).expect("unit");
    let tame = xu
        .scale(b, ell)
        .sub(&yu.scale(a, ell), ell)
        .add(&minus.scale((a as u16 * b as u16 % ell as u16) as u8, ell), ell);
    for (idx, c) in tame.iter() {
        out.set(K2Key::Tame { layer: level - 1, index: idx.clone() }, c, ell);
    }
    out
}

/// {x, y} for classes of the whole tower.
pub fn symbol(k: &FieldTower, x: &KClass, y: &KClass) -> K2Class {
    symbol_at(k, k.top(), x, y)
}

/// {x, y} for nonzero elements.
pub fn symbol_of(k: &FieldTower, x: &Elem, y: &Elem) -> Result<K2Class, FieldError> {
    Ok(symbol(k, &k.class_of(x)?, &k.class_of(y)?))
}

/// Weil reciprocity: the place components of a rational-base class sum to zero.
pub fn reciprocity_check(k: &FieldTower, c: &K2Class) -> bool {
    let ell = k.ell();
    let total = c.iter().filter(|(key, _)| matches!(key, K2Key::Place(_))).fold(0u8, |s, (_, v)| (s + v) % ell);
    total == 0
}

/// Key basis of the model quotient: layer j carries the context classes of its residue field.
pub fn model_keys(ctx: &Context) -> IndexedBasis<K2Key> {
    let layers = ctx.labels().iter().filter(|b| matches!(b, BasisIndex::Var(_))).count();
    let mut keys = Vec::new();
    for layer in 0..layers {
        for b in ctx.labels() {
            if !matches!(b, BasisIndex::Var(j) if *j >= layer) {
                keys.push(K2Key::Tame { layer, index: b.clone() });
            }
        }
    }
    IndexedBasis::new(keys)
}

/// Bilinear table M[i][j] = {b_i, b_j} over a context, as dense key vectors.
#[derive(Clone, Debug)]
pub struct K2Table {
    pub mode: K2Mode,
    ell: u8,
    n: usize,
    keys: IndexedBasis<K2Key>,
    m: Vec<Vec<u8>>,
}

impl K2Table {
    pub fn new(k: &FieldTower, ctx: &Context, mode: K2Mode) -> Self {
        let n = ctx.dim();
        let ell = k.ell();
        let sparse: Vec<K2Class> = (0..n * n)
            .map(|ij| symbol(k, &KClass::unit(ctx.label(ij / n).clone()), &KClass::unit(ctx.label(ij % n).clone())))
            .collect();
        let keys = match mode {
            K2Mode::Model => model_keys(ctx),
            K2Mode::Literal => {
                let all: BTreeSet<K2Key> = sparse.iter().flat_map(|c| c.support().cloned().collect::<Vec<_>>()).collect();
                IndexedBasis::new(all.into_iter().collect())
            }
        };
        let m = sparse.iter().map(|c| keys.project(c)).collect();
        Self { mode, ell, n, keys, m }
    }

    pub fn keys(&self) -> &IndexedBasis<K2Key> {
        &self.keys
    }

    pub fn key_dim(&self) -> usize {
        self.keys.dim()
    }

    pub fn ctx_dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &[u8] {
        &self.m[i * self.n + j]
    }

    pub fn sym(&self, x: &[u8], y: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; self.key_dim()];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    linalg_fl::axpy(&mut out, (xi as u16 * yj as u16 % self.ell as u16) as u8, self.entry(i, j), self.ell);
                }
            }
        }
        out
    }

    /// The images {x, b_j} for every basis vector b_j.
    pub fn sym_map(&self, x: &[u8]) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|j| {
                let mut out = vec![0u8; self.key_dim()];
                for (i, &xi) in x.iter().enumerate() {
                    if xi != 0 {
                        linalg_fl::axpy(&mut out, xi, self.entry(i, j), self.ell);
                    }
                }
                out
            })
            .collect()
    }

    /// The degree-2 part of the ideal generated by T: span{t, b_j}.
    pub fn ideal(&self, t: &Subspace) -> Subspace {
        let gens: Vec<Vec<u8>> = t.rows().iter().flat_map(|r| self.sym_map(r)).collect();
        Subspace::span_unchecked(self.ell, self.key_dim(), gens)
    }
}

/// The wedge comparison map ∧²(context) → K_2/ℓ.
#[derive(Clone, Debug)]
pub struct K2Presentation {
    pub pairs: Vec<(usize, usize)>,
    pub images: Vec<K2Class>,
    pub keys: IndexedBasis<K2Key>,
    pub matrix: Vec<Vec<u8>>,
    pub rank: usize,
    /// Relations among the pairs, in pair coordinates.
    pub kernel: Subspace,
}

pub fn k2_presentation(k: &FieldTower, ctx: &Context) -> Result<K2Presentation, LinalgError> {
    let n = ctx.dim();
    if n > MAX_ENUM_DIM {
        return Err(LinalgError::TooLarge { count: n as u128, cap: MAX_ENUM_DIM as u128 });
    }
    let table = K2Table::new(k, ctx, K2Mode::Literal);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let matrix: Vec<Vec<u8>> = pairs.iter().map(|&(i, j)| table.entry(i, j).to_vec()).collect();
    let images = matrix.iter().map(|v| table.keys().to_sparse(v, k.ell())).collect();
    let rank = linalg_fl::rank(k.ell(), &matrix);
    let kernel = linalg_fl::linear_relations(k.ell(), table.key_dim(), &matrix);
    Ok(K2Presentation { pairs, images, keys: table.keys().clone(), matrix, rank, kernel })
}

/// {x, y} modulo the ideal generated by T, in the literal table over the context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientClass {
    pub reduced: Vec<u8>,
    pub is_zero: bool,
}

pub fn symbol_mod_t(k: &FieldTower, ctx: &Context, t: &Subspace, x: &[u8], y: &[u8]) -> Result<QuotientClass, LinalgError> {
    if t.ambient() != ctx.dim() || x.len() != ctx.dim() || y.len() != ctx.dim() {
        return Err(LinalgError::ContextMismatch(format!("{}", ctx.dim()), format!("{}", t.ambient())));
    }
    let table = K2Table::new(k, ctx, K2Mode::Literal);
    let reduced = table.ideal(t).reduce(&table.sym(x, y));
    let is_zero = linalg_fl::is_zero(&reduced);
    Ok(QuotientClass { reduced, is_zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Base;

    fn f7x() -> FieldTower {
        FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec![]).unwrap()
    }

    fn cls(k: &FieldTower, s: &str) -> KClass {
        k.class_of(&k.parse_elem(s).unwrap()).unwrap()
    }

    #[test]
    fn tame_components_over_rational_base() {
        let k = f7x();
        assert!(symbol(&k, &cls(&k, "x"), &cls(&k, "x+1")).is_zero());
        let s = symbol(&k, &cls(&k, "x"), &cls(&k, "x-3"));
        assert_eq!(s.get(&K2Key::Place(Place::Finite(k.parse_poly("x").unwrap()))), 2);
        assert_eq!(s.get(&K2Key::Place(Place::Finite(k.parse_poly("x-3").unwrap()))), 1);
        assert!(reciprocity_check(&k, &s));
        let z = symbol(&k, &cls(&k, "3"), &cls(&k, "x^2+1"));
        assert_eq!(z.get(&K2Key::Place(Place::Infinity)), 1);
        assert!(reciprocity_check(&k, &z));
    }

    #[test]
    fn presentations() {
        let k = FieldTower::new(3, 7, Base::Finite, vec!["s".into(), "t".into()]).unwrap();
        let p = k2_presentation(&k, &k.default_context()).unwrap();
        assert_eq!((p.rank, p.kernel.dim()), (3, 0));
        let f7 = FieldTower::new(3, 7, Base::Finite, vec![]).unwrap();
        let p = k2_presentation(&f7, &f7.default_context()).unwrap();
        assert_eq!((p.pairs.len(), p.rank), (0, 0));
        let k = f7x();
        let ctx = k.context(&[k.parse_poly("x").unwrap(), k.parse_poly("x+1").unwrap()]).unwrap();
        let p = k2_presentation(&k, &ctx).unwrap();
        assert_eq!(p.rank, 2);
        assert!(p.kernel.contains(&[0, 0, 1]));
    }

    #[test]
    fn tame_layer_matches_element_tame_symbol() {
        let k = FieldTower::new(3, 7, Base::Finite, vec!["t".into()]).unwrap();
        let (t, five) = (k.parse_elem("t").unwrap(), k.parse_elem("5").unwrap());
        let s = symbol_of(&k, &t, &five).unwrap();
        let tame = k.tame_symbol(&t, &five).unwrap();
        assert_eq!(s.get(&K2Key::Tame { layer: 0, index: BasisIndex::Zeta }), tame.get(&BasisIndex::Zeta));
    }

    #[test]
    fn quotients() {
        let k = FieldTower::new(3, 7, Base::Finite, vec!["s".into(), "t".into()]).unwrap();
        let ctx = k.default_context();
        let t = Subspace::span(3, 3, &[vec![1, 0, 0]]).unwrap();
        assert!(!symbol_mod_t(&k, &ctx, &t, &[0, 1, 0], &[0, 0, 1]).unwrap().is_zero);
        assert!(symbol_mod_t(&k, &ctx, &t, &[0, 1, 1], &[1, 0, 0]).unwrap().is_zero);
        let k = f7x();
        let ctx = k.context(&[k.parse_poly("x").unwrap(), k.parse_poly("x+1").unwrap()]).unwrap();
        let t = k.parse_subgroup(&ctx, "x+1").unwrap();
        assert!(symbol_mod_t(&k, &ctx, &t, &[0, 1, 0], &[0, 0, 1]).unwrap().is_zero);
    }

    #[test]
    fn model_dimension() {
        let k = FieldTower::new(3, 7, Base::Rational { var: "x".into() }, vec!["s".into(), "t".into()]).unwrap();
        let ctx = k.context(&[k.parse_poly("x").unwrap()]).unwrap();
        // base context {ζ, x}: layer 0 sees 2 classes, layer 1 sees 3
        assert_eq!(model_keys(&ctx).dim(), 5);
    }

    #[test]
    fn place_components_are_already_norms() {
        // {ζ, x²+1}: component 2 at the quadratic place and 1 at ∞
        let k = f7x();
        let z = symbol(&k, &cls(&k, "3"), &cls(&k, "x^2+1"));
        let plain: u32 = z.iter().map(|(_, c)| c as u32).sum();
        let weighted: u32 = z
            .iter()
            .map(|(key, c)| match key {
                K2Key::Place(Place::Finite(p)) => c as u32 * p.deg() as u32,
                _ => c as u32,
            })
            .sum();
        assert_eq!(plain % 3, 0);
        assert_eq!(weighted % 3, 2);
    }
}
