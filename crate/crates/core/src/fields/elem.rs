//! Field elements of a tower: F_q residues, reduced rational functions, and
//! finite Laurent sums with an optional truncation precision.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::poly::{Poly, PolyRing};
use super::{Base, FieldError, FieldTower};

/// `num/den` with `den` monic and coprime to `num`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

/// Σ coeff·t^exp, exact when `prec` is `None`, otherwise known only below `prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Series {
    pub terms: BTreeMap<i64, Elem>,
    pub prec: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Elem {
    Fq(u32),
    Rat(RatFn),
    Ser(Series),
}

impl Elem {
    pub fn as_fq(&self) -> u32 {
        match self {
            Elem::Fq(a) => *a,
            other => panic!("expected an F_q residue, got {other:?}"),
        }
    }

    pub fn as_rat(&self) -> &RatFn {
        match self {
            Elem::Rat(r) => r,
            other => panic!("expected a rational function, got {other:?}"),
        }
    }

    pub fn as_series(&self) -> &Series {
        match self {
            Elem::Ser(s) => s,
            other => panic!("expected a Laurent series, got {other:?}"),
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            Elem::Ser(s) => s.prec.is_none() && s.terms.values().all(Elem::is_exact),
            _ => true,
        }
    }
}

impl FieldTower {
    /// Number of Laurent layers; elements of the whole tower live at this level.
    pub fn top(&self) -> usize {
        self.vars.len()
    }

    fn ring(&self) -> PolyRing<'_> {
        PolyRing::new(&self.fq)
    }

    pub fn rat(&self, num: Poly, den: Poly) -> Result<RatFn, FieldError> {
        if den.is_zero() {
            return Err(FieldError::ZeroElement("zero denominator".into()));
        }
        let r = self.ring();
        let g = r.gcd(&num, &den);
        let (num, den) = (r.div_exact(&num, &g), r.div_exact(&den, &g));
        let c = self.fq.inv(den.lc());
        Ok(RatFn { num: r.scale(&num, c), den: r.scale(&den, c) })
    }

    pub fn zero_at(&self, level: usize) -> Elem {
        if level == 0 {
            match self.base {
                Base::Finite => Elem::Fq(0),
                Base::Rational { .. } => Elem::Rat(RatFn { num: Poly::zero(), den: Poly::one() }),
            }
        } else {
            Elem::Ser(Series { terms: BTreeMap::new(), prec: None })
        }
    }

    pub fn constant_at(&self, level: usize, c: u32) -> Elem {
        if level == 0 {
            match self.base {
                Base::Finite => Elem::Fq(c),
                Base::Rational { .. } => Elem::Rat(RatFn { num: Poly::constant(c), den: Poly::one() }),
            }
        } else {
            self.monomial(level, 0, self.constant_at(level - 1, c))
        }
    }

    pub fn one_at(&self, level: usize) -> Elem {
        self.constant_at(level, 1)
    }

    /// `coeff · t^e` where t is the variable of `level` (≥ 1).
    pub fn monomial(&self, level: usize, e: i64, coeff: Elem) -> Elem {
        assert!(level >= 1);
        let mut terms = BTreeMap::new();
        if !self.is_zero_at(level - 1, &coeff) {
            terms.insert(e, coeff);
        }
        Elem::Ser(Series { terms, prec: None })
    }

    /// The Laurent variable of `level` as an element of `level`.
    pub fn var_elem(&self, level: usize) -> Elem {
        self.monomial(level, 1, self.one_at(level - 1))
    }

    /// Lifts an element of `from` into the (higher) level `to` as a constant series.
    pub fn lift(&self, from: usize, to: usize, a: Elem) -> Elem {
        let mut a = a;
        for lvl in from + 1..=to {
            a = self.monomial(lvl, 0, a);
        }
        a
    }

    pub fn is_zero_at(&self, level: usize, a: &Elem) -> bool {
        match a {
            Elem::Fq(x) => *x == 0,
            Elem::Rat(r) => r.num.is_zero(),
            Elem::Ser(s) => {
                let _ = level;
                s.terms.is_empty() && s.prec.is_none()
            }
        }
    }

    /// True when the element is known to be nonzero or known to vanish only up to precision.
    fn is_empty_series(a: &Elem) -> bool {
        matches!(a, Elem::Ser(s) if s.terms.is_empty())
    }

    pub fn add_at(&self, level: usize, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Fq(x), Elem::Fq(y)) => Elem::Fq(self.fq.add(*x, *y)),
            (Elem::Rat(x), Elem::Rat(y)) => {
                let r = self.ring();
                let num = r.add(&r.mul(&x.num, &y.den), &r.mul(&y.num, &x.den));
                let den = r.mul(&x.den, &y.den);
                Elem::Rat(self.rat(num, den).expect("nonzero denominator"))
            }
            (Elem::Ser(x), Elem::Ser(y)) => {
                let mut prec = min_opt(x.prec, y.prec);
                let mut terms = BTreeMap::new();
                let keys: std::collections::BTreeSet<i64> = x.terms.keys().chain(y.terms.keys()).copied().collect();
                for e in keys {
                    if prec.is_some_and(|p| e >= p) {
                        break;
                    }
                    let c = match (x.terms.get(&e), y.terms.get(&e)) {
                        (Some(u), Some(v)) => self.add_at(level - 1, u, v),
                        (Some(u), None) => u.clone(),
                        (None, Some(v)) => v.clone(),
                        (None, None) => unreachable!(),
                    };
                    push_term(&mut terms, &mut prec, e, c, self, level);
                }
                Elem::Ser(Series { terms, prec })
            }
            _ => panic!("mismatched element kinds at level {level}"),
        }
    }

    #[allow(clippy::only_used_in_recursion)]
    pub fn neg_at(&self, level: usize, a: &Elem) -> Elem {
        match a {
            Elem::Fq(x) => Elem::Fq(self.fq.neg(*x)),
            Elem::Rat(x) => Elem::Rat(RatFn { num: self.ring().neg(&x.num), den: x.den.clone() }),
            Elem::Ser(s) => Elem::Ser(Series {
                terms: s.terms.iter().map(|(&e, c)| (e, self.neg_at(level - 1, c))).collect(),
                prec: s.prec,
            }),
        }
    }

    pub fn sub_at(&self, level: usize, a: &Elem, b: &Elem) -> Elem {
        self.add_at(level, a, &self.neg_at(level, b))
    }

    pub fn mul_at(&self, level: usize, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Fq(x), Elem::Fq(y)) => Elem::Fq(self.fq.mul(*x, *y)),
            (Elem::Rat(x), Elem::Rat(y)) => {
                let r = self.ring();
                Elem::Rat(self.rat(r.mul(&x.num, &y.num), r.mul(&x.den, &y.den)).expect("nonzero denominator"))
            }
            (Elem::Ser(x), Elem::Ser(y)) => {
                let vx = x.terms.keys().next().copied().or(x.prec);
                let vy = y.terms.keys().next().copied().or(y.prec);
                // product known below min(v(x)+prec(y), v(y)+prec(x))
                let mut prec = match (vx, vy) {
                    (Some(vx), Some(vy)) => min_opt(x.prec.map(|p| p + vy), y.prec.map(|p| p + vx)),
                    _ => None,
                };
                let mut acc: BTreeMap<i64, Elem> = BTreeMap::new();
                for (&e1, c1) in &x.terms {
                    for (&e2, c2) in &y.terms {
                        let e = e1 + e2;
                        if prec.is_some_and(|p| e >= p) {
                            continue;
                        }
                        let c = self.mul_at(level - 1, c1, c2);
                        let slot = acc.remove(&e);
                        let v = match slot {
                            Some(s) => self.add_at(level - 1, &s, &c),
                            None => c,
                        };
                        acc.insert(e, v);
                    }
                }
                let mut terms = BTreeMap::new();
                for (e, c) in acc {
                    if prec.is_some_and(|p| e >= p) {
                        break;
                    }
                    push_term(&mut terms, &mut prec, e, c, self, level);
                }
                Elem::Ser(Series { terms, prec })
            }
            _ => panic!("mismatched element kinds at level {level}"),
        }
    }

    pub fn pow_at(&self, level: usize, a: &Elem, e: i64) -> Result<Elem, FieldError> {
        let base = if e < 0 { self.inv_at(level, a)? } else { a.clone() };
        let mut r = self.one_at(level);
        for _ in 0..e.unsigned_abs() {
            r = self.mul_at(level, &r, &base);
        }
        Ok(r)
    }

    /// Inverse where it is representable exactly: F_q, rational functions and
    /// single-term series with invertible coefficient.
    pub fn inv_at(&self, level: usize, a: &Elem) -> Result<Elem, FieldError> {
        match a {
            Elem::Fq(0) => Err(FieldError::ZeroElement("inverse of 0".into())),
            Elem::Fq(x) => Ok(Elem::Fq(self.fq.inv(*x))),
            Elem::Rat(x) => {
                if x.num.is_zero() {
                    return Err(FieldError::ZeroElement("inverse of 0".into()));
                }
                Ok(Elem::Rat(self.rat(x.den.clone(), x.num.clone())?))
            }
            Elem::Ser(s) => {
                if s.terms.len() != 1 || s.prec.is_some() {
                    return Err(FieldError::NotExact("only monomials of a Laurent layer invert exactly".into()));
                }
                let (&e, c) = s.terms.iter().next().unwrap();
                Ok(self.monomial(level, -e, self.inv_at(level - 1, c)?))
            }
        }
    }

    /// Lowest known exponent and its coefficient, failing when truncation hides it.
    pub fn leading(&self, level: usize, a: &Elem) -> Result<(i64, Elem), FieldError> {
        let s = a.as_series();
        match s.terms.iter().next() {
            Some((&e, c)) => {
                if s.prec.is_some_and(|p| e >= p) {
                    return Err(FieldError::PrecisionLoss(format!("leading term beyond precision at level {level}")));
                }
                Ok((e, c.clone()))
            }
            None if s.prec.is_some() => Err(FieldError::PrecisionLoss(format!("no known term at level {level}"))),
            None => Err(FieldError::ZeroElement(format!("zero series at level {level}"))),
        }
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

// Zero coefficients are dropped; a coefficient that is zero only up to its own
// truncation makes the outer series unknown from that exponent on.
fn push_term(terms: &mut BTreeMap<i64, Elem>, prec: &mut Option<i64>, e: i64, c: Elem, k: &FieldTower, level: usize) {
    if FieldTower::is_empty_series(&c) && matches!(&c, Elem::Ser(s) if s.prec.is_some()) {
        *prec = min_opt(*prec, Some(e));
        return;
    }
    if !k.is_zero_at(level - 1, &c) {
        terms.insert(e, c);
    }
}
