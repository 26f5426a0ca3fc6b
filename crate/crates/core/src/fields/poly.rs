//! Univariate polynomials over F_q and their factorization.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ff::FiniteField;

/// Coefficients low degree first, no trailing zeros; the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly(Vec<u32>);

impl Ord for Poly {
    /// Degree first, then coefficients from the top down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![1])
    }

    pub fn constant(c: u32) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// X itself.
    pub fn x() -> Self {
        Poly(vec![0, 1])
    }

    pub fn from_coeffs(mut c: Vec<u32>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly(c)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [1]
    }

    /// Degree; −1 for zero.
    pub fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn deg(&self) -> usize {
        assert!(!self.is_zero(), "degree of zero polynomial");
        self.0.len() - 1
    }

    pub fn lc(&self) -> u32 {
        *self.0.last().unwrap_or(&0)
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }

    /// Human-readable form with integer coefficients as encodings.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for i in (0..self.0.len()).rev() {
            let c = self.0[i];
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        parts.join("+")
    }
}

/// Polynomial arithmetic over a fixed field.
#[derive(Clone, Copy)]
pub struct PolyRing<'a> {
    pub f: &'a FiniteField,
}

impl<'a> PolyRing<'a> {
    pub fn new(f: &'a FiniteField) -> Self {
        Self { f }
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.0.len().max(b.0.len());
        Poly::from_coeffs((0..n).map(|i| self.f.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly(a.0.iter().map(|&c| self.f.neg(c)).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly, c: u32) -> Poly {
        Poly::from_coeffs(a.0.iter().map(|&x| self.f.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u32; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = self.f.add(out[i + j], self.f.mul(x, y));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, a: &Poly, mut e: u64) -> Poly {
        let mut base = a.clone();
        let mut r = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        r
    }

    pub fn divrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        assert!(!b.is_zero(), "division by zero polynomial");
        if a.0.len() < b.0.len() {
            return (Poly::zero(), a.clone());
        }
        let db = b.deg();
        let inv = self.f.inv(b.lc());
        let mut r = a.0.clone();
        let mut q = vec![0u32; a.0.len() - db];
        for i in (db..r.len()).rev() {
            let c = self.f.mul(r[i], inv);
            if c == 0 {
                continue;
            }
            q[i - db] = c;
            for j in 0..=db {
                r[i - db + j] = self.f.sub(r[i - db + j], self.f.mul(c, b.0[j]));
            }
        }
        r.truncate(db);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Poly {
        self.divrem(a, b).1
    }

    /// Exact quotient; panics if `b` does not divide `a`.
    pub fn div_exact(&self, a: &Poly, b: &Poly) -> Poly {
        let (q, r) = self.divrem(a, b);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        self.scale(a, self.f.inv(a.lc()))
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Inverse of `a` modulo `m` (requires coprimality).
    pub fn inv_mod(&self, a: &Poly, m: &Poly) -> Option<Poly> {
        let (mut r0, mut r1) = (m.clone(), self.rem(a, m));
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1);
            let s = self.sub(&s0, &self.mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != 0 {
            return None;
        }
        let c = self.f.inv(r0.lc());
        Some(self.rem(&self.scale(&s0, c), m))
    }

    pub fn mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.rem(&self.mul(a, b), m)
    }

    pub fn powmod(&self, a: &Poly, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(a, m);
        let mut r = self.rem(&Poly::one(), m);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mulmod(&r, &base, m);
            }
            base = self.mulmod(&base, &base, m);
            e >>= 1;
        }
        r
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        Poly::from_coeffs(a.0.iter().enumerate().skip(1).map(|(i, &c)| self.f.mul(self.f.from_int(i as i64), c)).collect())
    }

    pub fn eval(&self, a: &Poly, x: u32) -> u32 {
        a.0.iter().rev().fold(0, |acc, &c| self.f.add(self.f.mul(acc, x), c))
    }

    /// N_{k(P)/k}(a mod P) for monic irreducible `p`, as the product of the Frobenius conjugates.
    pub fn norm_mod(&self, a: &Poly, p: &Poly) -> u32 {
        let d = p.deg();
        let mut t = self.rem(a, p);
        assert!(!t.is_zero(), "norm of an element divisible by the modulus");
        let mut prod = t.clone();
        for _ in 1..d {
            t = self.powmod(&t, self.f.q() as u64, p);
            prod = self.mulmod(&prod, &t, p);
        }
        assert!(prod.degree() == 0, "norm must be a constant");
        prod.lc()
    }

    fn pth_root_poly(&self, a: &Poly) -> Poly {
        let p = self.f.p() as usize;
        Poly::from_coeffs((0..a.0.len()).step_by(p).map(|i| self.f.pth_root(a.0[i])).collect())
    }

    /// Square-free decomposition of a monic polynomial: pairs (factor, multiplicity).
    pub fn square_free(&self, a: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if a.degree() <= 0 {
            return out;
        }
        let d = self.derivative(a);
        let mut c = self.gcd(a, &d);
        let mut w = self.div_exact(a, &c);
        let mut i = 1;
        while !w.is_one() {
            let y = self.gcd(&w, &c);
            let fac = self.div_exact(&w, &y);
            if !fac.is_one() {
                out.push((fac, i));
            }
            w = y;
            c = self.div_exact(&c, &w);
            i += 1;
        }
        if !c.is_one() {
            let root = self.pth_root_poly(&c);
            let p = self.f.p() as usize;
            for (g, m) in self.square_free(&root) {
                out.push((g, m * p));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    pub fn distinct_degree(&self, a: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut f = a.clone();
        let x = Poly::x();
        let mut h = self.rem(&x, &f);
        let mut d = 1;
        while f.degree() >= 2 * d as i64 {
            h = self.powmod(&h, self.f.q() as u64, &f);
            let g = self.gcd(&self.sub(&h, &x), &f);
            if !g.is_one() {
                f = self.div_exact(&f, &g);
                h = self.rem(&h, &f);
                out.push((g, d));
            }
            d += 1;
        }
        if f.degree() > 0 {
            let n = f.deg();
            out.push((f, n));
        }
        out
    }

    /// Splits a monic product of distinct irreducibles of degree `d` (odd q).
    pub fn equal_degree(&self, a: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        let n = a.deg();
        if n == d {
            return vec![a.clone()];
        }
        let q = self.f.q();
        assert!(q % 2 == 1, "equal-degree splitting implemented for odd q");
        loop {
            let r = Poly::from_coeffs((0..n).map(|_| rng.gen_range(0..q)).collect());
            if r.degree() < 1 {
                continue;
            }
            // r^((q^d − 1)/2) = N(r)^((q − 1)/2), N the product of the d Frobenius conjugates.
            let mut t = self.rem(&r, a);
            let mut prod = t.clone();
            for _ in 1..d {
                t = self.powmod(&t, q as u64, a);
                prod = self.mulmod(&prod, &t, a);
            }
            let b = self.powmod(&prod, ((q - 1) / 2) as u64, a);
            let g = self.gcd(&self.sub(&b, &Poly::one()), a);
            if g.degree() > 0 && g.degree() < n as i64 {
                let h = self.div_exact(a, &g);
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&h, d, rng));
                return out;
            }
        }
    }

    /// Full factorization: (leading coefficient, sorted monic irreducible factors with multiplicity).
    pub fn factor(&self, a: &Poly) -> (u32, Vec<(Poly, usize)>) {
        assert!(!a.is_zero(), "factor of zero");
        let lc = a.lc();
        let m = self.monic(a);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
        let mut out: Vec<(Poly, usize)> = Vec::new();
        for (sf, mult) in self.square_free(&m) {
            for (g, d) in self.distinct_degree(&sf) {
                for irr in self.equal_degree(&g, d, &mut rng) {
                    out.push((irr, mult));
                }
            }
        }
        out.sort();
        // merge equal factors coming from different square-free layers
        let mut merged: Vec<(Poly, usize)> = Vec::new();
        for (p, e) in out {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        (lc, merged)
    }

    pub fn is_irreducible(&self, a: &Poly) -> bool {
        if a.degree() < 1 {
            return false;
        }
        let (_, fs) = self.factor(a);
        fs.len() == 1 && fs[0].1 == 1
    }

    /// Monic polynomials of exact degree `d` in the canonical order.
    pub fn monics_of_degree(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.f.q() as u64;
        let total = q.pow(d as u32);
        (0..total).map(move |mut idx| {
            let mut c = vec![0u32; d + 1];
            c[d] = 1;
            for i in (0..d).rev() {
                c[i] = (idx % q) as u32;
                idx /= q;
            }
            Poly(c)
        })
    }

    /// Monic irreducibles of degree 1..=max_deg in the canonical order.
    pub fn irreducibles_up_to(&self, max_deg: usize) -> Vec<Poly> {
        (1..=max_deg).flat_map(|d| self.monics_of_degree(d).filter(|p| self.is_irreducible(p)).collect::<Vec<_>>()).collect()
    }
}
