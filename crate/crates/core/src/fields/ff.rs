//! Small finite fields F_q, q = p^k ≤ 2¹⁶, with exp/log tables.
//!
//! An element is encoded as the integer whose base-p digits are its
//! coefficients in F_p[X]/(m), m the first monic irreducible of degree k in
//! encoding order.

use super::FieldError;

pub const MAX_Q: u32 = 1 << 16;

#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    g: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl std::fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense F_p polynomial helpers used only while building tables.
fn pmulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let k = m.len() - 1;
    for i in (k..prod.len()).rev() {
        let c = prod[i];
        if c != 0 {
            for j in 0..=k {
                prod[i - k + j] = (prod[i - k + j] + p - c * m[j] % p) % p;
            }
        }
    }
    prod.truncate(k);
    prod
}

fn encode(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn decode(mut x: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

impl FiniteField {
    pub fn new(q: u32) -> Result<Self, FieldError> {
        if q > MAX_Q {
            return Err(FieldError::TooLarge(format!("q = {q} exceeds {MAX_Q}")));
        }
        let (p, k) = prime_power(q).ok_or_else(|| FieldError::BadModulus(format!("{q} is not a prime power")))?;
        let modulus: Vec<u32> = if k == 1 {
            vec![0, 1]
        } else {
            (0..p.pow(k))
                .map(|low| {
                    let mut m = decode(low, p, k);
                    m.push(1);
                    m
                })
                .find(|m| m[0] != 0 && is_irreducible_fp(m, p))
                .expect("irreducible polynomials exist in every degree")
        };
        let mul = |a: u32, b: u32| -> u32 {
            if k == 1 {
                (a as u64 * b as u64 % p as u64) as u32
            } else {
                encode(&pmulmod(&decode(a, p, k), &decode(b, p, k), &modulus, p), p)
            }
        };
        let pow = |mut a: u32, mut e: u64| -> u32 {
            let mut r = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    r = mul(r, a);
                }
                a = mul(a, a);
                e >>= 1;
            }
            r
        };
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let g = (1..q)
            .find(|&c| factors.iter().all(|&r| pow(c, order / r) != 1) && (q == 2 || pow(c, order) == 1))
            .expect("F_q^× is cyclic");
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = 1u32;
        for i in 0..q - 1 {
            exp[i as usize] = cur;
            log[cur as usize] = i;
            cur = mul(cur, g);
        }
        Ok(Self { p, k, q, g, exp, log })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// The fixed primitive element (smallest encoding).
    pub fn generator(&self) -> u32 {
        self.g
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else {
            let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
            while a > 0 || b > 0 {
                out += ((a % self.p + b % self.p) % self.p) * place;
                a /= self.p;
                b /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let (mut a, mut out, mut place) = (a, 0, 1);
            while a > 0 {
                out += ((self.p - a % self.p) % self.p) * place;
                a /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        let n = self.q - 1;
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let l = self.log[a as usize];
        self.exp[((self.q - 1 - l) % (self.q - 1)) as usize]
    }

    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, e: i64) -> u32 {
        if a == 0 {
            assert!(e > 0, "0 to a non-positive power");
            return 0;
        }
        let n = (self.q - 1) as i64;
        let l = (self.log[a as usize] as i64 * e.rem_euclid(n)).rem_euclid(n);
        self.exp[l as usize]
    }

    /// Discrete logarithm to base g, in `0..q-1`.
    pub fn dlog(&self, a: u32) -> u32 {
        assert!(a != 0 && a < self.q, "dlog of zero");
        self.log[a as usize]
    }

    /// Embeds an integer through its residue mod p.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// p-th root (inverse Frobenius).
    pub fn pth_root(&self, a: u32) -> u32 {
        if self.k == 1 {
            a
        } else {
            let mut r = a;
            for _ in 0..self.k - 1 {
                r = self.pow(r, self.p as i64);
            }
            r
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    pub fn units(&self) -> impl Iterator<Item = u32> {
        1..self.q
    }
}

fn is_irreducible_fp(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    if k <= 1 {
        return true;
    }
    // No factor of degree ≤ k/2: trial division by all monic polynomials.
    for d in 1..=k / 2 {
        for low in 0..p.pow(d as u32) {
            let mut f = decode(low, p, d as u32);
            f.push(1);
            // remainder of m mod f
            let mut r = m.to_vec();
            for i in (d..r.len()).rev() {
                let c = r[i];
                if c != 0 {
                    for j in 0..=d {
                        r[i - d + j] = (r[i - d + j] + p - c * f[j] % p) % p;
                    }
                }
            }
            if r[..d].iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f7_tables() {
        let f = FiniteField::new(7).unwrap();
        assert_eq!(f.generator(), 3);
        assert_eq!(f.dlog(3), 1);
        assert_eq!(f.dlog(1), 0);
        assert_eq!(f.dlog(5), 5);
        assert_eq!(f.pow(3, 2), 2);
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn prime_power_fields() {
        let f = FiniteField::new(25).unwrap();
        assert_eq!((f.p(), f.degree()), (5, 2));
        for a in 1..25 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.add(a, f.neg(a)), 0);
            assert_eq!(f.pth_root(f.pow(a, 5)), a);
        }
        // distributivity on a sample
        for a in 0..25 {
            for b in 0..25 {
                let c = 7;
                assert_eq!(f.mul(f.add(a, b), c), f.add(f.mul(a, c), f.mul(b, c)));
            }
        }
        assert!(FiniteField::new(6).is_err());
        assert!(FiniteField::new(1 << 17).is_err());
    }
}
