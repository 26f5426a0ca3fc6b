//! Exact linear algebra over the prime field F_ℓ.
//!
//! Vectors are dense `Vec<u8>` in the coordinates of an indexed basis; sparse
//! vectors keyed by basis labels ([`FlVector`]) convert to and from that form
//! through an [`IndexedBasis`]. Subspaces are kept in canonical reduced row
//! echelon form, so structural equality is subspace equality.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("vector has support outside the context: {0}")]
    OutOfContext(String),
    #[error("subspaces live in different ambient spaces ({0} vs {1})")]
    ContextMismatch(String, String),
    #[error("enumeration too large: {count} subspaces exceed cap {cap}")]
    TooLarge { count: u128, cap: u128 },
    #[error("unsupported modulus {0}: need an odd prime at most 13")]
    BadEll(u8),
}

pub const MAX_ELL: u8 = 13;
pub const MAX_ENUM_DIM: usize = 12;

pub fn check_ell(ell: u8) -> Result<(), LinalgError> {
    if (3..=MAX_ELL).contains(&ell) && is_prime(ell as u64) {
        Ok(())
    } else {
        Err(LinalgError::BadEll(ell))
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub fn inv_mod(a: u8, ell: u8) -> u8 {
    debug_assert!(!a.is_multiple_of(ell));
    let (a, m) = (a as u32 % ell as u32, ell as u32);
    let mut r = 1u32;
    for _ in 0..m - 2 {
        r = r * a % m;
    }
    r as u8
}

#[inline]
pub fn neg_mod(a: u8, ell: u8) -> u8 {
    (ell - a % ell) % ell
}

/// Reduces a signed integer into `0..ell`.
#[inline]
pub fn reduce_i64(a: i64, ell: u8) -> u8 {
    a.rem_euclid(ell as i64) as u8
}

/// `acc += c * v` in place.
#[inline]
pub fn axpy(acc: &mut [u8], c: u8, v: &[u8], ell: u8) {
    if c == 0 {
        return;
    }
    let (c, m) = (c as u16, ell as u16);
    for (a, &b) in acc.iter_mut().zip(v) {
        *a = ((*a as u16 + c * b as u16) % m) as u8;
    }
}

pub fn scale(v: &[u8], c: u8, ell: u8) -> Vec<u8> {
    v.iter().map(|&x| ((x as u16 * c as u16) % ell as u16) as u8).collect()
}

pub fn add(a: &[u8], b: &[u8], ell: u8) -> Vec<u8> {
    a.iter().zip(b).map(|(&x, &y)| (x + y) % ell).collect()
}

pub fn sub(a: &[u8], b: &[u8], ell: u8) -> Vec<u8> {
    a.iter().zip(b).map(|(&x, &y)| (x + ell - y) % ell).collect()
}

pub fn dot(a: &[u8], b: &[u8], ell: u8) -> u8 {
    let s: u32 = a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum();
    (s % ell as u32) as u8
}

pub fn is_zero(v: &[u8]) -> bool {
    v.iter().all(|&x| x == 0)
}

pub fn unit_vector(n: usize, i: usize) -> Vec<u8> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Scales `v` so its first nonzero entry is 1. Returns false for the zero vector.
pub fn normalize(v: &mut [u8], ell: u8) -> bool {
    match v.iter().position(|&x| x != 0) {
        None => false,
        Some(p) => {
            let inv = inv_mod(v[p], ell);
            for x in v.iter_mut() {
                *x = ((*x as u16 * inv as u16) % ell as u16) as u8;
            }
            true
        }
    }
}

/// Sparse vector over a basis labelled by `I`; zero entries are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FlVector<I: Ord> {
    entries: BTreeMap<I, u8>,
}

impl<I: Ord> Default for FlVector<I> {
    fn default() -> Self {
        Self { entries: BTreeMap::new() }
    }
}

impl<I: Ord + Clone> FlVector<I> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(i: I) -> Self {
        let mut v = Self::zero();
        v.entries.insert(i, 1);
        v
    }

    pub fn get(&self, i: &I) -> u8 {
        self.entries.get(i).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: I, c: u8, ell: u8) {
        let c = c % ell;
        if c == 0 {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, c);
        }
    }

    pub fn add_at(&mut self, i: I, c: u8, ell: u8) {
        let cur = self.get(&i);
        self.set(i, (cur + c % ell) % ell, ell);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&I, u8)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn support(&self) -> impl Iterator<Item = &I> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, other: &Self, ell: u8) -> Self {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.add_at(k.clone(), v, ell);
        }
        out
    }

    pub fn scale(&self, c: u8, ell: u8) -> Self {
        let mut out = Self::zero();
        for (k, v) in self.iter() {
            out.set(k.clone(), ((v as u16 * c as u16) % ell as u16) as u8, ell);
        }
        out
    }

    pub fn neg(&self, ell: u8) -> Self {
        self.scale(ell - 1, ell)
    }

    pub fn sub(&self, other: &Self, ell: u8) -> Self {
        self.add(&other.neg(ell), ell)
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&I) -> bool) {
        self.entries.retain(|k, _| keep(k));
    }
}

impl<I: Ord + fmt::Debug> fmt::Debug for FlVector<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

/// An ordered list of distinct basis labels with a position lookup.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexedBasis<I: Ord> {
    labels: Vec<I>,
    #[serde(skip)]
    pos: BTreeMap<I, usize>,
}

impl<I: Ord + Clone + fmt::Debug> IndexedBasis<I> {
    pub fn new(labels: Vec<I>) -> Self {
        let mut out = Self { labels: Vec::new(), pos: BTreeMap::new() };
        for l in labels {
            out.push(l);
        }
        out
    }

    /// Appends a label unless already present; returns its position.
    pub fn push(&mut self, label: I) -> usize {
        if let Some(&p) = self.pos.get(&label) {
            return p;
        }
        let p = self.labels.len();
        self.pos.insert(label.clone(), p);
        self.labels.push(label);
        p
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[I] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &I {
        &self.labels[i]
    }

    pub fn position(&self, label: &I) -> Option<usize> {
        self.pos.get(label).copied()
    }

    pub fn contains(&self, label: &I) -> bool {
        self.pos.contains_key(label)
    }

    pub fn to_dense(&self, v: &FlVector<I>) -> Result<Vec<u8>, LinalgError> {
        let mut out = vec![0; self.dim()];
        for (k, c) in v.iter() {
            match self.position(k) {
                Some(p) => out[p] = c,
                None => return Err(LinalgError::OutOfContext(format!("{k:?}"))),
            }
        }
        Ok(out)
    }

    /// Dense image with out-of-basis coordinates dropped.
    pub fn project(&self, v: &FlVector<I>) -> Vec<u8> {
        let mut out = vec![0; self.dim()];
        for (k, c) in v.iter() {
            if let Some(p) = self.position(k) {
                out[p] = c;
            }
        }
        out
    }

    pub fn to_sparse(&self, v: &[u8], ell: u8) -> FlVector<I> {
        let mut out = FlVector::zero();
        for (i, &c) in v.iter().enumerate() {
            out.set(self.labels[i].clone(), c, ell);
        }
        out
    }
}

impl<I: Ord + fmt::Debug> fmt::Debug for IndexedBasis<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

/// A subspace of F_ℓ^n in canonical reduced row echelon form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    ell: u8,
    ambient: usize,
    rows: Vec<Vec<u8>>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(F_{}^{}, {:?})", self.ell, self.ambient, self.rows)
    }
}

impl Subspace {
    pub fn zero(ell: u8, ambient: usize) -> Self {
        Self { ell, ambient, rows: Vec::new() }
    }

    pub fn full(ell: u8, ambient: usize) -> Self {
        Self { ell, ambient, rows: (0..ambient).map(|i| unit_vector(ambient, i)).collect() }
    }

    pub fn span(ell: u8, ambient: usize, gens: &[Vec<u8>]) -> Result<Self, LinalgError> {
        for g in gens {
            if g.len() != ambient {
                return Err(LinalgError::OutOfContext(format!(
                    "generator of length {} in ambient dimension {ambient}",
                    g.len()
                )));
            }
        }
        Ok(Self::span_unchecked(ell, ambient, gens.to_vec()))
    }

    pub(crate) fn span_unchecked(ell: u8, ambient: usize, mut rows: Vec<Vec<u8>>) -> Self {
        rref(&mut rows, ell);
        Self { ell, ambient, rows }
    }

    pub fn ell(&self) -> u8 {
        self.ell
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect()
    }

    /// Remainder of `v` after clearing the pivot columns; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let mut out = v.to_vec();
        for r in &self.rows {
            let p = r.iter().position(|&x| x != 0).unwrap();
            if out[p] != 0 {
                let c = neg_mod(out[p], self.ell);
                axpy(&mut out, c, r, self.ell);
            }
        }
        out
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        is_zero(&self.reduce(v))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.rows.iter().all(|r| other.contains(r))
    }

    fn check_same(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ell != other.ell || self.ambient != other.ambient {
            return Err(LinalgError::ContextMismatch(
                format!("F_{}^{}", self.ell, self.ambient),
                format!("F_{}^{}", other.ell, other.ambient),
            ));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self::span_unchecked(self.ell, self.ambient, rows))
    }

    pub fn with_vector(&self, v: &[u8]) -> Subspace {
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        Self::span_unchecked(self.ell, self.ambient, rows)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same(other)?;
        let s = self.annihilator().sum(&other.annihilator())?;
        Ok(s.annihilator())
    }

    /// `{f : f·a = 0 for all a}` under the coordinate dot product.
    pub fn annihilator(&self) -> Subspace {
        let n = self.ambient;
        let pivots = self.pivots();
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut gens = Vec::with_capacity(n - pivots.len());
        for f in (0..n).filter(|&j| !is_pivot[j]) {
            let mut v = vec![0u8; n];
            v[f] = 1;
            for (r, &p) in self.rows.iter().zip(&pivots) {
                v[p] = neg_mod(r[f], self.ell);
            }
            gens.push(v);
        }
        Self::span_unchecked(self.ell, n, gens)
    }

    /// Coordinates of every element, in a fixed order (ℓ^dim vectors).
    pub fn vectors(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        let d = self.dim();
        let total = (self.ell as u64).pow(d as u32);
        (0..total).map(move |mut idx| {
            let mut v = vec![0u8; self.ambient];
            for r in &self.rows {
                let c = (idx % self.ell as u64) as u8;
                idx /= self.ell as u64;
                axpy(&mut v, c, r, self.ell);
            }
            v
        })
    }

    /// One normalized representative per line of the subspace.
    pub fn projective_points(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        self.vectors().filter(|v| {
            !is_zero(v) && v.iter().find(|&&x| x != 0) == Some(&1)
        })
    }

    /// Basis of a complement: unit vectors at the non-pivot columns.
    pub fn complement_basis(&self) -> Vec<Vec<u8>> {
        let mut is_pivot = vec![false; self.ambient];
        for p in self.pivots() {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&j| !is_pivot[j]).map(|j| unit_vector(self.ambient, j)).collect()
    }

    /// Preimage of a subspace of the quotient by `self`, given in complement coordinates.
    pub fn lift_from_complement(&self, q: &Subspace) -> Subspace {
        let comp = self.complement_basis();
        let mut rows = self.rows.clone();
        for r in q.rows() {
            let mut v = vec![0u8; self.ambient];
            for (c, b) in r.iter().zip(&comp) {
                axpy(&mut v, *c, b, self.ell);
            }
            rows.push(v);
        }
        Self::span_unchecked(self.ell, self.ambient, rows)
    }
}

/// In-place canonical reduced row echelon form; zero rows are dropped.
pub fn rref(rows: &mut Vec<Vec<u8>>, ell: u8) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = inv_mod(rows[rank][col], ell);
        rows[rank] = scale(&rows[rank], inv, ell);
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let c = neg_mod(row[col], ell);
                axpy(row, c, &pivot_row, ell);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
}

/// The space of coefficient vectors `a` with `Σ a_k v_k = 0`.
pub fn linear_relations(ell: u8, dim: usize, vectors: &[Vec<u8>]) -> Subspace {
    let k = vectors.len();
    // Relations are the annihilator of the row space of the transpose.
    let rows: Vec<Vec<u8>> = (0..dim).map(|i| vectors.iter().map(|v| v[i]).collect()).collect();
    Subspace::span_unchecked(ell, k, rows).annihilator()
}

pub fn rank(ell: u8, vectors: &[Vec<u8>]) -> usize {
    let mut rows = vectors.to_vec();
    rref(&mut rows, ell);
    rows.len()
}

/// Number of k-dimensional subspaces of F_ℓ^n.
pub fn gaussian_binomial(n: usize, k: usize, ell: u8) -> u128 {
    if k > n {
        return 0;
    }
    let q = ell as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Deterministic, restartable enumeration of subspaces of F_ℓ^n in canonical form.
///
/// Order: by dimension, then by pivot set (lexicographic), then by the free
/// entries read as a base-ℓ counter.
pub fn enumerate_subspaces(
    ell: u8,
    n: usize,
    dim_filter: impl Fn(usize) -> bool,
    cap: u128,
) -> Result<SubspaceIter, LinalgError> {
    if n > MAX_ENUM_DIM {
        return Err(LinalgError::TooLarge { count: u128::MAX, cap });
    }
    let dims: Vec<usize> = (0..=n).filter(|&k| dim_filter(k)).collect();
    let count: u128 = dims.iter().map(|&k| gaussian_binomial(n, k, ell)).sum();
    if count > cap {
        return Err(LinalgError::TooLarge { count, cap });
    }
    let mut it = SubspaceIter { ell, n, dims, dim_idx: 0, pivots: Vec::new(), free: Vec::new(), counter: Vec::new(), done: false };
    it.start_dim();
    Ok(it)
}

pub struct SubspaceIter {
    ell: u8,
    n: usize,
    dims: Vec<usize>,
    dim_idx: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    counter: Vec<u8>,
    done: bool,
}

impl SubspaceIter {
    fn start_dim(&mut self) {
        match self.dims.get(self.dim_idx) {
            None => self.done = true,
            Some(&k) => {
                self.pivots = (0..k).collect();
                self.set_pivots();
            }
        }
    }

    fn set_pivots(&mut self) {
        self.free.clear();
        for (r, &p) in self.pivots.iter().enumerate() {
            for c in p + 1..self.n {
                if !self.pivots.contains(&c) {
                    self.free.push((r, c));
                }
            }
        }
        self.counter = vec![0; self.free.len()];
    }

    fn next_pivots(&mut self) -> bool {
        let k = self.pivots.len();
        let n = self.n;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.pivots[i] < n - k + i {
                self.pivots[i] += 1;
                for j in i + 1..k {
                    self.pivots[j] = self.pivots[j - 1] + 1;
                }
                self.set_pivots();
                return true;
            }
        }
        false
    }

    fn current(&self) -> Subspace {
        let mut rows: Vec<Vec<u8>> = self.pivots.iter().map(|&p| unit_vector(self.n, p)).collect();
        for (&(r, c), &v) in self.free.iter().zip(&self.counter) {
            rows[r][c] = v;
        }
        Subspace { ell: self.ell, ambient: self.n, rows }
    }

    fn advance(&mut self) {
        for d in self.counter.iter_mut() {
            *d += 1;
            if *d < self.ell {
                return;
            }
            *d = 0;
        }
        if self.next_pivots() {
            return;
        }
        self.dim_idx += 1;
        self.start_dim();
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let s = self.current();
        self.advance();
        Some(s)
    }
}

/// All subspaces containing `base`, via the quotient by `base`.
pub fn enumerate_overspaces(base: &Subspace, dim_filter: impl Fn(usize) -> bool, cap: u128) -> Result<Vec<Subspace>, LinalgError> {
    let m = base.codim();
    let d0 = base.dim();
    let it = enumerate_subspaces(base.ell(), m, |k| dim_filter(k + d0), cap)?;
    Ok(it.map(|q| base.lift_from_complement(&q)).collect())
}

/// All subspaces of `s`, expressed in the ambient coordinates.
pub fn enumerate_subspaces_of(s: &Subspace, dim_filter: impl Fn(usize) -> bool, cap: u128) -> Result<Vec<Subspace>, LinalgError> {
    let it = enumerate_subspaces(s.ell(), s.dim(), dim_filter, cap)?;
    Ok(it
        .map(|q| {
            let rows = q
                .rows()
                .iter()
                .map(|c| {
                    let mut v = vec![0u8; s.ambient()];
                    for (x, r) in c.iter().zip(s.rows()) {
                        axpy(&mut v, *x, r, s.ell());
                    }
                    v
                })
                .collect();
            Subspace::span_unchecked(s.ell(), s.ambient(), rows)
        })
        .collect())
}
