//! Laurent polynomials in `n` variables with the hyperoctahedral group action.
//!
//! Exponent vectors live in `Z^n`; the Weyl group `W = S_n ⋉ {±1}^n` acts by
//! signed permutations. Orbit sums `m_λ` over partitions form a basis of the
//! `W`-invariants.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hp::Hp;
use crate::scalar::{cabs, conj, Scalar};

/// Exponent vector `λ ∈ Z^n`.
///
/// Ordered graded-lexicographically: first by `Σ|λ_i|`, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(rank: usize) -> Self {
        MultiIndex(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn abs_degree(&self) -> i64 {
        self.0.iter().map(|e| e.abs()).sum()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn neg(&self) -> Self {
        MultiIndex(self.0.iter().map(|e| -e).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Sorted absolute values, i.e. the unique partition in the `W`-orbit.
    pub fn dominant(&self) -> Partition {
        let mut v: Vec<i64> = self.0.iter().map(|e| e.abs()).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition(MultiIndex(v))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.abs_degree()
            .cmp(&other.abs_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex(v)
    }
}

/// Weakly decreasing nonnegative exponent vector, an element of `Λ_n^+`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(MultiIndex);

impl Partition {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        let ok = entries.iter().all(|&e| e >= 0) && entries.windows(2).all(|w| w[0] >= w[1]);
        if !ok || entries.is_empty() {
            return Err(Error::NotPartition(entries));
        }
        Ok(Partition(MultiIndex(entries)))
    }

    pub fn zero(rank: usize) -> Self {
        Partition(MultiIndex::zero(rank))
    }

    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    pub fn size(&self) -> i64 {
        self.0.sum()
    }

    pub fn entries(&self) -> &[i64] {
        self.0.entries()
    }

    pub fn as_index(&self) -> &MultiIndex {
        &self.0
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl TryFrom<MultiIndex> for Partition {
    type Error = Error;
    fn try_from(m: MultiIndex) -> Result<Self> {
        Partition::new(m.0)
    }
}

/// Dominance order on `Λ_n`: prefix sums compared entrywise, no total-sum constraint.
pub fn dominance_leq(lambda: &MultiIndex, mu: &MultiIndex) -> Result<bool> {
    if lambda.rank() != mu.rank() {
        return Err(Error::RankMismatch { expected: lambda.rank(), found: mu.rank() });
    }
    let (mut a, mut b) = (0i64, 0i64);
    for (x, y) in lambda.entries().iter().zip(mu.entries()) {
        a += x;
        b += y;
        if a > b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A-type dominance on `P_{2n}`: prefix sums compared entrywise and equal totals.
pub fn a_dominance_leq(lambda: &MultiIndex, mu: &MultiIndex) -> Result<bool> {
    Ok(dominance_leq(lambda, mu)? && lambda.sum() == mu.sum())
}

/// All partitions with `rank` parts (zeros allowed) and `|λ| ≤ max_size`,
/// listed by size and then reverse-lexicographically.
pub fn partitions_up_to(rank: usize, max_size: i64) -> Vec<Partition> {
    fn fill(rank: usize, remaining: i64, cap: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == rank {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let slots = (rank - prefix.len()) as i64;
        for part in (0..=cap.min(remaining)).rev() {
            if part * slots < remaining {
                break;
            }
            prefix.push(part);
            fill(rank, remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=max_size.max(-1) {
        let mut level = Vec::new();
        fill(rank, size, size, &mut Vec::with_capacity(rank), &mut level);
        out.extend(level);
    }
    out.into_iter().map(|v| Partition(MultiIndex(v))).collect()
}

/// Partitions strictly below `lambda` in the dominance order.
pub fn lower_set(lambda: &Partition) -> Vec<Partition> {
    partitions_up_to(lambda.rank(), lambda.size())
        .into_iter()
        .filter(|mu| mu != lambda && dominance_leq(mu.as_index(), lambda.as_index()).unwrap_or(false))
        .collect()
}

/// Element of `W = S_n ⋉ {±1}^n`, sending `e_i` to `signs[i]·e_{perm[i]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::RankMismatch { expected: n, found: signs.len() });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument(format!("not a permutation: {perm:?}")));
            }
            seen[p] = true;
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidArgument(format!("signs must be ±1: {signs:?}")));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        SignedPermutation { perm: (0..n).collect(), signs: vec![1; n] }
    }

    /// Transposition of coordinates `i` and `j` (0-based).
    pub fn swap(n: usize, i: usize, j: usize) -> Self {
        let mut w = Self::identity(n);
        w.perm.swap(i, j);
        w
    }

    /// Inversion `u_i ↦ u_i^{-1}` (0-based).
    pub fn sign_flip(n: usize, i: usize) -> Self {
        let mut w = Self::identity(n);
        w.signs[i] = -1;
        w
    }

    /// Longest element `w_0` of `S_m`, `i ↦ m+1-i`.
    pub fn reversal(m: usize) -> Self {
        SignedPermutation { perm: (0..m).rev().collect(), signs: vec![1; m] }
    }

    /// The `n` Coxeter generators: adjacent transpositions and one sign change.
    pub fn generators(n: usize) -> Vec<Self> {
        let mut gens: Vec<Self> = (0..n.saturating_sub(1)).map(|i| Self::swap(n, i, i + 1)).collect();
        gens.push(Self::sign_flip(n, n - 1));
        gens
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let signs = other.perm.iter().zip(&other.signs).map(|(&j, &s)| s * self.signs[j]).collect();
        SignedPermutation { perm, signs }
    }

    pub fn apply(&self, lambda: &MultiIndex) -> Result<MultiIndex> {
        if lambda.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), found: lambda.rank() });
        }
        let mut out = vec![0; self.rank()];
        for (i, &e) in lambda.entries().iter().enumerate() {
            out[self.perm[i]] = i64::from(self.signs[i]) * e;
        }
        Ok(MultiIndex(out))
    }
}

/// The full `W`-orbit of a partition.
pub fn weyl_orbit(lambda: &Partition) -> BTreeSet<MultiIndex> {
    let gens = SignedPermutation::generators(lambda.rank());
    let mut orbit = BTreeSet::new();
    let mut frontier = vec![lambda.as_index().clone()];
    orbit.insert(lambda.as_index().clone());
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y = g.apply(&x).expect("rank matches");
            if orbit.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    orbit
}

/// Coefficient ring of a [`LaurentPoly`].
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn conj(&self) -> Self;
    fn magnitude(&self) -> f64;
}

impl<T: Scalar> Coeff for Complex<T> {
    fn conj(&self) -> Self {
        conj(self)
    }
    fn magnitude(&self) -> f64 {
        cabs(self)
    }
}

macro_rules! real_coeff {
    ($($t:ty),*) => {$(
        impl Coeff for $t {
            fn conj(&self) -> Self {
                self.clone()
            }
            fn magnitude(&self) -> f64 {
                Scalar::to_f64(&Scalar::abs(self))
            }
        }
    )*};
}

real_coeff!(f32, f64, BigRational, Hp);

/// Finitely supported map `Z^n → C`, the algebra `C[u^{±1}]`.
///
/// Zero coefficients are never stored; approximate cleanup is explicit via
/// [`LaurentPoly::cleanup`].
#[derive(Clone, PartialEq)]
pub struct LaurentPoly<C> {
    rank: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> LaurentPoly<C> {
    pub fn zero(rank: usize) -> Self {
        LaurentPoly { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, C::one())
    }

    pub fn constant(rank: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zero(rank), c)
    }

    pub fn monomial(exp: MultiIndex, c: C) -> Self {
        let mut p = Self::zero(exp.rank());
        p.add_term(exp, c);
        p
    }

    /// Collects terms, summing repeated exponents.
    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Result<Self> {
        let mut p = Self::zero(rank);
        for (e, c) in terms {
            if e.rank() != rank {
                return Err(Error::RankMismatch { expected: rank, found: e.rank() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: MultiIndex, c: C) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &MultiIndex) -> C {
        self.terms.get(exp).cloned().unwrap_or_else(C::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut p = Self::zero(self.rank);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v.clone() * c.clone());
        }
        p
    }

    /// `p*`: conjugate coefficients and invert exponents.
    pub fn star(&self) -> Self {
        LaurentPoly {
            rank: self.rank,
            terms: self.terms.iter().map(|(e, c)| (e.neg(), c.conj())).collect(),
        }
    }

    /// Group action `u^μ ↦ u^{wμ}`.
    pub fn act(&self, w: &SignedPermutation) -> Result<Self> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: w.rank() });
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((w.apply(e)?, c.clone())))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(LaurentPoly { rank: self.rank, terms })
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: BTreeSet<&MultiIndex> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|k| (self.coeff(k) - other.coeff(k)).magnitude())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    /// Drops coefficients with magnitude `≤ tol`.
    pub fn cleanup(&self, tol: f64) -> Self {
        LaurentPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.magnitude() > tol)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        let mut p = LaurentPoly::zero(self.rank);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), f(c));
        }
        p
    }

    fn check_rank(&self, other: &Self) {
        assert_eq!(self.rank, other.rank, "Laurent polynomial rank mismatch");
    }
}

impl<C: fmt::Debug> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<C: Coeff> Add for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: Self) -> LaurentPoly<C> {
        self.check_rank(rhs);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<C: Coeff> Sub for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: Self) -> LaurentPoly<C> {
        self.check_rank(rhs);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), -c.clone());
        }
        p
    }
}

impl<C: Coeff> Mul for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: Self) -> LaurentPoly<C> {
        self.check_rank(rhs);
        let mut p = LaurentPoly::zero(self.rank);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                p.add_term(e1.add(e2), c1.clone() * c2.clone());
            }
        }
        p
    }
}

impl<C: Coeff> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        self.scale(&(-C::one()))
    }
}

/// Orbit sum `m_λ = Σ_{μ ∈ Wλ} u^μ`.
pub fn orbit_sum<C: Coeff>(lambda: &Partition) -> LaurentPoly<C> {
    LaurentPoly::from_terms(lambda.rank(), weyl_orbit(lambda).into_iter().map(|e| (e, C::one())))
        .expect("orbit has the rank of its partition")
}

/// Whether `p` is fixed, to within `tol` per coefficient, by each Coxeter generator of `W`.
pub fn is_w_invariant<C: Coeff>(p: &LaurentPoly<C>, tol: f64) -> bool {
    SignedPermutation::generators(p.rank()).iter().all(|g| {
        let moved = p.act(g).expect("generator rank matches");
        moved.max_abs_diff(p) <= tol
    })
}

impl<T: Scalar> LaurentPoly<Complex<T>> {
    /// Evaluates `Σ c_μ Π x_i^{μ_i}` at a point of `(C^*)^n`.
    pub fn eval(&self, point: &[Complex<T>]) -> Result<Complex<T>> {
        if point.len() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: point.len() });
        }
        if let Some(i) = point.iter().position(|z| z.re.is_zero() && z.im.is_zero()) {
            return Err(Error::ZeroCoordinate(i));
        }
        let mut acc = Complex::<T>::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (z, &k) in point.iter().zip(e.entries()) {
                m = m * cpowi(z, k);
            }
            acc = acc + m;
        }
        Ok(acc)
    }
}

pub(crate) fn cpowi<T: Scalar>(z: &Complex<T>, k: i64) -> Complex<T> {
    let mut base = if k < 0 { Complex::<T>::one() / z.clone() } else { z.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = Complex::<T>::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    acc
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    exp: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct WirePoly {
    rank: usize,
    terms: Vec<WireTerm>,
}

impl Serialize for LaurentPoly<Complex<f64>> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WirePoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| WireTerm { exp: e.entries().to_vec(), re: c.re, im: c.im })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly<Complex<f64>> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = WirePoly::deserialize(d)?;
        LaurentPoly::from_terms(
            wire.rank,
            wire.terms.into_iter().map(|t| (MultiIndex(t.exp), Complex::new(t.re, t.im))),
        )
        .map_err(serde::de::Error::custom)
    }
}
