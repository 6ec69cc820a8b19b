//! The Koornwinder weight on the compact torus and the normalized pairing
//! `⟨p, r⟩ = h(r* p)` computed by equispaced tensor-grid quadrature.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laurent::{orbit_sum, partitions_up_to, LaurentPoly, MultiIndex};
use crate::linalg::pairwise_sum;
use crate::qseries::{qpoch_infinite, QBase, TruncationPolicy};
use crate::scalar::{cabs, cis, conj, Real, Scalar};

/// Distance from a special value below which a denominator parameter is
/// cancelled against the matching factor of `(u²;q)_∞`.
const CANCEL_TOL: f64 = 1e-12;
/// A denominator product smaller than this on the torus is reported as divergent.
const DIVERGENT_TOL: f64 = 1e-13;
const UNIT_TOL: f64 = 1e-12;
const NON_REAL_TOL: f64 = 1e-8;

/// The weight parameters `(a, b, c, d; q, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MKParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub t: T,
    pub q: QBase<T>,
}

impl<T: Scalar> MKParams<T> {
    pub fn new(a: T, b: T, c: T, d: T, t: T, q: QBase<T>) -> Self {
        MKParams { a, b, c, d, t, q }
    }

    pub fn abcd(&self) -> [&T; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Same weight with `(a, b, c, d)` reordered by `perm`.
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        let v = self.abcd();
        MKParams {
            a: v[perm[0]].clone(),
            b: v[perm[1]].clone(),
            c: v[perm[2]].clone(),
            d: v[perm[3]].clone(),
            t: self.t.clone(),
            q: self.q.clone(),
        }
    }

    pub fn to_f64(&self) -> [f64; 6] {
        [&self.a, &self.b, &self.c, &self.d, &self.t, self.q.value()].map(Scalar::to_f64)
    }
}

/// Strict regime: `|a|,|b|,|c|,|d| < 1` and `0 < t < 1`.
pub fn validate_params<T: Scalar>(p: &MKParams<T>) -> bool {
    p.abcd().iter().all(|x| x.abs() < T::one()) && p.t > T::zero() && p.t < T::one()
}

/// Strict regime, or boundary values `±1` that cancel exactly against the
/// numerator `(u²;q)_∞ = (u, -u, q^{1/2}u, -q^{1/2}u; q)_∞`, leaving a
/// continuous positive weight.
pub fn admissible<T: Real>(p: &MKParams<T>) -> bool {
    if !(p.t > T::zero() && p.t < T::one()) {
        return false;
    }
    let mut specials = special_values(&p.q);
    for x in p.abcd() {
        if x.abs() < T::one() {
            continue;
        }
        match specials.iter().position(|s| near(x, s)) {
            Some(i) if (x.to_f64().abs() - 1.0).abs() <= CANCEL_TOL => {
                specials.remove(i);
            }
            _ => return false,
        }
    }
    true
}

fn special_values<T: Real>(q: &QBase<T>) -> Vec<T> {
    let h = q.value().sqrt();
    vec![T::one(), -T::one(), h.clone(), -h]
}

fn near<T: Scalar>(x: &T, y: &T) -> bool {
    (x.clone() - y.clone()).abs().to_f64() <= CANCEL_TOL
}

/// Tensor grid of `M^n` equispaced points `exp(2πik/M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureGrid {
    points_per_circle: usize,
    rank: usize,
}

impl QuadratureGrid {
    pub fn new(points_per_circle: usize, rank: usize) -> Result<Self> {
        if points_per_circle < 4 {
            return Err(Error::InvalidArgument(format!("grid needs M ≥ 4, got {points_per_circle}")));
        }
        if rank == 0 {
            return Err(Error::InvalidArgument("grid rank must be ≥ 1".into()));
        }
        Ok(QuadratureGrid { points_per_circle, rank })
    }

    pub fn points_per_circle(&self) -> usize {
        self.points_per_circle
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.points_per_circle.pow(self.rank as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-coordinate root indices of the `idx`-th point (first coordinate slowest).
    pub fn indices(&self, mut idx: usize) -> Vec<usize> {
        let m = self.points_per_circle;
        let mut out = vec![0; self.rank];
        for slot in out.iter_mut().rev() {
            *slot = idx % m;
            idx /= m;
        }
        out
    }
}

fn check_unit<T: Scalar>(u: &[Complex<T>]) -> Result<()> {
    for (i, z) in u.iter().enumerate() {
        if (cabs(z) - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!("coordinate {i} is off the unit circle: {z:?}")));
        }
    }
    Ok(())
}

/// `Δ⁺(u)` on the torus.
///
/// Denominator parameters equal to one of `±1, ±q^{1/2}` are cancelled against
/// the corresponding factor of `(u_i²;q)_∞`.
pub fn delta_plus_eval<T: Real>(
    u: &[Complex<T>],
    p: &MKParams<T>,
    policy: &TruncationPolicy,
) -> Result<Complex<T>> {
    check_unit(u)?;
    let q = &p.q;
    let mut specials = special_values(q);
    let mut dens: Vec<T> = Vec::with_capacity(4);
    for x in p.abcd() {
        match specials.iter().position(|s| near(x, s)) {
            Some(i) => {
                specials.remove(i);
            }
            None => dens.push(x.clone()),
        }
    }
    let mut acc = Complex::<T>::new(T::one(), T::zero());
    for ui in u {
        for s in &specials {
            acc = acc * qpoch_infinite(&(ui.clone() * s.clone()), q, policy)?;
        }
        for x in &dens {
            acc = acc / denominator(&(ui.clone() * x.clone()), q, policy)?;
        }
    }
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let r = u[i].clone() / u[j].clone();
            let s = u[i].clone() * u[j].clone();
            acc = acc * qpoch_infinite(&r, q, policy)? * qpoch_infinite(&s, q, policy)?;
            acc = acc / denominator(&(r * p.t.clone()), q, policy)?;
            acc = acc / denominator(&(s * p.t.clone()), q, policy)?;
        }
    }
    Ok(acc)
}

fn denominator<T: Real>(x: &Complex<T>, q: &QBase<T>, policy: &TruncationPolicy) -> Result<Complex<T>> {
    let v = qpoch_infinite(x, q, policy)?;
    if cabs(&v) < DIVERGENT_TOL {
        return Err(Error::DivergentFactor(format!("({x:?}; q)_∞ ≈ 0")));
    }
    Ok(v)
}

/// `Δ(u) = Δ⁺(u)Δ⁺(u⁻¹)`, checked to be real.
pub fn delta_eval<T: Real>(u: &[Complex<T>], p: &MKParams<T>, policy: &TruncationPolicy) -> Result<T> {
    check_unit(u)?;
    // on T, u⁻¹ = conj(u); with real parameters every operation commutes with
    // conjugation, so Δ⁺(u⁻¹) is then the exact conjugate of Δ⁺(u)
    let inv: Vec<Complex<T>> = u.iter().map(conj).collect();
    let v = delta_plus_eval(u, p, policy)? * delta_plus_eval(&inv, p, policy)?;
    let imag = v.im.to_f64().abs();
    let value = cabs(&v);
    if imag > NON_REAL_TOL * value {
        return Err(Error::NonRealResult { value, imag });
    }
    Ok(v.re)
}

fn unit_roots<T: Real>(m: usize) -> Vec<Complex<T>> {
    let two_pi = T::pi() * T::from_i64(2);
    (0..m).map(|k| cis(&(two_pi.clone() * T::from_i64(k as i64) / T::from_i64(m as i64)))).collect()
}

/// Weight values on a fixed grid; the quadrature functional `h` with `h(1) = 1`.
#[derive(Clone, Debug)]
pub struct TorusMeasure<T> {
    params: MKParams<T>,
    grid: QuadratureGrid,
    roots: Vec<Complex<T>>,
    weights: Vec<T>,
    total: T,
}

impl<T: Real> TorusMeasure<T> {
    /// Evaluates `Δ` on every grid point (in parallel) and caches the values.
    pub fn new(params: MKParams<T>, grid: QuadratureGrid, policy: &TruncationPolicy) -> Result<Self> {
        let roots = unit_roots(grid.points_per_circle());
        let weights = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let u: Vec<Complex<T>> = grid.indices(idx).into_iter().map(|k| roots[k].clone()).collect();
                delta_eval(&u, &params, policy)
            })
            .collect::<Result<Vec<T>>>()?;
        let total = pairwise_sum(&weights);
        if !(total > T::zero()) {
            return Err(Error::OutOfRegime(format!("weight integrates to {total:?} on the grid")));
        }
        Ok(TorusMeasure { params, grid, roots, weights, total })
    }

    /// Replaces `Δ` by caller-supplied values at the grid points (in `indices` order).
    pub fn with_weights(params: MKParams<T>, grid: QuadratureGrid, weights: Vec<T>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} weights, got {}",
                grid.len(),
                weights.len()
            )));
        }
        let total = pairwise_sum(&weights);
        if !(total > T::zero()) {
            return Err(Error::InvalidArgument(format!("weights sum to {total:?}")));
        }
        Ok(TorusMeasure { params, grid, roots: unit_roots(grid.points_per_circle()), weights, total })
    }

    pub fn params(&self) -> &MKParams<T> {
        &self.params
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `h(u^μ)`.
    pub fn moment(&self, mu: &MultiIndex) -> Complex<T> {
        self.raw_moment(mu) / self.total.clone()
    }

    /// `Σ_grid u^μ Δ(u)` without the normalization `h(1) = 1`.
    fn raw_moment(&self, mu: &MultiIndex) -> Complex<T> {
        let m = self.grid.points_per_circle() as i64;
        let terms: Vec<Complex<T>> = self
            .weights
            .iter()
            .enumerate()
            .map(|(idx, w)| {
                let phase = self
                    .grid
                    .indices(idx)
                    .into_iter()
                    .zip(mu.entries())
                    .map(|(k, &e)| (k as i64 * e).rem_euclid(m))
                    .sum::<i64>()
                    .rem_euclid(m);
                self.roots[phase as usize].clone() * w.clone()
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Moments for a set of exponents; each is an independent deterministic sum.
    pub fn moments(&self, exps: &BTreeSet<MultiIndex>) -> BTreeMap<MultiIndex, Complex<T>> {
        let list: Vec<&MultiIndex> = exps.iter().collect();
        let vals: Vec<Complex<T>> = list.par_iter().map(|e| self.moment(e)).collect();
        list.into_iter().cloned().zip(vals).collect()
    }

    /// `h(f)`.
    pub fn integrate(&self, f: &LaurentPoly<Complex<T>>) -> Result<Complex<T>> {
        self.check_rank(f.rank())?;
        let exps: BTreeSet<MultiIndex> = f.support().cloned().collect();
        let mom = self.moments(&exps);
        let terms: Vec<Complex<T>> = f.terms().map(|(e, c)| c.clone() * mom[e].clone()).collect();
        Ok(pairwise_sum(&terms))
    }

    /// `⟨p, r⟩ = h(r* p)`.
    pub fn pairing(&self, p: &LaurentPoly<Complex<T>>, r: &LaurentPoly<Complex<T>>) -> Result<Complex<T>> {
        self.check_rank(p.rank())?;
        self.check_rank(r.rank())?;
        self.integrate(&(&r.star() * p))
    }

    /// Unnormalized `M^{-n} Σ_grid f Δ`, for debugging the normalization constant.
    pub fn raw_integral(&self, f: &LaurentPoly<Complex<T>>) -> Result<Complex<T>> {
        self.check_rank(f.rank())?;
        let n = T::from_i64(self.grid.len() as i64);
        let terms: Vec<Complex<T>> = f.terms().map(|(e, c)| c.clone() * self.raw_moment(e)).collect();
        Ok(pairwise_sum(&terms) / n)
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        if rank != self.grid.rank() {
            return Err(Error::RankMismatch { expected: self.grid.rank(), found: rank });
        }
        Ok(())
    }
}

/// One-shot `h(r* p)` on a fresh grid.
pub fn haar_pairing<T: Real>(
    p: &LaurentPoly<Complex<T>>,
    r: &LaurentPoly<Complex<T>>,
    params: &MKParams<T>,
    grid: &QuadratureGrid,
    policy: &TruncationPolicy,
) -> Result<Complex<T>> {
    if p.rank() != r.rank() {
        return Err(Error::RankMismatch { expected: p.rank(), found: r.rank() });
    }
    TorusMeasure::new(params.clone(), *grid, policy)?.pairing(p, r)
}

/// Gram matrix `⟨m_λ, m_μ⟩` of all orbit sums with `|λ| ≤ max_degree`.
pub(crate) fn orbit_gram<T: Real>(measure: &TorusMeasure<T>, max_degree: i64) -> Vec<Vec<Complex<T>>> {
    let rank = measure.grid().rank();
    let orbits: Vec<LaurentPoly<Complex<T>>> =
        partitions_up_to(rank, max_degree).iter().map(orbit_sum).collect();
    gram_of(measure, &orbits)
}

/// `G[i][j] = ⟨p_i, p_j⟩` sharing one moment table.
pub(crate) fn gram_of<T: Real>(
    measure: &TorusMeasure<T>,
    polys: &[LaurentPoly<Complex<T>>],
) -> Vec<Vec<Complex<T>>> {
    let mut exps = BTreeSet::new();
    for p in polys {
        for r in polys {
            for a in p.support() {
                for b in r.support() {
                    exps.insert(a.add(&b.neg()));
                }
            }
        }
    }
    let mom = measure.moments(&exps);
    polys
        .iter()
        .map(|p| {
            polys
                .iter()
                .map(|r| {
                    let mut terms = Vec::new();
                    for (a, ca) in p.terms() {
                        for (b, cb) in r.terms() {
                            let cbar = Complex::new(cb.re.clone(), -cb.im.clone());
                            terms.push(ca.clone() * cbar * mom[&a.add(&b.neg())].clone());
                        }
                    }
                    pairwise_sum(&terms)
                })
                .collect()
        })
        .collect()
}

/// Doublings attempted by [`auto_grid`] before giving up.
pub const AUTO_GRID_MAX_DOUBLINGS: usize = 6;

/// Smallest grid `M = (2·max_degree + 16)·2^j` on which the orbit-sum Gram
/// matrix up to `max_degree` changes by less than `tol` (relative) under doubling.
pub fn auto_grid<T: Real>(
    max_degree: i64,
    rank: usize,
    params: &MKParams<T>,
    tol: f64,
    policy: &TruncationPolicy,
) -> Result<QuadratureGrid> {
    if max_degree < 0 {
        return Err(Error::InvalidArgument(format!("max_degree must be ≥ 0, got {max_degree}")));
    }
    let mut m = 2 * max_degree as usize + 16;
    let mut grid = QuadratureGrid::new(m, rank)?;
    if max_degree == 0 {
        return Ok(grid);
    }
    let mut prev = orbit_gram(&TorusMeasure::new(params.clone(), grid, policy)?, max_degree);
    let mut last_change = f64::INFINITY;
    for _ in 0..AUTO_GRID_MAX_DOUBLINGS {
        m *= 2;
        let next_grid = QuadratureGrid::new(m, rank)?;
        let next = orbit_gram(&TorusMeasure::new(params.clone(), next_grid, policy)?, max_degree);
        last_change = relative_change(&prev, &next);
        log::debug!("auto_grid M={m} relative change {last_change:e}");
        if last_change < tol {
            return Ok(grid);
        }
        grid = next_grid;
        prev = next;
    }
    Err(Error::NoConvergence { doublings: AUTO_GRID_MAX_DOUBLINGS, last_change })
}

fn relative_change<T: Scalar>(a: &[Vec<Complex<T>>], b: &[Vec<Complex<T>>]) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            diff = diff.max(cabs(&(x.clone() - y.clone())));
            scale = scale.max(cabs(y));
        }
    }
    diff / scale.max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Partition;
    use approx::assert_relative_eq;

    fn example() -> MKParams<f64> {
        MKParams::new(0.3, -0.2, 0.5, -0.4, 0.6, QBase::new(0.5).unwrap())
    }

    fn zero_params() -> MKParams<f64> {
        MKParams::new(0.0, 0.0, 0.0, 0.0, 0.6, QBase::new(0.5).unwrap())
    }

    fn pt(theta: f64) -> Complex<f64> {
        Complex::new(theta.cos(), theta.sin())
    }

    #[test]
    fn regime_checks() {
        assert!(validate_params(&example()));
        let mut p = example();
        p.a = 1.2;
        assert!(!validate_params(&p));
        let mut p = example();
        p.t = 1.0;
        assert!(!validate_params(&p));
        let mut p = example();
        p.b = -1.0;
        assert!(!validate_params(&p));
        assert!(admissible(&p));
        p.c = -1.0;
        assert!(!admissible(&p), "second -1 has nothing left to cancel");
    }

    #[test]
    fn delta_plus_special_points() {
        let pol = TruncationPolicy::default();
        let z = delta_plus_eval(&[pt(0.0)], &zero_params(), &pol).unwrap();
        assert_eq!(z, Complex::new(0.0, 0.0));
        let z = delta_plus_eval(&[pt(std::f64::consts::PI)], &zero_params(), &pol).unwrap();
        assert!(z.norm() < 1e-15);
        // u = i: (u²;q)_∞ = (-1;q)_∞
        let z = delta_plus_eval(&[Complex::new(0.0, 1.0)], &zero_params(), &pol).unwrap();
        assert_relative_eq!(z.re, 4.768_462_058_062_743_4, max_relative = 1e-14);
        assert!(z.im.abs() < 1e-15);
    }

    #[test]
    fn delta_plus_conjugation() {
        let pol = TruncationPolicy::default();
        let u = [pt(0.7), pt(-2.1)];
        let v = [u[0].conj(), u[1].conj()];
        let a = delta_plus_eval(&u, &example(), &pol).unwrap();
        let b = delta_plus_eval(&v, &example(), &pol).unwrap();
        assert_relative_eq!((a.conj() - b).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn delta_symmetries() {
        let pol = TruncationPolicy::default();
        let p = example();
        let u = [pt(0.4), pt(2.3)];
        let base = delta_eval(&u, &p, &pol).unwrap();
        assert!(base > 0.0);
        for w in [[u[1], u[0]], [u[0].conj(), u[1]], [u[0], u[1].conj()], [u[0].conj(), u[1].conj()]] {
            assert_relative_eq!(delta_eval(&w, &p, &pol).unwrap(), base, max_relative = 1e-10);
        }
    }

    #[test]
    fn off_circle_rejected() {
        let pol = TruncationPolicy::default();
        assert!(delta_plus_eval(&[Complex::new(1.1, 0.0)], &example(), &pol).is_err());
    }

    #[test]
    fn divergent_factor_detected() {
        let pol = TruncationPolicy::default();
        let mut p = example();
        p.a = 2.0;
        // with q = 0.5, (a u; q)_∞ contains (1 - a u q) = 0 at u = 1
        assert!(matches!(delta_plus_eval(&[pt(0.0)], &p, &pol), Err(Error::DivergentFactor(_))));
    }

    #[test]
    fn pairing_normalized_and_hermitian() {
        let pol = TruncationPolicy::default();
        let p = example();
        let grid = QuadratureGrid::new(64, 1).unwrap();
        let one = LaurentPoly::one(1);
        assert_eq!(haar_pairing(&one, &one, &p, &grid, &pol).unwrap(), Complex::new(1.0, 0.0));
        let a = LaurentPoly::from_terms(
            1,
            [(MultiIndex::new(vec![1]), Complex::new(0.3, 1.0)), (MultiIndex::new(vec![-2]), Complex::new(1.0, 0.0))],
        )
        .unwrap();
        let b = LaurentPoly::from_terms(1, [(MultiIndex::new(vec![2]), Complex::new(-0.5, 0.25))]).unwrap();
        let m = TorusMeasure::new(p, grid, &pol).unwrap();
        let ab = m.pairing(&a, &b).unwrap();
        let ba = m.pairing(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);
    }

    #[test]
    fn grid_refinement_oracle() {
        let pol = TruncationPolicy::default();
        let m1: LaurentPoly<Complex<f64>> = orbit_sum(&Partition::new(vec![1]).unwrap());
        let one = LaurentPoly::one(1);
        let h = |mm| {
            TorusMeasure::new(example(), QuadratureGrid::new(mm, 1).unwrap(), &pol)
                .unwrap()
                .pairing(&m1, &one)
                .unwrap()
        };
        assert!((h(48) - h(96)).norm() < 1e-11);
    }

    #[test]
    fn raw_integral_exposes_normalization() {
        let pol = TruncationPolicy::default();
        let m = TorusMeasure::new(example(), QuadratureGrid::new(32, 1).unwrap(), &pol).unwrap();
        let raw = m.raw_integral(&LaurentPoly::one(1)).unwrap();
        let mean = m.weights().iter().sum::<f64>() / 32.0;
        assert_relative_eq!(raw.re, mean, max_relative = 1e-14);
    }

    #[test]
    fn auto_grid_examples() {
        let pol = TruncationPolicy::default();
        let g = auto_grid(0, 1, &example(), 1e-12, &pol).unwrap();
        assert_eq!(g.points_per_circle(), 16);
        let g = auto_grid(8, 1, &example(), 1e-13, &pol).unwrap();
        assert!(g.points_per_circle() <= 256);
        let loose = auto_grid(4, 1, &example(), 1e-6, &pol).unwrap();
        let tight = auto_grid(4, 1, &example(), 1e-13, &pol).unwrap();
        assert!(tight.points_per_circle() >= loose.points_per_circle());
    }

    #[test]
    fn grid_validation() {
        assert!(QuadratureGrid::new(3, 1).is_err());
        assert_eq!(QuadratureGrid::new(5, 2).unwrap().indices(7), vec![1, 2]);
    }
}
