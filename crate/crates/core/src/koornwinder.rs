//! Monic Macdonald–Koornwinder polynomials by orthogonalization, the
//! closed-form ground state, and the label/parameter maps linking them to
//! spherical functions.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::laurent::{
    dominance_leq, lower_set, orbit_sum, partitions_up_to, LaurentPoly, MultiIndex, Partition,
};
use crate::linalg::{Lu, Matrix};
use crate::qseries::{QBase, TruncationPolicy};
use crate::scalar::{cabs, conj, real, Real, Scalar};
use crate::torus::{admissible, gram_of, MKParams, QuadratureGrid, TorusMeasure};

/// Gram systems above this 1-norm condition number are rejected.
pub const SINGULAR_GRAM_THRESHOLD: f64 = 1e12;
/// Condition numbers above this are logged.
pub const GRAM_WARNING_THRESHOLD: f64 = 1e9;

/// Representation and coideal data `(n, κ1, κ2, κ, σ, τ, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalLabels<T> {
    pub n: usize,
    pub kappa1: i64,
    pub kappa2: i64,
    pub kappa: i64,
    pub sigma: T,
    pub tau: T,
    pub q: QBase<T>,
}

impl<T: Scalar> SphericalLabels<T> {
    pub fn new(n: usize, kappa1: i64, kappa2: i64, kappa: i64, sigma: T, tau: T, q: QBase<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be ≥ 1".into()));
        }
        if kappa < 0 || kappa1 < 0 || kappa2.abs() > kappa1 {
            return Err(Error::InvalidArgument(format!(
                "labels need κ, κ1 ≥ 0 and |κ2| ≤ κ1 (got κ={kappa}, κ1={kappa1}, κ2={kappa2})"
            )));
        }
        Ok(SphericalLabels { n, kappa1, kappa2, kappa, sigma, tau, q })
    }
}

/// A monic polynomial `P_λ = m_λ + Σ_{μ<λ} c_μ m_μ`.
#[derive(Clone, Debug)]
pub struct MKPolynomial<T> {
    pub label: Partition,
    pub poly: LaurentPoly<Complex<T>>,
    /// Orbit-sum coefficients, lower labels first and `(λ, 1)` last.
    pub expansion: Vec<(Partition, Complex<T>)>,
    pub params: MKParams<T>,
    /// `⟨P_λ, P_λ⟩`.
    pub gram_diag: T,
    /// 1-norm condition number of the solved Gram system.
    pub condition: f64,
}

impl<T: Real> MKPolynomial<T> {
    pub fn coefficient(&self, mu: &Partition) -> Complex<T> {
        self.expansion
            .iter()
            .find(|(p, _)| p == mu)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Complex::zero)
    }
}

/// Orthogonality defects of a family: `|⟨P_i,P_j⟩| / sqrt(⟨P_i,P_i⟩⟨P_j,P_j⟩)`.
#[derive(Clone, Debug)]
pub struct MKFamily<T> {
    pub polys: Vec<MKPolynomial<T>>,
    pub residual: Vec<Vec<f64>>,
    pub max_off_diagonal: f64,
}

fn check_regime<T: Real>(params: &MKParams<T>) -> Result<()> {
    if admissible(params) {
        Ok(())
    } else {
        Err(Error::OutOfRegime(format!("parameters {:?}", params.to_f64())))
    }
}

/// `P_λ` on a fresh quadrature grid.
pub fn mk_polynomial<T: Real>(
    lambda: &Partition,
    params: &MKParams<T>,
    grid: &QuadratureGrid,
    policy: &TruncationPolicy,
) -> Result<MKPolynomial<T>> {
    check_grid_rank(grid, lambda.rank())?;
    if lambda.size() == 0 {
        // empty lower set: P_0 = 1 and h(1) = 1 for any weight
        return Ok(MKPolynomial {
            label: lambda.clone(),
            poly: LaurentPoly::one(lambda.rank()),
            expansion: vec![(lambda.clone(), Complex::one())],
            params: params.clone(),
            gram_diag: T::one(),
            condition: 1.0,
        });
    }
    check_regime(params)?;
    let measure = TorusMeasure::new(params.clone(), *grid, policy)?;
    mk_polynomial_on(&measure, lambda)
}

fn check_grid_rank(grid: &QuadratureGrid, rank: usize) -> Result<()> {
    if grid.rank() != rank {
        return Err(Error::RankMismatch { expected: grid.rank(), found: rank });
    }
    Ok(())
}

/// `P_λ` against an already evaluated weight.
pub fn mk_polynomial_on<T: Real>(measure: &TorusMeasure<T>, lambda: &Partition) -> Result<MKPolynomial<T>> {
    check_regime(measure.params())?;
    check_grid_rank(measure.grid(), lambda.rank())?;
    let mut labels = lower_set(lambda);
    labels.push(lambda.clone());
    let orbits: Vec<LaurentPoly<Complex<T>>> = labels.iter().map(orbit_sum).collect();
    let gram = gram_of(measure, &orbits);
    let lower: Vec<usize> = (0..labels.len() - 1).collect();
    solve_monic(&labels, &gram, labels.len() - 1, &lower, measure.params())
}

/// All `P_λ` with `|λ| ≤ max_deg`, sharing one Gram matrix.
pub fn mk_family<T: Real>(
    rank: usize,
    max_deg: i64,
    params: &MKParams<T>,
    grid: &QuadratureGrid,
    policy: &TruncationPolicy,
) -> Result<MKFamily<T>> {
    check_regime(params)?;
    check_grid_rank(grid, rank)?;
    let measure = TorusMeasure::new(params.clone(), *grid, policy)?;
    mk_family_on(&measure, max_deg)
}

pub fn mk_family_on<T: Real>(measure: &TorusMeasure<T>, max_deg: i64) -> Result<MKFamily<T>> {
    check_regime(measure.params())?;
    let labels = partitions_up_to(measure.grid().rank(), max_deg);
    let orbits: Vec<LaurentPoly<Complex<T>>> = labels.iter().map(orbit_sum).collect();
    let gram = gram_of(measure, &orbits);
    let mut polys = Vec::with_capacity(labels.len());
    for (i, lambda) in labels.iter().enumerate() {
        let lower: Vec<usize> = (0..labels.len())
            .filter(|&j| j != i && dominance_leq(labels[j].as_index(), lambda.as_index()).unwrap_or(false))
            .collect();
        polys.push(solve_monic(&labels, &gram, i, &lower, measure.params())?);
    }

    // coefficient vectors in the full label basis
    let coords: Vec<Vec<Complex<T>>> = polys
        .iter()
        .map(|p| labels.iter().map(|l| p.coefficient(l)).collect())
        .collect();
    let k = labels.len();
    let mut inner = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        for j in 0..k {
            inner[i][j] = cabs(&form(&gram, &coords[i], &coords[j]));
        }
    }
    let mut residual = vec![vec![0.0f64; k]; k];
    let mut max_off_diagonal = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            residual[i][j] = inner[i][j] / (inner[i][i] * inner[j][j]).sqrt();
            if i != j {
                max_off_diagonal = max_off_diagonal.max(residual[i][j]);
            }
        }
    }
    Ok(MKFamily { polys, residual, max_off_diagonal })
}

/// `Σ x_a conj(y_b) G[a][b]`.
fn form<T: Scalar>(gram: &[Vec<Complex<T>>], x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::<T>::zero();
    for (a, xa) in x.iter().enumerate() {
        if xa.is_zero() {
            continue;
        }
        for (b, yb) in y.iter().enumerate() {
            if yb.is_zero() {
                continue;
            }
            acc = acc + xa.clone() * conj(yb) * gram[a][b].clone();
        }
    }
    acc
}

/// Solves `Σ_μ c_μ ⟨m_μ, m_ν⟩ = -⟨m_λ, m_ν⟩` for `ν` in `lower`.
fn solve_monic<T: Real>(
    labels: &[Partition],
    gram: &[Vec<Complex<T>>],
    target: usize,
    lower: &[usize],
    params: &MKParams<T>,
) -> Result<MKPolynomial<T>> {
    let k = lower.len();
    let mut coeffs: Vec<Complex<T>> = Vec::new();
    let mut condition = 1.0;
    if k > 0 {
        let a = Matrix::from_fn(k, k, |nu, mu| gram[lower[mu]][lower[nu]].clone());
        let rhs: Vec<Complex<T>> = lower.iter().map(|&nu| -gram[target][nu].clone()).collect();
        condition = a.cond1();
        if !(condition <= SINGULAR_GRAM_THRESHOLD) {
            return Err(Error::SingularGram { condition });
        }
        if condition > GRAM_WARNING_THRESHOLD {
            log::warn!("Gram system for {:?} has condition number {condition:e}", labels[target]);
        }
        let lu: Lu<Complex<T>> = a.lu().ok_or(Error::SingularGram { condition: f64::INFINITY })?;
        coeffs = lu.solve(&rhs);
    }
    let mut expansion: Vec<(Partition, Complex<T>)> =
        lower.iter().zip(&coeffs).map(|(&i, c)| (labels[i].clone(), c.clone())).collect();
    expansion.push((labels[target].clone(), Complex::one()));

    let mut poly = LaurentPoly::zero(labels[target].rank());
    for (label, c) in &expansion {
        poly = &poly + &orbit_sum::<Complex<T>>(label).scale(c);
    }

    let mut idx: Vec<usize> = lower.to_vec();
    idx.push(target);
    let x: Vec<Complex<T>> = expansion.iter().map(|(_, c)| c.clone()).collect();
    let sub: Vec<Vec<Complex<T>>> =
        idx.iter().map(|&a| idx.iter().map(|&b| gram[a][b].clone()).collect()).collect();
    let gram_diag = form(&sub, &x, &x).re;
    if !(gram_diag > T::zero()) {
        return Err(Error::OutOfRegime(format!("nonpositive norm for P_{:?}", labels[target])));
    }
    Ok(MKPolynomial { label: labels[target].clone(), poly, expansion, params: params.clone(), gram_diag, condition })
}

/// `δ(κ, κ1) = (κ1 + (n-1)κ, …, κ1 + κ, κ1)`.
pub fn delta_partition(kappa: i64, kappa1: i64, n: usize) -> Result<Partition> {
    if kappa < 0 || kappa1 < 0 {
        return Err(Error::InvalidArgument(format!("δ needs κ, κ1 ≥ 0 (got {kappa}, {kappa1})")));
    }
    Partition::new((1..=n as i64).map(|i| kappa1 + (n as i64 - i) * kappa).collect())
}

/// `μ^♮ = (μ1, …, μn, -μn, …, -μ1)`.
pub fn natural_embed(mu: &MultiIndex) -> MultiIndex {
    let e = mu.entries();
    MultiIndex::new(e.iter().copied().chain(e.iter().rev().map(|x| -x)).collect())
}

/// `λ^♭ = (λ1 + λ2n, λ2 + λ2n-1, …, λn + λn+1)`.
pub fn flat_map(lambda: &MultiIndex) -> Result<MultiIndex> {
    let e = lambda.entries();
    if e.len() % 2 != 0 {
        return Err(Error::InvalidArgument(format!("♭ needs even rank, got {}", e.len())));
    }
    let n = e.len() / 2;
    Ok(MultiIndex::new((0..n).map(|i| e[i] + e[2 * n - 1 - i]).collect()))
}

/// `(x·u^e; Q)_k` as a Laurent polynomial.
fn monomial_qpoch<T: Scalar>(x: &T, e: &MultiIndex, base: &T, k: i64) -> LaurentPoly<Complex<T>> {
    let rank = e.rank();
    let mut acc = LaurentPoly::one(rank);
    let mut xj = x.clone();
    for _ in 0..k {
        let factor = LaurentPoly::from_terms(
            rank,
            [(MultiIndex::zero(rank), Complex::one()), (e.clone(), real(-xj.clone()))],
        )
        .expect("ranks agree");
        acc = &acc * &factor;
        xj = xj * base.clone();
    }
    acc
}

fn unit(rank: usize, i: usize, s: i64) -> MultiIndex {
    let mut v = vec![0; rank];
    v[i] = s;
    MultiIndex::new(v)
}

/// Closed-form restricted ground state with normalization constant 1:
/// `u^{δ(κ,κ1)} Π_i (q^{1-σ+τ}u_i^{-1}, -q^{1+σ+τ}u_i^{-1}; q²)_{κ1∓κ2}
/// Π_{i<j} (q²u_i^{-1}u_j, q²u_i^{-1}u_j^{-1}; q²)_κ`.
pub fn ground_state_restriction<T: Scalar>(labels: &SphericalLabels<T>) -> Result<LaurentPoly<Complex<T>>> {
    let n = labels.n;
    let q = &labels.q;
    let q2 = q.squared().value().clone();
    let delta = delta_partition(labels.kappa, labels.kappa1, n)?;
    let mut f = LaurentPoly::monomial(delta.as_index().clone(), Complex::one());
    let one = T::one();
    let x1 = q.pow(&(one.clone() - labels.sigma.clone() + labels.tau.clone()))?;
    let x2 = -q.pow(&(one + labels.sigma.clone() + labels.tau.clone()))?;
    for i in 0..n {
        let e = unit(n, i, -1);
        f = &f * &monomial_qpoch(&x1, &e, &q2, labels.kappa1 - labels.kappa2);
        f = &f * &monomial_qpoch(&x2, &e, &q2, labels.kappa1 + labels.kappa2);
    }
    for i in 0..n {
        for j in i + 1..n {
            let e1 = unit(n, i, -1).add(&unit(n, j, 1));
            let e2 = unit(n, i, -1).add(&unit(n, j, -1));
            f = &f * &monomial_qpoch(&q2, &e1, &q2, labels.kappa);
            f = &f * &monomial_qpoch(&q2, &e2, &q2, labels.kappa);
        }
    }
    Ok(f)
}

/// Koornwinder parameters matching the spherical labels: base `q²`, `t = q^{2κ+2}`,
/// `a = -q^{σ+τ+1+2(κ1+κ2)}`, `b = -q^{1-σ-τ}`, `c = q^{σ-τ+1}`, `d = q^{-σ+τ+1+2(κ1-κ2)}`.
pub fn spherical_parameter_map<T: Scalar>(labels: &SphericalLabels<T>) -> Result<MKParams<T>> {
    let q = &labels.q;
    let (s, t) = (labels.sigma.clone(), labels.tau.clone());
    let one = T::one();
    let k = |x: i64| T::from_i64(x);
    let a = -q.pow(&(s.clone() + t.clone() + one.clone() + k(2 * (labels.kappa1 + labels.kappa2))))?;
    let b = -q.pow(&(one.clone() - s.clone() - t.clone()))?;
    let c = q.pow(&(s.clone() - t.clone() + one.clone()))?;
    let d = q.pow(&(t - s + one + k(2 * (labels.kappa1 - labels.kappa2))))?;
    Ok(MKParams::new(a, b, c, d, q.powi(2 * labels.kappa + 2), q.squared()))
}
