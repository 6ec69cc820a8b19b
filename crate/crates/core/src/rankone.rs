//! Matrix model of the rank-one quantum symmetric pair: the modules
//! `L_{(m,-m)}` of `U_q(gl(2))`, the coideal generator `B^σ`, its Cartan-type
//! conjugate `B̂^σ`, the Rosengren conjugator `x_σ`, and restricted
//! vector-valued spherical functions.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::koornwinder::{mk_polynomial, spherical_parameter_map, MKPolynomial, SphericalLabels};
use crate::laurent::{LaurentPoly, MultiIndex, Partition};
use crate::linalg::{Matrix, SymTridiagonal};
use crate::qseries::{coideal_eigenvalue, q_number, qpoch_finite, theta, QBase, TruncationPolicy};
use crate::scalar::{real, Real, Scalar};
use crate::torus::QuadratureGrid;

/// Window around `s_l` used when counting or matching eigenvalues.
pub const EIGEN_WINDOW: f64 = 1e-8;
/// Restricted spherical functions with every coefficient below this vanish.
pub const ZERO_FUNCTION_TOL: f64 = 1e-13;

/// Allowed relative residual of the defining relations for scalar type `T`:
/// `1e-12` at 64-bit, scaled with the unit roundoff otherwise, and zero when exact.
pub fn relation_tol<T: Scalar>() -> f64 {
    if T::is_exact() {
        0.0
    } else {
        1e-12 * T::epsilon() / f64::EPSILON
    }
}

/// `max|lhs - rhs| / max(1, max|rhs|)`.
fn rel_residual<T: Scalar>(lhs: &Matrix<T>, rhs: &Matrix<T>) -> f64 {
    (lhs - rhs).max_abs() / rhs.max_abs().max(1.0)
}

/// The module `L_{(m,-m)}` in the weight basis `e_0..e_{2m}`, `e_k` of weight `(m-k, k-m)`.
#[derive(Clone, Debug)]
pub struct UqGl2Module<T> {
    m: usize,
    q: QBase<T>,
    pub x: Matrix<T>,
    pub y: Matrix<T>,
    pub k1: Matrix<T>,
    pub k2: Matrix<T>,
    pub k1_inv: Matrix<T>,
    pub k2_inv: Matrix<T>,
    /// Diagonal of the invariant Hermitian form, `gram[0] = 1`.
    pub gram: Vec<T>,
}

/// Builds `L_{(m,-m)}` and verifies the defining relations.
pub fn build_module<T: Scalar>(m: usize, q: &QBase<T>) -> Result<UqGl2Module<T>> {
    let dim = 2 * m + 1;
    let mi = m as i64;
    let mut x = Matrix::zeros(dim, dim);
    let mut y = Matrix::zeros(dim, dim);
    let mut k1 = Vec::with_capacity(dim);
    let mut k2 = Vec::with_capacity(dim);
    for k in 0..dim {
        let ki = k as i64;
        if k > 0 {
            x[(k - 1, k)] = q_number(ki, q);
        }
        if k < 2 * m {
            y[(k + 1, k)] = q_number(2 * mi - ki, q);
        }
        k1.push(q.powi(mi - ki));
        k2.push(q.powi(ki - mi));
    }
    let inv = |d: &[T]| d.iter().map(|v| T::one() / v.clone()).collect::<Vec<_>>();
    let mut gram = vec![T::one()];
    for k in 1..dim {
        let ki = k as i64;
        let g = gram[k - 1].clone() * q_number(ki, q) * q.value().clone()
            / (q.powi(2 * (mi - ki + 1)) * q_number(2 * mi - ki + 1, q));
        gram.push(g);
    }
    let module = UqGl2Module {
        m,
        q: q.clone(),
        x,
        y,
        k1_inv: Matrix::diagonal(&inv(&k1)),
        k2_inv: Matrix::diagonal(&inv(&k2)),
        k1: Matrix::diagonal(&k1),
        k2: Matrix::diagonal(&k2),
        gram,
    };
    let tol = relation_tol::<T>();
    for (relation, residual) in module.relation_residuals() {
        if residual > tol {
            return Err(Error::RelationViolation { relation, residual });
        }
    }
    let residual = module.unitarity_residual();
    if residual > tol {
        return Err(Error::RelationViolation { relation: "unitarity", residual });
    }
    Ok(module)
}

impl<T: Scalar> UqGl2Module<T> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        2 * self.m + 1
    }

    pub fn q(&self) -> &QBase<T> {
        &self.q
    }

    /// Relative residual of each defining relation.
    pub fn relation_residuals(&self) -> Vec<(&'static str, f64)> {
        let n = self.dim();
        let id = Matrix::identity(n);
        let q = self.q.value().clone();
        let qi = T::one() / q.clone();
        let (x, y, k1, k2, k1i, k2i) = (&self.x, &self.y, &self.k1, &self.k2, &self.k1_inv, &self.k2_inv);
        let conj = |k: &Matrix<T>, ki: &Matrix<T>, a: &Matrix<T>| &(k * a) * ki;
        let comm = &(x * y) - &(y * x);
        let cartan = (&(k1 * k2i) - &(k1i * k2)).scale(&(T::one() / (q.clone() - qi.clone())));
        vec![
            ("K1 K1^-1 = 1", rel_residual(&(k1 * k1i), &id)),
            ("K2 K2^-1 = 1", rel_residual(&(k2 * k2i), &id)),
            ("K1 K2 = K2 K1", rel_residual(&(k1 * k2), &(k2 * k1))),
            ("K1 x K1^-1 = q x", rel_residual(&conj(k1, k1i, x), &x.scale(&q))),
            ("K2 x K2^-1 = q^-1 x", rel_residual(&conj(k2, k2i, x), &x.scale(&qi))),
            ("K1 y K1^-1 = q^-1 y", rel_residual(&conj(k1, k1i, y), &y.scale(&qi))),
            ("K2 y K2^-1 = q y", rel_residual(&conj(k2, k2i, y), &y.scale(&q))),
            ("xy - yx = (K1K2^-1 - K1^-1K2)/(q - q^-1)", rel_residual(&comm, &cartan)),
        ]
    }

    /// `G^{-1} xᵀ G` against `q^{-1} y K1 K2^{-1}`: the Gram form realizes the `*`-structure.
    pub fn unitarity_residual(&self) -> f64 {
        let g = Matrix::diagonal(&self.gram);
        let g_inv = Matrix::diagonal(&self.gram.iter().map(|v| T::one() / v.clone()).collect::<Vec<_>>());
        let lhs = &(&g_inv * &self.x.transpose()) * &g;
        let qi = T::one() / self.q.value().clone();
        let rhs = (&(&self.y * &self.k1) * &self.k2_inv).scale(&qi);
        rel_residual(&lhs, &rhs)
    }

    /// `C = K1 K2`, the identity on this module.
    pub fn casimir(&self) -> Matrix<T> {
        &self.k1 * &self.k2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoidealKind {
    B,
    Bhat,
    C,
}

#[derive(Clone, Debug)]
pub struct CoidealOperator<T> {
    pub matrix: Matrix<T>,
    pub sigma: T,
    pub kind: CoidealKind,
}

/// `B^σ = y K2^{-1}K1^{-1} + K1^{-1} x K1^{-1} + ϑ_0(q^σ) K1^{-2}`.
pub fn coideal_b<T: Scalar>(module: &UqGl2Module<T>, sigma: &T) -> Result<CoidealOperator<T>> {
    let q = module.q();
    let th = theta(0, &q.pow(sigma)?, q)?;
    let k1i = &module.k1_inv;
    let a = &(&module.y * &module.k2_inv) * k1i;
    let b = &(k1i * &module.x) * k1i;
    let c = (k1i * k1i).scale(&th);
    Ok(CoidealOperator { matrix: &(&a + &b) + &c, sigma: sigma.clone(), kind: CoidealKind::B })
}

/// `B̂^σ = diag(s_m, s_{m-1}, …, s_{-m})` with `s_l = ϑ_0(q^{σ-2l})`.
pub fn coideal_bhat<T: Scalar>(module: &UqGl2Module<T>, sigma: &T) -> Result<CoidealOperator<T>> {
    let m = module.m() as i64;
    let diag = (0..module.dim() as i64)
        .map(|k| coideal_eigenvalue(m - k, sigma, module.q()))
        .collect::<Result<Vec<T>>>()?;
    Ok(CoidealOperator { matrix: Matrix::diagonal(&diag), sigma: sigma.clone(), kind: CoidealKind::Bhat })
}

pub fn coideal_c<T: Scalar>(module: &UqGl2Module<T>) -> CoidealOperator<T> {
    CoidealOperator { matrix: module.casimir(), sigma: T::zero(), kind: CoidealKind::C }
}

/// The Rosengren element on the module; the double series terminates at `l, n ≤ 2m`.
pub fn rosengren_x<T: Scalar>(module: &UqGl2Module<T>, sigma: &T) -> Result<Matrix<T>> {
    let q = module.q();
    let q2 = q.squared();
    let top = 2 * module.m();
    let qs_inv = T::one() / q.pow(sigma)?;
    let shift = -q.pow(&(T::from_i64(2) - T::from_i64(2) * sigma.clone()))?;
    let one_minus_q2 = T::one() - q2.value().clone();
    let ykk = &(&module.y * &module.k1) * &module.k2_inv;
    let x_pows: Vec<Matrix<T>> = (0..=top).map(|l| module.x.pow(l)).collect();
    let y_pows: Vec<Matrix<T>> = (0..=top).map(|n| ykk.pow(n)).collect();
    let mut out = Matrix::zeros(module.dim(), module.dim());
    for l in 0..=top {
        for n in 0..=top {
            let (li, ni) = (l as i64, n as i64);
            let sign = if n % 2 == 0 { T::one() } else { -T::one() };
            let num = qs_inv.powi(li + ni) * sign * q.powi(li * li + 2 * li * ni - li - ni) * one_minus_q2.powi(li + ni);
            let den = qpoch_finite(&shift, &q2, l) * qpoch_finite(q2.value(), &q2, l) * qpoch_finite(q2.value(), &q2, n);
            let term = &x_pows[l] * &y_pows[n];
            out = &out + &term.scale(&(num / den));
        }
    }
    Ok(out)
}

/// Outcome of conjugating `B^σ` by `x_σ`.
#[derive(Clone, Debug)]
pub struct RosengrenCheck<T> {
    pub x: Matrix<T>,
    /// `‖x_σ B^σ x_σ^{-1} - B̂^σ‖_max`.
    pub residual: f64,
    /// 1-norm condition number of `x_σ`.
    pub condition: f64,
}

/// Builds `x_σ` and measures the conjugation identity.
///
/// Fails with `SingularConjugator` when `x_σ` is singular to working precision
/// (`cond₁ · ε > 1`, or exactly singular in rational arithmetic).
pub fn rosengren_check<T: Scalar>(module: &UqGl2Module<T>, sigma: &T) -> Result<RosengrenCheck<T>> {
    let x = rosengren_x(module, sigma)?;
    let x_inv = x.inverse().ok_or(Error::SingularConjugator { condition: f64::INFINITY })?;
    let condition = x.norm1() * x_inv.norm1();
    if condition * T::epsilon() > 1.0 {
        return Err(Error::SingularConjugator { condition });
    }
    let b = coideal_b(module, sigma)?;
    let bhat = coideal_bhat(module, sigma)?;
    let conj = &(&x * &b.matrix) * &x_inv;
    let residual = (&conj - &bhat.matrix).max_abs();
    Ok(RosengrenCheck { x, residual, condition })
}

/// `B^σ` symmetrized by the Gram form: `S = G^{1/2} B G^{-1/2}`.
fn symmetrized<T: Real>(module: &UqGl2Module<T>, sigma: &T) -> Result<SymTridiagonal<T>> {
    let b = coideal_b(module, sigma)?.matrix;
    let n = module.dim();
    let diag = (0..n).map(|k| b[(k, k)].clone()).collect();
    let off = (0..n.saturating_sub(1)).map(|k| (b[(k + 1, k)].clone() * b[(k, k + 1)].clone()).sqrt()).collect();
    Ok(SymTridiagonal::new(diag, off))
}

fn eig_rel_tol<T: Scalar>() -> f64 {
    (T::epsilon() * 4.0).max(1e-300)
}

/// Eigenvalues of `B^σ` in ascending order.
pub fn spectrum<T: Real>(module: &UqGl2Module<T>, sigma: &T) -> Result<Vec<T>> {
    Ok(symmetrized(module, sigma)?.eigenvalues(eig_rel_tol::<T>()))
}

/// Eigenvector of `B^σ` for `s_l`, unit in the Gram norm, with nonnegative `e_0` component.
pub fn b_eigenvector<T: Real>(module: &UqGl2Module<T>, sigma: &T, l: i64) -> Result<Vec<T>> {
    let target = coideal_eigenvalue(l, sigma, module.q())?;
    let s = symmetrized(module, sigma)?;
    let m = module.m() as i64;
    let lambda = if l.abs() <= m {
        s.eigenvalue((l + m) as usize, eig_rel_tol::<T>())
    } else {
        // s_l increases with l, so the nearest candidate is an end of the spectrum
        s.eigenvalue(if l > m { 2 * m as usize } else { 0 }, eig_rel_tol::<T>())
    };
    if (lambda.clone() - target.clone()).abs().to_f64() > EIGEN_WINDOW {
        return Err(Error::EigenvalueNotFound { target: target.to_f64(), tol: EIGEN_WINDOW });
    }
    let w = s.eigenvector(&lambda, 3);
    let mut v: Vec<T> = w.iter().zip(&module.gram).map(|(wk, g)| wk.clone() / g.sqrt()).collect();
    let norm = v
        .iter()
        .zip(&module.gram)
        .fold(T::zero(), |acc, (vk, g)| acc + g.clone() * vk.clone() * vk.clone())
        .sqrt();
    let lead = v.iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(T::one);
    let scale = if lead < T::zero() { -T::one() / norm } else { T::one() / norm };
    for c in v.iter_mut() {
        *c = c.clone() * scale.clone();
    }
    Ok(v)
}

/// Multiplicity of `s_{-κ2}` in the spectrum of `B^σ` on `L_{(m,-m)}`.
pub fn branching_check<T: Real>(m: usize, sigma: &T, kappa2: i64, q: &QBase<T>) -> Result<usize> {
    let module = build_module(m, q)?;
    let s = symmetrized(&module, sigma)?;
    let target = coideal_eigenvalue(-kappa2, sigma, q)?;
    let w = T::from_f64(EIGEN_WINDOW);
    Ok(s.count_below(&(target.clone() + w.clone())) - s.count_below(&(target - w)))
}

/// `f_μ|_T` for rank one.
#[derive(Clone, Debug)]
pub struct RestrictedSpherical<T> {
    pub mu: usize,
    pub labels: SphericalLabels<T>,
    pub poly: LaurentPoly<Complex<T>>,
}

/// `f|_T(u) = Σ_ν q^{-ν} g_ν v_ν w_ν u^ν` on the module of highest weight `μ + κ1`,
/// with `v` the `s_{-κ2}`-eigenvector of `B^σ` and `w` the `s_{-κ1}`-eigenvector of `B^τ`.
pub fn spherical_restriction<T: Real>(mu: usize, labels: &SphericalLabels<T>) -> Result<RestrictedSpherical<T>> {
    if labels.n != 1 {
        return Err(Error::InvalidArgument(format!("rank-one restriction needs n = 1, got {}", labels.n)));
    }
    let m = mu + labels.kappa1 as usize;
    let module = build_module(m, &labels.q)?;
    let v = b_eigenvector(&module, &labels.sigma, -labels.kappa2)?;
    let w = b_eigenvector(&module, &labels.tau, -labels.kappa1)?;
    let mi = m as i64;
    let terms = (0..module.dim()).map(|k| {
        let nu = mi - k as i64;
        let c = labels.q.powi(-nu) * module.gram[k].clone() * v[k].clone() * w[k].clone();
        (MultiIndex::new(vec![nu]), real(c))
    });
    let poly = LaurentPoly::from_terms(1, terms)?;
    if poly.max_abs_coeff() < ZERO_FUNCTION_TOL {
        return Err(Error::ZeroFunction);
    }
    Ok(RestrictedSpherical { mu, labels: labels.clone(), poly })
}

/// Two-pipeline comparison for one degree.
#[derive(Clone, Debug)]
pub struct TheoremCheck<T> {
    pub mu: usize,
    /// Max coefficient of `s·f_μ|_T - P_μ·f_0|_T` relative to the largest coefficient of `P_μ·f_0|_T`.
    pub residual: f64,
    /// The scale `s` matching the top coefficients.
    pub scale: Complex<T>,
    pub polynomial: MKPolynomial<T>,
}

/// Residual of `s·f_μ = P·f_0` after matching the coefficient of `u^{top}`.
pub fn cross_multiplied_residual<T: Real>(
    f_mu: &LaurentPoly<Complex<T>>,
    f_0: &LaurentPoly<Complex<T>>,
    p: &LaurentPoly<Complex<T>>,
    top: i64,
) -> Result<(f64, Complex<T>)> {
    let rhs = p * f_0;
    let key = MultiIndex::new(vec![top]);
    let lead = f_mu.coeff(&key);
    if lead.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let scale = rhs.coeff(&key) / lead;
    let lhs = f_mu.scale(&scale);
    let residual = lhs.max_abs_diff(&rhs) / rhs.max_abs_coeff().max(f64::MIN_POSITIVE);
    Ok((residual, scale))
}

/// Compares `f_μ|_T / f_0|_T` with `P_μ` at the mapped parameters (base `q²`).
pub fn verify_theorem_iii_rank1<T: Real>(
    mu: usize,
    labels: &SphericalLabels<T>,
    grid: &QuadratureGrid,
    policy: &TruncationPolicy,
) -> Result<TheoremCheck<T>> {
    let f_mu = spherical_restriction(mu, labels)?;
    let f_0 = spherical_restriction(0, labels)?;
    let params = spherical_parameter_map(labels)?;
    let polynomial = mk_polynomial(&Partition::new(vec![mu as i64])?, &params, grid, policy)?;
    let top = mu as i64 + labels.kappa1;
    let (residual, scale) = cross_multiplied_residual(&f_mu.poly, &f_0.poly, &polynomial.poly, top)?;
    Ok(TheoremCheck { mu, residual, scale, polynomial })
}
