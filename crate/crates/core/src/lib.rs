//! Macdonald–Koornwinder polynomials by torus-quadrature orthogonalization,
//! and a rank-one `U_q(gl(2))` quantum symmetric pair model that reconstructs
//! them as restricted spherical functions.
//!
//! Everything numeric is generic over [`Scalar`] / [`Real`]: `f64` (default),
//! `f32`, [`Hp`] (192-bit binary floats) and `BigRational` for the identities
//! that only need field operations and integer powers of `q`.

pub mod error;
pub mod hp;
pub mod koornwinder;
pub mod laurent;
pub mod linalg;
pub mod qseries;
pub mod rankone;
pub mod scalar;
pub mod torus;

pub use error::{Error, Result};
pub use hp::Hp;
pub use koornwinder::{
    delta_partition, flat_map, ground_state_restriction, mk_family, mk_polynomial, natural_embed,
    spherical_parameter_map, MKFamily, MKPolynomial, SphericalLabels,
};
pub use laurent::{
    a_dominance_leq, dominance_leq, is_w_invariant, orbit_sum, weyl_orbit, Coeff, LaurentPoly, MultiIndex,
    Partition, SignedPermutation,
};
pub use qseries::{q_number, qpoch_finite, qpoch_infinite, theta, QBase, TruncationPolicy};
pub use rankone::{
    b_eigenvector, branching_check, build_module, coideal_b, coideal_bhat, rosengren_check, rosengren_x,
    spectrum, spherical_restriction, verify_theorem_iii_rank1, CoidealOperator, RestrictedSpherical,
    UqGl2Module,
};
pub use scalar::{Real, Scalar};
pub use torus::{
    auto_grid, delta_eval, delta_plus_eval, haar_pairing, validate_params, MKParams, QuadratureGrid, TorusMeasure,
};

pub use num_complex::Complex;
pub use num_rational::BigRational;

pub type Complex64 = Complex<f64>;
pub type LaurentPolyF64 = LaurentPoly<Complex64>;
pub type LaurentPolyHp = LaurentPoly<Complex<Hp>>;
pub type LaurentPolyExact = LaurentPoly<Complex<BigRational>>;
pub type MKParamsF64 = MKParams<f64>;
pub type MKPolynomialF64 = MKPolynomial<f64>;
pub type LabelsF64 = SphericalLabels<f64>;
pub type ModuleF64 = UqGl2Module<f64>;
pub type ModuleHp = UqGl2Module<Hp>;
pub type ModuleExact = UqGl2Module<BigRational>;
