//! Periodic constant-coefficient elliptic solves by diagonal inversion.
//!
//! Both solves divide by the Fourier symbol of the backend Laplacian, so the
//! discrete relations `-eps lap(psi) = q` and `psi - zeta lap(psi) = q` hold
//! to round-off for the operator the dynamics actually uses.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::ops::Ops;
use crate::params::{PhysParams, RegParams};
use crate::real::Real;

/// Relative tolerance on the mean of a Poisson source.
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// Relative tolerance on net charge, measured against the ion content.
pub const NEUTRALITY_TOLERANCE: f64 = 1e-10;

/// Solves `-eps lap(psi) = q` with zero-mean gauge.
pub fn solve_poisson<T: Real>(ops: &Ops<T>, q: &ScalarField<T>, eps: T) -> Result<ScalarField<T>> {
    q.check_grid(ops.grid())?;
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let mean = q.mean();
    let tolerance = T::lit(MEAN_TOLERANCE) * q.max_abs();
    if mean.abs() > tolerance {
        return Err(Error::NonZeroMeanSource { mean: mean.as_f64(), tolerance: tolerance.as_f64() });
    }
    Ok(poisson_unchecked(ops, q, eps))
}

/// Poisson inversion that silently drops the zero mode of `q`.
pub(crate) fn poisson_unchecked<T: Real>(ops: &Ops<T>, q: &ScalarField<T>, eps: T) -> ScalarField<T> {
    ops.apply_symbol(q, |idx| {
        let lam = ops.laplacian_symbol(idx);
        if idx == 0 || lam == T::zero() {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(-T::one() / (eps * lam), T::zero())
        }
    })
}

/// Solves `(1 - zeta lap) Psi = q`; `zeta = 0` returns `q` unchanged.
pub fn solve_helmholtz<T: Real>(ops: &Ops<T>, q: &ScalarField<T>, zeta: T) -> Result<ScalarField<T>> {
    q.check_grid(ops.grid())?;
    if !(zeta >= T::zero()) {
        return Err(Error::InvalidParameter(format!("zeta must be nonnegative, got {zeta}")));
    }
    if zeta == T::zero() {
        return Ok(q.clone());
    }
    Ok(ops.apply_symbol(q, |idx| Complex::new(T::one() / (T::one() - zeta * ops.laplacian_symbol(idx)), T::zero())))
}

/// Potential pair computed from an ion configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T: Real> {
    pub psi: ScalarField<T>,
    pub psi_cap: ScalarField<T>,
}

/// Solves `(1 - zeta lap) Psi = e (c+ - c-)` then `-eps lap(psi) = Psi`.
///
/// A net charge within round-off of the ion content is projected out. A
/// larger one fails with `NonZeroMeanSource` unless `enforce_neutrality`
/// requests that its mean be subtracted.
pub fn potential_from_ions<T: Real>(
    ops: &Ops<T>,
    c_plus: &ScalarField<T>,
    c_minus: &ScalarField<T>,
    phys: &PhysParams<T>,
    reg: &RegParams<T>,
    enforce_neutrality: bool,
) -> Result<Potential<T>> {
    c_plus.check_grid(ops.grid())?;
    c_minus.check_grid(ops.grid())?;
    let e = phys.e_charge;
    let mut q = c_plus.zip_map(c_minus, |a, b| e * (a - b));
    let mean = q.mean();
    let scale = e * (c_plus.map(|v| v.abs()).mean() + c_minus.map(|v| v.abs()).mean());
    let tolerance = T::lit(NEUTRALITY_TOLERANCE) * scale;
    if mean.abs() > tolerance {
        if !enforce_neutrality {
            return Err(Error::NonZeroMeanSource { mean: mean.as_f64(), tolerance: tolerance.as_f64() });
        }
        log::info!("subtracting mean charge {mean:e} before the potential solve");
    }
    for v in q.values_mut() {
        *v -= mean;
    }
    let psi_cap = solve_helmholtz(ops, &q, reg.zeta)?;
    let psi = poisson_unchecked(ops, &psi_cap, phys.eps);
    Ok(Potential { psi, psi_cap })
}
