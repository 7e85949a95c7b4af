//! Pressure state law, internal energy and the entropy function `sigma`.
//!
//! The law is singular near vacuum and a `gamma` power above the reference
//! density 1:
//!
//! ```text
//! p(rho) = -c1 rho^{-4k}   rho <= 1
//! p(rho) =  c2 rho^gamma   rho >  1
//! ```
//!
//! The two branches do not meet at `rho = 1`. Dynamics only ever uses
//! `p'(rho) grad rho`, which is positive on both sides, so the jump never
//! enters the momentum balance.

use crate::error::{Error, Result};
use crate::params::PhysParams;
use crate::real::Real;

/// How the two pressure branches are glued at `rho = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PressureMode {
    /// Branch values verbatim, discontinuous at 1.
    #[default]
    PaperRaw,
    /// Antiderivative of `p'` with `p(1) = -c1`, continuous at 1.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureLaw<T> {
    pub c1: T,
    pub c2: T,
    pub gamma: T,
    pub k_sing: T,
    pub mode: PressureMode,
}

/// `x^e`, through `powi` when the exponent is a small integer.
#[inline]
fn pow<T: Real>(x: T, e: T) -> T {
    if e.fract() == T::zero() && e.abs() <= T::lit(64.0) {
        x.powi(e.to_i32().expect("small integer"))
    } else {
        x.powf(e)
    }
}

#[inline]
fn check_density<T: Real>(rho: T) -> Result<()> {
    if rho > T::zero() {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity { value: rho.as_f64(), cell: 0 })
    }
}

impl<T: Real> PressureLaw<T> {
    pub fn new(phys: &PhysParams<T>, mode: PressureMode) -> Self {
        Self { c1: phys.c1, c2: phys.c2, gamma: phys.gamma, k_sing: phys.k_sing, mode }
    }

    /// True when `c1 = 0`: the `gamma` law extends down to vacuum.
    #[inline]
    pub fn gamma_only(&self) -> bool {
        self.c1 == T::zero()
    }

    #[inline]
    fn singular_exponent(&self) -> T {
        T::lit(4.0) * self.k_sing
    }

    #[inline]
    fn singular_branch(&self, rho: T) -> bool {
        !self.gamma_only() && rho <= T::one()
    }

    pub fn pressure(&self, rho: T) -> Result<T> {
        check_density(rho)?;
        let one = T::one();
        let value = if self.singular_branch(rho) {
            -self.c1 * pow(rho, -self.singular_exponent())
        } else if self.gamma_only() {
            self.c2 * pow(rho, self.gamma)
        } else {
            match self.mode {
                PressureMode::PaperRaw => self.c2 * pow(rho, self.gamma),
                PressureMode::Continuous => -self.c1 + self.c2 * (pow(rho, self.gamma) - one),
            }
        };
        Ok(value)
    }

    /// `p'(rho)`, strictly positive on both branches.
    pub fn dpressure(&self, rho: T) -> Result<T> {
        check_density(rho)?;
        Ok(self.dpressure_unchecked(rho))
    }

    /// `p'(rho)` for a density already known to be positive.
    #[inline]
    pub fn dpressure_unchecked(&self, rho: T) -> T {
        if self.singular_branch(rho) {
            let m = self.singular_exponent();
            m * self.c1 * pow(rho, -m - T::one())
        } else {
            self.c2 * self.gamma * pow(rho, self.gamma - T::one())
        }
    }

    /// Specific internal energy `e(rho) = int_1^rho p(s)/s^2 ds`, so `e(1) = 0`.
    pub fn internal_energy(&self, rho: T) -> Result<T> {
        check_density(rho)?;
        Ok(self.internal_energy_unchecked(rho))
    }

    #[inline]
    pub fn internal_energy_unchecked(&self, rho: T) -> T {
        let one = T::one();
        let gm1 = self.gamma - one;
        let gamma_part = self.c2 * (pow(rho, gm1) - one) / gm1;
        if self.singular_branch(rho) {
            let m1 = self.singular_exponent() + one;
            self.c1 / m1 * (pow(rho, -m1) - one)
        } else if self.gamma_only() {
            gamma_part
        } else {
            match self.mode {
                PressureMode::PaperRaw => gamma_part,
                PressureMode::Continuous => gamma_part + (self.c1 + self.c2) * (one / rho - one),
            }
        }
    }

    pub fn sound_speed(&self, rho: T) -> Result<T> {
        Ok(self.dpressure(rho)?.sqrt())
    }
}

/// `sigma(s) = s ln s - s + 1`, extended by continuity to `sigma(0) = 1`.
pub fn sigma<T: Real>(s: T) -> Result<T> {
    if s < T::zero() {
        return Err(Error::NegativeArgument(s.as_f64()));
    }
    Ok(sigma_unchecked(s))
}

#[inline]
pub(crate) fn sigma_unchecked<T: Real>(s: T) -> T {
    if s == T::zero() {
        T::one()
    } else {
        s * s.ln() - s + T::one()
    }
}

/// Relative entropy `rho sigma(c / rho) = c ln(c/rho) - c + rho`; equals `rho`
/// when `c = 0`.
pub fn relative_entropy<T: Real>(rho: T, c: T) -> Result<T> {
    check_density(rho)?;
    if c < T::zero() {
        return Err(Error::NegativeArgument(c.as_f64()));
    }
    Ok(relative_entropy_unchecked(rho, c))
}

#[inline]
pub(crate) fn relative_entropy_unchecked<T: Real>(rho: T, c: T) -> T {
    if c == T::zero() {
        rho
    } else {
        c * (c / rho).ln() - c + rho
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn law(c1: f64, c2: f64, gamma: f64, k: f64, mode: PressureMode) -> PressureLaw<f64> {
        PressureLaw { c1, c2, gamma, k_sing: k, mode }
    }

    fn raw() -> PressureLaw<f64> {
        law(1.0, 1.0, 2.0, 1.0, PressureMode::PaperRaw)
    }

    #[test]
    fn pressure_branch_values() {
        assert_eq!(raw().pressure(1.0).unwrap(), -1.0);
        assert_eq!(raw().pressure(2.0).unwrap(), 4.0);
        assert_relative_eq!(raw().pressure(0.5).unwrap(), -16.0, max_relative = 1e-15);
        assert!(matches!(raw().pressure(0.0), Err(Error::NonPositiveDensity { .. })));
        assert!(raw().pressure(-1.0).is_err());
    }

    #[test]
    fn dpressure_branch_values() {
        assert_relative_eq!(raw().dpressure(0.5).unwrap(), 128.0, max_relative = 1e-15);
        assert_relative_eq!(raw().dpressure(2.0).unwrap(), 4.0, max_relative = 1e-15);
        // one-sided limits at the reference density
        assert_relative_eq!(raw().dpressure(1.0).unwrap(), 4.0, max_relative = 1e-15);
        assert_relative_eq!(raw().dpressure(1.0 + 1e-12).unwrap(), 2.0, max_relative = 1e-9);
        assert!(raw().dpressure(0.0).is_err());
    }

    #[test]
    fn internal_energy_values() {
        assert_eq!(raw().internal_energy(1.0).unwrap(), 0.0);
        assert_relative_eq!(raw().internal_energy(0.5).unwrap(), 6.2, max_relative = 1e-14);
        assert_relative_eq!(raw().internal_energy(2.0).unwrap(), 1.0, max_relative = 1e-14);
        assert!(raw().internal_energy(0.0).is_err());
    }

    #[test]
    fn internal_energy_is_coercive_and_nonnegative() {
        let l = raw();
        assert!(l.internal_energy(1e-3).unwrap() > 1e10);
        assert!(l.internal_energy(1e3).unwrap() > 900.0);
        let mut rho = 1e-3;
        while rho < 1e3 {
            assert!(l.internal_energy(rho).unwrap() >= 0.0, "e({rho}) < 0");
            rho *= 1.05;
        }
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1.0).unwrap(), 0.0);
        assert_eq!(sigma(0.0).unwrap(), 1.0);
        assert_relative_eq!(sigma(2.0f64).unwrap(), 2.0 * 2f64.ln() - 1.0, max_relative = 1e-15);
        assert_relative_eq!(sigma(2.0f64).unwrap(), 0.386294, epsilon = 1e-6);
        assert!(matches!(sigma(-0.1), Err(Error::NegativeArgument(_))));
    }

    #[test]
    fn continuous_mode_is_continuous_at_one() {
        let l = law(1.5, 0.7, 1.4, 1.0, PressureMode::Continuous);
        let below = l.pressure(1.0).unwrap();
        let above = l.pressure(1.0 + 1e-14).unwrap();
        assert!((below - above).abs() < 1e-12);
        assert_eq!(l.pressure(1.0).unwrap(), -1.5);
        // derivative matches the raw branch derivatives on each open branch
        let r = law(1.5, 0.7, 1.4, 1.0, PressureMode::PaperRaw);
        for rho in [0.3, 0.9, 1.1, 3.0] {
            assert_eq!(l.dpressure(rho).unwrap(), r.dpressure(rho).unwrap());
        }
    }

    #[test]
    fn gamma_only_law() {
        let l = law(0.0, 1.0, 2.0, 1.0, PressureMode::PaperRaw);
        assert_eq!(l.pressure(0.5).unwrap(), 0.25);
        assert_eq!(l.dpressure(0.5).unwrap(), 1.0);
        assert_relative_eq!(l.internal_energy(0.5).unwrap(), -0.5, max_relative = 1e-15);
    }

    #[test]
    fn relative_entropy_vacuum_limit() {
        assert_eq!(relative_entropy(2.0, 0.0).unwrap(), 2.0);
        assert_eq!(relative_entropy(2.0, 2.0).unwrap(), 0.0);
        assert!(relative_entropy(0.0, 1.0).is_err());
    }

    fn admissible_law() -> impl Strategy<Value = PressureLaw<f64>> {
        (0.1f64..5.0, 0.1f64..5.0, 1.05f64..3.0, 1.0f64..3.0)
            .prop_map(|(c1, c2, g, k)| law(c1, c2, g, k, PressureMode::PaperRaw))
    }

    proptest! {
        #[test]
        fn dpressure_positive_on_log_sweep(l in admissible_law(), t in 0.0f64..1.0) {
            let rho = 10f64.powf(-3.0 + 6.0 * t);
            let dp = l.dpressure(rho).unwrap();
            prop_assert!(dp > 0.0);
        }

        #[test]
        fn energy_derivative_matches_pressure(l in admissible_law(), rho in 0.2f64..4.0) {
            // stay away from the branch point where e has a kink
            prop_assume!((rho - 1.0).abs() > 0.05);
            let d = 1e-4;
            let fd = (l.internal_energy(rho + d).unwrap() - l.internal_energy(rho - d).unwrap()) / (2.0 * d);
            let exact = l.pressure(rho).unwrap() / (rho * rho);
            prop_assert!((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()), "fd {} exact {}", fd, exact);
        }

        #[test]
        fn sigma_is_convex(a in 0.0f64..10.0, b in 0.0f64..10.0, lam in 0.0f64..1.0) {
            let mid = sigma(lam * a + (1.0 - lam) * b).unwrap();
            let chord = lam * sigma(a).unwrap() + (1.0 - lam) * sigma(b).unwrap();
            prop_assert!(mid <= chord + 1e-12);
            prop_assert!(mid >= 0.0);
        }

        #[test]
        fn relative_entropy_nonnegative(rho in 1e-3f64..10.0, c in 0.0f64..10.0) {
            prop_assert!(relative_entropy(rho, c).unwrap() >= -1e-14);
        }
    }
}
