//! Physical constants and regularization parameters.

use crate::error::{Error, Result};
use crate::real::Real;

/// Physical constants of the model. Bulk viscosity is identically zero and
/// shear viscosity is `mu * rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams<T> {
    pub mu: T,
    pub e_charge: T,
    pub a_plus: T,
    pub a_minus: T,
    pub eps: T,
    pub gamma: T,
    pub k_sing: T,
    /// Coefficient of the singular branch `-c1 rho^{-4k}`. Zero switches the
    /// singular branch off and the `gamma` law holds for every density.
    pub c1: T,
    pub c2: T,
}

impl<T: Real> Default for PhysParams<T> {
    fn default() -> Self {
        let one = T::one();
        Self {
            mu: one,
            e_charge: one,
            a_plus: one,
            a_minus: one,
            eps: one,
            gamma: T::lit(2.0),
            k_sing: one,
            c1: one,
            c2: one,
        }
    }
}

fn require_positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl<T: Real> PhysParams<T> {
    pub fn validate(&self) -> Result<()> {
        require_positive("mu", self.mu)?;
        require_positive("e_charge", self.e_charge)?;
        require_positive("a_plus", self.a_plus)?;
        require_positive("a_minus", self.a_minus)?;
        require_positive("eps", self.eps)?;
        require_positive("c2", self.c2)?;
        if !(self.gamma > T::one()) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must exceed 1, got {}",
                self.gamma
            )));
        }
        if !(self.k_sing >= T::one()) || !self.k_sing.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "k_sing must be at least 1, got {}",
                self.k_sing
            )));
        }
        if !(self.c1 >= T::zero()) || !self.c1.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "c1 must be nonnegative, got {}",
                self.c1
            )));
        }
        Ok(())
    }

    /// Mobility for the given ion sign (`+1` cations, `-1` anions).
    pub fn mobility(&self, sign: IonSign) -> T {
        match sign {
            IonSign::Plus => self.a_plus,
            IonSign::Minus => self.a_minus,
        }
    }

    /// Parameters with cation and anion mobilities exchanged.
    pub fn swapped_ions(&self) -> Self {
        Self { a_plus: self.a_minus, a_minus: self.a_plus, ..*self }
    }
}

/// Charge sign of an ion species.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IonSign {
    Plus,
    Minus,
}

impl IonSign {
    pub fn factor<T: Real>(self) -> T {
        match self {
            IonSign::Plus => T::one(),
            IonSign::Minus => -T::one(),
        }
    }
}

/// Regularization of the approximate system. All zero selects the physical
/// system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegParams<T> {
    /// Density diffusion.
    pub xi: T,
    /// Hyperviscosity on `u`.
    pub eta: T,
    /// Coefficient of the high-order term `rho grad Lap^{2s+1} rho`.
    pub delta: T,
    /// Smoothing of the Poisson source, `(1 - zeta Lap) Psi = e (c+ - c-)`.
    pub zeta: T,
    pub s_order: usize,
}

impl<T: Real> Default for RegParams<T> {
    fn default() -> Self {
        Self { xi: T::zero(), eta: T::zero(), delta: T::zero(), zeta: T::zero(), s_order: 2 }
    }
}

impl<T: Real> RegParams<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("xi", self.xi), ("eta", self.eta), ("delta", self.delta), ("zeta", self.zeta)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if 2 * self.s_order + 1 < 4 {
            return Err(Error::InvalidParameter(format!(
                "s_order = {} violates 2s+1 >= 4",
                self.s_order
            )));
        }
        Ok(())
    }

    pub fn is_physical(&self) -> bool {
        self.xi == T::zero() && self.eta == T::zero() && self.delta == T::zero() && self.zeta == T::zero()
    }
}
