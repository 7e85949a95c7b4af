//! Simulation state at one time level.

use crate::config::RunConfig;
use crate::elliptic::potential_from_ions;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::ops::Ops;
use crate::params::{PhysParams, RegParams};
use crate::real::Real;

/// Unknowns `(rho, u, c+, c-, psi, Psi)` at time `t`.
///
/// `consistent` records that `psi` and `psi_cap` were solved from the
/// current ion fields.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T: Real> {
    pub t: T,
    pub rho: ScalarField<T>,
    pub u: VectorField<T>,
    pub c_plus: ScalarField<T>,
    pub c_minus: ScalarField<T>,
    pub psi: ScalarField<T>,
    pub psi_cap: ScalarField<T>,
    pub consistent: bool,
}

impl<T: Real> State<T> {
    /// State with zero potential, flagged inconsistent until solved.
    pub fn from_fields(
        t: T,
        rho: ScalarField<T>,
        u: VectorField<T>,
        c_plus: ScalarField<T>,
        c_minus: ScalarField<T>,
    ) -> Result<Self> {
        let grid = *rho.grid();
        u.grid().check_same(&grid)?;
        if u.dim() != grid.dim() {
            return Err(Error::GridMismatch);
        }
        c_plus.check_grid(&grid)?;
        c_minus.check_grid(&grid)?;
        Ok(Self {
            t,
            rho,
            u,
            c_plus,
            c_minus,
            psi: ScalarField::zeros(grid),
            psi_cap: ScalarField::zeros(grid),
            consistent: false,
        })
    }

    /// `rho = 1`, `u = 0`, `c+ = c- = 1`, zero potential.
    pub fn rest(grid: Grid<T>) -> Self {
        let one = ScalarField::constant(grid, T::one());
        Self {
            t: T::zero(),
            rho: one.clone(),
            u: VectorField::zeros(grid),
            c_plus: one.clone(),
            c_minus: one,
            psi: ScalarField::zeros(grid),
            psi_cap: ScalarField::zeros(grid),
            consistent: true,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        self.rho.grid()
    }

    /// Momentum `m = rho u`.
    pub fn momentum(&self) -> VectorField<T> {
        self.u.map_comps(|c| c.zip_map(&self.rho, |u, r| u * r))
    }

    /// Re-solves `Psi` and `psi` from the ion fields.
    pub fn with_potential(
        mut self,
        ops: &Ops<T>,
        phys: &PhysParams<T>,
        reg: &RegParams<T>,
        enforce_neutrality: bool,
    ) -> Result<Self> {
        let pot = potential_from_ions(ops, &self.c_plus, &self.c_minus, phys, reg, enforce_neutrality)?;
        self.psi = pot.psi;
        self.psi_cap = pot.psi_cap;
        self.consistent = true;
        Ok(self)
    }

    /// Image under `(c+, c-, psi, Psi) -> (c-, c+, -psi, -Psi)`.
    pub fn swap_charges(&self) -> Self {
        Self {
            c_plus: self.c_minus.clone(),
            c_minus: self.c_plus.clone(),
            psi: self.psi.scale(-T::one()),
            psi_cap: self.psi_cap.scale(-T::one()),
            ..self.clone()
        }
    }

    /// Largest pointwise difference over every field.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        [
            self.rho.max_abs_diff(&other.rho),
            self.u.max_abs_diff(&other.u),
            self.c_plus.max_abs_diff(&other.c_plus),
            self.c_minus.max_abs_diff(&other.c_minus),
            self.psi.max_abs_diff(&other.psi),
            self.psi_cap.max_abs_diff(&other.psi_cap),
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }

    /// Positive density, nonnegative ions, finite everything.
    pub fn check_admissible(&self) -> Result<()> {
        let (cell, value) = self.rho.argmin();
        if !(value > T::zero()) {
            return Err(Error::NonPositiveDensity { value: value.as_f64(), cell });
        }
        for c in [&self.c_plus, &self.c_minus] {
            let (cell, value) = c.argmin();
            if !(value >= T::zero()) {
                return Err(Error::NegativeConcentration { value: value.as_f64(), cell });
            }
        }
        let fields = [&self.rho, &self.c_plus, &self.c_minus, &self.psi, &self.psi_cap];
        let bad = fields.iter().find_map(|f| f.first_non_finite()).or_else(|| self.u.first_non_finite());
        match bad {
            Some(cell) => Err(Error::StepRejected {
                t: self.t.as_f64(),
                cell,
                reason: "non-finite value".into(),
            }),
            None => Ok(()),
        }
    }
}

/// Evaluates the initial profiles of `config` and solves the potential.
pub fn make_state<T: Real>(config: &RunConfig<T>) -> Result<State<T>> {
    config.validate()?;
    let grid = config.grid;
    let eval = |p: &crate::config::Profile| ScalarField::from_fn(grid, |x| p.eval(x, grid.length()));
    let rho = eval(&config.init.rho);
    let u = VectorField::from_components(config.init.u[..grid.dim()].iter().map(eval).collect())?;
    let state = State::from_fields(T::zero(), rho, u, eval(&config.init.c_plus), eval(&config.init.c_minus))?;
    state.check_admissible()?;
    let ops = Ops::new(grid, config.backend);
    state
        .with_potential(&ops, &config.phys, &config.reg, config.enforce_neutrality)
        .map_err(|err| match err {
            Error::NonZeroMeanSource { mean, tolerance } => Error::NonNeutralCharge { net: mean, tolerance },
            other => other,
        })
}
