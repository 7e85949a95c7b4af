//! Semi-discrete right-hand sides and time integration.
//!
//! The integrators advance the conservative variables `(rho, m = rho u, c+, c-)`
//! and rebuild `u = m / rho` and the potential after every stage.

mod rhs;
mod run;
mod step;

pub use rhs::{rhs, rhs_ion, rhs_mass, rhs_momentum};
pub use run::{run, run_with, RunOutput, Schedule};
pub use step::{stable_dt, step, step_forced, STABILITY_BUDGET_IMEX, STABILITY_BUDGET_RK4};

use crate::config::RunConfig;
use crate::eos::{PressureLaw, PressureMode};
use crate::error::Result;
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::ops::{Backend, Ops};
use crate::params::{PhysParams, RegParams};
use crate::real::Real;
use crate::state::State;

/// Everything a right-hand-side evaluation needs besides the state.
#[derive(Debug, Clone)]
pub struct Model<T: Real> {
    pub phys: PhysParams<T>,
    pub reg: RegParams<T>,
    pub law: PressureLaw<T>,
    pub enforce_neutrality: bool,
    pub frozen_fluid: bool,
    ops: Ops<T>,
}

impl<T: Real> Model<T> {
    pub fn new(grid: Grid<T>, backend: Backend, phys: PhysParams<T>, reg: RegParams<T>) -> Result<Self> {
        phys.validate()?;
        reg.validate()?;
        Ok(Self {
            law: PressureLaw::new(&phys, PressureMode::PaperRaw),
            phys,
            reg,
            enforce_neutrality: false,
            frozen_fluid: false,
            ops: Ops::new(grid, backend),
        })
    }

    pub fn from_config(config: &RunConfig<T>) -> Result<Self> {
        config.validate()?;
        let mut model = Self::new(config.grid, config.backend, config.phys, config.reg)?;
        model.law = PressureLaw::new(&config.phys, config.pressure_mode);
        model.enforce_neutrality = config.enforce_neutrality;
        model.frozen_fluid = config.frozen_fluid;
        Ok(model)
    }

    #[inline]
    pub fn ops(&self) -> &Ops<T> {
        &self.ops
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        self.ops.grid()
    }

    /// Re-solves the potential of `state` with this model's settings.
    pub fn solve_potential(&self, state: State<T>) -> Result<State<T>> {
        state.with_potential(&self.ops, &self.phys, &self.reg, self.enforce_neutrality)
    }
}

/// Time derivative of the conservative variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency<T: Real> {
    pub d_rho: ScalarField<T>,
    pub d_mom: VectorField<T>,
    pub d_cplus: ScalarField<T>,
    pub d_cminus: ScalarField<T>,
}

impl<T: Real> Tendency<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            d_rho: ScalarField::zeros(grid),
            d_mom: VectorField::zeros(grid),
            d_cplus: ScalarField::zeros(grid),
            d_cminus: ScalarField::zeros(grid),
        }
    }

    pub fn axpy(&mut self, a: T, other: &Self) {
        self.d_rho.axpy(a, &other.d_rho);
        self.d_mom.axpy(a, &other.d_mom);
        self.d_cplus.axpy(a, &other.d_cplus);
        self.d_cminus.axpy(a, &other.d_cminus);
    }

    pub fn max_abs(&self) -> T {
        self.d_rho
            .max_abs()
            .max(self.d_mom.max_abs())
            .max(self.d_cplus.max_abs())
            .max(self.d_cminus.max_abs())
    }
}

/// External source added to the tendency, e.g. a manufactured forcing.
pub trait Forcing<T: Real> {
    fn forcing(&self, t: T, grid: &Grid<T>) -> Tendency<T>;
}
