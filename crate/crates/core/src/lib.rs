//! Structure-preserving solver for the Poisson-Nernst-Planck system coupled
//! to compressible Navier-Stokes with density-dependent viscosity `mu rho`,
//! on periodic grids in one or two dimensions.
//!
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the crate
//! root re-exports `f64` aliases for everyday use.

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod elliptic;
pub mod eos;
pub mod error;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod ops;
pub mod params;
pub mod real;
pub mod snapshot;
pub mod state;
pub mod verify;

pub use eos::PressureMode;
pub use error::{Error, Result};
pub use ops::Backend;
pub use params::IonSign;
pub use real::Real;

pub type Grid = grid::Grid<f64>;
pub type ScalarField = field::ScalarField<f64>;
pub type VectorField = field::VectorField<f64>;
pub type TensorField = field::TensorField<f64>;
pub type PhysParams = params::PhysParams<f64>;
pub type RegParams = params::RegParams<f64>;
pub type PressureLaw = eos::PressureLaw<f64>;
pub type Ops = ops::Ops<f64>;
pub type State = state::State<f64>;
pub type Model = dynamics::Model<f64>;
pub type Tendency = dynamics::Tendency<f64>;
pub type RunConfig = config::RunConfig<f64>;
pub type TimeStep = config::TimeStep<f64>;
pub use config::{InitialData, OutputSpec, Profile, Scheme};
pub type DiagnosticsRecord = diagnostics::DiagnosticsRecord<f64>;
pub type Potential = elliptic::Potential<f64>;
