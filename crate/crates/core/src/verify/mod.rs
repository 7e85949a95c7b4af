//! Independent oracles and refinement machinery.

pub mod convergence;
pub mod mms;
pub mod pb;
pub mod vacuum;

pub use convergence::{convergence_study, entropy_study, log_slope, mms_study, ConvergenceReport};
pub use mms::{mms_source, FieldErrors, Manufactured, MmsSource, TrigField, TrigTerm};
pub use pb::{linearized_amplitude, poisson_boltzmann_oracle, PbSolution};
pub use vacuum::{expansion_config, vacuum_experiment, VacuumBranch, VacuumReport};
