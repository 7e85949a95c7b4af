use super::{stable_dt, step_forced, Forcing, Model};
use crate::config::{RunConfig, Scheme, TimeStep};
use crate::diagnostics::{record, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::state::{make_state, State};

/// Time-stepping plan of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule<T> {
    pub t_final: T,
    pub time_step: TimeStep<T>,
    pub scheme: Scheme,
    /// Diagnostics every `cadence` steps; `0` records only the endpoints.
    pub cadence: usize,
    pub snapshot_every: Option<usize>,
}

impl<T: Real> Schedule<T> {
    pub fn of(config: &RunConfig<T>) -> Self {
        Self {
            t_final: config.t_final,
            time_step: config.time_step,
            scheme: config.scheme,
            cadence: config.output.cadence,
            snapshot_every: config.output.snapshot_every,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput<T: Real> {
    pub final_state: State<T>,
    pub records: Vec<DiagnosticsRecord<T>>,
    /// States at `t = 0` and every `snapshot_every` steps.
    pub snapshots: Vec<State<T>>,
    pub steps: usize,
}

/// Builds the initial state and model from `config` and integrates.
pub fn run<T: Real>(config: &RunConfig<T>) -> Result<RunOutput<T>> {
    let model = Model::from_config(config)?;
    let initial = make_state(config)?;
    run_with(&model, initial, &Schedule::of(config), None)
}

/// Integrates `initial` to `schedule.t_final`. The last step is shortened to
/// land on `t_final` exactly.
pub fn run_with<T: Real>(
    model: &Model<T>,
    initial: State<T>,
    schedule: &Schedule<T>,
    forcing: Option<&dyn Forcing<T>>,
) -> Result<RunOutput<T>> {
    let t_final = schedule.t_final;
    let mut state = if initial.consistent { initial } else { model.solve_potential(initial)? };
    let mut records = vec![record(model, &state, None)?];
    let mut snapshots = Vec::new();
    if schedule.snapshot_every.is_some() {
        snapshots.push(state.clone());
    }
    let slack = T::lit(1e-12) * t_final.abs().max(T::one());
    let mut steps = 0usize;
    while t_final - state.t > slack {
        let nominal = match schedule.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(c) => c * stable_dt(model, &state, schedule.scheme),
        };
        let remaining = t_final - state.t;
        let last = nominal >= remaining - slack;
        let dt = if last { remaining } else { nominal };
        let mut next = step_forced(model, &state, dt, schedule.scheme, forcing).map_err(|err| match err {
            Error::StepRejected { .. } => err,
            other => other,
        })?;
        if last {
            next.t = t_final;
        }
        steps += 1;
        let due = schedule.cadence > 0 && steps % schedule.cadence == 0;
        if due || last {
            records.push(record(model, &next, Some(&state))?);
        }
        if schedule.snapshot_every.is_some_and(|every| steps % every == 0) {
            snapshots.push(next.clone());
        }
        state = next;
    }
    Ok(RunOutput { final_state: state, records, snapshots, steps })
}
