//! Singular versus `gamma`-only pressure under evacuating initial data.

use crate::config::{RunConfig, TimeStep};
use crate::dynamics::{stable_dt, step, Model};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::state::make_state;

/// Minimum-density trajectory of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumBranch<T> {
    pub c1: T,
    /// `(t, min rho)` after every accepted step, starting at `t = 0`.
    pub min_rho_series: Vec<(T, T)>,
    pub min_rho: T,
    pub steps: usize,
    /// Message of the step rejection that ended the branch early, if any.
    pub rejected: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VacuumReport<T> {
    pub singular: VacuumBranch<T>,
    pub gamma_only: VacuumBranch<T>,
}

impl<T: Real> VacuumReport<T> {
    /// The singular branch stays strictly further from vacuum, or neither
    /// branch ever leaves its initial minimum.
    pub fn singular_wins(&self) -> bool {
        let s = self.singular.min_rho;
        let g = self.gamma_only.min_rho;
        let initial = self.singular.min_rho_series.first().map(|p| p.1);
        let vacuous = s == g && Some(s) == initial && self.gamma_only.rejected.is_none();
        (s > g && self.singular.rejected.is_none()) || vacuous
    }
}

/// Integrates one configuration, recording the density minimum each step.
/// A rejected step ends the branch without failing the experiment.
pub fn vacuum_branch<T: Real>(config: &RunConfig<T>) -> Result<VacuumBranch<T>> {
    let model = Model::from_config(config)?;
    let mut state = make_state(config)?;
    let mut series = vec![(state.t, state.rho.min())];
    let mut rejected = None;
    let mut steps = 0;
    let slack = T::lit(1e-12) * config.t_final.max(T::one());
    while config.t_final - state.t > slack {
        let dt = match config.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(c) => c * stable_dt(&model, &state, config.scheme),
        };
        let remaining = config.t_final - state.t;
        let last = dt >= remaining - slack;
        match step(&model, &state, if last { remaining } else { dt }, config.scheme) {
            Ok(mut next) => {
                if last {
                    next.t = config.t_final;
                }
                series.push((next.t, next.rho.min()));
                state = next;
                steps += 1;
            }
            Err(err @ (Error::StepRejected { .. } | Error::StabilityLimit { .. })) => {
                rejected = Some(err.to_string());
                break;
            }
            Err(other) => return Err(other),
        }
    }
    let min_rho = series.iter().map(|p| p.1).fold(T::infinity(), T::min);
    Ok(VacuumBranch { c1: config.phys.c1, min_rho_series: series, min_rho, steps, rejected })
}

/// Checks that the pair differs only in `c1`, with `c1 = 0` on the second.
pub fn check_pair<T: Real>(singular: &RunConfig<T>, gamma_only: &RunConfig<T>) -> Result<()> {
    if !(singular.phys.c1 > T::zero()) {
        return Err(Error::InvalidParameter("singular branch needs c1 > 0".into()));
    }
    if gamma_only.phys.c1 != T::zero() {
        return Err(Error::InvalidParameter("gamma-only branch needs c1 = 0".into()));
    }
    let mut probe = gamma_only.clone();
    probe.phys.c1 = singular.phys.c1;
    probe.output = singular.output.clone();
    if &probe != singular {
        return Err(Error::InvalidParameter("vacuum pair must differ only in c1".into()));
    }
    Ok(())
}

pub fn vacuum_experiment<T: Real>(singular: &RunConfig<T>, gamma_only: &RunConfig<T>) -> Result<VacuumReport<T>> {
    check_pair(singular, gamma_only)?;
    // the branches are independent
    let (s, g) = std::thread::scope(|scope| {
        let h = scope.spawn(|| vacuum_branch(singular));
        let g = vacuum_branch(gamma_only);
        (h.join().expect("singular branch panicked"), g)
    });
    Ok(VacuumReport { singular: s?, gamma_only: g? })
}

/// Expansion setup: `rho0 = 1`, `u0 = amp sin(2 pi x)`, 1D, `T = 0.5`, `k = 1`.
pub fn expansion_config(n: usize, c1: f64, mu: f64) -> Result<RunConfig<f64>> {
    let grid = crate::grid::Grid::unit(1, n)?;
    let mut config = RunConfig::new(grid, 0.5, 1.0);
    config.time_step = TimeStep::Cfl(0.9);
    config.phys.c1 = c1;
    config.phys.mu = mu;
    config.phys.k_sing = 1.0;
    config.init.u = vec!["0.5*sin(1)".parse()?];
    config.output.cadence = 0;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_must_differ_only_in_c1() {
        let s = expansion_config(32, 1.0, 0.1).unwrap();
        let g = expansion_config(32, 0.0, 0.1).unwrap();
        check_pair(&s, &g).unwrap();
        assert!(check_pair(&g, &s).is_err());
        let mut other = g.clone();
        other.phys.mu = 0.2;
        assert!(check_pair(&s, &other).is_err());
    }

    #[test]
    fn still_fluid_is_a_vacuous_pass() {
        let mut s = expansion_config(32, 1.0, 0.1).unwrap();
        s.init.u = vec![crate::config::Profile::constant(0.0)];
        s.t_final = 0.01;
        let mut g = s.clone();
        g.phys.c1 = 0.0;
        let r = vacuum_experiment(&s, &g).unwrap();
        assert_eq!(r.singular.min_rho, 1.0);
        assert_eq!(r.gamma_only.min_rho, 1.0);
        assert!(r.singular_wins());
    }
}
