//! Refinement studies: observed orders from least-squares slopes.

use super::mms::{mms_source, FieldErrors, Manufactured};
use crate::config::{RunConfig, TimeStep};
use crate::dynamics::{run_with, Model, Schedule};
use crate::error::{Error, Result};
use crate::state::make_state;

pub const MIN_RESOLUTIONS: usize = 3;

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

/// Errors per named quantity at each resolution, with fitted orders.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub names: Vec<String>,
    pub resolutions: Vec<usize>,
    pub spacings: Vec<f64>,
    /// `errors[r][f]` for resolution `r` and quantity `f`.
    pub errors: Vec<Vec<f64>>,
    pub orders: Vec<f64>,
}

impl ConvergenceReport {
    pub fn order(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.orders[i])
    }

    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest error at the finest resolution.
    pub fn finest_max_error(&self) -> f64 {
        self.errors.last().map(|e| e.iter().copied().fold(0.0, f64::max)).unwrap_or(f64::NAN)
    }

    pub fn summary(&self) -> String {
        let mut out = String::from("n");
        for name in &self.names {
            out.push_str(&format!(",{name}"));
        }
        out.push('\n');
        for (r, n) in self.resolutions.iter().enumerate() {
            out.push_str(&n.to_string());
            for e in &self.errors[r] {
                out.push_str(&format!(",{e:e}"));
            }
            out.push('\n');
        }
        out.push_str("order");
        for o in &self.orders {
            out.push_str(&format!(",{o:.3}"));
        }
        out.push('\n');
        out
    }
}

/// Runs `measure(n)` at every resolution and fits `error ~ h^order` per
/// quantity, with `h = length / n`.
pub fn convergence_study<F>(names: &[&str], length: f64, resolutions: &[usize], mut measure: F) -> Result<ConvergenceReport>
where
    F: FnMut(usize) -> Result<Vec<f64>>,
{
    if resolutions.len() < MIN_RESOLUTIONS {
        return Err(Error::InsufficientResolutions { needed: MIN_RESOLUTIONS, got: resolutions.len() });
    }
    let spacings: Vec<f64> = resolutions.iter().map(|&n| length / n as f64).collect();
    let mut errors = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let e = measure(n)?;
        if e.len() != names.len() {
            return Err(Error::MismatchedSeries(format!("expected {} errors, got {}", names.len(), e.len())));
        }
        errors.push(e);
    }
    let orders = (0..names.len())
        .map(|f| {
            let y: Vec<f64> = errors.iter().map(|e| e[f]).collect();
            log_slope(&spacings, &y)
        })
        .collect();
    Ok(ConvergenceReport {
        names: names.iter().map(|s| s.to_string()).collect(),
        resolutions: resolutions.to_vec(),
        spacings,
        errors,
        orders,
    })
}

/// Time step at resolution `n` under `dt = dt_ref (n_ref / n)^power`.
pub fn slaved_dt(dt_ref: f64, n_ref: usize, n: usize, power: i32) -> f64 {
    dt_ref * (n_ref as f64 / n as f64).powi(power)
}

/// Forced run of `man` on `template` at resolution `n`; final-time errors.
pub fn mms_errors(template: &RunConfig<f64>, man: &Manufactured<f64>, n: usize, dt: f64) -> Result<FieldErrors<f64>> {
    let grid = template.grid.with_n(n)?;
    let mut config = template.clone();
    config.grid = grid;
    config.time_step = TimeStep::Fixed(dt);
    let model = Model::from_config(&config)?;
    let source = mms_source(man, &model)?;
    let initial = man.state(&model, 0.0)?;
    let schedule = Schedule { cadence: 0, snapshot_every: None, ..Schedule::of(&config) };
    let out = run_with(&model, initial, &schedule, Some(&source))?;
    man.errors(&model, &out.final_state)
}

/// Manufactured-solution study, `dt` slaved to `h^2` from the template step.
pub fn mms_study(template: &RunConfig<f64>, man: &Manufactured<f64>, resolutions: &[usize]) -> Result<ConvergenceReport> {
    let dt_ref = fixed_dt(template)?;
    let n_ref = template.grid.n();
    convergence_study(&FieldErrors::<f64>::NAMES, template.grid.length(), resolutions, |n| {
        Ok(mms_errors(template, man, n, slaved_dt(dt_ref, n_ref, n, 2))?.as_array().to_vec())
    })
}

fn fixed_dt(template: &RunConfig<f64>) -> Result<f64> {
    match template.time_step {
        TimeStep::Fixed(dt) => Ok(dt),
        TimeStep::Cfl(_) => Err(Error::InvalidParameter("refinement studies need a fixed time step".into())),
    }
}

/// Largest `|R1|` and `|R2|` of an unforced run, excluding the initial row.
pub fn residual_maxima(config: &RunConfig<f64>) -> Result<[f64; 2]> {
    let model = Model::from_config(config)?;
    let initial = make_state(config)?;
    let schedule = Schedule { cadence: 1, snapshot_every: None, ..Schedule::of(config) };
    let out = run_with(&model, initial, &schedule, None)?;
    let max = |f: fn(&crate::diagnostics::DiagnosticsRecord<f64>) -> f64| {
        out.records.iter().skip(1).map(|r| f(r).abs()).fold(0.0, f64::max)
    };
    Ok([max(|r| r.r1), max(|r| r.r2)])
}

/// Energy and BD residual refinement with `dt ~ h^2`.
pub fn entropy_study(template: &RunConfig<f64>, resolutions: &[usize]) -> Result<ConvergenceReport> {
    let dt_ref = fixed_dt(template)?;
    let n_ref = template.grid.n();
    convergence_study(&["R1", "R2"], template.grid.length(), resolutions, |n| {
        let mut config = template.clone();
        config.grid = template.grid.with_n(n)?;
        config.time_step = TimeStep::Fixed(slaved_dt(dt_ref, n_ref, n, 2));
        Ok(residual_maxima(&config)?.to_vec())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [0.1, 0.05, 0.025];
        let y: Vec<f64> = x.iter().map(|h: &f64| 3.0 * h.powi(2)).collect();
        assert!((log_slope(&x, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn needs_three_resolutions() {
        let r = convergence_study(&["a"], 1.0, &[16, 32], |_| Ok(vec![1.0]));
        assert!(matches!(r, Err(Error::InsufficientResolutions { needed: 3, got: 2 })));
    }

    #[test]
    fn lopsided_difference_is_first_order() {
        // one-sided difference of sin(2 pi x): a known first-order defect
        let pi = std::f64::consts::PI;
        let report = convergence_study(&["d"], 1.0, &[32, 64, 128, 256], |n| {
            let h = 1.0 / n as f64;
            let err = (0..n)
                .map(|i| {
                    let x = (i as f64 + 0.5) * h;
                    let approx = ((2.0 * pi * (x + h)).sin() - (2.0 * pi * x).sin()) / h;
                    (approx - 2.0 * pi * (2.0 * pi * x).cos()).abs()
                })
                .fold(0.0, f64::max);
            Ok(vec![err])
        })
        .unwrap();
        assert!((report.orders[0] - 1.0).abs() < 0.05, "{}", report.orders[0]);
    }
}
