use num_complex::Complex;

use super::rhs::rhs_unchecked;
use super::{Forcing, Model, Tendency};
use crate::config::Scheme;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::real::Real;
use crate::state::State;

/// Largest admissible `dt * rate` for classical RK4.
pub const STABILITY_BUDGET_RK4: f64 = 2.5;
/// Same for the explicit half of the IMEX pair.
pub const STABILITY_BUDGET_IMEX: f64 = 1.0;

/// Conservative variables of one stage.
#[derive(Debug, Clone)]
struct Conserved<T: Real> {
    rho: ScalarField<T>,
    mom: VectorField<T>,
    c_plus: ScalarField<T>,
    c_minus: ScalarField<T>,
}

impl<T: Real> Conserved<T> {
    fn of(state: &State<T>) -> Self {
        Self {
            rho: state.rho.clone(),
            mom: state.momentum(),
            c_plus: state.c_plus.clone(),
            c_minus: state.c_minus.clone(),
        }
    }

    fn add(&mut self, a: T, k: &Tendency<T>) {
        self.rho.axpy(a, &k.d_rho);
        self.mom.axpy(a, &k.d_mom);
        self.c_plus.axpy(a, &k.d_cplus);
        self.c_minus.axpy(a, &k.d_cminus);
    }

    fn plus(&self, a: T, k: &Tendency<T>) -> Self {
        let mut out = self.clone();
        out.add(a, k);
        out
    }

    /// Rebuilds a state. A frozen fluid takes `rho` and `u` from `base`
    /// verbatim, so they do not pick up division round-off.
    fn to_state(&self, model: &Model<T>, t: T, base: &State<T>) -> Result<State<T>> {
        let (rho, u) = if model.frozen_fluid {
            (base.rho.clone(), base.u.clone())
        } else {
            let (cell, value) = self.rho.argmin();
            if !(value > T::zero()) {
                return Err(Error::StepRejected {
                    t: t.as_f64(),
                    cell,
                    reason: format!("density {value:e} reached vacuum"),
                });
            }
            let u = self.mom.map_comps(|m| m.zip_map(&self.rho, |a, r| a / r));
            (self.rho.clone(), u)
        };
        let state = State::from_fields(t, rho, u, self.c_plus.clone(), self.c_minus.clone())?;
        model.solve_potential(state)
    }
}

fn tendency<T: Real>(model: &Model<T>, state: &State<T>, forcing: Option<&dyn Forcing<T>>) -> Result<Tendency<T>> {
    let mut k = rhs_unchecked(model, state)?;
    if let Some(f) = forcing {
        k.axpy(T::one(), &f.forcing(state.t, model.grid()));
    }
    Ok(k)
}

/// Largest stable step for `state`, from spectral radii of the diffusive
/// terms, the Debye relaxation rate and the advective/acoustic speed.
pub fn stable_dt<T: Real>(model: &Model<T>, state: &State<T>, scheme: Scheme) -> T {
    let ops = model.ops();
    let (phys, reg) = (&model.phys, &model.reg);
    let lam = ops.laplacian_radius();
    let kmax = ops.grad_radius();
    let a_max = phys.a_plus.max(phys.a_minus);
    let rho_min = state.rho.min().max(T::min_positive_value());
    let rho_max = state.rho.max();
    let explicit_all = scheme == Scheme::Rk4;

    let mut rate = T::zero();
    if explicit_all {
        rate += a_max * lam;
    }
    let charge = state.c_plus.zip_map(&state.c_minus, |a, b| a + b).max();
    rate += a_max * phys.e_charge * phys.e_charge * charge / phys.eps;
    let dpsi = (0..ops.grid().dim()).map(|a| ops.partial(&state.psi, a).max_abs()).fold(T::zero(), T::max);
    let mut speed = state.u.max_abs() + a_max * phys.e_charge * dpsi;
    if !model.frozen_fluid {
        rate += T::lit(2.0) * phys.mu * rho_max / rho_min * lam;
        if explicit_all {
            rate += reg.xi * lam + reg.eta / rho_min * lam * lam;
            if reg.delta > T::zero() {
                rate += (reg.delta * rho_max).sqrt() * lam.powi(reg.s_order as i32 + 1);
            }
        }
        let sound = state.rho.values().iter().fold(T::zero(), |acc, &r| acc.max(model.law.dpressure_unchecked(r)));
        speed += sound.sqrt();
    }
    rate += speed * kmax * T::from_usize_lossy(ops.grid().dim()).sqrt();
    let budget = T::lit(match scheme {
        Scheme::Rk4 => STABILITY_BUDGET_RK4,
        Scheme::Imex => STABILITY_BUDGET_IMEX,
    });
    if rate > T::zero() {
        budget / rate
    } else {
        T::infinity()
    }
}

/// Advances `state` by `dt`.
pub fn step<T: Real>(model: &Model<T>, state: &State<T>, dt: T, scheme: Scheme) -> Result<State<T>> {
    step_forced(model, state, dt, scheme, None)
}

/// Advances `state` by `dt` with an additional source.
pub fn step_forced<T: Real>(
    model: &Model<T>,
    state: &State<T>,
    dt: T,
    scheme: Scheme,
    forcing: Option<&dyn Forcing<T>>,
) -> Result<State<T>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    state.rho.check_grid(model.grid())?;
    state.check_admissible()?;
    let limit = stable_dt(model, state, scheme);
    if dt > limit {
        return Err(Error::StabilityLimit { dt: dt.as_f64(), limit: limit.as_f64() });
    }
    let base = if state.consistent { state.clone() } else { model.solve_potential(state.clone())? };
    let next = match scheme {
        Scheme::Rk4 => rk4(model, &base, dt, forcing)?,
        Scheme::Imex => imex(model, &base, dt, forcing)?,
    };
    reject_inadmissible(next)
}

fn reject_inadmissible<T: Real>(state: State<T>) -> Result<State<T>> {
    match state.check_admissible() {
        Ok(()) => Ok(state),
        Err(Error::NonPositiveDensity { value, cell }) => Err(Error::StepRejected {
            t: state.t.as_f64(),
            cell,
            reason: format!("density {value:e} reached vacuum"),
        }),
        Err(Error::NegativeConcentration { value, cell }) => Err(Error::StepRejected {
            t: state.t.as_f64(),
            cell,
            reason: format!("concentration {value:e} became negative"),
        }),
        Err(other) => Err(other),
    }
}

fn rk4<T: Real>(model: &Model<T>, s0: &State<T>, dt: T, forcing: Option<&dyn Forcing<T>>) -> Result<State<T>> {
    let half = T::lit(0.5) * dt;
    let u0 = Conserved::of(s0);
    let k1 = tendency(model, s0, forcing)?;
    let s2 = u0.plus(half, &k1).to_state(model, s0.t + half, s0)?;
    let k2 = tendency(model, &s2, forcing)?;
    let s3 = u0.plus(half, &k2).to_state(model, s0.t + half, s0)?;
    let k3 = tendency(model, &s3, forcing)?;
    let s4 = u0.plus(dt, &k3).to_state(model, s0.t + dt, s0)?;
    let k4 = tendency(model, &s4, forcing)?;
    let mut sum = k1;
    sum.axpy(T::lit(2.0), &k2);
    sum.axpy(T::lit(2.0), &k3);
    sum.axpy(T::one(), &k4);
    u0.plus(dt / T::lit(6.0), &sum).to_state(model, s0.t + dt, s0)
}

/// Constant-coefficient stiff part `L` of the tendency, diagonal in Fourier
/// space: `xi lap rho` and `A lap c` always, `-(eta/rho_bar) lap^2 m`, and
/// the linearized pair `-div m`, `delta rho_bar grad lap^{2s+1} rho` when
/// `delta > 0`.
struct Implicit<'a, T: Real> {
    model: &'a Model<T>,
    rho_bar: T,
}

impl<T: Real> Implicit<'_, T> {
    fn fluid(&self) -> bool {
        !self.model.frozen_fluid
    }

    fn coupled(&self) -> bool {
        self.fluid() && self.model.reg.delta > T::zero()
    }

    fn power(&self, lam: T) -> T {
        lam.powi(2 * self.model.reg.s_order as i32 + 1)
    }

    fn spectra(&self, u: &Conserved<T>) -> (Vec<Complex<T>>, Vec<Vec<Complex<T>>>, Vec<Complex<T>>, Vec<Complex<T>>) {
        let f = self.model.ops().fourier();
        (
            f.forward(u.rho.values()),
            u.mom.components().iter().map(|m| f.forward(m.values())).collect(),
            f.forward(u.c_plus.values()),
            f.forward(u.c_minus.values()),
        )
    }

    fn field(&self, spec: Vec<Complex<T>>) -> ScalarField<T> {
        let grid = *self.model.grid();
        ScalarField::from_vec(grid, self.model.ops().fourier().inverse_real(spec)).expect("same grid")
    }

    /// `L u`.
    fn apply(&self, u: &Conserved<T>) -> Tendency<T> {
        let ops = self.model.ops();
        let (phys, reg) = (&self.model.phys, &self.model.reg);
        let d = ops.grid().dim();
        let i = Complex::new(T::zero(), T::one());
        let (r, m, cp, cm) = self.spectra(u);
        let cells = r.len();
        let mut lr = vec![Complex::default(); cells];
        let mut lm = vec![vec![Complex::default(); cells]; d];
        let mut lcp = vec![Complex::default(); cells];
        let mut lcm = vec![Complex::default(); cells];
        for k in 0..cells {
            let lam = ops.laplacian_symbol(k);
            lcp[k] = cp[k] * (phys.a_plus * lam);
            lcm[k] = cm[k] * (phys.a_minus * lam);
            if !self.fluid() {
                continue;
            }
            lr[k] = r[k] * (reg.xi * lam);
            for a in 0..d {
                lm[a][k] = m[a][k] * (-reg.eta / self.rho_bar * lam * lam);
            }
            if self.coupled() {
                let p = self.power(lam);
                for a in 0..d {
                    let g = ops.grad_symbol(k, a);
                    lr[k] -= i * m[a][k] * g;
                    lm[a][k] += i * r[k] * (reg.delta * self.rho_bar * g * p);
                }
            }
        }
        Tendency {
            d_rho: self.field(lr),
            d_mom: VectorField::from_components(lm.into_iter().map(|s| self.field(s)).collect()).expect("same grid"),
            d_cplus: self.field(lcp),
            d_cminus: self.field(lcm),
        }
    }

    /// Solves `(I - tau L) u = rhs`.
    fn solve(&self, tau: T, rhs: &Conserved<T>) -> Conserved<T> {
        let ops = self.model.ops();
        let (phys, reg) = (&self.model.phys, &self.model.reg);
        let d = ops.grid().dim();
        let one = T::one();
        let i = Complex::new(T::zero(), one);
        let (mut r, mut m, mut cp, mut cm) = self.spectra(rhs);
        for k in 0..r.len() {
            let lam = ops.laplacian_symbol(k);
            cp[k] = cp[k] / (one - tau * phys.a_plus * lam);
            cm[k] = cm[k] / (one - tau * phys.a_minus * lam);
            if !self.fluid() {
                continue;
            }
            let a0 = one - tau * reg.xi * lam;
            let b0 = one + tau * reg.eta / self.rho_bar * lam * lam;
            if self.coupled() {
                let p = self.power(lam);
                let mut g2 = T::zero();
                let mut gm = Complex::default();
                for a in 0..d {
                    let g = ops.grad_symbol(k, a);
                    g2 += g * g;
                    gm += m[a][k] * g;
                }
                let denom = a0 - tau * tau * reg.delta * self.rho_bar * p * g2 / b0;
                r[k] = (r[k] - i * gm * (tau / b0)) / denom;
                for a in 0..d {
                    let g = ops.grad_symbol(k, a);
                    m[a][k] = (m[a][k] + i * r[k] * (tau * reg.delta * self.rho_bar * g * p)) / b0;
                }
            } else {
                r[k] = r[k] / a0;
                for ma in m.iter_mut() {
                    ma[k] = ma[k] / b0;
                }
            }
        }
        Conserved {
            rho: self.field(r),
            mom: VectorField::from_components(m.into_iter().map(|s| self.field(s)).collect()).expect("same grid"),
            c_plus: self.field(cp),
            c_minus: self.field(cm),
        }
    }
}

/// ARS(2,2,2): L-stable, stiffly accurate, second order.
fn imex<T: Real>(model: &Model<T>, s0: &State<T>, dt: T, forcing: Option<&dyn Forcing<T>>) -> Result<State<T>> {
    let one = T::one();
    let gamma = one - one / T::lit(2.0).sqrt();
    let delta = one - one / (T::lit(2.0) * gamma);
    let tau = gamma * dt;
    let implicit = Implicit { model, rho_bar: s0.rho.mean() };
    let u0 = Conserved::of(s0);

    let mut n1 = tendency(model, s0, forcing)?;
    n1.axpy(-one, &implicit.apply(&u0));

    let u2 = implicit.solve(tau, &u0.plus(tau, &n1));
    // L u2 recovered from the stage equation u2 - tau L u2 = u0 + tau n1
    let mut l2 = Tendency {
        d_rho: u2.rho.clone(),
        d_mom: u2.mom.clone(),
        d_cplus: u2.c_plus.clone(),
        d_cminus: u2.c_minus.clone(),
    };
    let mut base = Tendency {
        d_rho: u0.rho.clone(),
        d_mom: u0.mom.clone(),
        d_cplus: u0.c_plus.clone(),
        d_cminus: u0.c_minus.clone(),
    };
    base.axpy(tau, &n1);
    l2.axpy(-one, &base);
    let l2 = scale_tendency(&l2, one / tau);

    let s2 = u2.to_state(model, s0.t + tau, s0)?;
    let mut n2 = tendency(model, &s2, forcing)?;
    n2.axpy(-one, &l2);

    let mut r3 = u0.plus(dt * delta, &n1);
    r3.add(dt * (one - delta), &n2);
    r3.add(dt * (one - gamma), &l2);
    implicit.solve(tau, &r3).to_state(model, s0.t + dt, s0)
}

fn scale_tendency<T: Real>(k: &Tendency<T>, a: T) -> Tendency<T> {
    Tendency {
        d_rho: k.d_rho.scale(a),
        d_mom: k.d_mom.scale(a),
        d_cplus: k.d_cplus.scale(a),
        d_cminus: k.d_cminus.scale(a),
    }
}
