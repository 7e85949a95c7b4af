//! Energy, BD entropy, their dissipations and residuals, conservation sums
//! and velocity norms.
//!
//! Every integral is a cell sum times `h^d`, the quadrature under which the
//! operators in [`crate::ops`] integrate by parts exactly.

use crate::dynamics::Model;
use crate::eos::{relative_entropy_unchecked, sigma_unchecked};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::ops::check_nonnegative;
use crate::params::IonSign;
use crate::real::Real;
use crate::state::State;

/// One row of the diagnostics series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord<T> {
    pub t: T,
    pub mass: T,
    pub ion_plus: T,
    pub ion_minus: T,
    pub net_charge: T,
    pub e1: T,
    pub d1: T,
    pub r1: T,
    pub e2: T,
    pub d2: T,
    pub r2: T,
    pub e2_reg_extra: T,
    pub min_rho: T,
    pub max_rho: T,
    pub u_w1q: T,
    /// `2 mu int rho |A(u)|^2`, part of `d2`; zero in one dimension.
    pub d2_antisym: T,
}

/// Summands of the energy dissipation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D1Parts<T> {
    pub viscous: T,
    pub ion_plus: T,
    pub ion_minus: T,
}

impl<T: Real> D1Parts<T> {
    pub fn total(&self) -> T {
        self.viscous + self.ion_plus + self.ion_minus
    }
}

/// Summands of the BD entropy dissipation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2Parts<T> {
    pub sqrt_ions: T,
    pub field: T,
    pub antisym: T,
    pub pressure: T,
    pub ion_plus: T,
    pub ion_minus: T,
}

impl<T: Real> D2Parts<T> {
    pub fn total(&self) -> T {
        self.sqrt_ions + self.field + self.antisym + self.pressure + self.ion_plus + self.ion_minus
    }
}

fn check_density<T: Real>(rho: &ScalarField<T>) -> Result<()> {
    let (cell, value) = rho.argmin();
    if value > T::zero() {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity { value: value.as_f64(), cell })
    }
}

fn check_grid<T: Real>(model: &Model<T>, state: &State<T>) -> Result<()> {
    if state.grid() != model.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn grad_sq<T: Real>(model: &Model<T>, f: &ScalarField<T>) -> ScalarField<T> {
    let ops = model.ops();
    let mut out = ScalarField::zeros(*ops.grid());
    for a in 0..ops.grid().dim() {
        let d = ops.partial(f, a);
        out.axpy(T::one(), &d.zip_map(&d, |x, y| x * y));
    }
    out
}

fn ion_terms<T: Real>(model: &Model<T>, state: &State<T>) -> Result<(T, T)> {
    let ops = model.ops();
    let (phys, e) = (&model.phys, model.phys.e_charge);
    let plus = ops.safe_entropy_flux_sq(&state.c_plus, &state.psi, IonSign::Plus, e)?.integral();
    let minus = ops.safe_entropy_flux_sq(&state.c_minus, &state.psi, IonSign::Minus, e)?.integral();
    Ok((phys.a_plus * plus, phys.a_minus * minus))
}

/// `int rho (|u|^2/2 + e(rho)) + sigma(c+) + sigma(c-) + eps/2 |grad psi|^2`.
pub fn energy_e1<T: Real>(model: &Model<T>, state: &State<T>) -> Result<T> {
    check_grid(model, state)?;
    check_density(&state.rho)?;
    check_nonnegative(&state.c_plus)?;
    check_nonnegative(&state.c_minus)?;
    let half = T::lit(0.5);
    let u2 = state.u.norm_sq();
    let dpsi2 = grad_sq(model, &state.psi);
    let mut acc = T::zero();
    for i in 0..state.rho.len() {
        let r = state.rho.values()[i];
        acc += r * (half * u2.values()[i] + model.law.internal_energy_unchecked(r))
            + sigma_unchecked(state.c_plus.values()[i])
            + sigma_unchecked(state.c_minus.values()[i])
            + half * model.phys.eps * dpsi2.values()[i];
    }
    Ok(acc * state.grid().cell_volume())
}

pub fn dissipation_d1_parts<T: Real>(model: &Model<T>, state: &State<T>) -> Result<D1Parts<T>> {
    check_grid(model, state)?;
    check_density(&state.rho)?;
    let d = model.ops().sym_grad(&state.u)?.frobenius_sq();
    let viscous = T::lit(2.0) * model.phys.mu * d.zip_map(&state.rho, |a, r| a * r).integral();
    let (ion_plus, ion_minus) = ion_terms(model, state)?;
    Ok(D1Parts { viscous, ion_plus, ion_minus })
}

/// `2 mu int rho |D(u)|^2 + A+ int c+|grad(ln c+ + e psi)|^2 + A- int c-|grad(ln c- - e psi)|^2`.
pub fn dissipation_d1<T: Real>(model: &Model<T>, state: &State<T>) -> Result<T> {
    Ok(dissipation_d1_parts(model, state)?.total())
}

/// `1/2 int rho |u + 2 mu grad ln rho|^2 + int rho e(rho) + eps/2 int |grad psi|^2
///  + int sigma(c+-) + 2 mu int rho sigma(c+-/rho) / A+-`.
pub fn entropy_e2<T: Real>(model: &Model<T>, state: &State<T>) -> Result<T> {
    check_grid(model, state)?;
    check_density(&state.rho)?;
    check_nonnegative(&state.c_plus)?;
    check_nonnegative(&state.c_minus)?;
    let ops = model.ops();
    let phys = &model.phys;
    let (half, two_mu) = (T::lit(0.5), T::lit(2.0) * phys.mu);
    let rho = &state.rho;
    let mut w2 = ScalarField::zeros(*rho.grid());
    for a in 0..rho.grid().dim() {
        let dr = ops.partial(rho, a);
        let w = ScalarField::from_vec(
            *rho.grid(),
            (0..rho.len()).map(|i| state.u.comp(a).values()[i] + two_mu * dr.values()[i] / rho.values()[i]).collect(),
        )?;
        w2.axpy(T::one(), &w.zip_map(&w, |x, y| x * y));
    }
    let dpsi2 = grad_sq(model, &state.psi);
    let mut acc = T::zero();
    for i in 0..rho.len() {
        let r = rho.values()[i];
        let (cp, cm) = (state.c_plus.values()[i], state.c_minus.values()[i]);
        acc += half * r * w2.values()[i]
            + r * model.law.internal_energy_unchecked(r)
            + half * phys.eps * dpsi2.values()[i]
            + sigma_unchecked(cp)
            + sigma_unchecked(cm)
            + two_mu
                * (relative_entropy_unchecked(r, cp) / phys.a_plus + relative_entropy_unchecked(r, cm) / phys.a_minus);
    }
    Ok(acc * state.grid().cell_volume())
}

pub fn dissipation_d2_parts<T: Real>(model: &Model<T>, state: &State<T>) -> Result<D2Parts<T>> {
    check_grid(model, state)?;
    check_density(&state.rho)?;
    check_nonnegative(&state.c_plus)?;
    check_nonnegative(&state.c_minus)?;
    let ops = model.ops();
    let phys = &model.phys;
    let mu = phys.mu;
    let two_mu = T::lit(2.0) * mu;
    let sqrt_ions = T::lit(8.0)
        * mu
        * (grad_sq(model, &state.c_plus.map(|c| c.sqrt())).integral()
            + grad_sq(model, &state.c_minus.map(|c| c.sqrt())).integral());
    let lap = ops.laplacian(&state.psi)?;
    let field = two_mu * phys.eps * lap.dot(&lap);
    let antisym = if state.grid().dim() == 1 {
        T::zero()
    } else {
        let a = ops.antisym_grad(&state.u)?.frobenius_sq();
        two_mu * a.zip_map(&state.rho, |x, r| x * r).integral()
    };
    let g = grad_sq(model, &state.rho);
    let pressure = two_mu
        * (0..g.len())
            .map(|i| {
                let r = state.rho.values()[i];
                model.law.dpressure_unchecked(r) / r * g.values()[i]
            })
            .fold(T::zero(), |a, b| a + b)
        * state.grid().cell_volume();
    let (ion_plus, ion_minus) = ion_terms(model, state)?;
    Ok(D2Parts { sqrt_ions, field, antisym, pressure, ion_plus, ion_minus })
}

/// `8 mu int |grad sqrt c+-|^2 + 2 mu eps int |lap psi|^2 + 2 mu int rho |A(u)|^2
///  + 2 mu int p'(rho)/rho |grad rho|^2` plus the ion terms of the energy dissipation.
pub fn dissipation_d2<T: Real>(model: &Model<T>, state: &State<T>) -> Result<T> {
    Ok(dissipation_d2_parts(model, state)?.total())
}

/// `delta/2 int |grad lap^s rho|^2 + zeta eps/2 int |lap psi|^2`.
pub fn e2_reg_extra<T: Real>(model: &Model<T>, state: &State<T>) -> Result<T> {
    check_grid(model, state)?;
    let (reg, half) = (&model.reg, T::lit(0.5));
    let mut acc = T::zero();
    if reg.delta > T::zero() {
        let w = model.ops().iterated_laplacian(&state.rho, reg.s_order)?;
        acc += half * reg.delta * grad_sq(model, &w).integral();
    }
    if reg.zeta > T::zero() {
        let lap = model.ops().laplacian(&state.psi)?;
        acc += half * reg.zeta * model.phys.eps * lap.dot(&lap);
    }
    Ok(acc)
}

/// Integrability exponents `(p, q)` with `1/p = 1/2 + 1/(8k)` and `1/q = 1/2 + 1/(24k)`.
pub fn velocity_exponents<T: Real>(k_sing: T) -> (T, T) {
    let p = T::lit(8.0) * k_sing / (T::lit(4.0) * k_sing + T::one());
    let q = T::lit(24.0) * k_sing / (T::lit(12.0) * k_sing + T::one());
    (p, q)
}

/// `(int |u|^q + int |grad u|^q)^{1/q}`, Euclidean and Frobenius pointwise norms.
pub fn velocity_norm_w1q<T: Real>(model: &Model<T>, state: &State<T>) -> Result<T> {
    check_grid(model, state)?;
    let (_, q) = velocity_exponents(model.phys.k_sing);
    let u2 = state.u.norm_sq();
    let j2 = model.ops().jacobian(&state.u)?.frobenius_sq();
    let half_q = T::lit(0.5) * q;
    let sum = u2.zip_map(&j2, |a, b| a.powf(half_q) + b.powf(half_q)).integral();
    Ok(sum.powf(T::one() / q))
}

/// Average of the conservative variables of `a` and `b`, potential re-solved.
pub fn midpoint<T: Real>(model: &Model<T>, a: &State<T>, b: &State<T>) -> Result<State<T>> {
    if a.grid() != b.grid() || a.grid() != model.grid() {
        return Err(Error::MismatchedSeries("states live on different grids".into()));
    }
    let half = T::lit(0.5);
    let avg = |x: &ScalarField<T>, y: &ScalarField<T>| x.zip_map(y, |p, q| half * (p + q));
    let rho = avg(&a.rho, &b.rho);
    check_density(&rho)?;
    let (ma, mb) = (a.momentum(), b.momentum());
    let u = crate::field::VectorField::from_components(
        (0..rho.grid().dim()).map(|k| avg(ma.comp(k), mb.comp(k)).zip_map(&rho, |m, r| m / r)).collect(),
    )?;
    let state = State::from_fields(half * (a.t + b.t), rho, u, avg(&a.c_plus, &b.c_plus), avg(&a.c_minus, &b.c_minus))?;
    model.solve_potential(state)
}

/// Diagnostics of `state`; the residuals use the step from `previous`.
pub fn record<T: Real>(model: &Model<T>, state: &State<T>, previous: Option<&State<T>>) -> Result<DiagnosticsRecord<T>> {
    let e1 = energy_e1(model, state)?;
    let e2 = entropy_e2(model, state)?;
    let d1 = dissipation_d1(model, state)?;
    let d2p = dissipation_d2_parts(model, state)?;
    let (r1, r2) = match previous {
        None => (T::zero(), T::zero()),
        Some(prev) => residual_pair(model, prev, state, Some((e1, e2)))?,
    };
    Ok(DiagnosticsRecord {
        t: state.t,
        mass: state.rho.integral(),
        ion_plus: state.c_plus.integral(),
        ion_minus: state.c_minus.integral(),
        net_charge: model.phys.e_charge * state.c_plus.zip_map(&state.c_minus, |a, b| a - b).integral(),
        e1,
        d1,
        r1,
        e2,
        d2: d2p.total(),
        r2,
        e2_reg_extra: e2_reg_extra(model, state)?,
        min_rho: state.rho.min(),
        max_rho: state.rho.max(),
        u_w1q: velocity_norm_w1q(model, state)?,
        d2_antisym: d2p.antisym,
    })
}

fn residual_pair<T: Real>(model: &Model<T>, a: &State<T>, b: &State<T>, eb: Option<(T, T)>) -> Result<(T, T)> {
    if a.grid() != b.grid() {
        return Err(Error::MismatchedSeries("states live on different grids".into()));
    }
    let dt = b.t - a.t;
    if !(dt > T::zero()) {
        return Err(Error::MismatchedSeries(format!("times must increase, got {} then {}", a.t, b.t)));
    }
    let (e1b, e2b) = match eb {
        Some(v) => v,
        None => (energy_e1(model, b)?, entropy_e2(model, b)?),
    };
    let mid = midpoint(model, a, b)?;
    let r1 = (e1b - energy_e1(model, a)?) / dt + dissipation_d1(model, &mid)?;
    let r2 = (e2b - entropy_e2(model, a)?) / dt + dissipation_d2(model, &mid)?;
    Ok((r1, r2))
}

/// Energy and BD residuals of every consecutive pair in `states`.
pub fn residuals<T: Real>(model: &Model<T>, states: &[State<T>]) -> Result<(Vec<T>, Vec<T>)> {
    if states.len() < 2 {
        return Err(Error::MismatchedSeries(format!("need at least two states, got {}", states.len())));
    }
    let mut r1 = Vec::with_capacity(states.len() - 1);
    let mut r2 = Vec::with_capacity(states.len() - 1);
    for pair in states.windows(2) {
        let (a, b) = residual_pair(model, &pair[0], &pair[1], None)?;
        r1.push(a);
        r2.push(b);
    }
    Ok((r1, r2))
}
