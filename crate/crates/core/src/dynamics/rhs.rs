use super::{Model, Tendency};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::ops::check_nonnegative;
use crate::params::IonSign;
use crate::real::Real;
use crate::state::State;

fn check_density<T: Real>(rho: &ScalarField<T>) -> Result<()> {
    let (cell, value) = rho.argmin();
    if value > T::zero() {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity { value: value.as_f64(), cell })
    }
}

/// `-div(rho u) + xi lap(rho)`.
pub fn rhs_mass<T: Real>(model: &Model<T>, state: &State<T>) -> Result<ScalarField<T>> {
    let ops = model.ops();
    let mut out = ops.div(&state.momentum())?.scale(-T::one());
    if model.reg.xi > T::zero() {
        out.axpy(model.reg.xi, &ops.laplacian(&state.rho)?);
    }
    Ok(out)
}

/// Tendency of `m = rho u`:
///
/// ```text
/// -div(rho u (x) u) - p'(rho) grad rho + mu div(rho (grad u + grad u^T))
///   - eta lap^2 u + delta rho grad lap^{2s+1} rho - xi (grad rho . grad) u
///   + eps lap(psi) grad psi - grad(c+ + c-)
/// ```
pub fn rhs_momentum<T: Real>(model: &Model<T>, state: &State<T>) -> Result<VectorField<T>> {
    check_density(&state.rho)?;
    let ops = model.ops();
    let grid = *ops.grid();
    let d = grid.dim();
    let (rho, u) = (&state.rho, &state.u);
    let (phys, reg) = (&model.phys, &model.reg);

    let drho: Vec<ScalarField<T>> = (0..d).map(|j| ops.partial(rho, j)).collect();
    let dpsi: Vec<ScalarField<T>> = (0..d).map(|j| ops.partial(&state.psi, j)).collect();
    let lap_psi = ops.laplacian(&state.psi)?;
    let ions = state.c_plus.zip_map(&state.c_minus, |a, b| a + b);
    let dp = rho.map(|r| model.law.dpressure_unchecked(r));
    let mut out = ops.viscous_div(rho, u)?.scale(phys.mu);

    let lap_delta = if reg.delta > T::zero() {
        Some(ops.iterated_laplacian(rho, 2 * reg.s_order + 1)?)
    } else {
        None
    };
    for i in 0..d {
        let ui = u.comp(i);
        let mut acc = ScalarField::zeros(grid);
        for j in 0..d {
            let flux = rho.zip_map(ui, |r, a| r * a).zip_map(u.comp(j), |ra, b| ra * b);
            acc.axpy(-T::one(), &ops.partial(&flux, j));
        }
        acc.axpy(-T::one(), &dp.zip_map(&drho[i], |a, b| a * b));
        acc.axpy(phys.eps, &lap_psi.zip_map(&dpsi[i], |a, b| a * b));
        acc.axpy(-T::one(), &ops.partial(&ions, i));
        if reg.eta > T::zero() {
            acc.axpy(-reg.eta, &ops.iterated_laplacian(ui, 2)?);
        }
        if let Some(w) = &lap_delta {
            acc.axpy(reg.delta, &rho.zip_map(&ops.partial(w, i), |a, b| a * b));
        }
        if reg.xi > T::zero() {
            for j in 0..d {
                acc.axpy(-reg.xi, &drho[j].zip_map(&ops.partial(ui, j), |a, b| a * b));
            }
        }
        out.comp_mut(i).axpy(T::one(), &acc);
    }
    Ok(out)
}

pub(crate) fn rhs_ion_unchecked<T: Real>(model: &Model<T>, state: &State<T>, sign: IonSign) -> Result<ScalarField<T>> {
    let ops = model.ops();
    let c = match sign {
        IonSign::Plus => &state.c_plus,
        IonSign::Minus => &state.c_minus,
    };
    let flux = state.u.map_comps(|uc| uc.zip_map(c, |a, b| a * b));
    let mut out = ops.div(&flux)?.scale(-T::one());
    out.axpy(
        T::one(),
        &ops.nernst_planck_div(c, &state.psi, sign, model.phys.mobility(sign), model.phys.e_charge)?,
    );
    Ok(out)
}

/// `-div(c u) + div(A (grad c +/- e c grad psi))` for the ion of `sign`.
pub fn rhs_ion<T: Real>(model: &Model<T>, state: &State<T>, sign: IonSign) -> Result<ScalarField<T>> {
    check_nonnegative(match sign {
        IonSign::Plus => &state.c_plus,
        IonSign::Minus => &state.c_minus,
    })?;
    rhs_ion_unchecked(model, state, sign)
}

/// Full tendency. A frozen fluid contributes zero mass and momentum tendency.
pub fn rhs<T: Real>(model: &Model<T>, state: &State<T>) -> Result<Tendency<T>> {
    check_nonnegative(&state.c_plus)?;
    check_nonnegative(&state.c_minus)?;
    rhs_unchecked(model, state)
}

pub(crate) fn rhs_unchecked<T: Real>(model: &Model<T>, state: &State<T>) -> Result<Tendency<T>> {
    let grid = *model.grid();
    let (d_rho, d_mom) = if model.frozen_fluid {
        (ScalarField::zeros(grid), VectorField::zeros(grid))
    } else {
        (rhs_mass(model, state)?, rhs_momentum(model, state)?)
    };
    Ok(Tendency {
        d_rho,
        d_mom,
        d_cplus: rhs_ion_unchecked(model, state, IonSign::Plus)?,
        d_cminus: rhs_ion_unchecked(model, state, IonSign::Minus)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::ops::Backend;
    use crate::params::{PhysParams, RegParams};
    use std::f64::consts::PI;

    fn model(n: usize, backend: Backend) -> Model<f64> {
        Model::new(Grid::unit(1, n).unwrap(), backend, PhysParams::default(), RegParams::default()).unwrap()
    }

    fn field(g: Grid<f64>, f: impl Fn(f64) -> f64) -> ScalarField<f64> {
        ScalarField::from_fn(g, |x| f(x[0]))
    }

    #[test]
    fn rest_state_has_zero_tendency() {
        let m = model(32, Backend::Centered2);
        let s = State::rest(*m.grid());
        assert_eq!(rhs(&m, &s).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn constant_flux_is_divergence_free() {
        let m = model(32, Backend::Centered2);
        let mut s = State::rest(*m.grid());
        s.u = s.u.map_comps(|c| c.map(|_| 0.7));
        let t = rhs(&m, &s).unwrap();
        assert!(t.max_abs() < 1e-13);
    }

    #[test]
    fn density_diffusion_mode() {
        let mut m = model(64, Backend::Spectral);
        m.reg.xi = 1.0;
        let g = *m.grid();
        let mut s = State::rest(g);
        s.rho = field(g, |x| 1.0 + 0.1 * (2.0 * PI * x).sin());
        let d = rhs_mass(&m, &s).unwrap();
        let exact = field(g, |x| -0.1 * 4.0 * PI * PI * (2.0 * PI * x).sin());
        assert!(d.max_abs_diff(&exact) < 1e-11);
    }

    #[test]
    fn ion_pressure_gradient_only() {
        let m = model(64, Backend::Spectral);
        let g = *m.grid();
        let mut s = State::rest(g);
        s.c_plus = field(g, |x| 1.0 + 0.3 * (2.0 * PI * x).cos());
        s.c_minus = s.c_plus.clone();
        let f = rhs_momentum(&m, &s).unwrap();
        let exact = field(g, |x| 1.2 * PI * (2.0 * PI * x).sin());
        assert!(f.comp(0).max_abs_diff(&exact) < 1e-12);
    }

    #[test]
    fn pressure_force_against_eos_differences() {
        let mut errs = Vec::new();
        for n in [64, 128, 256] {
            let m = model(n, Backend::Centered2);
            let g = *m.grid();
            let h = g.h();
            let mut s = State::rest(g);
            s.rho = field(g, |x| 1.0 + 0.2 * (2.0 * PI * x).sin());
            let f = rhs_momentum(&m, &s).unwrap();
            let oracle = ScalarField::from_fn(g, |x| {
                let r = |y: f64| 1.0 + 0.2 * (2.0 * PI * y).sin();
                let dr = (r(x[0] + h) - r(x[0] - h)) / (2.0 * h);
                -m.law.dpressure(r(x[0])).unwrap() * dr
            });
            let exact = ScalarField::from_fn(g, |x| {
                let r = 1.0 + 0.2 * (2.0 * PI * x[0]).sin();
                -m.law.dpressure(r).unwrap() * 0.4 * PI * (2.0 * PI * x[0]).cos()
            });
            assert!(f.comp(0).max_abs_diff(&oracle) < 1e-12);
            errs.push(f.comp(0).max_abs_diff(&exact));
        }
        assert!(errs[0] / errs[1] > 3.8 && errs[1] / errs[2] > 3.8, "{errs:?}");
    }

    #[test]
    fn ion_cases() {
        let m = model(64, Backend::Spectral);
        let g = *m.grid();
        let mut s = State::rest(g);
        assert_eq!(rhs_ion(&m, &s, IonSign::Plus).unwrap().max_abs(), 0.0);
        s.c_plus = field(g, |x| 1.0 + 0.5 * (2.0 * PI * x).sin());
        let d = rhs_ion(&m, &s, IonSign::Plus).unwrap();
        let exact = field(g, |x| -0.5 * 4.0 * PI * PI * (2.0 * PI * x).sin());
        assert!(d.max_abs_diff(&exact) < 1e-11);
        assert!(d.sum().abs() < 1e-12);

        let stencil = model(64, Backend::Centered2);
        s.psi = field(g, |x| 0.4 * (2.0 * PI * x).cos());
        s.c_plus = s.psi.map(|p| 0.9 * (-p).exp());
        s.c_minus = s.psi.map(|p| 1.1 * p.exp());
        for sign in [IonSign::Plus, IonSign::Minus] {
            let r = rhs_ion(&stencil, &s, sign).unwrap().max_abs();
            // face-flux cancellation round-off is amplified by 1/h^2
            assert!(r < 1e-11, "{r}");
        }
        s.c_minus.values_mut()[0] = -1e-3;
        assert!(matches!(rhs_ion(&m, &s, IonSign::Minus), Err(Error::NegativeConcentration { .. })));
    }

    #[test]
    fn vacuum_rejected() {
        let m = model(16, Backend::Centered2);
        let mut s = State::rest(*m.grid());
        s.rho.values_mut()[3] = 0.0;
        assert!(matches!(rhs_momentum(&m, &s), Err(Error::NonPositiveDensity { cell: 3, .. })));
    }

    #[test]
    fn frozen_fluid_keeps_density() {
        let mut m = model(32, Backend::Centered2);
        m.frozen_fluid = true;
        let g = *m.grid();
        let mut s = State::rest(g);
        s.rho = field(g, |x| 1.0 + 0.2 * (2.0 * PI * x).sin());
        s.c_plus = field(g, |x| 1.0 + 0.1 * (2.0 * PI * x).cos());
        s.c_minus = s.c_plus.clone();
        let t = rhs(&m, &s).unwrap();
        assert_eq!(t.d_rho.max_abs(), 0.0);
        assert_eq!(t.d_mom.max_abs(), 0.0);
        assert!(t.d_cplus.max_abs() > 0.1);
    }
}
