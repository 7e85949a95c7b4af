//! Manufactured solutions built from finite trigonometric sums.
//!
//! Sources are assembled pointwise from closed-form derivatives of the
//! manufactured fields by the product rule; nothing here calls the discrete
//! operators.

use crate::config::Wave;
use crate::dynamics::{Forcing, Model, Tendency};
use crate::eos::PressureLaw;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::params::{PhysParams, RegParams};
use crate::real::Real;
use crate::state::State;

/// `amp cos(omega t + phase) wave(2 pi k.x / L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm<T> {
    pub amp: T,
    pub wave: Wave,
    pub k: [i64; 2],
    pub omega: T,
    pub phase: T,
}

impl<T: Real> TrigTerm<T> {
    pub fn steady(amp: T, wave: Wave, k: [i64; 2]) -> Self {
        Self { amp, wave, k, omega: T::zero(), phase: T::zero() }
    }
}

/// Value and derivatives of a manufactured field at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet<T> {
    pub v: T,
    pub dt: T,
    pub grad: [T; 2],
    pub hess: [[T; 2]; 2],
}

impl<T: Real> Jet<T> {
    pub fn lap(&self) -> T {
        self.hess[0][0] + self.hess[1][1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigField<T> {
    pub mean: T,
    pub terms: Vec<TrigTerm<T>>,
}

struct Phase<T> {
    kappa: [T; 2],
    /// wave value and its derivative with respect to the phase
    w: T,
    dw: T,
    time: T,
    dtime: T,
}

impl<T: Real> TrigField<T> {
    pub fn constant(mean: T) -> Self {
        Self { mean, terms: Vec::new() }
    }

    pub fn new(mean: T, terms: Vec<TrigTerm<T>>) -> Self {
        Self { mean, terms }
    }

    fn phase(term: &TrigTerm<T>, x: [T; 2], t: T, length: T) -> Phase<T> {
        let base = T::lit(2.0) * T::PI() / length;
        let kappa = [base * T::lit(term.k[0] as f64), base * T::lit(term.k[1] as f64)];
        let theta = kappa[0] * x[0] + kappa[1] * x[1];
        let (w, dw) = match term.wave {
            Wave::Sin => (theta.sin(), theta.cos()),
            Wave::Cos => (theta.cos(), -theta.sin()),
        };
        let arg = term.omega * t + term.phase;
        Phase { kappa, w, dw, time: term.amp * arg.cos(), dtime: -term.amp * term.omega * arg.sin() }
    }

    pub fn value(&self, x: [T; 2], t: T, length: T) -> T {
        self.terms.iter().fold(self.mean, |acc, term| {
            let p = Self::phase(term, x, t, length);
            acc + p.time * p.w
        })
    }

    pub fn jet(&self, x: [T; 2], t: T, length: T) -> Jet<T> {
        let mut out = Jet { v: self.mean, ..Jet::default() };
        for term in &self.terms {
            let p = Self::phase(term, x, t, length);
            out.v += p.time * p.w;
            out.dt += p.dtime * p.w;
            for a in 0..2 {
                out.grad[a] += p.time * p.kappa[a] * p.dw;
                for b in 0..2 {
                    out.hess[a][b] -= p.time * p.kappa[a] * p.kappa[b] * p.w;
                }
            }
        }
        out
    }

    /// `lap^m f` for `m >= 1`.
    pub fn lap_pow(&self, m: usize, x: [T; 2], t: T, length: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, term| {
            let p = Self::phase(term, x, t, length);
            let k2 = p.kappa[0] * p.kappa[0] + p.kappa[1] * p.kappa[1];
            acc + p.time * (-k2).powi(m as i32) * p.w
        })
    }

    /// `grad lap^m f`.
    pub fn grad_lap_pow(&self, m: usize, x: [T; 2], t: T, length: T) -> [T; 2] {
        let mut out = [T::zero(); 2];
        for term in &self.terms {
            let p = Self::phase(term, x, t, length);
            let k2 = p.kappa[0] * p.kappa[0] + p.kappa[1] * p.kappa[1];
            let f = p.time * (-k2).powi(m as i32) * p.dw;
            out[0] += f * p.kappa[0];
            out[1] += f * p.kappa[1];
        }
        out
    }

    /// Time-dependent spatial mean (the `k = 0` content).
    fn zero_mode(&self, t: T) -> T {
        self.terms
            .iter()
            .filter(|term| term.k == [0, 0])
            .fold(self.mean, |acc, term| {
                let w = if term.wave == Wave::Cos { T::one() } else { T::zero() };
                acc + term.amp * (term.omega * t + term.phase).cos() * w
            })
    }

    pub fn sample(&self, grid: Grid<T>, t: T) -> ScalarField<T> {
        ScalarField::from_fn(grid, |x| self.value(x, t, grid.length()))
    }
}

/// Analytic `(rho, u, c+, c-)` with an optional explicit potential. When
/// `psi` is `None` it is derived from the charge.
#[derive(Debug, Clone, PartialEq)]
pub struct Manufactured<T> {
    pub rho: TrigField<T>,
    pub u: Vec<TrigField<T>>,
    pub c_plus: TrigField<T>,
    pub c_minus: TrigField<T>,
    pub psi: Option<TrigField<T>>,
}

/// Max-norm errors of a discrete state against the manufacture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldErrors<T> {
    pub rho: T,
    pub u: T,
    pub c_plus: T,
    pub c_minus: T,
    pub psi: T,
}

impl<T: Real> FieldErrors<T> {
    pub const NAMES: [&'static str; 5] = ["rho", "u", "c_plus", "c_minus", "psi"];

    pub fn as_array(&self) -> [T; 5] {
        [self.rho, self.u, self.c_plus, self.c_minus, self.psi]
    }

    pub fn max(&self) -> T {
        self.as_array().into_iter().fold(T::zero(), T::max)
    }
}

fn mode(amp: f64, wave: Wave, k: [i64; 2], omega: f64, phase: f64) -> TrigTerm<f64> {
    TrigTerm { amp, wave, k, omega, phase }
}

impl Manufactured<f64> {
    /// Time-periodic single-mode manufacture with density above 1.
    pub fn standard(dim: usize) -> Self {
        let w = 2.0 * std::f64::consts::PI;
        let second = |amp: f64, wave: Wave, omega: f64, phase: f64| {
            if dim == 2 {
                vec![mode(amp, wave, [0, 1], omega, phase)]
            } else {
                Vec::new()
            }
        };
        let mut rho = vec![mode(0.2, Wave::Sin, [1, 0], w, 0.0)];
        rho.extend(second(0.1, Wave::Cos, w, 0.4));
        let mut u = vec![TrigField::new(0.05, vec![mode(0.3, Wave::Cos, [1, 0], w, 0.3)])];
        if dim == 2 {
            u[0].terms.extend(second(0.1, Wave::Sin, w, 0.0));
            u.push(TrigField::new(-0.02, vec![mode(0.2, Wave::Sin, [1, 0], w, 1.1), mode(0.25, Wave::Cos, [0, 1], w, 0.2)]));
        }
        let mut cp = vec![mode(0.2, Wave::Cos, [1, 0], w, 0.0)];
        cp.extend(second(0.1, Wave::Sin, w, 0.7));
        let cm = vec![mode(0.15, Wave::Sin, [1, 0], w, 0.5)];
        Self {
            rho: TrigField::new(1.5, rho),
            u,
            c_plus: TrigField::new(1.0, cp),
            c_minus: TrigField::new(1.0, cm),
            psi: None,
        }
    }
}

impl<T: Real> Manufactured<T> {
    /// Uniform steady manufacture: `rho = c+ = c- = 1`, `u = 0`.
    pub fn rest(dim: usize) -> Self {
        Self {
            rho: TrigField::constant(T::one()),
            u: vec![TrigField::constant(T::zero()); dim],
            c_plus: TrigField::constant(T::one()),
            c_minus: TrigField::constant(T::one()),
            psi: None,
        }
    }

    /// Potential solving `-eps lap psi = Psi`, `(1 - zeta lap) Psi = e (c+ - c-)`
    /// mode by mode.
    pub fn derived_psi(&self, phys: &PhysParams<T>, reg: &RegParams<T>, length: T) -> Result<TrigField<T>> {
        let e = phys.e_charge;
        let base = T::lit(2.0) * T::PI() / length;
        let mut terms = Vec::new();
        let check = || -> Result<()> {
            for k in 0..8 {
                let t = T::lit(0.37 * k as f64);
                let net = self.c_plus.zero_mode(t) - self.c_minus.zero_mode(t);
                let scale = self.c_plus.zero_mode(t).abs() + self.c_minus.zero_mode(t).abs();
                if net.abs() > T::lit(1e-14) * (T::one() + scale) {
                    return Err(Error::InconsistentManufacture(format!("net charge {net:e} at t = {t}")));
                }
            }
            Ok(())
        };
        check()?;
        for (field, sign) in [(&self.c_plus, T::one()), (&self.c_minus, -T::one())] {
            for term in field.terms.iter().filter(|term| term.k != [0, 0]) {
                let k2 = base * base * T::lit((term.k[0] * term.k[0] + term.k[1] * term.k[1]) as f64);
                let factor = e / (phys.eps * k2 * (T::one() + reg.zeta * k2));
                terms.push(TrigTerm { amp: sign * term.amp * factor, ..*term });
            }
        }
        Ok(TrigField::new(T::zero(), terms))
    }

    /// Resolved potential: the explicit one after an analytic consistency
    /// check, otherwise the derived one.
    pub fn potential(&self, phys: &PhysParams<T>, reg: &RegParams<T>, length: T) -> Result<TrigField<T>> {
        let derived = self.derived_psi(phys, reg, length)?;
        let Some(given) = &self.psi else {
            return Ok(derived);
        };
        // compare on a fixed cloud of points and times
        let mut worst = T::zero();
        let mut scale = T::zero();
        for i in 0..32 {
            let s = T::lit(i as f64);
            let x = [
                length * (s * T::lit(0.618_033_988_7)).fract(),
                length * (s * T::lit(0.414_213_562_3)).fract(),
            ];
            let t = s * T::lit(0.071);
            worst = worst.max((given.value(x, t, length) - derived.value(x, t, length)).abs());
            scale = scale.max(derived.value(x, t, length).abs());
        }
        if worst > T::lit(1e-12) * (T::one() + scale) {
            return Err(Error::InconsistentManufacture(format!(
                "supplied potential misses -eps lap psi = e (c+ - c-) by {worst:e}"
            )));
        }
        Ok(given.clone())
    }

    /// Discrete state sampled at time `t`, potential solved by `model`.
    pub fn state(&self, model: &Model<T>, t: T) -> Result<State<T>> {
        let grid = *model.grid();
        if self.u.len() != grid.dim() {
            return Err(Error::InconsistentManufacture(format!(
                "{} velocity components on a {}D grid",
                self.u.len(),
                grid.dim()
            )));
        }
        let u = VectorField::from_components(self.u.iter().map(|f| f.sample(grid, t)).collect())?;
        let state = State::from_fields(t, self.rho.sample(grid, t), u, self.c_plus.sample(grid, t), self.c_minus.sample(grid, t))?;
        model.solve_potential(state)
    }

    pub fn errors(&self, model: &Model<T>, state: &State<T>) -> Result<FieldErrors<T>> {
        let grid = *model.grid();
        let t = state.t;
        let psi = self.potential(&model.phys, &model.reg, grid.length())?;
        let u = (0..grid.dim())
            .map(|a| state.u.comp(a).max_abs_diff(&self.u[a].sample(grid, t)))
            .fold(T::zero(), T::max);
        Ok(FieldErrors {
            rho: state.rho.max_abs_diff(&self.rho.sample(grid, t)),
            u,
            c_plus: state.c_plus.max_abs_diff(&self.c_plus.sample(grid, t)),
            c_minus: state.c_minus.max_abs_diff(&self.c_minus.sample(grid, t)),
            psi: state.psi.max_abs_diff(&psi.sample(grid, t)),
        })
    }
}

/// Pointwise source `(S_rho, S_m, S_c+, S_c-)` of the manufacture, the
/// residual of the continuous equations.
#[derive(Debug, Clone)]
pub struct MmsSource<T: Real> {
    man: Manufactured<T>,
    psi: TrigField<T>,
    phys: PhysParams<T>,
    reg: RegParams<T>,
    law: PressureLaw<T>,
    frozen_fluid: bool,
}

/// Source values at one point; `mom` uses the first `dim` entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource<T> {
    pub rho: T,
    pub mom: [T; 2],
    pub c_plus: T,
    pub c_minus: T,
}

/// Builds the forcing that makes `man` an exact solution of `model`'s system.
pub fn mms_source<T: Real>(man: &Manufactured<T>, model: &Model<T>) -> Result<MmsSource<T>> {
    let grid = *model.grid();
    if man.u.len() != grid.dim() {
        return Err(Error::InconsistentManufacture(format!("{} velocity components on a {}D grid", man.u.len(), grid.dim())));
    }
    let psi = man.potential(&model.phys, &model.reg, grid.length())?;
    Ok(MmsSource {
        man: man.clone(),
        psi,
        phys: model.phys,
        reg: model.reg,
        law: model.law,
        frozen_fluid: model.frozen_fluid,
    })
}

impl<T: Real> MmsSource<T> {
    pub fn potential(&self) -> &TrigField<T> {
        &self.psi
    }

    pub fn at(&self, x: [T; 2], t: T, dim: usize, length: T) -> PointSource<T> {
        let (phys, reg) = (&self.phys, &self.reg);
        let r = self.man.rho.jet(x, t, length);
        let u: Vec<Jet<T>> = self.man.u.iter().map(|f| f.jet(x, t, length)).collect();
        let cp = self.man.c_plus.jet(x, t, length);
        let cm = self.man.c_minus.jet(x, t, length);
        let psi = self.psi.jet(x, t, length);
        let div_u = (0..dim).fold(T::zero(), |acc, j| acc + u[j].grad[j]);

        let mut out = PointSource { rho: T::zero(), mom: [T::zero(); 2], c_plus: T::zero(), c_minus: T::zero() };
        if !self.frozen_fluid {
            // mass
            let div_m = (0..dim).fold(T::zero(), |acc, j| acc + r.grad[j] * u[j].v) + r.v * div_u;
            out.rho = r.dt + div_m - reg.xi * r.lap();
            let delta_grad = if reg.delta > T::zero() {
                Some(self.man.rho.grad_lap_pow(2 * reg.s_order + 1, x, t, length))
            } else {
                None
            };
            for i in 0..dim {
                let ui = &u[i];
                let mut s = r.dt * ui.v + r.v * ui.dt;
                for j in 0..dim {
                    // d_j(rho u_i u_j)
                    s += r.grad[j] * ui.v * u[j].v + r.v * ui.grad[j] * u[j].v + r.v * ui.v * u[j].grad[j];
                    // mu d_j(rho (d_j u_i + d_i u_j))
                    s -= phys.mu
                        * (r.grad[j] * (ui.grad[j] + u[j].grad[i]) + r.v * (ui.hess[j][j] + u[j].hess[i][j]));
                    s += reg.xi * r.grad[j] * ui.grad[j];
                }
                s += self.law.dpressure_unchecked(r.v) * r.grad[i];
                if reg.eta > T::zero() {
                    s += reg.eta * self.man.u[i].lap_pow(2, x, t, length);
                }
                if let Some(g) = delta_grad {
                    s -= reg.delta * r.v * g[i];
                }
                s -= phys.eps * psi.lap() * psi.grad[i];
                s += cp.grad[i] + cm.grad[i];
                out.mom[i] = s;
            }
        }
        let e = phys.e_charge;
        let ion = |c: &Jet<T>, sign: T, mobility: T| {
            let div_cu = (0..dim).fold(T::zero(), |acc, j| acc + c.grad[j] * u[j].v) + c.v * div_u;
            let grad_dot = (0..dim).fold(T::zero(), |acc, j| acc + c.grad[j] * psi.grad[j]);
            c.dt + div_cu - mobility * (c.lap() + sign * e * (grad_dot + c.v * psi.lap()))
        };
        out.c_plus = ion(&cp, T::one(), phys.a_plus);
        out.c_minus = ion(&cm, -T::one(), phys.a_minus);
        out
    }

    pub fn sample(&self, grid: &Grid<T>, t: T) -> Tendency<T> {
        let d = grid.dim();
        let cells = grid.cells();
        let mut rho = Vec::with_capacity(cells);
        let mut mom = vec![Vec::with_capacity(cells); d];
        let mut cp = Vec::with_capacity(cells);
        let mut cm = Vec::with_capacity(cells);
        for idx in 0..cells {
            let s = self.at(grid.center(idx), t, d, grid.length());
            rho.push(s.rho);
            for (a, m) in mom.iter_mut().enumerate() {
                m.push(s.mom[a]);
            }
            cp.push(s.c_plus);
            cm.push(s.c_minus);
        }
        let make = |v| ScalarField::from_vec(*grid, v).expect("cell count");
        Tendency {
            d_rho: make(rho),
            d_mom: VectorField::from_components(mom.into_iter().map(make).collect()).expect("same grid"),
            d_cplus: make(cp),
            d_cminus: make(cm),
        }
    }
}

impl<T: Real> Forcing<T> for MmsSource<T> {
    fn forcing(&self, t: T, grid: &Grid<T>) -> Tendency<T> {
        self.sample(grid, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::Backend;

    fn model(dim: usize) -> Model<f64> {
        Model::new(Grid::unit(dim, 16).unwrap(), Backend::Centered2, PhysParams::default(), RegParams::default()).unwrap()
    }

    #[test]
    fn rest_manufacture_has_no_source() {
        for dim in [1, 2] {
            let m = model(dim);
            let src = mms_source(&Manufactured::rest(dim), &m).unwrap();
            assert_eq!(src.sample(m.grid(), 0.3).max_abs(), 0.0);
        }
    }

    #[test]
    fn net_charge_is_inconsistent() {
        let m = model(1);
        let mut man = Manufactured::<f64>::rest(1);
        man.c_plus.mean = 1.2;
        assert!(matches!(mms_source(&man, &m), Err(Error::InconsistentManufacture(_))));
        let mut man = Manufactured::<f64>::rest(1);
        man.c_plus.terms.push(TrigTerm { amp: 0.1, wave: Wave::Cos, k: [0, 0], omega: 1.0, phase: 0.0 });
        assert!(matches!(mms_source(&man, &m), Err(Error::InconsistentManufacture(_))));
    }

    #[test]
    fn explicit_potential_is_checked() {
        let m = model(1);
        let mut man = Manufactured::standard(1);
        let good = man.derived_psi(&m.phys, &m.reg, 1.0).unwrap();
        man.psi = Some(good.clone());
        assert!(mms_source(&man, &m).is_ok());
        let mut bad = good;
        bad.terms[0].amp *= 1.01;
        man.psi = Some(bad);
        assert!(matches!(mms_source(&man, &m), Err(Error::InconsistentManufacture(_))));
    }

    #[test]
    fn pure_ion_mode_source() {
        // c+- = 1 +- a sin(2 pi x) cos(w t), rho = 1, u = 0
        let m = model(1);
        let (a, w) = (0.1, 3.0);
        let pi = std::f64::consts::PI;
        let term = |s: f64| TrigTerm { amp: s * a, wave: Wave::Sin, k: [1, 0], omega: w, phase: 0.0 };
        let man = Manufactured {
            rho: TrigField::constant(1.0),
            u: vec![TrigField::constant(0.0)],
            c_plus: TrigField::new(1.0, vec![term(1.0)]),
            c_minus: TrigField::new(1.0, vec![term(-1.0)]),
            psi: None,
        };
        let src = mms_source(&man, &m).unwrap();
        let k2 = 4.0 * pi * pi;
        let (x, t) = (0.13, 0.4);
        let got = src.at([x, 0.0], t, 1, 1.0);
        // psi = 2 a g(t) sin / k2; c'' + e(c' psi' + c psi'') for the cation
        let g = (w * t).cos();
        let s = (2.0 * pi * x).sin();
        let c = (2.0 * pi * x).cos();
        let psi_amp = 2.0 * a * g / k2;
        let ct = -a * w * (w * t).sin() * s;
        let lap_c = -a * g * k2 * s;
        let drift = a * g * 2.0 * pi * c * psi_amp * 2.0 * pi * c + (1.0 + a * g * s) * (-psi_amp * k2 * s);
        let expect = ct - (lap_c + drift);
        assert!((got.c_plus - expect).abs() < 1e-13, "{} vs {expect}", got.c_plus);
        assert!((got.rho).abs() < 1e-15);
    }
}
