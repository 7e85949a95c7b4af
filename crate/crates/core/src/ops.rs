//! Discrete differential operators on the periodic grid.
//!
//! Two backends share one interface. `Centered2` uses second-order centred
//! differences with the compact three-point Laplacian; `Spectral` multiplies
//! by the exact Fourier symbols. In both backends `grad` and `div` are exact
//! negative adjoints in the midpoint inner product, and the Fourier symbols
//! returned by [`Ops::laplacian_symbol`] and [`Ops::grad_symbol`] are the
//! exact symbols of the real-space operators, so diagonal solves invert them
//! to round-off.
//!
//! Flux-form operators (`diffuse`, `nernst_planck_div`) are built face by
//! face in the stencil backend so their cell sums telescope to zero.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::{ScalarField, TensorField, VectorField};
use crate::fourier::{is_nyquist, Fourier};
use crate::grid::Grid;
use crate::params::IonSign;
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Centered2,
    Spectral,
}

/// Operator set bound to one grid and backend.
#[derive(Debug, Clone)]
pub struct Ops<T: Real> {
    grid: Grid<T>,
    backend: Backend,
    fourier: Fourier<T>,
    lap_symbol: Vec<T>,
    grad_symbol: Vec<[T; 2]>,
    plus: [Vec<usize>; 2],
    minus: [Vec<usize>; 2],
}

/// Bernoulli function `x / (e^x - 1)`.
#[inline]
fn bernoulli<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        x / x.exp_m1()
    }
}

/// `(B(x), B(-x))` from one exponential, using `B(-x) = B(x) + x` on the
/// side where it does not cancel.
#[inline]
fn bernoulli_pair<T: Real>(x: T) -> (T, T) {
    let b = bernoulli(x.abs());
    if x >= T::zero() {
        (b, b + x)
    } else {
        (b - x, b)
    }
}

impl<T: Real> Ops<T> {
    pub fn new(grid: Grid<T>, backend: Backend) -> Self {
        let fourier = Fourier::new(grid);
        let n = grid.n();
        let h = grid.h();
        let two_pi_over_l = T::lit(2.0) * T::PI() / grid.length();
        let cells = grid.cells();
        let mut lap_symbol = Vec::with_capacity(cells);
        let mut grad_symbol = Vec::with_capacity(cells);
        for idx in 0..cells {
            let modes = fourier.mode(idx);
            let ij = grid.unravel(idx);
            let mut lap = T::zero();
            let mut grad = [T::zero(); 2];
            for axis in 0..grid.dim() {
                let k = T::lit(modes[axis] as f64) * two_pi_over_l;
                let nyq = is_nyquist(ij[axis], n);
                match backend {
                    Backend::Centered2 => {
                        let s = (k * h * T::lit(0.5)).sin();
                        lap -= T::lit(4.0) * s * s / (h * h);
                        grad[axis] = if nyq { T::zero() } else { (k * h).sin() / h };
                    }
                    Backend::Spectral => {
                        lap -= k * k;
                        grad[axis] = if nyq { T::zero() } else { k };
                    }
                }
            }
            lap_symbol.push(lap);
            grad_symbol.push(grad);
        }
        let mut plus = [Vec::new(), Vec::new()];
        let mut minus = [Vec::new(), Vec::new()];
        for axis in 0..grid.dim() {
            plus[axis] = (0..cells).map(|i| grid.shift(i, axis, 1)).collect();
            minus[axis] = (0..cells).map(|i| grid.shift(i, axis, -1)).collect();
        }
        Self { grid, backend, fourier, lap_symbol, grad_symbol, plus, minus }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn backend(&self) -> Backend {
        self.backend
    }

    #[inline]
    pub fn fourier(&self) -> &Fourier<T> {
        &self.fourier
    }

    /// Eigenvalue (`<= 0`) of [`Ops::laplacian`] on spectral index `idx`.
    #[inline]
    pub fn laplacian_symbol(&self, idx: usize) -> T {
        self.lap_symbol[idx]
    }

    /// Real coefficient `g` such that `d/dx_axis` acts as `i g` on index `idx`.
    #[inline]
    pub fn grad_symbol(&self, idx: usize, axis: usize) -> T {
        self.grad_symbol[idx][axis]
    }

    /// Spectral radius of the Laplacian.
    pub fn laplacian_radius(&self) -> T {
        self.lap_symbol.iter().fold(T::zero(), |acc, &v| acc.max(-v))
    }

    /// Largest first-derivative symbol over all axes.
    pub fn grad_radius(&self) -> T {
        self.grad_symbol
            .iter()
            .fold(T::zero(), |acc, g| acc.max(g[0].abs()).max(g[1].abs()))
    }

    fn check(&self, f: &ScalarField<T>) -> Result<()> {
        f.check_grid(&self.grid)
    }

    /// Multiplies the spectrum of `f` by `symbol(idx)`.
    pub fn apply_symbol(&self, f: &ScalarField<T>, symbol: impl Fn(usize) -> Complex<T>) -> ScalarField<T> {
        let mut spec = self.fourier.forward(f.values());
        for (idx, z) in spec.iter_mut().enumerate() {
            *z = *z * symbol(idx);
        }
        ScalarField::from_vec(self.grid, self.fourier.inverse_real(spec)).expect("same grid")
    }

    /// First derivative along `axis` (grid already checked).
    pub(crate) fn partial(&self, f: &ScalarField<T>, axis: usize) -> ScalarField<T> {
        match self.backend {
            Backend::Centered2 => {
                let inv2h = T::one() / (T::lit(2.0) * self.grid.h());
                let v = f.values();
                let (p, m) = (&self.plus[axis], &self.minus[axis]);
                let out = (0..v.len()).map(|i| (v[p[i]] - v[m[i]]) * inv2h).collect();
                ScalarField::from_vec(self.grid, out).expect("same grid")
            }
            Backend::Spectral => {
                self.apply_symbol(f, |idx| Complex::new(T::zero(), self.grad_symbol[idx][axis]))
            }
        }
    }

    pub fn grad(&self, f: &ScalarField<T>) -> Result<VectorField<T>> {
        self.check(f)?;
        VectorField::from_components((0..self.grid.dim()).map(|a| self.partial(f, a)).collect())
    }

    pub fn div(&self, v: &VectorField<T>) -> Result<ScalarField<T>> {
        v.grid().check_same(&self.grid)?;
        let mut out = ScalarField::zeros(self.grid);
        for axis in 0..self.grid.dim() {
            out.axpy(T::one(), &self.partial(v.comp(axis), axis));
        }
        Ok(out)
    }

    pub fn laplacian(&self, f: &ScalarField<T>) -> Result<ScalarField<T>> {
        self.check(f)?;
        Ok(self.laplacian_unchecked(f))
    }

    fn laplacian_unchecked(&self, f: &ScalarField<T>) -> ScalarField<T> {
        match self.backend {
            Backend::Centered2 => {
                let inv_h2 = T::one() / (self.grid.h() * self.grid.h());
                let v = f.values();
                let mut out = vec![T::zero(); v.len()];
                let two = T::lit(2.0);
                for axis in 0..self.grid.dim() {
                    let (p, m) = (&self.plus[axis], &self.minus[axis]);
                    for (i, o) in out.iter_mut().enumerate() {
                        *o += (v[p[i]] - two * v[i] + v[m[i]]) * inv_h2;
                    }
                }
                ScalarField::from_vec(self.grid, out).expect("same grid")
            }
            Backend::Spectral => self.apply_symbol(f, |idx| Complex::new(self.lap_symbol[idx], T::zero())),
        }
    }

    /// `Lap^m f` for `m >= 1`. The stencil backend stops at `m = 2`.
    pub fn iterated_laplacian(&self, f: &ScalarField<T>, m: usize) -> Result<ScalarField<T>> {
        self.check(f)?;
        if m == 0 {
            return Err(Error::InvalidParameter("iterated Laplacian order must be >= 1".into()));
        }
        match self.backend {
            Backend::Centered2 => {
                if m > 2 {
                    return Err(Error::OrderTooHigh { order: m });
                }
                let mut out = self.laplacian_unchecked(f);
                for _ in 1..m {
                    out = self.laplacian_unchecked(&out);
                }
                Ok(out)
            }
            Backend::Spectral => Ok(self.apply_symbol(f, |idx| {
                Complex::new(self.lap_symbol[idx].powi(m as i32), T::zero())
            })),
        }
    }

    /// Jacobian `J_ij = d_j u_i`.
    pub fn jacobian(&self, u: &VectorField<T>) -> Result<TensorField<T>> {
        u.grid().check_same(&self.grid)?;
        let d = self.grid.dim();
        let mut jac = TensorField::zeros(self.grid);
        for i in 0..d {
            for j in 0..d {
                *jac.get_mut(i, j) = self.partial(u.comp(i), j);
            }
        }
        Ok(jac)
    }

    /// Symmetric part `D(u) = (grad u + grad u^T) / 2`.
    pub fn sym_grad(&self, u: &VectorField<T>) -> Result<TensorField<T>> {
        let jac = self.jacobian(u)?;
        Ok(split_jacobian(&jac).0)
    }

    /// Antisymmetric part `A(u) = (grad u - grad u^T) / 2`.
    pub fn antisym_grad(&self, u: &VectorField<T>) -> Result<TensorField<T>> {
        let jac = self.jacobian(u)?;
        Ok(split_jacobian(&jac).1)
    }

    /// Pointwise `|2 grad sqrt(c) + s sqrt(c) e grad psi|^2`, which equals
    /// `c |grad(ln c + s e psi)|^2` wherever `c > 0` and stays finite at `c = 0`.
    pub fn safe_entropy_flux_sq(
        &self,
        c: &ScalarField<T>,
        psi: &ScalarField<T>,
        sign: IonSign,
        e_charge: T,
    ) -> Result<ScalarField<T>> {
        self.check(c)?;
        self.check(psi)?;
        check_nonnegative(c)?;
        let root = c.map(|v| v.sqrt());
        let se = sign.factor::<T>() * e_charge;
        let two = T::lit(2.0);
        let mut out = ScalarField::zeros(self.grid);
        for axis in 0..self.grid.dim() {
            let dr = self.partial(&root, axis);
            let dpsi = self.partial(psi, axis);
            for (i, o) in out.values_mut().iter_mut().enumerate() {
                let w = two * dr.values()[i] + se * root.values()[i] * dpsi.values()[i];
                *o += w * w;
            }
        }
        Ok(out)
    }

    /// `d_axis (coef d_axis f)`; compact face form in the stencil backend.
    pub(crate) fn diffuse_axis(&self, coef: &ScalarField<T>, f: &ScalarField<T>, axis: usize) -> ScalarField<T> {
        match self.backend {
            Backend::Centered2 => {
                let h = self.grid.h();
                let inv_h2 = T::one() / (h * h);
                let half = T::lit(0.5);
                let (k, v) = (coef.values(), f.values());
                let p = &self.plus[axis];
                let m = &self.minus[axis];
                // face i+1/2 flux
                let face: Vec<T> = (0..v.len()).map(|i| half * (k[i] + k[p[i]]) * (v[p[i]] - v[i])).collect();
                let out = (0..v.len()).map(|i| (face[i] - face[m[i]]) * inv_h2).collect();
                ScalarField::from_vec(self.grid, out).expect("same grid")
            }
            Backend::Spectral => {
                let d = self.partial(f, axis);
                self.partial(&coef.zip_map(&d, |a, b| a * b), axis)
            }
        }
    }

    /// `div(coef grad f)`.
    pub fn diffuse(&self, coef: &ScalarField<T>, f: &ScalarField<T>) -> Result<ScalarField<T>> {
        self.check(coef)?;
        self.check(f)?;
        let mut out = ScalarField::zeros(self.grid);
        for axis in 0..self.grid.dim() {
            out.axpy(T::one(), &self.diffuse_axis(coef, f, axis));
        }
        Ok(out)
    }

    /// `div(rho (grad u + grad u^T))`, i.e. `2 div(rho D(u))`.
    pub fn viscous_div(&self, rho: &ScalarField<T>, u: &VectorField<T>) -> Result<VectorField<T>> {
        self.check(rho)?;
        u.grid().check_same(&self.grid)?;
        let d = self.grid.dim();
        let mut comps = Vec::with_capacity(d);
        match self.backend {
            Backend::Centered2 => {
                for i in 0..d {
                    let mut out = self.diffuse(rho, u.comp(i))?;
                    out.axpy(T::one(), &self.diffuse_axis(rho, u.comp(i), i));
                    for j in (0..d).filter(|&j| j != i) {
                        let cross = rho.zip_map(&self.partial(u.comp(j), i), |a, b| a * b);
                        out.axpy(T::one(), &self.partial(&cross, j));
                    }
                    comps.push(out);
                }
            }
            Backend::Spectral => {
                let jac = self.jacobian(u)?;
                for i in 0..d {
                    let mut out = ScalarField::zeros(self.grid);
                    for j in 0..d {
                        let s = jac.get(i, j).zip_map(jac.get(j, i), |a, b| a + b);
                        out.axpy(T::one(), &self.partial(&rho.zip_map(&s, |r, v| r * v), j));
                    }
                    comps.push(out);
                }
            }
        }
        VectorField::from_components(comps)
    }

    /// Nernst-Planck operator `div(A (grad c + s e c grad psi))`.
    ///
    /// The stencil backend uses the exponentially fitted (Scharfetter-Gummel)
    /// face flux, which vanishes exactly on Boltzmann profiles
    /// `c ~ exp(-s e psi)` and needs no logarithm of `c`.
    pub fn nernst_planck_div(
        &self,
        c: &ScalarField<T>,
        psi: &ScalarField<T>,
        sign: IonSign,
        mobility: T,
        e_charge: T,
    ) -> Result<ScalarField<T>> {
        self.check(c)?;
        self.check(psi)?;
        let se = sign.factor::<T>() * e_charge;
        let mut out = ScalarField::zeros(self.grid);
        match self.backend {
            Backend::Centered2 => {
                let h = self.grid.h();
                let scale = mobility / (h * h);
                let (cv, pv) = (c.values(), psi.values());
                for axis in 0..self.grid.dim() {
                    let p = &self.plus[axis];
                    let m = &self.minus[axis];
                    let face: Vec<T> = (0..cv.len())
                        .map(|i| {
                            let x = se * (pv[p[i]] - pv[i]);
                            let (bx, bmx) = bernoulli_pair(x);
                            bmx * cv[p[i]] - bx * cv[i]
                        })
                        .collect();
                    for (i, o) in out.values_mut().iter_mut().enumerate() {
                        *o += (face[i] - face[m[i]]) * scale;
                    }
                }
            }
            Backend::Spectral => {
                for axis in 0..self.grid.dim() {
                    let dc = self.partial(c, axis);
                    let dpsi = self.partial(psi, axis);
                    let flux = ScalarField::from_vec(
                        self.grid,
                        (0..c.len())
                            .map(|i| mobility * (dc.values()[i] + se * c.values()[i] * dpsi.values()[i]))
                            .collect(),
                    )?;
                    out.axpy(T::one(), &self.partial(&flux, axis));
                }
            }
        }
        Ok(out)
    }
}

/// Splits a Jacobian into its symmetric and antisymmetric parts.
pub fn split_jacobian<T: Real>(jac: &TensorField<T>) -> (TensorField<T>, TensorField<T>) {
    let d = jac.dim();
    let half = T::lit(0.5);
    let mut sym = jac.clone();
    let mut anti = jac.clone();
    for i in 0..d {
        for j in 0..d {
            let (a, b) = (jac.get(i, j), jac.get(j, i));
            *sym.get_mut(i, j) = a.zip_map(b, |x, y| half * (x + y));
            *anti.get_mut(i, j) = a.zip_map(b, |x, y| half * (x - y));
        }
    }
    (sym, anti)
}

pub(crate) fn check_nonnegative<T: Real>(c: &ScalarField<T>) -> Result<()> {
    match c.values().iter().position(|&v| v < T::zero() || v.is_nan()) {
        Some(cell) => Err(Error::NegativeConcentration { value: c.values()[cell].as_f64(), cell }),
        None => Ok(()),
    }
}
