//! Poisson-Boltzmann equilibrium of the ion subsystem.
//!
//! The equilibrium `c+- = Z+- exp(-+ e psi)` with
//! `-eps lap psi = e (c+ - c-) + a cos(2 pi x / L)` is found by damped Picard
//! iteration. The fixed background charge is what makes the equilibrium
//! non-uniform; without it the only periodic solution is `psi = 0`. The
//! spectral inversion here uses its own FFT plan and wavenumbers.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::fourier::signed_index;
use crate::grid::Grid;
use crate::params::PhysParams;
use crate::real::Real;
use crate::state::State;

pub const PICARD_DAMPING: f64 = 0.5;
pub const PICARD_TOLERANCE: f64 = 1e-13;
pub const PICARD_MAX_ITERATIONS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PbSolution<T: Real> {
    pub c_plus: ScalarField<T>,
    pub c_minus: ScalarField<T>,
    pub psi: ScalarField<T>,
    /// The fixed charge `a cos(2 pi x / L)`.
    pub background: ScalarField<T>,
    pub iterations: usize,
}

/// Exact inverse of `-eps lap` for trigonometric data, zero mean.
impl<T: Real> PbSolution<T> {
    /// Fluid at rest with unit density carrying the equilibrium ions. The
    /// oracle potential is installed as is, since the re-solve from the ions
    /// alone would miss the background charge.
    pub fn state(&self, phys: &PhysParams<T>) -> Result<State<T>> {
        let grid = *self.psi.grid();
        let mut s = State::from_fields(
            T::zero(),
            ScalarField::constant(grid, T::one()),
            VectorField::zeros(grid),
            self.c_plus.clone(),
            self.c_minus.clone(),
        )?;
        s.psi = self.psi.clone();
        s.psi_cap = self
            .c_plus
            .zip_map(&self.c_minus, |a, b| phys.e_charge * (a - b))
            .zip_map(&self.background, |q, b| q + b);
        s.consistent = true;
        Ok(s)
    }
}

struct SpectralPoisson<T: Real> {
    grid: Grid<T>,
    inv_symbol: Vec<T>,
}

impl<T: Real> SpectralPoisson<T> {
    fn new(grid: Grid<T>, eps: T) -> Self {
        let n = grid.n();
        let base = T::lit(2.0) * T::PI() / grid.length();
        let inv_symbol = (0..grid.cells())
            .map(|idx| {
                let ij = grid.unravel(idx);
                let mut k2 = T::zero();
                for a in 0..grid.dim() {
                    let k = base * T::lit(signed_index(ij[a], n) as f64);
                    k2 += k * k;
                }
                if k2 == T::zero() {
                    T::zero()
                } else {
                    T::one() / (eps * k2)
                }
            })
            .collect();
        Self { grid, inv_symbol }
    }

    fn solve(&self, q: &[T]) -> Vec<T> {
        let n = self.grid.n();
        let mut planner = FftPlanner::<T>::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut data: Vec<Complex<T>> = q.iter().map(|&v| Complex::new(v, T::zero())).collect();
        let pass = |data: &mut Vec<Complex<T>>, fft: &std::sync::Arc<dyn rustfft::Fft<T>>| {
            for row in data.chunks_exact_mut(n) {
                fft.process(row);
            }
            if self.grid.dim() == 2 {
                let mut col = vec![Complex::default(); n];
                for j in 0..n {
                    for i in 0..n {
                        col[i] = data[i * n + j];
                    }
                    fft.process(&mut col);
                    for i in 0..n {
                        data[i * n + j] = col[i];
                    }
                }
            }
        };
        pass(&mut data, &fwd);
        for (z, s) in data.iter_mut().zip(&self.inv_symbol) {
            *z = *z * *s;
        }
        pass(&mut data, &inv);
        let scale = T::one() / T::from_usize_lossy(self.grid.cells());
        data.into_iter().map(|z| z.re * scale).collect()
    }
}

/// Boltzmann profile `Z exp(-s e psi)` with `Z` fixing the mean to `c_bar`.
fn boltzmann<T: Real>(psi: &[T], s: T, c_bar: T) -> Vec<T> {
    let w: Vec<T> = psi.iter().map(|&p| (-s * p).exp()).collect();
    let mean = w.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize_lossy(w.len());
    w.into_iter().map(|v| c_bar * v / mean).collect()
}

/// Frozen-fluid equilibrium with neutral ion totals `C |Omega|` each and a
/// background charge of amplitude `amplitude`.
pub fn poisson_boltzmann_oracle<T: Real>(
    grid: Grid<T>,
    phys: &PhysParams<T>,
    background: T,
    amplitude: T,
) -> Result<PbSolution<T>> {
    phys.validate()?;
    if !(background > T::zero()) {
        return Err(Error::InvalidParameter(format!("background concentration must be positive, got {background}")));
    }
    let e = phys.e_charge;
    let two_pi_over_l = T::lit(2.0) * T::PI() / grid.length();
    let bg = ScalarField::from_fn(grid, |x| amplitude * (two_pi_over_l * x[0]).cos());
    let poisson = SpectralPoisson::new(grid, phys.eps);
    let damping = T::lit(PICARD_DAMPING);
    let mut psi = vec![T::zero(); grid.cells()];
    let mut update = T::infinity();
    for it in 1..=PICARD_MAX_ITERATIONS {
        let cp = boltzmann(&psi, e, background);
        let cm = boltzmann(&psi, -e, background);
        let q: Vec<T> = (0..psi.len()).map(|i| e * (cp[i] - cm[i]) + bg.values()[i]).collect();
        let target = poisson.solve(&q);
        update = T::zero();
        for (p, t) in psi.iter_mut().zip(&target) {
            let next = (T::one() - damping) * *p + damping * *t;
            update = update.max((next - *p).abs());
            *p = next;
        }
        if !update.is_finite() {
            break;
        }
        if update <= T::lit(PICARD_TOLERANCE) {
            let c_plus = ScalarField::from_vec(grid, boltzmann(&psi, e, background))?;
            let c_minus = ScalarField::from_vec(grid, boltzmann(&psi, -e, background))?;
            return Ok(PbSolution { c_plus, c_minus, psi: ScalarField::from_vec(grid, psi)?, background: bg, iterations: it });
        }
    }
    Err(Error::NoConvergence { iterations: PICARD_MAX_ITERATIONS, update: update.as_f64() })
}

/// Small-amplitude potential amplitude `a / (eps |kappa|^2 + 2 e^2 C)` of the
/// first mode.
pub fn linearized_amplitude<T: Real>(grid: &Grid<T>, phys: &PhysParams<T>, background: T, amplitude: T) -> T {
    let k = T::lit(2.0) * T::PI() / grid.length();
    amplitude / (phys.eps * k * k + T::lit(2.0) * phys.e_charge * phys.e_charge * background)
}
