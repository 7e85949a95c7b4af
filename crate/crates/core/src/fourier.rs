//! Complex FFT on the periodic grid, 1D or 2D (row-column).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;
use crate::real::Real;

#[derive(Clone)]
pub struct Fourier<T: Real> {
    grid: Grid<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for Fourier<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fourier").field("grid", &self.grid).finish()
    }
}

/// Signed integer wavenumber of FFT bin `m` on `n` points. The Nyquist bin
/// of an even `n` maps to `+n/2`.
#[inline]
pub fn signed_index(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Whether FFT bin `m` is the unpaired Nyquist bin.
#[inline]
pub fn is_nyquist(m: usize, n: usize) -> bool {
    n % 2 == 0 && m == n / 2
}

impl<T: Real> Fourier<T> {
    pub fn new(grid: Grid<T>) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        Self { grid, forward, inverse }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    fn transform(&self, data: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
        let n = self.grid.n();
        let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        // contiguous axis (the last one) first
        fft.process_with_scratch(data, &mut scratch);
        if self.grid.dim() == 2 {
            let mut column = vec![Complex::default(); n];
            for j in 0..n {
                for i in 0..n {
                    column[i] = data[i * n + j];
                }
                fft.process_with_scratch(&mut column, &mut scratch);
                for i in 0..n {
                    data[i * n + j] = column[i];
                }
            }
        }
    }

    /// Unnormalized forward transform of real samples.
    pub fn forward(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut data: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    /// Inverse transform (normalized), keeping the real part.
    pub fn inverse_real(&self, mut data: Vec<Complex<T>>) -> Vec<T> {
        self.transform(&mut data, &self.inverse);
        let scale = T::one() / T::from_usize_lossy(self.grid.cells());
        data.into_iter().map(|z| z.re * scale).collect()
    }

    /// Signed integer wavenumbers (per axis) of flat spectral index `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; 2] {
        let n = self.grid.n();
        let ij = self.grid.unravel(idx);
        let k1 = if self.grid.dim() == 2 { signed_index(ij[1], n) } else { 0 };
        [signed_index(ij[0], n), k1]
    }

    /// Whether any axis of flat spectral index `idx` sits on the Nyquist bin.
    #[inline]
    pub fn touches_nyquist(&self, idx: usize, axis: usize) -> bool {
        let ij = self.grid.unravel(idx);
        is_nyquist(ij[axis], self.grid.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_2d() {
        let g = Grid::<f64>::unit(2, 8).unwrap();
        let f = Fourier::new(g);
        let vals: Vec<f64> = (0..64).map(|i| ((i * 7) % 11) as f64 - 3.0).collect();
        let back = f.inverse_real(f.forward(&vals));
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn signed_indices() {
        let got: Vec<i64> = (0..8).map(|m| signed_index(m, 8)).collect();
        assert_eq!(got, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert!(is_nyquist(4, 8));
        assert!(!is_nyquist(3, 7));
    }
}
