//! Uniform periodic lattice on the torus `[0, L)^d`.

use crate::error::{Error, Result};
use crate::real::Real;

/// Uniform periodic grid with `n` cells per axis in `dim` dimensions.
///
/// Cells are indexed row-major with axis 0 slowest: the linear index of cell
/// `(i0, i1)` is `i0 * n + i1`. Cell centres sit at `(i + 1/2) h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    dim: usize,
    n: usize,
    length: T,
}

impl<T: Real> Grid<T> {
    pub const MIN_CELLS: usize = 8;

    pub fn new(dim: usize, n: usize, length: T) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if n < Self::MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "n must be at least {}, got {n}",
                Self::MIN_CELLS
            )));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        Ok(Self { dim, n, length })
    }

    /// Unit-length grid.
    pub fn unit(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, T::one())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    #[inline]
    pub fn h(&self) -> T {
        self.length / T::from_usize_lossy(self.n)
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// `h^d`, the midpoint quadrature weight.
    #[inline]
    pub fn cell_volume(&self) -> T {
        self.h().powi(self.dim as i32)
    }

    pub fn volume(&self) -> T {
        self.length.powi(self.dim as i32)
    }

    /// Distance between consecutive entries along `axis` in the flat layout.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        debug_assert!(axis < self.dim);
        if self.dim == 2 && axis == 0 {
            self.n
        } else {
            1
        }
    }

    /// Multi-index of a flat cell index (unused axes are zero).
    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    #[inline]
    pub fn ravel(&self, ij: [usize; 2]) -> usize {
        if self.dim == 1 {
            ij[0]
        } else {
            ij[0] * self.n + ij[1]
        }
    }

    /// Flat index of the neighbour `offset` cells away along `axis`, wrapping periodically.
    #[inline]
    pub fn shift(&self, idx: usize, axis: usize, offset: isize) -> usize {
        let mut ij = self.unravel(idx);
        let n = self.n as isize;
        ij[axis] = (ij[axis] as isize + offset).rem_euclid(n) as usize;
        self.ravel(ij)
    }

    /// Cell centre coordinates (second entry zero in 1D).
    pub fn center(&self, idx: usize) -> [T; 2] {
        let ij = self.unravel(idx);
        let h = self.h();
        let half = T::lit(0.5);
        let x = (T::from_usize_lossy(ij[0]) + half) * h;
        let y = if self.dim == 2 {
            (T::from_usize_lossy(ij[1]) + half) * h
        } else {
            T::zero()
        };
        [x, y]
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Same geometry with a different resolution.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.dim, n, self.length)
    }
}
