//! Cell-centred scalar, vector and tensor fields.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn constant(grid: Grid<T>, value: T) -> Self {
        Self { grid, values: vec![value; grid.cells()] }
    }

    pub fn from_vec(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.cells(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(grid: Grid<T>, mut f: impl FnMut([T; 2]) -> T) -> Self {
        let values = (0..grid.cells()).map(|i| f(grid.center(i))).collect();
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination; panics on grid mismatch (internal use on fields
    /// that share a grid by construction).
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.grid, other.grid, "zip_map on mismatched grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid, values }
    }

    pub fn scale(&self, a: T) -> Self {
        self.map(|v| a * v)
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: T, other: &Self) {
        assert_eq!(self.grid, other.grid, "axpy on mismatched grids");
        for (s, &o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    /// Midpoint-rule integral over the torus.
    pub fn integral(&self) -> T {
        self.sum() * self.grid.cell_volume()
    }

    pub fn mean(&self) -> T {
        self.sum() / T::from_usize_lossy(self.len())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Index and value of the smallest entry.
    pub fn argmin(&self) -> (usize, T) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, T::infinity()), |best, (i, v)| if v < best.1 { (i, v) } else { best })
    }

    /// First non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// Discrete L2 inner product `sum(a b) h^d`.
    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.grid, other.grid, "dot on mismatched grids");
        let s = self.values.iter().zip(&other.values).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        s * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn check_grid(&self, grid: &Grid<T>) -> Result<()> {
        self.grid.check_same(grid)
    }
}

/// `dim` scalar components on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<T> {
    comps: Vec<ScalarField<T>>,
}

impl<T: Real> VectorField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self { comps: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect() }
    }

    pub fn from_components(comps: Vec<ScalarField<T>>) -> Result<Self> {
        let Some(first) = comps.first() else {
            return Err(Error::InvalidGrid("vector field needs components".into()));
        };
        let grid = *first.grid();
        if comps.len() != grid.dim() {
            return Err(Error::InvalidGrid(format!(
                "vector field on a {}-d grid needs {} components, got {}",
                grid.dim(),
                grid.dim(),
                comps.len()
            )));
        }
        for c in &comps {
            c.check_grid(&grid)?;
        }
        Ok(Self { comps })
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        self.comps[0].grid()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn comp(&self, axis: usize) -> &ScalarField<T> {
        &self.comps[axis]
    }

    #[inline]
    pub fn comp_mut(&mut self, axis: usize) -> &mut ScalarField<T> {
        &mut self.comps[axis]
    }

    pub fn components(&self) -> &[ScalarField<T>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<ScalarField<T>> {
        self.comps
    }

    pub fn map_comps(&self, f: impl Fn(&ScalarField<T>) -> ScalarField<T>) -> Self {
        Self { comps: self.comps.iter().map(f).collect() }
    }

    pub fn scale(&self, a: T) -> Self {
        self.map_comps(|c| c.scale(a))
    }

    pub fn axpy(&mut self, a: T, other: &Self) {
        for (s, o) in self.comps.iter_mut().zip(&other.comps) {
            s.axpy(a, o);
        }
    }

    /// Pointwise Euclidean norm squared.
    pub fn norm_sq(&self) -> ScalarField<T> {
        let mut out = ScalarField::zeros(*self.grid());
        for c in &self.comps {
            for (o, &v) in out.values_mut().iter_mut().zip(c.values()) {
                *o += v * v;
            }
        }
        out
    }

    /// Pointwise dot product with another vector field.
    pub fn dot_pointwise(&self, other: &Self) -> ScalarField<T> {
        let mut out = ScalarField::zeros(*self.grid());
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for ((o, &x), &y) in out.values_mut().iter_mut().zip(a.values()).zip(b.values()) {
                *o += x * y;
            }
        }
        out
    }

    /// Discrete L2 inner product summed over components.
    pub fn dot(&self, other: &Self) -> T {
        self.comps.iter().zip(&other.comps).fold(T::zero(), |acc, (a, b)| acc + a.dot(b))
    }

    pub fn max_abs(&self) -> T {
        self.comps.iter().fold(T::zero(), |acc, c| acc.max(c.max_abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.comps
            .iter()
            .zip(&other.comps)
            .fold(T::zero(), |acc, (a, b)| acc.max(a.max_abs_diff(b)))
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.comps.iter().find_map(ScalarField::first_non_finite)
    }
}

/// `dim x dim` components stored row-major: entry `(i, j)` at `i * dim + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField<T> {
    dim: usize,
    comps: Vec<ScalarField<T>>,
}

impl<T: Real> TensorField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        let dim = grid.dim();
        Self { dim, comps: (0..dim * dim).map(|_| ScalarField::zeros(grid)).collect() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &ScalarField<T> {
        &self.comps[i * self.dim + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut ScalarField<T> {
        &mut self.comps[i * self.dim + j]
    }

    pub fn grid(&self) -> &Grid<T> {
        self.comps[0].grid()
    }

    /// Pointwise Frobenius norm squared `sum_ij T_ij^2`.
    pub fn frobenius_sq(&self) -> ScalarField<T> {
        let mut out = ScalarField::zeros(*self.grid());
        for c in &self.comps {
            for (o, &v) in out.values_mut().iter_mut().zip(c.values()) {
                *o += v * v;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                *out.get_mut(i, j) = self.get(j, i).clone();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.comps
            .iter()
            .zip(&other.comps)
            .fold(T::zero(), |acc, (a, b)| acc.max(a.max_abs_diff(b)))
    }

    pub fn max_abs(&self) -> T {
        self.comps.iter().fold(T::zero(), |acc, c| acc.max(c.max_abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_is_midpoint_sum() {
        let g = Grid::<f64>::new(1, 16, 2.0).unwrap();
        let f = ScalarField::constant(g, 3.0);
        assert_eq!(f.integral(), 6.0);
        assert_eq!(f.mean(), 3.0);
    }

    #[test]
    fn vector_components_must_match_dim() {
        let g = Grid::<f64>::unit(2, 8).unwrap();
        assert!(VectorField::from_components(vec![ScalarField::zeros(g)]).is_err());
        let v = VectorField::from_components(vec![ScalarField::zeros(g), ScalarField::constant(g, 2.0)]);
        assert_eq!(v.unwrap().norm_sq().max(), 4.0);
    }
}
