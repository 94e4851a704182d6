//! Uniform rectangular grids and gridded real-valued data.
//!
//! Two layout conventions coexist:
//!
//! * ordinary grids (noise, fields, test functions): index `j` along an axis
//!   sits at `origin + j * spacing`;
//! * wrap-around grids (kernels): index `j` encodes the signed coordinate
//!   `j * spacing` for `j < n/2` and `(j - n) * spacing` otherwise, matching
//!   the layout the DFT produces when a symbol is sampled in FFT order.

use crate::error::{Error, Result};
use crate::num::Scalar;
use serde::{Deserialize, Serialize};

/// Geometry of a uniform grid: cell counts, spacings and origin per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub dims: Vec<usize>,
    pub spacing: Vec<T>,
    pub origin: Vec<T>,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(dims: Vec<usize>, spacing: Vec<T>, origin: Vec<T>) -> Result<Self> {
        if dims.is_empty() || dims.len() != spacing.len() || dims.len() != origin.len() {
            return Err(Error::argument("grid spec: axis lists must be non-empty and equal length"));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::argument("grid spec: zero cells on an axis"));
        }
        if spacing.iter().any(|&h| !(h > T::zero())) {
            return Err(Error::argument("grid spec: spacing must be positive"));
        }
        Ok(GridSpec { dims, spacing, origin })
    }

    /// Cube grid centred at the origin in wrap-around convention.
    pub fn centered(d: usize, n: usize, spacing: T) -> Result<Self> {
        Self::new(vec![n; d], vec![spacing; d], vec![T::zero(); d])
    }

    pub fn d(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> T {
        self.spacing.iter().copied().fold(T::one(), |a, b| a * b)
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.d()];
        for a in (0..self.d().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.dims[a + 1];
        }
        s
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.d()];
        let mut rem = flat;
        for (a, s) in self.strides().iter().enumerate() {
            out[a] = rem / s;
            rem %= s;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    /// Position of a cell in ordinary layout.
    pub fn position(&self, idx: &[usize]) -> Vec<T> {
        idx.iter()
            .zip(self.origin.iter().zip(&self.spacing))
            .map(|(&j, (&o, &h))| o + T::of_usize(j) * h)
            .collect()
    }

    /// Signed coordinate along one axis in wrap-around layout.
    pub fn wrap_coord(&self, axis: usize, j: usize) -> T {
        let n = self.dims[axis];
        let k = if j < n.div_ceil(2) { j as i64 } else { j as i64 - n as i64 };
        T::of(k as f64) * self.spacing[axis]
    }

    /// Position of a cell in wrap-around layout.
    pub fn wrap_position(&self, idx: &[usize]) -> Vec<T> {
        idx.iter().enumerate().map(|(a, &j)| self.wrap_coord(a, j)).collect()
    }

    /// Euclidean norm of the wrap-around position.
    pub fn wrap_radius(&self, idx: &[usize]) -> T {
        self.wrap_position(idx)
            .iter()
            .map(|&x| x * x)
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Angular frequencies along one axis in FFT order: `2*pi*k / (n*h)` with
    /// `k` running over `0, 1, ..., -n/2, ..., -1`.
    pub fn frequencies(&self, axis: usize) -> Vec<T> {
        let n = self.dims[axis];
        let step = T::of(2.0) * T::PI() / (T::of_usize(n) * self.spacing[axis]);
        (0..n)
            .map(|j| {
                let k = if j < n.div_ceil(2) { j as i64 } else { j as i64 - n as i64 };
                T::of(k as f64) * step
            })
            .collect()
    }

    /// Nyquist frequency `pi / h` of the coarsest axis.
    pub fn nyquist(&self) -> T {
        let hmax = self.spacing.iter().copied().fold(T::zero(), T::max);
        T::PI() / hmax
    }

    /// Half extent `n*h/2` of the shortest axis.
    pub fn min_half_extent(&self) -> T {
        (0..self.d())
            .map(|a| T::of_usize(self.dims[a]) * self.spacing[a] / T::of(2.0))
            .fold(T::infinity(), T::min)
    }

    /// Same cell counts and spacings (origins may differ).
    pub fn compatible(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self
                .spacing
                .iter()
                .zip(&other.spacing)
                .all(|(&a, &b)| (a - b).abs() <= T::of(1e-12) * a.abs().max(b.abs()))
    }
}

/// Real-valued samples on a grid.
#[derive(Clone, Debug)]
pub struct GridData<T> {
    pub spec: GridSpec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> GridData<T> {
    pub fn new(spec: GridSpec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::argument(format!(
                "grid data: {} values for a grid of {} cells",
                values.len(),
                spec.len()
            )));
        }
        Ok(GridData { spec, values })
    }

    pub fn zeros(spec: GridSpec<T>) -> Self {
        let n = spec.len();
        GridData { spec, values: vec![T::zero(); n] }
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        GridData { spec: self.spec.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.abs()).fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strides_and_indexing_round_trip() {
        let spec = GridSpec::<f64>::new(vec![3, 4, 5], vec![0.1; 3], vec![0.0; 3]).unwrap();
        assert_eq!(spec.strides(), vec![20, 5, 1]);
        for flat in [0, 7, 33, 59] {
            assert_eq!(spec.flat_index(&spec.multi_index(flat)), flat);
        }
    }

    #[test]
    fn wrap_coordinates_match_fft_order() {
        let spec = GridSpec::<f64>::centered(1, 8, 0.5).unwrap();
        let coords: Vec<f64> = (0..8).map(|j| spec.wrap_coord(0, j)).collect();
        assert_eq!(coords, vec![0.0, 0.5, 1.0, 1.5, -2.0, -1.5, -1.0, -0.5]);
    }

    #[test]
    fn frequencies_match_fft_order() {
        let spec = GridSpec::<f64>::centered(1, 4, 0.25).unwrap();
        let f = spec.frequencies(0);
        let step = 2.0 * std::f64::consts::PI / (4.0 * 0.25);
        assert_eq!(f, vec![0.0, step, -2.0 * step, -step]);
    }

    #[test]
    fn rejects_mismatched_axes() {
        assert!(GridSpec::<f64>::new(vec![2], vec![0.1, 0.2], vec![0.0]).is_err());
        assert!(GridSpec::<f64>::new(vec![2], vec![-0.1], vec![0.0]).is_err());
    }
}
