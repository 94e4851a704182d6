//! Multidimensional FFT on flat row-major buffers, built on rustfft.
//!
//! All spectral machinery in this crate funnels through [`NdFft`] so that a
//! kernel, the operators applied to test functions and the convolutions pair
//! against each other with bit-identical transforms.

use crate::grid::{GridData, GridSpec};
use crate::num::Scalar;
use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::Arc;

pub struct NdFft<T: Scalar> {
    planner: FftPlanner<T>,
    plans: HashMap<(usize, bool), Arc<dyn Fft<T>>>,
}

impl<T: Scalar> Default for NdFft<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> NdFft<T> {
    pub fn new() -> Self {
        NdFft { planner: FftPlanner::new(), plans: HashMap::new() }
    }

    fn plan(&mut self, n: usize, inverse: bool) -> Arc<dyn Fft<T>> {
        let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
        self.plans.entry((n, inverse)).or_insert_with(|| self.planner.plan_fft(n, dir)).clone()
    }

    /// Unnormalized in-place transform along every axis of a row-major buffer.
    pub fn transform(&mut self, data: &mut [Complex<T>], dims: &[usize], inverse: bool) {
        assert_eq!(data.len(), dims.iter().product::<usize>(), "buffer/dims mismatch");
        let mut strides = vec![1usize; dims.len()];
        for a in (0..dims.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * dims[a + 1];
        }
        for (axis, &n) in dims.iter().enumerate() {
            if n == 1 {
                continue;
            }
            let plan = self.plan(n, inverse);
            let stride = strides[axis];
            let block = n * stride;
            let mut line = vec![Complex::new(T::zero(), T::zero()); n];
            for outer in 0..data.len() / block {
                for inner in 0..stride {
                    let base = outer * block + inner;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    plan.process(&mut line);
                    for (k, slot) in line.iter().enumerate() {
                        data[base + k * stride] = *slot;
                    }
                }
            }
        }
    }

    /// Forward DFT of real samples.
    pub fn forward_real(&mut self, data: &GridData<T>) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> =
            data.values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.transform(&mut buf, &data.spec.dims, false);
        buf
    }

    /// Normalized inverse DFT (divides by the number of points).
    pub fn inverse(&mut self, mut buf: Vec<Complex<T>>, dims: &[usize]) -> Vec<Complex<T>> {
        self.transform(&mut buf, dims, true);
        let scale = T::one() / T::of_usize(buf.len());
        for v in &mut buf {
            *v = Complex::new(v.re * scale, v.im * scale);
        }
        buf
    }
}

/// Project sampled symbol values onto the Hermitian-symmetric subspace
/// `S[-k] = conj(S[k])`, so the inverse DFT is real to roundoff. Plain
/// sampling of a conjugate-symmetric function already satisfies this at all
/// paired bins; the projection repairs the unpaired Nyquist bins of
/// even-length axes.
pub fn hermitian_symmetrize<T: Scalar>(buf: &mut [Complex<T>], dims: &[usize]) {
    let mut strides = vec![1usize; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * dims[a + 1];
    }
    let two = T::of(2.0);
    for flat in 0..buf.len() {
        let mut rem = flat;
        let mut mirror = 0usize;
        for (a, &s) in strides.iter().enumerate() {
            let i = rem / s;
            rem %= s;
            let m = (dims[a] - i) % dims[a];
            mirror += m * s;
        }
        match mirror.cmp(&flat) {
            std::cmp::Ordering::Greater => {
                let avg = (buf[flat] + buf[mirror].conj()) / two;
                buf[flat] = avg;
                buf[mirror] = avg.conj();
            }
            std::cmp::Ordering::Equal => {
                buf[flat] = Complex::new(buf[flat].re, T::zero());
            }
            std::cmp::Ordering::Less => {}
        }
    }
}

/// Largest imaginary residue relative to the largest magnitude in the buffer.
pub fn imag_residue<T: Scalar>(buf: &[Complex<T>]) -> T {
    let max_mag = buf.iter().map(|c| c.norm_sqr()).fold(T::zero(), T::max).sqrt();
    let max_im = buf.iter().map(|c| c.im.abs()).fold(T::zero(), T::max);
    if max_mag == T::zero() {
        T::zero()
    } else {
        max_im / max_mag
    }
}

/// Evaluate `f` over the full frequency grid, in row-major flat order.
pub fn sample_frequencies<T: Scalar, F: FnMut(&[T]) -> Complex<T>>(
    spec: &GridSpec<T>,
    mut f: F,
) -> Vec<Complex<T>> {
    let freqs: Vec<Vec<T>> = (0..spec.d()).map(|a| spec.frequencies(a)).collect();
    let mut xi = vec![T::zero(); spec.d()];
    let mut out = Vec::with_capacity(spec.len());
    let mut idx = vec![0usize; spec.d()];
    for _ in 0..spec.len() {
        for (a, &i) in idx.iter().enumerate() {
            xi[a] = freqs[a][i];
        }
        out.push(f(&xi));
        for a in (0..spec.d()).rev() {
            idx[a] += 1;
            if idx[a] < spec.dims[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn round_trip_2d() {
        let dims = [4usize, 8];
        let n = 32usize;
        let orig: Vec<Complex<f64>> =
            (0..n).map(|i| Complex::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut fft = NdFft::new();
        let mut buf = orig.clone();
        fft.transform(&mut buf, &dims, false);
        let back = fft.inverse(buf, &dims);
        for (a, b) in orig.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_matches_analytic_dft_1d() {
        // single cosine line -> two symmetric bins
        let n = 16usize;
        let spec = GridSpec::<f64>::centered(1, n, 1.0).unwrap();
        let vals: Vec<f64> =
            (0..n).map(|j| (2.0 * std::f64::consts::PI * 3.0 * j as f64 / n as f64).cos()).collect();
        let data = GridData::new(spec, vals).unwrap();
        let mut fft = NdFft::new();
        let out = fft.forward_real(&data);
        assert!((out[3].re - 8.0).abs() < 1e-10);
        assert!((out[13].re - 8.0).abs() < 1e-10);
        assert!(out[2].norm() < 1e-10);
    }
}
