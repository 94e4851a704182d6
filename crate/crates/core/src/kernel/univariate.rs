//! One-dimensional synthesis of rational symbols with tail subtraction.
//!
//! The symbol `num(w)/den(w)` at `w = i xi` is expanded at infinity in powers
//! of `u = 1/(mu + w)`. The expansion terms have elementary inverse
//! transforms `t^{j-1} e^{-mu t} 1_{t>=0}/(j-1)!`, and subtracting them
//! leaves a remainder decaying like `|xi|^{-(M+1)}`, whose inverse DFT is
//! free of the ringing the jump discontinuities of the kernel would
//! otherwise cause. `mu = 1 + max|root(den)|` keeps the expansion
//! coefficients bounded.

use crate::error::{Error, Result};
use crate::fft::{imag_residue, NdFft};
use crate::grid::GridSpec;
use crate::num::Scalar;
use nalgebra::DMatrix;
use num_complex::Complex;

const EXPANSION_ORDER: usize = 6;

/// Coefficients of `c(-w)` from those of `c(w)`.
pub(crate) fn reflect_in_place<T: Scalar>(coeffs: &mut [T]) {
    for (k, c) in coeffs.iter_mut().enumerate() {
        if k % 2 == 1 {
            *c = -*c;
        }
    }
}

/// Coefficients of `(1 - w^2)^alpha`.
pub(crate) fn psi_w_coeffs<T: Scalar>(alpha: u32) -> Vec<T> {
    let mut out = vec![T::one()];
    for _ in 0..alpha {
        out = convolve(&out, &[T::one(), T::zero(), -T::one()]);
    }
    out
}

pub(crate) fn convolve<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn trim<T: Scalar>(c: &[T]) -> &[T] {
    let mut n = c.len();
    while n > 1 && c[n - 1] == T::zero() {
        n -= 1;
    }
    &c[..n]
}

/// Largest root magnitude of a univariate polynomial, via companion-matrix
/// eigenvalues in `f64`.
fn max_root_magnitude<T: Scalar>(coeffs: &[T]) -> f64 {
    let c = trim(coeffs);
    let n = c.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let lead = c[n].as_f64();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i].as_f64() / lead;
    }
    m.complex_eigenvalues().iter().map(|e| e.norm()).fold(0.0, f64::max)
}

/// Series of `num/den` in `u = 1/(mu + w)` up to `u^order`, index = power.
fn u_series<T: Scalar>(num: &[T], den: &[T], mu: T, order: usize) -> Result<Vec<T>> {
    let num = trim(num);
    let den = trim(den);
    let n = den.len() - 1;
    if num.len() - 1 >= n {
        return Err(Error::numerical(
            "symbol does not vanish at infinity; kernel synthesis needs deg(num) < deg(den)",
        ));
    }
    // A(u) = u^n num(1/u - mu), B(u) = u^n den(1/u - mu)
    let in_u = |c: &[T]| -> Vec<T> {
        let mut acc = vec![T::zero(); n + 1];
        for (k, &ck) in c.iter().enumerate() {
            // ck * u^{n-k} (1 - mu u)^k
            let mut factor = vec![T::one()];
            for _ in 0..k {
                factor = convolve(&factor, &[T::one(), -mu]);
            }
            for (j, &f) in factor.iter().enumerate() {
                if n - k + j <= n {
                    acc[n - k + j] += ck * f;
                }
            }
        }
        acc
    };
    let a = in_u(num);
    let b = in_u(den);
    if b[0] == T::zero() {
        return Err(Error::numerical("leading denominator coefficient vanished"));
    }
    let mut s = vec![T::zero(); order + 1];
    for j in 0..=order {
        let mut acc = if j < a.len() { a[j] } else { T::zero() };
        for i in 0..j {
            let bk = if j - i < b.len() { b[j - i] } else { T::zero() };
            acc -= s[i] * bk;
        }
        s[j] = acc / b[0];
    }
    Ok(s)
}

/// Inverse transform of `num(i xi)/den(i xi)` on the wrap grid of `spec`.
///
/// `symbol` holds the symbol samples on the dual grid (already computed by
/// the caller and shared with diagnostics).
pub(crate) fn synth_univariate<T: Scalar>(
    num_w: &[T],
    den_w: &[T],
    spec: &GridSpec<T>,
    symbol: &[Complex<T>],
    fft: &mut NdFft<T>,
) -> Result<Vec<T>> {
    let mu = T::of(1.0 + max_root_magnitude(den_w));
    let coeffs = u_series(num_w, den_w, mu, EXPANSION_ORDER)?;
    // remainder = symbol - sum_{j>=1} s_j u^j   (s_0 = 0 since the gap >= 1)
    let freqs = spec.frequencies(0);
    let mut remainder = symbol.to_vec();
    for (r, &xi) in remainder.iter_mut().zip(&freqs) {
        let u = Complex::new(mu, xi).inv();
        let mut upow = Complex::new(T::one(), T::zero());
        let mut sub = Complex::new(T::zero(), T::zero());
        for &s in coeffs.iter().skip(1) {
            upow *= u;
            sub += upow * s;
        }
        *r -= sub;
    }
    // repair the unpaired Nyquist bin of the subtraction terms
    crate::fft::hermitian_symmetrize(&mut remainder, &spec.dims);
    let buf = fft.inverse(remainder, &spec.dims);
    let residue = imag_residue(&buf);
    if residue > T::of(1e-9).max(T::epsilon() * T::of(1e4)) {
        return Err(Error::numerical(format!(
            "inverse transform is not real (residue {residue:e})"
        )));
    }
    let scale = T::one() / spec.spacing[0];
    let mut values: Vec<T> = buf.into_iter().map(|c| c.re * scale).collect();
    // analytic part: sum_j s_j t^{j-1} e^{-mu t}/(j-1)! on t >= 0
    for (j, v) in values.iter_mut().enumerate() {
        let t = spec.wrap_coord(0, j);
        if t >= T::zero() {
            let decay = (-mu * t).exp();
            let mut tpow = T::one();
            let mut fact = T::one();
            for (ord, &s) in coeffs.iter().enumerate().skip(1) {
                if ord >= 2 {
                    tpow = tpow * t;
                    fact = fact * T::of_usize(ord - 1);
                }
                *v += s * tpow * decay / fact;
            }
        }
    }
    Ok(values)
}
