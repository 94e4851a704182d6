//! Closed-form kernels: the isotropic exponential-mixture kernel of the
//! Brockwell-Matsuda CARMA field, and the 3-D fundamental solution of
//! `lambda - Laplacian`.

use super::{yukawa_cell_average, KernelGrid, TailEnvelope};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::num::Scalar;

/// Roots of the isotropic CARMA(p, q) kernel
/// `G(t) = sum_i b(lambda_i)/a'(lambda_i) e^{lambda_i |t|}` with
/// `a(z) = prod (z^2 - lambda_i^2)` and `b(z) = prod (z^2 - kappa_i^2)`.
#[derive(Clone, Debug)]
pub struct BMKernelSpec<T> {
    pub lambdas: Vec<T>,
    pub kappas: Vec<T>,
    pub dim: usize,
}

impl<T: Scalar> BMKernelSpec<T> {
    pub fn new(lambdas: Vec<T>, kappas: Vec<T>, dim: usize) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::argument("need at least one autoregressive root"));
        }
        if kappas.len() >= lambdas.len() {
            return Err(Error::argument("need q < p roots"));
        }
        if lambdas.iter().any(|&l| !(l < T::zero())) {
            return Err(Error::argument("roots lambda_i must have negative real part"));
        }
        for (i, &li) in lambdas.iter().enumerate() {
            for &lj in lambdas.iter().skip(i + 1) {
                if li == lj {
                    return Err(Error::argument("repeated lambda roots are not supported"));
                }
            }
            if kappas.iter().any(|&k| k * k == li * li) {
                return Err(Error::argument("lambda and kappa roots must differ"));
            }
        }
        Ok(BMKernelSpec { lambdas, kappas, dim })
    }

    /// `b(lambda_i)/a'(lambda_i)` per root.
    pub fn coefficients(&self) -> Vec<T> {
        self.lambdas
            .iter()
            .map(|&li| {
                let mut ap = T::of(2.0) * li;
                for &lj in &self.lambdas {
                    if lj != li {
                        ap = ap * (li * li - lj * lj);
                    }
                }
                let mut b = T::one();
                for &k in &self.kappas {
                    b = b * (li * li - k * k);
                }
                b / ap
            })
            .collect()
    }

    pub fn eval(&self, r: T) -> T {
        self.coefficients()
            .iter()
            .zip(&self.lambdas)
            .map(|(&c, &l)| c * (l * r).exp())
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Sample the isotropic exponential-mixture kernel on a wrap-around grid.
pub fn kernel_bm<T: Scalar>(spec: &BMKernelSpec<T>, grid: &GridSpec<T>) -> Result<KernelGrid<T>> {
    if grid.d() != spec.dim {
        return Err(Error::argument("grid dimension does not match the kernel spec"));
    }
    let coefs = spec.coefficients();
    let mut values = vec![T::zero(); grid.len()];
    let mut idx = vec![0usize; grid.d()];
    for v in values.iter_mut() {
        let r = grid.wrap_radius(&idx);
        *v = coefs
            .iter()
            .zip(&spec.lambdas)
            .map(|(&c, &l)| c * (l * r).exp())
            .fold(T::zero(), |a, b| a + b);
        super::advance_index(&mut idx, &grid.dims);
    }
    // analytic envelope: sum |coef_i| e^{lambda_max r}
    let rate = -spec.lambdas.iter().copied().fold(T::neg_infinity(), T::max);
    let coeff = coefs.iter().map(|c| c.abs()).fold(T::zero(), |a, b| a + b);
    Ok(KernelGrid {
        spec: grid.clone(),
        values,
        envelope: Some(TailEnvelope::Exponential { coeff, rate }),
        provenance: format!(
            "brockwell-matsuda lambdas={:?} kappas={:?}",
            spec.lambdas.iter().map(|x| x.as_f64()).collect::<Vec<_>>(),
            spec.kappas.iter().map(|x| x.as_f64()).collect::<Vec<_>>()
        ),
        alpha: None,
        truncation_estimate: None,
    })
}

/// 3-D fundamental solution of `(lambda - Laplacian)`:
/// `G(x) = e^{-sqrt(lambda)|x|}/(4 pi |x|)`, with the origin cell assigned
/// its cell average.
pub fn kernel_matern3<T: Scalar>(lambda: T, grid: &GridSpec<T>) -> Result<KernelGrid<T>> {
    if grid.d() != 3 {
        return Err(Error::argument("kernel_matern3 is only defined in dimension 3"));
    }
    if !(lambda > T::zero()) {
        return Err(Error::argument("lambda must be positive"));
    }
    let mu = lambda.sqrt();
    let four_pi = T::of(4.0) * T::PI();
    let mut values = vec![T::zero(); grid.len()];
    let mut idx = vec![0usize; grid.d()];
    for v in values.iter_mut() {
        let r = grid.wrap_radius(&idx);
        *v = if r > T::zero() {
            (-mu * r).exp() / (four_pi * r)
        } else {
            yukawa_cell_average(mu, &grid.spacing)
        };
        super::advance_index(&mut idx, &grid.dims);
    }
    // |G| <= e^{-mu r}/(4 pi r_ref) beyond the fit shell
    let r_ref = grid.min_half_extent() * T::of(0.9);
    Ok(KernelGrid {
        spec: grid.clone(),
        values,
        envelope: Some(TailEnvelope::Exponential { coeff: T::one() / (four_pi * r_ref), rate: mu }),
        provenance: format!("matern3 lambda={}", lambda.as_f64()),
        alpha: None,
        truncation_estimate: None,
    })
}
