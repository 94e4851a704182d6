//! Classical 1-D CARMA(p,q) state-space kernel `g(t) = b' e^{At} e_p` for
//! `t >= 0`, the causal kernel of `a(D) Y = b(D) D L`.

use super::{fit_envelope, KernelGrid};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::num::Scalar;
use nalgebra::{DMatrix, DVector, RealField};

/// Companion-form state space of a CARMA(p, q) process.
#[derive(Clone, Debug)]
pub struct Carma1dStateSpace<T> {
    /// Autoregressive coefficients `a_1 .. a_p` of
    /// `a(z) = z^p + a_1 z^{p-1} + ... + a_p`.
    pub a: Vec<T>,
    /// Moving-average coefficients `b_0 .. b_q`, `q < p`, `b_q != 0`.
    pub b: Vec<T>,
}

impl<T: Scalar + RealField> Carma1dStateSpace<T> {
    pub fn new(a: Vec<T>, b: Vec<T>) -> Result<Self> {
        let p = a.len();
        if p == 0 {
            return Err(Error::argument("CARMA order p must be at least 1"));
        }
        if b.is_empty() || b.len() > p {
            return Err(Error::argument("need 1 <= q+1 <= p moving-average coefficients"));
        }
        if *b.last().unwrap() == T::zero() {
            return Err(Error::argument("leading moving-average coefficient b_q must be nonzero"));
        }
        let ss = Carma1dStateSpace { a, b };
        let max_re = ss
            .companion()
            .complex_eigenvalues()
            .iter()
            .map(|e| e.re.as_f64())
            .fold(f64::NEG_INFINITY, f64::max);
        if max_re >= 0.0 {
            return Err(Error::numerical(format!(
                "autoregressive polynomial has an eigenvalue with Re = {max_re:.3e} >= 0; \
                 no stationary kernel"
            )));
        }
        Ok(ss)
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    /// Companion matrix with the super-diagonal of ones and
    /// `(-a_p, ..., -a_1)` in the last row.
    pub fn companion(&self) -> DMatrix<T> {
        let p = self.order();
        let mut m = DMatrix::<T>::zeros(p, p);
        for i in 0..p.saturating_sub(1) {
            m[(i, i + 1)] = T::one();
        }
        for j in 0..p {
            m[(p - 1, j)] = -self.a[p - 1 - j];
        }
        m
    }

    /// `g(t) = b' e^{At} e_p` for a single `t >= 0`.
    pub fn kernel_at(&self, t: T) -> T {
        if t < T::zero() {
            return T::zero();
        }
        let p = self.order();
        let m = (self.companion() * t).exp();
        let mut ep = DVector::<T>::zeros(p);
        ep[p - 1] = T::one();
        let col = m * ep;
        let mut acc = T::zero();
        for (j, &bj) in self.b.iter().enumerate() {
            acc += bj * col[j];
        }
        acc
    }
}

/// Sample the causal CARMA kernel on a wrap-around grid: zero for `t < 0`,
/// `b' e^{At} e_p` for `t >= 0`, stepping `e^{Ah}` along the positive axis.
pub fn kernel_carma1d<T: Scalar + RealField>(
    ss: &Carma1dStateSpace<T>,
    spec: &GridSpec<T>,
) -> Result<KernelGrid<T>> {
    if spec.d() != 1 {
        return Err(Error::argument("kernel_carma1d needs a one-dimensional grid"));
    }
    let n = spec.dims[0];
    let p = ss.order();
    let step = (ss.companion() * spec.spacing[0]).exp();
    let mut state = DMatrix::<T>::identity(p, p);
    let mut values = vec![T::zero(); n];
    let mut ep = DVector::<T>::zeros(p);
    ep[p - 1] = T::one();
    for j in 0..n.div_ceil(2) {
        let col = &state * &ep;
        let mut acc = T::zero();
        for (k, &bk) in ss.b.iter().enumerate() {
            acc += bk * col[k];
        }
        values[j] = acc;
        state = &step * &state;
    }
    let mut kernel = KernelGrid {
        spec: spec.clone(),
        values,
        envelope: None,
        provenance: format!(
            "carma1d a={:?} b={:?}",
            ss.a.iter().map(|x| x.as_f64()).collect::<Vec<_>>(),
            ss.b.iter().map(|x| x.as_f64()).collect::<Vec<_>>()
        ),
        alpha: None,
        truncation_estimate: None,
    };
    kernel.envelope = fit_envelope(&kernel);
    Ok(kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carma_1_0_is_exponential() {
        let ss = Carma1dStateSpace::new(vec![1.0f64], vec![1.0]).unwrap();
        for t in [0.0, 0.3, 1.0, 4.0] {
            assert!((ss.kernel_at(t) - (-t).exp()).abs() < 1e-12);
        }
        assert_eq!(ss.kernel_at(-1.0), 0.0);
    }

    #[test]
    fn carma_2_1_matches_residue_oracle() {
        // a(z) = (z+1)(z+2) = z^2 + 3z + 2, b(z) = 1 + z
        // residue form: g(t) = sum_i b(l_i)/a'(l_i) e^{l_i t}, l in {-1, -2}
        let ss = Carma1dStateSpace::new(vec![3.0f64, 2.0], vec![1.0, 1.0]).unwrap();
        let oracle = |t: f64| -> f64 {
            let roots = [-1.0f64, -2.0];
            roots
                .iter()
                .map(|&l| {
                    let b = 1.0 + l;
                    let ap = 2.0 * l + 3.0;
                    b / ap * (l * t).exp()
                })
                .sum()
        };
        for t in [0.0, 0.1, 0.5, 1.0, 2.5, 6.0] {
            let got = ss.kernel_at(t);
            assert!((got - oracle(t)).abs() < 1e-11, "t={t}: {got} vs {}", oracle(t));
        }
        // g(0+) = b_{p-1}
        assert!((ss.kernel_at(0.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn grid_sampling_matches_pointwise_exponential() {
        let ss = Carma1dStateSpace::new(vec![0.5f64], vec![1.0]).unwrap();
        let spec = GridSpec::centered(1, 1024, 0.05).unwrap();
        let k = kernel_carma1d(&ss, &spec).unwrap();
        for j in 0..1024 {
            let t = spec.wrap_coord(0, j);
            let exact = if t >= 0.0 { (-0.5 * t).exp() } else { 0.0 };
            assert!((k.values[j] - exact).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn unstable_root_rejected() {
        // a(z) = z - 1 has the root +1
        assert!(Carma1dStateSpace::new(vec![-1.0f64], vec![1.0]).is_err());
    }
}
