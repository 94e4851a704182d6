//! Real-coefficient polynomials in `d` variables and their Fourier symbols.
//!
//! The symbol of the differential operator `P(D)` at frequency `xi` is the
//! polynomial evaluated at `i*xi`; the adjoint `P(D)^* = P(-D)` corresponds to
//! evaluation at `-i*xi`.

use crate::error::{Error, Result};
use crate::num::Scalar;
use num_complex::Complex;
use std::fmt;

/// Sparse multivariate polynomial: list of (multi-index, coefficient) terms.
///
/// Terms are kept sorted in graded-lexicographic order with unique exponents
/// and nonzero coefficients; the zero polynomial is the empty list and has
/// degree `-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPolynomial<T> {
    dim: usize,
    terms: Vec<(Vec<u32>, T)>,
}

fn grlex(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl<T: Scalar> MultiPolynomial<T> {
    pub fn new(dim: usize, terms: Vec<(Vec<u32>, T)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::argument("polynomial dimension must be positive"));
        }
        let mut merged: Vec<(Vec<u32>, T)> = Vec::new();
        for (alpha, c) in terms {
            if alpha.len() != dim {
                return Err(Error::argument(format!(
                    "multi-index of length {} in a {}-variable polynomial",
                    alpha.len(),
                    dim
                )));
            }
            match merged.iter_mut().find(|(a, _)| *a == alpha) {
                Some((_, acc)) => *acc += c,
                None => merged.push((alpha, c)),
            }
        }
        merged.retain(|(_, c)| *c != T::zero());
        merged.sort_by(|(a, _), (b, _)| grlex(a, b));
        Ok(MultiPolynomial { dim, terms: merged })
    }

    pub fn zero(dim: usize) -> Self {
        MultiPolynomial { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        Self::new(dim, vec![(vec![0; dim], c)]).expect("constant polynomial")
    }

    /// The monomial `z_j` (1-based variable index).
    pub fn variable(dim: usize, j: usize) -> Result<Self> {
        if j == 0 || j > dim {
            return Err(Error::argument(format!("variable x{} out of range 1..={}", j, dim)));
        }
        let mut alpha = vec![0u32; dim];
        alpha[j - 1] = 1;
        Self::new(dim, vec![(alpha, T::one())])
    }

    /// Polynomial for the operator `-lambda + Laplacian`: `-lambda + sum z_j^2`.
    pub fn shifted_laplacian(dim: usize, lambda: T) -> Self {
        let mut terms = vec![(vec![0u32; dim], -lambda)];
        for j in 0..dim {
            let mut a = vec![0u32; dim];
            a[j] = 2;
            terms.push((a, T::one()));
        }
        Self::new(dim, terms).expect("shifted laplacian")
    }

    /// Regularizer polynomial with symbol `(1 + |xi|^2)^alpha` at `i*xi`,
    /// i.e. `(1 - sum z_j^2)^alpha`.
    pub fn psi_alpha(dim: usize, alpha: u32) -> Self {
        let mut base_terms = vec![(vec![0u32; dim], T::one())];
        for j in 0..dim {
            let mut a = vec![0u32; dim];
            a[j] = 2;
            base_terms.push((a, -T::one()));
        }
        let base = Self::new(dim, base_terms).expect("psi base");
        let mut out = Self::constant(dim, T::one());
        for _ in 0..alpha {
            out = out.mul(&base);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Vec<u32>, T)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max total degree of stored terms; `-1` for the zero polynomial.
    pub fn degree(&self) -> i32 {
        self.terms.iter().map(|(a, _)| a.iter().sum::<u32>() as i32).max().unwrap_or(-1)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> T {
        self.terms.iter().map(|(_, c)| *c * *c).fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((a0, _)) => {
                let m: u32 = a0.iter().sum();
                self.terms.iter().all(|(a, _)| a.iter().sum::<u32>() == m)
            }
        }
    }

    /// Terms of maximal total degree.
    pub fn leading_form(&self) -> Self {
        let m = self.degree();
        if m < 0 {
            return Self::zero(self.dim);
        }
        let terms = self
            .terms
            .iter()
            .filter(|(a, _)| a.iter().sum::<u32>() as i32 == m)
            .cloned()
            .collect();
        MultiPolynomial { dim: self.dim, terms }
    }

    /// Evaluate at a complex point.
    pub fn eval(&self, z: &[Complex<T>]) -> Result<Complex<T>> {
        if z.len() != self.dim {
            return Err(Error::argument(format!(
                "evaluation point of length {} for a {}-variable polynomial",
                z.len(),
                self.dim
            )));
        }
        Ok(self.eval_unchecked(z))
    }

    #[inline]
    pub fn eval_unchecked(&self, z: &[Complex<T>]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (alpha, c) in &self.terms {
            let mut term = Complex::new(*c, T::zero());
            for (zj, &aj) in z.iter().zip(alpha) {
                for _ in 0..aj {
                    term *= *zj;
                }
            }
            acc += term;
        }
        acc
    }

    /// Symbol of `P(D)` at real frequency `xi`: the value at `i*xi`
    /// (`-i*xi` when `adjoint` is set).
    #[inline]
    pub fn symbol(&self, xi: &[T], adjoint: bool) -> Complex<T> {
        let sign = if adjoint { -T::one() } else { T::one() };
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut z = Complex::new(T::zero(), T::zero());
        for (alpha, c) in &self.terms {
            let mut term = Complex::new(*c, T::zero());
            for (&x, &aj) in xi.iter().zip(alpha) {
                z.re = T::zero();
                z.im = sign * x;
                for _ in 0..aj {
                    term *= z;
                }
            }
            acc += term;
        }
        acc
    }

    /// Value at `i*xi + eta` for real `xi` and a real shift `eta`.
    #[inline]
    pub fn symbol_shifted(&self, xi: &[T], eta: &[T]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (alpha, c) in &self.terms {
            let mut term = Complex::new(*c, T::zero());
            for ((&x, &e), &aj) in xi.iter().zip(eta).zip(alpha) {
                let z = Complex::new(e, x);
                for _ in 0..aj {
                    term *= z;
                }
            }
            acc += term;
        }
        acc
    }

    /// `P(-id)`: flips the sign of every odd-degree term.
    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| {
                let parity: u32 = a.iter().sum::<u32>() % 2;
                (a.clone(), if parity == 1 { -*c } else { *c })
            })
            .collect();
        MultiPolynomial { dim: self.dim, terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.dim, terms).expect("add")
    }

    pub fn scale(&self, c: T) -> Self {
        Self::new(self.dim, self.terms.iter().map(|(a, v)| (a.clone(), *v * c)).collect())
            .expect("scale")
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let idx: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                terms.push((idx, *ca * *cb));
            }
        }
        Self::new(self.dim, terms).expect("mul")
    }

    /// Univariate coefficient vector `c[0] + c[1] z + ...`; error if `d > 1`.
    pub fn univariate_coeffs(&self) -> Result<Vec<T>> {
        if self.dim != 1 {
            return Err(Error::argument("univariate coefficients requested for d > 1"));
        }
        let deg = self.degree().max(0) as usize;
        let mut c = vec![T::zero(); deg + 1];
        for (a, v) in &self.terms {
            c[a[0] as usize] = *v;
        }
        Ok(c)
    }

    /// Parse the text format: terms `coef * x1^a1 * ... * xd^ad` joined by
    /// `+`/`-`, whitespace-insensitive. `dim` fixes the variable count.
    pub fn parse(input: &str, dim: usize) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::config("empty polynomial string"));
        }
        let mut terms: Vec<(Vec<u32>, T)> = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0usize;
        let mut sign = T::one();
        if bytes[0] == b'+' || bytes[0] == b'-' {
            if bytes[0] == b'-' {
                sign = -T::one();
            }
            i = 1;
        }
        let mut start = i;
        let mut spans: Vec<(T, &str)> = Vec::new();
        while i <= bytes.len() {
            let at_split = i == bytes.len()
                || ((bytes[i] == b'+' || bytes[i] == b'-')
                    && i > start
                    && !matches!(bytes[i - 1], b'e' | b'E'));
            if at_split {
                if i == start {
                    return Err(Error::config(format!("empty term in polynomial '{input}'")));
                }
                spans.push((sign, &s[start..i]));
                if i < bytes.len() {
                    sign = if bytes[i] == b'-' { -T::one() } else { T::one() };
                    start = i + 1;
                }
                i += 1;
            } else {
                i += 1;
            }
        }
        for (sgn, span) in spans {
            let mut coeff = sgn;
            let mut alpha = vec![0u32; dim];
            for factor in span.split('*') {
                if factor.is_empty() {
                    return Err(Error::config(format!("empty factor in term '{span}'")));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (var, pow) = match rest.split_once('^') {
                        Some((v, p)) => (v, p),
                        None => (rest, "1"),
                    };
                    let j: usize = var
                        .parse()
                        .map_err(|_| Error::config(format!("bad variable '{factor}'")))?;
                    if j == 0 || j > dim {
                        return Err(Error::config(format!(
                            "variable x{j} out of range for dimension {dim}"
                        )));
                    }
                    let p: u32 = pow
                        .parse()
                        .map_err(|_| Error::config(format!("bad exponent in '{factor}'")))?;
                    alpha[j - 1] += p;
                } else {
                    let v: f64 = factor
                        .parse()
                        .map_err(|_| Error::config(format!("bad coefficient '{factor}'")))?;
                    coeff = coeff * T::of(v);
                }
            }
            terms.push((alpha, coeff));
        }
        Self::new(dim, terms)
    }
}

impl<T: Scalar> fmt::Display for MultiPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (alpha, c)) in self.terms.iter().enumerate() {
            let neg = *c < T::zero();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let has_vars = alpha.iter().any(|&a| a > 0);
            let mut wrote = false;
            if mag != T::one() || !has_vars {
                write!(f, "{mag}")?;
                wrote = true;
            }
            for (j, &a) in alpha.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                wrote = true;
                if a == 1 {
                    write!(f, "x{}", j + 1)?;
                } else {
                    write!(f, "x{}^{}", j + 1, a)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn eval_examples() {
        // z1^2 + z2^2 at (1, 1) -> 2
        let p = MultiPolynomial::<f64>::parse("x1^2 + x2^2", 2).unwrap();
        assert_eq!(p.eval(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(), c(2.0, 0.0));
        // -lambda + laplacian at xi = 0 -> -1
        let q = MultiPolynomial::<f64>::shifted_laplacian(2, 1.0);
        assert_eq!(q.symbol(&[0.0, 0.0], false), c(-1.0, 0.0));
        // zero polynomial
        let z = MultiPolynomial::<f64>::zero(3);
        assert_eq!(z.eval(&[c(2.0, 1.0); 3]).unwrap(), c(0.0, 0.0));
        assert_eq!(z.degree(), -1);
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        let p = MultiPolynomial::<f64>::parse("x1", 1).unwrap();
        assert!(p.eval(&[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn adjoint_flips_odd_terms() {
        let p = MultiPolynomial::<f64>::parse("x1", 1).unwrap();
        assert_eq!(format!("{}", p.adjoint()), "-x1");
        let q = MultiPolynomial::<f64>::parse("x1^2", 1).unwrap();
        assert_eq!(q.adjoint(), q);
        let r = MultiPolynomial::<f64>::parse("1 + x1 + x1*x2", 2).unwrap();
        assert_eq!(r.adjoint().adjoint(), r);
    }

    #[test]
    fn symbol_matches_shifted_at_zero_shift() {
        let p = MultiPolynomial::<f64>::parse("2*x1^3 - x2 + 4", 2).unwrap();
        let xi = [0.7, -1.3];
        let a = p.symbol(&xi, false);
        let b = p.symbol_shifted(&xi, &[0.0, 0.0]);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn psi_symbol_is_one_plus_norm_sq_pow() {
        let psi = MultiPolynomial::<f64>::psi_alpha(2, 3);
        let xi = [0.4, -0.9];
        let expect = (1.0 + 0.4f64.powi(2) + 0.9f64.powi(2)).powi(3);
        let got = psi.symbol(&xi, false);
        assert!((got.re - expect).abs() < 1e-12 && got.im.abs() < 1e-14);
    }

    #[test]
    fn parse_print_round_trip() {
        for s in ["1", "x1", "-x1", "2*x1^2*x2 - 0.5*x3 + 1", "0.25 + x2^4", "1e-3*x1"] {
            let p = MultiPolynomial::<f64>::parse(s, 3).unwrap();
            let q = MultiPolynomial::<f64>::parse(&p.to_string(), 3).unwrap();
            assert_eq!(p, q, "round trip failed for '{s}'");
        }
    }

    #[test]
    fn homogeneous_and_leading_form() {
        let p = MultiPolynomial::<f64>::parse("x1^2 + x2^2", 2).unwrap();
        assert!(p.is_homogeneous());
        let q = MultiPolynomial::<f64>::parse("x1^2 + 1", 2).unwrap();
        assert!(!q.is_homogeneous());
        assert_eq!(q.leading_form(), MultiPolynomial::parse("x1^2", 2).unwrap());
    }

    #[test]
    fn mul_degree_adds() {
        let p = MultiPolynomial::<f64>::parse("1 + x1", 1).unwrap();
        let q = MultiPolynomial::<f64>::parse("1 - x1", 1).unwrap();
        assert_eq!(p.mul(&q), MultiPolynomial::parse("1 - x1^2", 1).unwrap());
    }
}
