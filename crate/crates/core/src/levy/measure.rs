//! Parametric Lévy measures: validation, moment integrals, the compensated
//! jump integral of the characteristic exponent, and jump sampling.

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::quad::{adaptive, adaptive_complex_dyadic, adaptive_panels, exp_integral_e1, upper_gamma_int};
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Jump size distribution of a compound-Poisson measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
#[serde(bound = "T: Scalar + Serialize + serde::de::DeserializeOwned")]
pub enum JumpDensity<T> {
    Normal { mean: T, std: T },
    Uniform { a: T, b: T },
    Exponential { rate: T },
    Laplace { scale: T },
}

impl<T: Scalar> JumpDensity<T> {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            JumpDensity::Normal { std, .. } => *std > T::zero(),
            JumpDensity::Uniform { a, b } => a < b,
            JumpDensity::Exponential { rate } => *rate > T::zero(),
            JumpDensity::Laplace { scale } => *scale > T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::argument("invalid jump density parameters"))
        }
    }

    pub fn pdf(&self, r: T) -> T {
        match *self {
            JumpDensity::Normal { mean, std } => {
                let z = (r - mean) / std;
                (-z * z / T::of(2.0)).exp() / (std * (T::of(2.0) * T::PI()).sqrt())
            }
            JumpDensity::Uniform { a, b } => {
                if r >= a && r <= b {
                    T::one() / (b - a)
                } else {
                    T::zero()
                }
            }
            JumpDensity::Exponential { rate } => {
                if r >= T::zero() {
                    rate * (-rate * r).exp()
                } else {
                    T::zero()
                }
            }
            JumpDensity::Laplace { scale } => {
                (-(r.abs()) / scale).exp() / (T::of(2.0) * scale)
            }
        }
    }

    /// Characteristic function of the jump law.
    fn cf(&self, z: T) -> Complex<T> {
        let i = Complex::new(T::zero(), T::one());
        match *self {
            JumpDensity::Normal { mean, std } => {
                (i * T::of(1.0) * mean * z - Complex::new(std * std * z * z / T::of(2.0), T::zero()))
                    .exp()
            }
            JumpDensity::Uniform { a, b } => {
                if z == T::zero() {
                    Complex::new(T::one(), T::zero())
                } else {
                    let num = (i * b * z).exp() - (i * a * z).exp();
                    num / (i * (b - a) * z)
                }
            }
            JumpDensity::Exponential { rate } => {
                Complex::new(rate, T::zero()) / Complex::new(rate, -z)
            }
            JumpDensity::Laplace { scale } => {
                Complex::new(T::one() / (T::one() + scale * scale * z * z), T::zero())
            }
        }
    }

    /// Interval with all but a negligible fraction of the mass.
    fn support_bounds(&self) -> (T, T) {
        match *self {
            JumpDensity::Normal { mean, std } => (mean - T::of(14.0) * std, mean + T::of(14.0) * std),
            JumpDensity::Uniform { a, b } => (a, b),
            JumpDensity::Exponential { rate } => (T::zero(), T::of(80.0) / rate),
            JumpDensity::Laplace { scale } => (-T::of(80.0) * scale, T::of(80.0) * scale),
        }
    }

    /// `E[f(J)]` with `f` supplied on a subinterval of the support.
    fn expect_on<F: Fn(T) -> T>(&self, lo: T, hi: T, f: F) -> Result<T> {
        let (slo, shi) = self.support_bounds();
        let lo = lo.max(slo);
        let hi = hi.min(shi);
        if !(hi > lo) {
            return Ok(T::zero());
        }
        adaptive_panels(&|r| f(r) * self.pdf(r), lo, hi, T::of(1e-12), 64)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            JumpDensity::Normal { mean, std } => {
                let n: f64 = rng.sample(rand_distr::StandardNormal);
                mean.as_f64() + std.as_f64() * n
            }
            JumpDensity::Uniform { a, b } => {
                let u: f64 = rng.random();
                a.as_f64() + (b.as_f64() - a.as_f64()) * u
            }
            JumpDensity::Exponential { rate } => {
                let u: f64 = rng.random();
                -(1.0 - u).ln() / rate.as_f64()
            }
            JumpDensity::Laplace { scale } => {
                let u: f64 = rng.random();
                let e = -(1.0 - rng.random::<f64>()).ln() * scale.as_f64();
                if u < 0.5 {
                    -e
                } else {
                    e
                }
            }
        }
    }
}

/// Parametric Lévy measure. The zero measure is an empty atom list.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
#[serde(bound = "T: Scalar + Serialize + serde::de::DeserializeOwned")]
pub enum LevyMeasureSpec<T> {
    /// Atoms `(r_k, c_k)`: mass `c_k` at position `r_k != 0`.
    FiniteAtomic { atoms: Vec<(T, T)> },
    /// `nu(dr) = intensity * f(r) dr` with `f` a probability density.
    CompoundPoisson { intensity: T, jumps: JumpDensity<T> },
    /// `nu(dr) = shape * r^{-1} e^{-rate r} dr` on `r > 0`.
    GammaSubordinator { shape: T, rate: T },
    /// `nu(dr) = theta scale^theta |r|^{-1-theta} (w+ 1_{r>0} + w- 1_{r<0}) dr`
    /// on `|r| > scale`.
    TwoSidedPareto { theta: T, scale: T, weight_pos: T, weight_neg: T },
    /// Piecewise-linear density on a finite grid of `(r, density)` points.
    Tabulated { points: Vec<(T, T)> },
}

/// Result of a `nu`-integral: a finite value or an analytic `+inf` verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IntegralValue<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> IntegralValue<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            IntegralValue::Finite(v) => Some(v),
            IntegralValue::Infinite => None,
        }
    }
    pub fn is_infinite(&self) -> bool {
        matches!(self, IntegralValue::Infinite)
    }
}

/// Weight function for tail integrals `int_{|r|>1} w(|r|) nu(dr)`.
#[derive(Clone, Debug)]
pub enum TailWeight<T> {
    /// `|r|^beta`
    Power(T),
    /// `log(|r|)^k`
    LogPow(u32),
    /// constant 1 (the tail mass)
    IndicatorTail,
    /// interpolated table with a declared asymptotic growth
    Table(WeightTable<T>),
}

/// Tabulated weight on `|r| >= 1`: linear interpolation in `ln r`, with the
/// declared growth used beyond the last abscissa.
#[derive(Clone, Debug)]
pub struct WeightTable<T> {
    pub ln_r: Vec<T>,
    pub values: Vec<T>,
    pub growth: TailGrowth<T>,
}

/// Asymptotic growth class of a weight as `r -> inf`.
#[derive(Clone, Copy, Debug)]
pub enum TailGrowth<T> {
    Bounded { bound: T },
    Power { exponent: T, coeff: T },
    /// `coeff * sum_{k<=degree} ln(r)^k / k!`
    LogPoly { degree: u32, coeff: T },
}

impl<T: Scalar> WeightTable<T> {
    pub fn new(r: Vec<T>, values: Vec<T>, growth: TailGrowth<T>) -> Result<Self> {
        if r.len() != values.len() || r.len() < 2 {
            return Err(Error::argument("weight table needs at least two matching points"));
        }
        if r[0] < T::one() || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::argument("weight table abscissae must be >= 1 and increasing"));
        }
        Ok(WeightTable { ln_r: r.iter().map(|&x| x.ln()).collect(), values, growth })
    }

    pub fn max_r(&self) -> T {
        self.ln_r.last().copied().unwrap_or(T::zero()).exp()
    }

    pub fn eval(&self, r: T) -> T {
        let lr = r.ln();
        if lr <= self.ln_r[0] {
            return self.values[0];
        }
        if lr >= *self.ln_r.last().unwrap() {
            return self.growth_eval(r);
        }
        let k = self.ln_r.partition_point(|&x| x < lr).max(1);
        let (x0, x1) = (self.ln_r[k - 1], self.ln_r[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        y0 + (y1 - y0) * (lr - x0) / (x1 - x0)
    }

    fn growth_eval(&self, r: T) -> T {
        match self.growth {
            TailGrowth::Bounded { bound } => bound,
            TailGrowth::Power { exponent, coeff } => coeff * r.powf(exponent),
            TailGrowth::LogPoly { degree, coeff } => {
                let l = r.ln();
                let mut term = T::one();
                let mut sum = T::one();
                for k in 1..=degree {
                    term = term * l / T::of_usize(k as usize);
                    sum += term;
                }
                coeff * sum
            }
        }
    }
}

impl<T: Scalar> LevyMeasureSpec<T> {
    pub fn none() -> Self {
        LevyMeasureSpec::FiniteAtomic { atoms: Vec::new() }
    }

    pub fn atoms(atoms: Vec<(T, T)>) -> Result<Self> {
        let m = LevyMeasureSpec::FiniteAtomic { atoms };
        m.validate()?;
        Ok(m)
    }

    pub fn two_sided_pareto(theta: T, scale: T, weight_pos: T, weight_neg: T) -> Result<Self> {
        let m = LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg };
        m.validate()?;
        Ok(m)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LevyMeasureSpec::FiniteAtomic { atoms } if atoms.is_empty())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasureSpec::FiniteAtomic { atoms } => {
                if atoms.iter().any(|&(r, _)| r == T::zero()) {
                    return Err(Error::argument("atom at r = 0 rejected: nu({0}) must be 0"));
                }
                if atoms.iter().any(|&(_, c)| !(c > T::zero())) {
                    return Err(Error::argument("atom masses must be positive"));
                }
                Ok(())
            }
            LevyMeasureSpec::CompoundPoisson { intensity, jumps } => {
                if !(*intensity > T::zero()) {
                    return Err(Error::argument("compound-poisson intensity must be positive"));
                }
                jumps.validate()
            }
            LevyMeasureSpec::GammaSubordinator { shape, rate } => {
                if !(*shape > T::zero() && *rate > T::zero()) {
                    return Err(Error::argument("gamma subordinator needs shape > 0 and rate > 0"));
                }
                // numeric sanity for int min(1, r^2) nu(dr)
                let c = *shape;
                let lam = *rate;
                let small =
                    c * (T::one() - (-lam).exp() * (T::one() + lam)) / (lam * lam);
                let tail = c * exp_integral_e1(lam);
                if !(small + tail).is_finite() {
                    return Err(Error::argument("gamma subordinator: min(1, r^2)-integral not finite"));
                }
                Ok(())
            }
            LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg } => {
                if !(*theta > T::zero() && *scale > T::zero()) {
                    return Err(Error::argument("pareto tail needs theta > 0 and scale > 0"));
                }
                if *weight_pos < T::zero()
                    || *weight_neg < T::zero()
                    || *weight_pos + *weight_neg == T::zero()
                {
                    return Err(Error::argument("pareto weights must be >= 0 and not both zero"));
                }
                Ok(())
            }
            LevyMeasureSpec::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::argument("tabulated measure needs at least two points"));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::argument("tabulated abscissae must be strictly increasing"));
                }
                if points.iter().any(|&(_, g)| g < T::zero()) {
                    return Err(Error::argument("tabulated densities must be >= 0"));
                }
                if points.iter().any(|&(r, g)| r == T::zero() && g > T::zero()) {
                    return Err(Error::argument("tabulated density must vanish at r = 0"));
                }
                Ok(())
            }
        }
    }

    /// `nu({|r| > cut})`.
    pub fn tail_mass(&self, cut: T) -> T {
        match self {
            LevyMeasureSpec::FiniteAtomic { atoms } => atoms
                .iter()
                .filter(|&&(r, _)| r.abs() > cut)
                .map(|&(_, c)| c)
                .fold(T::zero(), |a, b| a + b),
            LevyMeasureSpec::CompoundPoisson { intensity, jumps } => {
                let (lo, hi) = jumps.support_bounds();
                let pos = jumps.expect_on(cut, hi, |_| T::one()).unwrap_or(T::zero());
                let neg = jumps.expect_on(lo, -cut, |_| T::one()).unwrap_or(T::zero());
                *intensity * (pos + neg)
            }
            LevyMeasureSpec::GammaSubordinator { shape, rate } => {
                *shape * exp_integral_e1(*rate * cut)
            }
            LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg } => {
                let m = scale.max(cut);
                (*weight_pos + *weight_neg) * (*scale / m).powf(*theta)
            }
            LevyMeasureSpec::Tabulated { .. } => {
                self.table_integral(|r| if r.abs() > cut { T::one() } else { T::zero() })
            }
        }
    }

    /// `int_{|r| <= delta} r^2 nu(dr)` (the small-jump variance).
    pub fn small_second_moment(&self, delta: T) -> T {
        match self {
            LevyMeasureSpec::FiniteAtomic { atoms } => atoms
                .iter()
                .filter(|&&(r, _)| r.abs() <= delta)
                .map(|&(r, c)| r * r * c)
                .fold(T::zero(), |a, b| a + b),
            LevyMeasureSpec::CompoundPoisson { intensity, jumps } => {
                *intensity * jumps.expect_on(-delta, delta, |r| r * r).unwrap_or(T::zero())
            }
            LevyMeasureSpec::GammaSubordinator { shape, rate } => {
                let lam = *rate;
                *shape * (T::one() - (-lam * delta).exp() * (T::one() + lam * delta))
                    / (lam * lam)
            }
            LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg } => {
                if delta <= *scale {
                    T::zero()
                } else {
                    let w = *weight_pos + *weight_neg;
                    let th = *theta;
                    let s = *scale;
                    if (th - T::of(2.0)).abs() < T::of(1e-12) {
                        w * th * s.powf(th) * (delta / s).ln()
                    } else {
                        w * th * s.powf(th) * (delta.powf(T::of(2.0) - th) - s.powf(T::of(2.0) - th))
                            / (T::of(2.0) - th)
                    }
                }
            }
            LevyMeasureSpec::Tabulated { .. } => {
                self.table_integral(|r| if r.abs() <= delta { r * r } else { T::zero() })
            }
        }
    }

    /// Signed `int_{delta < |r| <= 1} r nu(dr)` (re-centering of compensated
    /// jumps above the simulation cutoff).
    pub fn truncated_mean_between(&self, delta: T) -> T {
        if delta >= T::one() {
            return T::zero();
        }
        match self {
            LevyMeasureSpec::FiniteAtomic { atoms } => atoms
                .iter()
                .filter(|&&(r, _)| r.abs() > delta && r.abs() <= T::one())
                .map(|&(r, c)| r * c)
                .fold(T::zero(), |a, b| a + b),
            LevyMeasureSpec::CompoundPoisson { intensity, jumps } => {
                let pos = jumps.expect_on(delta, T::one(), |r| r).unwrap_or(T::zero());
                let neg = jumps.expect_on(-T::one(), -delta, |r| r).unwrap_or(T::zero());
                *intensity * (pos + neg)
            }
            LevyMeasureSpec::GammaSubordinator { shape, rate } => {
                *shape * ((-*rate * delta).exp() - (-*rate).exp()) / *rate
            }
            LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg } => {
                let m = scale.max(delta);
                if m >= T::one() {
                    return T::zero();
                }
                let th = *theta;
                let s = *scale;
                let base = if (th - T::one()).abs() < T::of(1e-12) {
                    th * s.powf(th) * (T::one() / m).ln()
                } else {
                    th * s.powf(th) * (T::one() - m.powf(T::one() - th)) / (T::one() - th)
                };
                (*weight_pos - *weight_neg) * base
            }
            LevyMeasureSpec::Tabulated { .. } => self.table_integral(|r| {
                if r.abs() > delta && r.abs() <= T::one() {
                    r
                } else {
                    T::zero()
                }
            }),
        }
    }

    /// Signed `int_{|r| > 1} r nu(dr)`; `None` when the first moment of the
    /// tail does not exist.
    pub fn tail_first_moment_signed(&self) -> Option<T> {
        match self {
            LevyMeasureSpec::FiniteAtomic { atoms } => Some(
                atoms
                    .iter()
                    .filter(|&&(r, _)| r.abs() > T::one())
                    .map(|&(r, c)| r * c)
                    .fold(T::zero(), |a, b| a + b),
            ),
            LevyMeasureSpec::CompoundPoisson { intensity, jumps } => {
                let (lo, hi) = jumps.support_bounds();
                let pos = jumps.expect_on(T::one(), hi, |r| r).ok()?;
                let neg = jumps.expect_on(lo, -T::one(), |r| r).ok()?;
                Some(*intensity * (pos + neg))
            }
            LevyMeasureSpec::GammaSubordinator { shape, rate } => {
                Some(*shape * (-*rate).exp() / *rate)
            }
            LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg } => {
                if *theta <= T::one() {
                    return None;
                }
                let m = scale.max(T::one());
                let base = *theta * scale.powf(*theta) * m.powf(T::one() - *theta)
                    / (*theta - T::one());
                Some((*weight_pos - *weight_neg) * base)
            }
            LevyMeasureSpec::Tabulated { .. } => {
                Some(self.table_integral(|r| if r.abs() > T::one() { r } else { T::zero() }))
            }
        }
    }

    /// `int r^2 nu(dr)` over the whole line; `None` when infinite.
    pub fn second_moment_full(&self) -> Option<T> {
        match self {
            LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg } => {
                if *theta <= T::of(2.0) {
                    return None;
                }
                let th = *theta;
                let s = *scale;
                Some((*weight_pos + *weight_neg) * th * s * s / (th - T::of(2.0)))
            }
            LevyMeasureSpec::GammaSubordinator { shape, rate } => {
                Some(*shape / (*rate * *rate))
            }
            _ => {
                let small = self.small_second_moment(T::one());
                let tail = match self.nu_integral(&TailWeight::Power(T::of(2.0))) {
                    Ok(IntegralValue::Finite(v)) => v,
                    _ => return None,
                };
                Some(small + tail)
            }
        }
    }

    /// `int_{|r|>1} w(|r|) nu(dr)` with a family-level analytic divergence
    /// test; quadrature alone never declares `+inf`.
    pub fn nu_integral(&self, weight: &TailWeight<T>) -> Result<IntegralValue<T>> {
        // analytic divergence test first
        if let LevyMeasureSpec::TwoSidedPareto { theta, .. } = self {
            let growth = match weight {
                TailWeight::Power(beta) => *beta,
                TailWeight::Table(t) => match t.growth {
                    TailGrowth::Power { exponent, .. } => exponent,
                    _ => T::zero(),
                },
                _ => T::zero(),
            };
            if growth >= *theta {
                return Ok(IntegralValue::Infinite);
            }
        }
        let w = |r: T| -> T {
            match weight {
                TailWeight::Power(beta) => r.powf(*beta),
                TailWeight::LogPow(k) => r.ln().powi(*k as i32),
                TailWeight::IndicatorTail => T::one(),
                TailWeight::Table(t) => t.eval(r),
            }
        };
        let value = match self {
            LevyMeasureSpec::FiniteAtomic { atoms } => atoms
                .iter()
                .filter(|&&(r, _)| r.abs() > T::one())
                .map(|&(r, c)| w(r.abs()) * c)
                .fold(T::zero(), |a, b| a + b),
            LevyMeasureSpec::CompoundPoisson { intensity, jumps } => {
                let (lo, hi) = jumps.support_bounds();
                let pos = jumps.expect_on(T::one(), hi, |r| w(r.abs()))?;
                let neg = jumps.expect_on(lo, -T::one(), |r| w(r.abs()))?;
                *intensity * (pos + neg)
            }
            LevyMeasureSpec::GammaSubordinator { shape, rate } => {
                let hi = T::one() + T::of(80.0) / *rate;
                let c = *shape;
                let lam = *rate;
                c * adaptive(&|r: T| w(r) * (-lam * r).exp() / r, T::one(), hi, T::of(1e-12))?
            }
            LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg } => {
                let wsum = *weight_pos + *weight_neg;
                let th = *theta;
                let s = *scale;
                let m = s.max(T::one());
                match weight {
                    TailWeight::IndicatorTail => wsum * s.powf(th) * m.powf(-th),
                    TailWeight::Power(beta) => {
                        wsum * th * s.powf(th) * m.powf(*beta - th) / (th - *beta)
                    }
                    TailWeight::LogPow(k) => {
                        wsum * s.powf(th) * upper_gamma_int(*k, th * m.ln()) / th.powi(*k as i32)
                    }
                    TailWeight::Table(t) => {
                        let r_end = t.max_r().max(m);
                        let numeric = wsum
                            * th
                            * s.powf(th)
                            * crate::quad::adaptive_dyadic(
                                &|r: T| t.eval(r) * r.powf(-T::one() - th),
                                m,
                                r_end,
                                T::of(1e-11),
                            )?;
                        let tail = match t.growth {
                            TailGrowth::Bounded { bound } => {
                                bound * wsum * s.powf(th) * r_end.powf(-th)
                            }
                            TailGrowth::Power { exponent, coeff } => {
                                coeff * wsum * th * s.powf(th) * r_end.powf(exponent - th)
                                    / (th - exponent)
                            }
                            TailGrowth::LogPoly { degree, coeff } => {
                                let mut acc = T::zero();
                                let mut kfact = T::one();
                                for k in 0..=degree {
                                    if k > 0 {
                                        kfact = kfact * T::of_usize(k as usize);
                                    }
                                    acc += upper_gamma_int(k, th * r_end.ln())
                                        / (kfact * th.powi(k as i32));
                                }
                                coeff * wsum * s.powf(th) * acc
                            }
                        };
                        numeric + tail
                    }
                }
            }
            LevyMeasureSpec::Tabulated { points } => {
                if let TailWeight::Table(t) = weight {
                    let max_support = points
                        .iter()
                        .map(|&(r, _)| r.abs())
                        .fold(T::zero(), T::max);
                    if max_support > t.max_r() {
                        return Err(Error::argument(
                            "tabulated measure support extends beyond the weight table",
                        ));
                    }
                }
                self.table_integral(|r| if r.abs() > T::one() { w(r.abs()) } else { T::zero() })
            }
        };
        Ok(IntegralValue::Finite(value))
    }

    /// Compensated jump integral
    /// `int (e^{irz} - 1 - irz 1_{|r|<=1}) nu(dr)`.
    pub fn compensated_integral(&self, z: T) -> Result<Complex<T>> {
        if z == T::zero() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let i = Complex::new(T::zero(), T::one());
        match self {
            LevyMeasureSpec::FiniteAtomic { atoms } => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &(r, c) in atoms {
                    let mut term = (i * r * z).exp() - T::one();
                    if r.abs() <= T::one() {
                        term -= i * r * z;
                    }
                    acc += term * c;
                }
                Ok(acc)
            }
            LevyMeasureSpec::CompoundPoisson { intensity, jumps } => {
                let trunc = jumps.expect_on(-T::one(), T::one(), |r| r)?;
                Ok((jumps.cf(z) - T::one() - i * trunc * z) * *intensity)
            }
            LevyMeasureSpec::GammaSubordinator { shape, rate } => {
                let c = *shape;
                let lam = *rate;
                let log_term = (Complex::new(T::one(), T::zero()) - i * z / lam).ln() * (-c);
                let trunc = c * (T::one() - (-lam).exp()) / lam;
                Ok(log_term - i * trunc * z)
            }
            LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg } => {
                let one_sided = pareto_one_sided_psi(*theta, *scale, z)?;
                Ok(one_sided * *weight_pos + one_sided.conj() * *weight_neg)
            }
            LevyMeasureSpec::Tabulated { points } => {
                let mut acc = Complex::new(T::zero(), T::zero());
                let f = |r: T| -> Complex<T> {
                    let mut v = (i * r * z).exp() - T::one();
                    if r.abs() <= T::one() {
                        v -= i * r * z;
                    }
                    v
                };
                for w in points.windows(2) {
                    let (r0, g0) = w[0];
                    let (r1, g1) = w[1];
                    acc += (f(r0) * g0 + f(r1) * g1) * ((r1 - r0) / T::of(2.0));
                }
                Ok(acc)
            }
        }
    }

    /// Trapezoid integral of `f(r)` against a tabulated density.
    fn table_integral<F: Fn(T) -> T>(&self, f: F) -> T {
        let LevyMeasureSpec::Tabulated { points } = self else {
            unreachable!("table_integral on non-tabulated measure")
        };
        let mut acc = T::zero();
        for w in points.windows(2) {
            let (r0, g0) = w[0];
            let (r1, g1) = w[1];
            acc += (f(r0) * g0 + f(r1) * g1) * (r1 - r0) / T::of(2.0);
        }
        acc
    }
}

/// Compensated integral of the normalized one-sided Pareto measure
/// `theta s^theta r^{-1-theta} dr` on `r > s`, via a rotated contour.
fn pareto_one_sided_psi<T: Scalar>(theta: T, scale: T, z: T) -> Result<Complex<T>> {
    let zpos = z.abs();
    let i = Complex::new(T::zero(), T::one());
    let s = scale;
    let th = theta;
    // I(z) = int_s^inf e^{irz} theta s^th r^{-1-th} dr on the rotated path
    // r = s + it:  i theta s^th e^{isz} int_0^inf e^{-tz} (s+it)^{-1-th} dt
    let t_max = T::of(80.0) / zpos;
    let integrand = |t: T| -> Complex<T> {
        let base = Complex::new(s, t);
        base.powf(-T::one() - th) * (-t * zpos).exp()
    };
    let contour = adaptive_complex_dyadic(&integrand, T::zero(), t_max, T::of(1e-11))?;
    let osc = i * th * s.powf(th) * (i * s * zpos).exp() * contour;
    let total = osc - T::one();
    // compensation over (s, 1] when the support starts below 1
    let comp = if s < T::one() {
        let v = if (th - T::one()).abs() < T::of(1e-12) {
            th * s.powf(th) * (T::one() / s).ln()
        } else {
            th * s.powf(th) * (T::one() - s.powf(T::one() - th)) / (T::one() - th)
        };
        i * v * zpos
    } else {
        Complex::new(T::zero(), T::zero())
    };
    let result = total - comp;
    Ok(if z >= T::zero() { result } else { result.conj() })
}

pub(crate) enum JumpSampler<T> {
    NoJumps,
    Atoms { cum: Vec<f64>, vals: Vec<f64> },
    Cp { density: JumpDensity<T>, delta: f64 },
    Gamma { delta: f64, rate: f64 },
    Pareto { lower: f64, theta: f64, p_pos: f64 },
    Table { cum: Vec<f64>, segs: Vec<(f64, f64)> },
}

impl<T: Scalar> JumpSampler<T> {
    /// Sampler for the jump law conditioned on `|r| > delta`.
    pub(crate) fn prepare(nu: &LevyMeasureSpec<T>, delta: T) -> JumpSampler<T> {
        if nu.tail_mass(delta) <= T::zero() {
            return JumpSampler::NoJumps;
        }
        match nu {
            LevyMeasureSpec::FiniteAtomic { atoms } => {
                let mut cum = Vec::new();
                let mut vals = Vec::new();
                let mut acc = 0.0f64;
                for &(r, c) in atoms {
                    if r.abs() > delta {
                        acc += c.as_f64();
                        cum.push(acc);
                        vals.push(r.as_f64());
                    }
                }
                JumpSampler::Atoms { cum, vals }
            }
            LevyMeasureSpec::CompoundPoisson { jumps, .. } => {
                JumpSampler::Cp { density: jumps.clone(), delta: delta.as_f64() }
            }
            LevyMeasureSpec::GammaSubordinator { rate, .. } => {
                JumpSampler::Gamma { delta: delta.as_f64(), rate: rate.as_f64() }
            }
            LevyMeasureSpec::TwoSidedPareto { theta, scale, weight_pos, weight_neg } => {
                JumpSampler::Pareto {
                    lower: scale.max(delta).as_f64(),
                    theta: theta.as_f64(),
                    p_pos: weight_pos.as_f64()
                        / (weight_pos.as_f64() + weight_neg.as_f64()),
                }
            }
            LevyMeasureSpec::Tabulated { points } => {
                // piecewise-constant intervals restricted to |r| > delta
                let d = delta.as_f64();
                let mut cum = Vec::new();
                let mut segs = Vec::new();
                let mut acc = 0.0f64;
                for w in points.windows(2) {
                    let (r0, g0) = (w[0].0.as_f64(), w[0].1.as_f64());
                    let (r1, g1) = (w[1].0.as_f64(), w[1].1.as_f64());
                    // clip the interval against {|r| > delta}
                    for (a, b) in clip_outside(r0, r1, d) {
                        let mass = 0.5 * (g0 + g1) * (b - a);
                        if mass > 0.0 {
                            acc += mass;
                            cum.push(acc);
                            segs.push((a, b));
                        }
                    }
                }
                JumpSampler::Table { cum, segs }
            }
        }
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            JumpSampler::NoJumps => 0.0,
            JumpSampler::Atoms { cum, vals } => {
                let total = *cum.last().unwrap();
                let u: f64 = rng.random::<f64>() * total;
                let k = cum.partition_point(|&c| c < u).min(vals.len() - 1);
                vals[k]
            }
            JumpSampler::Cp { density, delta } => loop {
                let j = density.sample(rng);
                if j.abs() > *delta {
                    return j;
                }
            },
            JumpSampler::Gamma { delta, rate } => loop {
                // propose from Exp(rate) shifted to (delta, inf), accept w.p. delta/r
                let u: f64 = rng.random();
                let r = delta - (1.0 - u).ln() / rate;
                if rng.random::<f64>() * r <= *delta {
                    return r;
                }
            },
            JumpSampler::Pareto { lower, theta, p_pos } => {
                let u: f64 = rng.random();
                let r = lower * (1.0 - u).powf(-1.0 / theta);
                if rng.random::<f64>() < *p_pos {
                    r
                } else {
                    -r
                }
            }
            JumpSampler::Table { cum, segs } => {
                let total = *cum.last().unwrap();
                let u: f64 = rng.random::<f64>() * total;
                let k = cum.partition_point(|&c| c < u).min(segs.len() - 1);
                let (a, b) = segs[k];
                a + (b - a) * rng.random::<f64>()
            }
        }
    }
}

fn clip_outside(r0: f64, r1: f64, d: f64) -> Vec<(f64, f64)> {
    // intersect [r0, r1] with {r > d} U {r < -d}
    let mut out = Vec::new();
    let lo = r0.max(d);
    if r1 > lo {
        out.push((lo, r1));
    }
    let hi = r1.min(-d);
    if hi > r0 {
        out.push((r0, hi));
    }
    out
}
