//! Convolution kernels of rational Fourier symbols.
//!
//! A kernel grid always uses the wrap-around layout: index `j` along an axis
//! means the signed coordinate `j*h` (`j < n/2`) or `(j-n)*h`. That is the
//! layout the inverse DFT of a symbol produces, and the one circular
//! convolution against cell noise expects.

mod bm;
mod carma1d;
mod functionals;
mod univariate;

pub use bm::{kernel_bm, kernel_matern3, BMKernelSpec};
pub use carma1d::{kernel_carma1d, Carma1dStateSpace};
pub use functionals::{kernel_functionals, KernelFunctionals, LevelFunction};

use crate::error::{Error, Result};
use crate::fft::{imag_residue, sample_frequencies, NdFft};
use crate::grid::GridSpec;
use crate::num::Scalar;
use crate::poly::MultiPolynomial;
use crate::strip::zero_tolerance;
use num_complex::Complex;

/// Declared decay bound for a kernel beyond the sampled grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailEnvelope<T> {
    /// `|G(x)| <= coeff * exp(-rate * |x|)` on the outer shell and beyond.
    Exponential { coeff: T, rate: T },
    /// `|G(x)| <= coeff * |x|^{-exponent}`.
    Power { coeff: T, exponent: T },
}

impl<T: Scalar> TailEnvelope<T> {
    pub fn value(&self, r: T) -> T {
        match *self {
            TailEnvelope::Exponential { coeff, rate } => coeff * (-rate * r).exp(),
            TailEnvelope::Power { coeff, exponent } => coeff * r.powf(-exponent),
        }
    }

    /// `int_{|x| > r} envelope(|x|) dx` in `d` dimensions.
    pub fn mass_beyond(&self, r: T, d: usize) -> T {
        let sphere = sphere_area::<T>(d);
        match *self {
            TailEnvelope::Exponential { coeff, rate } => {
                // int_r^inf s^{d-1} e^{-rate s} ds, d <= 3 exact
                let x = rate * r;
                let base = (-x).exp();
                let poly = match d {
                    1 => T::one() / rate,
                    2 => (x + T::one()) / (rate * rate),
                    _ => (x * x + T::of(2.0) * x + T::of(2.0)) / (rate * rate * rate),
                };
                coeff * sphere * base * poly
            }
            TailEnvelope::Power { coeff, exponent } => {
                let p = exponent - T::of_usize(d);
                if p <= T::zero() {
                    T::infinity()
                } else {
                    coeff * sphere * r.powf(-p) / p
                }
            }
        }
    }
}

/// Surface area of the unit sphere in `d` dimensions (d = 1, 2, 3).
pub(crate) fn sphere_area<T: Scalar>(d: usize) -> T {
    match d {
        1 => T::of(2.0),
        2 => T::of(2.0) * T::PI(),
        3 => T::of(4.0) * T::PI(),
        _ => {
            // 2 pi^{d/2} / Gamma(d/2), even/odd split for integer d
            let df = d as f64;
            let mut g = if d % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
            let mut x = df / 2.0 - 1.0;
            while x > 0.0 {
                g *= x;
                x -= 1.0;
            }
            T::of(2.0 * std::f64::consts::PI.powf(df / 2.0) / g)
        }
    }
}

/// Sampled kernel on a wrap-around grid with a declared tail envelope.
#[derive(Clone, Debug)]
pub struct KernelGrid<T> {
    pub spec: GridSpec<T>,
    pub values: Vec<T>,
    pub envelope: Option<TailEnvelope<T>>,
    /// Human-readable construction record.
    pub provenance: String,
    /// Regularization order when built by `kernel_regularized`.
    pub alpha: Option<u32>,
    /// Relative change of the synthesis when the upper half of the frequency
    /// band is dropped; a frequency-truncation error estimate.
    pub truncation_estimate: Option<T>,
}

impl<T: Scalar> KernelGrid<T> {
    /// Wrap a user-supplied sample array as a kernel grid.
    pub fn from_values(
        spec: GridSpec<T>,
        values: Vec<T>,
        envelope: Option<TailEnvelope<T>>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::argument("kernel values do not match the grid size"));
        }
        Ok(KernelGrid {
            spec,
            values,
            envelope,
            provenance: provenance.into(),
            alpha: None,
            truncation_estimate: None,
        })
    }

    /// Discrete delta at the origin cell scaled by `1/cellvol`, so that
    /// convolution with cell noise reproduces the noise.
    pub fn delta(spec: GridSpec<T>) -> Self {
        let mut values = vec![T::zero(); spec.len()];
        values[0] = T::one() / spec.cell_volume();
        KernelGrid {
            spec,
            values,
            envelope: Some(TailEnvelope::Exponential { coeff: T::of(1e-300), rate: T::one() }),
            provenance: "delta-at-origin".into(),
            alpha: None,
            truncation_estimate: None,
        }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.abs()).fold(T::zero(), T::max)
    }

    /// `sum |G| cellvol` over the grid.
    pub fn l1_mass(&self) -> T {
        self.values.iter().map(|v| v.abs()).sum::<T>() * self.spec.cell_volume()
    }

    /// Fraction of kernel mass living beyond the half extent, per the
    /// declared envelope.
    pub fn wrap_mass_fraction(&self) -> Result<T> {
        let env = self
            .envelope
            .ok_or_else(|| Error::precondition("kernel has no declared tail envelope"))?;
        let inner = self.l1_mass();
        let outer = env.mass_beyond(self.spec.min_half_extent(), self.spec.d());
        Ok(outer / (inner + outer))
    }
}

/// Kernel `G = F^{-1}(q(i.)/p(i.))` sampled on the dual grid of `spec`.
///
/// In one dimension and for the radial second-order symbol in d = 3, the
/// slowly decaying part of the symbol is split off and inverted in closed
/// form, which removes the aliasing ringing of plain sampling; the remainder
/// is synthesized by the inverse DFT.
pub fn kernel_fft<T: Scalar>(
    p: &MultiPolynomial<T>,
    q: &MultiPolynomial<T>,
    spec: &GridSpec<T>,
    fft: &mut NdFft<T>,
) -> Result<KernelGrid<T>> {
    let provenance = format!("fft p={p} q={q}");
    synthesize(p, q, None, spec, fft, provenance)
}

/// Regularized kernel `G_psi = F^{-1}(q(-i.)/(psi(.) p(-i.)))` with
/// `psi(xi) = (1 + |xi|^2)^alpha`.
///
/// For `alpha >= 1` the kernel is the plain inverse DFT of the sampled
/// symbol: the generalized-solution pairings cancel that symbol
/// sample-by-sample against the operators, and the discrete SPDE identity
/// requires the stored kernel to be exactly the sampled transform. With
/// `alpha = 0` the construction coincides with `kernel_fft` of the
/// reflected symbol and shares its code path.
pub fn kernel_regularized<T: Scalar>(
    p: &MultiPolynomial<T>,
    q: &MultiPolynomial<T>,
    alpha: u32,
    spec: &GridSpec<T>,
    fft: &mut NdFft<T>,
) -> Result<KernelGrid<T>> {
    let provenance = format!("regularized p={p} q={q} alpha={alpha}");
    let mut k = synthesize(p, q, Some(alpha), spec, fft, provenance)?;
    k.alpha = Some(alpha);
    Ok(k)
}

fn synthesize<T: Scalar>(
    p: &MultiPolynomial<T>,
    q: &MultiPolynomial<T>,
    alpha: Option<u32>,
    spec: &GridSpec<T>,
    fft: &mut NdFft<T>,
    provenance: String,
) -> Result<KernelGrid<T>> {
    let d = spec.d();
    if p.dim() != d || q.dim() != d {
        return Err(Error::argument("polynomial dimension does not match the grid"));
    }
    let reflect = alpha.is_some();
    let alpha_ord = alpha.unwrap_or(0);
    // exact sampling is mandatory for regularized kernels of positive order
    let force_plain = reflect && alpha_ord >= 1;
    let psi = MultiPolynomial::psi_alpha(d, alpha_ord);
    let denom_scale = zero_tolerance(p);
    // denominator zeros on the sampled real-frequency grid
    let mut singular = false;
    let symbol = sample_frequencies(spec, |xi| {
        let pv = p.symbol(xi, reflect);
        let psi_v = psi.symbol(xi, false);
        let den = pv * psi_v;
        if den.norm() <= denom_scale {
            singular = true;
            Complex::new(T::zero(), T::zero())
        } else {
            q.symbol(xi, reflect) / den
        }
    });
    if singular {
        return Err(Error::numerical(
            "symbol denominator vanishes on the sampled frequency grid",
        ));
    }
    let mut symbol = symbol;
    crate::fft::hermitian_symmetrize(&mut symbol, &spec.dims);
    check_square_integrable_decay(spec, &symbol)?;

    let values = if !force_plain && d == 1 {
        let mut num_w = q.univariate_coeffs()?;
        let mut den_w = p.univariate_coeffs()?;
        if reflect {
            univariate::reflect_in_place(&mut num_w);
            univariate::reflect_in_place(&mut den_w);
        }
        den_w = univariate::convolve(&den_w, &univariate::psi_w_coeffs(alpha_ord));
        univariate::synth_univariate(&num_w, &den_w, spec, &symbol, fft)?
    } else if !force_plain && d == 3 && alpha_ord == 0 {
        match radial_quadratic(p, q) {
            Some((amp, pole)) => synth_radial_yukawa(amp, pole, spec, &symbol, fft)?,
            None => synth_plain(spec, symbol.clone(), fft)?,
        }
    } else {
        synth_plain(spec, symbol.clone(), fft)?
    };

    let truncation = truncation_estimate(spec, &symbol, fft, &values);
    let mut kernel = KernelGrid {
        spec: spec.clone(),
        values,
        envelope: None,
        provenance,
        alpha,
        truncation_estimate: Some(truncation),
    };
    kernel.envelope = fit_envelope(&kernel);
    check_boundary_envelope(&kernel)?;
    Ok(kernel)
}

/// Plain route: inverse DFT of the sampled symbol, scaled to the continuum
/// normalization `1/(n h)^d`, with a realness check.
fn synth_plain<T: Scalar>(
    spec: &GridSpec<T>,
    symbol: Vec<Complex<T>>,
    fft: &mut NdFft<T>,
) -> Result<Vec<T>> {
    let buf = fft.inverse(symbol, &spec.dims);
    let residue = imag_residue(&buf);
    if residue > T::of(1e-10).max(T::epsilon() * T::of(1e3)) {
        return Err(Error::numerical(format!(
            "inverse transform is not real (residue {residue:e}); symbol lacks conjugate symmetry"
        )));
    }
    let scale = T::one() / spec.cell_volume();
    Ok(buf.into_iter().map(|c| c.re * scale).collect())
}

/// Spot `p` of the form `c0 + c2 sum z_j^2` with constant `q`, i.e. the
/// symbol `amp / (pole + |xi|^2)`. Returns `(amp, pole)` with `pole > 0`.
fn radial_quadratic<T: Scalar>(
    p: &MultiPolynomial<T>,
    q: &MultiPolynomial<T>,
) -> Option<(T, T)> {
    if q.degree() != 0 {
        return None;
    }
    let q0 = q.terms()[0].1;
    let d = p.dim();
    let mut c0 = T::zero();
    let mut c2: Option<T> = None;
    let mut seen_sq = 0usize;
    for (a, c) in p.terms() {
        let total: u32 = a.iter().sum();
        if total == 0 {
            c0 = *c;
        } else if total == 2 && a.iter().any(|&x| x == 2) {
            match c2 {
                None => c2 = Some(*c),
                Some(prev) if (prev - *c).abs() <= T::of(1e-14) * prev.abs() => {}
                _ => return None,
            }
            seen_sq += 1;
        } else {
            return None;
        }
    }
    let c2 = c2?;
    if seen_sq != d || c2 == T::zero() {
        return None;
    }
    let pole = -c0 / c2;
    if pole <= T::zero() {
        return None;
    }
    Some((-q0 / c2, pole))
}

/// d = 3 synthesis for `amp/(B + |xi|^2)`: subtract two reference terms with
/// elementary inverse transforms so the remainder decays like `|xi|^{-6}`.
fn synth_radial_yukawa<T: Scalar>(
    amp: T,
    pole: T,
    spec: &GridSpec<T>,
    symbol: &[Complex<T>],
    fft: &mut NdFft<T>,
) -> Result<Vec<T>> {
    let bp = pole + T::one();
    let mu = bp.sqrt();
    let gap = bp - pole; // = 1
    let mut remainder = symbol.to_vec();
    let corrections = sample_frequencies(spec, |xi| {
        let t = xi.iter().map(|&x| x * x).fold(T::zero(), |a, b| a + b);
        let first = amp / (bp + t);
        let second = amp * gap / ((bp + t) * (bp + t));
        Complex::new(first + second, T::zero())
    });
    for (r, c) in remainder.iter_mut().zip(corrections) {
        *r -= c;
    }
    let mut values = synth_plain(spec, remainder, fft)?;
    // analytic parts: amp e^{-mu r}/(4 pi r) (cell-averaged at the origin)
    // and amp gap e^{-mu r}/(8 pi mu)
    let four_pi = T::of(4.0) * T::PI();
    let second_coef = amp * gap / (T::of(2.0) * four_pi * mu);
    let mut idx = vec![0usize; spec.d()];
    for v in values.iter_mut() {
        let r = spec.wrap_radius(&idx);
        if r > T::zero() {
            *v += amp * (-mu * r).exp() / (four_pi * r) + second_coef * (-mu * r).exp();
        } else {
            *v += amp * yukawa_cell_average(mu, &spec.spacing) + second_coef;
        }
        advance_index(&mut idx, &spec.dims);
    }
    Ok(values)
}

/// Average of `e^{-mu r}/(4 pi r)` over the origin cell: analytic integral
/// over the inscribed ball plus a midpoint rule on the corner remainder.
pub(crate) fn yukawa_cell_average<T: Scalar>(mu: T, spacing: &[T]) -> T {
    let d = spacing.len();
    debug_assert_eq!(d, 3);
    let vol = spacing.iter().copied().fold(T::one(), |a, b| a * b);
    let rho = spacing.iter().copied().fold(T::infinity(), T::min) / T::of(2.0);
    // int_{B_rho} e^{-mu r}/(4 pi r) dV = (1 - e^{-mu rho}(1 + mu rho))/mu^2
    let ball = (T::one() - (-mu * rho).exp() * (T::one() + mu * rho)) / (mu * mu);
    // midpoint over 4^3 subcells, skipping those inside the ball
    let n = 4usize;
    let mut rest = T::zero();
    let four_pi = T::of(4.0) * T::PI();
    let sub: Vec<Vec<T>> = (0..d)
        .map(|a| {
            let h = spacing[a];
            (0..n)
                .map(|i| (T::of_usize(2 * i + 1) / T::of_usize(2 * n) - T::of(0.5)) * h)
                .collect()
        })
        .collect();
    let subvol = vol / T::of_usize(n.pow(3));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = (sub[0][i] * sub[0][i] + sub[1][j] * sub[1][j] + sub[2][k] * sub[2][k])
                    .sqrt();
                if r > rho {
                    rest += (-mu * r).exp() / (four_pi * r) * subvol;
                }
            }
        }
    }
    (ball + rest) / vol
}

/// Relative L^2 mass of the sampled symbol in the outer half of the band;
/// large values flag a ratio that is not square integrable, i.e. a symbol
/// whose inverse transform is not a function.
fn check_square_integrable_decay<T: Scalar>(
    spec: &GridSpec<T>,
    symbol: &[Complex<T>],
) -> Result<()> {
    let freqs: Vec<Vec<T>> = (0..spec.d()).map(|a| spec.frequencies(a)).collect();
    let half: Vec<T> = (0..spec.d())
        .map(|a| T::PI() / spec.spacing[a] / T::of(2.0))
        .collect();
    let mut idx = vec![0usize; spec.d()];
    let mut total = T::zero();
    let mut inner = T::zero();
    for s in symbol {
        let m = s.norm_sqr();
        total += m;
        let is_inner =
            idx.iter().enumerate().all(|(a, &i)| freqs[a][i].abs() < half[a]);
        if is_inner {
            inner += m;
        }
        let mut a = spec.d();
        loop {
            if a == 0 {
                break;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < spec.dims[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    if total == T::zero() {
        return Ok(());
    }
    let outer_fraction = (total - inner) / total;
    if outer_fraction > T::of(0.1) {
        return Err(Error::numerical(format!(
            "symbol does not decay: {:.1}% of its L^2 mass sits in the outer half band; \
             the inverse transform is not a function",
            outer_fraction.as_f64() * 100.0
        )));
    }
    Ok(())
}

/// Synthesis sensitivity to the upper half of the frequency band.
fn truncation_estimate<T: Scalar>(
    spec: &GridSpec<T>,
    symbol: &[Complex<T>],
    fft: &mut NdFft<T>,
    values: &[T],
) -> T {
    let freqs: Vec<Vec<T>> = (0..spec.d()).map(|a| spec.frequencies(a)).collect();
    let half: Vec<T> = (0..spec.d())
        .map(|a| T::PI() / spec.spacing[a] / T::of(2.0))
        .collect();
    let mut idx = vec![0usize; spec.d()];
    let mut outer = vec![Complex::new(T::zero(), T::zero()); symbol.len()];
    for (o, s) in outer.iter_mut().zip(symbol) {
        let is_outer = idx.iter().enumerate().any(|(a, &i)| freqs[a][i].abs() >= half[a]);
        if is_outer {
            *o = *s;
        }
        let mut a = spec.d();
        loop {
            if a == 0 {
                break;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < spec.dims[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    let buf = fft.inverse(outer, &spec.dims);
    let scale = T::one() / spec.cell_volume();
    let max_delta = buf.iter().map(|c| (c.re * scale).abs()).fold(T::zero(), T::max);
    let max_val = values.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    if max_val > T::zero() {
        max_delta / max_val
    } else {
        T::zero()
    }
}

/// Fit a decay envelope on the outer 10% radial shell of the grid.
///
/// Both an exponential and a power law are regressed on `ln |G|`; the better
/// fit wins and its intercept is raised so the envelope dominates every
/// sample in the shell.
pub(crate) fn fit_envelope<T: Scalar>(kernel: &KernelGrid<T>) -> Option<TailEnvelope<T>> {
    let spec = &kernel.spec;
    // stay above the synthesis roundoff floor
    let rel_floor = T::of(1e-11).max(T::epsilon() * T::of(100.0));
    let floor = kernel.max_abs() * rel_floor;
    if floor == T::zero() {
        return None;
    }
    // outermost shell with signal above the roundoff floor
    let mut r_data = T::zero();
    let mut idx = vec![0usize; spec.d()];
    let r_in = spec.min_half_extent();
    for v in &kernel.values {
        let r = spec.wrap_radius(&idx);
        if v.abs() > floor && r <= r_in && r > r_data {
            r_data = r;
        }
        advance_index(&mut idx, &spec.dims);
    }
    if r_data <= T::zero() {
        return None;
    }
    let lo = r_data * T::of(0.9);
    let mut pts: Vec<(T, T)> = Vec::new();
    let mut idx = vec![0usize; spec.d()];
    for v in &kernel.values {
        let r = spec.wrap_radius(&idx);
        if r >= lo && r <= r_data && v.abs() > floor {
            pts.push((r, v.abs().ln()));
        }
        advance_index(&mut idx, &spec.dims);
    }
    if pts.len() < 4 {
        return None;
    }
    let exp_fit = regress(&pts, |r| r);
    let pow_fit = regress(&pts, |r| r.ln());
    let (use_exp, slope) = match (exp_fit, pow_fit) {
        ((se, re), (sp, rp)) => {
            if re <= rp {
                (true, se)
            } else {
                (false, sp)
            }
        }
    };
    if slope >= T::zero() {
        // no decay on the shell; refuse to declare an envelope
        return None;
    }
    // raise the intercept so the envelope dominates the shell
    let mut coeff = T::neg_infinity();
    for &(r, lnv) in &pts {
        let basis = if use_exp { r } else { r.ln() };
        coeff = coeff.max(lnv - slope * basis);
    }
    let coeff = coeff.exp();
    Some(if use_exp {
        TailEnvelope::Exponential { coeff, rate: -slope }
    } else {
        TailEnvelope::Power { coeff, exponent: -slope }
    })
}

pub(crate) fn advance_index(idx: &mut [usize], dims: &[usize]) {
    let mut a = dims.len();
    loop {
        if a == 0 {
            return;
        }
        a -= 1;
        idx[a] += 1;
        if idx[a] < dims[a] {
            return;
        }
        idx[a] = 0;
    }
}

/// Least squares of `ln|G|` against a basis function of `r`; returns
/// `(slope, residual)`.
fn regress<T: Scalar, F: Fn(T) -> T>(pts: &[(T, T)], basis: F) -> (T, T) {
    let n = T::of_usize(pts.len());
    let mut sx = T::zero();
    let mut sy = T::zero();
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for &(r, y) in pts {
        let x = basis(r);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom == T::zero() {
        return (T::zero(), T::infinity());
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mut resid = T::zero();
    for &(r, y) in pts {
        let e = y - slope * basis(r) - intercept;
        resid += e * e;
    }
    (slope, resid)
}

/// `envelope(half extent) < 1e-6 max|G|`: the grid is large enough that the
/// declared tail is negligible at the boundary.
fn check_boundary_envelope<T: Scalar>(kernel: &KernelGrid<T>) -> Result<()> {
    let Some(env) = kernel.envelope else {
        return Ok(());
    };
    let boundary = env.value(kernel.spec.min_half_extent());
    let max = kernel.max_abs();
    if boundary >= T::of(1e-6) * max {
        return Err(Error::precondition(format!(
            "grid extent too small: envelope at the boundary is {:.2e} of max|G| (need < 1e-6)",
            (boundary / max).as_f64()
        )));
    }
    Ok(())
}
