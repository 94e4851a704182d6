//! Monte Carlo verification: characteristic functionals, spectral densities,
//! autocovariance and moment scans, plus the symbol identification of the
//! isotropic exponential-mixture kernel.

use crate::error::{Error, Result};
use crate::fft::NdFft;
use crate::field::FieldRealization;
use crate::grid::{GridData, GridSpec};
use crate::kernel::{kernel_bm, BMKernelSpec, KernelGrid};
use crate::levy::LevyTriplet;
use crate::num::Scalar;
use crate::poly::MultiPolynomial;
use num_complex::Complex;

/// Empirical versus theoretical characteristic functional on a `u` grid.
#[derive(Clone, Debug)]
pub struct CharFunctionalReport<T> {
    pub u: Vec<T>,
    pub empirical: Vec<Complex<T>>,
    pub theoretical: Vec<Complex<T>>,
    pub sup_deviation: T,
    pub samples: usize,
}

/// Compare the empirical characteristic function of pairing samples against
/// `exp(sum psi(u w(x_c)) cellvol)` for the weight function `w` the samples
/// were generated with.
pub fn char_functional_test<T: Scalar>(
    triplet: &LevyTriplet<T>,
    weight: &GridData<T>,
    samples: &[T],
    u_grid: &[T],
) -> Result<CharFunctionalReport<T>> {
    if samples.len() < 1000 {
        return Err(Error::precondition("need at least 1000 pairing samples"));
    }
    let cellvol = weight.spec.cell_volume();
    let n = T::of_usize(samples.len());
    let mut empirical = Vec::with_capacity(u_grid.len());
    let mut theoretical = Vec::with_capacity(u_grid.len());
    let mut sup = T::zero();
    for &u in u_grid {
        let mut emp = Complex::new(T::zero(), T::zero());
        for &s in samples {
            let arg = u * s;
            emp += Complex::new(arg.cos(), arg.sin());
        }
        emp = emp / n;
        let mut log_theo = Complex::new(T::zero(), T::zero());
        for &w in &weight.values {
            if w != T::zero() {
                log_theo += triplet.char_exponent(u * w)?;
            }
        }
        let theo = (log_theo * cellvol).exp();
        sup = sup.max((emp - theo).norm());
        empirical.push(emp);
        theoretical.push(theo);
    }
    Ok(CharFunctionalReport {
        u: u_grid.to_vec(),
        empirical,
        theoretical,
        sup_deviation: sup,
        samples: samples.len(),
    })
}

/// `f(xi) = sigma^2 |q(i xi)/p(i xi)|^2` on a list of frequency points.
pub fn spectral_density<T: Scalar>(
    p: &MultiPolynomial<T>,
    q: &MultiPolynomial<T>,
    sigma2: T,
    xis: &[Vec<T>],
) -> Result<Vec<T>> {
    if !(sigma2 > T::zero()) {
        return Err(Error::argument(
            "sigma^2 must be positive (noise variance must exist)",
        ));
    }
    xis.iter()
        .map(|xi| {
            let pv = p.symbol(xi, false);
            let qv = q.symbol(xi, false);
            if pv.norm() == T::zero() {
                return Err(Error::numerical("p symbol vanishes on the requested grid"));
            }
            Ok(sigma2 * qv.norm_sqr() / pv.norm_sqr())
        })
        .collect()
}

/// Averaged-periodogram comparison against the model spectral density on a
/// mid band.
#[derive(Clone, Debug)]
pub struct PeriodogramReport<T> {
    /// relative L^1 error on the band
    pub rel_l1: T,
    /// number of frequency bins in the band
    pub band_bins: usize,
    pub realizations: usize,
}

/// Average `|DFT X|^2` over realizations, normalize so white noise maps to
/// `sigma^2`, and compare to `sigma^2 |q/p|^2` on the band
/// `low_frac * nyquist < |xi| < high_frac * nyquist`.
pub fn periodogram_compare<T: Scalar>(
    fields: &[FieldRealization<T>],
    p: &MultiPolynomial<T>,
    q: &MultiPolynomial<T>,
    sigma2: T,
    band: (T, T),
    fft: &mut NdFft<T>,
) -> Result<PeriodogramReport<T>> {
    if fields.len() < 50 {
        return Err(Error::precondition("need at least 50 realizations"));
    }
    let spec = fields[0].data.spec.clone();
    let n_total = spec.len();
    let cellvol = spec.cell_volume();
    let volume = cellvol * T::of_usize(n_total);
    let mut avg = vec![T::zero(); n_total];
    for f in fields {
        if !f.data.spec.compatible(&spec) {
            return Err(Error::precondition("realizations live on different grids"));
        }
        let hat = fft.forward_real(&f.data);
        for (a, h) in avg.iter_mut().zip(&hat) {
            *a += h.norm_sqr() * cellvol * cellvol / volume;
        }
    }
    let m = T::of_usize(fields.len());
    for a in avg.iter_mut() {
        *a /= m;
    }
    let nyquist = spec.nyquist();
    let (lo, hi) = (band.0 * nyquist, band.1 * nyquist);
    let freqs: Vec<Vec<T>> = (0..spec.d()).map(|a| spec.frequencies(a)).collect();
    let mut idx = vec![0usize; spec.d()];
    let mut err = T::zero();
    let mut norm = T::zero();
    let mut bins = 0usize;
    for a in &avg {
        let xi: Vec<T> = idx.iter().enumerate().map(|(ax, &i)| freqs[ax][i]).collect();
        let r = xi.iter().map(|&x| x * x).fold(T::zero(), |acc, v| acc + v).sqrt();
        if r > lo && r < hi {
            let model = sigma2 * q.symbol(&xi, false).norm_sqr()
                / p.symbol(&xi, false).norm_sqr();
            err += (*a - model).abs();
            norm += model.abs();
            bins += 1;
        }
        crate::kernel::advance_index(&mut idx, &spec.dims);
    }
    if bins == 0 || norm == T::zero() {
        return Err(Error::argument("empty comparison band"));
    }
    Ok(PeriodogramReport { rel_l1: err / norm, band_bins: bins, realizations: fields.len() })
}

/// Empirical versus model autocovariance at integer-cell lags.
#[derive(Clone, Debug)]
pub struct AutocovarianceRow<T> {
    pub lag: Vec<i64>,
    pub empirical: T,
    pub theoretical: T,
    pub std_error: T,
}

/// Spatial autocovariance of the realizations at the requested cell lags,
/// against `sigma^2 (G star G)(lag)` computed from the kernel by discrete
/// self-correlation.
pub fn autocovariance_compare<T: Scalar>(
    fields: &[FieldRealization<T>],
    kernel: &KernelGrid<T>,
    sigma2: T,
    lags: &[Vec<i64>],
    fft: &mut NdFft<T>,
) -> Result<Vec<AutocovarianceRow<T>>> {
    if fields.is_empty() {
        return Err(Error::precondition("need at least one realization"));
    }
    let spec = &kernel.spec;
    // model: sigma^2 cellvol * IDFT(|K_hat|^2)
    let khat = fft.forward_real(&GridData::new(spec.clone(), kernel.values.clone())?);
    let power: Vec<Complex<T>> =
        khat.iter().map(|c| Complex::new(c.norm_sqr(), T::zero())).collect();
    let corr = fft.inverse(power, &spec.dims);
    let cellvol = spec.cell_volume();
    let mut rows = Vec::with_capacity(lags.len());
    for lag in lags {
        if lag.len() != spec.d() {
            return Err(Error::argument("lag dimension mismatch"));
        }
        let idx: Vec<usize> = lag
            .iter()
            .zip(&spec.dims)
            .map(|(&l, &n)| l.rem_euclid(n as i64) as usize)
            .collect();
        let flat = spec.flat_index(&idx);
        let theoretical = sigma2 * corr[flat].re * cellvol;
        // empirical: average of X(x) X(x + lag) over cells and realizations
        let mut per_real: Vec<T> = Vec::with_capacity(fields.len());
        for f in fields {
            let vals = &f.data.values;
            let mut acc = T::zero();
            let mut id = vec![0usize; spec.d()];
            for (c, &x) in vals.iter().enumerate() {
                let mut shifted = 0usize;
                for (a, (&i, &l)) in id.iter().zip(lag).enumerate() {
                    let n = spec.dims[a];
                    let j = (i as i64 + l).rem_euclid(n as i64) as usize;
                    shifted = shifted * n + j;
                }
                acc += x * vals[shifted];
                let _ = c;
                crate::kernel::advance_index(&mut id, &spec.dims);
            }
            per_real.push(acc / T::of_usize(vals.len()));
        }
        let m = T::of_usize(per_real.len());
        let mean = per_real.iter().copied().sum::<T>() / m;
        let var = per_real.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>()
            / (m - T::one()).max(T::one());
        rows.push(AutocovarianceRow {
            lag: lag.clone(),
            empirical: mean,
            theoretical,
            std_error: (var / m).sqrt(),
        });
    }
    Ok(rows)
}

/// Empirical absolute moments per grid refinement with a divergence trend.
#[derive(Clone, Debug)]
pub struct MomentScan<T> {
    /// (cells per axis, beta, empirical moment)
    pub rows: Vec<(usize, T, T)>,
    /// per beta: divergence suspected
    pub flags: Vec<(T, bool)>,
}

/// Growth threshold of the strong divergence rule.
pub const MOMENT_STRONG_GROWTH: f64 = 10.0;
/// Margin of the monotone-trend rule: all successive refinements growing by
/// more than this fraction flags divergence (log-divergent integrals grow by
/// a constant per 2x refinement and never hit the strong rule).
pub const MOMENT_TREND_MARGIN: f64 = 0.2;

/// Scan `E|X|^beta` across grid refinements; `fields` must hold at least two
/// refinement levels (grouped by cell count).
pub fn moment_scan<T: Scalar>(
    fields: &[FieldRealization<T>],
    betas: &[T],
) -> Result<MomentScan<T>> {
    let mut levels: Vec<usize> = fields.iter().map(|f| f.data.spec.dims[0]).collect();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() < 2 {
        return Err(Error::precondition(
            "moment scan needs realizations at two or more grid refinements",
        ));
    }
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    for &beta in betas {
        let mut per_level = Vec::new();
        for &n in &levels {
            let group: Vec<&FieldRealization<T>> =
                fields.iter().filter(|f| f.data.spec.dims[0] == n).collect();
            let mut acc = T::zero();
            let mut count = 0usize;
            for f in &group {
                for &x in &f.data.values {
                    acc += x.abs().powf(beta);
                    count += 1;
                }
            }
            let moment = acc / T::of_usize(count.max(1));
            rows.push((n, beta, moment));
            per_level.push(moment);
        }
        let strong = per_level
            .windows(2)
            .any(|w| w[1] > w[0] * T::of(MOMENT_STRONG_GROWTH));
        let trend = per_level
            .windows(2)
            .all(|w| w[1] > w[0] * (T::one() + T::of(MOMENT_TREND_MARGIN)));
        flags.push((beta, strong || trend));
    }
    Ok(MomentScan { rows, flags })
}

/// Least-squares fit of the dimension constant in the Fourier transform of
/// the isotropic exponential-mixture kernel.
#[derive(Clone, Debug)]
pub struct BmSymbolFit<T> {
    pub c_d: T,
    pub max_rel_residual: T,
}

/// Forward-transform the sampled kernel, fit the scalar `c_d` against the
/// rational form `sum_i 2 lambda_i b(lambda_i) / (a'(lambda_i)
/// (|xi|^2 + lambda_i^2)^{(d+1)/2})`, and report the band residual.
pub fn bm_symbol_check<T: Scalar>(
    spec: &BMKernelSpec<T>,
    grid: &GridSpec<T>,
    band_frac: (T, T),
    fft: &mut NdFft<T>,
) -> Result<BmSymbolFit<T>> {
    if !(1..=3).contains(&spec.dim) {
        return Err(Error::argument("bm_symbol_check supports d in {1, 2, 3}"));
    }
    let kernel = kernel_bm(spec, grid)?;
    let hat = fft.forward_real(&GridData::new(grid.clone(), kernel.values.clone())?);
    let cellvol = grid.cell_volume();
    let coefs = spec.coefficients();
    let nyquist = grid.nyquist();
    let (lo, hi) = (band_frac.0 * nyquist, band_frac.1 * nyquist);
    let freqs: Vec<Vec<T>> = (0..grid.d()).map(|a| grid.frequencies(a)).collect();
    let half_power = T::of_usize(grid.d() + 1) / T::of(2.0);
    let mut num = T::zero();
    let mut den = T::zero();
    let mut pts: Vec<(T, T)> = Vec::new();
    let mut idx = vec![0usize; grid.d()];
    for h in &hat {
        let xi2: T = idx
            .iter()
            .enumerate()
            .map(|(a, &i)| freqs[a][i] * freqs[a][i])
            .fold(T::zero(), |acc, x| acc + x);
        let r = xi2.sqrt();
        if r >= lo && r <= hi {
            let mut rational = T::zero();
            for (&c, &l) in coefs.iter().zip(&spec.lambdas) {
                // c = b(l)/a'(l); the rational form carries 2 l b(l)/a'(l)
                rational += T::of(2.0) * l * c / (xi2 + l * l).powf(half_power);
            }
            let sample = h.re * cellvol;
            num += sample * rational;
            den += rational * rational;
            pts.push((sample, rational));
        }
        crate::kernel::advance_index(&mut idx, &grid.dims);
    }
    if den == T::zero() {
        return Err(Error::argument("empty fit band"));
    }
    let c_d = num / den;
    let scale = pts.iter().map(|&(s, _)| s.abs()).fold(T::zero(), T::max);
    let resid = pts
        .iter()
        .map(|&(s, r)| (s - c_d * r).abs())
        .fold(T::zero(), T::max)
        / scale;
    Ok(BmSymbolFit { c_d, max_rel_residual: resid })
}
