//! Numerical checks of the analytic preconditions on the symbol `q/p`:
//! absence of zeros of `p` near the imaginary axis, the strip L^2 bound, and
//! selection of the regularization order `alpha`.

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::poly::MultiPolynomial;

/// Outcome of the strip zero-check. The check is a semi-decision: a clean
/// sampled box plus a growth test at larger radii; it cannot certify the
/// whole strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripVerdict {
    HoldsOnBox,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct StripReport<T> {
    pub epsilon_tested: T,
    pub min_abs_p: T,
    pub box_halfwidth: T,
    pub grid_resolution: usize,
    pub verdict: StripVerdict,
}

/// Deterministic direction set on the unit sphere in `d` dimensions:
/// the coordinate axes plus a Halton-seeded spread.
pub fn sphere_directions<T: Scalar>(d: usize, count: usize) -> Vec<Vec<T>> {
    let mut dirs: Vec<Vec<T>> = Vec::new();
    for a in 0..d {
        for sign in [1.0, -1.0] {
            let mut v = vec![T::zero(); d];
            v[a] = T::of(sign);
            dirs.push(v);
        }
    }
    if d > 1 {
        let primes = [2u64, 3, 5, 7, 11, 13, 17];
        let mut k = 1u64;
        while dirs.len() < 2 * d + count {
            let mut v: Vec<f64> = (0..d).map(|a| 2.0 * halton(k, primes[a % 7]) - 1.0).collect();
            k += 1;
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 0.2 {
                continue;
            }
            for x in &mut v {
                *x /= norm;
            }
            dirs.push(v.into_iter().map(T::of).collect());
        }
    }
    dirs
}

fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Real shifts to probe the strip with: the origin plus spheres of radius
/// `eps/4, eps/2, 3 eps/4, eps`.
fn strip_shifts<T: Scalar>(d: usize, eps: T) -> Vec<Vec<T>> {
    let mut shifts = vec![vec![T::zero(); d]];
    let dirs = sphere_directions::<T>(d, 24);
    for k in 1..=4 {
        let r = eps * T::of(k as f64) / T::of(4.0);
        for dir in &dirs {
            shifts.push(dir.iter().map(|&x| x * r).collect());
        }
    }
    shifts
}

fn box_points<T: Scalar>(d: usize, halfwidth: T, resolution: usize) -> Vec<Vec<T>> {
    let n = resolution.max(2);
    let mut pts = Vec::with_capacity(n.pow(d as u32));
    let mut idx = vec![0usize; d];
    loop {
        let p: Vec<T> = idx
            .iter()
            .map(|&i| {
                let t = T::of_usize(i) / T::of_usize(n - 1);
                (T::of(2.0) * t - T::one()) * halfwidth
            })
            .collect();
        pts.push(p);
        let mut a = d;
        loop {
            if a == 0 {
                return pts;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < n {
                break;
            }
            idx[a] = 0;
        }
    }
}

/// Root tolerance used throughout: `1e-9 * (1 + ||coefficients||)`.
pub fn zero_tolerance<T: Scalar>(p: &MultiPolynomial<T>) -> T {
    T::of(1e-9) * (T::one() + p.coeff_norm())
}

/// Sample `|p(i xi + eta)|` over the box and the strip shifts; decide whether
/// `q/p` can extend holomorphically over the tested region.
///
/// Callers must pass the reduced pair: common factors of `p` and `q` are not
/// cancelled here.
pub fn check_strip<T: Scalar>(
    p: &MultiPolynomial<T>,
    _q: &MultiPolynomial<T>,
    epsilon: T,
    box_halfwidth: T,
    resolution: usize,
) -> Result<StripReport<T>> {
    if p.is_zero() {
        return Err(Error::argument("check_strip: p must not be the zero polynomial"));
    }
    let d = p.dim();
    let tol = zero_tolerance(p);
    let shifts = strip_shifts(d, epsilon);
    let mut min_abs = T::infinity();
    for xi in box_points(d, box_halfwidth, resolution) {
        for eta in &shifts {
            let v = p.symbol_shifted(&xi, eta).norm();
            min_abs = min_abs.min(v);
        }
    }
    let verdict = if min_abs <= tol {
        StripVerdict::Fails
    } else if leading_form_clean(p, tol) || outer_shells_clean(p, &shifts, box_halfwidth, tol) {
        StripVerdict::HoldsOnBox
    } else {
        StripVerdict::Inconclusive
    };
    Ok(StripReport {
        epsilon_tested: epsilon,
        min_abs_p: min_abs,
        box_halfwidth,
        grid_resolution: resolution,
        verdict,
    })
}

/// Leading homogeneous part nonvanishing on the real unit sphere.
fn leading_form_clean<T: Scalar>(p: &MultiPolynomial<T>, tol: T) -> bool {
    let lead = p.leading_form();
    sphere_directions::<T>(p.dim(), 64)
        .iter()
        .all(|dir| lead.symbol(dir, false).norm() > tol)
}

/// Fallback growth test: `|p|` stays clear of zero on enlarged boxes.
fn outer_shells_clean<T: Scalar>(
    p: &MultiPolynomial<T>,
    shifts: &[Vec<T>],
    box_halfwidth: T,
    tol: T,
) -> bool {
    let d = p.dim();
    let dirs = sphere_directions::<T>(d, 64);
    let mut prev = T::zero();
    for mult in [2.0, 4.0, 8.0] {
        let radius = box_halfwidth * T::of(mult);
        let mut min_abs = T::infinity();
        for dir in &dirs {
            // scan the segment of each ray inside this shell
            for step in 1..=4 {
                let r = radius * (T::of(0.75) + T::of(0.25) * T::of_usize(step) / T::of(4.0));
                let xi: Vec<T> = dir.iter().map(|&x| x * r).collect();
                for eta in shifts {
                    min_abs = min_abs.min(p.symbol_shifted(&xi, eta).norm());
                }
            }
        }
        if min_abs <= tol || min_abs < prev {
            return false;
        }
        prev = min_abs;
    }
    true
}

#[derive(Clone, Debug)]
pub struct L2StripSup<T> {
    pub estimate: T,
    pub converged: bool,
    /// Norm estimates per extent of the integration box.
    pub history: Vec<(T, T)>,
}

/// Numerical `sup_{|eta| <= eps} || q(i. + eta) / p(i. + eta) ||_{L^2}` over
/// boxes of growing extent.
///
/// Midpoint quadrature refined shell by shell; the convergence flag is set
/// when the last two extents agree within 1%.
pub fn l2_strip_sup<T: Scalar>(
    p: &MultiPolynomial<T>,
    q: &MultiPolynomial<T>,
    epsilon: T,
    extents: &[T],
) -> Result<L2StripSup<T>> {
    if p.is_zero() {
        return Err(Error::argument("l2_strip_sup: p must not be the zero polynomial"));
    }
    if extents.len() < 2 {
        return Err(Error::argument("l2_strip_sup: need at least two extents"));
    }
    let d = p.dim();
    let shifts = strip_shifts(d, epsilon);
    let per_axis = match d {
        1 => 4096,
        2 => 128,
        _ => 48,
    };
    // accumulated squared norm per shift
    let mut acc = vec![T::zero(); shifts.len()];
    let mut history: Vec<(T, T)> = Vec::new();
    let mut prev_extent = T::zero();
    for &extent in extents {
        for (k, eta) in shifts.iter().enumerate() {
            acc[k] += shell_integral(p, q, eta, prev_extent, extent, per_axis);
        }
        let sup = acc.iter().map(|&v| v.sqrt()).fold(T::zero(), T::max);
        history.push((extent, sup));
        prev_extent = extent;
    }
    let (_, last) = history[history.len() - 1];
    let (_, prev) = history[history.len() - 2];
    let converged = last > T::zero() && ((last - prev).abs() / last) < T::of(0.01);
    Ok(L2StripSup { estimate: last, converged, history })
}

/// Midpoint quadrature of `|q/p|^2` over the box shell
/// `[-hi, hi]^d \ [-lo, lo]^d`.
fn shell_integral<T: Scalar>(
    p: &MultiPolynomial<T>,
    q: &MultiPolynomial<T>,
    eta: &[T],
    lo: T,
    hi: T,
    per_axis: usize,
) -> T {
    let d = p.dim();
    let n = per_axis;
    let step = T::of(2.0) * hi / T::of_usize(n);
    let mut idx = vec![0usize; d];
    let mut sum = T::zero();
    let cell = step.powi(d as i32);
    loop {
        let xi: Vec<T> = idx
            .iter()
            .map(|&i| -hi + step * (T::of_usize(i) + T::of(0.5)))
            .collect();
        let inside_lo = lo > T::zero() && xi.iter().all(|&x| x.abs() < lo);
        if !inside_lo {
            let pv = p.symbol_shifted(&xi, eta);
            let qv = q.symbol_shifted(&xi, eta);
            let denom = pv.norm_sqr();
            if denom > T::zero() {
                sum += qv.norm_sqr() / denom * cell;
            } else {
                return T::infinity();
            }
        }
        let mut a = d;
        loop {
            if a == 0 {
                return sum;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < n {
                break;
            }
            idx[a] = 0;
        }
    }
}

/// Smallest `alpha >= 1` such that `q / (p * psi_alpha)` passes the strip
/// L^2 test, capped at 8.
pub fn select_alpha<T: Scalar>(
    p: &MultiPolynomial<T>,
    q: &MultiPolynomial<T>,
    epsilon: T,
) -> Result<u32> {
    if epsilon >= T::one() {
        return Err(Error::argument(
            "select_alpha: epsilon must be < 1 so the regularizer stays zero-free on the strip",
        ));
    }
    let extents: Vec<T> = [4.0, 8.0, 16.0, 32.0, 64.0].iter().map(|&x| T::of(x)).collect();
    for alpha in 1..=8u32 {
        let psi = MultiPolynomial::psi_alpha(p.dim(), alpha);
        let denom = p.mul(&psi);
        let sup = l2_strip_sup(&denom, q, epsilon, &extents)?;
        if sup.converged {
            return Ok(alpha);
        }
    }
    Err(Error::numerical("no admissible alpha found numerically (search capped at 8)"))
}
