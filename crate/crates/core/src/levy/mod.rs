//! Lévy triplets, parametric Lévy measures, the characteristic exponent and
//! moment integrals, and cell-wise simulation of a Lévy basis on a grid.

mod measure;
mod noise;

pub use measure::{
    IntegralValue, JumpDensity, LevyMeasureSpec, TailGrowth, TailWeight, WeightTable,
};
pub use noise::{simulate_cells, CellNoise, DEFAULT_JUMP_BUDGET};

use crate::error::{Error, Result};
use crate::num::Scalar;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Characteristic triplet `(a, gamma, nu)`: Gaussian variance density,
/// drift relative to the truncation `1_{[-1,1]}`, and the Lévy measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + serde::de::DeserializeOwned")]
pub struct LevyTriplet<T> {
    pub a: T,
    pub gamma: T,
    pub nu: LevyMeasureSpec<T>,
}

impl<T: Scalar> LevyTriplet<T> {
    pub fn new(a: T, gamma: T, nu: LevyMeasureSpec<T>) -> Result<Self> {
        if !(a >= T::zero()) {
            return Err(Error::argument("gaussian variance density a must be >= 0"));
        }
        nu.validate()?;
        Ok(LevyTriplet { a, gamma, nu })
    }

    pub fn gaussian(a: T) -> Self {
        LevyTriplet { a, gamma: T::zero(), nu: LevyMeasureSpec::none() }
    }

    /// Characteristic exponent
    /// `psi(z) = i gamma z - a z^2 / 2 + int (e^{irz} - 1 - irz 1_{|r|<=1}) nu(dr)`.
    pub fn char_exponent(&self, z: T) -> Result<Complex<T>> {
        let drift = Complex::new(T::zero(), self.gamma * z);
        let gauss = Complex::new(-self.a * z * z / T::of(2.0), T::zero());
        Ok(drift + gauss + self.nu.compensated_integral(z)?)
    }

    /// Mean and variance of the noise over a cell of volume `v`; `None` marks
    /// a moment that does not exist for this measure.
    pub fn cell_moments(&self, v: T) -> CellMoments<T> {
        let mean = self.nu.tail_first_moment_signed().map(|m| v * (self.gamma + m));
        let variance = self.nu.second_moment_full().map(|s2| v * (self.a + s2));
        CellMoments { mean, variance }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CellMoments<T> {
    pub mean: Option<T>,
    pub variance: Option<T>,
}
