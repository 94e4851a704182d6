//! Experiment configuration: one TOML file per experiment, flags may
//! override scalar fields. The file bytes are hashed into every artifact.

use levyfield::error::{Error, Result};
use levyfield::grid::GridSpec;
use levyfield::levy::LevyTriplet;
use levyfield::poly::MultiPolynomial;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub polynomials: Polynomials,
    pub triplet: LevyTriplet<f64>,
    pub grid: GridConfig,
    pub sim: SimConfig,
    #[serde(default)]
    pub options: Options,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polynomials {
    pub p: String,
    pub q: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub cells: Vec<usize>,
    pub spacing: Vec<f64>,
    #[serde(default)]
    pub origin: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    #[serde(default = "default_streams")]
    pub streams: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_streams() -> u64 {
    1
}
fn default_delta() -> f64 {
    0.01
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// regularization order override; otherwise selected numerically
    pub alpha: Option<u32>,
    pub epsilon: f64,
    pub box_halfwidth: f64,
    pub strip_resolution: usize,
    pub radii: Vec<f64>,
    pub u_min: f64,
    pub u_max: f64,
    pub u_count: usize,
    pub samples: usize,
    pub band: (f64, f64),
    pub lags: Vec<Vec<i64>>,
    pub refinements: Vec<usize>,
    pub betas: Vec<f64>,
    pub wrap_tol: f64,
    pub kernel_method: KernelMethod,
    pub carma_a: Vec<f64>,
    pub carma_b: Vec<f64>,
    pub bm_lambdas: Vec<f64>,
    pub bm_kappas: Vec<f64>,
    pub matern_lambda: f64,
    pub bump_center: Option<Vec<f64>>,
    pub bump_radius: f64,
    pub bump_amplitude: f64,
    pub pair_mode: PairMode,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            alpha: None,
            epsilon: 0.25,
            box_halfwidth: 8.0,
            strip_resolution: 17,
            radii: levyfield::conditions::DEFAULT_RADII.to_vec(),
            u_min: -3.0,
            u_max: 3.0,
            u_count: 25,
            samples: 2000,
            band: (0.05, 0.8),
            lags: vec![vec![0]],
            refinements: vec![],
            betas: vec![2.0],
            wrap_tol: levyfield::field::DEFAULT_WRAP_TOL,
            kernel_method: KernelMethod::Fft,
            carma_a: vec![1.0],
            carma_b: vec![1.0],
            bm_lambdas: vec![-1.0],
            bm_kappas: vec![],
            matern_lambda: 1.0,
            bump_center: None,
            bump_radius: 1.0,
            bump_amplitude: 1.0,
            pair_mode: PairMode::Generalized,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into() }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    Fft,
    Regularized,
    Carma1d,
    Bm,
    Matern3,
    Delta,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    Whitenoise,
    Generalized,
    Residual,
    Fubini,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<(Self, u64)> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::config("config file is not utf-8"))?;
        let cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok((cfg, levyfield::io::fnv1a64(&bytes)))
    }

    fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        if self.grid.cells.len() != self.dimension
            || self.grid.spacing.len() != self.dimension
        {
            return Err(Error::config("grid cells/spacing must match the dimension"));
        }
        if let Some(o) = &self.grid.origin {
            if o.len() != self.dimension {
                return Err(Error::config("grid origin must match the dimension"));
            }
        }
        self.triplet
            .nu
            .validate()
            .map_err(|e| Error::config(format!("triplet: {e}")))?;
        Ok(())
    }

    pub fn poly_p(&self) -> Result<MultiPolynomial<f64>> {
        MultiPolynomial::parse(&self.polynomials.p, self.dimension)
    }

    pub fn poly_q(&self) -> Result<MultiPolynomial<f64>> {
        MultiPolynomial::parse(&self.polynomials.q, self.dimension)
    }

    /// Grid for kernels (wrap layout; origin ignored) and noise/fields
    /// (ordinary layout). The default origin centers the box on 0.
    pub fn grid_spec(&self) -> Result<GridSpec<f64>> {
        let origin = self.grid.origin.clone().unwrap_or_else(|| {
            self.grid
                .cells
                .iter()
                .zip(&self.grid.spacing)
                .map(|(&n, &h)| -(n as f64) * h / 2.0)
                .collect()
        });
        GridSpec::new(self.grid.cells.clone(), self.grid.spacing.clone(), origin)
    }

    pub fn u_grid(&self) -> Vec<f64> {
        let n = self.options.u_count.max(2);
        (0..n)
            .map(|k| {
                self.options.u_min
                    + (self.options.u_max - self.options.u_min) * k as f64 / (n - 1) as f64
            })
            .collect()
    }

    pub fn bump_center(&self) -> Vec<f64> {
        self.options
            .bump_center
            .clone()
            .unwrap_or_else(|| vec![0.0; self.dimension])
    }
}
