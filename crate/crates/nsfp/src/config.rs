//! Run configuration: TOML with one section per concern.

use std::path::{Path, PathBuf};

use nsfp_core::circle::{CircleGrid, FourierSeries, InteractionKernel, RodCoefficients};
use nsfp_core::integrator::{PicardConfig, Scheme, Solver, StepperConfig};
use nsfp_core::{GridSpec2D, InitialDataSpec, Model, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub nx: usize,
    pub nm: usize,
    pub dealias_fraction: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { nx: 32, nm: 32, dealias_fraction: 2.0 / 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub nu: f64,
    pub kappa: f64,
    pub delta: f64,
    /// Maier–Saupe strength.
    pub b: f64,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    /// `a_n` in `k(θ) = Σ a_n cos nθ`, starting at `n = 0`; replaces `b`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<f64>>,
    /// Replaces the rod coefficients.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientSection>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { nu: 0.1, kappa: 0.1, delta: 0.0, b: 0.5, alpha: 2.0, p: 5.0, q: 4.0, kernel: None, coefficients: None }
    }
}

/// `constant + Σ_{n≥1} cos[n−1] cos nθ + sin[n−1] sin nθ`
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesSection {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl SeriesSection {
    fn series(&self, name: &str) -> Result<FourierSeries, AppError> {
        if !self.constant.is_finite() || self.cos.iter().chain(&self.sin).any(|v| !v.is_finite()) {
            return Err(AppError::Config(format!("model.coefficients.{name}: coefficients must be finite")));
        }
        Ok(FourierSeries { constant: self.constant, cos: self.cos.clone(), sin: self.sin.clone() })
    }
}

/// `c_{ji}` multiplying `∂u_i/∂x_j`; missing entries are zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoefficientSection {
    pub c11: SeriesSection,
    pub c12: SeriesSection,
    pub c21: SeriesSection,
    pub c22: SeriesSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    ImexEuler,
    IfRk2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperSection {
    pub scheme: SchemeName,
    pub dt: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub diag_every: usize,
    pub adaptive: bool,
}

impl Default for StepperSection {
    fn default() -> Self {
        Self { scheme: SchemeName::IfRk2, dt: 1e-3, t_end: 1.0, cfl_safety: 0.5, diag_every: 10, adaptive: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    Imex,
    Picard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub mode: SolverMode,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { mode: SolverMode::Imex, picard_tol: 1e-10, picard_max_iter: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub amplitude: f64,
    pub velocity_perturbation: f64,
    pub orientation_perturbation: f64,
    pub seed: u64,
}

impl Default for InitialSection {
    fn default() -> Self {
        let d = InitialDataSpec::default();
        Self {
            amplitude: d.amplitude,
            velocity_perturbation: d.velocity_perturbation,
            orientation_perturbation: d.orientation_perturbation,
            seed: d.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub json: bool,
    /// Records between checkpoints; 0 keeps only the final one.
    pub checkpoint_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("output"), json: true, checkpoint_every: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Standard,
    Modes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabSection {
    pub nx: usize,
    pub r: Vec<f64>,
    pub seed: u64,
    pub family: FamilyName,
    /// Wavevectors used when `family = "modes"`.
    pub modes: Vec<[i64; 2]>,
    pub dir: PathBuf,
}

impl Default for LabSection {
    fn default() -> Self {
        Self {
            nx: 64,
            r: vec![1.0, 2.0, 4.0],
            seed: 0,
            family: FamilyName::Standard,
            modes: vec![[1, 0], [0, 2], [3, 1]],
            dir: PathBuf::from("lab"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridSection,
    pub model: ModelSection,
    pub stepper: StepperSection,
    pub solver: SolverSection,
    pub initial: InitialSection,
    pub output: OutputSection,
    pub lab: LabSection,
}

pub const DEFAULT_TEMPLATE: &str = r#"# nsfp run configuration

[grid]
# spatial points per direction on [0, 2π)²; even, at least 8
nx = 32
# orientation nodes on [0, 2π); even, at least 8
nm = 32
# modes with |k_i| above this fraction of nx/2 are removed after products
dealias_fraction = 0.6666666666666666

[model]
# viscosity, > 0
nu = 0.1
# rotational diffusivity, > 0
kappa = 0.1
# mollifier radius, 0 ≤ delta ≤ π (0 switches mollification off)
delta = 0.0
# Maier–Saupe strength, kernel k = −b cos 2(θ − θ')
b = 0.5
# smoothing order in N(x,t); alpha > 3/2
alpha = 2.0
# time exponent of Y and Z; p > 2q/(q − 2)
p = 5.0
# space exponent of the monitors; q ≥ 4
q = 4.0
# a general even kernel k(θ) = Σ a_n cos nθ, listed from n = 0; replaces b
# kernel = [0.0, 0.0, -0.5]
# general coefficients c_ji = constant + Σ cos[n−1] cos nθ + sin[n−1] sin nθ,
# multiplying ∂u_i/∂x_j in the drift; omitted entries are zero. These are
# the rod defaults:
# [model.coefficients]
# c11 = { sin = [0.0, -0.5] }
# c12 = { constant = 0.5, cos = [0.0, 0.5] }
# c21 = { constant = -0.5, cos = [0.0, 0.5] }
# c22 = { sin = [0.0, 0.5] }

[stepper]
# "if_rk2" (order 2) or "imex_euler" (order 1)
scheme = "if_rk2"
dt = 0.001
t_end = 1.0
# fraction of the advective and angular CFL limit
cfl_safety = 0.5
# steps between diagnostics records
diag_every = 10
# false: fail when dt exceeds the CFL limit; true: shrink dt instead
adaptive = false

[solver]
# "imex" or "picard" (backward Euler by fixed-point iteration)
mode = "imex"
picard_tol = 1e-10
picard_max_iter = 50

[initial]
# Taylor–Green amplitude
amplitude = 1.0
# sup-norm bound of the random divergence-free perturbation
velocity_perturbation = 0.1
# bound on |2π f₀ − 1|, in [0, 1)
orientation_perturbation = 0.3
seed = 0

[output]
# relative paths are taken from the directory holding this file
dir = "output"
# also write diagnostics.json
json = true
# records between checkpoints; 0 writes only the final one
checkpoint_every = 10

[lab]
# grid for the inequality sweeps
nx = 64
# exponents r ≥ 1
r = [1.0, 2.0, 4.0]
seed = 0
# "standard" (20 functions) or "modes" (the wavevectors below)
family = "standard"
modes = [[1, 0], [0, 2], [3, 1]]
dir = "lab"
"#;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, AppError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| AppError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            AppError::Config(m) => AppError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), AppError> {
        self.model_parts()?;
        self.stepper().validate().map_err(AppError::from_core)?;
        self.solver().map_err(AppError::from_core)?;
        self.initial_spec().validate().map_err(AppError::from_core)?;
        GridSpec2D::new(self.lab.nx).map_err(AppError::from_core)?;
        if self.lab.r.is_empty() {
            return Err(AppError::Config("lab.r must list at least one exponent".into()));
        }
        if let Some(r) = self.lab.r.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
            return Err(AppError::Config(format!("lab.r = {r}: exponents must satisfy r ≥ n/2 = 1")));
        }
        if self.lab.family == FamilyName::Modes && self.lab.modes.is_empty() {
            return Err(AppError::Config("lab.modes is empty: the test-function family would be empty".into()));
        }
        if self.lab.modes.contains(&[0, 0]) {
            return Err(AppError::Config("lab.modes: the zero wavevector gives a constant".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<(GridSpec2D, CircleGrid), AppError> {
        let g = GridSpec2D::with_dealias(self.grid.nx, self.grid.dealias_fraction).map_err(AppError::from_core)?;
        let c = CircleGrid::new(self.grid.nm).map_err(AppError::from_core)?;
        Ok((g, c))
    }

    pub fn model_params(&self, circle: CircleGrid) -> Result<ModelParams, AppError> {
        let m = &self.model;
        Ok(ModelParams {
            nu: m.nu,
            kappa: m.kappa,
            delta: m.delta,
            kernel: match &m.kernel {
                Some(a) => InteractionKernel::from_cos_series(a.clone()),
                None => InteractionKernel::maier_saupe(m.b),
            }
            .map_err(AppError::from_core)?,
            coeffs: match &m.coefficients {
                Some(c) => RodCoefficients::from_fourier(
                    circle,
                    &[[c.c11.series("c11")?, c.c12.series("c12")?], [c.c21.series("c21")?, c.c22.series("c22")?]],
                ),
                None => RodCoefficients::rod(circle),
            },
            alpha: m.alpha,
            q: m.q,
            p: m.p,
        })
    }

    fn model_parts(&self) -> Result<Model, AppError> {
        let (g, c) = self.grid()?;
        Model::new(g, c, self.model_params(c)?).map_err(AppError::from_core)
    }

    pub fn build_model(&self) -> Result<Model, AppError> {
        self.model_parts()
    }

    pub fn stepper(&self) -> StepperConfig {
        let s = &self.stepper;
        StepperConfig {
            dt: s.dt,
            scheme: match s.scheme {
                SchemeName::ImexEuler => Scheme::ImexEuler,
                SchemeName::IfRk2 => Scheme::IfRk2,
            },
            cfl_safety: s.cfl_safety,
            t_end: s.t_end,
            diag_every: s.diag_every,
            adaptive: s.adaptive,
        }
    }

    pub fn solver(&self) -> nsfp_core::Result<Solver> {
        Ok(match self.solver.mode {
            SolverMode::Imex => Solver::Imex,
            SolverMode::Picard => {
                let p = PicardConfig { tol: self.solver.picard_tol, max_iter: self.solver.picard_max_iter };
                p.validate()?;
                Solver::Picard(p)
            }
        })
    }

    pub fn initial_spec(&self) -> InitialDataSpec {
        let i = &self.initial;
        InitialDataSpec {
            amplitude: i.amplitude,
            velocity_perturbation: i.velocity_perturbation,
            orientation_perturbation: i.orientation_perturbation,
            seed: i.seed,
        }
    }

    /// Resolves `path` against `base` unless it is absolute.
    pub fn resolve(base: Option<&Path>, path: &Path) -> PathBuf {
        match base {
            Some(b) if path.is_relative() => b.join(path),
            _ => path.to_path_buf(),
        }
    }
}
