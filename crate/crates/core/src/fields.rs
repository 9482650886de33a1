//! Field containers shared by the model, integrator and diagnostics.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::circle::CircleGrid;
use crate::error::{Error, Result};
use crate::spectral2d::{GridSpec2D, ScalarField2D};

/// Velocity pair. Divergence-free and mean-zero whenever produced by the
/// Leray projection.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub u1: ScalarField2D,
    pub u2: ScalarField2D,
}

impl VelocityField {
    pub fn zeros(grid: GridSpec2D) -> Self {
        Self { u1: ScalarField2D::zeros(grid), u2: ScalarField2D::zeros(grid) }
    }

    pub fn grid(&self) -> GridSpec2D {
        self.u1.grid()
    }

    pub fn component(&self, i: usize) -> &ScalarField2D {
        if i == 0 {
            &self.u1
        } else {
            &self.u2
        }
    }

    pub fn max_speed(&self) -> f64 {
        self.u1.values().iter().zip(self.u2.values()).fold(0.0, |m, (a, b)| m.max((a * a + b * b).sqrt()))
    }

    pub fn is_finite(&self) -> bool {
        self.u1.values().iter().chain(self.u2.values()).all(|v| v.is_finite())
    }
}

/// A 2×2 tensor of scalar fields, indexed from zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StressField {
    entries: [[ScalarField2D; 2]; 2],
}

impl StressField {
    pub fn zeros(grid: GridSpec2D) -> Self {
        Self { entries: core::array::from_fn(|_| core::array::from_fn(|_| ScalarField2D::zeros(grid))) }
    }

    pub fn from_entries(entries: [[ScalarField2D; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn grid(&self) -> GridSpec2D {
        self.entries[0][0].grid()
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarField2D {
        &self.entries[i][j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut ScalarField2D {
        &mut self.entries[i][j]
    }

    /// `max_{ij} ‖τ_ij‖_∞`.
    pub fn max_entry_abs(&self) -> f64 {
        self.entries.iter().flatten().fold(0.0, |m, f| m.max(f.max_abs()))
    }
}

/// Orientation distribution `f(x₁, x₂, θ)`.
///
/// Stored θ-major: sample `(i₁, i₂, b)` lives at `b·nx² + i₁·nx + i₂`, so each
/// orientation slice is a contiguous spatial field.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    grid: GridSpec2D,
    circle: CircleGrid,
    values: Vec<f64>,
}

impl DistributionField {
    pub fn zeros(grid: GridSpec2D, circle: CircleGrid) -> Self {
        Self { grid, circle, values: vec![0.0; grid.len() * circle.nm()] }
    }

    pub fn from_fn(grid: GridSpec2D, circle: CircleGrid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let nx = grid.nx();
        let mut out = Self::zeros(grid, circle);
        for b in 0..circle.nm() {
            let th = circle.node(b);
            for i1 in 0..nx {
                for i2 in 0..nx {
                    out.values[(b * nx + i1) * nx + i2] = f(grid.coord(i1), grid.coord(i2), th);
                }
            }
        }
        out
    }

    /// Uniform orientation density `1/(2π)` at every point.
    pub fn uniform(grid: GridSpec2D, circle: CircleGrid) -> Self {
        let c = 1.0 / (2.0 * core::f64::consts::PI);
        Self { grid, circle, values: vec![c; grid.len() * circle.nm()] }
    }

    pub(crate) fn from_raw(grid: GridSpec2D, circle: CircleGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len() * circle.nm());
        Self { grid, circle, values }
    }

    /// Builds from samples ordered row-major over `(x₁, x₂, θ)`.
    pub fn from_point_major(grid: GridSpec2D, circle: CircleGrid, data: &[f64]) -> Result<Self> {
        let (np, nm) = (grid.len(), circle.nm());
        if data.len() != np * nm {
            return Err(Error::GridMismatch("distribution sample count differs from nx²·nm"));
        }
        let mut values = vec![0.0; np * nm];
        for p in 0..np {
            for b in 0..nm {
                values[b * np + p] = data[p * nm + b];
            }
        }
        Ok(Self::from_raw(grid, circle, values))
    }

    /// Samples ordered row-major over `(x₁, x₂, θ)`.
    pub fn to_point_major(&self) -> Vec<f64> {
        let (np, nm) = (self.grid.len(), self.circle.nm());
        let mut out = vec![0.0; np * nm];
        for b in 0..nm {
            for p in 0..np {
                out[p * nm + b] = self.values[b * np + p];
            }
        }
        out
    }

    pub fn grid(&self) -> GridSpec2D {
        self.grid
    }

    pub fn circle(&self) -> CircleGrid {
        self.circle
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn at(&self, i1: usize, i2: usize, b: usize) -> f64 {
        let nx = self.grid.nx();
        self.values[(b * nx + i1) * nx + i2]
    }

    /// Spatial slice at orientation node `b`.
    pub fn slice(&self, b: usize) -> &[f64] {
        let np = self.grid.len();
        &self.values[b * np..(b + 1) * np]
    }

    /// Copies the orientation profile at flat spatial index `p` into `out`.
    pub fn gather_point(&self, p: usize, out: &mut [f64]) {
        let np = self.grid.len();
        for (b, o) in out.iter_mut().enumerate() {
            *o = self.values[b * np + p];
        }
    }

    pub fn point_profile(&self, p: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.circle.nm()];
        self.gather_point(p, &mut out);
        out
    }

    /// Microscopic density `ρ_M(x) = ∫ f dθ`.
    pub fn density(&self) -> ScalarField2D {
        let np = self.grid.len();
        let w = self.circle.weight();
        let mut rho = vec![0.0; np];
        for b in 0..self.circle.nm() {
            for (r, v) in rho.iter_mut().zip(&self.values[b * np..(b + 1) * np]) {
                *r += v;
            }
        }
        for r in &mut rho {
            *r *= w;
        }
        ScalarField2D::from_values(self.grid, rho).expect("density length")
    }

    /// `∫∫ f dθ dx`.
    pub fn total_mass(&self) -> f64 {
        self.density().values().iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `‖f‖₂` over `(x, θ)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area() * self.circle.weight()).sqrt()
    }
}
