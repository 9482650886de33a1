//! Pseudospectral core for the mollified Navier–Stokes / nonlinear
//! Fokker–Planck system on the two-dimensional torus with orientations on S¹.
#![no_std]
// `Float` is only needed when nothing in the graph links std
#![allow(unused_imports)]
// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod besov_lab;
pub mod circle;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod fields;
pub mod init;
pub mod integrator;
pub mod model;
mod par;
pub mod spectral2d;

pub use circle::{CircleGrid, CircleOps, FourierSeries, InteractionKernel, RodCoefficients};
pub use diagnostics::{DiagnosticsRecord, Monitor, MonitorConfig};
pub use error::{Error, Result};
pub use fields::{DistributionField, StressField, VelocityField};
pub use init::{standard_initial_data, InitialDataSpec};
pub use integrator::{run_simulation, PicardConfig, Scheme, Solver, StepperConfig};
pub use model::{Model, ModelParams, State};
pub use spectral2d::{Axis, GridSpec2D, Mollifier, ScalarField2D, Spectral2D};
