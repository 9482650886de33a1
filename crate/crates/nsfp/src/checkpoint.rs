//! Binary checkpoints: `NSFP1\n`, a little-endian u64 header length, a JSON
//! header, then little-endian f64 arrays `u1`, `u2` (row-major over x) and
//! `f` (row-major over x₁, x₂, θ).

use std::path::Path;

use nsfp_core::circle::CircleGrid;
use nsfp_core::diagnostics::History;
use nsfp_core::{DistributionField, GridSpec2D, ScalarField2D, State, VelocityField};
use serde::{Deserialize, Serialize};

use crate::config::ModelSection;
use crate::error::AppError;

pub const MAGIC: &[u8; 6] = b"NSFP1\n";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryHeader {
    pub y_pq: f64,
    pub z_pq: f64,
    /// Absent when the residual was undefined.
    pub balance_residual: Option<f64>,
}

impl From<History> for HistoryHeader {
    fn from(h: History) -> Self {
        Self {
            y_pq: h.y_pq,
            z_pq: h.z_pq,
            balance_residual: h.balance_residual.is_finite().then_some(h.balance_residual),
        }
    }
}

impl From<HistoryHeader> for History {
    fn from(h: HistoryHeader) -> Self {
        Self { y_pq: h.y_pq, z_pq: h.z_pq, balance_residual: h.balance_residual.unwrap_or(f64::NAN) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub t: f64,
    pub nx: usize,
    pub nm: usize,
    pub dealias_fraction: f64,
    pub params: ModelSection,
    pub history: HistoryHeader,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub state: State,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CheckpointError {
    #[error("not a checkpoint (bad magic bytes)")]
    BadMagic,
    #[error("truncated checkpoint: {0}")]
    Truncated(&'static str),
    #[error("corrupt checkpoint header: {0}")]
    Header(String),
    #[error("checkpoint dimensions do not match its data: {0}")]
    Dimensions(String),
}

impl From<CheckpointError> for AppError {
    fn from(e: CheckpointError) -> Self {
        AppError::Io(e.to_string())
    }
}

pub fn encode(header: &CheckpointHeader, state: &State) -> Vec<u8> {
    let json = serde_json::to_vec(header).expect("header serializes");
    let f = state.f.to_point_major();
    let n = state.u.u1.values().len() * 2 + f.len();
    let mut out = Vec::with_capacity(MAGIC.len() + 8 + json.len() + 8 * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for v in state.u.u1.values().iter().chain(state.u.u2.values()).chain(&f) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint, CheckpointError> {
    if bytes.len() < MAGIC.len() {
        return Err(CheckpointError::Truncated("magic bytes"));
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let rest = &bytes[MAGIC.len()..];
    let len_bytes: [u8; 8] =
        rest.get(..8).ok_or(CheckpointError::Truncated("header length"))?.try_into().expect("eight bytes");
    let hlen = usize::try_from(u64::from_le_bytes(len_bytes))
        .map_err(|_| CheckpointError::Header("header length overflows".into()))?;
    let rest = &rest[8..];
    let json = rest.get(..hlen).ok_or(CheckpointError::Truncated("header"))?;
    let header: CheckpointHeader = serde_json::from_slice(json).map_err(|e| CheckpointError::Header(e.to_string()))?;
    let grid = GridSpec2D::with_dealias(header.nx, header.dealias_fraction)
        .map_err(|e| CheckpointError::Header(e.to_string()))?;
    let circle = CircleGrid::new(header.nm).map_err(|e| CheckpointError::Header(e.to_string()))?;
    let data = &rest[hlen..];
    let np = grid.len();
    let want = 8 * (2 * np + np * circle.nm());
    if data.len() < want {
        return Err(CheckpointError::Truncated("field data"));
    }
    if data.len() > want {
        return Err(CheckpointError::Dimensions(format!(
            "{} bytes of field data for nx = {}, nm = {} (expected {want})",
            data.len(),
            header.nx,
            header.nm
        )));
    }
    let vals: Vec<f64> = data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes"))).collect();
    let field = |v: &[f64]| ScalarField2D::from_values(grid, v.to_vec()).expect("length checked");
    let u = VelocityField { u1: field(&vals[..np]), u2: field(&vals[np..2 * np]) };
    let f = DistributionField::from_point_major(grid, circle, &vals[2 * np..])
        .map_err(|e| CheckpointError::Dimensions(e.to_string()))?;
    Ok(Checkpoint { state: State { t: header.t, u, f }, header })
}

pub fn write(path: &Path, header: &CheckpointHeader, state: &State) -> Result<(), AppError> {
    std::fs::write(path, encode(header, state))
        .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn read(path: &Path) -> Result<Checkpoint, AppError> {
    let bytes = std::fs::read(path).map_err(|e| AppError::Io(format!("cannot read {}: {e}", path.display())))?;
    decode(&bytes).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))
}
