//! Fourier toolbox on the periodic square `[0, 2π)²`.
//!
//! Fields are sampled at `x = 2π(i₁, i₂)/nx` and stored row-major with `x₂`
//! fastest. Spectra use the normalization `f(x) = Σ_k f̂(k) e^{ik·x}`, so
//! `‖f‖²_{L²} = (2π)² Σ |f̂(k)|²`.
//!
//! Multipliers that are odd in one wavenumber component drop the Nyquist
//! line of that component so real inputs stay real.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{Direction, FftPlan};
use crate::fields::{StressField, VelocityField};

pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec2D {
    nx: usize,
    dealias_fraction: f64,
}

impl GridSpec2D {
    pub fn new(nx: usize) -> Result<Self> {
        Self::with_dealias(nx, DEFAULT_DEALIAS_FRACTION)
    }

    pub fn with_dealias(nx: usize, dealias_fraction: f64) -> Result<Self> {
        if nx < 8 || !nx.is_multiple_of(2) {
            return Err(Error::param("nx", "mode count must be even and at least 8"));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::param("dealias_fraction", "must lie in (0, 1]"));
        }
        Ok(Self { nx, dealias_fraction })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of physical samples, `nx²`.
    pub fn len(&self) -> usize {
        self.nx * self.nx
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.nx as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.spacing() * i as f64
    }

    /// Signed wavenumber of FFT index `m`: `{0, …, nx/2 − 1, −nx/2, …, −1}`.
    pub fn wavenumber(&self, m: usize) -> i64 {
        let n = self.nx as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    pub fn nyquist(&self) -> i64 {
        -(self.nx as i64) / 2
    }

    pub fn dealias_cutoff(&self) -> f64 {
        self.dealias_fraction * (self.nx / 2) as f64
    }

    pub fn keeps_mode(&self, k1: i64, k2: i64) -> bool {
        let c = self.dealias_cutoff();
        (k1.abs() as f64) <= c && (k2.abs() as f64) <= c
    }

    /// Largest dyadic shell index reachable on this grid.
    pub fn max_shell(&self) -> u32 {
        let half = (self.nx / 2) as i64;
        shell_of(2 * half * half).unwrap_or(0)
    }

    /// Last shell inside the disc `|k| ≤ nx/2`. Shells beyond it are mostly
    /// corner modes whose derivatives vanish on the Nyquist lines.
    pub fn max_full_shell(&self) -> u32 {
        let half = (self.nx / 2) as i64;
        shell_of(half * half).unwrap_or(0)
    }
}

/// Sharp dyadic shell of a lattice frequency with `|k|² = k2`:
/// `j = 0` is `|k| = 1`, `j ≥ 1` is `2^{j−1} < |k| ≤ 2^j`. The zero mode has
/// no shell.
pub fn shell_of(k2: i64) -> Option<u32> {
    if k2 <= 0 {
        return None;
    }
    let mut j = 0u32;
    let mut bound: i64 = 1;
    while k2 > bound {
        j += 1;
        bound *= 4;
    }
    Some(j)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    grid: GridSpec2D,
    values: Vec<f64>,
}

impl ScalarField2D {
    pub fn zeros(grid: GridSpec2D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: GridSpec2D, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: GridSpec2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let nx = grid.nx();
        let mut values = Vec::with_capacity(grid.len());
        for i1 in 0..nx {
            let x1 = grid.coord(i1);
            for i2 in 0..nx {
                values.push(f(x1, grid.coord(i2)));
            }
        }
        Self { grid, values }
    }

    pub fn from_values(grid: GridSpec2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch("sample count differs from nx²"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> GridSpec2D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.values[i1 * self.grid.nx() + i2]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    /// `∫ f g dx` by the equispaced rule.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell_area()
    }
}

/// `(∫ |f|^q dx)^{1/q}` by the equispaced rule; `q = ∞` gives `max |f|`.
pub fn lq_norm(f: &ScalarField2D, q: f64) -> f64 {
    lq_norm_values(f.values(), f.grid().cell_area(), q)
}

pub(crate) fn lq_norm_values(values: &[f64], weight: f64, q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if q == 2.0 {
        return (values.iter().map(|v| v * v).sum::<f64>() * weight).sqrt();
    }
    let s: f64 = values.iter().map(|v| v.abs().powf(q)).sum();
    (s * weight).powf(1.0 / q)
}

/// L^q norm of the pointwise Euclidean length of several component fields.
pub fn lq_norm_components(components: &[&ScalarField2D], q: f64) -> f64 {
    let grid = components[0].grid();
    let mags: Vec<f64> =
        (0..grid.len()).map(|p| components.iter().map(|c| c.values()[p] * c.values()[p]).sum::<f64>().sqrt()).collect();
    lq_norm_values(&mags, grid.cell_area(), q)
}

fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, "exponent must satisfy 1 ≤ p ≤ ∞"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    grid: GridSpec2D,
    coeffs: Vec<Complex64>,
}

impl Spectrum2D {
    pub fn grid(&self) -> GridSpec2D {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of the signed wavenumber `(k1, k2)`.
    pub fn mode(&self, k1: i64, k2: i64) -> Complex64 {
        let n = self.grid.nx() as i64;
        let m1 = k1.rem_euclid(n) as usize;
        let m2 = k2.rem_euclid(n) as usize;
        self.coeffs[m1 * self.grid.nx() + m2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Axis::X1
        } else {
            Axis::X2
        }
    }
}

/// FFT plan plus the Fourier multipliers of the toolbox. Immutable and
/// `Sync`; one instance can serve every thread.
#[derive(Debug, Clone)]
pub struct Spectral2D {
    grid: GridSpec2D,
    plan: FftPlan,
}

impl Spectral2D {
    pub fn new(grid: GridSpec2D) -> Self {
        Self { grid, plan: FftPlan::new(grid.nx()) }
    }

    pub fn grid(&self) -> GridSpec2D {
        self.grid
    }

    fn fft2(&self, buf: &mut [Complex64], dir: Direction) {
        let nx = self.grid.nx();
        for row in buf.chunks_mut(nx) {
            self.plan.process(row, dir);
        }
        let mut col = vec![ZERO; nx];
        for i2 in 0..nx {
            for i1 in 0..nx {
                col[i1] = buf[i1 * nx + i2];
            }
            self.plan.process(&mut col, dir);
            for i1 in 0..nx {
                buf[i1 * nx + i2] = col[i1];
            }
        }
    }

    /// Normalized spectrum of `a + i b`. Both inputs real, so each spectrum
    /// can be carried through any real-preserving multiplier together.
    pub(crate) fn forward_packed(&self, a: &[f64], b: Option<&[f64]>) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = match b {
            Some(b) => a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect(),
            None => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        };
        self.fft2(&mut buf, Direction::Forward);
        let scale = 1.0 / self.grid.len() as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Separate normalized spectra of two real fields from one transform.
    pub(crate) fn forward_split(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let z = self.forward_packed(a, Some(b));
        let nx = self.grid.nx();
        let n = nx as i64;
        let mut za = vec![ZERO; z.len()];
        let mut zb = vec![ZERO; z.len()];
        for m1 in 0..nx {
            let r1 = (n - m1 as i64).rem_euclid(n) as usize;
            for m2 in 0..nx {
                let r2 = (n - m2 as i64).rem_euclid(n) as usize;
                let zp = z[m1 * nx + m2];
                let zm = z[r1 * nx + r2].conj();
                za[m1 * nx + m2] = (zp + zm) * 0.5;
                zb[m1 * nx + m2] = (zp - zm) * Complex64::new(0.0, -0.5);
            }
        }
        (za, zb)
    }

    /// Inverse of [`forward_packed`]; consumes the spectrum buffer.
    pub(crate) fn inverse_packed(&self, mut z: Vec<Complex64>, a: &mut [f64], b: Option<&mut [f64]>) {
        self.fft2(&mut z, Direction::Inverse);
        for (dst, c) in a.iter_mut().zip(&z) {
            *dst = c.re;
        }
        if let Some(b) = b {
            for (dst, c) in b.iter_mut().zip(&z) {
                *dst = c.im;
            }
        }
    }

    /// Multiplies every mode by `symbol(k1, k2)`.
    pub(crate) fn apply_symbol(&self, z: &mut [Complex64], symbol: impl Fn(i64, i64) -> Complex64) {
        let nx = self.grid.nx();
        for m1 in 0..nx {
            let k1 = self.grid.wavenumber(m1);
            for m2 in 0..nx {
                let k2 = self.grid.wavenumber(m2);
                z[m1 * nx + m2] *= symbol(k1, k2);
            }
        }
    }

    /// Applies `symbol` to a real field and returns the real result.
    pub fn apply_multiplier(&self, f: &ScalarField2D, symbol: impl Fn(i64, i64) -> Complex64) -> ScalarField2D {
        self.check(f);
        let mut z = self.forward_packed(f.values(), None);
        self.apply_symbol(&mut z, symbol);
        let mut out = ScalarField2D::zeros(self.grid);
        self.inverse_packed(z, out.values_mut(), None);
        out
    }

    fn check(&self, f: &ScalarField2D) {
        assert_eq!(f.grid(), self.grid, "field grid differs from toolbox grid");
    }

    pub fn forward(&self, f: &ScalarField2D) -> Spectrum2D {
        self.check(f);
        Spectrum2D { grid: self.grid, coeffs: self.forward_packed(f.values(), None) }
    }

    /// Real part of the synthesis of `s`.
    pub fn inverse(&self, s: &Spectrum2D) -> ScalarField2D {
        let mut out = ScalarField2D::zeros(self.grid);
        self.inverse_packed(s.coeffs.clone(), out.values_mut(), None);
        out
    }

    // --- symbols -------------------------------------------------------

    pub fn derivative_symbol(&self, axis: Axis, k1: i64, k2: i64) -> Complex64 {
        let k = if axis == Axis::X1 { k1 } else { k2 };
        if k == self.grid.nyquist() {
            ZERO
        } else {
            Complex64::new(0.0, k as f64)
        }
    }

    /// Wavenumber as seen by the discrete derivative: Nyquist maps to 0.
    fn resolved(&self, k: i64) -> i64 {
        if k == self.grid.nyquist() {
            0
        } else {
            k
        }
    }

    /// `i k_a/|k|` built from resolved wavenumbers, so `k·R̂ = 0` exactly
    /// matches the discrete divergence.
    pub fn riesz_symbol(&self, axis: Axis, k1: i64, k2: i64) -> Complex64 {
        let (k1, k2) = (self.resolved(k1), self.resolved(k2));
        let k = if axis == Axis::X1 { k1 } else { k2 };
        if k == 0 {
            ZERO
        } else {
            let norm = ((k1 * k1 + k2 * k2) as f64).sqrt();
            Complex64::new(0.0, k as f64 / norm)
        }
    }

    pub(crate) fn dealias_factor(&self, k1: i64, k2: i64) -> f64 {
        if self.grid.keeps_mode(k1, k2) {
            1.0
        } else {
            0.0
        }
    }

    // --- operations ----------------------------------------------------

    pub fn derivative(&self, f: &ScalarField2D, axis: Axis) -> ScalarField2D {
        self.apply_multiplier(f, |k1, k2| self.derivative_symbol(axis, k1, k2))
    }

    pub fn riesz(&self, f: &ScalarField2D, axis: Axis) -> ScalarField2D {
        self.apply_multiplier(f, |k1, k2| self.riesz_symbol(axis, k1, k2))
    }

    pub fn laplacian(&self, f: &ScalarField2D) -> ScalarField2D {
        self.apply_multiplier(f, |k1, k2| Complex64::new(-((k1 * k1 + k2 * k2) as f64), 0.0))
    }

    /// `(−Δ)^{-1}` with the mean mapped to zero.
    pub fn inverse_neg_laplacian(&self, f: &ScalarField2D) -> ScalarField2D {
        self.apply_multiplier(f, |k1, k2| {
            let k2n = k1 * k1 + k2 * k2;
            if k2n == 0 {
                ZERO
            } else {
                Complex64::new(1.0 / k2n as f64, 0.0)
            }
        })
    }

    /// Heat semigroup `e^{νtΔ}`.
    pub fn heat_propagate(&self, f: &ScalarField2D, nu: f64, t: f64) -> Result<ScalarField2D> {
        if !(t >= 0.0) {
            return Err(Error::param("t", "propagation time must be nonnegative"));
        }
        if !(nu >= 0.0) {
            return Err(Error::param("nu", "diffusivity must be nonnegative"));
        }
        Ok(self.apply_multiplier(f, |k1, k2| Complex64::new((-nu * t * (k1 * k1 + k2 * k2) as f64).exp(), 0.0)))
    }

    pub fn dealias(&self, f: &ScalarField2D) -> ScalarField2D {
        self.apply_multiplier(f, |k1, k2| Complex64::new(self.dealias_factor(k1, k2), 0.0))
    }

    /// Spectral divergence `∂₁v₁ + ∂₂v₂`.
    pub fn divergence(&self, v1: &ScalarField2D, v2: &ScalarField2D) -> ScalarField2D {
        let mut z1 = self.forward_packed(v1.values(), None);
        let z2 = self.forward_packed(v2.values(), None);
        let nx = self.grid.nx();
        for m1 in 0..nx {
            let k1 = self.grid.wavenumber(m1);
            for m2 in 0..nx {
                let k2 = self.grid.wavenumber(m2);
                let i = m1 * nx + m2;
                z1[i] =
                    z1[i] * self.derivative_symbol(Axis::X1, k1, k2) + z2[i] * self.derivative_symbol(Axis::X2, k1, k2);
            }
        }
        let mut out = ScalarField2D::zeros(self.grid);
        self.inverse_packed(z1, out.values_mut(), None);
        out
    }

    /// Projection onto mean-zero divergence-free fields, symbol
    /// `δ_ij + R_iR_j = δ_ij − k_ik_j/|k|²`.
    pub fn leray_project(&self, v1: &ScalarField2D, v2: &ScalarField2D) -> VelocityField {
        self.check(v1);
        self.check(v2);
        let mut z = self.forward_packed(v1.values(), Some(v2.values()));
        self.leray_in_place_packed(&mut z);
        let mut u1 = ScalarField2D::zeros(self.grid);
        let mut u2 = ScalarField2D::zeros(self.grid);
        self.inverse_packed(z, u1.values_mut(), Some(u2.values_mut()));
        VelocityField { u1, u2 }
    }

    /// Leray projection acting on the packed spectrum `v̂₁ + i v̂₂`.
    pub(crate) fn leray_in_place_packed(&self, z: &mut [Complex64]) {
        let nx = self.grid.nx();
        let n = nx as i64;
        for m1 in 0..nx {
            let k1 = self.grid.wavenumber(m1);
            for m2 in 0..nx {
                let k2 = self.grid.wavenumber(m2);
                let i = m1 * nx + m2;
                let j = ((-k1).rem_euclid(n) as usize) * nx + (-k2).rem_euclid(n) as usize;
                if i > j {
                    continue;
                }
                // unpack the two real spectra at ±k, project, repack
                let (zp, zm) = (z[i], z[j].conj());
                let a = [(zp + zm) * 0.5, (zp - zm) * Complex64::new(0.0, -0.5)];
                let proj = |k1: i64, k2: i64, a: [Complex64; 2]| -> [Complex64; 2] {
                    let r1 = self.riesz_symbol(Axis::X1, k1, k2);
                    let r2 = self.riesz_symbol(Axis::X2, k1, k2);
                    let s = r1 * a[0] + r2 * a[1];
                    if k1 == 0 && k2 == 0 {
                        [ZERO, ZERO]
                    } else {
                        [a[0] + r1 * s, a[1] + r2 * s]
                    }
                };
                let b = proj(k1, k2, a);
                z[i] = b[0] + Complex64::new(0.0, 1.0) * b[1];
                if i != j {
                    // the partner mode carries the conjugate spectra
                    let (mk1, mk2) = (self.grid.wavenumber(j / nx), self.grid.wavenumber(j % nx));
                    let c = proj(mk1, mk2, [a[0].conj(), a[1].conj()]);
                    z[j] = c[0] + Complex64::new(0.0, 1.0) * c[1];
                }
            }
        }
    }

    /// Builds the mollifier `J_δ` for this grid.
    pub fn mollifier(&self, delta: f64) -> Result<Mollifier> {
        Mollifier::new(self.grid, delta)
    }

    pub fn mollify(&self, f: &ScalarField2D, delta: f64) -> Result<ScalarField2D> {
        let m = self.mollifier(delta)?;
        Ok(m.apply(self, f))
    }

    /// Sharp Littlewood–Paley block `Δ_j f`.
    pub fn lp_block(&self, f: &ScalarField2D, j: u32) -> ScalarField2D {
        self.apply_multiplier(
            f,
            |k1, k2| {
                if shell_of(k1 * k1 + k2 * k2) == Some(j) {
                    Complex64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            },
        )
    }

    /// All blocks `Δ_0 f, …, Δ_J f` with `J` the grid's largest shell.
    pub fn lp_blocks(&self, f: &ScalarField2D) -> Vec<ScalarField2D> {
        self.check(f);
        let spec = self.forward_packed(f.values(), None);
        let nx = self.grid.nx();
        (0..=self.grid.max_shell())
            .map(|j| {
                let mut z = spec.clone();
                for m1 in 0..nx {
                    let k1 = self.grid.wavenumber(m1);
                    for m2 in 0..nx {
                        let k2 = self.grid.wavenumber(m2);
                        if shell_of(k1 * k1 + k2 * k2) != Some(j) {
                            z[m1 * nx + m2] = ZERO;
                        }
                    }
                }
                let mut out = ScalarField2D::zeros(self.grid);
                self.inverse_packed(z, out.values_mut(), None);
                out
            })
            .collect()
    }

    /// `(Σ_j 2^{jqs} ‖Δ_j f‖_{L^p}^q)^{1/q}` over the grid's shells. The mean
    /// lies in no shell and does not contribute.
    pub fn besov_norm(&self, f: &ScalarField2D, s: f64, p: f64, q: f64) -> Result<f64> {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        let terms: Vec<f64> =
            self.lp_blocks(f).iter().enumerate().map(|(j, b)| 2f64.powf(j as f64 * s) * lq_norm(b, p)).collect();
        Ok(sequence_norm(&terms, q))
    }

    /// `(ℍτ)_ij = R_j(δ_il + R_iR_l)R_kτ_lk`.
    pub fn apply_h(&self, tau: &StressField) -> StressField {
        let grid = self.grid;
        let spec: [[Vec<Complex64>; 2]; 2] =
            core::array::from_fn(|l| core::array::from_fn(|k| self.forward_packed(tau.get(l, k).values(), None)));
        let nx = grid.nx();
        let mut out: [[Vec<Complex64>; 2]; 2] =
            core::array::from_fn(|_| core::array::from_fn(|_| vec![ZERO; grid.len()]));
        for m1 in 0..nx {
            let k1 = grid.wavenumber(m1);
            for m2 in 0..nx {
                let k2 = grid.wavenumber(m2);
                let idx = m1 * nx + m2;
                let r = [self.riesz_symbol(Axis::X1, k1, k2), self.riesz_symbol(Axis::X2, k1, k2)];
                // s_l = R_k τ_lk
                let s: [Complex64; 2] = core::array::from_fn(|l| r[0] * spec[l][0][idx] + r[1] * spec[l][1][idx]);
                // v_i = s_i + R_i R_l s_l
                let rs = r[0] * s[0] + r[1] * s[1];
                let v = [s[0] + r[0] * rs, s[1] + r[1] * rs];
                for i in 0..2 {
                    for j in 0..2 {
                        out[i][j][idx] = r[j] * v[i];
                    }
                }
            }
        }
        let mut result = StressField::zeros(grid);
        for (i, row) in out.into_iter().enumerate() {
            for (j, z) in row.into_iter().enumerate() {
                self.inverse_packed(z, result.get_mut(i, j).values_mut(), None);
            }
        }
        result
    }
}

pub(crate) fn sequence_norm(terms: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        terms.iter().fold(0.0, |m, t| m.max(t.abs()))
    } else {
        terms.iter().map(|t| t.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Unnormalized bump `exp(1/(r² − 1))` on the unit disk.
pub fn bump_profile(r: f64) -> f64 {
    if r < 1.0 {
        (1.0 / (r * r - 1.0)).exp()
    } else {
        0.0
    }
}

const RADIAL_PANELS: usize = 4096;

/// `∫₀¹ bump(r) J₀(ρ r) r dr` by composite Simpson.
fn radial_transform(rho: f64) -> f64 {
    let h = 1.0 / RADIAL_PANELS as f64;
    let g = |r: f64| bump_profile(r) * libm::j0(rho * r) * r;
    let mut s = g(0.0) + g(1.0);
    for i in 1..RADIAL_PANELS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(i as f64 * h);
    }
    s * h / 3.0
}

/// Fourier symbol of the unit-mass bump at frequency magnitude `rho`;
/// equals 1 at `rho = 0`.
pub fn bump_transform(rho: f64) -> f64 {
    radial_transform(rho) / radial_transform(0.0)
}

/// Mollifier `J_δ f = φ_δ * f` with the unit-mass bump `φ` scaled to
/// radius δ. Applied as its exact Fourier symbol `φ̂(δ|k|)`.
#[derive(Debug, Clone)]
pub struct Mollifier {
    delta: f64,
    symbol: Vec<f64>,
}

impl Mollifier {
    pub fn new(grid: GridSpec2D, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::param("delta", "mollification length must be nonnegative"));
        }
        if delta > PI {
            return Err(Error::param("delta", "mollifier support must fit the periodic cell (δ ≤ π)"));
        }
        let nx = grid.nx();
        let mut cache: BTreeMap<i64, f64> = BTreeMap::new();
        let norm0 = radial_transform(0.0);
        let mut symbol = vec![1.0; grid.len()];
        if delta > 0.0 {
            for m1 in 0..nx {
                let k1 = grid.wavenumber(m1);
                for m2 in 0..nx {
                    let k2 = grid.wavenumber(m2);
                    let kk = k1 * k1 + k2 * k2;
                    let v = *cache.entry(kk).or_insert_with(|| radial_transform(delta * (kk as f64).sqrt()) / norm0);
                    symbol[m1 * nx + m2] = v;
                }
            }
        }
        Ok(Self { delta, symbol })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_identity(&self) -> bool {
        self.delta == 0.0
    }

    /// Symbol value at FFT index `(m1, m2)`.
    pub fn symbol_at(&self, index: usize) -> f64 {
        self.symbol[index]
    }

    pub(crate) fn apply_spectrum(&self, z: &mut [Complex64]) {
        if self.is_identity() {
            return;
        }
        for (c, s) in z.iter_mut().zip(&self.symbol) {
            *c *= *s;
        }
    }

    pub fn apply(&self, spectral: &Spectral2D, f: &ScalarField2D) -> ScalarField2D {
        if self.is_identity() {
            return f.clone();
        }
        let mut z = spectral.forward_packed(f.values(), None);
        self.apply_spectrum(&mut z);
        let mut out = ScalarField2D::zeros(f.grid());
        spectral.inverse_packed(z, out.values_mut(), None);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::{cos, sin};

    fn grid(n: usize) -> GridSpec2D {
        GridSpec2D::new(n).unwrap()
    }

    fn max_diff(a: &ScalarField2D, b: &ScalarField2D) -> f64 {
        a.sub(b).max_abs()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec2D::new(6).is_err());
        assert!(GridSpec2D::new(9).is_err());
        assert!(GridSpec2D::with_dealias(16, 0.0).is_err());
        assert!(GridSpec2D::with_dealias(16, 1.0).is_ok());
        let g = grid(32);
        assert!(g.keeps_mode(10, -10));
        assert!(!g.keeps_mode(11, 0));
        assert_eq!(g.wavenumber(16), -16);
    }

    #[test]
    fn shells() {
        assert_eq!(shell_of(0), None);
        assert_eq!(shell_of(1), Some(0));
        assert_eq!(shell_of(2), Some(1));
        assert_eq!(shell_of(4), Some(1));
        assert_eq!(shell_of(5), Some(2));
        assert_eq!(shell_of(9), Some(2));
        assert_eq!(shell_of(16), Some(2));
        assert_eq!(shell_of(17), Some(3));
        // nx = 32: max |k|² = 512 → 2^4 < √512 ≤ 2^5
        assert_eq!(grid(32).max_shell(), 5);
        assert_eq!(grid(32).max_full_shell(), 4);
        assert_eq!(grid(64).max_full_shell(), 5);
    }

    #[test]
    fn derivative_examples() {
        let g = grid(32);
        let sp = Spectral2D::new(g);
        let f = ScalarField2D::from_fn(g, |x, _| sin(x));
        assert!(max_diff(&sp.derivative(&f, Axis::X1), &ScalarField2D::from_fn(g, |x, _| cos(x))) < 1e-13);
        let c = ScalarField2D::constant(g, 3.0);
        assert!(sp.derivative(&c, Axis::X2).max_abs() < 1e-14);
        let f = ScalarField2D::from_fn(g, |x, y| sin(3.0 * x + 2.0 * y));
        let want = ScalarField2D::from_fn(g, |x, y| 2.0 * cos(3.0 * x + 2.0 * y));
        assert!(max_diff(&sp.derivative(&f, Axis::X2), &want) < 1e-13);
    }

    #[test]
    fn riesz_and_inverse_laplacian_examples() {
        let g = grid(32);
        let sp = Spectral2D::new(g);
        let f = ScalarField2D::from_fn(g, |x, y| sin(x + y));
        let want = ScalarField2D::from_fn(g, |x, y| cos(x + y) / 2f64.sqrt());
        assert!(max_diff(&sp.riesz(&f, Axis::X1), &want) < 1e-14);
        assert!(sp.riesz(&ScalarField2D::constant(g, 1.0), Axis::X1).max_abs() < 1e-15);
        let f = ScalarField2D::from_fn(g, |x, _| sin(2.0 * x));
        assert!(max_diff(&sp.inverse_neg_laplacian(&f), &f.scaled(0.25)) < 1e-15);
        assert!(sp.inverse_neg_laplacian(&ScalarField2D::constant(g, 2.0)).max_abs() < 1e-15);
    }

    #[test]
    fn leray_examples() {
        let g = grid(16);
        let sp = Spectral2D::new(g);
        let phi = ScalarField2D::from_fn(g, |x, y| sin(x + y));
        let v = sp.leray_project(&sp.derivative(&phi, Axis::X1), &sp.derivative(&phi, Axis::X2));
        assert!(v.u1.max_abs() < 1e-14 && v.u2.max_abs() < 1e-14);
        let s = ScalarField2D::from_fn(g, |_, y| sin(y));
        let v = sp.leray_project(&s, &ScalarField2D::zeros(g));
        assert!(max_diff(&v.u1, &s) < 1e-14 && v.u2.max_abs() < 1e-14);
        let s = ScalarField2D::from_fn(g, |x, _| 0.7 + sin(x));
        let v = sp.leray_project(&s, &ScalarField2D::zeros(g));
        assert!(v.u1.max_abs() < 1e-14 && v.u2.max_abs() < 1e-14);
    }

    #[test]
    fn heat_examples() {
        let g = grid(16);
        let sp = Spectral2D::new(g);
        let f = ScalarField2D::from_fn(g, |x, _| sin(x));
        let out = sp.heat_propagate(&f, 1.0, 0.5).unwrap();
        assert!(max_diff(&out, &f.scaled(libm::exp(-0.5))) < 1e-15);
        let f = ScalarField2D::from_fn(g, |x, _| sin(2.0 * x));
        let out = sp.heat_propagate(&f, 0.25, 1.0).unwrap();
        assert!(max_diff(&out, &f.scaled(libm::exp(-1.0))) < 1e-15);
        assert_eq!(sp.heat_propagate(&f, 1.0, 0.0).unwrap().values().len(), f.values().len());
        assert!(max_diff(&sp.heat_propagate(&f, 1.0, 0.0).unwrap(), &f) < 1e-15);
        assert!(sp.heat_propagate(&f, 1.0, -1.0).is_err());
    }

    #[test]
    fn mollifier_basics() {
        let g = grid(32);
        let sp = Spectral2D::new(g);
        let c = ScalarField2D::constant(g, 1.5);
        assert!(max_diff(&sp.mollify(&c, 0.3).unwrap(), &c) < 1e-14);
        let f = ScalarField2D::from_fn(g, |x, y| sin(x) * cos(3.0 * y));
        assert_eq!(sp.mollify(&f, 0.0).unwrap(), f);
        assert!(sp.mollify(&f, 4.0).is_err());
        assert!(sp.mollify(&f, -0.1).is_err());
        assert!((bump_transform(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mollifier_symbol_matches_cartesian_quadrature() {
        // independent route: midpoint rule over the disk of ∫ φ_δ(y) cos(y₁) dy
        let delta = 0.1;
        let n = 800;
        let h = 2.0 / n as f64;
        let (mut mass, mut moment) = (0.0, 0.0);
        for a in 0..n {
            let y1 = -1.0 + (a as f64 + 0.5) * h;
            for b in 0..n {
                let y2 = -1.0 + (b as f64 + 0.5) * h;
                let w = bump_profile(libm::sqrt(y1 * y1 + y2 * y2));
                mass += w;
                moment += w * cos(delta * y1);
            }
        }
        let oracle = moment / mass;
        let got = bump_transform(delta);
        assert!(got > 0.0 && got <= 1.0);
        assert!((got - oracle).abs() < 1e-9, "{got} vs {oracle}");

        let g = grid(32);
        let sp = Spectral2D::new(g);
        let f = ScalarField2D::from_fn(g, |x, _| sin(x));
        let out = sp.mollify(&f, delta).unwrap();
        assert!(max_diff(&out, &f.scaled(oracle)) < 1e-9);
    }

    #[test]
    fn lp_block_examples() {
        let g = grid(32);
        let sp = Spectral2D::new(g);
        let f = ScalarField2D::from_fn(g, |x, _| sin(3.0 * x));
        for j in 0..=g.max_shell() {
            let b = sp.lp_block(&f, j);
            if j == 2 {
                assert!(max_diff(&b, &f) < 1e-14);
            } else {
                assert!(b.max_abs() < 1e-14);
            }
        }
        let c = ScalarField2D::constant(g, 2.0);
        assert!(sp.lp_blocks(&c).iter().all(|b| b.max_abs() < 1e-14));
    }

    #[test]
    fn besov_examples() {
        let g = grid(32);
        let sp = Spectral2D::new(g);
        let f = ScalarField2D::from_fn(g, |x, _| sin(2.0 * x));
        let b = sp.besov_norm(&f, 0.0, 2.0, 2.0).unwrap();
        assert!((b - 2f64.sqrt() * PI).abs() < 1e-12);
        assert!(sp.besov_norm(&f, 0.0, 0.5, 2.0).is_err());
    }

    #[test]
    fn lq_norm_examples() {
        let g = grid(32);
        let c = ScalarField2D::constant(g, 2.0);
        assert!((lq_norm(&c, 4.0) - 2.0 * (2.0 * PI).powf(0.5)).abs() < 1e-12);
        let s = ScalarField2D::from_fn(g, |x, _| sin(x));
        assert!((lq_norm(&s, 2.0) - 2f64.sqrt() * PI).abs() < 1e-12);
        // ∫∫ sin⁴ = 2π · 3π/4
        let want = (3.0 * PI * PI / 2.0).powf(0.25);
        assert!((lq_norm(&s, 4.0) - want).abs() < 1e-12);
        assert!((lq_norm(&s, f64::INFINITY) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn apply_h_examples() {
        let g = grid(16);
        let sp = Spectral2D::new(g);
        let mut tau = StressField::zeros(g);
        for i in 0..2 {
            for j in 0..2 {
                *tau.get_mut(i, j) = ScalarField2D::constant(g, 1.0 + (i + 2 * j) as f64);
            }
        }
        let out = sp.apply_h(&tau);
        assert!(out.max_entry_abs() < 1e-14);

        // τ = diag(sin x₁, 0): at k = (1, 0) the symbol is
        // −(k_j k_k/|k|²)(δ_il − k_ik_l/|k|²) τ̂_lk, nonzero only for (i,j,l,k) = (1,1,1,1)
        // where δ_11 − 1 = 0, so ℍτ = 0.
        let mut tau = StressField::zeros(g);
        *tau.get_mut(0, 0) = ScalarField2D::from_fn(g, |x, _| sin(x));
        assert!(sp.apply_h(&tau).max_entry_abs() < 1e-14);
    }
}
