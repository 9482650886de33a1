//! Configuration manifold `M = S¹` with the flat metric: `dm = dθ`,
//! `∇_g = ∂_θ`, `div_g = ∂_θ`, `Δ_g = ∂_θ²`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{Direction, FftPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleGrid {
    nm: usize,
}

impl CircleGrid {
    pub fn new(nm: usize) -> Result<Self> {
        if nm < 8 || !nm.is_multiple_of(2) {
            return Err(Error::param("nm", "circle mode count must be even and at least 8"));
        }
        Ok(Self { nm })
    }

    pub fn nm(&self) -> usize {
        self.nm
    }

    /// Trapezoidal weight `2π/nm`.
    pub fn weight(&self) -> f64 {
        2.0 * PI / self.nm as f64
    }

    pub fn node(&self, b: usize) -> f64 {
        self.weight() * b as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.nm).map(|b| self.node(b)).collect()
    }

    /// Signed circle mode of FFT index `m`.
    pub fn mode(&self, m: usize) -> i64 {
        let n = self.nm as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.nm).map(|b| f(self.node(b))).collect()
    }

    /// `∫ g dθ` by the trapezoidal rule.
    pub fn integrate(&self, g: &[f64]) -> f64 {
        g.iter().sum::<f64>() * self.weight()
    }
}

/// Spectral operators on circle profiles. Immutable; shareable across threads.
#[derive(Debug, Clone)]
pub struct CircleOps {
    grid: CircleGrid,
    plan: FftPlan,
    cutoff: f64,
    // cos(nθ_b), sin(nθ_b) for 0 ≤ n ≤ nm/2, row n
    cos_tab: Vec<f64>,
    sin_tab: Vec<f64>,
}

impl CircleOps {
    /// `dealias_fraction` sets the θ-mode cutoff used by [`CircleOps::derivative_dealiased`].
    pub fn new(grid: CircleGrid, dealias_fraction: f64) -> Self {
        let nm = grid.nm();
        let half = nm / 2;
        let mut cos_tab = vec![0.0; (half + 1) * nm];
        let mut sin_tab = vec![0.0; (half + 1) * nm];
        for n in 0..=half {
            for b in 0..nm {
                // reduce nb mod nm so the angle stays in [0, 2π)
                let th = grid.node((n * b) % nm);
                cos_tab[n * nm + b] = th.cos();
                sin_tab[n * nm + b] = th.sin();
            }
        }
        Self { grid, plan: FftPlan::new(nm), cutoff: dealias_fraction * half as f64, cos_tab, sin_tab }
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub(crate) fn cos_row(&self, n: usize) -> &[f64] {
        let nm = self.grid.nm();
        &self.cos_tab[n * nm..(n + 1) * nm]
    }

    pub(crate) fn sin_row(&self, n: usize) -> &[f64] {
        let nm = self.grid.nm();
        &self.sin_tab[n * nm..(n + 1) * nm]
    }

    /// Applies `symbol(n)` in place; `scratch` must hold `nm` entries.
    pub(crate) fn apply_symbol_with(
        &self,
        data: &mut [f64],
        scratch: &mut [Complex64],
        symbol: impl Fn(i64) -> Complex64,
    ) {
        let nm = self.grid.nm();
        for (s, &v) in scratch.iter_mut().zip(data.iter()) {
            *s = Complex64::new(v, 0.0);
        }
        self.plan.process(scratch, Direction::Forward);
        let scale = 1.0 / nm as f64;
        for (m, s) in scratch.iter_mut().enumerate() {
            *s *= symbol(self.grid.mode(m)) * scale;
        }
        self.plan.process(scratch, Direction::Inverse);
        for (d, s) in data.iter_mut().zip(scratch.iter()) {
            *d = s.re;
        }
    }

    fn apply_symbol(&self, g: &[f64], symbol: impl Fn(i64) -> Complex64) -> Vec<f64> {
        let mut out = g.to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.grid.nm()];
        self.apply_symbol_with(&mut out, &mut scratch, symbol);
        out
    }

    fn derivative_symbol(&self, n: i64) -> Complex64 {
        if n == -(self.grid.nm() as i64) / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, n as f64)
        }
    }

    /// `∂_θ g`.
    pub fn grad_theta(&self, g: &[f64]) -> Vec<f64> {
        self.apply_symbol(g, |n| self.derivative_symbol(n))
    }

    /// `∂_θ g` with modes beyond the dealiasing cutoff removed.
    pub(crate) fn derivative_dealiased(&self, data: &mut [f64], scratch: &mut [Complex64]) {
        let cutoff = self.cutoff;
        self.apply_symbol_with(data, scratch, |n| {
            if (n.abs() as f64) > cutoff {
                Complex64::new(0.0, 0.0)
            } else {
                self.derivative_symbol(n)
            }
        });
    }

    /// `∂_θ² g`, symbol `−n²`.
    pub fn laplace_theta(&self, g: &[f64]) -> Vec<f64> {
        self.apply_symbol(g, |n| Complex64::new(-((n * n) as f64), 0.0))
    }

    /// `R g = (I − ∂_θ²)^{−α/2} g`.
    pub fn smooth_r(&self, g: &[f64], alpha: f64) -> Vec<f64> {
        let mut out = g.to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.grid.nm()];
        self.smooth_r_with(&mut out, &mut scratch, alpha);
        out
    }

    pub(crate) fn smooth_r_with(&self, data: &mut [f64], scratch: &mut [Complex64], alpha: f64) {
        self.apply_symbol_with(data, scratch, |n| Complex64::new((1.0 + (n * n) as f64).powf(-alpha / 2.0), 0.0));
    }

    /// `R^{−1} g = (I − ∂_θ²)^{α/2} g`.
    pub fn unsmooth_r(&self, g: &[f64], alpha: f64) -> Vec<f64> {
        self.apply_symbol(g, |n| Complex64::new((1.0 + (n * n) as f64).powf(alpha / 2.0), 0.0))
    }

    /// Heat semigroup `e^{κt∂_θ²}`.
    pub(crate) fn heat_with(&self, data: &mut [f64], scratch: &mut [Complex64], kt: f64) {
        self.apply_symbol_with(data, scratch, |n| Complex64::new((-kt * (n * n) as f64).exp(), 0.0));
    }

    /// Resolvent `(I − κdt ∂_θ²)^{−1}`.
    pub(crate) fn resolvent_with(&self, data: &mut [f64], scratch: &mut [Complex64], kdt: f64) {
        self.apply_symbol_with(data, scratch, |n| Complex64::new(1.0 / (1.0 + kdt * (n * n) as f64), 0.0));
    }

    /// Trapezoidal moments `∫ cos(nθ) g dθ`, `∫ sin(nθ) g dθ`.
    pub fn moments(&self, g: &[f64], n: usize) -> (f64, f64) {
        let w = self.grid.weight();
        let c: f64 = self.cos_row(n).iter().zip(g).map(|(a, b)| a * b).sum();
        let s: f64 = self.sin_row(n).iter().zip(g).map(|(a, b)| a * b).sum();
        (c * w, s * w)
    }

    /// `U[g](θ) = ∫ k(θ − θ′) g(θ′) dθ′`.
    pub fn potential_u(&self, g: &[f64], kernel: &InteractionKernel) -> Vec<f64> {
        let mut u = vec![0.0; self.grid.nm()];
        let mut du = vec![0.0; self.grid.nm()];
        self.potential_with_derivative(g, kernel, &mut u, &mut du);
        u
    }

    /// Writes `U[g]` and `∂_θU[g]` using the kernel's cosine series.
    pub fn potential_with_derivative(&self, g: &[f64], kernel: &InteractionKernel, u: &mut [f64], du: &mut [f64]) {
        let a = kernel.cos_coeffs();
        let mass = self.grid.integrate(g);
        let base = if a.is_empty() { 0.0 } else { a[0] * mass };
        u.iter_mut().for_each(|v| *v = base);
        du.iter_mut().for_each(|v| *v = 0.0);
        for (n, &an) in a.iter().enumerate().skip(1) {
            if an == 0.0 {
                continue;
            }
            let (c, s) = self.moments(g, n);
            let cr = self.cos_row(n);
            let sr = self.sin_row(n);
            let nf = n as f64;
            for b in 0..u.len() {
                // k = a_n cos n(θ−θ′) = a_n (cos nθ cos nθ′ + sin nθ sin nθ′)
                u[b] += an * (cr[b] * c + sr[b] * s);
                du[b] += an * nf * (cr[b] * s - sr[b] * c);
            }
        }
    }
}

/// Translation-invariant symmetric kernel `k(θ, θ′) = Σ_n a_n cos(n(θ − θ′))`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionKernel {
    cos_coeffs: Vec<f64>,
}

impl InteractionKernel {
    /// Maier–Saupe: `k = −b cos(2(θ − θ′))`.
    pub fn maier_saupe(b: f64) -> Result<Self> {
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::param("b", "coupling strength must be finite and nonnegative"));
        }
        Ok(Self { cos_coeffs: vec![0.0, 0.0, -b] })
    }

    pub fn from_cos_series(cos_coeffs: Vec<f64>) -> Result<Self> {
        if cos_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("kernel", "coefficients must be finite"));
        }
        Ok(Self { cos_coeffs })
    }

    pub fn none() -> Self {
        Self { cos_coeffs: Vec::new() }
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    /// Highest cosine mode present.
    pub fn degree(&self) -> usize {
        self.cos_coeffs.iter().rposition(|&a| a != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, theta: f64, theta_prime: f64) -> f64 {
        let d = theta - theta_prime;
        self.cos_coeffs.iter().enumerate().map(|(n, a)| a * (n as f64 * d).cos()).sum()
    }

    /// `∂_θ k(θ, θ′)`.
    pub fn eval_derivative(&self, theta: f64, theta_prime: f64) -> f64 {
        let d = theta - theta_prime;
        self.cos_coeffs.iter().enumerate().map(|(n, a)| -a * n as f64 * (n as f64 * d).sin()).sum()
    }

    /// Lipschitz constant `Σ n|a_n|`; `2b` for Maier–Saupe.
    pub fn lipschitz(&self) -> f64 {
        self.cos_coeffs.iter().enumerate().map(|(n, a)| n as f64 * a.abs()).sum()
    }
}

/// Trigonometric polynomial `a₀ + Σ_n (a_n cos nθ + b_n sin nθ)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FourierSeries {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierSeries {
    pub fn eval(&self, th: f64) -> f64 {
        let mut v = self.constant;
        for (n, a) in self.cos.iter().enumerate() {
            v += a * ((n + 1) as f64 * th).cos();
        }
        for (n, b) in self.sin.iter().enumerate() {
            v += b * ((n + 1) as f64 * th).sin();
        }
        v
    }

    pub fn eval_derivative(&self, th: f64) -> f64 {
        let mut v = 0.0;
        for (n, a) in self.cos.iter().enumerate() {
            let k = (n + 1) as f64;
            v -= a * k * (k * th).sin();
        }
        for (n, b) in self.sin.iter().enumerate() {
            let k = (n + 1) as f64;
            v += b * k * (k * th).cos();
        }
        v
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }
}

/// Coefficients `c_{ji}(θ)` of `W = ∂u_i/∂x_j c_{ji}` and their exact
/// θ-derivatives, sampled on the circle grid. Indices are zero-based:
/// `c(j, i)` is `c_{j+1, i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RodCoefficients {
    c: [[Vec<f64>; 2]; 2],
    dc: [[Vec<f64>; 2]; 2],
    degree: usize,
}

impl RodCoefficients {
    /// `c_{ji} = m_j m^⊥_i` with `m = (cos θ, sin θ)`, `m^⊥ = (−sin θ, cos θ)`.
    pub fn rod(grid: CircleGrid) -> Self {
        let half = 0.5;
        let series = [
            [
                // c11 = −cos θ sin θ
                FourierSeries { constant: 0.0, cos: vec![], sin: vec![0.0, -half] },
                // c12 = cos² θ
                FourierSeries { constant: half, cos: vec![0.0, half], sin: vec![] },
            ],
            [
                // c21 = −sin² θ
                FourierSeries { constant: -half, cos: vec![0.0, half], sin: vec![] },
                // c22 = sin θ cos θ
                FourierSeries { constant: 0.0, cos: vec![], sin: vec![0.0, half] },
            ],
        ];
        Self::from_fourier(grid, &series)
    }

    pub fn zero(grid: CircleGrid) -> Self {
        let z = || vec![0.0; grid.nm()];
        Self { c: [[z(), z()], [z(), z()]], dc: [[z(), z()], [z(), z()]], degree: 0 }
    }

    pub fn from_fourier(grid: CircleGrid, series: &[[FourierSeries; 2]; 2]) -> Self {
        let c = core::array::from_fn(|j| core::array::from_fn(|i| grid.sample(|t| series[j][i].eval(t))));
        let dc = core::array::from_fn(|j| core::array::from_fn(|i| grid.sample(|t| series[j][i].eval_derivative(t))));
        let degree = series.iter().flatten().map(FourierSeries::degree).max().unwrap_or(0);
        Self { c, dc, degree }
    }

    pub fn c(&self, j: usize, i: usize) -> &[f64] {
        &self.c[j][i]
    }

    pub fn dc(&self, j: usize, i: usize) -> &[f64] {
        &self.dc[j][i]
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn sup_c(&self) -> f64 {
        self.c.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_dc(&self) -> f64 {
        self.dc.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}
