//! Monitored quantities of the regularity argument: `N(x,t)`, the time
//! accumulators `Y_pq`, `Z_pq`, vorticity norms, the energy-balance residual,
//! the logarithmic gradient ratio and conservation checks.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::Result;
use crate::fields::{DistributionField, StressField, VelocityField};
use crate::model::{kinetic_energy, validate_exponents, Model, ModelParams, State};
use crate::par;
use crate::spectral2d::{lq_norm, Axis, ScalarField2D, Spectral2D};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorConfig {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    /// Samples used for time derivatives.
    pub window: usize,
}

impl MonitorConfig {
    pub fn new(p: f64, q: f64, alpha: f64) -> Result<Self> {
        validate_exponents(p, q, alpha)?;
        Ok(Self { p, q, alpha, window: 3 })
    }

    pub fn from_params(params: &ModelParams) -> Result<Self> {
        Self::new(params.p, params.q, params.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub kinetic_energy: f64,
    pub free_energy_total: f64,
    pub dissipation_total: f64,
    pub balance_residual: f64,
    pub grad_u_inf: f64,
    pub omega_lq: f64,
    pub n_lq: f64,
    pub y_pq: f64,
    pub z_pq: f64,
    pub tau_inf: f64,
    pub sigma_inf: f64,
    pub log_bound_ratio: f64,
    pub total_mass: f64,
    pub rho_dev: f64,
    pub min_f: f64,
    pub div_u_max: f64,
    pub positivity_flag: bool,
}

impl DiagnosticsRecord {
    pub const FIELD_NAMES: [&'static str; 18] = [
        "t",
        "kinetic_energy",
        "free_energy_total",
        "dissipation_total",
        "balance_residual",
        "grad_u_inf",
        "omega_lq",
        "N_lq",
        "Y_pq",
        "Z_pq",
        "tau_inf",
        "sigma_inf",
        "log_bound_ratio",
        "total_mass",
        "rho_dev",
        "min_f",
        "div_u_max",
        "positivity_flag",
    ];

    /// Values in [`Self::FIELD_NAMES`] order; the flag maps to 0 or 1.
    pub fn values(&self) -> [f64; 18] {
        [
            self.t,
            self.kinetic_energy,
            self.free_energy_total,
            self.dissipation_total,
            self.balance_residual,
            self.grad_u_inf,
            self.omega_lq,
            self.n_lq,
            self.y_pq,
            self.z_pq,
            self.tau_inf,
            self.sigma_inf,
            self.log_bound_ratio,
            self.total_mass,
            self.rho_dev,
            self.min_f,
            self.div_u_max,
            if self.positivity_flag { 1.0 } else { 0.0 },
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub total_mass: f64,
    /// `max |ρ_M − 1|`
    pub rho_dev: f64,
    pub min_f: f64,
    pub div_u_max: f64,
    pub positivity_flag: bool,
}

pub fn invariant_report(spectral: &Spectral2D, state: &State) -> InvariantReport {
    let rho = state.f.density();
    let min_f = state.f.min();
    InvariantReport {
        total_mass: rho.values().iter().sum::<f64>() * rho.grid().cell_area(),
        rho_dev: rho.values().iter().fold(0.0f64, |m, r| m.max((r - 1.0).abs())),
        min_f,
        div_u_max: spectral.divergence(&state.u.u1, &state.u.u2).max_abs(),
        positivity_flag: !(min_f > 0.0),
    }
}

/// `ω = ∂₁u₂ − ∂₂u₁`.
pub fn vorticity(spectral: &Spectral2D, u: &VelocityField) -> ScalarField2D {
    spectral.derivative(&u.u2, Axis::X1).sub(&spectral.derivative(&u.u1, Axis::X2))
}

pub fn vorticity_lq(spectral: &Spectral2D, u: &VelocityField, q: f64) -> f64 {
    lq_norm(&vorticity(spectral, u), q)
}

/// Spatial gradients of every orientation slice, θ-major like `f`.
fn slice_gradients(spectral: &Spectral2D, f: &DistributionField) -> [Vec<f64>; 2] {
    let np = f.grid().len();
    let nm = f.circle().nm();
    let mut packed = vec![0.0; 2 * np * nm];
    // per slice pair: ∂₁ of both, then ∂₂ of both
    par::for_each_chunk(&mut packed, 4 * np, |pair, out| {
        let b = 2 * pair;
        let z = spectral.forward_packed(f.slice(b), Some(f.slice(b + 1)));
        let (d1, d2) = out.split_at_mut(2 * np);
        for (axis, dst) in [(Axis::X1, d1), (Axis::X2, d2)] {
            let mut zz = z.clone();
            spectral.apply_symbol(&mut zz, |k1, k2| spectral.derivative_symbol(axis, k1, k2));
            let (lo, hi) = dst.split_at_mut(np);
            spectral.inverse_packed(zz, lo, Some(hi));
        }
    });
    let mut g1 = vec![0.0; np * nm];
    let mut g2 = vec![0.0; np * nm];
    for pair in 0..nm / 2 {
        let base = 4 * np * pair;
        for s in 0..2 {
            let b = 2 * pair + s;
            g1[b * np..(b + 1) * np].copy_from_slice(&packed[base + s * np..base + (s + 1) * np]);
            g2[b * np..(b + 1) * np].copy_from_slice(&packed[base + (2 + s) * np..base + (3 + s) * np]);
        }
    }
    [g1, g2]
}

/// `N(x) = (∫ |R ∇_x f|² dθ)^{1/2}` with `R = (I − ∂_θ²)^{−α/2}`.
pub fn capital_n(model: &Model, f: &DistributionField, alpha: f64) -> ScalarField2D {
    let grid = f.grid();
    let np = grid.len();
    let nm = f.circle().nm();
    let w = f.circle().weight();
    let [g1, g2] = slice_gradients(model.spectral(), f);
    let circle = model.circle();
    let vals = par::map_indices(np, |p| {
        let mut scratch = vec![ZERO; nm];
        let mut s = 0.0;
        for g in [&g1, &g2] {
            let mut prof: Vec<f64> = (0..nm).map(|b| g[b * np + p]).collect();
            circle.smooth_r_with(&mut prof, &mut scratch, alpha);
            s += prof.iter().map(|v| v * v).sum::<f64>();
        }
        (s * w).sqrt()
    });
    ScalarField2D::from_values(grid, vals).expect("N length")
}

/// Pointwise `|∇_x τ| = (Σ_{ijk} (∂_k τ_ij)²)^{1/2}`.
pub fn grad_tensor_norm(spectral: &Spectral2D, tau: &StressField) -> ScalarField2D {
    let grid = tau.grid();
    let mut acc = vec![0.0; grid.len()];
    for i in 0..2 {
        for j in 0..2 {
            for axis in [Axis::X1, Axis::X2] {
                let d = spectral.derivative(tau.get(i, j), axis);
                for (a, v) in acc.iter_mut().zip(d.values()) {
                    *a += v * v;
                }
            }
        }
    }
    ScalarField2D::from_values(grid, acc.into_iter().map(|v| v.sqrt()).collect()).expect("length")
}

/// Running `(∫₀ᵗ g(s)^p ds)^{1/p}` by the trapezoid rule on the samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAccumulator {
    p: f64,
    integral: f64,
    last: Option<(f64, f64)>,
}

impl PowerAccumulator {
    pub fn new(p: f64) -> Self {
        Self { p, integral: 0.0, last: None }
    }

    pub fn push(&mut self, t: f64, g: f64) -> f64 {
        let gp = g.abs().powf(self.p);
        if let Some((t0, g0)) = self.last {
            self.integral += 0.5 * (t - t0) * (g0 + gp);
        }
        self.last = Some((t, gp));
        self.value()
    }

    pub fn value(&self) -> f64 {
        self.integral.powf(1.0 / self.p)
    }
}

/// Cumulative accumulator values at every sample.
pub fn accumulate_power(times: &[f64], values: &[f64], p: f64) -> Vec<f64> {
    let mut acc = PowerAccumulator::new(p);
    times.iter().zip(values).map(|(&t, &g)| acc.push(t, g)).collect()
}

/// `Y_pq(t)` from samples of `‖∇_x τ(·,t)‖_{L^q}`.
pub fn accumulate_y(times: &[f64], grad_tau_lq: &[f64], p: f64) -> Vec<f64> {
    accumulate_power(times, grad_tau_lq, p)
}

/// `Z_pq(t)` from samples of `‖N(·,t)‖_{L^q}`.
pub fn accumulate_z(times: &[f64], n_lq: &[f64], p: f64) -> Vec<f64> {
    accumulate_power(times, n_lq, p)
}

/// `‖∇u‖_∞ / log(2 + Z_pq)`.
pub fn log_bound_ratio(grad_u_inf: f64, z_pq: f64) -> f64 {
    grad_u_inf / (2.0 + z_pq).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    /// Kinetic plus total free energy.
    pub energy_total: f64,
    /// `ν‖∇u‖² + κ ∫𝒟 dx`.
    pub dissipation_rate: f64,
}

/// `dE/dt + rate` at sample `k`: three-point centered difference in the
/// interior, one-sided at the ends, NaN for a single sample.
pub fn balance_residual(samples: &[EnergySample], k: usize) -> f64 {
    let n = samples.len();
    if n < 2 || k >= n {
        return f64::NAN;
    }
    let s = &samples[k];
    let de = if k == 0 {
        (samples[1].energy_total - s.energy_total) / (samples[1].t - s.t)
    } else if k == n - 1 {
        (s.energy_total - samples[k - 1].energy_total) / (s.t - samples[k - 1].t)
    } else {
        let (a, c) = (&samples[k - 1], &samples[k + 1]);
        let (h1, h2) = (s.t - a.t, c.t - s.t);
        -h2 / (h1 * (h1 + h2)) * a.energy_total
            + (h2 - h1) / (h1 * h2) * s.energy_total
            + h1 / (h2 * (h1 + h2)) * c.energy_total
    };
    de + s.dissipation_rate
}

/// Everything in a record that depends on the state alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSample {
    pub t: f64,
    pub kinetic_energy: f64,
    pub free_energy_total: f64,
    pub dissipation_total: f64,
    pub grad_u_inf: f64,
    pub grad_u_sq: f64,
    pub omega_lq: f64,
    pub n_lq: f64,
    pub grad_tau_lq: f64,
    pub tau_inf: f64,
    pub sigma_inf: f64,
    pub invariants: InvariantReport,
    pub entropy_floor_hit: bool,
}

impl StateSample {
    pub fn energy(&self, params: &ModelParams) -> EnergySample {
        EnergySample {
            t: self.t,
            energy_total: self.kinetic_energy + self.free_energy_total,
            dissipation_rate: params.nu * self.grad_u_sq + params.kappa * self.dissipation_total,
        }
    }
}

pub fn sample_state(model: &Model, state: &State, cfg: &MonitorConfig) -> StateSample {
    let sp = model.spectral();
    let ctx = model.flow_context(&state.u);
    let grad_u_inf = (0..model.grid().len()).fold(0.0f64, |m, p| {
        let s: f64 = ctx.grad.iter().flatten().map(|g| g.values()[p] * g.values()[p]).sum();
        m.max(s.sqrt())
    });
    let sigma = model.compute_stress(&state.f);
    let tau = model.tau(&state.u, &sigma);
    let fe = model.free_energy(&state.f);
    let dis = model.dissipation(&state.f);
    StateSample {
        t: state.t,
        kinetic_energy: kinetic_energy(&state.u),
        free_energy_total: fe.total,
        dissipation_total: dis.total,
        grad_u_inf,
        grad_u_sq: model.grad_u_squared(&ctx),
        omega_lq: vorticity_lq(sp, &state.u, cfg.q),
        n_lq: lq_norm(&capital_n(model, &state.f, cfg.alpha), cfg.q),
        grad_tau_lq: lq_norm(&grad_tensor_norm(sp, &tau), cfg.q),
        tau_inf: tau.max_entry_abs(),
        sigma_inf: sigma.max_entry_abs(),
        invariants: invariant_report(sp, state),
        entropy_floor_hit: fe.positivity_violated || dis.positivity_violated,
    }
}

/// Time-accumulated record fields, carried in checkpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct History {
    pub y_pq: f64,
    pub z_pq: f64,
    pub balance_residual: f64,
}

pub fn assemble_record(sample: &StateSample, history: &History) -> DiagnosticsRecord {
    let inv = &sample.invariants;
    DiagnosticsRecord {
        t: sample.t,
        kinetic_energy: sample.kinetic_energy,
        free_energy_total: sample.free_energy_total,
        dissipation_total: sample.dissipation_total,
        balance_residual: history.balance_residual,
        grad_u_inf: sample.grad_u_inf,
        omega_lq: sample.omega_lq,
        n_lq: sample.n_lq,
        y_pq: history.y_pq,
        z_pq: history.z_pq,
        tau_inf: sample.tau_inf,
        sigma_inf: sample.sigma_inf,
        log_bound_ratio: log_bound_ratio(sample.grad_u_inf, history.z_pq),
        total_mass: inv.total_mass,
        rho_dev: inv.rho_dev,
        min_f: inv.min_f,
        div_u_max: inv.div_u_max,
        positivity_flag: inv.positivity_flag || sample.entropy_floor_hit,
    }
}

/// A record whose balance residual is final, with the state it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct Finalized {
    pub record: DiagnosticsRecord,
    pub state: State,
}

/// Streams samples into records. The balance residual at a sample needs the
/// next one, so records are released one sample late.
#[derive(Debug, Clone)]
pub struct Monitor {
    cfg: MonitorConfig,
    y: PowerAccumulator,
    z: PowerAccumulator,
    energies: Vec<EnergySample>,
    pending: Option<(StateSample, History, State)>,
    k_max: f64,
    c_yz_max: f64,
}

impl Monitor {
    pub fn new(cfg: MonitorConfig) -> Self {
        Self {
            cfg,
            y: PowerAccumulator::new(cfg.p),
            z: PowerAccumulator::new(cfg.p),
            energies: Vec::new(),
            pending: None,
            k_max: 0.0,
            c_yz_max: 0.0,
        }
    }

    pub fn config(&self) -> &MonitorConfig {
        &self.cfg
    }

    /// Samples `state`; returns the previous record once it is complete.
    pub fn push(&mut self, model: &Model, state: &State) -> Option<Finalized> {
        let sample = sample_state(model, state, &self.cfg);
        let history = History {
            y_pq: self.y.push(sample.t, sample.grad_tau_lq),
            z_pq: self.z.push(sample.t, sample.n_lq),
            balance_residual: f64::NAN,
        };
        self.energies.push(sample.energy(model.params()));
        let out = self.release();
        self.pending = Some((sample, history, state.clone()));
        out
    }

    /// Releases the last pending record.
    pub fn finish(&mut self) -> Option<Finalized> {
        self.release()
    }

    fn release(&mut self) -> Option<Finalized> {
        let (sample, mut history, state) = self.pending.take()?;
        let n = self.energies.len();
        // the pending sample is the last one unless a newer one has arrived
        let k = if n >= 2 && self.energies[n - 1].t != sample.t { n - 2 } else { n - 1 };
        history.balance_residual = balance_residual(&self.energies, k);
        if self.energies.len() > 3 {
            self.energies.drain(..self.energies.len() - 3);
        }
        let record = assemble_record(&sample, &history);
        if record.log_bound_ratio.is_finite() {
            self.k_max = self.k_max.max(record.log_bound_ratio);
        }
        let zz = history.z_pq + history.z_pq * history.z_pq;
        if zz > 0.0 {
            self.c_yz_max = self.c_yz_max.max(history.y_pq / zz);
        }
        Some(Finalized { record, state })
    }

    /// Running maximum of the logarithmic gradient ratio.
    pub fn empirical_k(&self) -> f64 {
        self.k_max
    }

    /// Running maximum of `Y_pq / (Z_pq + Z_pq²)`.
    pub fn empirical_c_yz(&self) -> f64 {
        self.c_yz_max
    }
}

/// Both sides of the pointwise stress-gradient estimate
/// `|∇_x σ_ij(x)| ≤ A_ij(x) N(x)`, where
/// `A_ij = ‖R^{−1}(c_ij ∂_θU − ∂_θc_ij)‖_{L²} + sup|c_ij| ‖f‖_{L¹} ‖R^{−1}∂_θk‖_{L²}`.
#[derive(Debug, Clone)]
pub struct StressGradientBound {
    pub lhs: [[ScalarField2D; 2]; 2],
    pub rhs: [[ScalarField2D; 2]; 2],
}

impl StressGradientBound {
    /// Largest `lhs − rhs` over all entries and points.
    pub fn max_excess(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for i in 0..2 {
            for j in 0..2 {
                for (a, b) in self.lhs[i][j].values().iter().zip(self.rhs[i][j].values()) {
                    m = m.max(a - b);
                }
            }
        }
        m
    }
}

pub fn stress_gradient_bound(model: &Model, f: &DistributionField, alpha: f64) -> StressGradientBound {
    let sp = model.spectral();
    let grid = f.grid();
    let np = grid.len();
    let nm = f.circle().nm();
    let w = f.circle().weight();
    let circle = model.circle();
    let params = model.params();
    let sigma = model.compute_stress(f);
    let lhs = core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            let d1 = sp.derivative(sigma.get(i, j), Axis::X1);
            let d2 = sp.derivative(sigma.get(i, j), Axis::X2);
            d1.zip_map(&d2, |a, b| (a * a + b * b).sqrt())
        })
    });
    let n = capital_n(model, f, alpha);
    // ‖R^{−1}∂_θk(θ − ·)‖_{L²}, independent of θ
    let kernel_norm = {
        let s: f64 = params
            .kernel
            .cos_coeffs()
            .iter()
            .enumerate()
            .map(|(m, a)| {
                let m = m as f64;
                let v = m * a * (1.0 + m * m).powf(alpha / 2.0);
                v * v
            })
            .sum();
        (s * core::f64::consts::PI).sqrt()
    };
    let coef: Vec<[f64; 4]> = par::map_indices(np, |p| {
        let prof = f.point_profile(p);
        let mut u = vec![0.0; nm];
        let mut du = vec![0.0; nm];
        circle.potential_with_derivative(&prof, &params.kernel, &mut u, &mut du);
        let l1 = prof.iter().map(|v| v.abs()).sum::<f64>() * w;
        let mut out = [0.0; 4];
        for i in 0..2 {
            for j in 0..2 {
                let (c, dc) = (params.coeffs.c(i, j), params.coeffs.dc(i, j));
                let g: Vec<f64> = (0..nm).map(|b| c[b] * du[b] - dc[b]).collect();
                let rg = circle.unsmooth_r(&g, alpha);
                let a1 = (rg.iter().map(|v| v * v).sum::<f64>() * w).sqrt();
                let supc = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                out[2 * i + j] = a1 + supc * l1 * kernel_norm;
            }
        }
        out
    });
    let rhs = core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            let v = (0..np).map(|p| coef[p][2 * i + j] * n.values()[p]).collect();
            ScalarField2D::from_values(grid, v).expect("length")
        })
    });
    StressGradientBound { lhs, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{CircleGrid, InteractionKernel};
    use crate::spectral2d::GridSpec2D;
    use core::f64::consts::PI;

    fn model(nx: usize, nm: usize, b: f64) -> Model {
        let grid = GridSpec2D::new(nx).unwrap();
        let circle = CircleGrid::new(nm).unwrap();
        let mut params = ModelParams::rod_defaults(circle, 0.1, 0.1);
        params.kernel = InteractionKernel::maier_saupe(b).unwrap();
        Model::new(grid, circle, params).unwrap()
    }

    #[test]
    fn capital_n_examples() {
        let m = model(16, 16, 0.5);
        let (g, c) = (m.grid(), m.circle_grid());
        let uni = DistributionField::from_fn(g, c, |_, _, t| (1.0 + 0.5 * t.cos()) / (2.0 * PI));
        assert!(capital_n(&m, &uni, 2.0).max_abs() < 1e-15);

        for (eps, alpha) in [(0.3, 2.0), (0.6, 2.0), (0.3, 3.0)] {
            let f = DistributionField::from_fn(g, c, |x, _, t| (1.0 + eps * x.cos() * t.cos()) / (2.0 * PI));
            let n = capital_n(&m, &f, alpha);
            let want =
                ScalarField2D::from_fn(g, |x, _| 2f64.powf(-alpha / 2.0) * eps * x.sin().abs() / (2.0 * PI.sqrt()));
            assert!(n.sub(&want).max_abs() < 1e-13);
        }
    }

    #[test]
    fn accumulator_examples() {
        let ts: Vec<f64> = (0..=100).map(|k| k as f64 * 0.01).collect();
        assert!(accumulate_power(&ts, &vec![0.0; 101], 5.0).iter().all(|v| *v == 0.0));
        let c = 1.7;
        let y = accumulate_y(&ts, &vec![c; 101], 5.0);
        for (t, v) in ts.iter().zip(&y) {
            assert!((v - c * t.powf(0.2)).abs() < 1e-12);
        }
        // nondecreasing, and converges to the dense integral
        let g = |t: f64| 1.0 + t.sin();
        let dense = |t: f64| {
            let n = 200_000;
            let h = t / n as f64;
            let s: f64 = (0..n).map(|i| g((i as f64 + 0.5) * h).powi(5)).sum::<f64>() * h;
            s.powf(0.2)
        };
        let ts: Vec<f64> = (0..=1000).map(|k| k as f64 * 1e-3).collect();
        let z = accumulate_z(&ts, &ts.iter().map(|&t| g(t)).collect::<Vec<_>>(), 5.0);
        assert!(z.windows(2).all(|w| w[1] >= w[0]));
        assert!((z[1000] - dense(1.0)).abs() < 1e-6);
        assert!((z[500] - dense(0.5)).abs() < 1e-6);
    }

    #[test]
    fn vorticity_examples() {
        let sp = Spectral2D::new(GridSpec2D::new(16).unwrap());
        let g = sp.grid();
        assert_eq!(vorticity_lq(&sp, &VelocityField::zeros(g), 4.0), 0.0);
        let tg = crate::init::taylor_green(g, 1.0);
        let w = vorticity(&sp, &tg);
        let want = ScalarField2D::from_fn(g, |x, y| 2.0 * x.sin() * y.sin());
        assert!(w.sub(&want).max_abs() < 1e-13);
        assert!((vorticity_lq(&sp, &tg, 2.0) - 2.0 * PI).abs() < 1e-12);
        // u = (0, sin 3x₁) → ω = 3 cos 3x₁
        let u = VelocityField { u1: ScalarField2D::zeros(g), u2: ScalarField2D::from_fn(g, |x, _| (3.0 * x).sin()) };
        let want = ScalarField2D::from_fn(g, |x, _| 3.0 * (3.0 * x).cos());
        assert!(vorticity(&sp, &u).sub(&want).max_abs() < 1e-13);
    }

    #[test]
    fn balance_residual_weights() {
        let mk = |t: f64, e: f64| EnergySample { t, energy_total: e, dissipation_rate: 0.0 };
        assert!(balance_residual(&[mk(0.0, 1.0)], 0).is_nan());
        // exact for quadratics on uneven spacing
        let e = |t: f64| 3.0 * t * t - t + 2.0;
        let s = [mk(0.0, e(0.0)), mk(0.1, e(0.1)), mk(0.35, e(0.35))];
        assert!((balance_residual(&s, 1) - (6.0 * 0.1 - 1.0)).abs() < 1e-12);
        let s = [mk(0.0, 1.0), mk(0.5, 1.0)];
        assert_eq!(balance_residual(&s, 0), 0.0);
    }

    #[test]
    fn log_ratio_examples() {
        assert_eq!(log_bound_ratio(0.0, 3.0), 0.0);
        assert!((log_bound_ratio(2.0, 0.0) - 2.0 / 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn stationary_monitor_has_zero_residual() {
        let m = model(8, 16, 0.5);
        let (g, c) = (m.grid(), m.circle_grid());
        let mut mon = Monitor::new(MonitorConfig::from_params(m.params()).unwrap());
        let mut out = Vec::new();
        for k in 0..4 {
            let s = State { t: 0.1 * k as f64, u: VelocityField::zeros(g), f: DistributionField::uniform(g, c) };
            out.extend(mon.push(&m, &s));
        }
        out.extend(mon.finish());
        assert_eq!(out.len(), 4);
        for r in &out {
            assert!(r.record.balance_residual.abs() < 1e-12);
            assert!(r.record.is_finite());
            assert!((r.record.total_mass - 4.0 * PI * PI).abs() < 1e-11);
            assert!(!r.record.positivity_flag);
        }
        assert!((out[2].state.t - 0.2).abs() < 1e-15);
    }

    #[test]
    fn stress_gradient_estimate_holds() {
        let m = model(16, 32, 0.8);
        let (g, c) = (m.grid(), m.circle_grid());
        let f = DistributionField::from_fn(g, c, |x, y, t| {
            (1.0 + 0.4 * (x + t).cos() * y.sin() + 0.3 * (2.0 * t - y).sin() + 0.2 * (x - y).cos() * (2.0 * t).cos())
                / (2.0 * PI)
        });
        for alpha in [2.0, 3.0] {
            let b = stress_gradient_bound(&m, &f, alpha);
            assert!(b.max_excess() < 1e-12, "excess {}", b.max_excess());
            assert!(b.lhs[0][1].max_abs() > 1e-3);
        }
    }
}
