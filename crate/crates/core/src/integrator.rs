//! Time stepping: integrating-factor IMEX schemes, the Picard iteration
//! for backward Euler, and the run loop.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::diagnostics::{DiagnosticsRecord, Finalized, Monitor, MonitorConfig};
use crate::error::{Error, Result};
use crate::fields::{DistributionField, VelocityField};
use crate::model::{compute_w, Model, State};
use crate::par;
use crate::spectral2d::ScalarField2D;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Integrating-factor forward Euler, order 1.
    ImexEuler,
    /// Integrating-factor Heun, order 2.
    IfRk2,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::ImexEuler => 1,
            Scheme::IfRk2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub cfl_safety: f64,
    pub t_end: f64,
    /// Steps between diagnostics records.
    pub diag_every: usize,
    /// Shrink steps to the CFL limit instead of failing.
    pub adaptive: bool,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self { dt: 1e-3, scheme: Scheme::IfRk2, cfl_safety: 0.5, t_end: 1.0, diag_every: 10, adaptive: false }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", "time step must be positive"));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::param("cfl_safety", "must lie in (0, 1]"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::param("t_end", "final time must be finite and nonnegative"));
        }
        if self.diag_every == 0 {
            return Err(Error::param("diag_every", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50 }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::param("tol", "Picard tolerance must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    Imex,
    Picard(PicardConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardOutcome {
    pub state: State,
    pub iterations: usize,
    /// Ratios of successive iterate differences.
    pub ratios: Vec<f64>,
}

// --- linear propagators -------------------------------------------------

fn velocity_multiplier(model: &Model, u: &VelocityField, symbol: impl Fn(f64) -> f64) -> VelocityField {
    let sp = model.spectral();
    let mut z = sp.forward_packed(u.u1.values(), Some(u.u2.values()));
    sp.apply_symbol(&mut z, |k1, k2| Complex64::new(symbol((k1 * k1 + k2 * k2) as f64), 0.0));
    sp.leray_in_place_packed(&mut z);
    let mut out = VelocityField::zeros(u.grid());
    sp.inverse_packed(z, out.u1.values_mut(), Some(out.u2.values_mut()));
    out
}

/// Applies a θ-multiplier to every orientation profile.
fn orientation_multiplier(
    f: &DistributionField,
    apply: impl Fn(&mut [f64], &mut [Complex64]) + Sync + Send,
) -> DistributionField {
    let nm = f.circle().nm();
    let mut pm = f.to_point_major();
    par::for_each_chunk(&mut pm, nm, |_, prof| {
        let mut scratch = vec![ZERO; nm];
        apply(prof, &mut scratch);
    });
    DistributionField::from_point_major(f.grid(), f.circle(), &pm).expect("same shape")
}

/// Exact linear flow over `dt`: `e^{νΔ dt}` on `u`, `e^{κ∂_θ² dt}` on `f`.
fn propagate(model: &Model, u: &VelocityField, f: &DistributionField, dt: f64) -> (VelocityField, DistributionField) {
    let (nu, kappa) = (model.params().nu, model.params().kappa);
    let circle = model.circle();
    (
        velocity_multiplier(model, u, |k2| (-nu * dt * k2).exp()),
        orientation_multiplier(f, |p, s| circle.heat_with(p, s, kappa * dt)),
    )
}

fn axpy_u(a: &VelocityField, s: f64, b: &VelocityField) -> VelocityField {
    VelocityField { u1: a.u1.zip_map(&b.u1, |x, y| x + s * y), u2: a.u2.zip_map(&b.u2, |x, y| x + s * y) }
}

fn axpy_f(a: &DistributionField, s: f64, b: &DistributionField) -> DistributionField {
    let mut out = a.clone();
    for (o, v) in out.values_mut().iter_mut().zip(b.values()) {
        *o += s * v;
    }
    out
}

/// Explicit parts of both right-hand sides.
fn explicit(model: &Model, u: &VelocityField, f: &DistributionField) -> (VelocityField, DistributionField) {
    let ctx = model.flow_context(u);
    let sigma = model.compute_stress(f);
    (model.ns_explicit(&ctx, u, &sigma), model.fp_explicit(&ctx, f))
}

fn check_finite(state: &State, step: u64) -> Result<()> {
    if !state.u.is_finite() {
        return Err(Error::NonFinite { field: "u", step, t: state.t });
    }
    if !state.f.is_finite() {
        return Err(Error::NonFinite { field: "f", step, t: state.t });
    }
    Ok(())
}

/// One integrating-factor step of length `dt`.
pub fn imex_step(model: &Model, state: &State, dt: f64, scheme: Scheme) -> Result<State> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", "time step must be positive"));
    }
    let (nu1, nf1) = explicit(model, &state.u, &state.f);
    let (u, f) = match scheme {
        Scheme::ImexEuler => propagate(model, &axpy_u(&state.u, dt, &nu1), &axpy_f(&state.f, dt, &nf1), dt),
        Scheme::IfRk2 => {
            let (ua, fa) = propagate(model, &axpy_u(&state.u, dt, &nu1), &axpy_f(&state.f, dt, &nf1), dt);
            let (nu2, nf2) = explicit(model, &ua, &fa);
            let (ub, fb) = propagate(model, &axpy_u(&state.u, 0.5 * dt, &nu1), &axpy_f(&state.f, 0.5 * dt, &nf1), dt);
            let u = axpy_u(&ub, 0.5 * dt, &nu2);
            let u = model.spectral().leray_project(&u.u1, &u.u2);
            (u, axpy_f(&fb, 0.5 * dt, &nf2))
        }
    };
    let next = State { t: state.t + dt, u, f };
    check_finite(&next, 0)?;
    Ok(next)
}

/// Backward Euler solved by the linearized fixed-point iteration: each pass
/// lags transport, drift and potential to the previous iterate and treats
/// both diffusions implicitly.
pub fn picard_step(model: &Model, state: &State, dt: f64, cfg: &PicardConfig) -> Result<PicardOutcome> {
    cfg.validate()?;
    if !(dt > 0.0) {
        return Err(Error::param("dt", "time step must be positive"));
    }
    let (nu, kappa) = (model.params().nu, model.params().kappa);
    let circle = model.circle();
    let (g, c) = (model.grid(), model.circle_grid());
    let weight = g.cell_area() * c.weight();
    let mut u = state.u.clone();
    let mut f = state.f.clone();
    let mut diffs: Vec<f64> = Vec::new();
    for it in 1..=cfg.max_iter {
        let ctx = model.flow_context(&u);
        let fe = model.fp_explicit(&ctx, &f);
        let f_new = orientation_multiplier(&axpy_f(&state.f, dt, &fe), |p, s| circle.resolvent_with(p, s, kappa * dt));
        let sigma = model.compute_stress(&f_new);
        let ne = model.ns_explicit(&ctx, &u, &sigma);
        let u_new = velocity_multiplier(model, &axpy_u(&state.u, dt, &ne), |k2| 1.0 / (1.0 + nu * dt * k2));
        let du = u_new.u1.sub(&u.u1).inner(&u_new.u1.sub(&u.u1)) + u_new.u2.sub(&u.u2).inner(&u_new.u2.sub(&u.u2));
        let df: f64 = f_new.values().iter().zip(f.values()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() * weight;
        let d = (du + df).sqrt();
        u = u_new;
        f = f_new;
        if !d.is_finite() {
            break;
        }
        diffs.push(d);
        if d < cfg.tol {
            let next = State { t: state.t + dt, u, f };
            check_finite(&next, 0)?;
            return Ok(PicardOutcome { state: next, iterations: it, ratios: contraction_ratios(&diffs) });
        }
    }
    Err(Error::PicardDiverged { iterations: cfg.max_iter, ratios: contraction_ratios(&diffs) })
}

fn contraction_ratios(diffs: &[f64]) -> Vec<f64> {
    diffs.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Advective and angular CFL limit, without the cap at `cfg.dt`.
pub fn cfl_limit(model: &Model, state: &State, cfl_safety: f64) -> f64 {
    let g = model.grid();
    let c = model.circle_grid();
    let umax = state.u.max_speed();
    let ctx = model.flow_context(&state.u);
    let wmax = (0..g.len()).fold(0.0f64, |m, p| {
        let grad = [
            [ctx.mgrad[0][0].values()[p], ctx.mgrad[0][1].values()[p]],
            [ctx.mgrad[1][0].values()[p], ctx.mgrad[1][1].values()[p]],
        ];
        compute_w(&grad, &model.params().coeffs).iter().fold(m, |m, w| m.max(w.abs()))
    });
    let adv = if umax > 0.0 { g.spacing() / umax } else { f64::INFINITY };
    let ang = if wmax > 0.0 { c.weight() / wmax } else { f64::INFINITY };
    cfl_safety * adv.min(ang)
}

/// `min(cfg.dt, cfl_safety · min(h/max|u|, Δθ/max|W|))`.
pub fn cfl_dt(model: &Model, state: &State, cfg: &StepperConfig) -> f64 {
    cfg.dt.min(cfl_limit(model, state, cfg.cfl_safety))
}

/// Receives each finished record with the state it describes.
pub trait RunObserver {
    fn on_record(&mut self, index: usize, finalized: &Finalized) -> Result<()>;
}

impl RunObserver for () {
    fn on_record(&mut self, _: usize, _: &Finalized) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub state: State,
    pub records: Vec<DiagnosticsRecord>,
    pub steps: u64,
    /// Largest divergence seen after any step.
    pub max_step_divergence: f64,
    /// Picard iteration counts, one per step.
    pub picard_iterations: Vec<usize>,
    pub empirical_k: f64,
    pub empirical_c_yz: f64,
}

/// Failed run with everything recorded before the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub error: Error,
    pub partial: RunOutput,
}

// The failure carries the partial run by value.
#[allow(clippy::result_large_err)]
pub fn run_simulation(
    model: &Model,
    init: State,
    cfg: &StepperConfig,
    solver: Solver,
    observer: &mut dyn RunObserver,
) -> core::result::Result<RunOutput, RunFailure> {
    let mcfg = MonitorConfig::from_params(model.params());
    let mut out = RunOutput {
        state: init.clone(),
        records: Vec::new(),
        steps: 0,
        max_step_divergence: 0.0,
        picard_iterations: Vec::new(),
        empirical_k: 0.0,
        empirical_c_yz: 0.0,
    };
    let fail = |error: Error, out: RunOutput| RunFailure { error, partial: out };
    let setup = cfg.validate().and(mcfg).and_then(|m| {
        if let Solver::Picard(p) = solver {
            p.validate()?;
        }
        Ok(m)
    });
    let mcfg = match setup {
        Ok(m) => m,
        Err(e) => return Err(fail(e, out)),
    };
    let mut monitor = Monitor::new(mcfg);
    let emit = |fin: Option<Finalized>, out: &mut RunOutput, observer: &mut dyn RunObserver| -> Result<()> {
        if let Some(fin) = fin {
            let idx = out.records.len();
            out.records.push(fin.record);
            observer.on_record(idx, &fin)?;
        }
        Ok(())
    };
    let mut state = init;
    if let Err(e) = emit(monitor.push(model, &state), &mut out, observer) {
        return Err(fail(e, out));
    }
    let nsteps = if cfg.adaptive { u64::MAX } else { (cfg.t_end / cfg.dt - 1e-9).ceil().max(0.0) as u64 };
    let sp = model.spectral();
    let mut step: u64 = 0;
    let result: Result<()> = loop {
        let remaining = cfg.t_end - state.t;
        if step >= nsteps || remaining <= 1e-12 * cfg.t_end.max(1.0) {
            break Ok(());
        }
        let limit = cfl_limit(model, &state, cfg.cfl_safety);
        let mut dt = cfg.dt;
        if cfg.adaptive {
            dt = dt.min(limit);
        } else if dt > limit {
            break Err(Error::Cfl { dt, limit });
        }
        let last = if cfg.adaptive { dt >= remaining } else { step + 1 == nsteps };
        if last {
            dt = remaining;
        }
        let next = match solver {
            Solver::Imex => imex_step(model, &state, dt, cfg.scheme),
            Solver::Picard(p) => picard_step(model, &state, dt, &p).map(|o| {
                out.picard_iterations.push(o.iterations);
                o.state
            }),
        };
        step += 1;
        let mut next = match next {
            Ok(s) => s,
            Err(Error::NonFinite { field, t, .. }) => break Err(Error::NonFinite { field, step, t }),
            Err(e) => break Err(e),
        };
        if last {
            next.t = cfg.t_end;
        }
        state = next;
        out.steps = step;
        let div = sp.divergence(&state.u.u1, &state.u.u2).max_abs();
        out.max_step_divergence = out.max_step_divergence.max(div);
        if step.is_multiple_of(cfg.diag_every as u64) || last {
            if let Err(e) = emit(monitor.push(model, &state), &mut out, observer) {
                break Err(e);
            }
        }
    };
    let flushed = emit(monitor.finish(), &mut out, observer);
    out.empirical_k = monitor.empirical_k();
    out.empirical_c_yz = monitor.empirical_c_yz();
    out.state = state;
    match result.and(flushed) {
        Ok(()) => Ok(out),
        Err(e) => Err(fail(e, out)),
    }
}

/// L² distance of two velocity fields.
pub fn velocity_distance(a: &VelocityField, b: &VelocityField) -> f64 {
    let d1: ScalarField2D = a.u1.sub(&b.u1);
    let d2 = a.u2.sub(&b.u2);
    (d1.inner(&d1) + d2.inner(&d2)).sqrt()
}
