//! The mollified Navier–Stokes / nonlinear Fokker–Planck model: drift,
//! added stress, right-hand sides, pressure and energy functionals.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::circle::{CircleGrid, CircleOps, InteractionKernel, RodCoefficients};
use crate::error::{Error, Result};
use crate::fields::{DistributionField, StressField, VelocityField};
use crate::par;
use crate::spectral2d::{Axis, GridSpec2D, Mollifier, ScalarField2D, Spectral2D};

/// Lower clamp for `f` inside `f log f` and `1/f`.
pub const ENTROPY_FLOOR: f64 = 1e-14;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Kinematic viscosity ν.
    pub nu: f64,
    /// Microscopic diffusivity κ.
    pub kappa: f64,
    /// Mollification length δ; 0 disables mollification.
    pub delta: f64,
    pub kernel: InteractionKernel,
    pub coeffs: RodCoefficients,
    /// Order of the smoothing operator `R = (I − Δ_g)^{−α/2}`.
    pub alpha: f64,
    /// Spatial monitor exponent.
    pub q: f64,
    /// Temporal monitor exponent.
    pub p: f64,
}

impl ModelParams {
    /// Rod coefficients, Maier–Saupe strength 0.5, δ = 0, α = 2, q = 4, p = 5.
    pub fn rod_defaults(circle: CircleGrid, nu: f64, kappa: f64) -> Self {
        Self {
            nu,
            kappa,
            delta: 0.0,
            kernel: InteractionKernel::maier_saupe(0.5).expect("valid default"),
            coeffs: RodCoefficients::rod(circle),
            alpha: 2.0,
            q: 4.0,
            p: 5.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::param("nu", "viscosity must be positive"));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::param("kappa", "microscopic diffusivity must be positive"));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::param("delta", "mollification length must be nonnegative"));
        }
        validate_exponents(self.p, self.q, self.alpha)
    }
}

/// `q ≥ 4`, `p > 2q/(q − 2)`, `α > N/2 + 1 = 3/2`.
pub fn validate_exponents(p: f64, q: f64, alpha: f64) -> Result<()> {
    if !(q >= 4.0) {
        return Err(Error::param("q", "the spatial exponent requires q ≥ 4"));
    }
    let pmin = 2.0 * q / (q - 2.0);
    if !(p > pmin) {
        return Err(Error::param("p", alloc::format!("the time exponent requires p > 2q/(q−2) = {pmin}")));
    }
    if !(alpha > 1.5) {
        return Err(Error::param("alpha", "smoothing order requires α > N/2 + 1 = 3/2"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: VelocityField,
    pub f: DistributionField,
}

impl State {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.is_finite() && self.f.is_finite()
    }
}

/// `W(θ) = Σ_{ij} ∂u_i/∂x_j c_{ji}(θ)` at one point; `grad_u[i][j] = ∂u_i/∂x_j`.
pub fn compute_w(grad_u: &[[f64; 2]; 2], coeffs: &RodCoefficients) -> Vec<f64> {
    let mut w = vec![0.0; coeffs.c(0, 0).len()];
    accumulate_w(grad_u, coeffs, &mut w);
    w
}

fn accumulate_w(grad_u: &[[f64; 2]; 2], coeffs: &RodCoefficients, w: &mut [f64]) {
    w.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..2 {
        for j in 0..2 {
            let g = grad_u[i][j];
            if g == 0.0 {
                continue;
            }
            for (wv, c) in w.iter_mut().zip(coeffs.c(j, i)) {
                *wv += g * c;
            }
        }
    }
}

/// `½ ∫ |u|² dx`.
pub fn kinetic_energy(u: &VelocityField) -> f64 {
    0.5 * (u.u1.inner(&u.u1) + u.u2.inner(&u.u2))
}

/// Pointwise density of a θ-integrated functional plus its spatial integral.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldIntegral {
    pub field: ScalarField2D,
    pub total: f64,
    /// Some sample of `f` was at or below zero and was clamped.
    pub positivity_violated: bool,
}

/// Velocity-derived fields needed by the right-hand sides.
#[derive(Debug, Clone)]
pub struct FlowContext {
    /// `grad[i][j] = ∂u_i/∂x_j`
    pub grad: [[ScalarField2D; 2]; 2],
    /// `J_δ` applied to `grad`
    pub mgrad: [[ScalarField2D; 2]; 2],
    /// `J_δ u`
    pub mu: [ScalarField2D; 2],
}

/// Model operators bound to a grid. Immutable and shareable.
#[derive(Debug, Clone)]
pub struct Model {
    params: ModelParams,
    spectral: Spectral2D,
    circle: CircleOps,
    mollifier: Mollifier,
}

impl Model {
    pub fn new(grid: GridSpec2D, circle: CircleGrid, params: ModelParams) -> Result<Self> {
        params.validate()?;
        if params.coeffs.c(0, 0).len() != circle.nm() {
            return Err(Error::GridMismatch("coefficient samples differ from circle grid"));
        }
        if params.kernel.degree() >= circle.nm() / 2 || params.coeffs.degree() >= circle.nm() / 2 {
            return Err(Error::param("nm", "circle grid does not resolve kernel or coefficient modes"));
        }
        let spectral = Spectral2D::new(grid);
        let mollifier = spectral.mollifier(params.delta)?;
        Ok(Self { circle: CircleOps::new(circle, grid.dealias_fraction()), spectral, mollifier, params })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> GridSpec2D {
        self.spectral.grid()
    }

    pub fn circle_grid(&self) -> CircleGrid {
        self.circle.grid()
    }

    pub fn spectral(&self) -> &Spectral2D {
        &self.spectral
    }

    pub fn circle(&self) -> &CircleOps {
        &self.circle
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.mollifier
    }

    fn check_state(&self, u: &VelocityField, f: &DistributionField) {
        assert_eq!(u.grid(), self.grid(), "velocity grid mismatch");
        assert_eq!(f.grid(), self.grid(), "distribution grid mismatch");
        assert_eq!(f.circle(), self.circle_grid(), "circle grid mismatch");
    }

    pub fn flow_context(&self, u: &VelocityField) -> FlowContext {
        let sp = &self.spectral;
        let grid = self.grid();
        let z = sp.forward_packed(u.u1.values(), Some(u.u2.values()));
        let deriv = |z: &[Complex64], axis: Axis, mollify: bool| -> [ScalarField2D; 2] {
            let mut zz = z.to_vec();
            sp.apply_symbol(&mut zz, |k1, k2| sp.derivative_symbol(axis, k1, k2));
            if mollify {
                self.mollifier.apply_spectrum(&mut zz);
            }
            let mut a = ScalarField2D::zeros(grid);
            let mut b = ScalarField2D::zeros(grid);
            sp.inverse_packed(zz, a.values_mut(), Some(b.values_mut()));
            [a, b]
        };
        let [g11, g21] = deriv(&z, Axis::X1, false);
        let [g12, g22] = deriv(&z, Axis::X2, false);
        let grad = [[g11, g12], [g21, g22]];
        let (mgrad, mu) = if self.mollifier.is_identity() {
            (grad.clone(), [u.u1.clone(), u.u2.clone()])
        } else {
            let [m11, m21] = deriv(&z, Axis::X1, true);
            let [m12, m22] = deriv(&z, Axis::X2, true);
            let mut zz = z.clone();
            self.mollifier.apply_spectrum(&mut zz);
            let mut a = ScalarField2D::zeros(grid);
            let mut b = ScalarField2D::zeros(grid);
            sp.inverse_packed(zz, a.values_mut(), Some(b.values_mut()));
            ([[m11, m12], [m21, m22]], [a, b])
        };
        FlowContext { grad, mgrad, mu }
    }

    /// Added stress `σ_ij = ∫ (c_ij ∂_θU − ∂_θc_ij) f dθ`, pointwise in x.
    pub fn compute_stress(&self, f: &DistributionField) -> StressField {
        let grid = self.grid();
        let np = grid.len();
        let nm = self.circle_grid().nm();
        let w = self.circle_grid().weight();
        let coeffs = &self.params.coeffs;
        let kernel = &self.params.kernel;
        let mut packed = vec![0.0; np * 4];
        par::for_each_chunk(&mut packed, 4, |p, out| {
            let prof = f.point_profile(p);
            let mut u = vec![0.0; nm];
            let mut du = vec![0.0; nm];
            self.circle.potential_with_derivative(&prof, kernel, &mut u, &mut du);
            for i in 0..2 {
                for j in 0..2 {
                    let (c, dc) = (coeffs.c(i, j), coeffs.dc(i, j));
                    let s: f64 = (0..nm).map(|b| (c[b] * du[b] - dc[b]) * prof[b]).sum();
                    out[2 * i + j] = s * w;
                }
            }
        });
        let entries = core::array::from_fn(|i| {
            core::array::from_fn(|j| {
                let v = (0..np).map(|p| packed[4 * p + 2 * i + j]).collect();
                ScalarField2D::from_values(grid, v).expect("stress length")
            })
        });
        StressField::from_entries(entries)
    }

    /// `J_δ σ`.
    pub fn mollified_stress(&self, sigma: &StressField) -> StressField {
        if self.mollifier.is_identity() {
            return sigma.clone();
        }
        let entries =
            core::array::from_fn(|i| core::array::from_fn(|j| self.mollifier.apply(&self.spectral, sigma.get(i, j))));
        StressField::from_entries(entries)
    }

    /// `τ_ij = J_δσ_ij − u_iu_j`, pointwise.
    pub fn tau(&self, u: &VelocityField, sigma: &StressField) -> StressField {
        let js = self.mollified_stress(sigma);
        let entries = core::array::from_fn(|i| {
            core::array::from_fn(|j| {
                let uu = u.component(i).zip_map(u.component(j), |a, b| a * b);
                js.get(i, j).sub(&uu)
            })
        });
        StressField::from_entries(entries)
    }

    /// Explicit Fokker–Planck terms
    /// `−J_δu·∇_x f − ∂_θ(J_δ(W) f) + κ ∂_θ(f ∂_θU[f])`, dealiased.
    pub fn fp_explicit(&self, ctx: &FlowContext, f: &DistributionField) -> DistributionField {
        let grid = self.grid();
        let np = grid.len();
        let nm = self.circle_grid().nm();
        let sp = &self.spectral;
        let mu1 = ctx.mu[0].values();
        let mu2 = ctx.mu[1].values();

        // transport, slice pairs
        let mut adv = vec![0.0; np * nm];
        par::for_each_chunk(&mut adv, 2 * np, |pair, out| {
            let b = 2 * pair;
            let z = sp.forward_packed(f.slice(b), Some(f.slice(b + 1)));
            let mut d = [vec![0.0; np], vec![0.0; np], vec![0.0; np], vec![0.0; np]];
            for (axis, (lo, hi)) in [(Axis::X1, (0, 1)), (Axis::X2, (2, 3))] {
                let mut zz = z.clone();
                sp.apply_symbol(&mut zz, |k1, k2| sp.derivative_symbol(axis, k1, k2));
                let (first, rest) = d.split_at_mut(hi);
                sp.inverse_packed(zz, &mut first[lo], Some(&mut rest[0]));
            }
            let (o1, o2) = out.split_at_mut(np);
            for p in 0..np {
                o1[p] = mu1[p] * d[0][p] + mu2[p] * d[2][p];
                o2[p] = mu1[p] * d[1][p] + mu2[p] * d[3][p];
            }
        });

        // orientation flux divergence, per point
        let kappa = self.params.kappa;
        let mut flux = vec![0.0; np * nm];
        par::for_each_chunk(&mut flux, nm, |p, out| {
            let prof = f.point_profile(p);
            let mut u = vec![0.0; nm];
            let mut du = vec![0.0; nm];
            self.circle.potential_with_derivative(&prof, &self.params.kernel, &mut u, &mut du);
            let g = [
                [ctx.mgrad[0][0].values()[p], ctx.mgrad[0][1].values()[p]],
                [ctx.mgrad[1][0].values()[p], ctx.mgrad[1][1].values()[p]],
            ];
            accumulate_w(&g, &self.params.coeffs, out);
            for b in 0..nm {
                out[b] = out[b] * prof[b] - kappa * prof[b] * du[b];
            }
            let mut scratch = vec![ZERO; nm];
            self.circle.derivative_dealiased(out, &mut scratch);
        });

        let mut rhs = adv;
        for b in 0..nm {
            for p in 0..np {
                rhs[b * np + p] = -rhs[b * np + p] - flux[p * nm + b];
            }
        }
        par::for_each_chunk(&mut rhs, 2 * np, |_, out| {
            let (o1, o2) = out.split_at_mut(np);
            let mut z = sp.forward_packed(o1, Some(o2));
            sp.apply_symbol(&mut z, |k1, k2| Complex64::new(sp.dealias_factor(k1, k2), 0.0));
            sp.inverse_packed(z, o1, Some(o2));
        });
        DistributionField::from_raw(grid, self.circle_grid(), rhs)
    }

    /// Explicit Navier–Stokes terms `P(−u·∇u + div J_δσ)`, dealiased.
    pub fn ns_explicit(&self, ctx: &FlowContext, u: &VelocityField, sigma: &StressField) -> VelocityField {
        let grid = self.grid();
        let sp = &self.spectral;
        let nx = grid.nx();
        let (u1, u2) = (u.u1.values(), u.u2.values());
        let adv: [ScalarField2D; 2] = core::array::from_fn(|i| {
            let (g1, g2) = (ctx.grad[i][0].values(), ctx.grad[i][1].values());
            let v = (0..grid.len()).map(|p| u1[p] * g1[p] + u2[p] * g2[p]).collect();
            ScalarField2D::from_values(grid, v).expect("advection length")
        });
        let (a1, a2) = sp.forward_split(adv[0].values(), adv[1].values());
        let (s11, s12) = sp.forward_split(sigma.get(0, 0).values(), sigma.get(0, 1).values());
        let (s21, s22) = sp.forward_split(sigma.get(1, 0).values(), sigma.get(1, 1).values());
        let mut z = vec![ZERO; grid.len()];
        for m1 in 0..nx {
            let k1 = grid.wavenumber(m1);
            for m2 in 0..nx {
                let k2 = grid.wavenumber(m2);
                let idx = m1 * nx + m2;
                if (k1 == 0 && k2 == 0) || !grid.keeps_mode(k1, k2) {
                    continue;
                }
                let d1 = sp.derivative_symbol(Axis::X1, k1, k2);
                let d2 = sp.derivative_symbol(Axis::X2, k1, k2);
                let phi = self.mollifier.symbol_at(idx);
                let f1 = -a1[idx] + (d1 * s11[idx] + d2 * s12[idx]) * phi;
                let f2 = -a2[idx] + (d1 * s21[idx] + d2 * s22[idx]) * phi;
                let r1 = sp.riesz_symbol(Axis::X1, k1, k2);
                let r2 = sp.riesz_symbol(Axis::X2, k1, k2);
                let rf = r1 * f1 + r2 * f2;
                z[idx] = (f1 + r1 * rf) + Complex64::new(0.0, 1.0) * (f2 + r2 * rf);
            }
        }
        let mut out = VelocityField::zeros(grid);
        sp.inverse_packed(z, out.u1.values_mut(), Some(out.u2.values_mut()));
        out
    }

    /// Full `∂_t f` of the mollified system.
    pub fn fp_rhs(&self, state: &State) -> DistributionField {
        self.check_state(&state.u, &state.f);
        let ctx = self.flow_context(&state.u);
        let mut rhs = self.fp_explicit(&ctx, &state.f);
        let np = self.grid().len();
        let nm = self.circle_grid().nm();
        let kappa = self.params.kappa;
        for p in 0..np {
            let lap = self.circle.laplace_theta(&state.f.point_profile(p));
            for b in 0..nm {
                rhs.values_mut()[b * np + p] += kappa * lap[b];
            }
        }
        rhs
    }

    /// Full `∂_t u`: `P(−u·∇u + div J_δσ) + νΔu`.
    pub fn ns_rhs(&self, state: &State) -> VelocityField {
        self.check_state(&state.u, &state.f);
        let ctx = self.flow_context(&state.u);
        let sigma = self.compute_stress(&state.f);
        let mut rhs = self.ns_explicit(&ctx, &state.u, &sigma);
        let nu = self.params.nu;
        let l1 = self.spectral.laplacian(&state.u.u1);
        let l2 = self.spectral.laplacian(&state.u.u2);
        rhs.u1 = rhs.u1.add(&l1.scaled(nu));
        rhs.u2 = rhs.u2.add(&l2.scaled(nu));
        rhs
    }

    fn dealiased_tau(&self, state: &State) -> StressField {
        let sigma = self.compute_stress(&state.f);
        let tau = self.tau(&state.u, &sigma);
        let entries = core::array::from_fn(|i| core::array::from_fn(|j| self.spectral.dealias(tau.get(i, j))));
        StressField::from_entries(entries)
    }

    /// Pressure `p = −(−Δ)^{−1} ∂_i∂_j τ_ij`.
    pub fn pressure(&self, state: &State) -> ScalarField2D {
        let tau = self.dealiased_tau(state);
        let sp = &self.spectral;
        let mut acc = ScalarField2D::zeros(self.grid());
        for i in 0..2 {
            for j in 0..2 {
                let d = sp.derivative(&sp.derivative(tau.get(i, j), Axis::from_index(j)), Axis::from_index(i));
                acc = acc.add(&d);
            }
        }
        sp.inverse_neg_laplacian(&acc).scaled(-1.0)
    }

    /// The same pressure through Riesz transforms, `p = −R_iR_j τ_ij`.
    pub fn pressure_riesz(&self, state: &State) -> ScalarField2D {
        let tau = self.dealiased_tau(state);
        let sp = &self.spectral;
        let mut acc = ScalarField2D::zeros(self.grid());
        for i in 0..2 {
            for j in 0..2 {
                let r = sp.riesz(&sp.riesz(tau.get(i, j), Axis::from_index(j)), Axis::from_index(i));
                acc = acc.sub(&r);
            }
        }
        acc
    }

    /// Free energy density `ℰ[f] = ∫ (f log f + ½ f U[f]) dθ`.
    pub fn free_energy(&self, f: &DistributionField) -> FieldIntegral {
        let nm = self.circle_grid().nm();
        let w = self.circle_grid().weight();
        let vals = par::map_indices(self.grid().len(), |p| {
            let prof = f.point_profile(p);
            let u = self.circle.potential_u(&prof, &self.params.kernel);
            let mut bad = false;
            let mut s = 0.0;
            for b in 0..nm {
                if prof[b] <= 0.0 {
                    bad = true;
                }
                let fc = prof[b].max(ENTROPY_FLOOR);
                s += fc * fc.ln() + 0.5 * prof[b] * u[b];
            }
            (s * w, bad)
        });
        self.collect_integral(vals)
    }

    /// Dissipation density `𝒟[f] = ∫ |∂_θ(U[f] + log f)|² f dθ`.
    pub fn dissipation(&self, f: &DistributionField) -> FieldIntegral {
        let nm = self.circle_grid().nm();
        let w = self.circle_grid().weight();
        let vals = par::map_indices(self.grid().len(), |p| {
            let prof = f.point_profile(p);
            let mut u = vec![0.0; nm];
            let mut du = vec![0.0; nm];
            self.circle.potential_with_derivative(&prof, &self.params.kernel, &mut u, &mut du);
            let df = self.circle.grad_theta(&prof);
            let mut bad = false;
            let mut s = 0.0;
            for b in 0..nm {
                if prof[b] <= 0.0 {
                    bad = true;
                }
                let fc = prof[b].max(ENTROPY_FLOOR);
                let g = du[b] + df[b] / fc;
                s += g * g * fc;
            }
            (s * w, bad)
        });
        self.collect_integral(vals)
    }

    fn collect_integral(&self, vals: Vec<(f64, bool)>) -> FieldIntegral {
        let grid = self.grid();
        let positivity_violated = vals.iter().any(|v| v.1);
        let field = ScalarField2D::from_values(grid, vals.into_iter().map(|v| v.0).collect()).expect("integral length");
        let total = field.values().iter().sum::<f64>() * grid.cell_area();
        FieldIntegral { field, total, positivity_violated }
    }

    /// `‖∇u‖²_{L²} = Σ_ij ∫ (∂_j u_i)² dx`.
    pub fn grad_u_squared(&self, ctx: &FlowContext) -> f64 {
        ctx.grad.iter().flatten().map(|g| g.inner(g)).sum()
    }
}
