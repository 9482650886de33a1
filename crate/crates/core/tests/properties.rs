use std::f64::consts::PI;

use nsfp_core::circle::{CircleGrid, CircleOps, InteractionKernel};
use nsfp_core::spectral2d::{lq_norm, Axis, GridSpec2D, ScalarField2D, Spectral2D};
use nsfp_core::{DistributionField, Model, ModelParams, State, VelocityField};
use proptest::prelude::*;

fn field_from(grid: GridSpec2D, coeffs: &[(i64, i64, f64, f64)]) -> ScalarField2D {
    ScalarField2D::from_fn(grid, |x, y| {
        coeffs.iter().map(|&(k1, k2, a, ph)| a * (k1 as f64 * x + k2 as f64 * y + ph).cos()).sum()
    })
}

fn coeffs(kmax: i64) -> impl Strategy<Value = Vec<(i64, i64, f64, f64)>> {
    prop::collection::vec((-kmax..=kmax, -kmax..=kmax, -1.0..1.0f64, 0.0..2.0 * PI), 1..6)
}

fn profile(nm: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, nm)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval(c in coeffs(6)) {
        let sp = Spectral2D::new(GridSpec2D::new(16).unwrap());
        let f = field_from(sp.grid(), &c);
        let s = sp.forward(&f);
        let energy: f64 = s.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>() * 4.0 * PI * PI;
        prop_assert!((energy - f.inner(&f)).abs() < 1e-11 * (1.0 + energy));
    }

    #[test]
    fn multipliers_commute(c in coeffs(7)) {
        let sp = Spectral2D::new(GridSpec2D::new(16).unwrap());
        let f = field_from(sp.grid(), &c);
        let a = sp.riesz(&sp.derivative(&f, Axis::X2), Axis::X1);
        let b = sp.derivative(&sp.riesz(&f, Axis::X1), Axis::X2);
        prop_assert!(a.sub(&b).max_abs() < 1e-11);
        let m = sp.mollifier(0.3).unwrap();
        let a = m.apply(&sp, &sp.laplacian(&f));
        let b = sp.laplacian(&m.apply(&sp, &f));
        prop_assert!(a.sub(&b).max_abs() < 1e-10);
    }

    #[test]
    fn leray_idempotent_and_self_adjoint(c1 in coeffs(8), c2 in coeffs(8), c3 in coeffs(8)) {
        let sp = Spectral2D::new(GridSpec2D::new(16).unwrap());
        let g = sp.grid();
        let (v1, v2, w) = (field_from(g, &c1), field_from(g, &c2), field_from(g, &c3));
        let p = sp.leray_project(&v1, &v2);
        let pp = sp.leray_project(&p.u1, &p.u2);
        prop_assert!(pp.u1.sub(&p.u1).max_abs() < 1e-12 && pp.u2.sub(&p.u2).max_abs() < 1e-12);
        prop_assert!(sp.divergence(&p.u1, &p.u2).max_abs() < 1e-11);
        // ⟨Pv, w⟩ = ⟨v, Pw⟩ with w = (w, v₁)
        let q = sp.leray_project(&w, &v1);
        let lhs = p.u1.inner(&w) + p.u2.inner(&v1);
        let rhs = v1.inner(&q.u1) + v2.inner(&q.u2);
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn mollifier_contracts_and_converges(c in coeffs(8), d1 in 0.05..1.0f64, d2 in 0.05..1.0f64) {
        let sp = Spectral2D::new(GridSpec2D::new(32).unwrap());
        let f = field_from(sp.grid(), &c);
        let (small, large) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let a = sp.mollify(&f, small).unwrap();
        let b = sp.mollify(&f, large).unwrap();
        let l2 = |g: &ScalarField2D| lq_norm(g, 2.0);
        prop_assert!(l2(&a) <= l2(&f) * (1.0 + 1e-12));
        prop_assert!(l2(&a.sub(&f)) <= l2(&b.sub(&f)) * (1.0 + 1e-9) + 1e-14);
        prop_assert!((a.mean() - f.mean()).abs() < 1e-13);
    }

    #[test]
    fn lp_blocks_are_orthogonal_and_complete(c in coeffs(12)) {
        let sp = Spectral2D::new(GridSpec2D::new(32).unwrap());
        let f = field_from(sp.grid(), &c);
        let blocks = sp.lp_blocks(&f);
        let mut sum = ScalarField2D::constant(sp.grid(), f.mean());
        for (i, a) in blocks.iter().enumerate() {
            for b in &blocks[i + 1..] {
                prop_assert!(a.inner(b).abs() < 1e-10);
            }
            sum = sum.add(a);
        }
        prop_assert!(sum.sub(&f).max_abs() < 1e-12);
    }

    #[test]
    fn smoothing_is_self_adjoint(a in profile(32), b in profile(32), alpha in 1.6..4.0f64) {
        let ops = CircleOps::new(CircleGrid::new(32).unwrap(), 2.0 / 3.0);
        let lhs = dot(&ops.smooth_r(&a, alpha), &b);
        let rhs = dot(&a, &ops.smooth_r(&b, alpha));
        prop_assert!((lhs - rhs).abs() < 1e-12);
        let back = ops.unsmooth_r(&ops.smooth_r(&a, alpha), alpha);
        prop_assert!(back.iter().zip(&a).all(|(x, y)| (x - y).abs() < 1e-10));
    }

    #[test]
    fn potential_is_self_adjoint(a in profile(32), b in profile(32), s in -2.0..2.0f64) {
        let ops = CircleOps::new(CircleGrid::new(32).unwrap(), 2.0 / 3.0);
        let k = InteractionKernel::from_cos_series(vec![0.3, s, -0.7, 0.2]).unwrap();
        let lhs = dot(&ops.potential_u(&a, &k), &b);
        let rhs = dot(&a, &ops.potential_u(&b, &k));
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn fp_rhs_conserves_mass(cu in coeffs(3), cf in coeffs(3), b in 0.0..2.0f64, delta in 0.0..0.5f64) {
        let grid = GridSpec2D::new(16).unwrap();
        let circle = CircleGrid::new(16).unwrap();
        let mut params = ModelParams::rod_defaults(circle, 0.1, 0.2);
        params.kernel = InteractionKernel::maier_saupe(b).unwrap();
        params.delta = delta;
        let model = Model::new(grid, circle, params).unwrap();
        let sp = model.spectral();
        let psi = field_from(grid, &cu);
        let u = VelocityField { u1: sp.derivative(&psi, Axis::X2), u2: sp.derivative(&psi, Axis::X1).scaled(-1.0) };
        let pert = field_from(grid, &cf);
        let amp = 0.5 / (1.0 + pert.max_abs());
        let f = DistributionField::from_fn(grid, circle, |x, y, th| {
            let i1 = ((x / grid.spacing()).round() as usize) % 16;
            let i2 = ((y / grid.spacing()).round() as usize) % 16;
            (1.0 + amp * pert.at(i1, i2) * (2.0 * th + 0.3).cos()) / (2.0 * PI)
        });
        let state = State { t: 0.0, u, f };
        let rhs = model.fp_rhs(&state);
        prop_assert!(rhs.total_mass().abs() < 1e-12);
        let nrhs = model.ns_rhs(&state);
        prop_assert!(sp.divergence(&nrhs.u1, &nrhs.u2).max_abs() < 1e-11);
    }
}
