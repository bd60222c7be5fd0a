use gasgiant_core::pestov::{
    apply_v, bump, compact_test_field, fiber_identity_check, inner, pestov_residual, FlowDifferencer, PhaseField,
    PhaseGrid,
};
use gasgiant_core::{rng, MetricModel};
use proptest::prelude::*;
use std::f64::consts::PI;

fn random_compact_field(g: &PhaseGrid, c: [f64; 4]) -> PhaseField {
    let l = g.model.period;
    PhaseField::from_fn(g, move |x, y, t| {
        bump(x, 0.35, 0.85)
            * (1.0 + c[0] * (2.0 * PI * y / l).sin())
            * (c[1] + t.cos() + c[2] * (2.0 * t).sin() + c[3] * (3.0 * t + 2.0 * PI * y / l).cos())
    })
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-0.8..0.8f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn v_is_antisymmetric(a in coeffs(), b in coeffs()) {
        let g = PhaseGrid::new(&MetricModel::perturbed(), 0.2, 1.0, 12, 12, 16).unwrap();
        let u = random_compact_field(&g, a);
        let v = PhaseField::from_fn(&g, |x, y, t| (x + b[0] * y).sin() * (b[1] * t.cos() + b[2] * (4.0 * t).sin() + b[3]));
        let s = inner(&g, &apply_v(&g, &u), &v) + inner(&g, &u, &apply_v(&g, &v));
        prop_assert!(s.abs() < 1e-12, "{}", s);
    }

    #[test]
    fn curvature_term_is_nonpositive_and_inequality_holds(c in coeffs(), euclid in any::<bool>()) {
        let m = if euclid { MetricModel::euclidean() } else { MetricModel::perturbed() };
        let g = PhaseGrid::new(&m, 0.2, 1.0, 24, 24, 24).unwrap();
        let r = pestov_residual(&g, &random_compact_field(&g, c), false).unwrap();
        prop_assert!(r.curvature_term <= 0.0);
        prop_assert!(r.inequality_margin() >= -r.residual.abs(), "{:?}", r);
        prop_assert!(r.relative_residual < 1e-2, "{:?}", r);
    }

    #[test]
    fn fiber_identity_for_random_forms(seed in any::<u64>()) {
        let m = MetricModel::perturbed();
        let g = PhaseGrid::new(&m, 0.05, 1.5, 6, 6, 24).unwrap();
        let mut r = rng::stream(seed, 0);
        let f = rng::poly_form(&mut r, &m, 0);
        prop_assert!(fiber_identity_check(&g, &f).max_rel_error < 1e-12);
    }
}

#[test]
fn x_is_skew_under_refinement() {
    let m = MetricModel::perturbed();
    let skew = |n: usize| {
        let g = PhaseGrid::new(&m, 0.2, 1.0, n, n, n).unwrap();
        let x = FlowDifferencer::new(&g);
        let u = compact_test_field(&g);
        let v = random_compact_field(&g, [0.3, -0.2, 0.5, 0.1]);
        (inner(&g, &x.apply(&g, &u), &v) + inner(&g, &u, &x.apply(&g, &v))).abs()
    };
    let (a, b) = (skew(16), skew(32));
    assert!(b < a / 3.0 && b < 1e-3, "{a} {b}");
}

#[test]
fn grid_measure_matches_density_integral() {
    let m = MetricModel::euclidean();
    let g = PhaseGrid::new(&m, 0.2, 1.0, 401, 4, 4).unwrap();
    let exact = 2.0 * PI * m.period * 5f64.ln();
    assert!((g.total_measure() - exact).abs() < 1e-5 * exact);
}
