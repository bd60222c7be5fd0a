use gasgiant_core::rng;
use gasgiant_core::transform::{
    boundary_probe, gauge_correct, odd_symmetry_check, transport_residual, xray, Combination, Exact, OneForm,
    ScalarPotential,
};
use gasgiant_core::{IntegratorOptions, MetricModel};
use proptest::prelude::*;
use std::sync::Arc;

fn opts() -> IntegratorOptions {
    IntegratorOptions::default()
}

fn models() -> impl Strategy<Value = MetricModel> {
    prop_oneof![
        Just(MetricModel::euclidean()),
        Just(MetricModel::perturbed()),
        Just(MetricModel::torus3d()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn adding_an_exact_form_leaves_the_transform_unchanged(model in models(), seed in any::<u64>()) {
        let mut r = rng::stream(seed, 0);
        let ic = rng::boundary_ray(&mut r, &model);
        let f = Arc::new(rng::poly_form(&mut r, &model, 1));
        let p = Arc::new(Exact(rng::potential(&mut r, &model)));
        let sum = Combination::default().with(1.0, f.clone()).with(1.0, p);
        let a = xray(&model, f.as_ref(), &ic, &opts()).unwrap().value;
        let b = xray(&model, &sum, &ic, &opts()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-8, "{} {}", a, b);
    }

    #[test]
    fn gauge_correction_is_idempotent(model in models(), seed in any::<u64>(), x in 0.0..0.5f64, y in 0.0..1.0f64) {
        let mut r = rng::stream(seed, 0);
        let f: Arc<dyn OneForm> = Arc::new(rng::poly_form(&mut r, &model, 0));
        let (_, ft) = gauge_correct(f);
        let (q2, _) = gauge_correct(Arc::new(ft));
        let yy = [y * model.period, 0.3];
        prop_assert!(q2.p(x, &yy).abs() < 1e-12);
    }

    #[test]
    fn probe_is_linear(seed in any::<u64>(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let model = MetricModel::perturbed();
        let mut r = rng::stream(seed, 0);
        let f = Arc::new(rng::poly_form(&mut r, &model, 0));
        let g = Arc::new(rng::poly_form(&mut r, &model, 0));
        let s = [1e-1, 1e-2];
        let y = [0.3, 0.0];
        let eta = [1.0, 0.0];
        let pf = boundary_probe(&model, f.as_ref(), y, eta, &s, &opts()).unwrap();
        let pg = boundary_probe(&model, g.as_ref(), y, eta, &s, &opts()).unwrap();
        let comb = Combination::default().with(a, f).with(b, g);
        let pc = boundary_probe(&model, &comb, y, eta, &s, &opts()).unwrap();
        for ((rf, rg), rc) in pf.rows.iter().zip(&pg.rows).zip(&pc.rows) {
            let want = a * rf.estimate + b * rg.estimate;
            let scale = (a * rf.estimate).abs() + (b * rg.estimate).abs() + 1e-300;
            prop_assert!((rc.estimate - want).abs() <= 1e-10 * scale, "{} {}", rc.estimate, want);
        }
    }

    #[test]
    fn transport_equation_holds(model in models(), seed in any::<u64>()) {
        let mut r = rng::stream(seed, 0);
        let s = rng::interior_state(&mut r, &model, 0.05, 0.6);
        let f = rng::poly_form(&mut r, &model, 1);
        prop_assert!(transport_residual(&model, &f, &s, &opts()).unwrap() < 1e-6);
    }

    #[test]
    fn half_rays_glue_to_the_full_transform(model in models(), seed in any::<u64>()) {
        let mut r = rng::stream(seed, 0);
        let s = rng::interior_state(&mut r, &model, 0.05, 0.6);
        let f = rng::poly_form(&mut r, &model, 0);
        let o = odd_symmetry_check(&model, &f, &s, &opts()).unwrap();
        prop_assert!(o.concatenation_residual.abs() < 1e-7, "{:?}", o);
    }
}
