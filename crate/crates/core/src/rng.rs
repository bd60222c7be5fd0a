//! Reproducible sampling of test states and forms.
//!
//! Every stream is a ChaCha8 generator keyed by the user seed, with the
//! stream id selecting an independent sequence per suite. ChaCha is
//! counter-based, so other implementations can reproduce the same draws.

use crate::flow::PhaseState;
use crate::metric::{mat_inv, ChartPoint, MetricModel};
use crate::transform::{BumpPotential, Cutoff, PolyBumpForm, Trig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub type StateRng = ChaCha8Rng;

pub fn stream(seed: u64, id: u64) -> StateRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

fn random_y(rng: &mut StateRng, model: &MetricModel) -> [f64; 2] {
    let mut y = [0.0; 2];
    for v in y.iter_mut().take(model.m()) {
        *v = rng.gen::<f64>() * model.period;
    }
    y
}

/// Inward boundary ray `(0, y, 1, η)` with `|η|` in `[1, 10]`, so the ray stays well below the ceiling.
pub fn boundary_ray(rng: &mut StateRng, model: &MetricModel) -> PhaseState {
    let y = random_y(rng, model);
    let mag = rng.gen_range(1.0..10.0);
    let eta = if model.m() == 1 {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        [sign * mag, 0.0]
    } else {
        let a = rng.gen::<f64>() * 2.0 * PI;
        [mag * a.cos(), mag * a.sin()]
    };
    PhaseState::new(0.0, y, 1.0, eta)
}

/// Unit covector at angle `α` from `∂_x` and boundary direction `β`.
pub fn unit_state(model: &MetricModel, x: f64, y: [f64; 2], alpha: f64, beta: f64) -> PhaseState {
    let hinv = mat_inv(&model.h(x, &y));
    let dir = if model.m() == 1 { [1.0, 0.0] } else { [beta.cos(), beta.sin()] };
    let n = model.boundary_quad(&hinv, &dir).sqrt();
    let c = alpha.sin() / (x * n);
    PhaseState::new(x, y, alpha.cos(), [c * dir[0], c * dir[1]])
}

/// Fiber angle from `∂_x`, uniform among the directions whose geodesic
/// stays below half the ceiling (`|sin α| ≥ 2x / x_ceiling`), so that it
/// returns to the boundary.
fn exiting_angle(rng: &mut StateRng, model: &MetricModel, x: f64) -> f64 {
    let min_sin = (2.0 * x / model.x_ceiling).min(0.99);
    loop {
        let a = rng.gen::<f64>() * 2.0 * PI;
        if a.sin().abs() >= min_sin {
            return a;
        }
    }
}

/// Unit-speed interior state with `x` uniform in `[x_lo, x_hi]` and a
/// random fiber direction whose ray exits.
pub fn interior_state(rng: &mut StateRng, model: &MetricModel, x_lo: f64, x_hi: f64) -> PhaseState {
    let x = rng.gen_range(x_lo..x_hi);
    let y = random_y(rng, model);
    let alpha = exiting_angle(rng, model, x);
    let beta = rng.gen::<f64>() * 2.0 * PI;
    unit_state(model, x, y, alpha, beta)
}

/// Surface variant of [`interior_state`] parametrized by the fiber angle.
pub fn interior_surface_state(rng: &mut StateRng, model: &MetricModel, x_lo: f64, x_hi: f64) -> PhaseState {
    let x = rng.gen_range(x_lo..x_hi);
    let y = random_y(rng, model);
    let theta = exiting_angle(rng, model, x);
    let z = ChartPoint::new(x, y);
    let (xi, eta) = model.unit_fiber_point(&z, theta).expect("x > 0 on a surface model");
    PhaseState::new(x, y, xi, eta)
}

fn random_trig(rng: &mut StateRng, model: &MetricModel) -> Trig {
    let w = 2.0 * PI / model.period;
    let mut k = [0.0; 2];
    for v in k.iter_mut().take(model.m()) {
        *v = w * rng.gen_range(0..3) as f64;
    }
    Trig::new(rng.gen_range(-1.0..1.0), k, rng.gen::<f64>() * 2.0 * PI)
}

fn random_cutoff(rng: &mut StateRng) -> Cutoff {
    let lo = rng.gen_range(0.3..0.6);
    Cutoff::new(lo, lo + rng.gen_range(0.2..0.4))
}

/// Compactly supported form of vanishing order `k` with random coefficients.
pub fn poly_form(rng: &mut StateRng, model: &MetricModel, k: u32) -> PolyBumpForm {
    let t0 = random_trig(rng, model);
    let t1 = random_trig(rng, model);
    let t2 = if model.m() == 2 { random_trig(rng, model) } else { Trig::constant(0.0) };
    PolyBumpForm::new(k, [t0, t1, t2], random_cutoff(rng))
}

/// Boundary-vanishing potential `x^power e^{−x} χ T` with `power ≥ 1`.
pub fn potential(rng: &mut StateRng, model: &MetricModel) -> BumpPotential {
    let power = rng.gen_range(1..4);
    BumpPotential::new(power, random_trig(rng, model), random_cutoff(rng))
}
