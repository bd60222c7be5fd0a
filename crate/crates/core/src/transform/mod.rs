//! The integral function `u^f`, the X-ray transform `If` and the diagnostics
//! built on them.

pub mod cutoff;
pub mod forms;

use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::flow::{self, GeodesicPath, Integrands, IntegratorOptions, PhaseState, RayStatus};
use crate::metric::{mat_inv, ChartPoint, MetricModel};
use serde::Serialize;

pub use cutoff::Cutoff;
pub use forms::{
    gauge_correct, BumpPotential, Combination, Exact, FormJet, GaugeCorrected, GaugePotential, PolyBumpForm,
    ConstantForm, OneForm, ProfileDy, ScalarPotential, Trig, ZeroForm,
};

/// `λf = f₀ ξ + x² h^{ij} f_i η_j`.
pub fn lambda_eval(model: &MetricModel, f: &dyn OneForm, s: &PhaseState) -> f64 {
    let v = f.eval(s.x, &s.y);
    lambda_of_values(model, &v, s)
}

pub(crate) fn lambda_of_values(model: &MetricModel, v: &[f64; 3], s: &PhaseState) -> f64 {
    let m = model.m();
    let mut out = v[0] * s.xi;
    if s.x != 0.0 {
        let hinv = mat_inv(&model.h(s.x, &s.y));
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                acc += hinv[i][j] * v[1 + i] * s.eta[j];
            }
        }
        out += s.x * s.x * acc;
    }
    out
}

/// Checks that a traced ray covers the whole support of `f`.
fn complete(model: &MetricModel, f: &dyn OneForm, path: &GeodesicPath) -> Result<()> {
    match path.status {
        RayStatus::Exited | RayStatus::Stationary => Ok(()),
        RayStatus::Escaped => {
            let s = path.start();
            if s.eta.iter().all(|e| *e == 0.0) && f.support_x() <= model.x_ceiling {
                Ok(())
            } else {
                Err(Error::NoExit(RayStatus::Escaped))
            }
        }
        st => Err(Error::NoExit(st)),
    }
}

/// `u^f(s) = ∫₀^τ λf(φ_t s) dt` together with the traced path.
pub fn integral_function_path(
    model: &MetricModel,
    f: &dyn OneForm,
    s: &PhaseState,
    opts: &IntegratorOptions,
) -> Result<(GeodesicPath, f64)> {
    let (path, v) = flow::trace_with_integrand(model, s, opts, |st| lambda_eval(model, f, st))?;
    complete(model, f, &path)?;
    Ok((path, v))
}

pub fn integral_function(model: &MetricModel, f: &dyn OneForm, s: &PhaseState, opts: &IntegratorOptions) -> Result<f64> {
    integral_function_path(model, f, s, opts).map(|r| r.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformRecord {
    #[serde(skip)]
    pub ic: PhaseState,
    pub value: f64,
    pub tau: f64,
    pub quadrature_error_estimate: f64,
    pub status: RayStatus,
}

/// `If` for an inward boundary state `(0, y, ξ ≥ 0, η)`. The error estimate
/// is the change of the value when the tolerances are loosened a thousandfold.
pub fn xray(model: &MetricModel, f: &dyn OneForm, ic: &PhaseState, opts: &IntegratorOptions) -> Result<TransformRecord> {
    if ic.x != 0.0 || ic.xi < 0.0 {
        return Err(Error::InvalidOptions(
            "boundary initial condition needs x = 0 and ξ ≥ 0".into(),
        ));
    }
    let (path, value) = integral_function_path(model, f, ic, opts)?;
    if path.status == RayStatus::Stationary {
        return Ok(TransformRecord {
            ic: *ic,
            value: 0.0,
            tau: 0.0,
            quadrature_error_estimate: 0.0,
            status: RayStatus::Stationary,
        });
    }
    let loose = IntegratorOptions {
        rel_tol: opts.rel_tol * 1e3,
        abs_tol: opts.abs_tol * 1e3,
        ..*opts
    };
    let coarse = integral_function(model, f, ic, &loose)?;
    Ok(TransformRecord {
        ic: *ic,
        value,
        tau: path.t_end,
        quadrature_error_estimate: (coarse - value).abs(),
        status: path.status,
    })
}

/// State reached by flowing `t` units backwards.
fn flow_back(model: &MetricModel, s: &PhaseState, t: f64, opts: &IntegratorOptions) -> Result<PhaseState> {
    Ok(flow::flow_for(model, &s.reversed(), t, opts)?.reversed())
}

/// `|d/dt u^f(φ_t s)|_{t=0} + λf(s)|`, with the derivative taken by a
/// fourth-order symmetric difference of step `δ = 1e-3`.
pub fn transport_residual(model: &MetricModel, f: &dyn OneForm, s: &PhaseState, opts: &IntegratorOptions) -> Result<f64> {
    let d = 1e-3;
    let u = |t: f64| -> Result<f64> {
        let st = if t >= 0.0 {
            flow::flow_for(model, s, t, opts)?
        } else {
            flow_back(model, s, -t, opts)?
        };
        integral_function(model, f, &st, opts)
    };
    let du = (-u(2.0 * d)? + 8.0 * u(d)? - 8.0 * u(-d)? + u(-2.0 * d)?) / (12.0 * d);
    Ok((du + lambda_eval(model, f, s)).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OddSymmetry {
    pub forward: f64,
    pub backward: f64,
    pub full: f64,
    /// `u(z,ζ) − u(z,−ζ) − If`: the two half-rays glued together.
    pub concatenation_residual: f64,
    /// `u(z,ζ) + u(z,−ζ) − If`.
    pub sum_residual: f64,
}

/// Compares the two half-ray integrals through an interior state with the
/// transform along the whole geodesic.
pub fn odd_symmetry_check(model: &MetricModel, f: &dyn OneForm, s: &PhaseState, opts: &IntegratorOptions) -> Result<OddSymmetry> {
    let forward = integral_function(model, f, s, opts)?;
    let (back_path, backward) = integral_function_path(model, f, &s.reversed(), opts)?;
    if back_path.status != RayStatus::Exited {
        return Err(Error::NoExit(back_path.status));
    }
    let entry = back_path.end_state().reversed();
    let entry = PhaseState { x: 0.0, ..entry };
    let full = integral_function(model, f, &entry, opts)?;
    Ok(OddSymmetry {
        forward,
        backward,
        full,
        concatenation_residual: forward - backward - full,
        sum_residual: forward + backward - full,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub s: f64,
    pub value: f64,
    pub weight: f64,
    pub estimate: f64,
    pub true_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub y: [f64; 2],
    pub rows: Vec<ProbeRow>,
    pub extrapolated: f64,
    pub true_value: f64,
    /// Log-log slope of `|estimate − true|` against `s`; `None` when the
    /// errors sit at round-off for every `s`.
    pub error_slope: Option<f64>,
}

/// `h^{ij}(0,y) f_i(0,y) η_j`, the quantity recovered by the probe.
pub fn probe_target(model: &MetricModel, f: &dyn OneForm, y: &[f64; 2], eta: &[f64; 2]) -> f64 {
    let v = f.eval(0.0, y);
    let hinv = mat_inv(&model.h(0.0, y));
    let m = model.m();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            acc += hinv[i][j] * v[1 + i] * eta[j];
        }
    }
    acc
}

/// Relative size below which probe errors count as round-off.
pub const PROBE_NOISE_FLOOR: f64 = 1e-11;

/// Short-geodesic boundary probe: `If(γ_s) / ∫x(t)² dt` for each `s`,
/// extrapolated linearly in `s` from the two smallest values.
pub fn boundary_probe(
    model: &MetricModel,
    f: &dyn OneForm,
    y: [f64; 2],
    eta: [f64; 2],
    s_grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<ProbeReport> {
    let true_value = probe_target(model, f, &y, &eta);
    let mut rows = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let ic = PhaseState::new(0.0, y, s, eta);
        let aug = Integrands(|st: &PhaseState| [lambda_eval(model, f, st), st.x * st.x]);
        let path = flow::trace_augmented(model, &ic, &aug, &[0.0, 0.0], opts)?;
        complete(model, f, &path)?;
        let [value, weight] = [path.aug_end()[0], path.aug_end()[1]];
        rows.push(ProbeRow {
            s,
            value,
            weight,
            estimate: value / weight,
            true_value,
        });
    }
    let mut by_s: Vec<&ProbeRow> = rows.iter().collect();
    by_s.sort_by(|a, b| a.s.total_cmp(&b.s));
    let extrapolated = match by_s.as_slice() {
        [a, b, ..] => (b.s * a.estimate - a.s * b.estimate) / (b.s - a.s),
        [a] => a.estimate,
        [] => f64::NAN,
    };
    let scale = true_value.abs().max(rows.iter().fold(0.0f64, |m, r| m.max(r.estimate.abs()))).max(1e-300);
    let errs: Vec<f64> = rows.iter().map(|r| (r.estimate - true_value).abs()).collect();
    let above: Vec<f64> = errs.iter().map(|e| if *e > PROBE_NOISE_FLOOR * scale { *e } else { 0.0 }).collect();
    let ss: Vec<f64> = rows.iter().map(|r| r.s).collect();
    Ok(ProbeReport {
        y,
        error_slope: loglog_slope(&ss, &above),
        rows,
        extrapolated,
        true_value,
    })
}

/// Which fiber directions a rate fit takes the supremum over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiberSampling {
    /// `θ ∈ [π/2, 3π/2]`, i.e. `ξ ≤ 0`.
    Inward,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub k: u32,
    pub rows: Vec<(f64, f64)>,
    pub slope: Option<f64>,
}

/// Fits the decay exponent of `sup_θ |u^f(x₀, y, θ)|` against `x₀` for a
/// surface model.
pub fn vanishing_rate_fit(
    model: &MetricModel,
    f: &dyn OneForm,
    x0_grid: &[f64],
    ys: &[f64],
    n_theta: usize,
    fiber: FiberSampling,
    opts: &IntegratorOptions,
) -> Result<RateFit> {
    use std::f64::consts::PI;
    let thetas: Vec<f64> = (0..n_theta)
        .map(|j| match fiber {
            FiberSampling::Inward => PI / 2.0 + PI * j as f64 / (n_theta - 1).max(1) as f64,
            FiberSampling::Full => 2.0 * PI * j as f64 / n_theta as f64,
        })
        .collect();
    let mut rows = Vec::with_capacity(x0_grid.len());
    for &x0 in x0_grid {
        let mut sup: f64 = 0.0;
        for &y in ys {
            let z = ChartPoint::surface(x0, y);
            for &th in &thetas {
                let (xi, eta) = model.unit_fiber_point(&z, th)?;
                let s = PhaseState::new(x0, z.y, xi, eta);
                sup = sup.max(integral_function(model, f, &s, opts)?.abs());
            }
        }
        rows.push((x0, sup));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let us: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(RateFit {
        k: f.vanishing_order(),
        slope: loglog_slope(&xs, &us),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn opts() -> IntegratorOptions {
        IntegratorOptions::default()
    }

    fn pot() -> BumpPotential {
        BumpPotential::new(1, Trig::new(0.8, [2.0 * PI, 0.0], 0.4), Cutoff::new(0.4, 0.9))
    }

    #[test]
    fn lambda_examples() {
        let e = MetricModel::euclidean();
        let s = PhaseState::surface(0.3, 0.2, 0.7, 1.0);
        assert!((lambda_eval(&e, &ProfileDy::constant(1.0), &s) - 0.09).abs() < 1e-16);
        struct Dx;
        impl OneForm for Dx {
            fn eval(&self, _: f64, _: &[f64; 2]) -> [f64; 3] {
                [1.0, 0.0, 0.0]
            }
        }
        assert_eq!(lambda_eval(&MetricModel::perturbed(), &Dx, &s), 0.7);
    }

    // u^{dp}(z, ζ) = p(exit) − p(z) = −p(z)
    #[test]
    fn exact_form_integrates_to_minus_potential() {
        for model in [MetricModel::euclidean(), MetricModel::perturbed()] {
            let p = pot();
            let z = ChartPoint::surface(0.35, 0.6);
            for th in [0.3, 1.5, 2.5, 4.0] {
                let (xi, eta) = model.unit_fiber_point(&z, th).unwrap();
                let s = PhaseState::new(z.x, z.y, xi, eta);
                let u = integral_function(&model, &Exact(p), &s, &opts()).unwrap();
                assert!((u + p.p(z.x, &z.y)).abs() < 1e-8, "{th}: {u}");
            }
        }
    }

    #[test]
    fn x_squared_dy_closed_form() {
        // λ(x² dy) = x⁴η, ∫₀^π (s sin t)⁴ dt = 3πs⁴/8
        struct X2Dy;
        impl OneForm for X2Dy {
            fn eval(&self, x: f64, _: &[f64; 2]) -> [f64; 3] {
                [0.0, x * x, 0.0]
            }
        }
        let e = MetricModel::euclidean();
        let u = integral_function(&e, &X2Dy, &PhaseState::surface(0.0, 0.0, 0.1, 1.0), &opts()).unwrap();
        assert!((u - 1e-4 * 3.0 * PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn xray_examples() {
        let e = MetricModel::euclidean();
        let c = 1.7;
        let s = 0.05;
        let r = xray(&e, &ProfileDy::constant(c), &PhaseState::surface(0.0, 0.3, s, 1.0), &opts()).unwrap();
        assert!((r.value - c * s * s * PI / 2.0).abs() < 1e-13);
        assert!(r.quadrature_error_estimate < 1e-10);
        // support in (0.2, 0.4) is never reached by a ray of depth 0.05
        let deep = PolyBumpForm::dy(0, Trig::constant(1.0), Cutoff::new(0.3, 0.4));
        struct Shifted(PolyBumpForm);
        impl OneForm for Shifted {
            fn eval(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
                if x < 0.2 {
                    [0.0; 3]
                } else {
                    self.0.eval(x, y)
                }
            }
        }
        let r = xray(&e, &Shifted(deep), &PhaseState::surface(0.0, 0.3, s, 1.0), &opts()).unwrap();
        assert_eq!(r.value, 0.0);
        let r = xray(&e, &ProfileDy::constant(1.0), &PhaseState::surface(0.0, 0.3, 0.0, 1.0), &opts()).unwrap();
        assert_eq!((r.status, r.value), (RayStatus::Stationary, 0.0));
        assert!(xray(&e, &ZeroForm, &PhaseState::surface(0.1, 0.3, 0.5, 1.0), &opts()).is_err());
    }

    #[test]
    fn escaped_normal_ray_is_complete_for_supported_forms() {
        let e = MetricModel::euclidean();
        let p = pot();
        let s = PhaseState::surface(0.2, 0.1, 1.0, 0.0);
        let u = integral_function(&e, &Exact(p), &s, &opts()).unwrap();
        assert!((u + p.p(0.2, &[0.1, 0.0])).abs() < 1e-10);
        let err = integral_function(&e, &ProfileDy::constant(1.0), &s, &opts());
        assert!(matches!(err, Err(Error::NoExit(RayStatus::Escaped))));
    }

    #[test]
    fn transport_residual_small() {
        let model = MetricModel::perturbed();
        let f = PolyBumpForm::new(
            1,
            [Trig::new(0.5, [2.0 * PI, 0.0], 0.3), Trig::new(1.0, [2.0 * PI, 0.0], 1.0), Trig::constant(0.0)],
            Cutoff::new(0.5, 1.0),
        );
        let z = ChartPoint::surface(0.3, 0.4);
        let (xi, eta) = model.unit_fiber_point(&z, 2.0).unwrap();
        let s = PhaseState::new(z.x, z.y, xi, eta);
        assert!(transport_residual(&model, &f, &s, &opts()).unwrap() < 1e-6);
        assert!(transport_residual(&model, &ZeroForm, &s, &opts()).unwrap() == 0.0);
    }

    #[test]
    fn half_rays_concatenate_to_full_transform() {
        let model = MetricModel::perturbed();
        let f = PolyBumpForm::new(
            0,
            [Trig::new(0.5, [2.0 * PI, 0.0], 0.3), Trig::new(1.0, [2.0 * PI, 0.0], 1.0), Trig::constant(0.0)],
            Cutoff::new(0.5, 1.0),
        );
        let z = ChartPoint::surface(0.2, 0.4);
        let (xi, eta) = model.unit_fiber_point(&z, 1.2).unwrap();
        let r = odd_symmetry_check(&model, &f, &PhaseState::new(z.x, z.y, xi, eta), &opts()).unwrap();
        assert!(r.concatenation_residual.abs() < 1e-7);
        let r = odd_symmetry_check(&model, &Exact(pot()), &PhaseState::new(z.x, z.y, xi, eta), &opts()).unwrap();
        assert!(r.concatenation_residual.abs() < 1e-8);
    }

    #[test]
    fn probe_recovers_constant() {
        let e = MetricModel::euclidean();
        let c = 0.6;
        let r = boundary_probe(&e, &ProfileDy::constant(c), [0.2, 0.0], [1.0, 0.0], &[1e-1, 1e-2, 1e-3], &opts()).unwrap();
        for row in &r.rows {
            assert!((row.weight - row.s * row.s * PI / 2.0).abs() < 1e-12 * row.s * row.s + 1e-18);
            assert!((row.estimate - c).abs() < 1e-3 * c);
        }
        assert!((r.extrapolated - c).abs() < 1e-9);
    }

    #[test]
    fn probe_of_exact_form_vanishes() {
        let e = MetricModel::perturbed();
        let r = boundary_probe(&e, &Exact(pot()), [0.2, 0.0], [1.0, 0.0], &[1e-1, 1e-2], &opts()).unwrap();
        for row in &r.rows {
            assert!(row.value.abs() < 1e-9);
        }
        assert_eq!(r.true_value, 0.0);
    }

    #[test]
    fn gauge_correction_preserves_transform() {
        let model = MetricModel::perturbed();
        let f: Arc<dyn OneForm> = Arc::new(PolyBumpForm::new(
            0,
            [Trig::new(0.5, [2.0 * PI, 0.0], 0.3), Trig::new(1.0, [2.0 * PI, 0.0], 1.0), Trig::constant(0.0)],
            Cutoff::new(0.5, 1.0),
        ));
        let (_, ft) = gauge_correct(f.clone());
        for (y, s, eta) in [(0.1, 0.8, 1.5), (0.6, 0.4, -2.0), (0.3, 1.0, 0.7)] {
            let ic = PhaseState::surface(0.0, y, s, eta);
            let a = xray(&model, f.as_ref(), &ic, &opts()).unwrap().value;
            let b = xray(&model, &ft, &ic, &opts()).unwrap().value;
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }
}
