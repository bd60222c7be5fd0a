//! Measurement drivers behind the command-line suites and the acceptance
//! target. Each driver returns raw measurements; callers own the thresholds.

use crate::error::{Error, Result};
use crate::flow::{self, IntegratorOptions, PhaseState, RayStatus, ShortGeodesicReport};
use crate::jacobi::{self, Direction, JacobiBoundsReport};
use crate::metric::{mat_inv, ChartPoint, MetricModel};
use crate::pestov::{self, FiberRow, PestovReport, PhaseField, PhaseGrid};
use crate::rng;
use crate::transform::forms::{ConstantForm, OneForm};
use crate::transform::{
    self, boundary_probe, gauge_correct, xray, BumpPotential, Cutoff, Exact, FiberSampling, PolyBumpForm,
    ProbeReport, ProfileDy, RateFit, Trig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn par_map<T: Sync, R: Send>(parallel: bool, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

fn collect_results<R>(v: Vec<Result<R>>) -> Result<Vec<R>> {
    v.into_iter().collect()
}

/// Log-spaced grid from `lo` to `hi` with `n` points.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

// Stream ids keep suites independent of each other for a fixed seed.
const STREAM_RAYS: u64 = 1;
const STREAM_GAUGE: u64 = 2;
const STREAM_TRANSPORT: u64 = 3;
const STREAM_GRADIENT: u64 = 4;
const STREAM_CHART: u64 = 5;
const STREAM_FIBER: u64 = 6;

// ---------------------------------------------------------------- trace

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayDrift {
    pub model: &'static str,
    pub index: usize,
    pub ic: PhaseState,
    /// State where integration stopped; the exit point for exited rays.
    pub end: PhaseState,
    pub status: RayStatus,
    pub tau: f64,
    pub h_drift: f64,
    pub h0_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftSummary {
    pub model: &'static str,
    pub rays: usize,
    pub max_h_drift: f64,
    pub max_h0_drift: f64,
}

/// Traces `n_rays` random boundary rays and records the relative drift of
/// `H` and of `h₀ = h(0, y)^{-1}(η, η)`.
pub fn conservation_sweep(
    model: &MetricModel,
    n_rays: usize,
    seed: u64,
    opts: &IntegratorOptions,
    parallel: bool,
) -> Result<(Vec<RayDrift>, DriftSummary)> {
    let mut r = rng::stream(seed, STREAM_RAYS);
    let ics: Vec<(usize, PhaseState)> = (0..n_rays).map(|i| (i, rng::boundary_ray(&mut r, model))).collect();
    let rows = collect_results(par_map(parallel, &ics, |(i, ic)| {
        let p = flow::trace(model, ic, opts)?;
        Ok(RayDrift {
            model: model.name(),
            index: *i,
            ic: *ic,
            end: p.end_state(),
            status: p.status,
            tau: p.tau.unwrap_or(f64::NAN),
            h_drift: p.h_drift,
            h0_drift: p.h0_drift,
        })
    }))?;
    let summary = DriftSummary {
        model: model.name(),
        rays: rows.len(),
        max_h_drift: rows.iter().fold(0.0, |a, r| a.max(r.h_drift)),
        max_h0_drift: rows.iter().fold(0.0, |a, r| a.max(r.h0_drift)),
    };
    Ok((rows, summary))
}

/// Short geodesics `(0, y, s, η)` with `η = 1`; in the Euclidean model the
/// exit time is `π` and the length `sπ`.
pub fn short_geodesics(model: &MetricModel, y: f64, s_grid: &[f64], opts: &IntegratorOptions) -> Result<ShortGeodesicReport> {
    flow::short_geodesic_suite(model, [y, 0.0], [1.0, 0.0], s_grid, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub x0: f64,
    pub tau: f64,
    /// `|τ − x₀|`.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub model: &'static str,
    pub rows: Vec<AsymptoticRow>,
    pub slope: Option<f64>,
}

/// Exit times of inward unit states with `η = 1` at depth `x₀`.
pub fn exit_time_asymptotics(model: &MetricModel, y: f64, x0_grid: &[f64], opts: &IntegratorOptions) -> Result<AsymptoticReport> {
    let mut rows = Vec::with_capacity(x0_grid.len());
    for &x0 in x0_grid {
        let yy = [y, 0.0];
        let hinv = mat_inv(&model.h(x0, &yy));
        let q = x0 * x0 * model.boundary_quad(&hinv, &[1.0, 0.0]);
        if q >= 1.0 {
            return Err(Error::InvalidOptions(format!("x0 = {x0} is too deep for a unit covector with eta = 1")));
        }
        let ic = PhaseState::new(x0, yy, -(1.0 - q).sqrt(), [1.0, 0.0]);
        let tau = flow::exit_time(model, &ic, opts)?;
        rows.push(AsymptoticRow { x0, tau, excess: (tau - x0).abs() });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.x0).collect();
    let es: Vec<f64> = rows.iter().map(|r| r.excess).collect();
    Ok(AsymptoticReport {
        model: model.name(),
        slope: crate::fit::loglog_slope(&xs, &es),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartEquationSummary {
    pub rays: usize,
    pub samples: usize,
    pub max_xi_residual: f64,
    pub max_rel_xdd_residual: f64,
    pub max_rel_xdd_residual_flipped: f64,
}

/// Evolution-formula residuals along random Euclidean boundary rays.
pub fn chart_equation_sweep(n_rays: usize, seed: u64, opts: &IntegratorOptions) -> Result<ChartEquationSummary> {
    let model = MetricModel::euclidean();
    let mut r = rng::stream(seed, STREAM_CHART);
    let mut out = ChartEquationSummary {
        rays: n_rays,
        samples: 0,
        max_xi_residual: 0.0,
        max_rel_xdd_residual: 0.0,
        max_rel_xdd_residual_flipped: 0.0,
    };
    for _ in 0..n_rays {
        let ic = rng::boundary_ray(&mut r, &model);
        let t = flow::verify_chart_equations(&model, &flow::trace(&model, &ic, opts)?)?;
        out.samples += t.samples;
        out.max_xi_residual = out.max_xi_residual.max(t.max_xi_residual);
        out.max_rel_xdd_residual = out.max_rel_xdd_residual.max(t.max_rel_xdd_residual);
        out.max_rel_xdd_residual_flipped = out.max_rel_xdd_residual_flipped.max(t.max_rel_xdd_residual_flipped);
    }
    Ok(out)
}

// ------------------------------------------------------------ transform

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeRow {
    pub index: usize,
    pub y0: f64,
    pub eta0: f64,
    /// `I(dp)` for a boundary-vanishing potential `p`.
    pub exact_transform: f64,
    pub transform: f64,
    pub corrected_transform: f64,
    /// `|I(f) − I(f − dq)|`.
    pub gauge_difference: f64,
}

pub fn gauge_sweep(model: &MetricModel, n_rays: usize, seed: u64, opts: &IntegratorOptions, parallel: bool) -> Result<Vec<GaugeRow>> {
    let mut r = rng::stream(seed, STREAM_GAUGE);
    let cases: Vec<_> = (0..n_rays)
        .map(|i| {
            let ic = rng::boundary_ray(&mut r, model);
            let p = rng::potential(&mut r, model);
            let k = rand::Rng::gen_range(&mut r, 0..3);
            let f = rng::poly_form(&mut r, model, k);
            (i, ic, p, f)
        })
        .collect();
    collect_results(par_map(parallel, &cases, |(i, ic, p, f)| {
        let exact_transform = xray(model, &Exact(*p), ic, opts)?.value;
        let f: std::sync::Arc<dyn OneForm> = std::sync::Arc::new(*f);
        let (_, ft) = gauge_correct(f.clone());
        let transform = xray(model, f.as_ref(), ic, opts)?.value;
        let corrected_transform = xray(model, &ft, ic, opts)?.value;
        Ok(GaugeRow {
            index: *i,
            y0: ic.y[0],
            eta0: ic.eta[0],
            exact_transform,
            transform,
            corrected_transform,
            gauge_difference: (transform - corrected_transform).abs(),
        })
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportRow {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub xi: f64,
    pub k: u32,
    pub residual: f64,
}

/// `|Xu^f + λf|` at random unit interior states with random forms.
pub fn transport_sweep(model: &MetricModel, n_states: usize, seed: u64, opts: &IntegratorOptions, parallel: bool) -> Result<Vec<TransportRow>> {
    let mut r = rng::stream(seed, STREAM_TRANSPORT);
    let cases: Vec<_> = (0..n_states)
        .map(|i| {
            let s = rng::interior_state(&mut r, model, 0.05, 0.6);
            let k = rand::Rng::gen_range(&mut r, 0..3);
            (i, s, k, rng::poly_form(&mut r, model, k))
        })
        .collect();
    collect_results(par_map(parallel, &cases, |(i, s, k, f)| {
        Ok(TransportRow {
            index: *i,
            x: s.x,
            y: s.y[0],
            xi: s.xi,
            k: *k,
            residual: transform::transport_residual(model, f, s, opts)?,
        })
    }))
}

fn rate_trig(model: &MetricModel, amp: f64, phase: f64) -> Trig {
    Trig::new(amp, [2.0 * PI / model.period, 0.0], phase)
}

/// Generic order-`k` form used by the rate and probe suites.
pub fn order_k_form(model: &MetricModel, k: u32) -> PolyBumpForm {
    PolyBumpForm::new(
        k,
        [rate_trig(model, 0.7, 0.3), rate_trig(model, 1.0, 1.1), Trig::constant(0.0)],
        Cutoff::new(0.5, 1.0),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledRateFit {
    /// `inward` for a generic order-`k` form on the inward hemisphere,
    /// `exact` for `d(x^{k+1}…)` over the whole fiber.
    pub family: &'static str,
    pub fit: RateFit,
}

pub fn vanishing_rates(
    model: &MetricModel,
    orders: &[u32],
    x0_grid: &[f64],
    n_theta: usize,
    opts: &IntegratorOptions,
    parallel: bool,
) -> Result<Vec<LabeledRateFit>> {
    let ys = [0.1, 0.45, 0.8].map(|t| t * model.period);
    let jobs: Vec<(u32, bool)> = orders.iter().flat_map(|&k| [(k, false), (k, true)]).collect();
    collect_results(par_map(parallel, &jobs, |&(k, exact)| {
        let fit = if exact {
            let p = BumpPotential::new(k + 1, rate_trig(model, 0.8, 0.2), Cutoff::new(0.5, 1.0));
            transform::vanishing_rate_fit(model, &Exact(p), x0_grid, &ys, n_theta, FiberSampling::Full, opts)?
        } else {
            let f = order_k_form(model, k);
            transform::vanishing_rate_fit(model, &f, x0_grid, &ys, n_theta, FiberSampling::Inward, opts)?
        };
        Ok(LabeledRateFit {
            family: if exact { "exact" } else { "inward" },
            fit: RateFit { k, ..fit },
        })
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeStudy {
    /// Euclidean `c dy`.
    pub constant: ProbeReport,
    /// Euclidean `c(1 + x)(1 + ½cos 2πy) dy`.
    pub profile: ProbeReport,
    /// Order-`k` forms on the suite model; these probe to 0.
    pub vanishing: Vec<(u32, ProbeReport)>,
}

pub fn probe_study(model: &MetricModel, c: f64, y: f64, s_grid: &[f64], orders: &[u32], opts: &IntegratorOptions) -> Result<ProbeStudy> {
    let e = MetricModel::euclidean();
    let yy = [y, 0.0];
    let eta = [1.0, 0.0];
    let constant = boundary_probe(&e, &ProfileDy::constant(c), yy, eta, s_grid, opts)?;
    let prof = ProfileDy {
        c,
        a: 1.0,
        b: 0.5,
        kappa: 2.0 * PI / e.period,
    };
    let profile = boundary_probe(&e, &prof, yy, eta, s_grid, opts)?;
    let mut vanishing = Vec::new();
    for &k in orders {
        vanishing.push((k, boundary_probe(model, &order_k_form(model, k), yy, eta, s_grid, opts)?));
    }
    Ok(ProbeStudy { constant, profile, vanishing })
}

// --------------------------------------------------------------- jacobi

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientRow {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub k: u32,
    pub direction: Direction,
    pub jacobi: f64,
    pub exterior: f64,
    pub finite_difference: f64,
    pub rel_error: f64,
    pub exterior_rel_error: f64,
}

/// Gradients below this size are compared in absolute terms.
pub const GRADIENT_FLOOR: f64 = 1e-6;

pub fn gradient_sweep(
    model: &MetricModel,
    n_states: usize,
    seed: u64,
    fd_step: f64,
    opts: &IntegratorOptions,
    parallel: bool,
) -> Result<Vec<GradientRow>> {
    let mut r = rng::stream(seed, STREAM_GRADIENT);
    let cases: Vec<_> = (0..n_states)
        .map(|i| {
            let s = rng::interior_surface_state(&mut r, model, 0.15, 0.45);
            let k = rand::Rng::gen_range(&mut r, 1..4);
            (i, s, k, rng::poly_form(&mut r, model, k))
        })
        .collect();
    let rows = collect_results(par_map(parallel, &cases, |(i, s, k, f)| {
        let theta = model.fiber_angle(&s.z(), s.xi, &s.eta);
        let mut out = Vec::new();
        for dir in [Direction::Vertical, Direction::Horizontal] {
            let dw = dir.at(model, s)?;
            let g = jacobi::grad_uf_via_jacobi(model, f, s, &dw, opts)?;
            // Richardson-extrapolated central differences, O(h⁴)
            let coarse = jacobi::fd_gradient(model, f, s, &dw, fd_step, opts)?;
            let fine = jacobi::fd_gradient(model, f, s, &dw, 0.5 * fd_step, opts)?;
            let fd = (4.0 * fine - coarse) / 3.0;
            let scale = fd.abs().max(GRADIENT_FLOOR);
            out.push(GradientRow {
                index: *i,
                x: s.x,
                y: s.y[0],
                theta,
                k: *k,
                direction: dir,
                jacobi: g.jacobi_value,
                exterior: g.exterior_value,
                finite_difference: fd,
                rel_error: (g.jacobi_value - fd).abs() / scale,
                exterior_rel_error: (g.exterior_value - fd).abs() / scale,
            });
        }
        Ok(out)
    }))?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn jacobi_bounds(model: &MetricModel, x0_grid: &[f64], thetas: &[f64], y: f64, opts: &IntegratorOptions) -> Result<JacobiBoundsReport> {
    jacobi::jacobi_bounds_report(model, x0_grid, thetas, y, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitGradientRow {
    pub x: f64,
    pub theta: f64,
    pub tau: f64,
    pub along_x: f64,
    pub sweep: &'static str,
    pub h: f64,
    pub difference: f64,
    pub slope: Option<f64>,
}

/// Exit-time perturbation study at surface states `(x, θ)` with `y = 0`.
pub fn exit_gradient_study(
    model: &MetricModel,
    states: &[(f64, f64)],
    h_grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<(f64, f64, jacobi::ExitGradientReport)>> {
    let mut out = Vec::new();
    for &(x, th) in states {
        let z = ChartPoint::surface(x, 0.0);
        let (xi, eta) = model.unit_fiber_point(&z, th)?;
        let s = PhaseState::new(x, z.y, xi, eta);
        out.push((x, th, jacobi::exit_time_gradient_check(model, &s, h_grid, opts)?));
    }
    Ok(out)
}

pub fn exit_gradient_rows(study: &[(f64, f64, jacobi::ExitGradientReport)]) -> Vec<ExitGradientRow> {
    let mut rows = Vec::new();
    for (x, th, r) in study {
        for sw in &r.sweeps {
            for &(h, d) in &sw.rows {
                rows.push(ExitGradientRow {
                    x: *x,
                    theta: *th,
                    tau: r.tau,
                    along_x: r.along_x,
                    sweep: sw.label,
                    h,
                    difference: d,
                    slope: sw.slope,
                });
            }
        }
    }
    rows
}

// --------------------------------------------------------------- pestov

#[derive(Debug, Clone, PartialEq)]
pub struct PestovStudy {
    /// Compact test field on `n³` grids, coarse to fine.
    pub levels: Vec<PestovReport>,
    /// Face-touching field with the boundary term, one row per `ε`.
    pub eps_trend: Vec<PestovReport>,
    /// Fiber-constant compact field, for which `Vu = 0`.
    pub pullback: PestovReport,
}

pub fn pestov_study(
    model: &MetricModel,
    eps: f64,
    x_top: f64,
    levels: &[usize],
    trend_eps: &[f64],
    trend_n: usize,
) -> Result<PestovStudy> {
    let levels = pestov::refinement_study(model, eps, x_top, levels, pestov::compact_test_field, false)?;
    let mut eps_trend = Vec::new();
    for &e in trend_eps {
        let g = PhaseGrid::new(model, e, x_top, trend_n, trend_n, trend_n)?;
        eps_trend.push(pestov::pestov_residual(&g, &pestov::face_touching_test_field(&g), true)?);
    }
    let n = trend_n;
    let g = PhaseGrid::new(model, eps, x_top, n, n, n)?;
    let w = x_top - eps;
    let (a, b) = (eps + 0.125 * w, x_top - 0.125 * w);
    let l = model.period;
    let u = PhaseField::from_fn(&g, |x, y, _| pestov::bump(x, a, b) * (2.0 * PI * y / l).cos());
    let pullback = pestov::pestov_residual(&g, &u, false)?;
    Ok(PestovStudy { levels, eps_trend, pullback })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabeledFiberRow {
    pub form: usize,
    pub row: FiberRow,
}

/// Fiber identity for `dx`, `dy` and a few random forms on a phase grid.
pub fn fiber_identity_sweep(grid: &PhaseGrid, n_random: usize, seed: u64) -> Vec<LabeledFiberRow> {
    let model = grid.model;
    let mut r = rng::stream(seed, STREAM_FIBER);
    let mut forms: Vec<Box<dyn OneForm>> = vec![
        Box::new(ConstantForm([1.0, 0.0, 0.0])),
        Box::new(ConstantForm([0.0, 1.0, 0.0])),
    ];
    for i in 0..n_random {
        forms.push(Box::new(rng::poly_form(&mut r, &model, i as u32 % 3)));
    }
    let mut rows = Vec::new();
    for (i, f) in forms.iter().enumerate() {
        let rep = pestov::fiber_identity_check(grid, f.as_ref());
        rows.extend(rep.rows.into_iter().map(|row| LabeledFiberRow { form: i, row }));
    }
    rows
}

/// Parameters for every suite, with the defaults used by the acceptance run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteParams {
    pub rays_per_model: usize,
    pub short_s: Vec<f64>,
    pub short_y: f64,
    pub asymptotic_x0: Vec<f64>,
    pub table_rays: usize,
    pub gauge_rays: usize,
    pub transport_states: usize,
    pub rate_orders: Vec<u32>,
    pub rate_x0: Vec<f64>,
    pub rate_n_theta: usize,
    pub probe_c: f64,
    pub probe_y: f64,
    pub probe_s: Vec<f64>,
    pub gradient_states: usize,
    pub gradient_fd_step: f64,
    pub jacobi_x0: Vec<f64>,
    pub jacobi_thetas: Vec<f64>,
    pub exit_states: Vec<(f64, f64)>,
    pub exit_h: Vec<f64>,
    pub pestov_eps: f64,
    pub pestov_x_top: f64,
    pub pestov_levels: Vec<usize>,
    pub pestov_trend_eps: Vec<f64>,
    pub pestov_trend_n: usize,
    pub fiber_grid: [usize; 3],
    pub fiber_random_forms: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            rays_per_model: 1000,
            short_s: vec![1e-3, 1e-2, 1e-1, 0.3],
            short_y: 0.25,
            asymptotic_x0: log_grid(1e-3, 1e-1, 7),
            table_rays: 20,
            gauge_rays: 100,
            transport_states: 100,
            rate_orders: vec![1, 2, 3],
            rate_x0: log_grid(1e-3, 1e-1, 5),
            rate_n_theta: 9,
            probe_c: 0.6,
            probe_y: 0.2,
            probe_s: vec![1e-1, 1e-2, 1e-3],
            gradient_states: 20,
            gradient_fd_step: 2.5e-4,
            jacobi_x0: vec![1e-1, 1e-2, 1e-3],
            jacobi_thetas: [0.6, 0.75, 0.9, 1.0].map(|t| t * PI).to_vec(),
            exit_states: vec![(0.2, 0.5 * PI), (0.2, 0.75 * PI), (0.3, 0.6 * PI)],
            exit_h: vec![1e-2, 1e-3, 1e-4],
            pestov_eps: 0.2,
            pestov_x_top: 1.0,
            pestov_levels: vec![64, 128],
            pestov_trend_eps: vec![0.4, 0.2, 0.1],
            pestov_trend_n: 32,
            fiber_grid: [16, 16, 32],
            fiber_random_forms: 4,
        }
    }
}

impl SuiteParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("short_s", &self.short_s),
            ("asymptotic_x0", &self.asymptotic_x0),
            ("rate_x0", &self.rate_x0),
            ("probe_s", &self.probe_s),
            ("jacobi_x0", &self.jacobi_x0),
            ("exit_h", &self.exit_h),
            ("pestov_trend_eps", &self.pestov_trend_eps),
        ];
        for (name, v) in positive {
            if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::InvalidOptions(format!("{name} entries must be positive")));
            }
        }
        if !(self.gradient_fd_step > 0.0) {
            return Err(Error::InvalidOptions("gradient_fd_step must be positive".into()));
        }
        if self.pestov_levels.is_empty() {
            return Err(Error::InvalidOptions("pestov_levels must not be empty".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> IntegratorOptions {
        IntegratorOptions::default()
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 1e-1, 5);
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[4] - 1e-1).abs() < 1e-15);
        assert!((g[2] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn sweeps_are_deterministic_and_order_independent() {
        let m = MetricModel::perturbed();
        let (a, _) = conservation_sweep(&m, 6, 9, &opts(), false).unwrap();
        let (b, _) = conservation_sweep(&m, 6, 9, &opts(), true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn euclidean_asymptotics_match_arcsine() {
        let r = exit_time_asymptotics(&MetricModel::euclidean(), 0.3, &[1e-2, 1e-1], &opts()).unwrap();
        for row in &r.rows {
            assert!((row.tau - row.x0.asin()).abs() < 1e-12);
        }
    }
}
