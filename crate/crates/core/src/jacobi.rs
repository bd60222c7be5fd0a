//! First variation of the geodesic flow: Jacobi fields, their covariant
//! derivatives, gradients of `u^f` and of the exit time.

use crate::error::{Error, Result};
use crate::fit::{brent, loglog_slope};
use crate::flow::{self, hessian, Augment, GeodesicPath, IntegratorOptions, PhaseState, RayStatus, MAX_PHASE};
use crate::metric::{ChartPoint, MetricModel, MAX_DIM};
use crate::transform::forms::OneForm;
use crate::transform::{integral_function, lambda_eval};
use serde::Serialize;

/// A tangent vector to `T*M` in packed chart components
/// `(δx, δy, δξ, δη)`, stored in a [`PhaseState`].
pub type TangentPerturbation = PhaseState;

/// `δẇ = J·Hess H·δw`, the linearized Hamilton equations.
pub(crate) fn linearized_rhs(model: &MetricModel, s: &PhaseState, dw: &[f64], out: &mut [f64]) {
    let n = model.dim();
    let hs = hessian(model, s);
    for a in 0..n {
        let mut dz = 0.0;
        let mut dzeta = 0.0;
        for b in 0..2 * n {
            dz += hs[n + a][b] * dw[b];
            dzeta -= hs[a][b] * dw[b];
        }
        out[a] = dz;
        out[n + a] = dzeta;
    }
}

struct Variation;

impl Augment for Variation {
    fn len(&self) -> usize {
        MAX_PHASE
    }
    fn rhs(&self, model: &MetricModel, s: &PhaseState, aug: &[f64], out: &mut [f64]) {
        let n2 = 2 * model.dim();
        linearized_rhs(model, s, &aug[..n2], &mut out[..n2]);
        out[n2..].fill(0.0);
    }
}

/// Gradient of `H` in packed coordinates.
pub fn dh(model: &MetricModel, s: &PhaseState) -> Vec<f64> {
    let m = model.m();
    let n = m + 1;
    let r = flow::rhs(model, s).to_vec(m);
    let mut g = vec![0.0; 2 * n];
    for a in 0..n {
        g[a] = -r[n + a];
        g[n + a] = r[a];
    }
    g
}

/// `D_tJ^μ = g^{μλ}(δζ_λ − Γ^ν_{κλ} ζ_ν δz^κ)`.
pub fn connection_map(model: &MetricModel, s: &PhaseState, dw: &PhaseState) -> Result<[f64; MAX_DIM]> {
    if s.x <= 0.0 {
        return Err(Error::SingularAtBoundary { what: "connection map" });
    }
    Ok(connection_map_unchecked(model, s, dw))
}

fn connection_map_unchecked(model: &MetricModel, s: &PhaseState, dw: &PhaseState) -> [f64; MAX_DIM] {
    let n = model.dim();
    let gam = model.christoffel_unchecked(&s.z());
    let zeta = [s.xi, s.eta[0], s.eta[1]];
    let dz = [dw.x, dw.y[0], dw.y[1]];
    let dzeta = [dw.xi, dw.eta[0], dw.eta[1]];
    let mut v = [0.0; MAX_DIM];
    for l in 0..n {
        let mut acc = dzeta[l];
        for nu in 0..n {
            for k in 0..n {
                acc -= gam[nu][k][l] * zeta[nu] * dz[k];
            }
        }
        v[l] = acc;
    }
    let g = model.cometric(&s.z());
    let mut out = [0.0; MAX_DIM];
    for mu in 0..n {
        for l in 0..n {
            out[mu] += g[mu][l] * v[l];
        }
    }
    out
}

/// `|v|_ḡ` for `ḡ = x² g = x² dx² + h`.
pub fn gbar_norm(model: &MetricModel, z: &ChartPoint, v: &[f64; MAX_DIM]) -> f64 {
    let h = model.h(z.x, &z.y);
    let m = model.m();
    let mut s = z.x * z.x * v[0] * v[0];
    for i in 0..m {
        for j in 0..m {
            s += h[i][j] * v[1 + i] * v[1 + j];
        }
    }
    s.sqrt()
}

/// Sasaki norm of a tangent vector at `s`: `|δz|²_g + |D δζ|²_{g*}`.
pub fn sasaki_norm(model: &MetricModel, s: &PhaseState, dw: &PhaseState) -> Result<f64> {
    let g = model.metric(&s.z())?;
    let dz = [dw.x, dw.y[0], dw.y[1]];
    let k = connection_map(model, s, dw)?;
    let n = model.dim();
    let mut a = 0.0;
    let mut b = 0.0;
    for mu in 0..n {
        for nu in 0..n {
            a += g[mu][nu] * dz[mu] * dz[nu];
            b += g[mu][nu] * k[mu] * k[nu];
        }
    }
    Ok((a + b).sqrt())
}

/// Unit vertical vector `d/dθ` of the fiber parametrization at a unit state
/// of a surface model.
pub fn vertical_normal(model: &MetricModel, s: &PhaseState) -> Result<TangentPerturbation> {
    let z = s.z();
    let th = model.fiber_angle(&z, s.xi, &s.eta);
    let h11 = 1.0 / model.h(z.x, &z.y)[0][0];
    let _ = model.unit_fiber_point(&z, th)?;
    Ok(PhaseState::surface(0.0, 0.0, -th.sin(), th.cos() / (z.x * h11.sqrt())))
}

/// Unit horizontal lift of the base vector g-orthogonal to `γ̇` at a unit
/// state of a surface model.
pub fn horizontal_normal(model: &MetricModel, s: &PhaseState) -> Result<TangentPerturbation> {
    let z = s.z();
    let _ = model.unit_fiber_point(&z, 0.0)?;
    let th = model.fiber_angle(&z, s.xi, &s.eta);
    let h11 = 1.0 / model.h(z.x, &z.y)[0][0];
    let dz = [-th.sin(), z.x * h11.sqrt() * th.cos(), 0.0];
    let gam = model.christoffel(&z)?;
    let zeta = [s.xi, s.eta[0], 0.0];
    let mut dzeta = [0.0; 2];
    for (l, out) in dzeta.iter_mut().enumerate() {
        for nu in 0..2 {
            for k in 0..2 {
                *out += gam[nu][k][l] * zeta[nu] * dz[k];
            }
        }
    }
    Ok(PhaseState::surface(dz[0], dz[1], dzeta[0], dzeta[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiSample {
    pub t: f64,
    pub x: f64,
    pub j: [f64; MAX_DIM],
    pub dj: [f64; MAX_DIM],
    pub j_bar: f64,
    pub dj_bar_x: f64,
}

#[derive(Debug, Clone)]
pub struct JacobiRecord {
    pub samples: Vec<JacobiSample>,
    pub sup_j_bar: f64,
    pub sup_dj_bar_x: f64,
    pub path: GeodesicPath,
}

impl JacobiRecord {
    /// Propagated perturbation `dφ_t θ` at time `t`.
    pub fn perturbation_at(&self, t: f64) -> PhaseState {
        let m = self.path.model.m();
        let n2 = 2 * (m + 1);
        let full = self.path.full_at(t);
        PhaseState::unpack(m, &full[n2..2 * n2])
    }
}

fn jacobi_sample(model: &MetricModel, t: f64, s: &PhaseState, dw: &PhaseState) -> JacobiSample {
    let j = [dw.x, dw.y[0], dw.y[1]];
    let dj = connection_map_unchecked(model, s, dw);
    let z = s.z();
    let j_bar = gbar_norm(model, &z, &j);
    JacobiSample {
        t,
        x: s.x,
        j,
        dj,
        j_bar,
        dj_bar_x: s.x * gbar_norm(model, &z, &dj),
    }
}

/// Integrates the flow together with its first variation started at `theta`.
///
/// Samples are taken on the dense output wherever `x ≥ exit_root_tol`, plus
/// one final sample at the time where `x` equals `exit_root_tol` on the way
/// out.
pub fn variational_trace(
    model: &MetricModel,
    ic: &PhaseState,
    theta: &TangentPerturbation,
    opts: &IntegratorOptions,
) -> Result<JacobiRecord> {
    let m = model.m();
    let n2 = 2 * (m + 1);
    let mut aug0 = vec![0.0; MAX_PHASE];
    theta.pack(m, &mut aug0[..n2]);
    let path = flow::trace_augmented(model, ic, &Variation, &aug0, opts)?;
    let split = |full: &[f64]| (PhaseState::unpack(m, &full[..n2]), PhaseState::unpack(m, &full[n2..2 * n2]));
    let mut samples = Vec::new();
    let floor = opts.exit_root_tol;
    for t in path.dense_times(flow::DENSE_PER_STEP) {
        let (s, dw) = split(&path.full_at(t));
        if s.x >= floor {
            samples.push(jacobi_sample(model, t, &s, &dw));
        }
    }
    if path.status == RayStatus::Exited && path.t_end > 0.0 {
        let last = samples.last().map_or(0.0, |s| s.t);
        let t_star = brent(|t| path.state_at(t).x - floor, last, path.t_end, 1e-16);
        let (s, dw) = split(&path.full_at(t_star));
        if s.x > 0.0 {
            samples.push(jacobi_sample(model, t_star, &s, &dw));
        }
    }
    let sup_j_bar = samples.iter().fold(0.0f64, |a, s| a.max(s.j_bar));
    let sup_dj_bar_x = samples.iter().fold(0.0f64, |a, s| a.max(s.dj_bar_x));
    Ok(JacobiRecord {
        samples,
        sup_j_bar,
        sup_dj_bar_x,
        path,
    })
}

/// Central-difference mismatch `max_i |(φ_t(ic+hθ) − φ_t(ic−hθ))/2h − δw(t)|`
/// at time `t`.
pub fn fd_mismatch(
    model: &MetricModel,
    ic: &PhaseState,
    theta: &TangentPerturbation,
    rec: &JacobiRecord,
    t: f64,
    h: f64,
    opts: &IntegratorOptions,
) -> Result<f64> {
    let m = model.m();
    let p = flow::flow_for(model, &ic.offset(theta, h), t, opts)?.to_vec(m);
    let q = flow::flow_for(model, &ic.offset(theta, -h), t, opts)?.to_vec(m);
    let d = rec.perturbation_at(t).to_vec(m);
    Ok((0..p.len()).fold(0.0f64, |a, i| a.max(((p[i] - q[i]) / (2.0 * h) - d[i]).abs())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Vertical,
    Horizontal,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::Vertical => "vertical",
            Direction::Horizontal => "horizontal",
        }
    }

    pub fn at(&self, model: &MetricModel, s: &PhaseState) -> Result<TangentPerturbation> {
        match self {
            Direction::Vertical => vertical_normal(model, s),
            Direction::Horizontal => horizontal_normal(model, s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiBoundRow {
    pub x0: f64,
    pub theta: f64,
    pub direction: Direction,
    pub sup_j_bar: f64,
    pub sup_dj_bar_x: f64,
    pub fd_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiBoundsReport {
    pub rows: Vec<JacobiBoundRow>,
    /// Largest ratio `sup(x₀ smaller) / sup(x₀ larger)` per decade of `x₀`.
    pub max_growth_j: f64,
    pub max_growth_dj: f64,
}

/// Sweeps inward unit rays from `x₀` at fiber angles `thetas` (which should
/// satisfy `cos θ ≤ 0`) with unit normal perturbations.
pub fn jacobi_bounds_report(
    model: &MetricModel,
    x0_grid: &[f64],
    thetas: &[f64],
    y: f64,
    opts: &IntegratorOptions,
) -> Result<JacobiBoundsReport> {
    let mut rows = Vec::new();
    for &x0 in x0_grid {
        let z = ChartPoint::surface(x0, y);
        for &th in thetas {
            let (xi, eta) = model.unit_fiber_point(&z, th)?;
            let s = PhaseState::new(x0, z.y, xi, eta);
            for dir in [Direction::Vertical, Direction::Horizontal] {
                let theta = dir.at(model, &s)?;
                let rec = variational_trace(model, &s, &theta, opts)?;
                let t_mid = 0.5 * rec.path.t_end;
                let mis = fd_mismatch(model, &s, &theta, &rec, t_mid, 1e-4 * x0, opts)?;
                rows.push(JacobiBoundRow {
                    x0,
                    theta: th,
                    direction: dir,
                    sup_j_bar: rec.sup_j_bar,
                    sup_dj_bar_x: rec.sup_dj_bar_x,
                    fd_mismatch: mis,
                });
            }
        }
    }
    let mut max_growth_j: f64 = 0.0;
    let mut max_growth_dj: f64 = 0.0;
    for a in &rows {
        for b in &rows {
            if a.theta == b.theta && a.direction == b.direction && b.x0 < a.x0 {
                let decades = (a.x0 / b.x0).log10();
                if (decades - 1.0).abs() < 1e-9 {
                    max_growth_j = max_growth_j.max(b.sup_j_bar / a.sup_j_bar);
                    max_growth_dj = max_growth_dj.max(b.sup_dj_bar_x / a.sup_dj_bar_x);
                }
            }
        }
    }
    Ok(JacobiBoundsReport {
        rows,
        max_growth_j,
        max_growth_dj,
    })
}

/// Derivative of `λf` at `s` in the direction `dw`.
pub fn d_lambda(model: &MetricModel, f: &dyn OneForm, s: &PhaseState, dw: &PhaseState) -> f64 {
    let m = model.m();
    let loc = model.local(s.x, &s.y);
    let jet = f.jet(s.x, &s.y);
    let x = s.x;
    let fy = [jet.v[1], jet.v[2]];
    let mut eta = [0.0; 2];
    eta[..m].copy_from_slice(&s.eta[..m]);
    let bq = |a: &crate::metric::Mat2, u: &[f64; 2], v: &[f64; 2]| model.boundary_quad_bilinear(a, u, v);
    // ∂_ξ, ∂_η
    let mut out = jet.v[0] * dw.xi;
    let hf = crate::metric::mat_vec(&loc.hinv, &fy);
    for j in 0..m {
        out += x * x * hf[j] * dw.eta[j];
    }
    // ∂_x
    let dfx = [jet.d[0][1], jet.d[0][2]];
    let dx = jet.d[0][0] * s.xi
        + 2.0 * x * bq(&loc.hinv, &fy, &eta)
        + x * x * bq(&loc.dhinv[0], &fy, &eta)
        + x * x * bq(&loc.hinv, &dfx, &eta);
    out += dx * dw.x;
    for k in 0..m {
        let dfk = [jet.d[1 + k][1], jet.d[1 + k][2]];
        let dy = jet.d[1 + k][0] * s.xi + x * x * bq(&loc.dhinv[1 + k], &fy, &eta) + x * x * bq(&loc.hinv, &dfk, &eta);
        out += dy * dw.y[k];
    }
    out
}

/// `df(J, γ̇)` with `df_{νμ} = ∂_ν f_μ − ∂_μ f_ν`.
fn df_j_gammadot(model: &MetricModel, f: &dyn OneForm, s: &PhaseState, dw: &PhaseState) -> f64 {
    let n = model.dim();
    let jet = f.jet(s.x, &s.y);
    let r = flow::rhs(model, s);
    let gd = [r.x, r.y[0], r.y[1]];
    let j = [dw.x, dw.y[0], dw.y[1]];
    let mut out = 0.0;
    for nu in 0..n {
        for mu in 0..n {
            out += (jet.d[nu][mu] - jet.d[mu][nu]) * j[nu] * gd[mu];
        }
    }
    out
}

fn f_of(f: &dyn OneForm, s: &PhaseState, v: &[f64; MAX_DIM]) -> f64 {
    let w = f.eval(s.x, &s.y);
    w[0] * v[0] + w[1] * v[1] + w[2] * v[2]
}

struct GradientAug<'a> {
    f: &'a dyn OneForm,
}

impl Augment for GradientAug<'_> {
    fn len(&self) -> usize {
        MAX_PHASE + 2
    }
    fn rhs(&self, model: &MetricModel, s: &PhaseState, aug: &[f64], out: &mut [f64]) {
        let m = model.m();
        let n2 = 2 * (m + 1);
        linearized_rhs(model, s, &aug[..n2], &mut out[..n2]);
        out[n2..MAX_PHASE].fill(0.0);
        let dw = PhaseState::unpack(m, &aug[..n2]);
        out[MAX_PHASE] = d_lambda(model, self.f, s, &dw);
        out[MAX_PHASE + 1] = df_j_gammadot(model, self.f, s, &dw);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientReport {
    /// `∫ dλf(dφ_t θ) dt + λf(exit)·dτ(θ)`.
    pub jacobi_value: f64,
    /// `∫ df(J, γ̇) dt + f(J)|₀^τ + λf(exit)·dτ(θ)`.
    pub exterior_value: f64,
    /// `∫ df(J, γ̇) dt` alone.
    pub df_integral: f64,
    /// `∫ f(D_tJ) dt`, truncated where `x` drops below `F_DTJ_X_CUT` on the
    /// way out (the integrand blows up like `x⁻¹` there unless `f` vanishes
    /// at the boundary).
    pub f_dtj_integral: f64,
    pub exit_term: f64,
}

/// Derivative of `u^f` at `s` in the direction `theta`, obtained from the
/// propagated first variation.
pub fn grad_uf_via_jacobi(
    model: &MetricModel,
    f: &dyn OneForm,
    s: &PhaseState,
    theta: &TangentPerturbation,
    opts: &IntegratorOptions,
) -> Result<GradientReport> {
    let m = model.m();
    let n2 = 2 * (m + 1);
    let mut aug0 = vec![0.0; MAX_PHASE + 2];
    theta.pack(m, &mut aug0[..n2]);
    let path = flow::trace_augmented(model, s, &GradientAug { f }, &aug0, opts)?;
    if path.status != RayStatus::Exited {
        return Err(Error::NoExit(path.status));
    }
    let end = path.end_state();
    let aug = path.aug_end();
    let dw_end = PhaseState::unpack(m, &aug[..n2]);
    let [chain, df_integral] = [aug[MAX_PHASE], aug[MAX_PHASE + 1]];
    let f_dtj_integral = f_dtj_quadrature(model, f, &path, n2);
    let dtau = -dw_end.x / end.xi;
    let exit_term = lambda_eval(model, f, &end) * dtau;
    let f_j_end = f_of(f, &end, &[dw_end.x, dw_end.y[0], dw_end.y[1]]);
    let f_j_start = f_of(f, s, &[theta.x, theta.y[0], theta.y[1]]);
    Ok(GradientReport {
        jacobi_value: chain + exit_term,
        exterior_value: df_integral + f_j_end - f_j_start + exit_term,
        df_integral,
        f_dtj_integral,
        exit_term,
    })
}

pub const F_DTJ_X_CUT: f64 = 1e-6;

fn f_dtj_quadrature(model: &MetricModel, f: &dyn OneForm, path: &GeodesicPath, n2: usize) -> f64 {
    let m = model.m();
    let t_cut = if path.end_state().x < F_DTJ_X_CUT {
        let ts = path.dense_times(flow::DENSE_PER_STEP);
        let last_above = ts.iter().rev().find(|&&t| path.state_at(t).x >= F_DTJ_X_CUT).copied().unwrap_or(0.0);
        brent(|t| path.state_at(t).x - F_DTJ_X_CUT, last_above, path.t_end, 1e-16)
    } else {
        path.t_end
    };
    let integrand = |t: f64| {
        let full = path.full_at(t);
        let s = PhaseState::unpack(m, &full[..n2]);
        let dw = PhaseState::unpack(m, &full[n2..2 * n2]);
        [f_of(f, &s, &connection_map_unchecked(model, &s, &dw))]
    };
    let mut total = 0.0;
    for seg in path.segments() {
        let (a, b) = (seg.t0, seg.t1().min(t_cut));
        if b > a {
            total += crate::quad::integrate(integrand, a, b, 1e-12, 1e-8)[0];
        }
    }
    total
}

/// `(u^f(s + hθ) − u^f(s − hθ)) / 2h`.
pub fn fd_gradient(
    model: &MetricModel,
    f: &dyn OneForm,
    s: &PhaseState,
    theta: &TangentPerturbation,
    h: f64,
    opts: &IntegratorOptions,
) -> Result<f64> {
    let p = integral_function(model, f, &s.offset(theta, h), opts)?;
    let q = integral_function(model, f, &s.offset(theta, -h), opts)?;
    Ok((p - q) / (2.0 * h))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSweep {
    pub label: &'static str,
    pub rows: Vec<(f64, f64)>,
    /// `None` when every difference is at round-off.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitGradientReport {
    pub tau: f64,
    /// `(τ(φ_t s) − τ(s)) / t`.
    pub along_x: f64,
    pub sweeps: Vec<PerturbationSweep>,
}

/// Differences below this multiple of `1 + τ` count as round-off.
pub const EXIT_NOISE_FLOOR: f64 = 1e-13;

/// Finite-difference study of the exit time at a unit interior state of a
/// surface model: along the flow, along the fiber, along the horizontal
/// normal and along `∂_y` with the covector renormalized.
pub fn exit_time_gradient_check(
    model: &MetricModel,
    s: &PhaseState,
    h_grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<ExitGradientReport> {
    let tau = flow::exit_time(model, s, opts)?;
    let t = 0.25 * tau;
    let moved = flow::flow_for(model, s, t, opts)?;
    let along_x = (flow::exit_time(model, &moved, opts)? - tau) / t;

    let z = s.z();
    let th = model.fiber_angle(&z, s.xi, &s.eta);
    let hor = horizontal_normal(model, s)?;
    let unit = |p: PhaseState| -> PhaseState {
        let r = (2.0 * flow::hamiltonian(model, &p)).sqrt();
        PhaseState::new(p.x, p.y, p.xi / r, [p.eta[0] / r, p.eta[1] / r])
    };
    let curves: [(&'static str, Box<dyn Fn(f64) -> Result<PhaseState>>); 3] = [
        (
            "vertical",
            Box::new(|h| {
                let (xi, eta) = model.unit_fiber_point(&z, th + h)?;
                Ok(PhaseState::new(z.x, z.y, xi, eta))
            }),
        ),
        ("horizontal", Box::new(|h| Ok(unit(s.offset(&hor, h))))),
        (
            "boundary_tangent",
            Box::new(|h| Ok(unit(PhaseState::new(s.x, [s.y[0] + h, s.y[1]], s.xi, s.eta)))),
        ),
    ];
    let mut sweeps = Vec::new();
    for (label, c) in curves.iter() {
        let mut rows = Vec::new();
        for &h in h_grid {
            let d = (flow::exit_time(model, &c(h)?, opts)? - tau).abs();
            rows.push((h, d));
        }
        let floor = EXIT_NOISE_FLOOR * (1.0 + tau);
        let hs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let ds: Vec<f64> = rows.iter().map(|r| if r.1 > floor { r.1 } else { 0.0 }).collect();
        sweeps.push(PerturbationSweep {
            label,
            slope: loglog_slope(&hs, &ds),
            rows,
        });
    }
    Ok(ExitGradientReport { tau, along_x, sweeps })
}
