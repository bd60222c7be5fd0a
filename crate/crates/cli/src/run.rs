//! Suite runners: measure, write artifacts, judge against thresholds.

use crate::config::Thresholds;
use crate::output::{ArtifactDir, CriterionResult, Relation};
use gasgiant_core::jacobi::Direction;
use gasgiant_core::pestov::{PestovReport, PhaseGrid};
use gasgiant_core::suites::{self, RayDrift, SuiteParams};
use gasgiant_core::transform::ProbeReport;
use gasgiant_core::flow::ShortGeodesicRow;
use gasgiant_core::{IntegratorOptions, MetricModel};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] gasgiant_core::Error),
    #[error("writing artifacts: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type RunResult = Result<Vec<CriterionResult>, RunError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Trace,
    Transform,
    Probe,
    Jacobi,
    Pestov,
    VerifyAll,
}

impl Suite {
    pub fn parts(self) -> &'static [Suite] {
        match self {
            Suite::VerifyAll => &[Suite::Trace, Suite::Transform, Suite::Probe, Suite::Jacobi, Suite::Pestov],
            Suite::Trace => &[Suite::Trace],
            Suite::Transform => &[Suite::Transform],
            Suite::Probe => &[Suite::Probe],
            Suite::Jacobi => &[Suite::Jacobi],
            Suite::Pestov => &[Suite::Pestov],
        }
    }
}

pub struct Context {
    pub model: MetricModel,
    pub seed: u64,
    pub opts: IntegratorOptions,
    pub params: SuiteParams,
    pub thresholds: Thresholds,
    pub parallel: bool,
}

impl Context {
    /// Surface suites need a two-dimensional model.
    pub fn surface(&self) -> MetricModel {
        if self.model.dim() == 2 {
            self.model
        } else {
            MetricModel::perturbed()
        }
    }

    pub fn run(&self, suite: Suite, out: &mut ArtifactDir) -> RunResult {
        let mut all = Vec::new();
        for part in suite.parts() {
            let mut r = match part {
                Suite::Trace => self.trace(out)?,
                Suite::Transform => self.transform(out)?,
                Suite::Probe => self.probe(out)?,
                Suite::Jacobi => self.jacobi(out)?,
                Suite::Pestov => self.pestov(out)?,
                Suite::VerifyAll => unreachable!(),
            };
            all.append(&mut r);
        }
        all.sort_by_key(|c| c.criterion);
        out.csv("summary.csv", &all)?;
        Ok(all)
    }

    /// The built-in models, with the configured one in place of its namesake.
    fn trace_models(&self) -> Vec<MetricModel> {
        MetricModel::builtins()
            .into_iter()
            .map(|m| if m.name() == self.model.name() { self.model } else { m })
            .collect()
    }

    fn trace(&self, out: &mut ArtifactDir) -> RunResult {
        let (p, t, opts) = (&self.params, &self.thresholds, &self.opts);
        let mut res = Vec::new();

        let mut summaries = Vec::new();
        for m in self.trace_models() {
            let (rays, s) = suites::conservation_sweep(&m, p.rays_per_model, self.seed, opts, self.parallel)?;
            let (header, rows) = ray_table(m.dim() - 1, &rays);
            out.csv_records(&format!("rays_{}.csv", m.name()), &header, &rows)?;
            res.push(
                CriterionResult::new(1, "energy_drift", s.model, s.max_h_drift, Relation::Lt, t.energy_drift)
                    .with_detail(format!("{} rays", s.rays)),
            );
            summaries.push(s);
        }
        for s in &summaries {
            res.push(CriterionResult::new(2, "h0_drift", s.model, s.max_h0_drift, Relation::Lt, t.h0_drift));
        }
        out.csv("drift_summary.csv", &summaries)?;

        let euclid = MetricModel::euclidean();
        let sg = suites::short_geodesics(&euclid, p.short_y, &p.short_s, opts)?;
        out.csv("short_geodesics_euclidean.csv", &sg.rows)?;
        let tau_err = sg.rows.iter().fold(0.0f64, |a, r| a.max((r.tau - PI).abs()));
        let len_err = sg.rows.iter().fold(0.0f64, |a, r| a.max((r.length - r.s * PI).abs()));
        res.push(CriterionResult::new(3, "exit_time", euclid.name(), tau_err, Relation::Lt, t.exit_time));
        res.push(CriterionResult::new(3, "length", euclid.name(), len_err, Relation::Lt, t.exit_time));

        let surface = self.surface();
        let mut asym = vec![euclid];
        if surface.name() != euclid.name() {
            asym.push(surface);
        }
        for m in asym {
            let r = suites::exit_time_asymptotics(&m, p.short_y, &p.asymptotic_x0, opts)?;
            out.csv(&format!("asymptotics_{}.csv", m.name()), &r.rows)?;
            let pts: Vec<Vec<f64>> = r.rows.iter().map(|row| vec![row.x0.ln(), row.excess.ln()]).collect();
            out.dat(&format!("exit_asymptotic_{}.dat", m.name()), &["log_x0", "log_excess"], &pts)?;
            res.push(CriterionResult::new(
                4,
                "excess_slope",
                m.name(),
                slope_or_nan(r.slope),
                Relation::Ge,
                t.asymptotic_slope,
            ));
        }

        let sg = suites::short_geodesics(&surface, p.short_y, &p.short_s, opts)?;
        out.csv(&format!("short_geodesics_{}.csv", surface.name()), &sg.rows)?;
        let name = surface.name();
        // a deviation that vanishes identically meets any rate
        let rate = |slope: Option<f64>, col: fn(&ShortGeodesicRow) -> f64| match slope {
            Some(v) => (v, String::new()),
            None if sg.rows.iter().all(|r| col(r) == 0.0) => (f64::INFINITY, "identically zero".to_string()),
            None => (f64::NAN, String::new()),
        };
        for (case, slope, col, thr) in [
            ("x_slope", sg.slope_x, (|r: &ShortGeodesicRow| r.sup_x) as fn(&ShortGeodesicRow) -> f64, t.short_x_slope),
            ("dy_slope", sg.slope_dy, |r: &ShortGeodesicRow| r.sup_dy, t.short_y_eta_slope),
            ("deta_slope", sg.slope_deta, |r: &ShortGeodesicRow| r.sup_deta, t.short_y_eta_slope),
        ] {
            let (v, detail) = rate(slope, col);
            res.push(CriterionResult::new(5, case, name, v, Relation::Ge, thr).with_detail(detail));
        }
        let (lo, hi) = sg
            .rows
            .iter()
            .filter(|r| r.s <= t.h_norm_s_max)
            .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.h_norm_min), b.max(r.h_norm_max)));
        res.push(CriterionResult::new(5, "h_norm_min", name, lo, Relation::Ge, t.h_norm_lo));
        res.push(CriterionResult::new(5, "h_norm_max", name, hi, Relation::Le, t.h_norm_hi));

        let tb = suites::chart_equation_sweep(p.table_rays, self.seed, opts)?;
        out.csv("chart_equations.csv", &[tb])?;
        res.push(CriterionResult::new(15, "xi_dot", euclid.name(), tb.max_xi_residual, Relation::Lt, t.table_xi));
        res.push(
            CriterionResult::new(15, "x_ddot", euclid.name(), tb.max_rel_xdd_residual, Relation::Lt, t.table_xdd)
                .with_detail(format!("opposite sign gives {:.3e}", tb.max_rel_xdd_residual_flipped)),
        );
        Ok(res)
    }

    fn transform(&self, out: &mut ArtifactDir) -> RunResult {
        let (p, t, opts) = (&self.params, &self.thresholds, &self.opts);
        let m = self.surface();
        let mut res = Vec::new();

        let rows = suites::gauge_sweep(&m, p.gauge_rays, self.seed, opts, self.parallel)?;
        out.csv("gauge.csv", &rows)?;
        let exact = rows.iter().fold(0.0f64, |a, r| a.max(r.exact_transform.abs()));
        let gauge = rows.iter().fold(0.0f64, |a, r| a.max(r.gauge_difference));
        res.push(CriterionResult::new(6, "exact_form", m.name(), exact, Relation::Lt, t.gauge));
        res.push(CriterionResult::new(6, "gauge_difference", m.name(), gauge, Relation::Lt, t.gauge));

        let rows = suites::transport_sweep(&m, p.transport_states, self.seed, opts, self.parallel)?;
        out.csv("transport.csv", &rows)?;
        let worst = rows.iter().fold(0.0f64, |a, r| a.max(r.residual));
        res.push(CriterionResult::new(7, "transport", m.name(), worst, Relation::Lt, t.transport));

        let fits = suites::vanishing_rates(&m, &p.rate_orders, &p.rate_x0, p.rate_n_theta, opts, self.parallel)?;
        let mut flat = Vec::new();
        for f in &fits {
            for &(x0, value) in &f.fit.rows {
                flat.push(RateRow { family: f.family, k: f.fit.k, x0, value });
            }
            let pts: Vec<Vec<f64>> = f.fit.rows.iter().map(|&(x0, v)| vec![x0.ln(), v.ln()]).collect();
            out.dat(&format!("rates_{}_k{}.dat", f.family, f.fit.k), &["log_x0", "log_value"], &pts)?;
            res.push(CriterionResult::new(
                8,
                format!("{}_k{}", f.family, f.fit.k),
                m.name(),
                slope_or_nan(f.fit.slope),
                Relation::Ge,
                f.fit.k as f64 + t.rate_margin,
            ));
        }
        out.csv("rates.csv", &flat)?;
        Ok(res)
    }

    fn probe(&self, out: &mut ArtifactDir) -> RunResult {
        let (p, t) = (&self.params, &self.thresholds);
        let m = self.surface();
        let ps = suites::probe_study(&m, p.probe_c, p.probe_y, &p.probe_s, &p.rate_orders, &self.opts)?;
        let mut flat = Vec::new();
        let mut push = |family: &'static str, k: Option<u32>, r: &ProbeReport| {
            for row in &r.rows {
                flat.push(ProbeCsvRow {
                    family,
                    k,
                    s: row.s,
                    value: row.value,
                    weight: row.weight,
                    estimate: row.estimate,
                    true_value: row.true_value,
                });
            }
        };
        push("constant", None, &ps.constant);
        push("profile", None, &ps.profile);
        for (k, r) in &ps.vanishing {
            push("order_k", Some(*k), r);
        }
        out.csv("probe.csv", &flat)?;
        let pts: Vec<Vec<f64>> = flat
            .iter()
            .filter(|r| r.family == "profile")
            .map(|r| vec![r.s, r.estimate, r.true_value])
            .collect();
        out.dat("probe.dat", &["s", "estimate", "true_value"], &pts)?;

        let mut res = Vec::new();
        let smallest = ps.constant.rows.iter().min_by(|a, b| a.s.total_cmp(&b.s));
        let rel = smallest.map_or(f64::NAN, |r| (r.estimate - p.probe_c).abs() / p.probe_c.abs());
        res.push(CriterionResult::new(14, "constant_rel_error", m.name(), rel, Relation::Lt, t.probe_rel));
        res.push(CriterionResult::new(
            14,
            "profile_slope",
            m.name(),
            slope_or_nan(ps.profile.error_slope),
            Relation::Ge,
            t.probe_slope,
        ));
        for (k, r) in &ps.vanishing {
            res.push(CriterionResult::new(
                14,
                format!("order_k{k}_slope"),
                m.name(),
                slope_or_nan(r.error_slope),
                Relation::Ge,
                t.probe_slope,
            ));
        }
        Ok(res)
    }

    fn jacobi(&self, out: &mut ArtifactDir) -> RunResult {
        let (p, t, opts) = (&self.params, &self.thresholds, &self.opts);
        let m = self.surface();
        let mut res = Vec::new();

        let rows = suites::gradient_sweep(&m, p.gradient_states, self.seed, p.gradient_fd_step, opts, self.parallel)?;
        out.csv("gradients.csv", &rows)?;
        for (d, label) in [(Direction::Vertical, "vertical"), (Direction::Horizontal, "horizontal")] {
            let worst = rows.iter().filter(|r| r.direction == d).fold(0.0f64, |a, r| a.max(r.rel_error));
            res.push(CriterionResult::new(9, label, m.name(), worst, Relation::Lt, t.gradient_rel));
        }

        let jb = suites::jacobi_bounds(&m, &p.jacobi_x0, &p.jacobi_thetas, 0.3, opts)?;
        out.csv("jacobi_bounds.csv", &jb.rows)?;
        res.push(CriterionResult::new(10, "growth_j", m.name(), jb.max_growth_j, Relation::Lt, t.jacobi_growth));
        res.push(CriterionResult::new(10, "growth_dj", m.name(), jb.max_growth_dj, Relation::Lt, t.jacobi_growth));

        let study = suites::exit_gradient_study(&m, &p.exit_states, &p.exit_h, opts)?;
        let rows = suites::exit_gradient_rows(&study);
        out.csv("exit_gradient.csv", &rows)?;
        let pts: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.x, r.theta, r.h, r.difference]).collect();
        out.dat("exit_gradient.dat", &["x", "theta", "h", "difference"], &pts)?;
        let along = study.iter().fold(0.0f64, |a, (_, _, r)| a.max((r.along_x + 1.0).abs()));
        res.push(CriterionResult::new(11, "along_x", m.name(), along, Relation::Lt, t.along_x));
        for (x, th, r) in &study {
            for sw in &r.sweeps {
                // no slope means every difference is at round-off
                let s = sw.slope.unwrap_or(f64::INFINITY);
                res.push(CriterionResult::new(
                    11,
                    format!("{}@({x},{:.3}pi)", sw.label, th / PI),
                    m.name(),
                    s,
                    Relation::Ge,
                    t.normal_slope,
                ));
            }
        }
        Ok(res)
    }

    fn pestov(&self, out: &mut ArtifactDir) -> RunResult {
        let (p, t) = (&self.params, &self.thresholds);
        let m = self.surface();
        let st = suites::pestov_study(
            &m,
            p.pestov_eps,
            p.pestov_x_top,
            &p.pestov_levels,
            &p.pestov_trend_eps,
            p.pestov_trend_n,
        )?;
        let mut flat: Vec<PestovRow> = st.levels.iter().map(|r| PestovRow::new("refinement", r)).collect();
        flat.extend(st.eps_trend.iter().map(|r| PestovRow::new("eps_trend", r)));
        flat.push(PestovRow::new("pullback", &st.pullback));
        out.csv("pestov.csv", &flat)?;
        let pts: Vec<Vec<f64>> = st
            .levels
            .iter()
            .map(|r| vec![(p.pestov_x_top - p.pestov_eps) / r.grid.nx as f64, r.relative_residual])
            .collect();
        out.dat("pestov_refinement.dat", &["h", "relative_residual"], &pts)?;

        let mut res = Vec::new();
        let base = &st.levels[0];
        let fine = st.levels.last().expect("levels validated non-empty");
        res.push(
            CriterionResult::new(12, "base_residual", m.name(), base.relative_residual, Relation::Lt, t.pestov_base)
                .with_detail(format!("{}^3 grid", base.grid.nx)),
        );
        if st.levels.len() > 1 {
            res.push(
                CriterionResult::new(
                    12,
                    "refinement_ratio",
                    m.name(),
                    base.relative_residual / fine.relative_residual,
                    Relation::Ge,
                    t.pestov_ratio,
                )
                .with_detail(format!("{}^3 vs {}^3", base.grid.nx, fine.grid.nx)),
            );
        }
        // slack for discretization error in the identity itself
        let margin = st.levels.iter().fold(f64::INFINITY, |a, r| a.min(r.inequality_margin() + r.residual.abs()));
        res.push(CriterionResult::new(12, "inequality", m.name(), margin, Relation::Ge, 0.0));
        let curv = st.levels.iter().fold(f64::NEG_INFINITY, |a, r| a.max(r.curvature_term));
        res.push(CriterionResult::new(12, "curvature_sign", m.name(), curv, Relation::Le, 0.0));

        let [nx, ny, nth] = p.fiber_grid;
        let g = PhaseGrid::new(&m, 0.05, 1.0, nx, ny, nth)?;
        let rows = suites::fiber_identity_sweep(&g, p.fiber_random_forms, self.seed);
        let flat: Vec<FiberCsvRow> = rows
            .iter()
            .map(|r| FiberCsvRow {
                form: r.form,
                x: r.row.x,
                y: r.row.y,
                lhs: r.row.lhs,
                rhs: r.row.rhs,
                rel_error: r.row.rel_error,
            })
            .collect();
        out.csv("fiber.csv", &flat)?;
        let worst = rows.iter().fold(0.0f64, |a, r| a.max(r.row.rel_error));
        res.push(
            CriterionResult::new(13, "fiber_identity", m.name(), worst, Relation::Lt, t.fiber)
                .with_detail(format!("{} fibers", rows.len())),
        );
        Ok(res)
    }
}

/// Columns `model, x0, y0…, xi0, eta0…, status, tau, h_drift, h0_drift,
/// x_exit, y_exit…` with one `y`/`η` column per tangential coordinate.
fn ray_table(m: usize, rays: &[RayDrift]) -> (Vec<String>, Vec<Vec<String>>) {
    let many = |base: &str| -> Vec<String> {
        if m == 1 {
            vec![base.to_string()]
        } else {
            (1..=m).map(|i| format!("{base}_{i}")).collect()
        }
    };
    let mut header = vec!["model".to_string(), "x0".to_string()];
    header.extend(many("y0"));
    header.push("xi0".into());
    header.extend(many("eta0"));
    header.extend(["status", "tau", "h_drift", "h0_drift", "x_exit"].map(String::from));
    header.extend(many("y_exit"));
    let rows = rays
        .iter()
        .map(|r| {
            let mut row = vec![r.model.to_string(), r.ic.x.to_string()];
            row.extend(r.ic.y[..m].iter().map(f64::to_string));
            row.push(r.ic.xi.to_string());
            row.extend(r.ic.eta[..m].iter().map(f64::to_string));
            row.push(r.status.to_string());
            for v in [r.tau, r.h_drift, r.h0_drift, r.end.x] {
                row.push(v.to_string());
            }
            row.extend(r.end.y[..m].iter().map(f64::to_string));
            row
        })
        .collect();
    (header, rows)
}

fn slope_or_nan(s: Option<f64>) -> f64 {
    s.unwrap_or(f64::NAN)
}

#[derive(Serialize)]
struct RateRow {
    family: &'static str,
    k: u32,
    x0: f64,
    value: f64,
}

#[derive(Serialize)]
struct ProbeCsvRow {
    family: &'static str,
    k: Option<u32>,
    s: f64,
    value: f64,
    weight: f64,
    estimate: f64,
    true_value: f64,
}

#[derive(Serialize)]
struct PestovRow {
    study: &'static str,
    model: &'static str,
    eps: f64,
    x_top: f64,
    nx: usize,
    ny: usize,
    nth: usize,
    norm_vxu2: f64,
    norm_xvu2: f64,
    curvature_term: f64,
    norm_xu2: f64,
    boundary_term: f64,
    residual: f64,
    relative_residual: f64,
    invalid_nodes: usize,
}

impl PestovRow {
    fn new(study: &'static str, r: &PestovReport) -> Self {
        Self {
            study,
            model: r.grid.model,
            eps: r.grid.eps,
            x_top: r.grid.x_top,
            nx: r.grid.nx,
            ny: r.grid.ny,
            nth: r.grid.nth,
            norm_vxu2: r.norm_vxu2,
            norm_xvu2: r.norm_xvu2,
            curvature_term: r.curvature_term,
            norm_xu2: r.norm_xu2,
            boundary_term: r.boundary_term,
            residual: r.residual,
            relative_residual: r.relative_residual,
            invalid_nodes: r.invalid_nodes,
        }
    }
}

#[derive(Serialize)]
struct FiberCsvRow {
    form: usize,
    x: f64,
    y: f64,
    lhs: f64,
    rhs: f64,
    rel_error: f64,
}
