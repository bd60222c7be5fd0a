//! Energy identity `‖VXu‖² = ‖XVu‖² − ∫K|Vu|² + ‖Xu‖² + B(u)` on phase grids.

use super::grid::PhaseGrid;
use super::ops::{apply_v, inner, norm2, FlowDifferencer, PhaseField};
use crate::error::{Error, Result};
use crate::flow::PhaseState;
use crate::transform::{forms::OneForm, lambda_eval};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub model: &'static str,
    pub eps: f64,
    pub x_top: f64,
    pub nx: usize,
    pub ny: usize,
    pub nth: usize,
}

impl GridSpec {
    pub fn of(grid: &PhaseGrid) -> Self {
        Self {
            model: grid.model.name(),
            eps: grid.eps,
            x_top: grid.x_top,
            nx: grid.nx,
            ny: grid.ny,
            nth: grid.nth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PestovReport {
    pub grid: GridSpec,
    pub norm_vxu2: f64,
    pub norm_xvu2: f64,
    /// `∫K|Vu|² dΣ`.
    pub curvature_term: f64,
    pub norm_xu2: f64,
    pub boundary_term: f64,
    pub residual: f64,
    pub relative_residual: f64,
    pub invalid_nodes: usize,
}

impl PestovReport {
    /// `‖VXu‖² − ‖XVu‖² − ‖Xu‖²`; nonnegative up to the residual when `K ≤ 0`
    /// and `u` is compactly supported.
    pub fn inequality_margin(&self) -> f64 {
        self.norm_vxu2 - self.norm_xvu2 - self.norm_xu2
    }

    pub fn h(&self) -> f64 {
        (self.grid.x_top - self.grid.eps) / (self.grid.nx - 1) as f64
    }
}

fn curvature_field(grid: &PhaseGrid) -> Vec<f64> {
    let mut k = Vec::with_capacity(grid.nx * grid.ny);
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            k.push(
                grid.model
                    .gaussian_curvature(&grid.chart_point(i, j))
                    .expect("grid nodes lie at x > 0"),
            );
        }
    }
    k
}

/// Face flux `F_W[f] = ∫ f ρ W^x dy dθ |_{x_top} − |_{ε}` for a field `W` whose
/// x-component is `wx(θ)`.
fn face_flux(grid: &PhaseGrid, f: impl Fn(usize) -> f64, wx: impl Fn(f64) -> f64) -> f64 {
    let mut out = 0.0;
    for (i, sign) in [(grid.nx - 1, 1.0), (0, -1.0)] {
        let x = grid.x(i);
        let mut face = 0.0;
        for j in 0..grid.ny {
            let rho = grid.density(x, grid.y(j));
            for k in 0..grid.nth {
                face += f(grid.idx(i, j, k)) * rho * wx(grid.theta(k));
            }
        }
        out += sign * face * grid.dy * grid.dth;
    }
    out
}

fn boundary_from_parts(grid: &PhaseGrid, vu: &PhaseField, xu: &PhaseField, hu: &PhaseField) -> f64 {
    let fx = face_flux(grid, |n| vu.values[n] * hu.values[n], f64::cos);
    let fh = face_flux(grid, |n| vu.values[n] * xu.values[n], |t| -t.sin());
    fx - fh
}

/// Boundary contribution `F_X[Vu·Hu] − F_H[Vu·Xu]` collected on both x-faces.
pub fn boundary_term(grid: &PhaseGrid, u: &PhaseField) -> f64 {
    let x = FlowDifferencer::new(grid);
    let vu = apply_v(grid, u);
    let xu = x.apply(grid, u);
    let hu = apply_v(grid, &xu).sub(&x.apply(grid, &vu));
    boundary_from_parts(grid, &vu, &xu, &hu)
}

pub fn pestov_residual(grid: &PhaseGrid, u: &PhaseField, with_boundary: bool) -> Result<PestovReport> {
    let x = FlowDifferencer::new(grid);
    pestov_residual_with(grid, &x, u, with_boundary)
}

/// As [`pestov_residual`], reusing precomputed flow landings.
pub fn pestov_residual_with(
    grid: &PhaseGrid,
    x: &FlowDifferencer,
    u: &PhaseField,
    with_boundary: bool,
) -> Result<PestovReport> {
    if u.len() != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "field has {} values, grid has {} nodes",
            u.len(),
            grid.len()
        )));
    }
    if !with_boundary {
        if let Some((lo, hi)) = u.support_x(grid) {
            if lo < 2 || hi + 2 >= grid.nx {
                return Err(Error::UnsupportedSupport);
            }
        }
    }
    let vu = apply_v(grid, u);
    let xu = x.apply(grid, u);
    let vxu = apply_v(grid, &xu);
    let xvu = x.apply(grid, &vu);
    let hu = vxu.sub(&xvu);

    let kf = curvature_field(grid);
    let kvu = PhaseField {
        values: vu
            .values
            .iter()
            .enumerate()
            .map(|(n, v)| kf[n / grid.nth] * v)
            .collect(),
        valid: vu.valid.clone(),
    };
    let norm_vxu2 = norm2(grid, &vxu);
    let norm_xvu2 = norm2(grid, &xvu);
    let curvature_term = inner(grid, &kvu, &vu);
    let norm_xu2 = norm2(grid, &xu);
    let boundary_term = if with_boundary {
        boundary_from_parts(grid, &vu, &xu, &hu)
    } else {
        0.0
    };
    let residual = norm_vxu2 - norm_xvu2 + curvature_term - norm_xu2 - boundary_term;
    let scale = [norm_vxu2, norm_xvu2, curvature_term, norm_xu2, boundary_term]
        .iter()
        .fold(0.0f64, |a, b| a.max(b.abs()));
    let relative_residual = if scale > 0.0 { residual.abs() / scale } else { 0.0 };
    let invalid_nodes = hu.valid.iter().filter(|v| !**v).count();
    Ok(PestovReport {
        grid: GridSpec::of(grid),
        norm_vxu2,
        norm_xvu2,
        curvature_term,
        norm_xu2,
        boundary_term,
        residual,
        relative_residual,
        invalid_nodes,
    })
}

/// Smooth bump on `(a, b)`, zero outside.
pub fn bump(x: f64, a: f64, b: f64) -> f64 {
    let r = (2.0 * x - a - b) / (b - a);
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Smooth test field supported in the middle three quarters of the x-range,
/// with several θ harmonics and y-dependence.
pub fn compact_test_field(grid: &PhaseGrid) -> PhaseField {
    let w = grid.x_top - grid.eps;
    let (a, b) = (grid.eps + 0.125 * w, grid.x_top - 0.125 * w);
    let l = grid.model.period;
    PhaseField::from_fn(grid, |x, y, t| {
        bump(x, a, b)
            * (1.0 + 0.5 * (2.0 * PI * y / l).cos())
            * (0.3 + t.cos() + 0.5 * (2.0 * t).sin() + 0.25 * (3.0 * t + 2.0 * PI * y / l).cos())
    })
}

/// Field that is nonzero on both x-faces.
pub fn face_touching_test_field(grid: &PhaseGrid) -> PhaseField {
    let l = grid.model.period;
    PhaseField::from_fn(grid, |x, y, t| {
        x * x * x * (1.0 + 0.5 * (2.0 * PI * y / l).sin()) * (t.cos() + 0.5 * (2.0 * t).sin())
    })
}

/// Runs the identity on an `n³` grid for each `n` in `levels`.
pub fn refinement_study(
    model: &crate::metric::MetricModel,
    eps: f64,
    x_top: f64,
    levels: &[usize],
    field: impl Fn(&PhaseGrid) -> PhaseField,
    with_boundary: bool,
) -> Result<Vec<PestovReport>> {
    levels
        .iter()
        .map(|&n| {
            let g = PhaseGrid::new(model, eps, x_top, n, n, n)?;
            pestov_residual(&g, &field(&g), with_boundary)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberRow {
    pub x: f64,
    pub y: f64,
    /// `∫|∂_θ w|² dθ`.
    pub lhs: f64,
    /// `∫|w|² dθ`.
    pub rhs: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberIdentityReport {
    pub rows: Vec<FiberRow>,
    pub max_rel_error: f64,
}

/// Checks `∫|∂_θ λf|² dθ = ∫|λf|² dθ` on every base node of the grid.
pub fn fiber_identity_check(grid: &PhaseGrid, f: &dyn OneForm) -> FiberIdentityReport {
    let model = grid.model;
    let mut rows = Vec::with_capacity(grid.nx * grid.ny);
    let mut w = vec![0.0; grid.nth];
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let z = grid.chart_point(i, j);
            for (k, wk) in w.iter_mut().enumerate() {
                let (xi, eta) = model
                    .unit_fiber_point(&z, grid.theta(k))
                    .expect("grid nodes lie at x > 0 on a surface model");
                *wk = lambda_eval(&model, f, &PhaseState::new(z.x, z.y, xi, eta));
            }
            let sub = PhaseGrid {
                nx: 1,
                ny: 1,
                weights: Vec::new(),
                ..grid.clone()
            };
            let vw = apply_v(&sub, &PhaseField::new(w.clone()));
            let lhs: f64 = vw.values.iter().map(|v| v * v).sum::<f64>() * grid.dth;
            let rhs: f64 = w.iter().map(|v| v * v).sum::<f64>() * grid.dth;
            let scale = lhs.max(rhs);
            let rel_error = if scale > 0.0 { (lhs - rhs).abs() / scale } else { 0.0 };
            rows.push(FiberRow { x: z.x, y: z.y[0], lhs, rhs, rel_error });
        }
    }
    let max_rel_error = rows.iter().fold(0.0f64, |a, r| a.max(r.rel_error));
    FiberIdentityReport { rows, max_rel_error }
}
