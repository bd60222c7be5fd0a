//! Phase-space operators on a [`PhaseGrid`]: `V = ∂_θ`, the geodesic vector
//! field `X` by short-flow differencing, and `H = VX − XV`.

use super::grid::PhaseGrid;
use crate::flow::{fixed_flow_step, PhaseState};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Values of a function on the phase grid, with a per-node validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl PhaseField {
    pub fn new(values: Vec<f64>) -> Self {
        let valid = vec![true; values.len()];
        Self { values, valid }
    }

    pub fn from_fn<F: Fn(f64, f64, f64) -> f64>(grid: &PhaseGrid, u: F) -> Self {
        Self::new(grid.sample(u))
    }

    pub fn zeros(grid: &PhaseGrid) -> Self {
        Self::new(vec![0.0; grid.len()])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Range of x-slab indices holding nonzero values, if any.
    pub fn support_x(&self, grid: &PhaseGrid) -> Option<(usize, usize)> {
        let slab = grid.ny * grid.nth;
        let nz: Vec<usize> = (0..grid.nx)
            .filter(|&i| self.values[i * slab..(i + 1) * slab].iter().any(|v| *v != 0.0))
            .collect();
        Some((*nz.first()?, *nz.last()?))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn combine(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
            valid: self.valid.iter().zip(&other.valid).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
            valid: self.valid.clone(),
        }
    }
}

/// `Vu = ∂_θ u`, spectrally along each fiber. The Nyquist mode is dropped so
/// the operator is exactly antisymmetric.
pub fn apply_v(grid: &PhaseGrid, u: &PhaseField) -> PhaseField {
    let n = grid.nth;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<f64>> = u.values.iter().map(|v| Complex::new(*v, 0.0)).collect();
    fwd.process(&mut buf);
    let scale = 1.0 / n as f64;
    for fiber in buf.chunks_mut(n) {
        for (k, c) in fiber.iter_mut().enumerate() {
            let freq = if 2 * k < n {
                k as f64
            } else if 2 * k == n {
                0.0
            } else {
                k as f64 - n as f64
            };
            *c = Complex::new(-c.im, c.re) * (freq * scale);
        }
    }
    inv.process(&mut buf);
    PhaseField {
        values: buf.iter().map(|c| c.re).collect(),
        valid: u.valid.clone(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Landing {
    x: f64,
    y: f64,
    theta: f64,
}

/// Precomputed `±δt`, `±2δt` flow landings of every grid node; applying `X`
/// then costs four tricubic interpolations per node.
#[derive(Debug, Clone)]
pub struct FlowDifferencer {
    pub dt: f64,
    // [φ_δt, φ_−δt, φ_2δt, φ_−2δt] per node
    landings: Vec<[Landing; 4]>,
    valid: Vec<bool>,
}

impl FlowDifferencer {
    pub fn new(grid: &PhaseGrid) -> Self {
        let dt = grid.min_spacing() / 4.0;
        let model = grid.model;
        let slab = grid.ny * grid.nth;
        let land = |s: &PhaseState, h: f64| {
            let e = fixed_flow_step(&model, s, h);
            let z = e.z();
            let theta = model.fiber_angle(&z, e.xi, &e.eta);
            Landing { x: e.x, y: e.y[0], theta }
        };
        let landings: Vec<[Landing; 4]> = (0..grid.nx)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut row = Vec::with_capacity(slab);
                for j in 0..grid.ny {
                    let z = grid.chart_point(i, j);
                    for k in 0..grid.nth {
                        let (xi, eta) = model
                            .unit_fiber_point(&z, grid.theta(k))
                            .expect("grid nodes lie at x > 0 on a surface model");
                        let s = PhaseState::new(z.x, z.y, xi, eta);
                        row.push([dt, -dt, 2.0 * dt, -2.0 * dt].map(|h| land(&s, h)));
                    }
                }
                row
            })
            .collect();
        let lo = grid.eps - grid.dx;
        let hi = grid.x_top + grid.dx;
        let valid = landings
            .iter()
            .map(|l| l.iter().all(|p| p.x.is_finite() && p.x >= lo && p.x <= hi))
            .collect();
        Self { dt, landings, valid }
    }

    /// Fourth-order symmetric difference of `u` along the flow.
    pub fn apply(&self, grid: &PhaseGrid, u: &PhaseField) -> PhaseField {
        let slab = grid.ny * grid.nth;
        let values: Vec<f64> = (0..grid.nx)
            .into_par_iter()
            .flat_map_iter(|i| {
                (i * slab..(i + 1) * slab).map(|n| {
                    if !self.valid[n] {
                        return f64::NAN;
                    }
                    let [p1, m1, p2, m2] = self.landings[n].map(|l| interpolate(grid, &u.values, &l));
                    (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * self.dt)
                })
            })
            .collect();
        let valid = self.valid.iter().zip(&u.valid).map(|(a, b)| *a && *b).collect();
        PhaseField { values, valid }
    }
}

fn lagrange4(t: f64) -> [f64; 4] {
    [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ]
}

fn periodic_stencil(s: f64, n: usize) -> ([usize; 4], [f64; 4]) {
    let f = s.floor();
    let w = lagrange4(s - f + 1.0);
    let base = f as i64 - 1;
    let n = n as i64;
    let idx = [0, 1, 2, 3].map(|o| (base + o).rem_euclid(n) as usize);
    (idx, w)
}

fn interpolate(grid: &PhaseGrid, u: &[f64], p: &Landing) -> f64 {
    let sx = (p.x - grid.eps) / grid.dx;
    let i0 = (sx.floor() as i64 - 1).clamp(0, grid.nx as i64 - 4) as usize;
    let wx = lagrange4(sx - i0 as f64);
    let (jy, wy) = periodic_stencil(p.y / grid.dy, grid.ny);
    let (kt, wt) = periodic_stencil(p.theta / grid.dth, grid.nth);
    let mut acc = 0.0;
    for (a, wa) in wx.iter().enumerate() {
        let mut acc_y = 0.0;
        for (jj, wb) in jy.iter().zip(&wy) {
            let base = grid.idx(i0 + a, *jj, 0);
            let mut acc_t = 0.0;
            for (kk, wc) in kt.iter().zip(&wt) {
                acc_t += wc * u[base + kk];
            }
            acc_y += wb * acc_t;
        }
        acc += wa * acc_y;
    }
    acc
}

pub fn apply_x(grid: &PhaseGrid, u: &PhaseField) -> PhaseField {
    FlowDifferencer::new(grid).apply(grid, u)
}

/// `Hu = V(Xu) − X(Vu)`.
pub fn apply_h(grid: &PhaseGrid, u: &PhaseField) -> PhaseField {
    let x = FlowDifferencer::new(grid);
    apply_h_with(grid, &x, u)
}

pub(crate) fn apply_h_with(grid: &PhaseGrid, x: &FlowDifferencer, u: &PhaseField) -> PhaseField {
    let vxu = apply_v(grid, &x.apply(grid, u));
    let xvu = x.apply(grid, &apply_v(grid, u));
    vxu.sub(&xvu)
}

/// `Σ w a b` over valid nodes, summed per x-slab then in slab order.
pub fn inner(grid: &PhaseGrid, a: &PhaseField, b: &PhaseField) -> f64 {
    let slab = grid.ny * grid.nth;
    let partial: Vec<f64> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            (i * slab..(i + 1) * slab)
                .filter(|&n| a.valid[n] && b.valid[n])
                .map(|n| grid.weights[n] * a.values[n] * b.values[n])
                .sum()
        })
        .collect();
    partial.iter().sum()
}

pub fn norm2(grid: &PhaseGrid, a: &PhaseField) -> f64 {
    inner(grid, a, a)
}
