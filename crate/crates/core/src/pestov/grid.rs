//! Uniform phase grids on `[ε, x_top] × ℝ/L × ℝ/2π` for surface models.

use crate::error::{Error, Result};
use crate::metric::{ChartPoint, MetricModel};
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct PhaseGrid {
    pub model: MetricModel,
    pub eps: f64,
    pub x_top: f64,
    pub nx: usize,
    pub ny: usize,
    pub nth: usize,
    pub dx: f64,
    pub dy: f64,
    pub dth: f64,
    /// `dΣ` weight per node (θ fastest, then y, then x).
    pub weights: Vec<f64>,
}

impl PhaseGrid {
    pub fn new(model: &MetricModel, eps: f64, x_top: f64, nx: usize, ny: usize, nth: usize) -> Result<Self> {
        if model.dim() != 2 {
            return Err(Error::InvalidGrid("phase grids need a surface model".into()));
        }
        if !(eps > 0.0 && eps < x_top && x_top <= model.x_ceiling) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < eps < x_top <= x_ceiling, got eps = {eps}, x_top = {x_top}"
            )));
        }
        if nx < 4 || ny < 4 || nth < 4 {
            return Err(Error::InvalidGrid("every direction needs at least 4 nodes".into()));
        }
        let dx = (x_top - eps) / (nx - 1) as f64;
        let dy = model.period / ny as f64;
        let dth = 2.0 * PI / nth as f64;
        let mut g = Self {
            model: *model,
            eps,
            x_top,
            nx,
            ny,
            nth,
            dx,
            dy,
            dth,
            weights: Vec::new(),
        };
        let mut w = vec![0.0; g.len()];
        for i in 0..nx {
            let x = g.x(i);
            let trap = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
            for j in 0..ny {
                let rho = g.density(x, g.y(j));
                let base = g.idx(i, j, 0);
                w[base..base + nth].fill(rho * trap * dx * dy * dth);
            }
        }
        g.weights = w;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nth
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.ny + j) * self.nth + k
    }

    pub fn x(&self, i: usize) -> f64 {
        self.eps + i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.dy
    }

    pub fn theta(&self, k: usize) -> f64 {
        k as f64 * self.dth
    }

    /// Node coordinates `(x, y, θ)` for a flat index.
    pub fn coords(&self, n: usize) -> (f64, f64, f64) {
        let k = n % self.nth;
        let j = (n / self.nth) % self.ny;
        let i = n / (self.nth * self.ny);
        (self.x(i), self.y(j), self.theta(k))
    }

    /// Riemannian volume density `√h / x` of the surface.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        self.model.h(x, &[y, 0.0])[0][0].sqrt() / x
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Samples `u(x, y, θ)` at every node.
    pub fn sample<F: Fn(f64, f64, f64) -> f64>(&self, u: F) -> Vec<f64> {
        (0..self.len())
            .map(|n| {
                let (x, y, t) = self.coords(n);
                u(x, y, t)
            })
            .collect()
    }

    pub fn chart_point(&self, i: usize, j: usize) -> ChartPoint {
        ChartPoint::surface(self.x(i), self.y(j))
    }

    /// Smallest node spacing over the three directions.
    pub fn min_spacing(&self) -> f64 {
        self.dx.min(self.dy).min(self.dth)
    }
}
