//! Gas giant metrics `g = dx² + x⁻² h(x, y)` in the boundary-normal chart.
//!
//! Everything is stored in padded 2×2 blocks. For surfaces (`dim = 2`) only
//! the `[0][0]` entry of the boundary block is meaningful; the unused diagonal
//! slot of `h` is set to 1 so that inverses stay well defined.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Mat2 = [[f64; 2]; 2];

/// Index of the chart direction: 0 is `x`, `1 + k` is `y^k`.
pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelKind {
    Euclidean,
    Perturbed { a: f64, b: f64 },
    Torus3d { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricModel {
    pub kind: ModelKind,
    /// Period of every boundary coordinate.
    pub period: f64,
    pub x_ceiling: f64,
}

/// A point of the chart. `y[1]` is ignored for surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChartPoint {
    pub x: f64,
    pub y: [f64; 2],
}

impl ChartPoint {
    pub fn new(x: f64, y: [f64; 2]) -> Self {
        Self { x, y }
    }

    pub fn surface(x: f64, y: f64) -> Self {
        Self { x, y: [y, 0.0] }
    }

    pub fn reduced(self, period: f64) -> Self {
        Self {
            x: self.x,
            y: [self.y[0].rem_euclid(period), self.y[1].rem_euclid(period)],
        }
    }
}

/// `h` together with its first and second chart partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HJet {
    pub h: Mat2,
    pub d: [Mat2; MAX_DIM],
    pub d2: [[Mat2; MAX_DIM]; MAX_DIM],
}

/// The same jet for `h⁻¹`, plus the original.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Local {
    pub m: usize,
    pub x: f64,
    pub h: HJet,
    pub hinv: Mat2,
    pub dhinv: [Mat2; MAX_DIM],
    pub d2hinv: [[Mat2; MAX_DIM]; MAX_DIM],
}

pub type Christoffel = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];

fn zero2() -> Mat2 {
    [[0.0; 2]; 2]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = zero2();
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_inv(a: &Mat2) -> Mat2 {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ]
}

pub fn quad(a: &Mat2, u: &[f64; 2], v: &[f64; 2]) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += a[i][j] * u[i] * v[j];
        }
    }
    s
}

pub fn mat_vec(a: &Mat2, v: &[f64; 2]) -> [f64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = *a;
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] -= b[i][j];
        }
    }
    c
}

fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = *a;
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] += b[i][j];
        }
    }
    c
}

/// Jet of `φ²` from the jet of a scalar `φ`.
fn square_jet(phi: f64, dphi: [f64; MAX_DIM], ddphi: [[f64; MAX_DIM]; MAX_DIM]) -> (f64, [f64; MAX_DIM], [[f64; MAX_DIM]; MAX_DIM]) {
    let mut d = [0.0; MAX_DIM];
    let mut d2 = [[0.0; MAX_DIM]; MAX_DIM];
    for a in 0..MAX_DIM {
        d[a] = 2.0 * phi * dphi[a];
        for b in 0..MAX_DIM {
            d2[a][b] = 2.0 * (dphi[a] * dphi[b] + phi * ddphi[a][b]);
        }
    }
    (phi * phi, d, d2)
}

impl MetricModel {
    pub fn euclidean() -> Self {
        Self {
            kind: ModelKind::Euclidean,
            period: 1.0,
            x_ceiling: 2.0,
        }
    }

    pub fn perturbed() -> Self {
        Self {
            kind: ModelKind::Perturbed { a: 0.3, b: 0.1 },
            period: 1.0,
            x_ceiling: 2.0,
        }
    }

    pub fn torus3d() -> Self {
        Self {
            kind: ModelKind::Torus3d { a: 0.3, b: 0.1 },
            period: 2.0 * PI,
            x_ceiling: 2.0,
        }
    }

    pub fn builtins() -> [Self; 3] {
        [Self::euclidean(), Self::perturbed(), Self::torus3d()]
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = period;
        self
    }

    pub fn with_x_ceiling(mut self, x_ceiling: f64) -> Self {
        self.x_ceiling = x_ceiling;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Euclidean => "euclidean",
            ModelKind::Perturbed { .. } => "perturbed",
            ModelKind::Torus3d { .. } => "torus3d",
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ModelKind::Torus3d { .. } => 3,
            _ => 2,
        }
    }

    /// Number of boundary coordinates, `dim − 1`.
    pub fn m(&self) -> usize {
        self.dim() - 1
    }

    /// `h` and its partials at `(x, y)`.
    pub fn h_jet(&self, x: f64, y: &[f64; 2]) -> HJet {
        let mut jet = HJet {
            h: [[1.0, 0.0], [0.0, 1.0]],
            d: [zero2(); MAX_DIM],
            d2: [[zero2(); MAX_DIM]; MAX_DIM],
        };
        let kappa = 2.0 * PI / self.period;
        match self.kind {
            ModelKind::Euclidean => {}
            ModelKind::Perturbed { a, b } => {
                let (c, s) = ((kappa * y[0]).cos(), (kappa * y[0]).sin());
                let phi = 1.0 + a * x * c + b * x * x;
                let dphi = [a * c + 2.0 * b * x, -a * x * kappa * s, 0.0];
                let mut dd = [[0.0; MAX_DIM]; MAX_DIM];
                dd[0][0] = 2.0 * b;
                dd[0][1] = -a * kappa * s;
                dd[1][0] = dd[0][1];
                dd[1][1] = -a * x * kappa * kappa * c;
                let (h, d, d2) = square_jet(phi, dphi, dd);
                jet.h[0][0] = h;
                for p in 0..MAX_DIM {
                    jet.d[p][0][0] = d[p];
                    for q in 0..MAX_DIM {
                        jet.d2[p][q][0][0] = d2[p][q];
                    }
                }
            }
            ModelKind::Torus3d { a, b } => {
                // φ₁ = 1 + a x cos κy¹, φ₂ = 1 + b x sin κy²
                let (c1, s1) = ((kappa * y[0]).cos(), (kappa * y[0]).sin());
                let (c2, s2) = ((kappa * y[1]).cos(), (kappa * y[1]).sin());
                let phi1 = 1.0 + a * x * c1;
                let mut dd1 = [[0.0; MAX_DIM]; MAX_DIM];
                dd1[0][1] = -a * kappa * s1;
                dd1[1][0] = dd1[0][1];
                dd1[1][1] = -a * x * kappa * kappa * c1;
                let j1 = square_jet(phi1, [a * c1, -a * x * kappa * s1, 0.0], dd1);
                let phi2 = 1.0 + b * x * s2;
                let mut dd2 = [[0.0; MAX_DIM]; MAX_DIM];
                dd2[0][2] = b * kappa * c2;
                dd2[2][0] = dd2[0][2];
                dd2[2][2] = -b * x * kappa * kappa * s2;
                let j2 = square_jet(phi2, [b * s2, 0.0, b * x * kappa * c2], dd2);
                jet.h[0][0] = j1.0;
                jet.h[1][1] = j2.0;
                for p in 0..MAX_DIM {
                    jet.d[p][0][0] = j1.1[p];
                    jet.d[p][1][1] = j2.1[p];
                    for q in 0..MAX_DIM {
                        jet.d2[p][q][0][0] = j1.2[p][q];
                        jet.d2[p][q][1][1] = j2.2[p][q];
                    }
                }
            }
        }
        jet
    }

    pub fn h(&self, x: f64, y: &[f64; 2]) -> Mat2 {
        self.h_jet(x, y).h
    }

    /// `h`, `h⁻¹` and their derivatives up to second order.
    pub fn local(&self, x: f64, y: &[f64; 2]) -> Local {
        let h = self.h_jet(x, y);
        let hinv = mat_inv(&h.h);
        let mut dhinv = [zero2(); MAX_DIM];
        // d(h⁻¹) = −h⁻¹ (dh) h⁻¹
        let mut hi_dh = [zero2(); MAX_DIM];
        for a in 0..MAX_DIM {
            hi_dh[a] = mat_mul(&hinv, &h.d[a]);
            let t = mat_mul(&hi_dh[a], &hinv);
            dhinv[a] = sub(&zero2(), &t);
        }
        let mut d2hinv = [[zero2(); MAX_DIM]; MAX_DIM];
        for a in 0..MAX_DIM {
            for b in 0..MAX_DIM {
                let ab = mat_mul(&mat_mul(&hi_dh[a], &hi_dh[b]), &hinv);
                let ba = mat_mul(&mat_mul(&hi_dh[b], &hi_dh[a]), &hinv);
                let dd = mat_mul(&mat_mul(&hinv, &h.d2[a][b]), &hinv);
                d2hinv[a][b] = sub(&add(&ab, &ba), &dd);
            }
        }
        Local {
            m: self.m(),
            x,
            h,
            hinv,
            dhinv,
            d2hinv,
        }
    }

    /// Inverse metric `g^{μν}` (block diagonal, degenerate at `x = 0`).
    pub fn cometric(&self, z: &ChartPoint) -> [[f64; MAX_DIM]; MAX_DIM] {
        let hinv = mat_inv(&self.h(z.x, &z.y));
        let mut g = [[0.0; MAX_DIM]; MAX_DIM];
        g[0][0] = 1.0;
        for i in 0..self.m() {
            for j in 0..self.m() {
                g[1 + i][1 + j] = z.x * z.x * hinv[i][j];
            }
        }
        g
    }

    /// Metric `g_{μν}`; requires `x > 0`.
    pub fn metric(&self, z: &ChartPoint) -> Result<[[f64; MAX_DIM]; MAX_DIM]> {
        if z.x <= 0.0 {
            return Err(Error::SingularAtBoundary { what: "metric" });
        }
        let h = self.h(z.x, &z.y);
        let mut g = [[0.0; MAX_DIM]; MAX_DIM];
        g[0][0] = 1.0;
        for i in 0..self.m() {
            for j in 0..self.m() {
                g[1 + i][1 + j] = h[i][j] / (z.x * z.x);
            }
        }
        Ok(g)
    }

    /// Christoffel symbols `Γ[μ][ν][λ] = Γ^μ_{νλ}`.
    pub fn christoffel(&self, z: &ChartPoint) -> Result<Christoffel> {
        if z.x <= 0.0 {
            return Err(Error::SingularAtBoundary { what: "christoffel" });
        }
        Ok(self.christoffel_unchecked(z))
    }

    /// Christoffel symbols without the boundary check; any `x ≠ 0` works.
    pub(crate) fn christoffel_unchecked(&self, z: &ChartPoint) -> Christoffel {
        let x = z.x;
        let m = self.m();
        let jet = self.h_jet(x, &z.y);
        let hinv = mat_inv(&jet.h);
        let mut g = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
        for i in 0..m {
            for j in 0..m {
                let mut s = 0.0;
                for k in 0..m {
                    s += hinv[i][k] * jet.d[0][k][j];
                }
                let v = 0.5 * s - if i == j { 1.0 / x } else { 0.0 };
                g[1 + i][1 + j][0] = v;
                g[1 + i][0][1 + j] = v;
                g[0][1 + i][1 + j] = jet.h[i][j] / (x * x * x) - 0.5 * jet.d[0][i][j] / (x * x);
                for k in 0..m {
                    let mut s = 0.0;
                    for l in 0..m {
                        s += hinv[i][l]
                            * (jet.d[1 + j][l][k] + jet.d[1 + k][l][j] - jet.d[1 + l][j][k]);
                    }
                    g[1 + i][1 + j][1 + k] = 0.5 * s;
                }
            }
        }
        g
    }

    /// Gaussian curvature of a surface model.
    pub fn gaussian_curvature(&self, z: &ChartPoint) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::Unsupported(format!(
                "gaussian curvature needs dim 2, model has dim {}",
                self.dim()
            )));
        }
        let x = z.x;
        if x <= 0.0 {
            return Err(Error::SingularAtBoundary { what: "gaussian curvature" });
        }
        // g = dx² + G dy² with √G = φ/x, φ = √h; K = −(√G)_xx / √G
        let jet = self.h_jet(x, &z.y);
        let h = jet.h[0][0];
        let hx = jet.d[0][0][0];
        let hxx = jet.d2[0][0][0][0];
        let phi = h.sqrt();
        let phi_x = hx / (2.0 * phi);
        let phi_xx = hxx / (2.0 * phi) - hx * hx / (4.0 * phi * phi * phi);
        Ok(-(phi_xx * x * x - 2.0 * x * phi_x + 2.0 * phi) / (x * x * phi))
    }

    /// `II(η, η) = x h^{ij}η_iη_j + ½ x² ∂_x h^{ij} η_iη_j`.
    pub fn second_fundamental_form(&self, z: &ChartPoint, eta: &[f64; 2]) -> f64 {
        let loc = self.local(z.x, &z.y);
        let x = z.x;
        x * quad(&loc.hinv, eta, eta) + 0.5 * x * x * quad(&loc.dhinv[0], eta, eta)
    }

    /// Unit covector at angle `θ` in the fiber of a surface model.
    pub fn unit_fiber_point(&self, z: &ChartPoint, theta: f64) -> Result<(f64, [f64; 2])> {
        if self.dim() != 2 {
            return Err(Error::Unsupported("unit fiber parametrization needs dim 2".into()));
        }
        if z.x <= 0.0 {
            return Err(Error::SingularAtBoundary { what: "unit fiber point" });
        }
        let h11 = 1.0 / self.h(z.x, &z.y)[0][0];
        Ok((theta.cos(), [theta.sin() / (z.x * h11.sqrt()), 0.0]))
    }

    /// Inverse of [`unit_fiber_point`](Self::unit_fiber_point) for a unit covector.
    pub fn fiber_angle(&self, z: &ChartPoint, xi: f64, eta: &[f64; 2]) -> f64 {
        let h11 = 1.0 / self.h(z.x, &z.y)[0][0];
        (z.x * h11.sqrt() * eta[0]).atan2(xi)
    }

    /// `|ζ|²_g = ξ² + x² h^{ij} η_iη_j`.
    pub fn conorm2(&self, z: &ChartPoint, xi: f64, eta: &[f64; 2]) -> f64 {
        let hinv = mat_inv(&self.h(z.x, &z.y));
        xi * xi + z.x * z.x * self.boundary_quad(&hinv, eta)
    }

    /// `A^{ij} η_i η_j` restricted to the model's boundary dimension.
    pub fn boundary_quad(&self, a: &Mat2, eta: &[f64; 2]) -> f64 {
        let m = self.m();
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += a[i][j] * eta[i] * eta[j];
            }
        }
        s
    }

    /// `A^{ij} u_i v_j` restricted to the model's boundary dimension.
    pub fn boundary_quad_bilinear(&self, a: &Mat2, u: &[f64; 2], v: &[f64; 2]) -> f64 {
        let m = self.m();
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += a[i][j] * u[i] * v[j];
            }
        }
        s
    }

    /// Smallest eigenvalue of the `m×m` block of `h`.
    pub fn h_min_eigenvalue(&self, x: f64, y: &[f64; 2]) -> f64 {
        let h = self.h(x, y);
        if self.m() == 1 {
            return h[0][0];
        }
        let tr = h[0][0] + h[1][1];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        0.5 * tr - (0.25 * tr * tr - det).max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_cometric_and_christoffel() {
        let m = MetricModel::euclidean();
        let z = ChartPoint::surface(0.5, 0.0);
        assert_relative_eq!(m.cometric(&z)[1][1], 0.25);
        let g = m.christoffel(&z).unwrap();
        assert_relative_eq!(g[1][1][0], -2.0);
        assert_relative_eq!(g[0][1][1], 8.0);
        assert_eq!(g[0][0][0], 0.0);
        assert!(m.cometric(&ChartPoint::surface(0.0, 0.3))[1][1] == 0.0);
    }

    #[test]
    fn boundary_singular_quantities_error() {
        let m = MetricModel::perturbed();
        let z = ChartPoint::surface(0.0, 0.2);
        assert!(matches!(m.christoffel(&z), Err(Error::SingularAtBoundary { .. })));
        assert!(matches!(m.gaussian_curvature(&z), Err(Error::SingularAtBoundary { .. })));
        assert!(matches!(
            MetricModel::torus3d().gaussian_curvature(&ChartPoint::surface(0.3, 0.0)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn euclidean_curvature_matches_warped_product() {
        let m = MetricModel::euclidean();
        // dx² + f(x)² dy² with f = 1/x has K = −f''/f = −2/x²
        for x in [0.5, 1.0, 0.1] {
            let k = m.gaussian_curvature(&ChartPoint::surface(x, 0.4)).unwrap();
            assert_relative_eq!(k, -2.0 / (x * x), max_relative = 1e-14);
        }
    }

    #[test]
    fn perturbed_curvature_tends_to_minus_two_over_x_squared() {
        let m = MetricModel::perturbed();
        for y in [0.0, 0.3, 0.77] {
            let mut prev = f64::INFINITY;
            for x in [1e-1, 1e-2, 1e-3] {
                let kx2 = m.gaussian_curvature(&ChartPoint::surface(x, y)).unwrap() * x * x;
                let dev = (kx2 + 2.0).abs();
                assert!(dev < prev);
                prev = dev;
            }
            assert!(prev < 1e-2);
        }
    }

    #[test]
    fn cometric_matches_direct_inverse() {
        let m = MetricModel::perturbed();
        let z = ChartPoint::surface(0.2, 0.3);
        // h = φ², inverted by hand
        let phi = 1.0 + 0.3 * 0.2 * (2.0 * PI * 0.3).cos() + 0.1 * 0.04;
        assert_relative_eq!(m.cometric(&z)[1][1], 0.04 / (phi * phi), max_relative = 1e-14);
    }

    #[test]
    fn second_fundamental_form_examples() {
        let m = MetricModel::euclidean();
        assert_relative_eq!(m.second_fundamental_form(&ChartPoint::surface(0.25, 0.0), &[2.0, 0.0]), 1.0);
        let p = MetricModel::perturbed();
        assert_eq!(p.second_fundamental_form(&ChartPoint::surface(0.0, 0.1), &[3.0, 0.0]), 0.0);
    }

    #[test]
    fn unit_fiber_examples() {
        let m = MetricModel::euclidean();
        let z = ChartPoint::surface(0.5, 0.1);
        let (xi, eta) = m.unit_fiber_point(&z, 0.0).unwrap();
        assert_eq!((xi, eta[0]), (1.0, 0.0));
        let (xi, eta) = m.unit_fiber_point(&z, PI / 2.0).unwrap();
        assert!(xi.abs() < 1e-16);
        assert_relative_eq!(eta[0], 2.0, max_relative = 1e-15);
    }

    fn fd_jet_check(model: MetricModel, x: f64, y: [f64; 2]) {
        let e = 1e-5;
        let jet = model.h_jet(x, &y);
        let shift = |a: usize, s: f64| {
            let mut xx = x;
            let mut yy = y;
            if a == 0 {
                xx += s;
            } else {
                yy[a - 1] += s;
            }
            model.h_jet(xx, &yy)
        };
        let m = model.m();
        for a in 0..model.dim() {
            let p = shift(a, e);
            let q = shift(a, -e);
            for i in 0..m {
                for j in 0..m {
                    let fd = (p.h[i][j] - q.h[i][j]) / (2.0 * e);
                    assert!((fd - jet.d[a][i][j]).abs() <= 1e-6 * (1.0 + fd.abs()));
                    for b in 0..model.dim() {
                        let fd2 = (p.d[b][i][j] - q.d[b][i][j]) / (2.0 * e);
                        assert!((fd2 - jet.d2[a][b][i][j]).abs() <= 1e-6 * (1.0 + fd2.abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn supplied_derivatives_match_central_differences() {
        for model in MetricModel::builtins() {
            for &(x, y) in &[(0.1, [0.2, 0.7]), (1.3, [0.9, 2.1]), (0.55, [3.0, 5.0])] {
                fd_jet_check(model, x, y);
            }
        }
    }

    #[test]
    fn inverse_jet_matches_differences_of_inverse() {
        let model = MetricModel::torus3d();
        let (x, y) = (0.4, [0.3, 1.2]);
        let loc = model.local(x, &y);
        let e = 1e-5;
        for a in 0..3 {
            let mut yp = y;
            let mut ym = y;
            let (xp, xm) = if a == 0 {
                (x + e, x - e)
            } else {
                yp[a - 1] += e;
                ym[a - 1] -= e;
                (x, x)
            };
            let p = model.local(xp, &yp);
            let q = model.local(xm, &ym);
            for i in 0..2 {
                for j in 0..2 {
                    let fd = (p.hinv[i][j] - q.hinv[i][j]) / (2.0 * e);
                    assert!((fd - loc.dhinv[a][i][j]).abs() < 1e-8);
                    for b in 0..3 {
                        let fd2 = (p.dhinv[b][i][j] - q.dhinv[b][i][j]) / (2.0 * e);
                        assert!((fd2 - loc.d2hinv[a][b][i][j]).abs() < 1e-7);
                    }
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_model() -> impl Strategy<Value = MetricModel> {
            prop_oneof![
                Just(MetricModel::euclidean()),
                Just(MetricModel::perturbed()),
                Just(MetricModel::torus3d())
            ]
        }

        proptest! {
            #[test]
            fn h_is_positive_definite(model in any_model(), t in 0.0..1.0f64, y0 in 0.0..7.0f64, y1 in 0.0..7.0f64) {
                let x = t * model.x_ceiling;
                prop_assert!(model.h_min_eigenvalue(x, &[y0, y1]) > 0.0);
            }

            #[test]
            fn christoffel_symmetric(model in any_model(), x in 0.01..2.0f64, y0 in 0.0..7.0f64, y1 in 0.0..7.0f64) {
                let g = model.christoffel(&ChartPoint::new(x, [y0, y1])).unwrap();
                for mu in 0..3 { for nu in 0..3 { for la in 0..3 {
                    prop_assert_eq!(g[mu][nu][la], g[mu][la][nu]);
                }}}
            }

            #[test]
            fn curvature_times_x_squared_bounded(y in 0.0..1.0f64, lx in -3.0..-1.0f64) {
                let x = 10f64.powf(lx);
                for model in [MetricModel::euclidean(), MetricModel::perturbed()] {
                    let kx2 = model.gaussian_curvature(&ChartPoint::surface(x, y)).unwrap() * x * x;
                    prop_assert!((-2.5..=-1.5).contains(&kx2));
                }
            }

            #[test]
            fn unit_fiber_point_has_unit_norm(x in 1e-3..2.0f64, y in 0.0..1.0f64, th in 0.0..6.3f64) {
                let m = MetricModel::perturbed();
                let z = ChartPoint::surface(x, y);
                let (xi, eta) = m.unit_fiber_point(&z, th).unwrap();
                prop_assert!((m.conorm2(&z, xi, &eta) - 1.0).abs() < 1e-14);
                let back = m.fiber_angle(&z, xi, &eta);
                prop_assert!(((back - th).rem_euclid(2.0 * PI) + 1e-12).rem_euclid(2.0 * PI) < 1e-10);
            }

            #[test]
            fn fiber_curve_has_unit_vertical_speed(x in 1e-3..2.0f64, y in 0.0..1.0f64, th in 0.0..6.3f64) {
                // Sasaki vertical speed g^{μν} ċ_μ ċ_ν of θ ↦ ζ(θ)
                let m = MetricModel::perturbed();
                let z = ChartPoint::surface(x, y);
                let h11 = 1.0 / m.h(x, &z.y)[0][0];
                let dxi = -th.sin();
                let deta = th.cos() / (x * h11.sqrt());
                let g = m.cometric(&z);
                prop_assert!((g[0][0] * dxi * dxi + g[1][1] * deta * deta - 1.0).abs() < 1e-12);
            }
        }
    }
}
