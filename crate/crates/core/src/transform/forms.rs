//! One-forms `f = f₀ dx + f_i dy^i` and scalar potentials with derivative
//! access. Component index 0 is `dx`, `1 + k` is `dy^k`; the same convention
//! is used for the differentiation slot.

use super::cutoff::Cutoff;
use crate::quad;
use std::sync::Arc;

/// Values `v[μ] = f_μ` and partials `d[a][μ] = ∂_a f_μ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FormJet {
    pub v: [f64; 3],
    pub d: [[f64; 3]; 3],
}

fn shifted(x: f64, y: &[f64; 2], a: usize, e: f64) -> (f64, [f64; 2]) {
    let mut yy = *y;
    if a == 0 {
        (x + e, yy)
    } else {
        yy[a - 1] += e;
        (x, yy)
    }
}

pub trait OneForm: Send + Sync {
    fn eval(&self, x: f64, y: &[f64; 2]) -> [f64; 3];

    /// Partials by central differences unless overridden.
    fn jet(&self, x: f64, y: &[f64; 2]) -> FormJet {
        let e = 1e-5;
        let mut j = FormJet {
            v: self.eval(x, y),
            ..FormJet::default()
        };
        for a in 0..3 {
            let (xp, yp) = shifted(x, y, a, e);
            let (xm, ym) = shifted(x, y, a, -e);
            let p = self.eval(xp, &yp);
            let m = self.eval(xm, &ym);
            for mu in 0..3 {
                j.d[a][mu] = (p[mu] - m[mu]) / (2.0 * e);
            }
        }
        j
    }

    /// All components vanish for `x` beyond this depth.
    fn support_x(&self) -> f64 {
        f64::INFINITY
    }

    /// Declared `k` with every component in `x^k·C^∞`.
    fn vanishing_order(&self) -> u32 {
        0
    }
}

pub trait ScalarPotential: Send + Sync {
    fn p(&self, x: f64, y: &[f64; 2]) -> f64;
    fn dp(&self, x: f64, y: &[f64; 2]) -> [f64; 3];
    fn d2p(&self, x: f64, y: &[f64; 2]) -> [[f64; 3]; 3];
    fn boundary_zero(&self) -> bool;
    fn support_x(&self) -> f64 {
        f64::INFINITY
    }
    /// Vanishing order of `dp` at the boundary.
    fn dp_order(&self) -> u32 {
        0
    }
}

impl<T: OneForm + ?Sized> OneForm for Arc<T> {
    fn eval(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
        (**self).eval(x, y)
    }
    fn jet(&self, x: f64, y: &[f64; 2]) -> FormJet {
        (**self).jet(x, y)
    }
    fn support_x(&self) -> f64 {
        (**self).support_x()
    }
    fn vanishing_order(&self) -> u32 {
        (**self).vanishing_order()
    }
}

/// `cos(k·y + φ)` with derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trig {
    pub amp: f64,
    pub k: [f64; 2],
    pub phase: f64,
}

impl Trig {
    pub fn new(amp: f64, k: [f64; 2], phase: f64) -> Self {
        Self { amp, k, phase }
    }

    pub fn constant(amp: f64) -> Self {
        Self::new(amp, [0.0, 0.0], 0.0)
    }

    fn arg(&self, y: &[f64; 2]) -> f64 {
        self.k[0] * y[0] + self.k[1] * y[1] + self.phase
    }

    pub fn value(&self, y: &[f64; 2]) -> f64 {
        self.amp * self.arg(y).cos()
    }

    /// Gradient in `(y¹, y²)`.
    pub fn grad(&self, y: &[f64; 2]) -> [f64; 2] {
        let s = -self.amp * self.arg(y).sin();
        [s * self.k[0], s * self.k[1]]
    }

    pub fn hess(&self, y: &[f64; 2]) -> [[f64; 2]; 2] {
        let c = -self.amp * self.arg(y).cos();
        [
            [c * self.k[0] * self.k[0], c * self.k[0] * self.k[1]],
            [c * self.k[1] * self.k[0], c * self.k[1] * self.k[1]],
        ]
    }
}

/// `x^k χ(x)` and two derivatives.
fn radial(k: u32, cut: Option<&Cutoff>, x: f64, decay: bool) -> [f64; 3] {
    let kf = k as f64;
    let pw = |j: i32| if j < 0 { 0.0 } else { x.powi(j) };
    let mut u = [
        pw(k as i32),
        kf * pw(k as i32 - 1),
        kf * (kf - 1.0) * pw(k as i32 - 2),
    ];
    if decay {
        let e = (-x).exp();
        u = [u[0] * e, (u[1] - u[0]) * e, (u[2] - 2.0 * u[1] + u[0]) * e];
    }
    match cut {
        None => u,
        Some(c) => {
            let ch = c.jet(x);
            [
                u[0] * ch[0],
                u[1] * ch[0] + u[0] * ch[1],
                u[2] * ch[0] + 2.0 * u[1] * ch[1] + u[0] * ch[2],
            ]
        }
    }
}

/// `p = x^power e^{−x} χ(x) T(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpPotential {
    pub power: u32,
    pub trig: Trig,
    pub cutoff: Cutoff,
}

impl BumpPotential {
    pub fn new(power: u32, trig: Trig, cutoff: Cutoff) -> Self {
        Self { power, trig, cutoff }
    }
}

impl ScalarPotential for BumpPotential {
    fn p(&self, x: f64, y: &[f64; 2]) -> f64 {
        radial(self.power, Some(&self.cutoff), x, true)[0] * self.trig.value(y)
    }

    fn dp(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
        let r = radial(self.power, Some(&self.cutoff), x, true);
        let t = self.trig.value(y);
        let g = self.trig.grad(y);
        [r[1] * t, r[0] * g[0], r[0] * g[1]]
    }

    fn d2p(&self, x: f64, y: &[f64; 2]) -> [[f64; 3]; 3] {
        let r = radial(self.power, Some(&self.cutoff), x, true);
        let t = self.trig.value(y);
        let g = self.trig.grad(y);
        let hh = self.trig.hess(y);
        [
            [r[2] * t, r[1] * g[0], r[1] * g[1]],
            [r[1] * g[0], r[0] * hh[0][0], r[0] * hh[0][1]],
            [r[1] * g[1], r[0] * hh[1][0], r[0] * hh[1][1]],
        ]
    }

    fn boundary_zero(&self) -> bool {
        self.power >= 1
    }

    fn dp_order(&self) -> u32 {
        self.power.saturating_sub(1)
    }

    fn support_x(&self) -> f64 {
        self.cutoff.hi
    }
}

/// The exact form `dp`.
#[derive(Debug, Clone)]
pub struct Exact<P>(pub P);

impl<P: ScalarPotential> OneForm for Exact<P> {
    fn eval(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
        self.0.dp(x, y)
    }

    fn jet(&self, x: f64, y: &[f64; 2]) -> FormJet {
        FormJet {
            v: self.0.dp(x, y),
            d: self.0.d2p(x, y),
        }
    }

    fn support_x(&self) -> f64 {
        self.0.support_x()
    }

    fn vanishing_order(&self) -> u32 {
        self.0.dp_order()
    }
}

/// `x^k χ(x) (T₀(y) dx + T₁(y) dy¹ + T₂(y) dy²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyBumpForm {
    pub k: u32,
    pub comps: [Trig; 3],
    pub cutoff: Cutoff,
}

impl PolyBumpForm {
    pub fn new(k: u32, comps: [Trig; 3], cutoff: Cutoff) -> Self {
        Self { k, comps, cutoff }
    }

    /// `x^k χ(x) T(y) dy¹`.
    pub fn dy(k: u32, trig: Trig, cutoff: Cutoff) -> Self {
        Self::new(k, [Trig::constant(0.0), trig, Trig::constant(0.0)], cutoff)
    }
}

impl OneForm for PolyBumpForm {
    fn eval(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
        let r = radial(self.k, Some(&self.cutoff), x, false)[0];
        self.comps.map(|t| r * t.value(y))
    }

    fn jet(&self, x: f64, y: &[f64; 2]) -> FormJet {
        let r = radial(self.k, Some(&self.cutoff), x, false);
        let mut j = FormJet::default();
        for (mu, t) in self.comps.iter().enumerate() {
            let tv = t.value(y);
            let g = t.grad(y);
            j.v[mu] = r[0] * tv;
            j.d[0][mu] = r[1] * tv;
            j.d[1][mu] = r[0] * g[0];
            j.d[2][mu] = r[0] * g[1];
        }
        j
    }

    fn support_x(&self) -> f64 {
        self.cutoff.hi
    }

    fn vanishing_order(&self) -> u32 {
        self.k
    }
}

/// `c (1 + a x)(1 + b cos(κ y¹)) dy¹`, not compactly supported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileDy {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
}

impl ProfileDy {
    /// The constant form `c dy¹`.
    pub fn constant(c: f64) -> Self {
        Self {
            c,
            a: 0.0,
            b: 0.0,
            kappa: 0.0,
        }
    }
}

impl OneForm for ProfileDy {
    fn eval(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
        [0.0, self.c * (1.0 + self.a * x) * (1.0 + self.b * (self.kappa * y[0]).cos()), 0.0]
    }

    fn jet(&self, x: f64, y: &[f64; 2]) -> FormJet {
        let cy = 1.0 + self.b * (self.kappa * y[0]).cos();
        let dcy = -self.b * self.kappa * (self.kappa * y[0]).sin();
        let cx = 1.0 + self.a * x;
        let mut j = FormJet::default();
        j.v[1] = self.c * cx * cy;
        j.d[0][1] = self.c * self.a * cy;
        j.d[1][1] = self.c * cx * dcy;
        j
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZeroForm;

impl OneForm for ZeroForm {
    fn eval(&self, _: f64, _: &[f64; 2]) -> [f64; 3] {
        [0.0; 3]
    }
    fn jet(&self, _: f64, _: &[f64; 2]) -> FormJet {
        FormJet::default()
    }
    fn support_x(&self) -> f64 {
        0.0
    }
    fn vanishing_order(&self) -> u32 {
        u32::MAX
    }
}

/// Constant coefficients `c₀ dx + c₁ dy¹ + c₂ dy²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstantForm(pub [f64; 3]);

impl OneForm for ConstantForm {
    fn eval(&self, _: f64, _: &[f64; 2]) -> [f64; 3] {
        self.0
    }
    fn jet(&self, _: f64, _: &[f64; 2]) -> FormJet {
        FormJet {
            v: self.0,
            ..FormJet::default()
        }
    }
}

/// `Σ cᵢ fᵢ`.
#[derive(Clone, Default)]
pub struct Combination(pub Vec<(f64, Arc<dyn OneForm>)>);

impl Combination {
    pub fn with(mut self, c: f64, f: Arc<dyn OneForm>) -> Self {
        self.0.push((c, f));
        self
    }
}

impl OneForm for Combination {
    fn eval(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
        let mut v = [0.0; 3];
        for (c, f) in &self.0 {
            let w = f.eval(x, y);
            for mu in 0..3 {
                v[mu] += c * w[mu];
            }
        }
        v
    }

    fn jet(&self, x: f64, y: &[f64; 2]) -> FormJet {
        let mut j = FormJet::default();
        for (c, f) in &self.0 {
            let w = f.jet(x, y);
            for mu in 0..3 {
                j.v[mu] += c * w.v[mu];
                for a in 0..3 {
                    j.d[a][mu] += c * w.d[a][mu];
                }
            }
        }
        j
    }

    fn support_x(&self) -> f64 {
        self.0.iter().fold(0.0, |s, (_, f)| s.max(f.support_x()))
    }

    fn vanishing_order(&self) -> u32 {
        self.0.iter().map(|(_, f)| f.vanishing_order()).min().unwrap_or(u32::MAX)
    }
}

const GAUGE_ABS_TOL: f64 = 1e-15;
const GAUGE_REL_TOL: f64 = 1e-13;

/// `q(x, y) = χ(x) ∫₀^x f₀(s, y) ds`.
#[derive(Clone)]
pub struct GaugePotential {
    pub f: Arc<dyn OneForm>,
    pub cutoff: Cutoff,
}

impl GaugePotential {
    /// `[∫f₀, ∫∂_{y¹}f₀, ∫∂_{y²}f₀]` over `[0, x]`.
    fn integrals(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
        if x == 0.0 {
            return [0.0; 3];
        }
        let f = &self.f;
        quad::integrate(
            |s| {
                let j = f.jet(s, y);
                [j.v[0], j.d[1][0], j.d[2][0]]
            },
            0.0,
            x,
            GAUGE_ABS_TOL,
            GAUGE_REL_TOL,
        )
    }
}

impl ScalarPotential for GaugePotential {
    fn p(&self, x: f64, y: &[f64; 2]) -> f64 {
        let c = self.cutoff.value(x);
        if c == 0.0 {
            return 0.0;
        }
        c * self.integrals(x, y)[0]
    }

    fn dp(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
        let ch = self.cutoff.jet(x);
        if ch == [0.0; 3] {
            return [0.0; 3];
        }
        let i = self.integrals(x, y);
        let f0 = self.f.eval(x, y)[0];
        [ch[1] * i[0] + ch[0] * f0, ch[0] * i[1], ch[0] * i[2]]
    }

    fn d2p(&self, x: f64, y: &[f64; 2]) -> [[f64; 3]; 3] {
        let e = 1e-5;
        let mut d = [[0.0; 3]; 3];
        for a in 0..3 {
            let (xp, yp) = shifted(x, y, a, e);
            let (xm, ym) = shifted(x, y, a, -e);
            let p = self.dp(xp, &yp);
            let m = self.dp(xm, &ym);
            for mu in 0..3 {
                d[a][mu] = (p[mu] - m[mu]) / (2.0 * e);
            }
        }
        d
    }

    fn boundary_zero(&self) -> bool {
        true
    }

    fn support_x(&self) -> f64 {
        self.cutoff.hi
    }
}

/// `f − dq` for the gauge potential `q` of `f`.
#[derive(Clone)]
pub struct GaugeCorrected {
    pub f: Arc<dyn OneForm>,
    pub q: GaugePotential,
}

impl OneForm for GaugeCorrected {
    fn eval(&self, x: f64, y: &[f64; 2]) -> [f64; 3] {
        let v = self.f.eval(x, y);
        let d = self.q.dp(x, y);
        [v[0] - d[0], v[1] - d[1], v[2] - d[2]]
    }

    fn support_x(&self) -> f64 {
        self.f.support_x().max(self.q.cutoff.hi)
    }

    fn vanishing_order(&self) -> u32 {
        self.f.vanishing_order()
    }
}

/// Splits `f` into the gauge potential `q` and `f − dq`, whose `dx`
/// component vanishes where the cutoff equals 1.
pub fn gauge_correct(f: Arc<dyn OneForm>) -> (GaugePotential, GaugeCorrected) {
    let q = GaugePotential {
        f: f.clone(),
        cutoff: Cutoff::gauge(),
    };
    (q.clone(), GaugeCorrected { f, q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn check_jet(f: &dyn OneForm, x: f64, y: [f64; 2]) {
        let j = f.jet(x, &y);
        let e = 1e-6;
        for a in 0..3 {
            let (xp, yp) = shifted(x, &y, a, e);
            let (xm, ym) = shifted(x, &y, a, -e);
            let p = f.eval(xp, &yp);
            let m = f.eval(xm, &ym);
            for mu in 0..3 {
                let fd = (p[mu] - m[mu]) / (2.0 * e);
                assert!((fd - j.d[a][mu]).abs() < 1e-7 * (1.0 + fd.abs()), "{a} {mu}");
            }
        }
    }

    #[test]
    fn analytic_jets_match_differences() {
        let cut = Cutoff::new(0.3, 0.8);
        let pot = BumpPotential::new(1, Trig::new(0.7, [2.0 * PI, 1.0], 0.3), cut);
        let pb = PolyBumpForm::new(
            2,
            [Trig::new(0.4, [2.0 * PI, 0.0], 0.1), Trig::new(1.1, [4.0 * PI, 1.0], 0.5), Trig::new(-0.3, [0.0, 2.0], 0.0)],
            cut,
        );
        let pr = ProfileDy { c: 0.8, a: 1.0, b: 0.5, kappa: 2.0 * PI };
        for (x, y) in [(0.1, [0.2, 0.4]), (0.5, [0.7, 1.9]), (0.75, [0.05, 3.0])] {
            check_jet(&Exact(pot), x, y);
            check_jet(&pb, x, y);
            check_jet(&pr, x, y);
        }
    }

    #[test]
    fn declared_orders() {
        let cut = Cutoff::new(0.3, 0.8);
        let pb = PolyBumpForm::dy(3, Trig::constant(1.0), cut);
        assert_eq!(pb.vanishing_order(), 3);
        for x in [1e-3, 1e-2, 1e-1] {
            assert!(pb.eval(x, &[0.0, 0.0])[1].abs() <= 1.0001 * x.powi(3));
        }
        let pot = BumpPotential::new(1, Trig::constant(1.0), cut);
        assert!(pot.boundary_zero());
        assert_eq!(pot.p(0.0, &[0.3, 0.0]), 0.0);
        assert_eq!(pb.eval(0.9, &[0.1, 0.0]), [0.0; 3]);
    }

    #[test]
    fn gauge_of_x_dx() {
        // f = x dx ⇒ q = x²/2 on the plateau
        struct XDx;
        impl OneForm for XDx {
            fn eval(&self, x: f64, _: &[f64; 2]) -> [f64; 3] {
                [x, 0.0, 0.0]
            }
        }
        let (q, ft) = gauge_correct(Arc::new(XDx));
        for x in [0.1, 0.3, 0.5] {
            assert!((q.p(x, &[0.2, 0.0]) - x * x / 2.0).abs() < 1e-15);
            assert!(ft.eval(x, &[0.2, 0.0])[0].abs() < 1e-15);
        }
        assert_eq!(q.p(0.0, &[0.2, 0.0]), 0.0);
        assert_eq!(q.p(1.2, &[0.2, 0.0]), 0.0);
    }

    #[test]
    fn gauge_without_dx_component_is_trivial() {
        let f = Arc::new(PolyBumpForm::dy(1, Trig::new(1.0, [2.0 * PI, 0.0], 0.0), Cutoff::new(0.3, 0.8)));
        let (q, ft) = gauge_correct(f.clone());
        for x in [0.1, 0.6, 0.9] {
            assert_eq!(q.p(x, &[0.3, 0.0]), 0.0);
            assert_eq!(ft.eval(x, &[0.3, 0.0]), f.eval(x, &[0.3, 0.0]));
        }
    }

    #[test]
    fn gauge_correction_is_idempotent_on_plateau() {
        let f = Arc::new(PolyBumpForm::new(
            0,
            [Trig::new(0.5, [2.0 * PI, 0.0], 0.2), Trig::new(1.0, [2.0 * PI, 0.0], 0.0), Trig::constant(0.0)],
            Cutoff::new(0.6, 1.2),
        ));
        let (_, ft) = gauge_correct(f);
        let (q2, _) = gauge_correct(Arc::new(ft));
        for x in [0.1, 0.25, 0.45] {
            assert!(q2.p(x, &[0.37, 0.0]).abs() < 1e-13);
        }
    }
}
