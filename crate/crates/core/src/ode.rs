//! Dormand–Prince 8(5,3) integrator with 7th-order dense output.
//!
//! The stepper works on flat `f64` slices so that the geodesic flow can carry
//! an arbitrary number of augmented components (quadratures, first
//! variations) alongside the phase-space state.

/// A first-order system `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_step: 0.1,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("maximum number of steps exceeded at t = {t}")]
    MaxSteps { t: f64 },
    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },
}

/// What the caller wants after seeing an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// One accepted step together with its continuous extension.
#[derive(Debug, Clone)]
pub struct Segment {
    pub t0: f64,
    pub h: f64,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    /// Eight coefficient vectors of length `dim`, stored back to back.
    /// Empty when dense output was not requested.
    cont: Vec<f64>,
}

impl Segment {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn has_dense(&self) -> bool {
        !self.cont.is_empty()
    }

    fn theta(&self, t: f64) -> f64 {
        (t - self.t0) / self.h
    }

    /// Dense-output value of component `i` at time `t` (inside the step).
    pub fn component(&self, t: f64, i: usize) -> f64 {
        let n = self.dim();
        let c = |k: usize| self.cont[k * n + i];
        let s = self.theta(t);
        let s1 = 1.0 - s;
        let conpar = c(4) + (c(5) + (c(6) + c(7) * s) * s1) * s;
        c(0) + (c(1) + (c(2) + (c(3) + conpar * s1) * s) * s1) * s
    }

    /// Time derivative of the dense-output polynomial for component `i`.
    pub fn component_rate(&self, t: f64, i: usize) -> f64 {
        let n = self.dim();
        let c = |k: usize| self.cont[k * n + i];
        let s = self.theta(t);
        let s1 = 1.0 - s;
        let f = c(6) + s * c(7);
        let df = c(7);
        let e = c(5) + s1 * f;
        let de = -f + s1 * df;
        let d = c(4) + s * e;
        let dd = e + s * de;
        let cc = c(3) + s1 * d;
        let dcc = -d + s1 * dd;
        let b = c(2) + s * cc;
        let db = cc + s * dcc;
        let a = c(1) + s1 * b;
        let da = -b + s1 * db;
        (a + s * da) / self.h
    }

    pub fn eval(&self, t: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.component(t, i);
        }
    }
}

struct Workspace {
    k: [Vec<f64>; 16],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
        }
    }
}

// Stage layout in `Workspace::k`:
//   0..=11 -> k1..k12, 12 -> derivative at the new point, 13..=15 -> k14..k16.
fn stage<S: OdeSystem>(
    sys: &S,
    t: f64,
    h: f64,
    y: &[f64],
    ws: &mut Workspace,
    c: f64,
    terms: &[(usize, f64)],
    dest: usize,
) {
    let n = y.len();
    for i in 0..n {
        let mut acc = 0.0;
        for &(j, a) in terms {
            acc += a * ws.k[j][i];
        }
        ws.tmp[i] = y[i] + h * acc;
    }
    let mut out = std::mem::take(&mut ws.k[dest]);
    sys.rhs(t + c * h, &ws.tmp, &mut out);
    ws.k[dest] = out;
}

/// Runs the twelve stages of one step starting from `y` with `ws.k[0] = f(t, y)`.
/// Leaves the 8th-order solution in `ws.y_new` and returns the error norm
/// (`<= 1` means acceptable).
fn core_step<S: OdeSystem>(
    sys: &S,
    t: f64,
    h: f64,
    y: &[f64],
    ws: &mut Workspace,
    ctl: Option<&StepControl>,
) -> f64 {
    stage(sys, t, h, y, ws, C2, &[(0, A21)], 1);
    stage(sys, t, h, y, ws, C3, &[(0, A31), (1, A32)], 2);
    stage(sys, t, h, y, ws, C4, &[(0, A41), (2, A43)], 3);
    stage(sys, t, h, y, ws, C5, &[(0, A51), (2, A53), (3, A54)], 4);
    stage(sys, t, h, y, ws, C6, &[(0, A61), (3, A64), (4, A65)], 5);
    stage(sys, t, h, y, ws, C7, &[(0, A71), (3, A74), (4, A75), (5, A76)], 6);
    stage(
        sys,
        t,
        h,
        y,
        ws,
        C8,
        &[(0, A81), (3, A84), (4, A85), (5, A86), (6, A87)],
        7,
    );
    stage(
        sys,
        t,
        h,
        y,
        ws,
        C9,
        &[(0, A91), (3, A94), (4, A95), (5, A96), (6, A97), (7, A98)],
        8,
    );
    stage(
        sys,
        t,
        h,
        y,
        ws,
        C10,
        &[(0, A101), (3, A104), (4, A105), (5, A106), (6, A107), (7, A108), (8, A109)],
        9,
    );
    stage(
        sys,
        t,
        h,
        y,
        ws,
        C11,
        &[
            (0, A111),
            (3, A114),
            (4, A115),
            (5, A116),
            (6, A117),
            (7, A118),
            (8, A119),
            (9, A1110),
        ],
        10,
    );
    stage(
        sys,
        t,
        h,
        y,
        ws,
        1.0,
        &[
            (0, A121),
            (3, A124),
            (4, A125),
            (5, A126),
            (6, A127),
            (7, A128),
            (8, A129),
            (9, A1210),
            (10, A1211),
        ],
        11,
    );
    let n = y.len();
    let mut err = 0.0;
    let mut err2 = 0.0;
    for i in 0..n {
        let k = &ws.k;
        let incr = B1 * k[0][i]
            + B6 * k[5][i]
            + B7 * k[6][i]
            + B8 * k[7][i]
            + B9 * k[8][i]
            + B10 * k[9][i]
            + B11 * k[10][i]
            + B12 * k[11][i];
        ws.y_new[i] = y[i] + h * incr;
        if let Some(ctl) = ctl {
            let sk = ctl.atol + ctl.rtol * y[i].abs().max(ws.y_new[i].abs());
            let e2 = incr - BHH1 * k[0][i] - BHH2 * k[8][i] - BHH3 * k[11][i];
            err2 += (e2 / sk).powi(2);
            let e = ER1 * k[0][i]
                + ER6 * k[5][i]
                + ER7 * k[6][i]
                + ER8 * k[7][i]
                + ER9 * k[8][i]
                + ER10 * k[9][i]
                + ER11 * k[10][i]
                + ER12 * k[11][i];
            err += (e / sk).powi(2);
        }
    }
    if ctl.is_none() {
        return 0.0;
    }
    let mut deno = err + 0.01 * err2;
    if deno <= 0.0 {
        deno = 1.0;
    }
    h.abs() * err * (1.0 / (deno * n as f64)).sqrt()
}

/// Builds the continuous extension once `ws.k[12]` holds `f(t + h, y_new)`.
fn dense_coefficients<S: OdeSystem>(sys: &S, t: f64, h: f64, y: &[f64], ws: &mut Workspace) -> Vec<f64> {
    let n = y.len();
    let mut cont = vec![0.0; 8 * n];
    for i in 0..n {
        let k = &ws.k;
        let ydiff = ws.y_new[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        cont[i] = y[i];
        cont[n + i] = ydiff;
        cont[2 * n + i] = bspl;
        cont[3 * n + i] = ydiff - h * k[12][i] - bspl;
        let pick = |d: &[f64; 8]| {
            d[0] * k[0][i]
                + d[1] * k[5][i]
                + d[2] * k[6][i]
                + d[3] * k[7][i]
                + d[4] * k[8][i]
                + d[5] * k[9][i]
                + d[6] * k[10][i]
                + d[7] * k[11][i]
        };
        cont[4 * n + i] = pick(&[D41, D46, D47, D48, D49, D410, D411, D412]);
        cont[5 * n + i] = pick(&[D51, D56, D57, D58, D59, D510, D511, D512]);
        cont[6 * n + i] = pick(&[D61, D66, D67, D68, D69, D610, D611, D612]);
        cont[7 * n + i] = pick(&[D71, D76, D77, D78, D79, D710, D711, D712]);
    }
    stage(
        sys,
        t,
        h,
        y,
        ws,
        C14,
        &[
            (0, A141),
            (6, A147),
            (7, A148),
            (8, A149),
            (9, A1410),
            (10, A1411),
            (11, A1412),
            (12, A1413),
        ],
        13,
    );
    stage(
        sys,
        t,
        h,
        y,
        ws,
        C15,
        &[
            (0, A151),
            (5, A156),
            (6, A157),
            (7, A158),
            (10, A1511),
            (11, A1512),
            (12, A1513),
            (13, A1514),
        ],
        14,
    );
    stage(
        sys,
        t,
        h,
        y,
        ws,
        C16,
        &[
            (0, A161),
            (5, A166),
            (6, A167),
            (7, A168),
            (8, A169),
            (12, A1613),
            (13, A1614),
            (14, A1615),
        ],
        15,
    );
    for i in 0..n {
        let k = &ws.k;
        let tail = |a: f64, b: f64, c: f64, d: f64| a * k[12][i] + b * k[13][i] + c * k[14][i] + d * k[15][i];
        cont[4 * n + i] = h * (cont[4 * n + i] + tail(D413, D414, D415, D416));
        cont[5 * n + i] = h * (cont[5 * n + i] + tail(D513, D514, D515, D516));
        cont[6 * n + i] = h * (cont[6 * n + i] + tail(D613, D614, D615, D616));
        cont[7 * n + i] = h * (cont[7 * n + i] + tail(D713, D714, D715, D716));
    }
    cont
}

/// A single fixed step of the 8th-order method (no error control).
pub fn fixed_step<S: OdeSystem>(sys: &S, t: f64, y: &[f64], h: f64) -> Vec<f64> {
    let mut ws = Workspace::new(y.len());
    let mut k0 = std::mem::take(&mut ws.k[0]);
    sys.rhs(t, y, &mut k0);
    ws.k[0] = k0;
    core_step(sys, t, h, y, &mut ws, None);
    ws.y_new
}

fn initial_step<S: OdeSystem>(sys: &S, t: f64, y: &[f64], f0: &[f64], dir: f64, ctl: &StepControl) -> f64 {
    let n = y.len();
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..n {
        let sk = ctl.atol + ctl.rtol * y[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(ctl.max_step) * dir;
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h * b).collect();
    let mut f1 = vec![0.0; n];
    sys.rhs(t + h, &y1, &mut f1);
    let mut der2 = 0.0;
    for i in 0..n {
        let sk = ctl.atol + ctl.rtol * y[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h.abs();
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h.abs() * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    (100.0 * h.abs()).min(h1).min(ctl.max_step) * dir
}

/// Integrates from `t0` towards `t_end`, handing every accepted step to
/// `on_step`. Returns the time and state where integration ended (either
/// `t_end` or the end of the step on which `on_step` asked to stop).
pub fn integrate<S, F>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    ctl: &StepControl,
    dense: bool,
    mut on_step: F,
) -> Result<(f64, Vec<f64>), OdeError>
where
    S: OdeSystem,
    F: FnMut(&Segment) -> Control,
{
    const SAFE: f64 = 0.9;
    const FAC1: f64 = 0.333;
    const FAC2: f64 = 6.0;
    const EXPO: f64 = 1.0 / 8.0;

    let n = y0.len();
    debug_assert_eq!(n, sys.dim());
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut ws = Workspace::new(n);
    let mut t = t0;
    let mut y = y0.to_vec();
    if t == t_end {
        return Ok((t, y));
    }
    let mut k0 = std::mem::take(&mut ws.k[0]);
    sys.rhs(t, &y, &mut k0);
    ws.k[0] = k0;
    let mut h = initial_step(sys, t, &y, &ws.k[0], dir, ctl);
    let mut last_rejected = false;
    let mut steps = 0usize;

    loop {
        if steps >= ctl.max_steps {
            return Err(OdeError::MaxSteps { t });
        }
        if h.abs() <= 1e-15 * t.abs().max(1.0) {
            return Err(OdeError::StepSizeUnderflow { t });
        }
        let mut last = false;
        if (t + 1.01 * h - t_end) * dir >= 0.0 {
            h = t_end - t;
            last = true;
        }
        steps += 1;
        let err = core_step(sys, t, h, &y, &mut ws, Some(ctl));
        if !err.is_finite() {
            // shrink aggressively and retry
            h *= 0.1;
            last_rejected = true;
            continue;
        }
        let fac11 = err.powf(EXPO);
        let fac = (fac11 / SAFE).clamp(1.0 / FAC2, 1.0 / FAC1);
        let mut h_new = h / fac;
        if err <= 1.0 {
            let t_new = if last { t_end } else { t + h };
            let mut kn = std::mem::take(&mut ws.k[12]);
            sys.rhs(t_new, &ws.y_new, &mut kn);
            ws.k[12] = kn;
            if ws.y_new.iter().any(|v| !v.is_finite()) {
                return Err(OdeError::NonFinite { t: t_new });
            }
            let cont = if dense {
                dense_coefficients(sys, t, h, &y, &mut ws)
            } else {
                Vec::new()
            };
            let seg = Segment {
                t0: t,
                h,
                y0: y.clone(),
                y1: ws.y_new.clone(),
                cont,
            };
            t = t_new;
            y.copy_from_slice(&ws.y_new);
            ws.k.swap(0, 12);
            if on_step(&seg) == Control::Stop || last {
                return Ok((t, y));
            }
            if h_new.abs() > ctl.max_step {
                h_new = ctl.max_step * dir;
            }
            if last_rejected && h_new.abs() > h.abs() {
                h_new = h;
            }
            last_rejected = false;
        } else {
            h_new = h / (1.0 / FAC1).min(fac11 / SAFE);
            last_rejected = true;
        }
        h = h_new;
    }
}

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;
const A141: f64 = 5.61675022830479523392909219681E-2;
const A147: f64 = 2.53500210216624811088794765333E-1;
const A148: f64 = -2.46239037470802489917441475441E-1;
const A149: f64 = -1.24191423263816360469010140626E-1;
const A1410: f64 = 1.5329179827876569731206322685E-1;
const A1411: f64 = 8.20105229563468988491666602057E-3;
const A1412: f64 = 7.56789766054569976138603589584E-3;
const A1413: f64 = -8.298E-3;
const A151: f64 = 3.18346481635021405060768473261E-2;
const A156: f64 = 2.83009096723667755288322961402E-2;
const A157: f64 = 5.35419883074385676223797384372E-2;
const A158: f64 = -5.49237485713909884646569340306E-2;
const A1511: f64 = -1.08347328697249322858509316994E-4;
const A1512: f64 = 3.82571090835658412954920192323E-4;
const A1513: f64 = -3.40465008687404560802977114492E-4;
const A1514: f64 = 1.41312443674632500278074618366E-1;
const A161: f64 = -4.28896301583791923408573538692E-1;
const A166: f64 = -4.69762141536116384314449447206E0;
const A167: f64 = 7.68342119606259904184240953878E0;
const A168: f64 = 4.06898981839711007970213554331E0;
const A169: f64 = 3.56727187455281109270669543021E-1;
const A1613: f64 = -1.39902416515901462129418009734E-3;
const A1614: f64 = 2.9475147891527723389556272149E0;
const A1615: f64 = -9.15095847217987001081870187138E0;
const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;
const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;
const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;
const C14: f64 = 0.1E+00;
const C15: f64 = 0.2E+00;
const C16: f64 = 0.777777777777777777777777777778E+00;
const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;
const D41: f64 = -0.84289382761090128651353491142E+01;
const D46: f64 = 0.56671495351937776962531783590E+00;
const D47: f64 = -0.30689499459498916912797304727E+01;
const D48: f64 = 0.23846676565120698287728149680E+01;
const D49: f64 = 0.21170345824450282767155149946E+01;
const D410: f64 = -0.87139158377797299206789907490E+00;
const D411: f64 = 0.22404374302607882758541771650E+01;
const D412: f64 = 0.63157877876946881815570249290E+00;
const D413: f64 = -0.88990336451333310820698117400E-01;
const D414: f64 = 0.18148505520854727256656404962E+02;
const D415: f64 = -0.91946323924783554000451984436E+01;
const D416: f64 = -0.44360363875948939664310572000E+01;
const D51: f64 = 0.10427508642579134603413151009E+02;
const D56: f64 = 0.24228349177525818288430175319E+03;
const D57: f64 = 0.16520045171727028198505394887E+03;
const D58: f64 = -0.37454675472269020279518312152E+03;
const D59: f64 = -0.22113666853125306036270938578E+02;
const D510: f64 = 0.77334326684722638389603898808E+01;
const D511: f64 = -0.30674084731089398182061213626E+02;
const D512: f64 = -0.93321305264302278729567221706E+01;
const D513: f64 = 0.15697238121770843886131091075E+02;
const D514: f64 = -0.31139403219565177677282850411E+02;
const D515: f64 = -0.93529243588444783865713862664E+01;
const D516: f64 = 0.35816841486394083752465898540E+02;
const D61: f64 = 0.19985053242002433820987653617E+02;
const D66: f64 = -0.38703730874935176555105901742E+03;
const D67: f64 = -0.18917813819516756882830838328E+03;
const D68: f64 = 0.52780815920542364900561016686E+03;
const D69: f64 = -0.11573902539959630126141871134E+02;
const D610: f64 = 0.68812326946963000169666922661E+01;
const D611: f64 = -0.10006050966910838403183860980E+01;
const D612: f64 = 0.77771377980534432092869265740E+00;
const D613: f64 = -0.27782057523535084065932004339E+01;
const D614: f64 = -0.60196695231264120758267380846E+02;
const D615: f64 = 0.84320405506677161018159903784E+02;
const D616: f64 = 0.11992291136182789328035130030E+02;
const D71: f64 = -0.25693933462703749003312586129E+02;
const D76: f64 = -0.15418974869023643374053993627E+03;
const D77: f64 = -0.23152937917604549567536039109E+03;
const D78: f64 = 0.35763911791061412378285349910E+03;
const D79: f64 = 0.93405324183624310003907691704E+02;
const D710: f64 = -0.37458323136451633156875139351E+02;
const D711: f64 = 0.10409964950896230045147246184E+03;
const D712: f64 = 0.29840293426660503123344363579E+02;
const D713: f64 = -0.43533456590011143754432175058E+02;
const D714: f64 = 0.96324553959188282948394950600E+02;
const D715: f64 = -0.39177261675615439165231486172E+02;
const D716: f64 = -0.14972683625798562581422125276E+03;