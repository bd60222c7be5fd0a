//! Adaptive Gauss–Kronrod (7/15) quadrature for small vector integrands.

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> ([f64; N], f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let fc = f(c);
    for i in 0..N {
        k[i] = WGK[7] * fc[i];
        g[i] = WG[3] * fc[i];
    }
    for j in 0..7 {
        let dx = hw * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..N {
            k[i] += WGK[j] * (f1[i] + f2[i]);
            if j % 2 == 1 {
                g[i] += WG[j / 2] * (f1[i] + f2[i]);
            }
        }
    }
    let mut err: f64 = 0.0;
    for i in 0..N {
        k[i] *= hw;
        g[i] *= hw;
        err = err.max((k[i] - g[i]).abs());
    }
    (k, err)
}

fn recurse<const N: usize, F: Fn(f64) -> [f64; N]>(
    f: &F,
    a: f64,
    b: f64,
    whole: ([f64; N], f64),
    tol: f64,
    depth: u32,
) -> [f64; N] {
    if whole.1 <= tol || depth == 0 {
        return whole.0;
    }
    let m = 0.5 * (a + b);
    let l = gk15(f, a, m);
    let r = gk15(f, m, b);
    let lv = recurse(f, a, m, l, 0.5 * tol, depth - 1);
    let rv = recurse(f, m, b, r, 0.5 * tol, depth - 1);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = lv[i] + rv[i];
    }
    out
}

/// `∫_a^b f`, refined until the Kronrod/Gauss difference drops below
/// `abs_tol + rel_tol·|estimate|` (componentwise max).
pub fn integrate<const N: usize, F: Fn(f64) -> [f64; N]>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> [f64; N] {
    if a == b {
        return [0.0; N];
    }
    let whole = gk15(&f, a, b);
    let scale = whole.0.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    recurse(&f, a, b, whole, abs_tol + rel_tol * scale, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let [a, b] = integrate(|x: f64| [x.sin(), (-x * x).exp()], 0.0, 3.0, 1e-15, 1e-14);
        assert!((a - (1.0 - 3f64.cos())).abs() < 1e-14);
        // erf(3)·√π/2
        assert!((b - 0.886207348259521).abs() < 1e-13);
        let [c] = integrate(|x: f64| [x * x], 1.0, 0.0, 1e-15, 1e-14);
        assert!((c + 1.0 / 3.0).abs() < 1e-15);
    }
}
