//! Smooth monotone transitions built from `ψ(t) = exp(−1/t)`.

fn psi(t: f64) -> [f64; 3] {
    if t <= 0.0 {
        return [0.0; 3];
    }
    let p = (-1.0 / t).exp();
    let t2 = t * t;
    [p, p / t2, p * (1.0 / (t2 * t2) - 2.0 / (t2 * t))]
}

/// Value and first two derivatives of the smooth step `s(t)`, equal to 0 for
/// `t ≤ 0` and 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> [f64; 3] {
    if t <= 0.0 {
        return [0.0; 3];
    }
    if t >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let [a, a1, a2] = psi(t);
    let [b, b1, b2] = psi(1.0 - t);
    // derivatives of ψ(1 − t)
    let (b1, b2) = (-b1, b2);
    let d = a + b;
    let d1 = a1 + b1;
    let n = a1 * b - a * b1;
    let n1 = a2 * b - a * b2;
    [a / d, n / (d * d), (n1 * d - 2.0 * n * d1) / (d * d * d)]
}

/// Cutoff equal to 1 on `x ≤ lo` and 0 on `x ≥ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub lo: f64,
    pub hi: f64,
}

impl Cutoff {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "cutoff needs lo < hi");
        Self { lo, hi }
    }

    /// The plateau used by the gauge correction: 1 up to ½, 0 from 1 on.
    pub fn gauge() -> Self {
        Self::new(0.5, 1.0)
    }

    /// `[χ, χ', χ'']` at `x`.
    pub fn jet(&self, x: f64) -> [f64; 3] {
        let w = self.hi - self.lo;
        let [s, s1, s2] = smooth_step((x - self.lo) / w);
        [1.0 - s, -s1 / w, -s2 / (w * w)]
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x)[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus() {
        let c = Cutoff::gauge();
        assert_eq!(c.value(0.2), 1.0);
        assert_eq!(c.value(0.5), 1.0);
        assert_eq!(c.value(1.0), 0.0);
        assert_eq!(c.value(3.0), 0.0);
        assert!((c.value(0.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_differences() {
        let c = Cutoff::new(0.3, 0.9);
        let e = 1e-6;
        for x in [0.31, 0.4, 0.6, 0.77, 0.89] {
            let j = c.jet(x);
            let p = c.jet(x + e);
            let m = c.jet(x - e);
            assert!(((p[0] - m[0]) / (2.0 * e) - j[1]).abs() < 1e-6);
            assert!(((p[1] - m[1]) / (2.0 * e) - j[2]).abs() < 1e-5);
        }
    }
}
