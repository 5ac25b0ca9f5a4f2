//! Central finite differences with Richardson extrapolation.
//!
//! Used only on the diagnostic side of cross-checks: every production
//! derivative in this crate is analytic. Step sizes are the caller's
//! responsibility; in double precision the usable step grows with the
//! derivative order (roundoff scales like eps/h^k).

/// First derivative: central difference at h and h/2, Richardson combined
/// (leading error O(h^4)).
pub fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let (a, b) = (d(h), d(0.5 * h));
    (4.0 * b - a) / 3.0
}

/// Second derivative, Richardson-combined central stencils.
pub fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    let (a, b) = (d(h), d(0.5 * h));
    (4.0 * b - a) / 3.0
}

/// Third derivative from the 4-point antisymmetric stencil, Richardson
/// combined.
pub fn d3(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| {
        (-f(x - 2.0 * h) + 2.0 * f(x - h) - 2.0 * f(x + h) + f(x + 2.0 * h)) / (2.0 * h * h * h)
    };
    let (a, b) = (d(h), d(0.5 * h));
    (4.0 * b - a) / 3.0
}

/// Schwarzian derivative f'''/f' - 3/2 (f''/f')^2 evaluated from finite
/// differences of `f` alone. Diagnostic counterpart of the analytic route.
pub fn schwarzian_fd(f: impl Fn(f64) -> f64 + Copy, x: f64, h: f64) -> f64 {
    let f1 = d1(f, x, h);
    let f2 = d2(f, x, h);
    let f3 = d3(f, x, h);
    f3 / f1 - 1.5 * (f2 / f1) * (f2 / f1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_sin() {
        let f = |x: f64| x.sin();
        let x = 0.7;
        assert!((d1(f, x, 1e-4) - x.cos()).abs() < 1e-10);
        assert!((d2(f, x, 1e-3) + x.sin()).abs() < 1e-8);
        assert!((d3(f, x, 5e-3) + x.cos()).abs() < 1e-7);
    }

    #[test]
    fn schwarzian_of_exponential() {
        // S[exp(a x)] = -a^2/2
        let a = 1.3;
        let f = move |x: f64| (a * x).exp();
        let s = schwarzian_fd(f, 0.4, 5e-3);
        assert!((s + 0.5 * a * a).abs() < 1e-5);
    }
}
