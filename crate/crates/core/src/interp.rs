//! Interpolation: not-a-knot cubic splines (C², analytic derivatives up to
//! the piecewise-constant third) and monotone cubic Hermite interpolation
//! (shape-preserving, used for sampled density profiles so a non-negative
//! table never interpolates negative).

use crate::error::{CavityError, Result};

/// Cubic spline with not-a-knot end conditions.
///
/// The not-a-knot closure makes the first two and last two polynomial pieces
/// identical, which keeps the spline C² while reproducing cubics exactly.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Build from strictly increasing abscissae. Needs at least four points
    /// (the not-a-knot conditions are degenerate below that).
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(CavityError::Input(format!(
                "abscissa/ordinate length mismatch: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 4 {
            return Err(CavityError::Input(format!(
                "{} samples are insufficient for a not-a-knot cubic spline (need >= 4)",
                x.len()
            )));
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(CavityError::Input(format!(
                    "sample times must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Tridiagonal system for the interior second derivatives m[1..n-1].
        // The not-a-knot rows are reduced onto the first/last interior rows.
        let k = n - 2; // unknowns m[1]..=m[n-2]
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for i in 1..=n - 2 {
            let j = i - 1;
            sub[j] = h[i - 1];
            diag[j] = 2.0 * (h[i - 1] + h[i]);
            sup[j] = h[i];
            rhs[j] = 6.0 * (d[i] - d[i - 1]);
        }
        // Left not-a-knot: m0 = ((h0+h1) m1 - h0 m2)/h1 folded into row i=1.
        diag[0] = (h[0] + h[1]) * (h[0] + 2.0 * h[1]) / h[1];
        if k > 1 {
            sup[0] = (h[1] * h[1] - h[0] * h[0]) / h[1];
        }
        // Right not-a-knot folded into row i = n-2.
        let (ha, hb) = (h[n - 3], h[n - 2]);
        diag[k - 1] = (ha + hb) * (hb + 2.0 * ha) / ha;
        if k > 1 {
            sub[k - 1] = (ha * ha - hb * hb) / ha;
        }

        // Thomas elimination.
        let mut c = vec![0.0; k];
        let mut r = vec![0.0; k];
        c[0] = sup[0] / diag[0];
        r[0] = rhs[0] / diag[0];
        for j in 1..k {
            let den = diag[j] - sub[j] * c[j - 1];
            c[j] = sup[j] / den;
            r[j] = (rhs[j] - sub[j] * r[j - 1]) / den;
        }
        let mut m = vec![0.0; n];
        m[k] = r[k - 1];
        for j in (0..k - 1).rev() {
            m[j + 1] = r[j] - c[j] * m[j + 2];
        }
        m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
        m[n - 1] = ((ha + hb) * m[n - 2] - hb * m[n - 3]) / ha;

        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    fn segment(&self, t: f64) -> usize {
        // last i with x[i] <= t, clamped to a valid segment
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p => (p - 1).min(self.x.len() - 2),
        }
    }

    /// Value and first three derivatives at `t`. Outside the knot range the
    /// end polynomial is extended (callers guard the domain).
    pub fn eval_all(&self, t: f64) -> (f64, f64, f64, f64) {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let a = self.y[i];
        let b = (self.y[i + 1] - self.y[i]) / h - h * (2.0 * m0 + m1) / 6.0;
        let c = 0.5 * m0;
        let e = (m1 - m0) / (6.0 * h);
        let s = t - self.x[i];
        (
            a + s * (b + s * (c + s * e)),
            b + s * (2.0 * c + 3.0 * s * e),
            2.0 * c + 6.0 * s * e,
            6.0 * e,
        )
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval_all(t).0
    }
}

/// Monotone (Fritsch–Carlson) cubic Hermite interpolant. C¹ and free of
/// overshoot, so a table of non-negative samples stays non-negative.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Limited tangents at the knots.
    t: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(CavityError::Input(
                "monotone cubic interpolation needs >= 2 matched samples".into(),
            ));
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(CavityError::Input(
                    "sample abscissae must be strictly increasing".into(),
                ));
            }
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut t = vec![0.0; n];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                t[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                t[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        t[0] = end_tangent(h[0], h.get(1).copied().unwrap_or(h[0]), d[0], d.get(1).copied().unwrap_or(d[0]));
        let (hl, dl) = (h[n - 2], d[n - 2]);
        let (hl2, dl2) = if n > 2 { (h[n - 3], d[n - 3]) } else { (hl, dl) };
        t[n - 1] = end_tangent(hl, hl2, dl, dl2);
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            t,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    pub fn value(&self, s: f64) -> f64 {
        let i = match self.x.partition_point(|&xi| xi <= s) {
            0 => 0,
            p => (p - 1).min(self.x.len() - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (s - self.x[i]) / h;
        let (y0, y1, t0, t1) = (self.y[i], self.y[i + 1], self.t[i], self.t[i + 1]);
        let u2 = u * u;
        let u3 = u2 * u;
        y0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + h * t0 * (u3 - 2.0 * u2 + u)
            + y1 * (-2.0 * u3 + 3.0 * u2)
            + h * t1 * (u3 - u2)
    }
}

fn end_tangent(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    // one-sided three-point estimate with the Fritsch–Carlson limiter
    let t = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if t * d0 <= 0.0 {
        0.0
    } else if (d0 - d1) * d0 > 0.0 && t.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubics_exactly() {
        let p = |t: f64| 2.0 - t + 0.5 * t * t - 0.25 * t * t * t;
        let dp = |t: f64| -1.0 + t - 0.75 * t * t;
        let d2p = |t: f64| 1.0 - 1.5 * t;
        let x: Vec<f64> = (0..9).map(|i| -1.0 + 0.37 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| p(t)).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for k in 0..40 {
            let t = -1.0 + 0.09 * k as f64;
            let (v, v1, v2, v3) = s.eval_all(t);
            assert!((v - p(t)).abs() < 1e-12, "value mismatch at {t}");
            assert!((v1 - dp(t)).abs() < 1e-11);
            assert!((v2 - d2p(t)).abs() < 1e-10);
            assert!((v3 + 1.5).abs() < 1e-9);
        }
    }

    #[test]
    fn spline_rejects_short_or_unsorted_tables() {
        assert!(CubicSpline::new(&[0.0, 1.0], &[1.0, 1.0]).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0, 0.5, 2.0], &[0.0; 4]).is_err());
    }

    #[test]
    fn monotone_cubic_preserves_nonnegativity() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [0.0, 0.0, 5.0, 0.0, 0.0];
        let m = MonotoneCubic::new(&x, &y).unwrap();
        let mut k = 0;
        while k <= 400 {
            let s = 0.01 * k as f64;
            assert!(m.value(s) >= -1e-14, "overshoot at {s}: {}", m.value(s));
            k += 1;
        }
        assert!((m.value(2.0) - 5.0).abs() < 1e-14);
    }
}
