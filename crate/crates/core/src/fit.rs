//! Small least-squares fits used to summarise energy growth: straight lines
//! (in transformed coordinates), exponentials and a + b n² models.

/// Least-squares line y = intercept + slope * x with residual diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// max_i |y_i - fit_i|
    pub max_abs_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let max_abs_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    LineFit {
        intercept,
        slope,
        max_abs_residual,
    }
}

/// Fit of y = a + b * x with residuals reported relative to |y|.
#[derive(Debug, Clone, Copy)]
pub struct ModelFit {
    pub a: f64,
    pub b: f64,
    /// max_i |y_i - fit_i| / |y_i|
    pub max_rel_residual: f64,
    /// sqrt(sum (y - fit)^2 / sum y^2)
    pub rms_rel_residual: f64,
}

fn rel_residuals(xs: &[f64], ys: &[f64], a: f64, b: f64) -> (f64, f64) {
    let mut max_rel: f64 = 0.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - a - b * x;
        if *y != 0.0 {
            max_rel = max_rel.max((r / y).abs());
        }
        num += r * r;
        den += y * y;
    }
    (max_rel, (num / den).sqrt())
}

/// y ≈ a + b * n² on the given samples.
pub fn fit_quadratic_in_n(ns: &[f64], ys: &[f64]) -> ModelFit {
    let xs: Vec<f64> = ns.iter().map(|n| n * n).collect();
    let line = fit_line(&xs, ys);
    let (max_rel, rms_rel) = rel_residuals(&xs, ys, line.intercept, line.slope);
    ModelFit {
        a: line.intercept,
        b: line.slope,
        max_rel_residual: max_rel,
        rms_rel_residual: rms_rel,
    }
}

/// y ≈ a * exp(b n); fitted as a line in log space, so all samples must be
/// positive. Residuals are quoted in log space, i.e. relative.
pub fn fit_exponential(ns: &[f64], ys: &[f64]) -> Option<ModelFit> {
    if ys.iter().any(|&y| y <= 0.0) {
        return None;
    }
    let logs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let line = fit_line(ns, &logs);
    let max_rel = line.max_abs_residual.exp_m1().abs();
    let (_, rms) = {
        let mut num = 0.0;
        for (n, l) in ns.iter().zip(&logs) {
            let r = l - line.intercept - line.slope * n;
            num += r * r;
        }
        (0.0, (num / ns.len() as f64).sqrt())
    };
    Some(ModelFit {
        a: line.intercept.exp(),
        b: line.slope,
        max_rel_residual: max_rel,
        rms_rel_residual: rms,
    })
}

/// Log-log slope of y(n), for power-law exponents.
pub fn loglog_slope(ns: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_line(&lx, &ly).slope
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_model_recovers_coefficients() {
        let ns: Vec<f64> = (5..40).map(|n| n as f64).collect();
        let ys: Vec<f64> = ns.iter().map(|n| 3.0 + 0.7 * n * n).collect();
        let fit = fit_quadratic_in_n(&ns, &ys);
        assert!((fit.a - 3.0).abs() < 1e-9);
        assert!((fit.b - 0.7).abs() < 1e-12);
        assert!(fit.max_rel_residual < 1e-12);
    }

    #[test]
    fn loglog_slope_of_pure_power() {
        let ns: Vec<f64> = (10..100).step_by(7).map(|n| n as f64).collect();
        let ys: Vec<f64> = ns.iter().map(|n| 2.5 * n.powi(4)).collect();
        assert!((loglog_slope(&ns, &ys) - 4.0).abs() < 1e-12);
    }
}
