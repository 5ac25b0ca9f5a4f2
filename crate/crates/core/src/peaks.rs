//! Peak detection and measurement on 1-d profiles.
//!
//! Narrow travelling packets shrink by a Döppler factor each cavity period,
//! so candidate maxima from a coarse grid are refined by repeated local
//! re-gridding before the full width at half maximum is measured.

use crate::error::{CavityError, Result};

/// A located local maximum.
#[derive(Debug, Clone, Copy)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
    /// Full width at half maximum; NaN when a half-height crossing leaves
    /// the search window.
    pub width: f64,
}

/// Options for [`find_peaks`].
#[derive(Debug, Clone, Copy)]
pub struct PeakOptions {
    /// Points in the initial uniform scan.
    pub coarse_points: usize,
    /// Keep only maxima at least this fraction of the global maximum.
    pub min_rel_height: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self {
            coarse_points: 4096,
            min_rel_height: 0.25,
        }
    }
}

/// Locate local maxima of `f` on `[a, b]` and measure their FWHM.
pub fn find_peaks(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    opts: PeakOptions,
) -> Result<Vec<Peak>> {
    if !(b > a) {
        return Err(CavityError::Precondition(format!(
            "peak search needs a forward interval, got [{a}, {b}]"
        )));
    }
    let n = opts.coarse_points.max(16);
    let step = (b - a) / n as f64;
    let mut xs = Vec::with_capacity(n + 1);
    let mut vs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = a + step * i as f64;
        xs.push(x);
        vs.push(f(x)?);
    }
    let global = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !global.is_finite() {
        return Err(CavityError::Domain("non-finite profile values".into()));
    }
    let floor = global * opts.min_rel_height;

    let mut peaks = Vec::new();
    for i in 1..n {
        if vs[i] > vs[i - 1] && vs[i] >= vs[i + 1] && vs[i] >= floor {
            let (pos, height) = refine_max(&mut f, xs[i - 1], xs[i + 1])?;
            let width = fwhm(&mut f, pos, height, a, b, step)?;
            peaks.push(Peak {
                position: pos,
                height,
                width,
            });
        }
    }
    // merge refinements that converged to the same maximum
    peaks.sort_by(|p, q| p.position.total_cmp(&q.position));
    peaks.dedup_by(|p, q| (p.position - q.position).abs() <= step * 1e-3);
    Ok(peaks)
}

/// Shrink a bracket around the maximum by repeated 24-point re-gridding.
fn refine_max(f: &mut impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let mut best = (0.5 * (lo + hi), f64::NEG_INFINITY);
    for _ in 0..30 {
        let m: usize = 24;
        let h = (hi - lo) / m as f64;
        let mut idx: usize = 0;
        let mut local_best = f64::NEG_INFINITY;
        for i in 0..=m {
            let x = lo + h * i as f64;
            let v = f(x)?;
            if v > local_best {
                local_best = v;
                idx = i;
            }
            if v > best.1 {
                best = (x, v);
            }
        }
        let new_lo = lo + h * idx.saturating_sub(1) as f64;
        let new_hi = (lo + h * (idx + 1).min(m) as f64).min(hi);
        lo = new_lo;
        hi = new_hi;
        if hi - lo <= f64::EPSILON * (lo.abs().max(1.0)) * 4.0 {
            break;
        }
    }
    Ok(best)
}

/// Full width at half maximum around a refined peak.
fn fwhm(
    f: &mut impl FnMut(f64) -> Result<f64>,
    pos: f64,
    height: f64,
    a: f64,
    b: f64,
    seed_step: f64,
) -> Result<f64> {
    let half = 0.5 * height;
    let left = half_crossing(f, pos, -1.0, half, a, b, seed_step)?;
    let right = half_crossing(f, pos, 1.0, half, a, b, seed_step)?;
    Ok(match (left, right) {
        (Some(l), Some(r)) => r - l,
        _ => f64::NAN,
    })
}

fn half_crossing(
    f: &mut impl FnMut(f64) -> Result<f64>,
    pos: f64,
    dir: f64,
    half: f64,
    a: f64,
    b: f64,
    seed_step: f64,
) -> Result<Option<f64>> {
    // walk outward with growing steps until the profile drops below half
    let mut step = seed_step * 1e-6;
    let mut inner = pos;
    for _ in 0..200 {
        let x = pos + dir * step;
        if x < a || x > b {
            return Ok(None);
        }
        if f(x)? < half {
            // bisect between the last point above half and this one
            let (mut xin, mut xout) = (inner, x);
            for _ in 0..80 {
                let mid = 0.5 * (xin + xout);
                if f(mid)? >= half {
                    xin = mid;
                } else {
                    xout = mid;
                }
            }
            return Ok(Some(0.5 * (xin + xout)));
        }
        inner = x;
        step *= 1.6;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_two_gaussians_with_correct_fwhm() {
        let f = |x: f64| {
            let g1 = (-((x - 0.3) / 0.01).powi(2) / 2.0).exp();
            let g2 = (-((x - 0.7) / 0.02).powi(2) / 2.0).exp();
            Ok(g1 + g2)
        };
        let peaks = find_peaks(f, 0.0, 1.0, PeakOptions::default()).unwrap();
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0].position - 0.3).abs() < 1e-6);
        assert!((peaks[1].position - 0.7).abs() < 1e-6);
        // FWHM of a Gaussian = 2 sqrt(2 ln 2) sigma
        let w1 = 2.0 * (2.0 * 2f64.ln()).sqrt() * 0.01;
        assert!((peaks[0].width - w1).abs() / w1 < 1e-3, "{}", peaks[0].width);
    }

    #[test]
    fn ignores_minor_bumps_below_threshold() {
        let f = |x: f64| Ok((-((x - 0.5) / 0.05).powi(2)).exp() + 0.01 * (40.0 * x).sin().max(0.0));
        let peaks = find_peaks(
            f,
            0.0,
            1.0,
            PeakOptions {
                min_rel_height: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(peaks.len(), 1);
    }
}
