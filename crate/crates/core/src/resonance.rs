//! Return points of the mirror, periodic particle trajectories and their
//! stability classification, first-order perturbation checks, and the
//! resonance band scan.
//!
//! A periodic optical path of period T = 2 L0 exists exactly when the mirror
//! returns to its unperturbed position: L(tau*) = L0 with tau* the retarded
//! bounce time. The path is amplified (positive) when the mirror moves
//! inward there, damped (negative) when it moves outward, marginal when it
//! reflects at a turning point.

use std::f64::consts::PI;

use crate::billiard::BilliardMap;
use crate::error::{CavityError, Result};
use crate::roots;
use crate::trajectory::MirrorTrajectory;

/// Tolerances of the return-point search.
const LEVEL_TOL_REL: f64 = 1e-10;
/// |L'| below this at a solution counts as a tangential (marginal) return.
const TANGENT_VEL_TOL: f64 = 1e-8;

/// An instant at which the mirror crosses (or touches) the reference length.
#[derive(Debug, Clone, Copy)]
pub struct ReturnPoint {
    pub tau_star: f64,
    pub mirror_velocity: f64,
    /// Single-bounce Döppler factor (1 - L')/(1 + L') at the return point.
    pub doppler: f64,
    /// Tangential touch: the mirror reverses exactly at the reference length.
    pub tangential: bool,
}

/// Result of a return-point scan. A mirror that never leaves the reference
/// length has every instant as a return point and is reported as degenerate
/// rather than as an infinite list.
#[derive(Debug, Clone)]
pub enum ReturnPointScan {
    Degenerate,
    Points(Vec<ReturnPoint>),
}

impl ReturnPointScan {
    pub fn points(&self) -> &[ReturnPoint] {
        match self {
            Self::Degenerate => &[],
            Self::Points(p) => p,
        }
    }
}

/// Stability label of a periodic trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectorySign {
    Positive,
    Negative,
    Marginal,
}

/// A periodic particle trajectory of period 2 L0.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicTrajectory {
    /// Starting point in [-L0, L0).
    pub tau0: f64,
    pub period: f64,
    pub sign: TrajectorySign,
    /// D_1(tau0), the per-period Döppler factor.
    pub per_period_doppler: f64,
}

/// Periodic-trajectory scan result; degenerate for a static mirror.
#[derive(Debug, Clone)]
pub enum PeriodicScan {
    Degenerate,
    Trajectories(Vec<PeriodicTrajectory>),
}

impl PeriodicScan {
    pub fn trajectories(&self) -> &[PeriodicTrajectory] {
        match self {
            Self::Degenerate => &[],
            Self::Trajectories(t) => t,
        }
    }
}

/// All solutions of L(tau*) = L0 in `window` (see [`find_level_crossings`]).
pub fn find_return_points(
    traj: &MirrorTrajectory,
    window: (f64, f64),
) -> Result<ReturnPointScan> {
    find_level_crossings(traj, window, traj.l0())
}

/// All solutions of L(tau*) = `level` in `window`.
///
/// Sign changes of L - level on a dense grid (>= 1024 points per mirror
/// period) are polished by safeguarded Newton; tangential touches are found
/// separately by polishing the extrema of L and testing their level
/// distance.
pub fn find_level_crossings(
    traj: &MirrorTrajectory,
    window: (f64, f64),
    level: f64,
) -> Result<ReturnPointScan> {
    let (a, b) = window;
    if !(b > a) {
        return Err(CavityError::Precondition(format!(
            "scan window must be a forward interval, got [{a}, {b}]"
        )));
    }
    let l0 = traj.l0();
    let tol = LEVEL_TOL_REL * l0.max(1.0);
    let step = traj.scan_step();
    let n = (((b - a) / step).ceil() as usize).clamp(64, 4_000_000);

    let g = |t: f64| traj.position(t) - level;
    // grid values this close to the level are roundoff of an exact root:
    // treating them as signed would fabricate crossings on both sides of a
    // tangential touch that happens to sit on a grid point
    let zero_tol = 1e-12 * level.abs().max(1.0);
    let grid_h = (b - a) / n as f64;
    let mut vals = Vec::with_capacity(n + 1);
    let mut flat = true;
    for i in 0..=n {
        let t = a + (b - a) * i as f64 / n as f64;
        let v = g(t);
        if v.abs() > tol {
            flat = false;
        }
        vals.push((t, v));
    }
    if flat {
        return Ok(ReturnPointScan::Degenerate);
    }

    // (tau, found_by_extremum_polish)
    let mut candidates: Vec<(f64, bool)> = Vec::new();

    for w in vals.windows(2) {
        let ((t0, v0), (t1, v1)) = (w[0], w[1]);
        if v0.abs() <= zero_tol {
            candidates.push((t0, false));
            continue;
        }
        if v1.abs() <= zero_tol {
            continue; // handled as the next window's left point
        }
        if v0.signum() != v1.signum() {
            let inc = v1 > v0;
            let f = |t: f64| {
                let st = traj.state(t);
                let sgn = if inc { 1.0 } else { -1.0 };
                (sgn * (st.position - level), sgn * st.velocity)
            };
            // polish well past the acceptance tolerance: Newton converges
            // quadratically and downstream Döppler factors read L' here
            let r = roots::newton_bisection(
                f,
                t0,
                t1,
                0.5 * (t0 + t1),
                (1e-13 * level.abs().max(1.0)).min(tol),
            )?;
            candidates.push((r.x, false));
        }
    }
    if vals.last().map(|&(_, v)| v.abs() <= zero_tol) == Some(true) {
        candidates.push((vals.last().unwrap().0, false));
    }

    // tangential touches: polish extrema of L, accept those on the level
    for w in vals.windows(2) {
        let ((t0, _), (t1, _)) = (w[0], w[1]);
        let (d0, d1) = (traj.velocity(t0), traj.velocity(t1));
        if d0 == 0.0 || d0.signum() == d1.signum() {
            continue;
        }
        let inc = d1 > d0;
        let f = |t: f64| {
            let st = traj.state(t);
            let sgn = if inc { 1.0 } else { -1.0 };
            (sgn * st.velocity, sgn * st.acceleration)
        };
        let r = roots::newton_bisection(f, t0, t1, 0.5 * (t0 + t1), 1e-13)?;
        if (traj.position(r.x) - level).abs() <= tol {
            candidates.push((r.x, true));
        }
    }

    // cluster candidates: roundoff around a tangential touch produces
    // near-duplicates well inside a grid step; the extremum-polished point
    // is the accurate representative when present
    candidates.sort_by(|p, q| p.0.total_cmp(&q.0));
    let merge_radius = 0.35 * grid_h;
    let mut points: Vec<ReturnPoint> = Vec::new();
    let mut i = 0;
    while i < candidates.len() {
        let mut j = i + 1;
        while j < candidates.len() && candidates[j].0 - candidates[j - 1].0 <= merge_radius {
            j += 1;
        }
        let cluster = &candidates[i..j];
        let rep = cluster
            .iter()
            .find(|c| c.1)
            .or_else(|| cluster.first())
            .unwrap()
            .0;
        let v = traj.velocity(rep);
        points.push(ReturnPoint {
            tau_star: rep,
            mirror_velocity: v,
            doppler: (1.0 - v) / (1.0 + v),
            tangential: v.abs() <= TANGENT_VEL_TOL,
        });
        i = j;
    }
    Ok(ReturnPointScan::Points(points))
}

/// Periodic particle trajectories with starting points in [-L0, L0).
///
/// Uses the identity T_1(tau0) - tau0 = 2 L(T*_1): a starting point is
/// periodic with period 2 L0 exactly when its first bounce is a return
/// point, so the search reduces to a return-point scan over the window of
/// first-bounce times T*_1([-L0, L0)).
pub fn find_periodic_trajectories(map: &BilliardMap) -> Result<PeriodicScan> {
    let traj = map.trajectory();
    let l0 = traj.l0();
    // T*_1 of tau0 solves t - L(t) = tau0, so the bounce window is the
    // preimage of [-L0, L0) under t - L(t); T*_1 = (T_1 + tau0)/2. The right
    // edge is trimmed by half a scan step: a point there duplicates the
    // window start one period earlier.
    let t_lo = 0.5 * (map.f_inverse(-l0)? - l0);
    let t_hi = 0.5 * (map.f_inverse(l0)? + l0);

    let scan = find_level_crossings(traj, (t_lo, t_hi - 0.5 * traj.scan_step()), l0)?;
    let points = match scan {
        ReturnPointScan::Degenerate => return Ok(PeriodicScan::Degenerate),
        ReturnPointScan::Points(p) => p,
    };
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let tau0 = p.tau_star - l0;
        let sign = if p.mirror_velocity.abs() <= TANGENT_VEL_TOL {
            TrajectorySign::Marginal
        } else if p.mirror_velocity < 0.0 {
            TrajectorySign::Positive
        } else {
            TrajectorySign::Negative
        };
        out.push(PeriodicTrajectory {
            tau0,
            period: 2.0 * l0,
            sign,
            per_period_doppler: p.doppler,
        });
    }
    Ok(PeriodicScan::Trajectories(out))
}

/// Measured residuals of the first-order perturbation formulas around a
/// periodic trajectory.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationReport {
    pub eps: f64,
    pub n: usize,
    /// |T_n(tau0 + delta) - (tau0 + n T + expected_shift)|.
    pub residual: f64,
    pub residual_over_eps: f64,
}

/// Check the perturbation asymptotics: around a positive point,
/// T_n(tau+ + eps) ~ tau+ + nT + eps / D_n(tau+); around a negative point,
/// T_n(tau- + eps D_n(tau-)) ~ tau- + nT + eps. Marginal points use the
/// positive form (both coincide at D_n = 1).
pub fn perturbation_check(
    map: &BilliardMap,
    ptraj: &PeriodicTrajectory,
    eps: f64,
    n: usize,
) -> Result<PerturbationReport> {
    let on_axis = map.iterate_bounces(ptraj.tau0, n)?;
    let d_n = on_axis.doppler(n);
    let (delta, shift) = match ptraj.sign {
        TrajectorySign::Negative => (eps * d_n, eps),
        _ => (eps, eps / d_n),
    };
    let seq = map.iterate_bounces(ptraj.tau0 + delta, n)?;
    let expected = ptraj.tau0 + n as f64 * ptraj.period + shift;
    let residual = (seq.times()[n] - expected).abs();
    Ok(PerturbationReport {
        eps,
        n,
        residual,
        residual_over_eps: residual / eps.abs(),
    })
}

/// One sample of a band scan.
#[derive(Debug, Clone, Copy)]
pub struct BandPoint {
    pub omega: f64,
    /// (omega - omega_N) / omega.
    pub detuning_rel: f64,
    pub has_return_points: bool,
    /// Per-period log Döppler factor of the amplified trajectory, 0 outside
    /// the band or at its tangential boundary.
    pub growth_exponent: f64,
}

/// Band scan of the sinusoidal family over a frequency range.
#[derive(Debug, Clone)]
pub struct BandScanResult {
    pub l0: f64,
    pub dl: f64,
    pub points: Vec<BandPoint>,
}

/// Evaluate one frequency sample of the band structure numerically.
///
/// For omega near the N-th resonance the candidate period is T = 2 pi N /
/// omega (N mirror oscillations per round trip), so periodic paths require
/// L(tau*) = T/2 = N pi / omega. The growth exponent is measured from an
/// actual bounce, not from the closed form, which stays available as an
/// independent oracle.
pub fn scan_band_point(l0: f64, dl: f64, omega: f64) -> Result<BandPoint> {
    let order = (omega * l0 / PI).round();
    if order < 1.0 {
        return Err(CavityError::Precondition(format!(
            "omega = {omega} is below the first resonance pi/L0"
        )));
    }
    let omega_n = order * PI / l0;
    let detuning_rel = (omega - omega_n) / omega;
    let traj = MirrorTrajectory::sinusoidal(l0, dl, omega)?;
    let map = BilliardMap::new(traj.clone());
    let level = order * PI / omega; // T/2
    let mirror_period = 2.0 * PI / omega;
    let scan = find_level_crossings(&traj, (0.0, mirror_period), level)?;
    let points = scan.points();
    if points.is_empty() {
        return Ok(BandPoint {
            omega,
            detuning_rel,
            has_return_points: false,
            growth_exponent: 0.0,
        });
    }
    // amplified trajectory: the mirror moves inward at the bounce
    let best = points
        .iter()
        .min_by(|p, q| p.mirror_velocity.total_cmp(&q.mirror_velocity))
        .unwrap();
    if best.tangential || best.mirror_velocity >= 0.0 {
        return Ok(BandPoint {
            omega,
            detuning_rel,
            has_return_points: true,
            growth_exponent: 0.0,
        });
    }
    let period = 2.0 * level;
    let tau0 = best.tau_star - level;
    let seq = map.iterate_bounces(tau0, 1)?;
    let closure = (seq.times()[1] - tau0 - period).abs();
    if closure > 1e-8 * l0.max(1.0) {
        return Err(CavityError::Domain(format!(
            "trajectory at omega = {omega} failed to close: residual {closure:.3e}"
        )));
    }
    Ok(BandPoint {
        omega,
        detuning_rel,
        has_return_points: true,
        growth_exponent: seq.log_doppler(1),
    })
}

/// Scan `samples` frequencies across `omega_range` (inclusive endpoints).
pub fn scan_band(
    l0: f64,
    dl: f64,
    omega_range: (f64, f64),
    samples: usize,
) -> Result<BandScanResult> {
    if samples < 2 {
        return Err(CavityError::Precondition(
            "band scan needs at least 2 samples".into(),
        ));
    }
    let (w0, w1) = omega_range;
    let mut points = Vec::with_capacity(samples);
    for i in 0..samples {
        let omega = w0 + (w1 - w0) * i as f64 / (samples - 1) as f64;
        points.push(scan_band_point(l0, dl, omega)?);
    }
    Ok(BandScanResult { l0, dl, points })
}
