//! Closed-form reference results for the two exactly solvable mirror
//! families, used as independent cross-checks of the generic numerical
//! engine. Nothing here feeds back into the engine: agreement between the
//! two routes is the library's release gate (see [`crate::verify`]).

use std::f64::consts::PI;

use crate::error::{CavityError, Result};

/// Closed forms for the sinusoidal motion L = L0 + dL sin(omega t) driven at
/// or near the N-th resonance omega_N = N pi / L0.
#[derive(Debug, Clone, Copy)]
pub struct SinusoidalClosedForms {
    pub l0: f64,
    pub dl: f64,
    pub order: u32,
    /// Detuning: omega = omega_N + delta_omega.
    pub delta_omega: f64,
}

impl SinusoidalClosedForms {
    pub fn resonant(l0: f64, dl: f64, order: u32) -> Self {
        Self {
            l0,
            dl,
            order,
            delta_omega: 0.0,
        }
    }

    pub fn detuned(l0: f64, dl: f64, order: u32, delta_omega: f64) -> Self {
        Self {
            l0,
            dl,
            order,
            delta_omega,
        }
    }

    pub fn omega_n(&self) -> f64 {
        self.order as f64 * PI / self.l0
    }

    pub fn omega(&self) -> f64 {
        self.omega_n() + self.delta_omega
    }

    /// Starting points of the amplified (positive) and damped (negative)
    /// periodic particle trajectories at exact resonance:
    /// tau_+m = (-N + 2m + 1) L/N, tau_-m = (-N + 2m) L/N, m = 0..N-1.
    pub fn starting_points(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.order as i64;
        let cell = self.l0 / self.order as f64;
        let plus = (0..n).map(|m| (2 * m + 1 - n) as f64 * cell).collect();
        let minus = (0..n).map(|m| (2 * m - n) as f64 * cell).collect();
        (plus, minus)
    }

    /// The per-period expansion parameter: q = omega dL at resonance,
    /// q = sqrt((omega dL)^2 - (L domega)^2) inside the detuned band.
    pub fn band_parameter(&self) -> Result<f64> {
        let wd = self.omega() * self.dl;
        let ld = self.l0 * self.delta_omega;
        let disc = wd * wd - ld * ld;
        if disc < 0.0 {
            return Err(CavityError::Precondition(format!(
                "outside the resonance band: |L domega| = {} > omega dL = {}",
                ld.abs(),
                wd
            )));
        }
        Ok(disc.sqrt())
    }

    /// Cumulative Döppler factor after n periods on the positive
    /// (`sign` = +1) or negative (`sign` = -1) periodic trajectory:
    /// ((1 ± q)/(1 ∓ q))^n.
    pub fn doppler(&self, sign: f64, n: usize) -> Result<f64> {
        let q = self.band_parameter()?;
        Ok(((1.0 + sign * q) / (1.0 - sign * q)).powi(n as i32))
    }

    /// Cumulative anomaly at the positive starting points after n periods
    /// (exact resonance):
    /// A_n = (omega_N^2 / 48 pi) (1 - D_n^-2) / (1 - omega_N^2 dL^2).
    pub fn anomaly(&self, n: usize) -> Result<f64> {
        if self.delta_omega != 0.0 {
            return Err(CavityError::Precondition(
                "anomaly closed form holds at exact resonance only".into(),
            ));
        }
        let w = self.omega_n();
        let x = w * self.dl;
        let d_n = self.doppler(1.0, n)?;
        Ok(w * w / (48.0 * PI) * (1.0 - 1.0 / (d_n * d_n)) / (1.0 - x * x))
    }

    /// Large-n limit of seed density + anomaly at a positive point: the
    /// growth coefficient of the quantum energy density.
    pub fn growth_coefficient(&self) -> Result<f64> {
        if self.delta_omega != 0.0 {
            return Err(CavityError::Precondition(
                "growth coefficient closed form holds at exact resonance only".into(),
            ));
        }
        let w1 = PI / self.l0;
        let wn = self.omega_n();
        let x = wn * self.dl;
        Ok(w1 * w1 / (48.0 * PI) * ((self.order * self.order) as f64 / (1.0 - x * x) - 1.0))
    }
}

/// Closed forms for the exactly solvable arcsine mirror family of order N
/// (see [`crate::trajectory::MirrorTrajectory::arcsine_exact`]).
#[derive(Debug, Clone, Copy)]
pub struct ArcsineClosedForms {
    pub l0: f64,
    pub dl: f64,
    pub order: u32,
}

impl ArcsineClosedForms {
    pub fn new(l0: f64, dl: f64, order: u32) -> Self {
        Self { l0, dl, order }
    }

    pub fn omega_n(&self) -> f64 {
        self.order as f64 * PI / self.l0
    }

    /// Mirror period 2 L0 / N.
    pub fn mirror_period(&self) -> f64 {
        2.0 * self.l0 / self.order as f64
    }

    fn half_tan(&self) -> f64 {
        (0.5 * self.omega_n() * self.dl).tan()
    }

    /// The exact billiard function
    ///
    /// f(tau) = (2/omega_N) arccot[ cot(omega_N (tau - L)/2) - 2 tan(omega_N dL/2) ] - L,
    ///
    /// with the arccot branch unwrapped per mirror period so f is continuous,
    /// strictly increasing, and commutes with shifts by the mirror period.
    /// The period index k = floor((tau + L)/P) picks the branch; on the base
    /// cell the principal arccot in (0, pi) applies and the constant fixes
    /// f(-L) = -3L (the static limit dL -> 0 gives f = tau - 2L).
    pub fn billiard(&self, tau: f64) -> f64 {
        let l = self.l0;
        let w = self.omega_n();
        let p = self.mirror_period();
        let k = ((tau + l) / p).floor();
        let tau_base = tau - k * p;
        // phase in [0, pi): cot is computed here, +inf at 0 is fine (arccot -> 0)
        let phi = (0.5 * w * (tau_base + l)).clamp(0.0, PI);
        let x = phi.cos() / phi.sin() - 2.0 * self.half_tan();
        let arccot = 1.0f64.atan2(x); // principal branch in (0, pi)
        2.0 / w * arccot - 3.0 * l + k * p
    }

    /// Exact inverse of [`Self::billiard`], by the same branch bookkeeping
    /// with the cot/arccot roles exchanged.
    pub fn billiard_inverse(&self, tau: f64) -> f64 {
        let l = self.l0;
        let w = self.omega_n();
        let p = self.mirror_period();
        let k = ((tau + 3.0 * l) / p).floor();
        let base = tau - k * p;
        let psi = (0.5 * w * (base + 3.0 * l)).clamp(0.0, PI);
        let x = psi.cos() / psi.sin() + 2.0 * self.half_tan();
        let arccot = 1.0f64.atan2(x);
        2.0 / w * arccot - l + k * p
    }

    /// Exact cumulative Döppler factor after n bounces:
    /// D_n(tau) = 1 + 2 n^2 t^2 [1 - cos(omega_N (tau+L))] + 2 n t sin(omega_N (tau+L)),
    /// t = tan(omega_N dL / 2). Equal to 1 on the marginal lattice
    /// tau = -L + k P (reflections at mirror turning points).
    pub fn doppler(&self, tau: f64, n: usize) -> f64 {
        let t = self.half_tan();
        let n = n as f64;
        let arg = self.omega_n() * (tau + self.l0);
        1.0 + 2.0 * n * n * t * t * (1.0 - arg.cos()) + 2.0 * n * t * arg.sin()
    }

    /// Exact cumulative anomaly A_n(tau) = (omega_N^2 / 48 pi)(1 - D_n^-2).
    pub fn anomaly(&self, tau: f64, n: usize) -> f64 {
        let w = self.omega_n();
        let d = self.doppler(tau, n);
        w * w / (48.0 * PI) * (1.0 - 1.0 / (d * d))
    }

    /// Exact quantum energy density on the n-th forward sheet:
    ///
    /// rho = -N^2 pi/(48 L^2)
    ///     + (N^2-1) pi/(48 L^2) {1 + 2 n^2 t^2 [1 - (-1)^N cos(omega_N tau)]
    ///                              - 2 n t (-1)^N sin(omega_N tau)}^-2.
    pub fn quantum_rho(&self, tau: f64, n: usize) -> f64 {
        let l2 = self.l0 * self.l0;
        let nn = self.order as f64;
        let sign = if self.order.is_multiple_of(2) { 1.0 } else { -1.0 };
        let t = self.half_tan();
        let k = n as f64;
        let arg = self.omega_n() * tau;
        let braces =
            1.0 + 2.0 * k * k * t * t * (1.0 - sign * arg.cos()) - 2.0 * k * sign * t * arg.sin();
        -nn * nn * PI / (48.0 * l2) + (nn * nn - 1.0) * PI / (48.0 * l2) / (braces * braces)
    }

    /// Sheet index of an observation time: tau in ((2n-1)L, (2n+1)L] needs n
    /// pull-back steps to reach the seed interval.
    pub fn sheet(&self, tau: f64) -> Result<usize> {
        let l = self.l0;
        if tau < -l {
            return Err(CavityError::Domain(format!(
                "tau = {tau} precedes the seed interval"
            )));
        }
        Ok(((tau + l) / (2.0 * l)).ceil().max(1.0) as usize - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starting_points_lattices() {
        let f = SinusoidalClosedForms::resonant(1.0, 0.01, 1);
        let (p, m) = f.starting_points();
        assert_eq!(p, vec![0.0]);
        assert_eq!(m, vec![-1.0]);
        let f = SinusoidalClosedForms::resonant(1.0, 0.01, 2);
        let (p, m) = f.starting_points();
        assert_eq!(p, vec![-0.5, 0.5]);
        assert_eq!(m, vec![-1.0, 0.0]);
        for &x in p.iter().chain(&m) {
            assert!((-1.0..1.0).contains(&x));
        }
    }

    #[test]
    fn doppler_values_and_asymptotics() {
        let f = SinusoidalClosedForms::resonant(1.0, 0.01, 1);
        let x = PI * 0.01;
        assert!((f.doppler(1.0, 1).unwrap() - (1.0 + x) / (1.0 - x)).abs() < 1e-15);
        // toward the band boundary the factor degenerates to 1 for all n:
        // L domega = omega dL solved for domega gives omega_N dL / (L - dL)
        let d_edge = f.omega_n() * 0.01 / (1.0 - 0.01);
        let edge = SinusoidalClosedForms::detuned(1.0, 0.01, 1, d_edge * (1.0 - 1e-9));
        let q = edge.band_parameter().unwrap();
        assert!(q.abs() < 1e-4, "q = {q}");
        for n in [1, 5, 40] {
            assert!((edge.doppler(1.0, n).unwrap() - 1.0).abs() < 1e-2);
        }
        // beyond the boundary there is no real band parameter
        let outside = SinusoidalClosedForms::detuned(1.0, 0.01, 1, d_edge * 1.01);
        assert!(outside.band_parameter().is_err());
        // log D_n within 1% of 2 n omega dL for small amplitudes
        for n in 1..=10usize {
            for wdl in [0.01, 0.03, 0.05] {
                let f = SinusoidalClosedForms::resonant(1.0, wdl / PI, 1);
                let log_d = f.doppler(1.0, n).unwrap().ln();
                let approx = 2.0 * n as f64 * wdl;
                assert!((log_d - approx).abs() / approx < 0.01, "n={n} wdl={wdl}");
            }
        }
    }

    #[test]
    fn anomaly_limits() {
        let f = SinusoidalClosedForms::resonant(1.0, 0.01, 2);
        assert_eq!(f.anomaly(0).unwrap(), 0.0);
        let w = f.omega_n();
        let limit = w * w / (48.0 * PI) / (1.0 - (w * 0.01).powi(2));
        let a_big = f.anomaly(400).unwrap();
        assert!((a_big - limit).abs() / limit < 1e-12);
    }

    #[test]
    fn arcsine_billiard_static_limit_and_monotonicity() {
        // dL -> 0: f -> tau - 2L on the matched branch
        let f = ArcsineClosedForms::new(1.0, 1e-9, 2);
        for tau in [-0.99, -0.5, 0.0, 0.7, 1.9, 3.4] {
            assert!((f.billiard(tau) - (tau - 2.0)).abs() < 1e-6);
        }
        // strictly increasing over three mirror periods
        let f = ArcsineClosedForms::new(1.0, 0.1, 2);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..10_000 {
            let tau = -1.0 + 3.0 * f.mirror_period() * i as f64 / 10_000.0;
            let v = f.billiard(tau);
            assert!(v > prev, "non-monotone at {tau}");
            prev = v;
        }
    }

    #[test]
    fn arcsine_billiard_periodicity_and_inverse() {
        let f = ArcsineClosedForms::new(1.0, 0.1, 2);
        let p = f.mirror_period();
        for tau in [-0.71, 0.3, 1.23] {
            let a = f.billiard(tau + 3.0 * p);
            let b = f.billiard(tau) + 3.0 * p;
            assert!((a - b).abs() < 1e-12);
            let round = f.billiard_inverse(f.billiard(tau));
            assert!((round - tau).abs() < 1e-12, "inverse at {tau}");
        }
    }

    #[test]
    fn arcsine_doppler_unity_on_marginal_lattice() {
        let f = ArcsineClosedForms::new(1.0, 0.1, 2);
        for n in [0usize, 1, 7, 50] {
            assert!((f.doppler(-1.0, n) - 1.0).abs() < 1e-12);
            assert!((f.doppler(0.0, n) - 1.0).abs() < 1e-12);
        }
        assert_eq!(f.doppler(0.33, 0), 1.0);
    }

    #[test]
    fn arcsine_doppler_grows_quadratically() {
        let f = ArcsineClosedForms::new(1.0, 0.1, 2);
        // at a pure-quadratic phase the n^2 term is clean from n = 10
        let ns: Vec<f64> = (1..=10).map(|i| 10.0 * i as f64).collect();
        let ds: Vec<f64> = ns.iter().map(|&n| f.doppler(-0.5, n as usize)).collect();
        let slope = crate::fit::loglog_slope(&ns, &ds);
        assert!((slope - 2.0).abs() < 0.05, "slope = {slope}");
        // at generic tau the linear cross-term biases small n slightly
        let ns: Vec<f64> = (1..=10).map(|i| 20.0 * i as f64).collect();
        let ds: Vec<f64> = ns.iter().map(|&n| f.doppler(0.37, n as usize)).collect();
        let slope = crate::fit::loglog_slope(&ns, &ds);
        assert!((slope - 2.0).abs() < 0.1, "slope = {slope}");
    }

    #[test]
    fn arcsine_rho_reduces_to_static_vacuum() {
        // N = 1: the prefactor N^2 - 1 kills the modulation entirely
        let f = ArcsineClosedForms::new(1.0, 0.1, 1);
        for (tau, n) in [(0.2, 0usize), (1.7, 5), (9.2, 30)] {
            assert!((f.quantum_rho(tau, n) + PI / 48.0).abs() < 1e-15);
        }
        // n = 0 braces term is exactly 1: the static vacuum for any N
        let f = ArcsineClosedForms::new(1.0, 0.1, 2);
        assert!((f.quantum_rho(0.0, 0) + PI / 48.0).abs() < 1e-15);
    }

    #[test]
    fn retarded_time_is_the_midpoint_of_the_exact_map() {
        // t* = (tau + f(tau))/2 ties the engine's retardation solve to the
        // closed-form billiard function
        let forms = ArcsineClosedForms::new(1.0, 0.1, 2);
        let map = crate::billiard::BilliardMap::new(
            crate::trajectory::MirrorTrajectory::arcsine_exact(1.0, 0.1, 2).unwrap(),
        );
        for tau in [-0.4, 0.9, 2.3, 5.7] {
            let t_star = map.retarded_time(tau).unwrap();
            let exact = 0.5 * (tau + forms.billiard(tau));
            assert!((t_star - exact).abs() < 1e-11, "tau = {tau}");
        }
    }

    #[test]
    fn sheet_index() {
        let f = ArcsineClosedForms::new(1.0, 0.1, 2);
        assert_eq!(f.sheet(0.0).unwrap(), 0);
        assert_eq!(f.sheet(1.0).unwrap(), 0);
        assert_eq!(f.sheet(1.0 + 1e-12).unwrap(), 1);
        assert_eq!(f.sheet(3.0).unwrap(), 1);
        assert_eq!(f.sheet(3.5).unwrap(), 2);
        assert!(f.sheet(-1.5).is_err());
    }
}
