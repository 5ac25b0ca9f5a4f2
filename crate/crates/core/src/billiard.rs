//! The billiard function f and everything derived from it: retarded times,
//! the inverse map, analytic derivatives, bounce sequences with cumulative
//! Döppler factors, and the Schwarzian of f.
//!
//! f is defined by f(t + L(t)) = t - L(t): it sends the arrival time of a
//! right-moving ray at the moving mirror to the departure time of the
//! reflected ray at the static mirror. Because |L'| < 1, both retardation
//! maps t ± L(t) are strictly increasing, every solve below sits on a
//! monotone function, and f itself is strictly increasing with a well
//! defined inverse.

use crate::error::{CavityError, Result};
use crate::roots;
use crate::trajectory::{MirrorState, MirrorTrajectory};

/// Numerical realization of the billiard function for one mirror worldline.
#[derive(Debug, Clone)]
pub struct BilliardMap {
    traj: MirrorTrajectory,
    root_tolerance: f64,
    bracket_step: f64,
}

/// First three derivatives of f at a point.
///
/// Derivation: f(tau) = t* - L(t*) with the retarded time defined by
/// t* + L(t*) = tau. Differentiating the defining relation gives
/// (1 + L') dt*/dtau = 1, so with v = L'(t*), a = L''(t*), j = L'''(t*):
///
/// ```text
/// f'   = (1 - v) dt*/dtau                  = (1 - v)/(1 + v)
/// f''  = d/dtau [(1-v)/(1+v)]
///      = [-a(1+v) - (1-v)a]/(1+v)^2 * dt*/dtau
///                                          = -2a/(1 + v)^3
/// f''' = d/dtau [-2a (1+v)^-3]
///      = [-2j(1+v)^-3 + 6a^2 (1+v)^-4] * dt*/dtau
///                                          = [-2j(1+v) + 6a^2]/(1 + v)^5
/// ```
///
/// Subluminality (|v| < 1) keeps every denominator positive, so f' > 0.
#[derive(Debug, Clone, Copy)]
pub struct FDerivatives {
    pub first: f64,
    pub second: f64,
    pub third: f64,
}

impl FDerivatives {
    fn from_state(st: &MirrorState) -> Self {
        let opv = 1.0 + st.velocity;
        let first = (1.0 - st.velocity) / opv;
        let second = -2.0 * st.acceleration / opv.powi(3);
        let third = (-2.0 * st.jerk * opv + 6.0 * st.acceleration * st.acceleration) / opv.powi(5);
        Self {
            first,
            second,
            third,
        }
    }

    /// Schwarzian f'''/f' - 3/2 (f''/f')^2 from the derivative triple.
    pub fn schwarzian(&self) -> f64 {
        let r2 = self.second / self.first;
        self.third / self.first - 1.5 * r2 * r2
    }
}

/// One backward step of the pull-to-seed iteration: the per-bounce Döppler
/// factor and Schwarzian of f at the visited point.
#[derive(Debug, Clone, Copy)]
pub struct PullStep {
    pub fprime: f64,
    pub schwarzian: f64,
}

/// Result of pulling an observation time back into the seed interval
/// [-L(0), L(0)] by iterating f.
#[derive(Debug, Clone)]
pub struct PullToSeed {
    /// Landing point in the seed interval.
    pub seed_tau: f64,
    /// Per-visited-point data, ordered from the query point inward. With n
    /// steps, `steps[n-k]` belongs to the k-th forward image of `seed_tau`.
    pub steps: Vec<PullStep>,
}

impl PullToSeed {
    /// Cumulative log Döppler factor of the forward map seed -> query.
    pub fn log_doppler(&self) -> f64 {
        self.steps.iter().map(|s| s.fprime.ln()).sum()
    }

    /// Cumulative conformal-anomaly contribution A_n at the seed point,
    /// summed as `-(1/24 pi) sum_k D_k^-2 S[f](T_k)` over the forward orbit.
    pub fn anomaly(&self) -> f64 {
        let mut log_d = 0.0;
        let mut a = 0.0;
        // suffix products: steps[n-1] is the first forward bounce T_1
        for step in self.steps.iter().rev() {
            log_d += step.fprime.ln();
            a -= (-2.0 * log_d).exp() * step.schwarzian;
        }
        a / (24.0 * std::f64::consts::PI)
    }
}

/// The sequence of static-mirror collision times T_0..T_n along one optical
/// path, with retarded (moving-mirror) times, per-bounce and cumulative
/// Döppler factors, and the Schwarzian of f at each collision time.
#[derive(Debug, Clone)]
pub struct BounceSequence {
    times: Vec<f64>,
    retarded: Vec<f64>,
    step_doppler: Vec<f64>,
    cum_log_doppler: Vec<f64>,
    schwarzians: Vec<f64>,
}

impl BounceSequence {
    /// Number of bounces n (times() has n + 1 entries).
    pub fn len(&self) -> usize {
        self.retarded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retarded.is_empty()
    }

    pub fn tau0(&self) -> f64 {
        self.times[0]
    }

    /// T_0..T_n.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Retarded bounce times T*_1..T*_n.
    pub fn retarded(&self) -> &[f64] {
        &self.retarded
    }

    /// Cumulative Döppler factor D_k = prod_{j<=k} f'(T_j); D_0 = 1.
    /// Computed from the log-space accumulator, which stays finite long
    /// after the plain product would overflow.
    pub fn doppler(&self, k: usize) -> f64 {
        self.log_doppler(k).exp()
    }

    /// ln D_k; 0 for k = 0.
    pub fn log_doppler(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.cum_log_doppler[k - 1]
        }
    }

    /// Per-bounce factor f'(T_k), k = 1..=n.
    pub fn step_doppler(&self, k: usize) -> f64 {
        self.step_doppler[k - 1]
    }

    /// `S[f](T_k)`, k = 1..=n.
    pub fn schwarzian_at(&self, k: usize) -> f64 {
        self.schwarzians[k - 1]
    }
}

impl BilliardMap {
    /// Build a map over `traj` with the default root tolerance
    /// 1e-12 * max(1, L0).
    pub fn new(traj: MirrorTrajectory) -> Self {
        let l0 = traj.l0();
        Self {
            root_tolerance: 1e-12 * l0.max(1.0),
            bracket_step: 0.5 * l0,
            traj,
        }
    }

    pub fn with_root_tolerance(mut self, tol: f64) -> Self {
        self.root_tolerance = tol;
        self
    }

    pub fn trajectory(&self) -> &MirrorTrajectory {
        &self.traj
    }

    pub fn root_tolerance(&self) -> f64 {
        self.root_tolerance
    }

    /// Solve t + L(t) = tau for the retarded time t*. Unique because
    /// g(t) = t + L(t) has g' = 1 + L' > 0.
    pub fn retarded_time(&self, tau: f64) -> Result<f64> {
        self.solve_retardation(tau, tau - self.traj.l0(), 1.0)
    }

    /// Solve t - L(t) = tau (the retardation relation of the inverse map).
    fn advanced_time(&self, tau: f64, guess: f64) -> Result<f64> {
        self.solve_retardation(tau, guess, -1.0)
    }

    /// Shared monotone solve: t + sign*L(t) = tau.
    fn solve_retardation(&self, tau: f64, guess: f64, sign: f64) -> Result<f64> {
        let g = |t: f64| t + sign * self.traj.position(t) - tau;
        let domain = self.traj.domain();
        let (lo, hi) = roots::grow_bracket(g, guess, self.bracket_step, domain)?;
        let gd = |t: f64| {
            let st = self.traj.state(t);
            (t + sign * st.position - tau, 1.0 + sign * st.velocity)
        };
        let r = roots::newton_bisection(gd, lo, hi, 0.5 * (lo + hi), self.root_tolerance)?;
        Ok(r.x)
    }

    /// f(tau) = t* - L(t*) with t* the retarded time of tau.
    pub fn f_eval(&self, tau: f64) -> Result<f64> {
        let t = self.retarded_time(tau)?;
        Ok(t - self.traj.position(t))
    }

    /// f^-1(tau) = t + L(t) where t - L(t) = tau.
    pub fn f_inverse(&self, tau: f64) -> Result<f64> {
        let t = self.advanced_time(tau, tau + self.traj.l0())?;
        Ok(t + self.traj.position(t))
    }

    /// Analytic first three derivatives of f at `tau`.
    pub fn f_derivatives(&self, tau: f64) -> Result<FDerivatives> {
        let t = self.retarded_time(tau)?;
        Ok(FDerivatives::from_state(&self.traj.state(t)))
    }

    /// Schwarzian derivative `S[f](tau) = f'''/f' - 3/2 (f''/f')^2`.
    pub fn schwarzian_f(&self, tau: f64) -> Result<f64> {
        Ok(self.f_derivatives(tau)?.schwarzian())
    }

    /// Iterate the optical path forward: T_0 = tau0, T_k = f^-1(T_{k-1}).
    ///
    /// Each step solves t - L(t) = T_{k-1}, warm-started one cavity length
    /// past the previous collision (bounces are ~2 L0 apart), and reads the
    /// bounce data from the solved retarded time.
    pub fn iterate_bounces(&self, tau0: f64, n: usize) -> Result<BounceSequence> {
        let l0 = self.traj.l0();
        let mut seq = BounceSequence {
            times: Vec::with_capacity(n + 1),
            retarded: Vec::with_capacity(n),
            step_doppler: Vec::with_capacity(n),
            cum_log_doppler: Vec::with_capacity(n),
            schwarzians: Vec::with_capacity(n),
        };
        seq.times.push(tau0);
        let mut prev = tau0;
        let mut log_d = 0.0;
        for _ in 0..n {
            let t_star = self.advanced_time(prev, prev + l0)?;
            let st = self.traj.state(t_star);
            let next = t_star + st.position;
            if next <= prev {
                return Err(CavityError::Domain(format!(
                    "bounce times failed to increase at T = {next}"
                )));
            }
            let d = FDerivatives::from_state(&st);
            log_d += d.first.ln();
            seq.times.push(next);
            seq.retarded.push(t_star);
            seq.step_doppler.push(d.first);
            seq.cum_log_doppler.push(log_d);
            seq.schwarzians.push(d.schwarzian());
            prev = next;
        }
        Ok(seq)
    }

    /// Pull `tau` back into the seed interval [-L(0), L(0)] by iterating f,
    /// recording the per-step Döppler factor and Schwarzian.
    ///
    /// f maps (L0, f^-1(L0)] onto (-L0, L0] and is increasing, so the
    /// iteration lands in the seed interval without overshooting it. This is
    /// the cheap direction: each step is a single retardation solve.
    pub fn pull_to_seed(&self, tau: f64) -> Result<PullToSeed> {
        let l0 = self.traj.l0();
        let slack = 1e-9 * l0.max(1.0);
        if tau < -l0 - slack {
            return Err(CavityError::Domain(format!(
                "tau = {tau} precedes the seed interval [-{l0}, {l0}] (forward evolution only)"
            )));
        }
        let mut steps = Vec::new();
        let mut sigma = tau.max(-l0);
        while sigma > l0 {
            let t_star = self.retarded_time(sigma)?;
            let st = self.traj.state(t_star);
            let d = FDerivatives::from_state(&st);
            steps.push(PullStep {
                fprime: d.first,
                schwarzian: d.schwarzian(),
            });
            sigma = t_star - st.position;
            if sigma < -l0 {
                // f(sigma_prev) > -L0 in exact arithmetic; only roundoff at
                // the boundary can land here
                if sigma < -l0 - slack {
                    return Err(CavityError::Domain(format!(
                        "pull-back overshot the seed interval at {sigma}"
                    )));
                }
                sigma = -l0;
            }
        }
        Ok(PullToSeed {
            seed_tau: sigma,
            steps,
        })
    }
}
