//! Classical Cauchy evolution of the cavity field through the billiard
//! function: the density profile rho(tau) = phi'(tau)^2 seeded on
//! [-L(0), L(0)] is extended forward by rho(T_n(tau)) = rho(tau) D_n^2(tau),
//! giving the energy density T00(t, x) = rho(t + x) + rho(t - x) and the
//! total energy as a single line integral of the profile.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::billiard::BilliardMap;
use crate::error::{CavityError, Result};
use crate::interp::MonotoneCubic;
use crate::peaks::{self, Peak, PeakOptions};
use crate::quad;

/// Relative tolerance of the energy quadratures.
pub const ENERGY_REL_TOL: f64 = 1e-8;
const MAX_SUBDIV: usize = 20_000;

/// Seed density on the initial interval.
#[derive(Clone)]
pub enum SeedProfile {
    Uniform(f64),
    /// Arbitrary closed form; must be non-negative on the seed interval for
    /// a classical field (rho is a squared field gradient).
    ClosedForm(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Monotone-cubic interpolation of samples: a non-negative table never
    /// interpolates negative.
    Sampled(Arc<MonotoneCubic>),
}

impl std::fmt::Debug for SeedProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Uniform(c) => write!(f, "Uniform({c})"),
            Self::ClosedForm(_) => write!(f, "ClosedForm(..)"),
            Self::Sampled(_) => write!(f, "Sampled(..)"),
        }
    }
}

impl SeedProfile {
    pub fn eval(&self, tau: f64) -> f64 {
        match self {
            Self::Uniform(c) => *c,
            Self::ClosedForm(f) => f(tau),
            Self::Sampled(m) => m.value(tau),
        }
    }
}

/// A validated initial profile on exactly [-half_width, half_width].
#[derive(Debug, Clone)]
pub struct InitialProfile {
    seed: SeedProfile,
    half_width: f64,
}

impl InitialProfile {
    /// Uniform non-negative seed.
    pub fn uniform(value: f64, half_width: f64) -> Result<Self> {
        if !(value >= 0.0) {
            return Err(CavityError::Precondition(format!(
                "classical seed density {value} must be >= 0"
            )));
        }
        Ok(Self {
            seed: SeedProfile::Uniform(value),
            half_width,
        })
    }

    /// Closed-form seed; non-negativity is checked on a dense scan.
    pub fn closed_form(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        half_width: f64,
    ) -> Result<Self> {
        for i in 0..=4096 {
            let tau = -half_width + 2.0 * half_width * i as f64 / 4096.0;
            let v = f(tau);
            if !(v >= 0.0) {
                return Err(CavityError::Precondition(format!(
                    "classical seed density is negative at tau = {tau}: {v}"
                )));
            }
        }
        Ok(Self {
            seed: SeedProfile::ClosedForm(Arc::new(f)),
            half_width,
        })
    }

    /// Sampled seed over [-half_width, half_width].
    pub fn sampled(taus: &[f64], values: &[f64], half_width: f64) -> Result<Self> {
        if values.iter().any(|&v| !(v >= 0.0)) {
            return Err(CavityError::Precondition(
                "classical seed samples must be >= 0".into(),
            ));
        }
        let m = MonotoneCubic::new(taus, values)?;
        let (a, b) = m.domain();
        if a > -half_width || b < half_width {
            return Err(CavityError::Precondition(format!(
                "seed samples on [{a}, {b}] do not cover the initial interval [{}, {}]",
                -half_width, half_width
            )));
        }
        Ok(Self {
            seed: SeedProfile::Sampled(Arc::new(m)),
            half_width,
        })
    }

    pub fn eval(&self, tau: f64) -> f64 {
        self.seed.eval(tau)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }
}

/// Known peak lattice of the extended profile: anchors tau_+m plus integer
/// multiples of the period. Quadratures force subdivision there because the
/// travelling peaks narrow like 1/D_n and defeat naive adaptivity.
#[derive(Debug, Clone)]
pub struct PeakHints {
    pub anchors: Vec<f64>,
    pub period: f64,
}

impl PeakHints {
    /// All lattice points inside [a, b].
    pub fn split_points(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for &anchor in &self.anchors {
            let k0 = ((a - anchor) / self.period).floor() as i64;
            let k1 = ((b - anchor) / self.period).ceil() as i64;
            for k in k0..=k1 {
                let s = anchor + k as f64 * self.period;
                if s > a && s < b {
                    out.push(s);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct PullBack {
    seed_tau: f64,
    log_doppler: f64,
}

/// The extended classical profile over a billiard map.
#[derive(Debug)]
pub struct ExtendedProfile {
    map: BilliardMap,
    base: InitialProfile,
    hints: Option<PeakHints>,
    // grow-only memo: completed pull-backs published under a write lock,
    // readers of distinct tau never contend on entry state
    cache: RwLock<HashMap<u64, PullBack>>,
}

impl ExtendedProfile {
    pub fn new(map: BilliardMap, base: InitialProfile) -> Result<Self> {
        let l0 = map.trajectory().l0();
        if (base.half_width() - l0).abs() > 1e-9 * l0.max(1.0) {
            return Err(CavityError::Precondition(format!(
                "seed interval half-width {} must equal L(0) = {l0}",
                base.half_width()
            )));
        }
        Ok(Self {
            map,
            base,
            hints: None,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn with_peak_hints(mut self, hints: PeakHints) -> Self {
        self.hints = Some(hints);
        self
    }

    pub fn map(&self) -> &BilliardMap {
        &self.map
    }

    pub fn seed(&self) -> &InitialProfile {
        &self.base
    }

    fn pull(&self, tau: f64) -> Result<PullBack> {
        let key = tau.to_bits();
        if let Some(hit) = self.cache.read().expect("poisoned").get(&key) {
            return Ok(*hit);
        }
        let p = self.map.pull_to_seed(tau)?;
        let pb = PullBack {
            seed_tau: p.seed_tau,
            log_doppler: p.log_doppler(),
        };
        self.cache.write().expect("poisoned").insert(key, pb);
        Ok(pb)
    }

    /// The profile rho(tau) for tau >= -L(0): pulled back through f until it
    /// lands in the seed interval, then amplified by the squared cumulative
    /// Döppler factor of the forward map. Exact identity on the seed
    /// interval itself.
    pub fn rho_at(&self, tau: f64) -> Result<f64> {
        let pb = self.pull(tau)?;
        Ok(self.base.eval(pb.seed_tau) * (2.0 * pb.log_doppler).exp())
    }

    /// Energy density T00(t, x) = rho(t + x) + rho(t - x) inside the cavity.
    pub fn energy_density(&self, t: f64, x: f64) -> Result<f64> {
        let l_t = self.map.trajectory().position(t);
        if !(0.0..=1.0 + 1e-12).contains(&(x / l_t)) || x < 0.0 {
            return Err(CavityError::Domain(format!(
                "x = {x} outside the cavity [0, {l_t}] at t = {t}"
            )));
        }
        Ok(self.rho_at(t + x)? + self.rho_at(t - x)?)
    }

    /// Total energy E(t) = integral of rho over [t - L(t), t + L(t)].
    pub fn total_energy(&self, t: f64) -> Result<f64> {
        let l_t = self.map.trajectory().position(t);
        let (a, b) = (t - l_t, t + l_t);
        let splits = self
            .hints
            .as_ref()
            .map(|h| h.split_points(a, b))
            .unwrap_or_default();
        let r = quad::integrate(
            |tau| self.rho_at(tau),
            a,
            b,
            ENERGY_REL_TOL,
            0.0,
            &splits,
            MAX_SUBDIV,
        )?;
        Ok(r.value)
    }

    /// Total energy at the bounce midpoint T*_n(tau0) from initial data and
    /// the cumulative Döppler factor alone:
    /// E = integral over [f(tau0), tau0] of rho(tau) D_n(tau).
    ///
    /// Requires f(tau0) >= -L(0), i.e. tau0 >= L(0): the recursion reads the
    /// profile on [f(tau0), tau0] and only forward data exists.
    pub fn total_energy_recursive(&self, tau0: f64, n: usize) -> Result<f64> {
        let l0 = self.map.trajectory().l0();
        let a = self.map.f_eval(tau0)?;
        if a < -l0 - 1e-9 * l0.max(1.0) {
            return Err(CavityError::Precondition(format!(
                "tau0 = {tau0} has f(tau0) = {a} before the initial interval; \
                 the recursive route needs tau0 >= L(0)"
            )));
        }
        let splits = self
            .hints
            .as_ref()
            .map(|h| h.split_points(a, tau0))
            .unwrap_or_default();
        let r = quad::integrate(
            |tau| {
                let d = self.map.iterate_bounces(tau, n)?.doppler(n);
                Ok(self.rho_at(tau.max(-l0))? * d)
            },
            a,
            tau0,
            ENERGY_REL_TOL,
            0.0,
            &splits,
            MAX_SUBDIV,
        )?;
        Ok(r.value)
    }

    /// Local maxima of T00(t, .) on [0, L(t)] with their FWHM.
    pub fn peak_metrics(&self, t: f64) -> Result<Vec<Peak>> {
        self.peak_metrics_with(t, PeakOptions::default())
    }

    pub fn peak_metrics_with(&self, t: f64, opts: PeakOptions) -> Result<Vec<Peak>> {
        let l_t = self.map.trajectory().position(t);
        peaks::find_peaks(|x| self.energy_density(t, x), 0.0, l_t, opts)
    }
}
