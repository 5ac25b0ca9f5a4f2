//! Prescribed right-mirror worldlines L(t) with analytic derivatives up to
//! third order.
//!
//! Third derivatives are carried because the Schwarzian of the billiard
//! function needs f', f'' and f'''; differencing a root-solved f would
//! amplify solver noise, while these closed forms are exact.
//!
//! Built-in families: a static mirror, the sinusoidal motion
//! L(t) = L0 + dL sin(omega t), the arcsine family that admits an exact
//! billiard function, and tabulated motions interpolated by a not-a-knot
//! cubic spline (C², piecewise-constant third derivative).

use std::path::Path;
use std::sync::Arc;

use crate::error::{CavityError, Result};
use crate::interp::CubicSpline;

/// Mirror kinematic state at one instant: position and its first three time
/// derivatives.
#[derive(Debug, Clone, Copy, Default)]
pub struct MirrorState {
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
    pub jerk: f64,
}

#[derive(Debug)]
enum Repr {
    Static {
        l0: f64,
    },
    Sinusoidal {
        l0: f64,
        dl: f64,
        omega: f64,
    },
    /// L(t) = L0 + [arcsin(amp cos(omega_n t)) - asin(amp)] / omega_n with
    /// amp = sin(omega_n dl / 2). Oscillates in [L0 - dl, L0], touching L0
    /// exactly at the turning points cos(omega_n t) = 1.
    ArcsineExact {
        l0: f64,
        dl: f64,
        omega_n: f64,
        amp: f64,
    },
    Tabulated {
        spline: CubicSpline,
        l0: f64,
    },
}

/// An immutable, cheaply clonable mirror worldline.
#[derive(Debug, Clone)]
pub struct MirrorTrajectory {
    repr: Arc<Repr>,
}

impl MirrorTrajectory {
    /// Mirror at rest at distance `l0` from the fixed mirror.
    pub fn fixed(l0: f64) -> Result<Self> {
        if !(l0 > 0.0) {
            return Err(CavityError::InvalidTrajectory(format!(
                "L0 = {l0} must be > 0"
            )));
        }
        Ok(Self {
            repr: Arc::new(Repr::Static { l0 }),
        })
    }

    /// Sinusoidal motion L(t) = L0 + dL sin(omega t).
    ///
    /// Requires 0 < dL < L0 (the cavity never collapses) and omega dL < 1
    /// (subluminal mirror, since sup|L'| = omega dL).
    pub fn sinusoidal(l0: f64, dl: f64, omega: f64) -> Result<Self> {
        if !(l0 > 0.0) {
            return Err(CavityError::InvalidTrajectory(format!(
                "L0 = {l0} must be > 0"
            )));
        }
        if !(dl > 0.0 && dl < l0) {
            return Err(CavityError::InvalidTrajectory(format!(
                "dL = {dl} violates 0 < dL < L0 = {l0}"
            )));
        }
        if !(omega > 0.0) {
            return Err(CavityError::InvalidTrajectory(format!(
                "omega = {omega} must be > 0"
            )));
        }
        if !(omega * dl < 1.0) {
            return Err(CavityError::InvalidTrajectory(format!(
                "omega*dL = {} violates omega*dL < 1 (superluminal mirror)",
                omega * dl
            )));
        }
        Ok(Self {
            repr: Arc::new(Repr::Sinusoidal { l0, dl, omega }),
        })
    }

    /// Sinusoidal motion at the N-th parametric resonance omega_N = N pi / L0.
    pub fn sinusoidal_resonant(l0: f64, dl: f64, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(CavityError::InvalidTrajectory(
                "resonance order N must be >= 1".into(),
            ));
        }
        Self::sinusoidal(l0, dl, order as f64 * std::f64::consts::PI / l0)
    }

    /// The exactly solvable arcsine family of order `order`,
    ///
    /// L(t) = L0 + { arcsin[ sin(omega_N dL/2) cos(omega_N t) ] - omega_N dL/2 } / omega_N,
    ///
    /// with omega_N = N pi / L0. Requires 0 < dL < L0 and N dL < L0 so the
    /// arcsine argument stays on the principal branch (then L(0) = L0
    /// exactly and sup|L'| = sin(omega_N dL/2) < 1).
    pub fn arcsine_exact(l0: f64, dl: f64, order: u32) -> Result<Self> {
        if !(l0 > 0.0) {
            return Err(CavityError::InvalidTrajectory(format!(
                "L0 = {l0} must be > 0"
            )));
        }
        if order == 0 {
            return Err(CavityError::InvalidTrajectory(
                "order N must be >= 1".into(),
            ));
        }
        if !(dl > 0.0 && dl < l0) {
            return Err(CavityError::InvalidTrajectory(format!(
                "dL = {dl} violates 0 < dL < L0 = {l0}"
            )));
        }
        if !(order as f64 * dl < l0) {
            return Err(CavityError::InvalidTrajectory(format!(
                "N*dL = {} violates N*dL < L0 = {l0} (principal arcsine branch)",
                order as f64 * dl
            )));
        }
        let omega_n = order as f64 * std::f64::consts::PI / l0;
        let amp = (0.5 * omega_n * dl).sin();
        Ok(Self {
            repr: Arc::new(Repr::ArcsineExact {
                l0,
                dl,
                omega_n,
                amp,
            }),
        })
    }

    /// Tabulated motion from (t, L) samples, interpolated with a not-a-knot
    /// cubic spline. The table must bracket t = 0 (L0 is read off there) and
    /// the interpolant is checked subluminal on a dense scan.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        let t: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let l: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let spline = CubicSpline::new(&t, &l).map_err(|e| match e {
            CavityError::Input(m) => CavityError::InvalidTrajectory(m),
            other => other,
        })?;
        let (t0, t1) = spline.domain();
        if !(t0 <= 0.0 && t1 >= 0.0) {
            return Err(CavityError::InvalidTrajectory(format!(
                "sample window [{t0}, {t1}] must contain t = 0 (L0 is defined as L(0))"
            )));
        }
        let scan = 10_000;
        for i in 0..=scan {
            let ti = t0 + (t1 - t0) * i as f64 / scan as f64;
            let (pos, vel, _, _) = spline.eval_all(ti);
            if !(pos > 0.0) {
                return Err(CavityError::InvalidTrajectory(format!(
                    "interpolated L({ti}) = {pos} is not positive"
                )));
            }
            if vel.abs() >= 1.0 {
                return Err(CavityError::InvalidTrajectory(format!(
                    "superluminal interpolant: |L'({ti})| = {} >= 1",
                    vel.abs()
                )));
            }
        }
        let l0 = spline.value(0.0);
        Ok(Self {
            repr: Arc::new(Repr::Tabulated { spline, l0 }),
        })
    }

    /// Tabulated motion from a two-column text file: whitespace-separated
    /// (t, L) rows, '#' starts a comment, times in units with c = 1.
    pub fn tabulated_from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CavityError::Input(format!("{}: {e}", path.display())))?;
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.ok_or_else(|| {
                    CavityError::Input(format!(
                        "{}:{}: expected two columns (t, L)",
                        path.display(),
                        lineno + 1
                    ))
                })?
                .parse()
                .map_err(|e| {
                    CavityError::Input(format!("{}:{}: {e}", path.display(), lineno + 1))
                })
            };
            let t = parse(cols.next())?;
            let l = parse(cols.next())?;
            if cols.next().is_some() {
                return Err(CavityError::Input(format!(
                    "{}:{}: expected exactly two columns (t, L)",
                    path.display(),
                    lineno + 1
                )));
            }
            samples.push((t, l));
        }
        Self::tabulated(&samples)
    }

    /// Unperturbed cavity length L(0).
    pub fn l0(&self) -> f64 {
        match &*self.repr {
            Repr::Static { l0 }
            | Repr::Sinusoidal { l0, .. }
            | Repr::ArcsineExact { l0, .. }
            | Repr::Tabulated { l0, .. } => *l0,
        }
    }

    /// Position and first three derivatives at time `t`.
    pub fn state(&self, t: f64) -> MirrorState {
        match &*self.repr {
            Repr::Static { l0 } => MirrorState {
                position: *l0,
                ..Default::default()
            },
            Repr::Sinusoidal { l0, dl, omega } => {
                let (s, c) = (omega * t).sin_cos();
                MirrorState {
                    position: l0 + dl * s,
                    velocity: omega * dl * c,
                    acceleration: -omega * omega * dl * s,
                    jerk: -omega * omega * omega * dl * c,
                }
            }
            Repr::ArcsineExact {
                l0,
                dl,
                omega_n,
                amp,
                ..
            } => {
                let (s, c) = (omega_n * t).sin_cos();
                let a = *amp;
                let root = (1.0 - a * a * c * c).sqrt();
                let one_minus_a2 = 1.0 - a * a;
                MirrorState {
                    position: l0 + ((a * c).asin() - 0.5 * omega_n * dl) / omega_n,
                    velocity: -a * s / root,
                    acceleration: -a * one_minus_a2 * omega_n * c / root.powi(3),
                    jerk: a * one_minus_a2 * omega_n * omega_n * s * (1.0 + 2.0 * a * a * c * c)
                        / root.powi(5),
                }
            }
            Repr::Tabulated { spline, .. } => {
                let (position, velocity, acceleration, jerk) = spline.eval_all(t);
                MirrorState {
                    position,
                    velocity,
                    acceleration,
                    jerk,
                }
            }
        }
    }

    pub fn position(&self, t: f64) -> f64 {
        self.state(t).position
    }

    pub fn velocity(&self, t: f64) -> f64 {
        self.state(t).velocity
    }

    /// Time window on which the motion is defined; `None` means all of R.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match &*self.repr {
            Repr::Tabulated { spline, .. } => Some(spline.domain()),
            _ => None,
        }
    }

    /// Period of the mirror motion, when one exists.
    pub fn period(&self) -> Option<f64> {
        match &*self.repr {
            Repr::Static { .. } => None,
            Repr::Sinusoidal { omega, .. } => Some(2.0 * std::f64::consts::PI / omega),
            Repr::ArcsineExact { omega_n, .. } => Some(2.0 * std::f64::consts::PI / omega_n),
            Repr::Tabulated { .. } => None,
        }
    }

    /// A scan step fine enough to resolve the motion (used by return-point
    /// searches): at least 1024 points per period or per knot spacing.
    pub fn scan_step(&self) -> f64 {
        if let Some(p) = self.period() {
            return p / 1024.0;
        }
        match &*self.repr {
            Repr::Tabulated { spline, .. } => {
                let knots = spline.knots();
                let min_h = knots
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(f64::INFINITY, f64::min);
                min_h / 8.0
            }
            _ => self.l0() / 1024.0,
        }
    }

    /// Whether the worldline has analytic derivatives of all orders
    /// (tabulated splines are only C²; their third derivative is piecewise
    /// constant).
    pub fn is_smooth(&self) -> bool {
        !matches!(&*self.repr, Repr::Tabulated { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn static_mirror_examples() {
        let tr = MirrorTrajectory::fixed(1.0).unwrap();
        assert_eq!(tr.position(5.0), 1.0);
        assert_eq!(tr.velocity(5.0), 0.0);
        let tr = MirrorTrajectory::fixed(2.0).unwrap();
        assert_eq!(tr.position(-3.0), 2.0);
        assert!(MirrorTrajectory::fixed(0.0).is_err());
    }

    #[test]
    fn sinusoidal_examples() {
        let tr = MirrorTrajectory::sinusoidal(1.0, 0.1, PI).unwrap();
        assert_eq!(tr.position(0.0), 1.0);
        assert!((tr.velocity(0.0) - 0.1 * PI).abs() < 1e-15);
        let tr = MirrorTrajectory::sinusoidal(1.0, 0.1, 2.0 * PI).unwrap();
        assert!((tr.position(0.25) - 1.1).abs() < 1e-15);
        // omega*dL = 1.5 >= 1 rejected
        let err = MirrorTrajectory::sinusoidal(1.0, 0.5, 3.0).unwrap_err();
        assert!(err.to_string().contains("omega*dL"));
    }

    #[test]
    fn arcsine_family_return_structure() {
        let tr = MirrorTrajectory::arcsine_exact(1.0, 0.1, 2).unwrap();
        // L(0) = L0: the arcsine term cancels the constant offset exactly
        assert!((tr.position(0.0) - 1.0).abs() < 1e-15);
        // turning points where cos(omega_N t) = 1 have L' = 0 and L = L0
        let p = tr.period().unwrap();
        for k in 0..4 {
            let t = k as f64 * p;
            assert!(tr.velocity(t).abs() < 1e-12);
            assert!((tr.position(t) - 1.0).abs() < 1e-12);
        }
        // dense grid scan: excursion bounded by dL (oscillates in [L0-dL, L0])
        let mut max_dev: f64 = 0.0;
        for i in 0..20_000 {
            let t = -3.0 + 6.0 * i as f64 / 20_000.0;
            max_dev = max_dev.max((tr.position(t) - 1.0).abs());
        }
        assert!(max_dev <= 0.1 + 1e-12, "excursion {max_dev}");
        assert!(max_dev > 0.099, "should reach L0 - dL, got {max_dev}");
    }

    #[test]
    fn arcsine_rejects_branch_violations() {
        assert!(MirrorTrajectory::arcsine_exact(1.0, 0.6, 2).is_err());
        assert!(MirrorTrajectory::arcsine_exact(1.0, 0.1, 0).is_err());
    }

    /// Central differences of L agree with the analytic derivatives at 100
    /// random times. Steps grow with the derivative order: roundoff in an
    /// order-k difference scales like eps/h^k.
    #[test]
    fn derivative_consistency_all_families() {
        let families = vec![
            MirrorTrajectory::sinusoidal(1.0, 0.1, 2.0 * PI).unwrap(),
            MirrorTrajectory::arcsine_exact(1.0, 0.12, 2).unwrap(),
            MirrorTrajectory::fixed(1.5).unwrap(),
        ];
        let mut rng = StdRng::seed_from_u64(20260810);
        for tr in families {
            for _ in 0..100 {
                let t: f64 = rng.random_range(-2.0..2.0);
                let st = tr.state(t);
                let pos = |x: f64| tr.position(x);
                let v = diff::d1(pos, t, 1e-5);
                let a = diff::d2(pos, t, 1e-4);
                let j = diff::d3(pos, t, 5e-4);
                let scale_v = st.velocity.abs().max(1e-6);
                let scale_a = st.acceleration.abs().max(1e-5);
                let scale_j = st.jerk.abs().max(1e-3);
                assert!((v - st.velocity).abs() / scale_v < 1e-5, "v at {t}");
                assert!((a - st.acceleration).abs() / scale_a < 1e-5, "a at {t}");
                assert!((j - st.jerk).abs() / scale_j < 1e-3, "j at {t}");
            }
        }
    }

    #[test]
    fn subluminal_scan_over_one_period() {
        for tr in [
            MirrorTrajectory::sinusoidal(1.0, 0.3, 2.5).unwrap(),
            MirrorTrajectory::arcsine_exact(1.0, 0.3, 3).unwrap(),
        ] {
            let p = tr.period().unwrap();
            for i in 0..10_000 {
                let t = p * i as f64 / 10_000.0;
                assert!(tr.velocity(t).abs() < 1.0);
            }
        }
    }

    #[test]
    fn tabulated_matches_the_sinusoid_it_sampled() {
        let src = MirrorTrajectory::sinusoidal(1.0, 0.1, 2.0 * PI).unwrap();
        let samples: Vec<(f64, f64)> = (0..=400)
            .map(|i| {
                let t = -1.0 + 4.0 * i as f64 / 400.0;
                (t, src.position(t))
            })
            .collect();
        let tab = MirrorTrajectory::tabulated(&samples).unwrap();
        for i in 0..400 {
            // midpoints between knots
            let t = -1.0 + 4.0 * (i as f64 + 0.5) / 400.0;
            assert!(
                (tab.position(t) - src.position(t)).abs() < 1e-6,
                "deviation at t = {t}"
            );
        }
        assert!((tab.l0() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tabulated_rejects_degenerate_tables() {
        assert!(MirrorTrajectory::tabulated(&[(0.0, 1.0), (1.0, 1.0)]).is_err());
        // superluminal segment
        let bad = vec![(0.0, 1.0), (0.1, 1.5), (0.2, 1.0), (0.3, 1.2), (0.4, 1.0)];
        let err = MirrorTrajectory::tabulated(&bad).unwrap_err();
        assert!(err.to_string().contains("superluminal"));
    }

    #[test]
    fn constant_table_behaves_like_static() {
        let samples: Vec<(f64, f64)> = (0..8).map(|i| (i as f64 - 2.0, 1.0)).collect();
        let tab = MirrorTrajectory::tabulated(&samples).unwrap();
        let st = MirrorTrajectory::fixed(1.0).unwrap();
        for i in 0..50 {
            let t = -2.0 + 7.0 * i as f64 / 50.0;
            assert!((tab.position(t) - st.position(t)).abs() < 1e-12);
            assert!(tab.velocity(t).abs() < 1e-12);
        }
    }
}
