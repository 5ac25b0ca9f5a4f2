//! The oracle-vs-engine cross-check suite behind the CLI `verify`
//! subcommand: every closed form is compared against the generic numerical
//! engine at its stated tolerance and the worst residual is reported per
//! check.

use std::f64::consts::PI;

use crate::billiard::BilliardMap;
use crate::error::Result;
use crate::field_classical::{ExtendedProfile, InitialProfile, PeakHints};
use crate::field_quantum::{static_vacuum_density, QuantumProfile};
use crate::oracles::{ArcsineClosedForms, SinusoidalClosedForms};
use crate::resonance;
use crate::trajectory::MirrorTrajectory;

/// Outcome of one named cross-check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    /// Worst relative (or stated-scale) residual observed.
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn check(name: &str, residual: f64, tolerance: f64) -> Check {
    Check {
        name: name.to_string(),
        residual,
        tolerance,
        passed: residual.is_finite() && residual <= tolerance,
    }
}

/// Run the full suite. `inject_error` perturbs the engine side of every
/// comparison by the given relative amount; it exists so the harness can
/// prove it would notice a regression (pass 0 for a real run).
pub fn run_all(inject_error: f64) -> Result<Vec<Check>> {
    let bend = 1.0 + inject_error;
    let mut checks = Vec::new();

    // exact billiard function of the arcsine family vs the root-solved one
    {
        let forms = ArcsineClosedForms::new(1.0, 0.1, 2);
        let map = BilliardMap::new(MirrorTrajectory::arcsine_exact(1.0, 0.1, 2).unwrap());
        let mut worst: f64 = 0.0;
        for i in 0..300 {
            let tau = -1.0 + 6.0 * i as f64 / 300.0;
            let num = map.f_eval(tau)? * bend;
            worst = worst.max((num - forms.billiard(tau)).abs());
        }
        checks.push(check("billiard function vs exact closed form", worst, 1e-9));

        let mut worst_inv: f64 = 0.0;
        for i in 0..120 {
            let tau = -1.0 + 4.0 * i as f64 / 120.0;
            let num = map.f_inverse(tau)? * bend;
            worst_inv = worst_inv.max((num - forms.billiard_inverse(tau)).abs());
        }
        checks.push(check(
            "inverse billiard function vs exact closed form",
            worst_inv,
            1e-9,
        ));

        // d(iterates)/dtau by finite differences vs the exact D_n
        let mut worst_d: f64 = 0.0;
        for (tau, n) in [(0.31, 3usize), (-0.62, 7), (0.84, 12)] {
            let h = 1e-6;
            let iter_n = |x: f64| {
                let mut y = x;
                for _ in 0..n {
                    y = forms.billiard_inverse(y);
                }
                y
            };
            let deriv = (iter_n(tau + h) - iter_n(tau - h)) / (2.0 * h);
            let d_fd = 1.0 / deriv;
            let d_exact = forms.doppler(tau, n) * bend;
            worst_d = worst_d.max((d_fd - d_exact).abs() / d_exact.abs());
        }
        checks.push(check(
            "exact Döppler factor vs orbit derivative",
            worst_d,
            1e-5,
        ));
    }

    // cumulative Döppler factors on the amplified lattice vs closed form
    {
        let mut worst: f64 = 0.0;
        for order in [1u32, 2] {
            let dl = 0.01;
            let forms = SinusoidalClosedForms::resonant(1.0, dl, order);
            let map =
                BilliardMap::new(MirrorTrajectory::sinusoidal_resonant(1.0, dl, order).unwrap());
            let (plus, _) = forms.starting_points();
            let seq = map.iterate_bounces(plus[0], 50)?;
            for n in 1..=50 {
                let exact = forms.doppler(1.0, n)?;
                let got = seq.doppler(n) * bend;
                worst = worst.max((got - exact).abs() / exact);
            }
        }
        checks.push(check(
            "resonant cumulative Döppler factors vs closed form",
            worst,
            1e-8,
        ));
    }

    // detuned growth exponents vs the band closed form
    {
        let mut worst: f64 = 0.0;
        for r in [0.0, 0.003, 0.006, 0.009] {
            let omega = PI / (1.0 - r);
            let point = resonance::scan_band_point(1.0, 0.01, omega)?;
            let forms = SinusoidalClosedForms::detuned(1.0, 0.01, 1, omega - PI);
            let q = forms.band_parameter()?;
            let exact = ((1.0 + q) / (1.0 - q)).ln();
            worst = worst.max((point.growth_exponent * bend - exact).abs() / exact.max(1e-30));
        }
        checks.push(check(
            "detuned growth exponents vs band closed form",
            worst,
            1e-6,
        ));
    }

    // anomaly sum route vs closed form at positive starting points
    {
        let mut worst: f64 = 0.0;
        for order in [1u32, 2] {
            let dl = 0.01;
            let forms = SinusoidalClosedForms::resonant(1.0, dl, order);
            let traj = MirrorTrajectory::sinusoidal_resonant(1.0, dl, order).unwrap();
            let prof = QuantumProfile::new(BilliardMap::new(traj))?;
            let (plus, _) = forms.starting_points();
            let acc = prof.anomaly_accumulate(plus[0], 30)?;
            for n in 1..=30 {
                let exact = forms.anomaly(n)?;
                worst = worst.max((acc.anomaly(n) * bend - exact).abs() / exact.abs());
            }
        }
        checks.push(check(
            "cumulative anomaly vs resonant closed form",
            worst,
            1e-5,
        ));
    }

    // arcsine-family Döppler, anomaly and density vs the engine
    {
        let forms = ArcsineClosedForms::new(1.0, 0.1, 2);
        let traj = MirrorTrajectory::arcsine_exact(1.0, 0.1, 2).unwrap();
        let map = BilliardMap::new(traj.clone());
        let prof = QuantumProfile::new(map.clone())?;
        let mut worst_d: f64 = 0.0;
        let mut worst_a: f64 = 0.0;
        for i in 0..8 {
            let tau = -1.0 + 2.0 * (i as f64 + 0.37) / 8.0;
            let acc = prof.anomaly_accumulate(tau, 20)?;
            for n in [1usize, 5, 20] {
                let d_exact = forms.doppler(tau, n);
                let a_exact = forms.anomaly(tau, n);
                worst_d = worst_d.max((acc.doppler(n) * bend - d_exact).abs() / d_exact);
                worst_a =
                    worst_a.max((acc.anomaly(n) * bend - a_exact).abs() / a_exact.abs().max(1e-9));
            }
        }
        checks.push(check(
            "exactly solvable family: cumulative Döppler vs engine",
            worst_d,
            1e-6,
        ));
        checks.push(check(
            "exactly solvable family: cumulative anomaly vs engine",
            worst_a,
            1e-6,
        ));

        let mut worst_rho: f64 = 0.0;
        for i in 0..100 {
            let tau = -0.97 + 14.0 * i as f64 / 100.0;
            let n = forms.sheet(tau)?;
            let exact = forms.quantum_rho(tau, n);
            let got = prof.rho_at(tau)? * bend;
            worst_rho = worst_rho.max((got - exact).abs() / exact.abs().max(1e-10));
        }
        checks.push(check(
            "exactly solvable family: quantum density vs engine",
            worst_rho,
            1e-6,
        ));
    }

    // periodic starting points vs the engine scan
    {
        let mut worst: f64 = 0.0;
        for order in [1u32, 2] {
            let forms = SinusoidalClosedForms::resonant(1.0, 0.01, order);
            let map =
                BilliardMap::new(MirrorTrajectory::sinusoidal_resonant(1.0, 0.01, order).unwrap());
            let scan = resonance::find_periodic_trajectories(&map)?;
            let (mut plus, mut minus): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
            for t in scan.trajectories() {
                match t.sign {
                    resonance::TrajectorySign::Positive => plus.push(t.tau0),
                    resonance::TrajectorySign::Negative => minus.push(t.tau0),
                    resonance::TrajectorySign::Marginal => {}
                }
            }
            plus.sort_by(f64::total_cmp);
            minus.sort_by(f64::total_cmp);
            let (p_exact, m_exact) = forms.starting_points();
            if plus.len() != p_exact.len() || minus.len() != m_exact.len() {
                worst = f64::INFINITY;
                continue;
            }
            for (a, b) in plus.iter().zip(&p_exact).chain(minus.iter().zip(&m_exact)) {
                worst = worst.max((a * bend - b).abs());
            }
        }
        checks.push(check(
            "periodic starting points vs lattice closed form",
            worst,
            1e-9,
        ));
    }

    // static vacuum exactness
    {
        let prof = QuantumProfile::new(BilliardMap::new(MirrorTrajectory::fixed(1.0).unwrap()))?;
        let mut worst: f64 = 0.0;
        for tau in [-1.0, 0.0, 1.5, 6.0] {
            worst = worst.max((prof.rho_at(tau)? * bend - static_vacuum_density(1.0)).abs());
        }
        let e = prof.total_energy_recursive(1.0, 3)? * bend;
        worst = worst.max((e + PI / 24.0).abs());
        checks.push(check("static Casimir vacuum exactness", worst, 1e-12));
    }

    // classical and quantum route equivalence at bounce midpoints
    {
        let traj = MirrorTrajectory::sinusoidal_resonant(1.0, 0.01, 2).unwrap();
        let forms = SinusoidalClosedForms::resonant(1.0, 0.01, 2);
        let (anchors, _) = forms.starting_points();
        let hints = PeakHints {
            anchors: anchors.clone(),
            period: 2.0,
        };
        let classical = ExtendedProfile::new(
            BilliardMap::new(traj.clone()),
            InitialProfile::uniform(1.0, 1.0)?,
        )?
        .with_peak_hints(hints.clone());
        let quantum = QuantumProfile::new(BilliardMap::new(traj))?.with_peak_hints(hints);
        let mut worst: f64 = 0.0;
        for n in [2usize, 6, 10] {
            let seq = classical.map().iterate_bounces(1.0, n)?;
            let direct = classical.total_energy(seq.retarded()[n - 1])?;
            let rec = classical.total_energy_recursive(1.0, n)? * bend;
            worst = worst.max((direct - rec).abs() / direct.abs());
            let q_rec = quantum.total_energy_recursive(1.0, n)? * bend;
            let q_dir = quantum.total_energy_direct(1.0, n)?;
            worst = worst.max((q_rec - q_dir).abs() / q_dir.abs());
        }
        checks.push(check(
            "energy route equivalence (classical and quantum)",
            worst,
            1e-6,
        ));
    }

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_build_passes_all_checks() {
        let checks = run_all(0.0).unwrap();
        assert!(!checks.is_empty());
        for c in &checks {
            assert!(
                c.passed,
                "{}: residual {:.3e} > tolerance {:.3e}",
                c.name, c.residual, c.tolerance
            );
        }
    }

    #[test]
    fn injected_error_is_flagged() {
        let checks = run_all(1e-2).unwrap();
        assert!(
            checks.iter().any(|c| !c.passed),
            "a forced 1e-2 perturbation must trip at least one check"
        );
    }
}
