//! Single-collision reflection laws for a particle bouncing off a moving
//! target: the Galilean and relativistic one-dimensional reflection laws and
//! the photon energy change with its Döppler and Compton factors.
//!
//! These pin down the per-bounce Döppler factor (1 - u)/(1 + u) that the
//! billiard engine accumulates along optical paths.

use crate::error::{CavityError, Result};

/// A velocity strictly inside (-1, 1), in units with c = 1.
///
/// Validated once at construction so the reflection laws never re-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity(f64);

impl Velocity {
    pub fn new(v: f64) -> Result<Self> {
        if v.is_finite() && v.abs() < 1.0 {
            Ok(Self(v))
        } else {
            Err(CavityError::Domain(format!(
                "velocity {v} must lie strictly inside (-1, 1)"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Target mass, with an exact sentinel for the perfect-mirror limit so no
/// spurious Compton correction ever enters mirror-model tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetMass {
    Infinite,
    Finite(f64),
}

impl TargetMass {
    pub fn finite(m: f64) -> Result<Self> {
        if m.is_finite() && m > 0.0 {
            Ok(Self::Finite(m))
        } else {
            Err(CavityError::Domain(format!("target mass {m} must be > 0")))
        }
    }
}

/// A head-on collision of a particle with a moving target, bundling the
/// validated state the reflection laws operate on.
#[derive(Debug, Clone, Copy)]
pub struct Collision1D {
    pub v: Velocity,
    pub u: Velocity,
    pub u_prime: Velocity,
    pub mass: TargetMass,
    pub photon_energy: f64,
}

impl Collision1D {
    pub fn new(v: f64, u: f64, u_prime: f64, mass: TargetMass, photon_energy: f64) -> Result<Self> {
        if !(photon_energy > 0.0) {
            return Err(CavityError::Domain(format!(
                "photon energy {photon_energy} must be > 0"
            )));
        }
        Ok(Self {
            v: Velocity::new(v)?,
            u: Velocity::new(u)?,
            u_prime: Velocity::new(u_prime)?,
            mass,
            photon_energy,
        })
    }

    pub fn reflect_relativistic(&self) -> Velocity {
        reflect_relativistic(self.v, self.u, self.u_prime)
    }

    pub fn photon_energy_after(&self) -> f64 {
        photon_energy_after(self.photon_energy, self.u, self.mass)
            .expect("validated at construction")
    }
}

/// Galilean reflection law v + v' = u + u'. No domain restriction.
pub fn reflect_nonrelativistic(v: f64, u: f64, u_prime: f64) -> f64 {
    u + u_prime - v
}

/// Relativistic reflection law: equal sums of rapidities,
/// v' = tanh(artanh u + artanh u' - artanh v).
///
/// The result is clamped to the open interval when tanh saturates in double
/// precision (rapidity sums beyond ~19).
pub fn reflect_relativistic(v: Velocity, u: Velocity, u_prime: Velocity) -> Velocity {
    let rapidity = u.get().atanh() + u_prime.get().atanh() - v.get().atanh();
    let mut out = rapidity.tanh();
    if out >= 1.0 {
        out = 1.0 - f64::EPSILON;
    } else if out <= -1.0 {
        out = -1.0 + f64::EPSILON;
    }
    Velocity(out)
}

/// The Döppler factor (1 - u)/(1 + u) for a mirror moving with velocity `u`
/// (amplifying, > 1, when the mirror moves toward the photon, u < 0).
pub fn doppler_factor(u: Velocity) -> f64 {
    (1.0 - u.get()) / (1.0 + u.get())
}

/// Photon energy after a head-on collision with a target of mass `mass`
/// moving at `u`:
///
/// E' = E (1-u)/(1+u) [1 + (2E/M) sqrt((1-u)/(1+u))]^-1
///
/// with the Compton factor exactly 1 for an infinite target mass.
pub fn photon_energy_after(energy: f64, u: Velocity, mass: TargetMass) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(CavityError::Domain(format!(
            "photon energy {energy} must be > 0"
        )));
    }
    let d = doppler_factor(u);
    Ok(match mass {
        TargetMass::Infinite => energy * d,
        TargetMass::Finite(m) => energy * d / (1.0 + (2.0 * energy / m) * d.sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vel(v: f64) -> Velocity {
        Velocity::new(v).unwrap()
    }

    #[test]
    fn galilean_examples() {
        // elastic bounce off a static wall
        assert_eq!(reflect_nonrelativistic(1.0, 0.0, 0.0), -1.0);
        // heavy-target form v' = -v + 2u
        assert_eq!(reflect_nonrelativistic(-1.0, 0.5, 0.5), 2.0);
        assert!(reflect_nonrelativistic(0.3, 0.1, 0.2).abs() < 1e-15);
    }

    #[test]
    fn relativistic_static_target_reverses() {
        let v = reflect_relativistic(vel(0.5), vel(0.0), vel(0.0));
        assert!((v.get() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn relativistic_frozen_oracle_values() {
        // tanh(2 artanh 1/2 + artanh 1/2) = tanh(3/2 ln 3) = (27-1)/(27+1) = 13/14
        let v = reflect_relativistic(vel(-0.5), vel(0.5), vel(0.5));
        assert!((v.get() - 13.0 / 14.0).abs() < 1e-15, "got {}", v.get());
        // tanh(2 artanh 0.2) = 0.4/1.04 = 5/13
        let w = reflect_relativistic(vel(0.0), vel(0.2), vel(0.2));
        assert!((w.get() - 5.0 / 13.0).abs() < 1e-15, "got {}", w.get());
    }

    #[test]
    fn velocity_rejects_out_of_range() {
        assert!(Velocity::new(1.0).is_err());
        assert!(Velocity::new(-1.2).is_err());
        assert!(Velocity::new(f64::NAN).is_err());
    }

    #[test]
    fn collision_bundle_validates_once() {
        let c = Collision1D::new(-0.5, 0.5, 0.5, TargetMass::Infinite, 1.0).unwrap();
        assert!((c.reflect_relativistic().get() - 13.0 / 14.0).abs() < 1e-15);
        // receding target: Döppler factor (1 - 1/2)/(1 + 1/2) = 1/3
        assert!((c.photon_energy_after() - 1.0 / 3.0).abs() < 1e-15);
        assert!(Collision1D::new(1.0, 0.0, 0.0, TargetMass::Infinite, 1.0).is_err());
        assert!(Collision1D::new(0.0, 0.0, 0.0, TargetMass::Infinite, 0.0).is_err());
        assert!(TargetMass::finite(-2.0).is_err());
    }

    #[test]
    fn photon_energy_examples() {
        let e = photon_energy_after(1.0, vel(0.0), TargetMass::Infinite).unwrap();
        assert_eq!(e, 1.0);
        // Döppler factor (1+1/2)/(1-1/2) = 3 for an approaching mirror
        let e = photon_energy_after(1.0, vel(-0.5), TargetMass::Infinite).unwrap();
        assert!((e - 3.0).abs() < 1e-15);
        // finite mass: 1/(1 + 0.2) = 5/6
        let e = photon_energy_after(1.0, vel(0.0), TargetMass::finite(10.0).unwrap()).unwrap();
        assert!((e - 5.0 / 6.0).abs() < 1e-15);
        assert!(photon_energy_after(0.0, vel(0.0), TargetMass::Infinite).is_err());
    }

    proptest! {
        /// E'/E equals the Döppler factor exactly at infinite target mass.
        #[test]
        fn doppler_consistency(u in -0.99f64..0.99) {
            let u = vel(u);
            let ratio = photon_energy_after(2.5, u, TargetMass::Infinite).unwrap() / 2.5;
            prop_assert!((ratio - doppler_factor(u)).abs() <= 1e-15 * ratio.abs().max(1.0));
        }

        /// Energy monotonicity: approaching mirror amplifies, receding damps.
        #[test]
        fn energy_monotonicity(u in 1e-6f64..0.99) {
            let approaching = photon_energy_after(1.0, vel(-u), TargetMass::Infinite).unwrap();
            let receding = photon_energy_after(1.0, vel(u), TargetMass::Infinite).unwrap();
            prop_assert!(approaching > 1.0);
            prop_assert!(receding < 1.0);
        }

        /// The relativistic law reduces to the Galilean one to O(eps^3).
        #[test]
        fn galilean_limit(v in -1.0f64..1.0, u in -1.0f64..1.0, w in -1.0f64..1.0) {
            let eps = 1e-3;
            let (v, u, w) = (v * eps, u * eps, w * eps);
            let rel = reflect_relativistic(vel(v), vel(u), vel(w)).get();
            let gal = reflect_nonrelativistic(v, u, w);
            prop_assert!((rel - gal).abs() <= 10.0 * eps * eps * eps);
        }

        /// The reflected velocity stays strictly inside (-1, 1).
        #[test]
        fn reflection_stays_subluminal(v in -0.999f64..0.999, u in -0.999f64..0.999, w in -0.999f64..0.999) {
            let out = reflect_relativistic(vel(v), vel(u), vel(w)).get();
            prop_assert!(out.abs() < 1.0);
        }
    }
}
