//! Closed-form action variables of the bound Kepler problem.
//!
//! Separating the Hamilton-Jacobi equation in spherical coordinates gives a
//! rotation in the azimuth and librations in `theta` and `r`:
//!
//! ```text
//! J_azimuth = 2 pi P_azimuth
//! J_theta   = 2 pi (P_theta - |P_azimuth|)
//! J_r       = -2 pi P_theta + pi alpha sqrt(-2m/E)
//! E         = -2 pi^2 alpha^2 m / (J_r + J_theta + J_azimuth)^2
//! ```
//!
//! Quantizing the librations as `2 pi hbar (n + 1/2)` and the rotation as
//! `2 pi hbar n` reproduces `E = -alpha^2 m / (2 hbar^2 (n_r + l + 1)^2)`.
//! The numeric cross-checks integrate the `theta` and `r` integrands by
//! quadrature.

use std::f64::consts::PI;

use crate::action::total_action;
use crate::error::{Error, Result};
use crate::potential::{PotentialSpec, UnitSystem};
use crate::quadrature::integrate_adaptive;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoulombParams {
    alpha: f64,
    mass: f64,
    hbar: f64,
}

impl CoulombParams {
    pub fn new(alpha: f64, mass: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("mass", mass), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { alpha, mass, hbar })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn units(&self) -> UnitSystem {
        UnitSystem::new(self.hbar, self.mass).expect("validated on construction")
    }
}

impl Default for CoulombParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

/// Separation constants. `p_azimuth` is the conserved azimuthal momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparationConstants {
    p_theta: f64,
    p_azimuth: f64,
    energy: f64,
}

impl SeparationConstants {
    pub fn new(p_theta: f64, p_azimuth: f64, energy: f64) -> Result<Self> {
        if !(p_theta.is_finite() && p_azimuth.is_finite() && p_theta >= p_azimuth.abs()) {
            return Err(Error::Separation {
                p_theta,
                p_phi: p_azimuth,
            });
        }
        if !(energy.is_finite() && energy < 0.0) {
            return Err(Error::InvalidParameter(format!("bound motion needs E < 0, got {energy}")));
        }
        Ok(Self {
            p_theta,
            p_azimuth,
            energy,
        })
    }

    pub fn p_theta(&self) -> f64 {
        self.p_theta
    }

    pub fn p_azimuth(&self) -> f64 {
        self.p_azimuth
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionTriple {
    pub j_r: f64,
    pub j_theta: f64,
    pub j_azimuth: f64,
}

impl ActionTriple {
    pub fn sum(&self) -> f64 {
        self.j_r + self.j_theta + self.j_azimuth.abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuantumNumbers {
    pub n_r: u32,
    pub n_theta: u32,
    pub n_azimuth: u32,
}

impl QuantumNumbers {
    pub fn new(n_r: u32, n_theta: u32, n_azimuth: u32) -> Self {
        Self {
            n_r,
            n_theta,
            n_azimuth,
        }
    }

    pub fn l(&self) -> u32 {
        self.n_theta + self.n_azimuth
    }

    /// Principal quantum number `n_r + l + 1`.
    pub fn n(&self) -> u32 {
        self.n_r + self.l() + 1
    }
}

/// `(J_azimuth, J_theta)`.
pub fn angular_actions(sc: &SeparationConstants) -> (f64, f64) {
    (2.0 * PI * sc.p_azimuth, 2.0 * PI * (sc.p_theta - sc.p_azimuth.abs()))
}

pub fn radial_action_closed(cp: &CoulombParams, sc: &SeparationConstants) -> Result<f64> {
    let j_r = -2.0 * PI * sc.p_theta + PI * cp.alpha * (-2.0 * cp.mass / sc.energy).sqrt();
    let scale = 1e-12 * (2.0 * PI * sc.p_theta).max(1.0);
    if j_r < -scale {
        return Err(Error::NoRadialLibration { j_r });
    }
    Ok(j_r.max(0.0))
}

pub fn energy_from_actions(cp: &CoulombParams, j: &ActionTriple) -> Result<f64> {
    let sum = j.sum();
    if !(sum.is_finite() && sum > 0.0) {
        return Err(Error::InvalidParameter(format!("action sum must be positive, got {sum}")));
    }
    Ok(-2.0 * PI * PI * cp.alpha * cp.alpha * cp.mass / (sum * sum))
}

/// Quantized actions: librations `2 pi hbar (n + 1/2)`, rotation `2 pi hbar n`.
pub fn quantized_actions(cp: &CoulombParams, qn: &QuantumNumbers) -> ActionTriple {
    let tau = 2.0 * PI * cp.hbar;
    ActionTriple {
        j_r: tau * (qn.n_r as f64 + 0.5),
        j_theta: tau * (qn.n_theta as f64 + 0.5),
        j_azimuth: tau * qn.n_azimuth as f64,
    }
}

/// Energy by inserting the quantized actions into `E(J)`.
pub fn coulomb_spectrum(cp: &CoulombParams, qn: &QuantumNumbers) -> f64 {
    energy_from_actions(cp, &quantized_actions(cp, qn)).expect("quantized action sum is positive")
}

/// `-alpha^2 m / (2 (n_r + l + 1)^2 hbar^2)`.
pub fn coulomb_closed_form(cp: &CoulombParams, qn: &QuantumNumbers) -> f64 {
    let n = qn.n() as f64;
    -cp.alpha * cp.alpha * cp.mass / (2.0 * n * n * cp.hbar * cp.hbar)
}

/// `P_theta = hbar (l + 1/2)`, the value fixed by the quantized angular
/// actions.
pub fn semiclassical_p_theta(cp: &CoulombParams, l: u32) -> f64 {
    cp.hbar * (l as f64 + 0.5)
}

/// Radial effective potential with the semiclassical centrifugal constant.
pub fn semiclassical_radial_spec(cp: &CoulombParams, l: u32) -> PotentialSpec {
    PotentialSpec::coulomb(cp.alpha, semiclassical_p_theta(cp, l)).expect("validated parameters")
}

/// Radial effective potential with the quantum centrifugal term
/// `hbar^2 l (l + 1) / (2 m r^2)`.
pub fn quantum_radial_spec(cp: &CoulombParams, l: u32) -> PotentialSpec {
    let l = l as f64;
    PotentialSpec::coulomb(cp.alpha, cp.hbar * (l * (l + 1.0)).sqrt()).expect("validated parameters")
}

/// `2 int sqrt(P_theta^2 - P_az^2 / sin^2 theta) dtheta` between the polar
/// turning points.
pub fn polar_action_quadrature(sc: &SeparationConstants, tol: f64) -> Result<f64> {
    let (pt, pa) = (sc.p_theta, sc.p_azimuth.abs());
    if pt == 0.0 {
        return Ok(0.0);
    }
    let theta_1 = (pa / pt).asin();
    let theta_2 = PI - theta_1;
    let integrand = |theta: f64| {
        let s = theta.sin();
        let arg = pt * pt - pa * pa / (s * s);
        arg.max(0.0).sqrt()
    };
    Ok(2.0 * integrate_adaptive(integrand, theta_1, theta_2, 0.5 * tol)?.value)
}

/// Radial libration action by quadrature over the radial cut.
pub fn radial_action_quadrature(cp: &CoulombParams, sc: &SeparationConstants, tol: f64) -> Result<f64> {
    let spec = PotentialSpec::coulomb(cp.alpha, sc.p_theta)?;
    Ok(total_action(&spec, &cp.units(), sc.energy, tol)?.full_period)
}
