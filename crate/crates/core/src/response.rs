//! Quantum Hall admittance `Y = σ_H + iB` from the complex Berry phase.
//!
//! In natural units (`e = ħ = 1`, conductances in `e²/h`) the Hall
//! conductance is `γ^r` and the susceptance `γ^i`. A positive susceptance is
//! read as a capacitance `C = γ^i/ω`, a negative one as an inductance with
//! `B = −1/(ωL)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::integration::BerryPhase;
use crate::{Error, Result};

/// Conductance quantum `e²/h` in siemens.
pub const E2_OVER_H_SIEMENS: f64 = 3.874045865e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Character {
    Capacitive,
    Inductive,
    PurelyConductive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmittanceResult {
    pub gamma_r: f64,
    pub gamma_i: f64,
    pub sigma_h: f64,
    pub susceptance_b: f64,
    pub character: Character,
    pub capacitance: Option<f64>,
    pub inductance: Option<f64>,
    pub omega: f64,
    pub units: Units,
}

/// `C_γ = γ^i/ω` as a signed formula value (natural units).
pub fn capacitance_formula(gamma_i: f64, omega: f64) -> f64 {
    gamma_i / omega
}

/// `L_γ = 1/(ωγ^i)` as a signed formula value (natural units).
pub fn inductance_formula(gamma_i: f64, omega: f64) -> f64 {
    1.0 / (omega * gamma_i)
}

pub fn admittance(gamma: &BerryPhase, omega: f64) -> Result<AdmittanceResult> {
    admittance_in(gamma, omega, Units::Natural)
}

/// Admittance with the capacitance and inductance reported in either natural
/// units or SI (`σ, B` in siemens, `C` in farads, `L` in henries for `ω` in rad/s).
pub fn admittance_in(gamma: &BerryPhase, omega: f64, units: Units) -> Result<AdmittanceResult> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidParams(format!("omega must be positive and finite, got {omega}")));
    }
    let (gr, gi) = (gamma.gamma_r, gamma.gamma_i);
    let g0 = match units {
        Units::Natural => 1.0,
        Units::Si => E2_OVER_H_SIEMENS,
    };
    // e²/ħ = 2π·e²/h
    let q = match units {
        Units::Natural => 1.0,
        Units::Si => 2.0 * PI * E2_OVER_H_SIEMENS,
    };
    let character = if gi > 0.0 {
        Character::Capacitive
    } else if gi < 0.0 {
        Character::Inductive
    } else {
        Character::PurelyConductive
    };
    let capacitance = (gi > 0.0).then(|| q * capacitance_formula(gi, omega));
    let inductance = (gi < 0.0).then(|| inductance_formula(-gi, omega) / q);
    Ok(AdmittanceResult {
        gamma_r: gr,
        gamma_i: gi,
        sigma_h: g0 * gr,
        susceptance_b: g0 * gi,
        character,
        capacitance,
        inductance,
        omega,
        units,
    })
}
