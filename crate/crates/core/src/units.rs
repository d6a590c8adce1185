//! Physical constants in the units used throughout the crate.

/// ħc in eV·nm; converts a photon energy in eV to a wavenumber in nm⁻¹.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;

/// ħc in J·m.
pub const HBAR_C_J_M: f64 = 3.161_526_77e-26;

/// ħ in eV·s, for converting angular frequencies in rad/s to eV.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Converts an angular frequency in rad/s to a photon energy in eV.
pub fn rad_per_s_to_ev(omega: f64) -> f64 {
    omega * HBAR_EV_S
}
