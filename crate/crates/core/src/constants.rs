//! Physical constants (CODATA 2018 exact/recommended values) and unit helpers.

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Stefan–Boltzmann constant `π² k_B⁴ / (60 ħ³ c²)`, W·m⁻²·K⁻⁴.
pub fn stefan_boltzmann() -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    pi2 * K_B.powi(4) / (60.0 * HBAR.powi(3) * C * C)
}

/// Thermal wavelength `ħc/(k_B T)`, m.
pub fn thermal_wavelength(t: f64) -> f64 {
    HBAR * C / (K_B * t)
}

/// Converts a frequency given as `ω/c` in rad/µm to rad/s.
pub fn rad_per_um_to_rad_per_s(x: f64) -> f64 {
    x * C * 1e6
}

pub fn rad_per_s_to_rad_per_um(omega: f64) -> f64 {
    omega / (C * 1e6)
}

/// Converts a wavenumber in cm⁻¹ to angular frequency in rad/s.
pub fn wavenumber_to_rad_per_s(nu_cm: f64) -> f64 {
    2.0 * std::f64::consts::PI * C * 100.0 * nu_cm
}
