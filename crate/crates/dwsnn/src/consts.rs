//! Fixed physical constants (CODATA 2018). Not user-configurable.

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permeability (T·m/A).
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Elementary charge (C).
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Bohr magneton (J/T).
pub const MU_B: f64 = 9.274_010_078_3e-24;

/// Gyromagnetic ratio 2·μ_B·μ0/ħ for fields expressed in A/m
/// (units: m·A⁻¹·s⁻¹).
pub const GAMMA: f64 = 2.0 * MU_B * MU0 / HBAR;

/// Thermal voltage k_B·T/q at 300 K (V).
pub const U_T_300K: f64 = 0.025_85;
