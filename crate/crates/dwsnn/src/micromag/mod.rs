//! Finite-difference LLG solver with interfacial DMI and spin-Hall
//! torque, plus the wall-mobility calibration pipeline.

mod field;
mod grid;
mod llg;
mod params;
mod sweep;
mod wall;

pub use field::{dmi_boundary, effective_field, ghost_cell, FieldCoeffs, GhostLayers};
pub use grid::MagnetizationGrid;
pub use llg::{llg_step, spin_hall_field, stability_bound, Drive, LlgSolver, NORM_TOL};
pub use params::{MaterialParams, StripGeometry};
pub use sweep::{
    calibrate_mobility, canonical_params, fit_velocity, relaxed_wall, run_trajectory,
    velocity_curve, SweepOptions, VelocityPoint, WallTrajectory,
};
pub use wall::{
    core_in_plane, fit_wall_width, relax, seed_neel_wall, wall_position,
    wall_position_zero_crossing, Chirality, RelaxOptions, RelaxReport,
};

#[derive(Debug, thiserror::Error)]
pub enum MicromagError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: &'static str,
    },
    #[error("non-finite effective field at cell {cell}")]
    NonFiniteField { cell: usize },
    #[error("magnetization diverged (non-finite) at cell {cell}")]
    NonFiniteMagnetization { cell: usize },
    #[error("unit-norm drift beyond tolerance at cell {cell}")]
    NormDrift { cell: usize },
    #[error("timestep {dt:e} s exceeds stability bound {bound:e} s")]
    TimestepTooLarge { dt: f64, bound: f64 },
    #[error(
        "relaxation did not converge after {steps} steps: torque {torque:e} A/m, tolerance {tol:e} A/m"
    )]
    NoConvergence { torque: f64, tol: f64, steps: usize },
    #[error("wall position {position:e} m outside the strip [0, {length:e}] m")]
    PositionOutOfRange { position: f64, length: f64 },
    #[error("grid holds more than one wall ({sign_changes} sign changes)")]
    AmbiguousWallState { sign_changes: usize },
    #[error("calibration needs at least 3 linear-regime points, found {linear_points}")]
    CalibrationInsufficient { linear_points: usize },
}
