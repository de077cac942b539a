//! Current-density sweeps: wall trajectories, velocity extraction and
//! the mobility calibration consumed by the device model.

use crate::calibration::{param_fingerprint, MobilityCalibration};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

use super::grid::MagnetizationGrid;
use super::llg::{Drive, LlgSolver};
use super::params::{MaterialParams, StripGeometry};
use super::wall::{relax, seed_neel_wall, wall_position, Chirality, RelaxOptions};
use super::MicromagError;

/// Controls for one velocity sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    /// Integration timestep (s); None picks a quarter of the stability
    /// bound for the sweep grid.
    pub dt: Option<f64>,
    /// Per-run horizon (s).
    pub t_max: f64,
    /// Trajectory sampling interval in steps.
    pub record_every: usize,
    /// Wall start, as a fraction of the strip length.
    pub start_frac: f64,
    /// Runs stop when the wall passes this fraction (either side).
    pub exit_frac: f64,
    /// Fraction of each run discarded as transient before the fit.
    pub transient_frac: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            dt: None,
            t_max: 5e-9,
            record_every: 20,
            start_frac: 0.2,
            exit_frac: 0.85,
            transient_frac: 0.2,
        }
    }
}

/// One sampled wall trajectory.
#[derive(Clone, Debug)]
pub struct WallTrajectory<T> {
    pub j_density: T,
    /// (time s, wall position m) samples.
    pub samples: Vec<(T, T)>,
    /// True when the wall reached the strip edge before the horizon.
    pub truncated: bool,
}

/// Velocity extracted from one trajectory.
#[derive(Clone, Copy, Debug)]
pub struct VelocityPoint<T> {
    pub j_density: T,
    /// Signed steady-state velocity (m/s).
    pub velocity: T,
    pub truncated: bool,
}

/// Least-squares slope of y against x.
fn slope<T: Scalar>(points: &[(T, T)]) -> T {
    let n = T::of(points.len() as f64);
    let mut sx = T::zero();
    let mut sy = T::zero();
    for (x, y) in points {
        sx = sx + *x;
        sy = sy + *y;
    }
    let mx = sx / n;
    let my = sy / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (x, y) in points {
        let dx = *x - mx;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * (*y - my);
    }
    if sxx == T::zero() {
        T::zero()
    } else {
        sxy / sxx
    }
}

/// Run one wall under constant current density and sample (t, x).
pub fn run_trajectory<T: Scalar>(
    relaxed: &MagnetizationGrid<T>,
    p: &MaterialParams<T>,
    j_density: T,
    opts: &SweepOptions,
) -> Result<WallTrajectory<T>, MicromagError> {
    let mut grid = relaxed.clone();
    let mut solver = LlgSolver::new(*p, &grid)?;
    let dt = opts.dt.unwrap_or(0.25 * solver.stability_bound());
    let dt_t = T::of(dt);
    let steps = (opts.t_max / dt).ceil() as usize;
    let length = grid.length_x();
    let lo = T::of(1.0 - opts.exit_frac) * length;
    let hi = T::of(opts.exit_frac) * length;

    let mut samples = Vec::with_capacity(steps / opts.record_every + 2);
    samples.push((T::zero(), wall_position(&grid)?));
    let drive = Drive::current(j_density);
    let mut truncated = false;
    for s in 1..=steps {
        solver.step(&mut grid, drive, dt_t)?;
        if s % opts.record_every == 0 || s == steps {
            let t = T::of(s as f64) * dt_t;
            let x = wall_position(&grid)?;
            samples.push((t, x));
            if x < lo || x > hi {
                truncated = s < steps;
                break;
            }
        }
    }
    Ok(WallTrajectory {
        j_density,
        samples,
        truncated,
    })
}

/// Fit the post-transient window of a trajectory to a line; the slope
/// is the steady-state velocity.
pub fn fit_velocity<T: Scalar>(traj: &WallTrajectory<T>, transient_frac: f64) -> VelocityPoint<T> {
    let t_end = traj.samples.last().map(|s| s.0).unwrap_or(T::zero());
    let t_start = T::of(transient_frac) * t_end;
    let window: Vec<(T, T)> = traj
        .samples
        .iter()
        .copied()
        .filter(|(t, _)| *t >= t_start)
        .collect();
    let velocity = if window.len() >= 2 {
        slope(&window)
    } else {
        T::zero()
    };
    VelocityPoint {
        j_density: traj.j_density,
        velocity,
        truncated: traj.truncated,
    }
}

/// Prepare the relaxed wall state shared by all runs of a sweep.
pub fn relaxed_wall<T: Scalar>(
    p: &MaterialParams<T>,
    geom: &StripGeometry<T>,
    start_frac: f64,
) -> Result<MagnetizationGrid<T>, MicromagError> {
    p.validate()?;
    geom.validate()?;
    let mut grid = MagnetizationGrid::from_geometry(geom, p.t_fm, Vec3::unit_z());
    let start = T::of(start_frac) * grid.length_x();
    seed_neel_wall(&mut grid, p, start, Chirality::LeftHanded)?;
    relax(&mut grid, p, &RelaxOptions::default())?;
    Ok(grid)
}

/// Wall velocity for each current density, with trajectories.
pub fn velocity_curve<T: Scalar>(
    p: &MaterialParams<T>,
    geom: &StripGeometry<T>,
    j_values: &[T],
    opts: &SweepOptions,
) -> Result<(Vec<VelocityPoint<T>>, Vec<WallTrajectory<T>>), MicromagError> {
    let relaxed = relaxed_wall(p, geom, opts.start_frac)?;
    let mut points = Vec::with_capacity(j_values.len());
    let mut trajectories = Vec::with_capacity(j_values.len());
    for &j in j_values {
        if j == T::zero() {
            points.push(VelocityPoint {
                j_density: j,
                velocity: T::zero(),
                truncated: false,
            });
            trajectories.push(WallTrajectory {
                j_density: j,
                samples: vec![(T::zero(), wall_position(&relaxed)?)],
                truncated: false,
            });
            continue;
        }
        let traj = run_trajectory(&relaxed, p, j, opts)?;
        points.push(fit_velocity(&traj, opts.transient_frac));
        trajectories.push(traj);
    }
    Ok((points, trajectories))
}

/// Canonical parameter string hashed into calibration records.
pub fn canonical_params<T: Scalar>(p: &MaterialParams<T>, geom: &StripGeometry<T>) -> String {
    format!(
        "ms={:e};a_ex={:e};ku={:e};d={:e};alpha={:e};theta={:e};t_fm={:e};t_hm={:e};\
         length={:e};width={:e};cell_x={:e};cell_y={:e}",
        p.ms.as_f64(),
        p.a_ex.as_f64(),
        p.ku.as_f64(),
        p.d_dmi.as_f64(),
        p.alpha.as_f64(),
        p.theta_sh.as_f64(),
        p.t_fm.as_f64(),
        p.t_hm.as_f64(),
        geom.length.as_f64(),
        geom.width.as_f64(),
        geom.cell_x.as_f64(),
        geom.cell_y.as_f64(),
    )
}

/// Fit mobility and saturation velocity from a completed sweep.
///
/// Points whose |v|/|J| ratio stays within 15% of the lowest-|J| ratio
/// form the linear regime (≥ 3 required); its through-origin slope is
/// the mobility. The plateau is every point within 10% of the top
/// speed; its mean is v_sat.
pub fn calibrate_mobility<T: Scalar>(
    points: &[VelocityPoint<T>],
    p: &MaterialParams<T>,
    geom: &StripGeometry<T>,
) -> Result<MobilityCalibration<T>, MicromagError> {
    let mut nonzero: Vec<(T, T)> = points
        .iter()
        .filter(|pt| pt.j_density != T::zero())
        .map(|pt| (pt.j_density, pt.velocity))
        .collect();
    nonzero.sort_by(|a, b| {
        a.0.abs()
            .partial_cmp(&b.0.abs())
            .expect("finite current densities")
    });
    if nonzero.len() < 3 {
        return Err(MicromagError::CalibrationInsufficient {
            linear_points: nonzero.len(),
        });
    }

    let r_ref = (nonzero[0].1 / nonzero[0].0).abs();
    let linear: Vec<(T, T)> = nonzero
        .iter()
        .copied()
        .filter(|(j, v)| ((*v / *j).abs() - r_ref).abs() <= T::of(0.15) * r_ref)
        .collect();
    if linear.len() < 3 {
        return Err(MicromagError::CalibrationInsufficient {
            linear_points: linear.len(),
        });
    }

    // Through-origin least squares: μ = Σ J·v / Σ J².
    let mut sjv = T::zero();
    let mut sjj = T::zero();
    for (j, v) in &linear {
        sjv = sjv + *j * *v;
        sjj = sjj + *j * *j;
    }
    let mu_dw = sjv / sjj;

    let v_max = nonzero
        .iter()
        .map(|(_, v)| v.abs())
        .fold(T::zero(), T::max);
    let plateau: Vec<T> = nonzero
        .iter()
        .map(|(_, v)| v.abs())
        .filter(|v| *v >= T::of(0.9) * v_max)
        .collect();
    let v_sat = plateau.iter().copied().sum::<T>() / T::of(plateau.len() as f64);

    Ok(MobilityCalibration {
        mu_dw,
        v_sat,
        cross_section: geom.hm_cross_section(p),
        param_hash: param_fingerprint(&canonical_params(p, geom)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_current_gives_zero_velocity() {
        let p = MaterialParams::<f64>::default();
        let geom = StripGeometry::sweep_default();
        let (points, _) =
            velocity_curve(&p, &geom, &[0.0], &SweepOptions::default()).unwrap();
        assert_eq!(points[0].velocity, 0.0);
    }

    #[test]
    fn calibration_needs_three_linear_points() {
        let p = MaterialParams::<f64>::default();
        let geom = StripGeometry::sweep_default();
        let points = vec![
            VelocityPoint {
                j_density: 1e11,
                velocity: 36.0,
                truncated: false,
            },
            VelocityPoint {
                j_density: 2e11,
                velocity: 72.0,
                truncated: false,
            },
        ];
        assert!(matches!(
            calibrate_mobility(&points, &p, &geom),
            Err(MicromagError::CalibrationInsufficient { .. })
        ));
    }

    #[test]
    fn calibration_on_synthetic_saturating_curve() {
        let p = MaterialParams::<f64>::default();
        let geom = StripGeometry::sweep_default();
        // v = min(3.6e-10·J, 450) synthetic curve.
        let points: Vec<VelocityPoint<f64>> = [1e11, 2e11, 4e11, 1e12, 3e12, 6e12, 9e12]
            .iter()
            .map(|&j| VelocityPoint {
                j_density: j,
                velocity: (3.6e-10 * j as f64).min(450.0),
                truncated: false,
            })
            .collect();
        let cal = calibrate_mobility(&points, &p, &geom).unwrap();
        assert!((cal.mu_dw - 3.6e-10).abs() / 3.6e-10 < 1e-12);
        assert!((cal.v_sat - 450.0).abs() < 1.0);
        assert!((cal.cross_section - 60e-18).abs() < 1e-24);
        assert!(cal.mu_dw > 0.0);
    }
}
