//! Material and geometry parameters for the ferromagnet/heavy-metal strip.

use crate::consts;
use crate::scalar::Scalar;

use super::MicromagError;

/// Magnetic material constants of the FM/HM stack.
///
/// Defaults are the Pt/CoFe/MgO values used for calibration.
#[derive(Clone, Copy, Debug)]
pub struct MaterialParams<T> {
    /// Saturation magnetization (A/m).
    pub ms: T,
    /// Exchange correlation constant (J/m).
    pub a_ex: T,
    /// Uniaxial perpendicular anisotropy constant (J/m³).
    pub ku: T,
    /// Effective interfacial DMI constant (J/m²). Negative selects
    /// left-handed Néel walls.
    pub d_dmi: T,
    /// Gilbert damping (dimensionless).
    pub alpha: T,
    /// Spin-Hall angle of the heavy metal (dimensionless).
    pub theta_sh: T,
    /// Ferromagnet thickness (m).
    pub t_fm: T,
    /// Heavy-metal thickness (m).
    pub t_hm: T,
}

impl<T: Scalar> Default for MaterialParams<T> {
    fn default() -> Self {
        Self {
            ms: T::of(700e3),
            a_ex: T::of(1e-11),
            ku: T::of(4.8e5),
            d_dmi: T::of(-1.2e-3),
            alpha: T::of(0.3),
            theta_sh: T::of(0.07),
            t_fm: T::of(0.6e-9),
            t_hm: T::of(3e-9),
        }
    }
}

impl<T: Scalar> MaterialParams<T> {
    pub fn validate(&self) -> Result<(), MicromagError> {
        let positive = [
            ("ms", self.ms),
            ("a_ex", self.a_ex),
            ("ku", self.ku),
            ("t_fm", self.t_fm),
            ("t_hm", self.t_hm),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(MicromagError::InvalidParam {
                    name,
                    reason: "must be finite and > 0",
                });
            }
        }
        if !(self.alpha > T::zero() && self.alpha <= T::one()) {
            return Err(MicromagError::InvalidParam {
                name: "alpha",
                reason: "must lie in (0, 1]",
            });
        }
        if self.theta_sh.abs() > T::one() {
            return Err(MicromagError::InvalidParam {
                name: "theta_sh",
                reason: "|theta_sh| must be <= 1",
            });
        }
        if !self.d_dmi.is_finite() {
            return Err(MicromagError::InvalidParam {
                name: "d_dmi",
                reason: "must be finite",
            });
        }
        Ok(())
    }

    /// Effective easy-axis constant with the thin-film demagnetization
    /// correction folded in: K_eff = Ku − ½μ0·Ms².
    pub fn k_eff(&self) -> T {
        let half_mu0 = T::of(0.5 * consts::MU0);
        self.ku - half_mu0 * self.ms * self.ms
    }

    /// Bloch wall-width parameter Δ = sqrt(A / K_eff) (m).
    pub fn wall_width(&self) -> T {
        (self.a_ex / self.k_eff()).sqrt()
    }
}

/// Strip geometry and its finite-difference discretization.
#[derive(Clone, Copy, Debug)]
pub struct StripGeometry<T> {
    /// FM length along x (m).
    pub length: T,
    /// FM width along y (m).
    pub width: T,
    /// Cell size along x (m).
    pub cell_x: T,
    /// Cell size along y (m).
    pub cell_y: T,
}

impl<T: Scalar> Default for StripGeometry<T> {
    fn default() -> Self {
        Self {
            length: T::of(120e-9),
            width: T::of(20e-9),
            cell_x: T::of(4e-9),
            cell_y: T::of(1e-9),
        }
    }
}

impl<T: Scalar> StripGeometry<T> {
    /// Wider strip used for velocity sweeps: long enough that a wall
    /// reaches steady state well before the exit margin.
    pub fn sweep_default() -> Self {
        Self {
            length: T::of(480e-9),
            width: T::of(20e-9),
            cell_x: T::of(4e-9),
            cell_y: T::of(4e-9),
        }
    }

    pub fn nx(&self) -> usize {
        (self.length / self.cell_x).round().as_f64() as usize
    }

    pub fn ny(&self) -> usize {
        (self.width / self.cell_y).round().as_f64() as usize
    }

    pub fn validate(&self) -> Result<(), MicromagError> {
        for (name, v) in [
            ("length", self.length),
            ("width", self.width),
            ("cell_x", self.cell_x),
            ("cell_y", self.cell_y),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(MicromagError::InvalidParam {
                    name,
                    reason: "must be finite and > 0",
                });
            }
        }
        // Cell counts must tile the strip exactly.
        for (name, len, cell) in [
            ("length", self.length, self.cell_x),
            ("width", self.width, self.cell_y),
        ] {
            let n = (len / cell).round();
            if (n * cell - len).abs() > T::of(1e-15) {
                return Err(MicromagError::InvalidParam {
                    name,
                    reason: "must be an integer multiple of the cell size",
                });
            }
        }
        Ok(())
    }

    /// Heavy-metal conduction cross-section (m²) used to map device
    /// current to charge current density.
    pub fn hm_cross_section(&self, material: &MaterialParams<T>) -> T {
        self.width * material.t_hm
    }
}
