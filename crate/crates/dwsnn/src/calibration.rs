//! Wall-mobility calibration record: produced by the micromagnetic
//! sweep, consumed by the behavioral device model.

use crate::hash::fnv64;
use crate::scalar::Scalar;

/// Velocity response of the wall to a device programming current.
///
/// `velocity(I)` is linear in |I| with slope `mu_dw` up to the
/// saturation velocity `v_sat`; the device current maps to a charge
/// current density through the heavy-metal conduction cross-section.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobilityCalibration<T> {
    /// Wall mobility in the linear regime ((m/s) per (A/m²)).
    pub mu_dw: T,
    /// Saturation wall velocity (m/s).
    pub v_sat: T,
    /// HM conduction cross-section (m²): width × t_HM.
    pub cross_section: T,
    /// Fingerprint of the material/geometry that produced this record.
    pub param_hash: u64,
}

impl<T: Scalar> MobilityCalibration<T> {
    /// Anchor calibration: full traverse of `span` in `t_pulse` at
    /// `i_max`, with the default Pt/CoFe saturation velocity.
    pub fn anchored(span: T, i_max: T, t_pulse: T, cross_section: T, v_sat: T) -> Self {
        let v_at_imax = span / t_pulse;
        let j_at_imax = i_max / cross_section;
        Self {
            mu_dw: v_at_imax / j_at_imax,
            v_sat,
            cross_section,
            param_hash: 0,
        }
    }

    /// Charge current density for a device current (A → A/m²).
    pub fn current_density(&self, current: T) -> T {
        current / self.cross_section
    }

    /// Signed wall velocity for a signed device current (m/s).
    pub fn velocity(&self, current: T) -> T {
        let j = self.current_density(current).abs();
        let v = (self.mu_dw * j).min(self.v_sat);
        if current < T::zero() {
            -v
        } else {
            v
        }
    }

    /// Serialize as the calibration-record text format.
    pub fn to_text(&self) -> String {
        format!(
            "dwsnn-calibration v1\n\
             mu_dw = {:e}\n\
             v_sat = {:e}\n\
             cross_section = {:e}\n\
             param_hash = {:016x}\n",
            self.mu_dw, self.v_sat, self.cross_section, self.param_hash
        )
    }

    /// Parse the calibration-record text format.
    pub fn from_text(text: &str) -> Result<Self, CalibrationParseError> {
        let mut lines = text.lines();
        match lines.next() {
            Some("dwsnn-calibration v1") => {}
            other => {
                return Err(CalibrationParseError::BadHeader {
                    found: other.unwrap_or("").to_string(),
                })
            }
        }
        let mut mu_dw = None;
        let mut v_sat = None;
        let mut cross_section = None;
        let mut param_hash = None;
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CalibrationParseError::BadLine {
                    line: line.to_string(),
                })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "mu_dw" => mu_dw = Some(parse_scalar::<T>("mu_dw", value)?),
                "v_sat" => v_sat = Some(parse_scalar::<T>("v_sat", value)?),
                "cross_section" => cross_section = Some(parse_scalar::<T>("cross_section", value)?),
                "param_hash" => {
                    param_hash = Some(u64::from_str_radix(value, 16).map_err(|_| {
                        CalibrationParseError::BadValue {
                            key: "param_hash",
                            value: value.to_string(),
                        }
                    })?)
                }
                _ => {
                    return Err(CalibrationParseError::UnknownKey {
                        key: key.to_string(),
                    })
                }
            }
        }
        let missing = |key: &'static str| CalibrationParseError::MissingKey { key };
        Ok(Self {
            mu_dw: mu_dw.ok_or_else(|| missing("mu_dw"))?,
            v_sat: v_sat.ok_or_else(|| missing("v_sat"))?,
            cross_section: cross_section.ok_or_else(|| missing("cross_section"))?,
            param_hash: param_hash.ok_or_else(|| missing("param_hash"))?,
        })
    }
}

fn parse_scalar<T: Scalar>(
    key: &'static str,
    value: &str,
) -> Result<T, CalibrationParseError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(T::of)
        .ok_or_else(|| CalibrationParseError::BadValue {
            key,
            value: value.to_string(),
        })
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CalibrationParseError {
    #[error("calibration header missing or wrong, found {found:?}")]
    BadHeader { found: String },
    #[error("calibration line {line:?} is not `key = value`")]
    BadLine { line: String },
    #[error("calibration key {key:?} has unparseable value {value:?}")]
    BadValue { key: &'static str, value: String },
    #[error("unknown calibration key {key:?}")]
    UnknownKey { key: String },
    #[error("calibration record missing key {key:?}")]
    MissingKey { key: &'static str },
}

/// Hash a canonical parameter string into a record fingerprint.
pub fn param_fingerprint(canonical: &str) -> u64 {
    fnv64(canonical.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchor() -> MobilityCalibration<f64> {
        MobilityCalibration::anchored(100e-9, 25e-6, 1e-9, 20e-9 * 3e-9, 400.0)
    }

    #[test]
    fn anchored_velocity_reproduces_full_traverse() {
        let c = anchor();
        // 25 μA for 1 ns must cover exactly the 100 nm span.
        assert!((c.velocity(25e-6) * 1e-9 - 100e-9).abs() < 1e-18);
        // Half current, half velocity (linear regime).
        assert!((c.velocity(12.5e-6) - 0.5 * c.velocity(25e-6)).abs() < 1e-9);
        // Sign follows the current.
        assert_eq!(c.velocity(-25e-6), -c.velocity(25e-6));
    }

    #[test]
    fn velocity_saturates() {
        let c = anchor();
        assert_eq!(c.velocity(1e-3), c.v_sat);
    }

    #[test]
    fn text_round_trip() {
        let mut c = anchor();
        c.param_hash = 0xdead_beef_0123_4567;
        let text = c.to_text();
        let back = MobilityCalibration::<f64>::from_text(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = "dwsnn-calibration v1\nmu_dw = 1e-10\nbogus = 3\n";
        assert!(matches!(
            MobilityCalibration::<f64>::from_text(text),
            Err(CalibrationParseError::UnknownKey { .. })
        ));
    }
}
