//! Behavioral domain-wall synapse.
//!
//! Wall position maps linearly to MTJ conductance; programming pulses
//! through the HM move the wall at the calibrated mobility; pinned
//! layers clamp the wall at the span ends. Read and program paths are
//! decoupled: reads never move the wall. Every programming pulse is
//! energy-accounted as I²·R_HM·t Joule heating plus V_dd·|I|·t drawn
//! from the supply.

use crate::calibration::MobilityCalibration;
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum DeviceError {
    #[error("invalid device parameter {name}: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: &'static str,
    },
    #[error("programming overdrive: |{current:e}| A exceeds ceiling {ceiling:e} A")]
    ProgrammingOverdrive { current: f64, ceiling: f64 },
    #[error("programming pulse {duration:e} s exceeds {max:e} s (100 × t_pulse)")]
    PulseTooLong { duration: f64, max: f64 },
    #[error("read bias {v_read:e} V outside (0, {max:e}] V where the constant-conductance model holds")]
    BiasOutOfRange { v_read: f64, max: f64 },
}

/// Parameters shared by every synapse device in a run.
#[derive(Clone, Copy, Debug)]
pub struct DeviceParams<T> {
    /// MTJ span excluding the wall width (m).
    pub l_mtj: T,
    /// Parallel-state conductance (S).
    pub g_p: T,
    /// Antiparallel-state conductance (S).
    pub g_ap: T,
    /// Wall-region conductance (S).
    pub g_dw: T,
    /// Heavy-metal programming-path resistance (Ω).
    pub r_hm: T,
    /// Nominal programming pulse width (s).
    pub t_pulse: T,
    /// Current that traverses the full span in one pulse (A).
    pub i_max: T,
    /// Hard programming-current ceiling (A).
    pub i_ceiling: T,
    /// Supply voltage for programming-energy accounting (V).
    pub v_dd: T,
    /// Wall-velocity calibration from the micromagnetic sweep.
    pub calibration: MobilityCalibration<T>,
}

impl<T: Scalar> Default for DeviceParams<T> {
    fn default() -> Self {
        let l_mtj = T::of(100e-9);
        let t_pulse = T::of(1e-9);
        let i_max = T::of(25e-6);
        Self {
            l_mtj,
            g_p: T::of(1e-6),
            g_ap: T::of(0.5e-6),
            g_dw: T::of(0.05e-6),
            // 384 Ω makes a full-traverse pulse dissipate 0.24 fJ
            // (E = I²·R·t at 25 μA, 1 ns).
            r_hm: T::of(384.0),
            t_pulse,
            i_max,
            i_ceiling: T::of(1.5) * i_max,
            v_dd: T::of(0.6),
            calibration: MobilityCalibration::anchored(
                l_mtj,
                i_max,
                t_pulse,
                T::of(20e-9 * 3e-9),
                T::of(400.0),
            ),
        }
    }
}

impl<T: Scalar> DeviceParams<T> {
    pub fn validate(&self) -> Result<(), DeviceError> {
        if !(self.g_p > self.g_ap && self.g_ap > T::zero()) {
            return Err(DeviceError::InvalidParam {
                name: "g_p/g_ap",
                reason: "require G_P > G_AP > 0",
            });
        }
        if self.g_dw < T::zero() {
            return Err(DeviceError::InvalidParam {
                name: "g_dw",
                reason: "must be >= 0",
            });
        }
        if !(self.r_hm >= T::of(100.0) && self.r_hm <= T::of(1000.0)) {
            return Err(DeviceError::InvalidParam {
                name: "r_hm",
                reason: "must lie in [100, 1000] ohms",
            });
        }
        for (name, v) in [
            ("l_mtj", self.l_mtj),
            ("t_pulse", self.t_pulse),
            ("i_max", self.i_max),
            ("i_ceiling", self.i_ceiling),
            ("v_dd", self.v_dd),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(DeviceError::InvalidParam {
                    name,
                    reason: "must be finite and > 0",
                });
            }
        }
        Ok(())
    }

    /// Maximum read bias for which conductance is treated as constant.
    pub fn v_read_max(&self) -> T {
        T::of(0.1)
    }
}

/// One synapse: the wall position inside the MTJ span.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynapseDevice<T> {
    x: T,
}

/// Result of one programming pulse.
#[derive(Clone, Copy, Debug)]
pub struct ProgramOutcome<T> {
    /// Wall displacement before rail clamping (m).
    pub dx_requested: T,
    /// Realized wall displacement (m).
    pub dx_achieved: T,
    /// True when the wall saturated at a rail during this pulse.
    pub clamped: bool,
    pub entry: EnergyEntry<T>,
}

impl<T: Scalar> SynapseDevice<T> {
    pub fn new(x: T, p: &DeviceParams<T>) -> Self {
        Self {
            x: clamp(x, T::zero(), p.l_mtj),
        }
    }

    pub fn from_weight(w: T, p: &DeviceParams<T>) -> Self {
        Self::new(w * p.l_mtj, p)
    }

    /// Wall position within the span (m).
    pub fn position(&self) -> T {
        self.x
    }

    /// Equivalent conductance G_P·x/L + G_AP·(1 − x/L) + G_DW (S).
    pub fn conductance(&self, p: &DeviceParams<T>) -> T {
        let frac = self.x / p.l_mtj;
        p.g_p * frac + p.g_ap * (T::one() - frac) + p.g_dw
    }

    /// Normalized synaptic weight x/L ∈ [0, 1].
    pub fn weight(&self, p: &DeviceParams<T>) -> T {
        self.x / p.l_mtj
    }

    /// Spike-path read current at the given bias (A). Never moves the
    /// wall: read current through the HM stays below depinning.
    pub fn read_current(&self, p: &DeviceParams<T>, v_read: T) -> Result<T, DeviceError> {
        if !(v_read > T::zero() && v_read <= p.v_read_max()) {
            return Err(DeviceError::BiasOutOfRange {
                v_read: v_read.as_f64(),
                max: p.v_read_max().as_f64(),
            });
        }
        Ok(self.conductance(p) * v_read)
    }

    /// Apply one programming pulse of signed current `i_prog` for `t`
    /// seconds and append its energy entry to `record`.
    pub fn program(
        &mut self,
        p: &DeviceParams<T>,
        i_prog: T,
        t: T,
        record: &mut EnergyRecord<T>,
    ) -> Result<ProgramOutcome<T>, DeviceError> {
        if i_prog.abs() > p.i_ceiling {
            return Err(DeviceError::ProgrammingOverdrive {
                current: i_prog.as_f64(),
                ceiling: p.i_ceiling.as_f64(),
            });
        }
        let max_t = T::of(100.0) * p.t_pulse;
        if !(t > T::zero()) {
            return Err(DeviceError::InvalidParam {
                name: "t",
                reason: "pulse duration must be > 0",
            });
        }
        if t > max_t {
            return Err(DeviceError::PulseTooLong {
                duration: t.as_f64(),
                max: max_t.as_f64(),
            });
        }

        let dx = p.calibration.velocity(i_prog) * t;
        let target = self.x + dx;
        let new_x = clamp(target, T::zero(), p.l_mtj);
        let achieved = new_x - self.x;
        self.x = new_x;

        let entry = EnergyEntry {
            current: i_prog,
            duration: t,
            e_joule: i_prog * i_prog * p.r_hm * t,
            e_supply: p.v_dd * i_prog.abs() * t,
        };
        record.append(entry);
        Ok(ProgramOutcome {
            dx_requested: dx,
            dx_achieved: achieved,
            clamped: achieved != dx,
            entry,
        })
    }
}

#[inline]
fn clamp<T: Scalar>(v: T, lo: T, hi: T) -> T {
    v.max(lo).min(hi)
}

/// One programming event's energy figures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyEntry<T> {
    pub current: T,
    pub duration: T,
    /// Joule heating in the HM path: I²·R_HM·t (J).
    pub e_joule: T,
    /// Supply draw: V_dd·|I|·t (J).
    pub e_supply: T,
}

/// Running energy account. Totals are always maintained; the per-event
/// list is kept only when requested (training-scale runs stream events
/// to disk instead of holding them).
#[derive(Clone, Debug, Default)]
pub struct EnergyRecord<T> {
    pub event_count: u64,
    pub joule_total: T,
    pub supply_total: T,
    entries: Option<Vec<EnergyEntry<T>>>,
}

impl<T: Scalar> EnergyRecord<T> {
    pub fn totals_only() -> Self {
        Self {
            event_count: 0,
            joule_total: T::zero(),
            supply_total: T::zero(),
            entries: None,
        }
    }

    pub fn with_entries() -> Self {
        Self {
            event_count: 0,
            joule_total: T::zero(),
            supply_total: T::zero(),
            entries: Some(Vec::new()),
        }
    }

    pub fn append(&mut self, entry: EnergyEntry<T>) {
        self.event_count += 1;
        self.joule_total = self.joule_total + entry.e_joule;
        self.supply_total = self.supply_total + entry.e_supply;
        if let Some(list) = &mut self.entries {
            list.push(entry);
        }
    }

    pub fn entries(&self) -> Option<&[EnergyEntry<T>]> {
        self.entries.as_deref()
    }

    /// Verify the bookkeeping identity: totals equal entry sums.
    pub fn reconcile(&self) -> bool {
        match &self.entries {
            None => true,
            Some(list) => {
                if list.len() as u64 != self.event_count {
                    return false;
                }
                let j: T = list.iter().map(|e| e.e_joule).sum();
                let s: T = list.iter().map(|e| e.e_supply).sum();
                j == self.joule_total && s == self.supply_total
            }
        }
    }
}
