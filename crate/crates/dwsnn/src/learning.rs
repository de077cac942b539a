//! STDP learning engine.
//!
//! Keeps last-spike traces per input line and per neuron, computes the
//! piecewise-exponential weight change for a pre/post timing difference
//! (nearest-neighbor pairing: latest pre vs latest post), converts it
//! to a programming current through the linear device map, and applies
//! post-triggered programming pulses. Potentiation fires when the post
//! neuron spikes; depression fires when a pre spike lands inside the
//! negative window after a post spike, which is event-equivalent to the
//! hardware's delayed-POST sampling of the ramp.

use crate::device::{DeviceError, DeviceParams, EnergyRecord, SynapseDevice};
use crate::dynamics::CircuitParams;
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum LearningError {
    #[error("invalid STDP parameter {name}: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: &'static str,
    },
}

/// Timing-window constants of the STDP rule (times in steps).
#[derive(Clone, Copy, Debug)]
pub struct StdpParams<T> {
    /// Potentiation amplitude (weight units).
    pub a_plus: T,
    /// Depression amplitude (weight units).
    pub a_minus: T,
    /// Potentiation window time constant (steps).
    pub tau_plus: T,
    /// Depression window time constant (steps).
    pub tau_minus: T,
    /// Depression window length (steps).
    pub window_len_neg: u32,
    /// Potentiation window length (steps).
    pub window_len_pos: u32,
}

impl<T: Scalar> Default for StdpParams<T> {
    fn default() -> Self {
        Self {
            a_plus: T::of(0.01),
            a_minus: T::of(0.01),
            tau_plus: T::of(100.0),
            tau_minus: T::of(1.0),
            window_len_neg: 5,
            window_len_pos: 300,
        }
    }
}

impl<T: Scalar> StdpParams<T> {
    pub fn validate(&self) -> Result<(), LearningError> {
        for (name, v) in [
            ("a_plus", self.a_plus),
            ("a_minus", self.a_minus),
            ("tau_plus", self.tau_plus),
            ("tau_minus", self.tau_minus),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(LearningError::InvalidParam {
                    name,
                    reason: "must be finite and > 0",
                });
            }
        }
        // Window must outlast its own exponential.
        if T::of(self.window_len_pos as f64) < self.tau_plus {
            return Err(LearningError::InvalidParam {
                name: "window_len_pos",
                reason: "must be >= tau_plus",
            });
        }
        if T::of(self.window_len_neg as f64) < self.tau_minus {
            return Err(LearningError::InvalidParam {
                name: "window_len_neg",
                reason: "must be >= tau_minus",
            });
        }
        Ok(())
    }
}

/// Piecewise-exponential STDP weight change for Δt = t_post − t_pre.
///
/// Positive Δt potentiates, negative depresses, both zero outside
/// their windows; the Δt = 0 tie yields no update.
pub fn stdp_dw<T: Scalar>(delta_t: i64, p: &StdpParams<T>) -> T {
    if delta_t > 0 && delta_t <= i64::from(p.window_len_pos) {
        let dt = T::of(delta_t as f64);
        p.a_plus * (-(dt / p.tau_plus)).exp()
    } else if delta_t < 0 && -delta_t <= i64::from(p.window_len_neg) {
        let dt = T::of(delta_t as f64);
        -p.a_minus * (dt / p.tau_minus).exp()
    } else {
        T::zero()
    }
}

/// Programming current realizing a weight change: full-scale Δw = 1
/// maps to I_max at the nominal pulse width.
pub fn current_for_dw<T: Scalar>(delta_w: T, dev: &DeviceParams<T>) -> T {
    delta_w * dev.i_max
}

/// Circuit-tier programming current: an I_t/C_p voltage ramp from V_w
/// drives a subthreshold device, so the current decays exponentially
/// with τ = C_p·U_T/(κ·I_t). Zero outside the window.
pub fn pre_ramp_current<T: Scalar>(t_since_window_start: T, window: T, cp: &CircuitParams<T>) -> T {
    if t_since_window_start < T::zero() || t_since_window_start > window {
        return T::zero();
    }
    let i_peak = cp.i_0 * (cp.kappa * cp.v_w / cp.u_t).exp();
    i_peak * (-(t_since_window_start / cp.tau_ramp())).exp()
}

/// Last-spike timestamps, one per input line and one per neuron.
#[derive(Clone, Debug)]
pub struct SpikeTraces {
    last_pre: Vec<Option<u64>>,
    last_post: Vec<Option<u64>>,
}

impl SpikeTraces {
    pub fn new(n_pre: usize, n_post: usize) -> Self {
        Self {
            last_pre: vec![None; n_pre],
            last_post: vec![None; n_post],
        }
    }

    pub fn clear(&mut self) {
        self.last_pre.fill(None);
        self.last_post.fill(None);
    }

    pub fn last_pre(&self, line: usize) -> Option<u64> {
        self.last_pre[line]
    }

    pub fn last_post(&self, neuron: usize) -> Option<u64> {
        self.last_post[neuron]
    }
}

/// One applied programming pulse.
#[derive(Clone, Copy, Debug)]
pub struct ProgrammingEvent<T> {
    pub step: u64,
    pub line: usize,
    pub neuron: usize,
    /// t_post − t_pre (steps).
    pub delta_t: i64,
    pub delta_w: T,
    pub i_prog: T,
    pub duration: T,
    pub e_joule: T,
    pub e_supply: T,
    /// Wall saturated at a rail during this pulse.
    pub clamped: bool,
}

/// STDP + device parameters bundled for programming.
#[derive(Clone, Copy, Debug)]
pub struct Programmer<T> {
    pub stdp: StdpParams<T>,
    pub device: DeviceParams<T>,
}

impl<T: Scalar> Programmer<T> {
    pub fn new(stdp: StdpParams<T>, device: DeviceParams<T>) -> Self {
        Self { stdp, device }
    }

    /// Apply one pre/post pairing to one synapse. Returns the event, or
    /// None when Δt falls outside both windows.
    fn apply_pairing(
        &self,
        dev: &mut SynapseDevice<T>,
        line: usize,
        neuron: usize,
        delta_t: i64,
        now: u64,
        record: &mut EnergyRecord<T>,
    ) -> Result<Option<ProgrammingEvent<T>>, DeviceError> {
        let delta_w = stdp_dw(delta_t, &self.stdp);
        if delta_w == T::zero() {
            return Ok(None);
        }
        let i_prog = current_for_dw(delta_w, &self.device);
        let outcome = dev.program(&self.device, i_prog, self.device.t_pulse, record)?;
        Ok(Some(ProgrammingEvent {
            step: now,
            line,
            neuron,
            delta_t,
            delta_w,
            i_prog,
            duration: self.device.t_pulse,
            e_joule: outcome.entry.e_joule,
            e_supply: outcome.entry.e_supply,
            clamped: outcome.clamped,
        }))
    }

    /// Post-neuron spike at `now`: potentiate every afferent synapse
    /// whose line has a pre trace inside the positive window.
    ///
    /// `synapses` is the full crossbar, line-major with `n_post`
    /// columns; column `neuron` is this neuron's afferents.
    pub fn on_post_spike(
        &self,
        neuron: usize,
        now: u64,
        traces: &mut SpikeTraces,
        synapses: &mut [SynapseDevice<T>],
        n_post: usize,
        record: &mut EnergyRecord<T>,
        events: &mut Vec<ProgrammingEvent<T>>,
    ) -> Result<(), DeviceError> {
        traces.last_post[neuron] = Some(now);
        for line in 0..traces.last_pre.len() {
            if let Some(t_pre) = traces.last_pre[line] {
                let delta_t = now as i64 - t_pre as i64;
                let dev = &mut synapses[line * n_post + neuron];
                if let Some(ev) =
                    self.apply_pairing(dev, line, neuron, delta_t, now, record)?
                {
                    events.push(ev);
                }
            }
        }
        Ok(())
    }

    /// Pre spike on `line` at `now`: update the trace, and depress the
    /// synapses of every neuron whose last post spike falls inside the
    /// negative window (the late-pre side of the rule).
    pub fn record_pre_spike(
        &self,
        line: usize,
        now: u64,
        traces: &mut SpikeTraces,
        synapses: &mut [SynapseDevice<T>],
        n_post: usize,
        record: &mut EnergyRecord<T>,
        events: &mut Vec<ProgrammingEvent<T>>,
    ) -> Result<(), DeviceError> {
        traces.last_pre[line] = Some(now);
        for neuron in 0..traces.last_post.len() {
            if let Some(t_post) = traces.last_post[neuron] {
                let delta_t = t_post as i64 - now as i64;
                if delta_t < 0 {
                    let dev = &mut synapses[line * n_post + neuron];
                    if let Some(ev) =
                        self.apply_pairing(dev, line, neuron, delta_t, now, record)?
                    {
                        events.push(ev);
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stdp() -> StdpParams<f64> {
        StdpParams::default()
    }

    #[test]
    fn params_validated() {
        assert!(stdp().validate().is_ok());
        let mut bad = stdp();
        bad.window_len_pos = 50; // < tau_plus
        assert!(bad.validate().is_err());
    }

    #[test]
    fn dw_direct_evaluations() {
        let p = stdp();
        // Δt = +τ₊ → A₊·e⁻¹
        let dw = stdp_dw(100, &p);
        assert!((dw - 0.01 * (-1.0f64).exp()).abs() < 1e-15);
        // Δt = −τ₋ → −A₋·e⁻¹
        let dw = stdp_dw(-1, &p);
        assert!((dw + 0.01 * (-1.0f64).exp()).abs() < 1e-15);
        // tie and far tail
        assert_eq!(stdp_dw(0, &p), 0.0);
        assert_eq!(stdp_dw(10_000, &p), 0.0);
        assert_eq!(stdp_dw(i64::from(p.window_len_pos) + 1, &p), 0.0);
        assert_eq!(stdp_dw(-(i64::from(p.window_len_neg) + 1), &p), 0.0);
    }

    #[test]
    fn sign_follows_branch_everywhere_in_window() {
        let p = stdp();
        for d in 1..=i64::from(p.window_len_pos) {
            assert!(stdp_dw(d, &p) > 0.0);
        }
        for d in 1..=i64::from(p.window_len_neg) {
            assert!(stdp_dw(-d, &p) < 0.0);
        }
    }

    #[test]
    fn current_map_anchors() {
        let dev = DeviceParams::<f64>::default();
        assert_eq!(current_for_dw(0.0, &dev), 0.0);
        assert!((current_for_dw(1.0, &dev) - 25e-6).abs() < 1e-18);
        assert!((current_for_dw(0.1, &dev) - 2.5e-6).abs() < 1e-18);
    }

    #[test]
    fn composed_pairing_matches_scalar_recomputation() {
        // pre at 10, post at 15: Δw = A₊·e^(−5/τ₊), I = Δw·I_max.
        let prog = Programmer::new(stdp(), DeviceParams::<f64>::default());
        let mut traces = SpikeTraces::new(1, 1);
        let mut synapses = vec![SynapseDevice::from_weight(0.5, &prog.device)];
        let mut record = EnergyRecord::with_entries();
        let mut events = Vec::new();
        prog.record_pre_spike(0, 10, &mut traces, &mut synapses, 1, &mut record, &mut events)
            .unwrap();
        assert!(events.is_empty(), "pre with no prior post must not program");
        prog.on_post_spike(0, 15, &mut traces, &mut synapses, 1, &mut record, &mut events)
            .unwrap();
        assert_eq!(events.len(), 1);
        let ev = &events[0];
        let dw_expect = 0.01 * (-5.0f64 / 100.0).exp();
        assert!((ev.delta_w - dw_expect).abs() < 1e-15);
        assert!((dw_expect - 0.009512).abs() < 1e-6);
        assert!((ev.i_prog - 2.378e-7).abs() < 1e-10, "i = {:e}", ev.i_prog);
        // The realized weight change equals Δw through the linear map.
        let w = synapses[0].weight(&prog.device);
        assert!((w - (0.5 + dw_expect)).abs() < 1e-9);
    }

    #[test]
    fn depression_branch_on_late_pre() {
        // post at 20, pre at 21: Δw = −A₋·e^(−1/τ₋)
        let prog = Programmer::new(stdp(), DeviceParams::<f64>::default());
        let mut traces = SpikeTraces::new(1, 1);
        let mut synapses = vec![SynapseDevice::from_weight(0.5, &prog.device)];
        let mut record = EnergyRecord::totals_only();
        let mut events = Vec::new();
        prog.on_post_spike(0, 20, &mut traces, &mut synapses, 1, &mut record, &mut events)
            .unwrap();
        events.clear();
        prog.record_pre_spike(0, 21, &mut traces, &mut synapses, 1, &mut record, &mut events)
            .unwrap();
        assert_eq!(events.len(), 1);
        let dw_expect = -0.01 * (-1.0f64).exp();
        assert!((events[0].delta_w - dw_expect).abs() < 1e-15);
        assert!(events[0].i_prog < 0.0);
    }

    #[test]
    fn only_latest_pre_participates() {
        let prog = Programmer::new(stdp(), DeviceParams::<f64>::default());
        let mut traces = SpikeTraces::new(1, 1);
        let mut synapses = vec![SynapseDevice::from_weight(0.2, &prog.device)];
        let mut record = EnergyRecord::totals_only();
        let mut events = Vec::new();
        for t in [5u64, 40, 90] {
            prog.record_pre_spike(0, t, &mut traces, &mut synapses, 1, &mut record, &mut events)
                .unwrap();
        }
        prog.on_post_spike(0, 100, &mut traces, &mut synapses, 1, &mut record, &mut events)
            .unwrap();
        // One event, paired with the latest pre (Δt = 10), not all three.
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].delta_t, 10);
    }

    #[test]
    fn supply_energy_bounded_by_full_scale_pulse() {
        let dev = DeviceParams::<f64>::default();
        let bound = dev.v_dd * dev.i_max * dev.t_pulse; // 15 fJ
        assert!((bound - 15e-15).abs() < 1e-21);
        let mut record = EnergyRecord::totals_only();
        for k in 0..=20 {
            let dw = -1.0 + 0.1 * k as f64;
            let mut syn = SynapseDevice::from_weight(0.5, &dev);
            let i = current_for_dw(dw, &dev);
            let out = syn.program(&dev, i, dev.t_pulse, &mut record).unwrap();
            assert!(out.entry.e_supply <= bound + 1e-21);
        }
    }

    #[test]
    fn ramp_peak_and_time_constant() {
        let cp = CircuitParams::<f64>::default();
        let window = 100.0 * cp.tau_ramp();
        let i_peak = cp.i_0 * (cp.kappa * cp.v_w / cp.u_t).exp();
        assert_eq!(pre_ramp_current(0.0, window, &cp), i_peak);
        let at_tau = pre_ramp_current(cp.tau_ramp(), window, &cp);
        assert!((at_tau - i_peak * (-1.0f64).exp()).abs() < 1e-20);
        assert_eq!(pre_ramp_current(window * 1.01, window, &cp), 0.0);
        assert_eq!(pre_ramp_current(-1e-9, window, &cp), 0.0);
    }

    #[test]
    fn ramp_regression_recovers_circuit_tau_within_2_percent() {
        // Least-squares fit of ln I against t over the window.
        let cp = CircuitParams::<f64>::default();
        let tau = cp.tau_ramp();
        let window = 5.0 * tau;
        let n = 200;
        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for k in 0..n {
            let t = window * k as f64 / n as f64;
            let y = pre_ramp_current(t, window, &cp).ln();
            sx += t;
            sy += y;
            sxx += t * t;
            sxy += t * y;
        }
        let nf = n as f64;
        let slope = (sxy - sx * sy / nf) / (sxx - sx * sx / nf);
        let tau_fit = -1.0 / slope;
        assert!((tau_fit - tau).abs() / tau < 0.02, "tau_fit = {tau_fit:e}");
    }

    #[test]
    fn ramp_can_realize_the_stdp_window() {
        // Pick C_p so the circuit τ equals τ₊ steps of the system tier;
        // the fitted exponential then matches the stdp_dw profile.
        let p = stdp();
        let mut cp = CircuitParams::<f64>::default();
        let target_tau = p.tau_plus * cp.dt; // τ₊ steps of dt seconds
        cp.c_p = target_tau * cp.kappa * cp.i_t / cp.u_t;
        let tau = cp.tau_ramp();
        assert!((tau - target_tau).abs() / target_tau < 1e-12);
        // Sampled ratio: I(t)/I(0) vs stdp_dw ratio over the window.
        let window = p.window_len_pos as f64 * cp.dt;
        for steps in [1usize, 10, 50, 100, 250] {
            let t = steps as f64 * cp.dt;
            let circuit_ratio =
                pre_ramp_current(t, window, &cp) / pre_ramp_current(0.0, window, &cp);
            let dw_ratio = stdp_dw(steps as i64, &p) / p.a_plus;
            assert!(
                (circuit_ratio - dw_ratio).abs() / dw_ratio < 0.02,
                "steps = {steps}"
            );
        }
    }

    proptest! {
        // Round trip: programming current_for_dw(Δw) changes the weight
        // by Δw, up to rail clamping.
        #[test]
        fn weight_round_trip(x0 in 0.0f64..1.0, dw in -1.0f64..1.0) {
            let dev = DeviceParams::<f64>::default();
            let mut record = EnergyRecord::totals_only();
            let mut syn = SynapseDevice::from_weight(x0, &dev);
            let i = current_for_dw(dw, &dev);
            syn.program(&dev, i, dev.t_pulse, &mut record).unwrap();
            let expect = (x0 + dw).clamp(0.0, 1.0);
            prop_assert!((syn.weight(&dev) - expect).abs() < 1e-6);
        }

        // Window locality: no update outside the windows.
        #[test]
        fn window_locality(dt in -2000i64..2000) {
            let p = stdp();
            let dw = stdp_dw(dt, &p);
            let inside_pos = dt > 0 && dt <= i64::from(p.window_len_pos);
            let inside_neg = dt < 0 && -dt <= i64::from(p.window_len_neg);
            if inside_pos {
                prop_assert!(dw > 0.0);
            } else if inside_neg {
                prop_assert!(dw < 0.0);
            } else {
                prop_assert_eq!(dw, 0.0);
            }
        }
    }
}
