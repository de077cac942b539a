//! Neuron and synaptic-current dynamics.
//!
//! Two tiers integrate the same first-order leaky dynamics with
//! exponential Euler (exact for a linear leak, so zero-input decay has
//! no stepping error):
//!
//! * behavioral — normalized units, one simulation step per unit time;
//! * circuit — subthreshold translinear ODEs in SI units, where every
//!   time constant is C·U_T/(κ·I_t).
//!
//! The circuit membrane equation is isomorphic to the behavioral one
//! under v ↔ I_mem, a ↔ I_a/I_t, R·ΣI_post ↔ I_in·I_th/I_t, so matched
//! parameters yield matched spike trains.

use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: &'static str,
    },
    #[error("linear-regime guard violated: I_w = {i_w:e} A must be at least 10 × I_t = {i_t:e} A")]
    LinearRegimeGuard { i_w: f64, i_t: f64 },
}

// ---------------------------------------------------------------------------
// Behavioral tier
// ---------------------------------------------------------------------------

/// Leaky integrate-and-fire parameters (normalized units, time in
/// simulation steps).
#[derive(Clone, Copy, Debug)]
pub struct NeuronParams<T> {
    /// Membrane time constant (steps).
    pub tau_mem: T,
    /// Membrane gain applied to the summed post-synaptic current.
    pub r_mem: T,
    pub v_thres: T,
    pub v_reset: T,
    /// Refractory duration (steps).
    pub t_refrac: u32,
    /// Adaptation increment per emitted spike.
    pub a_inc: T,
    /// Adaptation decay constant (steps).
    pub tau_a: T,
}

impl<T: Scalar> Default for NeuronParams<T> {
    fn default() -> Self {
        Self {
            tau_mem: T::of(10.0),
            r_mem: T::one(),
            v_thres: T::one(),
            v_reset: T::zero(),
            t_refrac: 2,
            a_inc: T::of(0.01),
            tau_a: T::of(100.0),
        }
    }
}

impl<T: Scalar> NeuronParams<T> {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.tau_mem > T::zero()) {
            return Err(DynamicsError::InvalidParam {
                name: "tau_mem",
                reason: "must be > 0",
            });
        }
        if !(self.tau_a > T::zero()) {
            return Err(DynamicsError::InvalidParam {
                name: "tau_a",
                reason: "must be > 0",
            });
        }
        if !(self.v_thres > self.v_reset) {
            return Err(DynamicsError::InvalidParam {
                name: "v_thres",
                reason: "must exceed v_reset",
            });
        }
        if self.a_inc < T::zero() {
            return Err(DynamicsError::InvalidParam {
                name: "a_inc",
                reason: "must be >= 0",
            });
        }
        Ok(())
    }
}

/// Membrane, adaptation and refractory state of one neuron.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeuronState<T> {
    pub v: T,
    pub a: T,
    pub refrac_remaining: u32,
}

impl<T: Scalar> Default for NeuronState<T> {
    fn default() -> Self {
        Self {
            v: T::zero(),
            a: T::zero(),
            refrac_remaining: 0,
        }
    }
}

impl<T: Scalar> NeuronState<T> {
    /// Reset the fast variables (membrane, refractory timer) while
    /// keeping the slow adaptation variable.
    pub fn reset_fast(&mut self, p: &NeuronParams<T>) {
        self.v = p.v_reset;
        self.refrac_remaining = 0;
    }
}

/// Advance one neuron one step under the summed post-synaptic current.
/// Returns true when a spike is emitted this step.
pub fn lif_step<T: Scalar>(n: &mut NeuronState<T>, p: &NeuronParams<T>, i_total: T) -> bool {
    let a_decay = (-(T::one() / p.tau_a)).exp();
    if n.refrac_remaining > 0 {
        n.refrac_remaining -= 1;
        n.v = p.v_reset;
        n.a = n.a * a_decay;
        return false;
    }
    // Adaptation scales the leak: dv/dt = (−v·(1+a) + R·I)/τ.
    let one_plus_a = T::one() + n.a;
    let decay = (-(one_plus_a / p.tau_mem)).exp();
    let v_inf = p.r_mem * i_total / one_plus_a;
    n.v = v_inf + (n.v - v_inf) * decay;
    n.a = n.a * a_decay;
    if n.v >= p.v_thres {
        n.v = p.v_reset;
        n.refrac_remaining = p.t_refrac;
        n.a = n.a + p.a_inc;
        return true;
    }
    false
}

/// First-order post-synaptic current state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynapticCurrentState<T> {
    pub i_post: T,
    /// Decay time constant (steps).
    pub tau_post: T,
}

impl<T: Scalar> SynapticCurrentState<T> {
    pub fn new(tau_post: T) -> Self {
        Self {
            i_post: T::zero(),
            tau_post,
        }
    }

    /// Per-step decay factor e^(−1/τ).
    #[inline]
    pub fn decay_factor(&self) -> T {
        (-(T::one() / self.tau_post)).exp()
    }
}

/// Decay the standing current, then add this step's weighted spike sum
/// (delta inputs land instantaneously).
pub fn synapse_step<T: Scalar>(s: &mut SynapticCurrentState<T>, spike_weight_sum: T) {
    s.i_post = s.i_post * s.decay_factor() + spike_weight_sum;
}

// ---------------------------------------------------------------------------
// Circuit tier
// ---------------------------------------------------------------------------

/// Subthreshold circuit biases and capacitances.
#[derive(Clone, Copy, Debug)]
pub struct CircuitParams<T> {
    /// Thermal voltage (V).
    pub u_t: T,
    /// Subthreshold slope factor.
    pub kappa: T,
    /// STDP ramp capacitor (F).
    pub c_p: T,
    /// DPI integration capacitor (F).
    pub c_syn: T,
    /// Membrane capacitor (F).
    pub c_mem: T,
    /// Tail/leak bias current (A).
    pub i_t: T,
    /// Threshold bias current (A).
    pub i_th: T,
    /// Weight-scaled input current during a spike (A).
    pub i_w: T,
    /// Subthreshold pre-exponential current (A).
    pub i_0: T,
    /// Weighting bias voltage (V).
    pub v_w: T,
    /// Supply voltage (V).
    pub v_dd: T,
    /// Wall-clock duration of one simulation step (s).
    pub dt: T,
}

impl<T: Scalar> Default for CircuitParams<T> {
    fn default() -> Self {
        Self {
            u_t: T::of(crate::consts::U_T_300K),
            kappa: T::of(0.7),
            c_p: T::of(1e-12),
            c_syn: T::of(1e-12),
            c_mem: T::of(50e-15),
            i_t: T::of(10e-9),
            i_th: T::of(10e-9),
            i_w: T::of(200e-9),
            i_0: T::of(1e-15),
            v_w: T::of(0.3),
            v_dd: T::of(0.6),
            dt: T::of(1e-6),
        }
    }
}

impl<T: Scalar> CircuitParams<T> {
    /// Enforced at configuration load: the translinear derivation only
    /// holds in the linear region I_t ≪ I_w.
    pub fn validate(&self) -> Result<(), DynamicsError> {
        for (name, v) in [
            ("u_t", self.u_t),
            ("kappa", self.kappa),
            ("c_p", self.c_p),
            ("c_syn", self.c_syn),
            ("c_mem", self.c_mem),
            ("i_t", self.i_t),
            ("i_th", self.i_th),
            ("i_0", self.i_0),
            ("dt", self.dt),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(DynamicsError::InvalidParam {
                    name,
                    reason: "must be finite and > 0",
                });
            }
        }
        if self.i_w < T::of(10.0) * self.i_t {
            return Err(DynamicsError::LinearRegimeGuard {
                i_w: self.i_w.as_f64(),
                i_t: self.i_t.as_f64(),
            });
        }
        Ok(())
    }

    /// τ = C·U_T/(κ·I_t) for an arbitrary capacitor.
    pub fn tau_of(&self, c: T) -> T {
        c * self.u_t / (self.kappa * self.i_t)
    }

    /// DPI synaptic time constant (s).
    pub fn tau_syn(&self) -> T {
        self.tau_of(self.c_syn)
    }

    /// Membrane time constant (s).
    pub fn tau_mem(&self) -> T {
        self.tau_of(self.c_mem)
    }

    /// STDP ramp time constant (s).
    pub fn tau_ramp(&self) -> T {
        self.tau_of(self.c_p)
    }
}

/// DPI output current update over one step.
///
/// While a spike is transmitted, `spike_gated_i_w` is the MTJ-modulated
/// weight current and I_syn charges toward I_w·I_th/I_t; otherwise pass
/// zero and I_syn decays toward 0.
pub fn dpi_step<T: Scalar>(i_syn: T, cp: &CircuitParams<T>, spike_gated_i_w: T) -> T {
    let target = spike_gated_i_w * cp.i_th / cp.i_t;
    let decay = (-(cp.dt / cp.tau_syn())).exp();
    target + (i_syn - target) * decay
}

/// Threshold/reset/adaptation parameters of the circuit neuron. The
/// positive-feedback and reset blocks are abstracted to an
/// instantaneous threshold crossing.
#[derive(Clone, Copy, Debug)]
pub struct CircuitNeuronParams<T> {
    pub i_thres: T,
    pub i_reset: T,
    pub t_refrac: u32,
    /// Adaptation current increment per spike (A).
    pub i_a_inc: T,
    /// Adaptation decay constant (steps).
    pub tau_a_steps: T,
}

impl<T: Scalar> Default for CircuitNeuronParams<T> {
    fn default() -> Self {
        Self {
            i_thres: T::of(100e-9),
            i_reset: T::zero(),
            t_refrac: 2,
            i_a_inc: T::of(1e-9),
            tau_a_steps: T::of(100.0),
        }
    }
}

/// Membrane and adaptation currents of one circuit neuron.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitNeuronState<T> {
    pub i_mem: T,
    pub i_a: T,
    pub refrac_remaining: u32,
}

impl<T: Scalar> Default for CircuitNeuronState<T> {
    fn default() -> Self {
        Self {
            i_mem: T::zero(),
            i_a: T::zero(),
            refrac_remaining: 0,
        }
    }
}

/// Advance the circuit membrane equation
/// τ_mem·dI_mem/dt + I_mem·(1 + I_a/I_t) = I_in·I_th/I_t
/// one step; returns true on a spike.
pub fn neuron_circuit_step<T: Scalar>(
    state: &mut CircuitNeuronState<T>,
    cp: &CircuitParams<T>,
    np: &CircuitNeuronParams<T>,
    i_in: T,
) -> bool {
    let a_decay = (-(T::one() / np.tau_a_steps)).exp();
    if state.refrac_remaining > 0 {
        state.refrac_remaining -= 1;
        state.i_mem = np.i_reset;
        state.i_a = state.i_a * a_decay;
        return false;
    }
    let tau_steps = cp.tau_mem() / cp.dt;
    let one_plus_a = T::one() + state.i_a / cp.i_t;
    let decay = (-(one_plus_a / tau_steps)).exp();
    let target = i_in * cp.i_th / cp.i_t / one_plus_a;
    state.i_mem = target + (state.i_mem - target) * decay;
    state.i_a = state.i_a * a_decay;
    if state.i_mem >= np.i_thres {
        state.i_mem = np.i_reset;
        state.refrac_remaining = np.t_refrac;
        state.i_a = state.i_a + np.i_a_inc;
        return true;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_decay_matches_closed_form() {
        let mut s = SynapticCurrentState::new(1.0f64);
        s.i_post = 1.0;
        synapse_step(&mut s, 0.0);
        assert!((s.i_post - (-1.0f64).exp()).abs() < 1e-16);

        // Exponential-Euler exactness over many steps: no drift.
        let mut s = SynapticCurrentState::new(7.5f64);
        s.i_post = 2.0;
        for _ in 0..100 {
            synapse_step(&mut s, 0.0);
        }
        let expect = 2.0 * (-100.0 / 7.5f64).exp();
        assert!((s.i_post - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn single_spike_lands_instantaneously() {
        let mut s = SynapticCurrentState::new(3.0f64);
        synapse_step(&mut s, 0.42);
        assert_eq!(s.i_post, 0.42);
    }

    #[test]
    fn periodic_train_peak_matches_geometric_series() {
        // Peak after many periods → w/(1 − e^(−T/τ)), summed directly
        // as the geometric series oracle.
        let tau = 4.0f64;
        let w = 0.3f64;
        let period = 6usize;
        let mut s = SynapticCurrentState::new(tau);
        let mut peak = 0.0;
        for step in 0..600 {
            let input = if step % period == 0 { w } else { 0.0 };
            synapse_step(&mut s, input);
            if step % period == 0 {
                peak = s.i_post;
            }
        }
        let oracle: f64 = (0..100)
            .map(|k| w * (-(period as f64) * k as f64 / tau).exp())
            .sum();
        let closed = w / (1.0 - (-(period as f64) / tau).exp());
        assert!((oracle - closed).abs() < 1e-12);
        assert!((peak - closed).abs() / closed < 1e-10, "peak = {peak}");
    }

    #[test]
    fn subthreshold_membrane_decays_and_never_spikes() {
        let p = NeuronParams::<f64>::default();
        let mut n = NeuronState {
            v: 0.9,
            a: 0.0,
            refrac_remaining: 0,
        };
        for step in 1..=50 {
            let spiked = lif_step(&mut n, &p, 0.0);
            assert!(!spiked);
            let expect = 0.9 * (-(step as f64) / 10.0).exp();
            assert!((n.v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn first_spike_time_matches_analytic_lif() {
        // t* = τ·ln(RI/(RI − V_thres)) for constant drive, no
        // adaptation and fresh state.
        let mut p = NeuronParams::<f64>::default();
        p.a_inc = 0.0;
        let i = 1.5;
        let t_star = p.tau_mem * ((p.r_mem * i) / (p.r_mem * i - p.v_thres)).ln();
        let mut n = NeuronState::default();
        let mut first = None;
        for step in 1..=200 {
            if lif_step(&mut n, &p, i) {
                first = Some(step);
                break;
            }
        }
        let first = first.expect("suprathreshold drive must spike") as f64;
        assert!(
            (first - t_star).abs() <= 1.0,
            "first spike {first}, analytic {t_star}"
        );
    }

    #[test]
    fn refractory_holds_reset_and_blocks_spiking() {
        let mut p = NeuronParams::<f64>::default();
        p.t_refrac = 3;
        p.a_inc = 0.0;
        let mut n = NeuronState::default();
        let drive = 10.0; // spikes immediately once integrated
        let mut spike_steps = Vec::new();
        for step in 0..30 {
            if lif_step(&mut n, &p, drive) {
                spike_steps.push(step);
            } else if n.refrac_remaining > 0 {
                assert_eq!(n.v, p.v_reset);
            }
        }
        for pair in spike_steps.windows(2) {
            assert!(pair[1] - pair[0] > p.t_refrac as usize);
        }
    }

    #[test]
    fn adaptation_stretches_interspike_intervals_monotonically() {
        let mut p = NeuronParams::<f64>::default();
        p.a_inc = 0.05;
        p.tau_a = 500.0;
        let mut n = NeuronState::default();
        let mut spikes = Vec::new();
        for step in 0..4000 {
            if lif_step(&mut n, &p, 3.0) {
                spikes.push(step as i64);
            }
            assert!(n.a >= 0.0);
        }
        assert!(spikes.len() > 10, "need a spike train, got {spikes:?}");
        let isis: Vec<i64> = spikes.windows(2).map(|w| w[1] - w[0]).collect();
        // Non-decreasing up to the one-step quantization dither that
        // appears once the train has converged.
        for pair in isis.windows(2) {
            assert!(
                pair[1] >= pair[0] - 1,
                "ISIs must be non-decreasing: {isis:?}"
            );
        }
        assert!(isis[isis.len() - 1] > isis[0], "rate must adapt downward");
        // Converges: the last intervals stabilize.
        let tail = &isis[isis.len().saturating_sub(8)..];
        let lo = tail.iter().min().unwrap();
        let hi = tail.iter().max().unwrap();
        assert!(hi - lo <= 1, "tail must dither by at most one step");
    }

    #[test]
    fn dpi_fixed_point_and_decay_constant() {
        let cp = CircuitParams::<f64>::default();
        cp.validate().unwrap();
        // Charge to the fixed point I_w·I_th/I_t.
        let mut i_syn = 0.0;
        for _ in 0..2000 {
            i_syn = dpi_step(i_syn, &cp, cp.i_w);
        }
        let target = cp.i_w * cp.i_th / cp.i_t;
        assert!((i_syn - target).abs() / target < 1e-9);

        // Release and fit the measured decay constant: must equal
        // C·U_T/(κ·I_t) within 1%.
        let i0 = i_syn;
        let steps = 50;
        for _ in 0..steps {
            i_syn = dpi_step(i_syn, &cp, 0.0);
        }
        let measured_tau = -(steps as f64) * cp.dt / (i_syn / i0).ln();
        let expect = cp.tau_syn();
        assert!(
            (measured_tau - expect).abs() / expect < 0.01,
            "measured {measured_tau:e}, expected {expect:e}"
        );
    }

    #[test]
    fn tau_formula_scales_with_bias_current() {
        // C = 1 pF, U_T = 25.85 mV, κ = 0.7: I_t = 10 pA → ~3.69 ms,
        // I_t = 10 nA → ~3.69 μs; exactly 1000× apart.
        let mut cp = CircuitParams::<f64>::default();
        cp.c_syn = 1e-12;
        cp.i_t = 10e-12;
        let slow = cp.tau_syn();
        assert!((slow - 3.693e-3).abs() / 3.693e-3 < 1e-3, "slow = {slow}");
        cp.i_t = 10e-9;
        let fast = cp.tau_syn();
        assert!((fast - 3.693e-6).abs() / 3.693e-6 < 1e-3, "fast = {fast}");
        assert!((slow / fast - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn circuit_neuron_fixed_point_without_adaptation() {
        let cp = CircuitParams::<f64>::default();
        let mut np = CircuitNeuronParams::<f64>::default();
        np.i_thres = f64::INFINITY; // never spike: probe the ODE only
        let mut st = CircuitNeuronState::default();
        let i_in = 150e-9;
        for _ in 0..5000 {
            neuron_circuit_step(&mut st, &cp, &np, i_in);
        }
        let expect = i_in * cp.i_th / cp.i_t;
        assert!((st.i_mem - expect).abs() / expect < 1e-9);
    }

    #[test]
    fn tiers_produce_identical_spike_trains_for_matched_parameters() {
        // Mapping: v ↔ I_mem, a ↔ I_a/I_t, I_in = R·ΣI_post (I_th = I_t
        // a power of two, so every scale factor is exact).
        let bp = NeuronParams::<f64> {
            tau_mem: 10.0,
            r_mem: 1.0,
            v_thres: 1.0,
            v_reset: 0.0,
            t_refrac: 2,
            a_inc: 0.05,
            tau_a: 200.0,
        };
        // Power-of-two biases make every scale factor exact, so the two
        // tiers run bit-identical arithmetic.
        let i_t = (2.0f64).powi(-30); // ≈ 0.93 nA
        let mut cp = CircuitParams::<f64>::default();
        cp.u_t = 0.03125;
        cp.kappa = 0.5;
        cp.i_t = i_t;
        cp.i_th = i_t;
        cp.i_w = i_t * 16.0;
        cp.dt = (2.0f64).powi(-20); // ≈ 0.95 μs
        cp.c_mem = bp.tau_mem * cp.dt * cp.kappa * cp.i_t / cp.u_t; // τ_mem = 10 steps
        let np = CircuitNeuronParams {
            i_thres: bp.v_thres,
            i_reset: bp.v_reset,
            t_refrac: bp.t_refrac,
            i_a_inc: bp.a_inc * i_t,
            tau_a_steps: bp.tau_a,
        };

        let mut b = NeuronState::default();
        let mut c = CircuitNeuronState::default();
        let mut lcg = 123456789u64;
        let mut behavioral = Vec::new();
        let mut circuit = Vec::new();
        for step in 0..10_000u32 {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (lcg >> 11) as f64 / (1u64 << 53) as f64;
            let drive = 3.0 * u;
            if lif_step(&mut b, &bp, drive) {
                behavioral.push(step);
            }
            if neuron_circuit_step(&mut c, &cp, &np, drive) {
                circuit.push(step);
            }
        }
        assert!(!behavioral.is_empty());
        assert_eq!(behavioral, circuit);
    }
}
