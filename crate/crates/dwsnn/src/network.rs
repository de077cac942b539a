//! Crossbar SNN: Poisson-encoded inputs drive an excitatory layer
//! through plastic domain-wall synapses; each excitatory neuron
//! triggers its inhibitory partner, which suppresses every other
//! excitatory neuron; spike-frequency adaptation keeps single neurons
//! from monopolizing the competition.

use rand::Rng;

use crate::device::{DeviceError, DeviceParams, EnergyRecord, SynapseDevice};
use crate::dynamics::{
    lif_step, synapse_step, DynamicsError, NeuronParams, NeuronState, SynapticCurrentState,
};
use crate::learning::{LearningError, Programmer, ProgrammingEvent, SpikeTraces, StdpParams};
use crate::rng::{RngFactory, STREAM_WEIGHT_INIT};
use crate::scalar::Scalar;

/// Input lines: one per pixel of a 28×28 image.
pub const N_INPUT: usize = 784;

#[derive(Debug, thiserror::Error)]
pub enum NetworkError {
    #[error("invalid network config {name}: {reason}")]
    InvalidConfig {
        name: &'static str,
        reason: &'static str,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("image has {got} pixels, expected {expected}")]
    BadImageSize { got: usize, expected: usize },
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Learning(#[from] LearningError),
}

/// Run parameters for the digit-recognition network.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig<T> {
    pub n_exc: usize,
    /// Spike probability per step for a full-intensity pixel.
    pub p_max: T,
    pub steps_per_image: u32,
    pub epochs: u32,
    pub seed: u64,
    pub exc_neuron: NeuronParams<T>,
    pub inh_neuron: NeuronParams<T>,
    /// Input → excitatory post-synaptic current time constant (steps).
    pub tau_post_exc: T,
    /// Inhibitory → excitatory current time constant (steps).
    pub tau_post_inh: T,
    /// Excitatory → inhibitory trigger current time constant (steps).
    pub tau_post_trigger: T,
    /// Fixed inhibitory weight (current injected per inhibitory spike).
    pub inh_weight: T,
    /// Fixed excitatory → inhibitory trigger strength.
    pub trigger_weight: T,
    /// Lateral inhibition on/off (off = ablation run).
    pub inhibition_enabled: bool,
    /// Clear pre/post spike traces between images.
    pub reset_traces_between_images: bool,
    pub stdp: StdpParams<T>,
    pub device: DeviceParams<T>,
}

impl<T: Scalar> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            n_exc: 100,
            p_max: T::of(0.06375),
            steps_per_image: 350,
            epochs: 1,
            seed: 1,
            exc_neuron: NeuronParams {
                tau_mem: T::of(10.0),
                r_mem: T::of(0.1),
                v_thres: T::one(),
                v_reset: T::zero(),
                t_refrac: 2,
                a_inc: T::of(0.25),
                tau_a: T::of(3500.0),
            },
            inh_neuron: NeuronParams {
                tau_mem: T::of(10.0),
                r_mem: T::one(),
                v_thres: T::one(),
                v_reset: T::zero(),
                t_refrac: 1,
                a_inc: T::zero(),
                tau_a: T::of(100.0),
            },
            tau_post_exc: T::one(),
            tau_post_inh: T::of(2.0),
            tau_post_trigger: T::of(2.0),
            inh_weight: T::of(6.0),
            trigger_weight: T::of(15.0),
            inhibition_enabled: true,
            reset_traces_between_images: true,
            stdp: StdpParams::default(),
            device: DeviceParams::default(),
        }
    }
}

impl<T: Scalar> SimConfig<T> {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.n_exc == 0 {
            return Err(NetworkError::InvalidConfig {
                name: "n_exc",
                reason: "must be >= 1",
            });
        }
        if !(self.p_max > T::zero() && self.p_max <= T::one()) {
            return Err(NetworkError::InvalidConfig {
                name: "p_max",
                reason: "must lie in (0, 1]",
            });
        }
        if self.steps_per_image == 0 {
            return Err(NetworkError::InvalidConfig {
                name: "steps_per_image",
                reason: "must be >= 1",
            });
        }
        for (name, v) in [
            ("tau_post_exc", self.tau_post_exc),
            ("tau_post_inh", self.tau_post_inh),
            ("tau_post_trigger", self.tau_post_trigger),
        ] {
            if !(v > T::zero()) {
                return Err(NetworkError::InvalidConfig {
                    name,
                    reason: "must be > 0",
                });
            }
        }
        if self.inh_weight < T::zero() || self.trigger_weight < T::zero() {
            return Err(NetworkError::InvalidConfig {
                name: "inh_weight/trigger_weight",
                reason: "must be >= 0",
            });
        }
        self.exc_neuron.validate()?;
        self.inh_neuron.validate()?;
        self.stdp.validate()?;
        self.device.validate()?;
        Ok(())
    }
}

/// Fill `out` with one step of Poisson-encoded spikes: pixel v fires
/// with probability (v/255)·p_max. Zero pixels never fire and consume
/// no randomness.
pub fn poisson_encode_step<T: Scalar>(
    pixels: &[u8],
    p_max: T,
    rng: &mut impl Rng,
    out: &mut [bool],
) {
    debug_assert_eq!(pixels.len(), out.len());
    let p_max = p_max.as_f64();
    for (i, &v) in pixels.iter().enumerate() {
        out[i] = if v == 0 {
            false
        } else {
            let p = (f64::from(v) / 255.0) * p_max;
            rng.gen::<f64>() < p
        };
    }
}

/// Presentation mode: `Train` runs STDP and lets adaptation accumulate
/// across images; `Frozen` disables programming and restores the
/// adaptation state afterwards, so frozen presentations are
/// order-independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Train,
    Frozen,
}

/// Per-step observer payload for trace logging.
pub struct StepTrace<'a, T> {
    pub step: u64,
    pub exc: &'a [NeuronState<T>],
    pub exc_spikes: &'a [usize],
    pub inh_spikes: &'a [usize],
}

/// Outcome of one image presentation.
#[derive(Clone, Debug)]
pub struct ImageOutcome {
    pub exc_spike_counts: Vec<u32>,
    pub total_exc_spikes: u64,
    pub programming_events: u64,
    pub steps: u32,
}

/// Per-epoch training statistics.
#[derive(Clone, Debug)]
pub struct EpochStats {
    pub epoch: u32,
    pub images: usize,
    pub exc_spikes: u64,
    pub programming_events: u64,
    pub e_joule_total: f64,
    pub e_supply_total: f64,
    /// Mean |Δweight| across the crossbar since the epoch started.
    pub mean_abs_weight_drift: f64,
}

/// Labels assigned to excitatory neurons from their strongest response.
#[derive(Clone, Debug)]
pub struct ClassAssignment {
    /// Per-neuron label; None for neurons silent over the whole pass.
    pub labels: Vec<Option<u8>>,
    /// Per-neuron spike counts accumulated per label.
    pub histograms: Vec<[u64; 10]>,
}

impl ClassAssignment {
    pub fn assigned_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }
}

/// Evaluation result over a labeled set.
#[derive(Clone, Debug)]
pub struct EvalReport {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// confusion[true_label][predicted_label]
    pub confusion: [[u64; 10]; 10],
    /// True when no image produced a single vote (all-silent network):
    /// accuracy is chance level by construction.
    pub degenerate: bool,
}

/// The crossbar network and all of its running state.
pub struct SpikingNetwork<T> {
    cfg: SimConfig<T>,
    programmer: Programmer<T>,
    /// Plastic synapses, line-major: [line × n_exc + neuron].
    synapses: Vec<SynapseDevice<T>>,
    exc: Vec<NeuronState<T>>,
    inh: Vec<NeuronState<T>>,
    i_input: Vec<SynapticCurrentState<T>>,
    i_inhibition: Vec<SynapticCurrentState<T>>,
    i_trigger: Vec<SynapticCurrentState<T>>,
    /// Inhibitory spikes from the previous step (applied this step).
    inh_spiked_prev: Vec<bool>,
    traces: SpikeTraces,
    energy: EnergyRecord<T>,
    rng: RngFactory,
    images_seen: u64,
    global_step: u64,
    // scratch buffers
    spike_buf: Vec<bool>,
    drive_buf: Vec<T>,
    active_lines: Vec<usize>,
    exc_spike_buf: Vec<usize>,
    inh_spike_buf: Vec<usize>,
    events_buf: Vec<ProgrammingEvent<T>>,
}

impl<T: Scalar> SpikingNetwork<T> {
    /// Build the topology with uniform-random initial wall positions.
    pub fn new(cfg: SimConfig<T>) -> Result<Self, NetworkError> {
        cfg.validate()?;
        let rng = RngFactory::new(cfg.seed);
        let mut init = rng.stream(STREAM_WEIGHT_INIT);
        let n = cfg.n_exc;
        let mut synapses = Vec::with_capacity(N_INPUT * n);
        for _ in 0..N_INPUT * n {
            let w = T::of(init.gen::<f64>());
            synapses.push(SynapseDevice::from_weight(w, &cfg.device));
        }
        Ok(Self {
            programmer: Programmer::new(cfg.stdp, cfg.device),
            synapses,
            exc: vec![NeuronState::default(); n],
            inh: vec![NeuronState::default(); n],
            i_input: vec![SynapticCurrentState::new(cfg.tau_post_exc); n],
            i_inhibition: vec![SynapticCurrentState::new(cfg.tau_post_inh); n],
            i_trigger: vec![SynapticCurrentState::new(cfg.tau_post_trigger); n],
            inh_spiked_prev: vec![false; n],
            traces: SpikeTraces::new(N_INPUT, n),
            energy: EnergyRecord::totals_only(),
            rng,
            images_seen: 0,
            global_step: 0,
            spike_buf: vec![false; N_INPUT],
            drive_buf: vec![T::zero(); n],
            active_lines: Vec::with_capacity(N_INPUT),
            exc_spike_buf: Vec::with_capacity(n),
            inh_spike_buf: Vec::with_capacity(n),
            events_buf: Vec::new(),
            cfg,
        })
    }

    pub fn config(&self) -> &SimConfig<T> {
        &self.cfg
    }

    pub fn energy(&self) -> &EnergyRecord<T> {
        &self.energy
    }

    /// Switch energy accounting to keep per-event entries (tests only;
    /// training-scale runs stream events through the observer instead).
    pub fn keep_energy_entries(&mut self) {
        self.energy = EnergyRecord::with_entries();
    }

    pub fn images_seen(&self) -> u64 {
        self.images_seen
    }

    /// Normalized weights, line-major.
    pub fn weights(&self) -> Vec<T> {
        self.synapses
            .iter()
            .map(|s| s.weight(&self.cfg.device))
            .collect()
    }

    /// Wall positions in meters, line-major.
    pub fn positions(&self) -> Vec<T> {
        self.synapses.iter().map(|s| s.position()).collect()
    }

    /// Exc-layer adaptation variables.
    pub fn adaptations(&self) -> Vec<T> {
        self.exc.iter().map(|n| n.a).collect()
    }

    /// Restore persisted state from a checkpoint.
    pub fn restore(
        &mut self,
        positions: &[T],
        adaptations: &[T],
        images_seen: u64,
    ) -> Result<(), NetworkError> {
        if positions.len() != self.synapses.len() {
            return Err(NetworkError::InvalidConfig {
                name: "positions",
                reason: "length mismatch with the crossbar",
            });
        }
        if adaptations.len() != self.exc.len() {
            return Err(NetworkError::InvalidConfig {
                name: "adaptations",
                reason: "length mismatch with the excitatory layer",
            });
        }
        for (dev, &x) in self.synapses.iter_mut().zip(positions) {
            *dev = SynapseDevice::new(x, &self.cfg.device);
        }
        for (n, &a) in self.exc.iter_mut().zip(adaptations) {
            n.a = a;
        }
        self.images_seen = images_seen;
        Ok(())
    }

    /// Weight of synapse (line, neuron).
    pub fn weight_of(&self, line: usize, neuron: usize) -> T {
        self.synapses[line * self.cfg.n_exc + neuron].weight(&self.cfg.device)
    }

    /// Reset fast state between images; adaptation persists (it is the
    /// cross-pattern homeostasis variable).
    fn reset_between_images(&mut self) {
        for n in &mut self.exc {
            n.reset_fast(&self.cfg.exc_neuron);
        }
        for n in &mut self.inh {
            n.reset_fast(&self.cfg.inh_neuron);
        }
        for s in &mut self.i_input {
            s.i_post = T::zero();
        }
        for s in &mut self.i_inhibition {
            s.i_post = T::zero();
        }
        for s in &mut self.i_trigger {
            s.i_post = T::zero();
        }
        self.inh_spiked_prev.fill(false);
        if self.cfg.reset_traces_between_images {
            self.traces.clear();
        }
    }

    /// One global timestep. Input spikes must be N_INPUT long.
    /// Spiking neuron indices land in the internal spike buffers.
    fn step(&mut self, learning: bool) -> Result<(), NetworkError> {
        let n = self.cfg.n_exc;
        let now = self.global_step;
        let inv_l = T::one() / self.cfg.device.l_mtj;

        // (1) input spikes drive each exc neuron's synaptic current
        self.active_lines.clear();
        for (line, &fired) in self.spike_buf.iter().enumerate() {
            if fired {
                self.active_lines.push(line);
            }
        }
        self.drive_buf.fill(T::zero());
        for &line in &self.active_lines {
            let row = &self.synapses[line * n..(line + 1) * n];
            for (j, dev) in row.iter().enumerate() {
                self.drive_buf[j] = self.drive_buf[j] + dev.position() * inv_l;
            }
        }
        for (j, s) in self.i_input.iter_mut().enumerate() {
            synapse_step(s, self.drive_buf[j]);
        }

        // (2) inhibitory currents from last step's inh spikes; inh
        // neuron k reaches every exc neuron except k
        if self.cfg.inhibition_enabled {
            let total_prev = self.inh_spiked_prev.iter().filter(|&&s| s).count();
            for (j, s) in self.i_inhibition.iter_mut().enumerate() {
                let sources = total_prev - usize::from(self.inh_spiked_prev[j]);
                synapse_step(s, self.cfg.inh_weight * T::of(sources as f64));
            }
        }

        // (3) excitatory LIF updates
        self.exc_spike_buf.clear();
        for j in 0..n {
            let i_total = self.i_input[j].i_post - self.i_inhibition[j].i_post;
            if lif_step(&mut self.exc[j], &self.cfg.exc_neuron, i_total) {
                self.exc_spike_buf.push(j);
            }
        }

        // (4) exc spikes trigger the paired inh neurons
        self.inh_spike_buf.clear();
        if self.cfg.inhibition_enabled {
            for j in 0..n {
                let fired = self.exc_spike_buf.binary_search(&j).is_ok();
                let drive = if fired {
                    self.cfg.trigger_weight
                } else {
                    T::zero()
                };
                synapse_step(&mut self.i_trigger[j], drive);
                if lif_step(&mut self.inh[j], &self.cfg.inh_neuron, self.i_trigger[j].i_post) {
                    self.inh_spike_buf.push(j);
                }
            }
            self.inh_spiked_prev.fill(false);
            for &j in &self.inh_spike_buf {
                self.inh_spiked_prev[j] = true;
            }
        }

        // (5) plasticity: pre traces first (depression against earlier
        // posts), then post-triggered potentiation; same-step pairs are
        // Δt = 0 ties and do nothing
        if learning {
            for idx in 0..self.active_lines.len() {
                let line = self.active_lines[idx];
                self.programmer.record_pre_spike(
                    line,
                    now,
                    &mut self.traces,
                    &mut self.synapses,
                    n,
                    &mut self.energy,
                    &mut self.events_buf,
                )?;
            }
            for idx in 0..self.exc_spike_buf.len() {
                let neuron = self.exc_spike_buf[idx];
                self.programmer.on_post_spike(
                    neuron,
                    now,
                    &mut self.traces,
                    &mut self.synapses,
                    n,
                    &mut self.energy,
                    &mut self.events_buf,
                )?;
            }
        }

        self.global_step += 1;
        Ok(())
    }

    /// Present one image for `steps_per_image` steps.
    pub fn present_image(
        &mut self,
        pixels: &[u8],
        mode: RunMode,
        mut on_event: Option<&mut dyn FnMut(&ProgrammingEvent<T>)>,
        mut on_step: Option<&mut dyn FnMut(StepTrace<'_, T>)>,
    ) -> Result<ImageOutcome, NetworkError> {
        if pixels.len() != N_INPUT {
            return Err(NetworkError::BadImageSize {
                got: pixels.len(),
                expected: N_INPUT,
            });
        }
        let learning = mode == RunMode::Train;
        let saved_adaptation: Option<Vec<T>> = if learning {
            None
        } else {
            Some(self.exc.iter().map(|s| s.a).collect())
        };

        let mut rng = self.rng.image_stream(self.images_seen);
        let mut counts = vec![0u32; self.cfg.n_exc];
        let mut events = 0u64;
        for _ in 0..self.cfg.steps_per_image {
            poisson_encode_step(pixels, self.cfg.p_max, &mut rng, &mut self.spike_buf);
            self.events_buf.clear();
            self.step(learning)?;
            for &j in &self.exc_spike_buf {
                counts[j] += 1;
            }
            events += self.events_buf.len() as u64;
            if let Some(sink) = on_event.as_deref_mut() {
                for ev in &self.events_buf {
                    sink(ev);
                }
            }
            if let Some(sink) = on_step.as_deref_mut() {
                sink(StepTrace {
                    step: self.global_step - 1,
                    exc: &self.exc,
                    exc_spikes: &self.exc_spike_buf,
                    inh_spikes: &self.inh_spike_buf,
                });
            }
        }
        self.images_seen += 1;
        self.reset_between_images();
        if let Some(saved) = saved_adaptation {
            for (n, a) in self.exc.iter_mut().zip(saved) {
                n.a = a;
            }
        }
        let total = counts.iter().map(|&c| u64::from(c)).sum();
        Ok(ImageOutcome {
            exc_spike_counts: counts,
            total_exc_spikes: total,
            programming_events: events,
            steps: self.cfg.steps_per_image,
        })
    }

    /// Train over the dataset for the configured number of epochs.
    pub fn train(
        &mut self,
        images: &[&[u8]],
        mut on_event: Option<&mut dyn FnMut(&ProgrammingEvent<T>)>,
    ) -> Result<Vec<EpochStats>, NetworkError> {
        if images.is_empty() {
            return Err(NetworkError::EmptyDataset);
        }
        let mut stats = Vec::with_capacity(self.cfg.epochs as usize);
        for epoch in 0..self.cfg.epochs {
            let w_start = self.weights();
            let mut spikes = 0u64;
            let mut events = 0u64;
            for &img in images {
                let outcome = match &mut on_event {
                    Some(f) => self.present_image(img, RunMode::Train, Some(&mut **f), None)?,
                    None => self.present_image(img, RunMode::Train, None, None)?,
                };
                spikes += outcome.total_exc_spikes;
                events += outcome.programming_events;
            }
            let w_end = self.weights();
            let drift = w_start
                .iter()
                .zip(&w_end)
                .map(|(a, b)| (*b - *a).abs().as_f64())
                .sum::<f64>()
                / w_start.len() as f64;
            stats.push(EpochStats {
                epoch,
                images: images.len(),
                exc_spikes: spikes,
                programming_events: events,
                e_joule_total: self.energy.joule_total.as_f64(),
                e_supply_total: self.energy.supply_total.as_f64(),
                mean_abs_weight_drift: drift,
            });
        }
        Ok(stats)
    }

    /// Assign a label to each neuron from its strongest cumulative
    /// response over a labeled pass with learning frozen.
    pub fn assign_classes(
        &mut self,
        images: &[&[u8]],
        labels: &[u8],
    ) -> Result<ClassAssignment, NetworkError> {
        if images.is_empty() {
            return Err(NetworkError::EmptyDataset);
        }
        let mut histograms = vec![[0u64; 10]; self.cfg.n_exc];
        for (&img, &label) in images.iter().zip(labels) {
            let outcome = self.present_image(img, RunMode::Frozen, None, None)?;
            for (j, &c) in outcome.exc_spike_counts.iter().enumerate() {
                histograms[j][label as usize] += u64::from(c);
            }
        }
        let labels = histograms
            .iter()
            .map(|h| {
                let total: u64 = h.iter().sum();
                if total == 0 {
                    None
                } else {
                    // argmax with deterministic lowest-label tie-break
                    let mut best = 0usize;
                    for (d, &c) in h.iter().enumerate() {
                        if c > h[best] {
                            best = d;
                        }
                    }
                    Some(best as u8)
                }
            })
            .collect();
        Ok(ClassAssignment { labels, histograms })
    }

    /// Classify a labeled set by per-label spike votes; learning frozen.
    pub fn evaluate(
        &mut self,
        assignment: &ClassAssignment,
        images: &[&[u8]],
        labels: &[u8],
    ) -> Result<EvalReport, NetworkError> {
        if images.is_empty() {
            return Err(NetworkError::EmptyDataset);
        }
        let mut correct = 0usize;
        let mut confusion = [[0u64; 10]; 10];
        let mut any_vote = false;
        for (&img, &label) in images.iter().zip(labels) {
            let outcome = self.present_image(img, RunMode::Frozen, None, None)?;
            let mut votes = [0u64; 10];
            for (j, &c) in outcome.exc_spike_counts.iter().enumerate() {
                if let Some(l) = assignment.labels[j] {
                    votes[l as usize] += u64::from(c);
                }
            }
            let total_votes: u64 = votes.iter().sum();
            let mut predicted = 0usize;
            for (d, &v) in votes.iter().enumerate() {
                if v > votes[predicted] {
                    predicted = d;
                }
            }
            if total_votes > 0 {
                any_vote = true;
            }
            confusion[label as usize][predicted] += 1;
            if predicted == label as usize {
                correct += 1;
            }
        }
        Ok(EvalReport {
            accuracy: correct as f64 / images.len() as f64,
            correct,
            total: images.len(),
            confusion,
            degenerate: !any_vote,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> SimConfig<f64> {
        let mut cfg = SimConfig::default();
        cfg.n_exc = 10;
        cfg.steps_per_image = 50;
        cfg.seed = 7;
        cfg
    }

    #[test]
    fn poisson_extremes() {
        let mut rng = RngFactory::new(3).stream(0);
        let pixels = [0u8, 255];
        let mut out = [false; 2];
        let mut ones = 0u32;
        let trials = 20_000;
        for _ in 0..trials {
            poisson_encode_step(&pixels[..], 0.06375f64, &mut rng, &mut out);
            assert!(!out[0], "zero pixel must never spike");
            ones += u32::from(out[1]);
        }
        // Binomial 3σ window around p_max.
        let p = 0.06375;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let rate = f64::from(ones) / trials as f64;
        assert!((rate - p).abs() < 3.0 * sigma, "rate = {rate}");
    }

    #[test]
    fn poisson_mid_intensity_rate() {
        let mut rng = RngFactory::new(11).stream(5);
        let pixels = [128u8];
        let mut out = [false; 1];
        let trials = 1_000_000;
        let mut ones = 0u64;
        for _ in 0..trials {
            poisson_encode_step(&pixels[..], 0.06375f64, &mut rng, &mut out);
            ones += u64::from(out[0]);
        }
        let p: f64 = (128.0 / 255.0) * 0.06375; // ≈ 0.03200
        assert!((p - 0.032).abs() < 1e-4);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let rate = ones as f64 / trials as f64;
        assert!((rate - p).abs() < 3.0 * sigma, "rate = {rate}");
    }

    #[test]
    fn build_initializes_uniform_weights() {
        let mut cfg = SimConfig::<f64>::default();
        cfg.n_exc = 100;
        let net = SpikingNetwork::new(cfg).unwrap();
        let w = net.weights();
        assert_eq!(w.len(), 78_400);
        let mean: f64 = w.iter().sum::<f64>() / w.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean = {mean}");
        assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn all_zero_input_stays_silent() {
        let mut net = SpikingNetwork::new(small_cfg()).unwrap();
        let img = [0u8; N_INPUT];
        let outcome = net
            .present_image(&img, RunMode::Train, None, None)
            .unwrap();
        assert_eq!(outcome.total_exc_spikes, 0);
        assert_eq!(outcome.programming_events, 0);
    }

    #[test]
    fn driven_network_spikes_and_programs() {
        let mut net = SpikingNetwork::new(small_cfg()).unwrap();
        let img = [200u8; N_INPUT];
        let mut seen = 0u64;
        let mut sink = |_: &ProgrammingEvent<f64>| seen += 1;
        let outcome = net
            .present_image(&img, RunMode::Train, Some(&mut sink), None)
            .unwrap();
        assert!(outcome.total_exc_spikes > 0, "drive must elicit spikes");
        assert!(outcome.programming_events > 0);
        assert_eq!(outcome.programming_events, seen);
        assert_eq!(net.energy().event_count, outcome.programming_events);
    }

    #[test]
    fn frozen_mode_never_programs_and_restores_adaptation() {
        let mut net = SpikingNetwork::new(small_cfg()).unwrap();
        let img = [200u8; N_INPUT];
        net.present_image(&img, RunMode::Train, None, None).unwrap();
        let w = net.weights();
        let a = net.adaptations();
        let outcome = net
            .present_image(&img, RunMode::Frozen, None, None)
            .unwrap();
        assert!(outcome.total_exc_spikes > 0);
        assert_eq!(outcome.programming_events, 0);
        assert_eq!(net.weights(), w);
        assert_eq!(net.adaptations(), a);
    }

    #[test]
    fn weights_stay_in_unit_interval_through_training() {
        let mut cfg = small_cfg();
        cfg.epochs = 2;
        let mut net = SpikingNetwork::new(cfg).unwrap();
        let img_a = [180u8; N_INPUT];
        let mut img_b = [0u8; N_INPUT];
        img_b[..392].fill(220);
        let images: Vec<&[u8]> = vec![&img_a, &img_b, &img_a, &img_b];
        net.train(&images, None).unwrap();
        assert!(net
            .weights()
            .iter()
            .all(|&w| (0.0..=1.0).contains(&w)));
    }

    #[test]
    fn inhibition_reduces_simultaneous_spiking() {
        let img = [150u8; N_INPUT];
        let run = |inhibition: bool| -> f64 {
            let mut cfg = small_cfg();
            cfg.inhibition_enabled = inhibition;
            let mut net = SpikingNetwork::new(cfg).unwrap();
            let mut total = 0u64;
            let mut steps = 0u64;
            for _ in 0..5 {
                let o = net.present_image(&img, RunMode::Train, None, None).unwrap();
                total += o.total_exc_spikes;
                steps += u64::from(o.steps);
            }
            total as f64 / steps as f64
        };
        let with = run(true);
        let without = run(false);
        assert!(
            with < without,
            "inhibition must reduce mean simultaneous spikes: {with} vs {without}"
        );
    }

    #[test]
    fn reruns_are_bit_identical() {
        let run = || {
            let mut net = SpikingNetwork::new(small_cfg()).unwrap();
            let img = [120u8; N_INPUT];
            let mut spikes = Vec::new();
            for _ in 0..3 {
                let o = net.present_image(&img, RunMode::Train, None, None).unwrap();
                spikes.push(o.exc_spike_counts);
            }
            (spikes, net.weights())
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn assignment_prefers_strongest_response_and_flags_silence() {
        let mut net = SpikingNetwork::new(small_cfg()).unwrap();
        let bright = [200u8; N_INPUT];
        let dark = [0u8; N_INPUT];
        let images: Vec<&[u8]> = vec![&bright, &dark];
        let labels = [3u8, 7u8];
        let assignment = net.assign_classes(&images, &labels).unwrap();
        for (j, lab) in assignment.labels.iter().enumerate() {
            if let Some(l) = lab {
                assert_eq!(*l, 3, "neuron {j}: dark image cannot win");
            }
        }
        // All-dark pass: every neuron silent → all None, eval degenerate.
        let mut net2 = SpikingNetwork::new(small_cfg()).unwrap();
        let dark_images: Vec<&[u8]> = vec![&dark, &dark];
        let a2 = net2.assign_classes(&dark_images, &labels).unwrap();
        assert_eq!(a2.assigned_count(), 0);
        let report = net2.evaluate(&a2, &dark_images, &labels).unwrap();
        assert!(report.degenerate);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let mut net = SpikingNetwork::new(small_cfg()).unwrap();
        let images: Vec<&[u8]> = Vec::new();
        assert!(matches!(
            net.train(&images, None),
            Err(NetworkError::EmptyDataset)
        ));
    }
}
