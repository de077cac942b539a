//! Multi-scale simulator of a domain-wall-synapse spiking neural
//! network.
//!
//! The pipeline runs bottom-up:
//!
//! 1. [`micromag`] — LLG solver with DMI and spin-Hall torque;
//!    calibrates how fast a wall moves per unit programming current.
//! 2. [`device`] — behavioral three-terminal synapse: wall position ↔
//!    conductance, programming pulses, per-event energy.
//! 3. [`dynamics`] — leaky integrate-and-fire neurons and synaptic
//!    currents, in a normalized behavioral tier and a subthreshold
//!    circuit tier.
//! 4. [`learning`] — STDP timing windows, weight-change → programming
//!    current conversion, post-triggered programming.
//! 5. [`network`] — input crossbar with lateral inhibition and
//!    homeostasis; training, class assignment and evaluation.
//! 6. [`io`] — IDX datasets, PGM weight maps, checkpoints, run config.
//!
//! Everything numeric is generic over the scalar type via
//! [`scalar::Scalar`]; the aliases below fix the default `f64`
//! precision used by the CLI and tests.

pub mod calibration;
pub mod consts;
pub mod device;
pub mod dynamics;
pub mod hash;
pub mod io;
pub mod learning;
pub mod micromag;
pub mod network;
pub mod rng;
pub mod scalar;
pub mod vec3;

pub use scalar::Scalar;

/// Default-precision aliases.
pub type Vec3f = vec3::Vec3<f64>;
pub type MaterialParams = micromag::MaterialParams<f64>;
pub type StripGeometry = micromag::StripGeometry<f64>;
pub type MagnetizationGrid = micromag::MagnetizationGrid<f64>;
pub type LlgSolver = micromag::LlgSolver<f64>;
pub type MobilityCalibration = calibration::MobilityCalibration<f64>;
pub type DeviceParams = device::DeviceParams<f64>;
pub type SynapseDevice = device::SynapseDevice<f64>;
pub type EnergyRecord = device::EnergyRecord<f64>;
pub type NeuronParams = dynamics::NeuronParams<f64>;
pub type NeuronState = dynamics::NeuronState<f64>;
pub type CircuitParams = dynamics::CircuitParams<f64>;
pub type StdpParams = learning::StdpParams<f64>;
pub type SpikingNetwork = network::SpikingNetwork<f64>;
pub type SimConfig = network::SimConfig<f64>;
pub type RunConfig = io::config::RunConfig<f64>;
