//! Run configuration: line-oriented sections of `key = value` pairs.
//!
//! Unknown sections or keys are errors (fail fast); omitted keys keep
//! their defaults. `#` starts a comment. The canonical serialization of
//! the effective values is hashed into the config fingerprint that
//! checkpoints are bound to; the seed is deliberately excluded (it is
//! run identity, not architecture, and checkpoints carry their own).

use crate::hash::fnv64;
use crate::micromag::{MaterialParams, StripGeometry};
use crate::network::SimConfig;
use crate::scalar::Scalar;
use crate::dynamics::CircuitParams;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config line {line_no}: {reason}")]
    Syntax { line_no: usize, reason: &'static str },
    #[error("config line {line_no}: unknown section [{name}]")]
    UnknownSection { line_no: usize, name: String },
    #[error("config line {line_no}: unknown key {key:?} in section [{section}]")]
    UnknownKey {
        line_no: usize,
        section: String,
        key: String,
    },
    #[error("config line {line_no}: cannot parse value for {key:?}")]
    BadValue { line_no: usize, key: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Everything a run needs, across all subsystems.
#[derive(Clone, Copy, Debug)]
pub struct RunConfig<T> {
    pub sim: SimConfig<T>,
    pub material: MaterialParams<T>,
    pub geometry: StripGeometry<T>,
    pub circuit: CircuitParams<T>,
    /// Training images consumed per epoch (0 = whole file).
    pub train_count: usize,
    /// Test images consumed (0 = whole file).
    pub test_count: usize,
}

impl<T: Scalar> Default for RunConfig<T> {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            material: MaterialParams::default(),
            geometry: StripGeometry::default(),
            circuit: CircuitParams::default(),
            train_count: 5000,
            test_count: 1000,
        }
    }
}

fn parse_value<V: std::str::FromStr>(
    value: &str,
    key: &str,
    line_no: usize,
) -> Result<V, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        line_no,
        key: key.to_string(),
    })
}

fn parse_scalar<T: Scalar>(value: &str, key: &str, line_no: usize) -> Result<T, ConfigError> {
    let v: f64 = parse_value(value, key, line_no)?;
    if !v.is_finite() {
        return Err(ConfigError::BadValue {
            line_no,
            key: key.to_string(),
        });
    }
    Ok(T::of(v))
}

impl<T: Scalar> RunConfig<T> {
    /// Parse a config file over the defaults, then validate everything.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sim
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.material
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.geometry
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.circuit
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    fn apply(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or(ConfigError::Syntax {
                        line_no,
                        reason: "unterminated section header",
                    })?
                    .trim();
                section = name.to_string();
                if !matches!(
                    section.as_str(),
                    "network"
                        | "neuron_exc"
                        | "neuron_inh"
                        | "stdp"
                        | "device"
                        | "material"
                        | "geometry"
                        | "circuit"
                        | "data"
                ) {
                    return Err(ConfigError::UnknownSection {
                        line_no,
                        name: section,
                    });
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax {
                line_no,
                reason: "expected `key = value`",
            })?;
            let key = key.trim();
            self.apply_key(&section, key, value, line_no)?;
        }
        Ok(())
    }

    fn apply_key(
        &mut self,
        section: &str,
        key: &str,
        value: &str,
        line_no: usize,
    ) -> Result<(), ConfigError> {
        let unknown = || ConfigError::UnknownKey {
            line_no,
            section: section.to_string(),
            key: key.to_string(),
        };
        match section {
            "network" => match key {
                "n_exc" => self.sim.n_exc = parse_value(value, key, line_no)?,
                "p_max" => self.sim.p_max = parse_scalar(value, key, line_no)?,
                "steps_per_image" => {
                    self.sim.steps_per_image = parse_value(value, key, line_no)?
                }
                "epochs" => self.sim.epochs = parse_value(value, key, line_no)?,
                "seed" => self.sim.seed = parse_value(value, key, line_no)?,
                "inh_weight" => self.sim.inh_weight = parse_scalar(value, key, line_no)?,
                "trigger_weight" => {
                    self.sim.trigger_weight = parse_scalar(value, key, line_no)?
                }
                "inhibition_enabled" => {
                    self.sim.inhibition_enabled = parse_value(value, key, line_no)?
                }
                "reset_traces_between_images" => {
                    self.sim.reset_traces_between_images = parse_value(value, key, line_no)?
                }
                "tau_post_exc" => self.sim.tau_post_exc = parse_scalar(value, key, line_no)?,
                "tau_post_inh" => self.sim.tau_post_inh = parse_scalar(value, key, line_no)?,
                "tau_post_trigger" => {
                    self.sim.tau_post_trigger = parse_scalar(value, key, line_no)?
                }
                _ => return Err(unknown()),
            },
            "neuron_exc" | "neuron_inh" => {
                let n = if section == "neuron_exc" {
                    &mut self.sim.exc_neuron
                } else {
                    &mut self.sim.inh_neuron
                };
                match key {
                    "tau_mem" => n.tau_mem = parse_scalar(value, key, line_no)?,
                    "r_mem" => n.r_mem = parse_scalar(value, key, line_no)?,
                    "v_thres" => n.v_thres = parse_scalar(value, key, line_no)?,
                    "v_reset" => n.v_reset = parse_scalar(value, key, line_no)?,
                    "t_refrac" => n.t_refrac = parse_value(value, key, line_no)?,
                    "a_inc" => n.a_inc = parse_scalar(value, key, line_no)?,
                    "tau_a" => n.tau_a = parse_scalar(value, key, line_no)?,
                    _ => return Err(unknown()),
                }
            }
            "stdp" => match key {
                "a_plus" => self.sim.stdp.a_plus = parse_scalar(value, key, line_no)?,
                "a_minus" => self.sim.stdp.a_minus = parse_scalar(value, key, line_no)?,
                "tau_plus" => self.sim.stdp.tau_plus = parse_scalar(value, key, line_no)?,
                "tau_minus" => self.sim.stdp.tau_minus = parse_scalar(value, key, line_no)?,
                "window_len_pos" => {
                    self.sim.stdp.window_len_pos = parse_value(value, key, line_no)?
                }
                "window_len_neg" => {
                    self.sim.stdp.window_len_neg = parse_value(value, key, line_no)?
                }
                _ => return Err(unknown()),
            },
            "device" => match key {
                "l_mtj" => self.sim.device.l_mtj = parse_scalar(value, key, line_no)?,
                "g_p" => self.sim.device.g_p = parse_scalar(value, key, line_no)?,
                "g_ap" => self.sim.device.g_ap = parse_scalar(value, key, line_no)?,
                "g_dw" => self.sim.device.g_dw = parse_scalar(value, key, line_no)?,
                "r_hm" => self.sim.device.r_hm = parse_scalar(value, key, line_no)?,
                "t_pulse" => self.sim.device.t_pulse = parse_scalar(value, key, line_no)?,
                "i_max" => self.sim.device.i_max = parse_scalar(value, key, line_no)?,
                "i_ceiling" => self.sim.device.i_ceiling = parse_scalar(value, key, line_no)?,
                "v_dd" => self.sim.device.v_dd = parse_scalar(value, key, line_no)?,
                _ => return Err(unknown()),
            },
            "material" => match key {
                "ms" => self.material.ms = parse_scalar(value, key, line_no)?,
                "a_ex" => self.material.a_ex = parse_scalar(value, key, line_no)?,
                "ku" => self.material.ku = parse_scalar(value, key, line_no)?,
                "d_dmi" => self.material.d_dmi = parse_scalar(value, key, line_no)?,
                "alpha" => self.material.alpha = parse_scalar(value, key, line_no)?,
                "theta_sh" => self.material.theta_sh = parse_scalar(value, key, line_no)?,
                "t_fm" => self.material.t_fm = parse_scalar(value, key, line_no)?,
                "t_hm" => self.material.t_hm = parse_scalar(value, key, line_no)?,
                _ => return Err(unknown()),
            },
            "geometry" => match key {
                "length" => self.geometry.length = parse_scalar(value, key, line_no)?,
                "width" => self.geometry.width = parse_scalar(value, key, line_no)?,
                "cell_x" => self.geometry.cell_x = parse_scalar(value, key, line_no)?,
                "cell_y" => self.geometry.cell_y = parse_scalar(value, key, line_no)?,
                _ => return Err(unknown()),
            },
            "circuit" => match key {
                "u_t" => self.circuit.u_t = parse_scalar(value, key, line_no)?,
                "kappa" => self.circuit.kappa = parse_scalar(value, key, line_no)?,
                "c_p" => self.circuit.c_p = parse_scalar(value, key, line_no)?,
                "c_syn" => self.circuit.c_syn = parse_scalar(value, key, line_no)?,
                "c_mem" => self.circuit.c_mem = parse_scalar(value, key, line_no)?,
                "i_t" => self.circuit.i_t = parse_scalar(value, key, line_no)?,
                "i_th" => self.circuit.i_th = parse_scalar(value, key, line_no)?,
                "i_w" => self.circuit.i_w = parse_scalar(value, key, line_no)?,
                "i_0" => self.circuit.i_0 = parse_scalar(value, key, line_no)?,
                "v_w" => self.circuit.v_w = parse_scalar(value, key, line_no)?,
                "v_dd" => self.circuit.v_dd = parse_scalar(value, key, line_no)?,
                "dt" => self.circuit.dt = parse_scalar(value, key, line_no)?,
                _ => return Err(unknown()),
            },
            "data" => match key {
                "train_count" => self.train_count = parse_value(value, key, line_no)?,
                "test_count" => self.test_count = parse_value(value, key, line_no)?,
                _ => return Err(unknown()),
            },
            "" => {
                return Err(ConfigError::Syntax {
                    line_no,
                    reason: "key before any [section]",
                })
            }
            _ => unreachable!("sections validated on entry"),
        }
        Ok(())
    }

    /// Canonical serialization of every effective value except the
    /// seed, in fixed order.
    pub fn canonical_string(&self) -> String {
        let s = &self.sim;
        let e = &s.exc_neuron;
        let i = &s.inh_neuron;
        let p = &s.stdp;
        let d = &s.device;
        let m = &self.material;
        let g = &self.geometry;
        let c = &self.circuit;
        format!(
            "network:n_exc={};p_max={:e};steps={};epochs={};inh_w={:e};trig_w={:e};inh_on={};reset_traces={};tpe={:e};tpi={:e};tpt={:e}|\
             exc:tau={:e};r={:e};vt={:e};vr={:e};refrac={};ainc={:e};taua={:e}|\
             inh:tau={:e};r={:e};vt={:e};vr={:e};refrac={};ainc={:e};taua={:e}|\
             stdp:ap={:e};am={:e};tp={:e};tm={:e};wp={};wn={}|\
             device:l={:e};gp={:e};gap={:e};gdw={:e};rhm={:e};tpulse={:e};imax={:e};iceil={:e};vdd={:e}|\
             material:ms={:e};a={:e};ku={:e};d={:e};alpha={:e};theta={:e};tfm={:e};thm={:e}|\
             geometry:l={:e};w={:e};cx={:e};cy={:e}|\
             circuit:ut={:e};k={:e};cp={:e};cs={:e};cm={:e};it={:e};ith={:e};iw={:e};i0={:e};vw={:e};vdd={:e};dt={:e}|\
             data:train={};test={}",
            s.n_exc, s.p_max.as_f64(), s.steps_per_image, s.epochs,
            s.inh_weight.as_f64(), s.trigger_weight.as_f64(),
            s.inhibition_enabled, s.reset_traces_between_images,
            s.tau_post_exc.as_f64(), s.tau_post_inh.as_f64(), s.tau_post_trigger.as_f64(),
            e.tau_mem.as_f64(), e.r_mem.as_f64(), e.v_thres.as_f64(), e.v_reset.as_f64(),
            e.t_refrac, e.a_inc.as_f64(), e.tau_a.as_f64(),
            i.tau_mem.as_f64(), i.r_mem.as_f64(), i.v_thres.as_f64(), i.v_reset.as_f64(),
            i.t_refrac, i.a_inc.as_f64(), i.tau_a.as_f64(),
            p.a_plus.as_f64(), p.a_minus.as_f64(), p.tau_plus.as_f64(), p.tau_minus.as_f64(),
            p.window_len_pos, p.window_len_neg,
            d.l_mtj.as_f64(), d.g_p.as_f64(), d.g_ap.as_f64(), d.g_dw.as_f64(),
            d.r_hm.as_f64(), d.t_pulse.as_f64(), d.i_max.as_f64(), d.i_ceiling.as_f64(),
            d.v_dd.as_f64(),
            m.ms.as_f64(), m.a_ex.as_f64(), m.ku.as_f64(), m.d_dmi.as_f64(),
            m.alpha.as_f64(), m.theta_sh.as_f64(), m.t_fm.as_f64(), m.t_hm.as_f64(),
            g.length.as_f64(), g.width.as_f64(), g.cell_x.as_f64(), g.cell_y.as_f64(),
            c.u_t.as_f64(), c.kappa.as_f64(), c.c_p.as_f64(), c.c_syn.as_f64(),
            c.c_mem.as_f64(), c.i_t.as_f64(), c.i_th.as_f64(), c.i_w.as_f64(),
            c.i_0.as_f64(), c.v_w.as_f64(), c.v_dd.as_f64(), c.dt.as_f64(),
            self.train_count, self.test_count,
        )
    }

    /// Fingerprint binding checkpoints to the producing configuration.
    pub fn config_hash(&self) -> u64 {
        fnv64(self.canonical_string().as_bytes())
    }
}

/// Fully-commented reference config with the default values.
pub fn reference_text() -> String {
    let d = RunConfig::<f64>::default();
    format!(
        "\
# dwsnn run configuration (all values shown are the defaults)

[network]
n_exc = {}
p_max = {}                  # spike probability/step at intensity 255
steps_per_image = {}
epochs = {}
seed = {}
inh_weight = {}             # current injected per inhibitory spike
trigger_weight = {}         # exc -> inh trigger current
inhibition_enabled = {}
reset_traces_between_images = {}
tau_post_exc = {}           # steps
tau_post_inh = {}
tau_post_trigger = {}

[neuron_exc]
tau_mem = {}
r_mem = {}
v_thres = {}
v_reset = {}
t_refrac = {}
a_inc = {}                  # adaptation increment per spike
tau_a = {}                  # adaptation decay, steps

[neuron_inh]
tau_mem = {}
r_mem = {}
v_thres = {}
v_reset = {}
t_refrac = {}
a_inc = {}
tau_a = {}

[stdp]
a_plus = {}
a_minus = {}
tau_plus = {}
tau_minus = {}
window_len_pos = {}
window_len_neg = {}

[device]
l_mtj = {:e}
g_p = {:e}
g_ap = {:e}
g_dw = {:e}
# 384 ohm makes one full-traverse pulse dissipate 0.24 fJ
# (E = I^2*R*t at i_max = 25 uA, t_pulse = 1 ns)
r_hm = {}
t_pulse = {:e}
i_max = {:e}
i_ceiling = {:e}
v_dd = {}

[material]
ms = {:e}
a_ex = {:e}
ku = {:e}
d_dmi = {:e}
alpha = {}
theta_sh = {}
t_fm = {:e}
t_hm = {:e}

[geometry]
length = {:e}
width = {:e}
cell_x = {:e}
cell_y = {:e}

[circuit]
u_t = {}
kappa = {}
c_p = {:e}
c_syn = {:e}
c_mem = {:e}
i_t = {:e}
i_th = {:e}
i_w = {:e}
i_0 = {:e}
v_w = {}
v_dd = {}
dt = {:e}

[data]
train_count = {}
test_count = {}
",
        d.sim.n_exc,
        d.sim.p_max,
        d.sim.steps_per_image,
        d.sim.epochs,
        d.sim.seed,
        d.sim.inh_weight,
        d.sim.trigger_weight,
        d.sim.inhibition_enabled,
        d.sim.reset_traces_between_images,
        d.sim.tau_post_exc,
        d.sim.tau_post_inh,
        d.sim.tau_post_trigger,
        d.sim.exc_neuron.tau_mem,
        d.sim.exc_neuron.r_mem,
        d.sim.exc_neuron.v_thres,
        d.sim.exc_neuron.v_reset,
        d.sim.exc_neuron.t_refrac,
        d.sim.exc_neuron.a_inc,
        d.sim.exc_neuron.tau_a,
        d.sim.inh_neuron.tau_mem,
        d.sim.inh_neuron.r_mem,
        d.sim.inh_neuron.v_thres,
        d.sim.inh_neuron.v_reset,
        d.sim.inh_neuron.t_refrac,
        d.sim.inh_neuron.a_inc,
        d.sim.inh_neuron.tau_a,
        d.sim.stdp.a_plus,
        d.sim.stdp.a_minus,
        d.sim.stdp.tau_plus,
        d.sim.stdp.tau_minus,
        d.sim.stdp.window_len_pos,
        d.sim.stdp.window_len_neg,
        d.sim.device.l_mtj,
        d.sim.device.g_p,
        d.sim.device.g_ap,
        d.sim.device.g_dw,
        d.sim.device.r_hm,
        d.sim.device.t_pulse,
        d.sim.device.i_max,
        d.sim.device.i_ceiling,
        d.sim.device.v_dd,
        d.material.ms,
        d.material.a_ex,
        d.material.ku,
        d.material.d_dmi,
        d.material.alpha,
        d.material.theta_sh,
        d.material.t_fm,
        d.material.t_hm,
        d.geometry.length,
        d.geometry.width,
        d.geometry.cell_x,
        d.geometry.cell_y,
        d.circuit.u_t,
        d.circuit.kappa,
        d.circuit.c_p,
        d.circuit.c_syn,
        d.circuit.c_mem,
        d.circuit.i_t,
        d.circuit.i_th,
        d.circuit.i_w,
        d.circuit.i_0,
        d.circuit.v_w,
        d.circuit.v_dd,
        d.circuit.dt,
        d.train_count,
        d.test_count,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_validate() {
        let cfg = RunConfig::<f64>::parse("").unwrap();
        assert_eq!(cfg.sim.n_exc, 100);
        assert_eq!(cfg.train_count, 5000);
    }

    #[test]
    fn reference_text_round_trips_to_defaults() {
        let text = reference_text();
        let cfg = RunConfig::<f64>::parse(&text).unwrap();
        assert_eq!(
            cfg.canonical_string(),
            RunConfig::<f64>::default().canonical_string()
        );
    }

    #[test]
    fn overrides_apply() {
        let cfg = RunConfig::<f64>::parse(
            "[network]\nn_exc = 20\n\n[stdp]\na_plus = 0.02\n[device]\nr_hm = 500\n",
        )
        .unwrap();
        assert_eq!(cfg.sim.n_exc, 20);
        assert_eq!(cfg.sim.stdp.a_plus, 0.02);
        assert_eq!(cfg.sim.device.r_hm, 500.0);
    }

    #[test]
    fn unknown_keys_and_sections_fail_fast() {
        assert!(matches!(
            RunConfig::<f64>::parse("[network]\nbogus = 1\n"),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            RunConfig::<f64>::parse("[nope]\n"),
            Err(ConfigError::UnknownSection { .. })
        ));
        assert!(matches!(
            RunConfig::<f64>::parse("n_exc = 5\n"),
            Err(ConfigError::Syntax { .. })
        ));
    }

    #[test]
    fn semantic_change_alters_hash_and_comments_do_not() {
        let base = RunConfig::<f64>::parse("").unwrap();
        let changed = RunConfig::<f64>::parse("[network]\np_max = 0.05\n").unwrap();
        assert_ne!(base.config_hash(), changed.config_hash());
        let commented = RunConfig::<f64>::parse("# a comment\n\n[network]\n# nothing\n").unwrap();
        assert_eq!(base.config_hash(), commented.config_hash());
        // seed is run identity, not architecture: hash unchanged
        let seeded = RunConfig::<f64>::parse("[network]\nseed = 99\n").unwrap();
        assert_eq!(base.config_hash(), seeded.config_hash());
    }

    #[test]
    fn invalid_values_rejected_on_validate() {
        assert!(RunConfig::<f64>::parse("[network]\np_max = 1.5\n").is_err());
        assert!(RunConfig::<f64>::parse("[device]\nr_hm = 5\n").is_err());
        assert!(RunConfig::<f64>::parse("[material]\nalpha = 2\n").is_err());
    }
}
