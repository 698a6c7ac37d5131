use serde::{Deserialize, Serialize};

use super::SequencerError;
use crate::metrics::DEFAULT_RESOLUTION;
use crate::model::DEFAULT_CONTACT_EPSILON;

/// Tuning knobs for ordering and phase partitioning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequencerConfig {
    /// Longest phase one model target may serve, in steps.
    pub t_max: usize,
    /// Highest symmetry score allowed at a phase-start prefix.
    pub theta_sym: f64,
    /// Lowest distinctness allowed at a phase-start prefix.
    pub theta_dist: f64,
    /// Highest confusability allowed between consecutive phase prefixes.
    pub theta_conf: f64,
    /// Minimum number of ground-plane steps before the first model target.
    pub b_min: usize,
    pub w_local: f64,
    pub seed: u64,
    pub iters: usize,
    pub tau_sym: f64,
    /// Raster cells per LDU.
    pub resolution: f64,
    pub epsilon_contact: f64,
}

impl Default for SequencerConfig {
    fn default() -> Self {
        SequencerConfig {
            t_max: 40,
            theta_sym: 0.85,
            theta_dist: 0.05,
            theta_conf: 0.90,
            b_min: 8,
            w_local: 1.0,
            seed: 0,
            iters: 2000,
            tau_sym: 1.0,
            resolution: DEFAULT_RESOLUTION,
            epsilon_contact: DEFAULT_CONTACT_EPSILON,
        }
    }
}

impl SequencerConfig {
    pub const KEYS: [&'static str; 11] = [
        "t_max",
        "theta_sym",
        "theta_dist",
        "theta_conf",
        "b_min",
        "w_local",
        "seed",
        "iters",
        "tau_sym",
        "resolution",
        "epsilon_contact",
    ];

    /// Set one field by name. Returns `Ok(false)` when the key is not a
    /// sequencer key so callers can try other parameter sets.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, SequencerError> {
        let bad = || SequencerError::InvalidConfig(format!("invalid value `{value}` for `{key}`"));
        let float = || value.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
        let int = || value.trim().parse::<u64>().map_err(|_| bad());
        match key.trim().to_ascii_lowercase().as_str() {
            "t_max" => self.t_max = int()? as usize,
            "theta_sym" => self.theta_sym = float()?,
            "theta_dist" => self.theta_dist = float()?,
            "theta_conf" => self.theta_conf = float()?,
            "b_min" => self.b_min = int()? as usize,
            "w_local" => self.w_local = float()?,
            "seed" => self.seed = int()?,
            "iters" => self.iters = int()? as usize,
            "tau_sym" => self.tau_sym = float()?,
            "resolution" => self.resolution = float()?,
            "epsilon_contact" => self.epsilon_contact = float()?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn validate(&self) -> Result<(), SequencerError> {
        let fail = |m: &str| Err(SequencerError::InvalidConfig(m.to_string()));
        if self.t_max < 1 {
            return fail("t_max must be at least 1");
        }
        if self.b_min < 1 {
            return fail("b_min must be at least 1");
        }
        for (name, v) in [
            ("theta_sym", self.theta_sym),
            ("theta_dist", self.theta_dist),
            ("theta_conf", self.theta_conf),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(&format!("{name} must lie in [0, 1]"));
            }
        }
        if self.resolution.is_nan() || self.resolution <= 0.0 {
            return fail("resolution must be positive");
        }
        if self.w_local < 0.0 || self.tau_sym < 0.0 || self.epsilon_contact < 0.0 {
            return fail("w_local, tau_sym and epsilon_contact must be non-negative");
        }
        Ok(())
    }
}
