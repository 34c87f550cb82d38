use serde::{Deserialize, Serialize};

use crate::error::{RamseyError, Result};

/// Parameters of the annealer.
///
/// The temperature is cooled by `cooling_factor` whenever the energy drops
/// and heated by `heating_factor` after `stagnation_window` sweeps without a
/// drop; heating repeats every further stuck sweep, compounding up to
/// `t_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    pub initial_temperature: f64,
    pub cooling_factor: f64,
    pub heating_factor: f64,
    /// Sweeps without an energy decrease before heating starts.
    pub stagnation_window: u64,
    /// Every this many sweeps visits all edges instead of the hot ones.
    pub full_sweep_period: u64,
    /// Metropolis proposals per attempt.
    pub max_steps: u64,
    pub t_min: f64,
    pub t_max: f64,
    pub rng_seed: u64,
    /// Extra attempts after the first one fails at a given size.
    pub restarts: usize,
    /// Proposals between progress reports; 0 disables them.
    pub progress_interval: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            cooling_factor: 0.95,
            heating_factor: 1.25,
            stagnation_window: 5,
            full_sweep_period: 50,
            max_steps: 20_000_000,
            t_min: 1e-3,
            t_max: 10.0,
            rng_seed: 0,
            restarts: 5,
            progress_interval: 1_000_000,
        }
    }
}

/// Keys accepted by [`AnnealConfig::set`] and the key-value file.
pub const CONFIG_KEYS: &[&str] = &[
    "initial_temperature",
    "cooling_factor",
    "heating_factor",
    "stagnation_window",
    "full_sweep_period",
    "max_steps",
    "t_min",
    "t_max",
    "seed",
    "restarts",
    "progress_interval",
];

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RamseyError::config(m));
        if !(self.t_min > 0.0
            && self.t_min <= self.initial_temperature
            && self.initial_temperature <= self.t_max)
        {
            return bad(format!(
                "need 0 < t_min <= initial_temperature <= t_max, got {} / {} / {}",
                self.t_min, self.initial_temperature, self.t_max
            ));
        }
        if !self.t_max.is_finite() {
            return bad("t_max must be finite".into());
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return bad(format!(
                "cooling_factor must lie in (0,1), got {}",
                self.cooling_factor
            ));
        }
        if !(self.heating_factor > 1.0 && self.heating_factor.is_finite()) {
            return bad(format!(
                "heating_factor must exceed 1, got {}",
                self.heating_factor
            ));
        }
        if self.stagnation_window == 0 || self.full_sweep_period == 0 || self.max_steps == 0 {
            return bad(
                "stagnation_window, full_sweep_period and max_steps must be positive".into(),
            );
        }
        Ok(())
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| RamseyError::config(format!("invalid value `{value}` for `{key}`")))
        }
        match key {
            "initial_temperature" => self.initial_temperature = num(key, value)?,
            "cooling_factor" => self.cooling_factor = num(key, value)?,
            "heating_factor" => self.heating_factor = num(key, value)?,
            "stagnation_window" => self.stagnation_window = num(key, value)?,
            "full_sweep_period" => self.full_sweep_period = num(key, value)?,
            "max_steps" => self.max_steps = num(key, value)?,
            "t_min" => self.t_min = num(key, value)?,
            "t_max" => self.t_max = num(key, value)?,
            "seed" | "rng_seed" => self.rng_seed = num(key, value)?,
            "restarts" => self.restarts = num(key, value)?,
            "progress_interval" => self.progress_interval = num(key, value)?,
            other => {
                return Err(RamseyError::config(format!(
                    "unknown key `{other}` (known: {})",
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#`
    /// comments are ignored.
    pub fn apply_key_values(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                RamseyError::config(format!("line {}: expected `key = value`", i + 1))
            })?;
            self.set(k.trim(), v.trim())
                .map_err(|e| RamseyError::config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// Defaults overridden by a key-value file.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_key_values(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        AnnealConfig::default().validate().unwrap();
    }

    #[test]
    fn key_value_file_overrides_defaults() {
        let cfg = AnnealConfig::from_key_values(
            "# tuned\nmax_steps = 1000\n\nseed=42 # fixed\ncooling_factor = 0.8\n",
        )
        .unwrap();
        assert_eq!(cfg.max_steps, 1000);
        assert_eq!(cfg.rng_seed, 42);
        assert_eq!(cfg.cooling_factor, 0.8);
        assert_eq!(cfg.heating_factor, 1.25);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(AnnealConfig::from_key_values("bogus = 1").is_err());
        assert!(AnnealConfig::from_key_values("max_steps = ten").is_err());
        assert!(AnnealConfig::from_key_values("cooling_factor = 1.2").is_err());
        assert!(AnnealConfig::from_key_values("t_min = 2").is_err());
        assert!(AnnealConfig::from_key_values("no equals sign").is_err());
    }
}
