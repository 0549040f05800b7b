//! Run configuration: defaults, `key = value` config files, and command-line
//! overrides, merged in that order.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

/// Effective configuration of a run. Serialized into every run manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Temporal decay rate in 1/seconds.
    pub r: f64,
    /// Additive follower smoothing.
    pub smoothing: f64,
    /// Largest cascade the scenario oracle enumerates.
    pub oracle_cap: usize,
    /// Cascades smaller than this are dropped before influence runs.
    pub min_size: usize,
    pub seed: u64,
    /// Worker threads; 0 picks the machine default.
    pub threads: usize,
    pub polarity_threshold: f64,
    pub human_threshold: f64,
    pub bot_threshold: f64,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
    /// Polarization map resolution (cells per axis).
    pub resolution: usize,
    /// Fixed kernel bandwidth; absent means Scott's rule.
    pub bandwidth: Option<f64>,
    pub density_floor: f64,
    /// Weibull shape of synthetic edge rates.
    pub shape: f64,
    /// Weibull scale of synthetic edge rates.
    pub scale: f64,
    /// Abort on the first malformed input row instead of skipping it.
    pub strict: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            r: 6.8e-4,
            smoothing: 1.0,
            oracle_cap: 8,
            min_size: 1,
            seed: 1,
            threads: 0,
            polarity_threshold: 0.4,
            human_threshold: 0.2,
            bot_threshold: 0.6,
            grid_lo: 1e-8,
            grid_hi: 3.0,
            grid_points: 40,
            resolution: 200,
            bandwidth: None,
            density_floor: 1e-9,
            shape: 2.0,
            scale: 1.0,
            strict: false,
        }
    }
}

impl RunConfig {
    /// Applies a flat `key = value` config file. Lines starting with `#` and
    /// blank lines are ignored; unknown keys are errors.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}: line {}: expected key = value, got {raw:?}",
                    path.display(),
                    number + 1
                );
            };
            self.apply_key(key.trim(), value.trim()).with_context(|| {
                format!("{}: line {}", path.display(), number + 1)
            })?;
        }
        self.validate()
    }

    fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse::<T>()
                .map_err(|e| anyhow::anyhow!("invalid value {value:?} for {key}: {e}"))
        }
        match key {
            "r" => self.r = parse(key, value)?,
            "smoothing" => self.smoothing = parse(key, value)?,
            "oracle_cap" => self.oracle_cap = parse(key, value)?,
            "min_size" => self.min_size = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "polarity_threshold" => self.polarity_threshold = parse(key, value)?,
            "human_threshold" => self.human_threshold = parse(key, value)?,
            "bot_threshold" => self.bot_threshold = parse(key, value)?,
            "grid_lo" => self.grid_lo = parse(key, value)?,
            "grid_hi" => self.grid_hi = parse(key, value)?,
            "grid_points" => self.grid_points = parse(key, value)?,
            "resolution" => self.resolution = parse(key, value)?,
            "bandwidth" => {
                self.bandwidth = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "density_floor" => self.density_floor = parse(key, value)?,
            "shape" => self.shape = parse(key, value)?,
            "scale" => self.scale = parse(key, value)?,
            "strict" => self.strict = parse(key, value)?,
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 0.0 {
            bail!("decay rate r must be non-negative, got {}", self.r);
        }
        if self.smoothing < 0.0 {
            bail!("smoothing must be non-negative, got {}", self.smoothing);
        }
        for (name, value) in [
            ("polarity_threshold", self.polarity_threshold),
            ("human_threshold", self.human_threshold),
            ("bot_threshold", self.bot_threshold),
        ] {
            if !(0.0..=1.0).contains(&value) {
                bail!("{name} must lie in [0, 1], got {value}");
            }
        }
        if self.grid_lo <= 0.0 || self.grid_hi < self.grid_lo || self.grid_points == 0 {
            bail!(
                "invalid decay grid: lo {} hi {} points {}",
                self.grid_lo,
                self.grid_hi,
                self.grid_points
            );
        }
        if self.resolution < 2 {
            bail!("map resolution must be at least 2, got {}", self.resolution);
        }
        if self.density_floor <= 0.0 {
            bail!("density floor must be positive, got {}", self.density_floor);
        }
        if self.shape <= 0.0 || self.scale <= 0.0 {
            bail!("Weibull shape and scale must be positive");
        }
        Ok(())
    }

    /// The configuration rendered back as a config file.
    #[cfg(test)]
    pub fn to_file_format(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let mut write = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        write("r", self.r.to_string());
        write("smoothing", self.smoothing.to_string());
        write("oracle_cap", self.oracle_cap.to_string());
        write("min_size", self.min_size.to_string());
        write("seed", self.seed.to_string());
        write("threads", self.threads.to_string());
        write("polarity_threshold", self.polarity_threshold.to_string());
        write("human_threshold", self.human_threshold.to_string());
        write("bot_threshold", self.bot_threshold.to_string());
        write("grid_lo", self.grid_lo.to_string());
        write("grid_hi", self.grid_hi.to_string());
        write("grid_points", self.grid_points.to_string());
        write("resolution", self.resolution.to_string());
        write(
            "bandwidth",
            self.bandwidth.map_or("auto".to_string(), |b| b.to_string()),
        );
        write("density_floor", self.density_floor.to_string());
        write("shape", self.shape.to_string());
        write("scale", self.scale.to_string());
        write("strict", self.strict.to_string());
        out
    }
}
