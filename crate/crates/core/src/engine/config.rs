use serde::{Deserialize, Serialize};

use crate::decision::SharingModel;
use crate::error::{ConfigError, Violation};

/// What happens when an already-infected agent is exposed to the same meme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReinfectionPolicy {
    /// Restart the timer at the full infection duration.
    #[default]
    Reset,
    /// Leave the running timer alone.
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub population: u32,
    pub recruits: u32,
    pub memes_per_recruit: u32,
    /// Overrides the meme total (e.g. 238 instead of 118 x 2). The surplus
    /// over `recruits * memes_per_recruit` goes one extra meme each to the
    /// earliest recruits.
    pub total_memes: Option<u32>,
    /// Agents recruited per recruiting tick.
    pub recruit_batch: u32,
    pub recruit_interval_ticks: u32,
    pub horizon_ticks: u32,
    /// Reject configs whose horizon ends before every recruit is enrolled.
    pub require_full_recruitment: bool,
    pub world_width: f64,
    pub world_height: f64,
    pub step_size: f64,
    pub neighbor_radius: f64,
    pub infection_duration_ticks: u32,
    pub reinfection: ReinfectionPolicy,
    pub perception_noise_sd: f64,
    pub meme_dimension: usize,
    pub sharing_model: SharingModel,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            population: 15_000,
            recruits: 118,
            memes_per_recruit: 2,
            total_memes: None,
            recruit_batch: 1,
            recruit_interval_ticks: 4,
            horizon_ticks: 600,
            require_full_recruitment: false,
            world_width: 200.0,
            world_height: 200.0,
            step_size: 1.0,
            neighbor_radius: 2.0,
            infection_duration_ticks: 10,
            reinfection: ReinfectionPolicy::Reset,
            perception_noise_sd: 0.5,
            meme_dimension: 3,
            sharing_model: SharingModel::default(),
            seed: 42,
        }
    }
}

impl SimConfig {
    /// Checks every invariant and reports all violations together.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut v = Vec::new();
        let mut check = |ok: bool, field: &str, msg: &str| {
            if !ok {
                v.push(Violation::new(field, msg));
            }
        };
        check(self.population >= 1, "population", "must be at least 1");
        check(self.recruits >= 1, "recruits", "must be at least 1");
        check(
            self.recruits <= self.population,
            "recruits",
            "cannot exceed population",
        );
        check(
            self.memes_per_recruit >= 1,
            "memes_per_recruit",
            "must be at least 1",
        );
        check(
            self.recruit_batch >= 1,
            "recruit_batch",
            "must be at least 1",
        );
        check(
            self.recruit_interval_ticks >= 1,
            "recruit_interval_ticks",
            "must be at least 1",
        );
        check(
            self.world_width.is_finite() && self.world_width > 0.0,
            "world_width",
            "must be positive and finite",
        );
        check(
            self.world_height.is_finite() && self.world_height > 0.0,
            "world_height",
            "must be positive and finite",
        );
        check(
            self.step_size.is_finite() && self.step_size >= 0.0,
            "step_size",
            "must be non-negative and finite",
        );
        check(
            self.neighbor_radius.is_finite() && self.neighbor_radius > 0.0,
            "neighbor_radius",
            "must be positive and finite",
        );
        check(
            self.infection_duration_ticks >= 1,
            "infection_duration_ticks",
            "must be at least 1",
        );
        check(
            self.perception_noise_sd.is_finite() && self.perception_noise_sd >= 0.0,
            "perception_noise_sd",
            "must be non-negative and finite",
        );
        check(
            self.meme_dimension >= 3,
            "meme_dimension",
            "must be at least 3 (humor, self-relevance, self-reference)",
        );
        if let Some(total) = self.total_memes {
            let base = u64::from(self.recruits) * u64::from(self.memes_per_recruit);
            let ok =
                u64::from(total) >= base && u64::from(total) <= base + u64::from(self.recruits);
            check(
                ok,
                "total_memes",
                "must lie between recruits * memes_per_recruit and that plus recruits",
            );
        }
        if self.require_full_recruitment && self.recruit_batch >= 1 {
            let rounds = u64::from(self.recruits.div_ceil(self.recruit_batch));
            check(
                u64::from(self.horizon_ticks) >= rounds * u64::from(self.recruit_interval_ticks),
                "horizon_ticks",
                "too short to recruit every agent",
            );
        }
        if let Err(e) = self.sharing_model.validate() {
            v.extend(e.violations);
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations: v })
        }
    }

    /// Memes created by the `k`-th recruit (0-based).
    pub fn memes_for_recruit(&self, k: u32) -> u32 {
        let base = self.recruits * self.memes_per_recruit;
        let extra = self.total_memes.map_or(0, |t| t.saturating_sub(base));
        self.memes_per_recruit + u32::from(k < extra)
    }

    pub fn total_meme_count(&self) -> u32 {
        self.total_memes
            .unwrap_or(self.recruits * self.memes_per_recruit)
    }

    /// Numeric setter by field name, used by parameter sweeps.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        let as_u32 = |v: f64| -> Result<u32, ConfigError> {
            if v.fract() == 0.0 && v >= 0.0 && v <= f64::from(u32::MAX) {
                Ok(v as u32)
            } else {
                Err(ConfigError::single(
                    name,
                    format!("expected a non-negative integer, got {v}"),
                ))
            }
        };
        match name {
            "population" => self.population = as_u32(value)?,
            "recruits" => self.recruits = as_u32(value)?,
            "memes_per_recruit" => self.memes_per_recruit = as_u32(value)?,
            "total_memes" => self.total_memes = Some(as_u32(value)?),
            "recruit_batch" => self.recruit_batch = as_u32(value)?,
            "recruit_interval_ticks" => self.recruit_interval_ticks = as_u32(value)?,
            "horizon_ticks" => self.horizon_ticks = as_u32(value)?,
            "world_width" => self.world_width = value,
            "world_height" => self.world_height = value,
            "step_size" => self.step_size = value,
            "neighbor_radius" => self.neighbor_radius = value,
            "infection_duration_ticks" => self.infection_duration_ticks = as_u32(value)?,
            "perception_noise_sd" => self.perception_noise_sd = value,
            "meme_dimension" => self.meme_dimension = as_u32(value)? as usize,
            "seed" => {
                if value.fract() != 0.0 || value < 0.0 || value > 2f64.powi(53) {
                    return Err(ConfigError::single(
                        name,
                        "seed must be an integer below 2^53 in a sweep",
                    ));
                }
                self.seed = value as u64
            }
            "sharing_model.intercept" | "intercept" => self.sharing_model.intercept = value,
            "sharing_model.w_humor" | "w_humor" => self.sharing_model.w_humor = value,
            "sharing_model.w_relevance" | "w_relevance" => self.sharing_model.w_relevance = value,
            "sharing_model.w_selfref" | "w_selfref" => self.sharing_model.w_selfref = value,
            _ => return Err(ConfigError::single(name, "unknown sweep parameter")),
        }
        Ok(())
    }
}
