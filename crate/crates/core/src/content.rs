//! Meme content vectors, agent state, and how agents perceive memes.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::geometry::Position;
use crate::rng::{derive_seed, sample_standard_normal, RngStream, StreamLabel};

pub type AgentId = u32;
pub type MemeId = u32;

/// Latent content of one meme: `dim` standard-normal components. The first
/// three are read as humor, self-relevance and self-reference intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemeVector {
    pub meme_id: MemeId,
    pub creator_id: AgentId,
    pub components: Vec<f64>,
}

impl MemeVector {
    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

/// What a consumer perceives about a meme; the inputs of the sharing model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub humor: f64,
    pub self_relevance: f64,
    pub self_reference: f64,
}

impl FeatureVector {
    pub fn new(humor: f64, self_relevance: f64, self_reference: f64) -> Self {
        Self {
            humor,
            self_relevance,
            self_reference,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.humor, self.self_relevance, self.self_reference]
    }

    /// Name and value of the first non-finite component, if any.
    pub fn first_non_finite(&self) -> Option<(&'static str, f64)> {
        [
            ("humor", self.humor),
            ("self_relevance", self.self_relevance),
            ("self_reference", self.self_reference),
        ]
        .into_iter()
        .find(|(_, v)| !v.is_finite())
    }
}

/// One active infection of an agent by a meme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infection {
    pub meme_id: MemeId,
    /// Share steps left, always >= 1 while the infection is stored.
    pub remaining: u32,
    /// First tick whose share and recovery phases count against the timer.
    pub active_from: u64,
    /// This agent's share probability for this meme; fixed per (agent, meme).
    pub share_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub agent_id: AgentId,
    pub position: Position,
    pub recruited: bool,
    /// Sorted by `meme_id`. A meme absent here is one the agent is
    /// susceptible to.
    pub infections: Vec<Infection>,
    pub perception_noise_seed: u64,
}

impl AgentState {
    pub fn new(agent_id: AgentId, position: Position, perception_noise_seed: u64) -> Self {
        Self {
            agent_id,
            position,
            recruited: false,
            infections: Vec::new(),
            perception_noise_seed,
        }
    }

    pub fn infection(&self, meme: MemeId) -> Option<&Infection> {
        self.infections
            .binary_search_by_key(&meme, |i| i.meme_id)
            .ok()
            .map(|k| &self.infections[k])
    }

    pub fn infection_mut(&mut self, meme: MemeId) -> Option<&mut Infection> {
        match self.infections.binary_search_by_key(&meme, |i| i.meme_id) {
            Ok(k) => Some(&mut self.infections[k]),
            Err(_) => None,
        }
    }

    pub fn is_infected_with(&self, meme: MemeId) -> bool {
        self.infection(meme).is_some()
    }

    /// Inserts an infection for a meme the agent is not yet infected with.
    pub fn insert_infection(&mut self, infection: Infection) {
        match self
            .infections
            .binary_search_by_key(&infection.meme_id, |i| i.meme_id)
        {
            Ok(_) => panic!(
                "agent {} already infected with meme {}",
                self.agent_id, infection.meme_id
            ),
            Err(k) => self.infections.insert(k, infection),
        }
    }
}

/// Draws a meme whose `dim` components are independent standard normals.
pub fn sample_meme_vector(
    rng: &mut RngStream,
    dim: usize,
    meme_id: MemeId,
    creator_id: AgentId,
) -> Result<MemeVector, ConfigError> {
    if dim == 0 {
        return Err(ConfigError::single("meme_dimension", "must be at least 1"));
    }
    let components = (0..dim).map(|_| sample_standard_normal(rng)).collect();
    Ok(MemeVector {
        meme_id,
        creator_id,
        components,
    })
}

/// Perceived features: the meme's first three latent components, each plus
/// independent `N(0, noise_sd²)` noise. The noise comes from a perception
/// stream keyed by (agent perception seed, meme id), so the same agent always
/// perceives the same meme the same way.
pub fn perceive_features(
    agent: &AgentState,
    meme: &MemeVector,
    noise_sd: f64,
) -> Result<FeatureVector, ConfigError> {
    if meme.dim() < 3 {
        return Err(ConfigError::single(
            "meme_dimension",
            format!(
                "perception needs at least 3 components, meme {} has {}",
                meme.meme_id,
                meme.dim()
            ),
        ));
    }
    let c = &meme.components;
    if noise_sd == 0.0 {
        return Ok(FeatureVector::new(c[0], c[1], c[2]));
    }
    let mut rng = RngStream::new(
        derive_seed(agent.perception_noise_seed, u64::from(meme.meme_id)),
        StreamLabel::Perception,
    );
    let mut noisy = |v: f64| v + noise_sd * sample_standard_normal(&mut rng);
    Ok(FeatureVector::new(noisy(c[0]), noisy(c[1]), noisy(c[2])))
}
