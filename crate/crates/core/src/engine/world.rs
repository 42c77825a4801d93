use serde::Serialize;

use crate::content::{
    perceive_features, sample_meme_vector, AgentId, AgentState, Infection, MemeId, MemeVector,
};
use crate::decision::{decide_share, share_probability};
use crate::error::ConfigError;
use crate::geometry::{Position, SpatialGrid, Torus};
use crate::rng::{RngStream, StreamLabel};

use super::config::{ReinfectionPolicy, SimConfig};
use super::event::{EventKind, EventRecord};

/// State after the last completed tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TickSample {
    pub tick: u64,
    /// (agent, meme) infection pairs alive at the end of the tick.
    pub currently_infected: u64,
    /// EXPOSE events with tick <= this tick.
    pub cumulative_exposures: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub series: Vec<TickSample>,
    /// EXPOSE count per meme, indexed by meme id.
    pub hits: Vec<u64>,
    pub memes: Vec<MemeVector>,
    pub events: Vec<EventRecord>,
}

impl SimOutput {
    pub fn final_cumulative_exposures(&self) -> u64 {
        self.series.last().map_or(0, |s| s.cumulative_exposures)
    }
}

#[derive(Debug, Clone)]
pub struct WorldState {
    config: SimConfig,
    torus: Torus,
    tick: u64,
    agents: Vec<AgentState>,
    memes: Vec<MemeVector>,
    unrecruited: Vec<AgentId>,
    recruited: u32,
    walk_rng: RngStream,
    content_rng: RngStream,
    decision_rng: RngStream,
    recruit_rng: RngStream,
    grid: SpatialGrid,
    positions: Vec<Position>,
    neighbor_buf: Vec<u32>,
    events: Vec<EventRecord>,
    hits: Vec<u64>,
    currently_infected: u64,
    cumulative_exposures: u64,
    series: Vec<TickSample>,
}

impl WorldState {
    /// Places `population` susceptible agents uniformly on the torus.
    pub fn init(config: SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let torus = Torus::new(config.world_width, config.world_height);
        let mut placement = RngStream::new(config.seed, StreamLabel::Placement);
        let mut perception = RngStream::new(config.seed, StreamLabel::Perception);
        let agents: Vec<AgentState> = (0..config.population)
            .map(|id| {
                let p = Position::new(
                    placement.uniform() * torus.width,
                    placement.uniform() * torus.height,
                );
                // A product can round up to the extent itself.
                let p = torus.displace(p, 0.0, 0.0);
                AgentState::new(id, p, perception.next_u64())
            })
            .collect();
        let positions = agents.iter().map(|a| a.position).collect();
        Ok(Self {
            torus,
            tick: 0,
            agents,
            memes: Vec::new(),
            unrecruited: (0..config.population).collect(),
            recruited: 0,
            walk_rng: RngStream::new(config.seed, StreamLabel::Walk),
            content_rng: RngStream::new(config.seed, StreamLabel::MemeContent),
            decision_rng: RngStream::new(config.seed, StreamLabel::Decisions),
            recruit_rng: RngStream::new(config.seed, StreamLabel::Recruitment),
            grid: SpatialGrid::new(torus, config.neighbor_radius),
            positions,
            neighbor_buf: Vec::new(),
            events: Vec::new(),
            hits: Vec::new(),
            currently_infected: 0,
            cumulative_exposures: 0,
            series: Vec::new(),
            config,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn agents_mut(&mut self) -> &mut [AgentState] {
        &mut self.agents
    }

    pub fn memes(&self) -> &[MemeVector] {
        &self.memes
    }

    pub fn recruited_count(&self) -> u32 {
        self.recruited
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn hits(&self) -> &[u64] {
        &self.hits
    }

    pub fn currently_infected(&self) -> u64 {
        self.currently_infected
    }

    pub fn cumulative_exposures(&self) -> u64 {
        self.cumulative_exposures
    }

    pub fn series(&self) -> &[TickSample] {
        &self.series
    }

    fn probability_for(&self, agent: AgentId, meme: MemeId) -> f64 {
        let features = perceive_features(
            &self.agents[agent as usize],
            &self.memes[meme as usize],
            self.config.perception_noise_sd,
        )
        .expect("meme dimension validated with the config");
        share_probability(&self.config.sharing_model, &features)
            .expect("perceived features of a finite meme are finite")
    }

    /// Recruits the next batch if this is a recruiting tick and the quota is
    /// not yet met; otherwise does nothing.
    pub fn recruit_step(&mut self) {
        let c = &self.config;
        if !self
            .tick
            .is_multiple_of(u64::from(c.recruit_interval_ticks))
            || self.recruited >= c.recruits
        {
            return;
        }
        let batch = c.recruit_batch.min(c.recruits - self.recruited);
        for _ in 0..batch {
            let k = self.recruit_rng.below(self.unrecruited.len() as u64) as usize;
            let agent = self.unrecruited.swap_remove(k);
            let nth = self.recruited;
            self.recruited += 1;
            self.agents[agent as usize].recruited = true;
            self.events.push(EventRecord::recruit(self.tick, agent));
            for _ in 0..self.config.memes_for_recruit(nth) {
                let meme_id = self.memes.len() as MemeId;
                let meme = sample_meme_vector(
                    &mut self.content_rng,
                    self.config.meme_dimension,
                    meme_id,
                    agent,
                )
                .expect("meme dimension validated with the config");
                self.memes.push(meme);
                self.hits.push(0);
                self.events.push(EventRecord::new(
                    self.tick,
                    EventKind::Create,
                    agent,
                    meme_id,
                ));
                let p = self.probability_for(agent, meme_id);
                self.agents[agent as usize].insert_infection(Infection {
                    meme_id,
                    remaining: self.config.infection_duration_ticks,
                    active_from: self.tick,
                    share_probability: p,
                });
                self.currently_infected += 1;
                self.events.push(EventRecord::new(
                    self.tick,
                    EventKind::Infect,
                    agent,
                    meme_id,
                ));
            }
        }
    }

    /// Moves every agent `step_size` in a uniformly random direction.
    pub fn walk_step(&mut self) {
        let step = self.config.step_size;
        for agent in &mut self.agents {
            let (dx, dy) = self.walk_rng.unit_direction();
            agent.position = self.torus.displace(agent.position, step * dx, step * dy);
        }
    }

    /// Every infected (agent, meme) pair decides whether to share; a share
    /// exposes all neighbors within the radius and infects the susceptible
    /// ones. Pairs infected during this phase first share next tick.
    pub fn share_step(&mut self) {
        let snapshot: Vec<(AgentId, MemeId, f64)> = self
            .agents
            .iter()
            .flat_map(|a| {
                a.infections
                    .iter()
                    .map(move |i| (a.agent_id, i.meme_id, i.share_probability))
            })
            .collect();
        if snapshot.is_empty() {
            return;
        }
        self.positions.clear();
        self.positions
            .extend(self.agents.iter().map(|a| a.position));
        self.grid.rebuild(&self.positions);

        let t = self.tick;
        let duration = self.config.infection_duration_ticks;
        let mut neighbors = std::mem::take(&mut self.neighbor_buf);
        for (sharer, meme, p) in snapshot {
            if !decide_share(&mut self.decision_rng, p).expect("stored probabilities are valid") {
                continue;
            }
            self.events
                .push(EventRecord::new(t, EventKind::Share, sharer, meme));
            self.grid
                .neighbors_into(&self.positions, sharer as usize, &mut neighbors);
            for &b in &neighbors {
                self.events
                    .push(EventRecord::new(t, EventKind::Expose, b, meme));
                self.hits[meme as usize] += 1;
                self.cumulative_exposures += 1;
                let policy = self.config.reinfection;
                if let Some(inf) = self.agents[b as usize].infection_mut(meme) {
                    if policy == ReinfectionPolicy::Reset {
                        inf.remaining = duration;
                        inf.active_from = t + 1;
                    }
                    continue;
                }
                let pb = self.probability_for(b, meme);
                self.agents[b as usize].insert_infection(Infection {
                    meme_id: meme,
                    remaining: duration,
                    active_from: t + 1,
                    share_probability: pb,
                });
                self.currently_infected += 1;
                self.events
                    .push(EventRecord::new(t, EventKind::Infect, b, meme));
            }
        }
        self.neighbor_buf = neighbors;
    }

    /// Counts down every infection that was active this tick; expired ones
    /// are removed and the agent is susceptible to that meme again.
    pub fn recovery_step(&mut self) {
        let t = self.tick;
        let events = &mut self.events;
        let mut recovered = 0;
        for agent in &mut self.agents {
            let id = agent.agent_id;
            agent.infections.retain_mut(|inf| {
                if inf.active_from > t {
                    return true;
                }
                inf.remaining -= 1;
                if inf.remaining == 0 {
                    events.push(EventRecord::new(t, EventKind::Recover, id, inf.meme_id));
                    recovered += 1;
                    false
                } else {
                    true
                }
            });
        }
        self.currently_infected -= recovered;
    }

    /// One full tick in the fixed phase order recruit, walk, share, recovery.
    pub fn advance(&mut self) {
        self.recruit_step();
        self.walk_step();
        self.share_step();
        self.recovery_step();
        self.series.push(TickSample {
            tick: self.tick,
            currently_infected: self.currently_infected,
            cumulative_exposures: self.cumulative_exposures,
        });
        self.tick += 1;
    }

    pub fn into_output(self) -> SimOutput {
        SimOutput {
            series: self.series,
            hits: self.hits,
            memes: self.memes,
            events: self.events,
        }
    }
}

/// Runs `horizon_ticks` ticks from a fresh world.
pub fn run(config: SimConfig) -> Result<SimOutput, ConfigError> {
    let horizon = config.horizon_ticks;
    let mut world = WorldState::init(config)?;
    for _ in 0..horizon {
        world.advance();
    }
    Ok(world.into_output())
}
