//! Discrete-time SIS simulation of meme sharing.
//!
//! Each tick runs four phases in a fixed order:
//!
//! 1. **recruit**: on every `recruit_interval_ticks`-th tick the recruiter
//!    enrolls the next batch of agents; each creates fresh memes and starts
//!    out infected with them.
//! 2. **walk**: every agent steps `step_size` in a uniformly random direction
//!    on the torus.
//! 3. **share**: each infected (agent, meme) pair shares with the agent's
//!    perceived share probability. A share exposes every agent within
//!    `neighbor_radius`; exposed susceptible agents become infected.
//! 4. **recovery**: infection timers count down and expired pairs return to
//!    susceptible.
//!
//! A run is a pure function of its [`SimConfig`]: all randomness comes from
//! per-purpose streams keyed by the config seed.

mod checker;
mod config;
mod event;
mod world;

pub use checker::{check_transitions, replay_series, TransitionViolation};
pub use config::{ReinfectionPolicy, SimConfig};
pub use event::{EventKind, EventRecord};
pub use world::{run, SimOutput, TickSample, WorldState};
