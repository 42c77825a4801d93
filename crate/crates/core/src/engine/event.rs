use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::content::{AgentId, MemeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    Recruit,
    Create,
    Share,
    Expose,
    Infect,
    Recover,
}

impl EventKind {
    pub const ALL: [EventKind; 6] = [
        EventKind::Recruit,
        EventKind::Create,
        EventKind::Share,
        EventKind::Expose,
        EventKind::Infect,
        EventKind::Recover,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Recruit => "RECRUIT",
            EventKind::Create => "CREATE",
            EventKind::Share => "SHARE",
            EventKind::Expose => "EXPOSE",
            EventKind::Infect => "INFECT",
            EventKind::Recover => "RECOVER",
        }
    }

    /// RECRUIT is the only kind not tied to a meme.
    pub fn has_meme(self) -> bool {
        self != EventKind::Recruit
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or(())
    }
}

/// One timestamped simulation (or web-log) event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventRecord {
    pub tick: u64,
    pub kind: EventKind,
    pub agent_id: AgentId,
    pub meme_id: Option<MemeId>,
}

impl EventRecord {
    pub fn new(tick: u64, kind: EventKind, agent_id: AgentId, meme_id: MemeId) -> Self {
        Self {
            tick,
            kind,
            agent_id,
            meme_id: Some(meme_id),
        }
    }

    pub fn recruit(tick: u64, agent_id: AgentId) -> Self {
        Self {
            tick,
            kind: EventKind::Recruit,
            agent_id,
            meme_id: None,
        }
    }

    /// Meme presence matches the kind.
    pub fn is_well_formed(&self) -> bool {
        self.kind.has_meme() == self.meme_id.is_some()
    }
}
