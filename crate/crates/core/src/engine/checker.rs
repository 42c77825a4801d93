//! Replays an event log and reports every SIS rule it breaks.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::content::{AgentId, MemeId};

use super::event::{EventKind, EventRecord};
use super::world::TickSample;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionViolation {
    /// Position of the offending record in the log.
    pub index: usize,
    pub record: EventRecord,
    pub reason: &'static str,
}

impl fmt::Display for TransitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "event #{} {:?}: {}",
            self.index, self.record, self.reason
        )
    }
}

/// Checks that (agent, meme) pairs only move susceptible -> infected ->
/// susceptible, that every INFECT is either a creator seeding its own new
/// meme or follows a same-tick EXPOSE of the same pair, and that ticks never
/// go backwards.
pub fn check_transitions(events: &[EventRecord]) -> Vec<TransitionViolation> {
    let mut out = Vec::new();
    let mut infected: HashSet<(AgentId, MemeId)> = HashSet::new();
    let mut recruited: HashMap<AgentId, u64> = HashMap::new();
    let mut created: HashMap<MemeId, (AgentId, u64)> = HashMap::new();
    let mut last_exposed: HashMap<(AgentId, MemeId), u64> = HashMap::new();
    let mut last_tick = 0;

    for (index, r) in events.iter().enumerate() {
        let mut fail = |reason| {
            out.push(TransitionViolation {
                index,
                record: *r,
                reason,
            })
        };
        if r.tick < last_tick {
            fail("tick goes backwards");
        }
        last_tick = last_tick.max(r.tick);
        if !r.is_well_formed() {
            fail("meme id presence does not match event kind");
            continue;
        }
        let a = r.agent_id;
        let Some(m) = r.meme_id else {
            if recruited.insert(a, r.tick).is_some() {
                fail("agent recruited twice");
            }
            continue;
        };
        let pair = (a, m);
        if r.kind != EventKind::Create && !created.contains_key(&m) {
            fail("meme referenced before creation");
        }
        match r.kind {
            EventKind::Recruit => unreachable!(),
            EventKind::Create => {
                if recruited.get(&a) != Some(&r.tick) {
                    fail("meme created by an agent not recruited this tick");
                }
                if created.insert(m, (a, r.tick)).is_some() {
                    fail("meme created twice");
                }
            }
            EventKind::Expose => {
                last_exposed.insert(pair, r.tick);
            }
            EventKind::Share => {
                if !infected.contains(&pair) {
                    fail("susceptible agent shared");
                }
            }
            EventKind::Infect => {
                if !infected.insert(pair) {
                    fail("infected agent infected again");
                }
                let seeded = created.get(&m) == Some(&(a, r.tick));
                let exposed = last_exposed.get(&pair) == Some(&r.tick);
                if !seeded && !exposed {
                    fail("infection without a same-tick exposure");
                }
            }
            EventKind::Recover => {
                if !infected.remove(&pair) {
                    fail("susceptible agent recovered");
                }
            }
        }
    }
    out
}

/// Rebuilds the per-tick series from the log alone, for `horizon` ticks.
pub fn replay_series(events: &[EventRecord], horizon: u64) -> Vec<TickSample> {
    let mut series = Vec::with_capacity(horizon as usize);
    let mut infected: i64 = 0;
    let mut exposures = 0;
    let mut it = events.iter().peekable();
    for tick in 0..horizon {
        while let Some(r) = it.next_if(|r| r.tick == tick) {
            match r.kind {
                EventKind::Infect => infected += 1,
                EventKind::Recover => infected -= 1,
                EventKind::Expose => exposures += 1,
                _ => {}
            }
        }
        series.push(TickSample {
            tick,
            currently_infected: infected.max(0) as u64,
            cumulative_exposures: exposures,
        });
    }
    series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(tick: u64, kind: EventKind, a: AgentId, m: MemeId) -> EventRecord {
        EventRecord::new(tick, kind, a, m)
    }

    #[test]
    fn accepts_a_valid_history() {
        use EventKind::*;
        let log = vec![
            EventRecord::recruit(0, 1),
            ev(0, Create, 1, 0),
            ev(0, Infect, 1, 0),
            ev(0, Share, 1, 0),
            ev(0, Expose, 2, 0),
            ev(0, Infect, 2, 0),
            ev(1, Recover, 1, 0),
            ev(3, Share, 2, 0),
            ev(3, Expose, 1, 0),
            ev(3, Infect, 1, 0),
        ];
        assert!(check_transitions(&log).is_empty());
    }

    #[test]
    fn flags_each_kind_of_violation() {
        use EventKind::*;
        let log = vec![
            EventRecord::recruit(0, 1),
            ev(0, Create, 1, 0),
            ev(0, Infect, 1, 0),
            ev(0, Infect, 1, 0), // double infection
            ev(1, Expose, 2, 0),
            ev(2, Infect, 2, 0),  // stale exposure
            ev(2, Recover, 3, 0), // never infected
            ev(2, Share, 4, 0),   // never infected
            ev(1, Expose, 5, 0),  // tick backwards
            ev(3, Infect, 6, 9),  // unknown meme, no exposure
        ];
        let reasons: Vec<_> = check_transitions(&log).iter().map(|v| v.index).collect();
        assert_eq!(reasons, [3, 5, 6, 7, 8, 9, 9]);
    }

    #[test]
    fn replay_counts() {
        use EventKind::*;
        let log = vec![
            EventRecord::recruit(0, 1),
            ev(0, Create, 1, 0),
            ev(0, Infect, 1, 0),
            ev(1, Expose, 2, 0),
            ev(1, Expose, 3, 0),
            ev(1, Infect, 2, 0),
            ev(2, Recover, 1, 0),
        ];
        let s = replay_series(&log, 4);
        let pairs: Vec<_> = s
            .iter()
            .map(|t| (t.currently_infected, t.cumulative_exposures))
            .collect();
        assert_eq!(pairs, [(1, 0), (2, 2), (1, 2), (1, 2)]);
    }
}
