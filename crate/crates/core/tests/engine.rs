use memesim_core::decision::SharingModel;
use memesim_core::engine::{
    check_transitions, replay_series, run, EventKind, EventRecord, ReinfectionPolicy, SimConfig,
    WorldState,
};
use memesim_core::geometry::{Position, Torus};

fn small(seed: u64) -> SimConfig {
    SimConfig {
        population: 400,
        recruits: 10,
        horizon_ticks: 80,
        world_width: 30.0,
        world_height: 30.0,
        seed,
        ..SimConfig::default()
    }
}

/// A model whose share probability is exactly 1 for any realistic features.
fn always_share() -> SharingModel {
    SharingModel::new(1e6, 0.0, 0.0, 0.0)
}

fn never_share() -> SharingModel {
    SharingModel::new(-1e6, 0.0, 0.0, 0.0)
}

/// Two agents pinned one unit apart, one recruit with one meme.
fn pair_world(policy: ReinfectionPolicy, radius: f64) -> WorldState {
    let config = SimConfig {
        population: 2,
        recruits: 1,
        memes_per_recruit: 1,
        step_size: 0.0,
        neighbor_radius: radius,
        infection_duration_ticks: 3,
        reinfection: policy,
        sharing_model: always_share(),
        horizon_ticks: 20,
        ..SimConfig::default()
    };
    let mut w = WorldState::init(config).unwrap();
    w.agents_mut()[0].position = Position::new(50.0, 50.0);
    w.agents_mut()[1].position = Position::new(51.0, 50.0);
    w
}

fn kinds_at(events: &[EventRecord], tick: u64) -> Vec<EventKind> {
    events
        .iter()
        .filter(|e| e.tick == tick)
        .map(|e| e.kind)
        .collect()
}

#[test]
fn default_world_is_study_sized_and_clean() {
    let w = WorldState::init(SimConfig::default()).unwrap();
    assert_eq!(w.agents().len(), 15_000);
    assert!(w
        .agents()
        .iter()
        .all(|a| a.infections.is_empty() && !a.recruited));
    assert!(w.memes().is_empty());
    assert_eq!(w.tick(), 0);
}

#[test]
fn single_agent_world() {
    let config = SimConfig {
        population: 1,
        recruits: 1,
        horizon_ticks: 30,
        ..SimConfig::default()
    };
    let out = run(config).unwrap();
    assert_eq!(out.memes.len(), 2);
    assert_eq!(out.final_cumulative_exposures(), 0);
    assert!(check_transitions(&out.events).is_empty());
}

#[test]
fn placement_is_seeded() {
    let a = WorldState::init(small(9)).unwrap();
    let b = WorldState::init(small(9)).unwrap();
    let c = WorldState::init(small(10)).unwrap();
    let pos = |w: &WorldState| w.agents().iter().map(|a| a.position).collect::<Vec<_>>();
    assert_eq!(pos(&a), pos(&b));
    assert_ne!(pos(&a), pos(&c));
}

#[test]
fn invalid_config_lists_fields() {
    let config = SimConfig {
        population: 5,
        recruits: 6,
        world_width: -1.0,
        ..SimConfig::default()
    };
    let err = WorldState::init(config).unwrap_err();
    assert_eq!(
        err.fields().collect::<Vec<_>>(),
        ["recruits", "world_width"]
    );
}

#[test]
fn recruiter_cadence_reaches_quota() {
    let config = SimConfig {
        sharing_model: never_share(),
        ..SimConfig::default()
    };
    let mut w = WorldState::init(config).unwrap();
    let mut last = 0;
    for tick in 0..600u64 {
        w.advance();
        let now = w.recruited_count();
        if tick % 4 == 0 && tick < 472 {
            assert_eq!(now, last + 1, "tick {tick}");
        } else {
            assert_eq!(now, last, "tick {tick}");
        }
        last = now;
    }
    assert_eq!(w.recruited_count(), 118);
    assert_eq!(w.memes().len(), 236);
    assert_eq!(w.agents().iter().filter(|a| a.recruited).count(), 118);
    let creators: std::collections::HashSet<_> = w.memes().iter().map(|m| m.creator_id).collect();
    assert_eq!(creators.len(), 118);
}

#[test]
fn recruit_batch_alternative_reading() {
    let config = SimConfig {
        recruits: 10,
        recruit_batch: 4,
        population: 100,
        horizon_ticks: 12,
        ..SimConfig::default()
    };
    let out = run(config).unwrap();
    let per_tick: Vec<_> = [0, 4, 8]
        .iter()
        .map(|&t| {
            out.events
                .iter()
                .filter(|e| e.tick == t && e.kind == EventKind::Recruit)
                .count()
        })
        .collect();
    assert_eq!(per_tick, [4, 4, 2]);
}

#[test]
fn recruit_events_in_order() {
    let mut w = WorldState::init(small(1)).unwrap();
    w.recruit_step();
    let kinds: Vec<_> = w.events().iter().map(|e| e.kind).collect();
    use EventKind::*;
    assert_eq!(kinds, [Recruit, Create, Infect, Create, Infect]);
    let agent = w.events()[0].agent_id;
    assert!(w.events().iter().all(|e| e.agent_id == agent));
}

#[test]
fn zero_step_walk_keeps_positions() {
    let mut w = WorldState::init(SimConfig {
        step_size: 0.0,
        ..small(2)
    })
    .unwrap();
    let before: Vec<_> = w.agents().iter().map(|a| a.position).collect();
    w.walk_step();
    let after: Vec<_> = w.agents().iter().map(|a| a.position).collect();
    assert_eq!(before, after);
}

#[test]
fn walk_moves_exactly_one_step_and_stays_in_bounds() {
    let config = SimConfig {
        step_size: 1.7,
        ..small(3)
    };
    let torus = Torus::new(config.world_width, config.world_height);
    let mut w = WorldState::init(config).unwrap();
    for _ in 0..50 {
        let before: Vec<_> = w.agents().iter().map(|a| a.position).collect();
        w.walk_step();
        for (a, p) in w.agents().iter().zip(before) {
            assert!(torus.contains(a.position));
            assert!((torus.distance(a.position, p) - 1.7).abs() < 1e-9);
        }
    }
}

#[test]
fn no_infected_agents_no_share_events() {
    let mut w = WorldState::init(small(4)).unwrap();
    w.walk_step();
    w.share_step();
    w.recovery_step();
    assert!(w.events().is_empty());
}

#[test]
fn never_sharing_means_no_exposures() {
    let out = run(SimConfig {
        sharing_model: never_share(),
        ..small(5)
    })
    .unwrap();
    assert_eq!(out.final_cumulative_exposures(), 0);
    assert!(out.events.iter().all(|e| e.kind != EventKind::Share));
    assert!(out.events.iter().all(|e| matches!(
        e.kind,
        EventKind::Recruit | EventKind::Create | EventKind::Infect | EventKind::Recover
    )));
}

#[test]
fn one_sharer_one_neighbor() {
    let mut w = pair_world(ReinfectionPolicy::Reset, 1.5);
    w.recruit_step();
    let seeded = w.events().len();
    w.walk_step();
    w.share_step();
    let share_phase: Vec<_> = w.events()[seeded..].iter().map(|e| e.kind).collect();
    assert_eq!(
        share_phase,
        [EventKind::Share, EventKind::Expose, EventKind::Infect]
    );
    let recruiter = w.events()[0].agent_id;
    let other = 1 - recruiter;
    assert_eq!(w.events()[seeded + 1].agent_id, other);
    assert!(w.agents()[other as usize].is_infected_with(0));
}

#[test]
fn timer_of_one_expires_in_recovery() {
    let mut w = pair_world(ReinfectionPolicy::Reset, 0.5);
    w.recruit_step();
    let recruiter = w.events()[0].agent_id as usize;
    w.agents_mut()[recruiter]
        .infection_mut(0)
        .unwrap()
        .remaining = 1;
    w.recovery_step();
    assert!(!w.agents()[recruiter].is_infected_with(0));
    assert_eq!(w.events().last().unwrap().kind, EventKind::Recover);
    assert_eq!(w.currently_infected(), 0);
}

#[test]
fn infection_lasts_exactly_duration_share_steps() {
    // Isolated recruiter: shares on ticks 0, 1, 2 and recovers at the end of tick 2.
    let mut w = pair_world(ReinfectionPolicy::Reset, 0.5);
    for _ in 0..6 {
        w.advance();
    }
    let shares: Vec<_> = w
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::Share)
        .map(|e| e.tick)
        .collect();
    assert_eq!(shares, [0, 1, 2]);
    assert_eq!(kinds_at(w.events(), 2).last(), Some(&EventKind::Recover));

    // Exposure-infected neighbor: infected in tick 0, shares on ticks 1..=3.
    let mut w = pair_world(ReinfectionPolicy::Ignore, 1.5);
    for _ in 0..5 {
        w.advance();
    }
    let recruiter = w.events()[0].agent_id;
    let other = 1 - recruiter;
    let other_shares: Vec<_> = w
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::Share && e.agent_id == other)
        .map(|e| e.tick)
        .take(3)
        .collect();
    assert_eq!(other_shares, [1, 2, 3]);
    let first_recover = w
        .events()
        .iter()
        .find(|e| e.kind == EventKind::Recover && e.agent_id == other)
        .unwrap();
    assert_eq!(first_recover.tick, 3);
}

#[test]
fn recovered_agents_are_reinfected() {
    let mut w = pair_world(ReinfectionPolicy::Ignore, 1.5);
    for _ in 0..12 {
        w.advance();
    }
    let recruiter = w.events()[0].agent_id;
    let infections = w
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::Infect && e.agent_id == recruiter)
        .count();
    assert!(infections >= 2, "recruiter never reinfected");
    assert!(check_transitions(w.events()).is_empty());
}

#[test]
fn reset_policy_restarts_the_timer() {
    let mut w = pair_world(ReinfectionPolicy::Reset, 1.5);
    for _ in 0..10 {
        w.advance();
    }
    // Both agents keep re-exposing each other, so nobody ever recovers.
    assert!(w.events().iter().all(|e| e.kind != EventKind::Recover));
    assert_eq!(w.currently_infected(), 2);
}

#[test]
fn zero_horizon_is_empty() {
    let out = run(SimConfig {
        horizon_ticks: 0,
        ..small(1)
    })
    .unwrap();
    assert!(out.series.is_empty());
    assert!(out.events.is_empty());
}

#[test]
fn runs_are_deterministic() {
    let a = run(small(77)).unwrap();
    let b = run(small(77)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn series_matches_log_and_invariants_hold() {
    for seed in 0..5 {
        let config = SimConfig {
            sharing_model: SharingModel::new(-2.0, 0.5, 0.5, 0.3),
            ..small(seed)
        };
        let horizon = u64::from(config.horizon_ticks);
        let out = run(config).unwrap();
        assert!(out.final_cumulative_exposures() > 0);
        assert_eq!(out.series, replay_series(&out.events, horizon));
        assert!(out
            .series
            .windows(2)
            .all(|w| w[0].cumulative_exposures <= w[1].cumulative_exposures));
        let violations = check_transitions(&out.events);
        assert!(violations.is_empty(), "{}", violations[0]);
        let exposes = out
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Expose)
            .count() as u64;
        assert_eq!(out.hits.iter().sum::<u64>(), exposes);
        let recruits = out
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Recruit)
            .count();
        assert!(recruits <= 10);
    }
}

#[test]
fn saturation_with_world_sized_radius() {
    let config = SimConfig {
        population: 50,
        recruits: 3,
        world_width: 20.0,
        world_height: 20.0,
        neighbor_radius: 30.0,
        horizon_ticks: 9,
        infection_duration_ticks: 5,
        sharing_model: always_share(),
        ..SimConfig::default()
    };
    let duration = u64::from(config.infection_duration_ticks);
    let out = run(config).unwrap();
    for meme in &out.memes {
        let created = out
            .events
            .iter()
            .find(|e| e.kind == EventKind::Create && e.meme_id == Some(meme.meme_id))
            .unwrap()
            .tick;
        let mut reached = std::collections::HashSet::new();
        for e in &out.events {
            if e.kind == EventKind::Infect
                && e.meme_id == Some(meme.meme_id)
                && e.tick < created + duration
            {
                reached.insert(e.agent_id);
            }
        }
        assert_eq!(reached.len(), 50, "meme {}", meme.meme_id);
    }
}

#[test]
fn raising_the_intercept_does_not_lower_mean_exposures() {
    let base = SimConfig {
        population: 3000,
        recruits: 30,
        horizon_ticks: 200,
        world_width: 90.0,
        world_height: 90.0,
        ..SimConfig::default()
    };
    let mean = |intercept: f64| {
        (0..20u64)
            .map(|seed| {
                let mut c = base.clone();
                c.seed = seed;
                c.sharing_model.intercept = intercept;
                run(c).unwrap().final_cumulative_exposures() as f64
            })
            .sum::<f64>()
            / 20.0
    };
    let low = mean(-5.2);
    let high = mean(-4.6);
    assert!(high >= low, "low {low} high {high}");
}

#[test]
fn meme_override_to_238() {
    let out = run(SimConfig {
        total_memes: Some(238),
        horizon_ticks: 480,
        sharing_model: never_share(),
        ..SimConfig::default()
    })
    .unwrap();
    assert_eq!(out.memes.len(), 238);
    assert_eq!(out.hits.len(), 238);
}
