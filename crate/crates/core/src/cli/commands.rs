use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config_file::RunConfigFile;
use super::svg::{self, Line, Panel};
use super::CliError;
use crate::engine::{run, SimConfig, SimOutput, TickSample};
use crate::error::ConfigError;
use crate::logio::{write_log, HitAggregator, HitSummary, LogReader, DEFAULT_COUNTED_KINDS};
use crate::stats::{logistic_fit, ols_fit, read_table, FitResult, LogisticOptions, ModelKind};

pub const TIMESERIES_HEADER: &str = "tick,currently_infected,cumulative_exposures";
pub const HITS_HEADER: &str = "meme_id,hits";
pub const BINS_HEADER: &str = "bin_start_tick,hits";
/// Columns after the sweep axis columns in `sweep.csv`.
pub const SWEEP_FIXED_COLUMNS: [&str; 5] = [
    "replicate",
    "seed",
    "final_cumulative_exposures",
    "max_hits",
    "median_hits",
];

/// Contents of a simulation's `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub seed: u64,
    pub population: u32,
    pub recruits_enrolled: u64,
    pub memes_created: u64,
    pub horizon_ticks: u32,
    pub event_count: u64,
    pub final_cumulative_exposures: u64,
    pub peak_currently_infected: u64,
    /// Tick with the largest one-tick rise in cumulative exposures.
    pub peak_increment_tick: Option<u64>,
    pub total_hits: u64,
    pub max_hits: u64,
    pub median_hits: f64,
    pub fraction_below_2: f64,
}

/// One run of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<f64>,
    pub replicate: u32,
    pub seed: u64,
    pub final_cumulative_exposures: u64,
    pub max_hits: u64,
    pub median_hits: f64,
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_with<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let mut w = create(path)?;
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn resolve_out(out: Option<&Path>, file: &RunConfigFile) -> Result<PathBuf, CliError> {
    out.map(Path::to_path_buf)
        .or_else(|| file.output_dir.clone())
        .ok_or_else(|| {
            ConfigError::single("output_dir", "no --out given and none in the config").into()
        })
}

pub fn load_config(path: &Path) -> Result<RunConfigFile, CliError> {
    Ok(RunConfigFile::from_json(&read_to_string(path)?)?)
}

fn peak_increment_tick(series: &[TickSample]) -> Option<u64> {
    let mut prev = 0;
    let mut best: Option<(u64, u64)> = None;
    for s in series {
        let inc = s.cumulative_exposures - prev;
        prev = s.cumulative_exposures;
        if best.is_none_or(|(_, b)| inc > b) {
            best = Some((s.tick, inc));
        }
    }
    best.map(|(t, _)| t)
}

fn median(counts: &[u64]) -> f64 {
    let mut c = counts.to_vec();
    c.sort_unstable();
    let n = c.len();
    match n {
        0 => 0.0,
        _ if n % 2 == 1 => c[n / 2] as f64,
        _ => (c[n / 2 - 1] + c[n / 2]) as f64 / 2.0,
    }
}

fn cumulative_panel(title: &str, x_label: &str, label: &str, points: Vec<(f64, f64)>) -> Panel {
    Panel {
        title: title.into(),
        x_label: x_label.into(),
        y_label: "cumulative exposures".into(),
        lines: vec![Line {
            label: label.into(),
            points,
        }],
    }
}

fn simulation_panel(series: &[TickSample]) -> Panel {
    cumulative_panel(
        "Simulation",
        "tick",
        "simulated exposures",
        series
            .iter()
            .map(|s| (s.tick as f64, s.cumulative_exposures as f64))
            .collect(),
    )
}

fn observed_panel(summary: &HitSummary) -> Panel {
    let mut total = 0;
    let points = summary
        .binned_series()
        .into_iter()
        .map(|(b, c)| {
            total += c;
            (b as f64, total as f64)
        })
        .collect();
    cumulative_panel("Observed", "log tick", "observed requests", points)
}

fn analyze_file(log: &Path, bin: u64) -> Result<HitSummary, CliError> {
    if bin == 0 {
        return Err(ConfigError::single("bin", "bin width must be at least 1").into());
    }
    let file = File::open(log).map_err(|e| CliError::io(log, e))?;
    let mut agg = HitAggregator::new(&DEFAULT_COUNTED_KINDS, bin);
    for r in LogReader::new(BufReader::new(file)) {
        let r = r.map_err(|source| CliError::Log {
            path: log.to_path_buf(),
            source,
        })?;
        agg.push(&r);
    }
    Ok(agg.finish())
}

fn write_simulation(
    dir: &Path,
    out: &SimOutput,
    config: &SimConfig,
    observed: Option<&HitSummary>,
) -> Result<SimulationSummary, CliError> {
    ensure_dir(dir)?;
    write_with(&dir.join("events.log"), |w| write_log(w, &out.events))?;
    write_with(&dir.join("timeseries.csv"), |w| {
        writeln!(w, "{TIMESERIES_HEADER}")?;
        for s in &out.series {
            writeln!(
                w,
                "{},{},{}",
                s.tick, s.currently_infected, s.cumulative_exposures
            )?;
        }
        Ok(())
    })?;
    write_with(&dir.join("hits.csv"), |w| {
        writeln!(w, "{HITS_HEADER}")?;
        for (m, c) in out.hits.iter().enumerate() {
            writeln!(w, "{m},{c}")?;
        }
        Ok(())
    })?;

    let below = out.hits.iter().filter(|&&c| c < 2).count();
    let summary = SimulationSummary {
        seed: config.seed,
        population: config.population,
        recruits_enrolled: out
            .events
            .iter()
            .filter(|e| e.kind == crate::engine::EventKind::Recruit)
            .count() as u64,
        memes_created: out.hits.len() as u64,
        horizon_ticks: config.horizon_ticks,
        event_count: out.events.len() as u64,
        final_cumulative_exposures: out.final_cumulative_exposures(),
        peak_currently_infected: out
            .series
            .iter()
            .map(|s| s.currently_infected)
            .max()
            .unwrap_or(0),
        peak_increment_tick: peak_increment_tick(&out.series),
        total_hits: out.hits.iter().sum(),
        max_hits: out.hits.iter().copied().max().unwrap_or(0),
        median_hits: median(&out.hits),
        fraction_below_2: if out.hits.is_empty() {
            0.0
        } else {
            below as f64 / out.hits.len() as f64
        },
    };
    write_json(&dir.join("summary.json"), &summary)?;

    let mut panels = Vec::new();
    if let Some(obs) = observed {
        panels.push(observed_panel(obs));
    }
    panels.push(simulation_panel(&out.series));
    let svg_text = svg::render(&panels);
    write_with(&dir.join("timeseries.svg"), |w| {
        w.write_all(svg_text.as_bytes())
    })?;
    Ok(summary)
}

/// Runs one simulation and writes `events.log`, `timeseries.csv`,
/// `hits.csv`, `summary.json` and `timeseries.svg` into the output
/// directory. With `compare_log`, that log is aggregated with bin width
/// `compare_bin` and drawn as a left-hand panel next to the simulation.
pub fn cmd_simulate(
    config_path: &Path,
    seed: Option<u64>,
    out: Option<&Path>,
    compare_log: Option<(&Path, u64)>,
) -> Result<SimulationSummary, CliError> {
    let file = load_config(config_path)?;
    let dir = resolve_out(out, &file)?;
    let mut config = file.simulation;
    if let Some(s) = seed {
        config.seed = s;
    }
    let observed = compare_log
        .map(|(p, bin)| analyze_file(p, bin))
        .transpose()?;
    let output = run(config.clone())?;
    write_simulation(&dir, &output, &config, observed.as_ref())
}

/// Runs the cross product of the sweep axes times the replicate count and
/// writes `sweep.csv`. Replicate `r` of a point uses seed `seed + r`. Runs
/// execute in parallel; rows come out in grid order regardless.
pub fn cmd_sweep(config_path: &Path, out: Option<&Path>) -> Result<Vec<SweepRow>, CliError> {
    let file = load_config(config_path)?;
    let dir = resolve_out(out, &file)?;
    let sweep = file
        .sweep
        .clone()
        .ok_or_else(|| ConfigError::single("sweep", "no sweep axes defined"))?;
    if sweep.axes.is_empty() {
        return Err(ConfigError::single("sweep.axes", "no sweep axes defined").into());
    }
    let names: Vec<&String> = sweep.axes.keys().collect();

    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for values in sweep.axes.values() {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }

    let mut jobs = Vec::new();
    for point in &points {
        let mut cfg = file.simulation.clone();
        for (name, &v) in names.iter().zip(point) {
            cfg.set_param(name, v)?;
        }
        cfg.validate()?;
        for r in 0..sweep.replicates {
            let mut c = cfg.clone();
            c.seed = cfg.seed.wrapping_add(u64::from(r));
            jobs.push((point.clone(), r, c));
        }
    }

    let rows: Vec<SweepRow> = jobs
        .into_par_iter()
        .map(|(params, replicate, cfg)| {
            let seed = cfg.seed;
            let out = run(cfg)?;
            Ok(SweepRow {
                params,
                replicate,
                seed,
                final_cumulative_exposures: out.final_cumulative_exposures(),
                max_hits: out.hits.iter().copied().max().unwrap_or(0),
                median_hits: median(&out.hits),
            })
        })
        .collect::<Result<_, ConfigError>>()?;

    ensure_dir(&dir)?;
    write_with(&dir.join("sweep.csv"), |w| {
        let header: Vec<&str> = names
            .iter()
            .map(|s| s.as_str())
            .chain(SWEEP_FIXED_COLUMNS)
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for row in &rows {
            for p in &row.params {
                write!(w, "{p},")?;
            }
            writeln!(
                w,
                "{},{},{},{},{}",
                row.replicate,
                row.seed,
                row.final_cumulative_exposures,
                row.max_hits,
                row.median_hits
            )?;
        }
        Ok(())
    })?;
    Ok(rows)
}

/// Fits `model` to a CSV table (response column `y`) and writes the result
/// as JSON.
pub fn cmd_fit(data: &Path, model: ModelKind, out: &Path) -> Result<FitResult, CliError> {
    let file = File::open(data).map_err(|e| CliError::io(data, e))?;
    let table = read_table(BufReader::new(file))?;
    let fit = match model {
        ModelKind::Ols => ols_fit(&table)?,
        ModelKind::Logistic => logistic_fit(&table, LogisticOptions::default())?,
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_json(out, &fit)?;
    Ok(fit)
}

/// Aggregates a log into `summary.json`, `hits.csv` and `bins.csv`.
pub fn cmd_analyze(log: &Path, bin: u64, out: &Path) -> Result<HitSummary, CliError> {
    let summary = analyze_file(log, bin)?;
    ensure_dir(out)?;
    write_json(&out.join("summary.json"), &summary)?;
    write_with(&out.join("hits.csv"), |w| summary.write_hits_csv(w))?;
    write_with(&out.join("bins.csv"), |w| summary.write_bins_csv(w))?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logio::aggregate_hits;

    #[test]
    fn median_of_counts() {
        assert_eq!(median(&[]), 0.0);
        assert_eq!(median(&[5, 1, 0]), 1.0);
        assert_eq!(median(&[4, 1, 0, 9]), 2.5);
    }

    #[test]
    fn peak_increment() {
        let s = |tick, c| TickSample {
            tick,
            currently_infected: 0,
            cumulative_exposures: c,
        };
        assert_eq!(peak_increment_tick(&[]), None);
        assert_eq!(
            peak_increment_tick(&[s(0, 0), s(1, 3), s(2, 9), s(3, 10)]),
            Some(2)
        );
    }

    #[test]
    fn simulation_summary_matches_aggregation() {
        let config = SimConfig {
            population: 400,
            recruits: 10,
            world_width: 30.0,
            world_height: 30.0,
            horizon_ticks: 80,
            ..SimConfig::default()
        };
        let out = run(config).unwrap();
        let agg = aggregate_hits(&out.events, &DEFAULT_COUNTED_KINDS, 1);
        assert_eq!(agg.per_meme.len(), out.hits.len());
        assert_eq!(agg.median_hits, median(&out.hits));
    }
}
