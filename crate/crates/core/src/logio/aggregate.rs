use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use serde::Serialize;

use crate::content::MemeId;
use crate::engine::{EventKind, EventRecord};

/// Per-meme popularity summary of an event stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitSummary {
    pub total_hits: u64,
    pub meme_count: u64,
    pub max_hits: u64,
    pub median_hits: f64,
    /// Share of memes with fewer than two hits.
    pub fraction_below_2: f64,
    pub bin_width_ticks: u64,
    pub counted_kinds: Vec<EventKind>,
    /// Largest tick seen in any record.
    pub last_tick: Option<u64>,
    #[serde(skip)]
    pub per_meme: BTreeMap<MemeId, u64>,
    /// Hits per bin, keyed by the bin's first tick. Empty bins are absent.
    #[serde(skip)]
    pub bins: BTreeMap<u64, u64>,
}

impl HitSummary {
    fn from_tables(
        per_meme: BTreeMap<MemeId, u64>,
        bins: BTreeMap<u64, u64>,
        bin_width_ticks: u64,
        counted_kinds: Vec<EventKind>,
        last_tick: Option<u64>,
    ) -> Self {
        let mut counts: Vec<u64> = per_meme.values().copied().collect();
        counts.sort_unstable();
        let n = counts.len();
        let median_hits = match n {
            0 => 0.0,
            _ if n % 2 == 1 => counts[n / 2] as f64,
            _ => (counts[n / 2 - 1] + counts[n / 2]) as f64 / 2.0,
        };
        let below = counts.iter().filter(|&&c| c < 2).count();
        Self {
            total_hits: counts.iter().sum(),
            meme_count: n as u64,
            max_hits: counts.last().copied().unwrap_or(0),
            median_hits,
            fraction_below_2: if n == 0 { 0.0 } else { below as f64 / n as f64 },
            bin_width_ticks,
            counted_kinds,
            last_tick,
            per_meme,
            bins,
        }
    }

    /// Combines summaries of two streams, e.g. two log files covering
    /// disjoint tick ranges. Panics if the bin widths or counted kinds differ.
    pub fn merge(&self, other: &HitSummary) -> HitSummary {
        assert_eq!(
            self.bin_width_ticks, other.bin_width_ticks,
            "bin widths differ"
        );
        assert_eq!(
            self.counted_kinds, other.counted_kinds,
            "counted kinds differ"
        );
        let mut per_meme = self.per_meme.clone();
        for (&m, &c) in &other.per_meme {
            *per_meme.entry(m).or_insert(0) += c;
        }
        let mut bins = self.bins.clone();
        for (&b, &c) in &other.bins {
            *bins.entry(b).or_insert(0) += c;
        }
        let last_tick = match (self.last_tick, other.last_tick) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        Self::from_tables(
            per_meme,
            bins,
            self.bin_width_ticks,
            self.counted_kinds.clone(),
            last_tick,
        )
    }

    /// Dense `(bin_start, hits)` series from tick 0 through the bin holding
    /// `last_tick`, empty bins included.
    pub fn binned_series(&self) -> Vec<(u64, u64)> {
        let Some(last) = self.last_tick else {
            return Vec::new();
        };
        let w = self.bin_width_ticks;
        (0..=last / w)
            .map(|k| (k * w, self.bins.get(&(k * w)).copied().unwrap_or(0)))
            .collect()
    }

    /// `meme_id,hits` with a header row, ascending meme id.
    pub fn write_hits_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "meme_id,hits")?;
        for (m, c) in &self.per_meme {
            writeln!(w, "{m},{c}")?;
        }
        w.flush()
    }

    /// `bin_start_tick,hits` with a header row.
    pub fn write_bins_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "bin_start_tick,hits")?;
        for (b, c) in self.binned_series() {
            writeln!(w, "{b},{c}")?;
        }
        w.flush()
    }
}

/// Single-pass accumulator behind [`aggregate_hits`]. Memory grows with the
/// number of distinct memes and non-empty bins only.
#[derive(Debug, Clone)]
pub struct HitAggregator {
    counted: BTreeSet<EventKind>,
    bin_width: u64,
    per_meme: BTreeMap<MemeId, u64>,
    bins: BTreeMap<u64, u64>,
    last_tick: Option<u64>,
}

impl HitAggregator {
    /// Panics if `bin_width` is zero.
    pub fn new(counted_kinds: &[EventKind], bin_width: u64) -> Self {
        assert!(bin_width >= 1, "bin width must be at least 1");
        Self {
            counted: counted_kinds.iter().copied().collect(),
            bin_width,
            per_meme: BTreeMap::new(),
            bins: BTreeMap::new(),
            last_tick: None,
        }
    }

    pub fn push(&mut self, r: &EventRecord) {
        self.last_tick = Some(self.last_tick.map_or(r.tick, |t| t.max(r.tick)));
        let Some(m) = r.meme_id else {
            return;
        };
        let counted = self.counted.contains(&r.kind);
        // Memes that were created or exposed count even with zero hits.
        if counted || matches!(r.kind, EventKind::Create | EventKind::Expose) {
            let entry = self.per_meme.entry(m).or_insert(0);
            if counted {
                *entry += 1;
                *self
                    .bins
                    .entry(r.tick / self.bin_width * self.bin_width)
                    .or_insert(0) += 1;
            }
        }
    }

    pub fn finish(self) -> HitSummary {
        HitSummary::from_tables(
            self.per_meme,
            self.bins,
            self.bin_width,
            self.counted.into_iter().collect(),
            self.last_tick,
        )
    }
}

/// Counts hits per meme over `counted_kinds` (usually just EXPOSE) and bins
/// them by tick.
pub fn aggregate_hits<'a, I>(records: I, counted_kinds: &[EventKind], bin_width: u64) -> HitSummary
where
    I: IntoIterator<Item = &'a EventRecord>,
{
    let mut agg = HitAggregator::new(counted_kinds, bin_width);
    for r in records {
        agg.push(r);
    }
    agg.finish()
}
