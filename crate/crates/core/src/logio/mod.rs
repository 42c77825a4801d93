//! Access-log style event lines and per-meme hit aggregation.
//!
//! Simulated runs and (synthetic) web-server logs share one line format, so
//! both flow through the same analysis:
//!
//! ```text
//! <tick> <agent_id> "GET /m/<meme_id>" <KIND>
//! ```
//!
//! RECRUIT lines carry `-` in place of the meme id.

mod aggregate;
mod line;

pub use aggregate::{aggregate_hits, HitAggregator, HitSummary};
pub use line::{
    emit_line, parse_line, write_log, LineError, LineErrorKind, LogReader, ParseError, NO_MEME,
};

use crate::engine::EventKind;

pub const DEFAULT_COUNTED_KINDS: [EventKind; 1] = [EventKind::Expose];
