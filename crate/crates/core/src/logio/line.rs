use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::engine::{EventKind, EventRecord};

/// Placeholder meme id for RECRUIT lines, which carry no meme.
pub const NO_MEME: &str = "-";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineErrorKind {
    BadTick,
    BadAgent,
    MissingQuote,
    BadRequest,
    BadMeme,
    UnknownKind,
    MemeKindMismatch,
    TrailingInput,
}

impl fmt::Display for LineErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineErrorKind::BadTick => "malformed tick",
            LineErrorKind::BadAgent => "malformed agent id",
            LineErrorKind::MissingQuote => "missing quote",
            LineErrorKind::BadRequest => "malformed request",
            LineErrorKind::BadMeme => "malformed meme id",
            LineErrorKind::UnknownKind => "unknown event kind",
            LineErrorKind::MemeKindMismatch => "meme id does not match event kind",
            LineErrorKind::TrailingInput => "unexpected trailing input",
        })
    }
}

/// Why a single line failed to parse, and the token that failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at `{token}`")]
pub struct LineError {
    pub kind: LineErrorKind,
    pub token: String,
}

/// A line error located in a file (1-based line number).
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {kind} at `{token}`")]
    Line {
        line: usize,
        kind: LineErrorKind,
        token: String,
    },
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

fn fail(kind: LineErrorKind, token: &str) -> LineError {
    LineError {
        kind,
        token: token.to_string(),
    }
}

/// Canonical line for `record`, without the terminating linefeed:
/// `<tick> <agent_id> "GET /m/<meme_id>" <KIND>`.
pub fn emit_line(record: &EventRecord) -> String {
    debug_assert!(record.is_well_formed());
    match record.meme_id {
        Some(m) => format!(
            "{} {} \"GET /m/{}\" {}",
            record.tick, record.agent_id, m, record.kind
        ),
        None => format!(
            "{} {} \"GET /m/{NO_MEME}\" {}",
            record.tick, record.agent_id, record.kind
        ),
    }
}

/// Unsigned decimal without sign or redundant leading zeros.
fn parse_unsigned<T: std::str::FromStr>(s: &str) -> Option<T> {
    let canonical = !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_digit())
        && !(s.len() > 1 && s.starts_with('0'));
    if canonical {
        s.parse().ok()
    } else {
        None
    }
}

/// Parses one line. A single trailing `\n` is allowed; anything else outside
/// the grammar is an error.
pub fn parse_line(text: &str) -> Result<EventRecord, LineError> {
    use LineErrorKind::*;
    let line = text.strip_suffix('\n').unwrap_or(text);

    let (tick_tok, rest) = line.split_once(' ').ok_or_else(|| fail(BadTick, line))?;
    let tick: u64 = parse_unsigned(tick_tok).ok_or_else(|| fail(BadTick, tick_tok))?;

    let (agent_tok, rest) = rest.split_once(' ').ok_or_else(|| fail(BadAgent, rest))?;
    let agent_id = parse_unsigned(agent_tok).ok_or_else(|| fail(BadAgent, agent_tok))?;

    let request = rest
        .strip_prefix('"')
        .ok_or_else(|| fail(MissingQuote, rest.split(' ').next().unwrap_or(rest)))?;
    let (request, rest) = request
        .split_once('"')
        .ok_or_else(|| fail(MissingQuote, request))?;
    let meme_tok = request
        .strip_prefix("GET /m/")
        .ok_or_else(|| fail(BadRequest, request))?;

    let kind_tok = rest
        .strip_prefix(' ')
        .ok_or_else(|| fail(TrailingInput, rest))?;
    if kind_tok.contains(' ') {
        return Err(fail(TrailingInput, kind_tok));
    }
    let kind: EventKind = kind_tok.parse().map_err(|_| fail(UnknownKind, kind_tok))?;

    let meme_id = if meme_tok == NO_MEME {
        None
    } else {
        Some(parse_unsigned(meme_tok).ok_or_else(|| fail(BadMeme, meme_tok))?)
    };
    let record = EventRecord {
        tick,
        kind,
        agent_id,
        meme_id,
    };
    if !record.is_well_formed() {
        return Err(fail(MemeKindMismatch, meme_tok));
    }
    Ok(record)
}

/// Writes each record as one LF-terminated line.
pub fn write_log<W: Write>(mut w: W, records: &[EventRecord]) -> io::Result<()> {
    for r in records {
        w.write_all(emit_line(r).as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Streams records out of a log, one line at a time.
pub struct LogReader<R> {
    inner: R,
    buf: String,
    line: usize,
}

impl<R: BufRead> LogReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            buf: String::new(),
            line: 0,
        }
    }
}

impl<R: BufRead> Iterator for LogReader<R> {
    type Item = Result<EventRecord, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.buf.clear();
        match self.inner.read_line(&mut self.buf) {
            Ok(0) => None,
            Ok(_) => {
                self.line += 1;
                Some(parse_line(&self.buf).map_err(|e| ParseError::Line {
                    line: self.line,
                    kind: e.kind,
                    token: e.token,
                }))
            }
            Err(e) => Some(Err(e.into())),
        }
    }
}
