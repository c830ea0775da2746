//! CAP scoring text files: free-form header lines, a tab-separated column
//! header, then one row per scored event.

use crate::data::Label;
use crate::error::{Error, Result};

const SECONDS_PER_DAY: f64 = 86_400.0;
pub const MIN_A_PHASE_SECONDS: f64 = 2.0;
pub const MAX_A_PHASE_SECONDS: f64 = 60.0;

#[derive(Clone, Debug, PartialEq)]
pub struct AnnotationEvent {
    /// `A1`, `A2` or `A3`.
    pub phase: Label,
    /// Seconds from the recording start.
    pub onset: f64,
    pub duration: f64,
    pub sleep_stage: Option<String>,
    /// Set when the duration falls outside the 2-60 s A-phase range.
    pub out_of_range: bool,
    /// 1-based source line.
    pub line: usize,
}

impl AnnotationEvent {
    pub fn end(&self) -> f64 {
        self.onset + self.duration
    }
}

struct Columns {
    stage: Option<usize>,
    time: usize,
    event: usize,
    duration: usize,
}

fn find_columns(fields: &[&str]) -> Option<Columns> {
    let lower: Vec<String> = fields.iter().map(|f| f.trim().to_ascii_lowercase()).collect();
    let find = |pred: &dyn Fn(&str) -> bool| lower.iter().position(|f| pred(f));
    Some(Columns {
        stage: find(&|f| f.starts_with("sleep stage") || f == "stage"),
        time: find(&|f| f.starts_with("time"))?,
        event: find(&|f| f == "event" || f.starts_with("event "))?,
        duration: find(&|f| f.starts_with("duration"))?,
    })
}

fn looks_like_event_row(line: &str) -> bool {
    let upper = line.to_ascii_uppercase();
    upper.contains("MCAP-") || upper.contains("SLEEP-")
}

/// `hh:mm:ss` or `hh.mm.ss`, returned as seconds of the day.
pub fn parse_clock(s: &str) -> Option<f64> {
    let parts: Vec<&str> = s.trim().split([':', '.']).collect();
    let [h, m, sec] = parts[..] else {
        return None;
    };
    let h: u32 = h.parse().ok()?;
    let m: u32 = m.parse().ok()?;
    let sec: u32 = sec.parse().ok()?;
    (h < 24 && m < 60 && sec < 60).then(|| (h * 3600 + m * 60 + sec) as f64)
}

fn a_phase_code(event: &str) -> Option<Label> {
    let upper = event.to_ascii_uppercase();
    [Label::A1, Label::A2, Label::A3]
        .into_iter()
        .find(|l| upper.contains(&l.to_string()))
}

/// Extracts the A-phase events of a CAP scoring file.
///
/// Columns are located by header name. Onsets are measured from
/// `recording_start` (seconds of the day); without it the first scored row
/// is the reference. Clock times earlier than the reference are taken to be
/// past midnight.
pub fn parse_cap_annotations(text: &str, recording_start: Option<f64>) -> Result<Vec<AnnotationEvent>> {
    let mut columns: Option<Columns> = None;
    let mut reference = recording_start;
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let Some(cols) = &columns else {
            if let Some(c) = find_columns(&fields) {
                columns = Some(c);
            } else if looks_like_event_row(line) {
                return Err(Error::Format(format!(
                    "line {lineno}: event row before the column header"
                )));
            }
            continue;
        };

        let get = |idx: usize| fields.get(idx).map(|f| f.trim()).unwrap_or("");
        let time = parse_clock(get(cols.time));
        if reference.is_none() {
            reference = time;
        }
        let Some(phase) = a_phase_code(get(cols.event)) else {
            continue;
        };
        let clock = time.ok_or_else(|| Error::RowFormat {
            line: lineno,
            message: format!("unparseable time `{}`", get(cols.time)),
        })?;
        let duration: f64 = get(cols.duration).parse().map_err(|_| Error::RowFormat {
            line: lineno,
            message: format!("unparseable duration `{}`", get(cols.duration)),
        })?;
        let mut onset = clock - reference.unwrap_or(clock);
        if onset < 0.0 {
            onset += SECONDS_PER_DAY;
        }
        let stage = cols.stage.map(get).filter(|s| !s.is_empty()).map(str::to_string);
        events.push(AnnotationEvent {
            phase,
            onset,
            duration,
            sleep_stage: stage,
            out_of_range: !(MIN_A_PHASE_SECONDS..=MAX_A_PHASE_SECONDS).contains(&duration),
            line: lineno,
        });
    }
    if columns.is_none() && !text.trim().is_empty() {
        return Err(Error::Format(
            "no column header with time, event and duration columns".into(),
        ));
    }
    Ok(events)
}
