use log::warn;

use crate::data::{normalize_label, AnnotationEvent, EdfRecording, Label, Provenance, Segment, SubjectDataset};
use crate::dsp::{cubic_spline_resample, SAMPLING_RATE, SEGMENT_SAMPLES};
use crate::error::{Error, Result};

/// Channel preference used when none is configured.
pub const DEFAULT_CHANNEL_PRIORITY: [&str; 4] = ["C4-A1", "C3-A2", "C4-P4", "C3-P3"];

const SEGMENT_SECONDS: f64 = SEGMENT_SAMPLES as f64 / SAMPLING_RATE;

/// Picks the first available label from `priority`, falling back to the
/// first signal whose label mentions EEG.
pub fn select_channel<S: AsRef<str>>(recording: &EdfRecording, priority: &[S]) -> Result<String> {
    for want in priority {
        if let Some(i) = recording.signal_index(want.as_ref()) {
            return Ok(recording.signals[i].label.clone());
        }
    }
    recording
        .signals
        .iter()
        .find(|s| normalize_label(&s.label).contains("EEG"))
        .map(|s| s.label.clone())
        .ok_or_else(|| Error::ChannelNotFound {
            requested: priority.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(" | "),
            available: recording.labels(),
        })
}

/// Segments plus bookkeeping of what was left out.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub dataset: SubjectDataset,
    /// Events whose A or N window falls outside the recording.
    pub skipped_at_edges: usize,
    /// N windows dropped because they overlap an earlier A-phase.
    pub discarded_overlaps: usize,
}

/// Cuts a 4 s A-segment starting at every event onset and a 4 s N-segment
/// ending there. The N-segment is dropped when it overlaps any earlier
/// A-phase `[onset, onset + duration)`. Events whose windows leave the
/// recording are skipped entirely. The channel is resampled to 512 Hz first
/// when needed.
pub fn extract_segments(
    recording: &EdfRecording,
    events: &[AnnotationEvent],
    channel: &str,
    subject_id: &str,
) -> Result<Extraction> {
    let index = recording.signal_index(channel).ok_or_else(|| Error::ChannelNotFound {
        requested: channel.into(),
        available: recording.labels(),
    })?;
    let mut signal = recording.raw_signal(index)?;
    if signal.sampling_rate() != SAMPLING_RATE {
        signal = cubic_spline_resample(&signal, SAMPLING_RATE)?;
    }
    let samples = signal.samples();

    let mut order: Vec<&AnnotationEvent> = events.iter().filter(|e| e.phase.is_a_phase()).collect();
    order.sort_by(|a, b| a.onset.total_cmp(&b.onset));

    let mut segments = Vec::new();
    let mut skipped_at_edges = 0;
    let mut discarded_overlaps = 0;
    // Latest end among events with a strictly earlier onset.
    let mut prior_end = f64::NEG_INFINITY;
    let mut i = 0;
    while i < order.len() {
        let onset = order[i].onset;
        let mut j = i;
        while j < order.len() && order[j].onset == onset {
            j += 1;
        }
        for event in &order[i..j] {
            let start = (event.onset * SAMPLING_RATE).round() as i64;
            let n_start = start - SEGMENT_SAMPLES as i64;
            if n_start < 0 || start + SEGMENT_SAMPLES as i64 > samples.len() as i64 {
                skipped_at_edges += 1;
                continue;
            }
            let (s, ns) = (start as usize, n_start as usize);
            let cut = |from: usize| {
                samples[from..from + SEGMENT_SAMPLES]
                    .iter()
                    .map(|&v| v as f32)
                    .collect()
            };
            segments.push(Segment::new(event.phase, event.onset, cut(s))?);
            if prior_end > event.onset - SEGMENT_SECONDS {
                discarded_overlaps += 1;
            } else {
                segments.push(Segment::new(Label::N, event.onset - SEGMENT_SECONDS, cut(ns))?);
            }
        }
        for event in &order[i..j] {
            prior_end = prior_end.max(event.end());
        }
        i = j;
    }
    if skipped_at_edges > 0 {
        warn!("{subject_id}: skipped {skipped_at_edges} events too close to the recording edges");
    }

    Ok(Extraction {
        dataset: SubjectDataset {
            subject_id: subject_id.into(),
            segments,
            channel_name: Some(recording.signals[index].label.clone()),
            provenance: Provenance::Real,
        },
        skipped_at_edges,
        discarded_overlaps,
    })
}

/// Parses one recording and its scoring file and extracts its segments.
/// `channel` overrides the priority list. Out-of-range A-phases are kept.
pub fn ingest_recording(
    edf_bytes: &[u8],
    scoring: &str,
    channel: Option<&str>,
    subject_id: &str,
) -> Result<Extraction> {
    let recording = crate::data::parse_edf(edf_bytes)?;
    let channel = match channel {
        Some(c) => c.to_string(),
        None => select_channel(&recording, &DEFAULT_CHANNEL_PRIORITY)?,
    };
    let start = recording.start.seconds_of_day() as f64;
    let events = crate::data::parse_cap_annotations(scoring, Some(start))?;
    let flagged = events.iter().filter(|e| e.out_of_range).count();
    if flagged > 0 {
        warn!("{subject_id}: {flagged} A-phases outside the 2-60 s range");
    }
    extract_segments(&recording, &events, &channel, subject_id)
}
