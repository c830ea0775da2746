//! Recording ingestion, segment extraction, synthetic subjects and the
//! dataset container.

mod annotations;
mod container;
mod edf;
mod extract;
mod synth;
mod types;

pub use annotations::{parse_cap_annotations, parse_clock, AnnotationEvent, MAX_A_PHASE_SECONDS, MIN_A_PHASE_SECONDS};
pub use container::{encode_dataset, read_dataset, write_dataset};
pub use edf::{normalize_label, parse_edf, EdfRecording, EdfSignal, StartTime};
pub use extract::{extract_segments, ingest_recording, select_channel, Extraction, DEFAULT_CHANNEL_PRIORITY};
pub use synth::synthesize_subject;
pub use types::{ClassCounts, Label, Provenance, Segment, SubjectDataset};
