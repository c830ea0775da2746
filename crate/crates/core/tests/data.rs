use aphase_core::data::{
    encode_dataset, extract_segments, ingest_recording, parse_cap_annotations, parse_edf, read_dataset, select_channel,
    synthesize_subject, write_dataset, AnnotationEvent, ClassCounts, Label, Provenance, Segment, SubjectDataset,
};
use aphase_core::dsp::LogSpectrogram;
use aphase_core::dsp::SpectrogramConfig;
use aphase_core::Error;

struct Signal<'a> {
    label: &'a str,
    samples_per_record: usize,
    digital: Vec<i16>,
    dmin: i32,
    dmax: i32,
    pmin: f64,
    pmax: f64,
}

fn field(out: &mut Vec<u8>, value: &str, width: usize) {
    let mut b = value.as_bytes().to_vec();
    b.resize(width, b' ');
    out.extend_from_slice(&b);
}

/// Minimal EDF writer for test fixtures.
fn edf(signals: &[Signal], records: usize, record_duration: f64) -> Vec<u8> {
    let ns = signals.len();
    let mut out = Vec::new();
    field(&mut out, "0", 8);
    field(&mut out, "X X X X", 80);
    field(&mut out, "Startdate X", 80);
    field(&mut out, "01.01.00", 8);
    field(&mut out, "22.00.00", 8);
    field(&mut out, &(256 + 256 * ns).to_string(), 8);
    field(&mut out, "", 44);
    field(&mut out, &records.to_string(), 8);
    field(&mut out, &record_duration.to_string(), 8);
    field(&mut out, &ns.to_string(), 4);
    let per = |out: &mut Vec<u8>, width: usize, f: &dyn Fn(&Signal) -> String| {
        for s in signals {
            field(out, &f(s), width);
        }
    };
    per(&mut out, 16, &|s| s.label.to_string());
    per(&mut out, 80, &|_| String::new());
    per(&mut out, 8, &|_| "uV".into());
    per(&mut out, 8, &|s| s.pmin.to_string());
    per(&mut out, 8, &|s| s.pmax.to_string());
    per(&mut out, 8, &|s| s.dmin.to_string());
    per(&mut out, 8, &|s| s.dmax.to_string());
    per(&mut out, 80, &|_| String::new());
    per(&mut out, 8, &|s| s.samples_per_record.to_string());
    per(&mut out, 32, &|_| String::new());
    for r in 0..records {
        for s in signals {
            for d in &s.digital[r * s.samples_per_record..(r + 1) * s.samples_per_record] {
                out.extend_from_slice(&d.to_le_bytes());
            }
        }
    }
    out
}

fn tiny() -> Vec<u8> {
    edf(
        &[Signal {
            label: "EEG",
            samples_per_record: 10,
            digital: (0..10).collect(),
            dmin: -32768,
            dmax: 32767,
            pmin: -1000.0,
            pmax: 1000.0,
        }],
        1,
        1.0,
    )
}

#[test]
fn decodes_the_minimal_edf() {
    let rec = parse_edf(&tiny()).unwrap();
    let s = &rec.signals[0];
    assert_eq!(s.samples.len(), 10);
    assert!((s.samples[0] - 0.015259).abs() < 1e-6, "{}", s.samples[0]);
    assert!((s.samples[0] - (32768.0 * 2000.0 / 65535.0 - 1000.0)).abs() < 1e-12);
    assert_eq!(s.decode(-32768), -1000.0);
    assert_eq!(rec.start.seconds_of_day(), 22 * 3600);
    assert_eq!(rec.sampling_rate(0), 10.0);
}

#[test]
fn edf_errors() {
    let bytes = tiny();
    let cut = &bytes[..bytes.len() - 3];
    assert!(matches!(parse_edf(cut), Err(Error::Truncated { offset, .. }) if offset == cut.len()));
    assert!(matches!(parse_edf(&bytes[..100]), Err(Error::Truncated { .. })));
    let mut bad = bytes.clone();
    bad[236..244].copy_from_slice(b"ten     ");
    assert!(matches!(parse_edf(&bad), Err(Error::HeaderFormat { .. })));
    let flat = edf(
        &[Signal {
            label: "EEG",
            samples_per_record: 2,
            digital: vec![0, 0],
            dmin: 5,
            dmax: 5,
            pmin: 0.0,
            pmax: 1.0,
        }],
        1,
        1.0,
    );
    assert!(matches!(parse_edf(&flat), Err(Error::DegenerateScaling { .. })));
}

const SCORING: &str = "Patient ID:\tx\n\nSleep Stage\tPosition\tTime [hh:mm:ss]\tEvent\tDuration[s]\tLocation\n\
S2\tLeft\t22:00:00\tSLEEP-S2\t30\tROC-LOC\n\
S2\tLeft\t22:00:20\tMCAP-A1\t5\tC4-A1\n\
S3\tLeft\t22:01:00\tMCAP-A2\t70\tC4-A1\n";

#[test]
fn annotation_examples() {
    let ev = parse_cap_annotations(SCORING, Some(22.0 * 3600.0)).unwrap();
    assert_eq!(ev.len(), 2, "sleep-stage rows produce no events");
    assert_eq!((ev[0].phase, ev[0].onset, ev[0].duration), (Label::A1, 20.0, 5.0));
    assert!(!ev[0].out_of_range);
    assert!(ev[1].out_of_range);
    assert_eq!(ev[1].line, 6);
}

fn event(phase: Label, onset: f64, duration: f64) -> AnnotationEvent {
    AnnotationEvent {
        phase,
        onset,
        duration,
        sleep_stage: None,
        out_of_range: false,
        line: 0,
    }
}

fn recording(rate: usize, seconds: usize) -> aphase_core::data::EdfRecording {
    let n = rate * seconds;
    let ramp: Vec<i16> = (0..n).map(|i| (i % 1000) as i16 - 500).collect();
    let bytes = edf(
        &[
            Signal {
                label: "ROC-LOC",
                samples_per_record: rate,
                digital: vec![0; n],
                dmin: -2048,
                dmax: 2047,
                pmin: -500.0,
                pmax: 500.0,
            },
            Signal {
                label: "C4-A1",
                samples_per_record: rate,
                digital: ramp,
                dmin: -2048,
                dmax: 2047,
                pmin: -500.0,
                pmax: 500.0,
            },
        ],
        seconds,
        1.0,
    );
    parse_edf(&bytes).unwrap()
}

#[test]
fn isolated_a_phase_gives_one_pair() {
    let rec = recording(512, 60);
    let out = extract_segments(&rec, &[event(Label::A2, 30.0, 6.0)], "C4-A1", "s").unwrap();
    let segs = &out.dataset.segments;
    assert_eq!(segs.len(), 2);
    assert!(segs.iter().all(|s| s.samples().len() == 2048));
    let a = segs.iter().find(|s| s.label == Label::A2).unwrap();
    let n = segs.iter().find(|s| s.label == Label::N).unwrap();
    assert_eq!((a.onset, n.onset), (30.0, 26.0));
    assert_eq!(a.samples()[0], rec.signals[1].samples[30 * 512] as f32);
    assert_eq!(n.samples()[0], rec.signals[1].samples[26 * 512] as f32);
    assert_eq!(out.dataset.channel_name.as_deref(), Some("C4-A1"));
}

#[test]
fn close_a_phases_drop_the_second_n_segment() {
    let rec = recording(512, 60);
    let events = [event(Label::A1, 20.0, 2.0), event(Label::A1, 23.0, 2.0)];
    let out = extract_segments(&rec, &events, "C4-A1", "s").unwrap();
    assert_eq!(out.dataset.counts(), ClassCounts::new(1, 2, 0, 0));
    assert_eq!(out.discarded_overlaps, 1);
}

#[test]
fn events_at_the_edges_are_skipped() {
    let rec = recording(512, 60);
    let events = [event(Label::A3, 2.0, 3.0), event(Label::A3, 57.0, 2.0)];
    let out = extract_segments(&rec, &events, "C4-A1", "s").unwrap();
    assert!(out.dataset.segments.is_empty());
    assert_eq!(out.skipped_at_edges, 2);
}

#[test]
fn slower_recordings_are_resampled() {
    let rec = recording(256, 60);
    let out = extract_segments(&rec, &[event(Label::A1, 30.0, 5.0)], "C4-A1", "s").unwrap();
    assert_eq!(out.dataset.segments.len(), 2);
    assert!(out.dataset.segments.iter().all(|s| s.samples().len() == 2048));
}

#[test]
fn channel_selection() {
    let rec = recording(512, 10);
    assert_eq!(select_channel(&rec, &["C3-A2", "c4 - a1"]).unwrap(), "C4-A1");
    match select_channel(&rec, &["Fp2-F4"]) {
        Err(Error::ChannelNotFound { available, .. }) => assert_eq!(available, ["ROC-LOC", "C4-A1"]),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        extract_segments(&rec, &[], "O2-A1", "s"),
        Err(Error::ChannelNotFound { .. })
    ));
}

#[test]
fn synthetic_subject_examples() {
    let ds = synthesize_subject(1, ClassCounts::new(0, 10, 0, 0), "syn");
    assert_eq!(ds.segments.len(), 10);
    assert!(ds
        .segments
        .iter()
        .all(|s| s.label == Label::A1 && s.samples().len() == 2048));
    assert_eq!(ds.provenance, Provenance::Synthetic);
    let c = ClassCounts::new(3, 3, 3, 3);
    assert_eq!(synthesize_subject(5, c, "a"), synthesize_subject(5, c, "a"));
}

#[test]
fn synthetic_a1_is_delta_dominated_relative_to_a3() {
    let ds = synthesize_subject(2, ClassCounts::new(0, 20, 0, 20), "syn");
    let stft = LogSpectrogram::new(SpectrogramConfig::default()).unwrap();
    let mean_ratio = |label: Label| {
        let segs: Vec<&Segment> = ds.segments.iter().filter(|s| s.label == label).collect();
        segs.iter()
            .map(|s| {
                let p = stft.power(&s.to_signal()).unwrap();
                p.band_power(1, 4) / p.band_power(8, 30)
            })
            .sum::<f64>()
            / segs.len() as f64
    };
    let (a1, a3) = (mean_ratio(Label::A1), mean_ratio(Label::A3));
    assert!(a1 >= 3.0 * a3, "A1 ratio {a1}, A3 ratio {a3}");
}

#[test]
fn dataset_container_round_trips() {
    let ds = synthesize_subject(3, ClassCounts::new(1, 1, 1, 0), "n3");
    let mut bytes = Vec::new();
    write_dataset(&ds, &mut bytes).unwrap();
    let back = read_dataset(&bytes).unwrap();
    assert_eq!(back, ds);
    assert_eq!(encode_dataset(&back).unwrap(), bytes);

    let empty = SubjectDataset {
        subject_id: "subject-9".into(),
        segments: vec![],
        channel_name: None,
        provenance: Provenance::Real,
    };
    let bytes = encode_dataset(&empty).unwrap();
    assert_eq!(bytes.len(), 15 + "subject-9".len());
    assert_eq!(read_dataset(&bytes).unwrap(), empty);

    let mut bad = bytes.clone();
    bad[..4].copy_from_slice(b"XXXX");
    assert!(matches!(read_dataset(&bad), Err(Error::Format(_))));
    assert!(matches!(
        read_dataset(&bytes[..bytes.len() - 2]),
        Err(Error::Truncated { .. })
    ));
}

#[test]
fn ingests_a_recording_with_its_scoring() {
    let n = 512 * 60;
    let bytes = edf(
        &[Signal {
            label: "C4-A1",
            samples_per_record: 512,
            digital: (0..n).map(|i| (i % 200) as i16).collect(),
            dmin: -2048,
            dmax: 2047,
            pmin: -500.0,
            pmax: 500.0,
        }],
        60,
        1.0,
    );
    let out = ingest_recording(&bytes, SCORING, None, "n1").unwrap();
    assert_eq!(out.dataset.counts(), ClassCounts::new(1, 1, 0, 0));
    assert_eq!(out.skipped_at_edges, 1, "the A2 at 60 s runs past the end");
    assert!(matches!(
        ingest_recording(&bytes, SCORING, Some("F4-C4"), "n1"),
        Err(Error::ChannelNotFound { .. })
    ));
}
