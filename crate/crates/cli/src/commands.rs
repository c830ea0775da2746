use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use aphase_core::data::{
    extract_segments, parse_cap_annotations, parse_edf, read_dataset, select_channel, synthesize_subject,
    write_dataset, SubjectDataset,
};
use aphase_core::dsp::LogSpectrogram;
use aphase_core::experiments::{
    aggregate_report, read_results_csv, run_fraction_sweep, run_retraining_experiment, train_split, write_results_csv,
    TaskData,
};
use aphase_core::nn::{read_checkpoint, write_checkpoint};
use aphase_core::train::{evaluate, ConfusionMatrix};
use log::{info, warn};

use crate::config::CliConfig;
use crate::{
    Cli, Command, EvaluateArgs, ExperimentArgs, Mode, PrepareArgs, ReportArgs, SynthArgs, TrainArgs, TrainOverrides,
};

pub fn run(cli: Cli) -> Result<()> {
    let mut config = CliConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Prepare(a) => prepare(&config, a),
        Command::Synth(a) => synth(&config, a),
        Command::Train(a) => {
            apply(&mut config, &a.overrides)?;
            train(&config, a)
        }
        Command::Evaluate(a) => evaluate_cmd(&config, a),
        Command::Experiment(a) => {
            apply(&mut config, &a.overrides)?;
            experiment(config, a)
        }
        Command::Report(a) => report(a),
    }
}

fn apply(config: &mut CliConfig, o: &TrainOverrides) -> Result<()> {
    let t = &mut config.train;
    t.max_epochs = o.epochs.unwrap_or(t.max_epochs);
    t.batch_size = o.batch_size.unwrap_or(t.batch_size);
    t.learning_rate = o.learning_rate.unwrap_or(t.learning_rate);
    t.momentum = o.momentum.unwrap_or(t.momentum);
    t.l2_coefficient = o.l2.unwrap_or(t.l2_coefficient);
    t.validate()?;
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_dataset(path: &Path) -> Result<SubjectDataset> {
    read_dataset(&read_file(path)?).with_context(|| format!("invalid dataset {}", path.display()))
}

fn save_dataset(ds: &SubjectDataset, path: &Path) -> Result<()> {
    let mut bytes = Vec::new();
    write_dataset(ds, &mut bytes)?;
    write_file(path, &bytes)
}

fn task_data(config: &CliConfig, ds: &SubjectDataset, task: aphase_core::Task) -> Result<TaskData> {
    let stft = LogSpectrogram::new(config.stft.clone())?;
    TaskData::prepare(ds, task, &stft).with_context(|| format!("subject {}", ds.subject_id))
}

fn print_confusion(cm: &ConfusionMatrix) {
    println!("accuracy {:.4} ({}/{})", cm.accuracy(), cm.correct(), cm.total());
    print!("{cm}");
}

fn prepare(config: &CliConfig, a: PrepareArgs) -> Result<()> {
    let scoring = fs::read_to_string(&a.annotations)
        .with_context(|| format!("cannot read annotations {}", a.annotations.display()))?;
    let bytes = read_file(&a.edf)?;
    let recording = parse_edf(&bytes).with_context(|| format!("invalid EDF file {}", a.edf.display()))?;
    let channel = match &a.channel {
        Some(c) => c.clone(),
        None => select_channel(&recording, &config.channel_priority)
            .with_context(|| format!("no usable channel in {}", a.edf.display()))?,
    };
    let start = recording.start.seconds_of_day() as f64;
    let events = parse_cap_annotations(&scoring, Some(start))
        .with_context(|| format!("invalid annotations {}", a.annotations.display()))?;
    let flagged = events.iter().filter(|e| e.out_of_range).count();
    if flagged > 0 {
        warn!("{flagged} A-phases outside the 2-60 s range are kept");
    }
    let out = extract_segments(&recording, &events, &channel, &a.subject)
        .with_context(|| format!("cannot extract from {}", a.edf.display()))?;
    info!(
        "channel {channel}: {} N-segments dropped for overlap, {} events skipped at the edges",
        out.discarded_overlaps, out.skipped_at_edges
    );
    let path = a
        .out
        .unwrap_or_else(|| config.paths.datasets.join(format!("{}.capd", a.subject)));
    save_dataset(&out.dataset, &path)?;
    println!("{}", out.dataset.summary());
    Ok(())
}

fn synth(config: &CliConfig, a: SynthArgs) -> Result<()> {
    let ds = synthesize_subject(a.seed, a.counts, &a.subject);
    let path = a
        .out
        .unwrap_or_else(|| config.paths.datasets.join(format!("{}.capd", a.subject)));
    save_dataset(&ds, &path)?;
    println!("{}", ds.summary());
    Ok(())
}

fn train(config: &CliConfig, a: TrainArgs) -> Result<()> {
    let ds = load_dataset(&a.dataset)?;
    let data = task_data(config, &ds, a.task)?;
    let (split, net) = train_split(&data, a.fraction, a.seed, &config.experiment_config())?;
    let (images, labels) = data.gather(&split.test);
    let cm = evaluate(&net, &images, &labels)?;
    let path = a.checkpoint_out.unwrap_or_else(|| {
        config
            .paths
            .checkpoints
            .join(format!("{}-{}-{}.capn", ds.subject_id, a.task, a.seed))
    });
    let mut bytes = Vec::new();
    write_checkpoint(&net, &mut bytes)?;
    write_file(&path, &bytes)?;
    let counts: Vec<String> = split.train_counts.iter().map(usize::to_string).collect();
    println!(
        "subject {} task {} fraction {} seed {}: train {} ({}), test {}",
        ds.subject_id,
        a.task,
        a.fraction,
        a.seed,
        split.train.len(),
        counts.join("/"),
        split.test.len()
    );
    print_confusion(&cm);
    Ok(())
}

fn evaluate_cmd(config: &CliConfig, a: EvaluateArgs) -> Result<()> {
    let net = read_checkpoint(&read_file(&a.checkpoint)?)
        .with_context(|| format!("invalid checkpoint {}", a.checkpoint.display()))?;
    let ds = load_dataset(&a.dataset)?;
    let data = task_data(config, &ds, net.spec().task)?;
    let idx: Vec<usize> = match (a.fraction, a.seed) {
        (Some(f), Some(seed)) => data.split(f, seed)?.test,
        _ => (0..data.len()).collect(),
    };
    let (images, labels) = data.gather(&idx);
    print_confusion(&evaluate(&net, &images, &labels)?);
    Ok(())
}

fn experiment(mut config: CliConfig, a: ExperimentArgs) -> Result<()> {
    let e = &mut config.experiment;
    if let Some(v) = a.fractions {
        e.fractions = v;
    }
    if let Some(v) = a.validated_fractions {
        e.validated_fractions = v;
    }
    e.base_fraction = a.base_fraction.unwrap_or(e.base_fraction);
    e.runs_per_cell = a.runs.unwrap_or(e.runs_per_cell);
    e.base_seed = a.base_seed.unwrap_or(e.base_seed);
    e.jobs = a.jobs.unwrap_or(e.jobs);
    config.validate()?;
    let cfg = config.experiment_config();
    let e = &config.experiment;

    let mut results = Vec::new();
    for path in &a.dataset {
        let ds = load_dataset(path)?;
        let data = task_data(&config, &ds, a.task)?;
        info!("{}: {} segments for the {} task", ds.subject_id, data.len(), a.task);
        let cells = match a.mode {
            Mode::Sweep => run_fraction_sweep(&data, &e.fractions, &cfg),
            Mode::Retrain => run_retraining_experiment(&data, e.base_fraction, &e.validated_fractions, &cfg),
        }
        .with_context(|| format!("experiment on {}", path.display()))?;
        results.extend(cells);
    }

    let stem = format!("{}-{}", a.mode.name(), a.task);
    let reports = &config.paths.reports;
    let csv_path = a.results_out.unwrap_or_else(|| reports.join(format!("{stem}.csv")));
    let md_path = a.report_out.unwrap_or_else(|| reports.join(format!("{stem}.md")));
    let mut csv = Vec::new();
    write_results_csv(&results, &mut csv)?;
    write_file(&csv_path, &csv)?;
    let table = aggregate_report(&results);
    write_file(&md_path, table.as_bytes())?;
    print!("{table}");
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let mut results = Vec::new();
    for path in &a.results {
        let bytes = read_file(path)?;
        results
            .extend(read_results_csv(bytes.as_slice()).with_context(|| format!("invalid results {}", path.display()))?);
    }
    let table = aggregate_report(&results);
    if let Some(out) = &a.out {
        write_file(out, table.as_bytes())?;
    }
    print!("{table}");
    Ok(())
}
