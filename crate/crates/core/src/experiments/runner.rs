use log::{info, warn};
use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::split::{check_fraction, Split, TaskData};
use crate::nn::{init_network, Gradients, NetworkState, Task, Tensor};
use crate::train::{evaluate, predict_classes, train_network, ConfusionMatrix, TrainConfig};

/// What the validated fraction is a fraction of.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationBasis {
    /// The whole evaluation pool, capped at the number of correct items.
    #[default]
    Pool,
    /// The correctly classified items only.
    Correct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Training hyperparameters; the seed is replaced per run.
    pub train: TrainConfig,
    pub runs_per_cell: usize,
    pub base_seed: u64,
    /// Runs executed concurrently.
    pub jobs: usize,
    pub validation_basis: ValidationBasis,
    /// Continue stage-2 training from the stage-1 weights instead of a fresh
    /// initialization.
    pub warm_start: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            runs_per_cell: 20,
            base_seed: 0,
            jobs: 1,
            validation_basis: ValidationBasis::Pool,
            warm_start: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if self.runs_per_cell == 0 {
            return Err(Error::Parameter("runs per cell must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Parameter("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub confusion: ConfusionMatrix,
    pub train_counts: Vec<usize>,
    pub test_count: usize,
}

impl RunResult {
    pub fn accuracy(&self) -> f64 {
        self.confusion.accuracy()
    }
}

/// All runs of one (subject, task, fraction, validated fraction) cell.
///
/// `validated_fraction` is `None` for sweep cells and `Some(0.0)` for the
/// base case of a retraining experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub subject_id: String,
    pub task: Task,
    pub train_fraction: f64,
    pub validated_fraction: Option<f64>,
    pub runs: Vec<RunResult>,
    pub mean_accuracy: f64,
    /// Population standard deviation over runs.
    pub std_accuracy: f64,
}

impl ExperimentResult {
    pub fn new(
        subject_id: impl Into<String>,
        task: Task,
        train_fraction: f64,
        validated_fraction: Option<f64>,
        runs: Vec<RunResult>,
    ) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::Parameter("an experiment cell needs at least one run".into()));
        }
        let acc: Vec<f64> = runs.iter().map(RunResult::accuracy).collect();
        let n = acc.len() as f64;
        let mean = acc.iter().sum::<f64>() / n;
        let var = acc.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
        Ok(Self {
            subject_id: subject_id.into(),
            task,
            train_fraction,
            validated_fraction,
            runs,
            mean_accuracy: mean,
            std_accuracy: var.sqrt(),
        })
    }
}

const STREAM_INIT: u64 = 1;
const STREAM_TRAIN: u64 = 2;
const STREAM_VALIDATE: u64 = 3;

/// Independent seed for one purpose within a run.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

fn run_jobs<J, O, F>(jobs: usize, items: &[J], f: F) -> Result<Vec<O>>
where
    J: Sync,
    O: Send,
    F: Fn(&J) -> Result<O> + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.min(items.len()))
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

fn train_fresh(data: &TaskData, idx: &[usize], seed: u64, config: &ExperimentConfig) -> Result<NetworkState<f32>> {
    let mut net = init_network(data.task, derive_seed(seed, STREAM_INIT));
    train_on(&mut net, data, idx, seed, config)?;
    Ok(net)
}

fn train_on(
    net: &mut NetworkState<f32>,
    data: &TaskData,
    idx: &[usize],
    seed: u64,
    config: &ExperimentConfig,
) -> Result<()> {
    let set = data.training_set(idx)?;
    let train = TrainConfig {
        seed: derive_seed(seed, STREAM_TRAIN),
        ..config.train.clone()
    };
    train_network(net, &set, &train)?;
    Ok(())
}

fn counts(labels: &[usize], idx: &[usize], classes: usize) -> Vec<usize> {
    let mut c = vec![0; classes];
    for &i in idx {
        c[labels[i]] += 1;
    }
    c
}

fn evaluate_on(net: &NetworkState<f32>, data: &TaskData, idx: &[usize]) -> Result<ConfusionMatrix> {
    let (images, labels) = data.gather(idx);
    evaluate(net, &images, &labels)
}

/// Splits with `seed` and trains a fresh network on the training side.
pub fn train_split(
    data: &TaskData,
    fraction: f64,
    seed: u64,
    config: &ExperimentConfig,
) -> Result<(Split, NetworkState<f32>)> {
    let split = data.split(fraction, seed)?;
    let net = train_fresh(data, &split.train, seed, config)?;
    Ok((split, net))
}

/// Split, train and evaluate once.
pub fn run_single(
    data: &TaskData,
    fraction: f64,
    run: usize,
    seed: u64,
    config: &ExperimentConfig,
) -> Result<RunResult> {
    let (split, net) = train_split(data, fraction, seed, config)?;
    let confusion = evaluate_on(&net, data, &split.test)?;
    info!(
        "{} {} fraction {fraction} run {run}: accuracy {:.4}",
        data.subject_id,
        data.task,
        confusion.accuracy()
    );
    Ok(RunResult {
        run,
        seed,
        confusion,
        train_counts: split.train_counts,
        test_count: split.test.len(),
    })
}

/// Trains `runs_per_cell` networks per fraction; run `r` uses seed
/// `base_seed + r`. Output order follows `fractions` regardless of the
/// number of jobs.
pub fn run_fraction_sweep(
    data: &TaskData,
    fractions: &[f64],
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentResult>> {
    config.validate()?;
    for &f in fractions {
        check_fraction("training fraction", f)?;
    }
    let jobs: Vec<(usize, usize)> = (0..fractions.len())
        .flat_map(|f| (0..config.runs_per_cell).map(move |r| (f, r)))
        .collect();
    let mut runs = run_jobs(config.jobs, &jobs, |&(f, r)| {
        run_single(data, fractions[f], r, config.base_seed.wrapping_add(r as u64), config)
    })?
    .into_iter();
    fractions
        .iter()
        .map(|&f| {
            let cell: Vec<RunResult> = runs.by_ref().take(config.runs_per_cell).collect();
            ExperimentResult::new(data.subject_id.clone(), data.task, f, None, cell)
        })
        .collect()
}

/// Outcome of simulated expert validation; indices are pool positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub validated: Vec<usize>,
    pub remaining: Vec<usize>,
    /// Number of correctly classified pool items.
    pub correct: usize,
}

/// Picks validated items uniformly from the correctly predicted ones.
pub fn select_validated<R: Rng + ?Sized>(
    predictions: &[usize],
    labels: &[usize],
    fraction: f64,
    basis: ValidationBasis,
    rng: &mut R,
) -> Result<Validation> {
    check_fraction("validated fraction", fraction)?;
    if predictions.len() != labels.len() {
        return Err(Error::dim(format!(
            "{} predictions but {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::InsufficientData("validation pool is empty".into()));
    }
    let correct: Vec<usize> = (0..labels.len()).filter(|&i| predictions[i] == labels[i]).collect();
    let base = match basis {
        ValidationBasis::Pool => labels.len(),
        ValidationBasis::Correct => correct.len(),
    };
    let wanted = (fraction * base as f64).round() as usize;
    if correct.is_empty() {
        warn!("no correctly classified items to validate");
    }
    let take = wanted.min(correct.len());
    let mut validated: Vec<usize> = sample(rng, correct.len(), take)
        .into_iter()
        .map(|i| correct[i])
        .collect();
    validated.sort_unstable();
    let mut chosen = vec![false; labels.len()];
    for &i in &validated {
        chosen[i] = true;
    }
    let remaining = (0..labels.len()).filter(|&i| !chosen[i]).collect();
    Ok(Validation {
        validated,
        remaining,
        correct: correct.len(),
    })
}

/// Classifies the pool in inference mode and simulates an expert confirming
/// a share of the correctly classified items.
pub fn simulate_validation<R: Rng + ?Sized>(
    state: &NetworkState<f32>,
    images: &[Tensor<f32>],
    labels: &[usize],
    fraction: f64,
    basis: ValidationBasis,
    rng: &mut R,
) -> Result<Validation> {
    let predictions = predict_classes(state, images)?;
    select_validated(&predictions, labels, fraction, basis, rng)
}

/// One validated-fraction stage of a retraining run.
#[derive(Clone, Debug, PartialEq)]
pub struct RetrainStage {
    pub validated_fraction: f64,
    pub validation: Validation,
    pub result: RunResult,
}

/// Everything a single retraining run produced. `train` and `pool` index the
/// task data; `validation` indexes `pool`.
#[derive(Clone, Debug, PartialEq)]
pub struct RetrainRun {
    pub run: usize,
    pub seed: u64,
    pub train: Vec<usize>,
    pub pool: Vec<usize>,
    /// Stage-1 predictions for every pool item.
    pub stage1_predictions: Vec<usize>,
    pub base: RunResult,
    pub stages: Vec<RetrainStage>,
}

/// Stage-1 training at `base_fraction`, then one stage-2 network per
/// validated fraction trained on the stage-1 set plus the validated items and
/// evaluated on the rest of the pool.
pub fn retrain_single(
    data: &TaskData,
    base_fraction: f64,
    validated_fractions: &[f64],
    run: usize,
    seed: u64,
    config: &ExperimentConfig,
) -> Result<RetrainRun> {
    let split = data.split(base_fraction, seed)?;
    let stage1 = train_fresh(data, &split.train, seed, config)?;
    let (pool_images, pool_labels) = data.gather(&split.test);
    let stage1_predictions = predict_classes(&stage1, &pool_images)?;
    let classes = data.task.num_classes();
    let mut base_cm = ConfusionMatrix::new(data.task.class_names());
    for (&t, &p) in pool_labels.iter().zip(&stage1_predictions) {
        base_cm.record(t, p);
    }
    if base_cm.total() == 0 {
        return Err(Error::Parameter("cannot evaluate on an empty test set".into()));
    }
    info!(
        "{} {} retrain run {run}: base accuracy {:.4}",
        data.subject_id,
        data.task,
        base_cm.accuracy()
    );
    let base = RunResult {
        run,
        seed,
        confusion: base_cm,
        train_counts: split.train_counts.clone(),
        test_count: split.test.len(),
    };

    let mut stages = Vec::with_capacity(validated_fractions.len());
    for (j, &vf) in validated_fractions.iter().enumerate() {
        let stage_seed = derive_seed(seed, STREAM_VALIDATE + j as u64 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(stage_seed);
        let validation = select_validated(&stage1_predictions, &pool_labels, vf, config.validation_basis, &mut rng)?;
        let mut train = split.train.clone();
        train.extend(validation.validated.iter().map(|&p| split.test[p]));
        let net = if config.warm_start {
            let mut net = stage1.clone();
            net.velocity = Gradients::zeros_like(&net);
            train_on(&mut net, data, &train, stage_seed, config)?;
            net
        } else {
            train_fresh(data, &train, stage_seed, config)?
        };
        let remaining: Vec<usize> = validation.remaining.iter().map(|&p| split.test[p]).collect();
        let confusion = evaluate_on(&net, data, &remaining)?;
        info!(
            "{} {} retrain run {run}: validated {vf} ({} items) accuracy {:.4}",
            data.subject_id,
            data.task,
            validation.validated.len(),
            confusion.accuracy()
        );
        stages.push(RetrainStage {
            validated_fraction: vf,
            result: RunResult {
                run,
                seed,
                confusion,
                train_counts: counts(data.labels(), &train, classes),
                test_count: remaining.len(),
            },
            validation,
        });
    }
    Ok(RetrainRun {
        run,
        seed,
        train: split.train,
        pool: split.test,
        stage1_predictions,
        base,
        stages,
    })
}

/// Base case plus one cell per validated fraction, `runs_per_cell` runs each.
/// Stage-1 networks are shared by all validated fractions of a run.
pub fn run_retraining_experiment(
    data: &TaskData,
    base_fraction: f64,
    validated_fractions: &[f64],
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentResult>> {
    config.validate()?;
    check_fraction("base fraction", base_fraction)?;
    for &vf in validated_fractions {
        check_fraction("validated fraction", vf)?;
    }
    let runs: Vec<usize> = (0..config.runs_per_cell).collect();
    let runs = run_jobs(config.jobs, &runs, |&r| {
        retrain_single(
            data,
            base_fraction,
            validated_fractions,
            r,
            config.base_seed.wrapping_add(r as u64),
            config,
        )
    })?;
    let mut out = Vec::with_capacity(validated_fractions.len() + 1);
    out.push(ExperimentResult::new(
        data.subject_id.clone(),
        data.task,
        base_fraction,
        Some(0.0),
        runs.iter().map(|r| r.base.clone()).collect(),
    )?);
    for (j, &vf) in validated_fractions.iter().enumerate() {
        out.push(ExperimentResult::new(
            data.subject_id.clone(),
            data.task,
            base_fraction,
            Some(vf),
            runs.iter().map(|r| r.stages[j].result.clone()).collect(),
        )?);
    }
    Ok(out)
}
