//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any fails. Criterion 9 runs only when `APHASE_CAP_DIR`
//! points at a directory of `.edf` recordings with matching `.txt` scoring
//! files; criterion 10 is left to the command-line tool.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use aphase_core::data::{ingest_recording, read_dataset, synthesize_subject, write_dataset, ClassCounts, Label};
use aphase_core::dsp::spectrogram::{hann, reflect_pad};
use aphase_core::dsp::{
    cubic_spline_resample, LogSpectrogram, RawSignal, SpectrogramConfig, SAMPLING_RATE, SEGMENT_SAMPLES,
};
use aphase_core::experiments::{retrain_single, run_fraction_sweep, write_results_csv, ExperimentConfig, TaskData};
use aphase_core::nn::{encode_checkpoint, read_checkpoint, Extent, Gradients, NetworkSpec, NetworkState, Shape};
use aphase_core::train::{balanced_batch, oversample_balance, sgd_momentum_step, train_network, TrainingSet};
use aphase_core::{Task, Tensor, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn gradients() -> Outcome {
    let mut worst_layer = 0.0f64;
    for seed in 1..=3 {
        for (name, err) in common::layer_errors(seed) {
            ensure(err < 1e-4, format!("{name} relative error {err:.2e} (seed {seed})"))?;
            worst_layer = worst_layer.max(err);
        }
    }
    let mut worst_net = 0.0f64;
    for task in [Task::AN, Task::Subtype] {
        let err = common::network_error(task, 1);
        ensure(err < 1e-3, format!("{task} network relative error {err:.2e}"))?;
        worst_net = worst_net.max(err);
    }
    Ok(format!("layers {worst_layer:.1e}, network {worst_net:.1e}"))
}

fn shape_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let image = Tensor::from_fn(Shape::new(120, 64, 1), |_, _, _| rng.random_range(-1.0f32..1.0));
    for (task, head) in [(Task::AN, "2"), (Task::Subtype, "3")] {
        let net = NetworkState::<f32>::init(NetworkSpec::new(task), 1);
        let traced = net.trace_shapes(&image).map_err(|e| e.to_string())?;
        let mut shapes: Vec<String> = traced
            .iter()
            .map(|(_, e)| match e {
                Extent::Image(s) => s.to_string(),
                Extent::Vector(n) => n.to_string(),
            })
            .collect();
        shapes.dedup();
        let want = [
            "(120,64,1)",
            "(120,64,2)",
            "(60,32,2)",
            "(60,32,4)",
            "(30,16,4)",
            "(30,16,8)",
            "3840",
            head,
        ];
        ensure(shapes == want, format!("{task}: {shapes:?}"))?;
    }
    Ok("both heads".into())
}

fn pools(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut next = 0;
    counts
        .iter()
        .map(|&n| {
            next += n;
            (next - n..next).collect()
        })
        .collect()
}

fn balancing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let two = pools(&[363, 94]);
    for _ in 0..1000 {
        let b = balanced_batch(&two, 128, &mut rng).map_err(|e| e.to_string())?;
        let second = b.iter().filter(|&&i| i >= 363).count();
        ensure(
            second == 64 && b.len() == 128,
            format!("2-class batch split {}/{second}", b.len() - second),
        )?;
    }
    let three = pools(&[363, 94, 80]);
    for _ in 0..1000 {
        let b = balanced_batch(&three, 128, &mut rng).map_err(|e| e.to_string())?;
        let mut c = [0usize; 3];
        b.iter()
            .for_each(|&i| c[three.iter().position(|p| p.contains(&i)).unwrap()] += 1);
        c.sort_unstable();
        ensure(c == [42, 43, 43], format!("3-class batch {c:?}"))?;
    }
    let over = oversample_balance(&three, &mut rng).map_err(|e| e.to_string())?;
    let sizes: Vec<usize> = over.iter().map(Vec::len).collect();
    ensure(sizes == [363, 363, 363], format!("oversampled {sizes:?}"))?;
    Ok("1000 batches each, oversampled (363, 363, 363)".into())
}

fn optimizer() -> Outcome {
    let spec = NetworkSpec::with_input(Task::AN, Shape::new(8, 8, 1)).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut random_grads = |net: &NetworkState<f64>| {
        let mut g = Gradients::zeros_like(net);
        g.slices_mut()
            .into_iter()
            .for_each(|s| s.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0)));
        g
    };
    let cfg = TrainConfig::default();
    let mut net = NetworkState::<f64>::init(spec, 3);
    let decay: Vec<bool> = net.param_info().iter().map(|p| p.decay).collect();
    let w0: Vec<Vec<f64>> = net.params().iter().map(|p| p.to_vec()).collect();
    let (g1, g2) = (random_grads(&net), random_grads(&net));
    sgd_momentum_step(&mut net, &g1, &cfg).map_err(|e| e.to_string())?;
    let w1: Vec<Vec<f64>> = net.params().iter().map(|p| p.to_vec()).collect();
    sgd_momentum_step(&mut net, &g2, &cfg).map_err(|e| e.to_string())?;
    let w2: Vec<Vec<f64>> = net.params().iter().map(|p| p.to_vec()).collect();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-7 * a.abs().max(b.abs()).max(1e-12);
    for t in 0..w0.len() {
        let l2 = if decay[t] { cfg.l2_coefficient } else { 0.0 };
        for i in 0..w0[t].len() {
            let v1 = -cfg.learning_rate * (g1.slices()[t][i] + l2 * w0[t][i]);
            let v2 = cfg.momentum * v1 - cfg.learning_rate * (g2.slices()[t][i] + l2 * (w0[t][i] + v1));
            ensure(close(w1[t][i] - w0[t][i], v1), format!("step 1 tensor {t}[{i}]"))?;
            ensure(close(w2[t][i] - w0[t][i], v1 + v2), format!("step 2 tensor {t}[{i}]"))?;
        }
    }
    let plain = TrainConfig {
        momentum: 0.0,
        l2_coefficient: 0.0,
        learning_rate: 0.05,
        ..cfg
    };
    let mut net = NetworkState::<f64>::init(spec, 4);
    let before: Vec<Vec<f64>> = net.params().iter().map(|p| p.to_vec()).collect();
    let g = random_grads(&net);
    sgd_momentum_step(&mut net, &g, &plain).map_err(|e| e.to_string())?;
    for ((after, w), g) in net.params().iter().zip(&before).zip(g.slices()) {
        for ((a, w), g) in after.iter().zip(w).zip(g) {
            ensure(a.to_bits() == (w - 0.05 * g).to_bits(), "plain descent differs bitwise")?;
        }
    }
    Ok("two steps within 1e-7, plain descent bitwise".into())
}

fn sine(freq: f64, len: usize, rate: f64) -> Vec<f64> {
    (0..len).map(|i| (2.0 * PI * freq * i as f64 / rate).sin()).collect()
}

fn dsp() -> Outcome {
    let stft = LogSpectrogram::new(SpectrogramConfig::default()).map_err(|e| e.to_string())?;
    let seg = |x: Vec<f64>| RawSignal::new(x, SAMPLING_RATE).map_err(|e| e.to_string());
    for f in [2.0, 10.0, 40.0, 90.0] {
        let p = stft
            .power(&seg(sine(f, SEGMENT_SAMPLES, SAMPLING_RATE))?)
            .map_err(|e| e.to_string())?;
        let peak = p.peak_bin() as f64;
        ensure((peak - f).abs() <= 1.0, format!("{f} Hz peaked at bin {peak}"))?;
    }

    let x = RawSignal::new(sine(5.0, 1024, 256.0), 256.0).map_err(|e| e.to_string())?;
    let y = cubic_spline_resample(&x, 512.0).map_err(|e| e.to_string())?;
    let exact = sine(5.0, y.len(), 512.0);
    let resample_err = y.samples()[20..y.len() - 20]
        .iter()
        .zip(&exact[20..y.len() - 20])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(resample_err < 1e-3, format!("resampling error {resample_err:.2e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise: Vec<f64> = (0..SEGMENT_SAMPLES).map(|_| rng.random_range(-1.0..1.0)).collect();
    let cfg = SpectrogramConfig::default();
    let p = stft.power(&seg(noise.clone())?).map_err(|e| e.to_string())?;
    let padded = reflect_pad(&noise, cfg.padding).map_err(|e| e.to_string())?;
    let w = hann(cfg.window);
    let mut parseval = 0.0f64;
    for f in 0..p.frames {
        let frame = &padded[f * cfg.hop..f * cfg.hop + cfg.window];
        let energy: f64 = frame.iter().zip(&w).map(|(x, w)| (x * w).powi(2)).sum();
        let total: f64 = p.frame(f).iter().sum();
        parseval = parseval.max((total - energy).abs() / energy);
    }
    ensure(parseval < 1e-6, format!("Parseval error {parseval:.2e}"))?;
    Ok(format!("resampling {resample_err:.1e}, Parseval {parseval:.1e}"))
}

const RUN_SEED: u64 = 100;
const RUNS: usize = 3;

fn synthetic_config() -> ExperimentConfig {
    ExperimentConfig {
        train: TrainConfig {
            max_epochs: 12,
            batch_size: 32,
            ..TrainConfig::default()
        },
        runs_per_cell: RUNS,
        base_seed: RUN_SEED,
        ..ExperimentConfig::default()
    }
}

struct Synthetic {
    an: TaskData,
    subtype: TaskData,
}

fn synthetic() -> Result<Synthetic, String> {
    let ds = synthesize_subject(7, ClassCounts::new(200, 120, 60, 60), "synthetic");
    let stft = LogSpectrogram::new(SpectrogramConfig::default()).map_err(|e| e.to_string())?;
    Ok(Synthetic {
        an: TaskData::prepare(&ds, Task::AN, &stft).map_err(|e| e.to_string())?,
        subtype: TaskData::prepare(&ds, Task::Subtype, &stft).map_err(|e| e.to_string())?,
    })
}

fn end_to_end(data: &Synthetic) -> Outcome {
    let cfg = synthetic_config();
    let an = run_fraction_sweep(&data.an, &[0.5], &cfg).map_err(|e| e.to_string())?;
    let sub = run_fraction_sweep(&data.subtype, &[0.5], &cfg).map_err(|e| e.to_string())?;
    let (a, s) = (an[0].mean_accuracy, sub[0].mean_accuracy);
    let detail = format!("A/N {:.2}%, subtype {:.2}%", 100.0 * a, 100.0 * s);
    ensure(a >= 0.90 && s >= 0.85, detail.clone())?;
    Ok(detail)
}

fn retraining(data: &Synthetic) -> Outcome {
    let cfg = synthetic_config();
    let (mut base, mut stage2) = (0.0, 0.0);
    for r in 0..RUNS {
        let run =
            retrain_single(&data.subtype, 0.125, &[0.2], r, RUN_SEED + r as u64, &cfg).map_err(|e| e.to_string())?;
        let stage = &run.stages[0];
        let trained: usize = stage.result.train_counts.iter().sum();
        ensure(
            trained == run.train.len() + stage.validation.validated.len(),
            format!("run {r}: stage-2 set has {trained} items"),
        )?;
        for &p in &stage.validation.validated {
            let truth = data.subtype.labels()[run.pool[p]];
            ensure(
                run.stage1_predictions[p] == truth,
                format!("run {r}: validated item {p} was misclassified"),
            )?;
        }
        base += run.base.accuracy();
        stage2 += stage.result.accuracy();
    }
    let (base, stage2) = (base / RUNS as f64, stage2 / RUNS as f64);
    let detail = format!("base {:.2}%, 20% validated {:.2}%", 100.0 * base, 100.0 * stage2);
    ensure(stage2 >= base - 0.02, detail.clone())?;
    Ok(detail)
}

fn determinism() -> Outcome {
    let spec = NetworkSpec::new(Task::Subtype);
    let ds = synthesize_subject(9, ClassCounts::new(6, 4, 4, 4), "det");
    let stft = LogSpectrogram::new(SpectrogramConfig::default()).map_err(|e| e.to_string())?;
    let data = TaskData::prepare(&ds, Task::Subtype, &stft).map_err(|e| e.to_string())?;
    let cfg = TrainConfig {
        max_epochs: 2,
        batch_size: 6,
        seed: 11,
        ..TrainConfig::default()
    };
    let train = || -> Result<Vec<u8>, String> {
        let set = TrainingSet::new(data.images().to_vec(), data.labels().to_vec(), 3).map_err(|e| e.to_string())?;
        let mut net = NetworkState::<f32>::init(spec, 5);
        train_network(&mut net, &set, &cfg).map_err(|e| e.to_string())?;
        encode_checkpoint(&net).map_err(|e| e.to_string())
    };
    let ckpt = train()?;
    ensure(ckpt == train()?, "checkpoints differ between identical runs")?;
    let back = read_checkpoint(&ckpt).map_err(|e| e.to_string())?;
    ensure(
        encode_checkpoint(&back).map_err(|e| e.to_string())? == ckpt,
        "checkpoint does not round-trip",
    )?;

    let exp = ExperimentConfig {
        train: TrainConfig { max_epochs: 1, ..cfg },
        runs_per_cell: 2,
        ..ExperimentConfig::default()
    };
    let csv = || -> Result<Vec<u8>, String> {
        let results = run_fraction_sweep(&data, &[0.5], &exp).map_err(|e| e.to_string())?;
        let mut out = Vec::new();
        write_results_csv(&results, &mut out).map_err(|e| e.to_string())?;
        Ok(out)
    };
    ensure(csv()? == csv()?, "results files differ between identical runs")?;

    let mut bytes = Vec::new();
    write_dataset(&ds, &mut bytes).map_err(|e| e.to_string())?;
    let again = read_dataset(&bytes).map_err(|e| e.to_string())?;
    ensure(again == ds, "dataset does not round-trip")?;
    let mut rewritten = Vec::new();
    write_dataset(&again, &mut rewritten).map_err(|e| e.to_string())?;
    ensure(rewritten == bytes, "dataset bytes differ after round trip")?;
    Ok(format!(
        "checkpoint {} bytes, dataset {} bytes",
        ckpt.len(),
        bytes.len()
    ))
}

/// Ingests every `<name>.edf` with a sibling `<name>.txt` and compares the
/// pooled class totals.
fn fingerprint(dir: &std::path::Path) -> Outcome {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("edf")))
        .collect();
    entries.sort();
    let mut total = ClassCounts::default();
    let mut subjects = 0;
    for edf in entries {
        let txt = edf.with_extension("txt");
        let Ok(scoring) = std::fs::read_to_string(&txt) else {
            continue;
        };
        let bytes = std::fs::read(&edf).map_err(|e| e.to_string())?;
        let id = edf.file_stem().unwrap_or_default().to_string_lossy();
        let out = ingest_recording(&bytes, &scoring, None, &id).map_err(|e| format!("{}: {e}", edf.display()))?;
        for s in &out.dataset.segments {
            total.add(s.label);
        }
        subjects += 1;
    }
    let got = (
        total.get(Label::N),
        total.a_phases(),
        total.get(Label::A1),
        total.get(Label::A2),
        total.get(Label::A3),
    );
    let detail = format!(
        "{subjects} subjects: N {} A {} (A1 {} A2 {} A3 {})",
        got.0, got.1, got.2, got.3, got.4
    );
    ensure(got == (2887, 3690, 2373, 680, 637), detail.clone())?;
    Ok(detail)
}

fn run(id: u32, name: &str, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(d) => println!("criterion {id} {name}: PASS ({d}; {secs:.1}s)"),
        Err(d) => println!("criterion {id} {name}: FAIL ({d}; {secs:.1}s)"),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run(1, "gradient soundness", gradients);
    ok &= run(2, "shape chain", shape_chain);
    ok &= run(3, "balancing", balancing);
    ok &= run(4, "optimizer", optimizer);
    ok &= run(5, "dsp", dsp);
    match synthetic() {
        Ok(data) => {
            ok &= run(6, "end-to-end synthetic", || end_to_end(&data));
            ok &= run(7, "retraining protocol", || retraining(&data));
        }
        Err(e) => {
            println!("criterion 6 end-to-end synthetic: FAIL ({e})");
            println!("criterion 7 retraining protocol: FAIL ({e})");
            ok = false;
        }
    }
    ok &= run(8, "determinism and round trips", determinism);
    match std::env::var_os("APHASE_CAP_DIR") {
        None => println!("criterion 9 ingestion fingerprint: SKIP (APHASE_CAP_DIR not set)"),
        Some(dir) => ok &= run(9, "ingestion fingerprint", || fingerprint(dir.as_ref())),
    }
    println!("criterion 10 accuracy ballpark: SKIP (run `aphase experiment` on prepared subjects)");
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
