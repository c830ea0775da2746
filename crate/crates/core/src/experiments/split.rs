use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::SubjectDataset;
use crate::dsp::LogSpectrogram;
use crate::error::{Error, Result};
use crate::nn::{Task, Tensor};
use crate::train::TrainingSet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
    pub task: Task,
}

impl SplitConfig {
    pub fn new(task: Task, train_fraction: f64, seed: u64) -> Result<Self> {
        check_fraction("training fraction", train_fraction)?;
        Ok(Self {
            train_fraction,
            seed,
            task,
        })
    }
}

pub(crate) fn check_fraction(what: &str, f: f64) -> Result<()> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{what} must lie in (0, 1), got {f}")))
    }
}

/// Number of training items drawn from a class of `size` items.
///
/// Rounds down: 94 items at 12.5% give 11, and 462 items at 25% give 115.
pub fn class_train_count(size: usize, fraction: f64) -> usize {
    ((fraction * size as f64) + 1e-9).floor() as usize
}

/// A train/test partition. Indices refer to whatever sequence was split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Training items per task class.
    pub train_counts: Vec<usize>,
}

/// Splits class-labelled items class by class. Classes without any items are
/// left empty; a populated class whose share rounds to zero is an error.
pub fn split_labels(labels: &[usize], task: Task, fraction: f64, seed: u64) -> Result<Split> {
    check_fraction("training fraction", fraction)?;
    if labels.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no segments eligible for the {} task",
            task.label()
        )));
    }
    let names = task.class_names();
    let mut pools = vec![Vec::new(); names.len()];
    for (i, &l) in labels.iter().enumerate() {
        pools
            .get_mut(l)
            .ok_or(Error::Index {
                index: l,
                len: names.len(),
            })?
            .push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut train_counts = Vec::with_capacity(pools.len());
    for (c, pool) in pools.iter_mut().enumerate() {
        let k = class_train_count(pool.len(), fraction);
        if k == 0 && !pool.is_empty() {
            return Err(Error::InsufficientData(format!(
                "class {} has {} segments; a fraction of {fraction} leaves none for training",
                names[c],
                pool.len()
            )));
        }
        pool.shuffle(&mut rng);
        train.extend_from_slice(&pool[..k]);
        train_counts.push(k);
    }
    let mut in_train = vec![false; labels.len()];
    for &i in &train {
        in_train[i] = true;
    }
    let test = (0..labels.len()).filter(|&i| !in_train[i]).collect();
    Ok(Split {
        train,
        test,
        train_counts,
    })
}

/// Splits the task-eligible segments of `ds`; indices refer to `ds.segments`.
/// The subtype task ignores N segments.
pub fn split_dataset(ds: &SubjectDataset, config: &SplitConfig) -> Result<Split> {
    let (segments, labels): (Vec<usize>, Vec<usize>) = ds
        .segments
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.label.class_for(config.task).map(|c| (i, c)))
        .unzip();
    let split = split_labels(&labels, config.task, config.train_fraction, config.seed)?;
    Ok(Split {
        train: split.train.iter().map(|&i| segments[i]).collect(),
        test: split.test.iter().map(|&i| segments[i]).collect(),
        train_counts: split.train_counts,
    })
}

/// Spectrogram images and class labels of one subject's task-eligible
/// segments, computed once and shared by every run.
#[derive(Clone, Debug)]
pub struct TaskData {
    pub subject_id: String,
    pub task: Task,
    images: Vec<Tensor<f32>>,
    labels: Vec<usize>,
    segments: Vec<usize>,
}

impl TaskData {
    pub fn prepare(ds: &SubjectDataset, task: Task, spectrogram: &LogSpectrogram) -> Result<Self> {
        let (segments, labels): (Vec<usize>, Vec<usize>) = ds
            .segments
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.label.class_for(task).map(|c| (i, c)))
            .unzip();
        let images = segments
            .par_iter()
            .map(|&i| Ok(spectrogram.image(&ds.segments[i].to_signal())?.into_tensor()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            subject_id: ds.subject_id.clone(),
            task,
            images,
            labels,
            segments,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn images(&self) -> &[Tensor<f32>] {
        &self.images
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Position in the source dataset of each item.
    pub fn segment_indices(&self) -> &[usize] {
        &self.segments
    }

    pub fn split(&self, fraction: f64, seed: u64) -> Result<Split> {
        split_labels(&self.labels, self.task, fraction, seed)
    }

    pub fn gather(&self, idx: &[usize]) -> (Vec<Tensor<f32>>, Vec<usize>) {
        idx.iter().map(|&i| (self.images[i].clone(), self.labels[i])).unzip()
    }

    pub fn training_set(&self, idx: &[usize]) -> Result<TrainingSet<f32>> {
        let (images, labels) = self.gather(idx);
        TrainingSet::new(images, labels, self.task.num_classes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(counts: &[usize]) -> Vec<usize> {
        counts
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
            .collect()
    }

    #[test]
    fn floor_training_counts() {
        let s = split_labels(&labels(&[363, 94, 80]), Task::Subtype, 0.125, 1).unwrap();
        assert_eq!(s.train_counts, vec![45, 11, 10]);
        assert_eq!(s.test.len(), 471);
        let s = split_labels(&labels(&[462, 24, 60]), Task::Subtype, 0.25, 1).unwrap();
        assert_eq!(s.train_counts, vec![115, 6, 15]);
        assert_eq!(s.test.len(), 410);
    }

    #[test]
    fn single_class_half_split() {
        let s = split_labels(&[0; 10], Task::Subtype, 0.5, 3).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (5, 5));
        assert!(s.train.iter().all(|i| !s.test.contains(i)));
    }

    #[test]
    fn class_rounding_to_zero_is_named() {
        let err = split_labels(&labels(&[40, 3, 40]), Task::Subtype, 0.25, 0).unwrap_err();
        assert!(matches!(&err, Error::InsufficientData(m) if m.contains("A2")), "{err}");
    }

    #[test]
    fn rejects_bad_fraction() {
        assert!(SplitConfig::new(Task::AN, 1.0, 0).is_err());
        assert!(split_labels(&[0, 1], Task::AN, 0.0, 0).is_err());
    }
}
