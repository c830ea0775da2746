use std::fmt;

use crate::error::{Error, Result};
use crate::nn::{NetworkState, Tensor};
use crate::real::Real;

/// Rows are true classes, columns are predictions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Self {
        let k = labels.len();
        Self {
            labels: labels.iter().map(|s| s.as_ref().to_string()).collect(),
            counts: vec![0; k * k],
        }
    }

    pub fn from_counts<S: AsRef<str>>(labels: &[S], counts: Vec<u64>) -> Result<Self> {
        let mut m = Self::new(labels);
        if counts.len() != m.counts.len() {
            return Err(Error::dim(format!(
                "{} counts for a {}-class confusion matrix",
                counts.len(),
                labels.len()
            )));
        }
        m.counts = counts;
        Ok(m)
    }

    pub fn classes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        let k = self.classes();
        self.counts[truth * k + predicted] += 1;
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.classes() + predicted]
    }

    /// Row-major counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.classes()).map(|i| self.get(i, i)).sum()
    }

    /// Fraction on the diagonal; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.correct() as f64 / n as f64,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        let k = self.classes();
        (0..k).all(|i| (0..k).all(|j| i == j || self.get(i, j) == 0))
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .labels
            .iter()
            .map(String::len)
            .chain(self.counts.iter().map(|c| c.to_string().len()))
            .max()
            .unwrap_or(1)
            .max(4);
        write!(f, "{:>width$}", "true\\pred")?;
        for l in &self.labels {
            write!(f, " {l:>width$}")?;
        }
        writeln!(f)?;
        for (i, l) in self.labels.iter().enumerate() {
            write!(f, "{l:>w$}", w = width.max(9))?;
            for j in 0..self.classes() {
                write!(f, " {:>width$}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

const EVAL_CHUNK: usize = 64;

/// Inference-mode predictions (argmax, lowest index on ties) for every image.
pub fn predict_classes<T: Real>(state: &NetworkState<T>, images: &[Tensor<T>]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(images.len());
    for chunk in images.chunks(EVAL_CHUNK) {
        out.extend(state.predict(chunk)?.argmax());
    }
    Ok(out)
}

/// Classifies `images` in inference mode and tallies the results against
/// `labels`. The network state is not modified.
pub fn evaluate<T: Real>(state: &NetworkState<T>, images: &[Tensor<T>], labels: &[usize]) -> Result<ConfusionMatrix> {
    if images.is_empty() {
        return Err(Error::Parameter("cannot evaluate on an empty test set".into()));
    }
    if images.len() != labels.len() {
        return Err(Error::dim(format!(
            "{} images but {} labels",
            images.len(),
            labels.len()
        )));
    }
    let k = state.spec().num_classes();
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::Index { index: bad, len: k });
    }
    let mut cm = ConfusionMatrix::new(state.spec().task.class_names());
    for (&truth, pred) in labels.iter().zip(predict_classes(state, images)?) {
        cm.record(truth, pred);
    }
    Ok(cm)
}
