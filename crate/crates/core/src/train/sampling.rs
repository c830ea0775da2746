//! Class balancing, at the dataset level (oversampling) and at the batch
//! level (equal per-class draws with replacement).

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};

fn check_pools(pools: &[Vec<usize>]) -> Result<()> {
    if pools.is_empty() {
        return Err(Error::InsufficientData("no classes to sample from".into()));
    }
    if let Some(c) = pools.iter().position(Vec::is_empty) {
        return Err(Error::InsufficientData(format!("class {c} has no samples")));
    }
    Ok(())
}

/// Pads every class list up to the size of the largest one by copying
/// uniformly chosen members of the same class. Original members stay first,
/// in their original order.
pub fn oversample_balance<R: Rng + ?Sized>(pools: &[Vec<usize>], rng: &mut R) -> Result<Vec<Vec<usize>>> {
    check_pools(pools)?;
    let target = pools.iter().map(Vec::len).max().unwrap_or(0);
    Ok(pools
        .iter()
        .map(|pool| {
            let mut out = pool.clone();
            out.extend((pool.len()..target).map(|_| *pool.choose(rng).unwrap()));
            out
        })
        .collect())
}

/// Per-class draw counts for a batch: equal shares, with the remainder
/// assigned one each to randomly chosen classes.
pub fn balanced_counts<R: Rng + ?Sized>(classes: usize, batch_size: usize, rng: &mut R) -> Vec<usize> {
    let mut counts = vec![batch_size / classes; classes];
    let mut order: Vec<usize> = (0..classes).collect();
    order.shuffle(rng);
    for &c in order.iter().take(batch_size % classes) {
        counts[c] += 1;
    }
    counts
}

/// Draws a batch of sample indices with per-class counts equal up to one.
/// Sampling is with replacement inside each class pool; the result is
/// grouped by class.
pub fn balanced_batch<R: Rng + ?Sized>(pools: &[Vec<usize>], batch_size: usize, rng: &mut R) -> Result<Vec<usize>> {
    check_pools(pools)?;
    let counts = balanced_counts(pools.len(), batch_size, rng);
    let mut batch = Vec::with_capacity(batch_size);
    for (pool, &n) in pools.iter().zip(&counts) {
        batch.extend((0..n).map(|_| *pool.choose(rng).unwrap()));
    }
    Ok(batch)
}
