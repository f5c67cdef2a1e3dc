use super::FlexError;
use crate::rng;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// Seeded partition of row indices.
///
/// A holdout plan has `folds` empty. A k-fold plan lists every fold; its
/// `train`/`test` fields hold the partition for fold 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub folds: Vec<Vec<usize>>,
}

impl SplitPlan {
    /// `(train, test)` rows when fold `i` is held out.
    pub fn fold(&self, i: usize) -> (Vec<usize>, Vec<usize>) {
        let test = self.folds[i].clone();
        let mut train: Vec<usize> = self.folds.iter().enumerate().filter(|(j, _)| *j != i).flat_map(|(_, f)| f.iter().copied()).collect();
        train.sort_unstable();
        (train, test)
    }
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut rng::sequential(rng::derive_seed(seed, rng::label("split"))));
    rows
}

/// Shuffle, then hold out `round(n × test_fraction)` rows.
pub fn holdout(n: usize, test_fraction: f64, seed: u64) -> Result<SplitPlan, FlexError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(FlexError::InvalidConfig(format!("test_fraction {test_fraction} outside (0, 1)")));
    }
    let n_test = (n as f64 * test_fraction).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(FlexError::InsufficientData { needed: 2, got: n });
    }
    let rows = shuffled(n, seed);
    let mut test = rows[..n_test].to_vec();
    let mut train = rows[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok(SplitPlan { seed, train, test, folds: Vec::new() })
}

/// Shuffle, then cut into `k` folds whose sizes differ by at most one.
pub fn k_fold(n: usize, k: usize, seed: u64) -> Result<SplitPlan, FlexError> {
    if k < 2 {
        return Err(FlexError::InvalidConfig(format!("k = {k}; need at least 2 folds")));
    }
    if n < k {
        return Err(FlexError::InsufficientData { needed: k, got: n });
    }
    let rows = shuffled(n, seed);
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let len = base + usize::from(i < extra);
        let mut f = rows[start..start + len].to_vec();
        f.sort_unstable();
        folds.push(f);
        start += len;
    }
    let mut plan = SplitPlan { seed, train: Vec::new(), test: Vec::new(), folds };
    (plan.train, plan.test) = plan.fold(0);
    Ok(plan)
}
