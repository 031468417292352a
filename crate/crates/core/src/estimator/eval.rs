use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::svr::{train, Hyperparams};
use super::{EstimatorError, StoryPointModel, TrainingDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fold_mae: Vec<f64>,
    pub mean_mae: f64,
    /// MAE of predicting the training-fold mean, averaged over folds.
    pub baseline_mae: f64,
    pub baseline_fold_mae: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
}

/// One fold of a cross-validation run, including the model fitted on the
/// other folds.
#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub held_out: Vec<usize>,
    pub model: StoryPointModel,
    pub mae: f64,
    pub baseline_mae: f64,
}

/// Shuffles `0..n` with `seed` and cuts it into `k` folds whose sizes differ
/// by at most one.
pub fn fold_indexes(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EstimatorError> {
    if k < 2 || k > n {
        return Err(EstimatorError::BadFoldCount { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

pub fn cross_validate_folds(
    dataset: &TrainingDataset,
    k: usize,
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<Vec<FoldOutcome>, EstimatorError> {
    let folds = fold_indexes(dataset.len(), k, seed)?;
    let mut outcomes = Vec::with_capacity(k);
    for (f, held_out) in folds.iter().enumerate() {
        let train_idx: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, fold)| fold.iter().copied())
            .collect();
        let train_set = dataset.subset(&train_idx);
        let test_set = dataset.subset(held_out);

        // vocabulary is rebuilt from the training folds only
        let model = train(&train_set, hyperparams)?;
        let targets = train_set.targets();
        let mean = targets.iter().sum::<f64>() / targets.len() as f64;

        let mut abs_err = 0.0;
        let mut base_err = 0.0;
        for ex in test_set.examples() {
            abs_err += (model.predict(&ex.text)? - ex.story_points).abs();
            base_err += (mean - ex.story_points).abs();
        }
        let n = test_set.len() as f64;
        outcomes.push(FoldOutcome {
            held_out: held_out.clone(),
            model,
            mae: abs_err / n,
            baseline_mae: base_err / n,
        });
    }
    Ok(outcomes)
}

pub fn cross_validate(
    dataset: &TrainingDataset,
    k: usize,
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<EvalReport, EstimatorError> {
    let outcomes = cross_validate_folds(dataset, k, hyperparams, seed)?;
    let fold_mae: Vec<f64> = outcomes.iter().map(|o| o.mae).collect();
    let baseline_fold_mae: Vec<f64> = outcomes.iter().map(|o| o.baseline_mae).collect();
    Ok(EvalReport {
        mean_mae: mean(&fold_mae),
        baseline_mae: mean(&baseline_fold_mae),
        fold_mae,
        baseline_fold_mae,
        folds: k,
        seed,
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
