//! Linear epsilon-insensitive support vector regression.
//!
//! Minimises `0.5 * |w|^2 + C * sum(max(0, |y - (w.x + b)| - eps))` by
//! seeded stochastic subgradient descent. The weight vector is stored as
//! `scale * v` so the per-step L2 shrink costs O(1) and a gradient step only
//! touches the non-zero features of one sample.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::vocabulary::{SparseVector, Vocabulary, VocabularyConfig};
use super::{EstimatorError, StoryPointModel, TrainingDataset};

/// Step size for epoch `e` is `initial / (1 + decay * e)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningRate {
    pub initial: f64,
    pub decay: f64,
}

impl LearningRate {
    pub fn at_epoch(&self, epoch: usize) -> f64 {
        self.initial / (1.0 + self.decay * epoch as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    /// Loss weight `C`.
    pub c: f64,
    /// Half-width of the insensitive tube.
    pub epsilon: f64,
    pub learning_rate: LearningRate,
    pub epochs: usize,
    pub seed: u64,
    pub vocabulary: VocabularyConfig,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            c: 1.0,
            epsilon: 0.5,
            learning_rate: LearningRate { initial: 0.1, decay: 0.01 },
            epochs: 200,
            seed: 42,
            vocabulary: VocabularyConfig::default(),
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let problem = if !positive(self.c) {
            Some("c must be positive")
        } else if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            Some("epsilon must be non-negative")
        } else if !positive(self.learning_rate.initial) || self.learning_rate.initial >= 1.0 {
            Some("initial learning rate must lie in (0, 1)")
        } else if !(self.learning_rate.decay.is_finite() && self.learning_rate.decay >= 0.0) {
            Some("learning rate decay must be non-negative")
        } else if self.epochs == 0 {
            Some("epochs must be at least 1")
        } else {
            None
        };
        match problem {
            Some(msg) => Err(EstimatorError::InvalidHyperparams(msg)),
            None => Ok(()),
        }
    }
}

/// Per-epoch objective values; entry 0 is the untrained starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    pub objective: Vec<f64>,
}

pub fn train(
    dataset: &TrainingDataset,
    hyperparams: &Hyperparams,
) -> Result<StoryPointModel, EstimatorError> {
    train_with_trace(dataset, hyperparams).map(|(model, _)| model)
}

pub fn train_with_trace(
    dataset: &TrainingDataset,
    hyperparams: &Hyperparams,
) -> Result<(StoryPointModel, TrainingTrace), EstimatorError> {
    hyperparams.validate()?;
    if dataset.is_empty() {
        return Err(EstimatorError::EmptyDataset);
    }
    let vocabulary = Vocabulary::build(&dataset.texts(), hyperparams.vocabulary)?;
    let features: Vec<SparseVector> =
        dataset.texts().iter().map(|t| vocabulary.transform(t)).collect();
    let targets = dataset.targets();

    let mut solver = Solver::new(vocabulary.len(), median(&targets), hyperparams);
    let mut trace = vec![solver.objective(&features, &targets)];
    let mut order: Vec<usize> = (0..targets.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(hyperparams.seed);

    for epoch in 0..hyperparams.epochs {
        let eta = hyperparams.learning_rate.at_epoch(epoch);
        order.shuffle(&mut rng);
        for &i in &order {
            solver.step(&features[i], targets[i], eta, targets.len());
        }
        let objective = solver.objective(&features, &targets);
        if !objective.is_finite() {
            return Err(EstimatorError::NonFiniteLoss { epoch });
        }
        trace.push(objective);
    }

    let weights = solver.weights();
    let model = StoryPointModel::new(vocabulary, weights, solver.bias, *hyperparams)?;
    Ok((model, TrainingTrace { objective: trace }))
}

struct Solver {
    v: Vec<f64>,
    scale: f64,
    bias: f64,
    c: f64,
    epsilon: f64,
}

impl Solver {
    fn new(dim: usize, bias: f64, hp: &Hyperparams) -> Self {
        Self { v: vec![0.0; dim], scale: 1.0, bias, c: hp.c, epsilon: hp.epsilon }
    }

    fn predict(&self, x: &SparseVector) -> f64 {
        self.scale * x.dot(&self.v) + self.bias
    }

    fn step(&mut self, x: &SparseVector, y: f64, eta: f64, n: usize) {
        let residual = y - self.predict(x);
        self.scale *= 1.0 - eta / n as f64;
        if residual.abs() > self.epsilon {
            let g = eta * self.c * residual.signum();
            for &(j, xj) in x.entries() {
                self.v[j] += g * xj / self.scale;
            }
            self.bias += g;
        }
        if self.scale < 1e-9 {
            for v in &mut self.v {
                *v *= self.scale;
            }
            self.scale = 1.0;
        }
    }

    fn objective(&self, features: &[SparseVector], targets: &[f64]) -> f64 {
        let norm_sq = self.scale * self.scale * self.v.iter().map(|v| v * v).sum::<f64>();
        let loss: f64 = features
            .iter()
            .zip(targets)
            .map(|(x, y)| ((y - self.predict(x)).abs() - self.epsilon).max(0.0))
            .sum();
        0.5 * norm_sq + self.c * loss
    }

    fn weights(&self) -> Vec<f64> {
        self.v.iter().map(|v| v * self.scale).collect()
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}
