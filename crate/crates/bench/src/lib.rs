//! Shared inputs for the benchmarks.

use std::path::PathBuf;

use ust_core::estimator::{TextField, TrainingDataset};

pub const STORY: &str = "As a user, I want to be able to reset my password using my email address, so that I can regain access.";

pub fn sample_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/sample_stories.csv")
}

pub fn sample_dataset() -> TrainingDataset {
    TrainingDataset::load(&sample_path(), TextField::Description).expect("sample dataset")
}

/// `n` stories concatenated into one long text.
pub fn long_text(n: usize) -> String {
    let data = sample_dataset();
    data.texts().iter().cycle().take(n).cloned().collect::<Vec<_>>().join(" ")
}
