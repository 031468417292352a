use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::dataset::MAX_STORY_POINTS;
use super::svr::Hyperparams;
use super::vocabulary::{SparseVector, Vocabulary};
use super::EstimatorError;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "UST-MODEL";

/// A trained story-point regressor: vocabulary, linear weights and bias.
///
/// Instances are validated on construction and immutable afterwards, so one
/// model can serve concurrent predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoryPointModel {
    format_version: u32,
    hyperparams: Hyperparams,
    vocabulary: Vocabulary,
    weights: Vec<f64>,
    bias: f64,
}

impl StoryPointModel {
    pub fn new(
        vocabulary: Vocabulary,
        weights: Vec<f64>,
        bias: f64,
        hyperparams: Hyperparams,
    ) -> Result<Self, EstimatorError> {
        let model = Self {
            format_version: FORMAT_VERSION,
            hyperparams,
            vocabulary,
            weights,
            bias,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<(), EstimatorError> {
        if self.weights.len() != self.vocabulary.len()
            || self.vocabulary.idf().len() != self.vocabulary.len()
        {
            return Err(EstimatorError::InvalidModel("weights do not match vocabulary size"));
        }
        let finite = self.bias.is_finite()
            && self.weights.iter().all(|w| w.is_finite())
            && self.vocabulary.idf().iter().all(|v| v.is_finite() && *v > 0.0);
        if !finite {
            return Err(EstimatorError::InvalidModel("non-finite parameter"));
        }
        Ok(())
    }

    pub fn format_version(&self) -> u32 {
        self.format_version
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hyperparams
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn features(&self, text: &str) -> SparseVector {
        self.vocabulary.transform(text)
    }

    /// Unclamped `w.x + b`.
    pub fn raw_score(&self, text: &str) -> Result<f64, EstimatorError> {
        if self.weights.len() != self.vocabulary.len() {
            return Err(EstimatorError::InvalidModel("weights do not match vocabulary size"));
        }
        Ok(self.features(text).dot(&self.weights) + self.bias)
    }

    /// Story points for `text`, clamped to `[0, 100]`.
    pub fn predict(&self, text: &str) -> Result<f64, EstimatorError> {
        let raw = self.raw_score(text)?;
        if raw.is_nan() {
            return Err(EstimatorError::InvalidModel("prediction is NaN"));
        }
        Ok(raw.clamp(0.0, MAX_STORY_POINTS))
    }

    /// Writes the model as a header line, a checksum line and a JSON body.
    ///
    /// ```text
    /// UST-MODEL 1
    /// sha256 <hex digest of the body>
    /// {...}
    /// ```
    pub fn save(&self, path: &Path) -> Result<(), EstimatorError> {
        let body = serde_json::to_string(self).map_err(|e| EstimatorError::Parse(e.to_string()))?;
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        let io_err = |source| EstimatorError::Io { path: path.to_owned(), source };

        let tmp = path.with_extension("tmp");
        let mut file = fs::File::create(&tmp).map_err(io_err)?;
        write!(file, "{MAGIC} {}\nsha256 {digest}\n{body}\n", self.format_version)
            .and_then(|_| file.sync_all())
            .map_err(io_err)?;
        fs::rename(&tmp, path).map_err(io_err)
    }

    pub fn load(path: &Path) -> Result<Self, EstimatorError> {
        let bytes = fs::read(path).map_err(|source| EstimatorError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, EstimatorError> {
        let text = std::str::from_utf8(bytes).map_err(|_| EstimatorError::CorruptModel("not UTF-8"))?;
        let mut parts = text.splitn(3, '\n');
        let header = parts.next().unwrap_or_default();
        let version = header
            .strip_prefix(MAGIC)
            .and_then(|rest| rest.trim().parse::<u32>().ok())
            .ok_or(EstimatorError::CorruptModel("missing header"))?;
        if version != FORMAT_VERSION {
            return Err(EstimatorError::VersionMismatch { found: version, expected: FORMAT_VERSION });
        }
        let digest = parts
            .next()
            .and_then(|line| line.strip_prefix("sha256 "))
            .ok_or(EstimatorError::CorruptModel("missing checksum"))?;
        let body = parts
            .next()
            .ok_or(EstimatorError::CorruptModel("missing body"))?
            .trim_end_matches('\n');
        if hex::encode(Sha256::digest(body.as_bytes())) != digest.trim() {
            return Err(EstimatorError::CorruptModel("checksum mismatch"));
        }

        let mut model: Self =
            serde_json::from_str(body).map_err(|_| EstimatorError::CorruptModel("malformed body"))?;
        if model.format_version != version {
            return Err(EstimatorError::CorruptModel("header and body versions differ"));
        }
        model.vocabulary.rebuild_index();
        model.validate()?;
        Ok(model)
    }
}

pub fn save_model(model: &StoryPointModel, path: &Path) -> Result<(), EstimatorError> {
    model.save(path)
}

pub fn load_model(path: &Path) -> Result<StoryPointModel, EstimatorError> {
    StoryPointModel::load(path)
}
