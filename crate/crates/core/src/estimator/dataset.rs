use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EstimatorError;

pub const MAX_STORY_POINTS: f64 = 100.0;

/// Which issue fields make up the text the model sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextField {
    #[default]
    Description,
    TitleAndDescription,
}

impl TextField {
    pub fn compose(self, title: &str, description: &str) -> String {
        match self {
            TextField::Description => description.to_owned(),
            TextField::TitleAndDescription if title.is_empty() => description.to_owned(),
            TextField::TitleAndDescription => format!("{title}. {description}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub text: String,
    pub story_points: f64,
}

/// Stories paired with story points in `[0, 100]`. Never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingDataset {
    examples: Vec<Example>,
}

#[derive(Deserialize)]
struct Row {
    #[serde(default)]
    title: String,
    #[serde(default)]
    description: Option<String>,
    weight: Option<f64>,
}

impl TrainingDataset {
    pub fn new(examples: Vec<Example>) -> Result<Self, EstimatorError> {
        if examples.is_empty() {
            return Err(EstimatorError::EmptyDataset);
        }
        if let Some(pos) = examples.iter().position(|e| !valid_target(e.story_points)) {
            return Err(EstimatorError::InvalidTarget {
                row: pos,
                value: examples[pos].story_points,
            });
        }
        Ok(Self { examples })
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.examples.iter().map(|e| e.text.as_str()).collect()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.examples.iter().map(|e| e.story_points).collect()
    }

    pub(crate) fn subset(&self, indexes: &[usize]) -> Self {
        Self {
            examples: indexes.iter().map(|&i| self.examples[i].clone()).collect(),
        }
    }

    /// Loads a CSV (header with `title,description,weight`, extra columns
    /// ignored) or a JSON array, picked by file extension.
    pub fn load(path: &Path, field: TextField) -> Result<Self, EstimatorError> {
        let is_json = path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
        let file = File::open(path).map_err(|source| EstimatorError::Io {
            path: path.to_owned(),
            source,
        })?;
        if is_json {
            Self::from_json_reader(file, field)
        } else {
            Self::from_csv_reader(file, field)
        }
    }

    pub fn from_csv_reader<R: Read>(reader: R, field: TextField) -> Result<Self, EstimatorError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let rows = rdr
            .deserialize::<Row>()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| EstimatorError::Parse(e.to_string()))?;
        Self::from_rows(rows, field)
    }

    pub fn from_json_reader<R: Read>(reader: R, field: TextField) -> Result<Self, EstimatorError> {
        let rows: Vec<Row> =
            serde_json::from_reader(reader).map_err(|e| EstimatorError::Parse(e.to_string()))?;
        Self::from_rows(rows, field)
    }

    fn from_rows(rows: Vec<Row>, field: TextField) -> Result<Self, EstimatorError> {
        let total = rows.len();
        let examples: Vec<Example> = rows
            .into_iter()
            .filter_map(|row| {
                let points = row.weight.filter(|w| valid_target(*w))?;
                let description = row.description.unwrap_or_default();
                Some(Example {
                    text: field.compose(&row.title, &description),
                    story_points: points,
                })
            })
            .collect();
        if examples.len() < total {
            log::warn!(
                "skipped {} of {} rows with a missing or out-of-range weight",
                total - examples.len(),
                total
            );
        }
        Self::new(examples)
    }
}

fn valid_target(points: f64) -> bool {
    points.is_finite() && (0.0..=MAX_STORY_POINTS).contains(&points)
}
