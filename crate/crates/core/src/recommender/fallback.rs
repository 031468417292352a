use serde::{Deserialize, Serialize};

use super::{Recommendation, RecommendationSource};
use crate::metrics::{tokenize_words, ReadabilityReport};

/// Limits for the offline checks. These are tuning choices, not part of the
/// readability formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FallbackThresholds {
    pub max_words: usize,
    pub max_gunning_fog: f64,
}

impl Default for FallbackThresholds {
    fn default() -> Self {
        Self { max_words: 60, max_gunning_fog: 12.0 }
    }
}

pub const TEMPLATE_OK: &str =
    "Story follows the template: it names a role, a goal and a benefit in readable text.";

fn contains_phrase(words: &[String], phrase: &[&str]) -> bool {
    words.windows(phrase.len()).any(|w| w.iter().zip(phrase).all(|(a, b)| a == b))
}

/// Rule-based suggestions used when no remote model is reachable.
pub fn fallback_recommend(
    story_text: &str,
    report: &ReadabilityReport,
    thresholds: &FallbackThresholds,
) -> Recommendation {
    let words = tokenize_words(story_text);
    let mut tips = Vec::new();

    if !contains_phrase(&words, &["as", "a"]) && !contains_phrase(&words, &["as", "an"]) {
        tips.push("Name who needs this with an \"As a <role>\" clause.".to_owned());
    }
    if !contains_phrase(&words, &["i", "want"]) {
        tips.push("State the goal with an \"I want <capability>\" clause.".to_owned());
    }
    if !contains_phrase(&words, &["so", "that"]) {
        tips.push("Explain the value with a \"so that <benefit>\" clause.".to_owned());
    }
    if report.stats.word_count > thresholds.max_words {
        tips.push(format!(
            "The story is too comprehensive ({} words); split it into smaller stories or shorten it to at most {} words.",
            report.stats.word_count, thresholds.max_words
        ));
    }
    if report.gunning_fog > thresholds.max_gunning_fog {
        tips.push(format!(
            "The text is hard to read (Gunning Fog {:.1}); use shorter sentences and simpler words.",
            report.gunning_fog
        ));
    }

    let text = if tips.is_empty() { TEMPLATE_OK.to_owned() } else { tips.join("\n") };
    Recommendation { text, source: RecommendationSource::OfflineHeuristic, latency_ms: 0 }
}
