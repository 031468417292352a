//! Readability indexes for user story text.
//!
//! All four indexes are computed from a single [`TextStats`] so a report is
//! internally consistent. The final result is the plain arithmetic mean of
//! the four scores even though Flesch Reading Ease points the other way
//! (higher is easier) from the other three.

mod tokenize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use tokenize::{count_syllables, tokenize_sentences, tokenize_words};

/// Words with at least this many syllables count as complex.
pub const COMPLEX_SYLLABLES: usize = 3;

/// Upper bound of Flesch Reading Ease: one word per sentence, one syllable per word.
pub const FLESCH_MAX: f64 = 121.22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("text is empty")]
    EmptyText,
    #[error("degenerate statistics: {0} is zero")]
    DegenerateStats(&'static str),
}

/// Surface counts extracted from a text.
///
/// `character_count` only counts letters and digits inside words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TextStats {
    pub sentence_count: usize,
    pub word_count: usize,
    pub character_count: usize,
    pub syllable_count: usize,
    pub complex_word_count: usize,
}

impl TextStats {
    fn words(&self) -> Result<f64, MetricsError> {
        match self.word_count {
            0 => Err(MetricsError::DegenerateStats("word_count")),
            n => Ok(n as f64),
        }
    }

    fn sentences(&self) -> Result<f64, MetricsError> {
        match self.sentence_count {
            0 => Err(MetricsError::DegenerateStats("sentence_count")),
            n => Ok(n as f64),
        }
    }

    fn words_per_sentence(&self) -> Result<f64, MetricsError> {
        Ok(self.words()? / self.sentences()?)
    }
}

/// Counts sentences, words, characters, syllables and complex words.
///
/// Text that contains no word at all (only punctuation, say) is rejected the
/// same way as blank text.
pub fn compute_stats(text: &str) -> Result<TextStats, MetricsError> {
    let sentence_count = tokenize_sentences(text)?.len();
    let words = tokenize_words(text);
    if words.is_empty() {
        return Err(MetricsError::EmptyText);
    }

    let mut stats = TextStats {
        sentence_count,
        word_count: words.len(),
        character_count: 0,
        syllable_count: 0,
        complex_word_count: 0,
    };
    for word in &words {
        stats.character_count += word.chars().filter(|c| c.is_alphanumeric()).count();
        let syllables = count_syllables(word);
        stats.syllable_count += syllables;
        if syllables >= COMPLEX_SYLLABLES {
            stats.complex_word_count += 1;
        }
    }
    Ok(stats)
}

/// `0.4 * (words/sentences + 100 * complex/words)`
pub fn gunning_fog(stats: &TextStats) -> Result<f64, MetricsError> {
    let complex_pct = 100.0 * stats.complex_word_count as f64 / stats.words()?;
    Ok(0.4 * (stats.words_per_sentence()? + complex_pct))
}

/// `206.835 - 1.015 * words/sentences - 84.6 * syllables/words`
pub fn flesch_reading_ease(stats: &TextStats) -> Result<f64, MetricsError> {
    let syllables_per_word = stats.syllable_count as f64 / stats.words()?;
    Ok(206.835 - 1.015 * stats.words_per_sentence()? - 84.6 * syllables_per_word)
}

/// `0.0588 * L - 0.296 * S - 15.8` with L letters and S sentences per 100 words.
pub fn coleman_liau(stats: &TextStats) -> Result<f64, MetricsError> {
    let words = stats.words()?;
    let sentences = stats.sentences()?;
    let letters_per_100 = 100.0 * stats.character_count as f64 / words;
    let sentences_per_100 = 100.0 * sentences / words;
    Ok(0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8)
}

/// `4.71 * characters/words + 0.5 * words/sentences - 21.43`
pub fn automated_readability(stats: &TextStats) -> Result<f64, MetricsError> {
    let chars_per_word = stats.character_count as f64 / stats.words()?;
    Ok(4.71 * chars_per_word + 0.5 * stats.words_per_sentence()? - 21.43)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityReport {
    pub gunning_fog: f64,
    pub flesch_reading_ease: f64,
    pub coleman_liau: f64,
    pub automated_readability: f64,
    /// Mean of the four indexes.
    pub final_result: f64,
    pub stats: TextStats,
}

impl ReadabilityReport {
    pub fn from_stats(stats: TextStats) -> Result<Self, MetricsError> {
        let gunning_fog = gunning_fog(&stats)?;
        let flesch_reading_ease = flesch_reading_ease(&stats)?;
        let coleman_liau = coleman_liau(&stats)?;
        let automated_readability = automated_readability(&stats)?;
        let final_result =
            (gunning_fog + flesch_reading_ease + coleman_liau + automated_readability) / 4.0;
        Ok(Self {
            gunning_fog,
            flesch_reading_ease,
            coleman_liau,
            automated_readability,
            final_result,
            stats,
        })
    }
}

pub fn readability_report(text: &str) -> Result<ReadabilityReport, MetricsError> {
    ReadabilityReport::from_stats(compute_stats(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(words: usize, sentences: usize) -> TextStats {
        TextStats {
            sentence_count: sentences,
            word_count: words,
            character_count: 0,
            syllable_count: words,
            complex_word_count: 0,
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn stats_for_short_texts() {
        assert_eq!(
            compute_stats("Go.").unwrap(),
            TextStats {
                sentence_count: 1,
                word_count: 1,
                character_count: 2,
                syllable_count: 1,
                complex_word_count: 0
            }
        );
        assert_eq!(
            compute_stats("Hello world.").unwrap(),
            TextStats {
                sentence_count: 1,
                word_count: 2,
                character_count: 10,
                syllable_count: 3,
                complex_word_count: 0
            }
        );
    }

    #[test]
    fn example_story_hand_count() {
        let text = "As a UI designer, I want to redesign the Resources page, \
                    so that it matches the new Broker design styles.";
        assert_eq!(
            compute_stats(text).unwrap(),
            TextStats {
                sentence_count: 1,
                word_count: 20,
                character_count: 83,
                syllable_count: 30,
                complex_word_count: 3
            }
        );
    }

    #[test]
    fn punctuation_only_is_empty() {
        assert_eq!(compute_stats("?!"), Err(MetricsError::EmptyText));
        assert_eq!(compute_stats("   "), Err(MetricsError::EmptyText));
    }

    #[test]
    fn fog_examples() {
        assert!(close(gunning_fog(&stats(10, 1)).unwrap(), 4.0));
        let all_complex = TextStats { complex_word_count: 10, ..stats(10, 1) };
        assert!(close(gunning_fog(&all_complex).unwrap(), 44.0));
        let some = TextStats { complex_word_count: 3, ..stats(20, 2) };
        assert!(close(gunning_fog(&some).unwrap(), 10.0));
    }

    #[test]
    fn flesch_examples() {
        assert!(close(flesch_reading_ease(&stats(1, 1)).unwrap(), FLESCH_MAX));
        assert!(close(flesch_reading_ease(&stats(10, 1)).unwrap(), 112.085));
        let heavy = TextStats { syllable_count: 300, ..stats(100, 1) };
        assert!(flesch_reading_ease(&heavy).unwrap() < 0.0);
    }

    #[test]
    fn coleman_liau_examples() {
        let s = TextStats { character_count: 500, ..stats(100, 5) };
        assert!(close(coleman_liau(&s).unwrap(), 12.12));
        let s = TextStats { character_count: 1, ..stats(1, 1) };
        assert!(close(coleman_liau(&s).unwrap(), -39.52));
        let s = TextStats { character_count: 0, ..stats(100, 0) };
        assert_eq!(
            coleman_liau(&s),
            Err(MetricsError::DegenerateStats("sentence_count"))
        );
    }

    #[test]
    fn ari_examples() {
        let s = TextStats { character_count: 10, ..stats(2, 1) };
        assert!(close(automated_readability(&s).unwrap(), 3.12));
        assert!(close(automated_readability(&stats(1, 1)).unwrap(), -20.93));
        let s = TextStats { character_count: 100, ..stats(20, 2) };
        assert!(close(automated_readability(&s).unwrap(), 7.12));
    }

    #[test]
    fn zero_words_rejected_everywhere() {
        let s = stats(0, 1);
        let err = Err(MetricsError::DegenerateStats("word_count"));
        assert_eq!(gunning_fog(&s), err);
        assert_eq!(flesch_reading_ease(&s), err);
        assert_eq!(coleman_liau(&s), err);
        assert_eq!(automated_readability(&s), err);
    }

    #[test]
    fn report_is_mean_and_deterministic() {
        let a = readability_report("Go.").unwrap();
        let mean = (a.gunning_fog + a.flesch_reading_ease + a.coleman_liau
            + a.automated_readability)
            / 4.0;
        assert!(close(a.final_result, mean));
        let b = readability_report("Go.").unwrap();
        assert_eq!(a.final_result.to_bits(), b.final_result.to_bits());
        assert_eq!(a, b);
    }
}
