use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EstimatorError;
use crate::metrics::tokenize_words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabularyConfig {
    /// Terms appearing in fewer documents are dropped.
    pub min_df: usize,
    /// Keep at most this many terms, highest document frequency first.
    pub max_features: Option<usize>,
}

impl Default for VocabularyConfig {
    fn default() -> Self {
        Self { min_df: 1, max_features: None }
    }
}

/// Sparse feature vector with strictly increasing indexes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |pos| self.entries[pos].1)
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i]).sum()
    }
}

/// Term index and smoothed idf weights learned from a corpus.
///
/// Terms are indexed in lexicographic order, so indexes are dense and stable
/// for a given corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    idf: Vec<f64>,
    config: VocabularyConfig,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn build<S: AsRef<str>>(
        corpus: &[S],
        config: VocabularyConfig,
    ) -> Result<Self, EstimatorError> {
        if corpus.is_empty() {
            return Err(EstimatorError::EmptyCorpus);
        }

        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in corpus {
            let mut words = tokenize_words(doc.as_ref());
            words.sort_unstable();
            words.dedup();
            for word in words {
                *df.entry(word).or_default() += 1;
            }
        }

        let mut kept: Vec<(String, usize)> =
            df.into_iter().filter(|(_, d)| *d >= config.min_df.max(1)).collect();
        if let Some(max) = config.max_features {
            if kept.len() > max {
                // stable sort keeps lexicographic order among equal frequencies
                kept.sort_by_key(|&(_, d)| std::cmp::Reverse(d));
                kept.truncate(max);
                kept.sort_by(|a, b| a.0.cmp(&b.0));
            }
        }

        let n = corpus.len() as f64;
        let idf = kept
            .iter()
            .map(|(_, d)| ((1.0 + n) / (1.0 + *d as f64)).ln() + 1.0)
            .collect();
        let terms = kept.into_iter().map(|(t, _)| t).collect();
        Ok(Self::from_parts(terms, idf, config))
    }

    pub(crate) fn from_parts(terms: Vec<String>, idf: Vec<f64>, config: VocabularyConfig) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Self { terms, idf, config, index }
    }

    pub(crate) fn rebuild_index(&mut self) {
        self.index = self.terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn idf_of(&self, term: &str) -> Option<f64> {
        self.index_of(term).map(|i| self.idf[i])
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn config(&self) -> VocabularyConfig {
        self.config
    }

    /// Raw term counts times idf, L2-normalised. Unknown words are ignored;
    /// text without any known word maps to the zero vector.
    pub fn transform(&self, text: &str) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for word in tokenize_words(text) {
            if let Some(i) = self.index_of(&word) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        let mut entries: Vec<(usize, f64)> =
            counts.into_iter().map(|(i, tf)| (i, tf * self.idf[i])).collect();
        let norm = entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, v) in &mut entries {
                *v /= norm;
            }
        }
        SparseVector { entries }
    }
}

pub fn build_vocabulary<S: AsRef<str>>(
    corpus: &[S],
    config: VocabularyConfig,
) -> Result<Vocabulary, EstimatorError> {
    Vocabulary::build(corpus, config)
}

pub fn tfidf_transform(text: &str, vocabulary: &Vocabulary) -> SparseVector {
    vocabulary.transform(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_document_idf_is_one() {
        let v = Vocabulary::build(&["login"], VocabularyConfig::default()).unwrap();
        assert_eq!(v.idf_of("login"), Some(1.0));
    }

    #[test]
    fn rare_term_idf() {
        let v = Vocabulary::build(&["a b", "a", "a c"], VocabularyConfig::default()).unwrap();
        assert!((v.idf_of("b").unwrap() - ((4.0f64 / 2.0).ln() + 1.0)).abs() < 1e-12);
        assert_eq!(v.idf_of("a"), Some(1.0));
    }

    #[test]
    fn min_df_filters_terms() {
        let cfg = VocabularyConfig { min_df: 2, max_features: None };
        let v = Vocabulary::build(&["a b", "a", "a c"], cfg).unwrap();
        assert_eq!(v.terms(), ["a"]);
        assert_eq!(v.index_of("b"), None);
    }

    #[test]
    fn max_features_keeps_most_frequent() {
        let cfg = VocabularyConfig { min_df: 1, max_features: Some(2) };
        let v = Vocabulary::build(&["z y x", "z y", "z"], cfg).unwrap();
        assert_eq!(v.terms(), ["y", "z"]);
    }

    #[test]
    fn empty_corpus_rejected() {
        let empty: [&str; 0] = [];
        assert!(matches!(
            Vocabulary::build(&empty, VocabularyConfig::default()),
            Err(EstimatorError::EmptyCorpus)
        ));
    }

    #[test]
    fn single_known_term_is_unit_vector() {
        let v = Vocabulary::build(&["login page", "logout"], VocabularyConfig::default()).unwrap();
        let x = v.transform("login login unknown");
        assert_eq!(x.entries(), &[(v.index_of("login").unwrap(), 1.0)]);
    }

    #[test]
    fn all_unknown_is_zero_vector() {
        let v = Vocabulary::build(&["login"], VocabularyConfig::default()).unwrap();
        assert!(v.transform("nothing here").is_empty());
        assert_eq!(v.transform("").norm(), 0.0);
    }
}
