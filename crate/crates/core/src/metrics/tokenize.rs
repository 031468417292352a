//! Sentence and word segmentation plus the syllable heuristic.
//!
//! Everything here is deliberately rule-based so counts can be reproduced by
//! hand: a sentence ends after a run of `.`, `!` or `?`, a word is a run of
//! alphanumerics joined by internal apostrophes or hyphens, and syllables are
//! counted as vowel groups.

use super::MetricsError;

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Splits `text` into sentences.
///
/// Each sentence ends after a run of terminators. A trailing fragment with
/// no terminator is a sentence of its own. Pieces without any alphanumeric
/// character (for example a stray `" . "`) are attached to the previous
/// sentence so punctuation never produces an empty sentence.
pub fn tokenize_sentences(text: &str) -> Result<Vec<String>, MetricsError> {
    if text.trim().is_empty() {
        return Err(MetricsError::EmptyText);
    }

    let mut pieces: Vec<&str> = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !is_terminator(c) {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, next)) = chars.peek() {
            if !is_terminator(next) {
                break;
            }
            end = j + next.len_utf8();
            chars.next();
        }
        pieces.push(&text[start..end]);
        start = end;
    }
    pieces.push(&text[start..]);

    let mut sentences: Vec<String> = Vec::new();
    for piece in pieces {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let has_content = piece.chars().any(char::is_alphanumeric);
        match sentences.last_mut() {
            Some(last) if !has_content => last.push_str(piece),
            _ => sentences.push(piece.to_owned()),
        }
    }
    Ok(sentences)
}

/// Splits `text` into lowercased words.
///
/// Apostrophes and hyphens are kept only when they sit between two
/// alphanumeric characters, so `"UI-designer's"` stays one word while
/// `"'quoted'"` loses its quotes.
pub fn tokenize_words(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut words = Vec::new();
    let mut current = String::new();

    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if is_joiner(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            current.push(c);
        } else if !current.is_empty() {
            words.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Counts syllables as maximal vowel groups (`y` included).
///
/// A final lone `e` after a consonant is treated as silent (`page`, `the`)
/// except in a consonant + `le` ending (`table`, `readable`). The result is
/// never below one.
pub fn count_syllables(word: &str) -> usize {
    let chars: Vec<char> = word.chars().flat_map(char::to_lowercase).collect();

    let mut groups = 0;
    let mut in_group = false;
    for &c in &chars {
        let vowel = is_vowel(c);
        if vowel && !in_group {
            groups += 1;
        }
        in_group = vowel;
    }

    let n = chars.len();
    if n >= 2 && chars[n - 1] == 'e' && !is_vowel(chars[n - 2]) {
        let consonant_le = n >= 3 && chars[n - 2] == 'l' && !is_vowel(chars[n - 3]);
        if !consonant_le && groups > 1 {
            groups -= 1;
        }
    }
    groups.max(1)
}
