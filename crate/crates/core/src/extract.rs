//! Keyword masks and keyword sets.

use std::fmt;

use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;

/// One bit per token position; `true` marks a keyword.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeywordMask {
    bits: Vec<bool>,
}

impl KeywordMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Self {
            bits: bits.iter().map(|&b| b != 0).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pointwise dominance: every bit set here is set in `other`.
    pub fn is_dominated_by(&self, other: &KeywordMask) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// Renders as a bit-string, e.g. `11010`.
impl fmt::Display for KeywordMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Keywords with their 1-based positions, in increasing position order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeywordSet {
    items: Vec<(usize, String)>,
}

impl KeywordSet {
    pub fn new(items: Vec<(usize, String)>) -> Result<Self> {
        if items.windows(2).any(|w| w[0].0 >= w[1].0) || items.first().is_some_and(|i| i.0 == 0) {
            return Err(Error::pre(
                "keyword positions must be 1-based and strictly increasing",
            ));
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[(usize, String)] {
        &self.items
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(_, w)| w.as_str())
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.items.iter().map(|&(p, _)| p)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

pub fn compute_mask(sentence: &Sentence, kb: &KnowledgeBase) -> KeywordMask {
    KeywordMask::new(sentence.tokens().iter().map(|t| kb.contains(t)).collect())
}

/// Non-zero entries of the word-wise product of the sentence and its mask.
pub fn extract_keywords(sentence: &Sentence, mask: &KeywordMask) -> Result<KeywordSet> {
    if mask.len() != sentence.len() {
        return Err(Error::LengthMismatch {
            mask: mask.len(),
            sentence: sentence.len(),
        });
    }
    let items = sentence
        .tokens()
        .iter()
        .zip(mask.bits())
        .enumerate()
        .filter(|(_, (_, &bit))| bit)
        .map(|(i, (w, _))| (i + 1, w.clone()))
        .collect();
    Ok(KeywordSet { items })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{tokenize, NormalizationPolicy};
    use crate::kb::build_base_kb;
    use proptest::prelude::*;

    const FOOTNOTE: &str =
        "Ronaldo shoots the ball into the right-bottom of the net and it's a goal!";
    const FOOTNOTE_KEYWORDS: [&str; 6] =
        ["ronaldo", "shoots", "ball", "right-bottom", "net", "goal"];

    fn norm() -> NormalizationPolicy {
        NormalizationPolicy::default()
    }

    #[test]
    fn worked_example_mask_and_keywords() {
        let s = tokenize(FOOTNOTE, &norm()).unwrap();
        let kb = build_base_kb(&FOOTNOTE_KEYWORDS, &norm()).unwrap();
        let mask = compute_mask(&s, &kb);
        assert_eq!(
            mask,
            KeywordMask::from_bits(&[1, 1, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1])
        );
        assert_eq!(mask.to_string(), "11010010010001");
        let ks = extract_keywords(&s, &mask).unwrap();
        assert_eq!(ks.positions().collect::<Vec<_>>(), [1, 2, 4, 7, 10, 14]);
        assert_eq!(ks.words().collect::<Vec<_>>(), FOOTNOTE_KEYWORDS);
    }

    #[test]
    fn degenerate_masks() {
        let s = Sentence::from_words("a b c").unwrap();
        let none = build_base_kb(&["zzz"], &norm()).unwrap();
        let mask = compute_mask(&s, &none);
        assert_eq!(mask.ones(), 0);
        assert!(extract_keywords(&s, &mask).unwrap().is_empty());

        let all = build_base_kb(&["a", "b", "c"], &norm()).unwrap();
        assert_eq!(compute_mask(&s, &all).ones(), 3);
    }

    #[test]
    fn length_mismatch() {
        let s = Sentence::from_words("a b").unwrap();
        let mask = KeywordMask::from_bits(&[1, 0, 1]);
        assert!(matches!(
            extract_keywords(&s, &mask),
            Err(Error::LengthMismatch {
                mask: 3,
                sentence: 2
            })
        ));
    }

    #[test]
    fn repeated_keywords_keep_every_position() {
        let s = Sentence::from_words("goal goal and goal").unwrap();
        let kb = build_base_kb(&["goal"], &norm()).unwrap();
        let ks = extract_keywords(&s, &compute_mask(&s, &kb)).unwrap();
        assert_eq!(ks.positions().collect::<Vec<_>>(), [1, 2, 4]);
    }

    fn sentence_strategy() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(
            prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]),
            1..12,
        )
        .prop_map(|v| v.into_iter().map(String::from).collect())
    }

    proptest! {
        #[test]
        fn mask_properties(
            words in sentence_strategy(),
            small in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]), 1..4),
            extra in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]), 0..4),
        ) {
            let s = Sentence::from_tokens(words.clone()).unwrap();
            let kb_small = build_base_kb(&small, &norm()).unwrap();
            let big: Vec<&str> = small.iter().chain(&extra).copied().collect();
            let kb_big = build_base_kb(&big, &norm()).unwrap();

            let m = compute_mask(&s, &kb_small);
            let ks = extract_keywords(&s, &m).unwrap();
            prop_assert_eq!(ks.len(), m.ones());
            prop_assert!(m.is_dominated_by(&compute_mask(&s, &kb_big)));

            let filtered: Vec<(usize, String)> = words
                .iter()
                .enumerate()
                .filter(|(_, w)| kb_small.contains(w))
                .map(|(i, w)| (i + 1, w.clone()))
                .collect();
            prop_assert_eq!(ks.items(), &filtered[..]);
        }
    }
}
