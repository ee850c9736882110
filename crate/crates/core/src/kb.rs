//! Shared knowledge base: the keyword set both ends agree on, and the two
//! vocabulary augmentation schemes that grow it by a fraction ρ of the corpus
//! vocabulary.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{NormalizationPolicy, Vocabulary};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scheme {
    Base,
    Random,
    Ordered,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Base => "BASE",
            Scheme::Random => "RANDOM",
            Scheme::Ordered => "ORDERED",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "BASE" => Ok(Scheme::Base),
            "RANDOM" => Ok(Scheme::Random),
            "ORDERED" => Ok(Scheme::Ordered),
            _ => Err(format!(
                "unknown scheme {s:?} (expected BASE, RANDOM or ORDERED)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    keywords: BTreeSet<String>,
    /// Identifier of the shared language model.
    pub lm_ref: String,
    pub rho: f64,
    pub scheme: Scheme,
    /// Permutation seed, RANDOM only.
    pub seed: Option<u64>,
}

impl KnowledgeBase {
    pub fn keywords(&self) -> &BTreeSet<String> {
        &self.keywords
    }

    pub fn contains(&self, word: &str) -> bool {
        self.keywords.contains(word)
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    pub fn with_lm_ref(mut self, lm_ref: impl Into<String>) -> Self {
        self.lm_ref = lm_ref.into();
        self
    }

    fn augmented<'a>(
        &self,
        added: impl IntoIterator<Item = &'a str>,
        rho: f64,
        scheme: Scheme,
        seed: Option<u64>,
    ) -> Self {
        let mut keywords = self.keywords.clone();
        keywords.extend(added.into_iter().map(str::to_string));
        Self {
            keywords,
            lm_ref: self.lm_ref.clone(),
            rho,
            scheme,
            seed,
        }
    }

    /// Writes the keyword list as a sorted JSON array.
    pub fn save(&self, path: &Path) -> Result<()> {
        let words: Vec<&String> = self.keywords.iter().collect();
        let mut text = serde_json::to_string_pretty(&words)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Reads a JSON array of keywords and normalizes it into a base KB.
    pub fn load(path: &Path, norm: &NormalizationPolicy) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let words: Vec<String> = serde_json::from_str(&text)?;
        build_base_kb(&words, norm)
    }
}

pub fn build_base_kb<S: AsRef<str>>(
    keyword_list: &[S],
    norm: &NormalizationPolicy,
) -> Result<KnowledgeBase> {
    let keywords: BTreeSet<String> = keyword_list
        .iter()
        .filter_map(|w| norm.normalize_word(w.as_ref()))
        .filter(|w| !w.chars().any(char::is_whitespace))
        .collect();
    if keywords.is_empty() {
        return Err(Error::EmptyKeywordList);
    }
    Ok(KnowledgeBase {
        keywords,
        lm_ref: String::new(),
        rho: 0.0,
        scheme: Scheme::Base,
        seed: None,
    })
}

/// ⌊ρ·|V|⌋, with a tolerance so that products like 0.6·5 land on 3.
pub fn added_count(rho: f64, vocab_len: usize) -> usize {
    ((rho * vocab_len as f64) + 1e-9).floor() as usize
}

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::pre(format!("rho must lie in [0, 1], got {rho}")))
    }
}

/// The seeded permutation of V whose prefixes RANDOM augmentation adds.
/// Starts from the lexicographic order so the result depends only on the
/// word set and the seed.
pub fn random_order(vocab: &Vocabulary, seed: u64) -> Vec<&str> {
    let mut words = vocab.words();
    words.shuffle(&mut seed::rng(seed));
    words
}

/// Adds ⌊ρ·|V|⌋ words sampled uniformly without replacement from V.
/// A larger ρ under the same seed adds a superset.
pub fn augment_random(
    kb: &KnowledgeBase,
    vocab: &Vocabulary,
    rho: f64,
    seed: u64,
) -> Result<KnowledgeBase> {
    check_rho(rho)?;
    let order = random_order(vocab, seed);
    let n = added_count(rho, vocab.len());
    Ok(kb.augmented(order.into_iter().take(n), rho, Scheme::Random, Some(seed)))
}

/// Adds the ⌊ρ·|V|⌋ most frequent words of V.
pub fn augment_ordered(kb: &KnowledgeBase, vocab: &Vocabulary, rho: f64) -> Result<KnowledgeBase> {
    check_rho(rho)?;
    let n = added_count(rho, vocab.len());
    Ok(kb.augmented(
        vocab.by_frequency().into_iter().take(n),
        rho,
        Scheme::Ordered,
        None,
    ))
}

/// Dispatches on `scheme`; BASE returns the base KB unchanged.
pub fn augment(
    kb: &KnowledgeBase,
    vocab: &Vocabulary,
    scheme: Scheme,
    rho: f64,
    seed: u64,
) -> Result<KnowledgeBase> {
    match scheme {
        Scheme::Base => Ok(kb.clone()),
        Scheme::Random => augment_random(kb, vocab, rho, seed),
        Scheme::Ordered => augment_ordered(kb, vocab, rho),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norm() -> NormalizationPolicy {
        NormalizationPolicy::default()
    }

    fn vocab() -> Vocabulary {
        Vocabulary::from_counts([
            ("the", 9),
            ("goal", 5),
            ("net", 4),
            ("a", 4),
            ("kane", 1),
            ("wide", 2),
            ("shoots", 3),
        ])
    }

    #[test]
    fn base_kb_normalizes_and_dedups() {
        let kb = build_base_kb(&["Goal", "goal", "NET"], &norm()).unwrap();
        let words: Vec<&str> = kb.keywords().iter().map(String::as_str).collect();
        assert_eq!(words, ["goal", "net"]);
        assert_eq!(kb.scheme, Scheme::Base);
        assert_eq!(kb.rho, 0.0);

        let empty: [&str; 0] = [];
        assert!(matches!(
            build_base_kb(&empty, &norm()),
            Err(Error::EmptyKeywordList)
        ));
        let six = ["ronaldo", "shoots", "ball", "right-bottom", "net", "goal"];
        assert_eq!(build_base_kb(&six, &norm()).unwrap().len(), 6);
    }

    #[test]
    fn random_endpoints_and_determinism() {
        let kb = build_base_kb(&["goal"], &norm()).unwrap();
        let v = vocab();
        assert_eq!(
            augment_random(&kb, &v, 0.0, 3).unwrap().keywords(),
            kb.keywords()
        );
        let full = augment_random(&kb, &v, 1.0, 3).unwrap();
        assert!(v.words().iter().all(|w| full.contains(w)));
        assert_eq!(
            augment_random(&kb, &v, 0.5, 3).unwrap(),
            augment_random(&kb, &v, 0.5, 3).unwrap()
        );
        assert!(augment_random(&kb, &v, 1.5, 3).is_err());
    }

    #[test]
    fn ordered_examples() {
        let kb = build_base_kb(&["zzz"], &norm()).unwrap();
        let v = Vocabulary::from_counts([("the", 3), ("goal", 2), ("net", 1)]);
        assert_eq!(
            augment_ordered(&kb, &v, 0.0).unwrap().keywords(),
            kb.keywords()
        );
        let third = augment_ordered(&kb, &v, 1.0 / 3.0).unwrap();
        let words: Vec<&str> = third.keywords().iter().map(String::as_str).collect();
        assert_eq!(words, ["the", "zzz"]);
        let full = augment_ordered(&kb, &v, 1.0).unwrap();
        assert!(v.words().iter().all(|w| full.contains(w)));
    }

    #[test]
    fn added_count_is_floor() {
        assert_eq!(added_count(0.0, 10), 0);
        assert_eq!(added_count(0.6, 5), 3);
        assert_eq!(added_count(0.29, 10), 2);
        assert_eq!(added_count(1.0, 7), 7);
    }

    #[test]
    fn kb_file_round_trip_is_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("kb.json");
        let kb = build_base_kb(&["net", "Goal", "ball"], &norm()).unwrap();
        kb.save(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let words: Vec<String> = serde_json::from_str(&text).unwrap();
        assert_eq!(words, ["ball", "goal", "net"]);
        assert_eq!(
            KnowledgeBase::load(&p, &norm()).unwrap().keywords(),
            kb.keywords()
        );
    }

    proptest! {
        #[test]
        fn augmentation_is_nested_in_rho(a in 0.0f64..=1.0, b in 0.0f64..=1.0, seed in any::<u64>()) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let kb = build_base_kb(&["goal", "offside"], &norm()).unwrap();
            let v = vocab();
            let r_lo = augment_random(&kb, &v, lo, seed).unwrap();
            let r_hi = augment_random(&kb, &v, hi, seed).unwrap();
            prop_assert!(r_lo.keywords().is_subset(r_hi.keywords()));
            prop_assert!(kb.keywords().is_subset(r_lo.keywords()));
            let o_lo = augment_ordered(&kb, &v, lo).unwrap();
            let o_hi = augment_ordered(&kb, &v, hi).unwrap();
            prop_assert!(o_lo.keywords().is_subset(o_hi.keywords()));
            prop_assert!(o_lo.len() <= o_hi.len());
        }

        #[test]
        fn ordered_covers_top_mass(rho in 0.0f64..=1.0) {
            let kb = build_base_kb(&["zzz"], &norm()).unwrap();
            let v = vocab();
            let aug = augment_ordered(&kb, &v, rho).unwrap();
            let added: Vec<&str> = v.words().into_iter().filter(|w| aug.contains(w)).collect();
            let left: Vec<&str> = v.words().into_iter().filter(|w| !aug.contains(w)).collect();
            for a in &added {
                for l in &left {
                    prop_assert!(v.count(l) <= v.count(a));
                }
            }
        }
    }
}
