//! Text ingestion: normalization, tokenization, corpora and vocabulary
//! statistics, plus the bundled synthetic commentary generator.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Characters stripped from both ends of every whitespace-delimited piece.
pub const DEFAULT_STRIP: &[char] = &['.', ',', '!', '?', ';', ':', '"', '(', ')'];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationPolicy {
    pub lowercase: bool,
    /// Characters trimmed at token boundaries.
    pub strip: Vec<char>,
    /// Split tokens on internal hyphens ("right-bottom" -> "right", "bottom").
    pub split_hyphens: bool,
}

impl Default for NormalizationPolicy {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip: DEFAULT_STRIP.to_vec(),
            split_hyphens: false,
        }
    }
}

impl NormalizationPolicy {
    /// Normalizes a single word, returning `None` when nothing survives.
    pub fn normalize_word(&self, word: &str) -> Option<String> {
        let trimmed = word.trim_matches(|c: char| self.strip.contains(&c));
        if trimmed.is_empty() {
            return None;
        }
        Some(if self.lowercase {
            trimmed.to_lowercase()
        } else {
            trimmed.to_string()
        })
    }
}

/// A tokenized sentence. Tokens are non-empty and whitespace-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sentence {
    tokens: Vec<String>,
    raw: String,
}

impl Sentence {
    /// Builds a sentence from already-normalized tokens.
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::EmptySentence(String::new()));
        }
        if let Some(bad) = tokens
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(Error::pre(format!("invalid token {bad:?}")));
        }
        let raw = tokens.join(" ");
        Ok(Self { tokens, raw })
    }

    /// Convenience for tests and examples: whitespace split, no normalization.
    pub fn from_words(words: &str) -> Result<Self> {
        Self::from_tokens(words.split_whitespace())
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens.join(" "))
    }
}

/// Tokenizes one line: whitespace split, boundary punctuation stripped,
/// lowercased. Internal hyphens and apostrophes stay inside the token.
pub fn tokenize(raw_line: &str, norm: &NormalizationPolicy) -> Result<Sentence> {
    let mut tokens = Vec::new();
    for piece in raw_line.split_whitespace() {
        if norm.split_hyphens {
            tokens.extend(piece.split('-').filter_map(|p| norm.normalize_word(p)));
        } else if let Some(tok) = norm.normalize_word(piece) {
            tokens.push(tok);
        }
    }
    if tokens.is_empty() {
        return Err(Error::EmptySentence(raw_line.to_string()));
    }
    Ok(Sentence {
        tokens,
        raw: raw_line.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    source_id: String,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>, source_id: impl Into<String>) -> Result<Self> {
        let source_id = source_id.into();
        if sentences.is_empty() {
            return Err(Error::EmptyCorpus(source_id));
        }
        Ok(Self {
            sentences,
            source_id,
        })
    }

    /// Tokenizes each line with the default policy. Blank lines are skipped.
    pub fn from_lines<'a, I>(lines: I, source_id: &str) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let norm = NormalizationPolicy::default();
        let sentences = lines
            .into_iter()
            .filter(|l| !l.trim().is_empty())
            .map(|l| tokenize(l, &norm))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sentences, source_id)
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn total_tokens(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn mean_sentence_len(&self) -> f64 {
        self.total_tokens() as f64 / self.len() as f64
    }

    /// Contiguous sub-corpus `[start, end)` in file order.
    pub fn slice(&self, start: usize, end: usize, label: &str) -> Result<Self> {
        let end = end.min(self.len());
        if start >= end {
            return Err(Error::EmptyCorpus(format!("{}:{label}", self.source_id)));
        }
        Self::new(
            self.sentences[start..end].to_vec(),
            format!("{}:{label}", self.source_id),
        )
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sentence> {
        self.sentences.iter()
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Sentence;
    type IntoIter = std::slice::Iter<'a, Sentence>;

    fn into_iter(self) -> Self::IntoIter {
        self.sentences.iter()
    }
}

/// Reads a UTF-8 file with one sentence per line. Blank lines are skipped;
/// a non-blank line that normalizes to nothing is an error.
pub fn load_corpus(path: &Path, norm: &NormalizationPolicy) -> Result<Corpus> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let sentences = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| tokenize(l, norm))
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(sentences, path.display().to_string())
}

/// Word counts over a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    counts: BTreeMap<String, u64>,
    total_tokens: u64,
}

impl Vocabulary {
    pub fn from_counts<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut counts = BTreeMap::new();
        for (w, c) in entries {
            *counts.entry(w.into()).or_insert(0) += c;
        }
        let total_tokens = counts.values().sum();
        Self {
            counts,
            total_tokens,
        }
    }

    /// Entries in ascending word order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, &c)| (w.as_str(), c))
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Words sorted lexicographically.
    pub fn words(&self) -> Vec<&str> {
        self.counts.keys().map(String::as_str).collect()
    }

    /// Words by decreasing count; equal counts in ascending lexicographic order.
    pub fn by_frequency(&self) -> Vec<&str> {
        let mut v: Vec<(&str, u64)> = self.entries().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v.into_iter().map(|(w, _)| w).collect()
    }
}

pub fn build_vocabulary(corpus: &Corpus) -> Vocabulary {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for s in corpus {
        for t in s.tokens() {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    Vocabulary::from_counts(counts)
}

/// A bundled template family for synthetic corpora.
#[derive(Debug, Clone, Deserialize)]
pub struct TemplateSet {
    pub name: String,
    /// Base keyword list shipped with the family.
    pub keywords: Vec<String>,
    pub templates: Vec<String>,
    pub slots: BTreeMap<String, Vec<String>>,
    /// Filler `k` (0-based) of a slot is drawn with weight `(k + 1)^-s`;
    /// 0 draws uniformly.
    #[serde(default)]
    pub filler_zipf: f64,
}

const FOOTBALL: &str = include_str!("../data/football.toml");

/// One piece of a parsed template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplatePart {
    Text(String),
    Slot(String),
}

impl TemplateSet {
    /// Names of the bundled families.
    pub fn bundled() -> &'static [&'static str] {
        &["football"]
    }

    pub fn load(id: &str) -> Result<Self> {
        let src = match id {
            "football" => FOOTBALL,
            other => return Err(Error::UnknownTemplateSet(other.to_string())),
        };
        let set: TemplateSet =
            toml::from_str(src).map_err(|e| Error::MalformedTemplateSet(e.to_string()))?;
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        if self.templates.is_empty() {
            return Err(Error::MalformedTemplateSet("no templates".into()));
        }
        if !self.filler_zipf.is_finite() || self.filler_zipf < 0.0 {
            return Err(Error::MalformedTemplateSet(
                "filler_zipf must be >= 0".into(),
            ));
        }
        for t in &self.templates {
            for part in parse_template(t)? {
                if let TemplatePart::Slot(name) = part {
                    match self.slots.get(&name) {
                        Some(v) if !v.is_empty() => {}
                        _ => {
                            return Err(Error::MalformedTemplateSet(format!(
                                "slot {{{name}}} has no fillers"
                            )))
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn parts(&self, template_index: usize) -> Result<Vec<TemplatePart>> {
        parse_template(&self.templates[template_index])
    }
}

/// Splits "a {x} b" into text and slot parts.
pub fn parse_template(t: &str) -> Result<Vec<TemplatePart>> {
    let mut parts = Vec::new();
    let mut rest = t;
    while let Some(open) = rest.find('{') {
        if open > 0 {
            parts.push(TemplatePart::Text(rest[..open].to_string()));
        }
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| Error::MalformedTemplateSet(format!("unclosed slot in {t:?}")))?;
        parts.push(TemplatePart::Slot(rest[open + 1..open + close].to_string()));
        rest = &rest[open + close + 1..];
    }
    if !rest.is_empty() {
        parts.push(TemplatePart::Text(rest.to_string()));
    }
    Ok(parts)
}

/// Deterministic synthetic corpus drawn from a bundled template family.
pub fn generate_synthetic_corpus(
    seed: u64,
    n_sentences: usize,
    template_set_id: &str,
) -> Result<Corpus> {
    if n_sentences == 0 {
        return Err(Error::pre("n_sentences must be at least 1"));
    }
    let set = TemplateSet::load(template_set_id)?;
    let parsed = (0..set.templates.len())
        .map(|i| set.parts(i))
        .collect::<Result<Vec<_>>>()?;
    let pickers: BTreeMap<&str, WeightedIndex<f64>> = set
        .slots
        .iter()
        .map(|(name, fillers)| {
            let w = (1..=fillers.len()).map(|k| (k as f64).powf(-set.filler_zipf));
            let idx = WeightedIndex::new(w)
                .map_err(|e| Error::MalformedTemplateSet(format!("slot {name}: {e}")))?;
            Ok((name.as_str(), idx))
        })
        .collect::<Result<_>>()?;
    let norm = NormalizationPolicy::default();
    let mut rng = seed::rng(seed);
    let mut sentences = Vec::with_capacity(n_sentences);
    for _ in 0..n_sentences {
        let parts = &parsed[rng.random_range(0..parsed.len())];
        let mut raw = String::new();
        for part in parts {
            match part {
                TemplatePart::Text(s) => raw.push_str(s),
                TemplatePart::Slot(name) => {
                    let k = pickers[name.as_str()].sample(&mut rng);
                    raw.push_str(&set.slots[name][k]);
                }
            }
        }
        sentences.push(tokenize(&raw, &norm)?);
    }
    Corpus::new(
        sentences,
        format!("synthetic:{template_set_id}:{seed}:{n_sentences}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOOTNOTE: &str =
        "Ronaldo shoots the ball into the right-bottom of the net and it's a goal!";

    fn toks(s: &Sentence) -> Vec<&str> {
        s.tokens().iter().map(String::as_str).collect()
    }

    #[test]
    fn tokenize_worked_example() {
        let s = tokenize(FOOTNOTE, &NormalizationPolicy::default()).unwrap();
        assert_eq!(
            toks(&s),
            [
                "ronaldo",
                "shoots",
                "the",
                "ball",
                "into",
                "the",
                "right-bottom",
                "of",
                "the",
                "net",
                "and",
                "it's",
                "a",
                "goal"
            ]
        );
        assert_eq!(s.raw(), FOOTNOTE);
    }

    #[test]
    fn tokenize_single_and_empty() {
        let norm = NormalizationPolicy::default();
        assert_eq!(toks(&tokenize("Goal", &norm).unwrap()), ["goal"]);
        assert!(matches!(
            tokenize("  !!  ", &norm),
            Err(Error::EmptySentence(_))
        ));
    }

    #[test]
    fn tokenize_hyphen_split_policy() {
        let norm = NormalizationPolicy {
            split_hyphens: true,
            ..Default::default()
        };
        let s = tokenize("right-bottom corner", &norm).unwrap();
        assert_eq!(toks(&s), ["right", "bottom", "corner"]);
    }

    #[test]
    fn load_corpus_counts_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("three.txt");
        std::fs::write(&p, "a b\nc d\ne\n").unwrap();
        let c = load_corpus(&p, &NormalizationPolicy::default()).unwrap();
        assert_eq!(c.len(), 3);

        let p = dir.path().join("blanks.txt");
        std::fs::write(&p, "one\n\ntwo\n   \nthree\n").unwrap();
        let c = load_corpus(&p, &NormalizationPolicy::default()).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(toks(&c.sentences()[2]), ["three"]);

        let err = load_corpus(&dir.path().join("missing"), &NormalizationPolicy::default());
        assert!(matches!(err, Err(Error::Io { .. })));

        let p = dir.path().join("empty.txt");
        std::fs::write(&p, "\n\n").unwrap();
        assert!(matches!(
            load_corpus(&p, &NormalizationPolicy::default()),
            Err(Error::EmptyCorpus(_))
        ));
    }

    #[test]
    fn vocabulary_counts_and_order() {
        let v = build_vocabulary(&Corpus::from_lines(["a b a"], "t").unwrap());
        assert_eq!(v.count("a"), 2);
        assert_eq!(v.count("b"), 1);
        assert_eq!(v.total_tokens(), 3);

        let v = build_vocabulary(&Corpus::from_lines(["x", "x", "y"], "t").unwrap());
        assert_eq!(v.by_frequency(), ["x", "y"]);

        let v = Vocabulary::from_counts([("m", 1), ("a", 1)]);
        assert_eq!(v.by_frequency(), ["a", "m"]);
    }

    #[test]
    fn synthetic_is_deterministic() {
        let a = generate_synthetic_corpus(7, 100, "football").unwrap();
        let b = generate_synthetic_corpus(7, 100, "football").unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_corpus(8, 100, "football").unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn synthetic_errors() {
        assert!(matches!(
            generate_synthetic_corpus(7, 0, "football"),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            generate_synthetic_corpus(7, 1, "cricket"),
            Err(Error::UnknownTemplateSet(_))
        ));
    }

    #[test]
    fn every_synthetic_sentence_has_a_base_keyword() {
        let set = TemplateSet::load("football").unwrap();
        let c = generate_synthetic_corpus(11, 500, "football").unwrap();
        for s in &c {
            assert!(s.tokens().iter().any(|t| set.keywords.contains(t)), "{s}");
        }
    }

    #[test]
    fn parse_template_parts() {
        let parts = parse_template("{a} b {c}!").unwrap();
        assert_eq!(
            parts,
            [
                TemplatePart::Slot("a".into()),
                TemplatePart::Text(" b ".into()),
                TemplatePart::Slot("c".into()),
                TemplatePart::Text("!".into()),
            ]
        );
        assert!(parse_template("{open").is_err());
    }
}
