//! Shared n-gram language model and the constrained sentence generator.
//!
//! The model is an interpolated absolute-discounting backoff model:
//!
//! ```text
//! P(w | h) = max(c(h,w) - D, 0) / c(h) + D * N1+(h .) / c(h) * P(w | h')
//! ```
//!
//! where `h'` drops the oldest word of `h`; unseen contexts back off fully and
//! the unigram level interpolates with a uniform distribution over the
//! prediction space (vocabulary plus end-of-sentence). With `D` in `[0, 1)`
//! every conditional distribution sums to one.
//!
//! Generation fills a fixed-length slot template: keyword slots are copied
//! verbatim and gaps are filled by beam search over model continuations.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bleu::{bleu, BleuConfig};
use crate::corpus::{Corpus, Sentence, Vocabulary};
use crate::error::{Error, Result};
use crate::extract::KeywordSet;
use crate::seed::splitmix64;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
const BOS_ID: u32 = 0;
const EOS_ID: u32 = 1;
const UNK_ID: u32 = u32::MAX;

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_DISCOUNT: f64 = 0.4;
const FALLBACK_UNIGRAMS: usize = 16;
const FORMAT_HEADER: &str = "semcom-ngram v1";

#[derive(Debug, Clone, Default, PartialEq)]
struct ContextStats {
    total: u64,
    next: HashMap<u32, u64>,
    /// Continuations sorted by id, for deterministic iteration.
    successors: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    discount: f64,
    words: Vec<String>,
    index: HashMap<String, u32>,
    /// `tables[k]` holds the statistics of every context of length `k`.
    tables: Vec<HashMap<Vec<u32>, ContextStats>>,
    vocab: Vocabulary,
    /// Real word ids by decreasing unigram count (ties by word).
    by_frequency: Vec<u32>,
}

impl PartialEq for NGramModel {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.discount == other.discount
            && self.words == other.words
            && self.tables == other.tables
    }
}

pub fn train_lm(corpus: &Corpus, order: usize) -> Result<NGramModel> {
    train_lm_with(corpus, order, DEFAULT_DISCOUNT)
}

pub fn train_lm_with(corpus: &Corpus, order: usize, discount: f64) -> Result<NGramModel> {
    let sentences: Vec<Vec<&str>> = corpus
        .iter()
        .map(|s| s.tokens().iter().map(String::as_str).collect())
        .collect();
    NGramModel::from_sentences(&sentences, order, discount)
}

impl NGramModel {
    fn check_params(order: usize, discount: f64) -> Result<()> {
        if !(1..=5).contains(&order) {
            return Err(Error::pre(format!(
                "LM order must be in [1, 5], got {order}"
            )));
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::pre(format!(
                "discount must be in [0, 1), got {discount}"
            )));
        }
        Ok(())
    }

    fn empty(order: usize, discount: f64) -> Self {
        let words = vec![BOS.to_string(), EOS.to_string()];
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Self {
            order,
            discount,
            words,
            index,
            tables: vec![HashMap::new(); order],
            vocab: Vocabulary::from_counts(std::iter::empty::<(String, u64)>()),
            by_frequency: Vec::new(),
        }
    }

    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        id
    }

    fn add_ngram(&mut self, gram: &[u32], count: u64) {
        let (&word, history) = gram.split_last().expect("n-gram is non-empty");
        for k in 0..self.order {
            let ctx = &history[history.len() - k..];
            let stats = self.tables[k].entry(ctx.to_vec()).or_default();
            stats.total += count;
            *stats.next.entry(word).or_insert(0) += count;
        }
    }

    fn finish(&mut self) {
        for table in &mut self.tables {
            for stats in table.values_mut() {
                let mut s: Vec<u32> = stats.next.keys().copied().collect();
                s.sort_unstable();
                stats.successors = s;
            }
        }
        let unigrams = self.tables[0].get(&[][..]).cloned().unwrap_or_default();
        let counts: Vec<(String, u64)> = unigrams
            .next
            .iter()
            .filter(|(&id, _)| id != EOS_ID)
            .map(|(&id, &c)| (self.words[id as usize].clone(), c))
            .collect();
        self.vocab = Vocabulary::from_counts(counts);
        self.by_frequency = self
            .vocab
            .by_frequency()
            .into_iter()
            .map(|w| self.index[w])
            .collect();
    }

    /// Counts every n-gram of the model order over padded sentences.
    pub fn from_sentences<S: AsRef<str>>(
        sentences: &[Vec<S>],
        order: usize,
        discount: f64,
    ) -> Result<Self> {
        Self::check_params(order, discount)?;
        if sentences.is_empty() {
            return Err(Error::EmptyCorpus("language model training set".into()));
        }
        let mut lm = Self::empty(order, discount);
        for s in sentences {
            let mut padded = vec![BOS_ID; order - 1];
            padded.extend(s.iter().map(|w| lm.intern(w.as_ref())));
            padded.push(EOS_ID);
            for gram in padded.windows(order) {
                lm.add_ngram(gram, 1);
            }
        }
        lm.finish();
        Ok(lm)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn id(&self, word: &str) -> u32 {
        self.index.get(word).copied().unwrap_or(UNK_ID)
    }

    /// Size of the prediction space: real words plus end-of-sentence.
    fn prediction_space(&self) -> usize {
        self.words.len() - 1
    }

    fn prob_ids(&self, ctx: &[u32], word: u32) -> f64 {
        let k = ctx.len().min(self.order - 1);
        let ctx = &ctx[ctx.len() - k..];
        let lower = |this: &Self| {
            if k == 0 {
                1.0 / this.prediction_space() as f64
            } else {
                this.prob_ids(&ctx[1..], word)
            }
        };
        match self.tables[k].get(ctx) {
            None => lower(self),
            Some(stats) => {
                let total = stats.total as f64;
                let c = stats.next.get(&word).copied().unwrap_or(0) as f64;
                let backoff = self.discount * stats.next.len() as f64 / total;
                let direct = (c - self.discount).max(0.0) / total;
                if backoff > 0.0 {
                    direct + backoff * lower(self)
                } else {
                    direct
                }
            }
        }
    }

    fn history(&self, prefix: &[&str]) -> Vec<u32> {
        let mut h = vec![BOS_ID; self.order - 1];
        h.extend(prefix.iter().map(|w| self.id(w)));
        h
    }

    /// P(word | context). `context` holds preceding words, most recent last;
    /// it is padded with sentence-start markers. Use [`EOS`] to query the end.
    pub fn prob(&self, context: &[&str], word: &str) -> f64 {
        self.prob_ids(&self.history(context), self.id(word))
    }

    /// Conditional distribution over the prediction space for `context`.
    pub fn distribution(&self, context: &[&str]) -> Vec<(String, f64)> {
        let h = self.history(context);
        (1..self.words.len() as u32)
            .map(|id| (self.words[id as usize].clone(), self.prob_ids(&h, id)))
            .collect()
    }

    /// Natural-log probability of the sentence including its end marker.
    pub fn sentence_logprob(&self, sentence: &Sentence) -> f64 {
        let mut h = vec![BOS_ID; self.order - 1];
        let mut lp = 0.0;
        for w in sentence.tokens() {
            let id = self.id(w);
            lp += self.prob_ids(&h, id).ln();
            h.push(id);
        }
        lp + self.prob_ids(&h, EOS_ID).ln()
    }

    fn proposals(&self, history: &[u32]) -> Vec<u32> {
        if self.order > 1 {
            if let Some(stats) = self.tables[1].get(&history[history.len() - 1..]) {
                let s: Vec<u32> = stats
                    .successors
                    .iter()
                    .copied()
                    .filter(|&id| id != EOS_ID)
                    .collect();
                if !s.is_empty() {
                    return s;
                }
            }
        }
        self.by_frequency
            .iter()
            .take(FALLBACK_UNIGRAMS)
            .copied()
            .collect()
    }

    /// Plain-text dump: a header, the order and discount, then one
    /// `count<TAB>w1 ... wN` line per highest-order n-gram, sorted.
    pub fn to_text(&self) -> String {
        let mut grams: Vec<(String, u64)> = Vec::new();
        let k = self.order - 1;
        for (ctx, stats) in &self.tables[k] {
            for (&w, &c) in &stats.next {
                let words: Vec<&str> = ctx
                    .iter()
                    .chain(std::iter::once(&w))
                    .map(|&id| self.words[id as usize].as_str())
                    .collect();
                grams.push((words.join(" "), c));
            }
        }
        grams.sort();
        let mut out = format!(
            "{FORMAT_HEADER}\norder {}\ndiscount {}\n",
            self.order, self.discount
        );
        for (g, c) in grams {
            let _ = writeln!(out, "{c}\t{g}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::MalformedModel(m.to_string());
        let mut lines = text.lines();
        if lines.next() != Some(FORMAT_HEADER) {
            return Err(bad("missing header"));
        }
        let field = |line: Option<&str>, key: &str| -> Result<String> {
            line.and_then(|l| l.strip_prefix(key))
                .map(|v| v.trim().to_string())
                .ok_or_else(|| bad(key.trim()))
        };
        let order: usize = field(lines.next(), "order ")?
            .parse()
            .map_err(|_| bad("order"))?;
        let discount: f64 = field(lines.next(), "discount ")?
            .parse()
            .map_err(|_| bad("discount"))?;
        Self::check_params(order, discount)?;
        let mut lm = Self::empty(order, discount);
        let mut any = false;
        for line in lines.filter(|l| !l.is_empty()) {
            let (c, g) = line.split_once('\t').ok_or_else(|| bad(line))?;
            let c: u64 = c.parse().map_err(|_| bad(line))?;
            let ids: Vec<u32> = g.split(' ').map(|w| lm.intern(w)).collect();
            if ids.len() != order {
                return Err(bad(line));
            }
            lm.add_ngram(&ids, c);
            any = true;
        }
        if !any {
            return Err(bad("no n-grams"));
        }
        lm.finish();
        Ok(lm)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slot {
    Keyword(String),
    Gap,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SlotTemplate {
    pub slots: Vec<Slot>,
}

impl SlotTemplate {
    /// Template of length `len` with keywords at their 1-based positions.
    pub fn from_keywords(len: usize, keywords: &KeywordSet) -> Result<Self> {
        let mut slots = vec![Slot::Gap; len];
        for (pos, word) in keywords.items() {
            if *pos == 0 || *pos > len {
                return Err(Error::LengthMismatch {
                    mask: *pos,
                    sentence: len,
                });
            }
            slots[pos - 1] = Slot::Keyword(word.clone());
        }
        Ok(Self { slots })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn gaps(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Gap)).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionMode {
    BleuVsReference,
    LmLikelihood,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Number of candidates M.
    pub m: usize,
    pub beam_width: usize,
    /// Perturbs the ordering of exactly tied beams.
    pub seed: u64,
    pub selection_mode: SelectionMode,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            m: 4,
            beam_width: 8,
            seed: 0,
            selection_mode: SelectionMode::LmLikelihood,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::pre("M must be at least 1"));
        }
        if self.beam_width < self.m {
            return Err(Error::pre("beam width must be at least M"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Beam {
    ids: Vec<u32>,
    logp: f64,
    tie: u64,
}

fn beam_order(a: &Beam, b: &Beam) -> Ordering {
    b.logp
        .total_cmp(&a.logp)
        .then_with(|| a.tie.cmp(&b.tie))
        .then_with(|| a.ids.cmp(&b.ids))
}

/// Fills the template's gaps; see [`generate_candidates_excluding`].
pub fn generate_candidates(
    template: &SlotTemplate,
    lm: &NGramModel,
    params: &GeneratorParams,
) -> Result<Vec<Sentence>> {
    generate_candidates_excluding(template, lm, params, None)
}

/// Beam search over gap fillings. Keyword slots are copied verbatim; a gap
/// takes any model continuation not in `exclude` (a gap is known to carry a
/// non-keyword). Returns up to `M` distinct candidates, most likely first.
pub fn generate_candidates_excluding(
    template: &SlotTemplate,
    lm: &NGramModel,
    params: &GeneratorParams,
    exclude: Option<&BTreeSet<String>>,
) -> Result<Vec<Sentence>> {
    params.validate()?;
    if template.is_empty() {
        return Err(Error::pre("slot template is empty"));
    }
    let pad = lm.order - 1;
    let excluded: Vec<bool> = lm
        .words
        .iter()
        .map(|w| exclude.is_some_and(|set| set.contains(w)))
        .collect();
    let mut beams = vec![Beam {
        ids: vec![BOS_ID; pad],
        logp: 0.0,
        tie: params.seed,
    }];
    // Keyword slot ids; words missing from the model keep their text here.
    let mut literal: HashMap<usize, String> = HashMap::new();

    for (pos, slot) in template.slots.iter().enumerate() {
        match slot {
            Slot::Keyword(w) => {
                let id = lm.id(w);
                if id == UNK_ID {
                    literal.insert(pos, w.clone());
                }
                for b in &mut beams {
                    b.logp += lm.prob_ids(&b.ids, id).ln();
                    b.ids.push(id);
                }
            }
            Slot::Gap => {
                let mut next = Vec::new();
                for b in &beams {
                    let mut options: Vec<u32> = lm
                        .proposals(&b.ids)
                        .into_iter()
                        .filter(|&id| !excluded[id as usize])
                        .collect();
                    if options.is_empty() {
                        options = lm
                            .by_frequency
                            .iter()
                            .copied()
                            .filter(|&id| !excluded[id as usize])
                            .take(1)
                            .collect();
                    }
                    if options.is_empty() {
                        options = lm.by_frequency.iter().copied().take(1).collect();
                    }
                    if options.is_empty() {
                        return Err(Error::NoCandidate);
                    }
                    for id in options {
                        let mut ids = b.ids.clone();
                        ids.push(id);
                        next.push(Beam {
                            logp: b.logp + lm.prob_ids(&b.ids, id).ln(),
                            tie: splitmix64(b.tie ^ u64::from(id)),
                            ids,
                        });
                    }
                }
                next.sort_by(beam_order);
                next.truncate(params.beam_width);
                beams = next;
            }
        }
    }
    for b in &mut beams {
        b.logp += lm.prob_ids(&b.ids, EOS_ID).ln();
    }
    beams.sort_by(beam_order);

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for b in beams {
        let words: Vec<String> = b.ids[pad..]
            .iter()
            .enumerate()
            .map(|(pos, &id)| match literal.get(&pos) {
                Some(w) => w.clone(),
                None => lm.words[id as usize].clone(),
            })
            .collect();
        if seen.insert(words.clone()) {
            out.push(Sentence::from_tokens(words)?);
            if out.len() == params.m {
                break;
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoCandidate);
    }
    Ok(out)
}

/// Index of the candidate with the highest BLEU against `reference`; the
/// first one wins ties.
pub fn select_best_index(
    candidates: &[Sentence],
    reference: &Sentence,
    cfg: &BleuConfig,
) -> Result<usize> {
    argmax(candidates.iter().map(|c| bleu(c, reference, cfg).score))
}

pub fn select_best<'a>(
    candidates: &'a [Sentence],
    reference: &Sentence,
    cfg: &BleuConfig,
) -> Result<&'a Sentence> {
    select_best_index(candidates, reference, cfg).map(|i| &candidates[i])
}

/// Candidate with the highest model log-likelihood; the first one wins ties.
pub fn select_by_likelihood<'a>(
    candidates: &'a [Sentence],
    lm: &NGramModel,
) -> Result<&'a Sentence> {
    argmax(candidates.iter().map(|c| lm.sentence_logprob(c))).map(|i| &candidates[i])
}

fn argmax(scores: impl Iterator<Item = f64>) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.enumerate() {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i).ok_or(Error::EmptyCandidateList)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(lines: &[&str]) -> Corpus {
        Corpus::from_lines(lines.iter().copied(), "t").unwrap()
    }

    fn s(words: &str) -> Sentence {
        Sentence::from_words(words).unwrap()
    }

    fn template(spec: &[Option<&str>]) -> SlotTemplate {
        SlotTemplate {
            slots: spec
                .iter()
                .map(|o| o.map_or(Slot::Gap, |w| Slot::Keyword(w.to_string())))
                .collect(),
        }
    }

    #[test]
    fn mle_bigram_ratios() {
        let lm = train_lm_with(&corpus(&["a b", "a b"]), 2, 0.0).unwrap();
        assert_eq!(lm.prob(&["a"], "b"), 1.0);
        let lm = train_lm_with(&corpus(&["a b", "a c"]), 2, 0.0).unwrap();
        assert_eq!(lm.prob(&["a"], "b"), 0.5);
        assert_eq!(lm.prob(&["a"], "c"), 0.5);
    }

    #[test]
    fn order_bounds() {
        let c = corpus(&["a b"]);
        assert!(matches!(train_lm(&c, 0), Err(Error::Precondition(_))));
        assert!(matches!(train_lm(&c, 6), Err(Error::Precondition(_))));
        assert!(train_lm_with(&c, 2, 1.0).is_err());
    }

    #[test]
    fn conditionals_sum_to_one() {
        let c = corpus(&[
            "ronaldo shoots the ball",
            "the ball goes wide",
            "kane shoots wide",
            "the keeper makes a save",
        ]);
        for order in 1..=4 {
            for d in [0.0, 0.4, 0.9] {
                let lm = train_lm_with(&c, order, d).unwrap();
                for ctx in [
                    &[][..],
                    &["the"][..],
                    &["shoots", "the"][..],
                    &["zzz"][..],
                    &["ball", "goes", "wide"][..],
                ] {
                    let total: f64 = lm.distribution(ctx).iter().map(|(_, p)| p).sum();
                    assert!(
                        (total - 1.0).abs() < 1e-9,
                        "order {order} d {d} ctx {ctx:?}: {total}"
                    );
                }
            }
        }
    }

    #[test]
    fn text_dump_round_trip() {
        let c = corpus(&["a b c", "a c b", "b b a"]);
        let lm = train_lm(&c, 3).unwrap();
        let back = NGramModel::from_text(&lm.to_text()).unwrap();
        assert_eq!(back, lm);
        assert_eq!(back.to_text(), lm.to_text());
        assert_eq!(back.prob(&["a"], "b"), lm.prob(&["a"], "b"));
        assert!(NGramModel::from_text("nonsense").is_err());
    }

    #[test]
    fn all_keyword_template_has_one_candidate() {
        let lm = train_lm(&corpus(&["a b", "a c"]), 3).unwrap();
        let t = template(&[Some("a"), Some("c"), Some("zzz")]);
        let params = GeneratorParams {
            m: 4,
            ..Default::default()
        };
        let out = generate_candidates(&t, &lm, &params).unwrap();
        assert_eq!(out, [s("a c zzz")]);
    }

    #[test]
    fn single_gap_ranked_by_likelihood() {
        // Exhaustive oracle: score every single-word fill with the trained model.
        let lm = train_lm(&corpus(&["a b", "a b", "a c"]), 3).unwrap();
        let mut fills: Vec<(f64, String)> = lm
            .vocab()
            .words()
            .iter()
            .map(|w| (lm.sentence_logprob(&s(&format!("a {w}"))), format!("a {w}")))
            .collect();
        fills.sort_by(|x, y| y.0.total_cmp(&x.0));
        assert_eq!(fills[0].1, "a b");
        assert_eq!(fills[1].1, "a c");

        let t = template(&[Some("a"), None]);
        let params = GeneratorParams {
            m: 2,
            beam_width: 4,
            ..Default::default()
        };
        let out = generate_candidates(&t, &lm, &params).unwrap();
        assert_eq!(out, [s("a b"), s("a c")]);

        let greedy = GeneratorParams {
            m: 1,
            beam_width: 1,
            ..Default::default()
        };
        assert_eq!(generate_candidates(&t, &lm, &greedy).unwrap(), [s("a b")]);
    }

    #[test]
    fn exclusion_skips_keywords_in_gaps() {
        let lm = train_lm(&corpus(&["a b", "a b", "a c"]), 3).unwrap();
        let t = template(&[Some("a"), None]);
        let params = GeneratorParams {
            m: 1,
            beam_width: 2,
            ..Default::default()
        };
        let ex: BTreeSet<String> = ["b".to_string()].into();
        let out = generate_candidates_excluding(&t, &lm, &params, Some(&ex)).unwrap();
        assert_eq!(out, [s("a c")]);
    }

    #[test]
    fn generation_preserves_keywords_and_length() {
        let c = corpus(&[
            "ronaldo shoots the ball into the net",
            "kane shoots the ball wide",
            "the keeper makes a great save",
            "salah passes the ball to kane",
        ]);
        let lm = train_lm(&c, 3).unwrap();
        let t = template(&[
            Some("kane"),
            None,
            None,
            Some("ball"),
            None,
            None,
            Some("net"),
        ]);
        let params = GeneratorParams::default();
        let a = generate_candidates(&t, &lm, &params).unwrap();
        let b = generate_candidates(&t, &lm, &params).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty() && a.len() <= params.m);
        for cand in &a {
            assert_eq!(cand.len(), t.len());
            for (slot, tok) in t.slots.iter().zip(cand.tokens()) {
                if let Slot::Keyword(w) = slot {
                    assert_eq!(w, tok);
                }
            }
        }
    }

    #[test]
    fn params_validation() {
        let lm = train_lm(&corpus(&["a b"]), 2).unwrap();
        let t = template(&[None]);
        let bad = GeneratorParams {
            m: 0,
            ..Default::default()
        };
        assert!(generate_candidates(&t, &lm, &bad).is_err());
        let bad = GeneratorParams {
            m: 5,
            beam_width: 4,
            ..Default::default()
        };
        assert!(generate_candidates(&t, &lm, &bad).is_err());
        assert!(generate_candidates(&template(&[]), &lm, &GeneratorParams::default()).is_err());
    }

    #[test]
    fn selection_rules() {
        let reference = s("the ball goes wide");
        let cands = [s("the ball goes high"), reference.clone()];
        assert_eq!(
            select_best(&cands, &reference, &BleuConfig::single(1)).unwrap(),
            &reference
        );
        assert_eq!(
            select_best(&cands[..1], &reference, &BleuConfig::single(1)).unwrap(),
            &cands[0]
        );
        assert!(matches!(
            select_best(&[], &reference, &BleuConfig::single(1)),
            Err(Error::EmptyCandidateList)
        ));

        let reference = s("a b c d e f g h i j");
        let hi = s("a b c d e f g h i x");
        let lo = s("a b c x x x x x x x");
        let cfg = BleuConfig::single(1);
        assert!((bleu(&hi, &reference, &cfg).score - 0.9).abs() < 1e-12);
        assert!((bleu(&lo, &reference, &cfg).score - 0.3).abs() < 1e-12);
        assert_eq!(
            select_best(&[lo.clone(), hi.clone()], &reference, &cfg).unwrap(),
            &hi
        );

        let lm = train_lm(&corpus(&["a b", "a b", "a c"]), 3).unwrap();
        let (ab, ac) = (s("a b"), s("a c"));
        assert!(lm.sentence_logprob(&ab) > lm.sentence_logprob(&ac));
        assert_eq!(
            select_by_likelihood(&[ac.clone(), ab.clone()], &lm).unwrap(),
            &ab
        );
        assert_eq!(select_by_likelihood(&[ac.clone()], &lm).unwrap(), &ac);
        assert_eq!(
            select_by_likelihood(&[ab.clone(), ab.clone()], &lm).unwrap(),
            &ab
        );
        assert!(select_by_likelihood(&[], &lm).is_err());
    }
}
