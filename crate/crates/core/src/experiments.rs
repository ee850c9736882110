//! End-to-end runs: keyword extraction, coding, channel, reconstruction and
//! scoring, plus ρ sweeps and the overhead minimisation under a BLEU floor.
//!
//! Randomness is derived per work unit with [`seed::derive`]:
//!
//! * RANDOM permutation of seed index `s`: `derive(master, [KB_STREAM, s])`
//! * channel noise of sentence `i` at grid index `r`, seed index `s`:
//!   `derive(master, [r, s, i])`
//!
//! so parallel execution reproduces serial output exactly.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bleu::{bleu_1_to_4, BleuConfig};
use crate::corpus::{build_vocabulary, Corpus, Sentence, Vocabulary};
use crate::error::{Error, Result};
use crate::extract::{compute_mask, extract_keywords};
use crate::kb::{augment, KnowledgeBase, Scheme};
use crate::lm::{
    generate_candidates_excluding, select_best, select_by_likelihood, train_lm_with,
    GeneratorParams, NGramModel, SelectionMode, SlotTemplate, DEFAULT_DISCOUNT, DEFAULT_ORDER,
};
use crate::phy::{build_codebook, decode, encode, transmit, ChannelConfig, Codebook};
use crate::seed;

const KB_STREAM: u64 = 0x4B42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub scheme: Scheme,
    pub rho: f64,
    /// Master seed for KB permutations and channel noise.
    pub seed: u64,
    /// Number of RANDOM permutations (and noise realizations) per sweep point.
    pub seed_count: usize,
    pub channel: ChannelConfig,
    pub generator: GeneratorParams,
    /// Used when selecting among candidates by BLEU.
    pub bleu: BleuConfig,
    pub train_fraction: f64,
    pub eval_fraction: f64,
    pub lm_order: usize,
    pub lm_discount: f64,
    /// Gap fills never use KB keywords (a gap is known to be a non-keyword).
    pub exclude_keywords_in_gaps: bool,
    /// Transmit every token with its own symbol.
    pub full_baseline: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Ordered,
            rho: 0.0,
            seed: 0,
            seed_count: 10,
            channel: ChannelConfig::default(),
            generator: GeneratorParams::default(),
            bleu: BleuConfig::default(),
            train_fraction: 0.8,
            eval_fraction: 0.2,
            lm_order: DEFAULT_ORDER,
            lm_discount: DEFAULT_DISCOUNT,
            exclude_keywords_in_gaps: true,
            full_baseline: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let in_open_unit = |f: f64| f > 0.0 && f < 1.0;
        if !in_open_unit(self.train_fraction) || !in_open_unit(self.eval_fraction) {
            return Err(Error::pre("split fractions must lie in (0, 1)"));
        }
        if self.train_fraction + self.eval_fraction > 1.0 + 1e-12 {
            return Err(Error::pre("split fractions sum to more than 1"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::pre("rho must lie in [0, 1]"));
        }
        if self.seed_count == 0 {
            return Err(Error::pre("seed count must be at least 1"));
        }
        self.channel.validate()?;
        self.generator.validate()?;
        self.bleu.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceResult {
    /// Index of the sentence in the evaluated corpus.
    pub sentence_id: usize,
    pub keyword_count: usize,
    /// Single-order BLEU for n = 1..=4 against the original sentence.
    pub bleu: [f64; 4],
    pub erasures: usize,
    pub substitutions: usize,
    /// Keyword mask as a bit-string.
    pub mask: String,
    pub reconstructed: String,
}

/// Train/eval split: the first ⌊train·N⌋ sentences train the model, the
/// following ⌊eval·N⌋ are evaluated. Each side keeps at least one sentence.
pub fn split(corpus: &Corpus, train_fraction: f64, eval_fraction: f64) -> Result<(Corpus, Corpus)> {
    let n = corpus.len();
    if n < 2 {
        return Err(Error::pre("a split needs at least two sentences"));
    }
    let n_train = ((train_fraction * n as f64 + 1e-9).floor() as usize).clamp(1, n - 1);
    let n_eval = ((eval_fraction * n as f64 + 1e-9).floor() as usize).clamp(1, n - n_train);
    Ok((
        corpus.slice(0, n_train, "train")?,
        corpus.slice(n_train, n_train + n_eval, "eval")?,
    ))
}

/// Everything fixed across the runs of one experiment: the splits, the
/// vocabulary the schemes draw from, the base KB, and the trained model.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub train: Corpus,
    pub eval: Corpus,
    pub vocab: Vocabulary,
    pub base_kb: KnowledgeBase,
    pub lm: NGramModel,
}

impl Experiment {
    /// Splits the corpus, trains the model on the train split and takes the
    /// vocabulary from the whole corpus.
    pub fn new(corpus: &Corpus, base_kb: &KnowledgeBase, cfg: &PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let (train, eval) = split(corpus, cfg.train_fraction, cfg.eval_fraction)?;
        let lm = train_lm_with(&train, cfg.lm_order, cfg.lm_discount)?;
        Ok(Self {
            vocab: build_vocabulary(corpus),
            base_kb: base_kb.clone().with_lm_ref(train.source_id()),
            train,
            eval,
            lm,
        })
    }

    /// Evaluates `eval` with a model trained on `train`.
    pub fn from_parts(
        train: Corpus,
        eval: Corpus,
        vocab: Vocabulary,
        base_kb: KnowledgeBase,
        cfg: &PipelineConfig,
    ) -> Result<Self> {
        let lm = train_lm_with(&train, cfg.lm_order, cfg.lm_discount)?;
        Ok(Self {
            base_kb: base_kb.with_lm_ref(train.source_id()),
            train,
            eval,
            vocab,
            lm,
        })
    }

    pub fn kb_seed(master: u64, seed_index: usize) -> u64 {
        seed::derive(master, &[KB_STREAM, seed_index as u64])
    }

    /// The KB for one sweep coordinate.
    pub fn knowledge_base(
        &self,
        scheme: Scheme,
        rho: f64,
        master: u64,
        seed_index: usize,
    ) -> Result<KnowledgeBase> {
        augment(
            &self.base_kb,
            &self.vocab,
            scheme,
            rho,
            Self::kb_seed(master, seed_index),
        )
    }

    /// KB holding every vocabulary word: the transmit-everything baseline.
    pub fn full_kb(&self) -> Result<KnowledgeBase> {
        augment(&self.base_kb, &self.vocab, Scheme::Ordered, 1.0, 0)
    }

    /// Runs every eval sentence through the chain under `kb`.
    pub fn evaluate(
        &self,
        kb: &KnowledgeBase,
        cfg: &PipelineConfig,
        rho_index: usize,
        seed_index: usize,
    ) -> Result<Vec<SentenceResult>> {
        let cb = build_codebook(kb)?;
        let exclude = cfg.exclude_keywords_in_gaps.then(|| kb.keywords());
        self.eval
            .sentences()
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let noise =
                    seed::derive(cfg.seed, &[rho_index as u64, seed_index as u64, i as u64]);
                self.run_sentence(i, s, kb, &cb, cfg, exclude, noise)
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn run_sentence(
        &self,
        id: usize,
        sentence: &Sentence,
        kb: &KnowledgeBase,
        cb: &Codebook,
        cfg: &PipelineConfig,
        exclude: Option<&BTreeSet<String>>,
        noise_seed: u64,
    ) -> Result<SentenceResult> {
        let mask = compute_mask(sentence, kb);
        let keywords = extract_keywords(sentence, &mask)?;
        let frame = encode(&mask, &keywords, cb)?;
        let channel = cfg.channel.with_seed(noise_seed);
        let decoded = decode(&transmit(&frame, &channel)?, cb, &channel)?;
        let sent = frame.slot_indices.as_deref().unwrap_or_default();
        let substitutions = decoded
            .indices
            .iter()
            .zip(sent)
            .filter(|(&got, &want)| got != want && got <= cb.max_index())
            .count();

        let candidates =
            generate_candidates_excluding(&decoded.template, &self.lm, &cfg.generator, exclude)?;
        let chosen = match cfg.generator.selection_mode {
            SelectionMode::LmLikelihood => select_by_likelihood(&candidates, &self.lm)?,
            SelectionMode::BleuVsReference => {
                let reference = self.transmitter_reference(sentence, kb, cfg)?;
                select_best(&candidates, &reference, &cfg.bleu)?
            }
        };
        Ok(SentenceResult {
            sentence_id: id,
            keyword_count: keywords.len(),
            bleu: bleu_1_to_4(chosen, sentence),
            erasures: decoded.erasures,
            substitutions,
            mask: mask.to_string(),
            reconstructed: chosen.to_string(),
        })
    }

    /// The transmitter-side reconstruction: candidates from the noiseless
    /// keyword template, the one closest in BLEU to the source wins.
    pub fn transmitter_reference(
        &self,
        sentence: &Sentence,
        kb: &KnowledgeBase,
        cfg: &PipelineConfig,
    ) -> Result<Sentence> {
        let mask = compute_mask(sentence, kb);
        let keywords = extract_keywords(sentence, &mask)?;
        let template = SlotTemplate::from_keywords(sentence.len(), &keywords)?;
        let exclude = cfg.exclude_keywords_in_gaps.then(|| kb.keywords());
        let candidates =
            generate_candidates_excluding(&template, &self.lm, &cfg.generator, exclude)?;
        select_best(&candidates, sentence, &cfg.bleu).cloned()
    }

    /// Transmitter references for every training sentence, in order.
    pub fn transmitter_references(
        &self,
        kb: &KnowledgeBase,
        cfg: &PipelineConfig,
    ) -> Result<Vec<Sentence>> {
        self.train
            .sentences()
            .par_iter()
            .map(|s| self.transmitter_reference(s, kb, cfg))
            .collect()
    }
}

/// Single evaluation of `cfg.scheme` at `cfg.rho` (seed index 0).
pub fn run_pipeline(
    corpus: &Corpus,
    base_kb: &KnowledgeBase,
    cfg: &PipelineConfig,
) -> Result<Vec<SentenceResult>> {
    let exp = Experiment::new(corpus, base_kb, cfg)?;
    let kb = if cfg.full_baseline {
        exp.full_kb()?
    } else {
        exp.knowledge_base(cfg.scheme, cfg.rho, cfg.seed, 0)?
    };
    exp.evaluate(&kb, cfg, 0, 0)
}

/// Mean number of transmitted keywords per sentence.
pub fn avg_words(results: &[SentenceResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    Ok(results.iter().map(|r| r.keyword_count as f64).sum::<f64>() / results.len() as f64)
}

pub fn mean_bleu(results: &[SentenceResult]) -> Result<[f64; 4]> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    let n = results.len() as f64;
    Ok(std::array::from_fn(|k| {
        results.iter().map(|r| r.bleu[k]).sum::<f64>() / n
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub scheme: Scheme,
    pub rho: f64,
    pub seed_count: usize,
    pub mean_bleu: [f64; 4],
    pub w_bar: f64,
    /// Standard errors across seeds.
    pub se_bleu: [f64; 4],
    pub se_w_bar: f64,
}

/// Mean and standard error of the mean (sample standard deviation).
fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Raw results of one grid point: one result list per seed index.
#[derive(Debug, Clone)]
pub struct SweepRun {
    pub rho: f64,
    pub per_seed: Vec<Vec<SentenceResult>>,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub scheme: Scheme,
    pub runs: Vec<SweepRun>,
}

fn check_grid(rho_grid: &[f64]) -> Result<()> {
    if rho_grid.is_empty() {
        return Err(Error::pre("rho grid is empty"));
    }
    if rho_grid.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(Error::pre("rho grid values must lie in [0, 1]"));
    }
    if rho_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::pre("rho grid must be sorted"));
    }
    Ok(())
}

/// Runs every (ρ, seed index) unit of the grid.
pub fn run_sweep(
    exp: &Experiment,
    scheme: Scheme,
    rho_grid: &[f64],
    cfg: &PipelineConfig,
) -> Result<Sweep> {
    cfg.validate()?;
    check_grid(rho_grid)?;
    let units: Vec<(usize, usize)> = (0..rho_grid.len())
        .flat_map(|r| (0..cfg.seed_count).map(move |s| (r, s)))
        .collect();
    let mut results: Vec<Vec<SentenceResult>> = units
        .par_iter()
        .map(|&(r, s)| {
            let kb = exp.knowledge_base(scheme, rho_grid[r], cfg.seed, s)?;
            exp.evaluate(&kb, cfg, r, s)
        })
        .collect::<Result<_>>()?;
    let mut runs = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid.iter().rev() {
        let per_seed = results.split_off(results.len() - cfg.seed_count);
        runs.push(SweepRun { rho, per_seed });
    }
    runs.reverse();
    Ok(Sweep { scheme, runs })
}

impl Sweep {
    pub fn curve(&self) -> Result<Vec<CurvePoint>> {
        self.runs
            .iter()
            .map(|run| {
                let per_seed_bleu = run
                    .per_seed
                    .iter()
                    .map(|r| mean_bleu(r))
                    .collect::<Result<Vec<_>>>()?;
                let per_seed_w = run
                    .per_seed
                    .iter()
                    .map(|r| avg_words(r))
                    .collect::<Result<Vec<_>>>()?;
                let stats: [(f64, f64); 4] = std::array::from_fn(|k| {
                    mean_se(&per_seed_bleu.iter().map(|b| b[k]).collect::<Vec<_>>())
                });
                let (w_bar, se_w_bar) = mean_se(&per_seed_w);
                Ok(CurvePoint {
                    scheme: self.scheme,
                    rho: run.rho,
                    seed_count: run.per_seed.len(),
                    mean_bleu: stats.map(|s| s.0),
                    w_bar,
                    se_bleu: stats.map(|s| s.1),
                    se_w_bar,
                })
            })
            .collect()
    }
}

/// One CurvePoint per grid value.
pub fn sweep_rho(
    exp: &Experiment,
    scheme: Scheme,
    rho_grid: &[f64],
    cfg: &PipelineConfig,
) -> Result<Vec<CurvePoint>> {
    run_sweep(exp, scheme, rho_grid, cfg)?.curve()
}

/// How the per-sentence accuracy floor is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintPolicy {
    /// Single BLEU order compared with τ.
    pub bleu_order: usize,
    /// Fraction of sentences that must reach τ.
    pub satisfaction: f64,
}

impl Default for ConstraintPolicy {
    fn default() -> Self {
        Self {
            bleu_order: 1,
            satisfaction: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauResult {
    pub scheme: Scheme,
    pub tau: f64,
    pub rho_star: Option<f64>,
    pub w_bar: Option<f64>,
    pub feasible: bool,
    /// At ρ*, or the best rate over the grid when infeasible.
    pub satisfaction_rate: f64,
}

impl Sweep {
    /// Smallest grid ρ whose runs satisfy the τ floor under `policy`.
    pub fn min_words_for_tau(&self, tau: f64, policy: &ConstraintPolicy) -> Result<TauResult> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::pre("tau must lie in [0, 1]"));
        }
        if !(1..=4).contains(&policy.bleu_order) {
            return Err(Error::pre("constraint BLEU order must be in 1..=4"));
        }
        if !(0.0..=1.0).contains(&policy.satisfaction) {
            return Err(Error::pre("satisfaction fraction must lie in [0, 1]"));
        }
        let k = policy.bleu_order - 1;
        let mut best = 0.0f64;
        for run in &self.runs {
            let all: Vec<&SentenceResult> = run.per_seed.iter().flatten().collect();
            let met = all.iter().filter(|r| r.bleu[k] >= tau).count();
            let rate = met as f64 / all.len() as f64;
            let needed = (policy.satisfaction * all.len() as f64 - 1e-9).ceil() as usize;
            if met >= needed {
                let w = mean_se(
                    &run.per_seed
                        .iter()
                        .map(|r| avg_words(r))
                        .collect::<Result<Vec<_>>>()?,
                )
                .0;
                return Ok(TauResult {
                    scheme: self.scheme,
                    tau,
                    rho_star: Some(run.rho),
                    w_bar: Some(w),
                    feasible: true,
                    satisfaction_rate: rate,
                });
            }
            best = best.max(rate);
        }
        Ok(TauResult {
            scheme: self.scheme,
            tau,
            rho_star: None,
            w_bar: None,
            feasible: false,
            satisfaction_rate: best,
        })
    }
}

/// Runs the grid once and solves the minimisation for one τ.
pub fn min_words_for_tau(
    exp: &Experiment,
    scheme: Scheme,
    tau: f64,
    cfg: &PipelineConfig,
    rho_grid: &[f64],
    policy: &ConstraintPolicy,
) -> Result<TauResult> {
    run_sweep(exp, scheme, rho_grid, cfg)?.min_words_for_tau(tau, policy)
}

/// Rows that can be written as CSV with a fixed header.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl CsvRow for SentenceResult {
    const HEADER: &'static [&'static str] = &[
        "id",
        "keyword_count",
        "bleu_1",
        "bleu_2",
        "bleu_3",
        "bleu_4",
        "erasures",
        "substitutions",
        "mask",
    ];

    fn fields(&self) -> Vec<String> {
        let mut f = vec![self.sentence_id.to_string(), self.keyword_count.to_string()];
        f.extend(self.bleu.iter().map(f64::to_string));
        f.extend([
            self.erasures.to_string(),
            self.substitutions.to_string(),
            self.mask.clone(),
        ]);
        f
    }
}

impl CsvRow for CurvePoint {
    const HEADER: &'static [&'static str] = &[
        "scheme",
        "rho",
        "seed_count",
        "mean_bleu_1",
        "mean_bleu_2",
        "mean_bleu_3",
        "mean_bleu_4",
        "w_bar",
        "se_bleu_1",
        "se_bleu_2",
        "se_bleu_3",
        "se_bleu_4",
        "se_w_bar",
    ];

    fn fields(&self) -> Vec<String> {
        let mut f = vec![
            self.scheme.to_string(),
            self.rho.to_string(),
            self.seed_count.to_string(),
        ];
        f.extend(self.mean_bleu.iter().map(f64::to_string));
        f.push(self.w_bar.to_string());
        f.extend(self.se_bleu.iter().map(f64::to_string));
        f.push(self.se_w_bar.to_string());
        f
    }
}

impl CsvRow for TauResult {
    const HEADER: &'static [&'static str] = &[
        "scheme",
        "tau",
        "rho_star",
        "w_bar",
        "feasible",
        "satisfaction_rate",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.scheme.to_string(),
            self.tau.to_string(),
            opt(self.rho_star),
            opt(self.w_bar),
            self.feasible.to_string(),
            self.satisfaction_rate.to_string(),
        ]
    }
}

impl CsvRow for crate::info::BoundReport {
    const HEADER: &'static [&'static str] = &[
        "trial",
        "l1",
        "l2",
        "mi",
        "l",
        "ce",
        "h_lambda",
        "b",
        "gap",
        "delta_residual",
    ];

    fn fields(&self) -> Vec<String> {
        let mut f = vec![self.trial.to_string()];
        f.extend(
            [
                self.l1,
                self.l2,
                self.mi,
                self.l,
                self.ce,
                self.h_lambda,
                self.b,
                self.gap,
                self.delta_residual,
            ]
            .iter()
            .map(f64::to_string),
        );
        f
    }
}

/// Serializes rows to CSV bytes; an empty slice yields the header only.
pub fn to_csv_bytes<T: CsvRow>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(T::HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.into_inner()
        .map_err(|e| Error::io("<csv buffer>", e.into_error()))
}

pub fn export_csv<T: CsvRow>(rows: &[T], path: &Path) -> Result<()> {
    let bytes = to_csv_bytes(rows)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_synthetic_corpus, NormalizationPolicy, TemplateSet};
    use crate::kb::build_base_kb;

    fn football_kb() -> KnowledgeBase {
        let set = TemplateSet::load("football").unwrap();
        build_base_kb(&set.keywords, &NormalizationPolicy::default()).unwrap()
    }

    fn result(count: usize) -> SentenceResult {
        SentenceResult {
            sentence_id: 0,
            keyword_count: count,
            bleu: [1.0, 1.0, 1.0, 1.0],
            erasures: 0,
            substitutions: 0,
            mask: String::new(),
            reconstructed: String::new(),
        }
    }

    #[test]
    fn avg_words_examples() {
        let r: Vec<_> = [6, 4, 5].into_iter().map(result).collect();
        assert_eq!(avg_words(&r).unwrap(), 5.0);
        assert_eq!(avg_words(&r[..1]).unwrap(), 6.0);
        assert!(matches!(avg_words(&[]), Err(Error::EmptyResults)));
    }

    #[test]
    fn split_sizes() {
        let c = generate_synthetic_corpus(1, 10, "football").unwrap();
        let (t, e) = split(&c, 0.8, 0.2).unwrap();
        assert_eq!((t.len(), e.len()), (8, 2));
        assert_eq!(t.sentences()[0], c.sentences()[0]);
        assert_eq!(e.sentences()[0], c.sentences()[8]);
        assert!(PipelineConfig {
            train_fraction: 0.9,
            eval_fraction: 0.2,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn identity_pipeline_is_lossless() {
        let c = generate_synthetic_corpus(3, 200, "football").unwrap();
        let cfg = PipelineConfig {
            channel: ChannelConfig::noiseless(),
            full_baseline: true,
            ..Default::default()
        };
        let results = run_pipeline(&c, &football_kb(), &cfg).unwrap();
        let (_, eval) = split(&c, 0.8, 0.2).unwrap();
        assert_eq!(results.len(), eval.len());
        for (r, s) in results.iter().zip(eval.sentences()) {
            assert_eq!(r.bleu[0], 1.0);
            assert_eq!(r.keyword_count, s.len());
            assert_eq!(r.reconstructed, s.to_string());
        }
        assert!((avg_words(&results).unwrap() - eval.mean_sentence_len()).abs() < 1e-12);
    }

    #[test]
    fn no_keyword_overlap_is_total() {
        let c = generate_synthetic_corpus(3, 100, "football").unwrap();
        let kb = build_base_kb(&["zzz-not-a-word"], &NormalizationPolicy::default()).unwrap();
        let cfg = PipelineConfig {
            scheme: Scheme::Base,
            ..Default::default()
        };
        let results = run_pipeline(&c, &kb, &cfg).unwrap();
        for r in &results {
            assert_eq!(r.keyword_count, 0);
            assert!(r.bleu.iter().all(|b| (0.0..=1.0).contains(b)));
        }
    }

    #[test]
    fn pipeline_is_deterministic() {
        let c = generate_synthetic_corpus(5, 150, "football").unwrap();
        let cfg = PipelineConfig {
            scheme: Scheme::Random,
            rho: 0.3,
            seed: 42,
            ..Default::default()
        };
        let a = run_pipeline(&c, &football_kb(), &cfg).unwrap();
        let b = run_pipeline(&c, &football_kb(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(to_csv_bytes(&a).unwrap(), to_csv_bytes(&b).unwrap());
    }

    #[test]
    fn bleu_reference_selection_runs() {
        let c = generate_synthetic_corpus(5, 100, "football").unwrap();
        let mut cfg = PipelineConfig {
            rho: 0.2,
            ..Default::default()
        };
        cfg.generator.selection_mode = SelectionMode::BleuVsReference;
        let r = run_pipeline(&c, &football_kb(), &cfg).unwrap();
        assert_eq!(r.len(), 20);
    }

    #[test]
    fn sweep_endpoints() {
        let c = generate_synthetic_corpus(9, 300, "football").unwrap();
        let cfg = PipelineConfig {
            channel: ChannelConfig::noiseless(),
            seed_count: 2,
            ..Default::default()
        };
        let exp = Experiment::new(&c, &football_kb(), &cfg).unwrap();
        for scheme in [Scheme::Random, Scheme::Ordered] {
            let curve = sweep_rho(&exp, scheme, &[0.0, 0.5, 1.0], &cfg).unwrap();
            assert_eq!(curve.len(), 3);
            assert_eq!(curve[2].mean_bleu[0], 1.0);
            assert!((curve[2].w_bar - exp.eval.mean_sentence_len()).abs() < 1e-12);
            let base: Vec<SentenceResult> = exp.evaluate(&exp.base_kb, &cfg, 0, 0).unwrap();
            assert!((curve[0].w_bar - avg_words(&base).unwrap()).abs() < 1e-12);
            assert!(curve[0].w_bar < curve[1].w_bar && curve[1].w_bar < curve[2].w_bar);
        }
        assert!(sweep_rho(&exp, Scheme::Random, &[0.5, 0.2], &cfg).is_err());
        assert!(sweep_rho(&exp, Scheme::Random, &[0.5, 1.2], &cfg).is_err());
    }

    #[test]
    fn tau_endpoints() {
        let c = generate_synthetic_corpus(9, 300, "football").unwrap();
        let cfg = PipelineConfig {
            channel: ChannelConfig::noiseless(),
            seed_count: 2,
            ..Default::default()
        };
        let exp = Experiment::new(&c, &football_kb(), &cfg).unwrap();
        let grid = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        let sweep = run_sweep(&exp, Scheme::Ordered, &grid, &cfg).unwrap();
        let policy = ConstraintPolicy::default();
        let zero = sweep.min_words_for_tau(0.0, &policy).unwrap();
        assert_eq!(zero.rho_star, Some(0.0));
        let base = avg_words(&exp.evaluate(&exp.base_kb, &cfg, 0, 0).unwrap()).unwrap();
        assert!((zero.w_bar.unwrap() - base).abs() < 1e-12);

        // Brute force over the grid: the smallest ρ at which every sentence is exact.
        let exact_at: Vec<bool> = sweep
            .runs
            .iter()
            .map(|run| run.per_seed.iter().flatten().all(|r| r.bleu[0] == 1.0))
            .collect();
        let first = exact_at.iter().position(|&ok| ok).map(|i| grid[i]);
        let one = sweep.min_words_for_tau(1.0, &policy).unwrap();
        assert_eq!(one.rho_star, first);
        assert_eq!(one.rho_star, Some(1.0));
        assert!(sweep.min_words_for_tau(1.5, &policy).is_err());
    }

    #[test]
    fn infeasible_tau_under_noise() {
        let c = generate_synthetic_corpus(9, 200, "football").unwrap();
        let cfg = PipelineConfig {
            channel: ChannelConfig {
                snr_db: -2.0,
                ..Default::default()
            },
            seed_count: 1,
            ..Default::default()
        };
        let exp = Experiment::new(&c, &football_kb(), &cfg).unwrap();
        let r = min_words_for_tau(
            &exp,
            Scheme::Ordered,
            1.0,
            &cfg,
            &[0.0, 1.0],
            &ConstraintPolicy::default(),
        )
        .unwrap();
        assert!(!r.feasible);
        assert_eq!(r.rho_star, None);
        assert!(r.satisfaction_rate < 1.0);
    }

    #[test]
    fn csv_export() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.csv");
        export_csv::<TauResult>(&[], &p).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "scheme,tau,rho_star,w_bar,feasible,satisfaction_rate\n"
        );
        let rows = vec![TauResult {
            scheme: Scheme::Random,
            tau: 0.5,
            rho_star: None,
            w_bar: None,
            feasible: false,
            satisfaction_rate: 0.25,
        }];
        export_csv(&rows, &p).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap().lines().nth(1),
            Some("RANDOM,0.5,,,false,0.25")
        );
        let bad = dir.path().join("missing-dir").join("x.csv");
        assert!(matches!(export_csv(&rows, &bad), Err(Error::Io { .. })));
    }
}
