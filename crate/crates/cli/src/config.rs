//! Flag/config-file merging. A flag given on the command line wins over the
//! same key in the config file, which wins over the built-in default.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use semcom_core::corpus::{generate_synthetic_corpus, load_corpus, TemplateSet};
use semcom_core::experiments::{ConstraintPolicy, PipelineConfig};
use semcom_core::kb::build_base_kb;
use semcom_core::lm::{GeneratorParams, SelectionMode};
use semcom_core::{ChannelConfig, Corpus, KnowledgeBase, NormalizationPolicy, Scheme};

use crate::CliError;

/// Relative input paths that do not exist are looked up under this directory.
pub const DATA_DIR_ENV: &str = "SEMCOM_DATA_DIR";

/// Keys accepted in the `--config` TOML file. Names match the long flags
/// with dashes replaced by underscores.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub template: Option<String>,
    pub synthetic_n: Option<usize>,
    pub corpus_seed: Option<u64>,
    pub scheme: Option<String>,
    pub rho: Option<f64>,
    pub rho_grid: Option<Vec<f64>>,
    pub seeds: Option<usize>,
    pub seed: Option<u64>,
    pub snr_db: Option<f64>,
    pub gain: Option<f64>,
    pub m: Option<usize>,
    pub beam_width: Option<usize>,
    pub lm_order: Option<usize>,
    pub lm_discount: Option<f64>,
    pub train_fraction: Option<f64>,
    pub eval_fraction: Option<f64>,
    pub selection: Option<String>,
    pub tau: Option<Vec<f64>>,
    pub satisfaction: Option<f64>,
    pub bleu_order: Option<usize>,
    pub trials: Option<usize>,
    pub support: Option<usize>,
    pub gamma: Option<f64>,
    pub bits: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let path = resolve_input(path);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

pub fn resolve_input(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

/// Where sentences and base keywords come from.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Corpus file, one sentence per line [default: bundled synthetic corpus]
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Base keyword list, a JSON array of strings [default: template keywords]
    #[arg(long)]
    pub kb: Option<PathBuf>,
    /// Bundled template family for the synthetic corpus and default keywords [default: football]
    #[arg(long)]
    pub template: Option<String>,
    /// Sentences in the synthetic corpus [default: 1000]
    #[arg(long)]
    pub synthetic_n: Option<usize>,
    /// Seed of the synthetic corpus [default: 7]
    #[arg(long)]
    pub corpus_seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Source {
    pub corpus: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub template: String,
    pub synthetic_n: usize,
    pub corpus_seed: u64,
}

impl SourceArgs {
    pub fn resolve(&self, file: &FileConfig) -> Source {
        Source {
            corpus: self.corpus.clone().or_else(|| file.corpus.clone()),
            kb: self.kb.clone().or_else(|| file.kb.clone()),
            template: pick(
                self.template.clone(),
                file.template.clone(),
                "football".into(),
            ),
            synthetic_n: pick(self.synthetic_n, file.synthetic_n, 1000),
            corpus_seed: pick(self.corpus_seed, file.corpus_seed, 7),
        }
    }
}

impl Source {
    pub fn corpus(&self) -> Result<Corpus, CliError> {
        let norm = NormalizationPolicy::default();
        match &self.corpus {
            Some(p) => Ok(load_corpus(&resolve_input(p), &norm)?),
            None => Ok(generate_synthetic_corpus(
                self.corpus_seed,
                self.synthetic_n,
                &self.template,
            )?),
        }
    }

    pub fn base_kb(&self) -> Result<KnowledgeBase, CliError> {
        let norm = NormalizationPolicy::default();
        match &self.kb {
            Some(p) => Ok(KnowledgeBase::load(&resolve_input(p), &norm)?),
            None => {
                let set = TemplateSet::load(&self.template)?;
                Ok(build_base_kb(&set.keywords, &norm)?)
            }
        }
    }
}

/// Pipeline knobs shared by `run`, `sweep`, `optimize` and `train`.
#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Channel SNR in dB; `inf` for a noiseless channel [default: 6]
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Channel gain h, known at the receiver [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub gain: Option<f64>,
    /// Candidates generated per sentence (M) [default: 4]
    #[arg(long)]
    pub m: Option<usize>,
    /// Beam width of the gap filler, at least M [default: 8]
    #[arg(long)]
    pub beam_width: Option<usize>,
    /// Master seed for KB permutations and channel noise [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Language model order [default: 3]
    #[arg(long)]
    pub lm_order: Option<usize>,
    /// Absolute discount of the language model [default: 0.4]
    #[arg(long)]
    pub lm_discount: Option<f64>,
    /// Fraction of sentences used to train the model [default: 0.8]
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Fraction of sentences evaluated [default: 0.2]
    #[arg(long)]
    pub eval_fraction: Option<f64>,
    /// Receiver selection rule: likelihood or bleu [default: likelihood]
    #[arg(long)]
    pub selection: Option<String>,
}

impl PipelineArgs {
    pub fn resolve(&self, file: &FileConfig) -> Result<PipelineConfig, CliError> {
        let d = PipelineConfig::default();
        let selection = match pick(
            self.selection.clone(),
            file.selection.clone(),
            "likelihood".into(),
        )
        .as_str()
        {
            "likelihood" => SelectionMode::LmLikelihood,
            "bleu" => SelectionMode::BleuVsReference,
            other => return Err(CliError::usage(format!("unknown selection rule {other:?}"))),
        };
        let cfg = PipelineConfig {
            seed: pick(self.seed, file.seed, d.seed),
            channel: ChannelConfig {
                snr_db: pick(self.snr_db, file.snr_db, d.channel.snr_db),
                gain: pick(self.gain, file.gain, d.channel.gain),
                seed: 0,
            },
            generator: GeneratorParams {
                m: pick(self.m, file.m, d.generator.m),
                beam_width: pick(self.beam_width, file.beam_width, d.generator.beam_width),
                seed: pick(self.seed, file.seed, d.seed),
                selection_mode: selection,
            },
            lm_order: pick(self.lm_order, file.lm_order, d.lm_order),
            lm_discount: pick(self.lm_discount, file.lm_discount, d.lm_discount),
            train_fraction: pick(self.train_fraction, file.train_fraction, d.train_fraction),
            eval_fraction: pick(self.eval_fraction, file.eval_fraction, d.eval_fraction),
            ..d
        };
        Ok(cfg)
    }
}

pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn parse_scheme(s: &str) -> Result<Scheme, CliError> {
    s.parse().map_err(CliError::usage)
}

pub fn constraint(satisfaction: f64, bleu_order: usize) -> ConstraintPolicy {
    ConstraintPolicy {
        bleu_order,
        satisfaction,
    }
}
