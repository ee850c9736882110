//! Knowledge-aware semantic communication for text.
//!
//! A sentence is reduced to the keywords found in a shared knowledge base.
//! Only keyword slots are coded with unique symbols; every other word is sent
//! as one common symbol, so the receiver learns the sentence length and the
//! gap positions. After an AWGN channel the receiver fills the gaps with a
//! shared n-gram language model and the result is scored with BLEU.
//!
//! The crate is organised bottom-up:
//!
//! * [`corpus`] tokenization, corpora, vocabulary, synthetic commentary
//! * [`kb`] base knowledge base and the RANDOM / ORDERED augmentation schemes
//! * [`extract`] keyword masks and keyword sets
//! * [`bleu`] modified n-gram precision, brevity penalty, BLEU
//! * [`lm`] backoff n-gram model, constrained gap filling, candidate selection
//! * [`phy`] codebook, antipodal modulation, AWGN channel, decoding
//! * [`info`] entropy, divergences, the distortion loss and its bound
//! * [`experiments`] pipeline runs, ρ sweeps, overhead minimisation, CSV export

pub mod bleu;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod extract;
pub mod info;
pub mod kb;
pub mod lm;
pub mod phy;
pub mod seed;

pub use bleu::{BleuBreakdown, BleuConfig, BleuMode};
pub use corpus::{Corpus, NormalizationPolicy, Sentence, Vocabulary};
pub use error::{Error, Result};
pub use experiments::{CurvePoint, PipelineConfig, SentenceResult};
pub use extract::{KeywordMask, KeywordSet};
pub use info::{BoundReport, DiscreteDistribution, JointDistribution};
pub use kb::{KnowledgeBase, Scheme};
pub use lm::{GeneratorParams, NGramModel, SelectionMode, Slot, SlotTemplate};
pub use phy::{ChannelConfig, Codebook, SymbolFrame};
