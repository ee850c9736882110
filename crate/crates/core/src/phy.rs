//! Keyword codec and AWGN channel.
//!
//! Every slot of a sentence becomes one codebook index: 0 for the common
//! non-keyword symbol, `1..=K` for the keywords in sorted order. Indices are
//! written MSB first on `bits_per_symbol` bits and each bit is sent as one
//! antipodal sample (`1 -> +1`, `0 -> -1`) on the in-phase axis, so the
//! transmitted power is exactly 1.
//!
//! The channel applies `y = h x + n` with complex Gaussian noise of total
//! variance `σ² = 10^(-snr_db/10)` (σ²/2 per axis). The receiver knows `h`,
//! equalizes, and slices the in-phase component at zero; the bit error rate
//! is then `Q(sqrt(2 h² / σ²))`.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::extract::{KeywordMask, KeywordSet};
use crate::kb::KnowledgeBase;
use crate::lm::{Slot, SlotTemplate};
use crate::seed;

pub const COMMON_INDEX: u32 = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    word_to_index: BTreeMap<String, u32>,
    /// `index_to_word[i - 1]` is the keyword with index `i`.
    index_to_word: Vec<String>,
    bits_per_symbol: usize,
}

/// Smallest `b ≥ 1` with `2^b ≥ n_symbols`.
pub fn bits_for(n_symbols: usize) -> usize {
    let mut b = 1;
    while (1usize << b) < n_symbols {
        b += 1;
    }
    b
}

pub fn build_codebook(kb: &KnowledgeBase) -> Result<Codebook> {
    if kb.is_empty() {
        return Err(Error::EmptyKb);
    }
    let index_to_word: Vec<String> = kb.keywords().iter().cloned().collect();
    let word_to_index = index_to_word
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32 + 1))
        .collect();
    Ok(Codebook {
        bits_per_symbol: bits_for(index_to_word.len() + 1),
        word_to_index,
        index_to_word,
    })
}

impl Codebook {
    pub fn index_of(&self, word: &str) -> Option<u32> {
        self.word_to_index.get(word).copied()
    }

    pub fn word(&self, index: u32) -> Option<&str> {
        match index {
            COMMON_INDEX => None,
            i => self.index_to_word.get(i as usize - 1).map(String::as_str),
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Largest valid keyword index.
    pub fn max_index(&self) -> u32 {
        self.index_to_word.len() as u32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    /// Per-slot indices; `None` on a received frame until it is decoded.
    pub slot_indices: Option<Vec<u32>>,
    /// One (I, Q) sample per bit.
    pub iq_samples: Vec<(f64, f64)>,
    pub frame_len: usize,
    pub bits_per_symbol: usize,
}

impl SymbolFrame {
    /// Modulates per-slot indices.
    pub fn from_indices(indices: Vec<u32>, bits_per_symbol: usize) -> Self {
        let iq_samples = indices
            .iter()
            .flat_map(|&idx| index_to_bits(idx, bits_per_symbol))
            .map(|bit| (if bit { 1.0 } else { -1.0 }, 0.0))
            .collect();
        Self {
            frame_len: indices.len(),
            slot_indices: Some(indices),
            iq_samples,
            bits_per_symbol,
        }
    }

    pub fn mean_power(&self) -> f64 {
        if self.iq_samples.is_empty() {
            return 0.0;
        }
        self.iq_samples
            .iter()
            .map(|(i, q)| i * i + q * q)
            .sum::<f64>()
            / self.iq_samples.len() as f64
    }
}

fn index_to_bits(index: u32, bits: usize) -> impl Iterator<Item = bool> {
    (0..bits).rev().map(move |b| (index >> b) & 1 == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Es/N0 in dB; `f64::INFINITY` is a noiseless channel.
    pub snr_db: f64,
    pub gain: f64,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            snr_db: 6.0,
            gain: 1.0,
            seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn noiseless() -> Self {
        Self {
            snr_db: f64::INFINITY,
            ..Default::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Total complex noise variance σ² for unit-power symbols.
    pub fn noise_variance(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gain == 0.0 || !self.gain.is_finite() {
            return Err(Error::pre("channel gain must be finite and non-zero"));
        }
        if self.snr_db.is_nan() {
            return Err(Error::pre("snr_db is NaN"));
        }
        Ok(())
    }
}

pub fn encode(mask: &KeywordMask, keywords: &KeywordSet, cb: &Codebook) -> Result<SymbolFrame> {
    if keywords.len() != mask.ones()
        || keywords
            .positions()
            .any(|p| p == 0 || p > mask.len() || !mask.bits()[p - 1])
    {
        return Err(Error::pre("keyword set is inconsistent with the mask"));
    }
    let mut indices = vec![COMMON_INDEX; mask.len()];
    for (pos, word) in keywords.items() {
        indices[pos - 1] = cb
            .index_of(word)
            .ok_or_else(|| Error::UnknownKeyword(word.clone()))?;
    }
    Ok(SymbolFrame::from_indices(indices, cb.bits_per_symbol()))
}

/// Passes the frame through `y = h x + n`. The output carries no indices.
pub fn transmit(frame: &SymbolFrame, ch: &ChannelConfig) -> Result<SymbolFrame> {
    ch.validate()?;
    let var = ch.noise_variance();
    let h = ch.gain;
    let iq_samples = if var == 0.0 {
        frame
            .iq_samples
            .iter()
            .map(|&(i, q)| (h * i, h * q))
            .collect()
    } else {
        let noise = Normal::new(0.0, (var / 2.0).sqrt())
            .map_err(|e| Error::pre(format!("noise distribution: {e}")))?;
        let mut rng = seed::rng(ch.seed);
        frame
            .iq_samples
            .iter()
            .map(|&(i, q)| {
                (
                    h * i + noise.sample(&mut rng),
                    h * q + noise.sample(&mut rng),
                )
            })
            .collect()
    };
    Ok(SymbolFrame {
        slot_indices: None,
        iq_samples,
        frame_len: frame.frame_len,
        bits_per_symbol: frame.bits_per_symbol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub template: SlotTemplate,
    pub keywords: KeywordSet,
    /// Raw per-slot indices after hard decision.
    pub indices: Vec<u32>,
    /// Slots whose index fell outside the codebook.
    pub erasures: usize,
}

/// Hard-decision bits of a received frame after equalization by `h`.
pub fn detect_bits(received: &SymbolFrame, ch: &ChannelConfig) -> Vec<bool> {
    received
        .iq_samples
        .iter()
        .map(|&(i, _)| i / ch.gain > 0.0)
        .collect()
}

pub fn decode(received: &SymbolFrame, cb: &Codebook, ch: &ChannelConfig) -> Result<Decoded> {
    ch.validate()?;
    let bps = received.bits_per_symbol;
    if received.iq_samples.len() != received.frame_len * bps {
        return Err(Error::pre("frame sample count does not match frame length"));
    }
    let bits = detect_bits(received, ch);
    let indices: Vec<u32> = bits
        .chunks(bps)
        .map(|chunk| chunk.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b)))
        .collect();

    let mut slots = Vec::with_capacity(indices.len());
    let mut items = Vec::new();
    let mut erasures = 0;
    for (pos, &idx) in indices.iter().enumerate() {
        match cb.word(idx) {
            Some(w) => {
                slots.push(Slot::Keyword(w.to_string()));
                items.push((pos + 1, w.to_string()));
            }
            None => {
                if idx > cb.max_index() {
                    erasures += 1;
                }
                slots.push(Slot::Gap);
            }
        }
    }
    Ok(Decoded {
        template: SlotTemplate { slots },
        keywords: KeywordSet::new(items)?,
        indices,
        erasures,
    })
}

/// Gaussian tail probability Q(x).
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Bit error rate of antipodal signalling: Q(sqrt(2 h² · 10^(snr_db/10))).
pub fn ber_theoretical(ch: &ChannelConfig) -> f64 {
    if ch.snr_db == f64::INFINITY {
        return 0.0;
    }
    let snr = ch.gain * ch.gain * 10f64.powf(ch.snr_db / 10.0);
    q_function((2.0 * snr).sqrt())
}

/// Probability that at least one of `bits_per_symbol` bits is flipped.
pub fn ser_theoretical(ch: &ChannelConfig, bits_per_symbol: usize) -> Result<f64> {
    if bits_per_symbol == 0 {
        return Err(Error::pre("bits_per_symbol must be at least 1"));
    }
    let p = ber_theoretical(ch);
    Ok(1.0 - (1.0 - p).powi(bits_per_symbol as i32))
}

/// Monte-Carlo bit error count over `n_bits` uniformly random bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerMeasurement {
    pub bits: u64,
    pub errors: u64,
}

impl BerMeasurement {
    pub fn rate(&self) -> f64 {
        self.errors as f64 / self.bits as f64
    }
}

pub fn measure_ber(ch: &ChannelConfig, n_bits: u64) -> Result<BerMeasurement> {
    ch.validate()?;
    const CHUNK: u64 = 1 << 16;
    let mut bit_rng = seed::rng(seed::derive(ch.seed, &[0xB175]));
    let mut errors = 0;
    let mut done = 0;
    let mut chunk_idx = 0u64;
    while done < n_bits {
        let n = CHUNK.min(n_bits - done) as usize;
        let sent: Vec<bool> = (0..n).map(|_| bit_rng.random()).collect();
        let frame = SymbolFrame::from_indices(sent.iter().map(|&b| u32::from(b)).collect(), 1);
        let rx = transmit(&frame, &ch.with_seed(seed::derive(ch.seed, &[chunk_idx])))?;
        errors += detect_bits(&rx, ch)
            .iter()
            .zip(&sent)
            .filter(|(a, b)| a != b)
            .count() as u64;
        done += n as u64;
        chunk_idx += 1;
    }
    Ok(BerMeasurement {
        bits: n_bits,
        errors,
    })
}
