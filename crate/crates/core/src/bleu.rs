//! Sentence-level BLEU without smoothing.
//!
//! Orders for which the candidate has no n-grams at all are dropped from the
//! weighted sum and the remaining weights renormalized; the dropped orders
//! are listed in [`BleuBreakdown::excluded_orders`]. If every weighted order
//! is dropped the score is 0.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BleuMode {
    /// Weighted geometric mean over orders `1..=max_order`.
    Cumulative,
    /// Weight 1 on a single order.
    SingleN(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuConfig {
    pub max_order: usize,
    pub weights: Vec<f64>,
    pub mode: BleuMode,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self::uniform(4)
    }
}

impl BleuConfig {
    /// Cumulative BLEU with uniform weights up to `max_order`.
    pub fn uniform(max_order: usize) -> Self {
        Self {
            max_order,
            weights: vec![1.0 / max_order as f64; max_order],
            mode: BleuMode::Cumulative,
        }
    }

    pub fn cumulative(weights: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            max_order: weights.len(),
            weights,
            mode: BleuMode::Cumulative,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn single(n: usize) -> Self {
        Self {
            max_order: n,
            weights: (1..=n).map(|k| if k == n { 1.0 } else { 0.0 }).collect(),
            mode: BleuMode::SingleN(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_order == 0 {
            return Err(Error::pre("BLEU max order must be at least 1"));
        }
        if let BleuMode::SingleN(0) = self.mode {
            return Err(Error::pre("BLEU order must be at least 1"));
        }
        if self.mode == BleuMode::Cumulative {
            if self.weights.len() != self.max_order {
                return Err(Error::pre("one BLEU weight per order is required"));
            }
            if self.weights.iter().any(|&w| !(w >= 0.0)) {
                return Err(Error::pre("BLEU weights must be non-negative"));
            }
            let sum: f64 = self.weights.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::pre(format!("BLEU weights sum to {sum}, not 1")));
            }
        }
        Ok(())
    }

    fn weighted_orders(&self) -> Vec<(usize, f64)> {
        match self.mode {
            BleuMode::Cumulative => self
                .weights
                .iter()
                .enumerate()
                .map(|(i, &w)| (i + 1, w))
                .collect(),
            BleuMode::SingleN(n) => vec![(n, 1.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuBreakdown {
    pub score: f64,
    pub bp: f64,
    /// `precisions[k]` is p_{k+1}; `None` when the candidate has no such n-grams.
    pub precisions: Vec<Option<f64>>,
    pub len_c: usize,
    pub len_r: usize,
    pub excluded_orders: Vec<usize>,
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u32> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram matches over candidate n-grams; `None` if |c| < n.
pub fn modified_precision(candidate: &Sentence, reference: &Sentence, n: usize) -> Option<f64> {
    let (c, r) = (candidate.tokens(), reference.tokens());
    if n == 0 || c.len() < n {
        return None;
    }
    let ref_counts = ngram_counts(r, n);
    let clipped: u32 = ngram_counts(c, n)
        .into_iter()
        .map(|(g, k)| k.min(ref_counts.get(g).copied().unwrap_or(0)))
        .sum();
    Some(f64::from(clipped) / (c.len() - n + 1) as f64)
}

pub fn brevity_penalty(len_c: usize, len_r: usize) -> f64 {
    if len_c > len_r {
        1.0
    } else {
        (1.0 - len_r as f64 / len_c as f64).exp()
    }
}

pub fn bleu(candidate: &Sentence, reference: &Sentence, cfg: &BleuConfig) -> BleuBreakdown {
    let (len_c, len_r) = (candidate.len(), reference.len());
    let bp = brevity_penalty(len_c, len_r);
    let top = match cfg.mode {
        BleuMode::Cumulative => cfg.max_order,
        BleuMode::SingleN(n) => n,
    };
    let precisions: Vec<Option<f64>> = (1..=top)
        .map(|n| modified_precision(candidate, reference, n))
        .collect();

    let mut excluded_orders = Vec::new();
    let mut defined = Vec::new();
    for (n, w) in cfg.weighted_orders() {
        match precisions[n - 1] {
            Some(p) if w > 0.0 => defined.push((p, w)),
            Some(_) => {}
            None => excluded_orders.push(n),
        }
    }
    let total_weight: f64 = defined.iter().map(|&(_, w)| w).sum();
    let score =
        if defined.is_empty() || total_weight <= 0.0 || defined.iter().any(|&(p, _)| p == 0.0) {
            0.0
        } else {
            let log_mean: f64 = defined
                .iter()
                .map(|&(p, w)| w / total_weight * p.ln())
                .sum();
            (bp * log_mean.exp()).clamp(0.0, 1.0)
        };
    BleuBreakdown {
        score,
        bp,
        precisions,
        len_c,
        len_r,
        excluded_orders,
    }
}

/// Convenience: single-order scores for n = 1..=4.
pub fn bleu_1_to_4(candidate: &Sentence, reference: &Sentence) -> [f64; 4] {
    std::array::from_fn(|i| bleu(candidate, reference, &BleuConfig::single(i + 1)).score)
}
