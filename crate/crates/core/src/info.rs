//! Discrete information measures (natural logarithms throughout) and the
//! semantic distortion loss with its cross-entropy bound.
//!
//! For distributions `p_x`, `p_λ`, `p_μ` on a shared finite support and a
//! channel joint with mutual information `I`:
//!
//! ```text
//! L1 = -Σ p_x log p_λ        L2 = -Σ p_λ log p_μ
//! L  = L1 + L2 - γ I         B  = -Σ p_x log p_μ - γ I
//! ```
//!
//! Expanding the sums gives the exact identity
//! `B - L = -(H(p_λ) + Σ (p_λ - p_x) log(p_λ / p_μ))`, which is what
//! [`BoundReport`] records. The sign of `B - L` is therefore not fixed: it is
//! reported, never assumed.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed;

const MASS_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_GAMMA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

fn check_mass(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty support".into()));
    }
    if let Some(bad) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidDistribution(format!(
            "entry {bad} is not a probability"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("total mass {total}")));
    }
    Ok(())
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_mass(&probs)?;
        Ok(Self { probs })
    }

    /// Scales non-negative weights to unit mass.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidDistribution(
                "weights must be non-negative with positive sum".into(),
            ));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(&vec![1.0; n])
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::pre("point mass outside the support"));
        }
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Self::new(probs)
    }

    /// Flat Dirichlet draw: normalized i.i.d. unit exponentials.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        Self::from_weights(&w).expect("exponential draws are positive")
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Row-major joint distribution of two finite variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != rows * cols {
            return Err(Error::InvalidDistribution(format!(
                "{} entries for a {rows}x{cols} joint",
                probs.len()
            )));
        }
        check_mass(&probs)?;
        Ok(Self { rows, cols, probs })
    }

    pub fn product(row: &DiscreteDistribution, col: &DiscreteDistribution) -> Self {
        let probs = row
            .probs
            .iter()
            .flat_map(|r| col.probs.iter().map(move |c| r * c))
            .collect();
        Self {
            rows: row.len(),
            cols: col.len(),
            probs,
        }
    }

    pub fn random<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let flat = DiscreteDistribution::random(rows * cols, rng);
        Self {
            rows,
            cols,
            probs: flat.probs,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.probs[r * self.cols + c]
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.probs[r * self.cols..(r + 1) * self.cols].iter().sum())
            .collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c)).sum())
            .collect()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

fn plogp_sum(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

pub fn entropy(p: &DiscreteDistribution) -> f64 {
    plogp_sum(&p.probs)
}

fn same_support(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch(p.len(), q.len()));
    }
    Ok(())
}

pub fn kl_divergence(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_support(p, q)?;
    let mut d = 0.0;
    for (i, (&pi, &qi)) in p.probs.iter().zip(&q.probs).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::AbsoluteContinuityViolation(i));
            }
            d += pi * (pi / qi).ln();
        }
    }
    Ok(d)
}

/// `-Σ p log q` over the shared support; terms with `p = 0` vanish.
pub fn cross_entropy(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_support(p, q)?;
    let mut h = 0.0;
    for (i, (&pi, &qi)) in p.probs.iter().zip(&q.probs).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::AbsoluteContinuityViolation(i));
            }
            h -= pi * qi.ln();
        }
    }
    Ok(h)
}

/// End-to-end loss between the source and the receiver's generator.
pub fn cross_entropy_loss(p_x: &DiscreteDistribution, p_mu: &DiscreteDistribution) -> Result<f64> {
    cross_entropy(p_x, p_mu)
}

/// Transmitter-side generation loss.
pub fn loss_l1(p_x: &DiscreteDistribution, p_lambda: &DiscreteDistribution) -> Result<f64> {
    cross_entropy(p_x, p_lambda)
}

/// Receiver-side generation loss.
pub fn loss_l2(p_lambda: &DiscreteDistribution, p_mu: &DiscreteDistribution) -> Result<f64> {
    cross_entropy(p_lambda, p_mu)
}

/// Exact plug-in mutual information of a finite joint.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let rows = j.row_marginal();
    let cols = j.col_marginal();
    let mut mi = 0.0;
    for r in 0..j.rows {
        for c in 0..j.cols {
            let p = j.get(r, c);
            if p > 0.0 {
                mi += p * (p / (rows[r] * cols[c])).ln();
            }
        }
    }
    mi.max(0.0)
}

/// H(X) + H(Y) - H(X, Y); an independent route to the same quantity.
pub fn mutual_information_by_entropies(j: &JointDistribution) -> f64 {
    plogp_sum(&j.row_marginal()) + plogp_sum(&j.col_marginal()) - plogp_sum(&j.probs)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeGamma(gamma))
    }
}

/// `L = L1 + L2 - γ I`.
pub fn overall_distortion(l1: f64, l2: f64, mi: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(l1 + l2 - gamma * mi)
}

/// `B = L_CE - γ I`.
pub fn bound_b(ce: f64, mi: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(ce - gamma * mi)
}

/// `Σ (p_λ - p_x) log(p_λ / p_μ)`, the part of `L - B` beyond `H(p_λ)`.
pub fn delta_residual(
    p_x: &DiscreteDistribution,
    p_lambda: &DiscreteDistribution,
    p_mu: &DiscreteDistribution,
) -> Result<f64> {
    same_support(p_x, p_lambda)?;
    same_support(p_lambda, p_mu)?;
    let mut r = 0.0;
    for i in 0..p_x.len() {
        let coef = p_lambda.probs[i] - p_x.probs[i];
        if coef == 0.0 {
            continue;
        }
        let (l, m) = (p_lambda.probs[i], p_mu.probs[i]);
        if l <= 0.0 || m <= 0.0 {
            return Err(Error::AbsoluteContinuityViolation(i));
        }
        r += coef * (l / m).ln();
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub trial: usize,
    pub l1: f64,
    pub l2: f64,
    pub mi: f64,
    pub l: f64,
    pub ce: f64,
    pub h_lambda: f64,
    pub b: f64,
    pub gap: f64,
    pub delta_residual: f64,
    #[serde(skip)]
    pub gamma: f64,
}

impl BoundReport {
    /// `gap + H(p_λ) + residual`, zero up to rounding.
    pub fn identity_error(&self) -> f64 {
        self.gap + self.h_lambda + self.delta_residual
    }
}

pub fn bound_report(
    p_x: &DiscreteDistribution,
    p_lambda: &DiscreteDistribution,
    p_mu: &DiscreteDistribution,
    joint: &JointDistribution,
    gamma: f64,
) -> Result<BoundReport> {
    let l1 = loss_l1(p_x, p_lambda)?;
    let l2 = loss_l2(p_lambda, p_mu)?;
    let ce = cross_entropy_loss(p_x, p_mu)?;
    let mi = mutual_information(joint);
    let l = overall_distortion(l1, l2, mi, gamma)?;
    let b = bound_b(ce, mi, gamma)?;
    Ok(BoundReport {
        trial: 0,
        l1,
        l2,
        mi,
        l,
        ce,
        h_lambda: entropy(p_lambda),
        b,
        gap: b - l,
        delta_residual: delta_residual(p_x, p_lambda, p_mu)?,
        gamma,
    })
}

/// Counts of the sign of `B - L` across trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GapSigns {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl GapSigns {
    pub fn tally(reports: &[BoundReport], tol: f64) -> Self {
        let mut s = Self::default();
        for r in reports {
            if r.gap.abs() <= tol {
                s.zero += 1;
            } else if r.gap < 0.0 {
                s.negative += 1;
            } else {
                s.positive += 1;
            }
        }
        s
    }
}

/// Draws random `(p_x, p_λ, p_μ)` and a random joint per trial and reports
/// every loss term. Trial `t` uses seed `derive(seed, [t])`.
pub fn verify_bound(
    trials: usize,
    support_size: usize,
    gamma: f64,
    seed: u64,
) -> Result<Vec<BoundReport>> {
    if trials == 0 {
        return Err(Error::pre("trials must be at least 1"));
    }
    if support_size < 2 {
        return Err(Error::pre("support size must be at least 2"));
    }
    check_gamma(gamma)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed::derive(seed, &[t as u64]));
            let p_x = DiscreteDistribution::random(support_size, &mut rng);
            let p_lambda = DiscreteDistribution::random(support_size, &mut rng);
            let p_mu = DiscreteDistribution::random(support_size, &mut rng);
            let joint = JointDistribution::random(support_size, support_size, &mut rng);
            let mut r = bound_report(&p_x, &p_lambda, &p_mu, &joint, gamma)?;
            r.trial = t;
            Ok(r)
        })
        .collect()
}

/// Joint of transmitted and hard-decided symbol indices when every bit of a
/// `bits`-bit index is flipped independently with probability `ber`.
pub fn symbol_channel_joint(
    prior: &DiscreteDistribution,
    bits: usize,
    ber: f64,
) -> Result<JointDistribution> {
    let n = 1usize << bits;
    if prior.len() > n {
        return Err(Error::pre("prior has more symbols than the index space"));
    }
    if !(0.0..=1.0).contains(&ber) {
        return Err(Error::pre("bit error rate must lie in [0, 1]"));
    }
    let mut probs = vec![0.0; n * n];
    for (i, &pi) in prior.probs.iter().enumerate() {
        for j in 0..n {
            let d = (i ^ j).count_ones() as i32;
            probs[i * n + j] = pi * ber.powi(d) * (1.0 - ber).powi(bits as i32 - d);
        }
    }
    Ok(JointDistribution {
        rows: n,
        cols: n,
        probs,
    })
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}
