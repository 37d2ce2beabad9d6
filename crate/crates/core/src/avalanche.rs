//! Townsend avalanche as a pure birth (Yule) process across a gap.
//!
//! Every electron drifts toward the anode and ionizes after an exponential
//! free path of mean `1/α`; an ionization leaves two electrons at that point.
//! There is no attachment, recombination, photon feedback or space charge,
//! so a single seed produces a geometric (Furry) gain distribution with mean
//! `exp(α·d)`.
//!
//! Each trial draws from its own ChaCha8 stream selected by `(seed, trial)`,
//! which makes results independent of how trials are scheduled on threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `α·d` accepted; beyond this the expected gain (~5e21) is unphysical
/// for a model without space-charge saturation.
pub const MAX_ALPHA_GAP: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvalancheParams {
    /// Ionizations per unit length.
    pub townsend_alpha: f64,
    pub gap: f64,
    /// Seed electrons released at the cathode.
    pub n_initial: u64,
    pub trials: u64,
    pub rng_seed: u64,
    /// Arrivals needed for a trial to count as a trigger.
    pub threshold: u64,
    pub bin_width: u64,
}

impl AvalancheParams {
    pub fn new(townsend_alpha: f64, gap: f64, n_initial: u64, trials: u64, rng_seed: u64) -> Self {
        AvalancheParams {
            townsend_alpha,
            gap,
            n_initial,
            trials,
            rng_seed,
            threshold: 1,
            bin_width: 1,
        }
    }

    pub fn alpha_gap(&self) -> f64 {
        self.townsend_alpha * self.gap
    }

    /// Expected arrivals, `n_initial·exp(α·d)`.
    pub fn analytic_mean(&self) -> f64 {
        self.n_initial as f64 * self.alpha_gap().exp()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.townsend_alpha.is_finite() && self.townsend_alpha >= 0.0) {
            return Err(Error::config("townsend_alpha", "must be finite and non-negative"));
        }
        if !(self.gap.is_finite() && self.gap > 0.0) {
            return Err(Error::config("gap", "must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "need at least one trial"));
        }
        if self.threshold == 0 {
            return Err(Error::config("threshold", "must be at least 1"));
        }
        if self.bin_width == 0 {
            return Err(Error::config("bin_width", "must be at least 1"));
        }
        if self.alpha_gap() > MAX_ALPHA_GAP {
            return Err(Error::config(
                "townsend_alpha",
                format!(
                    "alpha*d = {} exceeds {MAX_ALPHA_GAP}; the expected gain overflows the model",
                    self.alpha_gap()
                ),
            ));
        }
        Ok(())
    }
}

/// Generator for one trial: stream `trial` of the ChaCha8 key derived from `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trial(params: &AvalancheParams, trial: u64) -> u64 {
    if params.townsend_alpha == 0.0 {
        return params.n_initial;
    }
    let mut rng = trial_rng(params.rng_seed, trial);
    let free_path = Exp::new(params.townsend_alpha).expect("alpha validated positive");
    let mut pending: Vec<f64> = vec![0.0; params.n_initial as usize];
    let mut arrived = 0u64;
    while let Some(x) = pending.pop() {
        let next = x + free_path.sample(&mut rng);
        if next < params.gap {
            pending.push(next);
            pending.push(next);
        } else {
            arrived += 1;
        }
    }
    arrived
}

/// Arrivals at the anode for every trial, in trial order.
pub fn simulate_counts(params: &AvalancheParams) -> Result<Vec<u64>> {
    params.validate()?;
    #[cfg(feature = "parallel")]
    let counts = (0..params.trials)
        .into_par_iter()
        .map(|t| run_trial(params, t))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let counts = (0..params.trials).map(|t| run_trial(params, t)).collect();
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Smallest arrival count in the bin.
    pub start: u64,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvalancheStats {
    pub trials: u64,
    pub mean_gain: f64,
    /// Unbiased sample variance (0 for a single trial).
    pub variance_gain: f64,
    pub bin_width: u64,
    /// Non-empty bins in ascending order.
    pub histogram: Vec<HistogramBin>,
    pub trigger_threshold: Option<u64>,
    pub trigger_fraction: Option<f64>,
    pub analytic_mean: Option<f64>,
}

/// Two-pass mean and sample variance plus a histogram of `counts`.
pub fn gain_statistics(counts: &[u64], bin_width: u64) -> Result<AvalancheStats> {
    if counts.is_empty() {
        return Err(Error::config("counts", "no trials to summarize"));
    }
    if bin_width == 0 {
        return Err(Error::config("bin_width", "must be at least 1"));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let variance = if counts.len() > 1 {
        counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let mut bins = std::collections::BTreeMap::new();
    for &c in counts {
        *bins.entry(c / bin_width * bin_width).or_insert(0u64) += 1;
    }
    Ok(AvalancheStats {
        trials: counts.len() as u64,
        mean_gain: mean,
        variance_gain: variance,
        bin_width,
        histogram: bins
            .into_iter()
            .map(|(start, frequency)| HistogramBin { start, frequency })
            .collect(),
        trigger_threshold: None,
        trigger_fraction: None,
        analytic_mean: None,
    })
}

fn fraction_at_least(counts: &[u64], threshold: u64) -> f64 {
    counts.iter().filter(|&&c| c >= threshold).count() as f64 / counts.len() as f64
}

pub fn simulate_avalanche(params: &AvalancheParams) -> Result<AvalancheStats> {
    let counts = simulate_counts(params)?;
    let mut stats = gain_statistics(&counts, params.bin_width)?;
    stats.trigger_threshold = Some(params.threshold);
    stats.trigger_fraction = Some(fraction_at_least(&counts, params.threshold));
    stats.analytic_mean = Some(params.analytic_mean());
    Ok(stats)
}

/// Fraction of trials delivering at least `threshold` electrons.
pub fn trigger_probability(params: &AvalancheParams, threshold: u64) -> Result<f64> {
    if threshold == 0 {
        return Err(Error::config("threshold", "must be at least 1"));
    }
    let counts = simulate_counts(params)?;
    Ok(fraction_at_least(&counts, threshold))
}

/// Furry law for one seed: `P(n) = (1/m)(1 − 1/m)^(n−1)`, `n ≥ 1`.
pub fn geometric_pmf(n: u64, mean: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = 1.0 / mean;
    p * (1.0 - p).powf((n - 1) as f64)
}

/// `P(n ≥ threshold) = (1 − 1/m)^(threshold − 1)` for one seed.
pub fn geometric_tail(threshold: u64, mean: f64) -> f64 {
    if threshold <= 1 {
        return 1.0;
    }
    (1.0 - 1.0 / mean).powf((threshold - 1) as f64)
}

/// Uniform draw from the stream of `(seed, trial)`; handy for reproducibility checks.
pub fn first_uniform(seed: u64, trial: u64) -> f64 {
    trial_rng(seed, trial).gen()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_ionization_returns_seeds() {
        let s = simulate_avalanche(&AvalancheParams::new(0.0, 1.0, 7, 500, 1)).unwrap();
        assert_eq!(s.mean_gain, 7.0);
        assert_eq!(s.variance_gain, 0.0);
        assert_eq!(s.histogram, vec![HistogramBin { start: 7, frequency: 500 }]);
    }

    #[test]
    fn empty_cascade() {
        let p = AvalancheParams::new(2.0, 1.5, 0, 300, 1);
        let s = simulate_avalanche(&p).unwrap();
        assert_eq!(s.mean_gain, 0.0);
        assert_eq!(trigger_probability(&p, 1).unwrap(), 0.0);
    }

    #[test]
    fn threshold_one_always_triggers() {
        let p = AvalancheParams::new(1.0, 2.0, 1, 2000, 3);
        assert_eq!(trigger_probability(&p, 1).unwrap(), 1.0);
    }

    #[test]
    fn validation() {
        assert!(AvalancheParams::new(-1.0, 1.0, 1, 1, 0).validate().is_err());
        assert!(AvalancheParams::new(1.0, 0.0, 1, 1, 0).validate().is_err());
        assert!(AvalancheParams::new(1.0, 1.0, 1, 0, 0).validate().is_err());
        assert!(matches!(
            AvalancheParams::new(51.0, 1.0, 1, 1, 0).validate(),
            Err(Error::Config { ref field, .. }) if field == "townsend_alpha"
        ));
        assert!(AvalancheParams::new(50.0, 1.0, 1, 1, 0).validate().is_ok());
        assert!(trigger_probability(&AvalancheParams::new(1.0, 1.0, 1, 10, 0), 0).is_err());
    }

    #[test]
    fn stats_of_fixed_counts() {
        let s = gain_statistics(&[5, 5, 5], 1).unwrap();
        assert_eq!((s.mean_gain, s.variance_gain), (5.0, 0.0));
        let s = gain_statistics(&[1, 3], 1).unwrap();
        assert_eq!((s.mean_gain, s.variance_gain), (2.0, 2.0));
        assert!(gain_statistics(&[], 1).is_err());
    }

    #[test]
    fn histogram_bins() {
        let s = gain_statistics(&[1, 2, 3, 9, 10, 11, 30], 10).unwrap();
        let bins: Vec<(u64, u64)> = s.histogram.iter().map(|b| (b.start, b.frequency)).collect();
        assert_eq!(bins, vec![(0, 4), (10, 2), (30, 1)]);
        assert_eq!(s.histogram.iter().map(|b| b.frequency).sum::<u64>(), 7);
    }

    #[test]
    fn reproducible_streams() {
        let p = AvalancheParams::new(1.2, 2.0, 2, 400, 99);
        assert_eq!(simulate_counts(&p).unwrap(), simulate_counts(&p).unwrap());
        assert_ne!(first_uniform(99, 0), first_uniform(99, 1));
        assert_ne!(first_uniform(99, 0), first_uniform(98, 0));
    }

    #[test]
    fn analytic_helpers() {
        let m = 20.0;
        let total: f64 = (1..5000).map(|n| geometric_pmf(n, m)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(geometric_tail(1, m), 1.0);
        let tail: f64 = (20..5000).map(|n| geometric_pmf(n, m)).sum();
        assert!((tail - geometric_tail(20, m)).abs() < 1e-12);
    }
}
