use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::{fit_frequency, map_points, sample_parity_mean};
use crate::error::{Error, Result};
use crate::seeds::stage_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    /// Per-ion oscillation frequency Δλ/2π, Hz.
    pub freq: f64,
    pub times: Vec<f64>,
    /// Shots per time point per experiment.
    pub shots: u64,
    pub repetitions: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub n_ions: usize,
    pub correlated: bool,
    /// Per-repetition estimate of the single-ion frequency, Hz.
    pub estimates: Vec<f64>,
    pub mean: f64,
    /// Monte-Carlo standard deviation of the estimates, Hz.
    pub uncertainty: f64,
    /// Mean fit-reported σ, Hz.
    pub mean_fit_sigma: f64,
}

fn one_signal(freq: f64, p: &ScalingParams, tag: &str, index: u64) -> Result<(f64, f64)> {
    let mut rng = stage_rng(p.seed, tag, index);
    let ys = p
        .times
        .iter()
        .map(|&t| sample_parity_mean((TAU * freq * t).cos(), p.shots, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_frequency(&p.times, &ys, p.shots)?;
    Ok((fit.freq, fit.sigma))
}

/// Monte-Carlo frequency uncertainty with N ions. Correlated: one parity signal at N·Δλ
/// (each shot uses all N ions). Uncorrelated: N independent single-ion signals at Δλ,
/// averaged. Both use N·shots ion-measurements per point.
pub fn scaling_experiment(n_ions: usize, correlated: bool, p: &ScalingParams) -> Result<ScalingResult> {
    if !(1..=2).contains(&n_ions) {
        return Err(Error::Config(format!("scaling supports N ∈ {{1, 2}}, got {n_ions}")));
    }
    if p.repetitions < 2 {
        return Err(Error::Config("scaling needs at least 2 repetitions".into()));
    }
    let n = n_ions as f64;
    let tag = match (n_ions, correlated) {
        (1, _) => "scaling.single",
        (_, true) => "scaling.correlated",
        (_, false) => "scaling.uncorrelated",
    };
    let per_rep = map_points(p.repetitions, |r| -> Result<(f64, f64)> {
        let r = r as u64;
        if correlated {
            let (f, s) = one_signal(n * p.freq, p, tag, r * 2)?;
            Ok((f / n, s / n))
        } else {
            let mut fs = 0.0;
            let mut var = 0.0;
            for k in 0..n_ions as u64 {
                let (f, s) = one_signal(p.freq, p, tag, r * 2 + k)?;
                fs += f;
                var += s * s;
            }
            Ok((fs / n, var.sqrt() / n))
        }
    })?;
    let estimates: Vec<f64> = per_rep.iter().map(|x| x.0).collect();
    let m = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / m;
    let uncertainty = (estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let mean_fit_sigma = per_rep.iter().map(|x| x.1).sum::<f64>() / m;
    Ok(ScalingResult { n_ions, correlated, estimates, mean, uncertainty, mean_fit_sigma })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioInterval {
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
}

impl RatioInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// σ_a/σ_b with its F-distribution confidence interval for independent Gaussian samples.
pub fn scaling_ratio(a: &ScalingResult, b: &ScalingResult, confidence: f64) -> Result<RatioInterval> {
    let da = a.estimates.len() as f64 - 1.0;
    let db = b.estimates.len() as f64 - 1.0;
    let f = FisherSnedecor::new(da, db).map_err(|e| Error::Config(e.to_string()))?;
    let tail = (1.0 - confidence) / 2.0;
    let ratio = a.uncertainty / b.uncertainty;
    Ok(RatioInterval {
        ratio,
        lower: ratio / f.inverse_cdf(1.0 - tail).sqrt(),
        upper: ratio / f.inverse_cdf(tail).sqrt(),
        confidence,
    })
}
