//! Parity readout in the |±⟩ basis, projection-noise sampling, frequency estimation,
//! the end-to-end Ramsey pipeline and the metrological planner.

mod fit;
mod scaling;

pub use fit::{cramer_rao_sigma, fit_frequency, parity_variance, FrequencyFit};
pub use scaling::{scaling_experiment, scaling_ratio, RatioInterval, ScalingParams, ScalingResult};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve, phase_rate, EvolutionScenario};
use crate::quantum::{Level, StateVector};
use crate::seeds::{derive_seed, stage_rng};
use crate::units::{angular_to_hz, HBAR};

/// Population allowed outside the ground-qubit manifold at readout.
pub const QUBIT_TOL: f64 = 1e-8;

fn bit(l: Level) -> Option<usize> {
    match l {
        Level::S_DOWN => Some(0),
        Level::S_UP => Some(1),
        _ => None,
    }
}

/// ⟨σ_φ ⊗ σ_x⟩ with σ_φ = e^{iφ}|0⟩⟨1| + e^{−iφ}|1⟩⟨0| on ion 1. The readout phase φ is
/// the analysis-pulse phase; φ = α removes the Bell phase α of the prepared state.
pub fn parity_with_phase(s: &StateVector, readout_phase: f64) -> Result<f64> {
    let outside = s.population(|l| bit(l.ion1).is_none() || bit(l.ion2).is_none());
    if outside > QUBIT_TOL {
        return Err(Error::Usage(format!("{outside:.3e} population outside the qubit manifold at readout")));
    }
    let basis = s.basis();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, l) in basis.labels().enumerate() {
        let (Some(b1), Some(b2)) = (bit(l.ion1), bit(l.ion2)) else { continue };
        // Pair each |b1 b2, n⟩ with its doubly flipped partner once (b1 = 1 side).
        if b1 != 1 {
            continue;
        }
        let flip = |b: usize| if b == 0 { Level::S_UP } else { Level::S_DOWN };
        let mut partner = l;
        partner.ion1 = flip(b1);
        partner.ion2 = flip(b2);
        let Some(j) = basis.index_of(&partner) else { continue };
        let (a, b) = (s.amplitudes()[i], s.amplitudes()[j]);
        acc += a.conj() * b;
    }
    Ok(2.0 * (acc * Complex64::from_polar(1.0, -readout_phase)).re)
}

/// ⟨σ_x ⊗ σ_x⟩.
pub fn parity_expectation(s: &StateVector) -> Result<f64> {
    parity_with_phase(s, 0.0)
}

/// Mean of `shots` ±1 parity outcomes with expectation `p`: the product of the two |±⟩
/// results is +1 with probability (1 + p)/2, so the count is binomial.
pub fn sample_parity_mean(p: f64, shots: u64, rng: &mut impl Rng) -> Result<f64> {
    if shots == 0 {
        return Err(Error::Usage("shots must be ≥ 1".into()));
    }
    let q = ((1.0 + p) / 2.0).clamp(0.0, 1.0);
    let k = rng.sample(Binomial::new(shots, q).map_err(|e| Error::Usage(e.to_string()))?) as f64;
    Ok((2.0 * k - shots as f64) / shots as f64)
}

pub fn sample_parity(s: &StateVector, shots: u64, seed: u64, readout_phase: f64) -> Result<f64> {
    let p = parity_with_phase(s, readout_phase)?;
    sample_parity_mean(p, shots, &mut stage_rng(seed, "shots", 0))
}

// ---------------------------------------------------------------------------
// Signal-to-noise planner
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnrPlan {
    /// C·m
    pub eps_pnc: f64,
    /// V/m
    pub e_field: f64,
    /// Preparation and detection efficiency in (0, 1].
    pub efficiency: f64,
    pub n_measurements: f64,
    pub n_ions: f64,
    /// s
    pub tau: f64,
}

impl SnrPlan {
    pub fn validate(&self) -> Result<()> {
        let all = [self.eps_pnc, self.e_field, self.efficiency, self.n_measurements, self.n_ions, self.tau];
        if all.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Config("SNR plan factors must be finite and ≥ 0".into()));
        }
        if self.efficiency > 1.0 {
            return Err(Error::Config(format!("efficiency {} exceeds 1", self.efficiency)));
        }
        Ok(())
    }
}

/// ε^PNC·E′₀·f·√n·N·τ/ħ
pub fn snr_estimate(p: &SnrPlan) -> f64 {
    p.eps_pnc * p.e_field / HBAR * p.efficiency * p.n_measurements.sqrt() * p.n_ions * p.tau
}

/// Number of measurements n reaching `target` SNR with the other factors of `p`.
pub fn measurements_for_snr(target: f64, p: &SnrPlan) -> Result<f64> {
    let per_root_n = p.eps_pnc * p.e_field / HBAR * p.efficiency * p.n_ions * p.tau;
    if !(per_root_n > 0.0) {
        return Err(Error::Config("SNR per measurement is zero; no n reaches the target".into()));
    }
    Ok((target / per_root_n).powi(2))
}

// ---------------------------------------------------------------------------
// Ramsey pipeline
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyResult {
    pub times: Vec<f64>,
    pub parity_estimates: Vec<f64>,
    pub stderr: Vec<f64>,
    pub shots_per_point: u64,
    pub fitted_freq: f64,
    pub fitted_freq_sigma: f64,
    pub contrast: f64,
    pub fitted_phase: f64,
    /// Δλ/2π of the static scenario, Hz.
    pub injected_freq: f64,
    /// Cramér–Rao σ_f at the fitted contrast, Hz.
    pub crb_sigma: f64,
    /// Fraction of simulated trajectories lost to scattering.
    pub lost_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseySettings {
    pub times: Vec<f64>,
    pub shots_per_point: u64,
    /// Noise/loss trajectories per time point; shots are split among them.
    pub trajectories_per_point: u64,
    /// Fidelity of state preparation; failed shots give a random parity.
    pub preparation_fidelity: f64,
    /// Analysis phase applied at readout (usually the Bell phase α).
    pub readout_phase: f64,
    /// Binomial shot sampling; when off, each point is the exact expectation.
    #[serde(default = "yes")]
    pub projection_noise: bool,
    pub seed: u64,
}

fn yes() -> bool {
    true
}

impl RamseySettings {
    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() || self.times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::Config("Ramsey times must be non-empty and > 0".into()));
        }
        if self.shots_per_point == 0 || self.trajectories_per_point == 0 {
            return Err(Error::Config("shots_per_point and trajectories_per_point must be ≥ 1".into()));
        }
        if !(0.0..=1.0).contains(&self.preparation_fidelity) {
            return Err(Error::Config("preparation_fidelity must be in [0, 1]".into()));
        }
        Ok(())
    }
}

struct Point {
    parity: f64,
    lost: u64,
    trajectories: u64,
}

fn simulate_point(
    index: usize,
    s0: &StateVector,
    sc: &EvolutionScenario,
    set: &RamseySettings,
) -> Result<Point> {
    let tau = set.times[index];
    let sc = EvolutionScenario { duration: tau, ..sc.clone() };
    let deterministic = sc.noise.is_quiet() && sc.loss.is_zero();
    let k = if deterministic { 1 } else { set.trajectories_per_point.min(set.shots_per_point) };
    let tag = format!("ramsey.point.{index}");
    let mut shots_rng = stage_rng(set.seed, &format!("{tag}.shots"), 0);
    let (mut plus_total, mut lost) = (0.0, 0);
    for traj in 0..k {
        let shots = set.shots_per_point / k + u64::from(traj < set.shots_per_point % k);
        let out = evolve(s0, &sc, derive_seed(set.seed, &tag, traj))?;
        let p = if out.lost {
            lost += 1;
            0.0
        } else {
            parity_with_phase(&out.state, set.readout_phase)?
        };
        let p = set.preparation_fidelity * p;
        let mean = if set.projection_noise { sample_parity_mean(p, shots, &mut shots_rng)? } else { p };
        plus_total += mean * shots as f64;
    }
    Ok(Point { parity: plus_total / set.shots_per_point as f64, lost, trajectories: k })
}

fn map_points<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Evolves the prepared state to each time point, samples the parity and fits the
/// oscillation frequency. Results do not depend on the worker count.
pub fn run_ramsey(s0: &StateVector, sc: &EvolutionScenario, set: &RamseySettings) -> Result<RamseyResult> {
    set.validate()?;
    let points = map_points(set.times.len(), |i| simulate_point(i, s0, sc, set))?;
    let parity_estimates: Vec<f64> = points.iter().map(|p| p.parity).collect();
    let stderr = parity_estimates.iter().map(|&p| parity_variance(p, set.shots_per_point).sqrt()).collect();
    let fit = fit_frequency(&set.times, &parity_estimates, set.shots_per_point)?;
    let contrast = fit.amplitude.min(1.0);
    let traj: u64 = points.iter().map(|p| p.trajectories).sum();
    let lost: u64 = points.iter().map(|p| p.lost).sum();
    Ok(RamseyResult {
        times: set.times.clone(),
        parity_estimates,
        stderr,
        shots_per_point: set.shots_per_point,
        fitted_freq: fit.freq,
        fitted_freq_sigma: fit.sigma,
        contrast,
        fitted_phase: fit.phase,
        injected_freq: angular_to_hz(phase_rate(sc)),
        crb_sigma: cramer_rao_sigma(&set.times, set.shots_per_point, contrast, fit.freq, fit.phase),
        lost_fraction: lost as f64 / traj as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{tensor_basis, BasisLabel, Term};
    use crate::half::Half;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn qubit_state(c10: Complex64, c01: Complex64) -> StateVector {
        let b = tensor_basis(&[Level::S_DOWN, Level::S_UP], &[Level::S_DOWN, Level::S_UP], 0).unwrap();
        StateVector::superposition(
            b,
            &[
                (BasisLabel::new(Level::S_UP, Level::S_DOWN, 0), c10),
                (BasisLabel::new(Level::S_DOWN, Level::S_UP, 0), c01),
            ],
        )
        .unwrap()
    }

    fn bell(phase: f64) -> StateVector {
        qubit_state(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::from_polar(FRAC_1_SQRT_2, phase))
    }

    #[test]
    fn parity_of_phased_bell_states() {
        assert!((parity_expectation(&bell(0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((parity_expectation(&bell(PI)).unwrap() + 1.0).abs() < 1e-15);
        assert!(parity_expectation(&bell(PI / 2.0)).unwrap().abs() < 1e-15);
        for phi in [0.1, 1.7, -2.9] {
            assert!((parity_expectation(&bell(phi)).unwrap() - phi.cos()).abs() < 1e-12);
            assert!((parity_with_phase(&bell(phi), phi).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_of_even_states() {
        // (|00⟩ + |11⟩)/√2 is also a +1 eigenstate of σx⊗σx.
        let b = tensor_basis(&[Level::S_DOWN, Level::S_UP], &[Level::S_DOWN, Level::S_UP], 0).unwrap();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let s = StateVector::superposition(
            b,
            &[(BasisLabel::new(Level::S_UP, Level::S_UP, 0), h), (BasisLabel::new(Level::S_DOWN, Level::S_DOWN, 0), h)],
        )
        .unwrap();
        assert!((parity_expectation(&s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn leakage_rejected() {
        let aux = Level::new(Term::D52, Half(1));
        let b = tensor_basis(&[Level::S_DOWN, aux], &[Level::S_UP], 0).unwrap();
        let s = StateVector::basis_state(b, &BasisLabel::new(aux, Level::S_UP, 0)).unwrap();
        assert!(matches!(parity_expectation(&s), Err(Error::Usage(_))));
    }

    #[test]
    fn sampling_limits() {
        assert_eq!(sample_parity(&bell(0.0), 500, 1, 0.0).unwrap(), 1.0);
        assert_eq!(sample_parity(&bell(0.3), 500, 9, 0.0).unwrap(), sample_parity(&bell(0.3), 500, 9, 0.0).unwrap());
        assert!(sample_parity(&bell(0.0), 0, 1, 0.0).is_err());
    }

    /// Binomial oracle: at p = 0 the mean of n shots has σ = 1/√n.
    #[test]
    fn zero_parity_spread() {
        let n = 400u64;
        let means: Vec<f64> = (0..2000)
            .map(|s| sample_parity_mean(0.0, n, &mut stage_rng(s, "t", 0)).unwrap())
            .collect();
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let sd = (means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64).sqrt();
        assert!(m.abs() < 4.0 * 0.05 / (2000f64).sqrt());
        assert!((sd * (n as f64).sqrt() - 1.0).abs() < 0.07, "{sd}");
    }

    /// Unbiased: over 1e4 seeds the mean estimate is within 4 standard errors of p.
    #[test]
    fn sampling_unbiased() {
        let p = parity_expectation(&bell(1.1)).unwrap();
        let n = 10_000;
        let means: Vec<f64> = (0..n).map(|s| sample_parity(&bell(1.1), 50, s, 0.0).unwrap()).collect();
        let m = means.iter().sum::<f64>() / n as f64;
        let se = ((1.0 - p * p) / 50.0 / n as f64).sqrt();
        assert!((m - p).abs() < 4.0 * se);
    }

    fn plan(n_ions: f64, n: f64) -> SnrPlan {
        SnrPlan {
            eps_pnc: 2.17e-11 * crate::units::EA0,
            e_field: 2e6,
            efficiency: 0.95,
            n_measurements: n,
            n_ions,
            tau: 1.0,
        }
    }

    #[test]
    fn snr_figure_of_merit() {
        assert_eq!(snr_estimate(&plan(2.0, 100.0)) / snr_estimate(&plan(1.0, 100.0)), 2.0);
        let n1 = measurements_for_snr(10.0, &plan(1.0, 1.0)).unwrap();
        let n2 = measurements_for_snr(10.0, &plan(2.0, 1.0)).unwrap();
        assert_eq!(n2 / n1, 0.25);
        assert_eq!(snr_estimate(&SnrPlan { efficiency: 0.0, ..plan(2.0, 100.0) }), 0.0);
        let base = snr_estimate(&plan(1.0, 100.0));
        assert!((snr_estimate(&plan(1.0, 400.0)) / base - 2.0).abs() < 1e-15);
        let hand = 2.17e-11 * crate::units::EA0 * 2e6 / HBAR * 0.95 * 10.0;
        assert!((base / hand - 1.0).abs() < 1e-15);
    }
}
