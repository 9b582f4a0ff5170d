//! Magnetic-field noise processes, off-resonant scattering loss through the 6P levels,
//! and the jump/no-jump trajectory step that turns loss rates into lost shots.

mod loss;
mod process;

pub use loss::{
    laser_frequency, loss_rate, total_loss_channel, Branches, LossChannel, LossEntry, LossOptions,
    DEFAULT_RESONANCE_GUARD,
};
pub use process::{
    sample_b_trajectory, sample_b_trajectory_indexed, step_count, BTrajectory, NoiseModel, ProcessKind,
    ProcessSpec,
};

use rand::Rng;

use crate::error::{Error, Result};
use crate::quantum::{IonIndex, StateVector};

/// Largest Σ rates·dt accepted by `decohere_step`.
pub const MAX_STEP_PROBABILITY: f64 = 0.1;

/// One quantum-trajectory step. A jump (probability Σ_k |a_k|²Γ_k·dt, Γ_k summed over both
/// ions' levels) means a photon was scattered and the shot is lost; otherwise the
/// amplitudes decay by e^{−Γ_k dt/2} and are renormalized.
pub fn decohere_step(s: &StateVector, ch: &LossChannel, dt: f64, rng: &mut impl Rng) -> Result<(StateVector, bool)> {
    if ch.sum() * dt >= MAX_STEP_PROBABILITY {
        return Err(Error::Config(format!(
            "loss step too coarse: Σ rates·dt = {} ≥ {MAX_STEP_PROBABILITY}",
            ch.sum() * dt
        )));
    }
    if ch.is_zero() {
        return Ok((s.clone(), false));
    }
    let basis = s.basis().clone();
    let rates: Vec<f64> = basis
        .labels()
        .map(|l| ch.rate_for(IonIndex::One, &l.ion1) + ch.rate_for(IonIndex::Two, &l.ion2))
        .collect();
    let p: f64 = s.amplitudes().iter().zip(&rates).map(|(a, r)| a.norm_sqr() * r * dt).sum();
    if rng.random::<f64>() < p {
        return Ok((s.clone(), true));
    }
    let mut k = 0;
    let decayed = s.map_labels(|_| {
        let f = (-rates[k] * dt / 2.0).exp();
        k += 1;
        num_complex::Complex64::new(f, 0.0)
    });
    Ok((decayed.normalized()?, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::half::Half;
    use crate::quantum::{tensor_basis, BasisLabel, Level, Term};
    use crate::seeds::stage_rng;
    use num_complex::Complex64;

    fn bell() -> StateVector {
        let b = tensor_basis(&[Level::S_DOWN, Level::S_UP], &[Level::S_DOWN, Level::S_UP], 0).unwrap();
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        StateVector::superposition(
            b,
            &[
                (BasisLabel::new(Level::S_UP, Level::S_DOWN, 0), h),
                (BasisLabel::new(Level::S_DOWN, Level::S_UP, 0), h),
            ],
        )
        .unwrap()
    }

    fn channel(up: f64, down: f64) -> LossChannel {
        LossChannel {
            entries: vec![
                LossEntry { level: Level::S_UP, ion: None, induced: up, natural: 0.0 },
                LossEntry { level: Level::S_DOWN, ion: None, induced: down, natural: 0.0 },
            ],
        }
    }

    #[test]
    fn zero_rates_leave_state_alone() {
        let s = bell();
        let (t, jumped) = decohere_step(&s, &LossChannel::default(), 0.01, &mut stage_rng(1, "t", 0)).unwrap();
        assert!(!jumped);
        assert_eq!(t.amplitudes(), s.amplitudes());
    }

    #[test]
    fn coarse_step_rejected() {
        assert!(matches!(
            decohere_step(&bell(), &channel(1.0, 1.0), 0.06, &mut stage_rng(1, "t", 0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn no_jump_tilts_towards_slower_level() {
        let b = tensor_basis(&[Level::S_DOWN, Level::S_UP], &[Level::S_DOWN], 0).unwrap();
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let up = BasisLabel::new(Level::S_UP, Level::S_DOWN, 0);
        let down = BasisLabel::new(Level::S_DOWN, Level::S_DOWN, 0);
        let s = StateVector::superposition(b, &[(up, h), (down, h)]).unwrap();
        let ch = channel(0.5, 0.0);
        let mut rng = stage_rng(5, "t", 0);
        let mut cur = s;
        for _ in 0..100 {
            let (next, jumped) = decohere_step(&cur, &ch, 0.01, &mut rng).unwrap();
            if !jumped {
                cur = next;
            }
        }
        assert!((cur.norm() - 1.0).abs() < 1e-12);
        assert!(cur.amplitude(&up).norm() < cur.amplitude(&down).norm());
    }

    fn lost_fraction(dt: f64, steps: usize, trajectories: u64) -> f64 {
        let ch = channel(0.3, 0.2);
        let s = bell();
        let mut lost = 0;
        for i in 0..trajectories {
            let mut rng = stage_rng(42, &format!("loss-{dt}"), i);
            for _ in 0..steps {
                if decohere_step(&s, &ch, dt, &mut rng).unwrap().1 {
                    lost += 1;
                    break;
                }
            }
        }
        lost as f64 / trajectories as f64
    }

    /// Every Bell component has one S↑ and one S↓ ion, so Γ = 0.5 s⁻¹ throughout.
    /// Binomial oracle: over 4000 trajectories σ ≈ 0.0079 at p ≈ 0.39; allow 4σ plus the
    /// (1 − Γdt)^n vs e^{−Γt} discretization offset of ≈ Γ²t·dt/2 ≈ 2e-4.
    #[test]
    fn ensemble_loss_matches_exponential() {
        let (gamma, t): (f64, f64) = (0.5, 1.0);
        let expected = 1.0 - (-gamma * t).exp();
        let n = 4000;
        let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
        let fine = lost_fraction(1e-3, 1000, n);
        assert!((fine - expected).abs() < 4.0 * sigma, "{fine} vs {expected}");
        let coarse = lost_fraction(2e-3, 500, n);
        assert!((coarse - fine).abs() < 4.0 * sigma * 2f64.sqrt(), "{coarse} vs {fine}");
    }

    #[test]
    fn per_ion_rates() {
        let ch = channel(1.0, 0.5).on_ion(IonIndex::One);
        assert_eq!(ch.rate_for(IonIndex::One, &Level::S_UP), 1.0);
        assert_eq!(ch.rate_for(IonIndex::Two, &Level::S_UP), 0.0);
        assert_eq!(ch.exchanged().rate_for(IonIndex::Two, &Level::S_DOWN), 0.5);
    }

    #[test]
    fn hyperfine_levels_without_rates_are_zero() {
        let ch = channel(1.0, 1.0);
        assert_eq!(ch.rate(&Level::new(Term::D32, Half(1))), 0.0);
    }
}
