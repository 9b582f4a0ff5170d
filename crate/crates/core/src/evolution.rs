//! Free evolution of the ground-state Bell superposition under Zeeman energies, the
//! laser light shifts on each ion, magnetic-field noise and scattering loss.
//!
//! Each label's phase is split into a part depending only on m₁ + m₂ (identical for the
//! two Bell branches) and a small differential part, applied as separate factors so the
//! large Zeeman phases never round away the differential one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lightshift::{ShiftReport, StandingWaveField};
use crate::noise::{decohere_step, sample_b_trajectory_indexed, step_count, LossChannel, NoiseModel};
use crate::quantum::{BasisLabel, IonIndex, StateVector};
use crate::seeds::stage_rng;
use crate::half::Half;
use crate::ion::TrapConfig;

/// Tolerated population outside the ground qubit ⊗ |n=0⟩ subspace.
pub const SUBSPACE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Systematics {
    /// Lasers address ion 2 instead of ion 1.
    pub exchange_ions: bool,
    /// E″ laser blocked: no E1_PNC–E2 interference.
    pub e_double_prime_off: bool,
    /// Transverse admixture c in ε̂′ ∝ x̂ + c·ŷ (imaginary c is circular).
    pub circular_admixture: Complex64,
}

impl Systematics {
    /// Applies the field-level toggles to an E′/E″ pair.
    pub fn apply(&self, fields: &[StandingWaveField]) -> Vec<StandingWaveField> {
        use crate::lightshift::FieldLabel;
        fields
            .iter()
            .map(|f| match f.label {
                FieldLabel::Prime if self.circular_admixture != Complex64::new(0.0, 0.0) => {
                    f.clone().with_admixture(self.circular_admixture)
                }
                FieldLabel::DoublePrime if self.e_double_prime_off => {
                    StandingWaveField { amplitude: 0.0, ..f.clone() }
                }
                _ => f.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionScenario {
    /// τ, s
    pub duration: f64,
    /// s
    pub dt: f64,
    pub trap: TrapConfig,
    /// ∂ω_L/∂B of the ground qubit, rad/s/T.
    pub larmor_per_tesla: f64,
    /// Light shifts on the addressed ion.
    pub shift_ion1: ShiftReport,
    /// Light shifts on the other ion, if it is lit too.
    pub shift_ion2: Option<ShiftReport>,
    pub noise: NoiseModel,
    pub loss: LossChannel,
    pub systematics: Systematics,
}

struct IonShift {
    /// m-even part of −Δω_m.
    mean: f64,
    /// ω′_L − ω_L on this ion.
    larmor: f64,
}

fn ion_shift(r: Option<&ShiftReport>) -> IonShift {
    match r {
        None => IonShift { mean: 0.0, larmor: 0.0 },
        Some(r) => {
            let get = |m| r.sublevel(m).map_or(0.0, |s| s.delta_omega);
            IonShift { mean: -(get(Half(1)) + get(Half(-1))) / 2.0, larmor: r.larmor_shift }
        }
    }
}

impl EvolutionScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::Config(format!("evolution duration must be > 0, got {}", self.duration)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config("evolution dt must be > 0".into()));
        }
        self.trap.validate()
    }

    fn shifts(&self) -> [IonShift; 2] {
        let (a, b) = (ion_shift(Some(&self.shift_ion1)), ion_shift(self.shift_ion2.as_ref()));
        if self.systematics.exchange_ions {
            [b, a]
        } else {
            [a, b]
        }
    }

    /// Loss channel with the ion roles swapped when the lasers address ion 2.
    fn loss_channel(&self) -> LossChannel {
        if self.systematics.exchange_ions {
            self.loss.clone().exchanged()
        } else {
            self.loss.clone()
        }
    }

    fn is_deterministic(&self) -> bool {
        self.noise.is_quiet() && self.loss.is_zero()
    }
}

/// Δλ = [E(|1⟩₁|0⟩₂) − E(|0⟩₁|1⟩₂)]/ħ for the static fields, rad/s.
pub fn phase_rate(sc: &EvolutionScenario) -> f64 {
    let [s1, s2] = sc.shifts();
    sc.larmor_per_tesla * sc.trap.b_gradient * sc.trap.separation() + (s1.larmor - s2.larmor)
}

fn m_of(l: &BasisLabel, ion: IonIndex) -> f64 {
    l.ion(ion).m.value()
}

#[derive(Clone, Debug)]
pub struct EvolutionOutcome {
    pub state: StateVector,
    /// A scattering event occurred; the shot carries no interference.
    pub lost: bool,
    /// Accumulated phase of |0⟩₁|1⟩₂ relative to |1⟩₁|0⟩₂, rad.
    pub differential_phase: f64,
}

/// Field integrals ∫B_common dt and ∫∂B/∂z dt over the evolution, plus the loss flag.
struct Integrals {
    common: f64,
    gradient: f64,
    lost: bool,
}

fn integrate(s: &StateVector, sc: &EvolutionScenario, seed: u64) -> Result<Integrals> {
    let tau = sc.duration;
    if sc.is_deterministic() {
        return Ok(Integrals { common: sc.trap.b_field * tau, gradient: sc.trap.b_gradient * tau, lost: false });
    }
    let steps = step_count(tau, sc.dt)?;
    let noise = NoiseModel { seed, ..sc.noise };
    let b = sample_b_trajectory_indexed(&noise, tau, sc.dt, 0)?;
    // Static parts are integrated exactly; the fluctuations step by step.
    let common = sc.trap.b_field * tau + b.common.iter().sum::<f64>() * sc.dt;
    let gradient = sc.trap.b_gradient * tau + b.gradient.iter().sum::<f64>() * sc.dt;
    let mut lost = false;
    if !sc.loss.is_zero() {
        // Phases do not change populations, so the jump record can be drawn on the
        // un-phased state.
        let mut rng = stage_rng(seed, "loss", 0);
        let loss = sc.loss_channel();
        let mut cur = s.clone();
        for _ in 0..steps {
            let (next, jumped) = decohere_step(&cur, &loss, sc.dt, &mut rng)?;
            if jumped {
                lost = true;
                break;
            }
            cur = next;
        }
    }
    Ok(Integrals { common, gradient, lost })
}

/// Evolves `s` for the scenario duration. `seed` selects the noise and loss realization.
pub fn evolve(s: &StateVector, sc: &EvolutionScenario, seed: u64) -> Result<EvolutionOutcome> {
    sc.validate()?;
    let outside = s.population(|l| !(l.ion1.is_ground_qubit() && l.ion2.is_ground_qubit() && l.fock == 0));
    if outside > SUBSPACE_TOL {
        return Err(Error::Usage(format!(
            "evolution expects the ground-qubit ⊗ |n=0⟩ subspace; {outside:.3e} population outside"
        )));
    }
    let ints = integrate(s, sc, seed)?;
    let [s1, s2] = sc.shifts();
    let tau = sc.duration;
    let k = sc.larmor_per_tesla;
    let [z1, z2] = [sc.trap.ion_positions[0][2], sc.trap.ion_positions[1][2]];
    let common_shift = (s1.mean + s2.mean) * tau;
    // Energy of a ground label: k·m_i·B_i + m_i·L_i + mean_i per ion.
    let phases = |l: &BasisLabel| -> (f64, f64) {
        let (m1, m2) = (m_of(l, IonIndex::One), m_of(l, IonIndex::Two));
        let common = k * (m1 + m2) * ints.common + common_shift;
        let diff = k * (m1 * z1 + m2 * z2) * ints.gradient + (m1 * s1.larmor + m2 * s2.larmor) * tau;
        (common, diff)
    };
    let state = s.map_labels(|l| {
        if !(l.ion1.is_ground_qubit() && l.ion2.is_ground_qubit()) {
            return Complex64::new(1.0, 0.0);
        }
        let (c, d) = phases(l);
        Complex64::from_polar(1.0, -c) * Complex64::from_polar(1.0, -d)
    });
    let ten = BasisLabel::new(crate::quantum::Level::S_UP, crate::quantum::Level::S_DOWN, 0);
    let one = BasisLabel::new(crate::quantum::Level::S_DOWN, crate::quantum::Level::S_UP, 0);
    let (c10, d10) = phases(&ten);
    let (c01, d01) = phases(&one);
    let differential_phase = (d10 - d01) + (c10 - c01);
    Ok(EvolutionOutcome { state, lost: ints.lost, differential_phase })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ion::{AtomicData, LevelScheme};
    use crate::lightshift::{shift_report, ShiftOptions};
    use crate::noise::{LossEntry, ProcessKind, ProcessSpec};
    use crate::pulse::{bell_basis, prepare_bell};
    use crate::quantum::{fidelity, Level, Term};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn scheme() -> LevelScheme {
        LevelScheme::even_isotope(Level::new(Term::D52, Half(1))).unwrap()
    }

    fn lasers() -> Vec<StandingWaveField> {
        vec![StandingWaveField::e_prime(2e6), StandingWaveField::e_double_prime(1e4)]
    }

    fn scenario(duration: f64, shift: ShiftReport) -> EvolutionScenario {
        EvolutionScenario {
            duration,
            dt: 1e-3,
            trap: TrapConfig::two_ion(TAU * 1e6, 1e-5, 0.0),
            larmor_per_tesla: scheme().larmor_per_tesla().unwrap(),
            shift_ion1: shift,
            shift_ion2: None,
            noise: NoiseModel::default(),
            loss: LossChannel::default(),
            systematics: Systematics::default(),
        }
    }

    fn reference_shift() -> ShiftReport {
        shift_report(&lasers(), &AtomicData::reference_ba138(), ShiftOptions::default()).unwrap()
    }

    /// Synthetic report with a given Larmor shift and a large common light shift.
    fn synthetic(larmor: f64) -> ShiftReport {
        let mut r = ShiftReport::dark(ShiftOptions::default());
        r.sublevels[0].delta_omega = -4.1e5 + larmor / 2.0;
        r.sublevels[1].delta_omega = -4.1e5 - larmor / 2.0;
        r.larmor_shift = larmor;
        r
    }

    fn bell() -> StateVector {
        let s = scheme();
        prepare_bell(&bell_basis(&s, 2).unwrap(), &s).unwrap().state
    }

    fn relative_phase(s: &StateVector) -> f64 {
        let c10 = s.amplitude(&BasisLabel::new(Level::S_UP, Level::S_DOWN, 0));
        let c01 = s.amplitude(&BasisLabel::new(Level::S_DOWN, Level::S_UP, 0));
        (c01 / c10).arg()
    }

    fn wrap(x: f64) -> f64 {
        (x + PI).rem_euclid(TAU) - PI
    }

    #[test]
    fn dark_ions_have_no_phase_rate() {
        assert_eq!(phase_rate(&scenario(1.0, ShiftReport::dark(ShiftOptions::default()))), 0.0);
    }

    #[test]
    fn reference_phase_rate_and_exchange() {
        let mut sc = scenario(1.0, reference_shift());
        let rate = phase_rate(&sc);
        assert_relative_eq!(rate / TAU, 0.196, max_relative = 0.01);
        sc.systematics.exchange_ions = true;
        assert_eq!(phase_rate(&sc), -rate);
    }

    #[test]
    fn noiseless_phase_matches_rate() {
        let s0 = bell();
        let alpha = relative_phase(&s0);
        for tau in [0.3, 1.25, 7.0] {
            let sc = scenario(tau, synthetic(TAU * 0.2));
            let out = evolve(&s0, &sc, 1).unwrap();
            let got = wrap(relative_phase(&out.state) - alpha);
            assert!((got - wrap(TAU * 0.2 * tau)).abs() < 1e-10, "τ={tau}: {got}");
            let p10 = out.state.population(|l| l.ion1 == Level::S_UP && l.ion2 == Level::S_DOWN);
            assert_relative_eq!(p10, 0.5, epsilon = 1e-12);
            assert!((out.differential_phase - TAU * 0.2 * tau).abs() < 1e-10);
        }
        let quarter = evolve(&s0, &scenario(1.25, synthetic(TAU * 0.2)), 1).unwrap();
        assert_relative_eq!(wrap(relative_phase(&quarter.state) - alpha), FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn full_revolution_returns() {
        let s0 = bell();
        let out = evolve(&s0, &scenario(5.0, synthetic(TAU * 0.2)), 1).unwrap();
        assert!(1.0 - fidelity(&s0, &out.state).unwrap() < 1e-10);
    }

    #[test]
    fn phase_linear_in_time() {
        let s0 = bell();
        let a = evolve(&s0, &scenario(0.4, reference_shift()), 1).unwrap().differential_phase;
        let b = evolve(&s0, &scenario(0.8, reference_shift()), 1).unwrap().differential_phase;
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-10);
    }

    #[test]
    fn common_mode_noise_cancels_exactly() {
        let s0 = bell();
        let mut sc = scenario(1.0, ShiftReport::dark(ShiftOptions::default()));
        sc.noise.common_mode = ProcessSpec { kind: ProcessKind::OrnsteinUhlenbeck, amplitude: 1e-8, correlation_time: 0.05 };
        sc.noise.seed = 9;
        let noiseless = evolve(&s0, &scenario(1.0, ShiftReport::dark(ShiftOptions::default())), 9).unwrap();
        for seed in 0..5 {
            let out = evolve(&s0, &sc, seed).unwrap();
            assert_eq!(out.differential_phase, 0.0);
            assert!((relative_phase(&out.state) - relative_phase(&noiseless.state)).abs() < 1e-12);
        }
    }

    #[test]
    fn static_gradient_phase() {
        let s0 = bell();
        let mut sc = scenario(10.0, ShiftReport::dark(ShiftOptions::default()));
        sc.trap.b_gradient = 1e-4;
        let analytic = 1e-4 * sc.trap.separation() * sc.larmor_per_tesla * 10.0;
        let out = evolve(&s0, &sc, 0).unwrap();
        assert_relative_eq!(out.differential_phase, analytic, max_relative = 1e-10);
        assert_relative_eq!(phase_rate(&sc) * 10.0, analytic, max_relative = 1e-12);
    }

    #[test]
    fn systematics_toggles() {
        let a = AtomicData::reference_ba138();
        let off = Systematics { e_double_prime_off: true, ..Default::default() };
        let r = shift_report(&off.apply(&lasers()), &a, ShiftOptions::default()).unwrap();
        assert_eq!(phase_rate(&scenario(1.0, r)), 0.0);
        let circ = Systematics { circular_admixture: Complex64::new(0.0, 0.05), ..off };
        let r = shift_report(&circ.apply(&lasers()), &a, ShiftOptions::default()).unwrap();
        assert!(phase_rate(&scenario(1.0, r)).abs() > 0.0);
    }

    #[test]
    fn loss_marks_trajectories() {
        let s0 = bell();
        let mut sc = scenario(1.0, ShiftReport::dark(ShiftOptions::default()));
        sc.loss = LossChannel {
            entries: vec![LossEntry { level: Level::S_UP, ion: None, induced: 2.0, natural: 0.0 }],
        };
        sc.dt = 1e-3;
        let lost = (0..400).filter(|&i| evolve(&s0, &sc, i).unwrap().lost).count() as f64 / 400.0;
        let expected = 1.0 - (-2.0f64).exp();
        assert!((lost - expected).abs() < 4.0 * (expected * (1.0 - expected) / 400.0).sqrt(), "{lost}");
    }

    #[test]
    fn rejects_states_outside_ground_subspace() {
        let s = scheme();
        let b = bell_basis(&s, 1).unwrap();
        let aux = StateVector::basis_state(b, &BasisLabel::new(Level::new(Term::D52, Half(1)), Level::S_UP, 0)).unwrap();
        assert!(matches!(evolve(&aux, &scenario(1.0, reference_shift()), 0), Err(Error::Usage(_))));
    }
}
