//! Instantaneous carrier and blue-sideband rotations on single ions, and the five-pulse
//! preparation of the decoherence-free Bell state.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ion::LevelScheme;
use crate::quantum::{apply, fidelity, tensor_basis, Basis, BasisLabel, IonIndex, Level, Operator, StateVector};

/// Population allowed in states a sideband pulse would push past the Fock cutoff.
pub const TRUNCATION_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Carrier,
    BlueSideband,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    #[serde(with = "ion_number")]
    pub ion: IonIndex,
    pub kind: PulseKind,
    #[serde(rename = "area_rad")]
    pub area: f64,
    #[serde(rename = "phase_rad", default)]
    pub phase: f64,
    /// (ground, excited) levels of the driven transition.
    pub transition: (Level, Level),
}

mod ion_number {
    use super::IonIndex;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ion: &IonIndex, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(match ion {
            IonIndex::One => 1,
            IonIndex::Two => 2,
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IonIndex, D::Error> {
        IonIndex::from_number(u8::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Pulse {
    pub fn validate(&self) -> Result<()> {
        if !(self.area > 0.0) || !self.area.is_finite() || !self.phase.is_finite() {
            return Err(Error::Config(format!("pulse area must be finite and > 0, got {}", self.area)));
        }
        if self.transition.0 == self.transition.1 {
            return Err(Error::Config("pulse transition needs two distinct levels".into()));
        }
        Ok(())
    }

    fn partner(&self, l: &BasisLabel) -> Option<(BasisLabel, BasisLabel)> {
        let (g, e) = self.transition;
        if l.ion(self.ion) != g {
            return None;
        }
        let shift = usize::from(self.kind == PulseKind::BlueSideband);
        let mut up = l.with_ion(self.ion, e);
        up.fock += shift;
        Some((*l, up))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PulseSequence {
    pub pulses: Vec<Pulse>,
}

/// U = cos(θ/2)·1 − i·sin(θ/2)(e^{iφ}|e,n+s⟩⟨g,n| + h.c.) on each coupled pair (s = 0
/// carrier, s = 1 blue sideband); identity on everything else, including |g, n_max⟩ for a
/// sideband pulse.
pub fn pulse_unitary(p: &Pulse, basis: &Arc<Basis>) -> Result<Operator> {
    p.validate()?;
    let (g, e) = p.transition;
    for lvl in [g, e] {
        if !basis.levels(p.ion).contains(&lvl) {
            return Err(Error::Usage(format!("{lvl} is not a level of ion {:?}", p.ion)));
        }
    }
    let d = basis.dim();
    let mut m = Array2::<Complex64>::eye(d);
    let (s, c) = (p.area / 2.0).sin_cos();
    let mi = Complex64::new(0.0, -s);
    for (ig, l) in basis.labels().enumerate() {
        let Some((_, up)) = p.partner(&l) else { continue };
        let Some(ie) = basis.index_of(&up) else { continue };
        m[(ig, ig)] = Complex64::new(c, 0.0);
        m[(ie, ie)] = Complex64::new(c, 0.0);
        m[(ie, ig)] = mi * Complex64::from_polar(1.0, p.phase);
        m[(ig, ie)] = mi * Complex64::from_polar(1.0, -p.phase);
    }
    Operator::new_unitary(basis.clone(), m)
}

/// Population in ground states that a sideband pulse would need to lift past n_max.
fn overflow_population(p: &Pulse, s: &StateVector) -> f64 {
    if p.kind != PulseKind::BlueSideband {
        return 0.0;
    }
    let basis = s.basis().clone();
    s.population(|l| p.partner(l).is_some_and(|(_, up)| basis.index_of(&up).is_none()))
}

pub fn apply_pulse(p: &Pulse, s: &StateVector) -> Result<StateVector> {
    let over = overflow_population(p, s);
    if over > TRUNCATION_TOL {
        return Err(Error::Simulation(format!(
            "Fock truncation n_max = {} overflowed: population {over:.3e} would leave the basis",
            s.basis().n_max()
        )));
    }
    apply(&pulse_unitary(p, s.basis())?, s)
}

pub fn run_sequence(seq: &PulseSequence, s: &StateVector) -> Result<StateVector> {
    if seq.pulses.is_empty() {
        return Err(Error::Config("pulse sequence is empty".into()));
    }
    seq.pulses.iter().try_fold(s.clone(), |acc, p| apply_pulse(p, &acc))
}

/// The preparation recipe: sideband π/2 on ion 1, carrier π on ion 2, sideband π on ion 2
/// (S↑ ↔ aux), then carrier π on each ion mapping aux onto S↓.
pub fn bell_sequence(aux: Level) -> PulseSequence {
    let up = (Level::S_UP, aux);
    let down = (Level::S_DOWN, aux);
    let pulse = |ion, kind, area, transition| Pulse { ion, kind, area, phase: 0.0, transition };
    PulseSequence {
        pulses: vec![
            pulse(IonIndex::One, PulseKind::BlueSideband, FRAC_PI_2, up),
            pulse(IonIndex::Two, PulseKind::Carrier, PI, up),
            pulse(IonIndex::Two, PulseKind::BlueSideband, PI, up),
            pulse(IonIndex::One, PulseKind::Carrier, PI, down),
            pulse(IonIndex::Two, PulseKind::Carrier, PI, down),
        ],
    }
}

#[derive(Clone, Debug)]
pub struct BellPreparation {
    pub state: StateVector,
    /// Relative phase α in (|1⟩₁|0⟩₂ + e^{iα}|0⟩₁|1⟩₂)/√2, from the prepared state.
    pub alpha: f64,
    /// Fidelity with the ideal state carrying that α.
    pub fidelity: f64,
    pub aux_population: f64,
    pub excited_motion_population: f64,
}

/// (|1⟩₁|0⟩₂ + e^{iα}|0⟩₁|1⟩₂)/√2 ⊗ |n=0⟩ with |1⟩ = S↑, |0⟩ = S↓.
pub fn bell_target(basis: Arc<Basis>, alpha: f64) -> Result<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::superposition(
        basis,
        &[
            (BasisLabel::new(Level::S_UP, Level::S_DOWN, 0), Complex64::new(h, 0.0)),
            (BasisLabel::new(Level::S_DOWN, Level::S_UP, 0), Complex64::from_polar(h, alpha)),
        ],
    )
}

pub fn bell_basis(scheme: &LevelScheme, n_max: usize) -> Result<Arc<Basis>> {
    let aux = scheme
        .aux_level()
        .ok_or_else(|| Error::Config(format!("scheme {} has no 5D5/2 auxiliary level", scheme.isotope)))?;
    let levels = [Level::S_DOWN, Level::S_UP, aux];
    tensor_basis(&levels, &levels, n_max)
}

/// Runs `seq` on |S↑, S↑, n=0⟩ and reports the Bell phase and fidelity.
pub fn prepare_with(basis: &Arc<Basis>, seq: &PulseSequence) -> Result<BellPreparation> {
    let start = StateVector::basis_state(basis.clone(), &BasisLabel::new(Level::S_UP, Level::S_UP, 0))?;
    let state = run_sequence(seq, &start)?;
    let c10 = state.amplitude(&BasisLabel::new(Level::S_UP, Level::S_DOWN, 0));
    let c01 = state.amplitude(&BasisLabel::new(Level::S_DOWN, Level::S_UP, 0));
    let alpha = if c10.norm() > 0.0 && c01.norm() > 0.0 { (c01 / c10).arg() } else { 0.0 };
    let fid = fidelity(&bell_target(basis.clone(), alpha)?, &state)?;
    let aux_population = state.population(|l| !l.ion1.is_ground_qubit() || !l.ion2.is_ground_qubit());
    let excited_motion_population = state.population(|l| l.fock > 0);
    Ok(BellPreparation { state, alpha, fidelity: fid, aux_population, excited_motion_population })
}

pub fn prepare_bell(basis: &Arc<Basis>, scheme: &LevelScheme) -> Result<BellPreparation> {
    let aux = scheme
        .aux_level()
        .ok_or_else(|| Error::Config(format!("scheme {} has no 5D5/2 auxiliary level", scheme.isotope)))?;
    prepare_with(basis, &bell_sequence(aux))
}
