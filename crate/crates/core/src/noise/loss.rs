use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::spherical_components;
use crate::error::{Error, Result};
use crate::ion::AtomicData;
use crate::lightshift::{field_at, StandingWaveField};
use crate::quantum::{IonIndex, Level, Term};
use crate::units::HBAR;

/// Default minimum |ω_{γ′} − ω_γ ± ω| before the perturbative rate is refused.
pub const DEFAULT_RESONANCE_GUARD: f64 = TAU * 1e9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branches {
    /// Both ±ω detuning denominators.
    #[default]
    Both,
    /// Only the ω_{γ′} − ω_γ − ω denominator (rotating-wave diagnostic).
    NearResonant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossOptions {
    pub branches: Branches,
    pub resonance_guard: f64,
}

impl Default for LossOptions {
    fn default() -> Self {
        LossOptions { branches: Branches::Both, resonance_guard: DEFAULT_RESONANCE_GUARD }
    }
}

const P_LEVELS: [Term; 2] = [Term::P12, Term::P32];

fn level_freq(a: &AtomicData, t: Term) -> Result<f64> {
    a.level_freqs
        .get(&t)
        .copied()
        .ok_or_else(|| Error::data(format!("levels.{}", t.label()), "needed for the loss rate"))
}

/// Laser angular frequency ω = (ω_D₃/₂ − ω_S) − δ.
pub fn laser_frequency(f: &StandingWaveField, a: &AtomicData) -> Result<f64> {
    Ok(level_freq(a, Term::D32)? - level_freq(a, Term::S12)? - f.detuning)
}

/// ⟨γ′m′|E·d|γm⟩ (J) for a field vector E, with d_q stored for q = m′ − m.
fn coupling(a: &AtomicData, upper: Level, lower: Level, e: [Complex64; 3]) -> Complex64 {
    let Some(&d) = a.dipoles_6p.get(&(upper, lower)) else {
        return Complex64::new(0.0, 0.0);
    };
    let q = (upper.m - lower.m).twice() / 2;
    let sph = spherical_components(e);
    let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sph[(1 - q) as usize] * (sign * d)
}

/// Off-resonant photon-scattering rate (s⁻¹) of `level` through the 6P manifold in the
/// local field at the ion.
pub fn loss_rate(level: Level, f: &StandingWaveField, a: &AtomicData, opts: LossOptions) -> Result<f64> {
    f.validate()?;
    let e = field_at(f, [0.0; 3]);
    if e.iter().all(|c| c.norm() == 0.0) {
        return Ok(0.0);
    }
    for t in P_LEVELS {
        if !a.linewidths.contains_key(&t) {
            return Err(Error::data(format!("linewidths.{}", t.label()), "needed for the loss rate"));
        }
    }
    let w = laser_frequency(f, a)?;
    let w_level = level_freq(a, level.term)?;
    let mut rate = 0.0;
    for t in P_LEVELS {
        let gap = level_freq(a, t)? - w_level;
        let gamma = a.linewidths[&t];
        let mut denoms = vec![gap - w];
        if opts.branches == Branches::Both {
            denoms.push(gap + w);
        }
        if let Some(bad) = denoms.iter().find(|d| d.abs() < opts.resonance_guard) {
            return Err(Error::Validity(format!(
                "laser within {:.3e} rad/s of {} resonance from {}",
                bad.abs(),
                t.label(),
                level.term.label()
            )));
        }
        let denom_sum: f64 = denoms.iter().map(|d| 1.0 / (d * d)).sum();
        let ratio = (w / gap).powi(3);
        for mp in t.j().projections() {
            let m2 = coupling(a, Level::new(t, mp), level, e).norm_sqr();
            rate += m2 * denom_sum * ratio * gamma;
        }
    }
    Ok(rate / (4.0 * HBAR * HBAR))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossEntry {
    pub level: Level,
    /// Ion the rate applies to; `None` for both.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ion: Option<IonIndex>,
    /// Laser-induced scattering rate, s⁻¹.
    pub induced: f64,
    /// Natural decay rate, s⁻¹.
    pub natural: f64,
}

impl LossEntry {
    pub fn total(&self) -> f64 {
        self.induced + self.natural
    }
}

/// Per-level loss rates for the levels a state may populate.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossChannel {
    pub entries: Vec<LossEntry>,
}

impl LossChannel {
    pub fn rate(&self, level: &Level) -> f64 {
        self.entries.iter().find(|e| &e.level == level).map_or(0.0, LossEntry::total)
    }

    /// Total rate of `level` on one ion.
    pub fn rate_for(&self, ion: IonIndex, level: &Level) -> f64 {
        self.entries
            .iter()
            .filter(|e| &e.level == level && e.ion.is_none_or(|i| i == ion))
            .map(LossEntry::total)
            .sum()
    }

    /// Restricts every entry to one ion.
    pub fn on_ion(mut self, ion: IonIndex) -> Self {
        for e in &mut self.entries {
            e.ion = Some(ion);
        }
        self
    }

    /// Swaps the roles of the two ions.
    pub fn exchanged(mut self) -> Self {
        for e in &mut self.entries {
            e.ion = e.ion.map(IonIndex::other);
        }
        self
    }

    pub fn rates(&self) -> BTreeMap<Level, f64> {
        self.entries.iter().map(|e| (e.level, e.total())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.total() == 0.0)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(LossEntry::total).sum()
    }
}

/// Sums `loss_rate` over all fields per level and adds the natural 5D₃/₂ decay.
pub fn total_loss_channel(
    levels: &[Level],
    fields: &[StandingWaveField],
    a: &AtomicData,
    opts: LossOptions,
) -> Result<LossChannel> {
    let mut entries = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut induced = 0.0;
        for f in fields {
            induced += loss_rate(level, f, a, opts)?;
        }
        let natural = if level.term == Term::D32 { a.d32_decay_rate } else { 0.0 };
        entries.push(LossEntry { level, ion: None, induced, natural });
    }
    Ok(LossChannel { entries })
}
