//! Standing-wave fields, PNC and quadrupole Rabi couplings on 6S₁/₂ → 5D₃/₂, the
//! resulting ground-sublevel light shifts and the Larmor-frequency shift they cause.

mod field;
pub mod hyperfine;

pub use field::{field_at, gradient_at, CMat3, CVec3, FieldLabel, Geometry, StandingWaveField, S_D32_WAVELENGTH};
pub use crate::angular::clebsch_gordan;
pub use hyperfine::{hyperfine_coefficients, nsd_nsi_compose, nsd_nsi_separate, Separation};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::Half;
use crate::ion::AtomicData;
use crate::quantum::Term;
use crate::units::{angular_to_hz, HBAR};

const ORIGIN: [f64; 3] = [0.0; 3];
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Ω^PNC_{m′m} = (1/2ħ) Σ_i ε^PNC_{m′m,i} E_i(0), rad/s. Missing elements couple with zero.
pub fn rabi_pnc(mp: Half, m: Half, f: &StandingWaveField, a: &AtomicData) -> Complex64 {
    let eps = a.pnc_vector(mp, m);
    let e = field_at(f, ORIGIN);
    (0..3).map(|i| eps[i] * e[i]).sum::<Complex64>() / (2.0 * HBAR)
}

/// Ω^Q_{m′m} = (1/2ħ) Σ_ij ε^Q_{m′m,ij} ∂_j E_i(0), rad/s.
pub fn rabi_quad(mp: Half, m: Half, f: &StandingWaveField, a: &AtomicData) -> Complex64 {
    let eps = a.quad_tensor(mp, m);
    let g = gradient_at(f, ORIGIN);
    let mut sum = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            sum += eps[i][j] * g[i][j];
        }
    }
    sum / (2.0 * HBAR)
}

/// Both couplings from one S sublevel to one D₃/₂ sublevel, summed over all fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub m_prime: Half,
    pub quad: Complex64,
    pub pnc: Complex64,
}

pub fn couplings(m: Half, fields: &[StandingWaveField], a: &AtomicData) -> Vec<Coupling> {
    Term::D32
        .j()
        .projections()
        .into_iter()
        .map(|mp| Coupling {
            m_prime: mp,
            quad: fields.iter().map(|f| rabi_quad(mp, m, f, a)).sum(),
            pnc: fields.iter().map(|f| rabi_pnc(mp, m, f, a)).sum(),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resultant {
    /// sqrt(Σ|Ω^Q + Ω^PNC|²)
    pub exact: f64,
    /// Ω^Q_m = sqrt(Σ|Ω^Q|²)
    pub quad: f64,
    /// Re Σ Ω^PNC* Ω^Q / Ω^Q_m
    pub interference: f64,
}

impl Resultant {
    pub fn first_order(&self) -> f64 {
        self.quad + self.interference
    }
}

fn quad_norm(c: &[Coupling]) -> f64 {
    c.iter().map(|x| x.quad.norm_sqr()).sum::<f64>().sqrt()
}

fn exact_norm(c: &[Coupling]) -> f64 {
    c.iter().map(|x| (x.quad + x.pnc).norm_sqr()).sum::<f64>().sqrt()
}

/// Resultant Rabi frequency of one ground sublevel, exact and to first order in Ω^PNC.
pub fn resultant_rabi(m: Half, c: &[Coupling]) -> Result<Resultant> {
    let quad = quad_norm(c);
    let has_pnc = c.iter().any(|x| x.pnc != ZERO);
    if quad == 0.0 && has_pnc {
        return Err(Error::DegenerateGeometry(format!(
            "Ω^Q vanishes for m = {m} while the PNC coupling does not; the first-order expansion is undefined"
        )));
    }
    let interference = if quad == 0.0 {
        0.0
    } else {
        c.iter().map(|x| (x.pnc.conj() * x.quad).re).sum::<f64>() / quad
    };
    Ok(Resultant { exact: exact_norm(c), quad, interference })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightShiftMode {
    /// δ/2 − Ω, the strong-coupling dressed-state form.
    #[default]
    Literal,
    /// δ/2 − sqrt(δ²/4 + Ω²), which vanishes with the coupling.
    Dressed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RabiMode {
    /// Ω_m ≈ Ω^Q_m + interference.
    #[default]
    FirstOrder,
    Exact,
}

/// Δω_m for detuning δ and resultant Rabi frequency Ω_m (all rad/s).
pub fn light_shift(delta: f64, omega: f64, mode: LightShiftMode) -> f64 {
    match mode {
        LightShiftMode::Literal => delta / 2.0 - omega,
        LightShiftMode::Dressed => delta / 2.0 - (delta * delta / 4.0 + omega * omega).sqrt(),
    }
}

/// light_shift(a) − light_shift(b) given a − b, without cancelling the large common part.
fn shift_difference(delta: f64, a: f64, b: f64, a_minus_b: f64, mode: LightShiftMode) -> f64 {
    match mode {
        LightShiftMode::Literal => -a_minus_b,
        LightShiftMode::Dressed => {
            let r = |w: f64| (delta * delta / 4.0 + w * w).sqrt();
            let denom = r(a) + r(b);
            if denom == 0.0 {
                0.0
            } else {
                -a_minus_b * (a + b) / denom
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftOptions {
    pub light_shift_mode: LightShiftMode,
    pub rabi_mode: RabiMode,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        ShiftOptions { light_shift_mode: LightShiftMode::Literal, rabi_mode: RabiMode::FirstOrder }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublevelShift {
    pub m: Half,
    pub omega_q: f64,
    pub interference: f64,
    pub omega_exact: f64,
    /// Ω_m actually used in Δω_m under the selected Rabi mode.
    pub omega: f64,
    pub delta_omega: f64,
    /// Part of Δω_m caused by the PNC coupling.
    pub pnc_contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub detuning: f64,
    pub options: ShiftOptions,
    pub sublevels: Vec<SublevelShift>,
    /// ω′_L − ω_L, rad/s.
    pub larmor_shift: f64,
    /// Difference of the pure-E2 shifts between m = −1/2 and +1/2; zero in the standard geometry.
    pub e2_residual: f64,
}

impl ShiftReport {
    pub fn sublevel(&self, m: Half) -> Option<&SublevelShift> {
        self.sublevels.iter().find(|s| s.m == m)
    }

    pub fn larmor_shift_hz(&self) -> f64 {
        angular_to_hz(self.larmor_shift)
    }

    /// All-zero report, for an ion with no lasers.
    pub fn dark(options: ShiftOptions) -> Self {
        let sublevels = [Half(-1), Half(1)]
            .into_iter()
            .map(|m| SublevelShift {
                m,
                omega_q: 0.0,
                interference: 0.0,
                omega_exact: 0.0,
                omega: 0.0,
                delta_omega: 0.0,
                pnc_contribution: 0.0,
            })
            .collect();
        ShiftReport { detuning: 0.0, options, sublevels, larmor_shift: 0.0, e2_residual: 0.0 }
    }

    pub fn csv_header() -> &'static str {
        "m,omega_q_hz,interference_hz,delta_omega_hz"
    }

    pub fn csv_rows(&self) -> Vec<[f64; 4]> {
        self.sublevels
            .iter()
            .map(|s| {
                [
                    s.m.value(),
                    angular_to_hz(s.omega_q),
                    angular_to_hz(s.interference),
                    angular_to_hz(s.delta_omega),
                ]
            })
            .collect()
    }
}

fn common_detuning(fields: &[StandingWaveField]) -> Result<f64> {
    let lit: Vec<&StandingWaveField> = fields.iter().filter(|f| f.amplitude > 0.0).collect();
    let delta = lit.first().map_or(0.0, |f| f.detuning);
    if lit.iter().any(|f| f.detuning != delta) {
        return Err(Error::Config("E′ and E″ must share one detuning (same laser frequency)".into()));
    }
    Ok(delta)
}

/// Light shifts of both ground sublevels and the resulting Larmor shift. With the E2 laser
/// off (Ω^Q_m = 0) the exact resultant is used and any m-asymmetry lands in the shift.
pub fn shift_report(fields: &[StandingWaveField], a: &AtomicData, opts: ShiftOptions) -> Result<ShiftReport> {
    for f in fields {
        f.validate()?;
    }
    let delta = common_detuning(fields)?;
    let mode = opts.light_shift_mode;
    let mut sublevels = Vec::with_capacity(2);
    for m in [Half(-1), Half(1)] {
        let c = couplings(m, fields, a);
        let quad = quad_norm(&c);
        let (r, omega, pnc_contribution) = if quad == 0.0 {
            let exact = exact_norm(&c);
            let r = Resultant { exact, quad, interference: 0.0 };
            (r, exact, light_shift(delta, exact, mode) - light_shift(delta, 0.0, mode))
        } else {
            let r = resultant_rabi(m, &c)?;
            match opts.rabi_mode {
                RabiMode::FirstOrder => {
                    let w = r.first_order();
                    (r, w, shift_difference(delta, w, quad, r.interference, mode))
                }
                RabiMode::Exact => {
                    let w = r.exact;
                    let sq_diff: f64 = c
                        .iter()
                        .map(|x| 2.0 * (x.quad.conj() * x.pnc).re + x.pnc.norm_sqr())
                        .sum();
                    let diff = sq_diff / (w + quad);
                    (r, w, shift_difference(delta, w, quad, diff, mode))
                }
            }
        };
        sublevels.push(SublevelShift {
            m,
            omega_q: r.quad,
            interference: r.interference,
            omega_exact: r.exact,
            omega,
            delta_omega: light_shift(delta, omega, mode),
            pnc_contribution,
        });
    }
    let (down, up) = (&sublevels[0], &sublevels[1]);
    let e2_residual = light_shift(delta, down.omega_q, mode) - light_shift(delta, up.omega_q, mode);
    let larmor_shift = larmor_shift(down.pnc_contribution, up.pnc_contribution) + e2_residual;
    Ok(ShiftReport { detuning: delta, options: opts, sublevels, larmor_shift, e2_residual })
}

/// ω′_L − ω_L from the PNC parts of Δω_{−1/2} and Δω_{+1/2}. A level shift is −ħΔω_m,
/// so the m = +1/2 sublevel moving down relative to m = −1/2 lowers ω_L.
pub fn larmor_shift(pnc_down: f64, pnc_up: f64) -> f64 {
    pnc_down - pnc_up
}
