//! TOML scenario files: every physical quantity carries its unit in the key name and is
//! converted to SI here. Unknown keys are rejected with their location.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evolution::Systematics;
use crate::half::Half;
use crate::ion::{AtomicData, LevelScheme, TrapConfig};
use crate::lightshift::{LightShiftMode, RabiMode, ShiftOptions, StandingWaveField};
use crate::measurement::SnrPlan;
use crate::noise::{Branches, LossOptions, NoiseModel, ProcessKind, ProcessSpec};
use crate::quantum::{Level, Term};
use crate::units::{hz_to_angular, EA0};

pub const BUILTIN_BA138: &str = "builtin:ba138";

fn seed_de<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<u64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(u64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Int(n) => Ok(n),
        Raw::Text(s) => s.parse().map_err(|_| serde::de::Error::custom(format!("seed `{s}` is not a u64"))),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    /// TOML integers stop at 2⁶³ − 1, so larger seeds may be given as a decimal string.
    #[serde(deserialize_with = "seed_de")]
    pub seed: u64,
    pub atomic_data: AtomicDataSpec,
    pub levels: LevelsSpec,
    pub trap: TrapSpec,
    pub fields: FieldsSpec,
    pub shift: ShiftSpec,
    pub loss: LossSpec,
    pub noise: NoiseSpec,
    pub evolution: EvolutionSpec,
    pub measurement: MeasurementSpec,
    pub plan: PlanSpec,
    pub scaling: ScalingSpec,
    pub output: OutputSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomicDataSpec {
    /// `builtin:ba138` or a JSON file, relative paths resolved against the scenario file.
    pub path: String,
    /// Multiplies every ε^PNC component.
    pub pnc_scale: f64,
    /// Multiplies every 6P linewidth.
    pub linewidth_scale: f64,
}

impl Default for AtomicDataSpec {
    fn default() -> Self {
        AtomicDataSpec { path: BUILTIN_BA138.into(), pnc_scale: 1.0, linewidth_scale: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevelsSpec {
    /// 5D₅/₂ sublevel used as the shelving level during preparation.
    pub aux: Level,
    /// Highest motional Fock state kept.
    pub fock_cutoff: usize,
}

impl Default for LevelsSpec {
    fn default() -> Self {
        LevelsSpec { aux: Level::new(Term::D52, Half(1)), fock_cutoff: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapSpec {
    pub axial_freq_hz: f64,
    pub b_field_tesla: f64,
    pub b_gradient_tesla_per_m: f64,
}

impl Default for TrapSpec {
    fn default() -> Self {
        TrapSpec { axial_freq_hz: 1e6, b_field_tesla: 1e-4, b_gradient_tesla_per_m: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub amplitude_v_per_m: f64,
    #[serde(default)]
    pub detuning_hz: f64,
    /// Optical phase; defaults to 0 for E′ and π/2 for E″.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_rad: Option<f64>,
    /// Real polarization vector, normalized at load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldsSpec {
    pub e_prime: FieldSpec,
    pub e_double_prime: FieldSpec,
}

impl Default for FieldsSpec {
    fn default() -> Self {
        let f = |a| FieldSpec { amplitude_v_per_m: a, detuning_hz: 0.0, phase_rad: None, polarization: None };
        FieldsSpec { e_prime: f(2e6), e_double_prime: f(1e4) }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftSpec {
    pub light_shift_mode: LightShiftMode,
    pub rabi_mode: RabiMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossFieldSpec {
    pub amplitude_v_per_m: f64,
    #[serde(default)]
    pub detuning_hz: f64,
    pub polarization: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossSpec {
    pub levels: Vec<Level>,
    pub branches: Branches,
    pub resonance_guard_hz: f64,
    /// Field for the loss table; the scenario's E′/E″ pair when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<LossFieldSpec>,
}

impl Default for LossSpec {
    fn default() -> Self {
        LossSpec {
            levels: vec![Level::S_UP, Level::new(Term::D32, Half(1)), Level::new(Term::D32, Half(3))],
            branches: Branches::Both,
            resonance_guard_hz: 1e9,
            field: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommonNoiseSpec {
    #[serde(default)]
    pub kind: ProcessKind,
    pub amplitude_tesla: f64,
    #[serde(default = "default_tau_c")]
    pub correlation_time_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientNoiseSpec {
    #[serde(default)]
    pub kind: ProcessKind,
    pub amplitude_tesla_per_m: f64,
    #[serde(default = "default_tau_c")]
    pub correlation_time_s: f64,
}

fn default_tau_c() -> f64 {
    0.1
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_mode: Option<CommonNoiseSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient: Option<GradientNoiseSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionSpec {
    /// Longest free-evolution time τ.
    pub duration_s: f64,
    pub dt_s: f64,
    pub exchange_ions: bool,
    pub e_double_prime_off: bool,
    /// [re, im] of c in ε̂′ ∝ x̂ + c·ŷ.
    pub polarization_admixture: [f64; 2],
    /// Scatter the addressed ion out of the qubit at the induced + natural rate.
    pub include_loss: bool,
}

impl Default for EvolutionSpec {
    fn default() -> Self {
        EvolutionSpec {
            duration_s: 10.0,
            dt_s: 1e-3,
            exchange_ions: false,
            e_double_prime_off: false,
            polarization_admixture: [0.0, 0.0],
            include_loss: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasurementSpec {
    /// Explicit τ grid; otherwise `points` evenly spaced up to evolution.duration_s.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times_s: Option<Vec<f64>>,
    pub points: usize,
    pub shots_per_point: u64,
    pub trajectories_per_point: u64,
    pub preparation_fidelity: f64,
    pub projection_noise: bool,
    /// Defaults to the prepared Bell phase.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readout_phase_rad: Option<f64>,
}

impl Default for MeasurementSpec {
    fn default() -> Self {
        MeasurementSpec {
            times_s: None,
            points: 20,
            shots_per_point: 1000,
            trajectories_per_point: 20,
            preparation_fidelity: 1.0,
            projection_noise: true,
            readout_phase_rad: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanSpec {
    /// |ε^PNC| in units of e·a₀·10⁻¹¹.
    pub eps_pnc_1e11_ea0: f64,
    /// Defaults to fields.e_prime.amplitude_v_per_m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_field_v_per_m: Option<f64>,
    pub efficiency: f64,
    pub n_measurements: f64,
    pub n_ions: f64,
    pub tau_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_snr: Option<f64>,
}

impl Default for PlanSpec {
    fn default() -> Self {
        PlanSpec {
            eps_pnc_1e11_ea0: 2.17,
            e_field_v_per_m: None,
            efficiency: 0.95,
            n_measurements: 1e4,
            n_ions: 2.0,
            tau_s: 1.0,
            target_snr: Some(1000.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSpec {
    /// Single-ion Δλ/2π; defaults to the scenario's static value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freq_hz: Option<f64>,
    pub points: usize,
    pub t_max_s: f64,
    pub shots_per_point: u64,
    pub repetitions: usize,
    pub confidence: f64,
}

impl Default for ScalingSpec {
    fn default() -> Self {
        ScalingSpec { freq_hz: None, points: 20, t_max_s: 10.0, shots_per_point: 1000, repetitions: 200, confidence: 0.95 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Relative to the working directory; `--out` takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

// ---------------------------------------------------------------------------
// Parsing and overrides
// ---------------------------------------------------------------------------

/// A `key.path=value` override. The value is read as a TOML literal, falling back to a
/// bare string.
pub fn parse_override(s: &str) -> Result<(Vec<String>, toml::Value)> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{s}` is not key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(str::to_string).collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override key `{key}` has an empty segment")));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key just parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    Ok((path, value))
}

fn apply_override(table: &mut toml::Table, path: &[String], value: toml::Value) -> Result<()> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = table;
    for (i, seg) in parents.iter().enumerate() {
        let entry = cur.entry(seg.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override: `{}` is not a table", path[..=i].join("."))))?;
    }
    cur.insert(last.clone(), value);
    Ok(())
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string().trim_end().to_string())
}

impl Scenario {
    /// Parses scenario text and applies `key=value` overrides in order.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            // Direct parse keeps line/column diagnostics.
            return toml::from_str(text).map_err(config_error);
        }
        let file: toml::Table = toml::from_str(text).map_err(config_error)?;
        // Merged over the defaults so an override may target a section the file omits.
        let mut table = toml::Table::try_from(Scenario::default()).expect("defaults serialize");
        merge(&mut table, file);
        for o in overrides {
            let (path, value) = parse_override(o)?;
            apply_override(&mut table, &path, value)?;
        }
        serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    /// Canonical JSON (sorted keys), the input of the scenario hash.
    pub fn canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("scenario serializes");
        serde_json::to_string(&v).expect("value serializes")
    }
}

/// A parsed scenario with its resolved atomic data.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    /// Directory relative paths resolve against.
    pub base_dir: PathBuf,
    pub data: AtomicData,
    /// sha256 over the canonical scenario and the atomic-data document, hex.
    pub hash: String,
}

impl LoadedScenario {
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_text(&text, &base, overrides)
    }

    pub fn from_text(text: &str, base_dir: &Path, overrides: &[String]) -> Result<Self> {
        Self::new(Scenario::parse(text, overrides)?, base_dir)
    }

    pub fn new(scenario: Scenario, base_dir: &Path) -> Result<Self> {
        let spec = &scenario.atomic_data;
        let raw = if spec.path == BUILTIN_BA138 {
            AtomicData::reference_ba138()
        } else {
            let p = base_dir.join(&spec.path);
            if !p.exists() {
                return Err(Error::Config(format!("atomic_data.path `{}` does not exist", p.display())));
            }
            AtomicData::load(&p)?
        };
        let data = raw.with_pnc_scaled(spec.pnc_scale).with_linewidths_scaled(spec.linewidth_scale);
        let mut h = Sha256::new();
        h.update(scenario.canonical_json().as_bytes());
        h.update(b"\n");
        h.update(raw.to_json().as_bytes());
        let hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        let loaded = LoadedScenario { scenario, base_dir: base_dir.to_path_buf(), data, hash };
        loaded.validate()?;
        Ok(loaded)
    }

    /// Range and consistency checks beyond what the types enforce.
    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        let finite_pos = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite and > 0, got {x}")))
            }
        };
        if !s.atomic_data.pnc_scale.is_finite() {
            return Err(Error::Config("atomic_data.pnc_scale must be finite".into()));
        }
        finite_pos("atomic_data.linewidth_scale", s.atomic_data.linewidth_scale)?;
        self.trap().validate()?;
        self.scheme()?;
        for f in self.fields() {
            f.validate()?;
        }
        finite_pos("evolution.duration_s", s.evolution.duration_s)?;
        finite_pos("evolution.dt_s", s.evolution.dt_s)?;
        finite_pos("loss.resonance_guard_hz", s.loss.resonance_guard_hz)?;
        if let Some(f) = &s.loss.field {
            self.loss_fields_from(f)?;
        }
        self.noise_model().common_mode.validate("noise.common_mode")?;
        self.noise_model().gradient.validate("noise.gradient")?;
        let m = &s.measurement;
        if m.times_s.is_none() && m.points == 0 {
            return Err(Error::Config("measurement.points must be ≥ 1".into()));
        }
        if !(0.0..=1.0).contains(&m.preparation_fidelity) {
            return Err(Error::Config("measurement.preparation_fidelity must be in [0, 1]".into()));
        }
        let sc = &s.scaling;
        finite_pos("scaling.t_max_s", sc.t_max_s)?;
        if !(sc.confidence > 0.0 && sc.confidence < 1.0) {
            return Err(Error::Config("scaling.confidence must be in (0, 1)".into()));
        }
        self.snr_plan().validate()
    }

    pub fn seed(&self) -> u64 {
        self.scenario.seed
    }

    pub fn trap(&self) -> TrapConfig {
        let t = &self.scenario.trap;
        TrapConfig::two_ion(hz_to_angular(t.axial_freq_hz), t.b_field_tesla, t.b_gradient_tesla_per_m)
    }

    pub fn scheme(&self) -> Result<LevelScheme> {
        LevelScheme::even_isotope(self.scenario.levels.aux)
    }

    pub fn systematics(&self) -> Systematics {
        let e = &self.scenario.evolution;
        Systematics {
            exchange_ions: e.exchange_ions,
            e_double_prime_off: e.e_double_prime_off,
            circular_admixture: Complex64::new(e.polarization_admixture[0], e.polarization_admixture[1]),
        }
    }

    pub fn shift_options(&self) -> ShiftOptions {
        let s = self.scenario.shift;
        ShiftOptions { light_shift_mode: s.light_shift_mode, rabi_mode: s.rabi_mode }
    }

    /// E′ and E″ as configured, before systematics.
    pub fn raw_fields(&self) -> Vec<StandingWaveField> {
        let f = &self.scenario.fields;
        let build = |base: StandingWaveField, spec: &FieldSpec, default_phase: f64| {
            let mut out = StandingWaveField {
                amplitude: spec.amplitude_v_per_m,
                detuning: hz_to_angular(spec.detuning_hz),
                phase: spec.phase_rad.unwrap_or(default_phase),
                ..base
            };
            if let Some(p) = spec.polarization {
                out.polarization = normalized(p);
            }
            out
        };
        vec![
            build(StandingWaveField::e_prime(0.0), &f.e_prime, 0.0),
            build(StandingWaveField::e_double_prime(0.0), &f.e_double_prime, FRAC_PI_2),
        ]
    }

    /// Fields seen by the addressed ion, with the systematic toggles applied.
    pub fn fields(&self) -> Vec<StandingWaveField> {
        self.systematics().apply(&self.raw_fields())
    }

    fn loss_fields_from(&self, f: &LossFieldSpec) -> Result<Vec<StandingWaveField>> {
        let mut field = StandingWaveField::e_prime(f.amplitude_v_per_m);
        field.detuning = hz_to_angular(f.detuning_hz);
        field.polarization = normalized(f.polarization);
        field.validate()?;
        Ok(vec![field])
    }

    /// Fields entering the loss table.
    pub fn loss_fields(&self) -> Result<Vec<StandingWaveField>> {
        match &self.scenario.loss.field {
            Some(f) => self.loss_fields_from(f),
            None => Ok(self.fields()),
        }
    }

    pub fn loss_options(&self) -> LossOptions {
        LossOptions {
            branches: self.scenario.loss.branches,
            resonance_guard: hz_to_angular(self.scenario.loss.resonance_guard_hz),
        }
    }

    pub fn noise_model(&self) -> NoiseModel {
        let n = &self.scenario.noise;
        let common = n.common_mode.map_or(ProcessSpec::off(), |c| ProcessSpec {
            kind: c.kind,
            amplitude: c.amplitude_tesla,
            correlation_time: c.correlation_time_s,
        });
        let gradient = n.gradient.map_or(ProcessSpec::off(), |g| ProcessSpec {
            kind: g.kind,
            amplitude: g.amplitude_tesla_per_m,
            correlation_time: g.correlation_time_s,
        });
        NoiseModel { common_mode: common, gradient, seed: self.scenario.seed }
    }

    /// Ramsey τ grid.
    pub fn times(&self) -> Vec<f64> {
        let m = &self.scenario.measurement;
        match &m.times_s {
            Some(t) => t.clone(),
            None => even_grid(self.scenario.evolution.duration_s, m.points),
        }
    }

    pub fn snr_plan(&self) -> SnrPlan {
        let p = &self.scenario.plan;
        SnrPlan {
            eps_pnc: p.eps_pnc_1e11_ea0 * 1e-11 * EA0,
            e_field: p.e_field_v_per_m.unwrap_or(self.scenario.fields.e_prime.amplitude_v_per_m),
            efficiency: p.efficiency,
            n_measurements: p.n_measurements,
            n_ions: p.n_ions,
            tau: p.tau_s,
        }
    }
}

/// `points` times t_max·(i+1)/points, i = 0..points.
pub fn even_grid(t_max: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|i| t_max * i as f64 / points as f64).collect()
}

fn normalized(p: [f64; 3]) -> [Complex64; 3] {
    let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    // A zero vector stays zero and fails field validation.
    let k = if n > 0.0 { 1.0 / n } else { 0.0 };
    p.map(|x| Complex64::new(x * k, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    const MINIMAL: &str = r#"
seed = 7
[trap]
axial_freq_hz = 1.0e6
b_field_tesla = 1.0e-4
"#;

    fn load(text: &str, ov: &[&str]) -> Result<LoadedScenario> {
        let ov: Vec<String> = ov.iter().map(|s| s.to_string()).collect();
        LoadedScenario::from_text(text, Path::new("."), &ov)
    }

    #[test]
    fn defaults_fill_in() {
        let l = load(MINIMAL, &[]).unwrap();
        assert_eq!(l.seed(), 7);
        assert_eq!(l.scenario.fields.e_prime.amplitude_v_per_m, 2e6);
        let f = l.fields();
        assert_eq!(f[1].phase, FRAC_PI_2);
        assert_eq!(l.times().len(), 20);
        assert_eq!(*l.times().last().unwrap(), 10.0);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = format!("{MINIMAL}bogus_key = 1\n");
        let msg = load(&text, &[]).unwrap_err().to_string();
        assert!(msg.contains("bogus_key") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn unknown_override_key_reports_path() {
        let msg = load(MINIMAL, &["trap.colour=3"]).unwrap_err().to_string();
        assert!(msg.contains("trap") && msg.contains("colour"), "{msg}");
    }

    #[test]
    fn overrides_apply_and_change_hash() {
        let a = load(MINIMAL, &[]).unwrap();
        let b = load(MINIMAL, &["fields.e_prime.amplitude_v_per_m=1.6e6", "evolution.exchange_ions=true"]).unwrap();
        assert_eq!(b.scenario.fields.e_prime.amplitude_v_per_m, 1.6e6);
        assert!(b.systematics().exchange_ions);
        assert_ne!(a.hash, b.hash);
        assert_eq!(a.hash, load(MINIMAL, &[]).unwrap().hash);
        assert_eq!(a.hash.len(), 64);
    }

    #[test]
    fn string_override_fallback() {
        let l = load(MINIMAL, &["shift.light_shift_mode=dressed"]).unwrap();
        assert_eq!(l.shift_options().light_shift_mode, LightShiftMode::Dressed);
    }

    #[test]
    fn missing_data_file_is_config_error() {
        let e = load(MINIMAL, &["atomic_data.path=\"nope.json\""]).unwrap_err();
        assert!(matches!(e, Error::Config(_)), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn range_checks() {
        assert!(load(MINIMAL, &["evolution.dt_s=0"]).is_err());
        assert!(load(MINIMAL, &["measurement.preparation_fidelity=1.5"]).is_err());
        assert!(load(MINIMAL, &["fields.e_prime.polarization=[0,0,0]"]).is_err());
        assert!(parse_override("novalue").is_err());
    }

    #[test]
    fn units_convert_to_si() {
        let l = load(MINIMAL, &["fields.e_prime.detuning_hz=10", "fields.e_double_prime.detuning_hz=10"]).unwrap();
        assert!((l.fields()[0].detuning - TAU * 10.0).abs() < 1e-12);
        assert!((l.trap().axial_freq - TAU * 1e6).abs() < 1e-6);
        assert!((l.snr_plan().eps_pnc / EA0 - 2.17e-11).abs() < 1e-24);
    }

    #[test]
    fn canonical_json_round_trips() {
        let l = load(MINIMAL, &["loss.levels=[\"6S1/2 m=-1/2\"]"]).unwrap();
        let back: Scenario = serde_json::from_str(&l.scenario.canonical_json()).unwrap();
        assert_eq!(back, l.scenario);
    }
}
