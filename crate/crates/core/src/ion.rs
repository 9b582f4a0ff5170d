//! Physical model of the two-ion string: level structures, Zeeman shifts, trap
//! geometry, and ingestion of atomic matrix-element data.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::tensor_factor;
use crate::error::{Error, Result};
use crate::half::Half;
use crate::quantum::{Level, Term};
use crate::units::{self, BOHR_MAGNETON, EA0, EA0_SQ, HBAR};

/// Electron spin g-factor used in the Landé formula.
pub const G_ELECTRON: f64 = 2.002_319_304;

/// Landé g_J for a single-valence-electron term.
pub fn lande_g_j(term: Term) -> f64 {
    let (l, s) = match term {
        Term::S12 => (0.0, 0.5),
        Term::P12 | Term::P32 => (1.0, 0.5),
        Term::D32 | Term::D52 => (2.0, 0.5),
    };
    let j = term.j().value();
    let jj = j * (j + 1.0);
    let orbital = (jj - s * (s + 1.0) + l * (l + 1.0)) / (2.0 * jj);
    let spin = (jj + s * (s + 1.0) - l * (l + 1.0)) / (2.0 * jj);
    orbital + G_ELECTRON * spin
}

/// Hyperfine g_F from g_J (nuclear moment neglected).
pub fn lande_g_f(g_j: f64, j: Half, i: Half, f: Half) -> f64 {
    let (j, i, f) = (j.value(), i.value(), f.value());
    if f == 0.0 {
        return 0.0;
    }
    g_j * (f * (f + 1.0) + j * (j + 1.0) - i * (i + 1.0)) / (2.0 * f * (f + 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeLevel {
    pub level: Level,
    /// rad/s relative to the ground term.
    pub energy_offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub isotope: String,
    pub nuclear_spin: Half,
    pub levels: Vec<SchemeLevel>,
    pub g_factors: BTreeMap<Term, f64>,
}

impl LevelScheme {
    /// Even isotope (I = 0): 6S₁/₂ m=±1/2, the 5D₅/₂ auxiliary sublevel used in state
    /// preparation, and all 5D₃/₂ sublevels.
    pub fn even_isotope(aux: Level) -> Result<Self> {
        if aux.term != Term::D52 || aux.f.is_some() || aux.m.twice().abs() > 5 {
            return Err(Error::Config(format!("auxiliary level must be a 5D5/2 sublevel, got {aux}")));
        }
        let d32 = units::wavenumber_to_angular(4873.852);
        let d52 = units::wavenumber_to_angular(5674.807);
        let mut levels = vec![
            SchemeLevel { level: Level::S_DOWN, energy_offset: 0.0 },
            SchemeLevel { level: Level::S_UP, energy_offset: 0.0 },
        ];
        levels.extend(Term::D32.j().projections().map(|m| SchemeLevel {
            level: Level::new(Term::D32, m),
            energy_offset: d32,
        }));
        levels.push(SchemeLevel { level: aux, energy_offset: d52 });
        let g_factors = [Term::S12, Term::D32, Term::D52]
            .into_iter()
            .map(|t| (t, lande_g_j(t)))
            .collect();
        Ok(LevelScheme {
            isotope: "138Ba+".into(),
            nuclear_spin: Half::ZERO,
            levels,
            g_factors,
        })
    }

    /// Odd isotope with I = 3/2: 6S₁/₂ splits into F = 1, 2.
    pub fn hyperfine_i3_2() -> Self {
        let i = Half(3);
        let levels = [Half::from_int(1), Half::from_int(2)]
            .into_iter()
            .flat_map(|f| {
                f.projections().map(move |m| SchemeLevel {
                    level: Level::hyperfine(Term::S12, f, m),
                    energy_offset: 0.0,
                })
            })
            .collect();
        let mut g_factors = BTreeMap::new();
        g_factors.insert(Term::S12, lande_g_j(Term::S12));
        LevelScheme {
            isotope: "137Ba+".into(),
            nuclear_spin: i,
            levels,
            g_factors,
        }
    }

    /// Lowest 5D₅/₂ level present, used as the auxiliary shelving level.
    pub fn aux_level(&self) -> Option<Level> {
        self.levels.iter().map(|l| l.level).find(|l| l.term == Term::D52)
    }

    pub fn contains(&self, level: &Level) -> bool {
        self.levels.iter().any(|l| l.level == *level)
    }

    /// Effective g for a sublevel: g_J, or g_F for hyperfine levels.
    pub fn g_factor(&self, level: &Level) -> Result<f64> {
        let g_j = *self
            .g_factors
            .get(&level.term)
            .ok_or_else(|| Error::Usage(format!("no g-factor for {}", level.term)))?;
        Ok(match level.f {
            Some(f) => lande_g_f(g_j, level.term.j(), self.nuclear_spin, f),
            None => g_j,
        })
    }

    /// Linear Zeeman shift g·μ_B·m·B/ħ in rad/s.
    pub fn zeeman_shift(&self, level: &Level, b_tesla: f64) -> Result<f64> {
        if !self.contains(level) {
            return Err(Error::Usage(format!("level {level} not in scheme {}", self.isotope)));
        }
        Ok(self.g_factor(level)? * BOHR_MAGNETON * level.m.value() * b_tesla / HBAR)
    }

    /// ∂ω_L/∂B for the ground qubit m=±1/2 (rad/s per tesla).
    pub fn larmor_per_tesla(&self) -> Result<f64> {
        Ok(self.zeeman_shift(&Level::S_UP, 1.0)? - self.zeeman_shift(&Level::S_DOWN, 1.0)?)
    }
}

/// Zeeman shift of every sublevel (rad/s).
pub fn zeeman_splitting(scheme: &LevelScheme, b_tesla: f64) -> Result<BTreeMap<Level, f64>> {
    if !(b_tesla >= 0.0) {
        return Err(Error::Usage(format!("magnetic field must be ≥ 0, got {b_tesla}")));
    }
    scheme
        .levels
        .iter()
        .map(|l| Ok((l.level, scheme.zeeman_shift(&l.level, b_tesla)?)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfig {
    /// rad/s
    pub axial_freq: f64,
    /// Ion positions in metres; the trap axis is ẑ.
    pub ion_positions: [[f64; 3]; 2],
    /// tesla
    pub b_field: f64,
    pub b_direction: [f64; 3],
    /// tesla/m along the trap axis
    pub b_gradient: f64,
}

/// Mass of ¹³⁸Ba in kg.
pub const BA138_MASS: f64 = 137.905_247 * 1.660_539_066_60e-27;

/// Equilibrium separation of two singly charged ions in a harmonic axial potential.
pub fn equilibrium_separation(mass_kg: f64, axial_freq: f64) -> f64 {
    const EPS0: f64 = 8.854_187_812_8e-12;
    let e2 = units::ELEMENTARY_CHARGE * units::ELEMENTARY_CHARGE;
    (e2 / (2.0 * std::f64::consts::PI * EPS0 * mass_kg * axial_freq * axial_freq)).cbrt()
}

impl TrapConfig {
    /// Two ¹³⁸Ba⁺ ions at their equilibrium positions ±d/2, ion 1 at +d/2.
    pub fn two_ion(axial_freq: f64, b_field: f64, b_gradient: f64) -> Self {
        let d = equilibrium_separation(BA138_MASS, axial_freq);
        TrapConfig {
            axial_freq,
            ion_positions: [[0.0, 0.0, d / 2.0], [0.0, 0.0, -d / 2.0]],
            b_field,
            b_direction: [0.0, 0.0, 1.0],
            b_gradient,
        }
    }

    /// z₁ − z₂.
    pub fn separation(&self) -> f64 {
        self.ion_positions[0][2] - self.ion_positions[1][2]
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.ion_positions.iter().enumerate() {
            if p[0] != 0.0 || p[1] != 0.0 {
                return Err(Error::Config(format!("ion {} is off the trap axis", i + 1)));
            }
        }
        if self.separation().abs() <= 0.0 {
            return Err(Error::Config("ion separation must be positive".into()));
        }
        let n: f64 = self.b_direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::Config("b_direction must be a unit vector".into()));
        }
        if !(self.b_field >= 0.0) || !(self.axial_freq > 0.0) {
            return Err(Error::Config("b_field must be ≥ 0 and axial_freq > 0".into()));
        }
        Ok(())
    }

    /// Field magnitude at each ion (tesla), including the axial gradient.
    pub fn field_at_ions(&self, common_offset: f64, gradient: f64) -> [f64; 2] {
        let b = |k: usize| self.b_field + common_offset + gradient * self.ion_positions[k][2];
        [b(0), b(1)]
    }
}

// ---------------------------------------------------------------------------
// Atomic data
// ---------------------------------------------------------------------------

/// Upper bound on any |ε^PNC| component (C·m).
pub const EPS_PNC_SANITY_BOUND: f64 = 1e-9 * EA0;

/// Cartesian ε^PNC_{m′m,i} (C·m) and ε^Q_{m′m,ij} (C·m²) between 6S₁/₂ m and 5D₃/₂ m′,
/// plus the 6P data needed for off-resonant scattering. Absent entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicData {
    pub isotope: String,
    pub nuclear_spin: Half,
    /// (m_D, m_S) → vector components.
    pub eps_pnc: BTreeMap<(Half, Half), [Complex64; 3]>,
    /// (m_D, m_S) → tensor components [i][j].
    pub eps_quad: BTreeMap<(Half, Half), [[Complex64; 3]; 3]>,
    /// Reduced E1 matrix elements ⟨upper‖d‖lower⟩ (C·m).
    pub reduced_dipoles: BTreeMap<(Term, Term), f64>,
    /// (upper sublevel, lower sublevel) → ⟨γ′j′m′|d_q|γjm⟩ with q = m′ − m (C·m).
    pub dipoles_6p: BTreeMap<(Level, Level), f64>,
    /// ω_γ, rad/s.
    pub level_freqs: BTreeMap<Term, f64>,
    /// Γ_{γ′j′}, s⁻¹.
    pub linewidths: BTreeMap<Term, f64>,
    /// Natural 5D₃/₂ decay rate, s⁻¹.
    pub d32_decay_rate: f64,
    pub provenance: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UnitsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_pnc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_quad: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipoles_6p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linewidths: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d32_decay_hz: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IsotopeDoc {
    pub tag: String,
    pub nuclear_spin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub d_m: f64,
    pub s_m: f64,
    pub component: String,
    pub value: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReducedEntry {
    pub upper: String,
    pub lower: String,
    pub reduced: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SelectionRulesDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_pnc: Option<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_quad: Option<Vec<i32>>,
}

/// On-disk layout of the atomic-data file (JSON).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AtomicDataDoc {
    pub isotope: IsotopeDoc,
    #[serde(default)]
    pub units: UnitsDoc,
    #[serde(default)]
    pub levels: BTreeMap<String, f64>,
    #[serde(default)]
    pub eps_pnc: Vec<ComponentEntry>,
    #[serde(default)]
    pub eps_quad: Vec<ComponentEntry>,
    #[serde(default)]
    pub dipoles_6p: Vec<ReducedEntry>,
    #[serde(default)]
    pub linewidths: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d32_decay_hz: Option<f64>,
    /// Allowed Δm = m_D − m_S per block, checked when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection_rules: Option<SelectionRulesDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

fn unit_factor(key: &str, unit: Option<&str>, choices: &[(&str, f64)]) -> Result<f64> {
    match unit {
        None => Ok(choices[0].1),
        Some(u) => choices
            .iter()
            .find(|(name, _)| *name == u)
            .map(|(_, f)| *f)
            .ok_or_else(|| {
                let names: Vec<_> = choices.iter().map(|c| c.0).collect();
                Error::data(format!("units.{key}"), format!("unknown unit `{u}`, expected one of {names:?}"))
            }),
    }
}

fn finite(key: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::data(key, "non-finite number"))
    }
}

fn parse_axis(c: char) -> Option<usize> {
    match c {
        'x' => Some(0),
        'y' => Some(1),
        'z' => Some(2),
        _ => None,
    }
}

/// Component-wise Δm rule for Cartesian tensors quantized along ẑ.
fn component_allows(axes: &[usize], dm: i32) -> bool {
    let nz = axes.iter().filter(|&&a| a == 2).count();
    let transverse = axes.len() - nz;
    match (axes.len(), transverse) {
        (1, 0) => dm == 0,
        (1, _) => dm.abs() == 1,
        (2, 0) => dm == 0,
        (2, 1) => dm.abs() == 1,
        (2, _) => dm == 0 || dm.abs() == 2,
        _ => false,
    }
}

fn half_key(key: &str, x: f64) -> Result<Half> {
    Half::from_f64(finite(key, x)?).ok_or_else(|| Error::data(key, format!("{x} is not a half-integer")))
}

fn parse_term(key: &str, s: &str) -> Result<Term> {
    s.parse().map_err(|_| Error::data(key, format!("unknown level `{s}`")))
}

impl AtomicData {
    /// Parses and validates an atomic-data JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: AtomicDataDoc = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::data(if path.is_empty() { "<root>".to_string() } else { path }, e.into_inner().to_string())
        })?;
        AtomicData::from_document(&doc)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        AtomicData::from_json(&text)
    }

    /// Shipped ¹³⁸Ba⁺ reference dataset.
    pub fn reference_ba138() -> Self {
        AtomicData::from_json(REFERENCE_BA138_JSON).expect("shipped reference dataset is valid")
    }

    pub fn from_document(doc: &AtomicDataDoc) -> Result<Self> {
        let u = &doc.units;
        let f_levels = unit_factor(
            "levels",
            u.levels.as_deref(),
            &[("cm^-1", units::wavenumber_to_angular(1.0)), ("rad/s", 1.0)],
        )?;
        let f_pnc = unit_factor("eps_pnc", u.eps_pnc.as_deref(), &[("e a0", EA0), ("C m", 1.0)])?;
        let f_quad = unit_factor("eps_quad", u.eps_quad.as_deref(), &[("e a0^2", EA0_SQ), ("C m^2", 1.0)])?;
        let f_dip = unit_factor("dipoles_6p", u.dipoles_6p.as_deref(), &[("e a0", EA0), ("C m", 1.0)])?;
        unit_factor("linewidths", u.linewidths.as_deref(), &[("s^-1", 1.0)])?;
        unit_factor("d32_decay_hz", u.d32_decay_hz.as_deref(), &[("s^-1", 1.0)])?;

        let nuclear_spin = half_key("isotope.nuclear_spin", doc.isotope.nuclear_spin)?;
        if nuclear_spin.twice() < 0 {
            return Err(Error::data("isotope.nuclear_spin", "must be ≥ 0"));
        }

        let mut level_freqs = BTreeMap::new();
        for (name, &v) in &doc.levels {
            let key = format!("levels.{name}");
            level_freqs.insert(parse_term(&key, name)?, finite(&key, v)? * f_levels);
        }

        let rules = doc.selection_rules.clone().unwrap_or_default();

        let mut eps_pnc: BTreeMap<(Half, Half), [Complex64; 3]> = BTreeMap::new();
        for (k, e) in doc.eps_pnc.iter().enumerate() {
            let key = format!("eps_pnc[{k}]");
            let (md, ms) = (half_key(&key, e.d_m)?, half_key(&key, e.s_m)?);
            check_projection(&key, Term::D32, md)?;
            check_projection(&key, Term::S12, ms)?;
            let axes = parse_axes(&key, &e.component, 1)?;
            let dm = (md - ms).twice() / 2;
            let value = Complex64::new(finite(&key, e.value[0])?, finite(&key, e.value[1])?) * f_pnc;
            check_rule(&key, &axes, dm, value, rules.eps_pnc.as_deref())?;
            if value.norm() >= EPS_PNC_SANITY_BOUND {
                return Err(Error::data(
                    key,
                    format!("|ε^PNC| = {:e} C·m exceeds the sanity bound {:e} C·m", value.norm(), EPS_PNC_SANITY_BOUND),
                ));
            }
            eps_pnc.entry((md, ms)).or_insert([Complex64::new(0.0, 0.0); 3])[axes[0]] = value;
        }

        let mut eps_quad: BTreeMap<(Half, Half), [[Complex64; 3]; 3]> = BTreeMap::new();
        for (k, e) in doc.eps_quad.iter().enumerate() {
            let key = format!("eps_quad[{k}]");
            let (md, ms) = (half_key(&key, e.d_m)?, half_key(&key, e.s_m)?);
            check_projection(&key, Term::D32, md)?;
            check_projection(&key, Term::S12, ms)?;
            let axes = parse_axes(&key, &e.component, 2)?;
            let dm = (md - ms).twice() / 2;
            let value = Complex64::new(finite(&key, e.value[0])?, finite(&key, e.value[1])?) * f_quad;
            check_rule(&key, &axes, dm, value, rules.eps_quad.as_deref())?;
            eps_quad.entry((md, ms)).or_insert([[Complex64::new(0.0, 0.0); 3]; 3])[axes[0]][axes[1]] = value;
        }

        let mut reduced_dipoles = BTreeMap::new();
        let mut dipoles_6p = BTreeMap::new();
        for (k, e) in doc.dipoles_6p.iter().enumerate() {
            let key = format!("dipoles_6p[{k}]");
            let upper = parse_term(&format!("{key}.upper"), &e.upper)?;
            let lower = parse_term(&format!("{key}.lower"), &e.lower)?;
            if !matches!(upper, Term::P12 | Term::P32) {
                return Err(Error::data(format!("{key}.upper"), "upper level must be a 6P term"));
            }
            let reduced = finite(&key, e.reduced)? * f_dip;
            reduced_dipoles.insert((upper, lower), reduced);
            for mp in upper.j().projections() {
                for m in lower.j().projections() {
                    let q = mp - m;
                    if q.twice().abs() > 2 {
                        continue;
                    }
                    let ang = tensor_factor(upper.j(), mp, Half::from_int(1), q, lower.j(), m);
                    if ang != 0.0 {
                        dipoles_6p.insert((Level::new(upper, mp), Level::new(lower, m)), reduced * ang);
                    }
                }
            }
        }

        let mut linewidths = BTreeMap::new();
        for (name, &v) in &doc.linewidths {
            let key = format!("linewidths.{name}");
            let v = finite(&key, v)?;
            if v < 0.0 {
                return Err(Error::data(key, "linewidth must be ≥ 0"));
            }
            linewidths.insert(parse_term(&key, name)?, v);
        }

        let d32_decay_rate = finite("d32_decay_hz", doc.d32_decay_hz.unwrap_or(0.0))?;
        if d32_decay_rate < 0.0 {
            return Err(Error::data("d32_decay_hz", "decay rate must be ≥ 0"));
        }

        Ok(AtomicData {
            isotope: doc.isotope.tag.clone(),
            nuclear_spin,
            eps_pnc,
            eps_quad,
            reduced_dipoles,
            dipoles_6p,
            level_freqs,
            linewidths,
            d32_decay_rate,
            provenance: doc.provenance.clone(),
        })
    }

    /// Document in SI units; `from_document` of the result reproduces `self` bit-exactly.
    pub fn to_document(&self) -> AtomicDataDoc {
        let axis = ['x', 'y', 'z'];
        let mut eps_pnc = Vec::new();
        for (&(md, ms), v) in &self.eps_pnc {
            for (a, c) in v.iter().enumerate() {
                if *c != Complex64::new(0.0, 0.0) {
                    eps_pnc.push(ComponentEntry {
                        d_m: md.value(),
                        s_m: ms.value(),
                        component: axis[a].to_string(),
                        value: [c.re, c.im],
                    });
                }
            }
        }
        let mut eps_quad = Vec::new();
        for (&(md, ms), t) in &self.eps_quad {
            for (a, row) in t.iter().enumerate() {
                for (b, c) in row.iter().enumerate() {
                    if *c != Complex64::new(0.0, 0.0) {
                        eps_quad.push(ComponentEntry {
                            d_m: md.value(),
                            s_m: ms.value(),
                            component: format!("{}{}", axis[a], axis[b]),
                            value: [c.re, c.im],
                        });
                    }
                }
            }
        }
        AtomicDataDoc {
            isotope: IsotopeDoc {
                tag: self.isotope.clone(),
                nuclear_spin: self.nuclear_spin.value(),
            },
            units: UnitsDoc {
                levels: Some("rad/s".into()),
                eps_pnc: Some("C m".into()),
                eps_quad: Some("C m^2".into()),
                dipoles_6p: Some("C m".into()),
                linewidths: Some("s^-1".into()),
                d32_decay_hz: Some("s^-1".into()),
            },
            levels: self.level_freqs.iter().map(|(t, v)| (t.label().to_string(), *v)).collect(),
            eps_pnc,
            eps_quad,
            dipoles_6p: self
                .reduced_dipoles
                .iter()
                .map(|((u, l), r)| ReducedEntry {
                    upper: u.label().into(),
                    lower: l.label().into(),
                    reduced: *r,
                })
                .collect(),
            linewidths: self.linewidths.iter().map(|(t, v)| (t.label().to_string(), *v)).collect(),
            d32_decay_hz: Some(self.d32_decay_rate),
            selection_rules: None,
            provenance: self.provenance.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    /// Copy with every ε^PNC entry multiplied by `k` (zeroing, sign flips, scaling studies).
    pub fn with_pnc_scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        for v in out.eps_pnc.values_mut() {
            for c in v.iter_mut() {
                *c *= k;
            }
        }
        out
    }

    /// Copy with every 6P linewidth multiplied by `k`.
    pub fn with_linewidths_scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.linewidths.values_mut().for_each(|g| *g *= k);
        out
    }

    pub fn pnc_vector(&self, md: Half, ms: Half) -> [Complex64; 3] {
        self.eps_pnc.get(&(md, ms)).copied().unwrap_or([Complex64::new(0.0, 0.0); 3])
    }

    pub fn quad_tensor(&self, md: Half, ms: Half) -> [[Complex64; 3]; 3] {
        self.eps_quad
            .get(&(md, ms))
            .copied()
            .unwrap_or([[Complex64::new(0.0, 0.0); 3]; 3])
    }
}

fn check_projection(key: &str, term: Term, m: Half) -> Result<()> {
    if m.twice().abs() > term.j().twice() || (term.j().twice() - m.twice()) % 2 != 0 {
        return Err(Error::data(key, format!("m = {m} is not a sublevel of {term}")));
    }
    Ok(())
}

fn parse_axes(key: &str, comp: &str, rank: usize) -> Result<Vec<usize>> {
    let axes: Option<Vec<usize>> = comp.chars().map(parse_axis).collect();
    match axes {
        Some(a) if a.len() == rank => Ok(a),
        _ => Err(Error::data(
            format!("{key}.component"),
            format!("`{comp}` is not a rank-{rank} Cartesian component"),
        )),
    }
}

fn check_rule(key: &str, axes: &[usize], dm: i32, value: Complex64, declared: Option<&[i32]>) -> Result<()> {
    if value == Complex64::new(0.0, 0.0) {
        return Ok(());
    }
    if !component_allows(axes, dm) {
        return Err(Error::data(key, format!("Δm = {dm} forbidden for this Cartesian component")));
    }
    if let Some(allowed) = declared {
        if !allowed.contains(&dm) {
            return Err(Error::data(key, format!("Δm = {dm} outside the declared selection rule {allowed:?}")));
        }
    }
    Ok(())
}

pub const REFERENCE_BA138_JSON: &str = include_str!("../data/ba138.json");
