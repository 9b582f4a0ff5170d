use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CVec3 = [Complex64; 3];
pub type CMat3 = [[Complex64; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldLabel {
    /// E′: drives the E1_PNC amplitude, antinode at the ion.
    #[serde(rename = "E'")]
    Prime,
    /// E″: drives the E2 amplitude through its gradient, node at the ion.
    #[serde(rename = "E''")]
    DoublePrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Node,
    Antinode,
}

/// Standing-wave laser field E(r) = e^{iφ}·E₀·ε̂·s(k·n̂·r), with s = cos at an
/// antinode and s = sin at a node of the target ion (placed at r = 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandingWaveField {
    pub label: FieldLabel,
    /// V/m
    pub amplitude: f64,
    /// rad/m
    pub k: f64,
    /// Unit vector along which the wave stands.
    pub k_direction: [f64; 3],
    /// Complex unit polarization ε̂.
    pub polarization: CVec3,
    /// δ = ω₀ − ω, rad/s
    pub detuning: f64,
    pub geometry: Geometry,
    /// Optical phase φ multiplying the whole field.
    pub phase: f64,
}

/// 6S₁/₂ – 5D₃/₂ wavelength of Ba⁺ (m).
pub const S_D32_WAVELENGTH: f64 = 2.051_8e-6;

fn real(v: [f64; 3]) -> CVec3 {
    v.map(|x| Complex64::new(x, 0.0))
}

impl StandingWaveField {
    /// E′ = x̂ E′₀ cos kz.
    pub fn e_prime(amplitude: f64) -> Self {
        StandingWaveField {
            label: FieldLabel::Prime,
            amplitude,
            k: std::f64::consts::TAU / S_D32_WAVELENGTH,
            k_direction: [0.0, 0.0, 1.0],
            polarization: real([1.0, 0.0, 0.0]),
            detuning: 0.0,
            geometry: Geometry::Antinode,
            phase: 0.0,
        }
    }

    /// E″ = i ẑ E″₀ sin kx.
    pub fn e_double_prime(amplitude: f64) -> Self {
        StandingWaveField {
            label: FieldLabel::DoublePrime,
            amplitude,
            k: std::f64::consts::TAU / S_D32_WAVELENGTH,
            k_direction: [1.0, 0.0, 0.0],
            polarization: real([0.0, 0.0, 1.0]),
            detuning: 0.0,
            geometry: Geometry::Node,
            phase: FRAC_PI_2,
        }
    }

    /// E′ with a transverse admixture: ε̂ ∝ x̂ + c·ŷ.
    pub fn with_admixture(mut self, c: Complex64) -> Self {
        let n = (1.0 + c.norm_sqr()).sqrt();
        self.polarization = [
            Complex64::new(1.0 / n, 0.0),
            c / n,
            Complex64::new(0.0, 0.0),
        ];
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pn: f64 = self.polarization.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (pn - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("{:?} polarization must have unit norm, got {pn}", self.label)));
        }
        let dn: f64 = self.k_direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (dn - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("{:?} k_direction must be a unit vector", self.label)));
        }
        if !(self.amplitude >= 0.0) || !self.k.is_finite() || self.k <= 0.0 {
            return Err(Error::Config(format!("{:?} needs amplitude ≥ 0 and k > 0", self.label)));
        }
        Ok(())
    }

    fn envelope(&self, r: [f64; 3]) -> (f64, f64) {
        let arg = self.k * (0..3).map(|i| self.k_direction[i] * r[i]).sum::<f64>();
        let (s, c) = arg.sin_cos();
        match self.geometry {
            Geometry::Antinode => (c, -s),
            Geometry::Node => (s, c),
        }
    }

    fn prefactor(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

/// Complex field vector at `r` (V/m).
pub fn field_at(f: &StandingWaveField, r: [f64; 3]) -> CVec3 {
    let (s, _) = f.envelope(r);
    let a = f.prefactor() * s;
    f.polarization.map(|p| p * a)
}

/// Analytic gradient ∂E_i/∂x_j at `r` (V/m²), indexed `[i][j]`.
pub fn gradient_at(f: &StandingWaveField, r: [f64; 3]) -> CMat3 {
    let (_, ds) = f.envelope(r);
    let a = f.prefactor() * ds * f.k;
    let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = f.polarization[i] * a * f.k_direction[j];
        }
    }
    g
}
