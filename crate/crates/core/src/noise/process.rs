use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds::stage_rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    #[default]
    OrnsteinUhlenbeck,
    White,
    /// One Gaussian offset per shot, constant in time.
    Static,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    /// Stationary standard deviation (T for common mode, T/m for gradient).
    pub amplitude: f64,
    /// s, used by the OU process only.
    pub correlation_time: f64,
}

impl ProcessSpec {
    pub const fn off() -> Self {
        ProcessSpec { kind: ProcessKind::OrnsteinUhlenbeck, amplitude: 0.0, correlation_time: 1e-3 }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::Config(format!("{name}.amplitude must be finite and ≥ 0")));
        }
        if self.kind == ProcessKind::OrnsteinUhlenbeck && !(self.correlation_time > 0.0) {
            return Err(Error::Config(format!("{name}.correlation_time must be > 0")));
        }
        Ok(())
    }

    /// Piecewise-constant samples, one per step of width `dt`.
    fn sample(&self, steps: usize, dt: f64, rng: &mut impl Rng) -> Vec<f64> {
        if self.amplitude == 0.0 {
            return vec![0.0; steps];
        }
        let mut normal = || -> f64 { rng.sample(StandardNormal) };
        match self.kind {
            ProcessKind::White => (0..steps).map(|_| self.amplitude * normal()).collect(),
            ProcessKind::Static => vec![self.amplitude * normal(); steps],
            ProcessKind::OrnsteinUhlenbeck => {
                let decay = (-dt / self.correlation_time).exp();
                let kick = self.amplitude * (1.0 - decay * decay).sqrt();
                let mut x = self.amplitude * normal();
                let mut out = Vec::with_capacity(steps);
                for _ in 0..steps {
                    out.push(x);
                    x = x * decay + kick * normal();
                }
                out
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Field fluctuation common to both ions.
    pub common_mode: ProcessSpec,
    /// Fluctuation of the axial gradient.
    pub gradient: ProcessSpec,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { common_mode: ProcessSpec::off(), gradient: ProcessSpec::off(), seed: 0 }
    }
}

impl NoiseModel {
    pub fn is_quiet(&self) -> bool {
        self.common_mode.amplitude == 0.0 && self.gradient.amplitude == 0.0
    }
}

/// Sampled (B_common, ∂B/∂z) fluctuations; sample k holds over [k·dt, (k+1)·dt).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BTrajectory {
    pub dt: f64,
    pub common: Vec<f64>,
    pub gradient: Vec<f64>,
}

impl BTrajectory {
    pub fn len(&self) -> usize {
        self.common.len()
    }

    pub fn is_empty(&self) -> bool {
        self.common.is_empty()
    }
}

/// Number of whole steps of `dt` in `duration`; rejects non-commensurate grids.
pub fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(duration > 0.0) || !(dt > 0.0) || !duration.is_finite() {
        return Err(Error::Config(format!("need duration > 0 and dt > 0, got {duration} and {dt}")));
    }
    let n = (duration / dt).round();
    if n < 1.0 || ((n * dt - duration) / duration).abs() > 1e-9 {
        return Err(Error::Config(format!("dt = {dt} s does not divide duration = {duration} s")));
    }
    Ok(n as usize)
}

/// Fluctuation series for trajectory 0 of the model's seed.
pub fn sample_b_trajectory(n: &NoiseModel, duration: f64, dt: f64) -> Result<BTrajectory> {
    sample_b_trajectory_indexed(n, duration, dt, 0)
}

pub fn sample_b_trajectory_indexed(n: &NoiseModel, duration: f64, dt: f64, index: u64) -> Result<BTrajectory> {
    n.common_mode.validate("noise.common_mode")?;
    n.gradient.validate("noise.gradient")?;
    for (name, p) in [("common_mode", &n.common_mode), ("gradient", &n.gradient)] {
        if p.kind == ProcessKind::OrnsteinUhlenbeck && p.amplitude > 0.0 && dt >= p.correlation_time / 10.0 {
            return Err(Error::Config(format!(
                "noise.{name}: dt = {dt} s must be below correlation_time/10 = {} s",
                p.correlation_time / 10.0
            )));
        }
    }
    let steps = step_count(duration, dt)?;
    let common = n.common_mode.sample(steps, dt, &mut stage_rng(n.seed, "noise.common", index));
    let gradient = n.gradient.sample(steps, dt, &mut stage_rng(n.seed, "noise.gradient", index));
    Ok(BTrajectory { dt, common, gradient })
}
