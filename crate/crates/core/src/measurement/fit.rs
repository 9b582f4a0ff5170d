use std::f64::consts::{PI, TAU};

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::storage::Owned;
use nalgebra::{DVector, Dyn, Matrix3, OMatrix, Vector3, U3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fitted A·cos(2πft + φ) with 1σ uncertainties from the weighted fit covariance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyFit {
    pub freq: f64,
    pub sigma: f64,
    pub amplitude: f64,
    pub sigma_amplitude: f64,
    pub phase: f64,
    pub chi2: f64,
    pub evaluations: usize,
}

/// Per-point variance of a parity mean over `shots` ±1 outcomes.
pub fn parity_variance(p: f64, shots: u64) -> f64 {
    let n = shots as f64;
    (1.0 - p * p).max(1.0 / n) / n
}

struct Sinusoid<'a> {
    t: &'a [f64],
    y: &'a [f64],
    inv_sigma: Vec<f64>,
    p: Vector3<f64>,
}

impl Sinusoid<'_> {
    fn model(&self, t: f64) -> f64 {
        self.p[0] * (TAU * self.p[1] * t + self.p[2]).cos()
    }
}

impl LeastSquaresProblem<f64, Dyn, U3> for Sinusoid<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, U3>;
    type ParameterStorage = Owned<f64, U3>;

    fn set_params(&mut self, p: &Vector3<f64>) {
        self.p.copy_from(p);
    }

    fn params(&self) -> Vector3<f64> {
        self.p
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        Some(DVector::from_iterator(
            self.t.len(),
            (0..self.t.len()).map(|i| (self.model(self.t[i]) - self.y[i]) * self.inv_sigma[i]),
        ))
    }

    fn jacobian(&self) -> Option<OMatrix<f64, Dyn, U3>> {
        let [a, f, ph] = [self.p[0], self.p[1], self.p[2]];
        let mut j = OMatrix::<f64, Dyn, U3>::zeros(self.t.len());
        for (i, &t) in self.t.iter().enumerate() {
            let (s, c) = (TAU * f * t + ph).sin_cos();
            let w = self.inv_sigma[i];
            j[(i, 0)] = c * w;
            j[(i, 1)] = -a * s * TAU * t * w;
            j[(i, 2)] = -a * s * w;
        }
        Some(j)
    }
}

/// Weighted linear fit y ≈ a·cos + b·sin at fixed f; returns (SSR, amplitude, phase).
fn linear_at(f: f64, t: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let (mut cc, mut ss, mut cs, mut yc, mut ys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..t.len() {
        let (s, c) = (TAU * f * t[i]).sin_cos();
        cc += w[i] * c * c;
        ss += w[i] * s * s;
        cs += w[i] * c * s;
        yc += w[i] * y[i] * c;
        ys += w[i] * y[i] * s;
    }
    let det = cc * ss - cs * cs;
    if det.abs() < 1e-300 {
        return (f64::INFINITY, 0.0, 0.0);
    }
    let a = (yc * ss - ys * cs) / det;
    let b = (ys * cc - yc * cs) / det;
    let ssr: f64 = (0..t.len())
        .map(|i| {
            let (s, c) = (TAU * f * t[i]).sin_cos();
            w[i] * (y[i] - a * c - b * s).powi(2)
        })
        .sum();
    // a cos + b sin = A cos(x + φ) with A = |a − ib|, φ = arg(a + ib)·(−1)
    (ssr, a.hypot(b), (-b).atan2(a))
}

/// Periodogram-style scan over (0, Nyquist] with 8× oversampling of the 1/span resolution.
fn grid_search(t: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let span = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - t.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut sorted = t.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min_gap = sorted.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
    let f_max = 0.5 / min_gap;
    let df = 1.0 / (8.0 * span);
    let n = (f_max / df).ceil() as usize;
    let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
    for k in 1..=n {
        let f = k as f64 * df;
        let (ssr, a, ph) = linear_at(f, t, y, w);
        if ssr < best.0 {
            best = (ssr, f, a, ph);
        }
    }
    (best.1, best.2, best.3)
}

fn wrap_phase(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

const MAX_EVALUATIONS: usize = 400;

/// Weighted nonlinear least-squares fit of A·cos(2πft + φ) to parity means.
///
/// Weights come from shot statistics, first with the data, then with the pass-1 model.
pub fn fit_frequency(times: &[f64], parities: &[f64], shots_per_point: u64) -> Result<FrequencyFit> {
    if times.len() != parities.len() {
        return Err(Error::Usage("times and parities differ in length".into()));
    }
    if times.len() < 5 {
        return Err(Error::Usage(format!("need at least 5 points, got {}", times.len())));
    }
    if shots_per_point == 0 {
        return Err(Error::Usage("shots_per_point must be ≥ 1".into()));
    }
    if times.iter().chain(parities).any(|x| !x.is_finite()) {
        return Err(Error::Usage("non-finite time or parity".into()));
    }
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|p| p[1] == p[0]) {
        return Err(Error::Usage("time points must be distinct".into()));
    }
    let span = sorted[sorted.len() - 1] - sorted[0];
    let hi = parities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = parities.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi - lo < 1e-9 {
        return Err(Error::Fit(format!("flat data (all parities ≈ {hi}); no frequency to fit")));
    }

    let inv = |vars: Vec<f64>| -> Vec<f64> { vars.into_iter().map(|v| 1.0 / v.sqrt()).collect() };
    let mut inv_sigma = inv(parities.iter().map(|&p| parity_variance(p, shots_per_point)).collect());
    let w: Vec<f64> = inv_sigma.iter().map(|s| s * s).collect();
    let (f0, a0, ph0) = grid_search(times, parities, &w);
    if !(a0 > 1e-12) {
        return Err(Error::Fit("no oscillation found in the frequency scan (flat data)".into()));
    }

    let mut p = Vector3::new(a0, f0, ph0);
    let mut evaluations = 0;
    let mut problem = None;
    for _ in 0..2 {
        let prob = Sinusoid { t: times, y: parities, inv_sigma: inv_sigma.clone(), p };
        let (prob, report) = LevenbergMarquardt::new().with_patience(MAX_EVALUATIONS).minimize(prob);
        evaluations += report.number_of_evaluations;
        if !report.termination.was_successful() {
            return Err(Error::Fit(format!(
                "Levenberg–Marquardt stopped: {:?} after {} evaluations from f₀ = {f0} Hz, A₀ = {a0}",
                report.termination, report.number_of_evaluations
            )));
        }
        p = prob.p;
        inv_sigma = inv(times.iter().map(|&t| parity_variance(prob.model(t), shots_per_point)).collect());
        problem = Some(prob);
    }
    let prob = problem.expect("two passes ran");
    let prob = Sinusoid { inv_sigma, ..prob };
    let j = prob.jacobian().expect("analytic jacobian");
    let r = prob.residuals().expect("analytic residuals");
    let jtj: Matrix3<f64> = j.transpose() * &j;
    let cov = jtj
        .try_inverse()
        .ok_or_else(|| Error::Fit(format!("singular fit covariance at f = {} Hz", p[1])))?;

    let (mut a, f, mut ph) = (p[0], p[1], p[2]);
    if a < 0.0 {
        a = -a;
        ph += PI;
    }
    let sigma = cov[(1, 1)].sqrt();
    let sigma_amplitude = cov[(0, 0)].sqrt();
    if !(f > 0.0) || !sigma.is_finite() {
        return Err(Error::Fit(format!("fit converged to a non-physical frequency {f} Hz")));
    }
    if a < 3.0 * sigma_amplitude {
        return Err(Error::Fit(format!("amplitude {a:.3e} not significant (σ = {sigma_amplitude:.3e})")));
    }
    if span * f < 0.25 {
        return Err(Error::Usage(format!(
            "time span {span} s covers less than a quarter period at {f} Hz"
        )));
    }
    Ok(FrequencyFit {
        freq: f,
        sigma,
        amplitude: a,
        sigma_amplitude,
        phase: wrap_phase(ph),
        chi2: r.norm_squared(),
        evaluations,
    })
}

/// Cramér–Rao bound on f for A·cos(2πft + φ) parity data with φ unknown and A known.
pub fn cramer_rao_sigma(times: &[f64], shots: u64, amplitude: f64, freq: f64, phase: f64) -> f64 {
    let (mut fff, mut ffp, mut fpp) = (0.0, 0.0, 0.0);
    for &t in times {
        let x = TAU * freq * t + phase;
        let (s, c) = x.sin_cos();
        let denom = 1.0 - amplitude * amplitude * c * c;
        // Per-shot information (∂p)²/(1 − p²); the A = 1 limit at sin x = 0 is 1.
        let g = if denom < 1e-15 { 1.0 } else { amplitude * amplitude * s * s / denom };
        fff += g * (TAU * t).powi(2);
        ffp += g * TAU * t;
        fpp += g;
    }
    let n = shots as f64;
    let det = n * n * (fff * fpp - ffp * ffp);
    (n * fpp / det).sqrt()
}
