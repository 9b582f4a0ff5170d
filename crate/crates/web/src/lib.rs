//! Browser bindings: three parameter sweeps returned as JSON strings for the static page
//! in `www/`.

use std::path::Path;

use pnc_core::commands::{addressed_shift, evolution_scenario, prepare, ramsey_settings};
use pnc_core::measurement::run_ramsey;
use pnc_core::noise::loss_rate;
use pnc_core::scenario::{even_grid, LoadedScenario};
use pnc_core::Result;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn scenario(overrides: Vec<String>) -> Result<LoadedScenario> {
    LoadedScenario::from_text("", Path::new("."), &overrides)
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

fn parity_curve_impl(e_prime: f64, gradient_noise: f64, t_max: f64, points: usize, shots: u64, seed: u64) -> Result<String> {
    let mut ov = vec![
        format!("seed={seed}"),
        format!("fields.e_prime.amplitude_v_per_m={e_prime:e}"),
        format!("evolution.duration_s={t_max:e}"),
        format!("measurement.points={points}"),
        format!("measurement.shots_per_point={shots}"),
        "measurement.trajectories_per_point=10".into(),
    ];
    if gradient_noise > 0.0 {
        ov.push(format!("noise.gradient.amplitude_tesla_per_m={gradient_noise:e}"));
    }
    let l = scenario(ov)?;
    let prep = prepare(&l)?;
    let set = ramsey_settings(&l, prep.alpha);
    let sc = evolution_scenario(&l, t_max)?;
    let r = run_ramsey(&prep.state, &sc, &set)?;
    Ok(serde_json::to_string(&r).expect("result serializes"))
}

/// Simulated Ramsey parity points and the fitted frequency.
#[wasm_bindgen]
pub fn parity_curve(
    e_prime: f64,
    gradient_noise: f64,
    t_max: f64,
    points: usize,
    shots: u32,
    seed: u32,
) -> std::result::Result<String, JsError> {
    js(parity_curve_impl(e_prime, gradient_noise, t_max, points, shots.into(), seed.into()))
}

fn shift_vs_field_impl(e_max: f64, e_double_prime: f64, points: usize, admixture: f64) -> Result<String> {
    let mut e = Vec::with_capacity(points + 1);
    let mut larmor = Vec::with_capacity(points + 1);
    for i in 0..=points {
        let e0 = e_max * i as f64 / points.max(1) as f64;
        let l = scenario(vec![
            format!("fields.e_prime.amplitude_v_per_m={e0:e}"),
            format!("fields.e_double_prime.amplitude_v_per_m={e_double_prime:e}"),
            format!("evolution.polarization_admixture=[0.0, {admixture:e}]"),
        ])?;
        e.push(e0);
        larmor.push(addressed_shift(&l)?.larmor_shift_hz());
    }
    Ok(json!({ "e_prime_v_per_m": e, "larmor_shift_hz": larmor }).to_string())
}

/// Larmor shift of the addressed ion versus E′₀; `admixture` is the circular ŷ component.
#[wasm_bindgen]
pub fn shift_vs_field(e_max: f64, e_double_prime: f64, points: usize, admixture: f64) -> std::result::Result<String, JsError> {
    js(shift_vs_field_impl(e_max, e_double_prime, points, admixture))
}

fn loss_vs_field_impl(e_max: f64, points: usize, along_axis: bool) -> Result<String> {
    let pol = if along_axis { "[0.0, 0.0, 1.0]" } else { "[1.0, 0.0, 0.0]" };
    let base = scenario(vec![])?;
    let levels = base.scenario.loss.levels.clone();
    let mut rates = vec![Vec::with_capacity(points + 1); levels.len()];
    let e = even_grid(e_max, points);
    for &e0 in &e {
        let l = scenario(vec![
            format!("loss.field.amplitude_v_per_m={e0:e}"),
            format!("loss.field.polarization={pol}"),
        ])?;
        let fields = l.loss_fields()?;
        for (row, &level) in rates.iter_mut().zip(&levels) {
            row.push(fields.iter().map(|f| loss_rate(level, f, &l.data, l.loss_options())).sum::<Result<f64>>()?);
        }
    }
    let labels: Vec<String> = levels.iter().map(ToString::to_string).collect();
    Ok(json!({
        "e_prime_v_per_m": e,
        "levels": labels,
        "rates_per_s": rates,
        "natural_decay_per_s": base.data.d32_decay_rate,
    })
    .to_string())
}

/// Induced loss rate per level versus field amplitude.
#[wasm_bindgen]
pub fn loss_vs_field(e_max: f64, points: usize, along_axis: bool) -> std::result::Result<String, JsError> {
    js(loss_vs_field_impl(e_max, points, along_axis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn parity_curve_fits_near_injected() {
        let v: Value = serde_json::from_str(&parity_curve_impl(2e6, 0.0, 10.0, 20, 1000, 1).unwrap()).unwrap();
        let (f, s) = (v["fitted_freq"].as_f64().unwrap(), v["fitted_freq_sigma"].as_f64().unwrap());
        assert!((f - v["injected_freq"].as_f64().unwrap()).abs() < 5.0 * s);
        assert_eq!(v["times"].as_array().unwrap().len(), 20);
    }

    #[test]
    fn shift_is_linear_in_field() {
        let v: Value = serde_json::from_str(&shift_vs_field_impl(2e6, 1e4, 4, 0.0).unwrap()).unwrap();
        let l: Vec<f64> = v["larmor_shift_hz"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(l[0], 0.0);
        assert!((l[4] / l[2] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn loss_is_quadratic_in_field() {
        let v: Value = serde_json::from_str(&loss_vs_field_impl(2e6, 2, true).unwrap()).unwrap();
        let r = v["rates_per_s"][0].as_array().unwrap();
        assert!((r[1].as_f64().unwrap() / r[0].as_f64().unwrap() - 4.0).abs() < 1e-12);
    }
}
