//! Scenario-driven runs behind the command-line subcommands. Each returns the JSON
//! summary and, where there is plot data, a CSV table; both carry the tool version and
//! scenario hash. Nothing time- or host-dependent is written, so a fixed scenario and
//! seed reproduce the bytes exactly.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::evolution::{phase_rate, EvolutionScenario};
use crate::lightshift::{shift_report, ShiftReport};
use crate::measurement::{
    measurements_for_snr, run_ramsey, scaling_experiment, scaling_ratio, snr_estimate, RamseySettings,
    ScalingParams, ScalingResult, SnrPlan,
};
use crate::noise::{loss_rate, total_loss_channel, Branches, LossChannel, LossOptions};
use crate::pulse::{bell_basis, prepare_bell, BellPreparation};
use crate::quantum::{IonIndex, Level};
use crate::scenario::{even_grid, LoadedScenario};
use crate::units::angular_to_hz;

pub const TOOL: &str = "pncsim";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Files produced by one subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub command: &'static str,
    pub json: String,
    pub csv: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'a str,
    version: &'a str,
    scenario_hash: &'a str,
    seed: u64,
    command: &'a str,
    result: Value,
}

/// A CSV cell: numbers are written with 17 significant digits.
#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

fn envelope(l: &LoadedScenario, command: &'static str, result: Value) -> String {
    let e = Envelope { tool: TOOL, version: VERSION, scenario_hash: &l.hash, seed: l.seed(), command, result };
    let mut s = serde_json::to_string_pretty(&e).expect("envelope serializes");
    s.push('\n');
    s
}

fn csv_table(l: &LoadedScenario, command: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Simulation(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(Cell::render)).map_err(io)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Simulation(e.to_string()))?)
        .expect("csv output is utf-8");
    Ok(format!("# tool={TOOL} version={VERSION} scenario_hash={} command={command}\n{body}", l.hash))
}

fn output(l: &LoadedScenario, command: &'static str, result: Value, csv: Option<String>) -> CommandOutput {
    CommandOutput { command, json: envelope(l, command, result), csv }
}

// ---------------------------------------------------------------------------

/// Light-shift report of the addressed ion.
pub fn addressed_shift(l: &LoadedScenario) -> Result<ShiftReport> {
    shift_report(&l.fields(), &l.data, l.shift_options())
}

/// Evolution settings for free precession up to `duration`.
pub fn evolution_scenario(l: &LoadedScenario, duration: f64) -> Result<EvolutionScenario> {
    let scheme = l.scheme()?;
    let e = &l.scenario.evolution;
    let loss = if e.include_loss {
        total_loss_channel(&[Level::S_DOWN, Level::S_UP], &l.fields(), &l.data, l.loss_options())?
            .on_ion(IonIndex::One)
    } else {
        LossChannel::default()
    };
    Ok(EvolutionScenario {
        duration,
        dt: e.dt_s,
        trap: l.trap(),
        larmor_per_tesla: scheme.larmor_per_tesla()?,
        shift_ion1: addressed_shift(l)?,
        shift_ion2: None,
        noise: l.noise_model(),
        loss,
        systematics: l.systematics(),
    })
}

/// Shift reports indexed by physical ion, after any exchange.
fn ion_reports(l: &LoadedScenario, lit: ShiftReport) -> [ShiftReport; 2] {
    let dark = ShiftReport::dark(l.shift_options());
    if l.systematics().exchange_ions {
        [dark, lit]
    } else {
        [lit, dark]
    }
}

fn report_json(ion: u8, r: &ShiftReport) -> Value {
    let subs: Vec<Value> = r
        .sublevels
        .iter()
        .map(|s| {
            json!({
                "m": s.m.value(),
                "omega_q_hz": angular_to_hz(s.omega_q),
                "interference_hz": angular_to_hz(s.interference),
                "omega_exact_hz": angular_to_hz(s.omega_exact),
                "omega_hz": angular_to_hz(s.omega),
                "delta_omega_hz": angular_to_hz(s.delta_omega),
                "pnc_contribution_hz": angular_to_hz(s.pnc_contribution),
            })
        })
        .collect();
    json!({
        "ion": ion,
        "sublevels": subs,
        "larmor_shift_hz": r.larmor_shift_hz(),
        "e2_residual_hz": angular_to_hz(r.e2_residual),
    })
}

/// Light shifts on both ions and the resulting Bell-state phase rate.
pub fn cmd_shift(l: &LoadedScenario) -> Result<CommandOutput> {
    let lit = addressed_shift(l).map_err(|e| e.in_stage("lightshift"))?;
    let sc = evolution_scenario(l, l.scenario.evolution.duration_s)?;
    let [r1, r2] = ion_reports(l, lit.clone());
    let larmor = r1.larmor_shift_hz() - r2.larmor_shift_hz();
    let delta_lambda = angular_to_hz(phase_rate(&sc));
    let result = json!({
        "addressed_ion": if l.systematics().exchange_ions { 2 } else { 1 },
        "detuning_hz": angular_to_hz(lit.detuning),
        "options": l.shift_options(),
        "systematics": l.systematics(),
        "ions": [report_json(1, &r1), report_json(2, &r2)],
        "larmor_shift_hz": larmor,
        "gradient_shift_hz": delta_lambda - larmor,
        "delta_lambda_hz": delta_lambda,
    });
    let mut rows = Vec::new();
    for (ion, r) in [(1, &r1), (2, &r2)] {
        for row in r.csv_rows() {
            let mut cells = vec![Cell::Int(ion)];
            cells.extend(row.iter().map(|&x| Cell::Num(x)));
            rows.push(cells);
        }
    }
    let mut header = vec!["ion"];
    header.extend(ShiftReport::csv_header().split(','));
    let csv = csv_table(l, "shift", &header, &rows)?;
    Ok(output(l, "shift", result, Some(csv)))
}

/// Laser-induced loss per level plus the natural 5D₃/₂ decay.
pub fn cmd_lossrate(l: &LoadedScenario) -> Result<CommandOutput> {
    let fields = l.loss_fields()?;
    let opts = l.loss_options();
    let near = LossOptions { branches: Branches::NearResonant, ..opts };
    let sum_over = |level: Level, o: LossOptions| -> Result<f64> {
        fields.iter().map(|f| loss_rate(level, f, &l.data, o)).sum()
    };
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut induced_sum = 0.0;
    for &level in &l.scenario.loss.levels {
        let rate = sum_over(level, opts).map_err(|e| e.in_stage("loss"))?;
        let near_rate = sum_over(level, near).map_err(|e| e.in_stage("loss"))?;
        induced_sum += rate;
        entries.push(json!({ "level": level, "rate_per_s": rate, "near_resonant_rate_per_s": near_rate }));
        rows.push(vec![Cell::Text(level.to_string()), Cell::Num(rate)]);
    }
    let natural = l.data.d32_decay_rate;
    rows.push(vec![Cell::Text("5D3/2 natural".into()), Cell::Num(natural)]);
    let result = json!({
        "field_amplitude_v_per_m": fields.iter().map(|f| f.amplitude).collect::<Vec<_>>(),
        "branches": opts.branches,
        "rows": entries,
        "natural_decay_per_s": natural,
        "induced_sum_per_s": induced_sum,
        "induced_to_natural": induced_sum / natural,
    });
    let csv = csv_table(l, "lossrate", &["level", "rate_per_s"], &rows)?;
    Ok(output(l, "lossrate", result, Some(csv)))
}

/// Five-pulse Bell preparation for the scenario's level scheme.
pub fn prepare(l: &LoadedScenario) -> Result<BellPreparation> {
    let scheme = l.scheme()?;
    let basis = bell_basis(&scheme, l.scenario.levels.fock_cutoff)?;
    prepare_bell(&basis, &scheme).map_err(|e| e.in_stage("preparation"))
}

/// Ramsey settings from the measurement block.
pub fn ramsey_settings(l: &LoadedScenario, alpha: f64) -> RamseySettings {
    let m = &l.scenario.measurement;
    RamseySettings {
        times: l.times(),
        shots_per_point: m.shots_per_point,
        trajectories_per_point: m.trajectories_per_point,
        preparation_fidelity: m.preparation_fidelity,
        readout_phase: m.readout_phase_rad.unwrap_or(alpha),
        projection_noise: m.projection_noise,
        seed: l.seed(),
    }
}

/// Prepare, evolve over the τ grid, sample the parity and fit its frequency.
pub fn cmd_ramsey(l: &LoadedScenario) -> Result<CommandOutput> {
    let prep = prepare(l)?;
    let set = ramsey_settings(l, prep.alpha);
    let t_max = set.times.iter().copied().fold(0.0, f64::max);
    let sc = evolution_scenario(l, t_max).map_err(|e| e.in_stage("evolution"))?;
    let r = run_ramsey(&prep.state, &sc, &set).map_err(|e| e.in_stage("ramsey"))?;
    let result = json!({
        "fitted_freq_hz": r.fitted_freq,
        "sigma_hz": r.fitted_freq_sigma,
        "contrast": r.contrast,
        "fitted_phase_rad": r.fitted_phase,
        "injected_freq_hz": r.injected_freq,
        "crb_sigma_hz": r.crb_sigma,
        "lost_fraction": r.lost_fraction,
        "points": r.times.len(),
        "shots_per_point": r.shots_per_point,
        "projection_noise": set.projection_noise,
        "readout_phase_rad": set.readout_phase,
        "preparation": {
            "alpha_rad": prep.alpha,
            "fidelity": prep.fidelity,
            "aux_population": prep.aux_population,
            "excited_motion_population": prep.excited_motion_population,
            "injected_fidelity": set.preparation_fidelity,
        },
    });
    let rows: Vec<Vec<Cell>> = (0..r.times.len())
        .map(|i| vec![Cell::Num(r.times[i]), Cell::Num(r.parity_estimates[i]), Cell::Num(r.stderr[i])])
        .collect();
    let csv = csv_table(l, "ramsey", &["t_s", "parity", "stderr"], &rows)?;
    Ok(output(l, "ramsey", result, Some(csv)))
}

/// Signal-to-noise plan and the measurement count for the target SNR, for N and one ion.
pub fn cmd_plan(l: &LoadedScenario) -> Result<CommandOutput> {
    let p = l.snr_plan();
    p.validate()?;
    let single = SnrPlan { n_ions: 1.0, ..p.clone() };
    let target = l.scenario.plan.target_snr;
    let n_for = |plan: &SnrPlan| target.map(|t| measurements_for_snr(t, plan)).transpose();
    let (n_multi, n_single) = (n_for(&p)?, n_for(&single)?);
    let result = json!({
        "plan": p,
        "snr": snr_estimate(&p),
        "snr_single_ion": snr_estimate(&single),
        "snr_ratio": snr_estimate(&p) / snr_estimate(&single),
        "target_snr": target,
        "n_for_target": n_multi,
        "n_for_target_single_ion": n_single,
        "experiments_ratio": n_multi.zip(n_single).map(|(a, b)| a / b),
    });
    Ok(output(l, "plan", result, None))
}

fn scaling_json(r: &ScalingResult) -> Value {
    json!({
        "n_ions": r.n_ions,
        "correlated": r.correlated,
        "mean_hz": r.mean,
        "uncertainty_hz": r.uncertainty,
        "mean_fit_sigma_hz": r.mean_fit_sigma,
    })
}

/// Monte-Carlo comparison of correlated and uncorrelated two-ion frequency estimation.
pub fn cmd_scaling(l: &LoadedScenario) -> Result<CommandOutput> {
    let s = &l.scenario.scaling;
    let freq = match s.freq_hz {
        Some(f) => f,
        None => angular_to_hz(phase_rate(&evolution_scenario(l, s.t_max_s)?)),
    };
    let params = ScalingParams {
        freq,
        times: even_grid(s.t_max_s, s.points),
        shots: s.shots_per_point,
        repetitions: s.repetitions,
        seed: l.seed(),
    };
    let stage = |e: Error| e.in_stage("scaling");
    let single = scaling_experiment(1, true, &params).map_err(stage)?;
    let corr = scaling_experiment(2, true, &params).map_err(stage)?;
    let unc = scaling_experiment(2, false, &params).map_err(stage)?;
    let ratio = scaling_ratio(&unc, &corr, s.confidence)?;
    let result = json!({
        "freq_hz": freq,
        "repetitions": s.repetitions,
        "single": scaling_json(&single),
        "correlated": scaling_json(&corr),
        "uncorrelated": scaling_json(&unc),
        "ratio": ratio,
        "ratio_contains_sqrt2": ratio.contains(std::f64::consts::SQRT_2),
    });
    let rows: Vec<Vec<Cell>> = (0..s.repetitions)
        .map(|i| {
            vec![
                Cell::Int(i as i64),
                Cell::Num(single.estimates[i]),
                Cell::Num(corr.estimates[i]),
                Cell::Num(unc.estimates[i]),
            ]
        })
        .collect();
    let csv = csv_table(l, "scaling", &["repetition", "single_hz", "correlated_hz", "uncorrelated_hz"], &rows)?;
    Ok(output(l, "scaling", result, Some(csv)))
}

/// Builds every pipeline stage without running Monte Carlo.
pub fn cmd_validate(l: &LoadedScenario) -> Result<CommandOutput> {
    let prep = prepare(l)?;
    let sc = evolution_scenario(l, l.scenario.evolution.duration_s)?;
    sc.validate()?;
    ramsey_settings(l, prep.alpha).validate()?;
    l.loss_fields()?;
    let result = json!({
        "valid": true,
        "scenario": serde_json::to_value(&l.scenario).expect("scenario serializes"),
    });
    Ok(output(l, "validate", result, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn load(ov: &[&str]) -> LoadedScenario {
        let ov: Vec<String> = ov.iter().map(|s| s.to_string()).collect();
        LoadedScenario::from_text("seed = 3\n", Path::new("."), &ov).unwrap()
    }

    fn result(o: &CommandOutput) -> Value {
        serde_json::from_str::<Value>(&o.json).unwrap()["result"].clone()
    }

    #[test]
    fn envelope_and_csv_header() {
        let l = load(&[]);
        let o = cmd_shift(&l).unwrap();
        let v: Value = serde_json::from_str(&o.json).unwrap();
        assert_eq!(v["tool"], TOOL);
        assert_eq!(v["scenario_hash"], l.hash.as_str());
        let csv = o.csv.unwrap();
        let first = csv.lines().next().unwrap();
        assert!(first.starts_with("# tool=pncsim") && first.contains(&l.hash));
        assert_eq!(csv.lines().nth(1).unwrap(), "ion,m,omega_q_hz,interference_hz,delta_omega_hz");
        // 17 significant digits.
        let cell = csv.lines().nth(2).unwrap().split(',').nth(2).unwrap();
        assert_eq!(cell.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
    }

    #[test]
    fn shift_sign_flips_under_exchange() {
        let a = result(&cmd_shift(&load(&[])).unwrap())["larmor_shift_hz"].as_f64().unwrap();
        let b = result(&cmd_shift(&load(&["evolution.exchange_ions=true"])).unwrap())["larmor_shift_hz"]
            .as_f64()
            .unwrap();
        assert!(a > 0.1 && a < 0.3, "{a}");
        assert_eq!(a, -b);
    }

    #[test]
    fn zero_pnc_gives_zero_shift() {
        let r = result(&cmd_shift(&load(&["atomic_data.pnc_scale=0"])).unwrap());
        assert_eq!(r["larmor_shift_hz"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn lossrate_zero_field_keeps_natural_row() {
        let l = load(&["loss.field.amplitude_v_per_m=0", "loss.field.polarization=[0,0,1]"]);
        let o = cmd_lossrate(&l).unwrap();
        let r = result(&o);
        for row in r["rows"].as_array().unwrap() {
            assert_eq!(row["rate_per_s"].as_f64().unwrap(), 0.0);
        }
        assert_eq!(r["natural_decay_per_s"].as_f64().unwrap(), 0.012);
        assert!(o.csv.unwrap().contains("5D3/2 natural,1.2000000000000000e-2"));
    }

    #[test]
    fn noiseless_ramsey_recovers_injected_frequency() {
        let l = load(&["measurement.projection_noise=false"]);
        let r = result(&cmd_ramsey(&l).unwrap());
        let (f, inj) = (r["fitted_freq_hz"].as_f64().unwrap(), r["injected_freq_hz"].as_f64().unwrap());
        assert!((f - inj).abs() < 1e-6, "{f} vs {inj}");
    }

    #[test]
    fn plan_ratios() {
        let r = result(&cmd_plan(&load(&[])).unwrap());
        assert_eq!(r["snr_ratio"].as_f64().unwrap(), 2.0);
        assert_eq!(r["experiments_ratio"].as_f64().unwrap(), 0.25);
    }

    #[test]
    fn validate_echoes_scenario() {
        let r = result(&cmd_validate(&load(&[])).unwrap());
        assert_eq!(r["valid"], true);
        assert_eq!(r["scenario"]["seed"], 3);
    }

    #[test]
    fn ramsey_is_deterministic() {
        let l = load(&["measurement.shots_per_point=200"]);
        assert_eq!(cmd_ramsey(&l).unwrap(), cmd_ramsey(&l).unwrap());
    }
}
