use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pnc_core::commands::{self, CommandOutput};
use pnc_core::scenario::LoadedScenario;
use pnc_core::Error;

/// Two-ion Ba⁺ parity-nonconservation light-shift simulator.
#[derive(Parser)]
#[command(name = "pncsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Light shifts of both ions and the Bell-state phase rate.
    Shift(Common),
    /// Laser-induced loss rate per level.
    Lossrate(Common),
    /// Prepare, evolve, sample and fit the parity oscillation.
    Ramsey(Common),
    /// Signal-to-noise plan.
    Plan(Common),
    /// Correlated vs uncorrelated two-ion frequency uncertainty.
    Scaling(Common),
    /// Check a scenario without running Monte Carlo.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file; built-in defaults when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Master seed, replacing the scenario's.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the JSON and CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `dotted.key=value`, applied in order after the file is read.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Address ion 2 instead of ion 1.
    #[arg(long)]
    exchange_ions: bool,
    /// Block the E″ laser.
    #[arg(long)]
    no_e2_laser: bool,
}

impl Common {
    fn overrides(&self) -> Vec<String> {
        let mut o = self.overrides.clone();
        if let Some(s) = self.seed {
            o.push(format!("seed={s}"));
        }
        if self.exchange_ions {
            o.push("evolution.exchange_ions=true".into());
        }
        if self.no_e2_laser {
            o.push("evolution.e_double_prime_off=true".into());
        }
        o
    }

    fn load(&self) -> pnc_core::Result<LoadedScenario> {
        match &self.scenario {
            Some(p) => LoadedScenario::load(p, &self.overrides()),
            None => LoadedScenario::from_text("", Path::new("."), &self.overrides()),
        }
    }

    fn out_dir(&self, l: &LoadedScenario) -> PathBuf {
        self.out
            .clone()
            .or_else(|| l.scenario.output.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn write(dir: &Path, o: &CommandOutput) -> pnc_core::Result<()> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let json = dir.join(format!("{}.json", o.command));
    std::fs::write(&json, &o.json).map_err(io(&json))?;
    if let Some(csv) = &o.csv {
        let p = dir.join(format!("{}.csv", o.command));
        std::fs::write(&p, csv).map_err(io(&p))?;
    }
    Ok(())
}

fn run(cli: Cli) -> pnc_core::Result<()> {
    let (common, f): (&Common, fn(&LoadedScenario) -> pnc_core::Result<CommandOutput>) = match &cli.command {
        Command::Shift(c) => (c, commands::cmd_shift),
        Command::Lossrate(c) => (c, commands::cmd_lossrate),
        Command::Ramsey(c) => (c, commands::cmd_ramsey),
        Command::Plan(c) => (c, commands::cmd_plan),
        Command::Scaling(c) => (c, commands::cmd_scaling),
        Command::Validate(c) => (c, commands::cmd_validate),
    };
    let l = common.load()?;
    let out = f(&l)?;
    write(&common.out_dir(&l), &out)?;
    print!("{}", out.json);
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
