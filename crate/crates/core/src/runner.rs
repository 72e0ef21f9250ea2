//! Batch runs: step the configured system, sample the criteria, write the
//! CSV history, the JSON report and checkpoints.
//!
//! Output directory layout:
//!
//! ```text
//! samples.csv               one row per sample, flushed as it is taken
//! report.json               written once the run stops
//! checkpoint_<step>.ckpt    every `checkpoint_every` steps
//! checkpoint_final.ckpt     the last finite state
//! ```
//!
//! Runs are deterministic: the same config gives byte-identical files, and
//! a run resumed from a checkpoint rewrites the stored samples and then
//! continues exactly as the uninterrupted run would.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::checkpoint::{load_checkpoint, save_checkpoint, write_atomic, Checkpoint};
use crate::config::{build_forcing, build_stress, build_vector, SimulationConfig, System, SystemParams};
use crate::dynamics::StepControls;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::lp::DyadicPartition;
use crate::mhd::{step_mhd, MhdState};
use crate::monitor::{
    build_report, sample, sample_mhd, CriterionReport, CriterionSample, CsvMeta, CsvSink,
    EnergyBalance, ReportOptions, CSV_SCHEMA_VERSION,
};
use crate::oldroyd::{ns_forced_step, step, OldroydState, SteadyForcing};

pub const SAMPLES_FILE: &str = "samples.csv";
pub const REPORT_FILE: &str = "report.json";
pub const FINAL_CHECKPOINT: &str = "checkpoint_final.ckpt";

/// State of any configured system; `ns-forced` runs use the Oldroyd-B
/// state with the stress carried along.
#[derive(Debug, Clone)]
pub enum State {
    Oldroyd(OldroydState),
    Mhd(MhdState),
}

impl State {
    pub fn t(&self) -> f64 {
        match self {
            State::Oldroyd(s) => s.t,
            State::Mhd(s) => s.t,
        }
    }

    pub fn step(&self) -> u64 {
        match self {
            State::Oldroyd(s) => s.step,
            State::Mhd(s) => s.step,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        match self {
            State::Oldroyd(s) => s.grid(),
            State::Mhd(s) => s.grid(),
        }
    }

    fn max_speed(&self) -> f64 {
        match self {
            State::Oldroyd(s) => s.v.max_abs(),
            State::Mhd(s) => s.v.max_abs(),
        }
    }

    /// The configured initial data at `t = 0`.
    pub fn initial(config: &SimulationConfig) -> Result<State> {
        let grid = config.grid()?;
        let v = build_vector(&grid, &config.initial.velocity, false)?;
        Ok(match config.params {
            SystemParams::Oldroyd(params) => {
                let tau = build_stress(&grid, &config.initial.stress)?;
                State::Oldroyd(OldroydState::new(v, tau, params)?)
            }
            SystemParams::Mhd(p) => {
                let h = build_vector(&grid, &config.initial.magnetic, true)?;
                State::Mhd(MhdState::new(v, h, p.nu)?)
            }
        })
    }

    fn advance(&self, forcing: Option<&SteadyForcing>, controls: &StepControls) -> Result<State> {
        Ok(match (self, forcing) {
            (State::Oldroyd(s), None) => State::Oldroyd(step(s, controls)?),
            (State::Oldroyd(s), Some(f)) => State::Oldroyd(ns_forced_step(s, f, controls)?),
            (State::Mhd(s), _) => State::Mhd(step_mhd(s, controls)?),
        })
    }
}

/// A configured system advanced one step at a time.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimulationConfig,
    state: State,
    part: DyadicPartition,
    controls: StepControls,
    forcing: Option<SteadyForcing>,
}

impl Simulation {
    /// Starts from the configured initial data.
    pub fn new(config: &SimulationConfig) -> Result<Simulation> {
        config.validate()?;
        Simulation::from_state(config.clone(), State::initial(config)?)
    }

    /// Continues from `state`. A `dt` beyond the CFL limit of `state` is
    /// rejected here rather than on the first step.
    pub fn from_state(config: SimulationConfig, state: State) -> Result<Simulation> {
        let grid = state.grid().clone();
        if grid.n() != config.n {
            return Err(Error::GridMismatch);
        }
        let part = DyadicPartition::new(&grid)?;
        let controls = config.controls();
        controls.check_cfl(&grid, state.max_speed())?;
        let forcing = (config.system == System::NsForced).then(|| build_forcing(&grid, &config.forcing));
        Ok(Simulation {
            config,
            state,
            part,
            controls,
            forcing,
        })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.part
    }

    /// Advances one step; on error the state is left unchanged.
    pub fn step(&mut self) -> Result<()> {
        self.state = self.state.advance(self.forcing.as_ref(), &self.controls)?;
        Ok(())
    }

    /// Criterion quantities of the current state.
    pub fn sample(&self) -> Result<CriterionSample> {
        match &self.state {
            State::Oldroyd(s) => sample(s, &self.part, self.config.monitor.alpha),
            State::Mhd(s) => sample_mhd(s, &self.part, self.config.monitor.alpha),
        }
    }

    /// A checkpoint of the current state carrying `samples` as its history.
    pub fn checkpoint(&self, samples: Vec<CriterionSample>) -> Checkpoint {
        Checkpoint {
            config: self.config.clone(),
            state: self.state.clone(),
            samples,
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub steps: u64,
    pub report: CriterionReport,
}

impl RunOutcome {
    pub fn blowup(&self) -> Option<&str> {
        self.report.blowup.as_deref()
    }
}

pub fn report_options(config: &SimulationConfig) -> ReportOptions {
    let energy = match (config.system, config.params) {
        (System::Oldroyd, SystemParams::Oldroyd(params)) => EnergyBalance::Oldroyd { params },
        (System::Mhd, SystemParams::Mhd(p)) => EnergyBalance::Mhd { nu: p.nu },
        _ => EnergyBalance::None,
    };
    ReportOptions {
        system: config.system.name().into(),
        alpha: config.monitor.alpha,
        b: config.criterion_b(),
        deltas: config.monitor.deltas.clone(),
        energy,
    }
}

/// Runs `config` from its initial data into `config.output.dir`.
pub fn run(config: &SimulationConfig) -> Result<RunOutcome> {
    let sim = Simulation::new(config)?;
    drive(sim, Vec::new())
}

/// Continues a checkpointed run to `until`, writing into `dir` or, without
/// one, into the checkpointed run's directory.
pub fn resume(path: &Path, until: f64, dir: Option<&Path>) -> Result<RunOutcome> {
    let Checkpoint {
        mut config,
        state,
        samples,
    } = load_checkpoint(path)?;
    if !(until >= state.t()) {
        return Err(Error::Config(format!(
            "--until {until} lies before the checkpoint time {}",
            state.t()
        )));
    }
    config.time.t_final = until;
    if let Some(d) = dir {
        config.output.dir = d.to_path_buf();
    }
    config.validate()?;
    drive(Simulation::from_state(config, state)?, samples)
}

fn drive(mut sim: Simulation, mut samples: Vec<CriterionSample>) -> Result<RunOutcome> {
    let config = sim.config().clone();
    let dir = config.output.dir.as_path();
    let part = sim.partition();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(SAMPLES_FILE);
    let file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let options = report_options(&config);
    let meta = CsvMeta {
        schema_version: CSV_SCHEMA_VERSION,
        q_min: part.q_min(),
        q_max: part.q_max(),
        options: options.clone(),
    };
    let mut sink = CsvSink::new(BufWriter::new(file), &meta)?;
    if samples.is_empty() {
        samples.push(sim.sample()?);
    }
    for s in &samples {
        sink.push(s)?;
    }
    sink.flush()?;

    let target = config.total_steps();
    let every = config.time.sample_every;
    let periodic = config.time.checkpoint_every;
    let mut blowup = None;
    while sim.state().step() < target {
        match sim.step() {
            Ok(()) => {}
            Err(e @ (Error::Blowup { .. } | Error::Cfl { .. })) => {
                blowup = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
        let k = sim.state().step();
        if k % every == 0 || k == target {
            let s = sim.sample()?;
            sink.push(&s)?;
            sink.flush()?;
            samples.push(s);
        }
        if periodic > 0 && k % periodic == 0 && k != target {
            let path = dir.join(format!("checkpoint_{k:08}.ckpt"));
            save_checkpoint(&path, &sim.checkpoint(samples.clone()))?;
        }
    }
    if blowup.is_some() && samples.last().map(|s| s.t) != Some(sim.state().t()) {
        let s = sim.sample()?;
        sink.push(&s)?;
        sink.flush()?;
        samples.push(s);
    }

    let steps = sim.state().step();
    let report = build_report(&samples, &options, blowup, Some(config.echo()))?;
    save_checkpoint(&dir.join(FINAL_CHECKPOINT), &sim.checkpoint(samples))?;
    write_report(&dir.join(REPORT_FILE), &report)?;
    Ok(RunOutcome {
        dir: dir.to_path_buf(),
        steps,
        report,
    })
}

pub fn write_report(path: &Path, report: &CriterionReport) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::Samples(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
