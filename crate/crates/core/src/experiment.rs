//! Drivers behind the command line: time-stepped simulations that write a
//! CSV time series, and convergence studies that write a [`ConvergenceTable`].

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::{
    InitialState, Plan, RunConfig, SimulationConfig, StartMode, Stepper,
};
use crate::init::{random_unit, smooth_random_unit};
use crate::mesh::snapshot::write_snapshot;
use crate::mms::{run_convergence_study, ConvergenceTable, MmsError, StudySpec};
use crate::observables::{averaged_magnetization, energy_with_field, max_length_deviation, EnergySample};
use crate::scheme::{
    cold_start, llg_midpoint_step, ColdStart, IllgStepper, SchemeError, TimeWindow,
};
use crate::{Vec3, VectorField};

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const SNAPSHOT_FILE: &str = "final_snapshot.txt";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const METADATA_FILE: &str = "metadata.txt";

pub const TIMESERIES_HEADER: &str = "step,time,mx_avg,my_avg,mz_avg,energy_total,energy_exchange,energy_kinetic,energy_zeeman,max_len_dev,fp_iters";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("step {step}: {source}")]
    Solver {
        step: usize,
        #[source]
        source: SchemeError,
    },
    #[error("convergence study: {0}")]
    Study(#[from] MmsError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl RunError {
    /// True when the inner iteration of some step failed to converge.
    pub fn is_nonconvergence(&self) -> bool {
        matches!(
            self,
            RunError::Solver {
                source: SchemeError::NonConvergence { .. },
                ..
            } | RunError::Study(MmsError::Step {
                source: SchemeError::NonConvergence { .. },
                ..
            })
        )
    }

    fn io(path: &Path, source: io::Error) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One row of the time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Record {
    pub step: usize,
    pub time: f64,
    pub average: Vec3,
    /// Energy of the pair `(mⁿ, mⁿ⁻¹)` with the field at the row's time;
    /// row 0 pairs `m⁰` with itself.
    pub energy: EnergySample,
    pub max_len_dev: f64,
    /// Inner iterations of the step that produced this level (0 for start levels).
    pub fp_iters: usize,
}

impl Record {
    pub fn csv_row(&self) -> String {
        let e = &self.energy;
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.step,
            self.time,
            self.average[0],
            self.average[1],
            self.average[2],
            e.total,
            e.exchange_part,
            e.kinetic_part,
            e.zeeman_part,
            self.max_len_dev,
            self.fp_iters
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSummary {
    pub steps: usize,
    pub final_time: f64,
    pub final_average: Vec3,
    /// Largest `| |m|² - 1 |` over every level, recorded or not.
    pub max_len_dev: f64,
    pub max_fp_iters: usize,
    pub records: Vec<Record>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunSummary {
    Simulation(SimulationSummary),
    Study(ConvergenceTable),
}

pub fn initial_field(sim: &SimulationConfig) -> VectorField {
    match sim.initial {
        InitialState::Uniform(m) => VectorField::uniform(sim.grid, m),
        InitialState::SmoothRandom { seed } => smooth_random_unit(sim.grid, seed),
        InitialState::Random { seed } => random_unit(sim.grid, seed),
    }
    .with_ghosts_filled()
}

struct Recorder<'a> {
    sim: &'a SimulationConfig,
    record_every: usize,
    steps: usize,
    summary: SimulationSummary,
}

impl Recorder<'_> {
    fn level(
        &mut self,
        step: usize,
        m_next: &VectorField,
        m_curr: &VectorField,
        fp_iters: usize,
        sink: &mut dyn FnMut(&Record) -> Result<(), RunError>,
    ) -> Result<(), RunError> {
        let len_dev = max_length_deviation(m_next);
        self.summary.max_len_dev = self.summary.max_len_dev.max(len_dev);
        self.summary.max_fp_iters = self.summary.max_fp_iters.max(fp_iters);
        if step % self.record_every != 0 && step != self.steps {
            return Ok(());
        }
        let time = step as f64 * self.sim.params.k;
        let energy = energy_with_field(m_next, m_curr, self.sim.field.at(time), &self.sim.params)
            .expect("levels share one grid")
            .at(step, time);
        let rec = Record {
            step,
            time,
            average: averaged_magnetization(m_next),
            energy,
            max_len_dev: len_dev,
            fp_iters,
        };
        sink(&rec)?;
        self.summary.records.push(rec);
        Ok(())
    }
}

/// Runs a simulation, passing every recorded row to `sink` as it is produced.
/// Returns the summary and the final field.
pub fn simulate(
    sim: &SimulationConfig,
    record_every: usize,
    mut sink: impl FnMut(&Record) -> Result<(), RunError>,
) -> Result<(SimulationSummary, VectorField), RunError> {
    let k = sim.params.k;
    let steps = sim.steps();
    let mut rec = Recorder {
        sim,
        record_every: record_every.max(1),
        steps,
        summary: SimulationSummary {
            steps,
            final_time: steps as f64 * k,
            final_average: Vec3::ZERO,
            max_len_dev: 0.0,
            max_fp_iters: 0,
            records: Vec::new(),
        },
    };
    let sink = &mut sink as &mut dyn FnMut(&Record) -> Result<(), RunError>;
    let m0 = initial_field(sim);
    rec.level(0, &m0, &m0, 0, sink)?;

    let last = match sim.stepper {
        Stepper::LlgMidpoint => {
            let mut m = m0;
            for n in 0..steps {
                let (next, report) = llg_midpoint_step(&m, n as f64 * k, &sim.params, &sim.field)
                    .map_err(|source| RunError::Solver { step: n + 1, source })?;
                rec.level(n + 1, &next, &m, report.iterations, sink)?;
                m = next;
            }
            m
        }
        Stepper::Illg => {
            let mode = match sim.start {
                StartMode::Taylor | StartMode::TaylorStep => ColdStart::Taylor,
                StartMode::Flat => ColdStart::Flat,
            };
            let levels = cold_start(&m0, sim.field.at(0.0), &sim.params, mode, None)
                .map_err(|source| RunError::Solver { step: 1, source })?;
            let mut stepper = IllgStepper::new(sim.grid, sim.params, sim.field)
                .map_err(|source| RunError::Solver { step: 1, source })?;
            rec.level(1, &levels[1], &levels[0], 0, sink)?;
            let mut window = if sim.start == StartMode::TaylorStep {
                let [m0, m1, _] = levels;
                TimeWindow::new(m0, m1, k, 1).map_err(|source| RunError::Solver { step: 2, source })?
            } else {
                rec.level(2, &levels[2], &levels[1], 0, sink)?;
                TimeWindow::from_levels(levels, k).map_err(|source| RunError::Solver { step: 2, source })?
            };
            while window.step_index < steps {
                let n = window.step_index + 1;
                let (next, report) = stepper
                    .step(&window, None)
                    .map_err(|source| RunError::Solver { step: n, source })?;
                rec.level(n, &next, &window.m_curr, report.iterations, sink)?;
                window.advance(next, k);
            }
            window.m_curr
        }
    };
    rec.summary.final_average = averaged_magnetization(&last);
    Ok((rec.summary, last))
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| RunError::io(path, e))
}

fn write_metadata(path: &Path, lines: &[(String, String)]) -> Result<(), RunError> {
    let mut w = create(path)?;
    for (k, v) in lines {
        writeln!(w, "{k} = {v}").map_err(|e| RunError::io(path, e))?;
    }
    w.flush().map_err(|e| RunError::io(path, e))
}

fn simulation_metadata(cfg: &RunConfig, sim: &SimulationConfig) -> Vec<(String, String)> {
    let p = &sim.params;
    let mut m = vec![
        ("experiment".into(), cfg.experiment.to_string()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("stepper".into(), format!("{:?}", sim.stepper)),
        ("cells".into(), format!("{:?}", sim.grid.cells())),
        ("extent".into(), format!("{:?}", sim.grid.extent())),
        ("alpha".into(), p.alpha.to_string()),
        ("tau".into(), p.tau.to_string()),
        ("k".into(), p.k.to_string()),
        ("final_time".into(), sim.final_time.to_string()),
        ("steps".into(), sim.steps().to_string()),
        ("field".into(), format!("{:?}", sim.field)),
        ("initial".into(), format!("{:?}", sim.initial)),
        ("fp_tolerance".into(), p.fp_tolerance.to_string()),
        ("fp_max_iters".into(), p.fp_max_iters.to_string()),
        ("record_every".into(), cfg.record_every.to_string()),
    ];
    if sim.stepper == Stepper::Illg {
        m.push(("start".into(), format!("{:?}", sim.start)));
    }
    if let Some(n) = &cfg.note {
        m.push(("note".into(), n.clone()));
    }
    m
}

fn study_metadata(cfg: &RunConfig, spec: &StudySpec, table: &ConvergenceTable) -> Vec<(String, String)> {
    let mut m = vec![
        ("experiment".into(), cfg.experiment.to_string()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("axis".into(), spec.axis.to_string()),
        ("dim".into(), spec.case.dim.count().to_string()),
        ("alpha".into(), spec.case.alpha.to_string()),
        ("tau".into(), spec.case.tau.to_string()),
        ("final_time".into(), spec.final_time.to_string()),
        (
            match spec.axis {
                crate::mms::StudyAxis::Time => "h",
                crate::mms::StudyAxis::Space => "k",
            }
            .into(),
            spec.fixed.to_string(),
        ),
        ("init".into(), format!("{:?}", spec.init)),
        ("source_form".into(), format!("{:?}", spec.source)),
        ("fp_tolerance".into(), spec.fp_tolerance.to_string()),
        ("fp_max_iters".into(), spec.fp_max_iters.to_string()),
    ];
    for (i, r) in table.rows.iter().enumerate() {
        m.push((
            format!("row{i}"),
            format!(
                "resolution {:e}, steps {}, max_len_dev {:e}, max_fp_iters {}",
                r.resolution, r.steps, r.max_len_dev, r.max_fp_iters
            ),
        ));
    }
    if let Some(n) = &cfg.note {
        m.push(("note".into(), n.clone()));
    }
    m
}

/// Runs `cfg`, writing its files under `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary, RunError> {
    fs::create_dir_all(out_dir).map_err(|e| RunError::io(out_dir, e))?;
    match &cfg.plan {
        Plan::Simulation(sim) => {
            let ts_path = out_dir.join(TIMESERIES_FILE);
            let mut ts = create(&ts_path)?;
            writeln!(ts, "{TIMESERIES_HEADER}").map_err(|e| RunError::io(&ts_path, e))?;
            let result = simulate(sim, cfg.record_every, |r| {
                writeln!(ts, "{}", r.csv_row()).map_err(|e| RunError::io(&ts_path, e))
            });
            // keep whatever was written, even when a step failed
            ts.flush().map_err(|e| RunError::io(&ts_path, e))?;
            let (summary, last) = result?;
            write_metadata(&out_dir.join(METADATA_FILE), &simulation_metadata(cfg, sim))?;
            if sim.snapshot {
                let path = out_dir.join(SNAPSHOT_FILE);
                write_snapshot(&last, &path).map_err(|e| RunError::io(&path, e))?;
            }
            Ok(RunSummary::Simulation(summary))
        }
        Plan::Study(spec) => {
            let table = run_convergence_study(spec)?;
            let path = out_dir.join(CONVERGENCE_FILE);
            let mut w = create(&path)?;
            table
                .write_csv(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| RunError::io(&path, e))?;
            write_metadata(&out_dir.join(METADATA_FILE), &study_metadata(cfg, spec, &table))?;
            Ok(RunSummary::Study(table))
        }
    }
}
