//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, keys may appear once.
//! Unknown keys, and keys the chosen experiment does not use, are rejected.
//!
//! ```text
//! experiment = relax-illg
//! cells = 10 10 4
//! extent = 1.0 1.0 0.4
//! alpha = 0.5
//! tau = 1.0
//! k = 0.02
//! final_time = 20
//! m0 = 0.7071067811865476 0.7071067811865476 0
//! field = constant 10 0 0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::mms::{InitMode, ManufacturedCase, SourceForm, StudyAxis, StudySpec};
use crate::scheme::{Axis, FieldSpec, SchemeParams, DEFAULT_FP_MAX_ITERS, DEFAULT_FP_TOLERANCE};
use crate::{Dim, Grid, Vec3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: key `{key}`: {message}")]
    Key {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required key `{key}`")]
    Missing { key: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    ConvergeTime1d,
    ConvergeSpace1d,
    ConvergeTime3d,
    ConvergeSpace3d,
    RelaxLlg,
    RelaxIllg,
    PerturbIllg,
    Custom,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::ConvergeTime1d,
        Experiment::ConvergeSpace1d,
        Experiment::ConvergeTime3d,
        Experiment::ConvergeSpace3d,
        Experiment::RelaxLlg,
        Experiment::RelaxIllg,
        Experiment::PerturbIllg,
        Experiment::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ConvergeTime1d => "converge-time-1d",
            Experiment::ConvergeSpace1d => "converge-space-1d",
            Experiment::ConvergeTime3d => "converge-time-3d",
            Experiment::ConvergeSpace3d => "converge-space-3d",
            Experiment::RelaxLlg => "relax-llg",
            Experiment::RelaxIllg => "relax-illg",
            Experiment::PerturbIllg => "perturb-illg",
            Experiment::Custom => "custom",
        }
    }

    /// `(dimension, axis)` of a convergence study, `None` for simulations.
    pub fn study(self) -> Option<(Dim, StudyAxis)> {
        match self {
            Experiment::ConvergeTime1d => Some((Dim::One, StudyAxis::Time)),
            Experiment::ConvergeSpace1d => Some((Dim::One, StudyAxis::Space)),
            Experiment::ConvergeTime3d => Some((Dim::Three, StudyAxis::Time)),
            Experiment::ConvergeSpace3d => Some((Dim::Three, StudyAxis::Space)),
            _ => None,
        }
    }

    pub fn is_study(self) -> bool {
        self.study().is_some()
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                format!("unknown experiment `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stepper {
    /// Three-level inertial scheme.
    Illg,
    /// Two-level midpoint scheme for the plain LLG equation.
    LlgMidpoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialState {
    Uniform(Vec3),
    SmoothRandom { seed: u64 },
    Random { seed: u64 },
}

/// How levels 1 and 2 of an inertial simulation are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartMode {
    /// Both levels from the Taylor expansion.
    Taylor,
    /// `m¹` from the Taylor expansion, `m²` from one scheme step.
    TaylorStep,
    Flat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub grid: Grid,
    pub params: SchemeParams,
    pub field: FieldSpec,
    pub final_time: f64,
    pub stepper: Stepper,
    pub initial: InitialState,
    pub start: StartMode,
    /// Write the final field as a snapshot file.
    pub snapshot: bool,
}

impl SimulationConfig {
    /// Number of steps of size `k` that reach the final time.
    pub fn steps(&self) -> usize {
        (self.final_time / self.params.k).round() as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Plan {
    Simulation(SimulationConfig),
    Study(StudySpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub plan: Plan,
    pub record_every: usize,
    pub output_dir: PathBuf,
    /// Free text copied into the run metadata.
    pub note: Option<String>,
}

pub const DEFAULT_OUTPUT_DIR: &str = "output";

const SIM_KEYS: &[&str] = &[
    "cells", "extent", "alpha", "tau", "k", "final_time", "m0", "seed", "field", "start",
    "snapshot", "stepper",
];
const STUDY_KEYS: &[&str] = &[
    "alpha", "tau", "final_time", "resolutions", "cells", "k", "init", "source_form",
];
const COMMON_KEYS: &[&str] = &[
    "experiment", "fp_tolerance", "fp_max_iters", "record_every", "output_dir", "note",
];

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

/// Parsed assignments, tracking which keys the builder consumed.
struct Doc {
    entries: BTreeMap<String, Entry>,
}

impl Doc {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("invalid key `{key}`"),
                });
            }
            if !SIM_KEYS.contains(&key) && !STUDY_KEYS.contains(&key) && !COMMON_KEYS.contains(&key)
            {
                return Err(ConfigError::Key {
                    line,
                    key: key.into(),
                    message: "unknown key".into(),
                });
            }
            if let Some(first) = entries.get(key) {
                return Err(ConfigError::Key {
                    line,
                    key: key.into(),
                    message: format!("duplicate key (first set on line {})", first.line),
                });
            }
            entries.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.trim().to_string(),
                    used: false,
                },
            );
        }
        Ok(Doc { entries })
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        match self.entries.get(key) {
            Some(e) => ConfigError::Key {
                line: e.line,
                key: key.into(),
                message: message.into(),
            },
            None => ConfigError::Missing { key: key.into() },
        }
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            e.value.clone()
        })
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| self.err(key, format!("cannot parse `{v}`: {e}"))),
        }
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.get(key)?.ok_or_else(|| ConfigError::Missing { key: key.into() })
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        v.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| self.err(key, format!("cannot parse `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn vec3(&mut self, key: &str) -> Result<Option<Vec3>, ConfigError> {
        match self.list::<f64>(key)? {
            None => Ok(None),
            Some(v) if v.len() == 3 => Ok(Some(Vec3::new(v[0], v[1], v[2]))),
            Some(v) => Err(self.err(key, format!("expected 3 components, got {}", v.len()))),
        }
    }

    fn positive(&mut self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.require(key)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(self.err(key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    fn non_negative(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v: f64 = self.get(key)?.unwrap_or(default);
        if !(v >= 0.0 && v.is_finite()) {
            return Err(self.err(key, format!("must be non-negative, got {v}")));
        }
        Ok(v)
    }

    /// Rejects keys that parsed but that the experiment never looked at.
    fn finish(&self, experiment: Experiment) -> Result<(), ConfigError> {
        match self.entries.iter().find(|(_, e)| !e.used) {
            Some((key, e)) => Err(ConfigError::Key {
                line: e.line,
                key: key.clone(),
                message: format!("not used by experiment `{experiment}`"),
            }),
            None => Ok(()),
        }
    }
}

fn parse_field(doc: &mut Doc) -> Result<FieldSpec, ConfigError> {
    let Some(raw) = doc.raw("field") else {
        return Ok(FieldSpec::Zero);
    };
    let words: Vec<&str> = raw.split_whitespace().collect();
    let num = |doc: &Doc, s: &str| {
        s.parse::<f64>()
            .map_err(|e| doc.err("field", format!("cannot parse `{s}`: {e}")))
    };
    match words.as_slice() {
        ["zero"] => Ok(FieldSpec::Zero),
        ["constant", x, y, z] => Ok(FieldSpec::Constant(Vec3::new(
            num(doc, x)?,
            num(doc, y)?,
            num(doc, z)?,
        ))),
        ["sine", amp, freq, axis, on, off] => {
            let axis = match *axis {
                "x" => Axis::X,
                "y" => Axis::Y,
                "z" => Axis::Z,
                other => return Err(doc.err("field", format!("unknown axis `{other}`"))),
            };
            let (on, off) = (num(doc, on)?, num(doc, off)?);
            if !(off >= on) {
                return Err(doc.err("field", "window end precedes its start"));
            }
            Ok(FieldSpec::WindowedSine {
                amplitude: num(doc, amp)?,
                frequency: num(doc, freq)?,
                axis,
                on,
                off,
            })
        }
        _ => Err(doc.err(
            "field",
            "expected `zero`, `constant <x> <y> <z>` or `sine <amplitude> <frequency> <x|y|z> <on> <off>`",
        )),
    }
}

fn solver_settings(doc: &mut Doc) -> Result<(f64, usize), ConfigError> {
    let eps = doc.get::<f64>("fp_tolerance")?.unwrap_or(DEFAULT_FP_TOLERANCE);
    if !(eps > 0.0) {
        return Err(doc.err("fp_tolerance", "must be positive"));
    }
    let iters = doc.get::<usize>("fp_max_iters")?.unwrap_or(DEFAULT_FP_MAX_ITERS);
    if iters == 0 {
        return Err(doc.err("fp_max_iters", "must be at least 1"));
    }
    Ok((eps, iters))
}

fn parse_simulation(doc: &mut Doc, experiment: Experiment) -> Result<SimulationConfig, ConfigError> {
    let cells: Vec<usize> = doc
        .list("cells")?
        .ok_or_else(|| ConfigError::Missing { key: "cells".into() })?;
    let dim = Dim::from_count(cells.len())
        .map_err(|_| doc.err("cells", "expected 1 or 3 cell counts"))?;
    let extent: Vec<f64> = doc.list("extent")?.unwrap_or_else(|| vec![1.0; cells.len()]);
    if extent.len() != cells.len() {
        return Err(doc.err("extent", "needs one entry per entry of `cells`"));
    }
    let grid = Grid::new(dim, &cells, &extent).map_err(|e| doc.err("cells", e.to_string()))?;

    let stepper = match (experiment, doc.raw("stepper").as_deref()) {
        (Experiment::Custom, None | Some("illg")) => Stepper::Illg,
        (Experiment::Custom, Some("llg")) => Stepper::LlgMidpoint,
        (Experiment::Custom, Some(other)) => {
            return Err(doc.err("stepper", format!("expected `illg` or `llg`, got `{other}`")))
        }
        (_, Some(_)) => return Err(doc.err("stepper", "only a custom experiment may choose the stepper")),
        (Experiment::RelaxLlg, None) => Stepper::LlgMidpoint,
        (_, None) => Stepper::Illg,
    };

    let alpha = doc.positive("alpha")?;
    let tau = match stepper {
        Stepper::Illg => doc.positive("tau")?,
        Stepper::LlgMidpoint => doc.non_negative("tau", 0.0)?,
    };
    let k = doc.positive("k")?;
    let final_time = doc.positive("final_time")?;
    let n = (final_time / k).round();
    if n < 3.0 || (n * k - final_time).abs() > 1e-9 * final_time {
        return Err(doc.err("k", format!("must divide final_time = {final_time} into at least 3 steps")));
    }
    let (eps, iters) = solver_settings(doc)?;
    let params = SchemeParams::new(alpha, tau, k)
        .map_err(|e| doc.err("alpha", e.to_string()))?
        .with_tolerance(eps)
        .with_max_iters(iters);

    let seed = doc.get::<u64>("seed")?;
    let initial = match doc.raw("m0").as_deref() {
        None => return Err(ConfigError::Missing { key: "m0".into() }),
        Some("smooth-random") => InitialState::SmoothRandom {
            seed: seed.unwrap_or(0),
        },
        Some("random") => InitialState::Random {
            seed: seed.unwrap_or(0),
        },
        Some(_) => {
            if seed.is_some() {
                return Err(doc.err("seed", "only used with a random m0"));
            }
            let v = doc.vec3("m0")?.expect("present");
            if !(v.norm() > 0.0 && v.is_finite()) {
                return Err(doc.err("m0", "must be a finite nonzero vector"));
            }
            InitialState::Uniform(v.normalized())
        }
    };

    let start = match (stepper, doc.raw("start").as_deref()) {
        (Stepper::Illg, None) => StartMode::TaylorStep,
        (_, None | Some("taylor")) => StartMode::Taylor,
        (Stepper::Illg, Some("taylor-step")) => StartMode::TaylorStep,
        (Stepper::Illg, Some("flat")) => StartMode::Flat,
        (Stepper::LlgMidpoint, Some(_)) => return Err(doc.err("start", "the two-level stepper needs no start levels")),
        (_, Some(other)) => return Err(doc.err("start", format!("expected `taylor`, `taylor-step` or `flat`, got `{other}`"))),
    };
    let snapshot = doc.get::<bool>("snapshot")?.unwrap_or(true);
    let field = parse_field(doc)?;
    Ok(SimulationConfig {
        grid,
        params,
        field,
        final_time,
        stepper,
        initial,
        start,
        snapshot,
    })
}

fn parse_study(doc: &mut Doc, dim: Dim, axis: StudyAxis) -> Result<StudySpec, ConfigError> {
    let alpha = doc.positive("alpha")?;
    let tau = doc.positive("tau")?;
    let final_time = doc.positive("final_time")?;
    let counts: Vec<usize> = doc
        .list("resolutions")?
        .ok_or_else(|| ConfigError::Missing { key: "resolutions".into() })?;
    if counts.len() < 3 || counts.iter().any(|&c| c < 2) {
        return Err(doc.err("resolutions", "need at least 3 counts, each at least 2"));
    }
    // counts are steps per final time (time axis) or cells per unit length (space axis)
    let (resolutions, fixed) = match axis {
        StudyAxis::Time => {
            let cells: usize = doc.require("cells")?;
            if cells < 2 {
                return Err(doc.err("cells", "need at least 2 cells"));
            }
            let ks = counts.iter().map(|&n| final_time / n as f64).collect();
            (ks, 1.0 / cells as f64)
        }
        StudyAxis::Space => {
            let k = doc.positive("k")?;
            let n = (final_time / k).round();
            if n < 3.0 || (n * k - final_time).abs() > 1e-9 * final_time {
                return Err(doc.err("k", format!("must divide final_time = {final_time} into at least 3 steps")));
            }
            let hs = counts.iter().map(|&n| 1.0 / n as f64).collect();
            (hs, k)
        }
    };
    let init = match doc.raw("init").as_deref() {
        None | Some("exact") => InitMode::Exact,
        Some("taylor") => InitMode::Taylor,
        Some(other) => return Err(doc.err("init", format!("expected `exact` or `taylor`, got `{other}`"))),
    };
    let source = match doc.raw("source_form").as_deref() {
        None | Some("additive") => SourceForm::Additive,
        Some("field") => SourceForm::Field,
        Some("tangent") => SourceForm::Tangent,
        Some(other) => {
            return Err(doc.err(
                "source_form",
                format!("expected `additive`, `field` or `tangent`, got `{other}`"),
            ))
        }
    };
    let (eps, iters) = solver_settings(doc)?;
    let mut spec = StudySpec::new(ManufacturedCase::new(dim, alpha, tau), axis, resolutions, fixed, final_time);
    spec.init = init;
    spec.source = source;
    spec.fp_tolerance = eps;
    spec.fp_max_iters = iters;
    Ok(spec)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut doc = Doc::parse(text)?;
    let experiment: Experiment = doc.require("experiment")?;
    let plan = match experiment.study() {
        Some((dim, axis)) => Plan::Study(parse_study(&mut doc, dim, axis)?),
        None => Plan::Simulation(parse_simulation(&mut doc, experiment)?),
    };
    let record_every = doc.get::<usize>("record_every")?.unwrap_or(1);
    if record_every == 0 {
        return Err(doc.err("record_every", "must be at least 1"));
    }
    let output_dir = doc
        .raw("output_dir")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let note = doc.raw("note");
    doc.finish(experiment)?;
    Ok(RunConfig {
        experiment,
        plan,
        record_every,
        output_dir,
        note,
    })
}
