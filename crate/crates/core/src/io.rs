//! Instance files, result documents, trajectory CSV export and the
//! benchmark runner.
//!
//! # Instance format
//!
//! ```json
//! {
//!   "name": "additional_2",
//!   "initial": { "position": [120, 40, 20],
//!                "orientation": { "yaw_deg": 90, "pitch_deg": -15, "roll_deg": 0 } },
//!   "final":   { "position": [130, 120, 41],
//!                "orientation": { "yaw_deg": 85, "pitch_deg": 20, "roll_deg": 15 } },
//!   "r_pitch": 40,
//!   "r_yaw": 30
//! }
//! ```
//!
//! Angles are in degrees and applied in ZYX order (yaw, then pitch, then
//! roll). **Positive pitch is a rotation about the body `-y` axis, so it
//! raises the nose.** A descending start therefore has a negative pitch.
//! An orientation may instead be given as an explicit frame
//! `{ "t": [..], "y": [..], "u": [..] }` with the body axes in world
//! coordinates. `theta_disc`, `phi_disc` and `step` are optional.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{EulerZYX, Mat3, Vec3};
use crate::kinematics::{Configuration, VehicleParams};
use crate::planner::{plan, reason_code, CandidateSummary, PlannerConfig};
use crate::trajectory::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Orientation {
    Euler { yaw_deg: f64, pitch_deg: f64, roll_deg: f64 },
    Frame { t: [f64; 3], y: [f64; 3], u: [f64; 3] },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: [f64; 3],
    pub orientation: Orientation,
}

impl Pose {
    pub fn to_configuration(&self, which: &str) -> Result<Configuration> {
        let position = Vec3::from(self.position);
        if !position.iter().all(|v| v.is_finite()) {
            return Err(Error::Validation(format!("{which}.position must be finite")));
        }
        match self.orientation {
            Orientation::Euler { yaw_deg, pitch_deg, roll_deg } => {
                if ![yaw_deg, pitch_deg, roll_deg].iter().all(|v| v.is_finite()) {
                    return Err(Error::Validation(format!("{which}.orientation angles must be finite")));
                }
                Ok(Configuration::from_euler(position, EulerZYX::from_degrees(yaw_deg, pitch_deg, roll_deg)))
            }
            Orientation::Frame { t, y, u } => {
                let frame = Mat3::from_columns(&[Vec3::from(t), Vec3::from(y), Vec3::from(u)]);
                Configuration::new(position, frame)
                    .map_err(|e| Error::Validation(format!("{which}.orientation: {e}")))
            }
        }
    }

    fn set_roll(&mut self, roll: f64, which: &str) -> Result<()> {
        match &mut self.orientation {
            Orientation::Euler { roll_deg, .. } => {
                *roll_deg = roll;
                Ok(())
            }
            Orientation::Frame { .. } => {
                Err(Error::Validation(format!("roll sweep needs {which}.orientation given as angles")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default)]
    pub name: Option<String>,
    pub initial: Pose,
    #[serde(rename = "final")]
    pub terminal: Pose,
    pub r_pitch: f64,
    pub r_yaw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_disc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_disc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

/// Command-line values that take precedence over the instance file.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub r_pitch: Option<f64>,
    pub r_yaw: Option<f64>,
    pub theta_disc: Option<usize>,
    pub phi_disc: Option<usize>,
    pub step: Option<f64>,
    pub refine: bool,
}

/// An instance with its orientations resolved and its settings validated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedInstance {
    pub start: Configuration,
    pub goal: Configuration,
    pub params: VehicleParams,
    pub config: PlannerConfig,
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, source: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("{source}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })
}

impl InstanceFile {
    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        parse_json(text, source)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn resolve(&self, overrides: &Overrides) -> Result<ResolvedInstance> {
        let start = self.initial.to_configuration("initial")?;
        let goal = self.terminal.to_configuration("final")?;
        let params = VehicleParams::new(
            overrides.r_pitch.unwrap_or(self.r_pitch),
            overrides.r_yaw.unwrap_or(self.r_yaw),
        )
        .map_err(|e| Error::Validation(e.to_string()))?;
        let defaults = PlannerConfig::default_for(&params);
        let config = PlannerConfig::new(
            overrides.theta_disc.or(self.theta_disc).unwrap_or(defaults.theta_disc),
            overrides.phi_disc.or(self.phi_disc).unwrap_or(defaults.phi_disc),
            overrides.step.or(self.step).unwrap_or(defaults.step),
            overrides.refine,
        )
        .map_err(|e| Error::Validation(e.to_string()))?;
        Ok(ResolvedInstance { start, goal, params, config })
    }
}

/// One trajectory sample, flattened for export.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
    pub yx: f64,
    pub yy: f64,
    pub yz: f64,
    pub ux: f64,
    pub uy: f64,
    pub uz: f64,
    pub kg: f64,
    pub kn: f64,
}

pub fn trajectory_rows(traj: &Trajectory) -> Vec<TrajectoryRow> {
    traj.samples
        .iter()
        .map(|smp| {
            let c = &smp.config;
            TrajectoryRow {
                s: smp.s,
                x: c.position.x,
                y: c.position.y,
                z: c.position.z,
                tx: c.t.x,
                ty: c.t.y,
                tz: c.t.z,
                yx: c.y.x,
                yy: c.y.y,
                yz: c.y.z,
                ux: c.u.x,
                uy: c.u.y,
                uz: c.u.z,
                kg: smp.curvature.kappa_g,
                kn: smp.curvature.kappa_n,
            }
        })
        .collect()
}

/// Self-describing record of one planner run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub instance: InstanceFile,
    pub params: VehicleParams,
    pub config: PlannerConfig,
    pub best_label: String,
    pub total_length: f64,
    pub segment_lengths: [f64; 3],
    pub parameters: Vec<(String, f64)>,
    pub wall_time_s: f64,
    pub summaries: Vec<CandidateSummary>,
    pub trajectory: Vec<TrajectoryRow>,
}

impl ResultFile {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        parse_json(text, source)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_trajectory_csv(fs::File::create(path)?, &self.trajectory)
    }
}

/// Writes rows under the header `s,x,y,z,tx,ty,tz,yx,yy,yz,ux,uy,uz,kg,kn`.
pub fn write_trajectory_csv<W: std::io::Write>(out: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: std::io::Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Plans one instance and packages the outcome.
pub fn run_instance(instance: &InstanceFile, overrides: &Overrides) -> Result<ResultFile> {
    let inst = instance.resolve(overrides)?;
    let clock = Instant::now();
    let res = plan(&inst.start, &inst.goal, &inst.params, &inst.config)?;
    let wall_time_s = clock.elapsed().as_secs_f64();
    let best = res.best;
    Ok(ResultFile {
        instance: instance.clone(),
        params: inst.params,
        config: inst.config,
        best_label: best.label,
        total_length: best.total_length,
        segment_lengths: best.segment_lengths,
        parameters: best.parameters,
        wall_time_s,
        summaries: res.summaries,
        trajectory: trajectory_rows(&best.trajectory),
    })
}

/// Cartesian sweep applied to one instance: every roll pair is run with
/// every `r_yaw`, roll pair outermost.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    #[serde(default)]
    pub r_yaw: Vec<f64>,
    /// `[initial, final]` roll angles in degrees.
    #[serde(default)]
    pub rolls_deg: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path to an instance file, relative to the manifest.
    pub instance: PathBuf,
    #[serde(default)]
    pub sweep: Option<Sweep>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub entries: Vec<ManifestEntry>,
    #[serde(default)]
    pub refine: bool,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        let mut m: Manifest = parse_json(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new("."));
        for e in &mut m.entries {
            if e.instance.is_relative() {
                e.instance = base.join(&e.instance);
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BenchOutcome {
    Ok { length: f64, label: String, time_s: f64 },
    Failed { reason: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    /// Letter of the variant within its sweep, `a` first.
    pub variant: String,
    pub r_pitch: Option<f64>,
    pub r_yaw: Option<f64>,
    pub roll_initial_deg: Option<f64>,
    pub roll_final_deg: Option<f64>,
    #[serde(flatten)]
    pub outcome: BenchOutcome,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

impl fmt::Display for BenchTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<20} {:>3} {:>6} {:>6} {:>11} {:>10}  {:<18} {:>8}", "instance", "var", "r_yaw", "roll_i", "roll_f", "length", "type", "time_s")?;
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x}"));
        for r in &self.rows {
            write!(f, "{:<20} {:>3} {:>6} {:>6} {:>11} ", r.instance, r.variant, opt(r.r_yaw), opt(r.roll_initial_deg), opt(r.roll_final_deg))?;
            match &r.outcome {
                BenchOutcome::Ok { length, label, time_s } => writeln!(f, "{length:>10.2}  {label:<18} {time_s:>8.3}")?,
                BenchOutcome::Failed { reason, .. } => writeln!(f, "{:>10}  {:<18} {:>8}", "-", format!("FAILED:{reason}"), "-")?,
            }
        }
        Ok(())
    }
}

fn variant_letter(i: usize) -> String {
    let mut s = String::new();
    let mut n = i;
    loop {
        s.insert(0, (b'a' + (n % 26) as u8) as char);
        if n < 26 {
            break;
        }
        n = n / 26 - 1;
    }
    s
}

/// Expands a manifest entry into concrete instances in sweep order.
fn expand(entry: &ManifestEntry, base: &InstanceFile) -> Vec<Result<(InstanceFile, Option<[f64; 2]>)>> {
    let Some(sweep) = &entry.sweep else {
        return vec![Ok((base.clone(), None))];
    };
    let rolls: Vec<Option<[f64; 2]>> =
        if sweep.rolls_deg.is_empty() { vec![None] } else { sweep.rolls_deg.iter().copied().map(Some).collect() };
    let yaws: Vec<Option<f64>> = if sweep.r_yaw.is_empty() { vec![None] } else { sweep.r_yaw.iter().copied().map(Some).collect() };
    let mut out = Vec::with_capacity(rolls.len() * yaws.len());
    for roll in &rolls {
        for ry in &yaws {
            let mut inst = base.clone();
            if let Some(ry) = ry {
                inst.r_yaw = *ry;
            }
            let applied = match roll {
                Some([ri, rf]) => inst.initial.set_roll(*ri, "initial").and_then(|_| inst.terminal.set_roll(*rf, "final")),
                None => Ok(()),
            };
            out.push(applied.map(|_| (inst, *roll)));
        }
    }
    out
}

fn failed(err: &Error) -> BenchOutcome {
    BenchOutcome::Failed { reason: reason_code(err).to_string(), message: err.to_string() }
}

/// Untimed dummy run so thread-pool start-up does not land on the first row.
fn warm_up() {
    let start = Configuration::identity();
    let goal = Configuration::from_euler(Vec3::new(60.0, 30.0, 5.0), EulerZYX::from_degrees(45.0, 0.0, 0.0));
    if let Ok(params) = VehicleParams::new(40.0, 40.0) {
        let cfg = PlannerConfig { theta_disc: 4, phi_disc: 4, ..PlannerConfig::default_for(&params) };
        let _ = plan(&start, &goal, &params, &cfg);
    }
}

/// Runs every manifest row in order. A failing row is recorded and the
/// run continues.
pub fn run_benchmark(manifest: &Manifest) -> BenchTable {
    let mut table = BenchTable::default();
    if manifest.entries.is_empty() {
        return table;
    }
    warm_up();
    let overrides = Overrides { refine: manifest.refine, ..Overrides::default() };
    for entry in &manifest.entries {
        let fallback_name = entry.instance.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        let base = match InstanceFile::load(&entry.instance) {
            Ok(b) => b,
            Err(e) => {
                table.rows.push(BenchRow {
                    instance: fallback_name,
                    variant: variant_letter(0),
                    r_pitch: None,
                    r_yaw: None,
                    roll_initial_deg: None,
                    roll_final_deg: None,
                    outcome: failed(&e),
                });
                continue;
            }
        };
        let name = base.name.clone().unwrap_or(fallback_name);
        for (i, item) in expand(entry, &base).into_iter().enumerate() {
            let row = match item {
                Ok((inst, roll)) => {
                    let outcome = match run_instance(&inst, &overrides) {
                        Ok(r) => BenchOutcome::Ok { length: r.total_length, label: r.best_label, time_s: r.wall_time_s },
                        Err(e) => failed(&e),
                    };
                    BenchRow {
                        instance: name.clone(),
                        variant: variant_letter(i),
                        r_pitch: Some(inst.r_pitch),
                        r_yaw: Some(inst.r_yaw),
                        roll_initial_deg: roll.map(|r| r[0]),
                        roll_final_deg: roll.map(|r| r[1]),
                        outcome,
                    }
                }
                Err(e) => BenchRow {
                    instance: name.clone(),
                    variant: variant_letter(i),
                    r_pitch: Some(base.r_pitch),
                    r_yaw: None,
                    roll_initial_deg: None,
                    roll_final_deg: None,
                    outcome: failed(&e),
                },
            };
            table.rows.push(row);
        }
    }
    table
}
