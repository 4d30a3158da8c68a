//! CSV and JSON artifacts.
//!
//! Trajectory CSV: `#`-prefixed metadata lines (`# key=value` or `# text`),
//! then a header row with the columns of [`crate::langevin::COLUMNS`] and one
//! row per grid sample. Heatmap CSV: long form with columns
//! `kappa1_max,kappa2_max,loss,log10_loss`. Floats are written in the
//! shortest representation that parses back to the same value, switching to
//! exponent notation for very small or large magnitudes.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::langevin::{TrajectoryMeta, COLUMNS};
use crate::pulse::PulseKind;
use crate::sweep::{log10_clamped, GridMeta, LossGrid};
use crate::{DelaySnap, Error, Result, Trajectory};

/// Column names of the heatmap CSV.
pub const HEATMAP_COLUMNS: [&str; 4] = ["kappa1_max", "kappa2_max", "loss", "log10_loss"];

/// Ordered `key=value` metadata written as comment lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn write_to(&self, out: &mut String) {
        for (k, v) in &self.entries {
            let _ = writeln!(out, "# {k}={v}");
        }
    }

    fn parse_line(&mut self, line: &str) {
        let body = line.trim_start_matches('#').trim();
        if let Some((k, v)) = body.split_once('=') {
            self.entries.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
}

/// Units line written at the top of every trajectory file.
pub const TRAJECTORY_UNITS: &str =
    "# units: time in 1/rate-unit, amplitudes in sqrt(rate-unit), couplings in rate-unit, energies normalized to the input pulse";

/// Metadata describing a trajectory's grid and delay.
pub fn trajectory_metadata(meta: &TrajectoryMeta) -> Metadata {
    let mut m = Metadata::default();
    m.push("dt", meta.dt)
        .push("steps", meta.steps)
        .push("two_pass", meta.two_pass)
        .push("delay_requested", meta.delay_requested)
        .push("delay", meta.delay)
        .push("delay_snap", snap_name(meta.delay_snap))
        .push("kappa_i", meta.kappa_i);
    if let Some(s) = meta.stop_time {
        m.push("stop_time", s);
    }
    m
}

/// Writes a trajectory with the default metadata plus `extra` entries.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &Trajectory, extra: &Metadata) -> Result<()> {
    let mut out = String::with_capacity(64 * (traj.len() + 16));
    out.push_str(TRAJECTORY_UNITS);
    out.push('\n');
    trajectory_metadata(&traj.meta).write_to(&mut out);
    extra.write_to(&mut out);
    w.write_all(out.as_bytes())?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(COLUMNS)?;
    let cols = traj.columns();
    let mut buf = vec![String::new(); COLUMNS.len()];
    for i in 0..traj.len() {
        for (c, col) in cols.iter().enumerate() {
            buf[c].clear();
            let _ = write!(buf[c], "{:?}", col[i]);
        }
        csv.write_record(&buf)?;
    }
    csv.flush()?;
    Ok(())
}

/// Parsed trajectory CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTable {
    pub metadata: Metadata,
    /// One vector per column of [`COLUMNS`].
    pub columns: Vec<Vec<f64>>,
}

impl TrajectoryTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        COLUMNS.iter().position(|c| *c == name).map(|i| self.columns[i].as_slice())
    }
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

struct RawTable {
    metadata: Metadata,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read_table<R: Read>(mut r: R) -> Result<RawTable> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut metadata = Metadata::default();
    for line in text.lines().filter(|l| l.starts_with('#')) {
        metadata.parse_line(line);
    }
    let mut reader =
        csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.iter().all(String::is_empty) {
        return Err(Error::InvalidArgument("missing header row".into()));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("line {line}: cannot parse {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(RawTable { metadata, header, rows })
}

fn check_header(found: &[String], expected: &[&str]) -> Result<()> {
    if found.len() != expected.len() || found.iter().zip(expected).any(|(f, e)| f != e) {
        return Err(Error::InvalidArgument(format!(
            "unexpected header {:?}, expected {:?}",
            found, expected
        )));
    }
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(r: R) -> Result<TrajectoryTable> {
    let raw = read_table(r)?;
    check_header(&raw.header, &COLUMNS)?;
    let mut columns = vec![Vec::with_capacity(raw.rows.len()); COLUMNS.len()];
    for row in raw.rows {
        for (c, v) in row.into_iter().enumerate() {
            columns[c].push(v);
        }
    }
    Ok(TrajectoryTable { metadata: raw.metadata, columns })
}

/// Metadata describing a loss grid.
pub fn grid_metadata(meta: &GridMeta) -> Metadata {
    let mut m = Metadata::default();
    m.push("pulse", pulse_name(meta.pulse))
        .push("dt", meta.dt)
        .push("refine_dt", meta.refine_dt)
        .push("kappa_i", meta.kappa_i)
        .push("delay_policy", &meta.delay_policy);
    m
}

pub fn snap_name(snap: DelaySnap) -> &'static str {
    match snap {
        DelaySnap::SnapToGrid => "snap_to_grid",
        DelaySnap::SnapUp => "snap_up",
    }
}

pub fn pulse_name(kind: PulseKind) -> &'static str {
    match kind {
        PulseKind::Square => "square",
        PulseKind::ExpDecay => "exp_decay",
        PulseKind::Tabulated => "tabulated",
    }
}

/// Writes a loss grid in long form, κ2 varying fastest.
pub fn write_heatmap_csv<W: Write>(mut w: W, grid: &LossGrid) -> Result<()> {
    let mut out = String::new();
    grid_metadata(&grid.meta).write_to(&mut out);
    w.write_all(out.as_bytes())?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(HEATMAP_COLUMNS)?;
    for (i, k1) in grid.kappa1_axis.iter().enumerate() {
        for (j, k2) in grid.kappa2_axis.iter().enumerate() {
            csv.write_record([k1, k2, &grid.loss[i][j], &grid.log10_loss[i][j]].map(|v| format!("{v:?}")))?;
        }
    }
    csv.flush()?;
    Ok(())
}

/// Parsed heatmap CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatmapTable {
    pub metadata: Metadata,
    pub kappa1_axis: Vec<f64>,
    pub kappa2_axis: Vec<f64>,
    pub loss: Vec<Vec<f64>>,
    pub log10_loss: Vec<Vec<f64>>,
}

fn bits_eq(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

pub fn read_heatmap_csv<R: Read>(r: R) -> Result<HeatmapTable> {
    let raw = read_table(r)?;
    check_header(&raw.header, &HEATMAP_COLUMNS)?;
    let mut kappa1_axis: Vec<f64> = Vec::new();
    let mut kappa2_axis: Vec<f64> = Vec::new();
    for row in &raw.rows {
        if kappa1_axis.last().map_or(true, |&k| !bits_eq(k, row[0])) {
            kappa1_axis.push(row[0]);
        }
        if kappa1_axis.len() == 1 {
            kappa2_axis.push(row[1]);
        }
    }
    let n2 = kappa2_axis.len();
    if n2 == 0 || raw.rows.len() != kappa1_axis.len() * n2 {
        return Err(Error::InvalidArgument("heatmap rows do not form a full grid".into()));
    }
    let mut loss = Vec::with_capacity(kappa1_axis.len());
    let mut log10_loss = Vec::with_capacity(kappa1_axis.len());
    for (i, chunk) in raw.rows.chunks(n2).enumerate() {
        for (j, row) in chunk.iter().enumerate() {
            if !bits_eq(row[0], kappa1_axis[i]) || !bits_eq(row[1], kappa2_axis[j]) {
                return Err(Error::InvalidArgument(format!(
                    "heatmap row for cell ({i}, {j}) is out of order"
                )));
            }
        }
        loss.push(chunk.iter().map(|r| r[2]).collect());
        log10_loss.push(chunk.iter().map(|r| r[3]).collect());
    }
    Ok(HeatmapTable { metadata: raw.metadata, kappa1_axis, kappa2_axis, loss, log10_loss })
}

impl HeatmapTable {
    /// Rebuilds a grid; `log10_loss` is recomputed from `loss` and compared.
    pub fn consistent(&self) -> bool {
        self.loss
            .iter()
            .flatten()
            .zip(self.log10_loss.iter().flatten())
            .all(|(&l, &g)| bits_eq(log10_clamped(l), g))
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Path of the run log kept next to an output file (`<output>.log`).
pub fn sidecar_log_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".log");
    PathBuf::from(s)
}

/// Writes the sidecar log. Timestamps live here so the artifact itself stays
/// byte-identical across runs.
pub fn write_sidecar_log(output: &Path, lines: &[String]) -> Result<()> {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let mut body = format!("written_unix_time={stamp}\noutput={}\n", output.display());
    for l in lines {
        body.push_str(l);
        body.push('\n');
    }
    std::fs::write(sidecar_log_path(output), body)?;
    Ok(())
}
