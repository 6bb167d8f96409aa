//! Result files and their readers.
//!
//! CSV files use `,` separators, `.` decimals and a fixed column order.
//! Numbers are written in the shortest form that reads back to the same
//! `f64`, so a write/read cycle is lossless.
//!
//! Field snapshots use the legacy VTK ASCII `STRUCTURED_POINTS` layout:
//!
//! ```text
//! # vtk DataFile Version 3.0
//! <title>
//! ASCII
//! DATASET STRUCTURED_POINTS
//! DIMENSIONS nx ny nz
//! ORIGIN x0 y0 z0            (centre of the first cell, m)
//! SPACING dx dy dz
//! POINT_DATA nx*ny*nz
//! SCALARS temperature double 1
//! LOOKUP_TABLE default
//! <one value per line, x fastest, then y, then z>
//! SCALARS domain int 1
//! LOOKUP_TABLE default
//! <0 void, 1 workpiece, 2 backing>
//! ```
//!
//! Each cell centre is one point. Void cells carry the initial temperature.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Read, Write};

use fsw_core::calibration::CalibrationReport;
use fsw_core::flow::Streamline;
use fsw_core::thermal::{CellTag, EnergyLedger, Face, Grid, RunHistory};

use crate::units::format_number as num;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        line,
        message: message.into(),
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64, FormatError> {
    field
        .trim()
        .parse()
        .map_err(|_| malformed(line, format!("`{field}` is not a number")))
}

/// Probe temperatures against time.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub probes: Vec<String>,
    pub times: Vec<f64>,
    /// `samples[p][n]` belongs to `probes[p]` at `times[n]`.
    pub samples: Vec<Vec<f64>>,
}

impl From<&RunHistory> for Traces {
    fn from(h: &RunHistory) -> Self {
        Self {
            probes: h.probe_names.clone(),
            times: h.times.clone(),
            samples: h.samples.clone(),
        }
    }
}

/// Header `time_s,<probe>_K,...`.
pub fn write_traces<W: Write>(out: W, traces: &Traces) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["time_s".to_string()];
    header.extend(traces.probes.iter().map(|p| format!("{p}_K")));
    w.write_record(&header)?;
    for (n, t) in traces.times.iter().enumerate() {
        let mut row = vec![num(*t)];
        row.extend(traces.samples.iter().map(|s| num(s[n])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_traces<R: Read>(input: R) -> Result<Traces, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("time_s") {
        return Err(malformed(1, "first column must be `time_s`"));
    }
    let probes = header
        .iter()
        .skip(1)
        .map(|h| h.strip_suffix("_K").map(str::to_string))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| malformed(1, "probe columns must end in `_K`"))?;
    let mut traces = Traces {
        samples: vec![Vec::new(); probes.len()],
        probes,
        times: Vec::new(),
    };
    for (n, record) in r.records().enumerate() {
        let record = record?;
        let line = n + 2;
        traces.times.push(parse_f64(&record[0], line)?);
        for (p, field) in record.iter().skip(1).enumerate() {
            traces.samples[p].push(parse_f64(field, line)?);
        }
    }
    Ok(traces)
}

/// One row of the energy ledger file.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    /// Phase index, or `total`.
    pub phase: String,
    pub kind: String,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
    pub ledger: EnergyLedger,
}

fn ledger_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "phase",
        "kind",
        "start_s",
        "end_s",
        "steps",
        "deposited_J",
        "stored_J",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(Face::ALL.iter().map(|f| format!("loss_{}_J", f.name())));
    h.push("residual_J".into());
    h
}

pub fn ledger_rows(h: &RunHistory) -> Vec<LedgerRow> {
    let mut rows: Vec<LedgerRow> = h
        .phases
        .iter()
        .enumerate()
        .map(|(i, p)| LedgerRow {
            phase: i.to_string(),
            kind: p.kind.name().into(),
            start: p.start,
            end: p.end,
            steps: p.steps,
            ledger: p.ledger,
        })
        .collect();
    rows.push(LedgerRow {
        phase: "total".into(),
        kind: "all".into(),
        start: h.phases.first().map_or(0.0, |p| p.start),
        end: h.phases.last().map_or(0.0, |p| p.end),
        steps: h.steps,
        ledger: h.ledger,
    });
    rows
}

pub fn write_ledger<W: Write>(out: W, rows: &[LedgerRow]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ledger_header())?;
    for r in rows {
        let l = &r.ledger;
        let mut rec = vec![
            r.phase.clone(),
            r.kind.clone(),
            num(r.start),
            num(r.end),
            r.steps.to_string(),
        ];
        rec.push(num(l.deposited));
        rec.push(num(l.stored));
        rec.extend(l.losses.iter().map(|v| num(*v)));
        rec.push(num(l.residual()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ledger<R: Read>(input: R) -> Result<Vec<LedgerRow>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?
        .iter()
        .ne(ledger_header().iter().map(String::as_str))
    {
        return Err(malformed(1, "unexpected ledger header"));
    }
    let mut rows = Vec::new();
    for (n, record) in r.records().enumerate() {
        let rec = record?;
        let line = n + 2;
        let mut losses = [0.0; 6];
        for (i, l) in losses.iter_mut().enumerate() {
            *l = parse_f64(&rec[7 + i], line)?;
        }
        rows.push(LedgerRow {
            phase: rec[0].to_string(),
            kind: rec[1].to_string(),
            start: parse_f64(&rec[2], line)?,
            end: parse_f64(&rec[3], line)?,
            steps: rec[4]
                .parse()
                .map_err(|_| malformed(line, "steps must be an integer"))?,
            ledger: EnergyLedger {
                deposited: parse_f64(&rec[5], line)?,
                stored: parse_f64(&rec[6], line)?,
                losses,
            },
        });
    }
    Ok(rows)
}

/// A scalar field on cell centres, as stored in a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct VtkField {
    pub title: String,
    pub dims: [usize; 3],
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub temperature: Vec<f64>,
    pub domain: Vec<u8>,
}

impl VtkField {
    pub fn new(
        title: impl Into<String>,
        grid: &Grid,
        temperature: &[f64],
        tags: &[CellTag],
    ) -> Self {
        Self {
            title: title.into(),
            dims: [grid.nx, grid.ny, grid.nz],
            origin: grid.center(0, 0, 0),
            spacing: [grid.dx, grid.dy, grid.dz],
            temperature: temperature.to_vec(),
            domain: tags.iter().map(|t| t.code()).collect(),
        }
    }
}

pub fn write_vtk<W: Write>(out: W, field: &VtkField) -> io::Result<()> {
    let mut w = io::BufWriter::new(out);
    let [nx, ny, nz] = field.dims;
    let v3 = |v: [f64; 3]| format!("{} {} {}", num(v[0]), num(v[1]), num(v[2]));
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", field.title.replace('\n', " "))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {nx} {ny} {nz}")?;
    writeln!(w, "ORIGIN {}", v3(field.origin))?;
    writeln!(w, "SPACING {}", v3(field.spacing))?;
    writeln!(w, "POINT_DATA {}", nx * ny * nz)?;
    writeln!(w, "SCALARS temperature double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for t in &field.temperature {
        writeln!(w, "{}", num(*t))?;
    }
    writeln!(w, "SCALARS domain int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for d in &field.domain {
        writeln!(w, "{d}")?;
    }
    w.flush()
}

pub fn read_vtk<R: BufRead>(input: R) -> Result<VtkField, FormatError> {
    let lines: Vec<String> = input.lines().collect::<Result<_, _>>()?;
    let get = |n: usize| {
        lines
            .get(n)
            .map(String::as_str)
            .ok_or_else(|| malformed(n + 1, "file ends early"))
    };
    let expect = |n: usize, text: &str| -> Result<(), FormatError> {
        if get(n)?.trim() == text {
            Ok(())
        } else {
            Err(malformed(n + 1, format!("expected `{text}`")))
        }
    };
    let keyed = |n: usize, key: &str| -> Result<Vec<String>, FormatError> {
        let line = get(n)?;
        let rest = line
            .strip_prefix(key)
            .ok_or_else(|| malformed(n + 1, format!("expected `{key}`")))?;
        Ok(rest.split_whitespace().map(str::to_string).collect())
    };
    let triple = |n: usize, key: &str| -> Result<[f64; 3], FormatError> {
        let v = keyed(n, key)?;
        if v.len() != 3 {
            return Err(malformed(n + 1, "expected three values"));
        }
        Ok([
            parse_f64(&v[0], n + 1)?,
            parse_f64(&v[1], n + 1)?,
            parse_f64(&v[2], n + 1)?,
        ])
    };

    if !get(0)?.starts_with("# vtk DataFile") {
        return Err(malformed(1, "not a legacy VTK file"));
    }
    let title = get(1)?.to_string();
    expect(2, "ASCII")?;
    expect(3, "DATASET STRUCTURED_POINTS")?;
    let d = triple(4, "DIMENSIONS")?;
    let dims = [d[0] as usize, d[1] as usize, d[2] as usize];
    let origin = triple(5, "ORIGIN")?;
    let spacing = triple(6, "SPACING")?;
    let n = dims.iter().product::<usize>();
    let count: Vec<String> = keyed(7, "POINT_DATA")?;
    if count.len() != 1 || count[0].parse::<usize>().ok() != Some(n) {
        return Err(malformed(8, "POINT_DATA does not match DIMENSIONS"));
    }
    expect(8, "SCALARS temperature double 1")?;
    expect(9, "LOOKUP_TABLE default")?;
    let mut temperature = Vec::with_capacity(n);
    for i in 0..n {
        temperature.push(parse_f64(get(10 + i)?, 11 + i)?);
    }
    let base = 10 + n;
    expect(base, "SCALARS domain int 1")?;
    expect(base + 1, "LOOKUP_TABLE default")?;
    let mut domain = Vec::with_capacity(n);
    for i in 0..n {
        let line = base + 2 + i;
        domain.push(
            get(line)?
                .trim()
                .parse()
                .map_err(|_| malformed(line + 1, "bad domain code"))?,
        );
    }
    Ok(VtkField {
        title,
        dims,
        origin,
        spacing,
        temperature,
        domain,
    })
}

/// One vertex of a tracer polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamPoint {
    pub tracer: usize,
    pub step: usize,
    pub position: [f64; 3],
}

/// Columns `tracer_id,step,x,y,z`. Tracers without a path are skipped.
pub fn write_streamlines<W: Write>(
    out: W,
    lines: &[Option<&Streamline>],
) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tracer_id", "step", "x", "y", "z"])?;
    for (id, line) in lines.iter().enumerate() {
        let Some(line) = line else { continue };
        for (step, p) in line.points.iter().enumerate() {
            w.write_record([
                id.to_string(),
                step.to_string(),
                num(p[0]),
                num(p[1]),
                num(p[2]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_streamlines<R: Read>(input: R) -> Result<Vec<StreamPoint>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(["tracer_id", "step", "x", "y", "z"]) {
        return Err(malformed(1, "unexpected streamline header"));
    }
    let mut points = Vec::new();
    for (n, record) in r.records().enumerate() {
        let rec = record?;
        let line = n + 2;
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| malformed(line, "expected an integer"))
        };
        points.push(StreamPoint {
            tracer: int(&rec[0])?,
            step: int(&rec[1])?,
            position: [
                parse_f64(&rec[2], line)?,
                parse_f64(&rec[3], line)?,
                parse_f64(&rec[4], line)?,
            ],
        });
    }
    Ok(points)
}

/// Columns `iteration,evaluations,objective,spread,<parameter>...`.
pub fn write_convergence<W: Write>(out: W, report: &CalibrationReport) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["iteration", "evaluations", "objective", "spread"]
        .map(String::from)
        .to_vec();
    header.extend(report.parameters.iter().map(|p| p.name().to_string()));
    w.write_record(&header)?;
    for h in &report.history {
        let mut row = vec![
            h.iteration.to_string(),
            h.evaluations.to_string(),
            num(h.objective),
            num(h.spread),
        ];
        row.extend(h.values.iter().map(|v| num(*v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Header plus numeric rows of a convergence file.
pub fn read_convergence<R: Read>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>), FormatError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.len() < 4 || header[..4] != ["iteration", "evaluations", "objective", "spread"] {
        return Err(malformed(1, "unexpected convergence header"));
    }
    let mut rows = Vec::new();
    for (n, record) in r.records().enumerate() {
        rows.push(
            record?
                .iter()
                .map(|f| parse_f64(f, n + 2))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok((header, rows))
}

/// Plain-text `key = value` report with `#` comment lines.
pub fn format_report(report: &CalibrationReport, seed: Option<u64>) -> String {
    let mut s = String::from("# calibration report\n");
    let names: Vec<&str> = report.parameters.iter().map(|p| p.name()).collect();
    s += &format!("parameters = {}\n", names.join(", "));
    for (p, v) in report.parameters.iter().zip(&report.values) {
        s += &format!("{} = {}\n", p.name(), num(*v));
    }
    s += &format!("objective = {}\n", num(report.objective));
    s += &format!("converged = {}\n", report.converged);
    s += &format!("evaluations = {}\n", report.evaluations);
    s += &format!("iterations = {}\n", report.iterations);
    s += &format!("spread = {}\n", num(report.spread));
    for (p, v) in report.parameters.iter().zip(&report.start) {
        s += &format!("start_{} = {}\n", p.name(), num(*v));
    }
    s += &format!(
        "seed = {}\n",
        seed.map_or("none".to_string(), |v| v.to_string())
    );
    if let Some(c) = report.confirmation_objective {
        s += &format!("confirmation_objective = {}\n", num(c));
    }
    s
}

pub fn parse_report(text: &str) -> Result<BTreeMap<String, String>, FormatError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| malformed(n + 1, "expected `key = value`"))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Columns `quantity,value,unit`.
pub fn write_table<W: Write>(out: W, rows: &[(String, f64, &str)]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["quantity", "value", "unit"])?;
    for (q, v, u) in rows {
        w.write_record([q.as_str(), &num(*v), u])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table<R: Read>(input: R) -> Result<Vec<(String, f64, String)>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(["quantity", "value", "unit"]) {
        return Err(malformed(1, "unexpected table header"));
    }
    r.records()
        .enumerate()
        .map(|(n, rec)| {
            let rec = rec?;
            Ok((
                rec[0].to_string(),
                parse_f64(&rec[1], n + 2)?,
                rec[2].to_string(),
            ))
        })
        .collect()
}
