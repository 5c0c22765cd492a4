//! File formats: lattice snapshots (JSON), curvature, series, meridian,
//! Forman and correspondence tables (CSV), and run directories.
//!
//! Every float is written with 17 significant digits, which round-trips
//! `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureField;
use crate::embed::MeridianPolyline;
use crate::error::{Error, Result};
use crate::flow::{Event, LobeSummary, RunResult, SeriesRow};
use crate::forman::{CorrespondenceRow, WeightedGraph};
use crate::lattice::{EdgeClass, End, EndTreatment, Ends, NeckpinchLattice, VertexClass};

pub const FORMAT_VERSION: u32 = 1;

/// `x` with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn end_treatment_json(ends: Ends) -> String {
    let name = |t: EndTreatment| match t {
        EndTreatment::Cap => "cap",
        EndTreatment::Mirror => "mirror",
    };
    if ends.left == ends.right {
        format!("\"{}\"", name(ends.left))
    } else {
        format!(
            "{{\"left\": \"{}\", \"right\": \"{}\"}}",
            name(ends.left),
            name(ends.right)
        )
    }
}

fn float_array(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| fmt_float(x)).collect();
    format!("[{}]", items.join(", "))
}

/// Snapshot JSON of a lattice at time `t`.
pub fn lattice_to_json(lattice: &NeckpinchLattice, t: f64) -> String {
    let label = serde_json::to_string(lattice.label()).expect("strings serialize");
    format!(
        "{{\n  \"format\": {FORMAT_VERSION},\n  \"t\": {},\n  \"label\": {label},\n  \"n\": {},\n  \"end_treatment\": {},\n  \"s\": {},\n  \"a\": {}\n}}\n",
        fmt_float(t),
        lattice.n(),
        end_treatment_json(lattice.ends()),
        float_array(lattice.s()),
        float_array(lattice.a()),
    )
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum EndSpec {
    Uniform(EndTreatment),
    Mixed { left: EndTreatment, right: EndTreatment },
}

impl Default for EndSpec {
    fn default() -> Self {
        EndSpec::Uniform(EndTreatment::Cap)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeSpec {
    format: Option<u32>,
    #[serde(default)]
    t: f64,
    #[serde(default)]
    label: String,
    n: Option<usize>,
    s: Vec<f64>,
    a: Vec<f64>,
    #[serde(default)]
    end_treatment: EndSpec,
}

/// A lattice read back from snapshot JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFile {
    pub t: f64,
    pub lattice: NeckpinchLattice,
}

pub fn lattice_from_json(text: &str) -> Result<LatticeFile> {
    let spec: LatticeSpec = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("lattice JSON: {e}")))?;
    if let Some(f) = spec.format {
        if f != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!("unsupported format {f}")));
        }
    }
    if let Some(n) = spec.n {
        if n != spec.s.len() {
            return Err(Error::InvalidInput(format!(
                "n = {n} but {} section lengths given",
                spec.s.len()
            )));
        }
    }
    let ends = match spec.end_treatment {
        EndSpec::Uniform(t) => Ends::both(t),
        EndSpec::Mixed { left, right } => Ends { left, right },
    };
    let lattice = NeckpinchLattice::with_ends(spec.s, spec.a, ends, spec.label)?;
    Ok(LatticeFile { t: spec.t, lattice })
}

fn class_parts(class: EdgeClass) -> (&'static str, String) {
    match class {
        EdgeClass::Section(i) => ("s", i.to_string()),
        EdgeClass::Axial(i) => ("a", i.to_string()),
        EdgeClass::Spoke(end) => ("spoke", end_name(end).into()),
    }
}

fn vertex_parts(class: VertexClass) -> (&'static str, String) {
    match class {
        VertexClass::Ring(i) => ("ring", i.to_string()),
        VertexClass::Apex(end) => ("apex", end_name(end).into()),
    }
}

fn end_name(end: End) -> &'static str {
    match end {
        End::Left => "left",
        End::Right => "right",
    }
}

/// One row per edge class, then one per vertex class. Vertex rows carry
/// the dual volume in `A_or_V` and leave the edge-only columns empty.
pub fn curvature_csv(field: &CurvatureField) -> String {
    let mut out = String::from("class_type,index,multiplicity,length,eps,A_or_V,K,R,Rc\n");
    for e in &field.edges {
        let (kind, index) = class_parts(e.class);
        let _ = writeln!(
            out,
            "{kind},{index},{},{},{},{},{},{},{}",
            e.multiplicity,
            fmt_float(e.length),
            fmt_float(e.eps),
            fmt_float(e.dual_area),
            fmt_float(e.sectional),
            fmt_float(e.scalar),
            fmt_float(e.ricci)
        );
    }
    for v in &field.vertices {
        let (kind, index) = vertex_parts(v.class);
        let _ = writeln!(
            out,
            "{kind},{index},{},,,{},,{},",
            v.multiplicity,
            fmt_float(v.dual_volume),
            fmt_float(v.scalar)
        );
    }
    out
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn series_csv(rows: &[SeriesRow]) -> String {
    let mut out = String::from("t,lobe,s_min,rho_min,argmin,volume,max_abs_rc\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_float(r.t),
            csv_text(&r.lobe),
            fmt_float(r.s_min),
            fmt_float(r.rho_min),
            r.argmin,
            fmt_float(r.volume),
            fmt_float(r.max_abs_rc)
        );
    }
    out
}

pub fn meridian_csv(m: &MeridianPolyline) -> String {
    let mut out = String::from("i,z,rho,embeddable\n");
    for i in 0..m.len() {
        // ring i is flagged by the gap that reaches it; the first ring is always placed
        let ok = if i == 0 { true } else { m.embeddable[i - 1] };
        let _ = writeln!(out, "{},{},{},{}", i + 1, fmt_float(m.z[i]), fmt_float(m.rho[i]), ok);
    }
    out
}

pub fn forman_csv(graph: &WeightedGraph, values: &[f64]) -> String {
    let mut out = String::from("edge,u,v,w,rc_forman\n");
    for (k, &rc) in values.iter().enumerate() {
        let (u, v, w) = graph.edge(k);
        let _ = writeln!(
            out,
            "{k},{},{},{},{}",
            csv_text(graph.node_id(u)),
            csv_text(graph.node_id(v)),
            fmt_float(w),
            fmt_float(rc)
        );
    }
    out
}

pub fn correspondence_csv(rows: &[CorrespondenceRow]) -> String {
    let mut out =
        String::from("edge,side,vertex,neighbour,slot,theta,cos2_eps,area,rc_drf,rc_forman\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.edge,
            r.side,
            r.vertex,
            r.neighbour,
            r.slot,
            fmt_float(r.theta),
            fmt_float(r.cos2_eps),
            fmt_float(r.area),
            fmt_float(r.rc_drf),
            fmt_float(r.rc_forman)
        );
    }
    out
}

#[derive(Serialize)]
struct EventLog<'a> {
    format: u32,
    events: &'a [Event],
    lobes: &'a [LobeSummary],
}

pub fn events_json(run: &RunResult) -> String {
    let log = EventLog {
        format: FORMAT_VERSION,
        events: &run.events,
        lobes: &run.lobes,
    };
    let mut text = serde_json::to_string_pretty(&log).expect("events serialize");
    text.push('\n');
    text
}

/// Writes `contents` to `path`, mapping failures into [`Error::Io`].
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes `series.csv`, `events.json` and `snapshots/NNNN.json` into `dir`.
///
/// Snapshots are numbered in run order.
pub fn write_run(dir: &Path, run: &RunResult) -> Result<()> {
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps).map_err(|e| io_error(&snaps, e))?;
    write_file(&dir.join("series.csv"), &series_csv(&run.series))?;
    write_file(&dir.join("events.json"), &events_json(run))?;
    for (k, snap) in run.snapshots.iter().enumerate() {
        let path = snaps.join(format!("{k:04}.json"));
        write_file(&path, &lattice_to_json(&snap.lattice, snap.t))?;
    }
    Ok(())
}
