use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::{SuiteError, SuiteReport};
use crate::connections::{flat_connection, levi_civita, ChristoffelField};
use crate::fields::{Atlas, DEFAULT_STEP};
use crate::geodesics::{integrate_geodesic, GeodesicPath, InitialCondition, IntegrationOptions};
use crate::models::{beltrami_metric, round_metric, ModelKind, SL3Matrix, SurfaceModel};

pub const REPORT_CSV_HEADER: &str = "suite,check,residual,bound,tolerance,passed,runtime_ms";
pub const GEODESICS_CSV_HEADER: &str = "geodesic,chart_id,u,v,x,y,z";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Pretty JSON with every float written as `d.ddddddddddddddddde±x`
/// (17 significant digits, enough to round-trip any `f64`).
struct Fixed17<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn strip(report: &SuiteReport, timings: bool) -> SuiteReport {
    if timings {
        report.clone()
    } else {
        report.without_timings()
    }
}

/// Runtimes are dropped unless `timings` is set, so identical runs give
/// identical bytes.
pub fn report_json(report: &SuiteReport, timings: bool) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fixed17(PrettyFormatter::new()));
    strip(report, timings)
        .serialize(&mut ser)
        .expect("report serializes");
    out.push(b'\n');
    String::from_utf8(out).expect("json is utf-8")
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn report_csv(report: &SuiteReport, timings: bool) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(REPORT_CSV_HEADER.split(','))
        .expect("in-memory write");
    for c in &strip(report, timings).checks {
        w.write_record([
            c.suite.clone(),
            c.name.clone(),
            c.residual.map(float).unwrap_or_default(),
            c.bound.as_str().to_string(),
            float(c.tolerance),
            c.passed.to_string(),
            c.runtime_ms.map(float).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn io_error(path: &Path, source: io::Error) -> SuiteError {
    SuiteError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), SuiteError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path.file_name().ok_or_else(|| {
        io_error(
            path,
            io::Error::new(io::ErrorKind::InvalidInput, "not a file path"),
        )
    })?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_error(path, e));
    }
    Ok(())
}

pub fn emit_report(
    report: &SuiteReport,
    path: &Path,
    format: Format,
    timings: bool,
) -> Result<(), SuiteError> {
    let text = match format {
        Format::Json => report_json(report, timings),
        Format::Csv => report_csv(report, timings),
    };
    write_atomic(path, text.as_bytes())
}

pub fn read_report(path: &Path) -> Result<SuiteReport, SuiteError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| io_error(path, io::Error::new(io::ErrorKind::InvalidData, e)))
}

/// Which connection to integrate on a model.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    /// Round metric of the sphere model.
    Round,
    /// Pullback of the round metric by a projective transformation.
    Beltrami(SL3Matrix),
    /// Euclidean metric (plane and torus).
    Flat,
}

impl MetricSpec {
    pub fn connection(&self, model: &SurfaceModel) -> Result<ChristoffelField, SuiteError> {
        let sphere = match model.kind {
            ModelKind::Sphere { radius } => Some(radius),
            _ => None,
        };
        match (self, sphere) {
            (MetricSpec::Round, Some(r)) => Ok(levi_civita(&round_metric(r), DEFAULT_STEP)),
            (MetricSpec::Beltrami(psi), Some(r)) if r == 1.0 => {
                Ok(levi_civita(&beltrami_metric(psi).metric, DEFAULT_STEP))
            }
            (MetricSpec::Flat, None) => Ok(flat_connection()),
            _ => Err(SuiteError::Usage(format!(
                "metric {self:?} is not defined on model {}",
                model.name
            ))),
        }
    }
}

/// One row per sample: chart coordinates and, on the sphere, the embedded
/// point (empty `x,y,z` otherwise).
pub fn geodesics_csv(paths: &[GeodesicPath]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(GEODESICS_CSV_HEADER.split(','))
        .expect("in-memory write");
    for (k, path) in paths.iter().enumerate() {
        for (i, p) in path.samples.iter().enumerate() {
            let xyz = path.embedded.as_ref().map(|e| e[i]);
            let c = |j: usize| xyz.map(|x| x[j].to_string()).unwrap_or_default();
            w.write_record([
                k.to_string(),
                p.chart.to_string(),
                p.u.to_string(),
                p.v.to_string(),
                c(0),
                c(1),
                c(2),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Integrates one geodesic per initial condition and writes the samples.
pub fn emit_geodesics(
    model: &SurfaceModel,
    spec: &MetricSpec,
    ics: &[InitialCondition],
    options: &IntegrationOptions,
    path: &Path,
) -> Result<Vec<GeodesicPath>, SuiteError> {
    let conn = spec.connection(model)?;
    for ic in ics {
        if !model.contains(&ic.point) {
            return Err(SuiteError::Usage(format!(
                "initial point {:?} is not on model {}",
                ic.point, model.name
            )));
        }
    }
    let paths = ics
        .iter()
        .map(|ic| integrate_geodesic(&conn, ic, model, options))
        .collect::<crate::Result<Vec<_>>>()?;
    write_atomic(path, geodesics_csv(&paths).as_bytes())?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::{Bound, CheckRecord, SuiteConfig};
    use proptest::prelude::*;

    fn arb_record() -> impl Strategy<Value = CheckRecord> {
        (
            proptest::option::of(
                proptest::num::f64::NORMAL
                    | proptest::num::f64::SUBNORMAL
                    | proptest::num::f64::ZERO,
            ),
            proptest::num::f64::POSITIVE,
            any::<bool>(),
            proptest::option::of(0.0..1e6f64),
            "[a-z_]{1,12}",
        )
            .prop_map(|(residual, tolerance, max, runtime_ms, name)| CheckRecord {
                suite: "jets".into(),
                name,
                residual,
                bound: if max { Bound::Max } else { Bound::Min },
                tolerance,
                passed: residual.is_some(),
                runtime_ms,
                note: residual.is_none().then(|| "not evaluated".into()),
            })
    }

    proptest! {
        #[test]
        fn json_round_trips_every_float(checks in proptest::collection::vec(arb_record(), 0..6), h in 1e-8..1.0f64, seed in any::<u64>()) {
            let config = SuiteConfig { h, seed, tol: Some(h / 3.0), ..SuiteConfig::default() };
            let passed = checks.iter().all(|c| c.passed);
            let r = SuiteReport { suite: "jets".into(), config, checks, passed };
            let back: SuiteReport = serde_json::from_str(&report_json(&r, true)).unwrap();
            prop_assert_eq!(back, r.clone());
            let csv = report_csv(&r, true);
            prop_assert_eq!(csv.lines().count(), r.checks.len() + 1);
        }
    }

    #[test]
    fn floats_carry_seventeen_digits() {
        let mut out = Vec::new();
        let mut ser =
            serde_json::Serializer::with_formatter(&mut out, Fixed17(PrettyFormatter::new()));
        vec![0.1, -2.5e-300, 1.0].serialize(&mut ser).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(
            s.contains("1.0000000000000001e-1")
                && s.contains("-2.5000000000000000e-300")
                && s.contains("1.0000000000000000e0")
        );
    }
}
