use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GameKind, HarnessError, SweepReport};

pub const CSV_HEADER: &str = "game,n,b,R,maker_wins,win_rate,ci_lo,ci_hi,mean_rounds";

/// One line of the sweep table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub game: GameKind,
    pub n: usize,
    pub b: usize,
    #[serde(rename = "R")]
    pub reps: usize,
    pub maker_wins: usize,
    pub win_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_rounds: f64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn fmt_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Full report as pretty JSON.
pub fn write_report(report: &SweepReport, path: &Path) -> Result<(), HarnessError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| fmt_err(path, e))?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn load_report(path: &Path) -> Result<SweepReport, HarnessError> {
    let r = BufReader::new(File::open(path).map_err(io_err(path))?);
    let report: SweepReport = serde_json::from_reader(r).map_err(|e| fmt_err(path, e))?;
    if report.schema_version != super::SCHEMA_VERSION {
        return Err(fmt_err(
            path,
            format!("unsupported schema_version {}", report.schema_version),
        ));
    }
    Ok(report)
}

/// One row per sweep point. An empty sweep still gets the header.
pub fn write_csv(report: &SweepReport, path: &Path) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    w.write_record(CSV_HEADER.split(','))
        .map_err(|e| fmt_err(path, e))?;
    for p in &report.points {
        w.serialize(CsvRow {
            game: p.game,
            n: p.n,
            b: p.b,
            reps: p.reps,
            maker_wins: p.maker_wins,
            win_rate: p.win_rate,
            ci_lo: p.ci_lo,
            ci_hi: p.ci_hi,
            mean_rounds: p.mean_rounds,
        })
        .map_err(|e| fmt_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn load_csv(path: &Path) -> Result<Vec<CsvRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| fmt_err(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| fmt_err(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.join(",") != CSV_HEADER {
        return Err(fmt_err(
            path,
            format!("unexpected header {:?}", header.join(",")),
        ));
    }
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| fmt_err(path, e))
}
