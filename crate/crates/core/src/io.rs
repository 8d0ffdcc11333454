//! CSV persistence for archives, metric curves, run stats, transfer logs,
//! selections and target sets. Floats are written in shortest round-trip
//! form, so reading a file back reproduces every value exactly.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::Error;
use crate::evolution::GenerationStats;
use crate::gait::{Genotype, GENOTYPE_LEN};
use crate::geometry::Endpoint;
use crate::metrics::{Accuracy, Cell, MetricsRow};
use crate::repertoire::ControllerRecord;
use crate::sim::{simulate, WorldParams};
use crate::surrogate::TransferRecord;

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = Path::new(&tmp);
    {
        let mut f = fs::File::create(tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

fn genotype_header() -> impl Iterator<Item = String> {
    (0..GENOTYPE_LEN).map(|i| format!("g{i}"))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, Error> {
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// One archive line.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchiveRow {
    pub id: u64,
    pub source: String,
    pub genotype: Genotype,
    pub endpoint: Endpoint,
    pub alpha: f64,
    pub quality: f64,
    pub t_hat: f64,
    pub novelty_at_insert: f64,
}

impl ArchiveRow {
    pub fn from_record(source: &str, r: &ControllerRecord) -> Self {
        Self {
            id: r.id,
            source: source.to_string(),
            genotype: r.genotype,
            endpoint: r.endpoint(),
            alpha: r.yaw(),
            quality: r.quality,
            t_hat: r.t_hat,
            novelty_at_insert: r.novelty,
        }
    }

    /// Re-simulates the genotype in `sim` and restores the stored scores.
    /// Fails when the rollout does not reproduce the stored endpoint.
    pub fn to_record(&self, sim: &WorldParams) -> Result<ControllerRecord, Error> {
        let outcome = simulate(&self.genotype, sim);
        if outcome.endpoint != self.endpoint || outcome.yaw != self.alpha {
            return Err(Error::Schema {
                file: "archive".into(),
                reason: format!(
                    "record {}: stored endpoint ({}, {}) differs from its rollout ({}, {})",
                    self.id, self.endpoint.x, self.endpoint.y, outcome.endpoint.x, outcome.endpoint.y
                ),
            });
        }
        let mut rec = ControllerRecord::new(self.id, self.genotype, outcome, &Default::default());
        rec.quality = self.quality;
        rec.t_hat = self.t_hat;
        rec.novelty = self.novelty_at_insert;
        Ok(rec)
    }

    fn header() -> Vec<String> {
        let mut h = vec!["id".to_string(), "source".to_string()];
        h.extend(genotype_header());
        h.extend(["ex", "ey", "alpha", "quality", "t_hat", "novelty_at_insert"].map(String::from));
        h
    }

    fn fields(&self) -> Vec<String> {
        let mut f = vec![self.id.to_string(), self.source.clone()];
        f.extend(self.genotype.values().iter().map(|v| v.to_string()));
        f.extend(
            [self.endpoint.x, self.endpoint.y, self.alpha, self.quality, self.t_hat, self.novelty_at_insert]
                .map(|v| v.to_string()),
        );
        f
    }

    fn parse(rec: &csv::StringRecord, offset: usize, file: &str) -> Result<Self, Error> {
        let schema = |reason: String| Error::Schema { file: file.to_string(), reason };
        let get = |i: usize| rec.get(offset + i).ok_or_else(|| schema(format!("missing column {}", offset + i)));
        let num = |i: usize| -> Result<f64, Error> {
            let s = get(i)?;
            s.trim().parse::<f64>().map_err(|_| schema(format!("bad number {s:?} in column {}", offset + i)))
        };
        let id = get(0)?.trim().parse::<u64>().map_err(|_| schema(format!("bad id {:?}", rec.get(offset))))?;
        let values: Vec<f64> = (0..GENOTYPE_LEN).map(|i| num(2 + i)).collect::<Result<_, _>>()?;
        let genotype = Genotype::from_values(&values)?;
        let b = 2 + GENOTYPE_LEN;
        Ok(Self {
            id,
            source: get(1)?.to_string(),
            genotype,
            endpoint: Endpoint::new(num(b)?, num(b + 1)?),
            alpha: num(b + 2)?,
            quality: num(b + 3)?,
            t_hat: num(b + 4)?,
            novelty_at_insert: num(b + 5)?,
        })
    }
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[String], file: &str) -> Result<(), Error> {
    let got: Vec<String> = reader.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if got != expected {
        return Err(Error::Schema {
            file: file.to_string(),
            reason: format!("expected header {}, found {}", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

pub fn archive_csv(rows: &[ArchiveRow]) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ArchiveRow::header())?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    finish(w)
}

pub fn parse_archive_csv(text: impl Read, file: &str) -> Result<Vec<ArchiveRow>, Error> {
    let mut reader = csv::Reader::from_reader(text);
    check_header(&mut reader, &ArchiveRow::header(), file)?;
    reader.records().map(|rec| ArchiveRow::parse(&rec?, 0, file)).collect()
}

pub fn read_archive(path: &Path) -> Result<Vec<ArchiveRow>, Error> {
    parse_archive_csv(fs::File::open(path)?, &path.display().to_string())
}

pub fn write_archive(path: &Path, source: &str, records: &[ControllerRecord]) -> Result<(), Error> {
    let rows: Vec<ArchiveRow> = records.iter().map(|r| ArchiveRow::from_record(source, r)).collect();
    write_atomic(path, &archive_csv(&rows)?)
}

/// One selection line: the cell followed by an archive row.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionRow {
    pub cell: Cell,
    pub row: ArchiveRow,
}

fn selection_header() -> Vec<String> {
    let mut h = vec!["lobe".to_string(), "angular".to_string(), "radial".to_string()];
    h.extend(ArchiveRow::header());
    h
}

pub fn selection_csv(rows: &[SelectionRow]) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(selection_header())?;
    for r in rows {
        let lobe = if r.cell.rear { "rear" } else { "front" };
        let mut f = vec![lobe.to_string(), r.cell.angular.to_string(), r.cell.radial.to_string()];
        f.extend(r.row.fields());
        w.write_record(f)?;
    }
    finish(w)
}

pub fn read_selection(path: &Path) -> Result<Vec<SelectionRow>, Error> {
    let file = path.display().to_string();
    let mut reader = csv::Reader::from_reader(fs::File::open(path)?);
    check_header(&mut reader, &selection_header(), &file)?;
    let schema = |reason: String| Error::Schema { file: file.clone(), reason };
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            let rear = match rec.get(0).map(str::trim) {
                Some("front") => false,
                Some("rear") => true,
                other => return Err(schema(format!("bad lobe {other:?}"))),
            };
            let index = |i: usize| {
                rec.get(i)
                    .and_then(|s| s.trim().parse::<usize>().ok())
                    .ok_or_else(|| schema(format!("bad cell index {:?}", rec.get(i))))
            };
            let cell = Cell { rear, angular: index(1)?, radial: index(2)? };
            Ok(SelectionRow { cell, row: ArchiveRow::parse(&rec, 3, &file)? })
        })
        .collect()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "evaluations",
        "archive_size",
        "sparseness",
        "orientation_error",
        "median_orientation_error",
        "transferable",
    ])?;
    for r in rows {
        w.write_record([
            r.evaluations.to_string(),
            r.archive_size.to_string(),
            opt(r.sparseness),
            opt(r.orientation_error),
            opt(r.median_orientation_error),
            r.transferable.to_string(),
        ])?;
    }
    finish(w)
}

pub fn stats_csv(rows: &[GenerationStats]) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["generation", "evaluations", "archive_size", "transferable", "median_quality"])?;
    for s in rows {
        w.write_record([
            s.generation.to_string(),
            s.evaluations.to_string(),
            s.archive_size.to_string(),
            s.transferable.to_string(),
            opt(s.median_quality),
        ])?;
    }
    finish(w)
}

pub fn transfers_csv(rows: &[TransferRecord]) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = genotype_header().collect();
    header.extend(["sim_x", "sim_y", "real_x", "real_y", "score"].map(String::from));
    w.write_record(header)?;
    for t in rows {
        let mut f: Vec<String> = t.genotype.values().iter().map(|v| v.to_string()).collect();
        f.extend([t.sim_endpoint.x, t.sim_endpoint.y, t.real_endpoint.x, t.real_endpoint.y, t.score].map(|v| v.to_string()));
        w.write_record(f)?;
    }
    finish(w)
}

pub fn targets_csv(targets: &[Endpoint]) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "x", "y"])?;
    for (i, t) in targets.iter().enumerate() {
        w.write_record([i.to_string(), t.x.to_string(), t.y.to_string()])?;
    }
    finish(w)
}

/// Per-record accuracy lines of a transfer evaluation.
pub fn accuracy_csv(rows: &[Accuracy]) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "sim_x", "sim_y", "real_x", "real_y", "accuracy"])?;
    for a in rows {
        w.write_record(
            [a.id.to_string()].into_iter().chain([a.sim.x, a.sim.y, a.real.x, a.real.y, a.accuracy].map(|v| v.to_string())),
        )?;
    }
    finish(w)
}
