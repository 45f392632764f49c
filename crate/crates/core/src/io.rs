//! File formats: datasets and hypothesis tables as CSV, transcripts as JSON lines.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::general::HypothesisTable;
use crate::oracle::TranscriptEntry;
use crate::point::{PointSet, Sign};

/// Read a dataset with header `id,x1,...,xd`. Ids must be `0..n` in any order.
pub fn read_dataset(path: impl AsRef<Path>) -> Result<PointSet> {
    read_dataset_from(File::open(path)?)
}

pub fn read_dataset_from(reader: impl Read) -> Result<PointSet> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("id") || header.len() < 2 {
        return Err(Error::InvalidInput("dataset header must be id,x1,...,xd".into()));
    }
    let d = header.len() - 1;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let id: usize = parse_field(&rec[0])?;
        let x = (1..=d).map(|j| parse_field(&rec[j])).collect::<Result<Vec<f64>>>()?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate for id {id}")));
        }
        rows.push((id, x));
    }
    rows.sort_by_key(|r| r.0);
    if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
        return Err(Error::InvalidInput("ids must be exactly 0..n".into()));
    }
    let mut set = PointSet::new(d);
    for (_, x) in rows {
        set.push(&x)?;
    }
    Ok(set)
}

fn parse_field<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::InvalidInput(format!("cannot parse field {s:?}")))
}

pub fn write_dataset(path: impl AsRef<Path>, set: &PointSet) -> Result<()> {
    write_dataset_to(File::create(path)?, set)
}

pub fn write_dataset_to(writer: impl Write, set: &PointSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_string()];
    header.extend((1..=set.dim()).map(|j| format!("x{j}")));
    w.write_record(&header)?;
    for (id, x) in set.iter().enumerate() {
        let mut rec = vec![id.to_string()];
        rec.extend(x.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a hypothesis table: header lists point ids, each row is one hypothesis
/// with entries `1`/`+1`/`-1`. Columns may appear in any order.
pub fn read_hypothesis_table(path: impl AsRef<Path>) -> Result<HypothesisTable> {
    read_hypothesis_table_from(File::open(path)?)
}

pub fn read_hypothesis_table_from(reader: impl Read) -> Result<HypothesisTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let ids: Vec<usize> = rdr.headers()?.iter().map(parse_field).collect::<Result<_>>()?;
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    if sorted.iter().enumerate().any(|(i, &id)| id != i) {
        return Err(Error::InvalidInput("table header must list point ids 0..n".into()));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let mut row = vec![Sign::Pos; ids.len()];
        for (col, field) in rec.iter().enumerate() {
            let v: i8 = parse_field(field.trim_start_matches('+'))?;
            row[ids[col]] = Sign::try_from(v).map_err(Error::InvalidInput)?;
        }
        rows.push(row);
    }
    HypothesisTable::new(&rows)
}

pub fn write_hypothesis_table(path: impl AsRef<Path>, table: &HypothesisTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record((0..table.num_points()).map(|i| i.to_string()))?;
    for row in table.rows() {
        w.write_record(row.iter().map(|s| s.to_i8().to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line: `{"region": ..., "label": ±1, "answer": 0|1}`.
pub fn write_transcript(writer: impl Write, entries: &[TranscriptEntry]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for e in entries {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_transcript(reader: impl Read) -> Result<Vec<TranscriptEntry>> {
    let mut out = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
