//! Sample CSV: a `# `-prefixed JSON metadata line, a header row, then one
//! row per sample. Columns are `t`, the scalar columns in
//! [`SCALAR_COLUMNS`] order, `dq_tau_<q>` and `dq_v_<q>` for each block.
//! Floats are written in shortest round-trip form (`{:?}`), so reading a file back
//! reproduces the samples bit for bit.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monitor::{CriterionSample, ReportOptions, SCALAR_COLUMNS};

pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvMeta {
    pub schema_version: u32,
    pub q_min: i32,
    pub q_max: i32,
    pub options: ReportOptions,
}

impl CsvMeta {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        h.extend(SCALAR_COLUMNS.iter().map(|s| s.to_string()));
        for prefix in ["dq_tau", "dq_v"] {
            h.extend((self.q_min..=self.q_max).map(|q| format!("{prefix}_{q}")));
        }
        h
    }

    fn blocks(&self) -> usize {
        (self.q_max - self.q_min + 1).max(0) as usize
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Samples(e.to_string())
}

/// Row-at-a-time CSV writer; rows reach the underlying writer on [`CsvSink::flush`].
pub struct CsvSink<W: Write> {
    inner: csv::Writer<W>,
    blocks: usize,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut writer: W, meta: &CsvMeta) -> Result<Self> {
        let line = serde_json::to_string(meta).map_err(|e| Error::Samples(e.to_string()))?;
        writeln!(writer, "# {line}").map_err(|e| Error::Samples(e.to_string()))?;
        let mut inner = csv::Writer::from_writer(writer);
        inner.write_record(meta.header()).map_err(csv_err)?;
        Ok(CsvSink {
            inner,
            blocks: meta.blocks(),
        })
    }

    pub fn push(&mut self, s: &CriterionSample) -> Result<()> {
        if s.dq_tau.len() != self.blocks || s.dq_v.len() != self.blocks {
            return Err(Error::HistoryMismatch(format!(
                "sample has {} blocks, file has {}",
                s.dq_tau.len(),
                self.blocks
            )));
        }
        let mut row = Vec::with_capacity(1 + SCALAR_COLUMNS.len() + 2 * self.blocks);
        row.push(format!("{:?}", s.t));
        row.extend(s.scalars().iter().map(|x| format!("{x:?}")));
        row.extend(s.dq_tau.iter().chain(&s.dq_v).map(|x| format!("{x:?}")));
        self.inner.write_record(&row).map_err(csv_err)
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::Samples(e.to_string()))
    }
}

pub fn write_csv<W: Write>(writer: W, meta: &CsvMeta, samples: &[CriterionSample]) -> Result<()> {
    let mut sink = CsvSink::new(writer, meta)?;
    for s in samples {
        sink.push(s)?;
    }
    sink.flush()
}

pub fn read_csv<R: BufRead>(mut reader: R) -> Result<(CsvMeta, Vec<CriterionSample>)> {
    let mut first = String::new();
    reader
        .read_line(&mut first)
        .map_err(|e| Error::Samples(e.to_string()))?;
    let json = first
        .strip_prefix("# ")
        .ok_or_else(|| Error::Samples("missing metadata line".into()))?;
    let meta: CsvMeta =
        serde_json::from_str(json.trim_end()).map_err(|e| Error::Samples(format!("metadata: {e}")))?;
    if meta.schema_version != CSV_SCHEMA_VERSION {
        return Err(Error::Samples(format!(
            "schema version {} (expected {CSV_SCHEMA_VERSION})",
            meta.schema_version
        )));
    }
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(String::from).collect();
    if header != meta.header() {
        return Err(Error::Samples("header does not match metadata".into()));
    }
    let blocks = meta.blocks();
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let vals = rec
            .iter()
            .map(|x| x.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Samples(format!("row {}: {e}", line + 1)))?;
        let mut scalars = [0.0; 14];
        scalars.copy_from_slice(&vals[1..15]);
        let dq_tau = vals[15..15 + blocks].to_vec();
        let dq_v = vals[15 + blocks..].to_vec();
        out.push(CriterionSample::from_scalars(vals[0], scalars, dq_tau, dq_v));
    }
    Ok((meta, out))
}
