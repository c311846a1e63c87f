//! Trace files: one CSV row per iteration plus a JSON sidecar listing the
//! restart rows.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{IterRecord, Trace};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RestartSidecar {
    pub restarts: Vec<usize>,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Invalid(format!("trace csv: {e}"))
}

pub fn write_records<W: Write>(out: W, records: &[IterRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(IterRecord::HEADER).map_err(csv_err)?;
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("trace csv: {e}")))
}

pub fn write_trace_csv<W: Write>(out: W, trace: &Trace) -> Result<()> {
    write_records(out, &trace.records)
}

/// Parses a trace CSV, rejecting any header other than the canonical one.
pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<IterRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(IterRecord::HEADER.iter().copied()) {
        return Err(Error::Invalid(format!(
            "unexpected trace header '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rd.deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn sidecar(trace: &Trace) -> RestartSidecar {
    RestartSidecar {
        restarts: trace.restarts.clone(),
    }
}

pub fn trace_csv_string(trace: &Trace) -> Result<String> {
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, trace)?;
    String::from_utf8(buf).map_err(|e| Error::Invalid(e.to_string()))
}
