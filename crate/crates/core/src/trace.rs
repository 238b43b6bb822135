//! CSV serialization of solver traces.
//!
//! Reals are written with 17 significant digits so a trace round-trips
//! bit-for-bit.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::solver::TraceRow;

pub const TRACE_HEADER: &str = "n,residual,step_norm,inner_iters,alpha1,alpha2,alpha3,delta";

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.n, r.residual, r.step_norm, r.inner_iters, r.alpha1, r.alpha2, r.alpha3, r.delta
        )?;
    }
    out.flush()
}

pub fn read_trace_csv<R: BufRead>(input: R) -> Result<Vec<TraceRow>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Input("empty trace file".into()))?
        .map_err(|e| Error::Input(e.to_string()))?;
    if header.trim() != TRACE_HEADER {
        return Err(Error::Input(format!("unexpected trace header '{header}'")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Input(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 8 {
            return Err(Error::Input(format!(
                "line {lineno}: expected 8 fields, found {}",
                fields.len()
            )));
        }
        let real = |k: usize| -> Result<f64> {
            fields[k]
                .parse()
                .map_err(|_| Error::Input(format!("line {lineno}: bad number '{}'", fields[k])))
        };
        let int = |k: usize| -> Result<u64> {
            fields[k]
                .parse()
                .map_err(|_| Error::Input(format!("line {lineno}: bad integer '{}'", fields[k])))
        };
        rows.push(TraceRow {
            n: int(0)?,
            residual: real(1)?,
            step_norm: real(2)?,
            inner_iters: int(3)? as usize,
            alpha1: real(4)?,
            alpha2: real(5)?,
            alpha3: real(6)?,
            delta: real(7)?,
        });
    }
    Ok(rows)
}
