use std::io::Write;
use std::path::Path;

use super::{Outcome, SweepResult, SweepRow};
use crate::error::{Error, Result};
use crate::generators::{reference_truth, SeriesKind, SeriesSpec};

pub const CSV_HEADER: &str = "series,method,length,seed,tau,lower,upper,status,ms";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes rows in their stored order. Interval sweeps get an extra
/// `n_rejected` column.
pub fn emit_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
    if result.has_intervals {
        writeln!(w, "{CSV_HEADER},n_rejected")?;
    } else {
        writeln!(w, "{CSV_HEADER}")?;
    }
    for r in &result.rows {
        let (tau, lower, upper, rejected) = match &r.outcome {
            Outcome::Ok {
                tau,
                interval,
                n_rejected,
            } => (
                Some(*tau),
                interval.map(|i| i.0),
                interval.map(|i| i.1),
                *n_rejected,
            ),
            Outcome::Failed { .. } => (None, None, None, None),
        };
        write!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.series,
            r.method,
            r.length,
            r.seed,
            opt(tau),
            opt(lower),
            opt(upper),
            r.outcome.status(),
            opt(r.ms)
        )?;
        if result.has_intervals {
            write!(w, ",{}", opt(rejected))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_opt<T: std::str::FromStr>(field: &str, what: &str) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::Parse(format!("bad {what} field {field:?}")))
}

/// Reads a file written by [`emit_csv`]. Reference values are attached for
/// the default parameters of each series kind.
pub fn read_csv(path: impl AsRef<Path>) -> Result<SweepResult> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let has_intervals = headers.len() == 10 && &headers[9] == "n_rejected";
    if headers.iter().take(9).collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected header {headers:?}")));
    }
    let mut result = SweepResult {
        has_intervals,
        ..SweepResult::default()
    };
    for record in reader.records() {
        let rec = record?;
        let series: SeriesKind = rec[0].parse()?;
        let status = &rec[7];
        let outcome = if status == "ok" {
            let tau = parse_opt(&rec[4], "tau")?
                .ok_or_else(|| Error::Parse("ok row without tau".into()))?;
            let lower: Option<f64> = parse_opt(&rec[5], "lower")?;
            let upper: Option<f64> = parse_opt(&rec[6], "upper")?;
            Outcome::Ok {
                tau,
                interval: lower.zip(upper),
                n_rejected: if has_intervals { parse_opt(&rec[9], "n_rejected")? } else { None },
            }
        } else {
            Outcome::Failed {
                code: status.to_string(),
            }
        };
        result.rows.push(SweepRow {
            series,
            method: rec[1].parse()?,
            length: parse_opt(&rec[2], "length")?
                .ok_or_else(|| Error::Parse("missing length".into()))?,
            seed: parse_opt(&rec[3], "seed")?
                .ok_or_else(|| Error::Parse("missing seed".into()))?,
            outcome,
            ms: parse_opt(&rec[8], "ms")?,
        });
        if let std::collections::btree_map::Entry::Vacant(slot) = result.truth.entry(series) {
            slot.insert(reference_truth(&SeriesSpec::new(series, 1, 0))?);
        }
    }
    Ok(result)
}
