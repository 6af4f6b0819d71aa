use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::series::{sample_acf, AcfVector, TimeSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct AcfReport {
    pub acf: AcfVector,
    /// First lag with a nonpositive autocorrelation.
    pub first_zero_crossing: Option<usize>,
    pub min_rho: f64,
}

pub fn acf_report(series: &TimeSeries, max_lag: usize) -> Result<AcfReport> {
    let acf = sample_acf(series, max_lag)?;
    let first_zero_crossing = acf.rho.iter().position(|&r| r <= 0.0);
    let min_rho = acf.rho.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(AcfReport {
        acf,
        first_zero_crossing,
        min_rho,
    })
}

impl AcfReport {
    /// `lag,rho` table.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
        writeln!(w, "lag,rho")?;
        for (k, r) in self.acf.rho.iter().enumerate() {
            writeln!(w, "{k},{r}")?;
        }
        w.flush()?;
        Ok(())
    }
}
