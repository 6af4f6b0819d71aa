use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Autocorrelation-time estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BatchMeans,
    SpectrumFit,
    Ips,
    Ims,
    Ics,
    #[serde(rename = "ar")]
    ArProcess,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::BatchMeans,
        Method::SpectrumFit,
        Method::Ips,
        Method::Ims,
        Method::Ics,
        Method::ArProcess,
    ];

    /// The four methods compared in the benchmark figures.
    pub const COMPARED: [Method; 4] = [
        Method::BatchMeans,
        Method::SpectrumFit,
        Method::Ics,
        Method::ArProcess,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::BatchMeans => "batch-means",
            Method::SpectrumFit => "spectrum-fit",
            Method::Ips => "ips",
            Method::Ims => "ims",
            Method::Ics => "ics",
            Method::ArProcess => "ar",
        }
    }

    /// Runs the method with its default settings.
    pub fn estimate(self, series: &TimeSeries) -> Result<TauEstimate> {
        match self {
            Method::BatchMeans => crate::batch_means::batch_means_tau(series, None),
            Method::SpectrumFit => crate::spectrum::spectrum_fit_tau(series, 1),
            Method::Ips => crate::initial_seq::ips_tau(series),
            Method::Ims => crate::initial_seq::ims_tau(series),
            Method::Ics => crate::initial_seq::ics_tau(series),
            Method::ArProcess => crate::ar::ar_tau(series),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))
    }
}

/// Method-specific diagnostics attached to an estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum Detail {
    BatchMeans {
        batch_size: usize,
        num_batches: usize,
    },
    SpectrumFit {
        order: usize,
        n_points: usize,
        i0_hat: f64,
    },
    InitialSequence {
        /// Number of retained pairs; zero when the first pair sum is nonpositive.
        pairs: usize,
        /// Last ACF lag entering the sum.
        truncation_lag: usize,
        /// True when the raw sum fell below the positivity floor.
        clamped: bool,
    },
    ArProcess {
        order: usize,
    },
}

/// A point estimate of the autocorrelation time.
#[derive(Debug, Clone, PartialEq)]
pub struct TauEstimate {
    pub tau: f64,
    pub method: Method,
    pub n_used: usize,
    pub detail: Detail,
}
