//! Long-run reference values for the sampler-based series.
//!
//!     cargo run --release -p actime --example calibrate -- KIND N REPLICATES [key=value ...]
//!
//! Prints the mean ICS and AR estimates over independent chains along with
//! the median batch-means oracle. The stored reference values and the
//! Met-Gauss proposal scale were set from this output.

use actime::generators::{oracle_tau, SeriesKind, SeriesSpec};
use actime::Method;
use rayon::prelude::*;

fn main() -> actime::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 3 {
        eprintln!("usage: calibrate KIND N REPLICATES [key=value ...]");
        std::process::exit(2);
    }
    let kind: SeriesKind = args[0].parse()?;
    let n: usize = args[1].parse().expect("N");
    let replicates: u64 = args[2].parse().expect("REPLICATES");
    let mut spec = SeriesSpec::new(kind, n, 500);
    for kv in &args[3..] {
        let (k, v) = kv.split_once('=').expect("key=value");
        spec = spec.with_param(k, v.parse().expect("numeric value"));
    }

    let per_chain: Vec<(f64, f64)> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut s = spec.clone();
            s.seed += r;
            let x = s.generate()?;
            Ok((Method::Ics.estimate(&x)?.tau, Method::ArProcess.estimate(&x)?.tau))
        })
        .collect::<actime::Result<_>>()?;
    let mean = |f: fn(&(f64, f64)) -> f64| per_chain.iter().map(f).sum::<f64>() / per_chain.len() as f64;
    println!("{kind} n = {n}, {replicates} chains");
    println!("  ics mean {:.3}", mean(|p| p.0));
    println!("  ar mean  {:.3}", mean(|p| p.1));
    let oracle = oracle_tau(&spec, n, replicates as usize)?;
    println!("  oracle   {:.3} ({})", oracle.tau_true, oracle.oracle_detail);
    Ok(())
}
