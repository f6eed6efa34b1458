//! CSV writers for histograms, path tables, noise distributions and verdicts.

use std::io::Write;

use crate::analytics::{NoiseDistribution, PathCountTable};
use crate::classifier::VerdictReport;
use crate::scalar::{PathCount, Real};
use crate::simulator::ExitHistogram;

pub type CsvResult = Result<(), csv::Error>;

/// `exit,count` or, for traced histograms, `exit,count,correct,faulty`.
pub fn write_histogram<W: Write>(out: W, hist: &ExitHistogram) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    match &hist.traced {
        None => {
            w.write_record(["exit", "count"])?;
            for (i, c) in hist.counts.iter().enumerate() {
                w.serialize((i, c))?;
            }
        }
        Some(traced) => {
            w.write_record(["exit", "count", "correct", "faulty"])?;
            for (i, (c, t)) in hist.counts.iter().zip(traced).enumerate() {
                w.serialize((i, c, t.correct, t.faulty))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `i,m,A,vA,dA` for every turn count and exit.
pub fn write_path_table<W: Write, C: PathCount>(out: W, table: &PathCountTable<C>) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "m", "A", "vA", "dA"])?;
    for m in 1..=table.max_turns() {
        for i in 0..=table.z() {
            w.write_record([
                i.to_string(),
                m.to_string(),
                table.count(m, i).to_string(),
                table.vertical(m, i).to_string(),
                table.diagonal(m, i).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `i,p_non` over all exits `0..=Z`.
pub fn write_noise<W: Write, F: Real>(out: W, dist: &NoiseDistribution<F>) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "p_non"])?;
    for (i, p) in dist.probs().iter().enumerate() {
        w.write_record([i.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `exit,count,noise_lo,noise_hi,signal_lo,signal_hi,multiplicity,verdict`.
pub fn write_verdicts<W: Write>(out: W, report: &VerdictReport) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "exit",
        "count",
        "noise_lo",
        "noise_hi",
        "signal_lo",
        "signal_hi",
        "multiplicity",
        "verdict",
    ])?;
    for e in &report.exits {
        let b = &e.band;
        w.serialize((
            b.exit,
            e.count,
            b.noise_lo,
            b.noise_hi,
            b.signal_lo,
            b.signal_hi,
            b.multiplicity,
            e.verdict.as_str(),
        ))?;
    }
    w.flush()?;
    Ok(())
}
