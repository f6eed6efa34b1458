//! Confidence bands and per-exit verdicts.
//!
//! Every exit gets two bands: the noise band expected from faulty agents
//! alone, and the signal band for correct plus faulty agents, whose mean and
//! variance are the sums of the two independent components. An observed count
//! at or below the noise band is noise; at or above the lower signal edge it is
//! a solution. Counts in between are reported as ambiguous.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::analytics::{min_path_prob, AgentPlan, NoiseDistribution};
use crate::error::{Error, Result};
use crate::grid::{enumerate_subset_sums, ideal_exit_probabilities, SubsetInstance};
use crate::simulator::{ErrorModel, ExitHistogram};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExitBand {
    pub exit: usize,
    pub noise_lo: f64,
    pub noise_hi: f64,
    pub signal_lo: f64,
    pub signal_hi: f64,
    /// Number of subsets summing to this exit (0 for non-solutions).
    pub multiplicity: u64,
}

impl ExitBand {
    /// The noise band is the single point zero: no faulty agent can land here.
    pub fn noise_free(&self) -> bool {
        self.noise_lo == 0.0 && self.noise_hi == 0.0
    }

    pub fn overlapping(&self) -> bool {
        !self.noise_free() && self.noise_hi >= self.signal_lo
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bands {
    pub exits: Vec<ExitBand>,
    /// Set when the instance was too large for the subset oracle and every
    /// exit was banded as a single-path solution.
    pub oracle_fallback: bool,
}

/// Builds the noise and signal bands for `n_used` agents.
///
/// Correct agents (`n_used · p_c` on average) go to exit `i` with the ideal
/// probability of that exit; exits that are not subset sums are banded as if
/// reached by one path, so the signal band states what a solution would look
/// like there. Faulty agents follow `dist`; pass `None` when no faulty
/// agents are expected, as on an ideal grid.
pub fn compute_bands(
    instance: &SubsetInstance,
    model: &ErrorModel,
    plan: &AgentPlan,
    dist: Option<&NoiseDistribution<f64>>,
    n_used: u64,
    ell: f64,
) -> Result<Bands> {
    if n_used == 0 {
        return Err(Error::param("N_used", "must be at least 1"));
    }
    let z = instance.total() as usize;
    if let Some(d) = dist.filter(|d| d.z() != z) {
        return Err(Error::LengthMismatch {
            left: d.z(),
            right: z,
        });
    }

    let single_path = min_path_prob(&model.split_ratios)?;
    let (multiplicity, path_prob, oracle_fallback) = match enumerate_subset_sums(instance) {
        Ok(spectrum) => {
            let probs = ideal_exit_probabilities(instance, &model.split_ratios)?;
            let path_prob = probs
                .iter()
                .map(|&p| if p > 0.0 { p } else { single_path })
                .collect::<Vec<_>>();
            (spectrum.multiplicities().to_vec(), path_prob, false)
        }
        Err(Error::TooLarge { .. }) => (vec![1; z + 1], vec![single_path; z + 1], true),
        Err(e) => return Err(e),
    };

    let n = n_used as f64;
    let n_faulty = if dist.is_some() {
        n * (1.0 - plan.p_c)
    } else {
        0.0
    };

    let exits = (0..=z)
        .map(|i| {
            let pc = path_prob[i];
            let mean_c = n * plan.p_c * pc;
            let var_c = n * plan.p_c * pc * (1.0 - plan.p_c * pc);
            let pn = dist.map_or(0.0, |d| d.prob(i));
            let mean_n = n_faulty * pn;
            let var_n = n_faulty * pn * (1.0 - pn);
            let noise_half = ell * var_n.sqrt();
            let signal_half = ell * (var_c + var_n).sqrt();
            ExitBand {
                exit: i,
                noise_lo: (mean_n - noise_half).max(0.0),
                noise_hi: (mean_n + noise_half).max(0.0),
                signal_lo: (mean_c + mean_n - signal_half).max(0.0),
                signal_hi: (mean_c + mean_n + signal_half).max(0.0),
                multiplicity: multiplicity[i],
            }
        })
        .collect();
    Ok(Bands {
        exits,
        oracle_fallback,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Solution,
    NotSolution,
    /// Count strictly between the noise band and the signal band.
    Ambiguous,
    /// Noise and signal bands overlap, so no count can be decided.
    AmbiguousOverlap,
}

impl Verdict {
    pub fn is_ambiguous(self) -> bool {
        matches!(self, Verdict::Ambiguous | Verdict::AmbiguousOverlap)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Solution => "SOLUTION",
            Verdict::NotSolution => "NOT_SOLUTION",
            Verdict::Ambiguous => "AMBIGUOUS",
            Verdict::AmbiguousOverlap => "AMBIGUOUS_OVERLAP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExitVerdict {
    pub count: u64,
    pub band: ExitBand,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub exits: Vec<ExitVerdict>,
}

impl VerdictReport {
    pub fn solutions(&self) -> Vec<usize> {
        self.with(Verdict::Solution)
    }

    pub fn ambiguous(&self) -> Vec<usize> {
        self.exits
            .iter()
            .enumerate()
            .filter(|(_, e)| e.verdict.is_ambiguous())
            .map(|(i, _)| i)
            .collect()
    }

    fn with(&self, v: Verdict) -> Vec<usize> {
        self.exits
            .iter()
            .enumerate()
            .filter(|(_, e)| e.verdict == v)
            .map(|(i, _)| i)
            .collect()
    }
}

fn decide(count: u64, band: &ExitBand) -> Verdict {
    let c = count as f64;
    if band.noise_free() {
        // Nothing but a correct agent can arrive here.
        return if count > 0 {
            Verdict::Solution
        } else {
            Verdict::NotSolution
        };
    }
    if band.overlapping() {
        return Verdict::AmbiguousOverlap;
    }
    if c <= band.noise_hi {
        Verdict::NotSolution
    } else if c >= band.signal_lo {
        Verdict::Solution
    } else {
        Verdict::Ambiguous
    }
}

/// Assigns a verdict to every exit of `histogram`.
pub fn classify(histogram: &ExitHistogram, bands: &Bands) -> Result<VerdictReport> {
    if histogram.counts.len() != bands.exits.len() {
        return Err(Error::LengthMismatch {
            left: histogram.counts.len(),
            right: bands.exits.len(),
        });
    }
    let exits = histogram
        .counts
        .iter()
        .zip(&bands.exits)
        .map(|(&count, band)| ExitVerdict {
            count,
            band: band.clone(),
            verdict: decide(count, band),
        })
        .collect();
    Ok(VerdictReport { exits })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AccuracySummary {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub ambiguous: usize,
    pub expected: Vec<usize>,
    pub found: Vec<usize>,
    /// The SOLUTION exits are exactly the subset sums.
    pub exact: bool,
    /// Exact and free of ambiguous verdicts.
    pub verified: bool,
}

/// Compares a report with the subset-sum oracle.
///
/// An ambiguous verdict on a subset sum counts as a false negative; on any
/// other exit it counts as neither a positive nor a negative.
pub fn verify(instance: &SubsetInstance, report: &VerdictReport) -> Result<AccuracySummary> {
    let spectrum = enumerate_subset_sums(instance)?;
    if spectrum.multiplicities().len() != report.exits.len() {
        return Err(Error::LengthMismatch {
            left: spectrum.multiplicities().len(),
            right: report.exits.len(),
        });
    }
    let expected: BTreeSet<usize> = spectrum.correct_exits().into_iter().collect();
    let found: BTreeSet<usize> = report.solutions().into_iter().collect();
    let mut s = AccuracySummary {
        true_positives: 0,
        false_positives: 0,
        false_negatives: 0,
        true_negatives: 0,
        ambiguous: 0,
        expected: expected.iter().copied().collect(),
        found: found.iter().copied().collect(),
        exact: expected == found,
        verified: false,
    };
    for (i, e) in report.exits.iter().enumerate() {
        let truth = expected.contains(&i);
        match (e.verdict, truth) {
            (Verdict::Solution, true) => s.true_positives += 1,
            (Verdict::Solution, false) => s.false_positives += 1,
            (Verdict::NotSolution, true) => s.false_negatives += 1,
            (Verdict::NotSolution, false) => s.true_negatives += 1,
            (_, truth) => {
                s.ambiguous += 1;
                if truth {
                    s.false_negatives += 1;
                }
            }
        }
    }
    s.verified = s.exact && s.ambiguous == 0;
    Ok(s)
}
