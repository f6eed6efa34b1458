//! Seeded Monte Carlo propagation of independent agents through a grid.
//!
//! Every agent draws from its own ChaCha8 stream, keyed by the run seed and
//! selected by the agent index. Agents are processed in fixed-size blocks
//! whose partial histograms are merged by integer addition, so the result is
//! a pure function of `(grid, model, n_agents, seed)` and does not depend on
//! the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridLayout, RowKind};

const BLOCK: u64 = 1 << 14;

/// Junction error model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    /// Probability that a pass junction flips the agent's direction.
    pub p_pass_error: f64,
    /// Per split junction probability of taking the diagonal branch.
    pub split_ratios: Vec<f64>,
}

impl ErrorModel {
    pub fn new(p_pass_error: f64, split_ratios: Vec<f64>) -> Result<Self> {
        if !(0.0..1.0).contains(&p_pass_error) {
            return Err(Error::param(
                "p_pass_error",
                format!("must lie in [0, 1), got {p_pass_error}"),
            ));
        }
        if let Some(b) = split_ratios.iter().find(|b| !(**b > 0.0 && **b < 1.0)) {
            return Err(Error::param(
                "split_ratio",
                format!("must lie in (0, 1), got {b}"),
            ));
        }
        Ok(Self {
            p_pass_error,
            split_ratios,
        })
    }

    /// Symmetric split junctions and the given pass error for `splits` blocks.
    pub fn symmetric(p_pass_error: f64, splits: usize) -> Result<Self> {
        Self::new(p_pass_error, vec![0.5; splits])
    }

    pub fn ideal(splits: usize) -> Self {
        Self {
            p_pass_error: 0.0,
            split_ratios: vec![0.5; splits],
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.p_pass_error == 0.0 && self.split_ratios.iter().all(|&b| b == 0.5)
    }

    /// Probability that a pass junction keeps the direction.
    pub fn q_pass(&self) -> f64 {
        1.0 - self.p_pass_error
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracedCount {
    pub correct: u64,
    /// Agents that saw at least one pass-junction flip.
    pub faulty: u64,
}

/// Agent counts per exit `0..=Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExitHistogram {
    pub counts: Vec<u64>,
    pub total: u64,
    pub traced: Option<Vec<TracedCount>>,
}

impl ExitHistogram {
    fn empty(exits: usize, traced: bool) -> Self {
        Self {
            counts: vec![0; exits],
            total: 0,
            traced: traced.then(|| vec![TracedCount::default(); exits]),
        }
    }

    pub fn depth(&self) -> usize {
        self.counts.len() - 1
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        if let (Some(mine), Some(theirs)) = (self.traced.as_mut(), other.traced.as_ref()) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                a.correct += b.correct;
                a.faulty += b.faulty;
            }
        }
        self
    }

    pub fn faulty_total(&self) -> Option<u64> {
        self.traced
            .as_ref()
            .map(|t| t.iter().map(|c| c.faulty).sum())
    }

    /// Faulty counts on exits `1..Z`, normalised to sum to one. `None` when
    /// the histogram is untraced or no faulty agent reached an interior exit.
    pub fn faulty_interior_distribution(&self) -> Option<Vec<f64>> {
        let traced = self.traced.as_ref()?;
        let z = self.depth();
        let interior: u64 = traced[1..z].iter().map(|c| c.faulty).sum();
        if interior == 0 {
            return None;
        }
        let mut dist = vec![0.0; z + 1];
        for i in 1..z {
            dist[i] = traced[i].faulty as f64 / interior as f64;
        }
        Some(dist)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    pub threads: usize,
    pub traced: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            traced: false,
        }
    }
}

fn check_inputs(grid: &GridLayout, model: &ErrorModel, n_agents: u64) -> Result<()> {
    if n_agents == 0 {
        return Err(Error::param("n_agents", "at least one agent is required"));
    }
    if model.split_ratios.len() != grid.split_count() {
        return Err(Error::LengthMismatch {
            left: model.split_ratios.len(),
            right: grid.split_count(),
        });
    }
    ErrorModel::new(model.p_pass_error, model.split_ratios.clone()).map(|_| ())
}

/// Walks one agent down the grid. Returns `(exit, flipped)`.
fn walk(grid: &GridLayout, model: &ErrorModel, rng: &mut ChaCha8Rng) -> (usize, bool) {
    let mut diagonal = false;
    let mut flipped = false;
    let mut exit = 0;
    for row in grid.rows() {
        match row.kind {
            RowKind::Split => diagonal = rng.gen_bool(model.split_ratios[row.block - 1]),
            RowKind::Pass => {
                if rng.gen_bool(model.p_pass_error) {
                    diagonal = !diagonal;
                    flipped = true;
                }
            }
        }
        exit += diagonal as usize;
    }
    (exit, flipped)
}

fn run_block(
    grid: &GridLayout,
    model: &ErrorModel,
    base: &ChaCha8Rng,
    agents: std::ops::Range<u64>,
    traced: bool,
) -> ExitHistogram {
    let mut hist = ExitHistogram::empty(grid.exit_count(), traced);
    for agent in agents {
        let mut rng = base.clone();
        rng.set_stream(agent);
        let (exit, flipped) = walk(grid, model, &mut rng);
        hist.counts[exit] += 1;
        hist.total += 1;
        if let Some(t) = hist.traced.as_mut() {
            if flipped {
                t[exit].faulty += 1;
            } else {
                t[exit].correct += 1;
            }
        }
    }
    hist
}

/// Simulates `n_agents` independent agents and returns the exit histogram.
pub fn simulate_with(
    grid: &GridLayout,
    model: &ErrorModel,
    n_agents: u64,
    seed: u64,
    opts: SimOptions,
) -> Result<ExitHistogram> {
    check_inputs(grid, model, n_agents)?;
    let base = ChaCha8Rng::seed_from_u64(seed);
    let blocks = n_agents.div_ceil(BLOCK);
    let empty = || ExitHistogram::empty(grid.exit_count(), opts.traced);
    let run = |b: u64| {
        let range = b * BLOCK..((b + 1) * BLOCK).min(n_agents);
        run_block(grid, model, &base, range, opts.traced)
    };
    if opts.threads <= 1 || blocks == 1 {
        return Ok((0..blocks).map(run).fold(empty(), ExitHistogram::merge));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::param("threads", e.to_string()))?;
    Ok(pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(run)
            .reduce(empty, ExitHistogram::merge)
    }))
}

pub fn simulate(
    grid: &GridLayout,
    model: &ErrorModel,
    n_agents: u64,
    seed: u64,
) -> Result<ExitHistogram> {
    simulate_with(grid, model, n_agents, seed, SimOptions::default())
}

/// Like [`simulate`], plus the per-exit split into correct and faulty agents.
pub fn simulate_traced(
    grid: &GridLayout,
    model: &ErrorModel,
    n_agents: u64,
    seed: u64,
) -> Result<ExitHistogram> {
    simulate_with(
        grid,
        model,
        n_agents,
        seed,
        SimOptions {
            threads: 1,
            traced: true,
        },
    )
}

/// One symmetric split row followed by `z - 1` faulty pass rows.
pub fn simulate_simplistic(
    z: usize,
    p_pass_error: f64,
    n_agents: u64,
    seed: u64,
    opts: SimOptions,
) -> Result<ExitHistogram> {
    let grid = GridLayout::simplistic(z)?;
    let model = ErrorModel::symmetric(p_pass_error, 1)?;
    simulate_with(&grid, &model, n_agents, seed, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{enumerate_subset_sums, SubsetInstance};
    use proptest::prelude::*;

    fn grid(e: &[u64]) -> GridLayout {
        GridLayout::build(&SubsetInstance::new(e.to_vec()).unwrap())
    }

    #[test]
    fn ideal_grid_hits_only_correct_exits() {
        let inst = SubsetInstance::new(vec![2, 3, 7]).unwrap();
        let g = GridLayout::build(&inst);
        let n = 800_000;
        let h = simulate(&g, &ErrorModel::ideal(3), n, 11).unwrap();
        let sp = enumerate_subset_sums(&inst).unwrap();
        let mean = n as f64 / 8.0;
        let sigma = (n as f64 * 0.125 * 0.875).sqrt();
        for (i, &c) in h.counts.iter().enumerate() {
            if sp.is_solution(i) {
                assert!((c as f64 - mean).abs() <= 4.0 * sigma, "exit {i}: {c}");
            } else {
                assert_eq!(c, 0, "exit {i}");
            }
        }
        assert_eq!(h.total, n);
    }

    #[test]
    fn zero_flip_fraction_matches_correct_traversal() {
        let g = grid(&[5, 6, 7]);
        let n = 400_000u64;
        let h = simulate_traced(&g, &ErrorModel::symmetric(0.01, 3).unwrap(), n, 5).unwrap();
        let correct: u64 = h.traced.as_ref().unwrap().iter().map(|c| c.correct).sum();
        let p = 0.99f64.powi(15);
        let frac = correct as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((frac - p).abs() <= 3.0 * sigma, "{frac} vs {p}");
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let g = grid(&[5, 6, 7]);
        let m = ErrorModel::symmetric(0.05, 3).unwrap();
        let opts = |threads| SimOptions {
            threads,
            traced: true,
        };
        let one = simulate_with(&g, &m, 100_000, 42, opts(1)).unwrap();
        let eight = simulate_with(&g, &m, 100_000, 42, opts(8)).unwrap();
        assert_eq!(one, eight);
    }

    #[test]
    fn ideal_model_has_no_faulty_agents() {
        let g = grid(&[2, 3, 7]);
        let h = simulate_traced(&g, &ErrorModel::ideal(3), 5_000, 1).unwrap();
        assert_eq!(h.faulty_total(), Some(0));
    }

    #[test]
    fn single_agent_lands_once() {
        let g = grid(&[5, 6, 7]);
        let h = simulate_traced(&g, &ErrorModel::symmetric(0.2, 3).unwrap(), 1, 9).unwrap();
        let t = h.traced.unwrap();
        assert_eq!(t.iter().map(|c| c.correct + c.faulty).sum::<u64>(), 1);
        assert_eq!(h.counts.iter().filter(|&&c| c == 1).count(), 1);
    }

    #[test]
    fn simplistic_without_errors_splits_in_half() {
        let n = 100_000;
        let h = simulate_simplistic(18, 0.0, n, 3, SimOptions::default()).unwrap();
        assert_eq!(h.counts[0] + h.counts[18], n);
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((h.counts[0] as f64 - n as f64 / 2.0).abs() < 4.0 * sigma);
    }

    #[test]
    fn single_pass_junction_flip_rate() {
        // Z = 2: exactly one pass junction, and exit 1 is reached iff it flips.
        let n = 200_000u64;
        for p in [0.01, 0.15, 0.4] {
            let h = simulate_simplistic(2, p, n, 17, SimOptions::default()).unwrap();
            let rate = h.counts[1] as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((rate - p).abs() <= 4.0 * sigma, "p={p}: {rate}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = grid(&[2, 3]);
        assert!(simulate(&g, &ErrorModel::ideal(2), 0, 1).is_err());
        assert!(simulate(&g, &ErrorModel::ideal(3), 10, 1).is_err());
        assert!(ErrorModel::new(1.0, vec![0.5]).is_err());
        assert!(ErrorModel::new(0.1, vec![0.0]).is_err());
        assert!(simulate_simplistic(0, 0.1, 10, 1, SimOptions::default()).is_err());
    }

    #[test]
    fn ideal_flag() {
        assert!(ErrorModel::ideal(3).is_ideal());
        assert!(!ErrorModel::new(0.0, vec![0.4, 0.5]).unwrap().is_ideal());
        assert!(!ErrorModel::symmetric(0.01, 2).unwrap().is_ideal());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn conservation_and_determinism(
            elems in prop::collection::vec(1u64..6, 1..4),
            p in 0.0f64..0.5,
            n in 1u64..3000,
            seed in any::<u64>(),
        ) {
            let g = grid(&elems);
            let m = ErrorModel::symmetric(p, elems.len()).unwrap();
            let opts = SimOptions { threads: 1, traced: true };
            let a = simulate_with(&g, &m, n, seed, opts).unwrap();
            prop_assert_eq!(a.counts.iter().sum::<u64>(), n);
            prop_assert_eq!(a.total, n);
            for (c, t) in a.counts.iter().zip(a.traced.as_ref().unwrap()) {
                prop_assert_eq!(*c, t.correct + t.faulty);
            }
            let b = simulate_with(&g, &m, n, seed, opts).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
