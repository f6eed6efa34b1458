//! Simulation and analytics for network-based computation of the subset sum
//! problem.
//!
//! An instance `{N_1, .., N_s}` is encoded as a grid of `Z = Σ N_j` rows. Each
//! element contributes one split row followed by `N_j - 1` pass rows. Agents
//! enter at the top and leave through exit `i`, the number of rows they
//! crossed diagonally. On an ideal grid the reachable exits are exactly the
//! subset sums. Faulty pass junctions flip an agent's direction and create
//! noise on the other exits.
//!
//! The crate is organised as:
//!
//! * [`grid`]: instance encoding and the brute-force subset-sum oracle.
//! * [`simulator`]: seeded, thread-count-independent Monte Carlo propagation.
//! * [`analytics`]: confidence intervals, agent sizing, error-path counting,
//!   the error-induced exit distribution and the agent planner.
//! * [`classifier`]: confidence bands and per-exit verdicts.
//! * [`export`]: CSV writers for histograms, tables and verdicts.
//!
//! The numeric core is generic over the float type ([`Real`], implemented for
//! `f32` and `f64`) and over the exact integer type used for path counts
//! ([`PathCount`]). The aliases below pin the types used by the simulator,
//! the planner and the command-line tool.

pub mod analytics;
pub mod classifier;
pub mod error;
pub mod export;
pub mod grid;
pub mod scalar;
pub mod simulator;

pub use analytics::{AgentPlan, ConfidenceParams, NoiseDistribution, PathCountTable, PlanWarning};
pub use classifier::{AccuracySummary, ExitBand, Verdict, VerdictReport};
pub use error::{Error, Result};
pub use grid::{ExitSpectrum, GridLayout, RowKind, SubsetInstance};
pub use scalar::{PathCount, Real};
pub use simulator::{ErrorModel, ExitHistogram, SimOptions};

/// Probability type used by the simulator, the planner and the classifier.
pub type Prob = f64;

/// Path-count table with 64-bit entries; exact for every grid up to `Z = 64`.
pub type PathCounts = PathCountTable<u64>;

/// Wide path-count table, for callers that also want to sum whole layers.
pub type WidePathCounts = PathCountTable<u128>;

/// Error-induced exit distribution in double precision.
pub type Noise = NoiseDistribution<f64>;

/// Error-induced exit distribution in single precision.
pub type Noise32 = NoiseDistribution<f32>;
