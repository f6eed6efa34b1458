//! Closed-form and recursive mathematics: confidence intervals, agent sizing,
//! error-path counting, the error-induced exit distribution, noise statistics
//! and the agent planner.

mod noise;
mod oracle;
mod paths;
mod plan;
mod sizing;

pub use noise::{
    noise_distribution, noise_from_table, noise_stats, required_per_exit, NoiseDistribution,
};
pub use oracle::{brute_force_path_counts, brute_force_path_distribution, MAX_ORACLE_GRID};
pub use paths::{central_exit, path_counts, turn_band, PathCountTable, MAX_PATH_GRID};
pub use plan::{
    evaluate_chain, plan_agents, AgentPlan, ConfidenceParams, PlanWarning, MAX_PLAN_ITERATIONS,
    SPLIT_FLIP_PROB,
};
pub use sizing::{
    ci_bounds, effective_error_prob, min_path_prob, multinomial_pmf, n_min_ideal, n_min_nonideal,
    p_correct_traversal, success_prob, DEFAULT_SINGLE_SUCCESS,
};
