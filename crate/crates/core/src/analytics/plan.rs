//! Agent planning: sizes an experiment so that correct exits stand out from
//! the error-induced noise.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use super::noise::{noise_distribution, required_per_exit, NoiseDistribution};
use super::paths::central_exit;
use super::sizing::{
    effective_error_prob, min_path_prob, n_min_ideal, n_min_nonideal, p_correct_traversal,
};
use crate::error::{Error, Result};
use crate::grid::SubsetInstance;
use crate::simulator::ErrorModel;

/// Iteration cap of the planner's fixed point.
pub const MAX_PLAN_ITERATIONS: usize = 100;

/// Per-exit floors beyond this are treated as divergence.
const DIVERGENCE_LIMIT: u64 = 1 << 40;

/// Direction-averaged flip probability of a split junction for an agent that
/// is already off its correct path. A split with diagonal ratio `b` flips a
/// vertical agent with probability `b` and a diagonal one with `1 - b`, so
/// the average is one half for every ratio.
pub const SPLIT_FLIP_PROB: f64 = 0.5;

/// Below this many expected agents on the least likely path the Gaussian
/// approximation is unreliable.
const GAUSSIAN_MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceParams {
    /// Confidence multiplier, in standard deviations.
    pub ell: f64,
    /// Minimum number of agents per correct path.
    pub n_floor: u64,
}

impl Default for ConfidenceParams {
    fn default() -> Self {
        Self {
            ell: 3.0,
            n_floor: 1,
        }
    }
}

impl ConfidenceParams {
    pub fn new(ell: f64, n_floor: u64) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::param("ell", format!("must be positive, got {ell}")));
        }
        if n_floor == 0 {
            return Err(Error::param("n_floor", "must be at least 1"));
        }
        Ok(Self { ell, n_floor })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlanWarning {
    /// Fewer than half of the agents cross the grid without error.
    LowCorrectTraversal { p_c: f64 },
    /// The least likely correct path expects fewer than five agents.
    GaussianValidity { expected: f64 },
}

impl PlanWarning {
    pub fn code(&self) -> &'static str {
        match self {
            PlanWarning::LowCorrectTraversal { .. } => "low_correct_traversal",
            PlanWarning::GaussianValidity { .. } => "gaussian_validity",
        }
    }
}

impl fmt::Display for PlanWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanWarning::LowCorrectTraversal { p_c } => write!(
                f,
                "p_c ≤ 0.5: approximation regime exceeded (p_c = {p_c:.4})"
            ),
            PlanWarning::GaussianValidity { expected } => write!(
                f,
                "p_min·N < 5: Gaussian approximation may be invalid (p_min·N = {expected:.3})"
            ),
        }
    }
}

impl Serialize for PlanWarning {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PlanWarning", 2)?;
        s.serialize_field("code", self.code())?;
        s.serialize_field("message", &self.to_string())?;
        s.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentPlan {
    /// Per-correct-exit agent floor the chain was evaluated at.
    pub n_i: u64,
    /// Ideal-grid agent count for `n_i`.
    pub n_min: u64,
    /// Agent count on the faulty grid.
    pub n_min_non: u64,
    /// Expected agents on faulty paths, `n_min_non - n_min`.
    pub n_fp: u64,
    /// Probability of crossing every pass junction without a flip.
    pub p_c: f64,
    /// Effective pass-error probability shaping the noise distribution.
    pub p_eff: f64,
    pub p_min_path: f64,
    pub i_max: usize,
    /// Per-exit floor demanded by the noise of `n_fp` faulty agents.
    pub required_n_i: u64,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<PlanWarning>,
}

/// Quantities of the chain that do not depend on `n_i`.
struct ChainInputs<'a> {
    instance: &'a SubsetInstance,
    params: ConfidenceParams,
    p_min_path: f64,
    p_c: f64,
    p_eff: f64,
    noise: Option<NoiseDistribution<f64>>,
}

impl<'a> ChainInputs<'a> {
    fn new(
        instance: &'a SubsetInstance,
        model: &ErrorModel,
        params: ConfidenceParams,
    ) -> Result<Self> {
        let params = ConfidenceParams::new(params.ell, params.n_floor)?;
        if model.split_ratios.len() != instance.len() {
            return Err(Error::LengthMismatch {
                left: model.split_ratios.len(),
                right: instance.len(),
            });
        }
        let model = ErrorModel::new(model.p_pass_error, model.split_ratios.clone())?;
        let p_min_path = min_path_prob(&model.split_ratios)?;
        let p_c = p_correct_traversal(model.p_pass_error, instance.pass_junctions())?;
        let p_eff = effective_error_prob(
            model.p_pass_error,
            SPLIT_FLIP_PROB,
            instance.split_junctions(),
            instance.total(),
        )?;
        // Without pass junctions there are no faulty agents to model.
        let noise = if p_c < 1.0 {
            Some(noise_distribution(instance.total() as usize, p_eff, 0.5)?)
        } else {
            None
        };
        Ok(Self {
            instance,
            params,
            p_min_path,
            p_c,
            p_eff,
            noise,
        })
    }

    fn evaluate(&self, n_i: u64, iterations: usize) -> Result<AgentPlan> {
        let ell = self.params.ell;
        let n_min = n_min_ideal(self.p_min_path, n_i, ell)?;
        let n_min_non = n_min_nonideal(n_min, self.p_c, ell)?;
        let n_fp = n_min_non - n_min;
        let required_n_i = match &self.noise {
            Some(d) => required_per_exit(d, n_fp, ell),
            None => 1,
        }
        .max(self.params.n_floor);

        let mut warnings = Vec::new();
        if self.p_c <= 0.5 {
            warnings.push(PlanWarning::LowCorrectTraversal { p_c: self.p_c });
        }
        let expected = self.p_min_path * n_min as f64;
        if expected < GAUSSIAN_MIN_EXPECTED {
            warnings.push(PlanWarning::GaussianValidity { expected });
        }

        Ok(AgentPlan {
            n_i,
            n_min,
            n_min_non,
            n_fp,
            p_c: self.p_c,
            p_eff: self.p_eff,
            p_min_path: self.p_min_path,
            i_max: central_exit(self.instance.total() as usize),
            required_n_i,
            iterations,
            converged: required_n_i <= n_i,
            warnings,
        })
    }
}

/// Evaluates the sizing chain at a pinned per-exit floor `n_i`, without
/// iterating. `required_n_i` reports what the noise would demand.
pub fn evaluate_chain(
    instance: &SubsetInstance,
    model: &ErrorModel,
    params: ConfidenceParams,
    n_i: u64,
) -> Result<AgentPlan> {
    if n_i == 0 {
        return Err(Error::param("n_i", "must be at least 1"));
    }
    ChainInputs::new(instance, model, params)?.evaluate(n_i, 0)
}

/// Finds the smallest self-consistent per-exit floor.
///
/// Starting from `n_floor`, the chain `n_i -> N_min -> N_min_non -> N_FP` is
/// evaluated and `n_i` raised to the noise requirement until it no longer
/// grows.
pub fn plan_agents(
    instance: &SubsetInstance,
    model: &ErrorModel,
    params: ConfidenceParams,
) -> Result<AgentPlan> {
    let chain = ChainInputs::new(instance, model, params)?;
    let mut n_i = chain.params.n_floor;
    let mut last = None;
    for iteration in 1..=MAX_PLAN_ITERATIONS {
        let plan = chain.evaluate(n_i, iteration)?;
        if plan.converged {
            return Ok(plan);
        }
        n_i = plan.required_n_i;
        let diverged = n_i > DIVERGENCE_LIMIT;
        last = Some(plan);
        if diverged {
            break;
        }
    }
    let last = last.expect("at least one iteration ran");
    Err(Error::NotConverged {
        iterations: last.iterations,
        last: Box::new(last),
    })
}
