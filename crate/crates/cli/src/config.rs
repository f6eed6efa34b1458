//! Run configuration: command-line flags merged over an optional JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use netcomp::{ConfidenceParams, ErrorModel, SubsetInstance};
use serde::{Deserialize, Serialize};

/// Flags shared by every command that takes an instance.
#[derive(Args, Clone, Debug, Default)]
pub struct InstanceArgs {
    /// Comma-separated instance elements, e.g. `2,3,7`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub set: Option<Vec<i64>>,
    /// JSON file of the form {"elements": [..]}
    #[arg(long, conflicts_with = "set")]
    pub instance: Option<PathBuf>,
    /// JSON run configuration; flags take precedence over its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Error-model and confidence flags.
#[derive(Args, Clone, Debug, Default)]
pub struct ModelArgs {
    /// Pass-junction error probability
    #[arg(long)]
    pub ppj: Option<f64>,
    /// Diagonal ratio of every split junction
    #[arg(long)]
    pub psj: Option<f64>,
    /// Confidence multiplier in standard deviations
    #[arg(long)]
    pub ell: Option<f64>,
    /// Minimum agents per correct path
    #[arg(long)]
    pub nfloor: Option<u64>,
}

/// Flags of the stochastic commands.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// Number of agents; defaults to the planned count
    #[arg(long)]
    pub agents: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; the output does not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
    /// Split each exit count into correct and faulty agents
    #[arg(long)]
    pub traced: bool,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub elements: Option<Vec<i64>>,
    pub p_pj: Option<f64>,
    pub p_sj: Option<f64>,
    pub split_ratios: Option<Vec<f64>>,
    pub ell: Option<f64>,
    pub n_floor: Option<u64>,
    pub n_agents: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub traced: Option<bool>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Fully resolved configuration, echoed into every JSON sidecar.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub elements: Vec<u64>,
    pub p_pj: f64,
    pub split_ratios: Vec<f64>,
    pub ell: f64,
    pub n_floor: u64,
    pub n_agents: Option<u64>,
    pub seed: Option<u64>,
    pub threads: usize,
    pub traced: bool,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(inst: &InstanceArgs, model: &ModelArgs, run: &RunArgs) -> anyhow::Result<Self> {
        let file = match &inst.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let instance = match (&inst.set, &inst.instance, &file.elements) {
            (Some(set), _, _) => SubsetInstance::from_signed(set)?,
            (None, Some(path), _) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            (None, None, Some(elements)) => SubsetInstance::from_signed(elements)?,
            (None, None, None) => bail!("no instance given: use --set, --instance or --config"),
        };
        let s = instance.len();
        let split_ratios = match (model.psj, &file.split_ratios, file.p_sj) {
            (Some(b), _, _) => vec![b; s],
            (None, Some(ratios), _) => {
                if ratios.len() != s {
                    bail!("split_ratios has {} entries for {s} elements", ratios.len());
                }
                ratios.clone()
            }
            (None, None, Some(b)) => vec![b; s],
            (None, None, None) => vec![0.5; s],
        };
        let config = Self {
            elements: instance.elements().to_vec(),
            p_pj: model.ppj.or(file.p_pj).unwrap_or(0.0),
            split_ratios,
            ell: model.ell.or(file.ell).unwrap_or(3.0),
            n_floor: model.nfloor.or(file.n_floor).unwrap_or(1),
            n_agents: run.agents.or(file.n_agents),
            seed: run.seed.or(file.seed),
            threads: run.threads.or(file.threads).unwrap_or(1),
            traced: run.traced || file.traced.unwrap_or(false),
            out: run.out.clone().or(file.out),
        };
        config.model()?;
        config.params()?;
        if config.threads == 0 {
            bail!("threads must be at least 1");
        }
        if config.n_agents == Some(0) {
            bail!("agents must be at least 1");
        }
        Ok(config)
    }

    pub fn instance(&self) -> SubsetInstance {
        SubsetInstance::new(self.elements.clone()).expect("validated on resolve")
    }

    pub fn model(&self) -> netcomp::Result<ErrorModel> {
        ErrorModel::new(self.p_pj, self.split_ratios.clone())
    }

    pub fn params(&self) -> netcomp::Result<ConfidenceParams> {
        ConfidenceParams::new(self.ell, self.n_floor)
    }

    pub fn require_seed(&self) -> anyhow::Result<u64> {
        self.seed
            .context("a seed is required for stochastic commands: pass --seed")
    }
}
