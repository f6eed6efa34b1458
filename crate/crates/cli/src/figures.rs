//! Figure-panel datasets.
//!
//! Every panel writes `fig<id>.json` (resolved configuration and analytic
//! quantities) plus one or two CSV files:
//!
//! * band panels: `fig<id>_bands.csv` with
//!   `exit,count,noise_lo,noise_hi,signal_lo,signal_hi,multiplicity,verdict`
//!   and `fig<id>_histogram.csv` with `exit,count,correct,faulty`;
//! * distribution panels: `fig<id>_distribution.csv` with
//!   `exit,p_non_analytic,p_non_simulated` on a pure pass grid;
//! * split panels: `fig<id>_distribution.csv` with
//!   `exit,p_non_raw,p_non_eff,p_sim_faulty` on the full instance grid.

use std::path::Path;

use anyhow::{bail, Context};
use netcomp::analytics::{evaluate_chain, noise_distribution};
use netcomp::classifier::{classify, compute_bands};
use netcomp::export;
use netcomp::simulator::simulate_with;
use netcomp::{ConfidenceParams, ExitHistogram, GridLayout, SimOptions};
use serde_json::json;

use crate::config::RunConfig;
use crate::{create, ensure_dir, noise_for, write_json, VERSION};

const OVERLAY_AGENTS: u64 = 1_000_000;

#[derive(Clone, Copy)]
enum Kind {
    /// Bands and a simulated histogram at a fixed agent count.
    Bands { agents: u64 },
    /// Analytic against simulated faulty-agent distribution, pure pass grid.
    Distribution,
    /// Raw and effective-error distributions against simulation, full grid.
    Split,
}

struct Panel {
    id: &'static str,
    elements: &'static [u64],
    p_pj: f64,
    kind: Kind,
}

#[rustfmt::skip]
const PANELS: &[Panel] = &[
    Panel { id: "2", elements: &[5, 6, 7], p_pj: 0.0, kind: Kind::Bands { agents: 79 } },
    Panel { id: "3a", elements: &[18], p_pj: 0.01, kind: Kind::Distribution },
    Panel { id: "3b", elements: &[18], p_pj: 0.15, kind: Kind::Distribution },
    Panel { id: "4a", elements: &[2, 3, 7], p_pj: 0.01, kind: Kind::Bands { agents: 168 } },
    Panel { id: "4b", elements: &[5, 6, 7], p_pj: 0.01, kind: Kind::Bands { agents: 182 } },
    Panel { id: "4c", elements: &[2, 3, 6, 7], p_pj: 0.01, kind: Kind::Bands { agents: 474 } },
    Panel { id: "4d", elements: &[2, 3, 7, 6, 4], p_pj: 0.01, kind: Kind::Bands { agents: 1350 } },
    Panel { id: "5a", elements: &[5, 6, 7], p_pj: 0.02, kind: Kind::Bands { agents: 287 } },
    Panel { id: "5b", elements: &[5, 6, 7], p_pj: 0.05, kind: Kind::Bands { agents: 915 } },
    Panel { id: "5c", elements: &[5, 6, 7], p_pj: 0.08, kind: Kind::Bands { agents: 2785 } },
    Panel { id: "5d", elements: &[5, 6, 7], p_pj: 0.1, kind: Kind::Bands { agents: 5765 } },
    Panel { id: "split-a", elements: &[5, 6, 7], p_pj: 0.01, kind: Kind::Split },
    Panel { id: "split-b", elements: &[5, 6, 7], p_pj: 0.15, kind: Kind::Split },
    Panel { id: "split-c", elements: &[2, 3, 6, 7], p_pj: 0.01, kind: Kind::Split },
    Panel { id: "split-d", elements: &[2, 3, 6, 7], p_pj: 0.15, kind: Kind::Split },
];

pub fn reproduce(
    figure: &str,
    seed: Option<u64>,
    agents: Option<u64>,
    threads: usize,
    out: Option<&Path>,
) -> anyhow::Result<u8> {
    let panels: Vec<&Panel> = if figure == "all" {
        PANELS.iter().collect()
    } else {
        match PANELS.iter().find(|p| p.id == figure) {
            Some(p) => vec![p],
            None => {
                let ids: Vec<&str> = PANELS.iter().map(|p| p.id).collect();
                bail!(
                    "unknown figure '{figure}'; expected one of {} or all",
                    ids.join(", ")
                )
            }
        }
    };
    let seed = seed.context("a seed is required for stochastic commands: pass --seed")?;
    let dir = out.context("reproduce needs an output directory: pass --out")?;
    if threads == 0 || agents == Some(0) {
        bail!("threads and agents must be at least 1");
    }
    ensure_dir(dir)?;
    for panel in panels {
        let n = match panel.kind {
            Kind::Bands { agents: default } => agents.unwrap_or(default),
            Kind::Distribution | Kind::Split => agents.unwrap_or(OVERLAY_AGENTS),
        };
        let config = RunConfig {
            elements: panel.elements.to_vec(),
            p_pj: panel.p_pj,
            split_ratios: vec![0.5; panel.elements.len()],
            ell: 3.0,
            n_floor: 1,
            n_agents: Some(n),
            seed: Some(seed),
            threads,
            traced: true,
            out: Some(dir.to_path_buf()),
        };
        write_panel(panel, &config, dir)?;
        eprintln!("figure {}: written to {}", panel.id, dir.display());
    }
    Ok(0)
}

fn write_panel(panel: &Panel, config: &RunConfig, dir: &Path) -> anyhow::Result<()> {
    let instance = config.instance();
    let model = config.model()?;
    let z = instance.total() as usize;
    let n = config.n_agents.expect("set by reproduce");
    let seed = config.seed.expect("set by reproduce");
    let opts = SimOptions {
        threads: config.threads,
        traced: true,
    };
    let hist = simulate_with(&GridLayout::build(&instance), &model, n, seed, opts)?;
    let plan = evaluate_chain(&instance, &model, ConfidenceParams::default(), 1)?;
    let stem = format!("fig{}", panel.id);

    let mut meta = json!({
        "version": VERSION,
        "command": "reproduce",
        "figure": panel.id,
        "config": config,
        "plan": plan,
    });
    match panel.kind {
        Kind::Bands { .. } => {
            let dist = noise_for(&plan, z)?;
            let bands = compute_bands(&instance, &model, &plan, dist.as_ref(), n, config.ell)?;
            let report = classify(&hist, &bands)?;
            export::write_verdicts(create(&dir.join(format!("{stem}_bands.csv")))?, &report)?;
            export::write_histogram(create(&dir.join(format!("{stem}_histogram.csv")))?, &hist)?;
            meta["noise"] = json!(dist);
            meta["solutions"] = json!(report.solutions());
            meta["ambiguous"] = json!(report.ambiguous());
        }
        Kind::Distribution => {
            let analytic = noise_distribution(z, config.p_pj, 0.5)?;
            let simulated = faulty_distribution(&hist)?;
            let mut w =
                csv::Writer::from_writer(create(&dir.join(format!("{stem}_distribution.csv")))?);
            w.write_record(["exit", "p_non_analytic", "p_non_simulated"])?;
            for (i, sim) in simulated.iter().enumerate().take(z).skip(1) {
                w.serialize((i, analytic.prob(i), sim))?;
            }
            w.flush()?;
            meta["noise"] = json!(analytic);
        }
        Kind::Split => {
            let raw = noise_distribution(z, config.p_pj, 0.5)?;
            let eff = noise_distribution(z, plan.p_eff, 0.5)?;
            let simulated = faulty_distribution(&hist)?;
            let mut w =
                csv::Writer::from_writer(create(&dir.join(format!("{stem}_distribution.csv")))?);
            w.write_record(["exit", "p_non_raw", "p_non_eff", "p_sim_faulty"])?;
            for (i, sim) in simulated.iter().enumerate().take(z).skip(1) {
                w.serialize((i, raw.prob(i), eff.prob(i), sim))?;
            }
            w.flush()?;
            meta["noise_raw"] = json!(raw);
            meta["noise"] = json!(eff);
        }
    }
    meta["faulty_total"] = json!(hist.faulty_total());
    write_json(&dir.join(format!("{stem}.json")), &meta)
}

fn faulty_distribution(hist: &ExitHistogram) -> anyhow::Result<Vec<f64>> {
    hist.faulty_interior_distribution()
        .context("no faulty agents in the simulated overlay; increase --agents")
}
