//! `cascades synth`: synthetic social graphs and diffusions with ground
//! truth, plus a self-evaluation of the influence estimator against it.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use cascades_core::calibrate::{log_grid, tune_decay, CalibrationError, FollowGraph};
use cascades_core::cascade::{Cascade, DecayConfig};
use cascades_core::influence::build_report;
use cascades_core::io;
use cascades_core::synth::{
    generate_graph, ground_truth, sample_cascades, DiffusionParams, SampledDiffusion,
};

use crate::commands::ensure_out_dir;
use crate::config::RunConfig;
use crate::manifest::Manifest;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Nodes per synthetic graph.
    #[arg(long)]
    pub nodes: usize,
    /// Cascades sampled per graph.
    #[arg(long)]
    pub cascades: usize,
    /// Independent graphs to average over.
    #[arg(long, default_value_t = 1)]
    pub graphs: usize,
    /// Weibull shape of edge rates.
    #[arg(long)]
    pub shape: Option<f64>,
    /// Weibull scale of edge rates.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Diffusion source node.
    #[arg(long, default_value_t = 0)]
    pub source: u32,
    /// Cascades used to tune the decay rate before evaluation.
    #[arg(long, default_value_t = 20)]
    pub tune_sample: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: &SynthArgs, config: &mut RunConfig) -> Result<()> {
    if let Some(shape) = args.shape {
        config.shape = shape;
    }
    if let Some(scale) = args.scale {
        config.scale = scale;
    }
    config.validate()?;
    anyhow::ensure!(args.nodes >= 2, "--nodes must be at least 2");
    anyhow::ensure!(args.cascades >= 1, "--cascades must be at least 1");
    anyhow::ensure!(args.graphs >= 1, "--graphs must be at least 1");
    anyhow::ensure!(
        (args.source as usize) < args.nodes,
        "--source must be a node index below --nodes"
    );
    ensure_out_dir(&args.out_dir)?;

    let params = DiffusionParams {
        shape: config.shape,
        scale: config.scale,
    };

    let mut diffusions: Vec<SampledDiffusion<f64>> = Vec::new();
    let mut first_follows: Option<FollowGraph> = None;
    for graph_index in 0..args.graphs {
        let graph_seed = config.seed.wrapping_add((graph_index as u64) << 32);
        let graph = generate_graph(args.nodes, graph_seed);
        let prefix = if args.graphs == 1 {
            String::new()
        } else {
            format!("g{graph_index:02}-")
        };
        let batch = sample_cascades::<f64>(
            &graph,
            args.source,
            &params,
            graph_seed,
            args.cascades,
            &prefix,
        );
        if graph_index == 0 {
            // an edge i -> j exposes j to i: j follows i
            first_follows = Some(
                FollowGraph::from_edges(graph.edges().map(|(i, j)| (j.to_string(), i.to_string())))
                    .expect("graph has no self-loops"),
            );
        }
        let isolated = batch.iter().filter(|d| d.isolated_source).count();
        if isolated > 0 {
            eprintln!(
                "warning: graph {graph_index}: source {} was isolated in {isolated} cascade(s)",
                args.source
            );
        }
        diffusions.extend(batch);
    }

    let truth = ground_truth(&diffusions);
    let cascades: Vec<Cascade<f64>> = diffusions.into_iter().map(|d| d.cascade).collect();

    // Tune the decay rate on a sample of the first graph's cascades, the way
    // a real corpus run would; fall back to the configured rate when the
    // sample carries no ranking signal.
    let follows = first_follows.expect("at least one graph");
    let sample = args.tune_sample.min(args.cascades).max(1);
    let grid = log_grid::<f64>(config.grid_lo, config.grid_hi, config.grid_points);
    let tuned_r = match tune_decay(&cascades[..sample], &follows, &grid, config.smoothing) {
        Ok(result) => {
            println!(
                "synth: tuned r = {:.4e} (mean AUC {:.4}) on {sample} cascades",
                result.best_r, result.best_auc
            );
            result.best_r
        }
        Err(CalibrationError::NoScorableEvents) => {
            eprintln!(
                "warning: no scorable events in the tuning sample; using configured r = {:.4e}",
                config.r
            );
            config.r
        }
        Err(error) => return Err(error.into()),
    };

    let report = build_report(&cascades, &DecayConfig::new(tuned_r, config.smoothing))?;
    let estimates: BTreeMap<u32, f64> = report
        .per_user
        .iter()
        .map(|(user, &phi)| {
            user.parse::<u32>()
                .map(|node| (node, phi))
                .context("synthetic user ids are node indices")
        })
        .collect::<Result<_>>()?;
    let rho = cascades_core::synth::evaluate_estimator(&estimates, &truth)?;

    let mut sorted = cascades;
    sorted.sort_by(|a, b| a.id().cmp(b.id()));
    io::write_cascades(&args.out_dir.join("cascades.csv"), &sorted)?;
    io::write_ground_truth(&args.out_dir.join("truth.csv"), &truth)?;
    io::write_eval(&args.out_dir.join("eval.csv"), rho)?;

    Manifest::new("synth", config)
        .output("cascades.csv")
        .output("truth.csv")
        .output("eval.csv")
        .write(&args.out_dir)?;

    println!(
        "synth: {} cascades over {} graph(s) of {} nodes; estimator spearman = {rho:.4} -> {}",
        sorted.len(),
        args.graphs,
        args.nodes,
        args.out_dir.display()
    );
    Ok(())
}
