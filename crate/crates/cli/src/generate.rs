use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;

use pagraph_core::baseline::{
    generate_configuration, generate_holme_kim, sample_power_law_degrees, GdsParams, HkParams,
};
use pagraph_core::graph::{save_binary, save_edge_list};
use pagraph_core::pa::{generate_bo, BoParams};
use pagraph_core::Graph;

use crate::output::{with_suffix, Artifact, Run};
use crate::CliError;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Model {
    /// Buckley–Osthus preferential attachment
    Bo,
    /// Configuration model on an i.i.d. power-law degree sequence
    Gds,
    /// Holme–Kim preferential attachment with triad formation
    Hk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Text,
    Binary,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Number of vertices.
    #[arg(long)]
    n: u64,
    /// Initial attractiveness (bo).
    #[arg(long)]
    a: Option<f64>,
    /// Edges per vertex (bo, hk).
    #[arg(long)]
    m: Option<u32>,
    /// Power-law exponent of the degree sequence (gds).
    #[arg(long)]
    gamma: Option<f64>,
    /// Approximate edge count; lowers the degree cap (gds).
    #[arg(long)]
    target_edges: Option<u64>,
    /// Triad-formation probability (hk).
    #[arg(long, default_value_t = 0.5)]
    pt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output graph file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn required<T>(v: Option<T>, flag: &str, model: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --model {model}")))
}

fn encode(g: &Graph, format: Format) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Text => save_edge_list(g, &mut buf)?,
        Format::Binary => save_binary(g, &mut buf)?,
    }
    Ok(buf)
}

pub fn run(args: &GenerateArgs) -> Result<Run, CliError> {
    let mut artifacts = Vec::new();
    let (graph, parameters) = match args.model {
        Model::Bo => {
            let p = BoParams::new(required(args.a, "a", "bo")?, required(args.m, "m", "bo")?, args.n, args.seed)?;
            (generate_bo(&p)?, json!({ "model": "bo", "a": p.a, "m": p.m, "n": p.n }))
        }
        Model::Gds => {
            let p = GdsParams {
                n: args.n,
                gamma: required(args.gamma, "gamma", "gds")?,
                target_edges: args.target_edges,
                seed: args.seed,
            };
            let sample = sample_power_law_degrees(&p)?;
            let g = generate_configuration(&sample.degrees, args.seed)?;
            let mut seq = String::from("vertex\tdegree\n");
            for (v, d) in sample.degrees.iter().enumerate() {
                writeln!(seq, "{v}\t{d}").unwrap();
            }
            artifacts.push(Artifact::new(with_suffix(&args.out, ".sequence.tsv"), seq.into_bytes()));
            let params = json!({
                "model": "gds",
                "n": p.n,
                "gamma": p.gamma,
                "target_edges": p.target_edges,
                "d_cap": sample.d_cap,
                "expected_mean": sample.expected_mean,
                "parity_fix": sample.parity_fix,
            });
            (g, params)
        }
        Model::Hk => {
            let p = HkParams { n: args.n, m: required(args.m, "m", "hk")?, p_t: args.pt, seed: args.seed };
            let (n0, e0) = p.seed_graph_size();
            let params = json!({ "model": "hk", "n": p.n, "m": p.m, "p_t": p.p_t, "seed_graph": { "vertices": n0, "edges": e0 } });
            (generate_holme_kim(&p)?, params)
        }
    };
    let report = graph.count_multiplicities();
    let summary = format!(
        "{} vertices, {} edges ({} loops, {} multi-edges)\n",
        graph.n(),
        graph.edge_count(),
        report.loops,
        report.multi_edges
    );
    artifacts.insert(0, Artifact::new(args.out.clone(), encode(&graph, args.format)?));
    let mut parameters = parameters;
    parameters["format"] = json!(format!("{:?}", args.format).to_lowercase());
    parameters["edges"] = json!(graph.edge_count());
    parameters["loops"] = json!(report.loops);
    parameters["multi_edges"] = json!(report.multi_edges);
    Ok(Run { artifacts, seeds: vec![args.seed], parameters, inputs: vec![], summary, all_diverged: false })
}
