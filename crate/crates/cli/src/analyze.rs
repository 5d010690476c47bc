use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use pagraph_core::graph::load_graph_file;
use pagraph_core::stats::{
    cumulative_degree_on_grid, d_nn_profile, degree_histogram, edge_degree_matrix, log_grid, multigraph_statistics,
};
use pagraph_core::tsv::{write_degrees, write_dnn, write_edges};

use crate::output::{with_suffix, Artifact, Run};
use crate::CliError;

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Graph file (text edge list or binary).
    #[arg(long)]
    graph: PathBuf,
    /// Writes PREFIX.degrees.tsv, PREFIX.edges.tsv, PREFIX.dnn.tsv and
    /// PREFIX.grid.tsv.
    #[arg(long)]
    out_prefix: PathBuf,
    /// Ratio of the logarithmic grid used for PREFIX.grid.tsv.
    #[arg(long, default_value_t = 1.01)]
    alpha: f64,
    /// Count parallel edges instead of merging them (loops are still left
    /// out of X).
    #[arg(long)]
    keep_multi: bool,
}

pub fn run(args: &AnalyzeArgs) -> Result<Run, CliError> {
    let g = load_graph_file(&args.graph)?;
    let report = g.count_multiplicities();
    let (h, x) = if args.keep_multi {
        multigraph_statistics(&g)
    } else {
        let s = g.simplify();
        (degree_histogram(&s), edge_degree_matrix(&s))
    };
    let grid = log_grid(args.alpha, h.max_degree().max(1))?;

    let mut degrees = Vec::new();
    write_degrees(&mut degrees, &h)?;
    let mut edges = Vec::new();
    write_edges(&mut edges, &h, &x)?;
    let mut dnn = Vec::new();
    write_dnn(&mut dnn, &d_nn_profile(&x))?;
    let mut grid_tsv = String::from("d\tcumulative\n");
    for (d, c) in grid.points().iter().zip(cumulative_degree_on_grid(&h, &grid)) {
        writeln!(grid_tsv, "{d}\t{c}").unwrap();
    }

    let p = &args.out_prefix;
    let artifacts = vec![
        Artifact::new(with_suffix(p, ".degrees.tsv"), degrees),
        Artifact::new(with_suffix(p, ".edges.tsv"), edges),
        Artifact::new(with_suffix(p, ".dnn.tsv"), dnn),
        Artifact::new(with_suffix(p, ".grid.tsv"), grid_tsv.into_bytes()),
    ];
    let counted_edges = x.edge_count();
    let summary = format!(
        "{} vertices, {} edges in input ({} loops, {} multi-edges); {} edges counted, max degree {}\n",
        g.n(),
        g.edge_count(),
        report.loops,
        report.multi_edges,
        counted_edges,
        h.max_degree()
    );
    let parameters = json!({
        "alpha": args.alpha,
        "keep_multi": args.keep_multi,
        "vertices": g.n(),
        "input_edges": g.edge_count(),
        "loops": report.loops,
        "multi_edges": report.multi_edges,
        "counted_edges": counted_edges,
        "max_degree": h.max_degree(),
    });
    Ok(Run { artifacts, seeds: vec![], parameters, inputs: vec![args.graph.clone()], summary, all_diverged: false })
}
