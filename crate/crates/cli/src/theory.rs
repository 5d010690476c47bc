use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Subcommand;
use serde_json::json;

use pagraph_core::theory::{
    appendix_b_check, default_pairs, expected_degree_count, expected_edge_count, prop1_scaling_check, AppendixBConfig,
    TheoryParams,
};

use crate::output::{to_json, with_suffix, Artifact, Run};
use crate::CliError;

#[derive(Subcommand, Debug)]
pub enum TheoryCommand {
    /// Expected degree and edge counts of H(a,m,n).
    Expected {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: f64,
        /// Degrees at which E#(d) is evaluated.
        #[arg(long, value_delimiter = ',', required_unless_present = "pairs")]
        degrees: Vec<u64>,
        /// Pairs `d1:d2` at which E X(d1,d2) is evaluated.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
        pairs: Vec<(u64, u64)>,
        /// Writes PREFIX.tsv and PREFIX.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compares the tail double sum of X with its power-law shape.
    AppendixB {
        #[arg(long, default_value_t = 0.276)]
        a2: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Loop and multi-edge counts of H(a,m,n) against n.
    Prop1 {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        m: u32,
        #[arg(long, value_delimiter = ',', default_value = "10000,100000,1000000")]
        ns: Vec<u64>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_pair(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected d1:d2, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

impl TheoryCommand {
    pub fn name(&self) -> &'static str {
        match self {
            TheoryCommand::Expected { .. } => "theory expected",
            TheoryCommand::AppendixB { .. } => "theory appendix-b",
            TheoryCommand::Prop1 { .. } => "theory prop1",
        }
    }
}

fn artifacts(out: &Path, tsv: String, report: &serde_json::Value) -> Result<Vec<Artifact>, CliError> {
    Ok(vec![
        Artifact::new(with_suffix(out, ".tsv"), tsv.into_bytes()),
        Artifact::new(with_suffix(out, ".json"), to_json(report)?),
    ])
}

pub fn run(cmd: &TheoryCommand) -> Result<Run, CliError> {
    match cmd {
        TheoryCommand::Expected { a, m, n, degrees, pairs, out } => {
            let p = TheoryParams::new(*a, *m, *n)?;
            let mut tsv = String::from("kind\td1\td2\texpected\n");
            let mut deg = Vec::new();
            for &d in degrees {
                let e = expected_degree_count(&p, d)?;
                writeln!(tsv, "degree\t{d}\t\t{e}").unwrap();
                deg.push(json!({ "d": d, "expected": e }));
            }
            let mut edge = Vec::new();
            for &(d1, d2) in pairs {
                let e = expected_edge_count(&p, d1, d2)?;
                writeln!(tsv, "edge\t{d1}\t{d2}\t{e}").unwrap();
                edge.push(json!({ "d1": d1, "d2": d2, "expected": e }));
            }
            let report = json!({ "params": p, "degrees": deg, "edges": edge });
            let summary = format!("{} degree and {} edge expectations\n", degrees.len(), pairs.len());
            Ok(Run {
                artifacts: artifacts(out, tsv, &report)?,
                seeds: vec![],
                parameters: json!({ "a": a, "m": m, "n": n }),
                inputs: vec![],
                summary,
                all_diverged: false,
            })
        }
        TheoryCommand::AppendixB { a2, out } => {
            let r = appendix_b_check(*a2, &default_pairs(), &AppendixBConfig::default())?;
            let mut tsv = String::from("d1\td2\tratio\tshape\trelative_deviation\n");
            for p in &r.points {
                writeln!(tsv, "{}\t{}\t{}\t{}\t{}", p.d1, p.d2, p.ratio, p.shape, p.relative_deviation).unwrap();
            }
            let summary = format!(
                "max relative deviation {:.4} over {} pairs (truncation error {:.2e})\n",
                r.max_relative_deviation,
                r.points.len(),
                r.max_truncation_error
            );
            let report = serde_json::to_value(&r).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(Run {
                artifacts: artifacts(out, tsv, &report)?,
                seeds: vec![],
                parameters: json!({ "a2": a2 }),
                inputs: vec![],
                summary,
                all_diverged: false,
            })
        }
        TheoryCommand::Prop1 { a, m, ns, samples, seed, out } => {
            let r = prop1_scaling_check(*a, *m, ns, *samples, *seed)?;
            let mut tsv = String::from("n\tsamples\tmean_loops\tmean_multi_edges\tloop_fraction\tmulti_fraction\n");
            for row in &r.rows {
                writeln!(
                    tsv,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    row.n, row.samples, row.mean_loops, row.mean_multi_edges, row.loop_fraction, row.multi_fraction
                )
                .unwrap();
            }
            let summary = format!(
                "multi-edge slope {:.3} (log-log), loop slope {:.3} per ln n\n",
                r.multi_edge_slope, r.loop_slope
            );
            let report = serde_json::to_value(&r).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(Run {
                artifacts: artifacts(out, tsv, &report)?,
                seeds: vec![*seed],
                parameters: json!({ "a": a, "m": m, "ns": ns, "samples": samples }),
                inputs: vec![],
                summary,
                all_diverged: false,
            })
        }
    }
}
