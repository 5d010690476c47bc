use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use pagraph_core::bootstrap::{bootstrap_edges, bootstrap_vertices, BootstrapOptions, BootstrapReport};
use pagraph_core::fitting::{
    fit_degree, fit_edges, floor_degree, select_degree_range, select_range, DegreeRange, FitOptions, FitResult,
    PairDomain, RangeSelectionOptions,
};
use pagraph_core::stats::{log_grid, rho_surface, DegreeHistogram, EdgeDegreeMatrix, RhoSurface};
use pagraph_core::tsv::{read_degrees, read_edges};

use crate::output::{to_json, with_suffix, Artifact, Run};
use crate::CliError;

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Prefix passed to `analyze`; reads PREFIX.degrees.tsv and PREFIX.edges.tsv.
    #[arg(long, required_unless_present_all = ["degrees", "edges"], conflicts_with_all = ["degrees", "edges"])]
    prefix: Option<PathBuf>,
    #[arg(long, requires = "edges")]
    degrees: Option<PathBuf>,
    #[arg(long, requires = "degrees")]
    edges: Option<PathBuf>,
}

impl TableArgs {
    fn paths(&self) -> (PathBuf, PathBuf) {
        match &self.prefix {
            Some(p) => (with_suffix(p, ".degrees.tsv"), with_suffix(p, ".edges.tsv")),
            None => (self.degrees.clone().unwrap(), self.edges.clone().unwrap()),
        }
    }

    fn load(&self) -> Result<(DegreeHistogram, EdgeDegreeMatrix, Vec<PathBuf>), CliError> {
        let (dp, ep) = self.paths();
        let h = read_degrees(BufReader::new(File::open(&dp)?))?;
        let x = read_edges(BufReader::new(File::open(&ep)?))?;
        Ok((h, x, vec![dp, ep]))
    }
}

#[derive(Args, Debug)]
pub struct RangeArgs {
    /// Lower end of a fixed degree range.
    #[arg(long, requires = "d1_hi", conflicts_with = "auto_range")]
    d1_lo: Option<u64>,
    /// Upper end of a fixed degree range.
    #[arg(long, requires = "d1_lo")]
    d1_hi: Option<u64>,
    /// Choose the range automatically (the default without --d1-lo/--d1-hi).
    #[arg(long)]
    auto_range: bool,
    /// Initial window length in decades for the automatic range.
    #[arg(long, default_value_t = 3.0)]
    window: f64,
    /// Pairs enter the edge fit when d1/d2 exceeds this ratio.
    #[arg(long, default_value_t = 10.0)]
    ratio_cutoff: f64,
    /// Ratio of the logarithmic grid.
    #[arg(long, default_value_t = 1.01)]
    alpha: f64,
    /// Automatic windows start at or above this multiple of the mean degree.
    #[arg(long, default_value_t = 4.0)]
    mean_degree_factor: f64,
    /// Automatic windows start at or above this degree.
    #[arg(long, default_value_t = 1)]
    min_degree: u64,
    /// Automatic windows end where at least this many vertices lie above.
    #[arg(long, default_value_t = 100)]
    min_tail: u64,
}

impl RangeArgs {
    fn selection_options(&self) -> RangeSelectionOptions {
        RangeSelectionOptions {
            window: self.window,
            ratio_cutoff: self.ratio_cutoff,
            mean_degree_factor: self.mean_degree_factor,
            min_degree: self.min_degree,
            min_tail: self.min_tail,
            ..Default::default()
        }
    }
}

#[derive(Serialize)]
struct RangeReport {
    mode: &'static str,
    lo: u64,
    hi: u64,
    grid_points: usize,
    pairs: usize,
    ratio_cutoff: f64,
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lo_exp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    floor_degree: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_tail: Option<u64>,
}

/// Fitted range and both fits; a fit that could not be attempted carries the
/// reason instead.
struct Selection {
    range: DegreeRange,
    domain: Option<PairDomain>,
    report: RangeReport,
    degree: Result<FitResult, String>,
    edge: Result<FitResult, String>,
}

fn select(surface: &RhoSurface, args: &RangeArgs) -> Result<Selection, CliError> {
    let opts = FitOptions::default();
    let base = |mode, range: &DegreeRange, domain: Option<&PairDomain>| RangeReport {
        mode,
        lo: range.lo,
        hi: range.hi,
        grid_points: range.grid_points.len(),
        pairs: domain.map_or(0, |d| d.len()),
        ratio_cutoff: args.ratio_cutoff,
        alpha: args.alpha,
        window: None,
        lo_exp: None,
        floor_degree: None,
        min_tail: None,
    };
    if let (Some(lo), Some(hi)) = (args.d1_lo, args.d1_hi) {
        let range = DegreeRange::new(lo, hi, surface.grid())?;
        let degree = fit_degree(surface, &range, &opts).map_err(|e| e.to_string());
        let domain = PairDomain::new(&range, args.ratio_cutoff);
        let edge = match &domain {
            Ok(d) => fit_edges(surface, d, &opts).map_err(|e| e.to_string()),
            Err(e) => Err(e.to_string()),
        };
        let domain = domain.ok();
        let report = base("fixed", &range, domain.as_ref());
        return Ok(Selection { range, domain, report, degree, edge });
    }
    let sel = args.selection_options();
    let floor = floor_degree(surface, &sel);
    match select_range(surface, &sel) {
        Ok(c) => {
            let mut report = base("auto", &c.range, Some(&c.domain));
            report.window = Some(c.window);
            report.lo_exp = Some(c.lo_exp);
            report.floor_degree = Some(floor);
            report.min_tail = Some(sel.min_tail);
            Ok(Selection {
                range: c.range,
                domain: Some(c.domain),
                report,
                degree: Ok(c.degree_fit),
                edge: Ok(c.edge_fit),
            })
        }
        Err(_) => {
            let c = select_degree_range(surface, &sel)?;
            let mut report = base("auto-degree-only", &c.range, None);
            report.window = Some(c.window);
            report.lo_exp = Some(c.lo_exp);
            report.floor_degree = Some(floor);
            report.min_tail = Some(sel.min_tail);
            let edge = match c.edge_fit {
                Some(e) => Ok(e),
                None => Err("no pair domain on the selected window".to_string()),
            };
            Ok(Selection { range: c.range, domain: None, report, degree: Ok(c.degree_fit), edge })
        }
    }
}

fn surface_for(h: &DegreeHistogram, x: &EdgeDegreeMatrix, alpha: f64) -> Result<RhoSurface, CliError> {
    let grid = log_grid(alpha, h.max_degree().max(1))?;
    Ok(rho_surface(h, x, &grid))
}

fn fit_json(r: &Result<FitResult, String>) -> serde_json::Value {
    match r {
        Ok(f) => serde_json::to_value(f).expect("fit results serialize"),
        Err(e) => json!({ "converged": false, "error": e }),
    }
}

fn converged(r: &Result<FitResult, String>) -> Option<&FitResult> {
    r.as_ref().ok().filter(|f| f.converged)
}

fn fit_rows(out: &mut String, name: &str, r: &Result<FitResult, String>) {
    match r {
        Ok(f) => {
            let (a, b) = if f.converged { (f.a, f.b) } else { (f64::NAN, f64::NAN) };
            writeln!(out, "a{name}\t{}\t{}\t{}\t{}", num(a), num(f.sigma2), f.iterations, f.converged).unwrap();
            writeln!(out, "b{name}\t{}\t{}\t{}\t{}", num(b), num(f.sigma2), f.iterations, f.converged).unwrap();
        }
        Err(_) => {
            writeln!(out, "a{name}\tnan\tnan\t0\tfalse").unwrap();
            writeln!(out, "b{name}\tnan\tnan\t0\tfalse").unwrap();
        }
    }
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        v.to_string()
    }
}

fn describe(name: &str, r: &Result<FitResult, String>) -> String {
    match r {
        Ok(f) if f.converged => {
            format!("{name} = {:.6} (b = {:.6e}, sigma2 = {:.4e}, {} iterations)", f.a, f.b, f.sigma2, f.iterations)
        }
        Ok(f) => format!("{name}: diverged after {} iterations", f.iterations),
        Err(e) => format!("{name}: not fitted ({e})"),
    }
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    tables: TableArgs,
    #[command(flatten)]
    range: RangeArgs,
    /// Also run both bootstraps with this many iterations.
    #[arg(long)]
    bootstrap: Option<usize>,
    /// Master seed of the bootstrap.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes PREFIX.json and PREFIX.tsv.
    #[arg(long)]
    out: PathBuf,
}

fn bootstrap_json(r: &Result<BootstrapReport, String>) -> serde_json::Value {
    match r {
        Ok(b) => json!({
            "original": b.original,
            "iterations": b.iterations,
            "diverged": b.diverged,
            "mean": b.mean(),
            "sigma_s2": b.sigma_s2,
            "sigma_s": b.sigma_s(),
        }),
        Err(e) => json!({ "error": e }),
    }
}

pub fn run_fit(args: &FitArgs) -> Result<Run, CliError> {
    let (h, x, inputs) = args.tables.load()?;
    let surface = surface_for(&h, &x, args.range.alpha)?;
    let s = select(&surface, &args.range)?;

    let mut report = json!({
        "range": s.report,
        "degree": fit_json(&s.degree),
        "edge": fit_json(&s.edge),
    });
    let mut summary = format!(
        "range [{}, {}] ({})\n{}\n{}\n",
        s.range.lo,
        s.range.hi,
        s.report.mode,
        describe("a1", &s.degree),
        describe("a2", &s.edge)
    );
    if let Some(b) = args.bootstrap {
        let opts = BootstrapOptions { iterations: b, seed: args.seed, ..Default::default() };
        let vb = match converged(&s.degree) {
            Some(_) => bootstrap_vertices(&h, &s.range, &opts).map_err(|e| e.to_string()),
            None => Err("degree fit did not converge".to_string()),
        };
        let eb = match (converged(&s.edge), &s.domain) {
            (Some(_), Some(d)) => bootstrap_edges(&x, &surface, d, &opts).map_err(|e| e.to_string()),
            _ => Err("edge fit did not converge".to_string()),
        };
        for (name, r) in [("a1", &vb), ("a2", &eb)] {
            if let Ok(r) = r {
                writeln!(
                    summary,
                    "{name}: sigma_s = {:.4e} over {} refits ({} diverged)",
                    r.sigma_s(),
                    r.estimates.len(),
                    r.diverged
                )
                .unwrap();
            }
        }
        report["bootstrap"] = json!({
            "iterations": b,
            "seed": args.seed,
            "degree": bootstrap_json(&vb),
            "edge": bootstrap_json(&eb),
        });
    }

    let mut tsv = String::from("parameter\testimate\tsigma2\titerations\tconverged\n");
    fit_rows(&mut tsv, "1", &s.degree);
    fit_rows(&mut tsv, "2", &s.edge);
    let artifacts = vec![
        Artifact::new(with_suffix(&args.out, ".json"), to_json(&report)?),
        Artifact::new(with_suffix(&args.out, ".tsv"), tsv.into_bytes()),
    ];
    let all_diverged = converged(&s.degree).is_none() && converged(&s.edge).is_none();
    let seeds = if args.bootstrap.is_some() { vec![args.seed] } else { vec![] };
    let parameters = json!({ "range": s.report, "bootstrap": args.bootstrap });
    Ok(Run { artifacts, seeds, parameters, inputs, summary, all_diverged })
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Target {
    /// Resample vertices and refit a1.
    Degrees,
    /// Resample edges and refit a2.
    Edges,
}

#[derive(Args, Debug)]
pub struct BootstrapArgs {
    #[command(flatten)]
    tables: TableArgs,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long, value_enum)]
    target: Target,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes PREFIX.tsv and PREFIX.json.
    #[arg(long)]
    out: PathBuf,
}

pub fn run_bootstrap(args: &BootstrapArgs) -> Result<Run, CliError> {
    let (h, x, inputs) = args.tables.load()?;
    let surface = surface_for(&h, &x, args.range.alpha)?;
    let s = select(&surface, &args.range)?;
    let opts = BootstrapOptions { iterations: args.iterations, seed: args.seed, ..Default::default() };
    let report = match args.target {
        Target::Degrees => bootstrap_vertices(&h, &s.range, &opts)?,
        Target::Edges => {
            let domain = s
                .domain
                .as_ref()
                .ok_or_else(|| pagraph_core::Error::Fit("no pair domain admits a convergent edge fit".into()))?;
            bootstrap_edges(&x, &surface, domain, &opts)?
        }
    };
    let mut tsv = String::from("iteration\testimate\n");
    for (k, a) in report.iteration_of.iter().zip(&report.estimates) {
        writeln!(tsv, "{k}\t{a}").unwrap();
    }
    writeln!(tsv, "sigma_s2\t{}", report.sigma_s2).unwrap();
    let target = match args.target {
        Target::Degrees => "degrees",
        Target::Edges => "edges",
    };
    let json_report = json!({
        "target": target,
        "range": s.report,
        "summary": bootstrap_json(&Ok(report.clone())),
    });
    let summary = format!(
        "{target}: original {:.6}, sigma_s = {:.4e} over {} refits ({} diverged)\n",
        report.original,
        report.sigma_s(),
        report.estimates.len(),
        report.diverged
    );
    let artifacts = vec![
        Artifact::new(with_suffix(&args.out, ".tsv"), tsv.into_bytes()),
        Artifact::new(with_suffix(&args.out, ".json"), to_json(&json_report)?),
    ];
    let parameters = json!({ "target": target, "iterations": args.iterations, "range": s.report });
    Ok(Run { artifacts, seeds: vec![args.seed], parameters, inputs, summary, all_diverged: false })
}
