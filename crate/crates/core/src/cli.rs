//! The `sgl` command line: every operation as a subcommand with JSON output.
//!
//! Exit codes: 0 on success, 2 when a checked property fails, 1 on error and
//! 64 on a usage error. Input files may be bare objects or the envelope a
//! previous command wrote, in which case the relevant field is used.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::approximator::{self, Pairing};
use crate::compression;
use crate::constants;
use crate::cut_embed::{self, CUT_CAP};
use crate::error::{Error, Result};
use crate::experiment::{self, ScanConfig, DEFAULT_RESTARTS};
use crate::graph::{self, all_pairs_distances, Graph, MetricMatrix, Multigraph, DEFAULT_ENUMERATION_CAP};
use crate::poincare::{self, VertexMap, BRUTE_CAP, INJECTION_CAP};
use crate::properties::{self, CheckMode, Verdict, DEFAULT_SAMPLES, EXACT_D_CAP, SUBSET_CAP};
use crate::spectral::{self, CHEEGER_CAP, DEFAULT_TOL, DENSE_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "sgl", version, about = "Nonlinear spectral gaps of random regular graphs at desk scale")]
struct Cli {
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a uniform random d-regular graph.
    Gen {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Enumerate all labeled d-regular graphs on n vertices.
    Enum {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Shortest-path metric of a graph.
    Metric {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Adjacency spectrum.
    Spectrum {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Exact edge expansion and the spectral sandwich around it.
    Cheeger {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Poincaré constant estimates and certificates
    #[command(subcommand)]
    Gamma(GammaCmd),
    /// Distortion into L1 and into other graph metrics
    #[command(subcommand)]
    Distort(DistortCmd),
    /// Check property D(α).
    CheckD {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Check property R(ε).
    CheckR {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        size_cap: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Check the small-set edge density bound.
    EdgeDensity {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        size_cap: usize,
        /// Use this factor instead of 1 + 7/(ε log_Δ m).
        #[arg(long)]
        factor: Option<f64>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Fiber-size and dyadic decomposition of a map.
    Decompose {
        #[arg(long)]
        map: PathBuf,
        #[arg(short)]
        m: usize,
        #[arg(long)]
        eps: f64,
    },
    /// One realization of the random compression.
    Compress {
        #[arg(long)]
        map: PathBuf,
        #[arg(short)]
        m: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Full ledger of the compression argument.
    Trace {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Natural log of α; defaults to ln α(d).
        #[arg(long, allow_hyphen_values = true)]
        ln_alpha: Option<f64>,
        #[arg(long)]
        seed: u64,
    },
    /// Universal approximator construction and spread
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Table of named constants.
    Constants {
        #[arg(short)]
        d: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, allow_hyphen_values = true)]
        ln_alpha: Option<f64>,
        #[arg(short, default_value_t = 1.0)]
        p: f64,
        #[arg(short)]
        m: Option<u64>,
    },
    /// Scan γ over random pairs with n = m.
    Scan {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(short, default_value_t = 1.0)]
        p: f64,
        /// Also write the records as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Target {
    /// Host graph; its shortest-path metric is used.
    #[arg(long, conflicts_with = "metric")]
    host: Option<PathBuf>,
    #[arg(long)]
    metric: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Sampling {
    /// Sample sets instead of scanning them all.
    #[arg(long)]
    sampled: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum GammaCmd {
    /// Exact γ over all maps.
    Brute {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(short, default_value_t = 1.0)]
        p: f64,
    },
    /// Lower bound by local search.
    Search {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(short, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Upper bound from an L1 embedding of the host.
    Certify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        host: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum DistortCmd {
    /// Minimal L1 distortion by the cut-cone LP.
    Lp {
        #[command(flatten)]
        target: Target,
    },
    /// Minimal distortion of dist_G into dist_H over injections.
    Brute {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        host: PathBuf,
    },
    /// Distortion lower bound from an upper bound on γ.
    LowerBound {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        gamma_upper: f64,
    },
}

#[derive(Subcommand, Debug)]
enum ApproxCmd {
    /// Quotient of a 3-regular graph on 2k vertices.
    Build {
        #[arg(long)]
        graph: PathBuf,
        /// Random pairing instead of the consecutive one.
        #[arg(long)]
        pairing_seed: Option<u64>,
    },
    /// Spread of A/B over tuples.
    Spread {
        #[arg(long)]
        multigraph: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(short, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "construction_d")]
        ln_d: Option<f64>,
        /// Judge against 2^p Γ(3,p).
        #[arg(long)]
        construction_d: bool,
    },
    /// A <= s·B <= D·A for one tuple.
    Check {
        #[arg(long)]
        multigraph: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(short, default_value_t = 1.0)]
        p: f64,
        #[arg(short)]
        s: f64,
        #[arg(long, allow_hyphen_values = true)]
        ln_d: f64,
        #[arg(long, value_delimiter = ',')]
        points: Vec<usize>,
    },
}

/// What a run printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Caps and thresholds echoed into every output.
pub fn config_block() -> Value {
    json!({
        "brute_cap": BRUTE_CAP,
        "injection_cap": INJECTION_CAP,
        "cut_cap": CUT_CAP,
        "cheeger_cap": CHEEGER_CAP,
        "dense_cap": DENSE_CAP,
        "enumeration_cap": DEFAULT_ENUMERATION_CAP,
        "exact_d_cap": EXACT_D_CAP,
        "subset_cap": SUBSET_CAP,
        "tuple_cap": approximator::EXHAUSTIVE_CAP,
        "asymptotic_eps": constants::ASYMPTOTIC_EPS,
        "log_base": constants::LOG_BASE,
        "threads": rayon::current_num_threads(),
    })
}

/// Sizes the global thread pool from `SGL_THREADS`, if set.
pub fn init_threads() {
    if let Some(n) = std::env::var("SGL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn read_value(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn read_field<T: for<'de> Deserialize<'de>>(path: &Path, field: &str) -> Result<T> {
    let mut v = read_value(path)?;
    if let Some(inner) = v.get_mut(field) {
        v = inner.take();
    }
    Ok(serde_json::from_value(v)?)
}

fn read_graph(path: &Path) -> Result<Graph> {
    read_field(path, "graph")
}

#[derive(Deserialize)]
struct MapFile {
    m: usize,
    values: Vec<usize>,
}

fn read_map(path: &Path) -> Result<VertexMap> {
    let f: MapFile = read_field(path, "map")?;
    VertexMap::new(f.values, f.m)
}

fn read_target(t: &Target) -> Result<MetricMatrix> {
    match (&t.host, &t.metric) {
        (Some(h), _) => Ok(all_pairs_distances(&read_graph(h)?)),
        (None, Some(m)) => read_field(m, "metric"),
        (None, None) => Err(Error::Parameter("need --host or --metric".into())),
    }
}

fn mode(s: &Sampling) -> Result<Option<CheckMode>> {
    match (s.sampled, s.seed) {
        (false, _) => Ok(None),
        (true, Some(seed)) => Ok(Some(CheckMode::Sampled { seed, samples: s.samples })),
        (true, None) => Err(Error::Parameter("--sampled needs --seed".into())),
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

/// Result of one command: JSON fields and whether its check passed.
struct Report {
    fields: Map<String, Value>,
    pass: bool,
}

impl Report {
    fn ok(fields: Value) -> Self {
        Report::new(fields, true)
    }

    fn new(fields: Value, pass: bool) -> Self {
        let fields = match fields {
            Value::Object(m) => m,
            other => Map::from_iter([("result".to_string(), other)]),
        };
        Report { fields, pass }
    }
}

fn verdict_pass(v: Verdict) -> bool {
    v != Verdict::Fail
}

fn execute(cli: &Cli, command_name: &str) -> Result<Report> {
    Ok(match &cli.command {
        Command::Gen { n, d, seed } => {
            let g = graph::sample_regular_graph(*n, *d, *seed)?;
            Report::ok(json!({ "seed": seed, "graph": g }))
        }
        Command::Enum { n, d, cap } => {
            let gs = graph::enumerate_regular_graphs_capped(*n, *d, *cap)?;
            Report::ok(json!({ "count": gs.len(), "graphs": gs }))
        }
        Command::Metric { graph } => {
            let g = read_graph(graph)?;
            Report::ok(json!({ "metric": all_pairs_distances(&g), "summary": graph::metric_summary(&g) }))
        }
        Command::Spectrum { graph } => {
            let s = spectral::adjacency_spectrum(&read_graph(graph)?, DEFAULT_TOL)?;
            Report::ok(json!({ "eigenvalues": s.eigenvalues, "lambda2": s.lambda2() }))
        }
        Command::Cheeger { graph } => {
            let g = read_graph(graph)?;
            let cut = spectral::cheeger_scan(&g)?;
            let s = spectral::cheeger_sandwich_check(&g)?;
            Report::new(json!({ "cut": cut, "sandwich": s }), s.pass)
        }
        Command::Gamma(cmd) => match cmd {
            GammaCmd::Brute { graph, target, p } => {
                let est = poincare::gamma_bruteforce(&read_graph(graph)?, &read_target(target)?, *p)?;
                let gamma = est.lower.as_ref().map(|l| l.value);
                Report::ok(json!({ "gamma": gamma, "estimate": est }))
            }
            GammaCmd::Search { graph, target, p, restarts, seed } => {
                let est =
                    poincare::gamma_local_search(&read_graph(graph)?, &read_target(target)?, *p, *restarts, *seed)?;
                let lower = est.lower.as_ref().map(|l| l.value);
                Report::ok(json!({ "lower": lower, "seed": seed, "estimate": est }))
            }
            GammaCmd::Certify { graph, host } => {
                let est = poincare::gamma_upper_certificate(&read_graph(graph)?, &read_graph(host)?, DEFAULT_TOL)?;
                let upper = est.upper.as_ref().map(|u| u.value);
                Report::ok(json!({ "upper": upper, "estimate": est }))
            }
        },
        Command::Distort(cmd) => match cmd {
            DistortCmd::Lp { target } => {
                let (d, emb) = cut_embed::min_l1_distortion(&read_target(target)?)?;
                Report::ok(json!({ "distortion": d, "embedding": emb }))
            }
            DistortCmd::Brute { graph, host } => {
                let d = poincare::min_distortion_bruteforce(&read_graph(graph)?, &read_graph(host)?)?;
                Report::ok(json!({ "distortion": d }))
            }
            DistortCmd::LowerBound { graph, gamma_upper } => {
                let d = poincare::distortion_lower_bound(&read_graph(graph)?, *gamma_upper)?;
                Report::ok(json!({ "distortion_lower_bound": d }))
            }
        },
        Command::CheckD { graph, alpha, sampling } => {
            let g = read_graph(graph)?;
            let m = mode(sampling)?.unwrap_or(CheckMode::Exact);
            let r = properties::check_property_d(&g, *alpha, m)?;
            Report::new(to_value(&r)?, verdict_pass(r.verdict))
        }
        Command::CheckR { graph, eps, size_cap, sampling } => {
            let m = mode(sampling)?.unwrap_or(CheckMode::Exact);
            let r = properties::check_property_r(&read_graph(graph)?, *eps, *size_cap, m)?;
            Report::new(to_value(&r)?, verdict_pass(r.verdict))
        }
        Command::EdgeDensity { graph, eps, size_cap, factor, sampling } => {
            let h = read_graph(graph)?;
            let m = mode(sampling)?.unwrap_or(CheckMode::Exact);
            let r = match factor {
                Some(f) => properties::edge_density_with_factor(&h, *f, *size_cap, m)?,
                None => properties::edge_density_check(&h, *eps, *size_cap, m)?,
            };
            Report::new(to_value(&r)?, verdict_pass(r.verdict))
        }
        Command::Decompose { map, m, eps } => {
            let f = read_map(map)?;
            let dy = compression::dyadic(&f, *m, *eps)?;
            Report::new(json!({ "dyadic": dy }), dy.range_ok)
        }
        Command::Compress { map, m, eps, seed } => {
            let f = read_map(map)?;
            let dy = compression::dyadic(&f, *m, *eps)?;
            let (realized, pivot) = compression::compress(&f, &dy, *seed);
            let image = compression::image_bound_check(&f, &dy, *m, *eps)?;
            Report::new(
                json!({
                    "seed": seed,
                    "pivot": pivot,
                    "f_hat": compression::hat_f(&f, &dy),
                    "map": realized,
                    "m0_prime": dy.m0_prime,
                    "m0_double_prime": dy.m0_double_prime,
                    "image_bound": image,
                }),
                image.pass,
            )
        }
        Command::Trace { graph, host, map, eps, ln_alpha, seed } => {
            let g = read_graph(graph)?;
            let d = g.require_regular()?;
            let ln_a = ln_alpha.unwrap_or_else(|| constants::ln_alpha_default(d as f64));
            let t = compression::compression_trace(&g, &read_graph(host)?, &read_map(map)?, *eps, ln_a, *seed)?;
            Report::new(to_value(&t)?, t.assertions_hold)
        }
        Command::Approx(cmd) => match cmd {
            ApproxCmd::Build { graph, pairing_seed } => {
                let g = read_graph(graph)?;
                let pairing = pairing_seed.map(|s| Pairing::random(g.n() / 2, s));
                let (u, pairing) = approximator::build_universal_approximator(&g, pairing.as_ref())?;
                Report::ok(json!({ "multigraph": u, "pairing": pairing, "edge_count": u.edge_count() }))
            }
            ApproxCmd::Spread { multigraph, target, p, trials, seed, ln_d, construction_d } => {
                let u: Multigraph = read_field(multigraph, "multigraph")?;
                let ln_d = if *construction_d { Some(approximator::ln_construction_d(*p)) } else { *ln_d };
                let r = approximator::approximator_spread(&u, &read_target(target)?, *p, *trials, *seed, ln_d)?;
                Report::new(to_value(&r)?, r.verdict != Some(false))
            }
            ApproxCmd::Check { multigraph, target, p, s, ln_d, points } => {
                let u: Multigraph = read_field(multigraph, "multigraph")?;
                let c = approximator::two_sided_check(&u, &read_target(target)?, *p, *ln_d, *s, points)?;
                Report::new(to_value(&c)?, c.pass)
            }
        },
        Command::Constants { d, eps, ln_alpha, p, m } => {
            Report::ok(to_value(&constants::constants_table(*d, *eps, *ln_alpha, *p, *m)?)?)
        }
        Command::Scan { d, delta, sizes, seed, trials, restarts, p, csv } => {
            let cfg = ScanConfig { d: *d, delta: *delta, p: *p, trials: *trials, restarts: *restarts, seed: *seed };
            let s = experiment::kleinberg_scan(&cfg, sizes)?;
            if let Some(path) = csv {
                std::fs::write(path, experiment::to_csv(&s)?)?;
            }
            Report::new(to_value(&s)?, s.sandwich_holds)
        }
    })
    .map(|mut r| {
        r.fields.insert("command".into(), Value::from(command_name));
        r.fields.insert("pass".into(), Value::from(r.pass));
        r.fields.insert("config".into(), config_block());
        r
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gen { .. } => "gen",
        Command::Enum { .. } => "enum",
        Command::Metric { .. } => "metric",
        Command::Spectrum { .. } => "spectrum",
        Command::Cheeger { .. } => "cheeger",
        Command::Gamma(GammaCmd::Brute { .. }) => "gamma brute",
        Command::Gamma(GammaCmd::Search { .. }) => "gamma search",
        Command::Gamma(GammaCmd::Certify { .. }) => "gamma certify",
        Command::Distort(DistortCmd::Lp { .. }) => "distort lp",
        Command::Distort(DistortCmd::Brute { .. }) => "distort brute",
        Command::Distort(DistortCmd::LowerBound { .. }) => "distort lower-bound",
        Command::CheckD { .. } => "check-d",
        Command::CheckR { .. } => "check-r",
        Command::EdgeDensity { .. } => "edge-density",
        Command::Decompose { .. } => "decompose",
        Command::Compress { .. } => "compress",
        Command::Trace { .. } => "trace",
        Command::Approx(ApproxCmd::Build { .. }) => "approx build",
        Command::Approx(ApproxCmd::Spread { .. }) => "approx spread",
        Command::Approx(ApproxCmd::Check { .. }) => "approx check",
        Command::Constants { .. } => "constants",
        Command::Scan { .. } => "scan",
    }
}

/// Parses `argv` (program name first), runs the command and collects what
/// it would print.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let fail = |e: Error| Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") };
    let report = match execute(&cli, command_name(&cli.command)) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let code = if report.pass { EXIT_OK } else { EXIT_FAIL };
    let text = match serde_json::to_string_pretty(&Value::Object(report.fields)) {
        Ok(t) => t + "\n",
        Err(e) => return fail(e.into()),
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => fail(e.into()),
        },
        None => Outcome { code, stdout: text, stderr: String::new() },
    }
}
