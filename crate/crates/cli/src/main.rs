mod expr;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use expr::Expr;
use solnet::dc::{emit_lp, fit_maxaffine, Domain, FitOptions};
use solnet::gadgets::{bump_node, box_indicator_node, multi_bump_node, product_subnet, MaxAffinePair};
use solnet::lp::{check_kkt, parse_problem, Problem, Tolerances};
use solnet::mp::{count_regions, covering_bound_pwa, covering_bound_smooth, enumerate_regions, kappa, ParamQp};
use solnet::net::{network_from_json, network_to_json, parallel, series, NetNode, NetworkBuilder, SolutionNetwork, Source, Workspace};
use solnet::recon::{
    bundled_texture, drop_constraints, fit_image_pwa, recon_testfn, reconstruct, sweep_csv, Benchmark, Image,
};
use solnet::target::JetTarget;
use solnet::taylor::{build_taylor_net, report_complexity, TaylorGridSpec};

/// Solution functions of parametric LPs and QPs as network layers.
#[derive(Parser)]
#[command(name = "solnet", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// KKT tolerance; the other solver tolerances scale with it.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an LP/QP problem document and audit the KKT conditions.
    Solve {
        file: PathBuf,
    },
    /// Work with saved networks.
    #[command(subcommand)]
    Net(NetCmd),
    /// Exact building blocks such as the product gadget.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Compile smooth targets into piecewise Taylor networks.
    #[command(subcommand)]
    Taylor(TaylorCmd),
    /// Max-affine difference fits and their LP networks.
    #[command(subcommand)]
    Maxaffine(MaxAffineCmd),
    /// Critical regions and capacity bounds of parametric programs.
    #[command(subcommand)]
    Mp(MpCmd),
    /// Image and benchmark-function reconstruction experiments.
    #[command(subcommand)]
    Recon(ReconCmd),
}

#[derive(Subcommand)]
enum NetCmd {
    /// Evaluate a serialized network at one input.
    Eval {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        /// Also verify KKT conditions of every node solve.
        #[arg(long)]
        audit: bool,
    },
    /// Compose serialized networks, in parallel (shared input) or in series.
    Build {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        series: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimensions and per-layer widths.
    Info {
        file: PathBuf,
    },
}

#[derive(Args)]
struct GadgetOut {
    /// Evaluate at this input instead of printing the network.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GadgetCmd {
    /// `(x1 - a1)(x2 - a2)` from two chained nodes.
    Product {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a2: f64,
        #[command(flatten)]
        out: GadgetOut,
    },
    /// Indicator of [-1, 1], or of a union of intervals `a:b,c:d`.
    Bump {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        intervals: Vec<String>,
        #[command(flatten)]
        out: GadgetOut,
    },
    /// Indicator of grid cell `m` in a unit box split `n` ways per axis.
    Indicator {
        #[arg(long, value_delimiter = ',', required = true)]
        cell: Vec<usize>,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: GadgetOut,
    },
}

#[derive(Args)]
struct TaylorArgs {
    #[arg(long)]
    nx: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    eps: f64,
    /// Cells per axis; defaults to the size the error bound asks for.
    #[arg(long)]
    grid: Option<usize>,
    /// Finite-difference coefficients instead of exact jets.
    #[arg(long)]
    fd: bool,
}

impl TaylorArgs {
    fn spec(&self) -> Result<TaylorGridSpec, String> {
        let mut s = TaylorGridSpec::new(self.nx, self.k, self.eps).map_err(|e| e.to_string())?;
        if let Some(g) = self.grid {
            s = s.with_grid(g);
        }
        if self.fd {
            s = s.finite_differences();
        }
        Ok(s)
    }
}

#[derive(Subcommand)]
enum TaylorCmd {
    /// Compile a target on the unit box into a network.
    Build {
        #[arg(long)]
        expr: String,
        #[command(flatten)]
        spec: TaylorArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Side-car JSON report with the measured error.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compile, then evaluate at one point.
    Eval {
        #[arg(long)]
        expr: String,
        #[command(flatten)]
        spec: TaylorArgs,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
    },
    /// Grid size and first-layer counts; with `--expr`, also the measured
    /// grid error.
    Report {
        #[command(flatten)]
        spec: TaylorArgs,
        #[arg(long)]
        expr: Option<String>,
        #[arg(long, default_value_t = 50)]
        per_axis: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum MaxAffineCmd {
    /// Fit a max-affine difference to a target on a box.
    Fit {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lo: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hi: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// LP network for a fitted pair (a fit document or a bare pair).
    Emit {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MpCmd {
    /// Critical regions of a parametric program over an x box.
    Regions {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lo: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hi: Vec<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Largest spectral norm of the active-set sensitivities.
    Kappa {
        spec: PathBuf,
    },
    /// Upper bound on the number of critical regions.
    Count {
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        nz: usize,
        #[arg(long, default_value_t = 0)]
        m2: usize,
    },
    /// Log covering-number bounds.
    #[command(subcommand)]
    Bound(BoundCmd),
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Log covering number of piecewise-affine solution maps.
    Pwa {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        nz: usize,
        #[arg(long, default_value_t = 0)]
        m2: usize,
    },
    /// Log covering number of smooth solution maps.
    Smooth {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum ReconCmd {
    /// Rebuild an image from its triangulated network.
    Image {
        /// PGM/PPM input; the bundled 32x32 texture when absent.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        keep: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// MSE over keep fractions and seeds, as CSV.
    Drop {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.25,0.5,0.75,1")]
        keep: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Taylor-network MSE over grid sizes for a benchmark function, as CSV.
    Testfn {
        #[arg(long)]
        name: String,
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

type Res = Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: String, summary: String) -> Res {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok(summary)
        }
        None => Ok(text.trim_end_matches('\n').to_string()),
    }
}

fn load_net(path: &Path) -> Result<SolutionNetwork<f64>, String> {
    network_from_json(&read(path)?).map_err(err)
}

fn target(expr: &str, dim: usize) -> Result<JetTarget, String> {
    let e = Expr::parse(expr)?;
    if e.arity() > dim {
        return Err(format!("expression uses x{} but the input has dimension {dim}", e.arity()));
    }
    Ok(JetTarget::new(dim, move |x| e.eval(x)))
}

fn json_line(v: serde_json::Value) -> String {
    serde_json::to_string(&v).expect("values serialize")
}

fn run(cli: Cli) -> Res {
    let tol = cli.tol.map(Tolerances::with_kkt).unwrap_or_default();
    match cli.cmd {
        Cmd::Solve { file } => {
            let p: Problem<f64> = parse_problem(&read(&file)?).map_err(err)?;
            let r = p.solve(&tol).map_err(err)?;
            let kkt = r.is_optimal().then(|| check_kkt(p.as_ref(), &r, tol.kkt));
            Ok(serde_json::to_string_pretty(&json!({ "result": r, "kkt": kkt })).map_err(err)?)
        }
        Cmd::Net(c) => net(c, &tol),
        Cmd::Gadget(c) => gadget(c, &tol),
        Cmd::Taylor(c) => taylor(c),
        Cmd::Maxaffine(c) => maxaffine(c),
        Cmd::Mp(c) => mp(c),
        Cmd::Recon(c) => recon(c, cli.seed),
    }
}

fn net(c: NetCmd, tol: &Tolerances) -> Res {
    match c {
        NetCmd::Eval { file, x, audit } => {
            let n = load_net(&file)?;
            if audit {
                let mut a = Default::default();
                let v = n.evaluate_audited(&x, tol, &mut a).map_err(err)?;
                return Ok(json_line(json!({ "output": v, "solves": a.solves, "kkt_failures": a.failures, "max_residual": a.max_residual })));
            }
            let v = n.evaluate_with(&x, &mut Workspace::default(), tol).map_err(err)?;
            Ok(json_line(json!(v)))
        }
        NetCmd::Build { files, series: chain, out } => {
            let nets = files.iter().map(|f| load_net(f)).collect::<Result<Vec<_>, _>>()?;
            let composed = if chain {
                let mut it = nets.into_iter();
                let first = it.next().expect("clap requires one file");
                it.try_fold(first, |acc, n| series(&acc, &n)).map_err(err)?
            } else {
                parallel(&nets.iter().collect::<Vec<_>>()).map_err(err)?
            };
            let w = composed.widths();
            let summary = format!("inputs={} outputs={} nodes={} depth={}", composed.n_inputs(), composed.out_dim(), w.nodes, w.depth);
            write_or_print(out.as_deref(), network_to_json(&composed), summary)
        }
        NetCmd::Info { file } => {
            let n = load_net(&file)?;
            Ok(serde_json::to_string_pretty(&json!({ "inputs": n.n_inputs(), "outputs": n.out_dim(), "complexity": n.widths() })).map_err(err)?)
        }
    }
}

fn single_node(node: NetNode<f64>, n_inputs: usize) -> Result<SolutionNetwork<f64>, String> {
    let mut b = NetworkBuilder::new(n_inputs, 1);
    let id = b.add_node(node);
    b.connect_all(Source::Input, id, 0).map_err(err)?;
    b.readout_component(Source::Node(id), 0, 0, 1.0).map_err(err)?;
    b.build().map_err(err)
}

fn gadget(c: GadgetCmd, tol: &Tolerances) -> Res {
    let (net, out) = match c {
        GadgetCmd::Product { a1, a2, out } => (product_subnet(a1, a2), out),
        GadgetCmd::Bump { intervals, out } => {
            let node = if intervals.is_empty() {
                bump_node()
            } else {
                let iv = intervals
                    .iter()
                    .map(|s| {
                        let (a, b) = s.split_once(':').ok_or_else(|| format!("interval {s:?} is not a:b"))?;
                        Ok((a.trim().parse::<f64>().map_err(err)?, b.trim().parse::<f64>().map_err(err)?))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                multi_bump_node(&iv).map_err(err)?
            };
            (single_node(node, 1)?, out)
        }
        GadgetCmd::Indicator { cell, n, out } => {
            let dim = cell.len();
            (single_node(box_indicator_node(&cell, n).map_err(err)?, dim)?, out)
        }
    };
    if let Some(x) = &out.x {
        let v = net.evaluate_with(x, &mut Workspace::default(), tol).map_err(err)?;
        return Ok(json_line(json!(v)));
    }
    let w = net.widths();
    write_or_print(out.out.as_deref(), network_to_json(&net), format!("nodes={} depth={}", w.nodes, w.depth))
}

fn taylor(c: TaylorCmd) -> Res {
    match c {
        TaylorCmd::Build { expr, spec, out, report } => {
            let s = spec.spec()?;
            let f = target(&expr, s.n_x)?;
            let net = build_taylor_net::<f64>(&f, &s).map_err(err)?;
            let mut rep = report_complexity(&net);
            if let Some(path) = &report {
                rep.measured_error = Some(net.grid_error(&f, 50, true).map_err(err)?.sup);
                std::fs::write(path, serde_json::to_string_pretty(&rep).map_err(err)?).map_err(err)?;
            }
            let summary = format!("N={} nodes={} depth={} bound={:e}", s.grid, rep.nodes, rep.depth, rep.error_bound);
            write_or_print(out.as_deref(), network_to_json(&net.network), summary)
        }
        TaylorCmd::Eval { expr, spec, x } => {
            let s = spec.spec()?;
            let f = target(&expr, s.n_x)?;
            let net = build_taylor_net::<f64>(&f, &s).map_err(err)?;
            let (v, nudged) = net.evaluate_in(&x, &mut Workspace::default()).map_err(err)?;
            use solnet::target::Target;
            Ok(json_line(json!({ "value": v, "target": f.eval(&x), "nudged": nudged })))
        }
        TaylorCmd::Report { spec, expr, per_axis, json } => {
            let s = spec.spec()?;
            let (cons, vars) = s.first_layer();
            let mut doc = json!({
                "N": s.grid,
                "cells": s.cells(),
                "monomials": s.monomials(),
                "first_layer_constraints": cons,
                "first_layer_variables": vars,
                "depth_bound": 2 * s.k,
                "error_bound": s.error_bound(),
            });
            if let Some(e) = expr {
                let f = target(&e, s.n_x)?;
                let net = build_taylor_net::<f64>(&f, &s).map_err(err)?;
                let rep = report_complexity(&net);
                let g = net.grid_error(&f, per_axis, true).map_err(err)?;
                doc["depth"] = json!(rep.depth);
                doc["nodes"] = json!(rep.nodes);
                doc["measured_sup_error"] = json!(g.sup);
                doc["measured_mse"] = json!(g.mse);
            }
            if json {
                return Ok(serde_json::to_string_pretty(&doc).map_err(err)?);
            }
            let mut out = String::new();
            for (k, v) in doc.as_object().expect("object literal") {
                let _ = writeln!(out, "{k}={v}");
            }
            Ok(out.trim_end().to_string())
        }
    }
}

fn maxaffine(c: MaxAffineCmd) -> Res {
    match c {
        MaxAffineCmd::Fit { expr, eps, nx, rho, lo, hi, out } => {
            let e = Expr::parse(&expr)?;
            let dim = nx.or(lo.as_ref().map(Vec::len)).unwrap_or(e.arity().max(1));
            let domain = match (lo, hi) {
                (None, None) => Domain::unit(dim),
                (lo, hi) => Domain::new(lo.unwrap_or(vec![0.0; dim]), hi.unwrap_or(vec![1.0; dim])).map_err(err)?,
            };
            let f = target(&expr, domain.dim())?;
            let opts = FitOptions { rho, domain: Some(domain), ..Default::default() };
            let fit = fit_maxaffine(&f, eps, &opts).map_err(err)?;
            let (k1, k2) = fit.planes();
            let summary = format!(
                "planes={k1}+{k2} rho={} budget={} sup_error={:e} gap_bound={:e} certified={}",
                fit.rho,
                fit.budget.planes,
                fit.certificate.sup_error,
                fit.certificate.gap_bound,
                fit.certified()
            );
            match out {
                Some(p) => write_or_print(Some(&p), fit.to_json(), summary),
                None => Ok(summary),
            }
        }
        MaxAffineCmd::Emit { file, out } => {
            let v: serde_json::Value = serde_json::from_str(&read(&file)?).map_err(err)?;
            let pair: MaxAffinePair<f64> = serde_json::from_value(v.get("pair").cloned().unwrap_or(v)).map_err(err)?;
            let em = emit_lp::<f64>(&pair);
            let c = em.counts;
            let summary = format!("constraints={} variables={} variables_single={}", c.constraints, c.variables, c.variables_single);
            write_or_print(out.as_deref(), network_to_json(&em.network), summary)
        }
    }
}

fn mp(c: MpCmd) -> Res {
    let load = |p: &Path| -> Result<ParamQp, String> { serde_json::from_str(&read(p)?).map_err(err) };
    match c {
        MpCmd::Regions { spec, theta, lo, hi, json, csv } => {
            let s = load(&spec)?;
            let lo = if lo.is_empty() { vec![-1.0; s.n_x] } else { lo };
            let hi = if hi.is_empty() { vec![1.0; s.n_x] } else { hi };
            let en = enumerate_regions(&s, &theta, &lo, &hi).map_err(err)?;
            if let Some(p) = json {
                std::fs::write(&p, en.to_json()).map_err(err)?;
            }
            if let Some(p) = csv {
                std::fs::write(&p, en.summary_csv()).map_err(err)?;
            }
            let mut out = format!("regions={} examined={} bound={}", en.regions.len(), en.examined.len(), count_regions(s.m1(), s.n_z, s.m2()));
            for r in &en.regions {
                let _ = write!(out, "\n{:?} radius={:e} center={:?}", r.active, r.radius, r.center);
            }
            Ok(out)
        }
        MpCmd::Kappa { spec } => {
            let r = kappa(&load(&spec)?).map_err(err)?;
            Ok(format!("{} argmax={:?}", r.kappa, r.argmax))
        }
        MpCmd::Count { m1, nz, m2 } => Ok(count_regions(m1, nz, m2).to_string()),
        MpCmd::Bound(BoundCmd::Pwa { eps, kappa, m1, nz, m2 }) => Ok(covering_bound_pwa(eps, kappa, m1, nz, m2).to_string()),
        MpCmd::Bound(BoundCmd::Smooth { eps, k, nx, n }) => Ok(covering_bound_smooth(eps, k, nx, n).to_string()),
    }
}

fn load_image(input: Option<&Path>) -> Result<Image, String> {
    match input {
        Some(p) => Image::read(p).map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(bundled_texture()),
    }
}

fn recon(c: ReconCmd, seed: u64) -> Res {
    match c {
        ReconCmd::Image { input, keep, out } => {
            let img = load_image(input.as_deref())?;
            let fit = fit_image_pwa(&img).map_err(err)?;
            let (image, mse, fallback) = if keep >= 1.0 {
                let r = reconstruct(&fit.network, &img, &fit.mean).map_err(err)?;
                (r.image, r.mse, r.fallback_pixels)
            } else {
                let r = drop_constraints(&fit, &img, keep, seed).map_err(err)?;
                (r.image, r.mse, r.fallback_pixels)
            };
            if let Some(p) = out {
                image.write(&p).map_err(err)?;
            }
            Ok(format!("MSE {mse:?}\nfallback_pixels {fallback}"))
        }
        ReconCmd::Drop { input, keep, seeds, csv } => {
            let img = load_image(input.as_deref())?;
            let fit = fit_image_pwa(&img).map_err(err)?;
            let mut text = String::from("keep,seed,kept_rows,total_rows,kept_triangles,fallback_pixels,mse\n");
            for &k in &keep {
                for s in seed..seed + seeds {
                    let r = drop_constraints(&fit, &img, k, s).map_err(err)?;
                    let _ = writeln!(text, "{},{},{},{},{},{},{:e}", r.keep, r.seed, r.kept_rows, r.total_rows, r.kept_triangles, r.fallback_pixels, r.mse);
                }
            }
            write_or_print(csv.as_deref(), text, format!("{} rows", keep.len() as u64 * seeds))
        }
        ReconCmd::Testfn { name, k, n, csv } => {
            let b = Benchmark::parse(&name).ok_or_else(|| format!("unknown benchmark {name:?}; one of alpine, parsopoulos, trid, powell"))?;
            let rows = recon_testfn(b, k, &n).map_err(err)?;
            write_or_print(csv.as_deref(), sweep_csv(&rows), format!("{} rows", rows.len()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", json_line(json!({ "error": "usage", "kind": format!("{:?}", e.kind()), "message": first })));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(text) => {
            if !text.is_empty() {
                let _ = writeln!(std::io::stdout(), "{text}");
            }
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("{}", json_line(json!({ "error": "domain", "message": msg })));
            ExitCode::from(1)
        }
    }
}
