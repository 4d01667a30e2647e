//! `patchlab`: build polytopes and triangulations, analyze patchworked
//! hypersurfaces, sweep sign distributions and verify the structural statements.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use patchlab_core::invariants::{Analysis, Context, InvariantRecord, Options, Status, Verdict};
use patchlab_core::patchwork::RealLift;
use patchlab_core::polytope::LatticePolytope;
use patchlab_core::spectral::Pages;
use patchlab_core::triangulation::{cube, product_of_viro, viro, SignDistribution, Triangulation};
use patchlab_core::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "patchlab", version, about = "Real and tropical homology of patchworked hypersurfaces over F2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a lattice polytope as JSON.
    BuildPolytope(Shape),
    /// Print a built-in primitive triangulation as JSON.
    Triangulate(Shape),
    /// Full analysis of one sign distribution.
    Analyze(Single),
    /// Spectral sequence pages of one sign distribution.
    Pages(Single),
    /// Analyze many seeded sign distributions.
    Sweep(Sweep),
    /// Check every statement on one sign distribution and print a summary.
    Verify(Single),
}

#[derive(Args, Clone)]
struct Shape {
    /// Dilated simplex `d Δ^n` (Viro triangulation).
    #[arg(long, num_args = 2, value_names = ["N", "D"], conflicts_with_all = ["cube", "product"])]
    viro: Option<Vec<i64>>,
    /// Dilated cube `[0, d]^n`.
    #[arg(long, num_args = 2, value_names = ["N", "D"], conflicts_with = "product")]
    cube: Option<Vec<i64>>,
    /// Product `d1 Δ^{n1} x d2 Δ^{n2}`.
    #[arg(long, num_args = 4, value_names = ["N1", "D1", "N2", "D2"])]
    product: Option<Vec<i64>>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Source {
    #[arg(long, num_args = 2, value_names = ["N", "D"], conflicts_with = "triangulation")]
    viro: Option<Vec<i64>>,
    /// Triangulation JSON file.
    #[arg(long)]
    triangulation: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Side {
    Homology,
    Cohomology,
    Both,
}

#[derive(Args, Clone)]
struct Single {
    #[command(flatten)]
    source: Source,
    /// `harnack`, `zero`, `seed:N` or a JSON file of vertex signs.
    #[arg(long, default_value = "harnack")]
    signs: String,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    side: Side,
    /// Also compute the cup pairings on E_1 and E_2 (dense; small instances).
    #[arg(long)]
    pairing: bool,
}

#[derive(Args, Clone)]
struct Sweep {
    #[command(flatten)]
    source: Source,
    /// Number of seeded sign distributions.
    #[arg(long, default_value_t = 10)]
    random: u64,
    /// Item `i` uses signs `seed:(SEED + i)`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("patchlab: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildPolytope(s) => {
            let p = shape_triangulation(&s)?.polytope().clone();
            emit(s.report.as_deref(), &serde_json::from_str::<Value>(&p.to_json()).map_err(parse_err)?)
        }
        Command::Triangulate(s) => {
            let t = shape_triangulation(&s)?;
            emit(s.report.as_deref(), &serde_json::from_str::<Value>(&t.to_json()).map_err(parse_err)?)
        }
        Command::Analyze(s) => {
            let (report, summary) = single(&s, "analyze", true)?;
            finish(s.report.as_deref(), &report, &summary)
        }
        Command::Pages(s) => {
            let (report, summary) = single(&s, "pages", false)?;
            finish(s.report.as_deref(), &report, &summary)
        }
        Command::Verify(s) => {
            let (report, summary) = single(&s, "verify", true)?;
            if let Some(path) = &s.report {
                write(path, &report)?;
            }
            print(&summary)
        }
        Command::Sweep(s) => sweep(&s),
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn pair(v: &[i64]) -> Result<(usize, i64)> {
    let n = usize::try_from(v[0]).map_err(|_| Error::InvalidParameter(format!("dimension {} is negative", v[0])))?;
    Ok((n, v[1]))
}

fn shape_triangulation(s: &Shape) -> Result<Triangulation> {
    if let Some(v) = &s.viro {
        let (n, d) = pair(v)?;
        viro(n, d)
    } else if let Some(v) = &s.cube {
        let (n, d) = pair(v)?;
        cube(n, d)
    } else if let Some(v) = &s.product {
        let (n1, d1) = pair(&v[..2])?;
        let (n2, d2) = pair(&v[2..])?;
        product_of_viro(n1, d1, n2, d2)
    } else {
        Err(Error::InvalidParameter("one of --viro, --cube, --product is required".into()))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(parse_err)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, v: &Value) -> Result<()> {
    match path {
        Some(p) => write(p, v),
        None => print(&serde_json::to_string_pretty(v).map_err(parse_err)?),
    }
}

/// Prints a line; a closed pipe ends output quietly.
fn print(text: &str) -> Result<()> {
    use std::io::Write;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Parse(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

/// Writes the report to `path` and prints the summary, or prints the report.
fn finish(path: Option<&Path>, report: &Value, summary: &str) -> Result<()> {
    match path {
        Some(p) => {
            write(p, report)?;
            print(summary)
        }
        None => emit(None, report),
    }
}

/// The triangulation and whether it is a built-in Viro triangulation.
fn load(source: &Source) -> Result<(Triangulation, Value, bool)> {
    match (&source.viro, &source.triangulation) {
        (Some(v), None) => {
            let (n, d) = pair(v)?;
            Ok((viro(n, d)?, json!({ "viro": [n, d] }), true))
        }
        (None, Some(path)) => Ok((Triangulation::from_json(&read(path)?)?, json!({ "triangulation": path.display().to_string() }), false)),
        _ => Err(Error::InvalidParameter("exactly one of --viro and --triangulation is required".into())),
    }
}

fn signs(t: &Triangulation, spec: &str) -> Result<SignDistribution> {
    match spec {
        "harnack" => Ok(SignDistribution::harnack(t)),
        "zero" => Ok(SignDistribution::zero(t)),
        _ => match spec.strip_prefix("seed:") {
            Some(n) => Ok(SignDistribution::seeded(t, n.parse().map_err(|_| Error::InvalidParameter(format!("bad seed {n:?}")))?)),
            None => SignDistribution::from_json(t, &read(Path::new(spec))?),
        },
    }
}

fn polytope_json(p: &LatticePolytope) -> Value {
    json!({
        "family": p.family(),
        "dim": p.dim(),
        "vertices": p.vertices(),
        "f_vector": p.f_vector(),
        "normalized_volume": p.normalized_volume() as i64,
        "smooth": p.is_smooth(),
    })
}

fn stats_json(ctx: &Context) -> Value {
    let t = ctx.lift.triangulation();
    let cx = ctx.lift.cubical();
    json!({
        "vertices": t.vertices().len(),
        "f_vector": t.f_vector(),
        "cubical_cells": cx.len(),
        "dual_hypersurface_cells": cx.dual_hypersurface().len(),
        "real_top_simplices": ctx.lift.real_count(ctx.dim()),
    })
}

fn pages_json(pages: &Pages) -> Vec<Value> {
    (0..=pages.length).map(|r| json!({ "side": pages.direction, "r": r, "dims": pages.dims[r], "ranks": pages.ranks[r] })).collect()
}

fn invariants_json(r: &InvariantRecord) -> Value {
    json!({
        "ell": r.ell,
        "r_index": r.r_index,
        "iota_omega": r.iota_degree,
        "iota_rp": r.iota_p,
        "omega_class": r.omega_class,
        "euler_characteristic": r.euler_characteristic,
        "components": r.components,
        "component_classes": r.component_classes,
        "cells_rx": r.cells_rx,
        "restriction_ranks": r.restriction_ranks,
        "nonzero_differentials": r.nonzero_differentials,
    })
}

fn betti_json(r: &InvariantRecord) -> Value {
    json!({ "rx": r.betti_rx, "rp": r.betti_rp })
}

fn context(t: Triangulation, options: Options) -> Result<Context> {
    Context::new(RealLift::new(&t)?, options)
}

fn single(s: &Single, command: &str, with_invariants: bool) -> Result<(Value, String)> {
    let (t, source, is_viro) = load(&s.source)?;
    let eps = signs(&t, &s.signs)?;
    let ctx = context(t, Options { tropical_table: true, pairing: s.pairing, viro: is_viro })?;
    let a: Analysis = ctx.analyze(&eps)?;
    let r = &a.record;
    let mut pages = Vec::new();
    if matches!(s.side, Side::Homology | Side::Both) {
        pages.extend(pages_json(&a.homology_pages));
    }
    if matches!(s.side, Side::Cohomology | Side::Both) {
        pages.extend(pages_json(&a.cohomology_pages));
    }
    let mut report = json!({
        "config": { "command": command, "source": source, "signs": s.signs, "side": s.side, "pairing": s.pairing },
        "polytope": polytope_json(ctx.lift.triangulation().polytope()),
        "triangulation_stats": stats_json(&ctx),
        "tropical_table": r.tropical_table,
        "betti": betti_json(r),
        "pages": pages,
    });
    if with_invariants {
        report["invariants"] = invariants_json(r);
        report["verdicts"] = serde_json::to_value(&r.verdicts).map_err(parse_err)?;
        report["pairing_ranks"] = json!(a.pairing_ranks);
        report["counterexample"] = json!(r.counterexample());
    }
    Ok((report, summary(r)))
}

fn summary(r: &InvariantRecord) -> String {
    let mut lines = vec![
        format!("betti_RX = {:?}", r.betti_rx),
        format!("components = {}", r.components),
    ];
    if let Some(c) = &r.component_classes {
        let classes: Vec<String> = c.iter().map(|v| format!("({})", v.iter().map(u8::to_string).collect::<Vec<_>>().join(","))).collect();
        lines.push(format!("component classes = [{}]", classes.join(", ")));
    }
    lines.push(format!("ℓ = {}, r = {}, ι[ω] = {}, ι(ℝP) = {}", r.ell, r.r_index, r.iota_degree, r.iota_p));
    lines.extend(r.verdicts.iter().map(verdict_line));
    lines.push(format!("counterexample: {}", r.counterexample()));
    lines.join("\n")
}

fn verdict_line(v: &Verdict) -> String {
    let tag = match v.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skipped => "SKIP",
    };
    format!("[{tag}] {}: {}", v.check, v.detail)
}

fn sweep(s: &Sweep) -> Result<()> {
    let (t, source, is_viro) = load(&s.source)?;
    let items: Vec<(u64, SignDistribution)> = (0..s.random).map(|i| s.seed.wrapping_add(i)).map(|seed| (seed, SignDistribution::seeded(&t, seed))).collect();
    let ctx = context(t, Options { tropical_table: true, pairing: false, viro: is_viro })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let results: Vec<Result<InvariantRecord>> = pool.install(|| items.par_iter().map(|(_, eps)| ctx.analyze(eps).map(|a| a.record)).collect());
    let records = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut ells = std::collections::BTreeMap::<i64, usize>::new();
    let mut rs = std::collections::BTreeMap::<usize, usize>::new();
    let mut failing = 0;
    let runs: Vec<Value> = items
        .iter()
        .zip(&records)
        .map(|((seed, _), r)| {
            *ells.entry(r.ell).or_default() += 1;
            *rs.entry(r.r_index).or_default() += 1;
            failing += usize::from(r.counterexample());
            json!({
                "seed": seed,
                "betti": betti_json(r),
                "invariants": invariants_json(r),
                "verdicts": r.verdicts,
                "counterexample": r.counterexample(),
            })
        })
        .collect();
    let report = json!({
        "config": { "command": "sweep", "source": source, "random": s.random, "seed": s.seed },
        "polytope": polytope_json(ctx.lift.triangulation().polytope()),
        "triangulation_stats": stats_json(&ctx),
        "tropical_table": ctx.tropical_table,
        "runs": runs,
        "ell_distribution": ells.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        "r_distribution": rs.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        "counterexample": failing > 0,
    });
    let fails: usize = records.iter().flat_map(|r| &r.verdicts).filter(|v| v.status == Status::Fail).count();
    let summary = format!(
        "{} runs, ℓ distribution {:?}, r distribution {:?}, {} failing verdicts in {} runs",
        records.len(),
        ells,
        rs,
        fails,
        failing
    );
    finish(s.report.as_deref(), &report, &summary)
}
