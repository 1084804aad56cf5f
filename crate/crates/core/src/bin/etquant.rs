use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use etquant::exact::{
    closure_convergence_check, closure_two_point, edge_complete_family, enumerate, exact_family, triangle_free_family,
    EnumerationOptions, SupportTable, DEFAULT_ENUMERATION_CAP,
};
use etquant::geometry::{boundary_samples, cone_complex, Direction};
use etquant::harness::{figure_harness, turan_mode_check, FigurePreset};
use etquant::mcmc::{run, Init, SamplerConfig};
use etquant::output::{boundary_plot, trajectory_plot, write_boundary_csv, write_json};
use etquant::rational::{parse_pair, Scalar};
use etquant::variational::{classify_line, direction_limit, Limit, Line};
use etquant::verify::{run_suite, Suite};

#[derive(Parser, Debug)]
#[command(name = "etquant", version, about = "Edge-triangle random graph toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a parameter direction or a line of parameters.
    Classify(ClassifyArgs),
    /// Tabulate the boundary of the realizable density region.
    Boundary(BoundaryArgs),
    /// List the normal cones of the limiting hull.
    Cones(ConesArgs),
    /// Enumerate all labeled graphs on n nodes into a support table.
    Enumerate(EnumerateArgs),
    /// Evaluate an exact finite-n family.
    Family(FamilyArgs),
    /// Run the Metropolis sampler or a figure experiment.
    Sample(SampleArgs),
    /// Score the Turán graphs by weight plus labeled count.
    ModeCheck(ModeCheckArgs),
    /// Run a self-check suite.
    Verify(VerifyArgs),
}

fn pair(s: &str) -> Result<(Scalar, Scalar), String> {
    parse_pair(s).map_err(|e| e.to_string())
}

fn pair_f64(s: &str) -> Result<(f64, f64), String> {
    pair(s).map(|(a, b)| (a.to_f64(), b.to_f64()))
}

fn limit(s: &str) -> Result<Limit, String> {
    match s {
        "+inf" | "inf" => Ok(Limit::PlusInfinity),
        "-inf" => Ok(Limit::MinusInfinity),
        _ => Err(format!("limit must be +inf or -inf, got `{s}`")),
    }
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Direction `X,Y`; fractions such as `1,-3/4` are exact.
    #[arg(long, value_parser = pair, allow_hyphen_values = true, conflicts_with_all = ["line", "limit"], required_unless_present = "line")]
    direction: Option<(Scalar, Scalar)>,
    /// Base point `B1,B2` used on critical rays.
    #[arg(long, value_parser = pair, allow_hyphen_values = true, requires = "direction")]
    beta: Option<(Scalar, Scalar)>,
    /// Line `a,b` for `β1 = a β2 + b`.
    #[arg(long, value_parser = pair, allow_hyphen_values = true, requires = "limit")]
    line: Option<(Scalar, Scalar)>,
    /// Direction of `β2`: `+inf` or `-inf`.
    #[arg(long, value_parser = limit, allow_hyphen_values = true, requires = "line")]
    limit: Option<Limit>,
}

#[derive(Args, Debug)]
struct BoundaryArgs {
    #[arg(long, default_value_t = 1001)]
    resolution: usize,
    /// CSV destination.
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG plot destination.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConesArgs {
    #[arg(long, default_value_t = 10)]
    k_max: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long, short)]
    n: usize,
    /// Allow n = 8 (2^28 graphs).
    #[arg(long)]
    long: bool,
    /// Print progress to stderr.
    #[arg(long)]
    progress: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyKind {
    /// Full family from an enumerated support.
    Exact,
    /// Empty versus complete graph.
    EdgeComplete,
    /// Family restricted to triangle-free graphs.
    TriangleFree,
    /// Adjacent Turán pair on a critical facet.
    TwoPoint,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, short)]
    n: usize,
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    beta: (Scalar, Scalar),
    #[arg(long, value_enum, default_value = "exact")]
    kind: FamilyKind,
    /// Facet index for `--kind two-point`.
    #[arg(long, default_value_t = 1)]
    k: u64,
    /// Support table CSV from `enumerate`; enumerated on the fly otherwise.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Exact direction `X,Y` for a closure convergence check.
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    closure: Option<(Scalar, Scalar)>,
    /// Comma-separated radii for `--closure`.
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 20.0, 40.0])]
    radii: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Plain-text preset file with `name = flags` lines.
    #[arg(long, requires = "preset")]
    preset_file: Option<PathBuf>,
    /// Preset name inside `--preset-file`; explicit flags override it.
    #[arg(long, requires = "preset_file")]
    preset: Option<String>,
    /// Run a figure experiment instead of a single chain.
    #[arg(long)]
    figure: Option<FigurePreset>,
    #[arg(long, short)]
    n: Option<usize>,
    #[arg(long, value_parser = pair_f64, allow_hyphen_values = true)]
    beta: Option<(f64, f64)>,
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `empty`, `complete`, `turan:R` or `random:P`.
    #[arg(long, default_value = "empty")]
    init: Init,
    #[arg(long, default_value_t = 1000)]
    thin: u64,
    /// Trajectory CSV, or the JSON report with `--figure`.
    #[arg(long)]
    out: PathBuf,
    /// Final graph as an edge list.
    #[arg(long)]
    graph_out: Option<PathBuf>,
    /// Run metadata and summary as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Trajectory plot over the region boundary.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModeCheckArgs {
    #[arg(long, short, default_value_t = FigurePreset::NODES)]
    n: usize,
    #[arg(long, value_parser = pair_f64, allow_hyphen_values = true, required_unless_present = "figure")]
    beta: Option<(f64, f64)>,
    #[arg(long, conflicts_with = "beta")]
    figure: Option<FigurePreset>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot write {}", path.display()))?))
}

fn emit_json(out: Option<&Path>, value: &impl serde::Serialize) -> Result<()> {
    match out {
        Some(p) => write_json(create(p)?, value)?,
        None => write_json(io::stdout().lock(), value)?,
    }
    Ok(())
}

/// Invalid flag values detected after parsing; exits with status 2 like
/// other usage errors.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn classify(a: ClassifyArgs) -> Result<()> {
    let value = if let Some((x, y)) = a.direction {
        if x.is_zero() && y.is_zero() {
            return Err(Usage("--direction must be nonzero".into()).into());
        }
        let o = Direction::new(x, y)?;
        let d = direction_limit(&o, a.beta)?;
        json!({
            "input": {
                "direction": [x.to_string(), y.to_string()],
                "beta": a.beta.as_ref().map(|(b1, b2)| [b1.to_string(), b2.to_string()]),
            },
            "classification": d.report.classification,
            "near_critical": d.report.near_critical,
            "exact": d.report.exact,
            "side": d.side,
            "class": d.class.map(|c| c.name()),
            "parameters": d.class.map(|c| c.parameters()),
        })
    } else {
        let (a_, b) = a.line.ok_or_else(|| anyhow!("--direction or --line is required"))?;
        let line = Line { a: a_, b, limit: a.limit.ok_or_else(|| anyhow!("--limit is required"))? };
        classify_line(&line)?.to_json(&line)
    };
    emit_json(None, &value)
}

fn boundary(a: BoundaryArgs) -> Result<()> {
    let rows = boundary_samples(a.resolution)?;
    let mut w = create(&a.out)?;
    write_boundary_csv(&rows, &mut w)?;
    w.flush()?;
    if let Some(p) = a.svg {
        create(&p)?.write_all(boundary_plot(&rows).to_svg().as_bytes())?;
    }
    Ok(())
}

fn load_table(n: usize, path: Option<&Path>) -> Result<SupportTable> {
    match path {
        Some(p) => {
            let t = SupportTable::read_csv(File::open(p).with_context(|| format!("cannot read {}", p.display()))?)?;
            if t.n() != n {
                bail!("table {} is for n = {}, not {n}", p.display(), t.n());
            }
            Ok(t)
        }
        None => Ok(enumerate(n, EnumerationOptions::default(), None)?.table),
    }
}

fn family(a: FamilyArgs) -> Result<()> {
    let beta = (a.beta.0.to_f64(), a.beta.1.to_f64());
    let mut value = match a.kind {
        FamilyKind::Exact => {
            let table = load_table(a.n, a.table.as_deref())?;
            let fam = exact_family(&table, beta)?;
            json!({
                "kind": "exact",
                "n": a.n,
                "beta": beta,
                "log_normalizer": fam.log_normalizer,
                "psi": fam.psi(),
                "mean": fam.mean(),
                "distribution": fam.distribution.to_json(),
            })
        }
        FamilyKind::EdgeComplete => {
            json!({ "kind": "edge_complete", "n": a.n, "beta": beta, "distribution": edge_complete_family(a.n, beta)?.to_json() })
        }
        FamilyKind::TriangleFree => {
            let table = load_table(a.n, a.table.as_deref())?;
            json!({ "kind": "triangle_free", "n": a.n, "beta": beta, "distribution": triangle_free_family(&table, beta.0)?.to_json() })
        }
        FamilyKind::TwoPoint => {
            let f = closure_two_point(a.n, a.k, a.beta)?;
            json!({
                "kind": "two_point",
                "n": a.n,
                "k": a.k,
                "beta": beta,
                "reduced_parameter": f.reduced_parameter.to_string(),
                "exponent": f.exponent,
                "counts": [f.counts[0].to_string(), f.counts[1].to_string()],
                "log_ratio": f.log_ratio,
                "distribution": f.distribution.to_json(),
            })
        }
    };
    if let Some((x, y)) = a.closure {
        let o = match (x.as_exact(), y.as_exact()) {
            (Some(x), Some(y)) => (x, y),
            _ => bail!("--closure needs an exact direction"),
        };
        let table = load_table(a.n, a.table.as_deref())?;
        value["closure"] = json!(closure_convergence_check(&table, beta, o, &a.radii)?);
    }
    emit_json(a.out.as_deref(), &value)
}

fn enumerate_cmd(a: EnumerateArgs) -> Result<()> {
    let progress = |done: u64, total: u64| eprintln!("enumerated {done}/{total}");
    let report: Option<&(dyn Fn(u64, u64) + Sync)> = if a.progress { Some(&progress) } else { None };
    if a.n > DEFAULT_ENUMERATION_CAP && !a.long {
        bail!("n = {} exceeds the default cap {DEFAULT_ENUMERATION_CAP}; pass --long", a.n);
    }
    let en = enumerate(a.n, EnumerationOptions { allow_long: a.long }, report)?;
    let mut w = create(&a.out)?;
    en.table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Reads `name = flags` lines; `#` starts a comment.
fn preset_flags(path: &Path, name: &str) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, flags) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected `name = flags`", path.display(), i + 1))?;
        if key.trim() == name {
            return Ok(flags.split_whitespace().map(String::from).collect());
        }
    }
    bail!("preset `{name}` not found in {}", path.display())
}

fn sample(a: SampleArgs) -> Result<()> {
    if let Some(preset) = a.figure {
        let report = figure_harness(preset, a.steps, a.seed)?;
        return emit_json(Some(&a.out), &report);
    }
    let n = a.n.ok_or_else(|| anyhow!("--n is required without --figure"))?;
    let beta = a.beta.ok_or_else(|| anyhow!("--beta is required without --figure"))?;
    let config = SamplerConfig { n, beta, steps: a.steps, seed: a.seed, init: a.init, thin: a.thin };
    let traj = run(&config)?;
    let mut w = create(&a.out)?;
    traj.write_csv(&mut w)?;
    w.flush()?;
    if let Some(p) = &a.graph_out {
        let mut w = create(p)?;
        traj.final_graph.write_edge_list(&mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.report {
        let fin = traj.final_point();
        let value = json!({
            "metadata": config.metadata(),
            "acceptance_rate": traj.acceptance_rate,
            "final_point": fin,
            "final_counts": [traj.final_graph.edge_count(), traj.final_graph.triangle_count()],
            "partition": traj.final_graph.partition_recovery(),
        });
        emit_json(Some(p), &value)?;
    }
    if let Some(p) = &a.svg {
        let rows = boundary_samples(401)?;
        create(p)?.write_all(trajectory_plot(&traj, &rows).to_svg().as_bytes())?;
    }
    Ok(())
}

fn mode_check(a: ModeCheckArgs) -> Result<()> {
    let (n, beta) = match a.figure {
        Some(p) => (FigurePreset::NODES, p.beta()),
        None => (a.n, a.beta.ok_or_else(|| anyhow!("--beta or --figure is required"))?),
    };
    emit_json(a.out.as_deref(), &turan_mode_check(n, beta)?)
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let report = run_suite(a.suite);
    for c in &report.checks {
        eprintln!("{} {} ({:.2}s): {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.seconds, c.detail);
    }
    emit_json(a.out.as_deref(), &report)?;
    Ok(report.passed)
}

/// Expands `--preset-file F --preset NAME` into the preset's flags, placed
/// before the explicit ones so the latter win.
fn expand_presets(args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "sample") else {
        return Ok(args);
    };
    let (mut file, mut name, mut rest) = (None, None, Vec::new());
    let mut it = args[pos + 1..].iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--preset-file" => file = it.next().cloned(),
            "--preset" => name = it.next().cloned(),
            _ if a.starts_with("--preset-file=") => file = Some(a["--preset-file=".len()..].to_string()),
            _ if a.starts_with("--preset=") => name = Some(a["--preset=".len()..].to_string()),
            _ => rest.push(a.clone()),
        }
    }
    let (file, name) = match (file, name) {
        (Some(f), Some(n)) => (f, n),
        (None, None) => return Ok(args),
        _ => bail!("--preset-file and --preset must be given together"),
    };
    let mut out = args[..=pos].to_vec();
    out.extend(preset_flags(Path::new(&file), &name)?);
    out.extend(rest);
    Ok(out)
}

fn real_main() -> Result<bool> {
    let raw: Vec<String> = std::env::args().collect();
    let args = expand_presets(raw)?;
    let cli = match Cli::command_with_overrides().try_get_matches_from(&args) {
        Ok(m) => <Cli as clap::FromArgMatches>::from_arg_matches(&m)?,
        Err(e) => e.exit(),
    };
    match cli.command {
        Command::Classify(a) => classify(a)?,
        Command::Boundary(a) => boundary(a)?,
        Command::Cones(a) => emit_json(a.out.as_deref(), &cone_complex(a.k_max))?,
        Command::Enumerate(a) => enumerate_cmd(a)?,
        Command::Family(a) => family(a)?,
        Command::Sample(a) => sample(a)?,
        Command::ModeCheck(a) => mode_check(a)?,
        Command::Verify(a) => return verify(a),
    }
    Ok(true)
}

trait WithOverrides {
    fn command_with_overrides() -> clap::Command;
}

impl WithOverrides for Cli {
    fn command_with_overrides() -> clap::Command {
        use clap::CommandFactory;
        Cli::command().mut_subcommand("sample", |c| c.args_override_self(true))
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
