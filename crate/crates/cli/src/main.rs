//! `pbp`: sampling, evolution, scans and the blocking-set construction from
//! the command line.
//!
//! Exit codes: 0 success, 1 I/O error, 2 configuration error, 3 a
//! construction or verification failed.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use pbp_core::compare::{check_domination, DominationReport};
use pbp_core::dynamics::{evolve, Region, Rule, SiteState, Variant};
use pbp_core::experiments::{centered_box, density_csv, estimate_final_density, ScanSpec};
use pbp_core::fixtures::{plant_fixture, planted_closed, FixtureGeometry, FixtureId};
use pbp_core::sampler::{realize, SampleMode, SampleParams, SiteField};
use pbp_core::shell::{compute_a_and_s, default_cap, verify_shell, write_shell_dump, AllBlack, AllWhite, Coloring,
    RandomColoring, ShellReport};
use pbp_core::snapshot::{parse_snapshot, write_snapshot};
use pbp_core::stego::{construct, verify_structure, Model, ScaleParams, StegoStructure, StructureReport};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "pbp", version, about = "Polluted bootstrap percolation on Z^3")]
struct Cli {
    /// Worker threads for parallel trials (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one configuration in a box, evolve it and summarize.
    Simulate(SimulateArgs),
    /// Estimate the final density over a (p, q) grid.
    Scan(ScanArgs),
    /// Build and check a shell for a coloring of the renormalized lattice.
    Shell(ShellArgs),
    /// Build the blocking set Z from a fixture or a random configuration.
    Stego(StegoArgs),
    /// Re-check a stego dump and run the comparison on Z.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum VariantArg {
    Modified,
    Standard,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Modified => Variant::Modified,
            VariantArg::Standard => Variant::Standard,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ExteriorArg {
    Empty,
    Occupied,
    Closed,
}

impl From<ExteriorArg> for SiteState {
    fn from(e: ExteriorArg) -> Self {
        match e {
            ExteriorArg::Empty => SiteState::Empty,
            ExteriorArg::Occupied => SiteState::Occupied,
            ExteriorArg::Closed => SiteState::Closed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "modified")]
    rule: VariantArg,
    /// Threshold.
    #[arg(long = "r", default_value_t = 3)]
    r: u8,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long, default_value = "iid")]
    mode: SampleMode,
    /// Side length of the box around the origin.
    #[arg(long, default_value_t = 21)]
    side: i64,
    #[arg(long, value_enum, default_value = "empty")]
    exterior: ExteriorArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the final configuration here.
    #[arg(long)]
    #[serde(skip)]
    snapshot: Option<PathBuf>,
    /// Write the summary here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    #[arg(long = "p", value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long = "q", value_delimiter = ',', required = true)]
    q: Vec<f64>,
    #[arg(long, value_enum, default_value = "modified")]
    rule: VariantArg,
    #[arg(long = "r", default_value_t = 3)]
    r: u8,
    #[arg(long, default_value_t = 21)]
    side: i64,
    #[arg(long, value_enum, default_value = "empty")]
    exterior: ExteriorArg,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "iid")]
    mode: SampleMode,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ColoringArg {
    AllBlack,
    AllWhite,
    Random,
}

#[derive(Args, Debug, Serialize)]
struct ShellArgs {
    #[arg(long)]
    n: i64,
    #[arg(long, value_enum, default_value = "all-black")]
    coloring: ColoringArg,
    /// Probability that a site is black, for the random coloring.
    #[arg(long, default_value_t = 0.995)]
    b: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Norm at which the reachable set counts as escaped (default n + 6 ceil(sqrt n)).
    #[arg(long)]
    cap: Option<i64>,
    /// Write the shell sites here.
    #[arg(long)]
    #[serde(skip)]
    dump: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModelArg {
    Modified,
    StandardPairs,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Modified => Model::Modified,
            ModelArg::StandardPairs => Model::StandardPairs,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct StegoArgs {
    /// Planted fixture (full, all-black-shell, ...); otherwise sample with --p/--q/--mode/--seed.
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    n: i64,
    #[arg(long = "L")]
    l: i64,
    #[arg(long)]
    m: i64,
    #[arg(long, value_enum, default_value = "modified")]
    model: ModelArg,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long, default_value = "iid")]
    mode: SampleMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cap: Option<i64>,
    /// Write the dump here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Write the initial configuration on the bounding box of Z here.
    #[arg(long)]
    #[serde(skip)]
    snapshot: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Stego dump written by `pbp stego`.
    #[arg(long)]
    dump: PathBuf,
    /// Configuration to check against; defaults to the one recorded in the dump.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct StegoDump {
    version: String,
    config: StegoArgs,
    structure: StegoStructure,
    shell: ShellReport,
    report: StructureReport,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    version: &'a str,
    structure_ok: bool,
    report: StructureReport,
    domination: DominationReport,
}

/// Failure classes, one per exit code.
enum Failure {
    Io(anyhow::Error),
    Config(anyhow::Error),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl From<pbp_core::Error> for Failure {
    fn from(e: pbp_core::Error) -> Self {
        match e {
            pbp_core::Error::Io(_) => Failure::Io(e.into()),
            pbp_core::Error::Structural(s) => Failure::Verification(s),
            other => Failure::Config(other.into()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Io)
}

fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(Failure::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(config_err)?;
    s.push('\n');
    Ok(s)
}

fn header(args: &impl Serialize) -> Result<String, Failure> {
    Ok(format!("pbp {VERSION} config={}", serde_json::to_string(args).map_err(config_err)?))
}

fn rule(variant: VariantArg, r: u8) -> Result<Rule, Failure> {
    Rule::new(variant.into(), r).map_err(config_err)
}

fn cmd_simulate(a: &SimulateArgs) -> Outcome {
    if a.side < 1 {
        return Err(config_err(anyhow::anyhow!("--side must be positive")));
    }
    let rule = rule(a.rule, a.r)?;
    let params = SampleParams::new(a.p, a.q, a.mode, a.seed)?;
    let b = centered_box(a.side);
    let initial = realize(&*params.field()?, Region::Box(b), a.exterior.into());
    let r = evolve(&initial, rule);
    let occupied = r.final_config.count(SiteState::Occupied);
    let summary = serde_json::json!({
        "version": VERSION,
        "config": a,
        "occupied": occupied,
        "closed": r.final_config.count(SiteState::Closed),
        "density": occupied as f64 / b.volume() as f64,
        "origin_occupied": r.is_occupied(pbp_core::Vertex::ORIGIN),
        "origin_time": r.occupation_time.get(&pbp_core::Vertex::ORIGIN),
        "rounds": r.rounds,
    });
    if let Some(path) = &a.snapshot {
        emit(Some(path), &write_snapshot(&r.final_config, &[header(a)?])?)?;
    }
    emit(a.out.as_deref(), &json(&summary)?)
}

fn cmd_scan(a: &ScanArgs) -> Outcome {
    let spec = ScanSpec {
        p_grid: a.p.clone(),
        q_grid: a.q.clone(),
        rule: rule(a.rule, a.r)?,
        box_side: a.side,
        exterior: a.exterior.into(),
        trials: a.trials,
        seed: a.seed,
        mode: a.mode,
    };
    let est = estimate_final_density(&spec)?;
    let text = match a.format {
        Format::Csv => density_csv(&spec, &est, VERSION)?,
        Format::Json => json(&serde_json::json!({ "version": VERSION, "config": spec, "estimates": est }))?,
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_shell(a: &ShellArgs) -> Outcome {
    if a.n < 1 {
        return Err(config_err(anyhow::anyhow!("--n must be positive")));
    }
    if !(0.0..=1.0).contains(&a.b) {
        return Err(config_err(anyhow::anyhow!("--b must lie in [0, 1]")));
    }
    let coloring: Box<dyn Coloring> = match a.coloring {
        ColoringArg::AllBlack => Box::new(AllBlack),
        ColoringArg::AllWhite => Box::new(AllWhite),
        ColoringArg::Random => Box::new(RandomColoring { b: a.b, seed: a.seed }),
    };
    let cand = compute_a_and_s(a.n, &*coloring, a.cap.unwrap_or_else(|| default_cap(a.n)))?;
    let report = match cand.status {
        pbp_core::shell::ShellStatus::Complete => Some(verify_shell(&cand)?),
        _ => None,
    };
    if let Some(path) = &a.dump {
        emit(Some(path), &format!("# {}\n{}", header(a)?, write_shell_dump(&cand)))?;
    }
    let out = serde_json::json!({
        "version": VERSION,
        "config": a,
        "status": cand.status.name(),
        "a_size": cand.a.len(),
        "s_size": cand.sites.len(),
        "all_hold": report.as_ref().is_some_and(|r| r.all_hold()),
        "report": report,
    });
    emit(a.out.as_deref(), &json(&out)?)
}

/// The configuration a stego run was built from.
fn stego_field(a: &StegoArgs) -> Result<Box<dyn SiteField>, Failure> {
    match &a.fixture {
        Some(id) => {
            let id: FixtureId = id.parse()?;
            let g = FixtureGeometry::new(a.n, a.l, a.model.into());
            Ok(Box::new(planted_closed(id, &g)?))
        }
        None => Ok(SampleParams::new(a.p, a.q, a.mode, a.seed)?.field()?),
    }
}

fn scale(a: &StegoArgs) -> Result<ScaleParams, Failure> {
    Ok(ScaleParams::new(a.l, a.m, a.model.into())?)
}

fn cmd_stego(a: &StegoArgs) -> Outcome {
    let p = scale(a)?;
    if a.n < 1 {
        return Err(config_err(anyhow::anyhow!("--n must be positive")));
    }
    let field = stego_field(a)?;
    let c = construct(&*field, a.n, &p, a.cap.unwrap_or_else(|| default_cap(a.n)))?;
    let report = verify_structure(&c.structure, &*field);
    if let Some(path) = &a.snapshot {
        let config = match &a.fixture {
            Some(id) => plant_fixture(id.parse()?, &FixtureGeometry::new(a.n, a.l, a.model.into()))?,
            None => realize(&*field, Region::Box(c.structure.bounds), SiteState::Empty),
        };
        emit(Some(path), &write_snapshot(&config, &[header(a)?])?)?;
    }
    let ok = report.ok();
    let count = report.violation_count();
    let dump = StegoDump { version: VERSION.into(), config: a.clone(), structure: c.structure, shell: c.shell, report };
    emit(a.out.as_deref(), &json(&dump)?)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{count} structural violations")))
    }
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let dump: StegoDump =
        serde_json::from_str(&read(&a.dump)?).with_context(|| format!("parsing {}", a.dump.display())).map_err(config_err)?;
    let st = &dump.structure;
    let field: Box<dyn SiteField> = match &a.snapshot {
        Some(path) => Box::new(parse_snapshot(&read(path)?)?.config),
        None => stego_field(&dump.config)?,
    };
    let report = verify_structure(st, &*field);
    let variant = match st.params.model {
        Model::Modified => Variant::Modified,
        Model::StandardPairs => Variant::Standard,
    };
    let domination = check_domination(&st.z_region(), &*field, variant, st.params.m);
    let ok = report.ok() && domination.holds && domination.hypotheses.holds();
    let summary = format!(
        "{} structural violations, domination {}, hypotheses {}",
        report.violation_count(),
        domination.holds,
        domination.hypotheses.holds()
    );
    let out = VerifyOutput { version: VERSION, structure_ok: report.ok(), report, domination };
    emit(a.out.as_deref(), &json(&out)?)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification(summary))
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Shell(a) => cmd_shell(a),
        Command::Stego(a) => cmd_stego(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let args = match config::expand_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    // Later flags override earlier ones, so command-line values beat the config file.
    let mut command = Cli::command().args_override_self(true);
    for name in config::SUBCOMMANDS {
        command = command.mut_subcommand(*name, |s| s.args_override_self(true));
    }
    let parsed = command.try_get_matches_from(args).and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Io(e) | Failure::Config(e) => eprintln!("error: {e:#}"),
                Failure::Verification(s) => eprintln!("verification failed: {s}"),
            }
            ExitCode::from(f.code())
        }
    }
}
