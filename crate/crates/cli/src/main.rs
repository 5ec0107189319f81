//! Command-line surface. All mathematics lives in the library; this crate
//! parses arguments, resolves the run configuration, dispatches, and
//! prints one report. Exit codes: 0 all checks pass, 1 a check failed or
//! could not be certified, 2 bad input, 3 excluded group.

mod commands;
mod config;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use cyclorder::certarith::PrecLadder;
use cyclorder::pingpong::PingPongParams;
use cyclorder::words::{GroupSpec, SpecError, WordError};

use config::RunConfig;
use report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    /// A mathematical check failed or exhausted its precision budget.
    #[error("{0}")]
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(
                SpecError::Trivial | SpecError::FiniteCyclic | SpecError::InfiniteDihedral,
            ) => 3,
            CliError::Check(_) => 1,
            _ => 2,
        }
    }
}

/// Flags shared by every subcommand. A config file given with `--config`
/// overrides these, so a file pins a run down completely.
#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Group as n,k,m1,..,mk (e.g. 0,2,2,3)
    #[arg(long)]
    spec: Option<String>,
    /// Covering degree; must be valid for the group (default 1)
    #[arg(long)]
    d: Option<u64>,
    /// Seed for every random draw
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Starting ball precision in bits
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Largest ball precision the refinement ladder may reach
    #[arg(long)]
    precision_cap: Option<u32>,
    /// Worker threads for parallel checks; 0 means one per core
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// TOML run configuration; fields present in the file win over flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Emit the report as JSON instead of lines
    #[arg(long)]
    json: bool,
}

/// Everything a subcommand needs after flag/config resolution.
pub struct Ctx {
    pub spec: GroupSpec,
    pub params: PingPongParams,
    pub d: Option<u64>,
    pub seed: u64,
    pub svg: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
}

impl Common {
    fn resolve(&self, svg_flag: Option<&PathBuf>) -> Result<(Ctx, bool), CliError> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let spec_text = file
            .spec_string()
            .or_else(|| self.spec.clone())
            .ok_or_else(|| CliError::Input("no group: pass --spec n,k,m1,..,mk".into()))?;
        let spec: GroupSpec = spec_text.parse()?;

        let defaults = PingPongParams::default();
        let ladder = PrecLadder {
            start: file.precision_bits.or(self.precision_bits).unwrap_or(defaults.ladder.start),
            cap: file.precision_cap.or(self.precision_cap).unwrap_or(defaults.ladder.cap),
        };
        let params = PingPongParams {
            spread_exp: file.spread_exp.unwrap_or(defaults.spread_exp),
            length_exp: file.length_exp.unwrap_or(defaults.length_exp),
            ladder,
        };
        let ctx = Ctx {
            spec,
            params,
            d: self.d,
            seed: file.seed.unwrap_or(self.seed),
            svg: file.svg.as_ref().map(PathBuf::from).or_else(|| svg_flag.cloned()),
            report_path: file.report.as_ref().map(PathBuf::from),
        };
        Ok((ctx, self.json))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "cyclorder",
    version,
    about = "Certified circular orders on free products of cyclic groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify the ping-pong configuration (and the d-cover lift with --d)
    Verify(VerifyArgs),
    /// Evaluate the circular order on three words "g1 ; g2 ; g3"
    Eval(EvalArgs),
    /// Check the order axioms on seeded random quadruples
    Axioms(AxiomsArgs),
    /// List valid covering degrees with lift indices and rotation numbers
    #[command(name = "search-d")]
    SearchD(SearchArgs),
    /// Embed the first elements into the circle and re-extract the order
    Realize(RealizeArgs),
    /// Work with the left order on the central extension
    #[command(subcommand)]
    Leftorder(LeftOrderCmd),
    /// Render the certified configuration as a 1024x1024 SVG
    #[command(name = "export-svg")]
    ExportSvg(SvgArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// Three words separated by ';'
    #[arg(required = true, trailing_var_arg = true)]
    words: Vec<String>,
}

#[derive(Args, Debug)]
struct AxiomsArgs {
    #[command(flatten)]
    common: Common,
    /// Number of random quadruples
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    common: Common,
    /// How many valid degrees to list
    #[arg(long, default_value_t = 3)]
    count: usize,
    /// Largest lift parameter `a` to try (d = M a + 1)
    #[arg(long, default_value_t = 64)]
    a_cap: u64,
}

#[derive(Args, Debug)]
struct RealizeArgs {
    #[command(flatten)]
    common: Common,
    /// How many length-lex elements to embed
    #[arg(long, default_value_t = 12)]
    depth: usize,
}

#[derive(Subcommand, Debug)]
enum LeftOrderCmd {
    /// Compare two central-extension words "g1 ; g2" and bound them by z-powers
    Compare(CompareArgs),
    /// Project the left order to the circular order on three base words
    Project(EvalArgs),
    /// Check totality, antisymmetry, transitivity, and left invariance on samples
    Axioms(AxiomsArgs),
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Two words separated by ';' (z and z^t allowed)
    #[arg(required = true, trailing_var_arg = true)]
    words: Vec<String>,
}

#[derive(Args, Debug)]
struct SvgArgs {
    #[command(flatten)]
    common: Common,
    /// Output path for the SVG document
    #[arg(long)]
    svg: PathBuf,
    /// Basepoint orbit points to draw
    #[arg(long, default_value_t = 24)]
    count: usize,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (common, svg_flag) = match &cli.command {
        Command::Verify(a) => (&a.common, None),
        Command::Eval(a) => (&a.common, None),
        Command::Axioms(a) => (&a.common, None),
        Command::SearchD(a) => (&a.common, None),
        Command::Realize(a) => (&a.common, None),
        Command::Leftorder(LeftOrderCmd::Compare(a)) => (&a.common, None),
        Command::Leftorder(LeftOrderCmd::Project(a)) => (&a.common, None),
        Command::Leftorder(LeftOrderCmd::Axioms(a)) => (&a.common, None),
        Command::ExportSvg(a) => (&a.common, Some(&a.svg)),
    };
    if common.jobs != 1 {
        // deterministic regardless: every parallel collect preserves order
        rayon::ThreadPoolBuilder::new()
            .num_threads(common.jobs)
            .build_global()
            .map_err(|e| CliError::Input(format!("--jobs: {e}")))?;
    }
    let (ctx, json) = common.resolve(svg_flag)?;

    let report = match &cli.command {
        Command::Verify(_) => commands::verify(&ctx)?,
        Command::Eval(a) => commands::eval(&ctx, &a.words)?,
        Command::Axioms(a) => commands::axioms(&ctx, a.samples)?,
        Command::SearchD(a) => commands::search_d(&ctx, a.count, a.a_cap)?,
        Command::Realize(a) => commands::realize(&ctx, a.depth)?,
        Command::Leftorder(LeftOrderCmd::Compare(a)) => commands::compare(&ctx, &a.words)?,
        Command::Leftorder(LeftOrderCmd::Project(a)) => commands::project(&ctx, &a.words)?,
        Command::Leftorder(LeftOrderCmd::Axioms(a)) => commands::left_axioms(&ctx, a.samples)?,
        Command::ExportSvg(a) => commands::export_svg(&ctx, a.count)?,
    };

    let text = if json { report.render_json() } else { report.render_text() };
    print!("{text}");
    if let Some(path) = &ctx.report_path {
        std::fs::write(path, &text)
            .map_err(|e| CliError::Io(format!("report {}: {e}", path.display())))?;
    }
    Ok(report.exit_code())
}
