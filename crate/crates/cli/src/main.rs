use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nestkit::bounds::{lower_bound, Bound};
use nestkit::direct::{fixture, strong_nest_pairs_1mod4, weak_nest_pairs, CATALOG};
use nestkit::format::{read_design, read_nesting, write_design, write_pair};
use nestkit::levi::{
    colouring_file, colouring_to_nesting, nesting_to_colouring, parse_colouring, render_colouring,
};
use nestkit::recursive::{pipeline, IngredientKind, IngredientRequest, Provider};
use nestkit::search::gdd::find_resolution;
use nestkit::search::{find_min_nesting, SearchOptions};
use nestkit::verify::{
    classify, verify_bibd, verify_gdd, verify_nesting, verify_resolution, Certificate, Check,
};
use nestkit::{Design, DesignParams, Mode, NestError, Nesting};

#[derive(Parser, Debug)]
#[command(
    name = "nestkit",
    version,
    about = "Build, verify and search nestings of block designs"
)]
struct Cli {
    /// Seed for randomized tie-breaks. Every current code path is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for search (1 = sequential).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Weak,
    Strong,
    Minimal,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Weak => Mode::Weak,
            ModeArg::Strong => Mode::Strong,
            ModeArg::Minimal => Mode::Minimal,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a nested design and write design, nesting and certificate files.
    Construct(ConstructArgs),
    /// Check a design, and a nesting if one is given.
    Verify(VerifyArgs),
    /// Print the lower bound on w.
    Bound(BoundArgs),
    /// Exhaustively search for a nesting with the smallest w.
    Search(SearchArgs),
    /// Translate between strong nestings and harmonious colourings.
    Convert(ConvertArgs),
    /// List fixtures and built-in ingredients.
    Catalog {
        #[command(subcommand)]
        what: CatalogCommand,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCommand {
    List,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(subcommand)]
    what: ConstructWhat,
    /// Directory for the output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Fail unless w meets the lower bound.
    #[arg(long, global = true)]
    require_optimal: bool,
    /// Extra directory to scan for ingredient files.
    #[arg(long, global = true)]
    ingredients: Vec<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ConstructWhat {
    /// Weakly nested (v,2,1)-BIBD.
    PairsWeak {
        #[arg(long)]
        v: usize,
    },
    /// Strongly nested (v,2,1)-BIBD, v ≡ 1 (mod 4).
    PairsStrong {
        #[arg(long)]
        v: usize,
    },
    /// Nested (v,3,2)-BIBD by residue class of v.
    K3l2 {
        #[arg(long)]
        v: usize,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// A worked example from the catalog.
    Fixture {
        #[arg(long)]
        name: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StructureCheck {
    Bibd,
    Gdd,
    Resolution,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    design: PathBuf,
    nesting: Option<PathBuf>,
    /// Nesting kind to check; without it the nesting is classified.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Structural check of the design alone.
    #[arg(long, value_enum)]
    check: Option<StructureCheck>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    v: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    lambda: usize,
    #[arg(long, value_enum)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Design file; alternatively --fixture.
    design: Option<PathBuf>,
    #[arg(long, conflicts_with = "design")]
    fixture: Option<String>,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Largest w to try.
    #[arg(long)]
    cap: Option<usize>,
    /// Seconds before giving up.
    #[arg(long)]
    timeout: Option<u64>,
    /// Write the nesting found here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Look for a resolution instead of a nesting.
    #[arg(long)]
    resolution: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Colouring,
    Nesting,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    design: PathBuf,
    /// Nesting file (for --to colouring) or colouring file (for --to nesting).
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    to: Target,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// What a command reports and the exit status it asks for.
struct Outcome {
    code: u8,
    text: String,
    json: serde_json::Value,
}

impl Outcome {
    fn ok(text: String, json: serde_json::Value) -> Self {
        Outcome {
            code: 0,
            text,
            json,
        }
    }
}

enum Failure {
    Nest(NestError),
    Io(anyhow::Error),
}

impl From<NestError> for Failure {
    fn from(e: NestError) -> Self {
        Failure::Nest(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<Outcome, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load(design: &Path, nesting: Option<&Path>) -> Result<(Design, Option<Nesting>), Failure> {
    let (d, bundled) = read_design(&read(design)?)?;
    let n = match nesting {
        Some(p) => Some(read_nesting(&read(p)?, &d)?),
        None => bundled,
    };
    Ok((d, n))
}

fn failures(cert: &Certificate) -> String {
    cert.checks
        .iter()
        .filter(|c| !c.passed && !c.informational)
        .map(|c| match &c.witness {
            Some(w) => format!("  {}: {w}", c.name),
            None => format!("  {}", c.name),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn certificate_outcome(cert: Certificate, headline: String) -> Outcome {
    let passed = cert.passed();
    let mut text = format!("{} {headline}", if passed { "PASS" } else { "FAIL" });
    if !passed {
        text.push('\n');
        text.push_str(&failures(&cert));
    }
    Outcome {
        code: if passed { 0 } else { 1 },
        text,
        json: json!(cert),
    }
}

fn write_outputs(
    out: &Path,
    stem: &str,
    design: &Design,
    nesting: &Nesting,
    cert: &Certificate,
) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let (d, n) = write_pair(design, nesting);
    let paths = [
        out.join(format!("{stem}.design.json")),
        out.join(format!("{stem}.nesting.json")),
        out.join(format!("{stem}.cert.json")),
    ];
    write(&paths[0], &d)?;
    write(&paths[1], &n)?;
    write(&paths[2], &(serde_json::to_string_pretty(cert)? + "\n"))?;
    Ok(paths.to_vec())
}

fn construct(args: ConstructArgs, threads: Option<usize>) -> CmdResult {
    let (stem, design, nesting, mode, mut cert) = match &args.what {
        ConstructWhat::PairsWeak { v } => {
            let (d, n) = weak_nest_pairs(*v)?;
            let c = verify_nesting(&d, &n, Mode::Weak);
            (format!("pairs-weak-{v}"), d, n, Mode::Weak, c)
        }
        ConstructWhat::PairsStrong { v } => {
            let (d, n) = strong_nest_pairs_1mod4(*v)?;
            let c = verify_nesting(&d, &n, Mode::Strong);
            (format!("pairs-strong-{v}"), d, n, Mode::Strong, c)
        }
        ConstructWhat::K3l2 { v, mode } => {
            let mut provider = Provider::from_env().with_search(SearchOptions {
                threads,
                ..SearchOptions::default()
            });
            for dir in &args.ingredients {
                provider = provider.with_dir(dir);
            }
            let mode = Mode::from(*mode);
            let out = pipeline(*v, mode, &provider)?;
            (
                format!("k3l2-{v}-{mode}"),
                out.design,
                out.nesting,
                mode,
                out.certificate,
            )
        }
        ConstructWhat::Fixture { name } => {
            let info = nestkit::direct::fixture_info(name)?;
            let (d, n) = fixture(name)?;
            let c = verify_nesting(&d, &n, info.mode);
            (name.clone(), d, n, info.mode, c)
        }
    };
    if cert.bound.is_none() {
        cert = nestkit::bounds::check_optimal(cert, mode);
    }
    let paths = write_outputs(&args.out, &stem, &design, &nesting, &cert)?;
    let optimal = cert.bound.as_ref().map(|b| b.met);
    let mut outcome = certificate_outcome(
        cert.clone(),
        format!(
            "{stem}: {mode} nesting of a ({},{},{})-BIBD with w = {}{}",
            design.v(),
            design.k(),
            design.lambda(),
            nesting.w(),
            match (&cert.bound, optimal) {
                (Some(b), Some(true)) => format!(" (meets the bound {})", b.value),
                (Some(b), _) => format!(" (bound {})", b.value),
                _ => String::new(),
            }
        ),
    );
    if let Some(route) = &cert.construction {
        outcome.text.push_str(&format!("\n  construction: {route}"));
    }
    for p in &cert.provenance {
        outcome.text.push_str(&format!(
            "\n  ingredient {} from {}",
            p.ingredient, p.source
        ));
    }
    for p in &paths {
        outcome.text.push_str(&format!("\n  wrote {}", p.display()));
    }
    if outcome.code == 0 && args.require_optimal && optimal != Some(true) {
        outcome.code = 1;
        outcome.text.push_str("\n  w does not meet the lower bound");
    }
    outcome.json = json!({ "certificate": cert, "files": paths });
    Ok(outcome)
}

fn check_outcome(check: Check, what: &str) -> Outcome {
    let text = match &check.witness {
        Some(w) if !check.passed => format!("FAIL {what}: {w}"),
        _ => format!("{} {what}", if check.passed { "PASS" } else { "FAIL" }),
    };
    Outcome {
        code: if check.passed { 0 } else { 1 },
        text,
        json: json!(check),
    }
}

fn verify(args: VerifyArgs) -> CmdResult {
    let (design, nesting) = load(&args.design, args.nesting.as_deref())?;
    let params = format!("({},{},{})", design.v(), design.k(), design.lambda());
    if let Some(check) = args.check {
        return Ok(match check {
            StructureCheck::Bibd => {
                certificate_outcome(verify_bibd(&design), format!("{params}-BIBD"))
            }
            StructureCheck::Gdd => {
                certificate_outcome(verify_gdd(&design), format!("{params}-GDD"))
            }
            StructureCheck::Resolution => check_outcome(verify_resolution(&design), "resolution"),
        });
    }
    Ok(match (nesting, args.mode) {
        (Some(n), Some(mode)) => {
            let mode = Mode::from(mode);
            let cert = verify_nesting(&design, &n, mode);
            certificate_outcome(
                cert,
                format!("{mode} nesting of {params} with w = {}", n.w()),
            )
        }
        (Some(n), None) => {
            let cert = classify(&design, &n);
            let classes: Vec<String> = cert
                .classification
                .iter()
                .map(|c| format!("{c:?}").to_uppercase())
                .collect();
            let mut out = certificate_outcome(
                cert,
                format!(
                    "{params} nesting with w = {}: [{}]",
                    n.w(),
                    classes.join(", ")
                ),
            );
            out.code = 0;
            out
        }
        (None, _) => {
            let cert = if design.groups.is_some() {
                verify_gdd(&design)
            } else {
                verify_bibd(&design)
            };
            certificate_outcome(cert, params)
        }
    })
}

fn bound(args: BoundArgs) -> CmdResult {
    let mode = Mode::from(args.mode);
    let Bound { value, basis, note } =
        lower_bound(DesignParams::new(args.v, args.k, args.lambda), mode)?;
    let mut text = value.to_string();
    if let Some(n) = &note {
        text.push_str(&format!("\n  note: {n}"));
    }
    Ok(Outcome::ok(
        text,
        json!({ "mode": mode, "value": value, "basis": basis, "note": note }),
    ))
}

fn search(args: SearchArgs, threads: Option<usize>) -> CmdResult {
    let design = match (&args.design, &args.fixture) {
        (Some(p), _) => read_design(&read(p)?)?.0,
        (None, Some(name)) => fixture(name)?.0,
        (None, None) => {
            return Err(NestError::InvalidInput("give a design file or --fixture".into()).into())
        }
    };
    if args.resolution {
        let deadline = args
            .timeout
            .map(|s| std::time::Instant::now() + Duration::from_secs(s));
        return Ok(match find_resolution(&design, deadline) {
            Some(r) => {
                let classes = r.classes.len();
                let resolved = design.with_resolution(r);
                if let Some(out) = &args.out {
                    write(out, &write_design(&resolved, None))?;
                }
                Outcome::ok(
                    format!("FOUND resolution with {classes} classes"),
                    json!({ "status": "FOUND", "classes": classes }),
                )
            }
            None => Outcome {
                code: 1,
                text: "NOT FOUND".into(),
                json: json!({ "status": "NOT_FOUND" }),
            },
        });
    }
    let mode = Mode::from(args.mode);
    let cap = args.cap.unwrap_or(design.v() + design.blocks.len());
    let options = SearchOptions {
        threads,
        timeout: args.timeout.map(Duration::from_secs),
        ..SearchOptions::default()
    };
    let outcome = find_min_nesting(&design, mode, cap, &options)?;
    let report = outcome.report(mode, cap);
    let text = match (&report.status[..], report.w) {
        ("FOUND", Some(w)) => format!("FOUND {mode} nesting with w = {w}"),
        ("EXHAUSTED", _) => format!("EXHAUSTED: no {mode} nesting with w ≤ {cap}"),
        (_, Some(w)) => format!("TIMED_OUT: every w < {w} ruled out"),
        _ => report.status.clone(),
    };
    if let (Some(out), Some(n)) = (&args.out, outcome.nesting()) {
        write(out, &write_design(&design, Some(n)))?;
    }
    let code = match report.status.as_str() {
        "FOUND" | "EXHAUSTED" => 0,
        _ => 2,
    };
    Ok(Outcome {
        code,
        text,
        json: json!(report),
    })
}

fn convert(args: ConvertArgs) -> CmdResult {
    match args.to {
        Target::Colouring => {
            let (design, nesting) = load(&args.design, args.input.as_deref())?;
            let n =
                nesting.ok_or_else(|| NestError::InvalidInput("no nesting to convert".into()))?;
            let c = nesting_to_colouring(&design, &n)?;
            let file = colouring_file(&design, &c);
            let text = render_colouring(&file);
            if let Some(out) = &args.out {
                write(out, &text)?;
            }
            Ok(Outcome::ok(
                format!(
                    "harmonious colouring with {} colours{}",
                    c.palette,
                    if file.exact { " (exact)" } else { "" }
                ),
                serde_json::to_value(&file).expect("colouring serializes"),
            ))
        }
        Target::Nesting => {
            let (design, _) = read_design(&read(&args.design)?)?;
            let input = args
                .input
                .ok_or_else(|| NestError::InvalidInput("give a colouring file".into()))?;
            let c = parse_colouring(&read(&input)?)?.into();
            let n = colouring_to_nesting(&design, &c)?;
            let text = write_design(&design, Some(&n));
            if let Some(out) = &args.out {
                write(out, &text)?;
            }
            Ok(Outcome::ok(
                format!("strong nesting with w = {}", n.w()),
                json!({ "w": n.w(), "nested": n.assignment }),
            ))
        }
    }
}

const BUILTIN_INGREDIENTS: &[(IngredientKind, &str)] = &[
    (IngredientKind::Kts, "9"),
    (IngredientKind::Kts, "15"),
    (IngredientKind::NestedGdd, "2^4"),
    (IngredientKind::Frame, "2^4"),
    (IngredientKind::MasterGdd, "2^7"),
];

fn catalog() -> CmdResult {
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    let mut all_ok = true;
    for info in CATALOG {
        let ok = info
            .load()
            .is_ok_and(|(d, n)| verify_nesting(&d, &n, info.mode).passed() && n.w() == info.w);
        all_ok &= ok;
        lines.push(format!(
            "{:<4} fixture    {:<10} {:<6} w={:<3} {}",
            if ok { "ok" } else { "BAD" },
            info.name,
            info.mode.to_string(),
            info.w,
            info.summary
        ));
        entries.push(json!({ "kind": "fixture", "name": info.name, "mode": info.mode, "w": info.w, "verified": ok }));
    }
    let provider = Provider::default();
    for (kind, sig) in BUILTIN_INGREDIENTS {
        let request = IngredientRequest::new(*kind, *sig)
            .prefer(&[nestkit::recursive::SourcePreference::Fixture]);
        let ok = provider.fetch(&request).is_ok();
        all_ok &= ok;
        lines.push(format!(
            "{:<4} ingredient {kind} {sig}",
            if ok { "ok" } else { "BAD" }
        ));
        entries.push(json!({ "kind": "ingredient", "ingredient": kind.tag(), "signature": sig, "verified": ok }));
    }
    Ok(Outcome {
        code: if all_ok { 0 } else { 1 },
        text: lines.join("\n"),
        json: json!(entries),
    })
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Construct(args) => construct(args, cli.threads),
        Command::Verify(args) => verify(args),
        Command::Bound(args) => bound(args),
        Command::Search(args) => search(args, cli.threads),
        Command::Convert(args) => convert(args),
        Command::Catalog {
            what: CatalogCommand::List,
        } => catalog(),
    }
}

/// Print to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            match format {
                Format::Text => emit(&out.text),
                Format::Json => {
                    emit(&serde_json::to_string_pretty(&out.json).expect("report serializes"))
                }
            }
            ExitCode::from(out.code)
        }
        Err(Failure::Nest(e)) => {
            let code = e.exit_code() as u8;
            match format {
                Format::Text => eprintln!("error: {e}"),
                Format::Json => emit(&json!({ "error": e.to_string(), "exit": code }).to_string()),
            }
            ExitCode::from(code)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
