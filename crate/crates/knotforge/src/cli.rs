//! The `knotforge` command line: evaluation, references, minimization,
//! and studies over polygon files.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad arguments or
//! inputs), 2 on numerical non-convergence. stdout carries data only;
//! diagnostics go to stderr. Every JSON output embeds a manifest with the
//! command line, a config echo, input digests, the library version, the
//! seed and timing.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::curves::{inscribe_equilateral, inscribe_uniform, Circle, CurveProvider, InscribeError, TorusKnot};
use crate::energy::EnergyKind;
use crate::experiments::{
    convergence_study, gamma_recovery, minimizer_trend, rawdon_bound_check, StudyError, TrendKnot,
};
use crate::geom::regular_ngon;
use crate::io::{self, FileFormat, IoError, RunManifest};
use crate::minimize::{anneal, MinimizeConfig, MinimizeError, Objective};
use crate::reference::{menger_smooth, moebius_smooth, thickness_smooth, ReferenceError, ReferenceValue};

#[derive(Parser, Debug)]
#[command(name = "knotforge", version, about = "Discrete knot energies on polygonal knots")]
pub struct Cli {
    /// Seed for seeded subcommands that do not take their own.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (reserved; computations currently run on one).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Report format for tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one discrete energy of a polygon file.
    Energy(EnergyArgs),
    /// Reference value of a smooth energy on an analytic curve.
    Reference(ReferenceArgs),
    /// Anneal a polygon toward lower energy, preserving its knot class.
    Minimize(MinimizeArgs),
    /// Convergence study of inscribed-polygon energies against a reference.
    Converge(ConvergeArgs),
    /// Named studies: rawdon, gamma, minimizer.
    #[command(subcommand)]
    Study(StudyCommand),
    /// Emit a regular n-gon polygon file.
    Ngon(NgonArgs),
    /// Emit a polygon inscribed in an analytic curve.
    Inscribe(InscribeArgs),
}

#[derive(Args, Debug)]
pub struct EnergyArgs {
    #[arg(long, value_enum)]
    pub kind: EnergyKindArg,
    /// Menger exponent.
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnergyKindArg {
    Moebius,
    Mindist,
    Menger,
    Thickness,
}

impl EnergyKindArg {
    fn to_kind(self, s: f64) -> EnergyKind {
        match self {
            EnergyKindArg::Moebius => EnergyKind::Moebius,
            EnergyKindArg::Mindist => EnergyKind::MinDistance,
            EnergyKindArg::Menger => EnergyKind::Menger { s },
            EnergyKindArg::Thickness => EnergyKind::Thickness,
        }
    }
}

#[derive(Args, Debug)]
pub struct ReferenceArgs {
    /// `circle` or `torus:P,Q`.
    #[arg(long)]
    pub curve: String,
    #[arg(long, value_enum)]
    pub energy: SmoothEnergyArg,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    /// Finest ladder rung for inscribed-polygon references.
    #[arg(long, default_value_t = 256)]
    pub nmax: usize,
    /// Samples for thickness references.
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SmoothEnergyArg {
    Moebius,
    Menger,
    Thickness,
}

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    #[arg(long = "energy", value_enum)]
    pub objective: ObjectiveArg,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long = "iters")]
    pub iterations: u64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, default_value_t = 0.93)]
    pub cooling: f64,
    #[arg(long, default_value_t = 0.1)]
    pub temperature: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub log_every: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    ThicknessInv,
    Moebius,
    Menger,
}

impl ObjectiveArg {
    fn to_objective(self, s: f64) -> Objective {
        match self {
            ObjectiveArg::ThicknessInv => Objective::InverseThickness,
            ObjectiveArg::Moebius => Objective::Moebius,
            ObjectiveArg::Menger => Objective::Menger { s },
        }
    }
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub curve: String,
    #[arg(long, value_enum)]
    pub energy: SmoothEnergyArg,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    /// Comma-separated, strictly increasing segment counts.
    #[arg(long, value_delimiter = ',')]
    pub ns: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum StudyCommand {
    /// Explicit minimum-distance energy bound check.
    Rawdon(RawdonArgs),
    /// Recovery sequences: uniform convergence plus energy convergence.
    Gamma(GammaArgs),
    /// Best annealed energies across segment counts and seeds.
    Minimizer(MinimizerArgs),
}

#[derive(Args, Debug)]
pub struct RawdonArgs {
    #[arg(long, default_value = "circle")]
    pub curve: String,
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256")]
    pub ns: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GammaArgs {
    #[arg(long, default_value = "circle")]
    pub curve: String,
    #[arg(long, value_enum)]
    pub energy: SmoothEnergyArg,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub ns: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MinimizerArgs {
    #[arg(long, value_enum, default_value_t = KnotArg::Unknot)]
    pub knot: KnotArg,
    #[arg(long = "energy", value_enum, default_value_t = ObjectiveArg::ThicknessInv)]
    pub objective: ObjectiveArg,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,16")]
    pub ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub seeds: Vec<u64>,
    #[arg(long = "iters", default_value_t = 20_000)]
    pub iterations: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KnotArg {
    Unknot,
    Trefoil,
}

#[derive(Args, Debug)]
pub struct NgonArgs {
    #[arg(long)]
    pub n: usize,
    /// Output path; `.json` selects the JSON polygon format, anything else
    /// the text format.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InscribeArgs {
    #[arg(long)]
    pub curve: String,
    #[arg(long)]
    pub n: usize,
    /// Equal chords instead of equal arcs.
    #[arg(long, default_value_t = false)]
    pub equilateral: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Errors mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 1.
    Validation(String),
    /// Exit code 2.
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::NonConvergence(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::NonConvergence(m) => m,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<InscribeError> for CliError {
    fn from(e: InscribeError) -> Self {
        match e {
            InscribeError::NoClosure { .. } | InscribeError::ChordUnreachable { .. } => {
                CliError::NonConvergence(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ReferenceError> for CliError {
    fn from(e: ReferenceError) -> Self {
        match e {
            ReferenceError::NotConverging { .. } => CliError::NonConvergence(e.to_string()),
            ReferenceError::Inscribe(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<MinimizeError> for CliError {
    fn from(e: MinimizeError) -> Self {
        match e {
            MinimizeError::ProjectionStalled { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<StudyError> for CliError {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Inscribe(inner) => inner.into(),
            StudyError::Minimize(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

enum Curve {
    Circle(Circle),
    Torus(TorusKnot),
}

impl Curve {
    fn provider(&self) -> &dyn CurveProvider {
        match self {
            Curve::Circle(c) => c,
            Curve::Torus(t) => t,
        }
    }

    fn name(&self) -> String {
        match self {
            Curve::Circle(_) => "circle".into(),
            Curve::Torus(_) => "torus".into(),
        }
    }
}

fn parse_curve(spec: &str) -> Result<Curve, CliError> {
    if spec == "circle" {
        return Ok(Curve::Circle(Circle::unit()));
    }
    if let Some(params) = spec.strip_prefix("torus:") {
        let parts: Vec<&str> = params.split(',').collect();
        if parts.len() != 2 {
            return Err(CliError::Validation(format!(
                "torus curve wants torus:P,Q, got {spec:?}"
            )));
        }
        let p: u32 = parts[0]
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("bad torus parameter {:?}", parts[0])))?;
        let q: u32 = parts[1]
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("bad torus parameter {:?}", parts[1])))?;
        let knot = TorusKnot::new(p, q).map_err(|e| CliError::Validation(e.to_string()))?;
        return Ok(Curve::Torus(knot));
    }
    Err(CliError::Validation(format!(
        "unknown curve {spec:?} (expected circle or torus:P,Q)"
    )))
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

/// Wraps a report with its manifest and renders canonical JSON.
fn emit<T: Serialize>(
    report: &T,
    mut manifest: RunManifest,
    started: Instant,
    out: Option<&PathBuf>,
    csv: Option<String>,
    want_csv: bool,
) -> Result<String, CliError> {
    manifest.stamp(started.elapsed().as_secs_f64());
    let payload = if want_csv {
        match csv {
            Some(text) => text,
            None => {
                return Err(CliError::Validation(
                    "this command has no tabular form; use --format json".into(),
                ))
            }
        }
    } else {
        let wrapped = json!({
            "report": serde_json::to_value(report)
                .map_err(|e| CliError::Validation(e.to_string()))?,
            "manifest": serde_json::to_value(&manifest)
                .map_err(|e| CliError::Validation(e.to_string()))?,
        });
        io::canonical_json(&wrapped) + "\n"
    };
    if let Some(path) = out {
        std::fs::write(path, &payload).map_err(|e| {
            CliError::Validation(format!("cannot write {}: {e}", path.display()))
        })?;
    }
    Ok(payload)
}

/// Runs a parsed command, returning the stdout payload.
pub fn run(cli: Cli) -> Result<String, CliError> {
    if cli.threads == 0 {
        return Err(CliError::Validation("--threads must be at least 1".into()));
    }
    let started = Instant::now();
    let want_csv = cli.format == ReportFormat::Csv;
    match cli.command {
        Command::Energy(args) => {
            let kind = args.kind.to_kind(args.s);
            let polygon = io::load_polygon(&args.input)?;
            let report = kind.evaluate(&polygon);
            let mut manifest = RunManifest::new(
                command_line(),
                serde_json::to_value(kind).unwrap_or_default(),
                None,
            );
            manifest.record_input(&args.input)?;
            emit(&report, manifest, started, args.out.as_ref(), None, want_csv)
        }
        Command::Reference(args) => {
            let curve = parse_curve(&args.curve)?;
            let reference: ReferenceValue = match args.energy {
                SmoothEnergyArg::Moebius => moebius_smooth(curve.provider(), args.nmax)?,
                SmoothEnergyArg::Menger => menger_smooth(curve.provider(), args.s, args.nmax)?,
                SmoothEnergyArg::Thickness => thickness_smooth(curve.provider(), args.samples)?,
            };
            let manifest = RunManifest::new(
                command_line(),
                json!({"curve": args.curve, "energy": format!("{:?}", args.energy), "s": args.s, "nmax": args.nmax, "samples": args.samples}),
                None,
            );
            emit(&reference, manifest, started, args.out.as_ref(), None, want_csv)
        }
        Command::Minimize(args) => {
            let polygon = io::load_polygon(&args.input)?;
            let mut cfg = MinimizeConfig::new(
                args.objective.to_objective(args.s),
                args.iterations,
                args.seed,
            );
            cfg.initial_step = args.step;
            cfg.cooling_factor = args.cooling;
            cfg.temperature_initial = args.temperature;
            cfg.equilateral_tol = args.tol;
            cfg.log_every = args.log_every;
            let run = anneal(&polygon, &cfg)?;
            let mut manifest = RunManifest::new(
                command_line(),
                serde_json::to_value(&cfg).unwrap_or_default(),
                Some(args.seed),
            );
            manifest.record_input(&args.input)?;
            emit(&run, manifest, started, args.out.as_ref(), None, want_csv)
        }
        Command::Converge(args) => {
            let curve = parse_curve(&args.curve)?;
            let (kind, reference) = converge_reference(&curve, args.energy, args.s)?;
            let study =
                convergence_study(curve.provider(), &curve.name(), kind, &args.ns, &reference)?;
            let csv = study.to_csv();
            let manifest = RunManifest::new(
                command_line(),
                json!({"curve": args.curve, "energy": kind.label(), "ns": args.ns}),
                None,
            );
            emit(&study, manifest, started, args.out.as_ref(), Some(csv), want_csv)
        }
        Command::Study(StudyCommand::Rawdon(args)) => {
            let curve = parse_curve(&args.curve)?;
            let (moebius_ref, thickness_ref) = match curve {
                Curve::Circle(_) => (4.0, 1.0 / (2.0 * std::f64::consts::PI)),
                Curve::Torus(_) => (
                    moebius_smooth(curve.provider(), 256)?.value,
                    thickness_smooth(curve.provider(), 4096)?.value,
                ),
            };
            let report = rawdon_bound_check(
                curve.provider(),
                &curve.name(),
                moebius_ref,
                thickness_ref,
                &args.ns,
            )?;
            let mut csv = String::from("n,energy,reference,error\n");
            for row in &report.rows {
                csv.push_str(&format!(
                    "{},{:.16e},{:.16e},{:.16e}\n",
                    row.n, row.md_energy, report.moebius_reference, row.actual_error
                ));
            }
            let manifest = RunManifest::new(
                command_line(),
                json!({"curve": args.curve, "ns": args.ns}),
                None,
            );
            emit(&report, manifest, started, args.out.as_ref(), Some(csv), want_csv)
        }
        Command::Study(StudyCommand::Gamma(args)) => {
            let curve = parse_curve(&args.curve)?;
            let (kind, reference) = converge_reference(&curve, args.energy, args.s)?;
            let report =
                gamma_recovery(curve.provider(), &curve.name(), kind, &args.ns, &reference)?;
            let mut csv = String::from("n,energy,reference,error\n");
            for (i, &n) in report.ns.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{:.16e},{:.16e},{:.16e}\n",
                    n,
                    report.energies[i],
                    report.reference,
                    (report.energies[i] - report.reference).abs()
                ));
            }
            let manifest = RunManifest::new(
                command_line(),
                json!({"curve": args.curve, "energy": kind.label(), "ns": args.ns}),
                None,
            );
            emit(&report, manifest, started, args.out.as_ref(), Some(csv), want_csv)
        }
        Command::Study(StudyCommand::Minimizer(args)) => {
            let knot = match args.knot {
                KnotArg::Unknot => TrendKnot::Unknot,
                KnotArg::Trefoil => TrendKnot::Trefoil,
            };
            let objective = args.objective.to_objective(args.s);
            let report =
                minimizer_trend(knot, objective, &args.ns, &args.seeds, args.iterations)?;
            let manifest = RunManifest::new(
                command_line(),
                json!({"knot": format!("{:?}", args.knot), "objective": objective.label(), "ns": args.ns, "seeds": args.seeds, "iters": args.iterations}),
                Some(cli.seed),
            );
            emit(&report, manifest, started, args.out.as_ref(), None, want_csv)
        }
        Command::Ngon(args) => {
            let polygon = regular_ngon(args.n).map_err(|e| CliError::Validation(e.to_string()))?;
            write_polygon(&polygon, args.out.as_ref())
        }
        Command::Inscribe(args) => {
            let curve = parse_curve(&args.curve)?;
            let polygon = if args.equilateral {
                inscribe_equilateral(curve.provider(), args.n, args.tol)?
            } else {
                inscribe_uniform(curve.provider(), args.n)?
            };
            write_polygon(&polygon, args.out.as_ref())
        }
    }
}

fn converge_reference(
    curve: &Curve,
    energy: SmoothEnergyArg,
    s: f64,
) -> Result<(EnergyKind, ReferenceValue), CliError> {
    let (kind, reference) = match (curve, energy) {
        (Curve::Circle(_), SmoothEnergyArg::Moebius) => {
            (EnergyKind::Moebius, ReferenceValue::circle_moebius())
        }
        (Curve::Circle(_), SmoothEnergyArg::Menger) => {
            (EnergyKind::Menger { s }, ReferenceValue::circle_menger(s))
        }
        (Curve::Circle(_), SmoothEnergyArg::Thickness) => (
            EnergyKind::Thickness,
            // The study tracks inverse thickness, so the circle reference
            // is 2 pi.
            ReferenceValue::closed_form(2.0 * std::f64::consts::PI),
        ),
        (Curve::Torus(_), SmoothEnergyArg::Moebius) => {
            (EnergyKind::Moebius, moebius_smooth(curve.provider(), 256)?)
        }
        (Curve::Torus(_), SmoothEnergyArg::Menger) => {
            (EnergyKind::Menger { s }, menger_smooth(curve.provider(), s, 128)?)
        }
        (Curve::Torus(_), SmoothEnergyArg::Thickness) => {
            let t = thickness_smooth(curve.provider(), 4096)?;
            (EnergyKind::Thickness, ReferenceValue { value: 1.0 / t.value, ..t })
        }
    };
    Ok((kind, reference))
}

fn write_polygon(
    polygon: &crate::geom::PolygonalKnot,
    out: Option<&PathBuf>,
) -> Result<String, CliError> {
    let format = match out {
        Some(path) if path.extension().is_some_and(|e| e == "json") => FileFormat::Json,
        Some(_) => FileFormat::Text,
        None => FileFormat::Json,
    };
    let text = io::polygon_to_string(polygon, format);
    if let Some(path) = out {
        std::fs::write(path, &text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(text)
}

/// Entry point for the binary: parse, run, print, exit.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(payload) => {
            print!("{payload}");
            0
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}
