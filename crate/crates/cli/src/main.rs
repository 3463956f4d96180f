//! `spers`: persistent cohomology with products, transferred A∞ operations
//! and Steenrod squares, and certified bounds for structured distances.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use structured_persistence::barcode::barcode;
use structured_persistence::bounds::{
    distance_report, stability_check, structured_lower_bound, BoundKind, ReportOptions, Structure,
};
use structured_persistence::complex::{
    build_cech, build_rips, import_filtration, parse_text_records, validate_ffdata, Convention, Correspondence,
    FilteredComplex, Metric, PointCloud, SimplexRecord,
};
use structured_persistence::ledger::{ledger_from_complex, LedgerOptions};
use structured_persistence::{samples, Field};

#[derive(Parser)]
#[command(name = "spers", version, about = "Structured persistent cohomology and interleaving bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Barcode of one input as diagram JSON (and SVG with --out).
    Barcode {
        input: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        /// Coefficient field characteristic (0 = characteristic-0 proxy).
        #[arg(long, default_value_t = 2)]
        field: u32,
        /// Directory for barcode.json and barcode.svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower and upper bounds for the structured distances between two inputs.
    Distances {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        /// Coefficient fields; repeat for several primes.
        #[arg(long = "field", default_values_t = [2u32])]
        fields: Vec<u32>,
        /// Restrict to one structure (default: every structure available).
        #[arg(long, value_enum)]
        structure: Option<StructureArg>,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks the finite-filtered-data conditions of a filtration file.
    Validate { input: PathBuf },
    /// Product ledger (cup, m_n, Sq^k tables in the bar basis) as JSON.
    Ledger {
        input: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long, default_value_t = 2)]
        field: u32,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        /// Record Steenrod squares (𝔽2 only).
        #[arg(long)]
        steenrod: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized check that lower bounds never exceed the distortion of a
    /// jitter correspondence.
    Stability {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 30)]
        max_points: usize,
        #[arg(long, default_value_t = 3)]
        ambient_dim: usize,
        #[arg(long, default_value_t = 0.1)]
        max_eta: f64,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long = "field", default_values_t = [2u32])]
        fields: Vec<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct BuildArgs {
    /// How to read the input (default: by extension and content).
    #[arg(long, value_enum, default_value_t = InputKind::Auto)]
    input_kind: InputKind,
    /// Complex built on point clouds.
    #[arg(long, value_enum, default_value_t = ComplexKind::Rips)]
    complex: ComplexKind,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, default_value_t = f64::INFINITY)]
    max_scale: f64,
    /// euclidean, chebyshev, or a CSV file holding a distance matrix.
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[arg(long, value_enum, default_value_t = ConventionArg::Diameter)]
    convention: ConventionArg,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum InputKind {
    Auto,
    Cloud,
    Filtration,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplexKind {
    Rips,
    Cech,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Diameter,
    Radius,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    Graded,
    Cup,
    Ainfty,
    Steenrod,
    Combined,
}

impl From<StructureArg> for Structure {
    fn from(s: StructureArg) -> Self {
        match s {
            StructureArg::Graded => Structure::Graded,
            StructureArg::Cup => Structure::Cup,
            StructureArg::Ainfty => Structure::AInfty,
            StructureArg::Steenrod => Structure::Steenrod,
            StructureArg::Combined => Structure::Combined,
        }
    }
}

fn field(p: u32) -> Result<Field> {
    Ok(if p == 0 { Field::char_zero_proxy() } else { Field::new(p)? })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn is_cloud(path: &Path, text: &str, kind: InputKind) -> bool {
    match kind {
        InputKind::Cloud => true,
        InputKind::Filtration => false,
        InputKind::Auto => {
            path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) || text.trim_start().starts_with('[')
        }
    }
}

fn metric(name: &str) -> Result<Metric> {
    Ok(match name {
        "euclidean" => Metric::euclidean(),
        "chebyshev" => Metric::chebyshev(),
        path => {
            let text = read(Path::new(path))?;
            let rows: Vec<Vec<f64>> = PointCloud::from_csv(&text)
                .with_context(|| format!("distance matrix {path}"))?
                .points()
                .to_vec();
            Metric::explicit(rows)?
        }
    })
}

fn load(path: &Path, b: &BuildArgs) -> Result<FilteredComplex> {
    let text = read(path)?;
    if text.trim().is_empty() {
        bail!("{}: empty input", path.display());
    }
    let cx = if is_cloud(path, &text, b.input_kind) {
        let cloud = if text.trim_start().starts_with('[') { PointCloud::from_json(&text)? } else { PointCloud::from_csv(&text)? };
        let m = metric(&b.metric)?;
        match b.complex {
            ComplexKind::Rips => {
                let conv = match b.convention {
                    ConventionArg::Diameter => Convention::Diameter,
                    ConventionArg::Radius => Convention::Radius,
                };
                let factor = conv.rips_factor();
                build_rips(&cloud, &m, b.max_dim, b.max_scale / factor)?.rescaled(factor)
            }
            ComplexKind::Cech => build_cech(&cloud, &m, b.max_dim, b.max_scale)?,
        }
    } else {
        import_filtration(&text)?
    };
    Ok(cx)
}

fn emit(value: &serde_json::Value, out: Option<&Path>, name: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn validate(path: &Path) -> Result<bool> {
    let text = read(path)?;
    let records = if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(&text)?;
        serde_json::from_value(v["simplices"].clone())?
    } else {
        parse_text_records(&text)?
    };
    if records.is_empty() {
        bail!("{}: no simplices", path.display());
    }
    let lines: Vec<usize> = records.iter().map(|r| r.line).collect();
    let recs: Vec<SimplexRecord> = records
        .into_iter()
        .enumerate()
        .map(|(k, r)| SimplexRecord { vertices: r.vertices, value: r.value, order: k })
        .collect();
    let cap = recs.iter().map(|r| r.dim()).max().unwrap_or(0);
    let report = validate_ffdata(&FilteredComplex::from_records_unchecked(recs, cap));
    let violations: Vec<serde_json::Value> = report
        .violations
        .iter()
        .map(|v| {
            let at: Vec<String> = v.witnesses.iter().map(|&k| format!("{}:{}", path.display(), lines[k])).collect();
            json!({ "condition": v.condition, "message": v.message, "at": at })
        })
        .collect();
    emit(&json!({ "valid": report.is_valid(), "violations": violations }), None, "")?;
    Ok(report.is_valid())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Barcode { input, build, field: p, out } => {
            let bc = barcode(&load(&input, &build)?, field(p)?)?;
            emit(&bc.to_json(), out.as_deref(), "barcode.json")?;
            if let Some(dir) = out {
                fs::write(dir.join("barcode.svg"), bc.to_svg())?;
            }
        }
        Command::Distances { x, y, build, fields, structure, max_arity, out } => {
            if max_arity < 2 {
                bail!("--max-arity must be at least 2");
            }
            let fields: Vec<Field> = fields.into_iter().map(field).collect::<Result<_>>()?;
            let (cx, cy) = (load(&x, &build)?, load(&y, &build)?);
            let opts = ReportOptions { max_arity };
            let bounds = match structure {
                Some(st) => {
                    let st = Structure::from(st);
                    let mut v = Vec::new();
                    for &f in &fields {
                        if st.needs_steenrod() && f.modulus() != 2 {
                            bail!("unsupported: odd-p Steenrod action");
                        }
                        let (lx, ly) = structured_persistence::bounds::ledger_pair(&cx, &cy, f, opts)?;
                        v.push(structured_lower_bound(&lx, &ly, st)?);
                    }
                    v
                }
                None => distance_report(&cx, &cy, &fields, opts)?,
            };
            let report: Vec<serde_json::Value> = bounds.iter().map(|b| b.to_json()).collect();
            emit(&serde_json::Value::Array(report), out.as_deref(), "distances.json")?;
        }
        Command::Validate { input } => return validate(&input),
        Command::Ledger { input, build, field: p, max_arity, steenrod, out } => {
            let f = field(p)?;
            let opts = LedgerOptions { max_arity, steenrod, k_max: None };
            let (_, l) = ledger_from_complex(&load(&input, &build)?, f, opts)?;
            emit(&l.to_json(), out.as_deref(), "ledger.json")?;
        }
        Command::Stability { trials, max_points, ambient_dim, max_eta, max_dim, fields, seed, out } => {
            let fields: Vec<Field> = fields.into_iter().map(field).collect::<Result<_>>()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            let mut ok = true;
            for trial in 0..trials {
                let n = rng.gen_range(2..=max_points.max(2));
                let eta = rng.gen_range(0.0..max_eta) + f64::EPSILON;
                let x = samples::random_cloud(&mut rng, n, ambient_dim.max(1));
                let y = samples::jitter(&mut rng, &x, eta);
                let rep = stability_check(&x, &y, &Correspondence::identity(n), max_dim, &fields, ReportOptions::default())?;
                ok &= rep.violations.is_empty();
                let worst = rep.bounds.iter().filter(|b| b.kind == BoundKind::Lower).map(|b| b.value).fold(0.0, f64::max);
                rows.push(json!({
                    "trial": trial, "points": n, "eta": eta, "distortion": rep.distortion,
                    "max_lower_bound": worst, "violations": rep.violations,
                }));
            }
            emit(&json!({ "ok": ok, "trials": rows }), out.as_deref(), "stability.json")?;
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
