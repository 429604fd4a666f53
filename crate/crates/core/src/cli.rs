//! The `repdecomp` command-line tool.
//!
//! Exit codes: 0 success, 2 bad arguments or input, 3 decomposition failure,
//! 4 SDP data not invariant, 5 verification failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use crate::commutant::ProjectionConfig;
use crate::decompose::{decompose, verify_decomposition, DecomposeConfig, IrrepDecomposition};
use crate::error::{Error, Result};
use crate::io::group_spec::GroupSpec;
use crate::io::rep_spec::RepSpec;
use crate::io::{basis_file, fmt_f64, sdp_file};
use crate::linalg::{self, Field};
use crate::rep::{Element, Group, Representation};
use crate::sdp::{block_diagonalize_sdp, BlockOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DECOMPOSITION: i32 = 3;
pub const EXIT_NOT_INVARIANT: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;

const SCHEMA_VERSION: u32 = 1;

const STREAM_DECOMPOSE: u64 = 1;
const STREAM_VERIFY: u64 = 2;
const STREAM_SYMMETRIZE: u64 = 3;
const STREAM_SAMPLE: u64 = 4;

const VERIFY_TRIALS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "repdecomp",
    version,
    about = "Decompose group representations into irreducibles and block-diagonalize invariant SDPs"
)]
struct Cli {
    /// Seed for every random stage.
    #[arg(long, global = true, env = "REPDECOMP_SEED", default_value_t = 0)]
    seed: u64,

    /// Override the field of the representation.
    #[arg(long, global = true, env = "REPDECOMP_FIELD")]
    field: Option<Field>,

    /// Averaging rounds for compact groups.
    #[arg(long, global = true, env = "REPDECOMP_NU")]
    nu: Option<usize>,

    /// Haar samples per averaging round.
    #[arg(long, global = true, env = "REPDECOMP_SET_SIZE")]
    set_size: Option<usize>,

    /// Tolerance for verification and SDP invariance.
    #[arg(long, global = true, env = "REPDECOMP_TOL")]
    tol: Option<f64>,

    /// Commutation residual accepted from the projection.
    #[arg(long, global = true, env = "REPDECOMP_COMMUTATION_TOL")]
    commutation_tol: Option<f64>,

    /// Project SDP data onto the commutant before reducing it.
    #[arg(long, global = true, env = "REPDECOMP_SYMMETRIZE")]
    symmetrize: bool,

    #[arg(long, global = true, env = "REPDECOMP_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for the SDP stage (default: all cores).
    #[arg(long, global = true, env = "REPDECOMP_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find the isotypic decomposition of a representation.
    Decompose {
        /// Group file, or `symmetric:n`, `cyclic:n`, `unitary:d`, `orthogonal:d`.
        group: String,
        /// Representation file.
        rep: PathBuf,
        /// Write the change of basis to this file.
        #[arg(long)]
        emit_basis: Option<PathBuf>,
    },
    /// Block-diagonalize an invariant SDP.
    Blockdiag {
        sdp: PathBuf,
        group: String,
        rep: PathBuf,
        /// Output directory for the manifest and block programs.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a change of basis against a representation.
    Verify {
        group: String,
        rep: PathBuf,
        basis: PathBuf,
    },
    /// Draw uniform (Haar) group elements.
    SampleGroup { group: String, count: usize },
}

/// Runs the tool on the process arguments.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the tool with explicit arguments and output streams, returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INPUT
                }
            };
        }
    };

    let mut buffer = Vec::new();
    let result = match cli.threads {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut buffer)),
            Err(e) => Err(Error::Shape(format!("cannot start {threads} threads: {e}"))),
        },
        None => dispatch(&cli, &mut buffer),
    };
    let result = result.and_then(|code| {
        out.write_all(&buffer)?;
        out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ProjectionDidNotConverge { .. }
        | Error::Genericity(_)
        | Error::ResampleBudgetExhausted { .. } => EXIT_DECOMPOSITION,
        Error::NotInvariant { .. } => EXIT_NOT_INVARIANT,
        _ => EXIT_INPUT,
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Decompose { group, rep, emit_basis } => {
            cmd_decompose(cli, group, rep, emit_basis.as_deref(), out)
        }
        Command::Blockdiag { sdp, group, rep, out: dir } => cmd_blockdiag(cli, sdp, group, rep, dir, out),
        Command::Verify { group, rep, basis } => cmd_verify(cli, group, rep, basis, out),
        Command::SampleGroup { group, count } => cmd_sample(cli, group, *count, out),
    }
}

fn rng_for(cli: &Cli, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(cli.seed);
    rng.set_stream(stream);
    rng
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn load_group(arg: &str) -> Result<Group> {
    let spec = match GroupSpec::parse_shorthand(arg) {
        Some(spec) => spec?,
        None => GroupSpec::parse(&read(Path::new(arg))?)?,
    };
    spec.build()
}

fn load_rep(cli: &Cli, group: &Group, path: &Path, fallback: Option<Field>) -> Result<Representation> {
    let spec = RepSpec::parse(&read(path)?)?;
    let field = cli
        .field
        .or(spec.field)
        .or(fallback)
        .unwrap_or_else(|| spec.resolve_field(group, None));
    spec.build(group, field)
}

fn projection_config(cli: &Cli) -> Result<ProjectionConfig> {
    let mut p = ProjectionConfig::default();
    if let Some(nu) = cli.nu {
        p.nu = nu;
    }
    if let Some(s) = cli.set_size {
        p.set_size = s;
    }
    if cli.commutation_tol.is_some() {
        p.commutation_tol = cli.commutation_tol;
    }
    p.validate()?;
    Ok(p)
}

fn decompose_config(cli: &Cli) -> Result<DecomposeConfig> {
    Ok(DecomposeConfig {
        projection: projection_config(cli)?,
        ..DecomposeConfig::default()
    })
}

fn group_label(group: &Group) -> String {
    match group {
        Group::Finite(g) => format!("permutation group of degree {}, order {}", g.degree(), g.order()),
        Group::Compact(c) => c.to_string(),
    }
}

fn emit(cli: &Cli, out: &mut dyn Write, text: String, value: Value) -> Result<()> {
    match cli.format {
        Format::Text => out.write_all(text.as_bytes())?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).map_err(|e| Error::Shape(e.to_string()))?;
            s.push('\n');
            out.write_all(s.as_bytes())?;
        }
    }
    Ok(())
}

fn components_json(d: &IrrepDecomposition) -> Value {
    Value::Array(
        d.components()
            .iter()
            .map(|c| {
                json!({
                    "dimension": c.dimension,
                    "multiplicity": c.multiplicity,
                    "real_type": c.real_type.as_str(),
                    "eigenvalue": c.eigenvalue,
                })
            })
            .collect(),
    )
}

fn components_text(d: &IrrepDecomposition) -> String {
    let mut s = String::from("components:\n");
    for c in d.components() {
        s.push_str(&format!(
            "  D={} M={} type={}\n",
            c.dimension,
            c.multiplicity,
            c.real_type.as_str()
        ));
    }
    s
}

fn cmd_decompose(cli: &Cli, group: &str, rep: &Path, emit_basis: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let group = load_group(group)?;
    let rep = load_rep(cli, &group, rep, None)?;
    let config = decompose_config(cli)?;
    let d = decompose(&rep, &config, &mut rng_for(cli, STREAM_DECOMPOSE))?;
    if let Some(path) = emit_basis {
        fs::write(path, basis_file::to_text(&d))?;
    }
    let diag = &d.diagnostics;
    let mut text = format!(
        "group: {}\nrepresentation: dimension {}, field {}\n",
        group_label(&group),
        rep.dimension(),
        rep.field()
    );
    text.push_str(&components_text(&d));
    text.push_str(&format!(
        "attempts: {}\nsample residual: {}\nwitness residual: {}\n",
        diag.attempts,
        fmt_f64(diag.sample_residual.max(diag.witness_sample_residual)),
        fmt_f64(diag.witness_residual)
    ));
    if let Some(path) = emit_basis {
        text.push_str(&format!("basis written to {}\n", path.display()));
    }
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "decompose",
        "group": group_label(&group),
        "dimension": rep.dimension(),
        "field": rep.field(),
        "components": components_json(&d),
        "diagnostics": diag,
        "basis_file": emit_basis.map(|p| p.display().to_string()),
    });
    emit(cli, out, text, value)?;
    Ok(EXIT_OK)
}

fn cmd_blockdiag(cli: &Cli, sdp: &Path, group: &str, rep: &Path, dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let problem = sdp_file::parse(&read(sdp)?)?;
    let group = load_group(group)?;
    let rep = load_rep(cli, &group, rep, Some(problem.field))?;
    if rep.field() != problem.field {
        return Err(Error::UnsupportedField(format!(
            "the SDP is over the {} numbers but the representation over the {} numbers",
            problem.field,
            rep.field()
        )));
    }
    let options = BlockOptions {
        tol: cli.tol.unwrap_or(BlockOptions::default().tol),
        symmetrize_first: cli.symmetrize,
        projection: projection_config(cli)?,
    };
    let d = decompose(&rep, &decompose_config(cli)?, &mut rng_for(cli, STREAM_DECOMPOSE))?;
    let result = block_diagonalize_sdp(&rep, &d, &problem, &options, &mut rng_for(cli, STREAM_SYMMETRIZE))?;
    sdp_file::write_blocks(dir, &result)?;

    let mut text = format!(
        "sdp: n={} m={} field {}\n",
        problem.n(),
        problem.m(),
        problem.field
    );
    text.push_str(&components_text(&d));
    text.push_str(&format!(
        "size reduction: {} -> {}\nresidual: {}\nwritten to {}\n",
        problem.n(),
        result
            .block_sizes()
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" "),
        fmt_f64(result.residual),
        dir.display()
    ));
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "blockdiag",
        "n": problem.n(),
        "m": problem.m(),
        "field": problem.field,
        "components": components_json(&d),
        "block_sizes": result.block_sizes(),
        "residual": result.residual,
        "out": dir.display().to_string(),
    });
    emit(cli, out, text, value)?;
    Ok(EXIT_OK)
}

fn cmd_verify(cli: &Cli, group: &str, rep: &Path, basis: &Path, out: &mut dyn Write) -> Result<i32> {
    let decomposition = basis_file::parse(&read(basis)?)?;
    let group = load_group(group)?;
    let rep = load_rep(cli, &group, rep, Some(decomposition.field()))?;
    let tol = cli.tol.unwrap_or(1e-6);
    let report = verify_decomposition(&rep, &decomposition, VERIFY_TRIALS, tol, &mut rng_for(cli, STREAM_VERIFY))?;
    let text = format!(
        "unitarity: {}\noff-block: {}\ncopy deviation: {}\ntrials: {}\ntolerance: {}\nresult: {}\n",
        fmt_f64(report.unitarity),
        fmt_f64(report.off_block),
        fmt_f64(report.copy_deviation),
        report.trials,
        fmt_f64(report.tol),
        if report.passed { "pass" } else { "fail" }
    );
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "report": report,
    });
    emit(cli, out, text, value)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_VERIFICATION })
}

fn cmd_sample(cli: &Cli, group: &str, count: usize, out: &mut dyn Write) -> Result<i32> {
    let group = load_group(group)?;
    let mut rng = rng_for(cli, STREAM_SAMPLE);
    let matrix_field = match &group {
        Group::Compact(c) => c.field(),
        Group::Finite(_) => Field::Real,
    };
    let mut text = String::new();
    let mut items = Vec::with_capacity(count);
    for _ in 0..count {
        match group.sample(&mut rng) {
            Element::Perm(p) => {
                text.push_str(&format!("{p}\n"));
                items.push(json!(p.images()));
            }
            Element::Matrix(m) => {
                let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                    .collect();
                for row in &rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|[re, im]| match matrix_field {
                            Field::Real => fmt_f64(*re),
                            Field::Complex => format!("{} {}", fmt_f64(*re), fmt_f64(*im)),
                        })
                        .collect();
                    text.push_str(&cells.join(" "));
                    text.push('\n');
                }
                let residual = linalg::unitarity_residual(&m);
                text.push_str(&format!("# unitarity residual {}\n\n", fmt_f64(residual)));
                items.push(json!({ "matrix": rows, "unitarity_residual": residual }));
            }
        }
    }
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "sample-group",
        "group": group_label(&group),
        "elements": items,
    });
    emit(cli, out, text, value)?;
    Ok(EXIT_OK)
}
