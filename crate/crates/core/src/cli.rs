//! Command-line front end. `run_with` does all the work and returns the exit
//! code: 0 on success, 2 when a construction or audit invariant fails, 1 on
//! usage and I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{audit, AuditConfig, AuditReport, SCHEMA_VERSION};
use crate::error::Error;
use crate::families::FamilySpec;
use crate::kleetope::{
    convex_kleetope, iterate_kleetope, longest_simple_cycle, spike_kleetope, AbstractTriangulation,
    DEFAULT_HEIGHT_FACTOR,
};
use crate::mesh::{read_obj, read_off, write_obj, write_off};
use crate::mesh::TriangleMesh;
use crate::verify::{check_obtuse_projection, run_big_dihedral, sharpness_decay, SampleConfig};

const TRIANGULATION_FORMATS: &str = "Triangulations are read as OFF (coordinates may be all zero) or as \
plain text: a header line 'V F' with the vertex and face counts, then F lines 'i j k' of 0-based vertex \
indices. '#' starts a comment.";

#[derive(Debug, Parser)]
#[command(name = "polyiso", version, about = "Isosceles polyhedra, Kleetopes and their invariants")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Report angles in degrees.
    #[arg(long, global = true)]
    degrees: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a member of one of the monohedral isosceles families and audit it.
    Construct {
        #[command(subcommand)]
        family: Family,
    },
    /// Kleetope of a triangulation: combinatorial, convex, or spike.
    #[command(after_help = TRIANGULATION_FORMATS)]
    Kleetope(KleetopeArgs),
    /// Audit a mesh (OFF or OBJ).
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Randomized checks of the tetrahedron and sharpness lemmas.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Longest simple cycle of a triangulation's graph.
    #[command(after_help = TRIANGULATION_FORMATS)]
    Cycle {
        #[arg(long = "in")]
        input: PathBuf,
        /// Give up after this many seconds and report the best cycle found.
        #[arg(long)]
        budget: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
enum Family {
    Bipyramid {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        #[command(flatten)]
        out: OutArg,
    },
    Biarc {
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        #[command(flatten)]
        out: OutArg,
    },
    Gyro {
        #[arg(long)]
        k: usize,
        /// Unit-edge deltahedron (k = 4 or 5) instead of the spherical placement.
        #[arg(long)]
        equilateral: bool,
        #[command(flatten)]
        out: OutArg,
    },
    TwistedGyro {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Args)]
struct OutArg {
    /// Mesh output; `.obj` writes OBJ, anything else OFF.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Graph,
    Convex,
    Spike,
}

#[derive(Debug, Args)]
struct KleetopeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    iterations: usize,
    /// Spike radius; chosen automatically when absent.
    #[arg(long)]
    radius: Option<f64>,
    /// Convex mode: fraction of the feasible apex height to use.
    #[arg(long, default_value_t = DEFAULT_HEIGHT_FACTOR)]
    height_factor: f64,
    /// Output file. Graph mode writes the 'V F' text format unless the name
    /// ends in `.off`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Check {
    BigDihedral {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, env = "POLYISO_SEED", default_value_t = 42)]
        seed: u64,
        /// Write each counterexample tetrahedron here as OFF.
        #[arg(long)]
        counterexample_dir: Option<PathBuf>,
    },
    ObtuseProjection {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, env = "POLYISO_SEED", default_value_t = 42)]
        seed: u64,
    },
    SharpnessDecay {
        /// Seed mesh; the regular octahedron when absent.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        iterations: usize,
        #[arg(long, default_value_t = DEFAULT_HEIGHT_FACTOR)]
        height_factor: f64,
    },
}

/// Failure of a command, with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::InvalidSpec(_) | Error::InvalidConfig(_) | Error::RadiusTooSmall { .. } => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Outcome of a successful run: a JSON report and any invariant failures it
/// records.
struct Outcome {
    report: Value,
    failures: Vec<String>,
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::usage(format!("{}: {e}", path.display()))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn has_ext(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn read_mesh(path: &Path) -> Result<TriangleMesh, Failure> {
    let text = read_file(path)?;
    Ok(if has_ext(path, "obj") { read_obj(&text)? } else { read_off(&text)? })
}

fn write_mesh(path: &Path, m: &TriangleMesh) -> Result<(), Failure> {
    write_file(path, &if has_ext(path, "obj") { write_obj(m) } else { write_off(m) })
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn audited(m: &TriangleMesh, degrees: bool) -> Result<(Value, Vec<String>), Failure> {
    let a: AuditReport = audit(m, &AuditConfig::default())?;
    let failures = a.failures();
    let a = if degrees { a.in_degrees() } else { a };
    Ok((to_value(&a), failures))
}

fn construct(family: Family, degrees: bool) -> Result<Outcome, Failure> {
    let (spec, out) = match family {
        Family::Bipyramid { n, h, out } => (FamilySpec::Bipyramid { n, h }, out),
        Family::Biarc { x, y, out } => (FamilySpec::Biarc { x, y }, out),
        Family::Gyro { k, equilateral, out } => (FamilySpec::Gyro { k, equilateral }, out),
        Family::TwistedGyro { k, out } => (FamilySpec::TwistedGyro { k }, out),
    };
    spec.validate()?;
    let mesh = spec.build()?;
    if let Some(p) = &out.out {
        write_mesh(p, &mesh)?;
    }
    let (a, failures) = audited(&mesh, degrees)?;
    let report = json!({ "schemaVersion": SCHEMA_VERSION, "command": "construct", "family": spec, "audit": a });
    Ok(Outcome { report, failures })
}

fn kleetope(args: KleetopeArgs, degrees: bool) -> Result<Outcome, Failure> {
    match args.mode {
        Mode::Graph => {
            let g = AbstractTriangulation::read_any(&read_file(&args.input)?)?;
            let k = iterate_kleetope(&g, args.iterations);
            if let Some(p) = &args.out {
                if has_ext(p, "off") {
                    let zeros = vec![crate::geom3::Point3::ORIGIN; k.vertex_count()];
                    write_file(p, &write_off(&TriangleMesh::new(zeros, k.faces().to_vec())?))?;
                } else {
                    write_file(p, &k.write_text())?;
                }
            }
            let report = json!({
                "schemaVersion": SCHEMA_VERSION,
                "command": "kleetope",
                "mode": "graph",
                "iterations": args.iterations,
                "input": { "vertexCount": g.vertex_count(), "faceCount": g.face_count() },
                "vertexCount": k.vertex_count(),
                "edgeCount": k.edge_count(),
                "faceCount": k.face_count(),
            });
            Ok(Outcome { report, failures: Vec::new() })
        }
        Mode::Convex => {
            if !(args.height_factor > 0.0 && args.height_factor < 1.0) {
                return Err(Failure::usage("--height-factor must lie in (0, 1)"));
            }
            let mut m = read_mesh(&args.input)?;
            for _ in 0..args.iterations {
                m = convex_kleetope(&m, args.height_factor)?;
            }
            if let Some(p) = &args.out {
                write_mesh(p, &m)?;
            }
            let (a, failures) = audited(&m, degrees)?;
            let report = json!({
                "schemaVersion": SCHEMA_VERSION,
                "command": "kleetope",
                "mode": "convex",
                "iterations": args.iterations,
                "heightFactor": args.height_factor,
                "audit": a,
            });
            Ok(Outcome { report, failures })
        }
        Mode::Spike => {
            if args.iterations != 1 {
                return Err(Failure::usage("spike mode takes exactly one iteration; its output is not convex"));
            }
            let m = read_mesh(&args.input)?;
            let (spike, params) = spike_kleetope(&m, args.radius)?;
            if let Some(p) = &args.out {
                write_mesh(p, &spike)?;
            }
            let (a, failures) = audited(&spike, degrees)?;
            let report = json!({
                "schemaVersion": SCHEMA_VERSION,
                "command": "kleetope",
                "mode": "spike",
                "spike": params,
                "audit": a,
            });
            Ok(Outcome { report, failures })
        }
    }
}

fn verify(check: Check, degrees: bool) -> Result<Outcome, Failure> {
    match check {
        Check::BigDihedral { samples, seed, counterexample_dir } => {
            let r = run_big_dihedral(&SampleConfig::new(seed, samples))?;
            let mut failures = Vec::new();
            if !r.passed() {
                failures.push(format!("{} tetrahedra have every base dihedral at most π/3", r.total_violations));
            }
            if let Some(dir) = &counterexample_dir {
                fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
                for c in r.cases.iter().flat_map(|c| &c.counterexamples) {
                    let name = format!("{:?}-{}.off", c.tetra.case, c.index);
                    write_mesh(&dir.join(name), &c.tetra.to_mesh())?;
                }
            }
            let r = if degrees { r.in_degrees() } else { r };
            Ok(Outcome { report: to_value(&r), failures })
        }
        Check::ObtuseProjection { samples, seed } => {
            let r = check_obtuse_projection(seed, samples)?;
            let mut failures = Vec::new();
            if r.counterexample.is_some() {
                failures.push("an acute triangle projects to an angle of at least 2π/3".into());
            }
            if !r.boundary_is_right {
                failures.push("the boundary configuration is not a right triangle".into());
            }
            let r = if degrees { r.in_degrees() } else { r };
            Ok(Outcome { report: to_value(&r), failures })
        }
        Check::SharpnessDecay { input, iterations, height_factor } => {
            let seed = match &input {
                Some(p) => read_mesh(p)?,
                None => FamilySpec::Bipyramid { n: 4, h: 1.0 }.build()?,
            };
            let r = sharpness_decay(&seed, iterations, height_factor)?;
            let mut failures = Vec::new();
            if !r.doubling_bound_holds {
                failures.push("a child face is more than twice as sharp as its parent".into());
            }
            if !r.non_increasing {
                failures.push("the minimum sharpness increased under iteration".into());
            }
            let r = if degrees { r.in_degrees() } else { r };
            Ok(Outcome { report: to_value(&r), failures })
        }
    }
}

fn cycle(input: &Path, budget: Option<f64>) -> Result<Outcome, Failure> {
    let budget = match budget {
        Some(s) if !(s >= 0.0 && s.is_finite()) => return Err(Failure::usage("--budget must be a non-negative number")),
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let g = AbstractTriangulation::read_any(&read_file(input)?)?;
    let r = longest_simple_cycle(&g, budget);
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "cycle",
        "vertexCount": g.vertex_count(),
        "result": r,
    });
    Ok(Outcome { report, failures: Vec::new() })
}

fn dispatch(cli: Cli) -> Result<Outcome, Failure> {
    let degrees = cli.degrees;
    match cli.command {
        Command::Construct { family } => construct(family, degrees),
        Command::Kleetope(args) => kleetope(args, degrees),
        Command::Analyze { input } => {
            let (a, failures) = audited(&read_mesh(&input)?, degrees)?;
            Ok(Outcome { report: a, failures })
        }
        Command::Verify { check } => verify(check, degrees),
        Command::Cycle { input, budget } => cycle(&input, budget),
    }
}

/// Parses `args` (program name first) and runs the command, writing the
/// report to `out` (or the `--report` file) and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let report_path = cli.report.clone();
    let outcome = match dispatch(cli) {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            return f.code;
        }
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize") + "\n";
    let written = match &report_path {
        Some(p) => write_file(p, &text),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::usage(e.to_string())),
    };
    if let Err(f) = written {
        let _ = writeln!(err, "error: {}", f.message);
        return f.code;
    }
    for f in &outcome.failures {
        let _ = writeln!(err, "invariant failed: {f}");
    }
    if outcome.failures.is_empty() {
        0
    } else {
        2
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
