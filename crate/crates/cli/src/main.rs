//! `origami`: analyze surfaces, convert solutions between kinematic models,
//! generate test surfaces and check serial chains.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::{json, Map, Value};

use origami_cosheaf::io::generate::random_chain;
use origami_cosheaf::io::{analyze, generate, parse_fold, to_canonical_json, FoldDocument, Shape, SolutionFile};
use origami_cosheaf::serial::{check_serial, serial_chain_operators, SerialChain};
use origami_cosheaf::{ConversionReport, Error, KinematicModels, ModelKind, ModelSolution, OrigamiSurface, Tolerances};

#[derive(Parser)]
#[command(name = "origami", version, about = "First-order rigid origami kinematics via cosheaf homology")]
struct Cli {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for generator jitter and random chains.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Skip the generic-position jitter of generated surfaces.
    #[arg(long, global = true)]
    no_jitter: bool,
    /// Include wall-clock time in reports (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Hinge,
    Spatial,
    Truss,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Hinge => ModelKind::Hinge,
            Model::Spatial => ModelKind::Spatial,
            Model::Truss => ModelKind::Truss,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build every model on a FOLD file and run the dimension ledgers.
    Analyze { file: PathBuf },
    /// Convert a solution vector between models.
    Convert {
        file: PathBuf,
        #[arg(long)]
        input_solution: PathBuf,
        #[arg(long, value_enum)]
        from: Model,
        #[arg(long, value_enum)]
        to: Model,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a built-in surface as a FOLD file.
    Gen {
        /// chain, single_vertex, grid, annulus, cylinder, torus or miura.
        shape: String,
        /// Positional shape parameters (counts, then angles in degrees).
        params: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one basis vector of a model's solution space as a solution file.
    Basis {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Model::Hinge)]
        model: Model,
        /// Which basis vector (hinge: of ker iota_*, so it converts).
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Take the vector from the loop-obstructed complement instead.
        #[arg(long)]
        obstructed: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a random serial chain and compare its operators.
    Serial {
        n: usize,
        /// Exit 1 unless the residuals meet 1e-12 / 1e-12 / 1e-9.
        #[arg(long)]
        check: bool,
    },
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_surface(path: &Path, tol: f64) -> Result<OrigamiSurface, Failure> {
    Ok(parse_fold(&read(path)?)?.to_surface(tol)?)
}

fn tolerances(tol: f64) -> Result<Tolerances, Failure> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Failure::Input(format!("--tol must lie in (0, 1), got {tol}")));
    }
    Ok(Tolerances::with_rank(tol))
}

fn emit(format: Format, value: &Value, text: impl FnOnce() -> String) {
    match format {
        Format::Json => print!("{}", to_canonical_json(value)),
        Format::Text => print!("{}", text()),
    }
}

fn solution_json(s: &ModelSolution) -> Value {
    json!({
        "model": serde_json::to_value(s.kind).unwrap_or(Value::Null),
        "residual": s.residual,
        "norm": s.values.norm(),
    })
}

fn conversion_json(r: &ConversionReport) -> Value {
    let mut m = Map::new();
    m.insert("input".into(), solution_json(&r.input));
    m.insert("obstructed".into(), json!(r.obstructed));
    m.insert("obstruction".into(), json!(r.obstruction.iter().copied().collect::<Vec<f64>>()));
    m.insert("obstruction_norm".into(), json!(r.obstruction.norm()));
    if let Some(s) = &r.spatial {
        m.insert("spatial".into(), solution_json(s));
    }
    if let Some(t) = &r.truss {
        m.insert("truss".into(), solution_json(t));
    }
    if let Some(rt) = r.roundtrip_residual {
        m.insert("roundtrip_residual".into(), json!(rt));
    }
    let checks: Map<String, Value> = r.checks.iter().map(|(k, ok)| (k.clone(), json!(ok))).collect();
    m.insert("checks".into(), Value::Object(checks));
    m.insert("passed".into(), json!(r.passed()));
    Value::Object(m)
}

fn text_of(value: &Value) -> String {
    let mut out = String::new();
    flatten(&mut out, "", value);
    out
}

fn flatten(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(out, &key, item);
            }
        }
        other => {
            let line = to_canonical_json(other);
            out.push_str(&format!("{prefix}: {}\n", line.trim_end()));
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let tol = tolerances(cli.tol)?;
    match cli.command {
        Command::Analyze { file } => {
            let surface = load_surface(&file, cli.tol)?;
            let (_, mut report) = analyze(surface, tol)?;
            if cli.timing {
                report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            }
            match cli.format {
                Format::Json => print!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            if !report.passed {
                let failed: Vec<_> = report.checks.iter().filter(|(_, c)| !c.passed).map(|(k, _)| k.as_str()).collect();
                return Err(Failure::Check(format!("failed checks: {}", failed.join(", "))));
            }
        }
        Command::Convert { file, input_solution, from, to, out } => {
            let surface = load_surface(&file, cli.tol)?;
            let input = SolutionFile::parse(&read(&input_solution)?)?;
            if input.model != ModelKind::from(from) {
                return Err(Failure::Input(format!(
                    "solution file holds a {:?} solution but --from is {:?}",
                    input.model,
                    ModelKind::from(from)
                )));
            }
            let m = KinematicModels::build(surface, tol)?;
            let x = input.to_vector(&m)?;
            let (value, output, ok) = convert(&m, from, to, &x)?;
            if let Some((kind, y)) = output {
                write(&out, &SolutionFile::from_vector(&m, kind, &y)?.to_json())?;
            }
            emit(cli.format, &value, || text_of(&value));
            if !ok {
                return Err(Failure::Check("conversion obstructed or failed its checks".into()));
            }
        }
        Command::Gen { shape, params, out } => {
            let shape = Shape::from_params(&shape, &params)?;
            let surface: OrigamiSurface = generate(shape, cli.seed, !cli.no_jitter)?;
            let mut doc = FoldDocument::from_surface(&surface);
            doc.metadata.insert("file_creator".into(), json!("origami gen"));
            doc.metadata.insert("frame_title".into(), json!(format!("{} {:?}", shape.name(), params)));
            write(&out, &doc.to_json())?;
        }
        Command::Basis { file, model, index, obstructed, out } => {
            let surface = load_surface(&file, cli.tol)?;
            let m = KinematicModels::build(surface, tol)?;
            let basis = match (model, obstructed) {
                (Model::Hinge, false) => m.consistent_hinge_basis(),
                (Model::Hinge, true) => m.obstructed_hinge_basis(),
                (Model::Spatial, false) => m.theta.spatial_basis().basis.clone(),
                (Model::Truss, false) => m.truss_kernel.basis.clone(),
                (_, true) => return Err(Failure::Input("--obstructed only applies to hinge solutions".into())),
            };
            if index >= basis.ncols() {
                return Err(Failure::Input(format!("basis has {} vectors, index {index} requested", basis.ncols())));
            }
            let x: DVector<f64> = basis.column(index).into_owned();
            write(&out, &SolutionFile::from_vector(&m, model.into(), &x)?.to_json())?;
        }
        Command::Serial { n, check } => {
            if n == 0 {
                return Err(Error::InvalidParams("serial chain needs n >= 1".into()).into());
            }
            let chain = SerialChain::from_surface(random_chain::<f64>(n, cli.seed)?)?;
            let ops = serial_chain_operators(&chain)?;
            let probes: Vec<DVector<f64>> = (0..3).map(|k| DVector::from_fn(n, |i, _| ((i + 1) as f64 * (k as f64 + 0.7)).sin())).collect();
            let res = check_serial(&chain, &ops, &probes, tol.policy())?;
            let passed = res.passed(1e-12, 1e-9);
            let value = json!({
                "n": n,
                "seed": cli.seed,
                "recurrence_vs_d": res.recurrence,
                "psi_inverse_vs_identity": res.inverse,
                "d_pinv_left_inverse": res.left_inverse,
                "d_pinv_vs_connecting_map": res.connecting,
                "passed": passed,
            });
            emit(cli.format, &value, || text_of(&value));
            if check && !passed {
                return Err(Failure::Check("serial chain residuals above threshold".into()));
            }
        }
    }
    Ok(())
}

type Converted = (Value, Option<(ModelKind, DVector<f64>)>, bool);

fn convert(m: &KinematicModels, from: Model, to: Model, x: &DVector<f64>) -> Result<Converted, Failure> {
    match (from, to) {
        (Model::Hinge, Model::Spatial) | (Model::Hinge, Model::Truss) => {
            let report = if to == Model::Truss { m.hinge_to_truss(x)? } else { m.theta_pinv(x)? };
            let out = match to {
                Model::Truss => report.truss.as_ref().map(|s| (ModelKind::Truss, s.values.clone())),
                _ => report.spatial.as_ref().map(|s| (ModelKind::Spatial, s.values.clone())),
            };
            Ok((conversion_json(&report), out, report.passed()))
        }
        (Model::Spatial, Model::Truss) => {
            let y = m.eta_map(x)?;
            let ok = y.residual <= m.tol.cycle * 1f64.max(y.values.norm());
            let value = json!({"input_norm": x.norm(), "truss": solution_json(&y), "passed": ok});
            Ok((value, Some((ModelKind::Truss, y.values)), ok))
        }
        (Model::Truss, Model::Spatial) => {
            let nu = m.eta_inverse(x)?;
            let value = json!({"input_norm": x.norm(), "spatial": solution_json(&nu), "passed": true});
            Ok((value, Some((ModelKind::Spatial, nu.values)), true))
        }
        (Model::Spatial, Model::Hinge) => {
            let coords = m.theta.spatial_basis().coordinates(x);
            let dist = m.theta.spatial_basis().distance(x);
            if dist > m.tol.cycle * 1f64.max(x.norm()) {
                return Err(Error::NotACycle { model: "spatial", residual: dist }.into());
            }
            let theta = &m.theta.hinge_basis().basis * (m.theta.matrix() * coords);
            let sol = m.hinge_solution(theta)?;
            let value = json!({"input_norm": x.norm(), "hinge": solution_json(&sol), "passed": true});
            Ok((value, Some((ModelKind::Hinge, sol.values)), true))
        }
        _ => Err(Failure::Input("--from and --to must name different models".into())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("origami: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("origami: error: {msg}");
            ExitCode::from(2)
        }
    }
}
