use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lpme_core::analysis::{
    cptp_certificate, decay_rate_fit, limit_cycle, spectrum_classification, CertificateThresholds,
};
use lpme_core::bohr::decompose_averaged_hamiltonian;
use lpme_core::dynamics::{integrate_mme_direct, uniform_grid, DynamicalMap, TimeDependentLindbladian};
use lpme_core::generator::build_generator;
use lpme_core::linalg::{trace_norm, CMatrix};
use lpme_core::model::{synthesize_hamiltonian, validate_model, ReducedModel};
use lpme_core::reference::generic_state;
use lpme_core::{Error, Tolerances};

use crate::error::{CliError, CliResult};
use crate::format::{float, to_json};
use crate::report::{
    BundleView, CertificateView, HamiltonianView, LimitCycleView, SpectrumView, ValidationView,
};
use crate::schema::{matrix_from_rows, read_model_file, ComplexRows, ToleranceOverrides};

#[derive(Debug, Parser)]
#[command(name = "lpme", version, about = "Quasiperiodically driven Lindblad master equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the model assumptions; exit 1 if any fails.
    Validate(ModelArgs),
    /// Fourier series of the Hamiltonian `H_t`.
    Synthesize(ModelArgs),
    /// Bohr decomposition, jump operators, Kossakowski blocks and `X`.
    Build(ModelArgs),
    /// Trajectory CSV from the product form and the direct integrator.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Classified spectrum of `X`.
    Spectrum(ModelArgs),
    /// Limit cycle of a trajectory and its decay-rate fit.
    SteadyState {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Choi-matrix certificate of `Λ_t` and random propagators; exit 1 on failure.
    Certify {
        #[command(flatten)]
        model: ModelArgs,
        /// Times `t` of the certified maps (pair times are drawn from the same range).
        #[arg(long, default_value = "0:50:21", value_parser = parse_grid)]
        grid: Grid,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file (JSON).
    pub model: PathBuf,
    /// Half-width of the Fourier box; overrides the model file.
    #[arg(long, env = "LPME_TRUNC")]
    pub trunc: Option<i32>,
    /// Directory for the output files instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Time grid `start:stop:count`.
    #[arg(long, default_value = "0:20:201", value_parser = parse_grid)]
    pub grid: Grid,
    /// Initial state: `generic`, `mixed`, `ground` or a JSON matrix file.
    #[arg(long, default_value = "generic")]
    pub rho0: String,
}

#[derive(Debug, Default, Args)]
pub struct TolArgs {
    #[arg(long = "tol-hermiticity", env = "LPME_TOL_HERMITICITY")]
    pub hermiticity: Option<f64>,
    #[arg(long = "tol-cluster", env = "LPME_TOL_CLUSTER")]
    pub cluster: Option<f64>,
    #[arg(long = "tol-unitarity", env = "LPME_TOL_UNITARITY")]
    pub unitarity: Option<f64>,
    #[arg(long = "tol-rational", env = "LPME_TOL_RATIONAL")]
    pub rational: Option<f64>,
    #[arg(long = "tol-congruence", env = "LPME_TOL_CONGRUENCE")]
    pub congruence: Option<f64>,
    #[arg(long = "tol-search-box", env = "LPME_TOL_SEARCH_BOX")]
    pub search_box: Option<i32>,
    #[arg(long = "tol-truncation-loss", env = "LPME_TOL_TRUNCATION_LOSS")]
    pub truncation_loss: Option<f64>,
    #[arg(long = "tol-jump-drop", env = "LPME_TOL_JUMP_DROP")]
    pub jump_drop: Option<f64>,
    #[arg(long = "tol-psd", env = "LPME_TOL_PSD")]
    pub psd: Option<f64>,
    #[arg(long = "tol-spectral", env = "LPME_TOL_SPECTRAL")]
    pub spectral: Option<f64>,
    #[arg(long = "tol-zero-eigenvalue", env = "LPME_TOL_ZERO_EIGENVALUE")]
    pub zero_eigenvalue: Option<f64>,
    #[arg(long = "tol-conjugation", env = "LPME_TOL_CONJUGATION")]
    pub conjugation: Option<f64>,
    #[arg(long = "tol-condition-limit", env = "LPME_TOL_CONDITION_LIMIT")]
    pub condition_limit: Option<f64>,
    #[arg(long = "tol-integrator", env = "LPME_TOL_INTEGRATOR")]
    pub integrator: Option<f64>,
}

impl From<&TolArgs> for ToleranceOverrides {
    fn from(t: &TolArgs) -> Self {
        ToleranceOverrides {
            hermiticity: t.hermiticity,
            cluster: t.cluster,
            unitarity: t.unitarity,
            rational: t.rational,
            congruence: t.congruence,
            search_box: t.search_box,
            truncation_loss: t.truncation_loss,
            jump_drop: t.jump_drop,
            psd: t.psd,
            spectral: t.spectral,
            zero_eigenvalue: t.zero_eigenvalue,
            conjugation: t.conjugation,
            condition_limit: t.condition_limit,
            integrator: t.integrator,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn times(&self) -> Vec<f64> {
        uniform_grid(self.start, self.stop, self.count)
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(format!("expected start:stop:count, got {s:?}"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let grid = Grid {
        start: num(start)?,
        stop: num(stop)?,
        count: count.trim().parse().map_err(|e| format!("{count:?}: {e}"))?,
    };
    if !(grid.start.is_finite() && grid.stop.is_finite()) || grid.start < 0.0 {
        return Err("grid times must be finite and non-negative".into());
    }
    if grid.count < 2 || grid.stop <= grid.start {
        return Err("grid must be strictly increasing with at least two points".into());
    }
    Ok(grid)
}

struct Loaded {
    model: ReducedModel,
    tols: Tolerances,
}

/// CLI flags and environment win over the file, which wins over defaults.
fn load(args: &ModelArgs) -> CliResult<Loaded> {
    let file = read_model_file(&args.model)?;
    let trunc = args.trunc.unwrap_or(file.truncation());
    if trunc < 0 {
        return Err(CliError::Usage(format!("truncation must be non-negative, got {trunc}")));
    }
    let overrides = file.tolerances.merged(&(&args.tol).into());
    Ok(Loaded {
        model: file.to_model(trunc)?,
        tols: overrides.apply(Tolerances::default()),
    })
}

fn initial_state(spec: &str, model: &ReducedModel, tols: &Tolerances) -> CliResult<CMatrix> {
    let d = model.dim();
    let rho = match spec {
        "generic" => generic_state(d),
        "mixed" => CMatrix::identity(d).scale_real(1.0 / d as f64),
        "ground" => {
            let dec = decompose_averaged_hamiltonian(model.h_bar(), tols.hermiticity, tols.cluster)?;
            dec.projections()[0].scale_real(1.0 / dec.projections()[0].trace().re)
        }
        path => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let rows: ComplexRows = serde_json::from_str(&text).map_err(|e| CliError::Parse {
                path: path.into(),
                field: "rho0".into(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            matrix_from_rows(&rows)?
        }
    };
    if rho.rows() != d {
        return Err(Error::DimensionMismatch {
            context: "initial state",
            expected: d,
            found: rho.rows(),
        }
        .into());
    }
    Ok(rho)
}

fn emit(out: &mut dyn Write, dir: Option<&Path>, name: &str, content: &str) -> CliResult<()> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            let path = dir.join(name);
            fs::write(&path, content).map_err(|e| CliError::io(&path, e))
        }
        None => out.write_all(content.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, args: &ModelArgs, name: &str, value: &T) -> CliResult<()> {
    emit(out, args.out.as_deref(), &format!("{name}.json"), &to_json(value))
}

/// Runs one subcommand and returns the exit code of a completed run.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<u8> {
    match &cli.command {
        Command::Validate(args) => {
            let l = load(args)?;
            let report = validate_model(&l.model, &l.tols);
            emit_json(out, args, "validate", &ValidationView::from(&report))?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Synthesize(args) => {
            let l = load(args)?;
            let h = synthesize_hamiltonian(l.model.p_series(), l.model.omega(), l.model.h_bar(), &l.tols)?;
            emit_json(out, args, "synthesize", &HamiltonianView::from(&h))?;
            Ok(0)
        }
        Command::Build(args) => {
            let l = load(args)?;
            let bundle = build_generator(&l.model, &l.tols)?;
            emit_json(out, args, "build", &BundleView::from(&bundle))?;
            Ok(0)
        }
        Command::Evolve { model: args, run } => {
            let l = load(args)?;
            let rho0 = initial_state(&run.rho0, &l.model, &l.tols)?;
            let grid = run.grid.times();
            let csv = evolve_csv(&l, &rho0, &grid)?;
            emit(out, args.out.as_deref(), "trajectory.csv", &csv)?;
            Ok(0)
        }
        Command::Spectrum(args) => {
            let l = load(args)?;
            let bundle = build_generator(&l.model, &l.tols)?;
            let report = spectrum_classification(&bundle.x, &l.tols)?;
            emit_json(out, args, "spectrum", &SpectrumView::from(&report))?;
            Ok(0)
        }
        Command::SteadyState { model: args, run } => {
            let l = load(args)?;
            let bundle = build_generator(&l.model, &l.tols)?;
            let map = DynamicalMap::new(&l.model, &bundle, &l.tols);
            let rho0 = initial_state(&run.rho0, &l.model, &l.tols)?;
            let cycle = limit_cycle(&map, &rho0)?;
            let grid = run.grid.times();
            let fit = match decay_rate_fit(&map, &cycle, &rho0, &grid) {
                Ok(fit) => Some(fit),
                Err(Error::InsufficientDecay) => None,
                Err(e) => return Err(e.into()),
            };
            emit_json(out, args, "steady-state", &LimitCycleView::new(&cycle, fit.as_ref(), &grid))?;
            Ok(0)
        }
        Command::Certify { model: args, grid, pairs, seed } => {
            let l = load(args)?;
            let bundle = build_generator(&l.model, &l.tols)?;
            let map = DynamicalMap::new(&l.model, &bundle, &l.tols);
            let cert = cptp_certificate(&map, &grid.times(), *pairs, *seed, CertificateThresholds::default())?;
            emit_json(out, args, "certify", &CertificateView::from(&cert))?;
            Ok(if cert.passed() { 0 } else { 1 })
        }
    }
}

/// Columns: `t`, the product-form state, the directly integrated state
/// (real and imaginary part of every entry, row-major) and their trace
/// distance.
fn evolve_csv(l: &Loaded, rho0: &CMatrix, grid: &[f64]) -> CliResult<String> {
    let bundle = build_generator(&l.model, &l.tols)?;
    let map = DynamicalMap::new(&l.model, &bundle, &l.tols);
    let lt = TimeDependentLindbladian::new(&l.model, &bundle, &l.tols)?;
    let direct = integrate_mme_direct(&lt, rho0, grid, l.tols.integrator)?;

    let d = l.model.dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    for path in ["product", "direct"] {
        for i in 0..d {
            for j in 0..d {
                header.push(format!("{path}_re_{i}{j}"));
                header.push(format!("{path}_im_{i}{j}"));
            }
        }
    }
    header.push("distance".into());
    w.write_record(&header)?;
    for (&t, rho_direct) in grid.iter().zip(&direct.states) {
        let rho = map.evolve(rho0, t)?;
        let mut row = vec![float(t)];
        for m in [&rho, rho_direct] {
            for z in m.as_slice() {
                row.push(float(z.re));
                row.push(float(z.im));
            }
        }
        row.push(float(trace_norm(&(&rho - rho_direct))));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("<csv>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of ASCII fields"))
}
