//! Command-line entry point.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::DerivedReport;
use crate::eigen::{eigendecompose, residual_norm};
use crate::fitting::{fit, multistart, FitProblem, ModelKind};
use crate::hamiltonian::SymMatrix;
use crate::io::{
    analysis_report, emit_spectrum_svg, fit_report, parse_config, read_ridge_csv,
    read_spectrum_csv, residuals_csv, rows_to_csv, to_canonical_text, write_spectrum_csv,
    RunConfig, SvgStyle,
};
use crate::spectra::spectrum;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cpbtls", version, about = "Cooper-pair box + two-level fluctuator spectra")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the transition spectrum over the configured gate-charge grid.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Spectrum CSV path (default: output.spectrum_csv, else stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Fit the model to digitized ridge points.
    Fit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Report path (default: output.fit_report, else stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        residuals: Option<PathBuf>,
    },
    /// Derived microscopic quantities for the configured model.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One spectrum per flux ratio.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated flux ratios Φ/Φ0.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        flux: Vec<f64>,
        /// Output directory (default: output.sweep_dir).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Built-in eigensolver and round-trip checks.
    Selftest {
        #[arg(long, default_value_t = 100)]
        matrices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn data(e: impl std::fmt::Display) -> Self {
        Failure::Data(e.to_string())
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_DATA;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{}", <Cli as clap::CommandFactory>::command().render_usage());
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            EXIT_DATA
        }
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Simulate { config, out, svg } => simulate(&config, out, svg),
        Command::Fit {
            config,
            data,
            out,
            residuals,
        } => run_fit(&config, &data, out, residuals),
        Command::Analyze { config, out } => analyze(&config, out),
        Command::Sweep {
            config,
            flux,
            out_dir,
        } => sweep(&config, &flux, out_dir),
        Command::Selftest { matrices, seed } => Ok(selftest(matrices, seed)),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Writes to `flag`, else to the configured path, else to stdout.
fn emit(flag: Option<PathBuf>, configured: &Option<String>, contents: &str) -> Result<(), Failure> {
    match flag.or_else(|| configured.as_ref().map(PathBuf::from)) {
        Some(path) => write_file(&path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn simulate(config: &Path, out: Option<PathBuf>, svg: Option<PathBuf>) -> Result<i32, Failure> {
    let cfg = load_config(config)?;
    let table = spectrum(&cfg.model, &cfg.grid.points(), cfg.max_states).map_err(Failure::data)?;
    emit(out, &cfg.outputs.spectrum_csv, &write_spectrum_csv(&table))?;
    if let Some(path) = svg.or_else(|| cfg.outputs.spectrum_svg.as_ref().map(PathBuf::from)) {
        let text = emit_spectrum_svg(&table, &SvgStyle::default()).map_err(Failure::data)?;
        write_file(&path, &text)?;
    }
    Ok(EXIT_OK)
}

fn run_fit(
    config: &Path,
    data: &Path,
    out: Option<PathBuf>,
    residuals: Option<PathBuf>,
) -> Result<i32, Failure> {
    let cfg = load_config(config)?;
    let text = fs::read_to_string(data)
        .map_err(|e| Failure::Data(format!("{}: {e}", data.display())))?;
    let datasets =
        read_ridge_csv(&text).map_err(|e| Failure::Data(format!("{}: {e}", data.display())))?;
    let kind = ModelKind::from_tls_count(cfg.model.tls.len())
        .ok_or_else(|| Failure::Data("fitting needs a model with one or two TLS".into()))?;
    let problem = FitProblem::new(
        datasets,
        kind,
        cfg.model.cpb.n_charge_states,
        &cfg.fit.bounds,
        cfg.fit.policy,
    )
    .map_err(Failure::data)?;

    let (result, ms) = if cfg.fit.seeds == 0 {
        let start = problem.clip(&problem.initial_from(&cfg.model));
        (fit(&problem, &start, &cfg.fit.optimizer).map_err(Failure::data)?, None)
    } else {
        let ms = multistart(&problem, cfg.fit.seeds, cfg.fit.rng_seed, &cfg.fit.optimizer)
            .map_err(Failure::data)?;
        (ms.best.clone(), Some(ms))
    };
    emit(out, &cfg.outputs.fit_report, &fit_report(&result, ms.as_ref()))?;
    if let Some(path) = residuals.or_else(|| cfg.outputs.residuals_csv.as_ref().map(PathBuf::from)) {
        write_file(&path, &residuals_csv(&result, &problem.datasets))?;
    }
    if !result.converged {
        eprintln!(
            "error: optimizer stopped after {} iterations without converging",
            result.iterations
        );
        return Ok(EXIT_DATA);
    }
    Ok(EXIT_OK)
}

fn analyze(config: &Path, out: Option<PathBuf>) -> Result<i32, Failure> {
    let cfg = load_config(config)?;
    let reports = DerivedReport::all(&cfg.model, &cfg.junction_or_nominal(), &cfg.lifetime);
    emit(out, &cfg.outputs.analysis_report, &analysis_report(cfg.model.cpb.e_c, &reports))?;
    Ok(EXIT_OK)
}

/// File name for the `index`-th flux ratio of a sweep.
pub fn sweep_file_name(index: usize) -> String {
    format!("spectrum_flux{index:03}.csv")
}

fn sweep(config: &Path, flux: &[f64], out_dir: Option<PathBuf>) -> Result<i32, Failure> {
    let cfg = load_config(config)?;
    let dir = out_dir
        .or_else(|| cfg.outputs.sweep_dir.as_ref().map(PathBuf::from))
        .ok_or_else(|| Failure::Usage("sweep needs --out-dir or output.sweep_dir".into()))?;
    if flux.iter().any(|f| !f.is_finite()) {
        return Err(Failure::Usage("flux ratios must be finite".into()));
    }
    fs::create_dir_all(&dir).map_err(|e| Failure::Data(format!("{}: {e}", dir.display())))?;
    let grid = cfg.grid.points();
    for (i, &ratio) in flux.iter().enumerate() {
        let model = cfg.model.clone().with_flux(ratio);
        let table = spectrum(&model, &grid, cfg.max_states).map_err(Failure::data)?;
        let path = dir.join(sweep_file_name(i));
        write_file(&path, &write_spectrum_csv(&table))?;
        println!(
            "flux_ratio = {}, e_j_ghz = {}, file = {}",
            crate::io::g9(ratio),
            crate::io::g9(model.e_j()),
            path.display()
        );
    }
    Ok(EXIT_OK)
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.random_range(-1.0..1.0);
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    SymMatrix::from_row_major(n, entries).expect("symmetric by construction")
}

fn check(name: &str, ok: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn selftest(matrices: usize, seed: u64) -> i32 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_res, mut worst_orth, mut worst_trace) = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = 0;
    for _ in 0..matrices {
        let m = random_symmetric(&mut rng, 16);
        match eigendecompose(&m) {
            Ok(sys) => {
                worst_res = worst_res.max(residual_norm(&sys, &m));
                worst_orth = worst_orth.max(sys.orthonormality_defect());
                let sum: f64 = sys.values().iter().sum();
                let tr = m.trace();
                worst_trace = worst_trace.max((sum - tr).abs() / tr.abs().max(1.0));
            }
            Err(_) => failures += 1,
        }
    }
    let mut ok = check(
        "eigen.converged",
        failures == 0,
        format!("{}/{matrices} matrices", matrices - failures),
    );
    ok &= check("eigen.residual", worst_res < 1e-10, format!("max {worst_res:e}"));
    ok &= check("eigen.orthonormality", worst_orth < 1e-10, format!("max {worst_orth:e}"));
    ok &= check("eigen.trace", worst_trace < 1e-9, format!("max relative {worst_trace:e}"));

    let sample = "model.tls_count = 2\ncpb.e_c_ghz = 4.3\ncpb.e_j_max_ghz = 2.79\n\
tls1.e_r_ghz = 0.49\ntls1.t_lr_ghz = 0.07\ntls1.e_int_ghz = 0.13\ntls1.delta_e_j_ghz = 1.24\n\
tls2.e_r_ghz = 0.6\ntls2.t_lr_ghz = 0.16\ntls2.e_int_ghz = -0.4\ntls2.delta_e_j_ghz = -0.95\n\
t_12_ghz = 0.0\n";
    let config_ok = parse_config(sample)
        .ok()
        .and_then(|c| {
            let text = to_canonical_text(&c);
            let again = parse_config(&text).ok()?;
            Some(again == c && to_canonical_text(&again) == text)
        })
        .unwrap_or(false);
    ok &= check("config.round_trip", config_ok, "canonical text".into());

    let csv_ok = parse_config(sample)
        .ok()
        .and_then(|c| spectrum(&c.model, &[0.9, 0.95, 1.0, 1.05, 1.1], 6).ok())
        .map(|t| {
            let text = write_spectrum_csv(&t);
            read_spectrum_csv(&text).map(|rows| rows_to_csv(&rows) == text).unwrap_or(false)
        })
        .unwrap_or(false);
    ok &= check("spectrum_csv.round_trip", csv_ok, "byte-identical".into());

    if ok {
        EXIT_OK
    } else {
        EXIT_DATA
    }
}
