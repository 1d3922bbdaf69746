//! Drives the `cqadc` library from the command line: damping-grid sweeps of
//! decoding strategies, the BSC/QSC capacity comparison, single certified
//! measurement solves, and direct evaluation of the finite-blocklength
//! bounds. All tabular output is CSV with a fixed 9-significant-digit
//! format so that re-running a command with identical configuration yields
//! byte-identical files.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cqadc::bounds::{capacity_crossing, capacity_pair, qsc_converse, qsc_rcb};
use cqadc::channel::{adc, eps_bsc, pm_states};
use cqadc::codes::LinearCode;
use cqadc::measurement::{
    code_outputs, collective_optimal, default_tol, individual_success, pgm, pm_povm, success_prob,
};
use serde::Deserialize;

/// Errors surfaced to the command-line user, carrying the process exit
/// code contract: 2 for configuration problems, 3 for solver
/// non-convergence, 4 for structure-check failures, 1 for everything else.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flags, config file contents, or parameter domains.
    Config(String),
    /// The measurement solver exhausted its budget before certification.
    Solver(String),
    /// A structural symmetry assertion failed (for example the induced
    /// message channel is not symmetric at tolerance).
    Structure(String),
    /// I/O or other unexpected failures.
    Io(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Structure(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Solver(msg) => write!(f, "solver error: {msg}"),
            CliError::Structure(msg) => write!(f, "structure error: {msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cqadc::Error> for CliError {
    fn from(err: cqadc::Error) -> Self {
        match err {
            cqadc::Error::Validation(_) | cqadc::Error::TooLarge(_) => {
                CliError::Config(err.to_string())
            }
            cqadc::Error::Convergence { .. } => CliError::Solver(err.to_string()),
            cqadc::Error::Structure(_) => CliError::Structure(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

/// Shared result alias for the command runners.
pub type CliResult<T> = Result<T, CliError>;

/// Formats a real with 9 significant digits in the shortest of fixed or
/// scientific notation (fixed while the decimal exponent is in [-4, 9),
/// scientific otherwise), trimming trailing zeros. The mapping is a pure
/// function of the value, which keeps CSV output byte-identical across
/// runs.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("{:e} always emits an exponent");
    let exponent: i32 = exponent.parse().expect("exponent is an integer");
    if (-4..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exponent}")
    }
}

/// Decoding strategies and bounds selectable in a sweep, in the column
/// order they appear when all are requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Symbolwise measurement followed by classical ML decoding.
    IndividualMl,
    /// Certified optimal collective measurement over the whole block.
    CollectiveOptimal,
    /// Square-root (pretty good) measurement over the whole block.
    Pgm,
    /// Symmetric-channel converse upper bound at the code's parameters.
    Converse,
    /// Random-coding achievability lower bound at the code's parameters.
    Rcb,
}

impl Strategy {
    /// All strategies, in canonical column order.
    pub const ALL: [Strategy; 5] = [
        Strategy::IndividualMl,
        Strategy::CollectiveOptimal,
        Strategy::Pgm,
        Strategy::Converse,
        Strategy::Rcb,
    ];

    /// Column/flag name of the strategy.
    pub fn name(self) -> &'static str {
        match self {
            Strategy::IndividualMl => "individual_ml",
            Strategy::CollectiveOptimal => "collective_optimal",
            Strategy::Pgm => "pgm",
            Strategy::Converse => "converse",
            Strategy::Rcb => "rcb",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Strategy::ALL
            .into_iter()
            .find(|strategy| strategy.name() == s)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown strategy '{s}' (expected one of individual_ml, \
                     collective_optimal, pgm, converse, rcb)"
                ))
            })
    }
}

/// Resolves a `--code` value: first as one of the named codes, then as a
/// path to a JSON code definition.
pub fn resolve_code(name_or_path: &str) -> CliResult<LinearCode> {
    if let Ok(code) = LinearCode::named(name_or_path) {
        return Ok(code);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(CliError::Config(format!(
            "'{name_or_path}' is neither a named code nor an existing JSON file"
        )));
    }
    let text = fs::read_to_string(path)
        .map_err(|err| CliError::Io(format!("cannot read code file '{name_or_path}': {err}")))?;
    LinearCode::from_json_str(&text).map_err(CliError::from)
}

/// Optional fields of a sweep configuration file; every field can also be
/// given (and is overridden) by command-line flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    /// Named code or path to a JSON code definition.
    pub code: Option<String>,
    /// First damping value of the grid.
    pub gamma_start: Option<f64>,
    /// Last damping value of the grid.
    pub gamma_stop: Option<f64>,
    /// Grid spacing.
    pub gamma_step: Option<f64>,
    /// Strategy column selection.
    pub strategies: Option<Vec<String>>,
    /// Certificate tolerance for the collective solver.
    pub tol: Option<f64>,
    /// Output CSV path.
    pub out: Option<String>,
}

impl SweepFile {
    /// Loads a configuration file, rejecting malformed JSON.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|err| {
            CliError::Config(format!("cannot read config '{}': {err}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|err| {
            CliError::Config(format!("malformed config '{}': {err}", path.display()))
        })
    }
}

/// Fully resolved sweep configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Block code whose decoding performance is swept.
    pub code: LinearCode,
    /// First damping value.
    pub gamma_start: f64,
    /// Last damping value.
    pub gamma_stop: f64,
    /// Grid spacing.
    pub gamma_step: f64,
    /// Requested columns, in order.
    pub strategies: Vec<Strategy>,
    /// Certificate tolerance for the collective solver.
    pub tol: f64,
    /// CSV destination; `None` writes to standard output.
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    /// Merges two partial configurations — `flags` wins over `file`,
    /// defaults fill whatever neither provides — then validates the
    /// result.
    pub fn resolve(file: SweepFile, flags: SweepFile) -> CliResult<Self> {
        let code_spec = flags
            .code
            .or(file.code)
            .unwrap_or_else(|| "spc_3_2".to_string());
        let code = resolve_code(&code_spec)?;
        if code.q() != 2 {
            return Err(CliError::Config(format!(
                "sweeps modulate binary antipodal signal states; the code is over q = {}",
                code.q()
            )));
        }

        let gamma_start = flags.gamma_start.or(file.gamma_start).unwrap_or(0.0);
        let gamma_stop = flags.gamma_stop.or(file.gamma_stop).unwrap_or(1.0);
        let gamma_step = flags.gamma_step.or(file.gamma_step).unwrap_or(0.01);
        if !(0.0..=1.0).contains(&gamma_start)
            || !(gamma_start..=1.0).contains(&gamma_stop)
            || !(gamma_step > 0.0 && gamma_step.is_finite())
        {
            return Err(CliError::Config(format!(
                "damping grid must satisfy 0 <= start <= stop <= 1 with step > 0, got \
                 start={gamma_start}, stop={gamma_stop}, step={gamma_step}"
            )));
        }

        let strategy_names: Vec<String> = flags
            .strategies
            .or(file.strategies)
            .unwrap_or_else(|| vec!["individual_ml".into(), "collective_optimal".into()]);
        let mut strategies = Vec::with_capacity(strategy_names.len());
        for name in &strategy_names {
            let strategy: Strategy = name.parse()?;
            if strategies.contains(&strategy) {
                return Err(CliError::Config(format!("strategy '{name}' listed twice")));
            }
            strategies.push(strategy);
        }
        if strategies.is_empty() {
            return Err(CliError::Config("no strategies requested".to_string()));
        }

        let dim = 1usize << code.n().min(20);
        let tol = flags.tol.or(file.tol).unwrap_or_else(|| default_tol(dim));
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!(
                "tolerance must be positive, got {tol}"
            )));
        }

        Ok(SweepConfig {
            code,
            gamma_start,
            gamma_stop,
            gamma_step,
            strategies,
            tol,
            out: flags.out.or(file.out).map(PathBuf::from),
        })
    }

    /// The inclusive damping grid described by start/stop/step.
    pub fn gamma_grid(&self) -> Vec<f64> {
        grid(self.gamma_start, self.gamma_stop, self.gamma_step)
    }
}

/// Inclusive floating-point grid with index-based stepping (no
/// accumulated summation error).
fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|k| (start + k as f64 * step).min(stop).min(1.0))
        .collect()
}

/// Checks the emitted-probability invariant (no value meaningfully below
/// blind guessing or above certainty) and clamps to [0, 1] for printing.
fn checked_probability(value: f64, message_count: usize, label: &str) -> CliResult<f64> {
    let floor = 1.0 / message_count as f64;
    if value < floor - 1e-9 || value > 1.0 + 1e-9 {
        return Err(CliError::Io(format!(
            "internal error: {label} produced probability {value} outside \
             [1/M - 1e-9, 1 + 1e-9]"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Outcome of a sweep: the CSV text plus any per-point solver warnings.
#[derive(Debug)]
pub struct SweepOutput {
    /// Full CSV contents, LF line endings, header included.
    pub csv: String,
    /// One line per grid point whose solver call did not certify; the
    /// corresponding cells are left empty rather than reporting a
    /// non-optimal value as if it were certified.
    pub warnings: Vec<String>,
}

/// Evaluates a sweep configuration into CSV text.
///
/// Strategies appear as columns in the requested order; the collective
/// solver additionally reports its optimality-certificate residual in a
/// `hykl_residual` column immediately after its success column. A grid
/// point where the solver exhausts its budget produces empty cells and a
/// warning line instead of aborting the sweep.
pub fn sweep_csv(config: &SweepConfig) -> CliResult<SweepOutput> {
    let states = pm_states();
    let symbol_povm = pm_povm();
    let code = &config.code;
    let message_count = code.num_messages();

    let mut header = vec!["gamma".to_string()];
    for strategy in &config.strategies {
        header.push(strategy.name().to_string());
        if *strategy == Strategy::CollectiveOptimal {
            header.push("hykl_residual".to_string());
        }
    }

    let mut csv = String::new();
    csv.push_str(&header.join(","));
    csv.push('\n');

    let mut warnings = Vec::new();
    let needs_outputs = config
        .strategies
        .iter()
        .any(|s| matches!(s, Strategy::CollectiveOptimal | Strategy::Pgm));

    for gamma in config.gamma_grid() {
        let channel = adc(gamma)?;
        let outputs = if needs_outputs {
            Some(code_outputs(code, &states, &channel)?)
        } else {
            None
        };
        let priors = vec![1.0 / message_count as f64; message_count];

        let mut cells = vec![fmt_sig9(gamma)];
        for strategy in &config.strategies {
            match strategy {
                Strategy::IndividualMl => {
                    let value = individual_success(code, &states, &symbol_povm, &channel)?;
                    cells.push(fmt_sig9(checked_probability(
                        value,
                        message_count,
                        "individual_ml",
                    )?));
                }
                Strategy::CollectiveOptimal => {
                    match collective_optimal(code, &states, &channel, config.tol) {
                        Ok(result) => {
                            let value = checked_probability(
                                result.success_probability,
                                message_count,
                                "collective_optimal",
                            )?;
                            cells.push(fmt_sig9(value));
                            cells.push(fmt_sig9(result.hykl_residual));
                        }
                        Err(cqadc::Error::Convergence {
                            tol,
                            iterations,
                            best_residual,
                        }) => {
                            cells.push(String::new());
                            cells.push(String::new());
                            warnings.push(format!(
                                "gamma={}: collective solver stalled at residual {best_residual:.3e} \
                                 (requested {tol:.3e}, {iterations} iterations); cells left empty",
                                fmt_sig9(gamma)
                            ));
                        }
                        Err(other) => return Err(other.into()),
                    }
                }
                Strategy::Pgm => {
                    let outputs = outputs.as_ref().expect("outputs prepared above");
                    let povm = pgm(outputs, &priors)?;
                    let value = success_prob(&povm, outputs, &priors)?;
                    cells.push(fmt_sig9(checked_probability(value, message_count, "pgm")?));
                }
                Strategy::Converse => {
                    let eps = eps_bsc(gamma)?;
                    let bound = qsc_converse(code.n(), message_count as u64, 2, eps)?;
                    cells.push(fmt_sig9(checked_probability(
                        bound.value,
                        message_count,
                        "converse",
                    )?));
                }
                Strategy::Rcb => {
                    let eps = eps_bsc(gamma)?;
                    let bound = qsc_rcb(code.n(), message_count as u64, 2, eps)?;
                    cells.push(fmt_sig9(checked_probability(
                        bound.value,
                        message_count,
                        "rcb",
                    )?));
                }
            }
        }
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }

    Ok(SweepOutput { csv, warnings })
}

/// Writes CSV text to the configured destination. Warnings go to a `.log`
/// sidecar next to the output file, or to standard error when the CSV is
/// printed to standard output.
pub fn write_csv_output(csv: &str, warnings: &[String], out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, csv)?;
            if !warnings.is_empty() {
                let mut log_path = path.as_os_str().to_owned();
                log_path.push(".log");
                let mut log = String::new();
                for warning in warnings {
                    log.push_str(warning);
                    log.push('\n');
                }
                fs::write(PathBuf::from(log_path), log)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_bytes())?;
            for warning in warnings {
                eprintln!("warning: {warning}");
            }
        }
    }
    Ok(())
}

/// Runs the sweep command end to end.
pub fn run_sweep(config: &SweepConfig) -> CliResult<()> {
    let output = sweep_csv(config)?;
    write_csv_output(&output.csv, &output.warnings, config.out.as_deref())
}

/// Configuration of the capacity-comparison command.
#[derive(Debug, Clone)]
pub struct CapacityConfig {
    /// First damping value of the CSV grid.
    pub gamma_start: f64,
    /// Last damping value of the CSV grid.
    pub gamma_stop: f64,
    /// CSV grid spacing.
    pub gamma_step: f64,
    /// Bisection resolution for the reported crossing point.
    pub resolution: f64,
    /// Certificate tolerance for the per-point measurement solves.
    pub tol: f64,
    /// CSV destination; `None` writes to standard output.
    pub out: Option<PathBuf>,
}

impl CapacityConfig {
    /// Validates and assembles a capacity configuration from flag values.
    pub fn resolve(
        gamma_start: Option<f64>,
        gamma_stop: Option<f64>,
        gamma_step: Option<f64>,
        resolution: Option<f64>,
        tol: Option<f64>,
        out: Option<&str>,
    ) -> CliResult<Self> {
        let gamma_start = gamma_start.unwrap_or(0.0);
        let gamma_stop = gamma_stop.unwrap_or(1.0);
        let gamma_step = gamma_step.unwrap_or(0.01);
        if !(0.0..=1.0).contains(&gamma_start)
            || !(gamma_start..=1.0).contains(&gamma_stop)
            || !(gamma_step > 0.0 && gamma_step.is_finite())
        {
            return Err(CliError::Config(format!(
                "damping grid must satisfy 0 <= start <= stop <= 1 with step > 0, got \
                 start={gamma_start}, stop={gamma_stop}, step={gamma_step}"
            )));
        }
        let resolution = resolution.unwrap_or(1e-3);
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(CliError::Config(format!(
                "crossing resolution must be positive, got {resolution}"
            )));
        }
        let tol = tol.unwrap_or_else(|| default_tol(8));
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        Ok(CapacityConfig {
            gamma_start,
            gamma_stop,
            gamma_step,
            resolution,
            tol,
            out: out.map(PathBuf::from),
        })
    }
}

/// Outcome of the capacity command: CSV text plus the crossing report.
#[derive(Debug)]
pub struct CapacityOutput {
    /// CSV with columns gamma, c_bsc, two_thirds_c_qsc and a final
    /// crossing line.
    pub csv: String,
    /// Smallest damping at which the collective message channel carries
    /// more capacity than the symbolwise one.
    pub crossing: f64,
}

/// Evaluates the capacity comparison: per-grid-point induced capacities
/// and the crossing location.
pub fn capacity_csv(config: &CapacityConfig) -> CliResult<CapacityOutput> {
    let mut csv = String::from("gamma,c_bsc,two_thirds_c_qsc\n");
    for gamma in grid(config.gamma_start, config.gamma_stop, config.gamma_step) {
        let pair = capacity_pair(gamma, config.tol)?;
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_sig9(gamma),
            fmt_sig9(pair.c_bsc),
            fmt_sig9(2.0 / 3.0 * pair.c_qsc),
        ));
    }
    let crossing = capacity_crossing(config.resolution)?;
    csv.push_str(&format!("# capacity_crossing,{}\n", fmt_sig9(crossing)));
    Ok(CapacityOutput { csv, crossing })
}

/// Runs the capacity command end to end.
pub fn run_capacity(config: &CapacityConfig) -> CliResult<()> {
    let output = capacity_csv(config)?;
    write_csv_output(&output.csv, &[], config.out.as_deref())?;
    let report = format!("capacity crossing at gamma = {}", fmt_sig9(output.crossing));
    if config.out.is_some() {
        println!("{report}");
    } else {
        eprintln!("{report}");
    }
    Ok(())
}

/// Report of one certified collective measurement solve.
#[derive(Debug)]
pub struct PovmReport {
    /// Code identifier as given on the command line.
    pub code_spec: String,
    /// Blocklength.
    pub n: usize,
    /// Number of messages.
    pub m: usize,
    /// Damping parameter.
    pub gamma: f64,
    /// Certificate tolerance requested.
    pub tol: f64,
    /// Average success probability of the certified measurement.
    pub success_probability: f64,
    /// Optimality-certificate residual.
    pub hykl_residual: f64,
    /// Solver iterations (0 for the closed-form endpoint branches).
    pub iterations: usize,
}

impl PovmReport {
    /// Plain-text report.
    pub fn text(&self) -> String {
        format!(
            "code: {} (n={}, M={})\ngamma: {}\nsuccess probability: {}\n\
             hykl residual: {}\niterations: {}\n",
            self.code_spec,
            self.n,
            self.m,
            fmt_sig9(self.gamma),
            fmt_sig9(self.success_probability),
            fmt_sig9(self.hykl_residual),
            self.iterations,
        )
    }

    /// Machine-readable report with the same fields.
    pub fn json(&self) -> String {
        serde_json::json!({
            "code": self.code_spec,
            "n": self.n,
            "m": self.m,
            "gamma": self.gamma,
            "tol": self.tol,
            "success_probability": self.success_probability,
            "hykl_residual": self.hykl_residual,
            "iterations": self.iterations,
        })
        .to_string()
    }
}

/// Solves one collective discrimination problem and reports the
/// certificate.
pub fn povm_report(code_spec: &str, gamma: f64, tol: Option<f64>) -> CliResult<PovmReport> {
    let code = resolve_code(code_spec)?;
    if code.q() != 2 {
        return Err(CliError::Config(format!(
            "collective solves modulate binary antipodal signal states; the code is over q = {}",
            code.q()
        )));
    }
    let dim = 1usize
        .checked_shl(code.n() as u32)
        .filter(|d| *d <= cqadc::linalg::MAX_KRON_DIM)
        .ok_or_else(|| {
            CliError::Config(format!(
                "blocklength {} exceeds the dimension guard",
                code.n()
            ))
        })?;
    let tol = tol.unwrap_or_else(|| default_tol(dim));
    let channel = adc(gamma)?;
    let states = pm_states();
    let result = collective_optimal(&code, &states, &channel, tol)?;
    Ok(PovmReport {
        code_spec: code_spec.to_string(),
        n: code.n(),
        m: code.num_messages(),
        gamma,
        tol,
        success_probability: result.success_probability,
        hykl_residual: result.hykl_residual,
        iterations: result.iterations,
    })
}

/// Which finite-blocklength bounds to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSelection {
    /// Converse upper bound only.
    Converse,
    /// Random-coding lower bound only.
    Rcb,
    /// Both bounds.
    Both,
}

impl std::str::FromStr for BoundSelection {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "converse" => Ok(BoundSelection::Converse),
            "rcb" => Ok(BoundSelection::Rcb),
            "both" => Ok(BoundSelection::Both),
            other => Err(CliError::Config(format!(
                "unknown bound '{other}' (expected converse, rcb, or both)"
            ))),
        }
    }
}

/// Evaluates the requested bounds and renders a text or JSON report.
pub fn bounds_report(
    n: usize,
    m: u64,
    q: u8,
    eps: f64,
    selection: BoundSelection,
    json: bool,
) -> CliResult<String> {
    let converse = match selection {
        BoundSelection::Converse | BoundSelection::Both => Some(qsc_converse(n, m, q, eps)?.value),
        BoundSelection::Rcb => None,
    };
    let rcb = match selection {
        BoundSelection::Rcb | BoundSelection::Both => Some(qsc_rcb(n, m, q, eps)?.value),
        BoundSelection::Converse => None,
    };

    if json {
        let mut object = serde_json::json!({ "n": n, "m": m, "q": q, "eps": eps });
        let map = object.as_object_mut().expect("literal object");
        if let Some(value) = converse {
            map.insert("converse".into(), serde_json::json!(value));
        }
        if let Some(value) = rcb {
            map.insert("rcb".into(), serde_json::json!(value));
        }
        Ok(object.to_string())
    } else {
        let mut report = String::new();
        if let Some(value) = converse {
            report.push_str(&format!("converse: {}\n", fmt_sig9(value)));
        }
        if let Some(value) = rcb {
            report.push_str(&format!("rcb: {}\n", fmt_sig9(value)));
        }
        Ok(report)
    }
}
