//! Command dispatch for the `peakon` binary.
//!
//! Every command reads one JSON document (except `verify`, which reads
//! nothing) and produces text: JSON for the maps and constants, CSV for
//! trajectories and wavefunctions, a residual table for `verify`. Outcomes
//! map to exit status 0 (success), 1 (validation failure) or 2 (input,
//! parse or usage error).

pub mod formats;

use clap::ValueEnum;
use num::{BigRational, One};
use serde::Serialize;
use serde_json::json;

use peakon_spectral::bimoments::DiscreteMeasure;
use peakon_spectral::core_types::{validate_admissible, RealLineData, SpectralData};
use peakon_spectral::dynamics::{
    conserved_coefficients, conserved_from_minors, trajectories, trajectory_csv,
};
use peakon_spectral::error::SpectralError;
use peakon_spectral::forward_spectral::{exact_forward_map, forward_map};
use peakon_spectral::inverse_spectral::{
    configuration_distance, quantities_from_measures, recover, single_pair_quantities,
    spectral_distance, RealLineQuantities,
};
use peakon_spectral::scalar::{format_rational, parse_rational, Scalar};
use peakon_spectral::transition::{evaluate_wavefunction, Wavefunction};
use peakon_spectral::verify::{run_all, run_suite, SuiteReport, VerifyOptions};

use formats::{
    csv, rational_array, read_configuration, read_rational_configuration, read_rational_spectral,
    read_spectral, to_json, Document, RationalSpectral,
};

/// Relative bracket width used when rational mode isolates eigenvalues.
pub const EXACT_BRACKET_WIDTH: f64 = 1e-20;

/// Default acceptance threshold of `roundtrip`.
pub const DEFAULT_ROUNDTRIP_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Configuration JSON to spectral data JSON.
    Forward,
    /// Spectral data JSON to configuration JSON.
    Inverse,
    /// Forward then inverse (or inverse then forward for spectral input).
    Roundtrip,
    /// Trajectory CSV over the time grid.
    Evolve,
    /// Named verification suite, or `all`.
    Verify,
    /// CSV of the wavefunction at the breakpoints for one λ.
    Wavefunction,
    /// The constants of motion `[A]_k` and `[Ã]_k`.
    Conserved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Mode {
    #[default]
    Float,
    Rational,
}

/// One invocation, with the input document already read.
#[derive(Clone, Debug)]
pub struct CommandRequest {
    pub command: Command,
    pub mode: Mode,
    pub tolerance: Option<f64>,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub lambda: Option<String>,
    pub suite: String,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl CommandRequest {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            mode: Mode::Float,
            tolerance: None,
            t0: 0.0,
            t1: 1.0,
            steps: 10,
            lambda: None,
            suite: "all".into(),
            seed: None,
            samples: None,
        }
    }

    /// Whether the command reads an input document.
    pub fn needs_input(&self) -> bool {
        self.command != Command::Verify
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ValidationFailure = 1,
    InputError = 2,
}

/// Output text, diagnostics for standard error, and the exit status.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub status: ExitStatus,
    pub output: String,
    pub diagnostics: Vec<String>,
}

/// A failed command: its status and one message per problem found.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub status: ExitStatus,
    pub messages: Vec<String>,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            status: ExitStatus::InputError,
            messages: vec![message.into()],
        }
    }

    pub fn validation(messages: Vec<String>) -> Self {
        Self {
            status: ExitStatus::ValidationFailure,
            messages,
        }
    }
}

impl From<SpectralError> for Failure {
    fn from(err: SpectralError) -> Self {
        Failure::validation(vec![err.to_string()])
    }
}

/// Runs `request` on `input`.
pub fn run(request: &CommandRequest, input: &str) -> Outcome {
    let result = match request.command {
        Command::Verify => verify(request),
        _ => Document::parse(input).and_then(|doc| dispatch(request, &doc)),
    };
    match result {
        Ok((status, output)) => Outcome {
            status,
            output,
            diagnostics: Vec::new(),
        },
        Err(failure) => Outcome {
            status: failure.status,
            output: String::new(),
            diagnostics: failure.messages,
        },
    }
}

type Produced = Result<(ExitStatus, String), Failure>;

fn success(output: String) -> Produced {
    Ok((ExitStatus::Success, output))
}

fn dispatch(request: &CommandRequest, doc: &Document) -> Produced {
    match (request.command, request.mode) {
        (Command::Forward, Mode::Float) => {
            success(to_json(&forward_map(&read_configuration(doc)?)?) + "\n")
        }
        (Command::Forward, Mode::Rational) => forward_rational(doc),
        (Command::Inverse, Mode::Float) => inverse_float(doc),
        (Command::Inverse, Mode::Rational) => inverse_rational(doc),
        (Command::Roundtrip, Mode::Float) => roundtrip(request, doc),
        (Command::Evolve, Mode::Float) => evolve(request, doc),
        (Command::Wavefunction, mode) => wavefunction(request, mode, doc),
        (Command::Conserved, Mode::Float) => {
            let set = conserved_coefficients(&read_configuration(doc)?)?;
            success(format!(
                "{}\n",
                json!({"A": set.a_coeffs, "A_twin": set.a_twin_coeffs})
            ))
        }
        (Command::Conserved, Mode::Rational) => {
            let set = conserved_from_minors(&read_rational_configuration(doc)?);
            success(format!(
                "{}\n",
                json!({"A": rational_array(&set.a_coeffs), "A_twin": rational_array(&set.a_twin_coeffs)})
            ))
        }
        (command @ (Command::Roundtrip | Command::Evolve), Mode::Rational) => {
            Err(Failure::input(format!(
                "`{}` needs binary64 eigenvalues and positions; run it with --mode float",
                command
                    .to_possible_value()
                    .expect("commands have names")
                    .get_name()
            )))
        }
        (Command::Verify, _) => unreachable!("verify reads no document"),
    }
}

fn forward_rational(doc: &Document) -> Produced {
    let data = read_rational_configuration(doc)?;
    let result = exact_forward_map(&data, EXACT_BRACKET_WIDTH)?;
    let approx = &result.approximate;
    let value = json!({
        "lambda": approx.lambda,
        "mu": approx.mu,
        "a": approx.a,
        "b": approx.b,
        "b_inf": format_rational(&result.b_inf),
        "b_inf_star": format_rational(&result.b_inf_star),
        "A": rational_array(result.numerators.a.coeffs()),
        "B": rational_array(result.numerators.b.coeffs()),
        "A_twin": rational_array(result.twin_numerators.a.coeffs()),
        "B_twin": rational_array(result.twin_numerators.b.coeffs()),
    });
    success(format!("{value}\n"))
}

fn admissible(data: &SpectralData) -> Result<(), Failure> {
    let report = validate_admissible(data);
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::validation(report.violations))
    }
}

fn inverse_float(doc: &Document) -> Produced {
    let data = read_spectral(doc)?;
    admissible(&data)?;
    success(to_json(&recover(&data)?) + "\n")
}

fn inverse_rational(doc: &Document) -> Produced {
    let data = read_rational_spectral(doc)?;
    let approx = data.approx();
    let mut report = validate_admissible(&approx);
    // The single-pair constraint is decided exactly; the rounded check
    // could misjudge data on the boundary.
    report
        .violations
        .retain(|v| !v.starts_with("single-pair constraint"));
    if data.lambda.len() == 1 && report.violations.is_empty() {
        let two = BigRational::from_int(2);
        let product = two * data.lambda[0].clone() * data.b_inf.clone() * data.b_inf_star.clone();
        if product <= BigRational::one() {
            report.violations.push(format!(
                "single-pair constraint: 2·λ₁·b∞·b*∞ = {} must exceed 1",
                format_rational(&product)
            ));
        }
    }
    if !report.passed() {
        return Err(Failure::validation(report.violations));
    }
    let quantities = exact_quantities(&data);
    let exp_2x: Vec<BigRational> = quantities
        .half_exp_2x
        .iter()
        .map(|v| v.clone() * BigRational::from_int(2))
        .collect();
    if let Some(i) = exp_2x.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Failure::validation(vec![format!(
            "recovered e^(2x) values at sites {i} and {} are not increasing",
            i + 1
        )]));
    }
    let mass_exp_minus_x: Vec<BigRational> = quantities
        .amplitude
        .iter()
        .map(|v| v.clone() / BigRational::from_int(2))
        .collect();
    let value = json!({
        "K": data.lambda.len(),
        "exp_2x": rational_array(&exp_2x),
        "mass_exp_minus_x": rational_array(&mass_exp_minus_x),
    });
    success(format!("{value}\n"))
}

fn exact_quantities(data: &RationalSpectral) -> RealLineQuantities<BigRational> {
    if data.lambda.len() == 1 {
        return single_pair_quantities(&data.lambda[0], &data.a[0], &data.b_inf, &data.b_inf_star);
    }
    let alpha = DiscreteMeasure {
        support: data.lambda.clone(),
        weights: data.a.clone(),
    };
    let beta = DiscreteMeasure {
        support: data.mu.clone(),
        weights: data.b.clone(),
    };
    quantities_from_measures(&alpha, &beta, &data.b_inf, &data.b_inf_star)
}

#[derive(Serialize)]
struct RoundtripReport {
    direction: &'static str,
    max_relative_error: f64,
    tolerance: f64,
    passed: bool,
}

fn roundtrip(request: &CommandRequest, doc: &Document) -> Produced {
    let tolerance = request.tolerance.unwrap_or(DEFAULT_ROUNDTRIP_TOLERANCE);
    let (direction, error) = if doc.has("lambda") {
        let data = read_spectral(doc)?;
        admissible(&data)?;
        (
            "spectral",
            spectral_distance(&forward_map(&recover(&data)?)?, &data),
        )
    } else {
        let config = read_configuration(doc)?;
        (
            "configuration",
            configuration_distance(&recover(&forward_map(&config)?)?, &config),
        )
    };
    let passed = error <= tolerance;
    let report = RoundtripReport {
        direction,
        max_relative_error: error,
        tolerance,
        passed,
    };
    let status = if passed {
        ExitStatus::Success
    } else {
        ExitStatus::ValidationFailure
    };
    Ok((status, to_json(&report) + "\n"))
}

/// `steps + 1` equally spaced times from `t0` to `t1`.
pub fn time_grid(t0: f64, t1: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) || steps == 0 {
        return Err(Failure::input(format!(
            "time grid must increase strictly: need finite --t0 < --t1 and --steps ≥ 1, got t0 = {t0}, t1 = {t1}, steps = {steps}"
        )));
    }
    let span = t1 - t0;
    Ok((0..=steps)
        .map(|i| {
            if i == steps {
                t1
            } else {
                t0 + span * i as f64 / steps as f64
            }
        })
        .collect())
}

fn evolve(request: &CommandRequest, doc: &Document) -> Produced {
    let config = read_configuration(doc)?;
    let times = time_grid(request.t0, request.t1, request.steps)?;
    success(trajectory_csv(&trajectories(&config, &times)?))
}

fn wavefunction(request: &CommandRequest, mode: Mode, doc: &Document) -> Produced {
    let Some(text) = request.lambda.as_deref() else {
        return Err(Failure::input("wavefunction needs --lambda <value>"));
    };
    let lambda = parse_rational(text).ok_or_else(|| {
        Failure::input(format!(
            "--lambda: `{text}` is not a decimal or \"p/q\" rational"
        ))
    })?;
    match mode {
        Mode::Float => {
            let config = read_configuration(doc)?;
            let meas = config.to_interval()?;
            let lambda = text
                .trim()
                .parse::<f64>()
                .unwrap_or_else(|_| lambda.approx());
            success(wavefunction_csv(
                &evaluate_wavefunction(&meas, &lambda, false),
                |v| v.to_string(),
            ))
        }
        Mode::Rational => {
            let data: RealLineData<BigRational> = read_rational_configuration(doc)?;
            let meas = data.to_interval()?;
            success(wavefunction_csv(
                &evaluate_wavefunction(&meas, &lambda, false),
                format_rational,
            ))
        }
    }
}

/// Two rows per interval (its left and right breakpoints): `φ₁`, `φ₂` are
/// constant on an interval and `φ₃` is linear.
fn wavefunction_csv<T: Scalar>(wave: &Wavefunction<T>, show: impl Fn(&T) -> String) -> String {
    let rows = wave.pieces.iter().flat_map(|piece| {
        [
            (&piece.y_left, &piece.phi3_left),
            (&piece.y_right, &piece.phi3_right),
        ]
        .map(|(y, phi3)| vec![show(y), show(&piece.phi1), show(&piece.phi2), show(phi3)])
    });
    csv(&["y", "phi1", "phi2", "phi3"], rows)
}

fn verify(request: &CommandRequest) -> Produced {
    let defaults = VerifyOptions::default();
    let options = VerifyOptions {
        seed: request.seed.unwrap_or(defaults.seed),
        samples: request.samples.unwrap_or(defaults.samples),
        tolerance: request.tolerance,
    };
    let reports: Vec<SuiteReport> = if request.suite == "all" {
        run_all(&options)
    } else {
        vec![run_suite(&request.suite, &options).map_err(|err| Failure::input(err.to_string()))?]
    };
    let mut output: String = reports.iter().map(SuiteReport::table).collect();
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.as_str())
        .collect();
    let status = if failed.is_empty() {
        output.push_str("all suites passed\n");
        ExitStatus::Success
    } else {
        output.push_str(&format!("failed suites: {}\n", failed.join(", ")));
        ExitStatus::ValidationFailure
    };
    Ok((status, output))
}
