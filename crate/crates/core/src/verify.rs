//! Named verification suites over seeded random data.
//!
//! Each suite produces a table of rows. A row records the worst residual seen
//! over its cases and the tolerance it is held to; rows with tolerance zero
//! count failures (exact identities, sign conditions) rather than measure a
//! residual. Random inputs are drawn sequentially from the seed and then
//! evaluated in parallel, so results do not depend on thread scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approximation::{
    approximation_orders, pade_triple, pade_triple_accurate, triple_from_transition, weyl_series,
};
use crate::bimoments::{
    biorthogonal_pair, cauchy_pairing, determinant_identity_suite, distance_inequalities,
    spectral_measures, starred_heine, HeineSumKey, HeineTable,
};
use crate::core_types::{InterlacingConfiguration, SpectralData};
use crate::dynamics::{
    conserved_coefficients, conserved_from_determinants, conserved_from_minors,
    conserved_from_transition, integrate_rk4_checked, max_position_difference,
    single_pair_closed_form, trajectories,
};
use crate::error::{Result, SpectralError};
use crate::forward_spectral::{
    adjoint_residues, b_infinity_product, eigenvalues, forward_map, residue_products_lambda,
    residue_products_mu, transition_residues, weyl_from_transition, weyl_relation_residuals,
};
use crate::inverse_spectral::{configuration_distance, recover, recover_k1, spectral_distance};
use crate::poly::Polynomial;
use crate::sampling::{
    log_uniform, random_configuration, random_measure, random_rational_configuration,
    random_rational_measure, random_rational_spectral, random_spectral_data, seeded,
};
use crate::scalar::{Scalar, Wide};
use crate::transition::{expected_degrees, sigma_involution, transition_matrix};

/// Names accepted by [`run_suite`], in criterion order.
pub const SUITES: [&str; 11] = [
    "roundtrip",
    "reverse-roundtrip",
    "single-pair",
    "algebraic",
    "weyl",
    "residue-products",
    "determinant-identities",
    "starred-symmetry",
    "pade",
    "dynamics",
    "positivity",
];

/// Knobs shared by all suites.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random cases per `K` in the roundtrip suites; the other suites use
    /// fixed fractions of this count.
    pub samples: usize,
    /// Replaces the tolerance of every measured (non-exact) row.
    pub tolerance: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            samples: 1000,
            tolerance: None,
        }
    }
}

impl VerifyOptions {
    fn scaled(&self, divisor: usize, floor: usize) -> usize {
        (self.samples / divisor).max(floor)
    }
}

/// One line of a suite's residual table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub rows: Vec<CheckRow>,
    /// Pipeline errors and the first few offending cases.
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|row| row.passed)
    }

    /// Plain-text residual table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "suite {}: {}\n",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        for row in &self.rows {
            out.push_str(&format!(
                "  {:<4} {:<58} cases={:<6} worst={:<12.3e} tol={:.1e}\n",
                if row.passed { "ok" } else { "FAIL" },
                row.check,
                row.cases,
                row.worst,
                row.tolerance
            ));
        }
        for note in &self.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
        out
    }
}

/// Collects rows for one suite.
struct Builder<'a> {
    options: &'a VerifyOptions,
    report: SuiteReport,
}

const MAX_NOTES: usize = 8;

impl<'a> Builder<'a> {
    fn new(name: &str, options: &'a VerifyOptions) -> Self {
        Self {
            options,
            report: SuiteReport {
                name: name.into(),
                rows: Vec::new(),
                notes: Vec::new(),
            },
        }
    }

    /// A measured row: every outcome is a residual or an error message.
    fn measured(
        &mut self,
        check: impl Into<String>,
        tolerance: f64,
        outcomes: Vec<std::result::Result<f64, String>>,
    ) {
        let tolerance = self.options.tolerance.unwrap_or(tolerance);
        let cases = outcomes.len();
        let mut worst: f64 = 0.0;
        let check = check.into();
        for outcome in outcomes {
            match outcome {
                Ok(value) if value.is_nan() => {
                    worst = f64::INFINITY;
                    self.note(format!("{check}: NaN residual"));
                }
                Ok(value) => worst = worst.max(value),
                Err(message) => {
                    worst = f64::INFINITY;
                    self.note(format!("{check}: {message}"));
                }
            }
        }
        self.report.rows.push(CheckRow {
            check,
            cases,
            worst,
            tolerance,
            passed: worst <= tolerance,
        });
    }

    /// A counting row: each outcome is `Ok(())` or a description of a failure.
    fn exact(&mut self, check: impl Into<String>, outcomes: Vec<std::result::Result<(), String>>) {
        let check = check.into();
        let cases = outcomes.len();
        let mut failures = 0usize;
        for outcome in outcomes {
            if let Err(message) = outcome {
                failures += 1;
                self.note(format!("{check}: {message}"));
            }
        }
        self.report.rows.push(CheckRow {
            check,
            cases,
            worst: failures as f64,
            tolerance: 0.0,
            passed: failures == 0,
        });
    }

    fn note(&mut self, message: String) {
        if self.report.notes.len() < MAX_NOTES {
            self.report.notes.push(message);
        }
    }

    fn finish(self) -> SuiteReport {
        self.report
    }
}

fn err_string(error: SpectralError) -> String {
    error.to_string()
}

/// Runs one suite by name.
pub fn run_suite(name: &str, options: &VerifyOptions) -> Result<SuiteReport> {
    let report = match name {
        "roundtrip" => roundtrip(options),
        "reverse-roundtrip" => reverse_roundtrip(options),
        "single-pair" => single_pair(options),
        "algebraic" => algebraic(options),
        "weyl" => weyl(options),
        "residue-products" => residue_products(options),
        "determinant-identities" => determinant_identities(options),
        "starred-symmetry" => starred_symmetry(options),
        "pade" => pade(options),
        "dynamics" => dynamics(options),
        "positivity" => positivity(options),
        other => {
            return Err(SpectralError::Invalid(format!(
                "unknown suite `{other}`; expected one of: all, {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(report)
}

/// Runs every suite in criterion order.
pub fn run_all(options: &VerifyOptions) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .map(|name| run_suite(name, options).expect("listed suites exist"))
        .collect()
}

/// Draws `count` items sequentially from a per-suite stream.
fn draws<T>(
    options: &VerifyOptions,
    stream: u64,
    count: usize,
    mut make: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> T,
) -> Vec<T> {
    let mut rng = seeded(options.seed.wrapping_mul(1_000_003).wrapping_add(stream));
    (0..count).map(|_| make(&mut rng)).collect()
}

fn roundtrip(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("roundtrip", options);
    for k in 1..=5 {
        let configs = draws(options, 100 + k as u64, options.samples, |rng| {
            random_configuration(rng, k)
        });
        let outcomes = configs
            .par_iter()
            .map(|config| {
                let data = forward_map(config).map_err(err_string)?;
                let back = recover(&data).map_err(err_string)?;
                Ok(configuration_distance(&back, config))
            })
            .collect();
        builder.measured(format!("K={k}: recover(forward(p)) vs p"), 1e-8, outcomes);
    }
    builder.finish()
}

fn reverse_roundtrip(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("reverse-roundtrip", options);
    for k in 1..=4 {
        let data = draws(options, 200 + k as u64, options.samples, |rng| {
            random_spectral_data(rng, k)
        });
        let outcomes = data
            .par_iter()
            .map(|spectral| {
                let config = recover(spectral).map_err(err_string)?;
                let again = forward_map(&config).map_err(err_string)?;
                Ok(spectral_distance(&again, spectral))
            })
            .collect();
        builder.measured(format!("K={k}: forward(recover(r)) vs r"), 1e-8, outcomes);
    }
    builder.finish()
}

/// The configuration with interval data `g₁ = h₁ = 1`, `l₀ = l₂ = ½`.
pub fn single_pair_example() -> InterlacingConfiguration {
    let half_log3 = 0.5 * 3f64.ln();
    let mass = 3f64.sqrt() / 4.0;
    InterlacingConfiguration {
        k: 1,
        x: vec![-half_log3, half_log3],
        m_odd: vec![mass],
        n_even: vec![mass],
    }
}

/// Spectral data of [`single_pair_example`].
pub fn single_pair_spectral_example() -> SpectralData {
    SpectralData {
        lambda: vec![8.0],
        mu: vec![],
        a: vec![2.0],
        b: vec![],
        b_inf: 0.75,
        b_inf_star: 0.75,
    }
}

fn single_pair(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("single-pair", options);
    let config = single_pair_example();
    let expected = single_pair_spectral_example();
    let interval = config.to_interval().map_err(err_string).map(|meas| {
        [
            meas.g[0] - 1.0,
            meas.h[0] - 1.0,
            meas.l[0] - 0.5,
            meas.l[2] - 0.5,
        ]
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
    });
    builder.measured(
        "interval data g₁ = h₁ = 1, l₀ = l₂ = ½",
        1e-12,
        vec![interval],
    );
    let forward = forward_map(&config).map_err(err_string).map(|data| {
        let pairs = [
            (data.lambda[0], 8.0),
            (data.a[0], 2.0),
            (data.b_inf, 0.75),
            (data.b_inf_star, 0.75),
        ];
        pairs.iter().fold(0.0f64, |acc, (got, want)| {
            acc.max(((got - want) / want).abs())
        })
    });
    builder.measured(
        "forward map = (λ₁, a₁, b∞, b*∞) = (8, 2, 0.75, 0.75)",
        1e-12,
        vec![forward],
    );
    let inverse = recover_k1(&expected).map_err(err_string).map(|back| {
        back.x
            .iter()
            .zip(&config.x)
            .chain(back.m_odd.iter().zip(&config.m_odd))
            .chain(back.n_even.iter().zip(&config.n_even))
            .fold(0.0f64, |acc, (got, want)| acc.max((got - want).abs()))
    });
    builder.measured(
        "single-pair recovery = (-ln√3, ln√3, √3/4, √3/4)",
        1e-12,
        vec![inverse],
    );
    builder.finish()
}

fn algebraic(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("algebraic", options);
    let per_k = options.scaled(100, 3);
    for k in 1..=3 {
        let configs = draws(options, 400 + k as u64, per_k, |rng| {
            random_rational_configuration(rng, k)
        });
        let prepared: Vec<_> = configs
            .par_iter()
            .map(|data| {
                let meas = data.to_interval().map_err(err_string)?;
                Ok((
                    data.clone(),
                    transition_matrix(&meas, false),
                    transition_matrix(&meas, true),
                ))
            })
            .collect::<Vec<std::result::Result<_, String>>>();
        let check = |test: &(dyn Fn(&_) -> std::result::Result<(), String> + Sync)| -> Vec<std::result::Result<(), String>> {
            prepared
                .iter()
                .map(|item| item.as_ref().map_err(Clone::clone).and_then(|ok| test(ok)))
                .collect()
        };
        builder.exact(
            format!("K={k}: det T_j ≡ 1 for every partial product"),
            check(&|(_, direct, twin)| {
                let all = direct.partial.iter().chain(&twin.partial);
                all.enumerate().try_for_each(|(j, m)| {
                    (m.det() == Polynomial::one())
                        .then_some(())
                        .ok_or(format!("product {j}"))
                })
            }),
        );
        builder.exact(
            format!("K={k}: σ(T_j) = T̃_j for every j"),
            check(&|(_, direct, twin)| {
                direct
                    .partial
                    .iter()
                    .zip(&twin.partial)
                    .enumerate()
                    .try_for_each(|(j, (d, t))| {
                        let image = sigma_involution(d).map_err(err_string)?;
                        (image == *t).then_some(()).ok_or(format!("j = {j}"))
                    })
            }),
        );
        builder.exact(
            format!("K={k}: S₃₁(λ)S̃₁₁(-λ) - S₂₁(λ)S̃₂₁(-λ) + S₁₁(λ)S̃₃₁(-λ) ≡ 0"),
            check(&|(_, direct, twin)| {
                let (s, t) = (&direct.full, &twin.full.reflect());
                let value = &(&(s.get(2, 0) * t.get(0, 0)) - &(s.get(1, 0) * t.get(1, 0)))
                    + &(s.get(0, 0) * t.get(2, 0));
                value
                    .is_zero()
                    .then_some(())
                    .ok_or("nonzero polynomial".to_string())
            }),
        );
        builder.exact(
            format!("K={k}: entry degrees of T_j and T̃_j"),
            check(&|(_, direct, twin)| {
                (1..=k).try_for_each(|j| {
                    let ok = direct.partial[j].degrees() == expected_degrees(j, false)
                        && twin.partial[j].degrees() == expected_degrees(j, true);
                    ok.then_some(()).ok_or(format!("j = {j}"))
                })
            }),
        );
        builder.exact(
            format!("K={k}: minor sums = determinant and transition coefficients"),
            check(&|(data, _, _)| {
                let minors = conserved_from_minors(data);
                let ok = minors == conserved_from_determinants(data)
                    && minors == conserved_from_transition(data);
                ok.then_some(()).ok_or("coefficient mismatch".to_string())
            }),
        );
    }
    builder.finish()
}

fn weyl(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("weyl", options);
    let count = options.scaled(10, 4);
    let cases = draws(options, 500, count, |rng| {
        let k = 1 + rng.gen_range(0..4);
        let config = random_configuration(rng, k);
        let points: Vec<f64> = (0..100)
            .map(|_| {
                let magnitude = log_uniform(rng, 0.05, 50.0);
                if rng.gen_bool(0.5) {
                    magnitude
                } else {
                    -magnitude
                }
            })
            .collect();
        (config, points)
    });
    let outcomes: Vec<std::result::Result<(f64, f64), String>> = cases
        .par_iter()
        .map(|(config, points)| {
            let meas = config.to_interval().map_err(err_string)?;
            Ok(points
                .iter()
                .fold((0.0f64, 0.0f64), |(plain, starred), &point| {
                    let (p, s) = weyl_relation_residuals(
                        &weyl_from_transition(&meas, point),
                        &weyl_from_transition(&meas, -point),
                    );
                    (plain.max(p), starred.max(s))
                }))
        })
        .collect();
    builder.measured(
        "Z(λ) + W(λ)W̃(-λ) + Z̃(-λ) = 0, 100 points per configuration",
        1e-11,
        outcomes.iter().map(|o| o.clone().map(|v| v.0)).collect(),
    );
    builder.measured(
        "starred relation, 100 points per configuration",
        1e-11,
        outcomes.iter().map(|o| o.clone().map(|v| v.1)).collect(),
    );
    builder.finish()
}

fn relative(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn residue_products(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("residue-products", options);
    let per_k = options.scaled(10, 4);
    for k in 1..=5 {
        let configs = draws(options, 600 + k as u64, per_k, |rng| {
            random_configuration(rng, k)
        });
        let outcomes: Vec<std::result::Result<[f64; 3], String>> = configs
            .par_iter()
            .map(|config| {
                let data = forward_map(config).map_err(err_string)?;
                let meas = config.to_interval().map_err(err_string)?;
                let wide = config
                    .real_line()
                    .lift::<Wide>()
                    .to_interval()
                    .map_err(err_string)?;
                let read = transition_residues(&wide, &data.lambda, &data.mu);
                let lambda_side = residue_products_lambda(&data)
                    .iter()
                    .enumerate()
                    .map(|(i, p)| relative(read.a[i] * read.a_star[i], *p))
                    .fold(0.0, f64::max);
                let mu_side = residue_products_mu(&data)
                    .iter()
                    .enumerate()
                    .map(|(j, p)| relative(read.b[j] * read.b_star[j], *p))
                    .fold(0.0, f64::max);
                let boundary = relative(
                    data.b_inf * data.b_inf_star,
                    b_infinity_product(&meas, &data),
                );
                Ok([lambda_side, mu_side, boundary])
            })
            .collect();
        let column = |index: usize| {
            outcomes
                .iter()
                .map(|o| o.clone().map(|v| v[index]))
                .collect()
        };
        builder.measured(
            format!("K={k}: a_i a*_i against the product formula"),
            1e-10,
            column(0),
        );
        builder.measured(
            format!("K={k}: b_j b*_j against the product formula"),
            1e-10,
            column(1),
        );
        builder.measured(
            format!("K={k}: b∞ b*∞ against the gap formula"),
            1e-10,
            column(2),
        );
    }
    builder.finish()
}

fn determinant_identities(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("determinant-identities", options);
    let pairs = draws(options, 700, options.scaled(10, 4), |rng| {
        (random_measure(rng, 5), random_measure(rng, 5))
    });
    let outcomes = pairs
        .par_iter()
        .map(|(alpha, beta)| {
            let (alpha, beta) = (alpha.lift::<Wide>(), beta.lift::<Wide>());
            Ok(determinant_identity_suite(&alpha, &beta, 4).max_relative_residual())
        })
        .collect();
    builder.measured(
        "binary64 inputs, 256-bit evaluation, 5-atom measures, n ≤ 4",
        1e-10,
        outcomes,
    );
    let biorthogonality = pairs
        .par_iter()
        .map(|(alpha, beta)| {
            let (alpha, beta) = (alpha.lift::<Wide>(), beta.lift::<Wide>());
            let mut table = HeineTable::new(&alpha, &beta);
            let polys: Vec<_> = (0..=3)
                .map(|n| biorthogonal_pair(&alpha, &beta, n))
                .collect::<Result<_>>()
                .map_err(err_string)?;
            let mut worst: f64 = 0.0;
            for (i, (p, _)) in polys.iter().enumerate() {
                for (j, (_, q)) in polys.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((cauchy_pairing(&mut table, p, q).approx() - target).abs());
                }
            }
            Ok(worst)
        })
        .collect();
    builder.measured(
        "biorthogonality of (p_n, q_n), n ≤ 3",
        1e-10,
        biorthogonality,
    );
    let exact_pairs = draws(options, 701, options.scaled(100, 3), |rng| {
        (
            random_rational_measure(rng, 5),
            random_rational_measure(rng, 5),
        )
    });
    let exact = exact_pairs
        .par_iter()
        .map(|(alpha, beta)| {
            let report = determinant_identity_suite(alpha, beta, 3);
            match report.checks.iter().find(|c| !c.exact()) {
                None => Ok(()),
                Some(check) => Err(check.name.clone()),
            }
        })
        .collect();
    builder.exact("exact rational, 5-atom measures, n ≤ 3", exact);
    builder.finish()
}

fn starred_symmetry(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("starred-symmetry", options);
    let per_k = options.scaled(10, 4);
    for k in 1..=4 {
        let data = draws(options, 800 + k as u64, per_k, |rng| {
            random_spectral_data(rng, k)
        });
        let outcomes = data
            .par_iter()
            .map(|spectral| {
                let adjoint = adjoint_residues(spectral);
                let mut worst: f64 = 0.0;
                for n in 0..=k {
                    for m in 0..k {
                        for r in 0..=1 {
                            for s in 0..=1 {
                                let pair =
                                    starred_heine(spectral, &adjoint, HeineSumKey::new(n, m, r, s))
                                        .map_err(err_string)?;
                                worst = worst.max(pair.relative_difference());
                            }
                        }
                    }
                }
                Ok(worst)
            })
            .collect();
        builder.measured(
            format!("K={k}: direct starred sums vs closed form"),
            1e-10,
            outcomes,
        );
    }
    builder.finish()
}

fn pade(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("pade", options);
    let per_k = options.scaled(50, 3);
    for k in 1..=5 {
        let configs = draws(options, 900 + k as u64, per_k, |rng| {
            random_configuration(rng, k)
        });
        let outcomes: Vec<std::result::Result<[f64; 3], String>> = configs
            .par_iter()
            .map(|config| {
                let data = forward_map(config).map_err(err_string)?;
                let meas = config.to_interval().map_err(err_string)?;
                let (alpha, beta) = spectral_measures(&data);
                let series = weyl_series(&alpha, &beta, &data.b_inf, 2 * k + 2);
                let (mut agreement, mut orders, mut top) = (0.0f64, 0.0f64, 0.0f64);
                for j in 0..=k {
                    let from_det = pade_triple_accurate(&alpha, &beta, data.b_inf, j)
                        .map_err(err_string)?
                        .triple;
                    let from_matrix = triple_from_transition(&meas, j).map_err(err_string)?;
                    agreement = agreement.max(
                        from_det.max_coeff_difference(&from_matrix) / from_det.max_abs_coeff(),
                    );
                    if j > 0 {
                        let report = approximation_orders(&from_det, &series);
                        orders = orders.max(report.max_order_residual());
                        if j == k {
                            top = report.third_full_residual();
                        }
                    }
                }
                Ok([agreement, orders, top])
            })
            .collect();
        let column = |index: usize| {
            outcomes
                .iter()
                .map(|o| o.clone().map(|v| v[index]))
                .collect()
        };
        builder.measured(
            format!("K={k}: determinant triples vs transition triples"),
            1e-10,
            column(0),
        );
        builder.measured(
            format!("K={k}: approximation orders (Laurent coefficients)"),
            1e-10,
            column(1),
        );
        builder.measured(
            format!("K={k}: third residual at j=K, whole window"),
            1e-10,
            column(2),
        );
    }
    for k in 2..=4 {
        let cases = draws(options, 950 + k as u64, options.scaled(200, 2), |rng| {
            random_rational_spectral(rng, k)
        });
        let outcomes = cases
            .par_iter()
            .map(|(alpha, beta, b_inf)| {
                let series = weyl_series(alpha, beta, b_inf, 2 * k + 2);
                (1..=k).try_for_each(|j| {
                    let triple = pade_triple(alpha, beta, b_inf, j).map_err(err_string)?;
                    let report = approximation_orders(&triple, &series);
                    if report.max_order_residual() != 0.0 {
                        return Err(format!("order residual at j = {j}"));
                    }
                    if j == k && !report.third_is_exactly_zero() {
                        return Err("third residual at j = K".into());
                    }
                    Ok(())
                })
            })
            .collect();
        builder.exact(
            format!("K={k}: exact orders and exact third residual at j=K"),
            outcomes,
        );
    }
    builder.finish()
}

/// Sample times `0, 0.1, …, 1`.
pub fn unit_time_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

fn dynamics(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("dynamics", options);
    let per_k = options.scaled(200, 2);
    let times = unit_time_grid();
    for k in 1..=3 {
        let configs = draws(options, 1000 + k as u64, per_k, |rng| {
            random_configuration(rng, k)
        });
        let outcomes: Vec<std::result::Result<[f64; 4], String>> = configs
            .par_iter()
            .map(|config| {
                let samples = trajectories(config, &times).map_err(err_string)?;
                let (oracle, estimates) = integrate_rk4_checked(config, &times, 1e-4);
                let initial = conserved_coefficients(config).map_err(err_string)?;
                let (mut gap, mut drift, mut closed) = (0.0f64, 0.0f64, 0.0f64);
                for (sample, rk) in samples.iter().zip(&oracle) {
                    gap = gap.max(max_position_difference(&sample.config, rk));
                    let now = conserved_coefficients(&sample.config).map_err(err_string)?;
                    drift = drift.max(now.max_relative_drift(&initial));
                    if k == 1 {
                        let exact =
                            single_pair_closed_form(config, sample.t).map_err(err_string)?;
                        closed = closed.max(configuration_distance(&sample.config, &exact));
                    }
                }
                let richardson = estimates.iter().copied().fold(0.0, f64::max);
                Ok([gap, drift, closed, richardson])
            })
            .collect();
        let column = |index: usize| {
            outcomes
                .iter()
                .map(|o| o.clone().map(|v| v[index]))
                .collect()
        };
        builder.measured(
            format!("K={k}: spectral trajectory vs RK4 (max-norm of x)"),
            1e-6,
            column(0),
        );
        builder.measured(
            format!("K={k}: RK4 Richardson error estimate"),
            1e-7,
            column(3),
        );
        builder.measured(format!("K={k}: drift of [A]_k and [Ã]_k"), 1e-9, column(1));
        if k == 1 {
            builder.measured("K=1: trajectory vs closed form", 1e-10, column(2));
        }
    }
    builder.finish()
}

fn positivity(options: &VerifyOptions) -> SuiteReport {
    let mut builder = Builder::new("positivity", options);
    for k in 1..=6 {
        let configs = draws(options, 1100 + k as u64, options.samples, |rng| {
            random_configuration(rng, k)
        });
        let outcomes: Vec<std::result::Result<(), String>> = configs
            .par_iter()
            .map(|config| {
                let (lambda, mu) = eigenvalues(config).map_err(err_string)?;
                let simple = |v: &[f64]| {
                    v.first().map_or(true, |&x| x > 0.0) && v.windows(2).all(|w| w[0] < w[1])
                };
                if !simple(&lambda) || !simple(&mu) {
                    return Err("spectrum not positive and simple".into());
                }
                let data = forward_map(config).map_err(err_string)?;
                let positive = data
                    .a
                    .iter()
                    .chain(&data.b)
                    .chain([&data.b_inf, &data.b_inf_star])
                    .all(|v| *v > 0.0);
                positive.then_some(()).ok_or("nonpositive residue".into())
            })
            .collect();
        builder.exact(
            format!("K={k}: positive simple spectra and positive residues"),
            outcomes,
        );
    }
    for k in 1..=5 {
        let data = draws(options, 1200 + k as u64, options.samples, |rng| {
            random_spectral_data(rng, k)
        });
        let ordered = data
            .par_iter()
            .map(|spectral| {
                let config = recover(spectral).map_err(err_string)?;
                let ok = config.x.windows(2).all(|w| w[0] < w[1])
                    && config.m_odd.iter().chain(&config.n_even).all(|m| *m > 0.0);
                ok.then_some(())
                    .ok_or("unordered positions or nonpositive mass".into())
            })
            .collect();
        builder.exact(
            format!("K={k}: recovered positions ordered, masses positive"),
            ordered,
        );
        if k >= 2 {
            let inequalities = data
                .par_iter()
                .map(|spectral| {
                    let (alpha, beta) = spectral_measures(spectral);
                    match distance_inequalities(&alpha, &beta)
                        .into_iter()
                        .find(|(_, value)| *value <= 0.0)
                    {
                        None => Ok(()),
                        Some((label, value)) => Err(format!("{label}: {value:e}")),
                    }
                })
                .collect();
            builder.exact(format!("K={k}: distance inequalities"), inequalities);
        }
    }
    builder.finish()
}
