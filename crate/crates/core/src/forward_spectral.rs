//! The forward spectral map: eigenvalues, residues, adjoint residues and the
//! eight Weyl functions.
//!
//! Only the nonzero eigenvalues are stored. The interval problem also has the
//! eigenvalue zero (a factor `λ` in `S₃₁`), which is an artifact of the change
//! of variables and carries no information.
//!
//! Conventions on the real line, with `A(λ) = Π (1 - λ/λ_i)` and
//! `Ã(λ) = Π (1 - λ/μ_j)`:
//!
//! - `W = -B/A = Σ a_i/(λ - λ_i)`
//! - `Z = 1/(2λ) - C/(2A) = 1/(2λ) + Σ c_i/(λ - λ_i)`
//! - `W̃ = -B̃/Ã = -b∞ + Σ b_j/(λ - μ_j)`
//! - `Z̃ = 1/(2λ) + Σ d_j/(λ - μ_j)`
//!
//! and the starred functions have the same shapes with starred residues.

use nalgebra::DMatrix;
use num::{BigRational, One, Signed, Zero};
use serde::Serialize;

use crate::core_types::{
    AdjointResidues, InterlacingConfiguration, IntervalMeasures, RealLineData, SpectralData,
};
use crate::error::{Result, SpectralError};
use crate::linalg::{condition_number, Matrix};
use crate::poly::Polynomial;
use crate::scalar::{Scalar, Wide};
use crate::transition::{abc_at, abc_polynomials, transition_matrix, WeylNumerators};

/// Largest imaginary part, relative to the real part, accepted from the
/// eigen-solver before the spectrum is declared degenerate.
const IMAGINARY_TOLERANCE: f64 = 1e-8;

/// Smallest relative separation accepted between consecutive eigenvalues.
const SIMPLICITY_TOLERANCE: f64 = 1e-13;

/// `(I + 𝓛) 𝓜 𝓔 𝓝`, whose eigenvalues are `1/(2λ_i)`.
pub fn oscillatory_matrix(config: &InterlacingConfiguration) -> Matrix<f64> {
    let k = config.k;
    let decay =
        |odd: usize, even: usize| (-(config.x[2 * odd] - config.x[2 * even + 1]).abs()).exp();
    // Row i of (I + 𝓛) sums rows 0..=i of 𝓜𝓔𝓝.
    let mut running = vec![0.0; k];
    (0..k)
        .map(|i| {
            for (j, slot) in running.iter_mut().enumerate() {
                *slot += config.m_odd[i] * decay(i, j) * config.n_even[j];
            }
            running.clone()
        })
        .collect()
}

/// `(I' + 𝓛') 𝓝' (𝓔')ᵀ 𝓜'`, whose eigenvalues are `1/(2μ_j)`. Here `𝓔'` drops
/// the first odd site and the last even site.
pub fn twin_oscillatory_matrix(config: &InterlacingConfiguration) -> Matrix<f64> {
    let size = config.k - 1;
    let mut running = vec![0.0; size];
    (0..size)
        .map(|i| {
            // Even site 2(i+1) against odd site 2(j+1)+1, both 1-based.
            for (j, slot) in running.iter_mut().enumerate() {
                let decay = (-(config.x[2 * j + 2] - config.x[2 * i + 1]).abs()).exp();
                *slot += config.n_even[i] * decay * config.m_odd[j + 1];
            }
            running.clone()
        })
        .collect()
}

/// One Newton step at a time while the residual of `poly` keeps shrinking.
pub fn polish_root(poly: &Polynomial<f64>, guess: f64) -> f64 {
    let derivative = poly.derivative();
    let mut root = guess;
    let mut residual = poly.eval(&root).abs();
    for _ in 0..4 {
        let slope = derivative.eval(&root);
        if slope == 0.0 || residual == 0.0 {
            break;
        }
        let candidate = root - poly.eval(&root) / slope;
        let candidate_residual = poly.eval(&candidate).abs();
        if !(candidate_residual < residual) {
            break;
        }
        root = candidate;
        residual = candidate_residual;
    }
    root
}

fn spectrum_from_matrix(
    matrix: &Matrix<f64>,
    poly: &Polynomial<f64>,
    label: &str,
) -> Result<Vec<f64>> {
    let size = matrix.len();
    if size == 0 {
        return Ok(Vec::new());
    }
    let dense = DMatrix::from_fn(size, size, |r, c| matrix[r][c]);
    let degenerate = |what: String| {
        SpectralError::Degenerate(format!(
            "{label}: {what} (condition number {:.3e})",
            condition_number(matrix)
        ))
    };
    let mut values = Vec::with_capacity(size);
    for nu in dense.complex_eigenvalues().iter() {
        if !(nu.re > 0.0) || nu.im.abs() > IMAGINARY_TOLERANCE * nu.re {
            return Err(degenerate(format!(
                "eigenvalue {nu} is not real and positive"
            )));
        }
        values.push(polish_root(poly, 0.5 / nu.re));
    }
    values.sort_by(|a, b| a.total_cmp(b));
    for pair in values.windows(2) {
        if pair[1] - pair[0] <= SIMPLICITY_TOLERANCE * pair[1] {
            return Err(degenerate(format!(
                "eigenvalues {} and {} coincide",
                pair[0], pair[1]
            )));
        }
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(degenerate(format!(
            "polished eigenvalue {bad} is not positive"
        )));
    }
    Ok(values)
}

/// The spectra `(λ_1..λ_K, μ_1..μ_{K-1})`, sorted ascending.
pub fn eigenvalues(config: &InterlacingConfiguration) -> Result<(Vec<f64>, Vec<f64>)> {
    config.validate()?;
    let data = config.real_line();
    let direct = abc_polynomials(&data, false);
    let twin = abc_polynomials(&data, true);
    let lambda = spectrum_from_matrix(&oscillatory_matrix(config), &direct.a, "lambda")?;
    let mu = spectrum_from_matrix(&twin_oscillatory_matrix(config), &twin.a, "mu")?;
    Ok((lambda, mu))
}

/// `A'(z_i)` for `A(λ) = Π (1 - λ/z_k)`, from the factored form.
pub fn factored_derivative(roots: &[f64], index: usize) -> f64 {
    let root = roots[index];
    let others: f64 = roots
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != index)
        .map(|(_, z)| 1.0 - root / z)
        .product();
    -others / root
}

/// Residues and boundary constants of the forward map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residues {
    /// Eigenvalues after exact refinement.
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub b_inf: f64,
    pub b_inf_star: f64,
}

/// `b∞` in real-line form: `n_{2K} e^{x_{2K}} (1 - E²_{2K-1,2K})`, or
/// `n_2 e^{x_2}` for a single pair.
pub fn b_infinity(config: &InterlacingConfiguration) -> f64 {
    let last = config.x.len() - 1;
    let n_last = config.n_even[config.k - 1];
    if config.k == 1 {
        n_last * config.x[last].exp()
    } else {
        let gap = config.x[last] - config.x[last - 1];
        n_last * config.x[last].exp() * -(-2.0 * gap).exp_m1()
    }
}

/// `b*∞` in real-line form: `m_1 e^{-x_1} (1 - E²_{12})`, or `m_1 e^{-x_1}`
/// for a single pair.
pub fn b_infinity_star(config: &InterlacingConfiguration) -> f64 {
    let m_first = config.m_odd[0];
    if config.k == 1 {
        m_first * (-config.x[0]).exp()
    } else {
        let gap = config.x[1] - config.x[0];
        m_first * (-config.x[0]).exp() * -(-2.0 * gap).exp_m1()
    }
}

/// `b∞ = h_K l_{2K-1}/(l_{2K} + l_{2K-1})` (`h_1 (l_0 + l_1)/2` when `K = 1`).
pub fn b_infinity_interval(meas: &IntervalMeasures) -> f64 {
    let k = meas.k();
    if k == 1 {
        meas.h[0] * (meas.l[0] + meas.l[1]) / 2.0
    } else {
        meas.h[k - 1] * meas.l[2 * k - 1] / (meas.l[2 * k] + meas.l[2 * k - 1])
    }
}

/// `b*∞ = g_1 l_1/(l_0 + l_1)` (`g_1 (l_1 + l_2)/2` when `K = 1`).
pub fn b_infinity_star_interval(meas: &IntervalMeasures) -> f64 {
    if meas.k() == 1 {
        meas.g[0] * (meas.l[1] + meas.l[2]) / 2.0
    } else {
        meas.g[0] * meas.l[1] / (meas.l[0] + meas.l[1])
    }
}

/// Lifts binary64 real-line data to [`Wide`] without rounding.
pub fn wide_real_line(data: &RealLineData<f64>) -> RealLineData<Wide> {
    data.lift()
}

/// The root of `A` (or `Ã`) near `guess` and the residue `-B/A'` there.
///
/// Near the largest eigenvalues `B` is a small difference of large terms,
/// so binary64 evaluation loses most of its digits there. Both steps run in
/// [`Wide`] precision: one Newton step on `A` from the binary64 guess, which
/// leaves an error quadratic in the guess error, then the ratio at the
/// refined root.
pub fn accurate_residue(data: &RealLineData<Wide>, guess: f64, twin: bool) -> (f64, f64) {
    let unit = Wide::one();
    let start = Wide::from_float(guess);
    let at_start = abc_at(data, &start, twin, &unit);
    if at_start.slope[0].is_zero() {
        return (guess, f64::NAN);
    }
    let root = &start - &at_start.value[0] / &at_start.slope[0];
    let at_root = abc_at(data, &root, twin, &unit);
    if at_root.slope[0].is_zero() {
        return (guess, f64::NAN);
    }
    let residue = -(&at_root.value[1] / &at_root.slope[0]);
    (root.approx(), residue.approx())
}

/// Refined eigenvalues, residues `a_i = -B(λ_i)/A'(λ_i)`,
/// `b_j = -B̃(μ_j)/Ã'(μ_j)` (see [`accurate_residue`]) and the two boundary
/// constants.
pub fn residues(config: &InterlacingConfiguration, lambda: &[f64], mu: &[f64]) -> Result<Residues> {
    let data = wide_real_line(&config.real_line());
    let (lambda, a): (Vec<f64>, Vec<f64>) = lambda
        .iter()
        .map(|z| accurate_residue(&data, *z, false))
        .unzip();
    let (mu, b): (Vec<f64>, Vec<f64>) =
        mu.iter().map(|z| accurate_residue(&data, *z, true)).unzip();
    let result = Residues {
        lambda,
        mu,
        a,
        b,
        b_inf: b_infinity(config),
        b_inf_star: b_infinity_star(config),
    };
    for (name, values) in [("a", &result.a), ("b", &result.b)] {
        if let Some(i) = values.iter().position(|v| !(*v > 0.0)) {
            return Err(SpectralError::Consistency(format!(
                "residue {name}[{i}] = {} is not positive; eigenvalues and residues disagree",
                values[i]
            )));
        }
    }
    Ok(result)
}

/// The forward spectral map.
pub fn forward_map(config: &InterlacingConfiguration) -> Result<SpectralData> {
    let (lambda, mu) = eigenvalues(config)?;
    let Residues {
        lambda,
        mu,
        a,
        b,
        b_inf,
        b_inf_star,
    } = residues(config, &lambda, &mu)?;
    Ok(SpectralData {
        lambda,
        mu,
        a,
        b,
        b_inf,
        b_inf_star,
    })
}

/// Closed forms for `a_k a*_k` (`λ_1/2` when `K = 1`).
pub fn residue_products_lambda(data: &SpectralData) -> Vec<f64> {
    let lambda = &data.lambda;
    (0..lambda.len())
        .map(|k| {
            let lk = lambda[k];
            let numerator: f64 = lk * data.mu.iter().map(|m| 1.0 + lk / m).product::<f64>();
            let denominator: f64 = 2.0
                * lambda
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != k)
                    .map(|(_, li)| (1.0 - lk / li).powi(2))
                    .product::<f64>();
            numerator / denominator
        })
        .collect()
}

/// Closed forms for `b_k b*_k`.
pub fn residue_products_mu(data: &SpectralData) -> Vec<f64> {
    let mu = &data.mu;
    (0..mu.len())
        .map(|k| {
            let mk = mu[k];
            let numerator: f64 = mk * data.lambda.iter().map(|l| 1.0 + mk / l).product::<f64>();
            let denominator: f64 = 2.0
                * mu.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, mj)| (1.0 - mk / mj).powi(2))
                    .product::<f64>();
            numerator / denominator
        })
        .collect()
}

/// `b∞ b*∞` from gaps and spectra.
pub fn b_infinity_product(meas: &IntervalMeasures, data: &SpectralData) -> f64 {
    let k = meas.k();
    if k == 1 {
        return (meas.l[0] + meas.l[1]) * (meas.l[1] + meas.l[2])
            / (2.0 * meas.l[0] * meas.l[2] * data.lambda[0]);
    }
    let odd_gaps: f64 = meas.l.iter().skip(1).step_by(2).product();
    let even_gaps: f64 = meas.l.iter().step_by(2).product();
    odd_gaps / even_gaps * data.mu_product() / data.lambda_product()
}

/// Adjoint residues from the closed product forms, with `c_i`, `d_j` from the
/// residue relations.
pub fn adjoint_residues(data: &SpectralData) -> AdjointResidues {
    let a_star = residue_products_lambda(data)
        .iter()
        .zip(&data.a)
        .map(|(p, a)| p / a)
        .collect();
    let b_star = residue_products_mu(data)
        .iter()
        .zip(&data.b)
        .map(|(p, b)| p / b)
        .collect();
    let (c, d) = z_residues(&data.lambda, &data.mu, &data.a, &data.b, data.b_inf);
    AdjointResidues {
        a_star,
        b_star,
        c,
        d,
    }
}

/// `c_i = a_i b∞ + Σ_j a_i b_j/(λ_i + μ_j)` and `d_j = Σ_i a_i b_j/(λ_i + μ_j)`.
pub fn z_residues(
    lambda: &[f64],
    mu: &[f64],
    a: &[f64],
    b: &[f64],
    b_inf: f64,
) -> (Vec<f64>, Vec<f64>) {
    let c = (0..lambda.len())
        .map(|i| {
            a[i] * b_inf
                + (0..mu.len())
                    .map(|j| a[i] * b[j] / (lambda[i] + mu[j]))
                    .sum::<f64>()
        })
        .collect();
    let d = (0..mu.len())
        .map(|j| {
            (0..lambda.len())
                .map(|i| a[i] * b[j] / (lambda[i] + mu[j]))
                .sum()
        })
        .collect();
    (c, d)
}

/// Residues of `W`, `W̃`, `W*`, `W̃*` read off the interval transition
/// matrices: `a = -S₂₁/S₃₁'`, `a* = -S₃₂/S₃₁'` at `λ_i`, and the twin
/// analogues at `μ_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionResidues {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub a_star: Vec<f64>,
    pub b_star: Vec<f64>,
}

/// Computes [`TransitionResidues`] independently of the closed forms, in
/// the arithmetic of `meas`. Binary64 evaluation cancels badly near the
/// largest eigenvalues once `K ≥ 3`; lifting the measures to [`Wide`]
/// avoids that.
pub fn transition_residues<T: Scalar>(
    meas: &IntervalMeasures<T>,
    lambda: &[f64],
    mu: &[f64],
) -> TransitionResidues {
    let direct = transition_matrix(meas, false).full;
    let twin = transition_matrix(meas, true).full;
    // Each point is moved by one Newton step on S₃₁ before reading, so the
    // ratio is taken at the eigenvalue of `meas` itself.
    let read = |matrix: &crate::transition::PolynomialMatrix<T>,
                points: &[f64],
                row: usize,
                col: usize| {
        let slope = matrix.get(2, 0).derivative();
        points
            .iter()
            .map(|z| {
                let guess = T::from_float(*z);
                let point = guess.clone() - matrix.get(2, 0).eval(&guess) / slope.eval(&guess);
                (-(matrix.get(row, col).eval(&point) / slope.eval(&point))).approx()
            })
            .collect::<Vec<f64>>()
    };
    TransitionResidues {
        a: read(&direct, lambda, 1, 0),
        b: read(&twin, mu, 1, 0),
        a_star: read(&direct, lambda, 2, 1),
        b_star: read(&twin, mu, 2, 1),
    }
}

/// A rational function `constant + [1/(2λ)] + Σ residue/(λ - pole)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialFractions {
    pub poles: Vec<f64>,
    pub residues: Vec<f64>,
    pub constant: f64,
    /// Whether the term `1/(2λ)` is present.
    pub half_reciprocal: bool,
}

impl PartialFractions {
    pub fn eval(&self, point: f64) -> f64 {
        let tail: f64 = self
            .poles
            .iter()
            .zip(&self.residues)
            .map(|(p, r)| r / (point - p))
            .sum();
        let reciprocal = if self.half_reciprocal {
            0.5 / point
        } else {
            0.0
        };
        self.constant + reciprocal + tail
    }

    /// Every pole, including zero when the `1/(2λ)` term is present.
    pub fn all_poles(&self) -> impl Iterator<Item = f64> + '_ {
        self.poles
            .iter()
            .copied()
            .chain(self.half_reciprocal.then_some(0.0))
    }
}

/// The eight Weyl functions in partial-fraction form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylFunctionSet {
    pub w: PartialFractions,
    pub z: PartialFractions,
    pub w_twin: PartialFractions,
    pub z_twin: PartialFractions,
    pub w_star: PartialFractions,
    pub z_star: PartialFractions,
    pub w_twin_star: PartialFractions,
    pub z_twin_star: PartialFractions,
}

/// Values of the eight Weyl functions at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylValues {
    pub w: f64,
    pub z: f64,
    pub w_twin: f64,
    pub z_twin: f64,
    pub w_star: f64,
    pub z_star: f64,
    pub w_twin_star: f64,
    pub z_twin_star: f64,
}

/// Assembles [`WeylFunctionSet`] from spectral and adjoint data.
pub fn weyl_functions(data: &SpectralData, adjoint: &AdjointResidues) -> WeylFunctionSet {
    let (c_star, d_star) = z_residues(
        &data.lambda,
        &data.mu,
        &adjoint.a_star,
        &adjoint.b_star,
        data.b_inf_star,
    );
    let on_lambda = |residues: &[f64], constant: f64, half_reciprocal: bool| PartialFractions {
        poles: data.lambda.clone(),
        residues: residues.to_vec(),
        constant,
        half_reciprocal,
    };
    let on_mu = |residues: &[f64], constant: f64, half_reciprocal: bool| PartialFractions {
        poles: data.mu.clone(),
        residues: residues.to_vec(),
        constant,
        half_reciprocal,
    };
    WeylFunctionSet {
        w: on_lambda(&data.a, 0.0, false),
        z: on_lambda(&adjoint.c, 0.0, true),
        w_twin: on_mu(&data.b, -data.b_inf, false),
        z_twin: on_mu(&adjoint.d, 0.0, true),
        w_star: on_lambda(&adjoint.a_star, 0.0, false),
        z_star: on_lambda(&c_star, 0.0, true),
        w_twin_star: on_mu(&adjoint.b_star, -data.b_inf_star, false),
        z_twin_star: on_mu(&d_star, 0.0, true),
    }
}

/// Minimum distance from a pole accepted by [`weyl_eval`].
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Evaluates all eight Weyl functions by partial fractions.
pub fn weyl_eval(data: &SpectralData, adjoint: &AdjointResidues, point: f64) -> Result<WeylValues> {
    let set = weyl_functions(data, adjoint);
    for pole in set.z.all_poles().chain(set.z_twin.all_poles()) {
        if (point - pole).abs() <= POLE_TOLERANCE {
            return Err(SpectralError::NearPole { point, pole });
        }
    }
    Ok(WeylValues {
        w: set.w.eval(point),
        z: set.z.eval(point),
        w_twin: set.w_twin.eval(point),
        z_twin: set.z_twin.eval(point),
        w_star: set.w_star.eval(point),
        z_star: set.z_star.eval(point),
        w_twin_star: set.w_twin_star.eval(point),
        z_twin_star: set.z_twin_star.eval(point),
    })
}

/// Evaluates all eight Weyl functions as ratios of transition-matrix entries:
/// `W = -S₂₁/S₃₁`, `Z = -S₁₁/S₃₁`, `W* = -S₃₂/S₃₁`, `Z* = -S₃₃/S₃₁` and the
/// twin analogues.
pub fn weyl_from_transition(meas: &IntervalMeasures, point: f64) -> WeylValues {
    let direct = transition_matrix(meas, false).full.eval(&point);
    let twin = transition_matrix(meas, true).full.eval(&point);
    WeylValues {
        w: -direct[1][0] / direct[2][0],
        z: -direct[0][0] / direct[2][0],
        w_twin: -twin[1][0] / twin[2][0],
        z_twin: -twin[0][0] / twin[2][0],
        w_star: -direct[2][1] / direct[2][0],
        z_star: -direct[2][2] / direct[2][0],
        w_twin_star: -twin[2][1] / twin[2][0],
        z_twin_star: -twin[2][2] / twin[2][0],
    }
}

/// Relative residuals of `Z(λ) + W(λ) W̃(-λ) + Z̃(-λ) = 0` and its starred
/// counterpart, given values at `λ` and at `-λ`. Each residual is divided by
/// the sum of the magnitudes of its three terms.
pub fn weyl_relation_residuals(at: &WeylValues, reflected: &WeylValues) -> (f64, f64) {
    let relative = |terms: [f64; 3]| {
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        (terms.iter().sum::<f64>()).abs() / scale.max(f64::MIN_POSITIVE)
    };
    (
        relative([at.z, at.w * reflected.w_twin, reflected.z_twin]),
        relative([
            at.z_star,
            at.w_star * reflected.w_twin_star,
            reflected.z_twin_star,
        ]),
    )
}

fn remainder(
    numerator: &Polynomial<BigRational>,
    divisor: &Polynomial<BigRational>,
) -> Polynomial<BigRational> {
    let divisor_degree = divisor.degree().expect("nonzero divisor");
    let lead = divisor.leading();
    let mut rest = numerator.clone();
    while let Some(degree) = rest.degree() {
        if degree < divisor_degree {
            break;
        }
        let factor = rest.leading() / lead.clone();
        rest = &rest - &divisor.scale(&factor).shift_up(degree - divisor_degree);
    }
    rest
}

fn sturm_chain(poly: &Polynomial<BigRational>) -> Vec<Polynomial<BigRational>> {
    let mut chain = vec![poly.clone(), poly.derivative()];
    while chain.last().is_some_and(|p| p.degree().unwrap_or(0) > 0) {
        let len = chain.len();
        let next = -&remainder(&chain[len - 2], &chain[len - 1]);
        if next.is_zero() {
            break;
        }
        chain.push(next);
    }
    chain
}

fn sign_changes(chain: &[Polynomial<BigRational>], point: &BigRational) -> usize {
    let signs: Vec<bool> = chain
        .iter()
        .map(|p| p.eval(point))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Isolates the positive real roots of a squarefree rational polynomial by
/// Sturm sequences and exact bisection, shrinking each bracket until its width
/// is at most `relative_width` times its left end. Returns the brackets in
/// ascending order.
pub fn isolate_positive_roots(
    poly: &Polynomial<BigRational>,
    relative_width: f64,
) -> Vec<(BigRational, BigRational)> {
    let Some(degree) = poly.degree() else {
        return Vec::new();
    };
    if degree == 0 {
        return Vec::new();
    }
    let chain = sturm_chain(poly);
    let lead = poly.leading().abs();
    let bound = poly
        .coeffs()
        .iter()
        .take(degree)
        .fold(BigRational::zero(), |acc, c| {
            acc.max(c.abs() / lead.clone())
        })
        + BigRational::from_int(1);
    let count =
        |lo: &BigRational, hi: &BigRational| sign_changes(&chain, lo) - sign_changes(&chain, hi);
    let two = BigRational::from_int(2);
    let width = <BigRational as Scalar>::from_float(relative_width);
    let mut pending = vec![(BigRational::zero(), bound)];
    let mut brackets = Vec::new();
    while let Some((lo, hi)) = pending.pop() {
        match count(&lo, &hi) {
            0 => {}
            1 if lo.is_positive() && hi.clone() - lo.clone() <= width.clone() * lo.clone() => {
                brackets.push((lo, hi));
            }
            _ => {
                let mid = (lo.clone() + hi.clone()) / two.clone();
                pending.push((lo, mid.clone()));
                pending.push((mid, hi));
            }
        }
    }
    brackets.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("rationals are ordered"));
    brackets
}

/// Exact-arithmetic spectra: roots of `A` and `Ã` isolated by Sturm
/// sequences, returned as bracket midpoints.
pub fn exact_spectra(
    data: &RealLineData<BigRational>,
    relative_width: f64,
) -> (Vec<f64>, Vec<f64>) {
    let midpoints = |poly: &Polynomial<BigRational>| {
        isolate_positive_roots(poly, relative_width)
            .into_iter()
            .map(|(lo, hi)| ((lo + hi) / BigRational::from_int(2)).approx())
            .collect()
    };
    (
        midpoints(&abc_polynomials(data, false).a),
        midpoints(&abc_polynomials(data, true).a),
    )
}

/// `(b∞, b*∞)` from real-line data in any arithmetic: `n_{2K} q_{2K}
/// (1 - (q_{2K-1}/q_{2K})²)` and `(m_1/q_1) (1 - (q_1/q_2)²)`, without the
/// bracketed factors for a single pair.
pub fn boundary_constants<T: Scalar>(data: &RealLineData<T>) -> (T, T) {
    let k = data.k();
    let q = &data.exp_x;
    let last = q.len() - 1;
    let mut b_inf = data.n_even[k - 1].clone() * q[last].clone();
    let mut b_inf_star = data.m_odd[0].clone() / q[0].clone();
    if k > 1 {
        let right = q[last - 1].clone() / q[last].clone();
        let left = q[0].clone() / q[1].clone();
        b_inf = b_inf * (T::one() - right.clone() * right);
        b_inf_star = b_inf_star * (T::one() - left.clone() * left);
    }
    (b_inf, b_inf_star)
}

/// The forward map of rational real-line data: the spectral polynomials and
/// both boundary constants exactly, and the (irrational) eigenvalues and
/// residues to within a relative bracket width.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactForward {
    pub numerators: WeylNumerators<BigRational>,
    pub twin_numerators: WeylNumerators<BigRational>,
    pub b_inf: BigRational,
    pub b_inf_star: BigRational,
    /// Eigenvalues at bracket midpoints; residues `-B/A'` evaluated exactly
    /// there and rounded.
    pub approximate: SpectralData,
}

/// Computes [`ExactForward`], isolating eigenvalues to `relative_width`.
pub fn exact_forward_map(
    data: &RealLineData<BigRational>,
    relative_width: f64,
) -> Result<ExactForward> {
    data.validate()?;
    let numerators = abc_polynomials(data, false);
    let twin_numerators = abc_polynomials(data, true);
    let (b_inf, b_inf_star) = boundary_constants(data);
    let spectrum = |polys: &WeylNumerators<BigRational>| -> (Vec<f64>, Vec<f64>) {
        let slope = polys.a.derivative();
        isolate_positive_roots(&polys.a, relative_width)
            .into_iter()
            .map(|(lo, hi)| {
                let mid = (lo + hi) / BigRational::from_int(2);
                let residue = -(polys.b.eval(&mid) / slope.eval(&mid));
                (mid.approx(), residue.approx())
            })
            .unzip()
    };
    let (lambda, a) = spectrum(&numerators);
    let (mu, b) = spectrum(&twin_numerators);
    if lambda.len() != data.k() || mu.len() + 1 != data.k() {
        return Err(SpectralError::Degenerate(format!(
            "found {} and {} positive roots, expected {} and {}",
            lambda.len(),
            mu.len(),
            data.k(),
            data.k() - 1
        )));
    }
    let approximate = SpectralData {
        lambda,
        mu,
        a,
        b,
        b_inf: b_inf.approx(),
        b_inf_star: b_inf_star.approx(),
    };
    Ok(ExactForward {
        numerators,
        twin_numerators,
        b_inf,
        b_inf_star,
        approximate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse_spectral::spectral_distance;
    use crate::scalar::ratio;

    fn unit_example() -> InterlacingConfiguration {
        let x = 3f64.sqrt().ln();
        let mass = 3f64.sqrt() / 4.0;
        InterlacingConfiguration::new(vec![-x, x], vec![mass], vec![mass]).unwrap()
    }

    fn sample(k: usize) -> InterlacingConfiguration {
        let x: Vec<f64> = (0..2 * k)
            .map(|i| -1.7 + 0.55 * i as f64 + 0.07 * (i * i) as f64)
            .collect();
        let m = (0..k).map(|i| 0.4 + 0.9 * i as f64).collect();
        let n = (0..k).map(|i| 2.1 - 0.3 * i as f64).collect();
        InterlacingConfiguration::new(x, m, n).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs())
    }

    #[test]
    fn single_pair_closed_forms() {
        let data = forward_map(&unit_example()).unwrap();
        assert!(data.mu.is_empty() && data.b.is_empty());
        assert!(close(data.lambda[0], 8.0, 1e-13));
        assert!(close(data.a[0], 2.0, 1e-13));
        assert!(close(data.b_inf, 0.75, 1e-13));
        assert!(close(data.b_inf_star, 0.75, 1e-13));
        let adjoint = adjoint_residues(&data);
        assert!(close(adjoint.a_star[0], 2.0, 1e-13));
    }

    #[test]
    fn spectra_scale_inversely_with_masses() {
        let config = sample(4);
        let (lambda, mu) = eigenvalues(&config).unwrap();
        let scaled = InterlacingConfiguration::new(
            config.x.clone(),
            config.m_odd.iter().map(|m| m * 3.0).collect(),
            config.n_even.iter().map(|n| n * 3.0).collect(),
        )
        .unwrap();
        let (lambda_s, mu_s) = eigenvalues(&scaled).unwrap();
        for (a, b) in lambda.iter().zip(&lambda_s) {
            assert!(close(*a, 9.0 * b, 1e-12));
        }
        for (a, b) in mu.iter().zip(&mu_s) {
            assert!(close(*a, 9.0 * b, 1e-12));
        }
    }

    #[test]
    fn eigenvalues_agree_with_exact_root_isolation() {
        let data = RealLineData {
            exp_x: vec![ratio(1, 3), ratio(1, 1), ratio(3, 2), ratio(4, 1)],
            m_odd: vec![ratio(2, 1), ratio(1, 2)],
            n_even: vec![ratio(3, 4), ratio(5, 3)],
        };
        let config = InterlacingConfiguration::new(
            data.exp_x.iter().map(|q| q.approx().ln()).collect(),
            data.m_odd.iter().map(Scalar::approx).collect(),
            data.n_even.iter().map(Scalar::approx).collect(),
        )
        .unwrap();
        let (lambda, mu) = eigenvalues(&config).unwrap();
        let (exact_lambda, exact_mu) = exact_spectra(&data, 1e-15);
        assert_eq!(lambda.len(), exact_lambda.len());
        assert_eq!(mu.len(), exact_mu.len());
        for (a, b) in lambda
            .iter()
            .zip(&exact_lambda)
            .chain(mu.iter().zip(&exact_mu))
        {
            assert!(close(*a, *b, 1e-12), "{a} vs {b}");
        }
    }

    #[test]
    fn b_infinity_forms_agree() {
        for k in 1..=4 {
            let config = sample(k);
            let meas = config.to_interval().unwrap();
            assert!(close(
                b_infinity(&config),
                b_infinity_interval(&meas),
                1e-12
            ));
            assert!(close(
                b_infinity_star(&config),
                b_infinity_star_interval(&meas),
                1e-12
            ));
            let twin = abc_polynomials(&config.real_line(), true);
            assert!(close(
                b_infinity(&config),
                twin.b.leading() / twin.a.leading(),
                1e-12
            ));
        }
    }

    #[test]
    fn exact_forward_agrees_with_binary64() {
        let mut rng = crate::sampling::seeded(3);
        for k in 1..=4 {
            let exact = crate::sampling::random_rational_configuration(&mut rng, k);
            let x: Vec<f64> = exact.exp_x.iter().map(|q| q.approx().ln()).collect();
            let approx = |v: &[BigRational]| v.iter().map(Scalar::approx).collect::<Vec<f64>>();
            let config =
                InterlacingConfiguration::new(x, approx(&exact.m_odd), approx(&exact.n_even))
                    .unwrap();
            let float = forward_map(&config).unwrap();
            let result = exact_forward_map(&exact, 1e-20).unwrap();
            assert!(
                spectral_distance(&float, &result.approximate) < 1e-10,
                "K={k}"
            );
            let (b_inf, b_inf_star) = boundary_constants(&exact);
            assert_eq!(
                b_inf,
                result.twin_numerators.b.leading() / result.twin_numerators.a.leading()
            );
            assert_eq!((b_inf, b_inf_star), (result.b_inf, result.b_inf_star));
        }
    }

    #[test]
    fn residue_products_match_transition_residues() {
        for k in 1..=5 {
            let config = sample(k);
            let data = forward_map(&config).unwrap();
            let meas = config.to_interval().unwrap();
            let from_matrix = transition_residues(&meas, &data.lambda, &data.mu);
            let closed_lambda = residue_products_lambda(&data);
            let closed_mu = residue_products_mu(&data);
            for i in 0..k {
                assert!(close(data.a[i], from_matrix.a[i], 1e-10));
                assert!(close(
                    data.a[i] * from_matrix.a_star[i],
                    closed_lambda[i],
                    1e-10
                ));
            }
            for j in 0..k - 1 {
                assert!(close(data.b[j], from_matrix.b[j], 1e-10));
                assert!(close(
                    data.b[j] * from_matrix.b_star[j],
                    closed_mu[j],
                    1e-10
                ));
            }
            assert!(close(
                data.b_inf * data.b_inf_star,
                b_infinity_product(&meas, &data),
                1e-10
            ));
        }
    }

    #[test]
    fn weyl_functions_agree_and_satisfy_relations() {
        for k in 1..=4 {
            let config = sample(k);
            let data = forward_map(&config).unwrap();
            let adjoint = adjoint_residues(&data);
            let meas = config.to_interval().unwrap();
            for point in [0.013, 0.37, 2.9, -0.21, -5.5] {
                let fractions = weyl_eval(&data, &adjoint, point).unwrap();
                let matrix = weyl_from_transition(&meas, point);
                for (a, b) in [
                    (fractions.w, matrix.w),
                    (fractions.z, matrix.z),
                    (fractions.w_twin, matrix.w_twin),
                    (fractions.z_twin, matrix.z_twin),
                    (fractions.w_star, matrix.w_star),
                    (fractions.z_star, matrix.z_star),
                    (fractions.w_twin_star, matrix.w_twin_star),
                    (fractions.z_twin_star, matrix.z_twin_star),
                ] {
                    assert!(close(a, b, 1e-9), "K={k} at {point}: {a} vs {b}");
                }
                let reflected = weyl_from_transition(&meas, -point);
                let (plain, starred) = weyl_relation_residuals(&matrix, &reflected);
                assert!(plain < 1e-11 && starred < 1e-11, "{plain} {starred}");
            }
        }
    }

    #[test]
    fn near_pole_evaluation_is_rejected() {
        let data = forward_map(&sample(2)).unwrap();
        let adjoint = adjoint_residues(&data);
        assert!(matches!(
            weyl_eval(&data, &adjoint, data.lambda[1]),
            Err(SpectralError::NearPole { .. })
        ));
        assert!(weyl_eval(&data, &adjoint, 0.0).is_err());
        let far = weyl_eval(&data, &adjoint, 1e8).unwrap();
        assert!(far.w.abs() < 2.0 * data.a.iter().sum::<f64>() / 1e8);
    }

    #[test]
    fn reflection_exchanges_plain_and_starred_data() {
        let config = sample(3);
        let reflected = InterlacingConfiguration::new(
            config.x.iter().rev().map(|x| -x).collect(),
            config.n_even.iter().rev().copied().collect(),
            config.m_odd.iter().rev().copied().collect(),
        )
        .unwrap();
        let data = forward_map(&config).unwrap();
        let adjoint = adjoint_residues(&data);
        let mirror = forward_map(&reflected).unwrap();
        for i in 0..3 {
            assert!(close(data.lambda[i], mirror.lambda[i], 1e-12));
            assert!(close(adjoint.a_star[i], mirror.a[i], 1e-10));
        }
        for j in 0..2 {
            assert!(close(data.mu[j], mirror.mu[j], 1e-12));
            assert!(close(adjoint.b_star[j], mirror.b[j], 1e-10));
        }
        assert!(close(data.b_inf_star, mirror.b_inf, 1e-12));
        assert!(close(data.b_inf, mirror.b_inf_star, 1e-12));
    }
}
