//! Peakon time evolution.
//!
//! In spectral coordinates the flow is trivial: eigenvalues and the two
//! boundary constants stay fixed while each residue grows like
//! `a_i(t) = a_i(0) e^{t/λ_i}`, `b_j(t) = b_j(0) e^{t/μ_j}`. A trajectory
//! sample is therefore `recover(evolve_spectral(forward_map(p0), t))`,
//! computed independently for every requested time.
//!
//! The module also holds the peakon ODE right-hand side with a fixed-step
//! RK4 integrator (an oracle that shares no code with the spectral maps) and
//! the coefficients of `A(λ)` and `Ã(λ)`, which are constants of motion,
//! computed by minor sums over half-strictly interlacing index sets.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::core_types::{InterlacingConfiguration, RealLineData, SpectralData};
use crate::error::{Result, SpectralError};
use crate::forward_spectral::forward_map;
use crate::inverse_spectral::recover;
use crate::linalg::{determinant, submatrix, Matrix};
use crate::scalar::Scalar;
use crate::transition::{abc_polynomials, WeylNumerators};

/// Spectral data at time `t`, given the data at time zero.
///
/// For a single pair the recoverability constraint `2 λ₁ b∞ b*∞ > 1` only
/// involves time-independent quantities, so it either fails for every `t`
/// or for none; failure is reported as [`SpectralError::SinglePairConstraint`].
pub fn evolve_spectral(data: &SpectralData, t: f64) -> Result<SpectralData> {
    if data.k() == 1 && data.single_pair_constraint() <= 1.0 {
        return Err(SpectralError::SinglePairConstraint {
            product: data.single_pair_constraint(),
        });
    }
    let grow = |residues: &[f64], poles: &[f64]| -> Vec<f64> {
        residues
            .iter()
            .zip(poles)
            .map(|(r, p)| r * (t / p).exp())
            .collect()
    };
    Ok(SpectralData {
        lambda: data.lambda.clone(),
        mu: data.mu.clone(),
        a: grow(&data.a, &data.lambda),
        b: grow(&data.b, &data.mu),
        b_inf: data.b_inf,
        b_inf_star: data.b_inf_star,
    })
}

/// One point of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub config: InterlacingConfiguration,
}

/// Configurations at each requested time, computed in parallel from the
/// spectral data of `initial`. Output order follows `times`.
pub fn trajectories(
    initial: &InterlacingConfiguration,
    times: &[f64],
) -> Result<Vec<TrajectorySample>> {
    initial.validate()?;
    let data = forward_map(initial)?;
    times
        .par_iter()
        .map(|&t| {
            let config = recover(&evolve_spectral(&data, t)?)?;
            Ok(TrajectorySample { t, config })
        })
        .collect()
}

/// Closed-form single-pair motion: both sites drift with speed
/// `c = m₁ n₂ e^{x₁ - x₂}` while `m₁` grows and `n₂` decays at rate `c`.
pub fn single_pair_closed_form(
    initial: &InterlacingConfiguration,
    t: f64,
) -> Result<InterlacingConfiguration> {
    if initial.k != 1 {
        return Err(SpectralError::Invalid(format!(
            "closed form needs K = 1, got K = {}",
            initial.k
        )));
    }
    let speed = initial.m_odd[0] * initial.n_even[0] * (initial.x[0] - initial.x[1]).exp();
    InterlacingConfiguration::new(
        initial.x.iter().map(|x| x + speed * t).collect(),
        vec![initial.m_odd[0] * (speed * t).exp()],
        vec![initial.n_even[0] * (-speed * t).exp()],
    )
}

/// Renders samples as CSV with columns `t, x_1..x_2K, m_1, n_2, m_3, n_4, …`.
/// Values use the shortest decimal that round-trips in binary64.
pub fn trajectory_csv(samples: &[TrajectorySample]) -> String {
    let Some(first) = samples.first() else {
        return String::new();
    };
    let sites = 2 * first.config.k;
    let mut header = vec!["t".to_string()];
    header.extend((1..=sites).map(|s| format!("x_{s}")));
    header.extend((1..=sites).map(|s| {
        if s % 2 == 1 {
            format!("m_{s}")
        } else {
            format!("n_{s}")
        }
    }));
    let mut out = header.join(",");
    out.push('\n');
    for sample in samples {
        let config = &sample.config;
        let mut row = vec![sample.t.to_string()];
        row.extend(config.x.iter().map(f64::to_string));
        row.extend((0..sites).map(|s| {
            let weight = if s % 2 == 0 {
                config.m_odd[s / 2]
            } else {
                config.n_even[s / 2]
            };
            weight.to_string()
        }));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Time derivatives of positions and masses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigurationRate {
    pub x: Vec<f64>,
    pub m_odd: Vec<f64>,
    pub n_even: Vec<f64>,
}

/// Value and averaged slope of `Σ w_i e^{-|x - x_i|}` at each site. The slope
/// uses `sgn 0 = 0`, which averages the one-sided derivatives at a peak.
fn field_at_sites(x: &[f64], weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
    x.iter()
        .map(|&at| {
            x.iter()
                .zip(weights)
                .fold((0.0, 0.0), |(value, slope), (&site, &w)| {
                    let term = w * (-(at - site).abs()).exp();
                    let sign = match site.partial_cmp(&at) {
                        Some(std::cmp::Ordering::Greater) => 1.0,
                        Some(std::cmp::Ordering::Less) => -1.0,
                        _ => 0.0,
                    };
                    (value + term, slope + sign * term)
                })
        })
        .unzip()
}

/// Right-hand side of the peakon ODEs:
/// `ẋ_k = u v`, `ṁ_k = m_k (u v_x - 2 u_x v)`, `ṅ_k = n_k (u_x v - 2 u v_x)`,
/// all evaluated at `x_k`. Sites without an `m` (or `n`) mass keep it zero.
pub fn ode_rhs(config: &InterlacingConfiguration) -> ConfigurationRate {
    let sites = config.x.len();
    let m: Vec<f64> = (0..sites)
        .map(|s| if s % 2 == 0 { config.m_odd[s / 2] } else { 0.0 })
        .collect();
    let n: Vec<f64> = (0..sites)
        .map(|s| {
            if s % 2 == 1 {
                config.n_even[s / 2]
            } else {
                0.0
            }
        })
        .collect();
    let (u, u_x) = field_at_sites(&config.x, &m);
    let (v, v_x) = field_at_sites(&config.x, &n);
    ConfigurationRate {
        x: (0..sites).map(|s| u[s] * v[s]).collect(),
        m_odd: (0..config.k)
            .map(|i| {
                let s = 2 * i;
                config.m_odd[i] * (u[s] * v_x[s] - 2.0 * u_x[s] * v[s])
            })
            .collect(),
        n_even: (0..config.k)
            .map(|i| {
                let s = 2 * i + 1;
                config.n_even[i] * (u_x[s] * v[s] - 2.0 * u[s] * v_x[s])
            })
            .collect(),
    }
}

fn pack(config: &InterlacingConfiguration) -> Vec<f64> {
    config
        .x
        .iter()
        .chain(&config.m_odd)
        .chain(&config.n_even)
        .copied()
        .collect()
}

fn unpack(k: usize, state: &[f64]) -> InterlacingConfiguration {
    InterlacingConfiguration {
        k,
        x: state[..2 * k].to_vec(),
        m_odd: state[2 * k..3 * k].to_vec(),
        n_even: state[3 * k..].to_vec(),
    }
}

fn rate_vector(k: usize, state: &[f64]) -> Vec<f64> {
    let rate = ode_rhs(&unpack(k, state));
    rate.x
        .into_iter()
        .chain(rate.m_odd)
        .chain(rate.n_even)
        .collect()
}

/// Classical fourth-order Runge–Kutta with a fixed step, returning the state
/// at each of the increasing `times` (all at or after zero). The last step
/// before each output time is shortened to land on it exactly.
pub fn integrate_rk4(
    initial: &InterlacingConfiguration,
    times: &[f64],
    step: f64,
) -> Vec<InterlacingConfiguration> {
    let k = initial.k;
    let mut state = pack(initial);
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    let axpy = |base: &[f64], scale: f64, dir: &[f64]| -> Vec<f64> {
        base.iter().zip(dir).map(|(b, d)| b + scale * d).collect()
    };
    for &target in times {
        while now < target {
            let h = step.min(target - now);
            let k1 = rate_vector(k, &state);
            let k2 = rate_vector(k, &axpy(&state, h / 2.0, &k1));
            let k3 = rate_vector(k, &axpy(&state, h / 2.0, &k2));
            let k4 = rate_vector(k, &axpy(&state, h, &k3));
            for (i, s) in state.iter_mut().enumerate() {
                *s += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            now = if target - now <= step {
                target
            } else {
                now + h
            };
        }
        out.push(unpack(k, &state));
    }
    out
}

/// RK4 states together with a Richardson error estimate per output time:
/// the max-norm position difference between step `h` and `h/2`, divided by
/// `2⁴ - 1`.
pub fn integrate_rk4_checked(
    initial: &InterlacingConfiguration,
    times: &[f64],
    step: f64,
) -> (Vec<InterlacingConfiguration>, Vec<f64>) {
    let coarse = integrate_rk4(initial, times, step);
    let fine = integrate_rk4(initial, times, step / 2.0);
    let estimates = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| max_position_difference(c, f) / 15.0)
        .collect();
    (fine, estimates)
}

/// `max_k |x_k - x'_k|`.
pub fn max_position_difference(
    left: &InterlacingConfiguration,
    right: &InterlacingConfiguration,
) -> f64 {
    left.x
        .iter()
        .zip(&right.x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Coefficients `[A]_k` (k = 1..K) and `[Ã]_k` (k = 1..K-1), where
/// `A(λ) = 1 + Σ [A]_k (-2λ)^k` and likewise for `Ã`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservedSet<T = f64> {
    pub a_coeffs: Vec<T>,
    pub a_twin_coeffs: Vec<T>,
}

impl<T: Scalar> ConservedSet<T> {
    pub fn to_f64(&self) -> ConservedSet<f64> {
        let convert = |values: &[T]| values.iter().map(Scalar::approx).collect();
        ConservedSet {
            a_coeffs: convert(&self.a_coeffs),
            a_twin_coeffs: convert(&self.a_twin_coeffs),
        }
    }
}

impl ConservedSet<f64> {
    /// Largest relative change of any coefficient against a reference set.
    pub fn max_relative_drift(&self, reference: &ConservedSet<f64>) -> f64 {
        self.a_coeffs
            .iter()
            .zip(&reference.a_coeffs)
            .chain(self.a_twin_coeffs.iter().zip(&reference.a_twin_coeffs))
            .map(|(now, then)| ((now - then) / then).abs())
            .fold(0.0, f64::max)
    }
}

/// `𝓜𝓔𝓝`: entry `(i, j)` is `m_{2i-1} E_{2i-1,2j} n_{2j}` (1-based sites).
pub fn mass_decay_matrix<T: Scalar>(data: &RealLineData<T>) -> Matrix<T> {
    let k = data.k();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    data.m_odd[i].clone() * data.decay(2 * i, 2 * j + 1) * data.n_even[j].clone()
                })
                .collect()
        })
        .collect()
}

/// `i₁ ≤ j₁ < i₂ ≤ j₂ < …`.
fn half_interlacing_closed(rows: &[usize], cols: &[usize]) -> bool {
    rows.iter().zip(cols).all(|(i, j)| i <= j) && rows.iter().skip(1).zip(cols).all(|(i, j)| j < i)
}

/// `i₁ < j₁ ≤ i₂ < j₂ ≤ …`.
fn half_interlacing_open(rows: &[usize], cols: &[usize]) -> bool {
    rows.iter().zip(cols).all(|(i, j)| i < j) && rows.iter().skip(1).zip(cols).all(|(i, j)| j <= i)
}

/// Sums `det X_{IJ}` over all pairs of `size`-subsets related by `related`.
fn interlaced_minor_sum<T: Scalar>(
    matrix: &Matrix<T>,
    size: usize,
    related: fn(&[usize], &[usize]) -> bool,
) -> T {
    let subsets: Vec<Vec<usize>> = (0..matrix.len()).combinations(size).collect();
    let mut total = T::zero();
    for rows in &subsets {
        for cols in subsets.iter().filter(|cols| related(rows, cols)) {
            total = total + determinant(&submatrix(matrix, rows, cols));
        }
    }
    total
}

/// Constants of motion from minor sums of `𝓜𝓔𝓝`: `[A]_k` sums over
/// `I ≼ J` and `[Ã]_k` sums the transposed minors `det(𝓜𝓔𝓝)_{JI}` over
/// `I ⋞ J`.
pub fn conserved_from_minors<T: Scalar>(data: &RealLineData<T>) -> ConservedSet<T> {
    let k = data.k();
    let men = mass_decay_matrix(data);
    let transposed: Matrix<T> = (0..k)
        .map(|i| (0..k).map(|j| men[j][i].clone()).collect())
        .collect();
    ConservedSet {
        a_coeffs: (1..=k)
            .map(|size| interlaced_minor_sum(&men, size, half_interlacing_closed))
            .collect(),
        a_twin_coeffs: (1..k)
            .map(|size| interlaced_minor_sum(&transposed, size, half_interlacing_open))
            .collect(),
    }
}

/// Sum of the principal `size × size` minors, i.e. the coefficient of
/// `(-s)^size` in `det(I - s X)`.
fn principal_minor_sum<T: Scalar>(matrix: &Matrix<T>, size: usize) -> T {
    (0..matrix.len())
        .combinations(size)
        .map(|set| determinant(&submatrix(matrix, &set, &set)))
        .fold(T::zero(), |a, b| a + b)
}

/// Constants of motion as coefficients of `det(I - 2λ(I+𝓛)𝓜𝓔𝓝)` and
/// `det(I - 2λ 𝓛𝓝𝓔ᵀ𝓜)`.
pub fn conserved_from_determinants<T: Scalar>(data: &RealLineData<T>) -> ConservedSet<T> {
    let k = data.k();
    let men = mass_decay_matrix(data);
    // (I + 𝓛) X sums rows 0..=i of X; 𝓛 X sums rows 0..i.
    let lower_sums = |matrix: &Matrix<T>, inclusive: bool| -> Matrix<T> {
        (0..k)
            .map(|i| {
                let end = if inclusive { i + 1 } else { i };
                (0..k)
                    .map(|j| {
                        matrix[..end]
                            .iter()
                            .fold(T::zero(), |acc, row| acc + row[j].clone())
                    })
                    .collect()
            })
            .collect()
    };
    let nem: Matrix<T> = (0..k)
        .map(|i| (0..k).map(|j| men[j][i].clone()).collect())
        .collect();
    let plain = lower_sums(&men, true);
    let twin = lower_sums(&nem, false);
    ConservedSet {
        a_coeffs: (1..=k)
            .map(|size| principal_minor_sum(&plain, size))
            .collect(),
        a_twin_coeffs: (1..k)
            .map(|size| principal_minor_sum(&twin, size))
            .collect(),
    }
}

/// Constants of motion read off the transition-product polynomials `A`, `Ã`.
pub fn conserved_from_transition<T: Scalar>(data: &RealLineData<T>) -> ConservedSet<T> {
    let k = data.k();
    let coefficients = |twin: bool, count: usize| -> Vec<T> {
        let poly = abc_polynomials(data, twin).a;
        WeylNumerators::scaled_coefficients(&poly)
            .into_iter()
            .chain(std::iter::repeat(T::zero()))
            .skip(1)
            .take(count)
            .collect()
    };
    ConservedSet {
        a_coeffs: coefficients(false, k),
        a_twin_coeffs: coefficients(true, k - 1),
    }
}

/// Elementary symmetric polynomials `e_k(1/(2λ_i))` and `e_k(1/(2μ_j))`.
pub fn conserved_from_spectrum(data: &SpectralData) -> ConservedSet<f64> {
    let elementary = |poles: &[f64]| -> Vec<f64> {
        let mut e = vec![1.0];
        for p in poles {
            let root = 1.0 / (2.0 * p);
            e.push(0.0);
            for k in (1..e.len()).rev() {
                e[k] += root * e[k - 1];
            }
        }
        e[1..].to_vec()
    };
    ConservedSet {
        a_coeffs: elementary(&data.lambda),
        a_twin_coeffs: elementary(&data.mu),
    }
}

/// The constants of motion of a configuration (minor-sum route).
pub fn conserved_coefficients(config: &InterlacingConfiguration) -> Result<ConservedSet<f64>> {
    config.validate()?;
    Ok(conserved_from_minors(&config.real_line()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse_spectral::configuration_distance;
    use crate::scalar::ratio;
    use num::BigRational;

    fn sample_config(k: usize) -> InterlacingConfiguration {
        let x: Vec<f64> = (0..2 * k)
            .map(|s| -1.5 + 0.55 * s as f64 + 0.07 * (s * s) as f64)
            .collect();
        let m = (0..k).map(|i| 0.6 + 0.3 * i as f64).collect();
        let n = (0..k).map(|i| 1.1 - 0.2 * i as f64).collect();
        InterlacingConfiguration::new(x, m, n).unwrap()
    }

    fn rational_data(k: usize) -> RealLineData<BigRational> {
        RealLineData {
            exp_x: (0..2 * k as i64)
                .map(|s| ratio(2 + 3 * s + s * s, 3))
                .collect(),
            m_odd: (0..k as i64).map(|i| ratio(3 + 2 * i, 5)).collect(),
            n_even: (0..k as i64).map(|i| ratio(7 - i, 4)).collect(),
        }
    }

    #[test]
    fn evolution_is_a_semigroup_with_the_stated_rate() {
        let data = forward_map(&sample_config(3)).unwrap();
        assert_eq!(evolve_spectral(&data, 0.0).unwrap(), data);
        let two_steps = evolve_spectral(&evolve_spectral(&data, 0.3).unwrap(), 0.4).unwrap();
        let one_step = evolve_spectral(&data, 0.7).unwrap();
        for (l, r) in two_steps
            .a
            .iter()
            .chain(&two_steps.b)
            .zip(one_step.a.iter().chain(&one_step.b))
        {
            assert!(((l - r) / r).abs() < 1e-15);
        }
        let h = 1e-6;
        let ahead = evolve_spectral(&data, h).unwrap();
        let behind = evolve_spectral(&data, -h).unwrap();
        for i in 0..3 {
            let slope = (ahead.a[i] - behind.a[i]) / (2.0 * h);
            let expected = data.a[i] / data.lambda[i];
            assert!(((slope - expected) / expected).abs() < 1e-6);
        }
    }

    #[test]
    fn single_pair_constraint_blocks_evolution() {
        let data = SpectralData {
            lambda: vec![1.0],
            mu: vec![],
            a: vec![1.0],
            b: vec![],
            b_inf: 0.5,
            b_inf_star: 0.5,
        };
        assert!(matches!(
            evolve_spectral(&data, 0.5),
            Err(SpectralError::SinglePairConstraint { .. })
        ));
    }

    #[test]
    fn rhs_matches_expanded_small_systems() {
        let one = sample_config(1);
        let rate = ode_rhs(&one);
        let c = one.m_odd[0] * one.n_even[0] * (one.x[0] - one.x[1]).exp();
        assert!((rate.x[0] - c).abs() < 1e-15 && (rate.x[1] - c).abs() < 1e-15);
        assert!((rate.m_odd[0] / one.m_odd[0] - c).abs() < 1e-15);
        assert!((rate.n_even[0] / one.n_even[0] + c).abs() < 1e-15);

        let p = sample_config(2);
        let e = |i: usize, j: usize| (p.x[i - 1] - p.x[j - 1]).exp();
        let (m1, n2, m3, n4) = (p.m_odd[0], p.n_even[0], p.m_odd[1], p.n_even[1]);
        let rate = ode_rhs(&p);
        let expected_x = [
            (m1 + m3 * e(1, 3)) * (n2 * e(1, 2) + n4 * e(1, 4)),
            (m1 * e(1, 2) + m3 * e(2, 3)) * (n2 + n4 * e(2, 4)),
            (m1 * e(1, 3) + m3) * (n2 * e(2, 3) + n4 * e(3, 4)),
            (m1 * e(1, 4) + m3 * e(3, 4)) * (n2 * e(2, 4) + n4),
        ];
        let expected_log_mass = [
            (m1 + m3 * e(1, 3)) * (n2 * e(1, 2) + n4 * e(1, 4))
                - 2.0 * m3 * e(1, 3) * (n2 * e(1, 2) + n4 * e(1, 4)),
            (-m1 * e(1, 2) + m3 * e(2, 3)) * (n2 + n4 * e(2, 4))
                - 2.0 * (m1 * e(1, 2) + m3 * e(2, 3)) * n4 * e(2, 4),
            (m1 * e(1, 3) + m3) * (-n2 * e(2, 3) + n4 * e(3, 4))
                + 2.0 * m1 * e(1, 3) * (n2 * e(2, 3) + n4 * e(3, 4)),
            (-m1 * e(1, 4) - m3 * e(3, 4)) * (n2 * e(2, 4) + n4)
                + 2.0 * (m1 * e(1, 4) + m3 * e(3, 4)) * n2 * e(2, 4),
        ];
        for s in 0..4 {
            assert!((rate.x[s] - expected_x[s]).abs() < 1e-14);
        }
        let log_rates = [
            rate.m_odd[0] / m1,
            rate.n_even[0] / n2,
            rate.m_odd[1] / m3,
            rate.n_even[1] / n4,
        ];
        for s in 0..4 {
            assert!(
                (log_rates[s] - expected_log_mass[s]).abs() < 1e-14,
                "site {s}"
            );
        }
    }

    #[test]
    fn rhs_scales_quadratically_with_mass() {
        let p = sample_config(3);
        let scaled = InterlacingConfiguration::new(
            p.x.clone(),
            p.m_odd.iter().map(|m| 3.0 * m).collect(),
            p.n_even.iter().map(|n| 3.0 * n).collect(),
        )
        .unwrap();
        let (base, big) = (ode_rhs(&p), ode_rhs(&scaled));
        for (b, s) in base.x.iter().zip(&big.x) {
            assert!((s - 9.0 * b).abs() < 1e-12 * s.abs().max(1.0));
        }
        for i in 0..3 {
            let ratio = (big.m_odd[i] / scaled.m_odd[i]) / (base.m_odd[i] / p.m_odd[i]);
            assert!((ratio - 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_trajectory_matches_rk4_and_closed_form() {
        let times: Vec<f64> = (0..=5).map(|i| 0.2 * i as f64).collect();
        let p = sample_config(2);
        let spectral = trajectories(&p, &times).unwrap();
        let (oracle, estimates) = integrate_rk4_checked(&p, &times, 1e-3);
        for ((sample, rk), est) in spectral.iter().zip(&oracle).zip(&estimates) {
            assert!(
                max_position_difference(&sample.config, rk) < 1e-8,
                "t={}",
                sample.t
            );
            assert!(*est < 1e-9);
        }
        assert!(configuration_distance(&spectral[0].config, &p) < 1e-10);

        let single = sample_config(1);
        for sample in trajectories(&single, &times).unwrap() {
            let closed = single_pair_closed_form(&single, sample.t).unwrap();
            assert!(configuration_distance(&sample.config, &closed) < 1e-10);
        }
    }

    #[test]
    fn minor_sums_match_determinants_and_transition_exactly() {
        for k in 1..=4 {
            let data = rational_data(k);
            let minors = conserved_from_minors(&data);
            assert_eq!(minors, conserved_from_determinants(&data), "K={k}");
            assert_eq!(minors, conserved_from_transition(&data), "K={k}");
        }
    }

    #[test]
    fn lowest_and_highest_coefficients_have_closed_forms() {
        let data = rational_data(3);
        let set = conserved_from_minors(&data);
        let mut first = BigRational::from_int(0);
        for i in 0..3 {
            for j in i..3 {
                first +=
                    data.m_odd[i].clone() * data.n_even[j].clone() * data.decay(2 * i, 2 * j + 1);
            }
        }
        assert_eq!(set.a_coeffs[0], first);
        let mut top = BigRational::from_int(1);
        for i in 0..3 {
            top *= data.m_odd[i].clone() * data.n_even[i].clone() * data.decay(2 * i, 2 * i + 1);
            if i + 1 < 3 {
                let e = data.decay(2 * i + 1, 2 * i + 2);
                top *= BigRational::from_int(1) - e.clone() * e;
            }
        }
        assert_eq!(set.a_coeffs[2], top);
    }

    #[test]
    fn spectrum_route_and_conservation() {
        let p = sample_config(3);
        let data = forward_map(&p).unwrap();
        let from_minors = conserved_coefficients(&p).unwrap();
        assert!(conserved_from_spectrum(&data).max_relative_drift(&from_minors) < 1e-10);
        let samples = trajectories(&p, &[0.25, 0.5, 1.0]).unwrap();
        for sample in samples {
            let later = conserved_coefficients(&sample.config).unwrap();
            assert!(later.max_relative_drift(&from_minors) < 1e-9);
        }
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let samples = trajectories(&sample_config(2), &[0.0, 0.5]).unwrap();
        let csv = trajectory_csv(&samples);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,x_1,x_2,x_3,x_4,m_1,n_2,m_3,n_4");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[2].split(',').count(), 9);
    }
}
