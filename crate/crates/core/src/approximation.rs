//! The simultaneous rational approximants `(Q_j, P_j, R_j)` behind the inverse
//! map, built both from bimoment determinants and from partial transition
//! products, together with Laurent-series checks of their approximation
//! orders.
//!
//! Laurent series of the Weyl functions at infinity come from moment sums:
//!
//! - `W(λ) = Σ α_k λ^{-(k+1)}`
//! - `Z(λ) = Σ (I_{k0} + b∞ α_k + ½ δ_{k0}) λ^{-(k+1)}`
//! - `W̃(-λ) = -b∞ - Σ (-1)^k β_k λ^{-(k+1)}`
//! - `Z̃(-λ) = -Σ ((-1)^k I_{0k} + ½ δ_{k0}) λ^{-(k+1)}`

use serde::Serialize;

use crate::bimoments::{moment, DiscreteMeasure, HeineTable};
use crate::core_types::IntervalMeasures;
use crate::error::{Result, SpectralError};
use crate::linalg::{condition_number, determinant, minor_matrix, Matrix};
use crate::poly::Polynomial;
use crate::scalar::{Scalar, Wide};
use crate::transition::transition_matrix;

/// Polynomials with `deg Q = j`, `deg P = deg R = j - 1`, `Q(0) = 0` and
/// `P(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PadeTriple<T: num::Zero + std::fmt::Debug> {
    pub j: usize,
    pub q: Polynomial<T>,
    pub p: Polynomial<T>,
    pub r: Polynomial<T>,
}

impl<T: Scalar> PadeTriple<T> {
    /// The degenerate triple `(0, 1, 0)` of order zero.
    pub fn order_zero() -> Self {
        Self {
            j: 0,
            q: Polynomial::zero(),
            p: Polynomial::one(),
            r: Polynomial::zero(),
        }
    }

    /// `Q'(0)`.
    pub fn q_slope_at_zero(&self) -> T {
        self.q.coeff(1)
    }

    /// `R(0)`.
    pub fn r_at_zero(&self) -> T {
        self.r.coeff(0)
    }

    /// Largest coefficient magnitude over the three polynomials.
    pub fn max_abs_coeff(&self) -> f64 {
        self.q
            .max_abs_coeff()
            .max(self.p.max_abs_coeff())
            .max(self.r.max_abs_coeff())
    }

    /// Largest coefficient difference against another triple.
    pub fn max_coeff_difference(&self, other: &Self) -> f64 {
        [
            (&self.q, &other.q),
            (&self.p, &other.p),
            (&self.r, &other.r),
        ]
        .iter()
        .map(|(a, b)| (*a - *b).max_abs_coeff())
        .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> PadeTriple<f64> {
        PadeTriple {
            j: self.j,
            q: self.q.to_f64(),
            p: self.p.to_f64(),
            r: self.r.to_f64(),
        }
    }
}

/// The triple of order `j` from bimoment determinants:
/// `p = det[(λ^i) | I_{i+1,k}] / det[(α_i) | I_{i+1,k}]`, `Q = λ p`,
/// `P_t = Σ_k q_k α_{k-1-t}` and `R_t = Σ_k q_k I_{k-1-t,0} + ½ p_t + b∞ P_t`.
pub fn pade_triple<T: Scalar>(
    alpha: &DiscreteMeasure<T>,
    beta: &DiscreteMeasure<T>,
    b_inf: &T,
    j: usize,
) -> Result<PadeTriple<T>> {
    if j == 0 {
        return Ok(PadeTriple::order_zero());
    }
    if j > alpha.len() || j > beta.len() + 1 {
        return Err(SpectralError::RankDeficient(format!(
            "order {j} needs {j} atoms in the first measure and {} in the second",
            j - 1
        )));
    }
    let mut table = HeineTable::new(alpha, beta);
    let matrix: Matrix<T> = (0..j)
        .map(|i| {
            let mut row = vec![table.alpha_moment(i as i32)];
            row.extend((0..j - 1).map(|k| table.bimoment(i as i32 + 1, k as i32)));
            row
        })
        .collect();
    let denominator = determinant(&matrix);
    if denominator.is_zero() {
        return Err(SpectralError::RankDeficient(format!(
            "order {j} exceeds what the measures support (moment determinant vanishes)"
        )));
    }
    // Expanding the numerator along its first column gives each coefficient.
    let p: Vec<T> = (0..j)
        .map(|t| {
            let minor = determinant(&minor_matrix(&matrix, t, 0));
            let signed = if t % 2 == 0 { minor } else { -minor };
            signed / denominator.clone()
        })
        .collect();
    let mut q = vec![T::zero()];
    q.extend(p.iter().cloned());
    let moments: Vec<T> = (0..j).map(|k| moment(alpha, k as i32)).collect();
    let big_p: Vec<T> = (0..j)
        .map(|t| {
            (t + 1..=j).fold(T::zero(), |acc, k| {
                acc + q[k].clone() * moments[k - 1 - t].clone()
            })
        })
        .collect();
    let big_r: Vec<T> = (0..j)
        .map(|t| {
            let sum = (t + 1..=j).fold(T::zero(), |acc, k| {
                acc + q[k].clone() * table.bimoment((k - 1 - t) as i32, 0)
            });
            sum + T::half() * p[t].clone() + b_inf.clone() * big_p[t].clone()
        })
        .collect();
    Ok(PadeTriple {
        j,
        q: Polynomial::new(q),
        p: Polynomial::new(big_p),
        r: Polynomial::new(big_r),
    })
}

/// A binary64 triple together with the 2-norm condition number of its
/// moment matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionedTriple {
    pub triple: PadeTriple<f64>,
    pub condition: f64,
}

/// The determinant triple for binary64 data, evaluated in [`Wide`]
/// precision on the unrounded inputs and rounded once at the end. Bimoment
/// matrices become ill-conditioned quickly as `j` grows, so floating-point
/// elimination would lose digits that the data itself does not lack.
pub fn pade_triple_accurate(
    alpha: &DiscreteMeasure<f64>,
    beta: &DiscreteMeasure<f64>,
    b_inf: f64,
    j: usize,
) -> Result<ConditionedTriple> {
    let wide = pade_triple::<Wide>(&alpha.lift(), &beta.lift(), &Wide::from_float(b_inf), j)?;
    let mut table = HeineTable::new(alpha, beta);
    let matrix: Matrix<f64> = (0..j)
        .map(|i| {
            let mut row = vec![table.alpha_moment(i as i32)];
            row.extend((0..j.saturating_sub(1)).map(|k| table.bimoment(i as i32 + 1, k as i32)));
            row
        })
        .collect();
    Ok(ConditionedTriple {
        triple: wide.to_f64(),
        condition: condition_number(&matrix),
    })
}

/// The triple read off the partial transition product `T_j`:
/// `Q = -(T_j)₃₂`, `P = (T_j)₂₂`, `R = (T_j)₁₂`.
pub fn triple_from_transition<T: Scalar>(
    meas: &IntervalMeasures<T>,
    j: usize,
) -> Result<PadeTriple<T>> {
    let products = transition_matrix(meas, false);
    let Some(partial) = products.partial.get(j) else {
        return Err(SpectralError::Invalid(format!(
            "order {j} exceeds K = {}",
            meas.k()
        )));
    };
    Ok(PadeTriple {
        j,
        q: -partial.get(2, 1),
        p: partial.get(1, 1).clone(),
        r: partial.get(0, 1).clone(),
    })
}

/// A truncated Laurent series `Σ_i coeffs[i] λ^{top - i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Laurent<T> {
    pub top: i64,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> Laurent<T> {
    /// Coefficient of `λ^power` (zero outside the stored window).
    pub fn coeff(&self, power: i64) -> T {
        let index = self.top - power;
        if index < 0 {
            return T::zero();
        }
        self.coeffs
            .get(index as usize)
            .cloned()
            .unwrap_or_else(T::zero)
    }

    /// Lowest power carried by the truncation.
    pub fn bottom(&self) -> i64 {
        self.top - self.coeffs.len() as i64 + 1
    }

    fn from_fn(top: i64, bottom: i64, mut entry: impl FnMut(i64) -> T) -> Self {
        Self {
            top,
            coeffs: (bottom..=top).rev().map(&mut entry).collect(),
        }
    }

    /// Product with a polynomial, keeping every power down to `bottom`.
    pub fn times(&self, poly: &Polynomial<T>) -> Self {
        let degree = poly.degree().map_or(0, |d| d as i64);
        let top = self.top + degree;
        // Powers below this bound would need series terms beyond the truncation.
        let bottom = self.bottom() + degree;
        Self::from_fn(top, bottom, |power| {
            (0..=degree).fold(T::zero(), |acc, d| {
                acc + poly.coeff(d as usize) * self.coeff(power - d)
            })
        })
    }

    /// Sum with a polynomial, keeping this series' lower truncation.
    pub fn plus_poly(&self, poly: &Polynomial<T>) -> Self {
        let degree = poly.degree().map_or(0, |d| d as i64);
        let top = self.top.max(degree);
        let bottom = self.bottom();
        Self::from_fn(top, bottom, |power| {
            let poly_part = if power >= 0 {
                poly.coeff(power as usize)
            } else {
                T::zero()
            };
            self.coeff(power) + poly_part
        })
    }

    /// Sum of two series, truncated at the higher of the two bottoms.
    pub fn plus(&self, other: &Self) -> Self {
        let top = self.top.max(other.top);
        let bottom = self.bottom().max(other.bottom());
        Self::from_fn(top, bottom, |power| self.coeff(power) + other.coeff(power))
    }

    pub fn abs(&self) -> Laurent<f64> {
        Laurent {
            top: self.top,
            coeffs: self.coeffs.iter().map(|c| c.approx().abs()).collect(),
        }
    }
}

/// Laurent expansions at infinity of `W(λ)`, `Z(λ)`, `W̃(-λ)` and `Z̃(-λ)`,
/// down to `λ^{-depth}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylSeries<T> {
    pub w: Laurent<T>,
    pub z: Laurent<T>,
    pub w_twin_reflected: Laurent<T>,
    pub z_twin_reflected: Laurent<T>,
}

/// Builds [`WeylSeries`] from the spectral measures.
pub fn weyl_series<T: Scalar>(
    alpha: &DiscreteMeasure<T>,
    beta: &DiscreteMeasure<T>,
    b_inf: &T,
    depth: usize,
) -> WeylSeries<T> {
    let mut table = HeineTable::new(alpha, beta);
    let sign = |k: usize| if k % 2 == 0 { T::one() } else { -T::one() };
    let alphas: Vec<T> = (0..depth).map(|k| moment(alpha, k as i32)).collect();
    let w = Laurent {
        top: -1,
        coeffs: alphas.clone(),
    };
    let z = Laurent {
        top: -1,
        coeffs: (0..depth)
            .map(|k| {
                let base = table.bimoment(k as i32, 0) + b_inf.clone() * alphas[k].clone();
                if k == 0 {
                    base + T::half()
                } else {
                    base
                }
            })
            .collect(),
    };
    let mut w_twin = vec![-b_inf.clone()];
    w_twin.extend((0..depth).map(|k| -(sign(k) * moment(beta, k as i32))));
    let z_twin = Laurent {
        top: -1,
        coeffs: (0..depth)
            .map(|k| {
                let base = -(sign(k) * table.bimoment(0, k as i32));
                if k == 0 {
                    base - T::half()
                } else {
                    base
                }
            })
            .collect(),
    };
    WeylSeries {
        w,
        z,
        w_twin_reflected: Laurent {
            top: 0,
            coeffs: w_twin,
        },
        z_twin_reflected: z_twin,
    }
}

/// Coefficients of the three approximation residuals, with magnitudes for
/// judging them relatively.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproximationReport<T> {
    pub j: usize,
    /// `W Q - P`.
    pub first: Laurent<T>,
    /// `Z Q - R`.
    pub second: Laurent<T>,
    /// `R + P W̃(-λ) + Q Z̃(-λ)`.
    pub third: Laurent<T>,
    first_scale: Laurent<f64>,
    second_scale: Laurent<f64>,
    third_scale: Laurent<f64>,
}

fn relative_window<T: Scalar>(
    values: &Laurent<T>,
    scale: &Laurent<f64>,
    powers: std::ops::RangeInclusive<i64>,
) -> f64 {
    powers
        .map(|power| {
            let value = values.coeff(power).approx().abs();
            if value == 0.0 {
                0.0
            } else {
                value / scale.coeff(power).max(f64::MIN_POSITIVE)
            }
        })
        .fold(0.0, f64::max)
}

impl<T: Scalar> ApproximationReport<T> {
    /// Largest relative coefficient of `W Q - P` at powers `λ^0 … λ^{j-1}`.
    pub fn first_order_residual(&self) -> f64 {
        relative_window(&self.first, &self.first_scale, 0..=self.j as i64 - 1)
    }

    /// Largest relative coefficient of `Z Q - R` at powers `λ^0 … λ^{j-1}`.
    pub fn second_order_residual(&self) -> f64 {
        relative_window(&self.second, &self.second_scale, 0..=self.j as i64 - 1)
    }

    /// Largest relative coefficient of the third residual at powers
    /// `λ^{-(j-1)} … λ^{j-1}`.
    pub fn third_order_residual(&self) -> f64 {
        let j = self.j as i64;
        relative_window(&self.third, &self.third_scale, -(j - 1)..=j - 1)
    }

    /// Largest relative coefficient of the third residual over the whole
    /// truncation window; this vanishes when `j = K`.
    pub fn third_full_residual(&self) -> f64 {
        relative_window(
            &self.third,
            &self.third_scale,
            self.third.bottom()..=self.third.top,
        )
    }

    /// Whether every coefficient of the third residual is exactly zero.
    pub fn third_is_exactly_zero(&self) -> bool {
        self.third.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest of the three windowed residuals.
    pub fn max_order_residual(&self) -> f64 {
        self.first_order_residual()
            .max(self.second_order_residual())
            .max(self.third_order_residual())
    }
}

/// Forms the three residual series for a triple.
pub fn approximation_orders<T: Scalar>(
    triple: &PadeTriple<T>,
    series: &WeylSeries<T>,
) -> ApproximationReport<T> {
    let minus_one = -T::one();
    let first = series
        .w
        .times(&triple.q)
        .plus_poly(&triple.p.scale(&minus_one));
    let second = series
        .z
        .times(&triple.q)
        .plus_poly(&triple.r.scale(&minus_one));
    let third = series
        .w_twin_reflected
        .times(&triple.p)
        .plus(&series.z_twin_reflected.times(&triple.q))
        .plus_poly(&triple.r);
    let abs_poly = |poly: &Polynomial<T>| {
        Polynomial::new(poly.coeffs().iter().map(|c| c.approx().abs()).collect())
    };
    let (q, p, r) = (
        abs_poly(&triple.q),
        abs_poly(&triple.p),
        abs_poly(&triple.r),
    );
    let first_scale = series.w.abs().times(&q).plus_poly(&p);
    let second_scale = series.z.abs().times(&q).plus_poly(&r);
    let third_scale = series
        .w_twin_reflected
        .abs()
        .times(&p)
        .plus(&series.z_twin_reflected.abs().times(&q))
        .plus_poly(&r);
    ApproximationReport {
        j: triple.j,
        first,
        second,
        third,
        first_scale,
        second_scale,
        third_scale,
    }
}

/// Even weights and scaled distances from consecutive triples:
/// `h_i = R_{K-i+1}(0) - R_{K-i}(0)` and
/// `(1 - y_{2i}) h_i = Q'_{K-i+1}(0) - Q'_{K-i}(0)`, in site order.
pub fn recover_even_differences<T: Scalar>(triples: &[PadeTriple<T>]) -> Result<(Vec<T>, Vec<T>)> {
    if triples.len() < 2 || triples.iter().enumerate().any(|(j, t)| t.j != j) {
        return Err(SpectralError::Invalid(
            "need the triples of orders 0, 1, …, K in order".into(),
        ));
    }
    let k = triples.len() - 1;
    let mut weights = Vec::with_capacity(k);
    let mut scaled = Vec::with_capacity(k);
    for site in 1..=k {
        let upper = &triples[k - site + 1];
        let lower = &triples[k - site];
        weights.push(upper.r_at_zero() - lower.r_at_zero());
        scaled.push(upper.q_slope_at_zero() - lower.q_slope_at_zero());
    }
    Ok((weights, scaled))
}

/// Perturbs each free coefficient of a triple (everything except the
/// normalized `Q(0)` and `P(0)`) by a relative `delta` and reports, per
/// perturbation, the largest windowed order residual it produces.
pub fn perturbation_residuals(
    triple: &PadeTriple<f64>,
    series: &WeylSeries<f64>,
    delta: f64,
) -> Vec<f64> {
    let nudge = |value: f64| {
        if value == 0.0 {
            delta
        } else {
            value * (1.0 + delta)
        }
    };
    let mut residuals = Vec::new();
    let mut probe = |changed: PadeTriple<f64>| {
        residuals.push(approximation_orders(&changed, series).max_order_residual());
    };
    for index in 1..=triple.j {
        let mut coeffs = triple.q.coeffs().to_vec();
        coeffs.resize(triple.j + 1, 0.0);
        coeffs[index] = nudge(coeffs[index]);
        probe(PadeTriple {
            q: Polynomial::new(coeffs),
            ..triple.clone()
        });
    }
    for index in 1..triple.j {
        let mut coeffs = triple.p.coeffs().to_vec();
        coeffs.resize(triple.j, 0.0);
        coeffs[index] = nudge(coeffs[index]);
        probe(PadeTriple {
            p: Polynomial::new(coeffs),
            ..triple.clone()
        });
    }
    for index in 0..triple.j {
        let mut coeffs = triple.r.coeffs().to_vec();
        coeffs.resize(triple.j, 0.0);
        coeffs[index] = nudge(coeffs[index]);
        probe(PadeTriple {
            r: Polynomial::new(coeffs),
            ..triple.clone()
        });
    }
    residuals
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimoments::{biorthogonal_pair, spectral_measures};
    use crate::core_types::InterlacingConfiguration;
    use crate::forward_spectral::forward_map;
    use crate::inverse_spectral::recover_interval;
    use crate::scalar::ratio;

    fn sample(k: usize) -> InterlacingConfiguration {
        let x: Vec<f64> = (0..2 * k)
            .map(|i| -1.2 + 0.45 * i as f64 + 0.04 * (i * i) as f64)
            .collect();
        let m = (0..k).map(|i| 0.9 + 0.5 * i as f64).collect();
        let n = (0..k).map(|i| 1.3 - 0.2 * i as f64).collect();
        InterlacingConfiguration::new(x, m, n).unwrap()
    }

    #[test]
    fn order_one_closed_forms() {
        let config = sample(3);
        let data = forward_map(&config).unwrap();
        let (alpha, beta) = spectral_measures(&data);
        let triple = pade_triple(&alpha, &beta, &data.b_inf, 1).unwrap();
        let alpha0 = moment(&alpha, 0);
        let i00 = crate::bimoments::bimoment(&alpha, &beta, 0, 0);
        assert!((triple.q_slope_at_zero() - 1.0 / alpha0).abs() < 1e-14);
        assert!((triple.r_at_zero() - ((i00 + 0.5) / alpha0 + data.b_inf)).abs() < 1e-13);
        assert_eq!(triple.p.coeffs(), &[1.0]);
        assert_eq!(PadeTriple::<f64>::order_zero().p.coeffs(), &[1.0]);
    }

    #[test]
    fn determinant_and_transition_triples_agree() {
        for k in 1..=4 {
            let config = sample(k);
            let data = forward_map(&config).unwrap();
            let (alpha, beta) = spectral_measures(&data);
            let meas = config.to_interval().unwrap();
            for j in 0..=k {
                let from_det = pade_triple_accurate(&alpha, &beta, data.b_inf, j)
                    .unwrap()
                    .triple;
                let from_matrix = triple_from_transition(&meas, j).unwrap();
                let scale = from_det.max_abs_coeff();
                assert!(
                    from_det.max_coeff_difference(&from_matrix) < 1e-10 * scale,
                    "K={k} j={j}"
                );
            }
            assert!(pade_triple(&alpha, &beta, &data.b_inf, k + 1).is_err());
        }
    }

    #[test]
    fn orders_hold_and_third_vanishes_at_top_order() {
        let k = 3;
        let data = forward_map(&sample(k)).unwrap();
        let (alpha, beta) = spectral_measures(&data);
        let series = weyl_series(&alpha, &beta, &data.b_inf, 2 * k + 2);
        for j in 1..=k {
            let triple = pade_triple(&alpha, &beta, &data.b_inf, j).unwrap();
            let report = approximation_orders(&triple, &series);
            assert!(
                report.max_order_residual() < 1e-10,
                "j={j}: {}",
                report.max_order_residual()
            );
            if j == k {
                assert!(report.third_full_residual() < 1e-10);
            } else {
                assert!(report.third_full_residual() > 1e-6);
            }
        }
    }

    #[test]
    fn exact_third_residual_is_zero_at_top_order() {
        let k = 3;
        let alpha = DiscreteMeasure::new(
            vec![ratio(1, 2), ratio(2, 1), ratio(7, 3)],
            vec![ratio(3, 1), ratio(1, 4), ratio(5, 2)],
        )
        .unwrap();
        let beta = DiscreteMeasure::new(
            vec![ratio(1, 1), ratio(9, 2)],
            vec![ratio(2, 3), ratio(7, 5)],
        )
        .unwrap();
        let b_inf = ratio(4, 3);
        let series = weyl_series(&alpha, &beta, &b_inf, 2 * k + 2);
        for j in 1..=k {
            let triple = pade_triple(&alpha, &beta, &b_inf, j).unwrap();
            let report = approximation_orders(&triple, &series);
            assert_eq!(report.max_order_residual(), 0.0, "j={j}");
            assert_eq!(report.third_is_exactly_zero(), j == k, "j={j}");
        }
    }

    #[test]
    fn differences_recover_even_weights() {
        let k = 4;
        let config = sample(k);
        let data = forward_map(&config).unwrap();
        let (alpha, beta) = spectral_measures(&data);
        let triples: Vec<_> = (0..=k)
            .map(|j| {
                pade_triple_accurate(&alpha, &beta, data.b_inf, j)
                    .unwrap()
                    .triple
            })
            .collect();
        let (weights, scaled) = recover_even_differences(&triples).unwrap();
        let meas = config.to_interval().unwrap();
        let direct = recover_interval(&data).unwrap();
        for i in 0..k {
            assert!((weights[i] - meas.h[i]).abs() < 1e-8 * meas.h[i]);
            assert!(
                (weights[i] - direct.h[i]).abs() < 1e-10 * meas.h[i],
                "{} vs {}",
                weights[i],
                direct.h[i]
            );
            let one_minus_y: f64 = meas.l[2 * i + 2..].iter().sum();
            assert!((scaled[i] - one_minus_y * meas.h[i]).abs() < 1e-8 * scaled[i]);
        }
        let total: f64 = weights.iter().sum();
        assert!((total - triples[k].r_at_zero()).abs() < 1e-12 * total);
        assert!(recover_even_differences(&triples[1..]).is_err());
    }

    #[test]
    fn perturbations_break_the_orders() {
        let k = 3;
        let data = forward_map(&sample(k)).unwrap();
        let (alpha, beta) = spectral_measures(&data);
        let series = weyl_series(&alpha, &beta, &data.b_inf, 2 * k + 2);
        for j in 1..=k {
            let triple = pade_triple(&alpha, &beta, &data.b_inf, j).unwrap();
            let residuals = perturbation_residuals(&triple, &series, 1e-6);
            assert_eq!(residuals.len(), 3 * j - 1);
            assert!(residuals.iter().all(|r| *r > 1e-9), "j={j}: {residuals:?}");
        }
    }

    #[test]
    fn p_is_proportional_to_a_biorthogonal_polynomial() {
        let data = forward_map(&sample(4)).unwrap();
        let (alpha, beta) = spectral_measures(&data);
        let shifted = DiscreteMeasure::new(
            alpha.support.clone(),
            alpha
                .support
                .iter()
                .zip(&alpha.weights)
                .map(|(x, w)| x * w)
                .collect(),
        )
        .unwrap();
        for j in 1..=3 {
            let triple = pade_triple(&alpha, &beta, &data.b_inf, j).unwrap();
            let p = triple.q.shift_down();
            let (biorthogonal, _) = biorthogonal_pair(&shifted, &beta, j - 1).unwrap();
            let factor = p.leading() / biorthogonal.leading();
            for d in 0..j {
                let expected = factor * biorthogonal.coeff(d);
                assert!(
                    (p.coeff(d) - expected).abs() < 1e-9 * p.max_abs_coeff(),
                    "j={j}"
                );
            }
        }
    }
}
