//! Transition matrices on the interval, the involution exchanging a matrix
//! with its twin, the real-line spectral polynomials and the piecewise
//! wavefunction.
//!
//! Matrix entries are addressed 0-based here: entry `(3,1)` of the
//! mathematical notation is `get(2, 0)`.

use std::array;
use std::ops::{Add, Div, Mul, Sub};

use serde::Serialize;

use crate::core_types::{IntervalMeasures, RealLineData};
use crate::error::{Result, SpectralError};
use crate::poly::Polynomial;
use crate::scalar::Scalar;

/// A 3×3 matrix whose entries are polynomials in λ.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialMatrix<T: num::Zero + std::fmt::Debug> {
    entries: [[Polynomial<T>; 3]; 3],
}

/// Signs of the anti-diagonal matrix used by the involution.
const INVOLUTION_SIGNS: [i64; 3] = [1, -1, 1];

impl<T: Scalar> PolynomialMatrix<T> {
    pub fn from_fn(mut entry: impl FnMut(usize, usize) -> Polynomial<T>) -> Self {
        Self {
            entries: array::from_fn(|i| array::from_fn(|j| entry(i, j))),
        }
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| {
            if i == j {
                Polynomial::one()
            } else {
                Polynomial::zero()
            }
        })
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &Polynomial<T> {
        &self.entries[row][col]
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_fn(|i, j| {
            (0..3).fold(Polynomial::zero(), |acc, k| {
                &acc + &(&self.entries[i][k] * &other.entries[k][j])
            })
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.entries[j][i].clone())
    }

    /// The matrix `X(-λ)`.
    pub fn reflect(&self) -> Self {
        Self::from_fn(|i, j| self.entries[i][j].reflect())
    }

    /// Numeric value at a point.
    pub fn eval(&self, point: &T) -> [[T; 3]; 3] {
        array::from_fn(|i| array::from_fn(|j| self.entries[i][j].eval(point)))
    }

    /// Signed cofactor of entry `(row, col)`.
    pub fn cofactor(&self, row: usize, col: usize) -> Polynomial<T> {
        let rows: Vec<usize> = (0..3).filter(|&r| r != row).collect();
        let cols: Vec<usize> = (0..3).filter(|&c| c != col).collect();
        let minor = &(&self.entries[rows[0]][cols[0]] * &self.entries[rows[1]][cols[1]])
            - &(&self.entries[rows[0]][cols[1]] * &self.entries[rows[1]][cols[0]]);
        if (row + col) % 2 == 0 {
            minor
        } else {
            -&minor
        }
    }

    /// Adjugate (transposed cofactor matrix).
    pub fn adjugate(&self) -> Self {
        Self::from_fn(|i, j| self.cofactor(j, i))
    }

    /// Determinant as a polynomial.
    pub fn det(&self) -> Polynomial<T> {
        (0..3).fold(Polynomial::zero(), |acc, j| {
            &acc + &(&self.entries[0][j] * &self.cofactor(0, j))
        })
    }

    /// `J · X · J` with `J` anti-diagonal with entries (1, -1, 1).
    pub fn conjugate_by_involution_sign(&self) -> Self {
        Self::from_fn(|i, j| {
            let sign = INVOLUTION_SIGNS[i] * INVOLUTION_SIGNS[j];
            let entry = &self.entries[2 - i][2 - j];
            if sign > 0 {
                entry.clone()
            } else {
                -entry
            }
        })
    }

    /// Whether the determinant is the constant one (exactly for exact
    /// scalars, to a relative 1e-9 in binary64).
    pub fn is_unimodular(&self) -> bool {
        let residual = &self.det() - &Polynomial::one();
        if T::EXACT {
            return residual.is_zero();
        }
        let scale = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[i][j].max_abs_coeff())
            .fold(1.0, f64::max);
        residual.max_abs_coeff() <= 1e-9 * scale.powi(3)
    }

    /// Maximum entrywise coefficient difference.
    pub fn max_coeff_difference(&self, other: &Self) -> f64 {
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (&self.entries[i][j] - &other.entries[i][j]).max_abs_coeff())
            .fold(0.0, f64::max)
    }

    /// Entry degrees (`None` for zero entries).
    pub fn degrees(&self) -> [[Option<usize>; 3]; 3] {
        array::from_fn(|i| array::from_fn(|j| self.entries[i][j].degree()))
    }

    pub fn to_f64(&self) -> PolynomialMatrix<f64> {
        PolynomialMatrix::from_fn(|i, j| self.entries[i][j].to_f64())
    }
}

/// The involution `X ↦ J X(-λ)^{-T} J`, computed division-free through
/// cofactors since `det X = 1`.
pub fn sigma_involution<T: Scalar>(matrix: &PolynomialMatrix<T>) -> Result<PolynomialMatrix<T>> {
    if !matrix.is_unimodular() {
        return Err(SpectralError::NotUnimodular);
    }
    // For det X = 1, X^{-T} is the cofactor matrix.
    let reflected = matrix.reflect();
    let cofactors = PolynomialMatrix::from_fn(|i, j| reflected.cofactor(i, j));
    Ok(cofactors.conjugate_by_involution_sign())
}

/// Propagation across a gap of length `gap`: identity except `(3,1) = -λ·gap`.
pub fn propagation_matrix<T: Scalar>(gap: &T) -> PolynomialMatrix<T> {
    let mut m = PolynomialMatrix::identity();
    m.entries[2][0] = Polynomial::monomial(-gap.clone(), 1);
    m
}

/// Jump across a point mass: unit upper triangular with `(1,2) = upper`,
/// `(2,3) = lower` and `(1,3) = upper·lower/2`.
pub fn mass_jump_matrix<T: Scalar>(upper: &T, lower: &T) -> PolynomialMatrix<T> {
    let mut m = PolynomialMatrix::identity();
    m.entries[0][1] = Polynomial::constant(upper.clone());
    m.entries[1][2] = Polynomial::constant(lower.clone());
    m.entries[0][2] = Polynomial::constant(upper.clone() * lower.clone() / T::from_int(2));
    m
}

/// The full transition matrix and its partial products.
#[derive(Clone, Debug)]
pub struct TransitionProducts<T: num::Zero + std::fmt::Debug> {
    /// `S(λ)` (or the twin `S̃(λ)`).
    pub full: PolynomialMatrix<T>,
    /// `T_0, …, T_K`: `T_j` keeps the leftmost factors through the last `j`
    /// mass pairs, so `T_0 = L_{2K}` and `T_K = S`.
    pub partial: Vec<PolynomialMatrix<T>>,
}

/// Builds `S(λ)` (or `S̃(λ)` when `twin`) as the ordered product of
/// propagation and jump factors, recording every partial product.
///
/// The non-twin product places `h_a` in the upper slot at even sites and `g_a`
/// in the lower slot at odd sites; the twin swaps the slots.
pub fn transition_matrix<T: Scalar>(
    meas: &IntervalMeasures<T>,
    twin: bool,
) -> TransitionProducts<T> {
    let k = meas.k();
    let zero = T::zero();
    let mut current = propagation_matrix(&meas.l[2 * k]);
    let mut partial = vec![current.clone()];
    for a in (0..k).rev() {
        let (even_jump, odd_jump) = if twin {
            (
                mass_jump_matrix(&zero, &meas.h[a]),
                mass_jump_matrix(&meas.g[a], &zero),
            )
        } else {
            (
                mass_jump_matrix(&meas.h[a], &zero),
                mass_jump_matrix(&zero, &meas.g[a]),
            )
        };
        current = current
            .mul(&even_jump)
            .mul(&propagation_matrix(&meas.l[2 * a + 1]))
            .mul(&odd_jump)
            .mul(&propagation_matrix(&meas.l[2 * a]));
        partial.push(current.clone());
    }
    TransitionProducts {
        full: current,
        partial,
    }
}

/// Expected entry degrees of the partial product `T_j` (`j ≥ 1`) or its twin
/// (`j ≥ 1`; entries with negative expected degree are zero).
pub fn expected_degrees(j: usize, twin: bool) -> [[Option<usize>; 3]; 3] {
    let j = j as i64;
    let table = if twin {
        [[j - 1, j - 1, j - 2], [j, j, j - 1], [j, j, j - 1]]
    } else {
        [[j, j - 1, j - 1], [j, j - 1, j - 1], [j + 1, j, j]]
    };
    table.map(|row| row.map(|d| usize::try_from(d).ok()))
}

/// The real-line spectral polynomials `(A, B, C)` or their twins.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylNumerators<T: num::Zero + std::fmt::Debug> {
    pub a: Polynomial<T>,
    pub b: Polynomial<T>,
    pub c: Polynomial<T>,
}

impl<T: Scalar> WeylNumerators<T> {
    /// Coefficient `[A]_k` in `A(λ) = Σ (-2λ)^k [A]_k`.
    pub fn scaled_coefficients(poly: &Polynomial<T>) -> Vec<T> {
        let minus_two = T::from_int(-2);
        poly.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.clone() / Scalar::powi(&minus_two, k as i32))
            .collect()
    }
}

/// Multiplies the real-line jump matrices onto `(1, 0, 0)` from site 1 to
/// site 2K. In the non-twin product, odd sites use the "lower" jump form and
/// even sites the "upper" form; the twin swaps the forms.
pub fn abc_polynomials<T: Scalar>(data: &RealLineData<T>, twin: bool) -> WeylNumerators<T> {
    let two = T::from_int(2);
    let mut a = Polynomial::one();
    let mut b = Polynomial::zero();
    let mut c = Polynomial::zero();
    for site in 0..data.exp_x.len() {
        let weight = data.mass(site);
        let q = data.exp_x[site].clone();
        let odd_site = site % 2 == 0;
        if odd_site != twin {
            // B += w e^{x} A + λ w e^{-x} C
            let up = weight.clone() * q.clone();
            let down = weight / q;
            b = &(&b + &a.scale(&up)) + &c.scale(&down).shift_up(1);
        } else {
            // A -= 2λ w e^{-x} B ;  C += 2 w e^{x} B
            let down = two.clone() * weight.clone() / q.clone();
            let up = two.clone() * weight * q;
            a = &a - &b.scale(&down).shift_up(1);
            c = &c + &b.scale(&up);
        }
    }
    WeylNumerators { a, b, c }
}

/// Values of `A`, `B`, `C` (or their twins) at one point, together with
/// their derivatives in λ, from the same jump recursion as
/// [`abc_polynomials`] run on numbers instead of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct PointValues<T> {
    /// `[A, B, C]` at the point.
    pub value: [T; 3],
    /// `[A', B', C']` at the point.
    pub slope: [T; 3],
}

/// Evaluates the real-line spectral polynomials and their derivatives at
/// `point` without forming the polynomials.
///
/// Only ring operations and division are needed, so this also runs on
/// extended-precision floats. `unit` is the number one in `T`.
pub fn abc_at<T>(data: &RealLineData<T>, point: &T, twin: bool, unit: &T) -> PointValues<T>
where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    let zero = unit.clone() - unit.clone();
    let two = unit.clone() + unit.clone();
    let [mut a, mut b, mut c] = [unit.clone(), zero.clone(), zero.clone()];
    let [mut da, mut db, mut dc] = [zero.clone(), zero.clone(), zero];
    for (site, q) in data.exp_x.iter().enumerate() {
        let weight = if site % 2 == 0 {
            data.m_odd[site / 2].clone()
        } else {
            data.n_even[site / 2].clone()
        };
        let q = q.clone();
        let odd_site = site % 2 == 0;
        if odd_site != twin {
            let up = weight.clone() * q.clone();
            let down = weight / q;
            b = b + up.clone() * a.clone() + down.clone() * point.clone() * c.clone();
            db = db + up * da.clone() + down * (c.clone() + point.clone() * dc.clone());
        } else {
            let down = two.clone() * weight.clone() / q.clone();
            let up = two.clone() * weight * q;
            a = a - down.clone() * point.clone() * b.clone();
            da = da - down * (b.clone() + point.clone() * db.clone());
            c = c + up.clone() * b.clone();
            dc = dc + up * db.clone();
        }
    }
    PointValues {
        value: [a, b, c],
        slope: [da, db, dc],
    }
}

/// One interval of the piecewise wavefunction: `φ₁`, `φ₂` constant and `φ₃`
/// linear in `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WavePiece<T> {
    pub y_left: T,
    pub y_right: T,
    pub phi1: T,
    pub phi2: T,
    pub phi3_left: T,
    pub phi3_right: T,
}

/// Piecewise description of `Φ(y)` on (-1, 1) started from `(1, 0, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Wavefunction<T> {
    pub pieces: Vec<WavePiece<T>>,
    /// `Φ(1)`, equal to the first column of the transition matrix.
    pub endpoint: [T; 3],
}

/// Evaluates the wavefunction at a fixed λ, interval by interval.
pub fn evaluate_wavefunction<T: Scalar>(
    meas: &IntervalMeasures<T>,
    lambda: &T,
    twin: bool,
) -> Wavefunction<T> {
    let mut phi = [T::one(), T::zero(), T::zero()];
    let mut pieces = Vec::with_capacity(meas.l.len());
    let mut left = -T::one();
    for (k, gap) in meas.l.iter().enumerate() {
        let right = meas.y.get(k).cloned().unwrap_or_else(T::one);
        let phi3_right = phi[2].clone() - lambda.clone() * gap.clone() * phi[0].clone();
        pieces.push(WavePiece {
            y_left: left,
            y_right: right.clone(),
            phi1: phi[0].clone(),
            phi2: phi[1].clone(),
            phi3_left: phi[2].clone(),
            phi3_right: phi3_right.clone(),
        });
        phi[2] = phi3_right;
        if k < meas.y.len() {
            let odd_site = k % 2 == 0;
            let weight = if odd_site {
                meas.g[k / 2].clone()
            } else {
                meas.h[k / 2].clone()
            };
            if odd_site != twin {
                phi[1] = phi[1].clone() + weight * phi[2].clone();
            } else {
                phi[0] = phi[0].clone() + weight * phi[1].clone();
            }
        }
        left = right;
    }
    Wavefunction {
        pieces,
        endpoint: phi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num::BigRational;

    type Q = BigRational;

    fn sample_measures() -> IntervalMeasures<Q> {
        RealLineData {
            exp_x: vec![
                ratio(1, 4),
                ratio(2, 3),
                ratio(1, 1),
                ratio(3, 1),
                ratio(7, 2),
                ratio(9, 1),
            ],
            m_odd: vec![ratio(1, 2), ratio(3, 1), ratio(2, 7)],
            n_even: vec![ratio(5, 4), ratio(1, 3), ratio(2, 1)],
        }
        .to_interval()
        .unwrap()
    }

    fn poly(coeffs: Vec<Q>) -> Polynomial<Q> {
        Polynomial::new(coeffs)
    }

    #[test]
    fn point_values_match_the_polynomials() {
        let data = RealLineData {
            exp_x: vec![
                ratio(1, 4),
                ratio(2, 3),
                ratio(1, 1),
                ratio(3, 1),
                ratio(7, 2),
                ratio(9, 1),
            ],
            m_odd: vec![ratio(1, 2), ratio(3, 1), ratio(2, 7)],
            n_even: vec![ratio(5, 4), ratio(1, 3), ratio(2, 1)],
        };
        let point = ratio(-5, 3);
        for twin in [false, true] {
            let polys = abc_polynomials(&data, twin);
            let at = abc_at(&data, &point, twin, &ratio(1, 1));
            for (slot, poly) in [&polys.a, &polys.b, &polys.c].into_iter().enumerate() {
                assert_eq!(at.value[slot], poly.eval(&point));
                assert_eq!(at.slope[slot], poly.derivative().eval(&point));
            }
        }
    }

    #[test]
    fn propagation_and_jump_matrices() {
        assert_eq!(
            propagation_matrix(&ratio(0, 1)),
            PolynomialMatrix::<Q>::identity()
        );
        let prop = propagation_matrix(&ratio(1, 1));
        assert_eq!(prop.get(2, 0), &poly(vec![ratio(0, 1), ratio(-1, 1)]));
        assert_eq!(
            prop.eval(&ratio(0, 1)),
            PolynomialMatrix::<Q>::identity().eval(&ratio(0, 1))
        );
        assert_eq!(
            mass_jump_matrix(&ratio(0, 1), &ratio(0, 1)),
            PolynomialMatrix::<Q>::identity()
        );
        let product = mass_jump_matrix(&ratio(2, 1), &ratio(0, 1))
            .mul(&mass_jump_matrix(&ratio(0, 1), &ratio(5, 1)));
        assert_eq!(product.get(0, 2), &Polynomial::constant(ratio(10, 1)));
    }

    #[test]
    fn involution_fixes_propagation_and_swaps_jump_slots() {
        let prop = propagation_matrix(&ratio(3, 7));
        assert_eq!(sigma_involution(&prop).unwrap(), prop);
        let jump = mass_jump_matrix(&ratio(2, 3), &ratio(5, 1));
        assert_eq!(
            sigma_involution(&jump).unwrap(),
            mass_jump_matrix(&ratio(5, 1), &ratio(2, 3))
        );
        let id = PolynomialMatrix::<Q>::identity();
        assert_eq!(sigma_involution(&id).unwrap(), id);
        let mut scaled = PolynomialMatrix::<Q>::identity();
        scaled.entries[0][0] = Polynomial::constant(ratio(2, 1));
        assert_eq!(sigma_involution(&scaled), Err(SpectralError::NotUnimodular));
    }

    #[test]
    fn single_pair_matrices_match_closed_forms() {
        let meas = IntervalMeasures {
            y: vec![ratio(-1, 2), ratio(1, 2)],
            l: vec![ratio(1, 2), ratio(1, 1), ratio(1, 2)],
            g: vec![ratio(3, 1)],
            h: vec![ratio(5, 1)],
        };
        let (g, h, l0, l1, l2) = (
            ratio(3, 1),
            ratio(5, 1),
            ratio(1, 2),
            ratio(1, 1),
            ratio(1, 2),
        );
        let s = transition_matrix(&meas, false).full;
        let zero = ratio(0, 1);
        assert_eq!(
            s.get(2, 0),
            &poly(vec![
                zero.clone(),
                ratio(-2, 1),
                g.clone() * h.clone() * l0.clone() * l2.clone()
            ])
        );
        assert_eq!(
            s.get(1, 0),
            &poly(vec![zero.clone(), -(g.clone() * l0.clone())])
        );
        assert_eq!(
            s.get(0, 0),
            &poly(vec![ratio(1, 1), -(g.clone() * h.clone() * l0.clone())])
        );
        assert_eq!(
            s.get(2, 1),
            &poly(vec![zero.clone(), -(h.clone() * l2.clone())])
        );
        let twin = transition_matrix(&meas, true).full;
        assert_eq!(twin.get(2, 0), &poly(vec![zero.clone(), ratio(-2, 1)]));
        assert_eq!(
            twin.get(1, 0),
            &poly(vec![zero.clone(), -(h.clone() * (l0 + l1.clone()))])
        );
        assert_eq!(twin.get(2, 1), &poly(vec![zero, -(g * (l1 + l2))]));
    }

    #[test]
    fn unimodular_and_twin_by_involution() {
        let meas = sample_measures();
        let s = transition_matrix(&meas, false);
        let twin = transition_matrix(&meas, true);
        for (t, tt) in s.partial.iter().zip(&twin.partial) {
            assert_eq!(t.det(), Polynomial::one());
            assert_eq!(&sigma_involution(t).unwrap(), tt);
        }
        assert_eq!(sigma_involution(&twin.full).unwrap(), s.full);
    }

    #[test]
    fn degree_tables_hold_exactly() {
        let meas = sample_measures();
        let s = transition_matrix(&meas, false);
        let twin = transition_matrix(&meas, true);
        for j in 1..=3 {
            assert_eq!(s.partial[j].degrees(), expected_degrees(j, false), "T_{j}");
            assert_eq!(
                twin.partial[j].degrees(),
                expected_degrees(j, true),
                "twin T_{j}"
            );
        }
    }

    #[test]
    fn real_line_and_interval_first_columns_agree() {
        let data = RealLineData {
            exp_x: vec![ratio(1, 4), ratio(2, 3), ratio(1, 1), ratio(3, 1)],
            m_odd: vec![ratio(1, 2), ratio(3, 1)],
            n_even: vec![ratio(5, 4), ratio(1, 3)],
        };
        let meas = data.to_interval().unwrap();
        for twin in [false, true] {
            let s = transition_matrix(&meas, twin).full;
            let abc = abc_polynomials(&data, twin);
            let minus_two_lambda = poly(vec![ratio(0, 1), ratio(-2, 1)]);
            assert_eq!(s.get(2, 0), &(&minus_two_lambda * &abc.a));
            assert_eq!(s.get(1, 0), &(&minus_two_lambda * &abc.b));
            assert_eq!(s.get(0, 0), &(&abc.a - &abc.c.shift_up(1)));
        }
        let abc = abc_polynomials(&data, false);
        assert_eq!(
            (abc.a.degree(), abc.b.degree(), abc.c.degree()),
            (Some(2), Some(1), Some(1))
        );
        let twin = abc_polynomials(&data, true);
        assert_eq!(
            (twin.a.degree(), twin.b.degree(), twin.c.degree()),
            (Some(1), Some(1), Some(0))
        );
    }

    #[test]
    fn single_pair_real_line_polynomials() {
        let data = RealLineData {
            exp_x: vec![ratio(1, 2), ratio(3, 1)],
            m_odd: vec![ratio(2, 1)],
            n_even: vec![ratio(5, 1)],
        };
        let abc = abc_polynomials(&data, false);
        // A = 1 - 2λ m n E₁₂ with E₁₂ = q₁/q₂.
        let e12 = ratio(1, 6);
        assert_eq!(
            abc.a,
            poly(vec![ratio(1, 1), ratio(-2, 1) * ratio(10, 1) * e12])
        );
        assert_eq!(abc.b, Polynomial::constant(ratio(1, 1)));
        assert_eq!(abc_polynomials(&data, true).a, Polynomial::one());
    }

    #[test]
    fn wavefunction_endpoint_is_first_column() {
        let meas = sample_measures();
        for twin in [false, true] {
            let s = transition_matrix(&meas, twin).full;
            let lambda = ratio(7, 5);
            let wave = evaluate_wavefunction(&meas, &lambda, twin);
            let values = s.eval(&lambda);
            for i in 0..3 {
                assert_eq!(wave.endpoint[i], values[i][0]);
            }
            let at_zero = evaluate_wavefunction(&meas, &ratio(0, 1), twin);
            for piece in &at_zero.pieces {
                assert_eq!(
                    (piece.phi1.clone(), piece.phi2.clone()),
                    (ratio(1, 1), ratio(0, 1))
                );
                assert_eq!(piece.phi3_right, ratio(0, 1));
            }
        }
    }
}
