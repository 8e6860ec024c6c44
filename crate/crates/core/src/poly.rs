//! Dense univariate polynomials in the spectral variable λ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// A polynomial stored as coefficients from low to high degree.
///
/// The highest stored coefficient is nonzero unless the polynomial is zero,
/// in which case the coefficient vector is empty.
#[derive(Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    /// Builds a polynomial from low-to-high coefficients, trimming exact zeros
    /// at the top.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(value: T) -> Self {
        Self::new(vec![value])
    }

    /// `coefficient · λ^power`.
    pub fn monomial(coefficient: T, power: usize) -> Self {
        let mut coeffs = vec![T::zero(); power + 1];
        coeffs[power] = coefficient;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `λ^power` (zero beyond the degree).
    pub fn coeff(&self, power: usize) -> T {
        self.coeffs.get(power).cloned().unwrap_or_else(T::zero)
    }

    /// Highest nonzero coefficient (zero for the zero polynomial).
    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    /// Horner evaluation.
    pub fn eval(&self, point: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * point.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * T::from_int(k as i64))
                .collect(),
        )
    }

    /// The polynomial `λ ↦ p(-λ)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    pub fn scale(&self, factor: &T) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
        )
    }

    /// Exact division by `λ`, discarding the constant term.
    pub fn shift_down(&self) -> Self {
        Self::new(self.coeffs.iter().skip(1).cloned().collect())
    }

    /// Multiplication by `λ^power`.
    pub fn shift_up(&self, power: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Converts coefficients to binary64.
    pub fn to_f64(&self) -> Polynomial<f64> {
        Polynomial::new(self.coeffs.iter().map(Scalar::approx).collect())
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.approx().abs())
            .fold(0.0, f64::max)
    }
}

impl Polynomial<f64> {
    /// Sum of `|c_k| |λ|^k`, the natural scale against which a rounded
    /// evaluation at `point` should be judged.
    pub fn eval_magnitude(&self, point: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * point.abs() + c.abs())
    }
}

impl<T: fmt::Debug + num::Zero> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c:?}"),
                1 => format!("{c:?}·λ"),
                _ => format!("{c:?}·λ^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, other: Self) -> Polynomial<T> {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, other: Self) -> Polynomial<T> {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, other: Self) -> Polynomial<T> {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(coeffs)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}
