//! Moments, Cauchy-kernel bimoments, the subset sums `J^{rs}_{nm}`, their
//! starred counterparts and the determinant identities tying them together.
//!
//! For discrete measures `α = Σ a_i δ_{λ_i}` (A atoms) and
//! `β = Σ b_j δ_{μ_j}` (B atoms),
//!
//! `J^{rs}_{nm} = Σ_{|I|=n, |J|=m} Δ_I² Δ̃_J² / Γ_IJ · Π_{i∈I} λ_i^r a_i · Π_{j∈J} μ_j^s b_j`,
//!
//! where `Δ_I²` is the squared Vandermonde product over `I`, `Γ_IJ` the product
//! of `λ_i + μ_j` over `I × J`. Subsets are enumerated lexicographically, so
//! the cost is `C(A,n)·C(B,m)` terms; this is comfortable up to about ten
//! atoms per measure.

use std::collections::HashMap;

use itertools::Itertools;
use serde::Serialize;

use crate::core_types::{AdjointResidues, SpectralData};
use crate::error::{Result, SpectralError};
use crate::linalg::{determinant, minor_matrix, Matrix};
use crate::poly::Polynomial;
use crate::scalar::{lift_all, Scalar};

/// A finite positive measure on the positive half-line.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<T> {
    /// Strictly increasing atom locations.
    pub support: Vec<T>,
    /// Positive atom weights.
    pub weights: Vec<T>,
}

impl DiscreteMeasure<f64> {
    /// The same measure in another arithmetic backend.
    pub fn lift<T: Scalar>(&self) -> DiscreteMeasure<T> {
        DiscreteMeasure {
            support: lift_all(&self.support),
            weights: lift_all(&self.weights),
        }
    }
}

impl<T: Scalar> DiscreteMeasure<T> {
    /// Builds a measure, checking shape, ordering and positivity.
    pub fn new(support: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(SpectralError::Invalid(
                "support and weights differ in length".into(),
            ));
        }
        if !support.windows(2).all(|w| w[0] < w[1]) {
            return Err(SpectralError::Invalid(
                "support must increase strictly".into(),
            ));
        }
        if !support.iter().chain(&weights).all(|v| v.is_positive()) {
            return Err(SpectralError::Invalid(
                "support and weights must be positive".into(),
            ));
        }
        Ok(Self { support, weights })
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Index of a subset sum `J^{rs}_{nm}`: subset sizes `n`, `m` and power
/// exponents `r`, `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HeineSumKey {
    pub n: usize,
    pub m: usize,
    pub r: i32,
    pub s: i32,
}

impl HeineSumKey {
    pub fn new(n: usize, m: usize, r: i32, s: i32) -> Self {
        Self { n, m, r, s }
    }
}

/// `Σ w_i x_i^k`.
pub fn moment<T: Scalar>(measure: &DiscreteMeasure<T>, k: i32) -> T {
    measure
        .support
        .iter()
        .zip(&measure.weights)
        .fold(T::zero(), |acc, (x, w)| acc + w.clone() * x.powi(k))
}

/// `I_ab = Σ_i Σ_j λ_i^a μ_j^b a_i b_j / (λ_i + μ_j)`.
pub fn bimoment<T: Scalar>(
    alpha: &DiscreteMeasure<T>,
    beta: &DiscreteMeasure<T>,
    a: i32,
    b: i32,
) -> T {
    let mut total = T::zero();
    for (x, wa) in alpha.support.iter().zip(&alpha.weights) {
        for (y, wb) in beta.support.iter().zip(&beta.weights) {
            total =
                total + x.powi(a) * y.powi(b) * wa.clone() * wb.clone() / (x.clone() + y.clone());
        }
    }
    total
}

fn squared_vandermonde<T: Scalar>(points: &[T], subset: &[usize]) -> T {
    subset
        .iter()
        .tuple_combinations()
        .fold(T::one(), |acc, (&i, &j)| {
            let diff = points[i].clone() - points[j].clone();
            acc * diff.clone() * diff
        })
}

/// Evaluates `J^{rs}_{nm}` as a subset sum. Returns exactly zero when a subset
/// size exceeds the number of atoms, and one when `n = m = 0`.
pub fn heine_sum<T: Scalar>(
    alpha: &DiscreteMeasure<T>,
    beta: &DiscreteMeasure<T>,
    key: HeineSumKey,
) -> T {
    let HeineSumKey { n, m, r, s } = key;
    if n > alpha.len() || m > beta.len() {
        return T::zero();
    }
    let side_factors =
        |measure: &DiscreteMeasure<T>, size: usize, power: i32| -> Vec<(Vec<usize>, T)> {
            (0..measure.len())
                .combinations(size)
                .map(|subset| {
                    let weight = subset.iter().fold(T::one(), |acc, &i| {
                        acc * measure.support[i].powi(power) * measure.weights[i].clone()
                    });
                    let factor = squared_vandermonde(&measure.support, &subset) * weight;
                    (subset, factor)
                })
                .collect()
        };
    let left = side_factors(alpha, n, r);
    let right = side_factors(beta, m, s);
    let mut total = T::zero();
    for (subset_i, factor_i) in &left {
        for (subset_j, factor_j) in &right {
            let cauchy = subset_i.iter().fold(T::one(), |acc, &i| {
                subset_j.iter().fold(acc, |acc, &j| {
                    acc * (alpha.support[i].clone() + beta.support[j].clone())
                })
            });
            total = total + factor_i.clone() * factor_j.clone() / cauchy;
        }
    }
    total
}

/// Memoized access to the moments, bimoments and subset sums of one pair of
/// measures. Each instance is private to a computation, so independent
/// computations never share mutable state.
pub struct HeineTable<'a, T> {
    pub alpha: &'a DiscreteMeasure<T>,
    pub beta: &'a DiscreteMeasure<T>,
    sums: HashMap<HeineSumKey, T>,
    bimoments: HashMap<(i32, i32), T>,
}

impl<'a, T: Scalar> HeineTable<'a, T> {
    pub fn new(alpha: &'a DiscreteMeasure<T>, beta: &'a DiscreteMeasure<T>) -> Self {
        Self {
            alpha,
            beta,
            sums: HashMap::new(),
            bimoments: HashMap::new(),
        }
    }

    /// `J^{rs}_{nm}`.
    pub fn j(&mut self, n: usize, m: usize, r: i32, s: i32) -> T {
        let key = HeineSumKey::new(n, m, r, s);
        let (alpha, beta) = (self.alpha, self.beta);
        self.sums
            .entry(key)
            .or_insert_with(|| heine_sum(alpha, beta, key))
            .clone()
    }

    /// `I_ab`.
    pub fn bimoment(&mut self, a: i32, b: i32) -> T {
        let (alpha, beta) = (self.alpha, self.beta);
        self.bimoments
            .entry((a, b))
            .or_insert_with(|| bimoment(alpha, beta, a, b))
            .clone()
    }

    /// `α_k`.
    pub fn alpha_moment(&self, k: i32) -> T {
        moment(self.alpha, k)
    }

    /// `β_k`.
    pub fn beta_moment(&self, k: i32) -> T {
        moment(self.beta, k)
    }

    /// Number of distinct subset sums evaluated so far.
    pub fn cached_sums(&self) -> usize {
        self.sums.len()
    }
}

/// Closed form for starred sums in terms of unstarred ones, valid when the
/// second measure has one atom fewer than the first (`B = A - 1`):
///
/// `(J*)^{rs}_{nm} = L^{2n-m+r-1} M^{2m-n+s-1} J^{1-r,1-s}_{A-n,B-m} / (2^{n+m} J^{00}_{AB})`
///
/// with `L = Π λ_i` and `M = Π μ_j`.
pub fn starred_closed_form<T: Scalar>(
    alpha: &DiscreteMeasure<T>,
    beta: &DiscreteMeasure<T>,
    key: HeineSumKey,
) -> Result<T> {
    let (atoms_a, atoms_b) = (alpha.len(), beta.len());
    if atoms_b + 1 != atoms_a {
        return Err(SpectralError::Invalid(format!(
            "starred symmetry needs B = A - 1 atoms, got A = {atoms_a}, B = {atoms_b}"
        )));
    }
    let HeineSumKey { n, m, r, s } = key;
    if n > atoms_a || m > atoms_b {
        return Ok(T::zero());
    }
    let lambda_product = alpha.support.iter().cloned().fold(T::one(), |a, b| a * b);
    let mu_product = beta.support.iter().cloned().fold(T::one(), |a, b| a * b);
    let (n_i, m_i) = (n as i32, m as i32);
    let complement = heine_sum(
        alpha,
        beta,
        HeineSumKey::new(atoms_a - n, atoms_b - m, 1 - r, 1 - s),
    );
    let full = heine_sum(alpha, beta, HeineSumKey::new(atoms_a, atoms_b, 0, 0));
    Ok(lambda_product.powi(2 * n_i - m_i + r - 1)
        * mu_product.powi(2 * m_i - n_i + s - 1)
        * complement
        / (T::from_int(2).powi(n_i + m_i) * full))
}

/// A starred sum evaluated directly from the starred measures and through the
/// closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StarredHeine {
    pub direct: f64,
    pub closed_form: f64,
}

impl StarredHeine {
    pub fn relative_difference(&self) -> f64 {
        relative_residual(
            self.direct,
            self.closed_form,
            self.direct.abs().max(self.closed_form.abs()),
        )
    }
}

/// The spectral measures `α = Σ a_i δ_{λ_i}` and `β = Σ b_j δ_{μ_j}`.
pub fn spectral_measures(data: &SpectralData) -> (DiscreteMeasure<f64>, DiscreteMeasure<f64>) {
    (
        DiscreteMeasure {
            support: data.lambda.clone(),
            weights: data.a.clone(),
        },
        DiscreteMeasure {
            support: data.mu.clone(),
            weights: data.b.clone(),
        },
    )
}

/// The starred measures `α* = Σ a*_i δ_{λ_i}` and `β* = Σ b*_j δ_{μ_j}`.
pub fn starred_measures(
    data: &SpectralData,
    adjoint: &AdjointResidues,
) -> (DiscreteMeasure<f64>, DiscreteMeasure<f64>) {
    (
        DiscreteMeasure {
            support: data.lambda.clone(),
            weights: adjoint.a_star.clone(),
        },
        DiscreteMeasure {
            support: data.mu.clone(),
            weights: adjoint.b_star.clone(),
        },
    )
}

/// `(J*)^{rs}_{nm}` computed both directly and by the closed form.
pub fn starred_heine(
    data: &SpectralData,
    adjoint: &AdjointResidues,
    key: HeineSumKey,
) -> Result<StarredHeine> {
    let (alpha, beta) = spectral_measures(data);
    let (alpha_star, beta_star) = starred_measures(data, adjoint);
    Ok(StarredHeine {
        direct: heine_sum(&alpha_star, &beta_star, key),
        closed_form: starred_closed_form(&alpha, &beta, key)?,
    })
}

/// The two families of products that stay positive for spectral measures
/// (`K` atoms in `α`, `K-1` in `β`):
///
/// - `J⁰⁰_{j,j-1} J¹¹_{j-1,j-1} - J⁰⁰_{jj} J¹¹_{j-1,j-2}` for `j = 2..K-1`
/// - `J⁰⁰_{jj} J¹¹_{j,j-1} - J⁰⁰_{j+1,j} J¹¹_{j-1,j-1}` for `j = 1..K-1`
///
/// Each entry pairs a label with the value of the left-hand side.
pub fn distance_inequalities<T: Scalar>(
    alpha: &DiscreteMeasure<T>,
    beta: &DiscreteMeasure<T>,
) -> Vec<(String, T)> {
    let k = alpha.len();
    let mut table = HeineTable::new(alpha, beta);
    let mut out = Vec::new();
    for j in 2..k {
        let value = table.j(j, j - 1, 0, 0) * table.j(j - 1, j - 1, 1, 1)
            - table.j(j, j, 0, 0) * table.j(j - 1, j - 2, 1, 1);
        out.push((format!("first family, j = {j}"), value));
    }
    for j in 1..k {
        let value = table.j(j, j, 0, 0) * table.j(j, j - 1, 1, 1)
            - table.j(j + 1, j, 0, 0) * table.j(j - 1, j - 1, 1, 1);
        out.push((format!("second family, j = {j}"), value));
    }
    out
}

/// `|lhs - rhs| / scale` (zero when both sides vanish).
pub fn relative_residual(lhs: f64, rhs: f64, scale: f64) -> f64 {
    let diff = (lhs - rhs).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / scale.abs().max(f64::MIN_POSITIVE)
    }
}

/// One evaluated identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck<T> {
    pub name: String,
    pub lhs: T,
    pub rhs: T,
    /// Magnitude against which the residual is judged.
    pub scale: f64,
}

impl<T: Scalar> IdentityCheck<T> {
    /// Whether both sides agree exactly.
    pub fn exact(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn relative_residual(&self) -> f64 {
        relative_residual(self.lhs.approx(), self.rhs.approx(), self.scale)
    }
}

/// All checks produced by [`determinant_identity_suite`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeterminantReport<T> {
    pub checks: Vec<IdentityCheck<T>>,
}

impl<T: Scalar> DeterminantReport<T> {
    pub fn max_relative_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(IdentityCheck::relative_residual)
            .fold(0.0, f64::max)
    }

    pub fn all_exact(&self) -> bool {
        self.checks.iter().all(IdentityCheck::exact)
    }
}

fn square<T: Scalar>(size: usize, mut entry: impl FnMut(usize, usize) -> T) -> Matrix<T> {
    (0..size)
        .map(|i| (0..size).map(|j| entry(i, j)).collect())
        .collect()
}

/// The `n × n` determinant with first row `I_00 + ½, I_10, …, I_{1,n-2}` and
/// row `i ≥ 1` equal to `I_{i0}, I_{i+1,0}, …, I_{i+1,n-2}`.
pub fn k_determinant<T: Scalar>(table: &mut HeineTable<'_, T>, n: usize) -> T {
    let matrix = square(n, |i, j| {
        let value = if j == 0 {
            table.bimoment(i as i32, 0)
        } else {
            table.bimoment(i as i32 + 1, j as i32 - 1)
        };
        if i == 0 && j == 0 {
            value + T::half()
        } else {
            value
        }
    });
    determinant(&matrix)
}

/// `K_n` through the recurrence that links it to subset sums, seeded at
/// `K_1 = I_00 + ½`.
pub fn k_by_recurrence<T: Scalar>(table: &mut HeineTable<'_, T>, n: usize) -> T {
    assert!(n >= 1, "K_n is defined for n >= 1");
    let mut ratio = (table.bimoment(0, 0) + T::half()) / table.j(1, 0, 0, 1);
    for step in 1..n {
        let denom_prev = table.j(step, step - 1, 0, 1);
        let denom_next = table.j(step + 1, step, 0, 1);
        let numer = table.j(step, step, 1, 0)
            * (table.j(step + 1, step, 0, 0) + T::half() * table.j(step, step - 1, 1, 1));
        ratio = ratio + numer / (denom_prev * denom_next);
    }
    ratio * table.j(n, n - 1, 0, 1)
}

/// Evaluates every bimoment determinant identity for sizes `1..=max_size`,
/// comparing the determinant side with the subset-sum side.
pub fn determinant_identity_suite<T: Scalar>(
    alpha: &DiscreteMeasure<T>,
    beta: &DiscreteMeasure<T>,
    max_size: usize,
) -> DeterminantReport<T> {
    let mut table = HeineTable::new(alpha, beta);
    let mut checks = Vec::new();
    let mut push = |name: String, lhs: T, rhs: T, scale: f64| {
        checks.push(IdentityCheck {
            name,
            lhs,
            rhs,
            scale,
        });
    };
    let mag = |v: &T| v.approx().abs();
    for n in 1..=max_size {
        for r in 0..=2 {
            for s in 0..=2 {
                let lhs = determinant(&square(n, |i, j| {
                    table.bimoment(r + i as i32, s + j as i32)
                }));
                let rhs = table.j(n, n, r, s);
                let scale = mag(&lhs).max(mag(&rhs));
                push(
                    format!("det(I[r+i, s+j]) = J^{{{r}{s}}}_{{{n}{n}}}"),
                    lhs,
                    rhs,
                    scale,
                );
            }
        }
        for r in 0..=1 {
            for s in 0..=1 {
                let moments: Vec<T> = (0..n).map(|i| table.alpha_moment(r + i as i32)).collect();
                let lhs = determinant(&square(n, |i, j| {
                    if j + 1 == n {
                        moments[i].clone()
                    } else {
                        table.bimoment(r + i as i32, s + j as i32)
                    }
                }));
                let rhs = table.j(n, n - 1, r, s);
                let scale = mag(&lhs).max(mag(&rhs));
                push(
                    format!("moment-column determinant = J^{{{r}{s}}}_{{{n},{}}}", n - 1),
                    lhs,
                    rhs,
                    scale,
                );
            }
        }
        let moments: Vec<T> = (0..n).map(|i| table.alpha_moment(i as i32)).collect();
        let lhs = determinant(&square(n, |i, j| {
            if j == 0 {
                moments[i].clone()
            } else {
                table.bimoment(i as i32 + 1, j as i32 - 1)
            }
        }));
        let rhs = table.j(n, n - 1, 0, 1);
        let scale = mag(&lhs).max(mag(&rhs));
        push(
            format!(
                "leading moment-column determinant = J^{{01}}_{{{n},{}}}",
                n - 1
            ),
            lhs,
            rhs,
            scale,
        );

        for r in 0..=1 {
            for s in 0..=1 {
                let lhs = table.j(n + 1, n + 1, r, s) * table.j(n - 1, n - 1, r + 1, s + 1);
                let first = table.j(n, n, r, s) * table.j(n, n, r + 1, s + 1);
                let second = table.j(n, n, r + 1, s) * table.j(n, n, r, s + 1);
                let scale = mag(&lhs).max(mag(&first)).max(mag(&second));
                push(
                    format!("condensation (square, r={r}, s={s}, n={n})"),
                    lhs,
                    first - second,
                    scale,
                );
            }
        }
        let lhs = table.j(n + 1, n, 0, 1) * table.j(n - 1, n - 1, 2, 0);
        let first = table.j(n, n - 1, 0, 1) * table.j(n, n, 2, 0);
        let second = table.j(n, n - 1, 1, 1) * table.j(n, n, 1, 0);
        let scale = mag(&lhs).max(mag(&first)).max(mag(&second));
        push(
            format!("condensation (rectangular, n={n})"),
            lhs,
            first - second,
            scale,
        );

        if table.j(n, n - 1, 0, 1).is_zero() {
            continue;
        }
        let direct = k_determinant(&mut table, n);
        let recurrence = k_by_recurrence(&mut table, n);
        let scale = mag(&direct).max(mag(&recurrence));
        push(
            format!("K_{n} determinant = K_{n} recurrence"),
            direct,
            recurrence,
            scale,
        );
    }
    DeterminantReport { checks }
}

/// The Cauchy biorthogonal pair `(p_n, q_n)` normalized so that
/// `∬ p_i(x) q_j(y) / (x + y) dα dβ = δ_ij`.
///
/// The normalization divides both polynomials by `√(D_n D_{n+1})`; exact
/// rational data is accepted only when that product is a perfect square.
pub fn biorthogonal_pair<T: Scalar>(
    alpha: &DiscreteMeasure<T>,
    beta: &DiscreteMeasure<T>,
    n: usize,
) -> Result<(Polynomial<T>, Polynomial<T>)> {
    let capacity = alpha.len().min(beta.len());
    if n + 1 > capacity {
        return Err(SpectralError::RankDeficient(format!(
            "degree {n} needs at least {} atoms in each measure, have {capacity}",
            n + 1
        )));
    }
    let mut table = HeineTable::new(alpha, beta);
    let gram = |table: &mut HeineTable<'_, T>, size: usize| {
        square(size, |i, j| table.bimoment(i as i32, j as i32))
    };
    let d_n = determinant(&gram(&mut table, n));
    let big = gram(&mut table, n + 1);
    let d_next = determinant(&big);
    if !(d_n.is_positive() && d_next.is_positive()) {
        return Err(SpectralError::RankDeficient(format!(
            "bimoment determinants D_{n} = {:e}, D_{} = {:e} must be positive",
            d_n.approx(),
            n + 1,
            d_next.approx()
        )));
    }
    let Some(norm) = (d_n * d_next).square_root() else {
        return Err(SpectralError::Invalid(format!(
            "D_{n} D_{} has no square root in this arithmetic",
            n + 1
        )));
    };
    // Expand along the last column (for p) and the last row (for q).
    let cofactor = |row: usize, col: usize| {
        let minor = determinant(&minor_matrix(&big, row, col));
        if (row + col) % 2 == 0 {
            minor
        } else {
            -minor
        }
    };
    let p = Polynomial::new((0..=n).map(|i| cofactor(i, n) / norm.clone()).collect());
    let q = Polynomial::new((0..=n).map(|j| cofactor(n, j) / norm.clone()).collect());
    Ok((p, q))
}

/// `∬ p(x) q(y) / (x + y) dα dβ`.
pub fn cauchy_pairing<T: Scalar>(
    table: &mut HeineTable<'_, T>,
    p: &Polynomial<T>,
    q: &Polynomial<T>,
) -> T {
    let mut total = T::zero();
    for (a, pa) in p.coeffs().iter().enumerate() {
        for (b, qb) in q.coeffs().iter().enumerate() {
            total = total + pa.clone() * qb.clone() * table.bimoment(a as i32, b as i32);
        }
    }
    total
}
