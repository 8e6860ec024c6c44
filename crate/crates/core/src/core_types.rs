//! Shared value types, the change of variables between the real line and the
//! interval (-1, 1), and admissibility checks.
//!
//! Indexing: sites are numbered 1..2K in the mathematical notation and stored
//! 0-based here. Odd site `2a-1` (mass `m`) is stored at `x[2a-2]` and
//! `m_odd[a-1]`; even site `2a` (mass `n`) is stored at `x[2a-1]` and
//! `n_even[a-1]`. Gaps `l_0..l_{2K}` keep their mathematical index.

use num::traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};
use crate::scalar::{lift_all, Scalar};

/// Peakon positions and amplitudes: masses `m` at odd sites and `n` at even
/// sites, alternating along the line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterlacingConfiguration {
    /// Number of mass pairs.
    #[serde(rename = "K")]
    pub k: usize,
    /// Strictly increasing positions `x_1 < … < x_{2K}`.
    pub x: Vec<f64>,
    /// Masses `m_1, m_3, …, m_{2K-1}`.
    pub m_odd: Vec<f64>,
    /// Masses `n_2, n_4, …, n_{2K}`.
    pub n_even: Vec<f64>,
}

/// Spectral coordinates: eigenvalues, residues and the two boundary constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    /// Eigenvalues `λ_1 < … < λ_K`.
    pub lambda: Vec<f64>,
    /// Twin eigenvalues `μ_1 < … < μ_{K-1}`.
    pub mu: Vec<f64>,
    /// Residues of `W` at the `λ_i`.
    pub a: Vec<f64>,
    /// Residues of the twin `W̃` at the `μ_j`.
    pub b: Vec<f64>,
    /// Minus the value of `W̃` at infinity.
    pub b_inf: f64,
    /// Minus the value of the starred twin `W̃*` at infinity.
    pub b_inf_star: f64,
}

/// Configuration transported to the interval: sites `y_k = tanh x_k`, gaps
/// `l_k`, odd weights `g_a` and even weights `h_a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct IntervalMeasures<T = f64> {
    pub y: Vec<T>,
    /// `l_k = y_{k+1} - y_k` with `y_0 = -1`, `y_{2K+1} = 1`.
    pub l: Vec<T>,
    pub g: Vec<T>,
    pub h: Vec<T>,
}

/// Residues of the starred Weyl functions and of `Z`, `Z̃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjointResidues {
    /// Residues of `W*` at the `λ_i`.
    pub a_star: Vec<f64>,
    /// Residues of `W̃*` at the `μ_j`.
    pub b_star: Vec<f64>,
    /// Residues of `Z` at the `λ_i`.
    pub c: Vec<f64>,
    /// Residues of `Z̃` at the `μ_j`.
    pub d: Vec<f64>,
}

/// Real-line data parameterized by `q_k = e^{x_k}`; every jump-matrix entry is
/// rational in these, so exact arithmetic is possible.
#[derive(Clone, Debug, PartialEq)]
pub struct RealLineData<T> {
    pub exp_x: Vec<T>,
    pub m_odd: Vec<T>,
    pub n_even: Vec<T>,
}

/// Outcome of [`validate_admissible`].
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct AdmissibilityReport {
    pub violations: Vec<String>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn strictly_increasing<T: PartialOrd>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

impl InterlacingConfiguration {
    /// Builds and validates a configuration.
    pub fn new(x: Vec<f64>, m_odd: Vec<f64>, n_even: Vec<f64>) -> Result<Self> {
        let config = Self {
            k: m_odd.len(),
            x,
            m_odd,
            n_even,
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks shapes, ordering and positivity, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(first) => Err(SpectralError::Invalid(first)),
            None => Ok(()),
        }
    }

    /// Every violated invariant. Shape problems are reported alone, since
    /// the remaining checks index by `K`.
    pub fn violations(&self) -> Vec<String> {
        let k = self.k;
        if k == 0 {
            return vec!["at least one mass pair is required".into()];
        }
        if self.x.len() != 2 * k || self.m_odd.len() != k || self.n_even.len() != k {
            return vec![format!(
                "shape mismatch: K = {k} needs 2K positions and K masses of each kind, got {}, {}, {}",
                self.x.len(),
                self.m_odd.len(),
                self.n_even.len()
            )];
        }
        let mut found = Vec::new();
        for (i, v) in self.x.iter().enumerate() {
            if !v.is_finite() {
                found.push(format!("x[{i}] is not finite"));
            }
        }
        for (i, w) in self.x.windows(2).enumerate() {
            if w[0] >= w[1] {
                found.push(format!(
                    "positions must increase strictly: x[{i}] = {} >= x[{}] = {}",
                    w[0],
                    i + 1,
                    w[1]
                ));
            }
        }
        for (name, masses) in [("m_odd", &self.m_odd), ("n_even", &self.n_even)] {
            for (i, v) in masses.iter().enumerate() {
                if !(*v > 0.0 && v.is_finite()) {
                    found.push(format!("{name}[{i}] = {v} must be positive"));
                }
            }
        }
        found
    }

    /// Real-line data with `q_k = e^{x_k}`.
    pub fn real_line(&self) -> RealLineData<f64> {
        RealLineData {
            exp_x: self.x.iter().map(|v| v.exp()).collect(),
            m_odd: self.m_odd.clone(),
            n_even: self.n_even.clone(),
        }
    }

    /// Transforms to the interval: `y = tanh x`, `g = 2 m cosh x`,
    /// `h = 2 n cosh x`.
    pub fn to_interval(&self) -> Result<IntervalMeasures> {
        self.validate()?;
        if let Some(index) = self.x.iter().position(|v| v.tanh().abs() >= 1.0) {
            return Err(SpectralError::Overflow {
                index,
                value: self.x[index],
            });
        }
        let n = self.x.len();
        let cosh: Vec<f64> = self.x.iter().map(|v| v.cosh()).collect();
        let y: Vec<f64> = self.x.iter().map(|v| v.tanh()).collect();
        // Gaps are evaluated without subtracting nearby tanh values.
        let mut l = Vec::with_capacity(n + 1);
        l.push(self.x[0].exp() / cosh[0]);
        for k in 0..n - 1 {
            l.push((self.x[k + 1] - self.x[k]).sinh() / (cosh[k] * cosh[k + 1]));
        }
        l.push((-self.x[n - 1]).exp() / cosh[n - 1]);
        let g = (0..self.k)
            .map(|a| 2.0 * self.m_odd[a] * cosh[2 * a])
            .collect();
        let h = (0..self.k)
            .map(|a| 2.0 * self.n_even[a] * cosh[2 * a + 1])
            .collect();
        Ok(IntervalMeasures { y, l, g, h })
    }
}

/// Free-function form of [`InterlacingConfiguration::to_interval`].
pub fn to_interval(config: &InterlacingConfiguration) -> Result<IntervalMeasures> {
    config.to_interval()
}

/// Inverse of [`to_interval`]: `x = atanh y`, masses divided by `2 cosh x`.
pub fn from_interval(meas: &IntervalMeasures) -> Result<InterlacingConfiguration> {
    meas.validate()?;
    let n = meas.y.len();
    // 1 + y_k and 1 - y_k as partial sums of gaps keep full relative accuracy.
    let left: Vec<f64> = (0..n).map(|k| meas.l[..=k].iter().sum()).collect();
    let right: Vec<f64> = (0..n).map(|k| meas.l[k + 1..].iter().sum()).collect();
    let x: Vec<f64> = (0..n).map(|k| 0.5 * (left[k] / right[k]).ln()).collect();
    let cosh: Vec<f64> = x.iter().map(|v| v.cosh()).collect();
    let k = meas.g.len();
    let m_odd = (0..k).map(|a| meas.g[a] / (2.0 * cosh[2 * a])).collect();
    let n_even = (0..k)
        .map(|a| meas.h[a] / (2.0 * cosh[2 * a + 1]))
        .collect();
    InterlacingConfiguration::new(x, m_odd, n_even)
}

impl<T: Scalar> IntervalMeasures<T> {
    /// Number of mass pairs.
    pub fn k(&self) -> usize {
        self.g.len()
    }

    /// Checks shapes, the open-interval condition, positivity and the gap
    /// identities (exactly for exact scalars, to 1e-10 otherwise).
    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 || self.h.len() != k || self.y.len() != 2 * k || self.l.len() != 2 * k + 1 {
            return Err(SpectralError::Invalid(format!(
                "shape mismatch: need 2K sites, 2K+1 gaps and K weights of each kind (K = {k})"
            )));
        }
        let one = T::one();
        for (index, y) in self.y.iter().enumerate() {
            if !(y > &-one.clone() && y < &one) {
                return Err(SpectralError::Domain {
                    index,
                    value: y.approx(),
                });
            }
        }
        if !strictly_increasing(&self.y) {
            return Err(SpectralError::Invalid(
                "sites must increase strictly".into(),
            ));
        }
        for (name, values) in [("l", &self.l), ("g", &self.g), ("h", &self.h)] {
            if let Some(i) = values.iter().position(|v| !v.is_positive()) {
                return Err(SpectralError::Invalid(format!(
                    "{name}[{i}] must be positive"
                )));
            }
        }
        let mut boundaries = vec![-one.clone()];
        boundaries.extend(self.y.iter().cloned());
        boundaries.push(one);
        for (k, gap) in self.l.iter().enumerate() {
            let expected = boundaries[k + 1].clone() - boundaries[k].clone();
            let mismatch = (expected - gap.clone()).abs();
            let bad = if T::EXACT {
                !mismatch.is_zero()
            } else {
                mismatch.approx() > 1e-10
            };
            if bad {
                return Err(SpectralError::Invalid(format!(
                    "gap l[{k}] disagrees with the site differences"
                )));
            }
        }
        Ok(())
    }

    /// `Σ l_k`, which equals 2 for valid measures.
    pub fn total_length(&self) -> T {
        self.l.iter().cloned().fold(T::zero(), |a, b| a + b)
    }
}

impl RealLineData<f64> {
    /// The same data in another arithmetic backend.
    pub fn lift<T: Scalar>(&self) -> RealLineData<T> {
        RealLineData {
            exp_x: lift_all(&self.exp_x),
            m_odd: lift_all(&self.m_odd),
            n_even: lift_all(&self.n_even),
        }
    }
}

impl IntervalMeasures<f64> {
    /// The same measures in another arithmetic backend.
    pub fn lift<T: Scalar>(&self) -> IntervalMeasures<T> {
        IntervalMeasures {
            y: lift_all(&self.y),
            l: lift_all(&self.l),
            g: lift_all(&self.g),
            h: lift_all(&self.h),
        }
    }
}

impl<T: Scalar> RealLineData<T> {
    pub fn k(&self) -> usize {
        self.m_odd.len()
    }

    /// Checks shapes, positivity and ordering of `q_k = e^{x_k}`.
    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 || self.n_even.len() != k || self.exp_x.len() != 2 * k {
            return Err(SpectralError::Invalid(
                "shape mismatch in real-line data".into(),
            ));
        }
        if !self
            .exp_x
            .iter()
            .chain(&self.m_odd)
            .chain(&self.n_even)
            .all(Signed::is_positive)
        {
            return Err(SpectralError::Invalid(
                "exponentials and masses must be positive".into(),
            ));
        }
        if !strictly_increasing(&self.exp_x) {
            return Err(SpectralError::Invalid(
                "positions must increase strictly".into(),
            ));
        }
        Ok(())
    }

    /// Mass at 0-based site `site` (`m` at even storage index, `n` at odd).
    pub fn mass(&self, site: usize) -> T {
        if site % 2 == 0 {
            self.m_odd[site / 2].clone()
        } else {
            self.n_even[site / 2].clone()
        }
    }

    /// `E = e^{-|x_i - x_j|}` for 0-based sites.
    pub fn decay(&self, i: usize, j: usize) -> T {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.exp_x[lo].clone() / self.exp_x[hi].clone()
    }

    /// Exact transform to the interval using only rational operations in `q`.
    pub fn to_interval(&self) -> Result<IntervalMeasures<T>> {
        self.validate()?;
        let two = T::from_int(2);
        let n = self.exp_x.len();
        let q = &self.exp_x;
        let cosh: Vec<T> = q
            .iter()
            .map(|v| (v.clone() + T::one() / v.clone()) / two.clone())
            .collect();
        let y: Vec<T> = q
            .iter()
            .map(|v| {
                let sq = v.clone() * v.clone();
                (sq.clone() - T::one()) / (sq + T::one())
            })
            .collect();
        let mut l = Vec::with_capacity(n + 1);
        l.push(q[0].clone() / cosh[0].clone());
        for k in 0..n - 1 {
            let ratio = q[k + 1].clone() / q[k].clone();
            let sinh = (ratio.clone() - T::one() / ratio) / two.clone();
            l.push(sinh / (cosh[k].clone() * cosh[k + 1].clone()));
        }
        l.push(T::one() / (q[n - 1].clone() * cosh[n - 1].clone()));
        let k = self.k();
        let g = (0..k)
            .map(|a| two.clone() * self.m_odd[a].clone() * cosh[2 * a].clone())
            .collect();
        let h = (0..k)
            .map(|a| two.clone() * self.n_even[a].clone() * cosh[2 * a + 1].clone())
            .collect();
        Ok(IntervalMeasures { y, l, g, h })
    }
}

impl SpectralData {
    pub fn k(&self) -> usize {
        self.lambda.len()
    }

    /// `Π λ_i`.
    pub fn lambda_product(&self) -> f64 {
        self.lambda.iter().product()
    }

    /// `Π μ_j`.
    pub fn mu_product(&self) -> f64 {
        self.mu.iter().product()
    }

    /// `2 λ_1 b∞ b*∞`, which must exceed one when `K = 1`.
    pub fn single_pair_constraint(&self) -> f64 {
        2.0 * self.lambda[0] * self.b_inf * self.b_inf_star
    }
}

/// Lists every violated admissibility condition (shape, ordering, positivity
/// and, for a single pair, the constraint `2 λ_1 b∞ b*∞ > 1`).
pub fn validate_admissible(data: &SpectralData) -> AdmissibilityReport {
    let mut violations = Vec::new();
    let k = data.k();
    if k == 0 {
        violations.push("shape: at least one eigenvalue is required".to_string());
        return AdmissibilityReport { violations };
    }
    if data.a.len() != k || data.mu.len() != k - 1 || data.b.len() != k - 1 {
        violations.push(format!(
            "shape: K = {k} needs K values in lambda and a and K-1 in mu and b"
        ));
        return AdmissibilityReport { violations };
    }
    let finite = data
        .lambda
        .iter()
        .chain(&data.mu)
        .chain(&data.a)
        .chain(&data.b)
        .chain([&data.b_inf, &data.b_inf_star])
        .all(|v| v.is_finite());
    if !finite {
        violations.push("finiteness: all values must be finite".to_string());
        return AdmissibilityReport { violations };
    }
    if !strictly_increasing(&data.lambda) {
        violations.push("ordering: lambda must increase strictly".to_string());
    }
    if !strictly_increasing(&data.mu) {
        violations.push("ordering: mu must increase strictly".to_string());
    }
    for (name, values) in [
        ("lambda", &data.lambda),
        ("mu", &data.mu),
        ("a", &data.a),
        ("b", &data.b),
    ] {
        if let Some(i) = values.iter().position(|&v| v <= 0.0) {
            violations.push(format!(
                "positivity: {name}[{i}] = {} must be positive",
                values[i]
            ));
        }
    }
    if data.b_inf <= 0.0 {
        violations.push("positivity: b_inf must be positive".to_string());
    }
    if data.b_inf_star <= 0.0 {
        violations.push("positivity: b_inf_star must be positive".to_string());
    }
    if k == 1 && data.single_pair_constraint() <= 1.0 {
        violations.push(format!(
            "single-pair constraint: 2*lambda_1*b_inf*b_inf_star = {} must exceed 1",
            data.single_pair_constraint()
        ));
    }
    AdmissibilityReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn unit_example() -> InterlacingConfiguration {
        let x1 = -(0.5f64).atanh();
        let x2 = (0.5f64).atanh();
        InterlacingConfiguration::new(
            vec![x1, x2],
            vec![1.0 / (2.0 * x1.cosh())],
            vec![1.0 / (2.0 * x2.cosh())],
        )
        .unwrap()
    }

    #[test]
    fn single_pair_transform_matches_hand_values() {
        let meas = unit_example().to_interval().unwrap();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-15;
        assert!(close(meas.y[0], -0.5) && close(meas.y[1], 0.5));
        assert!(close(meas.l[0], 0.5) && close(meas.l[1], 1.0) && close(meas.l[2], 0.5));
        assert!(close(meas.g[0], 1.0) && close(meas.h[0], 1.0));
    }

    #[test]
    fn interval_example_maps_back_to_root_three() {
        let meas = IntervalMeasures {
            y: vec![-0.5, 0.5],
            l: vec![0.5, 1.0, 0.5],
            g: vec![1.0],
            h: vec![1.0],
        };
        let config = from_interval(&meas).unwrap();
        let root3 = 3f64.sqrt();
        assert!((config.x[1] - root3.ln()).abs() < 1e-15);
        assert!((config.x[0] + root3.ln()).abs() < 1e-15);
        assert!((config.m_odd[0] - root3 / 4.0).abs() < 1e-15);
        assert!((config.n_even[0] - root3 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_site_is_a_domain_error() {
        let meas = IntervalMeasures {
            y: vec![-1.0, 0.5],
            l: vec![0.0, 1.5, 0.5],
            g: vec![1.0],
            h: vec![1.0],
        };
        assert!(matches!(
            from_interval(&meas),
            Err(SpectralError::Domain { index: 0, .. })
        ));
    }

    #[test]
    fn saturated_positions_overflow() {
        let config = InterlacingConfiguration::new(vec![0.0, 40.0], vec![1.0], vec![1.0]).unwrap();
        assert_eq!(
            config.to_interval(),
            Err(SpectralError::Overflow {
                index: 1,
                value: 40.0
            })
        );
    }

    #[test]
    fn mirrored_configuration_gives_mirrored_measures() {
        let config = InterlacingConfiguration::new(
            vec![-1.5, -0.2, 0.2, 1.5],
            vec![0.7, 1.9],
            vec![1.9, 0.7],
        )
        .unwrap();
        let meas = config.to_interval().unwrap();
        for a in 0..2 {
            assert!((meas.g[a] - meas.h[1 - a]).abs() < 1e-14);
        }
        for k in 0..5 {
            assert!((meas.l[k] - meas.l[4 - k]).abs() < 1e-15);
        }
        assert!((meas.total_length() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_transform_has_unit_total_and_matches_float() {
        let data = RealLineData {
            exp_x: vec![ratio(1, 3), ratio(1, 2), ratio(3, 2), ratio(5, 1)],
            m_odd: vec![ratio(2, 5), ratio(7, 3)],
            n_even: vec![ratio(1, 1), ratio(1, 4)],
        };
        let meas = data.to_interval().unwrap();
        assert_eq!(meas.total_length(), ratio(2, 1));
        meas.validate().unwrap();
    }

    #[test]
    fn admissibility_reports() {
        let good = SpectralData {
            lambda: vec![8.0],
            mu: vec![],
            a: vec![2.0],
            b: vec![],
            b_inf: 0.75,
            b_inf_star: 0.75,
        };
        assert!(validate_admissible(&good).passed());
        let bad = SpectralData {
            lambda: vec![1.0],
            a: vec![1.0],
            b_inf: 0.5,
            b_inf_star: 0.5,
            ..good
        };
        let report = validate_admissible(&bad);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].starts_with("single-pair constraint"));
        let unordered = SpectralData {
            lambda: vec![2.0, 1.0],
            mu: vec![0.5],
            a: vec![1.0, 1.0],
            b: vec![1.0],
            b_inf: 1.0,
            b_inf_star: 1.0,
        };
        assert!(validate_admissible(&unordered).violations[0].starts_with("ordering"));
    }
}
