//! The inverse spectral map: recovery of interval measures and real-line
//! peakon data from spectral data.
//!
//! Sums are indexed by `j = K + 1 - r`, where `r` numbers mass pairs from the
//! left: `j = 1` is the rightmost pair. All `J^{rs}_{nm}` needed by one call
//! are cached in a per-call [`HeineTable`].

use serde::Serialize;

use crate::bimoments::{
    spectral_measures, starred_closed_form, starred_measures, DiscreteMeasure, HeineSumKey,
    HeineTable,
};
use crate::core_types::{
    validate_admissible, InterlacingConfiguration, IntervalMeasures, SpectralData,
};
use crate::error::{Result, SpectralError};
use crate::forward_spectral::adjoint_residues;
use crate::scalar::Scalar;

/// Width of the band above one in which single-pair data is accepted but
/// flagged as nearly colliding.
pub const SINGLE_PAIR_MARGIN: f64 = 1e-10;

/// Source of the starred sums used for the odd-numbered sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum OddSiteRoute {
    /// Rewrite every starred sum in terms of unstarred ones.
    #[default]
    NonStarred,
    /// Evaluate starred sums directly on the starred measures `(λ, a*)`,
    /// `(μ, b*)`.
    Starred,
}

fn check_general(data: &SpectralData) -> Result<()> {
    let report = validate_admissible(data);
    if !report.passed() {
        return Err(SpectralError::Invalid(report.violations.join("; ")));
    }
    if data.k() == 1 {
        return Err(SpectralError::UseSinglePair);
    }
    Ok(())
}

/// Starred sums `(J*)^{rs}_{nm}`, either from their closed form or directly.
struct StarredSums<'a> {
    route: OddSiteRoute,
    alpha: &'a DiscreteMeasure<f64>,
    beta: &'a DiscreteMeasure<f64>,
    starred: HeineTable<'a, f64>,
    closed: std::collections::HashMap<HeineSumKey, f64>,
}

impl<'a> StarredSums<'a> {
    fn j(&mut self, n: usize, m: usize, r: i32, s: i32) -> Result<f64> {
        match self.route {
            OddSiteRoute::Starred => Ok(self.starred.j(n, m, r, s)),
            OddSiteRoute::NonStarred => {
                let key = HeineSumKey::new(n, m, r, s);
                if let Some(value) = self.closed.get(&key) {
                    return Ok(*value);
                }
                let value = starred_closed_form(self.alpha, self.beta, key)?;
                self.closed.insert(key, value);
                Ok(value)
            }
        }
    }
}

/// Weights and one-sided distances to the interval ends recovered for one
/// family of sites.
struct SiteValues {
    weight: Vec<f64>,
    /// `1 - y` for even sites, `1 + y` for odd sites.
    distance: Vec<f64>,
}

/// Even sites: `h_{K+1-j}` and `(1 - y_{2(K+1-j)}) h_{K+1-j}`; returned in
/// left-to-right order.
fn even_sites(table: &mut HeineTable<'_, f64>, b_inf: f64, k: usize) -> SiteValues {
    let mut weight = vec![0.0; k];
    let mut distance = vec![0.0; k];
    let alpha0 = table.j(1, 0, 0, 0);
    weight[k - 1] = (table.bimoment(0, 0) + 0.5) / alpha0 + b_inf;
    distance[k - 1] = 1.0 / alpha0 / weight[k - 1];
    for j in 2..=k {
        let denominator = table.j(j - 1, j - 2, 0, 1) * table.j(j, j - 1, 0, 1);
        let shared = table.j(j - 1, j - 1, 1, 0);
        let h =
            shared * (table.j(j, j - 1, 0, 0) + 0.5 * table.j(j - 1, j - 2, 1, 1)) / denominator;
        let scaled = table.j(j - 1, j - 2, 1, 1) * shared / denominator;
        weight[k - j] = h;
        distance[k - j] = scaled / h;
    }
    SiteValues { weight, distance }
}

/// Odd sites: `g_j` and `(1 + y_{2j-1}) g_j` from starred sums.
fn odd_sites(sums: &mut StarredSums<'_>, b_inf_star: f64, k: usize) -> Result<SiteValues> {
    let mut weight = vec![0.0; k];
    let mut distance = vec![0.0; k];
    let alpha0 = sums.j(1, 0, 0, 0)?;
    let i00 = sums.j(1, 1, 0, 0)?;
    weight[0] = (i00 + 0.5) / alpha0 + b_inf_star;
    distance[0] = 1.0 / alpha0 / weight[0];
    for j in 2..=k {
        let denominator = sums.j(j - 1, j - 2, 0, 1)? * sums.j(j, j - 1, 0, 1)?;
        let shared = sums.j(j - 1, j - 1, 1, 0)?;
        let g =
            shared * (sums.j(j, j - 1, 0, 0)? + 0.5 * sums.j(j - 1, j - 2, 1, 1)?) / denominator;
        let scaled = sums.j(j - 1, j - 2, 1, 1)? * shared / denominator;
        weight[j - 1] = g;
        distance[j - 1] = scaled / g;
    }
    Ok(SiteValues { weight, distance })
}

/// Recovers interval weights and sites (`K ≥ 2`), taking the starred sums
/// from `route`.
pub fn recover_interval_with(data: &SpectralData, route: OddSiteRoute) -> Result<IntervalMeasures> {
    check_general(data)?;
    let k = data.k();
    let adjoint = adjoint_residues(data);
    let (alpha, beta) = spectral_measures(data);
    let (alpha_star, beta_star) = starred_measures(data, &adjoint);
    let mut table = HeineTable::new(&alpha, &beta);
    let even = even_sites(&mut table, data.b_inf, k);
    let mut sums = StarredSums {
        route,
        alpha: &alpha,
        beta: &beta,
        starred: HeineTable::new(&alpha_star, &beta_star),
        closed: Default::default(),
    };
    let odd = odd_sites(&mut sums, data.b_inf_star, k)?;
    // Sites in order; odd sites know 1 + y, even sites know 1 - y.
    let mut y = Vec::with_capacity(2 * k);
    for a in 0..k {
        y.push(odd.distance[a] - 1.0);
        y.push(1.0 - even.distance[a]);
    }
    let mut l = Vec::with_capacity(2 * k + 1);
    l.push(odd.distance[0]);
    for site in 0..2 * k - 1 {
        let gap = if site % 2 == 0 {
            // odd site (1 + y known) to even site (1 - y known)
            2.0 - odd.distance[site / 2] - even.distance[site / 2]
        } else {
            y[site + 1] - y[site]
        };
        l.push(gap);
    }
    l.push(even.distance[k - 1]);
    let meas = IntervalMeasures {
        y,
        l,
        g: odd.weight,
        h: even.weight,
    };
    if let Some(index) = meas.l.iter().position(|gap| !(*gap > 0.0)) {
        return Err(SpectralError::Consistency(format!(
            "recovered gap l[{index}] = {} is not positive",
            meas.l[index]
        )));
    }
    Ok(meas)
}

/// Recovers interval weights and sites (`K ≥ 2`).
pub fn recover_interval(data: &SpectralData) -> Result<IntervalMeasures> {
    recover_interval_with(data, OddSiteRoute::NonStarred)
}

/// `½ e^{2x_k}` and the amplitude quantities `2 n e^{-x}` (even sites) and
/// `2 m e^{-x}` (odd sites), in site order. Both are rational functions of
/// the spectral data, so they are exact in rational arithmetic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealLineQuantities<T = f64> {
    pub half_exp_2x: Vec<T>,
    pub amplitude: Vec<T>,
}

impl RealLineQuantities<f64> {
    /// Converts to positions and masses.
    pub fn to_configuration(&self) -> Result<InterlacingConfiguration> {
        let x: Vec<f64> = self
            .half_exp_2x
            .iter()
            .map(|v| 0.5 * (2.0 * v).ln())
            .collect();
        let mass: Vec<f64> = self
            .amplitude
            .iter()
            .zip(&x)
            .map(|(amp, x)| 0.5 * amp * x.exp())
            .collect();
        let m_odd = mass.iter().step_by(2).copied().collect();
        let n_even = mass.iter().skip(1).step_by(2).copied().collect();
        let config = InterlacingConfiguration {
            k: self.half_exp_2x.len() / 2,
            x,
            m_odd,
            n_even,
        };
        if let Some(i) = config.x.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(SpectralError::Consistency(format!(
                "recovered positions x[{i}] = {} and x[{}] = {} are not ordered",
                config.x[i],
                i + 1,
                config.x[i + 1]
            )));
        }
        config.validate()?;
        Ok(config)
    }
}

/// The real-line quantities in terms of unstarred sums and `b*∞`.
pub fn realline_quantities(data: &SpectralData) -> Result<RealLineQuantities> {
    check_general(data)?;
    let (alpha, beta) = spectral_measures(data);
    Ok(quantities_from_measures(
        &alpha,
        &beta,
        &data.b_inf,
        &data.b_inf_star,
    ))
}

/// The real-line quantities for `K ≥ 2` from the spectral measures
/// `α = Σ a_i δ_{λ_i}`, `β = Σ b_j δ_{μ_j}` and both boundary constants, in
/// any arithmetic. Admissibility is the caller's responsibility.
pub fn quantities_from_measures<T: Scalar>(
    alpha: &DiscreteMeasure<T>,
    beta: &DiscreteMeasure<T>,
    b_inf: &T,
    b_inf_star: &T,
) -> RealLineQuantities<T> {
    let k = alpha.len();
    let two = T::from_int(2);
    let mut table = HeineTable::new(alpha, beta);
    let mut half_exp_2x = vec![T::zero(); 2 * k];
    let mut amplitude = vec![T::zero(); 2 * k];
    let alpha0 = table.j(1, 0, 0, 0);
    half_exp_2x[2 * k - 1] = table.bimoment(0, 0) + b_inf.clone() * alpha0.clone();
    amplitude[2 * k - 1] = T::one() / alpha0;
    for j in 2..=k {
        let pair = k + 1 - j;
        half_exp_2x[2 * pair - 1] = table.j(j, j - 1, 0, 0) / table.j(j - 1, j - 2, 1, 1);
        amplitude[2 * pair - 1] = table.j(j - 1, j - 2, 1, 1) * table.j(j - 1, j - 1, 1, 0)
            / (table.j(j - 1, j - 2, 0, 1) * table.j(j, j - 1, 0, 1));
    }
    for j in 1..k {
        let pair = k + 1 - j;
        half_exp_2x[2 * pair - 2] = table.j(j, j, 0, 0) / table.j(j - 1, j - 1, 1, 1);
        amplitude[2 * pair - 2] = table.j(j - 1, j - 1, 1, 1) * table.j(j, j - 1, 0, 1)
            / (table.j(j, j, 1, 0) * table.j(j - 1, j - 1, 1, 0));
    }
    let product = |values: &[T]| values.iter().fold(T::one(), |acc, v| acc * v.clone());
    let ratio = product(&beta.support) / product(&alpha.support);
    let top = table.j(k - 1, k - 1, 1, 0);
    let corner = table.j(k - 1, k - 2, 1, 1);
    half_exp_2x[0] = table.j(k, k - 1, 0, 0)
        / (corner.clone() + two.clone() * b_inf_star.clone() / ratio.clone() * top.clone());
    amplitude[0] = ratio * corner / top + two * b_inf_star.clone();
    RealLineQuantities {
        half_exp_2x,
        amplitude,
    }
}

/// The real-line quantities of a single pair: `½ e^{2x_2} = a_1 b∞`,
/// `½ e^{-2x_1} = a*_1 b*∞` with `a*_1 = λ_1/(2 a_1)`, `2 n_2 e^{-x_2} = 1/a_1`
/// and `2 m_1 e^{-x_1} = 2 b*∞`. The constraint `2 λ_1 b∞ b*∞ > 1` is the
/// caller's responsibility.
pub fn single_pair_quantities<T: Scalar>(
    lambda: &T,
    a: &T,
    b_inf: &T,
    b_inf_star: &T,
) -> RealLineQuantities<T> {
    let two = T::from_int(2);
    let a_star = lambda.clone() / (two.clone() * a.clone());
    let quarter = T::one() / (two.clone() * two.clone());
    RealLineQuantities {
        half_exp_2x: vec![
            quarter / (a_star * b_inf_star.clone()),
            a.clone() * b_inf.clone(),
        ],
        amplitude: vec![two * b_inf_star.clone(), T::one() / a.clone()],
    }
}

/// The real-line quantities with odd sites taken from starred sums:
/// `½ e^{-2x_{2j-1}} = J*_{j,j-1}/J*^{11}_{j-1,j-2}` and
/// `2 m_{2j-1} e^{x_{2j-1}} = (1 + y_{2j-1}) g_j`, returned in the same
/// normalization as [`realline_quantities`].
pub fn realline_quantities_starred(data: &SpectralData) -> Result<RealLineQuantities> {
    let mut quantities = realline_quantities(data)?;
    let meas = recover_interval_with(data, OddSiteRoute::Starred)?;
    for a in 0..data.k() {
        let one_plus_y = meas.l[..=2 * a].iter().sum::<f64>();
        // e^{-2x} = 2/(1+y) - 1, and 2 m e^{x} = (1+y) g.
        let exp_minus_2x = 2.0 / one_plus_y - 1.0;
        quantities.half_exp_2x[2 * a] = 0.5 / exp_minus_2x;
        quantities.amplitude[2 * a] = one_plus_y * meas.g[a] * exp_minus_2x;
    }
    Ok(quantities)
}

/// Recovers peakon positions and masses (`K ≥ 2`).
pub fn recover_realline(data: &SpectralData) -> Result<InterlacingConfiguration> {
    recover_realline_with(data, OddSiteRoute::NonStarred)
}

/// Recovers peakon positions and masses, choosing the odd-site route.
pub fn recover_realline_with(
    data: &SpectralData,
    route: OddSiteRoute,
) -> Result<InterlacingConfiguration> {
    match route {
        OddSiteRoute::NonStarred => realline_quantities(data)?.to_configuration(),
        OddSiteRoute::Starred => realline_quantities_starred(data)?.to_configuration(),
    }
}

/// Whether single-pair data lies in the thin band just above the ordering
/// constraint, where the two positions nearly collide.
pub fn near_single_pair_boundary(data: &SpectralData) -> bool {
    data.k() == 1 && data.single_pair_constraint() <= 1.0 + SINGLE_PAIR_MARGIN
}

/// Recovers a single mass pair: `½ e^{2x_2} = a_1 b∞`,
/// `½ e^{-2x_1} = a*_1 b*∞`, `2 n_2 e^{-x_2} = 1/a_1` and
/// `2 m_1 e^{x_1} = 1/a*_1`, with `a*_1 = λ_1/(2 a_1)`.
pub fn recover_k1(data: &SpectralData) -> Result<InterlacingConfiguration> {
    if data.k() != 1 {
        return Err(SpectralError::Invalid(format!(
            "single-pair recovery needs K = 1, got K = {}",
            data.k()
        )));
    }
    let report = validate_admissible(data);
    if !report.passed() {
        if report
            .violations
            .iter()
            .all(|v| v.starts_with("single-pair constraint"))
        {
            return Err(SpectralError::SinglePairConstraint {
                product: data.single_pair_constraint(),
            });
        }
        return Err(SpectralError::Invalid(report.violations.join("; ")));
    }
    let a1 = data.a[0];
    let a1_star = data.lambda[0] / (2.0 * a1);
    let x2 = 0.5 * (2.0 * a1 * data.b_inf).ln();
    let x1 = -0.5 * (2.0 * a1_star * data.b_inf_star).ln();
    let n2 = (x2).exp() / (2.0 * a1);
    let m1 = (-x1).exp() / (2.0 * a1_star);
    InterlacingConfiguration::new(vec![x1, x2], vec![m1], vec![n2])
}

/// The inverse map for any `K`.
pub fn recover(data: &SpectralData) -> Result<InterlacingConfiguration> {
    if data.k() == 1 {
        recover_k1(data)
    } else {
        recover_realline(data)
    }
}

/// Largest componentwise relative difference between two configurations of
/// the same size (positions are compared relative to `max(|x|, 1)`).
pub fn configuration_distance(
    left: &InterlacingConfiguration,
    right: &InterlacingConfiguration,
) -> f64 {
    let positions = left
        .x
        .iter()
        .zip(&right.x)
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0));
    let masses = left
        .m_odd
        .iter()
        .zip(&right.m_odd)
        .chain(left.n_even.iter().zip(&right.n_even))
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()));
    positions.chain(masses).fold(0.0, f64::max)
}

/// Largest componentwise relative difference between two spectral data sets.
pub fn spectral_distance(left: &SpectralData, right: &SpectralData) -> f64 {
    let pairs = left
        .lambda
        .iter()
        .zip(&right.lambda)
        .chain(left.mu.iter().zip(&right.mu))
        .chain(left.a.iter().zip(&right.a))
        .chain(left.b.iter().zip(&right.b))
        .chain([
            (&left.b_inf, &right.b_inf),
            (&left.b_inf_star, &right.b_inf_star),
        ]);
    pairs
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()))
        .fold(0.0, f64::max)
}

/// Largest componentwise relative difference between two interval measures.
pub fn interval_distance(left: &IntervalMeasures, right: &IntervalMeasures) -> f64 {
    let pairs = left
        .l
        .iter()
        .zip(&right.l)
        .chain(left.g.iter().zip(&right.g))
        .chain(left.h.iter().zip(&right.h));
    let relative = pairs.map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()));
    let sites = left.y.iter().zip(&right.y).map(|(a, b)| (a - b).abs());
    relative.chain(sites).fold(0.0, f64::max)
}
