//! Seeded random inputs for the property suites and the CLI `verify`
//! command. All generators draw from ChaCha8 so that a seed reproduces the
//! same data on every platform.

use num::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bimoments::DiscreteMeasure;
use crate::core_types::{InterlacingConfiguration, RealLineData, SpectralData};
use crate::scalar::ratio;

/// Half-width of the interval from which positions are drawn.
pub const POSITION_RANGE: f64 = 3.0;
/// Masses are drawn log-uniformly from `[MASS_LOW, MASS_HIGH]`.
pub const MASS_LOW: f64 = 0.1;
pub const MASS_HIGH: f64 = 10.0;

/// The generator used throughout the crate.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A value whose logarithm is uniform on `[ln low, ln high]`.
pub fn log_uniform(rng: &mut impl Rng, low: f64, high: f64) -> f64 {
    rng.gen_range(low.ln()..=high.ln()).exp()
}

fn sorted_distinct(mut values: Vec<f64>) -> Option<Vec<f64>> {
    values.sort_by(f64::total_cmp);
    values.windows(2).all(|w| w[0] < w[1]).then_some(values)
}

/// Positions are `2K` sorted uniforms on `[-3, 3]`; masses are log-uniform
/// on `[0.1, 10]`.
pub fn random_configuration(rng: &mut impl Rng, k: usize) -> InterlacingConfiguration {
    loop {
        let raw = (0..2 * k)
            .map(|_| rng.gen_range(-POSITION_RANGE..=POSITION_RANGE))
            .collect();
        let Some(x) = sorted_distinct(raw) else {
            continue;
        };
        let m_odd = (0..k)
            .map(|_| log_uniform(rng, MASS_LOW, MASS_HIGH))
            .collect();
        let n_even = (0..k)
            .map(|_| log_uniform(rng, MASS_LOW, MASS_HIGH))
            .collect();
        if let Ok(config) = InterlacingConfiguration::new(x, m_odd, n_even) {
            return config;
        }
    }
}

/// Admissible spectral data: eigenvalues, residues and boundary constants
/// all log-uniform on `[0.1, 10]`. For `K = 1` draws are repeated until the
/// constraint `2 λ₁ b∞ b*∞ > 1` holds.
pub fn random_spectral_data(rng: &mut impl Rng, k: usize) -> SpectralData {
    let mut draw = |count: usize| -> Vec<f64> {
        (0..count)
            .map(|_| log_uniform(rng, MASS_LOW, MASS_HIGH))
            .collect()
    };
    loop {
        let (Some(lambda), Some(mu)) = (sorted_distinct(draw(k)), sorted_distinct(draw(k - 1)))
        else {
            continue;
        };
        let data = SpectralData {
            lambda,
            mu,
            a: draw(k),
            b: draw(k - 1),
            b_inf: draw(1)[0],
            b_inf_star: draw(1)[0],
        };
        if k > 1 || data.single_pair_constraint() > 1.0 {
            return data;
        }
    }
}

/// A positive measure with `atoms` atoms, locations and weights log-uniform
/// on `[0.1, 10]`.
pub fn random_measure(rng: &mut impl Rng, atoms: usize) -> DiscreteMeasure<f64> {
    loop {
        let Some(support) = sorted_distinct(
            (0..atoms)
                .map(|_| log_uniform(rng, MASS_LOW, MASS_HIGH))
                .collect(),
        ) else {
            continue;
        };
        let weights = (0..atoms)
            .map(|_| log_uniform(rng, MASS_LOW, MASS_HIGH))
            .collect();
        if let Ok(measure) = DiscreteMeasure::new(support, weights) {
            return measure;
        }
    }
}

fn small_rational(rng: &mut impl Rng) -> BigRational {
    ratio(rng.gen_range(1..=12), rng.gen_range(1..=7))
}

/// A positive rational measure with distinct atoms drawn from small
/// numerators and denominators.
pub fn random_rational_measure(rng: &mut impl Rng, atoms: usize) -> DiscreteMeasure<BigRational> {
    loop {
        let mut support: Vec<BigRational> = (0..atoms).map(|_| small_rational(rng)).collect();
        support.sort();
        support.dedup();
        if support.len() != atoms {
            continue;
        }
        let weights = (0..atoms).map(|_| small_rational(rng)).collect();
        if let Ok(measure) = DiscreteMeasure::new(support, weights) {
            return measure;
        }
    }
}

/// Rational spectral measures with `K` and `K-1` atoms together with a
/// rational `b∞`.
pub fn random_rational_spectral(
    rng: &mut impl Rng,
    k: usize,
) -> (
    DiscreteMeasure<BigRational>,
    DiscreteMeasure<BigRational>,
    BigRational,
) {
    let alpha = random_rational_measure(rng, k);
    let beta = random_rational_measure(rng, k - 1);
    (alpha, beta, small_rational(rng))
}

/// A rational configuration parameterized by `q_k = e^{x_k}`: increasing
/// `q` built from rational ratios greater than one, rational masses.
pub fn random_rational_configuration(rng: &mut impl Rng, k: usize) -> RealLineData<BigRational> {
    let mut q = small_rational(rng);
    let mut exp_x = Vec::with_capacity(2 * k);
    for _ in 0..2 * k {
        exp_x.push(q.clone());
        q = q * (ratio(1, 1) + ratio(rng.gen_range(1..=5), rng.gen_range(1..=4)));
    }
    RealLineData {
        exp_x,
        m_odd: (0..k).map(|_| small_rational(rng)).collect(),
        n_even: (0..k).map(|_| small_rational(rng)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_types::validate_admissible;

    #[test]
    fn generators_are_reproducible_and_valid() {
        let first = random_configuration(&mut seeded(7), 4);
        assert_eq!(first, random_configuration(&mut seeded(7), 4));
        assert!(first.validate().is_ok());
        assert!(first.x.iter().all(|x| x.abs() <= POSITION_RANGE));
        assert!(first
            .m_odd
            .iter()
            .chain(&first.n_even)
            .all(|m| (MASS_LOW..=MASS_HIGH).contains(m)));

        let mut rng = seeded(11);
        for k in 1..=4 {
            assert!(validate_admissible(&random_spectral_data(&mut rng, k)).passed());
            assert!(random_rational_configuration(&mut rng, k)
                .validate()
                .is_ok());
            assert_eq!(random_measure(&mut rng, k).len(), k);
            assert_eq!(random_rational_measure(&mut rng, k).len(), k);
        }
    }
}
