//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the spectral maps and their supporting algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    /// Input data violates a structural invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A position is so far from the origin that `tanh` rounds to ±1.
    #[error("position x[{index}] = {value} saturates tanh in binary64")]
    Overflow { index: usize, value: f64 },

    /// An interval site lies outside the open interval (-1, 1).
    #[error("site y[{index}] = {value} lies outside (-1, 1)")]
    Domain { index: usize, value: f64 },

    /// A matrix is not unimodular, so the involution is undefined.
    #[error("matrix is not unimodular: determinant is not the constant 1")]
    NotUnimodular,

    /// The eigenvalue computation returned complex or repeated values.
    #[error("numerically degenerate spectrum: {0}")]
    Degenerate(String),

    /// A quantity that must be positive came out nonpositive.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// Spectral data with a single mass pair violates the ordering constraint
    /// 2 λ₁ b∞ b*∞ > 1.
    #[error("single-pair data is not recoverable: 2·λ₁·b∞·b*∞ = {product} must exceed 1")]
    SinglePairConstraint { product: f64 },

    /// Single-pair spectral data passed to the general recovery routine.
    #[error("single-pair data must be recovered with `recover_k1`")]
    UseSinglePair,

    /// A determinant needed for a construction vanished.
    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    /// A Weyl function was evaluated too close to one of its poles.
    #[error("evaluation point {point} is within tolerance of the pole {pole}")]
    NearPole { point: f64, pole: f64 },
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, SpectralError>;
