//! Arithmetic backends.
//!
//! Every algebraic routine in the crate is written against [`Scalar`], which is
//! implemented for `f64` (the default working precision), for [`Wide`]
//! (256-bit binary floating point, used where binary64 evaluation cancels)
//! and for [`BigRational`] (exact arithmetic used by the identity checks).

use std::cmp::Ordering;
use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use num::bigint::BigInt;
use num::traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use num::BigRational;

/// A field element usable by the polynomial, determinant and sum routines.
pub trait Scalar:
    Clone + Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    /// Embeds a machine integer.
    fn from_int(value: i64) -> Self {
        Self::from_i64(value).expect("integer embedding cannot fail")
    }

    /// Embeds a binary64 value; exact for rationals (every finite double is a
    /// dyadic rational).
    fn from_float(value: f64) -> Self {
        Self::from_f64(value).expect("finite value required")
    }

    /// Nearest binary64 approximation.
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self` raised to a signed integer power.
    fn powi(&self, exponent: i32) -> Self {
        let mut result = Self::one();
        for _ in 0..exponent.unsigned_abs() {
            result = result * self.clone();
        }
        if exponent < 0 {
            Self::one() / result
        } else {
            result
        }
    }

    /// One half.
    fn half() -> Self {
        Self::one() / Self::from_int(2)
    }

    /// The non-negative square root, or `None` when the backend cannot
    /// represent it (an exact rational that is not a perfect square) or the
    /// argument is negative.
    fn square_root(&self) -> Option<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn square_root(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn powi(&self, exponent: i32) -> Self {
        f64::powi(*self, exponent)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn square_root(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let exact = |value: &BigInt| {
            let root = value.sqrt();
            (&root * &root == *value).then_some(root)
        };
        Some(BigRational::new(exact(self.numer())?, exact(self.denom())?))
    }
}

/// Mantissa length, in bits, of [`Wide`].
pub const WIDE_PRECISION: usize = 256;

/// Binary floating point with [`WIDE_PRECISION`] bits of mantissa. Every
/// value carries that precision, so results of arithmetic never fall back
/// to the shorter precision of a converted input.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Wide(BinaryFloat);

type BinaryFloat = FBig<HalfEven, 2>;

impl Wide {
    fn pinned(value: BinaryFloat) -> Self {
        Wide(value.with_precision(WIDE_PRECISION).value())
    }

    /// Widens a binary64 value without rounding.
    pub fn from_f64_exact(value: f64) -> Self {
        Self::pinned(BinaryFloat::try_from(value).expect("finite value required"))
    }
}

impl Debug for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Wide({:e})", self.0.to_f64().value())
    }
}

macro_rules! wide_binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Wide {
            type Output = Wide;
            fn $method(self, other: Wide) -> Wide {
                Wide(self.0 $op other.0)
            }
        }
        impl<'a> $trait<&'a Wide> for &'a Wide {
            type Output = Wide;
            fn $method(self, other: &'a Wide) -> Wide {
                Wide(&self.0 $op &other.0)
            }
        }
        impl<'a> $trait<Wide> for &'a Wide {
            type Output = Wide;
            fn $method(self, other: Wide) -> Wide {
                Wide(&self.0 $op other.0)
            }
        }
    };
}

wide_binary_op!(Add, add, +);
wide_binary_op!(Sub, sub, -);
wide_binary_op!(Mul, mul, *);
wide_binary_op!(Div, div, /);

impl Rem for Wide {
    type Output = Wide;
    fn rem(self, other: Wide) -> Wide {
        let quotient = Wide((&self.0 / &other.0).trunc());
        self - quotient * other
    }
}

impl Neg for Wide {
    type Output = Wide;
    fn neg(self) -> Wide {
        Wide(-self.0)
    }
}

impl Zero for Wide {
    fn zero() -> Self {
        Self::pinned(BinaryFloat::ZERO)
    }
    fn is_zero(&self) -> bool {
        self.0 == BinaryFloat::ZERO
    }
}

impl One for Wide {
    fn one() -> Self {
        Self::pinned(BinaryFloat::ONE)
    }
}

impl Num for Wide {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(text: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        let value: f64 = if radix == 10 {
            text.parse()?
        } else {
            "".parse()?
        };
        Ok(Self::from_f64_exact(value))
    }
}

impl Signed for Wide {
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::zero()
        }
    }
    fn signum(&self) -> Self {
        match self.0.partial_cmp(&BinaryFloat::ZERO) {
            Some(Ordering::Greater) => Self::one(),
            Some(Ordering::Less) => -Self::one(),
            _ => Self::zero(),
        }
    }
    fn is_positive(&self) -> bool {
        self.0 > BinaryFloat::ZERO
    }
    fn is_negative(&self) -> bool {
        self.0 < BinaryFloat::ZERO
    }
}

impl FromPrimitive for Wide {
    fn from_i64(value: i64) -> Option<Self> {
        Some(Self::pinned(BinaryFloat::from(value)))
    }
    fn from_u64(value: u64) -> Option<Self> {
        Some(Self::pinned(BinaryFloat::from(value)))
    }
    fn from_f64(value: f64) -> Option<Self> {
        value.is_finite().then(|| Self::from_f64_exact(value))
    }
}

impl ToPrimitive for Wide {
    fn to_i64(&self) -> Option<i64> {
        self.to_f64().and_then(|v| v.to_i64())
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_f64().and_then(|v| v.to_u64())
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.0.to_f64().value())
    }
}

impl Scalar for Wide {
    const EXACT: bool = false;

    fn square_root(&self) -> Option<Self> {
        (!self.is_negative()).then(|| Wide(self.0.sqrt()))
    }
}

/// Converts binary64 values to another backend without rounding (every
/// finite double is exactly representable in [`Wide`] and [`BigRational`]).
pub fn lift_all<T: Scalar>(values: &[f64]) -> Vec<T> {
    values.iter().map(|v| T::from_float(*v)).collect()
}

/// Builds the rational `numerator / denominator`.
pub fn ratio(numerator: i64, denominator: i64) -> BigRational {
    BigRational::new(BigInt::from(numerator), BigInt::from(denominator))
}

/// Parses a decimal or `p/q` string into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    if let Ok(int) = text.parse::<BigInt>() {
        return Some(BigRational::from_integer(int));
    }
    parse_decimal(text)
}

/// Exact value of a decimal literal such as `-12.5e-3`.
fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(at) => (&text[..at], text[at + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (whole, fraction) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if fraction.contains(['+', '-'])
        || (whole.trim_start_matches(['+', '-']).is_empty() && fraction.is_empty())
    {
        return None;
    }
    let digits: BigInt = format!("{whole}{fraction}").parse().ok()?;
    let scale = exponent.checked_sub(i32::try_from(fraction.len()).ok()?)?;
    let ten = BigInt::from(10);
    let power = num::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        BigRational::from_integer(digits * power)
    } else {
        BigRational::new(digits, power)
    })
}

/// Formats a rational as `p/q` (or `p` when the denominator is one).
pub fn format_rational(value: &BigRational) -> String {
    if value.denom() == &BigInt::from(1) {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_accepts_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/4"), Some(ratio(3, 4)));
        assert_eq!(parse_rational("-6/8"), Some(ratio(-3, 4)));
        assert_eq!(parse_rational("5"), Some(ratio(5, 1)));
        assert_eq!(parse_rational("0.5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("0.1"), Some(ratio(1, 10)));
        assert_eq!(parse_rational("-12.5e-3"), Some(ratio(-1, 80)));
        assert_eq!(parse_rational("3E2"), Some(ratio(300, 1)));
        assert_eq!(parse_rational(".25"), Some(ratio(1, 4)));
        assert_eq!(parse_rational("1.5.2"), None);
        assert_eq!(parse_rational("-"), None);
        assert_eq!(parse_rational("inf"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn formatting_roundtrips() {
        for value in [ratio(3, 4), ratio(-7, 1), ratio(0, 1)] {
            assert_eq!(parse_rational(&format_rational(&value)), Some(value));
        }
    }

    #[test]
    fn signed_powers() {
        assert_eq!(Scalar::powi(&ratio(2, 3), -2), ratio(9, 4));
        assert_eq!(Scalar::powi(&2.0_f64, 3), 8.0);
        assert_eq!(<BigRational as Scalar>::half(), ratio(1, 2));
    }

    #[test]
    fn square_roots_per_backend() {
        assert_eq!(ratio(9, 4).square_root(), Some(ratio(3, 2)));
        assert_eq!(ratio(2, 1).square_root(), None);
        assert_eq!(ratio(-1, 1).square_root(), None);
        assert_eq!(Scalar::square_root(&2.25_f64), Some(1.5));
        let root = Wide::from_int(2).square_root().unwrap();
        assert!((root.clone() * root - Wide::from_int(2)).abs() < Wide::from_float(1e-70));
    }

    #[test]
    fn wide_arithmetic_keeps_its_precision() {
        let third = Wide::one() / Wide::from_int(3);
        let back = third.clone() * Wide::from_int(3) - Wide::one();
        assert!(back.abs() < Wide::from_float(1e-70));
        // 1 + 2^-100 survives, which binary64 would round away.
        let tiny = Scalar::powi(&Wide::from_int(2), -100);
        assert!((Wide::one() + tiny.clone()) - Wide::one() == tiny);
        assert_eq!(Wide::from_float(-2.5).abs().approx(), 2.5);
        assert_eq!((Wide::from_int(7) % Wide::from_int(3)).approx(), 1.0);
        assert_eq!(Wide::from_int(-4).signum().approx(), -1.0);
    }
}
