//! Exact arithmetic in the ring `Z[α]` and its fraction field `Q(α)`, where
//! `α = (√5 − 1)/2` is the inverse golden ratio.
//!
//! Every element is stored as a pair of integers `(a, b)` standing for
//! `a + bα`. Products are reduced with `α² = 1 − α`, signs are decided with
//! integer arithmetic only, and every operation reports overflow instead of
//! wrapping. Floating point appears only in [`GoldenNumber::to_f64`].

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `α = (√5 − 1)/2` rounded to the nearest `f64`. Display and float paths only.
pub const ALPHA_F64: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} requires n >= 1")]
    IndexOutOfRange(&'static str),
    #[error("cannot parse `{0}` as an exact decimal")]
    Parse(String),
}

pub type RingResult<T> = Result<T, RingError>;

fn ovf(op: &'static str) -> RingError {
    RingError::Overflow(op)
}

/// The element `a + bα` of `Z[α]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GoldenNumber {
    pub a: i128,
    pub b: i128,
}

impl GoldenNumber {
    pub const ZERO: Self = Self { a: 0, b: 0 };
    pub const ONE: Self = Self { a: 1, b: 0 };
    pub const ALPHA: Self = Self { a: 0, b: 1 };
    /// `φ = 1/α = 1 + α`.
    pub const PHI: Self = Self { a: 1, b: 1 };
    /// `φ² = 2 + α`, the area above which every rectangle meets `Γ`.
    pub const PHI_SQUARED: Self = Self { a: 2, b: 1 };

    pub const fn new(a: i128, b: i128) -> Self {
        Self { a, b }
    }

    pub const fn from_int(a: i128) -> Self {
        Self { a, b: 0 }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn checked_add(self, rhs: Self) -> RingResult<Self> {
        Ok(Self {
            a: self.a.checked_add(rhs.a).ok_or(ovf("add"))?,
            b: self.b.checked_add(rhs.b).ok_or(ovf("add"))?,
        })
    }

    pub fn checked_neg(self) -> RingResult<Self> {
        Ok(Self {
            a: self.a.checked_neg().ok_or(ovf("neg"))?,
            b: self.b.checked_neg().ok_or(ovf("neg"))?,
        })
    }

    pub fn checked_sub(self, rhs: Self) -> RingResult<Self> {
        Ok(Self {
            a: self.a.checked_sub(rhs.a).ok_or(ovf("sub"))?,
            b: self.b.checked_sub(rhs.b).ok_or(ovf("sub"))?,
        })
    }

    /// `(a₁ + b₁α)(a₂ + b₂α) = (a₁a₂ + b₁b₂) + (a₁b₂ + a₂b₁ − b₁b₂)α`.
    pub fn checked_mul(self, rhs: Self) -> RingResult<Self> {
        let m = |x: i128, y: i128| x.checked_mul(y).ok_or(ovf("mul"));
        let aa = m(self.a, rhs.a)?;
        let bb = m(self.b, rhs.b)?;
        let ab = m(self.a, rhs.b)?;
        let ba = m(self.b, rhs.a)?;
        Ok(Self {
            a: aa.checked_add(bb).ok_or(ovf("mul"))?,
            b: ab
                .checked_add(ba)
                .and_then(|t| t.checked_sub(bb))
                .ok_or(ovf("mul"))?,
        })
    }

    pub fn checked_scale(self, k: i128) -> RingResult<Self> {
        Ok(Self {
            a: self.a.checked_mul(k).ok_or(ovf("scale"))?,
            b: self.b.checked_mul(k).ok_or(ovf("scale"))?,
        })
    }

    pub fn checked_pow(self, n: u32) -> RingResult<Self> {
        let mut acc = Self::ONE;
        for _ in 0..n {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Galois conjugate `a + bᾱ` with `ᾱ = −1 − α`, i.e. `(a − b) − bα`.
    pub fn conjugate(self) -> RingResult<Self> {
        Ok(Self {
            a: self.a.checked_sub(self.b).ok_or(ovf("conjugate"))?,
            b: self.b.checked_neg().ok_or(ovf("conjugate"))?,
        })
    }

    /// Field norm `(a + bα)(a + bᾱ) = a² − ab − b²`.
    pub fn norm(self) -> RingResult<i128> {
        let m = |x: i128, y: i128| x.checked_mul(y).ok_or(ovf("norm"));
        m(self.a, self.a)?
            .checked_sub(m(self.a, self.b)?)
            .and_then(|t| t.checked_sub(self.b.checked_mul(self.b)?))
            .ok_or(ovf("norm"))
    }

    /// Exact sign of `a + bα` using integer arithmetic only.
    ///
    /// With `r = −a/b`, the sign is `sign(b)·sign(α − r)`. Rationals `r ≤ −1/2`
    /// lie below `α`; otherwise `α − r` has the sign of `−(r² + r − 1)` because
    /// `x² + x − 1` increases on `x > −1/2` and vanishes at `α`. Scaling by `b²`
    /// turns that polynomial into `a² − ab − b²`.
    pub fn signum(self) -> RingResult<i8> {
        if self.b == 0 {
            return Ok(self.a.signum() as i8);
        }
        let b2 = self.b.checked_mul(self.b).ok_or(ovf("sign"))?;
        let two_ab = self
            .a
            .checked_mul(self.b)
            .and_then(|t| t.checked_mul(2))
            .ok_or(ovf("sign"))?;
        let alpha_minus_r = if two_ab >= b2 {
            1
        } else {
            -(self.norm()?.signum() as i8)
        };
        Ok(self.b.signum() as i8 * alpha_minus_r)
    }

    pub fn cmp_exact(self, other: Self) -> RingResult<Ordering> {
        Ok(self.checked_sub(other)?.signum()?.cmp(&0))
    }

    /// Float value of `a + bα`, accurate to a few ulps even under cancellation.
    ///
    /// When `a + bα` is tiny compared with its coefficients the conjugate is
    /// not, and the value is recovered as `norm / conjugate`.
    pub fn to_f64(self) -> f64 {
        let (a, b) = (self.a as f64, self.b as f64);
        let direct = a + b * ALPHA_F64;
        if direct.abs() >= 0.5 * (a.abs() + b.abs() * ALPHA_F64) {
            return direct;
        }
        let conj = (a - b) - b * ALPHA_F64;
        match self.norm() {
            Ok(n) => n as f64 / conj,
            Err(_) => direct,
        }
    }
}

impl fmt::Display for GoldenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}α"),
            (a, b) if b < 0 => write!(f, "{a} - {}α", -b),
            (a, b) => write!(f, "{a} + {b}α"),
        }
    }
}

/// `gn_add`: componentwise sum.
pub fn gn_add(x: GoldenNumber, y: GoldenNumber) -> RingResult<GoldenNumber> {
    x.checked_add(y)
}

/// `gn_mul`: product reduced by `α² = 1 − α`.
pub fn gn_mul(x: GoldenNumber, y: GoldenNumber) -> RingResult<GoldenNumber> {
    x.checked_mul(y)
}

/// `gn_sign`: exact sign in `{−1, 0, 1}`.
pub fn gn_sign(x: GoldenNumber) -> RingResult<i8> {
    x.signum()
}

/// `f₀ = 0`, `f₁ = 1`, `fₙ = fₙ₋₁ + fₙ₋₂`, computed iteratively.
pub fn fibonacci(n: u32) -> RingResult<i128> {
    let (mut prev, mut cur) = (0i128, 1i128);
    if n == 0 {
        return Ok(0);
    }
    for _ in 1..n {
        let next = prev.checked_add(cur).ok_or(ovf("fibonacci"))?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `αⁿ = (−1)ⁿ⁻¹(fₙα − fₙ₋₁)` as the exact pair `((−1)ⁿfₙ₋₁, (−1)ⁿ⁻¹fₙ)`.
pub fn alpha_power(n: u32) -> RingResult<GoldenNumber> {
    if n == 0 {
        return Err(RingError::IndexOutOfRange("alpha_power"));
    }
    let f_n = fibonacci(n)?;
    let f_prev = fibonacci(n - 1)?;
    let sign: i128 = if n % 2 == 0 { 1 } else { -1 };
    Ok(GoldenNumber::new(sign * f_prev, -sign * f_n))
}

/// `αⁿ⁻¹fₙ₊₂ + αⁿfₙ₊₁`, which equals `2 + α` for every `n ≥ 1`.
pub fn power_sum_identity(n: u32) -> RingResult<GoldenNumber> {
    if n == 0 {
        return Err(RingError::IndexOutOfRange("power_sum_identity"));
    }
    let lower = if n == 1 {
        GoldenNumber::ONE
    } else {
        alpha_power(n - 1)?
    };
    let upper = alpha_power(n)?;
    let f_next2 = fibonacci(n + 2)?;
    let f_next = fibonacci(n + 1)?;
    lower
        .checked_scale(f_next2)?
        .checked_add(upper.checked_scale(f_next)?)
}

fn gcd(mut x: i128, mut y: i128) -> i128 {
    x = x.abs();
    y = y.abs();
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

/// An element `(a + bα)/q` of `Q(α)` with `q > 0`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoldenRational {
    num: GoldenNumber,
    den: i128,
}

impl GoldenRational {
    pub const ZERO: Self = Self {
        num: GoldenNumber::ZERO,
        den: 1,
    };
    pub const ONE: Self = Self {
        num: GoldenNumber::ONE,
        den: 1,
    };

    pub fn new(num: GoldenNumber, den: i128) -> RingResult<Self> {
        if den == 0 {
            return Err(RingError::DivisionByZero);
        }
        let (num, den) = if den < 0 {
            (num.checked_neg()?, den.checked_neg().ok_or(ovf("rational"))?)
        } else {
            (num, den)
        };
        let g = gcd(gcd(num.a, num.b), den);
        let g = if g == 0 { 1 } else { g };
        Ok(Self {
            num: GoldenNumber::new(num.a / g, num.b / g),
            den: den / g,
        })
    }

    pub fn from_int(a: i128) -> Self {
        Self {
            num: GoldenNumber::from_int(a),
            den: 1,
        }
    }

    pub fn from_golden(num: GoldenNumber) -> Self {
        Self { num, den: 1 }
    }

    pub fn from_ratio(p: i128, q: i128) -> RingResult<Self> {
        Self::new(GoldenNumber::from_int(p), q)
    }

    /// Nearest rational with denominator `den` to a float.
    pub fn from_f64(x: f64, den: i128) -> RingResult<Self> {
        let scaled = (x * den as f64).round();
        if !scaled.is_finite() || scaled.abs() >= 1.0e37 {
            return Err(ovf("from_f64"));
        }
        Self::from_ratio(scaled as i128, den)
    }

    /// Parses a plain decimal such as `-12.5e-3` into the exact rational it denotes.
    pub fn parse_decimal(text: &str) -> RingResult<Self> {
        let err = || RingError::Parse(text.to_string());
        let t = text.trim();
        let (mantissa, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let joined = format!("{int_part}{frac_part}");
        let mut value: i128 = joined.parse().map_err(|_| err())?;
        if neg {
            value = -value;
        }
        let exp10 = exp - frac_part.len() as i32;
        let pow = |e: u32| 10i128.checked_pow(e).ok_or(ovf("parse"));
        if exp10 >= 0 {
            Self::from_ratio(
                value.checked_mul(pow(exp10 as u32)?).ok_or(ovf("parse"))?,
                1,
            )
        } else {
            Self::from_ratio(value, pow((-exp10) as u32)?)
        }
    }

    pub fn numerator(self) -> GoldenNumber {
        self.num
    }

    pub fn denominator(self) -> i128 {
        self.den
    }

    pub fn checked_add(self, rhs: Self) -> RingResult<Self> {
        let left = self.num.checked_scale(rhs.den)?;
        let right = rhs.num.checked_scale(self.den)?;
        Self::new(
            left.checked_add(right)?,
            self.den.checked_mul(rhs.den).ok_or(ovf("add"))?,
        )
    }

    pub fn checked_neg(self) -> RingResult<Self> {
        Ok(Self {
            num: self.num.checked_neg()?,
            den: self.den,
        })
    }

    pub fn checked_sub(self, rhs: Self) -> RingResult<Self> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_mul(self, rhs: Self) -> RingResult<Self> {
        Self::new(
            self.num.checked_mul(rhs.num)?,
            self.den.checked_mul(rhs.den).ok_or(ovf("mul"))?,
        )
    }

    /// `1/(a + bα) = (a + bᾱ)/(a² − ab − b²)`.
    pub fn checked_recip(self) -> RingResult<Self> {
        if self.num.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        let norm = self.num.norm()?;
        let conj = self.num.conjugate()?;
        Self::new(conj.checked_scale(self.den)?, norm)
    }

    pub fn checked_div(self, rhs: Self) -> RingResult<Self> {
        self.checked_mul(rhs.checked_recip()?)
    }

    pub fn signum(self) -> RingResult<i8> {
        self.num.signum()
    }

    pub fn cmp_exact(self, other: Self) -> RingResult<Ordering> {
        Ok(self.checked_sub(other)?.signum()?.cmp(&0))
    }

    pub fn to_f64(self) -> f64 {
        self.num.to_f64() / self.den as f64
    }
}

impl From<GoldenNumber> for GoldenRational {
    fn from(num: GoldenNumber) -> Self {
        Self::from_golden(num)
    }
}

impl fmt::Display for GoldenRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}

/// `2 + α = φ²`.
pub fn golden_square() -> GoldenRational {
    GoldenRational::from_golden(GoldenNumber::PHI_SQUARED)
}

/// `1/(3 + 2α)`, which simplifies to `2α − 1`.
pub fn inverse_three_plus_two_alpha() -> GoldenRational {
    GoldenRational::from_golden(GoldenNumber::new(-1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i128, b: i128) -> GoldenNumber {
        GoldenNumber::new(a, b)
    }

    #[test]
    fn add_examples() {
        assert_eq!(gn_add(g(0, 0), g(3, -2)).unwrap(), g(3, -2));
        assert_eq!(gn_add(g(1, 1), g(1, 0)).unwrap(), g(2, 1));
        assert_eq!(gn_add(g(2, -3), g(-2, 3)).unwrap(), g(0, 0));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(gn_mul(g(1, 1), g(1, 1)).unwrap(), g(2, 1));
        assert_eq!(gn_mul(g(0, 1), g(0, 1)).unwrap(), g(1, -1));
        assert_eq!(gn_mul(g(5, 0), g(0, 0)).unwrap(), g(0, 0));
    }

    #[test]
    fn sign_examples() {
        assert_eq!(gn_sign(g(0, 0)).unwrap(), 0);
        assert_eq!(gn_sign(g(1, -2)).unwrap(), -1);
        assert_eq!(gn_sign(g(-1, 2)).unwrap(), 1);
        assert_eq!(gn_sign(g(0, 1)).unwrap(), 1);
        assert_eq!(gn_sign(g(-1, 0)).unwrap(), -1);
    }

    #[test]
    fn fibonacci_examples() {
        assert_eq!(fibonacci(0).unwrap(), 0);
        assert_eq!(fibonacci(1).unwrap(), 1);
        assert_eq!(fibonacci(2).unwrap(), 1);
        assert_eq!(fibonacci(10).unwrap(), 55);
        assert!(fibonacci(184).is_ok());
        assert_eq!(fibonacci(190), Err(RingError::Overflow("fibonacci")));
    }

    #[test]
    fn alpha_power_examples() {
        assert_eq!(alpha_power(1).unwrap(), g(0, 1));
        assert_eq!(alpha_power(2).unwrap(), g(1, -1));
        assert_eq!(alpha_power(3).unwrap(), g(-1, 2));
        assert!(alpha_power(0).is_err());
    }

    #[test]
    fn power_sum_examples() {
        for n in [1, 2, 20] {
            assert_eq!(power_sum_identity(n).unwrap(), g(2, 1));
        }
        assert!(power_sum_identity(0).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let big = g(i128::MAX, 0);
        assert!(big.checked_add(GoldenNumber::ONE).is_err());
        assert!(big.checked_mul(g(2, 0)).is_err());
        assert!(g(1 << 100, 1 << 100).signum().is_err());
    }

    #[test]
    fn to_f64_survives_cancellation() {
        // 144α − 89 = −α¹²
        let x = g(-89, 144);
        let expected = -ALPHA_F64.powi(12);
        assert!((x.to_f64() - expected).abs() < 1e-15 * expected.abs() * 10.0);
        // f₆₁α − f₆₀ = (−1)⁶⁰ α⁶¹ is far below the coefficients' ulp.
        let x = g(-fibonacci(60).unwrap(), fibonacci(61).unwrap());
        let expected = ALPHA_F64.powi(61);
        assert!(((x.to_f64() - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn rational_field_operations() {
        let two_plus_alpha = golden_square();
        let inv = two_plus_alpha.checked_recip().unwrap();
        assert_eq!(two_plus_alpha.checked_mul(inv).unwrap(), GoldenRational::ONE);
        let small = inverse_three_plus_two_alpha();
        let three_plus_two_alpha = GoldenRational::from_golden(g(3, 2));
        assert_eq!(
            small.checked_mul(three_plus_two_alpha).unwrap(),
            GoldenRational::ONE
        );
        assert!((small.to_f64() - 1.0 / (3.0 + 2.0 * ALPHA_F64)).abs() < 1e-15);
    }

    #[test]
    fn parse_decimal_is_exact() {
        let cases = [
            ("0.001", 1, 1000),
            ("-12.5", -25, 2),
            ("3", 3, 1),
            ("1e-6", 1, 1_000_000),
            ("2.5E2", 250, 1),
            (".5", 1, 2),
        ];
        for (text, p, q) in cases {
            assert_eq!(
                GoldenRational::parse_decimal(text).unwrap(),
                GoldenRational::from_ratio(p, q).unwrap(),
                "{text}"
            );
        }
        for bad in ["", "abc", "1.2.3", "-", "1e"] {
            assert!(GoldenRational::parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn rational_ordering() {
        let half = GoldenRational::from_ratio(1, 2).unwrap();
        let alpha = GoldenRational::from_golden(GoldenNumber::ALPHA);
        assert_eq!(half.cmp_exact(alpha).unwrap(), Ordering::Less);
        let r = GoldenRational::from_ratio(5, 8).unwrap();
        assert_eq!(r.cmp_exact(alpha).unwrap(), Ordering::Greater);
    }
}
