//! Scalars in two precision modes: exact reduced big rationals and binary64.
//!
//! Every operation goes through a [`PrecisionConfig`], which owns the bit
//! limit for exact values and the relative tolerance for float comparisons.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[serde(alias = "f64", alias = "float")]
    Float64,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float64 => f.write_str("f64"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "f64" | "float" | "float64" => Ok(Mode::Float64),
            _ => Err(Error::InvalidSpec(format!("unknown precision mode {s:?}"))),
        }
    }
}

/// A number in one of the two precision modes.
///
/// Exact values are always kept in lowest terms with a positive denominator,
/// which `BigRational` guarantees after every operation.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float64,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    /// Storage size of an exact value: bits of numerator plus denominator.
    /// Float scalars report 64.
    pub fn bits(&self) -> u64 {
        match self {
            Scalar::Exact(r) => r.numer().bits() + r.denom().bits(),
            Scalar::Float(_) => 64,
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

/// Exact values print as `p/q` (or `p` when the denominator is 1); floats
/// print as the shortest decimal that round-trips, in scientific notation
/// outside `[1e-5, 1e16)`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => f.write_str(&format_f64(*x)),
        }
    }
}

pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionConfig {
    pub mode: Mode,
    pub bit_limit: u64,
    pub relative_tolerance: f64,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self::exact()
    }
}

impl PrecisionConfig {
    pub const DEFAULT_BIT_LIMIT: u64 = 1_000_000;
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    pub fn new(mode: Mode, bit_limit: u64, relative_tolerance: f64) -> Result<Self> {
        if bit_limit < 64 {
            return Err(Error::InvalidSpec(format!(
                "bit limit {bit_limit} is below 64"
            )));
        }
        if !(0.0..1.0).contains(&relative_tolerance) {
            return Err(Error::InvalidSpec(format!(
                "relative tolerance {relative_tolerance} must lie in [0, 1)"
            )));
        }
        Ok(Self {
            mode,
            bit_limit,
            relative_tolerance,
        })
    }

    pub fn exact() -> Self {
        Self {
            mode: Mode::Exact,
            bit_limit: Self::DEFAULT_BIT_LIMIT,
            relative_tolerance: Self::DEFAULT_TOLERANCE,
        }
    }

    pub fn float() -> Self {
        Self {
            mode: Mode::Float64,
            ..Self::exact()
        }
    }

    pub fn for_mode(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::exact()
        }
    }

    pub fn is_exact(&self) -> bool {
        self.mode == Mode::Exact
    }

    pub fn int(&self, n: i64) -> Scalar {
        match self.mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(n.into())),
            Mode::Float64 => Scalar::Float(n as f64),
        }
    }

    /// `n/d` in this mode. Panics if `d == 0`.
    pub fn ratio(&self, n: i64, d: i64) -> Scalar {
        assert!(d != 0, "zero denominator");
        match self.mode {
            Mode::Exact => Scalar::Exact(BigRational::new(n.into(), d.into())),
            Mode::Float64 => Scalar::Float(n as f64 / d as f64),
        }
    }

    /// Converts a binary64 value into this mode. Exact mode keeps the exact
    /// binary value of `x`.
    pub fn from_f64(&self, x: f64) -> Result<Scalar> {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        match self.mode {
            Mode::Float64 => Ok(Scalar::Float(x)),
            Mode::Exact => BigRational::from_float(x)
                .map(Scalar::Exact)
                .ok_or(Error::NonFinite),
        }
    }

    /// Brings a scalar of either mode into this mode.
    pub fn convert(&self, s: &Scalar) -> Result<Scalar> {
        match (self.mode, s) {
            (Mode::Exact, Scalar::Exact(_)) | (Mode::Float64, Scalar::Float(_)) => Ok(s.clone()),
            (Mode::Float64, Scalar::Exact(r)) => {
                let x = rational_to_f64(r);
                if x.is_finite() {
                    Ok(Scalar::Float(x))
                } else {
                    Err(Error::NonFinite)
                }
            }
            (Mode::Exact, Scalar::Float(x)) => self.from_f64(*x),
        }
    }

    /// Parses integers, `p/q` fractions, decimals and scientific notation.
    /// In exact mode decimals are read exactly (`1.1` is `11/10`).
    pub fn parse(&self, input: &str) -> Result<Scalar> {
        let exact = parse_rational(input)?;
        match self.mode {
            Mode::Exact => self.check(Scalar::Exact(exact)),
            Mode::Float64 => {
                // Plain decimals go through the float parser so the result is
                // correctly rounded; fractions are divided after rounding each side.
                let x = if input.contains('/') {
                    rational_to_f64(&exact)
                } else {
                    input.trim().parse::<f64>().map_err(|e| Error::Parse {
                        input: input.to_string(),
                        reason: e.to_string(),
                    })?
                };
                if x.is_finite() {
                    Ok(Scalar::Float(x))
                } else {
                    Err(Error::NonFinite)
                }
            }
        }
    }

    /// Enforces the bit limit on an exact value.
    pub fn check(&self, s: Scalar) -> Result<Scalar> {
        if let Scalar::Exact(_) = &s {
            let bits = s.bits();
            if bits > self.bit_limit {
                return Err(Error::BitLimitExceeded {
                    bits,
                    limit: self.bit_limit,
                });
            }
        }
        Ok(s)
    }

    pub fn arith(&self, a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
        match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => {
                let r = match op {
                    ArithOp::Add => x + y,
                    ArithOp::Sub => x - y,
                    ArithOp::Mul => x * y,
                    ArithOp::Div => {
                        if y.is_zero() {
                            return Err(Error::DivisionByZero);
                        }
                        x / y
                    }
                };
                self.check(Scalar::Exact(r))
            }
            (Scalar::Float(x), Scalar::Float(y)) => {
                let r = match op {
                    ArithOp::Add => x + y,
                    ArithOp::Sub => x - y,
                    ArithOp::Mul => x * y,
                    ArithOp::Div => {
                        if *y == 0.0 {
                            return Err(Error::DivisionByZero);
                        }
                        x / y
                    }
                };
                if r.is_finite() {
                    Ok(Scalar::Float(r))
                } else {
                    Err(Error::NonFinite)
                }
            }
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        self.arith(a, b, ArithOp::Add)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        self.arith(a, b, ArithOp::Sub)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        self.arith(a, b, ArithOp::Mul)
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        self.arith(a, b, ArithOp::Div)
    }

    /// Equality in exact mode, relative closeness at the configured
    /// tolerance in float mode.
    pub fn close(&self, a: &Scalar, b: &Scalar) -> Result<bool> {
        scalar_close(a, b, self.relative_tolerance)
    }

    /// Square root. Exact mode only succeeds on squares of rationals.
    pub fn sqrt(&self, s: &Scalar) -> Result<Scalar> {
        match s {
            Scalar::Exact(r) => exact_sqrt(r)
                .map(Scalar::Exact)
                .ok_or_else(|| Error::ExactModeUnsupported(format!("sqrt({}) is irrational", s))),
            Scalar::Float(x) => {
                if *x < 0.0 {
                    Err(Error::NonFinite)
                } else {
                    Ok(Scalar::Float(x.sqrt()))
                }
            }
        }
    }
}

/// Exact mode: `a == b` (tolerance ignored). Float mode:
/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn scalar_close(a: &Scalar, b: &Scalar, tol: f64) -> Result<bool> {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Ok(x == y),
        (Scalar::Float(x), Scalar::Float(y)) => {
            let scale = 1.0f64.max(x.abs()).max(y.abs());
            Ok((x - y).abs() <= tol * scale)
        }
        _ => Err(Error::ModeMismatch),
    }
}

/// Free-function form of [`PrecisionConfig::arith`].
pub fn scalar_arith(cfg: &PrecisionConfig, a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
    cfg.arith(a, b, op)
}

/// Converts without overflowing on huge numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both sides down to ~64 significant bits before dividing.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (r.numer() >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> ds as usize).to_f64().unwrap_or(1.0);
    let exp = ns - ds;
    (n / d) * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Square root of a rational if it is itself rational.
pub fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// A rational `q` with `q >= sqrt(r)` and `q - sqrt(r)` tiny (about 2^-40
/// relative). Used to certify strict inequalities against irrational roots.
pub fn sqrt_upper_bound(r: &BigRational) -> BigRational {
    if let Some(s) = exact_sqrt(r) {
        return s;
    }
    let approx = rational_to_f64(r).sqrt();
    let mut q = BigRational::from_float(approx * (1.0 + 1e-15)).unwrap_or_else(BigRational::one);
    let bump = BigRational::new(BigInt::from((1u64 << 40) + 1), BigInt::from(1u64 << 40));
    while &(&q * &q) < r {
        q *= &bump;
    }
    q
}

/// Lower-bound counterpart of [`sqrt_upper_bound`].
pub fn sqrt_lower_bound(r: &BigRational) -> BigRational {
    if let Some(s) = exact_sqrt(r) {
        return s;
    }
    let approx = rational_to_f64(r).sqrt();
    let mut q = BigRational::from_float(approx * (1.0 - 1e-15)).unwrap_or_else(BigRational::zero);
    let shrink = BigRational::new(BigInt::from(1u64 << 40), BigInt::from((1u64 << 40) + 1));
    while &(&q * &q) > r {
        q *= &shrink;
    }
    q
}

/// Exact reading of `p/q`, integer, decimal or scientific notation.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    let err = |reason: &str| Error::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| err("bad exponent"))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(err("invalid digit"));
    }
    if exponent.abs() > 10_000 {
        return Err(err("exponent out of range"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer =
        BigInt::parse_bytes(all_digits.as_bytes(), 10).ok_or_else(|| err("no digits"))?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        PrecisionConfig::exact().ratio(n, d)
    }

    #[test]
    fn exact_arith_examples() {
        let cfg = PrecisionConfig::exact();
        assert_eq!(cfg.add(&q(1, 3), &q(1, 6)).unwrap(), q(1, 2));
        assert_eq!(
            cfg.div(&cfg.int(9), &cfg.int(5)).unwrap().to_string(),
            "9/5"
        );
        assert_eq!(cfg.mul(&q(2, 3), &q(3, 2)).unwrap(), cfg.int(1));
        assert_eq!(cfg.mul(&q(2, 3), &q(3, 2)).unwrap().to_string(), "1");
    }

    #[test]
    fn division_by_zero_and_mode_mismatch() {
        let cfg = PrecisionConfig::exact();
        assert_eq!(cfg.div(&q(1, 2), &q(0, 1)), Err(Error::DivisionByZero));
        let f = PrecisionConfig::float();
        assert_eq!(f.div(&f.int(1), &f.int(0)), Err(Error::DivisionByZero));
        assert_eq!(
            cfg.add(&q(1, 2), &Scalar::Float(1.0)),
            Err(Error::ModeMismatch)
        );
        assert_eq!(
            scalar_close(&q(1, 2), &Scalar::Float(0.5), 1e-9),
            Err(Error::ModeMismatch)
        );
    }

    #[test]
    fn bit_limit_is_a_hard_error() {
        let cfg = PrecisionConfig::new(Mode::Exact, 64, 1e-9).unwrap();
        let big = cfg.parse("1099511627776").unwrap();
        match cfg.mul(&big, &big) {
            Err(Error::BitLimitExceeded { limit: 64, bits }) => assert!(bits > 64),
            other => panic!("expected bit limit error, got {other:?}"),
        }
        assert!(PrecisionConfig::new(Mode::Exact, 63, 1e-9).is_err());
        assert!(PrecisionConfig::new(Mode::Exact, 64, 1.0).is_err());
    }

    #[test]
    fn close_examples() {
        assert!(scalar_close(&q(1, 2), &q(2, 4), 0.5).unwrap());
        assert!(scalar_close(&Scalar::Float(1.0), &Scalar::Float(1.0 + 1e-12), 1e-9).unwrap());
        assert!(!scalar_close(&Scalar::Float(1.0), &Scalar::Float(1.1), 1e-9).unwrap());
        // Exact mode ignores the tolerance.
        assert!(!scalar_close(&q(1, 2), &q(1, 3), 0.9).unwrap());
    }

    #[test]
    fn parse_and_render() {
        let cfg = PrecisionConfig::exact();
        assert_eq!(cfg.parse("1.1").unwrap(), q(11, 10));
        assert_eq!(cfg.parse("5/2").unwrap().to_string(), "5/2");
        assert_eq!(cfg.parse("1e-3").unwrap(), q(1, 1000));
        assert_eq!(cfg.parse("2.5E2").unwrap(), cfg.int(250));
        assert_eq!(cfg.parse("-3/6").unwrap(), q(-1, 2));
        assert_eq!(cfg.parse(".5").unwrap(), q(1, 2));
        for bad in ["", "abc", "1/0", "1.2.3", "1e", "--1"] {
            assert!(cfg.parse(bad).is_err(), "{bad:?} should not parse");
        }
        let f = PrecisionConfig::float();
        assert_eq!(f.parse("0.1").unwrap(), Scalar::Float(0.1));
        assert_eq!(f.parse("1/4").unwrap(), Scalar::Float(0.25));
        assert_eq!(Scalar::Float(2.5).to_string(), "2.5");
    }

    #[test]
    fn sqrt_modes() {
        let cfg = PrecisionConfig::exact();
        assert_eq!(cfg.sqrt(&q(25, 16)).unwrap(), q(5, 4));
        assert!(matches!(
            cfg.sqrt(&cfg.int(2)),
            Err(Error::ExactModeUnsupported(_))
        ));
        let two = BigRational::from_integer(2.into());
        let hi = sqrt_upper_bound(&two);
        let lo = sqrt_lower_bound(&two);
        assert!(&hi * &hi > two && &lo * &lo < two);
        assert!((rational_to_f64(&(hi - lo))).abs() < 1e-11);
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let n = num_traits::pow(BigInt::from(3), 2000);
        let d = num_traits::pow(BigInt::from(3), 1999) * BigInt::from(2);
        let r = BigRational::new(n, d);
        assert_eq!(rational_to_f64(&r), 1.5);
    }

    fn arb_rational() -> impl Strategy<Value = Scalar> {
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| q(n, d))
    }

    fn arb_nonzero() -> impl Strategy<Value = Scalar> {
        (1i64..1000, 1i64..1000, any::<bool>())
            .prop_map(|(n, d, neg)| q(if neg { -n } else { n }, d))
    }

    fn assert_reduced(s: &Scalar) {
        let r = s.as_rational().unwrap();
        assert!(r.denom() > &BigInt::zero());
        assert!(num_integer::Integer::gcd(r.numer(), r.denom()).is_one());
    }

    proptest! {
        #[test]
        fn exact_ops_associative_commutative(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            let cfg = PrecisionConfig::exact();
            let ab_c = cfg.add(&cfg.add(&a, &b).unwrap(), &c).unwrap();
            let a_bc = cfg.add(&a, &cfg.add(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            prop_assert_eq!(cfg.add(&a, &b).unwrap(), cfg.add(&b, &a).unwrap());
            let m1 = cfg.mul(&cfg.mul(&a, &b).unwrap(), &c).unwrap();
            let m2 = cfg.mul(&a, &cfg.mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(&m1, &m2);
            prop_assert_eq!(cfg.mul(&a, &b).unwrap(), cfg.mul(&b, &a).unwrap());
            for s in [&ab_c, &m1] {
                assert_reduced(s);
            }
        }

        #[test]
        fn div_undoes_mul(a in arb_rational(), b in arb_nonzero()) {
            let cfg = PrecisionConfig::exact();
            let prod = cfg.mul(&a, &b).unwrap();
            assert_reduced(&prod);
            let back = cfg.div(&prod, &b).unwrap();
            assert_reduced(&back);
            prop_assert_eq!(back, a);
        }

        #[test]
        fn rendering_round_trips(a in arb_rational()) {
            let cfg = PrecisionConfig::exact();
            prop_assert_eq!(cfg.parse(&a.to_string()).unwrap(), a);
        }

        #[test]
        fn float_rendering_round_trips(x in proptest::num::f64::NORMAL) {
            let cfg = PrecisionConfig::float();
            prop_assert_eq!(cfg.parse(&Scalar::Float(x).to_string()).unwrap(), Scalar::Float(x));
        }
    }
}
