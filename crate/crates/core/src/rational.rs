//! Exact rational scalars and small combinatorial helpers.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator; all arithmetic in this crate is exact (no floats).
//! Values that fit in machine words are stored inline and use `i128`
//! intermediates with overflow checks; anything larger falls back to
//! `BigRational`, and results are demoted back to the inline form whenever
//! they fit, so representation never depends on the history of a value.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

type BigRational = num_rational::BigRational;

/// Inline numerators and denominators are kept within 62 bits so that any
/// cross product fits in `i128` with room for one addition and a negation.
const SMALL_LIMIT: i64 = (1 << 62) - 1;

#[derive(Clone)]
enum Repr {
    /// Reduced, denominator ≥ 1, both within `SMALL_LIMIT`.
    Small(i64, i64),
    /// Reduced by `num-rational`; at least one component exceeds the
    /// inline range (enforced by [`Rational::demote`]).
    Big(Box<BigRational>),
}

#[derive(Clone)]
pub struct Rational(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u128(a.unsigned_abs() as u128, b.unsigned_abs() as u128) as i64
}

impl Rational {
    fn small(num: i64, den: i64) -> Self {
        debug_assert!(den >= 1);
        debug_assert!(num.unsigned_abs() <= SMALL_LIMIT as u64 && den <= SMALL_LIMIT);
        debug_assert!(gcd_i64(num, den) == 1 || num == 0);
        Rational(Repr::Small(num, den))
    }

    /// Reduce an `i128` fraction and store it inline when it fits.
    fn from_i128(mut num: i128, mut den: i128) -> Self {
        debug_assert!(den != 0);
        if den < 0 {
            num = -num;
            den = -den;
        }
        if num == 0 {
            return Rational::small(0, 1);
        }
        let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
        num /= g;
        den /= g;
        if num.unsigned_abs() <= SMALL_LIMIT as u128 && den <= SMALL_LIMIT as i128 {
            Rational::small(num as i64, den as i64)
        } else {
            Rational(Repr::Big(Box::new(BigRational::new(num.into(), den.into()))))
        }
    }

    fn from_big(b: BigRational) -> Self {
        if let (Some(n), Some(d)) = (b.numer().to_i64(), b.denom().to_i64()) {
            if n.unsigned_abs() <= SMALL_LIMIT as u64 && d <= SMALL_LIMIT {
                return Rational::small(n, d);
            }
        }
        Rational(Repr::Big(Box::new(b)))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    /// Fraction from big integers; panics on a zero denominator
    /// (programming error, matching `BigRational::new`).
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rational::from_big(BigRational::new(num, den))
    }

    pub fn from_integer(n: BigInt) -> Self {
        Rational::new(n, BigInt::one())
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "division by zero");
                if *n < 0 {
                    // i64::MIN never appears: |n| ≤ SMALL_LIMIT < |i64::MIN|
                    Rational::small(-d, -n)
                } else {
                    Rational::small(*d, *n)
                }
            }
            Repr::Big(b) => Rational::from_big(b.recip()),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    #[cfg(test)]
    fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small(..))
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        // canonical forms: equal values share a representation
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                // 62-bit components: products fit i128 exactly
                (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(self))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(self))
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::small(0, 1)
    }

    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::small(1, 1)
    }

    fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }
}

fn add_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
            let (an, ad, bn, bd) = (*an as i128, *ad as i128, *bn as i128, *bd as i128);
            // components ≤ 62 bits: an*bd + bn*ad ≤ 2^125, den ≤ 2^124
            Rational::from_i128(an * bd + bn * ad, ad * bd)
        }
        _ => Rational::from_big(a.to_big() + b.to_big()),
    }
}

fn sub_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
            let (an, ad, bn, bd) = (*an as i128, *ad as i128, *bn as i128, *bd as i128);
            Rational::from_i128(an * bd - bn * ad, ad * bd)
        }
        _ => Rational::from_big(a.to_big() - b.to_big()),
    }
}

fn mul_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
            // reduce across the diagonal first so the products stay small
            // and the result is already in lowest terms
            let g1 = gcd_i64(*an, *bd).max(1);
            let g2 = gcd_i64(*bn, *ad).max(1);
            let num = (*an / g1) as i128 * (*bn / g2) as i128;
            let den = (*ad / g2) as i128 * (*bd / g1) as i128;
            if num == 0 {
                return Rational::zero();
            }
            if num.unsigned_abs() <= SMALL_LIMIT as u128 && den <= SMALL_LIMIT as i128 {
                Rational::small(num as i64, den as i64)
            } else {
                Rational::from_i128(num, den)
            }
        }
        _ => Rational::from_big(a.to_big() * b.to_big()),
    }
}

fn div_ref(a: &Rational, b: &Rational) -> Rational {
    assert!(!b.is_zero(), "division by zero");
    mul_ref(a, &b.recip())
}

macro_rules! binop_impls {
    ($trait:ident, $method:ident, $func:ident, $assign_trait:ident, $assign_method:ident) => {
        impl std::ops::$trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $func(self, rhs)
            }
        }

        impl std::ops::$trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $func(self, &rhs)
            }
        }

        impl std::ops::$trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $func(&self, rhs)
            }
        }

        impl std::ops::$trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $func(&self, &rhs)
            }
        }

        impl std::ops::$assign_trait<&Rational> for Rational {
            fn $assign_method(&mut self, rhs: &Rational) {
                *self = $func(self, rhs);
            }
        }

        impl std::ops::$assign_trait<Rational> for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                *self = $func(self, &rhs);
            }
        }
    };
}

binop_impls!(Add, add, add_ref, AddAssign, add_assign);
binop_impls!(Sub, sub, sub_ref, SubAssign, sub_assign);
binop_impls!(Mul, mul, mul_ref, MulAssign, mul_assign);
binop_impls!(Div, div, div_ref, DivAssign, div_assign);

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl std::ops::Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational::small(-n, *d),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    if n.unsigned_abs() <= SMALL_LIMIT as u64 {
        Rational::small(n, 1)
    } else {
        Rational::from_integer(BigInt::from(n))
    }
}

/// Fraction `num/den`; panics on a zero denominator (programming error).
pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::from_i128(num as i128, den as i128)
}

/// Parses `"p"` or `"p/q"` with optional sign on `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = |msg: &str| Error::Parse { pos: 0, msg: format!("bad rational `{s}`: {msg}") };
    let (num_str, den_str) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (s, None),
    };
    let num: BigInt = num_str.parse().map_err(|_| err("integer numerator expected"))?;
    let den: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| err("integer denominator expected"))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    if den.is_negative() {
        return Err(err("denominator must be positive"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    match &r.0 {
        Repr::Small(n, 1) => n.to_string(),
        Repr::Small(n, d) => format!("{n}/{d}"),
        Repr::Big(b) => {
            if b.denom().is_one() {
                b.numer().to_string()
            } else {
                format!("{}/{}", b.numer(), b.denom())
            }
        }
    }
}

/// `base^exp` for integer `exp` of either sign; negative powers need a
/// nonzero base.
pub fn pow_i(base: &Rational, exp: i64) -> Result<Rational> {
    if exp < 0 {
        if base.is_zero() {
            return Err(Error::ZeroToNegativePower);
        }
        return pow_i(&base.recip(), -exp);
    }
    let mut out = Rational::one();
    let mut sq = base.clone();
    let mut e = exp as u64;
    while e > 0 {
        if e & 1 == 1 {
            out = &out * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    Ok(out)
}

pub fn factorial(n: u64) -> BigInt {
    let mut out = BigInt::one();
    for i in 2..=n {
        out *= BigInt::from(i);
    }
    out
}

/// Iterated factorial `n! (n-1)! … 2! 1!`, with the empty product for `n = 0`.
pub fn superfactorial(n: u64) -> BigInt {
    let mut out = BigInt::one();
    for i in 1..=n {
        out *= factorial(i);
    }
    out
}

/// Binomial coefficient `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n || n < 0 {
        return BigInt::zero();
    }
    let (n, k) = (n as u64, k as u64);
    let k = k.min(n - k);
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

pub fn big_to_rat(b: BigInt) -> Rational {
    Rational::from_integer(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "7", "-7", "3/4", "-3/4", "22/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        // normalization to lowest terms / positive denominator
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn integer_powers_both_signs() {
        let b = ratio(2, 3);
        assert_eq!(pow_i(&b, 3).unwrap(), ratio(8, 27));
        assert_eq!(pow_i(&b, -2).unwrap(), ratio(9, 4));
        assert_eq!(pow_i(&b, 0).unwrap(), rat(1));
        assert!(pow_i(&rat(0), -1).is_err());
    }

    #[test]
    fn combinatorial_helpers() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        // superfactorial: 0 -> 1, 1 -> 1, 3 -> 3!*2!*1! = 12, 4 -> 288
        assert_eq!(superfactorial(0), BigInt::from(1));
        assert_eq!(superfactorial(3), BigInt::from(12));
        assert_eq!(superfactorial(4), BigInt::from(288));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, 0), BigInt::from(1));
        assert_eq!(binomial(3, -1), BigInt::from(0));
        assert_eq!(binomial(3, 4), BigInt::from(0));
    }

    #[test]
    fn representation_is_canonical_across_the_inline_boundary() {
        // products that overflow the inline range go big, and dividing back
        // down demotes again; equal values always compare equal
        let big = pow_i(&rat(10), 25).unwrap();
        assert!(!big.is_small());
        let back = &big / &pow_i(&rat(10), 24).unwrap();
        assert!(back.is_small());
        assert_eq!(back, rat(10));
        let sum = &big + &(-&big);
        assert!(sum.is_zero() && sum.is_small());
        // a big value parsed directly equals the computed one
        assert_eq!(parse_rational("10000000000000000000000000").unwrap(), big);
    }

    fn to_reference(r: &Rational) -> num_rational::BigRational {
        num_rational::BigRational::new(r.numer(), r.denom())
    }

    proptest! {
        #[test]
        fn arithmetic_agrees_with_the_reference_implementation(
            an in -(1i128 << 70)..(1i128 << 70),
            ad in 1i128..(1i128 << 70),
            bn in -(1i128 << 70)..(1i128 << 70),
            bd in 1i128..(1i128 << 70),
        ) {
            let a = Rational::new(an.into(), ad.into());
            let b = Rational::new(bn.into(), bd.into());
            let (ra, rb) = (to_reference(&a), to_reference(&b));
            prop_assert_eq!(to_reference(&(&a + &b)), &ra + &rb);
            prop_assert_eq!(to_reference(&(&a - &b)), &ra - &rb);
            prop_assert_eq!(to_reference(&(&a * &b)), &ra * &rb);
            if !b.is_zero() {
                prop_assert_eq!(to_reference(&(&a / &b)), &ra / &rb);
            }
            prop_assert_eq!((&a).cmp(&b), ra.cmp(&rb));
            prop_assert_eq!(a == b, ra == rb);
        }

        #[test]
        fn near_the_inline_limit_results_stay_exact(
            an in (SMALL_LIMIT - 4)..=SMALL_LIMIT,
            ad in (SMALL_LIMIT - 4)..=SMALL_LIMIT,
            bn in (SMALL_LIMIT - 4)..=SMALL_LIMIT,
            bd in (SMALL_LIMIT - 4)..=SMALL_LIMIT,
        ) {
            let a = Rational::new(an.into(), ad.into());
            let b = Rational::new((-bn).into(), bd.into());
            let (ra, rb) = (to_reference(&a), to_reference(&b));
            prop_assert_eq!(to_reference(&(&a + &b)), &ra + &rb);
            prop_assert_eq!(to_reference(&(&a * &b)), &ra * &rb);
        }
    }
}
