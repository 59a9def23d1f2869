//! Exact arithmetic substrate.
//!
//! Every scale in the constructions is an integer power of a fixed radix
//! `b`, and every point is an integer multiple of such a power. Points are
//! represented as `num * b^{-exp}` with arbitrary-precision numerators, so
//! sums, products and grid floors are computed without rounding of any kind.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Small rational used for parameters (t, tau, s, slack).
pub type Rational = Ratio<i64>;

/// Renders a rational as `num/den` (or just `num` when integral).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde helper: parameter rationals as `num/den` strings.
pub(crate) mod serde_rational {
    use super::Rational;
    use num_traits::One;

    pub fn serialize<S: serde::Serializer>(
        r: &Rational,
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        if r.denom().is_one() {
            ser.serialize_str(&r.numer().to_string())
        } else {
            ser.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
        }
    }
}

/// The radix: an atomic base `b >= 2` and a power `q >= 1` with `m = b^q`.
///
/// `m` is the contraction denominator of the self-similar constructions
/// (`rho = 1/m`); keeping the atomic base separate lets fractional powers of
/// `m` such as `m^{(1+tau)/2}` be exact integer powers of `b`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub struct RadixBase {
    b: u32,
    q: u32,
    m: u64,
}

impl RadixBase {
    pub fn new(b: u32, q: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::BadDigits(format!("radix b must be >= 2, got {b}")));
        }
        if q < 1 {
            return Err(Error::BadDigits(format!("power q must be >= 1, got {q}")));
        }
        let m = (b as u64)
            .checked_pow(q)
            .ok_or_else(|| Error::Overflow(format!("{b}^{q} does not fit in 64 bits")))?;
        Ok(RadixBase { b, q, m })
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// m = b^q.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// b^e as a big integer.
    pub fn b_pow(&self, e: u32) -> BigUint {
        BigUint::from(self.b).pow(e)
    }

    /// The b-exponent of m^x, i.e. q*x, which must be a non-negative integer.
    pub fn exponent_of(&self, x: Rational) -> Result<u32> {
        let scaled = x * Rational::from_integer(self.q as i64);
        if !scaled.is_integer() || scaled.numer().is_negative() {
            return Err(Error::NonIntegralExponent(format!(
                "m^{x} = {}^{} is not an integer power of {}",
                self.b,
                scaled,
                self.b
            )));
        }
        Ok(*scaled.numer() as u32)
    }

    /// A point in canonical form: the numerator is reduced by `b` until it is
    /// no longer divisible (zero is stored with exponent 0).
    pub fn scaled(&self, num: BigInt, exp: u32) -> ScaledInt {
        let mut num = num;
        let mut exp = exp;
        if num.is_zero() {
            return ScaledInt { num, exp: 0 };
        }
        let b = BigInt::from(self.b);
        while exp > 0 {
            let (d, r) = num.div_rem(&b);
            if !r.is_zero() {
                break;
            }
            num = d;
            exp -= 1;
        }
        ScaledInt { num, exp }
    }

    pub fn from_int(&self, v: i64) -> ScaledInt {
        self.scaled(BigInt::from(v), 0)
    }

    pub fn add(&self, x: &ScaledInt, y: &ScaledInt) -> ScaledInt {
        let exp = x.exp.max(y.exp);
        let num = x.num.clone() * BigInt::from(self.b_pow(exp - x.exp))
            + y.num.clone() * BigInt::from(self.b_pow(exp - y.exp));
        self.scaled(num, exp)
    }

    pub fn sub(&self, x: &ScaledInt, y: &ScaledInt) -> ScaledInt {
        let exp = x.exp.max(y.exp);
        let num = x.num.clone() * BigInt::from(self.b_pow(exp - x.exp))
            - y.num.clone() * BigInt::from(self.b_pow(exp - y.exp));
        self.scaled(num, exp)
    }

    pub fn mul(&self, x: &ScaledInt, y: &ScaledInt) -> ScaledInt {
        self.scaled(&x.num * &y.num, x.exp + y.exp)
    }

    pub fn cmp_values(&self, x: &ScaledInt, y: &ScaledInt) -> Ordering {
        // num_x / b^ex vs num_y / b^ey, cross-multiplied.
        let exp = x.exp.max(y.exp);
        let lhs = x.num.clone() * BigInt::from(self.b_pow(exp - x.exp));
        let rhs = y.num.clone() * BigInt::from(self.b_pow(exp - y.exp));
        lhs.cmp(&rhs)
    }

    pub fn to_rational(&self, x: &ScaledInt) -> BigRational {
        BigRational::new(x.num.clone(), BigInt::from(self.b_pow(x.exp)))
    }

    /// Side length of a scale as an exact rational.
    pub fn scale_value(&self, s: Scale) -> BigRational {
        match s.grid {
            Grid::Dyadic => BigRational::new(BigInt::one(), BigInt::from(2u32).pow(s.level)),
            Grid::Madic => BigRational::new(BigInt::one(), BigInt::from(self.b_pow(self.q * s.level))),
        }
    }

    /// Compares two scales by side length.
    pub fn cmp_scales(&self, a: Scale, b: Scale) -> Ordering {
        // 2^{-ka} vs 2^{-kb} etc.; cross-compare the inverse sides.
        let inv = |s: Scale| -> BigUint {
            match s.grid {
                Grid::Dyadic => BigUint::from(2u32).pow(s.level),
                Grid::Madic => self.b_pow(self.q * s.level),
            }
        };
        inv(b).cmp(&inv(a))
    }

    /// The exponent e with side(s) = b^{-e}, when the scale lies on the
    /// b-grid (m-adic scales always do; dyadic ones require b = 2^kappa
    /// with kappa dividing the level).
    pub fn scale_b_exp(&self, s: Scale) -> Result<u32> {
        match s.grid {
            Grid::Madic => Ok(self.q * s.level),
            Grid::Dyadic => {
                if !self.b.is_power_of_two() {
                    return Err(Error::NonIntegralExponent(format!(
                        "2^-{} is not a power of b = {}",
                        s.level, self.b
                    )));
                }
                let kappa = self.b.trailing_zeros();
                if s.level % kappa != 0 {
                    return Err(Error::NonIntegralExponent(format!(
                        "2^-{} is not a power of b = {}",
                        s.level, self.b
                    )));
                }
                Ok(s.level / kappa)
            }
        }
    }

    /// Index of the half-open cell [i*r, (i+1)*r) containing x, anchored at 0.
    pub fn floor_to_cell(&self, x: &ScaledInt, r: Scale) -> BigInt {
        match r.grid {
            Grid::Madic => {
                let side_exp = self.q * r.level;
                if x.exp <= side_exp {
                    &x.num * BigInt::from(self.b_pow(side_exp - x.exp))
                } else {
                    x.num.div_floor(&BigInt::from(self.b_pow(x.exp - side_exp)))
                }
            }
            Grid::Dyadic => {
                let scaled = &x.num << r.level;
                scaled.div_floor(&BigInt::from(self.b_pow(x.exp)))
            }
        }
    }
}

/// An exact point `num * b^{-exp}`.
///
/// Canonical form (numerator not divisible by b) is maintained by the
/// [`RadixBase`] constructors, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ScaledInt {
    num: BigInt,
    exp: u32,
}

impl ScaledInt {
    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

/// Which grid family a scale belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum Grid {
    Dyadic,
    Madic,
}

/// A grid scale: side 2^{-level} (dyadic) or m^{-level} (m-adic).
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub struct Scale {
    pub grid: Grid,
    pub level: u32,
}

impl Scale {
    pub fn dyadic(level: u32) -> Self {
        Scale { grid: Grid::Dyadic, level }
    }

    pub fn madic(level: u32) -> Self {
        Scale { grid: Grid::Madic, level }
    }
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.grid {
            Grid::Dyadic => write!(f, "2^-{}", self.level),
            Grid::Madic => write!(f, "m^-{}", self.level),
        }
    }
}

/// Validates that (b, q, tau) can represent the construction exactly:
/// q*tau, q*(1+tau)/2 and q*(1-tau)/2 must all be integers.
pub fn make_base(b: u32, q: u32, tau: Rational) -> Result<RadixBase> {
    if tau < Rational::zero() || tau > Rational::one() {
        return Err(Error::BadOrder {
            tau: tau.to_string(),
            t: "1".into(),
        });
    }
    let base = RadixBase::new(b, q)?;
    let half = Rational::new(1, 2);
    base.exponent_of(tau)?;
    base.exponent_of((Rational::one() + tau) * half)?;
    base.exponent_of((Rational::one() - tau) * half)?;
    Ok(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base16() -> RadixBase {
        RadixBase::new(2, 4).unwrap()
    }

    #[test]
    fn make_base_validates_exponents() {
        let base = make_base(2, 4, Rational::new(1, 2)).unwrap();
        assert_eq!(base.m(), 16);
        assert_eq!(base.exponent_of(Rational::new(1, 2)).unwrap(), 2);
        assert_eq!(base.exponent_of(Rational::new(3, 4)).unwrap(), 3);
        assert_eq!(base.exponent_of(Rational::new(1, 4)).unwrap(), 1);

        // q*tau = 1/2 is fractional
        assert!(matches!(
            make_base(2, 1, Rational::new(1, 2)),
            Err(Error::NonIntegralExponent(_))
        ));

        // tau = 0 boundary: the base itself is valid
        let base = make_base(3, 2, Rational::zero()).unwrap();
        assert_eq!(base.m(), 9);
    }

    #[test]
    fn add_and_mul_examples() {
        let base = RadixBase::new(2, 1).unwrap();
        // 3*2^-2 + 1*2^-1 = 5*2^-2
        let x = base.scaled(BigInt::from(3), 2);
        let y = base.scaled(BigInt::from(1), 1);
        let s = base.add(&x, &y);
        assert_eq!(s.num(), &BigInt::from(5));
        assert_eq!(s.exp(), 2);

        // identity
        let one = base.from_int(1);
        assert_eq!(base.mul(&one, &x), x);

        // 3*2^-2 * 1*2^-1 = 3*2^-3
        let p = base.mul(&x, &y);
        assert_eq!(p.num(), &BigInt::from(3));
        assert_eq!(p.exp(), 3);
    }

    #[test]
    fn floor_to_cell_examples() {
        let base = base16();
        // x = 5*2^-3, r = 2^-2 -> cell 2
        let x = base.scaled(BigInt::from(5), 3);
        assert_eq!(base.floor_to_cell(&x, Scale::dyadic(2)), BigInt::from(2));
        // x = 0 -> cell 0
        let zero = base.from_int(0);
        assert_eq!(base.floor_to_cell(&zero, Scale::dyadic(2)), BigInt::zero());
        assert_eq!(base.floor_to_cell(&zero, Scale::madic(1)), BigInt::zero());
        // x = 7*16^-1 at r = 16^-1 -> cell 7
        let x = base.scaled(BigInt::from(7), 4);
        assert_eq!(base.floor_to_cell(&x, Scale::madic(1)), BigInt::from(7));
    }

    #[test]
    fn canonical_form_is_unique() {
        let base = base16();
        let a = base.scaled(BigInt::from(8), 4); // 8/16 = 1/2
        let b = base.scaled(BigInt::from(1), 1);
        assert_eq!(a, b);
        assert_eq!(a.exp(), 1);
        let z = base.scaled(BigInt::zero(), 7);
        assert_eq!(z.exp(), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        // Cross-check against num-rational, an independent arithmetic path.
        #[test]
        fn add_matches_rational_oracle(nx in -10_000i64..10_000, ex in 0u32..12,
                                       ny in -10_000i64..10_000, ey in 0u32..12,
                                       b in 2u32..6) {
            let base = RadixBase::new(b, 1).unwrap();
            let x = base.scaled(BigInt::from(nx), ex);
            let y = base.scaled(BigInt::from(ny), ey);
            let sum = base.add(&x, &y);
            let oracle = BigRational::new(nx.into(), BigInt::from(b).pow(ex))
                + BigRational::new(ny.into(), BigInt::from(b).pow(ey));
            prop_assert_eq!(base.to_rational(&sum), oracle);
        }

        #[test]
        fn mul_matches_rational_oracle(nx in -10_000i64..10_000, ex in 0u32..12,
                                       ny in -10_000i64..10_000, ey in 0u32..12,
                                       b in 2u32..6) {
            let base = RadixBase::new(b, 1).unwrap();
            let x = base.scaled(BigInt::from(nx), ex);
            let y = base.scaled(BigInt::from(ny), ey);
            let prod = base.mul(&x, &y);
            let oracle = BigRational::new(nx.into(), BigInt::from(b).pow(ex))
                * BigRational::new(ny.into(), BigInt::from(b).pow(ey));
            prop_assert_eq!(base.to_rational(&prod), oracle);
        }

        #[test]
        fn ordering_matches_rational_oracle(nx in -10_000i64..10_000, ex in 0u32..12,
                                            ny in -10_000i64..10_000, ey in 0u32..12) {
            let base = base16();
            let x = base.scaled(BigInt::from(nx), ex);
            let y = base.scaled(BigInt::from(ny), ey);
            let oracle = base.to_rational(&x).cmp(&base.to_rational(&y));
            prop_assert_eq!(base.cmp_values(&x, &y), oracle);
        }

        // i*r <= x < (i+1)*r, verified in rational arithmetic.
        #[test]
        fn floor_to_cell_brackets(n in 0i64..1_000_000, e in 0u32..10,
                                  level in 0u32..8, dyadic in proptest::bool::ANY) {
            let base = base16();
            let x = base.scaled(BigInt::from(n), e);
            let r = if dyadic { Scale::dyadic(level) } else { Scale::madic(level / 4) };
            let i = base.floor_to_cell(&x, r);
            let side = base.scale_value(r);
            let xr = base.to_rational(&x);
            let lo = BigRational::from(i.clone()) * side.clone();
            let hi = BigRational::from(i + 1) * side;
            prop_assert!(lo <= xr && xr < hi);
        }

        // Same cell iff same half-open bracket.
        #[test]
        fn same_cell_iff_same_bracket(na in 0i64..100_000, nb in 0i64..100_000, level in 0u32..6) {
            let base = base16();
            let e = 8u32;
            let x = base.scaled(BigInt::from(na), e);
            let y = base.scaled(BigInt::from(nb), e);
            let r = Scale::dyadic(level);
            let same = base.floor_to_cell(&x, r) == base.floor_to_cell(&y, r);
            let side = base.scale_value(r);
            let fx = (base.to_rational(&x) / side.clone()).floor();
            let fy = (base.to_rational(&y) / side).floor();
            prop_assert_eq!(same, fx == fy);
        }

        #[test]
        fn canonicalization_idempotent(n in -1_000_000i64..1_000_000, e in 0u32..16) {
            let base = base16();
            let x = base.scaled(BigInt::from(n), e);
            let y = base.scaled(x.num().clone(), x.exp());
            prop_assert_eq!(x, y);
        }
    }
}
