//! Exact comparison of quantities of the form `(num/den)^{1/root}`.
//!
//! Regularity and Frostman constants involve fractional powers such as
//! `(R/r)^s` with rational `s`, which are irrational in general. Instead of
//! floating point, a quantity is stored as its `root`-th power (an exact
//! non-negative rational); comparisons cross-raise to a common power and the
//! decimal rendering takes an integer n-th root, so pass/fail decisions never
//! touch a float.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::radix::rational_string;

/// A non-negative real number known exactly as the root-th root of a rational.
#[derive(Clone, Debug)]
pub struct RootRational {
    pow: BigRational,
    root: u32,
}

impl RootRational {
    /// value = r (root 1).
    pub fn from_rational(r: BigRational) -> Self {
        assert!(!r.is_negative(), "RootRational requires a non-negative value");
        RootRational { pow: r, root: 1 }
    }

    pub fn from_int(v: u64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// value = pow^{1/root}.
    pub fn from_pow(pow: BigRational, root: u32) -> Self {
        assert!(root >= 1, "root must be >= 1");
        assert!(!pow.is_negative(), "RootRational requires a non-negative power");
        RootRational { pow, root }
    }

    /// The stored power, i.e. value^root.
    pub fn pow(&self) -> &BigRational {
        &self.pow
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn is_zero(&self) -> bool {
        self.pow.is_zero()
    }

    /// value^e as a new RootRational.
    pub fn powi(&self, e: u32) -> Self {
        RootRational {
            pow: pow_rational(&self.pow, e),
            root: self.root,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let lcm = (self.root as u64).lcm(&(other.root as u64)) as u32;
        let a = pow_rational(&self.pow, lcm / self.root);
        let b = pow_rational(&other.pow, lcm / other.root);
        RootRational { pow: a * b, root: lcm }
    }

    /// self / other; other must be nonzero.
    pub fn div(&self, other: &Self) -> Self {
        let lcm = (self.root as u64).lcm(&(other.root as u64)) as u32;
        let a = pow_rational(&self.pow, lcm / self.root);
        let b = pow_rational(&other.pow, lcm / other.root);
        assert!(!b.is_zero());
        RootRational { pow: a / b, root: lcm }
    }

    /// max(self/other, other/self); both must be nonzero.
    pub fn symmetric_ratio(&self, other: &Self) -> Self {
        let lcm = (self.root as u64).lcm(&(other.root as u64)) as u32;
        let a = pow_rational(&self.pow, lcm / self.root);
        let b = pow_rational(&other.pow, lcm / other.root);
        assert!(!a.is_zero() && !b.is_zero());
        let r = &a / &b;
        if r >= BigRational::one() {
            RootRational { pow: r, root: lcm }
        } else {
            RootRational { pow: r.recip(), root: lcm }
        }
    }

    /// Decimal rendering with `digits` fractional digits, rounded toward zero.
    pub fn to_decimal(&self, digits: u32) -> String {
        let numer = self.pow.numer().magnitude();
        let denom = self.pow.denom().magnitude();
        let ten = BigUint::from(10u32);
        let scaled = numer * ten.pow(digits * self.root);
        let raw = scaled.div_floor(denom).nth_root(self.root);
        let shift = ten.pow(digits);
        let (int_part, frac_part) = raw.div_rem(&shift);
        format!("{}.{:0>width$}", int_part, frac_part.to_string(), width = digits as usize)
    }

    pub fn to_f64(&self) -> f64 {
        let p = self.pow.to_f64().unwrap_or(f64::INFINITY);
        p.powf(1.0 / self.root as f64)
    }
}

fn pow_rational(r: &BigRational, e: u32) -> BigRational {
    BigRational::new(r.numer().pow(e), r.denom().pow(e))
}

impl PartialEq for RootRational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RootRational {}

impl PartialOrd for RootRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let lcm = (self.root as u64).lcm(&(other.root as u64)) as u32;
        let a = pow_rational(&self.pow, lcm / self.root);
        let b = pow_rational(&other.pow, lcm / other.root);
        a.cmp(&b)
    }
}

impl serde::Serialize for RootRational {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = ser.serialize_struct("RootRational", 3)?;
        s.serialize_field("pow", &rational_string(&self.pow))?;
        s.serialize_field("root", &self.root)?;
        s.serialize_field("decimal", &self.to_decimal(12))?;
        s.end()
    }
}

impl std::fmt::Display for RootRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.root == 1 {
            write!(f, "{}", rational_string(&self.pow))
        } else {
            write!(f, "({})^(1/{}) ~ {}", rational_string(&self.pow), self.root, self.to_decimal(6))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rr(n: i64, d: i64, root: u32) -> RootRational {
        RootRational::from_pow(BigRational::new(n.into(), d.into()), root)
    }

    #[test]
    fn cross_root_comparison() {
        // 2^(1/2) vs 3^(1/3): 2^3 = 8 > 3^2 = 9? no, 8 < 9, so sqrt(2) < cbrt(3)
        assert_eq!(rr(2, 1, 2).cmp(&rr(3, 1, 3)), Ordering::Less);
        // 4^(1/2) == 2
        assert_eq!(rr(4, 1, 2), rr(2, 1, 1));
        assert!(rr(9, 4, 2) > rr(1, 1, 1));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rr(2, 1, 2).to_decimal(12), "1.414213562373");
        assert_eq!(rr(1, 4, 1).to_decimal(4), "0.2500");
        assert_eq!(rr(27, 1, 3).to_decimal(3), "3.000");
        assert_eq!(RootRational::from_int(0).to_decimal(2), "0.00");
    }

    #[test]
    fn symmetric_ratio_is_at_least_one() {
        let a = rr(3, 2, 1);
        let b = rr(2, 1, 1);
        let r = a.symmetric_ratio(&b);
        assert_eq!(r.pow(), &BigRational::new(4.into(), 3.into()));
        assert_eq!(a.symmetric_ratio(&a), RootRational::from_int(1));
    }

    #[test]
    fn mul_cross_roots() {
        // sqrt(2) * sqrt(2) = 2
        let s = rr(2, 1, 2);
        assert_eq!(s.mul(&s), RootRational::from_int(2));
        // 2 * 2^(1/2) = 8^(1/2)
        assert_eq!(RootRational::from_int(2).mul(&s), rr(8, 1, 2));
    }
}
