//! Truncated digit-expansion self-similar sets.
//!
//! A [`DigitFractal`] describes the attractor of the similitudes
//! `x -> x/m + d * b^{-spacing_exp}` truncated at a finite depth: its points
//! are all sums `sum_j m^{-j} * d_j * b^{-spacing_exp}` over digit tuples.
//! Enumeration is exact; a [`DiscreteSet`] stores the resulting points as
//! sorted deduplicated integer numerators over a common power of b.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::params::{exact_rational_power, ToyConfig};
use crate::radix::{RadixBase, Rational, Scale, ScaledInt};

/// Default cap on enumerated point counts (keeps worst runs in memory).
pub const DEFAULT_SIZE_LIMIT: u64 = 1 << 26;

/// A truncated self-similar set given by a digit expansion.
#[derive(Clone, Debug)]
pub struct DigitFractal {
    base: RadixBase,
    /// Offsets are multiples of b^{-spacing_exp}.
    spacing_exp: u32,
    /// Sorted distinct digits, each < b^{spacing_exp}.
    digits: Vec<u64>,
    depth: u32,
}

impl DigitFractal {
    pub fn new(base: RadixBase, spacing_exp: u32, mut digits: Vec<u64>, depth: u32) -> Result<Self> {
        if depth < 1 {
            return Err(Error::BadLevel { level: depth, max: 0 });
        }
        if spacing_exp < 1 {
            return Err(Error::BadDigits("spacing exponent must be >= 1".into()));
        }
        if digits.is_empty() {
            return Err(Error::BadDigits("digit set is empty".into()));
        }
        digits.sort_unstable();
        let before = digits.len();
        digits.dedup();
        if digits.len() != before {
            return Err(Error::BadDigits("digits must be distinct".into()));
        }
        let bound = BigUint::from(base.b()).pow(spacing_exp);
        if BigUint::from(*digits.last().unwrap()) >= bound {
            return Err(Error::BadDigits(format!(
                "digit {} >= b^{} = {}",
                digits.last().unwrap(),
                spacing_exp,
                bound
            )));
        }
        Ok(DigitFractal {
            base,
            spacing_exp,
            digits,
            depth,
        })
    }

    pub fn base(&self) -> RadixBase {
        self.base
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn spacing_exp(&self) -> u32 {
        self.spacing_exp
    }

    /// Enumerates all depth-truncated points exactly.
    pub fn enumerate(&self, limit: u64) -> Result<DiscreteSet> {
        let nums = digit_expansion_numbers(self.base, &self.digits, self.depth, limit)?;
        let exp = self.base.q() * (self.depth - 1) + self.spacing_exp;
        Ok(DiscreteSet::from_biguints(
            self.base, exp, nums, self.depth,
        ))
    }
}

/// All numbers `sum_{j<positions} d_j * m^{positions-1-j}` over digit tuples.
///
/// Digits may exceed m (carrying digit sets do), in which case the output
/// contains duplicates; callers deduplicate via `DiscreteSet::from_biguints`.
pub(crate) fn digit_expansion_numbers(
    base: RadixBase,
    digits: &[u64],
    positions: u32,
    limit: u64,
) -> Result<Vec<BigUint>> {
    let needed = BigUint::from(digits.len() as u64).pow(positions);
    if needed > BigUint::from(limit) {
        return Err(Error::SizeLimit {
            needed: needed.to_string(),
            limit,
        });
    }
    let m = BigUint::from(base.m());
    let mut nums: Vec<BigUint> = vec![BigUint::zero()];
    for _ in 0..positions {
        let mut next = Vec::with_capacity(nums.len() * digits.len());
        for n in &nums {
            let shifted = n * &m;
            for &d in digits {
                next.push(&shifted + BigUint::from(d));
            }
        }
        nums = next;
    }
    Ok(nums)
}

/// Builds the depth-truncated set with similitude offsets `j * m^{-(1+tau)/2}`.
pub fn build_a(cfg: &ToyConfig, limit: u64) -> Result<DiscreteSet> {
    DigitFractal::new(
        cfg.base,
        cfg.exp_a(),
        (0..cfg.digits_a).collect(),
        cfg.n,
    )?
    .enumerate(limit)
}

/// Offsets `j * m^{-(1-tau)/2}`.
pub fn build_b(cfg: &ToyConfig, limit: u64) -> Result<DiscreteSet> {
    DigitFractal::new(
        cfg.base,
        cfg.exp_b(),
        (0..cfg.digits_b).collect(),
        cfg.n,
    )?
    .enumerate(limit)
}

/// Offsets `j * m^{-tau}`.
pub fn build_theta(cfg: &ToyConfig, limit: u64) -> Result<DiscreteSet> {
    DigitFractal::new(
        cfg.base,
        cfg.exp_theta(),
        (0..cfg.digits_theta).collect(),
        cfg.n,
    )?
    .enumerate(limit)
}

/// The uniform set with m^s chosen digits at spacing m^{-1}: offsets
/// `k_j / m` with distinct `k_j` in `{0, ..., m-1}`.
pub fn build_corollary_set(
    m: u64,
    s: Rational,
    digit_choice: &[u64],
    depth: u32,
    limit: u64,
) -> Result<DiscreteSet> {
    let b = u32::try_from(m).map_err(|_| Error::Overflow(format!("corollary base m = {m}")))?;
    let base = RadixBase::new(b, 1)?;
    let expected = exact_rational_power(&BigUint::from(m), s)?;
    if BigUint::from(digit_choice.len() as u64) != expected {
        return Err(Error::BadDigits(format!(
            "need m^s = {expected} digits, got {}",
            digit_choice.len()
        )));
    }
    DigitFractal::new(base, 1, digit_choice.to_vec(), depth)?.enumerate(limit)
}

/// A finite exact point set: sorted deduplicated numerators over b^{-exp}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteSet {
    base: RadixBase,
    exp: u32,
    nums: Vec<BigInt>,
    /// m-adic level of the finest meaningful counting scale.
    resolution: u32,
}

impl DiscreteSet {
    pub fn from_nums(base: RadixBase, exp: u32, mut nums: Vec<BigInt>, resolution: u32) -> Self {
        nums.sort_unstable();
        nums.dedup();
        debug_assert!(nums.first().map_or(true, |n| !n.lt(&BigInt::zero())));
        DiscreteSet {
            base,
            exp,
            nums,
            resolution,
        }
    }

    pub fn from_biguints(base: RadixBase, exp: u32, nums: Vec<BigUint>, resolution: u32) -> Self {
        Self::from_nums(
            base,
            exp,
            nums.into_iter().map(BigInt::from).collect(),
            resolution,
        )
    }

    pub fn base(&self) -> RadixBase {
        self.base
    }

    /// Common denominator exponent: every point is `num * b^{-exp}`.
    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn nums(&self) -> &[BigInt] {
        &self.nums
    }

    pub fn len(&self) -> usize {
        self.nums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    /// m-adic level n of the resolution scale m^{-n}.
    pub fn resolution_level(&self) -> u32 {
        self.resolution
    }

    pub fn resolution(&self) -> Scale {
        Scale::madic(self.resolution)
    }

    pub fn point(&self, i: usize) -> ScaledInt {
        self.base.scaled(self.nums[i].clone(), self.exp)
    }

    pub fn points(&self) -> impl Iterator<Item = ScaledInt> + '_ {
        self.nums.iter().map(|n| self.base.scaled(n.clone(), self.exp))
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        let den = BigInt::from(self.base.b_pow(self.exp));
        self.nums
            .iter()
            .map(|n| BigRational::new(n.clone(), den.clone()))
            .collect()
    }

    /// Numerators rescaled to a coarser common denominator exponent.
    pub(crate) fn nums_at_exp(&self, exp: u32) -> Vec<BigInt> {
        assert!(exp >= self.exp, "cannot reduce the denominator exactly");
        let f = BigInt::from(self.base.b_pow(exp - self.exp));
        self.nums.iter().map(|n| n * &f).collect()
    }

    /// Serializes to a little-endian binary dump for caching.
    ///
    /// Layout: magic `DSET1\n`, u32 b, u32 q, u32 exp, u32 resolution,
    /// u64 count, then each numerator as u32 byte length + LE magnitude bytes.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(b"DSET1\n")?;
        w.write_all(&self.base.b().to_le_bytes())?;
        w.write_all(&self.base.q().to_le_bytes())?;
        w.write_all(&self.exp.to_le_bytes())?;
        w.write_all(&self.resolution.to_le_bytes())?;
        w.write_all(&(self.nums.len() as u64).to_le_bytes())?;
        for n in &self.nums {
            let bytes = n.magnitude().to_bytes_le();
            w.write_all(&(bytes.len() as u32).to_le_bytes())?;
            w.write_all(&bytes)?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 6];
        r.read_exact(&mut magic)?;
        if &magic != b"DSET1\n" {
            return Err(Error::BadDump("bad magic".into()));
        }
        let mut u32buf = [0u8; 4];
        let mut read_u32 = |r: &mut R| -> Result<u32> {
            r.read_exact(&mut u32buf)?;
            Ok(u32::from_le_bytes(u32buf))
        };
        let b = read_u32(r)?;
        let q = read_u32(r)?;
        let exp = read_u32(r)?;
        let resolution = read_u32(r)?;
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let count = u64::from_le_bytes(u64buf);
        if count > DEFAULT_SIZE_LIMIT {
            return Err(Error::BadDump(format!("count {count} over limit")));
        }
        let base = RadixBase::new(b, q)?;
        let mut nums = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let mut lenbuf = [0u8; 4];
            r.read_exact(&mut lenbuf)?;
            let len = u32::from_le_bytes(lenbuf) as usize;
            let mut bytes = vec![0u8; len];
            r.read_exact(&mut bytes)?;
            nums.push(BigInt::from(BigUint::from_bytes_le(&bytes)));
        }
        Ok(DiscreteSet::from_nums(base, exp, nums, resolution))
    }
}
