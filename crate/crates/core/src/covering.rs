//! Cube counting and sumset machinery.
//!
//! Covering numbers are counted on half-open grid cells anchored at 0, in
//! either the dyadic or the m-adic family. Sumsets `A + theta*B`, the union
//! over a finite set of directions, the carry-digit hulls H and H', and the
//! exact inclusion distance from a sumset to its hull are all computed with
//! integer numerators over a common power of b.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::RootRational;
use crate::fractal::{digit_expansion_numbers, DiscreteSet};
use crate::params::ToyConfig;
use crate::radix::{rational_string, Grid, RadixBase, Rational, Scale, ScaledInt};

/// One covering count, optionally compared against a target.
#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub scale: Scale,
    pub count: u64,
    /// E.g. delta^{-(1+t)/2}.
    pub bound_target: Option<RootRational>,
    /// count / bound_target.
    pub ratio: Option<RootRational>,
}

/// Number of distinct m-adic cells of side m^{-level} meeting the set.
pub fn madic_cover_count(set: &DiscreteSet, r: Scale) -> Result<u64> {
    if r.grid != Grid::Madic {
        return Err(Error::BadLevel { level: r.level, max: 0 });
    }
    cover_count(set, r)
}

/// Number of distinct dyadic cells of side 2^{-level} meeting the set.
pub fn dyadic_cover_count(set: &DiscreteSet, r: Scale) -> Result<u64> {
    if r.grid != Grid::Dyadic {
        return Err(Error::BadLevel { level: r.level, max: 0 });
    }
    cover_count(set, r)
}

/// Grid-generic covering count; requires r at or above the set resolution.
pub fn cover_count(set: &DiscreteSet, r: Scale) -> Result<u64> {
    check_not_too_fine(set, r)?;
    Ok(count_distinct(cell_indices(set, r)))
}

fn check_not_too_fine(set: &DiscreteSet, r: Scale) -> Result<()> {
    let base = set.base();
    if base.cmp_scales(r, set.resolution()) == std::cmp::Ordering::Less {
        return Err(Error::ScaleTooFine {
            scale: r.to_string(),
            resolution: set.resolution().to_string(),
        });
    }
    Ok(())
}

/// Cell indices of the set's points at scale r, in nondecreasing order.
pub(crate) fn cell_indices(set: &DiscreteSet, r: Scale) -> impl Iterator<Item = BigInt> + '_ {
    let base = set.base();
    let exp = set.exp();
    let (mul, div): (BigInt, BigInt) = match r.grid {
        Grid::Madic => {
            let side_exp = base.q() * r.level;
            if exp >= side_exp {
                (BigInt::one(), BigInt::from(base.b_pow(exp - side_exp)))
            } else {
                (BigInt::from(base.b_pow(side_exp - exp)), BigInt::one())
            }
        }
        Grid::Dyadic => (
            BigInt::from(BigUint::one() << r.level as usize),
            BigInt::from(base.b_pow(exp)),
        ),
    };
    set.nums().iter().map(move |n| {
        let scaled = n * &mul;
        if div.is_one() {
            scaled
        } else {
            scaled.div_floor(&div)
        }
    })
}

fn count_distinct(indices: impl Iterator<Item = BigInt>) -> u64 {
    let mut count = 0u64;
    let mut last: Option<BigInt> = None;
    for idx in indices {
        if last.as_ref() != Some(&idx) {
            count += 1;
            last = Some(idx);
        }
    }
    count
}

/// Exact sumset {a + theta*b}.
pub fn sumset(
    a: &DiscreteSet,
    theta: &ScaledInt,
    b: &DiscreteSet,
    limit: u64,
) -> Result<DiscreteSet> {
    if a.base() != b.base() {
        return Err(Error::MismatchedBase);
    }
    let needed = (a.len() as u128) * (b.len() as u128);
    if needed > limit as u128 {
        return Err(Error::SizeLimit {
            needed: needed.to_string(),
            limit,
        });
    }
    let out_exp = a.exp().max(theta.exp() + b.exp());
    let nums = sum_nums(a, theta.num(), theta.exp(), b, out_exp);
    Ok(DiscreteSet::from_nums(
        a.base(),
        out_exp,
        nums,
        a.resolution_level().min(b.resolution_level()),
    ))
}

/// Numerators of {a + theta*b} at the common exponent out_exp, unsorted.
fn sum_nums(
    a: &DiscreteSet,
    theta_num: &BigInt,
    theta_exp: u32,
    b: &DiscreteSet,
    out_exp: u32,
) -> Vec<BigInt> {
    let base = a.base();
    let fa = BigInt::from(base.b_pow(out_exp - a.exp()));
    let ft = BigInt::from(base.b_pow(out_exp - theta_exp - b.exp()));
    let a_scaled: Vec<BigInt> = a.nums().iter().map(|n| n * &fa).collect();
    let mut out = Vec::with_capacity(a.len() * b.len());
    for bn in b.nums() {
        let tb = theta_num * bn * &ft;
        for an in &a_scaled {
            out.push(an + &tb);
        }
    }
    out
}

/// Exact union over all theta in the direction set of {a + theta*b}.
pub fn union_sumset(
    a: &DiscreteSet,
    thetas: &DiscreteSet,
    b: &DiscreteSet,
    limit: u64,
) -> Result<DiscreteSet> {
    if a.base() != b.base() || a.base() != thetas.base() {
        return Err(Error::MismatchedBase);
    }
    let needed = (a.len() as u128) * (b.len() as u128) * (thetas.len() as u128);
    if needed > limit as u128 {
        return Err(Error::SizeLimit {
            needed: needed.to_string(),
            limit,
        });
    }
    let out_exp = a.exp().max(thetas.exp() + b.exp());
    let per_theta: Vec<Vec<BigInt>> = thetas
        .nums()
        .par_iter()
        .map(|tn| sum_nums(a, tn, thetas.exp(), b, out_exp))
        .collect();
    let nums: Vec<BigInt> = per_theta.into_iter().flatten().collect();
    Ok(DiscreteSet::from_nums(
        a.base(),
        out_exp,
        nums,
        a.resolution_level().min(b.resolution_level()),
    ))
}

/// Covering count of the union sumset at scale r without materializing the
/// set; u128 fast path when the numerators fit.
pub fn union_cover_count(
    a: &DiscreteSet,
    thetas: &DiscreteSet,
    b: &DiscreteSet,
    r: Scale,
) -> Result<u64> {
    if a.base() != b.base() || a.base() != thetas.base() {
        return Err(Error::MismatchedBase);
    }
    let base = a.base();
    if a.is_empty() || b.is_empty() || thetas.is_empty() {
        return Ok(0);
    }
    let res = a.resolution_level().min(b.resolution_level());
    if base.cmp_scales(r, Scale::madic(res)) == std::cmp::Ordering::Less {
        return Err(Error::ScaleTooFine {
            scale: r.to_string(),
            resolution: Scale::madic(res).to_string(),
        });
    }
    let out_exp = a.exp().max(thetas.exp() + b.exp());
    let fa = BigInt::from(base.b_pow(out_exp - a.exp()));
    let ft = BigInt::from(base.b_pow(out_exp - thetas.exp() - b.exp()));
    // idx = floor(num * mul / div) maps an out_exp numerator to its cell.
    let (mul, div): (BigInt, BigInt) = match r.grid {
        Grid::Madic => {
            let side_exp = base.q() * r.level;
            if out_exp >= side_exp {
                (BigInt::one(), BigInt::from(base.b_pow(out_exp - side_exp)))
            } else {
                (BigInt::from(base.b_pow(side_exp - out_exp)), BigInt::one())
            }
        }
        Grid::Dyadic => (
            BigInt::from(BigUint::one() << r.level as usize),
            BigInt::from(base.b_pow(out_exp)),
        ),
    };

    let max_sum = a.nums().last().unwrap() * &fa
        + thetas.nums().last().unwrap() * b.nums().last().unwrap() * &ft;
    let scaled_bound = max_sum * &mul;

    if let (Some(_), Some(fa_s), Some(ft_s), Some(mul_s), Some(div_s)) = (
        scaled_bound.to_u128(),
        fa.to_u128(),
        ft.to_u128(),
        mul.to_u128(),
        div.to_u128(),
    ) {
        let a_scaled: Vec<u128> = a
            .nums()
            .iter()
            .map(|n| n.to_u128().unwrap() * fa_s)
            .collect();
        let b_small: Vec<u128> = b.nums().iter().map(|n| n.to_u128().unwrap()).collect();
        let mut cells: Vec<u128> = thetas
            .nums()
            .par_iter()
            .map(|tn| {
                let t = tn.to_u128().unwrap();
                let mut local = Vec::with_capacity(a_scaled.len() * b_small.len());
                for bn in &b_small {
                    let tb = t * bn * ft_s;
                    for an in &a_scaled {
                        local.push((an + tb) * mul_s / div_s);
                    }
                }
                local.sort_unstable();
                local.dedup();
                local
            })
            .flatten()
            .collect();
        cells.par_sort_unstable();
        cells.dedup();
        Ok(cells.len() as u64)
    } else {
        let mut cells: Vec<BigInt> = thetas
            .nums()
            .par_iter()
            .map(|tn| {
                let mut local: Vec<BigInt> = sum_nums(a, tn, thetas.exp(), b, out_exp)
                    .into_iter()
                    .map(|n| (n * &mul).div_floor(&div))
                    .collect();
                local.sort_unstable();
                local.dedup();
                local
            })
            .flatten()
            .collect();
        cells.par_sort_unstable();
        cells.dedup();
        Ok(cells.len() as u64)
    }
}

/// Carry hull H: digit expansions over positions 0..=n with digits bounded
/// by 2n * m^{(1+tau)/2} inclusive.
pub fn build_h(cfg: &ToyConfig, limit: u64) -> Result<DiscreteSet> {
    build_hull(cfg, 2 * cfg.n as u64 * cfg.digits_a, limit)
}

/// Inner hull H': digit bound n * m^{(1+tau)/2} inclusive.
pub fn build_h_prime(cfg: &ToyConfig, limit: u64) -> Result<DiscreteSet> {
    build_hull(cfg, cfg.n as u64 * cfg.digits_a, limit)
}

fn build_hull(cfg: &ToyConfig, digit_bound: u64, limit: u64) -> Result<DiscreteSet> {
    let digits: Vec<u64> = (0..=digit_bound).collect();
    let nums = digit_expansion_numbers(cfg.base, &digits, cfg.n + 1, limit)?;
    let exp = cfg.base.q() * cfg.n + cfg.exp_a();
    Ok(DiscreteSet::from_biguints(cfg.base, exp, nums, cfg.n))
}

/// Exact cardinality of {sum_k s_k m^k : 0 <= s_k <= bound, 0 <= k < positions}
/// by interval bookkeeping, without enumeration.
pub fn digit_sum_value_count(m: u64, bound: u64, positions: u32) -> Result<BigUint> {
    let m = BigUint::from(m);
    let bound = BigUint::from(bound);
    // Disjoint sorted inclusive intervals of reachable values.
    let mut intervals: Vec<(BigUint, BigUint)> = vec![(BigUint::zero(), bound.clone())];
    for _ in 1..positions {
        let mut next: Vec<(BigUint, BigUint)> = Vec::new();
        for (lo, hi) in &intervals {
            // m*[lo,hi] + [0,bound]
            if bound >= &m - BigUint::one() {
                push_merged(&mut next, lo * &m, hi * &m + &bound);
            } else {
                let mut v = lo.clone();
                while v <= *hi {
                    push_merged(&mut next, &v * &m, &v * &m + &bound);
                    v += BigUint::one();
                    if next.len() > (1 << 20) {
                        return Err(Error::SizeLimit {
                            needed: "interval fragmentation".into(),
                            limit: 1 << 20,
                        });
                    }
                }
            }
        }
        intervals = next;
    }
    let mut total = BigUint::zero();
    for (lo, hi) in intervals {
        total += hi - lo + BigUint::one();
    }
    Ok(total)
}

fn push_merged(intervals: &mut Vec<(BigUint, BigUint)>, lo: BigUint, hi: BigUint) {
    if let Some((_, last_hi)) = intervals.last_mut() {
        if lo <= last_hi.clone() + BigUint::one() {
            if hi > *last_hi {
                *last_hi = hi;
            }
            return;
        }
    }
    intervals.push((lo, hi));
}

/// Worst-case witnesses of the inclusion distance.
#[derive(Clone, Debug, Serialize)]
pub struct InclusionWitness {
    pub point: String,
    pub nearest: String,
}

/// max over x in X of the distance to the nearest point of H.
#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    #[serde(serialize_with = "ser_rational")]
    pub max_distance: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub budget: BigRational,
    pub within_budget: bool,
    pub witnesses: Vec<InclusionWitness>,
}

pub(crate) fn ser_rational<S: serde::Serializer>(
    r: &BigRational,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&rational_string(r))
}

const MAX_WITNESSES: usize = 8;

/// Exact max-min distance from X to H via a merge over the sorted sets.
pub fn inclusion_distance(
    x: &DiscreteSet,
    h: &DiscreteSet,
    budget: &BigRational,
) -> Result<InclusionReport> {
    if x.is_empty() || h.is_empty() {
        return Err(Error::EmptySet);
    }
    if x.base() != h.base() {
        return Err(Error::MismatchedBase);
    }
    let base = x.base();
    let exp = x.exp().max(h.exp());
    let xs = x.nums_at_exp(exp);
    let hs = h.nums_at_exp(exp);
    let mut max_dist = BigInt::from(-1);
    let mut witnesses: Vec<(BigInt, BigInt)> = Vec::new();
    let mut p = 0usize;
    for xv in &xs {
        while p + 1 < hs.len() && &hs[p + 1] <= xv {
            p += 1;
        }
        let mut best = (xv - &hs[p]).abs();
        let mut nearest = hs[p].clone();
        if p + 1 < hs.len() {
            let up = (&hs[p + 1] - xv).abs();
            if up < best {
                best = up;
                nearest = hs[p + 1].clone();
            }
        }
        if best > max_dist {
            max_dist = best;
            witnesses.clear();
            witnesses.push((xv.clone(), nearest));
        } else if best == max_dist && witnesses.len() < MAX_WITNESSES {
            witnesses.push((xv.clone(), nearest));
        }
    }
    let den = BigInt::from(base.b_pow(exp));
    let max_distance = BigRational::new(max_dist, den.clone());
    let within_budget = max_distance <= *budget;
    Ok(InclusionReport {
        max_distance,
        budget: budget.clone(),
        within_budget,
        witnesses: witnesses
            .into_iter()
            .map(|(pt, nr)| InclusionWitness {
                point: rational_string(&BigRational::new(pt, den.clone())),
                nearest: rational_string(&BigRational::new(nr, den.clone())),
            })
            .collect(),
    })
}

/// The default inclusion budget: 4 * delta.
pub fn default_inclusion_budget(cfg: &ToyConfig) -> BigRational {
    delta_value(cfg) * BigRational::from_integer(4.into())
}

pub fn delta_value(cfg: &ToyConfig) -> BigRational {
    cfg.base.scale_value(cfg.delta())
}

/// The tail of the truncated product expansion:
/// R_n = sum_{k=n+1}^{2n} m^{-k} (sum_{i+j=k} r_i l_j) m^{-(1+tau)/2}.
#[derive(Clone, Debug, Serialize)]
pub struct RemainderReport {
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub ratio_to_delta: BigRational,
}

pub fn remainder(theta_digits: &[u64], b_digits: &[u64], cfg: &ToyConfig) -> Result<RemainderReport> {
    let n = cfg.n as usize;
    if theta_digits.len() != n + 1 || b_digits.len() != n + 1 {
        return Err(Error::BadDigits(format!(
            "digit lists must have length n+1 = {}",
            n + 1
        )));
    }
    if theta_digits.iter().any(|&d| d >= cfg.digits_theta) {
        return Err(Error::BadDigits("theta digit out of range".into()));
    }
    if b_digits.iter().any(|&d| d >= cfg.digits_b) {
        return Err(Error::BadDigits("b digit out of range".into()));
    }
    let base = cfg.base;
    // num = sum_k c_k b^{q(2n-k)} at exponent 2nq + exp_a
    let mut num = BigUint::zero();
    for k in (n + 1)..=(2 * n) {
        let mut coeff = BigUint::zero();
        for i in 0..=n {
            if k >= i && k - i <= n {
                coeff += BigUint::from(theta_digits[i]) * BigUint::from(b_digits[k - i]);
            }
        }
        num += coeff * base.b_pow(base.q() * (2 * n - k) as u32);
    }
    let exp = base.q() * 2 * cfg.n + cfg.exp_a();
    let value = BigRational::new(BigInt::from(num), BigInt::from(base.b_pow(exp)));
    let ratio_to_delta = &value / delta_value(cfg);
    Ok(RemainderReport {
        value,
        ratio_to_delta,
    })
}

/// Exact subset test on point values.
pub fn is_subset(sub: &DiscreteSet, sup: &DiscreteSet) -> bool {
    if sub.base() != sup.base() {
        return false;
    }
    let exp = sub.exp().max(sup.exp());
    let a = sub.nums_at_exp(exp);
    let b = sup.nums_at_exp(exp);
    let mut p = 0usize;
    for v in &a {
        while p < b.len() && &b[p] < v {
            p += 1;
        }
        if p == b.len() || &b[p] != v {
            return false;
        }
    }
    true
}

/// Target delta^{-(1+t)/2} as an exact root-rational.
pub fn covering_target(base: &RadixBase, delta: Scale, t: Rational) -> RootRational {
    let level = match delta.grid {
        Grid::Dyadic => (2u64, delta.level as i64),
        Grid::Madic => (base.b() as u64, (base.q() * delta.level) as i64),
    };
    let (radix, l) = level;
    let exponent = Rational::new(l, 1) * (Rational::one() + t) / Rational::from_integer(2);
    let un = *exponent.numer() as u32;
    let ud = *exponent.denom() as u32;
    RootRational::from_pow(
        BigRational::from_integer(BigInt::from(radix).pow(un)),
        ud,
    )
}

/// Covering count with ratio against a target.
pub fn cover_report(set: &DiscreteSet, r: Scale, target: Option<RootRational>) -> Result<CoverReport> {
    let count = cover_count(set, r)?;
    let ratio = target
        .as_ref()
        .map(|t| RootRational::from_int(count).div(t));
    Ok(CoverReport {
        scale: r,
        count,
        bound_target: target,
        ratio,
    })
}
