//! Independent brute-force oracles.
//!
//! Everything here recomputes the library's quantities from raw rational
//! point values with naive arithmetic (BTreeSet floors, triple loops, full
//! ball scans). Nothing shares code with the library's counting, prefix-sum
//! or extremal-window paths.
#![allow(dead_code)] // each test binary uses its own subset

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

use selfsim_core::DiscreteSet;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn pow_rat(r: &BigRational, e: u32) -> BigRational {
    BigRational::new(r.numer().pow(e), r.denom().pow(e))
}

/// Distinct half-open cells [i*side, (i+1)*side) met by the points.
pub fn cover_count(points: &[BigRational], side: &BigRational) -> u64 {
    let cells: BTreeSet<BigInt> = points.iter().map(|p| (p / side).floor().to_integer()).collect();
    cells.len() as u64
}

/// Triple-loop union sumset, deduplicated, sorted.
pub fn union_sumset(
    a: &[BigRational],
    thetas: &[BigRational],
    b: &[BigRational],
) -> Vec<BigRational> {
    let mut out = BTreeSet::new();
    for t in thetas {
        for y in b {
            let ty = t * y;
            for x in a {
                out.insert(x + &ty);
            }
        }
    }
    out.into_iter().collect()
}

/// max over x of the distance to the nearest h (h sorted ascending).
pub fn inclusion_max_distance(xs: &[BigRational], hs: &[BigRational]) -> BigRational {
    let mut max = BigRational::zero();
    for x in xs {
        let i = hs.partition_point(|h| h < x);
        let mut best: Option<BigRational> = None;
        if i < hs.len() {
            best = Some((&hs[i] - x).abs());
        }
        if i > 0 {
            let d = (x - &hs[i - 1]).abs();
            best = Some(match best {
                Some(b) if b < d => b,
                _ => d,
            });
        }
        let d = best.expect("nonempty hull");
        if d > max {
            max = d;
        }
    }
    max
}

/// Minimal regularity constant, reported as C^sd: the max over all scale
/// pairs (r, R) from `sides` (values descending) and all R-cells Q of
/// max(count/(R/r)^s, (R/r)^s/count) raised to the sd-th power.
pub fn regularity_cmin_pow(
    points: &[BigRational],
    sn: u32,
    sd: u32,
    sides: &[BigRational],
) -> BigRational {
    let mut worst = BigRational::zero();
    for (ci, coarse) in sides.iter().enumerate() {
        for fine in &sides[ci..] {
            // group points by coarse cell
            let mut cells: BTreeSet<BigInt> = BTreeSet::new();
            for p in points {
                cells.insert((p / coarse).floor().to_integer());
            }
            let ratio_pow = pow_rat(&(coarse / fine), sn);
            for q in cells {
                let qr = BigRational::from_integer(q);
                let members: Vec<BigRational> = points
                    .iter()
                    .filter(|p| {
                        let c = (*p / coarse).floor();
                        c == qr.clone()
                    })
                    .cloned()
                    .collect();
                let count = cover_count(&members, fine);
                let count_pow =
                    BigRational::from_integer(BigInt::from(count)).pow_u(sd);
                let up = &count_pow / &ratio_pow;
                let down = &ratio_pow / &count_pow;
                if up > worst {
                    worst = up;
                }
                if down > worst {
                    worst = down;
                }
            }
        }
    }
    worst
}

trait PowU {
    fn pow_u(&self, e: u32) -> BigRational;
}

impl PowU for BigRational {
    fn pow_u(&self, e: u32) -> BigRational {
        pow_rat(self, e)
    }
}

/// Naive 1D two-sided ball scan over the given centers and radii; returns
/// (upper^sd, lower^sd) maxima where upper = mass/r^s, lower = r^s/mass.
pub fn ball_constants_pow(
    cells: &[(BigRational, BigRational)], // (center, mass)
    sn: u32,
    sd: u32,
    centers: &[BigRational],
    radii: &[BigRational],
) -> (BigRational, BigRational) {
    let mut up = BigRational::zero();
    let mut low = BigRational::zero();
    for r in radii {
        let rs_pow = pow_rat(r, sn);
        for c in centers {
            let mut mass = BigRational::zero();
            for (x, m) in cells {
                if (x - c).abs() <= *r {
                    mass += m.clone();
                }
            }
            if mass.is_zero() {
                continue;
            }
            let mass_pow = pow_rat(&mass, sd);
            let u = &mass_pow / &rs_pow;
            if u > up {
                up = u;
            }
            let l = &rs_pow / &mass_pow;
            if l > low {
                low = l;
            }
        }
    }
    (up, low)
}

/// Naive 1D Frostman scan over ALL cell centers of the grid in [0,1).
pub fn frostman_cmax_pow(
    cells: &[(BigRational, BigRational)],
    tn: u32,
    td: u32,
    grid_len: i64,
    side: &BigRational,
    radii: &[BigRational],
) -> BigRational {
    let centers: Vec<BigRational> = (0..grid_len)
        .map(|i| (BigRational::from_integer(i.into()) + rat(1, 2)) * side)
        .collect();
    let mut worst = BigRational::zero();
    for r in radii {
        let rt_pow = pow_rat(r, tn);
        for c in &centers {
            let mut mass = BigRational::zero();
            for (x, m) in cells {
                if (x - c).abs() <= *r {
                    mass += m.clone();
                }
            }
            if mass.is_zero() {
                continue;
            }
            let v = pow_rat(&mass, td) / &rt_pow;
            if v > worst {
                worst = v;
            }
        }
    }
    worst
}

/// Naive 2D two-sided scan with s = 1 over all support centers: returns
/// (max mass/r, max r/mass) over closed sup-norm balls.
pub fn ball2_constants(
    cells: &[((BigRational, BigRational), BigRational)], // ((cx, cy), mass)
    radii: &[BigRational],
) -> (BigRational, BigRational) {
    let mut up = BigRational::zero();
    let mut low = BigRational::zero();
    for r in radii {
        for ((cx, cy), _) in cells {
            let mut mass = BigRational::zero();
            for ((x, y), m) in cells {
                if (x - cx).abs() <= *r && (y - cy).abs() <= *r {
                    mass += m.clone();
                }
            }
            let u = &mass / r;
            if u > up {
                up = u;
            }
            let l = r / &mass;
            if l > low {
                low = l;
            }
        }
    }
    (up, low)
}

/// All dyadic and m-adic side lengths in [r_min, r_max], descending, deduped.
pub fn grid_sides(m: u64, r_min: &BigRational, r_max: &BigRational) -> Vec<BigRational> {
    let mut sides: BTreeSet<BigRational> = BTreeSet::new();
    for radix in [2u64, m] {
        let mut v = BigRational::one();
        loop {
            if v < *r_min {
                break;
            }
            if v <= *r_max {
                sides.insert(v.clone());
            }
            v /= BigRational::from_integer(BigInt::from(radix));
        }
    }
    sides.into_iter().rev().collect()
}

pub fn set_values(s: &DiscreteSet) -> Vec<BigRational> {
    s.to_rationals()
}
