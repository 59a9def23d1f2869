//! Discrete measures on grid cells.
//!
//! A [`DiscreteMeasure`] assigns exact rational masses, summing to 1, to
//! cells of a fixed side b^{-res_exp} anchored at 0. Ball scans use closed
//! sup-norm balls centered at cell centers with radii at grid scales; all
//! ratios against r^s are compared through integer powers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

use crate::covering::cell_indices;
use crate::error::{Error, Result};
use crate::exact::RootRational;
use crate::fractal::{digit_expansion_numbers, DigitFractal, DiscreteSet};
use crate::params::ToyConfig;
use crate::radix::{rational_string, Grid, RadixBase, Rational, Scale};

/// A finite mass assignment on 1D grid cells; total mass exactly 1.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    base: RadixBase,
    /// Cells have side b^{-res_exp}.
    res_exp: u32,
    /// Sorted by cell index; masses positive.
    cells: Vec<(i64, BigRational)>,
}

impl DiscreteMeasure {
    pub fn from_cells(
        base: RadixBase,
        res_exp: u32,
        map: BTreeMap<i64, BigRational>,
    ) -> Result<Self> {
        let cells: Vec<(i64, BigRational)> = map
            .into_iter()
            .filter(|(_, m)| !m.is_zero())
            .collect();
        if cells.is_empty() {
            return Err(Error::EmptySet);
        }
        if cells.iter().any(|(_, m)| m.is_negative()) {
            return Err(Error::BadDigits("negative mass".into()));
        }
        let total: BigRational = cells.iter().map(|(_, m)| m.clone()).sum();
        if total != BigRational::one() {
            return Err(Error::IntegralityFailure(format!(
                "total mass {} != 1",
                rational_string(&total)
            )));
        }
        Ok(DiscreteMeasure {
            base,
            res_exp,
            cells,
        })
    }

    pub fn base(&self) -> RadixBase {
        self.base
    }

    pub fn res_exp(&self) -> u32 {
        self.res_exp
    }

    pub fn cells(&self) -> &[(i64, BigRational)] {
        &self.cells
    }

    pub fn support_len(&self) -> usize {
        self.cells.len()
    }

    /// Side length of a cell.
    pub fn cell_side(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.base.b_pow(self.res_exp)))
    }

    /// Mass of the closed index window [lo, hi].
    pub fn mass_in_window(&self, lo: i64, hi: i64) -> BigRational {
        let start = self.cells.partition_point(|(i, _)| *i < lo);
        let end = self.cells.partition_point(|(i, _)| *i <= hi);
        self.cells[start..end]
            .iter()
            .map(|(_, m)| m.clone())
            .sum()
    }

    /// Mass of one m-adic cell at a scale no finer than the resolution.
    pub fn madic_cell_mass(&self, level: u32, index: i64) -> Result<BigRational> {
        let side_exp = self.base.q() * level;
        if side_exp > self.res_exp {
            return Err(Error::ScaleTooFine {
                scale: Scale::madic(level).to_string(),
                resolution: format!("b^-{}", self.res_exp),
            });
        }
        let factor = self
            .base
            .b_pow(self.res_exp - side_exp)
            .to_i64()
            .ok_or_else(|| Error::Overflow("cell ratio".into()))?;
        Ok(self.mass_in_window(index * factor, (index + 1) * factor - 1))
    }

    /// JSON rendering with cells as [index, "num/den"] pairs in index order.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "b": self.base.b(),
            "q": self.base.q(),
            "res_exp": self.res_exp,
            "cells": self.cells.iter()
                .map(|(i, m)| serde_json::json!([i, rational_string(m)]))
                .collect::<Vec<_>>(),
        })
    }
}

/// Flat measure: mass 1/|P|_delta on each delta-cell of P.
pub fn build_prop23_measure(p: &DiscreteSet, delta: Scale) -> Result<DiscreteMeasure> {
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    let base = p.base();
    if base.cmp_scales(delta, p.resolution()) == std::cmp::Ordering::Less {
        return Err(Error::ScaleTooFine {
            scale: delta.to_string(),
            resolution: p.resolution().to_string(),
        });
    }
    let res_exp = base.scale_b_exp(delta)?;
    let mut indices: Vec<i64> = Vec::new();
    for idx in cell_indices(p, delta) {
        let i = idx
            .to_i64()
            .ok_or_else(|| Error::Overflow("cell index".into()))?;
        if indices.last() != Some(&i) {
            indices.push(i);
        }
    }
    let mass = BigRational::new(BigInt::one(), BigInt::from(indices.len() as i64));
    let map: BTreeMap<i64, BigRational> =
        indices.into_iter().map(|i| (i, mass.clone())).collect();
    DiscreteMeasure::from_cells(base, res_exp, map)
}

/// The equal-weights self-similar measure, aggregated on leaf cells at the
/// fractal's resolution: each digit tuple carries mass |digits|^{-depth}.
pub fn equal_weight_ssm(f: &DigitFractal, limit: u64) -> Result<DiscreteMeasure> {
    let base = f.base();
    let mut raw = digit_expansion_numbers(base, f.digits(), f.depth(), limit)?;
    raw.sort_unstable();
    let res_exp = base.q() * f.depth();
    let point_exp = base.q() * (f.depth() - 1) + f.spacing_exp();
    let unit = BigRational::new(BigInt::one(), BigInt::from(raw.len() as i64));
    let mut map: BTreeMap<i64, BigRational> = BTreeMap::new();
    for num in raw {
        let idx = if point_exp >= res_exp {
            BigInt::from(num).div_floor(&BigInt::from(base.b_pow(point_exp - res_exp)))
        } else {
            BigInt::from(num) * BigInt::from(base.b_pow(res_exp - point_exp))
        };
        let i = idx
            .to_i64()
            .ok_or_else(|| Error::Overflow("cell index".into()))?;
        *map.entry(i).or_insert_with(BigRational::zero) += unit.clone();
    }
    DiscreteMeasure::from_cells(base, res_exp, map)
}

/// Equal mass per point, accumulated onto cells at the given scale: the
/// push-forward of the uniform point weighting.
pub fn flat_point_measure(set: &DiscreteSet, scale: Scale) -> Result<DiscreteMeasure> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let base = set.base();
    let res_exp = base.scale_b_exp(scale)?;
    let unit = BigRational::new(BigInt::one(), BigInt::from(set.len() as i64));
    let mut map: BTreeMap<i64, BigRational> = BTreeMap::new();
    for idx in cell_indices(set, scale) {
        let i = idx
            .to_i64()
            .ok_or_else(|| Error::Overflow("cell index".into()))?;
        *map.entry(i).or_insert_with(BigRational::zero) += unit.clone();
    }
    DiscreteMeasure::from_cells(base, res_exp, map)
}

/// Integer-weight view of a measure over a common denominator.
pub(crate) struct WeightedLine {
    pub(crate) idx: Vec<i64>,
    prefix: Vec<u128>,
    pub(crate) denom: u128,
}

impl WeightedLine {
    pub(crate) fn new(mu: &DiscreteMeasure) -> Result<Self> {
        let mut denom = BigUint::one();
        for (_, m) in mu.cells() {
            denom = denom.lcm(m.denom().magnitude());
        }
        let denom_u = denom
            .to_u128()
            .ok_or_else(|| Error::Overflow("mass denominator".into()))?;
        let mut idx = Vec::with_capacity(mu.support_len());
        let mut prefix = Vec::with_capacity(mu.support_len() + 1);
        prefix.push(0u128);
        let mut acc = 0u128;
        for (i, m) in mu.cells() {
            let w = (m.numer().magnitude() * (&denom / m.denom().magnitude()))
                .to_u128()
                .ok_or_else(|| Error::Overflow("mass weight".into()))?;
            acc += w;
            idx.push(*i);
            prefix.push(acc);
        }
        Ok(WeightedLine {
            idx,
            prefix,
            denom: denom_u,
        })
    }

    /// Total weight of support cells with index in the closed window [lo, hi].
    pub(crate) fn window(&self, lo: i64, hi: i64) -> u128 {
        let start = self.idx.partition_point(|i| *i < lo);
        let end = self.idx.partition_point(|i| *i <= hi);
        self.prefix[end] - self.prefix[start]
    }
}

/// All grid scales (dyadic and m-adic, merged by value) in [r_min, r_max],
/// coarsest first.
pub fn scales_in_range(base: RadixBase, r_min: Scale, r_max: Scale) -> Vec<Scale> {
    let mut out: Vec<Scale> = Vec::new();
    for grid in [Grid::Dyadic, Grid::Madic] {
        let mut level = 0u32;
        loop {
            let sc = Scale { grid, level };
            if base.cmp_scales(sc, r_min) == std::cmp::Ordering::Less {
                break;
            }
            if base.cmp_scales(sc, r_max) != std::cmp::Ordering::Greater {
                out.push(sc);
            }
            level += 1;
            if level > 10_000 {
                break;
            }
        }
    }
    out.sort_by(|a, b| base.cmp_scales(*b, *a));
    out.dedup_by(|a, b| base.cmp_scales(*a, *b) == std::cmp::Ordering::Equal);
    out
}

/// floor(r / side) where side = b^{-res_exp}: the index reach of a closed
/// ball of radius r around a cell center.
pub(crate) fn radius_in_cells(base: RadixBase, res_exp: u32, r: Scale) -> Result<i64> {
    let side_inv = base.b_pow(res_exp);
    let t = match r.grid {
        Grid::Dyadic => BigInt::from(side_inv).div_floor(&BigInt::from(
            BigUint::one() << r.level as usize,
        )),
        Grid::Madic => {
            let q = base.q() * r.level;
            if q <= res_exp {
                BigInt::from(base.b_pow(res_exp - q))
            } else {
                BigInt::from(side_inv).div_floor(&BigInt::from(base.b_pow(q)))
            }
        }
    };
    t.to_i64().ok_or_else(|| Error::Overflow("ball radius in cells".into()))
}

/// r^e as a RootRational for rational e (r a grid scale).
pub(crate) fn scale_power(base: RadixBase, r: Scale, e: Rational) -> RootRational {
    let en = *e.numer();
    let ed = *e.denom() as u32;
    debug_assert!(en >= 0);
    let inv = match r.grid {
        Grid::Dyadic => BigInt::from(2u32).pow(r.level * en as u32),
        Grid::Madic => BigInt::from(base.b_pow(base.q() * r.level * en as u32)),
    };
    RootRational::from_pow(BigRational::new(BigInt::one(), inv), ed)
}

/// Worst ball of a scan.
#[derive(Clone, Debug, Serialize)]
pub struct BallWitness {
    /// Ball center (a cell center), as an exact rational string.
    pub center: String,
    pub scale: Scale,
    pub mass: String,
    pub ratio: RootRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct AhlforsReport {
    #[serde(with = "crate::radix::serde_rational")]
    pub s: Rational,
    pub constant: RootRational,
    pub worst_upper: BallWitness,
    pub worst_lower: BallWitness,
    pub scales_tested: u64,
    pub centers_tested: u64,
}

fn center_string(base: RadixBase, res_exp: u32, i: i64) -> String {
    let side = BigRational::new(BigInt::one(), BigInt::from(base.b_pow(res_exp)));
    let c = (BigRational::from_integer(i.into()) + BigRational::new(1.into(), 2.into())) * side;
    rational_string(&c)
}

/// Exhaustive two-sided ball scan over support-cell centers and grid radii:
/// max of mu(B)/r^s and r^s/mu(B).
pub fn ahlfors_constant(
    mu: &DiscreteMeasure,
    s: Rational,
    r_min: Scale,
    r_max: Scale,
) -> Result<AhlforsReport> {
    let base = mu.base();
    let line = WeightedLine::new(mu)?;
    let scales = scales_in_range(base, r_min, r_max);
    if scales.is_empty() {
        return Err(Error::BadLevel {
            level: r_min.level,
            max: r_max.level,
        });
    }
    let denom = BigRational::from_integer(BigInt::from(line.denom as i64));
    let mut worst_upper: Option<BallWitness> = None;
    let mut worst_lower: Option<BallWitness> = None;
    let mut centers_tested = 0u64;
    for sc in &scales {
        let t = radius_in_cells(base, mu.res_exp(), *sc)?;
        // The ratio is monotone in the ball mass, so per scale only the
        // extremal windows matter.
        let mut max_w = 0u128;
        let mut max_c = 0i64;
        let mut min_w = u128::MAX;
        let mut min_c = 0i64;
        for &c in &line.idx {
            let w = line.window(c - t, c + t);
            if w > max_w {
                max_w = w;
                max_c = c;
            }
            if w < min_w {
                min_w = w;
                min_c = c;
            }
            centers_tested += 1;
        }
        let rs = scale_power(base, *sc, s);
        let up_mass = BigRational::from_integer(BigInt::from(max_w as i64)) / denom.clone();
        let up = RootRational::from_rational(up_mass.clone()).div(&rs);
        if worst_upper.as_ref().map_or(true, |w| up > w.ratio) {
            worst_upper = Some(BallWitness {
                center: center_string(base, mu.res_exp(), max_c),
                scale: *sc,
                mass: rational_string(&up_mass),
                ratio: up,
            });
        }
        let low_mass = BigRational::from_integer(BigInt::from(min_w as i64)) / denom.clone();
        let low = rs.div(&RootRational::from_rational(low_mass.clone()));
        if worst_lower.as_ref().map_or(true, |w| low > w.ratio) {
            worst_lower = Some(BallWitness {
                center: center_string(base, mu.res_exp(), min_c),
                scale: *sc,
                mass: rational_string(&low_mass),
                ratio: low,
            });
        }
    }
    let worst_upper = worst_upper.expect("nonempty scales");
    let worst_lower = worst_lower.expect("nonempty scales");
    let constant = worst_upper.ratio.clone().max(worst_lower.ratio.clone());
    Ok(AhlforsReport {
        s,
        constant,
        worst_upper,
        worst_lower,
        scales_tested: scales.len() as u64,
        centers_tested,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FrostmanReport {
    #[serde(with = "crate::radix::serde_rational")]
    pub tau: Rational,
    pub c_max: RootRational,
    pub worst: BallWitness,
    pub scales_tested: u64,
}

/// Upper ball scan sup nu(B(x,r))/r^tau over all centers x in [0,1) (cell
/// centers, including off-support) and grid radii in [r_min, r_max].
///
/// The window sum is piecewise constant in the center index, so only the
/// breakpoint centers need evaluating; the result equals the full scan.
pub fn frostman_constant(
    mu: &DiscreteMeasure,
    tau: Rational,
    r_min: Scale,
    r_max: Scale,
) -> Result<FrostmanReport> {
    let base = mu.base();
    let line = WeightedLine::new(mu)?;
    let scales = scales_in_range(base, r_min, r_max);
    if scales.is_empty() {
        return Err(Error::BadLevel {
            level: r_min.level,
            max: r_max.level,
        });
    }
    let grid_len = base
        .b_pow(mu.res_exp())
        .to_i64()
        .ok_or_else(|| Error::Overflow("grid length".into()))?;
    let denom = BigRational::from_integer(BigInt::from(line.denom as i64));
    let mut worst: Option<BallWitness> = None;
    for sc in &scales {
        let t = radius_in_cells(base, mu.res_exp(), *sc)?;
        let mut candidates: Vec<i64> = vec![0];
        for &p in &line.idx {
            candidates.push((p - t).clamp(0, grid_len - 1));
            candidates.push((p + t + 1).clamp(0, grid_len - 1));
        }
        candidates.sort_unstable();
        candidates.dedup();
        let mut max_w = 0u128;
        let mut max_c = 0i64;
        for &c in &candidates {
            let w = line.window(c - t, c + t);
            if w > max_w {
                max_w = w;
                max_c = c;
            }
        }
        let rt = scale_power(base, *sc, tau);
        let mass = BigRational::from_integer(BigInt::from(max_w as i64)) / denom.clone();
        let ratio = RootRational::from_rational(mass.clone()).div(&rt);
        if worst.as_ref().map_or(true, |w| ratio > w.ratio) {
            worst = Some(BallWitness {
                center: center_string(base, mu.res_exp(), max_c),
                scale: *sc,
                mass: rational_string(&mass),
                ratio,
            });
        }
    }
    let worst = worst.expect("nonempty scales");
    Ok(FrostmanReport {
        tau,
        c_max: worst.ratio.clone(),
        worst,
        scales_tested: scales.len() as u64,
    })
}

/// Push-forward of nu0 under theta -> m^{(1+tau)/2} * theta, restricted to
/// [0,1) and renormalized.
#[derive(Clone, Debug)]
pub struct RescaledNu {
    pub measure: DiscreteMeasure,
    /// Mass of [0,1) before renormalizing.
    pub kept_mass: BigRational,
    /// The guaranteed lower bound rho^tau.
    pub mass_lower_bound: BigRational,
    pub bound_holds: bool,
}

pub fn rescale_nu(nu0: &DiscreteMeasure, cfg: &ToyConfig) -> Result<RescaledNu> {
    let base = nu0.base();
    let factor_exp = cfg.exp_a();
    if nu0.res_exp() < factor_exp {
        return Err(Error::Overflow(
            "rescaling coarser than the unit cell".into(),
        ));
    }
    // Scaling by b^{factor_exp} widens each cell; indices are unchanged.
    let new_exp = nu0.res_exp() - factor_exp;
    let cutoff = base
        .b_pow(new_exp)
        .to_i64()
        .ok_or_else(|| Error::Overflow("grid length".into()))?;
    let mut kept: Vec<(i64, BigRational)> = Vec::new();
    let mut kept_mass = BigRational::zero();
    for (i, m) in nu0.cells() {
        if *i < cutoff {
            kept.push((*i, m.clone()));
            kept_mass += m.clone();
        }
    }
    if kept_mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    let map: BTreeMap<i64, BigRational> = kept
        .into_iter()
        .map(|(i, m)| (i, m / kept_mass.clone()))
        .collect();
    let measure = DiscreteMeasure::from_cells(base, new_exp, map)?;
    let mass_lower_bound = BigRational::new(
        BigInt::one(),
        BigInt::from(base.b_pow(cfg.exp_theta())),
    );
    let bound_holds = kept_mass >= mass_lower_bound;
    Ok(RescaledNu {
        measure,
        kept_mass,
        mass_lower_bound,
        bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::madic_cover_count;
    use crate::fractal::{build_a, build_corollary_set, DEFAULT_SIZE_LIMIT};
    use crate::params::structural_config;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cfg16(n: u32) -> ToyConfig {
        structural_config(2, 4, r(1, 2), r(5, 6), n).unwrap()
    }

    fn theta_fractal(cfg: &ToyConfig, depth: u32) -> DigitFractal {
        DigitFractal::new(
            cfg.base,
            cfg.exp_theta(),
            (0..cfg.digits_theta).collect(),
            depth,
        )
        .unwrap()
    }

    fn full_grid_measure(k: u32) -> DiscreteMeasure {
        let base = RadixBase::new(2, 1).unwrap();
        let set = DiscreteSet::from_nums(base, k, (0..(1i64 << k)).map(BigInt::from).collect(), k);
        build_prop23_measure(&set, Scale::madic(k)).unwrap()
    }

    #[test]
    fn prop23_flat_masses() {
        // full grid at 2^-3: eight cells of mass 1/8
        let mu = full_grid_measure(3);
        assert_eq!(mu.support_len(), 8);
        assert!(mu.cells().iter().all(|(_, m)| *m == rat(1, 8)));

        // corollary set at m = 4, depth 3: eight delta-cells of mass 1/8
        let p = build_corollary_set(4, r(1, 2), &[0, 2], 3, DEFAULT_SIZE_LIMIT).unwrap();
        let mu = build_prop23_measure(&p, Scale::madic(3)).unwrap();
        assert_eq!(mu.support_len(), 8);
        assert!(mu.cells().iter().all(|(_, m)| *m == rat(1, 8)));

        // singleton: a point mass
        let base = RadixBase::new(2, 4).unwrap();
        let single = DiscreteSet::from_nums(base, 4, vec![BigInt::from(5)], 1);
        let mu = build_prop23_measure(&single, Scale::madic(1)).unwrap();
        assert_eq!(mu.support_len(), 1);
        assert_eq!(mu.cells()[0].1, rat(1, 1));
    }

    #[test]
    fn prop23_cell_identity() {
        // mu(Q) * |P|_delta = |P cap Q|_delta for every coarser m-adic cell
        let p = build_corollary_set(4, r(1, 2), &[0, 2], 4, DEFAULT_SIZE_LIMIT).unwrap();
        let mu = build_prop23_measure(&p, Scale::madic(4)).unwrap();
        let total = madic_cover_count(&p, Scale::madic(4)).unwrap();
        for level in 0..=3u32 {
            let mut by_cell: BTreeMap<i64, u64> = BTreeMap::new();
            let fine: Vec<BigInt> = cell_indices(&p, Scale::madic(4)).collect();
            let coarse: Vec<BigInt> = cell_indices(&p, Scale::madic(level)).collect();
            let mut last_fine: Option<&BigInt> = None;
            for (f, c) in fine.iter().zip(coarse.iter()) {
                if last_fine != Some(f) {
                    *by_cell.entry(c.to_i64().unwrap()).or_insert(0) += 1;
                    last_fine = Some(f);
                }
            }
            for (cell, count) in by_cell {
                let mass = mu.madic_cell_mass(level, cell).unwrap();
                assert_eq!(
                    mass * BigRational::from_integer(total.into()),
                    BigRational::from_integer(count.into())
                );
            }
        }
    }

    #[test]
    fn equal_weight_theta() {
        let cfg = cfg16(1);
        let nu = equal_weight_ssm(&theta_fractal(&cfg, 1), DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(nu.support_len(), 4);
        assert!(nu.cells().iter().all(|(_, m)| *m == rat(1, 4)));
        assert_eq!(
            nu.cells().iter().map(|(i, _)| *i).collect::<Vec<_>>(),
            vec![0, 4, 8, 12]
        );

        let nu2 = equal_weight_ssm(&theta_fractal(&cfg, 2), DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(nu2.support_len(), 16);
        assert!(nu2.cells().iter().all(|(_, m)| *m == rat(1, 16)));

        // single digit: a point mass
        let base = cfg.base;
        let f = DigitFractal::new(base, 2, vec![0], 3).unwrap();
        let nu = equal_weight_ssm(&f, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(nu.support_len(), 1);
    }

    #[test]
    fn ahlfors_point_mass_degenerate() {
        let base = RadixBase::new(2, 4).unwrap();
        let single = DiscreteSet::from_nums(base, 4, vec![BigInt::from(5)], 1);
        let mu = build_prop23_measure(&single, Scale::madic(1)).unwrap();
        // r_max = r_min = 16^{-1}: mu(B) = 1 so the constant is r^{-s}
        let rep = ahlfors_constant(&mu, r(1, 2), Scale::madic(1), Scale::madic(1)).unwrap();
        assert_eq!(rep.constant, RootRational::from_pow(rat(16, 1), 2));
    }

    #[test]
    fn ahlfors_uniform_grid() {
        // flat measure on the full 2^-4 grid, s = 1: worst ratio is the
        // three-cell ball at the finest radius
        let mu = full_grid_measure(4);
        let rep = ahlfors_constant(&mu, r(1, 1), Scale::madic(4), Scale::madic(0)).unwrap();
        assert_eq!(rep.constant, RootRational::from_rational(rat(3, 1)));
    }

    #[test]
    fn frostman_point_mass() {
        let base = RadixBase::new(2, 4).unwrap();
        let single = DiscreteSet::from_nums(base, 4, vec![BigInt::from(5)], 1);
        let mu = build_prop23_measure(&single, Scale::madic(1)).unwrap();
        let rep = frostmann_helper(&mu);
        // C_max = r_min^{-tau} = 16^{1/2} = 4, attained at the atom
        assert_eq!(rep.c_max, RootRational::from_rational(rat(4, 1)));
    }

    fn frostmann_helper(mu: &DiscreteMeasure) -> FrostmanReport {
        frostman_constant(mu, r(1, 2), Scale::madic(1), Scale::madic(0)).unwrap()
    }

    #[test]
    fn frostman_monotone_in_r_min() {
        let cfg = cfg16(1);
        let nu = equal_weight_ssm(&theta_fractal(&cfg, 2), DEFAULT_SIZE_LIMIT).unwrap();
        let mut prev = RootRational::from_int(0);
        for level in 0..=2u32 {
            let rep =
                frostman_constant(&nu, r(1, 2), Scale::madic(level), Scale::madic(0)).unwrap();
            assert!(rep.c_max >= prev);
            prev = rep.c_max;
        }
    }

    #[test]
    fn rescale_keeps_quarter_mass() {
        let cfg = cfg16(1);
        let nu0 = equal_weight_ssm(&theta_fractal(&cfg, 2), DEFAULT_SIZE_LIMIT).unwrap();
        let rescaled = rescale_nu(&nu0, &cfg).unwrap();
        // nu-bar([0,1)) = nu0([0, m^{-3/4})) = 1/4 = rho^tau exactly
        assert_eq!(rescaled.kept_mass, rat(1, 4));
        assert_eq!(rescaled.mass_lower_bound, rat(1, 4));
        assert!(rescaled.bound_holds);
        let total: BigRational = rescaled
            .measure
            .cells()
            .iter()
            .map(|(_, m)| m.clone())
            .sum();
        assert_eq!(total, rat(1, 1));
    }

    #[test]
    fn rescale_point_mass_at_zero() {
        let cfg = cfg16(1);
        let base = cfg.base;
        let f = DigitFractal::new(base, 2, vec![0], 2).unwrap();
        let nu0 = equal_weight_ssm(&f, DEFAULT_SIZE_LIMIT).unwrap();
        let rescaled = rescale_nu(&nu0, &cfg).unwrap();
        assert_eq!(rescaled.measure.support_len(), 1);
        assert_eq!(rescaled.measure.cells()[0], (0, rat(1, 1)));
    }

    #[test]
    fn measure_json_is_ordered() {
        let mu = full_grid_measure(2);
        let v = mu.to_json();
        assert_eq!(v["cells"].as_array().unwrap().len(), 4);
        assert_eq!(v["cells"][0][1], "1/4");
    }
}
