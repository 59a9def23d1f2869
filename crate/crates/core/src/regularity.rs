//! Uniformity and regularity between scales.
//!
//! A set is uniform when every occupied cell at one grid level has the same
//! number of occupied children at the next. The regularity constant between
//! scales delta and Delta is the least C with
//! `C^{-1} (R/r)^s <= |P cap Q|_r <= C (R/r)^s` over all grid scale pairs
//! delta <= r <= R <= Delta and all R-cells Q meeting P. The scan is
//! exhaustive, and fractional powers are compared through integer powers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::covering::cell_indices;
use crate::error::{Error, Result};
use crate::exact::RootRational;
use crate::fractal::DiscreteSet;
use crate::params::exact_rational_power;
use crate::radix::{Grid, Rational, Scale};

/// Per-level branching counts, or a witness of non-uniformity.
#[derive(Clone, Debug, Serialize)]
pub enum UniformityOutcome {
    Uniform { branching: Vec<u64> },
    NotUniform {
        level: u32,
        cell_a: String,
        count_a: u64,
        cell_b: String,
        count_b: u64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct UniformityReport {
    /// m-adic levels 0..levels checked (scales m^{-j}).
    pub levels: u32,
    pub outcome: UniformityOutcome,
}

impl UniformityReport {
    pub fn is_uniform(&self) -> bool {
        matches!(self.outcome, UniformityOutcome::Uniform { .. })
    }

    pub fn branching(&self) -> Option<&[u64]> {
        match &self.outcome {
            UniformityOutcome::Uniform { branching } => Some(branching),
            _ => None,
        }
    }
}

/// Checks constant branching on m-adic levels j -> j+1 for j < levels.
pub fn uniformity_check(set: &DiscreteSet, levels: u32) -> Result<UniformityReport> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if levels > set.resolution_level() {
        return Err(Error::BadLevel {
            level: levels,
            max: set.resolution_level(),
        });
    }
    let mut branching = Vec::with_capacity(levels as usize);
    for j in 0..levels {
        let parents: Vec<BigInt> = cell_indices(set, Scale::madic(j)).collect();
        let children: Vec<BigInt> = cell_indices(set, Scale::madic(j + 1)).collect();
        // Sorted point order groups parents contiguously.
        let mut expected: Option<(u64, BigInt)> = None;
        let mut i = 0usize;
        while i < parents.len() {
            let parent = &parents[i];
            let mut count = 0u64;
            let mut last_child: Option<&BigInt> = None;
            while i < parents.len() && &parents[i] == parent {
                if last_child != Some(&children[i]) {
                    count += 1;
                    last_child = Some(&children[i]);
                }
                i += 1;
            }
            match &expected {
                None => expected = Some((count, parent.clone())),
                Some((n, first_cell)) => {
                    if count != *n {
                        return Ok(UniformityReport {
                            levels,
                            outcome: UniformityOutcome::NotUniform {
                                level: j,
                                cell_a: first_cell.to_string(),
                                count_a: *n,
                                cell_b: parent.to_string(),
                                count_b: count,
                            },
                        });
                    }
                }
            }
        }
        branching.push(expected.expect("nonempty set has cells").0);
    }
    Ok(UniformityReport {
        levels,
        outcome: UniformityOutcome::Uniform { branching },
    })
}

/// Extremal cell for one side of the regularity inequality.
#[derive(Clone, Debug, Serialize)]
pub struct RegularityWitness {
    pub r: Scale,
    pub big_r: Scale,
    pub cell: String,
    pub count: u64,
    pub ratio: RootRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    #[serde(with = "crate::radix::serde_rational")]
    pub s: Rational,
    pub grid: Grid,
    pub delta: Scale,
    pub big_delta: Scale,
    /// Least admissible constant over all tested (r, R, Q).
    pub c_min: RootRational,
    pub worst_upper: RegularityWitness,
    pub worst_lower: RegularityWitness,
    pub cases_tested: u64,
}

/// Exhaustive scan of the minimal regularity constant on one grid family.
pub fn regularity_constant(
    set: &DiscreteSet,
    s: Rational,
    delta: Scale,
    big_delta: Scale,
    grid: Grid,
) -> Result<RegularityReport> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let base = set.base();
    if base.cmp_scales(delta, set.resolution()) == std::cmp::Ordering::Less {
        return Err(Error::ScaleTooFine {
            scale: delta.to_string(),
            resolution: set.resolution().to_string(),
        });
    }
    // Grid levels with delta <= value <= Delta, finest first.
    let levels = levels_in_range(set, grid, delta, big_delta);
    if levels.is_empty() {
        return Err(Error::BadLevel {
            level: delta.level,
            max: big_delta.level,
        });
    }
    // Per-level cell index of every point; indices fit i128 at desk scale.
    let idx: Vec<Vec<i128>> = levels
        .iter()
        .map(|&sc| {
            cell_indices(set, sc)
                .map(|i| {
                    i.to_i128().ok_or_else(|| {
                        Error::Overflow("cell index exceeds 128 bits".into())
                    })
                })
                .collect::<Result<Vec<i128>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let sn = *s.numer() as u32;
    let sd = *s.denom() as u32;
    let radix: u64 = match grid {
        Grid::Dyadic => 2,
        Grid::Madic => base.m(),
    };

    let mut cases = 0u64;
    let mut worst_upper: Option<RegularityWitness> = None;
    let mut worst_lower: Option<RegularityWitness> = None;

    for (ci, coarse) in levels.iter().enumerate() {
        for (fi, fine) in levels.iter().enumerate().skip(ci) {
            // (R/r)^s = radix^{(level_f - level_c) * s}, taken via sd-th powers
            let diff = fine.level - coarse.level;
            let pow_rs = BigRational::from_integer(BigInt::from(radix).pow(diff * sn));
            let (mut max_c, mut max_cell) = (0u64, 0i128);
            let (mut min_c, mut min_cell) = (u64::MAX, 0i128);
            let coarse_idx = &idx[ci];
            let fine_idx = &idx[fi];
            let mut i = 0usize;
            while i < coarse_idx.len() {
                let q = coarse_idx[i];
                let mut count = 0u64;
                let mut last: Option<i128> = None;
                while i < coarse_idx.len() && coarse_idx[i] == q {
                    if last != Some(fine_idx[i]) {
                        count += 1;
                        last = Some(fine_idx[i]);
                    }
                    i += 1;
                }
                cases += 1;
                if count > max_c {
                    max_c = count;
                    max_cell = q;
                }
                if count < min_c {
                    min_c = count;
                    min_cell = q;
                }
            }
            // upper side: count / (R/r)^s at the max count
            let up = RootRational::from_pow(
                BigRational::from_integer(BigInt::from(max_c).pow(sd)) / pow_rs.clone(),
                sd,
            );
            if worst_upper.as_ref().map_or(true, |w| up > w.ratio) {
                worst_upper = Some(RegularityWitness {
                    r: *fine,
                    big_r: *coarse,
                    cell: max_cell.to_string(),
                    count: max_c,
                    ratio: up,
                });
            }
            // lower side: (R/r)^s / count at the min count
            let low = RootRational::from_pow(
                pow_rs / BigRational::from_integer(BigInt::from(min_c).pow(sd)),
                sd,
            );
            if worst_lower.as_ref().map_or(true, |w| low > w.ratio) {
                worst_lower = Some(RegularityWitness {
                    r: *fine,
                    big_r: *coarse,
                    cell: min_cell.to_string(),
                    count: min_c,
                    ratio: low,
                });
            }
        }
    }
    let worst_upper = worst_upper.expect("at least one scale pair");
    let worst_lower = worst_lower.expect("at least one scale pair");
    let c_min = worst_upper.ratio.clone().max(worst_lower.ratio.clone());
    Ok(RegularityReport {
        s,
        grid,
        delta,
        big_delta,
        c_min,
        worst_upper,
        worst_lower,
        cases_tested: cases,
    })
}

fn levels_in_range(set: &DiscreteSet, grid: Grid, delta: Scale, big_delta: Scale) -> Vec<Scale> {
    let base = set.base();
    let mut levels = Vec::new();
    let mut level = 0u32;
    loop {
        let sc = Scale { grid, level };
        if base.cmp_scales(sc, delta) == std::cmp::Ordering::Less {
            break;
        }
        if base.cmp_scales(sc, big_delta) != std::cmp::Ordering::Greater {
            levels.push(sc);
        }
        level += 1;
        if level > 10_000 {
            break;
        }
    }
    levels
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub holds: bool,
    /// slack * m^{3s}.
    pub bound: RootRational,
    pub regularity: RegularityReport,
    pub branching: Vec<u64>,
}

/// Uniform branching m^s implies (s, C)-regularity with C <= slack * m^{3s};
/// checks the hypothesis exactly, then the bound on the scanned constant.
pub fn verify_lemma27(set: &DiscreteSet, s: Rational, slack: Rational) -> Result<LemmaReport> {
    let base = set.base();
    let n = set.resolution_level();
    let uni = uniformity_check(set, n)?;
    let branching = match uni.outcome {
        UniformityOutcome::Uniform { branching } => branching,
        UniformityOutcome::NotUniform {
            level,
            cell_a,
            count_a,
            cell_b,
            count_b,
        } => {
            return Err(Error::NotUniform(format!(
                "level {level}: cell {cell_a} has {count_a} children, cell {cell_b} has {count_b}"
            )))
        }
    };
    let ms = exact_rational_power(&num_bigint::BigUint::from(base.m()), s)?;
    for (j, nj) in branching.iter().enumerate() {
        if BigInt::from(*nj) != BigInt::from(ms.clone()) {
            return Err(Error::NotUniform(format!(
                "branching N_{j} = {nj} differs from m^s = {ms}"
            )));
        }
    }
    let report = regularity_constant(set, s, Scale::madic(n), Scale::dyadic(0), Grid::Dyadic)?;
    let sn = *s.numer() as u32;
    let sd = *s.denom() as u32;
    // bound^sd = slack^sd * m^{3*s*sd}
    let slack_big = BigRational::new(BigInt::from(*slack.numer()), BigInt::from(*slack.denom()));
    let bound = RootRational::from_pow(
        pow_big(&slack_big, sd) * BigRational::from_integer(BigInt::from(base.m()).pow(3 * sn)),
        sd,
    );
    let holds = report.c_min <= bound;
    Ok(LemmaReport {
        holds,
        bound,
        regularity: report,
        branching,
    })
}

fn pow_big(r: &BigRational, e: u32) -> BigRational {
    BigRational::new(r.numer().pow(e), r.denom().pow(e))
}
