//! The 2D product construction and its diagnostics.
//!
//! K = A0 x m^{-(1+tau)/2} B0 carries the push-forward of the canonical
//! equal-weights measure on A0 x B0. The covering geometry of K organizes
//! into level-j rectangle families: width m^{-j}, height m^{-j-(1+tau)/2},
//! stacked vertically at separation m^{-j} within a common x-cell ("j-stack")
//! while distinct stacks stay m^{-(j-1)-(1+tau)/2} apart horizontally.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::covering::{
    cover_report, covering_target, is_subset, sumset, union_sumset, CoverReport,
};
use crate::error::{Error, Result};
use crate::exact::RootRational;
use crate::fractal::{build_a, build_b, DiscreteSet};
use crate::measure::{
    flat_point_measure, radius_in_cells, scale_power, DiscreteMeasure, WeightedLine,
};
use crate::params::ToyConfig;
use crate::radix::{rational_string, Grid, Rational, Scale};

/// K = A0 x B with B = m^{-(1+tau)/2} B0; stored as its two factors since
/// every point pair belongs to the set.
#[derive(Clone, Debug)]
pub struct ProductSet {
    a0: DiscreteSet,
    b_scaled: DiscreteSet,
}

impl ProductSet {
    pub fn new(a0: DiscreteSet, b_scaled: DiscreteSet) -> Result<Self> {
        if a0.base() != b_scaled.base() {
            return Err(Error::MismatchedBase);
        }
        Ok(ProductSet { a0, b_scaled })
    }

    pub fn a0(&self) -> &DiscreteSet {
        &self.a0
    }

    pub fn b_scaled(&self) -> &DiscreteSet {
        &self.b_scaled
    }

    pub fn len2d(&self) -> u64 {
        self.a0.len() as u64 * self.b_scaled.len() as u64
    }
}

/// Scales every point of a set by m^{-(1+tau)/2} (an exact exponent shift).
pub fn scale_by_b_exp(set: &DiscreteSet, shift: u32) -> DiscreteSet {
    DiscreteSet::from_nums(
        set.base(),
        set.exp() + shift,
        set.nums().to_vec(),
        set.resolution_level(),
    )
}

pub fn build_k(cfg: &ToyConfig, limit: u64) -> Result<ProductSet> {
    let a0 = build_a(cfg, limit)?;
    let b0 = build_b(cfg, limit)?;
    let b_scaled = scale_by_b_exp(&b0, cfg.exp_a());
    ProductSet::new(a0, b_scaled)
}

/// The product measure mu = mu_x (x) mu_y on delta-cells: equal weight per
/// 2D leaf, i.e. 1/(|A0| |B0|).
#[derive(Clone, Debug)]
pub struct ProductMeasure {
    x: DiscreteMeasure,
    y: DiscreteMeasure,
}

impl ProductMeasure {
    pub fn x(&self) -> &DiscreteMeasure {
        &self.x
    }

    pub fn y(&self) -> &DiscreteMeasure {
        &self.y
    }

    pub fn res_exp(&self) -> u32 {
        self.x.res_exp()
    }

    pub fn support_len(&self) -> u64 {
        self.x.support_len() as u64 * self.y.support_len() as u64
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "product",
            "x": self.x.to_json(),
            "y": self.y.to_json(),
        })
    }
}

pub fn build_mu(cfg: &ToyConfig, limit: u64) -> Result<ProductMeasure> {
    let k = build_k(cfg, limit)?;
    let delta = cfg.delta();
    let x = flat_point_measure(&k.a0, delta)?;
    let y = flat_point_measure(&k.b_scaled, delta)?;
    debug_assert_eq!(x.res_exp(), y.res_exp());
    Ok(ProductMeasure { x, y })
}

/// Per-level outcome of the exact rectangle-mass identity mu(R) = m^{-j}.
#[derive(Clone, Debug, Serialize)]
pub struct RectLevelReport {
    pub level: u32,
    pub rect_count: u64,
    /// m^{-j} as a rational string.
    pub expected_mass: String,
    pub all_match: bool,
}

/// Verifies mu(R) = m^{-j} for every level-j rectangle, j = 0..=n.
pub fn verify_rectangle_masses(
    mu: &ProductMeasure,
    cfg: &ToyConfig,
) -> Result<Vec<RectLevelReport>> {
    let base = cfg.base;
    let n = cfg.n;
    let mut out = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        // x masses grouped on m-adic level-j cells must all be digitsA^{-j}
        let expect_x = BigRational::new(
            BigInt::one(),
            BigInt::from(cfg.digits_a).pow(j),
        );
        let (x_groups, x_ok) = grouped_masses(&mu.x, base.q() * j, &expect_x)?;
        // y cells have side m^{-j} * m^{-(1+tau)/2}
        let expect_y = BigRational::new(
            BigInt::one(),
            BigInt::from(cfg.digits_b).pow(j),
        );
        let (y_groups, y_ok) = grouped_masses(&mu.y, base.q() * j + cfg.exp_a(), &expect_y)?;
        let rect_count = x_groups * y_groups;
        let expected_mass = BigRational::new(
            BigInt::one(),
            BigInt::from(base.b_pow(base.q() * j)),
        );
        let all_match = x_ok && y_ok && rect_count == base.m().pow(j);
        out.push(RectLevelReport {
            level: j,
            rect_count,
            expected_mass: rational_string(&expected_mass),
            all_match,
        });
    }
    Ok(out)
}

/// Groups measure cells by the coarser grid b^{-group_exp}; returns the
/// group count and whether every group mass equals `expect`.
fn grouped_masses(
    mu: &DiscreteMeasure,
    group_exp: u32,
    expect: &BigRational,
) -> Result<(u64, bool)> {
    let base = mu.base();
    if group_exp >= mu.res_exp() {
        // at or below the resolution every cell is its own group
        let factor = BigInt::from(base.b_pow(group_exp - mu.res_exp()));
        let _ = factor; // indices of subcell groups are injective per cell
        let ok = mu.cells().iter().all(|(_, m)| m == expect);
        return Ok((mu.support_len() as u64, ok));
    }
    let factor = base
        .b_pow(mu.res_exp() - group_exp)
        .to_i64()
        .ok_or_else(|| Error::Overflow("group factor".into()))?;
    let mut groups = 0u64;
    let mut ok = true;
    let cells = mu.cells();
    let mut i = 0usize;
    while i < cells.len() {
        let g = cells[i].0.div_euclid(factor);
        let mut mass = BigRational::from_integer(0.into());
        while i < cells.len() && cells[i].0.div_euclid(factor) == g {
            mass += cells[i].1.clone();
            i += 1;
        }
        groups += 1;
        if mass != *expect {
            ok = false;
        }
    }
    Ok((groups, ok))
}

/// Measured rectangle geometry at one level.
#[derive(Clone, Debug, Serialize)]
pub struct StackReport {
    pub level: u32,
    pub rect_width: String,
    pub rect_height: String,
    /// Measured minimal horizontal center separation of distinct stacks.
    pub horizontal_sep: String,
    /// Measured minimal vertical center separation within a stack.
    pub vertical_sep: String,
    pub stacks_count: u64,
    /// horizontal_sep == m^{-(j-1)} * m^{-(1+tau)/2}.
    pub horizontal_sep_matches: bool,
    /// vertical_sep == m^{-j}.
    pub vertical_sep_matches: bool,
    /// Vertical separation of neighbouring level-(j-1) rectangles equals
    /// m^{-(j-1)}; None at j = 1 (the level-0 rectangle has no neighbour).
    pub parent_vertical_sep_matches: Option<bool>,
}

/// Distinct cell indices at an arbitrary b-exponent, ascending.
fn indices_at_bexp(set: &DiscreteSet, e: u32) -> Vec<BigInt> {
    let base = set.base();
    let exp = set.exp();
    let mut out: Vec<BigInt> = Vec::new();
    for num in set.nums() {
        let idx = if exp >= e {
            num / BigInt::from(base.b_pow(exp - e))
        } else {
            num * BigInt::from(base.b_pow(e - exp))
        };
        if out.last() != Some(&idx) {
            out.push(idx);
        }
    }
    out
}

fn min_gap(indices: &[BigInt]) -> Option<BigInt> {
    indices
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .min()
}

pub fn stack_diagnostics(k: &ProductSet, cfg: &ToyConfig, j: u32) -> Result<StackReport> {
    if j < 1 || j > cfg.n {
        return Err(Error::BadLevel {
            level: j,
            max: cfg.n,
        });
    }
    let base = cfg.base;
    let side_exp_x = base.q() * j;
    let side_exp_y = base.q() * j + cfg.exp_a();
    let x_cells = indices_at_bexp(&k.a0, side_exp_x);
    let y_cells = indices_at_bexp(&k.b_scaled, side_exp_y);
    let stacks_count = x_cells.len() as u64;

    let rational_side = |e: u32| BigRational::new(BigInt::one(), BigInt::from(base.b_pow(e)));
    let rect_width = rational_side(side_exp_x);
    let rect_height = rational_side(side_exp_y);

    // measured separations: minimal index gap times the cell side
    let h_gap = min_gap(&x_cells).ok_or(Error::EmptySet)?;
    let horizontal_sep = BigRational::from_integer(h_gap) * rect_width.clone();
    let expected_h = rational_side(base.q() * (j - 1) + cfg.exp_a());
    let v_gap = min_gap(&y_cells);
    let vertical_sep = match &v_gap {
        Some(g) => BigRational::from_integer(g.clone()) * rect_height.clone(),
        None => BigRational::from_integer(0.into()),
    };
    let expected_v = rational_side(base.q() * j);

    let parent_vertical_sep_matches = if j >= 2 {
        let parent_y = indices_at_bexp(&k.b_scaled, base.q() * (j - 1) + cfg.exp_a());
        let parent_gap = min_gap(&parent_y);
        let parent_sep = parent_gap.map(|g| {
            BigRational::from_integer(g) * rational_side(base.q() * (j - 1) + cfg.exp_a())
        });
        Some(parent_sep == Some(rational_side(base.q() * (j - 1))))
    } else {
        None
    };

    Ok(StackReport {
        level: j,
        rect_width: rational_string(&rect_width),
        rect_height: rational_string(&rect_height),
        horizontal_sep: rational_string(&horizontal_sep),
        vertical_sep: rational_string(&vertical_sep),
        stacks_count,
        horizontal_sep_matches: horizontal_sep == expected_h,
        vertical_sep_matches: v_gap.is_some() && vertical_sep == expected_v,
        parent_vertical_sep_matches,
    })
}

/// Which of the two covering regimes a radius falls in at its level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StackRegime {
    /// m^{-j} <= r <= m^{-(j-1)-(1+tau)/2}: the ball stays within few stacks.
    WithinStack,
    /// r above the stack separation: the ball crosses many stacks.
    AcrossStacks,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ball2Witness {
    pub center_x: String,
    pub center_y: String,
    pub scale: Scale,
    pub mass: String,
    pub ratio: RootRational,
    pub regime: StackRegime,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ahlfors2Report {
    pub constant: RootRational,
    pub worst_upper: Ball2Witness,
    pub worst_lower: Ball2Witness,
    /// Worst ratios restricted to each regime.
    pub regime_upper: Vec<(StackRegime, RootRational)>,
    pub regime_lower: Vec<(StackRegime, RootRational)>,
    pub scales_tested: u64,
}

/// Two-sided ball scan of the product measure with s = 1: closed sup-norm
/// balls factorize into per-axis windows, so per scale only the extremal
/// per-axis windows matter.
pub fn ahlfors1_check(
    mu: &ProductMeasure,
    cfg: &ToyConfig,
    r_min: Scale,
    r_max: Scale,
) -> Result<Ahlfors2Report> {
    let base = mu.x.base();
    let lx = WeightedLine::new(&mu.x)?;
    let ly = WeightedLine::new(&mu.y)?;
    let scales = crate::measure::scales_in_range(base, r_min, r_max);
    if scales.is_empty() {
        return Err(Error::BadLevel {
            level: r_min.level,
            max: r_max.level,
        });
    }
    let denom = BigRational::from_integer(BigInt::from(lx.denom as i64))
        * BigRational::from_integer(BigInt::from(ly.denom as i64));
    let one = Rational::new(1, 1);

    let mut worst_upper: Option<Ball2Witness> = None;
    let mut worst_lower: Option<Ball2Witness> = None;
    let mut regime_upper: Vec<(StackRegime, RootRational)> = Vec::new();
    let mut regime_lower: Vec<(StackRegime, RootRational)> = Vec::new();

    for sc in &scales {
        let t = radius_in_cells(base, mu.res_exp(), *sc)?;
        let axis_extremes = |line: &WeightedLine| {
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
            }
            (max_w, max_c, min_w, min_c)
        };
        let (xmax, xmax_c, xmin, xmin_c) = axis_extremes(&lx);
        let (ymax, ymax_c, ymin, ymin_c) = axis_extremes(&ly);
        let regime = classify_regime(cfg, *sc);
        let rs = scale_power(base, *sc, one);

        let up_mass = BigRational::from_integer(BigInt::from(xmax) * BigInt::from(ymax))
            / denom.clone();
        let up = RootRational::from_rational(up_mass.clone()).div(&rs);
        update_regime(&mut regime_upper, regime, &up);
        if worst_upper.as_ref().map_or(true, |w| up > w.ratio) {
            worst_upper = Some(Ball2Witness {
                center_x: center_str(base, mu.res_exp(), xmax_c),
                center_y: center_str(base, mu.res_exp(), ymax_c),
                scale: *sc,
                mass: rational_string(&up_mass),
                ratio: up,
                regime,
            });
        }
        let low_mass = BigRational::from_integer(BigInt::from(xmin) * BigInt::from(ymin))
            / denom.clone();
        let low = rs.div(&RootRational::from_rational(low_mass.clone()));
        update_regime(&mut regime_lower, regime, &low);
        if worst_lower.as_ref().map_or(true, |w| low > w.ratio) {
            worst_lower = Some(Ball2Witness {
                center_x: center_str(base, mu.res_exp(), xmin_c),
                center_y: center_str(base, mu.res_exp(), ymin_c),
                scale: *sc,
                mass: rational_string(&low_mass),
                ratio: low,
                regime,
            });
        }
    }
    let worst_upper = worst_upper.expect("nonempty scales");
    let worst_lower = worst_lower.expect("nonempty scales");
    let constant = worst_upper.ratio.clone().max(worst_lower.ratio.clone());
    Ok(Ahlfors2Report {
        constant,
        worst_upper,
        worst_lower,
        regime_upper,
        regime_lower,
        scales_tested: scales.len() as u64,
    })
}

fn update_regime(bins: &mut Vec<(StackRegime, RootRational)>, regime: StackRegime, r: &RootRational) {
    match bins.iter_mut().find(|(g, _)| *g == regime) {
        Some((_, best)) => {
            if *r > *best {
                *best = r.clone();
            }
        }
        None => bins.push((regime, r.clone())),
    }
}

fn center_str(base: crate::radix::RadixBase, res_exp: u32, i: i64) -> String {
    let side = BigRational::new(BigInt::one(), BigInt::from(base.b_pow(res_exp)));
    let c = (BigRational::from_integer(i.into()) + BigRational::new(1.into(), 2.into())) * side;
    rational_string(&c)
}

/// j >= 1 minimal with m^{-j} <= r, clamped to n; then compare r to the
/// stack separation m^{-(j-1)-(1+tau)/2}.
fn classify_regime(cfg: &ToyConfig, r: Scale) -> StackRegime {
    let base = cfg.base;
    let mut j = 1u32;
    while j < cfg.n {
        if base.cmp_scales(Scale::madic(j), r) != std::cmp::Ordering::Greater {
            break;
        }
        j += 1;
    }
    let boundary_exp = base.q() * (j - 1) + cfg.exp_a();
    // r <= b^{-boundary_exp}?
    let r_inv = match r.grid {
        Grid::Dyadic => BigInt::from(2u32).pow(r.level),
        Grid::Madic => BigInt::from(base.b_pow(base.q() * r.level)),
    };
    if r_inv >= BigInt::from(base.b_pow(boundary_exp)) {
        StackRegime::WithinStack
    } else {
        StackRegime::AcrossStacks
    }
}

/// One direction's covering count in the sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    /// theta as an exact rational string.
    pub theta: String,
    pub report: CoverReport,
    /// pi_theta(K) is contained in the baseline sumset, exactly.
    pub subset_of_baseline: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub per_theta: Vec<SweepEntry>,
    pub union: CoverReport,
    pub baseline: Option<CoverReport>,
    pub union_subset_of_baseline: Option<bool>,
    pub chain_ok: Option<bool>,
}

/// N_delta(pi_theta(K)) for each direction, plus the union count, each with
/// its ratio to delta^{-(1+t)/2}; optionally checked against the unscaled
/// baseline sumset A0 + Theta0 B0.
pub fn projection_sweep(
    k: &ProductSet,
    thetas: &DiscreteSet,
    delta: Scale,
    t: Rational,
    baseline: Option<&DiscreteSet>,
    limit: u64,
) -> Result<SweepReport> {
    let base = k.a0.base();
    let target = covering_target(&base, delta, t);
    let entries: Vec<Result<SweepEntry>> = thetas
        .nums()
        .par_iter()
        .map(|tn| {
            let theta = base.scaled(tn.clone(), thetas.exp());
            let proj = sumset(&k.a0, &theta, &k.b_scaled, limit)?;
            let report = cover_report(&proj, delta, Some(target.clone()))?;
            let subset_of_baseline = baseline.map(|b| is_subset(&proj, b));
            Ok(SweepEntry {
                theta: rational_string(&base.to_rational(&theta)),
                report,
                subset_of_baseline,
            })
        })
        .collect();
    let per_theta = entries.into_iter().collect::<Result<Vec<_>>>()?;

    let union_set = union_sumset(&k.a0, thetas, &k.b_scaled, limit)?;
    let union = cover_report(&union_set, delta, Some(target.clone()))?;
    let baseline_report = baseline
        .map(|b| cover_report(b, delta, Some(target.clone())))
        .transpose()?;
    let union_subset_of_baseline = baseline.map(|b| is_subset(&union_set, b));
    let chain_ok = baseline_report.as_ref().map(|br| {
        per_theta
            .iter()
            .all(|e| e.subset_of_baseline.unwrap_or(false) && e.report.count <= union.count)
            && union_subset_of_baseline.unwrap_or(false)
            && union.count <= br.count
    });
    Ok(SweepReport {
        per_theta,
        union,
        baseline: baseline_report,
        union_subset_of_baseline,
        chain_ok,
    })
}

/// Support of the rescaled direction measure: m^{(1+tau)/2} * Theta0,
/// restricted to [0,1).
pub fn rescaled_theta(cfg: &ToyConfig, theta0: &DiscreteSet) -> DiscreteSet {
    let base = theta0.base();
    let shift = cfg.exp_a();
    let (nums, exp): (Vec<BigInt>, u32) = if theta0.exp() >= shift {
        (theta0.nums().to_vec(), theta0.exp() - shift)
    } else {
        let f = BigInt::from(base.b_pow(shift - theta0.exp()));
        (theta0.nums().iter().map(|n| n * &f).collect(), 0)
    };
    let cutoff = BigInt::from(base.b_pow(exp));
    let kept: Vec<BigInt> = nums.into_iter().filter(|n| *n < cutoff).collect();
    DiscreteSet::from_nums(base, exp, kept, theta0.resolution_level())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::cover_count;
    use crate::fractal::{build_theta, DEFAULT_SIZE_LIMIT};
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

    #[test]
    fn product_set_shapes() {
        let k = build_k(&cfg16(1), DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(k.len2d(), 16);
        assert_eq!(k.b_scaled().to_rationals(), vec![rat(0, 1), rat(1, 16)]);

        let k2 = build_k(&cfg16(2), DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(k2.a0().len(), 64);
        assert_eq!(k2.b_scaled().len(), 4);
        assert_eq!(k2.len2d(), 256);

        // degenerate B0 = {0}
        let cfg = cfg16(1);
        let a0 = build_a(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let zero = DiscreteSet::from_nums(cfg.base, 0, vec![BigInt::from(0)], 1);
        let k0 = ProductSet::new(a0.clone(), zero).unwrap();
        assert_eq!(k0.len2d(), a0.len() as u64);
    }

    #[test]
    fn rectangle_mass_identity() {
        for n in 1..=3u32 {
            let cfg = cfg16(n);
            let mu = build_mu(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
            let levels = verify_rectangle_masses(&mu, &cfg).unwrap();
            assert_eq!(levels.len(), n as usize + 1);
            for rep in &levels {
                assert!(rep.all_match, "n={n} level={}", rep.level);
                assert_eq!(rep.rect_count, 16u64.pow(rep.level));
            }
            assert_eq!(levels[0].expected_mass, "1");
        }
    }

    #[test]
    fn leaf_masses_depth_one() {
        let cfg = cfg16(1);
        let mu = build_mu(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        assert_eq!(mu.support_len(), 16);
        for (_, m) in mu.x().cells() {
            assert_eq!(m, &rat(1, 8));
        }
        for (_, m) in mu.y().cells() {
            assert_eq!(m, &rat(1, 2));
        }
    }

    #[test]
    fn stack_geometry_depth_two() {
        let cfg = cfg16(2);
        let k = build_k(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let rep = stack_diagnostics(&k, &cfg, 1).unwrap();
        assert_eq!(rep.rect_width, "1/16");
        assert_eq!(rep.rect_height, "1/128");
        assert_eq!(rep.horizontal_sep, "1/8");
        assert_eq!(rep.vertical_sep, "1/16");
        assert_eq!(rep.stacks_count, 8);
        assert!(rep.horizontal_sep_matches);
        assert!(rep.vertical_sep_matches);
        assert_eq!(rep.parent_vertical_sep_matches, None);

        let rep2 = stack_diagnostics(&k, &cfg, 2).unwrap();
        assert!(rep2.horizontal_sep_matches);
        assert!(rep2.vertical_sep_matches);
        assert_eq!(rep2.parent_vertical_sep_matches, Some(true));
        assert_eq!(rep2.stacks_count, 64);

        assert!(matches!(
            stack_diagnostics(&k, &cfg, 3),
            Err(Error::BadLevel { .. })
        ));
    }

    #[test]
    fn ahlfors_ball_at_unit_scale() {
        let cfg = cfg16(2);
        let mu = build_mu(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let rep = ahlfors1_check(&mu, &cfg, Scale::dyadic(0), Scale::dyadic(0)).unwrap();
        // r = 1 swallows the whole unit square: both ratios are exactly 1
        assert_eq!(rep.constant, RootRational::from_int(1));
    }

    #[test]
    fn ahlfors_regimes_present() {
        let cfg = cfg16(2);
        let mu = build_mu(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let rep = ahlfors1_check(&mu, &cfg, cfg.delta(), Scale::dyadic(0)).unwrap();
        assert!(rep.constant >= RootRational::from_int(1));
        assert_eq!(rep.regime_upper.len(), 2);
        assert!(rep.scales_tested >= 9);
    }

    #[test]
    fn projection_zero_theta() {
        let cfg = cfg16(2);
        let k = build_k(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let zero = DiscreteSet::from_nums(cfg.base, 0, vec![BigInt::from(0)], 2);
        let rep = projection_sweep(&k, &zero, cfg.delta(), cfg.t, None, DEFAULT_SIZE_LIMIT)
            .unwrap();
        let n_a0 = cover_count(k.a0(), cfg.delta()).unwrap();
        assert_eq!(rep.per_theta[0].report.count, n_a0);
        assert_eq!(rep.union.count, n_a0);
    }

    #[test]
    fn projection_chain_against_baseline() {
        let cfg = cfg16(2);
        let k = build_k(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let theta0 = build_theta(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let b0 = build_b(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let baseline = union_sumset(k.a0(), &theta0, &b0, DEFAULT_SIZE_LIMIT).unwrap();
        let rescaled = rescaled_theta(&cfg, &theta0);
        assert!(rescaled.len() > 0 && rescaled.len() < theta0.len());
        let rep = projection_sweep(
            &k,
            &rescaled,
            cfg.delta(),
            cfg.t,
            Some(&baseline),
            DEFAULT_SIZE_LIMIT,
        )
        .unwrap();
        assert_eq!(rep.chain_ok, Some(true));
        for e in &rep.per_theta {
            assert_eq!(e.subset_of_baseline, Some(true));
        }
    }

    #[test]
    fn rescaled_theta_depth_one() {
        // at n=1 only theta = 0 has first digit 0... the quarter of Theta0
        // below m^{-3/4} survives the restriction to [0,1)
        let cfg = cfg16(1);
        let theta0 = build_theta(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let rescaled = rescaled_theta(&cfg, &theta0);
        assert_eq!(rescaled.len(), 1);
        assert!(rescaled.point(0).is_zero());

        let cfg2 = cfg16(2);
        let theta0 = build_theta(&cfg2, DEFAULT_SIZE_LIMIT).unwrap();
        let rescaled = rescaled_theta(&cfg2, &theta0);
        assert_eq!(rescaled.len(), 4);
    }

    #[test]
    fn degenerate_product_measure() {
        // B0 = {0}: mu collapses onto the x-axis but stays a probability
        let cfg = cfg16(1);
        let a0 = build_a(&cfg, DEFAULT_SIZE_LIMIT).unwrap();
        let zero = DiscreteSet::from_nums(cfg.base, 0, vec![BigInt::from(0)], 1);
        let x = flat_point_measure(&a0, cfg.delta()).unwrap();
        let y = flat_point_measure(&zero, cfg.delta()).unwrap();
        let mu = ProductMeasure { x, y };
        assert_eq!(mu.support_len(), 8);
    }
}
