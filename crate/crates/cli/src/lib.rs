//! Experiment driver: parses a config, runs the enabled checks, writes one
//! JSON report per check plus a summary CSV. Report files are byte-stable
//! across reruns of the same config; only summary.csv carries timings.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

use selfsim_core::covering::{
    build_h, cover_report, covering_target, digit_sum_value_count, inclusion_distance,
    union_cover_count, union_sumset,
};
use selfsim_core::exact::RootRational;
use selfsim_core::fractal::{build_a, build_b, build_theta, DigitFractal};
use selfsim_core::measure::{
    ahlfors_constant, build_prop23_measure, equal_weight_ssm, frostman_constant, rescale_nu,
};
use selfsim_core::params::{admissible_delta, structural_config};
use selfsim_core::product::{
    ahlfors1_check, build_k, build_mu, projection_sweep, rescaled_theta, stack_diagnostics,
    verify_rectangle_masses,
};
use selfsim_core::radix::rational_string;
use selfsim_core::regularity::verify_lemma27;
use selfsim_core::{Grid, Rational, Scale, ToyConfig};

pub const CHECK_CATALOGUE: &[&str] = &[
    "params",
    "uniformity",
    "regularity",
    "prop23",
    "frostman-nu",
    "h-inclusion",
    "sumset-bound",
    "product-ahlfors",
    "projection-sweep",
];

/// Checks that produce a depth-indexed constant for `--trend`.
const TREND_CHECKS: &[&str] = &[
    "regularity",
    "prop23",
    "frostman-nu",
    "h-inclusion",
    "sumset-bound",
    "product-ahlfors",
];

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Check {
        check: String,
        source: selfsim_core::Error,
    },
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Check { check, source } => write!(f, "check '{check}' failed: {source}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn default_checks() -> Vec<String> {
    CHECK_CATALOGUE.iter().map(|s| s.to_string()).collect()
}

fn default_slack() -> String {
    "8".into()
}

fn default_size_limit() -> u64 {
    selfsim_core::DEFAULT_SIZE_LIMIT
}

fn default_budget() -> u32 {
    4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// "structural" or "paper".
    pub mode: String,
    pub t: String,
    pub tau: String,
    pub b: Option<u32>,
    pub q: Option<u32>,
    pub n: Option<u32>,
    pub n_seed: Option<u64>,
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    #[serde(default = "default_slack")]
    pub slack: String,
    #[serde(default = "default_size_limit")]
    pub size_limit: u64,
    /// Inclusion budget as a multiple of delta.
    #[serde(default = "default_budget")]
    pub inclusion_budget_deltas: u32,
    pub out_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let parts: Vec<&str> = s.split('/').collect();
    let parse = |p: &str| {
        p.trim()
            .parse::<i64>()
            .map_err(|e| CliError::Config(format!("bad rational '{s}': {e}")))
    };
    match parts.as_slice() {
        [n] => Ok(Rational::from_integer(parse(n)?)),
        [n, d] => {
            let d = parse(d)?;
            if d == 0 {
                return Err(CliError::Config(format!("bad rational '{s}': zero denominator")));
            }
            Ok(Rational::new(parse(n)?, d))
        }
        _ => Err(CliError::Config(format!("bad rational '{s}'"))),
    }
}

#[derive(Debug, Default, Clone)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub trend: Option<u32>,
    pub inclusion_budget: Option<u32>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub pass: bool,
    /// Headline constant as a 12-digit decimal, when the check has one.
    pub constant: Option<String>,
    pub slack: String,
    #[serde(skip)]
    pub runtime_ms: u128,
}

pub struct RunOutcome {
    pub outcomes: Vec<CheckOutcome>,
    pub all_pass: bool,
    pub out_dir: PathBuf,
}

struct Ctx {
    cfg: ToyConfig,
    slack: Rational,
    limit: u64,
    budget_deltas: u32,
    t: Rational,
}

pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    for c in &config.checks {
        if !CHECK_CATALOGUE.contains(&c.as_str()) {
            return Err(CliError::Config(format!("unknown check '{c}'")));
        }
    }
    let enabled: Vec<&str> = CHECK_CATALOGUE
        .iter()
        .copied()
        .filter(|c| config.checks.iter().any(|e| e == c))
        .collect();
    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"));
    std::fs::create_dir_all(&out_dir)?;

    let t = parse_rational(&config.t)?;
    let tau = parse_rational(&config.tau)?;
    let slack = parse_rational(&config.slack)?;

    let paper_mode = match config.mode.as_str() {
        "paper" => true,
        "structural" => false,
        other => return Err(CliError::Config(format!("unknown mode '{other}'"))),
    };
    if paper_mode && enabled.iter().any(|c| *c != "params") {
        return Err(CliError::Config(
            "paper mode supports only the 'params' check".into(),
        ));
    }

    let ctx = if paper_mode {
        None
    } else {
        let (b, q, n) = match (config.b, config.q, config.n) {
            (Some(b), Some(q), Some(n)) => (b, q, n),
            _ => {
                return Err(CliError::Config(
                    "structural mode requires b, q and n".into(),
                ))
            }
        };
        let cfg = structural_config(b, q, tau, t, n).map_err(|e| CliError::Check {
            check: "config".into(),
            source: e,
        })?;
        Some(Ctx {
            cfg,
            slack,
            limit: config.size_limit,
            budget_deltas: opts.inclusion_budget.unwrap_or(config.inclusion_budget_deltas),
            t,
        })
    };

    let mut outcomes = Vec::new();
    for check in &enabled {
        let started = Instant::now();
        let (pass, constant, report) = if paper_mode {
            let n_seed = config
                .n_seed
                .ok_or_else(|| CliError::Config("paper mode requires n_seed".into()))?;
            run_params_paper(t, tau, n_seed).map_err(|e| CliError::Check {
                check: check.to_string(),
                source: e,
            })?
        } else {
            run_structural_check(check, ctx.as_ref().unwrap(), &out_dir).map_err(|e| {
                CliError::Check {
                    check: check.to_string(),
                    source: e,
                }
            })?
        };
        let outcome = CheckOutcome {
            check: check.to_string(),
            pass,
            constant,
            slack: config.slack.clone(),
            runtime_ms: started.elapsed().as_millis(),
        };
        let file = serde_json::json!({
            "check": outcome.check,
            "pass": outcome.pass,
            "constant": outcome.constant,
            "slack": outcome.slack,
            "report": report,
        });
        std::fs::write(
            out_dir.join(format!("{check}.json")),
            serde_json::to_string_pretty(&file).expect("serializable report") + "\n",
        )?;
        outcomes.push(outcome);
    }

    if let (Some(max_n), Some(ctx)) = (opts.trend, ctx.as_ref()) {
        for check in &enabled {
            if TREND_CHECKS.contains(check) {
                let csv = run_trend(check, ctx, max_n).map_err(|e| CliError::Check {
                    check: format!("{check} (trend)"),
                    source: e,
                })?;
                std::fs::write(out_dir.join(format!("trend-{check}.csv")), csv)?;
            }
        }
    }

    let mut summary = String::from("check,pass,constant,slack,runtime_ms\n");
    for o in &outcomes {
        summary.push_str(&format!(
            "{},{},{},{},{}\n",
            o.check,
            o.pass,
            o.constant.as_deref().unwrap_or(""),
            o.slack,
            o.runtime_ms
        ));
    }
    std::fs::write(out_dir.join("summary.csv"), summary)?;

    let all_pass = outcomes.iter().all(|o| o.pass);
    Ok(RunOutcome {
        outcomes,
        all_pass,
        out_dir,
    })
}

type CheckResult = selfsim_core::Result<(bool, Option<String>, serde_json::Value)>;

pub fn run_params_paper(t: Rational, tau: Rational, n_seed: u64) -> CheckResult {
    let params = admissible_delta(t, tau, n_seed)?;
    let report = serde_json::to_value(&params).expect("serializable params");
    Ok((true, None, report))
}

fn run_structural_check(check: &str, ctx: &Ctx, out_dir: &Path) -> CheckResult {
    match check {
        "params" => run_params_structural(ctx),
        "uniformity" => run_uniformity(ctx),
        "regularity" => run_regularity(ctx),
        "prop23" => run_prop23(ctx),
        "frostman-nu" => run_frostman(ctx),
        "h-inclusion" => run_h_inclusion(ctx),
        "sumset-bound" => run_sumset_bound(ctx),
        "product-ahlfors" => run_product_ahlfors(ctx),
        "projection-sweep" => run_projection_sweep(ctx, out_dir),
        other => unreachable!("catalogue filtered: {other}"),
    }
}

fn run_params_structural(ctx: &Ctx) -> CheckResult {
    let cfg = &ctx.cfg;
    let identity = cfg.digits_a == cfg.digits_theta * cfg.digits_b;
    // smallness booleans for delta = m^{-n}, with floor log2 conventions
    let l = BigUint::from(cfg.base.m()).pow(cfg.n);
    let log2 = l.bits() - 1;
    let loglog_ok = if log2 >= 1 {
        (64 - u64::from(log2).leading_zeros() as u64 - 1) >= 4
    } else {
        false
    };
    let eps = (ctx.t - cfg.tau) / Rational::from_integer(6);
    let en = *eps.numer() as u32;
    let ed = *eps.denom() as u32;
    // log(1/delta) <= delta^{-eps^2/2} via integer bounds
    let lhs = BigUint::from(log2).pow(2 * ed * ed);
    let rhs = l.pow(en * en);
    let smallness_log = lhs <= rhs;
    let report = serde_json::json!({
        "config": serde_json::to_value(cfg).expect("serializable config"),
        "delta": format!("m^-{}", cfg.n),
        "digit_identity": identity,
        "smallness_loglog": loglog_ok,
        "smallness_log_vs_delta": smallness_log,
    });
    Ok((identity, None, report))
}

fn run_uniformity(ctx: &Ctx) -> CheckResult {
    let cfg = &ctx.cfg;
    let mut pass = true;
    let mut reports = Vec::new();
    for (name, set, digits) in [
        ("A", build_a(cfg, ctx.limit)?, cfg.digits_a),
        ("B", build_b(cfg, ctx.limit)?, cfg.digits_b),
        ("Theta", build_theta(cfg, ctx.limit)?, cfg.digits_theta),
    ] {
        let rep = selfsim_core::regularity::uniformity_check(&set, cfg.n)?;
        let ok = rep.branching() == Some(&vec![digits; cfg.n as usize][..]);
        pass &= ok;
        reports.push(serde_json::json!({
            "set": name,
            "expected_branching": digits,
            "ok": ok,
            "report": serde_json::to_value(&rep).expect("serializable"),
        }));
    }
    Ok((pass, None, serde_json::Value::Array(reports)))
}

fn run_regularity(ctx: &Ctx) -> CheckResult {
    let cfg = &ctx.cfg;
    let half = Rational::new(1, 2);
    let s_a = (Rational::one() + cfg.tau) * half;
    let s_b = (Rational::one() - cfg.tau) * half;
    let mut pass = true;
    let mut worst: Option<RootRational> = None;
    let mut reports = Vec::new();
    for (name, set, s) in [
        ("A", build_a(cfg, ctx.limit)?, s_a),
        ("B", build_b(cfg, ctx.limit)?, s_b),
        ("Theta", build_theta(cfg, ctx.limit)?, cfg.tau),
    ] {
        let rep = verify_lemma27(&set, s, ctx.slack)?;
        pass &= rep.holds;
        if worst.as_ref().map_or(true, |w| rep.regularity.c_min > *w) {
            worst = Some(rep.regularity.c_min.clone());
        }
        reports.push(serde_json::json!({
            "set": name,
            "report": serde_json::to_value(&rep).expect("serializable"),
        }));
    }
    let constant = worst.map(|w| w.to_decimal(12));
    Ok((pass, constant, serde_json::Value::Array(reports)))
}

fn run_prop23(ctx: &Ctx) -> CheckResult {
    let cfg = &ctx.cfg;
    let s = (Rational::one() + cfg.tau) * Rational::new(1, 2);
    let a = build_a(cfg, ctx.limit)?;
    let creg = selfsim_core::regularity::regularity_constant(
        &a,
        s,
        cfg.delta(),
        Scale::dyadic(0),
        Grid::Dyadic,
    )?;
    let mu = build_prop23_measure(&a, cfg.delta())?;
    let ahl = ahlfors_constant(&mu, s, cfg.delta(), Scale::madic(0))?;
    let slack_rr = RootRational::from_rational(BigRational::new(
        BigInt::from(*ctx.slack.numer()),
        BigInt::from(*ctx.slack.denom()),
    ));
    let bound = slack_rr.mul(&creg.c_min.powi(2));
    let pass = ahl.constant <= bound;
    let report = serde_json::json!({
        "set": "A",
        "regularity": serde_json::to_value(&creg).expect("serializable"),
        "ahlfors": serde_json::to_value(&ahl).expect("serializable"),
        "bound": serde_json::to_value(&bound).expect("serializable"),
    });
    Ok((pass, Some(ahl.constant.to_decimal(12)), report))
}

/// Frostman bound for the rescaled measure: 4 * m^{tau(1-tau)/2}.
fn rescaled_frostman_bound(cfg: &ToyConfig) -> RootRational {
    let e = cfg.tau * (Rational::one() - cfg.tau) / Rational::from_integer(2)
        * Rational::from_integer(cfg.base.q() as i64);
    let en = *e.numer() as u32;
    let ed = *e.denom() as u32;
    let pow = BigRational::from_integer(BigInt::from(cfg.base.b()).pow(en));
    RootRational::from_int(4).mul(&RootRational::from_pow(pow, ed))
}

fn run_frostman(ctx: &Ctx) -> CheckResult {
    let cfg = &ctx.cfg;
    let f = DigitFractal::new(
        cfg.base,
        cfg.exp_theta(),
        (0..cfg.digits_theta).collect(),
        cfg.n,
    )?;
    let nu = equal_weight_ssm(&f, ctx.limit)?;
    let rep = frostman_constant(&nu, cfg.tau, cfg.delta(), Scale::madic(0))?;
    let four = RootRational::from_int(4);
    let mut pass = rep.c_max <= four;

    let resc = rescale_nu(&nu, cfg)?;
    let level = resc.measure.res_exp() / cfg.base.q();
    let resc_rep = frostman_constant(
        &resc.measure,
        cfg.tau,
        Scale::madic(level),
        Scale::madic(0),
    )?;
    let bound = rescaled_frostman_bound(cfg);
    pass &= resc_rep.c_max <= bound;
    pass &= resc.bound_holds;

    let report = serde_json::json!({
        "equal_weight": serde_json::to_value(&rep).expect("serializable"),
        "bound_equal_weight": "4",
        "rescaled": serde_json::to_value(&resc_rep).expect("serializable"),
        "rescaled_bound": serde_json::to_value(&bound).expect("serializable"),
        "kept_mass": rational_string(&resc.kept_mass),
        "kept_mass_lower_bound": rational_string(&resc.mass_lower_bound),
    });
    Ok((pass, Some(rep.c_max.to_decimal(12)), report))
}

fn run_h_inclusion(ctx: &Ctx) -> CheckResult {
    let cfg = &ctx.cfg;
    let a = build_a(cfg, ctx.limit)?;
    let b = build_b(cfg, ctx.limit)?;
    let theta = build_theta(cfg, ctx.limit)?;
    let union = union_sumset(&a, &theta, &b, ctx.limit)?;
    let h = build_h(cfg, ctx.limit)?;
    let delta = selfsim_core::covering::delta_value(cfg);
    let budget = delta.clone() * BigRational::from_integer(ctx.budget_deltas.into());
    let rep = inclusion_distance(&union, &h, &budget)?;
    let ratio = &rep.max_distance / &delta;
    let report = serde_json::json!({
        "budget_deltas": ctx.budget_deltas,
        "max_distance_over_delta": rational_string(&ratio),
        "report": serde_json::to_value(&rep).expect("serializable"),
    });
    let pass = rep.within_budget;
    let constant = RootRational::from_rational(ratio).to_decimal(12);
    Ok((pass, Some(constant), report))
}

fn sumset_bound_row(ctx: &Ctx) -> selfsim_core::Result<(bool, u64, BigUint, RootRational)> {
    let cfg = &ctx.cfg;
    let a = build_a(cfg, ctx.limit)?;
    let b = build_b(cfg, ctx.limit)?;
    let theta = build_theta(cfg, ctx.limit)?;
    let count = union_cover_count(&a, &theta, &b, cfg.delta())?;
    let h_count = digit_sum_value_count(
        cfg.base.m(),
        2 * cfg.n as u64 * cfg.digits_a,
        cfg.n + 1,
    )?;
    let chain_ok = BigUint::from(count) <= h_count.clone() * BigUint::from(9u32);
    let target = covering_target(&cfg.base, cfg.delta(), ctx.t);
    let ratio = RootRational::from_int(count).div(&target);
    Ok((chain_ok, count, h_count, ratio))
}

fn run_sumset_bound(ctx: &Ctx) -> CheckResult {
    let cfg = &ctx.cfg;
    let (chain_ok, count, h_count, ratio) = sumset_bound_row(ctx)?;
    // the paper-style display bound (2n m^{(1+tau)/2})^n, reported alongside
    let display_bound = BigUint::from(2 * cfg.n as u64 * cfg.digits_a).pow(cfg.n);
    let report = serde_json::json!({
        "union_cover_count": count,
        "h_count_exact": h_count.to_string(),
        "h_display_bound": display_bound.to_string(),
        "nine_h": (h_count.clone() * BigUint::from(9u32)).to_string(),
        "chain_ok": chain_ok,
        "target": serde_json::to_value(covering_target(&cfg.base, cfg.delta(), ctx.t))
            .expect("serializable"),
        "ratio_to_target": serde_json::to_value(&ratio).expect("serializable"),
    });
    Ok((chain_ok, Some(ratio.to_decimal(12)), report))
}

fn run_product_ahlfors(ctx: &Ctx) -> CheckResult {
    let cfg = &ctx.cfg;
    let k = build_k(cfg, ctx.limit)?;
    let mu = build_mu(cfg, ctx.limit)?;
    let rects = verify_rectangle_masses(&mu, cfg)?;
    let rect_ok = rects.iter().all(|r| r.all_match);
    let mut stacks = Vec::new();
    let mut stacks_ok = true;
    for j in 1..=cfg.n {
        let rep = stack_diagnostics(&k, cfg, j)?;
        stacks_ok &= rep.horizontal_sep_matches
            && rep.vertical_sep_matches
            && rep.parent_vertical_sep_matches.unwrap_or(true);
        stacks.push(rep);
    }
    let ahl = ahlfors1_check(&mu, cfg, cfg.delta(), Scale::dyadic(0))?;
    let slack_sq = ctx.slack * ctx.slack;
    let bound = RootRational::from_rational(BigRational::new(
        BigInt::from(*slack_sq.numer()),
        BigInt::from(*slack_sq.denom()),
    ));
    let ball_ok = ahl.constant <= bound;
    let pass = rect_ok && stacks_ok && ball_ok;
    let report = serde_json::json!({
        "rectangle_masses": serde_json::to_value(&rects).expect("serializable"),
        "stacks": serde_json::to_value(&stacks).expect("serializable"),
        "ahlfors": serde_json::to_value(&ahl).expect("serializable"),
        "ball_bound": serde_json::to_value(&bound).expect("serializable"),
    });
    Ok((pass, Some(ahl.constant.to_decimal(12)), report))
}

fn run_projection_sweep(ctx: &Ctx, out_dir: &Path) -> CheckResult {
    let cfg = &ctx.cfg;
    let k = build_k(cfg, ctx.limit)?;
    let theta0 = build_theta(cfg, ctx.limit)?;
    let b0 = build_b(cfg, ctx.limit)?;
    let baseline = union_sumset(k.a0(), &theta0, &b0, ctx.limit)?;
    let rescaled = rescaled_theta(cfg, &theta0);
    let sweep = projection_sweep(
        &k,
        &rescaled,
        cfg.delta(),
        ctx.t,
        Some(&baseline),
        ctx.limit,
    )?;

    let mut csv = String::from("theta_num,theta_den_exp,cover_count,target,ratio_decimal,regime_flags\n");
    for (point, entry) in rescaled.points().zip(sweep.per_theta.iter()) {
        let flags = match entry.subset_of_baseline {
            Some(true) => "subset_ok",
            Some(false) => "subset_violated",
            None => "",
        };
        csv.push_str(&format!(
            "{},{},{},delta^-(1+t)/2,{},{}\n",
            point.num(),
            point.exp(),
            entry.report.count,
            entry
                .report
                .ratio
                .as_ref()
                .map(|r| r.to_decimal(12))
                .unwrap_or_default(),
            flags
        ));
    }
    std::fs::write(out_dir.join("projection-sweep.csv"), csv)?;

    let pass = sweep.chain_ok == Some(true);
    let constant = sweep
        .union
        .ratio
        .as_ref()
        .map(|r| r.to_decimal(12));
    let report = serde_json::to_value(&sweep).expect("serializable");
    Ok((pass, constant, report))
}

fn with_depth(ctx: &Ctx, n: u32) -> selfsim_core::Result<Ctx> {
    let cfg = structural_config(ctx.cfg.base.b(), ctx.cfg.base.q(), ctx.cfg.tau, ctx.t, n)?;
    Ok(Ctx {
        cfg,
        slack: ctx.slack,
        limit: ctx.limit,
        budget_deltas: ctx.budget_deltas,
        t: ctx.t,
    })
}

/// Constant-vs-depth rows for one check across n = 1..=max_n.
fn run_trend(check: &str, ctx: &Ctx, max_n: u32) -> selfsim_core::Result<String> {
    let mut csv = String::new();
    match check {
        "sumset-bound" => {
            csv.push_str("n,union_count,h_count,nine_h,chain_ok,ratio_decimal\n");
            for n in 1..=max_n {
                let c = with_depth(ctx, n)?;
                let (chain_ok, count, h_count, ratio) = sumset_bound_row(&c)?;
                csv.push_str(&format!(
                    "{n},{count},{h_count},{},{chain_ok},{}\n",
                    h_count.clone() * BigUint::from(9u32),
                    ratio.to_decimal(12)
                ));
            }
        }
        _ => {
            csv.push_str("n,pass,constant\n");
            for n in 1..=max_n {
                let c = with_depth(ctx, n)?;
                let (pass, constant, _) = match check {
                    "regularity" => run_regularity(&c)?,
                    "prop23" => run_prop23(&c)?,
                    "frostman-nu" => run_frostman(&c)?,
                    "h-inclusion" => run_h_inclusion(&c)?,
                    "product-ahlfors" => run_product_ahlfors(&c)?,
                    other => unreachable!("not a trend check: {other}"),
                };
                csv.push_str(&format!(
                    "{n},{pass},{}\n",
                    constant.unwrap_or_default()
                ));
            }
        }
    }
    Ok(csv)
}
