//! Parameter derivation.
//!
//! Two modes:
//! * paper mode ([`admissible_delta`]): from (t, tau) derive epsilon, the
//!   exponent K, and the admissible scale delta = 2^{-n^K}; every fractional
//!   power the construction needs is verified to be an exact integer. This
//!   mode is symbolic only — the resulting contraction denominators are far
//!   beyond enumeration.
//! * structural mode ([`structural_config`]): pick (b, q, tau, t, n) directly
//!   for desk-scale runs, with delta := m^{-n}.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::radix::{make_base, RadixBase, Rational, Scale};

/// epsilon := (t - tau)/6.
pub fn derive_epsilon(t: Rational, tau: Rational) -> Result<Rational> {
    check_order(t, tau)?;
    Ok((t - tau) / Rational::from_integer(6))
}

fn check_order(t: Rational, tau: Rational) -> Result<()> {
    if tau <= Rational::zero() || tau >= t || t > Rational::one() {
        return Err(Error::BadOrder {
            tau: tau.to_string(),
            t: t.to_string(),
        });
    }
    Ok(())
}

/// Symbolic parameters for an admissible scale delta = 2^{-n_seed^K}.
#[derive(Clone, Debug, Serialize)]
pub struct PaperParams {
    #[serde(with = "crate::radix::serde_rational")]
    pub t: Rational,
    #[serde(with = "crate::radix::serde_rational")]
    pub tau: Rational,
    #[serde(with = "crate::radix::serde_rational")]
    pub epsilon: Rational,
    /// K = lcm of the denominators of 1/(2 epsilon) and tau/(2 epsilon).
    pub k_exponent: u64,
    pub n_seed: u64,
    /// log2(1/delta) = n_seed^K.
    #[serde(with = "crate::params::biguint_string")]
    pub log2_delta: BigUint,
    /// The five integrality witnesses: L, L^{1/e}, L^{tau/e},
    /// L^{(1+tau)/(2e)}, L^{(1-tau)/(2e)} where L = log2(1/delta).
    #[serde(with = "crate::params::biguint_vec_string")]
    pub integral_powers: Vec<BigUint>,
    /// m = rho^{-1} = L^{1/epsilon}.
    #[serde(with = "crate::params::biguint_string")]
    pub m: BigUint,
    /// e with rho = 2^{-e}, when m is a power of two.
    pub rho_log2: Option<u64>,
    /// Construction depth n = ceil(epsilon * L / floor(log2 L)).
    #[serde(with = "crate::params::biguint_string")]
    pub n_levels: BigUint,
    #[serde(with = "crate::params::biguint_string")]
    pub digits_a: BigUint,
    #[serde(with = "crate::params::biguint_string")]
    pub digits_b: BigUint,
    #[serde(with = "crate::params::biguint_string")]
    pub digits_theta: BigUint,
    /// loglog(1/delta) >= 4.
    pub smallness_loglog: bool,
    /// log(1/delta) <= delta^{-epsilon^2/2}.
    pub smallness_log_vs_delta: bool,
    /// n_levels <= log(1/delta) / loglog(1/delta), checked exactly.
    pub n_property_holds: bool,
}

/// Derives the full symbolic cascade for delta = 2^{-n_seed^K}.
///
/// All logarithms are base 2. When log2(1/delta) is not a power of two, its
/// log is taken as the integer floor; this convention only affects the
/// reported depth `n_levels` and the smallness booleans.
pub fn admissible_delta(t: Rational, tau: Rational, n_seed: u64) -> Result<PaperParams> {
    check_order(t, tau)?;
    if n_seed < 2 {
        return Err(Error::BadOrder {
            tau: "n_seed".into(),
            t: format!("{n_seed} (must be >= 2)"),
        });
    }
    let epsilon = derive_epsilon(t, tau)?;
    let two_eps = epsilon * Rational::from_integer(2);
    let inv = two_eps.recip();
    let tau_over = tau / two_eps;
    let k_exponent = (*inv.denom() as u64).lcm(&(*tau_over.denom() as u64));
    let k32 = u32::try_from(k_exponent)
        .map_err(|_| Error::Overflow(format!("K = {k_exponent} too large")))?;

    let log2_delta = BigUint::from(n_seed).pow(k32);

    // The five quantities that must be integers >= 2.
    let exps = [
        Rational::one(),
        epsilon.recip(),
        tau / epsilon,
        (Rational::one() + tau) / two_eps,
        (Rational::one() - tau) / two_eps,
    ];
    let mut integral_powers = Vec::with_capacity(5);
    for e in exps {
        let v = exact_rational_power(&log2_delta, e)?;
        if v < BigUint::from(2u32) {
            return Err(Error::IntegralityFailure(format!(
                "log2(1/delta)^{e} = {v} < 2"
            )));
        }
        integral_powers.push(v);
    }
    let m = integral_powers[1].clone();
    let digits_theta = integral_powers[2].clone();
    let digits_a = integral_powers[3].clone();
    let digits_b = integral_powers[4].clone();

    let rho_log2 = if m.count_ones() == 1 {
        Some(m.trailing_zeros().unwrap_or(0))
    } else {
        None
    };

    let loglog = floor_log2(&log2_delta);
    // n = ceil(epsilon * L / loglog), as an exact rational ceiling.
    let num = log2_delta.clone() * BigUint::from(*epsilon.numer() as u64);
    let den = BigUint::from(*epsilon.denom() as u64) * BigUint::from(loglog);
    let n_levels = num.div_ceil(&den);

    // n * loglog <= L, exactly.
    let n_property_holds = n_levels.clone() * BigUint::from(loglog) <= log2_delta;

    let smallness_loglog = loglog >= 4;
    let smallness_log_vs_delta = log_smallness(&log2_delta, epsilon);

    Ok(PaperParams {
        t,
        tau,
        epsilon,
        k_exponent,
        n_seed,
        log2_delta,
        integral_powers,
        m,
        rho_log2,
        n_levels,
        digits_a,
        digits_b,
        digits_theta,
        smallness_loglog,
        smallness_log_vs_delta,
        n_property_holds,
    })
}

/// l^e for rational e >= 0; errors unless the result is an exact integer.
pub(crate) fn exact_rational_power(l: &BigUint, e: Rational) -> Result<BigUint> {
    if e.numer().is_negative() {
        return Err(Error::IntegralityFailure(format!("negative exponent {e}")));
    }
    let a = u32::try_from(*e.numer()).map_err(|_| Error::Overflow(format!("exponent {e}")))?;
    let b = u32::try_from(*e.denom()).map_err(|_| Error::Overflow(format!("exponent {e}")))?;
    let raised = l.pow(a);
    let root = raised.nth_root(b);
    if root.pow(b) != raised {
        return Err(Error::IntegralityFailure(format!(
            "{l}^{e} is not an integer"
        )));
    }
    Ok(root)
}

fn floor_log2(v: &BigUint) -> u64 {
    assert!(!v.is_zero());
    v.bits() - 1
}

/// Exact check of L <= 2^{L * eps^2 / 2} without forming the giant power.
fn log_smallness(l: &BigUint, epsilon: Rational) -> bool {
    let en = *epsilon.numer() as u64;
    let ed = *epsilon.denom() as u64;
    // Compare 2*ed^2 * log2(L) with L * en^2 using integer log bounds first.
    let lam = floor_log2(l);
    let lhs_low = BigUint::from(2 * ed * ed) * BigUint::from(lam);
    let lhs_high = BigUint::from(2 * ed * ed) * BigUint::from(lam + 1);
    let rhs = l * BigUint::from(en * en);
    if lhs_high <= rhs {
        return true;
    }
    if l.count_ones() == 1 {
        return lhs_low <= rhs;
    }
    if lhs_low > rhs {
        return false;
    }
    // Narrow band: rhs < lhs_high is small here, so the direct power is cheap.
    let rhs_small = rhs.to_u64().expect("band comparison exponent fits u64") as usize;
    let lhs_exp = u32::try_from(2 * ed * ed).expect("band comparison exponent fits u32");
    l.pow(lhs_exp) <= BigUint::one() << rhs_small
}

/// Desk-scale configuration: sets are built at depth n with delta = m^{-n}.
#[derive(Clone, Debug, Serialize)]
pub struct ToyConfig {
    pub base: RadixBase,
    #[serde(with = "crate::radix::serde_rational")]
    pub tau: Rational,
    #[serde(with = "crate::radix::serde_rational")]
    pub t: Rational,
    pub n: u32,
    /// m^{(1+tau)/2}.
    pub digits_a: u64,
    /// m^{(1-tau)/2}.
    pub digits_b: u64,
    /// m^tau.
    pub digits_theta: u64,
}

impl ToyConfig {
    /// delta = m^{-n}.
    pub fn delta(&self) -> Scale {
        Scale::madic(self.n)
    }

    /// b-exponent of the A spacing m^{-(1+tau)/2}.
    pub fn exp_a(&self) -> u32 {
        self.base
            .exponent_of((Rational::one() + self.tau) / Rational::from_integer(2))
            .expect("validated at construction")
    }

    /// b-exponent of the B spacing m^{-(1-tau)/2}.
    pub fn exp_b(&self) -> u32 {
        self.base
            .exponent_of((Rational::one() - self.tau) / Rational::from_integer(2))
            .expect("validated at construction")
    }

    /// b-exponent of the Theta spacing m^{-tau}.
    pub fn exp_theta(&self) -> u32 {
        self.base
            .exponent_of(self.tau)
            .expect("validated at construction")
    }
}

/// Builds a desk-scale configuration, validating integrality of every digit
/// count and 0 < tau < t <= 1.
pub fn structural_config(b: u32, q: u32, tau: Rational, t: Rational, n: u32) -> Result<ToyConfig> {
    check_order(t, tau)?;
    let base = make_base(b, q, tau)?;
    if n < 1 {
        return Err(Error::BadLevel { level: n, max: 0 });
    }
    let digit_count = |exp: u32| -> Result<u64> {
        BigUint::from(b)
            .pow(exp)
            .to_u64()
            .ok_or_else(|| Error::Overflow(format!("digit count {b}^{exp}")))
    };
    let half = Rational::new(1, 2);
    let digits_a = digit_count(base.exponent_of((Rational::one() + tau) * half)?)?;
    let digits_b = digit_count(base.exponent_of((Rational::one() - tau) * half)?)?;
    let digits_theta = digit_count(base.exponent_of(tau)?)?;
    Ok(ToyConfig {
        base,
        tau,
        t,
        n,
        digits_a,
        digits_b,
        digits_theta,
    })
}

pub(crate) mod biguint_string {
    use num_bigint::BigUint;
    pub fn serialize<S: serde::Serializer>(
        v: &BigUint,
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&v.to_string())
    }
}

pub(crate) mod biguint_vec_string {
    use num_bigint::BigUint;
    use serde::ser::SerializeSeq;
    pub fn serialize<S: serde::Serializer>(
        v: &[BigUint],
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}
