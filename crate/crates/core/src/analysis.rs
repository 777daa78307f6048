//! Closed forms for unit-power Rayleigh fading.
//!
//! With every gain `Exp(1)`:
//!
//! ```text
//! E[min(P, Γ/g)]  = P·(1 − e^{−Γ/P}) + Γ·E₁(Γ/P)
//! E[1/(1 + Q·e)]  = e^{1/Q}·E₁(1/Q) / Q
//! E[max_k h_k]    = H_K
//! ```
//!
//! These give the normalizing constants of the multiuser diversity gain and
//! the factors bounding it from above.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{NetworkConfig, NetworkKind, Topology};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_CUTOFF: f64 = 1.0;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 1000;

/// Exponential integral `E₁(x) = ∫ₓ^∞ e^{−t}/t dt` for `x > 0`.
pub fn exponential_integral_e1(x: f64) -> Result<f64> {
    check_positive("x", x)?;
    if x <= SERIES_CUTOFF {
        Ok(e1_series(x))
    } else {
        Ok((-x).exp() * scaled_e1_continued_fraction(x))
    }
}

/// `e^x·E₁(x)`, finite for arbitrarily large `x`.
pub fn scaled_exponential_integral_e1(x: f64) -> Result<f64> {
    check_positive("x", x)?;
    if x <= SERIES_CUTOFF {
        Ok(x.exp() * e1_series(x))
    } else {
        Ok(scaled_e1_continued_fraction(x))
    }
}

// −γ − ln x − Σ_{k≥1} (−x)^k / (k·k!)
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 1..MAX_ITER {
        fact *= -x / k as f64;
        let term = -fact / k as f64;
        sum += term;
        if term.abs() < EPS * sum.abs().max(1e-300) {
            break;
        }
    }
    sum - EULER_GAMMA - x.ln()
}

// Modified Lentz evaluation of 1/(x+1− 1/(x+3− 4/(x+5− ...))).
fn scaled_e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `E[min(P, Γ/g)]` for `g ~ Exp(1)`: the mean power a transmitter with
/// peak budget `P` can use under interference limit `Γ`.
pub fn expected_capped_power(p: f64, limit: f64) -> Result<f64> {
    check_positive("P", p)?;
    check_positive("interference limit", limit)?;
    let ratio = limit / p;
    Ok(-p * (-ratio).exp_m1() + limit * exponential_integral_e1(ratio)?)
}

/// `E[1/(1 + Q·e)]` for `e ~ Exp(1)`: the mean SNR loss from PR interference.
pub fn expected_interference_attenuation(q: f64) -> Result<f64> {
    check_positive("Q", q)?;
    Ok(scaled_exponential_integral_e1(1.0 / q)? / q)
}

/// `H_K`, the mean of the largest of `K` iid unit exponentials, which is the
/// multiuser diversity gain of the reference network.
pub fn reference_mdg_exact(users: usize) -> Result<f64> {
    if users == 0 {
        return Err(Error::Domain("harmonic number needs K >= 1".into()));
    }
    // smallest terms first
    Ok((1..=users).rev().map(|i| 1.0 / i as f64).sum())
}

/// `log₂(ln K)`, the growth order of throughput with Rayleigh data channels.
pub fn scaling_function(users: usize) -> Result<f64> {
    if users < 3 {
        return Err(Error::Domain(format!("log2(ln K) needs K >= 3, got {users}")));
    }
    Ok((users as f64).ln().log2())
}

/// Analytic constants behind the diversity-gain formulas and their bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub alpha_mac: f64,
    pub alpha_bc: f64,
    pub alpha_pac: f64,
    pub kappa_mac: f64,
    pub kappa_bc: f64,
    pub kappa_pac: f64,
    pub kappa_0: f64,
}

impl BoundConstants {
    /// Upper-bound factor `α` for a network (1 for the reference network).
    pub fn alpha(&self, kind: NetworkKind) -> f64 {
        match kind {
            NetworkKind::CMac => self.alpha_mac,
            NetworkKind::CBc => self.alpha_bc,
            NetworkKind::CPac => self.alpha_pac,
            NetworkKind::Reference(_) => 1.0,
        }
    }

    /// Normalizing constant `κ` turning the mean of the per-network
    /// max-expression into the diversity gain.
    pub fn kappa(&self, kind: NetworkKind) -> f64 {
        match kind {
            NetworkKind::CMac => self.kappa_mac,
            NetworkKind::CBc => self.kappa_bc,
            NetworkKind::CPac => self.kappa_pac,
            NetworkKind::Reference(_) => self.kappa_0,
        }
    }
}

/// Bound and normalizing constants of a symmetric Rayleigh network.
pub fn bound_constants(config: &NetworkConfig) -> Result<BoundConstants> {
    config.validate()?;
    let p = config
        .symmetric_power()
        .ok_or_else(|| Error::Unsupported("bound constants need equal per-user powers".into()))?;
    if !(config.dist_h.is_rayleigh() && config.dist_g.is_rayleigh() && config.dist_e.is_rayleigh()) {
        return Err(Error::Unsupported(
            "closed-form constants are available for unit-power Rayleigh fading only".into(),
        ));
    }
    // The broadcast budget enters only through a factor common to all users,
    // so the C-MAC constants always use P.
    let capped = expected_capped_power(p, config.interference_limit)?;
    let attenuation = expected_interference_attenuation(config.pr_power)?;
    let mean_h = config.dist_h.mean();
    let alpha_mac = p / capped;
    let alpha_bc = 1.0 / attenuation;
    Ok(BoundConstants {
        alpha_mac,
        alpha_bc,
        alpha_pac: alpha_mac * alpha_bc,
        kappa_mac: 1.0 / (mean_h * capped),
        kappa_bc: 1.0 / (mean_h * attenuation),
        kappa_pac: 1.0 / (mean_h * capped * attenuation),
        kappa_0: 1.0 / mean_h,
    })
}

/// Lower and upper diversity-gain bounds `(H_K, α·H_K)` for `config`.
pub fn mdg_bounds(config: &NetworkConfig) -> Result<(f64, f64, f64)> {
    let alpha = bound_constants(config)?.alpha(config.kind);
    let h = reference_mdg_exact(config.users)?;
    Ok((h, alpha * h, alpha))
}

/// The reference network compared against `kind`.
pub fn reference_of(kind: NetworkKind) -> NetworkKind {
    match kind {
        NetworkKind::CMac => NetworkKind::Reference(Topology::Mac),
        NetworkKind::CBc => NetworkKind::Reference(Topology::Bc),
        NetworkKind::CPac => NetworkKind::Reference(Topology::Pac),
        r @ NetworkKind::Reference(_) => r,
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}
