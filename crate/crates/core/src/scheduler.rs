//! Peak power policy, receiver SNRs and D-TDMA user selection.
//!
//! Each CR transmitter sends at the largest power allowed by both its own
//! peak budget and the interference limit at PR-Rx, `min(cap, Γ/g)`. The PR
//! transmitter's signal adds `Q·e` to the unit receiver noise. D-TDMA then
//! picks the single user with the largest SNR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FadingState, NetworkConfig, NetworkKind, UserGains};

/// Largest transmit power compatible with peak power `cap` and peak
/// interference `limit` over a channel of gain `g` into PR-Rx.
///
/// A zero gain leaves the interference constraint inactive.
#[inline]
pub fn max_transmit_power(cap: f64, limit: f64, g: f64) -> f64 {
    if g > 0.0 {
        cap.min(limit / g)
    } else {
        cap
    }
}

/// Outcome of D-TDMA selection at one fading state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDecision {
    pub selected_user: usize,
    pub realized_snr: f64,
    pub per_user_snr: Vec<f64>,
}

/// Per-user SNR rule of one network, with the configuration's constants
/// pulled out for the hot loop.
#[derive(Debug, Clone)]
pub struct LinkBudget<'a> {
    config: &'a NetworkConfig,
}

impl<'a> LinkBudget<'a> {
    pub fn new(config: &'a NetworkConfig) -> Self {
        Self { config }
    }

    /// Receiver SNR of user `k` given its gains.
    #[inline]
    pub fn snr(&self, k: usize, u: UserGains) -> f64 {
        let c = self.config;
        let cap = c.power_cap(k);
        match c.kind {
            NetworkKind::Reference(_) => u.h * cap,
            NetworkKind::CMac | NetworkKind::CBc | NetworkKind::CPac => {
                u.h * max_transmit_power(cap, c.interference_limit, u.g) / (1.0 + c.pr_power * u.e)
            }
        }
    }
}

/// Maximum achievable receiver SNR of every user.
pub fn per_user_snr(state: &FadingState, config: &NetworkConfig) -> Result<Vec<f64>> {
    state.check_shape(config.kind, config.users)?;
    let budget = LinkBudget::new(config);
    Ok((0..state.users()).map(|k| budget.snr(k, state.user(k))).collect())
}

/// Picks the user with the largest SNR, breaking ties toward the lowest index.
pub fn select_user(snrs: &[f64]) -> Result<ScheduleDecision> {
    let Some(&first) = snrs.first() else {
        return Err(Error::Structure("cannot schedule among zero users".into()));
    };
    let mut best = (0, first);
    for (k, &s) in snrs.iter().enumerate().skip(1) {
        if s > best.1 {
            best = (k, s);
        }
    }
    Ok(ScheduleDecision {
        selected_user: best.0,
        realized_snr: best.1,
        per_user_snr: snrs.to_vec(),
    })
}

/// SNR of the scheduled user, `γ(K)`.
pub fn realized_snr(state: &FadingState, config: &NetworkConfig) -> Result<f64> {
    Ok(select_user(&per_user_snr(state, config)?)?.realized_snr)
}
