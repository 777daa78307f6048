//! Monte Carlo estimators: ergodic throughput, multiuser diversity gain and
//! the asymptotic throughput ratio.
//!
//! All estimators evaluate sample `i` from the substreams keyed on `i`, so a
//! curve over several `K` reuses the same users: the value at `K` is the max
//! over the first `K` users of the draws used for every larger `K`. Ratios
//! are normalized by user 0 of the same draws.
//!
//! Samples are grouped into fixed blocks whose moments are merged in block
//! order, so results are bit-identical for any rayon pool size.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{bound_constants, scaling_function};
use crate::error::{Error, Result};
use crate::model::{ChannelStream, NetworkConfig, NetworkKind, UserGains};
use crate::rng::{RngSpec, StreamRole};
use crate::scheduler::{max_transmit_power, LinkBudget};

/// Reference networks with at least this many users sample the maximum data
/// gain directly from its order-statistic law instead of drawing every user.
pub const FAST_PATH_MIN_USERS: usize = 1024;

const BLOCK: u64 = 256;

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

impl Estimate {
    /// Sample mean and `s/√n` of a slice.
    pub fn from_samples(xs: &[f64]) -> Self {
        let mut m = Moments::default();
        for &x in xs {
            m.push(x, x);
        }
        m.estimate_x()
    }

    /// `c·X` for a known constant `c`.
    pub fn scaled(self, c: f64) -> Self {
        Self {
            mean: self.mean * c,
            std_error: self.std_error * c.abs(),
            n_samples: self.n_samples,
        }
    }

    /// `√(se₁² + se₂²)`, the standard error of a difference of independent
    /// estimates.
    pub fn combined_std_error(&self, other: &Estimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

/// Running co-moments of paired samples, merged with Chan's update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
}

impl Moments {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        let n = self.n as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        self.m2_x += dx * (x - self.mean_x);
        self.m2_y += dy * (y - self.mean_y);
        self.c_xy += dx * (y - self.mean_y);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n as f64, o.n as f64);
        let n = na + nb;
        let dx = o.mean_x - self.mean_x;
        let dy = o.mean_y - self.mean_y;
        self.mean_x += dx * nb / n;
        self.mean_y += dy * nb / n;
        self.m2_x += o.m2_x + dx * dx * na * nb / n;
        self.m2_y += o.m2_y + dy * dy * na * nb / n;
        self.c_xy += o.c_xy + dx * dy * na * nb / n;
        self.n += o.n;
    }

    fn variances(&self) -> (f64, f64, f64) {
        let d = (self.n - 1) as f64;
        (self.m2_x / d, self.m2_y / d, self.c_xy / d)
    }

    fn estimate_x(&self) -> Estimate {
        let (vx, _, _) = self.variances();
        Estimate {
            mean: self.mean_x,
            std_error: (vx / self.n as f64).sqrt(),
            n_samples: self.n,
        }
    }

    /// `E[X]/E[Y]` with a first-order (delta method) standard error.
    fn estimate_ratio(&self) -> Estimate {
        let r = self.mean_x / self.mean_y;
        let (vx, vy, cxy) = self.variances();
        let var = (vx - 2.0 * r * cxy + r * r * vy) / (self.mean_y * self.mean_y * self.n as f64);
        Estimate {
            mean: r,
            std_error: var.max(0.0).sqrt(),
            n_samples: self.n,
        }
    }
}

/// What a curve point measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `C(K) = E[log₂(1 + γ(K))]`, bits per channel use.
    Throughput,
    /// `C(K)/C(1)`.
    NormalizedThroughput,
    /// `E[γ(K)]/E[γ(1)]`.
    MdgRatio,
    /// `κ·E[max_k term_k]`.
    MdgKappa,
    /// `C(K)/log₂(ln K)`.
    AsymptoticRatio,
}

impl Quantity {
    pub fn label(&self) -> &'static str {
        match self {
            Quantity::Throughput => "throughput",
            Quantity::NormalizedThroughput => "normalized_throughput",
            Quantity::MdgRatio => "mdg_ratio",
            Quantity::MdgKappa => "mdg_kappa",
            Quantity::AsymptoticRatio => "asymptotic_ratio",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q = match s.trim().replace('-', "_").as_str() {
            "throughput" => Quantity::Throughput,
            "normalized_throughput" => Quantity::NormalizedThroughput,
            "mdg_ratio" => Quantity::MdgRatio,
            "mdg_kappa" => Quantity::MdgKappa,
            "asymptotic_ratio" => Quantity::AsymptoticRatio,
            other => return Err(Error::Config(format!("unknown quantity '{other}'"))),
        };
        Ok(q)
    }
}

/// One `(K, estimate)` row of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub network: NetworkKind,
    pub users: usize,
    pub quantity: Quantity,
    pub value: Estimate,
}

/// The per-user expression maximized inside the `κ` form of the diversity gain.
///
/// Factors shared by all users (the C-MAC interference term, the C-BC power)
/// cancel in the gain and are left out.
#[inline]
pub fn diversity_term(config: &NetworkConfig, user: usize, u: UserGains) -> f64 {
    let capped = || max_transmit_power(config.power_cap(user), config.interference_limit, u.g);
    match config.kind {
        NetworkKind::CMac => u.h * capped(),
        NetworkKind::CBc => u.h / (1.0 + config.pr_power * u.e),
        NetworkKind::CPac => u.h * capped() / (1.0 + config.pr_power * u.e),
        NetworkKind::Reference(_) => u.h,
    }
}

/// Draws the largest of `users` iid unit exponentials by inverting the CDF
/// of the maximum, `(1 − e^{−x})^K = U`.
pub fn sample_max_exponential(users: usize, rng: &RngSpec, sample_index: u64) -> f64 {
    let u: f64 = rng.substream(sample_index, StreamRole::OrderStatistic).sample(Open01);
    -(-(u.ln() / users as f64).exp_m1()).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Statistic {
    Snr,
    LogSnr,
    Term,
}

impl Statistic {
    #[inline]
    fn transform(self, v: f64) -> f64 {
        match self {
            Statistic::LogSnr => v.ln_1p() / LN_2,
            Statistic::Snr | Statistic::Term => v,
        }
    }
}

fn uses_fast_path(config: &NetworkConfig, users: usize) -> bool {
    config.kind.is_reference() && config.dist_h.is_rayleigh() && config.is_symmetric() && users >= FAST_PATH_MIN_USERS
}

fn check_samples(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 samples, got {n}")));
    }
    Ok(())
}

fn check_users(users: &[usize]) -> Result<()> {
    if users.is_empty() {
        return Err(Error::Config("user-count list is empty".into()));
    }
    if users[0] == 0 {
        return Err(Error::Config("user counts must be at least 1".into()));
    }
    if users.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("user counts must be strictly ascending".into()));
    }
    Ok(())
}

/// Paired moments `(stat(max over first K users), stat(user 0))` for every
/// `K` in `users`, from one pass over each sample.
fn moments_by_users(config: &NetworkConfig, users: &[usize], n: u64, rng: &RngSpec, stat: Statistic) -> Vec<Moments> {
    let budget = LinkBudget::new(config);
    let value = |k: usize, u: UserGains| match stat {
        Statistic::Snr | Statistic::LogSnr => budget.snr(k, u),
        Statistic::Term => diversity_term(config, k, u),
    };
    let fast_scale = match stat {
        Statistic::Term => 1.0,
        _ => config.power_cap(0),
    };

    let sample = |i: u64, out: &mut [(f64, f64)]| {
        let mut stream = ChannelStream::new(config, rng, i);
        let first = value(0, stream.next_user());
        let y = stat.transform(first);
        let mut best = first;
        let mut next = 1;
        for (col, &k) in users.iter().enumerate() {
            if uses_fast_path(config, k) {
                continue;
            }
            while next < k {
                let v = value(next, stream.next_user());
                if v > best {
                    best = v;
                }
                next += 1;
            }
            out[col] = (stat.transform(best), y);
        }
        for (col, &k) in users.iter().enumerate() {
            if uses_fast_path(config, k) {
                let max = sample_max_exponential(k, rng, i);
                out[col] = (stat.transform(fast_scale * max), y);
            }
        }
    };

    let blocks = n.div_ceil(BLOCK);
    let width = users.len();
    let partial: Vec<Vec<Moments>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![Moments::default(); width];
            let mut buf = vec![(0.0, 0.0); width];
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                sample(i, &mut buf);
                for (m, &(x, y)) in acc.iter_mut().zip(&buf) {
                    m.push(x, y);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Moments::default(); width];
    for block in &partial {
        for (t, m) in total.iter_mut().zip(block) {
            t.merge(m);
        }
    }
    total
}

/// Estimates `quantity` for one network at each user count in `users`
/// (strictly ascending). `template` supplies powers and fading laws; its
/// kind and user count are replaced.
pub fn curve(
    template: &NetworkConfig,
    kind: NetworkKind,
    users: &[usize],
    quantity: Quantity,
    n: u64,
    rng: &RngSpec,
) -> Result<Vec<CurvePoint>> {
    check_samples(n)?;
    check_users(users)?;
    let config = template
        .clone()
        .with_kind(kind)
        .with_users(*users.last().expect("checked nonempty"));
    config.validate()?;

    let needs_symmetry = matches!(quantity, Quantity::MdgRatio | Quantity::MdgKappa);
    if needs_symmetry && !config.is_symmetric() {
        return Err(Error::Unsupported(
            "the diversity gain is defined for equal per-user powers only".into(),
        ));
    }
    if quantity == Quantity::AsymptoticRatio {
        if let Some(&k) = users.iter().find(|&&k| k < 3) {
            return Err(Error::Domain(format!("asymptotic ratio needs K >= 3, got {k}")));
        }
        if !config.dist_h.is_rayleigh() {
            return Err(Error::Unsupported(
                "the log2(ln K) growth order holds for Rayleigh data channels".into(),
            ));
        }
    }
    let kappa = match quantity {
        Quantity::MdgKappa => Some(bound_constants(&config)?.kappa(kind)),
        _ => None,
    };

    let stat = match quantity {
        Quantity::Throughput | Quantity::NormalizedThroughput | Quantity::AsymptoticRatio => Statistic::LogSnr,
        Quantity::MdgRatio => Statistic::Snr,
        Quantity::MdgKappa => Statistic::Term,
    };
    let moments = moments_by_users(&config, users, n, rng, stat);
    users
        .iter()
        .zip(&moments)
        .map(|(&k, m)| {
            let value = match quantity {
                Quantity::Throughput => m.estimate_x(),
                Quantity::NormalizedThroughput | Quantity::MdgRatio => m.estimate_ratio(),
                Quantity::MdgKappa => m.estimate_x().scaled(kappa.expect("set for kappa")),
                Quantity::AsymptoticRatio => m.estimate_x().scaled(1.0 / scaling_function(k)?),
            };
            Ok(CurvePoint {
                network: kind,
                users: k,
                quantity,
                value,
            })
        })
        .collect()
}

fn single(config: &NetworkConfig, quantity: Quantity, n: u64, rng: &RngSpec) -> Result<Estimate> {
    if quantity == Quantity::AsymptoticRatio && config.users < 3 {
        return Err(Error::Domain(format!(
            "asymptotic ratio needs K >= 3, got {}",
            config.users
        )));
    }
    config.validate()?;
    Ok(curve(config, config.kind, &[config.users], quantity, n, rng)?[0].value)
}

/// Ergodic throughput `C(K) = E[log₂(1 + γ(K))]` in bits per channel use.
pub fn estimate_ergodic_throughput(config: &NetworkConfig, n: u64, rng: &RngSpec) -> Result<Estimate> {
    single(config, Quantity::Throughput, n, rng)
}

/// Multiuser diversity gain `E[γ(K)]/E[γ(1)]`, with `γ(1)` taken as user 0's
/// SNR in the same draws.
pub fn estimate_mdg_ratio(config: &NetworkConfig, n: u64, rng: &RngSpec) -> Result<Estimate> {
    single(config, Quantity::MdgRatio, n, rng)
}

/// Multiuser diversity gain through its `κ` form: the analytic `κ` times the
/// sampled mean of the per-network max-expression.
pub fn estimate_mdg_kappa(config: &NetworkConfig, n: u64, rng: &RngSpec) -> Result<Estimate> {
    single(config, Quantity::MdgKappa, n, rng)
}

/// `C(K)/log₂(ln K)`, which tends to 1 as `K` grows.
pub fn asymptotic_ratio(config: &NetworkConfig, n: u64, rng: &RngSpec) -> Result<Estimate> {
    single(config, Quantity::AsymptoticRatio, n, rng)
}

/// `C(K)/C(1)` for each network and user count.
pub fn normalized_throughput_curve(
    template: &NetworkConfig,
    networks: &[NetworkKind],
    users: &[usize],
    n: u64,
    rng: &RngSpec,
) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::with_capacity(networks.len() * users.len());
    for &kind in networks {
        out.extend(curve(template, kind, users, Quantity::NormalizedThroughput, n, rng)?);
    }
    Ok(out)
}
