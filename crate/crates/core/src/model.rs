//! Network configurations and block-fading channel states.
//!
//! A CR network of `K` users shares spectrum with one PR link (PR-Tx to
//! PR-Rx). Only channel power gains matter:
//!
//! | network | `h`            | `g`                  | `e`                   |
//! |---------|----------------|----------------------|-----------------------|
//! | C-MAC   | CR_k to CR-BS  | CR_k to PR-Rx (K)    | PR-Tx to CR-BS (1)    |
//! | C-BC    | CR-BS to CR_k  | CR-BS to PR-Rx (1)   | PR-Tx to CR_k (K)     |
//! | C-PAC   | CR-Tx_k to CR-Rx_k | CR-Tx_k to PR-Rx (K) | PR-Tx to CR-Rx_k (K) |
//!
//! The reference network drops the PR link and keeps only `h`.
//!
//! Channel draws are prefix-consistent: user `k` of sample `i` gets the same
//! gains whether the network has `k + 1` users or a million, which is what
//! makes nested multi-`K` curves and common random numbers work.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{RngSpec, StreamRole, Substream};

/// Law of a channel power gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FadingDistribution {
    /// Rayleigh amplitude with unit mean power: the gain is Exp(1).
    RayleighUnitPower,
    /// A point mass. Used for degenerate and diagnostic runs.
    Constant(f64),
}

impl FadingDistribution {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingDistribution::RayleighUnitPower => rng.sample(Exp1),
            FadingDistribution::Constant(v) => v,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            FadingDistribution::RayleighUnitPower => 1.0,
            FadingDistribution::Constant(v) => v,
        }
    }

    pub fn is_rayleigh(&self) -> bool {
        matches!(self, FadingDistribution::RayleighUnitPower)
    }

    fn validate(&self, name: &str) -> Result<()> {
        match *self {
            FadingDistribution::RayleighUnitPower => Ok(()),
            FadingDistribution::Constant(v) if v.is_finite() && v >= 0.0 => Ok(()),
            FadingDistribution::Constant(v) => Err(Error::Config(format!(
                "constant gain for {name} must be finite and nonnegative, got {v}"
            ))),
        }
    }
}

/// Link topology of a CR network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    Mac,
    Bc,
    Pac,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum NetworkKind {
    CMac,
    CBc,
    CPac,
    /// The network with the PR link removed. The mirrored topology selects
    /// the power budget: `J` for broadcast, `P_k` otherwise.
    Reference(Topology),
}

impl NetworkKind {
    /// The four networks compared throughout: three CR networks and the reference.
    pub const ALL: [NetworkKind; 4] = [
        NetworkKind::CMac,
        NetworkKind::CBc,
        NetworkKind::CPac,
        NetworkKind::Reference(Topology::Pac),
    ];

    pub fn topology(&self) -> Topology {
        match *self {
            NetworkKind::CMac => Topology::Mac,
            NetworkKind::CBc => Topology::Bc,
            NetworkKind::CPac => Topology::Pac,
            NetworkKind::Reference(t) => t,
        }
    }

    pub fn is_reference(&self) -> bool {
        matches!(self, NetworkKind::Reference(_))
    }

    /// Short name, also accepted by [`FromStr`].
    pub fn label(&self) -> &'static str {
        match self {
            NetworkKind::CMac => "mac",
            NetworkKind::CBc => "bc",
            NetworkKind::CPac => "pac",
            NetworkKind::Reference(Topology::Pac) => "ref",
            NetworkKind::Reference(Topology::Mac) => "ref-mac",
            NetworkKind::Reference(Topology::Bc) => "ref-bc",
        }
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NetworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mac" | "c-mac" => Ok(NetworkKind::CMac),
            "bc" | "c-bc" => Ok(NetworkKind::CBc),
            "pac" | "c-pac" => Ok(NetworkKind::CPac),
            "ref" | "ref-pac" | "reference" => Ok(NetworkKind::Reference(Topology::Pac)),
            "ref-mac" => Ok(NetworkKind::Reference(Topology::Mac)),
            "ref-bc" => Ok(NetworkKind::Reference(Topology::Bc)),
            other => Err(Error::Config(format!(
                "unknown network '{other}' (expected mac, bc, pac, ref, ref-mac or ref-bc)"
            ))),
        }
    }
}

impl From<NetworkKind> for String {
    fn from(kind: NetworkKind) -> String {
        kind.label().to_string()
    }
}

impl TryFrom<String> for NetworkKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Peak transmit powers `P_k` of the CR transmitters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PowerProfile {
    Symmetric(f64),
    PerUser(Vec<f64>),
}

impl PowerProfile {
    pub fn get(&self, user: usize) -> f64 {
        match self {
            PowerProfile::Symmetric(p) => *p,
            PowerProfile::PerUser(ps) => ps[user],
        }
    }
}

/// Everything that determines the law of one fading state and its SNRs.
///
/// Powers are linear and normalized to the unit receiver noise power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub kind: NetworkKind,
    pub users: usize,
    pub per_user_power: PowerProfile,
    /// `J`, the CR-BS peak power in the C-BC.
    pub bs_power: f64,
    /// `Q`, the constant PR-Tx power.
    pub pr_power: f64,
    /// `Γ`, the peak interference power allowed at PR-Rx.
    pub interference_limit: f64,
    pub dist_h: FadingDistribution,
    pub dist_g: FadingDistribution,
    pub dist_e: FadingDistribution,
    /// Also draw the PR link gain `f`. No metric uses it.
    pub sample_primary_link: bool,
}

impl NetworkConfig {
    /// Symmetric network with `J = Q = P = Γ = 1` and unit-power Rayleigh fading.
    pub fn new(kind: NetworkKind, users: usize) -> Self {
        Self {
            kind,
            users,
            per_user_power: PowerProfile::Symmetric(1.0),
            bs_power: 1.0,
            pr_power: 1.0,
            interference_limit: 1.0,
            dist_h: FadingDistribution::RayleighUnitPower,
            dist_g: FadingDistribution::RayleighUnitPower,
            dist_e: FadingDistribution::RayleighUnitPower,
            sample_primary_link: false,
        }
    }

    pub fn with_kind(mut self, kind: NetworkKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_users(mut self, users: usize) -> Self {
        self.users = users;
        self
    }

    pub fn with_power(mut self, p: f64) -> Self {
        self.per_user_power = PowerProfile::Symmetric(p);
        self
    }

    pub fn with_per_user_power(mut self, powers: Vec<f64>) -> Self {
        self.per_user_power = PowerProfile::PerUser(powers);
        self
    }

    pub fn with_bs_power(mut self, j: f64) -> Self {
        self.bs_power = j;
        self
    }

    pub fn with_pr_power(mut self, q: f64) -> Self {
        self.pr_power = q;
        self
    }

    pub fn with_interference_limit(mut self, gamma: f64) -> Self {
        self.interference_limit = gamma;
        self
    }

    pub fn with_fading(mut self, h: FadingDistribution, g: FadingDistribution, e: FadingDistribution) -> Self {
        self.dist_h = h;
        self.dist_g = g;
        self.dist_e = e;
        self
    }

    pub fn with_primary_link(mut self, on: bool) -> Self {
        self.sample_primary_link = on;
        self
    }

    /// Peak power of user `k`'s transmitter (for the C-BC and its reference, `J`).
    pub fn power_cap(&self, user: usize) -> f64 {
        match self.kind.topology() {
            Topology::Bc => self.bs_power,
            Topology::Mac | Topology::Pac => self.per_user_power.get(user),
        }
    }

    /// True iff all `P_k` are equal.
    pub fn is_symmetric(&self) -> bool {
        match &self.per_user_power {
            PowerProfile::Symmetric(_) => true,
            PowerProfile::PerUser(ps) => ps.windows(2).all(|w| w[0] == w[1]),
        }
    }

    /// The common `P` of a symmetric configuration.
    pub fn symmetric_power(&self) -> Option<f64> {
        match &self.per_user_power {
            PowerProfile::Symmetric(p) => Some(*p),
            PowerProfile::PerUser(ps) if self.is_symmetric() => ps.first().copied(),
            PowerProfile::PerUser(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.users == 0 {
            return Err(Error::Config("network needs at least one user".into()));
        }
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match &self.per_user_power {
            PowerProfile::Symmetric(p) => positive("P", *p)?,
            PowerProfile::PerUser(ps) => {
                if ps.len() != self.users {
                    return Err(Error::Config(format!(
                        "{} per-user powers given for {} users",
                        ps.len(),
                        self.users
                    )));
                }
                for (k, p) in ps.iter().enumerate() {
                    positive(&format!("P_{k}"), *p)?;
                }
            }
        }
        positive("J", self.bs_power)?;
        positive("Q", self.pr_power)?;
        positive("interference limit", self.interference_limit)?;
        self.dist_h.validate("h")?;
        self.dist_g.validate("g")?;
        self.dist_e.validate("e")?;
        Ok(())
    }
}

/// One group of gains in a fading state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Channel {
    Absent,
    Shared(f64),
    PerUser(Vec<f64>),
}

impl Channel {
    fn for_user(&self, user: usize) -> f64 {
        match self {
            Channel::Absent => 0.0,
            Channel::Shared(v) => *v,
            Channel::PerUser(vs) => vs[user],
        }
    }
}

/// How a network's `g` and `e` gains are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelShape {
    Absent,
    Shared,
    PerUser,
}

/// Shapes of `(g, e)` for a network kind.
pub fn channel_shapes(kind: NetworkKind) -> (ChannelShape, ChannelShape) {
    use ChannelShape::*;
    match kind {
        NetworkKind::CMac => (PerUser, Shared),
        NetworkKind::CBc => (Shared, PerUser),
        NetworkKind::CPac => (PerUser, PerUser),
        NetworkKind::Reference(_) => (Absent, Absent),
    }
}

/// One block-fading realization of every channel gain in the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingState {
    pub h: Vec<f64>,
    pub g: Channel,
    pub e: Channel,
    pub f: Option<f64>,
}

impl FadingState {
    pub fn users(&self) -> usize {
        self.h.len()
    }

    /// Gains seen by user `k`, with shared channels broadcast.
    pub fn user(&self, k: usize) -> UserGains {
        UserGains {
            h: self.h[k],
            g: self.g.for_user(k),
            e: self.e.for_user(k),
        }
    }

    /// Checks the state has the layout `kind` requires for `users` users.
    pub fn check_shape(&self, kind: NetworkKind, users: usize) -> Result<()> {
        if self.h.len() != users {
            return Err(Error::Structure(format!(
                "state has {} data channels, network has {users} users",
                self.h.len()
            )));
        }
        let (g_shape, e_shape) = channel_shapes(kind);
        let matches = |c: &Channel, shape: ChannelShape| match (c, shape) {
            (Channel::Absent, ChannelShape::Absent) => true,
            (Channel::Shared(_), ChannelShape::Shared) => true,
            (Channel::PerUser(v), ChannelShape::PerUser) => v.len() == users,
            _ => false,
        };
        if !matches(&self.g, g_shape) {
            return Err(Error::Structure(format!("g has the wrong shape for {kind}")));
        }
        if !matches(&self.e, e_shape) {
            return Err(Error::Structure(format!("e has the wrong shape for {kind}")));
        }
        Ok(())
    }
}

/// The gains relevant to one user; shared gains repeat across users and
/// absent ones read as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserGains {
    pub h: f64,
    pub g: f64,
    pub e: f64,
}

/// Lazily draws users' gains one at a time, in index order, without
/// materializing the whole state. Yields exactly the gains [`sample_state`]
/// would store.
pub struct ChannelStream {
    h: Substream,
    g: Option<Substream>,
    e: Option<Substream>,
    shared_g: f64,
    shared_e: f64,
    dist_h: FadingDistribution,
    dist_g: FadingDistribution,
    dist_e: FadingDistribution,
}

impl ChannelStream {
    pub fn new(config: &NetworkConfig, rng: &RngSpec, sample_index: u64) -> Self {
        let (g_shape, e_shape) = channel_shapes(config.kind);
        let mut g = rng.substream(sample_index, StreamRole::ToPrimaryReceiver);
        let mut e = rng.substream(sample_index, StreamRole::FromPrimaryTransmitter);
        let shared_g = match g_shape {
            ChannelShape::Shared => config.dist_g.sample(&mut g),
            _ => 0.0,
        };
        let shared_e = match e_shape {
            ChannelShape::Shared => config.dist_e.sample(&mut e),
            _ => 0.0,
        };
        Self {
            h: rng.substream(sample_index, StreamRole::Data),
            g: (g_shape == ChannelShape::PerUser).then_some(g),
            e: (e_shape == ChannelShape::PerUser).then_some(e),
            shared_g,
            shared_e,
            dist_h: config.dist_h,
            dist_g: config.dist_g,
            dist_e: config.dist_e,
        }
    }

    pub fn shared_g(&self) -> f64 {
        self.shared_g
    }

    pub fn shared_e(&self) -> f64 {
        self.shared_e
    }

    /// Gains of the next user.
    #[inline]
    pub fn next_user(&mut self) -> UserGains {
        let h = self.dist_h.sample(&mut self.h);
        let g = match self.g.as_mut() {
            Some(rng) => self.dist_g.sample(rng),
            None => self.shared_g,
        };
        let e = match self.e.as_mut() {
            Some(rng) => self.dist_e.sample(rng),
            None => self.shared_e,
        };
        UserGains { h, g, e }
    }
}

/// Draws the fading state of sample `sample_index`.
pub fn sample_state(config: &NetworkConfig, rng: &RngSpec, sample_index: u64) -> Result<FadingState> {
    config.validate()?;
    let (g_shape, e_shape) = channel_shapes(config.kind);
    let mut stream = ChannelStream::new(config, rng, sample_index);
    let k = config.users;
    let mut h = Vec::with_capacity(k);
    let mut g = Vec::with_capacity(if g_shape == ChannelShape::PerUser { k } else { 0 });
    let mut e = Vec::with_capacity(if e_shape == ChannelShape::PerUser { k } else { 0 });
    for _ in 0..k {
        let u = stream.next_user();
        h.push(u.h);
        if g_shape == ChannelShape::PerUser {
            g.push(u.g);
        }
        if e_shape == ChannelShape::PerUser {
            e.push(u.e);
        }
    }
    let assemble = |shape: ChannelShape, shared: f64, per_user: Vec<f64>| match shape {
        ChannelShape::Absent => Channel::Absent,
        ChannelShape::Shared => Channel::Shared(shared),
        ChannelShape::PerUser => Channel::PerUser(per_user),
    };
    let f = config.sample_primary_link.then(|| {
        let mut link = rng.substream(sample_index, StreamRole::PrimaryLink);
        FadingDistribution::RayleighUnitPower.sample(&mut link)
    });
    Ok(FadingState {
        h,
        g: assemble(g_shape, stream.shared_g(), g),
        e: assemble(e_shape, stream.shared_e(), e),
        f,
    })
}
