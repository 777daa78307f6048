//! Counter-keyed random substreams.
//!
//! Every random quantity in a simulation is drawn from a substream selected by
//! `(master_seed, sample_index, role)`. A substream depends on nothing else, so
//! the sample a worker produces for a given index is the same whichever worker
//! computes it and in whatever order.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

/// The generator backing every substream.
pub type Substream = Xoshiro256PlusPlus;

/// Which group of channels a substream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum StreamRole {
    /// CR data channels `h`.
    Data = 1,
    /// Channels into the PR receiver (`g`).
    ToPrimaryReceiver = 2,
    /// Channels out of the PR transmitter (`e`).
    FromPrimaryTransmitter = 3,
    /// The PR link itself (`f`).
    PrimaryLink = 4,
    /// Uniform variates for direct order-statistic sampling.
    OrderStatistic = 5,
}

/// Master seed plus the derivation rule for per-sample substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
}

impl RngSpec {
    pub const fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    /// Substream for one channel role of one sample.
    pub fn substream(&self, sample_index: u64, role: StreamRole) -> Substream {
        Substream::seed_from_u64(self.key(sample_index, role))
    }

    fn key(&self, sample_index: u64, role: StreamRole) -> u64 {
        let mut x = mix64(self.master_seed ^ 0x6a09_e667_f3bc_c909);
        x = mix64(x ^ sample_index);
        mix64(x ^ (role as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
