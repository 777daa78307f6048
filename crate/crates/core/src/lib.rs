//! Monte Carlo models of multiuser interference diversity in
//! spectrum-sharing cognitive radio networks.
//!
//! A network of `K` CR users shares a band with one PR link. Each CR
//! transmitter is limited both by its peak power and by the peak
//! interference it may cause at the PR receiver; each CR receiver also
//! hears the PR transmitter. D-TDMA schedules the user with the best SNR in
//! each fading block. The crate samples block-fading states, applies the
//! scheduler, and estimates throughput and multiuser diversity gain against
//! closed-form Rayleigh bounds.
//!
//! ```
//! use interdiv_core::{estimate_mdg_ratio, NetworkConfig, NetworkKind, RngSpec};
//!
//! let cfg = NetworkConfig::new(NetworkKind::CPac, 8);
//! let gain = estimate_mdg_ratio(&cfg, 2_000, &RngSpec::new(7)).unwrap();
//! assert!(gain.mean > 1.0);
//! ```

pub mod analysis;
pub mod error;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod scheduler;

pub use analysis::{
    bound_constants, expected_capped_power, expected_interference_attenuation, exponential_integral_e1, mdg_bounds,
    reference_mdg_exact, scaling_function, BoundConstants,
};
pub use error::{Error, Result};
pub use metrics::{
    asymptotic_ratio, curve, estimate_ergodic_throughput, estimate_mdg_kappa, estimate_mdg_ratio,
    normalized_throughput_curve, CurvePoint, Estimate, Quantity,
};
pub use model::{
    sample_state, Channel, FadingDistribution, FadingState, NetworkConfig, NetworkKind, PowerProfile, Topology,
    UserGains,
};
pub use rng::RngSpec;
pub use scheduler::{max_transmit_power, per_user_snr, realized_snr, select_user, ScheduleDecision};
