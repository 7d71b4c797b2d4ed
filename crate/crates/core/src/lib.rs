//! Power control for a cognitive secondary link sharing a channel with a
//! sporadic primary transmitter.
//!
//! The primary is on or off for whole slots and switches at most once per
//! block; the secondary must keep the interference it causes below a fixed
//! gap while maximizing its own average rate. This crate computes the
//! optimal secondary strategies for four information patterns:
//!
//! - **Genie-aided** ([`bounds::genie_power`]): the secondary knows the
//!   primary's state in every slot and water-fills across the on/off states,
//!   splitting on-state power into a decodable layer and a noise layer.
//! - **Perfect sensing** ([`sense_opt::perfect_sensing_capacity`]): the
//!   secondary learns only the starting state and shapes a per-slot power
//!   profile against the switch-time distribution.
//! - **Noisy sensing** ([`sense_opt::optimize_profile`]): the state estimate
//!   itself passes through a binary error channel with miss and false-alarm
//!   probabilities.
//! - **No sensing** ([`bounds::no_sensing_alpha_star`]): a single static
//!   superposition split, available only when the interference gap is slack.
//!
//! Every closed form is cross-checked by the independent brute-force and
//! first-order solvers in [`oracle`], and every statistical claim by the
//! seeded Monte Carlo machinery in [`simulator`].
//!
//! ```
//! use cograte_core::model::{derive_limits, ChannelParams};
//! use cograte_core::bounds::{genie_power, genie_rate};
//!
//! let params = ChannelParams {
//!     snr1: 7.0, snr2: 7.0, h12_sq: 0.5, h21_sq: 0.5, inr_gap: 3.5,
//! };
//! let limits = derive_limits(&params, 0.5).unwrap();
//! let alloc = genie_power(&limits, params.snr2, 0.5).unwrap();
//! let rate = genie_rate(&alloc, &limits, 0.5);
//! assert!((rate - 1.3043).abs() < 1e-4);
//! ```

// Power rows come in `[sensed-off, sensed-on]` pairs that several arrays
// index in lockstep; explicit `for s_hat in 0..2` loops read better here
// than zipped iterators.
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod error;
pub mod model;
pub mod oracle;
pub mod sense_opt;
pub mod simulator;

pub use bounds::{
    classify_region, genie_power, genie_rate, no_sensing_alpha_star, no_sensing_rate,
    GenieAllocation, GenieRegime, NoSensingResult, Region,
};
pub use error::{Error, Result};
pub use model::{
    cap, derive_limits, ChannelParams, DerivedLimits, Scenario, SensingModel, TrafficModel,
    TrafficSpec,
};
pub use oracle::{
    analytic_gradient, grid_alpha, grid_genie, projected_gradient_profile, GridSpec,
    ProfileRows,
};
pub use sense_opt::{
    achievable_rate, check_monotone, layer2_power, optimize_profile,
    perfect_sensing_capacity, ComponentRates, MonotoneReport, PowerProfile, RateReport,
    Slacks,
};
pub use simulator::{
    block_rng, empirical_rate, empirical_state_prob, primary_protection_check,
    sample_block, BlockRealization, EmpiricalStateProb, ProtectionReport, RateEstimate,
    SimConfig,
};
