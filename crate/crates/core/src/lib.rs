//! Delay-constrained adaptive video delivery in a wireless caching network.
//!
//! A streaming user surrounded by a Poisson field of caching nodes makes
//! three decisions on two timescales:
//!
//! * once per frame of `T` slots it associates with a caching node, chosen
//!   by minimizing the expected frame drift-plus-penalty of its playback
//!   queue ([`policy::choose_node`]);
//! * every slot it picks a video quality and a number of chunks to fetch,
//!   read from a policy table produced by finite-horizon backward dynamic
//!   programming ([`mdp::backward_dp`], [`mdp::lookup_action`]).
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. Config
//! files, CSV output, the experiment runner and the command line tool live
//! in the `cachevid` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod admission;
pub mod channel;
pub mod config;
pub mod geometry;
pub mod mdp;
pub mod policy;
pub mod queue;
pub mod rng;
pub mod sim;
pub mod stats;

pub use config::{BitCap, ConfigError, Mobility, SimConfig};
pub use mdp::{Action, PolicyTable};
pub use policy::PolicyKind;
pub use sim::{run_trial, RunMetrics};
