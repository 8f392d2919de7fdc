//! Experiment runner and command line front end for `cachevid-core`:
//! TOML configuration files, paired Monte Carlo replication, parameter
//! sweeps and CSV output.

pub mod cli;
pub mod config_file;
pub mod error;
pub mod experiment;
pub mod output;

pub use config_file::{load_config, ConfigFile};
pub use error::Error;
pub use experiment::{run_experiment, run_sweep, SweepAxis, SweepPoint, SweepSpec, Trials};
