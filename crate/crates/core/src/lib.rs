pub mod alloc;
pub mod config;
pub mod error;
pub mod gains;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod power;
pub mod rng;
pub mod topology;
pub mod units;
pub mod verify;
