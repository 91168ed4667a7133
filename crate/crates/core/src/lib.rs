//! Link engineering for BB84 quantum key distribution powered by weak,
//! broadband silicon light emitters.
//!
//! The crate is layered bottom-up:
//!
//! - [`photonics`]: photon energy, dBm conversions, Poisson statistics, binary entropy
//! - [`source`]: emitter presets, spectral filtering and the transmitter power budget
//! - [`channel`]: fiber loss and the depolarization-driven optical QBER
//! - [`bb84`]: analytic and Monte Carlo evaluation of sifted rate, QBER and secret-key rate
//! - [`keybudget`]: classical capacity protectable by a given secret-key rate
//! - [`config`], [`table`], [`cli`]: configuration files, table output and the `siqkd` command
//!
//! Runnable walkthroughs live in the crate's `examples/` directory, e.g.
//! `cargo run -p siqkd --example power_budget`.

pub mod bb84;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod keybudget;
pub mod photonics;
pub mod scenario;
pub mod source;
pub mod table;

pub use error::{Error, Result};
