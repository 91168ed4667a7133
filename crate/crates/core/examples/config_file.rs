//! Loads a run description from INI text with command-line style overrides.
//!
//!     cargo run -p siqkd --example config_file

use siqkd::bb84::{analytic_rates, simulate_mc};
use siqkd::config::{RunConfig, RunMode};

const RUN: &str = "\
[run]
scenario = waveguide_1km
mode = mc
n_symbols = 2e6
seed = 11

[channel]
length_km = 5
";

fn main() -> siqkd::Result<()> {
    let overrides = ["tx.launch_mu=0.2".to_string()];
    let cfg = RunConfig::load(Some((RUN, "inline")), &overrides)?;
    println!(
        "{} over {} km, μ at modulator {:.3}",
        cfg.protocol.source.name,
        cfg.protocol.fiber.length_km,
        cfg.protocol.modulator_mu().value()
    );

    let result = match cfg.mode {
        RunMode::Analytic => analytic_rates(&cfg.protocol)?,
        RunMode::MonteCarlo => simulate_mc(&cfg.protocol, cfg.n_symbols, cfg.seed)?,
    };
    println!("QBER {:.4}, SKR {:.1} b/s", result.qber, result.skr_total);

    // typos are rejected rather than ignored
    let err = RunConfig::load(Some(("[channel]\nlenght_km = 5\n", "inline")), &[]).unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
