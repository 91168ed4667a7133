//! Runs the calibrated waveguide link analytically and by Monte Carlo, then
//! shows the key rate falling off with fiber length.
//!
//!     cargo run --release -p siqkd --example simulate_link

use siqkd::bb84::{analytic_rates, simulate_mc, sweep, SweepMode, SweepParameter};
use siqkd::scenario;

fn main() -> siqkd::Result<()> {
    let cfg = scenario::waveguide_1km();

    let an = analytic_rates(&cfg)?;
    println!(
        "analytic:    sifted {:.1} b/s, QBER {:.4} (optical {:.4}, dark {:.4}), SKR {:.1} b/s per detector",
        an.sifted_rate, an.qber, an.qber_breakdown.optical, an.qber_breakdown.dark, an.skr_per_detector
    );

    let mc = simulate_mc(&cfg, 100_000_000, 7)?;
    let c = mc.counts.expect("Monte Carlo fills counts");
    println!(
        "monte carlo: sifted {:.1} b/s, QBER {:.4}, SKR {:.1} b/s per detector ({} sifted bits from {} symbols)",
        mc.sifted_rate, mc.qber, mc.skr_per_detector, c.sifted, c.symbols
    );

    println!("\nlength km  SKR b/s");
    for r in sweep(&cfg, SweepParameter::Length, 0.0, 50.0, 6, SweepMode::Analytic)? {
        println!("{:>9.0}  {:>7.2}", r.value, r.result.skr_total);
    }
    Ok(())
}
