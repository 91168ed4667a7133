//! Calibrates the encoder so the die-level emitter shows 11 % optical QBER at
//! 2 nm, then sweeps the filter passband to show how QBER grows with linewidth.
//!
//!     cargo run -p siqkd --example linewidth_sweep

use siqkd::bb84::{sweep, SweepMode, SweepParameter};
use siqkd::channel::calibrate_depol_scale;
use siqkd::scenario;

fn main() -> siqkd::Result<()> {
    let mut cfg = scenario::die_level_linewidth();
    let scale = calibrate_depol_scale(0.11, 2.0, cfg.source.center, &cfg.fiber, cfg.encoder.visibility)?;
    cfg.encoder.depol_scale_nm = scale;
    println!("encoder depolarization scale: {scale:.6} nm\n");

    let rows = sweep(&cfg, SweepParameter::Linewidth, 0.5, 5.0, 10, SweepMode::Analytic)?;
    println!("{:>8}  {:>8}  {:>10}", "nm", "QBER", "SKR b/s");
    for r in &rows {
        let flag = if r.result.qber >= 0.11 { "  (no key)" } else { "" };
        println!("{:>8.2}  {:>8.4}  {:>10.3}{flag}", r.value, r.result.qber, r.result.skr_total);
    }
    Ok(())
}
