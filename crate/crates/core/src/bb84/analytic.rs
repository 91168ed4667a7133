use super::{ProtocolConfig, ProtocolResult, QberBreakdown, DETECTOR_COUNT};
use crate::error::{Error, Result};
use crate::photonics::binary_entropy;

/// Asymptotic BB84 secret fraction `max(0, 1 − f·h2(Q) − h2(Q))`.
pub fn secret_fraction(qber: f64, ec_efficiency: f64) -> f64 {
    // QBER above one half counts as fully random
    let h = binary_entropy(qber.clamp(0.0, 0.5)).expect("clamped to [0, 0.5]");
    (1.0 - ec_efficiency * h - h).max(0.0)
}

/// Closed-form sifted rate, QBER and secret-key rate.
pub fn analytic_rates(config: &ProtocolConfig) -> Result<ProtocolResult> {
    config.validate()?;
    let mu_det = config.modulator_mu().value() * config.detection_transmittance();
    let p_sig = -(-mu_det).exp_m1();
    let p_dark = (f64::from(DETECTOR_COUNT) * config.dark_probability()).min(1.0);
    let p_click = p_sig + p_dark - p_sig * p_dark;
    let sifted_rate = config.tx.symbol_rate.hz() * p_click * 0.5;

    let q_opt = config.optical_qber()?;
    let weight = p_sig + p_dark;
    let breakdown = if weight > 0.0 {
        QberBreakdown { optical: q_opt * p_sig / weight, dark: 0.5 * p_dark / weight }
    } else {
        QberBreakdown::default()
    };
    Ok(ProtocolResult::from_rates(sifted_rate, breakdown, config.ec_efficiency, None))
}

/// Finds the receiver excess loss (dB) at which the analytic secret-key rate
/// per detector equals `target_bps`.
pub fn calibrate_receiver_excess_loss(config: &ProtocolConfig, target_bps: f64) -> Result<f64> {
    if !(target_bps.is_finite() && target_bps > 0.0) {
        return Err(Error::Calibration(format!("target SKR must be positive, got {target_bps}")));
    }
    let skr_at = |excess: f64| -> Result<f64> {
        let mut c = config.clone();
        c.receiver.excess_loss_db = excess;
        Ok(analytic_rates(&c)?.skr_per_detector)
    };
    let ceiling = skr_at(0.0)?;
    if ceiling < target_bps {
        return Err(Error::Calibration(format!(
            "target {target_bps} b/s per detector exceeds the {ceiling:.6} b/s reachable with no \
             excess loss"
        )));
    }
    // SKR falls monotonically with loss; bisect on [0, 100] dB.
    let (mut lo, mut hi) = (0.0, 100.0);
    if skr_at(hi)? > target_bps {
        return Err(Error::Calibration("target SKR too small to bracket".into()));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if skr_at(mid)? > target_bps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
