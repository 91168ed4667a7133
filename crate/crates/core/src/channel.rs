//! Fiber quantum channel: loss, PMD and the linewidth-dependent
//! depolarization that turns residual spectral width into bit errors.
//!
//! The degree of polarization (DOP) is modelled as the product of two
//! factors. The fiber term is the standard PMD decorrelation of a Gaussian
//! spectrum, `exp(-(Δτ·σω)²/2)`. The encoder term `exp(-(δλ/δλc)²)` lumps the
//! chromatic depolarization of the polarization encoder into a single scale
//! `δλc`, which is calibrated against a measured QBER at one linewidth.

use crate::error::{Error, Result};
use crate::photonics::{db_to_ratio, Wavelength, SPEED_OF_LIGHT};
use crate::source::FWHM_PER_SIGMA;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    pub length_km: f64,
    pub attenuation_db_per_km: f64,
    pub pmd_ps_per_sqrt_km: f64,
}

impl Default for FiberSpec {
    /// 1 km of standard single-mode fiber.
    fn default() -> Self {
        FiberSpec { length_km: 1.0, attenuation_db_per_km: 0.2, pmd_ps_per_sqrt_km: 0.1 }
    }
}

impl FiberSpec {
    pub fn with_length(self, length_km: f64) -> Self {
        FiberSpec { length_km, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length_km", self.length_km),
            ("attenuation_db_per_km", self.attenuation_db_per_km),
            ("pmd_ps_per_sqrt_km", self.pmd_ps_per_sqrt_km),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("fiber {name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Mean differential group delay in seconds.
    pub fn mean_dgd_s(&self) -> f64 {
        self.pmd_ps_per_sqrt_km * self.length_km.sqrt() * 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderSpec {
    /// Polarization visibility of the encoder for a monochromatic input.
    pub visibility: f64,
    /// Linewidth at which the encoder DOP falls to 1/e, in nm.
    pub depol_scale_nm: f64,
}

impl Default for EncoderSpec {
    fn default() -> Self {
        EncoderSpec { visibility: 0.99, depol_scale_nm: 10.0 }
    }
}

impl EncoderSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.visibility > 0.0 && self.visibility <= 1.0) {
            return Err(Error::config(format!(
                "encoder visibility must lie in (0, 1], got {}",
                self.visibility
            )));
        }
        if !(self.depol_scale_nm.is_finite() && self.depol_scale_nm > 0.0) {
            return Err(Error::config(format!(
                "encoder depol_scale_nm must be positive, got {}",
                self.depol_scale_nm
            )));
        }
        Ok(())
    }
}

/// Degree of polarization after the encoder and the fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopResult {
    pub dop_total: f64,
    pub dop_encoder: f64,
    pub dop_fiber: f64,
}

pub fn channel_transmittance(fiber: &FiberSpec) -> f64 {
    db_to_ratio(-fiber.attenuation_db_per_km * fiber.length_km)
}

pub fn degree_of_polarization(
    delta_lambda_nm: f64,
    center: Wavelength,
    fiber: &FiberSpec,
    encoder: &EncoderSpec,
) -> Result<DopResult> {
    if !(delta_lambda_nm.is_finite() && delta_lambda_nm > 0.0) {
        return Err(Error::domain(format!("linewidth must be positive, got {delta_lambda_nm} nm")));
    }
    let sigma_lambda = delta_lambda_nm * 1e-9 / FWHM_PER_SIGMA;
    let lambda = center.meters();
    let sigma_omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * sigma_lambda / (lambda * lambda);
    let x = fiber.mean_dgd_s() * sigma_omega;
    let dop_fiber = (-0.5 * x * x).exp();
    let dop_encoder = (-(delta_lambda_nm / encoder.depol_scale_nm).powi(2)).exp();
    Ok(DopResult { dop_total: dop_encoder * dop_fiber, dop_encoder, dop_fiber })
}

/// Error probability of a matched-basis detection due to imperfect
/// polarization, `(1 - V·DOP)/2`.
pub fn optical_qber(dop: &DopResult, encoder: &EncoderSpec) -> f64 {
    0.5 * (1.0 - encoder.visibility * dop.dop_total)
}

/// Finds the encoder depolarization scale for which the optical QBER at
/// `at_linewidth_nm` equals `target_qber`.
pub fn calibrate_depol_scale(
    target_qber: f64,
    at_linewidth_nm: f64,
    center: Wavelength,
    fiber: &FiberSpec,
    visibility: f64,
) -> Result<f64> {
    fiber.validate()?;
    if !(visibility > 0.0 && visibility <= 1.0) {
        return Err(Error::Calibration(format!("visibility {visibility} outside (0, 1]")));
    }
    let floor = 0.5 * (1.0 - visibility);
    // The fiber alone already depolarizes; the encoder can only add to it.
    let unit = EncoderSpec { visibility, depol_scale_nm: f64::INFINITY };
    let fiber_only = degree_of_polarization(at_linewidth_nm, center, fiber, &unit)?;
    let reachable_min = optical_qber(&fiber_only, &unit);
    if !(target_qber > floor && target_qber < 0.5) {
        return Err(Error::Calibration(format!(
            "target QBER {target_qber} unreachable: must lie strictly between the visibility floor \
             {floor:.6} and 0.5"
        )));
    }
    if target_qber <= reachable_min {
        return Err(Error::Calibration(format!(
            "target QBER {target_qber} is below the {reachable_min:.6} already caused by fiber PMD \
             at {at_linewidth_nm} nm"
        )));
    }

    let qber_at = |scale: f64| -> f64 {
        let enc = EncoderSpec { visibility, depol_scale_nm: scale };
        let dop =
            degree_of_polarization(at_linewidth_nm, center, fiber, &enc).expect("linewidth checked above");
        optical_qber(&dop, &enc)
    };

    // qber_at is decreasing in scale; bracket then bisect in log-space.
    let (mut lo, mut hi) = (at_linewidth_nm * 1e-3, at_linewidth_nm * 1e3);
    while qber_at(lo) < target_qber {
        lo *= 0.5;
    }
    while qber_at(hi) > target_qber {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Calibration("failed to bracket depolarization scale".into()));
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if qber_at(mid) > target_qber {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    let scale = (lo * hi).sqrt();
    let achieved = qber_at(scale);
    if (achieved - target_qber).abs() > 1e-6 {
        return Err(Error::Calibration(format!(
            "bisection converged to QBER {achieved}, target {target_qber}"
        )));
    }
    Ok(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nm(x: f64) -> Wavelength {
        Wavelength::from_nm(x).unwrap()
    }

    #[test]
    fn transmittance_values() {
        let f = FiberSpec::default();
        assert!((channel_transmittance(&f) - 0.9550).abs() < 1e-4);
        assert_eq!(channel_transmittance(&f.with_length(0.0)), 1.0);
        assert!((channel_transmittance(&f.with_length(50.0)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn dop_limits() {
        let f = FiberSpec::default();
        let e = EncoderSpec::default();
        let d = degree_of_polarization(1e-6, nm(1549.0), &f, &e).unwrap();
        assert!(d.dop_total > 1.0 - 1e-10);

        let d = degree_of_polarization(2.0, nm(1549.0), &f, &e).unwrap();
        assert!(d.dop_fiber >= 0.99);
        // Δτ = 0.1 ps, σω ≈ 6.67e11 rad/s → exponent ≈ 0.0022
        assert!((d.dop_fiber - (-0.002_22f64).exp()).abs() < 5e-5);

        let e = EncoderSpec { depol_scale_nm: 3.0, ..e };
        let d = degree_of_polarization(3.0, nm(1549.0), &f, &e).unwrap();
        assert!((d.dop_encoder - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(d.dop_total, d.dop_encoder * d.dop_fiber);

        assert!(degree_of_polarization(0.0, nm(1549.0), &f, &e).is_err());
    }

    #[test]
    fn qber_values() {
        let perfect = DopResult { dop_total: 1.0, dop_encoder: 1.0, dop_fiber: 1.0 };
        let ideal = EncoderSpec { visibility: 1.0, ..EncoderSpec::default() };
        assert_eq!(optical_qber(&perfect, &ideal), 0.0);
        assert!((optical_qber(&perfect, &EncoderSpec::default()) - 0.005).abs() < 1e-15);
        let gone = DopResult { dop_total: 0.0, dop_encoder: 0.0, dop_fiber: 1.0 };
        assert_eq!(optical_qber(&gone, &ideal), 0.5);
    }

    #[test]
    fn calibration_round_trip() {
        let f = FiberSpec::default();
        let scale = calibrate_depol_scale(0.11, 2.0, nm(1549.0), &f, 0.99).unwrap();
        let e = EncoderSpec { visibility: 0.99, depol_scale_nm: scale };
        let q = optical_qber(&degree_of_polarization(2.0, nm(1549.0), &f, &e).unwrap(), &e);
        assert!((q - 0.11).abs() < 1e-4);

        let looser = calibrate_depol_scale(0.2, 2.0, nm(1549.0), &f, 0.99).unwrap();
        assert!(looser < scale);
    }

    #[test]
    fn calibration_rejects_unreachable_targets() {
        let f = FiberSpec::default();
        let err = calibrate_depol_scale(0.005, 2.0, nm(1549.0), &f, 0.99).unwrap_err();
        assert!(matches!(err, Error::Calibration(_)));
        assert!(calibrate_depol_scale(0.5, 2.0, nm(1549.0), &f, 0.99).is_err());
        assert!(calibrate_depol_scale(0.001, 2.0, nm(1549.0), &f, 0.99).is_err());
    }

    proptest! {
        #[test]
        fn dop_bounded(
            dl in 0.001f64..50.0,
            len in 0.0f64..100.0,
            pmd in 0.0f64..1.0,
            scale in 0.1f64..100.0,
        ) {
            let f = FiberSpec { length_km: len, pmd_ps_per_sqrt_km: pmd, ..FiberSpec::default() };
            let e = EncoderSpec { depol_scale_nm: scale, ..EncoderSpec::default() };
            let d = degree_of_polarization(dl, nm(1549.0), &f, &e).unwrap();
            for v in [d.dop_total, d.dop_encoder, d.dop_fiber] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(d.dop_total <= d.dop_encoder.min(d.dop_fiber));
            let q = optical_qber(&d, &e);
            prop_assert!((0.0..=0.5).contains(&q));
        }

        #[test]
        fn qber_monotone_in_linewidth(a in 0.001f64..20.0, b in 0.001f64..20.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let f = FiberSpec::default();
            let e = EncoderSpec::default();
            let q = |dl| optical_qber(&degree_of_polarization(dl, nm(1586.0), &f, &e).unwrap(), &e);
            prop_assert!(q(lo) <= q(hi));
        }

        #[test]
        fn transmittance_multiplicative(a in 0.0f64..100.0, b in 0.0f64..100.0) {
            let f = FiberSpec::default();
            let joint = channel_transmittance(&f.with_length(a + b));
            let split = channel_transmittance(&f.with_length(a)) * channel_transmittance(&f.with_length(b));
            prop_assert!((joint / split - 1.0).abs() < 1e-12);
        }
    }
}
