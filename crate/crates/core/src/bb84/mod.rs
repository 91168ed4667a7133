//! Polarization-encoded BB84 over a weak incoherent source.
//!
//! Two evaluation paths share one configuration: [`analytic_rates`] gives the
//! closed-form asymptotic estimate and [`simulate_mc`] draws every symbol
//! through source, channel and a four-detector passive-basis receiver. The
//! Monte Carlo path is checked against the analytic one in the test suites.

mod analytic;
mod montecarlo;
mod sweep;

pub use analytic::{analytic_rates, calibrate_receiver_excess_loss, secret_fraction};
pub use montecarlo::{simulate_mc, BATCH_SYMBOLS};
pub use sweep::{sweep, SweepMode, SweepParameter, SweepRow};

use crate::channel::{channel_transmittance, degree_of_polarization, optical_qber, EncoderSpec, FiberSpec};
use crate::error::{Error, Result};
use crate::photonics::{db_to_ratio, MeanPhotonNumber};
use crate::source::{effective_mu, FilterSpec, SourcePreset, SourceSpec, TxSpec};

/// Two bases × two outcomes.
pub const DETECTOR_COUNT: u32 = 4;

/// Bob's passive-basis receiver. Basis choice is a 50/50 splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverSpec {
    pub efficiency: f64,
    /// Dark counts per second, per detector.
    pub dark_rate_cps: f64,
    /// Detection gate; `None` means one symbol period.
    pub gate_window_s: Option<f64>,
    pub insertion_loss_db: f64,
    /// Lumped dead-time, afterpulsing and gating duty-cycle penalty.
    pub excess_loss_db: f64,
}

impl Default for ReceiverSpec {
    fn default() -> Self {
        ReceiverSpec {
            efficiency: 0.2,
            dark_rate_cps: 1000.0,
            gate_window_s: None,
            insertion_loss_db: 3.0,
            excess_loss_db: 0.0,
        }
    }
}

impl ReceiverSpec {
    /// Low-noise receiver used for QBER-versus-linewidth characterisation.
    pub fn qber_bench() -> Self {
        ReceiverSpec { dark_rate_cps: 10.0, ..ReceiverSpec::default() }
    }

    /// Receiver whose excess loss reproduces 0.37 kb/s per detector with the
    /// waveguide source over 1 km. See [`crate::scenario::WAVEGUIDE_RX_EXCESS_LOSS_DB`].
    pub fn calibrated_1km() -> Self {
        ReceiverSpec {
            excess_loss_db: crate::scenario::WAVEGUIDE_RX_EXCESS_LOSS_DB,
            ..ReceiverSpec::qber_bench()
        }
    }

    pub fn detector_count(&self) -> u32 {
        DETECTOR_COUNT
    }

    /// Probability that a photon entering the receiver produces a detection.
    pub fn transmittance(&self) -> f64 {
        db_to_ratio(-(self.insertion_loss_db + self.excess_loss_db)) * self.efficiency
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::config(format!(
                "receiver efficiency must lie in (0, 1], got {}",
                self.efficiency
            )));
        }
        for (name, v) in [
            ("dark_rate_cps", self.dark_rate_cps),
            ("insertion_loss_db", self.insertion_loss_db),
            ("excess_loss_db", self.excess_loss_db),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("receiver {name} must be >= 0, got {v}")));
            }
        }
        if let Some(g) = self.gate_window_s {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::config(format!("receiver gate window must be positive, got {g}")));
            }
        }
        Ok(())
    }
}

/// Everything needed to evaluate one link.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub source: SourceSpec,
    pub filter: FilterSpec,
    pub tx: TxSpec,
    pub fiber: FiberSpec,
    pub encoder: EncoderSpec,
    pub receiver: ReceiverSpec,
    /// Error-correction inefficiency f ≥ 1.
    pub ec_efficiency: f64,
    /// Fixes the photons per symbol leaving the modulator, bypassing the
    /// source power budget (e.g. for an attenuated laser or a μ sweep).
    pub launch_mu: Option<MeanPhotonNumber>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            source: SourcePreset::Waveguide.spec(),
            filter: FilterSpec::default(),
            tx: TxSpec::default(),
            fiber: FiberSpec::default(),
            encoder: EncoderSpec::default(),
            receiver: ReceiverSpec::default(),
            ec_efficiency: 1.0,
            launch_mu: None,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.filter.validate()?;
        self.tx.validate()?;
        self.fiber.validate()?;
        self.encoder.validate()?;
        self.receiver.validate()?;
        if !(self.ec_efficiency.is_finite() && self.ec_efficiency >= 1.0) {
            return Err(Error::config(format!("ec_efficiency must be >= 1, got {}", self.ec_efficiency)));
        }
        Ok(())
    }

    /// Photons per symbol at the modulator output.
    pub fn modulator_mu(&self) -> MeanPhotonNumber {
        self.launch_mu.unwrap_or_else(|| effective_mu(&self.source, &self.filter, &self.tx))
    }

    /// Photon survival probability from modulator output to a click.
    pub fn detection_transmittance(&self) -> f64 {
        channel_transmittance(&self.fiber) * self.receiver.transmittance()
    }

    pub fn gate_window_s(&self) -> f64 {
        self.receiver.gate_window_s.unwrap_or_else(|| 1.0 / self.tx.symbol_rate.hz())
    }

    /// Dark-click probability of one detector in one gate.
    pub fn dark_probability(&self) -> f64 {
        (self.receiver.dark_rate_cps * self.gate_window_s()).min(1.0)
    }

    /// Matched-basis error probability of a signal photon.
    pub fn optical_qber(&self) -> Result<f64> {
        let dop =
            degree_of_polarization(self.filter.passband_nm, self.source.center, &self.fiber, &self.encoder)?;
        Ok(optical_qber(&dop, &self.encoder))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QberBreakdown {
    pub optical: f64,
    pub dark: f64,
}

/// Event tallies of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub symbols: u64,
    pub clicks: u64,
    pub double_clicks: u64,
    pub sifted: u64,
    pub errors: u64,
    /// Sifted errors whose reported detector fired only from a dark count.
    pub dark_errors: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            symbols: self.symbols + o.symbols,
            clicks: self.clicks + o.clicks,
            double_clicks: self.double_clicks + o.double_clicks,
            sifted: self.sifted + o.sifted,
            errors: self.errors + o.errors,
            dark_errors: self.dark_errors + o.dark_errors,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    /// Sifted key bits per second.
    pub sifted_rate: f64,
    pub qber: f64,
    pub qber_breakdown: QberBreakdown,
    pub secret_fraction: f64,
    pub skr_total: f64,
    pub skr_per_detector: f64,
    /// Present for Monte Carlo results only.
    pub counts: Option<Counts>,
}

impl ProtocolResult {
    pub(crate) fn from_rates(
        sifted_rate: f64,
        breakdown: QberBreakdown,
        ec_efficiency: f64,
        counts: Option<Counts>,
    ) -> Self {
        let qber = (breakdown.optical + breakdown.dark).clamp(0.0, 0.5);
        let secret_fraction = secret_fraction(qber, ec_efficiency);
        let skr_total = sifted_rate * secret_fraction;
        ProtocolResult {
            sifted_rate,
            qber,
            qber_breakdown: breakdown,
            secret_fraction,
            skr_total,
            skr_per_detector: skr_total / f64::from(DETECTOR_COUNT),
            counts,
        }
    }
}
