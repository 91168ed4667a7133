//! Silicon emitter presets, spectral filtering and the transmitter power budget.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::photonics::{
    db_to_ratio, launch_power_dbm, margin_db, mean_photon_number, ratio_to_db, MeanPhotonNumber,
    OpticalPower, SymbolRate, Wavelength,
};

/// Conversion factor between FWHM and the standard deviation of a Gaussian.
pub(crate) const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3; // 2·sqrt(2·ln 2)

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectralShape {
    #[default]
    Gaussian,
    /// Flat-top spectrum of width `fwhm`.
    Rectangular,
}

impl FromStr for SpectralShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(SpectralShape::Gaussian),
            "rectangular" => Ok(SpectralShape::Rectangular),
            other => Err(Error::config(format!(
                "unknown spectral shape `{other}` (expected gaussian | rectangular)"
            ))),
        }
    }
}

impl fmt::Display for SpectralShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectralShape::Gaussian => "gaussian",
            SpectralShape::Rectangular => "rectangular",
        })
    }
}

/// The two characterised SiGe pin emitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourcePreset {
    /// Top-emitting die-level device, broad C+L band emission around 1586 nm.
    DieLevel,
    /// Waveguide device with grating-coupler output, 57 nm wide at 1549 nm.
    Waveguide,
}

impl SourcePreset {
    pub const ALL: [SourcePreset; 2] = [SourcePreset::DieLevel, SourcePreset::Waveguide];

    pub fn name(self) -> &'static str {
        match self {
            SourcePreset::DieLevel => "die_level",
            SourcePreset::Waveguide => "waveguide",
        }
    }

    pub fn spec(self) -> SourceSpec {
        match self {
            // 86 nm FWHM puts the 1/e^2 full width near 146 nm and reproduces the
            // 16.6 dB loss of a 2 nm filter.
            SourcePreset::DieLevel => SourceSpec {
                name: self.name().to_string(),
                center: Wavelength::from_nm(1586.0).unwrap(),
                fwhm_nm: 86.0,
                emitted_power_dbm: -76.5,
                shape: SpectralShape::Gaussian,
            },
            SourcePreset::Waveguide => SourceSpec {
                name: self.name().to_string(),
                center: Wavelength::from_nm(1549.0).unwrap(),
                fwhm_nm: 57.0,
                emitted_power_dbm: -74.9,
                shape: SpectralShape::Gaussian,
            },
        }
    }
}

impl FromStr for SourcePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "die_level" => Ok(SourcePreset::DieLevel),
            "waveguide" => Ok(SourcePreset::Waveguide),
            other => Err(Error::config(format!(
                "unknown source preset `{other}` (expected die_level | waveguide)"
            ))),
        }
    }
}

/// Look up a source preset by name.
pub fn preset(name: &str) -> Result<SourceSpec> {
    name.parse::<SourcePreset>().map(SourcePreset::spec)
}

/// A broadband emitter.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub name: String,
    pub center: Wavelength,
    pub fwhm_nm: f64,
    pub emitted_power_dbm: f64,
    pub shape: SpectralShape,
}

impl SourceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm_nm.is_finite() && self.fwhm_nm > 0.0) {
            return Err(Error::config(format!("source fwhm must be positive, got {}", self.fwhm_nm)));
        }
        if !self.emitted_power_dbm.is_finite() {
            return Err(Error::config("source emitted power must be finite"));
        }
        Ok(())
    }

    pub fn emitted_power(&self) -> OpticalPower {
        OpticalPower::from_dbm(self.emitted_power_dbm).expect("validated finite dBm")
    }

    /// Gaussian standard deviation of the spectrum, in nm.
    pub fn sigma_nm(&self) -> f64 {
        self.fwhm_nm / FWHM_PER_SIGMA
    }
}

/// Ideal brick-wall bandpass filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub passband_nm: f64,
    /// Offset of the passband centre from the source peak.
    pub center_offset_nm: f64,
    pub excess_loss_db: f64,
}

impl FilterSpec {
    pub fn centered(passband_nm: f64) -> Self {
        FilterSpec { passband_nm, center_offset_nm: 0.0, excess_loss_db: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.passband_nm.is_finite() && self.passband_nm > 0.0) {
            return Err(Error::config(format!("filter passband must be positive, got {}", self.passband_nm)));
        }
        if !(self.excess_loss_db.is_finite() && self.excess_loss_db >= 0.0) {
            return Err(Error::config("filter excess loss must be >= 0 dB"));
        }
        if !self.center_offset_nm.is_finite() {
            return Err(Error::config("filter offset must be finite"));
        }
        Ok(())
    }
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec::centered(2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxSpec {
    pub symbol_rate: SymbolRate,
    /// Nominal photons per symbol the transmitter is designed for.
    pub target_mu: MeanPhotonNumber,
    pub modulator_loss_db: f64,
}

impl TxSpec {
    pub fn validate(&self) -> Result<()> {
        if self.target_mu.value() <= 0.0 {
            return Err(Error::config("tx target mu must be > 0"));
        }
        if !(self.modulator_loss_db.is_finite() && self.modulator_loss_db >= 0.0) {
            return Err(Error::config("modulator loss must be >= 0 dB"));
        }
        Ok(())
    }
}

impl Default for TxSpec {
    fn default() -> Self {
        TxSpec {
            symbol_rate: SymbolRate::new(1e9).unwrap(),
            target_mu: MeanPhotonNumber::new(0.1).unwrap(),
            modulator_loss_db: 0.0,
        }
    }
}

/// Fraction of the emitted power that passes `filter`.
pub fn filter_transmittance(source: &SourceSpec, filter: &FilterSpec) -> f64 {
    let lo = filter.center_offset_nm - 0.5 * filter.passband_nm;
    let hi = filter.center_offset_nm + 0.5 * filter.passband_nm;
    let passed = match source.shape {
        SpectralShape::Gaussian => {
            let scale = source.sigma_nm() * std::f64::consts::SQRT_2;
            if filter.center_offset_nm == 0.0 {
                libm::erf(hi / scale)
            } else {
                0.5 * (libm::erf(hi / scale) - libm::erf(lo / scale))
            }
        }
        SpectralShape::Rectangular => {
            let half = 0.5 * source.fwhm_nm;
            let overlap = (hi.min(half) - lo.max(-half)).max(0.0);
            (overlap / source.fwhm_nm).min(1.0)
        }
    };
    passed * db_to_ratio(-filter.excess_loss_db)
}

/// Photons per symbol at the modulator output after filtering.
pub fn effective_mu(source: &SourceSpec, filter: &FilterSpec, tx: &TxSpec) -> MeanPhotonNumber {
    mean_photon_number(source.emitted_power(), tx.symbol_rate, source.center)
        .attenuate(filter_transmittance(source, filter))
        .attenuate(db_to_ratio(-tx.modulator_loss_db))
}

/// Transmitter power budget, one field per row of the budget table.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub single_photon_dbm: f64,
    pub rate_term_db: f64,
    pub poisson_term_db: f64,
    pub nominal_launch_dbm: f64,
    pub emitted_dbm: f64,
    pub equivalent_mu: f64,
    pub native_margin_db: f64,
    pub filter_loss_db: f64,
    pub effective_mu: f64,
    pub filtered_margin_db: f64,

    // carried along for row labels
    pub symbol_rate_hz: f64,
    pub target_mu: f64,
    pub passband_nm: f64,
}

/// One labelled line of a rendered budget.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetRow {
    pub section: &'static str,
    pub label: String,
    pub value: f64,
    pub unit: &'static str,
}

pub fn build_budget(source: &SourceSpec, filter: &FilterSpec, tx: &TxSpec) -> Result<LinkBudget> {
    source.validate()?;
    filter.validate()?;
    tx.validate()?;

    let launch = launch_power_dbm(source.center, tx.symbol_rate, tx.target_mu)?;
    let nominal_launch_dbm = launch.dbm();
    let emitted_dbm = source.emitted_power_dbm;
    let equivalent = mean_photon_number(source.emitted_power(), tx.symbol_rate, source.center);
    let native_margin_db = emitted_dbm - nominal_launch_dbm;
    let filter_loss_db = -ratio_to_db(filter_transmittance(source, filter));
    let effective = effective_mu(source, filter, tx);

    // equivalent_mu and the native margin are two views of the same ratio
    debug_assert!(
        (margin_db(equivalent, tx.target_mu)? - native_margin_db).abs() < 1e-9,
        "equivalent mu inconsistent with launch budget"
    );

    Ok(LinkBudget {
        single_photon_dbm: launch.single_photon_dbm,
        rate_term_db: launch.rate_term_db,
        poisson_term_db: launch.poisson_term_db,
        nominal_launch_dbm,
        emitted_dbm,
        equivalent_mu: equivalent.value(),
        native_margin_db,
        filter_loss_db,
        effective_mu: effective.value(),
        filtered_margin_db: native_margin_db - filter_loss_db,
        symbol_rate_hz: tx.symbol_rate.hz(),
        target_mu: tx.target_mu.value(),
        passband_nm: filter.passband_nm,
    })
}

impl LinkBudget {
    /// The ten budget rows in table order.
    pub fn rows(&self) -> Vec<BudgetRow> {
        let mu = trim_number(self.target_mu);
        let row = |section, label: String, value, unit| BudgetRow { section, label, value, unit };
        vec![
            row("QKD TX", "Single photon: λ".into(), self.single_photon_dbm, "dBm"),
            row("QKD TX", format!("TX rate: {}", format_hz(self.symbol_rate_hz)), self.rate_term_db, "dB"),
            row("QKD TX", format!("Poisson: μ = {mu}"), self.poisson_term_db, "dB"),
            row("QKD TX", "TX launch".into(), self.nominal_launch_dbm, "dBm"),
            row("Native Source", "Emitted power".into(), self.emitted_dbm, "dBm"),
            row("Native Source", "Equivalent μ".into(), self.equivalent_mu, ""),
            row("Native Source", format!("Margin to μ = {mu}"), self.native_margin_db, "dB"),
            row(
                "Filtered Source",
                format!("Filtering loss: {} nm", trim_number(self.passband_nm)),
                self.filter_loss_db,
                "dB",
            ),
            row("Filtered Source", "Effective μ".into(), self.effective_mu, ""),
            row("Filtered Source", format!("Margin to μ = {mu}"), self.filtered_margin_db, "dB"),
        ]
    }
}

fn trim_number(x: f64) -> String {
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn format_hz(hz: f64) -> String {
    let (scale, unit) = match hz {
        x if x >= 1e9 => (1e9, "GHz"),
        x if x >= 1e6 => (1e6, "MHz"),
        x if x >= 1e3 => (1e3, "kHz"),
        _ => (1.0, "Hz"),
    };
    format!("{} {unit}", trim_number(hz / scale))
}
