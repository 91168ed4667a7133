use std::fmt;
use std::str::FromStr;

use super::{analytic_rates, simulate_mc, ProtocolConfig, ProtocolResult};
use crate::error::{Error, Result};
use crate::photonics::MeanPhotonNumber;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Filter passband in nm; also the linewidth seen by the depolarization model.
    Linewidth,
    /// Fiber length in km.
    Length,
    /// Photons per symbol at the modulator output.
    Mu,
    /// Dark counts per second per detector.
    DarkRate,
}

impl SweepParameter {
    fn apply(self, config: &ProtocolConfig, value: f64) -> Result<ProtocolConfig> {
        let mut c = config.clone();
        match self {
            SweepParameter::Linewidth => c.filter.passband_nm = value,
            SweepParameter::Length => c.fiber.length_km = value,
            SweepParameter::Mu => c.launch_mu = Some(MeanPhotonNumber::new(value)?),
            SweepParameter::DarkRate => c.receiver.dark_rate_cps = value,
        }
        Ok(c)
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linewidth" => Ok(SweepParameter::Linewidth),
            "length" => Ok(SweepParameter::Length),
            "mu" => Ok(SweepParameter::Mu),
            "dark_rate" => Ok(SweepParameter::DarkRate),
            other => Err(Error::config(format!(
                "unknown sweep parameter `{other}` (expected linewidth | length | mu | dark_rate)"
            ))),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::Linewidth => "linewidth",
            SweepParameter::Length => "length",
            SweepParameter::Mu => "mu",
            SweepParameter::DarkRate => "dark_rate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Analytic,
    /// Every point reuses the same seed.
    MonteCarlo {
        n_symbols: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: ProtocolResult,
}

/// Evaluates `steps` evenly spaced points of `parameter` over `[from, to]`.
pub fn sweep(
    config: &ProtocolConfig,
    parameter: SweepParameter,
    from: f64,
    to: f64,
    steps: usize,
    mode: SweepMode,
) -> Result<Vec<SweepRow>> {
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(Error::config(format!("sweep range must satisfy from < to, got {from}..{to}")));
    }
    if steps < 2 {
        return Err(Error::config(format!("sweep needs at least 2 steps, got {steps}")));
    }
    let span = to - from;
    (0..steps)
        .map(|i| {
            let value = if i + 1 == steps { to } else { from + span * i as f64 / (steps - 1) as f64 };
            let point = parameter.apply(config, value)?;
            let result = match mode {
                SweepMode::Analytic => analytic_rates(&point)?,
                SweepMode::MonteCarlo { n_symbols, seed } => simulate_mc(&point, n_symbols, seed)?,
            };
            Ok(SweepRow { value, result })
        })
        .collect()
}
