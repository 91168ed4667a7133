//! INI-style run configuration.
//!
//! ```text
//! # comment
//! [source]
//! preset = waveguide
//! [channel]
//! length_km = 1
//! ```
//!
//! Parsing is strict: unknown sections, unknown keys, duplicate keys and
//! unparseable values are all errors. Keys are applied on top of a base
//! configuration chosen by `run.scenario` (or the built-in defaults), then
//! `source.preset`, then every other key in file order. `--set` overrides are
//! appended after the file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bb84::{ProtocolConfig, ReceiverSpec};
use crate::error::{Error, Result};
use crate::keybudget::KeyBudgetPolicy;
use crate::photonics::{MeanPhotonNumber, SymbolRate, Wavelength};
use crate::scenario;
use crate::source::{SourcePreset, SpectralShape};
use crate::table::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RunMode {
    #[default]
    Analytic,
    MonteCarlo,
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(RunMode::Analytic),
            "mc" => Ok(RunMode::MonteCarlo),
            other => Err(Error::config(format!("unknown mode `{other}` (expected analytic | mc)"))),
        }
    }
}

/// A complete, validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub protocol: ProtocolConfig,
    pub policy: KeyBudgetPolicy,
    pub mode: RunMode,
    pub n_symbols: u64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            protocol: ProtocolConfig::default(),
            policy: KeyBudgetPolicy::default(),
            mode: RunMode::Analytic,
            n_symbols: 1_000_000,
            seed: 1,
            output_path: None,
            format: OutputFormat::Text,
        }
    }
}

/// Every accepted `section.key`.
pub const KEYS: &[(&str, &[&str])] = &[
    ("run", &["scenario", "mode", "n_symbols", "seed"]),
    ("output", &["path", "format"]),
    ("source", &["preset", "center_nm", "fwhm_nm", "emitted_dbm", "shape"]),
    ("filter", &["passband_nm", "offset_nm", "excess_loss_db"]),
    ("tx", &["symbol_rate_hz", "target_mu", "modulator_loss_db", "launch_mu"]),
    ("channel", &["length_km", "attenuation_db_per_km", "pmd_ps_per_sqrt_km"]),
    ("encoder", &["visibility", "depol_scale_nm"]),
    (
        "receiver",
        &["preset", "efficiency", "dark_rate_cps", "gate_window_s", "insertion_loss_db", "excess_loss_db"],
    ),
    ("protocol", &["ec_efficiency"]),
    ("policy", &["key_length_bits", "chunk_bytes"]),
];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    section: String,
    key: String,
    value: String,
    origin: String,
}

fn parse_ini(text: &str, origin: &str) -> Result<Vec<Entry>> {
    let mut section: Option<String> = None;
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = format!("{origin}:{}", i + 1);
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::config(format!("{at}: malformed section header `{line}`")))?
                .trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(Error::config(format!("{at}: unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("{at}: expected `key = value`, got `{line}`")))?;
        let section =
            section.clone().ok_or_else(|| Error::config(format!("{at}: key outside of any section")))?;
        let key = key.trim().to_string();
        if entries.iter().any(|e| e.section == section && e.key == key) {
            return Err(Error::config(format!("{at}: duplicate key {section}.{key}")));
        }
        entries.push(Entry { section, key, value: value.trim().to_string(), origin: at });
    }
    Ok(entries)
}

fn parse_override(text: &str) -> Result<Entry> {
    let (path, value) = text
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override `{text}` must look like section.key=value")))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| Error::config(format!("override `{text}` must look like section.key=value")))?;
    Ok(Entry {
        section: section.to_string(),
        key: key.to_string(),
        value: value.trim().to_string(),
        origin: format!("--set {text}"),
    })
}

fn num<T: FromStr>(e: &Entry) -> Result<T> {
    // allow integer keys written as 1e6
    e.value.parse::<T>().or_else(|_| {
        let x: f64 = e.value.parse().map_err(|_| bad(e))?;
        if x.fract() == 0.0 && x >= 0.0 {
            format!("{x:.0}").parse::<T>().map_err(|_| bad(e))
        } else {
            Err(bad(e))
        }
    })
}

fn real(e: &Entry) -> Result<f64> {
    let x: f64 = e.value.parse().map_err(|_| bad(e))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(e))
    }
}

fn bad(e: &Entry) -> Error {
    Error::config(format!("{}: invalid value `{}` for {}.{}", e.origin, e.value, e.section, e.key))
}

impl RunConfig {
    /// Builds a configuration from optional INI text plus `section.key=value`
    /// overrides.
    pub fn load(text: Option<(&str, &str)>, overrides: &[String]) -> Result<Self> {
        let mut entries = match text {
            Some((body, origin)) => parse_ini(body, origin)?,
            None => Vec::new(),
        };
        for o in overrides {
            let e = parse_override(o)?;
            // later overrides replace earlier values of the same key
            entries.retain(|x| !(x.section == e.section && x.key == e.key));
            entries.push(e);
        }
        Self::from_entries(&entries)
    }

    pub fn from_path(path: &Path, overrides: &[String]) -> Result<Self> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::load(Some((&body, &path.display().to_string())), overrides)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::load(Some((text, "<config>")), &[])
    }

    fn from_entries(entries: &[Entry]) -> Result<Self> {
        for e in entries {
            let known = KEYS
                .iter()
                .find(|(s, _)| *s == e.section)
                .ok_or_else(|| Error::config(format!("{}: unknown section [{}]", e.origin, e.section)))?;
            if !known.1.contains(&e.key.as_str()) {
                return Err(Error::config(format!(
                    "{}: unknown key `{}` in [{}] (accepted: {})",
                    e.origin,
                    e.key,
                    e.section,
                    known.1.join(", ")
                )));
            }
        }

        let find = |s: &str, k: &str| entries.iter().find(|e| e.section == s && e.key == k);
        let mut cfg = RunConfig::default();

        if let Some(e) = find("run", "scenario") {
            cfg.protocol = scenario::by_name(&e.value).ok_or_else(|| {
                Error::config(format!(
                    "{}: unknown scenario `{}` (expected {})",
                    e.origin,
                    e.value,
                    scenario::NAMES.join(" | ")
                ))
            })?;
        }
        let mut custom_source = false;
        if let Some(e) = find("source", "preset") {
            if e.value == "custom" {
                custom_source = true;
                cfg.protocol.source.name = "custom".into();
            } else {
                cfg.protocol.source = e.value.parse::<SourcePreset>()?.spec();
            }
        }
        if custom_source {
            for k in ["center_nm", "fwhm_nm", "emitted_dbm"] {
                if find("source", k).is_none() {
                    return Err(Error::config(format!("source preset `custom` requires source.{k}")));
                }
            }
        }
        if let Some(e) = find("receiver", "preset") {
            cfg.protocol.receiver = match e.value.as_str() {
                "default" => ReceiverSpec::default(),
                "qber_bench" => ReceiverSpec::qber_bench(),
                "calibrated_1km" => ReceiverSpec::calibrated_1km(),
                _ => {
                    return Err(Error::config(format!(
                        "{}: unknown receiver preset `{}` (expected default | qber_bench | calibrated_1km)",
                        e.origin, e.value
                    )))
                }
            };
        }

        let RunConfig { protocol: p, policy, mode, n_symbols, seed, output_path, format } = &mut cfg;
        for e in entries {
            match (e.section.as_str(), e.key.as_str()) {
                ("run", "scenario") | ("source", "preset") | ("receiver", "preset") => {}
                ("run", "mode") => *mode = e.value.parse()?,
                ("run", "n_symbols") => *n_symbols = num(e)?,
                ("run", "seed") => *seed = num(e)?,
                ("output", "path") => *output_path = Some(PathBuf::from(&e.value)),
                ("output", "format") => *format = e.value.parse()?,
                ("source", "center_nm") => p.source.center = Wavelength::from_nm(real(e)?)?,
                ("source", "fwhm_nm") => p.source.fwhm_nm = real(e)?,
                ("source", "emitted_dbm") => p.source.emitted_power_dbm = real(e)?,
                ("source", "shape") => p.source.shape = e.value.parse::<SpectralShape>()?,
                ("filter", "passband_nm") => p.filter.passband_nm = real(e)?,
                ("filter", "offset_nm") => p.filter.center_offset_nm = real(e)?,
                ("filter", "excess_loss_db") => p.filter.excess_loss_db = real(e)?,
                ("tx", "symbol_rate_hz") => p.tx.symbol_rate = SymbolRate::new(real(e)?)?,
                ("tx", "target_mu") => p.tx.target_mu = MeanPhotonNumber::new(real(e)?)?,
                ("tx", "modulator_loss_db") => p.tx.modulator_loss_db = real(e)?,
                ("tx", "launch_mu") => p.launch_mu = Some(MeanPhotonNumber::new(real(e)?)?),
                ("channel", "length_km") => p.fiber.length_km = real(e)?,
                ("channel", "attenuation_db_per_km") => p.fiber.attenuation_db_per_km = real(e)?,
                ("channel", "pmd_ps_per_sqrt_km") => p.fiber.pmd_ps_per_sqrt_km = real(e)?,
                ("encoder", "visibility") => p.encoder.visibility = real(e)?,
                ("encoder", "depol_scale_nm") => p.encoder.depol_scale_nm = real(e)?,
                ("receiver", "efficiency") => p.receiver.efficiency = real(e)?,
                ("receiver", "dark_rate_cps") => p.receiver.dark_rate_cps = real(e)?,
                ("receiver", "gate_window_s") => {
                    p.receiver.gate_window_s = match e.value.as_str() {
                        "auto" => None,
                        _ => Some(real(e)?),
                    }
                }
                ("receiver", "insertion_loss_db") => p.receiver.insertion_loss_db = real(e)?,
                ("receiver", "excess_loss_db") => p.receiver.excess_loss_db = real(e)?,
                ("protocol", "ec_efficiency") => p.ec_efficiency = real(e)?,
                ("policy", "key_length_bits") => policy.key_length_bits = real(e)?,
                ("policy", "chunk_bytes") => policy.chunk_bytes = real(e)?,
                (s, k) => unreachable!("key {s}.{k} passed the whitelist"),
            }
        }

        cfg.protocol.validate()?;
        cfg.policy.validate()?;
        Ok(cfg)
    }
}
