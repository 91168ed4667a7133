//! Calibrated reference links.
//!
//! Two constants anchor the model to measured endpoints. Both are outputs of
//! the calibration routines in this crate and are re-derived in the tests.

use crate::bb84::{ProtocolConfig, ReceiverSpec};
use crate::channel::{EncoderSpec, FiberSpec};
use crate::source::{FilterSpec, SourcePreset, TxSpec};

/// Encoder depolarization scale (nm) that gives 11 % optical QBER for the
/// die-level emitter filtered to 2 nm over 1 km of fiber, visibility 0.99.
pub const DIE_LEVEL_DEPOL_SCALE_NM: f64 = 4.113_550_785;

/// Receiver excess loss (dB) that yields 0.37 kb/s secret key per detector
/// for the waveguide emitter, 2 nm filter, 1 km, default encoder, and the
/// low-noise receiver.
pub const WAVEGUIDE_RX_EXCESS_LOSS_DB: f64 = 22.235_541_54;

/// Die-level emitter behind an encoder calibrated to the 11 %-at-2-nm point,
/// read out by the low-noise bench receiver.
pub fn die_level_linewidth() -> ProtocolConfig {
    ProtocolConfig {
        source: SourcePreset::DieLevel.spec(),
        filter: FilterSpec::centered(2.0),
        tx: TxSpec::default(),
        fiber: FiberSpec::default(),
        encoder: EncoderSpec { visibility: 0.99, depol_scale_nm: DIE_LEVEL_DEPOL_SCALE_NM },
        receiver: ReceiverSpec::qber_bench(),
        ec_efficiency: 1.0,
        launch_mu: None,
    }
}

/// Waveguide emitter, 2 nm filter, 1 km, calibrated receiver.
pub fn waveguide_1km() -> ProtocolConfig {
    ProtocolConfig {
        source: SourcePreset::Waveguide.spec(),
        filter: FilterSpec::centered(2.0),
        tx: TxSpec::default(),
        fiber: FiberSpec::default(),
        encoder: EncoderSpec::default(),
        receiver: ReceiverSpec::calibrated_1km(),
        ec_efficiency: 1.0,
        launch_mu: None,
    }
}

/// Named lookup used by the config layer.
pub fn by_name(name: &str) -> Option<ProtocolConfig> {
    match name {
        "die_level_linewidth" => Some(die_level_linewidth()),
        "waveguide_1km" => Some(waveguide_1km()),
        _ => None,
    }
}

pub const NAMES: [&str; 2] = ["die_level_linewidth", "waveguide_1km"];
