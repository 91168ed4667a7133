//! Key-renewal arithmetic: how much classical traffic a secret-key rate can
//! protect when every fixed-size data chunk is encrypted under a fresh key.

use crate::error::{Error, Result};

/// One key of `key_length_bits` per `chunk_bytes` of encrypted data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyBudgetPolicy {
    pub key_length_bits: f64,
    pub chunk_bytes: f64,
}

impl Default for KeyBudgetPolicy {
    /// 256-bit AES keys renewed every 64 GB (decimal).
    fn default() -> Self {
        KeyBudgetPolicy { key_length_bits: 256.0, chunk_bytes: 64e9 }
    }
}

impl KeyBudgetPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.key_length_bits.is_finite() && self.key_length_bits > 0.0) {
            return Err(Error::config("key length must be positive"));
        }
        if !(self.chunk_bytes.is_finite() && self.chunk_bytes > 0.0) {
            return Err(Error::config("chunk size must be positive"));
        }
        Ok(())
    }

    fn chunk_bits(&self) -> f64 {
        self.chunk_bytes * 8.0
    }

    /// Fresh keys per second supplied by `skr_bps`.
    pub fn keys_per_second(&self, skr_bps: f64) -> f64 {
        skr_bps / self.key_length_bits
    }
}

/// Classical bit rate protectable by a secret-key rate.
pub fn securable_capacity(skr_bps: f64, policy: &KeyBudgetPolicy) -> Result<f64> {
    policy.validate()?;
    if !(skr_bps.is_finite() && skr_bps >= 0.0) {
        return Err(Error::domain(format!("secret-key rate must be >= 0, got {skr_bps}")));
    }
    Ok(policy.keys_per_second(skr_bps) * policy.chunk_bits())
}

/// Secret-key rate needed to protect `capacity_bps`.
pub fn required_skr(capacity_bps: f64, policy: &KeyBudgetPolicy) -> Result<f64> {
    policy.validate()?;
    if !(capacity_bps.is_finite() && capacity_bps >= 0.0) {
        return Err(Error::domain(format!("capacity must be >= 0, got {capacity_bps}")));
    }
    Ok(capacity_bps / policy.chunk_bits() * policy.key_length_bits)
}
