//! Symbol-level Monte Carlo of the BB84 link.
//!
//! Symbols are split into fixed-size batches. Batch `k` draws from a
//! ChaCha8 stream seeded with `seed` and stream id `k`, so the tallies depend
//! only on `(config, n_symbols, seed)` and not on how many threads run the
//! batches.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use rayon::prelude::*;

use super::{Counts, ProtocolConfig, ProtocolResult, QberBreakdown};
use crate::error::{Error, Result};

/// Symbols per RNG stream.
pub const BATCH_SYMBOLS: u64 = 1 << 16;

/// Per-run constants shared by every batch.
struct Link {
    photons: Option<Poisson<f64>>,
    survive: Bernoulli,
    flip: Bernoulli,
    dark: Bernoulli,
}

pub fn simulate_mc(config: &ProtocolConfig, n_symbols: u64, seed: u64) -> Result<ProtocolResult> {
    config.validate()?;
    if n_symbols == 0 {
        return Err(Error::domain("n_symbols must be at least 1"));
    }
    let mu = config.modulator_mu().value();
    let bernoulli = |p: f64| Bernoulli::new(p.clamp(0.0, 1.0)).expect("clamped probability");
    let link = Link {
        photons: if mu > 0.0 {
            Some(Poisson::new(mu).map_err(|e| Error::domain(format!("poisson mean {mu}: {e}")))?)
        } else {
            None
        },
        survive: bernoulli(config.detection_transmittance()),
        flip: bernoulli(config.optical_qber()?),
        dark: bernoulli(config.dark_probability()),
    };

    let batches = n_symbols.div_ceil(BATCH_SYMBOLS);
    let counts = (0..batches)
        .into_par_iter()
        .map(|k| {
            let len = BATCH_SYMBOLS.min(n_symbols - k * BATCH_SYMBOLS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            run_batch(&link, len, &mut rng)
        })
        .reduce(Counts::default, |a, b| a + b);

    let scale = config.tx.symbol_rate.hz() / n_symbols as f64;
    let breakdown = if counts.sifted > 0 {
        let sifted = counts.sifted as f64;
        QberBreakdown {
            optical: (counts.errors - counts.dark_errors) as f64 / sifted,
            dark: counts.dark_errors as f64 / sifted,
        }
    } else {
        QberBreakdown::default()
    };
    Ok(ProtocolResult::from_rates(
        counts.sifted as f64 * scale,
        breakdown,
        config.ec_efficiency,
        Some(counts),
    ))
}

// Detector index = basis * 2 + bit.
fn run_batch(link: &Link, len: u64, rng: &mut ChaCha8Rng) -> Counts {
    let mut c = Counts { symbols: len, ..Counts::default() };
    for _ in 0..len {
        let alice: u32 = rng.random();
        let bit = alice & 1;
        let basis = (alice >> 1) & 1;

        let mut signal_mask = 0u8;
        let n = link.photons.as_ref().map_or(0, |p| p.sample(rng) as u64);
        for _ in 0..n {
            if !link.survive.sample(rng) {
                continue;
            }
            let route: u32 = rng.random();
            let bob_basis = route & 1;
            let outcome =
                if bob_basis == basis { bit ^ u32::from(link.flip.sample(rng)) } else { (route >> 1) & 1 };
            signal_mask |= 1 << (bob_basis * 2 + outcome);
        }

        let mut fired = signal_mask;
        for det in 0..4 {
            if link.dark.sample(rng) {
                fired |= 1 << det;
            }
        }
        if fired == 0 {
            continue;
        }
        c.clicks += 1;

        let detector = if fired.count_ones() > 1 {
            c.double_clicks += 1;
            let pick = rng.random_range(0..fired.count_ones());
            nth_set_bit(fired, pick)
        } else {
            fired.trailing_zeros()
        };

        if detector >> 1 != basis {
            continue;
        }
        c.sifted += 1;
        if detector & 1 != bit {
            c.errors += 1;
            if signal_mask & (1 << detector) == 0 {
                c.dark_errors += 1;
            }
        }
    }
    c
}

fn nth_set_bit(mut mask: u8, n: u32) -> u32 {
    for _ in 0..n {
        mask &= mask - 1;
    }
    mask.trailing_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bb84::{analytic_rates, ReceiverSpec};
    use crate::photonics::MeanPhotonNumber;

    #[test]
    fn deterministic() {
        let cfg = ProtocolConfig { launch_mu: MeanPhotonNumber::new(0.1).ok(), ..Default::default() };
        let a = simulate_mc(&cfg, 200_000, 7).unwrap();
        let b = simulate_mc(&cfg, 200_000, 7).unwrap();
        assert_eq!(a, b);
        let c = simulate_mc(&cfg, 200_000, 8).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn independent_of_thread_count() {
        let cfg = ProtocolConfig { launch_mu: MeanPhotonNumber::new(0.2).ok(), ..Default::default() };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| simulate_mc(&cfg, 300_001, 3).unwrap());
        let b = four.install(|| simulate_mc(&cfg, 300_001, 3).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn silent_link() {
        let cfg = ProtocolConfig {
            launch_mu: Some(MeanPhotonNumber::ZERO),
            receiver: ReceiverSpec { dark_rate_cps: 0.0, ..Default::default() },
            ..Default::default()
        };
        let r = simulate_mc(&cfg, 100_000, 1).unwrap();
        let c = r.counts.unwrap();
        assert_eq!(c.clicks, 0);
        assert_eq!(c.sifted, 0);
        assert_eq!(r.sifted_rate, 0.0);
    }

    #[test]
    fn dark_counts_only() {
        let cfg = ProtocolConfig {
            launch_mu: Some(MeanPhotonNumber::ZERO),
            receiver: ReceiverSpec { dark_rate_cps: 1e6, ..Default::default() },
            ..Default::default()
        };
        let r = simulate_mc(&cfg, 1_000_000, 11).unwrap();
        let c = r.counts.unwrap();
        let sigma = (0.25 / c.sifted as f64).sqrt();
        let raw = c.errors as f64 / c.sifted as f64;
        assert!((raw - 0.5).abs() < 5.0 * sigma, "qber {raw} over {} sifted", c.sifted);
        assert_eq!(c.dark_errors, c.errors);
    }

    #[test]
    fn zero_symbols_rejected() {
        assert!(simulate_mc(&ProtocolConfig::default(), 0, 1).is_err());
    }

    #[test]
    fn bright_link_close_to_analytic() {
        let cfg = ProtocolConfig {
            launch_mu: MeanPhotonNumber::new(0.3).ok(),
            fiber: crate::channel::FiberSpec::default().with_length(0.0),
            ..Default::default()
        };
        let n = 1_000_000;
        let mc = simulate_mc(&cfg, n, 5).unwrap();
        let an = analytic_rates(&cfg).unwrap();
        let p = an.sifted_rate / cfg.tx.symbol_rate.hz();
        let sifted = mc.counts.unwrap().sifted as f64;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((sifted - n as f64 * p).abs() < 5.0 * sigma);
        let qsig = (an.qber * (1.0 - an.qber) / sifted).sqrt();
        assert!((mc.qber - an.qber).abs() < 5.0 * qsig);
    }

    #[test]
    fn nth_bit() {
        assert_eq!(nth_set_bit(0b1010, 0), 1);
        assert_eq!(nth_set_bit(0b1010, 1), 3);
        assert_eq!(nth_set_bit(0b1111, 2), 2);
    }
}
