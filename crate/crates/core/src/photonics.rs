//! Photon-level arithmetic: photon energy, dBm/watt views, Poisson photon
//! statistics and the binary entropy function.
//!
//! Decibel quantities use base-10 logarithms, entropies use base 2.

use crate::error::{Error, Result};

/// Planck constant in J·s (exact, SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum in m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Power-ratio to decibels.
pub fn ratio_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Decibels to power ratio.
pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Vacuum wavelength in nanometres.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn from_nm(nm: f64) -> Result<Self> {
        if nm.is_finite() && nm > 0.0 {
            Ok(Wavelength(nm))
        } else {
            Err(Error::domain(format!("wavelength must be positive, got {nm} nm")))
        }
    }

    pub fn nm(self) -> f64 {
        self.0
    }

    pub fn meters(self) -> f64 {
        self.0 * 1e-9
    }
}

/// Optical power. Watts are canonical; dBm is a view that exists only for
/// strictly positive power.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OpticalPower(f64);

impl OpticalPower {
    pub const ZERO: OpticalPower = OpticalPower(0.0);

    pub fn from_watts(watts: f64) -> Result<Self> {
        if watts.is_finite() && watts >= 0.0 {
            Ok(OpticalPower(watts))
        } else {
            Err(Error::domain(format!("optical power must be non-negative, got {watts} W")))
        }
    }

    pub fn from_dbm(dbm: f64) -> Result<Self> {
        if !dbm.is_finite() {
            return Err(Error::domain(format!("dBm value must be finite, got {dbm}")));
        }
        Ok(OpticalPower(1e-3 * db_to_ratio(dbm)))
    }

    pub fn watts(self) -> f64 {
        self.0
    }

    pub fn dbm(self) -> Result<f64> {
        if self.0 > 0.0 {
            Ok(ratio_to_db(self.0 / 1e-3))
        } else {
            Err(Error::domain("dBm is undefined for zero optical power"))
        }
    }
}

/// Mean photon number per symbol of a Poissonian source.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MeanPhotonNumber(f64);

impl MeanPhotonNumber {
    pub const ZERO: MeanPhotonNumber = MeanPhotonNumber(0.0);

    pub fn new(mu: f64) -> Result<Self> {
        if mu.is_finite() && mu >= 0.0 {
            Ok(MeanPhotonNumber(mu))
        } else {
            Err(Error::domain(format!("mean photon number must be non-negative, got {mu}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Scales by a linear transmittance in [0, 1].
    pub fn attenuate(self, transmittance: f64) -> Self {
        MeanPhotonNumber((self.0 * transmittance).max(0.0))
    }
}

/// Transmitter symbol rate in symbols per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SymbolRate(f64);

impl SymbolRate {
    pub fn new(hz: f64) -> Result<Self> {
        if hz.is_finite() && hz > 0.0 {
            Ok(SymbolRate(hz))
        } else {
            Err(Error::domain(format!("symbol rate must be positive, got {hz}")))
        }
    }

    pub fn hz(self) -> f64 {
        self.0
    }
}

/// Energy of a single photon, E = h·c/λ, in joules.
pub fn photon_energy(lambda: Wavelength) -> f64 {
    PLANCK * SPEED_OF_LIGHT / lambda.meters()
}

/// Power of one photon per second, in dBm.
pub fn single_photon_power_dbm(lambda: Wavelength) -> f64 {
    ratio_to_db(photon_energy(lambda) / 1e-3)
}

/// Nominal transmitter launch power split into its three additive terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchPower {
    pub single_photon_dbm: f64,
    pub rate_term_db: f64,
    pub poisson_term_db: f64,
}

impl LaunchPower {
    pub fn dbm(&self) -> f64 {
        self.single_photon_dbm + self.rate_term_db + self.poisson_term_db
    }
}

/// Launch power needed to emit `mu` photons per symbol at `rate`.
pub fn launch_power_dbm(lambda: Wavelength, rate: SymbolRate, mu: MeanPhotonNumber) -> Result<LaunchPower> {
    if mu.value() <= 0.0 {
        return Err(Error::domain("launch power in dBm requires mu > 0"));
    }
    Ok(LaunchPower {
        single_photon_dbm: single_photon_power_dbm(lambda),
        rate_term_db: ratio_to_db(rate.hz()),
        poisson_term_db: ratio_to_db(mu.value()),
    })
}

/// Photons per symbol carried by `power` at the given symbol rate.
pub fn mean_photon_number(power: OpticalPower, rate: SymbolRate, lambda: Wavelength) -> MeanPhotonNumber {
    MeanPhotonNumber(power.watts() / (rate.hz() * photon_energy(lambda)))
}

/// P(N = n) for N ~ Poisson(mu).
pub fn poisson_pmf(n: u32, mu: MeanPhotonNumber) -> f64 {
    let mu = mu.value();
    if mu == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let n = f64::from(n);
    (-mu + n * mu.ln() - libm::lgamma(n + 1.0)).exp()
}

/// P(N ≥ 2) = 1 − e^(−μ)(1 + μ), evaluated without cancellation at small μ.
pub fn multiphoton_probability(mu: MeanPhotonNumber) -> f64 {
    let mu = mu.value();
    (-(-mu).exp_m1() - mu * (-mu).exp()).max(0.0)
}

/// Headroom of `actual` over `target` in dB.
pub fn margin_db(actual: MeanPhotonNumber, target: MeanPhotonNumber) -> Result<f64> {
    if actual.value() <= 0.0 || target.value() <= 0.0 {
        return Err(Error::domain("margin requires strictly positive photon numbers"));
    }
    Ok(ratio_to_db(actual.value() / target.value()))
}

/// Binary Shannon entropy h2(p) in bits, with h2(0) = h2(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability must lie in [0, 1], got {p}")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nm(x: f64) -> Wavelength {
        Wavelength::from_nm(x).unwrap()
    }

    fn mu(x: f64) -> MeanPhotonNumber {
        MeanPhotonNumber::new(x).unwrap()
    }

    fn ghz() -> SymbolRate {
        SymbolRate::new(1e9).unwrap()
    }

    #[test]
    fn photon_energy_values() {
        // h·c/λ evaluated by hand: 1.98644586e-25 J·m / λ
        assert!((photon_energy(nm(1550.0)) / 1.2816e-19 - 1.0).abs() < 1e-4);
        assert!((photon_energy(nm(1586.0)) / 1.2525e-19 - 1.0).abs() < 1e-4);
        let ratio = photon_energy(nm(775.0)) / photon_energy(nm(1550.0));
        assert!((ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_wavelength_rejected() {
        assert!(Wavelength::from_nm(0.0).is_err());
        assert!(Wavelength::from_nm(-1550.0).is_err());
        assert!(Wavelength::from_nm(f64::NAN).is_err());
    }

    #[test]
    fn single_photon_rows() {
        assert!((single_photon_power_dbm(nm(1586.0)) + 159.0).abs() < 0.1);
        assert!((single_photon_power_dbm(nm(1549.0)) + 158.9).abs() < 0.1);
        assert!((single_photon_power_dbm(nm(1550.0)) + 158.92).abs() < 0.05);
    }

    #[test]
    fn launch_power_rows() {
        let die = launch_power_dbm(nm(1586.0), ghz(), mu(0.1)).unwrap();
        assert!((die.dbm() + 79.0).abs() < 0.1);
        assert_eq!(die.rate_term_db, 90.0);
        assert!((die.poisson_term_db + 10.0).abs() < 1e-12);
        let wg = launch_power_dbm(nm(1549.0), ghz(), mu(0.1)).unwrap();
        assert!((wg.dbm() + 78.9).abs() < 0.1);
        assert!(launch_power_dbm(nm(1549.0), ghz(), MeanPhotonNumber::ZERO).is_err());
    }

    #[test]
    fn equivalent_mu_from_emitted_power() {
        let p = OpticalPower::from_dbm(-76.5).unwrap();
        assert!((mean_photon_number(p, ghz(), nm(1586.0)).value() - 0.18).abs() < 0.005);
        let p = OpticalPower::from_dbm(-74.9).unwrap();
        assert!((mean_photon_number(p, ghz(), nm(1549.0)).value() - 0.25).abs() < 0.005);
        assert_eq!(mean_photon_number(OpticalPower::ZERO, ghz(), nm(1549.0)).value(), 0.0);
    }

    #[test]
    fn picowatt_powers_are_near_table_dbm() {
        // 23 pW and 34 pW are rounded device readings; the dBm rows are authoritative
        let die = OpticalPower::from_watts(23e-12).unwrap().dbm().unwrap();
        let wg = OpticalPower::from_watts(34e-12).unwrap().dbm().unwrap();
        assert!((die + 76.5).abs() < 0.2);
        assert!((wg + 74.9).abs() < 0.25);
    }

    #[test]
    fn zero_power_has_no_dbm() {
        assert!(OpticalPower::ZERO.dbm().is_err());
        assert!(OpticalPower::from_watts(-1.0).is_err());
    }

    #[test]
    fn poisson_values() {
        assert!((poisson_pmf(0, mu(0.1)) - 0.904_837).abs() < 1e-6);
        assert_eq!(poisson_pmf(1, mu(0.0)), 0.0);
        assert_eq!(poisson_pmf(0, mu(0.0)), 1.0);
        assert!((poisson_pmf(2, mu(1.0)) - 0.183_940).abs() < 1e-6);
    }

    #[test]
    fn multiphoton_values() {
        assert!((multiphoton_probability(mu(0.1)) - 0.004_679).abs() < 1e-6);
        assert_eq!(multiphoton_probability(mu(0.0)), 0.0);
    }

    #[test]
    fn margin_values() {
        assert!((margin_db(mu(0.18), mu(0.1)).unwrap() - 2.5).abs() < 0.1);
        assert!((margin_db(mu(0.0039), mu(0.1)).unwrap() + 14.1).abs() < 0.1);
        assert_eq!(margin_db(mu(0.3), mu(0.3)).unwrap(), 0.0);
        assert!(margin_db(mu(0.0), mu(0.1)).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!((binary_entropy(0.11).unwrap() - 0.49999).abs() < 1e-4);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn entropy_threshold_by_bisection() {
        let f = |q: f64| 1.0 - 2.0 * binary_entropy(q).unwrap();
        let (mut lo, mut hi) = (1e-9, 0.5 - 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 0.1100).abs() < 5e-4, "zero at {lo}");
    }

    proptest! {
        #[test]
        fn dbm_round_trip(exp in -20.0f64..0.0, mant in 1.0f64..10.0) {
            let w = mant * 10f64.powf(exp);
            let p = OpticalPower::from_watts(w).unwrap();
            let back = OpticalPower::from_dbm(p.dbm().unwrap()).unwrap().watts();
            prop_assert!(((back - w) / w).abs() < 1e-12);
        }

        #[test]
        fn launch_decomposition_and_inverse(
            lambda in 1000.0f64..2000.0,
            rate in 1e6f64..1e11,
            m in 1e-6f64..10.0,
        ) {
            let (l, r, m) = (nm(lambda), SymbolRate::new(rate).unwrap(), mu(m));
            let lp = launch_power_dbm(l, r, m).unwrap();
            let extra = lp.dbm() - single_photon_power_dbm(l);
            prop_assert!((extra - (ratio_to_db(rate) + ratio_to_db(m.value()))).abs() < 1e-9);
            let p = OpticalPower::from_dbm(lp.dbm()).unwrap();
            let back = mean_photon_number(p, r, l).value();
            prop_assert!((back / m.value() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn poisson_normalised(m in 0.0f64..5.0) {
            let total: f64 = (0..=50).map(|n| poisson_pmf(n, mu(m))).sum();
            prop_assert!((1.0 - 1e-12..=1.0 + 1e-12).contains(&total), "sum {}", total);
        }

        #[test]
        fn multiphoton_matches_pmf(m in 0.0f64..5.0) {
            let direct = 1.0 - poisson_pmf(0, mu(m)) - poisson_pmf(1, mu(m));
            prop_assert!((multiphoton_probability(mu(m)) - direct).abs() < 1e-14);
        }

        #[test]
        fn multiphoton_monotone(a in 0.0f64..5.0, b in 0.0f64..5.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(multiphoton_probability(mu(lo)) <= multiphoton_probability(mu(hi)));
        }

        #[test]
        fn entropy_symmetric(p in 0.0f64..=1.0) {
            let a = binary_entropy(p).unwrap();
            let b = binary_entropy(1.0 - p).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn entropy_concave(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
            let mid = binary_entropy(0.5 * (p + q)).unwrap();
            let avg = 0.5 * (binary_entropy(p).unwrap() + binary_entropy(q).unwrap());
            prop_assert!(mid >= avg - 1e-12);
        }
    }
}
