//! Dimensional physics: the gravitational coupling `xi`, wash-out times and
//! validity checks.
//!
//! This is the only module that works in SI units. Every other module uses
//! momenta in units of the packet width `sigma` and lengths in units of
//! `1/sigma`.

use alloc::format;

use crate::{Error, Result};

/// Physical constants used to restore dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Newton's constant, m^3 kg^-1 s^-2.
    pub g_newton: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Speed of light, m s^-1.
    pub c: f64,
}

/// CODATA 2018 recommended values.
///
/// | constant | value | relative uncertainty |
/// |---|---|---|
/// | G | 6.674 30e-11 m^3 kg^-1 s^-2 | 2.2e-5 |
/// | hbar | 1.054 571 817e-34 J s | exact |
/// | c | 299 792 458 m/s | exact |
pub const CODATA_2018: Constants = Constants {
    g_newton: 6.674_30e-11,
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
};

impl Default for Constants {
    fn default() -> Self {
        CODATA_2018
    }
}

/// Default ratio above which "much larger than one" is considered satisfied.
pub const DEFAULT_REGIME_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// Static particle whose rest energy dominates its momentum spread.
    MassiveStatic { mass_kg: f64 },
    /// Massless particle whose central wave number dominates the spread.
    MasslessHighMomentum { k0_per_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScales {
    regime: Regime,
    sigma_per_m: f64,
    constants: Constants,
    regime_threshold: f64,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

impl PhysicalScales {
    pub fn massive(mass_kg: f64, sigma_per_m: f64) -> Result<Self> {
        Ok(PhysicalScales {
            regime: Regime::MassiveStatic { mass_kg: positive("mass", mass_kg)? },
            sigma_per_m: positive("sigma", sigma_per_m)?,
            constants: CODATA_2018,
            regime_threshold: DEFAULT_REGIME_THRESHOLD,
        })
    }

    pub fn massless(k0_per_m: f64, sigma_per_m: f64) -> Result<Self> {
        Ok(PhysicalScales {
            regime: Regime::MasslessHighMomentum { k0_per_m: positive("k0", k0_per_m)? },
            sigma_per_m: positive("sigma", sigma_per_m)?,
            constants: CODATA_2018,
            regime_threshold: DEFAULT_REGIME_THRESHOLD,
        })
    }

    /// Massless particle specified by angular frequency `omega0` (rad/s)
    /// and a frequency spread `sigma_c = sigma * c` (1/s).
    pub fn massless_from_frequency(omega0: f64, sigma_c: f64) -> Result<Self> {
        let c = CODATA_2018.c;
        Self::massless(positive("omega0", omega0)? / c, positive("sigma_c", sigma_c)? / c)
    }

    /// Replaces the constants table. `g_newton = 0` is accepted and switches
    /// gravity off; `hbar` and `c` must stay positive.
    pub fn with_constants(mut self, constants: Constants) -> Result<Self> {
        if !(constants.g_newton.is_finite() && constants.g_newton >= 0.0) {
            return Err(Error::param("g_newton", "must be finite and non-negative"));
        }
        positive("hbar", constants.hbar)?;
        positive("c", constants.c)?;
        self.constants = constants;
        Ok(self)
    }

    pub fn with_regime_threshold(mut self, threshold: f64) -> Result<Self> {
        self.regime_threshold = positive("regime_threshold", threshold)?;
        Ok(self)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_per_m
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn regime_threshold(&self) -> f64 {
        self.regime_threshold
    }

    /// Characteristic energy: `m c^2` or `hbar k0 c`.
    pub fn energy(&self) -> f64 {
        let Constants { hbar, c, .. } = self.constants;
        match self.regime {
            Regime::MassiveStatic { mass_kg } => mass_kg * c * c,
            Regime::MasslessHighMomentum { k0_per_m } => hbar * k0_per_m * c,
        }
    }

    /// "Size" of the particle, `2 / sigma`, in meters.
    pub fn particle_size(&self) -> f64 {
        2.0 / self.sigma_per_m
    }

    /// `2 G m / c^2`; only defined for the massive regime.
    pub fn schwarzschild_radius(&self) -> Option<f64> {
        let Constants { g_newton, c, .. } = self.constants;
        match self.regime {
            Regime::MassiveStatic { mass_kg } => Some(2.0 * g_newton * mass_kg / (c * c)),
            Regime::MasslessHighMomentum { .. } => None,
        }
    }

    /// How far the regime's "much larger than one" ratio is satisfied:
    /// `m c / (hbar sigma)` or `k0 / sigma`.
    pub fn regime_ratio(&self) -> f64 {
        let Constants { hbar, c, .. } = self.constants;
        match self.regime {
            Regime::MassiveStatic { mass_kg } => mass_kg * c / (hbar * self.sigma_per_m),
            Regime::MasslessHighMomentum { k0_per_m } => k0_per_m / self.sigma_per_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    pub xi: f64,
    pub e0_joules: f64,
    pub tau_s: f64,
    pub schwarzschild_radius_m: Option<f64>,
    pub particle_size_m: f64,
}

/// `xi = G E0 sigma / c^4`.
pub fn control_parameter(scales: &PhysicalScales) -> f64 {
    let Constants { g_newton, c, .. } = scales.constants;
    let c2 = c * c;
    g_newton * scales.energy() * scales.sigma_per_m / (c2 * c2)
}

/// Time after which the curvature contributions have washed out:
/// `m / (sigma^2 hbar)` for massive particles, `1 / (sigma c)` for massless.
pub fn decoherence_time(scales: &PhysicalScales) -> f64 {
    let Constants { hbar, c, .. } = scales.constants;
    let sigma = scales.sigma_per_m;
    match scales.regime {
        Regime::MassiveStatic { mass_kg } => mass_kg / (sigma * sigma * hbar),
        Regime::MasslessHighMomentum { .. } => 1.0 / (sigma * c),
    }
}

pub fn derived_scales(scales: &PhysicalScales) -> DerivedScales {
    DerivedScales {
        xi: control_parameter(scales),
        e0_joules: scales.energy(),
        tau_s: decoherence_time(scales),
        schwarzschild_radius_m: scales.schwarzschild_radius(),
        particle_size_m: scales.particle_size(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    pub xi: f64,
    pub tau_s: f64,
    pub schwarzschild_radius_m: Option<f64>,
    pub particle_size_m: f64,
    /// `r_S / (2/sigma)`; equals `xi` in the massive regime.
    pub schwarzschild_over_size: Option<f64>,
    pub regime_ratio: f64,
    pub regime_threshold: f64,
    pub regime_ok: bool,
    /// False when G = 0: there is no dynamical gravity and every effect vanishes.
    pub dynamical_gravity: bool,
    pub perturbative_ok: bool,
}

pub fn validity_report(scales: &PhysicalScales) -> ValidityReport {
    let d = derived_scales(scales);
    let rs_over_size = d.schwarzschild_radius_m.map(|rs| rs / d.particle_size_m);
    let regime_ratio = scales.regime_ratio();
    let below_horizon = rs_over_size.is_none_or(|r| r < 1.0);
    ValidityReport {
        xi: d.xi,
        tau_s: d.tau_s,
        schwarzschild_radius_m: d.schwarzschild_radius_m,
        particle_size_m: d.particle_size_m,
        schwarzschild_over_size: rs_over_size,
        regime_ratio,
        regime_threshold: scales.regime_threshold,
        regime_ok: regime_ratio >= scales.regime_threshold,
        dynamical_gravity: scales.constants.g_newton > 0.0,
        perturbative_ok: d.xi < 1.0 && below_horizon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn massive_benchmark() -> PhysicalScales {
        PhysicalScales::massive(1e-21, 1e22).unwrap()
    }

    #[test]
    fn massive_xi_order_of_magnitude() {
        let xi = control_parameter(&massive_benchmark());
        assert!((1e-27..=1e-25).contains(&xi), "xi = {xi:e}");
    }

    #[test]
    fn massless_xi_order_of_magnitude() {
        let s = PhysicalScales::massless_from_frequency(1e14, 1e9).unwrap();
        let xi = control_parameter(&s);
        assert!((1e-64..=1e-62).contains(&xi), "xi = {xi:e}");
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(PhysicalScales::massive(0.0, 1e22).is_err());
        assert!(PhysicalScales::massive(-1.0, 1e22).is_err());
        assert!(PhysicalScales::massive(1e-21, 0.0).is_err());
        assert!(PhysicalScales::massless(0.0, 1.0).is_err());
        assert!(PhysicalScales::massless(1.0, f64::NAN).is_err());
    }

    #[test]
    fn massive_decoherence_time() {
        let tau = decoherence_time(&massive_benchmark());
        // m / (sigma^2 hbar) with CODATA hbar
        let expected = 1e-21 / (1e44 * 1.054_571_817e-34);
        assert!((tau - expected).abs() / expected < 1e-14);
        assert!((tau - 9.48e-32).abs() < 0.01e-32);
    }

    #[test]
    fn massless_decoherence_time() {
        let s = PhysicalScales::massless(1e30, 1e22).unwrap();
        let tau = decoherence_time(&s);
        assert!((tau - 3.3356e-31).abs() < 1e-35);
    }

    #[test]
    fn doubling_sigma_quarters_massive_tau() {
        let a = decoherence_time(&PhysicalScales::massive(1e-21, 1e22).unwrap());
        let b = decoherence_time(&PhysicalScales::massive(1e-21, 2e22).unwrap());
        assert!((a / b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn xi_is_linear_in_energy_and_sigma() {
        let base = control_parameter(&PhysicalScales::massive(1e-21, 1e22).unwrap());
        let m2 = control_parameter(&PhysicalScales::massive(2e-21, 1e22).unwrap());
        let s2 = control_parameter(&PhysicalScales::massive(1e-21, 2e22).unwrap());
        assert!((m2 / base - 2.0).abs() < 1e-12);
        assert!((s2 / base - 2.0).abs() < 1e-12);
        let k = control_parameter(&PhysicalScales::massless(1e6, 3.0).unwrap());
        let k2 = control_parameter(&PhysicalScales::massless(2e6, 3.0).unwrap());
        assert!((k2 / k - 2.0).abs() < 1e-12);
    }

    #[test]
    fn xi_equals_schwarzschild_ratio() {
        for &(m, s) in &[(1e-21, 1e22), (1.0, 1.0), (3.7e-5, 2.2e9)] {
            let sc = PhysicalScales::massive(m, s).unwrap();
            let xi = control_parameter(&sc);
            let ratio = sc.schwarzschild_radius().unwrap() / sc.particle_size();
            assert!((xi - ratio).abs() <= 1e-12 * xi, "{xi:e} vs {ratio:e}");
        }
    }

    #[test]
    fn benchmark_is_perturbative() {
        let r = validity_report(&massive_benchmark());
        assert!(r.perturbative_ok);
        // m c / (hbar sigma) is only about 0.28 for these numbers
        assert!(!r.regime_ok);
        assert!((r.regime_ratio - 0.2843).abs() < 1e-3);
        assert!(r.dynamical_gravity);
        assert!(r.xi > 1e-27 && r.xi < 1e-25);
    }

    #[test]
    fn horizon_sized_particle_is_not_perturbative() {
        // r_S = 2/sigma  <=>  m = c^2 / (G sigma)
        let sigma = 1e3;
        let c = CODATA_2018;
        let m = c.c * c.c / (c.g_newton * sigma);
        let r = validity_report(&PhysicalScales::massive(m, sigma).unwrap());
        assert!(!r.perturbative_ok);
        assert!((r.schwarzschild_over_size.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn switching_off_gravity() {
        let s = massive_benchmark()
            .with_constants(Constants { g_newton: 0.0, ..CODATA_2018 })
            .unwrap();
        let r = validity_report(&s);
        assert_eq!(r.xi, 0.0);
        assert!(!r.dynamical_gravity);
    }

    #[test]
    fn regime_threshold_is_configurable() {
        let s = massive_benchmark();
        assert!(!validity_report(&s).regime_ok);
        let s = s.with_regime_threshold(0.1).unwrap();
        assert!(validity_report(&s).regime_ok);
    }
}
