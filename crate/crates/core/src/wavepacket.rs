//! Momentum-space profiles and the two localized single-particle states.
//!
//! Momenta are in units of the profile width, so the width is identically 1.
//! Site `A` is the state `|01>` centred at `z = -L`; site `B` is `|10>`
//! centred at `z = +L`. A site centred at `z_s` carries the phase
//! `exp(-i k_z z_s)`.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::quadrature::{integrate_3d, Box3, IntegralResult, QuadratureSpec};
use crate::{Error, Result, Vec3};

/// Default per-axis truncation of the Gaussian profile, in widths. The
/// amplitude tail beyond it is `erfc(5) ~ 1.5e-12` of the total.
pub const DEFAULT_GAUSSIAN_CUTOFF: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Gaussian,
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    kind: ProfileKind,
    k0: Vec3,
    gaussian_cutoff: f64,
}

impl Profile {
    pub fn new(kind: ProfileKind, k0: Vec3) -> Result<Self> {
        if k0.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("k0", "must be finite"));
        }
        Ok(Profile { kind, k0, gaussian_cutoff: DEFAULT_GAUSSIAN_CUTOFF })
    }

    /// Gaussian peaked at `(0, 0, k0z)`.
    pub fn gaussian(k0z: f64) -> Result<Self> {
        Self::new(ProfileKind::Gaussian, [0.0, 0.0, k0z])
    }

    /// Box peaked at `(0, 0, k0z)`.
    pub fn boxed(k0z: f64) -> Result<Self> {
        Self::new(ProfileKind::Box, [0.0, 0.0, k0z])
    }

    pub fn with_gaussian_cutoff(mut self, cutoff: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::param("gaussian_cutoff", "must be positive"));
        }
        self.gaussian_cutoff = cutoff;
        Ok(self)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn k0(&self) -> Vec3 {
        self.k0
    }

    pub fn gaussian_cutoff(&self) -> f64 {
        self.gaussian_cutoff
    }

    /// Real amplitude `F(k)`.
    ///
    /// Gaussian: `(2 pi)^(-3/4) exp(-|k - k0|^2 / 4)`.
    /// Box: `8^(-1/2)` on the closed cube `|k_i - k0_i| <= 1`, zero outside.
    pub fn eval(&self, k: Vec3) -> f64 {
        let d = [k[0] - self.k0[0], k[1] - self.k0[1], k[2] - self.k0[2]];
        match self.kind {
            ProfileKind::Gaussian => {
                let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                GAUSSIAN_NORM * (-r2 / 4.0).exp()
            }
            ProfileKind::Box => {
                if d.iter().all(|v| v.abs() <= 1.0) {
                    BOX_AMPLITUDE
                } else {
                    0.0
                }
            }
        }
    }

    /// Region outside which the profile is zero (box) or negligible (Gaussian).
    pub fn support(&self) -> Box3 {
        let half = match self.kind {
            ProfileKind::Gaussian => self.gaussian_cutoff,
            ProfileKind::Box => 1.0,
        };
        Box3 {
            lo: [self.k0[0] - half, self.k0[1] - half, self.k0[2] - half],
            hi: [self.k0[0] + half, self.k0[1] + half, self.k0[2] + half],
        }
    }
}

/// `(2 pi)^(-3/4)`, which makes `int d^3k F^2 = 1`.
pub const GAUSSIAN_NORM: f64 = 0.251_979_435_538_380_76;
/// `1 / sqrt(8)`.
pub const BOX_AMPLITUDE: f64 = 0.353_553_390_593_273_73;

/// `(2 pi)^(-3/2)`.
pub(crate) const FOURIER_NORM: f64 = 0.063_493_635_934_240_97;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    /// `|01>`, centred at `z = -L`.
    A,
    /// `|10>`, centred at `z = +L`.
    B,
}

impl Site {
    /// Sign of the site's z position.
    pub fn sign(self) -> f64 {
        match self {
            Site::A => -1.0,
            Site::B => 1.0,
        }
    }

    pub fn mirror(self) -> Site {
        match self {
            Site::A => Site::B,
            Site::B => Site::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SitePair {
    profile: Profile,
    separation: f64,
    mass: f64,
}

impl SitePair {
    /// Two copies of `profile` centred at `z = -L` and `z = +L`, for a field of
    /// mass `mass` (in units of the width; 0 for massless).
    ///
    /// `L = 0` is accepted; the two states then coincide.
    pub fn new(profile: Profile, half_separation: f64, mass: f64) -> Result<Self> {
        if !(half_separation.is_finite() && half_separation >= 0.0) {
            return Err(Error::param("L", "half-separation must be finite and non-negative"));
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::param("m", "mass must be finite and non-negative"));
        }
        Ok(SitePair { profile, separation: half_separation, mass })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn half_separation(&self) -> f64 {
        self.separation
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn site_z(&self, site: Site) -> f64 {
        site.sign() * self.separation
    }

    pub fn is_degenerate(&self) -> bool {
        self.separation == 0.0
    }

    /// Whether the two site states are orthogonal by construction. Box
    /// profiles need `L = n pi` with integer `n >= 1`; Gaussian states are
    /// never exactly orthogonal.
    pub fn is_orthogonal(&self) -> bool {
        match self.profile.kind {
            ProfileKind::Box => {
                let n = self.separation / PI;
                n >= 0.5 && (n - n.round()).abs() < 1e-9
            }
            ProfileKind::Gaussian => false,
        }
    }

    /// `exp(-i k_z z_s)`.
    pub fn phase(&self, site: Site, k: Vec3) -> Complex64 {
        Complex64::from_polar(1.0, -k[2] * self.site_z(site))
    }

    /// `omega = sqrt(|k|^2 + m^2)`.
    pub fn omega(&self, k: Vec3) -> f64 {
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + self.mass * self.mass).sqrt()
    }
}

/// `<10|01> = int d^3k F(k)^2 exp(2 i L k_z)`.
///
/// Its modulus is `exp(-2 L^2)` for the Gaussian and vanishes for a box with
/// `L = n pi`.
pub fn site_overlap(pair: &SitePair, spec: &QuadratureSpec) -> Result<IntegralResult<Complex64>> {
    let profile = pair.profile;
    integrate_3d(
        |k| {
            let f = profile.eval(k);
            pair.phase(Site::B, k).conj() * pair.phase(Site::A, k) * (f * f)
        },
        &profile.support(),
        spec,
    )
}

/// `int d^3k F(k)^2`.
pub fn normalization(profile: &Profile, spec: &QuadratureSpec) -> Result<IntegralResult<f64>> {
    integrate_3d(
        |k| {
            let f = profile.eval(k);
            f * f
        },
        &profile.support(),
        spec,
    )
}

/// Position-space wave function of one site,
/// `(2 pi)^(-3/2) int d^3k F(k) exp(-i k_z z_s) exp(i k.x)`.
pub fn position_amplitude(
    pair: &SitePair,
    site: Site,
    x: Vec3,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<Complex64>> {
    let profile = pair.profile;
    integrate_3d(
        |k| {
            let plane = Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            plane * pair.phase(site, k) * (FOURIER_NORM * profile.eval(k))
        },
        &profile.support(),
        spec,
    )
}

/// `|position_amplitude|^2`.
pub fn position_density(pair: &SitePair, site: Site, x: Vec3, spec: &QuadratureSpec) -> Result<f64> {
    Ok(position_amplitude(pair, site, x, spec)?.value.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn constants_match_closed_forms() {
        assert!((GAUSSIAN_NORM - (2.0 * PI).powf(-0.75)).abs() < 1e-16);
        assert!((BOX_AMPLITUDE - 8f64.powf(-0.5)).abs() < 1e-16);
        assert!((FOURIER_NORM - (2.0 * PI).powf(-1.5)).abs() < 1e-17);
    }

    #[test]
    fn peak_values() {
        let g = Profile::gaussian(3.0).unwrap();
        assert!((g.eval([0.0, 0.0, 3.0]) - 0.251_979).abs() < 1e-6);
        let b = Profile::boxed(3.0).unwrap();
        assert!((b.eval([0.0, 0.0, 3.0]) - 0.353_55).abs() < 1e-5);
        assert_eq!(b.eval([2.0, 0.0, 3.0]), 0.0);
        // closed cube edge
        assert_eq!(b.eval([1.0, -1.0, 4.0]), BOX_AMPLITUDE);
    }

    #[test]
    fn normalized_profiles() {
        for p in [Profile::gaussian(0.0).unwrap(), Profile::boxed(50.0).unwrap()] {
            let n = normalization(&p, &spec()).unwrap();
            assert!(n.converged);
            assert!((n.value - 1.0).abs() < 1e-8, "{:?}: {}", p.kind(), n.value);
        }
    }

    #[test]
    fn identical_sites_overlap_fully() {
        let pair = SitePair::new(Profile::gaussian(0.0).unwrap(), 0.0, 1.0).unwrap();
        let o = site_overlap(&pair, &spec()).unwrap();
        assert!((o.value - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(pair.is_degenerate());
    }

    #[test]
    fn box_orthogonality_flag() {
        let b = Profile::boxed(0.0).unwrap();
        assert!(SitePair::new(b, PI, 0.0).unwrap().is_orthogonal());
        assert!(SitePair::new(b, 3.0 * PI, 0.0).unwrap().is_orthogonal());
        assert!(!SitePair::new(b, 3.0, 0.0).unwrap().is_orthogonal());
        assert!(!SitePair::new(b, 0.0, 0.0).unwrap().is_orthogonal());
        assert!(SitePair::new(b, -1.0, 0.0).is_err());
        assert!(SitePair::new(b, 1.0, -1.0).is_err());
    }

    #[test]
    fn density_is_non_negative() {
        let pair = SitePair::new(Profile::boxed(0.0).unwrap(), PI, 0.0).unwrap();
        for z in [-5.0, -PI, -1.0, 0.0, 0.7, PI, 6.0] {
            for site in [Site::A, Site::B] {
                assert!(position_density(&pair, site, [0.3, -0.2, z], &spec()).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn gaussian_site_a_sits_at_negative_z() {
        for l in [2.0, 3.0] {
            let pair = SitePair::new(Profile::gaussian(0.0).unwrap(), l, 0.0).unwrap();
            let near = position_density(&pair, Site::A, [0.0, 0.0, -l], &spec()).unwrap();
            let far = position_density(&pair, Site::A, [0.0, 0.0, l], &spec()).unwrap();
            assert!(near > far);
        }
    }
}
