//! Normal-ordered stress-energy expectation values of the two-site states.
//!
//! For one-particle states every matrix element of `:T_{mu nu}:` is a
//! bilinear in the mode integrals
//!
//! ```text
//! I_w(site, x, t) = int d^3k F(k) exp(-i k_z z_s) w(k) u_k(x, t)
//! u_k = (2 pi)^(-3/2) omega^(-1/2) exp(i (k.x - omega t))
//! ```
//!
//! with `w` one of `1, omega, k_x, k_y, k_z`. Writing `J_0 = -I_omega` and
//! `J_i = I_{k_i}`,
//!
//! ```text
//! <a|:T_{mu nu}:|b> = 1/2 (J*_mu J_nu + J*_nu J_mu)
//!                   - 1/2 eta_{mu nu} (sum_rho eta^{rho rho} J*_rho J_rho + m^2 I*_1 I_1)
//! ```
//!
//! (conjugates on the bra side). Its trace is
//! `-[-I*_omega I_omega + sum_i I*_{k_i} I_{k_i} + 2 m^2 I*_1 I_1]`, the
//! double integral of `-(k'_mu k^mu + 2 m^2) u*_k u_k'` against the two
//! profiles, evaluated as products of single integrals.
//!
//! The metric is `eta = diag(-1, 1, 1, 1)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::qstate::TwoSiteState;
use crate::quadrature::{try_integrate_3d, Bundle, IntegralResult, QuadratureSpec};
use crate::wavepacket::{Site, SitePair, FOURIER_NORM};
use crate::{Error, Result, Vec3};

/// Largest `|t|` accepted by the time-dependent evaluations.
pub const MAX_TIME: f64 = 500.0;

/// Diagonal of the flat metric.
pub const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// The ten independent index pairs of a symmetric 4x4 tensor, row-major.
pub const INDEX_PAIRS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

pub type Tensor = [[f64; 4]; 4];
pub type ComplexTensor = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    One,
    Omega,
    Kx,
    Ky,
    Kz,
}

impl Weight {
    pub const ALL: [Weight; 5] = [Weight::One, Weight::Omega, Weight::Kx, Weight::Ky, Weight::Kz];

    fn index(self) -> usize {
        self as usize
    }
}

/// The five mode integrals of one site at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIntegralSet {
    pub site: Site,
    pub values: [Complex64; 5],
    pub x: Vec3,
    pub t: f64,
    /// Absolute error estimate per weight.
    pub errors: [f64; 5],
    pub converged: bool,
}

impl ModeIntegralSet {
    pub fn get(&self, w: Weight) -> Complex64 {
        self.values[w.index()]
    }

    /// `J_mu = (-I_omega, I_kx, I_ky, I_kz)`.
    pub fn gradient(&self) -> [Complex64; 4] {
        let v = &self.values;
        [-v[1], v[2], v[3], v[4]]
    }
}

fn check_point(x: Vec3, t: f64) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("x", "must be finite"));
    }
    if !(t.is_finite() && t.abs() <= MAX_TIME) {
        return Err(Error::param("t", alloc::format!("|t| must be at most {MAX_TIME}, got {t}")));
    }
    Ok(())
}

/// Mode integrals for both sites in one pass over the momentum nodes.
///
/// The `w = 1` integral is carried internally with the factor
/// `omega(k0)` so that all bundle entries have comparable size and the
/// shared relative tolerance applies evenly.
pub fn mode_integrals_both(
    pair: &SitePair,
    x: Vec3,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<[ModeIntegralSet; 2]> {
    check_point(x, t)?;
    let profile = *pair.profile();
    let scale = pair.omega(profile.k0()).max(1.0);
    let l = pair.half_separation();

    let result = try_integrate_3d(
        |k: Vec3| {
            let f = profile.eval(k);
            if f == 0.0 {
                return Ok(Bundle([ZERO; 10]));
            }
            let omega = pair.omega(k);
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2] - omega * t;
            let base = Complex64::from_polar(FOURIER_NORM * f / omega.sqrt(), phase);
            // site A sits at -L and carries exp(+i L k_z)
            let shift = Complex64::from_polar(1.0, l * k[2]);
            let a = base * shift;
            let b = base * shift.conj();
            let w = [scale, omega, k[0], k[1], k[2]];
            Ok(Bundle([
                a * w[0], a * w[1], a * w[2], a * w[3], a * w[4],
                b * w[0], b * w[1], b * w[2], b * w[3], b * w[4],
            ]))
        },
        &profile.support(),
        spec,
    )?;

    let v = result.value.0;
    let mut errors = [result.error_estimate; 5];
    errors[0] /= scale;
    let set = |site: Site, off: usize| ModeIntegralSet {
        site,
        values: [v[off] / scale, v[off + 1], v[off + 2], v[off + 3], v[off + 4]],
        x,
        t,
        errors,
        converged: result.converged,
    };
    Ok([set(Site::A, 0), set(Site::B, 5)])
}

/// Mode integrals `I_w` for one site.
pub fn mode_integrals(
    pair: &SitePair,
    site: Site,
    x: Vec3,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<ModeIntegralSet> {
    let [a, b] = mode_integrals_both(pair, x, t, spec)?;
    Ok(match site {
        Site::A => a,
        Site::B => b,
    })
}

/// A single mode integral with an arbitrary weight `w(k, omega)`.
pub fn mode_integral_with<W>(
    pair: &SitePair,
    site: Site,
    x: Vec3,
    t: f64,
    weight: W,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<Complex64>>
where
    W: Fn(Vec3, f64) -> Complex64,
{
    check_point(x, t)?;
    let profile = *pair.profile();
    try_integrate_3d(
        |k: Vec3| {
            let f = profile.eval(k);
            if f == 0.0 {
                return Ok(ZERO);
            }
            let omega = pair.omega(k);
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2] - omega * t;
            let u = Complex64::from_polar(FOURIER_NORM * f / omega.sqrt(), phase);
            Ok(u * pair.phase(site, k) * weight(k, omega))
        },
        &profile.support(),
        spec,
    )
}

/// `-[-I*_omega I_omega + sum_i I*_{k_i} I_{k_i} + 2 m^2 I*_1 I_1]`.
pub fn trace_from(bra: &ModeIntegralSet, ket: &ModeIntegralSet, mass: f64) -> Complex64 {
    let p = |w: Weight| bra.get(w).conj() * ket.get(w);
    -(-p(Weight::Omega) + p(Weight::Kx) + p(Weight::Ky) + p(Weight::Kz) + p(Weight::One) * (2.0 * mass * mass))
}

/// First-order error of [`trace_from`] given the per-weight errors.
fn trace_error(bra: &ModeIntegralSet, ket: &ModeIntegralSet, mass: f64) -> f64 {
    Weight::ALL
        .iter()
        .map(|&w| {
            let i = w.index();
            let coeff = if w == Weight::One { 2.0 * mass * mass } else { 1.0 };
            coeff * (bra.values[i].norm() * ket.errors[i] + bra.errors[i] * ket.values[i].norm())
        })
        .sum()
}

/// All components `<bra|:T_{mu nu}:|ket>`.
pub fn components_from(bra: &ModeIntegralSet, ket: &ModeIntegralSet, mass: f64) -> ComplexTensor {
    let jb = bra.gradient();
    let jk = ket.gradient();
    let lagrangian = (0..4).fold(ZERO, |acc, r| acc + jb[r].conj() * jk[r] * ETA[r])
        + bra.get(Weight::One).conj() * ket.get(Weight::One) * (mass * mass);
    let mut t = [[ZERO; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut v = (jb[mu].conj() * jk[nu] + jb[nu].conj() * jk[mu]) * 0.5;
            if mu == nu {
                v -= lagrangian * (0.5 * ETA[mu]);
            }
            t[mu][nu] = v;
        }
    }
    t
}

/// `eta^{mu nu} T_{mu nu}`.
pub fn contract(t: &ComplexTensor) -> Complex64 {
    (0..4).fold(ZERO, |acc, m| acc + t[m][m] * ETA[m])
}

fn sites(pair: &SitePair, bra: Site, ket: Site, x: Vec3, t: f64, spec: &QuadratureSpec) -> Result<(ModeIntegralSet, ModeIntegralSet)> {
    let [a, b] = mode_integrals_both(pair, x, t, spec)?;
    let pick = |s: Site| if s == Site::A { a } else { b };
    Ok((pick(bra), pick(ket)))
}

/// `<bra|:T^mu_mu:|ket>` along the direct trace path.
pub fn bilinear_trace(
    pair: &SitePair,
    bra: Site,
    ket: Site,
    x: Vec3,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<Complex64>> {
    let (b, k) = sites(pair, bra, ket, x, t, spec)?;
    Ok(IntegralResult {
        value: trace_from(&b, &k, pair.mass()),
        error_estimate: trace_error(&b, &k, pair.mass()),
        subdivisions_used: 0,
        converged: b.converged && k.converged,
    })
}

/// `<bra|:T_{mu nu}:|ket>` for one index pair.
#[allow(clippy::too_many_arguments)]
pub fn bilinear_component(
    pair: &SitePair,
    bra: Site,
    ket: Site,
    mu: usize,
    nu: usize,
    x: Vec3,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if mu > 3 || nu > 3 {
        return Err(Error::param("index", "tensor indices run over 0..=3"));
    }
    Ok(bilinear_components(pair, bra, ket, x, t, spec)?[mu][nu])
}

pub fn bilinear_components(
    pair: &SitePair,
    bra: Site,
    ket: Site,
    x: Vec3,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<ComplexTensor> {
    let (b, k) = sites(pair, bra, ket, x, t, spec)?;
    Ok(components_from(&b, &k, pair.mass()))
}

/// All matrix elements needed to assemble the source for any state, at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointTerms {
    pub x: Vec3,
    pub t: f64,
    /// `<01|:T:|01>`.
    pub diag_a: Tensor,
    /// `<10|:T:|10>`.
    pub diag_b: Tensor,
    /// `<01|:T:|10>`.
    pub cross: ComplexTensor,
    pub trace_a: f64,
    pub trace_b: f64,
    pub trace_cross: Complex64,
    pub error: f64,
    pub converged: bool,
}

fn real_part(t: &ComplexTensor) -> Tensor {
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            out[mu][nu] = t[mu][nu].re;
        }
    }
    out
}

pub fn point_terms(pair: &SitePair, x: Vec3, t: f64, spec: &QuadratureSpec) -> Result<PointTerms> {
    let [a, b] = mode_integrals_both(pair, x, t, spec)?;
    let m = pair.mass();
    let error = trace_error(&a, &a, m).max(trace_error(&b, &b, m)).max(trace_error(&a, &b, m));
    Ok(PointTerms {
        x,
        t,
        diag_a: real_part(&components_from(&a, &a, m)),
        diag_b: real_part(&components_from(&b, &b, m)),
        cross: components_from(&a, &b, m),
        trace_a: trace_from(&a, &a, m).re,
        trace_b: trace_from(&b, &b, m).re,
        trace_cross: trace_from(&a, &b, m),
        error,
        converged: a.converged && b.converged,
    })
}

/// State parameters as they enter the source. `beta` may be complex here;
/// the coherence term is then `2 Re(beta <01|:T:|10>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateWeights {
    alpha: f64,
    beta: Complex64,
}

impl StateWeights {
    pub fn new(alpha: f64, beta: Complex64) -> Result<Self> {
        if !(alpha.is_finite() && beta.re.is_finite() && beta.im.is_finite()) {
            return Err(Error::InvalidState("alpha and beta must be finite".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidState(alloc::format!("0 <= alpha <= 1 violated: alpha = {alpha}")));
        }
        let radius = (alpha - 0.5) * (alpha - 0.5) + beta.norm_sqr();
        if radius > 0.25 + 1e-12 {
            return Err(Error::InvalidState(alloc::format!(
                "(alpha - 1/2)^2 + |beta|^2 <= 1/4 violated: {radius:.6} > 0.25"
            )));
        }
        Ok(StateWeights { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

impl From<TwoSiteState> for StateWeights {
    fn from(s: TwoSiteState) -> Self {
        StateWeights { alpha: s.alpha(), beta: Complex64::new(s.beta(), 0.0) }
    }
}

impl From<&TwoSiteState> for StateWeights {
    fn from(s: &TwoSiteState) -> Self {
        (*s).into()
    }
}

/// Dimensionless source `<:T_{mu nu}:>` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceTensor {
    pub components: Tensor,
    /// The `2 Re(beta <01|:T:|10>)` contribution alone.
    pub coherence_part: Tensor,
    /// Trace along the direct trace path.
    pub trace: f64,
    pub coherence_trace: f64,
    pub x: Vec3,
    pub t: f64,
    pub error: f64,
    pub converged: bool,
}

impl SourceTensor {
    /// `eta^{mu nu} S_{mu nu}` computed from the components.
    pub fn contracted_trace(&self) -> f64 {
        (0..4).map(|m| ETA[m] * self.components[m][m]).sum()
    }
}

/// `alpha <01|T|01> + (1 - alpha) <10|T|10> + 2 Re(beta <01|T|10>)`.
pub fn assemble_source(terms: &PointTerms, state: &StateWeights) -> SourceTensor {
    let alpha = state.alpha;
    let beta = state.beta;
    let mut components = [[0.0; 4]; 4];
    let mut coherence_part = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in mu..4 {
            let coh = 2.0 * (beta * terms.cross[mu][nu]).re;
            let v = alpha * terms.diag_a[mu][nu] + (1.0 - alpha) * terms.diag_b[mu][nu] + coh;
            components[mu][nu] = v;
            components[nu][mu] = v;
            coherence_part[mu][nu] = coh;
            coherence_part[nu][mu] = coh;
        }
    }
    let coherence_trace = 2.0 * (beta * terms.trace_cross).re;
    SourceTensor {
        components,
        coherence_part,
        trace: alpha * terms.trace_a + (1.0 - alpha) * terms.trace_b + coherence_trace,
        coherence_trace,
        x: terms.x,
        t: terms.t,
        error: terms.error * (1.0 + 2.0 * beta.norm()),
        converged: terms.converged,
    }
}

pub fn source_tensor(
    state: &StateWeights,
    pair: &SitePair,
    x: Vec3,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<SourceTensor> {
    Ok(assemble_source(&point_terms(pair, x, t, spec)?, state))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample {
    pub t: f64,
    pub trace: f64,
    pub magnitude: f64,
    pub error: f64,
    pub converged: bool,
}

/// Source trace at a fixed point over a list of times.
pub fn decay_profile(
    state: &StateWeights,
    pair: &SitePair,
    x: Vec3,
    times: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<DecaySample>> {
    times
        .iter()
        .map(|&t| {
            let s = source_tensor(state, pair, x, t, spec)?;
            Ok(DecaySample { t, trace: s.trace, magnitude: s.trace.abs(), error: s.error, converged: s.converged })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxTerm {
    /// `<01|..|01>`, centred at `z = -L`.
    D01,
    /// `<10|..|10>`, centred at `z = +L`.
    D10,
    /// `<01|..|10>`.
    D0110,
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// `sin^2(z) / (L^2 - z^2)` for `L = n pi`, with the removable poles at
/// `z = +-L` evaluated through `sin(z) = cos(L) sin(z - L)`.
fn coherence_shape(z: f64, l: f64) -> f64 {
    let near = if z >= 0.0 { l } else { -l };
    let d = z - near;
    if d.abs() < 1e-3 {
        // sin^2 z / (L^2 - z^2) = -cos^2(L) sinc(d) sin(d) / (2 near + d)
        let c = near.cos();
        -c * c * sinc(d) * d.sin() / (2.0 * near + d)
    } else {
        let s = z.sin();
        s * s / (l * l - z * z)
    }
}

/// Leading-order spatial shape of the box-profile traces at `t = 0`, up to
/// normalization. Only meaningful for `L = n pi`.
pub fn box_trace_closed_form(term: BoxTerm, x: Vec3, l: f64) -> f64 {
    let transverse = sinc(x[0]).powi(2) * sinc(x[1]).powi(2);
    let z = x[2];
    transverse
        * match term {
            BoxTerm::D10 => sinc(z - l).powi(2),
            BoxTerm::D01 => sinc(z + l).powi(2),
            BoxTerm::D0110 => coherence_shape(z, l),
        }
}

/// `R = 8 pi <:T^mu_mu:>`, from the direct trace path.
pub fn ricci_from_source(source: &SourceTensor) -> f64 {
    8.0 * PI * source.trace
}
