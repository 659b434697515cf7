//! Deterministic adaptive quadrature.
//!
//! One-dimensional integrals use a global adaptive Gauss-Kronrod scheme: the
//! panel with the largest error estimate is bisected until the total error
//! meets the tolerance or the panel budget runs out. Three-dimensional
//! integrals over boxes nest the one-dimensional routine. Integrands may be
//! vector valued (see [`QuadValue`]) so several related integrals can share
//! one set of nodes.
//!
//! Panels are kept in position order and summed left to right, so results are
//! bit-identical from run to run.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::{Error, Result, Vec3};

/// Values that can be integrated: a real vector space with a norm.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    /// Max-norm over components.
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Fixed-size bundle of integrand values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bundle<T, const N: usize>(pub [T; N]);

impl<T: QuadValue, const N: usize> Add for Bundle<T, N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a = *a + b;
        }
        self
    }
}

impl<T: QuadValue, const N: usize> Sub for Bundle<T, N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a = *a - b;
        }
        self
    }
}

impl<T: QuadValue, const N: usize> Mul<f64> for Bundle<T, N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for a in self.0.iter_mut() {
            *a = *a * rhs;
        }
        self
    }
}

impl<T: QuadValue, const N: usize> QuadValue for Bundle<T, N> {
    fn zero() -> Self {
        Bundle([T::zero(); N])
    }
    fn norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
    fn is_finite(&self) -> bool {
        self.0.iter().all(QuadValue::is_finite)
    }
}

/// Nested Gauss-Kronrod node/weight pairs on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    /// 7-point Gauss embedded in 15-point Kronrod.
    Gk15,
    /// 10-point Gauss embedded in 21-point Kronrod.
    #[default]
    Gk21,
}

// Abscissae in decreasing order; the last entry is the centre. Gauss nodes are
// the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const GK15_X: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for Kronrod indices 1, 3, 5 and the centre.
#[allow(clippy::excessive_precision)]
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[allow(clippy::excessive_precision)]
const GK21_X: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const GK21_WK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_750_530,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for Kronrod indices 1, 3, 5, 7, 9; the 10-point rule has no centre node.
#[allow(clippy::excessive_precision)]
const GK21_WG: [f64; 6] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
    0.0,
];

impl Rule {
    fn tables(self) -> (&'static [f64], &'static [f64], &'static [f64]) {
        match self {
            Rule::Gk15 => (&GK15_X, &GK15_WK, &GK15_WG),
            Rule::Gk21 => (&GK21_X, &GK21_WK, &GK21_WG),
        }
    }

    /// Number of integrand evaluations per panel.
    pub fn points(self) -> usize {
        2 * self.tables().0.len() - 1
    }

    /// Kronrod nodes and weights on `[-1, 1]`, in increasing order.
    pub fn kronrod_nodes(self) -> Vec<(f64, f64)> {
        let (x, wk, _) = self.tables();
        let n = x.len();
        let mut out: Vec<(f64, f64)> = (0..n - 1).map(|i| (-x[i], wk[i])).collect();
        out.push((0.0, wk[n - 1]));
        out.extend((0..n - 1).rev().map(|i| (x[i], wk[i])));
        out
    }

    /// Gauss nodes and weights on `[-1, 1]`, in increasing order.
    pub fn gauss_nodes(self) -> Vec<(f64, f64)> {
        let (x, _, wg) = self.tables();
        let n = x.len();
        let mut out: Vec<(f64, f64)> =
            (0..n - 1).filter(|i| i % 2 == 1).map(|i| (-x[i], wg[i / 2])).collect();
        let centre = wg[wg.len() - 1];
        if centre != 0.0 {
            out.push((0.0, centre));
        }
        out.extend((0..n - 1).rev().filter(|i| i % 2 == 1).map(|i| (x[i], wg[i / 2])));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub rule: Rule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-8, abs_tol: 1e-12, max_subdivisions: 2000, rule: Rule::Gk21 }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadratureSpec { rel_tol, abs_tol, max_subdivisions, ..Self::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::param("rel_tol", "must be positive"));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::param("abs_tol", "must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::param("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<V> {
    pub value: V,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    pub converged: bool,
}

impl<V> IntegralResult<V> {
    pub fn map<W>(self, f: impl FnOnce(V) -> W) -> IntegralResult<W> {
        IntegralResult {
            value: f(self.value),
            error_estimate: self.error_estimate,
            subdivisions_used: self.subdivisions_used,
            converged: self.converged,
        }
    }
}

#[derive(Clone, Copy)]
struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

/// Gauss-Kronrod estimate on one panel with QUADPACK-style error scaling.
fn panel<V, F>(f: &mut F, a: f64, b: f64, rule: Rule) -> Result<Panel<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let (x, wk, wg) = rule.tables();
    let n = x.len();
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut eval = |t: f64| -> Result<V> {
        let v = f(t)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { x: t });
        }
        Ok(v)
    };

    // Samples stored as (left, right) pairs so the absolute-value sums below
    // can revisit them.
    let mut samples: [(V, V); 10] = [(V::zero(), V::zero()); 10];
    let f_centre = eval(centre)?;
    let mut kronrod = f_centre * wk[n - 1];
    let mut gauss = f_centre * wg[wg.len() - 1];
    let mut abs_sum = f_centre.norm() * wk[n - 1];
    for i in 0..n - 1 {
        let dx = half * x[i];
        let lo = eval(centre - dx)?;
        let hi = eval(centre + dx)?;
        samples[i] = (lo, hi);
        kronrod = kronrod + (lo + hi) * wk[i];
        abs_sum += (lo.norm() + hi.norm()) * wk[i];
        if i % 2 == 1 {
            gauss = gauss + (lo + hi) * wg[i / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut asc = (f_centre - mean).norm() * wk[n - 1];
    for i in 0..n - 1 {
        let (lo, hi) = samples[i];
        asc += ((lo - mean).norm() + (hi - mean).norm()) * wk[i];
    }

    let scale = half.abs();
    let res_abs = abs_sum * scale;
    let res_asc = asc * scale;
    let mut err = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }

    Ok(Panel { a, b, value: kronrod * half, error: err })
}

/// Adaptive integration of a fallible integrand. Used directly by the nested
/// routines so that inner failures propagate.
pub fn try_integrate_1d<V, F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<IntegralResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::param("interval", "need finite a < b"));
    }
    spec.validate()?;

    let mut panels: Vec<Panel<V>> = Vec::with_capacity(16);
    panels.push(panel(&mut f, a, b, spec.rule)?);
    let mut subdivisions = 0;

    loop {
        let total = sum_panels(&panels);
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= spec.tolerance(total.norm()) {
            return Ok(IntegralResult { value: total, error_estimate: error, subdivisions_used: subdivisions, converged: true });
        }
        if subdivisions >= spec.max_subdivisions {
            return Ok(IntegralResult { value: total, error_estimate: error, subdivisions_used: subdivisions, converged: false });
        }

        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let Panel { a: lo, b: hi, .. } = panels[worst];
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            // Panel has shrunk to machine resolution.
            return Ok(IntegralResult { value: total, error_estimate: error, subdivisions_used: subdivisions, converged: false });
        }
        panels[worst] = panel(&mut f, lo, mid, spec.rule)?;
        panels.insert(worst + 1, panel(&mut f, mid, hi, spec.rule)?);
        subdivisions += 1;
    }
}

fn sum_panels<V: QuadValue>(panels: &[Panel<V>]) -> V {
    panels.iter().fold(V::zero(), |acc, p| acc + p.value)
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// Stops when the summed panel error is below
/// `max(abs_tol, rel_tol * |value|)`; if the panel budget runs out first the
/// best estimate is returned with `converged = false`.
pub fn integrate_1d<V, F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<IntegralResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    try_integrate_1d(|x| Ok(f(x)), a, b, spec)
}

/// Axis-aligned box `[lo, hi]` per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Box3 {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self> {
        for i in 0..3 {
            if !(lo[i].is_finite() && hi[i].is_finite() && lo[i] < hi[i]) {
                return Err(Error::param("box", "each axis needs finite lo < hi"));
            }
        }
        Ok(Box3 { lo, hi })
    }

    /// Cube of half-width `half` around `centre`.
    pub fn around(centre: Vec3, half: f64) -> Result<Self> {
        Self::new(
            [centre[0] - half, centre[1] - half, centre[2] - half],
            [centre[0] + half, centre[1] + half, centre[2] + half],
        )
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|i| self.hi[i] - self.lo[i]).product()
    }
}

/// Nested adaptive integral over a box.
///
/// The innermost axis is `z`, then `y`, then `x`. Inner errors enter the
/// reported estimate as `max inner error * outer length`, and any inner
/// non-convergence clears `converged`.
pub fn integrate_3d<V, F>(mut f: F, region: &Box3, spec: &QuadratureSpec) -> Result<IntegralResult<V>>
where
    V: QuadValue,
    F: FnMut(Vec3) -> V,
{
    try_integrate_3d(|k| Ok(f(k)), region, spec)
}

pub fn try_integrate_3d<V, F>(mut f: F, region: &Box3, spec: &QuadratureSpec) -> Result<IntegralResult<V>>
where
    V: QuadValue,
    F: FnMut(Vec3) -> Result<V>,
{
    let Box3 { lo, hi } = *region;
    let mut inner_ok = true;
    let mut y_err_max: f64 = 0.0;
    let mut inner_subdiv = 0;

    let outer = try_integrate_1d(
        |x| {
            let mut z_err_max: f64 = 0.0;
            let plane = try_integrate_1d(
                |y| {
                    let line = try_integrate_1d(
                        |z| {
                            let k = [x, y, z];
                            let v = f(k)?;
                            if !v.is_finite() {
                                return Err(Error::NonFiniteIntegrand3d { k });
                            }
                            Ok(v)
                        },
                        lo[2],
                        hi[2],
                        spec,
                    )?;
                    inner_ok &= line.converged;
                    inner_subdiv += line.subdivisions_used;
                    z_err_max = z_err_max.max(line.error_estimate);
                    Ok(line.value)
                },
                lo[1],
                hi[1],
                spec,
            )?;
            inner_ok &= plane.converged;
            inner_subdiv += plane.subdivisions_used;
            y_err_max = y_err_max.max(plane.error_estimate + z_err_max * (hi[1] - lo[1]));
            Ok(plane.value)
        },
        lo[0],
        hi[0],
        spec,
    )?;

    Ok(IntegralResult {
        value: outer.value,
        error_estimate: outer.error_estimate + y_err_max * (hi[0] - lo[0]),
        subdivisions_used: outer.subdivisions_used + inner_subdiv,
        converged: outer.converged && inner_ok,
    })
}

/// One term `c * conj(integral of A g) * (integral of B h)` of a separable
/// bilinear form.
pub struct SeparableTerm<'a> {
    pub coefficient: Complex64,
    pub weight_a: &'a dyn Fn(Vec3) -> Complex64,
    pub weight_b: &'a dyn Fn(Vec3) -> Complex64,
}

/// Evaluates `sum_j c_j conj(int A g_j) (int B h_j)`.
///
/// A six-dimensional integral `int int conj(A(k)) B(k') W(k, k')` whose kernel
/// splits as `W = sum_j c_j conj(g_j(k)) h_j(k')` reduces to these products of
/// three-dimensional integrals. Errors combine to first order:
/// `|c| (|I_A| e_B + e_A |I_B| + e_A e_B)`.
pub fn separable_bilinear(
    terms: &[SeparableTerm<'_>],
    factor_a: &dyn Fn(Vec3) -> Complex64,
    factor_b: &dyn Fn(Vec3) -> Complex64,
    region_a: &Box3,
    region_b: &Box3,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<Complex64>> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut subdivisions = 0;
    let mut converged = true;
    for term in terms {
        let ia = integrate_3d(|k| factor_a(k) * (term.weight_a)(k), region_a, spec)?;
        let ib = integrate_3d(|k| factor_b(k) * (term.weight_b)(k), region_b, spec)?;
        value += term.coefficient * ia.value.conj() * ib.value;
        error += term.coefficient.norm()
            * (ia.value.norm() * ib.error_estimate
                + ia.error_estimate * ib.value.norm()
                + ia.error_estimate * ib.error_estimate);
        subdivisions += ia.subdivisions_used + ib.subdivisions_used;
        converged &= ia.converged && ib.converged;
    }
    Ok(IntegralResult { value, error_estimate: error, subdivisions_used: subdivisions, converged })
}
