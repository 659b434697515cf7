//! Ricci scalar samples and the static linearized metric on a grid.
//!
//! In Lorenz gauge the static first-order equations reduce to
//! `lap hbar_{mu nu} = -16 pi S_{mu nu}` componentwise. They are solved in
//! free space by convolving with a cell-averaged `1 / (4 pi r)` kernel,
//! zero-padded so that nothing wraps around.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::fft::fft3;
use crate::quadrature::QuadratureSpec;
use crate::stress_energy::{
    assemble_source, point_terms, ricci_from_source, source_tensor, PointTerms, StateWeights, INDEX_PAIRS,
};
use crate::wavepacket::SitePair;
use crate::{Error, Result, Vec3};

pub const MIN_POINTS: usize = 8;
/// Largest grid accepted by [`greens_oracle`].
pub const ORACLE_MAX_POINTS: usize = 32;
/// A source whose boundary maximum exceeds this fraction of its overall
/// maximum is flagged as non-decaying.
pub const DECAY_THRESHOLD: f64 = 1e-3;

/// `int d^3u / |u|` over the unit cube centred on the origin,
/// `3 ln((sqrt 3 + 1) / (sqrt 3 - 1)) - pi / 2`.
pub const UNIT_CUBE_INVERSE_DISTANCE: f64 = 2.380_077_363_979_554;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    lo: Vec3,
    hi: Vec3,
    n: usize,
}

impl Grid {
    /// `n` nodes per axis from `lo` to `hi` inclusive.
    pub fn new(lo: Vec3, hi: Vec3, n: usize) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("need at least {MIN_POINTS} points per axis, got {n}")));
        }
        for a in 0..3 {
            if !(lo[a].is_finite() && hi[a].is_finite() && lo[a] < hi[a]) {
                return Err(Error::InvalidGrid(format!("axis {a}: extent [{}, {}] is not a finite interval", lo[a], hi[a])));
            }
        }
        Ok(Grid { lo, hi, n })
    }

    /// Same extent `[min, max]` on every axis.
    pub fn cube(min: f64, max: f64, n: usize) -> Result<Self> {
        Self::new([min; 3], [max; 3], n)
    }

    pub fn lo(&self) -> Vec3 {
        self.lo
    }

    pub fn hi(&self) -> Vec3 {
        self.hi
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> Vec3 {
        let d = (self.n - 1) as f64;
        [(self.hi[0] - self.lo[0]) / d, (self.hi[1] - self.lo[1]) / d, (self.hi[2] - self.lo[2]) / d]
    }

    /// Common spacing when the cells are cubes.
    pub fn cubic_spacing(&self) -> Option<f64> {
        let h = self.spacing();
        let ok = (h[1] - h[0]).abs() <= 1e-12 * h[0] && (h[2] - h[0]).abs() <= 1e-12 * h[0];
        ok.then_some(h[0])
    }

    /// Flat index with `z` varying fastest.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn unravel(&self, index: usize) -> [usize; 3] {
        [index / (self.n * self.n), (index / self.n) % self.n, index % self.n]
    }

    pub fn point(&self, index: usize) -> Vec3 {
        let h = self.spacing();
        let ijk = self.unravel(index);
        core::array::from_fn(|a| self.lo[a] + ijk[a] as f64 * h[a])
    }

    pub fn points(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(move |p| self.point(p))
    }

    pub fn is_boundary(&self, index: usize) -> bool {
        self.unravel(index).iter().any(|&i| i == 0 || i == self.n - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field3D {
    grid: Grid,
    data: Vec<f64>,
    label: String,
}

impl Field3D {
    /// Fails on a length mismatch or on the first non-finite value.
    pub fn new(grid: Grid, data: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("expected {} samples, got {}", grid.len(), data.len())));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Field3D { grid, data, label: label.into() })
    }

    pub fn zeros(grid: Grid, label: impl Into<String>) -> Self {
        Field3D { grid, data: vec![0.0; grid.len()], label: label.into() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.grid.index(i, j, k)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Index of the largest `|value|` (first one on ties).
    pub fn argmax_abs(&self) -> usize {
        let mut best = 0;
        for (p, v) in self.data.iter().enumerate() {
            if v.abs() > self.data[best].abs() {
                best = p;
            }
        }
        best
    }

    /// Pointwise `self - other` on the same grid.
    pub fn difference(&self, other: &Field3D, label: impl Into<String>) -> Result<Field3D> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Field3D { grid: self.grid, data, label: label.into() })
    }

    /// Largest `|value|` on the outer layer of nodes.
    pub fn boundary_max_abs(&self) -> f64 {
        (0..self.data.len())
            .filter(|&p| self.grid.is_boundary(p))
            .fold(0.0, |m, p| m.max(self.data[p].abs()))
    }
}

/// Evaluates `f` at every node in index order.
pub fn sample_field<F: FnMut(Vec3) -> f64>(mut f: F, grid: &Grid, label: &str) -> Result<Field3D> {
    try_sample_field(|x| Ok(f(x)), grid, label)
}

pub fn try_sample_field<F: FnMut(Vec3) -> Result<f64>>(mut f: F, grid: &Grid, label: &str) -> Result<Field3D> {
    let mut data = Vec::with_capacity(grid.len());
    for p in 0..grid.len() {
        let v = f(grid.point(p))?;
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { index: p });
        }
        data.push(v);
    }
    Field3D::new(*grid, data, label)
}

/// `R = 8 pi <:T^mu_mu:>` at one point.
pub fn ricci_scalar(state: &StateWeights, pair: &SitePair, x: Vec3, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(ricci_from_source(&source_tensor(state, pair, x, t, spec)?))
}

/// Ricci scalar at each node from precomputed point terms.
pub fn ricci_field(terms: &[PointTerms], state: &StateWeights, grid: &Grid) -> Result<Field3D> {
    let data = terms.iter().map(|pt| ricci_from_source(&assemble_source(pt, state))).collect();
    Field3D::new(*grid, data, "ricci")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    /// `phi` with `lap phi = -source` and `phi -> 0` at infinity.
    pub field: Field3D,
    /// Set when the source has not decayed at the grid boundary.
    pub non_decaying: bool,
}

fn kernel_value(d: [i64; 3], h: f64) -> f64 {
    if d == [0, 0, 0] {
        h * h * UNIT_CUBE_INVERSE_DISTANCE / (4.0 * PI)
    } else {
        let r = ((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) as f64).sqrt();
        h * h / (4.0 * PI * r)
    }
}

fn poisson_spacing(grid: &Grid) -> Result<f64> {
    grid.cubic_spacing().ok_or_else(|| Error::InvalidGrid("the Poisson solve needs equal spacing on all axes".into()))
}

fn non_decaying(source: &Field3D) -> bool {
    let max = source.max_abs();
    max > 0.0 && source.boundary_max_abs() > DECAY_THRESHOLD * max
}

/// Free-space solution of `lap phi = -source`.
///
/// The source is zero-padded to a power-of-two cube of at least `2n - 1`
/// points per axis and convolved with the discrete kernel
/// `h^2 / (4 pi |d|)`, `d` in cell units; the self-cell uses the cell
/// average of `1 / (4 pi r)`.
pub fn solve_static_poisson(source: &Field3D) -> Result<PoissonSolution> {
    let grid = source.grid;
    let h = poisson_spacing(&grid)?;
    let n = grid.n;
    let m = (2 * n - 1).next_power_of_two();
    let pad = |i: usize, j: usize, k: usize| (i * m + j) * m + k;

    let zero = Complex64::new(0.0, 0.0);
    let mut s = vec![zero; m * m * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                s[pad(i, j, k)] = Complex64::new(source.get(i, j, k), 0.0);
            }
        }
    }
    // kernel at signed offsets, wrapped
    let mut g = vec![zero; m * m * m];
    let wrap = |d: i64| if d >= 0 { d as usize } else { (m as i64 + d) as usize };
    let reach = n as i64 - 1;
    for di in -reach..=reach {
        for dj in -reach..=reach {
            for dk in -reach..=reach {
                g[pad(wrap(di), wrap(dj), wrap(dk))] = Complex64::new(kernel_value([di, dj, dk], h), 0.0);
            }
        }
    }
    fft3(&mut s, m, false);
    fft3(&mut g, m, false);
    for (a, b) in s.iter_mut().zip(&g) {
        *a *= b;
    }
    fft3(&mut s, m, true);

    let scale = 1.0 / (m * m * m) as f64;
    let mut data = Vec::with_capacity(grid.len());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                data.push(s[pad(i, j, k)].re * scale);
            }
        }
    }
    Ok(PoissonSolution {
        field: Field3D::new(grid, data, format!("potential({})", source.label))?,
        non_decaying: non_decaying(source),
    })
}

/// Direct `O(N^2)` sum with the kernel of [`solve_static_poisson`].
pub fn greens_oracle(source: &Field3D) -> Result<Field3D> {
    let grid = source.grid;
    let n = grid.n;
    if n > ORACLE_MAX_POINTS {
        return Err(Error::GridTooLarge { n, max: ORACLE_MAX_POINTS });
    }
    let h = poisson_spacing(&grid)?;
    let nonzero: Vec<([i64; 3], f64)> = (0..grid.len())
        .filter(|&p| source.data[p] != 0.0)
        .map(|p| {
            let [i, j, k] = grid.unravel(p);
            ([i as i64, j as i64, k as i64], source.data[p])
        })
        .collect();
    let data = (0..grid.len())
        .map(|p| {
            let [i, j, k] = grid.unravel(p);
            let here = [i as i64, j as i64, k as i64];
            nonzero
                .iter()
                .map(|(q, v)| v * kernel_value([here[0] - q[0], here[1] - q[1], here[2] - q[2]], h))
                .sum()
        })
        .collect();
    Field3D::new(grid, data, format!("oracle({})", source.label))
}

/// Labels of the ten independent components, in [`INDEX_PAIRS`] order.
pub fn component_label(prefix: &str, mu: usize, nu: usize) -> String {
    let mut s = prefix.to_string();
    s.push('_');
    s.push(char::from(b'0' + mu as u8));
    s.push(char::from(b'0' + nu as u8));
    s
}

/// The ten independent source components `S_{mu nu}` sampled on a grid.
pub fn source_fields(terms: &[PointTerms], state: &StateWeights, grid: &Grid) -> Result<Vec<Field3D>> {
    if terms.len() != grid.len() {
        return Err(Error::InvalidGrid(format!("expected {} point terms, got {}", grid.len(), terms.len())));
    }
    let sources: Vec<_> = terms.iter().map(|pt| assemble_source(pt, state)).collect();
    INDEX_PAIRS
        .iter()
        .map(|&(mu, nu)| {
            let data = sources.iter().map(|s| s.components[mu][nu]).collect();
            Field3D::new(*grid, data, component_label("S", mu, nu))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricPerturbation {
    /// `hbar_{mu nu}` in [`INDEX_PAIRS`] order.
    pub components: Vec<Field3D>,
    /// Any component whose source did not decay at the boundary.
    pub non_decaying: bool,
}

impl MetricPerturbation {
    pub fn component(&self, mu: usize, nu: usize) -> Option<&Field3D> {
        let (a, b) = if mu <= nu { (mu, nu) } else { (nu, mu) };
        INDEX_PAIRS.iter().position(|&p| p == (a, b)).map(|i| &self.components[i])
    }
}

/// `hbar_{mu nu} = 16 pi (G * S_{mu nu})` for each source component.
pub fn metric_from_source(sources: &[Field3D]) -> Result<MetricPerturbation> {
    let mut components = Vec::with_capacity(sources.len());
    let mut flag = false;
    for (s, &(mu, nu)) in sources.iter().zip(INDEX_PAIRS.iter()) {
        let sol = solve_static_poisson(s)?;
        flag |= sol.non_decaying;
        let data = sol.field.data.iter().map(|v| 16.0 * PI * v).collect();
        components.push(Field3D::new(s.grid, data, component_label("hbar", mu, nu))?);
    }
    Ok(MetricPerturbation { components, non_decaying: flag })
}

/// Samples the source at `t = 0` on every node and solves for `hbar`.
pub fn static_metric_perturbation(
    state: &StateWeights,
    pair: &SitePair,
    grid: &Grid,
    spec: &QuadratureSpec,
) -> Result<MetricPerturbation> {
    let terms = grid.points().map(|x| point_terms(pair, x, 0.0, spec)).collect::<Result<Vec<_>>>()?;
    metric_from_source(&source_fields(&terms, state, grid)?)
}
