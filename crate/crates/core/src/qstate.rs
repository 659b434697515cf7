//! The two-site single-particle state family and its entanglement measures.
//!
//! On the basis `{|00>, |01>, |10>, |11>}` the state is
//!
//! ```text
//! rho = alpha |01><01| + (1 - alpha) |10><10| + beta (|10><01| + |01><10|)
//! ```
//!
//! with real `beta`. Positivity requires `(alpha - 1/2)^2 + beta^2 <= 1/4`.

use alloc::format;

use nalgebra::{Matrix4, SymmetricEigen};
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Eigenvalues of the partial transpose within this distance of zero are
/// treated as zero.
pub const EIGEN_TOL: f64 = 1e-12;

/// Slack allowed on the positivity boundary so that e.g. `(1/2, 1/2)` is
/// accepted despite rounding in user-supplied decimals.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteState {
    alpha: f64,
    beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    MaximallyEntangled,
    MaximallyMixed,
    Separable,
    Entangled,
}

impl TwoSiteState {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidState(format!(
                "alpha and beta must be finite, got ({alpha}, {beta})"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidState(format!("0 <= alpha <= 1 violated: alpha = {alpha}")));
        }
        if !(-0.5..=0.5).contains(&beta) {
            return Err(Error::InvalidState(format!("-1/2 <= beta <= 1/2 violated: beta = {beta}")));
        }
        let radius = positivity_radius(alpha, beta);
        if radius > 0.25 + BOUNDARY_SLACK {
            return Err(Error::InvalidState(format!(
                "(alpha - 1/2)^2 + beta^2 <= 1/4 violated: {radius:.6} > 0.25"
            )));
        }
        Ok(TwoSiteState { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The 4x4 density matrix on `{|00>, |01>, |10>, |11>}`.
    pub fn density_matrix(&self) -> Matrix4<f64> {
        let mut rho = Matrix4::zeros();
        rho[(1, 1)] = self.alpha;
        rho[(2, 2)] = 1.0 - self.alpha;
        rho[(2, 1)] = self.beta;
        rho[(1, 2)] = self.beta;
        rho
    }

    /// Reads `(alpha, beta)` back from a density matrix of this family.
    pub fn from_density_matrix(rho: &Matrix4<f64>) -> Result<Self> {
        for (i, j) in [(0, 0), (3, 3), (0, 1), (0, 2), (0, 3), (1, 3), (2, 3)] {
            if rho[(i, j)] != 0.0 || rho[(j, i)] != 0.0 {
                return Err(Error::InvalidState(format!(
                    "entry ({i}, {j}) lies outside the single-particle sector"
                )));
            }
        }
        if rho[(1, 2)] != rho[(2, 1)] {
            return Err(Error::InvalidState("coherences are not symmetric".into()));
        }
        let state = Self::new(rho[(1, 1)], rho[(2, 1)])?;
        if rho[(2, 2)] != 1.0 - state.alpha {
            return Err(Error::InvalidState("trace is not one".into()));
        }
        Ok(state)
    }

    pub fn classify(&self) -> StateClass {
        if self.alpha == 0.5 && self.beta.abs() == 0.5 {
            StateClass::MaximallyEntangled
        } else if self.alpha == 0.5 && self.beta == 0.0 {
            StateClass::MaximallyMixed
        } else if self.beta == 0.0 {
            StateClass::Separable
        } else {
            StateClass::Entangled
        }
    }
}

fn positivity_radius(alpha: f64, beta: f64) -> f64 {
    (alpha - 0.5) * (alpha - 0.5) + beta * beta
}

pub fn make_state(alpha: f64, beta: f64) -> Result<TwoSiteState> {
    TwoSiteState::new(alpha, beta)
}

/// Partial transpose over the second tensor factor.
pub fn partial_transpose(rho: &Matrix4<f64>) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    out[(2 * a + b2, 2 * a2 + b)] = rho[(2 * a + b, 2 * a2 + b2)];
                }
            }
        }
    }
    out
}

/// Sum of the magnitudes of the negative eigenvalues of the partial transpose.
pub fn negativity(state: &TwoSiteState) -> f64 {
    let pt = partial_transpose(&state.density_matrix());
    SymmetricEigen::new(pt)
        .eigenvalues
        .iter()
        .map(|&l| if l.abs() <= EIGEN_TOL { 0.0 } else { l })
        .map(|l| (l.abs() - l) / 2.0)
        .sum()
}

/// `log2(2 N + 1)`, in `[0, 1]` for this family.
pub fn log_negativity(state: &TwoSiteState) -> f64 {
    (2.0 * negativity(state) + 1.0).log2()
}

/// Two-qubit concurrence, `2 |beta|` for this family.
pub fn concurrence(state: &TwoSiteState) -> f64 {
    2.0 * state.beta.abs()
}

/// Coherence magnitude implied by a logarithmic negativity: `(2^E_N - 1) / 2`.
pub fn beta_from_log_negativity(e_n: f64) -> f64 {
    (e_n.exp2() - 1.0) / 2.0
}
