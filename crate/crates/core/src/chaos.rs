//! One-dimensional chaotic maps used as deterministic drivers for the
//! optimizer: Gauss/mouse for initialization, Logistic for the crossover
//! threshold and Chebyshev for the mutation threshold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default Logistic growth rate (fully chaotic regime).
pub const DEFAULT_LOGISTIC_R: f64 = 4.0;
/// Default Chebyshev map order.
pub const DEFAULT_CHEBYSHEV_ORDER: f64 = 4.0;

const LOGISTIC_FIXED_POINTS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Error, PartialEq)]
pub enum ChaosError {
    #[error("logistic seed {0} must lie in (0, 1) outside the collapsing set {{0, 0.25, 0.5, 0.75, 1}}")]
    LogisticSeed(f64),
    #[error("chebyshev seed {0} must lie in [-1, 1]")]
    ChebyshevSeed(f64),
    #[error("gauss/mouse seed {0} must be finite and non-negative")]
    GaussSeed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChaosKind {
    GaussMouse,
    Logistic,
    Chebyshev,
}

/// Single-owner chaotic sequence state.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaoticStream {
    kind: ChaosKind,
    state: f64,
    param: f64,
    emitted: u64,
}

impl ChaoticStream {
    pub fn gauss_mouse(seed: f64) -> Result<Self, ChaosError> {
        if !seed.is_finite() || seed < 0.0 {
            return Err(ChaosError::GaussSeed(seed));
        }
        Ok(Self {
            kind: ChaosKind::GaussMouse,
            state: seed,
            param: 0.0,
            emitted: 0,
        })
    }

    pub fn logistic(seed: f64, r: f64) -> Result<Self, ChaosError> {
        if !(seed > 0.0 && seed < 1.0) || LOGISTIC_FIXED_POINTS.contains(&seed) {
            return Err(ChaosError::LogisticSeed(seed));
        }
        Ok(Self {
            kind: ChaosKind::Logistic,
            state: seed,
            param: r,
            emitted: 0,
        })
    }

    pub fn chebyshev(seed: f64, order: f64) -> Result<Self, ChaosError> {
        if !(-1.0..=1.0).contains(&seed) {
            return Err(ChaosError::ChebyshevSeed(seed));
        }
        Ok(Self {
            kind: ChaosKind::Chebyshev,
            state: seed,
            param: order,
            emitted: 0,
        })
    }

    /// Whether `seed` is an admissible Logistic starting value.
    pub fn is_admissible_logistic_seed(seed: f64) -> bool {
        seed > 0.0 && seed < 1.0 && !LOGISTIC_FIXED_POINTS.contains(&seed)
    }

    pub fn kind(&self) -> ChaosKind {
        self.kind
    }

    /// Raw map state (for Chebyshev this is the un-normalized value in [-1, 1]).
    pub fn state(&self) -> f64 {
        self.state
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Advances the map one step and returns the value in the unit interval.
    pub fn next_value(&mut self) -> f64 {
        self.emitted += 1;
        match self.kind {
            ChaosKind::GaussMouse => {
                self.state = gauss_mouse_step(self.state);
                self.state
            }
            ChaosKind::Logistic => {
                self.state = logistic_step(self.state, self.param);
                self.state
            }
            ChaosKind::Chebyshev => {
                self.state = chebyshev_step(self.state, self.param);
                (self.state + 1.0) / 2.0
            }
        }
    }
}

impl Iterator for ChaoticStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_value())
    }
}

/// Gauss/mouse map: `1` at zero, otherwise the fractional part of `1/x`.
pub fn gauss_mouse_step(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (1.0 / x).fract()
    }
}

pub fn logistic_step(x: f64, r: f64) -> f64 {
    r * x * (1.0 - x)
}

/// Raw Chebyshev step `cos(a * acos(x))`; input is clamped to [-1, 1] so
/// rounding can never push `acos` out of its domain.
pub fn chebyshev_step(x: f64, order: f64) -> f64 {
    (order * x.clamp(-1.0, 1.0).acos()).cos()
}
