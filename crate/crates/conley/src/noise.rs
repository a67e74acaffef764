//! Models of the driving noise: a metric dynamical system with an exact
//! shift operator.
//!
//! Brownian paths are stored as a two-sided increment lattice; a shift
//! rebases the evaluation offset so the group law `shift(shift(p, s1), s2) =
//! shift(p, s1 + s2)` holds at lattice resolution and `W_0 = 0` stays exact
//! after arbitrary shift chains. Evaluation between lattice points is
//! piecewise linear.

use crate::error::{ConleyError, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The noise model: which metric dynamical system drives the cocycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// A single realization with identity shift; used for deterministic flows.
    Trivial,
    /// Two-sided Brownian path sampled on a `dt`-lattice over `[-horizon, horizon]`.
    Wiener { dt: f64, horizon: f64 },
    /// Rotation of the circle: one uniform draw, shifted by translation.
    RotationCircle { circumference: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Trivial => Ok(()),
            NoiseModel::Wiener { dt, horizon } => {
                if !(dt > 0.0) || !dt.is_finite() {
                    return Err(ConleyError::Config(format!("noise.dt must be > 0, got {dt}")));
                }
                if !(horizon > 0.0) || !horizon.is_finite() {
                    return Err(ConleyError::Config(format!(
                        "noise.horizon must be > 0, got {horizon}"
                    )));
                }
                Ok(())
            }
            NoiseModel::RotationCircle { circumference } => {
                if !(circumference > 0.0) {
                    return Err(ConleyError::Config(format!(
                        "noise.circumference must be > 0, got {circumference}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Draw one realization. Identical `(model, seed)` pairs yield
    /// bit-identical paths.
    pub fn sample_path(&self, seed: u64) -> Result<NoisePath> {
        self.validate()?;
        let state = match *self {
            NoiseModel::Trivial => PathState::Trivial,
            NoiseModel::Wiener { dt, horizon } => {
                let half = (horizon / dt).round() as usize;
                let n_incr = 2 * half;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let scale = dt.sqrt();
                let mut increments = Vec::with_capacity(n_incr);
                for _ in 0..n_incr {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    increments.push(z * scale);
                }
                PathState::Wiener {
                    lattice: Arc::new(WienerLattice::from_increments(dt, increments)),
                    offset: 0.0,
                }
            }
            NoiseModel::RotationCircle { circumference } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let u = Uniform::new(0.0, circumference)
                    .map_err(|e| ConleyError::Config(e.to_string()))?;
                PathState::Rotation {
                    circumference,
                    omega: u.sample(&mut rng),
                }
            }
        };
        Ok(NoisePath { seed, state })
    }
}

#[derive(Debug)]
pub(crate) struct WienerLattice {
    dt: f64,
    half_len: usize,
    /// Partial sums `W(-horizon + i·dt)`, anchored so `W(0) = 0`.
    prefix: Vec<f64>,
}

impl WienerLattice {
    fn from_increments(dt: f64, increments: Vec<f64>) -> Self {
        let half_len = increments.len() / 2;
        let mut prefix = Vec::with_capacity(increments.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for dw in &increments {
            acc += dw;
            prefix.push(acc);
        }
        // rebase so the value at the lattice midpoint (time 0) is exactly 0
        let mid = prefix[half_len];
        for v in &mut prefix {
            *v -= mid;
        }
        prefix[half_len] = 0.0;
        WienerLattice { dt, half_len, prefix }
    }

    fn horizon(&self) -> f64 {
        self.half_len as f64 * self.dt
    }

    /// Piecewise-linear interpolant of the partial sums at absolute time `u`.
    fn interp(&self, u: f64) -> Result<f64> {
        let h = self.horizon();
        if !(u.abs() <= h * (1.0 + 1e-12) + 1e-12) {
            return Err(ConleyError::HorizonExceeded {
                requested: u.abs(),
                max_abs: h,
            });
        }
        let pos = (u + h) / self.dt;
        let max_idx = self.prefix.len() - 1;
        let i = (pos.floor() as isize).clamp(0, max_idx as isize - 1) as usize;
        let frac = (pos - i as f64).clamp(0.0, 1.0);
        Ok(self.prefix[i] + (self.prefix[i + 1] - self.prefix[i]) * frac)
    }
}

#[derive(Debug, Clone)]
enum PathState {
    Trivial,
    Wiener { lattice: Arc<WienerLattice>, offset: f64 },
    Rotation { circumference: f64, omega: f64 },
}

/// One sampled realization of the noise, together with its current shift.
#[derive(Debug, Clone)]
pub struct NoisePath {
    seed: u64,
    state: PathState,
}

impl NoisePath {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Build a Wiener path directly from lattice increments (variance `dt`
    /// each), covering `[-horizon, horizon]` with `horizon = dt·len/2`.
    /// Deterministic alternative to [`NoiseModel::sample_path`] for
    /// reproducible experiments.
    pub fn wiener_from_increments(dt: f64, increments: Vec<f64>) -> Result<NoisePath> {
        if !(dt > 0.0) {
            return Err(ConleyError::Config(format!("dt must be > 0, got {dt}")));
        }
        if increments.len() < 2 || increments.len() % 2 != 0 {
            return Err(ConleyError::Config(
                "increments must have positive even length".into(),
            ));
        }
        Ok(NoisePath {
            seed: 0,
            state: PathState::Wiener {
                lattice: Arc::new(WienerLattice::from_increments(dt, increments)),
                offset: 0.0,
            },
        })
    }

    /// The noise coordinate at time `t` along this path.
    ///
    /// Wiener: `W_t` with piecewise-linear interpolation, `W_0 = 0` exactly.
    /// Rotation: the current base point (constant in `t`). Trivial: 0.
    pub fn value(&self, t: f64) -> Result<f64> {
        match &self.state {
            PathState::Trivial => Ok(0.0),
            PathState::Rotation { omega, .. } => {
                let _ = t;
                Ok(*omega)
            }
            PathState::Wiener { lattice, offset } => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                let base = lattice.interp(*offset)?;
                let v = lattice.interp(offset + t)?;
                Ok(v - base)
            }
        }
    }

    /// Largest `|t|` this path can currently be evaluated at.
    pub fn max_abs_time(&self) -> f64 {
        match &self.state {
            PathState::Wiener { lattice, offset } => lattice.horizon() - offset.abs(),
            _ => f64::INFINITY,
        }
    }

    /// The shifted path `θ_s ω`. Never fails; horizon violations surface at
    /// evaluation time.
    pub fn shift(&self, s: f64) -> NoisePath {
        let state = match &self.state {
            PathState::Trivial => PathState::Trivial,
            PathState::Wiener { lattice, offset } => PathState::Wiener {
                lattice: Arc::clone(lattice),
                offset: offset + s,
            },
            PathState::Rotation { circumference, omega } => PathState::Rotation {
                circumference: *circumference,
                omega: (omega + s).rem_euclid(*circumference),
            },
        };
        NoisePath {
            seed: self.seed,
            state,
        }
    }
}
