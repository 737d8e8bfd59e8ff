//! Dimension-checked Newtonian N-body gravitation.
//!
//! The equation of motion is the mass-cancelled form: the acceleration of
//! body i is `Gamma * sum_{j != i} m_j (x_j - x_i)/|x_j - x_i|^3`, with
//! `Gamma` a positive quantity of dimension L^3 T^-2 M^-1. All public
//! surfaces carry dimensions; the integrator itself runs on raw
//! coordinates.

mod analyze;
mod integrate;
pub mod trace;
mod transform;

pub use analyze::{measure_gamma, residual, total_energy, total_momentum, GammaFit};
pub use trace::{read_trace, write_trace, TraceMeta};
pub use integrate::{integrate, IntegrateOptions};
pub use transform::{time_reflect, transform_report, ReportBody, TraceReport, TransformMode};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dimension::{Dimension, DimensionError};
use crate::quantity::{Quantity, QuantityError, UnitFrame};
use crate::vec3q::{Vec3Error, Vec3Q};

#[derive(Debug, Error)]
pub enum GravError {
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Vec3(#[from] Vec3Error),
    #[error("gravitational system needs a 3-fundamental (length, time, mass) frame")]
    NotLtmFrame,
    #[error("mass {index} must be positive with dimension M, got {value} of dimension {dim}")]
    BadMass {
        index: usize,
        value: f64,
        dim: String,
    },
    #[error("Gamma must be positive with dimension L^3 T^-2 M^-1, got {value} of dimension {dim}")]
    BadGamma { value: f64, dim: String },
    #[error("need at least one body")]
    NoBodies,
    #[error("state count {got} does not match mass count {expected}")]
    BodyCount { got: usize, expected: usize },
    #[error("bodies {i} and {j} occupy the same position")]
    Coincident { i: usize, j: usize },
    #[error("time span must satisfy t0 < t1")]
    BadTimeSpan,
    #[error("body state has dimension {got}, expected {expected}")]
    StateDimension { got: String, expected: String },
    #[error("trajectory needs at least {needed} samples, has {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("no gravitational force anywhere on the trajectory; Gamma indeterminate")]
    Indeterminate,
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveFactor(f64),
    #[error("trace i/o: {0}")]
    Trace(String),
}

/// A gravitational system: unit frame over (length, time, mass), positive
/// point masses and a positive gravitational constant of dimension
/// L^3 T^-2 M^-1. Dimensions are enforced at construction.
#[derive(Debug, Clone)]
pub struct GravSystem {
    frame: UnitFrame,
    masses: Vec<f64>,
    gamma: f64,
}

impl GravSystem {
    pub fn new(
        frame: &UnitFrame,
        masses: Vec<Quantity>,
        gamma: Quantity,
    ) -> Result<Self, GravError> {
        if frame.system().count() != 3 {
            return Err(GravError::NotLtmFrame);
        }
        if masses.is_empty() {
            return Err(GravError::NoBodies);
        }
        let mass_dim = Dimension::from_int_exponents(frame.system(), &[0, 0, 1])?;
        let gamma_dim = Dimension::from_int_exponents(frame.system(), &[3, -2, -1])?;
        let mut mass_values = Vec::with_capacity(masses.len());
        for (index, m) in masses.iter().enumerate() {
            if m.dim() != &mass_dim || !m.is_positive() || !m.frame().same_frame(frame) {
                return Err(GravError::BadMass {
                    index,
                    value: m.magnitude(),
                    dim: m.dim().to_string(),
                });
            }
            mass_values.push(m.magnitude());
        }
        if gamma.dim() != &gamma_dim || !gamma.is_positive() || !gamma.frame().same_frame(frame) {
            return Err(GravError::BadGamma {
                value: gamma.magnitude(),
                dim: gamma.dim().to_string(),
            });
        }
        Ok(GravSystem {
            frame: frame.clone(),
            masses: mass_values,
            gamma: gamma.magnitude(),
        })
    }

    pub fn frame(&self) -> &UnitFrame {
        &self.frame
    }

    pub fn body_count(&self) -> usize {
        self.masses.len()
    }

    pub fn mass_values(&self) -> &[f64] {
        &self.masses
    }

    pub fn gamma_value(&self) -> f64 {
        self.gamma
    }

    pub fn mass(&self, i: usize) -> Quantity {
        Quantity::new(self.masses[i], self.mass_dim(), &self.frame).expect("validated")
    }

    pub fn gamma(&self) -> Quantity {
        Quantity::new(self.gamma, self.gamma_dim(), &self.frame).expect("validated")
    }

    pub fn mass_dim(&self) -> Dimension {
        Dimension::from_int_exponents(self.frame.system(), &[0, 0, 1]).expect("3 fundamentals")
    }

    pub fn gamma_dim(&self) -> Dimension {
        Dimension::from_int_exponents(self.frame.system(), &[3, -2, -1]).expect("3 fundamentals")
    }

    pub fn length_dim(&self) -> Dimension {
        Dimension::from_int_exponents(self.frame.system(), &[1, 0, 0]).expect("3 fundamentals")
    }

    pub fn velocity_dim(&self) -> Dimension {
        Dimension::from_int_exponents(self.frame.system(), &[1, -1, 0]).expect("3 fundamentals")
    }

    pub fn accel_dim(&self) -> Dimension {
        Dimension::from_int_exponents(self.frame.system(), &[1, -2, 0]).expect("3 fundamentals")
    }

    pub fn time_dim(&self) -> Dimension {
        Dimension::from_int_exponents(self.frame.system(), &[0, 1, 0]).expect("3 fundamentals")
    }

    /// Copy with rescaled masses (similarity transforms); Gamma unchanged.
    pub(crate) fn with_masses_scaled(&self, mu: f64) -> GravSystem {
        GravSystem {
            frame: self.frame.clone(),
            masses: self.masses.iter().map(|m| m * mu).collect(),
            gamma: self.gamma,
        }
    }
}

/// Position (dim L) and velocity (dim L T^-1) of one body.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyState {
    position: Vec3Q,
    velocity: Vec3Q,
}

impl BodyState {
    pub fn new(system: &GravSystem, position: Vec3Q, velocity: Vec3Q) -> Result<Self, GravError> {
        if position.dim() != &system.length_dim() {
            return Err(GravError::StateDimension {
                got: position.dim().to_string(),
                expected: system.length_dim().to_string(),
            });
        }
        if velocity.dim() != &system.velocity_dim() {
            return Err(GravError::StateDimension {
                got: velocity.dim().to_string(),
                expected: system.velocity_dim().to_string(),
            });
        }
        Ok(BodyState { position, velocity })
    }

    pub fn position(&self) -> &Vec3Q {
        &self.position
    }

    pub fn velocity(&self) -> &Vec3Q {
        &self.velocity
    }
}

/// Why a trajectory stopped where it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    ReachedEnd,
    CollisionAtStart,
    CollisionAtEnd,
    StepUnderflow,
}

/// A dilation of the (length, time, mass) fundamentals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationLTM {
    pub lambda: f64,
    pub tau: f64,
    pub mu: f64,
}

impl DilationLTM {
    pub fn new(lambda: f64, tau: f64, mu: f64) -> Result<Self, GravError> {
        for &f in &[lambda, tau, mu] {
            if !(f > 0.0) || !f.is_finite() {
                return Err(GravError::NonPositiveFactor(f));
            }
        }
        Ok(DilationLTM { lambda, tau, mu })
    }

    /// lambda^3 tau^-2 mu^-1; equal to 1 exactly on the similarity
    /// subgroup.
    pub fn constraint_value(&self) -> f64 {
        self.lambda.powi(3) / (self.tau * self.tau * self.mu)
    }

    pub fn is_similarity(&self) -> bool {
        (self.constraint_value() - 1.0).abs() < 1e-12
    }

    /// Numeric factor this dilation applies to a quantity with integer
    /// exponents `(l, t, m)` over (length, time, mass).
    pub fn factor_for(&self, l: i32, t: i32, m: i32) -> f64 {
        self.lambda.powi(l) * self.tau.powi(t) * self.mu.powi(m)
    }
}

/// A recorded N-body solution: strictly increasing times, per-time body
/// states, and the reason integration stopped.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub system: GravSystem,
    pub times: Vec<f64>,
    /// positions[k][i] = coordinates of body i at times[k]
    pub positions: Vec<Vec<[f64; 3]>>,
    pub velocities: Vec<Vec<[f64; 3]>>,
    pub termination: Termination,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_distance: f64,
    pub dilation_history: Vec<DilationLTM>,
    pub constraint_satisfied: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn body_count(&self) -> usize {
        self.system.body_count()
    }

    /// Dimensioned state of one body at one recorded time.
    pub fn state(&self, sample: usize, body: usize) -> BodyState {
        let position = Vec3Q::new(
            self.positions[sample][body],
            self.system.length_dim(),
            self.system.frame(),
        )
        .expect("recorded coordinates are finite");
        let velocity = Vec3Q::new(
            self.velocities[sample][body],
            self.system.velocity_dim(),
            self.system.frame(),
        )
        .expect("recorded coordinates are finite");
        BodyState { position, velocity }
    }

    pub fn time(&self, sample: usize) -> Quantity {
        Quantity::new(self.times[sample], self.system.time_dim(), self.system.frame())
            .expect("recorded times are finite")
    }

    /// Check the recording invariants: strictly increasing times and
    /// pairwise distinct positions at every sample.
    pub fn check_invariants(&self) -> Result<(), GravError> {
        for w in self.times.windows(2) {
            if !(w[0] < w[1]) {
                return Err(GravError::BadTimeSpan);
            }
        }
        for sample in &self.positions {
            for i in 0..sample.len() {
                for j in i + 1..sample.len() {
                    if sample[i] == sample[j] {
                        return Err(GravError::Coincident { i, j });
                    }
                }
            }
        }
        Ok(())
    }

    /// Mass-weighted center of the first recorded sample; the default fixed
    /// point for spatial dilations.
    pub fn initial_center_of_mass(&self) -> [f64; 3] {
        let total: f64 = self.system.masses.iter().sum();
        let mut com = [0.0; 3];
        for (m, x) in self.system.masses.iter().zip(&self.positions[0]) {
            for a in 0..3 {
                com[a] += m * x[a] / total;
            }
        }
        com
    }
}

/// Accelerations from positions, raw coordinates. Errors on exactly
/// coincident bodies, naming the pair.
pub(crate) fn accel_raw(
    gamma: f64,
    masses: &[f64],
    positions: &[[f64; 3]],
) -> Result<Vec<[f64; 3]>, GravError> {
    let n = positions.len();
    let mut acc = vec![[0.0; 3]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = [
                positions[j][0] - positions[i][0],
                positions[j][1] - positions[i][1],
                positions[j][2] - positions[i][2],
            ];
            let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            if r2 == 0.0 {
                return Err(GravError::Coincident {
                    i: i.min(j),
                    j: i.max(j),
                });
            }
            let inv_r3 = 1.0 / (r2 * r2.sqrt());
            for a in 0..3 {
                acc[i][a] += gamma * masses[j] * d[a] * inv_r3;
            }
        }
    }
    Ok(acc)
}

/// Dimension-checked acceleration: inputs must be position vectors of the
/// system; outputs carry dimension L T^-2, derived through the quantity
/// calculus rather than assumed.
pub fn accel(system: &GravSystem, positions: &[Vec3Q]) -> Result<Vec<Vec3Q>, GravError> {
    if positions.len() != system.body_count() {
        return Err(GravError::BodyCount {
            got: positions.len(),
            expected: system.body_count(),
        });
    }
    let length_dim = system.length_dim();
    for p in positions {
        if p.dim() != &length_dim {
            return Err(GravError::StateDimension {
                got: p.dim().to_string(),
                expected: length_dim.to_string(),
            });
        }
    }
    // Gamma [L^3 T^-2 M^-1] * M * L^-2 = L T^-2, established once by the
    // dimension calculus and asserted against the declared output dimension.
    let derived = system
        .gamma_dim()
        .mul(&system.mass_dim())?
        .mul(&length_dim.pow(&crate::dimension::rat(-2, 1)))?;
    assert_eq!(derived, system.accel_dim());

    let raw: Vec<[f64; 3]> = positions.iter().map(|p| p.components()).collect();
    let acc = accel_raw(system.gamma_value(), system.mass_values(), &raw)?;
    acc.into_iter()
        .map(|a| Ok(Vec3Q::new(a, system.accel_dim(), system.frame())?))
        .collect()
}
