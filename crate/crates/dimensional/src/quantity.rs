//! Scalar physical quantities relative to a unit frame.
//!
//! A [`UnitFrame`] picks one positive unit per fundamental; a [`Quantity`]
//! is a finite magnitude plus a [`Dimension`], read as coordinates relative
//! to that frame. Mixed-frame arithmetic is an error: silent conversion
//! would blur the isomorphism/automorphism distinction the rest of the
//! crate is built to exhibit.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::dimension::{
    rational_to_f64, render_monomial, Dimension, DimensionError, DimensionSystem, Rational,
};

#[derive(Debug, Error)]
pub enum QuantityError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("unit frames differ: [{left}] vs [{right}]")]
    FrameMismatch { left: String, right: String },
    #[error("dimension mismatch {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("magnitude must be finite, got {0}")]
    NonFinite(f64),
    #[error("division by zero-magnitude quantity")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("frame needs one unit name per fundamental ({expected}), got {got}")]
    UnitCount { got: usize, expected: usize },
    #[error("unit name must be non-empty")]
    EmptyUnitName,
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FrameData {
    system: Arc<DimensionSystem>,
    unit_names: Vec<String>,
}

/// A choice of positive unit per fundamental quantity of a system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitFrame(Arc<FrameData>);

impl UnitFrame {
    pub fn new<S: Into<String>>(
        system: &Arc<DimensionSystem>,
        unit_names: Vec<S>,
    ) -> Result<Self, QuantityError> {
        let unit_names: Vec<String> = unit_names.into_iter().map(Into::into).collect();
        if unit_names.len() != system.count() {
            return Err(QuantityError::UnitCount {
                got: unit_names.len(),
                expected: system.count(),
            });
        }
        if unit_names.iter().any(|n| n.is_empty()) {
            return Err(QuantityError::EmptyUnitName);
        }
        Ok(UnitFrame(Arc::new(FrameData {
            system: Arc::clone(system),
            unit_names,
        })))
    }

    pub fn system(&self) -> &Arc<DimensionSystem> {
        &self.0.system
    }

    pub fn unit_names(&self) -> &[String] {
        &self.0.unit_names
    }

    pub fn label(&self) -> String {
        self.0.unit_names.join(",")
    }

    pub fn same_frame(&self, other: &UnitFrame) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }

    /// Unit name for a fundamental, looked up by fundamental name.
    pub fn unit_for(&self, fundamental: &str) -> Option<&str> {
        self.0
            .system
            .index_of(fundamental)
            .map(|i| self.0.unit_names[i].as_str())
    }
}

/// A scalar physical quantity: finite magnitude plus dimension, relative to
/// a unit frame. Sign of the magnitude is the order of the range, since the
/// frame's basis vectors are positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    magnitude: f64,
    dim: Dimension,
    frame: UnitFrame,
}

impl Quantity {
    pub fn new(magnitude: f64, dim: Dimension, frame: &UnitFrame) -> Result<Self, QuantityError> {
        if !magnitude.is_finite() {
            return Err(QuantityError::NonFinite(magnitude));
        }
        if !dim.system().as_ref().eq(frame.system().as_ref()) {
            return Err(QuantityError::FrameMismatch {
                left: dim.system().label(),
                right: frame.system().label(),
            });
        }
        Ok(Quantity {
            magnitude,
            dim,
            frame: frame.clone(),
        })
    }

    pub fn dimensionless(magnitude: f64, frame: &UnitFrame) -> Result<Self, QuantityError> {
        Quantity::new(magnitude, Dimension::dimensionless(frame.system()), frame)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn dim(&self) -> &Dimension {
        &self.dim
    }

    pub fn frame(&self) -> &UnitFrame {
        &self.frame
    }

    pub fn is_positive(&self) -> bool {
        self.magnitude > 0.0
    }

    fn require_same_frame(&self, other: &Quantity) -> Result<(), QuantityError> {
        if self.frame.same_frame(&other.frame) {
            Ok(())
        } else {
            Err(QuantityError::FrameMismatch {
                left: self.frame.label(),
                right: other.frame.label(),
            })
        }
    }

    fn require_same_dim(&self, other: &Quantity) -> Result<(), QuantityError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(QuantityError::DimensionMismatch {
                left: self.dim.to_string(),
                right: other.dim.to_string(),
            })
        }
    }

    pub fn mul(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        self.require_same_frame(other)?;
        Ok(Quantity {
            magnitude: self.magnitude * other.magnitude,
            dim: self.dim.mul(&other.dim)?,
            frame: self.frame.clone(),
        })
    }

    pub fn div(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        self.mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Quantity, QuantityError> {
        if self.magnitude == 0.0 {
            return Err(QuantityError::DivisionByZero);
        }
        Ok(Quantity {
            magnitude: 1.0 / self.magnitude,
            dim: self.dim.inv(),
            frame: self.frame.clone(),
        })
    }

    pub fn add(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        self.require_same_frame(other)?;
        self.require_same_dim(other)?;
        Ok(Quantity {
            magnitude: self.magnitude + other.magnitude,
            dim: self.dim.clone(),
            frame: self.frame.clone(),
        })
    }

    pub fn sub(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Quantity {
        Quantity {
            magnitude: -self.magnitude,
            dim: self.dim.clone(),
            frame: self.frame.clone(),
        }
    }

    /// Multiply by a dimensionless real.
    pub fn scale(&self, factor: f64) -> Quantity {
        Quantity {
            magnitude: self.magnitude * factor,
            dim: self.dim.clone(),
            frame: self.frame.clone(),
        }
    }

    pub fn sqrt(&self) -> Result<Quantity, QuantityError> {
        if self.magnitude < 0.0 {
            return Err(QuantityError::Domain(format!(
                "square root of negative magnitude {}",
                self.magnitude
            )));
        }
        Ok(Quantity {
            magnitude: self.magnitude.sqrt(),
            dim: self.dim.pow(&crate::dimension::rat(1, 2)),
            frame: self.frame.clone(),
        })
    }

    pub fn pow(&self, q: &Rational) -> Result<Quantity, QuantityError> {
        let magnitude = if q.is_integer() {
            let n = q.numer();
            if self.magnitude == 0.0 && n.is_negative() {
                return Err(QuantityError::DivisionByZero);
            }
            match n.to_i32() {
                Some(n) => self.magnitude.powi(n),
                None => self.magnitude.powf(rational_to_f64(q)),
            }
        } else {
            if self.magnitude <= 0.0 {
                return Err(QuantityError::Domain(format!(
                    "fractional power of non-positive magnitude {}",
                    self.magnitude
                )));
            }
            self.magnitude.powf(rational_to_f64(q))
        };
        Ok(Quantity {
            magnitude,
            dim: self.dim.pow(q),
            frame: self.frame.clone(),
        })
    }

    /// Total order within one range: compare magnitudes. Cross-dimension or
    /// cross-frame comparison is rejected.
    pub fn cmp(&self, other: &Quantity) -> Result<Ordering, QuantityError> {
        self.require_same_frame(other)?;
        self.require_same_dim(other)?;
        Ok(self
            .magnitude
            .partial_cmp(&other.magnitude)
            .expect("magnitudes are finite"))
    }

    /// Passive unit change. `scale[i]` is the factor by which the i-th unit
    /// vector is multiplied going from `self.frame` to `to`; the numeric
    /// coordinate changes contravariantly, by `prod_i scale[i]^(-n_i)`.
    pub fn convert(&self, to: &UnitFrame, scale: &[f64]) -> Result<Quantity, QuantityError> {
        if !self.frame.system().as_ref().eq(to.system().as_ref()) {
            return Err(QuantityError::FrameMismatch {
                left: self.frame.label(),
                right: to.label(),
            });
        }
        if scale.len() != to.system().count() {
            return Err(QuantityError::UnitCount {
                got: scale.len(),
                expected: to.system().count(),
            });
        }
        let mut factor = 1.0;
        for (s, n) in scale.iter().zip(self.dim.exponents()) {
            if *s <= 0.0 {
                return Err(QuantityError::NonPositiveScale(*s));
            }
            factor *= s.powf(-rational_to_f64(n));
        }
        Ok(Quantity {
            magnitude: self.magnitude * factor,
            dim: self.dim.clone(),
            frame: to.clone(),
        })
    }

    /// Render as `<decimal> <unit monomial>`, e.g. `6.6743e-11 m^3 s^-2 kg^-1`.
    pub fn render(&self) -> String {
        if self.dim.is_dimensionless() {
            render_f64(self.magnitude)
        } else {
            format!(
                "{} {}",
                render_f64(self.magnitude),
                render_monomial(self.frame.unit_names(), self.dim.exponents())
            )
        }
    }
}

/// Decimal rendering that round-trips through `str::parse::<f64>` and
/// switches to scientific notation away from the human-friendly range.
pub fn render_f64(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && (a < 1e-4 || a >= 1e7) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
