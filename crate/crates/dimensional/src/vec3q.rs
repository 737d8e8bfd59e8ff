//! Dimensioned Euclidean 3-vectors.
//!
//! A [`Vec3Q`] is a coordinate triple relative to the frame's implied
//! orthonormal basis, tagged with the scalar dimension of its components.
//! The inner product of two vectors carries the product dimension, the norm
//! keeps the vector's dimension, and the direction of a non-zero vector is
//! dimensionless.

use std::fmt;

use thiserror::Error;

use crate::dimension::{render_monomial, Dimension};
use crate::quantity::{Quantity, QuantityError, UnitFrame};

#[derive(Debug, Error)]
pub enum Vec3Error {
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error("direction of the zero vector is undefined")]
    ZeroVector,
    #[error("component must be finite, got {0}")]
    NonFinite(f64),
}

/// A 3-vector quantity: components relative to the frame basis, plus the
/// dimension shared by all components.
#[derive(Debug, Clone, PartialEq)]
pub struct Vec3Q {
    components: [f64; 3],
    dim: Dimension,
    frame: UnitFrame,
}

impl Vec3Q {
    pub fn new(
        components: [f64; 3],
        dim: Dimension,
        frame: &UnitFrame,
    ) -> Result<Self, Vec3Error> {
        for &c in &components {
            if !c.is_finite() {
                return Err(Vec3Error::NonFinite(c));
            }
        }
        // Reuse the scalar constructor's system check.
        Quantity::new(0.0, dim.clone(), frame)?;
        Ok(Vec3Q {
            components,
            dim,
            frame: frame.clone(),
        })
    }

    pub fn zero(dim: Dimension, frame: &UnitFrame) -> Result<Self, Vec3Error> {
        Self::new([0.0; 3], dim, frame)
    }

    pub fn components(&self) -> [f64; 3] {
        self.components
    }

    pub fn dim(&self) -> &Dimension {
        &self.dim
    }

    pub fn frame(&self) -> &UnitFrame {
        &self.frame
    }

    pub fn is_zero(&self) -> bool {
        self.components == [0.0; 3]
    }

    fn require_same_frame(&self, other: &Vec3Q) -> Result<(), QuantityError> {
        if self.frame.same_frame(&other.frame) {
            Ok(())
        } else {
            Err(QuantityError::FrameMismatch {
                left: self.frame.label(),
                right: other.frame.label(),
            })
        }
    }

    /// Dimensioned inner product; the result carries dim(v)*dim(w).
    pub fn dot(&self, other: &Vec3Q) -> Result<Quantity, Vec3Error> {
        self.require_same_frame(other)?;
        let mag = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a * b)
            .sum();
        Ok(Quantity::new(
            mag,
            self.dim.mul(&other.dim).map_err(QuantityError::from)?,
            &self.frame,
        )?)
    }

    /// Multiply by a scalar quantity: components scale, dimensions multiply.
    pub fn scale_q(&self, s: &Quantity) -> Result<Vec3Q, Vec3Error> {
        if !self.frame.same_frame(s.frame()) {
            return Err(QuantityError::FrameMismatch {
                left: self.frame.label(),
                right: s.frame().label(),
            }
            .into());
        }
        let m = s.magnitude();
        Ok(Vec3Q {
            components: [
                self.components[0] * m,
                self.components[1] * m,
                self.components[2] * m,
            ],
            dim: self.dim.mul(s.dim()).map_err(QuantityError::from)?,
            frame: self.frame.clone(),
        })
    }

    pub fn add(&self, other: &Vec3Q) -> Result<Vec3Q, Vec3Error> {
        self.require_same_frame(other)?;
        if self.dim != other.dim {
            return Err(QuantityError::DimensionMismatch {
                left: self.dim.to_string(),
                right: other.dim.to_string(),
            }
            .into());
        }
        Ok(Vec3Q {
            components: [
                self.components[0] + other.components[0],
                self.components[1] + other.components[1],
                self.components[2] + other.components[2],
            ],
            dim: self.dim.clone(),
            frame: self.frame.clone(),
        })
    }

    pub fn sub(&self, other: &Vec3Q) -> Result<Vec3Q, Vec3Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Vec3Q {
        Vec3Q {
            components: [
                -self.components[0],
                -self.components[1],
                -self.components[2],
            ],
            dim: self.dim.clone(),
            frame: self.frame.clone(),
        }
    }

    /// Euclidean norm: sqrt(<v, v>), with the zero vector mapped to the
    /// zero quantity of the vector's own dimension.
    pub fn norm(&self) -> Quantity {
        let mag = self
            .components
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt();
        Quantity::new(mag, self.dim.clone(), &self.frame).expect("components are finite")
    }

    /// Dimensionless unit vector of a non-zero vector; satisfies
    /// `scale_q(direction(v), norm(v)) == v`.
    pub fn direction(&self) -> Result<Vec3Q, Vec3Error> {
        if self.is_zero() {
            return Err(Vec3Error::ZeroVector);
        }
        let n = self.norm().magnitude();
        Ok(Vec3Q {
            components: [
                self.components[0] / n,
                self.components[1] / n,
                self.components[2] / n,
            ],
            dim: Dimension::dimensionless(self.frame.system()),
            frame: self.frame.clone(),
        })
    }
}

impl fmt::Display for Vec3Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}) {}",
            self.components[0],
            self.components[1],
            self.components[2],
            render_monomial(self.frame.unit_names(), self.dim.exponents())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::{rat, DimensionSystem};

    fn frame() -> UnitFrame {
        let sys = DimensionSystem::new(vec!["L", "T", "M"]).unwrap();
        UnitFrame::new(&sys, vec!["m", "s", "kg"]).unwrap()
    }

    fn v(c: [f64; 3], exps: &[i64], f: &UnitFrame) -> Vec3Q {
        Vec3Q::new(
            c,
            Dimension::from_int_exponents(f.system(), exps).unwrap(),
            f,
        )
        .unwrap()
    }

    #[test]
    fn dot_orthogonal_and_positive_definite() {
        let f = frame();
        let ex = v([1.0, 0.0, 0.0], &[1, 0, 0], &f);
        let ey = v([0.0, 1.0, 0.0], &[1, 0, 0], &f);
        let d = ex.dot(&ey).unwrap();
        assert_eq!(d.magnitude(), 0.0);
        assert_eq!(d.dim().exponents()[0], rat(2, 1));

        let t = v([1.0, 2.0, 3.0], &[0, 1, 0], &f);
        let tt = t.dot(&t).unwrap();
        assert_eq!(tt.magnitude(), 14.0);
        assert_eq!(tt.dim().exponents()[1], rat(2, 1));

        let z = Vec3Q::zero(t.dim().clone(), &f).unwrap();
        assert_eq!(z.dot(&t).unwrap().magnitude(), 0.0);
    }

    #[test]
    fn scale_q_forms_velocity() {
        let f = frame();
        let x = v([1.0, 1.0, 1.0], &[1, 0, 0], &f);
        let rate = Quantity::new(
            2.0,
            Dimension::from_int_exponents(f.system(), &[0, -1, 0]).unwrap(),
            &f,
        )
        .unwrap();
        let vel = x.scale_q(&rate).unwrap();
        assert_eq!(vel.components(), [2.0, 2.0, 2.0]);
        assert_eq!(
            vel.dim(),
            &Dimension::from_int_exponents(f.system(), &[1, -1, 0]).unwrap()
        );

        let one = Quantity::dimensionless(1.0, &f).unwrap();
        assert_eq!(x.scale_q(&one).unwrap(), x);
    }

    #[test]
    fn dot_of_scaled_vectors_factorizes() {
        let f = frame();
        let x = v([1.0, 2.0, -1.0], &[1, 0, 0], &f);
        let w = v([0.5, 0.0, 3.0], &[1, 0, 0], &f);
        let s = Quantity::new(
            2.0,
            Dimension::from_int_exponents(f.system(), &[0, -1, 0]).unwrap(),
            &f,
        )
        .unwrap();
        let t = Quantity::new(
            -3.0,
            Dimension::from_int_exponents(f.system(), &[0, 0, 1]).unwrap(),
            &f,
        )
        .unwrap();
        let lhs = x.scale_q(&s).unwrap().dot(&w.scale_q(&t).unwrap()).unwrap();
        let rhs = x.dot(&w).unwrap().mul(&s).unwrap().mul(&t).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn norm_cases() {
        let f = frame();
        let x = v([3.0, 4.0, 0.0], &[1, 0, 0], &f);
        let n = x.norm();
        assert_eq!(n.magnitude(), 5.0);
        assert_eq!(n.dim(), x.dim());

        let zm = Vec3Q::zero(
            Dimension::from_int_exponents(f.system(), &[0, 0, 1]).unwrap(),
            &f,
        )
        .unwrap();
        let zn = zm.norm();
        assert_eq!(zn.magnitude(), 0.0);
        assert_eq!(zn.dim(), zm.dim());

        // homogeneity with a negative dimensionless factor
        let lam = Quantity::dimensionless(-2.0, &f).unwrap();
        let ex = v([1.0, 0.0, 0.0], &[1, 0, 0], &f);
        assert_eq!(ex.scale_q(&lam).unwrap().norm().magnitude(), 2.0);
    }

    #[test]
    fn direction_cases() {
        let f = frame();
        let x = v([0.0, 0.0, 2.0], &[1, 0, 0], &f);
        let d = x.direction().unwrap();
        assert_eq!(d.components(), [0.0, 0.0, 1.0]);
        assert!(d.dim().is_dimensionless());
        assert_eq!(d.norm().magnitude(), 1.0);

        // reconstruction
        let y = v([3.0, 4.0, 0.0], &[1, 0, 0], &f);
        let rec = y.direction().unwrap().scale_q(&y.norm()).unwrap();
        assert_eq!(rec, y);

        // scale invariance
        let two = Quantity::dimensionless(2.0, &f).unwrap();
        assert_eq!(y.scale_q(&two).unwrap().direction().unwrap(), y.direction().unwrap());

        let z = Vec3Q::zero(y.dim().clone(), &f).unwrap();
        assert!(matches!(z.direction(), Err(Vec3Error::ZeroVector)));
    }

    #[test]
    fn display_renders_components_and_dimension() {
        let f = frame();
        let x = v([1.0, -2.0, 0.5], &[1, -1, 0], &f);
        assert_eq!(x.to_string(), "(1, -2, 0.5) m s^-1");
    }
}
