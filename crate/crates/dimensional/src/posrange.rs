//! Positive ranges and their embedding into signed ranges.
//!
//! Verification substructure: the concrete model P = R_{>0} of a positive
//! range, pairs (p, q) read as differences, the equivalence
//! (p1,q1) ~ (p2,q2) <=> p1+q2 = q1+p2, and the canonical order-preserving
//! embedding of P onto the positive classes. Nothing here is used by the
//! runtime quantity representation; it exists so the construction can be
//! property-tested against the axioms it is supposed to satisfy.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PosRangeError {
    #[error("positive-range representative must be > 0, got {0}")]
    NonPositive(f64),
}

/// A representative (p, q) of an equivalence class in (P x P)/~ for the
/// model P = R_{>0}. The class stands for the signed difference p - q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosPair {
    p: f64,
    q: f64,
}

impl PosPair {
    pub fn class_of(p: f64, q: f64) -> Result<Self, PosRangeError> {
        if !(p > 0.0) {
            return Err(PosRangeError::NonPositive(p));
        }
        if !(q > 0.0) {
            return Err(PosRangeError::NonPositive(q));
        }
        Ok(PosPair { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// (p1,q1) ~ (p2,q2)  <=>  p1 + q2 = q1 + p2.
    pub fn eq_class(&self, other: &PosPair) -> bool {
        self.p + other.q == self.q + other.p
    }

    /// Same relation up to a tolerance, for derived representatives whose
    /// arithmetic is inexact.
    pub fn eq_class_approx(&self, other: &PosPair, tol: f64) -> bool {
        let lhs = self.p + other.q;
        let rhs = self.q + other.p;
        (lhs - rhs).abs() <= tol * lhs.abs().max(rhs.abs()).max(1.0)
    }

    /// [p1,q1] + [p2,q2] := [p1+p2, q1+q2].
    pub fn add(&self, other: &PosPair) -> PosPair {
        PosPair {
            p: self.p + other.p,
            q: self.q + other.q,
        }
    }

    /// External multiplication by a real, three cases by sign.
    pub fn scale(&self, lambda: f64) -> PosPair {
        if lambda > 0.0 {
            PosPair {
                p: lambda * self.p,
                q: lambda * self.q,
            }
        } else if lambda < 0.0 {
            PosPair {
                p: -lambda * self.q,
                q: -lambda * self.p,
            }
        } else {
            PosPair { p: self.p, q: self.p }
        }
    }

    /// [p1,q1] < [p2,q2]  <=>  p1 + q2 < q1 + p2.
    pub fn less(&self, other: &PosPair) -> bool {
        self.p + other.q < self.q + other.p
    }

    /// The canonical embedding j(p) := [q + p, q]; independent of q, the
    /// reference representative here uses q = 1.
    pub fn embed(p: f64) -> Result<PosPair, PosRangeError> {
        if !(p > 0.0) {
            return Err(PosRangeError::NonPositive(p));
        }
        Ok(PosPair { p: 1.0 + p, q: 1.0 })
    }

    /// Same embedding with an explicit reference point, for checking the
    /// independence claim.
    pub fn embed_with(p: f64, q: f64) -> Result<PosPair, PosRangeError> {
        if !(p > 0.0) {
            return Err(PosRangeError::NonPositive(p));
        }
        if !(q > 0.0) {
            return Err(PosRangeError::NonPositive(q));
        }
        Ok(PosPair { p: q + p, q })
    }

    /// Signed value p - q of the class; handy for cross-checks.
    pub fn value(&self) -> f64 {
        self.p - self.q
    }
}
