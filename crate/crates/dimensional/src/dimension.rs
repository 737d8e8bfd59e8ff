//! Dimensions as exact rational exponent vectors.
//!
//! A [`DimensionSystem`] fixes an ordered list of named fundamental
//! quantities; a [`Dimension`] is a length-N vector of exact rationals over
//! that list. Products of quantities add exponent vectors, inverses negate
//! them, and rational powers scale them, so the set of dimensions of one
//! system forms an abelian group isomorphic to (Q^N, +).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational carrier for dimension exponents.
pub type Rational = BigRational;

/// Build a rational from an integer pair. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error)]
pub enum DimensionError {
    #[error("dimension system must have at least one fundamental")]
    EmptySystem,
    #[error("fundamental name must be non-empty")]
    EmptyName,
    #[error("duplicate fundamental name `{0}`")]
    DuplicateName(String),
    #[error("unknown fundamental `{0}`")]
    UnknownFundamental(String),
    #[error("dimension systems differ: [{left}] vs [{right}]")]
    SystemMismatch { left: String, right: String },
    #[error("exponent vector has length {got}, system has {expected} fundamentals")]
    ExponentLength { got: usize, expected: usize },
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
}

/// An ordered list of distinct named fundamental quantities.
///
/// The order is fixed for the system's lifetime; dimensions are always
/// represented relative to it, which makes equality decidable and
/// hash-stable.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct DimensionSystem {
    fundamentals: Vec<String>,
}

impl DimensionSystem {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Arc<Self>, DimensionError> {
        let fundamentals: Vec<String> = names.into_iter().map(Into::into).collect();
        if fundamentals.is_empty() {
            return Err(DimensionError::EmptySystem);
        }
        for (i, name) in fundamentals.iter().enumerate() {
            if name.is_empty() {
                return Err(DimensionError::EmptyName);
            }
            if fundamentals[..i].contains(name) {
                return Err(DimensionError::DuplicateName(name.clone()));
            }
        }
        Ok(Arc::new(DimensionSystem { fundamentals }))
    }

    pub fn count(&self) -> usize {
        self.fundamentals.len()
    }

    pub fn fundamentals(&self) -> &[String] {
        &self.fundamentals
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.fundamentals.iter().position(|f| f == name)
    }

    /// Comma-joined fundamental names, used in mismatch diagnostics.
    pub fn label(&self) -> String {
        self.fundamentals.join(",")
    }
}

/// The dimension of a physical quantity: one exact rational exponent per
/// fundamental of its system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dimension {
    system: Arc<DimensionSystem>,
    exponents: Vec<Rational>,
}

impl Dimension {
    /// The unique dimensionless element (all-zero exponents).
    pub fn dimensionless(system: &Arc<DimensionSystem>) -> Self {
        Dimension {
            system: Arc::clone(system),
            exponents: vec![Rational::zero(); system.count()],
        }
    }

    /// The dimension of a single fundamental, exponent 1.
    pub fn base(system: &Arc<DimensionSystem>, name: &str) -> Result<Self, DimensionError> {
        let idx = system
            .index_of(name)
            .ok_or_else(|| DimensionError::UnknownFundamental(name.to_string()))?;
        let mut d = Self::dimensionless(system);
        d.exponents[idx] = Rational::from(BigInt::from(1));
        Ok(d)
    }

    pub fn from_exponents(
        system: &Arc<DimensionSystem>,
        exponents: Vec<Rational>,
    ) -> Result<Self, DimensionError> {
        if exponents.len() != system.count() {
            return Err(DimensionError::ExponentLength {
                got: exponents.len(),
                expected: system.count(),
            });
        }
        Ok(Dimension {
            system: Arc::clone(system),
            exponents,
        })
    }

    pub fn from_int_exponents(
        system: &Arc<DimensionSystem>,
        exponents: &[i64],
    ) -> Result<Self, DimensionError> {
        Self::from_exponents(
            system,
            exponents
                .iter()
                .map(|&e| Rational::from(BigInt::from(e)))
                .collect(),
        )
    }

    pub fn system(&self) -> &Arc<DimensionSystem> {
        &self.system
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exponents
    }

    pub fn same_system(&self, other: &Dimension) -> bool {
        Arc::ptr_eq(&self.system, &other.system) || self.system == other.system
    }

    fn require_same_system(&self, other: &Dimension) -> Result<(), DimensionError> {
        if self.same_system(other) {
            Ok(())
        } else {
            Err(DimensionError::SystemMismatch {
                left: self.system.label(),
                right: other.system.label(),
            })
        }
    }

    /// Product of dimensions: componentwise exponent addition.
    pub fn mul(&self, other: &Dimension) -> Result<Dimension, DimensionError> {
        self.require_same_system(other)?;
        Ok(Dimension {
            system: Arc::clone(&self.system),
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Inverse dimension: exponent negation.
    pub fn inv(&self) -> Dimension {
        Dimension {
            system: Arc::clone(&self.system),
            exponents: self.exponents.iter().map(|e| -e).collect(),
        }
    }

    /// Rational power: scales every exponent by `q`.
    pub fn pow(&self, q: &Rational) -> Dimension {
        Dimension {
            system: Arc::clone(&self.system),
            exponents: self.exponents.iter().map(|e| e * q).collect(),
        }
    }

    pub fn is_dimensionless(&self) -> bool {
        self.exponents.iter().all(|e| e.is_zero())
    }

    /// True when every exponent is an integer (the main-calculus lattice).
    pub fn is_integer(&self) -> bool {
        self.exponents.iter().all(|e| e.is_integer())
    }

    /// Parse the monomial grammar produced by `Display`, e.g.
    /// `L^3 T^-2 M^-1`, `L^(1/2) T^-1`, or `1` for the dimensionless element.
    pub fn parse(system: &Arc<DimensionSystem>, text: &str) -> Result<Self, DimensionError> {
        let factors = parse_monomial(text)?;
        let mut d = Self::dimensionless(system);
        if factors.len() == 1 && factors[0].0 == "1" {
            return Ok(d);
        }
        for (name, exp) in factors {
            let idx = system
                .index_of(&name)
                .ok_or(DimensionError::UnknownFundamental(name))?;
            d.exponents[idx] += exp;
        }
        Ok(d)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            render_monomial(self.system.fundamentals(), &self.exponents)
        )
    }
}

/// Render `names[i]^exponents[i]` in monomial form: exponent 1 omitted,
/// zero factors dropped, rationals in parentheses, `1` when everything
/// cancels.
pub fn render_monomial(names: &[String], exponents: &[Rational]) -> String {
    let mut parts = Vec::new();
    for (name, exp) in names.iter().zip(exponents) {
        if exp.is_zero() {
            continue;
        }
        parts.push(format!("{}{}", name, render_exponent(exp)));
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" ")
    }
}

fn render_exponent(exp: &Rational) -> String {
    if exp.is_integer() {
        if exp == &Rational::from(BigInt::from(1)) {
            String::new()
        } else {
            format!("^{}", exp.numer())
        }
    } else {
        format!("^({}/{})", exp.numer(), exp.denom())
    }
}

/// Parse a whitespace-separated monomial `name(^exp)? ...` into
/// `(name, exponent)` pairs. `1` alone is accepted for the dimensionless
/// monomial. Exponents are ints or `(int/int)`.
pub fn parse_monomial(text: &str) -> Result<Vec<(String, Rational)>, DimensionError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(DimensionError::Parse {
            at: 0,
            msg: "empty monomial".into(),
        });
    }
    if trimmed == "1" {
        return Ok(vec![("1".to_string(), Rational::zero())]);
    }
    let mut out = Vec::new();
    for token in trimmed.split_whitespace() {
        let (name, exp) = match token.split_once('^') {
            None => (token, Rational::from(BigInt::from(1))),
            Some((name, exp_str)) => (name, parse_exponent(exp_str)?),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(DimensionError::Parse {
                at: 0,
                msg: format!("bad factor name `{name}`"),
            });
        }
        out.push((name.to_string(), exp));
    }
    Ok(out)
}

fn parse_exponent(s: &str) -> Result<Rational, DimensionError> {
    let parse_int = |t: &str| {
        BigInt::from_str(t).map_err(|_| DimensionError::Parse {
            at: 0,
            msg: format!("bad exponent `{s}`"),
        })
    };
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (num, den) = inner.split_once('/').ok_or_else(|| DimensionError::Parse {
            at: 0,
            msg: format!("bad rational exponent `{s}`"),
        })?;
        let den = parse_int(den.trim())?;
        if den.is_zero() {
            return Err(DimensionError::Parse {
                at: 0,
                msg: "zero denominator".into(),
            });
        }
        Ok(Rational::new(parse_int(num.trim())?, den))
    } else {
        Ok(Rational::from(parse_int(s)?))
    }
}

/// Lossy conversion for numeric work (dilation factors, unit scaling).
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fallback for numerators/denominators outside f64 range.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY * sign_of(r));
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn sign_of(r: &Rational) -> f64 {
    if r.is_negative() {
        -1.0
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ltm() -> Arc<DimensionSystem> {
        DimensionSystem::new(vec!["L", "T", "M"]).unwrap()
    }

    #[test]
    fn system_rejects_duplicates_and_empties() {
        assert!(matches!(
            DimensionSystem::new(vec!["L", "L"]),
            Err(DimensionError::DuplicateName(_))
        ));
        assert!(matches!(
            DimensionSystem::new(vec!["L", ""]),
            Err(DimensionError::EmptyName)
        ));
        assert!(matches!(
            DimensionSystem::new(Vec::<String>::new()),
            Err(DimensionError::EmptySystem)
        ));
    }

    #[test]
    fn mul_cancels_inverse_factors() {
        let sys = ltm();
        let l = Dimension::base(&sys, "L").unwrap();
        let prod = l.mul(&l.inv()).unwrap();
        assert!(prod.is_dimensionless());
    }

    #[test]
    fn ohm_dimension_from_voltage_and_current() {
        let sys = DimensionSystem::new(vec!["U", "I"]).unwrap();
        let u = Dimension::base(&sys, "U").unwrap();
        let i = Dimension::base(&sys, "I").unwrap();
        let ohm = u.mul(&i.inv()).unwrap();
        assert_eq!(ohm.exponents(), &[rat(1, 1), rat(-1, 1)]);
        assert_eq!(ohm.to_string(), "U I^-1");
    }

    #[test]
    fn mul_adds_componentwise() {
        let sys = ltm();
        let a = Dimension::from_int_exponents(&sys, &[1, -2, 0]).unwrap();
        let m = Dimension::base(&sys, "M").unwrap();
        let prod = a.mul(&m).unwrap();
        assert_eq!(
            prod,
            Dimension::from_int_exponents(&sys, &[1, -2, 1]).unwrap()
        );
    }

    #[test]
    fn inv_negates_gamma_dimension() {
        let sys = ltm();
        let gamma = Dimension::from_int_exponents(&sys, &[3, -2, -1]).unwrap();
        assert_eq!(
            gamma.inv(),
            Dimension::from_int_exponents(&sys, &[-3, 2, 1]).unwrap()
        );
        let t = Dimension::base(&sys, "T").unwrap();
        assert_eq!(t.inv().exponents()[1], rat(-1, 1));
        assert!(Dimension::dimensionless(&sys).inv().is_dimensionless());
    }

    #[test]
    fn pow_scales_exponents() {
        let sys = ltm();
        let l2 = Dimension::from_int_exponents(&sys, &[2, 0, 0]).unwrap();
        assert_eq!(
            l2.pow(&rat(1, 2)),
            Dimension::base(&sys, "L").unwrap()
        );
        let l = Dimension::base(&sys, "L").unwrap();
        assert_eq!(l.pow(&rat(3, 2)).pow(&rat(2, 3)), l);
        let a = Dimension::from_int_exponents(&sys, &[1, -2, 0]).unwrap();
        let half = a.pow(&rat(1, 2));
        assert_eq!(half.exponents(), &[rat(1, 2), rat(-1, 1), rat(0, 1)]);
    }

    #[test]
    fn dimensionless_predicate() {
        let sys = ltm();
        assert!(Dimension::dimensionless(&sys).is_dimensionless());
        let v = Dimension::from_int_exponents(&sys, &[1, -1, 0]).unwrap();
        assert!(!v.is_dimensionless());
        assert!(v.mul(&v.inv()).unwrap().is_dimensionless());
    }

    #[test]
    fn system_mismatch_reported_with_both_labels() {
        let a = Dimension::dimensionless(&ltm());
        let b = Dimension::dimensionless(&DimensionSystem::new(vec!["U", "I"]).unwrap());
        let err = a.mul(&b).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("L,T,M") && msg.contains("U,I"), "{msg}");
    }

    #[test]
    fn render_and_parse_round_trip() {
        let sys = ltm();
        let gamma = Dimension::from_int_exponents(&sys, &[3, -2, -1]).unwrap();
        assert_eq!(gamma.to_string(), "L^3 T^-2 M^-1");
        assert_eq!(Dimension::parse(&sys, "L^3 T^-2 M^-1").unwrap(), gamma);

        let half = Dimension::from_exponents(&sys, vec![rat(1, 2), rat(-1, 1), rat(0, 1)]).unwrap();
        assert_eq!(half.to_string(), "L^(1/2) T^-1");
        assert_eq!(Dimension::parse(&sys, "L^(1/2) T^-1").unwrap(), half);

        let one = Dimension::dimensionless(&sys);
        assert_eq!(one.to_string(), "1");
        assert_eq!(Dimension::parse(&sys, "1").unwrap(), one);
    }

    #[test]
    fn parse_rejects_unknown_fundamental() {
        let sys = ltm();
        assert!(matches!(
            Dimension::parse(&sys, "Q^2"),
            Err(DimensionError::UnknownFundamental(_))
        ));
    }
}
