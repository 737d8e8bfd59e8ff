//! Exact dimensional calculus for physical quantities.
//!
//! The crate is organized around a small tower of abstractions:
//!
//! * [`dimension`] — exact rational exponent vectors over an ordered list of
//!   fundamental quantities, with the full abelian-group calculus
//!   (product, inverse, rational powers).
//! * [`quantity`] — scalar quantities as magnitudes relative to a unit frame,
//!   including frame changes and the positive-range verification
//!   substructure ([`posrange`]).
//! * [`vec3q`] — dimensioned Euclidean 3-vectors with dimensioned inner
//!   product, norm and direction/magnitude decomposition.
//! * [`pi`] — exact Buckingham Pi machinery: integer kernels of dimension
//!   matrices, dilation actions, law reduction and dilation-symmetry
//!   subgroups.
//! * [`gravsim`] — a dimension-checked Newtonian N-body integrator with
//!   similarity transformations and trace I/O.
//! * [`expr`] — a recursive-descent parser and dimension checker for
//!   unit-annotated quantity expressions.

pub mod dimension;
pub mod elliptic;
pub mod expr;
pub mod gravsim;
pub mod pi;
pub mod posrange;
pub mod quantity;
pub mod vec3q;

pub use dimension::{Dimension, DimensionError, DimensionSystem, Rational};
pub use quantity::{Quantity, QuantityError, UnitFrame};
pub use vec3q::Vec3Q;
