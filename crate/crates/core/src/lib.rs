//! Exact identity detection for angle polynomials of a polyhedron rotating
//! about a fixed axis.

pub mod apoly;
pub mod arith;
pub mod bench;
pub mod canonical;
pub mod enumerate;
pub mod error;
pub mod geom;
pub mod identity;
pub mod poly;
pub mod relabel;
pub mod scalar;
pub mod sweep;
pub mod table;
pub mod univariate;
pub mod upoly;

pub use apoly::{APoly, Element, Kind, Profile, VertexRef};
pub use arith::Sign;
pub use error::ApolyError;
pub use identity::{AlgebraicNumber, ConcreteFactor, RootRegistry};
pub use table::{FactorTable, TableConfig};
pub use univariate::VertexAssignment;

/// Exact integer polynomial in `t`; all normalized angle polynomials use it.
pub type IntPoly = poly::Poly<num_bigint::BigInt>;
/// Exact rational polynomial in `t`.
pub type RatPoly = poly::Poly<num_rational::BigRational>;
/// Floating-point polynomial, for quick numeric checks.
pub type FloatPoly = poly::Poly<f64>;
/// Polynomial over the fingerprint field.
pub type FingerPoly = poly::Poly<scalar::FpFinger>;
pub type IntPoint = geom::Vec3<num_bigint::BigInt>;
pub type RatPoint = geom::Vec3<num_rational::BigRational>;
pub type FloatPoint = geom::Vec3<f64>;
