//! Finite windows of bounded-geometry metric spaces and the exact operator
//! constructions that live on them: partial translations, finite-propagation
//! operators, Følner/paradoxicality certificates, and the ordered K₀ calculus
//! for towers of finite groups.
//!
//! All algebraic identities are checked in exact rational arithmetic; floating
//! point appears only inside operator-norm estimation.

pub mod amen;
pub mod error;
pub mod ktheory;
pub mod norm;
pub mod operator;
pub mod roe;
pub mod scalar;
pub mod space;
pub mod translations;

pub use error::{Error, Result};

/// Exact scalar used by every algebraic construction.
pub type Rational = num::BigRational;

/// Sparse operator with exact rational entries.
pub type RationalOperator = operator::SparseOperator<Rational>;

/// Sparse operator with floating-point entries, used by norm estimators.
pub type FloatOperator = operator::SparseOperator<f64>;

/// Shorthand for an exact integer-valued rational.
pub fn rat(n: i64) -> Rational {
    num::BigRational::from_integer(n.into())
}

/// Exact rational n/d.
pub fn ratio(n: i64, d: i64) -> Rational {
    num::BigRational::new(n.into(), d.into())
}
