//! Exact scalars and the bigraded commutative algebra of differential
//! polynomials in `u_{k1,k2}`, `ε`, `μ`.

pub mod calculus;
pub mod json;
mod monomial;
mod poly;
mod truncation;

pub use calculus::{dx, dxy, dy, jet_support, partial, scale_u, variational_derivative, Direction};
pub use monomial::{DiffMonomial, JetPower, JetVar};
pub(crate) use poly::Accumulator;
pub use poly::{Bidegree, DiffPoly};
pub use truncation::TruncationContext;
