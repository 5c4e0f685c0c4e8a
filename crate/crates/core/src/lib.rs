//! Exact symbolic engine for the noncommutative (Moyal) KdV hierarchy and
//! quadratic double ramification intersection numbers.

pub mod cancel;
pub mod drgeom;
pub mod error;
pub mod exactalg;
pub mod hierarchy;
pub mod moyal;
pub mod psdo;
pub mod random;
pub mod scalar;

pub use cancel::CancelToken;
pub use error::{Error, Result};
pub use exactalg::{Bidegree, DiffMonomial, DiffPoly, JetVar, TruncationContext};
pub use scalar::Scalar;
