//! Exact integer moments of the β-Jacobi ensemble, their replica and freezing
//! limits, and Monte Carlo checks for the position and value of the global
//! extremum of log-correlated processes.

pub mod contour;
pub mod error;
pub mod exactnum;
pub mod extremes;
pub mod jacobi_moments;
pub mod montecarlo;
pub mod partitions;
pub mod replica;

pub use error::{Error, Result};
pub use exactnum::{Embed, Field, Laurent, Poly, RatFunc, Rational, Scalar};
pub use jacobi_moments::MomentQuery;
pub use partitions::Partition;
pub use replica::Model;
