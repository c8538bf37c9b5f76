//! Exact power-series toolkit for nonminimal real hypersurfaces in ℂⁿ⁺¹:
//! normal-form invariants, CR frames and Levi data, identity checks for
//! holomorphic maps, Briot-Bouquet series solving and jet prolongation.

pub mod bb;
pub mod coeff;
pub mod corpus;
pub mod crmap;
pub mod error;
pub mod frame;
pub mod hypersurface;
pub mod input;
pub mod levi;
pub mod linalg;
pub mod literal;
pub mod poly;
pub mod prolong;
pub mod report;
pub mod series;

pub use coeff::GaussRational;
pub use error::{Error, ErrorKind, Result};
pub use literal::{parse_series, VarNames};
pub use series::{CrSpace, Monomial, Series};
