//! Translation-invariant block designs over elementary abelian groups `Z_p^n`.
//!
//! The crate builds designs whose blocks are unions of parallel lines of the
//! affine space AG(n, p), verifies them (balance, simplicity, zero-sum,
//! line structure) and searches for base-block families by exact
//! λ-fold difference cover.
//!
//! ```
//! use additive_designs::{design, embedded, orbit};
//!
//! let family = embedded::family().unwrap();
//! let d = orbit::develop(&family);
//! assert_eq!(d.len(), 432);
//! assert!(design::check_t_design(&d, 2, 2).unwrap().is_balanced());
//! ```

pub mod design;
pub mod embedded;
pub mod error;
pub mod geometry;
pub mod io;
pub mod orbit;
pub mod search;

pub use error::{Error, Result};
pub use geometry::{Geometry, Point};
