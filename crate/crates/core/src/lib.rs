//! Transfer systems on the subgroup lattice of the cyclic group `C_{p^m q^n}`.
//!
//! The subgroup lattice of `C_{p^m q^n}` is the grid `[m] x [n]`; a subgroup
//! `C_{p^i q^j}` is the point `(i, j)`. On top of that model this crate provides
//!
//! * [`grid`]: grid and divisor lattices, order, meets and cover edges;
//! * [`transfer`]: transfer systems, closure under the axioms, saturation and
//!   brute-force enumeration;
//! * [`cover`]: saturated covers, their horizontal/vertical codes, and the
//!   classification map driving the counting recursion;
//! * [`counting`] and [`series`]: exact counts of saturated transfer systems by
//!   recurrence, closed formula and exponential generating function;
//! * [`modular`]: index sets, the transfer systems they induce, and an explicit
//!   realization of every saturated transfer system on `C_{p q^n}`.

pub mod arith;
pub mod counting;
pub mod cover;
pub mod error;
pub mod grid;
pub mod json;
pub mod modular;
pub mod series;
pub mod transfer;

mod bits;

pub use counting::BigCount;
pub use cover::{ClassLabel, CodePair, SaturatedCover};
pub use error::{Error, Result};
pub use grid::{DivisorLattice, FiniteLattice, GridEdge, GridPoint, GridShape, Orientation};
pub use modular::{GroupSpec, IndexSet, RealizationCertificate, TopRowType};
pub use series::RationalSeries2;
pub use transfer::{DivisorSystem, Relation, System, TransferSystem};
