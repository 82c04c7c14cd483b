//! Exact symbolic kernel for wreath Macdonald polynomials.
//!
//! The crate is organized around the pipeline
//!
//! scalars -> partitions -> symfunc -> macdonald   (the "bosonic" side)
//!                       -> shuffle  -> fock       (the "fermionic" side)
//!
//! All coefficients live in the fraction field of integer Laurent
//! polynomials in s = q^(1/2), w = t^(1/2), so every half-integer power
//! of q and t that shows up in the toroidal-algebra conventions is an
//! honest monomial.

pub mod fock;
pub mod macdonald;
pub mod partitions;
pub mod scalars;
pub mod shuffle;
pub mod symfunc;

pub use partitions::{MayaDiagram, MultiPartition, Node, Partition};
pub use scalars::{Scalar, UniRat};
pub use symfunc::{Basis, SymFunc};
