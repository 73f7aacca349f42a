//! Equivariant Cerf theory for SU(n) at desk scale.
//!
//! The crate classifies reducibility strata and their stabilizers ([`strata`]),
//! does exact bookkeeping in the representation rings of those stabilizers
//! ([`repcat`]), builds the bifurcation generators and the projection that turns
//! a total index into a weight ([`bifgroup`]), computes equivariant spectral flow
//! of symmetric matrix paths ([`specflow`]), finds critical orbits of invariant
//! functions numerically ([`morse`]), and evaluates Casson-type sums over moduli
//! datasets ([`casson`]).
//!
//! Start with the runnable programs in `examples/`.

pub mod bifgroup;
pub mod casson;
pub mod cli;
pub mod error;
pub mod group;
pub mod morse;
pub mod repcat;
pub mod ringcore;
pub mod specflow;
pub mod strata;

pub use error::{Error, Result};
