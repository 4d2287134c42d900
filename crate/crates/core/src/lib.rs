//! Prime-power orders of automorphisms of quasi-smooth hypersurfaces in
//! weighted projective spaces, decided with exact arithmetic.
//!
//! A family is a weight vector `a = (a_0, ..., a_{n+1})` with a degree `d`.
//! [`orders::admissible_orders`] sweeps candidate orders `q = p^r` and
//! returns certified, refuted or unresolved verdicts; [`klein`] covers the
//! extremal cyclic hypersurfaces.

pub mod ambient;
pub mod arith;
pub mod error;
pub mod klein;
pub mod orders;
pub mod quasismooth;

pub use ambient::{Monomial, MonomialSystem, WeightedFamily};
pub use arith::PrimePowerOrder;
pub use error::{Error, Hypothesis, Result};
