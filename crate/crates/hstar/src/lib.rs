//! Exact computation with homogeneous star operations on numerical
//! semigroup rings k[S].
//!
//! Homogeneous fractional ideals of k[S] correspond to fractional ideals
//! of the semigroup S, so star operations become closure tables on a
//! finite poset and everything here is exact integer arithmetic: ideal
//! algebra, validation and enumeration of star operations, the Zariski
//! topology on the resulting finite space with a constructive spectrality
//! check, and a polynomial content layer for the extension operator.

pub mod content;
pub mod enumerate;
pub mod expr;
pub mod ideal;
pub mod semigroup;
pub mod star;
pub mod topology;
pub mod verify;

pub use ideal::{FracIdeal, IdealError, StdPoset};
pub use semigroup::{NumericalSemigroup, SemigroupError};


pub use star::{StarContext, StarOp};
