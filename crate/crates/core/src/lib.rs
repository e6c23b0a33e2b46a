//! Integral module structure of ideals in scaffolded extensions.
//!
//! The numerical engine ([`structure`]) turns shift parameters and an ideal
//! exponent into the freeness verdict, minimal generator count and embedding
//! dimension. [`special`] holds closed-form classifications for families of
//! extensions, and [`insep`] builds an exact divided-power scaffold on a
//! purely inseparable extension ([`localfield`]) that checks the engine
//! independently.

pub mod error;
pub mod insep;
pub mod localfield;
pub mod padic;
pub mod special;
pub mod structure;

pub use error::{Error, Result};
pub use insep::{build_realization, DividedPowerElement, ScaffoldRealization, VerificationReport};
pub use localfield::{InsepElement, InsepParams, LaurentPoly, Valuation};
pub use padic::{DigitVector, Radix};
pub use structure::{analyze, IdealStructure, ScaffoldParams, StructureReport};
