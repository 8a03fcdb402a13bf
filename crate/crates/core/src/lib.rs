//! Algebraic universal cycles on the Grassmannian G_q(2, n).
//!
//! The pipeline: build the extension field ([`field`]), split E^× \ F^× into
//! projective-ratio classes ([`orbit`]), pick one representative per class
//! with the right global product ([`cycle`]), and certify the resulting cycle
//! against an independent enumeration of the Grassmannian ([`verify`],
//! [`grassmann`]). [`search`] looks for orderings that are universal for
//! several window sizes at once.

pub mod field;
pub mod grassmann;
pub mod io;
pub mod cli;
pub mod cycle;
pub mod orbit;
pub mod search;
pub mod verify;

pub use field::{Exponent, FieldContext, FieldElement, FieldError};
pub use grassmann::{enumerate_grassmannian, gaussian_binomial, span, Subspace};
pub use orbit::{orbit_partition, MobiusTransform, OrbitPartition, RatioClass};
