//! Relative homological algebra over finite-dimensional algebras `kQ/I` over prime
//! fields: relative projective resolutions, relative cohomology, split complete
//! resolutions and complete cohomology, for proper classes of short exact sequences.

pub mod algebra;
pub mod cohomology;
pub mod instance;
pub mod linalg;
pub mod modcat;
pub mod propclass;
pub mod resolution;
pub mod verify;
