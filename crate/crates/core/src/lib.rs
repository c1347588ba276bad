//! Exact computer algebra for quantum tori and `sl_ℓ` over them.

pub mod scalar;
pub mod lattice;
pub mod qtorus;
pub mod linalg;
pub mod matlie;
pub mod modules;
pub mod specialize;
pub mod conjugacy;
pub mod random;
pub mod verify;
