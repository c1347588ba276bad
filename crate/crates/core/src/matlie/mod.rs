//! Matrix algebras `M_ℓ(Q)`, the Lie algebras `gl_ℓ(Q) ⊃ sl_ℓ(Q)`, the
//! standard MAD and structured (anti-)isomorphisms.

mod mad;
mod matrix;
mod morphism;

use thiserror::Error;

pub use mad::{mad_extension_test, standard_mad, MadOutcome, StandardMad};
pub use matrix::{sl_generators, TorusMatrix};
pub use morphism::{Generator, GlExtension, MorphismWord};

use crate::lattice::LatticeError;
use crate::qtorus::QtError;
use crate::scalar::{Field, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatLieError {
    #[error("matrix sizes do not match")]
    SizeMismatch,
    #[error("matrix is not in sl")]
    NotInSl,
    #[error("matrix is not diagonal")]
    NotDiagonal,
    #[error("characteristic {characteristic} is not good for sl_{ell}")]
    BadCharacteristic { characteristic: u64, ell: usize },
    #[error("word does not chain: {0}")]
    ChainMismatch(String),
    #[error("claimed inverse pair does not multiply to the identity")]
    NotInvertible,
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Qt(#[from] QtError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Characteristic 0, or `p > 3` with `p ∤ ℓ`.
pub fn good_characteristic(field: &Field, ell: usize) -> bool {
    let p = field.characteristic();
    p == 0 || (p > 3 && !(ell as u64).is_multiple_of(p))
}
