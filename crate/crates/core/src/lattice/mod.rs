//! Integer lattices attached to a presentation: the central grading group,
//! the fgc test, canonical presentations and symbol decompositions.

mod canonical;
pub mod intmat;
mod presentation;

use thiserror::Error;

pub use canonical::{canonical_presentation, is_canonical_shape, symbol_decomposition, SymbolDecomposition};
pub use intmat::{smith_normal_form, IntMat};
pub use presentation::{field_json, parse_field, Presentation};

use crate::scalar::{Order, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix is not in GL_n(Z)")]
    NotUnimodular,
    #[error("entry q_{i}{j} is not of the form root-of-unity times a power of s")]
    UnsupportedScalarKind { i: usize, j: usize },
    #[error("presentation is not fgc")]
    NotFgc,
    #[error("canonicalization failed: {0}")]
    CanonicalizationFailed(String),
    #[error("presentation is not canonical: {0}")]
    NotCanonical(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("entry q_{i}{j}: {source}")]
    EntryParse { i: usize, j: usize, source: ScalarError },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralLattice {
    /// Rows generate Ξ, in Hermite normal form.
    pub basis: IntMat,
    pub index: Order,
}

impl CentralLattice {
    /// Whether `λ` lies in the row span of the basis.
    pub fn contains(&self, lambda: &[i64]) -> bool {
        if self.basis.is_empty() {
            return lambda.iter().all(|&x| x == 0);
        }
        let mut m = self.basis.clone();
        m.push(lambda.to_vec());
        intmat::row_lattice_basis(&m) == self.basis
    }
}

/// `Ξ = {λ : Π_i q_ij^{λ_i} = 1 for all j}`.
pub fn central_lattice(p: &Presentation) -> Result<CentralLattice, LatticeError> {
    let n = p.rank();
    let exps = p.exponent_data().ok_or_else(|| {
        let (i, j) = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| p.entry(i, j).root_monomial().is_none())
            .unwrap();
        LatticeError::UnsupportedScalarKind { i: i + 1, j: j + 1 }
    })?;
    let big_m = p.field().root_modulus() as i64;
    // Left kernel of [[A, B], [M·I, 0]] over Z, projected to the λ part.
    let mut sys = vec![vec![0i64; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            sys[i][j] = exps[i][j].0;
            sys[i][n + j] = exps[i][j].1;
        }
        sys[n + i][i] = big_m;
    }
    let ker = intmat::left_kernel(&sys);
    let proj: IntMat = ker.iter().map(|r| r[..n].to_vec()).collect();
    let basis = intmat::row_lattice_basis(&proj);
    let index = if basis.len() == n { Order::Finite(intmat::det(&basis).unsigned_abs()) } else { Order::Infinite };
    Ok(CentralLattice { basis, index })
}

/// Every `q_ij` has finite multiplicative order.
pub fn is_fgc(p: &Presentation) -> bool {
    p.entry_orders().iter().flatten().all(Order::is_finite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    #[test]
    fn centre_of_symbol() {
        for l in [2u32, 3, 5, 6, 12] {
            let f = Field::cyclotomic(l);
            let p = Presentation::from_blocks(f, 2, &[f.zeta(l).unwrap()]).unwrap();
            let c = central_lattice(&p).unwrap();
            assert_eq!(c.basis, vec![vec![l as i64, 0], vec![0, l as i64]]);
            assert_eq!(c.index, Order::Finite((l * l) as u64));
        }
    }

    #[test]
    fn centre_rank_one_and_generic() {
        let c = central_lattice(&Presentation::commutative(Field::Rational, 1)).unwrap();
        assert_eq!((c.basis, c.index), (vec![vec![1]], Order::Finite(1)));
        let f = Field::rational_function(1);
        let p = Presentation::from_blocks(f, 2, &[f.s_pow(1).unwrap()]).unwrap();
        let c = central_lattice(&p).unwrap();
        assert!(c.basis.is_empty());
        assert_eq!(c.index, Order::Infinite);
        assert!(!is_fgc(&p));
    }

    #[test]
    fn centre_mixed() {
        // q12 = s, q13 = ζ_4, q23 = 1: λ is central iff λ1 = λ2 = 0 and 4 | λ3
        let f = Field::rational_function(4);
        let one = f.one();
        let p = Presentation::from_upper(f, 3, &[vec![f.s_pow(1).unwrap(), f.zeta(4).unwrap()], vec![one]]).unwrap();
        let c = central_lattice(&p).unwrap();
        assert_eq!(c.basis, vec![vec![0, 0, 4]]);
        assert!(c.contains(&[0, 0, 8]));
        assert!(!c.contains(&[0, 0, 2]));
    }

    #[test]
    fn unsupported_entry() {
        let f = Field::Rational;
        let p = Presentation::from_upper(f, 2, &[vec![f.from_i64(2)]]).unwrap();
        assert!(matches!(central_lattice(&p), Err(LatticeError::UnsupportedScalarKind { .. })));
        assert!(!is_fgc(&p));
    }
}
