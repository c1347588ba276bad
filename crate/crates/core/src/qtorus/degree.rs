use std::fmt;

use serde::{Serialize, Serializer};

use crate::lattice::intmat::{self, IntMat};
use crate::lattice::LatticeError;

/// `deg_ε`, with `-∞` for the zero element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(i64),
}

impl Degree {
    pub fn finite(self) -> Option<i64> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::MinusInfinity => None,
        }
    }
}

impl std::ops::Add for Degree {
    type Output = Degree;
    fn add(self, o: Degree) -> Degree {
        match (self, o) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::MinusInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{}", d),
            Degree::MinusInfinity => write!(f, "-inf"),
        }
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Degree::Finite(d) => s.serialize_i64(*d),
            Degree::MinusInfinity => s.serialize_str("-inf"),
        }
    }
}

/// A Z-basis `ε` of `Z^n`, stored as the rows of `A ∈ GL_n(Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeBasis {
    a: IntMat,
    a_inv: IntMat,
    weight: Vec<i64>,
}

impl DegreeBasis {
    pub fn new(a: IntMat) -> Result<DegreeBasis, LatticeError> {
        let a_inv = intmat::inverse_unimodular(&a).ok_or(LatticeError::NotUnimodular)?;
        let weight = a_inv.iter().map(|r| r.iter().sum()).collect();
        Ok(DegreeBasis { a, a_inv, weight })
    }

    pub fn standard(n: usize) -> DegreeBasis {
        DegreeBasis::new(intmat::identity(n)).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &IntMat {
        &self.a
    }

    /// Coordinates `c` with `λ = Σ c_i ε_i`.
    pub fn coords(&self, lambda: &[i64]) -> Vec<i64> {
        intmat::vec_mat(lambda, &self.a_inv)
    }

    pub fn point(&self, c: &[i64]) -> Vec<i64> {
        intmat::vec_mat(c, &self.a)
    }

    /// `tr_ε(λ) = Σ_i c_i`.
    pub fn trace(&self, lambda: &[i64]) -> i64 {
        lambda.iter().zip(&self.weight).map(|(x, w)| x * w).sum()
    }

    /// All coordinates nonnegative.
    pub fn is_positive(&self, lambda: &[i64]) -> bool {
        self.coords(lambda).iter().all(|&c| c >= 0)
    }

    /// The `i`-th basis vector `ε_i`.
    pub fn axis(&self, i: usize) -> &[i64] {
        &self.a[i]
    }

    /// Lattice points `λ` with nonnegative coordinates and `tr_ε(λ) = t`.
    pub fn positive_layer(&self, t: i64) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut out = Vec::new();
        let mut c = vec![0i64; n];
        fn rec(k: usize, left: i64, c: &mut Vec<i64>, out: &mut Vec<Vec<i64>>, b: &DegreeBasis) {
            let n = c.len();
            if k + 1 == n {
                c[k] = left;
                out.push(b.point(c));
                return;
            }
            for v in 0..=left {
                c[k] = v;
                rec(k + 1, left - v, c, out, b);
            }
        }
        if t >= 0 && n > 0 {
            rec(0, t, &mut c, &mut out, self);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_trace() {
        let e = DegreeBasis::standard(2);
        assert_eq!(e.trace(&[2, -1]), 1);
        assert_eq!(e.positive_layer(2).len(), 3);
    }

    #[test]
    fn sheared_basis() {
        let e = DegreeBasis::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        // (1,2) = 1·(1,1) + 1·(0,1)
        assert_eq!(e.coords(&[1, 2]), vec![1, 1]);
        assert_eq!(e.trace(&[1, 2]), 2);
        assert!(!e.is_positive(&[1, 0]));
        assert!(DegreeBasis::new(vec![vec![2, 0], vec![0, 1]]).is_err());
        assert!(Degree::MinusInfinity < Degree::Finite(-5));
    }
}
