use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use super::ModError;
use crate::lattice::Presentation;
use crate::matlie::TorusMatrix;
use crate::qtorus::{same_presentation, Degree, DegreeBasis, TorusElement};

/// `v = Σ e_i q_i` in the right module `V = Q^ℓ`.
#[derive(Clone, PartialEq, Eq)]
pub struct ModVector {
    pres: Arc<Presentation>,
    coords: Vec<TorusElement>,
}

impl fmt::Debug for ModVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join("; "))
    }
}

impl ModVector {
    pub fn new(pres: &Arc<Presentation>, coords: Vec<TorusElement>) -> Result<ModVector, ModError> {
        if coords.iter().any(|c| !same_presentation(c.presentation(), pres)) {
            return Err(ModError::Malformed("coordinate over a different presentation".into()));
        }
        Ok(ModVector { pres: pres.clone(), coords })
    }

    pub fn zero(pres: &Arc<Presentation>, ell: usize) -> ModVector {
        ModVector { pres: pres.clone(), coords: vec![TorusElement::zero(pres); ell] }
    }

    /// The standard basis vector `e_i` (0-based).
    pub fn unit(pres: &Arc<Presentation>, ell: usize, i: usize) -> ModVector {
        let mut v = Self::zero(pres, ell);
        v.coords[i] = TorusElement::one(pres);
        v
    }

    /// Column `j` of a matrix.
    pub fn column(m: &TorusMatrix, j: usize) -> ModVector {
        ModVector { pres: m.presentation().clone(), coords: (0..m.size()).map(|i| m.entry(i, j).clone()).collect() }
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn size(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[TorusElement] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(TorusElement::is_zero)
    }

    pub fn add(&self, o: &ModVector) -> ModVector {
        ModVector { pres: self.pres.clone(), coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &ModVector) -> ModVector {
        ModVector { pres: self.pres.clone(), coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }

    /// `v · q`.
    pub fn right_mul(&self, q: &TorusElement) -> ModVector {
        ModVector { pres: self.pres.clone(), coords: self.coords.iter().map(|a| a * q).collect() }
    }

    /// `M · v`.
    pub fn left_apply(&self, m: &TorusMatrix) -> ModVector {
        let l = self.size();
        let coords = (0..l)
            .map(|i| {
                let mut acc = TorusElement::zero(&self.pres);
                for j in 0..l {
                    if !m.entry(i, j).is_zero() && !self.coords[j].is_zero() {
                        acc = &acc + &(m.entry(i, j) * &self.coords[j]);
                    }
                }
                acc
            })
            .collect();
        ModVector { pres: self.pres.clone(), coords }
    }

    /// `deg(v) = max_i deg(q_i)`.
    pub fn degree(&self, eps: &DegreeBasis) -> Degree {
        self.coords.iter().map(|c| c.degree(eps)).max().unwrap_or(Degree::MinusInfinity)
    }

    /// Whether every coordinate lies in `Q^+` for `ε`.
    pub fn is_positive(&self, eps: &DegreeBasis) -> bool {
        self.coords.iter().flat_map(|c| c.support()).all(|l| eps.is_positive(l))
    }

    /// No `x^{ε_i}` divides all coordinates inside `Q^+`.
    pub fn is_indivisible(&self, eps: &DegreeBasis) -> Result<bool, ModError> {
        if self.is_zero() {
            return Err(ModError::ZeroVector);
        }
        if !self.is_positive(eps) {
            return Err(ModError::NotPositive);
        }
        let pts: Vec<Vec<i64>> = self.coords.iter().flat_map(|c| c.support()).map(|l| eps.coords(l)).collect();
        Ok((0..eps.rank()).all(|i| pts.iter().any(|c| c[i] == 0)))
    }

    /// Right multiplication by the monomial that moves the support into
    /// `Q^+` with every `ε`-axis touched.
    pub fn positive_shift(&self, eps: &DegreeBasis) -> ModVector {
        let n = eps.rank();
        let mut lo = vec![i64::MAX; n];
        for l in self.coords.iter().flat_map(|c| c.support()) {
            for (k, c) in eps.coords(l).into_iter().enumerate() {
                lo[k] = lo[k].min(c);
            }
        }
        if lo[0] == i64::MAX {
            return self.clone();
        }
        let shift: Vec<i64> = eps.point(&lo.iter().map(|x| -x).collect::<Vec<_>>());
        self.right_mul(&TorusElement::x_pow(&self.pres, &shift))
    }

    /// Rescales so the first nonzero coordinate has leading coefficient 1.
    pub fn normalized(&self) -> ModVector {
        match self.coords.iter().find(|c| !c.is_zero()) {
            Some(c) => {
                let lead = c.leading().unwrap().1.inv().expect("nonzero");
                ModVector { pres: self.pres.clone(), coords: self.coords.iter().map(|a| a.scale(&lead)).collect() }
            }
            None => self.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coords.iter().map(TorusElement::to_json).collect())
    }

    pub fn from_json(pres: &Arc<Presentation>, v: &Value) -> Result<ModVector, ModError> {
        let arr = v.as_array().ok_or_else(|| ModError::Malformed("vector must be a list of elements".into()))?;
        let coords = arr.iter().map(|e| TorusElement::from_json(pres, e)).collect::<Result<Vec<_>, _>>().map_err(crate::matlie::MatLieError::from)?;
        ModVector::new(pres, coords)
    }
}

/// Matrix with the given columns.
pub fn from_columns(pres: &Arc<Presentation>, cols: &[ModVector]) -> TorusMatrix {
    TorusMatrix::from_fn(pres, cols.len(), |i, j| cols[j].coords[i].clone())
}
