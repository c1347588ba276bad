use std::sync::Arc;

use super::{QtError, TorusElement};
use crate::lattice::intmat::{self, IntMat};
use crate::lattice::Presentation;
use crate::scalar::Scalar;

/// A ring isomorphism `Q_S → Q_T` determined by `x_i ↦ c_i x^{μ_i}`.
#[derive(Clone, Debug)]
pub struct MonomialMap {
    source: Arc<Presentation>,
    target: Arc<Presentation>,
    images: Vec<TorusElement>,
}

impl MonomialMap {
    /// Checks that the images satisfy the source relations and that the
    /// exponent matrix `(μ_i)` is unimodular.
    pub fn new(source: &Arc<Presentation>, target: &Arc<Presentation>, images: Vec<(Vec<i64>, Scalar)>) -> Result<MonomialMap, QtError> {
        let n = source.rank();
        if images.len() != n || target.rank() != n {
            return Err(QtError::RankMismatch { got: images.len(), rank: n });
        }
        let mu: IntMat = images.iter().map(|(m, _)| m.clone()).collect();
        if !intmat::is_unimodular(&mu) {
            return Err(QtError::Malformed("generator images do not form a lattice basis".into()));
        }
        let ys: Vec<TorusElement> = images.into_iter().map(|(m, c)| TorusElement::monomial(target, m, c)).collect();
        if ys.iter().any(TorusElement::is_zero) {
            return Err(QtError::Malformed("zero generator image".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                let lhs = &ys[i] * &ys[j];
                let rhs = (&ys[j] * &ys[i]).scale(source.entry(i, j));
                if lhs != rhs {
                    return Err(QtError::Malformed(format!("images of x_{} and x_{} violate the source relation", i + 1, j + 1)));
                }
            }
        }
        Ok(MonomialMap { source: source.clone(), target: target.clone(), images: ys })
    }

    pub fn source(&self) -> &Arc<Presentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presentation> {
        &self.target
    }

    pub fn images(&self) -> &[TorusElement] {
        &self.images
    }

    /// Image of `x^λ`.
    pub fn apply_exponent(&self, lambda: &[i64]) -> TorusElement {
        let mut acc = TorusElement::one(&self.target);
        for (y, &k) in self.images.iter().zip(lambda) {
            if k != 0 {
                acc = &acc * &y.pow(k);
            }
        }
        acc
    }

    pub fn apply(&self, x: &TorusElement) -> Result<TorusElement, QtError> {
        if !super::same_presentation(x.presentation(), &self.source) {
            return Err(QtError::PresentationMismatch);
        }
        let mut out = TorusElement::zero(&self.target);
        for (l, c) in x.terms() {
            out = &out + &self.apply_exponent(l).scale(c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    #[test]
    fn base_change_is_multiplicative() {
        let f = Field::cyclotomic(3);
        let s = Presentation::from_blocks(f, 2, &[f.zeta(3).unwrap()]).unwrap().into_arc();
        let a = vec![vec![2, 1], vec![1, 1]];
        let t = s.change_basis(&intmat::inverse_unimodular(&a).unwrap()).unwrap().into_arc();
        let phi = MonomialMap::new(&s, &t, a.iter().map(|r| (r.clone(), f.one())).collect()).unwrap();
        let u = &TorusElement::x_pow(&s, &[1, -2]) + &TorusElement::x_pow(&s, &[0, 3]);
        let v = &TorusElement::x_pow(&s, &[2, 1]) + &TorusElement::one(&s);
        assert_eq!(phi.apply(&(&u * &v)).unwrap(), &phi.apply(&u).unwrap() * &phi.apply(&v).unwrap());
    }

    #[test]
    fn rejects_bad_images() {
        let f = Field::cyclotomic(3);
        let s = Presentation::from_blocks(f, 2, &[f.zeta(3).unwrap()]).unwrap().into_arc();
        assert!(MonomialMap::new(&s, &s, vec![(vec![0, 1], f.one()), (vec![1, 0], f.one())]).is_err());
        assert!(MonomialMap::new(&s, &s, vec![(vec![2, 0], f.one()), (vec![0, 1], f.one())]).is_err());
    }
}
