//! Exact one-sided division in the domain `Q`.
//!
//! Both routines peel off lex-leading terms. A quotient, if it exists, has
//! its support inside the box `[min_k b − min_k a, max_k b − max_k a]` per
//! axis (top and bottom components multiply without cancellation), so a
//! candidate term outside the box proves there is no quotient.

use super::{Exponent, TorusElement};

fn bounds(x: &TorusElement) -> Vec<(i64, i64)> {
    let n = x.rank();
    (0..n)
        .map(|k| {
            let v: Vec<i64> = x.support().map(|l| l[k]).collect();
            (*v.iter().min().unwrap(), *v.iter().max().unwrap())
        })
        .collect()
}

impl TorusElement {
    fn divide(&self, b: &TorusElement, left: bool) -> Option<TorusElement> {
        assert!(!self.is_zero(), "division by zero element");
        if b.is_zero() {
            return Some(TorusElement::zero(self.presentation()));
        }
        let pres = self.presentation().clone();
        let ba = bounds(self);
        let bb = bounds(b);
        let lo: Vec<i64> = ba.iter().zip(&bb).map(|(a, b)| b.0 - a.0).collect();
        let hi: Vec<i64> = ba.iter().zip(&bb).map(|(a, b)| b.1 - a.1).collect();
        let (alpha, ca) = self.leading().map(|(l, c)| (l.clone(), c.clone()))?;
        let mut r = b.clone();
        let mut q = TorusElement::zero(&pres);
        while let Some((beta, cb)) = r.leading().map(|(l, c)| (l.clone(), c.clone())) {
            let gamma: Exponent = beta.iter().zip(&alpha).map(|(x, y)| x - y).collect();
            if gamma.iter().enumerate().any(|(k, &g)| g < lo[k] || g > hi[k]) {
                return None;
            }
            let t = if left { pres.cocycle(&alpha, &gamma) } else { pres.cocycle(&gamma, &alpha) };
            let c = cb.checked_div(&(&ca * &t)).ok()?;
            let term = TorusElement::monomial(&pres, gamma, c);
            let prod = if left { self * &term } else { &term * self };
            r = &r - &prod;
            q = &q + &term;
        }
        Some(q)
    }

    /// `q` with `self · q = b`, if it exists.
    pub fn left_divide(&self, b: &TorusElement) -> Option<TorusElement> {
        self.divide(b, true)
    }

    /// `q` with `q · self = b`, if it exists.
    pub fn right_divide(&self, b: &TorusElement) -> Option<TorusElement> {
        self.divide(b, false)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use crate::lattice::Presentation;
    use crate::qtorus::TorusElement;
    use crate::scalar::Field;

    #[test]
    fn divide_products() {
        let f = Field::rational_function(1);
        let p = Arc::new(Presentation::from_blocks(f, 2, &[f.s_pow(1).unwrap()]).unwrap());
        let a = &TorusElement::x_pow(&p, &[1, 0]) + &TorusElement::monomial(&p, vec![0, 1], f.from_i64(2));
        let q = &TorusElement::x_pow(&p, &[2, -1]) + &TorusElement::monomial(&p, vec![0, 0], f.parse("s+1").unwrap());
        assert_eq!(a.left_divide(&(&a * &q)).unwrap(), q);
        assert_eq!(a.right_divide(&(&q * &a)).unwrap(), q);
        assert!(a.left_divide(&TorusElement::one(&p)).is_none());
        assert!(a.left_divide(&(&(&a * &q) + &TorusElement::x_pow(&p, &[5, 5]))).is_none());
    }
}
