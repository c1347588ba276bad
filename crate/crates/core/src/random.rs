//! Random scalars, elements, bases and matrices for property checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lattice::intmat::{self, IntMat};
use crate::lattice::{central_lattice, Presentation};
use crate::matlie::TorusMatrix;
use crate::qtorus::TorusElement;
use crate::scalar::{Field, Scalar};

/// A nonzero scalar with small numerators.
pub fn scalar<R: Rng>(field: &Field, rng: &mut R) -> Scalar {
    loop {
        let a = field.from_i64(rng.gen_range(-4..=4));
        let x = match field {
            Field::Prime(p) => field.from_i64(rng.gen_range(1..*p as i64)),
            Field::Rational => {
                let d = field.from_i64(rng.gen_range(1..=3));
                a.checked_div(&d).unwrap()
            }
            Field::Cyclotomic(_) => {
                let b = field.from_i64(rng.gen_range(-3..=3));
                let k = rng.gen_range(0..field.root_modulus() as i64);
                &a + &(&b * &field.omega_pow(k))
            }
            Field::RationalFunction(_) => {
                let b = field.from_i64(rng.gen_range(-3..=3));
                let k = rng.gen_range(0..field.root_modulus() as i64);
                let s = field.s_pow(rng.gen_range(-2..=2)).unwrap();
                let num = &a + &(&(&b * &field.omega_pow(k)) * &s);
                if rng.gen_bool(0.2) {
                    let den = &field.one() + &field.s_pow(1).unwrap();
                    num.checked_div(&den).unwrap()
                } else {
                    num
                }
            }
        };
        if !x.is_zero() {
            return x;
        }
    }
}

/// `±c·ω^k` with `1 ≤ c ≤ 3`: cheap coefficients for large products.
pub fn small_scalar<R: Rng>(field: &Field, rng: &mut R) -> Scalar {
    let c = field.from_i64(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
    match field {
        Field::Cyclotomic(_) | Field::RationalFunction(_) => &c * &field.omega_pow(rng.gen_range(0..field.root_modulus() as i64)),
        _ => c,
    }
}

/// A nonzero element with at most `max_terms` terms and exponents in
/// `[-range, range]`.
pub fn element<R: Rng>(p: &Arc<Presentation>, rng: &mut R, max_terms: usize, range: i64) -> TorusElement {
    loop {
        let k = rng.gen_range(1..=max_terms.max(1));
        let terms = (0..k).map(|_| (exponent(p.rank(), rng, -range, range), scalar(&p.field(), rng)));
        let x = TorusElement::from_terms(p, terms);
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn exponent<R: Rng>(n: usize, rng: &mut R, lo: i64, hi: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// A nonzero scalar multiple of a single monomial.
pub fn unit<R: Rng>(p: &Arc<Presentation>, rng: &mut R, range: i64) -> TorusElement {
    TorusElement::monomial(p, exponent(p.rank(), rng, -range, range), scalar(&p.field(), rng))
}

/// A product of elementary row operations and sign changes, with entries
/// bounded by `bound` in absolute value.
pub fn unimodular<R: Rng>(n: usize, rng: &mut R, steps: usize, bound: i64) -> IntMat {
    let mut m = intmat::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut next = m.clone();
        if n == 1 || rng.gen_bool(0.2) {
            next[i].iter_mut().for_each(|x| *x = -*x);
        } else {
            let j = (i + rng.gen_range(1..n)) % n;
            let c = if rng.gen_bool(0.5) { 1 } else { -1 };
            let row_j = next[j].clone();
            next[i].iter_mut().zip(&row_j).for_each(|(x, y)| *x += c * y);
        }
        if next.iter().flatten().all(|x| x.abs() <= bound) {
            m = next;
        }
    }
    if n > 1 && rng.gen_bool(0.5) {
        m.shuffle(rng);
    }
    m
}

/// A random element of the centre: a scalar plus central monomials drawn
/// from small combinations of a basis of the central lattice.
pub fn central<R: Rng>(p: &Arc<Presentation>, rng: &mut R) -> TorusElement {
    let f = p.field();
    let mut z = TorusElement::scalar(p, scalar(&f, rng));
    let basis = central_lattice(p).map(|c| c.basis).unwrap_or_default();
    if basis.is_empty() {
        return z;
    }
    for _ in 0..rng.gen_range(0..=2) {
        let coeffs: Vec<i64> = (0..basis.len()).map(|_| rng.gen_range(-1..=1)).collect();
        let lambda = intmat::vec_mat(&coeffs, &basis);
        z = &z + &TorusElement::monomial(p, lambda, scalar(&f, rng));
    }
    z
}

/// A matrix whose entries are zero with probability `sparsity` and small
/// random elements otherwise.
pub fn matrix<R: Rng>(p: &Arc<Presentation>, ell: usize, rng: &mut R, sparsity: f64) -> TorusMatrix {
    TorusMatrix::from_entries(
        p,
        (0..ell)
            .map(|_| (0..ell).map(|_| if rng.gen_bool(sparsity) { TorusElement::zero(p) } else { element(p, rng, 2, 2) }).collect())
            .collect(),
    )
    .expect("square matrix over one presentation")
}
