//! Right `Q`-modules `V = Q^ℓ`, idempotent systems, degree slices of
//! submodules and the construction of conjugating matrices.

mod vector;

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

pub use vector::{from_columns, ModVector};

use crate::lattice::Presentation;
use crate::linalg::{self, SparseRow};
use crate::matlie::{MatLieError, MorphismWord, TorusMatrix};
use crate::qtorus::{Degree, DegreeBasis, Exponent, TorusElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModError {
    #[error("zero vector")]
    ZeroVector,
    #[error("vector is not in the positive part")]
    NotPositive,
    #[error("word has an odd number of anti-generators")]
    NotAssociativeWord,
    #[error("idempotent system is invalid: {0}")]
    SystemInvalid(String),
    #[error("no nonzero vector of degree <= {0}")]
    WindowExhausted(i64),
    #[error("summand {index} is not cyclic")]
    NotCyclic { index: usize, witness: ModVector },
    #[error("generators do not assemble to an invertible matrix")]
    NotInvertible,
    #[error("minimal vector {0:?} is divisible")]
    DivisibleMinimal(ModVector),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    MatLie(#[from] MatLieError),
}

/// Idempotents `e_1, …, e_m` with `e_i e_j = δ_ij e_i` and `Σ e_i = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalSystem {
    idempotents: Vec<TorusMatrix>,
}

impl OrthogonalSystem {
    pub fn new(idempotents: Vec<TorusMatrix>) -> Result<OrthogonalSystem, ModError> {
        let Some(first) = idempotents.first() else {
            return Err(ModError::SystemInvalid("empty system".into()));
        };
        let pres = first.presentation().clone();
        let l = first.size();
        let mut sum = TorusMatrix::zero(&pres, l);
        for (i, a) in idempotents.iter().enumerate() {
            for (j, b) in idempotents.iter().enumerate() {
                let p = a.checked_mul(b)?;
                let ok = if i == j { p == *a } else { p.is_zero() };
                if !ok {
                    return Err(ModError::SystemInvalid(format!("e_{} e_{} violates orthogonality", i + 1, j + 1)));
                }
            }
            sum = sum.checked_add(a)?;
        }
        if sum != TorusMatrix::identity(&pres, l) {
            return Err(ModError::SystemInvalid("idempotents do not sum to the identity".into()));
        }
        Ok(OrthogonalSystem { idempotents })
    }

    pub fn standard(pres: &Arc<Presentation>, ell: usize) -> OrthogonalSystem {
        OrthogonalSystem { idempotents: (0..ell).map(|i| TorusMatrix::e(pres, ell, i, i)).collect() }
    }

    pub fn idempotents(&self) -> &[TorusMatrix] {
        &self.idempotents
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        self.idempotents[0].presentation()
    }

    pub fn ell(&self) -> usize {
        self.idempotents[0].size()
    }

    /// `2·(max entry degree) + 4`.
    pub fn default_window(&self, eps: &DegreeBasis) -> i64 {
        let d = self
            .idempotents
            .iter()
            .flat_map(|e| e.entries().iter().flatten())
            .filter_map(|a| a.degree(eps).finite())
            .max()
            .unwrap_or(0)
            .max(0);
        2 * d + 4
    }
}

/// `(w(E_11), …, w(E_ℓℓ))` for an associative word.
pub fn system_from_morphism(w: &MorphismWord) -> Result<OrthogonalSystem, ModError> {
    if !w.is_associative() {
        return Err(ModError::NotAssociativeWord);
    }
    let l = w.ell();
    let es = (0..l).map(|i| w.apply(&TorusMatrix::e(w.source(), l, i, i))).collect::<Result<Vec<_>, _>>()?;
    OrthogonalSystem::new(es)
}

/// The right submodule `U = e(V)` of an idempotent `e`.
#[derive(Clone, Debug)]
pub struct SubmoduleSpec {
    e: TorusMatrix,
}

impl SubmoduleSpec {
    pub fn new(e: TorusMatrix) -> Result<SubmoduleSpec, ModError> {
        if !e.is_idempotent() {
            return Err(ModError::SystemInvalid("defining matrix is not idempotent".into()));
        }
        Ok(SubmoduleSpec { e })
    }

    pub fn idempotent(&self) -> &TorusMatrix {
        &self.e
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        self.e.presentation()
    }

    pub fn ell(&self) -> usize {
        self.e.size()
    }

    pub fn contains(&self, v: &ModVector) -> bool {
        v.left_apply(&self.e) == *v
    }

    /// Unknowns `(j, λ)` of `V_t` and the equations `(e − 1)v = 0`.
    fn slice_system(&self, t: i64, eps: &DegreeBasis) -> (Vec<(usize, Exponent)>, Vec<SparseRow>) {
        let l = self.ell();
        let pres = self.presentation();
        let pts: Vec<Exponent> = (0..=t).flat_map(|k| eps.positive_layer(k)).collect();
        let unknowns: Vec<(usize, Exponent)> = (0..l).flat_map(|j| pts.iter().map(move |p| (j, p.clone()))).collect();
        let mut rows: HashMap<(usize, Exponent), SparseRow> = HashMap::new();
        let minus_one = -&pres.field().one();
        for (col, (j, lam)) in unknowns.iter().enumerate() {
            for i in 0..l {
                for (kappa, c) in self.e.entry(i, *j).terms() {
                    let coef = c * &pres.cocycle(kappa, lam);
                    let at: Exponent = kappa.iter().zip(lam).map(|(a, b)| a + b).collect();
                    rows.entry((i, at)).or_default().push((col, coef));
                }
            }
            rows.entry((*j, lam.clone())).or_default().push((col, minus_one.clone()));
        }
        let mut keys: Vec<_> = rows.keys().cloned().collect();
        keys.sort();
        (unknowns, keys.into_iter().map(|k| rows.remove(&k).unwrap()).collect())
    }

    fn assemble(&self, unknowns: &[(usize, Exponent)], x: &[crate::scalar::Scalar]) -> ModVector {
        let pres = self.presentation();
        let mut coords = vec![TorusElement::zero(pres); self.ell()];
        for ((j, lam), c) in unknowns.iter().zip(x) {
            if !c.is_zero() {
                coords[*j] = &coords[*j] + &TorusElement::monomial(pres, lam.clone(), c.clone());
            }
        }
        ModVector::new(pres, coords).expect("same presentation")
    }

    /// Upper bound for `dim U_t`, exact when zero.
    fn slice_nullity_bound(&self, t: i64, eps: &DegreeBasis) -> usize {
        let (unknowns, eqs) = self.slice_system(t, eps);
        linalg::modular_nullity(&eqs, unknowns.len(), self.presentation().field())
            .unwrap_or_else(|| linalg::sparse_kernel(&eqs, unknowns.len(), self.presentation().field()).len())
    }
}

/// Basis of `U_t = {v ∈ V^+ : deg v ≤ t, e v = v}` over the coefficient field.
pub fn plus_slice(u: &SubmoduleSpec, t: i64, eps: &DegreeBasis) -> Vec<ModVector> {
    if t < 0 {
        return Vec::new();
    }
    let (unknowns, eqs) = u.slice_system(t, eps);
    linalg::sparse_kernel(&eqs, unknowns.len(), u.presentation().field()).iter().map(|x| u.assemble(&unknowns, x)).collect()
}

/// A nonzero vector of least degree in `U^+`, normalized.
pub fn minimal_vector(u: &SubmoduleSpec, eps: &DegreeBasis, t_max: i64) -> Result<ModVector, ModError> {
    for t in 0..=t_max {
        if u.slice_nullity_bound(t, eps) == 0 {
            continue;
        }
        if let Some(v) = plus_slice(u, t, eps).into_iter().next() {
            let v = v.normalized();
            if !v.is_indivisible(eps)? {
                return Err(ModError::DivisibleMinimal(v));
            }
            return Ok(v);
        }
    }
    Err(ModError::WindowExhausted(t_max))
}

/// `q` with `u0 · q = v`, if it exists.
pub fn solve_membership(v: &ModVector, u0: &ModVector) -> Option<TorusElement> {
    let k = (0..u0.size()).filter(|&i| !u0.coords()[i].is_zero()).min_by_key(|&i| u0.coords()[i].len())?;
    let q = u0.coords()[k].left_divide(&v.coords()[k])?;
    (u0.right_mul(&q) == *v).then_some(q)
}

fn binomial(n: i64, k: i64) -> usize {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as usize
}

/// Outcome of [`certify_cyclic`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyclicCertificate {
    /// `U = u0·Q`, witnessed by `e·e_j = u0·q_j` for every column.
    Cyclic { u0: ModVector, degree: i64, column_quotients: Vec<TorusElement> },
    /// `v0 ∈ U^+ \ u0·Q^+`.
    CounterWitness { u0: ModVector, v0: ModVector },
    WindowExhausted(i64),
}

/// Decides `U = u0·Q` exactly from the columns of `e`, and checks
/// `U_t = (u0·Q^+)_t` for `t ≤ t_max` by dimension.
pub fn certify_cyclic(u: &SubmoduleSpec, eps: &DegreeBasis, t_max: i64) -> Result<CyclicCertificate, ModError> {
    let u0 = match minimal_vector(u, eps, t_max) {
        Ok(v) => v,
        Err(ModError::WindowExhausted(t)) => return Ok(CyclicCertificate::WindowExhausted(t)),
        Err(e) => return Err(e),
    };
    let d = u0.degree(eps).finite().expect("nonzero");
    let mut quotients = Vec::new();
    for j in 0..u.ell() {
        let col = ModVector::column(u.idempotent(), j);
        match solve_membership(&col, &u0) {
            Some(q) => quotients.push(q),
            None => return Ok(CyclicCertificate::CounterWitness { v0: col.positive_shift(eps), u0 }),
        }
    }
    let n = eps.rank() as i64;
    let expected = binomial(t_max - d + n, n);
    if u.slice_nullity_bound(t_max, eps) > expected {
        let slice = plus_slice(u, t_max, eps);
        if slice.len() > expected {
            for v in slice {
                let member = solve_membership(&v, &u0).is_some_and(|q| q.support().all(|l| eps.is_positive(l)));
                if !member {
                    return Ok(CyclicCertificate::CounterWitness { u0, v0: v });
                }
            }
            return Err(ModError::SystemInvalid("slice dimension exceeds the span of its members".into()));
        }
    }
    Ok(CyclicCertificate::Cyclic { u0, degree: d, column_quotients: quotients })
}

/// `g` with `g E_ii g^{-1} = e_i`, its inverse, and the cyclic generators.
#[derive(Clone, Debug)]
pub struct Conjugator {
    pub g: TorusMatrix,
    pub g_inv: TorusMatrix,
    pub generators: Vec<ModVector>,
    pub degrees: Vec<i64>,
}

pub fn build_conjugator(o: &OrthogonalSystem, eps: &DegreeBasis, t_max: i64) -> Result<Conjugator, ModError> {
    let l = o.ell();
    if o.idempotents().len() != l {
        return Err(ModError::SystemInvalid(format!("{} idempotents for size {}", o.idempotents().len(), l)));
    }
    let certs: Vec<Result<CyclicCertificate, ModError>> = o
        .idempotents()
        .par_iter()
        .map(|e| certify_cyclic(&SubmoduleSpec::new(e.clone())?, eps, t_max))
        .collect();
    let pres = o.presentation();
    let mut gens = Vec::new();
    let mut degrees = Vec::new();
    let mut rows = Vec::new();
    for (i, c) in certs.into_iter().enumerate() {
        match c? {
            CyclicCertificate::Cyclic { u0, degree, column_quotients } => {
                gens.push(u0);
                degrees.push(degree);
                rows.push(column_quotients);
            }
            CyclicCertificate::CounterWitness { v0, .. } => return Err(ModError::NotCyclic { index: i, witness: v0 }),
            CyclicCertificate::WindowExhausted(t) => return Err(ModError::WindowExhausted(t)),
        }
    }
    let g = from_columns(pres, &gens);
    let g_inv = TorusMatrix::from_entries(pres, rows)?;
    let id = TorusMatrix::identity(pres, l);
    if g.checked_mul(&g_inv)? != id || g_inv.checked_mul(&g)? != id {
        return Err(ModError::NotInvertible);
    }
    Ok(Conjugator { g, g_inv, generators: gens, degrees })
}

/// `deg(v)` in the module sense.
pub fn vec_degree(v: &ModVector, eps: &DegreeBasis) -> Degree {
    v.degree(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlie::Generator;
    use crate::scalar::Field;

    fn z3() -> Arc<Presentation> {
        let f = Field::cyclotomic(3);
        Arc::new(Presentation::from_blocks(f, 2, &[f.zeta(3).unwrap()]).unwrap())
    }

    fn rank_one() -> Arc<Presentation> {
        Arc::new(Presentation::commutative(Field::Rational, 1))
    }

    fn conj(pres: &Arc<Presentation>, g: Generator, i: usize) -> SubmoduleSpec {
        let w = MorphismWord::new(pres, 2, vec![g]).unwrap();
        SubmoduleSpec::new(w.apply(&TorusMatrix::e(pres, 2, i, i)).unwrap()).unwrap()
    }

    #[test]
    fn degree_examples() {
        let p = z3();
        let eps = DegreeBasis::standard(2);
        let v = ModVector::new(&p, vec![TorusElement::one(&p), TorusElement::x_pow(&p, &[1, 0])]).unwrap();
        assert_eq!(vec_degree(&v, &eps), Degree::Finite(1));
        let e1 = ModVector::unit(&p, 2, 0);
        assert_eq!(e1.right_mul(&TorusElement::x_pow(&p, &[2, 1])).degree(&eps), Degree::Finite(3));
        assert_eq!(ModVector::zero(&p, 2).degree(&eps), Degree::MinusInfinity);
    }

    #[test]
    fn systems() {
        let p = rank_one();
        let x1 = TorusElement::x_pow(&p, &[1]);
        let w = MorphismWord::new(&p, 2, vec![Generator::elementary(&p, 2, 1, 0, x1.clone())]).unwrap();
        let o = system_from_morphism(&w).unwrap();
        let mut e1 = TorusMatrix::e(&p, 2, 0, 0);
        e1.set(1, 0, x1.clone());
        let mut e2 = TorusMatrix::e(&p, 2, 1, 1);
        e2.set(1, 0, -&x1);
        assert_eq!(o.idempotents(), &[e1, e2]);
        let w = MorphismWord::new(&p, 2, vec![Generator::permutation(&p, &[1, 0])]).unwrap();
        let o = system_from_morphism(&w).unwrap();
        assert_eq!(o.idempotents(), &[TorusMatrix::e(&p, 2, 1, 1), TorusMatrix::e(&p, 2, 0, 0)]);
        let w = MorphismWord::new(&p, 2, vec![Generator::Transpose]).unwrap();
        assert_eq!(system_from_morphism(&w).unwrap_err(), ModError::NotAssociativeWord);
    }

    #[test]
    fn slices() {
        let p = rank_one();
        let eps = DegreeBasis::standard(1);
        let x1 = TorusElement::x_pow(&p, &[1]);
        let std = SubmoduleSpec::new(TorusMatrix::e(&p, 2, 0, 0)).unwrap();
        assert_eq!(plus_slice(&std, 0, &eps), vec![ModVector::unit(&p, 2, 0)]);
        let u = conj(&p, Generator::elementary(&p, 2, 1, 0, x1.clone()), 0);
        assert!(plus_slice(&u, 0, &eps).is_empty());
        let s1 = plus_slice(&u, 1, &eps);
        assert_eq!(s1.len(), 1);
        let expect = ModVector::new(&p, vec![TorusElement::one(&p), x1.clone()]).unwrap();
        assert_eq!(s1[0].normalized(), expect);
        assert_eq!(minimal_vector(&u, &eps, 4).unwrap(), expect);
    }

    #[test]
    fn minimal_vector_of_scaled_line() {
        let p = rank_one();
        let eps = DegreeBasis::standard(1);
        let x1 = TorusElement::x_pow(&p, &[1]);
        let g = Generator::diagonal(&p, vec![x1, TorusElement::one(&p)]).unwrap();
        let u = conj(&p, g, 0);
        assert_eq!(minimal_vector(&u, &eps, 3).unwrap(), ModVector::unit(&p, 2, 0));
    }

    #[test]
    fn indivisibility() {
        let p = z3();
        let eps = DegreeBasis::standard(2);
        let x = |a, b| TorusElement::x_pow(&p, &[a, b]);
        let v = |a: TorusElement, b: TorusElement| ModVector::new(&p, vec![a, b]).unwrap();
        assert!(v(x(0, 0), x(1, 0)).is_indivisible(&eps).unwrap());
        assert!(!v(x(1, 0), x(1, 1)).is_indivisible(&eps).unwrap());
        assert!(v(x(1, 0), x(0, 1)).is_indivisible(&eps).unwrap());
        assert_eq!(ModVector::zero(&p, 2).is_indivisible(&eps), Err(ModError::ZeroVector));
    }

    #[test]
    fn membership() {
        let p = z3();
        let x = |a, b| TorusElement::x_pow(&p, &[a, b]);
        let u0 = ModVector::new(&p, vec![x(0, 0), x(1, 0)]).unwrap();
        assert_eq!(solve_membership(&u0, &u0), Some(TorusElement::one(&p)));
        let v = ModVector::new(&p, vec![x(0, 1), &x(1, 0) * &x(0, 1)]).unwrap();
        assert_eq!(solve_membership(&v, &u0), Some(x(0, 1)));
        assert_eq!(solve_membership(&ModVector::unit(&p, 2, 0), &u0), None);
    }

    #[test]
    fn certification() {
        let p = rank_one();
        let eps = DegreeBasis::standard(1);
        let std = SubmoduleSpec::new(TorusMatrix::e(&p, 2, 0, 0)).unwrap();
        assert!(matches!(certify_cyclic(&std, &eps, 3).unwrap(), CyclicCertificate::Cyclic { degree: 0, .. }));
        let whole = SubmoduleSpec::new(TorusMatrix::identity(&p, 2)).unwrap();
        assert!(matches!(certify_cyclic(&whole, &eps, 3).unwrap(), CyclicCertificate::CounterWitness { .. }));
        let x1 = TorusElement::x_pow(&p, &[1]);
        let u = conj(&p, Generator::elementary(&p, 2, 1, 0, x1), 0);
        assert!(matches!(certify_cyclic(&u, &eps, 0).unwrap(), CyclicCertificate::WindowExhausted(0)));
    }

    #[test]
    fn conjugators() {
        let p = z3();
        let eps = DegreeBasis::standard(2);
        let std = OrthogonalSystem::standard(&p, 2);
        let c = build_conjugator(&std, &eps, 4).unwrap();
        assert_eq!(c.g, TorusMatrix::identity(&p, 2));
        let x = TorusElement::x_pow(&p, &[1, 0]);
        let w = MorphismWord::new(&p, 2, vec![Generator::elementary(&p, 2, 1, 0, x.clone())]).unwrap();
        let o = system_from_morphism(&w).unwrap();
        let c = build_conjugator(&o, &eps, o.default_window(&eps)).unwrap();
        let (g0, _) = TorusMatrix::elementary(&p, 2, 1, 0, x);
        assert_eq!(c.g, g0);
        for (i, e) in o.idempotents().iter().enumerate() {
            let conj = c.g.checked_mul(&TorusMatrix::e(&p, 2, i, i)).unwrap().checked_mul(&c.g_inv).unwrap();
            assert_eq!(&conj, e);
        }
        let w = MorphismWord::new(&p, 3, vec![Generator::permutation(&p, &[2, 0, 1])]).unwrap();
        let c = build_conjugator(&system_from_morphism(&w).unwrap(), &eps, 2).unwrap();
        assert_eq!(c.g, TorusMatrix::permutation(&p, &[2, 0, 1]).0);
    }
}
