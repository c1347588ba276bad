//! Conjugating the transported standard MAD back to the standard MAD, and
//! monomial roots of central elements.

use std::sync::Arc;

use num_integer::Integer;
use serde_json::{json, Value};
use thiserror::Error;

use crate::lattice::{LatticeError, Presentation};
use crate::matlie::{standard_mad, MatLieError, MorphismWord, TorusMatrix};
use crate::modules::{build_conjugator, system_from_morphism, Conjugator, ModError, ModVector};
use crate::qtorus::{DegreeBasis, TorusElement};
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConjError {
    #[error("word is not an associative homomorphism: {0}")]
    NotAssociative(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("no monomial solution: {0}")]
    NoSolution(String),
    #[error(transparent)]
    Modules(#[from] ModError),
    #[error(transparent)]
    MatLie(#[from] MatLieError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Debug)]
pub struct ConjugacyReport {
    pub ell: usize,
    pub generators: Vec<ModVector>,
    pub degrees: Vec<i64>,
    pub t_max: i64,
    pub mad_check: bool,
    pub extensions: Vec<u32>,
}

impl ConjugacyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "ell": self.ell,
            "generators": self.generators.iter().map(ModVector::to_json).collect::<Vec<_>>(),
            "degrees": self.degrees,
            "t_max": self.t_max,
            "mad_check": self.mad_check,
            "extensions": self.extensions,
        })
    }
}

fn check_multiplicative(w: &MorphismWord) -> Result<(), ConjError> {
    if !w.is_associative() {
        return Err(ConjError::NotAssociative(format!("{} anti-generators", w.anti_count())));
    }
    let src = w.source();
    let l = w.ell();
    for i in 0..l {
        for j in 0..l {
            for k in 0..l {
                for p in 0..src.rank() {
                    let a = TorusMatrix::unit(src, l, i, j, TorusElement::generator(src, p, 1));
                    let b = TorusMatrix::unit(src, l, j, k, TorusElement::generator(src, (p + 1) % src.rank(), -1));
                    let lhs = w.apply(&a.checked_mul(&b)?)?;
                    let rhs = w.apply(&a)?.checked_mul(&w.apply(&b)?)?;
                    if lhs != rhs {
                        return Err(ConjError::NotAssociative(format!("fails on E_{}{} · E_{}{}", i + 1, j + 1, j + 1, k + 1)));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `g` with `Int(g)(h_st) = w(h'_st)`, verified on every basis element.
pub fn main_conjugacy(w: &MorphismWord, eps: &DegreeBasis, t_max: Option<i64>) -> Result<(Conjugator, ConjugacyReport), ConjError> {
    check_multiplicative(w)?;
    let o = system_from_morphism(w)?;
    let t_max = t_max.unwrap_or_else(|| o.default_window(eps));
    let c = build_conjugator(&o, eps, t_max)?;
    let l = w.ell();
    let h_src = standard_mad(l, w.source())?;
    let h_tgt = standard_mad(l, w.target())?;
    for (k, (b_src, b_tgt)) in h_src.basis().iter().zip(h_tgt.basis()).enumerate() {
        let lhs = w.apply(b_src)?;
        let rhs = c.g.checked_mul(&b_tgt)?.checked_mul(&c.g_inv)?;
        if lhs != rhs {
            return Err(ConjError::VerificationFailed(format!("MAD basis element {} is not transported", k + 1)));
        }
    }
    let report =
        ConjugacyReport { ell: l, generators: c.generators.clone(), degrees: c.degrees.clone(), t_max, mad_check: true, extensions: Vec::new() };
    Ok((c, report))
}

/// Monomials `y_i` with `y_i^{ℓ_i} = x^{λ_i}` and `[y_a, y_b] = 0`.
#[derive(Clone, Debug)]
pub struct RootWitnesses {
    /// The input presentation, after any enlargement of the coefficients.
    pub presentation: Arc<Presentation>,
    pub roots: Vec<TorusElement>,
    pub extensions: Vec<u32>,
}

impl RootWitnesses {
    pub fn to_json(&self) -> Value {
        json!({
            "roots": self.roots.iter().map(TorusElement::to_json).collect::<Vec<_>>(),
            "extensions": self.extensions,
        })
    }
}

/// `c` with `c^ℓ = x` inside the field, for `x = ω^a s^b`.
fn scalar_root(x: &Scalar, ell: u64) -> Option<Scalar> {
    let field = x.field();
    let (a, b) = x.root_monomial()?;
    if b % ell as i64 != 0 {
        return None;
    }
    let m = field.root_modulus();
    let g = ell.gcd(&m);
    if a % g != 0 {
        return None;
    }
    let (mg, lg) = (m / g, ell / g);
    let inv = if mg == 1 { 0 } else { modinv(lg % mg, mg)? };
    let k = ((a / g) as u128 * inv as u128 % mg.max(1) as u128) as i64;
    Some(field.root_monomial(k, b / ell as i64))
}

fn modinv(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

fn extend(field: &Field, n: u32) -> Option<Field> {
    match field {
        Field::Prime(_) => None,
        f if f.has_transcendental() => Some(Field::rational_function(n)),
        _ => Some(Field::cyclotomic(n)),
    }
}

pub fn solve_commuting_roots(p: &Arc<Presentation>, targets: &[(u64, Vec<i64>)]) -> Result<RootWitnesses, ConjError> {
    let no = |m: String| ConjError::NoSolution(m);
    let n = p.rank();
    let mut mus = Vec::new();
    for (i, (ell, lam)) in targets.iter().enumerate() {
        if *ell == 0 || lam.len() != n {
            return Err(no(format!("target {} is malformed", i + 1)));
        }
        if !p.is_central(lam) {
            return Err(no(format!("target {} is not central", i + 1)));
        }
        if lam.iter().any(|x| x % *ell as i64 != 0) {
            return Err(no(format!("{} does not divide target {}", ell, i + 1)));
        }
        mus.push(lam.iter().map(|x| x / *ell as i64).collect::<Vec<_>>());
    }
    for a in 0..mus.len() {
        for b in a + 1..mus.len() {
            if !p.bicharacter(&mus[a], &mus[b]).is_one() {
                return Err(no(format!("roots {} and {} cannot commute", a + 1, b + 1)));
            }
        }
    }
    let correction = |pres: &Arc<Presentation>, mu: &[i64], ell: u64, lam: &[i64]| -> Scalar {
        TorusElement::x_pow(pres, mu).pow(ell as i64).coeff(lam).inv().expect("power of a unit")
    };
    let field = p.field();
    let big_m = field.root_modulus();
    let mut need = 1u64;
    for ((ell, lam), mu) in targets.iter().zip(&mus) {
        let k = correction(p, mu, *ell, lam);
        if scalar_root(&k, *ell).is_none() {
            if k.root_monomial().is_none_or(|(_, b)| b % *ell as i64 != 0) {
                return Err(no(format!("{}-th root of {} needs more than roots of unity", ell, k)));
            }
            need = need.lcm(&(big_m * ell));
        }
    }
    let (pres, extensions) = if need == 1 {
        (p.clone(), Vec::new())
    } else {
        let f2 = extend(&field, need as u32).ok_or_else(|| no("prime field cannot be enlarged".into()))?;
        let q = p.map_scalars(f2, |x| x.embed(&f2))?.into_arc();
        (q, vec![f2.cyclotomic_order()])
    };
    let mut roots = Vec::new();
    for ((ell, lam), mu) in targets.iter().zip(&mus) {
        let k = correction(&pres, mu, *ell, lam);
        let c = scalar_root(&k, *ell).ok_or_else(|| no(format!("no {}-th root of {}", ell, k)))?;
        roots.push(TorusElement::monomial(&pres, mu.clone(), c));
    }
    for (i, (y, (ell, lam))) in roots.iter().zip(targets).enumerate() {
        if y.pow(*ell as i64) != TorusElement::x_pow(&pres, lam) {
            return Err(ConjError::VerificationFailed(format!("root {} has the wrong power", i + 1)));
        }
        for z in &roots[i + 1..] {
            if !y.commutator(z).map_err(MatLieError::from)?.is_zero() {
                return Err(ConjError::VerificationFailed(format!("root {} does not commute", i + 1)));
            }
        }
    }
    Ok(RootWitnesses { presentation: pres, roots, extensions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{canonical_presentation, symbol_decomposition};
    use crate::matlie::Generator;

    fn z3() -> Arc<Presentation> {
        let f = Field::cyclotomic(3);
        Arc::new(Presentation::from_blocks(f, 2, &[f.zeta(3).unwrap()]).unwrap())
    }

    #[test]
    fn identity_word() {
        let p = z3();
        let w = MorphismWord::identity(&p, 2);
        let (c, r) = main_conjugacy(&w, &DegreeBasis::standard(2), None).unwrap();
        assert_eq!(c.g, TorusMatrix::identity(&p, 2));
        assert!(r.mad_check);
    }

    #[test]
    fn elementary_and_base_change() {
        let p = z3();
        let x = TorusElement::x_pow(&p, &[1, 0]);
        let w = MorphismWord::new(&p, 2, vec![Generator::elementary(&p, 2, 1, 0, x.clone())]).unwrap();
        let (c, _) = main_conjugacy(&w, &DegreeBasis::standard(2), None).unwrap();
        assert_eq!(c.g, TorusMatrix::elementary(&p, 2, 1, 0, x).0);
        let a = vec![vec![2, 1], vec![1, 1]];
        let w = w.then(&MorphismWord::new(&p, 2, vec![Generator::LatticeBaseChange { a: a.clone(), rescale: vec![] }]).unwrap());
        let w = w.unwrap();
        let (_, r) = main_conjugacy(&w, &DegreeBasis::new(a).unwrap(), Some(8)).unwrap();
        assert!(r.mad_check);
    }

    #[test]
    fn rejects_anti_words() {
        let p = z3();
        let w = MorphismWord::new(&p, 2, vec![Generator::IotaOp]).unwrap();
        assert!(matches!(main_conjugacy(&w, &DegreeBasis::standard(2), None), Err(ConjError::NotAssociative(_))));
    }

    #[test]
    fn roots_of_canonical_targets() {
        let f = Field::cyclotomic(12);
        let p = Presentation::from_blocks(f, 4, &[f.zeta(4).unwrap(), f.zeta(2).unwrap()]).unwrap();
        let (_, pc) = canonical_presentation(&p).unwrap();
        let sd = symbol_decomposition(&pc).unwrap();
        let pc = pc.into_arc();
        let r = solve_commuting_roots(&pc, &sd.targets()).unwrap();
        assert_eq!(r.roots[0], TorusElement::generator(&pc, 0, 1));
        assert_eq!(r.roots[1], TorusElement::generator(&pc, 2, 1));
    }

    #[test]
    fn square_root_with_cocycle() {
        let f = Field::Rational;
        let p = Presentation::from_blocks(f, 2, &[f.from_i64(-1)]).unwrap().into_arc();
        let r = solve_commuting_roots(&p, &[(2, vec![2, 2])]).unwrap();
        assert_eq!(r.extensions, vec![4]);
        assert_eq!(r.roots[0].pow(2), TorusElement::x_pow(&r.presentation, &[2, 2]));
        let r = solve_commuting_roots(&p, &[(2, vec![2, 0])]).unwrap();
        assert!(r.extensions.is_empty());
        assert!(matches!(solve_commuting_roots(&p, &[(2, vec![1, 0])]), Err(ConjError::NoSolution(_))));
    }
}
