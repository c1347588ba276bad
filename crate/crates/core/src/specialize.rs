//! Reduction of presentations, elements, matrices and words modulo a prime.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::lattice::{central_lattice, is_fgc, LatticeError, Presentation};
use crate::matlie::{Generator, MatLieError, MorphismWord, TorusMatrix};
use crate::qtorus::TorusElement;
use crate::scalar::{prime, Field, Order, ResidueMap, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecializeError {
    #[error("no admissible prime below {0}")]
    NoPrimeInRange(u64),
    #[error("{0} does not lie in the reduction subring")]
    OutsideSubring(String),
    #[error("an Int witness pair is not inverse modulo {0}")]
    WitnessDegenerates(u64),
    #[error("{0} has no reduction modulo p")]
    NotReducible(&'static str),
    #[error(transparent)]
    Scalar(ScalarError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    MatLie(#[from] MatLieError),
}

impl From<ScalarError> for SpecializeError {
    fn from(e: ScalarError) -> Self {
        match e {
            ScalarError::OutsideSubring(s) => SpecializeError::OutsideSubring(s),
            e => SpecializeError::Scalar(e),
        }
    }
}

/// An object that must stay nonzero after reduction.
#[derive(Clone, Debug)]
pub enum Designated {
    Scalar(Scalar),
    Element(TorusElement),
    Matrix(TorusMatrix),
}

impl Designated {
    fn describe(&self) -> String {
        match self {
            Designated::Scalar(s) => s.to_string(),
            Designated::Element(e) => e.to_string(),
            Designated::Matrix(m) => format!("{:?}", m),
        }
    }

    /// Whether the reduction is defined and nonzero.
    fn survives(&self, h: &ResidueMap) -> bool {
        let red = |e: &TorusElement| -> Option<bool> {
            let mut any = false;
            for c in e.terms().values() {
                any |= !h.apply(c).ok()?.is_zero();
            }
            Some(any)
        };
        match self {
            Designated::Scalar(s) => h.apply(s).is_ok_and(|x| !x.is_zero()),
            Designated::Element(e) => red(e) == Some(true),
            Designated::Matrix(m) => {
                let mut any = false;
                for e in m.entries().iter().flatten() {
                    match red(e) {
                        Some(b) => any |= b,
                        None => return false,
                    }
                }
                any
            }
        }
    }
}

fn joined_field(pres: &[&Presentation]) -> Result<Field, SpecializeError> {
    let mut f = Field::Rational;
    for p in pres {
        f = f.join(&p.field())?;
    }
    Ok(f)
}

/// Smallest prime `p > max(3, ℓ_i)` with `m | p − 1`, together with the
/// smallest image of `s` whose multiplicative order exceeds `order_bound`,
/// such that every entry and designated object survives.
pub fn propose_prime(
    pres: &[&Presentation],
    ells: &[usize],
    designated: &[Designated],
    order_bound: u64,
    prime_limit: u64,
) -> Result<ResidueMap, SpecializeError> {
    let field = joined_field(pres)?;
    let m = field.cyclotomic_order() as u64;
    let floor = ells.iter().map(|&l| l as u64).chain([3]).max().unwrap();
    for p in floor + 1..=prime_limit {
        if !prime::is_prime(p) || (p - 1) % m != 0 {
            continue;
        }
        let candidates: Vec<Option<u64>> =
            if field.has_transcendental() { (2..p).filter(|&a| prime::multiplicative_order(a, p) > order_bound).map(Some).collect() } else { vec![None] };
        for s in candidates {
            let h = ResidueMap::standard(&field, p, s)?;
            let entries_ok = pres.iter().all(|q| q.matrix().iter().flatten().all(|x| h.apply(x).is_ok_and(|y| !y.is_zero())));
            if entries_ok && designated.iter().all(|d| d.survives(&h)) {
                return Ok(h);
            }
        }
    }
    Err(SpecializeError::NoPrimeInRange(prime_limit))
}

pub fn specialize_presentation(p: &Presentation, h: &ResidueMap) -> Result<Presentation, SpecializeError> {
    Ok(p.map_scalars(h.target(), |x| h.apply(x))?)
}

/// Coefficient-wise reduction into `target`, the reduced presentation.
pub fn specialize_element(x: &TorusElement, h: &ResidueMap, target: &Arc<Presentation>) -> Result<TorusElement, SpecializeError> {
    Ok(x.map_coeffs(target, |c| h.apply(c))?)
}

pub fn specialize_matrix(x: &TorusMatrix, h: &ResidueMap, target: &Arc<Presentation>) -> Result<TorusMatrix, SpecializeError> {
    Ok(x.map_into(target, |e| e.map_coeffs(target, |c| h.apply(c)))?)
}

/// Reduction of a word, generator by generator. Inverse pairs of `Int`
/// factors are re-verified modulo `p`.
pub fn specialize_word(w: &MorphismWord, h: &ResidueMap) -> Result<MorphismWord, SpecializeError> {
    let source = specialize_presentation(w.source(), h)?.into_arc();
    let mut out = MorphismWord::identity(&source, w.ell());
    for g in w.generators() {
        let cur = out.target().clone();
        let red = match g {
            Generator::LatticeBaseChange { a, rescale } => Generator::LatticeBaseChange {
                a: a.clone(),
                rescale: rescale.iter().map(|c| h.apply(c)).collect::<Result<_, _>>()?,
            },
            Generator::ScalarFieldMap { .. } => return Err(SpecializeError::NotReducible("a coefficient field automorphism")),
            Generator::Int { g, g_inv } => Generator::Int { g: specialize_matrix(g, h, &cur)?, g_inv: specialize_matrix(g_inv, h, &cur)? },
            Generator::Transpose => Generator::Transpose,
            Generator::IotaOp => Generator::IotaOp,
            Generator::CentroidTwist { z } => {
                Generator::CentroidTwist { z: z.iter().map(|e| specialize_element(e, h, &cur)).collect::<Result<_, _>>()? }
            }
        };
        match out.push(red) {
            Ok(()) => {}
            Err(MatLieError::NotInvertible) => return Err(SpecializeError::WitnessDegenerates(h.p)),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub condition: &'static str,
    pub outcome: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecializationCertificate {
    pub residue_map: ResidueMap,
    pub conditions: Vec<Condition>,
}

impl SpecializationCertificate {
    pub fn is_valid(&self) -> bool {
        self.conditions.iter().all(|c| c.outcome)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.condition == name)
    }

    pub fn to_json(&self) -> Value {
        json!({ "residue_map": self.residue_map, "valid": self.is_valid(), "conditions": self.conditions })
    }
}

/// Evaluates every condition; failures are recorded, never raised.
pub fn certify(pres: &[&Presentation], ells: &[usize], designated: &[Designated], h: &ResidueMap) -> SpecializationCertificate {
    let p = h.p;
    let mut conditions = Vec::new();
    let bad_ell: Vec<String> = ells.iter().filter(|&&l| (l as u64).is_multiple_of(p)).map(|l| l.to_string()).collect();
    conditions.push(Condition {
        condition: "very_good_characteristic",
        outcome: p > 3 && bad_ell.is_empty(),
        witness: (!bad_ell.is_empty()).then(|| format!("{} divides {}", p, bad_ell.join(", "))).or_else(|| (p <= 3).then(|| format!("p = {}", p))),
    });
    let vanishing: Vec<String> =
        pres.iter().flat_map(|q| q.matrix().iter().flatten()).filter(|x| !h.apply(x).is_ok_and(|y| !y.is_zero())).map(|x| x.to_string()).collect();
    let bad_scalars: Vec<String> =
        designated.iter().filter(|d| matches!(d, Designated::Scalar(_)) && !d.survives(h)).map(Designated::describe).collect();
    let all_bad: Vec<String> = vanishing.into_iter().chain(bad_scalars).collect();
    conditions.push(Condition { condition: "scalars_nonzero", outcome: all_bad.is_empty(), witness: all_bad.first().cloned() });

    let reduced: Vec<Result<Presentation, SpecializeError>> = pres.iter().map(|q| specialize_presentation(q, h)).collect();
    let fgc_fail = reduced.iter().position(|r| !r.as_ref().is_ok_and(is_fgc));
    conditions.push(Condition {
        condition: "reduced_fgc",
        outcome: fgc_fail.is_none(),
        witness: fgc_fail.map(|i| format!("presentation {}", i + 1)),
    });
    let mut indices = Vec::new();
    let mut index_ok = true;
    for r in &reduced {
        match r.as_ref().ok().and_then(|q| central_lattice(q).ok()) {
            Some(c) => match c.index {
                Order::Finite(i) => {
                    index_ok &= i % p != 0;
                    indices.push(i.to_string());
                }
                Order::Infinite => {
                    index_ok = false;
                    indices.push("infinite".into());
                }
            },
            None => {
                index_ok = false;
                indices.push("undefined".into());
            }
        }
    }
    conditions.push(Condition { condition: "index_coprime", outcome: index_ok, witness: Some(format!("index {}", indices.join(", "))) });
    let dead: Vec<String> =
        designated.iter().filter(|d| !matches!(d, Designated::Scalar(_)) && !d.survives(h)).map(Designated::describe).collect();
    conditions.push(Condition { condition: "designated_nonzero", outcome: dead.is_empty(), witness: dead.first().cloned() });
    SpecializationCertificate { residue_map: *h, conditions }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_s() -> Arc<Presentation> {
        let f = Field::rational_function(1);
        Presentation::from_blocks(f, 2, &[f.s_pow(1).unwrap()]).unwrap().into_arc()
    }

    #[test]
    fn proposes_seven_for_s() {
        let p = generic_s();
        let f = p.field();
        let d = vec![Designated::Element(TorusElement::x_pow(&p, &[1, 1])), Designated::Scalar(f.parse("s-1").unwrap())];
        let h = propose_prime(&[&p], &[2], &d, 5, 100).unwrap();
        assert_eq!((h.p, h.s_image), (7, Some(3)));
        let c = certify(&[&p], &[2], &d, &h);
        assert!(c.is_valid(), "{:?}", c);
        assert_eq!(c.condition("index_coprime").unwrap().witness.as_deref(), Some("index 36"));
    }

    #[test]
    fn proposes_seven_for_zeta3() {
        let f = Field::cyclotomic(3);
        let p = Presentation::from_blocks(f, 2, &[f.zeta(3).unwrap()]).unwrap();
        let h = propose_prime(&[&p], &[2], &[], 1, 100).unwrap();
        assert_eq!(h.p, 7);
        assert_eq!(h.apply(&f.zeta(3).unwrap()).unwrap(), Field::Prime(7).from_i64(2));
        let r = specialize_presentation(&p, &h).unwrap();
        assert_eq!(*r.entry(0, 1), Field::Prime(7).from_i64(2));
    }

    #[test]
    fn reduction_is_multiplicative() {
        let p = generic_s();
        let f = p.field();
        let h = ResidueMap::standard(&f, 7, Some(3)).unwrap();
        let r = specialize_presentation(&p, &h).unwrap().into_arc();
        let a = &TorusElement::monomial(&p, vec![1, 0], f.parse("s+2").unwrap()) + &TorusElement::x_pow(&p, &[0, -1]);
        let b = &TorusElement::monomial(&p, vec![1, 1], f.parse("1/(s+1)").unwrap()) + &TorusElement::one(&p);
        let lhs = specialize_element(&(&a * &b), &h, &r).unwrap();
        let rhs = &specialize_element(&a, &h, &r).unwrap() * &specialize_element(&b, &h, &r).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn word_reduction() {
        let p = generic_s();
        let f = p.field();
        let h = ResidueMap::standard(&f, 7, Some(3)).unwrap();
        let g = Generator::elementary(&p, 2, 0, 1, TorusElement::scalar(&p, f.s_pow(1).unwrap()));
        let w = MorphismWord::new(&p, 2, vec![g]).unwrap();
        let wr = specialize_word(&w, &h).unwrap();
        let Some(Generator::Int { g, g_inv }) = wr.generators().next() else { panic!() };
        assert_eq!(*g.entry(0, 1), TorusElement::scalar(wr.source(), Field::Prime(7).from_i64(3)));
        assert_eq!(g.checked_mul(g_inv).unwrap(), TorusMatrix::identity(wr.source(), 2));
    }

    #[test]
    fn failing_conditions() {
        let f = Field::Rational;
        let p = Presentation::from_blocks(f, 2, &[f.from_i64(-1)]).unwrap().into_arc();
        let h = ResidueMap::standard(&f, 5, None).unwrap();
        let c = certify(&[&p], &[5], &[], &h);
        assert!(!c.condition("very_good_characteristic").unwrap().outcome);
        let dead = Designated::Element(TorusElement::monomial(&p, vec![1, 0], f.parse("7/2").unwrap()));
        let h7 = ResidueMap::standard(&f, 7, None).unwrap();
        let c = certify(&[&p], &[2], &[dead], &h7);
        assert!(!c.condition("designated_nonzero").unwrap().outcome);
        assert!(!c.is_valid());
    }
}
