//! Elements of a quantum torus `Q = ⊕_λ F x^λ`.
//!
//! `x^λ` means `x_1^{λ_1} ⋯ x_n^{λ_n}`, so `x^λ x^μ = τ(λ,μ) x^{λ+μ}` with
//! the cocycle of [`Presentation::cocycle`].

mod degree;
mod division;
mod hom;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

pub use degree::{Degree, DegreeBasis};
pub use hom::MonomialMap;

use crate::lattice::Presentation;
use crate::scalar::{parse_literal, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QtError {
    #[error("elements belong to different presentations")]
    PresentationMismatch,
    #[error("element is not in the positive part")]
    NotInPositivePart,
    #[error("exponent vector has length {got}, rank is {rank}")]
    RankMismatch { got: usize, rank: usize },
    #[error("malformed element: {0}")]
    Malformed(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub type Exponent = Vec<i64>;

/// `Σ s_λ x^λ` with finitely many nonzero `s_λ`.
#[derive(Clone)]
pub struct TorusElement {
    pres: Arc<Presentation>,
    terms: BTreeMap<Exponent, Scalar>,
}

impl PartialEq for TorusElement {
    fn eq(&self, other: &Self) -> bool {
        same_presentation(&self.pres, &other.pres) && self.terms == other.terms
    }
}

impl Eq for TorusElement {}

pub fn same_presentation(a: &Arc<Presentation>, b: &Arc<Presentation>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl TorusElement {
    pub fn zero(pres: &Arc<Presentation>) -> Self {
        TorusElement { pres: pres.clone(), terms: BTreeMap::new() }
    }

    pub fn one(pres: &Arc<Presentation>) -> Self {
        Self::monomial(pres, vec![0; pres.rank()], pres.field().one())
    }

    pub fn scalar(pres: &Arc<Presentation>, c: Scalar) -> Self {
        Self::monomial(pres, vec![0; pres.rank()], c)
    }

    /// `c · x^λ`.
    pub fn monomial(pres: &Arc<Presentation>, lambda: Exponent, c: Scalar) -> Self {
        assert_eq!(lambda.len(), pres.rank(), "exponent length must equal the rank");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(lambda, c);
        }
        TorusElement { pres: pres.clone(), terms }
    }

    /// `x^λ`.
    pub fn x_pow(pres: &Arc<Presentation>, lambda: &[i64]) -> Self {
        Self::monomial(pres, lambda.to_vec(), pres.field().one())
    }

    /// The generator `x_i` (0-based), or its power.
    pub fn generator(pres: &Arc<Presentation>, i: usize, k: i64) -> Self {
        let mut l = vec![0; pres.rank()];
        l[i] = k;
        Self::x_pow(pres, &l)
    }

    pub fn from_terms(pres: &Arc<Presentation>, terms: impl IntoIterator<Item = (Exponent, Scalar)>) -> Self {
        let mut e = Self::zero(pres);
        for (l, c) in terms {
            e.add_term(l, &c);
        }
        e
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn rank(&self) -> usize {
        self.pres.rank()
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Scalar> {
        &self.terms
    }

    pub fn support(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.keys()
    }

    pub fn coeff(&self, lambda: &[i64]) -> Scalar {
        self.terms.get(lambda).cloned().unwrap_or_else(|| self.pres.field().zero())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Single term `c·x^λ`.
    pub fn as_monomial(&self) -> Option<(&Exponent, &Scalar)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Scalar multiple of `1`.
    pub fn as_scalar(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(self.pres.field().zero());
        }
        match self.as_monomial() {
            Some((l, c)) if l.iter().all(|&x| x == 0) => Some(c.clone()),
            _ => None,
        }
    }

    /// Lex-largest term.
    pub fn leading(&self) -> Option<(&Exponent, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub(crate) fn add_term(&mut self, lambda: Exponent, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(lambda) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, other: &TorusElement) -> Result<(), QtError> {
        if same_presentation(&self.pres, &other.pres) {
            Ok(())
        } else {
            Err(QtError::PresentationMismatch)
        }
    }

    pub fn checked_add(&self, other: &TorusElement) -> Result<TorusElement, QtError> {
        self.check(other)?;
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (l, c) in &small.terms {
            big.add_term(l.clone(), c);
        }
        Ok(big)
    }

    pub fn checked_sub(&self, other: &TorusElement) -> Result<TorusElement, QtError> {
        self.checked_add(&-other)
    }

    /// Graded product.
    pub fn checked_mul(&self, other: &TorusElement) -> Result<TorusElement, QtError> {
        self.check(other)?;
        let mut out = TorusElement::zero(&self.pres);
        for (l, a) in &self.terms {
            for (m, b) in &other.terms {
                let t = self.pres.cocycle(l, m);
                let c = &(a * b) * &t;
                let s: Exponent = l.iter().zip(m).map(|(x, y)| x + y).collect();
                out.add_term(s, &c);
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &TorusElement) -> Result<TorusElement, QtError> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn scale(&self, c: &Scalar) -> TorusElement {
        if c.is_zero() {
            return TorusElement::zero(&self.pres);
        }
        TorusElement { pres: self.pres.clone(), terms: self.terms.iter().map(|(l, x)| (l.clone(), x * c)).collect() }
    }

    pub fn pow(&self, k: i64) -> TorusElement {
        if k < 0 {
            return self.inverse().expect("negative power of a non-unit").pow(-k);
        }
        let mut acc = TorusElement::one(&self.pres);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `deg_ε`: max of `tr_ε` over the support.
    pub fn degree(&self, eps: &DegreeBasis) -> Degree {
        self.terms.keys().map(|l| Degree::Finite(eps.trace(l))).max().unwrap_or(Degree::MinusInfinity)
    }

    /// Restriction to exponents in Ξ, and the rest.
    pub fn centre_split(&self) -> (TorusElement, TorusElement) {
        let (mut z, mut b) = (TorusElement::zero(&self.pres), TorusElement::zero(&self.pres));
        for (l, c) in &self.terms {
            if self.pres.is_central(l) {
                z.terms.insert(l.clone(), c.clone());
            } else {
                b.terms.insert(l.clone(), c.clone());
            }
        }
        (z, b)
    }

    pub fn is_central(&self) -> bool {
        self.terms.keys().all(|l| self.pres.is_central(l))
    }

    /// Inverse of a nonzero homogeneous element; `None` otherwise.
    pub fn inverse(&self) -> Option<TorusElement> {
        let (l, c) = self.as_monomial()?;
        let neg: Exponent = l.iter().map(|x| -x).collect();
        let t = self.pres.cocycle(l, &neg);
        let coef = (c * &t).inv().ok()?;
        Some(TorusElement::monomial(&self.pres, neg, coef))
    }

    /// Support in `N^n`.
    pub fn is_positive(&self) -> bool {
        self.terms.keys().all(|l| l.iter().all(|&x| x >= 0))
    }

    /// Whether `x_i` divides `self` inside `Q^+` (0-based axis).
    pub fn divides(&self, i: usize) -> Result<bool, QtError> {
        if !self.is_positive() {
            return Err(QtError::NotInPositivePart);
        }
        Ok(!self.is_zero() && self.terms.keys().all(|l| l[i] > 0))
    }

    pub fn map_coeffs(&self, pres: &Arc<Presentation>, f: impl Fn(&Scalar) -> Result<Scalar, ScalarError>) -> Result<TorusElement, ScalarError> {
        let mut out = TorusElement::zero(pres);
        for (l, c) in &self.terms {
            out.add_term(l.clone(), &f(c)?);
        }
        Ok(out)
    }

    /// Image under the anti-isomorphism `Q → Q^op` fixing the generators;
    /// `Q^op` has quantum matrix `(q_ij^{-1})`.
    pub fn op_map(&self, op: &Arc<Presentation>) -> TorusElement {
        let mut out = TorusElement::zero(op);
        for (l, c) in &self.terms {
            let t = self.pres.cocycle(l, l).inv().expect("cocycle values are units");
            out.terms.insert(l.clone(), c * &t);
        }
        out
    }

    /// `(c, α, j)` with `x^λ = c · [x^α, x_j]`, for `λ ∉ Ξ`.
    pub fn commutator_witness(pres: &Presentation, lambda: &[i64]) -> Option<(Scalar, Exponent, usize)> {
        let n = pres.rank();
        (0..n).find_map(|j| {
            let mut e = vec![0; n];
            e[j] = 1;
            let alpha: Exponent = lambda.iter().zip(&e).map(|(a, b)| a - b).collect();
            let d = &pres.cocycle(&alpha, &e) - &pres.cocycle(&e, &alpha);
            (!d.is_zero()).then(|| (d.inv().unwrap(), alpha, j))
        })
    }

    /// JSON list of `{"exp": [...], "coef": literal}`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(l, c)| serde_json::json!({ "exp": l, "coef": c.to_string() }))
                .collect(),
        )
    }

    pub fn from_json(pres: &Arc<Presentation>, v: &Value) -> Result<TorusElement, QtError> {
        let arr = v.as_array().ok_or_else(|| QtError::Malformed("element must be a list of terms".into()))?;
        let mut out = TorusElement::zero(pres);
        for (k, t) in arr.iter().enumerate() {
            let exp: Exponent = t
                .get("exp")
                .and_then(Value::as_array)
                .and_then(|a| a.iter().map(Value::as_i64).collect())
                .ok_or_else(|| QtError::Malformed(format!("term {}: missing integer list \"exp\"", k)))?;
            if exp.len() != pres.rank() {
                return Err(QtError::RankMismatch { got: exp.len(), rank: pres.rank() });
            }
            let coef = match t.get("coef") {
                Some(Value::String(s)) => s.clone(),
                Some(Value::Number(x)) => x.to_string(),
                None => "1".to_string(),
                _ => return Err(QtError::Malformed(format!("term {}: \"coef\" must be a scalar literal", k))),
            };
            let c = parse_literal(&coef)?.eval(&pres.field())?;
            out.add_term(exp, &c);
        }
        Ok(out)
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(l, c)| format!("({})*x^{:?}", c, l)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: &TorusElement) -> TorusElement {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{}", e))
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: &TorusElement) -> TorusElement {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{}", e))
    }
}

impl Mul for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: &TorusElement) -> TorusElement {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{}", e))
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        TorusElement { pres: self.pres.clone(), terms: self.terms.iter().map(|(l, c)| (l.clone(), -c)).collect() }
    }
}
