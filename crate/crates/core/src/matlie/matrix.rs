use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use super::MatLieError;
use crate::lattice::Presentation;
use crate::qtorus::{same_presentation, TorusElement};
use crate::scalar::{Scalar, ScalarError};

/// An `ℓ×ℓ` matrix over a quantum torus.
#[derive(Clone, PartialEq, Eq)]
pub struct TorusMatrix {
    pres: Arc<Presentation>,
    entries: Vec<Vec<TorusElement>>,
}

impl fmt::Debug for TorusMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in &self.entries {
            let cells: Vec<String> = r.iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl TorusMatrix {
    pub fn from_fn(pres: &Arc<Presentation>, ell: usize, f: impl Fn(usize, usize) -> TorusElement) -> Self {
        TorusMatrix { pres: pres.clone(), entries: (0..ell).map(|i| (0..ell).map(|j| f(i, j)).collect()).collect() }
    }

    pub fn from_entries(pres: &Arc<Presentation>, entries: Vec<Vec<TorusElement>>) -> Result<Self, MatLieError> {
        let ell = entries.len();
        if ell == 0 || entries.iter().any(|r| r.len() != ell) {
            return Err(MatLieError::SizeMismatch);
        }
        if entries.iter().flatten().any(|e| !same_presentation(e.presentation(), pres)) {
            return Err(MatLieError::ChainMismatch("entry over a different presentation".into()));
        }
        Ok(TorusMatrix { pres: pres.clone(), entries })
    }

    pub fn zero(pres: &Arc<Presentation>, ell: usize) -> Self {
        Self::from_fn(pres, ell, |_, _| TorusElement::zero(pres))
    }

    pub fn identity(pres: &Arc<Presentation>, ell: usize) -> Self {
        Self::from_fn(pres, ell, |i, j| if i == j { TorusElement::one(pres) } else { TorusElement::zero(pres) })
    }

    /// `a · E_ij` (0-based).
    pub fn unit(pres: &Arc<Presentation>, ell: usize, i: usize, j: usize, a: TorusElement) -> Self {
        let mut m = Self::zero(pres, ell);
        m.entries[i][j] = a;
        m
    }

    /// `E_ij`.
    pub fn e(pres: &Arc<Presentation>, ell: usize, i: usize, j: usize) -> Self {
        Self::unit(pres, ell, i, j, TorusElement::one(pres))
    }

    pub fn diagonal(pres: &Arc<Presentation>, d: Vec<TorusElement>) -> Self {
        let ell = d.len();
        let mut m = Self::zero(pres, ell);
        for (i, x) in d.into_iter().enumerate() {
            m.entries[i][i] = x;
        }
        m
    }

    /// `Σ s_i E_ii` with field scalars.
    pub fn scalar_diagonal(pres: &Arc<Presentation>, s: &[Scalar]) -> Self {
        Self::diagonal(pres, s.iter().map(|c| TorusElement::scalar(pres, c.clone())).collect())
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn entry(&self, i: usize, j: usize) -> &TorusElement {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<TorusElement>] {
        &self.entries
    }

    pub fn set(&mut self, i: usize, j: usize, a: TorusElement) {
        self.entries[i][j] = a;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(TorusElement::is_zero)
    }

    fn check(&self, o: &TorusMatrix) -> Result<(), MatLieError> {
        if self.size() != o.size() {
            return Err(MatLieError::SizeMismatch);
        }
        if !same_presentation(&self.pres, &o.pres) {
            return Err(MatLieError::ChainMismatch("matrices over different presentations".into()));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &TorusMatrix) -> Result<TorusMatrix, MatLieError> {
        self.check(o)?;
        Ok(Self::from_fn(&self.pres, self.size(), |i, j| &self.entries[i][j] + &o.entries[i][j]))
    }

    pub fn checked_sub(&self, o: &TorusMatrix) -> Result<TorusMatrix, MatLieError> {
        self.check(o)?;
        Ok(Self::from_fn(&self.pres, self.size(), |i, j| &self.entries[i][j] - &o.entries[i][j]))
    }

    pub fn checked_mul(&self, o: &TorusMatrix) -> Result<TorusMatrix, MatLieError> {
        self.check(o)?;
        let l = self.size();
        Ok(Self::from_fn(&self.pres, l, |i, j| {
            let mut acc = TorusElement::zero(&self.pres);
            for k in 0..l {
                let (a, b) = (&self.entries[i][k], &o.entries[k][j]);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        }))
    }

    pub fn neg(&self) -> TorusMatrix {
        self.map(|e| -e)
    }

    pub fn scale(&self, c: &Scalar) -> TorusMatrix {
        self.map(|e| e.scale(c))
    }

    /// `z · x` entry-wise on the left.
    pub fn left_mul_element(&self, z: &TorusElement) -> TorusMatrix {
        self.map(|e| z * e)
    }

    pub fn map(&self, f: impl Fn(&TorusElement) -> TorusElement) -> TorusMatrix {
        TorusMatrix { pres: self.pres.clone(), entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    /// Entry-wise map into another presentation.
    pub fn map_into(
        &self,
        pres: &Arc<Presentation>,
        f: impl Fn(&TorusElement) -> Result<TorusElement, ScalarError>,
    ) -> Result<TorusMatrix, ScalarError> {
        let entries = self.entries.iter().map(|r| r.iter().map(&f).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
        Ok(TorusMatrix { pres: pres.clone(), entries })
    }

    pub fn transpose(&self) -> TorusMatrix {
        Self::from_fn(&self.pres, self.size(), |i, j| self.entries[j][i].clone())
    }

    pub fn lie_bracket(&self, o: &TorusMatrix) -> Result<TorusMatrix, MatLieError> {
        self.checked_mul(o)?.checked_sub(&o.checked_mul(self)?)
    }

    pub fn trace(&self) -> TorusElement {
        let mut acc = TorusElement::zero(&self.pres);
        for i in 0..self.size() {
            acc = &acc + &self.entries[i][i];
        }
        acc
    }

    /// `tr(x) ∈ [Q,Q]`.
    pub fn in_sl(&self) -> bool {
        self.trace().centre_split().0.is_zero()
    }

    pub fn is_diagonal(&self) -> bool {
        let l = self.size();
        (0..l).all(|i| (0..l).all(|j| i == j || self.entries[i][j].is_zero()))
    }

    pub fn is_idempotent(&self) -> bool {
        self.checked_mul(self).is_ok_and(|sq| sq == *self)
    }

    /// `(L_0 part, off-diagonal entries)` of an `sl` element.
    pub fn sl_decompose(&self) -> Result<(TorusMatrix, BTreeMap<(usize, usize), TorusElement>), MatLieError> {
        if !self.in_sl() {
            return Err(MatLieError::NotInSl);
        }
        let l = self.size();
        let l0 = Self::from_fn(&self.pres, l, |i, j| if i == j { self.entries[i][i].clone() } else { TorusElement::zero(&self.pres) });
        let mut off = BTreeMap::new();
        for i in 0..l {
            for j in 0..l {
                if i != j && !self.entries[i][j].is_zero() {
                    off.insert((i, j), self.entries[i][j].clone());
                }
            }
        }
        Ok((l0, off))
    }

    /// The `L_0` part split as `(c E_11, Σ a_i E_ii)` with `c ∈ [Q,Q]`, `Σ a_i = 0`.
    pub fn l0_split(&self) -> Result<(TorusElement, Vec<TorusElement>), MatLieError> {
        if !self.in_sl() {
            return Err(MatLieError::NotInSl);
        }
        let c = self.trace();
        let mut a: Vec<TorusElement> = (0..self.size()).map(|i| self.entries[i][i].clone()).collect();
        a[0] = &a[0] - &c;
        Ok((c, a))
    }

    /// `I + a E_ij` together with its inverse `I − a E_ij` (`i ≠ j`).
    pub fn elementary(pres: &Arc<Presentation>, ell: usize, i: usize, j: usize, a: TorusElement) -> (TorusMatrix, TorusMatrix) {
        assert_ne!(i, j, "elementary matrices need i != j");
        let mut g = Self::identity(pres, ell);
        let mut h = Self::identity(pres, ell);
        g.entries[i][j] = a.clone();
        h.entries[i][j] = -&a;
        (g, h)
    }

    /// Diagonal matrix of units with its inverse.
    pub fn diagonal_unit(pres: &Arc<Presentation>, d: Vec<TorusElement>) -> Option<(TorusMatrix, TorusMatrix)> {
        let inv: Option<Vec<TorusElement>> = d.iter().map(TorusElement::inverse).collect();
        Some((Self::diagonal(pres, d), Self::diagonal(pres, inv?)))
    }

    /// Permutation matrix sending `e_j` to `e_{perm[j]}`, with its inverse.
    pub fn permutation(pres: &Arc<Presentation>, perm: &[usize]) -> (TorusMatrix, TorusMatrix) {
        let l = perm.len();
        let one = TorusElement::one(pres);
        let zero = TorusElement::zero(pres);
        let g = Self::from_fn(pres, l, |i, j| if perm[j] == i { one.clone() } else { zero.clone() });
        let h = g.transpose();
        (g, h)
    }

    /// Matrix JSON `{"size": ℓ, "entries": [[element, …], …]}`.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self.entries.iter().map(|r| Value::Array(r.iter().map(TorusElement::to_json).collect())).collect();
        serde_json::json!({ "size": self.size(), "entries": rows })
    }

    pub fn from_json(pres: &Arc<Presentation>, v: &Value) -> Result<TorusMatrix, MatLieError> {
        let bad = |m: &str| MatLieError::Malformed(m.to_string());
        let ell = v.get("size").and_then(Value::as_u64).ok_or_else(|| bad("missing \"size\""))? as usize;
        let rows = v.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing \"entries\""))?;
        if rows.len() != ell {
            return Err(MatLieError::SizeMismatch);
        }
        let mut entries = Vec::new();
        for r in rows {
            let r = r.as_array().ok_or_else(|| bad("matrix row must be a list"))?;
            if r.len() != ell {
                return Err(MatLieError::SizeMismatch);
            }
            entries.push(r.iter().map(|e| TorusElement::from_json(pres, e)).collect::<Result<Vec<_>, _>>()?);
        }
        TorusMatrix::from_entries(pres, entries)
    }
}

/// `{E_ij, x_p^{±1} E_ij : i ≠ j}`, a generating set of `sl_ℓ(Q)`.
pub fn sl_generators(ell: usize, pres: &Arc<Presentation>) -> Vec<TorusMatrix> {
    let mut out = Vec::new();
    for i in 0..ell {
        for j in 0..ell {
            if i == j {
                continue;
            }
            out.push(TorusMatrix::e(pres, ell, i, j));
            for p in 0..pres.rank() {
                for k in [1, -1] {
                    out.push(TorusMatrix::unit(pres, ell, i, j, TorusElement::generator(pres, p, k)));
                }
            }
        }
    }
    out
}
