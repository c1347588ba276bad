use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use super::intmat::{is_unimodular, IntMat};
use super::LatticeError;
use crate::scalar::{parse_literal, Field, Order, Scalar};

/// A quantum matrix `q = (q_ij)` over one coefficient field.
///
/// Entries of the form `ω^a · s^b` are additionally stored as exponent
/// pairs, which gives the fast path for cocycles and the integer data for
/// the central lattice.
#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    field: Field,
    q: Vec<Vec<Scalar>>,
    exps: Option<Vec<Vec<(i64, i64)>>>,
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presentation over {} [", self.field)?;
        for i in 0..self.rank() {
            for j in i + 1..self.rank() {
                write!(f, " q{}{}={}", i + 1, j + 1, self.q[i][j])?;
            }
        }
        write!(f, " ]")
    }
}

impl Presentation {
    /// Build from a full matrix, checking `q_ii = 1`, `q_ji = q_ij^{-1}` and
    /// that every entry is a nonzero element of `field`.
    pub fn new(field: Field, q: Vec<Vec<Scalar>>) -> Result<Presentation, LatticeError> {
        let n = q.len();
        if n == 0 {
            return Err(LatticeError::InvalidPresentation("rank must be positive".into()));
        }
        for (i, row) in q.iter().enumerate() {
            if row.len() != n {
                return Err(LatticeError::InvalidPresentation("quantum matrix is not square".into()));
            }
            for (j, x) in row.iter().enumerate() {
                if x.field() != field {
                    return Err(LatticeError::InvalidPresentation(format!("entry ({},{}) is not in {}", i + 1, j + 1, field)));
                }
                if x.is_zero() {
                    return Err(LatticeError::InvalidPresentation(format!("entry ({},{}) is zero", i + 1, j + 1)));
                }
            }
            if !row[i].is_one() {
                return Err(LatticeError::InvalidPresentation(format!("diagonal entry ({0},{0}) is not 1", i + 1)));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !(&q[i][j] * &q[j][i]).is_one() {
                    return Err(LatticeError::InvalidPresentation(format!(
                        "entries ({0},{1}) and ({1},{0}) are not inverse",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let exps: Option<Vec<Vec<(i64, i64)>>> = q
            .iter()
            .map(|row| row.iter().map(|x| x.root_monomial().map(|(a, b)| (a as i64, b))).collect())
            .collect();
        Ok(Presentation { field, q, exps })
    }

    /// Build from the strict upper triangle `upper[i][j - i - 1] = q_ij`.
    pub fn from_upper(field: Field, n: usize, upper: &[Vec<Scalar>]) -> Result<Presentation, LatticeError> {
        let mut q = vec![vec![field.one(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let x = upper
                    .get(i)
                    .and_then(|r| r.get(j - i - 1))
                    .ok_or_else(|| LatticeError::InvalidPresentation("upper triangle too short".into()))?;
                let x = x.embed(&field)?;
                q[j][i] = x.inv().map_err(|_| LatticeError::InvalidPresentation(format!("entry ({},{}) is zero", i + 1, j + 1)))?;
                q[i][j] = x;
            }
        }
        Presentation::new(field, q)
    }

    /// Presentation with `q_{2k-1,2k} = blocks[k]` and all other entries 1.
    pub fn from_blocks(field: Field, n: usize, blocks: &[Scalar]) -> Result<Presentation, LatticeError> {
        let upper: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                (i + 1..n)
                    .map(|j| if i % 2 == 0 && j == i + 1 && i / 2 < blocks.len() { blocks[i / 2].clone() } else { field.one() })
                    .collect()
            })
            .collect();
        Presentation::from_upper(field, n, &upper)
    }

    pub fn commutative(field: Field, n: usize) -> Presentation {
        Presentation::new(field, vec![vec![field.one(); n]; n]).expect("trivial quantum matrix")
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.q[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.q
    }

    /// `(a_ij, b_ij)` with `q_ij = ω^{a_ij} s^{b_ij}`, when every entry has
    /// that shape.
    pub fn exponent_data(&self) -> Option<&[Vec<(i64, i64)>]> {
        self.exps.as_deref()
    }

    pub fn is_commutative(&self) -> bool {
        self.q.iter().flatten().all(|x| x.is_one())
    }

    /// `τ(λ, μ) = Π_{i>j} q_ij^{λ_i μ_j}`, so that `x^λ x^μ = τ(λ,μ) x^{λ+μ}`.
    pub fn cocycle(&self, lambda: &[i64], mu: &[i64]) -> Scalar {
        let n = self.rank();
        self.product(|i, j| if i > j { lambda[i] as i128 * mu[j] as i128 } else { 0 }, n)
    }

    /// `β(λ, μ) = Π_{s,t} q_st^{λ_s μ_t}`, so that `x^λ x^μ = β(λ,μ) x^μ x^λ`.
    pub fn bicharacter(&self, lambda: &[i64], mu: &[i64]) -> Scalar {
        let n = self.rank();
        self.product(|i, j| if i != j { lambda[i] as i128 * mu[j] as i128 } else { 0 }, n)
    }

    fn product(&self, e: impl Fn(usize, usize) -> i128, n: usize) -> Scalar {
        if let Some(exps) = &self.exps {
            let big_m = self.field.root_modulus() as i128;
            let (mut a, mut b) = (0i128, 0i128);
            for i in 0..n {
                for j in 0..n {
                    let k = e(i, j);
                    if k != 0 {
                        let (ai, bi) = exps[i][j];
                        a = (a + k * ai as i128).rem_euclid(big_m);
                        b += k * bi as i128;
                    }
                }
            }
            return self.field.root_monomial(a as i64, i64::try_from(b).expect("exponent overflow"));
        }
        let mut acc = self.field.one();
        for i in 0..n {
            for j in 0..n {
                let k = e(i, j);
                if k != 0 {
                    acc = &acc * &self.q[i][j].pow(k as i64);
                }
            }
        }
        acc
    }

    /// Whether `x^λ` is central.
    pub fn is_central(&self, lambda: &[i64]) -> bool {
        (0..self.rank()).all(|j| {
            let mut e = vec![0; self.rank()];
            e[j] = 1;
            self.bicharacter(lambda, &e).is_one()
        })
    }

    /// Re-coordinatization `x̃_i = x^{A_i}`: `q̃_ij = Π_{s,t} q_st^{a_is a_jt}`.
    pub fn change_basis(&self, a: &IntMat) -> Result<Presentation, LatticeError> {
        let n = self.rank();
        if a.len() != n || !is_unimodular(a) {
            return Err(LatticeError::NotUnimodular);
        }
        let q: Vec<Vec<Scalar>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { self.field.one() } else { self.bicharacter(&a[i], &a[j]) }).collect())
            .collect();
        Presentation::new(self.field, q)
    }

    /// Opposite algebra: quantum matrix `(q_ij^{-1})`.
    pub fn opposite(&self) -> Presentation {
        let q = self.q.iter().map(|r| r.iter().map(|x| x.inv().expect("nonzero entry")).collect()).collect();
        Presentation::new(self.field, q).expect("opposite of a valid presentation")
    }

    /// Image under a coefficient-field map applied entry-wise.
    pub fn map_scalars(
        &self,
        field: Field,
        f: impl Fn(&Scalar) -> Result<Scalar, crate::scalar::ScalarError>,
    ) -> Result<Presentation, LatticeError> {
        let q = self
            .q
            .iter()
            .map(|r| r.iter().map(&f).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Presentation::new(field, q)
    }

    /// Multiplicative orders of the strict upper triangle, row by row.
    pub fn entry_orders(&self) -> Vec<Vec<Order>> {
        let n = self.rank();
        (0..n)
            .map(|i| (i + 1..n).map(|j| self.q[i][j].mult_order().expect("nonzero entry")).collect())
            .collect()
    }

    pub fn into_arc(self) -> Arc<Presentation> {
        Arc::new(self)
    }

    /// Parse `{"rank": n, "q": [[...]], "field"?: ...}`. Only the strict upper
    /// triangle of `q` is read; rows may be full or upper-triangular.
    pub fn from_json(v: &Value) -> Result<Presentation, LatticeError> {
        let bad = |m: &str| LatticeError::InvalidPresentation(m.to_string());
        let n = v.get("rank").and_then(Value::as_u64).ok_or_else(|| bad("missing positive integer \"rank\""))? as usize;
        if n == 0 {
            return Err(bad("rank must be positive"));
        }
        let rows = v.get("q").and_then(Value::as_array).ok_or_else(|| bad("missing array \"q\""))?;
        let mut lits = Vec::new();
        for i in 0..n {
            let mut row = Vec::new();
            for j in i + 1..n {
                let r = rows.get(i).and_then(Value::as_array).ok_or_else(|| bad(&format!("q row {} missing", i + 1)))?;
                // Full rows are indexed by column; triangular rows by offset.
                let cell = if r.len() == n { r.get(j) } else { r.get(j - i - 1) };
                let txt = match cell {
                    Some(Value::String(s)) => s.clone(),
                    Some(Value::Number(x)) => x.to_string(),
                    _ => return Err(bad(&format!("q[{}][{}] missing or not a scalar literal", i + 1, j + 1))),
                };
                let lit = parse_literal(&txt).map_err(|e| LatticeError::EntryParse { i: i + 1, j: j + 1, source: e })?;
                row.push(lit);
            }
            lits.push(row);
        }
        let field = match v.get("field") {
            None | Some(Value::Null) => {
                let mut f = Field::Rational;
                for l in lits.iter().flatten() {
                    f = f.join(&l.natural_field())?;
                }
                f
            }
            Some(spec) => parse_field(spec)?,
        };
        let upper = lits
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(k, l)| l.eval(&field).map_err(|e| LatticeError::EntryParse { i: i + 1, j: i + k + 2, source: e }))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Presentation::from_upper(field, n, &upper)
    }

    pub fn to_json(&self) -> Value {
        let n = self.rank();
        let q: Vec<Vec<String>> = (0..n).map(|i| (0..n).map(|j| self.q[i][j].to_string()).collect()).collect();
        serde_json::json!({ "rank": n, "q": q, "field": field_json(&self.field) })
    }
}

/// `"Q"`, `{"cyclotomic": m}`, `{"rational_function": m}` or `{"prime": p}`.
pub fn parse_field(v: &Value) -> Result<Field, LatticeError> {
    let bad = || LatticeError::InvalidPresentation(format!("unrecognized field {}", v));
    if v.as_str() == Some("Q") {
        return Ok(Field::Rational);
    }
    let obj = v.as_object().ok_or_else(bad)?;
    let (k, x) = obj.iter().next().ok_or_else(bad)?;
    let x = x.as_u64().ok_or_else(bad)?;
    match k.as_str() {
        "cyclotomic" => Ok(Field::cyclotomic(x as u32)),
        "rational_function" => Ok(Field::rational_function(x as u32)),
        "prime" => Ok(Field::prime(x)?),
        _ => Err(bad()),
    }
}

pub fn field_json(f: &Field) -> Value {
    match f {
        Field::Rational => Value::String("Q".into()),
        Field::Cyclotomic(m) => serde_json::json!({ "cyclotomic": m }),
        Field::RationalFunction(m) => serde_json::json!({ "rational_function": m }),
        Field::Prime(p) => serde_json::json!({ "prime": p }),
    }
}
