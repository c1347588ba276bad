use std::sync::Arc;

use num_integer::Integer;
use serde_json::{json, Value};

use super::{good_characteristic, MatLieError, TorusMatrix};
use crate::lattice::intmat::{self, IntMat};
use crate::lattice::Presentation;
use crate::qtorus::{same_presentation, MonomialMap, TorusElement};
use crate::scalar::{parse_literal, Scalar};

/// One factor of a [`MorphismWord`].
#[derive(Clone, Debug)]
pub enum Generator {
    /// `x_i ↦ c_i x^{A_i}` into the presentation re-coordinatized by `A^{-1}`.
    LatticeBaseChange { a: IntMat, rescale: Vec<Scalar> },
    /// Coefficient automorphism `ζ ↦ ζ^k`, `s ↦ s^{±1}`.
    ScalarFieldMap { zeta_power: i64, s_power: i64 },
    /// `x ↦ g x g^{-1}`.
    Int { g: TorusMatrix, g_inv: TorusMatrix },
    /// `x ↦ −ᵗx`, with the anti-isomorphism `Q → Q^op` on entries.
    Transpose,
    /// `gl_ℓ(Q) → gl_ℓ(Q^op)`, `x ↦ −x` read through `M_ℓ(Q)^op ≅ M_ℓ(Q^op)`.
    IotaOp,
    /// `x_i ↦ z_i x_i` for central units `z_i`.
    CentroidTwist { z: Vec<TorusElement> },
}

impl Generator {
    pub fn is_anti(&self) -> bool {
        matches!(self, Generator::Transpose | Generator::IotaOp)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Generator::LatticeBaseChange { .. } => "lattice_base_change",
            Generator::ScalarFieldMap { .. } => "scalar_field_map",
            Generator::Int { .. } => "int",
            Generator::Transpose => "transpose",
            Generator::IotaOp => "iota_op",
            Generator::CentroidTwist { .. } => "centroid_twist",
        }
    }

    /// `Int(I + a E_ij)` (0-based, `i ≠ j`).
    pub fn elementary(pres: &Arc<Presentation>, ell: usize, i: usize, j: usize, a: TorusElement) -> Generator {
        let (g, g_inv) = TorusMatrix::elementary(pres, ell, i, j, a);
        Generator::Int { g, g_inv }
    }

    pub fn permutation(pres: &Arc<Presentation>, perm: &[usize]) -> Generator {
        let (g, g_inv) = TorusMatrix::permutation(pres, perm);
        Generator::Int { g, g_inv }
    }

    pub fn diagonal(pres: &Arc<Presentation>, units: Vec<TorusElement>) -> Result<Generator, MatLieError> {
        let (g, g_inv) = TorusMatrix::diagonal_unit(pres, units).ok_or(MatLieError::NotInvertible)?;
        Ok(Generator::Int { g, g_inv })
    }
}

#[derive(Clone, Debug)]
enum Action {
    Monomial(MonomialMap),
    Field { zeta_power: i64, s_power: i64 },
    Conjugate { g: TorusMatrix, g_inv: TorusMatrix },
    Anti,
}

#[derive(Clone, Debug)]
struct Step {
    generator: Generator,
    source: Arc<Presentation>,
    target: Arc<Presentation>,
    action: Action,
}

impl Step {
    fn apply(&self, x: &TorusMatrix) -> Result<TorusMatrix, MatLieError> {
        if !same_presentation(x.presentation(), &self.source) {
            return Err(MatLieError::ChainMismatch(format!("{} expects a different source presentation", self.generator.name())));
        }
        Ok(match &self.action {
            Action::Monomial(m) => x.map_into(&self.target, |e| Ok(m.apply(e).expect("source checked")))?,
            Action::Field { zeta_power, s_power } => {
                x.map_into(&self.target, |e| e.map_coeffs(&self.target, |c| Ok(c.field_automorphism(*zeta_power, *s_power))))?
            }
            Action::Conjugate { g, g_inv } => g.checked_mul(x)?.checked_mul(g_inv)?,
            Action::Anti => x.map_into(&self.target, |e| Ok(-&e.op_map(&self.target)))?.transpose(),
        })
    }

    /// The induced map on central elements.
    fn apply_central(&self, z: &TorusElement) -> TorusElement {
        match &self.action {
            Action::Monomial(m) => m.apply(z).expect("source checked"),
            Action::Field { zeta_power, s_power } => {
                z.map_coeffs(&self.target, |c| Ok(c.field_automorphism(*zeta_power, *s_power))).expect("automorphism")
            }
            Action::Conjugate { .. } => z.clone(),
            Action::Anti => z.op_map(&self.target),
        }
    }
}

/// A composite of structured (anti-)isomorphisms between matrix algebras
/// of size `ℓ`, applied left to right.
#[derive(Clone, Debug)]
pub struct MorphismWord {
    ell: usize,
    source: Arc<Presentation>,
    steps: Vec<Step>,
}

impl MorphismWord {
    pub fn identity(source: &Arc<Presentation>, ell: usize) -> MorphismWord {
        MorphismWord { ell, source: source.clone(), steps: Vec::new() }
    }

    pub fn new(source: &Arc<Presentation>, ell: usize, generators: Vec<Generator>) -> Result<MorphismWord, MatLieError> {
        let mut w = MorphismWord::identity(source, ell);
        for g in generators {
            w.push(g)?;
        }
        Ok(w)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn source(&self) -> &Arc<Presentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presentation> {
        self.steps.last().map_or(&self.source, |s| &s.target)
    }

    pub fn generators(&self) -> impl Iterator<Item = &Generator> {
        self.steps.iter().map(|s| &s.generator)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn anti_count(&self) -> usize {
        self.steps.iter().filter(|s| s.generator.is_anti()).count()
    }

    /// Even number of anti-generators: the word is an associative map.
    pub fn is_associative(&self) -> bool {
        self.anti_count().is_multiple_of(2)
    }

    /// Appends a generator acting on the current target.
    pub fn push(&mut self, generator: Generator) -> Result<(), MatLieError> {
        let source = self.target().clone();
        let n = source.rank();
        let field = source.field();
        let (target, action) = match &generator {
            Generator::LatticeBaseChange { a, rescale } => {
                let a_inv = intmat::inverse_unimodular(a).ok_or(crate::lattice::LatticeError::NotUnimodular)?;
                if a.len() != n || (!rescale.is_empty() && rescale.len() != n) {
                    return Err(MatLieError::Qt(crate::qtorus::QtError::RankMismatch { got: a.len(), rank: n }));
                }
                let target = source.change_basis(&a_inv)?.into_arc();
                let images = (0..n).map(|i| (a[i].clone(), rescale.get(i).cloned().unwrap_or_else(|| field.one()))).collect();
                let m = MonomialMap::new(&source, &target, images)?;
                (target, Action::Monomial(m))
            }
            Generator::ScalarFieldMap { zeta_power, s_power } => {
                let modulus = field.cyclotomic_order().max(1) as i64;
                if zeta_power.gcd(&modulus) != 1 || s_power.abs() != 1 {
                    return Err(MatLieError::Malformed("field map must send ζ to a primitive power and s to s^{±1}".into()));
                }
                let target = source.map_scalars(field, |c| Ok(c.field_automorphism(*zeta_power, *s_power)))?.into_arc();
                (target, Action::Field { zeta_power: *zeta_power, s_power: *s_power })
            }
            Generator::Int { g, g_inv } => {
                if g.size() != self.ell || g_inv.size() != self.ell {
                    return Err(MatLieError::SizeMismatch);
                }
                if !same_presentation(g.presentation(), &source) || !same_presentation(g_inv.presentation(), &source) {
                    return Err(MatLieError::ChainMismatch("Int factor over a different presentation".into()));
                }
                let id = TorusMatrix::identity(&source, self.ell);
                if g.checked_mul(g_inv)? != id || g_inv.checked_mul(g)? != id {
                    return Err(MatLieError::NotInvertible);
                }
                (source.clone(), Action::Conjugate { g: g.clone(), g_inv: g_inv.clone() })
            }
            Generator::Transpose | Generator::IotaOp => (source.opposite().into_arc(), Action::Anti),
            Generator::CentroidTwist { z } => {
                if z.len() != n {
                    return Err(MatLieError::Qt(crate::qtorus::QtError::RankMismatch { got: z.len(), rank: n }));
                }
                let mut images = Vec::new();
                for (i, zi) in z.iter().enumerate() {
                    let Some((xi, c)) = zi.as_monomial() else {
                        return Err(MatLieError::Malformed("centroid twist needs unit monomials".into()));
                    };
                    if !zi.is_central() {
                        return Err(MatLieError::Malformed("centroid twist needs central elements".into()));
                    }
                    let xi_i = TorusElement::generator(&source, i, 1);
                    let y = &TorusElement::monomial(&source, xi.clone(), c.clone()) * &xi_i;
                    let (mu, cy) = y.as_monomial().expect("product of monomials");
                    images.push((mu.clone(), cy.clone()));
                }
                let m = MonomialMap::new(&source, &source, images)?;
                (source.clone(), Action::Monomial(m))
            }
        };
        self.steps.push(Step { generator, source, target, action });
        Ok(())
    }

    /// Appends all factors of `other`, whose source must be this word's target.
    pub fn then(mut self, other: &MorphismWord) -> Result<MorphismWord, MatLieError> {
        if !same_presentation(self.target(), &other.source) || self.ell != other.ell {
            return Err(MatLieError::ChainMismatch("words do not compose".into()));
        }
        for s in &other.steps {
            self.push(s.generator.clone())?;
        }
        Ok(self)
    }

    pub fn apply(&self, x: &TorusMatrix) -> Result<TorusMatrix, MatLieError> {
        if x.size() != self.ell {
            return Err(MatLieError::SizeMismatch);
        }
        if !same_presentation(x.presentation(), &self.source) {
            return Err(MatLieError::ChainMismatch("argument is not over the word's source".into()));
        }
        let mut y = x.clone();
        for s in &self.steps {
            y = s.apply(&y)?;
        }
        Ok(y)
    }

    /// Extension to `gl_ℓ`: `zE + X ↦ f_Z(z)E + w(X)`.
    pub fn f_gl_extend(&self) -> Result<GlExtension<'_>, MatLieError> {
        for p in std::iter::once(&self.source).chain(self.steps.iter().map(|s| &s.target)) {
            if !good_characteristic(&p.field(), self.ell) {
                return Err(MatLieError::BadCharacteristic { characteristic: p.field().characteristic(), ell: self.ell });
            }
        }
        Ok(GlExtension { word: self })
    }

    /// Word JSON: `{"ell": ℓ, "word": [generator, …]}`.
    pub fn to_json(&self) -> Value {
        let gens: Vec<Value> = self
            .steps
            .iter()
            .map(|s| match &s.generator {
                Generator::LatticeBaseChange { a, rescale } => {
                    let mut v = json!({ "type": "lattice_base_change", "matrix": a });
                    if !rescale.is_empty() {
                        v["rescale"] = json!(rescale.iter().map(|c| c.to_string()).collect::<Vec<_>>());
                    }
                    v
                }
                Generator::ScalarFieldMap { zeta_power, s_power } => {
                    json!({ "type": "scalar_field_map", "zeta_power": zeta_power, "s_power": s_power })
                }
                Generator::Int { g, g_inv } => json!({ "type": "int", "g": g.to_json(), "g_inv": g_inv.to_json() }),
                Generator::Transpose => json!({ "type": "transpose" }),
                Generator::IotaOp => json!({ "type": "iota_op" }),
                Generator::CentroidTwist { z } => {
                    json!({ "type": "centroid_twist", "z": z.iter().map(TorusElement::to_json).collect::<Vec<_>>() })
                }
            })
            .collect();
        json!({ "ell": self.ell, "word": gens })
    }

    /// Parses a word over `source`. Besides the records emitted by
    /// [`MorphismWord::to_json`], accepts the shorthands `elementary`
    /// (`i`, `j` 1-based, `entry`), `diagonal` (`entries`) and
    /// `permutation` (`perm`, 1-based images).
    pub fn from_json(source: &Arc<Presentation>, v: &Value) -> Result<MorphismWord, MatLieError> {
        let bad = |m: String| MatLieError::Malformed(m);
        let ell = v.get("ell").and_then(Value::as_u64).ok_or_else(|| bad("missing \"ell\"".into()))? as usize;
        let list = v.get("word").and_then(Value::as_array).ok_or_else(|| bad("missing \"word\" list".into()))?;
        let mut w = MorphismWord::identity(source, ell);
        for (k, r) in list.iter().enumerate() {
            let cur = w.target().clone();
            let ty = r.get("type").and_then(Value::as_str).ok_or_else(|| bad(format!("generator {}: missing \"type\"", k)))?;
            let index = |key: &str| -> Result<usize, MatLieError> {
                let i = r.get(key).and_then(Value::as_u64).ok_or_else(|| bad(format!("generator {}: missing \"{}\"", k, key)))?;
                if i == 0 || i as usize > ell {
                    return Err(bad(format!("generator {}: index {} out of range", k, i)));
                }
                Ok(i as usize - 1)
            };
            let elements = |key: &str| -> Result<Vec<TorusElement>, MatLieError> {
                let a = r.get(key).and_then(Value::as_array).ok_or_else(|| bad(format!("generator {}: missing \"{}\"", k, key)))?;
                Ok(a.iter().map(|e| TorusElement::from_json(&cur, e)).collect::<Result<_, _>>()?)
            };
            let g = match ty {
                "lattice_base_change" => {
                    let a: IntMat = serde_json::from_value(r.get("matrix").cloned().unwrap_or(Value::Null))
                        .map_err(|e| bad(format!("generator {}: bad \"matrix\": {}", k, e)))?;
                    let rescale = match r.get("rescale").and_then(Value::as_array) {
                        Some(cs) => cs
                            .iter()
                            .map(|c| {
                                let text = c.as_str().map(str::to_string).unwrap_or_else(|| c.to_string());
                                Ok(parse_literal(&text)?.eval(&cur.field())?)
                            })
                            .collect::<Result<Vec<_>, MatLieError>>()?,
                        None => Vec::new(),
                    };
                    Generator::LatticeBaseChange { a, rescale }
                }
                "scalar_field_map" => Generator::ScalarFieldMap {
                    zeta_power: r.get("zeta_power").and_then(Value::as_i64).unwrap_or(1),
                    s_power: r.get("s_power").and_then(Value::as_i64).unwrap_or(1),
                },
                "int" => Generator::Int {
                    g: TorusMatrix::from_json(&cur, r.get("g").unwrap_or(&Value::Null))?,
                    g_inv: TorusMatrix::from_json(&cur, r.get("g_inv").unwrap_or(&Value::Null))?,
                },
                "elementary" => {
                    let (i, j) = (index("i")?, index("j")?);
                    if i == j {
                        return Err(bad(format!("generator {}: elementary needs i != j", k)));
                    }
                    let a = TorusElement::from_json(&cur, r.get("entry").unwrap_or(&Value::Null))?;
                    Generator::elementary(&cur, ell, i, j, a)
                }
                "diagonal" => {
                    let d = elements("entries")?;
                    if d.len() != ell {
                        return Err(MatLieError::SizeMismatch);
                    }
                    Generator::diagonal(&cur, d)?
                }
                "permutation" => {
                    let p: Vec<usize> = serde_json::from_value(r.get("perm").cloned().unwrap_or(Value::Null))
                        .map_err(|e| bad(format!("generator {}: bad \"perm\": {}", k, e)))?;
                    let mut seen = vec![false; ell];
                    if p.len() != ell || p.iter().any(|&x| x == 0 || x > ell || std::mem::replace(&mut seen[x - 1], true)) {
                        return Err(bad(format!("generator {}: \"perm\" is not a permutation of 1..{}", k, ell)));
                    }
                    Generator::permutation(&cur, &p.iter().map(|x| x - 1).collect::<Vec<_>>())
                }
                "transpose" => Generator::Transpose,
                "iota_op" => Generator::IotaOp,
                "centroid_twist" => Generator::CentroidTwist { z: elements("z")? },
                other => return Err(bad(format!("generator {}: unknown type \"{}\"", k, other))),
            };
            w.push(g)?;
        }
        Ok(w)
    }
}

/// A word extended from `sl_ℓ` to `gl_ℓ` through its action on the centre.
#[derive(Clone, Copy, Debug)]
pub struct GlExtension<'a> {
    word: &'a MorphismWord,
}

impl GlExtension<'_> {
    /// `f_Z` on a central element of the source.
    pub fn f_z(&self, z: &TorusElement) -> Result<TorusElement, MatLieError> {
        if !z.is_central() {
            return Err(MatLieError::Malformed("f_Z takes central elements".into()));
        }
        if !same_presentation(z.presentation(), &self.word.source) {
            return Err(MatLieError::ChainMismatch("argument is not over the word's source".into()));
        }
        let mut y = z.clone();
        for s in &self.word.steps {
            y = s.apply_central(&y);
        }
        Ok(y)
    }

    /// Splits `x = zE + X` with `z` central and `X ∈ sl`.
    pub fn split(x: &TorusMatrix) -> (TorusElement, TorusMatrix) {
        let (c, _) = x.trace().centre_split();
        let l = x.size();
        let inv_l = x.presentation().field().from_i64(l as i64).inv().expect("ℓ is invertible in good characteristic");
        let z = c.scale(&inv_l);
        let pres = x.presentation();
        let big_z = TorusMatrix::diagonal(pres, vec![z.clone(); l]);
        (z, x.checked_sub(&big_z).expect("same shape"))
    }

    pub fn apply(&self, x: &TorusMatrix) -> Result<TorusMatrix, MatLieError> {
        let (z, big_x) = Self::split(x);
        let fz = self.f_z(&z)?;
        let fx = self.word.apply(&big_x)?;
        let target = fx.presentation().clone();
        fx.checked_add(&TorusMatrix::diagonal(&target, vec![fz; self.word.ell]))
    }
}
