use std::sync::Arc;

use serde_json::{json, Value};

use super::{good_characteristic, MatLieError, TorusMatrix};
use crate::lattice::Presentation;
use crate::qtorus::TorusElement;
use crate::scalar::Scalar;

/// The diagonal subalgebra `h_F` of `sl_ℓ(Q)`.
#[derive(Clone, Debug)]
pub struct StandardMad {
    pres: Arc<Presentation>,
    ell: usize,
}

pub fn standard_mad(ell: usize, pres: &Arc<Presentation>) -> Result<StandardMad, MatLieError> {
    if ell < 2 {
        return Err(MatLieError::SizeMismatch);
    }
    let field = pres.field();
    if !good_characteristic(&field, ell) {
        return Err(MatLieError::BadCharacteristic { characteristic: field.characteristic(), ell });
    }
    Ok(StandardMad { pres: pres.clone(), ell })
}

impl StandardMad {
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `E_ii − E_{i+1,i+1}`, `i = 1, …, ℓ−1`.
    pub fn basis(&self) -> Vec<TorusMatrix> {
        (0..self.ell - 1).map(|i| self.basis_element(i)).collect()
    }

    pub fn basis_element(&self, i: usize) -> TorusMatrix {
        let f = self.pres.field();
        let mut s = vec![f.zero(); self.ell];
        s[i] = f.one();
        s[i + 1] = -&f.one();
        TorusMatrix::scalar_diagonal(&self.pres, &s)
    }

    /// `Σ c_i (E_ii − E_{i+1,i+1})`.
    pub fn element(&self, c: &[Scalar]) -> TorusMatrix {
        let f = self.pres.field();
        let mut d = vec![f.zero(); self.ell];
        for (i, x) in c.iter().enumerate() {
            d[i] = &d[i] + x;
            d[i + 1] = &d[i + 1] - x;
        }
        TorusMatrix::scalar_diagonal(&self.pres, &d)
    }
}

/// Result of deciding whether a diagonal `d ∈ sl_ℓ(Q)` lies in `h_F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MadOutcome {
    /// Coordinates in the basis `E_ii − E_{i+1,i+1}`.
    InStandardMad { coords: Vec<Scalar> },
    /// Step 1: `d_i` is not central. Step 2: `d_i − d_j` is central but not
    /// a scalar. Step 3: `d_1` is not a scalar.
    NotADExtension { step: u8, entries: Vec<usize>, witness: TorusElement },
}

impl MadOutcome {
    pub fn is_in_mad(&self) -> bool {
        matches!(self, MadOutcome::InStandardMad { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            MadOutcome::InStandardMad { coords } => {
                json!({ "outcome": "InStandardMad", "coords": coords.iter().map(|c| c.to_string()).collect::<Vec<_>>() })
            }
            MadOutcome::NotADExtension { step, entries, witness } => json!({
                "outcome": "NotADExtension",
                "step": step,
                "entries": entries.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "witness": witness.to_json(),
            }),
        }
    }
}

pub fn mad_extension_test(d: &TorusMatrix) -> Result<MadOutcome, MatLieError> {
    if !d.is_diagonal() {
        return Err(MatLieError::NotDiagonal);
    }
    if !d.in_sl() {
        return Err(MatLieError::NotInSl);
    }
    let l = d.size();
    let diag: Vec<&TorusElement> = (0..l).map(|i| d.entry(i, i)).collect();
    for (i, x) in diag.iter().enumerate() {
        let (_, rest) = x.centre_split();
        if !rest.is_zero() {
            return Ok(MadOutcome::NotADExtension { step: 1, entries: vec![i], witness: rest });
        }
    }
    for i in 0..l {
        for j in i + 1..l {
            let diff = diag[i] - diag[j];
            if diff.as_scalar().is_none() {
                return Ok(MadOutcome::NotADExtension { step: 2, entries: vec![i, j], witness: diff });
            }
        }
    }
    if diag[0].as_scalar().is_none() {
        return Ok(MadOutcome::NotADExtension { step: 3, entries: vec![0], witness: diag[0].clone() });
    }
    let f = d.presentation().field();
    let mut acc = f.zero();
    let coords = diag[..l - 1]
        .iter()
        .map(|x| {
            acc = &acc + &x.as_scalar().unwrap();
            acc.clone()
        })
        .collect();
    Ok(MadOutcome::InStandardMad { coords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn z3() -> Arc<Presentation> {
        let f = Field::cyclotomic(3);
        Arc::new(Presentation::from_blocks(f, 2, &[f.zeta(3).unwrap()]).unwrap())
    }

    #[test]
    fn basis_shapes() {
        let p = z3();
        assert_eq!(standard_mad(2, &p).unwrap().basis().len(), 1);
        let b = standard_mad(3, &p).unwrap().basis();
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|x| x.in_sl() && x.is_diagonal()));
        let f7 = Field::prime(7).unwrap();
        let p7 = Arc::new(Presentation::commutative(f7, 1));
        assert!(standard_mad(5, &p7).is_ok());
        assert!(standard_mad(7, &p7).is_err());
        let f3 = Field::prime(3).unwrap();
        assert!(standard_mad(2, &Arc::new(Presentation::commutative(f3, 1))).is_err());
    }

    #[test]
    fn decision_chain() {
        let p = z3();
        let h = standard_mad(2, &p).unwrap();
        let out = mad_extension_test(&h.basis()[0]).unwrap();
        assert!(out.is_in_mad());
        let t = TorusElement::x_pow(&p, &[3, 0]);
        let d = TorusMatrix::diagonal(&p, vec![t.clone(), -&t]);
        match mad_extension_test(&d).unwrap() {
            MadOutcome::NotADExtension { step, witness, .. } => {
                assert_eq!(step, 2);
                assert_eq!(witness, t.scale(&p.field().from_i64(2)));
            }
            o => panic!("{:?}", o),
        }
        let u = TorusElement::x_pow(&p, &[1, 1]);
        let d = TorusMatrix::diagonal(&p, vec![u.clone(), -&u]);
        assert!(matches!(mad_extension_test(&d).unwrap(), MadOutcome::NotADExtension { step: 1, .. }));
        assert_eq!(mad_extension_test(&TorusMatrix::e(&p, 2, 0, 1)), Err(MatLieError::NotDiagonal));
    }

    #[test]
    fn coordinates_reassemble() {
        let p = z3();
        let f = p.field();
        let h = standard_mad(3, &p).unwrap();
        let c = vec![f.parse("zeta(3)+2").unwrap(), f.from_i64(-5)];
        let x = h.element(&c);
        assert_eq!(mad_extension_test(&x).unwrap(), MadOutcome::InStandardMad { coords: c });
    }
}
