//! Reduction homomorphisms from a localized subring of `Q(ζ_m)(s)` to `F_p`.

use serde::{Deserialize, Serialize};

use super::cyclotomic::powmod;
use super::{prime, Field, Fp, Scalar, ScalarError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZetaImage {
    pub m: u32,
    pub z: u64,
}

/// `ζ_m ↦ z`, `s ↦ s_image`, rationals reduced mod `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueMap {
    pub p: u64,
    #[serde(rename = "s", default, skip_serializing_if = "Option::is_none")]
    pub s_image: Option<u64>,
    pub zeta: ZetaImage,
}

impl ResidueMap {
    /// Map for `field` sending `ζ_m` to `g^((p-1)/m)` with `g` the smallest
    /// primitive root. Requires `m | p - 1`.
    pub fn standard(field: &Field, p: u64, s_image: Option<u64>) -> Result<ResidueMap, ScalarError> {
        let m = field.cyclotomic_order();
        if !prime::is_prime(p) || !(p - 1).is_multiple_of(m as u64) {
            return Err(ScalarError::Unrepresentable {
                field: *field,
                what: format!("no primitive {}-th root of unity mod {}", m, p),
            });
        }
        if field.has_transcendental() && s_image.is_none() {
            return Err(ScalarError::Unrepresentable { field: *field, what: "missing image of s".into() });
        }
        let g = prime::primitive_root(p);
        let z = powmod(g, (p - 1) / m as u64, p);
        Ok(ResidueMap { p, s_image: s_image.map(|s| s % p), zeta: ZetaImage { m, z } })
    }

    pub fn target(&self) -> Field {
        Field::Prime(self.p)
    }

    /// Image of `x`, or [`ScalarError::OutsideSubring`] when a denominator
    /// vanishes mod `p`.
    pub fn apply(&self, x: &Scalar) -> Result<Scalar, ScalarError> {
        let p = self.p;
        let outside = || ScalarError::OutsideSubring(x.to_string());
        let z_for = |m: u32| -> Result<u64, ScalarError> {
            if !self.zeta.m.is_multiple_of(m) {
                return Err(ScalarError::KindMismatch(x.field(), self.target()));
            }
            Ok(powmod(self.zeta.z, (self.zeta.m / m) as u64, p))
        };
        let v = match x {
            Scalar::Rational(r) => super::cyclotomic::rational_mod(r, p).ok_or_else(outside)?,
            Scalar::Cyclotomic(c) => c.eval_mod(p, z_for(c.order())?).ok_or_else(outside)?,
            Scalar::RationalFunction(r) => {
                let s0 = self.s_image.ok_or_else(|| ScalarError::KindMismatch(x.field(), self.target()))?;
                r.eval_mod(p, z_for(r.order())?, s0).ok_or_else(outside)?
            }
            Scalar::Prime(f) if f.modulus() == p => f.value(),
            Scalar::Prime(_) => return Err(ScalarError::KindMismatch(x.field(), self.target())),
        };
        Ok(Scalar::Prime(Fp::new(p, v as i128)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_s_and_zeta() {
        let f = Field::rational_function(3);
        let r = ResidueMap::standard(&f, 7, Some(3)).unwrap();
        let x = f.parse("s^2 + zeta(3)").unwrap();
        let z = r.zeta.z;
        assert_eq!(powmod(z, 3, 7), 1);
        assert_ne!(z, 1);
        assert_eq!(r.apply(&x).unwrap(), Field::Prime(7).from_i64(9 + z as i64));
    }

    #[test]
    fn vanishing_denominator() {
        let f = Field::rational_function(1);
        let r = ResidueMap::standard(&f, 7, Some(3)).unwrap();
        let x = f.parse("1/(s-3)").unwrap();
        assert!(matches!(r.apply(&x), Err(ScalarError::OutsideSubring(_))));
        let y = f.parse("(s-3)/(s-3)").unwrap();
        assert!(r.apply(&y).unwrap().is_one());
    }

    #[test]
    fn reduction_is_a_homomorphism() {
        let f = Field::rational_function(4);
        let r = ResidueMap::standard(&f, 13, Some(5)).unwrap();
        let a = f.parse("zeta(4)*s + 2").unwrap();
        let b = f.parse("s^-2 - zeta(4)").unwrap();
        let lhs = r.apply(&(&a * &b)).unwrap();
        let rhs = &r.apply(&a).unwrap() * &r.apply(&b).unwrap();
        assert_eq!(lhs, rhs);
    }
}
