//! Exact coefficient fields: `Q`, `Q(ζ_m)`, `Q(ζ_m)(s)` and `F_p`.
//!
//! Every [`Scalar`] carries its [`Field`]; arithmetic between different
//! fields is a [`ScalarError::KindMismatch`]. The operator impls panic on a
//! mismatch and are meant for code that has already fixed one field; the
//! `checked_*` methods report it instead.

pub mod cyclotomic;
mod parse;
pub mod prime;
pub mod ratfun;
mod residue;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cyclotomic::Cyclo;
pub use parse::{parse_literal, Literal};
pub use prime::Fp;
pub use ratfun::RatFn;
pub use residue::ResidueMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalar kind mismatch: {0} vs {1}")]
    KindMismatch(Field, Field),
    #[error("multiplicative order of zero requested")]
    ZeroArgument,
    #[error("scalar {0} lies outside the subring of the residue map")]
    OutsideSubring(String),
    #[error("literal not representable in {field}: {what}")]
    Unrepresentable { field: Field, what: String },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// The coefficient field a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rational,
    /// `Q(ζ_m)`, with `m ≥ 3` and `m ≢ 2 (mod 4)`.
    Cyclotomic(u32),
    /// `Q(ζ_m)(s)`, `m ≢ 2 (mod 4)`; `m = 1` is `Q(s)`.
    RationalFunction(u32),
    Prime(u64),
}

fn normalize_order(m: u32) -> u32 {
    if m % 4 == 2 {
        m / 2
    } else {
        m.max(1)
    }
}

fn lcm32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Cyclotomic(m) => write!(f, "Q(zeta_{})", m),
            Field::RationalFunction(1) => write!(f, "Q(s)"),
            Field::RationalFunction(m) => write!(f, "Q(zeta_{})(s)", m),
            Field::Prime(p) => write!(f, "F_{}", p),
        }
    }
}

fn primitive_root_cached(p: u64) -> u64 {
    static CACHE: OnceLock<Mutex<HashMap<u64, u64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&g) = cache.lock().unwrap().get(&p) {
        return g;
    }
    let g = prime::primitive_root(p);
    cache.lock().unwrap().insert(p, g);
    g
}

impl Field {
    /// `Q(ζ_m)` with `m` normalized; `Q` when it collapses.
    pub fn cyclotomic(m: u32) -> Field {
        match normalize_order(m) {
            1 => Field::Rational,
            m => Field::Cyclotomic(m),
        }
    }

    pub fn rational_function(m: u32) -> Field {
        Field::RationalFunction(normalize_order(m))
    }

    pub fn prime(p: u64) -> Result<Field, ScalarError> {
        if prime::is_prime(p) && p < (1u64 << 62) {
            Ok(Field::Prime(p))
        } else {
            Err(ScalarError::Unrepresentable { field: Field::Rational, what: format!("{} is not a usable prime", p) })
        }
    }

    /// Order `m` of the adjoined root of unity (1 for `Q`, `Q(s)`, `F_p`).
    pub fn cyclotomic_order(&self) -> u32 {
        match self {
            Field::Cyclotomic(m) | Field::RationalFunction(m) => *m,
            _ => 1,
        }
    }

    pub fn has_transcendental(&self) -> bool {
        matches!(self, Field::RationalFunction(_))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            _ => 0,
        }
    }

    /// Order `M` of the distinguished generator `ω` of the finite
    /// multiplicative subgroup used for exponent bookkeeping.
    pub fn root_modulus(&self) -> u64 {
        match self {
            Field::Prime(p) => p - 1,
            _ => Cyclo::root_modulus(self.cyclotomic_order()),
        }
    }

    /// Smallest field containing both, if one exists.
    pub fn join(&self, other: &Field) -> Result<Field, ScalarError> {
        use Field::*;
        match (self, other) {
            (Prime(p), Prime(q)) if p == q => Ok(*self),
            (Prime(_), _) | (_, Prime(_)) => Err(ScalarError::KindMismatch(*self, *other)),
            _ => {
                let m = lcm32(self.cyclotomic_order(), other.cyclotomic_order());
                if self.has_transcendental() || other.has_transcendental() {
                    Ok(Field::rational_function(m))
                } else {
                    Ok(Field::cyclotomic(m))
                }
            }
        }
    }

    /// True when every scalar of `self` embeds into `other`.
    pub fn embeds_in(&self, other: &Field) -> bool {
        self.join(other).is_ok_and(|j| j == *other)
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::zero()),
            Field::Cyclotomic(m) => Scalar::Cyclotomic(Cyclo::zero(*m)),
            Field::RationalFunction(m) => Scalar::RationalFunction(RatFn::zero(*m)),
            Field::Prime(p) => Scalar::Prime(Fp::new(*p, 0)),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.from_rational(&BigRational::from_integer(v.into())).expect("integers always embed")
    }

    pub fn from_rational(&self, r: &BigRational) -> Result<Scalar, ScalarError> {
        Ok(match self {
            Field::Rational => Scalar::Rational(r.clone()),
            Field::Cyclotomic(m) => Scalar::Cyclotomic(Cyclo::from_rational(*m, r.clone())),
            Field::RationalFunction(m) => {
                Scalar::RationalFunction(RatFn::constant(Cyclo::from_rational(*m, r.clone())))
            }
            Field::Prime(p) => {
                let v = cyclotomic::rational_mod(r, *p).ok_or_else(|| ScalarError::Unrepresentable {
                    field: *self,
                    what: format!("{} has denominator divisible by {}", r, p),
                })?;
                Scalar::Prime(Fp::new(*p, v as i128))
            }
        })
    }

    /// `ω^k` for the distinguished generator `ω` of order [`Field::root_modulus`].
    pub fn omega_pow(&self, k: i64) -> Scalar {
        match self {
            Field::Prime(p) => {
                let g = Fp::new(*p, primitive_root_cached(*p) as i128);
                let e = k.rem_euclid((*p - 1) as i64) as u64;
                Scalar::Prime(g.pow(e))
            }
            Field::Rational => {
                if k.rem_euclid(2) == 0 {
                    self.one()
                } else {
                    self.from_i64(-1)
                }
            }
            Field::Cyclotomic(m) => Scalar::Cyclotomic(Cyclo::omega_pow(*m, k)),
            Field::RationalFunction(m) => Scalar::RationalFunction(RatFn::constant(Cyclo::omega_pow(*m, k))),
        }
    }

    /// A primitive `k`-th root of unity `ζ_k`, when the field contains one.
    pub fn zeta(&self, k: u32) -> Result<Scalar, ScalarError> {
        let big_m = self.root_modulus();
        if k == 0 || !big_m.is_multiple_of(k as u64) {
            return Err(ScalarError::Unrepresentable { field: *self, what: format!("zeta({})", k) });
        }
        Ok(self.omega_pow((big_m / k as u64) as i64))
    }

    /// `s^k` in a rational function field.
    pub fn s_pow(&self, k: i64) -> Result<Scalar, ScalarError> {
        match self {
            Field::RationalFunction(m) => Ok(Scalar::RationalFunction(RatFn::monomial(Cyclo::one(*m), k))),
            _ if k == 0 => Ok(self.one()),
            _ => Err(ScalarError::Unrepresentable { field: *self, what: format!("s^{}", k) }),
        }
    }

    /// `ω^a · s^b`.
    pub fn root_monomial(&self, a: i64, b: i64) -> Scalar {
        let w = self.omega_pow(a);
        if b == 0 {
            w
        } else {
            &w * &self.s_pow(b).expect("transcendental present")
        }
    }
}

/// Multiplicative order of a nonzero scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn is_finite(&self) -> bool {
        matches!(self, Order::Finite(_))
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{}", k),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

/// An exact field element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Cyclotomic(Cyclo),
    RationalFunction(RatFn),
    Prime(Fp),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Cyclotomic(c) => Field::Cyclotomic(c.order()),
            Scalar::RationalFunction(r) => Field::RationalFunction(r.order()),
            Scalar::Prime(x) => Field::Prime(x.modulus()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Cyclotomic(c) => c.is_zero(),
            Scalar::RationalFunction(r) => r.is_zero(),
            Scalar::Prime(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field().one()
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Cyclotomic(a), Scalar::Cyclotomic(b)) if a.order() == b.order() => Scalar::Cyclotomic(a.add(b)),
            (Scalar::RationalFunction(a), Scalar::RationalFunction(b)) if a.order() == b.order() => {
                Scalar::RationalFunction(a.add(b))
            }
            (Scalar::Prime(a), Scalar::Prime(b)) if a.modulus() == b.modulus() => Scalar::Prime(a.add(*b)),
            _ => return Err(ScalarError::KindMismatch(self.field(), other.field())),
        })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Cyclotomic(a), Scalar::Cyclotomic(b)) if a.order() == b.order() => Scalar::Cyclotomic(a.mul(b)),
            (Scalar::RationalFunction(a), Scalar::RationalFunction(b)) if a.order() == b.order() => {
                Scalar::RationalFunction(a.mul(b))
            }
            (Scalar::Prime(a), Scalar::Prime(b)) if a.modulus() == b.modulus() => Scalar::Prime(a.mul(*b)),
            _ => return Err(ScalarError::KindMismatch(self.field(), other.field())),
        })
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        let r = match self {
            Scalar::Rational(a) => (!a.is_zero()).then(|| Scalar::Rational(a.recip())),
            Scalar::Cyclotomic(a) => a.inv().map(Scalar::Cyclotomic),
            Scalar::RationalFunction(a) => a.inv().map(Scalar::RationalFunction),
            Scalar::Prime(a) => a.inv().map(Scalar::Prime),
        };
        r.ok_or(ScalarError::DivisionByZero)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.checked_mul(&other.inv()?)
    }

    /// Integer power; negative exponents invert. Panics on `0^(-k)`.
    pub fn pow(&self, e: i64) -> Scalar {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        if let Some(a) = self.omega_log() {
            let big_m = self.field().root_modulus() as i128;
            let k = ((a as i128) * (e as i128)).rem_euclid(big_m);
            return self.field().omega_pow(k as i64);
        }
        let mut base = self.clone();
        let mut acc = self.field().one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `k` with `self = ω^k`, for roots of unity of the field.
    pub fn omega_log(&self) -> Option<u64> {
        match self {
            Scalar::Rational(r) => {
                if r.is_one() {
                    Some(0)
                } else if (-r).is_one() {
                    Some(1)
                } else {
                    None
                }
            }
            Scalar::Cyclotomic(c) => c.omega_log(),
            Scalar::RationalFunction(r) => r.as_constant().and_then(|c| c.omega_log()),
            Scalar::Prime(x) => {
                if x.is_zero() {
                    None
                } else {
                    let p = x.modulus();
                    prime::discrete_log(x.value(), primitive_root_cached(p), p)
                }
            }
        }
    }

    /// `(a, b)` with `self = ω^a · s^b`, when the scalar has that shape.
    pub fn root_monomial(&self) -> Option<(u64, i64)> {
        match self {
            Scalar::RationalFunction(r) => {
                let (c, k) = r.as_monomial()?;
                Some((c.omega_log()?, k))
            }
            _ => Some((self.omega_log()?, 0)),
        }
    }

    pub fn mult_order(&self) -> Result<Order, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroArgument);
        }
        if let Scalar::Prime(x) = self {
            return Ok(Order::Finite(x.order()));
        }
        match self.omega_log() {
            None => Ok(Order::Infinite),
            Some(a) => {
                let big_m = self.field().root_modulus();
                Ok(Order::Finite(big_m / a.gcd(&big_m)))
            }
        }
    }

    /// Rational value, when the scalar lies in the prime subfield `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Cyclotomic(c) => c.as_rational(),
            Scalar::RationalFunction(r) => r.as_constant().and_then(|c| c.as_rational()),
            Scalar::Prime(_) => None,
        }
    }

    /// Image under the field inclusion `self.field() ⊆ target`.
    pub fn embed(&self, target: &Field) -> Result<Scalar, ScalarError> {
        if self.field() == *target {
            return Ok(self.clone());
        }
        if !self.field().embeds_in(target) {
            return Err(ScalarError::KindMismatch(self.field(), *target));
        }
        let m = target.cyclotomic_order();
        let as_cyclo = |s: &Scalar| -> Cyclo {
            match s {
                Scalar::Rational(r) => Cyclo::from_rational(m, r.clone()),
                Scalar::Cyclotomic(c) => c.embed(m),
                _ => unreachable!(),
            }
        };
        Ok(match (self, target) {
            (Scalar::RationalFunction(r), Field::RationalFunction(_)) => Scalar::RationalFunction(r.embed(m)),
            (_, Field::RationalFunction(_)) => Scalar::RationalFunction(RatFn::constant(as_cyclo(self))),
            (_, Field::Cyclotomic(_)) => Scalar::Cyclotomic(as_cyclo(self)),
            _ => unreachable!(),
        })
    }

    /// Field automorphism `ζ_m ↦ ζ_m^k`, `s ↦ s^e` (`e = ±1`).
    pub fn field_automorphism(&self, zeta_power: i64, s_power: i64) -> Scalar {
        match self {
            Scalar::Cyclotomic(c) => Scalar::Cyclotomic(c.galois(zeta_power)),
            Scalar::RationalFunction(r) => {
                let m = r.order();
                let g = r.map_coeffs(|c| c.galois(zeta_power), m);
                Scalar::RationalFunction(if s_power < 0 { g.invert_variable() } else { g })
            }
            _ => self.clone(),
        }
    }

    /// Small integer value when the scalar is an integer of the prime subfield.
    pub fn as_small_integer(&self) -> Option<i64> {
        let r = self.as_rational()?;
        if r.is_integer() {
            i64::try_from(r.numer()).ok()
        } else {
            None
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Cyclotomic(c) => write!(f, "{}", c),
            Scalar::RationalFunction(r) => write!(f, "{}", r),
            Scalar::Prime(x) => write!(f, "{}", x),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.field())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{}", e))
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{}", e))
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{}", e))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Cyclotomic(a) => Scalar::Cyclotomic(a.neg()),
            Scalar::RationalFunction(a) => Scalar::RationalFunction(a.neg()),
            Scalar::Prime(a) => Scalar::Prime(a.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Arithmetic selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Neg,
}

/// Uniform entry point for the four field operations; unary operations
/// ignore `b`.
pub fn field_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Inv => a.inv(),
        ArithOp::Neg => Ok(-a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Scalar {
        Scalar::Rational(BigRational::new(a.into(), b.into()))
    }

    #[test]
    fn rational_sum() {
        assert_eq!(field_arith(&q(1, 2), &q(1, 3), ArithOp::Add).unwrap(), q(5, 6));
    }

    #[test]
    fn zeta4_inverse() {
        let f = Field::cyclotomic(4);
        let z = f.zeta(4).unwrap();
        assert_eq!(field_arith(&z, &z, ArithOp::Inv).unwrap(), z.pow(3));
    }

    #[test]
    fn s_inverse_pair() {
        let f = Field::rational_function(1);
        let s = f.s_pow(1).unwrap();
        assert!(field_arith(&s, &s.inv().unwrap(), ArithOp::Mul).unwrap().is_one());
    }

    #[test]
    fn orders() {
        assert_eq!(Field::cyclotomic(6).zeta(6).unwrap().mult_order().unwrap(), Order::Finite(6));
        assert_eq!(Field::rational_function(1).s_pow(1).unwrap().mult_order().unwrap(), Order::Infinite);
        let three = Field::Prime(7).from_i64(3);
        assert_eq!(three.mult_order().unwrap(), Order::Finite(6));
        assert_eq!(q(2, 1).mult_order().unwrap(), Order::Infinite);
        assert_eq!(q(-1, 1).mult_order().unwrap(), Order::Finite(2));
        assert_eq!(q(0, 1).mult_order(), Err(ScalarError::ZeroArgument));
    }

    #[test]
    fn kind_mismatch_reported() {
        let a = Field::cyclotomic(3).one();
        let b = Field::cyclotomic(5).one();
        assert!(matches!(a.checked_add(&b), Err(ScalarError::KindMismatch(_, _))));
        assert_eq!(Field::Rational.zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn field_normalization() {
        assert_eq!(Field::cyclotomic(2), Field::Rational);
        assert_eq!(Field::cyclotomic(6), Field::Cyclotomic(3));
        assert_eq!(Field::cyclotomic(3).join(&Field::cyclotomic(4)).unwrap(), Field::Cyclotomic(12));
        // ζ_6 lives in Q(ζ_3)
        let z6 = Field::Cyclotomic(3).zeta(6).unwrap();
        assert_eq!(z6.mult_order().unwrap(), Order::Finite(6));
    }
}
