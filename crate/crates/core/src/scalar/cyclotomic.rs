//! Exact arithmetic in `Q(ζ_m)`, elements stored as residues modulo the
//! m-th cyclotomic polynomial with rational coefficients.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Per-order lookup data, built once and shared.
pub(crate) struct CycloTables {
    /// Monic `Φ_m`, lowest degree first.
    phi: Vec<BigRational>,
    /// Order of the canonical generator `ω` of the roots of unity in `Q(ζ_m)`.
    root_modulus: u64,
    /// `ω^k` for `k < root_modulus`.
    omega_powers: Vec<Cyclo>,
    omega_index: HashMap<Vec<BigRational>, u64>,
}

fn table_cache() -> &'static Mutex<HashMap<u32, Arc<CycloTables>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycloTables>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer coefficients of `Φ_m`, lowest degree first.
pub fn cyclotomic_polynomial(m: u32) -> Vec<BigInt> {
    assert!(m >= 1);
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); m as usize + 1];
    num[0] = -BigInt::one();
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            let div = cyclotomic_polynomial(d);
            num = int_exact_div(&num, &div);
        }
    }
    num
}

fn int_exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    // b is monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() <= db {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].clone();
        if !c.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                r[k + i] -= &c * bi;
            }
        }
        q[k] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

pub(crate) fn tables(m: u32) -> Arc<CycloTables> {
    if let Some(t) = table_cache().lock().unwrap().get(&m) {
        return t.clone();
    }
    let phi: Vec<BigRational> = cyclotomic_polynomial(m)
        .into_iter()
        .map(BigRational::from_integer)
        .collect();
    let root_modulus = if m.is_multiple_of(2) { m as u64 } else { 2 * m as u64 };
    let mut t = CycloTables {
        phi,
        root_modulus,
        omega_powers: Vec::new(),
        omega_index: HashMap::new(),
    };
    // ω = ζ_m for even m, ω = -ζ_m^{(m+1)/2} (a primitive 2m-th root) for odd m.
    let omega = if m.is_multiple_of(2) {
        Cyclo::reduce_with(m, &t.phi, monomial(1))
    } else {
        Cyclo::reduce_with(m, &t.phi, monomial(m.div_ceil(2) as usize)).neg()
    };
    let mut acc = Cyclo::reduce_with(m, &t.phi, monomial(0));
    for k in 0..root_modulus {
        t.omega_index.insert(acc.c.clone(), k);
        t.omega_powers.push(acc.clone());
        acc = acc.mul_with(&omega, &t.phi);
    }
    let t = Arc::new(t);
    table_cache().lock().unwrap().insert(m, t.clone());
    t
}

fn monomial(k: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); k + 1];
    v[k] = BigRational::one();
    v
}

fn trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// An element of `Q(ζ_m)`. Coefficients are canonical: degree below
/// `deg Φ_m`, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo {
    m: u32,
    c: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero(m: u32) -> Self {
        Cyclo { m, c: Vec::new() }
    }

    pub fn one(m: u32) -> Self {
        Self::from_rational(m, BigRational::one())
    }

    pub fn from_rational(m: u32, r: BigRational) -> Self {
        let mut c = vec![r];
        trim(&mut c);
        Cyclo { m, c }
    }

    /// `ω^k` where `ω` generates the torsion of `Q(ζ_m)^×`.
    pub fn omega_pow(m: u32, k: i64) -> Self {
        let t = tables(m);
        let k = k.rem_euclid(t.root_modulus as i64) as usize;
        t.omega_powers[k].clone()
    }

    pub fn root_modulus(m: u32) -> u64 {
        tables(m).root_modulus
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.c.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.c[0].clone()),
            _ => None,
        }
    }

    fn reduce_with(m: u32, phi: &[BigRational], mut v: Vec<BigRational>) -> Self {
        let d = phi.len() - 1;
        if v.len() > d {
            for k in (d..v.len()).rev() {
                let lead = v[k].clone();
                if lead.is_zero() {
                    continue;
                }
                for (i, pi) in phi.iter().enumerate() {
                    let t = &lead * pi;
                    v[k - d + i] -= t;
                }
            }
            v.truncate(d);
        }
        trim(&mut v);
        Cyclo { m, c: v }
    }

    fn mul_with(&self, other: &Cyclo, phi: &[BigRational]) -> Cyclo {
        if self.is_zero() || other.is_zero() {
            return Cyclo::zero(self.m);
        }
        if self.c.len() == 1 {
            return other.scale(&self.c[0]);
        }
        if other.c.len() == 1 {
            return self.scale(&other.c[0]);
        }
        let mut v = vec![BigRational::zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Cyclo::reduce_with(self.m, phi, v)
    }

    pub fn scale(&self, r: &BigRational) -> Cyclo {
        if r.is_zero() {
            return Cyclo::zero(self.m);
        }
        Cyclo {
            m: self.m,
            c: self.c.iter().map(|x| x * r).collect(),
        }
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        debug_assert_eq!(self.m, other.m);
        let n = self.c.len().max(other.c.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i);
            let b = other.c.get(i);
            v.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        trim(&mut v);
        Cyclo { m: self.m, c: v }
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo {
            m: self.m,
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        debug_assert_eq!(self.m, other.m);
        if self.c.len() <= 1 || other.c.len() <= 1 {
            // avoid the table lookup for rational factors
            return match (self.c.len(), other.c.len()) {
                (0, _) | (_, 0) => Cyclo::zero(self.m),
                (1, _) => other.scale(&self.c[0]),
                _ => self.scale(&other.c[0]),
            };
        }
        let t = tables(self.m);
        self.mul_with(other, &t.phi)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return None;
        }
        if self.c.len() == 1 {
            return Some(Cyclo::from_rational(self.m, self.c[0].recip()));
        }
        let t = tables(self.m);
        // extended Euclid: s*a + u*phi = g, g constant
        let (g, s) = qpoly_ext_gcd(&self.c, &t.phi);
        debug_assert_eq!(g.len(), 1);
        let ginv = g[0].recip();
        let s: Vec<BigRational> = s.into_iter().map(|x| x * &ginv).collect();
        Some(Cyclo::reduce_with(self.m, &t.phi, s))
    }

    /// Exponent `k` with `self = ω^k`, when `self` is a root of unity.
    pub fn omega_log(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        tables(self.m).omega_index.get(&self.c).copied()
    }

    /// Image under `ζ_m ↦ ζ_m^k` (k coprime to m).
    pub fn galois(&self, k: i64) -> Cyclo {
        let m = self.m as i64;
        let t = tables(self.m);
        let mut v: Vec<BigRational> = vec![BigRational::zero(); self.m as usize];
        for (i, c) in self.c.iter().enumerate() {
            let e = ((i as i64) * k).rem_euclid(m.max(1)) as usize;
            v[e] += c;
        }
        Cyclo::reduce_with(self.m, &t.phi, v)
    }

    /// Embedding `Q(ζ_m) → Q(ζ_{m'})`, `ζ_m ↦ ζ_{m'}^{m'/m}`; requires `m | m'`.
    pub fn embed(&self, target: u32) -> Cyclo {
        assert!(target.is_multiple_of(self.m), "Q(zeta_{}) does not embed in Q(zeta_{})", self.m, target);
        if target == self.m {
            return self.clone();
        }
        let step = (target / self.m) as usize;
        let t = tables(target);
        let mut v = vec![BigRational::zero(); step * self.c.len().max(1)];
        for (i, c) in self.c.iter().enumerate() {
            v[i * step] = c.clone();
        }
        Cyclo::reduce_with(target, &t.phi, v)
    }

    /// Evaluate with `ζ_m ↦ z` in `Z/p`. `None` if a denominator vanishes mod p.
    pub fn eval_mod(&self, p: u64, z: u64) -> Option<u64> {
        let mut acc = 0u64;
        let mut zp = 1u64;
        for c in &self.c {
            let r = rational_mod(c, p)?;
            acc = (acc + mulmod(r, zp, p)) % p;
            zp = mulmod(zp, z, p);
        }
        Some(acc)
    }
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let pm = BigInt::from(p);
    let r = x.mod_floor(&pm);
    r.try_into().unwrap()
}

/// `r mod p`, or `None` when the denominator is divisible by `p`.
pub(crate) fn rational_mod(r: &BigRational, p: u64) -> Option<u64> {
    let d = bigint_mod(r.denom(), p);
    if d == 0 {
        return None;
    }
    let n = bigint_mod(r.numer(), p);
    Some(mulmod(n, powmod(d, p - 2, p), p))
}

fn qpoly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = b[db].recip();
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] * &lead_inv;
        if !c.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                let t = &c * bi;
                r[k + i] -= t;
            }
        }
        q[k] = c;
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

fn qpoly_sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    // a - q*b
    let n = a.len().max(if q.is_empty() || b.is_empty() { 0 } else { q.len() + b.len() - 1 });
    let mut v = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        v[i] += x;
    }
    for (i, x) in q.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] -= x * y;
        }
    }
    trim(&mut v);
    v
}

/// Returns `(g, s)` with `s*a ≡ g (mod b)`, `g = gcd(a, b)`.
fn qpoly_ext_gcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut s0 = vec![BigRational::one()];
    let mut s1: Vec<BigRational> = Vec::new();
    while !r1.is_empty() {
        let (q, r) = qpoly_divrem(&r0, &r1);
        let s2 = qpoly_sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "zeta({})^{}", self.m, k)?;
            } else {
                write!(f, "{}*zeta({})^{}", fmt_rational(&a), self.m, k)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo[{}]({})", self.m, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), bi(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(3), bi(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), bi(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), bi(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), bi(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn inverse_of_zeta4_is_cube() {
        let z = Cyclo::omega_pow(4, 1);
        assert_eq!(z.inv().unwrap(), Cyclo::omega_pow(4, 3));
    }

    #[test]
    fn odd_order_generator_has_order_2m() {
        assert_eq!(Cyclo::root_modulus(3), 6);
        let w = Cyclo::omega_pow(3, 1);
        assert_eq!(w.omega_log(), Some(1));
        assert_eq!(Cyclo::omega_pow(3, 3), Cyclo::one(3).neg());
    }

    #[test]
    fn general_inverse() {
        let a = Cyclo::one(5).add(&Cyclo::omega_pow(5, 2).scale(&BigRational::from_integer(3.into())));
        let ai = a.inv().unwrap();
        assert!(a.mul(&ai).is_one());
    }

    #[test]
    fn embed_preserves_products() {
        let a = Cyclo::omega_pow(3, 1).add(&Cyclo::one(3));
        let b = Cyclo::omega_pow(3, 5);
        let lhs = a.mul(&b).embed(12);
        let rhs = a.embed(12).mul(&b.embed(12));
        assert_eq!(lhs, rhs);
    }
}
