//! Rational functions in one transcendental `s` over `Q(ζ_m)`.
//!
//! A nonzero value is stored as `s^shift · num(s) / den(s)` with
//! `num(0) ≠ 0`, `den(0) ≠ 0`, `den` monic and `gcd(num, den) = 1`, which
//! makes the representation canonical. Laurent polynomials have `den = 1`
//! and never touch the gcd path.

use std::fmt;

use num_traits::One;

use super::cyclotomic::Cyclo;

type Poly = Vec<Cyclo>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    m: u32,
    shift: i64,
    num: Poly,
    den: Poly,
}

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_add(a: &[Cyclo], b: &[Cyclo], m: u32) -> Poly {
    let n = a.len().max(b.len());
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        v.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => Cyclo::zero(m),
        });
    }
    trim(&mut v);
    v
}

fn poly_mul(a: &[Cyclo], b: &[Cyclo], m: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![Cyclo::zero(m); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            v[i + j] = v[i + j].add(&x.mul(y));
        }
    }
    trim(&mut v);
    v
}

fn poly_scale(a: &[Cyclo], c: &Cyclo) -> Poly {
    let mut v: Poly = a.iter().map(|x| x.mul(c)).collect();
    trim(&mut v);
    v
}

fn poly_shift_up(a: &[Cyclo], k: usize, m: u32) -> Poly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut v = vec![Cyclo::zero(m); k];
    v.extend_from_slice(a);
    v
}

fn poly_divrem(a: &[Cyclo], b: &[Cyclo], m: u32) -> (Poly, Poly) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lead_inv = b[db].inv().expect("nonzero leading coefficient");
    let mut q = vec![Cyclo::zero(m); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].mul(&lead_inv);
        if !c.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                r[k + i] = r[k + i].sub(&c.mul(bi));
            }
        }
        q[k] = c;
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

fn make_monic(a: &[Cyclo]) -> (Poly, Cyclo) {
    let lc = a.last().expect("nonzero polynomial").clone();
    let inv = lc.inv().unwrap();
    (poly_scale(a, &inv), lc)
}

fn poly_gcd(a: &[Cyclo], b: &[Cyclo], m: u32) -> Poly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y, m);
        x = std::mem::replace(&mut y, r);
    }
    make_monic(&x).0
}

fn low_zeros(a: &[Cyclo]) -> usize {
    a.iter().take_while(|c| c.is_zero()).count()
}

impl RatFn {
    pub fn zero(m: u32) -> Self {
        RatFn { m, shift: 0, num: Vec::new(), den: vec![Cyclo::one(m)] }
    }

    pub fn one(m: u32) -> Self {
        Self::constant(Cyclo::one(m))
    }

    pub fn constant(c: Cyclo) -> Self {
        let m = c.order();
        if c.is_zero() {
            return Self::zero(m);
        }
        RatFn { m, shift: 0, num: vec![c], den: vec![Cyclo::one(m)] }
    }

    /// `c · s^k`.
    pub fn monomial(c: Cyclo, k: i64) -> Self {
        let mut r = Self::constant(c);
        if !r.is_zero() {
            r.shift = k;
        }
        r
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// The value as a constant in `Q(ζ_m)`, if it does not depend on `s`.
    pub fn as_constant(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return Some(Cyclo::zero(self.m));
        }
        if self.shift == 0 && self.num.len() == 1 && self.den.len() == 1 {
            Some(self.num[0].clone())
        } else {
            None
        }
    }

    /// `(c, k)` when the value is `c · s^k`.
    pub fn as_monomial(&self) -> Option<(Cyclo, i64)> {
        if !self.is_zero() && self.num.len() == 1 && self.den.len() == 1 {
            Some((self.num[0].clone(), self.shift))
        } else {
            None
        }
    }

    fn normalize(m: u32, mut shift: i64, mut num: Poly, mut den: Poly) -> Self {
        trim(&mut num);
        trim(&mut den);
        if num.is_empty() {
            return Self::zero(m);
        }
        let z = low_zeros(&num);
        if z > 0 {
            num.drain(..z);
            shift += z as i64;
        }
        let z = low_zeros(&den);
        if z > 0 {
            den.drain(..z);
            shift -= z as i64;
        }
        if den.len() > 1 && num.len() > 1 {
            let g = poly_gcd(&num, &den, m);
            if g.len() > 1 {
                num = poly_divrem(&num, &g, m).0;
                den = poly_divrem(&den, &g, m).0;
            }
        }
        let (den, lc) = make_monic(&den);
        let lc_inv = lc.inv().unwrap();
        let num = poly_scale(&num, &lc_inv);
        RatFn { m, shift, num, den }
    }

    fn den_is_one(&self) -> bool {
        self.den.len() == 1
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let m = self.m;
        let k = self.shift.min(other.shift);
        let a = poly_shift_up(&self.num, (self.shift - k) as usize, m);
        let b = poly_shift_up(&other.num, (other.shift - k) as usize, m);
        if self.den_is_one() && other.den_is_one() {
            return Self::normalize(m, k, poly_add(&a, &b, m), vec![Cyclo::one(m)]);
        }
        let num = poly_add(&poly_mul(&a, &other.den, m), &poly_mul(&b, &self.den, m), m);
        let den = poly_mul(&self.den, &other.den, m);
        Self::normalize(m, k, num, den)
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            m: self.m,
            shift: self.shift,
            num: self.num.iter().map(|c| c.neg()).collect(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.m);
        }
        let m = self.m;
        let shift = self.shift + other.shift;
        if self.den_is_one() && other.den_is_one() {
            return RatFn { m, shift, num: poly_mul(&self.num, &other.num, m), den: self.den.clone() };
        }
        Self::normalize(m, shift, poly_mul(&self.num, &other.num, m), poly_mul(&self.den, &other.den, m))
    }

    pub fn inv(&self) -> Option<RatFn> {
        if self.is_zero() {
            return None;
        }
        Some(Self::normalize(self.m, -self.shift, self.den.clone(), self.num.clone()))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Cyclo) -> Cyclo, target_m: u32) -> RatFn {
        let num = self.num.iter().map(&f).collect();
        let den = self.den.iter().map(&f).collect();
        Self::normalize(target_m, self.shift, num, den)
    }

    /// Substitute `s ↦ s^{-1}`.
    pub fn invert_variable(&self) -> RatFn {
        if self.is_zero() {
            return self.clone();
        }
        // s^k N(1/s)/D(1/s) = s^{-k} s^{dD-dN} rev(N)/rev(D)
        let dn = self.num.len() as i64 - 1;
        let dd = self.den.len() as i64 - 1;
        let mut num = self.num.clone();
        num.reverse();
        let mut den = self.den.clone();
        den.reverse();
        Self::normalize(self.m, -self.shift + dd - dn, num, den)
    }

    pub fn embed(&self, target: u32) -> RatFn {
        self.map_coeffs(|c| c.embed(target), target)
    }

    /// Evaluate at `s = s0`, `ζ_m ↦ z` in `Z/p`. `None` when outside the local ring.
    pub fn eval_mod(&self, p: u64, z: u64, s0: u64) -> Option<u64> {
        use super::cyclotomic::{mulmod, powmod};
        if self.is_zero() {
            return Some(0);
        }
        let ev = |poly: &Poly| -> Option<u64> {
            let mut acc = 0u64;
            for c in poly.iter().rev() {
                acc = (mulmod(acc, s0, p) + c.eval_mod(p, z)?) % p;
            }
            Some(acc)
        };
        // Clear coefficient denominators jointly so that a numerator and
        // denominator sharing a factor of p are handled.
        let scaled = self.integral_parts();
        let (num, den) = match &scaled {
            Some((n, d)) => (ev(n), ev(d)),
            None => (ev(&self.num), ev(&self.den)),
        };
        let (num, den) = (num?, den?);
        if den == 0 || s0.is_multiple_of(p) && self.shift < 0 {
            return None;
        }
        let sp = if self.shift >= 0 {
            powmod(s0, self.shift as u64, p)
        } else {
            powmod(powmod(s0, (-self.shift) as u64, p), p - 2, p)
        };
        Some(mulmod(mulmod(num, powmod(den, p - 2, p), p), sp, p))
    }

    fn integral_parts(&self) -> Option<(Poly, Poly)> {
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_rational::BigRational;
        let mut l = BigInt::one();
        for c in self.num.iter().chain(self.den.iter()) {
            for r in c.coeffs() {
                l = l.lcm(r.denom());
            }
        }
        if l.is_one() {
            return None;
        }
        let f = BigRational::from_integer(l);
        let num = self.num.iter().map(|c| c.scale(&f)).collect();
        let den = self.den.iter().map(|c| c.scale(&f)).collect();
        Some((num, den))
    }

    /// True when the value depends on `s`.
    pub fn depends_on_s(&self) -> bool {
        !self.is_zero() && (self.shift != 0 || self.num.len() > 1 || self.den.len() > 1)
    }
}

fn fmt_poly(f: &mut fmt::Formatter<'_>, p: &Poly, shift: i64) -> fmt::Result {
    let mut first = true;
    for (k, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        let e = k as i64 + shift;
        if e == 0 {
            write!(f, "({})", c)?;
        } else if c.is_one() {
            write!(f, "s^{}", e)?;
        } else {
            write!(f, "({})*s^{}", c, e)?;
        }
    }
    Ok(())
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.den_is_one() {
            if self.num.len() == 1 {
                return fmt_poly(f, &self.num, self.shift);
            }
            write!(f, "(")?;
            fmt_poly(f, &self.num, self.shift)?;
            return write!(f, ")");
        }
        write!(f, "(")?;
        fmt_poly(f, &self.num, self.shift)?;
        write!(f, ")/(")?;
        fmt_poly(f, &self.den, 0)?;
        write!(f, ")")
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFn[{}]({})", self.m, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn s() -> RatFn {
        RatFn::monomial(Cyclo::one(1), 1)
    }
    fn c(x: i64) -> RatFn {
        RatFn::constant(Cyclo::from_rational(1, BigRational::from_integer(x.into())))
    }

    #[test]
    fn s_times_inverse_is_one() {
        let si = s().inv().unwrap();
        assert_eq!(s().mul(&si), RatFn::one(1));
    }

    #[test]
    fn cancellation_is_canonical() {
        // (s^2 - 1)/(s - 1) = s + 1
        let s2m1 = s().mul(&s()).add(&c(-1));
        let sm1 = s().add(&c(-1));
        let q = s2m1.mul(&sm1.inv().unwrap());
        assert_eq!(q, s().add(&c(1)));
    }

    #[test]
    fn invert_variable_twice() {
        let a = s().add(&c(3)).mul(&s().add(&c(-2)).inv().unwrap());
        assert_eq!(a.invert_variable().invert_variable(), a);
    }
}
