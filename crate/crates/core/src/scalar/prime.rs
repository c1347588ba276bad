//! Prime fields `F_p` with `p < 2^63`, plus the small number theory the
//! rest of the crate needs (primality, factoring, primitive roots).

use std::fmt;

use super::cyclotomic::{mulmod, powmod};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
    v: u64,
}

impl Fp {
    pub fn new(p: u64, v: i128) -> Self {
        Fp { p, v: v.rem_euclid(p as i128) as u64 }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    pub fn add(self, o: Fp) -> Fp {
        Fp { p: self.p, v: ((self.v as u128 + o.v as u128) % self.p as u128) as u64 }
    }

    pub fn neg(self) -> Fp {
        Fp { p: self.p, v: (self.p - self.v) % self.p }
    }

    pub fn mul(self, o: Fp) -> Fp {
        Fp { p: self.p, v: mulmod(self.v, o.v, self.p) }
    }

    pub fn inv(self) -> Option<Fp> {
        if self.v == 0 {
            None
        } else {
            Some(Fp { p: self.p, v: powmod(self.v, self.p - 2, self.p) })
        }
    }

    pub fn pow(self, e: u64) -> Fp {
        Fp { p: self.p, v: powmod(self.v, e, self.p) }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(self) -> u64 {
        assert!(self.v != 0);
        multiplicative_order(self.v, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.v, self.p)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, `(prime, exponent)` ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn multiplicative_order(a: u64, p: u64) -> u64 {
    let mut ord = p - 1;
    for (q, _) in factorize(p - 1) {
        while ord.is_multiple_of(q) && powmod(a, ord / q, p) == 1 {
            ord /= q;
        }
    }
    ord
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let fs = factorize(p - 1);
    (2..p)
        .find(|&g| fs.iter().all(|&(q, _)| powmod(g, (p - 1) / q, p) != 1))
        .expect("primitive root exists")
}

/// Discrete logarithm of `a` to base `g` (a generator) by baby-step giant-step.
pub fn discrete_log(a: u64, g: u64, p: u64) -> Option<u64> {
    let n = p - 1;
    let m = (n as f64).sqrt().ceil() as u64 + 1;
    let mut table = std::collections::HashMap::with_capacity(m as usize);
    let mut e = 1u64;
    for j in 0..m {
        table.entry(e).or_insert(j);
        e = mulmod(e, g, p);
    }
    let factor = powmod(powmod(g, m, p), p - 2, p);
    let mut gamma = a % p;
    for i in 0..m {
        if let Some(&j) = table.get(&gamma) {
            return Some((i * m + j) % n);
        }
        gamma = mulmod(gamma, factor, p);
    }
    None
}
