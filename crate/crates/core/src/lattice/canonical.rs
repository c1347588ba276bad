//! Canonical presentations of fgc quantum tori.
//!
//! The commutation data of an fgc presentation is an alternating form on
//! `Z^n` with values in `Z/M` (`q_ij = ω^{B_ij}`). A Euclidean reduction by
//! unimodular congruences brings it to orthogonal 2×2 blocks. Primary
//! components are then moved between blocks so the block orders follow a
//! fixed normal form:
//!
//! * primary form (one prime power per block) when the number of prime-power
//!   components fits into `⌊n/2⌋` blocks,
//! * invariant-factor form otherwise.
//!
//! Blocks are finally sorted by decreasing order.

use num_integer::Integer;
use serde::Serialize;

use super::intmat::{self, IntMat};
use super::{is_fgc, LatticeError, Presentation};
use crate::scalar::prime::factorize;
use crate::scalar::Order;

struct Form {
    n: usize,
    m: i128,
    c: Vec<Vec<i128>>,
    b: Vec<Vec<i128>>,
}

fn sym(x: i128, m: i128) -> i128 {
    let r = x.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}

fn div_round(a: i128, p: i128) -> i128 {
    let (a, p) = if p < 0 { (-a, -p) } else { (a, p) };
    (2 * a + p).div_euclid(2 * p)
}

impl Form {
    /// Replace the basis by `T·basis`.
    fn transform(&mut self, t: &[Vec<i128>]) {
        let n = self.n;
        let mul = |x: &[Vec<i128>], y: &[Vec<i128>]| -> Vec<Vec<i128>> {
            (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
        };
        self.c = mul(t, &self.c);
        let tb = mul(t, &self.b);
        let tt: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| t[j][i]).collect()).collect();
        self.b = mul(&tb, &tt).into_iter().map(|r| r.into_iter().map(|x| sym(x, self.m)).collect()).collect();
    }

    fn id(&self) -> Vec<Vec<i128>> {
        (0..self.n).map(|i| (0..self.n).map(|j| (i == j) as i128).collect()).collect()
    }

    /// `e_t += x e_s`.
    fn add(&mut self, t: usize, s: usize, x: i128) {
        if x != 0 {
            let mut m = self.id();
            m[t][s] = x;
            self.transform(&m);
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        if i != j {
            let mut m = self.id();
            m.swap(i, j);
            self.transform(&m);
        }
    }

    /// Bring the alternating form to orthogonal 2×2 blocks.
    fn reduce(&mut self) {
        let n = self.n;
        let mut k = 0;
        while 2 * k + 1 < n {
            let (r, c) = (2 * k, 2 * k + 1);
            let mut best: Option<(usize, usize)> = None;
            for i in r..n {
                for j in i + 1..n {
                    if self.b[i][j] != 0 && best.is_none_or(|(bi, bj)| self.b[i][j].abs() < self.b[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((i, j)) = best else { return };
            self.swap(r, i);
            let j = if j == r { i } else { j };
            self.swap(c, j);
            let p = self.b[r][c];
            for t in c + 1..n {
                let y = -div_round(self.b[r][t], p);
                self.add(t, c, y);
                let x = div_round(self.b[c][t], p);
                self.add(t, r, x);
            }
            if (c + 1..n).all(|t| self.b[r][t] == 0 && self.b[c][t] == 0) {
                k += 1;
            }
        }
    }

    fn block_value(&self, k: usize) -> i128 {
        self.b[2 * k][2 * k + 1].rem_euclid(self.m)
    }

    /// Exchange the `p^e`-primary parts (`p^e ‖ M`) of blocks `u` and `v`.
    fn swap_primary(&mut self, u: usize, v: usize, pe: i128) {
        let m = self.m;
        let r = m / pe;
        let crt = |x: i128, y: i128| -> i128 {
            // z ≡ x mod pe, z ≡ y mod r
            let (g, s, _) = ext_gcd(pe, r);
            debug_assert_eq!(g, 1);
            (x + (y - x) * s % r * pe).rem_euclid(m)
        };
        let p = lift_sl2([crt(0, 1), crt(1, 0), crt(-1, 0), crt(0, 1)], m);
        let mut t = self.id();
        for (a, b) in [(2 * u, 2 * v), (2 * u + 1, 2 * v + 1)] {
            t[a][a] = p[0][0];
            t[a][b] = p[0][1];
            t[b][a] = p[1][0];
            t[b][b] = p[1][1];
        }
        self.transform(&t);
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Lift `[[a, b], [c, d]] ∈ SL_2(Z/M)` to `SL_2(Z)`.
fn lift_sl2(e: [i128; 4], m: i128) -> [[i128; 2]; 2] {
    let [a, b, c, d] = e.map(|x| x.rem_euclid(m));
    let b1 = if b == 0 { m } else { b };
    let a1 = (0..).map(|t| a + t * m).find(|&x| x.gcd(&b1) == 1).unwrap();
    let (_, x, y) = ext_gcd(a1, b1);
    let k = (x * (c + y) + y * (d - x)).rem_euclid(m);
    let out = [[a1, b1], [-y + k * a1, x + k * b1]];
    debug_assert_eq!(out[0][0] * out[1][1] - out[0][1] * out[1][0], 1);
    debug_assert!((out[1][0] - c).rem_euclid(m) == 0 && (out[1][1] - d).rem_euclid(m) == 0);
    out
}

/// `q_ij = 1` outside the pairs `{2k-1, 2k}`, nontrivial pairs first.
pub fn is_canonical_shape(p: &Presentation) -> bool {
    let n = p.rank();
    for i in 0..n {
        for j in i + 1..n {
            let paired = i % 2 == 0 && j == i + 1;
            if !paired && !p.entry(i, j).is_one() {
                return false;
            }
        }
    }
    let trivial: Vec<bool> = (0..n / 2).map(|k| p.entry(2 * k, 2 * k + 1).is_one()).collect();
    trivial.windows(2).all(|w| !w[0] || w[1])
}

fn prime_parts(m: i128) -> Vec<(i128, u32, i128)> {
    factorize(m as u64).into_iter().map(|(p, e)| (p as i128, e, (p as i128).pow(e))).collect()
}

/// Exponent `f` with `p^f` the `p`-part of the order of `ω^d`.
fn order_exponent(d: i128, p: i128, e: u32) -> u32 {
    let mut g = d.gcd(&p.pow(e));
    let mut v = 0;
    while g % p == 0 && g > 1 {
        g /= p;
        v += 1;
    }
    e - v
}

/// Returns `(A, Pc)` with `Pc = change_basis(P, A)` in canonical shape.
pub fn canonical_presentation(p: &Presentation) -> Result<(IntMat, Presentation), LatticeError> {
    if !is_fgc(p) {
        return Err(LatticeError::NotFgc);
    }
    let n = p.rank();
    let exps = p
        .exponent_data()
        .ok_or_else(|| LatticeError::CanonicalizationFailed("entries are not roots of unity of the field".into()))?;
    let m = p.field().root_modulus() as i128;
    let mut f = Form {
        n,
        m,
        c: (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect(),
        b: (0..n).map(|i| (0..n).map(|j| sym(exps[i][j].0 as i128, m)).collect()).collect(),
    };
    f.reduce();

    let nb = n / 2;
    let parts = prime_parts(m);
    let exps_of = |f: &Form, pi: usize| -> Vec<u32> {
        let (pr, e, _) = parts[pi];
        (0..nb).map(|k| order_exponent(f.block_value(k), pr, e)).collect()
    };
    let mut comps: Vec<(i128, usize, u32)> = Vec::new();
    for pi in 0..parts.len() {
        for fx in exps_of(&f, pi).into_iter().filter(|&x| x > 0) {
            comps.push((parts[pi].0.pow(fx), pi, fx));
        }
    }
    let mut target = vec![vec![0u32; nb]; parts.len()];
    if comps.len() <= nb {
        comps.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (k, &(_, pi, fx)) in comps.iter().enumerate() {
            target[pi][k] = fx;
        }
    } else {
        for (pi, t) in target.iter_mut().enumerate() {
            let mut v = exps_of(&f, pi);
            v.sort_unstable_by(|a, b| b.cmp(a));
            *t = v;
        }
    }
    for pi in 0..parts.len() {
        for k in 0..nb {
            let cur = exps_of(&f, pi);
            if cur[k] == target[pi][k] {
                continue;
            }
            let j = (k + 1..nb)
                .filter(|&j| cur[j] == target[pi][k])
                .min_by_key(|&j| (cur[j] == target[pi][j]) as u8)
                .ok_or_else(|| LatticeError::CanonicalizationFailed("primary components do not match".into()))?;
            f.swap_primary(k, j, parts[pi].2);
        }
    }

    // Sort blocks: decreasing order, then increasing exponent.
    let key = |f: &Form, k: usize| {
        let d = f.block_value(k);
        (-(m / d.gcd(&m)), d)
    };
    let mut perm: Vec<usize> = (0..nb).collect();
    perm.sort_by_key(|&k| key(&f, k));
    let mut t = vec![vec![0i128; n]; n];
    for (dst, &src) in perm.iter().enumerate() {
        t[2 * dst][2 * src] = 1;
        t[2 * dst + 1][2 * src + 1] = 1;
    }
    if n % 2 == 1 {
        t[n - 1][n - 1] = 1;
    }
    f.transform(&t);

    let a: IntMat = f
        .c
        .iter()
        .map(|r| r.iter().map(|&x| i64::try_from(x).map_err(|_| LatticeError::CanonicalizationFailed("overflow".into()))).collect())
        .collect::<Result<_, _>>()?;
    let pc = p.change_basis(&a)?;
    if !is_canonical_shape(&pc) {
        return Err(LatticeError::CanonicalizationFailed("result does not have canonical shape".into()));
    }
    for k in 0..nb {
        if *pc.entry(2 * k, 2 * k + 1) != p.field().omega_pow(f.block_value(k) as i64) {
            return Err(LatticeError::CanonicalizationFailed("block value mismatch".into()));
        }
    }
    Ok((a, pc))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolDecomposition {
    /// Number of nontrivial blocks.
    pub s: usize,
    pub orders: Vec<u64>,
    /// `t_j` as lattice points, one per variable.
    pub central_generators: IntMat,
    /// Axes (1-based) `1, 3, …, 2s-1` generating the étale subalgebra.
    pub etale_generators: Vec<usize>,
}

impl SymbolDecomposition {
    /// `(ℓ_k, t_{2k-1})` for the blocks, then `(1, t_j)` for the free
    /// variables: the roots of these generate a commutative subalgebra.
    pub fn targets(&self) -> Vec<(u64, Vec<i64>)> {
        let blocks = self.orders.iter().enumerate().map(|(k, &o)| (o, self.central_generators[2 * k].clone()));
        let free = (2 * self.s..self.central_generators.len()).map(|j| (1, self.central_generators[j].clone()));
        blocks.chain(free).collect()
    }
}

pub fn symbol_decomposition(pc: &Presentation) -> Result<SymbolDecomposition, LatticeError> {
    if !is_canonical_shape(pc) {
        return Err(LatticeError::NotCanonical("off-block entries or block order".into()));
    }
    let n = pc.rank();
    let mut orders = Vec::new();
    for k in 0..n / 2 {
        let q = pc.entry(2 * k, 2 * k + 1);
        if q.is_one() {
            break;
        }
        match q.mult_order()? {
            Order::Finite(o) => orders.push(o),
            Order::Infinite => return Err(LatticeError::NotFgc),
        }
    }
    let s = orders.len();
    let mut t = intmat::identity(n);
    for (k, &o) in orders.iter().enumerate() {
        t[2 * k][2 * k] = o as i64;
        t[2 * k + 1][2 * k + 1] = o as i64;
    }
    Ok(SymbolDecomposition { s, orders, central_generators: t, etale_generators: (0..s).map(|k| 2 * k + 1).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    #[test]
    fn rank_two_is_canonical() {
        let f = Field::cyclotomic(7);
        let p = Presentation::from_blocks(f, 2, &[f.zeta(7).unwrap()]).unwrap();
        let (a, pc) = canonical_presentation(&p).unwrap();
        assert_eq!(a, intmat::identity(2));
        assert_eq!(pc, p);
    }

    #[test]
    fn commutative_is_canonical() {
        let p = Presentation::commutative(Field::Rational, 3);
        let (a, _) = canonical_presentation(&p).unwrap();
        assert_eq!(a, intmat::identity(3));
        assert_eq!(symbol_decomposition(&p).unwrap().s, 0);
    }

    #[test]
    fn scrambled_three_two() {
        let f = Field::cyclotomic(6);
        let p0 = Presentation::from_blocks(f, 4, &[f.zeta(3).unwrap(), f.zeta(2).unwrap()]).unwrap();
        let a0 = vec![vec![1, 2, 0, -1], vec![0, 1, 3, 1], vec![2, 5, 1, -2], vec![0, 0, 1, 1]];
        assert!(intmat::is_unimodular(&a0));
        let p = p0.change_basis(&a0).unwrap();
        let (a, pc) = canonical_presentation(&p).unwrap();
        assert_eq!(p.change_basis(&a).unwrap(), pc);
        let sd = symbol_decomposition(&pc).unwrap();
        assert_eq!(sd.orders, vec![3, 2]);
    }

    #[test]
    fn invariant_factor_form() {
        // components 2,2,3 in two blocks: invariant factors 6 and 2
        let f = Field::cyclotomic(3);
        let p0 = Presentation::from_blocks(f, 4, &[f.zeta(6).unwrap(), f.zeta(2).unwrap()]).unwrap();
        let (_, pc) = canonical_presentation(&p0).unwrap();
        assert_eq!(symbol_decomposition(&pc).unwrap().orders, vec![6, 2]);
        let p1 = Presentation::from_blocks(f, 4, &[f.zeta(2).unwrap(), f.zeta(6).unwrap()]).unwrap();
        let (_, pc1) = canonical_presentation(&p1).unwrap();
        assert_eq!(symbol_decomposition(&pc1).unwrap().orders, vec![6, 2]);
    }

    #[test]
    fn symbol_decomposition_examples() {
        let f = Field::cyclotomic(3);
        let p = Presentation::from_blocks(f, 4, &[f.zeta(6).unwrap(), f.zeta(2).unwrap()]).unwrap();
        let sd = symbol_decomposition(&p).unwrap();
        assert_eq!((sd.s, sd.orders.clone(), sd.etale_generators.clone()), (2, vec![6, 2], vec![1, 3]));
        let f5 = Field::cyclotomic(5);
        let p2 = Presentation::from_blocks(f5, 2, &[f5.zeta(5).unwrap()]).unwrap();
        assert_eq!(symbol_decomposition(&p2).unwrap().central_generators, vec![vec![5, 0], vec![0, 5]]);
        let off = Presentation::from_upper(f, 3, &[vec![f.one(), f.zeta(3).unwrap()], vec![f.one()]]).unwrap();
        assert!(matches!(symbol_decomposition(&off), Err(LatticeError::NotCanonical(_))));
    }

    #[test]
    fn sl2_lift() {
        for m in [6i128, 12, 30, 8] {
            let l = lift_sl2([0, 1, -1, 0], m);
            assert_eq!(l[0][0] * l[1][1] - l[0][1] * l[1][0], 1);
        }
    }
}
