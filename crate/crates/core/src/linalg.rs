//! Linear algebra over the coefficient field, with a modular fast path.
//!
//! Kernels of large sparse systems are first computed modulo a big prime.
//! The nullity mod `p` bounds the exact nullity from above, so a trivial
//! modular kernel settles the question. Otherwise the exact system is
//! solved on the columns met by the modular kernel, and accepted when it
//! reaches the same dimension; only a mismatch triggers the full exact solve.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::cyclotomic::{mulmod, powmod};
use crate::scalar::{prime, Field, ResidueMap, Scalar};

/// Sparse row: `(column, coefficient)` pairs.
pub type SparseRow = Vec<(usize, Scalar)>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<Scalar>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv().unwrap();
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : M x = 0}`, one vector per free column with that entry 1.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize, field: Field) -> Vec<Vec<Scalar>> {
    let mut m = rows.to_vec();
    if m.is_empty() {
        m.push(vec![field.zero(); ncols]);
    }
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![field.zero(); ncols];
            v[f] = field.one();
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = -&row[f];
            }
            v
        })
        .collect()
}

pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Some `x` with `M x = b`, if one exists.
pub fn solve(rows: &[Vec<Scalar>], b: &[Scalar], field: Field) -> Option<Vec<Scalar>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Scalar>> = rows.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![field.zero(); ncols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

pub fn rref_mod(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pi) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, pi);
        let inv = powmod(rows[r][c], p - 2, p);
        for x in rows[r].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        let pivot_row = rows[r].clone();
        let nz: Vec<usize> = (0..ncols).filter(|&j| pivot_row[j] != 0).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = p - row[c];
                for &j in &nz {
                    row[j] = (row[j] + mulmod(f, pivot_row[j], p)) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn nullspace_mod(rows: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m = rows.to_vec();
    let pivots = rref_mod(&mut m, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = (p - row[f]) % p;
            }
            v
        })
        .collect()
}

/// A reduction map to a prime near `2^61` for screening computations over
/// `field`. Prime fields map to themselves.
pub fn screening_map(field: &Field, seed: u64) -> ResidueMap {
    if let Field::Prime(p) = field {
        return ResidueMap::standard(field, *p, None).unwrap();
    }
    static CACHE: OnceLock<Mutex<HashMap<(Field, u64), ResidueMap>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(h) = cache.lock().unwrap().get(&(*field, seed)) {
        return *h;
    }
    let m = field.cyclotomic_order() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = (1u64 << 61) / m - rng.gen_range(0..1_000_000u64);
    let p = (0..start).map(|k| (start - k) * m + 1).find(|&p| prime::is_prime(p)).expect("prime exists");
    let s = field.has_transcendental().then(|| rng.gen_range(2..p - 1));
    let h = ResidueMap::standard(field, p, s).unwrap();
    cache.lock().unwrap().insert((*field, seed), h);
    h
}

fn reduce_rows(eqs: &[SparseRow], ncols: usize, h: &ResidueMap) -> Option<Vec<Vec<u64>>> {
    eqs.iter()
        .map(|r| {
            let mut row = vec![0u64; ncols];
            for (c, x) in r {
                let Scalar::Prime(v) = h.apply(x).ok()? else { unreachable!() };
                row[*c] = (row[*c] + v.value()) % h.p;
            }
            Some(row)
        })
        .collect()
}

fn dense_exact(eqs: &[SparseRow], cols: &[usize], field: Field) -> Vec<Vec<Scalar>> {
    let index: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    eqs.iter()
        .filter(|r| r.iter().any(|(c, _)| index.contains_key(c)))
        .map(|r| {
            let mut row = vec![field.zero(); cols.len()];
            for (c, x) in r {
                if let Some(&i) = index.get(c) {
                    row[i] = &row[i] + x;
                }
            }
            row
        })
        .collect()
}

/// Nullity of the system reduced modulo a screening prime: an upper bound
/// for the exact nullity. `None` if no screening map was defined on the
/// coefficients.
pub fn modular_nullity(eqs: &[SparseRow], ncols: usize, field: Field) -> Option<usize> {
    (0..4u64).find_map(|k| {
        let h = screening_map(&field, 0x5eed + k);
        let mut rows = reduce_rows(eqs, ncols, &h)?;
        Some(ncols - rref_mod(&mut rows, h.p).len())
    })
}

/// Exact kernel basis of a sparse system, in reduced form.
pub fn sparse_kernel(eqs: &[SparseRow], ncols: usize, field: Field) -> Vec<Vec<Scalar>> {
    if ncols == 0 {
        return Vec::new();
    }
    let all: Vec<usize> = (0..ncols).collect();
    if let Field::Prime(_) = field {
        return nullspace(&dense_exact(eqs, &all, field), ncols, field);
    }
    let reduced = (0..4u64).find_map(|k| {
        let h = screening_map(&field, 0x5eed + k);
        reduce_rows(eqs, ncols, &h).map(|r| (r, h.p))
    });
    if let Some((rows, p)) = reduced {
        let ker = nullspace_mod(&rows, ncols, p);
        if ker.is_empty() {
            return Vec::new();
        }
        let support: Vec<usize> =
            ker.iter().flat_map(|v| v.iter().enumerate().filter(|(_, x)| **x != 0).map(|(i, _)| i)).collect::<BTreeSet<_>>().into_iter().collect();
        let sub = nullspace(&dense_exact(eqs, &support, field), support.len(), field);
        if sub.len() == ker.len() {
            return sub
                .into_iter()
                .map(|v| {
                    let mut full = vec![field.zero(); ncols];
                    for (x, &c) in v.into_iter().zip(&support) {
                        full[c] = x;
                    }
                    full
                })
                .collect();
        }
    }
    nullspace(&dense_exact(eqs, &all, field), ncols, field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_over_rational_functions() {
        let f = Field::rational_function(1);
        let s = f.s_pow(1).unwrap();
        // x0 - s x1 = 0, x2 = 0
        let eqs = vec![vec![(0, f.one()), (1, -&s)], vec![(2, f.one())]];
        let k = sparse_kernel(&eqs, 3, f);
        assert_eq!(k, vec![vec![s.clone(), f.one(), f.zero()]]);
        assert!(sparse_kernel(&[vec![(0, f.one())]], 1, f).is_empty());
    }

    #[test]
    fn solve_and_rank() {
        let f = Field::Rational;
        let m = vec![vec![f.from_i64(1), f.from_i64(2)], vec![f.from_i64(2), f.from_i64(4)]];
        assert_eq!(rank(&m), 1);
        assert!(solve(&m, &[f.from_i64(1), f.from_i64(3)], f).is_none());
        let x = solve(&m, &[f.from_i64(1), f.from_i64(2)], f).unwrap();
        assert_eq!(&x[0] + &(&x[1] * &f.from_i64(2)), f.from_i64(1));
    }

    #[test]
    fn modular_nullspace() {
        let k = nullspace_mod(&[vec![1, 2, 3]], 3, 7);
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!((v[0] + 2 * v[1] + 3 * v[2]) % 7, 0);
        }
    }
}
