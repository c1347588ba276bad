//! Dense integer matrices: Hermite and Smith normal forms, unimodular
//! inverses, integer kernels.
//!
//! Matrices are `Vec<Vec<i64>>` in row-major order. Elimination runs in
//! `i128` and panics if a result leaves the `i64` range.

pub type IntMat = Vec<Vec<i64>>;

type Wide = Vec<Vec<i128>>;

fn widen(m: &IntMat) -> Wide {
    m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

fn narrow(m: &Wide) -> IntMat {
    m.iter()
        .map(|r| r.iter().map(|&x| i64::try_from(x).expect("integer matrix entry overflow")).collect())
        .collect()
}

fn wide_identity(n: usize) -> Wide {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

pub fn identity(n: usize) -> IntMat {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
}

pub fn cols(m: &IntMat) -> usize {
    m.first().map_or(0, |r| r.len())
}

pub fn mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let k = b.len();
    let c = cols(b);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), k, "dimension mismatch in integer product");
            (0..c)
                .map(|j| {
                    let s: i128 = (0..k).map(|t| row[t] as i128 * b[t][j] as i128).sum();
                    i64::try_from(s).expect("integer matrix entry overflow")
                })
                .collect()
        })
        .collect()
}

pub fn vec_mat(v: &[i64], m: &IntMat) -> Vec<i64> {
    mat_mul(&vec![v.to_vec()], m).remove(0)
}

pub fn transpose(m: &IntMat) -> IntMat {
    let c = cols(m);
    (0..c).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

/// Determinant by fraction-free elimination.
pub fn det(m: &IntMat) -> i64 {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return 1;
    }
    let mut a = widen(m);
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    i64::try_from(sign * a[n - 1][n - 1]).expect("determinant overflow")
}

pub fn is_unimodular(m: &IntMat) -> bool {
    !m.is_empty() && m.iter().all(|r| r.len() == m.len()) && det(m).abs() == 1
}

/// Row-style Hermite normal form: returns `(H, U)` with `U·M = H`, `U`
/// unimodular, `H` in echelon form with positive pivots and entries above
/// each pivot reduced into `[0, pivot)`. Zero rows come last.
pub fn hermite_normal_form(m: &IntMat) -> (IntMat, IntMat) {
    let rows = m.len();
    let c = cols(m);
    let mut h = widen(m);
    let mut u = wide_identity(rows);
    let mut r = 0;
    for j in 0..c {
        if r == rows {
            break;
        }
        loop {
            let piv = (r..rows).filter(|&i| h[i][j] != 0).min_by_key(|&i| h[i][j].abs());
            let Some(p) = piv else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if h[i][j] != 0 {
                    let q = h[i][j].div_euclid(h[r][j]);
                    for t in 0..c {
                        h[i][t] -= q * h[r][t];
                    }
                    for t in 0..rows {
                        u[i][t] -= q * u[r][t];
                    }
                    if h[i][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < rows && h[r][j] != 0 {
            if h[r][j] < 0 {
                for t in 0..c {
                    h[r][t] = -h[r][t];
                }
                for t in 0..rows {
                    u[r][t] = -u[r][t];
                }
            }
            for i in 0..r {
                let q = h[i][j].div_euclid(h[r][j]);
                if q != 0 {
                    for t in 0..c {
                        h[i][t] -= q * h[r][t];
                    }
                    for t in 0..rows {
                        u[i][t] -= q * u[r][t];
                    }
                }
            }
            r += 1;
        }
    }
    (narrow(&h), narrow(&u))
}

/// Basis of the row lattice, in Hermite form; zero rows dropped.
pub fn row_lattice_basis(m: &IntMat) -> IntMat {
    let (h, _) = hermite_normal_form(m);
    h.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect()
}

/// Saturated basis of `{v ∈ Z^rows : v·M = 0}`.
pub fn left_kernel(m: &IntMat) -> IntMat {
    let (h, u) = hermite_normal_form(m);
    let basis: IntMat = h
        .iter()
        .zip(u)
        .filter(|(r, _)| r.iter().all(|&x| x == 0))
        .map(|(_, ur)| ur)
        .collect();
    row_lattice_basis(&basis)
}

/// Inverse of a unimodular matrix, `None` if `|det| ≠ 1`.
pub fn inverse_unimodular(m: &IntMat) -> Option<IntMat> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return None;
    }
    let (h, u) = hermite_normal_form(m);
    (h == identity(n)).then_some(u)
}

/// Smith normal form: `(U, D, V)` with `U·M·V = D`, `U`, `V` unimodular and
/// the diagonal of `D` a nonnegative divisibility chain.
pub fn smith_normal_form(m: &IntMat) -> (IntMat, IntMat, IntMat) {
    let rows = m.len();
    let c = cols(m);
    let mut d = widen(m);
    let mut u = wide_identity(rows);
    let mut v = wide_identity(c);

    fn row_op(a: &mut Wide, dst: usize, src: usize, q: i128) {
        let (s, t) = if dst < src {
            let (x, y) = a.split_at_mut(src);
            (&mut x[dst], &y[0])
        } else {
            let (x, y) = a.split_at_mut(dst);
            (&mut y[0], &x[src])
        };
        for (a, b) in s.iter_mut().zip(t.iter()) {
            *a -= q * b;
        }
    }
    fn col_op(a: &mut Wide, dst: usize, src: usize, q: i128) {
        for r in a.iter_mut() {
            r[dst] -= q * r[src];
        }
    }
    fn col_swap(a: &mut Wide, i: usize, j: usize) {
        for r in a.iter_mut() {
            r.swap(i, j);
        }
    }

    let kmax = rows.min(c);
    for k in 0..kmax {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..c {
                    if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            d.swap(k, pi);
            u.swap(k, pi);
            col_swap(&mut d, k, pj);
            col_swap(&mut v, k, pj);
            let p = d[k][k];
            let mut clean = true;
            for i in k + 1..rows {
                let q = d[i][k].div_euclid(p);
                if q != 0 {
                    row_op(&mut d, i, k, q);
                    row_op(&mut u, i, k, q);
                }
                clean &= d[i][k] == 0;
            }
            for j in k + 1..c {
                let q = d[k][j].div_euclid(p);
                if q != 0 {
                    col_op(&mut d, j, k, q);
                    col_op(&mut v, j, k, q);
                }
                clean &= d[k][j] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility: fold any entry not divisible by the pivot into row k.
            let bad = (k + 1..rows).find(|&i| (k + 1..c).any(|j| d[i][j] % p != 0));
            match bad {
                Some(i) => {
                    row_op(&mut d, k, i, -1);
                    row_op(&mut u, k, i, -1);
                }
                None => break,
            }
        }
        if k < rows && k < c && d[k][k] < 0 {
            for t in 0..c {
                d[k][t] = -d[k][t];
            }
            for t in 0..rows {
                u[k][t] = -u[k][t];
            }
        }
    }
    (narrow(&u), narrow(&d), narrow(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_two_three() {
        let (u, d, v) = smith_normal_form(&vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(d, vec![vec![1, 0], vec![0, 6]]);
        assert_eq!(mat_mul(&mat_mul(&u, &vec![vec![2, 0], vec![0, 3]]), &v), d);
    }

    #[test]
    fn snf_identity_and_zero() {
        let (u, d, v) = smith_normal_form(&identity(3));
        assert_eq!((u, d, v), (identity(3), identity(3), identity(3)));
        let (_, d, _) = smith_normal_form(&vec![vec![0]]);
        assert_eq!(d, vec![vec![0]]);
    }

    #[test]
    fn hnf_and_inverse() {
        let a = vec![vec![2, 3], vec![1, 2]];
        let inv = inverse_unimodular(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse_unimodular(&vec![vec![2, 0], vec![0, 1]]).is_none());
        assert_eq!(det(&vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), -3);
    }

    #[test]
    fn kernel_of_rank_one() {
        let k = left_kernel(&vec![vec![1, 2], vec![2, 4], vec![0, 0]]);
        assert_eq!(k.len(), 2);
        for r in &k {
            assert_eq!(vec_mat(r, &vec![vec![1, 2], vec![2, 4], vec![0, 0]]), vec![0, 0]);
        }
    }
}
