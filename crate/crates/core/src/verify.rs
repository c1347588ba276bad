//! Randomized checks of the structural lemmas the algorithms rely on.
//!
//! Each check draws a random instance over a given presentation and returns
//! a description of the first broken identity, if any.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::lattice::{intmat, Presentation};
use crate::linalg;
use crate::matlie::{good_characteristic, sl_generators, GlExtension, Generator, MorphismWord, TorusMatrix};
use crate::modules::{minimal_vector, system_from_morphism, ModVector, SubmoduleSpec};
use crate::qtorus::{Degree, DegreeBasis, Exponent, TorusElement};
use crate::random;
use crate::scalar::cyclotomic::mulmod;
use crate::scalar::{Field, ResidueMap, Scalar};

pub const LEMMAS: [&str; 9] = ["degree", "module-degree", "diagonalizable", "centre-split", "gl-centre", "sl-centroid", "idempotents", "positive-shift", "minimal-indivisible"];

#[derive(Clone, Debug, Serialize)]
pub struct LemmaOutcome {
    pub lemma: &'static str,
    pub cases: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
    pub millis: u128,
}

impl LemmaOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.cases > 0
    }
}

type Check = fn(&Arc<Presentation>, &mut ChaCha8Rng) -> Result<(), String>;

fn check_for(lemma: &str) -> Option<Check> {
    Some(match lemma {
        "degree" => degree_laws,
        "module-degree" => module_degree,
        "diagonalizable" => diagonalizable,
        "centre-split" => centre_split,
        "gl-centre" => gl_centre,
        "sl-centroid" => sl_centroid,
        "idempotents" => idempotents_check,
        "positive-shift" => positive_shift_check,
        "minimal-indivisible" => minimal_indivisible,
        _ => return None,
    })
}

/// Runs `trials` random cases of one lemma.
pub fn verify_lemma(lemma: &str, p: &Arc<Presentation>, seed: u64, trials: usize) -> Option<LemmaOutcome> {
    let k = LEMMAS.iter().position(|l| *l == lemma)?;
    let check = check_for(lemma)?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k as u64));
    let mut out = LemmaOutcome { lemma: LEMMAS[k], cases: 0, violations: 0, first_violation: None, millis: 0 };
    for _ in 0..trials {
        out.cases += 1;
        if let Err(e) = check(p, &mut rng) {
            out.violations += 1;
            out.first_violation.get_or_insert(e);
        }
    }
    out.millis = start.elapsed().as_millis();
    Some(out)
}

/// All lemmas, in parallel.
pub fn verify_lemmas(p: &Arc<Presentation>, seed: u64, trials: usize) -> Vec<LemmaOutcome> {
    LEMMAS.par_iter().map(|l| verify_lemma(l, p, seed, trials).expect("known lemma")).collect()
}

/// A spread of presentations of rank at most 3, finite and infinite order.
pub fn sample_presentations() -> Vec<(String, Arc<Presentation>)> {
    let mut out = Vec::new();
    let mut add = |name: &str, field: Field, n: usize, upper: Vec<Vec<Scalar>>| {
        out.push((name.to_string(), Presentation::from_upper(field, n, &upper).expect("valid presentation").into_arc()));
    };
    let f = Field::rational_function(1);
    add("rank 1 over Q(s)", f, 1, vec![]);
    add("q12 = -1", Field::Rational, 2, vec![vec![Field::Rational.from_i64(-1)]]);
    for m in [3u32, 5, 12] {
        let f = Field::cyclotomic(m);
        add(&format!("q12 = zeta_{}", m), f, 2, vec![vec![f.zeta(m).unwrap()]]);
    }
    add("q12 = s", f, 2, vec![vec![f.s_pow(1).unwrap()]]);
    let f3 = Field::rational_function(3);
    add("q12 = zeta_3 s", f3, 2, vec![vec![&f3.zeta(3).unwrap() * &f3.s_pow(1).unwrap()]]);
    let f4 = Field::cyclotomic(4);
    add("zeta_4 block plus a free variable", f4, 3, vec![vec![f4.zeta(4).unwrap(), f4.one()], vec![f4.one()]]);
    add("rank 3 mixing s and zeta_3", f3, 3, vec![vec![f3.s_pow(1).unwrap(), f3.zeta(3).unwrap()], vec![f3.s_pow(-1).unwrap()]]);
    let f6 = Field::cyclotomic(6);
    add("rank 3 over Q(zeta_6)", f6, 3, vec![vec![f6.zeta(6).unwrap(), f6.zeta(3).unwrap()], vec![f6.from_i64(-1)]]);
    add("rank 3 powers of s", f, 3, vec![vec![f.s_pow(1).unwrap(), f.s_pow(2).unwrap()], vec![f.s_pow(3).unwrap()]]);
    let f7 = Field::Prime(7);
    add("q12 = 2 over F_7", f7, 2, vec![vec![f7.from_i64(2)]]);
    out
}

fn shear_bases(n: usize) -> Vec<DegreeBasis> {
    let id = intmat::identity(n);
    let neg: Vec<Vec<i64>> = id.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    let mut out = vec![DegreeBasis::new(id.clone()).unwrap(), DegreeBasis::new(neg).unwrap()];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut a = id.clone();
                a[j][i] = 1;
                out.push(DegreeBasis::new(a).unwrap());
            }
        }
    }
    out
}

fn random_basis(n: usize, rng: &mut ChaCha8Rng) -> DegreeBasis {
    DegreeBasis::new(random::unimodular(n, rng, 6, 3)).expect("unimodular")
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn degree_laws(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = p.rank();
    let eps = random_basis(n, rng);
    let a = random::element(p, rng, 4, 3);
    let b = if rng.gen_bool(0.1) { TorusElement::zero(p) } else { random::element(p, rng, 4, 3) };
    let (da, db) = (a.degree(&eps), b.degree(&eps));
    ensure((&a + &b).degree(&eps) <= da.max(db), || format!("deg({} + {}) exceeds the maximum", a, b))?;
    let c = random::scalar(&p.field(), rng);
    ensure(a.scale(&c).degree(&eps) == da, || format!("deg({} · {}) changed", c, a))?;
    ensure((&a * &b).degree(&eps) == da + db, || format!("deg({} · {}) is not {}", a, b, da + db))?;
    let q = loop {
        let q = degree_candidate(p, rng);
        if !q.is_zero() {
            break q;
        }
    };
    let all_zero = shear_bases(n).iter().all(|e| q.degree(e) == Degree::Finite(0));
    let in_f = q.support().all(|l| l.iter().all(|&x| x == 0));
    ensure(all_zero == in_f, || format!("degree zero for every sampled basis is {} but {} is {}in F", all_zero, q, if in_f { "" } else { "not " }))
}

/// A scalar, a scalar plus a trace-zero monomial, or a random element.
fn degree_candidate(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> TorusElement {
    let n = p.rank();
    match rng.gen_range(0..3) {
        0 => TorusElement::scalar(p, random::scalar(&p.field(), rng)),
        1 if n > 1 => {
            let mut lam = random::exponent(n, rng, -3, 3);
            let s: i64 = lam.iter().sum();
            lam[0] -= s;
            &TorusElement::monomial(p, lam, random::scalar(&p.field(), rng)) + &TorusElement::scalar(p, random::scalar(&p.field(), rng))
        }
        _ => random::element(p, rng, 3, 2),
    }
}

fn module_degree(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ell = rng.gen_range(2..=3);
    let eps = random_basis(p.rank(), rng);
    let mut coords: Vec<TorusElement> = (0..ell).map(|_| if rng.gen_bool(0.3) { TorusElement::zero(p) } else { random::element(p, rng, 3, 3) }).collect();
    if coords.iter().all(TorusElement::is_zero) {
        coords[0] = random::element(p, rng, 3, 3);
    }
    let v = ModVector::new(p, coords).map_err(|e| e.to_string())?;
    let q = random::element(p, rng, 3, 3);
    let vq = v.right_mul(&q);
    ensure(!vq.is_zero(), || format!("{:?} · {} vanished", v, q))?;
    ensure(vq.degree(&eps) == v.degree(&eps) + q.degree(&eps), || format!("deg({:?} · {}) is not additive", v, q))
}

/// Sparse matrix of `op` on the window, split into the part landing inside
/// the window (columns of `inside`) and the rows outside it, reduced by `h`.
struct WindowOp {
    inside: Vec<Vec<(usize, u64)>>,
    outside: Vec<Vec<(usize, u64)>>,
}

fn window(n: usize, r: i64) -> Vec<Exponent> {
    let mut out: Vec<Exponent> = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (-r..=r).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn reduce_op(op: &dyn Fn(&TorusElement) -> TorusElement, p: &Arc<Presentation>, win: &[Exponent], h: &ResidueMap) -> Option<WindowOp> {
    let index: HashMap<&Exponent, usize> = win.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let mut out_index: HashMap<Exponent, usize> = HashMap::new();
    let mut inside = vec![Vec::new(); win.len()];
    let mut outside: Vec<Vec<(usize, u64)>> = Vec::new();
    for (j, beta) in win.iter().enumerate() {
        let img = op(&TorusElement::x_pow(p, beta));
        for (l, c) in img.terms() {
            let Scalar::Prime(v) = h.apply(c).ok()? else { return None };
            if v.value() == 0 {
                continue;
            }
            match index.get(l) {
                Some(&i) => inside[j].push((i, v.value())),
                None => {
                    let k = *out_index.entry(l.clone()).or_insert_with(|| {
                        outside.push(Vec::new());
                        outside.len() - 1
                    });
                    outside[k].push((j, v.value()));
                }
            }
        }
    }
    Some(WindowOp { inside, outside })
}

/// Reduces `row` against an echelon basis; returns it if independent.
fn reduce_row(basis: &[(usize, Vec<u64>)], mut row: Vec<u64>, pr: u64) -> Option<(usize, Vec<u64>)> {
    for (piv, b) in basis {
        let c = row[*piv];
        if c != 0 {
            let f = pr - c;
            for (x, y) in row.iter_mut().zip(b) {
                if *y != 0 {
                    *x = (*x + mulmod(f, *y, pr)) % pr;
                }
            }
        }
    }
    let piv = row.iter().position(|&x| x != 0)?;
    let inv = crate::scalar::cyclotomic::powmod(row[piv], pr - 2, pr);
    row.iter_mut().for_each(|x| *x = mulmod(*x, inv, pr));
    Some((piv, row))
}

/// The largest subspace of the window invariant under the operator, as a
/// basis mod `p`: the common kernel of `O A^k` for the inside part `A` and
/// the outside part `O`.
fn invariant_subspace(w: &WindowOp, dim: usize, pr: u64) -> Vec<Vec<u64>> {
    let row_times_a = |r: &[u64]| -> Vec<u64> {
        (0..dim).map(|j| w.inside[j].iter().fold(0u64, |acc, &(i, c)| (acc + mulmod(r[i], c, pr)) % pr)).collect()
    };
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut frontier: Vec<Vec<u64>> = w
        .outside
        .iter()
        .map(|entries| {
            let mut r = vec![0u64; dim];
            for &(j, c) in entries {
                r[j] = (r[j] + c) % pr;
            }
            r
        })
        .collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for r in frontier {
            if let Some(b) = reduce_row(&basis, r, pr) {
                next.push(row_times_a(&b.1));
                basis.push(b);
            }
        }
        frontier = next;
        if basis.len() == dim {
            break;
        }
    }
    let rows: Vec<Vec<u64>> = basis.into_iter().map(|(_, r)| r).collect();
    if rows.is_empty() {
        return (0..dim).map(|i| (0..dim).map(|j| u64::from(i == j)).collect()).collect();
    }
    linalg::nullspace_mod(&rows, dim, pr)
}

fn nilpotent_on(w: &WindowOp, k: &[Vec<u64>], pr: u64) -> bool {
    let apply = |v: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; v.len()];
        for (j, &x) in v.iter().enumerate() {
            if x != 0 {
                for &(i, c) in &w.inside[j] {
                    out[i] = (out[i] + mulmod(x, c, pr)) % pr;
                }
            }
        }
        out
    };
    k.iter().all(|v| {
        let mut v = v.clone();
        for _ in 0..k.len() {
            v = apply(&v);
        }
        v.iter().all(|&x| x == 0)
    })
}

/// Runs a window computation over several screening primes; reports a
/// violation only if every prime exhibits one.
fn screened(p: &Arc<Presentation>, op: &dyn Fn(&TorusElement) -> TorusElement, bad: &dyn Fn(&WindowOp, &[Vec<u64>], u64) -> bool) -> bool {
    let r = if p.rank() >= 3 { 2 } else { 4 };
    let win = window(p.rank(), r);
    let mut tried = 0;
    for seed in 0..6u64 {
        let h = linalg::screening_map(&p.field(), 0xd1a6 + seed);
        let Some(w) = reduce_op(op, p, &win, &h) else { continue };
        tried += 1;
        let k = invariant_subspace(&w, win.len(), h.p);
        if !bad(&w, &k, h.p) {
            return false;
        }
        if tried == 3 {
            break;
        }
    }
    tried > 0
}

fn diagonalizable(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = loop {
        let d = random::element(p, rng, 3, 1);
        if d.support().any(|l| l.iter().any(|&x| x != 0)) {
            break d;
        }
    };
    let left = |q: &TorusElement| &d * q;
    if screened(p, &left, &|_, k, _| !k.is_empty()) {
        return Err(format!("left multiplication by {} has an invariant subspace in the window", d));
    }
    if p.is_commutative() {
        return Ok(());
    }
    let d = loop {
        let d = random::element(p, rng, 3, 1);
        if !d.is_central() {
            break d;
        }
    };
    let ad = |q: &TorusElement| &(&d * q) - &(q * &d);
    if screened(p, &ad, &|w, k, pr| !nilpotent_on(w, k, pr)) {
        return Err(format!("ad {} has a nonzero eigenvalue on the window", d));
    }
    Ok(())
}

fn centre_split(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = random::element(p, rng, 4, 3);
    let (z, b) = a.centre_split();
    ensure(&z + &b == a, || format!("split of {} does not recombine", a))?;
    for _ in 0..20 {
        let y = random::element(p, rng, 2, 2);
        ensure((&z * &y) == (&y * &z), || format!("central part {} does not commute with {}", z, y))?;
    }
    let mut sum = TorusElement::zero(p);
    for (l, c) in b.terms() {
        let (s, alpha, j) = TorusElement::commutator_witness(p, l).ok_or_else(|| format!("no commutator presents x^{:?}", l))?;
        let br = TorusElement::x_pow(p, &alpha).commutator(&TorusElement::generator(p, j, 1)).map_err(|e| e.to_string())?;
        sum = &sum + &br.scale(&(c * &s));
    }
    ensure(sum == b, || format!("commutators do not rebuild {}", b))?;
    let u = random::element(p, rng, 3, 2);
    let v = random::element(p, rng, 3, 2);
    let br = u.commutator(&v).map_err(|e| e.to_string())?;
    ensure(br.centre_split().0.is_zero(), || format!("[{}, {}] has a central component", u, v))
}

fn pick_ell(p: &Presentation, rng: &mut ChaCha8Rng) -> usize {
    let ell = if rng.gen_bool(0.75) { 2 } else { 3 };
    if good_characteristic(&p.field(), ell) {
        ell
    } else {
        5 - ell
    }
}

fn commutes_with_sl(x: &TorusMatrix, gens: &[TorusMatrix]) -> Result<bool, String> {
    for g in gens {
        if !x.lie_bracket(g).map_err(|e| e.to_string())?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn gl_centre(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ell = pick_ell(p, rng);
    let x = random::matrix(p, ell, rng, 0.3);
    let (z, big_x) = GlExtension::split(&x);
    ensure(z.is_central() && big_x.in_sl(), || format!("split of {:?} leaves the summands", x))?;
    let back = big_x.checked_add(&TorusMatrix::diagonal(p, vec![z.clone(); ell])).map_err(|e| e.to_string())?;
    ensure(back == x, || format!("split of {:?} does not recombine", x))?;
    let w = random::central(p, rng);
    ensure(!TorusMatrix::diagonal(p, vec![w.clone(); ell]).in_sl(), || format!("{}·E lies in sl", w))?;
    let gens = sl_generators(ell, p);
    let perturb = rng.gen_bool(0.5);
    let mut y = TorusMatrix::diagonal(p, vec![w; ell]);
    if perturb {
        y = y.checked_add(&random::matrix(p, ell, rng, 0.6)).map_err(|e| e.to_string())?;
    }
    let scalar_central = y.is_diagonal() && (1..ell).all(|i| y.entry(i, i) == y.entry(0, 0)) && y.entry(0, 0).is_central();
    let commutes = commutes_with_sl(&y, &gens)?;
    ensure(commutes == scalar_central, || format!("{:?} commutes with sl: {}, lies in Z(Q)E: {}", y, commutes, scalar_central))
}

fn sl_centroid(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ell = pick_ell(p, rng);
    let z = random::central(p, rng);
    let z2 = random::central(p, rng);
    let x = GlExtension::split(&random::matrix(p, ell, rng, 0.4)).1;
    let zeta = |c: &TorusElement, m: &TorusMatrix| m.left_mul_element(c);
    let zx = zeta(&z, &x);
    ensure(zx.in_sl(), || format!("{}·X leaves sl", z))?;
    for g in sl_generators(ell, p) {
        let lhs = g.lie_bracket(&zx).map_err(|e| e.to_string())?;
        let rhs = zeta(&z, &g.lie_bracket(&x).map_err(|e| e.to_string())?);
        ensure(lhs == rhs, || format!("multiplication by {} does not commute with ad {:?}", z, g))?;
    }
    ensure(zeta(&(&z * &z2), &x) == zeta(&z, &zeta(&z2, &x)), || format!("ζ is not multiplicative on {}, {}", z, z2))?;
    let e12 = TorusMatrix::e(p, ell, 0, 1);
    ensure(!zeta(&z, &e12).is_zero(), || format!("ζ_{} kills E_12", z))
}

/// A random associative word of elementary, diagonal, permutation and
/// lattice base change factors.
fn random_word(p: &Arc<Presentation>, ell: usize, rng: &mut ChaCha8Rng, len: usize, entry_range: i64) -> Result<MorphismWord, String> {
    let mut w = MorphismWord::identity(p, ell);
    for _ in 0..len {
        let t = w.target().clone();
        let g = match rng.gen_range(0..10) {
            0..=5 => {
                let i = rng.gen_range(0..ell);
                let j = (i + rng.gen_range(1..ell)) % ell;
                let k = rng.gen_range(1..=2);
                let terms: Vec<_> = (0..k).map(|_| (random::exponent(t.rank(), rng, -entry_range, entry_range), random::small_scalar(&t.field(), rng))).collect();
                let a = TorusElement::from_terms(&t, terms);
                let a = if a.is_zero() { TorusElement::one(&t) } else { a };
                Generator::elementary(&t, ell, i, j, a)
            }
            6 => Generator::diagonal(&t, (0..ell).map(|_| TorusElement::monomial(&t, random::exponent(t.rank(), rng, -1, 1), random::small_scalar(&t.field(), rng))).collect()).map_err(|e| e.to_string())?,
            7 => {
                let mut perm: Vec<usize> = (0..ell).collect();
                perm.shuffle(rng);
                Generator::permutation(&t, &perm)
            }
            _ => Generator::LatticeBaseChange { a: random::unimodular(t.rank(), rng, 3, 2), rescale: vec![] },
        };
        w.push(g).map_err(|e| e.to_string())?;
    }
    Ok(w)
}

fn idempotents_check(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ell = rng.gen_range(2..=3);
    let len = rng.gen_range(1..=3);
    let w = random_word(p, ell, rng, len, 1)?;
    let o = system_from_morphism(&w).map_err(|e| e.to_string())?;
    let es = o.idempotents();
    let t = w.target();
    let mut sum = TorusMatrix::zero(t, ell);
    for (i, a) in es.iter().enumerate() {
        for (j, b) in es.iter().enumerate() {
            let prod = a.checked_mul(b).map_err(|e| e.to_string())?;
            let expect = if i == j { a.clone() } else { TorusMatrix::zero(t, ell) };
            ensure(prod == expect, || format!("e_{} e_{} is wrong for the word of length {}", i + 1, j + 1, len))?;
        }
        sum = sum.checked_add(a).map_err(|e| e.to_string())?;
    }
    ensure(sum == TorusMatrix::identity(t, ell), || "idempotents do not sum to 1".to_string())?;
    let coords = (0..ell).map(|_| random::element(t, rng, 2, 2)).collect();
    let v = ModVector::new(t, coords).map_err(|e| e.to_string())?;
    let parts: Vec<ModVector> = es.iter().map(|e| v.left_apply(e)).collect();
    let total = parts.iter().skip(1).fold(parts[0].clone(), |acc, x| acc.add(x));
    ensure(total == v, || format!("components of {:?} do not add up", v))?;
    for (i, e) in es.iter().enumerate() {
        for (j, part) in parts.iter().enumerate() {
            let got = part.left_apply(e);
            let ok = if i == j { got == *part } else { got.is_zero() };
            ensure(ok, || format!("e_{} does not project component {}", i + 1, j + 1))?;
        }
    }
    Ok(())
}

fn positive_element(p: &Arc<Presentation>, eps: &DegreeBasis, rng: &mut ChaCha8Rng, lo: i64, hi: i64, terms: usize) -> TorusElement {
    loop {
        let k = rng.gen_range(1..=terms);
        let t = (0..k).map(|_| (eps.point(&random::exponent(p.rank(), rng, lo, hi)), random::scalar(&p.field(), rng)));
        let x = TorusElement::from_terms(p, t);
        if !x.is_zero() {
            return x;
        }
    }
}

fn positive_shift_check(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ell = rng.gen_range(2..=3);
    let eps = random_basis(p.rank(), rng);
    let coords = (0..ell).map(|_| if rng.gen_bool(0.25) { TorusElement::zero(p) } else { positive_element(p, &eps, rng, 0, 2, 3) }).collect();
    let mut u0 = ModVector::new(p, coords).map_err(|e| e.to_string())?;
    if u0.is_zero() {
        u0 = ModVector::unit(p, ell, 0);
    }
    let u0 = u0.positive_shift(&eps);
    ensure(matches!(u0.is_indivisible(&eps), Ok(true)), || format!("{:?} is not indivisible", u0))?;
    let q = if rng.gen_bool(0.5) { positive_element(p, &eps, rng, 0, 2, 3) } else { positive_element(p, &eps, rng, -2, 2, 3) };
    let q_pos = q.support().all(|l| eps.is_positive(l));
    let prod_pos = u0.right_mul(&q).is_positive(&eps);
    ensure(q_pos == prod_pos, || format!("u0 = {:?}, q = {}: u0 q positive is {}, q positive is {}", u0, q, prod_pos, q_pos))
}

fn minimal_indivisible(p: &Arc<Presentation>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let eps = DegreeBasis::standard(p.rank());
    let (u0, deg) = loop {
        let len = rng.gen_range(1..=2);
        let w = random_word(p, 2, rng, len, 1)?;
        let o = system_from_morphism(&w).map_err(|e| e.to_string())?;
        let k = rng.gen_range(0..2);
        let u = SubmoduleSpec::new(o.idempotents()[k].clone()).map_err(|e| e.to_string())?;
        if let Ok(u0) = minimal_vector(&u, &eps, o.default_window(&eps)) {
            let d = u0.degree(&eps).finite().unwrap();
            break (u0, d);
        }
    };
    let t = u0.presentation().clone();
    let n = t.rank();
    for lam in window(n, deg.max(0)) {
        if lam.iter().any(|&x| x < 0) || lam.iter().all(|&x| x == 0) || lam.iter().sum::<i64>() > deg {
            continue;
        }
        let inv = TorusElement::x_pow(&t, &lam).inverse().unwrap();
        let v = u0.right_mul(&inv);
        ensure(!v.is_positive(&eps), || format!("{:?} = v · x^{:?} with v in V^+", u0, lam))?;
    }
    for _ in 0..10 {
        let hi = deg.max(1);
        let pick = |rng: &mut ChaCha8Rng| loop {
            let l = random::exponent(n, rng, 0, hi);
            if l.iter().any(|&x| x != 0) && l.iter().sum::<i64>() <= hi {
                return l;
            }
        };
        let (a, b) = (pick(rng), pick(rng));
        let q = TorusElement::from_terms(&t, [(a, random::scalar(&t.field(), rng)), (b, random::scalar(&t.field(), rng))]);
        if q.is_zero() {
            continue;
        }
        let quotients: Option<Vec<TorusElement>> = u0.coords().iter().map(|c| if c.is_zero() { Some(c.clone()) } else { q.right_divide(c) }).collect();
        if let Some(cs) = quotients {
            let v = ModVector::new(&t, cs).map_err(|e| e.to_string())?;
            ensure(!v.is_positive(&eps), || format!("{:?} = {:?} · {}", u0, v, q))?;
        }
    }
    Ok(())
}
