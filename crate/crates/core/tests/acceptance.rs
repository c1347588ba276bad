//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtorus::conjugacy::{main_conjugacy, solve_commuting_roots};
use qtorus::lattice::{canonical_presentation, central_lattice, is_canonical_shape, is_fgc, symbol_decomposition, Presentation};
use qtorus::matlie::{mad_extension_test, standard_mad, Generator, MadOutcome, MorphismWord, TorusMatrix};
use qtorus::qtorus::{DegreeBasis, TorusElement};
use qtorus::random;
use qtorus::scalar::{Field, Order, Scalar};
use qtorus::specialize::{certify, propose_prime, Designated};
use qtorus::verify::{sample_presentations, verify_lemmas, LEMMAS};

/// `x^λ · x^μ = c · x^{λ+μ}` by writing both sides as words in the powers
/// `x_i^k` and sorting by adjacent transpositions. Swapping `x_a^u x_b^v`
/// with `a > b` contributes `q_ab^{uv}`.
fn letter_product(p: &Presentation, lam: &[i64], mu: &[i64]) -> (Scalar, Vec<i64>) {
    let n = p.rank();
    let mut word: Vec<(usize, i64)> = Vec::new();
    for e in [lam, mu] {
        word.extend(e.iter().enumerate().filter(|(_, &k)| k != 0).map(|(i, &k)| (i, k)));
    }
    let mut swaps = vec![vec![0i64; n]; n];
    loop {
        let mut swapped = false;
        for k in 0..word.len().saturating_sub(1) {
            let ((a, u), (b, v)) = (word[k], word[k + 1]);
            if a > b {
                swaps[a][b] += u * v;
                word.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    let mut coef = p.field().one();
    for a in 0..n {
        for b in 0..a {
            if swaps[a][b] != 0 {
                coef = &coef * &p.entry(a, b).pow(swaps[a][b]);
            }
        }
    }
    let mut exp = vec![0; n];
    for (i, k) in word {
        exp[i] += k;
    }
    (coef, exp)
}

fn oracle_commutes(p: &Presentation, lam: &[i64], mu: &[i64]) -> bool {
    letter_product(p, lam, mu).0 == letter_product(p, mu, lam).0
}

fn oracle_central(p: &Presentation, lam: &[i64]) -> bool {
    (0..p.rank()).all(|j| {
        let mut e = vec![0; p.rank()];
        e[j] = 1;
        oracle_commutes(p, lam, &e)
    })
}

fn oracle_central_element(x: &TorusElement) -> bool {
    x.support().all(|l| oracle_central(x.presentation(), l))
}

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, n: usize, name: &str, ok: bool, detail: String) {
        let line = format!("criterion {} {}: {} ({})", n, name, if ok { "PASS" } else { "FAIL" }, detail);
        println!("{}", line);
        self.lines.push((ok, line));
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn lemma_suite(r: &mut Report) {
    let start = Instant::now();
    let pres = sample_presentations();
    let trials = 1000usize.div_ceil(pres.len());
    let mut cases = vec![0usize; LEMMAS.len()];
    let mut violations = vec![0usize; LEMMAS.len()];
    let mut first = None;
    let fgc = pres.iter().filter(|(_, p)| is_fgc(p)).count();
    for (name, p) in &pres {
        for (k, o) in verify_lemmas(p, 2024, trials).into_iter().enumerate() {
            cases[k] += o.cases;
            violations[k] += o.violations;
            if let Some(v) = o.first_violation {
                first.get_or_insert(format!("{} on {}: {}", o.lemma, name, v));
            }
        }
    }
    let t = start.elapsed();
    let ok = cases.iter().all(|&c| c >= 1000)
        && violations.iter().all(|&v| v == 0)
        && pres.len() >= 10
        && pres.iter().all(|(_, p)| p.rank() <= 3)
        && fgc > 0
        && fgc < pres.len()
        && t < Duration::from_secs(60);
    let detail = format!(
        "{} presentations ({} fgc), min {} cases per lemma, {} violations, {} < 60 s{}",
        pres.len(),
        fgc,
        cases.iter().min().unwrap(),
        violations.iter().sum::<usize>(),
        secs(t),
        first.map(|f| format!("; first: {}", f)).unwrap_or_default()
    );
    r.record(1, "lemma suite", ok, detail);
}

fn centre(r: &mut Report) {
    let start = Instant::now();
    let mut ok = true;
    for l in [2u32, 3, 5, 6, 12] {
        let f = Field::cyclotomic(l);
        let p = Presentation::from_blocks(f, 2, &[f.zeta(l).unwrap()]).unwrap();
        let c = central_lattice(&p).unwrap();
        let li = l as i64;
        ok &= c.basis == vec![vec![li, 0], vec![0, li]] && c.index == Order::Finite((l * l) as u64);
        for a in -li..=li {
            for b in -li..=li {
                ok &= oracle_central(&p, &[a, b]) == (a % li == 0 && b % li == 0);
                ok &= c.contains(&[a, b]) == oracle_central(&p, &[a, b]);
            }
        }
    }
    let t = start.elapsed();
    ok &= t < Duration::from_secs(1);
    r.record(2, "central lattice", ok, format!("l in {{2,3,5,6,12}}, {} < 1 s", secs(t)));
}

/// Canonical seeds with random block orders up to 12.
fn canonical_seeds(rng: &mut ChaCha8Rng) -> Vec<Presentation> {
    (0..50)
        .map(|_| {
            let n = rng.gen_range(2..=4);
            let s = rng.gen_range(1..=n / 2);
            let orders: Vec<u32> = (0..s).map(|_| rng.gen_range(2..=12)).collect();
            let m = orders.iter().fold(1u32, |a, b| a.lcm(b));
            let f = Field::cyclotomic(m);
            let blocks: Vec<Scalar> = orders
                .iter()
                .map(|&o| {
                    let a = loop {
                        let a = rng.gen_range(1..o);
                        if a.gcd(&o) == 1 {
                            break a;
                        }
                    };
                    f.zeta(o).unwrap().pow(a as i64)
                })
                .collect();
            let p0 = Presentation::from_blocks(f, n, &blocks).unwrap();
            canonical_presentation(&p0).unwrap().1
        })
        .collect()
}

fn block_orders(p: &Presentation) -> Vec<u64> {
    let mut o = symbol_decomposition(p).unwrap().orders;
    o.sort_unstable();
    o
}

fn canonicalization(r: &mut Report, seeds: &[Presentation], rng: &mut ChaCha8Rng) -> Vec<Presentation> {
    let start = Instant::now();
    let mut outputs = Vec::new();
    let mut passed = 0;
    let mut first = None;
    for (k, seed) in seeds.iter().enumerate() {
        let n = seed.rank();
        let scramble = random::unimodular(n, rng, 12, 5);
        let p = seed.change_basis(&scramble).unwrap();
        let res = canonical_presentation(&p);
        let good = match &res {
            Ok((a, pc)) => {
                let entries_ok = (0..n).all(|i| {
                    (0..n).all(|j| {
                        let (x, _) = letter_product(&p, &a[i], &a[j]);
                        let (y, _) = letter_product(&p, &a[j], &a[i]);
                        *pc.entry(i, j) == x.checked_div(&y).unwrap()
                    })
                });
                outputs.push(pc.clone());
                is_canonical_shape(pc) && entries_ok && block_orders(pc) == block_orders(seed)
            }
            Err(_) => false,
        };
        if good {
            passed += 1;
        } else {
            first.get_or_insert(k);
        }
    }
    let t = start.elapsed();
    let ok = passed == seeds.len() && t < Duration::from_secs(120);
    r.record(
        3,
        "canonicalization round trip",
        ok,
        format!("{}/{} seeds, {} < 120 s{}", passed, seeds.len(), secs(t), first.map(|k| format!("; first failure at seed {}", k)).unwrap_or_default()),
    );
    outputs
}

/// Checks the witness of a rejection against the first failing step,
/// recomputed with the letter oracle.
fn witness_is_correct(d: &TorusMatrix, out: &MadOutcome) -> bool {
    let l = d.size();
    let diag: Vec<&TorusElement> = (0..l).map(|i| d.entry(i, i)).collect();
    let first_noncentral = diag.iter().position(|x| !oracle_central_element(x));
    match out {
        MadOutcome::InStandardMad { .. } => false,
        MadOutcome::NotADExtension { step: 1, entries, witness } => {
            let i = entries[0];
            Some(i) == first_noncentral
                && !witness.is_zero()
                && witness.support().all(|lam| !oracle_central(d.presentation(), lam))
                && oracle_central_element(&(diag[i] - witness))
        }
        MadOutcome::NotADExtension { step: 2, entries, witness } => {
            first_noncentral.is_none()
                && entries.len() == 2
                && *witness == diag[entries[0]] - diag[entries[1]]
                && witness.support().any(|lam| lam.iter().any(|&x| x != 0))
        }
        _ => false,
    }
}

fn mad_maximality(r: &mut Report, rng: &mut ChaCha8Rng) {
    let start = Instant::now();
    let mut ok = true;
    let mut rejected = 0;
    let mut accepted = 0;
    let mut steps = BTreeSet::new();
    let fz = Field::cyclotomic(3);
    let fs = Field::rational_function(1);
    let configs = [
        Presentation::from_blocks(fz, 2, &[fz.zeta(3).unwrap()]).unwrap().into_arc(),
        Presentation::from_blocks(fs, 2, &[fs.s_pow(1).unwrap()]).unwrap().into_arc(),
    ];
    for p in &configs {
        for ell in [2usize, 3] {
            let h = standard_mad(ell, p).unwrap();
            let mut count = 0;
            while count < 200 {
                let mut diag: Vec<TorusElement> = (0..ell - 1)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            random::central(p, rng)
                        } else {
                            random::element(p, rng, 3, 3)
                        }
                    })
                    .collect();
                let sum = diag.iter().fold(TorusElement::zero(p), |a, b| &a + b);
                let mut last = -&sum;
                if rng.gen_bool(0.3) {
                    let u = random::element(p, rng, 2, 2);
                    let v = random::element(p, rng, 2, 2);
                    last = &last + &u.commutator(&v).unwrap();
                }
                diag.push(last);
                let d = TorusMatrix::diagonal(p, diag);
                if !d.in_sl() || d.entries().iter().enumerate().all(|(i, row)| row[i].as_scalar().is_some()) {
                    continue;
                }
                count += 1;
                let out = mad_extension_test(&d).unwrap();
                if let MadOutcome::NotADExtension { step, .. } = &out {
                    steps.insert(*step);
                }
                if witness_is_correct(&d, &out) {
                    rejected += 1;
                } else {
                    ok = false;
                }
            }
            for k in 0..50 {
                let coords: Vec<Scalar> = (0..ell - 1).map(|_| if k == 0 { p.field().zero() } else { random::scalar(&p.field(), rng) }).collect();
                let x = h.element(&coords);
                match mad_extension_test(&x).unwrap() {
                    MadOutcome::InStandardMad { coords: c } if h.element(&c) == x => accepted += 1,
                    _ => ok = false,
                }
            }
            for b in h.basis() {
                ok &= mad_extension_test(&b).unwrap().is_in_mad();
            }
        }
    }
    let t = start.elapsed();
    ok &= rejected == 800 && t < Duration::from_secs(30);
    r.record(
        4,
        "standard MAD maximality",
        ok,
        format!("{} rejections with correct witnesses (steps {:?}), {} elements of h_F accepted, {} < 30 s", rejected, steps, accepted, secs(t)),
    );
}

fn specialization(r: &mut Report) {
    let start = Instant::now();
    let f = Field::rational_function(1);
    let p = Presentation::from_blocks(f, 2, &[f.s_pow(1).unwrap()]).unwrap().into_arc();
    let d = vec![Designated::Element(TorusElement::x_pow(&p, &[1, 1])), Designated::Scalar(f.parse("s-1").unwrap())];
    let mut ok = false;
    let mut detail = String::new();
    if let Ok(h) = propose_prime(&[&p], &[2], &d, 5, 100) {
        let c = certify(&[&p], &[2], &d, &h);
        let index = c.condition("index_coprime").and_then(|x| x.witness.clone());
        ok = (h.p, h.s_image) == (7, Some(3)) && c.is_valid() && index.as_deref() == Some("index 36") && 36 % h.p != 0;
        let s = h.s_image.map_or("none".to_string(), |x| x.to_string());
        let count = c.conditions.iter().filter(|x| x.outcome).count();
        detail = format!("p = {}, s -> {}, {} conditions true, {}", h.p, s, count, index.unwrap_or_default());
    }
    let t = start.elapsed();
    ok &= t < Duration::from_secs(1);
    r.record(5, "specialization", ok, format!("{}, {} < 1 s", detail, secs(t)));
}

fn random_conjugacy_word(p: &Arc<Presentation>, ell: usize, rng: &mut ChaCha8Rng) -> (MorphismWord, Vec<Vec<i64>>) {
    let mut w = MorphismWord::identity(p, ell);
    if rng.gen_bool(0.5) {
        w.push(Generator::IotaOp).unwrap();
        w.push(Generator::IotaOp).unwrap();
    }
    for _ in 0..rng.gen_range(1..=4) {
        let t = w.target().clone();
        let i = rng.gen_range(0..ell);
        let j = (i + rng.gen_range(1..ell)) % ell;
        let lam = loop {
            let l = random::exponent(2, rng, 0, 2);
            if l.iter().sum::<i64>() <= 2 {
                break l;
            }
        };
        let a = TorusElement::monomial(&t, lam, random::scalar(&t.field(), rng));
        w.push(Generator::elementary(&t, ell, i, j, a)).unwrap();
    }
    let a = random::unimodular(2, rng, 4, 2);
    w.push(Generator::LatticeBaseChange { a: a.clone(), rescale: vec![] }).unwrap();
    (w, a)
}

fn conjugacy(r: &mut Report, rng: &mut ChaCha8Rng) {
    let fz = Field::cyclotomic(3);
    let fs = Field::rational_function(1);
    let configs = [
        Presentation::from_blocks(fz, 2, &[fz.zeta(3).unwrap()]).unwrap().into_arc(),
        Presentation::from_blocks(fs, 2, &[fs.s_pow(1).unwrap()]).unwrap().into_arc(),
    ];
    let mut success = 0;
    let mut total = 0;
    let mut slowest = Duration::ZERO;
    let mut first = None;
    for p in &configs {
        for ell in [2usize, 3] {
            for _ in 0..20 {
                total += 1;
                let (w, a) = random_conjugacy_word(p, ell, rng);
                let eps = DegreeBasis::new(a).unwrap();
                let start = Instant::now();
                let res = main_conjugacy(&w, &eps, Some(12));
                let t = start.elapsed();
                slowest = slowest.max(t);
                let good = match &res {
                    Ok((c, report)) => {
                        let src = standard_mad(ell, w.source()).unwrap().basis();
                        let tgt = standard_mad(ell, w.target()).unwrap().basis();
                        let id = TorusMatrix::identity(w.target(), ell);
                        report.mad_check
                            && report.t_max <= 12
                            && c.g.checked_mul(&c.g_inv).unwrap() == id
                            && c.g_inv.checked_mul(&c.g).unwrap() == id
                            && src.iter().zip(&tgt).all(|(b, b2)| w.apply(b).unwrap() == c.g.checked_mul(b2).unwrap().checked_mul(&c.g_inv).unwrap())
                    }
                    Err(_) => false,
                };
                if good && t < Duration::from_secs(60) {
                    success += 1;
                } else {
                    first.get_or_insert(format!("{:?}", res.err()));
                }
            }
        }
    }
    r.record(
        6,
        "main conjugacy",
        success == total,
        format!("{}/{} trials, slowest {} < 60 s, t_max = 12{}", success, total, secs(slowest), first.map(|f| format!("; first failure: {}", f)).unwrap_or_default()),
    );
}

fn roots(r: &mut Report, canonical: &[Presentation]) {
    let mut ok = true;
    let mut count = 0;
    for pc in canonical.iter().filter(|p| is_fgc(p)) {
        count += 1;
        let targets = symbol_decomposition(pc).unwrap().targets();
        match solve_commuting_roots(&pc.clone().into_arc(), &targets) {
            Ok(w) => {
                for (i, (y, (l, lam))) in w.roots.iter().zip(&targets).enumerate() {
                    let mut power = TorusElement::one(&w.presentation);
                    for _ in 0..*l {
                        power = &power * y;
                    }
                    ok &= power == TorusElement::x_pow(&w.presentation, lam);
                    for z in &w.roots[i + 1..] {
                        ok &= &(y * z) - &(z * y) == TorusElement::zero(&w.presentation);
                    }
                }
            }
            Err(_) => ok = false,
        }
    }
    r.record(7, "root solver", ok && count > 0, format!("{} fgc presentations, powers and commutators re-verified", count));
}

fn oracle(r: &mut Report, rng: &mut ChaCha8Rng) {
    let start = Instant::now();
    let q = Field::Rational;
    let z5 = Field::cyclotomic(5);
    let s1 = Field::rational_function(1);
    let s3 = Field::rational_function(3);
    let fp = Field::Prime(101);
    let kinds: Vec<Arc<Presentation>> = vec![
        Presentation::from_upper(q, 3, &[vec![q.parse("3/2").unwrap(), q.from_i64(-1)], vec![q.parse("-2/5").unwrap()]]).unwrap().into_arc(),
        Presentation::from_upper(z5, 2, &[vec![z5.zeta(5).unwrap()]]).unwrap().into_arc(),
        Presentation::from_upper(s1, 3, &[vec![s1.s_pow(1).unwrap(), s1.parse("1+s").unwrap()], vec![s1.parse("2/s").unwrap()]]).unwrap().into_arc(),
        Presentation::from_upper(s3, 2, &[vec![&s3.zeta(3).unwrap() * &s3.s_pow(2).unwrap()]]).unwrap().into_arc(),
        Presentation::from_upper(fp, 3, &[vec![fp.from_i64(3), fp.from_i64(7)], vec![fp.from_i64(50)]]).unwrap().into_arc(),
    ];
    let mut agree = 0;
    let total = 10_000;
    for k in 0..total {
        let p = &kinds[k % kinds.len()];
        let lam = random::exponent(p.rank(), rng, -5, 5);
        let mu = random::exponent(p.rank(), rng, -5, 5);
        let got = &TorusElement::x_pow(p, &lam) * &TorusElement::x_pow(p, &mu);
        let (c, e) = letter_product(p, &lam, &mu);
        if got == TorusElement::monomial(p, e, c) {
            agree += 1;
        }
    }
    let t = start.elapsed();
    r.record(8, "multiplication oracle", agree == total, format!("{}/{} monomial pairs over 5 scalar kinds, {}", agree, total, secs(t)));
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut r = Report { lines: Vec::new() };
    lemma_suite(&mut r);
    centre(&mut r);
    let seeds = canonical_seeds(&mut rng);
    let canonical = canonicalization(&mut r, &seeds, &mut rng);
    mad_maximality(&mut r, &mut rng);
    specialization(&mut r);
    conjugacy(&mut r, &mut rng);
    roots(&mut r, &canonical);
    oracle(&mut r, &mut rng);
    let failed: Vec<&String> = r.lines.iter().filter(|(ok, _)| !ok).map(|(_, l)| l).collect();
    println!("{} of {} criteria passed", r.lines.len() - failed.len(), r.lines.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
