use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qtorus::lattice::intmat::{self, IntMat};
use qtorus::lattice::{canonical_presentation, central_lattice, is_fgc, smith_normal_form, Presentation};
use qtorus::matlie::TorusMatrix;
use qtorus::qtorus::{DegreeBasis, MonomialMap, TorusElement};
use qtorus::random;
use qtorus::scalar::{Field, Order};
use qtorus::specialize::{propose_prime, specialize_element, specialize_presentation};
use qtorus::verify::sample_presentations;

fn samples() -> Vec<Arc<Presentation>> {
    sample_presentations().into_iter().map(|(_, p)| p).collect()
}

/// A sample presentation and a generator seeded for it.
fn case() -> impl Strategy<Value = (Arc<Presentation>, ChaCha8Rng)> {
    (0..samples().len(), any::<u64>()).prop_map(|(i, seed)| (samples()[i].clone(), ChaCha8Rng::seed_from_u64(seed)))
}

fn small_matrix(n: usize) -> impl Strategy<Value = IntMat> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, n), 1..=n + 1)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn ring_axioms((p, mut rng) in case()) {
        let [a, b, c] = [0; 3].map(|_| random::element(&p, &mut rng, 3, 2));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &TorusElement::one(&p), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn no_zero_divisors_and_degrees_add((p, mut rng) in case()) {
        let a = random::element(&p, &mut rng, 3, 2);
        let b = random::element(&p, &mut rng, 3, 2);
        let ab = &a * &b;
        prop_assert!(!ab.is_zero());
        let eps = DegreeBasis::new(random::unimodular(p.rank(), &mut rng, 5, 3)).unwrap();
        let d = |x: &TorusElement| x.degree(&eps).finite().unwrap();
        prop_assert_eq!(d(&ab), d(&a) + d(&b));
    }

    #[test]
    fn units_are_monomials((p, mut rng) in case()) {
        let u = random::unit(&p, &mut rng, 3);
        let inv = u.inverse().unwrap();
        prop_assert_eq!(&u * &inv, TorusElement::one(&p));
        let x = random::element(&p, &mut rng, 3, 2);
        prop_assert_eq!(x.inverse().is_some(), x.len() == 1);
    }

    #[test]
    fn opposite_map_reverses_products((p, mut rng) in case()) {
        let op = p.opposite().into_arc();
        let a = random::element(&p, &mut rng, 3, 2);
        let b = random::element(&p, &mut rng, 3, 2);
        prop_assert_eq!((&a * &b).op_map(&op), &b.op_map(&op) * &a.op_map(&op));
    }

    #[test]
    fn centre_split_is_a_decomposition((p, mut rng) in case()) {
        let a = random::element(&p, &mut rng, 4, 3);
        let (z, rest) = a.centre_split();
        prop_assert_eq!(&z + &rest, a);
        prop_assert!(z.is_central());
        prop_assert!(rest.support().all(|l| !p.is_central(l)));
        let lattice = central_lattice(&p);
        if let Ok(c) = lattice {
            prop_assert!(z.support().all(|l| c.contains(l)));
        }
    }

    #[test]
    fn base_change_is_a_monomial_isomorphism((p, mut rng) in case()) {
        let a = random::unimodular(p.rank(), &mut rng, 6, 3);
        let target = p.change_basis(&a).unwrap().into_arc();
        let one = p.field().one();
        let f = MonomialMap::new(&target, &p, a.iter().map(|r| (r.clone(), one.clone())).collect()).unwrap();
        let x = random::element(&target, &mut rng, 3, 2);
        let y = random::element(&target, &mut rng, 3, 2);
        prop_assert_eq!(f.apply(&(&x * &y)).unwrap(), &f.apply(&x).unwrap() * &f.apply(&y).unwrap());
        prop_assert!(!f.apply(&x).unwrap().is_zero());
    }

    #[test]
    fn central_index_is_a_base_change_invariant((p, mut rng) in case()) {
        let a = random::unimodular(p.rank(), &mut rng, 6, 3);
        let q = p.change_basis(&a).unwrap();
        prop_assert_eq!(central_lattice(&p).map(|c| c.index), central_lattice(&q).map(|c| c.index));
        prop_assert_eq!(is_fgc(&p), is_fgc(&q));
    }

    #[test]
    fn canonical_form_is_reached_by_its_base_change((p, mut rng) in case()) {
        prop_assume!(is_fgc(&p));
        let a = random::unimodular(p.rank(), &mut rng, 6, 3);
        let q = p.change_basis(&a).unwrap();
        let (b, qc) = canonical_presentation(&q).unwrap();
        prop_assert!(intmat::is_unimodular(&b));
        prop_assert_eq!(q.change_basis(&b).unwrap(), qc.clone());
        let (_, pc) = canonical_presentation(&p).unwrap();
        let orders = |x: &Presentation| {
            let mut o: Vec<Order> = (0..x.rank() / 2).map(|k| x.entry(2 * k, 2 * k + 1).mult_order().unwrap()).collect();
            o.sort();
            o
        };
        prop_assert_eq!(orders(&pc), orders(&qc));
    }

    #[test]
    fn matrix_multiplication_is_associative((p, mut rng) in case(), ell in 2usize..=3) {
        let [a, b, c] = [0; 3].map(|_| random::matrix(&p, ell, &mut rng, 0.5));
        let ab_c = a.checked_mul(&b).unwrap().checked_mul(&c).unwrap();
        let a_bc = a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert_eq!(a.checked_mul(&TorusMatrix::identity(&p, ell)).unwrap(), a);
    }

    #[test]
    fn json_round_trips((p, mut rng) in case()) {
        let q = Presentation::from_json(&p.to_json()).unwrap().into_arc();
        prop_assert_eq!(q.as_ref(), p.as_ref());
        let x = random::element(&p, &mut rng, 4, 3);
        prop_assert_eq!(TorusElement::from_json(&p, &x.to_json()).unwrap(), x);
        let m = random::matrix(&p, 2, &mut rng, 0.3);
        prop_assert_eq!(TorusMatrix::from_json(&p, &m.to_json()).unwrap(), m);
    }

    #[test]
    fn reduction_mod_p_is_multiplicative(i in 0usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fs = [Field::cyclotomic(3), Field::cyclotomic(12), Field::rational_function(1), Field::rational_function(3)];
        let f = fs[i];
        let q12 = if f.has_transcendental() { &f.s_pow(1).unwrap() * &f.omega_pow(1) } else { f.omega_pow(1) };
        let p = Presentation::from_blocks(f, 2, &[q12]).unwrap().into_arc();
        let h = propose_prime(&[&p], &[2], &[], 4, 200).unwrap();
        let t = specialize_presentation(&p, &h).unwrap().into_arc();
        let small = |rng: &mut ChaCha8Rng| {
            let terms: Vec<_> = (0..2).map(|_| (random::exponent(2, rng, -2, 2), random::small_scalar(&f, rng))).collect();
            TorusElement::from_terms(&p, terms)
        };
        let (a, b) = (small(&mut rng), small(&mut rng));
        let red = |x: &TorusElement| specialize_element(x, &h, &t).unwrap();
        prop_assert_eq!(red(&(&a * &b)), &red(&a) * &red(&b));
        prop_assert_eq!(red(&(&a + &b)), &red(&a) + &red(&b));
    }

    #[test]
    fn smith_form_factors(m in small_matrix(3)) {
        let (u, d, v) = smith_normal_form(&m);
        prop_assert!(intmat::is_unimodular(&u) && intmat::is_unimodular(&v));
        prop_assert_eq!(intmat::mat_mul(&intmat::mat_mul(&u, &m), &v), d.clone());
        let diag: Vec<i64> = (0..d.len().min(intmat::cols(&d))).map(|i| d[i][i]).collect();
        prop_assert!(diag.iter().all(|&x| x >= 0));
        prop_assert!(diag.windows(2).all(|w| w[1] == 0 || (w[0] != 0 && w[1] % w[0] == 0)));
        for (i, row) in d.iter().enumerate() {
            prop_assert!(row.iter().enumerate().all(|(j, &x)| i == j || x == 0));
        }
    }

    #[test]
    fn unimodular_inverse(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::unimodular(n, &mut rng, 10, 4);
        let inv = intmat::inverse_unimodular(&a).unwrap();
        prop_assert_eq!(intmat::mat_mul(&a, &inv), intmat::identity(n));
        prop_assert_eq!(intmat::det(&a).abs(), 1);
    }
}
