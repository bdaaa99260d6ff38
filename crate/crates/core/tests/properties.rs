use proptest::prelude::*;

use nplectic::combinatorics::{enumerate_shuffles, koszul_sign, multinomial, Permutation};
use nplectic::io::{parse_structure, structure_to_file, to_json};
use nplectic::random::Sampler;
use nplectic::scalar::Poly;
use nplectic::{Cotensor, ExtensionElement, NPlecticStructure, Pair, Rational, Tensor};

fn pair_strategy() -> impl Strategy<Value = Pair> {
    prop_oneof![
        Just(Pair::su2()),
        Just(Pair::heisenberg()),
        Just(Pair::poly(2).unwrap()),
        Just(Pair::poly(3).unwrap()),
    ]
}

fn sign(e: i64) -> Rational {
    Rational::sign_power(e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_laws(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
        let x = Rational::new(a, b);
        let y = Rational::new(c, d);
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&(&x * &y) * &x, &x * &(&y * &x));
        if !y.is_zero() {
            prop_assert_eq!(&(&x / &y) * &y, x.clone());
        }
        prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
    }

    #[test]
    fn poly_ring_laws(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (p, q, r) = (s.poly(3, 3, 3), s.poly(3, 3, 3), s.poly(3, 3, 3));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(p.to_string().parse::<Poly>().unwrap(), p);
    }

    #[test]
    fn koszul_sign_is_multiplicative(seed in any::<u64>(), k in 1usize..6) {
        let mut s = Sampler::new(seed);
        let degrees: Vec<i64> = (0..k).map(|_| s.range(0, 3) as i64 - 1).collect();
        let p = s.permutation(k);
        let q = s.permutation(k);
        let pq = p.compose(&q).unwrap();
        // e(p q; v) = e(p; v) e(q; p(v)) with p(v) = v_{p(1)}, .., v_{p(k)}.
        let lhs = koszul_sign(&pq, &degrees).unwrap();
        let rhs = koszul_sign(&p, &degrees).unwrap() * koszul_sign(&q, &p.apply(&degrees)).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(koszul_sign(&Permutation::identity(k), &degrees).unwrap(), 1);
        let even: Vec<i64> = degrees.iter().map(|d| 2 * d).collect();
        prop_assert_eq!(koszul_sign(&p, &even).unwrap(), 1);
    }

    #[test]
    fn shuffle_counts(blocks in prop::collection::vec(1usize..4, 1..4)) {
        let set = enumerate_shuffles(&blocks).unwrap();
        prop_assert_eq!(num_bigint::BigInt::from(set.len()), multinomial(&blocks));
        let mut offsets = vec![0];
        for b in &blocks {
            offsets.push(offsets.last().unwrap() + b);
        }
        for p in set.iter() {
            let img = p.zero_based();
            for w in offsets.windows(2) {
                prop_assert!(img[w[0]..w[1]].windows(2).all(|v| v[0] < v[1]));
            }
        }
    }

    #[test]
    fn wedge_graded_commutative(pair in pair_strategy(), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (a, b) = (s.range(0, pair.dim()), s.range(0, pair.dim()));
        let x = s.tensor(&pair, a, 2, 2);
        let y = s.tensor(&pair, b, 2, 2);
        prop_assert_eq!(x.wedge(&y), y.wedge(&x).scale(&sign((a * b) as i64)));
        let f = s.cotensor(&pair, a, 2, 2);
        let g = s.cotensor(&pair, b, 2, 2);
        prop_assert_eq!(f.wedge(&g), g.wedge(&f).scale(&sign((a * b) as i64)));
    }

    #[test]
    fn d_squares_to_zero(pair in pair_strategy(), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let len = s.range(0, pair.dim());
        let f = s.cotensor(&pair, len, 3, 3);
        let d = pair.ce_differential(&f).unwrap();
        prop_assert!(pair.ce_differential(&d).unwrap().is_zero());
    }

    #[test]
    fn schouten_graded_antisymmetry(pair in pair_strategy(), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (a, b) = (s.range(0, pair.dim().min(3)), s.range(0, pair.dim().min(3)));
        let x = s.tensor(&pair, a, 2, 2);
        let y = s.tensor(&pair, b, 2, 2);
        let xy = pair.schouten(&x, &y).unwrap();
        let yx = pair.schouten(&y, &x).unwrap();
        let e = (a as i64 - 1) * (b as i64 - 1);
        prop_assert_eq!(xy, yx.scale(&-sign(e)));
    }

    #[test]
    fn cartan_rules_hold(pair in pair_strategy(), seed in any::<u64>()) {
        let r = nplectic::suite::cartan_rules(&pair, seed, 3);
        prop_assert!(r.passed, "{:?}", r.rules);
    }

    #[test]
    fn contraction_is_the_pairing_on_top_degree(pair in pair_strategy(), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let k = s.range(0, pair.dim());
        let x = s.tensor(&pair, k, 2, 2);
        let f = s.cotensor(&pair, k, 2, 2);
        let i = pair.contract(&x, &f).unwrap();
        prop_assert_eq!(i, Cotensor::scalar(pair.pairing(&f, &x).unwrap()));
    }

    #[test]
    fn d_omega_squares_to_zero(seed in any::<u64>(), plane in any::<bool>()) {
        let st = if plane { NPlecticStructure::symplectic_plane() } else { NPlecticStructure::su2_cartan() };
        let mut s = Sampler::new(seed);
        let k = s.range(0, st.pair().dim()) as i64;
        let x = st.random_symplectic(&mut s, k, 2).unwrap();
        let t = st.n() as i64 - k;
        let f = if t >= 0 { s.cotensor(st.pair(), t as usize, 2, 2) } else { Cotensor::zero() };
        let e = ExtensionElement::new(f, x);
        let dd = st.d_omega(&st.d_omega(&e).unwrap()).unwrap();
        prop_assert!(dd.is_zero(), "{}", dd);
    }

    #[test]
    fn classes_ignore_coboundaries(seed in any::<u64>()) {
        let st = NPlecticStructure::symplectic_plane();
        let mut s = Sampler::new(seed);
        let e = st.random_cocycle(&mut s, 1, 2).unwrap();
        let h = s.cotensor(st.pair(), 1, 2, 2);
        let shifted = ExtensionElement::new(e.potential.clone() - st.pair().ce_differential(&h).unwrap(), e.tensor.clone());
        prop_assert_eq!(st.class_of(&e).unwrap(), st.class_of(&shifted).unwrap());
    }

    #[test]
    fn hamiltonian_potentials_solve(seed in any::<u64>()) {
        let st = NPlecticStructure::symplectic_plane();
        let mut s = Sampler::new(seed);
        let x = st.random_symplectic(&mut s, 1, 3).unwrap();
        let f = st.hamiltonian_potential(&x).unwrap().expect("the plane has no first cohomology");
        prop_assert_eq!(st.pair().ce_differential(&f).unwrap(), st.contract_omega(&x).unwrap());
    }

    #[test]
    fn sampler_is_deterministic(pair in pair_strategy(), seed in any::<u64>()) {
        let a: Tensor = Sampler::new(seed).tensor(&pair, 1, 3, 3);
        let b: Tensor = Sampler::new(seed).tensor(&pair, 1, 3, 3);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn structure_files_round_trip() {
    for st in [NPlecticStructure::symplectic_plane(), NPlecticStructure::su2_cartan()] {
        let text = to_json(&structure_to_file(&st));
        let back = parse_structure(&text).unwrap();
        assert_eq!(back.omega(), st.omega());
        assert_eq!(to_json(&structure_to_file(&back)), text);
    }
}
