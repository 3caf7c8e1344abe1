use ellr::elliptic::{lattice_distance, Elliptic, ModularTau, SeriesConfig};
use ellr::identities::*;
use ellr::suite::{run_cell, Cell, IdentityName};
use ellr::tensor::{embed, permutation_p, LatticeSpec, TwoSiteOperator};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn tau_strategy() -> impl Strategy<Value = ModularTau> {
    (-0.5f64..=0.5, 0.8f64..=2.0).prop_map(|(re, im)| ModularTau::new(Complex64::new(re, im)).unwrap())
}

fn point(tau: ModularTau, s: f64, t: f64) -> Complex64 {
    s + t * tau.value()
}

fn unit() -> impl Strategy<Value = f64> {
    0.0f64..1.0
}

fn ctx(tau: ModularTau) -> Elliptic {
    Elliptic::new(tau, SeriesConfig::default()).unwrap()
}

fn generic(ws: &[Complex64], tau: ModularTau) -> bool {
    ws.iter().all(|&w| lattice_distance(w, tau) >= 0.05)
}

fn random_two_site(m: usize, entries: &[(f64, f64)]) -> TwoSiteOperator {
    let d = m * m;
    let mat = DMatrix::from_iterator(d, d, entries.iter().take(d * d).map(|&(a, b)| Complex64::new(a, b)));
    TwoSiteOperator::new(m, mat).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_is_odd(tau in tau_strategy(), s in unit(), t in unit()) {
        let e = ctx(tau);
        let z = point(tau, s, t);
        let th = e.theta(z).unwrap();
        prop_assert!((e.theta(-z).unwrap() + th).norm() <= 1e-12 * th.norm().max(1.0));
    }

    #[test]
    fn theta_quasi_periodic(tau in tau_strategy(), s in unit(), t in unit()) {
        let e = ctx(tau);
        let z = point(tau, s, t);
        let th = e.theta(z).unwrap();
        let i = Complex64::i();
        let one = e.theta(z + 1.0).unwrap();
        prop_assert!((one + th).norm() <= 1e-11 * th.norm().max(1.0));
        let shifted = e.theta(z + tau.value()).unwrap();
        let want = -(-PI * i * tau.value() - 2.0 * PI * i * z).exp() * th;
        prop_assert!((shifted - want).norm() <= 1e-11 * want.norm().max(shifted.norm()).max(1.0));
    }

    #[test]
    fn phi_symmetric_and_quasi_periodic(tau in tau_strategy(), a in unit(), b in unit(), c in unit(), d in unit()) {
        let (z, u) = (point(tau, a, b), point(tau, c, d));
        prop_assume!(generic(&[z, u, z + u], tau));
        let e = ctx(tau);
        let p = e.kronecker_phi(z, u).unwrap();
        let scale = p.norm().max(1.0);
        prop_assert!((p - e.kronecker_phi(u, z).unwrap()).norm() <= 1e-11 * scale);
        prop_assert!((e.kronecker_phi(z + 1.0, u).unwrap() - p).norm() <= 1e-11 * scale);
        let want = (-2.0 * PI * Complex64::i() * u).exp() * p;
        let got = e.kronecker_phi(z + tau.value(), u).unwrap();
        prop_assert!((got - want).norm() <= 1e-11 * want.norm().max(got.norm()).max(1.0));
    }

    #[test]
    fn fay_and_wp(tau in tau_strategy(), v in proptest::collection::vec(unit(), 8)) {
        let p: Vec<Complex64> = v.chunks(2).map(|w| point(tau, w[0], w[1])).collect();
        let (z1, u1, z2, u2) = (p[0], p[1], p[2], p[3]);
        prop_assume!(generic(&[z1, z2, u1, u2, z1 - z2, u1 + u2, z1 + u1, z1 - u1], tau));
        let e = ctx(tau);
        prop_assert!(e.check_fay(z1, u1, z2, u2).unwrap() <= 1e-9);
        let lhs = e.kronecker_phi(z1, u1).unwrap() * e.kronecker_phi(z1, -u1).unwrap();
        let pz = e.weierstrass_p(z1).unwrap();
        let pu = e.weierstrass_p(u1).unwrap();
        let scale = lhs.norm().max(pz.norm()).max(pu.norm()).max(1.0);
        prop_assert!((lhs - pz + pu).norm() <= 1e-9 * scale);
    }

    #[test]
    fn higher_fay_up_to_six(tau in tau_strategy(), n in 1usize..=6, v in proptest::collection::vec(unit(), 24)) {
        let p: Vec<Complex64> = v.chunks(2).map(|w| point(tau, w[0], w[1])).collect();
        let (ws, us) = (&p[..n], &p[6..6 + n]);
        let mut combos: Vec<Complex64> = ws.iter().chain(us).copied().collect();
        for i in 0..n {
            for j in i + 1..n {
                combos.push(ws[i] - ws[j]);
            }
        }
        combos.push(us.iter().sum());
        prop_assume!(generic(&combos, tau));
        prop_assert!(ctx(tau).check_higher_fay(ws, us).unwrap() <= 1e-9);
    }

    #[test]
    fn embedding_is_multiplicative(
        a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        pair in prop_oneof![Just((1usize, 2usize)), Just((3, 1)), Just((2, 3))],
    ) {
        let spec = LatticeSpec::new(2, 3).unwrap();
        let (oa, ob) = (random_two_site(2, &a), random_two_site(2, &b));
        let ab = TwoSiteOperator::new(2, oa.matrix() * ob.matrix()).unwrap();
        let lhs = embed(&ab, pair.0, pair.1, &spec).unwrap();
        let rhs = embed(&oa, pair.0, pair.1, &spec).unwrap().mul(&embed(&ob, pair.0, pair.1, &spec).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().frobenius_norm() <= 1e-13 * lhs.frobenius_norm().max(1.0));
    }

    #[test]
    fn disjoint_supports_commute(
        a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        layout in prop_oneof![Just([1usize, 2, 3, 4]), Just([4, 1, 2, 3]), Just([2, 4, 3, 1])],
    ) {
        let spec = LatticeSpec::new(2, 4).unwrap();
        let x = embed(&random_two_site(2, &a), layout[0], layout[1], &spec).unwrap();
        let y = embed(&random_two_site(2, &b), layout[2], layout[3], &spec).unwrap();
        prop_assert!(x.commutator(&y).unwrap().frobenius_norm() <= 1e-13);
    }

    #[test]
    fn swap_conjugation_moves_a_leg(
        a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        ijk in prop_oneof![Just((1usize, 2usize, 3usize)), Just((3, 1, 2)), Just((2, 3, 1))],
    ) {
        let (i, j, k) = ijk;
        let spec = LatticeSpec::new(2, 3).unwrap();
        let op = random_two_site(2, &a);
        let p = permutation_p(i, j, &spec).unwrap();
        let moved = p.mul(&embed(&op, i, k, &spec).unwrap()).unwrap().mul(&p).unwrap();
        let want = embed(&op, j, k, &spec).unwrap();
        prop_assert!(moved.sub(&want).unwrap().frobenius_norm() <= 1e-13);
    }

    #[test]
    fn subset_enumeration_counts(n in 1usize..=7, k in 0usize..=7) {
        prop_assume!(k <= n);
        let universe: Vec<usize> = (1..=n).collect();
        let subsets = IndexSubset::subsets_of_size(&universe, k);
        let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        prop_assert_eq!(subsets.len(), binom);
        for s in &subsets {
            let c = s.complement();
            prop_assert!(s.is_disjoint(&c));
            let all = s.union(&c);
            prop_assert_eq!(all.elements(), &universe[..]);
        }
    }

    #[test]
    fn both_orderings_use_the_same_pairs(mask in 0u32..(1 << 6), n in 2usize..=6) {
        let universe: Vec<usize> = (1..=n).collect();
        let elements: Vec<usize> = universe.iter().copied().filter(|&s| mask & (1 << (s - 1)) != 0).collect();
        let i_set = IndexSubset::new(elements, universe).unwrap();
        let j_set = i_set.complement();
        for build in [plan_r, plan_r_prime, plan_y] {
            let mut a = build(&i_set, &j_set, Form::First).pairs();
            let mut b = build(&i_set, &j_set, Form::Second).pairs();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }
        let expected = i_set.iter().flat_map(|i| j_set.iter().map(move |j| (i, j))).filter(|(i, j)| i < j).count();
        prop_assert_eq!(plan_r(&i_set, &j_set, Form::First).len(), expected);
        prop_assert_eq!(plan_y(&i_set, &j_set, Form::First).len(), i_set.len() * j_set.len());
    }

    #[test]
    fn residual_conventions(abs in 0.0f64..10.0, norm in 0.0f64..100.0, tol in 1e-12f64..1.0) {
        let r = Residual::new(abs, norm);
        prop_assert!(r.rel <= abs);
        prop_assert!(r.rel >= 0.0);
        let v = Verdict::from_residual(r.rel, tol);
        prop_assert_eq!(v == Verdict::Pass, r.rel <= tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theorem_holds_and_replays(seed in any::<u64>(), m in 1usize..=2, n in 1usize..=2, k_pick in 0usize..2) {
        let k = 1 + k_pick % n;
        let cell = Cell::new(IdentityName::Theorem, m, n, k).with_seed(seed, 0);
        let a = run_cell(&cell).unwrap();
        prop_assert!(a.passed(), "{:?}", a);
        prop_assert_eq!(&a, &run_cell(&cell).unwrap());
    }

    #[test]
    fn every_low_level_check_passes(seed in any::<u64>(), idx in 0usize..12, m in 1usize..=3) {
        let id = IdentityName::ALL[idx];
        let cell = Cell::new(id, m, 2, 1).with_seed(seed, 7);
        let r = run_cell(&cell).unwrap();
        prop_assert!(r.passed(), "{}: {:?}", id, r);
    }
}
