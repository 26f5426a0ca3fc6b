use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use num_rational::BigRational;
use valdetect_core::fields::{FieldTower, KClass};
use valdetect_core::galois::KerTheta;
use valdetect_core::linalg_fl::{self, Subspace};
use valdetect_core::milnor;
use valdetect_core::projective_replay::{intersect_lines, line_through, PP2Point};
use valdetect_core::rigidity::Analyzer;
use valdetect_core::suites;

fn towers() -> [FieldTower; 3] {
    [suites::rational_x().0, suites::laurent_st().0, suites::rational_t().0]
}

fn class(k: &FieldTower, rng: &mut ChaCha8Rng) -> KClass {
    k.class_of(&suites::random_nontrivial(k, 3, rng)).unwrap()
}

fn vec_in(ell: u8, n: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..ell, n)
}

fn subspace_in(ell: u8, n: usize) -> impl Strategy<Value = Subspace> {
    prop::collection::vec(vec_in(ell, n), 0..=n).prop_map(move |g| Subspace::span(ell, n, &g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steinberg_holds_on_random_elements(seed in any::<u64>(), which in 0usize..3) {
        let k = &towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = suites::random_nontrivial(k, 3, &mut rng);
        let y = k.sub_at(k.top(), &k.one_at(k.top()), &x);
        let s = milnor::symbol(k, &k.class_of(&x).unwrap(), &k.class_of(&y).unwrap());
        prop_assert!(s.is_zero());
    }

    #[test]
    fn symbols_are_bilinear_and_alternating(seed in any::<u64>(), which in 0usize..3) {
        let k = &towers()[which];
        let ell = k.ell();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (class(k, &mut rng), class(k, &mut rng), class(k, &mut rng));
        let sym = |x: &KClass, y: &KClass| milnor::symbol(k, x, y);
        prop_assert_eq!(sym(&a.add(&b, ell), &c), sym(&a, &c).add(&sym(&b, &c), ell));
        prop_assert_eq!(sym(&a, &b.add(&c, ell)), sym(&a, &b).add(&sym(&a, &c), ell));
        prop_assert_eq!(sym(&a, &b), sym(&b, &a).neg(ell));
        prop_assert!(sym(&c, &c).is_zero());
    }

    #[test]
    fn reciprocity_on_random_pairs(seed in any::<u64>()) {
        let (k, _) = suites::rational_x();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (class(&k, &mut rng), class(&k, &mut rng));
        prop_assert!(milnor::reciprocity_check(&k, &milnor::symbol(&k, &x, &y)));
    }

    #[test]
    fn partner_span_lies_in_the_hull(t in subspace_in(3, 5)) {
        let (k, ctx) = suites::rational_t();
        let an = Analyzer::new(&k, &ctx, 4);
        let h = an.hull(&t).unwrap();
        prop_assert!(t.is_subspace_of(&h.hull));
        prop_assert!(h.partner_span.is_subspace_of(&h.hull));
        prop_assert_eq!(an.hull(&h.hull).unwrap().hull, h.hull.clone());
    }

    #[test]
    fn commutator_pairing_is_bilinear_and_alternating(s in vec_in(3, 5), u in vec_in(3, 5), t in vec_in(3, 5), c in 0u8..3) {
        let (k, ctx) = suites::rational_t();
        let an = Analyzer::new(&k, &ctx, 4);
        let kt = KerTheta::of(&an).unwrap();
        let comm = |a: &[u8], b: &[u8]| kt.comm_class(a, b).unwrap();
        let su = linalg_fl::add(&s, &linalg_fl::scale(&u, c, 3), 3);
        prop_assert_eq!(comm(&su, &t), linalg_fl::add(&comm(&s, &t), &linalg_fl::scale(&comm(&u, &t), c, 3), 3));
        prop_assert!(linalg_fl::is_zero(&comm(&s, &s)));
        prop_assert_eq!(comm(&s, &t), linalg_fl::scale(&comm(&t, &s), 2, 3));
        prop_assert_eq!(kt.beta_class(&su).unwrap(), linalg_fl::add(&kt.beta_class(&s).unwrap(), &linalg_fl::scale(&kt.beta_class(&u).unwrap(), c, 3), 3));
    }

    #[test]
    fn acl_is_hereditary(z in subspace_in(3, 5), g in vec_in(3, 5)) {
        let (k, ctx) = suites::rational_t();
        let an = Analyzer::new(&k, &ctx, 4);
        let kt = KerTheta::of(&an).unwrap();
        let big = z.with_vector(&g);
        if kt.is_acl(&big).unwrap() {
            prop_assert!(kt.is_acl(&z).unwrap());
        }
        let (a, b) = (kt.acl_center(&z).unwrap(), kt.acl_center(&big).unwrap());
        prop_assert!(a.is_subspace_of(&z));
        prop_assert!(b.is_subspace_of(&big));
    }

    #[test]
    fn lines_meet_where_they_should(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, e in -50i64..50, f in -50i64..50) {
        let (p, q, r) = (PP2Point::affine_ints(a, b), PP2Point::affine_ints(c, d), PP2Point::affine_ints(e, f));
        prop_assume!(p != q && p != r);
        let l1 = line_through(&p, &q).unwrap();
        let l2 = line_through(&p, &r).unwrap();
        prop_assert!(p.lies_on(&l1) && q.lies_on(&l1) && p.lies_on(&l2) && r.lies_on(&l2));
        if l1 != l2 {
            prop_assert_eq!(intersect_lines(&l1, &l2).unwrap(), p.clone());
        }
        let mid = PP2Point::affine(BigRational::new((a + c).into(), 2.into()), BigRational::new((b + d).into(), 2.into()));
        prop_assert!(mid.lies_on(&l1));
    }

    #[test]
    fn subspace_counts_match_gaussian_binomials(n in 1usize..=4, k in 0usize..=4) {
        let k = k.min(n);
        let got = linalg_fl::enumerate_subspaces(3, n, |d| d == k, 10_000).unwrap().filter(|s| s.dim() == k).count();
        prop_assert_eq!(got as u128, linalg_fl::gaussian_binomial(n, k, 3));
    }
}
