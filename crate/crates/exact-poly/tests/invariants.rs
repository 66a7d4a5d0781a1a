use exact_poly::{
    eval_interval, is_squarefree, rat, rat_int, Poly, Rational, SturmChain,
};
use num_traits::Signed;
use proptest::prelude::*;

fn small_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-20i64..=20, 1..=7).prop_map(|c| Poly::from_integers(&c))
}

fn nonzero_poly() -> impl Strategy<Value = Poly> {
    small_poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn addition_commutes_and_multiplication_distributes(
        a in small_poly(), b in small_poly(), c in small_poly()
    ) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), x in small_rat()) {
        prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
        prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
    }

    #[test]
    fn composition_evaluates_as_nesting(a in small_poly(), b in small_poly(), x in small_rat()) {
        prop_assert_eq!(a.compose(&b).eval(&x), a.eval(&b.eval(&x)));
    }

    #[test]
    fn exact_division_inverts_multiplication(a in small_poly(), b in nonzero_poly()) {
        let prod = &a * &b;
        prop_assert_eq!(prod.divide_exact(&b).unwrap(), a);
    }

    #[test]
    fn division_reassembles_the_dividend(a in small_poly(), b in nonzero_poly()) {
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        if let (Some(dr), Some(db)) = (r.degree(), b.degree()) {
            prop_assert!(dr < db);
        }
    }

    #[test]
    fn isolation_accounts_for_every_counted_root(p in nonzero_poly()) {
        let (lo, hi) = (rat_int(-50), rat_int(50));
        let chain = SturmChain::new(&p).unwrap();
        // coefficients are bounded by 20, so +-50 clears any root bound and
        // endpoint roots cannot occur unless the poly is tiny-degree weird;
        // skip those rare draws
        if p.sign_at(&lo) == 0 || p.sign_at(&hi) == 0 {
            return Ok(());
        }
        let expected = chain.count_roots_in(&lo, &hi).unwrap();
        let roots = chain.isolate(&lo, &hi).unwrap();
        prop_assert_eq!(roots.len(), expected);
        // sign brackets are a property of the squarefree part: an even-order
        // root of `p` itself never flips the sign of `p`
        let sf = chain.squarefree();
        for r in &roots {
            if r.is_exact() {
                prop_assert_eq!(p.sign_at(r.lo()), 0);
            } else {
                prop_assert_eq!(sf.sign_at(r.lo()) * sf.sign_at(r.hi()), -1);
            }
        }
    }

    #[test]
    fn refinement_converges_with_small_backward_error(p in nonzero_poly()) {
        let (lo, hi) = (rat_int(-50), rat_int(50));
        if p.sign_at(&lo) == 0 || p.sign_at(&hi) == 0 {
            return Ok(());
        }
        let chain = SturmChain::new(&p).unwrap();
        let sf = chain.squarefree().clone();
        let tol = rat(1, 1_000_000_000);
        for mut r in chain.isolate(&lo, &hi).unwrap() {
            r.refine_to(&sf, &tol);
            prop_assert!(r.width() <= tol.clone());
            let m = r.mid();
            // |sf(m)| is bounded by the interval width times a slope bound
            let (vlo, vhi) = eval_interval(&sf.derivative(), r.lo(), r.hi());
            let slope = vlo.abs().max(vhi.abs());
            prop_assert!(sf.eval(&m).abs() <= slope * r.width());
        }
    }

    #[test]
    fn interval_evaluation_is_an_enclosure(
        p in small_poly(), a in small_rat(), b in small_rat(), t in 0u32..=16
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (vlo, vhi) = eval_interval(&p, &lo, &hi);
        // sample a deterministic interior point on a dyadic subdivision
        let x = &lo + (&hi - &lo) * rat(t as i64, 16);
        let v = p.eval(&x);
        prop_assert!(vlo <= v && v <= vhi);
    }

    #[test]
    fn squarefree_detection_sees_planted_squares(a in nonzero_poly(), k in 1i64..=10) {
        // (x - k)^2 * a is never squarefree
        let lin = Poly::from_integers(&[-k, 1]);
        let planted = &(&lin * &lin) * &a;
        prop_assert!(!is_squarefree(&planted));
    }

    #[test]
    fn sturm_chain_counts_planted_rational_roots(
        mut roots in prop::collection::vec(-8i64..=8, 1..=5)
    ) {
        roots.sort_unstable();
        roots.dedup();
        let mut p = Poly::one();
        for r in &roots {
            p = &p * &Poly::from_integers(&[-r, 1]);
        }
        let chain = SturmChain::new(&p).unwrap();
        let n = chain.count_roots_in(&rat_int(-9), &rat_int(9)).unwrap();
        prop_assert_eq!(n, roots.len());
    }
}

#[test]
fn golden_quadratic_roots_to_twelve_digits() {
    // the two roots of x^2 - 9x + 19, i.e. (9 +- sqrt(5)) / 2
    let p = Poly::from_integers(&[19, -9, 1]);
    let chain = SturmChain::new(&p).unwrap();
    let mut roots = chain.isolate(&rat_int(0), &rat_int(10)).unwrap();
    let tol = rat(1, 1_000_000_000_000i64);
    for r in &mut roots {
        r.refine_to(&p, &tol);
    }
    let got: Vec<f64> = roots.iter().map(|r| r.mid_f64()).collect();
    let want = [3.381_966_011_250_105, 5.618_033_988_749_895];
    for (g, w) in got.iter().zip(want.iter()) {
        assert!((g - w).abs() < 5e-13, "{} vs {}", g, w);
    }
}
