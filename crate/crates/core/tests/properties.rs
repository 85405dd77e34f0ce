use l1weight::boolfn::{avg_distance, format_support, parse_support, random_fn, BoolFn};
use l1weight::bounds::{
    ball_w1_exact, ball_w1_limit, bound_table, chang_bound, chi, chi_tilde, lp_bound, subcube_w1,
    uniform_grid, TableOptions,
};
use l1weight::changdim::{ball_density, gf2_rank, sampled_dim_check, sharp_eps, spec_set};
use l1weight::extremal::{exact_max_w1, ltf_search, min_upper_bound, self_consistency_check};
use l1weight::{parse_rational, ProfileParams};
use num_rational::Rational64;
use num_traits::ToPrimitive;
use proptest::prelude::*;

#[test]
fn majority_example() {
    let f = BoolFn::majority3();
    assert_eq!(f.count(), 4);
    assert_eq!(f.wht().level_weight(1).unwrap(), 0.1875);
    assert!((avg_distance(&f).unwrap() - 1.125).abs() < 1e-15);
    assert!(self_consistency_check(&f));
    // Coordinate coefficients are exactly a/2, so the strict threshold keeps
    // all three just below one half and none at one half.
    assert_eq!(spec_set(&f, 0.49).unwrap().dimension, 3);
    assert_eq!(spec_set(&f, 0.5).unwrap().dimension, 0);
    let half = parse_rational("1/2").unwrap();
    assert_eq!(sharp_eps(3, &half).unwrap(), half);
}

#[test]
fn support_text_round_trip() {
    let f = random_fn(6, 20, 5).unwrap();
    let text = format_support(&f);
    assert_eq!(parse_support(6, &text).unwrap(), f);
}

#[test]
fn witnesses_sit_below_every_bound() {
    let p = ProfileParams::default();
    for k in 1..=8u32 {
        let a = 0.5f64.powi(k as i32);
        let cube = subcube_w1(k);
        assert!(cube <= chi(a, &p).unwrap() + 1e-12, "k={k}");
        assert!(cube <= chi_tilde(a, &p).unwrap().value + 1e-9, "k={k}");
        assert!(cube <= lp_bound(a).unwrap() + 1e-12, "k={k}");
        assert!(cube <= chang_bound(a).unwrap() + 1e-12, "k={k}");
        for r in 0..k {
            let a = ball_density(k, r).to_f64().unwrap();
            if a > 0.5 {
                continue;
            }
            let w = ball_w1_exact(k, r).unwrap().to_f64().unwrap();
            assert!(w <= min_upper_bound(a, &p).unwrap() + 1e-9, "k={k} r={r}");
        }
    }
}

#[test]
fn fine_table_is_sandwiched() {
    let p = ProfileParams::default();
    let grid = uniform_grid(1e-3).unwrap();
    let report = bound_table(&grid, &p, TableOptions::default()).unwrap();
    assert_eq!(report.rows.len(), grid.len());
    for &a in &grid {
        assert!(
            ball_w1_limit(a).unwrap() <= chi(a, &p).unwrap() + 1e-12,
            "a={a}"
        );
    }
}

#[test]
fn ltf_is_a_lower_bound_on_the_exact_maximum() {
    for n in 2..=4 {
        for m in 1..=(1usize << (n - 1)) {
            let exact = exact_max_w1(n, m).unwrap().max_w1;
            let ltf = ltf_search(n, m, 3).unwrap().w1;
            assert!(ltf <= exact, "n={n} m={m}");
        }
    }
    assert_eq!(exact_max_w1(4, 8).unwrap().max_w1, Rational64::new(1, 4));
}

#[test]
fn sampled_dimensions_respect_bounds() {
    let p = ProfileParams::default();
    let rep = sampled_dim_check(6, &[0.2, 0.4, 0.6], 200, 17, &p).unwrap();
    assert!(rep.pass(), "{rep:?}");
    assert_eq!(
        rep,
        sampled_dim_check(6, &[0.2, 0.4, 0.6], 200, 17, &p).unwrap()
    );
}

proptest! {
    #[test]
    fn spec_set_dimension_is_rank(n in 1usize..=7, seed in any::<u64>(), eps in 0.05f64..0.95) {
        let len = 1usize << n;
        let m = 1 + (seed as usize) % len;
        let f = random_fn(n, m, seed).unwrap();
        let s = spec_set(&f, eps).unwrap();
        let (rank, basis) = gf2_rank(&s.members, n);
        prop_assert_eq!(s.dimension, rank);
        prop_assert_eq!(basis.len(), rank);
        prop_assert!(basis.iter().all(|b| s.members.contains(b)));
    }

    #[test]
    fn bounds_are_symmetric_in_density(a in 0.001f64..0.5) {
        let p = ProfileParams::default();
        prop_assert!((min_upper_bound(a, &p).unwrap() - min_upper_bound(1.0 - a, &p).unwrap()).abs() < 1e-12);
    }
}
