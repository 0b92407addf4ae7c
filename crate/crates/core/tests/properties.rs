use proptest::prelude::*;

use outwave::choquet::{choquet_integral, outer_measure, Ball, BallUnion, BumpFunction, ChoquetParams, Profile};
use outwave::experiments::{local_outgoing_velocity, plateau};
use outwave::freeflow::propagate_free;
use outwave::grid::{integrate_radial, resample};
use outwave::norms::{lp_norm, sobolev_norm};
use outwave::projections::{pair_norm, project};
use outwave::reduction::{forward_t, inverse_t};
use outwave::{RadialField, RadialGrid, StatePair};

fn gauss(g: RadialGrid, c: f64, w: f64, a: f64) -> RadialField {
    RadialField::from_fn(g, move |r| a * (-((r - c) / w).powi(2)).exp() * plateau(r, 0.5, 7.0, 0.4).0)
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn integration_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, c1 in 2.0..5.0f64, c2 in 2.0..5.0f64) {
        let g = RadialGrid::new(10.0, 1025).unwrap();
        let (f, h) = (gauss(g, c1, 0.5, 1.0), gauss(g, c2, 0.7, 1.0));
        let lhs = integrate_radial(&f.combine(a, &h, b));
        let (i_f, i_h) = (integrate_radial(&f), integrate_radial(&h));
        prop_assert!((lhs - a * i_f - b * i_h).abs() <= 1e-12 * (a.abs() * i_f.abs() + b.abs() * i_h.abs() + 1.0));
    }

    #[test]
    fn resample_to_same_grid_is_identity(c in 1.0..6.0f64, w in 0.2..1.0f64) {
        let g = RadialGrid::new(8.0, 513).unwrap();
        let f = gauss(g, c, w, 1.0);
        prop_assert_eq!(resample(&f, g).samples, f.samples);
    }

    #[test]
    fn reduction_round_trip(c in 2.0..5.0f64, w in 0.3..0.8f64, a in -2.0..2.0f64) {
        let g = RadialGrid::new(10.0, 2049).unwrap();
        let u = gauss(g, c, w, a);
        prop_assume!(u.sup_abs() > 1e-3);
        let back = inverse_t(&forward_t(&u).unwrap());
        prop_assert!(back.combine(1.0, &u, -1.0).sup_abs() <= 1e-8 * u.sup_abs());
    }

    #[test]
    fn projections_sum_to_identity(c0 in 2.0..5.0f64, c1 in 2.0..5.0f64, a in -1.0..1.0f64) {
        let g = RadialGrid::new(12.0, 2048).unwrap();
        let s = StatePair::new(gauss(g, c0, 0.5, 1.0), gauss(g, c1, 0.6, a)).unwrap();
        let p = project(&s).unwrap();
        let back = p.out_part.combine(1.0, &p.in_part, 1.0).combine(1.0, &s, -1.0);
        prop_assert!(pair_norm(&back).unwrap() <= 1e-10 * pair_norm(&s).unwrap());
    }

    #[test]
    fn lp_scaling(k in 1usize..4, p in prop::sample::select(vec![1.0, 2.0, 4.0, 9.0])) {
        // u(k x) sampled on the same grid: exact node correspondence for integer k
        let g = RadialGrid::new(16.0, 4097).unwrap();
        let u = gauss(g, 3.0, 0.6, 1.0);
        let kf = k as f64;
        let uk = RadialField::from_fn(g, |r| u.eval(kf * r));
        let want = kf.powf(-3.0 / p) * lp_norm(&u, p);
        prop_assert!((lp_norm(&uk, p) / want - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn plancherel(c in 2.0..5.0f64, w in 0.4..1.0f64) {
        let g = RadialGrid::new(20.0, 4097).unwrap();
        let u = gauss(g, c, w, 1.0);
        let a = sobolev_norm(&u, 0.0).unwrap();
        prop_assert!((a / lp_norm(&u, 2.0) - 1.0).abs() <= 1e-4);
    }
}

proptest! {
    #![proptest_config(cfg(8))]

    #[test]
    fn outgoing_free_flow_contracts(a in 0.8..1.5f64, len in 0.8..2.0f64, t in 0.5..4.0f64) {
        let g = RadialGrid::new(10.0, 4096).unwrap();
        let u0 = RadialField::from_fn(g, |r| plateau(r, a, a + len, 0.4).0);
        let s = StatePair::new(u0.clone(), local_outgoing_velocity(&u0).unwrap()).unwrap();
        let t = (t / g.h()).round() * g.h();
        let u = propagate_free(&s, t).unwrap().pos;
        prop_assert!((lp_norm(&u, 2.0) / lp_norm(&u0, 2.0) - 1.0).abs() <= 1e-7);
        prop_assert!(u.sup_abs() <= u0.sup_abs() * (1.0 + 1e-10));
        prop_assert!(lp_norm(&u, 4.0) <= lp_norm(&u0, 4.0) * (1.0 + 1e-10));
        // finite speed of propagation
        let s0 = u0.support_radius(1e-6);
        prop_assert!(u.support_radius(1e-6) <= s0 + t + 2.0 * g.h());
    }

    #[test]
    fn outer_measure_is_monotone_and_subadditive(
        x in -3.0..3.0f64, r1 in 0.3..1.5f64, r2 in 0.3..1.5f64, alpha in 0.3..2.0f64,
    ) {
        let prm = ChoquetParams::new(alpha).unwrap();
        let a = BallUnion::new(vec![Ball::new([0.0; 3], r1).unwrap()]);
        let b = BallUnion::new(vec![Ball::new([x, 0.5, 0.0], r2).unwrap()]);
        let both = BallUnion::new(vec![Ball::new([0.0; 3], r1).unwrap(), Ball::new([x, 0.5, 0.0], r2).unwrap()]);
        let (ma, mb, mab) = (outer_measure(&a, &prm).value, outer_measure(&b, &prm).value, outer_measure(&both, &prm).value);
        prop_assert!(ma <= mab * 1.02 && mb <= mab * 1.02);
        prop_assert!(mab <= (ma + mb) * 1.02);
        let shifted = outer_measure(&both.translated([2.0, -1.0, 3.0]), &prm).value;
        prop_assert!((shifted / mab - 1.0).abs() <= 0.02);
    }

    #[test]
    fn choquet_integral_is_homogeneous(c in 0.1..10.0f64, scale in 0.3..2.0f64) {
        let prm = ChoquetParams::new(1.0).unwrap();
        let f = BumpFunction::single([0.0; 3], 1.0, Profile::Gaussian, scale).unwrap();
        let i1 = choquet_integral(&f, &prm).unwrap();
        let ic = choquet_integral(&f.scaled(c), &prm).unwrap();
        prop_assert!((ic / (c * i1) - 1.0).abs() <= 1e-6);
    }
}
