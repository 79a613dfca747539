use std::sync::Arc;

use dirac_core::angular::{AngularIndex, SphereGrid, ThetaRule};
use dirac_core::oracle3d::{apply_dirac, channel_projection, reconstruct_cartesian, CartesianGrid};
use dirac_core::radial::{
    d_apply, project, reconstruct, reduced_hs_norm, PotentialProfile, PotentialSpec, RadialGrid, RadialPair,
};
use dirac_core::C64;
use proptest::prelude::*;

fn idx(two_mj: i32, kappa: i32) -> AngularIndex {
    AngularIndex::new(1, two_mj, kappa).unwrap()
}

fn channels() -> Vec<AngularIndex> {
    AngularIndex::up_to(3)
}

fn smooth_state(ix: AngularIndex, grid: RadialGrid, seed: f64) -> RadialPair {
    let lp = ix.orbital(dirac_core::angular::Sign::Plus) as i32;
    let lm = ix.orbital(dirac_core::angular::Sign::Minus) as i32;
    RadialPair::from_fn(ix, grid, |r| {
        let e = (-(r / 1.3).powi(2)).exp();
        (
            C64::new(r.powi(lp + 1) * e, seed * r.powi(lp + 1) * e * r),
            C64::new(seed * r.powi(lm + 1) * e, -r.powi(lm + 1) * e * 0.7),
        )
    })
}

fn random_state(ix: AngularIndex, grid: RadialGrid, vals: &[(f64, f64, f64, f64)]) -> RadialPair {
    let n = grid.len();
    let mut plus = vec![C64::new(0.0, 0.0); n];
    let mut minus = vec![C64::new(0.0, 0.0); n];
    for (i, v) in vals.iter().enumerate().take(n - 2) {
        plus[i + 1] = C64::new(v.0, v.1);
        minus[i + 1] = C64::new(v.2, v.3);
    }
    RadialPair::new(ix, grid, plus, minus).unwrap()
}

fn potential(grid: RadialGrid) -> PotentialSpec {
    PotentialSpec::from_profile(grid, PotentialProfile::Gaussian { v1: 0.4, v2: -0.3, width: 2.0 }, 2.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduced_operator_is_hermitian(
        vals in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 62),
        wals in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 62),
        which in 0usize..12,
    ) {
        let grid = RadialGrid::new(5.0, 64).unwrap();
        let ix = channels()[which];
        let pot = potential(grid);
        let u = random_state(ix, grid, &vals);
        let v = random_state(ix, grid, &wals);
        for p in [None, Some(&pot)] {
            let lhs = d_apply(&u, p).unwrap().inner(&v).unwrap();
            let rhs = u.inner(&d_apply(&v, p).unwrap()).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn kappa_flip_conjugates_operator(
        vals in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 62),
        which in 0usize..12,
    ) {
        // swap (u+, u-), k -> -k, V -> -V gives -d exactly
        let grid = RadialGrid::new(5.0, 64).unwrap();
        let ix = channels()[which];
        let flipped = AngularIndex::new(ix.two_j(), ix.two_mj(), -ix.kappa()).unwrap();
        let pot = potential(grid);
        let neg = PotentialSpec::new(
            grid,
            pot.v1().iter().map(|v| -v).collect(),
            pot.v2().iter().map(|v| -v).collect(),
            2.0,
            1.0,
        ).unwrap();
        let u = random_state(ix, grid, &vals);
        let swapped = RadialPair::new(flipped, grid, u.minus().to_vec(), u.plus().to_vec()).unwrap();
        let a = d_apply(&u, Some(&pot)).unwrap();
        let b = d_apply(&swapped, Some(&neg)).unwrap();
        for i in 0..64 {
            prop_assert_eq!(a.plus()[i], -b.minus()[i]);
            prop_assert_eq!(a.minus()[i], -b.plus()[i]);
        }
    }
}

#[test]
fn zero_state_maps_to_zero() {
    let grid = RadialGrid::new(5.0, 64).unwrap();
    let z = RadialPair::zeros(idx(1, 1), grid);
    assert_eq!(d_apply(&z, Some(&potential(grid))).unwrap().norm(), 0.0);
    assert_eq!(reduced_hs_norm(&z, 0).unwrap(), 0.0);
    assert_eq!(reduced_hs_norm(&z, 1).unwrap(), 0.0);
    assert!(reduced_hs_norm(&z, 2).is_err());
}

#[test]
fn reconstruction_is_an_isometry() {
    let grid = RadialGrid::new(6.0, 120).unwrap();
    let sphere = Arc::new(SphereGrid::new(ThetaRule::GaussLegendre, 16, 32).unwrap());
    for ix in channels() {
        let s = smooth_state(ix, grid, 0.4);
        let f = reconstruct(&s, sphere.clone());
        assert!((f.norm() / s.norm() - 1.0).abs() < 1e-8, "{ix}");
    }
}

#[test]
fn reconstruction_of_upper_channel_example() {
    let grid = RadialGrid::new(6.0, 32).unwrap();
    let sphere = Arc::new(SphereGrid::new(ThetaRule::GaussLegendre, 8, 16).unwrap());
    let ix = idx(1, -1);
    let s = RadialPair::from_fn(ix, grid, |r| (C64::from(r * (-r).exp()), C64::new(0.0, 0.0)));
    let f = reconstruct(&s, sphere.clone());
    let c = 0.5 / std::f64::consts::PI.sqrt();
    for (n, v) in f.values().iter().enumerate() {
        let i = n / sphere.len();
        let r = grid.node(i);
        let want = C64::new(0.0, c * s.plus()[i].re / r);
        assert!((v[0] - want).norm() < 1e-15);
        assert_eq!(v[1], C64::new(0.0, 0.0));
        assert_eq!(v[2], C64::new(0.0, 0.0));
        assert_eq!(v[3], C64::new(0.0, 0.0));
    }
}

#[test]
fn projection_round_trips_and_separates_channels() {
    let grid = RadialGrid::new(6.0, 60).unwrap();
    let sphere = Arc::new(SphereGrid::new(ThetaRule::GaussLegendre, 16, 32).unwrap());
    let s = smooth_state(idx(1, 1), grid, 0.3);
    let other = smooth_state(AngularIndex::new(3, -1, -2).unwrap(), grid, -0.8);

    let (back, res) = project(&reconstruct(&s, sphere.clone()), s.idx()).unwrap();
    assert!(back.distance(&s).unwrap() < 1e-8 * s.norm());
    assert!(res < 1e-8 * s.norm());

    let (zero, res) = project(&reconstruct(&other, sphere.clone()), s.idx()).unwrap();
    assert!(zero.norm() < 1e-10);
    assert!((res / other.norm() - 1.0).abs() < 1e-8);

    let sum = reconstruct(&s, sphere.clone()).add(&reconstruct(&other, sphere.clone())).unwrap();
    let (mixed, res) = project(&sum, s.idx()).unwrap();
    assert!(mixed.distance(&s).unwrap() < 1e-8 * s.norm());
    assert!((res / other.norm() - 1.0).abs() < 1e-8);
}

#[test]
fn reduced_h1_matches_gaussian_gradient() {
    // g(r) = r exp(-r^2): ||grad exp(-r^2)||^2 / (4 pi) = 3 sqrt(pi) / (8 sqrt 2)
    let exact = (3.0 * std::f64::consts::PI.sqrt() / (8.0 * 2f64.sqrt())).sqrt();
    let grid = RadialGrid::new(8.0, 400).unwrap();
    let s = RadialPair::from_fn(idx(1, -1), grid, |r| (C64::from(r * (-r * r).exp()), C64::new(0.0, 0.0)));
    let got = reduced_hs_norm(&s, 1).unwrap();
    assert!((got / exact - 1.0).abs() < 0.01, "{got} vs {exact}");
}

#[test]
fn reduced_h1_scaling() {
    // g_lambda(r) = lambda^{1/2} g(lambda r) keeps L^2(dr) and scales Hdot^1 by lambda
    let grid = RadialGrid::new(16.0, 1600).unwrap();
    let ix = idx(1, 1);
    let base = |lam: f64| {
        RadialPair::from_fn(ix, grid, move |r| {
            let x = lam * r;
            (C64::from(lam.sqrt() * x * x * (-x * x).exp()), C64::from(lam.sqrt() * x * (-x * x).exp()))
        })
    };
    let n1 = reduced_hs_norm(&base(1.0), 1).unwrap();
    for lam in [0.5, 2.0] {
        let s = base(lam);
        assert!((s.norm() / base(1.0).norm() - 1.0).abs() < 1e-3);
        let got = reduced_hs_norm(&s, 1).unwrap() / n1;
        assert!((got / lam - 1.0).abs() < 0.01, "lambda {lam}: {got}");
    }
}

/// Reduced operator against `-i alpha . grad` applied spectrally on a box.
fn consistency_error(n_radial: usize) -> f64 {
    let grid = RadialGrid::new(6.0, n_radial).unwrap();
    let ix = idx(1, 1);
    let s = smooth_state(ix, grid, 0.5);
    let box_grid = CartesianGrid::new(64, 8.0).unwrap();
    let field = apply_dirac(&reconstruct_cartesian(&s, box_grid));
    let (reduced, _) = channel_projection(&field, ix, grid).unwrap();
    let local = d_apply(&s, None).unwrap();
    // compare away from the outer edge where the box sampling is clean
    let cut = n_radial * 3 / 4;
    let err: f64 = (0..cut)
        .map(|i| (reduced.plus()[i] - local.plus()[i]).norm_sqr() + (reduced.minus()[i] - local.minus()[i]).norm_sqr())
        .sum();
    (err * grid.h()).sqrt()
}

#[test]
fn reduced_operator_is_consistent_with_3d_operator() {
    let errs: Vec<f64> = [24, 48, 96].iter().map(|&n| consistency_error(n)).collect();
    println!("consistency errors {errs:?}");
    let order = (errs[0] / errs[1]).log2();
    assert!(order >= 1.8, "errors {errs:?}");
    assert!(errs[2] < errs[1]);
}
