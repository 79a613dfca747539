use dirac_core::analysis::{
    endpoint_ratio, hs_norm, interpol_ratio, maximal, maximal_bound_ratio, mixed_norm_states, nonhom_ratio,
    smoothing_ratio, MixedNorm, WeightSpec,
};
use dirac_core::angular::{AngularIndex, Sign};
use dirac_core::evolution::TimeGrid;
use dirac_core::radial::{RadialGrid, RadialPair};
use dirac_core::C64;
use proptest::prelude::*;

const DILATIONS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

fn s_wave() -> AngularIndex {
    AngularIndex::new(1, 1, -1).unwrap()
}

/// Reduced form of `lambda^{1/2} f(lambda x)` for the Gaussian `f = exp(-|x|^2)`.
fn dilate(grid: RadialGrid, lam: f64) -> RadialPair {
    RadialPair::from_fn(s_wave(), grid, |r| {
        let x = lam * r;
        (C64::from(x * (-x * x).exp() / lam.sqrt()), C64::new(0.0, 0.0))
    })
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::MIN, f64::max);
    let min = v.iter().cloned().fold(f64::MAX, f64::min);
    (max - min) / min
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn plancherel_for_smooth_states(
        a in -1.0..1.0f64, b in -1.0..1.0f64, w in 0.6..1.6f64, which in 0usize..4,
    ) {
        let idx = AngularIndex::lowest()[which];
        let lp = idx.orbital(Sign::Plus) as i32;
        let lm = idx.orbital(Sign::Minus) as i32;
        let s = RadialPair::from_fn(idx, RadialGrid::new(16.0, 256).unwrap(), |r| {
            let e = (-(r / w).powi(2)).exp();
            (C64::new(a, 1.0) * r.powi(lp + 1) * e, C64::new(b, -0.5) * r.powi(lm + 1) * e)
        });
        let n = hs_norm(&s, 0.0).unwrap();
        prop_assert!((n.value / s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn maximal_function_is_homogeneous_and_dominates_windows(
        g in proptest::collection::vec(-5.0..5.0f64, 8..60),
        c in -4.0..4.0f64,
        centre in 0usize..60,
        half in 0usize..20,
    ) {
        let dx = 0.1;
        let centre = centre % g.len();
        let t = centre as f64 * dx;
        let scaled: Vec<f64> = g.iter().map(|v| c * v).collect();
        let m = maximal(&g, dx, 0.0, t);
        prop_assert!((maximal(&scaled, dx, 0.0, t) - c.abs() * m).abs() <= 1e-12 * (1.0 + m));
        let lo = centre.saturating_sub(half);
        let hi = (centre + half + 1).min(g.len());
        let avg = g[lo..hi].iter().map(|v| v.abs()).sum::<f64>() / (2 * half + 1) as f64;
        prop_assert!(m >= avg - 1e-12);
    }
}

#[test]
fn constant_trajectory_mixed_norm() {
    // sup_x of a j = 1/2 state is max |u| / (2 sqrt(pi) r); pick u = 2 sqrt(pi) a r
    let a = 0.7;
    let grid = RadialGrid::new(4.0, 64).unwrap();
    let s = RadialPair::from_fn(s_wave(), grid, |r| (C64::from(2.0 * std::f64::consts::PI.sqrt() * a * r), C64::new(0.0, 0.0)));
    let t = 3.0;
    let states = vec![s; 31];
    let got = mixed_norm_states(&states, t / 30.0, MixedNorm::L2tLinfx);
    assert!((got - a * t.sqrt()).abs() < 1e-12, "{got}");
}

#[test]
fn homogeneous_h1_scaling() {
    // ||f(lambda .)||_{Hdot^1} = lambda^{-1/2} ||f||_{Hdot^1} in three dimensions
    let grid = RadialGrid::new(40.0, 2048).unwrap();
    let base = hs_norm(&dilate(grid, 1.0), 1.0).unwrap().value;
    for lam in DILATIONS {
        let plain = dilate(grid, lam).scaled(C64::from(lam.sqrt().recip()));
        let got = hs_norm(&plain, 1.0).unwrap().value / base;
        assert!((got * lam.sqrt() - 1.0).abs() < 0.01, "lambda {lam}: {got}");
    }
}

#[test]
fn interpolation_endpoints() {
    let grid = RadialGrid::new(20.0, 512).unwrap();
    let mut k1 = Vec::new();
    for lam in DILATIONS {
        let f = dilate(grid, lam);
        let r0 = interpol_ratio(&f, 0).unwrap();
        assert!((r0.ratio - 1.0).abs() < 1e-8, "lambda {lam}: {}", r0.ratio);
        k1.push(interpol_ratio(&f, 1).unwrap().ratio);
    }
    println!("k = 1 ratios {k1:?}");
    assert!(k1.iter().all(|r| r.is_finite() && *r < 2.0));
}

#[test]
fn maximal_bound_for_gaussian_data() {
    let grid = RadialGrid::new(12.0, 256).unwrap();
    let r = maximal_bound_ratio(&dilate(grid, 1.0), 4.0).unwrap();
    println!("maximal bound ratio {:.4}", r.ratio);
    assert!(!r.degenerate);
    assert!(r.ratio <= 1.1);
    assert!(interpol_ratio(&RadialPair::zeros(s_wave(), grid), 0).unwrap().degenerate);
}

#[test]
fn estimate_ratios_stay_bounded_over_dilations() {
    let grid = RadialGrid::new(40.0, 1024).unwrap();
    let weight = WeightSpec::default();
    let (mut end, mut smooth, mut nonhom) = (Vec::new(), Vec::new(), Vec::new());
    for lam in DILATIONS {
        let f = dilate(grid, lam);
        let t = 2.0 / lam;
        let tg = TimeGrid::new(t, (t / grid.h()).round() as usize).unwrap();
        end.push(endpoint_ratio(&f, None, tg).unwrap().ratio);
        smooth.push(smoothing_ratio(&f, None, tg, &weight).unwrap().ratio);
        let short = TimeGrid::new(t, 40).unwrap();
        let forcing: Vec<RadialPair> = short.times().iter().map(|s| f.scaled(C64::from((lam * s).cos()))).collect();
        nonhom.push(nonhom_ratio(&forcing, None, short, &weight).unwrap().ratio);
    }
    println!("endpoint {end:?}\nsmoothing {smooth:?}\nnonhom {nonhom:?}");
    assert!(spread(&end) < 0.05);
    for v in end.iter().chain(&smooth).chain(&nonhom) {
        assert!(v.is_finite() && *v > 0.0 && *v < 10.0);
    }
}
