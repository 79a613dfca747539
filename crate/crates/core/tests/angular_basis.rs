use std::f64::consts::PI;
use std::sync::Arc;

use dirac_core::algebra::{alpha, alpha_dot, beta, Spinor4};
use dirac_core::angular::{
    alpha_radial_action, apply_angular_op, inner_s2, lowest_closed_form, phi, unit_vector, AngularIndex, AngularOp, Sign,
    SphereField, SphereGrid, ThetaRule,
};
use dirac_core::C64;
use proptest::prelude::*;

fn basis(max_two_j: u32) -> Vec<(Sign, AngularIndex)> {
    AngularIndex::up_to(max_two_j)
        .into_iter()
        .flat_map(|ix| [(Sign::Plus, ix), (Sign::Minus, ix)])
        .collect()
}

fn gram_error(max_two_j: u32) -> f64 {
    let grid = Arc::new(SphereGrid::new(ThetaRule::GaussLegendre, 64, 128).unwrap());
    let fields: Vec<SphereField> = basis(max_two_j).iter().map(|(s, ix)| SphereField::basis(grid.clone(), *s, ix)).collect();
    let mut worst: f64 = 0.0;
    for (a, fa) in fields.iter().enumerate() {
        for (b, fb) in fields.iter().enumerate() {
            let g = inner_s2(fa, fb).unwrap();
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - want).norm());
        }
    }
    worst
}

#[test]
fn gram_matrix_up_to_three_halves() {
    assert_eq!(basis(3).len(), 24);
    let err = gram_error(3);
    assert!(err < 1e-10, "{err}");
}

#[test]
fn gram_matrix_up_to_five_halves() {
    let err = gram_error(5);
    assert!(err < 1e-10, "{err}");
}

#[test]
fn harmonic_quadrature_norm() {
    let grid = Arc::new(SphereGrid::standard());
    let f = SphereField::from_fn(grid, |t, p| {
        let y = dirac_core::special::sph_harm(1, 0, t, p).unwrap();
        Spinor4::new(y, 0.0.into(), 0.0.into(), 0.0.into())
    });
    assert!((inner_s2(&f, &f).unwrap().re - 1.0).abs() < 1e-12);
}

#[test]
fn beta_and_radial_alpha_in_the_pair_basis() {
    // beta ~ diag(1, -1) and -i alpha.xhat ~ ((0, -1), (1, 0)) on {Phi+, Phi-}
    for ix in AngularIndex::up_to(3) {
        for &(t, p) in &[(0.3, 0.1), (1.7, 2.2), (2.6, 4.9)] {
            let pp = phi(Sign::Plus, &ix, t, p);
            let pm = phi(Sign::Minus, &ix, t, p);
            assert!((beta() * pp - pp).norm() < 1e-15);
            assert!((beta() * pm + pm).norm() < 1e-15);
            let m = alpha_dot(&unit_vector(t, p)) * C64::new(0.0, -1.0);
            assert!((m * pp - pm).norm() < 1e-14);
            assert!((m * pm + pp).norm() < 1e-14);
        }
    }
}

proptest! {
    #[test]
    fn lowest_functions_match_closed_forms(t in 0.0..PI, p in 0.0..(2.0 * PI)) {
        for ix in AngularIndex::lowest() {
            for s in [Sign::Plus, Sign::Minus] {
                let want = lowest_closed_form(s, &ix, t, p).unwrap();
                prop_assert!((phi(s, &ix, t, p) - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn radial_alpha_swaps_pair(t in 0.0..PI, p in 0.0..(2.0 * PI)) {
        let ix = AngularIndex::new(1, 1, 1).unwrap();
        let a = alpha_dot(&unit_vector(t, p)) * C64::i();
        for s in [Sign::Plus, Sign::Minus] {
            let (img, c) = alpha_radial_action(s, &ix);
            let err = (a * phi(s, &ix, t, p) - phi(img, &ix, t, p) * C64::from(c)).norm();
            prop_assert!(err < 1e-14);
        }
    }

    #[test]
    fn unit_norm_pointwise_for_lowest(t in 0.0..PI, p in 0.0..(2.0 * PI)) {
        for ix in AngularIndex::lowest() {
            for s in [Sign::Plus, Sign::Minus] {
                let n2 = phi(s, &ix, t, p).norm_squared();
                prop_assert!((n2 - 1.0 / (4.0 * PI)).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn alpha_matrices_hermitian_structure_used_by_basis() {
    for k in 1..=3 {
        assert_eq!(alpha(k).adjoint(), alpha(k));
    }
}

fn eigen_error(op: AngularOp, sign: Sign, ix: &AngularIndex, ntheta: usize) -> f64 {
    let grid = Arc::new(SphereGrid::new(ThetaRule::Uniform, ntheta, 16).unwrap());
    let f = SphereField::basis(grid, sign, ix);
    let eig = match op {
        AngularOp::K => -(ix.kappa() as f64),
        AngularOp::J2 => ix.j() * (ix.j() + 1.0),
        AngularOp::J3 => ix.mj(),
        _ => unreachable!(),
    };
    let out = apply_angular_op(op, &f).unwrap();
    let diff = SphereField::from_values(
        f.grid().clone(),
        out.values().iter().zip(f.values()).map(|(a, b)| a - b * C64::from(eig)).collect(),
    )
    .unwrap();
    diff.norm()
}

#[test]
fn eigenrelations_converge_at_second_order() {
    let levels = [16, 32, 64, 128];
    for ix in AngularIndex::lowest() {
        for sign in [Sign::Plus, Sign::Minus] {
            for op in [AngularOp::K, AngularOp::J2, AngularOp::J3] {
                let errs: Vec<f64> = levels.iter().map(|&n| eigen_error(op, sign, &ix, n)).collect();
                if errs.iter().all(|e| *e < 1e-12) {
                    continue;
                }
                let order = (errs[2] / errs[3]).log2();
                assert!(order >= 1.8, "{op:?} {sign} {ix}: errors {errs:?}");
            }
        }
    }
}
