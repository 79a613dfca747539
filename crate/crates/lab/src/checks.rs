//! Measurements behind the `verify` suite. Each function returns the raw
//! error or order; thresholds are applied by the caller.

use std::f64::consts::PI;
use std::sync::Arc;

use dirac_core::algebra::{alpha_dot, clifford_report};
use dirac_core::angular::{
    alpha_radial_action, apply_angular_op, inner_s2, lowest_closed_form, phi, unit_vector, AngularIndex, AngularOp,
    Sign, SphereField, SphereGrid, ThetaRule,
};
use dirac_core::evolution::cayley_step;
use dirac_core::nonlinear::{f_full, f_reduced, invariance_residual, NonlinearityKind};
use dirac_core::radial::{d_apply, project, reconstruct, PotentialProfile, PotentialSpec, RadialGrid, RadialPair};
use dirac_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::LabResult;

pub const KINDS: [NonlinearityKind; 2] = [NonlinearityKind::F1, NonlinearityKind::F2];
pub const THETA_LEVELS: [usize; 4] = [16, 32, 64, 128];

pub struct CliffordSummary {
    pub checks: usize,
    pub exact_checks: usize,
    /// Largest error among the identities that must hold exactly.
    pub max_error: f64,
    pub failures: Vec<String>,
}

pub fn clifford() -> CliffordSummary {
    let r = clifford_report();
    CliffordSummary {
        checks: r.checks.len(),
        exact_checks: r.checks.iter().filter(|c| c.exact).count(),
        max_error: r.checks.iter().filter(|c| c.exact).map(|c| c.max_abs_error).fold(0.0, f64::max),
        failures: r.failures().map(|c| c.name.clone()).collect(),
    }
}

fn basis_pairs(max_two_j: u32) -> Vec<(Sign, AngularIndex)> {
    AngularIndex::up_to(max_two_j).into_iter().flat_map(|ix| [(Sign::Plus, ix), (Sign::Minus, ix)]).collect()
}

/// Largest entry of `G - I` for every basis function with `2j <= max_two_j`;
/// also returns the number of functions.
pub fn gram_error(max_two_j: u32, ntheta: usize, nphi: usize) -> LabResult<(usize, f64)> {
    let grid = Arc::new(SphereGrid::new(ThetaRule::GaussLegendre, ntheta, nphi)?);
    let fields: Vec<SphereField> =
        basis_pairs(max_two_j).iter().map(|(s, ix)| SphereField::basis(grid.clone(), *s, ix)).collect();
    let mut worst: f64 = 0.0;
    for (a, fa) in fields.iter().enumerate() {
        for (b, fb) in fields.iter().enumerate().skip(a) {
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((inner_s2(fa, fb)? - want).norm());
        }
    }
    Ok((fields.len(), worst))
}

fn sphere_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n).map(|_| (rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))).collect()
}

/// Pointwise distance between the j = 1/2 basis and its closed forms.
pub fn closed_form_error(seed: u64, samples: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for (t, p) in sphere_points(&mut rng, samples) {
        for ix in AngularIndex::lowest() {
            for s in [Sign::Plus, Sign::Minus] {
                let want = lowest_closed_form(s, &ix, t, p).expect("lowest channel");
                worst = worst.max((phi(s, &ix, t, p) - want).norm());
            }
        }
    }
    worst
}

/// Pointwise error of `i (alpha . xhat) Phi^(+-) = -+ Phi^(-+)`.
pub fn alpha_action_error(seed: u64, samples: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for (t, p) in sphere_points(&mut rng, samples) {
        let a = alpha_dot(&unit_vector(t, p)) * C64::i();
        for ix in AngularIndex::up_to(3) {
            for s in [Sign::Plus, Sign::Minus] {
                let (img, c) = alpha_radial_action(s, &ix);
                let want = if s == Sign::Plus { -1.0 } else { 1.0 };
                if img != s.flip() || c != want {
                    return f64::INFINITY;
                }
                worst = worst.max((a * phi(s, &ix, t, p) - phi(img, &ix, t, p) * C64::from(c)).norm());
            }
        }
    }
    worst
}

fn eigenvalue(op: AngularOp, ix: &AngularIndex) -> f64 {
    match op {
        AngularOp::K => -(ix.kappa() as f64),
        AngularOp::J2 => ix.j() * (ix.j() + 1.0),
        AngularOp::J3 => ix.mj(),
        AngularOp::L2 | AngularOp::SdotL => unreachable!("not an eigenrelation of the pair basis"),
    }
}

/// Discrete error of `op Phi = eigenvalue Phi` on a uniform theta grid.
pub fn eigen_error(op: AngularOp, sign: Sign, ix: &AngularIndex, ntheta: usize) -> LabResult<f64> {
    let grid = Arc::new(SphereGrid::new(ThetaRule::Uniform, ntheta, 16)?);
    let f = SphereField::basis(grid, sign, ix);
    let out = apply_angular_op(op, &f)?;
    let lam = C64::from(eigenvalue(op, ix));
    let diff = SphereField::from_values(
        f.grid().clone(),
        out.values().iter().zip(f.values()).map(|(a, b)| a - b * lam).collect(),
    )?;
    Ok(diff.norm())
}

pub struct EigenStudy {
    pub label: String,
    pub errors: Vec<f64>,
    /// `None` when every error is at round-off level.
    pub order: Option<f64>,
}

/// Eigenrelation errors for every j = 1/2 basis function under theta
/// refinement; the order is taken from the two finest levels.
pub fn eigen_studies(ops: &[AngularOp]) -> LabResult<Vec<EigenStudy>> {
    let mut out = Vec::new();
    for ix in AngularIndex::lowest() {
        for sign in [Sign::Plus, Sign::Minus] {
            for &op in ops {
                let errors =
                    THETA_LEVELS.iter().map(|&n| eigen_error(op, sign, &ix, n)).collect::<LabResult<Vec<f64>>>()?;
                let n = errors.len();
                let order = if errors.iter().all(|e| *e < 1e-12) {
                    None
                } else {
                    Some((errors[n - 2] / errors[n - 1]).log2())
                };
                out.push(EigenStudy { label: format!("{op:?} Phi{sign} {ix}"), errors, order });
            }
        }
    }
    Ok(out)
}

/// Smooth state with random coefficients and the origin behaviour of its
/// channel.
pub fn random_smooth_state(idx: AngularIndex, grid: RadialGrid, rng: &mut ChaCha8Rng) -> RadialPair {
    let mut coeff = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let (a, b, c, d) = (coeff(), coeff(), coeff(), coeff());
    let lp = idx.orbital(Sign::Plus) as i32;
    let lm = idx.orbital(Sign::Minus) as i32;
    RadialPair::from_fn(idx, grid, |r| {
        let e = (-(r / 1.5).powi(2)).exp();
        (r.powi(lp + 1) * e * (a + b * r * r), r.powi(lm + 1) * e * (c + d * r * r))
    })
}

pub struct InvarianceRow {
    pub idx: AngularIndex,
    pub kind: NonlinearityKind,
    pub residual: f64,
    /// `||project(F(reconstruct s)) - F_reduced(s)|| / ||F_reduced(s)||`.
    pub reduction_error: f64,
}

pub fn invariance_table(seed: u64, sphere: Arc<SphereGrid>) -> LabResult<Vec<InvarianceRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = RadialGrid::new(6.0, 64)?;
    let mut rows = Vec::new();
    for idx in AngularIndex::lowest() {
        let s = random_smooth_state(idx, grid, &mut rng);
        for kind in KINDS {
            let residual = invariance_residual(&s, kind, sphere.clone())?;
            let (p, _) = project(&f_full(&reconstruct(&s, sphere.clone()), kind), idx)?;
            let want = f_reduced(&s, kind)?;
            let reduction_error = p.distance(&want)? / want.norm();
            rows.push(InvarianceRow { idx, kind, residual, reduction_error });
        }
    }
    Ok(rows)
}

fn test_potential(grid: RadialGrid) -> LabResult<PotentialSpec> {
    Ok(PotentialSpec::from_profile(grid, PotentialProfile::Gaussian { v1: 0.4, v2: -0.3, width: 2.0 }, 2.0, 1.0)?)
}

fn random_grid_state(idx: AngularIndex, grid: RadialGrid, rng: &mut ChaCha8Rng) -> RadialPair {
    let mut draw = |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let plus = (0..grid.len()).map(&mut draw).collect();
    let minus = (0..grid.len()).map(&mut draw).collect();
    RadialPair::new(idx, grid, plus, minus).expect("sized to the grid")
}

/// `max |<d u, v> - <u, d v>|` over random grid states of every channel with
/// `j <= 3/2`, with and without a potential.
pub fn hermiticity_defect(seed: u64) -> LabResult<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = RadialGrid::new(5.0, 64)?;
    let pot = test_potential(grid)?;
    let mut worst: f64 = 0.0;
    for idx in AngularIndex::up_to(3) {
        let u = random_grid_state(idx, grid, &mut rng);
        let v = random_grid_state(idx, grid, &mut rng);
        for p in [None, Some(&pot)] {
            let lhs = d_apply(&u, p)?.inner(&v)?;
            let rhs = u.inner(&d_apply(&v, p)?)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Relative norm change of one Cayley step on random grid states.
pub fn cayley_unitarity_defect(seed: u64) -> LabResult<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = RadialGrid::new(8.0, 64)?;
    let pot = test_potential(grid)?;
    let mut worst: f64 = 0.0;
    for idx in AngularIndex::up_to(3) {
        let u = random_grid_state(idx, grid, &mut rng);
        let dt = rng.gen_range(0.001..2.0);
        let next = cayley_step(&u, Some(&pot), dt)?;
        worst = worst.max((next.norm() / u.norm() - 1.0).abs());
    }
    Ok(worst)
}

/// Projection of a reconstructed state back onto its own channel and onto
/// a different one: `(round-trip error, leakage)`, both relative.
pub fn projection_errors(seed: u64) -> LabResult<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = RadialGrid::new(6.0, 60)?;
    let sphere = Arc::new(SphereGrid::new(ThetaRule::GaussLegendre, 16, 32)?);
    let mut round_trip: f64 = 0.0;
    let mut leakage: f64 = 0.0;
    let channels = AngularIndex::up_to(3);
    for (n, &idx) in channels.iter().enumerate() {
        let s = random_smooth_state(idx, grid, &mut rng);
        let field = reconstruct(&s, sphere.clone());
        let (back, _) = project(&field, idx)?;
        round_trip = round_trip.max(back.distance(&s)? / s.norm());
        let other = channels[(n + 1) % channels.len()];
        let (zero, _) = project(&field, other)?;
        leakage = leakage.max(zero.norm() / s.norm());
    }
    Ok((round_trip, leakage))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_measurements() {
        assert!(clifford().failures.is_empty());
        assert!(closed_form_error(1, 5) < 1e-14);
        assert!(alpha_action_error(1, 5) < 1e-14);
        assert!(hermiticity_defect(2).unwrap() < 1e-12);
        assert!(cayley_unitarity_defect(3).unwrap() < 1e-13);
        let (rt, leak) = projection_errors(4).unwrap();
        assert!(rt < 1e-8 && leak < 1e-10, "{rt} {leak}");
    }
}
