//! Cubic nonlinearities `<u,u>u` and `<beta u,u>u`, in 3D and reduced form.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::Spinor4;
use crate::angular::SphereGrid;
use crate::radial::{project, reconstruct, ProductField, RadialPair};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NonlinearityKind {
    /// `F(u) = <u,u> u`.
    F1,
    /// `F(u) = <beta u,u> u`.
    F2,
}

impl fmt::Display for NonlinearityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NonlinearityKind::F1 => "F1",
            NonlinearityKind::F2 => "F2",
        })
    }
}

impl FromStr for NonlinearityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(NonlinearityKind::F1),
            "f2" => Ok(NonlinearityKind::F2),
            other => Err(Error::InvalidArgument(format!("unknown nonlinearity `{other}`"))),
        }
    }
}

/// The real scalar multiplying `u`: `<u,u>` or `<beta u,u>` (sesquilinear).
pub fn density(u: &Spinor4, kind: NonlinearityKind) -> f64 {
    let upper = u[0].norm_sqr() + u[1].norm_sqr();
    let lower = u[2].norm_sqr() + u[3].norm_sqr();
    match kind {
        NonlinearityKind::F1 => upper + lower,
        NonlinearityKind::F2 => upper - lower,
    }
}

pub fn f_full_point(u: &Spinor4, kind: NonlinearityKind) -> Spinor4 {
    u * C64::from(density(u, kind))
}

pub fn f_full(field: &ProductField, kind: NonlinearityKind) -> ProductField {
    field.map(|u| f_full_point(u, kind))
}

/// `c(r_i)` with `F(reconstruct(u)) = reconstruct(c u)` on `j = 1/2`
/// channels: `(|u+|^2 +- |u-|^2) / (4 pi r^2)`.
pub fn reduced_scalar(state: &RadialPair, kind: NonlinearityKind) -> Vec<f64> {
    let grid = state.grid();
    state
        .plus()
        .iter()
        .zip(state.minus())
        .enumerate()
        .map(|(i, (p, m))| {
            let r = grid.node(i);
            let s = match kind {
                NonlinearityKind::F1 => p.norm_sqr() + m.norm_sqr(),
                NonlinearityKind::F2 => p.norm_sqr() - m.norm_sqr(),
            };
            s / (4.0 * PI * r * r)
        })
        .collect()
}

/// Reduced nonlinearity; only `j = 1/2` channels are invariant.
pub fn f_reduced(state: &RadialPair, kind: NonlinearityKind) -> Result<RadialPair> {
    if !state.idx().is_lowest() {
        return Err(Error::UnsupportedIndex(format!(
            "reduced nonlinearity needs j = 1/2, got {}",
            state.idx()
        )));
    }
    let c = reduced_scalar(state, kind);
    let plus = state.plus().iter().zip(&c).map(|(u, c)| u * c).collect();
    let minus = state.minus().iter().zip(&c).map(|(u, c)| u * c).collect();
    RadialPair::new(state.idx(), state.grid(), plus, minus)
}

/// Off-channel part of `F(reconstruct(state))`, relative to the norm of
/// `F(reconstruct(state))` (zero when that norm vanishes).
///
/// Any channel is accepted; only `j = 1/2` is expected to give a
/// quadrature-level residual.
pub fn invariance_residual(state: &RadialPair, kind: NonlinearityKind, sphere: Arc<SphereGrid>) -> Result<f64> {
    let field = f_full(&reconstruct(state, sphere), kind);
    let total = field.norm();
    if total == 0.0 {
        return Ok(0.0);
    }
    let (_, residual) = project(&field, state.idx())?;
    Ok(residual / total)
}

/// Largest relative variance over the sphere of the density `<u,u>` or
/// `<beta u,u>` of `reconstruct(state)`, taken over radial nodes.
pub fn angular_variance(state: &RadialPair, kind: NonlinearityKind, sphere: Arc<SphereGrid>) -> f64 {
    let field = reconstruct(state, sphere.clone());
    let m = sphere.len();
    let area = 4.0 * PI;
    let mut worst: f64 = 0.0;
    for shell in field.values().chunks(m) {
        let vals: Vec<f64> = shell.iter().map(|u| density(u, kind)).collect();
        let mean = (0..m).map(|n| sphere.weight(n) * vals[n]).sum::<f64>() / area;
        if mean == 0.0 {
            continue;
        }
        let var = (0..m).map(|n| sphere.weight(n) * (vals[n] - mean).powi(2)).sum::<f64>() / area;
        worst = worst.max(var / (mean * mean));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::AngularIndex;
    use crate::radial::RadialGrid;

    fn spinor(a: [f64; 4]) -> Spinor4 {
        Spinor4::new(a[0].into(), a[1].into(), a[2].into(), a[3].into())
    }

    #[test]
    fn pointwise_examples() {
        let up = spinor([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(f_full_point(&up, NonlinearityKind::F1), up);
        assert_eq!(f_full_point(&up, NonlinearityKind::F2), up);
        let low = spinor([0.0, 0.0, 1.0, 0.0]);
        assert_eq!(f_full_point(&low, NonlinearityKind::F2), -low);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("F1".parse::<NonlinearityKind>().unwrap(), NonlinearityKind::F1);
        assert_eq!("f2".parse::<NonlinearityKind>().unwrap(), NonlinearityKind::F2);
        assert!("F3".parse::<NonlinearityKind>().is_err());
    }

    #[test]
    fn reduced_kinds_agree_without_minus_component() {
        let idx = AngularIndex::new(1, 1, 1).unwrap();
        let g = RadialGrid::new(5.0, 32).unwrap();
        let s = RadialPair::from_fn(idx, g, |r| (C64::new(r, 0.5 * r), C64::new(0.0, 0.0)));
        assert_eq!(f_reduced(&s, NonlinearityKind::F1).unwrap(), f_reduced(&s, NonlinearityKind::F2).unwrap());
    }

    #[test]
    fn higher_channels_rejected() {
        let idx = AngularIndex::new(3, 1, 2).unwrap();
        let g = RadialGrid::new(5.0, 32).unwrap();
        let s = RadialPair::zeros(idx, g);
        assert!(matches!(f_reduced(&s, NonlinearityKind::F1), Err(Error::UnsupportedIndex(_))));
    }
}
