//! Radial grids, partial-wave states `(u+, u-)`, the reduced Dirac operator
//! and the maps between reduced and 3D representations.
//!
//! A state in channel `idx` represents the 3D spinor
//! `(u+(r) Phi+(w) + u-(r) Phi-(w)) / r`, so the discrete `L^2(dr)` norm of
//! the pair equals the `L^2(R^3)` norm of the field.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::Spinor4;
use crate::angular::{phi, AngularIndex, Sign, SphereGrid};
use crate::{Error, Result, C64};

/// Uniform cell-centred grid `r_i = (i + 1/2) h` on `(0, R)`, `h = R / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    radius: f64,
    cells: usize,
}

impl RadialGrid {
    pub fn new(radius: f64, cells: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        if cells < 4 {
            return Err(Error::InvalidArgument(format!("need at least 4 radial cells, got {cells}")));
        }
        Ok(RadialGrid { radius, cells })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells == 0
    }

    pub fn h(&self) -> f64 {
        self.radius / self.cells as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.node(i)).collect()
    }

    /// Same domain, `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> RadialGrid {
        RadialGrid { radius: self.radius, cells: self.cells * factor }
    }
}

/// Reflection sign of component `sign` across `r = 0`: a profile of orbital
/// degree `l` behaves like `r^(l+1)` and has parity `(-1)^(l+1)`.
pub fn origin_parity(idx: &AngularIndex, sign: Sign) -> f64 {
    if idx.orbital(sign).is_multiple_of(2) {
        -1.0
    } else {
        1.0
    }
}

/// Coordinates `(u+, u-)` of a state in one partial-wave subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPair {
    idx: AngularIndex,
    grid: RadialGrid,
    plus: Vec<C64>,
    minus: Vec<C64>,
}

impl RadialPair {
    pub fn new(idx: AngularIndex, grid: RadialGrid, plus: Vec<C64>, minus: Vec<C64>) -> Result<Self> {
        if plus.len() != grid.len() || minus.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "profiles of length {} and {} on a grid of {} cells",
                plus.len(),
                minus.len(),
                grid.len()
            )));
        }
        Ok(RadialPair { idx, grid, plus, minus })
    }

    pub fn zeros(idx: AngularIndex, grid: RadialGrid) -> Self {
        let z = vec![C64::new(0.0, 0.0); grid.len()];
        RadialPair { idx, grid, plus: z.clone(), minus: z }
    }

    pub fn from_fn(idx: AngularIndex, grid: RadialGrid, f: impl Fn(f64) -> (C64, C64)) -> Self {
        let (plus, minus) = grid.nodes().into_iter().map(f).unzip();
        RadialPair { idx, grid, plus, minus }
    }

    pub fn idx(&self) -> AngularIndex {
        self.idx
    }

    pub fn grid(&self) -> RadialGrid {
        self.grid
    }

    pub fn plus(&self) -> &[C64] {
        &self.plus
    }

    pub fn minus(&self) -> &[C64] {
        &self.minus
    }

    pub fn component(&self, sign: Sign) -> &[C64] {
        match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }

    pub fn components_mut(&mut self) -> (&mut [C64], &mut [C64]) {
        (&mut self.plus, &mut self.minus)
    }

    pub fn with_index(mut self, idx: AngularIndex) -> Self {
        self.idx = idx;
        self
    }

    fn check_compatible(&self, other: &RadialPair) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("radial grids {:?} and {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    /// `h sum (conj(u+) v+ + conj(u-) v-)`.
    pub fn inner(&self, other: &RadialPair) -> Result<C64> {
        self.check_compatible(other)?;
        let s: C64 = self
            .plus
            .iter()
            .zip(&other.plus)
            .chain(self.minus.iter().zip(&other.minus))
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.h())
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.plus.iter().chain(&self.minus).map(|z| z.norm_sqr()).sum();
        (s * self.grid.h()).sqrt()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: C64, other: &RadialPair, b: C64) -> Result<RadialPair> {
        self.check_compatible(other)?;
        let mix = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        Ok(RadialPair {
            idx: self.idx,
            grid: self.grid,
            plus: mix(&self.plus, &other.plus),
            minus: mix(&self.minus, &other.minus),
        })
    }

    pub fn scaled(&self, a: C64) -> RadialPair {
        RadialPair {
            idx: self.idx,
            grid: self.grid,
            plus: self.plus.iter().map(|z| z * a).collect(),
            minus: self.minus.iter().map(|z| z * a).collect(),
        }
    }

    pub fn distance(&self, other: &RadialPair) -> Result<f64> {
        Ok(self.combine(C64::from(1.0), other, C64::from(-1.0))?.norm())
    }

    /// Pointwise `|u+|^2 + |u-|^2`.
    pub fn density(&self) -> Vec<f64> {
        self.plus.iter().zip(&self.minus).map(|(p, m)| p.norm_sqr() + m.norm_sqr()).collect()
    }

    /// Fraction of the squared norm carried by cells with `r > (1 - frac) R`.
    pub fn outer_mass_fraction(&self, frac: f64) -> f64 {
        let cut = (1.0 - frac) * self.grid.radius;
        let dens = self.density();
        let total: f64 = dens.iter().sum();
        if total == 0.0 {
            return 0.0;
        }
        let outer: f64 = dens.iter().enumerate().filter(|(i, _)| self.grid.node(*i) > cut).map(|(_, d)| d).sum();
        outer / total
    }

    /// Cubic Lagrange interpolation of `(u+, u-)` at radius `r >= 0`, using
    /// the origin parity of each component and zero beyond `R`.
    pub fn sample(&self, r: f64) -> (C64, C64) {
        let h = self.grid.h();
        let x = r / h - 0.5;
        let i0 = x.floor() as isize;
        let t = x - i0 as f64;
        let w = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
        let pp = origin_parity(&self.idx, Sign::Plus);
        let pm = origin_parity(&self.idx, Sign::Minus);
        let n = self.grid.len() as isize;
        let at = |v: &[C64], p: f64, j: isize| -> C64 {
            if j < 0 {
                let m = -1 - j;
                if m < n {
                    v[m as usize] * p
                } else {
                    C64::new(0.0, 0.0)
                }
            } else if j >= n {
                C64::new(0.0, 0.0)
            } else {
                v[j as usize]
            }
        };
        let mut a = C64::new(0.0, 0.0);
        let mut b = C64::new(0.0, 0.0);
        for (k, wk) in w.iter().enumerate() {
            let j = i0 - 1 + k as isize;
            a += at(&self.plus, pp, j) * *wk;
            b += at(&self.minus, pm, j) * *wk;
        }
        (a, b)
    }
}

/// Named radial potential shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PotentialProfile {
    Zero,
    /// `V1 = a exp(-(r/w)^2)`, `V2 = b exp(-(r/w)^2)`.
    Gaussian { v1: f64, v2: f64, width: f64 },
    /// `V1 = fraction * delta / (r^(1/2) |log r|^(sigma/2) + r^sigma)`, `V2 = 0`:
    /// saturates the admissibility bound at `fraction`.
    Critical { fraction: f64 },
}

/// Sampled `V1`, `V2` with the admissibility parameters `sigma`, `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    grid: RadialGrid,
    v1: Vec<f64>,
    v2: Vec<f64>,
    sigma: f64,
    delta: f64,
}

fn admissibility_weight(r: f64, sigma: f64) -> f64 {
    r.sqrt() * r.ln().abs().powf(sigma / 2.0) + r.powf(sigma)
}

/// `w_sigma(r) = r (1 + |log r|)^sigma`.
pub fn w_sigma(r: f64, sigma: f64) -> f64 {
    r * (1.0 + r.ln().abs()).powf(sigma)
}

impl PotentialSpec {
    pub fn new(grid: RadialGrid, v1: Vec<f64>, v2: Vec<f64>, sigma: f64, delta: f64) -> Result<Self> {
        if v1.len() != grid.len() || v2.len() != grid.len() {
            return Err(Error::DimensionMismatch("potential samples do not match the grid".into()));
        }
        if !(sigma > 1.0) {
            return Err(Error::InvalidArgument(format!("sigma must exceed 1, got {sigma}")));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        if v1.iter().chain(&v2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("potential samples must be finite".into()));
        }
        Ok(PotentialSpec { grid, v1, v2, sigma, delta })
    }

    pub fn zero(grid: RadialGrid, sigma: f64, delta: f64) -> Result<Self> {
        PotentialSpec::new(grid, vec![0.0; grid.len()], vec![0.0; grid.len()], sigma, delta)
    }

    pub fn from_profile(grid: RadialGrid, profile: PotentialProfile, sigma: f64, delta: f64) -> Result<Self> {
        let (v1, v2) = grid
            .nodes()
            .into_iter()
            .map(|r| match profile {
                PotentialProfile::Zero => (0.0, 0.0),
                PotentialProfile::Gaussian { v1, v2, width } => {
                    let e = (-(r / width).powi(2)).exp();
                    (v1 * e, v2 * e)
                }
                PotentialProfile::Critical { fraction } => (fraction * delta / admissibility_weight(r, sigma), 0.0),
            })
            .unzip();
        PotentialSpec::new(grid, v1, v2, sigma, delta)
    }

    pub fn grid(&self) -> RadialGrid {
        self.grid
    }

    pub fn v1(&self) -> &[f64] {
        &self.v1
    }

    pub fn v2(&self) -> &[f64] {
        &self.v2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_zero(&self) -> bool {
        self.v1.iter().chain(&self.v2).all(|v| *v == 0.0)
    }
}

/// Result of [`admissibility`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// `delta - sup_i |V(r_i)| (r^(1/2) |log r|^(sigma/2) + r^sigma)`.
    pub margin: f64,
    /// `sup_i w_sigma(r_i) |V(r_i)|`.
    pub weighted_sup: f64,
}

/// Checks the pointwise decay condition on the potential, with the matrix
/// magnitude `|V| = |V1| + |V2|`.
pub fn admissibility(pot: &PotentialSpec) -> Admissibility {
    let mut sup: f64 = 0.0;
    let mut weighted: f64 = 0.0;
    for (i, r) in pot.grid.nodes().into_iter().enumerate() {
        let mag = pot.v1[i].abs() + pot.v2[i].abs();
        sup = sup.max(mag * admissibility_weight(r, pot.sigma));
        weighted = weighted.max(mag * w_sigma(r, pot.sigma));
    }
    let margin = pot.delta - sup;
    Admissibility { admissible: margin >= 0.0, margin, weighted_sup: weighted }
}

/// Centred difference with ghost `p * v[0]` below the origin and `0` past `R`.
fn centred_difference(v: &[C64], parity: f64, h: f64, i: usize) -> C64 {
    let left = if i == 0 { v[0] * parity } else { v[i - 1] };
    let right = if i + 1 == v.len() { C64::new(0.0, 0.0) } else { v[i + 1] };
    (right - left) / (2.0 * h)
}

/// Applies the reduced operator
/// `d = [[V1, -d/dr + k/r + V2], [d/dr + k/r + V2, V1]]`.
///
/// Below the origin each component is continued by its parity
/// (see [`origin_parity`]); the opposite parities of `u+` and `u-` keep the
/// discrete operator Hermitian. Past `R` the ghost value is zero.
pub fn d_apply(state: &RadialPair, pot: Option<&PotentialSpec>) -> Result<RadialPair> {
    let grid = state.grid;
    if let Some(p) = pot {
        if p.grid != grid {
            return Err(Error::GridMismatch(format!("potential on {:?}, state on {:?}", p.grid, grid)));
        }
    }
    let h = grid.h();
    let k = state.idx.kappa() as f64;
    let pp = origin_parity(&state.idx, Sign::Plus);
    let pm = origin_parity(&state.idx, Sign::Minus);
    let mut plus = Vec::with_capacity(grid.len());
    let mut minus = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let r = grid.node(i);
        let (v1, v2) = pot.map_or((0.0, 0.0), |p| (p.v1[i], p.v2[i]));
        let w = k / r + v2;
        let up = state.plus[i];
        let um = state.minus[i];
        plus.push(up * v1 - centred_difference(&state.minus, pm, h, i) + um * w);
        minus.push(um * v1 + centred_difference(&state.plus, pp, h, i) + up * w);
    }
    Ok(RadialPair { idx: state.idx, grid, plus, minus })
}

/// Homogeneous Sobolev norm of the reconstructed field computed in the
/// reduced picture.
///
/// `s = 0` is the `L^2(dr)` norm. `s = 1` sums, per component of orbital
/// degree `l`, staggered differences `|u'|^2` (origin parity ghost, half
/// weight on the edge at `r = 0`) and the centrifugal term
/// `l(l+1)|u|^2/r^2`. Reconstruction already carries the sphere
/// normalisation, so no `4 pi` appears.
pub fn reduced_hs_norm(state: &RadialPair, s: u32) -> Result<f64> {
    match s {
        0 => Ok(state.norm()),
        1 => {
            let h = state.grid.h();
            let mut total = 0.0;
            for sign in [Sign::Plus, Sign::Minus] {
                let v = state.component(sign);
                let l = state.idx.orbital(sign) as f64;
                let p = origin_parity(&state.idx, sign);
                // edge between ghost and node 0 is split by the origin
                let edge0 = (v[0] - v[0] * p) / h;
                let mut acc = 0.5 * edge0.norm_sqr();
                for i in 0..v.len() {
                    let next = if i + 1 < v.len() { v[i + 1] } else { C64::new(0.0, 0.0) };
                    acc += ((next - v[i]) / h).norm_sqr();
                    let r = state.grid.node(i);
                    acc += l * (l + 1.0) * v[i].norm_sqr() / (r * r);
                }
                total += acc * h;
            }
            Ok(total.sqrt())
        }
        _ => Err(Error::InvalidArgument(format!("reduced Sobolev norm supports s = 0, 1, got {s}"))),
    }
}

/// Spinor field on the product of a radial grid and a sphere grid, stored
/// radius-major.
#[derive(Debug, Clone)]
pub struct ProductField {
    radial: RadialGrid,
    sphere: Arc<SphereGrid>,
    values: Vec<Spinor4>,
}

impl ProductField {
    pub fn from_values(radial: RadialGrid, sphere: Arc<SphereGrid>, values: Vec<Spinor4>) -> Result<Self> {
        if values.len() != radial.len() * sphere.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {}x{} product grid",
                values.len(),
                radial.len(),
                sphere.len()
            )));
        }
        Ok(ProductField { radial, sphere, values })
    }

    pub fn radial(&self) -> RadialGrid {
        self.radial
    }

    pub fn sphere(&self) -> &Arc<SphereGrid> {
        &self.sphere
    }

    pub fn values(&self) -> &[Spinor4] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(&Spinor4) -> Spinor4) -> ProductField {
        ProductField { radial: self.radial, sphere: self.sphere.clone(), values: self.values.iter().map(f).collect() }
    }

    fn check_compatible(&self, other: &ProductField) -> Result<()> {
        if self.radial != other.radial || *self.sphere != *other.sphere {
            return Err(Error::GridMismatch("product grids differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ProductField) -> Result<ProductField> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(ProductField { radial: self.radial, sphere: self.sphere.clone(), values })
    }

    pub fn sub(&self, other: &ProductField) -> Result<ProductField> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(ProductField { radial: self.radial, sphere: self.sphere.clone(), values })
    }

    /// Product quadrature of `int |u|^2 dx` over the ball, square-rooted.
    pub fn norm(&self) -> f64 {
        let m = self.sphere.len();
        let h = self.radial.h();
        let mut total = 0.0;
        for i in 0..self.radial.len() {
            let r = self.radial.node(i);
            let shell: f64 = (0..m).map(|n| self.sphere.weight(n) * self.values[i * m + n].norm_squared()).sum();
            total += h * r * r * shell;
        }
        total.sqrt()
    }
}

/// Basis values `Phi^sign_idx` at every node of `sphere`.
pub fn basis_values(sphere: &SphereGrid, sign: Sign, idx: &AngularIndex) -> Vec<Spinor4> {
    sphere.nodes().map(|(t, p)| phi(sign, idx, t, p)).collect()
}

/// `u(r, w) = (u+(r) Phi+(w) + u-(r) Phi-(w)) / r` on the product grid.
pub fn reconstruct(state: &RadialPair, sphere: Arc<SphereGrid>) -> ProductField {
    let bp = basis_values(&sphere, Sign::Plus, &state.idx);
    let bm = basis_values(&sphere, Sign::Minus, &state.idx);
    let mut values = Vec::with_capacity(state.grid.len() * sphere.len());
    for i in 0..state.grid.len() {
        let r = state.grid.node(i);
        let a = state.plus[i] / r;
        let b = state.minus[i] / r;
        values.extend(bp.iter().zip(&bm).map(|(p, m)| p * a + m * b));
    }
    ProductField { radial: state.grid, sphere, values }
}

/// Coordinates of `field` in channel `idx`, `u^{+-}(r) = r <Phi^{+-}, u(r, .)>`,
/// together with the norm of the part of `field` outside the channel.
pub fn project(field: &ProductField, idx: AngularIndex) -> Result<(RadialPair, f64)> {
    let state = project_coefficients(field, idx);
    let back = reconstruct(&state, field.sphere.clone());
    let residual = field.sub(&back)?.norm();
    Ok((state, residual))
}

/// The projection alone, without the residual.
pub fn project_coefficients(field: &ProductField, idx: AngularIndex) -> RadialPair {
    let sphere = &field.sphere;
    let m = sphere.len();
    let bp = basis_values(sphere, Sign::Plus, &idx);
    let bm = basis_values(sphere, Sign::Minus, &idx);
    let w: Vec<f64> = (0..m).map(|n| sphere.weight(n)).collect();
    let mut plus = Vec::with_capacity(field.radial.len());
    let mut minus = Vec::with_capacity(field.radial.len());
    for i in 0..field.radial.len() {
        let r = field.radial.node(i);
        let shell = &field.values[i * m..(i + 1) * m];
        let mut a = C64::new(0.0, 0.0);
        let mut b = C64::new(0.0, 0.0);
        for n in 0..m {
            a += bp[n].dotc(&shell[n]) * w[n];
            b += bm[n].dotc(&shell[n]) * w[n];
        }
        plus.push(a * r);
        minus.push(b * r);
    }
    RadialPair { idx, grid: field.radial, plus, minus }
}

/// `sup_w |u(r_i, w)|` for every radial node. For `j = 1/2` the basis has
/// constant pointwise magnitude `1/(2 sqrt(pi))`, which gives a closed form;
/// otherwise the supremum is taken over `sphere`.
pub fn angular_sup(state: &RadialPair, sphere: Option<&SphereGrid>) -> Vec<f64> {
    if state.idx.is_lowest() || sphere.is_none() {
        let c = 0.5 / PI.sqrt();
        return state
            .density()
            .into_iter()
            .enumerate()
            .map(|(i, d)| c * d.sqrt() / state.grid.node(i))
            .collect();
    }
    let sphere = sphere.expect("checked above");
    let bp = basis_values(sphere, Sign::Plus, &state.idx);
    let bm = basis_values(sphere, Sign::Minus, &state.idx);
    (0..state.grid.len())
        .map(|i| {
            let r = state.grid.node(i);
            bp.iter()
                .zip(&bm)
                .map(|(p, m)| (p * state.plus[i] + m * state.minus[i]).norm() / r)
                .fold(0.0, f64::max)
        })
        .collect()
}
