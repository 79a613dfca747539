//! Spectral oracle for the free 3D Dirac flow on a periodic box, used to
//! check the radial reduction against the full equation.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::algebra::{alpha_dot, ComplexMatrix4, Spinor4};
use crate::angular::{phi, AngularIndex, Sign, SphereGrid, ThetaRule};
use crate::evolution::{linear_evolve, TimeGrid, MONITOR_SHELL, MONITOR_THRESHOLD};
use crate::radial::{project, ProductField, RadialGrid, RadialPair};
use crate::{Error, Result, C64};

/// Periodic box `[-L, L)^3` with `n` cell-centred nodes per axis,
/// `x_i = -L + (i + 1/2) dx`; the origin is never a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianGrid {
    n: usize,
    half_width: f64,
}

impl CartesianGrid {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("points per axis must be a power of two >= 8, got {n}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidArgument(format!("box half-width must be positive, got {half_width}")));
        }
        Ok(CartesianGrid { n, half_width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.dx()
    }

    /// Angular wavenumber of FFT bin `q`.
    pub fn wavenumber(&self, q: usize) -> f64 {
        let signed = if q < self.n / 2 { q as f64 } else { q as f64 - self.n as f64 };
        PI * signed / self.half_width
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    fn point(&self, flat: usize) -> [f64; 3] {
        let n = self.n;
        [self.coord(flat / (n * n)), self.coord((flat / n) % n), self.coord(flat % n)]
    }
}

/// Spinor samples on a [`CartesianGrid`], stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianSpinorField {
    grid: CartesianGrid,
    comps: [Vec<C64>; 4],
}

impl CartesianSpinorField {
    pub fn zeros(grid: CartesianGrid) -> Self {
        let z = vec![C64::new(0.0, 0.0); grid.len()];
        CartesianSpinorField { grid, comps: [z.clone(), z.clone(), z.clone(), z] }
    }

    pub fn from_fn(grid: CartesianGrid, f: impl Fn([f64; 3]) -> Spinor4) -> Self {
        let mut out = CartesianSpinorField::zeros(grid);
        for flat in 0..grid.len() {
            let v = f(grid.point(flat));
            for c in 0..4 {
                out.comps[c][flat] = v[c];
            }
        }
        out
    }

    pub fn grid(&self) -> CartesianGrid {
        self.grid
    }

    pub fn value(&self, flat: usize) -> Spinor4 {
        Spinor4::new(self.comps[0][flat], self.comps[1][flat], self.comps[2][flat], self.comps[3][flat])
    }

    pub fn value_at(&self, i: usize, j: usize, k: usize) -> Spinor4 {
        self.value(self.grid.index(i, j, k))
    }

    /// `sqrt(dx^3 sum |u|^2)`.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.comps.iter().flat_map(|c| c.iter()).map(|z| z.norm_sqr()).sum();
        (s * self.grid.dx().powi(3)).sqrt()
    }

    pub fn sub(&self, other: &CartesianSpinorField) -> Result<CartesianSpinorField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("Cartesian grids differ".into()));
        }
        let mut out = self.clone();
        for c in 0..4 {
            for (a, b) in out.comps[c].iter_mut().zip(&other.comps[c]) {
                *a -= b;
            }
        }
        Ok(out)
    }

    /// Fraction of the squared norm outside the ball of radius
    /// `(1 - MONITOR_SHELL) L`.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let cut = (1.0 - MONITOR_SHELL) * self.grid.half_width;
        let mut total = 0.0;
        let mut outer = 0.0;
        for flat in 0..self.grid.len() {
            let p = self.grid.point(flat);
            let d: f64 = (0..4).map(|c| self.comps[c][flat].norm_sqr()).sum();
            total += d;
            if p.iter().any(|x| x.abs() > cut) {
                outer += d;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outer / total
        }
    }
}

fn fft_axis(data: &mut [C64], n: usize, stride: usize, inverse: bool, planner: &mut FftPlanner<f64>) {
    let plan = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    if stride == 1 {
        plan.process(data);
        return;
    }
    let mut line = vec![C64::new(0.0, 0.0); n];
    let block = n * stride;
    for base in (0..data.len()).step_by(block) {
        for off in 0..stride {
            for (q, l) in line.iter_mut().enumerate() {
                *l = data[base + off + q * stride];
            }
            plan.process(&mut line);
            for (q, l) in line.iter().enumerate() {
                data[base + off + q * stride] = *l;
            }
        }
    }
}

fn fft3(data: &mut [C64], n: usize, inverse: bool, planner: &mut FftPlanner<f64>) {
    fft_axis(data, n, 1, inverse, planner);
    fft_axis(data, n, n, inverse, planner);
    fft_axis(data, n, n * n, inverse, planner);
    if inverse {
        let s = 1.0 / (n * n * n) as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// Applies the Fourier multiplier `symbol(xi)` (a 4x4 matrix per frequency).
pub fn apply_multiplier(field: &CartesianSpinorField, symbol: impl Fn([f64; 3]) -> ComplexMatrix4) -> CartesianSpinorField {
    let grid = field.grid;
    let n = grid.n;
    let mut planner = FftPlanner::new();
    let mut comps = field.comps.clone();
    for c in comps.iter_mut() {
        fft3(c, n, false, &mut planner);
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let xi = [grid.wavenumber(i), grid.wavenumber(j), grid.wavenumber(k)];
                let m = symbol(xi);
                let flat = grid.index(i, j, k);
                let v = Spinor4::new(comps[0][flat], comps[1][flat], comps[2][flat], comps[3][flat]);
                let w = m * v;
                for c in 0..4 {
                    comps[c][flat] = w[c];
                }
            }
        }
    }
    for c in comps.iter_mut() {
        fft3(c, n, true, &mut planner);
    }
    CartesianSpinorField { grid, comps }
}

fn xi_norm(xi: [f64; 3]) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
}

fn scalar(s: f64) -> ComplexMatrix4 {
    ComplexMatrix4::identity() * C64::from(s)
}

/// `exp(it D)` through its symbol `cos(t|xi|) I + i sin(t|xi|) (alpha . xi/|xi|)`.
/// The flow `exp(-itD)` of the evolution module is `free_step_symbol(f, -t)`.
pub fn free_step_symbol(field: &CartesianSpinorField, t: f64) -> CartesianSpinorField {
    apply_multiplier(field, |xi| {
        let k = xi_norm(xi);
        if k == 0.0 {
            return ComplexMatrix4::identity();
        }
        let unit = nalgebra::Vector3::new(xi[0] / k, xi[1] / k, xi[2] / k);
        scalar((t * k).cos()) + alpha_dot(&unit) * C64::new(0.0, (t * k).sin())
    })
}

/// `cos(t|D|) f + i sin(t|D|) |D|^{-1} D f` from separate scalar and Dirac
/// multipliers.
pub fn dirac_solution_formula(field: &CartesianSpinorField, t: f64) -> CartesianSpinorField {
    let cos_part = apply_multiplier(field, |xi| scalar((t * xi_norm(xi)).cos()));
    let df = apply_dirac(field);
    let sin_part = apply_multiplier(&df, |xi| {
        let k = xi_norm(xi);
        if k == 0.0 {
            scalar(0.0)
        } else {
            scalar((t * k).sin() / k)
        }
    });
    let mut out = cos_part;
    for c in 0..4 {
        for (a, b) in out.comps[c].iter_mut().zip(&sin_part.comps[c]) {
            *a += b * C64::i();
        }
    }
    out
}

/// `D f = -i alpha . grad f`, symbol `alpha . xi`.
pub fn apply_dirac(field: &CartesianSpinorField) -> CartesianSpinorField {
    apply_multiplier(field, |xi| alpha_dot(&nalgebra::Vector3::new(xi[0], xi[1], xi[2])))
}

pub fn laplacian(field: &CartesianSpinorField) -> CartesianSpinorField {
    apply_multiplier(field, |xi| scalar(-(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])))
}

/// `||D(Df) + Laplace f|| / ||Laplace f||`, zero for a field with vanishing
/// Laplacian.
pub fn dsquared_residual(field: &CartesianSpinorField) -> f64 {
    let dd = apply_dirac(&apply_dirac(field));
    let lap = laplacian(field);
    let denom = lap.norm();
    if denom == 0.0 {
        return 0.0;
    }
    let mut sum = dd;
    for c in 0..4 {
        for (a, b) in sum.comps[c].iter_mut().zip(&lap.comps[c]) {
            *a += b;
        }
    }
    sum.norm() / denom
}

/// Spectral `Hdot^s` norm `|| |xi|^s fhat ||`.
pub fn hs_norm_cartesian(field: &CartesianSpinorField, s: f64) -> f64 {
    let grid = field.grid;
    let n = grid.n;
    let mut planner = FftPlanner::new();
    let mut total = 0.0;
    for c in &field.comps {
        let mut buf = c.clone();
        fft3(&mut buf, n, false, &mut planner);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let xi = xi_norm([grid.wavenumber(i), grid.wavenumber(j), grid.wavenumber(k)]);
                    let w = if s == 0.0 { 1.0 } else { xi.powf(2.0 * s) };
                    total += w * buf[grid.index(i, j, k)].norm_sqr();
                }
            }
        }
    }
    (total * grid.dx().powi(3) / grid.len() as f64).sqrt()
}

/// Samples `(u+ Phi+ + u- Phi-)/r` at every box node, interpolating the
/// radial profiles (zero beyond their grid).
pub fn reconstruct_cartesian(state: &RadialPair, grid: CartesianGrid) -> CartesianSpinorField {
    let idx = state.idx();
    CartesianSpinorField::from_fn(grid, |p| {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let theta = (p[2] / r).clamp(-1.0, 1.0).acos();
        let az = p[1].atan2(p[0]);
        let (a, b) = state.sample(r);
        (phi(Sign::Plus, &idx, theta, az) * a + phi(Sign::Minus, &idx, theta, az) * b) / C64::from(r)
    })
}

fn lagrange6(t: f64) -> [f64; 6] {
    // nodes -2..=3
    let mut w = [0.0; 6];
    for (a, wa) in w.iter_mut().enumerate() {
        let xa = a as f64 - 2.0;
        let mut v = 1.0;
        for b in 0..6 {
            if b != a {
                let xb = b as f64 - 2.0;
                v *= (t - xb) / (xa - xb);
            }
        }
        *wa = v;
    }
    w
}

/// Periodic tensor 6-point Lagrange interpolation of the box field at `p`.
pub fn interpolate(field: &CartesianSpinorField, p: [f64; 3]) -> Spinor4 {
    let grid = field.grid;
    let n = grid.n as isize;
    let mut base = [0isize; 3];
    let mut weights = [[0.0; 6]; 3];
    for a in 0..3 {
        let x = (p[a] + grid.half_width) / grid.dx() - 0.5;
        let i0 = x.floor();
        base[a] = i0 as isize;
        weights[a] = lagrange6(x - i0);
    }
    let wrap = |i: isize| i.rem_euclid(n) as usize;
    let mut out = [C64::new(0.0, 0.0); 4];
    for (a, wa) in weights[0].iter().enumerate() {
        let i = wrap(base[0] - 2 + a as isize);
        for (b, wb) in weights[1].iter().enumerate() {
            let j = wrap(base[1] - 2 + b as isize);
            let wab = wa * wb;
            for (c, wc) in weights[2].iter().enumerate() {
                let k = wrap(base[2] - 2 + c as isize);
                let w = wab * wc;
                let flat = grid.index(i, j, k);
                for (s, o) in out.iter_mut().enumerate() {
                    *o += field.comps[s][flat] * w;
                }
            }
        }
    }
    Spinor4::new(out[0], out[1], out[2], out[3])
}

/// Samples the box field on the product of `radial` and `sphere`.
pub fn sample_on_product(field: &CartesianSpinorField, radial: RadialGrid, sphere: Arc<SphereGrid>) -> ProductField {
    let dirs: Vec<[f64; 3]> = sphere
        .nodes()
        .map(|(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
        .collect();
    let mut values = Vec::with_capacity(radial.len() * sphere.len());
    for r in radial.nodes() {
        values.extend(dirs.iter().map(|d| interpolate(field, [r * d[0], r * d[1], r * d[2]])));
    }
    ProductField::from_values(radial, sphere, values).expect("sized to the product grid")
}

/// Outcome of [`oracle_compare`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    /// `L^2` distance on the box between the 3D flow of the reconstructed
    /// data and the reconstruction of the radially evolved state.
    pub discrepancy: f64,
    /// `discrepancy / ||data||`.
    pub relative: f64,
    /// Off-channel part of the box field at `t = 0` after sampling.
    pub residual_initial: f64,
    /// Off-channel part of the 3D-evolved field at time `t`.
    pub residual_final: f64,
    pub warnings: Vec<String>,
}

/// Evolves `state` to time `t` both with `steps` radial Cayley steps (no
/// potential) and with the exact symbol on `box_grid`, and compares the two
/// on the box.
pub fn oracle_compare(state: &RadialPair, t: f64, steps: usize, box_grid: CartesianGrid) -> Result<OracleComparison> {
    let mut warnings = Vec::new();
    if state.grid().radius() > box_grid.half_width * (1.0 + 1e-12) {
        warnings.push(format!(
            "radial domain R = {} exceeds the box half-width {}",
            state.grid().radius(),
            box_grid.half_width
        ));
    }
    let initial = reconstruct_cartesian(state, box_grid);
    let (evolved_radial, radial_warnings) = if t == 0.0 {
        (state.clone(), Vec::new())
    } else {
        let traj = linear_evolve(state, None, TimeGrid::new(t, steps)?)?;
        let w = traj.warnings.clone();
        (traj.states.last().expect("nonempty").clone(), w)
    };
    warnings.extend(radial_warnings);
    let evolved_box = if t == 0.0 { initial.clone() } else { free_step_symbol(&initial, -t) };
    let frac = evolved_box.boundary_mass_fraction();
    if frac > MONITOR_THRESHOLD {
        warnings.push(format!("boundary contamination: box edge carries mass fraction {frac:.3e}"));
    }
    let reference = reconstruct_cartesian(&evolved_radial, box_grid);
    let discrepancy = evolved_box.sub(&reference)?.norm();
    let norm = initial.norm();

    let sphere = Arc::new(SphereGrid::new(ThetaRule::GaussLegendre, 16, 32)?);
    let radial = state.grid();
    let (_, residual_initial) = project(&sample_on_product(&initial, radial, sphere.clone()), state.idx())?;
    let (_, residual_final) = project(&sample_on_product(&evolved_box, radial, sphere), state.idx())?;
    Ok(OracleComparison {
        discrepancy,
        relative: if norm > 0.0 { discrepancy / norm } else { 0.0 },
        residual_initial,
        residual_final,
        warnings,
    })
}

/// Projects a box field onto channel `idx` over the radial grid `radial`,
/// returning the coordinates and the off-channel residual.
pub fn channel_projection(field: &CartesianSpinorField, idx: AngularIndex, radial: RadialGrid) -> Result<(RadialPair, f64)> {
    let sphere = Arc::new(SphereGrid::new(ThetaRule::GaussLegendre, 16, 32)?);
    project(&sample_on_product(field, radial, sphere), idx)
}
