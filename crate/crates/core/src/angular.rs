//! Spinor spherical harmonics, the partial-wave basis `Phi^{+-}_{m_j,k_j}`,
//! sphere quadrature and discrete angular-momentum operators.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::Vector3;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::algebra::Spinor4;
use crate::quadrature::gauss_legendre;
use crate::special::sph_harm;
use crate::{Error, Result, C64};

/// Label of the two basis functions spanning a partial-wave subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            other => Err(Error::InvalidArgument(format!("unknown sign `{other}`"))),
        }
    }
}

/// Channel label `(j, m_j, k_j)`, stored as `2j`, `2m_j` and `k_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngularIndex {
    two_j: u32,
    two_mj: i32,
    kappa: i32,
}

impl AngularIndex {
    pub fn new(two_j: u32, two_mj: i32, kappa: i32) -> Result<Self> {
        if two_j.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("j = {two_j}/2 is not a half-integer")));
        }
        if two_mj.unsigned_abs() > two_j || two_mj.rem_euclid(2) != 1 {
            return Err(Error::InvalidArgument(format!("m_j = {two_mj}/2 invalid for j = {two_j}/2")));
        }
        if kappa.unsigned_abs() != two_j.div_ceil(2) {
            return Err(Error::InvalidArgument(format!("k_j = {kappa} must be +-(j + 1/2) for j = {two_j}/2")));
        }
        Ok(AngularIndex { two_j, two_mj, kappa })
    }

    /// The four `j = 1/2` channels `(m_j, k_j)`: (-1/2,-1), (-1/2,1), (1/2,-1), (1/2,1).
    pub fn lowest() -> [AngularIndex; 4] {
        [(-1, -1), (-1, 1), (1, -1), (1, 1)].map(|(m, k)| AngularIndex { two_j: 1, two_mj: m, kappa: k })
    }

    /// Every channel with `j <= two_j_max / 2`.
    pub fn up_to(two_j_max: u32) -> Vec<AngularIndex> {
        let mut out = Vec::new();
        for two_j in (1..=two_j_max).step_by(2) {
            for two_mj in (-(two_j as i32)..=two_j as i32).step_by(2) {
                let k = (two_j as i32 + 1) / 2;
                for kappa in [-k, k] {
                    out.push(AngularIndex { two_j, two_mj, kappa });
                }
            }
        }
        out
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn two_mj(&self) -> i32 {
        self.two_mj
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn mj(&self) -> f64 {
        self.two_mj as f64 / 2.0
    }

    pub fn kappa(&self) -> i32 {
        self.kappa
    }

    pub fn is_lowest(&self) -> bool {
        self.two_j == 1
    }

    /// Orbital degree `l` of the spherical harmonics inside `Phi^sign`.
    pub fn orbital(&self, sign: Sign) -> u32 {
        let low = (self.two_j - 1) / 2;
        let high = self.two_j.div_ceil(2);
        match (sign, self.kappa < 0) {
            (Sign::Plus, true) | (Sign::Minus, false) => low,
            (Sign::Plus, false) | (Sign::Minus, true) => high,
        }
    }
}

impl fmt::Display for AngularIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(j={}/2, m_j={}/2, k_j={})", self.two_j, self.two_mj, self.kappa)
    }
}

fn harmonic_or_zero(l: u32, two_m: i32, theta: f64, phi: f64) -> C64 {
    // two_m is twice an integer here
    let m = two_m / 2;
    if m.unsigned_abs() > l {
        return C64::new(0.0, 0.0);
    }
    sph_harm(l, m, theta, phi).expect("|m| <= l checked")
}

/// Two-component spinor harmonic `Psi^{m_j}_l` with `l = j -+ 1/2`.
pub fn spinor_harmonic(idx: &AngularIndex, l: u32, theta: f64, phi: f64) -> [C64; 2] {
    let j = idx.j();
    let m = idx.mj();
    let down = harmonic_or_zero(l, idx.two_mj - 1, theta, phi);
    let up = harmonic_or_zero(l, idx.two_mj + 1, theta, phi);
    if 2 * l + 1 == idx.two_j {
        let pref = 1.0 / (2.0 * j).sqrt();
        [down * (pref * (j + m).sqrt()), up * (pref * (j - m).sqrt())]
    } else {
        debug_assert_eq!(2 * l, idx.two_j + 1);
        let pref = 1.0 / (2.0 * j + 2.0).sqrt();
        [down * (pref * (j + 1.0 - m).sqrt()), up * (-pref * (j + 1.0 + m).sqrt())]
    }
}

/// Basis function `Phi^sign_{m_j,k_j}(theta, phi)`: `(i Psi, 0)` for `+`,
/// `(0, Psi)` for `-`.
pub fn phi(sign: Sign, idx: &AngularIndex, theta: f64, azimuth: f64) -> Spinor4 {
    let l = idx.orbital(sign);
    let [a, b] = spinor_harmonic(idx, l, theta, azimuth);
    let zero = C64::new(0.0, 0.0);
    match sign {
        Sign::Plus => Spinor4::new(a * C64::i(), b * C64::i(), zero, zero),
        Sign::Minus => Spinor4::new(zero, zero, a, b),
    }
}

/// Image of `Phi^sign` under `i (alpha . xhat)`: `i(alpha.xhat) Phi^+ = -Phi^-`
/// and `i(alpha.xhat) Phi^- = Phi^+`.
pub fn alpha_radial_action(sign: Sign, _idx: &AngularIndex) -> (Sign, f64) {
    match sign {
        Sign::Plus => (Sign::Minus, -1.0),
        Sign::Minus => (Sign::Plus, 1.0),
    }
}

pub fn unit_vector(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// How polar nodes are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaRule {
    /// Gauss-Legendre nodes in `cos(theta)`; exact quadrature for polynomials.
    GaussLegendre,
    /// Uniform open grid `theta_i = (i + 1/2) pi / n`; needed by the
    /// finite-difference angular operators.
    Uniform,
}

/// Tensor grid on the unit sphere: polar rule times a uniform azimuthal grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    rule: ThetaRule,
    theta: Vec<f64>,
    theta_weights: Vec<f64>,
    nphi: usize,
}

impl SphereGrid {
    pub fn new(rule: ThetaRule, ntheta: usize, nphi: usize) -> Result<Self> {
        if ntheta == 0 || nphi == 0 {
            return Err(Error::InvalidArgument("sphere grid needs at least one node per direction".into()));
        }
        let (theta, theta_weights) = match rule {
            ThetaRule::GaussLegendre => {
                let (x, w) = gauss_legendre(ntheta);
                // descending cos(theta) gives ascending theta
                (x.iter().rev().map(|x| x.acos()).collect(), w.into_iter().rev().collect())
            }
            ThetaRule::Uniform => {
                let h = PI / ntheta as f64;
                let theta: Vec<f64> = (0..ntheta).map(|i| (i as f64 + 0.5) * h).collect();
                let w = (0..ntheta).map(|i| (i as f64 * h).cos() - ((i + 1) as f64 * h).cos()).collect();
                (theta, w)
            }
        };
        Ok(SphereGrid { rule, theta, theta_weights, nphi })
    }

    /// Gauss-Legendre grid with the default resolution (64 x 128).
    pub fn standard() -> Self {
        SphereGrid::new(ThetaRule::GaussLegendre, 64, 128).expect("valid default grid")
    }

    pub fn rule(&self) -> ThetaRule {
        self.rule
    }

    pub fn ntheta(&self) -> usize {
        self.theta.len()
    }

    pub fn nphi(&self) -> usize {
        self.nphi
    }

    pub fn len(&self) -> usize {
        self.theta.len() * self.nphi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.theta[i]
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.nphi as f64
    }

    /// `(theta, phi)` of flat node index `n = i * nphi + j`.
    pub fn node(&self, n: usize) -> (f64, f64) {
        (self.theta[n / self.nphi], self.phi(n % self.nphi))
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.theta_weights[n / self.nphi] * 2.0 * PI / self.nphi as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|n| self.node(n))
    }

    fn same_as(&self, other: &SphereGrid) -> bool {
        self.rule == other.rule && self.ntheta() == other.ntheta() && self.nphi == other.nphi
    }
}

/// Spinor field sampled at the nodes of a [`SphereGrid`].
#[derive(Debug, Clone)]
pub struct SphereField {
    grid: Arc<SphereGrid>,
    values: Vec<Spinor4>,
}

impl SphereField {
    pub fn from_fn(grid: Arc<SphereGrid>, f: impl Fn(f64, f64) -> Spinor4) -> Self {
        let values = grid.nodes().map(|(t, p)| f(t, p)).collect();
        SphereField { grid, values }
    }

    pub fn from_values(grid: Arc<SphereGrid>, values: Vec<Spinor4>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        Ok(SphereField { grid, values })
    }

    pub fn basis(grid: Arc<SphereGrid>, sign: Sign, idx: &AngularIndex) -> Self {
        SphereField::from_fn(grid, |t, p| phi(sign, idx, t, p))
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Spinor4] {
        &self.values
    }

    pub fn scale(&self, a: C64) -> SphereField {
        SphereField { grid: self.grid.clone(), values: self.values.iter().map(|v| v * a).collect() }
    }

    /// Quadrature of `|u|^2` over the sphere, square-rooted.
    pub fn norm(&self) -> f64 {
        inner_s2(self, self).map(|z| z.re.max(0.0).sqrt()).expect("same grid")
    }

    /// Largest pointwise deviation `|self - other|`.
    pub fn max_deviation(&self, other: &SphereField) -> Result<f64> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

fn check_same_grid(a: &SphereGrid, b: &SphereGrid) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "sphere grids {:?} {}x{} and {:?} {}x{}",
            a.rule,
            a.ntheta(),
            a.nphi,
            b.rule,
            b.ntheta(),
            b.nphi
        )))
    }
}

/// Quadrature approximation of `int_{S^2} <u, v> dw`.
pub fn inner_s2(u: &SphereField, v: &SphereField) -> Result<C64> {
    check_same_grid(&u.grid, &v.grid)?;
    Ok(u.values.iter().zip(&v.values).enumerate().map(|(n, (a, b))| a.dotc(b) * u.grid.weight(n)).sum())
}

/// Angular operators acting on sphere-sampled spinor fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngularOp {
    /// Orbital `L^2`, componentwise.
    L2,
    /// Total `J^2 = L^2 + 2 S.L + 3/4`.
    J2,
    /// `J_3 = L_3 + S_3`.
    J3,
    /// Spin-orbit operator `K = beta (2 S.L + 1)`.
    K,
    /// `S.L`.
    SdotL,
}

struct ComponentDerivatives {
    f: Vec<C64>,
    dtheta: Vec<C64>,
    dphi: Vec<C64>,
    laplace: Vec<C64>,
}

fn derivatives(grid: &SphereGrid, f: Vec<C64>, planner: &mut FftPlanner<f64>) -> ComponentDerivatives {
    let nt = grid.ntheta();
    let np = grid.nphi;
    let h = PI / nt as f64;
    let fwd = planner.plan_fft_forward(np);
    let inv = planner.plan_fft_inverse(np);

    let mut dphi = vec![C64::new(0.0, 0.0); f.len()];
    let mut dphi2 = vec![C64::new(0.0, 0.0); f.len()];
    let mut ring = vec![C64::new(0.0, 0.0); np];
    let mut d1 = vec![C64::new(0.0, 0.0); np];
    for i in 0..nt {
        ring.copy_from_slice(&f[i * np..(i + 1) * np]);
        fwd.process(&mut ring);
        for q in 0..np {
            let m = if q < np / 2 { q as f64 } else { q as f64 - np as f64 };
            let nyquist = 2 * q == np;
            d1[q] = if nyquist { C64::new(0.0, 0.0) } else { ring[q] * C64::new(0.0, m) };
            ring[q] *= -m * m;
        }
        inv.process(&mut d1);
        inv.process(&mut ring);
        let scale = 1.0 / np as f64;
        for j in 0..np {
            dphi[i * np + j] = d1[j] * scale;
            dphi2[i * np + j] = ring[j] * scale;
        }
    }

    // Values beyond the poles come from the antipodal meridian.
    let at = |i: isize, j: usize| -> C64 {
        if i < 0 {
            f[(j + np / 2) % np]
        } else if i as usize >= nt {
            f[(nt - 1) * np + (j + np / 2) % np]
        } else {
            f[i as usize * np + j]
        }
    };

    let mut dtheta = vec![C64::new(0.0, 0.0); f.len()];
    let mut laplace = vec![C64::new(0.0, 0.0); f.len()];
    for i in 0..nt {
        let th = grid.theta[i];
        let s = th.sin();
        let s_up = (th + 0.5 * h).sin();
        let s_dn = (th - 0.5 * h).sin();
        for j in 0..np {
            let fm = at(i as isize - 1, j);
            let f0 = f[i * np + j];
            let fp = at(i as isize + 1, j);
            dtheta[i * np + j] = (fp - fm) / (2.0 * h);
            let polar = ((fp - f0) * s_up - (f0 - fm) * s_dn) / (h * h * s);
            laplace[i * np + j] = polar + dphi2[i * np + j] / (s * s);
        }
    }
    ComponentDerivatives { f, dtheta, dphi, laplace }
}

/// Applies an angular operator with spectral azimuthal derivatives and
/// second-order centred polar differences.
///
/// The field must live on a [`ThetaRule::Uniform`] grid with `ntheta >= 16`
/// and `nphi` a power of two (at least 4).
pub fn apply_angular_op(op: AngularOp, field: &SphereField) -> Result<SphereField> {
    let grid = field.grid.as_ref();
    if grid.rule != ThetaRule::Uniform {
        return Err(Error::GridTooCoarse("angular operators need a uniform polar grid".into()));
    }
    if grid.ntheta() < 16 {
        return Err(Error::GridTooCoarse(format!("ntheta = {} < 16", grid.ntheta())));
    }
    if grid.nphi < 4 || !grid.nphi.is_power_of_two() {
        return Err(Error::GridTooCoarse(format!("nphi = {} is not a power of two >= 4", grid.nphi)));
    }

    let mut planner = FftPlanner::new();
    let comps: Vec<ComponentDerivatives> = (0..4)
        .map(|c| derivatives(grid, field.values.iter().map(|v| v[c]).collect(), &mut planner))
        .collect();

    let np = grid.nphi;
    let i = C64::i();
    let out: Vec<Spinor4> = (0..grid.len())
        .map(|n| {
            let th = grid.theta[n / np];
            let ph = grid.phi(n % np);
            let cot = th.cos() / th.sin();
            let e_plus = C64::from_polar(1.0, ph);
            let lz = |c: usize| -i * comps[c].dphi[n];
            let lplus = |c: usize| e_plus * (comps[c].dtheta[n] + i * cot * comps[c].dphi[n]);
            let lminus = |c: usize| e_plus.conj() * (-comps[c].dtheta[n] + i * cot * comps[c].dphi[n]);
            let l2 = |c: usize| -comps[c].laplace[n];
            // sigma.L on the (a, b) = (c0, c1) block: (Lz a + L- b, L+ a - Lz b)
            let sigma_l = |a: usize, b: usize| [lz(a) + lminus(b), lplus(a) - lz(b)];
            let f = |c: usize| comps[c].f[n];
            let [u0, u1] = sigma_l(0, 1);
            let [u2, u3] = sigma_l(2, 3);
            match op {
                AngularOp::L2 => Spinor4::new(l2(0), l2(1), l2(2), l2(3)),
                AngularOp::SdotL => Spinor4::new(u0, u1, u2, u3) * C64::from(0.5),
                AngularOp::K => Spinor4::new(u0 + f(0), u1 + f(1), -(u2 + f(2)), -(u3 + f(3))),
                AngularOp::J2 => Spinor4::new(
                    l2(0) + u0 + 0.75 * f(0),
                    l2(1) + u1 + 0.75 * f(1),
                    l2(2) + u2 + 0.75 * f(2),
                    l2(3) + u3 + 0.75 * f(3),
                ),
                AngularOp::J3 => Spinor4::new(
                    lz(0) + 0.5 * f(0),
                    lz(1) - 0.5 * f(1),
                    lz(2) + 0.5 * f(2),
                    lz(3) - 0.5 * f(3),
                ),
            }
        })
        .collect();
    Ok(SphereField { grid: field.grid.clone(), values: out })
}

/// Closed forms of the eight `j = 1/2` basis functions.
pub fn lowest_closed_form(sign: Sign, idx: &AngularIndex, theta: f64, azimuth: f64) -> Option<Spinor4> {
    if !idx.is_lowest() {
        return None;
    }
    let c = 0.5 / PI.sqrt();
    let (st, ct) = theta.sin_cos();
    let z = C64::new(0.0, 0.0);
    let i = C64::i();
    let e = |m: f64| C64::from_polar(c * st, m * azimuth);
    let cc = C64::from(c * ct);
    let one = C64::from(c);
    Some(match (idx.two_mj(), idx.kappa(), sign) {
        (-1, -1, Sign::Plus) => Spinor4::new(z, i * one, z, z),
        (-1, -1, Sign::Minus) => Spinor4::new(z, z, e(-1.0), -cc),
        (-1, 1, Sign::Plus) => Spinor4::new(i * e(-1.0), -i * cc, z, z),
        (-1, 1, Sign::Minus) => Spinor4::new(z, z, z, one),
        (1, -1, Sign::Plus) => Spinor4::new(i * one, z, z, z),
        (1, -1, Sign::Minus) => Spinor4::new(z, z, cc, e(1.0)),
        (1, 1, Sign::Plus) => Spinor4::new(i * cc, i * e(1.0), z, z),
        (1, 1, Sign::Minus) => Spinor4::new(z, z, one, z),
        _ => unreachable!("lowest channels enumerated"),
    })
}
