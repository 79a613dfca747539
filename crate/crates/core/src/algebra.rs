//! Dirac and Pauli matrices in the Dirac representation, and checks of their
//! anticommutation structure.
//!
//! All constructed matrices have entries in {0, +-1, +-i}, so products and
//! sums of a few of them are exact in floating point and the identity checks
//! below compare for exact equality.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, Vector3, Vector4};
use serde::Serialize;

use crate::{Error, Result, C64};

pub type ComplexMatrix2 = Matrix2<C64>;
pub type ComplexMatrix4 = Matrix4<C64>;
/// Pointwise value of a spinor field.
pub type Spinor4 = Vector4<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Names of the matrices that can be constructed by [`dirac_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Pauli1,
    Pauli2,
    Pauli3,
    Alpha1,
    Alpha2,
    Alpha3,
    Beta,
    Gamma5,
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "pauli1" | "sigma1" => MatrixKind::Pauli1,
            "pauli2" | "sigma2" => MatrixKind::Pauli2,
            "pauli3" | "sigma3" => MatrixKind::Pauli3,
            "alpha1" => MatrixKind::Alpha1,
            "alpha2" => MatrixKind::Alpha2,
            "alpha3" => MatrixKind::Alpha3,
            "beta" => MatrixKind::Beta,
            "gamma5" => MatrixKind::Gamma5,
            other => return Err(Error::InvalidArgument(format!("unknown matrix kind `{other}`"))),
        })
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixKind::Pauli1 => "pauli1",
            MatrixKind::Pauli2 => "pauli2",
            MatrixKind::Pauli3 => "pauli3",
            MatrixKind::Alpha1 => "alpha1",
            MatrixKind::Alpha2 => "alpha2",
            MatrixKind::Alpha3 => "alpha3",
            MatrixKind::Beta => "beta",
            MatrixKind::Gamma5 => "gamma5",
        };
        f.write_str(s)
    }
}

/// A Pauli (2x2) or Dirac (4x4) matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum DiracMatrix {
    Pauli(ComplexMatrix2),
    Dirac(ComplexMatrix4),
}

impl DiracMatrix {
    pub fn dim(&self) -> usize {
        match self {
            DiracMatrix::Pauli(_) => 2,
            DiracMatrix::Dirac(_) => 4,
        }
    }

    pub fn as_dirac(&self) -> Option<&ComplexMatrix4> {
        match self {
            DiracMatrix::Dirac(m) => Some(m),
            DiracMatrix::Pauli(_) => None,
        }
    }

    /// `AB + BA`; both operands must have the same size.
    pub fn anticommutator(&self, other: &DiracMatrix) -> Result<DiracMatrix> {
        match (self, other) {
            (DiracMatrix::Pauli(a), DiracMatrix::Pauli(b)) => Ok(DiracMatrix::Pauli(a * b + b * a)),
            (DiracMatrix::Dirac(a), DiracMatrix::Dirac(b)) => Ok(DiracMatrix::Dirac(anticommutator(a, b))),
            _ => Err(Error::DimensionMismatch(format!(
                "cannot anticommute {}x{} with {}x{}",
                self.dim(),
                self.dim(),
                other.dim(),
                other.dim()
            ))),
        }
    }
}

/// Pauli matrix `sigma_k`, `k` in 1..=3.
pub fn pauli(k: usize) -> ComplexMatrix2 {
    match k {
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {k} out of range 1..=3"),
    }
}

fn blocks(a: &ComplexMatrix2, b: &ComplexMatrix2, c: &ComplexMatrix2, d: &ComplexMatrix2) -> ComplexMatrix4 {
    let mut m = ComplexMatrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

/// `alpha_k = [[0, sigma_k], [sigma_k, 0]]`, `k` in 1..=3.
pub fn alpha(k: usize) -> ComplexMatrix4 {
    let s = pauli(k);
    let z = ComplexMatrix2::zeros();
    blocks(&z, &s, &s, &z)
}

/// `beta = diag(I2, -I2)`.
pub fn beta() -> ComplexMatrix4 {
    ComplexMatrix4::from_diagonal(&Vector4::new(ONE, ONE, -ONE, -ONE))
}

/// `gamma5 = [[0, I2], [I2, 0]]`.
pub fn gamma5() -> ComplexMatrix4 {
    let id = ComplexMatrix2::identity();
    let z = ComplexMatrix2::zeros();
    blocks(&z, &id, &id, &z)
}

pub fn dirac_matrix(kind: MatrixKind) -> DiracMatrix {
    match kind {
        MatrixKind::Pauli1 => DiracMatrix::Pauli(pauli(1)),
        MatrixKind::Pauli2 => DiracMatrix::Pauli(pauli(2)),
        MatrixKind::Pauli3 => DiracMatrix::Pauli(pauli(3)),
        MatrixKind::Alpha1 => DiracMatrix::Dirac(alpha(1)),
        MatrixKind::Alpha2 => DiracMatrix::Dirac(alpha(2)),
        MatrixKind::Alpha3 => DiracMatrix::Dirac(alpha(3)),
        MatrixKind::Beta => DiracMatrix::Dirac(beta()),
        MatrixKind::Gamma5 => DiracMatrix::Dirac(gamma5()),
    }
}

pub fn anticommutator(a: &ComplexMatrix4, b: &ComplexMatrix4) -> ComplexMatrix4 {
    a * b + b * a
}

/// `sum_k v_k alpha_k`.
pub fn alpha_dot(v: &Vector3<f64>) -> ComplexMatrix4 {
    alpha(1) * C64::from(v[0]) + alpha(2) * C64::from(v[1]) + alpha(3) * C64::from(v[2])
}

/// Spin operator `S_k = -(i/4) eps_klm alpha_l alpha_m`, which equals half of
/// `diag(sigma_k, sigma_k)`.
pub fn spin(k: usize) -> ComplexMatrix4 {
    assert!((1..=3).contains(&k), "spin index {k} out of range 1..=3");
    let (l, m) = match k {
        1 => (2, 3),
        2 => (3, 1),
        _ => (1, 2),
    };
    // eps_klm a_l a_m + eps_kml a_m a_l = a_l a_m - a_m a_l
    let wedge = alpha(l) * alpha(m) - alpha(m) * alpha(l);
    wedge * C64::new(0.0, -0.25)
}

/// `i beta (alpha . xhat)`, the angular factor multiplying `V2`.
pub fn radial_coupling(xhat: &Vector3<f64>) -> ComplexMatrix4 {
    beta() * alpha_dot(xhat) * I
}

/// Pointwise potential matrix `V1 I + V2 i beta (alpha . xhat)`.
pub fn potential_matrix(v1: f64, v2: f64, xhat: &Vector3<f64>) -> ComplexMatrix4 {
    ComplexMatrix4::identity() * C64::from(v1) + radial_coupling(xhat) * C64::from(v2)
}

pub fn is_hermitian(m: &ComplexMatrix4) -> bool {
    *m == m.adjoint()
}

/// Eigenvalues of a Hermitian 4x4 matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix4) -> [f64; 4] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(f64::total_cmp);
    out
}

/// Sesquilinear product `sum conj(v_k) w_k`.
pub fn hermitian_product(v: &Spinor4, w: &Spinor4) -> C64 {
    v.dotc(w)
}

fn max_abs_entry(m: &ComplexMatrix4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_abs_error: f64,
    /// Whether the identity must hold with zero error.
    pub exact: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliffordReport {
    pub checks: Vec<IdentityCheck>,
    pub all_passed: bool,
}

impl CliffordReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn exact_check(name: String, lhs: &ComplexMatrix4, rhs: &ComplexMatrix4) -> IdentityCheck {
    let err = max_abs_entry(&(lhs - rhs));
    IdentityCheck { name, max_abs_error: err, exact: true, passed: err == 0.0 }
}

/// Runs the anticommutation identities of the Dirac algebra plus the spin
/// relations `gamma5 alpha_k = 2 S_k`. Every check is exact.
///
/// The anticommutation block has 15 entries: the nine ordered pairs
/// `{alpha_i, alpha_k} = 2 delta_ik`, the three `{alpha_i, beta} = 0`,
/// `beta^2 = I`, `gamma5^2 = I` and `{gamma5, beta} = 0`. Three further
/// checks exercise the radial coupling `H = i beta (alpha . xhat)` used by
/// the potential.
pub fn clifford_report() -> CliffordReport {
    let id = ComplexMatrix4::identity();
    let zero = ComplexMatrix4::zeros();
    let mut checks = Vec::new();

    for i in 1..=3 {
        for k in 1..=3 {
            let rhs = if i == k { id * C64::from(2.0) } else { zero };
            checks.push(exact_check(
                format!("{{alpha{i}, alpha{k}}} = {}", if i == k { "2I" } else { "0" }),
                &anticommutator(&alpha(i), &alpha(k)),
                &rhs,
            ));
        }
    }
    for i in 1..=3 {
        checks.push(exact_check(format!("{{alpha{i}, beta}} = 0"), &anticommutator(&alpha(i), &beta()), &zero));
    }
    checks.push(exact_check("beta^2 = I".into(), &(beta() * beta()), &id));
    checks.push(exact_check("gamma5^2 = I".into(), &(gamma5() * gamma5()), &id));
    checks.push(exact_check("{gamma5, beta} = 0".into(), &anticommutator(&gamma5(), &beta()), &zero));

    for k in 1..=3 {
        checks.push(exact_check(
            format!("gamma5 alpha{k} = 2 S{k}"),
            &(gamma5() * alpha(k)),
            &(spin(k) * C64::from(2.0)),
        ));
    }

    let e3 = Vector3::new(0.0, 0.0, 1.0);
    let h = radial_coupling(&e3);
    checks.push(exact_check("(i beta (alpha . e3))^2 = I".into(), &(h * h), &id));
    checks.push(IdentityCheck {
        name: "i beta (alpha . e3) hermitian".into(),
        max_abs_error: max_abs_entry(&(h - h.adjoint())),
        exact: true,
        passed: is_hermitian(&h),
    });

    // V1 I + V2 H has eigenvalues V1 +- V2, each twice.
    let e1 = Vector3::new(1.0, 0.0, 0.0);
    let ev = hermitian_eigenvalues(&potential_matrix(2.0, 1.0, &e1));
    let expected = [1.0, 1.0, 3.0, 3.0];
    let err = ev.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(IdentityCheck {
        name: "spec(2 I + 1 H(e1)) = {3,3,1,1}".into(),
        max_abs_error: err,
        exact: false,
        passed: err < 1e-12,
    });

    let all_passed = checks.iter().all(|c| c.passed);
    CliffordReport { checks, all_passed }
}
