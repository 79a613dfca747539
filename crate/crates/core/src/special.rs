//! Associated Legendre functions, spherical harmonics and Riccati-Bessel
//! functions.

use std::f64::consts::PI;

use crate::{Error, Result, C64};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Associated Legendre function `P_l^m(x)` from the Rodrigues form
/// `(-1)^m / (2^l l!) (1 - x^2)^(m/2) d^(l+m)/dx^(l+m) (x^2 - 1)^l`,
/// Condon-Shortley phase included.
///
/// Negative `m` uses `P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m`, which is what the
/// Rodrigues form gives for `m < 0`. Accurate for `l` up to about 15.
pub fn legendre(l: u32, m: i32, x: f64) -> Result<f64> {
    if m.unsigned_abs() > l {
        return Err(Error::InvalidArgument(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("x = {x} outside [-1, 1]")));
    }
    if m < 0 {
        let mp = m.unsigned_abs();
        let sign = if mp.is_multiple_of(2) { 1.0 } else { -1.0 };
        return Ok(sign * factorial(l - mp) / factorial(l + mp) * legendre(l, mp as i32, x)?);
    }
    let m = m as u32;
    let order = l + m;
    // (x^2 - 1)^l = sum_k C(l,k) (-1)^(l-k) x^(2k); differentiate `order` times.
    let mut poly = 0.0;
    for k in 0..=l {
        let p = 2 * k;
        if p < order {
            continue;
        }
        let coeff = binomial(l, k) * if (l - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let falling = factorial(p) / factorial(p - order);
        poly += coeff * falling * x.powi((p - order) as i32);
    }
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let envelope = (1.0 - x * x).max(0.0).powf(m as f64 / 2.0);
    Ok(sign / (2f64.powi(l as i32) * factorial(l)) * envelope * poly)
}

/// Orthonormal spherical harmonic
/// `Y_l^m = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) e^{i m phi} P_l^m(cos theta)`.
pub fn sph_harm(l: u32, m: i32, theta: f64, phi: f64) -> Result<C64> {
    if m.unsigned_abs() > l {
        return Err(Error::InvalidArgument(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let lm = (l as i32 - m) as u32;
    let lp = (l as i32 + m) as u32;
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(lm) / factorial(lp)).sqrt();
    let p = legendre(l, m, theta.cos().clamp(-1.0, 1.0))?;
    Ok(C64::from_polar(norm * p, m as f64 * phi))
}

/// Riccati-Bessel function `x j_l(x)`.
pub fn riccati_bessel(l: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.abs() < l as f64 + 1.0 {
        return riccati_series(l, x);
    }
    let (s, c) = x.sin_cos();
    let mut prev = s;
    if l == 0 {
        return prev;
    }
    let mut cur = s / x - c;
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn riccati_series(l: u32, x: f64) -> f64 {
    // x j_l(x) = x^{l+1}/(2l+1)!! sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    let mut double_fact = 1.0;
    for k in 1..=l {
        double_fact *= (2 * k + 1) as f64;
    }
    let lead = x.powi(l as i32 + 1) / double_fact;
    let y = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= y / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}
