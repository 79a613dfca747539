//! Norms and estimate diagnostics: homogeneous Sobolev norms, mixed
//! space-time norms, weighted smoothing norms, the Hardy-Littlewood maximal
//! function and LHS/RHS ratios of the dispersive estimates.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::angular::{Sign, SphereGrid, ThetaRule};
use crate::evolution::{duhamel, linear_evolve, TimeGrid, Trajectory};
use crate::radial::{angular_sup, reduced_hs_norm, w_sigma, PotentialSpec, RadialPair};
use crate::spectrum::HankelTransform;
use crate::{Error, Result, C64};

/// Relative spectral energy in the top tenth of frequencies above which
/// [`hs_norm`] flags aliasing.
pub const ALIASING_THRESHOLD: f64 = 1e-8;
/// Right-hand sides below this are treated as zero by the ratio estimates.
pub const RHS_FLOOR: f64 = 1e-14;

/// `g(lambda) = lambda^2 fhat(lambda) H(lambda)` of a radial function on a
/// positive frequency grid, `H` the Heaviside cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    pub lambda: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<C64>,
}

impl FrequencyProfile {
    /// Profile of the radial function `u(r)/r`, with `u` the `l = 0`
    /// component selected by `sign`.
    pub fn from_reduced(state: &RadialPair, sign: Sign) -> Result<Self> {
        if state.idx().orbital(sign) != 0 {
            return Err(Error::UnsupportedIndex(format!(
                "frequency profile needs an l = 0 component, {} has l = {}",
                state.idx(),
                state.idx().orbital(sign)
            )));
        }
        let t = HankelTransform::new(0, state.grid());
        let spec = t.forward(state.component(sign));
        let lambda = t.lambda().to_vec();
        let weights = (0..lambda.len()).map(|k| t.weight(k)).collect();
        // 3D transform of u/r is T0[u](lambda) / lambda
        let values = spec.iter().zip(&lambda).map(|(s, l)| s * *l).collect();
        Ok(FrequencyProfile { lambda, weights, values })
    }

    /// `G(s) = sqrt(2/pi) int g(lambda) exp(i lambda s) d lambda`.
    pub fn synthesize(&self, s: f64) -> C64 {
        let c = (2.0 / PI).sqrt();
        self.lambda
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((l, w), g)| g * C64::from_polar(*w, l * s))
            .sum::<C64>()
            * c
    }
}

/// Spectral `Hdot^s` norm with its aliasing diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsNorm {
    pub value: f64,
    pub tail_fraction: f64,
    pub aliasing_warning: bool,
}

/// `||u||_{Hdot^s}^2 = sum_c int lambda^{2s} |T_{l_c} u_c|^2 d lambda`, each
/// component transformed with its own orbital degree.
pub fn hs_norm(state: &RadialPair, s: f64) -> Result<HsNorm> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("Sobolev index must be nonnegative, got {s}")));
    }
    let mut total = 0.0;
    let mut tail = 0.0;
    for sign in [Sign::Plus, Sign::Minus] {
        let comp = state.component(sign);
        if comp.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        let t = HankelTransform::new(state.idx().orbital(sign), state.grid());
        let spec = t.forward(comp);
        let n = spec.len();
        let cut = n - n / 10;
        for (k, z) in spec.iter().enumerate() {
            let e = t.weight(k) * t.lambda()[k].powf(2.0 * s) * z.norm_sqr();
            total += e;
            if k >= cut {
                tail += e;
            }
        }
    }
    let tail_fraction = if total > 0.0 { tail / total } else { 0.0 };
    Ok(HsNorm { value: total.sqrt(), tail_fraction, aliasing_warning: tail_fraction > ALIASING_THRESHOLD })
}

/// Which space-time norm [`mixed_norm`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixedNorm {
    /// `L^2_t L^inf_x`.
    L2tLinfx,
    /// `L^inf_t Hdot^1`.
    LinftH1,
    /// `max(L^2_t L^inf_x, L^inf_t Hdot^1)`.
    X,
}

impl FromStr for MixedNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L2t_Linfx" | "l2t_linfx" => Ok(MixedNorm::L2tLinfx),
            "LinftH1" | "linft_h1" => Ok(MixedNorm::LinftH1),
            "X" | "x" => Ok(MixedNorm::X),
            other => Err(Error::InvalidArgument(format!("unknown mixed norm `{other}`"))),
        }
    }
}

fn trapezoid_l2(values: &[f64], dt: f64) -> f64 {
    let n = values.len();
    let mut acc = 0.0;
    for (m, v) in values.iter().enumerate() {
        let w = if m == 0 || m + 1 == n { 0.5 } else { 1.0 };
        acc += w * v * v;
    }
    (acc * dt).sqrt()
}

/// Spatial supremum of the reconstructed field.
pub fn sup_x(state: &RadialPair) -> f64 {
    if state.idx().is_lowest() {
        return angular_sup(state, None).into_iter().fold(0.0, f64::max);
    }
    let sphere = SphereGrid::new(ThetaRule::GaussLegendre, 24, 48).expect("fixed grid");
    angular_sup(state, Some(&sphere)).into_iter().fold(0.0, f64::max)
}

/// Mixed norm of snapshots spaced `dt` apart.
pub fn mixed_norm_states(states: &[RadialPair], dt: f64, which: MixedNorm) -> f64 {
    let l2linf = || {
        let sups: Vec<f64> = states.iter().map(sup_x).collect();
        trapezoid_l2(&sups, dt)
    };
    let linfh1 = || states.iter().map(|s| reduced_hs_norm(s, 1).expect("s = 1 supported")).fold(0.0, f64::max);
    match which {
        MixedNorm::L2tLinfx => l2linf(),
        MixedNorm::LinftH1 => linfh1(),
        MixedNorm::X => l2linf().max(linfh1()),
    }
}

/// Mixed norm of a trajectory; the `L^inf_x` part includes the `1/r`
/// reconstruction weight and the angular maximum of the basis.
pub fn mixed_norm(traj: &Trajectory, which: MixedNorm) -> Result<f64> {
    if traj.states.len() < 2 {
        return Err(Error::InvalidArgument("mixed norms need at least two snapshots".into()));
    }
    Ok(mixed_norm_states(&traj.states, traj.dt(), which))
}

/// Weight parameters: `w_sigma(x) = |x| (1 + |log |x||)^sigma` and the
/// exponent `1/2 + epsilon` of `<x>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub sigma: f64,
    pub epsilon: f64,
}

impl WeightSpec {
    pub fn new(sigma: f64, epsilon: f64) -> Result<Self> {
        if !(sigma > 1.0) {
            return Err(Error::InvalidArgument(format!("sigma must exceed 1, got {sigma}")));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(WeightSpec { sigma, epsilon })
    }

    pub fn japanese_exponent(&self) -> f64 {
        0.5 + self.epsilon
    }
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec { sigma: 2.0, epsilon: 0.05 }
    }
}

/// `||w_sigma^{-1/2} u||_{L^2_t L^2_x}` over the trajectory.
pub fn smoothing_norm(traj: &Trajectory, weight: &WeightSpec) -> f64 {
    let per_time: Vec<f64> = traj
        .states
        .iter()
        .map(|s| {
            let g = s.grid();
            let acc: f64 = s.density().iter().enumerate().map(|(i, d)| d / w_sigma(g.node(i), weight.sigma)).sum();
            (acc * g.h()).sqrt()
        })
        .collect();
    trapezoid_l2(&per_time, traj.dt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNormReport {
    pub l2t_linfx: f64,
    pub linf_t_h1: f64,
    pub smoothing: f64,
    pub ratios: BTreeMap<String, f64>,
}

/// Space-time norms of `traj` and their ratios to the data norms.
pub fn mixed_norm_report(traj: &Trajectory, weight: &WeightSpec) -> Result<MixedNormReport> {
    let l2t_linfx = mixed_norm(traj, MixedNorm::L2tLinfx)?;
    let linf_t_h1 = mixed_norm(traj, MixedNorm::LinftH1)?;
    let smoothing = smoothing_norm(traj, weight);
    let f = traj.initial();
    let mut ratios = BTreeMap::new();
    let h1 = reduced_hs_norm(f, 1)?;
    ratios.insert("endpoint".to_string(), guarded(l2t_linfx, h1).ratio);
    ratios.insert("smoothing".to_string(), guarded(smoothing, f.norm()).ratio);
    Ok(MixedNormReport { l2t_linfx, linf_t_h1, smoothing, ratios })
}

/// Discrete Hardy-Littlewood maximal function of samples `g` (spacing `dx`,
/// first sample at `origin`) at the sample nearest `t`: the largest average
/// of `|g|` over windows of `2k + 1` whole cells centred there. Samples
/// outside the array count as zero.
pub fn maximal(g: &[f64], dx: f64, origin: f64, t: f64) -> f64 {
    let prefix = prefix_abs(g);
    let c = ((t - origin) / dx).round() as isize;
    maximal_from_prefix(&prefix, c)
}

fn prefix_abs(g: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(g.len() + 1);
    p.push(0.0);
    let mut acc = 0.0;
    for v in g {
        acc += v.abs();
        p.push(acc);
    }
    p
}

fn maximal_from_prefix(prefix: &[f64], c: isize) -> f64 {
    let n = prefix.len() as isize - 1;
    let window = |k: isize| {
        let lo = (c - k).clamp(0, n) as usize;
        let hi = (c + k + 1).clamp(0, n) as usize;
        (prefix[hi] - prefix[lo]) / (2 * k + 1) as f64
    };
    // beyond this half-width the window only grows over zeros
    let kmax = (c.max(n - 1 - c)).max(0);
    (0..=kmax).map(window).fold(0.0, f64::max)
}

/// One evaluated inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRatio {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or `0` when `rhs < RHS_FLOOR`.
    pub ratio: f64,
    /// Set when the right-hand side fell below [`RHS_FLOOR`].
    pub degenerate: bool,
}

fn guarded(lhs: f64, rhs: f64) -> EstimateRatio {
    if rhs < RHS_FLOOR {
        EstimateRatio { lhs, rhs, ratio: 0.0, degenerate: true }
    } else {
        EstimateRatio { lhs, rhs, ratio: lhs / rhs, degenerate: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Endpoint,
    MaximalBound,
    Smoothing,
    Nonhom,
    Interpol0,
    Interpol1,
}

impl EstimateKind {
    pub const ALL: [EstimateKind; 6] = [
        EstimateKind::Endpoint,
        EstimateKind::MaximalBound,
        EstimateKind::Smoothing,
        EstimateKind::Nonhom,
        EstimateKind::Interpol0,
        EstimateKind::Interpol1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EstimateKind::Endpoint => "endpoint",
            EstimateKind::MaximalBound => "maximal_bound",
            EstimateKind::Smoothing => "smoothing",
            EstimateKind::Nonhom => "nonhom",
            EstimateKind::Interpol0 => "interpol_0",
            EstimateKind::Interpol1 => "interpol_1",
        }
    }
}

impl fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown estimate `{s}`")))
    }
}

/// Inputs shared by the estimate diagnostics.
#[derive(Debug, Clone)]
pub struct EstimateInputs<'a> {
    pub data: &'a RadialPair,
    pub pot: Option<&'a PotentialSpec>,
    pub tgrid: TimeGrid,
    pub weight: WeightSpec,
    /// Source samples on `tgrid` for the inhomogeneous estimate.
    pub forcing: Option<&'a [RadialPair]>,
}

pub fn estimate_ratio(kind: EstimateKind, inputs: &EstimateInputs<'_>) -> Result<EstimateRatio> {
    match kind {
        EstimateKind::Endpoint => endpoint_ratio(inputs.data, inputs.pot, inputs.tgrid),
        EstimateKind::Smoothing => smoothing_ratio(inputs.data, inputs.pot, inputs.tgrid, &inputs.weight),
        EstimateKind::MaximalBound => maximal_bound_ratio(inputs.data, inputs.tgrid.horizon()),
        EstimateKind::Nonhom => {
            let forcing = inputs
                .forcing
                .ok_or_else(|| Error::InvalidArgument("inhomogeneous estimate needs a forcing".into()))?;
            nonhom_ratio(forcing, inputs.pot, inputs.tgrid, &inputs.weight)
        }
        EstimateKind::Interpol0 => interpol_ratio(inputs.data, 0),
        EstimateKind::Interpol1 => interpol_ratio(inputs.data, 1),
    }
}

/// `||exp(-it(D+V)) f||_{L^2_t L^inf_x} / ||f||_{Hdot^1}` on `[0, T]`.
pub fn endpoint_ratio(f: &RadialPair, pot: Option<&PotentialSpec>, tgrid: TimeGrid) -> Result<EstimateRatio> {
    let traj = linear_evolve(f, pot, tgrid)?;
    let lhs = mixed_norm(&traj, MixedNorm::L2tLinfx)?;
    Ok(guarded(lhs, hs_norm(f, 1.0)?.value))
}

/// `||w_sigma^{-1/2} exp(-it(D+V)) f||_{L^2_t L^2_x} / ||f||_{L^2}` on `[0, T]`.
pub fn smoothing_ratio(
    f: &RadialPair,
    pot: Option<&PotentialSpec>,
    tgrid: TimeGrid,
    weight: &WeightSpec,
) -> Result<EstimateRatio> {
    let traj = linear_evolve(f, pot, tgrid)?;
    Ok(guarded(smoothing_norm(&traj, weight), f.norm()))
}

/// `sup_t sup_x |exp(it|D|) f| / M(G)(t)` over `t` in `[0, T]` for the
/// radial function `f = u+/r` (the `l = 0` component of a `k = -1`
/// channel), where `G` is the synthesis of the [`FrequencyProfile`].
///
/// Spatial radii and maximal-function windows share the cell size, so the
/// window of `2k + 1` cells is the interval `[t - r_k, t + r_k]`.
pub fn maximal_bound_ratio(f: &RadialPair, horizon: f64) -> Result<EstimateRatio> {
    let profile = FrequencyProfile::from_reduced(f, Sign::Plus)?;
    let grid = f.grid();
    let h = grid.h();
    let n = grid.len();
    let t_steps = (horizon / h).round().max(1.0) as isize;
    // samples of G at s = j h for |j| <= t_steps + n
    let span = t_steps + n as isize;
    let g_abs: Vec<f64> = (-span..=span).map(|j| profile.synthesize(j as f64 * h).norm()).collect();
    let prefix = prefix_abs(&g_abs);

    let c = (2.0 / PI).sqrt();
    let spec: Vec<C64> = profile.values.iter().zip(&profile.lambda).map(|(g, l)| g / *l).collect();
    let mut worst: f64 = 0.0;
    let mut lhs_at_worst = 0.0;
    let mut rhs_at_worst = 0.0;
    let stride = (t_steps / 64).max(1);
    let mut m = 0;
    while m <= t_steps {
        let t = m as f64 * h;
        let phases: Vec<C64> = profile
            .lambda
            .iter()
            .zip(&profile.weights)
            .zip(&spec)
            .map(|((l, w), s)| s * C64::from_polar(*w, l * t))
            .collect();
        let mut sup: f64 = 0.0;
        for i in 0..n {
            let r = grid.node(i);
            let u: C64 = profile.lambda.iter().zip(&phases).map(|(l, p)| p * (l * r).sin()).sum::<C64>() * c;
            sup = sup.max(u.norm() / r);
        }
        let mg = maximal_from_prefix(&prefix, m + span);
        let q = guarded(sup, mg);
        if q.ratio > worst {
            worst = q.ratio;
            lhs_at_worst = sup;
            rhs_at_worst = mg;
        }
        m += stride;
    }
    if rhs_at_worst == 0.0 {
        return Ok(guarded(0.0, 0.0));
    }
    Ok(EstimateRatio { lhs: lhs_at_worst, rhs: rhs_at_worst, ratio: worst, degenerate: false })
}

/// `||<x>^{1/2+eps} |D| F||_{L^2_t L^2_x}` of a source sampled on `tgrid`.
fn weighted_source_norm(forcing: &[RadialPair], tgrid: TimeGrid, weight: &WeightSpec) -> f64 {
    let first = &forcing[0];
    let grid = first.grid();
    let tp = HankelTransform::new(first.idx().orbital(Sign::Plus), grid);
    let tm = HankelTransform::new(first.idx().orbital(Sign::Minus), grid);
    let bracket: Vec<f64> =
        grid.nodes().iter().map(|r| (1.0 + r * r).powf(weight.japanese_exponent())).collect();
    let per_time: Vec<f64> = forcing
        .iter()
        .map(|s| {
            let dp = tp.multiplier(s.plus(), |l| l);
            let dm = tm.multiplier(s.minus(), |l| l);
            let acc: f64 = dp
                .iter()
                .zip(&dm)
                .zip(&bracket)
                .map(|((a, b), w)| w * (a.norm_sqr() + b.norm_sqr()))
                .sum();
            (acc * grid.h()).sqrt()
        })
        .collect();
    trapezoid_l2(&per_time, tgrid.dt())
}

/// `||int_0^t exp(-i(t-s)(D+V)) F(s) ds||_{L^2_t L^inf_x} / ||<x>^{1/2+} |D| F||_{L^2_t L^2_x}`.
pub fn nonhom_ratio(
    forcing: &[RadialPair],
    pot: Option<&PotentialSpec>,
    tgrid: TimeGrid,
    weight: &WeightSpec,
) -> Result<EstimateRatio> {
    let w = duhamel(forcing, pot, tgrid)?;
    let lhs = mixed_norm(&w, MixedNorm::L2tLinfx)?;
    Ok(guarded(lhs, weighted_source_norm(forcing, tgrid, weight)))
}

/// Oversampling of the frequency grid used by [`interpol_ratio`].
const INTERPOL_OVERSAMPLE: usize = 4;

/// `||<rho>^k F_{lambda -> rho}(lambda fhat(lambda) H(lambda))||_{L^2} / ||<x>^k f||_{L^2}`
/// for the radial function `f = u+/r`, `k` in `{0, 1}`, in reduced
/// normalisation (both sides divided by `sqrt(4 pi)`).
///
/// The half-line spectrum is sampled on a grid `q` times finer than the
/// sine-transform grid up to the cell Nyquist frequency, which keeps the
/// discrete Plancherel identity exact, and carried to `rho` by an FFT.
pub fn interpol_ratio(f: &RadialPair, k: u32) -> Result<EstimateRatio> {
    if k > 1 {
        return Err(Error::InvalidArgument(format!("interpolation endpoints are k = 0, 1, got {k}")));
    }
    if f.idx().orbital(Sign::Plus) != 0 {
        return Err(Error::UnsupportedIndex(format!("needs an l = 0 plus component, got {}", f.idx())));
    }
    let grid = f.grid();
    let h = grid.h();
    let u = f.plus();
    let q = INTERPOL_OVERSAMPLE;
    let nl = q * grid.len();
    let dl = PI / (q as f64 * grid.radius());
    let c = (2.0 / PI).sqrt();
    let nodes = grid.nodes();
    // lambda_j = j dl, j = 1..=nl; the last node sits at the cell Nyquist frequency
    let phi: Vec<C64> = (1..=nl)
        .map(|j| {
            let lam = j as f64 * dl;
            let w = if j == nl { 0.5 } else { 1.0 };
            let s: C64 = u.iter().zip(&nodes).map(|(v, r)| v * (lam * r).sin()).sum();
            s * (c * h * (w * dl).sqrt())
        })
        .collect();

    let len = (4 * nl).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); len];
    buf[1..=nl].copy_from_slice(&phi);
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    // unitary scaling: sum_m drho |F(rho_m)|^2 = sum_j |phi_j|^2
    let drho = 2.0 * PI / (len as f64 * dl);
    let mut lhs2 = 0.0;
    for (m, z) in buf.iter().enumerate() {
        let mm = if m < len / 2 { m as f64 } else { m as f64 - len as f64 };
        let rho = mm * drho;
        let weight = if k == 0 { 1.0 } else { 1.0 + rho * rho };
        lhs2 += weight * z.norm_sqr() / len as f64;
    }
    let rhs2: f64 = u
        .iter()
        .zip(&nodes)
        .map(|(v, r)| if k == 0 { v.norm_sqr() } else { (1.0 + r * r) * v.norm_sqr() })
        .sum::<f64>()
        * h;
    Ok(guarded(lhs2.sqrt(), rhs2.sqrt()))
}
