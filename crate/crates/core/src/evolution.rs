//! Time integration of the reduced system: Cayley (Crank-Nicolson) steps,
//! trapezoidal Duhamel quadrature, the exact nonlinear phase substep, Strang
//! splitting and the Picard iteration on the integral equation.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::analysis::{mixed_norm_states, MixedNorm};
use crate::angular::{AngularIndex, Sign};
use crate::nonlinear::{f_reduced, reduced_scalar, NonlinearityKind};
use crate::radial::{admissibility, d_apply, origin_parity, PotentialSpec, RadialGrid, RadialPair};
use crate::{Error, Result, C64};

type Block = Matrix2<C64>;

/// Fraction of `R` watched by the support monitor.
pub const MONITOR_SHELL: f64 = 0.05;
/// Relative mass in the watched shell that triggers a warning.
pub const MONITOR_THRESHOLD: f64 = 1e-8;

/// Uniform time grid `t_m = m T / M`, `m = 0..=M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidArgument(format!("time horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("need at least one time step".into()));
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn time(&self, m: usize) -> f64 {
        self.horizon * m as f64 / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|m| self.time(m)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Cayley,
    Duhamel,
    Strang,
    Picard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub scheme: Scheme,
    pub potential: bool,
    pub nonlinearity: Option<NonlinearityKind>,
    pub tgrid: TimeGrid,
}

/// Snapshots at every point of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub meta: TrajectoryMeta,
    pub states: Vec<RadialPair>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    fn new(meta: TrajectoryMeta, states: Vec<RadialPair>) -> Self {
        let mut t = Trajectory { meta, states, warnings: Vec::new() };
        t.monitor_support();
        t
    }

    pub fn times(&self) -> Vec<f64> {
        self.meta.tgrid.times()
    }

    pub fn dt(&self) -> f64 {
        self.meta.tgrid.dt()
    }

    pub fn initial(&self) -> &RadialPair {
        &self.states[0]
    }

    pub fn last(&self) -> &RadialPair {
        self.states.last().expect("trajectories are never empty")
    }

    /// Largest relative deviation of `||u(t_m)||^2` from `||u(0)||^2`.
    pub fn charge_drift(&self) -> f64 {
        let q0 = self.states[0].norm().powi(2);
        let worst = self.states.iter().map(|s| (s.norm().powi(2) - q0).abs()).fold(0.0, f64::max);
        if q0 == 0.0 {
            worst
        } else {
            worst / q0
        }
    }

    fn monitor_support(&mut self) {
        let tgrid = self.meta.tgrid;
        if let Some((m, frac)) = self
            .states
            .iter()
            .enumerate()
            .map(|(m, s)| (m, s.outer_mass_fraction(MONITOR_SHELL)))
            .find(|(_, f)| *f > MONITOR_THRESHOLD)
        {
            self.warnings.push(format!(
                "support monitor: mass fraction {frac:.3e} within {}% of R at t = {}",
                MONITOR_SHELL * 100.0,
                tgrid.time(m)
            ));
        }
    }
}

/// Precomputed block-tridiagonal factorisation of `I + i dt/2 d`.
#[derive(Debug, Clone)]
pub struct CayleyPropagator {
    idx: AngularIndex,
    grid: RadialGrid,
    dt: f64,
    pot: Option<PotentialSpec>,
    lower: Block,
    inv: Vec<Block>,
    upper_hat: Vec<Block>,
}

impl CayleyPropagator {
    pub fn new(idx: AngularIndex, grid: RadialGrid, pot: Option<&PotentialSpec>, dt: f64) -> Result<Self> {
        if let Some(p) = pot {
            if p.grid() != grid {
                return Err(Error::GridMismatch(format!("potential on {:?}, state on {:?}", p.grid(), grid)));
            }
        }
        if !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step must be finite, got {dt}")));
        }
        let n = grid.len();
        let h = grid.h();
        let k = idx.kappa() as f64;
        let z = C64::new(0.0, 0.0);
        let c = C64::from(0.5 / h);
        let itau = C64::new(0.0, 0.5 * dt);
        // coupling of row i to i-1 and i+1 in d
        let a = Block::new(z, c, -c, z);
        let up = Block::new(z, -c, c, z);
        let lower = a * itau;
        let upper = up * itau;
        let parity = Block::new(
            origin_parity(&idx, Sign::Plus).into(),
            z,
            z,
            origin_parity(&idx, Sign::Minus).into(),
        );

        let mut inv = Vec::with_capacity(n);
        let mut upper_hat = Vec::with_capacity(n);
        for i in 0..n {
            let r = grid.node(i);
            let (v1, v2) = pot.map_or((0.0, 0.0), |p| (p.v1()[i], p.v2()[i]));
            let w = C64::from(k / r + v2);
            let v1 = C64::from(v1);
            let mut b = Block::new(v1, w, w, v1);
            if i == 0 {
                b += a * parity;
            }
            let mut s = Block::identity() + b * itau;
            if i > 0 {
                s -= lower * upper_hat[i - 1];
            }
            let si = s.try_inverse().ok_or(Error::SolverBreakdown { block: i })?;
            upper_hat.push(si * upper);
            inv.push(si);
        }
        Ok(CayleyPropagator { idx, grid, dt, pot: pot.cloned(), lower, inv, upper_hat })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `(I + i dt/2 d)^{-1} (I - i dt/2 d) state`.
    pub fn apply(&self, state: &RadialPair) -> Result<RadialPair> {
        if state.grid() != self.grid {
            return Err(Error::GridMismatch(format!("propagator on {:?}, state on {:?}", self.grid, state.grid())));
        }
        if state.idx().kappa() != self.idx.kappa() || state.idx().two_j() != self.idx.two_j() {
            return Err(Error::InvalidArgument(format!(
                "propagator built for {}, state in {}",
                self.idx,
                state.idx()
            )));
        }
        let du = d_apply(state, self.pot.as_ref())?;
        let itau = C64::new(0.0, 0.5 * self.dt);
        let rhs = state.combine(C64::from(1.0), &du, -itau)?;
        Ok(self.solve(&rhs))
    }

    fn solve(&self, rhs: &RadialPair) -> RadialPair {
        let n = self.grid.len();
        let mut d: Vec<nalgebra::Vector2<C64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = nalgebra::Vector2::new(rhs.plus()[i], rhs.minus()[i]);
            if i > 0 {
                v -= self.lower * d[i - 1];
            }
            d.push(self.inv[i] * v);
        }
        for i in (0..n - 1).rev() {
            let next = d[i + 1];
            d[i] -= self.upper_hat[i] * next;
        }
        let (plus, minus) = d.into_iter().map(|v| (v[0], v[1])).unzip();
        RadialPair::new(rhs.idx(), rhs.grid(), plus, minus).expect("lengths preserved")
    }
}

/// One Cayley step; builds a fresh propagator, so prefer
/// [`CayleyPropagator`] in loops.
pub fn cayley_step(state: &RadialPair, pot: Option<&PotentialSpec>, dt: f64) -> Result<RadialPair> {
    CayleyPropagator::new(state.idx(), state.grid(), pot, dt)?.apply(state)
}

fn meta(scheme: Scheme, pot: Option<&PotentialSpec>, kind: Option<NonlinearityKind>, tgrid: TimeGrid) -> TrajectoryMeta {
    TrajectoryMeta { scheme, potential: pot.is_some_and(|p| !p.is_zero()), nonlinearity: kind, tgrid }
}

/// Linear flow `exp(-it(D+V)) f` sampled on `tgrid`.
pub fn linear_evolve(f: &RadialPair, pot: Option<&PotentialSpec>, tgrid: TimeGrid) -> Result<Trajectory> {
    let prop = CayleyPropagator::new(f.idx(), f.grid(), pot, tgrid.dt())?;
    let mut states = Vec::with_capacity(tgrid.steps() + 1);
    states.push(f.clone());
    for m in 0..tgrid.steps() {
        let next = prop.apply(&states[m])?;
        states.push(next);
    }
    Ok(Trajectory::new(meta(Scheme::Cayley, pot, None, tgrid), states))
}

fn duhamel_with(prop: &CayleyPropagator, forcing: &[RadialPair], tgrid: TimeGrid) -> Result<Vec<RadialPair>> {
    if forcing.len() != tgrid.steps() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} forcing samples for {} time nodes",
            forcing.len(),
            tgrid.steps() + 1
        )));
    }
    let half = C64::new(0.0, -0.5 * tgrid.dt());
    let mut states = Vec::with_capacity(forcing.len());
    states.push(RadialPair::zeros(forcing[0].idx(), forcing[0].grid()));
    for m in 0..tgrid.steps() {
        let pre = states[m].combine(C64::from(1.0), &forcing[m], half)?;
        let next = prop.apply(&pre)?.combine(C64::from(1.0), &forcing[m + 1], half)?;
        states.push(next);
    }
    Ok(states)
}

/// Solution `w` of `i w_t = (D+V) w + F`, `w(0) = 0`, by trapezoidal
/// quadrature of the Duhamel integral with Cayley propagation.
pub fn duhamel(forcing: &[RadialPair], pot: Option<&PotentialSpec>, tgrid: TimeGrid) -> Result<Trajectory> {
    let first = forcing.first().ok_or_else(|| Error::InvalidArgument("empty forcing".into()))?;
    let prop = CayleyPropagator::new(first.idx(), first.grid(), pot, tgrid.dt())?;
    let states = duhamel_with(&prop, forcing, tgrid)?;
    Ok(Trajectory::new(meta(Scheme::Duhamel, pot, None, tgrid), states))
}

/// Exact flow of `i u_t = c(|u|) u` over `dt`: the phase `exp(-i dt c(r))`,
/// with `c` conserved along the substep.
pub fn nonlinear_substep(state: &RadialPair, kind: NonlinearityKind, dt: f64) -> RadialPair {
    let c = reduced_scalar(state, kind);
    let mut out = state.clone();
    let (plus, minus) = out.components_mut();
    for (i, c) in c.into_iter().enumerate() {
        let rot = C64::from_polar(1.0, -dt * c);
        plus[i] *= rot;
        minus[i] *= rot;
    }
    out
}

/// Strang splitting: half nonlinear, full linear, half nonlinear per step.
/// With `kind = None` this is the plain Cayley flow.
pub fn strang_evolve(
    f: &RadialPair,
    pot: Option<&PotentialSpec>,
    kind: Option<NonlinearityKind>,
    tgrid: TimeGrid,
) -> Result<Trajectory> {
    if kind.is_some() && !f.idx().is_lowest() {
        return Err(Error::UnsupportedIndex(format!("nonlinear evolution needs j = 1/2, got {}", f.idx())));
    }
    let dt = tgrid.dt();
    let prop = CayleyPropagator::new(f.idx(), f.grid(), pot, dt)?;
    let mut states = Vec::with_capacity(tgrid.steps() + 1);
    states.push(f.clone());
    for m in 0..tgrid.steps() {
        let next = match kind {
            Some(k) => {
                let a = nonlinear_substep(&states[m], k, 0.5 * dt);
                nonlinear_substep(&prop.apply(&a)?, k, 0.5 * dt)
            }
            None => prop.apply(&states[m])?,
        };
        states.push(next);
    }
    let mut traj = Trajectory::new(meta(Scheme::Strang, pot, kind, tgrid), states);
    if let Some(p) = pot {
        let adm = admissibility(p);
        if !adm.admissible {
            traj.warnings.push(format!("potential not admissible (margin {:.3e})", adm.margin));
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions { max_iters: 50, tol: 1e-12 }
    }
}

/// One Picard iteration `u_{n+1} = Phi(u_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardLogEntry {
    pub iteration: usize,
    /// `||u_{n+1} - u_n||_X`.
    pub increment: f64,
    /// `||u_{n+1}||_X`.
    pub x_norm: f64,
    /// `||u_{n+1} - u_n||_X / ||u_n - u_{n-1}||_X`.
    pub ratio: Option<f64>,
    /// `ratio / (||u_n||_X^2 + ||u_{n-1}||_X^2)`.
    pub normalized_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    pub iterations: usize,
    pub converged: bool,
    pub log: Vec<PicardLogEntry>,
}

impl PicardOutcome {
    /// Empirical contraction factor: the largest increment ratio recorded
    /// while the increments were above roundoff. Zero when no ratio was
    /// measurable.
    pub fn contraction_factor(&self) -> f64 {
        self.log.iter().filter_map(|e| e.ratio).fold(0.0, f64::max)
    }
}

/// Picard iteration `u_{n+1}(t) = exp(-it(D+V)) f - i int_0^t exp(-i(t-s)(D+V)) F(u_n(s)) ds`
/// starting from the free evolution. Stops when the X-norm increment drops
/// below `tol`. Non-convergence is reported in the outcome, not as an error.
pub fn picard_solve(
    f: &RadialPair,
    pot: Option<&PotentialSpec>,
    kind: NonlinearityKind,
    tgrid: TimeGrid,
    opts: PicardOptions,
) -> Result<PicardOutcome> {
    if !f.idx().is_lowest() {
        return Err(Error::UnsupportedIndex(format!("nonlinear evolution needs j = 1/2, got {}", f.idx())));
    }
    let dt = tgrid.dt();
    let prop = CayleyPropagator::new(f.idx(), f.grid(), pot, dt)?;
    let free = linear_evolve(f, pot, tgrid)?.states;
    let x_norm = |states: &[RadialPair]| mixed_norm_states(states, dt, MixedNorm::X);
    let floor = 1e-13 * x_norm(&free).max(f64::MIN_POSITIVE);

    let mut current = free.clone();
    let mut current_norm = x_norm(&current);
    let mut prev_norm = current_norm;
    let mut prev_increment: Option<f64> = None;
    let mut log = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let forcing = current.iter().map(|s| f_reduced(s, kind)).collect::<Result<Vec<_>>>()?;
        let w = duhamel_with(&prop, &forcing, tgrid)?;
        let next = free.iter().zip(&w).map(|(a, b)| a.combine(C64::from(1.0), b, C64::from(1.0))).collect::<Result<Vec<_>>>()?;
        let diff = next.iter().zip(&current).map(|(a, b)| a.combine(C64::from(1.0), b, C64::from(-1.0))).collect::<Result<Vec<_>>>()?;
        let increment = x_norm(&diff);
        let next_norm = x_norm(&next);
        let ratio = prev_increment.filter(|p| *p > floor).map(|p| increment / p);
        let normalized_constant = ratio.map(|q| {
            let s = current_norm.powi(2) + prev_norm.powi(2);
            if s > 0.0 {
                q / s
            } else {
                0.0
            }
        });
        log.push(PicardLogEntry { iteration: iterations, increment, x_norm: next_norm, ratio, normalized_constant });
        prev_norm = current_norm;
        current_norm = next_norm;
        current = next;
        prev_increment = Some(increment);
        if !increment.is_finite() || increment > 1e6 * (1.0 + x_norm(&free)) {
            break;
        }
        if increment < opts.tol {
            converged = true;
            break;
        }
    }
    let trajectory = Trajectory::new(meta(Scheme::Picard, pot, Some(kind), tgrid), current);
    Ok(PicardOutcome { trajectory, iterations, converged, log })
}
