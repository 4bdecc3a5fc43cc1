//! Outward integration of the regularised profile equation
//!
//! ```text
//! v'' + (n-1)/r v' - v + r^{-sigma} |v|^{p-2} v = 0,   v(0) = v0,
//! ```
//!
//! with an embedded Dormand-Prince 5(4) pair and a power-series seed that
//! bridges the weak singularity at the origin.

use std::fmt;

use crate::error::{Error, Result};
use crate::params::ModelParams;

pub type State = [f64; 2];

/// Why an outward integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    /// `v` reached zero: the shooting value overshoots.
    ZeroCrossing,
    /// `v'` became positive: the shooting value undershoots.
    TurnedUp,
    ReachedRmax,
    StepFailure,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Termination::ZeroCrossing => "ZeroCrossing",
            Termination::TurnedUp => "TurnedUp",
            Termination::ReachedRmax => "ReachedRmax",
            Termination::StepFailure => "StepFailure",
        };
        f.write_str(s)
    }
}

/// Coefficients of the profile equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOde {
    pub sigma: f64,
    pub p: f64,
    /// Effective dimension `n`; the friction term is `(n-1)/r`.
    pub dim: f64,
}

impl ProfileOde {
    pub fn new(sigma: f64, p: f64, dim: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&sigma) {
            return Err(Error::InvalidParams(format!("weight exponent sigma={sigma} must lie in [0, 2)")));
        }
        if !(p > 2.0) || !(dim > sigma) {
            return Err(Error::InvalidParams(format!("need p > 2 and n > sigma (p={p}, n={dim})")));
        }
        Ok(ProfileOde { sigma, p, dim })
    }

    pub fn from_params(params: &ModelParams) -> Result<Self> {
        let k = params.derive();
        Self::new(k.sigma, params.p, k.effective_dim)
    }

    pub fn nonlinearity(&self, r: f64, v: f64) -> f64 {
        r.powf(-self.sigma) * v.abs().powf(self.p - 2.0) * v
    }

    pub fn rhs(&self, r: f64, y: &State) -> State {
        [y[1], -(self.dim - 1.0) / r * y[1] + y[0] - self.nonlinearity(r, y[0])]
    }

    /// `v'' + (n-1)/r v' - v + r^{-sigma} v^{p-1}` and the magnitude of its
    /// largest term, for residual normalisation.
    pub fn residual(&self, r: f64, v: f64, dv: f64, d2v: f64) -> (f64, f64) {
        let terms = [d2v, (self.dim - 1.0) / r * dv, -v, self.nonlinearity(r, v)];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        (terms.iter().sum(), scale)
    }
}

/// Leading terms of the expansion at the origin:
/// `v = v0 + v0 r^2/(2n) - v0^{p-1} r^{2-sigma}/((2-sigma)(n-sigma))`.
pub fn seed_series(v0: f64, r: f64, ode: &ProfileOde) -> Result<State> {
    if !(v0 > 0.0) {
        return Err(Error::InvalidParams(format!("seed amplitude must be positive (got {v0})")));
    }
    if !(ode.sigma < 2.0) {
        return Err(Error::InvalidParams(format!("series needs sigma < 2 (got {})", ode.sigma)));
    }
    let n = ode.dim;
    let s = ode.sigma;
    let g = v0.powf(ode.p - 1.0);
    let v = v0 + v0 * r * r / (2.0 * n) - g * r.powf(2.0 - s) / ((2.0 - s) * (n - s));
    let dv = v0 * r / n - g * r.powf(1.0 - s) / (n - s);
    Ok([v, dv])
}

/// Largest `r` for which the series corrections stay below `1e-3 tol v0`.
pub fn seed_radius(v0: f64, ode: &ProfileOde, tol: f64) -> f64 {
    let n = ode.dim;
    let s = ode.sigma;
    let g = v0.powf(ode.p - 1.0);
    let corr = |r: f64| v0 * r * r / (2.0 * n) + g * r.powf(2.0 - s) / ((2.0 - s) * (n - s));
    let target = 1e-3 * tol * v0;
    let (mut lo, mut hi) = (-300.0f64, 0.0f64);
    if corr(hi.exp()) < target {
        return 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if corr(mid.exp()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp()
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince step; returns the fifth-order solution and the
/// embedded error estimate.
fn dopri_step(ode: &ProfileOde, r: f64, y: &State, h: f64) -> (State, State) {
    let mut k = [[0.0; 2]; 7];
    k[0] = ode.rhs(r, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = ode.rhs(r + C[s] * h, &ys);
        if s == 6 {
            let mut err = [0.0; 2];
            for (j, kj) in k.iter().enumerate() {
                err[0] += h * E[j] * kj[0];
                err[1] += h * E[j] * kj[1];
            }
            return (ys, err);
        }
    }
    unreachable!()
}

/// Adaptive stepping controller shared by every integration in the crate.
#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    pub ode: ProfileOde,
    pub tol: f64,
}

impl Stepper {
    fn error_ratio(&self, y0: &State, y1: &State, err: &State) -> f64 {
        let scale = y0[0].abs().max(y0[1].abs()).max(y1[0].abs()).max(y1[1].abs());
        let sc = f64::MIN_POSITIVE + self.tol * scale;
        err[0].abs().max(err[1].abs()) / sc
    }

    /// Attempts steps from `r` with trial size `h` until one is accepted.
    /// Returns `(r_new, y_new, h_next)`.
    fn accept(&self, r: f64, y: &State, mut h: f64, limit: f64) -> Result<(f64, State, f64)> {
        loop {
            let clipped = (limit - r).abs() <= h.abs();
            let step = if clipped { limit - r } else { h };
            if !(step.abs() > 1e-15 * r.abs()) && !clipped {
                return Err(Error::StepFailure { r });
            }
            let (y1, err) = dopri_step(&self.ode, r, y, step);
            let ratio = self.error_ratio(y, &y1, &err);
            if ratio.is_finite() && ratio <= 1.0 && y1.iter().all(|x| x.is_finite()) {
                let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                let r1 = if clipped { limit } else { r + step };
                let h_next = if clipped { h } else { step * grow };
                return Ok((r1, y1, h_next));
            }
            let shrink = if ratio.is_finite() { (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
            h = step * shrink;
            if !(h.abs() > 1e-15 * r.abs().max(1e-300)) {
                return Err(Error::StepFailure { r });
            }
        }
    }

    /// Integrates from `(r0, y0)` to exactly `r1` (either direction).
    pub fn advance(&self, r0: f64, y0: State, r1: f64, h0: f64) -> Result<(State, f64)> {
        let dir = (r1 - r0).signum();
        let mut h = h0.abs().min((r1 - r0).abs()).max(1e-300) * dir;
        let (mut r, mut y) = (r0, y0);
        if r0 == r1 {
            return Ok((y0, h0));
        }
        loop {
            let (rn, yn, hn) = self.accept(r, &y, h, r1)?;
            r = rn;
            y = yn;
            h = hn;
            if r == r1 {
                return Ok((y, h));
            }
        }
    }
}

/// Accepted steps of an outward integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    pub termination: Termination,
}

fn classify_state(y: &State) -> Option<Termination> {
    if !(y[0] > 0.0) {
        Some(Termination::ZeroCrossing)
    } else if y[1] > 0.0 {
        Some(Termination::TurnedUp)
    } else {
        None
    }
}

/// Integrates from the series seed until a termination event or `r_max`.
pub fn integrate(ode: &ProfileOde, v0: f64, r_max: f64, tol: f64) -> Result<Trajectory> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive (got {tol})")));
    }
    let r_seed = seed_radius(v0, ode, tol);
    if !(r_max > r_seed) {
        return Err(Error::InvalidParams(format!("r_max={r_max} must exceed the seed radius {r_seed:e}")));
    }
    let y0 = seed_series(v0, r_seed, ode)?;
    let stepper = Stepper { ode: *ode, tol };
    let mut traj = Trajectory { r: vec![r_seed], v: vec![y0[0]], dv: vec![y0[1]], termination: Termination::ReachedRmax };
    let (mut r, mut y, mut h) = (r_seed, y0, 0.01 * r_seed);
    while r < r_max {
        match stepper.accept(r, &y, h, r_max) {
            Ok((rn, yn, hn)) => {
                r = rn;
                y = yn;
                h = hn;
            }
            Err(_) => {
                traj.termination = Termination::StepFailure;
                return Ok(traj);
            }
        }
        traj.r.push(r);
        traj.v.push(y[0]);
        traj.dv.push(y[1]);
        if let Some(t) = classify_state(&y) {
            traj.termination = t;
            return Ok(traj);
        }
    }
    Ok(traj)
}

/// Termination flag only, for bisection.
pub fn shoot_flag(ode: &ProfileOde, v0: f64, r_max: f64, tol: f64) -> Result<Termination> {
    Ok(integrate(ode, v0, r_max, tol)?.termination)
}

/// Values at prescribed increasing `nodes`; stops at the first node where a
/// termination event is seen. Nodes inside the seed radius use the series.
#[derive(Debug, Clone)]
pub struct NodeRun {
    pub states: Vec<State>,
    pub termination: Termination,
    pub r_seed: f64,
}

pub fn integrate_nodes(ode: &ProfileOde, v0: f64, nodes: &[f64], tol: f64) -> Result<NodeRun> {
    let r_seed = seed_radius(v0, ode, tol);
    let stepper = Stepper { ode: *ode, tol };
    let mut states = Vec::with_capacity(nodes.len());
    let mut cur_r = r_seed;
    let mut cur = seed_series(v0, r_seed, ode)?;
    let mut h = 0.01 * r_seed;
    for &rn in nodes {
        if rn <= r_seed {
            states.push(seed_series(v0, rn, ode)?);
            continue;
        }
        match stepper.advance(cur_r, cur, rn, h) {
            Ok((y, hn)) => {
                cur = y;
                cur_r = rn;
                h = hn;
            }
            Err(_) => return Ok(NodeRun { states, termination: Termination::StepFailure, r_seed }),
        }
        states.push(cur);
        if let Some(t) = classify_state(&cur) {
            return Ok(NodeRun { states, termination: t, r_seed });
        }
    }
    Ok(NodeRun { states, termination: Termination::ReachedRmax, r_seed })
}

/// `v''` at `r` by a fourth-order central difference of `v'`, sampling the
/// solution through `(r, y)` by re-integration.
pub fn second_derivative_fd(stepper: &Stepper, r: f64, y: State) -> Result<f64> {
    let delta = 1e-3 * r.min(1.0);
    let h0 = 0.5 * delta;
    let at = |s: f64| stepper.advance(r, y, r + s * delta, h0).map(|(z, _)| z[1]);
    let (m2, m1, p1, p2) = (at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?);
    Ok((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * delta))
}
