//! Independent check on the ground state: direct minimisation of the
//! Hardy-Gagliardo-Nirenberg quotient over radial profiles.
//!
//! Works on `v = r^kappa u` on a softplus grid. With
//! `F = <u,Hu>`, `M = ||u||^2`, `P = ||u||_p^p` (all discrete) the flow
//! descends `L = theta/2 ln F + (1-theta)/2 ln M - ln P / p` through the
//! semi-implicit step
//!
//! ```text
//! (W + tau theta/F K + tau (1-theta)/M W) v+ = W v + tau W_sigma v^{p-1} / P
//! ```
//!
//! followed by renormalisation to unit mass. `exp(L)` is the quotient.

use crate::error::{Error, Result};
use crate::ground_state::mass_from_sharp_constant;
use crate::linalg::solve_tridiagonal;
use crate::params::{sphere_area, ModelParams};
use crate::quadrature::{RadialProfile, SoftplusGrid};

fn softplus(xi: f64) -> f64 {
    if xi > 0.0 {
        xi + (-xi).exp().ln_1p()
    } else {
        xi.exp().ln_1p()
    }
}

/// Discrete functionals on a softplus grid in the `v` variable.
#[derive(Debug, Clone)]
pub struct QuotientDiscretisation {
    pub grid: SoftplusGrid,
    /// Mass weights `w_j r_j^{n-1}`.
    pub w: Vec<f64>,
    /// Nonlinear weights `w_j r_j^{n-1-sigma}`.
    pub w_sigma: Vec<f64>,
    /// Face conductances between nodes `j` and `j+1`.
    pub k: Vec<f64>,
    pub theta: f64,
    pub p: f64,
    pub omega: f64,
}

impl QuotientDiscretisation {
    pub fn new(params: &ModelParams, grid: SoftplusGrid) -> Self {
        let c = params.derive();
        let n1 = c.effective_dim - 1.0;
        let weights = grid.weights();
        let w: Vec<f64> = grid.r.iter().zip(&weights).map(|(r, w)| w * r.powf(n1)).collect();
        let w_sigma: Vec<f64> = grid.r.iter().zip(&weights).map(|(r, w)| w * r.powf(n1 - c.sigma)).collect();
        let k: Vec<f64> = (0..grid.len() - 1)
            .map(|j| {
                let xi = grid.xi(j) + 0.5 * grid.h;
                let rf = softplus(xi);
                let jac = 1.0 / (1.0 + (-xi).exp());
                rf.powf(n1) / (jac * grid.h)
            })
            .collect();
        QuotientDiscretisation { grid, w, w_sigma, k, theta: c.theta, p: params.p, omega: sphere_area(params.d) }
    }

    pub fn mass(&self, v: &[f64]) -> f64 {
        self.omega * v.iter().zip(&self.w).map(|(v, w)| w * v * v).sum::<f64>()
    }

    pub fn lp(&self, v: &[f64]) -> f64 {
        self.omega * v.iter().zip(&self.w_sigma).map(|(v, w)| w * v.abs().powf(self.p)).sum::<f64>()
    }

    pub fn form(&self, v: &[f64]) -> f64 {
        self.omega * self.k.iter().enumerate().map(|(j, k)| k * (v[j + 1] - v[j]).powi(2)).sum::<f64>()
    }

    pub fn quotient(&self, v: &[f64]) -> f64 {
        crate::quadrature::hgn_quotient(self.form(v), self.mass(v), self.lp(v), self.theta, self.p)
    }

    /// One semi-implicit step followed by renormalisation to unit mass.
    pub fn step(&self, v: &[f64], tau: f64) -> Vec<f64> {
        let (f, m, pp) = (self.form(v), self.mass(v), self.lp(v));
        let n = v.len();
        let a = tau * self.theta / f * self.omega;
        let b = 1.0 + tau * (1.0 - self.theta) / m * self.omega;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for j in 0..n {
            diag[j] = b * self.w[j];
            if j > 0 {
                lower[j] = -a * self.k[j - 1];
                diag[j] += a * self.k[j - 1];
            }
            if j + 1 < n {
                upper[j] = -a * self.k[j];
                diag[j] += a * self.k[j];
            }
        }
        let rhs: Vec<f64> = (0..n)
            .map(|j| {
                let vj = v[j];
                self.w[j] * vj + tau * self.omega * self.w_sigma[j] * vj.abs().powf(self.p - 2.0) * vj / pp
            })
            .collect();
        let mut out = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        // positive-part projection keeps the iterate in the positive cone
        out.iter_mut().for_each(|x| *x = x.max(0.0));
        let s = 1.0 / self.mass(&out).sqrt();
        out.iter_mut().for_each(|x| *x *= s);
        out
    }
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    /// Converged `v` on the grid, unit mass.
    pub v: Vec<f64>,
    /// `u = r^{-kappa} v` with finite-difference derivative.
    pub profile: RadialProfile,
    pub quotients: Vec<f64>,
    pub steps: usize,
    pub converged: bool,
}

impl FlowResult {
    pub fn quotient(&self) -> f64 {
        *self.quotients.last().unwrap()
    }
}

/// Relative per-step change of the quotient below which the flow counts as
/// stationary (ten consecutive steps are required).
pub const STALL: f64 = 1e-12;

/// Runs the flow from `v_init` for at most `steps` steps of size `dt`,
/// stopping once it is stationary in the sense of [`STALL`].
pub fn variational_flow_from(
    params: &ModelParams,
    disc: &QuotientDiscretisation,
    v_init: Vec<f64>,
    steps: usize,
    dt: f64,
) -> Result<FlowResult> {
    if v_init.len() != disc.grid.len() || v_init.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::InvalidParams("initial guess must be non-negative on the grid".into()));
    }
    let mut v = v_init;
    let s = 1.0 / disc.mass(&v).sqrt();
    v.iter_mut().for_each(|x| *x *= s);
    let mut quotients = vec![disc.quotient(&v)];
    let mut quiet = 0;
    let mut converged = false;
    for step in 1..=steps {
        let next = disc.step(&v, dt);
        let q = disc.quotient(&next);
        let before = *quotients.last().unwrap();
        if !(q <= before * (1.0 + 4.0 * f64::EPSILON)) {
            return Err(Error::NonDecrease { step, before, after: q });
        }
        v = next;
        quotients.push(q);
        if (before - q).abs() <= STALL * q {
            quiet += 1;
            if quiet >= 10 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let kappa = params.derive().kappa;
    let u: Vec<f64> = disc.grid.r.iter().zip(&v).map(|(r, v)| r.powf(-kappa) * v).collect();
    let profile = RadialProfile::on_grid_real(&disc.grid, params.d, &u, None);
    let steps_taken = quotients.len() - 1;
    Ok(FlowResult { v, profile, quotients, steps: steps_taken, converged })
}

/// Flow from the Gaussian `v = exp(-r^2/2)`, i.e. `u = r^{-kappa} exp(-r^2/2)`.
pub fn variational_flow(params: &ModelParams, grid: &SoftplusGrid, steps: usize, dt: f64) -> Result<FlowResult> {
    let disc = QuotientDiscretisation::new(params, grid.clone());
    let v0: Vec<f64> = grid.r.iter().map(|r| (-0.5 * r * r).exp()).collect();
    variational_flow_from(params, &disc, v0, steps, dt)
}

/// Sharp constant and `||Q||_2` from the flow on two grids, combined by
/// Richardson extrapolation (the discretisation is second order in the
/// grid spacing).
#[derive(Debug, Clone, Copy)]
pub struct OracleEstimate {
    pub c_coarse: f64,
    pub c_fine: f64,
    pub c_hgn: f64,
    pub mass: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub h_xi: f64,
    pub dt: f64,
    pub steps: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { r_min: 1e-8, r_max: 30.0, h_xi: 0.02, dt: 0.5, steps: 5000 }
    }
}

pub fn oracle(params: &ModelParams, opts: &OracleOptions) -> Result<OracleEstimate> {
    let coarse_grid = SoftplusGrid::new(opts.r_min, opts.r_max, opts.h_xi)?;
    let coarse = variational_flow(params, &coarse_grid, opts.steps, opts.dt)?;
    let fine_grid = coarse_grid.refined();
    let mut v_fine = vec![0.0; fine_grid.len()];
    for (j, x) in v_fine.iter_mut().enumerate() {
        *x = if j % 2 == 0 { coarse.v[j / 2] } else { 0.5 * (coarse.v[j / 2] + coarse.v[j / 2 + 1]) };
    }
    let disc = QuotientDiscretisation::new(params, fine_grid);
    let fine = variational_flow_from(params, &disc, v_fine, opts.steps, opts.dt)?;
    let (c_coarse, c_fine) = (coarse.quotient(), fine.quotient());
    let c_hgn = (4.0 * c_fine - c_coarse) / 3.0;
    Ok(OracleEstimate {
        c_coarse,
        c_fine,
        c_hgn,
        mass: mass_from_sharp_constant(c_hgn, params),
        steps: coarse.steps + fine.steps,
    })
}
