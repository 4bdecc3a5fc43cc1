//! Radial time evolution of `i u_t = H u - |u|^{p-2} u`.
//!
//! The unknown is `v = r^kappa u`, which satisfies
//!
//! ```text
//! i v_t = -v'' - (n-1)/r v' - r^{-sigma} |v|^{p-2} v
//! ```
//!
//! with no singular potential. Space is discretised by cell-centred finite
//! volumes on `r = L sinh(xi / L)` (uniform in `xi`, first face at the
//! origin, homogeneous Dirichlet at `r_max`), time by Crank-Nicolson with
//! the nonlinearity taken at the midpoint and resolved by fixed-point
//! sweeps. The linear part is a real symmetric pencil, so every step
//! conserves the discrete mass up to the fixed-point tolerance.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ground_state::GroundState;
use crate::linalg::solve_tridiagonal;
use crate::params::{sphere_area, ModelParams};
use crate::quadrature::RadialProfile;

/// Coefficient of `r^{-2}` in the half-line equation for `w = r^{(d-1)/2} u`.
pub fn effective_1d_reduce(params: &ModelParams) -> f64 {
    let d = params.dim();
    (d - 1.0) * (d - 3.0) / 4.0 - params.c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Cell width at the origin.
    pub dr_min: f64,
    pub r_max: f64,
    /// Length scale `L` of the sinh map; the cell width grows like
    /// `dr_min sqrt(1 + (r/L)^2)`.
    pub stretch: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { dr_min: 1e-3, r_max: 40.0, stretch: 2.0 }
    }
}

impl GridSpec {
    pub fn cells(&self) -> usize {
        (self.xi_max() / self.dr_min).ceil() as usize
    }

    fn xi_max(&self) -> f64 {
        self.stretch * (self.r_max / self.stretch).asinh()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dr_min > 0.0 && self.r_max > self.dr_min && self.stretch > 0.0) {
            return Err(Error::InvalidParams(format!("bad grid spec {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub spec: GridSpec,
    pub h_xi: f64,
    /// Cell centres.
    pub r: Vec<f64>,
    /// Cell integrals of `r^{n-1}`.
    pub m: Vec<f64>,
    /// Coupling between cells `j` and `j+1`.
    pub k: Vec<f64>,
    /// Coupling of the last cell to the Dirichlet boundary.
    pub k_out: f64,
    /// Cell averages of `r^{-sigma}` against `r^{n-1}`.
    pub weight: Vec<f64>,
    pub kappa: f64,
    pub sigma: f64,
    pub omega: f64,
}

impl RadialGrid {
    pub fn new(params: &ModelParams, spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self::with_cells(params, spec, spec.cells()))
    }

    pub fn with_cells(params: &ModelParams, spec: GridSpec, cells: usize) -> Self {
        let dc = params.derive();
        let n1 = dc.effective_dim - 1.0;
        let l = spec.stretch;
        let h = spec.xi_max() / cells as f64;
        let map = |xi: f64| l * (xi / l).sinh();
        let jac = |xi: f64| (xi / l).cosh();
        let n = dc.effective_dim;
        let ns = n - dc.sigma;
        let faces: Vec<f64> = (0..=cells).map(|f| map(f as f64 * h)).collect();
        let r: Vec<f64> = (0..cells).map(|j| map((j as f64 + 0.5) * h)).collect();
        // exact cell integrals of r^{n-1} and r^{n-1-sigma}; the midpoint rule
        // loses accuracy next to the origin where r^{-sigma} is singular
        let m: Vec<f64> = faces.windows(2).map(|w| (w[1].powf(n) - w[0].powf(n)) / n).collect();
        let weight: Vec<f64> =
            faces.windows(2).zip(&m).map(|(w, m)| (w[1].powf(ns) - w[0].powf(ns)) / (ns * m)).collect();
        let k = (1..cells)
            .map(|f| {
                let xi = f as f64 * h;
                map(xi).powf(n1) / (jac(xi) * h)
            })
            .collect();
        let xi_n = cells as f64 * h;
        let k_out = map(xi_n).powf(n1) / (0.5 * jac(xi_n) * h);
        RadialGrid {
            spec,
            h_xi: h,
            r,
            m,
            k,
            k_out,
            weight,
            kappa: dc.kappa,
            sigma: dc.sigma,
            omega: sphere_area(params.d),
        }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Same domain with twice as many cells.
    pub fn refined(&self, params: &ModelParams) -> Self {
        Self::with_cells(params, self.spec, 2 * self.len())
    }

    /// Average of consecutive pairs: values of a twice-refined run at the
    /// centres of this grid.
    pub fn restrict(fine: &[Complex64]) -> Vec<Complex64> {
        fine.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64 + Sync) -> Vec<Complex64> {
        self.r.par_iter().map(|&r| f(r)).collect()
    }

    /// `v = r^kappa u` at the centres by linear interpolation of a profile,
    /// zero beyond its last node and constant below its first.
    pub fn from_profile(&self, u: &RadialProfile) -> Vec<Complex64> {
        let v: Vec<Complex64> = u.r.iter().zip(&u.values).map(|(r, z)| z * r.powf(self.kappa)).collect();
        self.r
            .iter()
            .map(|&x| {
                if x <= u.r[0] {
                    return v[0];
                }
                match u.r.binary_search_by(|a| a.total_cmp(&x)) {
                    Ok(i) => v[i],
                    Err(i) if i == u.r.len() => Complex64::new(0.0, 0.0),
                    Err(i) => {
                        let s = (x - u.r[i - 1]) / (u.r[i] - u.r[i - 1]);
                        v[i - 1] * (1.0 - s) + v[i] * s
                    }
                }
            })
            .collect()
    }

    /// `u = r^{-kappa} v` as a profile on the cell centres.
    pub fn profile(&self, d: u32, v: &[Complex64]) -> Result<RadialProfile> {
        let u = self.r.iter().zip(v).map(|(r, z)| z * r.powf(-self.kappa)).collect();
        RadialProfile::from_nodes(d, self.r.clone(), u)
    }

    pub fn mass(&self, v: &[Complex64]) -> f64 {
        self.omega * self.m.iter().zip(v).map(|(m, z)| m * z.norm_sqr()).sum::<f64>()
    }

    pub fn lp_p(&self, v: &[Complex64], p: f64) -> f64 {
        let e = 0.5 * p;
        self.omega * (0..v.len()).map(|j| self.m[j] * self.weight[j] * v[j].norm_sqr().powf(e)).sum::<f64>()
    }

    /// Discrete `<u, H u>`.
    pub fn form(&self, v: &[Complex64]) -> f64 {
        let inner: f64 = self.k.iter().enumerate().map(|(j, k)| k * (v[j + 1] - v[j]).norm_sqr()).sum();
        self.omega * (inner + self.k_out * v[v.len() - 1].norm_sqr())
    }

    /// `int |x|^2 |u|^2`.
    pub fn gamma(&self, v: &[Complex64]) -> f64 {
        self.omega * (0..v.len()).map(|j| self.m[j] * self.r[j] * self.r[j] * v[j].norm_sqr()).sum::<f64>()
    }

    /// Time derivative of [`RadialGrid::gamma`] along the semi-discrete flow,
    /// the discrete form of `4 Im int conj(u) x . grad u`.
    pub fn gamma_prime(&self, v: &[Complex64]) -> f64 {
        2.0 * self.omega
            * self
                .k
                .iter()
                .enumerate()
                .map(|(j, k)| {
                    let dr2 = self.r[j + 1] * self.r[j + 1] - self.r[j] * self.r[j];
                    k * dr2 * (v[j].conj() * v[j + 1]).im
                })
                .sum::<f64>()
    }

    /// Relative discrete `L^2` distance `||v - w|| / ||w||`.
    pub fn relative_l2(&self, v: &[Complex64], w: &[Complex64]) -> f64 {
        let diff: Vec<Complex64> = v.iter().zip(w).map(|(a, b)| a - b).collect();
        (self.mass(&diff) / self.mass(w)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub form_norm_sq: f64,
    pub lp_p: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    /// Relative max-norm change of the midpoint below which sweeps stop.
    pub fp_tol: f64,
    pub min_sweeps: usize,
    pub max_sweeps: usize,
    /// Peak damping rate of the sponge.
    pub sponge_strength: f64,
    /// Fraction of `[0, r_max]` covered by the sponge.
    pub sponge_fraction: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { fp_tol: 1e-14, min_sweeps: 2, max_sweeps: 20, sponge_strength: 1.0, sponge_fraction: 0.1 }
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Diagnostics are logged every `log_interval` (rounded to whole steps).
    pub log_interval: f64,
    pub snapshot_times: Vec<f64>,
    /// Halt once `<u,Hu>` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
    pub step: StepOptions,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            dt: 1e-4,
            t_end: 0.5,
            log_interval: 1e-3,
            snapshot_times: Vec::new(),
            blowup_factor: 1e6,
            step: StepOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub t: f64,
    pub v: Vec<Complex64>,
    pub log: Vec<DiagnosticRow>,
    pub snapshots: Vec<(f64, Vec<Complex64>)>,
    /// Time at which the blow-up proxy fired.
    pub blowup: Option<f64>,
    pub steps: usize,
    pub max_sweeps_used: usize,
    /// Largest relative change of the mass in a single step, sponge excluded.
    pub max_step_mass_drift: f64,
    prev: Option<Vec<Complex64>>,
}

impl EvolutionState {
    pub fn new(v: Vec<Complex64>) -> Self {
        EvolutionState {
            t: 0.0,
            v,
            log: Vec::new(),
            snapshots: Vec::new(),
            blowup: None,
            steps: 0,
            max_sweeps_used: 0,
            max_step_mass_drift: 0.0,
            prev: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Propagator {
    pub params: ModelParams,
    pub grid: RadialGrid,
    pub opts: StepOptions,
    damping: Vec<f64>,
}

impl Propagator {
    pub fn new(params: &ModelParams, grid: RadialGrid, opts: StepOptions) -> Self {
        let r_max = grid.spec.r_max;
        let r_s = (1.0 - opts.sponge_fraction) * r_max;
        let damping = grid
            .r
            .iter()
            .map(|&r| {
                if r <= r_s || opts.sponge_fraction <= 0.0 {
                    0.0
                } else {
                    let s = (0.5 * std::f64::consts::PI * (r - r_s) / (r_max - r_s)).sin();
                    opts.sponge_strength * s * s
                }
            })
            .collect();
        Propagator { params: *params, grid, opts, damping }
    }

    pub fn diagnostics(&self, t: f64, v: &[Complex64]) -> DiagnosticRow {
        let g = &self.grid;
        let form = g.form(v);
        let lp = g.lp_p(v, self.params.p);
        DiagnosticRow {
            t,
            mass: g.mass(v),
            energy: 0.5 * form - lp / self.params.p,
            form_norm_sq: form,
            lp_p: lp,
            gamma: g.gamma(v),
            gamma_prime: g.gamma_prime(v),
        }
    }

    /// One Crank-Nicolson step of size `dt`.
    pub fn step(&self, state: &mut EvolutionState, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParams(format!("time step must be positive (got {dt})")));
        }
        let g = &self.grid;
        let n = g.len();
        let v = &state.v;
        let half = Complex64::new(0.0, 0.5 * dt);
        let e = 0.5 * (self.params.p - 2.0);

        let mut next: Vec<Complex64> = match &state.prev {
            Some(prev) => v.iter().zip(prev).map(|(a, b)| 2.0 * a - b).collect(),
            None => v.clone(),
        };
        let scale = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if scale == 0.0 {
            state.prev = Some(v.clone());
            state.t += dt;
            state.steps += 1;
            return Ok(());
        }

        // S v, the diffusive part, is common to every sweep
        let mut sv = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            if j > 0 {
                acc += g.k[j - 1] * (v[j] - v[j - 1]);
            }
            if j + 1 < n {
                acc += g.k[j] * (v[j] - v[j + 1]);
            } else {
                acc += g.k_out * v[j];
            }
            sv[j] = acc;
        }
        let mut lower = vec![Complex64::new(0.0, 0.0); n];
        let mut upper = vec![Complex64::new(0.0, 0.0); n];
        let mut base_diag = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut s = 0.0;
            if j > 0 {
                lower[j] = -half * g.k[j - 1];
                s += g.k[j - 1];
            }
            if j + 1 < n {
                upper[j] = -half * g.k[j];
                s += g.k[j];
            } else {
                s += g.k_out;
            }
            base_diag[j] = g.m[j] + half * s;
        }

        let mut last_change = f64::INFINITY;
        let mut sweeps = 0;
        let mut diag = base_diag.clone();
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        loop {
            sweeps += 1;
            for j in 0..n {
                let mid = 0.5 * (v[j] + next[j]);
                let mv = g.m[j] * g.weight[j] * mid.norm_sqr().powf(e);
                diag[j] = base_diag[j] - half * mv;
                rhs[j] = g.m[j] * v[j] - half * (sv[j] - mv * v[j]);
            }
            let sol = solve_tridiagonal(&lower, &diag, &upper, &rhs);
            let change = sol.iter().zip(&next).fold(0.0f64, |m, (a, b)| m.max((a - b).norm())) / scale;
            next = sol;
            if !change.is_finite() {
                return Err(Error::SolverDiverged { t: state.t });
            }
            if sweeps >= self.opts.min_sweeps && change <= self.opts.fp_tol {
                break;
            }
            if sweeps >= 3 && change > last_change && change > 1e3 * self.opts.fp_tol {
                return Err(Error::SolverDiverged { t: state.t });
            }
            if sweeps >= self.opts.max_sweeps {
                if change > 1e3 * self.opts.fp_tol {
                    return Err(Error::SolverDiverged { t: state.t });
                }
                break;
            }
            last_change = change;
        }

        let before = g.mass(v);
        let after = g.mass(&next);
        if before > 0.0 {
            state.max_step_mass_drift = state.max_step_mass_drift.max((after - before).abs() / before);
        }
        for (z, &a) in next.iter_mut().zip(&self.damping) {
            if a > 0.0 {
                *z *= (-a * dt).exp();
            }
        }
        state.prev = Some(std::mem::replace(&mut state.v, next));
        state.t += dt;
        state.steps += 1;
        state.max_sweeps_used = state.max_sweeps_used.max(sweeps);
        Ok(())
    }

    /// Runs from `v0` at `t = 0` to `t_end`, logging diagnostics and
    /// snapshots; stops early when the blow-up proxy fires.
    pub fn evolve(&self, v0: Vec<Complex64>, opts: &EvolveOptions) -> Result<EvolutionState> {
        if !(opts.dt > 0.0 && opts.t_end >= 0.0 && opts.log_interval > 0.0) {
            return Err(Error::InvalidParams("dt, t_end and log interval must be positive".into()));
        }
        if v0.len() != self.grid.len() {
            return Err(Error::InvalidParams("initial data does not match the grid".into()));
        }
        let steps = (opts.t_end / opts.dt).round() as usize;
        let log_every = ((opts.log_interval / opts.dt).round() as usize).max(1);
        let snap_steps: Vec<usize> = opts.snapshot_times.iter().map(|t| (t / opts.dt).round() as usize).collect();
        let mut state = EvolutionState::new(v0);
        let first = self.diagnostics(0.0, &state.v);
        let form0 = first.form_norm_sq;
        state.log.push(first);
        if snap_steps.contains(&0) {
            state.snapshots.push((0.0, state.v.clone()));
        }
        for k in 1..=steps {
            self.step(&mut state, opts.dt)?;
            // times are reconstructed from the step count to avoid drift
            state.t = k as f64 * opts.dt;
            let logged = k % log_every == 0 || k == steps;
            let mut row = None;
            if logged {
                let r = self.diagnostics(state.t, &state.v);
                state.log.push(r);
                row = Some(r);
            }
            if snap_steps.contains(&k) {
                state.snapshots.push((state.t, state.v.clone()));
            }
            let form = match row {
                Some(r) => r.form_norm_sq,
                None => self.grid.form(&state.v),
            };
            if form0 > 0.0 && form > opts.blowup_factor * form0 {
                state.blowup = Some(state.t);
                if row.is_none() {
                    state.log.push(self.diagnostics(state.t, &state.v));
                }
                break;
            }
        }
        Ok(state)
    }
}

/// Parameters `(T, lambda, gamma)` of the explicit minimal-mass solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactBlowupParams {
    pub t_blowup: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl ExactBlowupParams {
    pub fn new(t_blowup: f64, lambda: f64, gamma: f64) -> Result<Self> {
        if !(t_blowup > 0.0 && lambda > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParams("exact blow-up needs T > 0 and lambda > 0".into()));
        }
        Ok(ExactBlowupParams { t_blowup, lambda, gamma })
    }

    fn check(&self, params: &ModelParams, t: f64) -> Result<f64> {
        if !params.derive().mass_critical {
            return Err(Error::NotMassCritical { p: params.p });
        }
        if !(t >= 0.0 && t < self.t_blowup) {
            return Err(Error::InvalidTime { t, horizon: self.t_blowup });
        }
        Ok(self.t_blowup - t)
    }

    /// Global phase and chirp `(e^{i gamma + i lambda^2/(T-t)}, 1/(4(T-t)))`.
    fn phase(&self, l: f64) -> (Complex64, f64) {
        (Complex64::from_polar(1.0, self.gamma + self.lambda * self.lambda / l), 0.25 / l)
    }
}

/// `r^kappa S(t, r)` at the given radii.
pub fn exact_blowup_v(gs: &GroundState, ebp: &ExactBlowupParams, t: f64, r: &[f64]) -> Result<Vec<Complex64>> {
    let l = ebp.check(&gs.params, t)?;
    let (phase, chirp) = ebp.phase(l);
    let s = ebp.lambda / l;
    let amp = s.powf(0.5 * gs.params.dim() - gs.constants.kappa);
    r.par_iter()
        .map(|&x| {
            let v = gs.eval_v(s * x)?;
            Ok(phase * Complex64::from_polar(amp * v, -chirp * x * x))
        })
        .collect()
}

/// `S_{T,lambda,gamma}(t, .)` on the ground-state nodes, with its analytic
/// radial derivative.
pub fn exact_blowup(
    params: &ModelParams,
    ebp: &ExactBlowupParams,
    t: f64,
    gs: &GroundState,
) -> Result<RadialProfile> {
    if !gs.params.matches(params) {
        return Err(Error::ParamsMismatch);
    }
    let l = ebp.check(params, t)?;
    let (phase, chirp) = ebp.phase(l);
    let s = ebp.lambda / l;
    let amp = s.powf(0.5 * params.dim());
    let samples: Result<Vec<(Complex64, Complex64)>> = gs
        .grid
        .r
        .par_iter()
        .map(|&x| {
            let (q, dq) = gs.eval_q(s * x)?;
            let z = phase * Complex64::from_polar(amp, -chirp * x * x);
            let val = z * q;
            let der = z * (s * dq) + val * Complex64::new(0.0, -2.0 * chirp * x);
            Ok((val, der))
        })
        .collect();
    let (values, derivs): (Vec<_>, Vec<_>) = samples?.into_iter().unzip();
    Ok(RadialProfile::on_grid(&gs.grid, params.d, values, Some(derivs)))
}

/// Coefficient in front of `||u||_p^p` in the virial identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VirialVariant {
    /// `(4 + 2d - dp) / p`.
    Printed,
    /// `4 (4 + 2d - dp) / p`, from differentiating `Gamma' ` once more.
    Derived,
}

impl VirialVariant {
    pub fn coefficient(&self, params: &ModelParams) -> f64 {
        let (d, p) = (params.dim(), params.p);
        let base = (4.0 + 2.0 * d - d * p) / p;
        match self {
            VirialVariant::Printed => base,
            VirialVariant::Derived => 4.0 * base,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VirialReport {
    pub variant: VirialVariant,
    /// `(t, Gamma''_fd, 16 E(u0) + coef ||u||_p^p)` at interior log times.
    pub rows: Vec<(f64, f64, f64)>,
    pub max_residual: f64,
}

/// `Gamma''` by second differences of the logged `Gamma`, compared with the
/// right-hand side of the virial identity.
pub fn virial_check(log: &[DiagnosticRow], params: &ModelParams, variant: VirialVariant) -> Result<VirialReport> {
    if log.len() < 5 {
        return Err(Error::InvalidParams("virial check needs at least five logged times".into()));
    }
    let e0 = log[0].energy;
    let coef = variant.coefficient(params);
    let rows: Vec<(f64, f64, f64)> = log
        .windows(3)
        .map(|w| {
            let (h0, h1) = (w[1].t - w[0].t, w[2].t - w[1].t);
            let fd = 2.0 * (h0 * w[2].gamma - (h0 + h1) * w[1].gamma + h1 * w[0].gamma) / (h0 * h1 * (h0 + h1));
            (w[1].t, fd, 16.0 * e0 + coef * w[1].lp_p)
        })
        .collect();
    let max_residual = rows.iter().fold(0.0f64, |m, r| m.max((r.1 - r.2).abs()));
    Ok(VirialReport { variant, rows, max_residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BanicaReport {
    pub lhs: f64,
    pub rhs: f64,
    pub energy: f64,
    pub holds: bool,
}

/// `|int grad(theta) . Im(conj(u) grad u)|` against
/// `sqrt(2 E(u)) (int |grad theta|^2 |u|^2)^{1/2}` for a profile of
/// ground-state mass. `dtheta` is the radial derivative of `theta`.
pub fn banica_bound_check(
    profile: &RadialProfile,
    params: &ModelParams,
    gs: &GroundState,
    dtheta: impl Fn(f64) -> f64,
) -> Result<BanicaReport> {
    if !gs.params.matches(params) {
        return Err(Error::ParamsMismatch);
    }
    let mass = profile.mass_sq().value.sqrt();
    if (mass - gs.mass).abs() > 1e-6 * gs.mass {
        return Err(Error::MassMismatch { mass, expected: gs.mass });
    }
    let k = params.derive();
    let energy = profile.energy(&k, params.p);
    let lhs = profile.current(&dtheta).value.abs();
    let e = params.dim() - 1.0;
    let f: Vec<f64> =
        (0..profile.len()).map(|j| dtheta(profile.r[j]).powi(2) * profile.values[j].norm_sqr() * profile.r[j].powf(e)).collect();
    let weighted = sphere_area(params.d) * profile.integrate(&f).value;
    let rhs = (2.0 * energy.max(0.0)).sqrt() * weighted.sqrt();
    Ok(BanicaReport { lhs, rhs, energy, holds: lhs <= rhs + 1e-8 })
}

/// `theta(r) = r^2` below `r_cut`, tapered smoothly to a constant on
/// `[r_cut, 1.5 r_cut]`; returns `theta'`.
pub fn quadratic_cutoff(r_cut: f64) -> impl Fn(f64) -> f64 + Sync + Send + Copy {
    move |r: f64| {
        let s = (r / r_cut - 1.0) / 0.5;
        if s <= 0.0 {
            2.0 * r
        } else if s >= 1.0 {
            0.0
        } else {
            2.0 * r * (0.5 * std::f64::consts::PI * s).cos().powi(2)
        }
    }
}
