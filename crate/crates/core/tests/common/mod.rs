#![allow(dead_code)]

use hardy_nls::params::{sphere_area, ModelParams};
use hardy_nls::{GroundState, RadialProfile};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed-step RK4 shooting for `Q'' + (d-1)/r Q' - Q + Q^{p-1} = 0` with no
/// potential. Returns `(Q(0), ||Q||_2)`.
pub fn classical_ground_state(d: u32, p: f64) -> (f64, f64) {
    let dm1 = d as f64 - 1.0;
    let h = 1e-3;
    let r0 = 1e-6;
    let f = |r: f64, y: [f64; 2]| [y[1], -dm1 / r * y[1] + y[0] - y[0].abs().powf(p - 2.0) * y[0]];
    // +1: crosses zero (too large), -1: turns up (too small)
    let run = |q0: f64, mass: &mut f64| -> i32 {
        let mut r = r0;
        let mut y = [q0, (q0 - q0.powf(p - 1.0)) * r0 / d as f64];
        *mass = 0.0;
        let mut prev = y[0] * y[0] * r.powf(dm1);
        while r < 40.0 {
            let k1 = f(r, y);
            let k2 = f(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = f(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            r += h;
            let cur = y[0] * y[0] * r.powf(dm1);
            *mass += 0.5 * h * (prev + cur);
            prev = cur;
            if y[0] < 0.0 {
                return 1;
            }
            if y[1] > 0.0 {
                return -1;
            }
        }
        0
    };
    let (mut lo, mut hi) = (1.0f64, 10.0f64);
    let mut m = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if run(mid, &mut m) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // the low side turns up only once Q is negligible
    run(lo, &mut m);
    (lo, (sphere_area(d) * m).sqrt())
}

/// Random smooth radial test functions `u = r^{-kappa} v` with analytic
/// derivatives on the ground-state grid. Even-numbered samples are small
/// perturbations of `Q`, odd ones are sums of Gaussians and exponentials.
pub fn random_profiles(gs: &GroundState, count: usize, seed: u64) -> Vec<RadialProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kappa = gs.constants.kappa;
    let r = &gs.grid.r;
    (0..count)
        .map(|i| {
            let terms: Vec<(f64, f64, f64)> = (0..3)
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.2..3.0), rng.gen_range(0.0..2.0)))
                .collect();
            // v = sum a (1 + s r^2) e^{-b r^2}, regular at the origin
            let v = |x: f64| -> (f64, f64) {
                terms.iter().fold((0.0, 0.0), |(f, df), &(a, b, s)| {
                    let e = (-b * x * x).exp();
                    (f + a * (1.0 + s * x * x) * e, df + a * e * (2.0 * s * x - 2.0 * b * x * (1.0 + s * x * x)))
                })
            };
            let eps = if i % 2 == 0 { 10f64.powf(rng.gen_range(-4.0..-1.0)) } else { 0.0 };
            let base = if i % 2 == 0 { 0.0 } else { 1.0 };
            let mut vals = Vec::with_capacity(r.len());
            let mut ders = Vec::with_capacity(r.len());
            for (j, &x) in r.iter().enumerate() {
                let (f, df) = v(x);
                let s = x.powf(-kappa);
                // u' = r^{-kappa} (v' - kappa v / r)
                let (uf, udf) = (s * f, s * (df - kappa * f / x));
                let (q, dq) = if i % 2 == 0 {
                    (gs.q_profile.values[j].re, gs.q_profile.derivs.as_ref().unwrap()[j].re)
                } else {
                    (0.0, 0.0)
                };
                vals.push(Complex64::new(q + (eps + base) * uf, 0.0));
                ders.push(Complex64::new(dq + (eps + base) * udf, 0.0));
            }
            RadialProfile::on_grid(&gs.grid, gs.params.d, vals, Some(ders))
        })
        .collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn params(d: u32, p: f64, c: f64) -> ModelParams {
    ModelParams::new(d, p, c).unwrap()
}
