//! Generalised Pohozaev functional `J(r, v)` for the profile equation and
//! the identity `dJ/dr = G(r) v^2`.
//!
//! With `a = r^alpha` the remaining weights are forced by requiring every
//! cross term in `dJ/dr` to cancel along solutions of
//! `v'' + (n-1)/r v' - v + r^{-sigma} v^{p-1} = 0`:
//!
//! ```text
//! alpha = 2 (p (n-1) + sigma) / (p + 2)
//! b = beta r^{alpha-1},           beta = n - 1 - alpha/2
//! c = beta (n - alpha) r^{alpha-2}
//! G = b + c'/2 - a'/2
//! ```
//!
//! At the critical coupling (`n = 2`) this gives `c ~ r^{-K/(p+2)}` with
//! `K = 2d + 2p - dp`. The `AsPrinted` variant keeps the alternative
//! exponent `-K/(d+2)` for `c` and the closed form of `G` with coefficient
//! `K^3 / (2 (p+2)^3)`; only one of the two satisfies the identity, and
//! [`verify_identity`] tells them apart.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ground_state::{GroundState, Piece};
use crate::ode::State;
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    AsPrinted,
    ConsistentExponent,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::ConsistentExponent, Variant::AsPrinted];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::AsPrinted => "printed",
            Variant::ConsistentExponent => "consistent",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "printed" | "as-printed" | "asprinted" => Ok(Variant::AsPrinted),
            "consistent" | "consistent-exponent" | "consistentexponent" => Ok(Variant::ConsistentExponent),
            other => Err(Error::InvalidParams(format!("unknown Pohozaev variant '{other}'"))),
        }
    }
}

/// Power-law weights `coef * r^exp`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Power {
    coef: f64,
    exp: f64,
}

impl Power {
    fn at(&self, r: f64) -> f64 {
        if self.coef == 0.0 {
            0.0
        } else {
            self.coef * r.powf(self.exp)
        }
    }

    fn deriv_at(&self, r: f64) -> f64 {
        if self.coef == 0.0 || self.exp == 0.0 {
            0.0
        } else {
            self.coef * self.exp * r.powf(self.exp - 1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PohozaevCoeffs {
    /// `K = d + 2 - (d-2)(p-1)`.
    pub k: f64,
    pub p: f64,
    pub sigma: f64,
    pub variant: Variant,
    a: Power,
    b: Power,
    c: Power,
    g: [Power; 2],
}

impl PohozaevCoeffs {
    pub fn new(params: &ModelParams, variant: Variant) -> Self {
        let d = params.dim();
        let p = params.p;
        let kc = d + 2.0 - (d - 2.0) * (p - 1.0);
        match variant {
            Variant::ConsistentExponent => {
                let dc = params.derive();
                let n = dc.effective_dim;
                let sigma = dc.sigma;
                let alpha = 2.0 * (p * (n - 1.0) + sigma) / (p + 2.0);
                let beta = n - 1.0 - 0.5 * alpha;
                PohozaevCoeffs {
                    k: kc,
                    p,
                    sigma,
                    variant,
                    a: Power { coef: 1.0, exp: alpha },
                    b: Power { coef: beta, exp: alpha - 1.0 },
                    c: Power { coef: beta * (n - alpha), exp: alpha - 2.0 },
                    g: [
                        Power { coef: n - 1.0 - alpha, exp: alpha - 1.0 },
                        Power { coef: 0.5 * beta * (n - alpha) * (alpha - 2.0), exp: alpha - 3.0 },
                    ],
                }
            }
            Variant::AsPrinted => {
                let q = p + 2.0;
                PohozaevCoeffs {
                    k: kc,
                    p,
                    sigma: (d - 2.0) * (p - 2.0) / 2.0,
                    variant,
                    a: Power { coef: 1.0, exp: (d * (p - 2.0) + 4.0) / q },
                    b: Power { coef: kc / (2.0 * q), exp: (d - 1.0) * (p - 2.0) / q },
                    c: Power { coef: kc * kc / (2.0 * q * q), exp: -kc / (d + 2.0) },
                    g: [
                        Power { coef: -(d - 1.0) * (p - 2.0) / q, exp: (d - 1.0) * (p - 2.0) / q },
                        Power {
                            coef: -kc.powi(3) / (2.0 * q.powi(3)),
                            exp: -(d + 5.0 - (d - 3.0) * (p - 1.0)) / q,
                        },
                    ],
                }
            }
        }
    }

    pub fn a(&self, r: f64) -> f64 {
        self.a.at(r)
    }
    pub fn b(&self, r: f64) -> f64 {
        self.b.at(r)
    }
    pub fn c(&self, r: f64) -> f64 {
        self.c.at(r)
    }
    pub fn g(&self, r: f64) -> f64 {
        self.g[0].at(r) + self.g[1].at(r)
    }

    /// `|G_1(r)| + |G_2(r)|`, the scale against which the identity residual
    /// is measured.
    pub fn g_scale(&self, r: f64) -> f64 {
        self.g[0].at(r).abs() + self.g[1].at(r).abs()
    }

    /// `b + c'/2 - a'/2` from the analytic derivatives.
    pub fn g_from_definition(&self, r: f64) -> f64 {
        self.b.at(r) + 0.5 * self.c.deriv_at(r) - 0.5 * self.a.deriv_at(r)
    }

    pub fn j(&self, r: f64, v: f64, dv: f64) -> f64 {
        let a = self.a(r);
        0.5 * a * dv * dv
            + self.b(r) * dv * v
            + 0.5 * (self.c(r) - a) * v * v
            + a * r.powf(-self.sigma) * v.abs().powf(self.p) / self.p
    }
}

/// `(a, b, c, G)` at `r`.
pub fn eval_coeffs(params: &ModelParams, r: f64, variant: Variant) -> (f64, f64, f64, f64) {
    let c = PohozaevCoeffs::new(params, variant);
    (c.a(r), c.b(r), c.c(r), c.g(r))
}

pub fn eval_j(params: &ModelParams, r: f64, v: f64, dv: f64, variant: Variant) -> f64 {
    PohozaevCoeffs::new(params, variant).j(r, v, dv)
}

/// Relative residual below which the identity counts as verified.
pub const PASS_THRESHOLD: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct PohozaevReport {
    pub variant: Variant,
    pub r: Vec<f64>,
    pub j: Vec<f64>,
    pub g: Vec<f64>,
    pub g_v2: Vec<f64>,
    pub dj: Vec<f64>,
    /// `|dJ/dr - G v^2| / ((|G_1| + |G_2|) v^2)` per node.
    pub residual: Vec<f64>,
    /// Maximum over the interior 90% of nodes.
    pub max_relative_residual: f64,
    /// Same maximum with a doubled difference step.
    pub max_relative_residual_coarse: f64,
    pub pass: bool,
}

impl PohozaevReport {
    fn interior(&self) -> std::ops::Range<usize> {
        let n = self.r.len();
        n / 20..n - n / 20
    }

    /// `J > 0` on the interior nodes.
    pub fn j_positive(&self) -> bool {
        self.j[self.interior()].iter().all(|&x| x > 0.0)
    }

    /// `J` non-increasing over all nodes with `r >= r_from`; returns the
    /// first radius where it increases, if any.
    pub fn first_increase(&self, r_from: f64) -> Option<f64> {
        (1..self.r.len()).find(|&i| self.r[i - 1] >= r_from && self.j[i] > self.j[i - 1]).map(|i| self.r[i])
    }

    /// Log-log slope of `J` between the first node and the first node ten
    /// times further out; a positive slope means `J -> 0` as `r -> 0`.
    pub fn inner_log_slope(&self) -> f64 {
        let r0 = self.r[0];
        let i = self.r.iter().position(|&x| x >= 10.0 * r0).unwrap_or(self.r.len() - 1);
        (self.j[i] / self.j[0]).ln() / (self.r[i] / r0).ln()
    }

    /// `(J(first node), J(last node), max J)`.
    pub fn endpoint_values(&self) -> (f64, f64, f64) {
        let max = self.j.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        (self.j[0], *self.j.last().unwrap(), max)
    }
}

/// Checks the identity on `nodes` for a solution given by `eval(r, centre)`,
/// where `centre` is the node a stencil belongs to (so that all stencil
/// samples come from the same representation of the solution).
pub fn verify_identity_with(
    coeffs: &PohozaevCoeffs,
    nodes: &[f64],
    eval: impl Fn(f64, f64) -> Result<State> + Sync,
) -> Result<PohozaevReport> {
    use rayon::prelude::*;
    let pass_for = |scale: f64| -> Result<Vec<(f64, f64, f64, f64, f64)>> {
        nodes
            .par_iter()
            .map(|&r| {
                let delta = scale * 1e-3 * r.min(1.0);
                let jat = |s: f64| -> Result<f64> {
                    let x = r + s * delta;
                    let y = eval(x, r)?;
                    Ok(coeffs.j(x, y[0], y[1]))
                };
                let dj = (jat(-2.0)? - 8.0 * jat(-1.0)? + 8.0 * jat(1.0)? - jat(2.0)?) / (12.0 * delta);
                let y = eval(r, r)?;
                let jr = coeffs.j(r, y[0], y[1]);
                let gv2 = coeffs.g(r) * y[0] * y[0];
                let denom = coeffs.g_scale(r) * y[0] * y[0];
                let diff = (dj - gv2).abs();
                let rel = if diff == 0.0 { 0.0 } else { diff / denom };
                Ok((jr, coeffs.g(r), gv2, dj, rel))
            })
            .collect()
    };
    let fine = pass_for(1.0)?;
    let coarse = pass_for(2.0)?;
    let n = nodes.len();
    let interior = n / 20..n - n / 20;
    let max_of = |rows: &[(f64, f64, f64, f64, f64)]| {
        rows[interior.clone()].iter().fold(0.0f64, |m, x| if x.4.is_nan() { f64::INFINITY } else { m.max(x.4) })
    };
    let max_fine = max_of(&fine);
    let max_coarse = max_of(&coarse);
    if max_fine > PASS_THRESHOLD && max_coarse > 2.0 * max_fine {
        return Err(Error::GridTooCoarse);
    }
    Ok(PohozaevReport {
        variant: coeffs.variant,
        r: nodes.to_vec(),
        j: fine.iter().map(|x| x.0).collect(),
        g: fine.iter().map(|x| x.1).collect(),
        g_v2: fine.iter().map(|x| x.2).collect(),
        dj: fine.iter().map(|x| x.3).collect(),
        residual: fine.iter().map(|x| x.4).collect(),
        max_relative_residual: max_fine,
        max_relative_residual_coarse: max_coarse,
        pass: max_fine < PASS_THRESHOLD,
    })
}

/// The identity along a computed ground state, on its grid nodes.
pub fn verify_identity(gs: &GroundState, variant: Variant) -> Result<PohozaevReport> {
    let coeffs = PohozaevCoeffs::new(&gs.params, variant);
    verify_identity_with(&coeffs, &gs.grid.r, |r, centre| {
        let piece: Piece = gs.piece(centre);
        gs.eval_in_piece(r, piece)
    })
}
