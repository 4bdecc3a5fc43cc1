//! Sufficient conditions for global existence or blow-up of radial data.

use std::fmt;

use crate::error::{Error, Result};
use crate::ground_state::GroundState;
use crate::params::ModelParams;
use crate::quadrature::{Estimate, RadialProfile};

/// Relative tolerance for treating `||u0||_2` and `||Q||_2` as equal.
pub const MASS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Global,
    BlowUp,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// `p < 2 + 4/d`.
    MassSubcritical,
    /// `p = 2 + 4/d` and `||u0|| < ||Q||`.
    BelowGroundStateMass,
    /// `p > 2 + 4/d`, energy below threshold, `<u0,Hu0> ||u0||^q < s0`.
    BelowThreshold,
    /// `p >= 2 + 4/d`, finite variance, `E(u0) < 0`.
    NegativeEnergy,
    /// `p > 2 + 4/d`, finite variance, energy below threshold,
    /// `<u0,Hu0> ||u0||^q > s0`.
    AboveThreshold,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Global => "Global",
            Verdict::BlowUp => "BlowUp",
            Verdict::Indeterminate => "Indeterminate",
        })
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::MassSubcritical => "mass-subcritical",
            Clause::BelowGroundStateMass => "below-ground-state-mass",
            Clause::BelowThreshold => "below-threshold",
            Clause::NegativeEnergy => "negative-energy",
            Clause::AboveThreshold => "above-threshold",
        })
    }
}

/// Threshold quantities of the mass-supercritical case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdData {
    pub c_hgn: f64,
    pub p: f64,
    pub theta: f64,
    pub q: f64,
    pub s0: f64,
    /// `E(Q) ||Q||_2^q`.
    pub energy_threshold: f64,
}

impl ThresholdData {
    pub fn new(gs: &GroundState) -> Result<Self> {
        let k = &gs.constants;
        let q = k
            .q
            .ok_or_else(|| Error::InvalidParams("thresholds need a mass-supercritical exponent".into()))?;
        let (c, p, theta) = (gs.c_hgn, gs.params.p, k.theta);
        Ok(ThresholdData { c_hgn: c, p, theta, q, s0: s0(c, p, theta), energy_threshold: gs.energy * gs.mass.powf(q) })
    }

    /// `<Q,HQ> ||Q||_2^q`, the second route to `s0`.
    pub fn s0_from_ground_state(gs: &GroundState, q: f64) -> f64 {
        gs.form_norm_sq * gs.mass.powf(q)
    }

    pub fn f(&self, s: f64) -> f64 {
        eval_f(s, self.c_hgn, self.p, self.theta)
    }
}

/// `(C^p / theta)^{2/(p theta - 2)}`, the maximiser of `f`.
pub fn s0(c_hgn: f64, p: f64, theta: f64) -> f64 {
    (c_hgn.powf(p) / theta).powf(2.0 / (p * theta - 2.0))
}

/// `f(s) = s/2 - s^{p theta / 2} / (p C^p)`.
pub fn eval_f(s: f64, c_hgn: f64, p: f64, theta: f64) -> f64 {
    0.5 * s - s.powf(0.5 * p * theta) / (p * c_hgn.powf(p))
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub verdict: Verdict,
    pub fired: Option<Clause>,
    pub energy: f64,
    /// `||u0||_2`.
    pub mass: f64,
    pub form_norm_sq: f64,
    pub lp_p: f64,
    /// `||Q||_2`.
    pub ground_state_mass: f64,
    /// `<u0,Hu0> ||u0||^q` and `E(u0) ||u0||^q` when `q` is defined.
    pub s: Option<f64>,
    pub scaled_energy: Option<f64>,
    pub f_value: Option<f64>,
    pub thresholds: Option<ThresholdData>,
    pub variance: Estimate,
    pub notes: Vec<String>,
}

pub fn classify(
    u0: &RadialProfile,
    params: &ModelParams,
    gs: &GroundState,
    has_finite_variance: bool,
) -> Result<Classification> {
    if !gs.params.matches(params) || u0.d != params.d {
        return Err(Error::ParamsMismatch);
    }
    let k = params.derive();
    let p = params.p;
    let mass_sq = u0.mass_sq().value;
    let mass = mass_sq.sqrt();
    let form = u0.form_sq(&k).value;
    let lp = u0.lp_p(p).value;
    let energy = 0.5 * form - lp / p;
    let variance = u0.variance();
    let mut notes = Vec::new();
    if has_finite_variance && variance.error > 1e-6 * variance.value.abs().max(1e-300) {
        notes.push(format!(
            "variance quadrature not converged on this grid (estimate {:e}, error {:e})",
            variance.value, variance.error
        ));
    }

    let mc = crate::params::mass_critical_exponent(params.d);
    let thresholds = ThresholdData::new(gs).ok();
    let (s, scaled_energy, f_value) = match &thresholds {
        Some(t) => {
            let w = mass.powf(t.q);
            (Some(form * w), Some(energy * w), Some(t.f(form * w)))
        }
        None => (None, None, None),
    };

    let below = |t: &ThresholdData| scaled_energy.unwrap() < t.energy_threshold;
    let fired = if k.mass_critical {
        let rel = (mass - gs.mass) / gs.mass;
        if rel < -MASS_TOL {
            Some((Verdict::Global, Clause::BelowGroundStateMass))
        } else if has_finite_variance && energy < 0.0 {
            Some((Verdict::BlowUp, Clause::NegativeEnergy))
        } else {
            if rel.abs() <= MASS_TOL {
                notes.push("minimal mass ||u0|| = ||Q||: the sufficient conditions do not decide this case".into());
            }
            None
        }
    } else if p < mc {
        Some((Verdict::Global, Clause::MassSubcritical))
    } else {
        let t = thresholds.as_ref().unwrap();
        let s = s.unwrap();
        if below(t) && s < t.s0 {
            Some((Verdict::Global, Clause::BelowThreshold))
        } else if has_finite_variance && energy < 0.0 {
            Some((Verdict::BlowUp, Clause::NegativeEnergy))
        } else if has_finite_variance && below(t) && s > t.s0 {
            Some((Verdict::BlowUp, Clause::AboveThreshold))
        } else {
            None
        }
    };
    let (verdict, fired) = match fired {
        Some((v, c)) => (v, Some(c)),
        None => (Verdict::Indeterminate, None),
    };
    Ok(Classification {
        verdict,
        fired,
        energy,
        mass,
        form_norm_sq: form,
        lp_p: lp,
        ground_state_mass: gs.mass,
        s,
        scaled_energy,
        f_value,
        thresholds,
        variance,
        notes,
    })
}
