//! Model parameters and the constants derived from them.
//!
//! Everything downstream (shooting, quadrature, dynamics, classification)
//! reads its exponents from [`DerivedConstants`], so the critical coupling
//! and the subcritical extension share a single code path.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance used to recognise `p = 2 + 4/d` and `c = c_*`.
pub const EXACTNESS_TOL: f64 = 1e-12;

/// Spatial dimension, nonlinearity exponent and Hardy coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub d: u32,
    pub p: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub c_star: f64,
    /// Interpolation exponent `d/2 - d/p`.
    pub theta: f64,
    /// Singular exponent at the origin: `Q(r) ~ r^{-kappa}`.
    pub kappa: f64,
    /// Power of the weight `r^{-sigma}` in the regularised profile equation.
    pub sigma: f64,
    /// Effective radial dimension `d - 2 kappa` of the regularised profile.
    pub effective_dim: f64,
    /// Mass-energy scaling exponent, only defined above the mass-critical power.
    pub q: Option<f64>,
    pub mass_critical: bool,
}

impl ModelParams {
    pub fn new(d: u32, p: f64, c: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParams(format!("dimension must be >= 3 (got {d})")));
        }
        let p_max = sobolev_exponent(d);
        if !(p.is_finite() && p > 2.0 && p < p_max) {
            return Err(Error::InvalidParams(format!(
                "nonlinearity exponent must lie in (2, {p_max}) (got {p})"
            )));
        }
        let c_star = hardy_constant(d);
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidParams(format!("Hardy coupling must be >= 0 (got {c})")));
        }
        let c = if (c - c_star).abs() <= EXACTNESS_TOL * c_star {
            c_star
        } else if c > c_star {
            return Err(Error::InvalidParams(format!(
                "Hardy coupling {c} exceeds the critical value {c_star}"
            )));
        } else {
            c
        };
        Ok(Self { d, p, c })
    }

    /// Parameters at the critical coupling `c = (d-2)^2/4`.
    pub fn critical(d: u32, p: f64) -> Result<Self> {
        Self::new(d, p, hardy_constant(d))
    }

    pub fn c_star(&self) -> f64 {
        hardy_constant(self.d)
    }

    pub fn is_critical_coupling(&self) -> bool {
        self.c == self.c_star()
    }

    pub fn dim(&self) -> f64 {
        self.d as f64
    }

    pub fn derive(&self) -> DerivedConstants {
        let d = self.dim();
        let p = self.p;
        let c_star = self.c_star();
        let theta = d / 2.0 - d / p;
        let kappa = (d - 2.0) / 2.0 - (c_star - self.c).max(0.0).sqrt();
        let sigma = kappa * (p - 2.0);
        let p_mc = mass_critical_exponent(self.d);
        let mass_critical = (p - p_mc).abs() <= EXACTNESS_TOL * p_mc;
        let q = if !mass_critical && p > p_mc {
            Some((4.0 * d + 4.0 * p - 2.0 * p * d) / (d * p - 2.0 * d - 4.0))
        } else {
            None
        };
        DerivedConstants {
            c_star,
            theta,
            kappa,
            sigma,
            effective_dim: d - 2.0 * kappa,
            q,
            mass_critical,
        }
    }

    /// Surface measure of the unit sphere in `R^d`.
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.d)
    }

    /// True when `other` describes the same model up to rounding.
    pub fn matches(&self, other: &ModelParams) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        self.d == other.d && close(self.p, other.p) && close(self.c, other.c)
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} p={} c={}", self.d, self.p, self.c)
    }
}

/// Validates `params` and returns its derived constants.
pub fn derive_constants(params: &ModelParams) -> Result<DerivedConstants> {
    let checked = ModelParams::new(params.d, params.p, params.c)?;
    Ok(checked.derive())
}

pub fn mass_critical_exponent(d: u32) -> f64 {
    2.0 + 4.0 / d as f64
}

pub fn sobolev_exponent(d: u32) -> f64 {
    let d = d as f64;
    2.0 * d / (d - 2.0)
}

pub fn hardy_constant(d: u32) -> f64 {
    let d = d as f64;
    (d - 2.0) * (d - 2.0) / 4.0
}

/// `2 pi^{d/2} / Gamma(d/2)` evaluated by the half-integer recursion.
pub fn sphere_area(d: u32) -> f64 {
    // |S^0| = 2, |S^1| = 2 pi, |S^{k+1}| = 2 pi |S^{k-1}| / k
    let (mut area, mut k) = if d % 2 == 1 { (2.0, 1u32) } else { (2.0 * PI, 2u32) };
    while k < d {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// Parses `"10/3"`, `"3.5"` or `"4"`.
pub fn parse_rational(text: &str) -> Result<f64> {
    let text = text.trim();
    let bad = || Error::InvalidParams(format!("cannot parse number '{text}'"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            Ok(num / den)
        }
        None => text.parse().map_err(|_| bad()),
    }
}

/// Parses a coupling value; the literal `critical` maps to `c_*`.
pub fn parse_coupling(text: &str, d: u32) -> Result<f64> {
    if text.trim().eq_ignore_ascii_case("critical") {
        Ok(hardy_constant(d))
    } else {
        parse_rational(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_three_dimensional_constants() {
        let k = ModelParams::new(3, 4.0, 0.25).unwrap().derive();
        assert_eq!(k.c_star, 0.25);
        assert!((k.theta - 0.75).abs() < 1e-15);
        assert!((k.sigma - 1.0).abs() < 1e-15);
        assert_eq!(k.q, Some(2.0));
        assert!(!k.mass_critical);
        assert!((k.effective_dim - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mass_critical_three_dimensional() {
        let p = parse_rational("10/3").unwrap();
        let k = ModelParams::critical(3, p).unwrap().derive();
        assert!((k.theta - 0.6).abs() < 1e-15);
        assert!(k.mass_critical);
        assert!((k.theta * p - 2.0).abs() < 1e-14);
        assert_eq!(k.q, None);
    }

    #[test]
    fn zero_coupling_has_no_singularity() {
        let k = ModelParams::new(3, 4.0, 0.0).unwrap().derive();
        assert_eq!(k.kappa, 0.0);
        assert_eq!(k.sigma, 0.0);
        assert_eq!(k.effective_dim, 3.0);
    }

    #[test]
    fn mass_critical_exponents() {
        assert!((mass_critical_exponent(3) - 10.0 / 3.0).abs() < 1e-15);
        assert_eq!(mass_critical_exponent(4), 3.0);
        assert!((mass_critical_exponent(6) - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ModelParams::new(2, 3.0, 0.0).is_err());
        assert!(ModelParams::new(3, 2.0, 0.0).is_err());
        assert!(ModelParams::new(3, 6.0, 0.0).is_err());
        assert!(ModelParams::new(3, 4.0, 0.3).is_err());
        assert!(ModelParams::new(3, 4.0, -0.1).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn coupling_literal() {
        assert_eq!(parse_coupling("critical", 5).unwrap(), 2.25);
        assert_eq!(parse_coupling("0.5", 5).unwrap(), 0.5);
        assert!(parse_rational("1/0").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn theta_in_unit_interval(d in 3u32..9, t in 0.001f64..0.999, frac in 0.0f64..1.0) {
                let p = 2.0 + t * (sobolev_exponent(d) - 2.0);
                let params = ModelParams::new(d, p, frac * hardy_constant(d)).unwrap();
                let k = params.derive();
                prop_assert!(k.theta > 0.0 && k.theta < 1.0);
                // theta p = d(p-2)/2 lies in (p - 2, p)
                prop_assert!(k.theta * p > p - 2.0 - 1e-12 && k.theta * p < p);
                prop_assert!(k.sigma >= 0.0 && k.sigma < 2.0);
            }

            #[test]
            fn kappa_monotone_in_coupling(d in 3u32..9, a in 0.0f64..1.0, b in 0.0f64..1.0) {
                let cs = hardy_constant(d);
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let k_lo = ModelParams::new(d, 2.5, lo * cs).unwrap().derive().kappa;
                let k_hi = ModelParams::new(d, 2.5, hi * cs).unwrap().derive().kappa;
                prop_assert!(k_lo <= k_hi + 1e-15);
                let k_max = ModelParams::critical(d, 2.5).unwrap().derive().kappa;
                prop_assert!((k_max - (d as f64 - 2.0) / 2.0).abs() < 1e-14);
            }
        }
    }
}
