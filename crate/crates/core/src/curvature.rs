//! Curvature-dependent constants.
//!
//! With sectional curvature in `[K_min, K_max]` and working-domain
//! diameter `D`:
//!
//! ```text
//! ζ = √(−K_min)·D·coth(√(−K_min)·D)   if K_min < 0, else 1
//! δ = √K_max·D·cot(√K_max·D)          if K_max > 0, else 1
//! d(M) = 4·max(ζ − 1, 1 − δ)
//! horizon = 2 / d(M)
//! ```
//!
//! `ζ` and `δ` bound the spectrum of the Hessian of `½d(·, x*)²`; `d(M)`
//! weighs the non-accelerated `1/k` term of the convergence bound, and the
//! horizon is the iteration count up to which the `1/k²` term dominates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this argument `x·coth x` and `x·cot x` use their Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBounds {
    pub k_min: f64,
    pub k_max: f64,
    /// A-priori bound on the diameter of the working domain.
    pub diameter: f64,
}

impl CurvatureBounds {
    pub fn new(k_min: f64, k_max: f64, diameter: f64) -> Result<Self> {
        let b = Self {
            k_min,
            k_max,
            diameter,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn euclidean(diameter: f64) -> Self {
        Self {
            k_min: 0.0,
            k_max: 0.0,
            diameter,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_min.is_finite() && self.k_max.is_finite() && self.diameter.is_finite()) {
            return Err(Error::NonFinite("curvature bounds"));
        }
        if self.k_min > self.k_max {
            return Err(Error::Invalid(format!(
                "K_min = {} exceeds K_max = {}",
                self.k_min, self.k_max
            )));
        }
        if self.diameter <= 0.0 {
            return Err(Error::Invalid(format!(
                "diameter must be positive, got {}",
                self.diameter
            )));
        }
        if self.k_max > 0.0 {
            let arg = self.k_max.sqrt() * self.diameter;
            if arg >= std::f64::consts::PI {
                return Err(Error::CurvaturePole(arg));
            }
        }
        Ok(())
    }

    pub fn with_diameter(self, diameter: f64) -> Self {
        Self { diameter, ..self }
    }

    pub fn constants(&self) -> Result<CurvatureConstants> {
        CurvatureConstants::from_bounds(self)
    }
}

/// `x·coth(x)`, accurate near zero.
pub fn x_coth_x(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tanh()
    }
}

/// `x·cot(x)`, accurate near zero.
pub fn x_cot_x(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tan()
    }
}

/// Upper Hessian bound at distance `r` for curvature `≥ k_min`.
pub fn zeta_at(k_min: f64, r: f64) -> f64 {
    if k_min < 0.0 {
        x_coth_x((-k_min).sqrt() * r)
    } else {
        1.0
    }
}

/// Lower Hessian bound at distance `r` for curvature `≤ k_max`.
pub fn delta_at(k_max: f64, r: f64) -> Result<f64> {
    if k_max > 0.0 {
        let arg = k_max.sqrt() * r;
        if arg >= std::f64::consts::PI {
            return Err(Error::CurvaturePole(arg));
        }
        Ok(x_cot_x(arg))
    } else {
        Ok(1.0)
    }
}

pub fn zeta(b: &CurvatureBounds) -> f64 {
    zeta_at(b.k_min, b.diameter)
}

pub fn delta(b: &CurvatureBounds) -> Result<f64> {
    delta_at(b.k_max, b.diameter)
}

/// `max(ζ − 1, 1 − δ)`, the per-step curvature penalty.
pub fn excess(b: &CurvatureBounds) -> Result<f64> {
    Ok((zeta(b) - 1.0).max(1.0 - delta(b)?))
}

pub fn discrepancy(b: &CurvatureBounds) -> Result<f64> {
    Ok(4.0 * excess(b)?)
}

/// `2 / d(M)`; infinite on flat space.
pub fn accel_horizon(b: &CurvatureBounds) -> Result<f64> {
    let d = discrepancy(b)?;
    Ok(if d == 0.0 { f64::INFINITY } else { 2.0 / d })
}

/// Whether the worst-case bound beats plain Riemannian gradient descent:
/// `max(ζ − 1, 1 − δ) < 1/16`.
pub fn rgd_dominance_check(b: &CurvatureBounds) -> Result<bool> {
    Ok(excess(b)? < 1.0 / 16.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureConstants {
    pub zeta: f64,
    pub delta: f64,
    pub discrepancy: f64,
    pub horizon: f64,
}

impl CurvatureConstants {
    pub fn from_bounds(b: &CurvatureBounds) -> Result<Self> {
        b.validate()?;
        let zeta = zeta(b);
        let delta = delta(b)?;
        let discrepancy = 4.0 * (zeta - 1.0).max(1.0 - delta);
        let horizon = if discrepancy == 0.0 {
            f64::INFINITY
        } else {
            2.0 / discrepancy
        };
        Ok(Self {
            zeta,
            delta,
            discrepancy,
            horizon,
        })
    }

    /// Flat space: ζ = δ = 1.
    pub fn euclidean() -> Self {
        Self {
            zeta: 1.0,
            delta: 1.0,
            discrepancy: 0.0,
            horizon: f64::INFINITY,
        }
    }

    pub fn excess(&self) -> f64 {
        self.discrepancy / 4.0
    }

    /// The fixed `key=value` block printed by the CLI.
    pub fn key_values(&self) -> String {
        format!(
            "zeta={}\ndelta={}\ndiscrepancy={}\nhorizon={}\n",
            self.zeta, self.delta, self.discrepancy, self.horizon
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values evaluated with mpmath at 30 digits.
    const ZETA_01: f64 = 1.003_331_113_225_399;
    const DELTA_01: f64 = 0.996_664_442_325_923_8;
    const COTH_1: f64 = 1.313_035_285_499_331_3;

    fn b(k_min: f64, k_max: f64, d: f64) -> CurvatureBounds {
        CurvatureBounds::new(k_min, k_max, d).unwrap()
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta(&b(0.5, 0.5, 1.0)), 1.0);
        assert_close!(zeta(&b(-1.0, 0.0, 0.1)), ZETA_01, 1e-15);
        assert_close!(zeta(&b(-1.0, 0.0, 1.0)), COTH_1, 1e-15);
        // the rounded value quoted for this domain
        assert_close!(zeta(&b(-1.0, 0.0, 0.1)), 1.003, 5e-4);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&b(-0.3, -0.3, 1.0)).unwrap(), 1.0);
        assert_close!(delta(&b(0.0, 1.0, 0.1)).unwrap(), DELTA_01, 1e-15);
        assert_close!(delta(&b(0.0, 1.0, 0.1)).unwrap(), 0.997, 5e-4);
        assert_close!(delta_at(1.0, std::f64::consts::FRAC_PI_2).unwrap(), 0.0, 1e-15);
    }

    #[test]
    fn delta_pole_is_a_domain_error() {
        let raw = CurvatureBounds {
            k_min: 0.0,
            k_max: 1.0,
            diameter: std::f64::consts::PI,
        };
        assert!(matches!(delta(&raw), Err(Error::CurvaturePole(_))));
        assert!(CurvatureBounds::new(0.0, 1.0, 3.5).is_err());
    }

    #[test]
    fn discrepancy_and_horizon() {
        assert_eq!(discrepancy(&CurvatureBounds::euclidean(5.0)).unwrap(), 0.0);
        assert_eq!(accel_horizon(&CurvatureBounds::euclidean(5.0)).unwrap(), f64::INFINITY);

        let unit = b(-1.0, 1.0, 0.1);
        let d = discrepancy(&unit).unwrap();
        // the positive-curvature side dominates at this radius
        assert_close!(d, 4.0 * (1.0 - DELTA_01), 1e-15);
        assert_close!(d, 0.013_342_230_696_304_856, 1e-14);
        assert_close!(accel_horizon(&unit).unwrap(), 149.899_971_415_866_9, 1e-9);

        let hyp = b(-1.0, 0.0, 1.0);
        assert_close!(discrepancy(&hyp).unwrap(), 1.252_141_141_997_325_2, 1e-14);
        assert_close!(accel_horizon(&hyp).unwrap(), 1.597_264_024_732_662_6, 1e-12);
    }

    #[test]
    fn dominance_examples() {
        assert!(rgd_dominance_check(&b(-1.0, 1.0, 0.1)).unwrap());
        assert!(!rgd_dominance_check(&b(-1.0, 0.0, 1.0)).unwrap());
        assert!(rgd_dominance_check(&CurvatureBounds::euclidean(100.0)).unwrap());
    }

    #[test]
    fn series_branch_is_continuous() {
        for x in [0.5e-4_f64, 0.99e-4, 1.01e-4, 2e-4] {
            let exact_coth = 1.0 + x * x / 3.0 - x.powi(4) / 45.0;
            let exact_cot = 1.0 - x * x / 3.0 - x.powi(4) / 45.0;
            assert_close!(x_coth_x(x), exact_coth, 1e-15);
            assert_close!(x_cot_x(x), exact_cot, 1e-15);
        }
    }

    #[test]
    fn constants_struct_consistent() {
        let c = b(-0.5, 0.0, 3.0).constants().unwrap();
        assert!(c.zeta >= 1.0 && c.delta <= 1.0);
        assert_eq!(c.discrepancy, 4.0 * (c.zeta - 1.0).max(1.0 - c.delta));
        assert_eq!(c.horizon, 2.0 / c.discrepancy);
        let kv = c.key_values();
        for key in ["zeta=", "delta=", "discrepancy=", "horizon="] {
            assert!(kv.contains(key));
        }
    }
}
