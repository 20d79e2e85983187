use crate::error::{Error, Result};

/// Prescribed H∞ attenuation levels for orientation (`γ_O1`, `γ_O2`) and
/// translation (`γ_T1`, `γ_T2`) errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttenuationSpec {
    pub gamma_o1: f64,
    pub gamma_o2: f64,
    pub gamma_t1: f64,
    pub gamma_t2: f64,
}

impl AttenuationSpec {
    pub fn new(gamma_o1: f64, gamma_o2: f64, gamma_t1: f64, gamma_t2: f64) -> Result<Self> {
        for (name, g) in [
            ("gamma_O1", gamma_o1),
            ("gamma_O2", gamma_o2),
            ("gamma_T1", gamma_t1),
            ("gamma_T2", gamma_t2),
        ] {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {g}")));
            }
        }
        Ok(AttenuationSpec {
            gamma_o1,
            gamma_o2,
            gamma_t1,
            gamma_t2,
        })
    }

    /// `γ_O1 = γ_O2 = γ_O` and likewise for translation.
    pub fn symmetric(gamma_o: f64, gamma_t: f64) -> Result<Self> {
        AttenuationSpec::new(gamma_o, gamma_o, gamma_t, gamma_t)
    }

    /// Levels whose gains are exactly `(kappa_o, kappa_t)`: `γ = √2 / κ`.
    pub fn from_gains(kappa_o: f64, kappa_t: f64) -> Result<Self> {
        let s = std::f64::consts::SQRT_2;
        AttenuationSpec::symmetric(s / kappa_o, s / kappa_t)
    }

    /// Combined orientation level `(γ_O1⁻² + γ_O2⁻²)^(-1/2)`.
    pub fn gamma_o(&self) -> f64 {
        combined(self.gamma_o1, self.gamma_o2).recip()
    }

    pub fn gamma_t(&self) -> f64 {
        combined(self.gamma_t1, self.gamma_t2).recip()
    }

    /// `γ_O1⁻² + γ_O2⁻²`.
    pub fn sum_o(&self) -> f64 {
        self.gamma_o1.powi(-2) + self.gamma_o2.powi(-2)
    }

    pub fn sum_t(&self) -> f64 {
        self.gamma_t1.powi(-2) + self.gamma_t2.powi(-2)
    }
}

fn combined(a: f64, b: f64) -> f64 {
    (a.powi(-2) + b.powi(-2)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainPair {
    pub kappa_o: f64,
    pub kappa_t: f64,
}

impl GainPair {
    pub fn new(kappa_o: f64, kappa_t: f64) -> Result<Self> {
        if !(kappa_o > 0.0 && kappa_t > 0.0 && kappa_o.is_finite() && kappa_t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gains must be positive, got ({kappa_o}, {kappa_t})"
            )));
        }
        Ok(GainPair { kappa_o, kappa_t })
    }
}

/// Minimum-effort gains meeting the attenuation levels:
/// `κ_O = (γ_O1⁻² + γ_O2⁻²)^(1/2)`, `κ_T = (γ_T1⁻² + γ_T2⁻²)^(1/2)`.
pub fn hinf_gains(spec: &AttenuationSpec) -> GainPair {
    GainPair {
        kappa_o: combined(spec.gamma_o1, spec.gamma_o2),
        kappa_t: combined(spec.gamma_t1, spec.gamma_t2),
    }
}

/// Orientation gain lower bound as a function of the Lyapunov weight:
/// `f(α₁) = 1/α₁ + (α₁/4)(γ_O1⁻² + γ_O2⁻²)`.
pub fn orientation_bound(alpha1: f64, spec: &AttenuationSpec) -> f64 {
    alpha1.recip() + 0.25 * alpha1 * spec.sum_o()
}

/// `g(α₂) = 2/α₂ + (α₂/8)(γ_T1⁻² + γ_T2⁻²)`.
pub fn translation_bound(alpha2: f64, spec: &AttenuationSpec) -> f64 {
    2.0 / alpha2 + 0.125 * alpha2 * spec.sum_t()
}

/// Minimizers `(α₁*, α₂*) = (2 Σ_O^{-1/2}, 4 Σ_T^{-1/2})` of the two bounds.
pub fn optimal_weights(spec: &AttenuationSpec) -> (f64, f64) {
    (2.0 / spec.sum_o().sqrt(), 4.0 / spec.sum_t().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_two_gives_half_sqrt_two() {
        let g = hinf_gains(&AttenuationSpec::symmetric(2.0, 2.0).unwrap());
        assert_eq!(g.kappa_o, std::f64::consts::SQRT_2 / 2.0);
        assert_eq!(g.kappa_t, g.kappa_o);
    }

    #[test]
    fn unit_levels() {
        let g = hinf_gains(&AttenuationSpec::new(1.0, 1.0, 1.0, 1.0).unwrap());
        assert_eq!(g.kappa_o, std::f64::consts::SQRT_2);
    }

    #[test]
    fn bounds_at_optimum_equal_gains() {
        let spec = AttenuationSpec::new(0.7, 3.0, 1.2, 0.4).unwrap();
        let (a1, a2) = optimal_weights(&spec);
        let g = hinf_gains(&spec);
        assert!((orientation_bound(a1, &spec) - g.kappa_o).abs() < 1e-14);
        assert!((translation_bound(a2, &spec) - g.kappa_t).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(AttenuationSpec::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(AttenuationSpec::new(1.0, 1.0, -2.0, 1.0).is_err());
        assert!(GainPair::new(1.0, 0.0).is_err());
    }
}
