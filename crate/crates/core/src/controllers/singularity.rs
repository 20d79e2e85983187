use nalgebra::{DMatrix, DVector, Vector6};

use super::linalg::SvdFactors;
use crate::error::{Error, Result};

/// Size of the singular region and the cap of the proximity measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularRegionSpec {
    pub sigma_region: f64,
    pub sigma_far: f64,
}

impl SingularRegionSpec {
    pub fn new(sigma_region: f64, sigma_far: f64) -> Result<Self> {
        if !(sigma_region > 0.0 && sigma_region.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_region must be positive, got {sigma_region}"
            )));
        }
        if !(sigma_far > 1.0 && sigma_far.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_far must exceed 1, got {sigma_far}"
            )));
        }
        Ok(SingularRegionSpec {
            sigma_region,
            sigma_far,
        })
    }

    /// Smallest singular value the law can settle at when driven into the
    /// region: `σ_region (1 − 1/σ_far)`.
    pub fn sigma_floor(&self) -> f64 {
        self.sigma_region * (1.0 - self.sigma_far.recip())
    }
}

/// Proximity to the singular region, `σ_far (1 − σ/σ_region)` inside it and
/// `0` outside. Monotone nonincreasing on `[0, ∞)`.
pub fn f_sigma(sigma: f64, spec: &SingularRegionSpec) -> f64 {
    if sigma <= spec.sigma_region {
        spec.sigma_far * (1.0 - sigma / spec.sigma_region)
    } else {
        0.0
    }
}

/// Output of [`singularity_robust_law`], everything needed to log the
/// induced disturbance and check its bound.
#[derive(Clone, Debug)]
pub struct SingularityProjection {
    pub qdot: DVector<f64>,
    pub kappa_s: f64,
    /// Number of singular values inside the region.
    pub s_bar: usize,
    /// `N_s̄ᵀ q̇_N`.
    pub nominal_components: DVector<f64>,
    pub sigma_min: f64,
}

impl SingularityProjection {
    /// `q̇_S = q̇ − q̇_N`.
    pub fn auxiliary(&self, qdot_nominal: &DVector<f64>) -> DVector<f64> {
        &self.qdot - qdot_nominal
    }

    /// `vec₆(v_s) = J q̇_S`.
    pub fn induced_disturbance(&self, jac: &DMatrix<f64>, qdot_nominal: &DVector<f64>) -> Vector6<f64> {
        let v = jac * self.auxiliary(qdot_nominal);
        Vector6::from_column_slice(v.as_slice())
    }

    /// `κ_s √s̄ ‖Γ‖`.
    pub fn disturbance_bound(&self, gamma: &Vector6<f64>) -> f64 {
        self.kappa_s * (self.s_bar as f64).sqrt() * gamma.norm()
    }
}

/// `q̇ = (I − κ_s N_s̄ N_s̄ᵀ) q̇_N` where `N_s̄` collects the right singular
/// vectors whose singular values lie in the region, and
/// `κ_s = min(f_σ(σ_min), 1)` over those values.
pub fn singularity_robust_law(
    jac: &DMatrix<f64>,
    qdot_nominal: &DVector<f64>,
    spec: &SingularRegionSpec,
) -> SingularityProjection {
    let svd = SvdFactors::new(jac);
    project(&svd, qdot_nominal, spec)
}

pub(crate) fn project(
    svd: &SvdFactors,
    qdot_nominal: &DVector<f64>,
    spec: &SingularRegionSpec,
) -> SingularityProjection {
    let inside: Vec<usize> = (0..svd.len()).filter(|&i| svd.sigma[i] <= spec.sigma_region).collect();
    let sigma_min = svd.sigma_min();
    if inside.is_empty() {
        return SingularityProjection {
            qdot: qdot_nominal.clone(),
            kappa_s: 0.0,
            s_bar: 0,
            nominal_components: DVector::zeros(0),
            sigma_min,
        };
    }
    let kappa_s = f_sigma(sigma_min, spec).min(1.0);
    let n_bar = svd.n.select_columns(inside.iter());
    let components = n_bar.transpose() * qdot_nominal;
    let qdot = qdot_nominal - (&n_bar * &components) * kappa_s;
    SingularityProjection {
        qdot,
        kappa_s,
        s_bar: inside.len(),
        nominal_components: components,
        sigma_min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SingularRegionSpec {
        SingularRegionSpec::new(0.01, 2.0).unwrap()
    }

    #[test]
    fn f_sigma_values() {
        assert_eq!(f_sigma(0.02, &spec()), 0.0);
        assert_eq!(f_sigma(0.0, &spec()), 2.0);
        assert_eq!(f_sigma(0.005, &spec()), 1.0);
        assert_eq!(spec().sigma_floor(), 0.005);
    }

    #[test]
    fn empty_region_is_identity() {
        let jac = DMatrix::<f64>::identity(6, 7);
        let q = DVector::from_fn(7, |i, _| i as f64 - 3.0);
        let out = singularity_robust_law(&jac, &q, &spec());
        assert_eq!(out.kappa_s, 0.0);
        assert_eq!(out.qdot, q);
    }

    #[test]
    fn full_attenuation_annihilates_direction() {
        let mut jac = DMatrix::<f64>::identity(6, 6);
        jac[(4, 4)] = 0.001;
        let q = DVector::from_element(6, 1.0);
        let out = singularity_robust_law(&jac, &q, &spec());
        assert_eq!(out.kappa_s, 1.0);
        assert_eq!(out.s_bar, 1);
        assert!(out.qdot[4].abs() < 1e-15);
        assert!((out.qdot[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(SingularRegionSpec::new(0.0, 2.0).is_err());
        assert!(SingularRegionSpec::new(0.01, 1.0).is_err());
    }
}
