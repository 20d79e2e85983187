use nalgebra::{DMatrix, DVector};

/// Relative rank tolerance: singular values `≤ RANK_TOLERANCE · σ₁` are
/// treated as zero by [`pinv`].
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Thin SVD `J = Σ σ_i m_i n_iᵀ` with `σ₁ ≥ … ≥ σ_k ≥ 0`, `k = min(rows, cols)`.
///
/// Only the `k` singular pairs ever enter the control laws, so the
/// orthogonal complements of `M` and `N` are not formed.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    /// `rows × k`, columns `m_i`.
    pub m: DMatrix<f64>,
    pub sigma: DVector<f64>,
    /// `cols × k`, columns `n_i`.
    pub n: DMatrix<f64>,
}

impl SvdFactors {
    pub fn new(jac: &DMatrix<f64>) -> Self {
        let svd = jac.clone().svd(true, true);
        let u = svd.u.expect("u requested");
        let v = svd.v_t.expect("v_t requested").transpose();
        let k = svd.singular_values.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        SvdFactors {
            m: u.select_columns(order.iter()),
            sigma: DVector::from_iterator(k, order.iter().map(|&i| svd.singular_values[i])),
            n: v.select_columns(order.iter()),
        }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Numerical rank under the relative tolerance `rank_tol · σ₁`.
    pub fn rank(&self, rank_tol: f64) -> usize {
        let cutoff = rank_tol * self.sigma_max();
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.iter().copied().next().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.iter().copied().last().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.m * DMatrix::from_diagonal(&self.sigma) * self.n.transpose()
    }

    /// `Σ_{σ_i > cutoff} σ_i⁻¹ n_i m_iᵀ`.
    pub fn pinv(&self, rank_tol: f64) -> DMatrix<f64> {
        let cutoff = rank_tol * self.sigma_max();
        let inv = self.sigma.map(|s| if s > cutoff { s.recip() } else { 0.0 });
        &self.n * DMatrix::from_diagonal(&inv) * self.m.transpose()
    }
}

/// Moore–Penrose pseudoinverse; singular values `≤ rank_tol · σ₁` are dropped.
pub fn pinv(jac: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    SvdFactors::new(jac).pinv(rank_tol)
}

/// Damping `λ²` of the adaptive damped least-squares inverse.
pub fn alsi_damping(sigma_min: f64, eps: f64, lambda_max: f64) -> f64 {
    if sigma_min >= eps {
        0.0
    } else {
        (1.0 - (sigma_min / eps).powi(2)) * lambda_max * lambda_max
    }
}

/// Adaptive damped least-squares inverse `Jᵀ(JJᵀ + λ²I)⁻¹`, `λ²` driven by
/// the smallest singular value. Falls back to [`pinv`] when undamped, so a
/// rank-deficient but well-separated `J` never hits a singular solve.
pub fn alsi_pinv(jac: &DMatrix<f64>, eps: f64, lambda_max: f64) -> DMatrix<f64> {
    let svd = SvdFactors::new(jac);
    let lambda2 = alsi_damping(svd.sigma_min(), eps, lambda_max);
    if lambda2 == 0.0 {
        return svd.pinv(RANK_TOLERANCE);
    }
    // N diag(σ/(σ² + λ²)) Mᵀ, the same matrix as Jᵀ(JJᵀ + λ²I)⁻¹ on the
    // range of J and zero on its complement.
    let w = svd.sigma.map(|s| s / (s * s + lambda2));
    &svd.n * DMatrix::from_diagonal(&w) * svd.m.transpose()
}

/// How the H∞ laws invert the analytical Jacobian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PseudoInverse {
    MoorePenrose { rank_tol: f64 },
    Alsi { eps: f64, lambda_max: f64 },
}

impl Default for PseudoInverse {
    fn default() -> Self {
        PseudoInverse::MoorePenrose {
            rank_tol: RANK_TOLERANCE,
        }
    }
}

impl PseudoInverse {
    pub fn apply(&self, jac: &DMatrix<f64>) -> DMatrix<f64> {
        match *self {
            PseudoInverse::MoorePenrose { rank_tol } => pinv(jac, rank_tol),
            PseudoInverse::Alsi { eps, lambda_max } => alsi_pinv(jac, eps, lambda_max),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pinv() {
        let i = DMatrix::<f64>::identity(6, 6);
        assert!((pinv(&i, RANK_TOLERANCE) - &i).norm() < 1e-15);
    }

    #[test]
    fn diagonal_with_zero() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let p = pinv(&a, RANK_TOLERANCE);
        assert!((p - DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn singular_values_are_sorted() {
        let a = DMatrix::from_row_slice(
            3,
            4,
            &[
                0.1, 0.0, 0.0, 0.0, //
                0.0, 5.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        let svd = SvdFactors::new(&a);
        assert_eq!(svd.len(), 3);
        assert!(svd.sigma[0] >= svd.sigma[1] && svd.sigma[1] >= svd.sigma[2]);
        assert!((svd.reconstruct() - a).norm() < 1e-14);
    }

    #[test]
    fn alsi_limits() {
        assert_eq!(alsi_damping(0.0, 0.01, 2.0), 4.0);
        assert_eq!(alsi_damping(0.02, 0.01, 2.0), 0.0);
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.2, 0.0, 0.0, 1.0, 0.5]);
        assert!((alsi_pinv(&a, 0.01, 2.0) - pinv(&a, RANK_TOLERANCE)).norm() < 1e-12);
    }
}
