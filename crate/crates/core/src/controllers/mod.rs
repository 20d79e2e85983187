//! H∞ gain synthesis, the robust tracking and singularity-robust laws, the
//! pseudoinverse machinery they rest on, and the comparison baselines.

mod baselines;
mod gains;
mod linalg;
mod registry;
mod singularity;
mod tracking;

pub use baselines::{angle_axis, baseline_control, robust_jacobian, BaselineKind};
pub use gains::{hinf_gains, optimal_weights, orientation_bound, translation_bound, AttenuationSpec, GainPair};
pub use linalg::{alsi_damping, alsi_pinv, pinv, PseudoInverse, SvdFactors, RANK_TOLERANCE};
pub use registry::{
    controller_names, Baseline, Constructor, ControlContext, ControlOutput, Controller, ControllerParams,
    ControllerRegistry, HinfSingularityRobust, HinfTracking,
};
pub use singularity::{f_sigma, singularity_robust_law, SingularRegionSpec, SingularityProjection};
pub use tracking::{feasibility_residual, hinf_tracking_law, TaskCommand};
