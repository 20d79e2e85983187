//! Fixed-step closed-loop simulation of the disturbed end-effector
//! kinematics, and the desired-motion generators it tracks.

mod sim;
mod trajectory;

pub use sim::{step_count, SimRecord, SimState, SimTrace, Simulation, DEFAULT_DT};
pub use trajectory::{MovingTarget, ScrewMotion, Trajectory};
