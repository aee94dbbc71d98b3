//! Dense small-dimension numerics: matrices, RK4, LU solves, finite
//! differences, event bisection and the high-gain gain equation.

mod event;
mod fd;
mod gain;
mod integrate;
mod linalg;
mod matrix;
pub mod vector;

pub use event::bisect_event;
pub use fd::{default_fd_step, jacobian_fd, try_jacobian_fd};
pub use gain::{gain_equation, gain_equation_residual, highgain_gain};
pub use integrate::{integrate_fixed_step, rk4_step, Grid, Integration, Truncation};
pub use linalg::{determinant, inverse, solve_linear, symmetric_eigenvalues, LinearSolution, Lu};
pub use matrix::Matrix;
