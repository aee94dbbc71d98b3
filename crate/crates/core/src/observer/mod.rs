//! Observer runtimes: raw observers in image coordinates, their transport
//! to `(x̂, ŵ)` coordinates through a Jacobian solve, and the cascade
//! simulation of plant plus observer.

mod cascade;
mod modifier;

pub use cascade::{
    cascade_simulate, estimation_error, CascadeOptions, Coordinates, ObserverRun, Realization,
    Summary,
};
pub use modifier::{convexity_modifier, AffineConstraint, Constraint, ConvexityModifier, Modified};

use crate::completion::CoordinateMap;
use crate::numkit::solve_linear;
use crate::{cast, Error, Result, Scalar};

/// Observer dynamics `ξ̂̇ = φ(ξ̂, x̂, y, u)` written in image coordinates.
pub trait RawObserver<T: Scalar> {
    fn dim(&self) -> usize;
    fn field(&self, xi: &[T], x_hat: &[T], y: &[T], u: &[T]) -> Vec<T>;
}

impl<T: Scalar, O: RawObserver<T> + ?Sized> RawObserver<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn field(&self, xi: &[T], x_hat: &[T], y: &[T], u: &[T]) -> Vec<T> {
        (**self).field(xi, x_hat, y, u)
    }
}

/// `min{b, max{s, −b}}`
pub fn saturate<T: Scalar>(s: T, bound: T) -> T {
    s.max(-bound).min(bound)
}

pub fn highgain_raw_step<T: Scalar, O: RawObserver<T> + ?Sized>(
    obs: &O,
    xi: &[T],
    x_hat: &[T],
    y: &[T],
    u: &[T],
) -> Vec<T> {
    obs.field(xi, x_hat, y, u)
}

/// Refusal threshold on the 1-norm condition estimate of the Jacobian.
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedStep<T> {
    pub derivative: Vec<T>,
    pub condition: T,
}

/// `(x̂, ŵ)̇ = J(x̂, ŵ)⁻¹·φ(map(x̂, ŵ), x̂, y, u)`. To keep the raw
/// dynamics while enlarging the image, pass an
/// [`extension::Precomposed`](crate::extension::Precomposed) map.
pub fn extended_observer_step<T, M, O>(
    map: &M,
    obs: &O,
    s: &[T],
    y: &[T],
    u: &[T],
    condition_limit: T,
) -> Result<ExtendedStep<T>>
where
    T: Scalar,
    M: CoordinateMap<T> + ?Sized,
    O: RawObserver<T> + ?Sized,
{
    if s.len() != map.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            found: s.len(),
        });
    }
    let xi = map.eval(s)?;
    let rhs = obs.field(&xi, &s[..map.state_dim()], y, u);
    let jac = map.jacobian(s)?;
    let sol = solve_linear(&jac, &rhs)?;
    if !(sol.condition <= condition_limit) {
        return Err(Error::SingularMatrix {
            condition: sol.condition.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(ExtendedStep {
        derivative: sol.x,
        condition: sol.condition,
    })
}

pub(crate) fn default_condition_limit<T: Scalar>() -> T {
    cast(DEFAULT_CONDITION_LIMIT)
}
