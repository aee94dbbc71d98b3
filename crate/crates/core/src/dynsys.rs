//! Plants, trajectories, Lie derivatives and pushforwards.

use crate::completion::Immersion;
use crate::numkit::{integrate_fixed_step, Grid, Truncation};
use crate::{Error, Result, Scalar};

/// A plant `ẋ = f(x, u)`, `y = h(x)` with a known input signal.
pub trait ControlledSystem<T: Scalar> {
    fn state_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn dynamics(&self, x: &[T], u: &[T]) -> Vec<T>;
    fn output(&self, x: &[T]) -> Vec<T>;

    fn is_admissible(&self, _x: &[T]) -> bool {
        true
    }

    /// Input applied at time `t`; empty for autonomous plants.
    fn input(&self, _t: T) -> Vec<T> {
        Vec::new()
    }
}

impl<T: Scalar, S: ControlledSystem<T> + ?Sized> ControlledSystem<T> for &S {
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn output_dim(&self) -> usize {
        (**self).output_dim()
    }
    fn dynamics(&self, x: &[T], u: &[T]) -> Vec<T> {
        (**self).dynamics(x, u)
    }
    fn output(&self, x: &[T]) -> Vec<T> {
        (**self).output(x)
    }
    fn is_admissible(&self, x: &[T]) -> bool {
        (**self).is_admissible(x)
    }
    fn input(&self, t: T) -> Vec<T> {
        (**self).input(t)
    }
}

/// Autonomous system from a closure, output = full state.
pub struct FnSystem<F> {
    dim: usize,
    field: F,
}

impl<F> FnSystem<F> {
    pub fn new(dim: usize, field: F) -> Self {
        Self { dim, field }
    }
}

impl<T: Scalar, F: Fn(&[T]) -> Vec<T>> ControlledSystem<T> for FnSystem<F> {
    fn state_dim(&self) -> usize {
        self.dim
    }
    fn output_dim(&self) -> usize {
        self.dim
    }
    fn dynamics(&self, x: &[T], _u: &[T]) -> Vec<T> {
        (self.field)(x)
    }
    fn output(&self, x: &[T]) -> Vec<T> {
        x.to_vec()
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub grid: Grid<T>,
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub truncation: Option<Truncation<T>>,
    /// First node at which the plant left its admissible set.
    pub left_admissible_at: Option<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> &[T] {
        self.states
            .last()
            .expect("trajectory stores the initial state")
    }
}

pub fn simulate<T: Scalar, S: ControlledSystem<T>>(
    sys: &S,
    x0: &[T],
    grid: &Grid<T>,
) -> Result<Trajectory<T>> {
    if x0.len() != sys.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.state_dim(),
            found: x0.len(),
        });
    }
    if !sys.is_admissible(x0) {
        return Err(Error::invalid("x0", "initial state is not admissible"));
    }
    let run = integrate_fixed_step(|t, x| Ok(sys.dynamics(x, &sys.input(t))), x0, grid)?;
    let left_admissible_at = run
        .times
        .iter()
        .zip(&run.states)
        .find(|(_, x)| !sys.is_admissible(x))
        .map(|(&t, _)| t);
    Ok(Trajectory {
        grid: *grid,
        times: run.times,
        states: run.states,
        truncation: run.truncation,
        left_admissible_at,
    })
}

/// `Jφ(x)·f(x, u)`.
pub fn lie_derivative<T: Scalar, I, S>(map: &I, sys: &S, x: &[T], u: &[T]) -> Vec<T>
where
    I: Immersion<T> + ?Sized,
    S: ControlledSystem<T> + ?Sized,
{
    map.jacobian(x).mul_vec(&sys.dynamics(x, u))
}

/// Plant dynamics transported to image coordinates through a left inverse.
pub struct Pushforward<'a, I: ?Sized, S: ?Sized> {
    immersion: &'a I,
    sys: &'a S,
}

pub fn pushforward_dynamics<'a, T, I, S>(immersion: &'a I, sys: &'a S) -> Pushforward<'a, I, S>
where
    T: Scalar,
    I: Immersion<T> + ?Sized,
    S: ControlledSystem<T> + ?Sized,
{
    Pushforward { immersion, sys }
}

impl<I: ?Sized, S: ?Sized> Pushforward<'_, I, S> {
    /// `ξ̇ = Jφ(φ⁻¹(ξ))·f(φ⁻¹(ξ), u)`.
    pub fn eval<T>(&self, xi: &[T], u: &[T]) -> Result<Vec<T>>
    where
        T: Scalar,
        I: Immersion<T>,
        S: ControlledSystem<T>,
    {
        let x = self.immersion.left_inverse(xi).map_err(|e| match e {
            Error::NoLeftInverse => e,
            _ => Error::OutOfImage,
        })?;
        if !self.immersion.in_domain(&x) {
            return Err(Error::OutOfImage);
        }
        Ok(lie_derivative(self.immersion, self.sys, &x, u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::IdentityImmersion;

    #[test]
    fn zero_dynamics_are_constant() {
        let sys = FnSystem::new(2, |_: &[f64]| vec![0.0, 0.0]);
        let traj = simulate(&sys, &[1.0, 2.0], &Grid::new(0.0, 1.0, 0.1).unwrap()).unwrap();
        assert!(traj.states.iter().all(|s| s == &vec![1.0, 2.0]));
        assert!(traj.left_admissible_at.is_none());
    }

    #[test]
    fn identity_lie_derivative_is_the_field() {
        let sys = FnSystem::new(2, |x: &[f64]| vec![x[1], -x[0]]);
        let id = IdentityImmersion::new(2);
        assert_eq!(lie_derivative(&id, &sys, &[1.0, 2.0], &[]), vec![2.0, -1.0]);
        let push = pushforward_dynamics(&id, &sys);
        assert_eq!(push.eval(&[1.0, 2.0], &[]).unwrap(), vec![2.0, -1.0]);
    }

    #[test]
    fn simulation_is_deterministic() {
        let sys = FnSystem::new(3, |x: &[f64]| vec![x[1], -x[0] * x[2], 0.0]);
        let g = Grid::new(0.0, 2.0, 1e-3).unwrap();
        let a = simulate(&sys, &[1.0, 0.0, 1.0], &g).unwrap();
        let b = simulate(&sys, &[1.0, 0.0, 1.0], &g).unwrap();
        assert_eq!(a.states, b.states);
    }
}
