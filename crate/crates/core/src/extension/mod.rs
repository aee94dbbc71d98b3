//! Image extension: diffeomorphisms `ℝᵐ → E` that are the identity on a
//! retained core of `E`, built by flowing along a contracting field.

mod flow;
mod halfspace;
mod quadratic;
mod submersion;

pub use flow::{
    check_transversality, flow, hausdorff_gap, image_extend, image_extend_inverse,
    time_to_boundary, BoundaryHit, FlowExtension, FlowOptions, HausdorffGap,
};
pub use halfspace::{halfspace_extension, Halfspace, HalfspaceForm};
pub use quadratic::{quadratic_sublevel_extension, QuadraticSublevel};
pub use submersion::{submersion_sublevel, SubmersionSublevel};

use crate::completion::CoordinateMap;
use crate::numkit::vector::norm_sq;
use crate::numkit::{try_jacobian_fd, Matrix};
use crate::{Error, Result, Scalar};

/// Layer thickness `ε` of the time reparameterization
/// `ν(t) = ε²/(2ε + t)` for `t ≥ −ε`, `ν(t) = −t` otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuParams<T> {
    epsilon: T,
}

impl<T: Scalar> NuParams<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::invalid(
                "epsilon",
                format!("must be positive, got {epsilon}"),
            ));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn nu(&self, t: T) -> T {
        let e = self.epsilon;
        if t >= -e {
            e * e / (e + e + t)
        } else {
            -t
        }
    }

    pub fn nu_derivative(&self, t: T) -> T {
        let e = self.epsilon;
        if t >= -e {
            let d = e + e + t;
            -e * e / (d * d)
        } else {
            -T::one()
        }
    }

    pub fn nu_inverse(&self, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return Err(Error::NonPositiveArgument(s.to_f64().unwrap_or(f64::NAN)));
        }
        let e = self.epsilon;
        Ok(if s < e { e * e / s - (e + e) } else { -s })
    }
}

/// Sublevel description `E = {κ < 0}` with a bounded field `χ` that is
/// transversal to `∂E` and pushes points into `E`.
pub trait ConditionC<T: Scalar> {
    fn dim(&self) -> usize;
    fn kappa(&self, z: &[T]) -> T;
    fn chi(&self, z: &[T]) -> Result<Vec<T>>;

    fn kappa_gradient(&self, z: &[T]) -> Vec<T> {
        try_jacobian_fd(|p| Ok(vec![self.kappa(p)]), z, None)
            .map(|j| j.row(0).to_vec())
            .unwrap_or_else(|_| vec![T::nan(); z.len()])
    }
}

impl<T: Scalar, C: ConditionC<T> + ?Sized> ConditionC<T> for &C {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn kappa(&self, z: &[T]) -> T {
        (**self).kappa(z)
    }
    fn chi(&self, z: &[T]) -> Result<Vec<T>> {
        (**self).chi(z)
    }
    fn kappa_gradient(&self, z: &[T]) -> Vec<T> {
        (**self).kappa_gradient(z)
    }
}

/// Replaces `χ` by `χ/√(1 + |χ|²)`.
#[derive(Clone, Debug)]
pub struct Bounded<C>(pub C);

impl<T: Scalar, C: ConditionC<T>> ConditionC<T> for Bounded<C> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn kappa(&self, z: &[T]) -> T {
        self.0.kappa(z)
    }
    fn chi(&self, z: &[T]) -> Result<Vec<T>> {
        let c = self.0.chi(z)?;
        let s = (T::one() + norm_sq(&c)).sqrt();
        Ok(c.into_iter().map(|v| v / s).collect())
    }
    fn kappa_gradient(&self, z: &[T]) -> Vec<T> {
        self.0.kappa_gradient(z)
    }
}

/// A diffeomorphism `φ: ℝᵐ → E` with its inverse.
pub trait ImageExtension<T: Scalar> {
    fn dim(&self) -> usize;
    fn apply(&self, z: &[T]) -> Result<Vec<T>>;
    fn inverse(&self, y: &[T]) -> Result<Vec<T>>;
    /// Membership of `y` in the target set `E`.
    fn contains(&self, y: &[T]) -> bool;

    fn apply_jacobian(&self, z: &[T]) -> Result<Matrix<T>> {
        try_jacobian_fd(|p| self.apply(p), z, None)
    }

    fn inverse_jacobian(&self, y: &[T]) -> Result<Matrix<T>> {
        try_jacobian_fd(|p| self.inverse(p), y, None)
    }
}

/// `z ↦ second(first(z))`.
#[derive(Clone, Debug)]
pub struct Chain<A, B> {
    pub first: A,
    pub second: B,
}

impl<T: Scalar, A: ImageExtension<T>, B: ImageExtension<T>> ImageExtension<T> for Chain<A, B> {
    fn dim(&self) -> usize {
        self.first.dim()
    }
    fn apply(&self, z: &[T]) -> Result<Vec<T>> {
        self.second.apply(&self.first.apply(z)?)
    }
    fn inverse(&self, y: &[T]) -> Result<Vec<T>> {
        self.first.inverse(&self.second.inverse(y)?)
    }
    fn contains(&self, y: &[T]) -> bool {
        self.second.contains(y)
            && self
                .second
                .inverse(y)
                .is_ok_and(|v| self.first.contains(&v))
    }
    fn apply_jacobian(&self, z: &[T]) -> Result<Matrix<T>> {
        let mid = self.first.apply(z)?;
        Ok(&self.second.apply_jacobian(&mid)? * &self.first.apply_jacobian(z)?)
    }
    fn inverse_jacobian(&self, y: &[T]) -> Result<Matrix<T>> {
        let mid = self.second.inverse(y)?;
        Ok(&self.first.inverse_jacobian(&mid)? * &self.second.inverse_jacobian(y)?)
    }
}

/// `φ⁻¹ ∘ map`: a coordinate map whose image becomes all of `ℝᵐ`.
#[derive(Clone, Debug)]
pub struct Precomposed<M, X> {
    pub map: M,
    pub extension: X,
}

impl<T: Scalar, M: CoordinateMap<T>, X: ImageExtension<T>> CoordinateMap<T> for Precomposed<M, X> {
    fn dim(&self) -> usize {
        self.map.dim()
    }
    fn state_dim(&self) -> usize {
        self.map.state_dim()
    }
    fn eval(&self, s: &[T]) -> Result<Vec<T>> {
        self.extension.inverse(&self.map.eval(s)?)
    }
    fn jacobian(&self, s: &[T]) -> Result<Matrix<T>> {
        let xi = self.map.eval(s)?;
        Ok(&self.extension.inverse_jacobian(&xi)? * &self.map.jacobian(s)?)
    }
    fn inverse(&self, xi: &[T]) -> Result<Vec<T>> {
        self.map.inverse(&self.extension.apply(xi)?)
    }
}
