use super::RawObserver;
use crate::numkit::{inverse, Matrix};
use crate::{Error, Result, Scalar};

/// A constraint `κ(ξ) ≤ 0` with its gradient.
pub trait Constraint<T: Scalar> {
    fn value(&self, xi: &[T]) -> T;
    fn gradient(&self, xi: &[T]) -> Vec<T>;
}

/// `κ(ξ) = c·ξ + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineConstraint<T> {
    pub coeffs: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Constraint<T> for AffineConstraint<T> {
    fn value(&self, xi: &[T]) -> T {
        self.coeffs
            .iter()
            .zip(xi)
            .fold(self.offset, |acc, (&c, &x)| acc + c * x)
    }
    fn gradient(&self, _xi: &[T]) -> Vec<T> {
        self.coeffs.clone()
    }
}

/// Additive term `−γ·S⁻¹·Σᵢ 𝔥ᵢ∇𝔥ᵢ` with `𝔥ᵢ = max{κᵢ + δ, 0}²`, pushing
/// the estimate back into the convex set `{κᵢ ≤ 0}`.
#[derive(Clone, Debug)]
pub struct ConvexityModifier<C, T> {
    constraints: Vec<C>,
    s_inverse: Matrix<T>,
    gamma: T,
    delta: T,
}

impl<T: Scalar, C: Constraint<T>> ConvexityModifier<C, T> {
    pub fn new(constraints: Vec<C>, s: &Matrix<T>, gamma: T, delta: T) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::invalid(
                "gamma",
                format!("must be positive, got {gamma}"),
            ));
        }
        if !(delta >= T::zero()) {
            return Err(Error::invalid(
                "delta",
                format!("must be non-negative, got {delta}"),
            ));
        }
        Ok(Self {
            constraints,
            s_inverse: inverse(s)?,
            gamma,
            delta,
        })
    }

    pub fn constraints(&self) -> &[C] {
        &self.constraints
    }

    pub fn term(&self, xi: &[T]) -> Vec<T> {
        let mut acc = vec![T::zero(); xi.len()];
        for c in &self.constraints {
            let active = (c.value(xi) + self.delta).max(T::zero());
            if active == T::zero() {
                continue;
            }
            // 𝔥·∇𝔥 = active²·2·active·∇κ
            let weight = active * active * (active + active);
            for (a, g) in acc.iter_mut().zip(c.gradient(xi)) {
                *a = *a + weight * g;
            }
        }
        self.s_inverse
            .mul_vec(&acc)
            .into_iter()
            .map(|v| -self.gamma * v)
            .collect()
    }
}

pub fn convexity_modifier<T: Scalar, C: Constraint<T> + Clone>(
    constraints: &[C],
    s: &Matrix<T>,
    gamma: T,
    delta: T,
    xi: &[T],
) -> Result<Vec<T>> {
    Ok(ConvexityModifier::new(constraints.to_vec(), s, gamma, delta)?.term(xi))
}

/// A raw observer with the convexity term added to its field.
#[derive(Clone, Debug)]
pub struct Modified<O, C, T> {
    pub inner: O,
    pub modifier: ConvexityModifier<C, T>,
}

impl<T: Scalar, O: RawObserver<T>, C: Constraint<T>> RawObserver<T> for Modified<O, C, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn field(&self, xi: &[T], x_hat: &[T], y: &[T], u: &[T]) -> Vec<T> {
        let mut v = self.inner.field(xi, x_hat, y, u);
        for (a, b) in v.iter_mut().zip(self.modifier.term(xi)) {
            *a = *a + b;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_substitution() {
        let k = AffineConstraint {
            coeffs: vec![1.0],
            offset: -1.0,
        };
        let t = convexity_modifier(&[k], &Matrix::identity(1), 2.0, 0.0, &[2.0]).unwrap();
        assert_eq!(t, vec![-4.0]);
    }

    #[test]
    fn inactive_deep_inside() {
        let k = AffineConstraint {
            coeffs: vec![1.0, 0.0],
            offset: -1.0,
        };
        let s = Matrix::from_rows(&[[1.0, -1.0], [-1.0, 2.0]]);
        let t = convexity_modifier(&[k], &s, 5.0, 0.1, &[0.5, 3.0]).unwrap();
        assert_eq!(t, vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_gain() {
        let k = AffineConstraint {
            coeffs: vec![1.0],
            offset: 0.0,
        };
        assert!(ConvexityModifier::new(vec![k], &Matrix::identity(1), 0.0, 0.0).is_err());
    }
}
