//! Jacobian completion: turning an injective immersion `x ↦ φ(x) ∈ ℝᵐ`
//! into a local diffeomorphism `(x, w) ↦ φ(x) + γ(x)w`.

mod extend;
mod minors;
mod parallelizable;
mod submersion;
mod wazewski;

pub use extend::{extend_immersion, CertificationBox, CompletionResult};
pub use minors::{complete_minors, MinorsComplement};
pub use parallelizable::{complete_parallelizable_4, complete_parallelizable_8, octonion_product};
pub use submersion::{complete_from_submersion, QuadraticForm, Submersion, SubmersionComplement};
pub use wazewski::{block_orthogonal_complete, wazewski_complete, Propagation, Region, Wazewski};

use crate::numkit::{symmetric_eigenvalues, Matrix};
use crate::{cast, Error, Result, Scalar};

/// Injective immersion `O ⊂ ℝⁿ → ℝᵐ` with analytic Jacobian.
pub trait Immersion<T: Scalar> {
    fn state_dim(&self) -> usize;
    fn image_dim(&self) -> usize;
    fn eval(&self, x: &[T]) -> Vec<T>;
    fn jacobian(&self, x: &[T]) -> Matrix<T>;

    fn in_domain(&self, _x: &[T]) -> bool {
        true
    }

    /// Closed-form left inverse, when one is known.
    fn left_inverse(&self, _xi: &[T]) -> Result<Vec<T>> {
        Err(Error::NoLeftInverse)
    }
}

impl<T: Scalar, I: Immersion<T> + ?Sized> Immersion<T> for &I {
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn image_dim(&self) -> usize {
        (**self).image_dim()
    }
    fn eval(&self, x: &[T]) -> Vec<T> {
        (**self).eval(x)
    }
    fn jacobian(&self, x: &[T]) -> Matrix<T> {
        (**self).jacobian(x)
    }
    fn in_domain(&self, x: &[T]) -> bool {
        (**self).in_domain(x)
    }
    fn left_inverse(&self, xi: &[T]) -> Result<Vec<T>> {
        (**self).left_inverse(xi)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityImmersion {
    dim: usize,
}

impl IdentityImmersion {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl<T: Scalar> Immersion<T> for IdentityImmersion {
    fn state_dim(&self) -> usize {
        self.dim
    }
    fn image_dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[T]) -> Vec<T> {
        x.to_vec()
    }
    fn jacobian(&self, _x: &[T]) -> Matrix<T> {
        Matrix::identity(self.dim)
    }
    fn left_inverse(&self, xi: &[T]) -> Result<Vec<T>> {
        Ok(xi.to_vec())
    }
}

/// The `m − n` completing columns `γ(x)`.
pub trait Complement<T: Scalar> {
    fn image_dim(&self) -> usize;
    fn codim(&self) -> usize;
    /// `m × (m − n)` matrix.
    fn eval(&self, x: &[T]) -> Result<Matrix<T>>;
    /// `∂γ_k/∂x` for each column `k`, each `m × n`.
    fn column_jacobians(&self, x: &[T]) -> Result<Vec<Matrix<T>>>;
}

/// Complement given by closures, for ad-hoc completions.
pub struct FnComplement<G, J> {
    m: usize,
    k: usize,
    gamma: G,
    jacobians: J,
}

impl<G, J> FnComplement<G, J> {
    pub fn new(image_dim: usize, codim: usize, gamma: G, jacobians: J) -> Self {
        Self {
            m: image_dim,
            k: codim,
            gamma,
            jacobians,
        }
    }
}

impl<T, G, J> Complement<T> for FnComplement<G, J>
where
    T: Scalar,
    G: Fn(&[T]) -> Matrix<T>,
    J: Fn(&[T]) -> Vec<Matrix<T>>,
{
    fn image_dim(&self) -> usize {
        self.m
    }
    fn codim(&self) -> usize {
        self.k
    }
    fn eval(&self, x: &[T]) -> Result<Matrix<T>> {
        Ok((self.gamma)(x))
    }
    fn column_jacobians(&self, x: &[T]) -> Result<Vec<Matrix<T>>> {
        Ok((self.jacobians)(x))
    }
}

/// A diffeomorphism onto (part of) `ℝᵐ` from state-plus-auxiliary
/// coordinates `s = (x, w)`.
pub trait CoordinateMap<T: Scalar> {
    fn dim(&self) -> usize;
    fn state_dim(&self) -> usize;
    fn eval(&self, s: &[T]) -> Result<Vec<T>>;
    fn jacobian(&self, s: &[T]) -> Result<Matrix<T>>;

    fn inverse(&self, _xi: &[T]) -> Result<Vec<T>> {
        Err(Error::NoLeftInverse)
    }
}

/// An `n = m` immersion viewed as a coordinate map.
#[derive(Clone, Debug)]
pub struct SquareImmersion<I>(pub I);

impl<T: Scalar, I: Immersion<T>> CoordinateMap<T> for SquareImmersion<I> {
    fn dim(&self) -> usize {
        self.0.image_dim()
    }
    fn state_dim(&self) -> usize {
        self.0.state_dim()
    }
    fn eval(&self, s: &[T]) -> Result<Vec<T>> {
        Ok(self.0.eval(s))
    }
    fn jacobian(&self, s: &[T]) -> Result<Matrix<T>> {
        Ok(self.0.jacobian(s))
    }
    fn inverse(&self, xi: &[T]) -> Result<Vec<T>> {
        self.0.left_inverse(xi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Minors,
    Parallelizable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Completability {
    Solvable(Strategy),
    /// No universal formula; supply a submersion or a region decomposition.
    NotUniversallySolvable {
        hint: &'static str,
    },
}

/// Whether every full-rank `m × n` Jacobian admits a universal completion.
pub fn check_completable(m: usize, n: usize) -> Result<Completability> {
    if n < 1 || n >= m {
        return Err(Error::InvalidDimension(format!(
            "need 1 <= n < m, got m = {m}, n = {n}"
        )));
    }
    Ok(if n == m - 1 {
        Completability::Solvable(Strategy::Minors)
    } else if n == 1 && (m == 4 || m == 8) {
        Completability::Solvable(Strategy::Parallelizable)
    } else {
        Completability::NotUniversallySolvable {
            hint: "complete from a submersion or with the region-wise block construction",
        }
    })
}

/// Checks numerical rank `n` of `jac(x)` at each sample: the smallest
/// singular value must exceed `1e-9` times the largest.
pub fn check_rank<T: Scalar, I: Immersion<T> + ?Sized>(
    immersion: &I,
    samples: &[Vec<T>],
) -> Result<()> {
    for x in samples {
        let j = immersion.jacobian(x);
        let ev = symmetric_eigenvalues(&(&j.transpose() * &j));
        let (lo, hi) = (ev[0].max(T::zero()).sqrt(), ev[ev.len() - 1].sqrt());
        if !(lo > cast::<T>(1e-9) * hi) {
            return Err(Error::RankDeficient);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completability_table() {
        assert_eq!(
            check_completable(4, 3).unwrap(),
            Completability::Solvable(Strategy::Minors)
        );
        assert_eq!(
            check_completable(4, 1).unwrap(),
            Completability::Solvable(Strategy::Parallelizable)
        );
        assert_eq!(
            check_completable(8, 1).unwrap(),
            Completability::Solvable(Strategy::Parallelizable)
        );
        assert!(matches!(
            check_completable(7, 2).unwrap(),
            Completability::NotUniversallySolvable { .. }
        ));
        assert!(matches!(
            check_completable(8, 3).unwrap(),
            Completability::NotUniversallySolvable { .. }
        ));
        assert!(check_completable(3, 3).is_err());
        assert!(check_completable(3, 0).is_err());
    }

    #[test]
    fn rank_check_flags_degenerate_jacobian() {
        struct Fold;
        impl Immersion<f64> for Fold {
            fn state_dim(&self) -> usize {
                1
            }
            fn image_dim(&self) -> usize {
                2
            }
            fn eval(&self, x: &[f64]) -> Vec<f64> {
                vec![x[0] * x[0], x[0].powi(3)]
            }
            fn jacobian(&self, x: &[f64]) -> Matrix<f64> {
                Matrix::from_rows(&[[2.0 * x[0]], [3.0 * x[0] * x[0]]])
            }
        }
        assert!(check_rank(&Fold, &[vec![1.0]]).is_ok());
        assert!(check_rank(&Fold, &[vec![0.0]]).is_err());
    }
}
