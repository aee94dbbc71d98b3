use super::{Complement, Immersion};
use crate::numkit::{determinant, try_jacobian_fd, Matrix};
use crate::{Error, Result, Scalar};

/// Signed maximal minors of an `(n+1) × n` matrix, with the sign chosen so
/// that `det(J | γ) = Σ minor²`.
pub fn complete_minors<T: Scalar>(j: &Matrix<T>) -> Result<Vec<T>> {
    let (m, n) = j.shape();
    if m != n + 1 {
        return Err(Error::InvalidDimension(format!(
            "expected (n+1) x n, got {m} x {n}"
        )));
    }
    let gamma: Vec<T> = (0..m)
        .map(|k| {
            let minor = if n == 0 {
                T::one()
            } else {
                determinant(&j.remove_row(k))
            };
            // cofactor of entry (k, n) in the bordered matrix is (−1)^{k+n}·minor
            if (k + n) % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect();
    let scale = j.max_abs().powi(n as i32).max(T::min_positive_value());
    if gamma.iter().all(|g| g.abs() <= T::epsilon() * scale) {
        return Err(Error::RankDeficient);
    }
    Ok(gamma)
}

/// Minors completion of an immersion with `m = n + 1`; column Jacobian by
/// central differences.
#[derive(Clone, Debug)]
pub struct MinorsComplement<I>(pub I);

impl<T: Scalar, I: Immersion<T>> Complement<T> for MinorsComplement<I> {
    fn image_dim(&self) -> usize {
        self.0.image_dim()
    }
    fn codim(&self) -> usize {
        1
    }
    fn eval(&self, x: &[T]) -> Result<Matrix<T>> {
        Ok(Matrix::column_vector(&complete_minors(
            &self.0.jacobian(x),
        )?))
    }
    fn column_jacobians(&self, x: &[T]) -> Result<Vec<Matrix<T>>> {
        Ok(vec![try_jacobian_fd(
            |p| complete_minors(&self.0.jacobian(p)),
            x,
            None,
        )?])
    }
}
