use super::Matrix;
use crate::{cast, Error, Result, Scalar};

/// Per-coordinate default step `1e-5·max(1, |x_j|)`.
pub fn default_fd_step<T: Scalar>(xj: T) -> T {
    cast::<T>(1e-5) * T::one().max(xj.abs())
}

/// Central-difference Jacobian of `map` at `x`. With `h = None` each
/// coordinate uses [`default_fd_step`].
pub fn jacobian_fd<T: Scalar, F>(mut map: F, x: &[T], h: Option<T>) -> Result<Matrix<T>>
where
    F: FnMut(&[T]) -> Vec<T>,
{
    try_jacobian_fd(|p| Ok(map(p)), x, h)
}

/// [`jacobian_fd`] for fallible maps.
pub fn try_jacobian_fd<T: Scalar, F>(mut map: F, x: &[T], h: Option<T>) -> Result<Matrix<T>>
where
    F: FnMut(&[T]) -> Result<Vec<T>>,
{
    let n = x.len();
    let mut p = x.to_vec();
    let mut columns = Vec::with_capacity(n);
    let mut m = None;
    for j in 0..n {
        let hj = h.unwrap_or_else(|| default_fd_step(x[j]));
        p[j] = x[j] + hj;
        let plus = map(&p)?;
        p[j] = x[j] - hj;
        let minus = map(&p)?;
        p[j] = x[j];
        if plus.len() != minus.len() || m.is_some_and(|m| m != plus.len()) {
            return Err(Error::DimensionMismatch {
                expected: m.unwrap_or(plus.len()),
                found: minus.len(),
            });
        }
        m = Some(plus.len());
        let two_h = hj + hj;
        let col: Vec<T> = plus
            .iter()
            .zip(&minus)
            .map(|(&a, &b)| (a - b) / two_h)
            .collect();
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        columns.push(col);
    }
    let rows = m.unwrap_or(0);
    Ok(Matrix::from_fn(rows, n, |i, j| columns[j][i]))
}
