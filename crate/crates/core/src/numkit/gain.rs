use super::{solve_linear, Matrix};
use crate::{Error, Result, Scalar};

fn packed(i: usize, j: usize, n: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

/// Solves `AᵀS + SA − CᵀC = −ℓS` for the chain-of-integrators `A` and
/// `C = (1, 0, …, 0)`, assembling the linear system on the upper triangle.
pub fn gain_equation<T: Scalar>(n: usize, ell: T) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be at least 1"));
    }
    if !(ell > T::zero()) || !ell.is_finite() {
        return Err(Error::invalid(
            "ell",
            format!("must be positive, got {ell}"),
        ));
    }
    let unknowns = n * (n + 1) / 2;
    let mut sys = Matrix::zeros(unknowns, unknowns);
    let mut rhs = vec![T::zero(); unknowns];
    for i in 0..n {
        for j in i..n {
            let row = packed(i, j, n);
            // (AᵀS)_{ij} = S_{i−1,j}, (SA)_{ij} = S_{i,j−1}
            if i > 0 {
                sys[(row, packed(i - 1, j, n))] = sys[(row, packed(i - 1, j, n))] + T::one();
            }
            if j > 0 {
                sys[(row, packed(i, j - 1, n))] = sys[(row, packed(i, j - 1, n))] + T::one();
            }
            sys[(row, row)] = sys[(row, row)] + ell;
            if i == 0 && j == 0 {
                rhs[row] = T::one();
            }
        }
    }
    let sol = solve_linear(&sys, &rhs)?;
    Ok(Matrix::from_fn(n, n, |i, j| sol.x[packed(i, j, n)]))
}

/// Max-entry residual of the gain equation at `s`.
pub fn gain_equation_residual<T: Scalar>(s: &Matrix<T>, ell: T) -> T {
    let n = s.rows();
    let a = Matrix::from_fn(n, n, |i, j| if j == i + 1 { T::one() } else { T::zero() });
    let ctc = Matrix::from_fn(n, n, |i, j| {
        if i == 0 && j == 0 {
            T::one()
        } else {
            T::zero()
        }
    });
    let lhs = (&a.transpose() * s)
        .add(&(s * &a))
        .sub(&ctc)
        .add(&s.scaled(ell));
    lhs.max_abs()
}

/// Innovation gain `S∞⁻¹Cᵀ`.
pub fn highgain_gain<T: Scalar>(n: usize, ell: T) -> Result<Vec<T>> {
    let s = gain_equation(n, ell)?;
    let mut e1 = vec![T::zero(); n];
    e1[0] = T::one();
    Ok(solve_linear(&s, &e1)?.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_closed_form() {
        for ell in [1.0f64, 5.0, 10.0] {
            let k = highgain_gain(2, ell).unwrap();
            assert!((k[0] - 2.0 * ell).abs() < 1e-10 * ell);
            assert!((k[1] - ell * ell).abs() < 1e-10 * ell * ell);
            let s = gain_equation(2, ell).unwrap();
            let expected = Matrix::from_rows(&[
                [1.0 / ell, -1.0 / (ell * ell)],
                [-1.0 / (ell * ell), 2.0 / ell.powi(3)],
            ]);
            assert!(s.sub(&expected).max_abs() < 1e-14);
            assert!(gain_equation_residual(&s, ell) <= 1e-12);
        }
    }

    #[test]
    fn scalar_case() {
        assert!((highgain_gain(1, 3.0f64).unwrap()[0] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn binomial_gains_in_higher_dimension() {
        // S∞⁻¹Cᵀ has entries C(n,k)·ℓᵏ.
        let k = highgain_gain(4, 2.0f64).unwrap();
        let expected = [8.0, 24.0, 32.0, 16.0];
        for (a, b) in k.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9 * b);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(highgain_gain(0, 1.0).is_err());
        assert!(highgain_gain(2, 0.0).is_err());
    }
}
