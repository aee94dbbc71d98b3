use super::{extend_immersion, CertificationBox, Complement, CompletionResult, Immersion};
use crate::numkit::vector::max_abs;
use crate::numkit::{jacobian_fd, symmetric_eigenvalues, Matrix};
use crate::{cast, Error, Result, Scalar};

/// `F: ℝᵐ → ℝᵏ` with differential `dF` (`k × m`).
pub trait Submersion<T: Scalar> {
    fn image_dim(&self) -> usize;
    fn codim(&self) -> usize;
    fn eval(&self, xi: &[T]) -> Vec<T>;
    fn jacobian(&self, xi: &[T]) -> Matrix<T>;

    /// Hessian of each component; central differences of `dF` by default.
    fn hessians(&self, xi: &[T]) -> Vec<Matrix<T>> {
        (0..self.codim())
            .map(|k| {
                jacobian_fd(|p| self.jacobian(p).row(k).to_vec(), xi, None)
                    .expect("finite differential near the sample")
            })
            .collect()
    }
}

impl<T: Scalar, S: Submersion<T> + ?Sized> Submersion<T> for &S {
    fn image_dim(&self) -> usize {
        (**self).image_dim()
    }
    fn codim(&self) -> usize {
        (**self).codim()
    }
    fn eval(&self, xi: &[T]) -> Vec<T> {
        (**self).eval(xi)
    }
    fn jacobian(&self, xi: &[T]) -> Matrix<T> {
        (**self).jacobian(xi)
    }
    fn hessians(&self, xi: &[T]) -> Vec<Matrix<T>> {
        (**self).hessians(xi)
    }
}

/// Scalar quadratic form `F(ξ) = ½ ξᵀMξ` with symmetric `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm<T> {
    m: Matrix<T>,
}

impl<T: Scalar> QuadraticForm<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidDimension(
                "quadratic form needs a square matrix".into(),
            ));
        }
        if m.sub(&m.transpose()).max_abs() > T::zero() {
            return Err(Error::invalid("M", "matrix must be symmetric"));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn value(&self, xi: &[T]) -> T {
        let mx = self.m.mul_vec(xi);
        xi.iter()
            .zip(&mx)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            * cast(0.5)
    }
}

impl<T: Scalar> Submersion<T> for QuadraticForm<T> {
    fn image_dim(&self) -> usize {
        self.m.rows()
    }
    fn codim(&self) -> usize {
        1
    }
    fn eval(&self, xi: &[T]) -> Vec<T> {
        vec![self.value(xi)]
    }
    fn jacobian(&self, xi: &[T]) -> Matrix<T> {
        Matrix::from_row_slice(1, xi.len(), &self.m.mul_vec(xi))
    }
    fn hessians(&self, _xi: &[T]) -> Vec<Matrix<T>> {
        vec![self.m.clone()]
    }
}

/// `γ(x) = dF(φ(x))ᵀ`.
#[derive(Clone, Debug)]
pub struct SubmersionComplement<I, F> {
    pub immersion: I,
    pub submersion: F,
}

impl<T: Scalar, I: Immersion<T>, F: Submersion<T>> Complement<T> for SubmersionComplement<I, F> {
    fn image_dim(&self) -> usize {
        self.submersion.image_dim()
    }
    fn codim(&self) -> usize {
        self.submersion.codim()
    }
    fn eval(&self, x: &[T]) -> Result<Matrix<T>> {
        Ok(self
            .submersion
            .jacobian(&self.immersion.eval(x))
            .transpose())
    }
    fn column_jacobians(&self, x: &[T]) -> Result<Vec<Matrix<T>>> {
        let xi = self.immersion.eval(x);
        let j = self.immersion.jacobian(x);
        Ok(self
            .submersion
            .hessians(&xi)
            .iter()
            .map(|h| h * &j)
            .collect())
    }
}

/// Completion by the transposed differential of a submersion vanishing on
/// the image. Checks level-set membership (`1e-10`) and the rank of `dF`
/// along the image at every sample, then certifies as
/// [`extend_immersion`](super::extend_immersion) does.
pub fn complete_from_submersion<T, I, F>(
    immersion: I,
    submersion: F,
    cert: &CertificationBox<T>,
) -> Result<CompletionResult<I, SubmersionComplement<I, F>, T>>
where
    T: Scalar,
    I: Immersion<T> + Clone,
    F: Submersion<T>,
{
    for x in &cert.samples {
        let xi = immersion.eval(x);
        let residual = max_abs(&submersion.eval(&xi));
        if !(residual <= cast(1e-10)) {
            return Err(Error::NotALevelSet {
                residual: residual.to_f64().unwrap_or(f64::NAN),
            });
        }
        let df = submersion.jacobian(&xi);
        let ev = symmetric_eigenvalues(&(&df * &df.transpose()));
        if !(ev[0] > cast::<T>(1e-18) * ev[ev.len() - 1]) || ev[0] <= T::zero() {
            return Err(Error::NotASubmersionHere);
        }
    }
    let complement = SubmersionComplement {
        immersion: immersion.clone(),
        submersion,
    };
    extend_immersion(immersion, complement, cert)
}
