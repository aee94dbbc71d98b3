use super::{ConditionC, ImageExtension, NuParams};
use crate::completion::QuadraticForm;
use crate::numkit::vector::scale;
use crate::numkit::Matrix;
use crate::{cast, Error, Result, Scalar};

/// `E = {ξ : (½ξᵀMξ)² < δ}` with the radial field `χ(ξ) = −ξ`, for which
/// the flow time to the boundary is `¼ ln((½ξᵀMξ)²/δ)`.
#[derive(Clone, Debug)]
pub struct QuadraticSublevel<T> {
    form: QuadraticForm<T>,
    delta: T,
    params: NuParams<T>,
}

impl<T: Scalar> QuadraticSublevel<T> {
    pub fn new(m: Matrix<T>, delta: T, params: NuParams<T>) -> Result<Self> {
        if !(delta > T::zero()) {
            return Err(Error::invalid(
                "delta",
                format!("must be positive, got {delta}"),
            ));
        }
        Ok(Self {
            form: QuadraticForm::new(m)?,
            delta,
            params,
        })
    }

    pub fn params(&self) -> &NuParams<T> {
        &self.params
    }

    pub fn form(&self) -> &QuadraticForm<T> {
        &self.form
    }

    /// Flow time `t_ξ`; `-∞` on the zero set of the form.
    pub fn flow_time(&self, xi: &[T]) -> T {
        let f = self.form.value(xi);
        (f * f / self.delta).ln() * cast(0.25)
    }
}

impl<T: Scalar> ConditionC<T> for QuadraticSublevel<T> {
    fn dim(&self) -> usize {
        self.form.matrix().rows()
    }
    fn kappa(&self, z: &[T]) -> T {
        let f = self.form.value(z);
        f * f - self.delta
    }
    fn chi(&self, z: &[T]) -> Result<Vec<T>> {
        Ok(scale(z, -T::one()))
    }
    fn kappa_gradient(&self, z: &[T]) -> Vec<T> {
        let f = self.form.value(z);
        scale(&self.form.matrix().mul_vec(z), f + f)
    }
}

impl<T: Scalar> ImageExtension<T> for QuadraticSublevel<T> {
    fn dim(&self) -> usize {
        self.form.matrix().rows()
    }

    fn apply(&self, z: &[T]) -> Result<Vec<T>> {
        let t = self.flow_time(z);
        if t <= -self.params.epsilon() {
            return Ok(z.to_vec());
        }
        Ok(scale(z, (-t - self.params.nu(t)).exp()))
    }

    fn inverse(&self, y: &[T]) -> Result<Vec<T>> {
        let t = self.flow_time(y);
        if !(t < T::zero()) {
            return Err(Error::NotInImage);
        }
        if t <= -self.params.epsilon() {
            return Ok(y.to_vec());
        }
        let tau = t - self.params.nu_inverse(-t)?;
        Ok(scale(y, (-tau).exp()))
    }

    fn contains(&self, y: &[T]) -> bool {
        self.kappa(y) < T::zero()
    }
}

/// Closed-form extension onto a quadratic sublevel set.
pub fn quadratic_sublevel_extension<T: Scalar>(
    m: &Matrix<T>,
    delta: T,
    params: &NuParams<T>,
    xi: &[T],
) -> Result<Vec<T>> {
    QuadraticSublevel::new(m.clone(), delta, *params)?.apply(xi)
}
