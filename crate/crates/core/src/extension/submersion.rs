use super::ConditionC;
use crate::completion::Submersion;
use crate::numkit::vector::norm_sq;
use crate::numkit::{determinant, solve_linear};
use crate::{Error, Result, Scalar};

/// `E = {|F| < δ}` described as `κ = |F|² − δ²` with the Newton-like field
/// `χ = −dFᵀ(dF dFᵀ)⁻¹F`.
#[derive(Clone, Debug)]
pub struct SubmersionSublevel<S, T> {
    submersion: S,
    delta: T,
}

impl<T: Scalar, S: Submersion<T>> SubmersionSublevel<S, T> {
    pub fn submersion(&self) -> &S {
        &self.submersion
    }

    pub fn delta(&self) -> T {
        self.delta
    }
}

impl<T: Scalar, S: Submersion<T>> ConditionC<T> for SubmersionSublevel<S, T> {
    fn dim(&self) -> usize {
        self.submersion.image_dim()
    }

    fn kappa(&self, z: &[T]) -> T {
        norm_sq(&self.submersion.eval(z)) - self.delta * self.delta
    }

    fn chi(&self, z: &[T]) -> Result<Vec<T>> {
        let f = self.submersion.eval(z);
        if f.iter().all(|v| *v == T::zero()) {
            return Ok(vec![T::zero(); z.len()]);
        }
        let df = self.submersion.jacobian(z);
        let gram = &df * &df.transpose();
        let lam = solve_linear(&gram, &f)
            .map_err(|_| Error::RankDeficientBand)?
            .x;
        Ok(df
            .transpose()
            .mul_vec(&lam)
            .into_iter()
            .map(|v| -v)
            .collect())
    }

    fn kappa_gradient(&self, z: &[T]) -> Vec<T> {
        let f = self.submersion.eval(z);
        let two_f: Vec<T> = f.iter().map(|&v| v + v).collect();
        self.submersion.jacobian(z).transpose().mul_vec(&two_f)
    }
}

/// Condition-C description of a tubular sublevel set of a submersion;
/// `dF` must have full rank at every sample with `|F| ≤ 1`.
pub fn submersion_sublevel<T: Scalar, S: Submersion<T>>(
    submersion: S,
    delta: T,
    band_samples: &[Vec<T>],
) -> Result<SubmersionSublevel<S, T>> {
    if !(delta > T::zero()) {
        return Err(Error::invalid(
            "delta",
            format!("must be positive, got {delta}"),
        ));
    }
    for xi in band_samples {
        if norm_sq(&submersion.eval(xi)) > T::one() {
            continue;
        }
        let df = submersion.jacobian(xi);
        if determinant(&(&df * &df.transpose())).abs() <= T::epsilon() {
            return Err(Error::RankDeficientBand);
        }
    }
    Ok(SubmersionSublevel { submersion, delta })
}
