use super::{ConditionC, ImageExtension, NuParams};
use crate::numkit::Matrix;
use crate::{Error, Result, Scalar};

/// Shape of a set bounded in a single coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HalfspaceForm<T> {
    /// `ξ_axis > bound`, attractor above the bound.
    LowerBound { bound: T, attractor: T },
    /// `ξ_axis < slope·ξ_other`, attractor below the graph.
    GraphBound {
        slope: T,
        other: usize,
        attractor: T,
    },
}

/// One-coordinate extension onto a half-space-like set, with the field
/// `χ(ξ) = (attractor − ξ_axis)·e_axis`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace<T> {
    dim: usize,
    axis: usize,
    form: HalfspaceForm<T>,
    params: NuParams<T>,
}

struct Frame<T> {
    bound: T,
    attractor: T,
}

impl<T: Scalar> Halfspace<T> {
    pub fn new(
        dim: usize,
        axis: usize,
        form: HalfspaceForm<T>,
        params: NuParams<T>,
    ) -> Result<Self> {
        if axis >= dim {
            return Err(Error::InvalidDimension(format!(
                "axis {axis} out of range for dimension {dim}"
            )));
        }
        match form {
            HalfspaceForm::LowerBound { bound, attractor } if !(attractor > bound) => Err(
                Error::invalid("attractor", "must lie strictly above the lower bound"),
            ),
            HalfspaceForm::GraphBound { other, .. } if other >= dim || other == axis => Err(
                Error::InvalidDimension(format!("graph coordinate {other} invalid")),
            ),
            _ => Ok(Self {
                dim,
                axis,
                form,
                params,
            }),
        }
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn params(&self) -> &NuParams<T> {
        &self.params
    }

    fn frame(&self, v: &[T]) -> Result<Frame<T>> {
        let (bound, attractor) = match self.form {
            HalfspaceForm::LowerBound { bound, attractor } => (bound, attractor),
            HalfspaceForm::GraphBound {
                slope,
                other,
                attractor,
            } => {
                let bound = slope * v[other];
                if !(attractor < bound) {
                    return Err(Error::invalid(
                        "attractor",
                        "not strictly inside the set at this point",
                    ));
                }
                (bound, attractor)
            }
        };
        Ok(Frame { bound, attractor })
    }

    /// `∂bound/∂ξ_other` for the graph form.
    fn bound_slope(&self) -> Option<(usize, T)> {
        match self.form {
            HalfspaceForm::LowerBound { .. } => None,
            HalfspaceForm::GraphBound { slope, other, .. } => Some((other, slope)),
        }
    }

    fn check_dim(&self, v: &[T]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Ratio `(ξ − a)/(c − a)`: below `e^{−ε}` on the core, `1` on the boundary.
    fn ratio(&self, v: &[T], f: &Frame<T>) -> T {
        (v[self.axis] - f.attractor) / (f.bound - f.attractor)
    }
}

impl<T: Scalar> ConditionC<T> for Halfspace<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn kappa(&self, z: &[T]) -> T {
        match self.form {
            HalfspaceForm::LowerBound { bound, .. } => bound - z[self.axis],
            HalfspaceForm::GraphBound { slope, other, .. } => z[self.axis] - slope * z[other],
        }
    }
    fn chi(&self, z: &[T]) -> Result<Vec<T>> {
        let a = match self.form {
            HalfspaceForm::LowerBound { attractor, .. }
            | HalfspaceForm::GraphBound { attractor, .. } => attractor,
        };
        let mut c = vec![T::zero(); self.dim];
        c[self.axis] = a - z[self.axis];
        Ok(c)
    }
    fn kappa_gradient(&self, _z: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.dim];
        match self.form {
            HalfspaceForm::LowerBound { .. } => g[self.axis] = -T::one(),
            HalfspaceForm::GraphBound { slope, other, .. } => {
                g[self.axis] = T::one();
                g[other] = -slope;
            }
        }
        g
    }
}

impl<T: Scalar> ImageExtension<T> for Halfspace<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, z: &[T]) -> Result<Vec<T>> {
        self.check_dim(z)?;
        let f = self.frame(z)?;
        let r = self.ratio(z, &f);
        let eps = self.params.epsilon();
        if r <= (-eps).exp() {
            return Ok(z.to_vec());
        }
        let mut y = z.to_vec();
        y[self.axis] = f.attractor + (f.bound - f.attractor) * (-self.params.nu(r.ln())).exp();
        Ok(y)
    }

    fn inverse(&self, y: &[T]) -> Result<Vec<T>> {
        self.check_dim(y)?;
        let f = self.frame(y)?;
        let r = self.ratio(y, &f);
        if !(r < T::one()) {
            return Err(Error::NotInImage);
        }
        let eps = self.params.epsilon();
        if r <= (-eps).exp() {
            return Ok(y.to_vec());
        }
        let q = -r.ln();
        let mut z = y.to_vec();
        z[self.axis] = f.attractor + (f.bound - f.attractor) * (eps * eps / q - (eps + eps)).exp();
        Ok(z)
    }

    fn contains(&self, y: &[T]) -> bool {
        self.kappa(y) < T::zero()
    }

    fn apply_jacobian(&self, z: &[T]) -> Result<Matrix<T>> {
        self.check_dim(z)?;
        let f = self.frame(z)?;
        let r = self.ratio(z, &f);
        let mut j = Matrix::identity(self.dim);
        if r <= (-self.params.epsilon()).exp() {
            return Ok(j);
        }
        let t = r.ln();
        let decay = (-self.params.nu(t)).exp();
        let dnu = self.params.nu_derivative(t);
        j[(self.axis, self.axis)] = -decay * dnu / r;
        if let Some((other, slope)) = self.bound_slope() {
            j[(self.axis, other)] = decay * (T::one() + dnu) * slope;
        }
        Ok(j)
    }

    fn inverse_jacobian(&self, y: &[T]) -> Result<Matrix<T>> {
        self.check_dim(y)?;
        let f = self.frame(y)?;
        let r = self.ratio(y, &f);
        if !(r < T::one()) {
            return Err(Error::NotInImage);
        }
        let eps = self.params.epsilon();
        let mut j = Matrix::identity(self.dim);
        if r <= (-eps).exp() {
            return Ok(j);
        }
        let q = -r.ln();
        let growth = (eps * eps / q - (eps + eps)).exp();
        let e2q2 = eps * eps / (q * q);
        j[(self.axis, self.axis)] = growth * e2q2 / r;
        if let Some((other, slope)) = self.bound_slope() {
            j[(self.axis, other)] = growth * (T::one() - e2q2) * slope;
        }
        Ok(j)
    }
}

/// Closed-form half-space extension of a single point.
pub fn halfspace_extension<T: Scalar>(
    dim: usize,
    axis: usize,
    form: HalfspaceForm<T>,
    params: &NuParams<T>,
    xi: &[T],
) -> Result<Vec<T>> {
    Halfspace::new(dim, axis, form, *params)?.apply(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::jacobian_fd;

    fn lower() -> Halfspace<f64> {
        Halfspace::new(
            2,
            0,
            HalfspaceForm::LowerBound {
                bound: 0.005,
                attractor: 1.0,
            },
            NuParams::new(0.2).unwrap(),
        )
        .unwrap()
    }

    fn graph() -> Halfspace<f64> {
        Halfspace::new(
            2,
            1,
            HalfspaceForm::GraphBound {
                slope: 1.0,
                other: 0,
                attractor: -1.0,
            },
            NuParams::new(0.2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn core_membership_matches_closed_set() {
        let g = graph();
        // ξ₂ ≤ e^{−ε}(a₁ξ₁ + 1) − 1 is left alone.
        let xi1 = 0.5;
        let edge = (-0.2f64).exp() * (xi1 + 1.0) - 1.0;
        assert_eq!(
            g.apply(&[xi1, edge - 1e-9]).unwrap(),
            vec![xi1, edge - 1e-9]
        );
        assert_ne!(
            g.apply(&[xi1, edge + 1e-6]).unwrap(),
            vec![xi1, edge + 1e-6]
        );
    }

    #[test]
    fn outputs_land_in_the_set() {
        let (l, g) = (lower(), graph());
        for i in -20..=20 {
            for k in -20..=20 {
                let z = [i as f64 * 0.5, k as f64 * 0.5];
                let y = g.apply(&l.apply(&z).unwrap()).unwrap();
                assert!(y[0] > 0.005 && y[1] < y[0], "{z:?} -> {y:?}");
            }
        }
    }

    #[test]
    fn analytic_jacobians_match_differences() {
        for h in [lower(), graph()] {
            for z in [[0.3, 0.9], [-2.0, 5.0], [0.02, 0.01], [3.0, -4.0]] {
                let z = h.apply(&lower().apply(&z).unwrap()).unwrap_or(z.to_vec());
                if let Ok(ja) = h.apply_jacobian(&z) {
                    let jf = jacobian_fd(|p| h.apply(p).unwrap(), &z, Some(1e-7)).unwrap();
                    assert!(ja.sub(&jf).max_abs() < 1e-5, "{z:?}");
                }
                if h.contains(&z) {
                    let ja = h.inverse_jacobian(&z).unwrap();
                    let jf = jacobian_fd(|p| h.inverse(p).unwrap(), &z, Some(1e-9)).unwrap();
                    assert!(ja.sub(&jf).max_abs() < 1e-4 * (1.0 + ja.max_abs()), "{z:?}");
                }
            }
        }
    }

    #[test]
    fn misplaced_attractor_rejected() {
        let form = HalfspaceForm::LowerBound {
            bound: 1.0,
            attractor: 0.0,
        };
        assert!(Halfspace::new(2, 0, form, NuParams::new(0.1).unwrap()).is_err());
    }
}
