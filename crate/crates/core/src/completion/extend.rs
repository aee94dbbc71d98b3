use super::{Complement, CoordinateMap, Immersion};
use crate::numkit::vector::norm;
use crate::numkit::{determinant, Matrix};
use crate::{cast, Error, Result, Scalar};

/// Sampling used to certify a completion: state samples and a cube
/// `[-w_max, w_max]^(m−n)` scanned with `points_per_axis` nodes per axis.
#[derive(Clone, Debug)]
pub struct CertificationBox<T> {
    pub samples: Vec<Vec<T>>,
    pub w_max: T,
    pub points_per_axis: usize,
}

impl<T: Scalar> CertificationBox<T> {
    pub fn new(samples: Vec<Vec<T>>, w_max: T) -> Self {
        Self {
            samples,
            w_max,
            points_per_axis: 9,
        }
    }

    fn w_points(&self, k: usize) -> Vec<Vec<T>> {
        let p = self.points_per_axis.max(2);
        let axis: Vec<T> = (0..p)
            .map(|i| -self.w_max + self.w_max * cast::<T>(2.0 * i as f64 / (p - 1) as f64))
            .collect();
        let mut out = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&a| {
                        let mut v = prefix.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

/// `φₑ(x, w) = φ(x) + γ(x)w` with its Jacobian and a certified `w` radius.
#[derive(Clone, Debug)]
pub struct CompletionResult<I, G, T> {
    pub immersion: I,
    pub complement: G,
    /// Radius in `w` within which `det jac_e` keeps the sign it has at `w = 0`.
    pub w_radius: T,
}

impl<T: Scalar, I: Immersion<T>, G: Complement<T>> CompletionResult<I, G, T> {
    /// Wraps without certification; `w_radius` is taken as given.
    pub fn assume(immersion: I, complement: G, w_radius: T) -> Self {
        Self {
            immersion,
            complement,
            w_radius,
        }
    }

    pub fn n(&self) -> usize {
        self.immersion.state_dim()
    }

    pub fn m(&self) -> usize {
        self.immersion.image_dim()
    }

    pub fn gamma(&self, x: &[T]) -> Result<Matrix<T>> {
        self.complement.eval(x)
    }

    pub fn phie(&self, x: &[T], w: &[T]) -> Result<Vec<T>> {
        let mut xi = self.immersion.eval(x);
        let g = self.complement.eval(x)?;
        for (i, v) in g.mul_vec(w).into_iter().enumerate() {
            xi[i] = xi[i] + v;
        }
        Ok(xi)
    }

    /// `(Jφ(x) + Σₖ wₖ ∂γₖ/∂x | γ(x))`.
    pub fn jac_e(&self, x: &[T], w: &[T]) -> Result<Matrix<T>> {
        let mut jx = self.immersion.jacobian(x);
        for (wk, dk) in w.iter().zip(self.complement.column_jacobians(x)?) {
            jx = jx.add(&dk.scaled(*wk));
        }
        Ok(jx.hstack(&self.complement.eval(x)?))
    }

    fn split<'a>(&self, s: &'a [T]) -> Result<(&'a [T], &'a [T])> {
        if s.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: s.len(),
            });
        }
        Ok(s.split_at(self.n()))
    }
}

impl<T: Scalar, I: Immersion<T>, G: Complement<T>> CoordinateMap<T> for CompletionResult<I, G, T> {
    fn dim(&self) -> usize {
        self.m()
    }
    fn state_dim(&self) -> usize {
        self.n()
    }
    fn eval(&self, s: &[T]) -> Result<Vec<T>> {
        let (x, w) = self.split(s)?;
        self.phie(x, w)
    }
    fn jacobian(&self, s: &[T]) -> Result<Matrix<T>> {
        let (x, w) = self.split(s)?;
        self.jac_e(x, w)
    }
}

/// Assembles `φₑ` and certifies it on `cert`: `det(Jφ | γ)` must be nonzero
/// at every sample, and `w_radius` is `0.9` times the smallest `|w|` on the
/// grid where the determinant changes sign or drops below `1e-9` of its
/// `w = 0` value (or `w_max` when no grid point fails).
pub fn extend_immersion<T, I, G>(
    immersion: I,
    complement: G,
    cert: &CertificationBox<T>,
) -> Result<CompletionResult<I, G, T>>
where
    T: Scalar,
    I: Immersion<T>,
    G: Complement<T>,
{
    let (m, n) = (immersion.image_dim(), immersion.state_dim());
    if complement.image_dim() != m || complement.codim() + n != m {
        return Err(Error::InvalidDimension(format!(
            "complement of shape {}x{} does not complete an immersion into R^{m} from R^{n}",
            complement.image_dim(),
            complement.codim()
        )));
    }
    let result = CompletionResult {
        immersion,
        complement,
        w_radius: cert.w_max,
    };
    let zero_w = vec![T::zero(); m - n];
    let w_points = cert.w_points(m - n);
    let mut first_failure = T::infinity();
    let tiny: T = cast(1e-9);
    for x in &cert.samples {
        let d0 = determinant(&result.jac_e(x, &zero_w)?);
        if !(d0.abs() > T::zero()) || !d0.is_finite() {
            return Err(Error::DegenerateCompletion {
                det: d0.to_f64().unwrap_or(f64::NAN),
            });
        }
        for w in &w_points {
            let r = norm(w);
            if r >= first_failure {
                continue;
            }
            let d = determinant(&result.jac_e(x, w)?);
            if !(d * d0 > T::zero()) || d.abs() < tiny * d0.abs() {
                first_failure = r;
            }
        }
    }
    let w_radius = if first_failure.is_finite() {
        cast::<T>(0.9) * first_failure
    } else {
        cert.w_max
    };
    Ok(CompletionResult { w_radius, ..result })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::FnComplement;

    struct Parabola;

    impl Immersion<f64> for Parabola {
        fn state_dim(&self) -> usize {
            1
        }
        fn image_dim(&self) -> usize {
            2
        }
        fn eval(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0], x[0] * x[0]]
        }
        fn jacobian(&self, x: &[f64]) -> Matrix<f64> {
            Matrix::from_rows(&[[1.0], [2.0 * x[0]]])
        }
    }

    #[test]
    fn base_map_is_preserved_and_radius_certified() {
        // Normal field (−2x, 1): det = 1 + 4x² − 2w, which vanishes at w = (1 + 4x²)/2.
        let g = FnComplement::new(
            2,
            1,
            |x: &[f64]| Matrix::from_rows(&[[-2.0 * x[0]], [1.0]]),
            |_: &[f64]| vec![Matrix::from_rows(&[[-2.0], [0.0]])],
        );
        let cert = CertificationBox {
            samples: vec![vec![0.0], vec![1.0]],
            w_max: 2.0,
            points_per_axis: 41,
        };
        let c = extend_immersion(Parabola, g, &cert).unwrap();
        assert_eq!(c.phie(&[0.7], &[0.0]).unwrap(), Parabola.eval(&[0.7]));
        assert!(c.w_radius < 0.5 && c.w_radius > 0.4);
    }

    #[test]
    fn degenerate_complement_rejected() {
        let g = FnComplement::new(
            2,
            1,
            |_: &[f64]| Matrix::from_rows(&[[1.0], [0.0]]),
            |_: &[f64]| vec![Matrix::zeros(2, 1)],
        );
        let cert = CertificationBox::new(vec![vec![0.0]], 1.0);
        assert!(matches!(
            extend_immersion(Parabola, g, &cert),
            Err(Error::DegenerateCompletion { .. })
        ));
    }
}
