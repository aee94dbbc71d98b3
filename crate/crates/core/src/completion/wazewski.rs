use super::Complement;
use crate::numkit::{try_jacobian_fd, Lu, Matrix};
use crate::{Error, Result, Scalar};

/// `C = −(Aᵀ)⁻¹BᵀD`, so that `(A; B)ᵀ(C; D) = 0`.
pub fn block_orthogonal_complete<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    d: &Matrix<T>,
) -> Result<Matrix<T>> {
    let n = a.rows();
    if !a.is_square() || b.cols() != n || !d.is_square() || d.rows() != b.rows() {
        return Err(Error::InvalidDimension(format!(
            "blocks A {:?}, B {:?}, D {:?} do not fit",
            a.shape(),
            b.shape(),
            d.shape()
        )));
    }
    let lu_a = Lu::new(&a.transpose()).map_err(|_| Error::SingularBlock)?;
    if d.rows() > 0 {
        Lu::new(d).map_err(|_| Error::SingularBlock)?;
    }
    let btd = &b.transpose() * d;
    let mut c = Matrix::zeros(n, d.cols());
    for j in 0..d.cols() {
        let col: Vec<T> = lu_a.solve(&btd.column(j)).into_iter().map(|v| -v).collect();
        c.set_column(j, &col);
    }
    Ok(c)
}

/// How `D` is chosen inside a region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Propagation<T> {
    /// `D = I`.
    Seed,
    /// `D(x)` copied from the earlier regions at the point obtained by
    /// clamping coordinate `axis` to `boundary`.
    Along { axis: usize, boundary: T },
}

/// Closed axis-aligned box with the rows of the invertible minor.
#[derive(Clone, Debug, PartialEq)]
pub struct Region<T> {
    pub bounds: Vec<(T, T)>,
    pub minor_rows: Vec<usize>,
    pub propagation: Propagation<T>,
}

impl<T: Scalar> Region<T> {
    pub fn contains(&self, x: &[T]) -> bool {
        self.bounds
            .iter()
            .zip(x)
            .all(|(&(lo, hi), &v)| lo <= v && v <= hi)
    }
}

/// Region-wise block completion of an `m × n` field of full rank `n`.
pub struct Wazewski<T, F> {
    field: F,
    regions: Vec<Region<T>>,
    m: usize,
    n: usize,
}

impl<T: Scalar, F: Fn(&[T]) -> Matrix<T>> Wazewski<T, F> {
    pub fn new(m: usize, n: usize, field: F, regions: Vec<Region<T>>) -> Result<Self> {
        if n == 0 || n >= m {
            return Err(Error::InvalidDimension(format!(
                "need 1 <= n < m, got m = {m}, n = {n}"
            )));
        }
        for r in &regions {
            if r.bounds.len() != n
                || r.minor_rows.len() != n
                || r.minor_rows.iter().any(|&i| i >= m)
            {
                return Err(Error::InvalidDimension(
                    "region does not match the field shape".into(),
                ));
            }
        }
        if regions.first().map(|r| r.propagation) != Some(Propagation::Seed) {
            return Err(Error::invalid(
                "regions",
                "the first region must be the seed",
            ));
        }
        Ok(Self {
            field,
            regions,
            m,
            n,
        })
    }

    pub fn regions(&self) -> &[Region<T>] {
        &self.regions
    }

    fn region_before(&self, x: &[T], limit: usize) -> Result<usize> {
        self.regions[..limit]
            .iter()
            .position(|r| r.contains(x))
            .ok_or(Error::RegionNotFound)
    }

    pub fn region_of(&self, x: &[T]) -> Result<usize> {
        self.region_before(x, self.regions.len())
    }

    /// `γ(x)` using the rule of region `idx`, whether or not `x` lies in it.
    pub fn gamma_in_region(&self, idx: usize, x: &[T]) -> Result<Matrix<T>> {
        let region = &self.regions[idx];
        let phi = (self.field)(x);
        let rest: Vec<usize> = (0..self.m)
            .filter(|i| !region.minor_rows.contains(i))
            .collect();
        let d = match region.propagation {
            Propagation::Seed => Matrix::identity(self.m - self.n),
            Propagation::Along { axis, boundary } => {
                let mut p = x.to_vec();
                p[axis] = boundary;
                let src = self.region_before(&p, idx)?;
                self.gamma_in_region(src, &p)?.select_rows(&rest)
            }
        };
        let a = phi.select_rows(&region.minor_rows);
        let b = phi.select_rows(&rest);
        let c = block_orthogonal_complete(&a, &b, &d).map_err(|e| match e {
            Error::SingularBlock if Lu::new(&a).is_err() => Error::SingularMinor,
            other => other,
        })?;
        let mut gamma = Matrix::zeros(self.m, self.m - self.n);
        for (k, &row) in region.minor_rows.iter().enumerate() {
            for j in 0..gamma.cols() {
                gamma[(row, j)] = c[(k, j)];
            }
        }
        for (k, &row) in rest.iter().enumerate() {
            for j in 0..gamma.cols() {
                gamma[(row, j)] = d[(k, j)];
            }
        }
        Ok(gamma)
    }

    pub fn gamma(&self, x: &[T]) -> Result<Matrix<T>> {
        self.gamma_in_region(self.region_of(x)?, x)
    }
}

impl<T: Scalar, F: Fn(&[T]) -> Matrix<T>> Complement<T> for Wazewski<T, F> {
    fn image_dim(&self) -> usize {
        self.m
    }
    fn codim(&self) -> usize {
        self.m - self.n
    }
    fn eval(&self, x: &[T]) -> Result<Matrix<T>> {
        self.gamma(x)
    }
    fn column_jacobians(&self, x: &[T]) -> Result<Vec<Matrix<T>>> {
        (0..self.codim())
            .map(|k| try_jacobian_fd(|p| Ok(self.gamma(p)?.column(k)), x, None))
            .collect()
    }
}

/// One-shot evaluation of the region-wise completion at `x`.
pub fn wazewski_complete<T, F>(
    m: usize,
    n: usize,
    field: F,
    regions: Vec<Region<T>>,
    x: &[T],
) -> Result<Matrix<T>>
where
    T: Scalar,
    F: Fn(&[T]) -> Matrix<T>,
{
    Wazewski::new(m, n, field, regions)?.gamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_formula_example() {
        let a = Matrix::identity(3);
        let b = Matrix::from_rows(&[[-2.0, 0.0, 0.0], [0.0, -2.0, 0.0]]);
        let c = block_orthogonal_complete(&a, &b, &Matrix::identity(2)).unwrap();
        assert_eq!(c, Matrix::from_rows(&[[2.0, 0.0], [0.0, 2.0], [0.0, 0.0]]));
    }

    #[test]
    fn zero_coupling_gives_zero_block() {
        let c = block_orthogonal_complete(
            &Matrix::<f64>::identity(2),
            &Matrix::zeros(1, 2),
            &Matrix::identity(1),
        )
        .unwrap();
        assert_eq!(c, Matrix::zeros(2, 1));
    }

    #[test]
    fn singular_block_rejected() {
        let r = block_orthogonal_complete(
            &Matrix::<f64>::zeros(2, 2),
            &Matrix::zeros(1, 2),
            &Matrix::identity(1),
        );
        assert_eq!(r, Err(Error::SingularBlock));
    }

    #[test]
    fn two_region_line() {
        // φ(x) = (1, x)ᵀ; seed region x ≤ 1 pivots on row 0, the rest on row 1.
        let inf = f64::INFINITY;
        let regions = vec![
            Region {
                bounds: vec![(-inf, 1.0)],
                minor_rows: vec![0],
                propagation: Propagation::Seed,
            },
            Region {
                bounds: vec![(1.0, inf)],
                minor_rows: vec![1],
                propagation: Propagation::Along {
                    axis: 0,
                    boundary: 1.0,
                },
            },
        ];
        let w = Wazewski::new(
            2,
            1,
            |x: &[f64]| Matrix::from_rows(&[[1.0], [x[0]]]),
            regions,
        )
        .unwrap();
        assert_eq!(w.gamma(&[-3.0]).unwrap().column(0), vec![3.0, 1.0]);
        // D = −1 copied from the seed at x = 1, C = −(1/x)·1·D.
        assert_eq!(w.gamma(&[2.0]).unwrap().column(0), vec![-1.0, 0.5]);
        assert_eq!(
            w.gamma_in_region(1, &[1.0]).unwrap(),
            w.gamma_in_region(0, &[1.0]).unwrap()
        );
        assert!(matches!(
            w.gamma_in_region(1, &[0.0]),
            Err(Error::SingularMinor)
        ));
    }
}
