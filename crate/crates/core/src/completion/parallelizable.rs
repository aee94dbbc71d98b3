use crate::numkit::vector::norm;
use crate::numkit::Matrix;
use crate::{Error, Result, Scalar};

/// Orthogonal-up-to-scale 4×4 matrix with first column `z`.
pub fn complete_parallelizable_4<T: Scalar>(z: &[T]) -> Result<Matrix<T>> {
    if z.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: z.len(),
        });
    }
    if norm(z) == T::zero() {
        return Err(Error::ZeroVector);
    }
    let [z1, z2, z3, z4] = [z[0], z[1], z[2], z[3]];
    Ok(Matrix::from_rows(&[
        [z1, -z2, z3, z4],
        [z2, z1, -z4, z3],
        [z3, -z4, -z1, -z2],
        [z4, z3, z2, -z1],
    ]))
}

fn quat_mul<T: Scalar>(a: [T; 4], b: [T; 4]) -> [T; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn quat_conj<T: Scalar>(a: [T; 4]) -> [T; 4] {
    [a[0], -a[1], -a[2], -a[3]]
}

fn quat_add<T: Scalar>(a: [T; 4], b: [T; 4], sign: T) -> [T; 4] {
    [
        a[0] + sign * b[0],
        a[1] + sign * b[1],
        a[2] + sign * b[2],
        a[3] + sign * b[3],
    ]
}

/// Octonion product through the Cayley–Dickson doubling of quaternions:
/// `(a, b)(c, d) = (ac − d̄b, da + bc̄)`.
pub fn octonion_product<T: Scalar>(p: &[T], q: &[T]) -> Vec<T> {
    assert!(p.len() == 8 && q.len() == 8, "octonions have 8 components");
    let half = |v: &[T], o: usize| [v[o], v[o + 1], v[o + 2], v[o + 3]];
    let (a, b, c, d) = (half(p, 0), half(p, 4), half(q, 0), half(q, 4));
    let lo = quat_add(quat_mul(a, c), quat_mul(quat_conj(d), b), -T::one());
    let hi = quat_add(quat_mul(d, a), quat_mul(b, quat_conj(c)), T::one());
    lo.into_iter().chain(hi).collect()
}

/// Left multiplication by the octonion `z`; first column `z`, columns
/// pairwise orthogonal with norm `|z|`.
pub fn complete_parallelizable_8<T: Scalar>(z: &[T]) -> Result<Matrix<T>> {
    if z.len() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: z.len(),
        });
    }
    if norm(z) == T::zero() {
        return Err(Error::ZeroVector);
    }
    let mut m = Matrix::zeros(8, 8);
    let mut e = vec![T::zero(); 8];
    for j in 0..8 {
        e[j] = T::one();
        m.set_column(j, &octonion_product(z, &e));
        e[j] = T::zero();
    }
    Ok(m)
}
