use crate::{cast, Error, Result, Scalar};

/// Locates a sign change of `g` in `[lo, hi]` to an interval of width `tol`.
pub fn bisect_event<T: Scalar, G>(mut g: G, lo: T, hi: T, tol: T) -> Result<T>
where
    G: FnMut(T) -> T,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut ga = g(a);
    let gb = g(b);
    if ga == T::zero() {
        return Ok(a);
    }
    if gb == T::zero() {
        return Ok(b);
    }
    if !(ga * gb < T::zero()) {
        return Err(Error::NoSignChange {
            lo: a.to_f64().unwrap_or(f64::NAN),
            hi: b.to_f64().unwrap_or(f64::NAN),
        });
    }
    let half: T = cast(0.5);
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        let mid = a + (b - a) * half;
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm == T::zero() {
            return Ok(mid);
        }
        if (gm < T::zero()) == (ga < T::zero()) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok(a + (b - a) * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        assert!((bisect_event(|t: f64| t - 1.0, 0.0, 2.0, 1e-12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_root() {
        let t = bisect_event(|t: f64| (-2.0 * t).exp() * 5.0 - 1.0, 0.0, 3.0, 1e-12).unwrap();
        assert!((t - 5f64.ln() / 2.0).abs() < 1e-11);
    }

    #[test]
    fn cosine_root() {
        let t = bisect_event(f64::cos, 1.0, 2.0, 1e-12).unwrap();
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn missing_sign_change() {
        assert!(matches!(
            bisect_event(|t: f64| t * t + 1.0, -1.0, 1.0, 1e-9),
            Err(Error::NoSignChange { .. })
        ));
    }
}
