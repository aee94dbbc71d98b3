use super::{ConditionC, ImageExtension, NuParams};
use crate::numkit::vector::{distance, dot, norm};
use crate::numkit::{bisect_event, rk4_step};
use crate::{cast, Error, Result, Scalar};

/// Step and horizon for integrating `ż = χ(z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowOptions<T> {
    pub dt: T,
    pub horizon: T,
}

impl<T: Scalar> FlowOptions<T> {
    /// `dt = ε/50`, horizon `1e3`.
    pub fn for_layer(params: &NuParams<T>) -> Self {
        Self {
            dt: params.epsilon() / cast(50.0),
            horizon: cast(1e3),
        }
    }
}

/// Signed flow time to `∂E` and the boundary point reached.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryHit<T> {
    pub time: T,
    pub point: Vec<T>,
}

fn step<T: Scalar, C: ConditionC<T> + ?Sized>(cond: &C, z: &[T], h: T) -> Result<Vec<T>> {
    let mut field = |_t: T, x: &[T]| cond.chi(x);
    rk4_step(&mut field, T::zero(), z, h)
}

/// `Z(z, tau)` by RK4 with steps no longer than `dt`.
pub fn flow<T: Scalar, C: ConditionC<T> + ?Sized>(
    cond: &C,
    z: &[T],
    tau: T,
    dt: T,
) -> Result<Vec<T>> {
    if tau == T::zero() {
        return Ok(z.to_vec());
    }
    let n = (tau.abs() / dt).ceil().max(T::one());
    let h = tau / n;
    let n = n.to_usize().unwrap_or(usize::MAX);
    let mut cur = z.to_vec();
    for _ in 0..n {
        cur = step(cond, &cur, h)?;
    }
    Ok(cur)
}

/// Searches along `sign·χ` for a sign change of `κ` within `max_time`.
fn search<T: Scalar, C: ConditionC<T> + ?Sized>(
    cond: &C,
    z: &[T],
    sign: T,
    max_time: T,
    dt: T,
) -> Result<Option<BoundaryHit<T>>> {
    let k0 = cond.kappa(z);
    if k0 == T::zero() {
        return Ok(Some(BoundaryHit {
            time: T::zero(),
            point: z.to_vec(),
        }));
    }
    let mut t = T::zero();
    let mut cur = z.to_vec();
    while t < max_time {
        let h = dt.min(max_time - t);
        let next = step(cond, &cur, sign * h)?;
        let k1 = cond.kappa(&next);
        if k1 == T::zero() || (k1 < T::zero()) != (k0 < T::zero()) {
            let s = if k1 == T::zero() {
                h
            } else {
                bisect_event(
                    |s| step(cond, &cur, sign * s).map_or(T::nan(), |p| cond.kappa(&p)),
                    T::zero(),
                    h,
                    cast(1e-13),
                )?
            };
            let point = step(cond, &cur, sign * s)?;
            return Ok(Some(BoundaryHit {
                time: sign * (t + s),
                point,
            }));
        }
        cur = next;
        t = t + h;
    }
    Ok(None)
}

/// Flow time `t_z` with `κ(Z(z, t_z)) = 0`: forward from outside `E`,
/// backward from inside.
pub fn time_to_boundary<T: Scalar, C: ConditionC<T> + ?Sized>(
    cond: &C,
    z: &[T],
    opts: &FlowOptions<T>,
) -> Result<BoundaryHit<T>> {
    let sign = if cond.kappa(z) >= T::zero() {
        T::one()
    } else {
        -T::one()
    };
    search(cond, z, sign, opts.horizon, opts.dt)?.ok_or(Error::NoBoundaryReached {
        horizon: opts.horizon.to_f64().unwrap_or(f64::NAN),
    })
}

/// `φ(z) = Z(z, t_z + ν(t_z))`, and exactly `z` when `t_z ≤ −ε`.
pub fn image_extend<T: Scalar, C: ConditionC<T> + ?Sized>(
    cond: &C,
    params: &NuParams<T>,
    z: &[T],
    opts: &FlowOptions<T>,
) -> Result<Vec<T>> {
    let hit = if cond.kappa(z) < T::zero() {
        match search(cond, z, -T::one(), params.epsilon(), opts.dt)? {
            None => return Ok(z.to_vec()),
            Some(hit) => hit,
        }
    } else {
        time_to_boundary(cond, z, opts)?
    };
    flow(cond, &hit.point, params.nu(hit.time), opts.dt)
}

/// `φ⁻¹(y) = Z(y, t_y − ν⁻¹(−t_y))` for `y ∈ E`.
pub fn image_extend_inverse<T: Scalar, C: ConditionC<T> + ?Sized>(
    cond: &C,
    params: &NuParams<T>,
    y: &[T],
    opts: &FlowOptions<T>,
) -> Result<Vec<T>> {
    if !(cond.kappa(y) < T::zero()) {
        return Err(Error::NotInImage);
    }
    match search(cond, y, -T::one(), params.epsilon(), opts.dt)? {
        None => Ok(y.to_vec()),
        Some(hit) if hit.time >= T::zero() => Err(Error::NotInImage),
        Some(hit) => flow(cond, &hit.point, -params.nu_inverse(-hit.time)?, opts.dt),
    }
}

/// Generic flow-based extension for any condition-C description.
#[derive(Clone, Debug)]
pub struct FlowExtension<C, T> {
    pub cond: C,
    pub params: NuParams<T>,
    pub opts: FlowOptions<T>,
}

impl<T: Scalar, C: ConditionC<T>> FlowExtension<C, T> {
    pub fn new(cond: C, params: NuParams<T>) -> Self {
        let opts = FlowOptions::for_layer(&params);
        Self { cond, params, opts }
    }
}

impl<T: Scalar, C: ConditionC<T>> ImageExtension<T> for FlowExtension<C, T> {
    fn dim(&self) -> usize {
        self.cond.dim()
    }
    fn apply(&self, z: &[T]) -> Result<Vec<T>> {
        image_extend(&self.cond, &self.params, z, &self.opts)
    }
    fn inverse(&self, y: &[T]) -> Result<Vec<T>> {
        image_extend_inverse(&self.cond, &self.params, y, &self.opts)
    }
    fn contains(&self, y: &[T]) -> bool {
        self.cond.kappa(y) < T::zero()
    }
}

/// Checks `∇κ·χ < 0` on samples with `|κ| < band`; returns the largest
/// sampled `|χ|`.
pub fn check_transversality<T: Scalar, C: ConditionC<T> + ?Sized>(
    cond: &C,
    samples: &[Vec<T>],
    band: T,
) -> Result<T> {
    let mut sup = T::zero();
    for z in samples {
        let chi = cond.chi(z)?;
        sup = sup.max(norm(&chi));
        if cond.kappa(z).abs() < band && !(dot(&cond.kappa_gradient(z), &chi) < T::zero()) {
            return Err(Error::NotTransversal);
        }
    }
    Ok(sup)
}

/// Sampled distance between `∂E` and `∂E_ε` against the bound `ε·sup|χ|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausdorffGap<T> {
    /// Hausdorff distance between the sampled boundary point sets.
    pub distance: T,
    /// Largest displacement `|θ − Z(θ, −ε)|` over the samples.
    pub displacement: T,
    pub bound: T,
}

/// Projects each sample onto `∂E` along the flow, then flows back by `ε`
/// onto `∂E_ε`, recording `sup|χ|` along the way.
pub fn hausdorff_gap<T: Scalar, C: ConditionC<T> + ?Sized>(
    cond: &C,
    params: &NuParams<T>,
    samples: &[Vec<T>],
    opts: &FlowOptions<T>,
) -> Result<HausdorffGap<T>> {
    let eps = params.epsilon();
    let mut outer = Vec::with_capacity(samples.len());
    let mut inner = Vec::with_capacity(samples.len());
    let mut sup = T::zero();
    let n = (eps / opts.dt).ceil().max(T::one());
    let h = eps / n;
    let n = n.to_usize().unwrap_or(1);
    for z in samples {
        let theta = time_to_boundary(cond, z, opts)?.point;
        let mut p = theta.clone();
        sup = sup.max(norm(&cond.chi(&p)?));
        for _ in 0..n {
            p = step(cond, &p, h)?;
            sup = sup.max(norm(&cond.chi(&p)?));
        }
        outer.push(theta);
        inner.push(p);
    }
    let directed = |a: &[Vec<T>], b: &[Vec<T>]| {
        a.iter()
            .map(|p| b.iter().map(|q| distance(p, q)).fold(T::infinity(), T::min))
            .fold(T::zero(), T::max)
    };
    let displacement = outer
        .iter()
        .zip(&inner)
        .map(|(a, b)| distance(a, b))
        .fold(T::zero(), T::max);
    Ok(HausdorffGap {
        distance: directed(&outer, &inner).max(directed(&inner, &outer)),
        displacement,
        bound: eps * sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::vector::scale;

    /// Unit ball with the radial field `χ(z) = −z`.
    struct Ball;

    impl ConditionC<f64> for Ball {
        fn dim(&self) -> usize {
            2
        }
        fn kappa(&self, z: &[f64]) -> f64 {
            norm(z) - 1.0
        }
        fn chi(&self, z: &[f64]) -> Result<Vec<f64>> {
            Ok(scale(z, -1.0))
        }
    }

    fn opts() -> FlowOptions<f64> {
        FlowOptions::for_layer(&NuParams::new(1.0).unwrap())
    }

    #[test]
    fn radial_time_to_boundary() {
        let e = std::f64::consts::E;
        let fine = FlowOptions {
            dt: 1e-3,
            horizon: 10.0,
        };
        let hit = time_to_boundary(&Ball, &[e, 0.0], &fine).unwrap();
        assert!((hit.time - 1.0).abs() < 1e-10);
        assert!(Ball.kappa(&hit.point).abs() < 1e-8);
        let on = time_to_boundary(&Ball, &[0.0, 1.0], &opts()).unwrap();
        assert_eq!(on.time, 0.0);
        assert_eq!(on.point, vec![0.0, 1.0]);
    }

    #[test]
    fn radial_extension_closed_form() {
        let p = NuParams::new(1.0).unwrap();
        let e = std::f64::consts::E;
        let z = [e * 0.6, e * 0.8];
        let y = image_extend(&Ball, &p, &z, &opts()).unwrap();
        let expected = scale(&z, (-4.0f64 / 3.0).exp());
        assert!(distance(&y, &expected) < 1e-9);
        let back = image_extend_inverse(&Ball, &p, &y, &opts()).unwrap();
        assert!(distance(&back, &z) < 1e-8);
    }

    #[test]
    fn core_points_are_fixed_exactly() {
        let p = NuParams::new(0.5).unwrap();
        let z = [0.1, -0.2];
        assert_eq!(image_extend(&Ball, &p, &z, &opts()).unwrap(), z.to_vec());
        assert_eq!(
            image_extend(&Ball, &p, &[0.0, 0.0], &opts()).unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            image_extend_inverse(&Ball, &p, &z, &opts()).unwrap(),
            z.to_vec()
        );
    }

    #[test]
    fn inverse_outside_is_rejected() {
        let p = NuParams::new(0.5).unwrap();
        assert_eq!(
            image_extend_inverse(&Ball, &p, &[2.0, 0.0], &opts()),
            Err(Error::NotInImage)
        );
    }

    #[test]
    fn unreachable_boundary_reported() {
        struct Away;
        impl ConditionC<f64> for Away {
            fn dim(&self) -> usize {
                1
            }
            fn kappa(&self, z: &[f64]) -> f64 {
                -z[0]
            }
            fn chi(&self, _z: &[f64]) -> Result<Vec<f64>> {
                Ok(vec![-1.0])
            }
        }
        let o = FlowOptions {
            dt: 0.1,
            horizon: 5.0,
        };
        assert!(matches!(
            time_to_boundary(&Away, &[-1.0], &o),
            Err(Error::NoBoundaryReached { .. })
        ));
    }

    #[test]
    fn radial_hausdorff_gap() {
        let p = NuParams::new(0.2).unwrap();
        let samples: Vec<Vec<f64>> = (0..16)
            .map(|k| (k as f64) * 0.39)
            .map(|a| vec![2.0 * a.cos(), 2.0 * a.sin()])
            .collect();
        let g = hausdorff_gap(&Ball, &p, &samples, &FlowOptions::for_layer(&p)).unwrap();
        // ∂E_ε is the circle of radius e^{−ε}.
        assert!((g.displacement - (1.0 - (-0.2f64).exp())).abs() < 1e-8);
        assert!(g.distance <= g.displacement + 1e-15);
        assert!(g.displacement <= g.bound);
    }
}
