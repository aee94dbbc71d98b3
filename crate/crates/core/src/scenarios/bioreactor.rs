use super::{assign, require, Mode};
use crate::completion::{CoordinateMap, Immersion, SquareImmersion};
use crate::dynsys::ControlledSystem;
use crate::extension::{Chain, Halfspace, HalfspaceForm, ImageExtension, NuParams, Precomposed};
use crate::numkit::{gain_equation, highgain_gain, Grid, Matrix};
use crate::observer::{
    cascade_simulate, AffineConstraint, CascadeOptions, ConvexityModifier, Modified, ObserverRun,
    RawObserver, Realization,
};
use crate::{cast, Error, Result, Scalar};

/// Model constants, input schedule levels, and observer tuning.
#[derive(Clone, Debug, PartialEq)]
pub struct BioreactorParams<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
    pub u_min: T,
    pub u_max: T,
    /// Input on `[0, 10]` and after `t = 20`.
    pub u_high: T,
    /// Input on `(10, 20]`.
    pub u_low: T,
    /// Lower bound on the first image coordinate.
    pub eps1: T,
    /// Layer width of both half-space extensions.
    pub epsilon: T,
    pub ell: T,
    pub gamma: T,
    pub delta: T,
    pub x0: [T; 2],
    pub xhat0: [T; 2],
}

impl<T: Scalar> Default for BioreactorParams<T> {
    fn default() -> Self {
        let c = cast::<T>;
        Self {
            a1: c(1.0),
            a2: c(1.0),
            a3: c(1.0),
            a4: c(0.1),
            u_min: c(0.01),
            u_max: c(0.09),
            u_high: c(0.08),
            u_low: c(0.02),
            eps1: c(0.005),
            epsilon: c(0.01),
            ell: c(5.0),
            gamma: c(100.0),
            delta: c(0.01),
            x0: [c(0.04), c(0.07)],
            xhat0: [c(0.03), c(0.09)],
        }
    }
}

impl<T: Scalar> BioreactorParams<T> {
    fn slots(&mut self) -> Vec<(&'static str, &mut T)> {
        let [x1, x2] = &mut self.x0;
        let [h1, h2] = &mut self.xhat0;
        vec![
            ("a1", &mut self.a1),
            ("a2", &mut self.a2),
            ("a3", &mut self.a3),
            ("a4", &mut self.a4),
            ("u_min", &mut self.u_min),
            ("u_max", &mut self.u_max),
            ("u_high", &mut self.u_high),
            ("u_low", &mut self.u_low),
            ("eps1", &mut self.eps1),
            ("epsilon", &mut self.epsilon),
            ("ell", &mut self.ell),
            ("gamma", &mut self.gamma),
            ("delta", &mut self.delta),
            ("x0_1", x1),
            ("x0_2", x2),
            ("xhat0_1", h1),
            ("xhat0_2", h2),
        ]
    }

    pub fn set(&mut self, key: &str, value: T) -> Result<()> {
        assign(&mut self.slots(), key, value)
    }

    pub fn entries(&self) -> Vec<(&'static str, T)> {
        self.clone()
            .slots()
            .into_iter()
            .map(|(k, v)| (k, *v))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        require(
            self.entries().iter().all(|(_, v)| v.is_finite()),
            "params",
            "values must be finite",
        )?;
        for (name, v) in [
            ("a1", self.a1),
            ("a2", self.a2),
            ("a3", self.a3),
            ("a4", self.a4),
        ] {
            require(v > zero, name, "must be positive")?;
        }
        require(zero < self.u_min, "u_min", "must be positive")?;
        require(self.u_max < self.a1, "u_max", "must stay below a1")?;
        for (name, u) in [("u_high", self.u_high), ("u_low", self.u_low)] {
            require(
                self.u_min < u && u < self.u_max,
                name,
                "must lie strictly between u_min and u_max",
            )?;
        }
        require(
            self.eps1 > zero && self.eps1 < T::one(),
            "eps1",
            "must lie in (0, 1)",
        )?;
        require(self.epsilon > zero, "epsilon", "must be positive")?;
        require(self.ell > zero, "ell", "must be positive")?;
        require(self.gamma > zero, "gamma", "must be positive")?;
        require(self.delta >= zero, "delta", "must be non-negative")?;
        let plant = self.plant();
        require(
            plant.is_admissible(&self.x0),
            "x0",
            "plant start must lie in the admissible set",
        )?;
        require(
            plant.is_admissible(&self.xhat0),
            "xhat0",
            "observer start must lie in the admissible set",
        )?;
        Ok(())
    }

    fn plant(&self) -> BioreactorPlant<T> {
        BioreactorPlant {
            a1: self.a1,
            a2: self.a2,
            a3: self.a3,
            a4: self.a4,
            eps1: self.eps1,
            u_high: self.u_high,
            u_low: self.u_low,
        }
    }
}

/// Two-state bioreactor measured through `x₁`, driven by a piecewise
/// constant dilution rate.
#[derive(Clone, Debug, PartialEq)]
pub struct BioreactorPlant<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
    pub eps1: T,
    pub u_high: T,
    pub u_low: T,
}

impl<T: Scalar> BioreactorPlant<T> {
    /// `u_high` for `t ≤ 10`, `u_low` for `10 < t ≤ 20`, then `u_high`.
    pub fn schedule(&self, t: T) -> T {
        if t <= cast(10.0) || t > cast(20.0) {
            self.u_high
        } else {
            self.u_low
        }
    }

    fn growth(&self, x: &[T]) -> T {
        self.a1 * x[0] * x[1] / (self.a2 * x[0] + x[1])
    }
}

impl<T: Scalar> ControlledSystem<T> for BioreactorPlant<T> {
    fn state_dim(&self) -> usize {
        2
    }
    fn output_dim(&self) -> usize {
        1
    }
    fn dynamics(&self, x: &[T], u: &[T]) -> Vec<T> {
        let g = self.growth(x);
        vec![g - u[0] * x[0], -self.a3 * g - u[0] * x[1] + u[0] * self.a4]
    }
    fn output(&self, x: &[T]) -> Vec<T> {
        vec![x[0]]
    }
    /// `x₁ > ε₁`, `x₂ > −a₂x₁`.
    fn is_admissible(&self, x: &[T]) -> bool {
        x[0] > self.eps1 && x[1] > -self.a2 * x[0]
    }
    fn input(&self, t: T) -> Vec<T> {
        vec![self.schedule(t)]
    }
}

/// `(x₁, a₁x₁x₂/(a₂x₁ + x₂))`, a diffeomorphism onto `{ξ₁ > 0, ξ₂ < a₁ξ₁}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BioreactorImmersion<T> {
    pub a1: T,
    pub a2: T,
}

impl<T: Scalar> Immersion<T> for BioreactorImmersion<T> {
    fn state_dim(&self) -> usize {
        2
    }
    fn image_dim(&self) -> usize {
        2
    }
    fn eval(&self, x: &[T]) -> Vec<T> {
        vec![x[0], self.a1 * x[0] * x[1] / (self.a2 * x[0] + x[1])]
    }
    /// Singular exactly when `x₁ = 0`; undefined on `x₂ = −a₂x₁`.
    fn jacobian(&self, x: &[T]) -> Matrix<T> {
        let d = self.a2 * x[0] + x[1];
        let d2 = d * d;
        Matrix::from_rows(&[
            [T::one(), T::zero()],
            [
                self.a1 * x[1] * x[1] / d2,
                self.a1 * self.a2 * x[0] * x[0] / d2,
            ],
        ])
    }
    fn in_domain(&self, x: &[T]) -> bool {
        x[0] > T::zero() && x[1] > -self.a2 * x[0]
    }
    fn left_inverse(&self, xi: &[T]) -> Result<Vec<T>> {
        let den = self.a1 * xi[0] - xi[1];
        if !(xi[0] > T::zero() && den > T::zero()) {
            return Err(Error::OutOfImage);
        }
        Ok(vec![xi[0], self.a2 * xi[0] * xi[1] / den])
    }
}

/// Image-coordinate high-gain observer: closed-form image dynamics plus
/// the gain `(2ℓ, ℓ²)` on the output error.
#[derive(Clone, Debug, PartialEq)]
pub struct BioreactorObserver<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
    pub gain: Vec<T>,
}

impl<T: Scalar> BioreactorObserver<T> {
    /// `ξ̇` along the plant, written in image coordinates.
    pub fn image_dynamics(&self, xi: &[T], u: T) -> [T; 2] {
        let (x1, x2) = (xi[0], xi[1]);
        let (a1, a2, a3, a4) = (self.a1, self.a2, self.a3, self.a4);
        let g = a1 * x1 - x2;
        let g2 = g * g;
        let p = a1 * x1;
        let q = a1 * a2 * x1 * x1;
        let second = x2 * x2 * x2 / (a1 * x1 * x1) - u * x2 * x2 / p - a3 * x2 * g2 / q
            + u * a4 * g2 / q
            - u * x2 * g / p;
        [x2 - u * x1, second]
    }
}

impl<T: Scalar> RawObserver<T> for BioreactorObserver<T> {
    fn dim(&self) -> usize {
        2
    }
    fn field(&self, xi: &[T], _x_hat: &[T], y: &[T], u: &[T]) -> Vec<T> {
        let e = y[0] - xi[0];
        let f = self.image_dynamics(xi, u[0]);
        vec![f[0] + self.gain[0] * e, f[1] + self.gain[1] * e]
    }
}

/// `z ↦ φ₂(φ₁(z))`: first onto `{ξ₁ > ε₁}`, then onto `{ξ₂ < a₁ξ₁}`.
pub type BioreactorExtension<T> = Chain<Halfspace<T>, Halfspace<T>>;

pub type BioreactorModified<T> = Modified<BioreactorObserver<T>, AffineConstraint<T>, T>;

/// Bioreactor wiring.
#[derive(Clone, Debug)]
pub struct BioreactorScenario<T> {
    pub params: BioreactorParams<T>,
}

impl<T: Scalar> BioreactorScenario<T> {
    pub fn build(params: BioreactorParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn plant(&self) -> BioreactorPlant<T> {
        self.params.plant()
    }

    pub fn immersion(&self) -> BioreactorImmersion<T> {
        BioreactorImmersion {
            a1: self.params.a1,
            a2: self.params.a2,
        }
    }

    pub fn observer(&self) -> Result<BioreactorObserver<T>> {
        let p = &self.params;
        Ok(BioreactorObserver {
            a1: p.a1,
            a2: p.a2,
            a3: p.a3,
            a4: p.a4,
            gain: highgain_gain(2, p.ell)?,
        })
    }

    pub fn extension(&self) -> Result<BioreactorExtension<T>> {
        let p = &self.params;
        let nu = NuParams::new(p.epsilon)?;
        let first = Halfspace::new(
            2,
            0,
            HalfspaceForm::LowerBound {
                bound: p.eps1,
                attractor: T::one(),
            },
            nu,
        )?;
        let second = Halfspace::new(
            2,
            1,
            HalfspaceForm::GraphBound {
                slope: p.a1,
                other: 0,
                attractor: -T::one(),
            },
            nu,
        )?;
        Ok(Chain { first, second })
    }

    /// `x ↦ φ⁻¹(φᵢ(x))`, a diffeomorphism from the admissible set onto `ℝ²`.
    pub fn extended_map(
        &self,
    ) -> Result<Precomposed<SquareImmersion<BioreactorImmersion<T>>, BioreactorExtension<T>>> {
        Ok(Precomposed {
            map: SquareImmersion(self.immersion()),
            extension: self.extension()?,
        })
    }

    /// `κ₁ = ε₁ − ξ₁` and `κ₂ = ξ₂ − a₁ξ₁`.
    pub fn constraints(&self) -> Vec<AffineConstraint<T>> {
        let p = &self.params;
        vec![
            AffineConstraint {
                coeffs: vec![-T::one(), T::zero()],
                offset: p.eps1,
            },
            AffineConstraint {
                coeffs: vec![-p.a1, T::one()],
                offset: T::zero(),
            },
        ]
    }

    pub fn modified_observer(&self) -> Result<BioreactorModified<T>> {
        let p = &self.params;
        let s = gain_equation(2, p.ell)?;
        let modifier = ConvexityModifier::new(self.constraints(), &s, p.gamma, p.delta)?;
        Ok(Modified {
            inner: self.observer()?,
            modifier,
        })
    }

    /// Runs the cascade. `raw_image` integrates in the coordinates of the
    /// extended map so that it shadows `extended`.
    pub fn run(&self, mode: Mode, grid: &Grid<T>) -> Result<ObserverRun<T>> {
        let plant = self.plant();
        let imm = self.immersion();
        let x0 = self.params.x0;
        let xhat0 = self.params.xhat0;
        let opts = CascadeOptions::default();
        match mode {
            Mode::RawImage => {
                let ext = self.extension()?;
                let obs = self.observer()?;
                let xi0 = ext.inverse(&imm.eval(&xhat0))?;
                let estimate = |xi: &[T]| imm.left_inverse(&ext.apply(xi)?);
                let real = Realization::Raw {
                    observer: &obs,
                    estimate: &estimate,
                };
                let mut run = cascade_simulate(&plant, &imm, &x0, &real, &xi0, grid, &opts)?;
                let map = self.extended_map()?;
                for (k, x) in run.plant.iter().enumerate() {
                    run.err_image[k] =
                        crate::numkit::vector::distance(&map.eval(x)?, &run.image_estimate[k]);
                }
                Ok(run)
            }
            Mode::RawOriginal => {
                let map = SquareImmersion(imm);
                let obs = self.observer()?;
                let real = Realization::Extended {
                    map: &map,
                    observer: &obs,
                };
                cascade_simulate(&plant, &imm, &x0, &real, &xhat0, grid, &opts)
            }
            Mode::Extended => {
                let map = self.extended_map()?;
                let obs = self.observer()?;
                let real = Realization::Extended {
                    map: &map,
                    observer: &obs,
                };
                let mut run = cascade_simulate(&plant, &imm, &x0, &real, &xhat0, grid, &opts)?;
                for (k, x) in run.plant.iter().enumerate() {
                    run.err_image[k] =
                        crate::numkit::vector::distance(&map.eval(x)?, &run.image_estimate[k]);
                }
                Ok(run)
            }
            Mode::ExtendedWithModifier => {
                let map = SquareImmersion(imm);
                let obs = self.modified_observer()?;
                let real = Realization::Extended {
                    map: &map,
                    observer: &obs,
                };
                cascade_simulate(&plant, &imm, &x0, &real, &xhat0, grid, &opts)
            }
            Mode::Combined => {
                let map = self.extended_map()?;
                let obs = self.modified_observer()?;
                let real = Realization::Extended {
                    map: &map,
                    observer: &obs,
                };
                let mut run = cascade_simulate(&plant, &imm, &x0, &real, &xhat0, grid, &opts)?;
                for (k, x) in run.plant.iter().enumerate() {
                    run.err_image[k] =
                        crate::numkit::vector::distance(&map.eval(x)?, &run.image_estimate[k]);
                }
                Ok(run)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::lie_derivative;
    use crate::numkit::jacobian_fd;

    fn scenario() -> BioreactorScenario<f64> {
        BioreactorScenario::build(BioreactorParams::default()).unwrap()
    }

    #[test]
    fn immersion_values() {
        let imm = scenario().immersion();
        let xi = imm.eval(&[0.04, 0.07]);
        assert!((xi[1] - 0.0028 / 0.11).abs() < 1e-15);
        let x = imm.left_inverse(&xi).unwrap();
        assert!((x[1] - 0.07).abs() < 1e-14);
        let fd = jacobian_fd(|x| imm.eval(x), &[0.04, 0.07], None).unwrap();
        assert!(fd.sub(&imm.jacobian(&[0.04, 0.07])).max_abs() < 1e-6);
        assert!(imm.left_inverse(&[0.04, 0.05]).is_err());
    }

    #[test]
    fn schedule() {
        let p = scenario().plant();
        assert_eq!(
            [p.schedule(5.0), p.schedule(15.0), p.schedule(25.0)],
            [0.08, 0.02, 0.08]
        );
    }

    #[test]
    fn gain_and_closed_form() {
        let s = scenario();
        let obs = s.observer().unwrap();
        assert!((obs.gain[0] - 10.0).abs() < 1e-10 && (obs.gain[1] - 25.0).abs() < 1e-10);
        let imm = s.immersion();
        let plant = s.plant();
        for x in [[0.04, 0.07], [0.3, -0.1], [0.02, 0.5]] {
            let xi = imm.eval(&x);
            let lf = lie_derivative(&imm, &plant, &x, &[0.08]);
            let closed = obs.image_dynamics(&xi, 0.08);
            assert!((closed[0] - (xi[1] - 0.08 * xi[0])).abs() < 1e-15);
            assert!((lf[0] - closed[0]).abs() < 1e-12 && (lf[1] - closed[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn extension_is_identity_on_core() {
        let s = scenario();
        let ext = s.extension().unwrap();
        let xi = [0.4, 0.1];
        assert_eq!(ext.apply(&xi).unwrap(), xi.to_vec());
        assert_eq!(ext.inverse(&xi).unwrap(), xi.to_vec());
        let far = [-3.0, 7.0];
        let y = ext.apply(&far).unwrap();
        assert!(y[0] > 0.005 && y[1] < y[0]);
    }

    #[test]
    fn validation() {
        let mut p = BioreactorParams::<f64>::default();
        p.set("u_max", 2.0).unwrap();
        assert!(BioreactorScenario::build(p).is_err());
        let mut p = BioreactorParams::<f64>::default();
        assert!(p.set("zeta", 1.0).is_err());
        p.set("x0_1", -1.0).unwrap();
        assert!(p.validate().is_err());
    }
}
