use super::{assign, require, Mode};
use crate::completion::{
    complete_from_submersion, CertificationBox, Complement, CompletionResult, CoordinateMap,
    Immersion, Propagation, QuadraticForm, Region, SubmersionComplement, Wazewski,
};
use crate::dynsys::ControlledSystem;
use crate::extension::{NuParams, Precomposed, QuadraticSublevel};
use crate::numkit::{solve_linear, Grid, Matrix};
use crate::observer::{
    cascade_simulate, saturate, CascadeOptions, ObserverRun, RawObserver, Realization,
};
use crate::{cast, Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OscillatorVariant {
    /// `(x₁, x₂, −x₁x₃, −x₂x₃)`
    Dim4,
    /// Adds the bump-weighted output `℘(x₁,x₂)(x₃ − ς)`.
    Dim5,
    /// Adds a further zero component.
    Dim6,
}

impl std::str::FromStr for OscillatorVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dim4" => Ok(Self::Dim4),
            "dim5" => Ok(Self::Dim5),
            "dim6" => Ok(Self::Dim6),
            _ => Err(Error::invalid(
                "variant",
                format!("unknown variant `{s}` (dim4, dim5, dim6)"),
            )),
        }
    }
}

/// Bump profile used by the fictitious output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BumpProfile {
    /// `max{0, 1/r² − ρ}⁴`, vanishing on the admissible annulus.
    Fictitious,
    /// `max{0, 1 − ρ}²`, used by the region-wise completion example.
    Unit,
}

/// `℘(x₁, x₂)` with `ρ = x₁² + x₂²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump<T> {
    pub profile: BumpProfile,
    pub r: T,
}

impl<T: Scalar> Bump<T> {
    fn base(&self, x1: T, x2: T) -> T {
        let level = match self.profile {
            BumpProfile::Fictitious => T::one() / (self.r * self.r),
            BumpProfile::Unit => T::one(),
        };
        (level - (x1 * x1 + x2 * x2)).max(T::zero())
    }

    pub fn value(&self, x1: T, x2: T) -> T {
        let m = self.base(x1, x2);
        match self.profile {
            BumpProfile::Fictitious => m.powi(4),
            BumpProfile::Unit => m * m,
        }
    }

    pub fn gradient(&self, x1: T, x2: T) -> (T, T) {
        let m = self.base(x1, x2);
        let c = match self.profile {
            BumpProfile::Fictitious => -cast::<T>(8.0) * m.powi(3),
            BumpProfile::Unit => -cast::<T>(4.0) * m,
        };
        (c * x1, c * x2)
    }
}

/// Scenario constants; `x0` is the plant start, `xhat0` the observer start
/// in original coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorParams<T> {
    pub r: T,
    pub varsigma: T,
    pub a: T,
    pub b: T,
    pub ell: T,
    pub k: [T; 4],
    pub delta: T,
    pub epsilon: T,
    pub x0: [T; 3],
    pub xhat0: [T; 3],
}

impl<T: Scalar> Default for OscillatorParams<T> {
    fn default() -> Self {
        let c = cast::<T>;
        Self {
            r: c(3.0),
            varsigma: c(1.0),
            a: c(1.0),
            b: c(1.0),
            ell: c(5.0),
            k: [c(4.0), c(6.0), c(4.0), c(1.0)],
            delta: c(1.0),
            epsilon: c(0.5),
            x0: [c(1.0), c(0.0), c(1.0)],
            xhat0: [c(1.2), c(0.3), c(2.0)],
        }
    }
}

impl<T: Scalar> OscillatorParams<T> {
    fn slots(&mut self) -> Vec<(&'static str, &mut T)> {
        let [k1, k2, k3, k4] = &mut self.k;
        let [x1, x2, x3] = &mut self.x0;
        let [h1, h2, h3] = &mut self.xhat0;
        vec![
            ("r", &mut self.r),
            ("varsigma", &mut self.varsigma),
            ("a", &mut self.a),
            ("b", &mut self.b),
            ("ell", &mut self.ell),
            ("k1", k1),
            ("k2", k2),
            ("k3", k3),
            ("k4", k4),
            ("delta", &mut self.delta),
            ("epsilon", &mut self.epsilon),
            ("x0_1", x1),
            ("x0_2", x2),
            ("x0_3", x3),
            ("xhat0_1", h1),
            ("xhat0_2", h2),
            ("xhat0_3", h3),
        ]
    }

    /// Overrides one parameter by name; call [`validate`](Self::validate) afterwards.
    pub fn set(&mut self, key: &str, value: T) -> Result<()> {
        assign(&mut self.slots(), key, value)
    }

    /// Flat `(key, value)` listing in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, T)> {
        self.clone()
            .slots()
            .into_iter()
            .map(|(k, v)| (k, *v))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        require(self.r > T::one(), "r", "must exceed 1")?;
        require(
            self.varsigma > zero && self.varsigma < self.r,
            "varsigma",
            "must lie in (0, r)",
        )?;
        require(self.a > zero, "a", "must be positive")?;
        require(self.b > zero, "b", "must be positive")?;
        require(self.ell > zero, "ell", "must be positive")?;
        require(
            self.k.iter().all(|&k| k > zero),
            "k",
            "gains must be positive",
        )?;
        require(self.delta > zero, "delta", "must be positive")?;
        require(self.epsilon > zero, "epsilon", "must be positive")?;
        require(
            self.entries().iter().all(|(_, v)| v.is_finite()),
            "params",
            "values must be finite",
        )?;
        let plant = OscillatorPlant {
            r: self.r,
            varsigma: self.varsigma,
            outputs: 1,
        };
        require(
            plant.is_admissible(&self.x0),
            "x0",
            "plant start must lie in the admissible set",
        )?;
        Ok(())
    }

    fn bump(&self) -> Bump<T> {
        Bump {
            profile: BumpProfile::Fictitious,
            r: self.r,
        }
    }
}

/// `ẋ = (x₂, −x₁x₃, 0)` measured through `x₁`, with fictitious outputs
/// appended for the larger immersions.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorPlant<T> {
    pub r: T,
    pub varsigma: T,
    pub outputs: usize,
}

impl<T: Scalar> ControlledSystem<T> for OscillatorPlant<T> {
    fn state_dim(&self) -> usize {
        3
    }
    fn output_dim(&self) -> usize {
        self.outputs
    }
    fn dynamics(&self, x: &[T], _u: &[T]) -> Vec<T> {
        vec![x[1], -x[0] * x[2], T::zero()]
    }
    fn output(&self, x: &[T]) -> Vec<T> {
        let bump = Bump {
            profile: BumpProfile::Fictitious,
            r: self.r,
        };
        let mut y = vec![
            x[0],
            bump.value(x[0], x[1]) * (x[2] - self.varsigma),
            T::zero(),
        ];
        y.truncate(self.outputs);
        y
    }
    /// `1/r < x₁² + x₂² < r`, `0 < x₃ < r`.
    fn is_admissible(&self, x: &[T]) -> bool {
        let rho = x[0] * x[0] + x[1] * x[1];
        T::one() / self.r < rho && rho < self.r && T::zero() < x[2] && x[2] < self.r
    }
}

/// `(x₁, x₂, −x₁x₃, −x₂x₃)` with the saturated-denominator left inverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorImmersion4<T> {
    pub r: T,
}

impl<T: Scalar> Immersion<T> for OscillatorImmersion4<T> {
    fn state_dim(&self) -> usize {
        3
    }
    fn image_dim(&self) -> usize {
        4
    }
    fn eval(&self, x: &[T]) -> Vec<T> {
        vec![x[0], x[1], -x[0] * x[2], -x[1] * x[2]]
    }
    fn jacobian(&self, x: &[T]) -> Matrix<T> {
        let z = T::zero();
        Matrix::from_rows(&[
            [T::one(), z, z],
            [z, T::one(), z],
            [-x[2], z, -x[0]],
            [z, -x[2], -x[1]],
        ])
    }
    fn left_inverse(&self, xi: &[T]) -> Result<Vec<T>> {
        let den = (xi[0] * xi[0] + xi[1] * xi[1]).max(T::one() / (self.r * self.r));
        Ok(vec![xi[0], xi[1], -(xi[0] * xi[2] + xi[3] * xi[1]) / den])
    }
}

fn immersion5_jacobian<T: Scalar>(bump: &Bump<T>, varsigma: T, x: &[T], rows: usize) -> Matrix<T> {
    let z = T::zero();
    let (p1, p2) = bump.gradient(x[0], x[1]);
    let s = x[2] - varsigma;
    let mut j = Matrix::zeros(rows, 3);
    let top = [
        [T::one(), z, z],
        [z, T::one(), z],
        [-x[2], z, -x[0]],
        [z, -x[2], -x[1]],
        [p1 * s, p2 * s, bump.value(x[0], x[1])],
    ];
    for (i, row) in top.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            j[(i, k)] = *v;
        }
    }
    j
}

/// Dim-4 immersion plus `℘(x₁,x₂)(x₃ − ς)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorImmersion5<T> {
    pub bump: Bump<T>,
    pub varsigma: T,
}

impl<T: Scalar> Immersion<T> for OscillatorImmersion5<T> {
    fn state_dim(&self) -> usize {
        3
    }
    fn image_dim(&self) -> usize {
        5
    }
    fn eval(&self, x: &[T]) -> Vec<T> {
        vec![
            x[0],
            x[1],
            -x[0] * x[2],
            -x[1] * x[2],
            self.bump.value(x[0], x[1]) * (x[2] - self.varsigma),
        ]
    }
    fn jacobian(&self, x: &[T]) -> Matrix<T> {
        immersion5_jacobian(&self.bump, self.varsigma, x, 5)
    }
}

/// Dim-5 immersion with a trailing zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorImmersion6<T> {
    pub bump: Bump<T>,
    pub varsigma: T,
}

impl<T: Scalar> Immersion<T> for OscillatorImmersion6<T> {
    fn state_dim(&self) -> usize {
        3
    }
    fn image_dim(&self) -> usize {
        6
    }
    fn eval(&self, x: &[T]) -> Vec<T> {
        let mut v = OscillatorImmersion5 {
            bump: self.bump,
            varsigma: self.varsigma,
        }
        .eval(x);
        v.push(T::zero());
        v
    }
    fn jacobian(&self, x: &[T]) -> Matrix<T> {
        immersion5_jacobian(&self.bump, self.varsigma, x, 6)
    }
}

/// `γ(x) = (0, 0, x₂, −x₁)ᵀ` for the dim-4 immersion.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PlanarComplement;

impl<T: Scalar> Complement<T> for PlanarComplement {
    fn image_dim(&self) -> usize {
        4
    }
    fn codim(&self) -> usize {
        1
    }
    fn eval(&self, x: &[T]) -> Result<Matrix<T>> {
        Ok(Matrix::column_vector(&[T::zero(), T::zero(), x[1], -x[0]]))
    }
    fn column_jacobians(&self, _x: &[T]) -> Result<Vec<Matrix<T>>> {
        let mut d = Matrix::zeros(4, 3);
        d[(2, 1)] = T::one();
        d[(3, 0)] = -T::one();
        Ok(vec![d])
    }
}

/// Three completing columns for the dim-6 immersion; the resulting
/// Jacobian determinant is `(x₁² + x₂² + ℘²)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dim6Complement<T> {
    pub bump: Bump<T>,
}

impl<T: Scalar> Complement<T> for Dim6Complement<T> {
    fn image_dim(&self) -> usize {
        6
    }
    fn codim(&self) -> usize {
        3
    }
    fn eval(&self, x: &[T]) -> Result<Matrix<T>> {
        let z = T::zero();
        let p = self.bump.value(x[0], x[1]);
        let (x1, x2) = (x[0], x[1]);
        Ok(Matrix::from_rows(&[
            [z, z, z],
            [z, z, z],
            [x2, -p, z],
            [-x1, z, -p],
            [z, -x1, -x2],
            [p, x2, -x1],
        ]))
    }
    fn column_jacobians(&self, x: &[T]) -> Result<Vec<Matrix<T>>> {
        let (p1, p2) = self.bump.gradient(x[0], x[1]);
        let one = T::one();
        let mut d1 = Matrix::zeros(6, 3);
        d1[(2, 1)] = one;
        d1[(3, 0)] = -one;
        d1[(5, 0)] = p1;
        d1[(5, 1)] = p2;
        let mut d2 = Matrix::zeros(6, 3);
        d2[(2, 0)] = -p1;
        d2[(2, 1)] = -p2;
        d2[(4, 0)] = -one;
        d2[(5, 1)] = one;
        let mut d3 = Matrix::zeros(6, 3);
        d3[(3, 0)] = -p1;
        d3[(3, 1)] = -p2;
        d3[(4, 1)] = -one;
        d3[(5, 0)] = -one;
        Ok(vec![d1, d2, d3])
    }
}

/// The dim-6 extended immersion, a diffeomorphism of `ℝ⁶` with explicit
/// inverse through a 4×4 linear solve.
#[derive(Clone, Debug)]
pub struct OscillatorDim6Map<T> {
    pub completion: CompletionResult<OscillatorImmersion6<T>, Dim6Complement<T>, T>,
}

impl<T: Scalar> OscillatorDim6Map<T> {
    pub fn new(bump: Bump<T>, varsigma: T) -> Self {
        let completion = CompletionResult::assume(
            OscillatorImmersion6 { bump, varsigma },
            Dim6Complement { bump },
            T::infinity(),
        );
        Self { completion }
    }

    /// The 4×4 system in `(x₃, w₁, w₂, w₃)` for given `(x₁, x₂)`, with its
    /// right-hand side built from `ξ₃..ξ₆`.
    pub fn surjectivity_system(&self, xi: &[T]) -> (Matrix<T>, Vec<T>) {
        let bump = self.completion.immersion.bump;
        let varsigma = self.completion.immersion.varsigma;
        let (x1, x2) = (xi[0], xi[1]);
        let p = bump.value(x1, x2);
        let z = T::zero();
        let a = Matrix::from_rows(&[
            [-x1, x2, -p, z],
            [-x2, -x1, z, -p],
            [p, z, -x1, -x2],
            [z, p, x2, -x1],
        ]);
        (a, vec![xi[2], xi[3], xi[4] + p * varsigma, xi[5]])
    }
}

impl<T: Scalar> CoordinateMap<T> for OscillatorDim6Map<T> {
    fn dim(&self) -> usize {
        6
    }
    fn state_dim(&self) -> usize {
        3
    }
    fn eval(&self, s: &[T]) -> Result<Vec<T>> {
        self.completion.eval(s)
    }
    fn jacobian(&self, s: &[T]) -> Result<Matrix<T>> {
        self.completion.jacobian(s)
    }
    fn inverse(&self, xi: &[T]) -> Result<Vec<T>> {
        if xi.len() != 6 {
            return Err(Error::DimensionMismatch {
                expected: 6,
                found: xi.len(),
            });
        }
        let (a, rhs) = self.surjectivity_system(xi);
        let sol = solve_linear(&a, &rhs)?.x;
        Ok(vec![xi[0], xi[1], sol[0], sol[1], sol[2], sol[3]])
    }
}

fn chain_gains<T: Scalar>(ell: T, k: &[T; 4]) -> [T; 4] {
    [
        ell * k[0],
        ell.powi(2) * k[1],
        ell.powi(3) * k[2],
        ell.powi(4) * k[3],
    ]
}

/// Phase-variable high-gain observer on `ℝ⁴` with saturated `x̂₁x̂₃²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HighGain4<T> {
    pub ell: T,
    pub k: [T; 4],
    pub r: T,
}

impl<T: Scalar> RawObserver<T> for HighGain4<T> {
    fn dim(&self) -> usize {
        4
    }
    fn field(&self, xi: &[T], x_hat: &[T], y: &[T], _u: &[T]) -> Vec<T> {
        let e = y[0] - xi[0];
        let g = chain_gains(self.ell, &self.k);
        vec![
            xi[1] + g[0] * e,
            xi[2] + g[1] * e,
            xi[3] + g[2] * e,
            saturate(x_hat[0] * x_hat[2] * x_hat[2], self.r.powi(3)) + g[3] * e,
        ]
    }
}

/// [`HighGain4`] with the two fictitious components decaying at rates `a`, `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HighGain6<T> {
    pub chain: HighGain4<T>,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> RawObserver<T> for HighGain6<T> {
    fn dim(&self) -> usize {
        6
    }
    fn field(&self, xi: &[T], x_hat: &[T], y: &[T], u: &[T]) -> Vec<T> {
        let mut v = self.chain.field(&xi[..4], x_hat, y, u);
        v.push(-self.a * xi[4]);
        v.push(-self.b * xi[5]);
        v
    }
}

#[allow(clippy::type_complexity)]
/// Region-wise completion of the 5×3 Jacobian field built with the unit
/// bump: seed on `[−δ,δ]²×ℝ`, then `x₂ ≥ δ`, `x₂ ≤ −δ`, `x₁ ≤ −δ`, `x₁ ≥ δ`.
pub fn wazewski_preset<T: Scalar>(
    varsigma: T,
    delta: T,
) -> Result<Wazewski<T, impl Fn(&[T]) -> Matrix<T> + Clone + Send + Sync>> {
    let bump = Bump {
        profile: BumpProfile::Unit,
        r: T::one(),
    };
    require(
        delta > T::zero() && delta * delta * cast(2.0) < T::one(),
        "delta",
        "seed square must stay inside the unit disc",
    )?;
    let field = move |x: &[T]| immersion5_jacobian(&bump, varsigma, x, 5);
    let inf = T::infinity();
    let all = (-inf, inf);
    let band = (-delta, delta);
    let regions = vec![
        Region {
            bounds: vec![band, band, all],
            minor_rows: vec![0, 1, 4],
            propagation: Propagation::Seed,
        },
        Region {
            bounds: vec![band, (delta, inf), all],
            minor_rows: vec![0, 1, 3],
            propagation: Propagation::Along {
                axis: 1,
                boundary: delta,
            },
        },
        Region {
            bounds: vec![band, (-inf, -delta), all],
            minor_rows: vec![0, 1, 3],
            propagation: Propagation::Along {
                axis: 1,
                boundary: -delta,
            },
        },
        Region {
            bounds: vec![(-inf, -delta), all, all],
            minor_rows: vec![0, 1, 2],
            propagation: Propagation::Along {
                axis: 0,
                boundary: -delta,
            },
        },
        Region {
            bounds: vec![(delta, inf), all, all],
            minor_rows: vec![0, 1, 2],
            propagation: Propagation::Along {
                axis: 0,
                boundary: delta,
            },
        },
    ];
    Wazewski::new(5, 3, field, regions)
}

/// Oscillator wiring for one immersion variant.
#[derive(Clone, Debug)]
pub struct OscillatorScenario<T> {
    pub variant: OscillatorVariant,
    pub params: OscillatorParams<T>,
}

pub type SubmersionCompletion<T> = CompletionResult<
    OscillatorImmersion4<T>,
    SubmersionComplement<OscillatorImmersion4<T>, QuadraticForm<T>>,
    T,
>;

impl<T: Scalar> OscillatorScenario<T> {
    pub fn build(variant: OscillatorVariant, params: OscillatorParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(Self { variant, params })
    }

    pub fn plant(&self) -> OscillatorPlant<T> {
        let outputs = match self.variant {
            OscillatorVariant::Dim4 => 1,
            OscillatorVariant::Dim5 => 2,
            OscillatorVariant::Dim6 => 3,
        };
        OscillatorPlant {
            r: self.params.r,
            varsigma: self.params.varsigma,
            outputs,
        }
    }

    pub fn bump(&self) -> Bump<T> {
        self.params.bump()
    }

    pub fn immersion4(&self) -> OscillatorImmersion4<T> {
        OscillatorImmersion4 { r: self.params.r }
    }

    pub fn immersion5(&self) -> OscillatorImmersion5<T> {
        OscillatorImmersion5 {
            bump: self.bump(),
            varsigma: self.params.varsigma,
        }
    }

    pub fn immersion6(&self) -> OscillatorImmersion6<T> {
        OscillatorImmersion6 {
            bump: self.bump(),
            varsigma: self.params.varsigma,
        }
    }

    /// `F(ξ) = ξ₂ξ₃ − ξ₁ξ₄`, vanishing on the dim-4 image.
    pub fn level_form(&self) -> QuadraticForm<T> {
        let mut m = Matrix::zeros(4, 4);
        m[(1, 2)] = T::one();
        m[(2, 1)] = T::one();
        m[(0, 3)] = -T::one();
        m[(3, 0)] = -T::one();
        QuadraticForm::new(m).expect("symmetric by construction")
    }

    /// Admissible sample states on a coarse polar grid.
    pub fn admissible_samples(&self) -> Vec<Vec<T>> {
        let r = self.params.r.to_f64().unwrap_or(3.0);
        let mut out = Vec::new();
        for i in 0..4 {
            let rho = 1.0 / r + (r - 1.0 / r) * (i as f64 + 0.5) / 4.0;
            for k in 0..6 {
                let ang = k as f64 * std::f64::consts::PI / 3.0 + 0.2;
                for x3 in [0.25, 0.5, 0.75] {
                    let v = [rho.sqrt() * ang.cos(), rho.sqrt() * ang.sin(), x3 * r];
                    out.push(v.iter().map(|&c| cast(c)).collect());
                }
            }
        }
        out
    }

    /// Completion from `F`, certified on the admissible samples.
    pub fn submersion_completion(&self) -> Result<SubmersionCompletion<T>> {
        let cert = CertificationBox {
            samples: self.admissible_samples(),
            w_max: cast(1.0),
            points_per_axis: 21,
        };
        complete_from_submersion(self.immersion4(), self.level_form(), &cert)
    }

    pub fn quadratic_extension(&self) -> Result<QuadraticSublevel<T>> {
        QuadraticSublevel::new(
            self.level_form().matrix().clone(),
            self.params.delta,
            NuParams::new(self.params.epsilon)?,
        )
    }

    pub fn dim6_map(&self) -> OscillatorDim6Map<T> {
        OscillatorDim6Map::new(self.bump(), self.params.varsigma)
    }

    pub fn raw_observer4(&self) -> HighGain4<T> {
        HighGain4 {
            ell: self.params.ell,
            k: self.params.k,
            r: self.params.r,
        }
    }

    pub fn raw_observer6(&self) -> HighGain6<T> {
        HighGain6 {
            chain: self.raw_observer4(),
            a: self.params.a,
            b: self.params.b,
        }
    }

    pub fn supports(&self, mode: Mode) -> bool {
        matches!(
            (self.variant, mode),
            (
                OscillatorVariant::Dim4,
                Mode::RawImage | Mode::RawOriginal | Mode::Extended
            ) | (OscillatorVariant::Dim6, Mode::RawImage | Mode::Extended)
        )
    }

    /// Runs the cascade. Raw runs start at `ξ̂ = 0`; the others at
    /// `(x̂, ŵ) = (xhat0, 0)`.
    pub fn run(&self, mode: Mode, grid: &Grid<T>) -> Result<ObserverRun<T>> {
        if !self.supports(mode) {
            return Err(Error::UnsupportedMode(mode.to_string()));
        }
        let plant = self.plant();
        let x0 = self.params.x0;
        let opts = CascadeOptions::default();
        let start = |m: usize| {
            let mut s = vec![T::zero(); m];
            s[..3].copy_from_slice(&self.params.xhat0);
            s
        };
        match (self.variant, mode) {
            (OscillatorVariant::Dim4, Mode::RawImage) => {
                let imm = self.immersion4();
                let obs = self.raw_observer4();
                let estimate = move |xi: &[T]| imm.left_inverse(xi);
                let real = Realization::Raw {
                    observer: &obs,
                    estimate: &estimate,
                };
                cascade_simulate(&plant, &imm, &x0, &real, &[T::zero(); 4], grid, &opts)
            }
            (OscillatorVariant::Dim4, Mode::RawOriginal) => {
                let map = self.submersion_completion()?;
                let obs = self.raw_observer4();
                let real = Realization::Extended {
                    map: &map,
                    observer: &obs,
                };
                cascade_simulate(
                    &plant,
                    &self.immersion4(),
                    &x0,
                    &real,
                    &start(4),
                    grid,
                    &opts,
                )
            }
            (OscillatorVariant::Dim4, Mode::Extended) => {
                let map = Precomposed {
                    map: self.submersion_completion()?,
                    extension: self.quadratic_extension()?,
                };
                let obs = self.raw_observer4();
                let real = Realization::Extended {
                    map: &map,
                    observer: &obs,
                };
                cascade_simulate(
                    &plant,
                    &self.immersion4(),
                    &x0,
                    &real,
                    &start(4),
                    grid,
                    &opts,
                )
            }
            (OscillatorVariant::Dim6, Mode::RawImage) => {
                let map = self.dim6_map();
                let obs = self.raw_observer6();
                let estimate = |xi: &[T]| map.inverse(xi);
                let real = Realization::Raw {
                    observer: &obs,
                    estimate: &estimate,
                };
                cascade_simulate(
                    &plant,
                    &self.immersion6(),
                    &x0,
                    &real,
                    &[T::zero(); 6],
                    grid,
                    &opts,
                )
            }
            (OscillatorVariant::Dim6, Mode::Extended) => {
                let map = self.dim6_map();
                let obs = self.raw_observer6();
                let real = Realization::Extended {
                    map: &map,
                    observer: &obs,
                };
                cascade_simulate(
                    &plant,
                    &self.immersion6(),
                    &x0,
                    &real,
                    &start(6),
                    grid,
                    &opts,
                )
            }
            _ => Err(Error::UnsupportedMode(mode.to_string())),
        }
    }
}
