//! Frozen reference values, each recomputed by hand or in closed form.

use approx::assert_abs_diff_eq;
use coordobs::completion::{
    block_orthogonal_complete, check_completable, complete_from_submersion, complete_minors,
    complete_parallelizable_4, extend_immersion, CertificationBox, Complement, Completability,
    CompletionResult, CoordinateMap, Immersion, Strategy,
};
use coordobs::dynsys::{lie_derivative, pushforward_dynamics, simulate, ControlledSystem};
use coordobs::extension::{
    submersion_sublevel, time_to_boundary, ConditionC, FlowExtension, FlowOptions, ImageExtension,
    NuParams,
};
use coordobs::numkit::vector::{distance, dot, norm_sq};
use coordobs::numkit::{determinant, jacobian_fd, solve_linear, Grid, Matrix};
use coordobs::observer::{extended_observer_step, saturate, RawObserver};
use coordobs::scenarios::{
    wazewski_preset, BioreactorParams, BioreactorScenario, Bump, BumpProfile, OscillatorImmersion5,
    OscillatorParams, OscillatorScenario, OscillatorVariant, PlanarComplement,
};

fn osc(variant: OscillatorVariant) -> OscillatorScenario<f64> {
    OscillatorScenario::build(variant, OscillatorParams::default()).unwrap()
}

fn bio() -> BioreactorScenario<f64> {
    BioreactorScenario::build(BioreactorParams::default()).unwrap()
}

#[test]
fn linear_solve_examples() {
    let x = solve_linear(&Matrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]), &[2.0, 4.0])
        .unwrap()
        .x;
    assert_eq!(x, vec![1.0, 1.0]);
    let x = solve_linear(&Matrix::<f64>::identity(2), &[3.0, 4.0])
        .unwrap()
        .x;
    assert_eq!(x, vec![3.0, 4.0]);
}

#[test]
fn oscillator_jacobian_matches_differences() {
    let imm = osc(OscillatorVariant::Dim4).immersion4();
    let fd = jacobian_fd(|x| imm.eval(x), &[1.0, 0.0, 2.0], Some(1e-5)).unwrap();
    assert!(fd.sub(&imm.jacobian(&[1.0, 0.0, 2.0])).max_abs() < 1e-6);
}

#[test]
fn oscillator_plant_closed_form() {
    let s = osc(OscillatorVariant::Dim4);
    let traj = simulate(
        &s.plant(),
        &[1.0, 0.0, 1.0],
        &Grid::new(0.0, 1.0, 1e-3).unwrap(),
    )
    .unwrap();
    let x = traj.last();
    assert_abs_diff_eq!(x[0], 1f64.cos(), epsilon = 1e-6);
    assert_abs_diff_eq!(x[1], -1f64.sin(), epsilon = 1e-6);
    assert_abs_diff_eq!(x[2], 1.0, epsilon = 1e-15);
}

#[test]
fn bioreactor_stays_admissible() {
    let s = bio();
    let traj = simulate(
        &s.plant(),
        &[0.04, 0.07],
        &Grid::new(0.0, 40.0, 1e-3).unwrap(),
    )
    .unwrap();
    assert!(traj.truncation.is_none());
    assert_eq!(traj.left_admissible_at, None);
}

#[test]
fn oscillator_image_dynamics() {
    let s = osc(OscillatorVariant::Dim4);
    let lf = lie_derivative(&s.immersion4(), &s.plant(), &[1.0, 0.0, 2.0], &[]);
    assert_eq!(lf, vec![0.0, -2.0, 0.0, 4.0]);
}

#[test]
fn bioreactor_image_dynamics() {
    let s = bio();
    let imm = s.immersion();
    let plant = s.plant();
    let x = [0.04, 0.07];
    let xi = imm.eval(&x);
    assert_abs_diff_eq!(xi[1], 0.0028 / 0.11, epsilon = 1e-16);
    let lf = lie_derivative(&imm, &plant, &x, &[0.08]);
    let fd = jacobian_fd(|x| imm.eval(x), &x, None)
        .unwrap()
        .mul_vec(&plant.dynamics(&x, &[0.08]));
    assert!(distance(&lf, &fd) < 1e-6);
    let push = pushforward_dynamics(&imm, &plant)
        .eval(&xi, &[0.08])
        .unwrap();
    assert_abs_diff_eq!(push[0], xi[1] - 0.08 * xi[0], epsilon = 1e-15);
    assert_abs_diff_eq!(imm.left_inverse(&xi).unwrap()[1], 0.07, epsilon = 1e-15);
}

#[test]
fn solvability_table() {
    assert_eq!(
        check_completable(4, 3).unwrap(),
        Completability::Solvable(Strategy::Minors)
    );
    assert_eq!(
        check_completable(4, 1).unwrap(),
        Completability::Solvable(Strategy::Parallelizable)
    );
    assert!(matches!(
        check_completable(7, 2).unwrap(),
        Completability::NotUniversallySolvable { .. }
    ));
    assert!(check_completable(3, 3).is_err());
}

#[test]
fn minors_examples() {
    let j = osc(OscillatorVariant::Dim4)
        .immersion4()
        .jacobian(&[1.0, 0.0, 2.0]);
    let g = complete_minors(&j).unwrap();
    assert_eq!(g, vec![0.0, -2.0, 0.0, -1.0]);
    assert_abs_diff_eq!(
        determinant(&j.hstack(&Matrix::column_vector(&g))),
        5.0,
        epsilon = 1e-12
    );
    let g = complete_minors(&Matrix::from_rows(&[[1.0], [0.0]])).unwrap();
    assert_eq!(g, vec![0.0, 1.0]);
    let j = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);
    let g = complete_minors(&j).unwrap();
    assert_eq!(g, vec![0.0, 0.0, 1.0]);
    assert_abs_diff_eq!(
        determinant(&j.hstack(&Matrix::column_vector(&g))),
        1.0,
        epsilon = 1e-15
    );
}

#[test]
fn parallelizable_examples() {
    let m = complete_parallelizable_4(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert_eq!(
        m,
        Matrix::from_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0]
        ])
    );
    let m = complete_parallelizable_4(&[0.0, 1.0, 0.0, 0.0]).unwrap();
    assert_eq!(&m.transpose() * &m, Matrix::identity(4));
    let m = complete_parallelizable_4(&[1.2, -0.4, 0.8, 1.2 * 1.2f64.sqrt()]).unwrap();
    let z2: f64 = [1.2f64, -0.4, 0.8, 1.2 * 1.2f64.sqrt()]
        .iter()
        .map(|v| v * v)
        .sum();
    assert_abs_diff_eq!(determinant(&m).abs(), z2 * z2, epsilon = 1e-10);
}

#[test]
fn submersion_completion_examples() {
    let s = osc(OscillatorVariant::Dim4);
    let x = [1.0, 0.0, 2.0];
    let form = s.level_form();
    assert_eq!(form.value(&s.immersion4().eval(&x)), 0.0);
    let cert = CertificationBox::new(vec![x.to_vec()], 0.5);
    let c = complete_from_submersion(s.immersion4(), form, &cert).unwrap();
    let g = c.gamma(&x).unwrap();
    assert!(distance(&g.column(0), &[0.0, -2.0, 0.0, -1.0]) < 1e-12);
    let v = c.phie(&x, &[0.1]).unwrap();
    // φᵢ + γw with γ = (0, −2, 0, −1): the third entry stays at −x₁x₃ = −2
    assert!(distance(&v, &[1.0, -0.2, -2.0, -0.1]) < 1e-12, "{v:?}");
}

#[test]
fn block_completion_examples() {
    let b = Matrix::from_rows(&[[-2.0, 0.0, 0.0], [0.0, -2.0, 0.0]]);
    let c = block_orthogonal_complete(&Matrix::identity(3), &b, &Matrix::identity(2)).unwrap();
    assert_eq!(c, Matrix::from_rows(&[[2.0, 0.0], [0.0, 2.0], [0.0, 0.0]]));
    let c = block_orthogonal_complete(
        &Matrix::<f64>::identity(3),
        &Matrix::zeros(2, 3),
        &Matrix::identity(2),
    )
    .unwrap();
    assert_eq!(c.max_abs(), 0.0);
}

fn unit_field(x: &[f64]) -> Matrix<f64> {
    let imm = OscillatorImmersion5 {
        bump: Bump {
            profile: BumpProfile::Unit,
            r: 1.0,
        },
        varsigma: 1.0,
    };
    imm.jacobian(x)
}

#[test]
fn wazewski_preset_examples() {
    let w = wazewski_preset(1.0, 0.5).unwrap();
    let x = [0.0, 0.0, 2.0];
    assert_eq!(w.region_of(&x).unwrap(), 0);
    let g = w.gamma(&x).unwrap();
    assert_eq!(g.select_rows(&[2, 3]), Matrix::identity(2));
    assert!(determinant(&unit_field(&x).hstack(&g)).abs() > 0.0);

    let edge = [0.0, 0.5, 1.0];
    let seed = w.gamma_in_region(0, &edge).unwrap();
    let next = w.gamma_in_region(1, &edge).unwrap();
    assert!(seed.sub(&next).max_abs() < 1e-9);

    let axis: Vec<f64> = (0..20).map(|k| -2.0 + 4.0 * k as f64 / 19.0).collect();
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                let x = [a, b, c];
                let d = determinant(&unit_field(&x).hstack(&w.gamma(&x).unwrap()));
                assert!(d.abs() > 1e-9, "singular completion at {x:?}: {d}");
            }
        }
    }
}

#[test]
fn planar_completion_is_injective_for_any_w() {
    let imm = osc(OscillatorVariant::Dim4).immersion4();
    let c = CompletionResult::assume(imm, PlanarComplement, f64::INFINITY);
    let x = [0.3, -0.8, 1.5];
    let v = c.phie(&x, &[2.5]).unwrap();
    let expected = [0.3, -0.8, -0.3 * 1.5 - 0.8 * 2.5, 0.8 * 1.5 - 0.3 * 2.5];
    assert!(distance(&v, &expected) < 1e-15);
    assert_eq!(c.phie(&x, &[0.0]).unwrap(), imm.eval(&x));
    let s: Vec<f64> = x.iter().copied().chain([2.5]).collect();
    let back = {
        let xi = c.eval(&s).unwrap();
        let rho = xi[0] * xi[0] + xi[1] * xi[1];
        let x3 = -(xi[0] * xi[2] + xi[1] * xi[3]) / rho;
        let w = (xi[1] * xi[2] - xi[0] * xi[3]) / rho;
        [xi[0], xi[1], x3, w]
    };
    assert!(distance(&back, &s) < 1e-12);
    let d = determinant(&c.jacobian(&s).unwrap());
    assert_abs_diff_eq!(d, 0.73, epsilon = 1e-12);
}

#[test]
fn dim6_determinant_on_grid() {
    let map = osc(OscillatorVariant::Dim6).dim6_map();
    let bump = Bump {
        profile: BumpProfile::Fictitious,
        r: 3.0,
    };
    let p0 = bump.value(0.0, 0.0);
    assert_eq!(p0, (1.0f64 / 9.0).powi(4));
    let d0 = determinant(&map.jacobian(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap());
    assert!((d0 - p0.powi(4)).abs() <= 1e-9 * p0.powi(4));
    for a in [-1.0, -0.2, 0.0, 0.15, 0.9] {
        for b in [-0.7, 0.0, 0.05, 1.3] {
            for c in [-1.0, 0.5, 2.0] {
                let s = [a, b, c, 0.4, -0.3, 1.1];
                let p = bump.value(a, b);
                let expected = (a * a + b * b + p * p).powi(2);
                let d = determinant(&map.jacobian(&s).unwrap());
                assert!(
                    (d - expected).abs() <= 1e-10 * expected,
                    "{s:?}: {d} vs {expected}"
                );
            }
        }
    }
}

#[test]
fn dim6_surjectivity_example() {
    let map = osc(OscillatorVariant::Dim6).dim6_map();
    let (a, rhs) = map.surjectivity_system(&[1.0, 0.0, -2.0, 0.0, 0.0, 0.0]);
    assert_eq!(rhs, vec![-2.0, 0.0, 0.0, 0.0]);
    assert_eq!(solve_linear(&a, &rhs).unwrap().x, vec![2.0, 0.0, 0.0, 0.0]);
}

#[test]
fn nu_examples() {
    let p = NuParams::new(0.4f64).unwrap();
    assert_abs_diff_eq!(p.nu(-0.4), 0.4, epsilon = 1e-16);
    assert_abs_diff_eq!(p.nu(0.0), 0.2, epsilon = 1e-16);
    assert_abs_diff_eq!(p.nu_inverse(0.4).unwrap(), -0.4, epsilon = 1e-16);
    let p = NuParams::new(1.0f64).unwrap();
    assert_abs_diff_eq!(p.nu(1.0), 1.0 / 3.0, epsilon = 1e-16);
}

struct Ball;

impl ConditionC<f64> for Ball {
    fn dim(&self) -> usize {
        2
    }
    fn kappa(&self, z: &[f64]) -> f64 {
        norm_sq(z).sqrt() - 1.0
    }
    fn chi(&self, z: &[f64]) -> coordobs::Result<Vec<f64>> {
        Ok(z.iter().map(|v| -v).collect())
    }
}

#[test]
fn ball_extension_closed_form() {
    let e = std::f64::consts::E;
    let z = [0.0, e];
    let fine = FlowOptions {
        dt: 1e-3,
        horizon: 10.0,
    };
    assert_abs_diff_eq!(
        time_to_boundary(&Ball, &z, &fine).unwrap().time,
        1.0,
        epsilon = 1e-10
    );
    let on = time_to_boundary(&Ball, &[1.0, 0.0], &fine).unwrap();
    assert_eq!((on.time, on.point), (0.0, vec![1.0, 0.0]));
    let ext = FlowExtension::new(Ball, NuParams::new(1.0).unwrap());
    let y = ext.apply(&z).unwrap();
    assert!(distance(&y, &[0.0, e * (-4.0f64 / 3.0).exp()]) < 1e-9);
    assert!(Ball.kappa(&y) < 0.0);
}

#[test]
fn quadratic_sublevel_example() {
    let p = OscillatorParams {
        epsilon: 1.0,
        ..Default::default()
    };
    let s = OscillatorScenario::build(OscillatorVariant::Dim4, p).unwrap();
    let q = s.quadratic_extension().unwrap();
    let xi = [2.0, 0.0, 0.0, 2.0];
    let t = q.flow_time(&xi);
    assert_abs_diff_eq!(t, 2f64.ln(), epsilon = 1e-15);
    let nu = NuParams::new(1.0).unwrap();
    let scale = (-t - nu.nu(t)).exp();
    let y = q.apply(&xi).unwrap();
    assert!(distance(&y, &[2.0 * scale, 0.0, 0.0, 2.0 * scale]) < 1e-15);
    let f = s.level_form().value(&y);
    assert!(f * f < 1.0);
    let fine = FlowOptions {
        dt: 1e-3,
        horizon: 100.0,
    };
    assert_abs_diff_eq!(
        time_to_boundary(&q, &xi, &fine).unwrap().time,
        t,
        epsilon = 1e-8
    );
    let zero = [1.0, 0.0, 0.0, 0.0];
    assert_eq!(q.apply(&zero).unwrap(), zero.to_vec());
}

#[test]
fn submersion_sublevel_field() {
    let s = osc(OscillatorVariant::Dim4);
    let samples = vec![vec![0.5, 1.0, -0.3, 0.2], vec![1.0, 0.0, -2.0, 0.0]];
    let sub = submersion_sublevel(s.level_form(), 1.0, &samples).unwrap();
    let xi = [0.5, 1.0, -0.3, 0.2];
    let f = xi[1] * xi[2] - xi[0] * xi[3];
    let df = [-xi[3], xi[2], xi[1], -xi[0]];
    let n2: f64 = df.iter().map(|v| v * v).sum();
    let expected: Vec<f64> = df.iter().map(|d| -f / n2 * d).collect();
    assert!(distance(&sub.chi(&xi).unwrap(), &expected) < 1e-14);
    assert_eq!(sub.chi(&[1.0, 0.0, -2.0, 0.0]).unwrap(), vec![0.0; 4]);
    // along χ the squared residual decays at rate 2
    let grad: Vec<f64> = df.iter().map(|d| 2.0 * f * d).collect();
    let rate = dot(&grad, &sub.chi(&xi).unwrap());
    assert_abs_diff_eq!(rate, -2.0 * f * f, epsilon = 1e-12);
}

#[test]
fn half_space_examples() {
    let s = bio();
    let ext = s.extension().unwrap();
    let p = &s.params;
    let margin = (-p.epsilon).exp();
    let xi1 = 0.5;
    let xi2 = margin * (p.a1 * xi1 + 1.0) - 1.0 - 1e-9;
    assert_eq!(ext.apply(&[xi1, xi2]).unwrap(), vec![xi1, xi2]);
    for a in [-2.0, -0.5, 0.0, 0.004, 0.3, 2.0] {
        for b in [-3.0, 0.0, 0.2, 1.0, 5.0] {
            let y = ext.apply(&[a, b]).unwrap();
            assert!(p.a1 * y[0] > y[1] && y[0] > p.eps1, "{a} {b} -> {y:?}");
        }
    }
}

#[test]
fn saturation_and_gains() {
    assert_eq!(saturate(2.0 * 27.0, 27.0), 27.0);
    assert_eq!(saturate(-100.0, 27.0), -27.0);
    assert_eq!(saturate(3.0, 27.0), 3.0);
    let obs = bio().observer().unwrap();
    assert_abs_diff_eq!(obs.gain[0], 10.0, epsilon = 1e-12);
    assert_abs_diff_eq!(obs.gain[1], 25.0, epsilon = 1e-12);
}

#[test]
fn extended_step_pushes_back_the_raw_step() {
    let s = osc(OscillatorVariant::Dim4);
    let c = CompletionResult::assume(s.immersion4(), PlanarComplement, f64::INFINITY);
    let obs = s.raw_observer4();
    let x = [1.0, 0.0, 2.0];
    let state = [1.0, 0.0, 2.0, 0.0];
    let y = s.plant().output(&x);
    let step = extended_observer_step(&c, &obs, &state, &y, &[], 1e12).unwrap();
    let raw = obs.field(&s.immersion4().eval(&x), &x, &y, &[]);
    let forward = c.jacobian(&state).unwrap().mul_vec(&step.derivative);
    assert!(distance(&forward, &raw) < 1e-10);
    assert_abs_diff_eq!(step.derivative[0], 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(step.derivative[1], -2.0, epsilon = 1e-12);
    assert_eq!(raw, lie_derivative(&s.immersion4(), &s.plant(), &x, &[]));
}

#[test]
fn dim6_complement_jacobians_match_differences() {
    let s = osc(OscillatorVariant::Dim6);
    let comp = s.dim6_map().completion.complement;
    for x in [[0.1, 0.2, 1.0], [0.05, -0.1, -2.0], [1.0, 0.5, 0.3]] {
        let analytic = comp.column_jacobians(&x).unwrap();
        for (k, a) in analytic.iter().enumerate() {
            let fd = jacobian_fd(|p| comp.eval(p).unwrap().column(k), &x, Some(1e-6)).unwrap();
            assert!(fd.sub(a).max_abs() < 1e-7);
        }
    }
}

#[test]
fn parabola_certification() {
    use coordobs::completion::FnComplement;
    #[derive(Clone)]
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
    let comp = FnComplement::new(
        2,
        1,
        |x: &[f64]| Matrix::column_vector(&[-2.0 * x[0], 1.0]),
        |_x: &[f64]| vec![Matrix::from_rows(&[[-2.0], [0.0]])],
    );
    let cert = CertificationBox::new(vec![vec![-1.0], vec![0.0], vec![1.0]], 1.0);
    let c = extend_immersion(Parabola, comp, &cert).unwrap();
    // det = 1 + 4x² − 2w vanishes first at w = 1/2 above the vertex
    assert!(c.w_radius > 0.4 && c.w_radius < 0.5);
}
