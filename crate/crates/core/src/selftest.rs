//! End-to-end checks of the library against its acceptance thresholds.
//!
//! Each check returns a [`Check`] instead of panicking, so the same code
//! backs the acceptance test target and the `selftest` CLI subcommand.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::completion::{
    complete_minors, complete_parallelizable_4, Complement, CoordinateMap, Immersion,
};
use crate::dynsys::{lie_derivative, ControlledSystem};
use crate::extension::{
    hausdorff_gap, ConditionC, FlowExtension, FlowOptions, Halfspace, HalfspaceForm,
    ImageExtension, NuParams,
};
use crate::numkit::vector::{distance, max_abs, sub};
use crate::numkit::{
    determinant, gain_equation, gain_equation_residual, highgain_gain, integrate_fixed_step, Grid,
    Matrix,
};
use crate::observer::{estimation_error, RawObserver};
use crate::scenarios::{
    wazewski_preset, BioreactorParams, BioreactorScenario, Bump, BumpProfile, Mode,
    OscillatorImmersion5, OscillatorParams, OscillatorScenario, OscillatorVariant,
};
use crate::{Error, Result};

const SEED: u64 = 0x5eed_c0de;

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from_result(name: &'static str, r: Result<std::result::Result<String, String>>) -> Self {
        match r {
            Ok(Ok(detail)) => Check {
                name,
                passed: true,
                detail,
            },
            Ok(Err(detail)) => Check {
                name,
                passed: false,
                detail,
            },
            Err(e) => Check {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

type Outcome = Result<std::result::Result<String, String>>;

fn verdict(ok: bool, detail: String) -> Outcome {
    Ok(if ok { Ok(detail) } else { Err(detail) })
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

fn uniform(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|e| format!("{e:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed())
}

fn bioreactor() -> Result<BioreactorScenario<f64>> {
    BioreactorScenario::build(BioreactorParams::default())
}

fn oscillator(variant: OscillatorVariant, ell: f64) -> Result<OscillatorScenario<f64>> {
    let params = OscillatorParams {
        ell,
        ..OscillatorParams::default()
    };
    OscillatorScenario::build(variant, params)
}

/// Bioreactor: the unextended observer escapes in finite time, the extended
/// one completes `[0, 40]` and converges below `1e-4`, each within 5 s.
pub fn bioreactor_escape() -> Check {
    Check::from_result(
        "bioreactor escape vs completeness",
        (|| {
            let s = bioreactor()?;
            let grid = Grid::new(0.0, 40.0, 1e-3)?;
            let (raw, t_raw) = timed(|| s.run(Mode::RawOriginal, &grid));
            let (ext, t_ext) = timed(|| s.run(Mode::Extended, &grid));
            let (raw, ext) = (raw?, ext?);
            let escape = raw.truncation.as_ref().filter(|tr| {
                tr.t < 40.0
                    && matches!(
                        tr.reason,
                        Error::SingularMatrix { .. } | Error::NonFiniteField { .. }
                    )
            });
            let final_error = *ext.err_state.last().expect("non-empty run");
            let budget = Duration::from_secs(5);
            verdict(
            escape.is_some() && ext.completed() && final_error <= 1e-4 && t_raw <= budget && t_ext <= budget,
            format!(
                "raw_original stops at t={:?} ({}); extended completed={} |x-xhat|(40)={final_error:.3e}; runtimes {:.2?}/{:.2?}",
                raw.truncation.as_ref().map(|t| t.t),
                raw.truncation.as_ref().map_or("none".to_string(), |t| t.reason.code().to_string()),
                ext.completed(),
                t_raw,
                t_ext
            ),
        )
        })(),
    )
}

/// The extended run mapped through the extended immersion shadows the
/// image-coordinate run within `1e-6`.
pub fn raw_dynamics_preserved() -> Check {
    Check::from_result(
        "raw-dynamics preservation",
        (|| {
            let s = bioreactor()?;
            let grid = Grid::new(0.0, 40.0, 1e-3)?;
            let ext = s.run(Mode::Extended, &grid)?;
            let raw = s.run(Mode::RawImage, &grid)?;
            let map = s.extended_map()?;
            let mut sup = 0.0f64;
            for (x_hat, xi) in ext.observer.iter().zip(&raw.observer) {
                sup = sup.max(max_abs(&sub(&map.eval(x_hat)?, xi)));
            }
            verdict(
                ext.completed() && raw.completed() && sup <= 1e-6,
                format!("sup-norm gap {sup:.3e} over {} nodes", ext.len()),
            )
        })(),
    )
}

/// Dimension-6 oscillator observer over the gain sweep `{5, 10, 20}`.
pub fn oscillator_dim6_sweep() -> Check {
    // Errors below this level are rounding noise and are not ordered.
    const FLOOR: f64 = 1e-12;
    Check::from_result(
        "oscillator dim6 gain sweep",
        (|| {
            let grid = Grid::new(0.0, 20.0, 1e-3)?;
            let (runs, elapsed) = timed(|| {
                [5.0, 10.0, 20.0]
                    .iter()
                    .map(|&ell| {
                        oscillator(OscillatorVariant::Dim6, ell)?.run(Mode::Extended, &grid)
                    })
                    .collect::<Result<Vec<_>>>()
            });
            let runs = runs?;
            let errors: Vec<f64> = runs
                .iter()
                .map(|r| *r.err_state.last().expect("non-empty run"))
                .collect();
            let complete = runs.iter().all(|r| r.completed());
            let monotone = errors.windows(2).all(|w| w[1] <= w[0].max(FLOOR));
            let times: Vec<Option<f64>> = runs
                .iter()
                .map(|r| estimation_error(r, 1e-3).time_to)
                .collect();
            verdict(
                complete && errors[2] <= 1e-3 && monotone && elapsed <= Duration::from_secs(10),
                format!(
                    "errors at t=20 {}, time to 1e-3 {times:.3?}, runtime {elapsed:.2?}",
                    sci(&errors)
                ),
            )
        })(),
    )
}

/// Completion presets certified on their grids, minors identity, and
/// orthogonality of the parallelizable completion.
pub fn completion_certification(samples: usize) -> Check {
    Check::from_result(
        "completion certification",
        (|| {
            let mut notes = Vec::new();
            let mut ok = true;

            let osc = oscillator(OscillatorVariant::Dim4, 5.0)?;
            let grid = osc.admissible_samples();
            let mut min_det = f64::INFINITY;
            let mut minors_gap = 0.0f64;
            for x in &grid {
                let j = osc.immersion4().jacobian(x);
                let gamma = complete_minors(&j)?;
                let det = determinant(&j.hstack(&Matrix::column_vector(&gamma)));
                minors_gap = minors_gap.max((det - gamma.iter().map(|g| g * g).sum::<f64>()).abs());
                min_det = min_det.min(det.abs());
            }
            ok &= min_det > 0.0 && minors_gap <= 1e-10;
            notes.push(format!(
                "minors min|det| {min_det:.3e} gap {minors_gap:.1e}"
            ));

            let mut rng = rng();
            let mut ortho = 0.0f64;
            for _ in 0..samples {
                let z = uniform(&mut rng, 4, -1.0, 1.0);
                let m = complete_parallelizable_4(&z)?;
                let n2: f64 = z.iter().map(|v| v * v).sum();
                let defect = (&m.transpose() * &m)
                    .sub(&Matrix::identity(4).scaled(n2))
                    .max_abs();
                ortho = ortho.max(defect);
            }
            let mut min_par = f64::INFINITY;
            let axis = [-1.0f64, -0.5, 0.5, 1.0];
            for a in axis {
                for b in axis {
                    for c in axis {
                        for d in axis {
                            let m = complete_parallelizable_4(&[a, b, c, d])?;
                            min_par = min_par.min(determinant(&m).abs());
                        }
                    }
                }
            }
            ok &= ortho <= 1e-12 && min_par > 0.0;
            notes.push(format!(
                "parallelizable min|det| {min_par:.3e} MtM defect {ortho:.1e}"
            ));

            let sub_map = osc.submersion_completion()?;
            let r = 0.99 * sub_map.w_radius;
            let mut min_sub = f64::INFINITY;
            for x in &grid {
                for w in [-r, 0.0, r] {
                    let s: Vec<f64> = x.iter().copied().chain([w]).collect();
                    min_sub = min_sub.min(determinant(&sub_map.jacobian(&s)?).abs());
                }
            }
            ok &= min_sub > 0.0;
            notes.push(format!("submersion min|det| {min_sub:.3e} (|w| <= {r:.2})"));

            let wz = wazewski_preset(1.0, 0.5)?;
            let imm5 = OscillatorImmersion5 {
                bump: Bump {
                    profile: BumpProfile::Unit,
                    r: 1.0,
                },
                varsigma: 1.0,
            };
            let mut min_wz = f64::INFINITY;
            for x1 in linspace(-2.0, 2.0, 9) {
                for x2 in linspace(-2.0, 2.0, 9) {
                    for x3 in [-1.0, 0.5, 1.0, 2.5] {
                        let x = [x1, x2, x3];
                        let full = imm5.jacobian(&x).hstack(&wz.eval(&x)?);
                        min_wz = min_wz.min(determinant(&full).abs());
                    }
                }
            }
            ok &= min_wz > 0.0;
            notes.push(format!("wazewski min|det| {min_wz:.3e}"));
            verdict(ok, notes.join("; "))
        })(),
    )
}

fn outside_samples(
    rng: &mut ChaCha8Rng,
    cond: &impl ConditionC<f64>,
    n: usize,
    lo: f64,
    hi: f64,
) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = uniform(rng, cond.dim(), lo, hi);
        if cond.kappa(&z) > 0.0 {
            out.push(z);
        }
    }
    out
}

/// Closed-form and generic image extensions: exact identity on the core,
/// images inside the set, roundtrips, agreement, and the Hausdorff bound.
pub fn image_extension_suite(samples: usize) -> Check {
    Check::from_result(
        "image-extension suite",
        (|| {
            let mut rng = rng();
            let mut ok = true;
            let mut notes = Vec::new();

            let osc = oscillator(OscillatorVariant::Dim4, 5.0)?;
            let quad = osc.quadratic_extension()?;
            let eps = quad.params().epsilon();
            let generic = FlowExtension::new(quad.clone(), *quad.params());
            let (mut core_exact, mut inside, mut rt_closed, mut rt_generic, mut agree) =
                (true, true, 0.0f64, 0.0f64, 0.0f64);
            let mut cores = 0;
            for k in 0..samples {
                let z = uniform(&mut rng, 4, -3.0, 3.0);
                let y = quad.apply(&z)?;
                if quad.flow_time(&z) <= -eps {
                    cores += 1;
                    core_exact &= y == z && generic.apply(&z)? == z;
                }
                inside &= quad.kappa(&y) < 0.0;
                rt_closed = rt_closed.max(distance(&quad.inverse(&y)?, &z));
                if k % 4 == 0 {
                    let yg = generic.apply(&z)?;
                    agree = agree.max(distance(&yg, &y));
                    rt_generic = rt_generic.max(distance(&generic.inverse(&yg)?, &z));
                }
            }
            ok &= core_exact
                && inside
                && rt_closed <= 1e-9
                && rt_generic <= 1e-6
                && agree <= 1e-6
                && cores > 0;
            notes.push(format!(
            "quadratic: {cores} core pts exact={core_exact}, inside={inside}, roundtrip {rt_closed:.1e}/{rt_generic:.1e}, closed vs generic {agree:.1e}"
        ));

            let bio = bioreactor()?;
            let chain = bio.extension()?;
            let p = &bio.params;
            let margin = (-p.epsilon).exp();
            let (mut core_exact, mut inside, mut rt) = (true, true, 0.0f64);
            for _ in 0..samples {
                let z = uniform(&mut rng, 2, -1.0, 1.0);
                let y = chain.apply(&z)?;
                inside &= y[0] > p.eps1 && y[1] < p.a1 * y[0];
                rt = rt.max(distance(&chain.inverse(&y)?, &z));
                let c = [rng.gen_range(1.0 - (1.0 - p.eps1) * margin..1.0), 0.0];
                let upper = p.a1 * c[0];
                let core = [
                    c[0],
                    rng.gen_range(-1.0..upper - (upper + 1.0) * (1.0 - margin)),
                ];
                core_exact &= chain.apply(&core)? == core.to_vec();
            }
            let first = Halfspace::new(
                2,
                0,
                HalfspaceForm::LowerBound {
                    bound: p.eps1,
                    attractor: 1.0,
                },
                NuParams::new(p.epsilon)?,
            )?;
            let flow_first = FlowExtension::new(first.clone(), NuParams::new(p.epsilon)?);
            let mut agree_h = 0.0f64;
            for _ in 0..samples / 10 {
                let z = uniform(&mut rng, 2, -1.0, 1.0);
                agree_h = agree_h.max(distance(&first.apply(&z)?, &flow_first.apply(&z)?));
            }
            ok &= core_exact && inside && rt <= 1e-9 && agree_h <= 1e-6;
            notes.push(format!(
            "half-spaces: core exact={core_exact}, inside={inside}, roundtrip {rt:.1e}, closed vs generic {agree_h:.1e}"
        ));

            let outside = outside_samples(&mut rng, &quad, 64, -3.0, 3.0);
            let gap = hausdorff_gap(
                &quad,
                quad.params(),
                &outside,
                &FlowOptions::for_layer(quad.params()),
            )?;
            let outside_h = outside_samples(&mut rng, &first, 64, -1.0, 1.0);
            let gap_h = hausdorff_gap(
                &first,
                first.params(),
                &outside_h,
                &FlowOptions::for_layer(first.params()),
            )?;
            ok &= gap.distance <= gap.bound && gap_h.distance <= gap_h.bound;
            notes.push(format!(
                "hausdorff {:.3e} <= {:.3e}, {:.3e} <= {:.3e}",
                gap.distance, gap.bound, gap_h.distance, gap_h.bound
            ));
            verdict(ok, notes.join("; "))
        })(),
    )
}

fn oscillator_admissible(rng: &mut ChaCha8Rng, r: f64) -> Vec<f64> {
    let rho = rng.gen_range(1.0 / r..r) * 0.999 + 0.0005;
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    vec![
        rho.sqrt() * angle.cos(),
        rho.sqrt() * angle.sin(),
        rng.gen_range(0.001..r * 0.999),
    ]
}

/// With zero innovation the raw observer field reproduces the image
/// dynamics; started on the true state, the observer stays on the image.
pub fn zero_innovation(samples: usize) -> Check {
    Check::from_result(
        "zero-innovation consistency",
        (|| {
            let mut rng = rng();
            let osc = oscillator(OscillatorVariant::Dim6, 5.0)?;
            let plant = osc.plant();
            let imm = osc.immersion6();
            let obs = osc.raw_observer6();
            let osc4 = oscillator(OscillatorVariant::Dim4, 5.0)?;
            let obs4 = osc4.raw_observer4();
            let mut gap_osc = 0.0f64;
            for _ in 0..samples {
                let x = oscillator_admissible(&mut rng, osc.params.r);
                let y = plant.output(&x);
                let lf = lie_derivative(&imm, &plant, &x, &[]);
                gap_osc = gap_osc.max(max_abs(&sub(&obs.field(&imm.eval(&x), &x, &y, &[]), &lf)));
                let lf4 = lie_derivative(&osc4.immersion4(), &osc4.plant(), &x, &[]);
                let xi4 = osc4.immersion4().eval(&x);
                gap_osc = gap_osc.max(max_abs(&sub(&obs4.field(&xi4, &x, &y[..1], &[]), &lf4)));
            }

            let bio = bioreactor()?;
            let bplant = bio.plant();
            let bimm = bio.immersion();
            let bobs = bio.observer()?;
            let mut gap_bio = 0.0f64;
            let mut count = 0;
            while count < samples {
                let x = uniform(&mut rng, 2, 0.006, 0.5);
                if !bplant.is_admissible(&x) {
                    continue;
                }
                count += 1;
                let u = bplant.input(rng.gen_range(0.0..40.0));
                let lf = lie_derivative(&bimm, &bplant, &x, &u);
                gap_bio = gap_bio.max(max_abs(&sub(
                    &bobs.field(&bimm.eval(&x), &x, &bplant.output(&x), &u),
                    &lf,
                )));
            }

            let on_manifold_osc = {
                let params = OscillatorParams {
                    xhat0: osc.params.x0,
                    ..osc.params.clone()
                };
                let s = OscillatorScenario::build(OscillatorVariant::Dim6, params)?;
                let run = s.run(Mode::Extended, &Grid::new(0.0, 20.0, 1e-3)?)?;
                (
                    run.completed(),
                    run.err_image.iter().copied().fold(0.0, f64::max),
                )
            };
            let on_manifold_bio = {
                let params = BioreactorParams {
                    xhat0: bio.params.x0,
                    ..bio.params.clone()
                };
                let s = BioreactorScenario::build(params)?;
                let run = s.run(Mode::Extended, &Grid::new(0.0, 40.0, 1e-3)?)?;
                (
                    run.completed(),
                    run.err_image.iter().copied().fold(0.0, f64::max),
                )
            };
            verdict(
            gap_osc <= 1e-10
                && gap_bio <= 1e-10
                && on_manifold_osc.0
                && on_manifold_bio.0
                && on_manifold_osc.1 <= 1e-6
                && on_manifold_bio.1 <= 1e-6,
            format!(
                "field gaps {gap_osc:.1e} (oscillator) {gap_bio:.1e} (bioreactor); image error on the manifold {:.1e} / {:.1e}",
                on_manifold_osc.1, on_manifold_bio.1
            ),
        )
        })(),
    )
}

/// Gain equation residual and the second-order closed form.
pub fn gain_equation_check() -> Check {
    Check::from_result(
        "gain equation",
        (|| {
            let mut residual = 0.0f64;
            let mut gain_gap = 0.0f64;
            for ell in [1.0, 5.0, 10.0] {
                for n in 1..=6 {
                    residual = residual.max(gain_equation_residual(&gain_equation(n, ell)?, ell));
                }
                let k = highgain_gain(2, ell)?;
                gain_gap = gain_gap
                    .max(((k[0] - 2.0 * ell) / (2.0 * ell)).abs())
                    .max(((k[1] - ell * ell) / (ell * ell)).abs());
            }
            verdict(
                residual <= 1e-12 && gain_gap <= 1e-12,
                format!("max residual {residual:.1e}, relative gain gap {gain_gap:.1e}"),
            )
        })(),
    )
}

/// Observed order of the fixed-step integrator on `ẋ = −x`.
pub fn integrator_order() -> Check {
    Check::from_result(
        "integrator order",
        (|| {
            let errors = [0.2, 0.1, 0.05]
                .iter()
                .map(|&h| {
                    let run = integrate_fixed_step(
                        |_t, x: &[f64]| Ok(vec![-x[0]]),
                        &[1.0],
                        &Grid::new(0.0, 2.0, h)?,
                    )?;
                    Ok((run.last()[0] - (-2.0f64).exp()).abs())
                })
                .collect::<Result<Vec<f64>>>()?;
            let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
            let worst = orders.iter().copied().fold(f64::INFINITY, f64::min);
            verdict(
                worst >= 3.8,
                format!("errors {}, observed orders {orders:.3?}", sci(&errors)),
            )
        })(),
    )
}

/// All acceptance checks in order; `samples` scales the sampled suites.
pub fn run_all(samples: usize) -> Vec<Check> {
    vec![
        bioreactor_escape(),
        raw_dynamics_preserved(),
        oscillator_dim6_sweep(),
        completion_certification(samples),
        image_extension_suite(samples),
        zero_innovation(samples / 10),
        gain_equation_check(),
        integrator_order(),
    ]
}
