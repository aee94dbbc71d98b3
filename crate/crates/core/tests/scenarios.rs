//! Simulation-level checks of the wired scenarios.

use coordobs::completion::Immersion;
use coordobs::numkit::Grid;
use coordobs::observer::{
    cascade_simulate, estimation_error, CascadeOptions, Constraint, Realization,
};
use coordobs::scenarios::{
    BioreactorParams, BioreactorScenario, Mode, OscillatorParams, OscillatorScenario,
    OscillatorVariant,
};
use coordobs::Error;

fn grid(t_final: f64) -> Grid<f64> {
    Grid::new(0.0, t_final, 1e-3).unwrap()
}

#[test]
fn raw_oscillator_converges_from_zero() {
    let params = OscillatorParams {
        ell: 10.0,
        ..OscillatorParams::default()
    };
    let s = OscillatorScenario::build(OscillatorVariant::Dim4, params).unwrap();
    let run = s.run(Mode::RawImage, &grid(20.0)).unwrap();
    assert!(run.completed());
    assert!(*run.err_image.last().unwrap() < 1e-3);
}

#[test]
fn observer_started_on_the_image_stays_there() {
    let params = OscillatorParams {
        xhat0: [1.0, 0.0, 1.0],
        ..OscillatorParams::default()
    };
    let s = OscillatorScenario::build(OscillatorVariant::Dim6, params).unwrap();
    let run = s.run(Mode::Extended, &grid(10.0)).unwrap();
    assert!(run.err_image.iter().all(|&e| e <= 1e-6));
    let summary = estimation_error(&run, 1e-3);
    assert_eq!(summary.final_error, 0.0);
    assert_eq!(summary.time_to, Some(0.0));
}

#[test]
fn bioreactor_modes() {
    let s = BioreactorScenario::build(BioreactorParams::default()).unwrap();
    let raw = s.run(Mode::RawOriginal, &grid(40.0)).unwrap();
    let tr = raw.truncation.as_ref().expect("raw_original escapes");
    assert!(matches!(
        tr.reason,
        Error::SingularMatrix { .. } | Error::NonFiniteField { .. }
    ));
    let summary = estimation_error(&raw, 1e-4);
    assert!(summary.truncated);
    assert_eq!(summary.truncation_time, Some(tr.t));
    assert_eq!(*raw.times.last().unwrap(), tr.t);

    for mode in [Mode::Extended, Mode::Combined] {
        let run = s.run(mode, &grid(40.0)).unwrap();
        assert!(run.completed(), "{mode}");
        assert!(*run.err_state.last().unwrap() <= 1e-4, "{mode}");
        assert!(run.min_abs_det.unwrap() > 0.0);
    }
}

/// Largest constraint value reached by the modified observer integrated in
/// image coordinates.
fn max_kappa(gamma: f64) -> f64 {
    let params = BioreactorParams {
        gamma,
        ..BioreactorParams::default()
    };
    let s = BioreactorScenario::build(params).unwrap();
    let obs = s.modified_observer().unwrap();
    let imm = s.immersion();
    let passthrough = |xi: &[f64]| Ok(xi.to_vec());
    let real = Realization::Raw {
        observer: &obs,
        estimate: &passthrough,
    };
    let xi0 = imm.eval(&s.params.xhat0);
    let run = cascade_simulate(
        &s.plant(),
        &imm,
        &s.params.x0,
        &real,
        &xi0,
        &grid(40.0),
        &CascadeOptions::default(),
    )
    .unwrap();
    assert!(run.completed());
    run.observer
        .iter()
        .flat_map(|xi| s.constraints().into_iter().map(move |c| c.value(xi)))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn modifier_margin_shrinks_with_gain() {
    let margins: Vec<f64> = [10.0, 100.0, 1000.0].into_iter().map(max_kappa).collect();
    assert!(margins.windows(2).all(|w| w[1] < w[0]), "{margins:?}");
}

#[test]
fn unsupported_modes_are_reported() {
    let s =
        OscillatorScenario::build(OscillatorVariant::Dim6, OscillatorParams::default()).unwrap();
    assert!(matches!(
        s.run(Mode::Combined, &grid(1.0)),
        Err(Error::UnsupportedMode(_))
    ));
}

#[test]
fn f32_scenario_runs() {
    let s = OscillatorScenario::<f32>::build(OscillatorVariant::Dim6, OscillatorParams::default())
        .unwrap();
    let run = s
        .run(Mode::Extended, &Grid::new(0.0f32, 10.0, 1e-2).unwrap())
        .unwrap();
    assert!(run.completed());
    assert!(*run.err_state.last().unwrap() < 1e-2);
}
