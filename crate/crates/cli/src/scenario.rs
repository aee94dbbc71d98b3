use coordobs::numkit::Grid;
use coordobs::scenarios::{
    BioreactorParams, BioreactorScenario, Mode, OscillatorParams, OscillatorScenario,
    OscillatorVariant,
};
use coordobs::{Error, ObserverRun64, Result};

use crate::cli::{ScenarioName, SimArgs, Variant};

/// A validated scenario ready to run.
#[derive(Clone, Debug)]
pub enum Scenario {
    Oscillator(OscillatorScenario<f64>),
    Bioreactor(BioreactorScenario<f64>),
}

/// Unvalidated parameters, so overrides can be applied one by one.
#[derive(Clone, Debug)]
pub enum Params {
    Oscillator(OscillatorVariant, OscillatorParams<f64>),
    Bioreactor(BioreactorParams<f64>),
}

impl Params {
    pub fn defaults(name: ScenarioName, variant: Variant) -> Self {
        match name {
            ScenarioName::Oscillator => {
                let v = match variant {
                    Variant::Dim4 => OscillatorVariant::Dim4,
                    Variant::Dim5 => OscillatorVariant::Dim5,
                    Variant::Dim6 => OscillatorVariant::Dim6,
                };
                Params::Oscillator(v, OscillatorParams::default())
            }
            ScenarioName::Bioreactor => Params::Bioreactor(BioreactorParams::default()),
        }
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match self {
            Params::Oscillator(_, p) => p.set(key, value),
            Params::Bioreactor(p) => p.set(key, value),
        }
    }

    /// Applies `key=value` overrides in order.
    pub fn apply(&mut self, overrides: &[String]) -> Result<()> {
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter {
                    name: item.clone(),
                    reason: "expected KEY=VALUE".into(),
                })?;
            let value: f64 = value.trim().parse().map_err(|_| Error::InvalidParameter {
                name: key.to_string(),
                reason: format!("`{value}` is not a number"),
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        match self {
            Params::Oscillator(_, p) => p.entries(),
            Params::Bioreactor(p) => p.entries(),
        }
    }

    pub fn default_t_final(&self) -> f64 {
        match self {
            Params::Oscillator(..) => 30.0,
            Params::Bioreactor(_) => 40.0,
        }
    }

    pub fn build(self) -> Result<Scenario> {
        match self {
            Params::Oscillator(v, p) => OscillatorScenario::build(v, p).map(Scenario::Oscillator),
            Params::Bioreactor(p) => BioreactorScenario::build(p).map(Scenario::Bioreactor),
        }
    }
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Oscillator(_) => "oscillator",
            Scenario::Bioreactor(_) => "bioreactor",
        }
    }

    pub fn run(&self, mode: Mode, grid: &Grid<f64>) -> Result<ObserverRun64> {
        match self {
            Scenario::Oscillator(s) => s.run(mode, grid),
            Scenario::Bioreactor(s) => s.run(mode, grid),
        }
    }
}

/// Everything needed for one run, resolved from the command line.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: Params,
    pub mode: Mode,
    pub grid: Grid<f64>,
}

impl RunConfig {
    pub fn resolve(name: ScenarioName, variant: Variant, sim: &SimArgs) -> Result<Self> {
        let mut params = Params::defaults(name, variant);
        params.apply(&sim.overrides)?;
        let mode: Mode = sim.mode.parse()?;
        let t_final = sim.t_final.unwrap_or_else(|| params.default_t_final());
        let grid = Grid::new(0.0, t_final, sim.dt)?;
        Ok(Self { params, mode, grid })
    }
}
