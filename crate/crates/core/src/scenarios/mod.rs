//! The two worked systems: a harmonic oscillator with unknown frequency
//! and a bioreactor, wired to their immersions, completions, extensions
//! and observers.

mod bioreactor;
mod oscillator;

pub use bioreactor::{
    BioreactorExtension, BioreactorImmersion, BioreactorObserver, BioreactorParams,
    BioreactorPlant, BioreactorScenario,
};
pub use oscillator::{
    wazewski_preset, Bump, BumpProfile, Dim6Complement, HighGain4, HighGain6, OscillatorDim6Map,
    OscillatorImmersion4, OscillatorImmersion5, OscillatorImmersion6, OscillatorParams,
    OscillatorPlant, OscillatorScenario, OscillatorVariant, PlanarComplement,
};

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Coordinate realization of a scenario run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Observer integrated in image coordinates.
    RawImage,
    /// Observer moved to original coordinates with the unextended map.
    RawOriginal,
    /// Observer moved to original coordinates through the extended map.
    Extended,
    /// Unextended map with the convexity modification of the raw field.
    ExtendedWithModifier,
    /// Extended map and convexity modification together.
    Combined,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::RawImage,
        Mode::RawOriginal,
        Mode::Extended,
        Mode::ExtendedWithModifier,
        Mode::Combined,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::RawImage => "raw_image",
            Mode::RawOriginal => "raw_original",
            Mode::Extended => "extended",
            Mode::ExtendedWithModifier => "extended_with_modifier",
            Mode::Combined => "combined",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid("mode", format!("unknown mode `{s}`")))
    }
}

/// Writes `value` into the parameter named `key` of a flat parameter list.
pub(crate) fn assign<T: Copy>(slots: &mut [(&str, &mut T)], key: &str, value: T) -> Result<()> {
    match slots.iter_mut().find(|(k, _)| *k == key) {
        Some((_, slot)) => {
            **slot = value;
            Ok(())
        }
        None => {
            let known: Vec<&str> = slots.iter().map(|(k, _)| *k).collect();
            Err(Error::invalid(
                key,
                format!("unknown key; expected one of {}", known.join(", ")),
            ))
        }
    }
}

pub(crate) fn require(cond: bool, name: &str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(name, reason))
    }
}
