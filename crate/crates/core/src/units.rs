//! Physical constants and the two unit systems used across the crate.
//!
//! `Natural` units set ħ = 1 and use the probe width `W` as the length unit,
//! so momenta are measured in ħ/W. The time unit stays the second, which fixes
//! the mass unit at ħ·s/W² and the energy unit at ħ/s.

use core::str::FromStr;

use crate::error::{Error, Result};

/// CODATA 2018 Newtonian constant of gravitation, m³·kg⁻¹·s⁻².
pub const G_SI: f64 = 6.674_30e-11;
/// CODATA 2018 reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Gravitational constant and ħ expressed in one unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub g_newton: f64,
    pub hbar: f64,
}

impl Constants {
    pub const SI: Constants = Constants { g_newton: G_SI, hbar: HBAR_SI };

    /// Constants in natural units for a probe of width `width_si` metres.
    pub fn natural(width_si: f64) -> Result<Self> {
        check_width(width_si)?;
        let w2 = width_si * width_si;
        Ok(Constants { g_newton: G_SI * HBAR_SI / (w2 * w2 * width_si), hbar: 1.0 })
    }

    pub fn for_system(system: UnitSystem, width_si: f64) -> Result<Self> {
        match system {
            UnitSystem::Si => Ok(Self::SI),
            UnitSystem::Natural => Self::natural(width_si),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitSystem {
    Si,
    Natural,
}

impl UnitSystem {
    pub fn as_str(self) -> &'static str {
        match self {
            UnitSystem::Si => "si",
            UnitSystem::Natural => "natural",
        }
    }
}

impl FromStr for UnitSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "si" | "SI" => Ok(UnitSystem::Si),
            "natural" => Ok(UnitSystem::Natural),
            _ => Err(Error::InvalidArgument("unit system must be `si` or `natural`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Momentum,
    Length,
    Time,
    Mass,
    Energy,
}

impl Dimension {
    /// Size of one natural unit of this dimension, in SI.
    fn natural_unit_si(self, width_si: f64) -> f64 {
        match self {
            Dimension::Momentum => HBAR_SI / width_si,
            Dimension::Length => width_si,
            Dimension::Time => 1.0,
            Dimension::Mass => HBAR_SI / (width_si * width_si),
            Dimension::Energy => HBAR_SI,
        }
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "momentum" => Ok(Dimension::Momentum),
            "length" => Ok(Dimension::Length),
            "time" => Ok(Dimension::Time),
            "mass" => Ok(Dimension::Mass),
            "energy" => Ok(Dimension::Energy),
            _ => Err(Error::InvalidArgument("unknown dimension tag")),
        }
    }
}

fn check_width(width_si: f64) -> Result<()> {
    if width_si.is_finite() && width_si > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument("probe width W must be positive and finite"))
    }
}

/// Converts `value` of dimension `dim` between unit systems.
///
/// `width_si` (the probe width in metres) is only consulted when one side is
/// natural.
pub fn convert(value: f64, dim: Dimension, from: UnitSystem, to: UnitSystem, width_si: f64) -> Result<f64> {
    if from == to {
        return Ok(value);
    }
    check_width(width_si)?;
    let unit = dim.natural_unit_si(width_si);
    Ok(match to {
        UnitSystem::Si => value * unit,
        UnitSystem::Natural => value / unit,
    })
}
