//! Physical parameter engine: gravitational branch kicks, the
//! signal-to-uncertainty ratio, wavepacket spreading time, closed-form
//! single-parameter inversion and parameter sweeps.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::protocol::{phase_matched_probability, SourceState};
use crate::units::{convert, Constants, Dimension, UnitSystem};
#[allow(unused_imports)]
use num_traits::Float as _;

/// Source–probe distance, in probe widths, below which the point-mass kick
/// model is flagged as questionable.
pub const SEPARATION_WIDTHS: f64 = 10.0;

/// Momentum kick G·M·m·T/x² from a source at distance `x`.
pub fn delta_kick(c: &Constants, source_mass: f64, probe_mass: f64, time: f64, x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidArgument("branch distance must be positive"));
    }
    Ok(c.g_newton * source_mass * probe_mass * time / (x * x))
}

/// Time m·W²/(2ħ) after release at which a free Gaussian's position width
/// has grown by √2.
pub fn spreading_time(c: &Constants, probe_mass: f64, width: f64) -> Result<f64> {
    if !(probe_mass > 0.0 && width > 0.0 && probe_mass.is_finite() && width.is_finite()) {
        return Err(Error::InvalidArgument("probe mass and width must be positive"));
    }
    Ok(probe_mass * width * width / (2.0 * c.hbar))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// M, kg.
    pub source_mass: f64,
    /// m, kg.
    pub probe_mass: f64,
    /// Interaction time T; `None` means the probe spreading time.
    pub time: Option<f64>,
    pub x_a: f64,
    pub x_b: f64,
    /// Probe position width W.
    pub width: f64,
    /// Target weak-value amplification g.
    pub gain: f64,
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.source_mass) && positive(self.probe_mass) && positive(self.width)) {
            return Err(Error::InvalidArgument("masses and width must be positive"));
        }
        if !(positive(self.x_a) && positive(self.x_b)) {
            return Err(Error::InvalidArgument("branch distances must be positive"));
        }
        if !(self.x_b > self.x_a) {
            return Err(Error::InvalidArgument("x_B must exceed x_A"));
        }
        if let Some(t) = self.time {
            if !positive(t) {
                return Err(Error::InvalidArgument("interaction time must be positive"));
            }
        }
        if !(self.gain.is_finite() && self.gain >= 0.0) {
            return Err(Error::InvalidArgument("gain must be non-negative"));
        }
        Ok(())
    }

    pub fn resolved_time(&self, c: &Constants) -> Result<f64> {
        match self.time {
            Some(t) => Ok(t),
            None => spreading_time(c, self.probe_mass, self.width),
        }
    }

    pub fn get(&self, field: ParamField) -> Option<f64> {
        Some(match field {
            ParamField::SourceMass => self.source_mass,
            ParamField::ProbeMass => self.probe_mass,
            ParamField::Time => return self.time,
            ParamField::XA => self.x_a,
            ParamField::XB => self.x_b,
            ParamField::Width => self.width,
            ParamField::Gain => self.gain,
        })
    }

    pub fn with(mut self, field: ParamField, value: f64) -> Self {
        match field {
            ParamField::SourceMass => self.source_mass = value,
            ParamField::ProbeMass => self.probe_mass = value,
            ParamField::Time => self.time = Some(value),
            ParamField::XA => self.x_a = value,
            ParamField::XB => self.x_b = value,
            ParamField::Width => self.width = value,
            ParamField::Gain => self.gain = value,
        }
        self
    }

    /// Re-expresses SI parameters in natural units of a probe with width
    /// `width_si`. Pair with [`Constants::natural`].
    pub fn to_natural(&self, width_si: f64) -> Result<Self> {
        let cv = |v: f64, d| convert(v, d, UnitSystem::Si, UnitSystem::Natural, width_si);
        Ok(ProtocolParams {
            source_mass: cv(self.source_mass, Dimension::Mass)?,
            probe_mass: cv(self.probe_mass, Dimension::Mass)?,
            time: self.time.map(|t| cv(t, Dimension::Time)).transpose()?,
            x_a: cv(self.x_a, Dimension::Length)?,
            x_b: cv(self.x_b, Dimension::Length)?,
            width: cv(self.width, Dimension::Length)?,
            gain: self.gain,
        })
    }

    pub fn to_si(&self, width_si: f64) -> Result<Self> {
        let cv = |v: f64, d| convert(v, d, UnitSystem::Natural, UnitSystem::Si, width_si);
        Ok(ProtocolParams {
            source_mass: cv(self.source_mass, Dimension::Mass)?,
            probe_mass: cv(self.probe_mass, Dimension::Mass)?,
            time: self.time.map(|t| cv(t, Dimension::Time)).transpose()?,
            x_a: cv(self.x_a, Dimension::Length)?,
            x_b: cv(self.x_b, Dimension::Length)?,
            width: cv(self.width, Dimension::Length)?,
            gain: self.gain,
        })
    }
}

/// Named parameter, as used by `solve_parameter` and sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamField {
    SourceMass,
    ProbeMass,
    Time,
    XA,
    XB,
    Width,
    Gain,
}

impl ParamField {
    pub const ALL: [ParamField; 7] = [
        ParamField::SourceMass,
        ParamField::ProbeMass,
        ParamField::Time,
        ParamField::XA,
        ParamField::XB,
        ParamField::Width,
        ParamField::Gain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamField::SourceMass => "M",
            ParamField::ProbeMass => "m",
            ParamField::Time => "T",
            ParamField::XA => "xA",
            ParamField::XB => "xB",
            ParamField::Width => "W",
            ParamField::Gain => "g",
        }
    }
}

impl fmt::Display for ParamField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "M" => ParamField::SourceMass,
            "m" => ParamField::ProbeMass,
            "T" => ParamField::Time,
            "xA" | "x_A" => ParamField::XA,
            "xB" | "x_B" => ParamField::XB,
            "W" => ParamField::Width,
            "g" => ParamField::Gain,
            _ => return Err(Error::InvalidArgument("unknown parameter field (expected M, m, T, xA, xB, W or g)")),
        })
    }
}

/// δ_ef/Δp = −g·G·M·m·W·T/(ħ·x_A²).
pub fn feasibility_ratio(params: &ProtocolParams, c: &Constants) -> Result<f64> {
    params.validate()?;
    let t = params.resolved_time(c)?;
    let p = params;
    Ok(-p.gain * c.g_newton * p.source_mass * p.probe_mass * p.width * t / (c.hbar * p.x_a * p.x_a))
}

/// Inverts the ratio monomial for `unknown` so that |ratio| = |target|. The
/// current value of `unknown` in `params` is ignored. When `params.time` is
/// `None` the time follows m·W²/(2ħ), so m and W enter as m² and W³.
pub fn solve_parameter(params: &ProtocolParams, unknown: ParamField, target: f64, c: &Constants) -> Result<f64> {
    if unknown == ParamField::XB {
        return Err(Error::InvalidArgument("x_B does not enter the feasibility ratio"));
    }
    if !target.is_finite() {
        return Err(Error::InvalidArgument("target ratio must be finite"));
    }
    if target == 0.0 {
        return Err(Error::NoSolution("ratio vanishes only at zero parameters"));
    }
    let spreading = params.time.is_none();
    let exponent = match unknown {
        ParamField::XA => -2.0,
        ParamField::ProbeMass if spreading => 2.0,
        ParamField::Width if spreading => 3.0,
        _ => 1.0,
    };
    let mut unit = params.with(unknown, 1.0);
    if unknown == ParamField::Time {
        unit.time = Some(1.0);
    }
    if unknown == ParamField::XA {
        // keep x_B > x_A while evaluating the unit monomial
        unit.x_b = f64::MAX;
    }
    let base = feasibility_ratio(&unit, c)?.abs();
    if base == 0.0 {
        return Err(Error::NoSolution("remaining parameters make the ratio vanish"));
    }
    let value = (target.abs() / base).powf(1.0 / exponent);
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::NoSolution("inversion left the positive reals"));
    }
    Ok(value)
}

/// Real amplitudes (α, β) whose first-order kick is δ_ef = −g·δ_A, for
/// kick contrast `kick_ratio` = δ_A/δ_B > 1.
///
/// Solving (βδ_B − αδ_A)/(β − α) = −gδ_A gives β/α = (1 + g)/(1/r + g).
pub fn amplitudes_for_gain(gain: f64, kick_ratio: f64) -> Result<SourceState> {
    if !(gain.is_finite() && gain >= 0.0) {
        return Err(Error::InvalidArgument("gain must be non-negative"));
    }
    if !(kick_ratio > 1.0) {
        return Err(Error::InvalidArgument("kick ratio δ_A/δ_B must exceed 1"));
    }
    let t = (1.0 + gain) / (kick_ratio.recip() + gain);
    let alpha = (1.0 + t * t).sqrt().recip();
    SourceState::real(alpha, t * alpha)
}

/// One fully evaluated parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityCase {
    /// Parameters with the interaction time resolved.
    pub params: ProtocolParams,
    pub delta_a: f64,
    pub delta_b: f64,
    pub ratio: f64,
    pub tau: f64,
    pub postselect_probability: f64,
    /// `false` when x_A < 10 W, i.e. the point-kick model is stretched.
    pub separation_ok: bool,
}

pub fn evaluate_case(params: &ProtocolParams, c: &Constants) -> Result<FeasibilityCase> {
    params.validate()?;
    let time = params.resolved_time(c)?;
    let resolved = ProtocolParams { time: Some(time), ..*params };
    let delta_a = delta_kick(c, params.source_mass, params.probe_mass, time, params.x_a)?;
    let delta_b = delta_kick(c, params.source_mass, params.probe_mass, time, params.x_b)?;
    let source = amplitudes_for_gain(params.gain, (params.x_b / params.x_a).powi(2))?;
    let dp = c.hbar / params.width;
    let spread = (delta_a - delta_b) / dp;
    let overlap = (-spread * spread / 8.0).exp();
    Ok(FeasibilityCase {
        params: resolved,
        delta_a,
        delta_b,
        ratio: feasibility_ratio(&resolved, c)?,
        tau: spreading_time(c, params.probe_mass, params.width)?,
        postselect_probability: phase_matched_probability(source.amp_a().re, source.amp_b().re, overlap),
        separation_ok: params.x_a >= SEPARATION_WIDTHS * params.width,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub field: ParamField,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(field: ParamField, start: f64, stop: f64, count: usize) -> Self {
        Axis { field, start, stop, count, spacing: Spacing::Linear }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count < 2 {
            return Err(Error::InvalidArgument("sweep axes need at least 2 points"));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidArgument("sweep bounds must be finite"));
        }
        let last = (self.count - 1) as f64;
        match self.spacing {
            Spacing::Linear => {
                Ok((0..self.count).map(|i| self.start + (self.stop - self.start) * i as f64 / last).collect())
            }
            Spacing::Log => {
                if !(self.start > 0.0 && self.stop > 0.0) {
                    return Err(Error::InvalidArgument("log axes need positive bounds"));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                Ok((0..self.count).map(|i| (a + (b - a) * i as f64 / last).exp()).collect())
            }
        }
    }
}

/// Parameter points of a 1- or 2-axis grid in row-major order (first axis
/// outermost).
pub fn sweep_points(base: &ProtocolParams, axes: &[Axis]) -> Result<Vec<ProtocolParams>> {
    match axes {
        [a] => Ok(a.values()?.into_iter().map(|v| base.with(a.field, v)).collect()),
        [a, b] => {
            if a.field == b.field {
                return Err(Error::InvalidArgument("sweep axes must name distinct fields"));
            }
            let (va, vb) = (a.values()?, b.values()?);
            let mut out = Vec::with_capacity(va.len() * vb.len());
            for &x in &va {
                for &y in &vb {
                    out.push(base.with(a.field, x).with(b.field, y));
                }
            }
            Ok(out)
        }
        _ => Err(Error::InvalidArgument("sweeps take one or two axes")),
    }
}

pub fn sweep(base: &ProtocolParams, axes: &[Axis], c: &Constants) -> Result<Vec<FeasibilityCase>> {
    sweep_points(base, axes)?.iter().map(|p| evaluate_case(p, c)).collect()
}
