//! JSON scenario documents.
//!
//! A scenario names the source preparation, the probe, the branch kicks
//! (explicit momenta, or the physical masses/distances they follow from),
//! the postselected source state and optional Monte Carlo settings.
//! Simulation always runs in natural units (ħ = 1, momenta in ħ/W).

use std::path::{Path, PathBuf};

use gravkick_core::analysis::effective_kick;
use gravkick_core::feasibility::{amplitudes_for_gain, delta_kick, ProtocolParams};
use gravkick_core::montecarlo::{RunConfig, Scenario};
use gravkick_core::protocol::{Kicks, SourceState};
use gravkick_core::units::{convert, Constants, Dimension, UnitSystem};
use gravkick_core::wavepacket::{GridSpec, Wavepacket};
use gravkick_core::Complex64;
use serde::Deserialize;

use crate::csv;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub description: Option<String>,
    pub units: Units,
    pub source: SourceConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
    pub kicks: KicksConfig,
    #[serde(default)]
    pub postselection: Option<PostselectionConfig>,
    #[serde(default)]
    pub montecarlo: Option<MonteCarloConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Si,
    Natural,
}

impl From<Units> for UnitSystem {
    fn from(u: Units) -> Self {
        match u {
            Units::Si => UnitSystem::Si,
            Units::Natural => UnitSystem::Natural,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gain: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Position width in metres. Required whenever SI quantities are involved.
    #[serde(rename = "W")]
    pub width: Option<f64>,
    /// Sample the Gaussian probe on a grid instead of keeping it analytic.
    pub grid: Option<GridConfig>,
    /// Load the probe from a wavepacket CSV (relative to the config file).
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    /// Half-width of the window in ħ/W.
    pub half_width: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KicksConfig {
    #[serde(rename = "delta_A")]
    pub delta_a: Option<f64>,
    #[serde(rename = "delta_B")]
    pub delta_b: Option<f64>,
    #[serde(rename = "M")]
    pub source_mass: Option<f64>,
    #[serde(rename = "m")]
    pub probe_mass: Option<f64>,
    #[serde(rename = "T")]
    pub time: Option<f64>,
    #[serde(rename = "x_A")]
    pub x_a: Option<f64>,
    #[serde(rename = "x_B")]
    pub x_b: Option<f64>,
    #[serde(rename = "phi_A", default)]
    pub phi_a: f64,
    #[serde(rename = "phi_B", default)]
    pub phi_b: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PostselectionConfig {
    Named(String),
    Amplitudes {
        #[serde(rename = "A")]
        a: [f64; 2],
        #[serde(rename = "B")]
        b: [f64; 2],
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub trials: u64,
    pub seed: u64,
    pub bins: Option<usize>,
}

/// Parses a scenario, reporting the failing field path and location.
pub fn parse(text: &str) -> Result<ScenarioConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config { path, location: Some((inner.line(), inner.column())), message: inner.to_string() }
    })
}

pub fn load(path: &Path) -> Result<(ScenarioConfig, PathBuf)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((parse(&text)?, base))
}

/// Which way the kicks were specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KickSource {
    Explicit,
    Physical(ProtocolParams),
}

/// A validated scenario in natural units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub description: Option<String>,
    pub units: UnitSystem,
    /// Probe width in metres, if known.
    pub width_si: Option<f64>,
    pub pre: SourceState,
    pub post: SourceState,
    pub probe: Wavepacket,
    pub kicks: Kicks,
    pub kick_source: KickSource,
    pub montecarlo: Option<MonteCarloConfig>,
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(path, format!("must be positive and finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn resolve(&self, base_dir: &Path) -> Result<Resolved> {
        let units = UnitSystem::from(self.units);
        let width_si = self.probe.width.map(|w| positive("probe.W", w)).transpose()?;
        let need_width = |what: &str| {
            width_si.ok_or_else(|| CliError::config("probe.W", format!("probe width in metres is required {what}")))
        };

        let k = &self.kicks;
        let explicit = k.delta_a.is_some() || k.delta_b.is_some();
        let physical =
            k.source_mass.is_some() || k.probe_mass.is_some() || k.time.is_some() || k.x_a.is_some() || k.x_b.is_some();
        let (delta_a, delta_b, kick_source) = match (explicit, physical) {
            (true, true) => {
                return Err(CliError::config(
                    "kicks",
                    "give either delta_A/delta_B or physical parameters (M, m, T, x_A, x_B), not both",
                ))
            }
            (false, false) => {
                return Err(CliError::config("kicks", "no kicks given"));
            }
            (true, false) => {
                let da = k.delta_a.ok_or_else(|| CliError::config("kicks.delta_A", "missing"))?;
                let db = k.delta_b.ok_or_else(|| CliError::config("kicks.delta_B", "missing"))?;
                match units {
                    UnitSystem::Natural => (da, db, KickSource::Explicit),
                    UnitSystem::Si => {
                        let w = need_width("for SI kicks")?;
                        let to_nat = |v| convert(v, Dimension::Momentum, UnitSystem::Si, UnitSystem::Natural, w);
                        (to_nat(da)?, to_nat(db)?, KickSource::Explicit)
                    }
                }
            }
            (false, true) => {
                let w = need_width("with physical parameters")?;
                let get = |v: Option<f64>, name: &str| -> Result<f64> {
                    let path = format!("kicks.{name}");
                    positive(&path, v.ok_or_else(|| CliError::config(&path, "missing"))?)
                };
                let mut params = ProtocolParams {
                    source_mass: get(k.source_mass, "M")?,
                    probe_mass: get(k.probe_mass, "m")?,
                    time: k.time.map(|t| positive("kicks.T", t)).transpose()?,
                    x_a: get(k.x_a, "x_A")?,
                    x_b: get(k.x_b, "x_B")?,
                    width: w,
                    gain: 0.0,
                };
                if params.x_b <= params.x_a {
                    return Err(CliError::config("kicks.x_B", "must exceed x_A"));
                }
                let c = Constants::SI;
                let t = params.resolved_time(&c)?;
                let da = delta_kick(&c, params.source_mass, params.probe_mass, t, params.x_a)?;
                let db = delta_kick(&c, params.source_mass, params.probe_mass, t, params.x_b)?;
                let dp = c.hbar / w;
                let (da, db) = (da / dp, db / dp);
                params.gain = self.source.gain.unwrap_or(0.0);
                (da, db, KickSource::Physical(params))
            }
        };
        let kicks = Kicks::new(delta_a, delta_b).with_phases(k.phi_a, k.phi_b);

        let pre = self.resolve_source(&kicks)?;
        let kick_source = match kick_source {
            KickSource::Physical(mut p) if self.source.gain.is_none() => {
                let (a, b) = (pre.amp_a().re, pre.amp_b().re);
                p.gain = -effective_kick(a, b, delta_a, delta_b)? / delta_a;
                KickSource::Physical(p)
            }
            other => other,
        };

        let post = match &self.postselection {
            None => SourceState::phase_matched_postselection(kicks.phi_a, kicks.phi_b),
            Some(PostselectionConfig::Named(name)) if name == "paper-default" => {
                SourceState::phase_matched_postselection(kicks.phi_a, kicks.phi_b)
            }
            Some(PostselectionConfig::Named(name)) => {
                return Err(CliError::config(
                    "postselection",
                    format!("unknown postselection `{name}` (expected \"paper-default\" or amplitudes)"),
                ))
            }
            Some(PostselectionConfig::Amplitudes { a, b }) => {
                SourceState::new(Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1]))
                    .map_err(|e| CliError::config("postselection", e.to_string()))?
            }
        };

        let probe = self.resolve_probe(base_dir, width_si)?;

        if let Some(mc) = &self.montecarlo {
            if mc.trials == 0 {
                return Err(CliError::config("montecarlo.trials", "must be at least 1"));
            }
            if mc.bins == Some(0) {
                return Err(CliError::config("montecarlo.bins", "must be at least 1"));
            }
        }

        Ok(Resolved {
            description: self.description.clone(),
            units,
            width_si,
            pre,
            post,
            probe,
            kicks,
            kick_source,
            montecarlo: self.montecarlo.clone(),
        })
    }

    fn resolve_source(&self, kicks: &Kicks) -> Result<SourceState> {
        let s = &self.source;
        let err = |path: &str, e: gravkick_core::Error| CliError::config(path, e.to_string());
        match (s.alpha, s.beta, s.gain) {
            (None, None, Some(g)) => {
                if kicks.delta_b == 0.0 {
                    return amplitudes_for_gain(g, f64::INFINITY).map_err(|e| err("source.gain", e));
                }
                amplitudes_for_gain(g, kicks.delta_a / kicks.delta_b).map_err(|e| err("source.gain", e))
            }
            (_, _, Some(_)) => Err(CliError::config("source", "give either gain or alpha/beta, not both")),
            (Some(a), Some(b), None) => SourceState::real(a, b).map_err(|e| err("source", e)),
            (None, Some(b), None) => SourceState::from_beta(b).map_err(|e| err("source.beta", e)),
            (Some(a), None, None) => {
                if !(0.0..=1.0).contains(&a) {
                    return Err(CliError::config("source.alpha", "must lie in [0, 1]"));
                }
                SourceState::real(a, (1.0 - a * a).sqrt()).map_err(|e| err("source.alpha", e))
            }
            (None, None, None) => Err(CliError::config("source", "give alpha, beta or gain")),
        }
    }

    fn resolve_probe(&self, base_dir: &Path, width_si: Option<f64>) -> Result<Wavepacket> {
        let p = &self.probe;
        if p.grid.is_some() && p.file.is_some() {
            return Err(CliError::config("probe", "give either grid or file, not both"));
        }
        if let Some(file) = &p.file {
            let path = base_dir.join(file);
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            let loaded =
                csv::read_wavepacket(&text).map_err(|m| CliError::Format { path: path.clone(), message: m })?;
            return loaded.into_natural(width_si).map_err(|m| CliError::Format { path, message: m });
        }
        let gaussian = Wavepacket::gaussian(0.0, 1.0, UnitSystem::Natural)?;
        match &p.grid {
            None => Ok(gaussian),
            Some(g) => {
                let spec = GridSpec::centered(0.0, positive("probe.grid.half_width", g.half_width)?, g.n)
                    .map_err(|e| CliError::config("probe.grid", e.to_string()))?;
                Ok(Wavepacket::Grid(gravkick_core::wavepacket::Grid::new(
                    spec,
                    gaussian.sample(&spec)?.amplitudes().to_vec(),
                )?))
            }
        }
    }
}

impl Resolved {
    pub fn run_config(&self, trials: Option<u64>, seed: Option<u64>) -> Result<RunConfig> {
        let mc = self.montecarlo.as_ref();
        let trials = trials.or(mc.map(|m| m.trials)).ok_or_else(|| {
            CliError::config("montecarlo", "scenario has no montecarlo section and no --trials given")
        })?;
        let seed = seed.or(mc.map(|m| m.seed)).unwrap_or(0);
        if trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        let mut cfg = RunConfig::new(self.scenario(), trials, seed);
        if let Some(b) = mc.and_then(|m| m.bins) {
            cfg.histogram_bins = b;
        }
        Ok(cfg)
    }

    pub fn scenario(&self) -> Scenario {
        Scenario { pre: self.pre, post: self.post, probe: self.probe.clone(), kicks: self.kicks }
    }

    /// Physical parameters, when the kicks came from masses and distances.
    pub fn physical(&self) -> Result<ProtocolParams> {
        match self.kick_source {
            KickSource::Physical(p) => Ok(p),
            KickSource::Explicit => {
                Err(CliError::config("kicks", "this command needs physical parameters (M, m, T, x_A, x_B) and probe.W"))
            }
        }
    }

    /// Factor turning a natural-unit momentum into `units`.
    pub fn momentum_scale(&self, units: UnitSystem) -> Result<f64> {
        match units {
            UnitSystem::Natural => Ok(1.0),
            UnitSystem::Si => {
                let w = self
                    .width_si
                    .ok_or_else(|| CliError::config("probe.W", "SI output needs the probe width in metres"))?;
                Ok(convert(1.0, Dimension::Momentum, UnitSystem::Natural, UnitSystem::Si, w)?)
            }
        }
    }
}
