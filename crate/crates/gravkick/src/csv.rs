//! CSV emission and the wavepacket CSV reader.
//!
//! Every table has a header row, `\n` line endings and numbers in
//! scientific notation with 9 significant digits.

use std::fmt::Write as _;

use gravkick_core::feasibility::FeasibilityCase;
use gravkick_core::montecarlo::Histogram;
use gravkick_core::units::{convert, Dimension, UnitSystem};
use gravkick_core::wavepacket::{Grid, GridSpec, Wavepacket};
use gravkick_core::Complex64;

pub const SWEEP_HEADER: &str = "M,m,T,xA,xB,W,g,deltaA,deltaB,ratio,tau,ps_prob,valid_flag";
pub const HISTOGRAM_HEADER: &str = "bin_left,bin_right,count";
pub const WAVEPACKET_HEADER: &str = "p,re,im";
/// Written in place of a number that is not available.
pub const NOT_AVAILABLE: &str = "NA";

pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

/// `quantity,value` rows.
#[derive(Debug, Clone, Default)]
pub struct QuantityTable {
    rows: Vec<(String, String)>,
}

impl QuantityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn number(&mut self, name: &str, value: f64) -> &mut Self {
        self.rows.push((name.to_owned(), num(value)));
        self
    }

    pub fn maybe(&mut self, name: &str, value: Option<f64>) -> &mut Self {
        let v = value.map(num).unwrap_or_else(|| NOT_AVAILABLE.to_owned());
        self.rows.push((name.to_owned(), v));
        self
    }

    pub fn count(&mut self, name: &str, value: u64) -> &mut Self {
        self.rows.push((name.to_owned(), value.to_string()));
        self
    }

    pub fn text(&mut self, name: &str, value: &str) -> &mut Self {
        debug_assert!(!value.contains([',', '\n', '"']));
        self.rows.push((name.to_owned(), value.to_owned()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.rows.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::from("quantity,value\n");
        for (n, v) in &self.rows {
            let _ = writeln!(out, "{n},{v}");
        }
        out
    }
}

/// One sweep/feasibility row per case, in the case's own units.
pub fn sweep_table(cases: &[FeasibilityCase]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for c in cases {
        let p = &c.params;
        let cols = [
            p.source_mass,
            p.probe_mass,
            p.time.unwrap_or(f64::NAN),
            p.x_a,
            p.x_b,
            p.width,
            p.gain,
            c.delta_a,
            c.delta_b,
            c.ratio,
            c.tau,
            c.postselect_probability,
        ];
        for v in cols {
            out.push_str(&num(v));
            out.push(',');
        }
        out.push_str(if c.separation_ok { "1" } else { "0" });
        out.push('\n');
    }
    out
}

/// Histogram rows; bin edges are multiplied by `scale`.
pub fn histogram_table(h: &Histogram, scale: f64) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for (i, c) in h.counts.iter().enumerate() {
        let (l, r) = h.bin_edges(i);
        let _ = writeln!(out, "{},{},{c}", num(l * scale), num(r * scale));
    }
    out
}

fn width_tag(width_si: Option<f64>) -> String {
    width_si.map(num).unwrap_or_else(|| NOT_AVAILABLE.to_owned())
}

/// Serializes a natural-unit grid packet. SI output needs the width.
pub fn write_wavepacket(grid: &Grid, units: UnitSystem, width_si: Option<f64>) -> Result<String, String> {
    let (p_scale, amp_scale) = match units {
        UnitSystem::Natural => (1.0, 1.0),
        UnitSystem::Si => {
            let w = width_si.ok_or("SI wavepacket output needs the probe width")?;
            let s =
                convert(1.0, Dimension::Momentum, UnitSystem::Natural, UnitSystem::Si, w).map_err(|e| e.to_string())?;
            // ψ carries units of momentum^(-1/2)
            (s, s.sqrt().recip())
        }
    };
    let mut out = format!("# units={}, W={}\n{WAVEPACKET_HEADER}\n", units.as_str(), width_tag(width_si));
    for (p, a) in grid.iter() {
        let _ = writeln!(out, "{},{},{}", num(p * p_scale), num(a.re * amp_scale), num(a.im * amp_scale));
    }
    Ok(out)
}

/// A wavepacket file as read, before unit conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedWavepacket {
    pub units: UnitSystem,
    pub width_si: Option<f64>,
    pub p: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
}

fn parse_metadata(line: &str) -> Result<(UnitSystem, Option<f64>), String> {
    let body = line.strip_prefix('#').ok_or("first line must be `# units=natural|si, W=<value>`")?;
    let mut units = None;
    let mut width = None;
    for part in body.split(',') {
        let (k, v) = part.trim().split_once('=').ok_or_else(|| format!("bad metadata entry `{}`", part.trim()))?;
        match k.trim() {
            "units" => units = Some(v.trim().parse::<UnitSystem>().map_err(|e| e.to_string())?),
            "W" => {
                let v = v.trim();
                if v != NOT_AVAILABLE {
                    let w: f64 = v.parse().map_err(|_| format!("bad width `{v}`"))?;
                    if !(w > 0.0 && w.is_finite()) {
                        return Err(format!("width must be positive, got {v}"));
                    }
                    width = Some(w);
                }
            }
            other => return Err(format!("unknown metadata key `{other}`")),
        }
    }
    Ok((units.ok_or("metadata is missing `units`")?, width))
}

pub fn read_wavepacket(text: &str) -> Result<LoadedWavepacket, String> {
    let mut lines = text.lines().enumerate();
    let (_, meta) = lines.next().ok_or("empty file")?;
    let (units, width_si) = parse_metadata(meta)?;
    match lines.next() {
        Some((_, h)) if h.trim() == WAVEPACKET_HEADER => {}
        _ => return Err(format!("second line must be the header `{WAVEPACKET_HEADER}`")),
    }
    let mut p = Vec::new();
    let mut amplitudes = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(format!("line {}: expected 3 columns, found {}", i + 1, cols.len()));
        }
        let mut vals = [0.0f64; 3];
        for (v, c) in vals.iter_mut().zip(&cols) {
            *v = c.trim().parse().map_err(|_| format!("line {}: bad number `{}`", i + 1, c.trim()))?;
            if !v.is_finite() {
                return Err(format!("line {}: non-finite value", i + 1));
            }
        }
        p.push(vals[0]);
        amplitudes.push(Complex64::new(vals[1], vals[2]));
    }
    Ok(LoadedWavepacket { units, width_si, p, amplitudes })
}

impl LoadedWavepacket {
    /// Converts to a normalized natural-unit grid packet. `fallback_width`
    /// is used when the file does not state W.
    pub fn into_natural(self, fallback_width: Option<f64>) -> Result<Wavepacket, String> {
        let n = self.p.len();
        if n < 2 {
            return Err("need at least two samples".into());
        }
        let (p_scale, amp_scale) = match self.units {
            UnitSystem::Natural => (1.0, 1.0),
            UnitSystem::Si => {
                let w = self.width_si.or(fallback_width).ok_or("SI wavepacket needs W")?;
                let s = convert(1.0, Dimension::Momentum, UnitSystem::Si, UnitSystem::Natural, w)
                    .map_err(|e| e.to_string())?;
                (s, s.sqrt().recip())
            }
        };
        let p: Vec<f64> = self.p.iter().map(|x| x * p_scale).collect();
        let step = (p[n - 1] - p[0]) / (n - 1) as f64;
        if !(step > 0.0) {
            return Err("momentum column must increase".into());
        }
        for (k, x) in p.iter().enumerate() {
            if (x - (p[0] + k as f64 * step)).abs() > 1e-6 * step {
                return Err(format!("momentum samples are not evenly spaced (row {})", k + 1));
            }
        }
        let spec = GridSpec::new(p[0], p[0] + n as f64 * step, n).map_err(|e| e.to_string())?;
        let amps = self.amplitudes.into_iter().map(|a| a * amp_scale).collect();
        Grid::new(spec, amps).map(Wavepacket::Grid).map_err(|e| e.to_string())
    }
}
