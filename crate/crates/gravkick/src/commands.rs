//! Subcommand implementations. Each returns the files it wrote.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gravkick_core::analysis::{validity_check, weak_value_kick, weak_value_report, KickOperator};
use gravkick_core::feasibility::{
    evaluate_case, solve_parameter, sweep_points, Axis, FeasibilityCase, ParamField, Spacing,
};
use gravkick_core::montecarlo::{required_trials, Sampler};
use gravkick_core::protocol;
use gravkick_core::units::{convert, Constants, Dimension, UnitSystem};
use gravkick_core::wavepacket::Wavepacket;
use gravkick_core::Complex64;

use crate::config::{self, Resolved};
use crate::csv::{self, QuantityTable};
use crate::error::{CliError, Result};
use crate::output::OutputBundle;
use crate::parallel;
use crate::presets;
use crate::svg::{self, Curve};

/// Samples per curve in decomposition plots.
pub const CURVE_POINTS: usize = 401;
/// Plot window of the decomposition figure, in ħ/W.
pub const FIG2_WINDOW: (f64, f64) = (-4.0, 4.0);

#[derive(Debug, Parser)]
#[command(name = "gravkick", version, about = "Postselected gravitational kicks on a probe wavepacket")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and first-order postselected kick for one scenario.
    Simulate(SimulateArgs),
    /// Feasibility ratio of a physical scenario, optionally solving for one parameter.
    Feasibility(FeasibilityArgs),
    /// Monte Carlo ensemble of postselected momentum readouts.
    Montecarlo(MonteCarloArgs),
    /// Feasibility ratio over a one- or two-parameter grid.
    Sweep(SweepArgs),
    /// Decomposition plot of the postselected probe for the fig2 scenario.
    Fig2(Fig2Args),
    /// Built-in scenario files.
    #[command(subcommand)]
    Presets(PresetsCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Natural,
    Si,
}

impl From<UnitsArg> for UnitSystem {
    fn from(u: UnitsArg) -> Self {
        match u {
            UnitsArg::Natural => UnitSystem::Natural,
            UnitsArg::Si => UnitSystem::Si,
        }
    }
}

#[derive(Debug, Args)]
pub struct Input {
    /// Scenario JSON file.
    #[arg(required_unless_present = "scenario", conflicts_with = "scenario")]
    pub config: Option<PathBuf>,
    /// Built-in scenario instead of a file.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["fig2", "amplification", "caseA", "caseB"]))]
    pub scenario: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Output directory.
    #[arg(long, env = "GRAVKICK_OUT", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub out: OutDir,
    /// Units of the written quantities (defaults to the scenario's).
    #[arg(long, value_enum)]
    pub units: Option<UnitsArg>,
    /// Also write the decomposition plot as fig2.svg.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct FeasibilityArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub out: OutDir,
    #[arg(long, value_enum)]
    pub units: Option<UnitsArg>,
    /// Parameter to solve for: M, m, T, xA, W or g.
    #[arg(long, requires = "target")]
    pub solve: Option<String>,
    /// Target feasibility ratio (its magnitude is used).
    #[arg(long, requires = "solve", allow_negative_numbers = true)]
    pub target: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub out: OutDir,
    #[arg(long, value_enum)]
    pub units: Option<UnitsArg>,
    /// Number of trials (overrides the scenario).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed (overrides the scenario).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub out: OutDir,
    #[arg(long, value_enum)]
    pub units: Option<UnitsArg>,
    /// FIELD=start:stop:count[:log], values in SI units.
    #[arg(long)]
    pub axis: String,
    /// Second axis, same syntax; rows are ordered with --axis outermost.
    #[arg(long)]
    pub axis2: Option<String>,
    /// Also write sweep.svg (heatmap of |ratio| for two axes).
    #[arg(long)]
    pub svg: bool,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    /// SVG path; a CSV of the curve samples is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PresetsCommand {
    /// Names of the built-in scenarios.
    List,
    /// Print one built-in scenario.
    Show { name: String },
}

/// What a command produced: files written, or text for stdout.
#[derive(Debug)]
pub enum Outcome {
    Files(Vec<PathBuf>),
    Text(String),
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Simulate(a) => simulate(&a).map(Outcome::Files),
        Command::Feasibility(a) => feasibility(&a).map(Outcome::Files),
        Command::Montecarlo(a) => montecarlo(&a).map(Outcome::Files),
        Command::Sweep(a) => sweep(&a).map(Outcome::Files),
        Command::Fig2(a) => fig2(&a).map(Outcome::Files),
        Command::Presets(PresetsCommand::List) => {
            Ok(Outcome::Text(presets::names().map(|n| format!("{n}\n")).collect()))
        }
        Command::Presets(PresetsCommand::Show { name }) => presets::get(&name)
            .map(|t| Outcome::Text(t.to_owned()))
            .ok_or_else(|| CliError::Usage(format!("unknown preset `{name}`"))),
    }
}

fn load(input: &Input) -> Result<Resolved> {
    match (&input.scenario, &input.config) {
        (Some(name), _) => {
            let text = presets::get(name).ok_or_else(|| CliError::Usage(format!("unknown preset `{name}`")))?;
            config::parse(text)?.resolve(Path::new("."))
        }
        (None, Some(path)) => {
            let (cfg, base) = config::load(path)?;
            cfg.resolve(&base)
        }
        (None, None) => Err(CliError::Usage("give a config file or --scenario".into())),
    }
}

fn units_of(r: &Resolved, arg: Option<UnitsArg>) -> UnitSystem {
    arg.map(Into::into).unwrap_or(r.units)
}

/// Summary of the exact protocol plus its weak-value reading.
pub fn simulate_summary(r: &Resolved, units: UnitSystem) -> Result<(QuantityTable, protocol::PostselectedResult)> {
    let s = r.momentum_scale(units)?;
    let result = protocol::run(&r.pre, &r.probe, &r.kicks, &r.post)?;
    let weak = weak_value_report(&r.pre, &r.post, &r.kicks).ok();
    let kick_wv = weak_value_kick(&r.pre, &r.post, &KickOperator::from_kicks(&r.kicks)).ok();
    let validity = validity_check(&r.kicks, &r.probe, &r.pre, &r.post).ok();
    let (a2, b2) = (r.pre.amp_a().norm_sqr(), r.pre.amp_b().norm_sqr());

    let mut t = QuantityTable::new();
    t.text("units", units.as_str())
        .number("alpha", a2.sqrt())
        .number("beta", b2.sqrt())
        .number("delta_A", r.kicks.delta_a * s)
        .number("delta_B", r.kicks.delta_b * s)
        .number("postselection_probability", result.probability)
        .number("exact_mean", result.mean_kick * s)
        .number("exact_std", result.std * s)
        .maybe("delta_ef", weak.map(|w| w.effective_kick * s))
        .maybe("gain", weak.map(|w| w.amplification_gain))
        .maybe("weak_value_projector_re", weak.map(|w| w.projector_weak_value.re))
        .maybe("weak_value_projector_im", weak.map(|w| w.projector_weak_value.im))
        .maybe("weak_value_kick_re", kick_wv.map(|w| w.re * s))
        .maybe("weak_value_kick_im", kick_wv.map(|w| w.im * s))
        .number("beta2_minus_alpha2", b2 - a2)
        .maybe("first_order_mean", validity.map(|v| v.first_order_mean * s))
        .maybe("abs_error", validity.map(|v| v.abs_error * s))
        .maybe("kick_ratio_A", validity.map(|v| v.ratio_a))
        .maybe("kick_ratio_B", validity.map(|v| v.ratio_b))
        .text("regime", validity.map_or(csv::NOT_AVAILABLE, |v| v.regime.as_str()));
    Ok((t, result))
}

/// Curve samples of the decomposition plot: each branch term and the
/// normalized sum, in natural units. Branch weights are ⟨f|j⟩c_j·√2, which
/// for the default postselection are βψ(p − δ_B) and −αψ(p − δ_A).
pub struct Decomposition {
    pub p: Vec<f64>,
    pub branch_b: Vec<Complex64>,
    pub branch_a: Vec<Complex64>,
    pub sum: Vec<Complex64>,
}

pub fn decomposition(r: &Resolved, lo: f64, hi: f64, n: usize) -> Result<Decomposition> {
    if !r.probe.is_analytic() {
        return Err(CliError::Usage("decomposition plots need an analytic probe".into()));
    }
    let root2 = std::f64::consts::SQRT_2;
    let wa = r.post.amp_a().conj() * r.pre.amp_a() * root2;
    let wb = r.post.amp_b().conj() * r.pre.amp_b() * root2;
    let pa = r.probe.displace(r.kicks.delta_a)?;
    let pb = r.probe.displace(r.kicks.delta_b)?;
    let phase = |phi: f64| Complex64::from_polar(1.0, phi);
    let (wa, wb) = (wa * phase(r.kicks.phi_a), wb * phase(r.kicks.phi_b));
    let sum = Wavepacket::combine(&[(wa, &pa), (wb, &pb)])?.normalize()?;
    let p: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let ev = |w: &Wavepacket, x: f64| w.eval(x).unwrap_or_default();
    Ok(Decomposition {
        branch_b: p.iter().map(|&x| wb * ev(&pb, x)).collect(),
        branch_a: p.iter().map(|&x| wa * ev(&pa, x)).collect(),
        sum: p.iter().map(|&x| ev(&sum, x)).collect(),
        p,
    })
}

fn decomposition_files(d: &Decomposition, p_scale: f64, units: UnitSystem) -> (String, String) {
    let amp = p_scale.sqrt().recip();
    let mut text = String::from("p,branch_b,branch_a,sum_re,sum_im\n");
    for k in 0..d.p.len() {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            csv::num(d.p[k] * p_scale),
            csv::num(d.branch_b[k].re * amp),
            csv::num(d.branch_a[k].re * amp),
            csv::num(d.sum[k].re * amp),
            csv::num(d.sum[k].im * amp),
        ));
    }
    let pts =
        |v: &[Complex64]| -> Vec<(f64, f64)> { d.p.iter().zip(v).map(|(p, a)| (p * p_scale, a.re * amp)).collect() };
    let (b, a, s) = (pts(&d.branch_b), pts(&d.branch_a), pts(&d.sum));
    let unit = match units {
        UnitSystem::Natural => "p [hbar/W]",
        UnitSystem::Si => "p [kg m/s]",
    };
    let plot = svg::line_plot(
        "Postselected probe decomposition",
        unit,
        &[
            Curve { label: "branch B", color: "#1f77b4", points: &b },
            Curve { label: "branch A", color: "#d62728", points: &a },
            Curve { label: "normalized sum", color: "black", points: &s },
        ],
    );
    (text, plot)
}

pub fn simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let r = load(&args.input)?;
    let units = units_of(&r, args.units);
    let scale = r.momentum_scale(units)?;
    let (summary, result) = simulate_summary(&r, units)?;
    let grid = match &result.conditional {
        Wavepacket::Grid(g) => g.clone(),
        w => w.sample(&w.default_grid())?,
    };
    let wave = csv::write_wavepacket(&grid, units, r.width_si).map_err(CliError::Usage)?;

    let dir = &args.out.out;
    let mut bundle = OutputBundle::new();
    bundle.add(dir.join("summary.csv"), summary.render()).add(dir.join("wavefunction.csv"), wave);
    if args.svg {
        let m = result.mean_kick;
        let (lo, hi) = (m.min(0.0) + FIG2_WINDOW.0, m.max(0.0) + FIG2_WINDOW.1);
        let d = decomposition(&r, lo, hi, CURVE_POINTS)?;
        let (_, plot) = decomposition_files(&d, scale, units);
        bundle.add(dir.join("fig2.svg"), plot);
    }
    bundle.commit()
}

fn case_in_units(case: &FeasibilityCase, units: UnitSystem) -> Result<FeasibilityCase> {
    match units {
        UnitSystem::Si => Ok(*case),
        UnitSystem::Natural => {
            let w = case.params.width;
            let cv = |v, d| convert(v, d, UnitSystem::Si, UnitSystem::Natural, w);
            Ok(FeasibilityCase {
                params: case.params.to_natural(w)?,
                delta_a: cv(case.delta_a, Dimension::Momentum)?,
                delta_b: cv(case.delta_b, Dimension::Momentum)?,
                tau: cv(case.tau, Dimension::Time)?,
                ..*case
            })
        }
    }
}

fn parse_field(s: &str) -> Result<ParamField> {
    s.parse().map_err(|e: gravkick_core::Error| CliError::Usage(format!("`{s}`: {e}")))
}

pub fn feasibility(args: &FeasibilityArgs) -> Result<Vec<PathBuf>> {
    let r = load(&args.input)?;
    let units = units_of(&r, args.units);
    let c = Constants::SI;
    let mut params = r.physical()?;
    let mut solved = None;
    if let (Some(field), Some(target)) = (&args.solve, args.target) {
        let field = parse_field(field)?;
        let value = solve_parameter(&params, field, target, &c)?;
        params = params.with(field, value);
        solved = Some((field, value));
    }
    let case = evaluate_case(&params, &c)?;
    let shown = case_in_units(&case, units)?;

    let mut t = QuantityTable::new();
    t.text("units", units.as_str());
    if let Some((field, _)) = solved {
        t.text("solved_field", field.name());
        t.number("solved_value", shown.params.get(field).unwrap_or(f64::NAN));
    }
    let p = &shown.params;
    t.number("M", p.source_mass)
        .number("m", p.probe_mass)
        .maybe("T", p.time)
        .number("xA", p.x_a)
        .number("xB", p.x_b)
        .number("W", p.width)
        .number("g", p.gain)
        .number("deltaA", shown.delta_a)
        .number("deltaB", shown.delta_b)
        .number("ratio", case.ratio)
        .number("abs_ratio", case.ratio.abs())
        .number("tau", shown.tau)
        .number("ps_prob", case.postselect_probability)
        .maybe(
            "trials_for_5_sigma",
            required_trials(case.ratio, 1.0, case.postselect_probability, 5.0).ok().map(|n| n as f64),
        )
        .text("separation_ok", if case.separation_ok { "1" } else { "0" });

    let dir = &args.out.out;
    let mut bundle = OutputBundle::new();
    bundle.add(dir.join("summary.csv"), t.render()).add(dir.join("sweep.csv"), csv::sweep_table(&[shown]));
    bundle.commit()
}

pub fn montecarlo(args: &MonteCarloArgs) -> Result<Vec<PathBuf>> {
    let r = load(&args.input)?;
    let units = units_of(&r, args.units);
    let s = r.momentum_scale(units)?;
    let cfg = r.run_config(args.trials, args.seed)?;
    let sampler = Sampler::new(&cfg)?;
    let workers = args.workers.unwrap_or_else(parallel::default_workers);
    let stats = parallel::run_ensemble(&sampler, workers)?;

    let significance = match (stats.mean_kick_estimate, stats.std_error) {
        (Some(m), Some(e)) if e > 0.0 => Some(m / e),
        _ => None,
    };
    let mut t = QuantityTable::new();
    t.text("units", units.as_str())
        .count("seed", cfg.seed)
        .count("trials", stats.trials)
        .count("accepted", stats.accepted)
        .number("acceptance_rate", stats.acceptance_rate)
        .number("postselection_probability", sampler.probability())
        .number("expected_accepted", sampler.probability() * stats.trials as f64)
        .maybe("mean_kick_estimate", stats.mean_kick_estimate.map(|m| m * s))
        .maybe("sample_std", stats.sample_std.map(|v| v * s))
        .maybe("std_error", stats.std_error.map(|v| v * s))
        .number("exact_mean", sampler.exact_mean() * s)
        .maybe("significance", significance);

    let dir = &args.out.out;
    let mut bundle = OutputBundle::new();
    bundle
        .add(dir.join("summary.csv"), t.render())
        .add(dir.join("histogram.csv"), csv::histogram_table(&stats.histogram, s));
    bundle.commit()
}

/// Parses `FIELD=start:stop:count[:log]`.
pub fn parse_axis(spec: &str) -> Result<Axis> {
    let bad = |why: &str| CliError::Usage(format!("bad axis `{spec}`: {why} (expected FIELD=start:stop:count[:log])"));
    let (field, range) = spec.split_once('=').ok_or_else(|| bad("missing `=`"))?;
    let field = parse_field(field.trim())?;
    let parts: Vec<&str> = range.split(':').collect();
    let spacing = match parts.as_slice() {
        [_, _, _] => Spacing::Linear,
        [_, _, _, "log"] => Spacing::Log,
        [_, _, _, "lin"] => Spacing::Linear,
        _ => return Err(bad("wrong number of parts")),
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bounds must be numbers"));
    let count = parts[2].trim().parse::<usize>().map_err(|_| bad("count must be a whole number"))?;
    Ok(Axis { field, start: num(parts[0])?, stop: num(parts[1])?, count, spacing })
}

pub fn sweep(args: &SweepArgs) -> Result<Vec<PathBuf>> {
    let r = load(&args.input)?;
    let units = units_of(&r, args.units);
    let mut axes = vec![parse_axis(&args.axis)?];
    if let Some(a2) = &args.axis2 {
        axes.push(parse_axis(a2)?);
    }
    let base = r.physical()?;
    let points = sweep_points(&base, &axes)?;
    let workers = args.workers.unwrap_or_else(parallel::default_workers);
    let cases = parallel::evaluate_all(&points, &Constants::SI, workers)?;
    let shown: Vec<FeasibilityCase> = cases.iter().map(|c| case_in_units(c, units)).collect::<Result<_>>()?;

    let abs: Vec<f64> = cases.iter().map(|c| c.ratio.abs()).collect();
    let mut t = QuantityTable::new();
    t.text("units", units.as_str()).count("points", cases.len() as u64);
    for (i, a) in axes.iter().enumerate() {
        let k = i + 1;
        t.text(&format!("axis{k}_field"), a.field.name())
            .number(&format!("axis{k}_start"), a.start)
            .number(&format!("axis{k}_stop"), a.stop)
            .count(&format!("axis{k}_count"), a.count as u64)
            .text(&format!("axis{k}_spacing"), if a.spacing == Spacing::Log { "log" } else { "linear" });
    }
    t.number("min_abs_ratio", abs.iter().copied().fold(f64::INFINITY, f64::min))
        .number("max_abs_ratio", abs.iter().copied().fold(0.0, f64::max))
        .count("valid_points", cases.iter().filter(|c| c.separation_ok).count() as u64);

    let dir = &args.out.out;
    let mut bundle = OutputBundle::new();
    bundle.add(dir.join("summary.csv"), t.render()).add(dir.join("sweep.csv"), csv::sweep_table(&shown));
    if args.svg {
        let plot = match axes.as_slice() {
            [a, b] => {
                let rows: Vec<Vec<f64>> = abs.chunks(b.count).map(<[f64]>::to_vec).collect();
                svg::heatmap("|ratio|", &format!("{} (SI)", b.field), &format!("{} (SI)", a.field), &rows)
            }
            [a] => {
                let pts: Vec<(f64, f64)> = a.values()?.into_iter().zip(abs.iter().copied()).collect();
                svg::line_plot(
                    "|ratio|",
                    &format!("{} (SI)", a.field),
                    &[Curve { label: "|ratio|", color: "black", points: &pts }],
                )
            }
            _ => unreachable!("one or two axes"),
        };
        bundle.add(dir.join("sweep.svg"), plot);
    }
    bundle.commit()
}

pub fn fig2(args: &Fig2Args) -> Result<Vec<PathBuf>> {
    let svg_path = match &args.out {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var_os("GRAVKICK_OUT").map_or_else(|| PathBuf::from("out"), PathBuf::from);
            dir.join("fig2.svg")
        }
    };
    let text = presets::get("fig2").expect("fig2 preset is built in");
    let r = config::parse(text)?.resolve(Path::new("."))?;
    let d = decomposition(&r, FIG2_WINDOW.0, FIG2_WINDOW.1, CURVE_POINTS)?;
    let (table, plot) = decomposition_files(&d, 1.0, UnitSystem::Natural);
    let mut bundle = OutputBundle::new();
    bundle.add(svg_path.with_extension("csv"), table).add(svg_path, plot);
    bundle.commit()
}
