//! Statistical checks of the Monte Carlo sampler against the exact
//! conditional density.

mod common;

use common::{integrate, pointer};
use gravkick_core::montecarlo::{run_ensemble, RunConfig, Scenario};
use gravkick_core::protocol::{Kicks, SourceState};
use gravkick_core::units::UnitSystem;
use gravkick_core::wavepacket::Wavepacket;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn fig2() -> Scenario {
    Scenario {
        pre: SourceState::from_beta(0.9).unwrap(),
        post: SourceState::phase_matched_postselection(0.0, 0.0),
        probe: Wavepacket::gaussian(0.0, 1.0, UnitSystem::Natural).unwrap(),
        kicks: Kicks::new(0.7, 0.1),
    }
}

#[test]
fn histogram_passes_chi_square() {
    let stats = run_ensemble(&RunConfig::new(fig2(), 840_000, 2024)).unwrap();
    assert!(stats.accepted >= 100_000, "accepted {}", stats.accepted);

    let (beta, alpha) = (0.9, 0.19f64.sqrt());
    let density = |p: f64| (beta * pointer(p, 0.1) - alpha * pointer(p, 0.7)).powi(2);
    let total = integrate(&density, -40.0, 40.0, 1e-14);
    let n = stats.accepted as f64;

    // merge sparse bins until each expects at least 5 counts
    let mut chi2 = 0.0;
    let mut bins = 0usize;
    let (mut obs, mut exp) = (0.0, 0.0);
    for (i, &count) in stats.histogram.counts.iter().enumerate() {
        let (lo, hi) = stats.histogram.bin_edges(i);
        obs += count as f64;
        exp += n * integrate(&density, lo, hi, 1e-15) / total;
        if exp >= 5.0 {
            chi2 += (obs - exp).powi(2) / exp;
            bins += 1;
            obs = 0.0;
            exp = 0.0;
        }
    }
    let dist = ChiSquared::new((bins - 1) as f64).unwrap();
    let p_value = 1.0 - dist.cdf(chi2);
    assert!(p_value > 0.001, "chi2 {chi2} over {bins} bins, p = {p_value}");
}

#[test]
fn estimator_error_scales_as_inverse_sqrt() {
    let exact = -0.344_230_278_083_942;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &trials in &[1_000u64, 10_000, 100_000, 1_000_000] {
        let mut sq = 0.0;
        let mut accepted = 0.0;
        let seeds = 8;
        for seed in 0..seeds {
            let s = run_ensemble(&RunConfig::new(fig2(), trials, 1000 + seed)).unwrap();
            sq += (s.mean_kick_estimate.unwrap() - exact).powi(2);
            accepted += s.accepted as f64;
        }
        let rms = (sq / seeds as f64).sqrt();
        xs.push((accepted / seeds as f64).sqrt().recip().ln());
        ys.push(rms.ln());
    }
    let mx = xs.iter().sum::<f64>() / 4.0;
    let my = ys.iter().sum::<f64>() / 4.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - 1.0).abs() < 0.25, "slope {slope}");
}
