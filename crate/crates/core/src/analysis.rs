//! Weak-value analytics for the kick protocol.
//!
//! To first order in the kicks the postselected probe is the input pointer
//! displaced by the weak value of the kick operator
//! Δp̂ = δ_A|A⟩⟨A| + δ_B|B⟩⟨B|. For real amplitudes and the phase-matched
//! postselection this is δ_ef = (βδ_B − αδ_A)/(β − α), which turns negative
//! once α(δ_A − δ_B)/(β − α) exceeds δ_B.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::protocol::{self, Kicks, SourceState};
use crate::wavepacket::Wavepacket;

/// Pre/post overlaps below this make weak values meaningless.
pub const MIN_PREPOST_OVERLAP: f64 = 1e-15;

/// Kick/uncertainty ratio below which the first-order picture is trusted.
pub const WEAK_REGIME_LIMIT: f64 = 0.1;
/// Kick/uncertainty ratio above which it is not.
pub const STRONG_REGIME_LIMIT: f64 = 0.5;

fn prepost_overlap(pre: &SourceState, post: &SourceState) -> Result<Complex64> {
    let ov = post.inner(pre);
    if !(ov.norm() > MIN_PREPOST_OVERLAP) {
        return Err(Error::DivisionHazard("pre- and postselected states are orthogonal"));
    }
    Ok(ov)
}

/// ⟨post|Π_A|pre⟩ / ⟨post|pre⟩.
pub fn weak_value_projector(pre: &SourceState, post: &SourceState) -> Result<Complex64> {
    let ov = prepost_overlap(pre, post)?;
    Ok(post.amp_a().conj() * pre.amp_a() / ov)
}

/// First-order kick δ_B − α(δ_A − δ_B)/(β − α) for real amplitudes and the
/// phase-matched postselection.
pub fn effective_kick(alpha: f64, beta: f64, delta_a: f64, delta_b: f64) -> Result<f64> {
    let gap = beta - alpha;
    if !(gap.abs() > 1e-15) {
        return Err(Error::DivisionHazard("beta equals alpha"));
    }
    Ok(delta_b - alpha * (delta_a - delta_b) / gap)
}

/// The time-integrated momentum transfer, diagonal in the arm basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickOperator {
    pub delta_a: f64,
    pub delta_b: f64,
}

impl KickOperator {
    pub fn new(delta_a: f64, delta_b: f64) -> Self {
        KickOperator { delta_a, delta_b }
    }

    pub fn from_kicks(kicks: &Kicks) -> Self {
        Self::new(kicks.delta_a, kicks.delta_b)
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        [self.delta_a, self.delta_b]
    }

    /// Row-major 2×2 matrix in the {|A⟩, |B⟩} basis.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.delta_a, 0.0], [0.0, self.delta_b]]
    }

    /// ⟨ψ|Δp̂|ψ⟩.
    pub fn expectation(&self, state: &SourceState) -> f64 {
        self.delta_a * state.amp_a().norm_sqr() + self.delta_b * state.amp_b().norm_sqr()
    }
}

/// ⟨post|Δp̂|pre⟩ / ⟨post|pre⟩.
pub fn weak_value_kick(pre: &SourceState, post: &SourceState, op: &KickOperator) -> Result<Complex64> {
    let ov = prepost_overlap(pre, post)?;
    let num = post.amp_a().conj() * pre.amp_a() * op.delta_a + post.amp_b().conj() * pre.amp_b() * op.delta_b;
    Ok(num / ov)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueReport {
    pub projector_weak_value: Complex64,
    /// Real part of the kick weak value.
    pub effective_kick: f64,
    /// g in δ_ef = −g δ_A.
    pub amplification_gain: f64,
    pub postselection_overlap: Complex64,
}

pub fn weak_value_report(pre: &SourceState, post: &SourceState, kicks: &Kicks) -> Result<WeakValueReport> {
    let projector_weak_value = weak_value_projector(pre, post)?;
    let kick = weak_value_kick(pre, post, &KickOperator::from_kicks(kicks))?;
    Ok(WeakValueReport {
        projector_weak_value,
        effective_kick: kick.re,
        amplification_gain: -kick.re / kicks.delta_a,
        postselection_overlap: post.inner(pre),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Weak,
    Marginal,
    Strong,
}

impl Regime {
    pub fn classify(max_ratio: f64) -> Self {
        if max_ratio < WEAK_REGIME_LIMIT {
            Regime::Weak
        } else if max_ratio > STRONG_REGIME_LIMIT {
            Regime::Strong
        } else {
            Regime::Marginal
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Weak => "weak",
            Regime::Marginal => "marginal",
            Regime::Strong => "strong",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    /// |δ_A| over the probe's momentum spread (δ_A W/ħ for Gaussians).
    pub ratio_a: f64,
    pub ratio_b: f64,
    pub first_order_mean: f64,
    pub exact_mean: f64,
    pub abs_error: f64,
    pub regime: Regime,
}

/// Compares the exact postselected mean with the first-order weak-value
/// prediction and classifies how weak the kicks are.
pub fn validity_check(
    kicks: &Kicks,
    probe: &Wavepacket,
    pre: &SourceState,
    post: &SourceState,
) -> Result<ValidityReport> {
    let pm = probe.moments();
    if !(pm.std.is_finite() && pm.std > 0.0) {
        return Err(Error::InvalidArgument("probe must have a finite, non-zero momentum spread"));
    }
    let exact = protocol::run(pre, probe, kicks, post)?;
    let first_order_mean = pm.mean + weak_value_kick(pre, post, &KickOperator::from_kicks(kicks))?.re;
    let ratio_a = kicks.delta_a.abs() / pm.std;
    let ratio_b = kicks.delta_b.abs() / pm.std;
    Ok(ValidityReport {
        ratio_a,
        ratio_b,
        first_order_mean,
        exact_mean: exact.mean_kick,
        abs_error: (exact.mean_kick - first_order_mean).abs(),
        regime: Regime::classify(ratio_a.max(ratio_b)),
    })
}
