//! Schrödinger-picture protocol: prepare the source superposition next to
//! the probe, kick the probe by a branch-dependent amount, then postselect
//! the source and read off the conditional probe state.

use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wavepacket::Wavepacket;
#[allow(unused_imports)]
use num_traits::Float as _;

/// Postselection probabilities below this are reported as impossible.
pub const MIN_POSTSELECTION_PROBABILITY: f64 = 1e-30;

const NORM_TOLERANCE: f64 = 1e-10;

/// Source amplitudes over the arm basis {|A⟩, |B⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceState {
    a: Complex64,
    b: Complex64,
}

impl SourceState {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(Error::InvalidArgument("source amplitudes must satisfy |α|² + |β|² = 1"));
        }
        Ok(SourceState { a, b })
    }

    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    /// `β|B⟩ + √(1−β²)|A⟩`.
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidArgument("beta must lie in [0, 1]"));
        }
        Self::real((1.0 - beta * beta).sqrt(), beta)
    }

    /// `[−e^{iφ_A}|A⟩ + e^{iφ_B}|B⟩]/√2`, matched to the interaction phases so
    /// they cancel from the conditional probe state.
    pub fn phase_matched_postselection(phi_a: f64, phi_b: f64) -> Self {
        SourceState { a: -Complex64::from_polar(FRAC_1_SQRT_2, phi_a), b: Complex64::from_polar(FRAC_1_SQRT_2, phi_b) }
    }

    pub fn amp_a(&self) -> Complex64 {
        self.a
    }

    pub fn amp_b(&self) -> Complex64 {
        self.b
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &SourceState) -> Complex64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    /// The unit vector orthogonal to `self`, completing an orthonormal basis.
    pub fn orthogonal(&self) -> SourceState {
        SourceState { a: -self.b.conj(), b: self.a.conj() }
    }
}

/// A branch-labelled pointer: coefficient times a normalized wavepacket.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub coeff: Complex64,
    pub pointer: Wavepacket,
}

impl Branch {
    pub fn norm(&self) -> f64 {
        self.coeff.norm_sqr() * self.pointer.norm()
    }
}

/// Source–probe state Σⱼ cⱼ|j⟩ ⊗ ψⱼ.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub branch_a: Branch,
    pub branch_b: Branch,
}

impl JointState {
    pub fn total_norm(&self) -> f64 {
        self.branch_a.norm() + self.branch_b.norm()
    }
}

/// Branch kicks and interaction phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kicks {
    pub delta_a: f64,
    pub delta_b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl Kicks {
    pub fn new(delta_a: f64, delta_b: f64) -> Self {
        Kicks { delta_a, delta_b, phi_a: 0.0, phi_b: 0.0 }
    }

    pub fn with_phases(self, phi_a: f64, phi_b: f64) -> Self {
        Kicks { phi_a, phi_b, ..self }
    }

    pub fn scaled(self, s: f64) -> Self {
        Kicks { delta_a: s * self.delta_a, delta_b: s * self.delta_b, ..self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostselectedResult {
    /// Normalized conditional probe state.
    pub conditional: Wavepacket,
    pub probability: f64,
    pub mean_kick: f64,
    pub std: f64,
}

pub fn prepare_initial(source: &SourceState, probe: &Wavepacket) -> Result<JointState> {
    if (probe.norm() - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidArgument("probe wavepacket must be normalized"));
    }
    Ok(JointState {
        branch_a: Branch { coeff: source.a, pointer: probe.clone() },
        branch_b: Branch { coeff: source.b, pointer: probe.clone() },
    })
}

/// Applies `cⱼ ψ(p) → cⱼ e^{iφⱼ} ψ(p − δⱼ)` on each branch.
pub fn evolve(joint: &JointState, kicks: &Kicks) -> Result<JointState> {
    let step = |branch: &Branch, delta: f64, phi: f64| -> Result<Branch> {
        Ok(Branch { coeff: branch.coeff * Complex64::from_polar(1.0, phi), pointer: branch.pointer.displace(delta)? })
    };
    Ok(JointState {
        branch_a: step(&joint.branch_a, kicks.delta_a, kicks.phi_a)?,
        branch_b: step(&joint.branch_b, kicks.delta_b, kicks.phi_b)?,
    })
}

/// Projects the source onto `post` and returns the conditional probe state
/// ∝ ā_f c_A ψ_A + b̄_f c_B ψ_B together with its probability.
pub fn postselect(joint: &JointState, post: &SourceState) -> Result<PostselectedResult> {
    let wa = post.a.conj() * joint.branch_a.coeff;
    let wb = post.b.conj() * joint.branch_b.coeff;
    let raw = Wavepacket::combine(&[(wa, &joint.branch_a.pointer), (wb, &joint.branch_b.pointer)])?;
    let probability = raw.norm();
    if !(probability >= MIN_POSTSELECTION_PROBABILITY) {
        return Err(Error::PostselectionImpossible { probability });
    }
    let conditional = raw.normalize()?;
    let m = conditional.moments();
    Ok(PostselectedResult { conditional, probability: probability.min(1.0), mean_kick: m.mean, std: m.std })
}

/// Prepare, evolve and postselect in one go.
pub fn run(pre: &SourceState, probe: &Wavepacket, kicks: &Kicks, post: &SourceState) -> Result<PostselectedResult> {
    let joint = evolve(&prepare_initial(pre, probe)?, kicks)?;
    postselect(&joint, post)
}

/// Closed-form probability of the phase-matched postselection for real
/// positive α, β and pointer overlap `overlap`: (1 − 2αβI)/2, evaluated as
/// ((β−α)² + 2αβ(1−I))/2 to survive near-orthogonal pre/post states.
pub fn phase_matched_probability(alpha: f64, beta: f64, overlap: f64) -> f64 {
    let d = beta - alpha;
    0.5 * (d * d + 2.0 * alpha * beta * (1.0 - overlap))
}

/// A classical stochastic model: the source sits in arm A with probability
/// `weight_a`, else in arm B, and the probe receives that arm's kick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalModel {
    weight_a: f64,
    weight_b: f64,
    delta_a: f64,
    delta_b: f64,
}

impl ClassicalModel {
    pub fn new(weight_a: f64, weight_b: f64, delta_a: f64, delta_b: f64) -> Result<Self> {
        if !(weight_a >= 0.0 && weight_b >= 0.0) || ((weight_a + weight_b) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("classical weights must be non-negative and sum to 1"));
        }
        Ok(ClassicalModel { weight_a, weight_b, delta_a, delta_b })
    }
}

/// Mean kick over a classical subensemble selected with per-arm acceptance
/// weights. Always a convex combination of δ_A and δ_B.
pub fn classical_mean_kick(model: &ClassicalModel, w_a: f64, w_b: f64) -> Result<f64> {
    if !(w_a >= 0.0 && w_b >= 0.0) {
        return Err(Error::InvalidArgument("subensemble weights must be non-negative"));
    }
    let ma = w_a * model.weight_a;
    let mb = w_b * model.weight_b;
    let total = ma + mb;
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("subensemble has zero mass"));
    }
    let mean = (ma * model.delta_a + mb * model.delta_b) / total;
    let (lo, hi) =
        if model.delta_a <= model.delta_b { (model.delta_a, model.delta_b) } else { (model.delta_b, model.delta_a) };
    Ok(mean.clamp(lo, hi))
}
