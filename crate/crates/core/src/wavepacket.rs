//! One-dimensional momentum-space probe wavefunctions.
//!
//! Three representations share one API:
//!
//! * [`Gaussian`]: the minimum-uncertainty packet
//!   ψ(p) = (2πσ²)^(-1/4) exp(-(p-c)²/(4σ²)) with σ = ħ/W;
//! * [`GaussianSum`]: a coherent sum Σ cᵢ gᵢ(p) of such packets, closed
//!   under displacement and superposition, with exact moments;
//! * [`Grid`]: uniform samples on a momentum window, displaced spectrally.
//!
//! Every analytic result has a grid counterpart, so each can check the other.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{self, Direction};
use crate::units::{Constants, UnitSystem};
#[allow(unused_imports)]
use num_traits::Float as _;

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// Default grid half-width in units of the pointer standard deviation.
pub const DEFAULT_HALF_WIDTH_SIGMAS: f64 = 10.0;
/// Smallest admissible grid.
pub const MIN_GRID_POINTS: usize = 16;

/// Norm, mean and standard deviation of |ψ(p)|².
///
/// `mean` and `std` refer to the normalized density even when `norm != 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub norm: f64,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    center: f64,
    width: f64,
    hbar: f64,
}

impl Gaussian {
    pub fn new(center: f64, width: f64, hbar: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidArgument("Gaussian width W must be positive"));
        }
        if !(hbar.is_finite() && hbar > 0.0) || !center.is_finite() {
            return Err(Error::InvalidArgument("Gaussian center and hbar must be finite"));
        }
        Ok(Gaussian { center, width, hbar })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Position-space width parameter W.
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Momentum standard deviation ħ/W.
    pub fn sigma(&self) -> f64 {
        self.hbar / self.width
    }

    pub fn eval(&self, p: f64) -> f64 {
        let s = self.sigma();
        let d = p - self.center;
        (2.0 * PI * s * s).powf(-0.25) * (-d * d / (4.0 * s * s)).exp()
    }

    fn shifted(&self, delta: f64) -> Self {
        Gaussian { center: self.center + delta, ..*self }
    }
}

/// Overlap and product density of two normalized real Gaussians.
///
/// g₁(p)g₂(p) = O · N(p; mean, var) with O = exp(ln_overlap).
#[derive(Debug, Clone, Copy)]
struct PairProduct {
    ln_overlap: f64,
    mean: f64,
    var: f64,
}

fn pair_product(a: &Gaussian, b: &Gaussian) -> PairProduct {
    let (s1, s2) = (a.sigma(), b.sigma());
    let v1 = s1 * s1;
    let v2 = s2 * s2;
    let vsum = v1 + v2;
    let d = a.center - b.center;
    PairProduct {
        ln_overlap: 0.5 * (2.0 * s1 * s2 / vsum).ln() - d * d / (4.0 * vsum),
        mean: (a.center * v2 + b.center * v1) / vsum,
        var: 2.0 * v1 * v2 / vsum,
    }
}

/// Coherent sum Σ cᵢ gᵢ(p) of normalized Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSum {
    terms: Vec<(Complex64, Gaussian)>,
}

impl GaussianSum {
    /// Builds the sum and rescales it to unit norm.
    pub fn new(terms: Vec<(Complex64, Gaussian)>) -> Result<Self> {
        let raw = GaussianSum { terms };
        let norm = raw.norm_sq();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument("Gaussian sum has zero norm"));
        }
        Ok(raw.scaled(Complex64::new(norm.sqrt().recip(), 0.0)))
    }

    pub(crate) fn unnormalized(terms: Vec<(Complex64, Gaussian)>) -> Self {
        GaussianSum { terms }
    }

    pub fn terms(&self) -> &[(Complex64, Gaussian)] {
        &self.terms
    }

    pub fn eval(&self, p: f64) -> Complex64 {
        self.terms.iter().map(|(c, g)| c * g.eval(p)).sum()
    }

    fn scaled(mut self, factor: Complex64) -> Self {
        for (c, _) in &mut self.terms {
            *c *= factor;
        }
        self
    }

    /// ∫|ψ|² dp. Written as |Σcᵢ|² + Σ c̄ᵢcⱼ(Oᵢⱼ − 1) so that nearly
    /// cancelling coefficients keep their relative precision.
    fn norm_sq(&self) -> f64 {
        let total: Complex64 = self.terms.iter().map(|(c, _)| c).sum();
        let mut acc = total.norm_sqr();
        for (i, (ci, gi)) in self.terms.iter().enumerate() {
            for (j, (cj, gj)) in self.terms.iter().enumerate() {
                if i == j {
                    continue;
                }
                let pp = pair_product(gi, gj);
                acc += (ci.conj() * cj).re * pp.ln_overlap.exp_m1();
            }
        }
        acc.max(0.0)
    }

    fn moments(&self) -> Moments {
        let norm = self.norm_sq();
        if norm == 0.0 || self.terms.is_empty() {
            return Moments { norm: 0.0, mean: 0.0, std: 0.0 };
        }
        let reference = self.terms.iter().map(|(_, g)| g.center).sum::<f64>() / self.terms.len() as f64;
        let mut first = 0.0;
        let mut second = 0.0;
        for (ci, gi) in &self.terms {
            for (cj, gj) in &self.terms {
                let pp = pair_product(gi, gj);
                let w = (ci.conj() * cj).re * pp.ln_overlap.exp();
                let m = pp.mean - reference;
                first += w * m;
                second += w * (m * m + pp.var);
            }
        }
        let shift = first / norm;
        let var = (second / norm - shift * shift).max(0.0);
        Moments { norm, mean: reference + shift, std: var.sqrt() }
    }

    fn overlap(&self, other: &GaussianSum) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ci, gi) in &self.terms {
            for (cj, gj) in &other.terms {
                acc += ci.conj() * cj * pair_product(gi, gj).ln_overlap.exp();
            }
        }
        acc
    }

    fn span(&self) -> (f64, f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sigma: f64 = 0.0;
        for (_, g) in &self.terms {
            lo = lo.min(g.center);
            hi = hi.max(g.center);
            sigma = sigma.max(g.sigma());
        }
        (lo, hi, sigma)
    }
}

/// Placement of a uniform periodic momentum grid. Node `k` sits at
/// `p_min + k (p_max - p_min) / n`, so `p_max` itself is excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub p_min: f64,
    pub p_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(p_min: f64, p_max: f64, n: usize) -> Result<Self> {
        if n < MIN_GRID_POINTS {
            return Err(Error::InvalidArgument("grid needs at least 16 points"));
        }
        if !(p_min.is_finite() && p_max.is_finite() && p_min < p_max) {
            return Err(Error::InvalidArgument("grid needs finite p_min < p_max"));
        }
        Ok(GridSpec { p_min, p_max, n })
    }

    pub fn centered(mean: f64, half_width: f64, n: usize) -> Result<Self> {
        Self::new(mean - half_width, mean + half_width, n)
    }

    pub fn spacing(&self) -> f64 {
        (self.p_max - self.p_min) / self.n as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.p_min + k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.node(k))
    }

    fn compatible(&self, other: &GridSpec) -> bool {
        let tol = 1e-12 * (self.p_max - self.p_min);
        self.n == other.n && (self.p_min - other.p_min).abs() <= tol && (self.p_max - other.p_max).abs() <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    spec: GridSpec,
    amplitudes: Vec<Complex64>,
}

impl Grid {
    /// Wraps samples and normalizes them.
    pub fn new(spec: GridSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        let grid = Self::unnormalized(spec, amplitudes)?;
        let norm = grid.norm_sq();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument("grid amplitudes have zero norm"));
        }
        Ok(grid.scaled(norm.sqrt().recip()))
    }

    pub(crate) fn unnormalized(spec: GridSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        let spec = GridSpec::new(spec.p_min, spec.p_max, spec.n)?;
        if amplitudes.len() != spec.n {
            return Err(Error::InvalidArgument("amplitude count does not match grid size"));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidArgument("grid amplitudes must be finite"));
        }
        Ok(Grid { spec, amplitudes })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amps = spec.nodes().map(f).collect();
        Self::new(spec, amps)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.spec.nodes().zip(self.amplitudes.iter().copied())
    }

    fn scaled(mut self, factor: f64) -> Self {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
        self
    }

    fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.spec.spacing()
    }

    fn moments(&self) -> Moments {
        let dp = self.spec.spacing();
        let norm = self.norm_sq();
        if norm == 0.0 {
            return Moments { norm, mean: 0.0, std: 0.0 };
        }
        let mean = self.iter().map(|(p, a)| p * a.norm_sqr()).sum::<f64>() * dp / norm;
        let var = self.iter().map(|(p, a)| (p - mean) * (p - mean) * a.norm_sqr()).sum::<f64>() * dp / norm;
        Moments { norm, mean, std: var.max(0.0).sqrt() }
    }

    fn displaced(&self, delta: f64) -> Result<Self> {
        let span = self.spec.p_max - self.spec.p_min;
        if !(delta.abs() < span / 4.0) {
            return Err(Error::Domain("grid displacement exceeds a quarter of the window"));
        }
        if delta == 0.0 {
            return Ok(self.clone());
        }
        // Zero-pad to twice the window so content leaving one edge is dropped
        // instead of wrapping around to the other.
        let n = self.spec.n;
        let m = 2 * n;
        let period = 2.0 * span;
        let mut buf = alloc::vec![Complex64::new(0.0, 0.0); m];
        buf[..n].copy_from_slice(&self.amplitudes);
        fft::transform(&mut buf, Direction::Forward);
        for (j, x) in buf.iter_mut().enumerate() {
            let f = fft::signed_index(j, m);
            let phase = -2.0 * PI * f * delta / period;
            if j == n {
                // Nyquist bin: the symmetric interpolant is a cosine
                *x *= phase.cos();
            } else {
                *x *= Complex64::from_polar(1.0, phase);
            }
        }
        fft::transform(&mut buf, Direction::Inverse);
        buf.truncate(n);
        let inv_m = 1.0 / m as f64;
        for x in &mut buf {
            *x *= inv_m;
        }
        Ok(Grid { spec: self.spec, amplitudes: buf })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Wavepacket {
    Gaussian(Gaussian),
    Sum(GaussianSum),
    Grid(Grid),
}

impl Wavepacket {
    /// Minimum-uncertainty packet centred on `center` with position width
    /// `width`: mean `center`, momentum spread ħ/W.
    pub fn gaussian(center: f64, width: f64, system: UnitSystem) -> Result<Self> {
        let hbar = match system {
            UnitSystem::Si => Constants::SI.hbar,
            UnitSystem::Natural => 1.0,
        };
        Ok(Wavepacket::Gaussian(Gaussian::new(center, width, hbar)?))
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Wavepacket::Grid(_))
    }

    /// Amplitude at `p`; `None` for grid packets.
    pub fn eval(&self, p: f64) -> Option<Complex64> {
        match self {
            Wavepacket::Gaussian(g) => Some(Complex64::new(g.eval(p), 0.0)),
            Wavepacket::Sum(s) => Some(s.eval(p)),
            Wavepacket::Grid(_) => None,
        }
    }

    pub fn moments(&self) -> Moments {
        match self {
            Wavepacket::Gaussian(g) => Moments { norm: 1.0, mean: g.center, std: g.sigma() },
            Wavepacket::Sum(s) => s.moments(),
            Wavepacket::Grid(g) => g.moments(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Wavepacket::Gaussian(_) => 1.0,
            Wavepacket::Sum(s) => s.norm_sq(),
            Wavepacket::Grid(g) => g.norm_sq(),
        }
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument("cannot normalize a zero wavefunction"));
        }
        let f = norm.sqrt().recip();
        Ok(match self {
            Wavepacket::Gaussian(g) => Wavepacket::Gaussian(*g),
            Wavepacket::Sum(s) => Wavepacket::Sum(s.clone().scaled(Complex64::new(f, 0.0))),
            Wavepacket::Grid(g) => Wavepacket::Grid(g.clone().scaled(f)),
        })
    }

    /// Returns ψ(p − δ).
    pub fn displace(&self, delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::InvalidArgument("displacement must be finite"));
        }
        Ok(match self {
            Wavepacket::Gaussian(g) => Wavepacket::Gaussian(g.shifted(delta)),
            Wavepacket::Sum(s) => {
                Wavepacket::Sum(GaussianSum { terms: s.terms.iter().map(|(c, g)| (*c, g.shifted(delta))).collect() })
            }
            Wavepacket::Grid(g) => Wavepacket::Grid(g.displaced(delta)?),
        })
    }

    /// The grid this packet would naturally be sampled on: n = 2048 spanning
    /// ±10σ beyond the outermost component centre.
    pub fn default_grid(&self) -> GridSpec {
        match self {
            Wavepacket::Grid(g) => g.spec,
            _ => {
                let (lo, hi, sigma) = self.as_sum().span();
                let half = DEFAULT_HALF_WIDTH_SIGMAS * sigma;
                GridSpec { p_min: lo - half, p_max: hi + half, n: DEFAULT_GRID_POINTS }
            }
        }
    }

    /// Samples onto `spec` without renormalizing.
    pub fn sample(&self, spec: &GridSpec) -> Result<Grid> {
        match self {
            Wavepacket::Grid(g) => {
                if g.spec.compatible(spec) {
                    Ok(g.clone())
                } else {
                    Err(Error::Domain("grid packet cannot be resampled onto a different grid"))
                }
            }
            analytic => {
                let amps = spec.nodes().map(|p| analytic.eval(p).unwrap_or_default()).collect();
                Grid::unnormalized(*spec, amps)
            }
        }
    }

    fn as_sum(&self) -> GaussianSum {
        match self {
            Wavepacket::Gaussian(g) => GaussianSum { terms: alloc::vec![(Complex64::new(1.0, 0.0), *g)] },
            Wavepacket::Sum(s) => s.clone(),
            Wavepacket::Grid(_) => unreachable!("grid packets have no analytic form"),
        }
    }

    /// Unnormalized linear combination Σ cₖ ψₖ. Analytic inputs stay analytic;
    /// any grid input forces every term onto that grid.
    pub fn combine(terms: &[(Complex64, &Wavepacket)]) -> Result<Wavepacket> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("empty superposition"));
        }
        let grid_spec = terms.iter().find_map(|(_, w)| match w {
            Wavepacket::Grid(g) => Some(g.spec),
            _ => None,
        });
        match grid_spec {
            None => {
                let mut out = Vec::new();
                for (c, w) in terms {
                    out.extend(w.as_sum().terms.into_iter().map(|(d, g)| (c * d, g)));
                }
                Ok(Wavepacket::Sum(GaussianSum::unnormalized(out)))
            }
            Some(spec) => {
                let mut acc = alloc::vec![Complex64::new(0.0, 0.0); spec.n];
                for (c, w) in terms {
                    let g = w.sample(&spec)?;
                    for (a, b) in acc.iter_mut().zip(&g.amplitudes) {
                        *a += c * b;
                    }
                }
                Ok(Wavepacket::Grid(Grid::unnormalized(spec, acc)?))
            }
        }
    }
}

/// ∫ ψ₁*(p) ψ₂(p) dp.
pub fn overlap(a: &Wavepacket, b: &Wavepacket) -> Result<Complex64> {
    match (a, b) {
        (Wavepacket::Grid(ga), Wavepacket::Grid(gb)) => {
            if !ga.spec.compatible(&gb.spec) {
                return Err(Error::Domain("overlap of grids with different windows"));
            }
            let s: Complex64 = ga.amplitudes.iter().zip(&gb.amplitudes).map(|(x, y)| x.conj() * y).sum();
            Ok(s * ga.spec.spacing())
        }
        (Wavepacket::Grid(g), analytic) => {
            let s: Complex64 = g.iter().map(|(p, x)| x.conj() * analytic.eval(p).unwrap_or_default()).sum();
            Ok(s * g.spec.spacing())
        }
        (_, Wavepacket::Grid(_)) => overlap(b, a).map(|z| z.conj()),
        (x, y) => Ok(x.as_sum().overlap(&y.as_sum())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn natural(center: f64) -> Wavepacket {
        Wavepacket::gaussian(center, 1.0, UnitSystem::Natural).unwrap()
    }

    fn fig2_sum() -> Wavepacket {
        let beta = 0.9;
        let alpha = (1.0f64 - beta * beta).sqrt();
        let b = natural(0.1);
        let a = natural(0.7);
        Wavepacket::combine(&[(Complex64::new(beta, 0.0), &b), (Complex64::new(-alpha, 0.0), &a)]).unwrap()
    }

    #[test]
    fn gaussian_moments_are_exact() {
        let g = Wavepacket::gaussian(0.25, 1e-5, UnitSystem::Si).unwrap();
        let m = g.moments();
        assert_eq!(m.mean, 0.25);
        assert_eq!(m.std, crate::units::HBAR_SI / 1e-5);
        assert!(Wavepacket::gaussian(0.0, 0.0, UnitSystem::Natural).is_err());
        assert!(Wavepacket::gaussian(0.0, -1.0, UnitSystem::Natural).is_err());
    }

    #[test]
    fn sampled_gaussian_is_normalized() {
        let spec = GridSpec::centered(0.0, 10.0, 2048).unwrap();
        let g = natural(0.0).sample(&spec).unwrap();
        let m = Wavepacket::Grid(g).moments();
        assert!((m.norm - 1.0).abs() < 1e-10);
        assert!((m.std - 1.0).abs() < 1e-10);
    }

    #[test]
    fn grid_displacement_matches_analytic() {
        // n = 1024 over ±8 ħ/W, shift 0.3 ħ/W
        let spec = GridSpec::centered(0.0, 8.0, 1024).unwrap();
        let grid = Wavepacket::Grid(Grid::from_fn(spec, |p| natural(0.0).eval(p).unwrap()).unwrap());
        let shifted = grid.displace(0.3).unwrap();
        let target = natural(0.3);
        let Wavepacket::Grid(g) = shifted else { panic!() };
        // nodes whose source point p - δ lies outside the window carry no data
        for (p, a) in g.iter().filter(|(p, _)| p - 0.3 >= spec.p_min) {
            let err = (a - target.eval(p).unwrap()).norm();
            assert!(err < 1e-8, "p={p} err={err}");
        }
    }

    #[test]
    fn grid_displacement_guard() {
        let spec = GridSpec::centered(0.0, 8.0, 64).unwrap();
        let g = Wavepacket::Grid(Grid::from_fn(spec, |p| natural(0.0).eval(p).unwrap()).unwrap());
        assert!(matches!(g.displace(4.0), Err(Error::Domain(_))));
        assert!(g.displace(3.9).is_ok());
        assert_eq!(g.displace(0.0).unwrap(), g);
    }

    #[test]
    fn gaussian_overlap_closed_form() {
        let z = overlap(&natural(0.0), &natural(0.6)).unwrap();
        // exp(-0.6²/8) = exp(-0.045); quadrature oracle gives 0.955997481833...
        assert!((z.re - 0.955_997_481_833_099_9).abs() < 1e-14);
        assert_eq!(z.im, 0.0);
        let mut last = 1.0;
        for k in 1..40 {
            let v = overlap(&natural(0.0), &natural(k as f64 * 0.5)).unwrap().re;
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-20);
    }

    #[test]
    fn fig2_superposition_mean() {
        let m = fig2_sum().moments();
        // adaptive quadrature of |0.9ψ(p-0.1) - √0.19ψ(p-0.7)|² (mpmath, 30 digits)
        assert!((m.mean - -0.344_230_278_083_941_9).abs() < 1e-12);
        assert!((m.norm - 0.249_922_645_553_828_18).abs() < 1e-12);
        assert!((m.std - 0.897_904_626_373_216_3).abs() < 1e-12);
        assert!(m.mean < 0.0);
    }

    #[test]
    fn common_displacement_factors_out() {
        let d = 0.37;
        let s =
            Wavepacket::combine(&[(Complex64::new(0.8, 0.0), &natural(d)), (Complex64::new(-0.6, 0.0), &natural(d))])
                .unwrap();
        assert!((s.moments().mean - d).abs() < 1e-14);
    }

    #[test]
    fn mixed_grid_and_analytic_combination() {
        let spec = GridSpec::centered(0.0, 10.0, 2048).unwrap();
        let grid_b = Wavepacket::Grid(natural(0.1).sample(&spec).unwrap());
        let beta = 0.9;
        let alpha = (1.0f64 - beta * beta).sqrt();
        let mixed =
            Wavepacket::combine(&[(Complex64::new(beta, 0.0), &grid_b), (Complex64::new(-alpha, 0.0), &natural(0.7))])
                .unwrap();
        let exact = fig2_sum().moments();
        let m = mixed.moments();
        assert!((m.mean - exact.mean).abs() < 1e-9);
        assert!((m.norm - exact.norm).abs() < 1e-9);
    }

    #[test]
    fn incompatible_grids_are_rejected() {
        let a = Wavepacket::Grid(natural(0.0).sample(&GridSpec::centered(0.0, 10.0, 256).unwrap()).unwrap());
        let b = Wavepacket::Grid(natural(0.0).sample(&GridSpec::centered(0.0, 9.0, 256).unwrap()).unwrap());
        assert!(matches!(overlap(&a, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn grid_constructor_validates() {
        let spec = GridSpec { p_min: 0.0, p_max: 1.0, n: 16 };
        assert!(Grid::new(spec, alloc::vec![Complex64::new(0.0, 0.0); 16]).is_err());
        assert!(Grid::new(spec, alloc::vec![Complex64::new(1.0, 0.0); 15]).is_err());
        assert!(GridSpec::new(0.0, 1.0, 15).is_err());
        assert!(GridSpec::new(1.0, 1.0, 32).is_err());
        let mut amps = alloc::vec![Complex64::new(1.0, 0.0); 16];
        amps[3] = Complex64::new(f64::NAN, 0.0);
        assert!(Grid::new(spec, amps).is_err());
    }

    proptest! {
        #[test]
        fn displacement_is_unitary(center in -2.0f64..2.0, delta in -4.0f64..4.0) {
            let spec = GridSpec::centered(0.0, 16.0, 512).unwrap();
            let g = Wavepacket::Grid(Grid::from_fn(spec, |p| natural(center).eval(p).unwrap()).unwrap());
            let d = g.displace(delta).unwrap();
            prop_assert!((d.norm() - g.norm()).abs() < 1e-10);
            let s = fig2_sum().normalize().unwrap();
            prop_assert!((s.displace(delta).unwrap().norm() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn cauchy_schwarz(c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, w in 0.3f64..3.0) {
            let a = natural(c1);
            let b = Wavepacket::gaussian(c2, w, UnitSystem::Natural).unwrap();
            prop_assert!(overlap(&a, &b).unwrap().norm() <= 1.0 + 1e-12);
            let s = fig2_sum().normalize().unwrap();
            prop_assert!(overlap(&s, &b).unwrap().norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn grid_agrees_with_analytic(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0) {
            let spec = GridSpec::centered(0.0, 10.0, 2048).unwrap();
            let a = natural(c1);
            let b = natural(c2);
            let ga = Wavepacket::Grid(a.sample(&spec).unwrap());
            let gb = Wavepacket::Grid(b.sample(&spec).unwrap());
            let exact = overlap(&a, &b).unwrap();
            prop_assert!((overlap(&ga, &gb).unwrap() - exact).norm() < 1e-6);
            prop_assert!((overlap(&ga, &b).unwrap() - exact).norm() < 1e-6);
            let (ma, mg) = (a.moments(), ga.moments());
            prop_assert!((ma.mean - mg.mean).abs() < 1e-6);
            prop_assert!((ma.std - mg.std).abs() < 1e-6);
            prop_assert!((ma.norm - mg.norm).abs() < 1e-6);
        }
    }
}
