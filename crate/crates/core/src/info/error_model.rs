//! Reversibility degraded by an error process acting after a successful
//! reversal.
//!
//! The recovered state ρ(ψ, ε) depends on an error strength ε ∈ [0, 1] drawn
//! from a density p(ε). The success fidelity
//! F_s = ∫dψ ∫dε p(ε) ⟨ψ|ρ(ψ, ε)|ψ⟩ multiplies the error-free success
//! probability Σ_r |η_{r,0}|².

use std::fmt::Debug;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::linalg::random::fill_haar_amplitudes;
use crate::linalg::{hermitian_eigen, ComplexMatrix, StateVector};
use crate::measurement::Measurement;
use crate::montecarlo::{sample_mean, DEFAULT_CHUNK};
use crate::reversal::{success_amplitude, ReversalOperation};

/// Tolerance for Hermiticity, unit trace and positivity of sampled ρ.
const DENSITY_TOL: f64 = 1e-10;
/// Tolerance on ∫₀¹ p(ε) dε.
const NORMALIZATION_TOL: f64 = 1e-6;
const SIMPSON_INTERVALS: usize = 20_000;
const MAX_REJECTIONS: usize = 1_000_000;

/// ψ, ε ↦ ρ(ψ, ε).
pub trait ErrorChannel: Debug + Send + Sync {
    fn apply(&self, psi: &StateVector, eps: f64) -> Result<ComplexMatrix>;
}

/// Probability density of the error strength on [0, 1].
pub trait ErrorDensity: Debug + Send + Sync {
    fn pdf(&self, eps: f64) -> f64;

    /// Inverse cumulative distribution, when available in closed form.
    fn inverse_cdf(&self, _u: f64) -> Option<f64> {
        None
    }

    /// Upper bound on the pdf, used for rejection sampling.
    fn pdf_bound(&self) -> f64;

    /// ∫₀¹ p(ε) dε, by composite Simpson quadrature unless overridden.
    fn normalization(&self) -> f64 {
        let h = 1.0 / SIMPSON_INTERVALS as f64;
        let mut s = self.pdf(0.0) + self.pdf(1.0);
        for k in 1..SIMPSON_INTERVALS {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * self.pdf(k as f64 * h);
        }
        s * h / 3.0
    }
}

/// Draws ε by inverse CDF when possible, otherwise by rejection.
pub fn sample_epsilon<R: RngCore + ?Sized>(density: &dyn ErrorDensity, rng: &mut R) -> Result<f64> {
    let u: f64 = rng.random();
    if let Some(eps) = density.inverse_cdf(u) {
        return Ok(eps);
    }
    let bound = density.pdf_bound();
    for _ in 0..MAX_REJECTIONS {
        let eps: f64 = rng.random();
        let y: f64 = rng.random::<f64>() * bound;
        if y < density.pdf(eps) {
            return Ok(eps);
        }
    }
    Err(Error::Model(format!(
        "rejection sampling failed after {MAX_REJECTIONS} proposals"
    )))
}

/// ρ = |ψ⟩⟨ψ| regardless of ε.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityChannel;

impl ErrorChannel for IdentityChannel {
    fn apply(&self, psi: &StateVector, _eps: f64) -> Result<ComplexMatrix> {
        Ok(psi.projector())
    }
}

/// ρ = (1−ε)|ψ⟩⟨ψ| + ε𝟙/d.
#[derive(Debug, Clone, Copy, Default)]
pub struct Depolarizing;

impl ErrorChannel for Depolarizing {
    fn apply(&self, psi: &StateVector, eps: f64) -> Result<ComplexMatrix> {
        let d = psi.dim();
        let mixed = ComplexMatrix::identity(d).scale_real(eps / d as f64);
        Ok(&psi.projector().scale_real(1.0 - eps) + &mixed)
    }
}

/// Uniform density on [lo, hi] ⊆ [0, 1].
#[derive(Debug, Clone, Copy)]
pub struct Uniform {
    lo: f64,
    hi: f64,
}

impl Uniform {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::Model(format!("uniform support [{lo}, {hi}] is not inside [0, 1]")));
        }
        Ok(Self { lo, hi })
    }

    /// Uniform on [0, 1].
    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

impl ErrorDensity for Uniform {
    fn pdf(&self, eps: f64) -> f64 {
        if (self.lo..=self.hi).contains(&eps) {
            1.0 / (self.hi - self.lo)
        } else {
            0.0
        }
    }

    fn inverse_cdf(&self, u: f64) -> Option<f64> {
        Some(self.lo + u * (self.hi - self.lo))
    }

    fn pdf_bound(&self) -> f64 {
        1.0 / (self.hi - self.lo)
    }

    fn normalization(&self) -> f64 {
        1.0
    }
}

/// Deterministic error strength ε₀.
#[derive(Debug, Clone, Copy)]
pub struct PointMass(pub f64);

impl ErrorDensity for PointMass {
    /// A Dirac mass has no pointwise density; report 0 and rely on the
    /// inverse CDF for sampling.
    fn pdf(&self, _eps: f64) -> f64 {
        0.0
    }

    fn inverse_cdf(&self, _u: f64) -> Option<f64> {
        Some(self.0)
    }

    fn pdf_bound(&self) -> f64 {
        f64::INFINITY
    }

    fn normalization(&self) -> f64 {
        1.0
    }
}

/// A channel paired with a density of its strength.
#[derive(Debug)]
pub struct ErrorModel {
    channel: Box<dyn ErrorChannel>,
    density: Box<dyn ErrorDensity>,
}

impl ErrorModel {
    /// Validates that the density integrates to one.
    pub fn new(channel: Box<dyn ErrorChannel>, density: Box<dyn ErrorDensity>) -> Result<Self> {
        let z = density.normalization();
        if !z.is_finite() || (z - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Model(format!("error density integrates to {z}, not 1")));
        }
        Ok(Self { channel, density })
    }

    /// No errors: F_s = 1.
    pub fn noiseless() -> Self {
        Self {
            channel: Box::new(IdentityChannel),
            density: Box::new(PointMass(0.0)),
        }
    }

    pub fn channel(&self) -> &dyn ErrorChannel {
        self.channel.as_ref()
    }

    pub fn density(&self) -> &dyn ErrorDensity {
        self.density.as_ref()
    }

    /// ⟨ψ|ρ(ψ,ε)|ψ⟩ for one (ψ, ε), validating ρ.
    pub fn recovered_fidelity(&self, psi: &StateVector, eps: f64) -> Result<f64> {
        let rho = self.channel.apply(psi, eps)?;
        validate_density(&rho, psi.dim())?;
        Ok(psi.expectation(&rho).re)
    }
}

fn validate_density(rho: &ComplexMatrix, d: usize) -> Result<()> {
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::Model(format!("channel returned a {}x{} matrix for d={d}", rho.rows(), rho.cols())));
    }
    if !rho.is_hermitian(DENSITY_TOL) {
        return Err(Error::Model("channel output is not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(Error::Model(format!("channel output has trace {tr}")));
    }
    let min = *hermitian_eigen(rho)?.values.last().expect("non-empty spectrum");
    if min < -DENSITY_TOL {
        return Err(Error::Model(format!("channel output has negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// ℛ under errors together with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReversibility {
    /// Σ_r |η_{r,0}|²·F̂_s.
    pub value: f64,
    /// Error-free success probability Σ_r |η_{r,0}|².
    pub base: f64,
    /// Monte Carlo estimate of F_s.
    pub success_fidelity: f64,
    /// Standard error of F̂_s.
    pub fidelity_std_error: f64,
    /// Standard error of `value`.
    pub std_error: f64,
    pub samples: usize,
}

/// Σ_r |η_{r,0}|²·F̂_s with F̂_s sampled over Haar states and ε ~ p(ε).
///
/// The reversal is not re-optimized for the error channel.
pub fn reversibility_with_errors(
    m: &Measurement,
    rev: &ReversalOperation,
    model: &ErrorModel,
    samples: usize,
    seed: u64,
) -> Result<ErrorReversibility> {
    let base: f64 = (0..m.outcomes())
        .filter(|&r| r < rev.outcomes() && rev.success_count(r) > 0)
        .map(|r| success_amplitude(rev, m, r).map(|eta| eta * eta))
        .sum::<Result<f64>>()?;
    if rev.outcomes() != m.outcomes() {
        return Err(Error::Dimension("reversal and measurement outcome counts differ".into()));
    }
    let d = m.dim();
    if d < 2 {
        return Err(Error::Dimension(format!("Haar sampling needs d >= 2, got {d}")));
    }
    let stats = sample_mean(samples, seed, DEFAULT_CHUNK, Vec::new, |rng, buf| {
        fill_haar_amplitudes(buf, d, rng);
        let psi = StateVector::from_normalized_unchecked(buf.clone());
        let eps = sample_epsilon(model.density(), rng)?;
        model.recovered_fidelity(&psi, eps)
    })?;
    Ok(ErrorReversibility {
        value: base * stats.mean,
        base,
        success_fidelity: stats.mean,
        fidelity_std_error: stats.std_error(),
        std_error: base * stats.std_error(),
        samples,
    })
}
