//! Independent evaluation of the Haar averages behind every closed form.
//!
//! The exact path integrates two-copy quantities with
//! ∫dψ ⟨ψ|a|ψ⟩⟨ψ|b|ψ⟩ = (Tr a·Tr b + Tr(ab)) / (d(d+1)); the Monte Carlo path
//! samples Haar states directly.

use crate::error::{Error, Result};
use crate::linalg::random::fill_haar_amplitudes;
use crate::linalg::{ComplexMatrix, StateVector, C64};
use crate::measurement::Measurement;
use crate::montecarlo::{sample_mean, DEFAULT_CHUNK};
use crate::reversal::ReversalOperation;

/// Smallest sample count accepted by [`mc_average`].
pub const MIN_MC_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    ExactSchur,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    /// Zero for the exact path.
    pub std_error: f64,
    /// Per-sample variance of the integrand (zero for the exact path).
    pub sample_variance: f64,
    /// Zero for the exact path.
    pub samples: usize,
    pub method: OracleMethod,
}

impl OracleEstimate {
    fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            sample_variance: 0.0,
            samples: 0,
            method: OracleMethod::ExactSchur,
        }
    }

    /// |value − reference| measured in standard errors (∞ when the
    /// standard error vanishes and the values differ).
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = (self.value - reference).abs();
        if diff == 0.0 {
            0.0
        } else if self.std_error == 0.0 {
            f64::INFINITY
        } else {
            diff / self.std_error
        }
    }
}

fn check_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Dimension(format!(
            "Schur average of {}x{} and {}x{} matrices",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.rows())
}

/// ∫dψ ⟨ψ|a|ψ⟩⟨ψ|b|ψ⟩ as a complex number.
pub fn schur_pair_average_complex(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    let d = check_pair(a, b)? as f64;
    Ok((a.trace() * b.trace() + (a * b).trace()) / (d * (d + 1.0)))
}

/// ∫dψ ⟨ψ|a|ψ⟩⟨ψ|b|ψ⟩ (real part; exact for Hermitian a, b and for b = a†).
pub fn schur_pair_average(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(schur_pair_average_complex(a, b)?.re)
}

/// d²×d² swap operator Ŝ|i⟩|j⟩ = |j⟩|i⟩.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s.set(j * d + i, i * d + j, C64::new(1.0, 0.0));
        }
    }
    s
}

/// Twirl coefficients of Ô: ∫dU (Û⊗Û)Ô(Û⊗Û)† = α₁𝟙⊗𝟙 + α₂Ŝ.
pub fn twirl_coefficients(o: &ComplexMatrix, d: usize) -> Result<(C64, C64)> {
    if d < 2 || o.rows() != d * d || o.cols() != d * d {
        return Err(Error::Dimension(format!(
            "two-copy operator must be {0}x{0} with d >= 2",
            d * d
        )));
    }
    let tr_o = o.trace();
    let tr_os = (o * &swap_operator(d)).trace();
    let (d, d2) = (d as f64, (d * d) as f64);
    let denom = d2 * (d2 - 1.0);
    Ok(((d2 * tr_o - d * tr_os) / denom, (d2 * tr_os - d * tr_o) / denom))
}

/// Same average as [`schur_pair_average`] via the literal two-copy
/// construction: Ô = a⊗b, and ⟨ψψ|α₁𝟙 + α₂Ŝ|ψψ⟩ = α₁ + α₂.
pub fn schur_pair_average_two_copy(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let d = check_pair(a, b)?;
    let (a1, a2) = twirl_coefficients(&a.kron(b), d)?;
    Ok((a1 + a2).re)
}

/// 𝒢̄ = Σ_r ∫dψ p(r,ψ)|⟨ψ̃_r|ψ⟩|² for the given estimates.
pub fn exact_estimation_fidelity(m: &Measurement, estimates: &[StateVector]) -> Result<OracleEstimate> {
    check_estimates(m, estimates)?;
    let mut total = 0.0;
    for (op, est) in m.operators().iter().zip(estimates) {
        total += schur_pair_average(&(&op.adjoint() * op), &est.projector())?;
    }
    Ok(OracleEstimate::exact(total))
}

/// 𝒻̄ = Σ_r ∫dψ |⟨ψ|M̂_r|ψ⟩|² for the operators as given.
pub fn exact_operation_fidelity(m: &Measurement) -> Result<OracleEstimate> {
    let mut total = 0.0;
    for op in m.operators() {
        total += schur_pair_average(op, &op.adjoint())?;
    }
    Ok(OracleEstimate::exact(total))
}

/// 𝒻̄(R∘M) = Σ_{r,l} ∫dψ |⟨ψ|R̂_{r,l}M̂_r|ψ⟩|².
pub fn exact_overall_fidelity(m: &Measurement, rev: &ReversalOperation) -> Result<OracleEstimate> {
    let mut total = 0.0;
    for (op, _) in branch_products(m, rev, false)? {
        total += schur_pair_average(&op, &op.adjoint())?;
    }
    Ok(OracleEstimate::exact(total))
}

/// Success probability Σ_r Σ_{l<s_r} ∫dψ |⟨ψ|R̂_{r,l}M̂_r|ψ⟩|².
pub fn exact_reversibility(m: &Measurement, rev: &ReversalOperation) -> Result<OracleEstimate> {
    let mut total = 0.0;
    for (op, _) in branch_products(m, rev, true)? {
        total += schur_pair_average(&op, &op.adjoint())?;
    }
    Ok(OracleEstimate::exact(total))
}

fn check_estimates(m: &Measurement, estimates: &[StateVector]) -> Result<()> {
    if estimates.len() != m.outcomes() {
        return Err(Error::Dimension(format!(
            "{} estimates for {} outcomes",
            estimates.len(),
            m.outcomes()
        )));
    }
    if let Some(e) = estimates.iter().find(|e| e.dim() != m.dim()) {
        return Err(Error::Dimension(format!("estimate of dimension {} for d={}", e.dim(), m.dim())));
    }
    Ok(())
}

/// Products R̂_{r,l}M̂_r, optionally restricted to success branches, tagged
/// with their outcome index.
fn branch_products(m: &Measurement, rev: &ReversalOperation, success_only: bool) -> Result<Vec<(ComplexMatrix, usize)>> {
    if rev.dim() != m.dim() || rev.outcomes() != m.outcomes() {
        return Err(Error::Dimension("reversal does not match measurement".into()));
    }
    let mut out = Vec::new();
    for (r, op) in m.operators().iter().enumerate() {
        let count = if success_only { rev.success_count(r) } else { rev.operators(r).len() };
        for rl in &rev.operators(r)[..count] {
            out.push((rl * op, r));
        }
    }
    Ok(out)
}

/// Which average to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum McKind {
    Gain,
    OpFidelity,
    OverallFidelity,
    Reversibility,
}

impl McKind {
    pub const ALL: [McKind; 4] = [Self::Gain, Self::OpFidelity, Self::OverallFidelity, Self::Reversibility];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gain => "gain",
            Self::OpFidelity => "op_fidelity",
            Self::OverallFidelity => "overall_fidelity",
            Self::Reversibility => "reversibility",
        }
    }
}

/// A per-state integrand, with all operator products precomputed.
#[derive(Debug, Clone)]
pub enum Integrand {
    /// Σ_r ⟨ψ|M̂_r†M̂_r|ψ⟩·|⟨ψ̃_r|ψ⟩|².
    Gain {
        effects: Vec<ComplexMatrix>,
        estimates: Vec<StateVector>,
    },
    /// Σ_k |⟨ψ|Â_k|ψ⟩|².
    SquaredOverlaps(Vec<ComplexMatrix>),
}

impl Integrand {
    pub fn new(
        kind: McKind,
        m: &Measurement,
        rev: Option<&ReversalOperation>,
        estimates: Option<&[StateVector]>,
    ) -> Result<Self> {
        Ok(match kind {
            McKind::Gain => {
                let estimates = estimates.ok_or(Error::MissingInput("estimates for the gain average"))?;
                check_estimates(m, estimates)?;
                Self::Gain {
                    effects: m.effects(),
                    estimates: estimates.to_vec(),
                }
            }
            McKind::OpFidelity => Self::SquaredOverlaps(m.operators().to_vec()),
            McKind::OverallFidelity | McKind::Reversibility => {
                let rev = rev.ok_or(Error::MissingInput("reversal operation"))?;
                let ops = branch_products(m, rev, kind == McKind::Reversibility)?;
                Self::SquaredOverlaps(ops.into_iter().map(|(op, _)| op).collect())
            }
        })
    }

    /// Value at the (normalized) amplitudes ψ.
    #[inline]
    pub fn evaluate(&self, psi: &[C64]) -> f64 {
        match self {
            Self::Gain { effects, estimates } => effects
                .iter()
                .zip(estimates)
                .map(|(e, est)| {
                    let overlap: C64 = est.amplitudes().iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
                    e.quadratic_form(psi).re * overlap.norm_sqr()
                })
                .sum(),
            Self::SquaredOverlaps(ops) => ops.iter().map(|op| op.quadratic_form(psi).norm_sqr()).sum(),
        }
    }
}

/// Haar Monte Carlo estimate of the chosen average.
pub fn mc_average(
    kind: McKind,
    m: &Measurement,
    rev: Option<&ReversalOperation>,
    estimates: Option<&[StateVector]>,
    samples: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {samples}"
        )));
    }
    if m.dim() < 2 {
        return Err(Error::Dimension("Haar sampling needs d >= 2".into()));
    }
    let integrand = Integrand::new(kind, m, rev, estimates)?;
    let d = m.dim();
    let stats = sample_mean(
        samples,
        seed,
        DEFAULT_CHUNK,
        || Vec::with_capacity(d),
        |rng, buf| {
            fill_haar_amplitudes(buf, d, rng);
            Ok(integrand.evaluate(buf))
        },
    )?;
    Ok(OracleEstimate {
        value: stats.mean,
        std_error: stats.std_error(),
        sample_variance: stats.variance(),
        samples,
        method: OracleMethod::MonteCarlo,
    })
}
