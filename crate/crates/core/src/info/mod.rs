//! Closed-form information contents computed from singular tables.
//!
//! With λ_i^r the decreasing singular values of M̂_r:
//!
//! * gain        𝒢 = (d + Σ_r (λ_0^r)²) / (d(d+1))
//! * fidelity    𝒻 = (d + Σ_r (Σ_i λ_i^r)²) / (d(d+1)),  𝒟 = 1 − 𝒻
//! * overall     𝒻(R∘M) = (d + Σ_{r,l} (Σ_i λ_i^r λ_i^{r,l})²) / (d(d+1))
//! * reversibility ℛ = Σ_r (λ_{d−1}^r)²

mod error_model;

pub use error_model::{
    reversibility_with_errors, sample_epsilon, Depolarizing, ErrorChannel, ErrorDensity, ErrorModel,
    ErrorReversibility, IdentityChannel, PointMass, Uniform,
};

use crate::error::{Error, Result};
use crate::measurement::{Measurement, SingularTable};
use crate::reversal::ReversalSingularTable;

/// Where a set of information contents came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    ExactOracle,
    MonteCarlo,
}

/// (𝒢, 𝒻, 𝒟, ℛ) for a measurement in dimension d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoContents {
    pub dim: usize,
    pub gain: f64,
    pub op_fidelity: f64,
    pub disturbance: f64,
    pub reversibility: f64,
    pub provenance: Provenance,
}

impl InfoContents {
    /// Contents from explicit values, e.g. closed forms of a family.
    pub fn new(dim: usize, gain: f64, op_fidelity: f64, reversibility: f64) -> Self {
        Self {
            dim,
            gain,
            op_fidelity,
            disturbance: 1.0 - op_fidelity,
            reversibility,
            provenance: Provenance::Analytic,
        }
    }

    pub fn from_table(t: &SingularTable) -> Self {
        Self::new(
            t.dim(),
            information_gain(t),
            operation_fidelity(t),
            reversibility(t),
        )
    }

    pub fn of(m: &Measurement) -> Result<Self> {
        Ok(Self::from_table(&m.singular_table()?))
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Checks 1/d ≤ 𝒢 ≤ 2/(d+1), 2/(d+1) ≤ 𝒻 ≤ 1 and 0 ≤ ℛ ≤ 1 within `tol`.
    pub fn check_ranges(&self, tol: f64) -> Result<()> {
        let d = self.dim as f64;
        let checks = [
            ("gain", self.gain, 1.0 / d, 2.0 / (d + 1.0)),
            ("operation fidelity", self.op_fidelity, 2.0 / (d + 1.0), 1.0),
            ("reversibility", self.reversibility, 0.0, 1.0),
        ];
        for (name, value, lo, hi) in checks {
            if !(value >= lo - tol && value <= hi + tol) {
                return Err(Error::InvalidArgument(format!(
                    "{name} {value} outside [{lo}, {hi}] for d={}",
                    self.dim
                )));
            }
        }
        Ok(())
    }
}

fn normalizer(d: usize) -> f64 {
    let d = d as f64;
    d * (d + 1.0)
}

/// 𝒢 from the largest singular value of each operator.
pub fn information_gain(t: &SingularTable) -> f64 {
    let top: f64 = (0..t.outcomes()).map(|r| t.largest(r).powi(2)).sum();
    (t.dim() as f64 + top) / normalizer(t.dim())
}

/// 𝒻, maximized over the unitary freedom M̂_r → Û_r M̂_r.
pub fn operation_fidelity(t: &SingularTable) -> f64 {
    let s: f64 = t.rows().iter().map(|row| row.iter().sum::<f64>().powi(2)).sum();
    (t.dim() as f64 + s) / normalizer(t.dim())
}

/// 𝒟 = 1 − 𝒻.
pub fn disturbance(t: &SingularTable) -> f64 {
    1.0 - operation_fidelity(t)
}

/// ℛ from the smallest singular value of each operator.
pub fn reversibility(t: &SingularTable) -> f64 {
    (0..t.outcomes()).map(|r| t.smallest(r).powi(2)).sum()
}

/// 𝒻(R∘M) from the measurement and reversal singular tables.
pub fn overall_fidelity(t: &SingularTable, rt: &ReversalSingularTable) -> Result<f64> {
    if t.dim() != rt.dim() || t.outcomes() != rt.outcomes() {
        return Err(Error::Dimension(format!(
            "measurement table is {}x{}, reversal table is {}x{}",
            t.outcomes(),
            t.dim(),
            rt.outcomes(),
            rt.dim()
        )));
    }
    let mut s = 0.0;
    for (r, row) in t.rows().iter().enumerate() {
        for branch in rt.branches(r) {
            let inner: f64 = row.iter().zip(branch).map(|(a, b)| a * b).sum();
            s += inner * inner;
        }
    }
    Ok((t.dim() as f64 + s) / normalizer(t.dim()))
}

/// 𝒻̄ = (d + Σ_r |Tr M̂_r|²)/(d(d+1)) for the operators exactly as given,
/// without maximizing over unitary freedom.
pub fn average_operation_fidelity(m: &Measurement) -> f64 {
    let s: f64 = m.operators().iter().map(|op| op.trace().norm_sqr()).sum();
    (m.dim() as f64 + s) / normalizer(m.dim())
}
