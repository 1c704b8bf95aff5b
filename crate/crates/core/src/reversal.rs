//! Reversing operations {R̂_{r,l}}: the optimal construction, success
//! amplitudes, branch application and the reversal singular table.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, StateVector, C64};
use crate::measurement::{CanonicalMeasurement, Measurement, ZERO_PROBABILITY};

/// Singular values at or below this are treated as zero when inverting.
pub const PSEUDO_INVERSE_CUTOFF: f64 = 1e-12;

/// Outcome-conditioned reversing operation. For outcome r the operators
/// R̂_{r,0}, …, R̂_{r,m_r−1} are applied; the first `success_count(r)` of
/// them are success branches (R̂_{r,l}M̂_r ∝ 𝟙).
#[derive(Debug, Clone, PartialEq)]
pub struct ReversalOperation {
    dim: usize,
    per_outcome: Vec<Vec<ComplexMatrix>>,
    success_count: Vec<usize>,
}

impl ReversalOperation {
    /// Checks shapes and success counts; completeness is reported by
    /// [`ReversalOperation::completeness_residual`].
    pub fn new(dim: usize, per_outcome: Vec<Vec<ComplexMatrix>>, success_count: Vec<usize>) -> Result<Self> {
        if per_outcome.len() != success_count.len() {
            return Err(Error::Dimension(format!(
                "{} operator groups but {} success counts",
                per_outcome.len(),
                success_count.len()
            )));
        }
        for (r, ops) in per_outcome.iter().enumerate() {
            if ops.is_empty() {
                return Err(Error::InvalidArgument(format!("outcome {r} has no reversing operators")));
            }
            if success_count[r] > ops.len() {
                return Err(Error::InvalidArgument(format!(
                    "outcome {r}: success count {} exceeds {} operators",
                    success_count[r],
                    ops.len()
                )));
            }
            for (l, op) in ops.iter().enumerate() {
                if op.rows() != dim || op.cols() != dim {
                    return Err(Error::Dimension(format!(
                        "reversing operator ({r}, {l}) is {}x{}, expected {dim}x{dim}",
                        op.rows(),
                        op.cols()
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            per_outcome,
            success_count,
        })
    }

    /// Do-nothing reversal: a single identity operator per outcome, with
    /// no branch flagged as success.
    pub fn identity(dim: usize, outcomes: usize) -> Self {
        Self {
            dim,
            per_outcome: vec![vec![ComplexMatrix::identity(dim)]; outcomes],
            success_count: vec![0; outcomes],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.per_outcome.len()
    }

    pub fn operators(&self, r: usize) -> &[ComplexMatrix] {
        &self.per_outcome[r]
    }

    pub fn groups(&self) -> &[Vec<ComplexMatrix>] {
        &self.per_outcome
    }

    pub fn success_count(&self, r: usize) -> usize {
        self.success_count[r]
    }

    pub fn success_counts(&self) -> &[usize] {
        &self.success_count
    }

    /// max_r ‖Σ_l R̂_{r,l}†R̂_{r,l} − 𝟙‖_F.
    pub fn completeness_residual(&self) -> f64 {
        let id = ComplexMatrix::identity(self.dim);
        self.per_outcome
            .iter()
            .map(|ops| {
                let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
                for op in ops {
                    sum = &sum + &(&op.adjoint() * op);
                }
                (&sum - &id).frobenius_norm()
            })
            .fold(0.0, f64::max)
    }

    fn check_against(&self, m: &Measurement) -> Result<()> {
        if m.dim() != self.dim || m.outcomes() != self.outcomes() {
            return Err(Error::Dimension(format!(
                "reversal for {} outcomes in d={} applied to {} outcomes in d={}",
                self.outcomes(),
                self.dim,
                m.outcomes(),
                m.dim()
            )));
        }
        Ok(())
    }

    /// For each outcome with a success branch: ‖R̂_{r,0}M̂_r − η_r𝟙‖_F with
    /// η_r = Tr(R̂_{r,0}M̂_r)/d. Outcomes without success branch report 0.
    pub fn success_residuals(&self, m: &Measurement) -> Result<Vec<f64>> {
        self.check_against(m)?;
        let d = self.dim as f64;
        Ok((0..self.outcomes())
            .map(|r| {
                if self.success_count[r] == 0 {
                    return 0.0;
                }
                let prod = &self.per_outcome[r][0] * &m.operators()[r];
                let eta = prod.trace() / d;
                (&prod - &ComplexMatrix::identity(self.dim).scale(eta)).frobenius_norm()
            })
            .collect())
    }

    /// The overall process R∘M as one measurement with operators
    /// R̂_{r,l}M̂_r, ordered by r then l.
    pub fn compose_with(&self, m: &Measurement) -> Result<Measurement> {
        self.check_against(m)?;
        let ops = self
            .per_outcome
            .iter()
            .zip(m.operators())
            .flat_map(|(rs, mr)| rs.iter().map(move |rl| rl * mr))
            .collect();
        Ok(Measurement::new(ops)?.with_label(format!("reversed {}", m.label())))
    }
}

/// Optimal reversal: for every outcome with λ_{d−1}^r > 0,
/// R̂_{r,0} = λ_{d−1}^r Ŵ_r†D̂_r⁻¹V̂_r† (success) and
/// R̂_{r,1} = Ŵ_r†√(𝟙 − (λ_{d−1}^r)²D̂_r⁻²)V̂_r† (principal completion).
/// Irreversible outcomes get a single identity operator and no success
/// branch. With Ŵ_r = 𝟙 these reduce to λ D̂⁻¹V̂† and √(𝟙−λ²D̂⁻²)V̂†.
pub fn optimal_reversal(cm: &CanonicalMeasurement) -> ReversalOperation {
    let d = cm.dim();
    let mut per_outcome = Vec::with_capacity(cm.outcomes());
    let mut success_count = Vec::with_capacity(cm.outcomes());
    for r in 0..cm.outcomes() {
        let s = cm.singulars(r);
        let min = s[d - 1];
        if min <= PSEUDO_INVERSE_CUTOFF {
            per_outcome.push(vec![ComplexMatrix::identity(d)]);
            success_count.push(0);
            continue;
        }
        let w_adj = cm.right_unitary(r).adjoint();
        let v_adj = cm.left_unitary(r).adjoint();
        let inv: Vec<f64> = s.iter().map(|&x| min / x).collect();
        let rest: Vec<f64> = inv.iter().map(|&x| completion_weight(x)).collect();
        let success = &(&w_adj * &ComplexMatrix::from_diag(&inv)) * &v_adj;
        let completion = &(&w_adj * &ComplexMatrix::from_diag(&rest)) * &v_adj;
        per_outcome.push(vec![success, completion]);
        success_count.push(1);
    }
    ReversalOperation {
        dim: d,
        per_outcome,
        success_count,
    }
}

/// Radicands of the completion below this are rounding noise from
/// degenerate singular values and are set to zero.
const COMPLETION_SNAP: f64 = 1e-14;

/// √(1 − x²), snapping near-degenerate directions to exactly zero so that
/// equal singular values give an exactly vanishing completion.
pub(crate) fn completion_weight(x: f64) -> f64 {
    let rad = 1.0 - x * x;
    if rad < COMPLETION_SNAP {
        0.0
    } else {
        rad.sqrt()
    }
}

/// |η_{r,0}| for the success branch: R̂_{r,0}M̂_r = η_{r,0}𝟙.
pub fn success_amplitude(rev: &ReversalOperation, m: &Measurement, r: usize) -> Result<f64> {
    rev.check_against(m)?;
    if r >= rev.outcomes() {
        return Err(Error::OutOfRange {
            index: r,
            len: rev.outcomes(),
        });
    }
    if rev.success_count[r] == 0 {
        return Err(Error::NoSuccessBranch(r));
    }
    let prod = &rev.per_outcome[r][0] * &m.operators()[r];
    Ok((prod.trace() / rev.dim as f64).norm())
}

/// Applies M̂_r then R̂_{r,l}: returns the normalized output state and the
/// joint probability ⟨ψ|M̂_r†R̂_{r,l}†R̂_{r,l}M̂_r|ψ⟩.
pub fn apply_reversal(
    rev: &ReversalOperation,
    m: &Measurement,
    r: usize,
    l: usize,
    psi: &StateVector,
) -> Result<(StateVector, f64)> {
    rev.check_against(m)?;
    if psi.dim() != rev.dim {
        return Err(Error::Dimension(format!("state of dimension {} for d={}", psi.dim(), rev.dim)));
    }
    let ops = rev.per_outcome.get(r).ok_or(Error::OutOfRange {
        index: r,
        len: rev.outcomes(),
    })?;
    let op = ops.get(l).ok_or(Error::OutOfRange { index: l, len: ops.len() })?;
    let out = op.apply(&m.operators()[r].apply(psi.amplitudes()));
    let p: f64 = out.iter().map(C64::norm_sqr).sum();
    if p < ZERO_PROBABILITY {
        return Err(Error::ImpossibleOutcome(p));
    }
    Ok((StateVector::normalized(out)?, p.min(1.0)))
}

/// λ_i^{r,l} = ‖R̂_{r,l}V̂_r|i⟩‖: the weight that branch l of outcome r puts on
/// the i-th singular direction of M̂_r.
///
/// Entries are aligned with the measurement's singular index i rather than
/// sorted, which is what the overall-fidelity formula pairs with λ_i^r.
/// For reversals of the form Ŵ'·D̂'·V̂_r† (including the optimal one) they
/// coincide with that operator's singular values; in general
/// Σ_l (λ_i^{r,l})² = 1 follows from completeness.
#[derive(Debug, Clone, PartialEq)]
pub struct ReversalSingularTable {
    dim: usize,
    lambda: Vec<Vec<Vec<f64>>>,
}

impl ReversalSingularTable {
    pub fn new(rev: &ReversalOperation, cm: &CanonicalMeasurement) -> Result<Self> {
        rev.check_against(cm.original())?;
        let d = rev.dim;
        let lambda = (0..rev.outcomes())
            .map(|r| {
                let v = cm.left_unitary(r);
                rev.per_outcome[r]
                    .iter()
                    .map(|op| {
                        let rv = op * v;
                        (0..d)
                            .map(|i| rv.column(i).iter().map(C64::norm_sqr).sum::<f64>().sqrt())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Self { dim: d, lambda })
    }

    /// Table with one identity branch per outcome (λ_i^{r,0} = 1).
    pub fn identity(dim: usize, outcomes: usize) -> Self {
        Self {
            dim,
            lambda: vec![vec![vec![1.0; dim]]; outcomes],
        }
    }

    /// Builds a table from raw entries `[r][l][i]`.
    pub fn from_entries(dim: usize, lambda: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        for (r, branches) in lambda.iter().enumerate() {
            if branches.is_empty() || branches.iter().any(|b| b.len() != dim) {
                return Err(Error::Dimension(format!("outcome {r} has malformed reversal rows")));
            }
        }
        Ok(Self { dim, lambda })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.lambda.len()
    }

    pub fn branches(&self, r: usize) -> &[Vec<f64>] {
        &self.lambda[r]
    }

    pub fn get(&self, r: usize, l: usize, i: usize) -> f64 {
        self.lambda[r][l][i]
    }

    /// max_{r,i} |Σ_l (λ_i^{r,l})² − 1|.
    pub fn completeness_residual(&self) -> f64 {
        self.lambda
            .iter()
            .flat_map(|branches| {
                (0..self.dim).map(move |i| (branches.iter().map(|b| b[i] * b[i]).sum::<f64>() - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }
}
