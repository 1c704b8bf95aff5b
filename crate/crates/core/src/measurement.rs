//! Generalized measurements {M̂_r}: validation, canonical singular-value
//! form, outcome statistics and optimal state estimates.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{ginibre, psd_inverse_sqrt, svd, ComplexMatrix, StateVector, C64};

/// Default tolerance on ‖Σ M̂†M̂ − 𝟙‖_F.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Outcome probabilities below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;
/// Relative gap below which two singular values count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// An ordered set of Kraus operators acting on a d-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    label: String,
}

/// Result of a completeness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completeness {
    pub residual: f64,
    pub valid: bool,
}

impl Measurement {
    /// Checks shapes only; completeness is validated separately so that
    /// near-miss operator sets can still be inspected.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidArgument("a measurement needs at least one operator".into()))?;
        let dim = first.rows();
        for (r, op) in operators.iter().enumerate() {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::Dimension(format!(
                    "operator {r} is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(Self {
            dim,
            operators,
            label: String::new(),
        })
    }

    /// Shape check plus completeness at `tol`.
    pub fn checked(operators: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let m = Self::new(operators)?;
        m.ensure_complete(tol)?;
        Ok(m)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn operator(&self, r: usize) -> Result<&ComplexMatrix> {
        self.operators.get(r).ok_or(Error::OutOfRange {
            index: r,
            len: self.operators.len(),
        })
    }

    /// POVM elements M̂_r†M̂_r.
    pub fn effects(&self) -> Vec<ComplexMatrix> {
        self.operators.iter().map(|m| &m.adjoint() * m).collect()
    }

    pub fn validate_completeness(&self, tol: f64) -> Completeness {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for e in self.effects() {
            sum = &sum + &e;
        }
        let residual = (&sum - &ComplexMatrix::identity(self.dim)).frobenius_norm();
        Completeness {
            residual,
            valid: residual <= tol,
        }
    }

    pub fn ensure_complete(&self, tol: f64) -> Result<()> {
        let c = self.validate_completeness(tol);
        if c.valid {
            Ok(())
        } else {
            Err(Error::Incomplete {
                residual: c.residual,
                tolerance: tol,
            })
        }
    }

    /// Per-operator SVD with the right unitaries split off.
    pub fn canonicalize(&self) -> Result<CanonicalMeasurement> {
        CanonicalMeasurement::new(self.clone())
    }

    /// Singular table at the default completeness tolerance.
    pub fn singular_table(&self) -> Result<SingularTable> {
        self.singular_table_with_tol(COMPLETENESS_TOL)
    }

    pub fn singular_table_with_tol(&self, tol: f64) -> Result<SingularTable> {
        self.ensure_complete(tol)?;
        let lambda = self
            .operators
            .iter()
            .map(|m| svd(m).map(|s| s.singulars))
            .collect::<Result<Vec<_>>>()?;
        Ok(SingularTable {
            dim: self.dim,
            lambda,
        })
    }

    fn check_state(&self, psi: &StateVector) -> Result<()> {
        if psi.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "state of dimension {} for a {}-level measurement",
                psi.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    /// p(r, ψ) = ⟨ψ|M̂_r†M̂_r|ψ⟩.
    pub fn outcome_probability(&self, r: usize, psi: &StateVector) -> Result<f64> {
        self.check_state(psi)?;
        let out = self.operator(r)?.apply(psi.amplitudes());
        Ok(out.iter().map(C64::norm_sqr).sum::<f64>().min(1.0))
    }

    /// |ψ_r⟩ = M̂_r|ψ⟩/√p(r, ψ).
    pub fn post_measurement_state(&self, r: usize, psi: &StateVector) -> Result<StateVector> {
        self.check_state(psi)?;
        let out = self.operator(r)?.apply(psi.amplitudes());
        let p: f64 = out.iter().map(C64::norm_sqr).sum();
        if p < ZERO_PROBABILITY {
            return Err(Error::ImpossibleOutcome(p));
        }
        StateVector::normalized(out)
    }

    /// {U·M̂_r}: same information contents, different frame.
    pub fn left_multiplied(&self, u: &ComplexMatrix) -> Result<Self> {
        let ops = self
            .operators
            .iter()
            .map(|m| u.checked_mul(m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(ops)?.with_label(self.label.clone()))
    }

    /// Random measurement with `outcomes` operators, built by polar
    /// normalization M̂_r = G_r·(Σ G†G)^{-1/2} of Ginibre matrices.
    pub fn random<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Result<Self> {
        if dim < 1 || outcomes < 1 {
            return Err(Error::InvalidArgument(format!(
                "random measurement needs d >= 1 and n >= 1 (got d={dim}, n={outcomes})"
            )));
        }
        loop {
            let gs: Vec<ComplexMatrix> = (0..outcomes).map(|_| ginibre(dim, rng)).collect();
            let mut s = ComplexMatrix::zeros(dim, dim);
            for g in &gs {
                s = &s + &(&g.adjoint() * g);
            }
            // S is almost surely positive definite; resample on the null set.
            let Ok(inv) = psd_inverse_sqrt(&s) else {
                continue;
            };
            let ops = gs.iter().map(|g| g * &inv).collect();
            return Ok(Self::new(ops)?.with_label(format!("random d={dim} n={outcomes}")));
        }
    }
}

/// Sequential composition: operators M̂2_{r₂}·M̂1_{r₁} for every pair,
/// ordered with r₁ outer and r₂ inner.
pub fn compose_measurements(second: &Measurement, first: &Measurement) -> Result<Measurement> {
    if second.dim != first.dim {
        return Err(Error::Dimension(format!(
            "cannot compose a {}-level measurement after a {}-level one",
            second.dim, first.dim
        )));
    }
    let mut ops = Vec::with_capacity(first.outcomes() * second.outcomes());
    for m1 in &first.operators {
        for m2 in &second.operators {
            ops.push(m2 * m1);
        }
    }
    Ok(Measurement::new(ops)?.with_label(format!("({}) ∘ ({})", second.label, first.label)))
}

/// λ_i^r: singular values of every operator, decreasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTable {
    dim: usize,
    lambda: Vec<Vec<f64>>,
}

impl SingularTable {
    /// Builds a table from rows, validating shape, sign, ordering and the
    /// sum rule Σ_r Σ_i (λ_i^r)² = d.
    pub fn new(dim: usize, lambda: Vec<Vec<f64>>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidArgument("empty singular table".into()));
        }
        for (r, row) in lambda.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension(format!(
                    "row {r} has {} singular values, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {r} has a negative or non-finite entry")));
            }
            if row.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidArgument(format!("row {r} is not in decreasing order")));
            }
        }
        let t = Self { dim, lambda };
        let residual = (t.sum_of_squares() - dim as f64).abs();
        if residual > COMPLETENESS_TOL {
            return Err(Error::Incomplete {
                residual,
                tolerance: COMPLETENESS_TOL,
            });
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.lambda.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.lambda
    }

    pub fn get(&self, r: usize, i: usize) -> f64 {
        self.lambda[r][i]
    }

    /// λ_0^r.
    pub fn largest(&self, r: usize) -> f64 {
        self.lambda[r][0]
    }

    /// λ_{d−1}^r.
    pub fn smallest(&self, r: usize) -> f64 {
        self.lambda[r][self.dim - 1]
    }

    /// v_i = (λ_i^1, …, λ_i^n).
    pub fn column_vector(&self, i: usize) -> Vec<f64> {
        self.lambda.iter().map(|row| row[i]).collect()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.lambda.iter().flatten().map(|x| x * x).sum()
    }
}

/// A measurement together with M̂_r = V̂_r·D̂_r·Ŵ_r for every outcome.
///
/// `frame()` is the measurement {V̂_r·D̂_r}, i.e. the same operators with
/// Ŵ_r set to the identity.
#[derive(Debug, Clone)]
pub struct CanonicalMeasurement {
    original: Measurement,
    frame: Measurement,
    left: Vec<ComplexMatrix>,
    right: Vec<ComplexMatrix>,
    singulars: Vec<Vec<f64>>,
}

impl CanonicalMeasurement {
    fn new(original: Measurement) -> Result<Self> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut singulars = Vec::new();
        let mut frame_ops = Vec::new();
        for m in original.operators() {
            let s = svd(m)?;
            frame_ops.push(&s.left * &ComplexMatrix::from_diag(&s.singulars));
            left.push(s.left);
            right.push(s.right_adjoint);
            singulars.push(s.singulars);
        }
        let frame = Measurement::new(frame_ops)?.with_label(original.label().to_string());
        Ok(Self {
            original,
            frame,
            left,
            right,
            singulars,
        })
    }

    pub fn dim(&self) -> usize {
        self.original.dim()
    }

    pub fn outcomes(&self) -> usize {
        self.original.outcomes()
    }

    /// The measurement as supplied.
    pub fn original(&self) -> &Measurement {
        &self.original
    }

    /// {V̂_r·D̂_r}.
    pub fn frame(&self) -> &Measurement {
        &self.frame
    }

    /// {Ŵ_r†D̂_rŴ_r} = {√(M̂_r†M̂_r)}: the representative with the same POVM
    /// whose traces equal Σ_i λ_i^r, i.e. the frame that attains the
    /// maximal operation fidelity.
    pub fn positive_part(&self) -> Result<Measurement> {
        let ops = (0..self.outcomes())
            .map(|r| &(&self.right[r].adjoint() * &self.diagonal(r)) * &self.right[r])
            .collect();
        Ok(Measurement::new(ops)?.with_label(self.original.label().to_string()))
    }

    /// Optimal estimate for every outcome.
    pub fn optimal_estimates(&self) -> Result<Vec<StateVector>> {
        (0..self.outcomes()).map(|r| self.optimal_estimate(r)).collect()
    }

    /// V̂_r.
    pub fn left_unitary(&self, r: usize) -> &ComplexMatrix {
        &self.left[r]
    }

    /// Ŵ_r (identity when the operator was already of the form V̂·D̂).
    pub fn right_unitary(&self, r: usize) -> &ComplexMatrix {
        &self.right[r]
    }

    pub fn singulars(&self, r: usize) -> &[f64] {
        &self.singulars[r]
    }

    /// D̂_r.
    pub fn diagonal(&self, r: usize) -> ComplexMatrix {
        ComplexMatrix::from_diag(&self.singulars[r])
    }

    /// Singular table; fails when the measurement is incomplete.
    pub fn table(&self) -> Result<SingularTable> {
        self.table_with_tol(COMPLETENESS_TOL)
    }

    pub fn table_with_tol(&self, tol: f64) -> Result<SingularTable> {
        self.original.ensure_complete(tol)?;
        Ok(SingularTable {
            dim: self.dim(),
            lambda: self.singulars.clone(),
        })
    }

    /// max_r ‖V̂_r·D̂_r·Ŵ_r − M̂_r‖_F.
    pub fn reconstruction_residual(&self) -> f64 {
        (0..self.outcomes())
            .map(|r| {
                let rebuilt = &self.frame.operators()[r] * &self.right[r];
                (&rebuilt - &self.original.operators()[r]).frobenius_norm()
            })
            .fold(0.0, f64::max)
    }

    /// Estimate maximizing the estimation fidelity for outcome r: the
    /// right-singular vector of M̂_r with the largest singular value.
    ///
    /// When the top singular value is degenerate every vector in its
    /// subspace is optimal; the projection of the lowest-index
    /// computational basis ket with substantial weight is returned.
    pub fn optimal_estimate(&self, r: usize) -> Result<StateVector> {
        if r >= self.outcomes() {
            return Err(Error::OutOfRange {
                index: r,
                len: self.outcomes(),
            });
        }
        let d = self.dim();
        let s = &self.singulars[r];
        let w = &self.right[r];
        let top = s[0];
        let k = s
            .iter()
            .take_while(|&&x| top - x <= DEGENERACY_TOL * top.max(1.0))
            .count();
        // Row j of Ŵ is the conjugate of the j-th right-singular vector.
        let vectors: Vec<Vec<C64>> = (0..k)
            .map(|j| (0..d).map(|i| w.get(j, i).conj()).collect())
            .collect();
        if k == 1 {
            return Ok(StateVector::normalized(vectors[0].clone())?.with_canonical_phase());
        }
        let threshold = 1e-3 * k as f64 / d as f64;
        for basis in 0..d {
            let weight: f64 = vectors.iter().map(|v| v[basis].norm_sqr()).sum();
            if weight > threshold {
                let mut proj = vec![C64::default(); d];
                for v in &vectors {
                    let coef = v[basis].conj();
                    for (p, x) in proj.iter_mut().zip(v) {
                        *p += coef * x;
                    }
                }
                return Ok(StateVector::normalized(proj)?.with_canonical_phase());
            }
        }
        unreachable!("projections onto a non-empty subspace cannot all vanish")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_state, haar_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn weak(eta: f64) -> Measurement {
        Measurement::new(vec![
            ComplexMatrix::from_diag(&[0.0, eta.sqrt()]),
            ComplexMatrix::from_diag(&[1.0, (1.0 - eta).sqrt()]),
        ])
        .unwrap()
    }

    fn von_neumann(d: usize) -> Measurement {
        Measurement::new((0..d).map(|i| ComplexMatrix::unit(d, i, i)).collect()).unwrap()
    }

    #[test]
    fn completeness_examples() {
        let c = von_neumann(2).validate_completeness(1e-10);
        assert_eq!(c.residual, 0.0);
        assert!(c.valid);
        let c = weak(0.5).validate_completeness(1e-10);
        assert!(c.residual < 1e-15 && c.valid);
        let bad = Measurement::new(vec![
            ComplexMatrix::from_diag(&[0.9, 0.0]),
            ComplexMatrix::from_diag(&[0.0, 1.0]),
        ])
        .unwrap();
        let c = bad.validate_completeness(1e-10);
        assert!((c.residual - 0.19).abs() < 1e-12);
        assert!(!c.valid);
        assert!(matches!(bad.singular_table(), Err(Error::Incomplete { .. })));
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let e = Measurement::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]);
        assert!(matches!(e, Err(Error::Dimension(_))));
        assert!(Measurement::new(vec![]).is_err());
    }

    #[test]
    fn singular_table_examples() {
        let t = weak(0.36).singular_table().unwrap();
        assert!((t.get(0, 0) - 0.6).abs() < 1e-15 && t.get(0, 1) == 0.0);
        assert!((t.get(1, 0) - 1.0).abs() < 1e-15 && (t.get(1, 1) - 0.8).abs() < 1e-15);

        let t = von_neumann(3).singular_table().unwrap();
        for r in 0..3 {
            assert_eq!(t.rows()[r], vec![1.0, 0.0, 0.0]);
        }
        assert!((t.sum_of_squares() - 3.0).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = Measurement::new(vec![haar_unitary(4, &mut rng)]).unwrap();
        let t = u.singular_table().unwrap();
        for x in &t.rows()[0] {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn table_constructor_validates() {
        assert!(SingularTable::new(2, vec![vec![0.5, 1.0], vec![1.0, 0.5]]).is_err());
        assert!(SingularTable::new(2, vec![vec![1.0, 0.0]]).is_err());
        assert!(SingularTable::new(2, vec![vec![1.0, 1.0]]).is_ok());
    }

    #[test]
    fn probabilities_and_post_states() {
        let vn = von_neumann(2);
        let zero = StateVector::basis(2, 0).unwrap();
        assert_eq!(vn.outcome_probability(0, &zero).unwrap(), 1.0);
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        assert!((weak(0.5).outcome_probability(0, &plus).unwrap() - 0.25).abs() < 1e-15);
        assert!(vn.outcome_probability(2, &plus).is_err());

        let post = vn.post_measurement_state(0, &plus).unwrap();
        assert!((post.fidelity(&zero) - 1.0).abs() < 1e-15);
        assert!(matches!(
            vn.post_measurement_state(1, &zero),
            Err(Error::ImpossibleOutcome(_))
        ));

        let post = weak(0.75).post_measurement_state(1, &plus).unwrap();
        let expected = StateVector::from_real(&[1.0, 0.5]).unwrap();
        assert!((post.fidelity(&expected) - 1.0).abs() < 1e-14);
        assert!((post[0].re - 1.0 / 1.25f64.sqrt()).abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = haar_unitary(3, &mut rng);
        let m = Measurement::new(vec![u.clone()]).unwrap();
        let psi = haar_state(3, &mut rng).unwrap();
        let out = m.post_measurement_state(0, &psi).unwrap();
        let direct = StateVector::normalized(u.apply(psi.amplitudes())).unwrap();
        assert!((out.fidelity(&direct) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_probabilities_form_a_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for k in 0..1000 {
            let d = 2 + k % 4;
            let n = 1 + k % 5;
            let m = Measurement::random(d, n, &mut rng).unwrap();
            let psi = haar_state(d, &mut rng).unwrap();
            let total: f64 = (0..n).map(|r| m.outcome_probability(r, &psi).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(m.validate_completeness(1e-10).valid);
        }
    }

    #[test]
    fn canonical_form_of_diagonal_operators() {
        let m = Measurement::new(vec![
            ComplexMatrix::from_diag(&[0.8, 0.6]),
            ComplexMatrix::from_diag(&[0.6, 0.0]),
        ])
        .unwrap();
        let cm = m.canonicalize().unwrap();
        for r in 0..2 {
            assert_eq!(cm.left_unitary(r), &ComplexMatrix::identity(2));
            assert_eq!(cm.right_unitary(r), &ComplexMatrix::identity(2));
            assert_eq!(&cm.diagonal(r), m.operator(r).unwrap());
        }
    }

    #[test]
    fn canonical_form_recovers_left_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let u = haar_unitary(2, &mut rng);
        let op = &u * &ComplexMatrix::from_diag(&[0.8, 0.6]);
        let m = Measurement::new(vec![op.clone()]).unwrap();
        let cm = m.canonicalize().unwrap();
        let v = cm.left_unitary(0);
        assert!((&(v * &cm.diagonal(0)) - &(&op * &cm.right_unitary(0).adjoint())).frobenius_norm() < 1e-10);
        assert!(cm.reconstruction_residual() < 1e-10);
        // Columns agree with U up to a phase each.
        for j in 0..2 {
            let overlap: C64 = (0..2).map(|i| v.get(i, j).conj() * u.get(i, j)).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn optimal_estimates() {
        let cm = weak(0.3).canonicalize().unwrap();
        let e = cm.optimal_estimate(0).unwrap();
        assert!((e.fidelity(&StateVector::basis(2, 1).unwrap()) - 1.0).abs() < 1e-14);

        let cm = von_neumann(3).canonicalize().unwrap();
        for i in 0..3 {
            let e = cm.optimal_estimate(i).unwrap();
            assert!((e.fidelity(&StateVector::basis(3, i).unwrap()) - 1.0).abs() < 1e-14);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = Measurement::new(vec![haar_unitary(3, &mut rng)]).unwrap();
        let e = u.canonicalize().unwrap().optimal_estimate(0).unwrap();
        assert!((e.fidelity(&StateVector::basis(3, 0).unwrap()) - 1.0).abs() < 1e-12);
        assert!(cm.optimal_estimate(3).is_err());
    }

    #[test]
    fn composition() {
        let vn = von_neumann(2);
        let id = Measurement::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let c = compose_measurements(&vn, &id).unwrap();
        assert_eq!(c.operators(), vn.operators());

        let twice = compose_measurements(&vn, &vn).unwrap();
        assert_eq!(twice.outcomes(), 4);
        let nonzero: Vec<_> = twice
            .operators()
            .iter()
            .filter(|m| m.frobenius_norm() > 0.0)
            .collect();
        assert_eq!(nonzero.len(), 2);
        assert!(twice.validate_completeness(1e-14).valid);
        assert!(compose_measurements(&vn, &von_neumann(3)).is_err());
    }
}
