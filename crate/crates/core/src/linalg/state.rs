use std::ops::Index;

use super::{c, ComplexMatrix, C64};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Normalized pure state |ψ⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized (to within 1e-10).
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if amps.is_empty() || (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!("state norm {n} is not 1")));
        }
        Ok(Self { amps })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if amps.is_empty() || n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Ok(Self { amps })
    }

    pub(crate) fn from_normalized_unchecked(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    /// Computational basis ket |i⟩.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::OutOfRange { index: i, len: d });
        }
        let mut amps = vec![C64::default(); d];
        amps[i] = c(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Real amplitudes, normalized.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "state dimension mismatch");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// ⟨ψ|M|ψ⟩.
    pub fn expectation(&self, m: &ComplexMatrix) -> C64 {
        m.quadratic_form(&self.amps)
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(self, self)
    }

    /// Same ray with the largest-magnitude amplitude made real and positive.
    pub fn with_canonical_phase(mut self) -> Self {
        if let Some(k) = (0..self.dim()).max_by(|&a, &b| {
            self.amps[a]
                .norm()
                .partial_cmp(&self.amps[b].norm())
                .unwrap()
                .then(b.cmp(&a))
        }) {
            let z = self.amps[k];
            if z.norm() > 0.0 {
                let phase = z.conj() / z.norm();
                self.amps.iter_mut().for_each(|a| *a *= phase);
            }
        }
        self
    }
}

impl Index<usize> for StateVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}
