//! Haar-distributed states and unitaries.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, ComplexMatrix, StateVector, C64};
use crate::error::{Error, Result};

#[inline]
fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly (Fubini–Study) distributed pure state in dimension d ≥ 2.
pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<StateVector> {
    if d < 2 {
        return Err(Error::Dimension(format!("haar_state needs d >= 2, got {d}")));
    }
    let mut amps = Vec::with_capacity(d);
    fill_haar_amplitudes(&mut amps, d, rng);
    Ok(StateVector::from_normalized_unchecked(amps))
}

/// Overwrites `buf` with a Haar-random normalized amplitude vector.
pub(crate) fn fill_haar_amplitudes<R: Rng + ?Sized>(buf: &mut Vec<C64>, d: usize, rng: &mut R) {
    buf.clear();
    let mut norm2 = 0.0;
    for _ in 0..d {
        let z = gaussian_c64(rng);
        norm2 += z.norm_sqr();
        buf.push(z);
    }
    let inv = 1.0 / norm2.sqrt();
    buf.iter_mut().for_each(|z| *z *= inv);
}

/// d×d matrix of i.i.d. standard complex Gaussians (real and imaginary
/// parts each N(0,1)).
pub fn ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..d * d).map(|_| gaussian_c64(rng)).collect();
    ComplexMatrix::new(d, d, data).expect("finite gaussian entries")
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix. Gram–Schmidt
/// yields an R factor with positive real diagonal, which is what makes the
/// Q factor exactly Haar distributed.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = ginibre(d, rng);
        let mut cols: Vec<Vec<C64>> = (0..d).map(|j| g.column(j)).collect();
        let mut ok = true;
        for k in 0..d {
            for _ in 0..2 {
                for j in 0..k {
                    let proj: C64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a.conj() * b).sum();
                    let (done, rest) = cols.split_at_mut(k);
                    for (x, q) in rest[0].iter_mut().zip(&done[j]) {
                        *x -= proj * q;
                    }
                }
            }
            let n = cols[k].iter().map(C64::norm_sqr).sum::<f64>().sqrt();
            if n < 1e-8 {
                ok = false;
                break;
            }
            cols[k].iter_mut().for_each(|z| *z /= n);
        }
        if ok {
            let mut u = ComplexMatrix::zeros(d, d);
            for (j, col) in cols.iter().enumerate() {
                for (i, z) in col.iter().enumerate() {
                    u.set(i, j, *z);
                }
            }
            return u;
        }
    }
}
