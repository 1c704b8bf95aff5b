//! Jacobi-type decompositions: one-sided Jacobi SVD and cyclic Jacobi
//! Hermitian eigensolver.
//!
//! Both are quadratically convergent and accurate to a few ulps on the
//! matrix sizes this crate targets; one-sided Jacobi also resolves small
//! singular values to high relative accuracy. Sorting is stable: among
//! equal singular values (or eigenvalues) the column that ended up first
//! after the sweeps keeps its place, so repeated calls on the same input
//! give bit-identical results.

use super::{c, ComplexMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
const ORTH_EPS: f64 = 1e-15;

/// M = left · diag(singulars) · right_adjoint, singulars decreasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left: ComplexMatrix,
    pub singulars: Vec<f64>,
    pub right_adjoint: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_diag(&self.singulars);
        &(&self.left * &d) * &self.right_adjoint
    }

    /// ‖V·D·W − m‖_F.
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> f64 {
        (&self.reconstruct() - m).frobenius_norm()
    }
}

/// Singular value decomposition of a square matrix.
pub fn svd(m: &ComplexMatrix) -> Result<SvdResult> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "svd needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let d = m.rows();
    let mut a: Vec<Vec<C64>> = (0..d).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..d)
        .map(|j| (0..d).map(|i| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();

    // Columns below this squared norm are rounding noise: their direction
    // is meaningless, so they never need to be orthogonalized.
    let noise = (d as f64 * f64::EPSILON * m.frobenius_norm()).powi(2);
    let mut converged = d == 1;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let alpha: f64 = a[p].iter().map(C64::norm_sqr).sum();
                let beta: f64 = a[q].iter().map(C64::norm_sqr).sum();
                if alpha.min(beta) <= noise {
                    continue;
                }
                let gamma: C64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= ORTH_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g; // e^{-iφ}
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_pair(&mut a, p, q, cs, sn, phase);
                rotate_pair(&mut v, p, q, cs, sn, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "svd",
            iterations: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(C64::norm_sqr).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let smax = norms[order[0]];
    let cutoff = smax * (d as f64) * 1e-15;
    let mut u_cols: Vec<Option<Vec<C64>>> = order
        .iter()
        .map(|&j| {
            let s = norms[j];
            (s > cutoff && s > 0.0).then(|| a[j].iter().map(|z| z / s).collect())
        })
        .collect();
    complete_orthonormal(&mut u_cols, d);

    let mut left = ComplexMatrix::zeros(d, d);
    let mut right_adjoint = ComplexMatrix::zeros(d, d);
    for (k, &j) in order.iter().enumerate() {
        let col = u_cols[k].as_ref().unwrap();
        for i in 0..d {
            left.set(i, k, col[i]);
            right_adjoint.set(k, i, v[j][i].conj());
        }
    }
    Ok(SvdResult {
        left,
        singulars: order.iter().map(|&j| norms[j]).collect(),
        right_adjoint,
    })
}

// [x_p x_q] ← [x_p x_q]·J with J = [[c, s], [−s e^{-iφ}, c e^{-iφ}]].
fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, cs: f64, sn: f64, phase: C64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (xp, xq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in xp.iter_mut().zip(xq.iter_mut()) {
        let yt = *y * phase;
        let nx = *x * cs - yt * sn;
        let ny = *x * sn + yt * cs;
        *x = nx;
        *y = ny;
    }
}

// Fills missing columns with canonical basis vectors orthogonalized against
// everything accepted so far.
fn complete_orthonormal(cols: &mut [Option<Vec<C64>>], d: usize) {
    let mut next_basis = 0;
    for k in 0..cols.len() {
        if cols[k].is_some() {
            continue;
        }
        while next_basis < d {
            let mut e = vec![C64::default(); d];
            e[next_basis] = c(1.0, 0.0);
            next_basis += 1;
            for _ in 0..2 {
                for other in cols.iter().flatten() {
                    let proj: C64 = other.iter().zip(&e).map(|(o, x)| o.conj() * x).sum();
                    for (x, o) in e.iter_mut().zip(other) {
                        *x -= proj * o;
                    }
                }
            }
            let n = e.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
            if n > 1e-6 {
                cols[k] = Some(e.into_iter().map(|z| z / n).collect());
                break;
            }
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues decreasing.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x)
    }

    /// V·diag(f(λ))·V†.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let d = ComplexMatrix::from_diag(&mapped);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows();
    let scale = h.frobenius_norm().max(1.0);
    if !h.is_hermitian(1e-10 * scale) {
        return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
    }
    let mut a = (&(h + &h.adjoint())).scale_real(0.5);
    let mut vecs = ComplexMatrix::identity(n);

    let off = |a: &ComplexMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let norm = a.frobenius_norm();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off(&a) <= ORTH_EPS * norm || norm == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let hpq = a.get(p, q);
                let g = hpq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let e_minus = hpq.conj() / g; // e^{-iφ}
                let zeta = (aqq - app) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                // G = [[c, s], [−s e^{-iφ}, c e^{-iφ}]]
                let g_pp = c(cs, 0.0);
                let g_pq = c(sn, 0.0);
                let g_qp = e_minus * (-sn);
                let g_qq = e_minus * cs;
                for k in 0..n {
                    let (xp, xq) = (a.get(k, p), a.get(k, q));
                    a.set(k, p, xp * g_pp + xq * g_qp);
                    a.set(k, q, xp * g_pq + xq * g_qq);
                    let (vp, vq) = (vecs.get(k, p), vecs.get(k, q));
                    vecs.set(k, p, vp * g_pp + vq * g_qp);
                    vecs.set(k, q, vp * g_pq + vq * g_qq);
                }
                for k in 0..n {
                    let (xp, xq) = (a.get(p, k), a.get(q, k));
                    a.set(p, k, g_pp.conj() * xp + g_qp.conj() * xq);
                    a.set(q, k, g_pq.conj() * xp + g_qq.conj() * xq);
                }
                a.set(p, q, C64::default());
                a.set(q, p, C64::default());
                a.set(p, p, c(a.get(p, p).re, 0.0));
                a.set(q, q, c(a.get(q, q).re, 0.0));
            }
        }
    }
    if !converged && off(&a) > 1e-13 * norm {
        return Err(Error::NoConvergence {
            routine: "hermitian_eigen",
            iterations: MAX_SWEEPS,
        });
    }

    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, k, vecs.get(i, j));
        }
    }
    Ok(HermitianEigen {
        values: order.iter().map(|&j| diag[j]).collect(),
        vectors,
    })
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in [−tol, 0) are treated as zero, with tol = 1e-10·max(1, ‖p‖_F).
pub fn principal_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(p)?;
    let tol = 1e-10 * p.frobenius_norm().max(1.0);
    if let Some(&min) = eig.values.last() {
        if min < -tol {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(eig.map_values(|x| x.max(0.0).sqrt()))
}

/// P^{-1/2} for a positive definite matrix.
pub fn psd_inverse_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(p)?;
    let max = eig.values[0];
    let min = *eig.values.last().unwrap();
    if min <= 1e-14 * max.max(f64::MIN_POSITIVE) {
        return Err(Error::NotPsd(min));
    }
    Ok(eig.map_values(|x| 1.0 / x.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ginibre, haar_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eig_of_gram(m: &ComplexMatrix) -> Vec<f64> {
        // Independent check: singular values are square roots of the
        // eigenvalues of M†M.
        let g = &m.adjoint() * m;
        hermitian_eigen(&g)
            .unwrap()
            .values
            .into_iter()
            .map(|x| x.max(0.0).sqrt())
            .collect()
    }

    #[test]
    fn identity_singulars() {
        let s = svd(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s.singulars, vec![1.0, 1.0, 1.0]);
        assert!(s.reconstruction_residual(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn permuted_diagonal() {
        let d = ComplexMatrix::from_diag(&[0.5f64.sqrt(), 0.25f64.sqrt()]);
        let swap = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let m = &swap * &d;
        let s = svd(&m).unwrap();
        assert!((s.singulars[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.singulars[1] - 0.5).abs() < 1e-15);
        assert!(s.reconstruction_residual(&m) < 1e-14);
    }

    #[test]
    fn weak_measurement_operator() {
        let eta: f64 = 0.36;
        let m = ComplexMatrix::from_diag(&[1.0, (1.0 - eta).sqrt()]);
        let s = svd(&m).unwrap();
        assert!((s.singulars[0] - 1.0).abs() < 1e-15);
        assert!((s.singulars[1] - 0.8).abs() < 1e-15);
        let via_eig = eig_of_gram(&m);
        for (a, b) in s.singulars.iter().zip(&via_eig) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_completion() {
        let m = ComplexMatrix::unit(3, 1, 1);
        let s = svd(&m).unwrap();
        assert_eq!(s.singulars, vec![1.0, 0.0, 0.0]);
        assert!(s.left.is_unitary(1e-12));
        assert!(s.right_adjoint.is_unitary(1e-12));
        assert!(s.reconstruction_residual(&m) < 1e-15);
        let z = svd(&ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(z.singulars, vec![0.0, 0.0]);
        assert!(z.left.is_unitary(1e-12));
    }

    #[test]
    fn non_square_is_rejected() {
        assert!(matches!(
            svd(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn random_svd_reconstructs_and_matches_gram_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=8 {
            for _ in 0..20 {
                let m = ginibre(d, &mut rng).scale_real(0.4);
                let s = svd(&m).unwrap();
                assert!(s.reconstruction_residual(&m) < 1e-10);
                assert!(s.left.is_unitary(1e-10));
                assert!(s.right_adjoint.is_unitary(1e-10));
                assert!(s.singulars.windows(2).all(|w| w[0] >= w[1]));
                for (a, b) in s.singulars.iter().zip(eig_of_gram(&m)) {
                    assert!((a - b).abs() < 1e-7, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn svd_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = ginibre(5, &mut rng);
        let a = svd(&m).unwrap();
        let b = svd(&m).unwrap();
        assert_eq!(a.singulars, b.singulars);
        assert_eq!(a.left, b.left);
        assert_eq!(a.right_adjoint, b.right_adjoint);
    }

    #[test]
    fn eigen_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..=6 {
            let g = ginibre(d, &mut rng);
            let h = &g + &g.adjoint();
            let e = hermitian_eigen(&h).unwrap();
            assert!((&e.reconstruct() - &h).frobenius_norm() < 1e-12);
            assert!(e.vectors.is_unitary(1e-12));
        }
    }

    #[test]
    fn sqrt_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert!(principal_sqrt(&i2).unwrap().max_abs_diff(&i2) < 1e-15);
        let r = principal_sqrt(&ComplexMatrix::from_diag(&[4.0, 9.0])).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_diag(&[2.0, 3.0])) < 1e-14);
        assert!(matches!(
            principal_sqrt(&ComplexMatrix::from_diag(&[1.0, -0.5])),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn sqrt_of_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in 2..=6 {
            let g = ginibre(d, &mut rng);
            let p = &g.adjoint() * &g;
            let r = principal_sqrt(&p).unwrap();
            assert!(r.is_hermitian(1e-12));
            assert!((&(&r * &r) - &p).frobenius_norm() < 1e-10);
            let e = hermitian_eigen(&r).unwrap();
            assert!(*e.values.last().unwrap() > -1e-12);
        }
    }

    #[test]
    fn rank_deficient_hermitian_reconstructs() {
        // W†·diag(σ)·W with a zero in σ: the shape of every completion
        // branch of an optimal reversal composed with its measurement.
        let mut rng = ChaCha8Rng::seed_from_u64(0x1e22);
        let sigma = [0.8691653504023914, 0.8031975343450206, 0.4022692384909684, 0.0];
        for _ in 0..2000 {
            let w = haar_unitary(4, &mut rng);
            let m = &(&w.adjoint() * &ComplexMatrix::from_diag(&sigma)) * &w;
            let s = svd(&m).unwrap();
            assert!(s.reconstruction_residual(&m) < 1e-13);
            for (a, b) in s.singulars.iter().zip(&sigma) {
                assert!((a - b).abs() < 1e-13, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn noise_level_column_does_not_stall() {
        // Completion branch of a nearly degenerate outcome: entries ~1e-8
        // and a second column at rounding-noise level.
        let rows: [[(f64, f64); 5]; 5] = [
            [(4.4183053095909084e-8, -6.6e-24), (-1.8e-23, -1.16e-23), (-1.577515245098211e-8, -1.536001686016681e-8), (-6.9593817727580164e-9, -3.766253665257281e-8), (-4.2691744459132085e-9, -3.169862026090556e-8)],
            [(0.0, 0.0); 5],
            [(-1.577515245098212e-8, 1.5360016860166804e-8), (1.08e-23, -4.1e-24), (1.0972205830683575e-8, 7.4e-24), (1.557797522312329e-8, 1.1027667892517157e-8), (1.2544135829014707e-8, 9.833543523808313e-9)],
            [(-6.9593817727580065e-9, 3.7662536652572786e-8), (1.57e-23, -1.16e-23), (1.5577975223123286e-8, -1.1027667892517135e-8), (3.320050469534452e-8, 6.6e-24), (2.7692999385532375e-8, 1.3537964633193058e-9)],
            [(-4.2691744459132e-9, 3.169862026090556e-8), (1.16e-23, -1.49e-23), (1.2544135829014708e-8, -9.833543523808307e-9), (2.7692999385532388e-8, -1.3537964633193025e-9), (2.3154316083001802e-8, 1.7e-24)],
        ];
        let m = ComplexMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&(re, im)| c(re, im)).collect()).collect(),
        )
        .unwrap();
        let s = svd(&m).unwrap();
        assert!(s.reconstruction_residual(&m) < 1e-20);
        assert!(s.left.is_unitary(1e-12) && s.right_adjoint.is_unitary(1e-12));
        for (a, b) in s.singulars.iter().zip(eig_of_gram(&m)) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn singulars_are_biunitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 2..=6 {
            let m = ginibre(d, &mut rng);
            let u = haar_unitary(d, &mut rng);
            let w = haar_unitary(d, &mut rng);
            let s1 = svd(&m).unwrap().singulars;
            let s2 = svd(&(&(&u * &m) * &w)).unwrap().singulars;
            for (a, b) in s1.iter().zip(&s2) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
