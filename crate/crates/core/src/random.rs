//! Seeded random states, unitaries and subspaces.
//!
//! Vectors use independent standard complex normal entries, then get
//! normalized, which gives the unitarily invariant distribution on the unit
//! sphere. Mixed states come from the normalized Gram construction
//! `M·M†/tr(M·M†)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{fix_phase, inner, normalized, ComplexMatrix, Subspace, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    (0..d).map(|_| complex_normal(rng)).collect()
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    loop {
        if let Some(v) = normalized(&gaussian_vector(rng, d)) {
            return v;
        }
    }
}

/// Hermitian matrix `(G + G†)/2` with complex normal `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::new(d, d, gaussian_vector(rng, d * d)).expect("finite samples");
    (&g + &g.adjoint()).scale_real(0.5)
}

/// `k` orthonormal vectors obtained by Gram–Schmidt on Gaussian columns.
fn orthonormal_columns<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> Vec<Vec<C64>> {
    assert!(k <= d, "cannot draw {k} orthonormal vectors in dimension {d}");
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(k);
    while out.len() < k {
        let mut v = gaussian_vector(rng, d);
        for _ in 0..2 {
            for q in &out {
                let c = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        if let Some(v) = normalized(&v) {
            if crate::linalg::norm(&v) > 0.5 {
                out.push(v);
            }
        }
    }
    out
}

/// Haar-distributed unitary: Gram–Schmidt on Gaussian columns, which is the
/// QR construction with the phase of R's diagonal fixed to be positive.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_columns(&orthonormal_columns(rng, d, d)).expect("nonempty columns")
}

pub fn random_subspace<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> Subspace {
    let mut basis = orthonormal_columns(rng, d, k);
    basis.iter_mut().for_each(|b| fix_phase(b));
    Subspace::from_orthonormal(d, basis)
}

/// Random density matrix of rank `rank` via `M·M†/tr` with `M` of shape
/// `d × rank`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    assert!(rank >= 1 && rank <= d);
    let m = ComplexMatrix::new(d, rank, gaussian_vector(rng, d * rank)).expect("finite samples");
    let g = &m * &m.adjoint();
    let tr = g.trace().re;
    g.scale_real(1.0 / tr).symmetrized()
}

/// Random density matrix whose support is exactly `support`.
pub fn random_density_on<R: Rng + ?Sized>(rng: &mut R, support: &Subspace) -> ComplexMatrix {
    let d = support.ambient_dim();
    let k = support.dim();
    let mut g = ComplexMatrix::zeros(d, d);
    // Gram construction in the coordinates of `support`, pushed forward.
    let coeffs = random_density_matrix(rng, k, k);
    for i in 0..k {
        for j in 0..k {
            g.add_outer(coeffs[(i, j)], &support.basis()[i], &support.basis()[j]);
        }
    }
    g.symmetrized()
}

/// Uniformly random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a = gaussian_vector(&mut rng_from_seed(3), 5);
        let b = gaussian_vector(&mut rng_from_seed(3), 5);
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(&mut rng_from_seed(1), 5);
        let uu = &u * &u.adjoint();
        assert!(uu.distance(&ComplexMatrix::identity(5)) < 1e-12);
    }

    #[test]
    fn density_has_requested_rank_and_trace() {
        let mut rng = rng_from_seed(4);
        let tol = crate::Tolerances::default();
        for rank in 1..=4 {
            let rho = random_density_matrix(&mut rng, 4, rank);
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            let eig = crate::linalg::hermitian_eig(&rho, &tol).unwrap();
            assert_eq!(eig.numerical_rank(&tol), rank);
        }
    }

    #[test]
    fn density_on_subspace_has_that_support() {
        let mut rng = rng_from_seed(9);
        let tol = crate::Tolerances::default();
        let s = random_subspace(&mut rng, 5, 2);
        let rho = random_density_on(&mut rng, &s);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let eig = crate::linalg::hermitian_eig(&rho, &tol).unwrap();
        assert_eq!(eig.numerical_rank(&tol), 2);
        for v in &eig.eigenvectors[..2] {
            assert!(s.projection_defect(v) < 1e-10);
        }
    }
}
