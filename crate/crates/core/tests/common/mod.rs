//! Shared fixtures and independent oracles for the integration suites.
//!
//! The oracles go through nalgebra (SVD, symmetric eigensolver) rather than
//! the crate's own Jacobi solver, so a check never shares its numerical path
//! with the code under test.
#![allow(dead_code)]

use dmcompat::density::{validate_density, DensityMatrix};
use dmcompat::linalg::{normalized, ComplexMatrix, Subspace, Tolerances, C64};
use dmcompat::random::{random_density_on, random_subspace, random_unit_vector, SeededRng};
use nalgebra::DMatrix;
use rand::Rng;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn basis_vec(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![c(0.0); d];
    v[i] = c(1.0);
    v
}

pub fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn columns_to_na(d: usize, cols: &[Vec<C64>]) -> DMatrix<C64> {
    DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i])
}

/// Eigenvalues of a Hermitian matrix, descending, via nalgebra.
pub fn oracle_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let eig = to_na(m).symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Numerical rank of the matrix with the given columns: singular values
/// above `1e-8` times the largest.
pub fn oracle_rank(d: usize, cols: &[Vec<C64>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let svd = columns_to_na(d, cols).svd(false, false);
    let max = svd.singular_values.max();
    if max == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > 1e-8 * max).count()
}

/// Orthonormal basis of `span(a) ∩ span(b)` for orthonormal inputs, from
/// the null space of `[A, −B]`: `A x = B y` gives the intersection vector
/// `A x`.
pub fn oracle_pair_intersection(d: usize, a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p = a.len();
    let mut cols: Vec<Vec<C64>> = a.to_vec();
    cols.extend(b.iter().map(|v| v.iter().map(|z| -z).collect()));
    let m = columns_to_na(d, &cols);
    let gram = m.adjoint() * &m;
    let eig = gram.symmetric_eigen();
    let mut out = Vec::new();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() < 1e-10 {
            let x = eig.eigenvectors.column(idx);
            let mut w = vec![c(0.0); d];
            for (j, aj) in a.iter().enumerate().take(p) {
                for (wi, ai) in w.iter_mut().zip(aj) {
                    *wi += x[j] * ai;
                }
            }
            out.push(normalized(&w).expect("nonzero intersection vector"));
        }
    }
    out
}

/// Intersection dimension by pairwise folding. At every step the folded
/// dimension is cross-checked against `dim U + dim V − rank([U V])`.
pub fn oracle_fold_intersection_dim(family: &[Subspace]) -> usize {
    let d = family[0].ambient_dim();
    let mut current: Vec<Vec<C64>> = family[0].basis().to_vec();
    for s in &family[1..] {
        let mut pooled = current.clone();
        pooled.extend(s.basis().iter().cloned());
        let by_formula = current.len() + s.dim() - oracle_rank(d, &pooled);
        current = oracle_pair_intersection(d, &current, s.basis());
        assert_eq!(current.len(), by_formula, "oracle routes disagree");
    }
    current.len()
}

/// A family of `n` subspaces sharing `common` planted directions, each with
/// a random number of additional random directions.
pub fn random_family(rng: &mut SeededRng, d: usize, n: usize) -> Vec<Subspace> {
    let common_dim = rng.random_range(0..d);
    let common = random_subspace(rng, d, common_dim);
    (0..n)
        .map(|_| {
            let extra = rng.random_range(0..=d - common_dim);
            let mut vs: Vec<Vec<C64>> = common.basis().to_vec();
            vs.extend((0..extra).map(|_| random_unit_vector(rng, d)));
            if vs.is_empty() {
                vs.push(random_unit_vector(rng, d));
            }
            Subspace::span_of(d, &vs, &Tolerances::default()).unwrap()
        })
        .collect()
}

pub fn density(m: &ComplexMatrix) -> DensityMatrix {
    validate_density(m, &Tolerances::default()).unwrap()
}

pub fn pure(v: &[C64]) -> DensityMatrix {
    DensityMatrix::pure(v, &Tolerances::default()).unwrap()
}

/// `n` density matrices whose supports all contain one random vector.
pub fn random_compatible_set(rng: &mut SeededRng, d: usize, n: usize) -> Vec<DensityMatrix> {
    let common = random_unit_vector(rng, d);
    (0..n)
        .map(|_| {
            let extra = rng.random_range(0..d);
            let mut vs = vec![common.clone()];
            vs.extend((0..extra).map(|_| random_unit_vector(rng, d)));
            let s = Subspace::span_of(d, &vs, &Tolerances::default()).unwrap();
            // weight the common vector explicitly so it is in the support
            let mut m = random_density_on(rng, &s).scale_real(0.7);
            m.add_outer(c(0.3), &common, &common);
            density(&m)
        })
        .collect()
}

/// Density matrices on random supports of random dimension; compatible or
/// not depending on the draw.
pub fn random_set(rng: &mut SeededRng, d: usize, n: usize) -> Vec<DensityMatrix> {
    if rng.random_bool(0.5) {
        return random_compatible_set(rng, d, n);
    }
    (0..n)
        .map(|_| {
            let k = rng.random_range(1..=d);
            let s = random_subspace(rng, d, k);
            density(&random_density_on(rng, &s))
        })
        .collect()
}
