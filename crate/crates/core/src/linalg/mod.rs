//! Dense complex linear algebra with explicit numerical tolerances.
//!
//! Vectors are plain `[C64]` slices; matrices are [`ComplexMatrix`]. Tensor
//! factors are ordered Kronecker-style: the leftmost factor varies slowest.

mod eig;
mod matrix;
mod subspace;

pub use eig::{hermitian_eig, EigResult};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64 as C64;
pub use subspace::{
    averaged_projector_eig, orthonormal_basis_containing, subspace_intersection,
    subspace_span_union, Subspace,
};

use crate::{Error, Result};

/// Moduli at or below this are treated as zero when fixing phases.
pub const PHASE_EPS: f64 = 1e-8;

/// Numerical thresholds used throughout the crate.
///
/// `rank_rel` is the relative eigenvalue cutoff below which an eigenvalue of
/// a positive semidefinite matrix counts as zero. `match_abs` bounds
/// Frobenius/Euclidean distances when two matrices or vectors are compared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rank_rel: f64,
    pub match_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: 1e-10,
            match_abs: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(rank_rel: f64, match_abs: f64) -> Result<Self> {
        let tol = Self { rank_rel, match_abs };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rank_rel", self.rank_rel), ("match_abs", self.match_abs)] {
            if !(v > 0.0 && v < 1e-2) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {v} must lie in (0, 1e-2)"
                )));
            }
        }
        Ok(())
    }

    /// Eigenvalues at or below this value count as zero for a PSD matrix
    /// whose largest eigenvalue is `lambda_max`.
    pub fn zero_cutoff(&self, lambda_max: f64) -> f64 {
        self.rank_rel * lambda_max.max(1e-30)
    }
}

/// `⟨u|v⟩`, conjugating the left argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    assert_eq!(u.len(), v.len(), "inner product dimension mismatch");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns `v/‖v‖`, or `None` for a zero vector.
pub fn normalized(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| v.iter().map(|z| z / n).collect())
}

/// Rotates the global phase so that the first component with modulus above
/// [`PHASE_EPS`] is real and positive.
pub fn fix_phase(v: &mut [C64]) {
    if let Some(z) = v.iter().find(|z| z.norm() > PHASE_EPS).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Euclidean distance `‖u − v‖`.
pub fn vec_distance(u: &[C64], v: &[C64]) -> f64 {
    assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product of vectors, leftmost factor varying slowest.
pub fn tensor_product_vec(vs: &[&[C64]]) -> Result<Vec<C64>> {
    let (first, rest) = vs.split_first().ok_or(Error::EmptyInput)?;
    let mut out = first.to_vec();
    for v in rest {
        if v.is_empty() {
            return Err(Error::DimensionMismatch("empty tensor factor".into()));
        }
        out = out
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect();
    }
    if out.is_empty() {
        return Err(Error::DimensionMismatch("empty tensor factor".into()));
    }
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

/// Splits a flat index over `factor_dims` into kept and traced flat indices
/// and returns `table[kept][traced] = full index`.
fn index_table(factor_dims: &[usize], keep: &[usize]) -> Result<(usize, usize, Vec<Vec<usize>>)> {
    if factor_dims.contains(&0) {
        return Err(Error::DimensionMismatch("factor dimensions must be positive".into()));
    }
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let mut kept_flags = vec![false; factor_dims.len()];
    for &k in keep {
        if k >= factor_dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "factor index {k} out of range for {} factors",
                factor_dims.len()
            )));
        }
        kept_flags[k] = true;
    }
    let kept_dim: usize = (0..factor_dims.len())
        .filter(|&i| kept_flags[i])
        .map(|i| factor_dims[i])
        .product();
    let total: usize = factor_dims.iter().product();
    let traced_dim = total / kept_dim;

    let mut table = vec![vec![0usize; traced_dim]; kept_dim];
    let mut digits = vec![0usize; factor_dims.len()];
    for full in 0..total {
        let (mut kept, mut traced) = (0usize, 0usize);
        for (f, &digit) in digits.iter().enumerate() {
            if kept_flags[f] {
                kept = kept * factor_dims[f] + digit;
            } else {
                traced = traced * factor_dims[f] + digit;
            }
        }
        table[kept][traced] = full;
        // advance mixed-radix counter, last factor fastest
        for f in (0..factor_dims.len()).rev() {
            digits[f] += 1;
            if digits[f] < factor_dims[f] {
                break;
            }
            digits[f] = 0;
        }
    }
    Ok((kept_dim, traced_dim, table))
}

/// Traces out every factor not listed in `keep`. Kept factors stay in their
/// original relative order.
pub fn partial_trace(m: &ComplexMatrix, factor_dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    let total: usize = factor_dims.iter().product();
    if total != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {n} != product of factor dimensions {total}"
        )));
    }
    let (kept_dim, traced_dim, table) = index_table(factor_dims, keep)?;
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for i in 0..kept_dim {
        for j in 0..kept_dim {
            out[(i, j)] = (0..traced_dim).map(|t| m[(table[i][t], table[j][t])]).sum();
        }
    }
    Ok(out)
}

/// Reduced density matrix of the pure state `psi` on the `keep` factors,
/// equal to `partial_trace(|psi⟩⟨psi|, ...)` without forming the outer
/// product.
pub fn reduced_density_of_pure(psi: &[C64], factor_dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = factor_dims.iter().product();
    if total != psi.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} != product of factor dimensions {total}",
            psi.len()
        )));
    }
    let (kept_dim, traced_dim, table) = index_table(factor_dims, keep)?;
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for i in 0..kept_dim {
        for j in 0..kept_dim {
            out[(i, j)] = (0..traced_dim)
                .map(|t| psi[table[i][t]] * psi[table[j][t]].conj())
                .sum();
        }
    }
    Ok(out)
}
