//! Compatibility verdicts for a set of density matrices.
//!
//! The governing criterion: a set of density matrices can describe the
//! knowledge of different observers of one system iff the supports of all of
//! them share at least one state. Alongside it sit the two Peierls
//! conditions. Commutation is not necessary. A nonzero product is necessary
//! but strictly weaker than a common support state.

use crate::density::{null_space, support, DensityMatrix};
use crate::linalg::{
    averaged_projector_eig, fix_phase, hermitian_eig, inner, normalized, subspace_span_union, ComplexMatrix,
    Subspace, Tolerances, C64,
};
use crate::{Error, Result};

/// An averaged-projector eigenvalue `λ` is marginal when its gap `1 − λ`
/// lies within this factor of `rank_rel` on either side.
pub const MARGINAL_FACTOR: f64 = 10.0;

/// One pairwise test: the boolean outcome and the number it was decided on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCheck {
    pub holds: bool,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct CompatReport {
    pub n_matrices: usize,
    pub dim: usize,
    pub bfm_compatible: bool,
    pub intersection_dim: usize,
    /// Common support state; present iff `bfm_compatible`.
    pub witness: Option<Vec<C64>>,
    /// Eigenvalues of the averaged support projector, descending.
    pub averaged_projector_spectrum: Vec<f64>,
    /// Some eigenvalue has gap `1 − λ` in
    /// `[rank_rel/MARGINAL_FACTOR, MARGINAL_FACTOR·rank_rel]`, so the
    /// verdict hinges on the cutoff choice.
    pub marginal: bool,
    /// `[a][b]`: residual `‖ρ_a ρ_b − ρ_b ρ_a‖_F`, holds iff ≤ `match_abs`.
    pub pairwise_commute: Vec<Vec<PairCheck>>,
    /// `[a][b]`: overlap `tr(ρ_a ρ_b)`, holds iff > `rank_rel`.
    pub pairwise_product_nonzero: Vec<Vec<PairCheck>>,
    pub forbidden_dim: usize,
}

impl CompatReport {
    pub fn all_commute(&self) -> bool {
        self.pairwise_commute.iter().flatten().all(|c| c.holds)
    }

    pub fn all_products_nonzero(&self) -> bool {
        self.pairwise_product_nonzero.iter().flatten().all(|c| c.holds)
    }
}

fn common_dim(rhos: &[DensityMatrix]) -> Result<usize> {
    let first = rhos.first().ok_or(Error::EmptyList)?;
    if let Some(other) = rhos.iter().find(|r| r.dim() != first.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "density matrices of dimensions {} and {}",
            first.dim(),
            other.dim()
        )));
    }
    Ok(first.dim())
}

fn supports(rhos: &[DensityMatrix], tol: &Tolerances) -> Vec<Subspace> {
    rhos.iter().map(|r| support(r, tol)).collect()
}

/// Picks one state from a nonempty intersection: the top eigenvector of the
/// average of the `rhos` compressed to the intersection. Any vector of the
/// intersection is a top eigenvector of the averaged projector; this choice
/// breaks the tie toward the state the observers jointly find most likely.
fn select_witness(inter: &Subspace, rhos: &[DensityMatrix], tol: &Tolerances) -> Result<Option<Vec<C64>>> {
    let basis = inter.basis();
    if basis.len() <= 1 {
        return Ok(basis.first().cloned());
    }
    let k = basis.len();
    let mut compressed = ComplexMatrix::zeros(k, k);
    let images: Vec<Vec<C64>> = basis
        .iter()
        .map(|b| {
            let mut acc = vec![C64::new(0.0, 0.0); b.len()];
            for rho in rhos {
                for (a, x) in acc.iter_mut().zip(rho.matrix().mul_vec(b)) {
                    *a += x;
                }
            }
            acc
        })
        .collect();
    for i in 0..k {
        for j in 0..k {
            compressed[(i, j)] = inner(&basis[i], &images[j]) / rhos.len() as f64;
        }
    }
    let eig = hermitian_eig(&compressed.symmetrized(), tol)?;
    let coeffs = &eig.eigenvectors[0];
    let mut w = vec![C64::new(0.0, 0.0); inter.ambient_dim()];
    for (c, b) in coeffs.iter().zip(basis) {
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi += c * bi;
        }
    }
    let mut w = normalized(&w).ok_or_else(|| Error::NumericalFailure("degenerate witness".into()))?;
    fix_phase(&mut w);
    Ok(Some(w))
}

/// Intersection of all supports as `(subspace, averaged-projector spectrum)`.
fn support_intersection(rhos: &[DensityMatrix], tol: &Tolerances) -> Result<(Subspace, Vec<f64>)> {
    let d = common_dim(rhos)?;
    let eig = averaged_projector_eig(&supports(rhos, tol), tol)?;
    let basis = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(l, _)| **l >= 1.0 - tol.rank_rel)
        .map(|(_, v)| v.clone())
        .collect();
    Ok((Subspace::from_orthonormal(d, basis), eig.eigenvalues))
}

/// True iff the supports share a nonzero vector; also returns the
/// intersection.
pub fn bfm_compatible(rhos: &[DensityMatrix], tol: &Tolerances) -> Result<(bool, Subspace)> {
    let (inter, _) = support_intersection(rhos, tol)?;
    Ok((!inter.is_empty(), inter))
}

/// A unit vector in every support, taken from the top eigenspace of the
/// averaged support projector when that eigenvalue clears the cutoff.
/// Among a multi-dimensional intersection the choice is deterministic but
/// not canonical.
pub fn common_state_witness(rhos: &[DensityMatrix], tol: &Tolerances) -> Result<Option<Vec<C64>>> {
    let (inter, _) = support_intersection(rhos, tol)?;
    select_witness(&inter, rhos, tol)
}

/// `S₀`: span of the union of all null spaces, the states in which the
/// system cannot be found.
pub fn forbidden_subspace(rhos: &[DensityMatrix], tol: &Tolerances) -> Result<Subspace> {
    common_dim(rhos)?;
    let nulls: Vec<Subspace> = rhos.iter().map(|r| null_space(r, tol)).collect();
    subspace_span_union(&nulls, tol)
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "density matrices of dimensions {} and {}",
            a.dim(),
            b.dim()
        )))
    }
}

/// First Peierls condition: `[ρ_a, ρ_b] = 0` up to `match_abs`.
pub fn peierls_commute(a: &DensityMatrix, b: &DensityMatrix, tol: &Tolerances) -> Result<(bool, f64)> {
    same_dim(a, b)?;
    let residual = a.matrix().commutator(b.matrix()).frobenius_norm();
    Ok((residual <= tol.match_abs, residual))
}

/// Second Peierls condition: `ρ_a ρ_b ≠ 0`, decided on `tr(ρ_a ρ_b)`, which
/// for positive semidefinite factors vanishes iff the product does.
pub fn peierls_product_nonzero(a: &DensityMatrix, b: &DensityMatrix, tol: &Tolerances) -> Result<(bool, f64)> {
    same_dim(a, b)?;
    let (ma, mb) = (a.matrix(), b.matrix());
    let n = a.dim();
    let mut overlap = 0.0;
    for i in 0..n {
        for j in 0..n {
            overlap += (ma[(i, j)] * mb[(j, i)]).re;
        }
    }
    Ok((overlap > tol.rank_rel, overlap))
}

pub fn full_report(rhos: &[DensityMatrix], tol: &Tolerances) -> Result<CompatReport> {
    let dim = common_dim(rhos)?;
    let (inter, spectrum) = support_intersection(rhos, tol)?;
    let forbidden = forbidden_subspace(rhos, tol)?;
    let marginal = spectrum.iter().any(|l| {
        let gap = 1.0 - l;
        gap >= tol.rank_rel / MARGINAL_FACTOR && gap <= tol.rank_rel * MARGINAL_FACTOR
    });

    let n = rhos.len();
    let mut commute = Vec::with_capacity(n);
    let mut product = Vec::with_capacity(n);
    for a in rhos {
        let mut c_row = Vec::with_capacity(n);
        let mut p_row = Vec::with_capacity(n);
        for b in rhos {
            let (holds, value) = peierls_commute(a, b, tol)?;
            c_row.push(PairCheck { holds, value });
            let (holds, value) = peierls_product_nonzero(a, b, tol)?;
            p_row.push(PairCheck { holds, value });
        }
        commute.push(c_row);
        product.push(p_row);
    }

    Ok(CompatReport {
        n_matrices: n,
        dim,
        bfm_compatible: !inter.is_empty(),
        intersection_dim: inter.dim(),
        witness: select_witness(&inter, rhos, tol)?,
        averaged_projector_spectrum: spectrum,
        marginal,
        pairwise_commute: commute,
        pairwise_product_nonzero: product,
        forbidden_dim: forbidden.dim(),
    })
}
