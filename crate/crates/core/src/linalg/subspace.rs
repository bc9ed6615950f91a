use num_complex::Complex64 as C64;

use super::{fix_phase, hermitian_eig, inner, norm, normalized, ComplexMatrix, EigResult, Tolerances};
use crate::{Error, Result};

/// Gram defect allowed for a basis to count as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// A subspace of `C^ambient_dim` held as an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<C64>>,
}

impl Subspace {
    /// Validates that `basis` is orthonormal in `C^ambient_dim`.
    pub fn new(ambient_dim: usize, basis: Vec<Vec<C64>>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::DimensionMismatch("ambient dimension must be positive".into()));
        }
        if basis.len() > ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "{} basis vectors in dimension {ambient_dim}",
                basis.len()
            )));
        }
        if let Some(b) = basis.iter().find(|b| b.len() != ambient_dim) {
            return Err(Error::DimensionMismatch(format!(
                "basis vector of length {} in dimension {ambient_dim}",
                b.len()
            )));
        }
        let mut defect: f64 = 0.0;
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((inner(a, b) - target).norm());
            }
        }
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self { ambient_dim, basis })
    }

    pub(crate) fn from_orthonormal(ambient_dim: usize, basis: Vec<Vec<C64>>) -> Self {
        debug_assert!(basis.iter().all(|b| b.len() == ambient_dim));
        Self { ambient_dim, basis }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut v = vec![C64::new(0.0, 0.0); ambient_dim];
                v[i] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        Self { ambient_dim, basis }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    /// Orthonormal basis for the span of arbitrary (nonzero) vectors.
    pub fn span_of(ambient_dim: usize, vectors: &[Vec<C64>], tol: &Tolerances) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch("vector length differs from ambient dimension".into()));
        }
        let mut gram = ComplexMatrix::zeros(ambient_dim, ambient_dim);
        for v in vectors {
            gram.add_outer(C64::new(1.0, 0.0), v, v);
        }
        let eig = hermitian_eig(&gram, tol)?;
        Ok(Self {
            ambient_dim,
            basis: leading_eigenvectors(&eig, tol),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(self.ambient_dim, &self.basis)
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.ambient_dim];
        for b in &self.basis {
            let c = inner(b, v);
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    }

    /// `‖v − P v‖`.
    pub fn projection_defect(&self, v: &[C64]) -> f64 {
        let p = self.project(v);
        super::vec_distance(v, &p)
    }

    /// Frobenius distance between the two projectors.
    pub fn projector_distance(&self, other: &Self) -> f64 {
        self.projector().distance(&other.projector())
    }

    pub fn orthogonal_complement(&self, tol: &Tolerances) -> Result<Self> {
        let q = &ComplexMatrix::identity(self.ambient_dim) - &self.projector();
        let eig = hermitian_eig(&q, tol)?;
        let basis = eig
            .eigenvalues
            .iter()
            .zip(&eig.eigenvectors)
            .filter(|(l, _)| **l > 0.5)
            .map(|(_, v)| v.clone())
            .collect();
        Ok(Self {
            ambient_dim: self.ambient_dim,
            basis,
        })
    }

    /// The subspace `U·S` for a unitary `U`.
    pub fn transformed(&self, unitary: &ComplexMatrix) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            basis: self.basis.iter().map(|b| unitary.mul_vec(b)).collect(),
        }
    }
}

/// Eigenvectors whose eigenvalue lies above the PSD zero cutoff.
fn leading_eigenvectors(eig: &EigResult, tol: &Tolerances) -> Vec<Vec<C64>> {
    let cutoff = tol.zero_cutoff(eig.lambda_max());
    eig.eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(l, _)| **l > cutoff)
        .map(|(_, v)| v.clone())
        .collect()
}

fn common_ambient(subspaces: &[Subspace]) -> Result<usize> {
    let first = subspaces.first().ok_or(Error::EmptyList)?;
    for s in subspaces {
        if s.ambient_dim != first.ambient_dim {
            return Err(Error::AmbientDimMismatch {
                a: first.ambient_dim,
                b: s.ambient_dim,
            });
        }
    }
    Ok(first.ambient_dim)
}

/// Eigendecomposition of the averaged projector `(1/N) Σ P_k`.
///
/// Its eigenvalues lie in `[0, 1]`; eigenvalue 1 is attained exactly on the
/// intersection of all the subspaces.
pub fn averaged_projector_eig(subspaces: &[Subspace], tol: &Tolerances) -> Result<EigResult> {
    let d = common_ambient(subspaces)?;
    let mut avg = ComplexMatrix::zeros(d, d);
    let w = C64::new(1.0 / subspaces.len() as f64, 0.0);
    for s in subspaces {
        for b in &s.basis {
            avg.add_outer(w, b, b);
        }
    }
    hermitian_eig(&avg, tol)
}

/// Intersection of all subspaces: the eigenspace of the averaged projector
/// with eigenvalue at least `1 − rank_rel`.
pub fn subspace_intersection(subspaces: &[Subspace], tol: &Tolerances) -> Result<Subspace> {
    let eig = averaged_projector_eig(subspaces, tol)?;
    let basis = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(l, _)| **l >= 1.0 - tol.rank_rel)
        .map(|(_, v)| v.clone())
        .collect();
    Ok(Subspace {
        ambient_dim: subspaces[0].ambient_dim,
        basis,
    })
}

/// Span of all basis vectors pooled across the inputs.
pub fn subspace_span_union(subspaces: &[Subspace], tol: &Tolerances) -> Result<Subspace> {
    let d = common_ambient(subspaces)?;
    let pooled: Vec<Vec<C64>> = subspaces.iter().flat_map(|s| s.basis.iter().cloned()).collect();
    Subspace::span_of(d, &pooled, tol)
}

/// Orthonormal basis of `s` whose first vector is `psi`.
///
/// `psi` is projected onto `s` and renormalized before use; the remaining
/// vectors come from pivoted Gram–Schmidt over the basis of `s`. All
/// vectors follow the crate phase convention.
pub fn orthonormal_basis_containing(psi: &[C64], s: &Subspace, tol: &Tolerances) -> Result<Subspace> {
    if psi.len() != s.ambient_dim {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} in dimension {}",
            psi.len(),
            s.ambient_dim
        )));
    }
    let n = norm(psi);
    if (n - 1.0).abs() > tol.match_abs {
        return Err(Error::NotUnit { norm: n });
    }
    let defect = s.projection_defect(psi);
    if defect > tol.match_abs {
        return Err(Error::VectorOutsideSubspace {
            defect,
            threshold: tol.match_abs,
        });
    }
    let mut first = normalized(&s.project(psi)).ok_or(Error::NotUnit { norm: 0.0 })?;
    fix_phase(&mut first);

    let mut chosen = vec![first];
    let mut candidates: Vec<Vec<C64>> = s.basis.clone();
    while chosen.len() < s.dim() {
        let residuals: Vec<Vec<C64>> = candidates
            .iter()
            .map(|c| {
                let mut r = c.clone();
                // two passes of classical Gram–Schmidt
                for _ in 0..2 {
                    for q in &chosen {
                        let coef = inner(q, &r);
                        for (ri, qi) in r.iter_mut().zip(q) {
                            *ri -= coef * qi;
                        }
                    }
                }
                r
            })
            .collect();
        let (best, _) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, norm(r)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("candidates remain while basis is incomplete");
        let mut next = normalized(&residuals[best]).ok_or_else(|| {
            Error::NumericalFailure("basis completion found no independent direction".into())
        })?;
        fix_phase(&mut next);
        chosen.push(next);
        candidates.swap_remove(best);
    }
    Ok(Subspace {
        ambient_dim: s.ambient_dim,
        basis: chosen,
    })
}
