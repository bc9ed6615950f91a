//! Density matrices, their supports and null spaces, and ensemble
//! decompositions `ρ = Σ p_i |φ_i⟩⟨φ_i|` with `p_i > 0`.

use crate::linalg::{
    hermitian_eig, norm, orthonormal_basis_containing, ComplexMatrix, EigResult, Subspace, Tolerances, C64,
};
use crate::{Error, Result};

/// Allowed deviation of a density matrix trace, or an ensemble weight sum,
/// from 1.
pub const TRACE_TOL: f64 = 1e-8;
/// Allowed deviation of an ensemble state norm from 1.
pub const UNIT_TOL: f64 = 1e-10;

/// A validated density matrix: Hermitian, positive semidefinite and of unit
/// trace. The eigendecomposition computed during validation is cached.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eig: EigResult,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues (descending, negatives clamped to zero) and eigenvectors.
    pub fn eigen(&self) -> &EigResult {
        &self.eig
    }

    /// The pure state `|φ⟩⟨φ|`; `phi` is normalized first.
    pub fn pure(phi: &[C64], tol: &Tolerances) -> Result<Self> {
        let phi = crate::linalg::normalized(phi).ok_or(Error::NotUnit { norm: 0.0 })?;
        validate_density(&ComplexMatrix::outer(&phi, &phi), tol)
    }

    /// Numerical rank under the zero-eigenvalue cutoff.
    pub fn rank(&self, tol: &Tolerances) -> usize {
        self.eig.numerical_rank(tol)
    }
}

/// Validates `m` as a density matrix.
///
/// Small Hermiticity defects (up to `match_abs`) are symmetrized away, and
/// small negative eigenvalues (down to `−rank_rel·λ_max`) are clamped to
/// zero, in which case the stored matrix is rebuilt from the clamped
/// spectrum.
pub fn validate_density(m: &ComplexMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    m.require_square()?;
    let defect = m.hermitian_defect();
    if defect > tol.match_abs {
        return Err(Error::NotHermitian {
            defect,
            threshold: tol.match_abs,
        });
    }
    let sym = m.symmetrized();
    let trace = sym.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceNotOne { trace });
    }
    let mut eig = hermitian_eig(&sym, tol)?;
    let threshold = -tol.rank_rel * eig.lambda_max();
    let lambda_min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if lambda_min < threshold {
        return Err(Error::NotPositive {
            eigenvalue: lambda_min,
            threshold,
        });
    }
    let matrix = if lambda_min < 0.0 {
        for l in eig.eigenvalues.iter_mut().filter(|l| **l < 0.0) {
            *l = 0.0;
        }
        eig.reconstruct().symmetrized()
    } else {
        sym
    };
    Ok(DensityMatrix { matrix, eig })
}

/// `S(ρ)`: span of the eigenvectors with eigenvalue above the zero cutoff.
pub fn support(rho: &DensityMatrix, tol: &Tolerances) -> Subspace {
    split_spectrum(rho, tol).0
}

/// Orthogonal complement of the support: eigenvectors with (numerically)
/// zero eigenvalue.
pub fn null_space(rho: &DensityMatrix, tol: &Tolerances) -> Subspace {
    split_spectrum(rho, tol).1
}

fn split_spectrum(rho: &DensityMatrix, tol: &Tolerances) -> (Subspace, Subspace) {
    let eig = rho.eigen();
    let cutoff = tol.zero_cutoff(eig.lambda_max());
    let (supp, null): (Vec<_>, Vec<_>) = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .partition(|(l, _)| **l > cutoff);
    let strip = |pairs: Vec<(&f64, &Vec<C64>)>| pairs.into_iter().map(|(_, v)| v.clone()).collect();
    (
        Subspace::from_orthonormal(rho.dim(), strip(supp)),
        Subspace::from_orthonormal(rho.dim(), strip(null)),
    )
}

/// Weighted unit states with strictly positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dim: usize,
    terms: Vec<(f64, Vec<C64>)>,
}

impl Ensemble {
    /// Validates the ensemble. A weight-sum defect up to `1e-8` is removed by
    /// renormalizing.
    pub fn new(dim: usize, terms: Vec<(f64, Vec<C64>)>) -> Result<Self> {
        let sum = Self::check_terms(dim, &terms)?;
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {sum}, expected 1")));
        }
        Ok(Self::renormalized(dim, terms, sum))
    }

    /// Accepts any positive weights and rescales them to sum to one.
    pub fn from_unnormalized(dim: usize, terms: Vec<(f64, Vec<C64>)>) -> Result<Self> {
        let sum = Self::check_terms(dim, &terms)?;
        Ok(Self::renormalized(dim, terms, sum))
    }

    fn check_terms(dim: usize, terms: &[(f64, Vec<C64>)]) -> Result<f64> {
        if terms.is_empty() {
            return Err(Error::InvalidEnsemble("no terms".into()));
        }
        for (i, (w, state)) in terms.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::InvalidEnsemble(format!("weight {i} is {w}, must be > 0")));
            }
            if state.len() != dim {
                return Err(Error::InvalidEnsemble(format!(
                    "state {i} has length {}, expected {dim}",
                    state.len()
                )));
            }
            let n = norm(state);
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidEnsemble(format!("state {i} has norm {n}")));
            }
        }
        Ok(terms.iter().map(|(w, _)| w).sum())
    }

    fn renormalized(dim: usize, mut terms: Vec<(f64, Vec<C64>)>, sum: f64) -> Self {
        for (w, _) in terms.iter_mut() {
            *w /= sum;
        }
        Self { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(f64, Vec<C64>)] {
        &self.terms
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|(w, _)| *w)
    }

    /// `Σ p_i |φ_i⟩⟨φ_i|` without validation.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (w, state) in &self.terms {
            m.add_outer(C64::new(*w, 0.0), state, state);
        }
        m
    }
}

/// `ρ = Σ p_i |φ_i⟩⟨φ_i|`.
pub fn ensemble_to_density(e: &Ensemble) -> Result<DensityMatrix> {
    validate_density(&e.to_matrix(), &Tolerances::default())
}

/// Spectral ensemble `{(r_i, |ψ_i⟩)}` over eigenvalues above the cutoff.
pub fn eigen_ensemble(rho: &DensityMatrix, tol: &Tolerances) -> Result<Ensemble> {
    let eig = rho.eigen();
    let cutoff = tol.zero_cutoff(eig.lambda_max());
    let terms = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(l, _)| **l > cutoff)
        .map(|(l, v)| (*l, v.clone()))
        .collect();
    Ensemble::new(rho.dim(), terms)
}

/// An ensemble for `rho` in which `psi` appears, with weight equal to the
/// smallest nonzero eigenvalue `r₀`.
///
/// With spectral decomposition `ρ = Σ r_i |ψ_i⟩⟨ψ_i|` and `P` the support
/// projector, `ρ = r₀ P + Σ (r_i − r₀) |ψ_i⟩⟨ψ_i|`. Expanding `P` in an
/// orthonormal basis `{η_i}` of the support with `η_0 = psi` gives
///
/// `ρ = r₀|psi⟩⟨psi| + Σ_{i>0} r₀|η_i⟩⟨η_i| + Σ_i s_i|ψ_i⟩⟨ψ_i|`.
///
/// Terms come out in that order, the `s_i` ones only when above the zero
/// cutoff. `psi` is projected onto the support and phase-fixed before use.
/// Fails with `StateOutsideSupport` when `psi` has a null-space component
/// larger than `match_abs`, since every state of an expansion is orthogonal
/// to the null space.
pub fn ensemble_containing(rho: &DensityMatrix, psi: &[C64], tol: &Tolerances) -> Result<Ensemble> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a {}-dimensional state",
            psi.len(),
            rho.dim()
        )));
    }
    let n = norm(psi);
    if (n - 1.0).abs() > tol.match_abs {
        return Err(Error::NotUnit { norm: n });
    }
    let supp = support(rho, tol);
    let defect = supp.projection_defect(psi);
    if defect > tol.match_abs {
        return Err(Error::StateOutsideSupport { defect });
    }

    let eig = rho.eigen();
    let cutoff = tol.zero_cutoff(eig.lambda_max());
    let positive: Vec<(f64, &Vec<C64>)> = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(l, _)| **l > cutoff)
        .map(|(l, v)| (*l, v))
        .collect();
    let r0 = positive
        .iter()
        .map(|(l, _)| *l)
        .fold(f64::INFINITY, f64::min);

    let eta = orthonormal_basis_containing(psi, &supp, tol)?;
    let mut terms: Vec<(f64, Vec<C64>)> = eta.basis().iter().map(|v| (r0, v.clone())).collect();
    terms.extend(
        positive
            .iter()
            .map(|(r, v)| (r - r0, *v))
            .filter(|(s, _)| *s > cutoff)
            .map(|(s, v)| (s, v.clone())),
    );
    Ensemble::new(rho.dim(), terms)
}
