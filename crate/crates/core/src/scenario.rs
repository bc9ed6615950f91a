//! A concrete situation in which several observers hold the given density
//! matrices for the same system.
//!
//! Each observer `k` owns an ancilla `S_k`. Given ensembles
//! `ρ_k = p_k|φ⟩⟨φ| + Σ_{i≥1} p_{ki}|φ_{ki}⟩⟨φ_{ki}|` sharing the state `φ`,
//! the joint pure state over `S_1 ⊗ … ⊗ S_N ⊗ S` is (before normalization)
//!
//! ```text
//! |Ψ⟩ = |0…0⟩|φ⟩ + Σ_k Σ_{i≥1} √(p_{ki}/p_k) |i…i 0_k i…i⟩|φ_{ki}⟩
//! ```
//!
//! where in the `k`-th sum observer `k`'s ancilla sits at index 0 and every
//! other ancilla at index `i`. When every observer finds outcome 0 on their
//! own ancilla, observer `k`, conditioning only on their own result and
//! tracing out the rest, assigns exactly `ρ_k` to the system.

use crate::compat::common_state_witness;
use crate::density::{ensemble_containing, validate_density, DensityMatrix, Ensemble};
use crate::linalg::{inner, norm, reduced_density_of_pure, Tolerances, C64};
use crate::{Error, Result};

/// Minimum `|⟨φ|φ_k⟩|` for ensembles to count as sharing the common state.
pub const COMMON_STATE_OVERLAP: f64 = 1.0 - 1e-10;
/// Allowed deviation of a composite or conditional state norm from 1.
pub const STATE_NORM_TOL: f64 = 1e-10;

/// Pure state on `ancilla_1 ⊗ … ⊗ ancilla_N ⊗ system`, leftmost factor
/// varying slowest.
#[derive(Debug, Clone)]
pub struct CompositeState {
    ancilla_dims: Vec<usize>,
    system_dim: usize,
    amplitudes: Vec<C64>,
    common_state: Option<Vec<C64>>,
}

impl CompositeState {
    /// Wraps hand-built amplitudes. Only the shape and unit norm are
    /// checked.
    pub fn from_amplitudes(ancilla_dims: Vec<usize>, system_dim: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if ancilla_dims.len() < 2 {
            return Err(Error::FewerThanTwoObservers(ancilla_dims.len()));
        }
        if system_dim == 0 || ancilla_dims.contains(&0) {
            return Err(Error::DimensionMismatch("factor dimensions must be positive".into()));
        }
        let expected = ancilla_dims.iter().product::<usize>() * system_dim;
        if amplitudes.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(Self {
            ancilla_dims,
            system_dim,
            amplitudes,
            common_state: None,
        })
    }

    pub fn n_observers(&self) -> usize {
        self.ancilla_dims.len()
    }

    pub fn ancilla_dims(&self) -> &[usize] {
        &self.ancilla_dims
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// The shared state `φ`, for states made by [`build_joint_state`].
    pub fn common_state(&self) -> Option<&[C64]> {
        self.common_state.as_deref()
    }

    /// Ancilla dimensions followed by the system dimension.
    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = self.ancilla_dims.clone();
        dims.push(self.system_dim);
        dims
    }

    /// Flat index of ancilla digits `pattern` and system index `s`.
    pub fn index_of(&self, pattern: &[usize], s: usize) -> usize {
        debug_assert_eq!(pattern.len(), self.ancilla_dims.len());
        let anc = pattern
            .iter()
            .zip(&self.ancilla_dims)
            .fold(0usize, |acc, (&digit, &dim)| {
                debug_assert!(digit < dim);
                acc * dim + digit
            });
        anc * self.system_dim + s
    }
}

/// Builds the joint state for `N ≥ 2` ensembles whose first terms share a
/// common state `φ` with positive weight.
///
/// `ancilla_dims[j] = 1 + max_{k≠j} (len(ensemble_k) − 1)`; an ancilla
/// whose levels are never used has dimension 1.
pub fn build_joint_state(ensembles: &[Ensemble], _tol: &Tolerances) -> Result<CompositeState> {
    let n = ensembles.len();
    if n < 2 {
        return Err(Error::FewerThanTwoObservers(n));
    }
    let d = ensembles[0].dim();
    if let Some(e) = ensembles.iter().find(|e| e.dim() != d) {
        return Err(Error::DimensionMismatch(format!(
            "ensembles over dimensions {d} and {}",
            e.dim()
        )));
    }
    let phi = ensembles[0].terms()[0].1.clone();
    for (k, e) in ensembles.iter().enumerate() {
        let (p_k, first) = &e.terms()[0];
        let overlap = inner(&phi, first).norm();
        if overlap < COMMON_STATE_OVERLAP {
            return Err(Error::CommonStateMismatch { index: k, overlap });
        }
        if p_k.is_nan() || *p_k <= 0.0 {
            return Err(Error::ZeroCommonWeight { index: k });
        }
    }

    let extra: Vec<usize> = ensembles.iter().map(|e| e.len() - 1).collect();
    let ancilla_dims: Vec<usize> = (0..n)
        .map(|j| 1 + (0..n).filter(|&k| k != j).map(|k| extra[k]).max().unwrap_or(0))
        .collect();
    let total = ancilla_dims.iter().product::<usize>() * d;
    let mut state = CompositeState {
        ancilla_dims,
        system_dim: d,
        amplitudes: vec![C64::new(0.0, 0.0); total],
        common_state: Some(phi.clone()),
    };

    add_term(&mut state, &vec![0; n], 1.0, &phi);
    for (k, e) in ensembles.iter().enumerate() {
        let p_k = e.terms()[0].0;
        for (i, (p_ki, phi_ki)) in e.terms().iter().enumerate().skip(1) {
            let pattern: Vec<usize> = (0..n).map(|j| if j == k { 0 } else { i }).collect();
            add_term(&mut state, &pattern, (p_ki / p_k).sqrt(), phi_ki);
        }
    }

    let nrm = norm(&state.amplitudes);
    for z in state.amplitudes.iter_mut() {
        *z /= nrm;
    }
    Ok(state)
}

fn add_term(state: &mut CompositeState, pattern: &[usize], amp: f64, sys: &[C64]) {
    let base = state.index_of(pattern, 0);
    for (s, z) in sys.iter().enumerate() {
        state.amplitudes[base + s] += z * amp;
    }
}

/// Probability that every observer finds ancilla outcome 0.
pub fn joint_zero_outcome_probability(psi: &CompositeState) -> f64 {
    psi.amplitudes[..psi.system_dim].iter().map(|z| z.norm_sqr()).sum()
}

/// The normalized state of the remaining factors after observer `k` finds
/// outcome 0 on their ancilla.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    /// Remaining ancilla dimensions in order, then the system dimension.
    pub factor_dims: Vec<usize>,
    pub system_position: usize,
    pub amplitudes: Vec<C64>,
    /// Probability of the conditioning outcome.
    pub probability: f64,
}

/// Projects ancilla `k` onto its index-0 state, drops that factor and
/// renormalizes.
pub fn observer_conditional_state(psi: &CompositeState, k: usize) -> Result<ConditionalState> {
    let n = psi.n_observers();
    if k >= n {
        return Err(Error::DimensionMismatch(format!("observer {k} of {n}")));
    }
    // Flat layout: (outer, ancilla k, inner) with inner covering the later
    // ancillas and the system.
    let outer: usize = psi.ancilla_dims[..k].iter().product();
    let dim_k = psi.ancilla_dims[k];
    let inner_len: usize = psi.ancilla_dims[k + 1..].iter().product::<usize>() * psi.system_dim;
    let mut amplitudes = Vec::with_capacity(outer * inner_len);
    for o in 0..outer {
        let start = o * dim_k * inner_len;
        amplitudes.extend_from_slice(&psi.amplitudes[start..start + inner_len]);
    }
    let nrm = norm(&amplitudes);
    if nrm == 0.0 {
        return Err(Error::ZeroProjection(k));
    }
    for z in amplitudes.iter_mut() {
        *z /= nrm;
    }
    let mut factor_dims: Vec<usize> = psi
        .ancilla_dims
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, &d)| d)
        .collect();
    factor_dims.push(psi.system_dim);
    Ok(ConditionalState {
        system_position: factor_dims.len() - 1,
        factor_dims,
        amplitudes,
        probability: nrm * nrm,
    })
}

/// Reduced density matrix on the system factor of a normalized pure state
/// over `factor_dims`.
pub fn observer_reduced_density(
    conditional: &[C64],
    factor_dims: &[usize],
    system_position: usize,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    let n = norm(conditional);
    if (n - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::NotUnit { norm: n });
    }
    let reduced = reduced_density_of_pure(conditional, factor_dims, &[system_position])?;
    validate_density(&reduced, tol)
}

#[derive(Debug, Clone)]
pub struct ObserverOutcome {
    /// Ensemble used for this observer, common state first.
    pub ensemble: Ensemble,
    pub conditional: ConditionalState,
    pub recovered: DensityMatrix,
    /// `‖recovered − ρ_k‖_F`.
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub witness: Vec<C64>,
    pub state: CompositeState,
    pub observers: Vec<ObserverOutcome>,
    pub joint_zero_probability: f64,
    /// Every recovery distance is within `match_abs`.
    pub success: bool,
}

impl ScenarioResult {
    pub fn distances(&self) -> Vec<f64> {
        self.observers.iter().map(|o| o.distance).collect()
    }
}

/// Runs the whole construction for a compatible set: pick a common support
/// state, expand each `ρ_k` in an ensemble starting with it, build the
/// joint state and recover each `ρ_k` from the observer's conditional view.
pub fn run_scenario(rhos: &[DensityMatrix], tol: &Tolerances) -> Result<ScenarioResult> {
    if rhos.len() < 2 {
        return Err(Error::FewerThanTwoObservers(rhos.len()));
    }
    let witness = common_state_witness(rhos, tol)?.ok_or(Error::IncompatibleInputs)?;
    let ensembles = rhos
        .iter()
        .map(|rho| ensemble_containing(rho, &witness, tol))
        .collect::<Result<Vec<_>>>()?;
    let state = build_joint_state(&ensembles, tol)?;

    let mut observers = Vec::with_capacity(rhos.len());
    for (k, (rho, ensemble)) in rhos.iter().zip(ensembles).enumerate() {
        let conditional = observer_conditional_state(&state, k)?;
        let recovered = observer_reduced_density(
            &conditional.amplitudes,
            &conditional.factor_dims,
            conditional.system_position,
            tol,
        )?;
        let distance = recovered.matrix().distance(rho.matrix());
        observers.push(ObserverOutcome {
            ensemble,
            conditional,
            recovered,
            distance,
        });
    }
    let success = observers.iter().all(|o| o.distance <= tol.match_abs);
    Ok(ScenarioResult {
        witness,
        joint_zero_probability: joint_zero_outcome_probability(&state),
        state,
        observers,
        success,
    })
}
