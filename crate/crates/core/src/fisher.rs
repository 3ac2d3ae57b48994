//! Quantum and classical Fisher information.
//!
//! Three quantum routes are kept deliberately independent of each other:
//! [`qfi_pure`] for pure states, [`qfi_block`] for lost-photon block
//! decompositions (a weighted sum of pure-block values), and [`qfi_general`]
//! for arbitrary mixed states through a Hermitian eigendecomposition. Their
//! agreement is itself a validation check, not an implementation shortcut.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::fock::{BlockDiagonalState, DensityOperator, PureState};
use crate::{Error, Result};

/// Eigenvalue-sum cutoff in the mixed-state formula; pairs with
/// lambda_i + lambda_j below this are skipped.
pub const QFI_EIGENVALUE_CUTOFF: f64 = 1e-10;

/// Probabilities below this count as vanished outcomes.
const PROB_FLOOR: f64 = 1e-12;
/// A vanished outcome whose derivative exceeds this trips the singularity
/// diagnostic: the phase sits exactly on a degenerate point.
const DERIV_FLOOR: f64 = 1e-9;

/// Joint photon-counting outcome distribution p(m, n) with analytic phase
/// derivatives. Probabilities in [-1e-12, 0) are clamped to 0 on construction;
/// the total must be 1 within 1e-10 and the derivative sum 0 within 1e-10.
#[derive(Debug, Clone)]
pub struct PhotonNumberDistribution {
    probs: BTreeMap<(u32, u32), f64>,
    derivs: BTreeMap<(u32, u32), f64>,
    phase: f64,
}

impl PhotonNumberDistribution {
    pub fn new(
        probs: BTreeMap<(u32, u32), f64>,
        derivs: BTreeMap<(u32, u32), f64>,
        phase: f64,
    ) -> Result<Self> {
        let mut clamped = probs;
        for (key, p) in clamped.iter_mut() {
            if *p < 0.0 {
                if *p < -PROB_FLOOR {
                    return Err(Error::Invalid(format!(
                        "outcome {key:?} has probability {p:.3e} below -1e-12"
                    )));
                }
                *p = 0.0;
            }
        }
        let total: f64 = clamped.values().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotADistribution(total));
        }
        let dsum: f64 = derivs.values().sum();
        if dsum.abs() > 1e-10 {
            return Err(Error::Invalid(format!(
                "derivatives sum to {dsum:.3e}, expected 0"
            )));
        }
        Ok(PhotonNumberDistribution {
            probs: clamped,
            derivs,
            phase,
        })
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn probability(&self, m: u32, n: u32) -> f64 {
        self.probs.get(&(m, n)).copied().unwrap_or(0.0)
    }

    pub fn derivative(&self, m: u32, n: u32) -> f64 {
        self.derivs.get(&(m, n)).copied().unwrap_or(0.0)
    }

    pub fn total_probability(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn derivative_sum(&self) -> f64 {
        self.derivs.values().sum()
    }

    /// Outcomes in lexicographic key order: ((m, n), p, dp/dphi).
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64, f64)> + '_ {
        self.probs
            .iter()
            .map(|(key, p)| (*key, *p, self.derivative(key.0, key.1)))
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    /// Marginal distribution of the first count.
    pub fn first_marginal(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for ((m, _), p, _) in self.iter() {
            *out.entry(m).or_insert(0.0) += p;
        }
        out
    }

    /// Largest |p(m,n) - p(n,m)|.
    pub fn symmetry_error(&self) -> f64 {
        self.iter()
            .map(|((m, n), p, _)| (p - self.probability(n, m)).abs())
            .fold(0.0, f64::max)
    }
}

/// Pure-state quantum Fisher information
/// J = 4 (<d|d> - |<s|d>|^2) for a normalized state and its phase derivative.
pub fn qfi_pure(state: &PureState, derivative: &PureState) -> Result<f64> {
    let norm_err = (state.norm_sqr() - 1.0).abs();
    if norm_err > 1e-8 {
        return Err(Error::NotNormalized(norm_err));
    }
    let dd = derivative.inner_product(derivative)?;
    let sd = state.inner_product(derivative)?;
    Ok(4.0 * (dd.re - sd.norm_sqr()))
}

/// Block-decomposition QFI: J = sum_m w_m J(psi_m) over normalized pure
/// blocks with phase-stationary weights, `block_derivs` aligned by index.
pub fn qfi_block(state: &BlockDiagonalState, block_derivs: &[PureState]) -> Result<f64> {
    if block_derivs.len() != state.blocks().len() {
        return Err(Error::DimensionMismatch(
            block_derivs.len(),
            state.blocks().len(),
        ));
    }
    let total = state.total_weight();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::WeightSum(total));
    }
    let mut acc = 0.0;
    for (block, deriv) in state.blocks().iter().zip(block_derivs) {
        acc += block.weight * qfi_pure(&block.state, deriv)?;
    }
    Ok(acc)
}

/// General mixed-state QFI from the symmetric-logarithmic-derivative formula:
///
/// J = 2 sum_{i,j: li+lj > eps} |<i| drho |j>|^2 / (li + lj)
///
/// over the eigenpairs of rho, with eps = [`QFI_EIGENVALUE_CUTOFF`].
pub fn qfi_general(rho: &DensityOperator, drho: &DensityOperator) -> Result<f64> {
    qfi_general_with_cutoff(rho, drho, QFI_EIGENVALUE_CUTOFF)
}

/// [`qfi_general`] with an explicit eigenvalue cutoff, for sensitivity reports.
pub fn qfi_general_with_cutoff(
    rho: &DensityOperator,
    drho: &DensityOperator,
    cutoff: f64,
) -> Result<f64> {
    if rho.basis() != drho.basis() {
        return Err(Error::DimensionMismatch(rho.dim(), drho.dim()));
    }
    let herm = rho.hermiticity_error().max(drho.hermiticity_error());
    if herm > 1e-10 {
        return Err(Error::NotHermitian(herm));
    }
    let dtrace = drho.trace();
    if dtrace.norm() > 1e-8 {
        return Err(Error::Invalid(format!(
            "derivative operator has trace {dtrace} (expected 0)"
        )));
    }
    let eigen = SymmetricEigen::new(rho.matrix().clone());
    let lambda = &eigen.eigenvalues;
    let vectors = &eigen.eigenvectors;
    // M = V^dag drho V, so M_ij = <i|drho|j> in the eigenbasis.
    let m: DMatrix<Complex64> = vectors.adjoint() * drho.matrix() * vectors;
    let dim = rho.dim();
    let mut acc = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let denom = lambda[i] + lambda[j];
            if denom > cutoff {
                acc += m[(i, j)].norm_sqr() / denom;
            }
        }
    }
    Ok(2.0 * acc)
}

/// Classical Fisher information F = sum (dp/dphi)^2 / p of an outcome
/// distribution. Vanished outcomes contribute nothing when their derivative
/// also vanishes; a vanished outcome with a live derivative means the phase
/// sits on a degenerate point and surfaces as [`Error::SingularOutcome`].
pub fn cfi(dist: &PhotonNumberDistribution) -> Result<f64> {
    let mut acc = 0.0;
    for ((m, n), p, dp) in dist.iter() {
        if p < PROB_FLOOR {
            if dp.abs() < DERIV_FLOOR {
                continue;
            }
            return Err(Error::SingularOutcome(m, n, p, dp));
        }
        acc += dp * dp / p;
    }
    Ok(acc)
}

/// Result of checking analytic derivatives against central differences.
#[derive(Debug, Clone)]
pub struct FiniteDifferenceReport {
    pub phase: f64,
    pub step: f64,
    pub max_abs_error: f64,
    pub worst_outcome: Option<(u32, u32)>,
}

/// Compare the analytic derivatives of `evaluate(phi)` against the central
/// difference (p(phi+h) - p(phi-h)) / 2h. The step must lie in (0, 1e-2].
pub fn finite_difference_check<F>(
    evaluate: F,
    phi: f64,
    step: f64,
) -> Result<FiniteDifferenceReport>
where
    F: Fn(f64) -> Result<PhotonNumberDistribution>,
{
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::OutOfRange {
            name: "step",
            value: step,
            min: f64::MIN_POSITIVE,
            max: 1e-2,
        });
    }
    let center = evaluate(phi)?;
    let plus = evaluate(phi + step)?;
    let minus = evaluate(phi - step)?;
    let mut keys: Vec<(u32, u32)> = center.iter().map(|(k, _, _)| k).collect();
    keys.extend(plus.iter().map(|(k, _, _)| k));
    keys.sort_unstable();
    keys.dedup();
    let mut max_abs_error = 0.0;
    let mut worst = None;
    for key in keys {
        let fd = (plus.probability(key.0, key.1) - minus.probability(key.0, key.1)) / (2.0 * step);
        let err = (fd - center.derivative(key.0, key.1)).abs();
        if err > max_abs_error {
            max_abs_error = err;
            worst = Some(key);
        }
    }
    Ok(FiniteDifferenceReport {
        phase: phi,
        step,
        max_abs_error,
        worst_outcome: worst,
    })
}
