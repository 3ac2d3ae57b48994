//! Exact multi-mode photon-number (Fock) state algebra at small photon number.
//!
//! States are sparse maps from occupation labels to complex amplitudes; the
//! dense matrix form only appears in [`DensityOperator`]. All values are
//! immutable after construction and safe to share across threads.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::math::binomial;
use crate::{Error, Result};

/// Amplitudes smaller than this may be dropped; pruning at this level moves no
/// inner product by more than 1e-12.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Photon occupation numbers per mode. Ordering is lexicographic, which fixes
/// the basis layout of every derived matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationLabel(Vec<u32>);

impl OccupationLabel {
    pub fn new(counts: impl Into<Vec<u32>>) -> Self {
        OccupationLabel(counts.into())
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn num_modes(&self) -> usize {
        self.0.len()
    }

    pub fn occupation(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Total photon number across all modes.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Copy with one mode's occupation replaced.
    pub fn with_occupation(&self, mode: usize, value: u32) -> Self {
        let mut counts = self.0.clone();
        counts[mode] = value;
        OccupationLabel(counts)
    }

    /// Copy extended by extra vacuum modes.
    pub fn extended(&self, extra_modes: usize) -> Self {
        let mut counts = self.0.clone();
        counts.extend(std::iter::repeat_n(0, extra_modes));
        OccupationLabel(counts)
    }
}

impl From<&[u32]> for OccupationLabel {
    fn from(counts: &[u32]) -> Self {
        OccupationLabel(counts.to_vec())
    }
}

/// A pure state over a fixed number of modes with a run-wide total-photon
/// cutoff. The cutoff is set at construction and checked on every operation;
/// beam splitters and loss never increase total photon number, so a cutoff of
/// 2N is safe for a twin-Fock run with N photons per arm.
#[derive(Debug, Clone)]
pub struct PureState {
    num_modes: usize,
    cutoff: u32,
    amps: BTreeMap<OccupationLabel, Complex64>,
}

impl PureState {
    /// Empty (zero) state.
    pub fn zero(num_modes: usize, cutoff: u32) -> Self {
        PureState {
            num_modes,
            cutoff,
            amps: BTreeMap::new(),
        }
    }

    /// Single Fock ket |counts> with amplitude 1.
    pub fn fock(counts: &[u32], cutoff: u32) -> Result<Self> {
        let mut state = PureState::zero(counts.len(), cutoff);
        state.accumulate(OccupationLabel::from(counts), Complex64::new(1.0, 0.0))?;
        Ok(state)
    }

    /// Build from explicit amplitudes. Labels must share the mode count and
    /// respect the cutoff; amplitudes below [`PRUNE_THRESHOLD`] are dropped.
    pub fn from_amplitudes(
        num_modes: usize,
        cutoff: u32,
        amplitudes: impl IntoIterator<Item = (OccupationLabel, Complex64)>,
    ) -> Result<Self> {
        let mut state = PureState::zero(num_modes, cutoff);
        for (label, amp) in amplitudes {
            state.accumulate(label, amp)?;
        }
        Ok(state.pruned(PRUNE_THRESHOLD))
    }

    pub(crate) fn accumulate(&mut self, label: OccupationLabel, amp: Complex64) -> Result<()> {
        if label.num_modes() != self.num_modes {
            return Err(Error::ModeMismatch(label.num_modes(), self.num_modes));
        }
        if label.total() > self.cutoff {
            return Err(Error::CutoffExceeded(label.counts().to_vec(), self.cutoff));
        }
        *self.amps.entry(label).or_insert(Complex64::ZERO) += amp;
        Ok(())
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn amplitude(&self, label: &OccupationLabel) -> Complex64 {
        self.amps.get(label).copied().unwrap_or(Complex64::ZERO)
    }

    /// Amplitudes in lexicographic label order.
    pub fn amplitudes(&self) -> impl Iterator<Item = (&OccupationLabel, &Complex64)> {
        self.amps.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Scale to unit norm. Errors on the zero vector.
    pub fn normalized(&self) -> Result<PureState> {
        let norm = self.norm();
        if norm <= 0.0 {
            return Err(Error::NotNormalized(1.0));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> PureState {
        PureState {
            num_modes: self.num_modes,
            cutoff: self.cutoff,
            amps: self
                .amps
                .iter()
                .map(|(l, a)| (l.clone(), a * factor))
                .collect(),
        }
    }

    /// Drop amplitudes with modulus below `threshold`.
    pub fn pruned(mut self, threshold: f64) -> PureState {
        self.amps.retain(|_, a| a.norm() >= threshold);
        self
    }

    /// Conjugate-linear in `self`: <self|other>.
    pub fn inner_product(&self, other: &PureState) -> Result<Complex64> {
        if self.num_modes != other.num_modes {
            return Err(Error::ModeMismatch(self.num_modes, other.num_modes));
        }
        // Iterate the smaller support.
        let (lhs, rhs, conj_lhs) = if self.amps.len() <= other.amps.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::ZERO;
        for (label, amp) in &lhs.amps {
            let paired = rhs.amplitude(label);
            acc += if conj_lhs {
                amp.conj() * paired
            } else {
                paired.conj() * amp
            };
        }
        Ok(acc)
    }

    /// Unnormalized derivative state: each amplitude picks up a factor
    /// i * (occupation of `mode`). This is d/dphi when the phase enters the
    /// amplitudes as exp(i * phi * n_mode).
    pub fn number_derivative(&self, mode: usize) -> Result<PureState> {
        if mode >= self.num_modes {
            return Err(Error::InvalidMode {
                index: mode,
                num_modes: self.num_modes,
            });
        }
        let amps = self
            .amps
            .iter()
            .filter(|(label, _)| label.occupation(mode) > 0)
            .map(|(label, amp)| {
                let n = label.occupation(mode) as f64;
                (label.clone(), Complex64::new(0.0, n) * amp)
            })
            .collect();
        Ok(PureState {
            num_modes: self.num_modes,
            cutoff: self.cutoff,
            amps,
        })
    }

    /// Rank-1 projector |self><self| over the state's own support.
    pub fn to_density(&self) -> DensityOperator {
        let basis: Vec<OccupationLabel> = self.amps.keys().cloned().collect();
        let vec: Vec<Complex64> = basis.iter().map(|l| self.amplitude(l)).collect();
        let dim = basis.len();
        let matrix = DMatrix::from_fn(dim, dim, |i, j| vec[i] * vec[j].conj());
        DensityOperator { basis, matrix }
    }
}

/// Twin-Fock input |N>|N>: exactly N photons in each of two modes.
///
/// N is unsigned by type, which is the "negative N rejected" contract.
pub fn twin_fock(n: u32) -> PureState {
    PureState::fock(&[n, n], 2 * n).expect("twin Fock ket fits its own cutoff")
}

/// Holland-Burnett state of order N at phase `phi`:
///
/// sum_n A_n |2n, 2N-2n>,  A_n = sqrt((2n)! (2N-2n)!) / (2^N n! (N-n)!) * exp(2 i n phi),
///
/// the positive-amplitude form. The first mode carries the phase. Note the
/// physical beam-splitter image of |N>|N> differs from this by a sign flip
/// (-1)^(N-n) on each ket, a diagonal sign pattern that no probability,
/// overlap modulus, or Fisher information quantity can see.
pub fn hb_state(n: u32, phi: f64) -> Result<PureState> {
    if n == 0 {
        return Err(Error::Invalid(
            "Holland-Burnett order N = 0 is degenerate (vacuum carries no phase)".into(),
        ));
    }
    let cutoff = 2 * n;
    let mut amps = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        // A_k^2 = C(2k, k) * C(2N-2k, N-k) / 4^N, combined from exact integers.
        let modulus =
            (binomial(2 * k, k) * binomial(2 * (n - k), n - k)).sqrt() / (2.0f64).powi(n as i32);
        let amp = Complex64::from_polar(modulus, 2.0 * k as f64 * phi);
        amps.push((OccupationLabel::new(vec![2 * k, 2 * (n - k)]), amp));
    }
    PureState::from_amplitudes(2, cutoff, amps)
}

/// Density operator on an explicit, lexicographically ordered occupation basis.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    basis: Vec<OccupationLabel>,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub(crate) fn from_parts(basis: Vec<OccupationLabel>, matrix: DMatrix<Complex64>) -> Self {
        DensityOperator { basis, matrix }
    }

    /// Diagonal operator from (label, probability) pairs.
    pub fn diagonal(entries: impl IntoIterator<Item = (OccupationLabel, f64)>) -> Self {
        let entries: BTreeMap<OccupationLabel, f64> = entries.into_iter().collect();
        let basis: Vec<OccupationLabel> = entries.keys().cloned().collect();
        let dim = basis.len();
        let mut matrix = DMatrix::zeros(dim, dim);
        for (i, label) in basis.iter().enumerate() {
            matrix[(i, i)] = Complex64::new(entries[label], 0.0);
        }
        DensityOperator { basis, matrix }
    }

    pub fn basis(&self) -> &[OccupationLabel] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diagonal().sum()
    }

    pub fn entry(&self, row: &OccupationLabel, col: &OccupationLabel) -> Complex64 {
        let i = self.basis.binary_search(row);
        let j = self.basis.binary_search(col);
        match (i, j) {
            (Ok(i), Ok(j)) => self.matrix[(i, j)],
            _ => Complex64::ZERO,
        }
    }

    /// Largest |rho_ij - conj(rho_ji)|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Check Hermiticity (1e-12), unit trace (1e-12), and spectrum >= -1e-10.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::NotHermitian(herm));
        }
        let trace = self.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::NotADistribution(trace.re));
        }
        let eigen = nalgebra::SymmetricEigen::new(self.matrix.clone());
        if let Some(min) = eigen.eigenvalues.iter().copied().reduce(f64::min) {
            if min < -1e-10 {
                return Err(Error::Invalid(format!(
                    "density operator has eigenvalue {min:.3e} below -1e-10"
                )));
            }
        }
        Ok(())
    }

    /// Embed into a larger basis (union of both bases, sorted).
    fn embedded(&self, basis: &[OccupationLabel]) -> DMatrix<Complex64> {
        let index: BTreeMap<&OccupationLabel, usize> =
            basis.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut matrix = DMatrix::zeros(basis.len(), basis.len());
        for (i, row) in self.basis.iter().enumerate() {
            for (j, col) in self.basis.iter().enumerate() {
                matrix[(index[row], index[col])] = self.matrix[(i, j)];
            }
        }
        matrix
    }

    /// Convex mixture. Weights must be nonnegative and sum to 1 within 1e-10.
    pub fn mix(components: &[(f64, DensityOperator)]) -> Result<DensityOperator> {
        let sum: f64 = components.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > 1e-10 || components.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::WeightSum(sum));
        }
        let mut labels: Vec<OccupationLabel> = components
            .iter()
            .flat_map(|(_, rho)| rho.basis.iter().cloned())
            .collect();
        labels.sort();
        labels.dedup();
        let mut matrix = DMatrix::zeros(labels.len(), labels.len());
        for (weight, rho) in components {
            matrix += rho.embedded(&labels) * Complex64::new(*weight, 0.0);
        }
        Ok(DensityOperator {
            basis: labels,
            matrix,
        })
    }
}

/// One lost-photon sector of a state after a loss channel: `weight` is the
/// probability of losing `lost_photons` photons, `state` the normalized
/// conditional state.
#[derive(Debug, Clone)]
pub struct LossBlock {
    pub lost_photons: u32,
    pub weight: f64,
    pub state: PureState,
}

/// Mixed state written as a weighted list of pure blocks distinguished by an
/// orthogonal environment label (the lost-photon count). Blocks live in
/// disjoint total-photon-number sectors, so the flattened operator is block
/// diagonal.
#[derive(Debug, Clone)]
pub struct BlockDiagonalState {
    blocks: Vec<LossBlock>,
}

impl BlockDiagonalState {
    pub fn new(blocks: Vec<LossBlock>) -> Result<Self> {
        let state = BlockDiagonalState { blocks };
        state.validate()?;
        Ok(state)
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<LossBlock>) -> Self {
        BlockDiagonalState { blocks }
    }

    pub fn blocks(&self) -> &[LossBlock] {
        &self.blocks
    }

    pub fn total_weight(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let total = self.total_weight();
        if (total - 1.0).abs() > 1e-12 || self.blocks.iter().any(|b| b.weight < 0.0) {
            return Err(Error::WeightSum(total));
        }
        for block in &self.blocks {
            if !block.state.is_normalized(1e-12) {
                return Err(Error::NotNormalized((block.state.norm_sqr() - 1.0).abs()));
            }
        }
        let mut lost: Vec<u32> = self.blocks.iter().map(|b| b.lost_photons).collect();
        lost.sort_unstable();
        lost.dedup();
        if lost.len() != self.blocks.len() {
            return Err(Error::Invalid("duplicate lost-photon labels".into()));
        }
        Ok(())
    }

    /// Trace out the environment label: sum of weighted projectors.
    pub fn flatten(&self) -> Result<DensityOperator> {
        let components: Vec<(f64, DensityOperator)> = self
            .blocks
            .iter()
            .map(|b| (b.weight, b.state.to_density()))
            .collect();
        DensityOperator::mix(&components)
    }

    /// Flatten together with the phase derivative of the operator,
    /// d rho = sum_m w_m (|d psi_m><psi_m| + |psi_m><d psi_m|),
    /// given the derivative of each normalized block (weights are
    /// phase-stationary for number-diagonal loss).
    pub fn flatten_with_derivative(
        &self,
        block_derivs: &[PureState],
    ) -> Result<(DensityOperator, DensityOperator)> {
        if block_derivs.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch(
                block_derivs.len(),
                self.blocks.len(),
            ));
        }
        let rho = self.flatten()?;
        let basis = rho.basis().to_vec();
        let index: BTreeMap<&OccupationLabel, usize> =
            basis.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let dim = basis.len();
        let mut dmatrix: DMatrix<Complex64> = DMatrix::zeros(dim, dim);
        for (block, deriv) in self.blocks.iter().zip(block_derivs) {
            let w = Complex64::new(block.weight, 0.0);
            for (dl, da) in deriv.amplitudes() {
                for (sl, sa) in block.state.amplitudes() {
                    let (i, j) = (index[dl], index[sl]);
                    let term = w * da * sa.conj();
                    dmatrix[(i, j)] += term;
                    dmatrix[(j, i)] += term.conj();
                }
            }
        }
        let drho = DensityOperator::from_parts(basis, dmatrix);
        Ok((rho, drho))
    }
}
