//! Linear-optical elements and loss channels on Fock states: beam splitters,
//! phase shifters, one-arm loss, preparation and detector inefficiency.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::fisher::PhotonNumberDistribution;
use crate::fock::PRUNE_THRESHOLD;
use crate::fock::{BlockDiagonalState, DensityOperator, LossBlock, OccupationLabel, PureState};
use crate::math::{binomial, binomial_weights, sqrt_factorial_ratio};
use crate::{Error, Result};

fn check_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(value)
}

/// A beam splitter across a pair of modes, stored as the 2x2 unitary acting on
/// the creation operators: a_p^dag -> m00 a_p^dag + m01 a_q^dag and
/// a_q^dag -> m10 a_p^dag + m11 a_q^dag.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    modes: (usize, usize),
    matrix: [[Complex64; 2]; 2],
}

impl BeamSplitter {
    /// Real symmetric convention with transmissivity `eta`:
    ///
    /// a^dag -> sqrt(eta) c^dag + sqrt(1-eta) d^dag,
    /// b^dag -> sqrt(1-eta) c^dag - sqrt(eta) d^dag.
    ///
    /// At eta = 1/2 this is the balanced splitter sqrt(2) a^dag -> c^dag + d^dag,
    /// sqrt(2) b^dag -> c^dag - d^dag.
    pub fn real_symmetric(eta: f64, modes: (usize, usize)) -> Result<Self> {
        check_unit_interval("transmissivity", eta)?;
        let t = eta.sqrt();
        let r = (1.0 - eta).sqrt();
        let c = |x: f64| Complex64::new(x, 0.0);
        Ok(BeamSplitter {
            modes,
            matrix: [[c(t), c(r)], [c(r), c(-t)]],
        })
    }

    /// Balanced 50:50 splitter in the real symmetric convention.
    pub fn balanced(modes: (usize, usize)) -> Self {
        BeamSplitter::real_symmetric(0.5, modes).expect("0.5 is a valid transmissivity")
    }

    /// Generator convention exp(i theta (a^dag b + a b^dag)) with
    /// transmissivity cos^2(theta):
    ///
    /// a^dag -> cos(theta) a^dag + i sin(theta) b^dag, and symmetrically.
    pub fn from_generator(theta: f64, modes: (usize, usize)) -> Self {
        let (s, c) = theta.sin_cos();
        BeamSplitter {
            modes,
            matrix: [
                [Complex64::new(c, 0.0), Complex64::new(0.0, s)],
                [Complex64::new(0.0, s), Complex64::new(c, 0.0)],
            ],
        }
    }

    pub fn modes(&self) -> (usize, usize) {
        self.modes
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.matrix
    }

    /// |m00|^2, the power fraction staying in the first mode.
    pub fn transmissivity(&self) -> f64 {
        self.matrix[0][0].norm_sqr()
    }

    /// Same element pattern on a different mode pair.
    pub fn on_modes(&self, modes: (usize, usize)) -> Self {
        BeamSplitter {
            modes,
            matrix: self.matrix,
        }
    }

    /// Largest deviation of M M^dag from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[i][k] * m[j][k].conj()).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }
}

/// One-arm loss: a^dag -> sqrt(eta) a^dag + sqrt(1-eta) e^dag with `e` an
/// inaccessible environment mode, tracked only through its photon count.
#[derive(Debug, Clone, Copy)]
pub struct LossChannel {
    pub transmissivity: f64,
    pub target_mode: usize,
}

impl LossChannel {
    pub fn new(transmissivity: f64, target_mode: usize) -> Result<Self> {
        check_unit_interval("transmissivity", transmissivity)?;
        Ok(LossChannel {
            transmissivity,
            target_mode,
        })
    }
}

/// Full interferometer parameterization: twin-Fock order N, phase, the three
/// efficiencies, and the two beam-splitter conventions. `eta_p = eta = eta_d = 1`
/// is the perfect setup.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub photon_pairs: u32,
    pub phase: f64,
    pub eta_p: f64,
    pub eta: f64,
    pub eta_d: f64,
    pub bs1: BeamSplitter,
    pub bs2: BeamSplitter,
}

impl PipelineConfig {
    /// Defaults: both splitters balanced in the real symmetric convention.
    pub fn new(photon_pairs: u32, phase: f64, eta_p: f64, eta: f64, eta_d: f64) -> Result<Self> {
        check_unit_interval("eta_p", eta_p)?;
        check_unit_interval("eta", eta)?;
        check_unit_interval("eta_d", eta_d)?;
        Ok(PipelineConfig {
            photon_pairs,
            phase,
            eta_p,
            eta,
            eta_d,
            bs1: BeamSplitter::balanced((0, 1)),
            bs2: BeamSplitter::balanced((0, 1)),
        })
    }

    /// Perfect setup at the given phase.
    pub fn perfect(photon_pairs: u32, phase: f64) -> Self {
        PipelineConfig::new(photon_pairs, phase, 1.0, 1.0, 1.0)
            .expect("unit efficiencies are in range")
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        let mut config = self.clone();
        config.phase = phase;
        config
    }
}

/// Apply a beam splitter by expanding each label's creation-operator monomial
/// through the 2x2 mode matrix. Multinomial coefficients are combined from
/// exact integers before float conversion; total photon number per label is
/// preserved.
pub fn apply_beamsplitter(state: &PureState, bs: &BeamSplitter) -> Result<PureState> {
    let (p, q) = bs.modes;
    let modes = state.num_modes();
    if p >= modes || q >= modes || p == q {
        return Err(Error::InvalidMode {
            index: p.max(q),
            num_modes: modes,
        });
    }
    let m = &bs.matrix;
    let mut out = PureState::zero(modes, state.cutoff());
    for (label, amp) in state.amplitudes() {
        let na = label.occupation(p);
        let nb = label.occupation(q);
        for j in 0..=na {
            // (m00 c + m01 d)^na term: choose j factors of c.
            let pow_a = m[0][0].powu(j) * m[0][1].powu(na - j);
            let coeff_a = binomial(na, j);
            for k in 0..=nb {
                let pow_b = m[1][0].powu(k) * m[1][1].powu(nb - k);
                let coeff = coeff_a * binomial(nb, k);
                let out_p = j + k;
                let out_q = na + nb - out_p;
                // <out| a_p^dag^j ... |0> normalization ratio.
                let norm = sqrt_factorial_ratio(out_p, out_q, na, nb);
                let new_label = label.with_occupation(p, out_p).with_occupation(q, out_q);
                out.accumulate(new_label, amp * pow_a * pow_b * coeff * norm)?;
            }
        }
    }
    Ok(out.pruned(PRUNE_THRESHOLD))
}

/// Phase shifter on one mode: each amplitude gains exp(i phi n_mode).
pub fn apply_phase(state: &PureState, mode: usize, phi: f64) -> Result<PureState> {
    if mode >= state.num_modes() {
        return Err(Error::InvalidMode {
            index: mode,
            num_modes: state.num_modes(),
        });
    }
    let amps = state.amplitudes().map(|(label, amp)| {
        let n = label.occupation(mode) as f64;
        (label.clone(), amp * Complex64::from_polar(1.0, phi * n))
    });
    let collected: Vec<_> = amps.collect();
    PureState::from_amplitudes(state.num_modes(), state.cutoff(), collected)
}

/// Loss amplitude for keeping n-m of n photons: sqrt(C(n,m) eta^(n-m) (1-eta)^m).
fn loss_coefficient(n: u32, m: u32, eta: f64) -> f64 {
    (binomial(n, m) * eta.powi((n - m) as i32) * (1.0 - eta).powi(m as i32)).sqrt()
}

/// Split a state by the number of photons lost from the target mode. Returns
/// unnormalized sector states keyed by the lost-photon count; the map is
/// linear in the input amplitudes.
pub(crate) fn loss_split(
    state: &PureState,
    channel: &LossChannel,
) -> Result<BTreeMap<u32, PureState>> {
    if channel.target_mode >= state.num_modes() {
        return Err(Error::InvalidMode {
            index: channel.target_mode,
            num_modes: state.num_modes(),
        });
    }
    let eta = channel.transmissivity;
    let mut sectors: BTreeMap<u32, PureState> = BTreeMap::new();
    for (label, amp) in state.amplitudes() {
        let n = label.occupation(channel.target_mode);
        for m in 0..=n {
            let coeff = loss_coefficient(n, m, eta);
            if coeff == 0.0 {
                continue;
            }
            let sector = sectors
                .entry(m)
                .or_insert_with(|| PureState::zero(state.num_modes(), state.cutoff()));
            sector.accumulate(
                label.with_occupation(channel.target_mode, n - m),
                amp * coeff,
            )?;
        }
    }
    Ok(sectors)
}

/// Apply one-arm loss, returning the mixed state as weighted pure blocks
/// indexed by lost-photon count. Blocks with zero weight are dropped.
pub fn apply_loss_blocks(state: &PureState, channel: &LossChannel) -> Result<BlockDiagonalState> {
    let sectors = loss_split(state, channel)?;
    let mut blocks = Vec::with_capacity(sectors.len());
    for (lost, sector) in sectors {
        let weight = sector.norm_sqr();
        if weight <= 0.0 {
            continue;
        }
        blocks.push(LossBlock {
            lost_photons: lost,
            weight,
            state: sector.scaled(Complex64::new(1.0 / weight.sqrt(), 0.0)),
        });
    }
    BlockDiagonalState::new(blocks)
}

/// Loss applied to a state and its phase derivative together. Returns the
/// block decomposition plus the derivative of each normalized block, aligned
/// by index.
///
/// Valid when the phase enters upstream through mode phases exp(i phi n), so
/// every block weight is phase-stationary and the normalized-block derivative
/// is just the split derivative rescaled by 1/sqrt(weight).
pub fn apply_loss_blocks_with_derivative(
    state: &PureState,
    derivative: &PureState,
    channel: &LossChannel,
) -> Result<(BlockDiagonalState, Vec<PureState>)> {
    let sectors = loss_split(state, channel)?;
    let mut deriv_sectors = loss_split(derivative, channel)?;
    let mut blocks = Vec::with_capacity(sectors.len());
    let mut derivs = Vec::with_capacity(sectors.len());
    for (lost, sector) in sectors {
        let weight = sector.norm_sqr();
        if weight <= 0.0 {
            continue;
        }
        let scale = Complex64::new(1.0 / weight.sqrt(), 0.0);
        blocks.push(LossBlock {
            lost_photons: lost,
            weight,
            state: sector.scaled(scale),
        });
        let dsector = deriv_sectors
            .remove(&lost)
            .unwrap_or_else(|| PureState::zero(state.num_modes(), state.cutoff()));
        derivs.push(dsector.scaled(scale));
    }
    Ok((BlockDiagonalState::from_blocks_unchecked(blocks), derivs))
}

/// Heralded-source model: an ideal N-photon Fock state behind a beam splitter
/// of transmissivity eta_p becomes the diagonal binomial mixture
/// sum_n C(N,n) eta_p^n (1-eta_p)^(N-n) |n><n|.
pub fn binomial_preparation(n: u32, eta_p: f64) -> Result<DensityOperator> {
    check_unit_interval("eta_p", eta_p)?;
    let weights = binomial_weights(n, eta_p);
    Ok(DensityOperator::diagonal(
        weights
            .into_iter()
            .enumerate()
            .map(|(k, w)| (OccupationLabel::new(vec![k as u32]), w)),
    ))
}

/// Detector inefficiency as binomial smearing of the joint counts:
///
/// p'(m,n) = sum_{M>=m, K>=n} p(M,K) C(M,m) eta_d^m (1-eta_d)^(M-m)
///                                    C(K,n) eta_d^n (1-eta_d)^(K-n).
///
/// Equivalent to beam splitters of transmissivity eta_d feeding ideal PNRDs
/// with the ancilla modes traced out, because photon-number measurement is
/// diagonal in the counts. Derivatives smear through the same linear map.
pub fn detector_smearing(
    dist: &PhotonNumberDistribution,
    eta_d: f64,
) -> Result<PhotonNumberDistribution> {
    check_unit_interval("eta_d", eta_d)?;
    let total = dist.total_probability();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotADistribution(total));
    }
    let mut probs: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut derivs: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for ((big_m, big_k), p, dp) in dist.iter() {
        let row = binomial_weights(big_m, eta_d);
        let col = binomial_weights(big_k, eta_d);
        for (m, wm) in row.iter().enumerate() {
            for (k, wk) in col.iter().enumerate() {
                let w = wm * wk;
                if w == 0.0 {
                    continue;
                }
                let key = (m as u32, k as u32);
                *probs.entry(key).or_insert(0.0) += w * p;
                *derivs.entry(key).or_insert(0.0) += w * dp;
            }
        }
    }
    PhotonNumberDistribution::new(probs, derivs, dist.phase())
}
