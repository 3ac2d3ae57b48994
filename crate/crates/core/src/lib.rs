//! # fisherlab
//!
//! Simulation and analysis of twin-Fock (Holland-Burnett) interferometry with
//! photon-number-resolving detection, covering the three dominant imperfections
//! of an optical phase sensor:
//!
//! - preparation inefficiency `eta_p` (heralded Fock sources),
//! - one-arm interferometer loss `eta`,
//! - detector inefficiency `eta_d` (PNRD quantum efficiency).
//!
//! The crate computes quantum Fisher information (pure, lost-photon block
//! decomposition, and general mixed-state eigendecomposition routes), classical
//! Fisher information of photon-counting outcome distributions, closed-form
//! outcome matrices for one and two photon pairs, standard-quantum-limit
//! benchmarks, feasibility regions for a quantum advantage, and numerically
//! optimized probe states under loss.
//!
//! Modules follow the physical layering: [`fock`] holds exact photon-number
//! state algebra, [`optics`] the linear elements and loss channels, [`fisher`]
//! the information functionals, [`pipeline`] the end-to-end interferometer and
//! its closed forms, and [`bench`] the metrology benchmarks.

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod bench;
pub mod fisher;
pub mod fock;
pub mod legendre;
pub mod optics;
pub mod optim;
pub mod pipeline;

mod math;

pub use fisher::{cfi, finite_difference_check, qfi_block, qfi_general, qfi_pure};
pub use fisher::{FiniteDifferenceReport, PhotonNumberDistribution};
pub use fock::{hb_state, twin_fock, BlockDiagonalState, DensityOperator, LossBlock};
pub use fock::{OccupationLabel, PureState};
pub use optics::{
    apply_beamsplitter, apply_loss_blocks, apply_loss_blocks_with_derivative, apply_phase,
    binomial_preparation, detector_smearing, BeamSplitter, LossChannel, PipelineConfig,
};
pub use pipeline::{
    closed_form_f1, closed_form_p1, closed_form_p2, lossless_distribution, parity_expectation,
    run_pipeline, run_pipeline_with_ancillas, single_outcome_fi, ClosedFormMatrix,
    PipelineEvaluator,
};

/// Errors shared by all fisherlab computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count mismatch: {0} vs {1}")]
    ModeMismatch(usize, usize),

    #[error("mode index {index} out of range for {num_modes} modes")]
    InvalidMode { index: usize, num_modes: usize },

    #[error("label {0:?} exceeds the photon-number cutoff {1}")]
    CutoffExceeded(Vec<u32>, u32),

    #[error("state is not normalized: |norm^2 - 1| = {0:.3e}")]
    NotNormalized(f64),

    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("weights must be nonnegative and sum to 1 (got sum {0})")]
    WeightSum(f64),

    #[error("operator is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error(
        "outcome ({0}, {1}) has vanishing probability {2:.3e} but derivative {3:.3e}; \
         the phase sits on a degenerate point, offset it and re-evaluate"
    )]
    SingularOutcome(u32, u32, f64, f64),

    #[error("phase {0} is degenerate for this quantity; offset it and re-evaluate")]
    DegeneratePhase(f64),

    #[error("distribution is not normalized: sum = {0}")]
    NotADistribution(f64),

    #[error("no threshold: the advantage ratio never crosses 1 on this axis")]
    NoCrossing,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
