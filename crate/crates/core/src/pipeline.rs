//! End-to-end simulation of the twin-Fock interferometer:
//!
//! twin Fock -> BS1 -> phase -> one-arm loss -> BS2 -> inefficient PNRDs,
//!
//! producing joint photon-counting distributions with analytic phase
//! derivatives, together with every closed form used to cross-validate it.
//!
//! The default evaluator enumerates preparation branches exactly, splits the
//! lossy arm into lost-photon sectors, and stores each outcome amplitude as a
//! short trigonometric polynomial in the phase; one parameter set is then
//! cheap to interrogate at many phases. A brute-force path with explicit
//! environment and detector-ancilla modes ([`run_pipeline_with_ancillas`])
//! validates it end to end.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::fisher::PhotonNumberDistribution;
use crate::fock::PureState;
use crate::legendre::{legendre_derivative, legendre_unchecked};
use crate::math::{binomial_weights, factorial};
use crate::optics::loss_split;
use crate::optics::{
    apply_beamsplitter, apply_phase, detector_smearing, BeamSplitter, LossChannel, PipelineConfig,
};
use crate::{Error, Result};

/// Trigonometric-polynomial amplitude: (harmonic, coefficient) pairs summed
/// as sum_h c_h exp(i h phi).
type Harmonics = Vec<(u32, Complex64)>;

/// One coherent contribution: a fixed preparation branch and lost-photon
/// sector, with one amplitude polynomial per reachable outcome.
struct CoherentGroup {
    weight: f64,
    terms: Vec<(usize, Harmonics)>,
}

/// Reusable evaluator for one (N, eta_p, eta, eta_d) parameter set.
pub struct PipelineEvaluator {
    photon_pairs: u32,
    outcomes: Vec<(u32, u32)>,
    groups: Vec<CoherentGroup>,
    /// Binomial detector-smearing map (from, to, weight); `None` at eta_d = 1.
    smear: Option<Vec<(usize, usize, f64)>>,
}

impl PipelineEvaluator {
    /// Default beam-splitter conventions (balanced, real symmetric).
    pub fn new(photon_pairs: u32, eta_p: f64, eta: f64, eta_d: f64) -> Result<Self> {
        let config = PipelineConfig::new(photon_pairs, 0.0, eta_p, eta, eta_d)?;
        PipelineEvaluator::from_config(&config)
    }

    /// Build from a full configuration; the configured phase is ignored, the
    /// phase is supplied per [`PipelineEvaluator::distribution`] call.
    pub fn from_config(config: &PipelineConfig) -> Result<Self> {
        let n = config.photon_pairs;
        let cutoff = 2 * n;
        let outcomes: Vec<(u32, u32)> = (0..=cutoff)
            .flat_map(|m| (0..=(cutoff - m)).map(move |k| (m, k)))
            .collect();
        let index: BTreeMap<(u32, u32), usize> = outcomes
            .iter()
            .enumerate()
            .map(|(i, key)| (*key, i))
            .collect();

        let prep = binomial_weights(n, config.eta_p);
        let loss = LossChannel::new(config.eta, 0)?;
        let mut groups = Vec::new();
        for (n_a, w_a) in prep.iter().enumerate() {
            for (n_b, w_b) in prep.iter().enumerate() {
                let weight = w_a * w_b;
                if weight == 0.0 {
                    continue;
                }
                let input = PureState::fock(&[n_a as u32, n_b as u32], cutoff)?;
                let after_bs1 = apply_beamsplitter(&input, &config.bs1)?;
                // Sort amplitudes into (lost m, pre-loss phase-mode count h)
                // buckets; the phase factor exp(i h phi) attaches to h.
                let mut buckets: BTreeMap<(u32, u32), PureState> = BTreeMap::new();
                for (label, amp) in after_bs1.amplitudes() {
                    let h = label.occupation(0);
                    let split = loss_split(
                        &PureState::from_amplitudes(2, cutoff, [(label.clone(), *amp)])?,
                        &loss,
                    )?;
                    for (m, sector) in split {
                        let bucket = buckets
                            .entry((m, h))
                            .or_insert_with(|| PureState::zero(2, cutoff));
                        for (l, a) in sector.amplitudes() {
                            bucket.accumulate(l.clone(), *a)?;
                        }
                    }
                }
                let mut per_sector: BTreeMap<u32, BTreeMap<usize, Harmonics>> = BTreeMap::new();
                for ((m, h), bucket) in buckets {
                    let after_bs2 = apply_beamsplitter(&bucket, &config.bs2)?;
                    let sector = per_sector.entry(m).or_default();
                    for (label, amp) in after_bs2.amplitudes() {
                        let key = (label.occupation(0), label.occupation(1));
                        sector.entry(index[&key]).or_default().push((h, *amp));
                    }
                }
                for (_, terms) in per_sector {
                    groups.push(CoherentGroup {
                        weight,
                        terms: terms.into_iter().collect(),
                    });
                }
            }
        }

        let smear = if config.eta_d == 1.0 {
            None
        } else {
            let mut map = Vec::new();
            for (from, &(big_m, big_k)) in outcomes.iter().enumerate() {
                let rows = binomial_weights(big_m, config.eta_d);
                let cols = binomial_weights(big_k, config.eta_d);
                for (m, wm) in rows.iter().enumerate() {
                    for (k, wk) in cols.iter().enumerate() {
                        let w = wm * wk;
                        if w != 0.0 {
                            map.push((from, index[&(m as u32, k as u32)], w));
                        }
                    }
                }
            }
            Some(map)
        };

        Ok(PipelineEvaluator {
            photon_pairs: n,
            outcomes,
            groups,
            smear,
        })
    }

    pub fn photon_pairs(&self) -> u32 {
        self.photon_pairs
    }

    /// Outcome distribution and its analytic phase derivative at `phi`.
    pub fn distribution(&self, phi: f64) -> PhotonNumberDistribution {
        let len = self.outcomes.len();
        let mut probs = vec![0.0; len];
        let mut derivs = vec![0.0; len];
        for group in &self.groups {
            for (outcome, harmonics) in &group.terms {
                let mut amp = Complex64::ZERO;
                let mut damp = Complex64::ZERO;
                for (h, coeff) in harmonics {
                    let rot = coeff * Complex64::from_polar(1.0, *h as f64 * phi);
                    amp += rot;
                    damp += rot * Complex64::new(0.0, *h as f64);
                }
                probs[*outcome] += group.weight * amp.norm_sqr();
                derivs[*outcome] += group.weight * 2.0 * (amp.conj() * damp).re;
            }
        }
        let (probs, derivs) = match &self.smear {
            None => (probs, derivs),
            Some(map) => {
                let mut sp = vec![0.0; len];
                let mut sd = vec![0.0; len];
                for (from, to, w) in map {
                    sp[*to] += w * probs[*from];
                    sd[*to] += w * derivs[*from];
                }
                (sp, sd)
            }
        };
        let prob_map: BTreeMap<(u32, u32), f64> = self
            .outcomes
            .iter()
            .zip(&probs)
            .map(|(key, p)| (*key, *p))
            .collect();
        let deriv_map: BTreeMap<(u32, u32), f64> = self
            .outcomes
            .iter()
            .zip(&derivs)
            .map(|(key, d)| (*key, *d))
            .collect();
        PhotonNumberDistribution::new(prob_map, deriv_map, phi)
            .expect("pipeline output is normalized by construction")
    }
}

/// Run the full interferometer once. For phase sweeps at fixed parameters,
/// build a [`PipelineEvaluator`] instead and query it per phase.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PhotonNumberDistribution> {
    Ok(PipelineEvaluator::from_config(config)?.distribution(config.phase))
}

/// Brute-force validation path: the loss environment and both detector
/// ancillas are explicit vacuum modes, inefficient elements are beam
/// splitters, and ancillas are traced out at the end. Slow but assumption-free
/// against which the sector-based evaluator is checked.
pub fn run_pipeline_with_ancillas(config: &PipelineConfig) -> Result<PhotonNumberDistribution> {
    let n = config.photon_pairs;
    let cutoff = 2 * n;
    let prep = binomial_weights(n, config.eta_p);
    let loss_bs = BeamSplitter::real_symmetric(config.eta, (0, 2))?;
    let det_p = BeamSplitter::real_symmetric(config.eta_d, (0, 3))?;
    let det_q = BeamSplitter::real_symmetric(config.eta_d, (1, 4))?;
    let mut probs: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut derivs: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for m in 0..=cutoff {
        for k in 0..=(cutoff - m) {
            probs.insert((m, k), 0.0);
            derivs.insert((m, k), 0.0);
        }
    }
    for (n_a, w_a) in prep.iter().enumerate() {
        for (n_b, w_b) in prep.iter().enumerate() {
            let weight = w_a * w_b;
            if weight == 0.0 {
                continue;
            }
            let input = PureState::fock(&[n_a as u32, n_b as u32, 0, 0, 0], cutoff)?;
            let after_bs1 = apply_beamsplitter(&input, &config.bs1.on_modes((0, 1)))?;
            let phased = apply_phase(&after_bs1, 0, config.phase)?;
            let dphased = phased.number_derivative(0)?;
            let mut pair = [phased, dphased];
            for bs in [&loss_bs, &config.bs2.on_modes((0, 1)), &det_p, &det_q] {
                pair = [
                    apply_beamsplitter(&pair[0], bs)?,
                    apply_beamsplitter(&pair[1], bs)?,
                ];
            }
            for (label, amp) in pair[0].amplitudes() {
                let key = (label.occupation(0), label.occupation(1));
                let damp = pair[1].amplitude(label);
                *probs.get_mut(&key).expect("keys cover m+n <= 2N") += weight * amp.norm_sqr();
                *derivs.get_mut(&key).expect("keys cover m+n <= 2N") +=
                    weight * 2.0 * (amp.conj() * damp).re;
            }
        }
    }
    PhotonNumberDistribution::new(probs, derivs, config.phase)
}

/// Closed-form outcome matrix for one or two photon pairs, evaluated at one
/// parameter point. Entries vanish outside m+n <= 2N and obey p(m,n) = p(n,m).
#[derive(Debug, Clone)]
pub struct ClosedFormMatrix {
    photon_pairs: u32,
    entries: BTreeMap<(u32, u32), f64>,
}

impl ClosedFormMatrix {
    fn from_upper(photon_pairs: u32, upper: &[((u32, u32), f64)]) -> Self {
        let mut entries = BTreeMap::new();
        for ((m, n), value) in upper {
            entries.insert((*m, *n), *value);
            entries.insert((*n, *m), *value);
        }
        ClosedFormMatrix {
            photon_pairs,
            entries,
        }
    }

    pub fn photon_pairs(&self) -> u32 {
        self.photon_pairs
    }

    pub fn entry(&self, m: u32, n: u32) -> f64 {
        self.entries.get(&(m, n)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.entries.iter().map(|(key, value)| (*key, *value))
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Largest |closed-form - simulated| over the full outcome support.
    pub fn max_abs_difference(&self, dist: &PhotonNumberDistribution) -> f64 {
        let mut worst = 0.0f64;
        for ((m, n), p, _) in dist.iter() {
            worst = worst.max((p - self.entry(m, n)).abs());
        }
        for ((m, n), value) in self.iter() {
            worst = worst.max((value - dist.probability(m, n)).abs());
        }
        worst
    }
}

/// Closed-form single-pair outcome matrix. Efficiencies enter only through
/// x = eta_p * eta_d.
pub fn closed_form_p1(phi: f64, eta_p: f64, eta: f64, eta_d: f64) -> ClosedFormMatrix {
    let x = eta_p * eta_d;
    let c2 = (2.0 * phi).cos();
    let p00 = 1.0 - (1.0 + eta) * x + (1.0 + eta * eta) / 2.0 * x * x;
    let p01 = (1.0 + eta) / 2.0 * x - (1.0 + eta * eta) / 2.0 * x * x;
    let p02 = (1.0 + eta * eta - 2.0 * eta * c2) / 8.0 * x * x;
    let p11 = (1.0 + eta * eta + 2.0 * eta * c2) / 4.0 * x * x;
    ClosedFormMatrix::from_upper(
        1,
        &[((0, 0), p00), ((0, 1), p01), ((0, 2), p02), ((1, 1), p11)],
    )
}

/// Closed-form two-pair outcome matrix, transcribed verbatim from its source
/// expressions, suspect terms included. Several entries disagree with the
/// exact pipeline (see [`p2_comparison_report`]); the transcription is kept
/// as-is so the discrepancies stay visible instead of being absorbed.
pub fn closed_form_p2(phi: f64, eta_p: f64, eta: f64, eta_d: f64) -> ClosedFormMatrix {
    let x = eta_p * eta_d;
    let (x2, x3, x4) = (x * x, x * x * x, x * x * x * x);
    let e = eta;
    let (e2, e3, e4) = (e * e, e * e * e, e * e * e * e);
    let c2 = (2.0 * phi).cos();
    let c4 = (4.0 * phi).cos();

    let p00 = 1.0 - 2.0 * (1.0 + e) * x + (5.0 + 2.0 * e + 5.0 * e2) / 2.0 * x2
        - (3.0 + e + e2 + 3.0 * e3) / 2.0 * x3
        + (3.0 + 3.0 * e2 + 2.0 * e4) / 8.0 * x4;
    let p01 = (1.0 + e) * x - (5.0 + 2.0 * e + 5.0 * e2) / 2.0 * x2
        + (3.0 + e + e2 + 3.0 * e3) / 4.0 * x3
        - (3.0 + 3.0 * e2 + 2.0 * e4) / 4.0 * x4;
    let p02 = (5.0 + (4.0 - 6.0 * c2) * e + 5.0 * e2) / 8.0 * x2
        - (9.0 + (5.0 - 6.0 * c2) * e * (1.0 + e) + 9.0 * e3) / 8.0 * x3
        - (9.0 + 10.0 * e2 + 9.0 * e4 - 6.0 * e * (1.0 + e2) * c2) / 16.0 * x4;
    let p03 = 3.0 * (1.0 + e) * (1.0 + e2 - 2.0 * e * c2) / 16.0 * x3
        - 3.0 * (1.0 + e2) * (1.0 + e2 - 2.0 * e * c2) / 16.0 * x4;
    let p04 = 3.0 / 128.0 * (1.0 + e) * (1.0 + e2 - 2.0 * e * c2).powi(2) * x4;
    let p11 = (5.0 + 6.0 * c2 * e + 5.0 * e2) / 8.0 * x2
        - (9.0 + (1.0 + 6.0 * c2) * e * (1.0 + e) + 9.0 * e3) / 8.0 * x3
        - (9.0 + 2.0 * e2 + 9.0 * e4 + 6.0 * e * (1.0 + e2) * c2) / 16.0 * x4;
    let p12 = (9.0 + e + e2 + 9.0 * e3 + 6.0 * e * (1.0 + e) * c2) / 16.0 * x3
        + (9.0 + 2.0 * e2 + 9.0 * e4 + 6.0 * e * (1.0 + e2) * c2) / 16.0 * x4;
    let p13 = 3.0 / 32.0 * (1.0 + e4 - 2.0 * e * c2) * x4;
    let p22 = 1.0 / 64.0 * (9.0 + 4.0 * e2 + 9.0 * e4 + 12.0 * (e + e3) * c2 + 18.0 * e2 * c4) * x4;

    ClosedFormMatrix::from_upper(
        2,
        &[
            ((0, 0), p00),
            ((0, 1), p01),
            ((0, 2), p02),
            ((0, 3), p03),
            ((0, 4), p04),
            ((1, 1), p11),
            ((1, 2), p12),
            ((1, 3), p13),
            ((2, 2), p22),
        ],
    )
}

/// Closed-form classical Fisher information for a single photon pair:
///
/// F = 8 x^2 eta^2 (1 + eta^2) sin^2(2 phi) / (1 + eta^4 - 2 eta^2 cos(4 phi)),
///
/// with x = eta_p * eta_d, maximized at phi = pi/4 where it equals
/// 8 x^2 eta^2 / (1 + eta^2). The denominator is evaluated in the identical
/// form (1-eta^2)^2 + 4 eta^2 sin^2(2 phi), which is exact at the degenerate
/// phases where both numerator and denominator vanish; there the pointwise
/// Fisher information is 0 and that is what this returns.
pub fn closed_form_f1(phi: f64, eta_p: f64, eta: f64, eta_d: f64) -> f64 {
    let x = eta_p * eta_d;
    let s2 = (2.0 * phi).sin().powi(2);
    let denom = (1.0 - eta * eta).powi(2) + 4.0 * eta * eta * s2;
    if denom == 0.0 {
        return 0.0;
    }
    8.0 * x * x * eta * eta * (1.0 + eta * eta) * s2 / denom
}

/// Lossless outcome distribution over the count n at the first detector,
/// p_n = n! [P_N^(N-n)(cos phi)]^2 / (2N-n)! for 0 <= n <= N, mirrored by
/// n -> 2N-n above. Returns the 2N+1 probabilities in order.
pub fn lossless_distribution(n: u32, phi: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Invalid("lossless distribution needs N >= 1".into()));
    }
    let c = phi.cos();
    let mut probs = vec![0.0; 2 * n as usize + 1];
    for k in 0..=n {
        let p = factorial(k) * crate::legendre::assoc_legendre(n, n - k, c)?.powi(2)
            / factorial(2 * n - k);
        probs[k as usize] = p;
        probs[(2 * n - k) as usize] = p;
    }
    Ok(probs)
}

/// Parity of the photon-number deviation from N in one output mode of the
/// lossless interferometer: sum_n (-1)^(n-N) p_n = P_N(cos 2 phi).
pub fn parity_expectation(n: u32, phi: f64) -> f64 {
    legendre_unchecked(n, (2.0 * phi).cos())
}

/// Fisher information of the binary measurement that keeps only the
/// N-photons-each outcome, p_N = [P_N(cos phi)]^2:
///
/// F = (p')^2 / (p (1 - p)) = 4 [P_N'(cos phi)]^2 sin^2(phi) / (1 - p),
///
/// where the second form cancels the shared P_N factor and stays finite at
/// the zeros of P_N. Degenerate at phi = 0 mod pi where p -> 1.
pub fn single_outcome_fi(n: u32, phi: f64) -> Result<f64> {
    let c = phi.cos();
    let p = legendre_unchecked(n, c).powi(2);
    if 1.0 - p < 1e-12 {
        return Err(Error::DegeneratePhase(phi));
    }
    let dp = legendre_derivative(n, c)?;
    Ok(4.0 * dp * dp * phi.sin().powi(2) / (1.0 - p))
}

/// Worst absolute deviation of one closed-form entry from the pipeline,
/// with the parameter point where it was reached.
#[derive(Debug, Clone)]
pub struct P2Discrepancy {
    pub outcome: (u32, u32),
    pub max_abs_error: f64,
    pub at: (f64, f64, f64, f64),
}

/// Comparison of the transcribed two-pair closed forms against the exact
/// pipeline over a fixed parameter grid.
#[derive(Debug, Clone)]
pub struct P2Report {
    pub samples: usize,
    pub entries: Vec<P2Discrepancy>,
    pub overall_max: f64,
}

impl P2Report {
    /// Entries exceeding `tol`, largest first.
    pub fn offenders(&self, tol: f64) -> Vec<&P2Discrepancy> {
        let mut out: Vec<&P2Discrepancy> = self
            .entries
            .iter()
            .filter(|d| d.max_abs_error > tol)
            .collect();
        out.sort_by(|a, b| b.max_abs_error.total_cmp(&a.max_abs_error));
        out
    }
}

impl fmt::Display for P2Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "two-pair closed forms vs pipeline over {} parameter points (max abs error {:.3e})",
            self.samples, self.overall_max
        )?;
        for d in &self.entries {
            writeln!(
                f,
                "  p({},{})  max abs error {:.3e}  at phi={:.2}, eta_p={:.2}, eta={:.2}, eta_d={:.2}",
                d.outcome.0, d.outcome.1, d.max_abs_error, d.at.0, d.at.1, d.at.2, d.at.3
            )?;
        }
        Ok(())
    }
}

/// Compare [`closed_form_p2`] against the exact two-pair pipeline on a fixed
/// deterministic grid. The pipeline (itself validated through the single-pair
/// closed forms, normalization, and the explicit-ancilla path) is the ground
/// truth; disagreement documents defects in the transcribed expressions.
pub fn p2_comparison_report() -> Result<P2Report> {
    let phis = [0.2, 0.5, 0.9, 1.3];
    let eta_ps = [0.55, 0.8, 1.0];
    let etas = [0.3, 0.7, 1.0];
    let eta_ds = [0.6, 0.9, 1.0];
    type WorstEntry = (f64, (f64, f64, f64, f64));
    let mut worst: BTreeMap<(u32, u32), WorstEntry> = BTreeMap::new();
    let mut samples = 0;
    for &eta_p in &eta_ps {
        for &eta in &etas {
            for &eta_d in &eta_ds {
                let evaluator = PipelineEvaluator::new(2, eta_p, eta, eta_d)?;
                for &phi in &phis {
                    samples += 1;
                    let dist = evaluator.distribution(phi);
                    let closed = closed_form_p2(phi, eta_p, eta, eta_d);
                    for ((m, n), p, _) in dist.iter() {
                        let err = (p - closed.entry(m, n)).abs();
                        let slot = worst
                            .entry((m, n))
                            .or_insert((0.0, (phi, eta_p, eta, eta_d)));
                        if err > slot.0 {
                            *slot = (err, (phi, eta_p, eta, eta_d));
                        }
                    }
                }
            }
        }
    }
    let entries: Vec<P2Discrepancy> = worst
        .into_iter()
        .map(|(outcome, (max_abs_error, at))| P2Discrepancy {
            outcome,
            max_abs_error,
            at,
        })
        .collect();
    let overall_max = entries.iter().map(|d| d.max_abs_error).fold(0.0, f64::max);
    Ok(P2Report {
        samples,
        entries,
        overall_max,
    })
}

/// Smearing-equivalence helper used in validation: the default pipeline with
/// binomial detector smearing applied afterwards to an ideal-detector run.
pub fn run_pipeline_smeared_after(config: &PipelineConfig) -> Result<PhotonNumberDistribution> {
    let ideal = PipelineConfig {
        eta_d: 1.0,
        ..config.clone()
    };
    let dist = run_pipeline(&ideal)?;
    detector_smearing(&dist, config.eta_d)
}
