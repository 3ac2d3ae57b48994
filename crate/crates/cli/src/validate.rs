//! Validate subcommand: every closed form cross-checked against the
//! simulation pipeline, plus the dual-route and derivative checks. Prints one
//! line per check; exits nonzero when a mandatory check fails.

use clap::Args;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use fisherlab::bench::hb_lossy_qfi;
use fisherlab::fisher::qfi_general_with_cutoff;
use fisherlab::pipeline::{p2_comparison_report, run_pipeline_with_ancillas};
use fisherlab::{
    apply_loss_blocks_with_derivative, cfi, closed_form_f1, closed_form_p1,
    finite_difference_check, hb_state, lossless_distribution, parity_expectation, qfi_block,
    qfi_general, run_pipeline, single_outcome_fi, LossChannel, PipelineConfig, PipelineEvaluator,
};

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Promote the two-pair closed-form comparison to a hard check. The
    /// transcribed expressions are knowingly defective, so this is expected
    /// to fail and list the offending entries.
    #[arg(long)]
    pub strict_p2: bool,

    /// Random parameter draws per stochastic check.
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,

    /// Seed for the random draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome {
        name,
        passed,
        detail,
    }
}

pub fn run(args: &ValidateArgs) -> Result<bool, String> {
    let mut results: Vec<Outcome> = Vec::new();
    let mut rng = StdRng::seed_from_u64(args.seed);
    let run_err = |e: fisherlab::Error| e.to_string();

    // Single-pair closed-form matrix against the pipeline.
    {
        let mut worst = 0.0f64;
        for _ in 0..args.draws {
            let (phi, p, e, d) = random_params(&mut rng);
            let dist = run_pipeline(&PipelineConfig::new(1, phi, p, e, d).map_err(run_err)?)
                .map_err(run_err)?;
            worst = worst.max(closed_form_p1(phi, p, e, d).max_abs_difference(&dist));
        }
        results.push(check(
            "single-pair closed forms vs pipeline",
            worst <= 1e-12,
            format!(
                "max abs error {worst:.3e} over {} draws (tol 1e-12)",
                args.draws
            ),
        ));
    }

    // Single-pair Fisher information closed form.
    {
        let mut worst = 0.0f64;
        for _ in 0..args.draws {
            let (phi, p, e, d) = random_params(&mut rng);
            let phi = 0.05 + phi.rem_euclid(std::f64::consts::FRAC_PI_2 - 0.1);
            let dist = run_pipeline(&PipelineConfig::new(1, phi, p, e, d).map_err(run_err)?)
                .map_err(run_err)?;
            let f = cfi(&dist).unwrap_or(f64::NAN);
            worst = worst.max((f - closed_form_f1(phi, p, e, d)).abs());
        }
        results.push(check(
            "single-pair Fisher information closed form",
            worst <= 1e-9,
            format!(
                "max abs error {worst:.3e} over {} draws (tol 1e-9)",
                args.draws
            ),
        ));
    }

    // Lossless counting distribution from associated Legendre polynomials.
    {
        let mut worst = 0.0f64;
        for n in 1..=6u32 {
            for &phi in &[0.2, 0.7, 1.2, 1.5] {
                let probs = lossless_distribution(n, phi).map_err(run_err)?;
                let dist = run_pipeline(&PipelineConfig::perfect(n, phi)).map_err(run_err)?;
                for k in 0..=(2 * n) {
                    worst = worst.max((probs[k as usize] - dist.probability(k, 2 * n - k)).abs());
                }
            }
        }
        results.push(check(
            "lossless Legendre distribution vs pipeline",
            worst <= 1e-12,
            format!("max abs error {worst:.3e} (tol 1e-12)"),
        ));
    }

    // Parity expectation against the signed outcome sum.
    {
        let mut worst = 0.0f64;
        for n in 1..=6u32 {
            for &phi in &[0.0, 0.4, 0.9, 1.4] {
                let probs = lossless_distribution(n, phi).map_err(run_err)?;
                let signed: f64 = probs
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        if (k as i64 - n as i64).rem_euclid(2) == 0 {
                            *p
                        } else {
                            -p
                        }
                    })
                    .sum();
                worst = worst.max((signed - parity_expectation(n, phi)).abs());
            }
        }
        results.push(check(
            "parity expectation vs signed counting sum",
            worst <= 1e-12,
            format!("max abs error {worst:.3e} (tol 1e-12)"),
        ));
    }

    // Block-decomposition QFI against the eigendecomposition route, with the
    // eigenvalue-cutoff sensitivity of the latter.
    {
        let mut worst = 0.0f64;
        let mut spread = 0.0f64;
        for n in 1..=4u32 {
            for step in 0..=5 {
                let eta = step as f64 / 5.0;
                let state = hb_state(n, 0.6).map_err(run_err)?;
                let deriv = state.number_derivative(0).map_err(run_err)?;
                let (blocks, derivs) = apply_loss_blocks_with_derivative(
                    &state,
                    &deriv,
                    &LossChannel::new(eta, 0).map_err(run_err)?,
                )
                .map_err(run_err)?;
                let jb = qfi_block(&blocks, &derivs).map_err(run_err)?;
                let (rho, drho) = blocks.flatten_with_derivative(&derivs).map_err(run_err)?;
                let jg = qfi_general(&rho, &drho).map_err(run_err)?;
                worst = worst.max((jb - jg).abs());
                let lo = qfi_general_with_cutoff(&rho, &drho, 1e-12).map_err(run_err)?;
                let hi = qfi_general_with_cutoff(&rho, &drho, 1e-8).map_err(run_err)?;
                spread = spread.max((lo - jg).abs().max((hi - jg).abs()));
            }
        }
        results.push(check(
            "block QFI vs eigendecomposition QFI",
            worst <= 1e-9,
            format!(
                "max abs error {worst:.3e} (tol 1e-9); cutoff sensitivity 1e-12..1e-8: {spread:.3e}"
            ),
        ));
    }

    // Analytic derivatives against central differences.
    {
        let mut worst = 0.0f64;
        for n in 1..=4u32 {
            let evaluator = PipelineEvaluator::new(n, 0.85, 0.6, 0.9).map_err(run_err)?;
            let report = finite_difference_check(|p| Ok(evaluator.distribution(p)), 0.8, 1e-4)
                .map_err(run_err)?;
            worst = worst.max(report.max_abs_error);
        }
        results.push(check(
            "analytic derivatives vs central differences",
            worst <= 1e-6,
            format!("max abs error {worst:.3e} at h=1e-4 (tol 1e-6)"),
        ));
    }

    // Normalization and derivative sums over random configurations.
    {
        let mut worst = 0.0f64;
        for _ in 0..(args.draws / 10).max(20) {
            let (phi, p, e, d) = random_params(&mut rng);
            let n = rng.random_range(1..=4);
            let dist = run_pipeline(&PipelineConfig::new(n, phi, p, e, d).map_err(run_err)?)
                .map_err(run_err)?;
            worst = worst
                .max((dist.total_probability() - 1.0).abs())
                .max(dist.derivative_sum().abs());
        }
        results.push(check(
            "normalization and derivative sums",
            worst <= 1e-10,
            format!("max deviation {worst:.3e} (tol 1e-10)"),
        ));
    }

    // Sector-based evaluator against the explicit-ancilla simulation.
    {
        let mut worst = 0.0f64;
        for n in 1..=3u32 {
            for _ in 0..(args.draws / 100).max(3) {
                let (phi, p, e, d) = random_params(&mut rng);
                let config = PipelineConfig::new(n, phi, p, e, d).map_err(run_err)?;
                let fast = run_pipeline(&config).map_err(run_err)?;
                let oracle = run_pipeline_with_ancillas(&config).map_err(run_err)?;
                for ((m, k), prob, _) in fast.iter() {
                    worst = worst.max((prob - oracle.probability(m, k)).abs());
                }
            }
        }
        results.push(check(
            "sector evaluator vs explicit-ancilla simulation",
            worst <= 1e-12,
            format!("max abs error {worst:.3e} (tol 1e-12)"),
        ));
    }

    // Single-outcome Fisher information small-angle limit.
    {
        let mut worst_rel = 0.0f64;
        for n in 1..=10u32 {
            let f = single_outcome_fi(n, 1e-3).map_err(run_err)?;
            let expect = 2.0 * n as f64 * (n as f64 + 1.0);
            worst_rel = worst_rel.max((f - expect).abs() / expect);
        }
        results.push(check(
            "single-outcome information small-angle limit",
            worst_rel <= 1e-3,
            format!("max relative error {worst_rel:.3e} (tol 1e-3)"),
        ));
    }

    // Loss monotonicity of the twin-Fock QFI.
    {
        let mut ok = true;
        for n in 1..=6u32 {
            let mut prev = f64::NEG_INFINITY;
            for step in 0..=20 {
                let j = hb_lossy_qfi(n, step as f64 / 20.0).map_err(run_err)?;
                ok &= j + 1e-10 >= prev;
                prev = j;
            }
        }
        results.push(check(
            "QFI monotone in transmissivity",
            ok,
            "checked N <= 6 on a 21-point grid".to_string(),
        ));
    }

    // Two-pair closed-form report: informational unless --strict-p2.
    let report = p2_comparison_report().map_err(run_err)?;
    if args.strict_p2 {
        let offenders = report.offenders(1e-9);
        results.push(check(
            "two-pair closed forms vs pipeline (strict)",
            offenders.is_empty(),
            format!(
                "{} entries exceed 1e-9; worst {:.3e}",
                offenders.len(),
                report.overall_max
            ),
        ));
    }

    let mut all_ok = true;
    for outcome in &results {
        let status = if outcome.passed { "ok  " } else { "FAIL" };
        println!("{status}  {} — {}", outcome.name, outcome.detail);
        all_ok &= outcome.passed;
    }
    println!("----");
    println!("{report}");
    if args.strict_p2 && report.overall_max > 1e-9 {
        println!("strict mode: the entries above are the defective transcriptions.");
    }
    Ok(all_ok)
}

fn random_params(rng: &mut StdRng) -> (f64, f64, f64, f64) {
    (
        rng.random_range(0.0..std::f64::consts::PI),
        rng.random_range(0.0..=1.0),
        rng.random_range(0.0..=1.0),
        rng.random_range(0.0..=1.0),
    )
}
