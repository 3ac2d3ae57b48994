//! Acceptance suite: one test per release criterion, each pinned to its
//! stated tolerance. Run with `cargo test -p fisherlab --test acceptance`
//! (add `-- --nocapture` to see the per-criterion PASS lines).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use fisherlab::bench::{
    advantage_ratio, feasibility_grid, hb_lossy_qfi, linspace, noon_lossy_qfi, optimal_probe_qfi,
    threshold_search, ThresholdAxis,
};
use fisherlab::optim::bisect_smallest_true;
use fisherlab::pipeline::p2_comparison_report;
use fisherlab::{
    apply_loss_blocks_with_derivative, cfi, closed_form_f1, closed_form_p1,
    finite_difference_check, hb_state, qfi_block, qfi_general, qfi_pure, run_pipeline,
    single_outcome_fi, LossChannel, PipelineConfig, PipelineEvaluator,
};

fn hb_with_derivative(n: u32, phi: f64) -> (fisherlab::PureState, fisherlab::PureState) {
    let s = hb_state(n, phi).unwrap();
    let d = s.number_derivative(0).unwrap();
    (s, d)
}

fn lossy_blocks(
    n: u32,
    phi: f64,
    eta: f64,
) -> (fisherlab::BlockDiagonalState, Vec<fisherlab::PureState>) {
    let (s, d) = hb_with_derivative(n, phi);
    apply_loss_blocks_with_derivative(&s, &d, &LossChannel::new(eta, 0).unwrap()).unwrap()
}

fn max_cfi(n: u32, eta_p: f64, eta: f64, eta_d: f64) -> f64 {
    let evaluator = PipelineEvaluator::new(n, eta_p, eta, eta_d).unwrap();
    fisherlab::bench::max_cfi_over_phase(&evaluator, 100).1
}

#[test]
fn criterion_01_lossless_hb_qfi() {
    for n in 1..=8u32 {
        let (s, d) = hb_with_derivative(n, 0.3);
        let j = qfi_pure(&s, &d).unwrap();
        let expect = 2.0 * n as f64 * (n as f64 + 1.0);
        assert!(
            (j - expect).abs() <= 1e-10 * expect,
            "N={n}: {j} vs {expect}"
        );
    }
    println!("PASS  criterion 01: lossless twin-Fock QFI equals 2N(N+1) for N=1..8 (rel 1e-10)");
}

#[test]
fn criterion_02_lossy_single_pair_qfi() {
    for step in 0..=20 {
        let eta = step as f64 * 0.05;
        let (blocks, derivs) = lossy_blocks(1, 0.8, eta);
        let j = qfi_block(&blocks, &derivs).unwrap();
        let expect = 8.0 * eta * eta / (1.0 + eta * eta);
        assert!((j - expect).abs() <= 1e-10, "eta={eta}: {j} vs {expect}");
    }
    println!("PASS  criterion 02: lossy single-pair QFI equals 8 eta^2/(1+eta^2) on the eta grid (1e-10)");
}

#[test]
fn criterion_03_block_vs_general_qfi() {
    for n in 1..=4u32 {
        for step in 0..=10 {
            let eta = step as f64 / 10.0;
            let (blocks, derivs) = lossy_blocks(n, 0.45, eta);
            let jb = qfi_block(&blocks, &derivs).unwrap();
            let (rho, drho) = blocks.flatten_with_derivative(&derivs).unwrap();
            let jg = qfi_general(&rho, &drho).unwrap();
            assert!(
                (jb - jg).abs() <= 1e-9,
                "N={n}, eta={eta}: block {jb} vs general {jg}"
            );
        }
    }
    println!(
        "PASS  criterion 03: block-decomposition QFI matches eigendecomposition QFI (N<=4, 1e-9)"
    );
}

#[test]
fn criterion_04_pnrd_saturation() {
    for n in 1..=6u32 {
        let f = max_cfi(n, 1.0, 1.0, 1.0);
        let expect = 2.0 * n as f64 * (n as f64 + 1.0);
        assert!((f - expect).abs() <= 1e-8, "N={n}: {f} vs {expect}");
    }
    println!(
        "PASS  criterion 04: photon counting saturates the quantum bound 2N(N+1) (N<=6, 1e-8)"
    );
}

#[test]
fn criterion_05_single_outcome_limit() {
    for n in 1..=10u32 {
        let f = single_outcome_fi(n, 1e-3).unwrap();
        let expect = 2.0 * n as f64 * (n as f64 + 1.0);
        assert!(
            (f - expect).abs() <= 1e-3 * expect,
            "N={n}: {f} vs {expect}"
        );
    }
    println!(
        "PASS  criterion 05: single-outcome Fisher information reaches 2N(N+1) at phi->0 (0.1%)"
    );
}

#[test]
fn criterion_06_p1_exactness() {
    let mut rng = StdRng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (phi, eta_p, eta, eta_d) = (
            rng.random_range(0.0..PI),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
        );
        let dist = run_pipeline(&PipelineConfig::new(1, phi, eta_p, eta, eta_d).unwrap()).unwrap();
        let closed = closed_form_p1(phi, eta_p, eta, eta_d);
        worst = worst.max(closed.max_abs_difference(&dist));
    }
    assert!(worst <= 1e-12, "worst single-pair entry error {worst:.3e}");
    println!(
        "PASS  criterion 06: single-pair closed forms match the pipeline entrywise \
         over 1000 draws (max {worst:.2e} <= 1e-12)"
    );
}

#[test]
fn criterion_07_f1_exactness() {
    let mut rng = StdRng::seed_from_u64(103);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let (phi, eta_p, eta, eta_d) = (
            rng.random_range(0.02..FRAC_PI_2 - 0.02),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
        );
        let dist = run_pipeline(&PipelineConfig::new(1, phi, eta_p, eta, eta_d).unwrap()).unwrap();
        let f = cfi(&dist).unwrap();
        let closed = closed_form_f1(phi, eta_p, eta, eta_d);
        worst = worst.max((f - closed).abs());
    }
    assert!(worst <= 1e-9, "worst F1 error {worst:.3e}");

    // The maximum sits at phi = pi/4 with value 8 (eta_p eta_d eta)^2... / (1+eta^2).
    for &(eta_p, eta, eta_d) in &[(1.0, 1.0, 1.0), (0.9, 0.6, 0.8), (0.7, 0.3, 0.95)] {
        let at_peak = closed_form_f1(FRAC_PI_4, eta_p, eta, eta_d);
        let expect = 8.0 * (eta_p * eta_d).powi(2) * eta * eta / (1.0 + eta * eta);
        assert!((at_peak - expect).abs() <= 1e-12);
        let dist =
            run_pipeline(&PipelineConfig::new(1, FRAC_PI_4, eta_p, eta, eta_d).unwrap()).unwrap();
        assert!((cfi(&dist).unwrap() - expect).abs() <= 1e-9);
    }
    println!(
        "PASS  criterion 07: single-pair Fisher closed form matches the pipeline \
         (max {worst:.2e} <= 1e-9) and peaks at pi/4"
    );
}

#[test]
fn criterion_08_preparation_formulas() {
    // Stationary phases are evaluated at the documented 1e-4 offset; the
    // pointwise Fisher information collapses exactly on them.
    for n in 1..=3u32 {
        for &eta_p in &[0.6, 0.8, 0.95] {
            let nf = n as f64;
            let near_zero =
                run_pipeline(&PipelineConfig::new(n, 1e-4, eta_p, 1.0, 1.0).unwrap()).unwrap();
            let f_max = cfi(&near_zero).unwrap();
            let expect_max = 2.0 * nf * (nf + 1.0) * eta_p.powi(n as i32 + 1);
            assert!(
                (f_max - expect_max).abs() <= 1e-3 * expect_max,
                "N={n}, eta_p={eta_p}: {f_max} vs {expect_max}"
            );

            let near_half_pi =
                run_pipeline(&PipelineConfig::new(n, FRAC_PI_2 - 1e-4, eta_p, 1.0, 1.0).unwrap())
                    .unwrap();
            let f_min = cfi(&near_half_pi).unwrap();
            let expect_min = 2.0 * nf * (nf + 1.0) * eta_p.powi(2 * n as i32);
            assert!(
                (f_min - expect_min).abs() <= 1e-3 * expect_min,
                "N={n}, eta_p={eta_p}: {f_min} vs {expect_min}"
            );
        }
    }
    println!(
        "PASS  criterion 08: preparation-only Fisher information hits \
         2N(N+1) eta_p^(N+1) at phi->0 and 2N(N+1) eta_p^(2N) at phi->pi/2 (0.1%)"
    );
}

#[test]
fn criterion_09_symmetric_imperfection_law() {
    for n in 1..=3u32 {
        let nf = n as f64;
        for &(eta_p, eta_d) in &[(0.9, 0.7), (0.75, 0.85), (1.0, 0.8)] {
            let dist =
                run_pipeline(&PipelineConfig::new(n, 1e-4, eta_p, 1.0, eta_d).unwrap()).unwrap();
            let f = cfi(&dist).unwrap();
            let expect = 2.0 * nf * (nf + 1.0) * (eta_p * eta_d).powi(n as i32 + 1);
            assert!(
                (f - expect).abs() <= 1e-3 * expect,
                "N={n}: {f} vs {expect}"
            );

            // Product invariance at eta = 1: only eta_p * eta_d matters.
            for &phi in &[0.3, 0.8, 1.2] {
                let a = cfi(&run_pipeline(
                    &PipelineConfig::new(n, phi, eta_p, 1.0, eta_d).unwrap(),
                )
                .unwrap())
                .unwrap();
                let b = cfi(&run_pipeline(
                    &PipelineConfig::new(n, phi, eta_p * eta_d, 1.0, 1.0).unwrap(),
                )
                .unwrap())
                .unwrap();
                assert!((a - b).abs() <= 1e-9, "N={n}, phi={phi}: {a} vs {b}");
            }
        }
    }
    println!(
        "PASS  criterion 09: lossless Fisher information equals 2N(N+1)(eta_p eta_d)^(N+1) \
         and depends on eta_p, eta_d only through their product"
    );
}

#[test]
fn criterion_10_two_pair_thresholds() {
    let cases = [
        (ThresholdAxis::EtaP, 0.687),
        (ThresholdAxis::Eta, 0.135),
        (ThresholdAxis::EtaD, 0.547),
    ];
    for (axis, expect) in cases {
        let found = threshold_search(2, axis, 1.0, 1.0, 1.0).unwrap();
        assert!(
            (found - expect).abs() <= 0.002,
            "{}: {found} vs {expect}",
            axis.name()
        );
    }
    println!("PASS  criterion 10: two-pair advantage thresholds 0.687 / 0.135 / 0.547 (+/- 0.002)");
}

#[test]
fn criterion_11_experimental_scenarios() {
    let apd = threshold_search(2, ThresholdAxis::EtaP, 1.0, 0.95, 0.60).unwrap();
    let tes = threshold_search(2, ThresholdAxis::EtaP, 1.0, 0.95, 0.98).unwrap();
    println!(
        "criterion 11 measured: minimal eta_p = {apd:.4} at (eta=0.95, eta_d=0.60), \
         {tes:.4} at (eta=0.95, eta_d=0.98); reference values 0.91 and 0.71"
    );
    assert!(
        (tes - 0.71).abs() <= 0.01,
        "high-efficiency-detector scenario: {tes} vs 0.71 +/- 0.01"
    );
    // Known-red check: the reference value 0.91 for the 60%-detector scenario
    // is not reproduced by the exact simulation, which places the minimal
    // preparation efficiency at 0.9507. The same machinery reproduces the
    // single-axis thresholds 0.687 / 0.135 / 0.547 to +/- 0.002 and the other
    // scenario to +/- 0.01, and the pipeline is validated entrywise at 1e-12
    // against closed forms and an explicit-ancilla simulation, so the
    // reference value itself appears to be in error. The assertion is kept
    // faithful to the reference rather than adjusted to the measurement.
    assert!(
        (apd - 0.91).abs() <= 0.01,
        "60%-detector scenario: exact minimal eta_p = {apd:.4}, reference 0.91 +/- 0.01; \
         the exact value is the trustworthy one (see docs/decision notes)"
    );
    println!(
        "PASS  criterion 11: minimal preparation efficiency {apd:.3} at 60% detection \
         and {tes:.3} at 98% detection (+/- 0.01)"
    );
}

#[test]
fn criterion_12_hb10_sql_crossing() {
    // The exact ten-pair QFI crosses the sloped line 20 eta already at
    // eta = 0.023 and stays above it from there on, so the advertised
    // crossing near 0.45 can only be against the constant 20-photon
    // shot-noise level 2k = 20. Pin both facts.
    let sloped = bisect_smallest_true(
        |eta| hb_lossy_qfi(10, eta).unwrap() >= 20.0 * eta,
        1e-3,
        1.0,
        1e-5,
    )
    .unwrap();
    assert!(sloped < 0.05, "sloped-line crossing moved: {sloped}");
    for step in 3..=50 {
        let eta = step as f64 / 50.0;
        assert!(hb_lossy_qfi(10, eta).unwrap() >= 20.0 * eta, "eta={eta}");
    }
    let crossing = bisect_smallest_true(
        |eta| hb_lossy_qfi(10, eta).unwrap() >= 20.0,
        0.05,
        1.0,
        1e-5,
    )
    .unwrap();
    assert!(
        (crossing - 0.45).abs() <= 0.02,
        "crossing at {crossing} vs 0.45"
    );
    println!(
        "PASS  criterion 12: ten-pair QFI crosses the 20-photon shot-noise level \
         at eta = {crossing:.3} (0.45 +/- 0.02); the sloped 20*eta line is crossed \
         far earlier, at eta = {sloped:.3}"
    );
}

#[test]
fn criterion_13_single_pair_detector_wall() {
    let grid = feasibility_grid(1, 11).unwrap();
    for i in 0..grid.eta_p_axis.len() {
        for j in 0..grid.eta_axis.len() {
            for l in 0..grid.eta_d_axis.len() {
                if grid.eta_d_axis[l] < 0.5 {
                    assert!(
                        !grid.feasible_at(i, j, l),
                        "feasible below the detector wall at ({i},{j},{l})"
                    );
                }
            }
        }
    }
    assert!(grid.any_feasible());
    println!("PASS  criterion 13: no single-pair advantage below 50% detector efficiency");
}

#[test]
fn criterion_14_property_suite() {
    let mut rng = StdRng::seed_from_u64(107);

    // Normalization and derivative-sum over random configurations.
    for _ in 0..60 {
        let n = rng.random_range(1..=4);
        let config = PipelineConfig::new(
            n,
            rng.random_range(0.0..PI),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
        )
        .unwrap();
        let dist = run_pipeline(&config).unwrap();
        assert!((dist.total_probability() - 1.0).abs() <= 1e-10);
        assert!(dist.derivative_sum().abs() <= 1e-10);
    }

    // Analytic derivatives against central differences at h = 1e-4.
    for n in 1..=4u32 {
        let (eta_p, eta, eta_d) = (0.85, 0.6, 0.9);
        let evaluator = PipelineEvaluator::new(n, eta_p, eta, eta_d).unwrap();
        let report =
            finite_difference_check(|phi| Ok(evaluator.distribution(phi)), 0.7, 1e-4).unwrap();
        assert!(
            report.max_abs_error <= 1e-6,
            "N={n}: fd error {:.3e}",
            report.max_abs_error
        );
    }

    // Information inequality on lossy, ideal-detector configs.
    for n in 1..=3u32 {
        for &eta in &[0.25, 0.5, 0.75, 1.0] {
            let f = max_cfi(n, 1.0, eta, 1.0);
            let (blocks, derivs) = lossy_blocks(n, 0.4, eta);
            let j = qfi_block(&blocks, &derivs).unwrap();
            assert!(f <= j + 1e-9, "N={n}, eta={eta}: CFI {f} > QFI {j}");
        }
    }

    // QFI monotone non-increasing as loss grows.
    for n in 1..=6u32 {
        let mut prev = f64::NEG_INFINITY;
        for step in 0..=20 {
            let eta = step as f64 / 20.0;
            let j = hb_lossy_qfi(n, eta).unwrap();
            assert!(j + 1e-10 >= prev, "N={n}, eta={eta}");
            prev = j;
        }
    }
    println!(
        "PASS  criterion 14: normalization, derivative sums, finite differences, \
         information inequality, and loss monotonicity all hold"
    );
}

#[test]
fn criterion_15_p2_report_and_region_shapes() {
    // Two-pair pipeline normalization over a parameter grid.
    for &eta_p in &[0.5, 0.8, 1.0] {
        for &eta in &[0.2, 0.7, 1.0] {
            for &eta_d in &[0.6, 0.9, 1.0] {
                let evaluator = PipelineEvaluator::new(2, eta_p, eta, eta_d).unwrap();
                for &phi in &[0.1, 0.6, 1.2] {
                    let dist = evaluator.distribution(phi);
                    assert!((dist.total_probability() - 1.0).abs() <= 1e-10);
                }
            }
        }
    }

    // The discrepancy report generates, is stable, and stays a report: the
    // transcribed two-pair forms are knowingly not in agreement.
    let report = p2_comparison_report().unwrap();
    let again = p2_comparison_report().unwrap();
    assert_eq!(report.samples, again.samples);
    assert_eq!(format!("{report}"), format!("{again}"));
    assert!(!report.entries.is_empty());

    // Region shape with growing photon number: on the matched diagonal
    // eta_p = eta_d the region shrinks, while along the loss axis it extends.
    let xs = linspace(0.0, 1.0, 11);
    for &x in &xs {
        let one = advantage_ratio(1, x, 1.0, x).unwrap();
        let three = advantage_ratio(3, x, 1.0, x).unwrap();
        if three.is_feasible() {
            assert!(
                one.is_feasible(),
                "diagonal x={x}: k=3 feasible but k=1 not"
            );
        }
    }
    for &eta in &xs {
        let one = advantage_ratio(1, 1.0, eta, 1.0).unwrap();
        let three = advantage_ratio(3, 1.0, eta, 1.0).unwrap();
        if one.is_feasible() {
            assert!(
                three.is_feasible(),
                "loss axis eta={eta}: k=1 feasible but k=3 not"
            );
        }
    }
    println!(
        "PASS  criterion 15: two-pair report generated and stable (max deviation {:.2e}); \
         feasibility shrinks along the imperfection diagonal and extends along loss",
        report.overall_max
    );
}

#[test]
fn criterion_16_optimizer_sanity() {
    for m in [4u32, 6] {
        let opt = optimal_probe_qfi(m, 1.0).unwrap();
        let expect = (m as f64).powi(2);
        assert!(
            (opt.qfi - expect).abs() <= 1e-6,
            "M={m}: {} vs {expect}",
            opt.qfi
        );
        let edge = opt.coefficients[0].powi(2) + opt.coefficients[m as usize].powi(2);
        assert!(edge >= 1.0 - 1e-5, "M={m}: edge mass {edge}");

        for &eta in &[0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
            let opt = optimal_probe_qfi(m, eta).unwrap();
            let hb = hb_lossy_qfi(m / 2, eta).unwrap();
            let noon = noon_lossy_qfi(m, eta).unwrap();
            assert!(
                opt.qfi >= hb.max(noon) - 1e-8,
                "M={m}, eta={eta}: optimal {} below max({hb}, {noon})",
                opt.qfi
            );
            assert!(opt.complex_perturbation_gain <= 1e-8);
        }
    }
    println!(
        "PASS  criterion 16: optimizer recovers M^2 at eta=1 with extreme-ket probes \
         and dominates the twin-Fock and N00N baselines"
    );
}
