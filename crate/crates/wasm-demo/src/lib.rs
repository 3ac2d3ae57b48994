//! Browser bindings for the interactive demo page: flat Float64Array-friendly
//! curves for phase response, loss benchmarks, and feasibility slices.
//!
//! Build for the web with:
//!   cargo build -p fisherlab-wasm --target wasm32-unknown-unknown --release
//!   wasm-bindgen --target web --out-dir crates/wasm-demo/www/pkg \
//!       target/wasm32-unknown-unknown/release/fisherlab_wasm.wasm

use wasm_bindgen::prelude::*;

use fisherlab::bench::{hb_lossy_qfi, linspace, noon_lossy_qfi, optimal_probe_qfi_with, sql};
use fisherlab::{cfi, PipelineEvaluator};

fn err(e: fisherlab::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Classical Fisher information of the counting measurement versus phase,
/// interleaved as [phi0, F0, phi1, F1, ...] over (0, pi/2). Degenerate points
/// report NaN and plot as gaps.
#[wasm_bindgen]
pub fn phase_response(
    pairs: u32,
    eta_p: f64,
    eta: f64,
    eta_d: f64,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    let evaluator = PipelineEvaluator::new(pairs, eta_p, eta, eta_d).map_err(err)?;
    let phis = linspace(
        0.01,
        std::f64::consts::FRAC_PI_2 - 0.01,
        points.clamp(2, 600),
    );
    let mut out = Vec::with_capacity(2 * phis.len());
    for phi in phis {
        let f = cfi(&evaluator.distribution(phi)).unwrap_or(f64::NAN);
        out.push(phi);
        out.push(f);
    }
    Ok(out)
}

/// Quantum Fisher information of the lossy twin-Fock probe, the ceiling for
/// the phase-response curve.
#[wasm_bindgen]
pub fn qfi_ceiling(pairs: u32, eta: f64) -> Result<f64, JsValue> {
    hb_lossy_qfi(pairs, eta).map_err(err)
}

/// Benchmark curves versus transmissivity for 2*pairs total photons,
/// interleaved as [eta, sql, twin-Fock QFI, N00N QFI, optimized-probe QFI,
/// ...] with stride 5.
#[wasm_bindgen]
pub fn loss_benchmark(pairs: u32, points: usize) -> Result<Vec<f64>, JsValue> {
    let total = 2 * pairs;
    let etas = linspace(0.0, 1.0, points.clamp(2, 201));
    let mut out = Vec::with_capacity(5 * etas.len());
    for eta in etas {
        out.push(eta);
        out.push(sql(pairs, eta, 1.0));
        out.push(hb_lossy_qfi(pairs, eta).map_err(err)?);
        out.push(noon_lossy_qfi(total, eta).map_err(err)?);
        out.push(optimal_probe_qfi_with(total, eta, 8, 0).map_err(err)?.qfi);
    }
    Ok(out)
}

/// Advantage-ratio slice over (eta_p, eta_d) at fixed transmissivity,
/// row-major with eta_p as the slow axis; resolution^2 values. Cells at or
/// above 1 beat the standard quantum limit.
#[wasm_bindgen]
pub fn feasibility_slice(pairs: u32, eta: f64, resolution: usize) -> Result<Vec<f64>, JsValue> {
    let resolution = resolution.clamp(2, 81);
    let axis = linspace(0.0, 1.0, resolution);
    let mut out = Vec::with_capacity(resolution * resolution);
    for &eta_p in &axis {
        for &eta_d in &axis {
            let r = fisherlab::bench::advantage_ratio(pairs, eta_p, eta, eta_d).map_err(err)?;
            out.push(r.ratio);
        }
    }
    Ok(out)
}
