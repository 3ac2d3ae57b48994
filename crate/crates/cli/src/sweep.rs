//! Sweep subcommand: deterministic parameter grids evaluated in parallel,
//! emitted as CSV or JSON with grid ordering independent of thread count.

use clap::{Args, ValueEnum};
use rayon::prelude::*;

use fisherlab::bench::{
    advantage_ratio, hb_lossy_qfi, linspace, noon_lossy_qfi, optimal_probe_qfi_with, sql,
    threshold_search, ThresholdAxis,
};
use fisherlab::{cfi, PipelineEvaluator};

use crate::output::{Cell, Format, Table};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepQuantity {
    /// Twin-Fock QFI under one-arm loss over the eta grid.
    Qfi,
    /// Classical Fisher information over the phi grid at fixed efficiencies.
    Cfi,
    /// Advantage ratio over the efficiency grids.
    Ratio,
    /// Smallest efficiency on one axis reaching ratio 1.
    Threshold,
    /// Advantage-ratio grid over all three efficiencies.
    Feasibility,
    /// Benchmark curves against loss: SQL, twin-Fock, N00N, optimized probe.
    Figure2,
    /// Feasibility grid for two photon pairs.
    Figure3,
    /// Feasibility grids for one and three photon pairs.
    Figure4,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    EtaP,
    Eta,
    EtaD,
}

impl From<AxisArg> for ThresholdAxis {
    fn from(axis: AxisArg) -> Self {
        match axis {
            AxisArg::EtaP => ThresholdAxis::EtaP,
            AxisArg::Eta => ThresholdAxis::Eta,
            AxisArg::EtaD => ThresholdAxis::EtaD,
        }
    }
}

/// Grid argument: either a single value `x` or a range `lo:hi:count`.
#[derive(Debug, Clone)]
pub struct GridArg(pub Vec<f64>);

impl std::str::FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [single] => {
                let v: f64 = single
                    .parse()
                    .map_err(|_| format!("expected a decimal number, got {single:?}"))?;
                Ok(GridArg(vec![v]))
            }
            [lo, hi, count] => {
                let lo: f64 = lo.parse().map_err(|_| format!("bad grid start {lo:?}"))?;
                let hi: f64 = hi.parse().map_err(|_| format!("bad grid end {hi:?}"))?;
                let count: usize = count
                    .parse()
                    .map_err(|_| format!("bad grid count {count:?}"))?;
                Ok(GridArg(linspace(lo, hi, count)))
            }
            _ => Err("grids are a single value or lo:hi:count".to_string()),
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// What to sweep.
    #[arg(long, value_enum)]
    pub quantity: SweepQuantity,

    /// Photon pairs N of the twin-Fock probe (qfi, cfi).
    #[arg(long, default_value_t = 2)]
    pub n: u32,

    /// Photon pairs k of the benchmark probe (ratio, threshold, feasibility).
    #[arg(long, default_value_t = 2)]
    pub k: u32,

    /// Total photons for the figure2 benchmark curves.
    #[arg(long, default_value_t = 20)]
    pub photons: u32,

    /// Phase grid (value or lo:hi:count), radians. Default 0.02:1.55:40.
    #[arg(long)]
    pub phi: Option<GridArg>,

    /// Preparation-efficiency grid (value or lo:hi:count). Default 1.
    #[arg(long)]
    pub eta_p: Option<GridArg>,

    /// Transmissivity grid (value or lo:hi:count). Default 0:1:21 when swept,
    /// 1 when held fixed.
    #[arg(long)]
    pub eta: Option<GridArg>,

    /// Detector-efficiency grid (value or lo:hi:count). Default 1.
    #[arg(long)]
    pub eta_d: Option<GridArg>,

    /// Axis for threshold searches.
    #[arg(long, value_enum, default_value_t = AxisArg::EtaP)]
    pub axis: AxisArg,

    /// Points per axis for feasibility grids.
    #[arg(long, default_value_t = 21)]
    pub resolution: usize,

    /// Random-start seed for the probe optimizer.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output path, or - for stdout.
    #[arg(long, default_value = "-")]
    pub output: String,

    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

impl SweepArgs {
    fn grid_or(&self, grid: &Option<GridArg>, fallback: &[f64]) -> Vec<f64> {
        grid.as_ref()
            .map(|g| g.0.clone())
            .unwrap_or_else(|| fallback.to_vec())
    }

    /// Fixed scalar for quantities that hold a parameter constant: the first
    /// grid entry, defaulting to 1.
    fn fixed(&self, grid: &Option<GridArg>) -> f64 {
        grid.as_ref()
            .and_then(|g| g.0.first().copied())
            .unwrap_or(1.0)
    }

    fn eta_sweep(&self) -> Vec<f64> {
        self.grid_or(&self.eta, &linspace(0.0, 1.0, 21))
    }

    fn phi_sweep(&self) -> Vec<f64> {
        self.grid_or(&self.phi, &linspace(0.02, 1.55, 40))
    }
}

fn efficiency_rows(args: &SweepArgs) -> Vec<(f64, f64, f64)> {
    let eta_p = args.grid_or(&args.eta_p, &[1.0]);
    let eta = args.eta_sweep();
    let eta_d = args.grid_or(&args.eta_d, &[1.0]);
    let mut rows = Vec::new();
    for &p in &eta_p {
        for &e in &eta {
            for &d in &eta_d {
                rows.push((p, e, d));
            }
        }
    }
    rows
}

pub fn run(args: &SweepArgs) -> Result<(), String> {
    let table = build_table(args).map_err(|e| e.to_string())?;
    table
        .write(&args.output, args.format.into())
        .map_err(|e| format!("cannot write {}: {e}", args.output))
}

fn build_table(args: &SweepArgs) -> fisherlab::Result<Table> {
    match args.quantity {
        SweepQuantity::Qfi => {
            let rows: Vec<Vec<Cell>> = args
                .eta_sweep()
                .par_iter()
                .map(|&eta| {
                    let j = hb_lossy_qfi(args.n, eta)?;
                    Ok(vec![Cell::Float(eta), Cell::Float(j)])
                })
                .collect::<fisherlab::Result<_>>()?;
            Ok(Table {
                header: vec!["eta", "qfi"],
                rows,
            })
        }
        SweepQuantity::Cfi => {
            let eta_p = args.fixed(&args.eta_p);
            let eta = args.fixed(&args.eta);
            let eta_d = args.fixed(&args.eta_d);
            let evaluator = PipelineEvaluator::new(args.n, eta_p, eta, eta_d)?;
            let rows: Vec<Vec<Cell>> = args
                .phi_sweep()
                .par_iter()
                .map(|&phi| {
                    let f = cfi(&evaluator.distribution(phi)).unwrap_or(f64::NAN);
                    vec![Cell::Float(phi), Cell::Float(f)]
                })
                .collect();
            Ok(Table {
                header: vec!["phi", "cfi"],
                rows,
            })
        }
        SweepQuantity::Ratio => {
            let cells = efficiency_rows(args);
            let rows: Vec<Vec<Cell>> = cells
                .par_iter()
                .map(|&(p, e, d)| {
                    let r = advantage_ratio(args.k, p, e, d)?;
                    Ok(vec![
                        Cell::Float(p),
                        Cell::Float(e),
                        Cell::Float(d),
                        Cell::Float(r.best_phase),
                        Cell::Float(r.f_best),
                        Cell::Float(r.f_sql),
                        Cell::Float(r.ratio),
                    ])
                })
                .collect::<fisherlab::Result<_>>()?;
            Ok(Table {
                header: vec![
                    "eta_p", "eta", "eta_d", "best_phi", "f_best", "f_sql", "ratio",
                ],
                rows,
            })
        }
        SweepQuantity::Threshold => {
            let eta_p = args.fixed(&args.eta_p);
            let eta = args.fixed(&args.eta);
            let eta_d = args.fixed(&args.eta_d);
            let axis: ThresholdAxis = args.axis.into();
            let (threshold, crossed) = match threshold_search(args.k, axis, eta_p, eta, eta_d) {
                Ok(v) => (v, true),
                Err(fisherlab::Error::NoCrossing) => {
                    eprintln!(
                        "note: the advantage ratio never reaches 1 on the {} axis",
                        axis.name()
                    );
                    (f64::NAN, false)
                }
                Err(e) => return Err(e),
            };
            Ok(Table {
                header: vec!["k", "axis", "eta_p", "eta", "eta_d", "threshold", "crossed"],
                rows: vec![vec![
                    Cell::Int(args.k as u64),
                    Cell::Text(axis.name()),
                    Cell::Float(eta_p),
                    Cell::Float(eta),
                    Cell::Float(eta_d),
                    Cell::Float(threshold),
                    Cell::Bool(crossed),
                ]],
            })
        }
        SweepQuantity::Feasibility => Ok(feasibility_table(args.k, args.resolution)?),
        SweepQuantity::Figure3 => Ok(feasibility_table(2, args.resolution)?),
        SweepQuantity::Figure4 => {
            let mut table = feasibility_table_with_k_column(1, args.resolution)?;
            let mut three = feasibility_table_with_k_column(3, args.resolution)?;
            table.rows.append(&mut three.rows);
            Ok(table)
        }
        SweepQuantity::Figure2 => figure2_table(args),
    }
}

fn feasibility_rows(k: u32, resolution: usize) -> fisherlab::Result<Vec<Vec<Cell>>> {
    if resolution == 0 || resolution > 101 {
        return Err(fisherlab::Error::OutOfRange {
            name: "resolution",
            value: resolution as f64,
            min: 1.0,
            max: 101.0,
        });
    }
    let axis = linspace(0.0, 1.0, resolution);
    let mut points = Vec::with_capacity(resolution.pow(3));
    for &p in &axis {
        for &e in &axis {
            for &d in &axis {
                points.push((p, e, d));
            }
        }
    }
    points
        .par_iter()
        .map(|&(p, e, d)| {
            let r = advantage_ratio(k, p, e, d)?;
            Ok(vec![
                Cell::Float(p),
                Cell::Float(e),
                Cell::Float(d),
                Cell::Float(r.ratio),
                Cell::Bool(r.is_feasible()),
            ])
        })
        .collect()
}

fn feasibility_table(k: u32, resolution: usize) -> fisherlab::Result<Table> {
    Ok(Table {
        header: vec!["eta_p", "eta", "eta_d", "ratio", "feasible"],
        rows: feasibility_rows(k, resolution)?,
    })
}

fn feasibility_table_with_k_column(k: u32, resolution: usize) -> fisherlab::Result<Table> {
    let rows = feasibility_rows(k, resolution)?
        .into_iter()
        .map(|mut row| {
            let mut with_k = vec![Cell::Int(k as u64)];
            with_k.append(&mut row);
            with_k
        })
        .collect();
    Ok(Table {
        header: vec!["k", "eta_p", "eta", "eta_d", "ratio", "feasible"],
        rows,
    })
}

fn figure2_table(args: &SweepArgs) -> fisherlab::Result<Table> {
    let total = args.photons;
    if total == 0 || !total.is_multiple_of(2) {
        return Err(fisherlab::Error::Invalid(
            "figure2 needs an even, positive photon total".into(),
        ));
    }
    let pairs = total / 2;
    let rows: Vec<Vec<Cell>> = args
        .eta_sweep()
        .par_iter()
        .map(|&eta| {
            let hb = hb_lossy_qfi(pairs, eta)?;
            let noon = noon_lossy_qfi(total, eta)?;
            let optimal = optimal_probe_qfi_with(total, eta, 20, args.seed)?.qfi;
            Ok(vec![
                Cell::Float(eta),
                Cell::Float(sql(pairs, eta, 1.0)),
                Cell::Float(hb),
                Cell::Float(noon),
                Cell::Float(optimal),
            ])
        })
        .collect::<fisherlab::Result<_>>()?;
    // Column names carry the photon numbers of the default comparison.
    let header = match total {
        20 => vec!["eta", "sql", "hb10", "noon20", "optimal20"],
        _ => vec!["eta", "sql", "hb", "noon", "optimal"],
    };
    Ok(Table { header, rows })
}
