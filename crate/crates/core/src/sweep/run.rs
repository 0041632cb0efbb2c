use rayon::prelude::*;
use serde::Serialize;

use super::{AxisKind, Metadata, Scenario, Series, SeriesResult, SweepConfig, SweepResult};
use crate::entanglement::{pair_concurrence, ConcurrenceTrace};
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, PureState};
use crate::model::{DriveProtocol, DrivenModel};
use crate::propagate::{
    evolve_lindblad_with, evolve_pure_with, EvolutionReport, Generator, NoiseSpec, StepControl, TimeGrid,
    LINDBLAD_CAP,
};

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub swept_value: f64,
    pub c_max: f64,
    pub t_max: f64,
}

/// One propagation at fixed parameters.
#[derive(Clone, Debug, Serialize)]
pub struct EvolveResult {
    pub gamma: f64,
    pub lambda: f64,
    pub drive: DriveProtocol,
    pub trace: ConcurrenceTrace,
    pub report: EvolutionReport,
}

/// Parameters of a single sweep point after resolving series and axis.
#[derive(Copy, Clone, Debug)]
struct PointParams {
    gamma: f64,
    /// Absolute dephasing rate.
    lambda: f64,
    drive: DriveProtocol,
}

fn step_control(cfg: &SweepConfig) -> StepControl {
    StepControl { steps_per_period: cfg.integration.steps_per_period }
}

/// Concurrence trace of the tracked pair starting from the fully polarized
/// state over `[0, T]`.
fn propagate_point(cfg: &SweepConfig, p: &PointParams) -> Result<(ConcurrenceTrace, EvolutionReport)> {
    let spec = cfg.network.clone().with_gamma(p.gamma)?;
    let n = spec.n_sites();
    let window = p.drive.window(n)?;
    let grid = TimeGrid::new(0.0, window, cfg.integration.samples)?;
    let model = DrivenModel::new(spec, p.drive, cfg.integration.frame)?;
    let step = step_control(cfg);
    let (j, k) = cfg.pair;
    let mut times = Vec::with_capacity(grid.samples + 1);
    let mut values = Vec::with_capacity(grid.samples + 1);
    let mut failure = None;
    let report = if p.lambda == 0.0 {
        let psi0 = PureState::all_zero(n)?;
        evolve_pure_with(&psi0, &model, &grid, &step, |t, psi| {
            times.push(t);
            values.push(pair_concurrence(psi, j, k).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            }));
        })?
    } else {
        if n > LINDBLAD_CAP {
            let bytes = 16usize << (2 * n);
            return Err(Error::Resource(format!(
                "decoherence sweep of {n} sites exceeds the density-matrix cap of {LINDBLAD_CAP} \
                 (needs about {} bytes)",
                7 * bytes
            )));
        }
        let rho0 = PureState::all_zero(n)?.to_density();
        evolve_lindblad_with(&rho0, &model, &NoiseSpec { lambda: p.lambda }, &grid, &step, |t, rho: &DensityMatrix| {
            times.push(t);
            values.push(pair_concurrence(rho, j, k).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            }));
        })?
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let trace = ConcurrenceTrace::from_samples(cfg.pair, times, values)?;
    if report.norm_drift > 1e-6 {
        log::warn!("accumulated norm drift {:.3e} at {:?}", report.norm_drift, p.drive);
    }
    Ok((trace, report))
}

struct SeriesPlan {
    label: String,
    gamma: f64,
    lambda: f64,
}

fn series_plan(cfg: &SweepConfig) -> Vec<SeriesPlan> {
    let gamma0 = cfg.network.gamma();
    match &cfg.series {
        Series::Single => vec![SeriesPlan { label: format!("gamma={gamma0}"), gamma: gamma0, lambda: cfg.lambda }],
        Series::Gamma(gs) => gs
            .iter()
            .map(|&g| SeriesPlan { label: format!("gamma={g}"), gamma: g, lambda: cfg.lambda })
            .collect(),
        Series::Lambda(ls) => ls
            .iter()
            .map(|&l| SeriesPlan { label: format!("lambda={l}"), gamma: gamma0, lambda: l })
            .collect(),
    }
}

fn point_params(cfg: &SweepConfig, s: &SeriesPlan, x: f64) -> PointParams {
    let mut drive = cfg.drive;
    let mut lambda = s.lambda;
    match cfg.axis.kind {
        AxisKind::OmegaD => drive.omega_d = x,
        AxisKind::Lambda => lambda = x,
    }
    PointParams { gamma: s.gamma, lambda: cfg.absolute_rate(lambda), drive }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::arg("worker count must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn smallest_step_bound(cfg: &SweepConfig, plans: &[SeriesPlan]) -> Result<f64> {
    let step = step_control(cfg);
    let mut bound = f64::INFINITY;
    for s in plans {
        for &x in &cfg.axis.values {
            let p = point_params(cfg, s, x);
            let model = DrivenModel::new(cfg.network.clone().with_gamma(p.gamma)?, p.drive, cfg.integration.frame)?;
            let omega = model.max_frequency().max(p.lambda * model.n_sites() as f64);
            bound = bound.min(step.max_step(omega)?);
        }
    }
    Ok(bound)
}

fn run_sweep(cfg: &SweepConfig, workers: Option<usize>) -> Result<SweepResult> {
    if !cfg.scenario.is_drive() {
        return Err(Error::Unsupported(format!(
            "scenario `{}` is not a drive sweep",
            cfg.scenario.name()
        )));
    }
    if cfg.axis.values.is_empty() {
        return Err(Error::Config(vec!["sweep grid is empty".into()]));
    }
    let plans = series_plan(cfg);
    let n = cfg.network.n_sites();
    let window = cfg.drive.window(n)?;
    let step_size_bound = smallest_step_bound(cfg, &plans)?;

    let jobs: Vec<(usize, f64)> =
        (0..plans.len()).flat_map(|s| cfg.axis.values.iter().map(move |&x| (s, x))).collect();
    let outcomes: Vec<Result<SweepPoint>> = with_pool(workers, || {
        jobs.par_iter()
            .map(|&(s, x)| {
                let (trace, _) = propagate_point(cfg, &point_params(cfg, &plans[s], x))?;
                Ok(SweepPoint { swept_value: x, c_max: trace.c_max, t_max: trace.t_max })
            })
            .collect()
    })?;
    let mut points = outcomes.into_iter().collect::<Result<Vec<_>>>()?.into_iter();

    let series = plans
        .iter()
        .map(|s| SeriesResult {
            label: s.label.clone(),
            gamma: s.gamma,
            lambda: s.lambda,
            points: points.by_ref().take(cfg.axis.values.len()).collect(),
        })
        .collect();
    Ok(SweepResult {
        axis: cfg.axis.kind,
        series,
        metadata: Metadata {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario: cfg.scenario,
            axis: cfg.axis.kind,
            config: cfg.clone(),
            step_size_bound,
            window,
        },
    })
}

/// Maximal end-pair concurrence over the drive-frequency grid, one curve per
/// series value. Points run in parallel on `workers` threads (the global
/// pool when `None`).
pub fn run_frequency_sweep(cfg: &SweepConfig, workers: Option<usize>) -> Result<SweepResult> {
    if cfg.axis.kind != AxisKind::OmegaD {
        return Err(Error::Config(vec!["a frequency sweep needs `sweep.axis = \"omega_d\"`".into()]));
    }
    run_sweep(cfg, workers)
}

/// Sweep with dephasing, either along a λ grid or as one resonance curve per
/// λ value.
pub fn run_decoherence_sweep(cfg: &SweepConfig, workers: Option<usize>) -> Result<SweepResult> {
    let has_lambda = cfg.axis.kind == AxisKind::Lambda || matches!(cfg.series, Series::Lambda(_)) || cfg.lambda > 0.0;
    if !has_lambda {
        return Err(Error::Config(vec![
            "a decoherence sweep needs a λ grid or a `noise.lambda` list".into(),
        ]));
    }
    let n = cfg.network.n_sites();
    if n > LINDBLAD_CAP {
        let bytes = 7 * (16usize << (2 * n));
        return Err(Error::Resource(format!(
            "{n} sites exceed the density-matrix cap of {LINDBLAD_CAP}; the integrator would need about {bytes} bytes"
        )));
    }
    run_sweep(cfg, workers)
}

/// Single run at the configured drive frequency, dephasing rate and the first
/// anisotropy value.
pub fn run_evolve(cfg: &SweepConfig) -> Result<EvolveResult> {
    if !matches!(cfg.scenario, Scenario::CouplingDrive | Scenario::FieldDrive) {
        return Err(Error::Unsupported(format!("scenario `{}` has no single evolution", cfg.scenario.name())));
    }
    let gamma = cfg.network.gamma();
    let lambda = match &cfg.series {
        Series::Lambda(ls) => ls[0],
        _ => cfg.lambda,
    };
    let p = PointParams { gamma, lambda: cfg.absolute_rate(lambda), drive: cfg.drive };
    let (trace, report) = propagate_point(cfg, &p)?;
    Ok(EvolveResult { gamma, lambda, drive: cfg.drive, trace, report })
}
