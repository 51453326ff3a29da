//! How the removed norm per projection scales with the projection interval.

use serde::{Deserialize, Serialize};

use super::fit::{power_law_fit, ScalingFit};
use crate::dynamics::{
    frozen_leak, run_ensemble_with, EnsembleResult, RunKind, RunSetup, ScheduleParams,
};
use crate::hamiltonian::OperatorHandle;
use crate::par::Execution;
use crate::statespace::StateVector;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakPoint {
    pub interval: f64,
    /// Ensemble mean of the per-trajectory mean `δ`.
    pub mean_removed: f64,
    pub se: f64,
    pub per_trajectory: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakScaling {
    /// Sorted by decreasing interval.
    pub points: Vec<LeakPoint>,
    /// Absent when every `δ` vanished.
    pub fit: Option<ScalingFit>,
    /// Jackknife 95% interval on the exponent.
    pub confidence: Option<(f64, f64)>,
    pub degenerate: bool,
    #[serde(skip)]
    pub ensembles: Vec<EnsembleResult>,
}

fn check_intervals(intervals: &[f64]) -> Result<Vec<f64>> {
    if intervals.len() < 3 {
        return Err(Error::invalid("leak scaling needs at least 3 intervals"));
    }
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if sorted.windows(2).any(|w| !(w[1] < w[0])) || !(sorted[sorted.len() - 1] > 0.0) {
        return Err(Error::invalid("intervals must be positive and distinct"));
    }
    if sorted[0] < 4.0 * sorted[sorted.len() - 1] * (1.0 - 1e-12) {
        return Err(Error::invalid("intervals must span at least a factor of 4"));
    }
    Ok(sorted)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn fit_means(intervals: &[f64], means: &[f64]) -> Option<ScalingFit> {
    let pts: Vec<(f64, f64)> = intervals
        .iter()
        .copied()
        .zip(means.iter().copied())
        .collect();
    power_law_fit(&pts).ok()
}

/// Projected ensembles at every `Δt` over the same `ΔT`; power-law fit of
/// the mean removed norm per projection.
pub fn leak_scaling(
    setup: RunSetup<'_>,
    intervals: &[f64],
    n: usize,
    base_seed: u64,
    exec: Execution,
) -> Result<LeakScaling> {
    let sorted = check_intervals(intervals)?;
    let mut points = Vec::with_capacity(sorted.len());
    let mut ensembles = Vec::with_capacity(sorted.len());
    for &dt in &sorted {
        let schedule = ScheduleParams {
            projection_interval: dt,
            ..setup.schedule.clone()
        };
        let run = RunSetup {
            schedule: &schedule,
            ..setup
        };
        let trajectories = run_ensemble_with(run, RunKind::Projected, n, base_seed, exec)?;
        let per: Vec<f64> = trajectories.iter().map(|t| mean(&t.removed())).collect();
        let m = mean(&per);
        let se = if n > 1 {
            (per.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        ensembles.push(EnsembleResult::from_trajectories(&trajectories)?);
        points.push(LeakPoint {
            interval: dt,
            mean_removed: m,
            se,
            per_trajectory: per,
        });
    }
    let means: Vec<f64> = points.iter().map(|p| p.mean_removed).collect();
    let fit = fit_means(&sorted, &means);
    let confidence = match &fit {
        Some(f) if n > 1 => jackknife(&sorted, &points, n)
            .map(|se| (f.exponent - 1.96 * se, f.exponent + 1.96 * se)),
        _ => None,
    };
    Ok(LeakScaling {
        degenerate: fit.is_none(),
        points,
        fit,
        confidence,
        ensembles,
    })
}

/// Leave-one-trajectory-out standard error of the exponent.
fn jackknife(intervals: &[f64], points: &[LeakPoint], n: usize) -> Option<f64> {
    let mut estimates = Vec::with_capacity(n);
    for skip in 0..n {
        let means: Vec<f64> = points
            .iter()
            .map(|p| {
                let s: f64 = p
                    .per_trajectory
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, x)| x)
                    .sum();
                s / (n - 1) as f64
            })
            .collect();
        estimates.push(fit_means(intervals, &means)?.exponent);
    }
    let m = mean(&estimates);
    let var = estimates.iter().map(|e| (e - m).powi(2)).sum::<f64>() * (n - 1) as f64 / n as f64;
    Some(var.sqrt())
}

/// Same fit for a fixed Hermitian generator.
pub fn frozen_leak_scaling(
    g: &OperatorHandle,
    initial: &StateVector,
    intervals: &[f64],
    total: f64,
) -> Result<LeakScaling> {
    let sorted = check_intervals(intervals)?;
    let points = sorted
        .iter()
        .map(|&dt| {
            let m = frozen_leak(g, initial, dt, total)?;
            Ok(LeakPoint {
                interval: dt,
                mean_removed: m,
                se: 0.0,
                per_trajectory: vec![m],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let means: Vec<f64> = points.iter().map(|p| p.mean_removed).collect();
    let fit = fit_means(&sorted, &means);
    Ok(LeakScaling {
        degenerate: fit.is_none(),
        points,
        fit,
        confidence: None,
        ensembles: Vec::new(),
    })
}
