//! Independent trajectories aggregated by index.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{run_kind, RunKind, RunSetup, Trajectory};
use crate::par::Execution;
use crate::{Error, Result};

/// Per-sample mean and standard error (`n − 1` normalization).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SeriesStats {
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
}

impl SeriesStats {
    fn from_columns(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let len = rows.first().map_or(0, Vec::len);
        let mut mean = vec![0.0; len];
        let mut se = vec![0.0; len];
        for j in 0..len {
            let m = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
            mean[j] = m;
            if n > 1 {
                let var = rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / (n - 1) as f64;
                se[j] = (var / n as f64).sqrt();
            }
        }
        SeriesStats { mean, se }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub kind: RunKind,
    pub seeds: Vec<u64>,
    pub times: Vec<f64>,
    pub p_s: SeriesStats,
    pub p_f: SeriesStats,
    pub p_v: SeriesStats,
    pub energy: SeriesStats,
    /// Mean `δ` per sample; `None` where no projection happened.
    pub removed: Vec<Option<f64>>,
}

impl EnsembleResult {
    pub fn from_trajectories(trajectories: &[Trajectory]) -> Result<Self> {
        let first = trajectories
            .first()
            .ok_or_else(|| Error::invalid("an ensemble needs at least one trajectory"))?;
        let times = first.times();
        if trajectories
            .iter()
            .any(|t| t.samples.len() != times.len() || t.kind != first.kind)
        {
            return Err(Error::invalid("trajectories do not share a schedule"));
        }
        let column = |f: fn(&Trajectory) -> Vec<f64>| {
            SeriesStats::from_columns(&trajectories.iter().map(f).collect::<Vec<_>>())
        };
        let n = trajectories.len() as f64;
        let removed = (0..times.len())
            .map(|j| {
                first.samples[j].removed.map(|_| {
                    trajectories
                        .iter()
                        .map(|t| t.samples[j].removed.unwrap_or(0.0))
                        .sum::<f64>()
                        / n
                })
            })
            .collect();
        Ok(EnsembleResult {
            kind: first.kind,
            seeds: trajectories.iter().map(|t| t.seed).collect(),
            times,
            p_s: column(Trajectory::p_s),
            p_f: column(Trajectory::p_f),
            p_v: column(Trajectory::p_v),
            energy: column(Trajectory::energies),
            removed,
        })
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "t,p_S_mean,p_S_se,p_F_mean,p_F_se,p_V_mean,p_V_se,energy_mean,energy_se,removed_norm_mean\n",
        );
        for (j, t) in self.times.iter().enumerate() {
            let removed = self.removed[j].map(|d| d.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{t},{},{},{},{},{},{},{},{},{removed}",
                self.p_s.mean[j],
                self.p_s.se[j],
                self.p_f.mean[j],
                self.p_f.se[j],
                self.p_v.mean[j],
                self.p_v.se[j],
                self.energy.mean[j],
                self.energy.se[j],
            );
        }
        out
    }
}

/// `n` trajectories with seeds `base_seed + i`, in index order.
pub fn run_ensemble_with(
    setup: RunSetup<'_>,
    kind: RunKind,
    n: usize,
    base_seed: u64,
    exec: Execution,
) -> Result<Vec<Trajectory>> {
    if n == 0 {
        return Err(Error::invalid("ensemble size must be at least 1"));
    }
    setup.validate()?;
    exec.map_indexed(n, |i| {
        run_kind(setup, kind, base_seed.wrapping_add(i as u64))
    })
    .into_iter()
    .collect()
}

pub fn run_ensemble(
    setup: RunSetup<'_>,
    kind: RunKind,
    n: usize,
    base_seed: u64,
) -> Result<EnsembleResult> {
    let trajectories = run_ensemble_with(setup, kind, n, base_seed, Execution::default())?;
    EnsembleResult::from_trajectories(&trajectories)
}
