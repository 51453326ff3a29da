//! Take-off rate of `p_S` and the renormalization ledger.

use serde::{Deserialize, Serialize};

use super::fit::linear_fit;
use crate::dynamics::{EnsembleResult, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TakeoffWindow {
    pub start: f64,
    pub end: f64,
}

impl TakeoffWindow {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::invalid(format!(
                "empty take-off window [{start}, {end}]"
            )));
        }
        Ok(TakeoffWindow { start, end })
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// Sample indices with `start ≤ t ≤ end`, up to rounding slack.
    pub fn indices(&self, times: &[f64]) -> Vec<usize> {
        let slack = 1e-9 * self.end.abs().max(1.0);
        times
            .iter()
            .enumerate()
            .filter(|(_, t)| **t >= self.start - slack && **t <= self.end + slack)
            .map(|(i, _)| i)
            .collect()
    }
}

/// `[first t with p_S ≥ 2·p_S(0), first t with p_S ≥ 0.1]` on the mean
/// series.
pub fn default_window(ensemble: &EnsembleResult) -> Result<TakeoffWindow> {
    let p = &ensemble.p_s.mean;
    let first = |level: f64| {
        p.iter()
            .position(|v| *v >= level)
            .map(|i| ensemble.times[i])
            .ok_or_else(|| Error::DegenerateFit(format!("mean p_S never reaches {level}")))
    };
    let p0 = *p
        .first()
        .ok_or_else(|| Error::DegenerateFit("empty ensemble series".into()))?;
    TakeoffWindow::new(first(2.0 * p0)?, first(0.1)?)
}

/// From the first sample up to the last one of the leading run with mean
/// `p_F ≥ level`.
pub fn frustrated_window(ensemble: &EnsembleResult, level: f64) -> Result<TakeoffWindow> {
    let run = ensemble
        .p_f
        .mean
        .iter()
        .take_while(|p| **p >= level)
        .count();
    if run < 2 {
        return Err(Error::DegenerateFit(format!(
            "mean p_F is below {level} too early"
        )));
    }
    TakeoffWindow::new(ensemble.times[0], ensemble.times[run - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TakeoffFit {
    pub window: TakeoffWindow,
    /// Slope of `log` mean `p_S` over the window.
    pub k_fit: f64,
    /// Mean removed norm per unit time over the window.
    pub k_removed: f64,
    pub r_squared: f64,
    pub n: usize,
}

impl TakeoffFit {
    pub fn relative_gap(&self) -> f64 {
        (self.k_fit - self.k_removed).abs() / self.k_removed.abs()
    }
}

fn fit_series(
    times: &[f64],
    p_s: &[f64],
    removed: &[Option<f64>],
    window: TakeoffWindow,
) -> Result<TakeoffFit> {
    let idx = window.indices(times);
    if idx.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "{} samples in the take-off window",
            idx.len()
        )));
    }
    if let Some(&i) = idx.iter().find(|&&i| !(p_s[i] > 0.0)) {
        return Err(Error::DegenerateFit(format!(
            "p_S = {} at t = {}",
            p_s[i], times[i]
        )));
    }
    let x: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| p_s[i].ln()).collect();
    let line = linear_fit(&x, &y)?;
    // Events strictly after the first window sample feed its growth.
    let span = x[x.len() - 1] - x[0];
    let removed_sum: f64 = idx[1..].iter().filter_map(|&i| removed[i]).sum();
    Ok(TakeoffFit {
        window,
        k_fit: line.slope,
        k_removed: removed_sum / span,
        r_squared: line.r_squared,
        n: idx.len(),
    })
}

/// Log-linear fit of mean `p_S` against the mean removal rate.
pub fn estimate_takeoff(ensemble: &EnsembleResult, window: TakeoffWindow) -> Result<TakeoffFit> {
    fit_series(
        &ensemble.times,
        &ensemble.p_s.mean,
        &ensemble.removed,
        window,
    )
}

/// Same estimate from bare series (`removed[i]` is `δ` at sample `i`).
pub fn estimate_takeoff_series(
    times: &[f64],
    p_s: &[f64],
    removed: &[Option<f64>],
    window: TakeoffWindow,
) -> Result<TakeoffFit> {
    if times.len() != p_s.len() || times.len() != removed.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            got: p_s.len().min(removed.len()),
        });
    }
    fit_series(times, p_s, removed, window)
}

/// Decomposition of `Δ log p_S` over a window into renormalization gain and
/// the drift accumulated between projections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplificationLedger {
    /// `Σ −log(1 − δ_i)`.
    pub gain: f64,
    pub delta_log_p_s: f64,
    pub drift: f64,
    pub residual: f64,
    pub events: usize,
    /// Largest `|p_S(post) − p_S(pre)/(1 − δ)|` over the window's events.
    pub max_event_mismatch: f64,
}

fn normalized_s(w: &crate::statespace::ClassWeights) -> f64 {
    w.s / w.total()
}

pub fn amplification_ledger(
    trajectory: &Trajectory,
    window: TakeoffWindow,
) -> Result<AmplificationLedger> {
    let times = trajectory.times();
    let idx = window.indices(&times);
    let (&a, &b) = match (idx.first(), idx.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::invalid("take-off window holds no samples")),
    };
    let mut cursor = trajectory.samples[..=a]
        .iter()
        .filter(|s| s.removed.is_some())
        .count();
    let mut ledger = AmplificationLedger {
        gain: 0.0,
        delta_log_p_s: 0.0,
        drift: 0.0,
        residual: 0.0,
        events: 0,
        max_event_mismatch: 0.0,
    };
    let mut log_prev = normalized_s(&trajectory.samples[a].weights).ln();
    let log_start = log_prev;
    for sample in &trajectory.samples[a + 1..=b] {
        let log_now = normalized_s(&sample.weights).ln();
        if sample.removed.is_some() {
            let e = trajectory
                .events
                .get(cursor)
                .ok_or_else(|| Error::invalid("trajectory events and samples disagree"))?;
            cursor += 1;
            ledger.events += 1;
            ledger.gain += -(1.0 - e.removed).ln();
            ledger.drift += e.pre.s.ln() - log_prev + (log_now - e.post.s.ln());
            let expect = e.pre.s / (1.0 - e.removed);
            ledger.max_event_mismatch = ledger.max_event_mismatch.max((e.post.s - expect).abs());
        } else {
            ledger.drift += log_now - log_prev;
        }
        log_prev = log_now;
    }
    ledger.delta_log_p_s = log_prev - log_start;
    ledger.residual = ledger.delta_log_p_s - ledger.gain - ledger.drift;
    Ok(ledger)
}

/// One pair of samples at matching energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationPair {
    pub t_from: f64,
    pub t_to: f64,
    pub energy_gap: f64,
    pub log_p_s_change: f64,
    pub ledger_gain: f64,
    /// `log_p_s_change − ledger_gain`.
    pub net: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationReport {
    /// `(t, ⟨H_w⟩, log p_S)`.
    pub series: Vec<(f64, f64, f64)>,
    pub pairs: Vec<FluctuationPair>,
}

/// Aligned energy and `log p_S` series plus every later-sample pair whose
/// energies agree within `tolerance`.
pub fn fluctuation_diagnostic(trajectory: &Trajectory, tolerance: f64) -> FluctuationReport {
    let series: Vec<(f64, f64, f64)> = trajectory
        .samples
        .iter()
        .map(|s| (s.t, s.energy, normalized_s(&s.weights).ln()))
        .collect();
    // Cumulative gain up to and including sample i.
    let mut cumulative = Vec::with_capacity(series.len());
    let mut acc = 0.0;
    for s in &trajectory.samples {
        if let Some(d) = s.removed {
            acc += -(1.0 - d).ln();
        }
        cumulative.push(acc);
    }
    let mut pairs = Vec::new();
    for i in 0..series.len() {
        for h in i + 1..series.len() {
            let gap = (series[h].1 - series[i].1).abs();
            if gap <= tolerance {
                let change = series[h].2 - series[i].2;
                let gain = cumulative[h] - cumulative[i];
                pairs.push(FluctuationPair {
                    t_from: series[i].0,
                    t_to: series[h].0,
                    energy_gap: gap,
                    log_p_s_change: change,
                    ledger_gain: gain,
                    net: change - gain,
                });
            }
        }
    }
    FluctuationReport { series, pairs }
}
