//! Post-processing of trajectories and sweeps: take-off fits, the
//! renormalization ledger, power-law fits and diagnostics.

mod fit;
mod leak;
mod takeoff;

pub use fit::{convergence_order, linear_fit, power_law_fit, LinearFit, ScalingFit};
pub use leak::{frozen_leak_scaling, leak_scaling, LeakPoint, LeakScaling};
pub use takeoff::{
    amplification_ledger, default_window, estimate_takeoff, estimate_takeoff_series,
    fluctuation_diagnostic, frustrated_window, AmplificationLedger, FluctuationPair,
    FluctuationReport, TakeoffFit, TakeoffWindow,
};
