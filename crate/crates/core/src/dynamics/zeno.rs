//! Continuous projection under a fixed generator versus the directly
//! symmetrized evolution.

use serde::{Deserialize, Serialize};

use super::{Propagator, Stepper};
use crate::hamiltonian::{
    comparison_coupling, wire_hamiltonian, FieldSample, HamiltonianParams, OperatorHandle,
};
use crate::network::{Label, TriodeNetwork};
use crate::statespace::{embed, project_in_place, SpaceTag, StateVector, EXPLICIT_CAP};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZenoPoint {
    pub interval: f64,
    pub error: f64,
}

/// `G′ = H_w + H_r′ − iγH_w` for one fixed field draw.
pub fn frozen_generator(
    network: &TriodeNetwork,
    params: &HamiltonianParams,
    fields: &FieldSample,
) -> Result<OperatorHandle> {
    let space = crate::statespace::Space::comparison(network.triode_count());
    let h_w = wire_hamiltonian(network, params, space)?;
    let h_r = comparison_coupling(fields, params.g)?;
    crate::hamiltonian::effective_generator(&h_w, &h_r, params.gamma)
}

/// Largest singular value of a small operator.
pub fn spectral_norm(op: &OperatorHandle) -> Result<f64> {
    let m = op.dense()?;
    Ok(m.singular_values().iter().copied().fold(0.0, f64::max))
}

fn check_frozen(g: &OperatorHandle) -> Result<()> {
    if g.space().tag != SpaceTag::Comparison {
        return Err(Error::invalid(
            "the projected evolution needs a comparison-space generator",
        ));
    }
    if g.space().triodes > EXPLICIT_CAP {
        return Err(Error::CapExceeded {
            what: "convergence study triodes",
            requested: g.space().triodes,
            cap: EXPLICIT_CAP,
        });
    }
    if !g.is_hermitian() {
        return Err(Error::invalid(
            "the convergence study needs a Hermitian generator",
        ));
    }
    Ok(())
}

fn intervals_in(total: f64, interval: f64) -> Result<usize> {
    let r = total / interval;
    let n = r.round();
    if !(interval > 0.0) || n < 1.0 || (r - n).abs() > 1e-9 * n {
        return Err(Error::invalid(format!(
            "total time {total} is not a multiple of {interval}"
        )));
    }
    Ok(n as usize)
}

/// Projects every `interval` while evolving under `g` for `total`. Returns
/// the normalized final state and the removed fraction of every event.
pub fn project_frozen(
    g: &OperatorHandle,
    initial: &StateVector,
    interval: f64,
    total: f64,
) -> Result<(StateVector, Vec<f64>)> {
    let steps = intervals_in(total, interval)?;
    let space = g.space();
    let mut state = match initial.space().tag {
        SpaceTag::Physical => embed(initial)?,
        SpaceTag::Comparison => initial.clone(),
    };
    state.expect_space(space)?;
    state.normalize();
    let mask: Vec<bool> = (0..space.dim())
        .map(|i| space.labels_of(i).contains(&Label::Sing))
        .collect();
    let mut prop = Propagator::new();
    let mut removed = Vec::with_capacity(steps);
    for _ in 0..steps {
        prop.step(state.amplitudes_mut(), g, interval, Stepper::Expm);
        let before = state.norm_sqr();
        let gone = project_in_place(&mut state, &mask);
        removed.push(gone / before);
        if state.normalize() == 0.0 {
            return Err(Error::invalid("state norm vanished"));
        }
    }
    Ok((state, removed))
}

/// `e^{−i P G′ P ΔT}` applied on the physical space, embedded back.
pub fn symmetrized_frozen(
    g: &OperatorHandle,
    initial: &StateVector,
    total: f64,
) -> Result<StateVector> {
    let sym = g.symmetrized()?;
    let mut state = match initial.space().tag {
        SpaceTag::Physical => initial.clone(),
        SpaceTag::Comparison => crate::statespace::restrict(initial)?.0,
    };
    state.expect_space(sym.space())?;
    state.normalize();
    Propagator::new().step(state.amplitudes_mut(), &sym, total, Stepper::Expm);
    state.normalize();
    embed(&state)
}

/// `‖ψ_projected(ΔT; Δt) − ψ_symmetrized(ΔT)‖` for every `Δt`, both
/// states normalized.
pub fn zeno_convergence_study(
    g: &OperatorHandle,
    initial: &StateVector,
    intervals: &[f64],
    total: f64,
) -> Result<Vec<ZenoPoint>> {
    check_frozen(g)?;
    let reference = symmetrized_frozen(g, initial, total)?;
    intervals
        .iter()
        .map(|&dt| {
            let (state, _) = project_frozen(g, initial, dt, total)?;
            Ok(ZenoPoint {
                interval: dt,
                error: state.distance(&reference)?,
            })
        })
        .collect()
}

/// Mean removed fraction per projection under a fixed Hermitian generator.
pub fn frozen_leak(
    g: &OperatorHandle,
    initial: &StateVector,
    interval: f64,
    total: f64,
) -> Result<f64> {
    check_frozen(g)?;
    let (_, removed) = project_frozen(g, initial, interval, total)?;
    Ok(removed.iter().sum::<f64>() / removed.len() as f64)
}
