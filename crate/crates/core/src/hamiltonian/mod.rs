//! Wire Hamiltonians, heat-bath couplings and the effective generator.

mod noise;
mod operator;
mod verify;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::network::{label_energy, TriodeNetwork};
use crate::statespace::pair::frame_field_coupling;
use crate::statespace::{Space, SpaceTag};
use crate::{Error, Result};

pub use noise::{
    advance_noise, AmplitudeSchedule, FieldProcess, FieldSample, NoiseParams, Pairing, Polarization,
};
pub use operator::{OperatorHandle, SiteCoupling};
pub use verify::{
    symmetrization_residual, verify_symmetrization, wire_symmetrizer_commutator,
    SymmetrizationResidual,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HamiltonianParams {
    /// Energy scale of the wire term.
    pub g: f64,
    /// Scale of the trap-removing term.
    pub g_prime: f64,
    pub trap_free: bool,
    /// Damping rate of the `−iγH_w` relaxation term.
    pub gamma: f64,
}

impl Default for HamiltonianParams {
    fn default() -> Self {
        HamiltonianParams {
            g: 1.0,
            g_prime: 0.0,
            trap_free: false,
            gamma: 0.0,
        }
    }
}

impl HamiltonianParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) {
            return Err(Error::invalid("g must be positive"));
        }
        if !(self.g_prime >= 0.0) {
            return Err(Error::invalid("g' must be nonnegative"));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::invalid("gamma must be nonnegative"));
        }
        Ok(())
    }

    pub fn energy(&self, network: &TriodeNetwork, labels: &[crate::network::Label]) -> f64 {
        label_energy(network, labels, self.g, self.g_prime, self.trap_free)
    }
}

/// Diagonal wire Hamiltonian on `space`: `g ε_w`, or the trap-free form.
pub fn wire_hamiltonian(
    network: &TriodeNetwork,
    params: &HamiltonianParams,
    space: Space,
) -> Result<OperatorHandle> {
    params.validate()?;
    if space.triodes != network.triode_count() {
        return Err(Error::LengthMismatch {
            expected: network.triode_count(),
            got: space.triodes,
        });
    }
    let diag = (0..space.dim())
        .map(|i| Complex64::new(params.energy(network, &space.labels_of(i)), 0.0))
        .collect();
    OperatorHandle::diagonal(space, diag, true)
}

fn coupling_from(fields: &FieldSample, g: f64, space: Space) -> Result<OperatorHandle> {
    if fields.triodes() != space.triodes {
        return Err(Error::LengthMismatch {
            expected: space.triodes,
            got: fields.triodes(),
        });
    }
    let d = space.radix();
    let mut op = OperatorHandle::zero(space);
    for t in 0..space.triodes {
        let mut block = Vec::with_capacity(d * d);
        let m =
            frame_field_coupling(1, fields.site(t, 1)) + frame_field_coupling(2, fields.site(t, 2));
        for r in 0..d {
            for c in 0..d {
                block.push(m[(r, c)] * g);
            }
        }
        op = op.with_local(t, block, true)?;
        for beta in [1u8, 2] {
            op.record_coupling(SiteCoupling {
                triode: t,
                beta,
                field: fields.site(t, beta).map(|b| b * g),
            });
        }
    }
    Ok(op)
}

/// `H_r′ = g Σ_{τ,β} B(τ,β)·σ(τ,β)` on the comparison space.
pub fn comparison_coupling(fields: &FieldSample, g: f64) -> Result<OperatorHandle> {
    coupling_from(fields, g, Space::comparison(fields.triodes()))
}

/// `H_r = g Σ_{τ,β} B(τ)·σ(τ,β)` with `B(τ)` the mean of the two site
/// fields. On the physical space this is the triplet block.
pub fn actual_coupling(fields: &FieldSample, g: f64, tag: SpaceTag) -> Result<OperatorHandle> {
    let space = Space {
        tag,
        triodes: fields.triodes(),
    };
    coupling_from(&fields.averaged(), g, space)
}

/// `G = H_w + H_r − iγ H_w`.
pub fn effective_generator(
    h_w: &OperatorHandle,
    h_r: &OperatorHandle,
    gamma: f64,
) -> Result<OperatorHandle> {
    if !(gamma >= 0.0) {
        return Err(Error::invalid("gamma must be nonnegative"));
    }
    if h_w.space() != h_r.space() {
        return Err(Error::invalid(format!(
            "generator parts live on different spaces: {:?} vs {:?}",
            h_w.space(),
            h_r.space()
        )));
    }
    let damped = if gamma == 0.0 {
        h_w.clone()
    } else {
        h_w.scaled(Complex64::new(1.0, -gamma))
    };
    damped.add(h_r)
}
