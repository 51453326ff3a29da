//! Explicit-matrix checks that symmetrizing the comparison generator gives
//! the actual one. Small networks only.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    actual_coupling, comparison_coupling, wire_hamiltonian, FieldSample, HamiltonianParams,
};
use crate::network::TriodeNetwork;
use crate::statespace::{symmetrizer, Space, SpaceTag, EXPLICIT_CAP};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationResidual {
    /// `‖P H_w P − P H_w P‖`, zero up to rounding since `H_w′ = H_w`.
    pub wire: f64,
    /// `‖P H_r′ P − P H_r P‖`.
    pub coupling: f64,
}

impl SymmetrizationResidual {
    pub fn max(&self) -> f64 {
        self.wire.max(self.coupling)
    }
}

fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Compares `P H′ P` built from `comparison` fields with `P H P` built from
/// `actual` fields (the latter are averaged per triode before use).
pub fn symmetrization_residual(
    network: &TriodeNetwork,
    params: &HamiltonianParams,
    comparison: &FieldSample,
    actual: &FieldSample,
) -> Result<SymmetrizationResidual> {
    let t = network.triode_count();
    if t > EXPLICIT_CAP {
        return Err(Error::CapExceeded {
            what: "symmetrization check",
            requested: t,
            cap: EXPLICIT_CAP,
        });
    }
    let p = symmetrizer(t)?;
    let space = Space::comparison(t);
    let hw = wire_hamiltonian(network, params, space)?.dense()?;
    let hr_cmp = comparison_coupling(comparison, params.g)?.dense()?;
    let hr_act = actual_coupling(actual, params.g, SpaceTag::Comparison)?.dense()?;
    let sandwich = |m: &DMatrix<Complex64>| &p * m * &p;
    Ok(SymmetrizationResidual {
        wire: frobenius(&(sandwich(&hw) - (&hw * &p))),
        coupling: frobenius(&(sandwich(&hr_cmp) - sandwich(&hr_act))),
    })
}

/// Residual of `P H′ P = H` with `H` using the averaged fields.
pub fn verify_symmetrization(
    network: &TriodeNetwork,
    params: &HamiltonianParams,
    fields: &FieldSample,
) -> Result<SymmetrizationResidual> {
    symmetrization_residual(network, params, fields, fields)
}

/// `‖[H_w, P]‖` on the comparison space.
pub fn wire_symmetrizer_commutator(
    network: &TriodeNetwork,
    params: &HamiltonianParams,
) -> Result<f64> {
    let t = network.triode_count();
    let p = symmetrizer(t)?;
    let hw = wire_hamiltonian(network, params, Space::comparison(t))?.dense()?;
    Ok(frobenius(&(&hw * &p - &p * &hw)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{FieldProcess, NoiseParams};

    #[test]
    fn averaged_fields_pass() {
        let toy = TriodeNetwork::toy();
        let params = HamiltonianParams::default();
        let mut proc = FieldProcess::from_seed(2, NoiseParams::default(), 17).unwrap();
        for _ in 0..10 {
            let f = proc.advance(0.3).clone();
            let r = verify_symmetrization(&toy, &params, &f).unwrap();
            assert!(r.max() <= 1e-12, "{r:?}");
        }
    }

    #[test]
    fn unaveraged_fields_fail() {
        let toy = TriodeNetwork::toy();
        let params = HamiltonianParams::default();
        let proc = FieldProcess::from_seed(2, NoiseParams::default(), 5).unwrap();
        let f = proc.sample().clone();
        let mut first_only = f.clone();
        for t in 0..2 {
            first_only.set_site(t, 2, f.site(t, 1));
        }
        let r = symmetrization_residual(&toy, &params, &f, &first_only).unwrap();
        assert!(r.coupling > 1e-3);
    }

    #[test]
    fn wire_term_commutes_with_symmetrizer() {
        let params = HamiltonianParams {
            trap_free: true,
            g_prime: 3.0,
            ..HamiltonianParams::default()
        };
        assert!(wire_symmetrizer_commutator(&TriodeNetwork::toy(), &params).unwrap() == 0.0);
    }

    #[test]
    fn refuses_large_networks() {
        let net = TriodeNetwork::new(4, vec![]).unwrap();
        let f = FieldSample::zeros(4);
        assert!(
            verify_symmetrization(&net, &HamiltonianParams::default(), &f)
                .unwrap_err()
                .is_cap_refusal()
        );
    }
}
