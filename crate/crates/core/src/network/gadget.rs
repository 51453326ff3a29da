use std::collections::BTreeSet;

use super::{
    enumerate_solutions_with, Axis, Model, QubitRef, TriodeNetwork, Wire, DEFAULT_TRIODE_CAP,
};
use crate::par::Execution;
use crate::{Error, Result};

/// A triode network with designated input and output qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetSpec {
    pub network: TriodeNetwork,
    pub input_refs: Vec<QubitRef>,
    pub output_refs: Vec<QubitRef>,
}

impl GadgetSpec {
    pub fn new(
        network: TriodeNetwork,
        input_refs: Vec<QubitRef>,
        output_refs: Vec<QubitRef>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &r in input_refs.iter().chain(&output_refs) {
            network.check_ref(r)?;
            if !seen.insert(r) {
                return Err(Error::invalid(format!("gadget terminal {r} listed twice")));
            }
        }
        Ok(GadgetSpec {
            network,
            input_refs,
            output_refs,
        })
    }

    pub fn arity(&self) -> usize {
        self.input_refs.len() + self.output_refs.len()
    }

    /// Terminal values `(inputs…, outputs…)` over all TRIODE solutions, with
    /// the remaining qubits projected out.
    pub fn relation(&self) -> Result<BTreeSet<Vec<u8>>> {
        let sols = enumerate_solutions_with(
            &self.network,
            Model::Triode,
            DEFAULT_TRIODE_CAP,
            Execution::Sequential,
        )?;
        Ok(sols
            .iter()
            .map(|s| {
                self.input_refs
                    .iter()
                    .chain(&self.output_refs)
                    .map(|r| s.0[r.triode].bit(r.axis))
                    .collect()
            })
            .collect())
    }
}

fn wire(t0: usize, a0: Axis, t1: usize, a1: Axis) -> Wire {
    Wire::new(QubitRef::new(t0, a0), QubitRef::new(t1, a1)).expect("distinct endpoints")
}

/// NOT from two triodes.
///
/// Triode 0 carries `(a, b, c)`. Triode 1 has `x = y`, which forces both to
/// 0 and its `z` to 1; its `x` is wired to `c`, so `a + b = 1`.
pub fn build_not_gadget() -> GadgetSpec {
    use Axis::*;
    let network = TriodeNetwork::new(2, vec![wire(1, X, 1, Y), wire(0, Z, 1, X)]).unwrap();
    GadgetSpec::new(
        network,
        vec![QubitRef::new(0, X)],
        vec![QubitRef::new(0, Y)],
    )
    .unwrap()
}

/// NOR from three triodes.
///
/// Triode 0 is `(a, p, z)` and triode 1 is `(b, r, z)` (their `z` qubits
/// wired). With `z = 1` everything else is 0; with `z = 0` we get `p = ¬a`
/// and `r = ¬b`. Triode 2 holds copies of `p` and `r`, which excludes
/// `p = r = 1`, i.e. rules out `a = b = 0` when `z = 0`.
pub fn build_nor_gadget() -> GadgetSpec {
    use Axis::*;
    let network = TriodeNetwork::new(
        3,
        vec![wire(0, Z, 1, Z), wire(0, Y, 2, X), wire(1, Y, 2, Y)],
    )
    .unwrap();
    GadgetSpec::new(
        network,
        vec![QubitRef::new(0, X), QubitRef::new(1, X)],
        vec![QubitRef::new(0, Z)],
    )
    .unwrap()
}

/// True iff the gadget's projected TRIODE solution set equals `table`.
pub fn verify_gadget(gadget: &GadgetSpec, table: &BTreeSet<Vec<u8>>) -> Result<bool> {
    if let Some(bad) = table.iter().find(|row| row.len() != gadget.arity()) {
        return Err(Error::invalid(format!(
            "table row {bad:?} has arity {}, gadget has {}",
            bad.len(),
            gadget.arity()
        )));
    }
    Ok(&gadget.relation()? == table)
}
