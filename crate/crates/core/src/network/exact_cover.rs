use serde::{Deserialize, Serialize};

use super::{Axis, QubitRef, TriodeNetwork, Wire};
use crate::{Error, Result};

/// Exact cover over 3-element clauses: every clause has exactly one true
/// variable (`x_i + x_j + x_k = 1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactCoverInstance {
    vars: usize,
    clauses: Vec<[usize; 3]>,
}

impl ExactCoverInstance {
    pub fn new(vars: usize, clauses: Vec<[usize; 3]>) -> Result<Self> {
        for &c in &clauses {
            Self::check_clause(vars, c)?;
        }
        Ok(ExactCoverInstance { vars, clauses })
    }

    pub(super) fn check_clause(vars: usize, [i, j, k]: [usize; 3]) -> Result<()> {
        if i == j || j == k || i == k {
            return Err(Error::InvalidInstance(format!(
                "clause ({i}, {j}, {k}) repeats a variable"
            )));
        }
        if let Some(v) = [i, j, k].into_iter().find(|&v| v >= vars) {
            return Err(Error::InvalidInstance(format!(
                "variable {v} out of range for {vars} variables"
            )));
        }
        Ok(())
    }

    pub fn variable_count(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[[usize; 3]] {
        &self.clauses
    }

    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().filter(|&&v| values[v]).count() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCoverEncoding {
    pub network: TriodeNetwork,
    /// First occurrence of each variable; `None` for variables that appear in
    /// no clause.
    pub representatives: Vec<Option<QubitRef>>,
}

/// One triode per clause, clause slots mapped to axes `X, Y, Z`; the
/// occurrences of each variable are chained by equality wires.
pub fn encode_exact_cover(instance: &ExactCoverInstance) -> Result<ExactCoverEncoding> {
    let mut occurrences: Vec<Vec<QubitRef>> = vec![Vec::new(); instance.vars];
    for (t, clause) in instance.clauses.iter().enumerate() {
        ExactCoverInstance::check_clause(instance.vars, *clause)?;
        for (slot, &v) in clause.iter().enumerate() {
            occurrences[v].push(QubitRef::new(t, Axis::ALL[slot]));
        }
    }
    let mut wires = Vec::new();
    for occ in &occurrences {
        for pair in occ.windows(2) {
            let w = Wire::new(pair[0], pair[1])?;
            // the same pair can recur when a clause is listed twice
            if !wires.contains(&w) {
                wires.push(w);
            }
        }
    }
    let network = TriodeNetwork::new(instance.clauses.len(), wires)?;
    let representatives = occurrences.iter().map(|o| o.first().copied()).collect();
    Ok(ExactCoverEncoding {
        network,
        representatives,
    })
}
