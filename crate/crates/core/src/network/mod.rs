//! Boolean-level model of triode/EQU networks.
//!
//! A triode is the relation `q_x + q_y + q_z = 1` over three qubits; the EQU
//! gate weakens it to `q_x + q_y + q_z = 1 (mod 2)`, which admits the extra
//! row `(1, 1, 1)` (the singlet). Wires are equality constraints between
//! qubits. The error metric counts frustrated wires.

mod anneal;
mod exact_cover;
mod format;
mod gadget;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::par::Execution;
use crate::{Error, Result};

pub use anneal::{
    classical_anneal, label_energy, AnnealParams, AnnealSchedule, ClassicalTrajectory,
    TemperatureProfile,
};
pub use exact_cover::{encode_exact_cover, ExactCoverEncoding, ExactCoverInstance};
pub use gadget::{build_nor_gadget, build_not_gadget, verify_gadget, GadgetSpec};

/// Largest triode count enumerated under the TRIODE model by default.
pub const DEFAULT_TRIODE_CAP: usize = 12;
/// Largest triode count enumerated under the EQU model by default.
pub const DEFAULT_EQU_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_char(c: char) -> Option<Axis> {
        match c {
            'x' | 'X' => Some(Axis::X),
            'y' | 'Y' => Some(Axis::Y),
            'z' | 'Z' => Some(Axis::Z),
            _ => None,
        }
    }
}

/// Per-triode label. The first three are the triplet (triode) modes, `Sing`
/// is the singlet row of the EQU table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    X,
    Y,
    Z,
    Sing,
}

impl Label {
    pub const TRIPLET: [Label; 3] = [Label::X, Label::Y, Label::Z];
    pub const ALL: [Label; 4] = [Label::X, Label::Y, Label::Z, Label::Sing];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Label {
        Label::ALL[i]
    }

    /// Qubit triple `(q_x, q_y, q_z)` carried by this label.
    pub fn triple(self) -> [u8; 3] {
        match self {
            Label::X => [1, 0, 0],
            Label::Y => [0, 1, 0],
            Label::Z => [0, 0, 1],
            Label::Sing => [1, 1, 1],
        }
    }

    pub fn bit(self, axis: Axis) -> u8 {
        self.triple()[axis.index()]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::X => "X",
            Label::Y => "Y",
            Label::Z => "Z",
            Label::Sing => "Sing",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which relation each triode enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Arithmetic sum-1 relation; labels `{X, Y, Z}`.
    Triode,
    /// Mod-2 relation; labels `{X, Y, Z, Sing}`.
    Equ,
}

impl Model {
    pub fn labels(self) -> &'static [Label] {
        match self {
            Model::Triode => &Label::TRIPLET,
            Model::Equ => &Label::ALL,
        }
    }

    pub fn radix(self) -> usize {
        self.labels().len()
    }

    pub fn default_cap(self) -> usize {
        match self {
            Model::Triode => DEFAULT_TRIODE_CAP,
            Model::Equ => DEFAULT_EQU_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitRef {
    pub triode: usize,
    pub axis: Axis,
}

impl QubitRef {
    pub fn new(triode: usize, axis: Axis) -> Self {
        QubitRef { triode, axis }
    }

    fn check(self, triodes: usize) -> Result<()> {
        if self.triode < triodes {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                triode: self.triode,
                axis: self.axis.as_char(),
                triodes,
            })
        }
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.triode, self.axis.as_char())
    }
}

/// Equality constraint between two distinct qubits. Endpoints are stored
/// with the smaller reference first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Wire {
    a: QubitRef,
    b: QubitRef,
}

impl Wire {
    pub fn new(a: QubitRef, b: QubitRef) -> Result<Self> {
        if a == b {
            return Err(Error::invalid(format!("wire joins {a} to itself")));
        }
        Ok(if a < b {
            Wire { a, b }
        } else {
            Wire { a: b, b: a }
        })
    }

    pub fn a(&self) -> QubitRef {
        self.a
    }

    pub fn b(&self) -> QubitRef {
        self.b
    }
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wire {} {}", self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriodeNetwork {
    triodes: usize,
    wires: Vec<Wire>,
}

impl TriodeNetwork {
    pub fn new(triodes: usize, wires: Vec<Wire>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for w in &wires {
            w.a.check(triodes)?;
            w.b.check(triodes)?;
            if !seen.insert(*w) {
                return Err(Error::invalid(format!("duplicate {w}")));
            }
        }
        Ok(TriodeNetwork { triodes, wires })
    }

    /// The two-triode network with wires `x=x'`, `y=y'`, `z=z'`.
    pub fn toy() -> Self {
        let wires = Axis::ALL
            .iter()
            .map(|&ax| Wire::new(QubitRef::new(0, ax), QubitRef::new(1, ax)).unwrap())
            .collect();
        TriodeNetwork { triodes: 2, wires }
    }

    pub fn triode_count(&self) -> usize {
        self.triodes
    }

    pub fn qubit_count(&self) -> usize {
        3 * self.triodes
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    /// Frustrated-wire count for a raw label slice (no length check).
    pub fn error_of(&self, labels: &[Label]) -> u32 {
        self.wires
            .iter()
            .map(|w| {
                let qa = labels[w.a.triode].bit(w.a.axis);
                let qb = labels[w.b.triode].bit(w.b.axis);
                u32::from(qa != qb)
            })
            .sum()
    }

    pub fn check_ref(&self, r: QubitRef) -> Result<()> {
        r.check(self.triodes)
    }
}

/// Per-triode labels; triode 0 first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<Label>);

impl Assignment {
    pub fn new(labels: Vec<Label>) -> Self {
        Assignment(labels)
    }

    pub fn uniform(label: Label, triodes: usize) -> Self {
        Assignment(vec![label; triodes])
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Mixed-radix decode with triode 0 most significant.
    pub fn from_index(mut index: usize, triodes: usize, model: Model) -> Self {
        let radix = model.radix();
        let mut labels = vec![Label::X; triodes];
        for slot in labels.iter_mut().rev() {
            *slot = model.labels()[index % radix];
            index /= radix;
        }
        Assignment(labels)
    }

    pub fn fits(&self, model: Model) -> bool {
        self.0.iter().all(|l| model.labels().contains(l))
    }

    /// Concatenated label names, e.g. `XZSing`.
    pub fn label_string(&self) -> String {
        self.0.iter().map(|l| l.as_str()).collect()
    }

    pub fn parse_label_string(s: &str) -> Result<Self> {
        let mut labels = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix("Sing") {
                labels.push(Label::Sing);
                rest = r;
                continue;
            }
            let label = match rest.as_bytes()[0] {
                b'X' => Label::X,
                b'Y' => Label::Y,
                b'Z' => Label::Z,
                _ => return Err(Error::invalid(format!("bad label string {s:?}"))),
            };
            labels.push(label);
            rest = &rest[1..];
        }
        Ok(Assignment(labels))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label_string())
    }
}

pub fn qubit_value(assignment: &Assignment, r: QubitRef) -> Result<u8> {
    r.check(assignment.len())?;
    Ok(assignment.0[r.triode].bit(r.axis))
}

/// `[q(w,0) - q(w,1)]^2`.
pub fn wire_error(assignment: &Assignment, wire: &Wire) -> Result<u8> {
    let a = qubit_value(assignment, wire.a)?;
    let b = qubit_value(assignment, wire.b)?;
    Ok(a.abs_diff(b))
}

/// Number of frustrated wires.
pub fn total_error(assignment: &Assignment, network: &TriodeNetwork) -> Result<u32> {
    if assignment.len() != network.triodes {
        return Err(Error::LengthMismatch {
            expected: network.triodes,
            got: assignment.len(),
        });
    }
    Ok(network.error_of(&assignment.0))
}

pub fn enumerate_solutions(network: &TriodeNetwork, model: Model) -> Result<Vec<Assignment>> {
    enumerate_solutions_with(network, model, model.default_cap(), Execution::default())
}

/// Brute-force solution set in lexicographic (mixed-radix) order.
pub fn enumerate_solutions_with(
    network: &TriodeNetwork,
    model: Model,
    cap: usize,
    exec: Execution,
) -> Result<Vec<Assignment>> {
    let t = network.triodes;
    if t > cap {
        return Err(Error::CapExceeded {
            what: "solution enumeration",
            requested: t,
            cap,
        });
    }
    let total = model.radix().pow(t as u32);
    let hits = exec.filter_indices(total, |i| {
        network.error_of(&Assignment::from_index(i, t, model).0) == 0
    });
    Ok(hits
        .into_iter()
        .map(|i| Assignment::from_index(i, t, model))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(labels: &[Label]) -> Assignment {
        Assignment::new(labels.to_vec())
    }

    #[test]
    fn qubit_values_follow_tables() {
        let z = a(&[Label::Z]);
        assert_eq!(qubit_value(&z, QubitRef::new(0, Axis::Z)).unwrap(), 1);
        let s = a(&[Label::Sing]);
        assert_eq!(qubit_value(&s, QubitRef::new(0, Axis::X)).unwrap(), 1);
        let x = a(&[Label::X]);
        assert_eq!(qubit_value(&x, QubitRef::new(0, Axis::Y)).unwrap(), 0);
        assert!(matches!(
            qubit_value(&x, QubitRef::new(1, Axis::Y)),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn wire_errors() {
        let w = Wire::new(QubitRef::new(0, Axis::X), QubitRef::new(1, Axis::X)).unwrap();
        assert_eq!(wire_error(&a(&[Label::X, Label::Sing]), &w).unwrap(), 0);
        assert_eq!(wire_error(&a(&[Label::Y, Label::X]), &w).unwrap(), 1);
        let toy = TriodeNetwork::toy();
        let xy = a(&[Label::X, Label::Y]);
        assert_eq!(wire_error(&xy, &toy.wires()[0]).unwrap(), 1);
        assert_eq!(wire_error(&xy, &toy.wires()[2]).unwrap(), 0);
    }

    #[test]
    fn toy_total_error() {
        let toy = TriodeNetwork::toy();
        assert_eq!(total_error(&a(&[Label::X, Label::X]), &toy).unwrap(), 0);
        assert_eq!(total_error(&a(&[Label::X, Label::Y]), &toy).unwrap(), 2);
        assert!(matches!(
            total_error(&a(&[Label::X]), &toy),
            Err(Error::LengthMismatch { .. })
        ));
        let empty = TriodeNetwork::new(3, vec![]).unwrap();
        assert_eq!(
            total_error(&a(&[Label::X, Label::Y, Label::Sing]), &empty).unwrap(),
            0
        );
    }

    #[test]
    fn wire_rejects_self_loop_and_duplicates() {
        let r = QubitRef::new(0, Axis::X);
        assert!(Wire::new(r, r).is_err());
        let w1 = Wire::new(QubitRef::new(1, Axis::Y), r).unwrap();
        let w2 = Wire::new(r, QubitRef::new(1, Axis::Y)).unwrap();
        assert_eq!(w1, w2);
        assert_eq!(w1.a(), r);
        assert!(TriodeNetwork::new(2, vec![w1, w2]).is_err());
        assert!(TriodeNetwork::new(1, vec![w1]).is_err());
    }

    #[test]
    fn toy_solutions() {
        let toy = TriodeNetwork::toy();
        let tri = enumerate_solutions(&toy, Model::Triode).unwrap();
        let names: Vec<_> = tri.iter().map(|s| s.label_string()).collect();
        assert_eq!(names, ["XX", "YY", "ZZ"]);
        let equ = enumerate_solutions(&toy, Model::Equ).unwrap();
        let names: Vec<_> = equ.iter().map(|s| s.label_string()).collect();
        assert_eq!(names, ["XX", "YY", "ZZ", "SingSing"]);
    }

    #[test]
    fn single_free_triode_has_four_equ_rows() {
        let net = TriodeNetwork::new(1, vec![]).unwrap();
        assert_eq!(enumerate_solutions(&net, Model::Equ).unwrap().len(), 4);
        assert_eq!(enumerate_solutions(&net, Model::Triode).unwrap().len(), 3);
    }

    #[test]
    fn enumeration_cap_refuses() {
        let net = TriodeNetwork::new(11, vec![]).unwrap();
        let err = enumerate_solutions(&net, Model::Equ).unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                what: "solution enumeration",
                requested: 11,
                cap: 10
            }
        );
        assert!(err.is_cap_refusal());
    }

    #[test]
    fn zero_triodes_has_empty_solution() {
        let net = TriodeNetwork::new(0, vec![]).unwrap();
        let sols = enumerate_solutions(&net, Model::Triode).unwrap();
        assert_eq!(sols, vec![Assignment::new(vec![])]);
    }

    #[test]
    fn label_strings_round_trip() {
        let s = a(&[Label::X, Label::Sing, Label::Z, Label::Sing]);
        assert_eq!(s.label_string(), "XSingZSing");
        assert_eq!(Assignment::parse_label_string("XSingZSing").unwrap(), s);
        assert!(Assignment::parse_label_string("XQ").is_err());
    }

    #[test]
    fn triple_sums_match_relations() {
        for l in Label::TRIPLET {
            assert_eq!(l.triple().iter().sum::<u8>(), 1);
        }
        for l in Label::ALL {
            assert_eq!(l.triple().iter().sum::<u8>() % 2, 1);
        }
    }
}
