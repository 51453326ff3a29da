use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Space, SpaceTag};
use crate::network::Label;
use crate::{Error, Result};

/// Amplitudes below this magnitude are omitted from dumps.
pub const DUMP_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    space: Space,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(space: Space, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("state has non-finite amplitudes"));
        }
        Ok(StateVector { space, amps })
    }

    pub fn zeros(space: Space) -> Self {
        StateVector {
            space,
            amps: vec![Complex64::new(0.0, 0.0); space.dim()],
        }
    }

    pub fn basis(space: Space, labels: &[Label]) -> Result<Self> {
        let mut v = Self::zeros(space);
        let i = space.index_of(labels)?;
        v.amps[i] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Scales to unit norm and returns the previous norm. A zero state is
    /// left untouched.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            let k = n.recip();
            self.amps.iter_mut().for_each(|a| *a *= k);
        }
        n
    }

    pub fn scale(&mut self, k: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= k);
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        other.expect_space(self.space)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        other.expect_space(self.space)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub(crate) fn expect_space(&self, space: Space) -> Result<()> {
        if self.space == space {
            Ok(())
        } else if self.space.triodes != space.triodes {
            Err(Error::LengthMismatch {
                expected: space.triodes,
                got: self.space.triodes,
            })
        } else {
            Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: self.space.dim(),
            })
        }
    }

    /// One `index,label,re,im` line per amplitude above [`DUMP_THRESHOLD`].
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() > DUMP_THRESHOLD {
                let _ = writeln!(out, "{i},{},{},{}", self.space.label_string(i), a.re, a.im);
            }
        }
        out
    }
}

fn physical_to_comparison(triodes: usize, mut index: usize) -> usize {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..triodes {
        out += (index % 3) * place;
        index /= 3;
        place *= 4;
    }
    out
}

/// Isometric inclusion of the physical space into the comparison space.
pub fn embed(state: &StateVector) -> Result<StateVector> {
    if state.space.tag != SpaceTag::Physical {
        return Err(Error::invalid("embed expects a physical state"));
    }
    let t = state.space.triodes;
    let mut out = StateVector::zeros(Space::comparison(t));
    for (i, a) in state.amps.iter().enumerate() {
        out.amps[physical_to_comparison(t, i)] = *a;
    }
    Ok(out)
}

/// Drops every singlet-containing amplitude. Returns the physical state and
/// the removed squared norm; no renormalization.
pub fn restrict(state: &StateVector) -> Result<(StateVector, f64)> {
    if state.space.tag != SpaceTag::Comparison {
        return Err(Error::invalid("restrict expects a comparison state"));
    }
    let t = state.space.triodes;
    let phys = Space::physical(t);
    let mut out = StateVector::zeros(phys);
    let total = state.norm_sqr();
    for (i, slot) in out.amps.iter_mut().enumerate() {
        *slot = state.amps[physical_to_comparison(t, i)];
    }
    let kept = out.norm_sqr();
    Ok((out, (total - kept).max(0.0)))
}

/// Zeroes singlet-containing amplitudes in place (the symmetrizer `P`) and
/// returns the removed squared norm.
pub fn project_in_place(state: &mut StateVector, singlet_mask: &[bool]) -> f64 {
    let mut removed = 0.0;
    for (a, &drop) in state.amps.iter_mut().zip(singlet_mask) {
        if drop {
            removed += a.norm_sqr();
            *a = Complex64::new(0.0, 0.0);
        }
    }
    removed
}
