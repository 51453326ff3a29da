//! Hilbert spaces of `T` spin pairs.
//!
//! The comparison space is the unsymmetrized product (`4^T`, labels
//! `X, Y, Z, Sing` per pair); the physical space keeps only the triplet
//! labels (`3^T`). Basis states are indexed mixed-radix with triode 0 most
//! significant, in the frame of [`pair::frame`].

pub mod pair;
mod state;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::network::{Label, TriodeNetwork};
use crate::{Error, Result};

pub use state::{embed, project_in_place, restrict, StateVector};

/// Largest triode count for which explicit dense matrices are built.
pub const EXPLICIT_CAP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTag {
    Physical,
    Comparison,
}

impl SpaceTag {
    pub fn radix(self) -> usize {
        match self {
            SpaceTag::Physical => 3,
            SpaceTag::Comparison => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    pub tag: SpaceTag,
    pub triodes: usize,
}

impl Space {
    pub fn physical(triodes: usize) -> Self {
        Space {
            tag: SpaceTag::Physical,
            triodes,
        }
    }

    pub fn comparison(triodes: usize) -> Self {
        Space {
            tag: SpaceTag::Comparison,
            triodes,
        }
    }

    pub fn radix(&self) -> usize {
        self.tag.radix()
    }

    pub fn dim(&self) -> usize {
        self.radix().pow(self.triodes as u32)
    }

    /// Index stride of triode `t`'s digit.
    pub fn stride(&self, t: usize) -> usize {
        self.radix().pow((self.triodes - 1 - t) as u32)
    }

    pub fn digit(&self, index: usize, t: usize) -> usize {
        (index / self.stride(t)) % self.radix()
    }

    pub fn labels_of(&self, mut index: usize) -> Vec<Label> {
        let r = self.radix();
        let mut out = vec![Label::X; self.triodes];
        for slot in out.iter_mut().rev() {
            *slot = Label::from_index(index % r);
            index /= r;
        }
        out
    }

    pub fn index_of(&self, labels: &[Label]) -> Result<usize> {
        if labels.len() != self.triodes {
            return Err(Error::LengthMismatch {
                expected: self.triodes,
                got: labels.len(),
            });
        }
        let r = self.radix();
        labels.iter().try_fold(0usize, |acc, &l| {
            if l.index() >= r {
                Err(Error::invalid(format!(
                    "label {l} not in {:?} space",
                    self.tag
                )))
            } else {
                Ok(acc * r + l.index())
            }
        })
    }

    pub fn label_string(&self, index: usize) -> String {
        self.labels_of(index).iter().map(|l| l.as_str()).collect()
    }
}

/// S: all triplet, all wires satisfied. F: all triplet, some wire
/// frustrated. V: at least one singlet factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    S,
    F,
    V,
}

pub fn classify(labels: &[Label], network: &TriodeNetwork) -> ClassTag {
    if labels.contains(&Label::Sing) {
        ClassTag::V
    } else if network.error_of(labels) == 0 {
        ClassTag::S
    } else {
        ClassTag::F
    }
}

/// Weights of the three classes; they sum to the squared norm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassWeights {
    pub s: f64,
    pub f: f64,
    pub v: f64,
}

impl ClassWeights {
    pub fn total(&self) -> f64 {
        self.s + self.f + self.v
    }

    pub fn scaled(&self, k: f64) -> Self {
        ClassWeights {
            s: self.s * k,
            f: self.f * k,
            v: self.v * k,
        }
    }
}

/// Precomputed class of every basis label of one space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassTable {
    space: Space,
    tags: Vec<ClassTag>,
}

impl ClassTable {
    pub fn new(network: &TriodeNetwork, space: Space) -> Result<Self> {
        if space.triodes != network.triode_count() {
            return Err(Error::LengthMismatch {
                expected: network.triode_count(),
                got: space.triodes,
            });
        }
        let tags = (0..space.dim())
            .map(|i| classify(&space.labels_of(i), network))
            .collect();
        Ok(ClassTable { space, tags })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn tags(&self) -> &[ClassTag] {
        &self.tags
    }

    pub fn weights(&self, state: &StateVector) -> Result<ClassWeights> {
        state.expect_space(self.space)?;
        let mut w = ClassWeights::default();
        for (a, tag) in state.amplitudes().iter().zip(&self.tags) {
            let p = a.norm_sqr();
            match tag {
                ClassTag::S => w.s += p,
                ClassTag::F => w.f += p,
                ClassTag::V => w.v += p,
            }
        }
        Ok(w)
    }
}

/// `(p_S, p_F, p_V)` of a state; they sum to `‖ψ‖²`.
pub fn probabilities(state: &StateVector, network: &TriodeNetwork) -> Result<ClassWeights> {
    ClassTable::new(network, state.space())?.weights(state)
}

/// Uniform-magnitude physical state with independent random phases.
pub fn initial_state(network: &TriodeNetwork, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    initial_state_from(network.triode_count(), &mut rng)
}

pub fn initial_state_from<R: Rng>(triodes: usize, rng: &mut R) -> StateVector {
    let space = Space::physical(triodes);
    let dim = space.dim();
    let mag = (dim as f64).recip().sqrt();
    let amps = (0..dim)
        .map(|_| Complex64::from_polar(mag, rng.random::<f64>() * std::f64::consts::TAU))
        .collect();
    StateVector::new(space, amps).expect("dimension matches")
}

fn check_explicit(triodes: usize) -> Result<()> {
    if triodes > EXPLICIT_CAP {
        Err(Error::CapExceeded {
            what: "explicit matrix",
            requested: triodes,
            cap: EXPLICIT_CAP,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Explicit tensor power of `P₁₂`, built in the product basis and rotated
/// into the frame, on the comparison space.
pub fn symmetrizer(triodes: usize) -> Result<DMatrix<Complex64>> {
    check_explicit(triodes)?;
    let p = pair::to_frame(&pair::pair_symmetrizer());
    let p = DMatrix::from_fn(4, 4, |r, c| p[(r, c)]);
    Ok((0..triodes).fold(DMatrix::identity(1, 1), |acc, _| kron(&acc, &p)))
}

/// Explicit `X₁₂` acting on pair `t` of `triodes`.
pub fn exchange_on(triodes: usize, t: usize) -> Result<DMatrix<Complex64>> {
    check_explicit(triodes)?;
    let x = pair::to_frame(&pair::exchange_operator());
    let x = DMatrix::from_fn(4, 4, |r, c| x[(r, c)]);
    let id = DMatrix::identity(4, 4);
    Ok((0..triodes).fold(DMatrix::identity(1, 1), |acc, k| {
        kron(&acc, if k == t { &x } else { &id })
    }))
}

/// Explicit `q_axis` of pair `t`, in the frame.
pub fn qubit_on(
    triodes: usize,
    t: usize,
    axis: crate::network::Axis,
) -> Result<DMatrix<Complex64>> {
    check_explicit(triodes)?;
    let q = pair::to_frame(&pair::qubit_observable(axis));
    let q = DMatrix::from_fn(4, 4, |r, c| q[(r, c)]);
    let id = DMatrix::identity(4, 4);
    Ok((0..triodes).fold(DMatrix::identity(1, 1), |acc, k| {
        kron(&acc, if k == t { &q } else { &id })
    }))
}
