//! Matrix-free operators: a diagonal in the label basis plus one small
//! dense block per triode acting on that triode's factor.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::par::Execution;
use crate::statespace::{Space, SpaceTag, StateVector, EXPLICIT_CAP};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dimensions at or above this are applied in parallel chunks.
const PAR_THRESHOLD: usize = 4096;
const PAR_CHUNK: usize = 1024;

/// A field coupling `B·σ(τ, β)` with the energy scale already folded into
/// `field`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteCoupling {
    pub triode: usize,
    pub beta: u8,
    pub field: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
struct LocalTerm {
    triode: usize,
    stride: usize,
    /// Row-major `d×d` block.
    block: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorHandle {
    space: Space,
    diagonal: Option<Arc<[Complex64]>>,
    locals: Vec<LocalTerm>,
    couplings: Vec<SiteCoupling>,
    hermitian: bool,
}

impl OperatorHandle {
    pub fn zero(space: Space) -> Self {
        OperatorHandle {
            space,
            diagonal: None,
            locals: Vec::new(),
            couplings: Vec::new(),
            hermitian: true,
        }
    }

    pub fn diagonal(space: Space, diag: Vec<Complex64>, hermitian: bool) -> Result<Self> {
        if diag.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: diag.len(),
            });
        }
        Ok(OperatorHandle {
            space,
            diagonal: Some(diag.into()),
            locals: Vec::new(),
            couplings: Vec::new(),
            hermitian,
        })
    }

    /// Adds `block` (row-major, one triode's local dimension) acting on
    /// `triode`; blocks on the same triode are summed.
    pub fn with_local(
        mut self,
        triode: usize,
        block: Vec<Complex64>,
        hermitian: bool,
    ) -> Result<Self> {
        let d = self.space.radix();
        if triode >= self.space.triodes || block.len() != d * d {
            return Err(Error::invalid(format!(
                "local block for triode {triode} must be {d}x{d} within {} triodes",
                self.space.triodes
            )));
        }
        self.hermitian &= hermitian;
        match self.locals.iter_mut().find(|l| l.triode == triode) {
            Some(l) => l.block.iter_mut().zip(&block).for_each(|(a, b)| *a += b),
            None => {
                self.locals.push(LocalTerm {
                    triode,
                    stride: self.space.stride(triode),
                    block,
                });
                self.locals.sort_by_key(|l| l.triode);
            }
        }
        Ok(self)
    }

    pub(crate) fn record_coupling(&mut self, c: SiteCoupling) {
        self.couplings.push(c);
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn diagonal_entries(&self) -> Option<&[Complex64]> {
        self.diagonal.as_deref()
    }

    pub fn couplings(&self) -> &[SiteCoupling] {
        &self.couplings
    }

    /// Local block on `triode`, if any.
    pub fn local_block(&self, triode: usize) -> Option<&[Complex64]> {
        self.locals
            .iter()
            .find(|l| l.triode == triode)
            .map(|l| l.block.as_slice())
    }

    pub fn has_locals(&self) -> bool {
        !self.locals.is_empty()
    }

    fn same_space(&self, other: &OperatorHandle) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "operator spaces differ: {:?} vs {:?}",
                self.space, other.space
            )))
        }
    }

    pub fn add(&self, other: &OperatorHandle) -> Result<OperatorHandle> {
        self.same_space(other)?;
        let diagonal = match (&self.diagonal, &other.diagonal) {
            (Some(a), Some(b)) => Some(a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()),
            (Some(a), None) => Some(Arc::clone(a)),
            (None, Some(b)) => Some(Arc::clone(b)),
            (None, None) => None,
        };
        let mut out = OperatorHandle {
            space: self.space,
            diagonal,
            locals: self.locals.clone(),
            couplings: self.couplings.clone(),
            hermitian: self.hermitian && other.hermitian,
        };
        for l in &other.locals {
            out = out.with_local(l.triode, l.block.clone(), true)?;
        }
        out.couplings.extend_from_slice(&other.couplings);
        Ok(out)
    }

    pub fn scaled(&self, k: Complex64) -> OperatorHandle {
        OperatorHandle {
            space: self.space,
            diagonal: self
                .diagonal
                .as_ref()
                .map(|d| d.iter().map(|x| x * k).collect()),
            locals: self
                .locals
                .iter()
                .map(|l| LocalTerm {
                    block: l.block.iter().map(|x| x * k).collect(),
                    ..l.clone()
                })
                .collect(),
            couplings: self.couplings.clone(),
            hermitian: self.hermitian && k.im == 0.0,
        }
    }

    /// Upper bound on the operator 2-norm.
    pub fn norm_bound(&self) -> f64 {
        let d = self.space.radix();
        let diag = self
            .diagonal
            .as_ref()
            .map(|v| v.iter().map(|x| x.norm()).fold(0.0, f64::max))
            .unwrap_or(0.0);
        let local: f64 = self
            .locals
            .iter()
            .map(|l| {
                (0..d)
                    .map(|r| {
                        l.block[r * d..(r + 1) * d]
                            .iter()
                            .map(|x| x.norm())
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max)
                    .max(
                        (0..d)
                            .map(|c| (0..d).map(|r| l.block[r * d + c].norm()).sum::<f64>())
                            .fold(0.0, f64::max),
                    )
            })
            .sum();
        diag + local
    }

    #[inline]
    fn entry(&self, x: &[Complex64], i: usize) -> Complex64 {
        let d = self.space.radix();
        let mut acc = match &self.diagonal {
            Some(diag) => diag[i] * x[i],
            None => ZERO,
        };
        for l in &self.locals {
            let digit = (i / l.stride) % d;
            let base = i - digit * l.stride;
            let row = &l.block[digit * d..(digit + 1) * d];
            for (k, m) in row.iter().enumerate() {
                acc += m * x[base + k * l.stride];
            }
        }
        acc
    }

    /// `out = A x` on raw amplitude slices.
    pub fn apply_slice(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.space.dim());
        debug_assert_eq!(out.len(), self.space.dim());
        let exec = if x.len() >= PAR_THRESHOLD {
            Execution::Parallel
        } else {
            Execution::Sequential
        };
        exec.fill_chunks(out, PAR_CHUNK, |i, slot| *slot = self.entry(x, i));
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        state.expect_space(self.space)?;
        let mut out = StateVector::zeros(self.space);
        self.apply_slice(state.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// Explicit matrix; only for small spaces.
    pub fn dense(&self) -> Result<DMatrix<Complex64>> {
        if self.space.triodes > EXPLICIT_CAP {
            return Err(Error::CapExceeded {
                what: "explicit matrix",
                requested: self.space.triodes,
                cap: EXPLICIT_CAP,
            });
        }
        let n = self.space.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![ZERO; n];
        let mut col = vec![ZERO; n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            self.apply_slice(&e, &mut col);
            m.set_column(j, &nalgebra::DVector::from_column_slice(&col));
            e[j] = ZERO;
        }
        Ok(m)
    }

    /// Largest `|⟨φ|Aψ⟩ − conj(⟨ψ|Aφ⟩)|` over random probe pairs.
    pub fn hermiticity_defect<R: Rng>(&self, probes: usize, rng: &mut R) -> f64 {
        let n = self.space.dim();
        let mut rand_state = || {
            let v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            StateVector::new(self.space, v).expect("dim")
        };
        let mut worst: f64 = 0.0;
        for _ in 0..probes {
            let (phi, psi) = (rand_state(), rand_state());
            let a = phi.inner(&self.apply(&psi).unwrap()).unwrap();
            let b = psi.inner(&self.apply(&phi).unwrap()).unwrap();
            worst = worst.max((a - b.conj()).norm());
        }
        worst
    }

    /// `P A P` restricted to the physical space: triplet blocks of every
    /// local term and the singlet-free part of the diagonal.
    pub fn symmetrized(&self) -> Result<OperatorHandle> {
        if self.space.tag != SpaceTag::Comparison {
            return Err(Error::invalid(
                "symmetrized expects a comparison-space operator",
            ));
        }
        let t = self.space.triodes;
        let phys = Space::physical(t);
        let diagonal = self.diagonal.as_ref().map(|d| {
            (0..phys.dim())
                .map(|i| {
                    let labels = phys.labels_of(i);
                    d[self.space.index_of(&labels).expect("triplet labels")]
                })
                .collect()
        });
        let mut out = OperatorHandle {
            space: phys,
            diagonal,
            locals: Vec::new(),
            couplings: self.couplings.clone(),
            hermitian: self.hermitian,
        };
        for l in &self.locals {
            let block = (0..3)
                .flat_map(|r| (0..3).map(move |c| (r, c)))
                .map(|(r, c)| l.block[r * 4 + c])
                .collect();
            out = out.with_local(l.triode, block, true)?;
        }
        Ok(out)
    }
}
