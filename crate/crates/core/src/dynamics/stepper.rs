//! Single-step propagators for a generator frozen over the step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::OperatorHandle;
use crate::statespace::StateVector;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stepper {
    /// `ψ ← (1 − iG dt) ψ`.
    Euler,
    /// `ψ ← e^{−iG dt} ψ`, Taylor series with scaling.
    #[default]
    Expm,
}

/// Largest `‖G‖·h` per Taylor sub-step.
const SUBSTEP_NORM: f64 = 0.5;
const MAX_TERMS: usize = 40;

fn sum_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.re.abs() + z.im.abs()).sum()
}

/// Reusable buffers for repeated steps on one space.
#[derive(Debug, Clone, Default)]
pub struct Propagator {
    term: Vec<Complex64>,
    next: Vec<Complex64>,
}

impl Propagator {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure(&mut self, n: usize) {
        self.term.resize(n, Complex64::new(0.0, 0.0));
        self.next.resize(n, Complex64::new(0.0, 0.0));
    }

    pub fn step(&mut self, psi: &mut [Complex64], g: &OperatorHandle, dt: f64, stepper: Stepper) {
        self.ensure(psi.len());
        match stepper {
            Stepper::Euler => {
                g.apply_slice(psi, &mut self.next);
                let k = Complex64::new(0.0, -dt);
                for (p, gp) in psi.iter_mut().zip(&self.next) {
                    *p += k * gp;
                }
            }
            Stepper::Expm => self.expm(psi, g, dt),
        }
    }

    fn expm(&mut self, psi: &mut [Complex64], g: &OperatorHandle, dt: f64) {
        let scale = g.norm_bound() * dt.abs();
        if scale == 0.0 {
            return;
        }
        let substeps = (scale / SUBSTEP_NORM).ceil().max(1.0) as usize;
        let h = dt / substeps as f64;
        for _ in 0..substeps {
            self.term.copy_from_slice(psi);
            for k in 1..=MAX_TERMS {
                g.apply_slice(&self.term, &mut self.next);
                let c = Complex64::new(0.0, -h / k as f64);
                for (t, n) in self.term.iter_mut().zip(&self.next) {
                    *t = c * n;
                }
                for (p, t) in psi.iter_mut().zip(&self.term) {
                    *p += t;
                }
                if sum_abs(&self.term) <= f64::EPSILON * 0.25 * sum_abs(psi) {
                    break;
                }
            }
        }
    }
}

/// One step of `ψ` under `G` (not renormalized).
pub fn step(
    state: &StateVector,
    g: &OperatorHandle,
    dt: f64,
    stepper: Stepper,
) -> Result<StateVector> {
    state.expect_space(g.space())?;
    let mut out = state.clone();
    Propagator::new().step(out.amplitudes_mut(), g, dt, stepper);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{
        comparison_coupling, wire_hamiltonian, FieldProcess, HamiltonianParams, NoiseParams,
    };
    use crate::network::TriodeNetwork;
    use crate::statespace::{embed, initial_state, Space};
    use nalgebra::DMatrix;

    fn random_generator(seed: u64) -> OperatorHandle {
        let toy = TriodeNetwork::toy();
        let hw =
            wire_hamiltonian(&toy, &HamiltonianParams::default(), Space::comparison(2)).unwrap();
        let f = FieldProcess::from_seed(2, NoiseParams::default(), seed).unwrap();
        hw.add(&comparison_coupling(f.sample(), 1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn zero_generator_is_identity() {
        let psi = embed(&initial_state(&TriodeNetwork::toy(), 1)).unwrap();
        let g = OperatorHandle::zero(psi.space());
        for s in [Stepper::Euler, Stepper::Expm] {
            assert_eq!(step(&psi, &g, 0.3, s).unwrap(), psi);
        }
    }

    #[test]
    fn expm_preserves_norm() {
        let g = random_generator(3);
        let psi = embed(&initial_state(&TriodeNetwork::toy(), 2)).unwrap();
        let out = step(&psi, &g, 2.7, Stepper::Expm).unwrap();
        assert!((out.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn eigenstate_acquires_phase() {
        let g = random_generator(4);
        let m = g.dense().unwrap();
        let eig = m.clone().symmetric_eigen();
        let (e, v) = (eig.eigenvalues[5], eig.eigenvectors.column(5).into_owned());
        let psi = StateVector::new(g.space(), v.iter().copied().collect()).unwrap();
        let t = 3.1;
        let out = step(&psi, &g, t, Stepper::Expm).unwrap();
        let expect = Complex64::from_polar(1.0, -e * t);
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - expect * b).norm() <= 1e-10);
        }
        let fidelity = psi.inner(&out).unwrap().norm();
        assert!((fidelity - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn expm_matches_dense_exponential() {
        let g = random_generator(6).scaled(Complex64::new(1.0, -0.1));
        let psi = embed(&initial_state(&TriodeNetwork::toy(), 3)).unwrap();
        let dt = 0.8;
        let m: DMatrix<Complex64> = g.dense().unwrap() * Complex64::new(0.0, -dt);
        let expect = m.exp() * nalgebra::DVector::from_column_slice(psi.amplitudes());
        let out = step(&psi, &g, dt, Stepper::Expm).unwrap();
        for (a, b) in out.amplitudes().iter().zip(expect.iter()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn euler_error_is_second_order() {
        let g = random_generator(8);
        let psi = embed(&initial_state(&TriodeNetwork::toy(), 5)).unwrap();
        let err = |dt: f64| {
            let a = step(&psi, &g, dt, Stepper::Euler).unwrap();
            let b = step(&psi, &g, dt, Stepper::Expm).unwrap();
            a.distance(&b).unwrap()
        };
        let ratios: Vec<f64> = [0.02, 0.01, 0.005]
            .windows(2)
            .map(|w| err(w[0]) / err(w[1]))
            .collect();
        for r in ratios {
            assert!((r - 4.0).abs() < 0.2, "ratio {r}");
        }
    }
}
