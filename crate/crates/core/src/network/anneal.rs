//! Classical Metropolis annealing over assignments, used as a baseline for
//! the quantum runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Assignment, Label, Model, TriodeNetwork};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub g: f64,
    pub g_prime: f64,
    pub trap_free: bool,
}

impl Default for AnnealParams {
    fn default() -> Self {
        AnnealParams {
            g: 1.0,
            g_prime: 0.0,
            trap_free: false,
        }
    }
}

/// Energy of a label configuration: `g ε_w`, or with the trap-free term
/// `g ε_w + g' ε_w Σ_τ Σ_axis (1 - q)^2`.
pub fn label_energy(
    network: &TriodeNetwork,
    labels: &[Label],
    g: f64,
    g_prime: f64,
    trap_free: bool,
) -> f64 {
    let eps = network.error_of(labels) as f64;
    if !trap_free || eps == 0.0 {
        return g * eps;
    }
    let zeros: u32 = labels
        .iter()
        .map(|l| l.triple().iter().map(|&q| u32::from(q == 0)).sum::<u32>())
        .sum();
    g * eps + g_prime * eps * zeros as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TemperatureProfile {
    Constant { temperature: f64 },
    Linear { start: f64, end: f64 },
    Geometric { start: f64, end: f64 },
}

impl TemperatureProfile {
    fn at(&self, step: usize, steps: usize) -> f64 {
        let frac = if steps <= 1 {
            0.0
        } else {
            step as f64 / (steps - 1) as f64
        };
        match *self {
            TemperatureProfile::Constant { temperature } => temperature,
            TemperatureProfile::Linear { start, end } => start + (end - start) * frac,
            TemperatureProfile::Geometric { start, end } => start * (end / start).powf(frac),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TemperatureProfile::Constant { temperature } => temperature >= 0.0,
            TemperatureProfile::Linear { start, end } => start >= 0.0 && end >= 0.0,
            TemperatureProfile::Geometric { start, end } => start > 0.0 && end > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("bad temperature profile {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub steps: usize,
    pub temperature: TemperatureProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTrajectory {
    /// Energy before the first move and after each move.
    pub energies: Vec<f64>,
    pub temperatures: Vec<f64>,
    /// Index into `energies` of the first zero-energy configuration.
    pub first_hit: Option<usize>,
    pub accepted: usize,
    pub final_assignment: Assignment,
}

/// Metropolis walk with single-triode relabelling moves.
pub fn classical_anneal(
    network: &TriodeNetwork,
    model: Model,
    params: &AnnealParams,
    schedule: &AnnealSchedule,
    initial: Option<&Assignment>,
    seed: u64,
) -> Result<ClassicalTrajectory> {
    schedule.temperature.validate()?;
    if params.g <= 0.0 || params.g_prime < 0.0 {
        return Err(Error::invalid("anneal needs g > 0 and g' >= 0"));
    }
    let t = network.triode_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = model.labels();
    let mut current = match initial {
        Some(a) => {
            if a.len() != t {
                return Err(Error::LengthMismatch {
                    expected: t,
                    got: a.len(),
                });
            }
            if !a.fits(model) {
                return Err(Error::invalid(format!(
                    "initial {a} uses labels outside {model:?}"
                )));
            }
            a.0.clone()
        }
        None => (0..t)
            .map(|_| labels[rng.random_range(0..labels.len())])
            .collect(),
    };
    let energy = |l: &[Label]| label_energy(network, l, params.g, params.g_prime, params.trap_free);
    let mut e = energy(&current);
    let mut energies = Vec::with_capacity(schedule.steps + 1);
    let mut temperatures = Vec::with_capacity(schedule.steps);
    energies.push(e);
    let mut first_hit = (e == 0.0).then_some(0);
    let mut accepted = 0;
    for step in 0..schedule.steps {
        let temp = schedule.temperature.at(step, schedule.steps);
        temperatures.push(temp);
        if t > 0 {
            let tri = rng.random_range(0..t);
            let old = current[tri];
            let mut pick = rng.random_range(0..labels.len() - 1);
            if labels[pick] == old {
                pick = labels.len() - 1;
            }
            current[tri] = labels[pick];
            let e_new = energy(&current);
            let de = e_new - e;
            // always draw so the stream does not depend on the branch taken
            let u: f64 = rng.random();
            let accept = de <= 0.0 || (temp > 0.0 && u < (-de / temp).exp());
            if accept {
                e = e_new;
                accepted += 1;
            } else {
                current[tri] = old;
            }
        }
        energies.push(e);
        if first_hit.is_none() && e == 0.0 {
            first_hit = Some(step + 1);
        }
    }
    Ok(ClassicalTrajectory {
        energies,
        temperatures,
        first_hit,
        accepted,
        final_assignment: Assignment(current),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(steps: usize) -> AnnealSchedule {
        AnnealSchedule {
            steps,
            temperature: TemperatureProfile::Geometric {
                start: 5.0,
                end: 0.05,
            },
        }
    }

    #[test]
    fn trap_free_energy_on_triode_labels_is_rescaled() {
        let toy = TriodeNetwork::toy();
        let l = [Label::X, Label::Y];
        assert_eq!(label_energy(&toy, &l, 1.0, 0.0, false), 2.0);
        assert_eq!(
            label_energy(&toy, &l, 1.0, 0.5, true),
            (1.0 + 4.0 * 0.5) * 2.0
        );
    }

    #[test]
    fn toy_equ_trap_free_reaches_ground() {
        let toy = TriodeNetwork::toy();
        let p = AnnealParams {
            g: 1.0,
            g_prime: 100.0,
            trap_free: true,
        };
        for seed in 0..20 {
            let tr = classical_anneal(&toy, Model::Equ, &p, &schedule(400), None, seed).unwrap();
            assert!(tr.first_hit.is_some(), "seed {seed}");
            assert_eq!(tr.energies[tr.first_hit.unwrap()], 0.0);
        }
    }

    #[test]
    fn zero_temperature_keeps_ground() {
        let toy = TriodeNetwork::toy();
        let start = Assignment::uniform(Label::Y, 2);
        let s = AnnealSchedule {
            steps: 200,
            temperature: TemperatureProfile::Constant { temperature: 0.0 },
        };
        let tr = classical_anneal(
            &toy,
            Model::Triode,
            &AnnealParams::default(),
            &s,
            Some(&start),
            3,
        )
        .unwrap();
        assert!(tr.energies.iter().all(|&e| e == 0.0));
        assert_eq!(tr.first_hit, Some(0));
    }

    #[test]
    fn same_seed_same_walk() {
        let toy = TriodeNetwork::toy();
        let p = AnnealParams::default();
        let a = classical_anneal(&toy, Model::Equ, &p, &schedule(100), None, 11).unwrap();
        let b = classical_anneal(&toy, Model::Equ, &p, &schedule(100), None, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn triode_walk_never_uses_singlet() {
        let toy = TriodeNetwork::toy();
        let tr = classical_anneal(
            &toy,
            Model::Triode,
            &AnnealParams::default(),
            &schedule(300),
            None,
            5,
        )
        .unwrap();
        assert!(tr.final_assignment.fits(Model::Triode));
    }
}
