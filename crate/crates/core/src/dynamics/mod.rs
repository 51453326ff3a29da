//! Time evolution: steppers, the three run kinds, ensembles and the
//! projection-interval convergence study.

mod ensemble;
mod stepper;
mod zeno;

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::{
    actual_coupling, comparison_coupling, wire_hamiltonian, FieldProcess, HamiltonianParams,
    NoiseParams,
};
use crate::network::{Label, TriodeNetwork};
use crate::statespace::{
    embed, initial_state_from, project_in_place, ClassTable, ClassWeights, Space, SpaceTag,
    StateVector,
};
use crate::{Error, Result};

pub use ensemble::{run_ensemble, run_ensemble_with, EnsembleResult, SeriesStats};
pub use stepper::{step, Propagator, Stepper};
pub use zeno::{
    frozen_generator, frozen_leak, project_frozen, spectral_norm, symmetrized_frozen,
    zeno_convergence_study, ZenoPoint,
};

/// Largest triode count accepted by the run engines (`4^7` amplitudes).
pub const DYNAMICS_CAP: usize = 7;

/// Relative slack when checking that intervals divide evenly.
const DIVISIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunKind {
    Comparison,
    Projected,
    Symmetrized,
}

impl RunKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RunKind::Comparison => "comparison",
            RunKind::Projected => "projected",
            RunKind::Symmetrized => "symmetrized",
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleParams {
    /// Inner step; the noise is frozen across it.
    pub dt: f64,
    /// Projection interval `Δt`, a multiple of `dt`.
    pub projection_interval: f64,
    /// Total time `ΔT`, a multiple of `Δt`.
    pub total_time: f64,
    #[serde(default = "default_true")]
    pub renormalize: bool,
    #[serde(default)]
    pub stepper: Stepper,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Permits `dt > τ_c/5`.
    #[serde(default)]
    pub allow_coarse_noise: bool,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams {
            dt: 1.0,
            projection_interval: 5.0,
            total_time: 300.0,
            renormalize: true,
            stepper: Stepper::Expm,
            snapshot_times: Vec::new(),
            allow_coarse_noise: false,
        }
    }
}

fn ratio(big: f64, small: f64, what: &str) -> Result<usize> {
    let r = big / small;
    let n = r.round();
    if n < 1.0 || (r - n).abs() > DIVISIBILITY_TOL * n {
        return Err(Error::invalid(format!(
            "{what} must be a positive multiple ({big} / {small} = {r})"
        )));
    }
    Ok(n as usize)
}

impl ScheduleParams {
    /// `(inner steps per interval, intervals)`.
    pub fn counts(&self) -> Result<(usize, usize)> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt must be positive"));
        }
        let per = ratio(self.projection_interval, self.dt, "projection_interval")?;
        let intervals = ratio(self.total_time, self.projection_interval, "total_time")?;
        Ok((per, intervals))
    }

    pub fn validate(&self) -> Result<()> {
        self.counts()?;
        if self
            .snapshot_times
            .iter()
            .any(|t| !(t.is_finite() && *t >= 0.0))
        {
            return Err(Error::invalid(
                "snapshot times must be finite and nonnegative",
            ));
        }
        Ok(())
    }

    /// Refuses inner steps that under-resolve the field correlation time.
    pub fn check_noise_resolution(&self, noise: &NoiseParams) -> Result<()> {
        if self.allow_coarse_noise || noise.amplitude.at(0.0) == 0.0 {
            return Ok(());
        }
        let limit = noise.correlation_time / 5.0;
        if self.dt > limit * (1.0 + DIVISIBILITY_TOL) {
            return Err(Error::invalid(format!(
                "dt = {} exceeds tau_c/5 = {limit}; set allow_coarse_noise to override",
                self.dt
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub weights: ClassWeights,
    /// `⟨H_w⟩` of the normalized state.
    pub energy: f64,
    /// `δ` of the projection event at this time, if any.
    pub removed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionEvent {
    pub t: f64,
    /// Removed fraction `δ` of the pre-projection squared norm.
    pub removed: f64,
    /// Class weights before projection, normalized to unit total.
    pub pre: ClassWeights,
    /// Class weights after projection, normalized to unit total.
    pub post: ClassWeights,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: RunKind,
    pub seed: u64,
    pub samples: Vec<Sample>,
    pub events: Vec<ProjectionEvent>,
    pub final_state: StateVector,
    pub snapshots: Vec<(f64, StateVector)>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn p_s(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.weights.s).collect()
    }

    pub fn p_f(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.weights.f).collect()
    }

    pub fn p_v(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.weights.v).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy).collect()
    }

    pub fn removed(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.removed).collect()
    }

    /// `t,p_S,p_F,p_V,energy,removed_norm`, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,p_S,p_F,p_V,energy,removed_norm\n");
        for s in &self.samples {
            let removed = s.removed.map(|d| d.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.t, s.weights.s, s.weights.f, s.weights.v, s.energy, removed
            );
        }
        out
    }
}

/// Everything a run needs besides the seed.
#[derive(Debug, Clone, Copy)]
pub struct RunSetup<'a> {
    pub network: &'a TriodeNetwork,
    pub hamiltonian: &'a HamiltonianParams,
    pub noise: &'a NoiseParams,
    pub schedule: &'a ScheduleParams,
}

impl<'a> RunSetup<'a> {
    pub fn new(
        network: &'a TriodeNetwork,
        hamiltonian: &'a HamiltonianParams,
        noise: &'a NoiseParams,
        schedule: &'a ScheduleParams,
    ) -> Self {
        RunSetup {
            network,
            hamiltonian,
            noise,
            schedule,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.network.triode_count();
        if t > DYNAMICS_CAP {
            return Err(Error::CapExceeded {
                what: "dynamics triodes",
                requested: t,
                cap: DYNAMICS_CAP,
            });
        }
        self.hamiltonian.validate()?;
        self.noise.validate()?;
        self.schedule.validate()?;
        self.schedule.check_noise_resolution(self.noise)
    }
}

/// Seeded random streams: initial phases and field noise are independent.
fn streams(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let phases = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = ChaCha8Rng::seed_from_u64(seed);
    noise.set_stream(1);
    (phases, noise)
}

fn normalized(w: ClassWeights) -> ClassWeights {
    let total = w.total();
    if total > 0.0 {
        w.scaled(total.recip())
    } else {
        w
    }
}

fn energy_of(state: &StateVector, energies: &[f64]) -> f64 {
    let norm = state.norm_sqr();
    if norm == 0.0 {
        return 0.0;
    }
    let e: f64 = state
        .amplitudes()
        .iter()
        .zip(energies)
        .map(|(a, e)| a.norm_sqr() * e)
        .sum();
    e / norm
}

fn run(setup: RunSetup<'_>, kind: RunKind, seed: u64) -> Result<Trajectory> {
    setup.validate()?;
    let RunSetup {
        network,
        hamiltonian: hp,
        noise,
        schedule,
    } = setup;
    let (per, intervals) = schedule.counts()?;
    let t = network.triode_count();
    let (mut phases, noise_rng) = streams(seed);
    let physical = initial_state_from(t, &mut phases);
    let (space, mut state) = match kind {
        RunKind::Symmetrized => (Space::physical(t), physical),
        _ => (Space::comparison(t), embed(&physical)?),
    };
    let table = ClassTable::new(network, space)?;
    let h_w = wire_hamiltonian(network, hp, space)?;
    let energies: Vec<f64> = h_w
        .diagonal_entries()
        .map(|d| d.iter().map(|z| z.re).collect())
        .unwrap_or_else(|| vec![0.0; space.dim()]);
    let damped = if hp.gamma == 0.0 {
        h_w
    } else {
        h_w.scaled(Complex64::new(1.0, -hp.gamma))
    };
    let singlet: Vec<bool> = (0..space.dim())
        .map(|i| space.labels_of(i).contains(&Label::Sing))
        .collect();
    let mut fields = FieldProcess::new(t, *noise, noise_rng)?;
    let mut prop = Propagator::new();

    let mut samples = Vec::with_capacity(intervals + 1);
    let mut events = Vec::new();
    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = schedule.snapshot_times.clone();
    pending.sort_by(f64::total_cmp);
    pending.reverse();

    samples.push(Sample {
        t: 0.0,
        weights: table.weights(&state)?,
        energy: energy_of(&state, &energies),
        removed: None,
    });
    let tol = schedule.dt * 1e-9;
    while pending.last().is_some_and(|s| *s <= tol) {
        snapshots.push((pending.pop().unwrap_or(0.0), state.clone()));
    }

    for interval in 0..intervals {
        let mut removed = None;
        for k in 0..per {
            let step_index = interval * per + k;
            let h_r = match kind {
                RunKind::Symmetrized => actual_coupling(fields.sample(), hp.g, SpaceTag::Physical)?,
                _ => comparison_coupling(fields.sample(), hp.g)?,
            };
            let g = damped.add(&h_r)?;
            prop.step(state.amplitudes_mut(), &g, schedule.dt, schedule.stepper);
            let time = (step_index + 1) as f64 * schedule.dt;

            if kind == RunKind::Projected && k + 1 == per {
                let raw = table.weights(&state)?;
                let before = raw.total();
                let gone = project_in_place(&mut state, &singlet);
                let delta = if before > 0.0 { gone / before } else { 0.0 };
                let post = normalized(table.weights(&state)?);
                events.push(ProjectionEvent {
                    t: (interval + 1) as f64 * schedule.projection_interval,
                    removed: delta,
                    pre: normalized(raw),
                    post,
                });
                removed = Some(delta);
            }
            if schedule.renormalize {
                let n = state.normalize();
                if n == 0.0 {
                    return Err(Error::invalid("state norm vanished"));
                }
            }
            fields.advance(schedule.dt);
            while pending.last().is_some_and(|s| *s <= time + tol) {
                snapshots.push((pending.pop().unwrap_or(time), state.clone()));
            }
        }
        samples.push(Sample {
            t: (interval + 1) as f64 * schedule.projection_interval,
            weights: table.weights(&state)?,
            energy: energy_of(&state, &energies),
            removed,
        });
    }

    Ok(Trajectory {
        kind,
        seed,
        samples,
        events,
        final_state: state,
        snapshots,
    })
}

/// Evolves `embed(initial_state)` under `G′ = H_w + H_r′(t) − iγH_w`;
/// never projects.
pub fn run_comparison(
    network: &TriodeNetwork,
    hamiltonian: &HamiltonianParams,
    noise: &NoiseParams,
    schedule: &ScheduleParams,
    seed: u64,
) -> Result<Trajectory> {
    run(
        RunSetup::new(network, hamiltonian, noise, schedule),
        RunKind::Comparison,
        seed,
    )
}

/// Same inner evolution as [`run_comparison`], with singlet-containing
/// amplitudes dropped every projection interval.
pub fn run_projected(
    network: &TriodeNetwork,
    hamiltonian: &HamiltonianParams,
    noise: &NoiseParams,
    schedule: &ScheduleParams,
    seed: u64,
) -> Result<Trajectory> {
    run(
        RunSetup::new(network, hamiltonian, noise, schedule),
        RunKind::Projected,
        seed,
    )
}

/// Physical-space evolution under the pair-averaged fields.
pub fn run_symmetrized(
    network: &TriodeNetwork,
    hamiltonian: &HamiltonianParams,
    noise: &NoiseParams,
    schedule: &ScheduleParams,
    seed: u64,
) -> Result<Trajectory> {
    run(
        RunSetup::new(network, hamiltonian, noise, schedule),
        RunKind::Symmetrized,
        seed,
    )
}

pub fn run_kind(setup: RunSetup<'_>, kind: RunKind, seed: u64) -> Result<Trajectory> {
    run(setup, kind, seed)
}

/// The field path a run with `seed` sees, one row per site and inner step:
/// `t,triode,beta,Bx,By,Bz`. Row `t` holds the fields frozen over `[t, t+dt)`.
pub fn field_path_csv(
    triodes: usize,
    noise: &NoiseParams,
    schedule: &ScheduleParams,
    seed: u64,
) -> Result<String> {
    let (per, intervals) = schedule.counts()?;
    let (_, noise_rng) = streams(seed);
    let mut fields = FieldProcess::new(triodes, *noise, noise_rng)?;
    let mut out = String::from("t,triode,beta,Bx,By,Bz\n");
    for step in 0..per * intervals {
        let t = step as f64 * schedule.dt;
        let sample = fields.sample();
        for tr in 0..triodes {
            for beta in [1u8, 2] {
                let [x, y, z] = sample.site(tr, beta);
                let _ = writeln!(out, "{t},{tr},{beta},{x},{y},{z}");
            }
        }
        fields.advance(schedule.dt);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{AmplitudeSchedule, Pairing};

    fn schedule(dt: f64, interval: f64, total: f64) -> ScheduleParams {
        ScheduleParams {
            dt,
            projection_interval: interval,
            total_time: total,
            ..ScheduleParams::default()
        }
    }

    fn noise(b0: f64) -> NoiseParams {
        NoiseParams {
            amplitude: AmplitudeSchedule::Constant { b0 },
            correlation_time: 1.0,
            ..NoiseParams::default()
        }
    }

    #[test]
    fn field_path_matches_the_run_stream() {
        let nz = noise(0.4);
        let s = schedule(0.1, 0.2, 0.4);
        let csv = field_path_csv(2, &nz, &s, 11).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 4 * 4);
        let (_, rng) = streams(11);
        let f = FieldProcess::new(2, nz, rng).unwrap();
        let [x, y, z] = f.sample().site(1, 2);
        assert_eq!(lines[4], format!("0,1,2,{x},{y},{z}"));
        assert_eq!(field_path_csv(2, &nz, &s, 11).unwrap(), csv);
    }

    #[test]
    fn schedule_divisibility() {
        assert_eq!(schedule(0.1, 0.5, 3.0).counts().unwrap(), (5, 6));
        assert!(schedule(0.1, 0.55, 3.0).counts().is_err());
        assert!(schedule(0.1, 0.5, 3.2).counts().is_err());
        assert!(schedule(0.0, 0.5, 3.0).counts().is_err());
    }

    #[test]
    fn coarse_noise_step_is_refused() {
        let toy = TriodeNetwork::toy();
        let hp = HamiltonianParams::default();
        let s = schedule(0.5, 0.5, 1.0);
        assert!(run_comparison(&toy, &hp, &noise(0.5), &s, 0).is_err());
        let s = ScheduleParams {
            allow_coarse_noise: true,
            ..s
        };
        assert!(run_comparison(&toy, &hp, &noise(0.5), &s, 0).is_ok());
        assert!(run_comparison(
            &toy,
            &hp,
            &NoiseParams::silent(),
            &schedule(0.5, 0.5, 1.0),
            0
        )
        .is_ok());
    }

    #[test]
    fn cap_is_enforced() {
        let big = TriodeNetwork::new(DYNAMICS_CAP + 1, vec![]).unwrap();
        let err = run_comparison(
            &big,
            &HamiltonianParams::default(),
            &NoiseParams::silent(),
            &schedule(0.1, 0.1, 0.1),
            0,
        )
        .unwrap_err();
        assert!(err.is_cap_refusal());
    }

    #[test]
    fn silent_undamped_comparison_keeps_weights() {
        let toy = TriodeNetwork::toy();
        let hp = HamiltonianParams {
            gamma: 0.0,
            ..HamiltonianParams::default()
        };
        let tr = run_comparison(
            &toy,
            &hp,
            &NoiseParams::silent(),
            &schedule(0.1, 0.5, 5.0),
            4,
        )
        .unwrap();
        let first = tr.samples[0].weights;
        for s in &tr.samples {
            assert!((s.weights.s - first.s).abs() < 1e-12);
            assert!((s.weights.f - first.f).abs() < 1e-12);
            assert!(s.weights.v.abs() < 1e-12);
        }
    }

    #[test]
    fn shared_fields_never_leak() {
        let toy = TriodeNetwork::toy();
        let nz = NoiseParams {
            pairing: Pairing::Shared,
            ..noise(0.8)
        };
        let tr = run_comparison(
            &toy,
            &HamiltonianParams::default(),
            &nz,
            &schedule(0.1, 0.5, 10.0),
            9,
        )
        .unwrap();
        for s in &tr.samples {
            assert!(s.weights.v <= 1e-24, "p_V = {}", s.weights.v);
        }
        let s = schedule(0.1, 0.1, 10.0);
        let cmp = run_comparison(&toy, &HamiltonianParams::default(), &nz, &s, 9).unwrap();
        let pr = run_projected(&toy, &HamiltonianParams::default(), &nz, &s, 9).unwrap();
        assert_eq!(pr.p_s(), cmp.p_s());
        assert!(pr.removed().iter().all(|d| *d == 0.0));
    }

    #[test]
    fn projection_event_identities() {
        let toy = TriodeNetwork::toy();
        let tr = run_projected(
            &toy,
            &HamiltonianParams::default(),
            &noise(0.6),
            &schedule(0.1, 0.5, 20.0),
            2,
        )
        .unwrap();
        assert_eq!(tr.events.len(), 40);
        for e in &tr.events {
            assert!(e.removed >= 0.0 && e.removed <= e.pre.v + 1e-12);
            let k = 1.0 / (1.0 - e.removed);
            assert!((e.post.s - e.pre.s * k).abs() <= 1e-10);
            assert!((e.post.f - e.pre.f * k).abs() <= 1e-10);
            assert!(e.post.v == 0.0);
        }
        for s in &tr.samples {
            assert!((s.weights.total() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn unnormalized_norm_is_product_of_survivals() {
        let toy = TriodeNetwork::toy();
        let hp = HamiltonianParams {
            gamma: 0.0,
            ..HamiltonianParams::default()
        };
        let s = ScheduleParams {
            renormalize: false,
            ..schedule(0.1, 0.4, 8.0)
        };
        let tr = run_projected(&toy, &hp, &noise(0.6), &s, 5).unwrap();
        let product: f64 = tr.events.iter().map(|e| 1.0 - e.removed).product();
        assert!((product - tr.final_state.norm_sqr()).abs() <= 1e-8);
        let norms: Vec<f64> = tr.samples.iter().map(|s| s.weights.total()).collect();
        assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn symmetrized_has_no_singlet_weight() {
        let toy = TriodeNetwork::toy();
        let tr = run_symmetrized(
            &toy,
            &HamiltonianParams::default(),
            &noise(0.6),
            &schedule(0.1, 0.5, 5.0),
            1,
        )
        .unwrap();
        assert!(tr.p_v().iter().all(|v| *v == 0.0));
        assert_eq!(tr.final_state.space(), Space::physical(2));
    }

    #[test]
    fn wireless_single_triode_has_zero_energy() {
        let net = TriodeNetwork::new(1, vec![]).unwrap();
        let tr = run_symmetrized(
            &net,
            &HamiltonianParams::default(),
            &noise(0.6),
            &schedule(0.1, 0.5, 5.0),
            1,
        )
        .unwrap();
        assert!(tr.energies().iter().all(|e| *e == 0.0));
    }

    #[test]
    fn reruns_are_identical() {
        let toy = TriodeNetwork::toy();
        let s = schedule(0.1, 0.5, 5.0);
        let a = run_projected(&toy, &HamiltonianParams::default(), &noise(0.6), &s, 11).unwrap();
        let b = run_projected(&toy, &HamiltonianParams::default(), &noise(0.6), &s, 11).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a, b);
    }

    #[test]
    fn csv_shape() {
        let toy = TriodeNetwork::toy();
        let tr = run_projected(
            &toy,
            &HamiltonianParams::default(),
            &noise(0.6),
            &schedule(0.1, 0.5, 1.0),
            0,
        )
        .unwrap();
        let csv = tr.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,p_S,p_F,p_V,energy,removed_norm");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(','));
        assert!(!lines[2].ends_with(','));
    }

    #[test]
    fn snapshots_taken_at_requested_times() {
        let toy = TriodeNetwork::toy();
        let s = ScheduleParams {
            snapshot_times: vec![0.0, 0.25, 1.0],
            ..schedule(0.1, 0.5, 1.0)
        };
        let tr = run_comparison(&toy, &HamiltonianParams::default(), &noise(0.6), &s, 0).unwrap();
        assert_eq!(tr.snapshots.len(), 3);
        assert_eq!(tr.snapshots[2].1, tr.final_state);
    }
}
