//! Ornstein–Uhlenbeck random fields at every proton site.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Time profile of the stationary field amplitude `B₀(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AmplitudeSchedule {
    Constant {
        b0: f64,
    },
    /// Linear ramp from `b0` to `floor · b0` over `duration`, then flat.
    LinearDecay {
        b0: f64,
        duration: f64,
        floor: f64,
    },
    /// `b0 · max(e^{-t/decay_time}, floor)`.
    ExponentialDecay {
        b0: f64,
        decay_time: f64,
        floor: f64,
    },
}

impl AmplitudeSchedule {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            AmplitudeSchedule::Constant { b0 } => b0,
            AmplitudeSchedule::LinearDecay {
                b0,
                duration,
                floor,
            } => {
                let frac = (t / duration).clamp(0.0, 1.0);
                b0 * (1.0 - frac * (1.0 - floor))
            }
            AmplitudeSchedule::ExponentialDecay {
                b0,
                decay_time,
                floor,
            } => b0 * (-t / decay_time).exp().max(floor),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            AmplitudeSchedule::Constant { b0 } => b0 >= 0.0,
            AmplitudeSchedule::LinearDecay {
                b0,
                duration,
                floor,
            } => b0 >= 0.0 && duration > 0.0 && (0.0..=1.0).contains(&floor),
            AmplitudeSchedule::ExponentialDecay {
                b0,
                decay_time,
                floor,
            } => b0 >= 0.0 && decay_time > 0.0 && (0.0..=1.0).contains(&floor),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("bad amplitude schedule {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Independent OU process per Cartesian component.
    Isotropic,
    /// Scalar OU process along `(1, 1, 1)/√3`.
    Principal,
}

/// Whether the two protons of a triode see independent or identical fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    Independent,
    /// Exchange-symmetric: `B(τ,1) = B(τ,2)`.
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub amplitude: AmplitudeSchedule,
    pub correlation_time: f64,
    pub polarization: Polarization,
    pub pairing: Pairing,
}

impl NoiseParams {
    pub fn silent() -> Self {
        NoiseParams {
            amplitude: AmplitudeSchedule::Constant { b0: 0.0 },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.amplitude.validate()?;
        if !(self.correlation_time > 0.0) {
            return Err(Error::invalid("correlation time must be positive"));
        }
        Ok(())
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            amplitude: AmplitudeSchedule::Constant { b0: 0.03 },
            correlation_time: 20.0,
            polarization: Polarization::Isotropic,
            pairing: Pairing::Independent,
        }
    }
}

const INV_SQRT3: f64 = 0.577_350_269_189_625_8;

/// Fields at the `2T` proton sites; site `(τ, β)` is stored at `2τ + β − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub time: f64,
    pub fields: Vec<[f64; 3]>,
}

impl FieldSample {
    pub fn zeros(triodes: usize) -> Self {
        FieldSample {
            time: 0.0,
            fields: vec![[0.0; 3]; 2 * triodes],
        }
    }

    pub fn triodes(&self) -> usize {
        self.fields.len() / 2
    }

    pub fn site(&self, triode: usize, beta: u8) -> [f64; 3] {
        self.fields[2 * triode + usize::from(beta - 1)]
    }

    pub fn set_site(&mut self, triode: usize, beta: u8, b: [f64; 3]) {
        self.fields[2 * triode + usize::from(beta - 1)] = b;
    }

    /// Both sites of every triode replaced by their mean.
    pub fn averaged(&self) -> FieldSample {
        let mut out = self.clone();
        for t in 0..self.triodes() {
            let (a, b) = (self.site(t, 1), self.site(t, 2));
            let m = [0, 1, 2].map(|k| 0.5 * (a[k] + b[k]));
            out.set_site(t, 1, m);
            out.set_site(t, 2, m);
        }
        out
    }

    pub fn is_exchange_symmetric(&self) -> bool {
        (0..self.triodes()).all(|t| self.site(t, 1) == self.site(t, 2))
    }
}

/// One owned noise stream.
#[derive(Debug, Clone)]
pub struct FieldProcess {
    params: NoiseParams,
    sample: FieldSample,
    /// Scalar OU coordinate per site for principal polarization.
    scalar: Vec<f64>,
    rng: ChaCha8Rng,
}

impl FieldProcess {
    /// Starts from a stationary draw at amplitude `B₀(0)`.
    pub fn new(triodes: usize, params: NoiseParams, rng: ChaCha8Rng) -> Result<Self> {
        params.validate()?;
        let mut p = FieldProcess {
            params,
            sample: FieldSample::zeros(triodes),
            scalar: vec![0.0; 2 * triodes],
            rng,
        };
        let b0 = params.amplitude.at(0.0);
        p.update(|_, _| 0.0, b0);
        Ok(p)
    }

    pub fn from_seed(triodes: usize, params: NoiseParams, seed: u64) -> Result<Self> {
        Self::new(triodes, params, ChaCha8Rng::seed_from_u64(seed))
    }

    /// Starts from given fields instead of a stationary draw.
    pub fn from_sample(sample: FieldSample, params: NoiseParams, rng: ChaCha8Rng) -> Result<Self> {
        params.validate()?;
        let scalar = sample
            .fields
            .iter()
            .map(|b| (b[0] + b[1] + b[2]) * INV_SQRT3)
            .collect();
        Ok(FieldProcess {
            params,
            sample,
            scalar,
            rng,
        })
    }

    pub fn sample(&self) -> &FieldSample {
        &self.sample
    }

    pub fn params(&self) -> &NoiseParams {
        &self.params
    }

    /// `new = decay(old) + noise_scale · ξ` for every independent coordinate.
    fn update(&mut self, decay: impl Fn(f64, f64) -> f64, noise_scale: f64) {
        let shared = self.params.pairing == Pairing::Shared;
        for site in 0..self.sample.fields.len() {
            if shared && site % 2 == 1 {
                self.sample.fields[site] = self.sample.fields[site - 1];
                self.scalar[site] = self.scalar[site - 1];
                continue;
            }
            match self.params.polarization {
                Polarization::Isotropic => {
                    for k in 0..3 {
                        let xi: f64 = StandardNormal.sample(&mut self.rng);
                        let old = self.sample.fields[site][k];
                        self.sample.fields[site][k] = decay(old, xi) + noise_scale * xi;
                    }
                }
                Polarization::Principal => {
                    let xi: f64 = StandardNormal.sample(&mut self.rng);
                    let s = decay(self.scalar[site], xi) + noise_scale * xi;
                    self.scalar[site] = s;
                    self.sample.fields[site] = [s * INV_SQRT3; 3];
                }
            }
        }
    }

    /// OU step `B ← B e^{−dt/τ_c} + ξ B₀(t+dt) √(1 − e^{−2dt/τ_c})`.
    pub fn advance(&mut self, dt: f64) -> &FieldSample {
        assert!(dt > 0.0, "noise step must be positive");
        let rho = (-dt / self.params.correlation_time).exp();
        let t_new = self.sample.time + dt;
        let scale = self.params.amplitude.at(t_new) * (1.0 - rho * rho).sqrt();
        self.update(|old, _| old * rho, scale);
        self.sample.time = t_new;
        &self.sample
    }
}

/// Free-function form of [`FieldProcess::advance`].
pub fn advance_noise(process: &mut FieldProcess, dt: f64) -> FieldSample {
    process.advance(dt).clone()
}
