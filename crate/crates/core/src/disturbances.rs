//! Twist and pose disturbance generators.
//!
//! Every signal is a pure dual quaternion expressed in the inertial frame,
//! deterministic in its parameters (and seed), and square integrable on its
//! finite horizon.

use std::f64::consts::TAU;

use nalgebra::Vector6;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dq::Twist;
use crate::error::{Error, Result};

/// Maximum number of tones in a band-limited signal.
pub const MAX_TONES: usize = 8;

/// Slack on the horizon check so that `k·dt` grids ending at `T` pass.
const HORIZON_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum DisturbanceKind {
    Zero,
    Constant {
        amplitude: Vector6<f64>,
    },
    /// `a ⊙ sin(2π t / period + phase)`.
    Sinusoid {
        amplitude: Vector6<f64>,
        period: f64,
        phase: f64,
    },
    /// Velocity of a triangle-wave motion: component `i` moves at speed
    /// `amplitude[i]` and reverses every `periods[i] / 2`.
    TriangleBase {
        amplitude: Vector6<f64>,
        periods: Vector6<f64>,
    },
    /// `Σ_j a ⊙ sin(2π f_j t + φ_j) / √n` with seeded frequencies in
    /// `[f_min, f_max]` and seeded per-component phases.
    BandLimited {
        amplitude: Vector6<f64>,
        tones: Vec<Tone>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tone {
    pub frequency: f64,
    pub phases: Vector6<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisturbanceSignal {
    pub kind: DisturbanceKind,
    pub horizon: f64,
}

impl DisturbanceSignal {
    pub fn zero(horizon: f64) -> Self {
        DisturbanceSignal {
            kind: DisturbanceKind::Zero,
            horizon,
        }
    }

    pub fn constant(amplitude: Vector6<f64>, horizon: f64) -> Self {
        DisturbanceSignal {
            kind: DisturbanceKind::Constant { amplitude },
            horizon,
        }
    }

    pub fn sinusoid(amplitude: Vector6<f64>, period: f64, phase: f64, horizon: f64) -> Result<Self> {
        positive("period", period)?;
        Ok(DisturbanceSignal {
            kind: DisturbanceKind::Sinusoid {
                amplitude,
                period,
                phase,
            },
            horizon,
        })
    }

    pub fn triangle_base(amplitude: Vector6<f64>, periods: Vector6<f64>, horizon: f64) -> Result<Self> {
        for i in 0..6 {
            if amplitude[i] != 0.0 {
                positive("triangle period", periods[i])?;
            }
        }
        Ok(DisturbanceSignal {
            kind: DisturbanceKind::TriangleBase { amplitude, periods },
            horizon,
        })
    }

    /// `f_max` must stay below the Nyquist rate `0.5 / dt` of the sampler.
    pub fn band_limited(
        amplitude: Vector6<f64>,
        n_tones: usize,
        f_min: f64,
        f_max: f64,
        dt: f64,
        seed: u64,
        horizon: f64,
    ) -> Result<Self> {
        if n_tones == 0 || n_tones > MAX_TONES {
            return Err(Error::InvalidParameter(format!(
                "tone count must be in 1..={MAX_TONES}, got {n_tones}"
            )));
        }
        positive("dt", dt)?;
        if !(f_min >= 0.0 && f_min <= f_max && f_max < 0.5 / dt) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= f_min <= f_max < 0.5/dt = {}, got [{f_min}, {f_max}]",
                0.5 / dt
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tones = (0..n_tones)
            .map(|_| {
                let frequency = if f_max > f_min {
                    rng.random_range(f_min..f_max)
                } else {
                    f_min
                };
                let phases = Vector6::from_fn(|_, _| rng.random_range(0.0..TAU));
                Tone { frequency, phases }
            })
            .collect();
        Ok(DisturbanceSignal {
            kind: DisturbanceKind::BandLimited { amplitude, tones },
            horizon,
        })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, DisturbanceKind::Zero)
    }

    pub fn sample(&self, t: f64) -> Result<Twist> {
        if !(t >= -HORIZON_SLACK && t <= self.horizon + HORIZON_SLACK) {
            return Err(Error::OutsideHorizon {
                t,
                horizon: self.horizon,
            });
        }
        Ok(Twist::from_vec6(&self.value(t)))
    }

    fn value(&self, t: f64) -> Vector6<f64> {
        match &self.kind {
            DisturbanceKind::Zero => Vector6::zeros(),
            DisturbanceKind::Constant { amplitude } => *amplitude,
            DisturbanceKind::Sinusoid {
                amplitude,
                period,
                phase,
            } => amplitude * (TAU * t / period + phase).sin(),
            DisturbanceKind::TriangleBase { amplitude, periods } => Vector6::from_fn(|i, _| {
                if amplitude[i] == 0.0 {
                    0.0
                } else {
                    amplitude[i] * triangle_wave(t, periods[i]).1
                }
            }),
            DisturbanceKind::BandLimited { amplitude, tones } => {
                let norm = (tones.len() as f64).sqrt().recip();
                let mut v = Vector6::zeros();
                for tone in tones {
                    let arg = TAU * tone.frequency * t;
                    v += Vector6::from_fn(|i, _| (arg + tone.phases[i]).sin());
                }
                amplitude.component_mul(&v) * norm
            }
        }
    }
}

/// Unit triangle wave of the given period: returns `(displacement, slope)`
/// where displacement rises from 0 to `period/2` at unit slope over the
/// first half period and returns to 0 over the second.
pub fn triangle_wave(t: f64, period: f64) -> (f64, f64) {
    let half = 0.5 * period;
    let tau = t.rem_euclid(period);
    if tau < half {
        (tau, 1.0)
    } else {
        (period - tau, -1.0)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// Trapezoidal `∫‖·‖²` of the four disturbance channels on the grid
/// `t_k = k·dt`, `k = 0..=floor(T/dt)`:
/// `[v_w rotational, v_w dual, v_c rotational, v_c dual]`.
pub fn l2_norm_squared(v_w: &DisturbanceSignal, v_c: &DisturbanceSignal, horizon: f64, dt: f64) -> Result<[f64; 4]> {
    positive("dt", dt)?;
    let steps = crate::simulator::step_count(horizon, dt);
    let mut acc = [0.0; 4];
    let mut prev: Option<[f64; 4]> = None;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let w = v_w.sample(t)?;
        let c = v_c.sample(t)?;
        let cur = [
            w.primary.norm_squared(),
            w.dual.norm_squared(),
            c.primary.norm_squared(),
            c.dual.norm_squared(),
        ];
        if let Some(p) = prev {
            for i in 0..4 {
                acc[i] += 0.5 * dt * (p[i] + cur[i]);
            }
        }
        prev = Some(cur);
    }
    Ok(acc)
}
