//! Meter model, impulsive system-meter couplings, and the resulting
//! reading densities and post-measurement states.
//!
//! The meter is a zero-temperature minimum-uncertainty pointer whose
//! position spread Δq_m is the tunable knob: a wide pointer (large Δq_m)
//! reads little and disturbs little, a narrow one approaches a projective
//! measurement. The couplings act as symplectic maps on the joint phase
//! vector Ξ = (q, q_m, p, p_m); Gaussians stay Gaussian under them, so
//! every distribution below is closed-form:
//!
//! * weak `q` coupling: reading ~ N(q0, Δq² + Δq_m²), back-action
//!   Δp² → Δp² + Δp_m², Δq untouched;
//! * weak `p` coupling: the mirror image;
//! * projective measurement on an untouched copy samples the bare
//!   marginal.
//!
//! The noise/disturbance trade-off Δq_m² + Δp_m² is minimized at
//! Δq_m = 1/√2 where it equals 1.

use crate::error::{Error, Result};
use crate::gaussian::{Gaussian1D, GaussianState};
use rand_core::RngCore;

/// Minimum-uncertainty pointer: Δq_m · Δp_m = 1/2 exactly, Δp_m derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Meter {
    dqm: f64,
    dpm: f64,
}

impl Meter {
    /// Build a pointer with position spread `dqm`; the momentum spread
    /// `1/(2 dqm)` is implied. Any positive finite `dqm` is accepted
    /// here; the experiment harness additionally restricts the range to
    /// avoid overflow in variance arithmetic.
    pub fn new(dqm: f64) -> Result<Self> {
        if !dqm.is_finite() || dqm <= 0.0 {
            return Err(Error::invalid("dqm", "must be finite and positive"));
        }
        Ok(Meter {
            dqm,
            dpm: 1.0 / (2.0 * dqm),
        })
    }

    pub fn dqm(&self) -> f64 {
        self.dqm
    }

    pub fn dpm(&self) -> f64 {
        self.dpm
    }
}

/// β₂ for the ordering Ξ = (q, q_m, p, p_m).
pub const BETA2: [[f64; 4]; 4] = [
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
];

/// A linear map on the joint phase vector Ξ = (q, q_m, p, p_m) satisfying
/// MᵀβM = β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionSymplectic {
    m: [[f64; 4]; 4],
}

impl InteractionSymplectic {
    /// Impulsive q·p_m coupling: the pointer position picks up the system
    /// position, the system momentum absorbs the pointer recoil.
    ///
    /// (q, q_m, p, p_m) → (q, q_m + q, p − p_m, p_m)
    pub fn weak_q() -> Self {
        InteractionSymplectic {
            m: [
                [1.0, 0.0, 0.0, 0.0],
                [1.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, -1.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
        }
    }

    /// Impulsive p·p_m coupling: the pointer position picks up the system
    /// momentum, the system position absorbs the pointer recoil.
    ///
    /// (q, q_m, p, p_m) → (q + p_m, q_m + p, p, p_m)
    pub fn weak_p() -> Self {
        InteractionSymplectic {
            m: [
                [1.0, 0.0, 0.0, 1.0],
                [0.0, 1.0, 1.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
        }
    }

    pub fn matrix(&self) -> &[[f64; 4]; 4] {
        &self.m
    }

    pub fn apply(&self, xi: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (row, o) in self.m.iter().zip(out.iter_mut()) {
            *o = row.iter().zip(xi.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Largest entry of |MᵀβM − β|; exactly zero for a symplectic map
    /// with 0/±1 entries.
    #[allow(clippy::needless_range_loop)]
    pub fn symplectic_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                // (MᵀβM)_{ij} = Σ_{k,l} M_{ki} β_{kl} M_{lj}
                let mut entry = 0.0;
                for k in 0..4 {
                    for l in 0..4 {
                        entry += self.m[k][i] * BETA2[k][l] * self.m[l][j];
                    }
                }
                worst = worst.max((entry - BETA2[i][j]).abs());
            }
        }
        worst
    }
}

/// One recorded pointer value together with the reduced system state left
/// behind by the interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    pub reading: f64,
    pub post_state: GaussianState,
}

/// Density of the pointer reading for a weak `q` measurement:
/// N(q0, Δq² + Δq_m²).
pub fn weak_q_reading_density(state: &GaussianState, meter: &Meter) -> Gaussian1D {
    Gaussian1D::unchecked(state.q0(), state.dq() * state.dq() + meter.dqm() * meter.dqm())
}

/// Reduced system state after a weak `q` measurement: the momentum spread
/// grows by the pointer recoil, Δp² → Δp² + Δp_m²; center and Δq are
/// untouched.
pub fn post_weak_q_state(state: &GaussianState, meter: &Meter) -> GaussianState {
    let dp = (state.dp() * state.dp() + meter.dpm() * meter.dpm()).sqrt();
    GaussianState::new(state.q0(), state.p0(), state.dq(), dp)
        .expect("adding non-negative variance preserves validity")
}

/// Density of a projective `p` outcome taken after a weak `q`
/// measurement: N(p0, Δp² + Δp_m²), the momentum marginal of
/// [`post_weak_q_state`].
pub fn post_weak_q_projective_p_density(state: &GaussianState, meter: &Meter) -> Gaussian1D {
    post_weak_q_state(state, meter).marginal_p()
}

/// Density of the pointer reading for a weak `p` measurement:
/// N(p0, Δp² + Δq_m²).
pub fn weak_p_reading_density(state: &GaussianState, meter: &Meter) -> Gaussian1D {
    Gaussian1D::unchecked(state.p0(), state.dp() * state.dp() + meter.dqm() * meter.dqm())
}

/// Reduced system state after a weak `p` measurement: Δq² → Δq² + Δp_m²,
/// everything else untouched.
pub fn post_weak_p_state(state: &GaussianState, meter: &Meter) -> GaussianState {
    let dq = (state.dq() * state.dq() + meter.dpm() * meter.dpm()).sqrt();
    GaussianState::new(state.q0(), state.p0(), dq, state.dp())
        .expect("adding non-negative variance preserves validity")
}

/// Density of a projective `q` outcome taken after a weak `p`
/// measurement: N(q0, Δq² + Δp_m²).
pub fn post_weak_p_projective_q_density(state: &GaussianState, meter: &Meter) -> Gaussian1D {
    post_weak_p_state(state, meter).marginal_q()
}

/// Projective `q` measurement on a fresh copy: samples the bare marginal.
pub fn projective_q_density(state: &GaussianState) -> Gaussian1D {
    state.marginal_q()
}

/// Projective `p` measurement on a fresh copy.
pub fn projective_p_density(state: &GaussianState) -> Gaussian1D {
    state.marginal_p()
}

/// Perform a weak `q` measurement: record one pointer reading and return
/// it with the disturbed state.
pub fn measure_weak_q<R: RngCore>(
    state: &GaussianState,
    meter: &Meter,
    rng: &mut R,
) -> MeasurementOutcome {
    MeasurementOutcome {
        reading: weak_q_reading_density(state, meter).sample(rng),
        post_state: post_weak_q_state(state, meter),
    }
}

/// Perform a weak `p` measurement.
pub fn measure_weak_p<R: RngCore>(
    state: &GaussianState,
    meter: &Meter,
    rng: &mut R,
) -> MeasurementOutcome {
    MeasurementOutcome {
        reading: weak_p_reading_density(state, meter).sample(rng),
        post_state: post_weak_p_state(state, meter),
    }
}
