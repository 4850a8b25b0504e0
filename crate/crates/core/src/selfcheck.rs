//! Fast analytic self-checks behind the `validate` subcommand.
//!
//! These are the invariants with exact or closed-form answers:
//! uncertainty saturation of the state family, the symplectic condition
//! on both interaction maps, the variance-addition laws, and the d1 law
//! at Monte Carlo scale small enough to finish in seconds.

use crate::experiment::{run_trial, TrialOptions};
use crate::gaussian::{GaussianState, StateParams};
use crate::measurement::{
    post_weak_q_state, weak_p_reading_density, weak_q_reading_density, InteractionSymplectic,
    Meter,
};
use crate::rng::{stream_tag, substream, uniform_in};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelfcheckReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelfcheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Run every self-check and report measured deviations.
pub fn validate_selfcheck() -> SelfcheckReport {
    SelfcheckReport {
        checks: vec![
            uncertainty_saturation(),
            symplectic_condition(),
            variance_addition(),
            d1_law(),
        ],
    }
}

fn uncertainty_saturation() -> CheckOutcome {
    let mut rng = substream(0xcafe, &[stream_tag::SELFCHECK, 1]);
    let mut worst = 0.0f64;
    let mut all_valid = true;
    for _ in 0..100_000 {
        let kappa = uniform_in(1e-3, 1.0, &mut rng);
        let u = uniform_in(-2.0, 2.0, &mut rng);
        let q0 = uniform_in(-5.0, 5.0, &mut rng);
        let p0 = uniform_in(-5.0, 5.0, &mut rng);
        let s = GaussianState::from_params(&StateParams::new(u, kappa, q0, p0))
            .expect("parameters in range");
        worst = worst.max((s.dq() * s.dp() - 1.0 / (2.0 * kappa)).abs());
        all_valid &= s.variance_matrix().satisfies_uncertainty();
    }
    CheckOutcome {
        name: "uncertainty-saturation",
        passed: all_valid && worst <= 1e-12,
        detail: format!("max |dq*dp - 1/(2k)| = {worst:.3e} over 1e5 states, all valid: {all_valid}"),
    }
}

fn symplectic_condition() -> CheckOutcome {
    let defect = InteractionSymplectic::weak_q()
        .symplectic_defect()
        .max(InteractionSymplectic::weak_p().symplectic_defect());
    CheckOutcome {
        name: "symplectic-beta2",
        passed: defect <= 1e-12,
        detail: format!("max |M^T b M - b| = {defect:.3e} over both maps"),
    }
}

fn variance_addition() -> CheckOutcome {
    let mut rng = substream(0xcafe, &[stream_tag::SELFCHECK, 2]);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let kappa = uniform_in(0.05, 1.0, &mut rng);
        let u = uniform_in(-1.5, 1.5, &mut rng);
        let s = GaussianState::from_params(&StateParams::new(u, kappa, 0.0, 0.0))
            .expect("parameters in range");
        let meter = Meter::new(uniform_in(-2.0, 2.0, &mut rng).exp()).expect("positive spread");

        let rq = weak_q_reading_density(&s, &meter);
        let expect_q = s.dq() * s.dq() + meter.dqm() * meter.dqm();
        worst = worst.max((rq.variance() - expect_q).abs() / expect_q);

        let rp = weak_p_reading_density(&s, &meter);
        let expect_p = s.dp() * s.dp() + meter.dqm() * meter.dqm();
        worst = worst.max((rp.variance() - expect_p).abs() / expect_p);

        let post = post_weak_q_state(&s, &meter);
        let grown = s.dp() * s.dp() + meter.dpm() * meter.dpm();
        worst = worst.max((post.dp() * post.dp() - grown).abs() / grown);
        if post.dq().to_bits() != s.dq().to_bits() {
            return CheckOutcome {
                name: "variance-addition",
                passed: false,
                detail: "measured quadrature spread changed".into(),
            };
        }
    }
    CheckOutcome {
        name: "variance-addition",
        passed: worst <= 1e-12,
        detail: format!("max relative deviation = {worst:.3e} over 100 state/meter pairs"),
    }
}

fn d1_law() -> CheckOutcome {
    let trials = 10_000usize;
    let inv_dqm = 2.0f64.sqrt();
    let opts = TrialOptions::default();
    let states = [
        GaussianState::coherent(0.0, 0.0),
        GaussianState::from_params(&StateParams::new(0.7, 0.9, 1.5, -0.5))
            .expect("parameters in range"),
    ];
    let mut worst = 0.0f64;
    for (si, state) in states.iter().enumerate() {
        for (ni, &n) in [6usize, 20].iter().enumerate() {
            let mut sums = (0.0, 0.0);
            for run in 0..trials {
                let path = |tag| [stream_tag::SELFCHECK, tag, si as u64, ni as u64, run as u64];
                let mut weak_rng = substream(0xcafe, &path(3));
                let mut proj_rng = substream(0xcafe, &path(4));
                let (weak, proj) =
                    run_trial(state, n, inv_dqm, &opts, &mut weak_rng, &mut proj_rng)
                        .expect("valid trial");
                sums.0 += weak.d1;
                sums.1 += proj.d1;
            }
            let spreads = state.dq() * state.dq() + state.dp() * state.dp();
            let meter = Meter::new(1.0 / inv_dqm).expect("positive spread");
            let noise = meter.dqm() * meter.dqm() + meter.dpm() * meter.dpm();
            let weak_law = (spreads + noise) / n as f64;
            let proj_law = 2.0 * spreads / n as f64;
            worst = worst.max((sums.0 / trials as f64 - weak_law).abs() / weak_law);
            worst = worst.max((sums.1 / trials as f64 - proj_law).abs() / proj_law);
        }
    }
    CheckOutcome {
        name: "d1-law",
        passed: worst <= 0.05,
        detail: format!("max relative deviation = {:.2}% at 1e4 trials", 100.0 * worst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_build_passes_all_checks() {
        let report = validate_selfcheck();
        for check in &report.checks {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
        assert!(report.all_passed());
        assert_eq!(report.checks.len(), 4);
    }
}
