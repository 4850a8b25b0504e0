//! Monte Carlo harness: random state generation, trials, and grid sweeps
//! over the measurement weakness.
//!
//! A sweep runs both schemes for every (ensemble size, grid point, state,
//! run) combination, averages the distance measures over runs and then
//! over states, and reports standard errors across states. The same
//! random states are reused at every grid point and by both schemes
//! (common random numbers), which sharpens the weak-vs-projective
//! comparison without biasing either side.
//!
//! Every trial draws from its own substream derived by index
//! (see [`crate::rng`]), so results are bit-identical regardless of how
//! many worker threads execute the sweep.

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, StateParams};
use crate::measurement::Meter;
use crate::protocol::{
    distances, distances_as_printed, estimate_from_readings, run_projective_baseline,
    run_weak_protocol, DistanceMeasures, EstimatorOptions, Scheme,
};
use crate::rng::{stream_tag, substream, uniform_in, SimRng};
use rand_core::RngCore;
use rayon::prelude::*;

pub const DEFAULT_N_STATES: usize = 100;
pub const DEFAULT_N_RUNS: usize = 1000;
pub const DEFAULT_ENSEMBLE_SIZES: [usize; 4] = [20, 10, 8, 6];
pub const DEFAULT_U_RANGE: (f64, f64) = (-1.0, 1.0);
pub const DEFAULT_CENTER_RANGE: (f64, f64) = (-3.0, 3.0);
pub const DEFAULT_MASTER_SEED: u64 = 0xd1ce_5eed;

/// Meter spreads are clamped to this window by config validation so the
/// variance arithmetic stays far from overflow.
pub const INV_DQM_LIMITS: (f64, f64) = (1e-3, 1e3);

/// Default weakness grid: 24 geometrically spaced values of 1/Δq_m on
/// [0.1, 3.0], bracketing the analytic d1 optimum at √2.
pub fn default_inv_dqm_grid() -> Vec<f64> {
    let n = 24;
    let (lo, hi): (f64, f64) = (0.1, 3.0);
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    (0..n).map(|i| lo * ratio.powi(i)).collect()
}

/// Full description of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Temperature parameter shared by all generated states.
    pub kappa: f64,
    pub n_states: usize,
    pub n_runs: usize,
    pub ensemble_sizes: Vec<usize>,
    /// Weakness grid, strictly increasing values of 1/Δq_m.
    pub inv_dqm_grid: Vec<f64>,
    pub u_range: (f64, f64),
    pub center_range: (f64, f64),
    pub master_seed: u64,
    /// Subtract known meter noise from spread estimates.
    pub deconvolve: bool,
    /// Inverse-variance weighting of the channel means.
    pub weighting: bool,
    /// Average the four estimates over runs before computing distances,
    /// instead of averaging per-run distances (off by default).
    pub average_estimates_first: bool,
    /// Score d2 with the Δq-only compatibility form.
    pub d2_printed_form: bool,
}

impl ExperimentConfig {
    /// Defaults for a given temperature: 100 states × 1000 runs, ensemble
    /// sizes {20, 10, 8, 6}, u ~ U(−1, 1), centers ~ U(−3, 3).
    pub fn with_kappa(kappa: f64) -> Self {
        ExperimentConfig {
            kappa,
            n_states: DEFAULT_N_STATES,
            n_runs: DEFAULT_N_RUNS,
            ensemble_sizes: DEFAULT_ENSEMBLE_SIZES.to_vec(),
            inv_dqm_grid: default_inv_dqm_grid(),
            u_range: DEFAULT_U_RANGE,
            center_range: DEFAULT_CENTER_RANGE,
            master_seed: DEFAULT_MASTER_SEED,
            deconvolve: true,
            weighting: false,
            average_estimates_first: false,
            d2_printed_form: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kappa.is_finite() || self.kappa <= 0.0 || self.kappa > 1.0 {
            return Err(Error::ConfigInvalid {
                field: "kappa",
                reason: "must lie in (0, 1]".into(),
            });
        }
        if self.n_states == 0 {
            return Err(Error::ConfigInvalid {
                field: "n_states",
                reason: "must be at least 1".into(),
            });
        }
        if self.n_runs == 0 {
            return Err(Error::ConfigInvalid {
                field: "n_runs",
                reason: "must be at least 1".into(),
            });
        }
        if self.ensemble_sizes.is_empty() {
            return Err(Error::ConfigInvalid {
                field: "ensemble_sizes",
                reason: "must not be empty".into(),
            });
        }
        for &n in &self.ensemble_sizes {
            if n < 4 || n % 2 != 0 {
                return Err(Error::ConfigInvalid {
                    field: "ensemble_sizes",
                    reason: format!("size {n} must be even and at least 4"),
                });
            }
        }
        if self.inv_dqm_grid.is_empty() {
            return Err(Error::ConfigInvalid {
                field: "inv_dqm_grid",
                reason: "must not be empty".into(),
            });
        }
        let (lo, hi) = INV_DQM_LIMITS;
        for pair in self.inv_dqm_grid.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::ConfigInvalid {
                    field: "inv_dqm_grid",
                    reason: "values must be strictly increasing".into(),
                });
            }
        }
        for &g in &self.inv_dqm_grid {
            if !g.is_finite() || g < lo || g > hi {
                return Err(Error::ConfigInvalid {
                    field: "inv_dqm_grid",
                    reason: format!("value {g} outside [{lo}, {hi}]"),
                });
            }
        }
        for (field, (lo, hi)) in [("u_range", self.u_range), ("center_range", self.center_range)]
        {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::ConfigInvalid {
                    field,
                    reason: format!("[{lo}, {hi}] is not a valid interval"),
                });
            }
        }
        Ok(())
    }
}

/// Averaged distance measures for both schemes at one grid point.
/// Standard errors are taken across states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub inv_dqm: f64,
    pub d1_weak_mean: f64,
    pub d2_weak_mean: f64,
    pub d1_proj_mean: f64,
    pub d2_proj_mean: f64,
    pub d1_weak_se: f64,
    pub d2_weak_se: f64,
    pub d1_proj_se: f64,
    pub d2_proj_se: f64,
}

/// One grid of [`SweepPoint`]s per ensemble size.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeSweep {
    pub ensemble_size: usize,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub sizes: Vec<SizeSweep>,
}

/// Draw a random state of the family at temperature `kappa` with the
/// default ranges: u ~ U(−1, 1) and centers ~ U(−3, 3).
pub fn random_state<R: RngCore>(kappa: f64, rng: &mut R) -> Result<GaussianState> {
    random_state_in(kappa, DEFAULT_U_RANGE, DEFAULT_CENTER_RANGE, rng)
}

/// Draw a random state with explicit ranges. Draw order: u, q0, p0.
pub fn random_state_in<R: RngCore>(
    kappa: f64,
    u_range: (f64, f64),
    center_range: (f64, f64),
    rng: &mut R,
) -> Result<GaussianState> {
    let u = uniform_in(u_range.0, u_range.1, rng);
    let q0 = uniform_in(center_range.0, center_range.1, rng);
    let p0 = uniform_in(center_range.0, center_range.1, rng);
    GaussianState::from_params(&StateParams::new(u, kappa, q0, p0))
}

/// Per-trial flags threaded through the sweep.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrialOptions {
    pub estimator: EstimatorOptions,
    pub d2_printed_form: bool,
}

impl TrialOptions {
    fn from_config(config: &ExperimentConfig) -> Self {
        TrialOptions {
            estimator: EstimatorOptions {
                deconvolve: config.deconvolve,
                inverse_variance_weighting: config.weighting,
            },
            d2_printed_form: config.d2_printed_form,
        }
    }

    fn score(&self, truth: &GaussianState, est: &crate::protocol::EstimationResult) -> DistanceMeasures {
        if self.d2_printed_form {
            distances_as_printed(truth, est)
        } else {
            distances(truth, est)
        }
    }
}

/// Run one weak trial and one projective trial on the same state with
/// independent streams, returning (weak, projective) distances.
pub fn run_trial(
    state: &GaussianState,
    n: usize,
    inv_dqm: f64,
    opts: &TrialOptions,
    weak_rng: &mut SimRng,
    proj_rng: &mut SimRng,
) -> Result<(DistanceMeasures, DistanceMeasures)> {
    if !inv_dqm.is_finite() || inv_dqm <= 0.0 {
        return Err(Error::invalid("inv_dqm", "must be finite and positive"));
    }
    let meter = Meter::new(1.0 / inv_dqm)?;

    let readings = run_weak_protocol(state, n, &meter, weak_rng)?;
    let weak_est = estimate_from_readings(&readings, &meter, &opts.estimator)?;
    let weak = opts.score(state, &weak_est);

    let proj_est = run_projective_baseline(state, n, proj_rng)?;
    let proj = opts.score(state, &proj_est);
    Ok((weak, proj))
}

/// Run the full sweep described by `config`.
///
/// Parallel across states; the reduction is a sequential fold in state
/// order, so the result does not depend on the thread count.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let kappa_bits = config.kappa.to_bits();
    let states = (0..config.n_states)
        .map(|i| {
            let mut rng = substream(
                config.master_seed,
                &[stream_tag::STATE, kappa_bits, i as u64],
            );
            random_state_in(config.kappa, config.u_range, config.center_range, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let opts = TrialOptions::from_config(config);

    let mut sizes = Vec::with_capacity(config.ensemble_sizes.len());
    for &n in &config.ensemble_sizes {
        let mut points = Vec::with_capacity(config.inv_dqm_grid.len());
        for (grid_idx, &inv_dqm) in config.inv_dqm_grid.iter().enumerate() {
            let per_state: Vec<[f64; 4]> = states
                .par_iter()
                .enumerate()
                .map(|(state_idx, state)| {
                    state_average(config, &opts, state, state_idx, n, grid_idx, inv_dqm)
                })
                .collect::<Result<Vec<_>>>()?;
            points.push(reduce_point(inv_dqm, &per_state));
        }
        sizes.push(SizeSweep {
            ensemble_size: n,
            points,
        });
    }
    Ok(SweepResult {
        config: config.clone(),
        sizes,
    })
}

/// Average the distance measures over `n_runs` for one state at one grid
/// point: [d1_weak, d2_weak, d1_proj, d2_proj].
fn state_average(
    config: &ExperimentConfig,
    opts: &TrialOptions,
    state: &GaussianState,
    state_idx: usize,
    n: usize,
    grid_idx: usize,
    inv_dqm: f64,
) -> Result<[f64; 4]> {
    let kappa_bits = config.kappa.to_bits();
    let path = |tag: u64, run: usize| {
        [
            tag,
            kappa_bits,
            n as u64,
            grid_idx as u64,
            state_idx as u64,
            run as u64,
        ]
    };
    let runs = config.n_runs as f64;

    if config.average_estimates_first {
        let meter = Meter::new(1.0 / inv_dqm)?;
        let mut weak_sums = [0.0f64; 4];
        let mut proj_sums = [0.0f64; 4];
        for run in 0..config.n_runs {
            let mut weak_rng = substream(config.master_seed, &path(stream_tag::WEAK_TRIAL, run));
            let mut proj_rng = substream(config.master_seed, &path(stream_tag::PROJ_TRIAL, run));
            let rs = run_weak_protocol(state, n, &meter, &mut weak_rng)?;
            let w = estimate_from_readings(&rs, &meter, &opts.estimator)?;
            let p = run_projective_baseline(state, n, &mut proj_rng)?;
            for (sum, value) in weak_sums
                .iter_mut()
                .zip([w.q0_est, w.p0_est, w.dq_est, w.dp_est])
            {
                *sum += value;
            }
            for (sum, value) in proj_sums
                .iter_mut()
                .zip([p.q0_est, p.p0_est, p.dq_est, p.dp_est])
            {
                *sum += value;
            }
        }
        let averaged = |sums: [f64; 4], scheme: Scheme| crate::protocol::EstimationResult {
            q0_est: sums[0] / runs,
            p0_est: sums[1] / runs,
            dq_est: sums[2] / runs,
            dp_est: sums[3] / runs,
            scheme,
            n_q: n,
            n_p: n,
        };
        let weak = opts.score(state, &averaged(weak_sums, Scheme::WeakSequential));
        let proj = opts.score(state, &averaged(proj_sums, Scheme::ProjectiveBaseline));
        Ok([weak.d1, weak.d2, proj.d1, proj.d2])
    } else {
        let mut sums = [0.0f64; 4];
        for run in 0..config.n_runs {
            let mut weak_rng = substream(config.master_seed, &path(stream_tag::WEAK_TRIAL, run));
            let mut proj_rng = substream(config.master_seed, &path(stream_tag::PROJ_TRIAL, run));
            let (weak, proj) = run_trial(state, n, inv_dqm, opts, &mut weak_rng, &mut proj_rng)?;
            sums[0] += weak.d1;
            sums[1] += weak.d2;
            sums[2] += proj.d1;
            sums[3] += proj.d2;
        }
        Ok(sums.map(|s| s / runs))
    }
}

fn reduce_point(inv_dqm: f64, per_state: &[[f64; 4]]) -> SweepPoint {
    let n = per_state.len() as f64;
    let mut means = [0.0f64; 4];
    for row in per_state {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut ses = [0.0f64; 4];
    if per_state.len() > 1 {
        for row in per_state {
            for ((se, v), m) in ses.iter_mut().zip(row).zip(&means) {
                *se += (v - m) * (v - m);
            }
        }
        for se in &mut ses {
            *se = (*se / (n - 1.0) / n).sqrt();
        }
    }
    SweepPoint {
        inv_dqm,
        d1_weak_mean: means[0],
        d2_weak_mean: means[1],
        d1_proj_mean: means[2],
        d2_proj_mean: means[3],
        d1_weak_se: ses[0],
        d2_weak_se: ses[1],
        d1_proj_se: ses[2],
        d2_proj_se: ses[3],
    }
}

/// Location and value of a weak-scheme optimum, with the projective
/// reference at the same grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumSummary {
    pub argmin_inv_dqm: f64,
    pub weak_min: f64,
    pub proj_at_argmin: f64,
    /// (proj − weak_min) / proj; positive when the weak scheme wins.
    pub rel_advantage: f64,
    /// First and last grid values where the weak mean is below the
    /// projective mean, if anywhere.
    pub crossover: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub ensemble_size: usize,
    pub d1: OptimumSummary,
    pub d2: OptimumSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub kappa: f64,
    pub rows: Vec<SummaryRow>,
}

/// Condense a sweep into per-size optima and crossover intervals.
pub fn summarize(result: &SweepResult) -> Result<SweepSummary> {
    if result.sizes.is_empty() || result.sizes.iter().any(|s| s.points.is_empty()) {
        return Err(Error::invalid("sweep", "contains no data points"));
    }
    let rows = result
        .sizes
        .iter()
        .map(|size| SummaryRow {
            ensemble_size: size.ensemble_size,
            d1: optimum(
                &size.points,
                |p| (p.d1_weak_mean, p.d1_proj_mean),
            ),
            d2: optimum(
                &size.points,
                |p| (p.d2_weak_mean, p.d2_proj_mean),
            ),
        })
        .collect();
    Ok(SweepSummary {
        kappa: result.config.kappa,
        rows,
    })
}

fn optimum(points: &[SweepPoint], series: impl Fn(&SweepPoint) -> (f64, f64)) -> OptimumSummary {
    let mut best = &points[0];
    for p in points {
        if series(p).0 < series(best).0 {
            best = p;
        }
    }
    let (weak_min, proj_at_argmin) = series(best);
    let below: Vec<f64> = points
        .iter()
        .filter(|p| {
            let (w, pr) = series(p);
            w < pr
        })
        .map(|p| p.inv_dqm)
        .collect();
    OptimumSummary {
        argmin_inv_dqm: best.inv_dqm,
        weak_min,
        proj_at_argmin,
        rel_advantage: (proj_at_argmin - weak_min) / proj_at_argmin,
        crossover: below.first().map(|&lo| (lo, *below.last().unwrap())),
    }
}

impl std::fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "kappa = {}", self.kappa)?;
        for row in &self.rows {
            writeln!(f, "  n = {}", row.ensemble_size)?;
            for (name, o) in [("d1", &row.d1), ("d2", &row.d2)] {
                write!(
                    f,
                    "    {name}: min {:.6} at 1/dqm = {:.4} (projective {:.6}, advantage {:+.1}%)",
                    o.weak_min,
                    o.argmin_inv_dqm,
                    o.proj_at_argmin,
                    100.0 * o.rel_advantage
                )?;
                match o.crossover {
                    Some((lo, hi)) => writeln!(f, ", weak below projective on [{lo:.4}, {hi:.4}]")?,
                    None => writeln!(f, ", weak never below projective")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn default_grid_is_increasing_and_brackets_sqrt2() {
        let grid = default_inv_dqm_grid();
        assert_eq!(grid.len(), 24);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        assert!((grid[0] - 0.1).abs() < 1e-12);
        assert!((grid[23] - 3.0).abs() < 1e-12);
        let sqrt2 = 2.0f64.sqrt();
        assert!(grid.iter().any(|&g| g < sqrt2) && grid.iter().any(|&g| g > sqrt2));
    }

    #[test]
    fn config_validation_names_offending_field() {
        let mut cfg = ExperimentConfig::with_kappa(1.5);
        assert!(matches!(
            cfg.validate(),
            Err(Error::ConfigInvalid { field: "kappa", .. })
        ));
        cfg.kappa = 1.0;
        cfg.ensemble_sizes = vec![6, 5];
        assert!(matches!(
            cfg.validate(),
            Err(Error::ConfigInvalid {
                field: "ensemble_sizes",
                ..
            })
        ));
        cfg.ensemble_sizes = vec![6];
        cfg.inv_dqm_grid = vec![0.5, 0.5];
        assert!(matches!(
            cfg.validate(),
            Err(Error::ConfigInvalid {
                field: "inv_dqm_grid",
                ..
            })
        ));
        cfg.inv_dqm_grid = vec![0.5, 2e3];
        assert!(cfg.validate().is_err());
        cfg.inv_dqm_grid = vec![0.5, 1.0];
        cfg.u_range = (1.0, -1.0);
        assert!(matches!(
            cfg.validate(),
            Err(Error::ConfigInvalid {
                field: "u_range",
                ..
            })
        ));
        cfg.u_range = (-1.0, 1.0);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn random_states_respect_family_constraints() {
        let mut rng = substream(21, &[]);
        for _ in 0..1000 {
            let s = random_state(1.0, &mut rng).unwrap();
            assert!((s.dq() * s.dp() - 0.5).abs() < 1e-12);
            assert!(s.dq() >= 0.260 && s.dq() <= 1.9222, "dq = {}", s.dq());
            assert!(s.q0().abs() <= 3.0 && s.p0().abs() <= 3.0);
        }
        for _ in 0..100 {
            let s = random_state(0.8, &mut rng).unwrap();
            assert!((s.dq() * s.dp() - 0.625).abs() < 1e-12);
        }
        assert!(random_state(0.0, &mut rng).is_err());
    }

    #[test]
    fn random_states_are_reproducible() {
        let draw = |seed| {
            let mut rng = substream(seed, &[stream_tag::STATE, 0]);
            random_state(0.9, &mut rng).unwrap()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn projective_branch_ignores_the_meter() {
        let state = GaussianState::coherent(1.0, 0.0);
        let opts = TrialOptions::default();
        let run = |inv: f64| {
            let mut weak_rng = substream(3, &[1]);
            let mut proj_rng = substream(3, &[2]);
            run_trial(&state, 6, inv, &opts, &mut weak_rng, &mut proj_rng)
                .unwrap()
                .1
        };
        // same projective stream, different meters: identical baseline
        assert_eq!(run(0.5), run(2.0));
    }

    #[test]
    fn trial_rejects_bad_weakness() {
        let state = GaussianState::coherent(0.0, 0.0);
        let opts = TrialOptions::default();
        let mut a = substream(1, &[]);
        let mut b = substream(2, &[]);
        assert!(run_trial(&state, 6, 0.0, &opts, &mut a, &mut b).is_err());
        assert!(run_trial(&state, 6, f64::NAN, &opts, &mut a, &mut b).is_err());
    }

    #[test]
    fn run_trial_matches_closed_form_d1() {
        // at 1/dqm = sqrt(2): E[d1_weak] = (dq^2 + dp^2 + 1)/n,
        // E[d1_proj] = 2(dq^2 + dp^2)/n
        let inv = 2.0f64.sqrt();
        let opts = TrialOptions::default();
        let reps = 20_000usize;
        let cases = [
            // (state, expected weak mean, expected proj mean), n = 20
            (GaussianState::coherent(0.0, 0.0), 0.1, 0.1),
            (
                GaussianState::from_params(&StateParams::new(1.0, 1.0, 0.0, 0.0)).unwrap(),
                (2.0f64.cosh() + 1.0) / 20.0, // ~0.2381
                2.0 * 2.0f64.cosh() / 20.0,   // ~0.3762
            ),
        ];
        for (ci, (state, weak_expect, proj_expect)) in cases.iter().enumerate() {
            let mut sums = (0.0, 0.0);
            for i in 0..reps {
                let mut weak_rng = substream(23, &[1, ci as u64, i as u64]);
                let mut proj_rng = substream(23, &[2, ci as u64, i as u64]);
                let (w, p) =
                    run_trial(state, 20, inv, &opts, &mut weak_rng, &mut proj_rng).unwrap();
                sums.0 += w.d1;
                sums.1 += p.d1;
            }
            let weak_mean = sums.0 / reps as f64;
            let proj_mean = sums.1 / reps as f64;
            assert!(
                (weak_mean - weak_expect).abs() < 0.05 * weak_expect,
                "case {ci}: weak {weak_mean} vs {weak_expect}"
            );
            assert!(
                (proj_mean - proj_expect).abs() < 0.05 * proj_expect,
                "case {ci}: proj {proj_mean} vs {proj_expect}"
            );
        }
    }

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            n_states: 4,
            n_runs: 25,
            ensemble_sizes: vec![6],
            inv_dqm_grid: vec![0.5, 1.0, 2.0],
            master_seed: 99,
            ..ExperimentConfig::with_kappa(1.0)
        }
    }

    #[test]
    fn sweep_has_expected_shape() {
        let result = run_sweep(&small_config()).unwrap();
        assert_eq!(result.sizes.len(), 1);
        assert_eq!(result.sizes[0].ensemble_size, 6);
        assert_eq!(result.sizes[0].points.len(), 3);
        for p in &result.sizes[0].points {
            assert!(p.d1_weak_mean >= 0.0 && p.d2_weak_mean >= 0.0);
            assert!(p.d1_weak_se >= 0.0 && p.d2_proj_se >= 0.0);
        }
    }

    #[test]
    fn sweep_is_invariant_under_thread_count() {
        let cfg = small_config();
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let r1 = pool1.install(|| run_sweep(&cfg)).unwrap();
        let r4 = pool4.install(|| run_sweep(&cfg)).unwrap();
        assert_eq!(r1, r4);
    }

    #[test]
    fn averaging_modes_differ_but_share_streams() {
        let cfg = small_config();
        let avg_first = ExperimentConfig {
            average_estimates_first: true,
            ..cfg.clone()
        };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&avg_first).unwrap();
        // averaging estimates first suppresses the run-to-run scatter, so
        // its d-values must come out systematically smaller
        let pa = &a.sizes[0].points[1];
        let pb = &b.sizes[0].points[1];
        assert!(pb.d1_weak_mean < pa.d1_weak_mean);
        assert!(pb.d2_proj_mean < pa.d2_proj_mean);
    }

    #[test]
    fn summarize_reports_minima_and_crossovers() {
        let point = |inv: f64, w: f64, p: f64| SweepPoint {
            inv_dqm: inv,
            d1_weak_mean: w,
            d2_weak_mean: w,
            d1_proj_mean: p,
            d2_proj_mean: p,
            d1_weak_se: 0.0,
            d2_weak_se: 0.0,
            d1_proj_se: 0.0,
            d2_proj_se: 0.0,
        };
        let result = SweepResult {
            config: ExperimentConfig::with_kappa(1.0),
            sizes: vec![SizeSweep {
                ensemble_size: 6,
                points: vec![
                    point(0.5, 3.0, 1.0),
                    point(1.0, 0.8, 1.0),
                    point(1.5, 0.9, 1.0),
                    point(2.0, 2.0, 1.0),
                ],
            }],
        };
        let summary = summarize(&result).unwrap();
        let d1 = summary.rows[0].d1;
        assert_eq!(d1.argmin_inv_dqm, 1.0);
        assert_eq!(d1.weak_min, 0.8);
        assert_eq!(d1.crossover, Some((1.0, 1.5)));
        assert!((d1.rel_advantage - 0.2).abs() < 1e-12);

        let empty = SweepResult {
            config: ExperimentConfig::with_kappa(1.0),
            sizes: vec![],
        };
        assert!(summarize(&empty).is_err());
    }
}
