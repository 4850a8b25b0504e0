//! Single-mode Gaussian states in phase space (ħ = 1).
//!
//! A state is fully described by its center `(q0, p0)` and the quadrature
//! spreads `(Δq, Δp)`, the standard deviations of the position and momentum
//! marginals. The two-parameter family used throughout is built from a
//! squeezing parameter `u` and a temperature parameter `κ ∈ (0, 1]`:
//!
//! ```text
//! Δq = e^u / √(2κ),   Δp = e^-u / √(2κ),   Δq·Δp = 1/(2κ) ≥ 1/2
//! ```
//!
//! `κ = 1` is zero temperature; `u = 0, κ = 1` gives the coherent state
//! with Δq = Δp = 1/√2, which saturates the uncertainty bound. All types
//! here are immutable values and every operation is pure.

use crate::error::{Error, Result};
use crate::rng::standard_normal;
use rand_core::RngCore;
use std::f64::consts::PI;

/// Slack on the uncertainty bound. The coherent state sits exactly on the
/// boundary and must not be rejected by round-off.
pub const UNCERTAINTY_TOL: f64 = 1e-12;

/// Parameters of the displaced squeezed thermal family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateParams {
    /// Squeezing; Δq/Δp = e^{2u}.
    pub u: f64,
    /// Temperature parameter in (0, 1]; κ = 1 is zero temperature and
    /// κ → 0 is infinite temperature (spreads diverge, hence excluded).
    pub kappa: f64,
    pub q0: f64,
    pub p0: f64,
}

impl StateParams {
    pub fn new(u: f64, kappa: f64, q0: f64, p0: f64) -> Self {
        StateParams { u, kappa, q0, p0 }
    }
}

/// A displaced squeezed thermal state with diagonal variance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    q0: f64,
    p0: f64,
    dq: f64,
    dp: f64,
}

impl GaussianState {
    /// Build a state directly from its center and spreads.
    pub fn new(q0: f64, p0: f64, dq: f64, dp: f64) -> Result<Self> {
        if !q0.is_finite() || !p0.is_finite() {
            return Err(Error::invalid("center", "must be finite"));
        }
        if !dq.is_finite() || dq <= 0.0 {
            return Err(Error::invalid("dq", "must be finite and positive"));
        }
        if !dp.is_finite() || dp <= 0.0 {
            return Err(Error::invalid("dp", "must be finite and positive"));
        }
        if dq * dp < 0.5 - UNCERTAINTY_TOL {
            return Err(Error::invalid(
                "dq*dp",
                format!("uncertainty product {} below 1/2", dq * dp),
            ));
        }
        Ok(GaussianState { q0, p0, dq, dp })
    }

    /// Build a state from `(u, κ, q0, p0)`.
    pub fn from_params(params: &StateParams) -> Result<Self> {
        let StateParams { u, kappa, q0, p0 } = *params;
        if !kappa.is_finite() || kappa <= 0.0 || kappa > 1.0 {
            return Err(Error::invalid("kappa", "must lie in (0, 1]"));
        }
        if !u.is_finite() {
            return Err(Error::invalid("u", "must be finite"));
        }
        if !q0.is_finite() || !p0.is_finite() {
            return Err(Error::invalid("center", "must be finite"));
        }
        let scale = 1.0 / (2.0 * kappa).sqrt();
        Ok(GaussianState {
            q0,
            p0,
            dq: u.exp() * scale,
            dp: (-u).exp() * scale,
        })
    }

    /// The coherent state centered at `(q0, p0)`: Δq = Δp = 1/√2.
    pub fn coherent(q0: f64, p0: f64) -> Self {
        // same expression as `from_params` with u = 0, κ = 1, so the two
        // construction routes agree bit for bit
        let spread = 1.0 / 2.0f64.sqrt();
        GaussianState {
            q0,
            p0,
            dq: spread,
            dp: spread,
        }
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Position spread Δq.
    pub fn dq(&self) -> f64 {
        self.dq
    }

    /// Momentum spread Δp.
    pub fn dp(&self) -> f64 {
        self.dp
    }

    /// Second-moment matrix; diagonal for every state in this family.
    pub fn variance_matrix(&self) -> VarianceMatrix {
        VarianceMatrix {
            vqq: self.dq * self.dq,
            vpp: self.dp * self.dp,
            vqp: 0.0,
        }
    }

    /// Wigner density at the phase-space point `(q, p)`.
    ///
    /// Normalized to unit integral: the prefactor is `1/(2π Δq Δp)`,
    /// equivalently `√|G|/π` for the quadratic form G = (2V)⁻¹.
    pub fn wigner_density(&self, q: f64, p: f64) -> f64 {
        let zq = (q - self.q0) / self.dq;
        let zp = (p - self.p0) / self.dp;
        (-0.5 * (zq * zq + zp * zp)).exp() / (2.0 * PI * self.dq * self.dp)
    }

    /// Position marginal: N(q0, Δq²).
    pub fn marginal_q(&self) -> Gaussian1D {
        Gaussian1D::unchecked(self.q0, self.dq * self.dq)
    }

    /// Momentum marginal: N(p0, Δp²).
    pub fn marginal_p(&self) -> Gaussian1D {
        Gaussian1D::unchecked(self.p0, self.dp * self.dp)
    }

    /// Point transformation shifting the center by `(dq0, dp0)`; spreads
    /// are untouched.
    pub fn displace(&self, dq0: f64, dp0: f64) -> Self {
        GaussianState {
            q0: self.q0 + dq0,
            p0: self.p0 + dp0,
            ..*self
        }
    }
}

/// 2×2 second-moment matrix `[[vqq, vqp], [vqp, vpp]]`.
///
/// `vqp` is zero for every state this crate constructs; the field exists so
/// the general positivity condition can be checked as stated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceMatrix {
    pub vqq: f64,
    pub vpp: f64,
    pub vqp: f64,
}

impl VarianceMatrix {
    pub fn det(&self) -> f64 {
        self.vqq * self.vpp - self.vqp * self.vqp
    }

    /// Physical validity: V + (i/2)β positive semidefinite. For a real
    /// symmetric 2×2 matrix this reduces to positive diagonal and
    /// det(V) ≥ 1/4 (up to [`UNCERTAINTY_TOL`]).
    ///
    /// Degenerate or non-finite inputs report `false`.
    pub fn satisfies_uncertainty(&self) -> bool {
        self.vqq > 0.0 && self.vpp > 0.0 && self.det() >= 0.25 - UNCERTAINTY_TOL
    }
}

/// A univariate normal density. Carrier for every meter-reading
/// distribution and marginal in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian1D {
    mean: f64,
    variance: f64,
}

impl Gaussian1D {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::invalid("mean", "must be finite"));
        }
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::invalid("variance", "must be finite and positive"));
        }
        Ok(Gaussian1D { mean, variance })
    }

    /// Internal constructor for variances that are positive by
    /// construction (sums of squares of positive spreads).
    pub(crate) fn unchecked(mean: f64, variance: f64) -> Self {
        debug_assert!(variance > 0.0);
        Gaussian1D { mean, variance }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.sd();
        (-0.5 * z * z).exp() / (self.sd() * (2.0 * PI).sqrt())
    }

    /// One draw. Deterministic given the generator state; distinct
    /// streams may be used concurrently, a single stream must not.
    pub fn sample<R: RngCore>(&self, rng: &mut R) -> f64 {
        self.mean + self.sd() * standard_normal(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, uniform_in};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    /// Independent route to the spreads: form G = Sᵀ(κI)S with
    /// S = diag(e⁻ᵘ, eᵘ), invert it, and read the diagonal of V = ½G⁻¹.
    #[allow(clippy::needless_range_loop)]
    fn spreads_via_matrix(u: f64, kappa: f64) -> (f64, f64) {
        let s = [[(-u).exp(), 0.0], [0.0, u.exp()]];
        // g = sᵀ (κ I) s
        let mut g = [[0.0f64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    g[i][j] += s[k][i] * kappa * s[k][j];
                }
            }
        }
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let inv = [
            [g[1][1] / det, -g[0][1] / det],
            [-g[1][0] / det, g[0][0] / det],
        ];
        ((0.5 * inv[0][0]).sqrt(), (0.5 * inv[1][1]).sqrt())
    }

    /// 2-D trapezoid quadrature of the Wigner density over ±8 spreads.
    fn wigner_quadrature(state: &GaussianState) -> f64 {
        let steps = 80usize; // h = spread / 5
        let hq = 16.0 * state.dq() / steps as f64;
        let hp = 16.0 * state.dp() / steps as f64;
        let q_lo = state.q0() - 8.0 * state.dq();
        let p_lo = state.p0() - 8.0 * state.dp();
        let mut total = 0.0;
        for i in 0..=steps {
            let wq = if i == 0 || i == steps { 0.5 } else { 1.0 };
            for j in 0..=steps {
                let wp = if j == 0 || j == steps { 0.5 } else { 1.0 };
                total += wq
                    * wp
                    * state.wigner_density(q_lo + i as f64 * hq, p_lo + j as f64 * hp);
            }
        }
        total * hq * hp
    }

    #[test]
    fn coherent_state_spreads() {
        let s = GaussianState::from_params(&StateParams::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        assert!((s.dq() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((s.dp() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(s, GaussianState::coherent(0.0, 0.0));
    }

    #[test]
    fn squeezed_state_matches_matrix_oracle() {
        let s = GaussianState::from_params(&StateParams::new(0.5, 1.0, 0.0, 0.0)).unwrap();
        let (dq, dp) = spreads_via_matrix(0.5, 1.0);
        assert!((s.dq() - dq).abs() < 1e-12);
        assert!((s.dp() - dp).abs() < 1e-12);
        // frozen values from the oracle
        assert!((s.dq() - 1.165_821_9).abs() < 1e-7);
        assert!((s.dp() - 0.428_881_9).abs() < 1e-7);
        assert!((s.dq() * s.dp() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn thermal_state_center_and_product() {
        let s = GaussianState::from_params(&StateParams::new(0.0, 0.8, 1.0, -2.0)).unwrap();
        assert_eq!((s.q0(), s.p0()), (1.0, -2.0));
        let (dq, dp) = spreads_via_matrix(0.0, 0.8);
        assert!((s.dq() - dq).abs() < 1e-12);
        assert!((s.dp() - dp).abs() < 1e-12);
        assert!((s.dq() - 0.790_569_4).abs() < 1e-7);
        assert!((s.dp() - 0.790_569_4).abs() < 1e-7);
        assert!((s.dq() * s.dp() - 0.625).abs() < 1e-12);
    }

    #[test]
    fn invalid_params_are_rejected() {
        for (u, kappa, q0, p0) in [
            (0.0, 0.0, 0.0, 0.0),
            (0.0, -0.5, 0.0, 0.0),
            (0.0, 1.5, 0.0, 0.0),
            (0.0, f64::NAN, 0.0, 0.0),
            (f64::INFINITY, 1.0, 0.0, 0.0),
            (0.0, 1.0, f64::NAN, 0.0),
            (0.0, 1.0, 0.0, f64::INFINITY),
        ] {
            let res = GaussianState::from_params(&StateParams::new(u, kappa, q0, p0));
            assert!(
                matches!(res, Err(Error::InvalidParameter { .. })),
                "accepted ({u}, {kappa}, {q0}, {p0})"
            );
        }
    }

    #[test]
    fn new_rejects_sub_heisenberg_spreads() {
        assert!(GaussianState::new(0.0, 0.0, 0.5, 0.5).is_err());
        assert!(GaussianState::new(0.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2).is_ok());
        assert!(GaussianState::new(0.0, 0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn variance_matrix_values() {
        let coherent = GaussianState::coherent(0.0, 0.0).variance_matrix();
        assert!((coherent.vqq - 0.5).abs() < 1e-12);
        assert!((coherent.vpp - 0.5).abs() < 1e-12);
        assert_eq!(coherent.vqp, 0.0);

        let v = GaussianState::from_params(&StateParams::new(0.5, 1.0, 0.0, 0.0))
            .unwrap()
            .variance_matrix();
        assert!((v.vqq - 1.359_140_9).abs() < 1e-7);
        assert!((v.vpp - 0.183_939_7).abs() < 1e-7);
    }

    #[test]
    fn uncertainty_check_cases() {
        let ok = VarianceMatrix {
            vqq: 0.5,
            vpp: 0.5,
            vqp: 0.0,
        };
        assert!(ok.satisfies_uncertainty());

        let too_sharp = VarianceMatrix {
            vqq: 0.25,
            vpp: 0.25,
            vqp: 0.0,
        };
        assert!(!too_sharp.satisfies_uncertainty());

        let correlated = VarianceMatrix {
            vqq: 1.0,
            vpp: 0.5,
            vqp: 0.4,
        };
        assert!((correlated.det() - 0.34).abs() < 1e-12);
        assert!(correlated.satisfies_uncertainty());

        let nan = VarianceMatrix {
            vqq: f64::NAN,
            vpp: 0.5,
            vqp: 0.0,
        };
        assert!(!nan.satisfies_uncertainty());
    }

    #[test]
    fn wigner_peak_values() {
        let coherent = GaussianState::coherent(0.0, 0.0);
        assert!((coherent.wigner_density(0.0, 0.0) - 1.0 / PI).abs() < 1e-9);

        // peak height √|G|/π = κ/π for this family
        let s = GaussianState::from_params(&StateParams::new(0.5, 0.9, 0.0, 0.0)).unwrap();
        assert!((s.wigner_density(0.0, 0.0) - 0.9 / PI).abs() < 1e-9);
        assert!((s.wigner_density(0.0, 0.0) - 0.286_478_9).abs() < 1e-7);
    }

    #[test]
    fn wigner_is_peaked_at_center() {
        let s = GaussianState::from_params(&StateParams::new(-0.3, 0.7, 1.0, 2.0)).unwrap();
        let at_center = s.wigner_density(1.0, 2.0);
        for (dq, dp) in [(0.1, 0.0), (0.0, 0.1), (-0.2, 0.3)] {
            assert!(at_center > s.wigner_density(1.0 + dq, 2.0 + dp));
        }
    }

    #[test]
    fn wigner_normalizes_by_quadrature() {
        let s = GaussianState::from_params(&StateParams::new(0.6, 0.85, -1.5, 2.5)).unwrap();
        assert!((wigner_quadrature(&s) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn marginals_match_centers_and_spreads() {
        let c = GaussianState::coherent(1.0, 2.0);
        let mq = c.marginal_q();
        assert_eq!(mq.mean(), 1.0);
        assert!((mq.variance() - 0.5).abs() < 1e-12);

        let s = GaussianState::from_params(&StateParams::new(0.5, 1.0, 0.0, 0.0)).unwrap();
        let mp = s.marginal_p();
        assert_eq!(mp.mean(), 0.0);
        assert!((mp.variance() - 0.183_939_7).abs() < 1e-7);
    }

    #[test]
    fn marginal_q_matches_integrated_wigner() {
        // integrate the Wigner density over p on a grid and compare to the
        // closed-form marginal, pointwise
        let s = GaussianState::from_params(&StateParams::new(0.4, 0.9, 0.5, -1.0)).unwrap();
        let marginal = s.marginal_q();
        let steps = 400usize;
        let hp = 16.0 * s.dp() / steps as f64;
        let p_lo = s.p0() - 8.0 * s.dp();
        for q in [-0.5, 0.5, 1.3, 2.0] {
            let mut total = 0.0;
            for j in 0..=steps {
                let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
                total += w * s.wigner_density(q, p_lo + j as f64 * hp);
            }
            total *= hp;
            assert!(
                (total - marginal.pdf(q)).abs() < 1e-6,
                "q = {q}: {total} vs {}",
                marginal.pdf(q)
            );
        }
    }

    #[test]
    fn displacement_moves_center_only() {
        let c = GaussianState::coherent(0.0, 0.0);
        let moved = c.displace(3.0, -1.0);
        assert_eq!((moved.q0(), moved.p0()), (3.0, -1.0));
        assert_eq!(moved.dq().to_bits(), c.dq().to_bits());
        assert_eq!(moved.dp().to_bits(), c.dp().to_bits());

        let s = GaussianState::from_params(&StateParams::new(0.2, 0.9, 0.3, 0.4)).unwrap();
        assert_eq!(s.displace(0.0, 0.0), s);
        let back = s.displace(3.0, -1.0).displace(-3.0, 1.0);
        assert!((back.q0() - s.q0()).abs() < 1e-12);
        assert!((back.p0() - s.p0()).abs() < 1e-12);
        assert_eq!(back.dq().to_bits(), s.dq().to_bits());
    }

    #[test]
    fn gaussian1d_rejects_bad_variance() {
        assert!(Gaussian1D::new(0.0, 0.0).is_err());
        assert!(Gaussian1D::new(0.0, -1.0).is_err());
        assert!(Gaussian1D::new(f64::NAN, 1.0).is_err());
        assert!(Gaussian1D::new(0.0, 2.5).is_ok());
    }

    #[test]
    fn gaussian1d_pdf_normalizes() {
        let g = Gaussian1D::new(2.0, 4.5).unwrap();
        let steps = 400usize;
        let h = 16.0 * g.sd() / steps as f64;
        let lo = g.mean() - 8.0 * g.sd();
        let mut total = 0.0;
        for i in 0..=steps {
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            total += w * g.pdf(lo + i as f64 * h);
        }
        assert!((total * h - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let g = Gaussian1D::new(0.0, 1.0).unwrap();
        let mut a = substream(123, &[9]);
        let mut b = substream(123, &[9]);
        for _ in 0..32 {
            assert_eq!(g.sample(&mut a).to_bits(), g.sample(&mut b).to_bits());
        }
    }

    proptest! {
        #[test]
        fn family_satisfies_uncertainty(
            u in -2.0f64..2.0,
            kappa in 0.001f64..=1.0,
            q0 in -10.0f64..10.0,
            p0 in -10.0f64..10.0,
        ) {
            let s = GaussianState::from_params(&StateParams::new(u, kappa, q0, p0)).unwrap();
            prop_assert!(s.variance_matrix().satisfies_uncertainty());
            prop_assert!((s.dq() * s.dp() - 1.0 / (2.0 * kappa)).abs() < 1e-12);
        }

        #[test]
        fn displacement_round_trip(
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
        ) {
            let s = GaussianState::coherent(0.25, -0.75);
            let back = s.displace(a, b).displace(-a, -b);
            prop_assert!((back.q0() - s.q0()).abs() < 1e-12);
            prop_assert!((back.p0() - s.p0()).abs() < 1e-12);
            prop_assert_eq!(back.dq().to_bits(), s.dq().to_bits());
            prop_assert_eq!(back.dp().to_bits(), s.dp().to_bits());
        }
    }

    #[test]
    fn sample_moments_match_density() {
        let g = Gaussian1D::new(2.0, 4.5).unwrap();
        let mut rng = substream(31, &[stream_tag_for_test()]);
        let n = 100_000usize;
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..n {
            let x = g.sample(&mut rng);
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let var = (sumsq - sum * sum / n as f64) / (n as f64 - 1.0);
        assert!((mean - 2.0).abs() < 3.0 * (4.5f64 / n as f64).sqrt());
        assert!((var - 4.5).abs() < 0.05 * 4.5);
    }

    fn stream_tag_for_test() -> u64 {
        99
    }

    #[test]
    fn random_family_spreads_cover_expected_range() {
        // sanity on the u-range used by the experiment harness
        let mut rng = substream(5, &[]);
        for _ in 0..1000 {
            let u = uniform_in(-1.0, 1.0, &mut rng);
            let s = GaussianState::from_params(&StateParams::new(u, 1.0, 0.0, 0.0)).unwrap();
            assert!(s.dq() >= 0.260 && s.dq() <= 1.9222);
        }
    }
}
