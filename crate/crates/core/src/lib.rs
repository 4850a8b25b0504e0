//! Estimation of single-mode Gaussian states from sequential weak and
//! projective quadrature measurements, compared against a projective-only
//! baseline.
//!
//! The crate simulates, entirely in phase space and in closed form:
//!
//! * the displaced squeezed thermal state family and its Wigner
//!   densities ([`gaussian`]);
//! * a tunable-strength pointer coupling, its reading densities, and the
//!   back-action it leaves on the state ([`measurement`]);
//! * the two-arm protocol that uses every copy twice — weak `q` then
//!   projective `p` on one half of the ensemble, the reverse order on the
//!   other — and the estimators scored by the distances `d1` (centers)
//!   and `d2` (spreads) ([`protocol`]);
//! * the Monte Carlo harness sweeping the measurement weakness over a
//!   grid, with fully deterministic, thread-count-independent results
//!   ([`experiment`], [`rng`]).
//!
//! The `gaussest` binary exposes all of this on the command line; see the
//! repository README for the CSV and config schemas.
//!
//! ```
//! use gaussest::gaussian::{GaussianState, StateParams};
//! use gaussest::measurement::Meter;
//! use gaussest::protocol::{
//!     distances, estimate_from_readings, run_weak_protocol, EstimatorOptions,
//! };
//! use gaussest::rng::substream;
//!
//! let state = GaussianState::from_params(&StateParams::new(0.5, 1.0, 1.0, -2.0))?;
//! let meter = Meter::new(1.0)?; // dpm = 0.5 implied
//!
//! let mut rng = substream(7, &[]);
//! let readings = run_weak_protocol(&state, 6, &meter, &mut rng)?;
//! let estimate = estimate_from_readings(&readings, &meter, &EstimatorOptions::default())?;
//! let scores = distances(&state, &estimate);
//! assert!(scores.d1 >= 0.0 && scores.d2 >= 0.0);
//! # Ok::<(), gaussest::Error>(())
//! ```

pub mod config;
pub mod emit;
pub mod error;
pub mod experiment;
pub mod gaussian;
pub mod measurement;
pub mod protocol;
pub mod rng;
pub mod selfcheck;

pub use error::{Error, Result};
pub use gaussian::{Gaussian1D, GaussianState, StateParams, VarianceMatrix};
pub use measurement::{InteractionSymplectic, MeasurementOutcome, Meter};
pub use protocol::{DistanceMeasures, EstimationResult, EstimatorOptions, ReadingSet, Scheme};
pub use experiment::{ExperimentConfig, SweepPoint, SweepResult};
