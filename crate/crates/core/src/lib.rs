//! Influence estimation over retweet cascades whose diffusion structure is
//! unobserved, together with the supporting analytics: synthetic benchmarks
//! with known ground truth, decay-rate calibration, partisan polarization and
//! engagement metrics, botness population classification, and the 2D
//! polarization map.
//!
//! Data sources expose a cascade as a star — every retweet points at the
//! original tweet — so who-retweeted-whom is latent. Instead of reconstructing
//! one tree, the engine marginalizes over *all* trees consistent with the
//! temporal order, weighting attachments by follower count and temporal decay,
//! and computes each event's expected number of descendants in O(n^3).
//!
//! Everything numeric is generic over the scalar type (any [`scalar::Real`],
//! i.e. `f32` or `f64`); the crate root exports `f64` aliases for the common
//! case.
//!
//! ```
//! use cascades_core::cascade::{Cascade, CascadeEvent, DecayConfig};
//! use cascades_core::influence::{pairwise_influence, tweet_influence};
//!
//! let cascade = Cascade::new(
//!     "c1",
//!     vec![
//!         CascadeEvent::new("t1", "alice", 0.0, 1200),
//!         CascadeEvent::new("t2", "bob", 35.0, 45),
//!         CascadeEvent::new("t3", "carol", 62.0, 9000),
//!     ],
//! )
//! .unwrap();
//! let matrix = pairwise_influence(&cascade, &DecayConfig::default()).unwrap();
//! let phi = tweet_influence(&matrix);
//! assert_eq!(phi.len(), 3);
//! assert_eq!(phi[2], 0.0); // the last event influences nobody
//! ```

pub mod calibrate;
pub mod cascade;
pub mod influence;
pub mod io;
pub mod partisan;
pub mod polmap;
pub mod scalar;
pub mod scenario;
pub mod stats;
pub mod synth;

pub use scalar::Real;

/// Double-precision aliases for the core types.
pub type Cascade64 = cascade::Cascade<f64>;
pub type CascadeEvent64 = cascade::CascadeEvent<f64>;
pub type DecayConfig64 = cascade::DecayConfig<f64>;
pub type PairwiseInfluenceMatrix64 = influence::PairwiseInfluenceMatrix<f64>;
pub type InfluenceReport64 = influence::InfluenceReport<f64>;
pub type DiffusionScenario64 = scenario::DiffusionScenario<f64>;
pub type GroundTruth64 = synth::GroundTruth<f64>;
pub type SampledDiffusion64 = synth::SampledDiffusion<f64>;
pub type CalibrationResult64 = calibrate::CalibrationResult<f64>;
pub type UserRecord64 = partisan::UserRecord<f64>;
pub type ClassifiedUser64 = partisan::ClassifiedUser<f64>;
pub type PolarizationGrid64 = polmap::PolarizationGrid<f64>;
