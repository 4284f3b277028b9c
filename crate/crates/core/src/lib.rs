//! Discrete-time coined quantum walks on the line with step-dependent coins.
//!
//! - [`walk`]: coins, shift, sparse pure-state evolution, closed-form endpoint amplitudes.
//! - [`analysis`]: position/coin distributions, Shannon entropy, KL divergence, fidelity,
//!   support counts, moments and per-step series.
//! - [`decoherence`]: density-matrix walk with projective coin/position dephasing.
//! - [`characterize`]: Gaussian fits, rule-based walk classification, angle sweeps.
//! - [`bloch`]: per-site Bloch vectors.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`, which every tolerance in the test suite assumes.
//!
//! ```
//! use qwalk::{evolve, position_distribution, shannon_entropy, CoinSpec, InitialSpec};
//!
//! let spec = CoinSpec::step_dependent(std::f64::consts::FRAC_PI_4);
//! let state = evolve(&InitialSpec::zero(), &spec, 3).unwrap();
//! assert!(shannon_entropy(&position_distribution(&state)).abs() < 1e-12);
//! ```

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bloch;
pub mod characterize;
pub mod decoherence;
mod error;
pub mod scalar;
pub mod walk;

pub use analysis::{
    coin_marginal, divergence_series, entropy_series, fidelity, kl_divergence, kl_divergence_smoothed, moments,
    position_distribution, shannon_entropy, support_count, CoinMarginal, Distribution, Divergence, DivergenceRecord,
    DivergenceSeries, EntropyRecord, EntropySeries, Moments, Outcomes, SUPPORT_THRESHOLD,
};
pub use bloch::{bloch_map, bloch_vector, edge_overlap, edge_vectors, BlochVector};
pub use characterize::{
    classify, classify_with, fit_gaussian, gaussian_pdf, sweep, sweep_angle, sweep_with, Classification,
    ClassifierConfig, FitFrame, GaussianFit, SweepPoint, WalkClass, DEFAULT_HORIZON, TABLE_ONE,
};
pub use decoherence::{
    decoherent_step, decoherent_walk, DecoherenceParams, DecoherentWalk, DensityMatrix, DEFAULT_DENSITY_STEP_CAP,
};
pub use error::{Result, WalkError};
pub use scalar::{Cx, Real};
pub use walk::{
    apply_step, build_coin, endpoint_amplitudes, evolve, evolve_capped, initial_state, BasisStart, CoinMatrix,
    CoinMode, CoinSpec, InitialSpec, Spinor, Walk, WalkerState, DEFAULT_STEP_CAP,
};

pub type Complex64 = Cx<f64>;
pub type Spinor64 = Spinor<f64>;
pub type CoinSpec64 = CoinSpec<f64>;
pub type CoinMatrix64 = CoinMatrix<f64>;
pub type InitialSpec64 = InitialSpec<f64>;
pub type WalkerState64 = WalkerState<f64>;
pub type Distribution64 = Distribution<f64>;
pub type CoinMarginal64 = CoinMarginal<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DecoherenceParams64 = DecoherenceParams<f64>;
pub type BlochVector64 = BlochVector<f64>;
pub type GaussianFit64 = GaussianFit<f64>;

pub type WalkerState32 = WalkerState<f32>;
pub type Distribution32 = Distribution<f32>;
pub type DensityMatrix32 = DensityMatrix<f32>;
