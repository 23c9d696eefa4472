//! Interference-rejection-combiner SINR and the gain from adding receive
//! antennas.
//!
//! - [`linalg`]: Hermitian positive-definite solves and the rank-one inverse
//!   update.
//! - [`irc`]: SINR evaluation, the closed-form per-antenna gain and the
//!   incremental [`irc::IrcState`].
//! - [`selection`]: greedy antenna selection ranked by that gain.
//! - [`comp`]: the four-cell uplink CoMP sweep.

pub mod comp;
pub mod golden;
pub mod irc;
pub mod linalg;
pub mod random;
pub mod selection;

pub use irc::{
    add_antenna, cumulative_gain, gain_one_antenna, init_state, irc_sinr_covariance_oracle,
    irc_sinr_direct, AntennaRow, GainTerms, IrcError, IrcState, UserChannelSet,
};
pub use linalg::{
    hermitian_inverse, hermitian_solve, rank_one_inverse_update, ComplexMatrix, ComplexVector,
    LinalgError,
};
pub use num_complex::Complex64;
