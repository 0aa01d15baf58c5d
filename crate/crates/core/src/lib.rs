//! Multi-antenna anti-jamming baseband library.
//!
//! Implements a narrowband multi-antenna link simulator together with a
//! preamble-assisted receiver that performs joint carrier-frequency-offset
//! (CFO) synchronization and jamming cancellation. The receiver designs a
//! CFO-compensated spatio-temporal filter by regularized least squares
//! against the known preamble and picks the CFO with a one-dimensional grid
//! search over candidate offsets. A streaming (rank-one update) solver, a
//! two-stage minimum-eigenvector baseline receiver, and executable oracles
//! for the exact-recovery conditions are included, plus an experiment
//! harness for seeded Monte-Carlo BER sweeps.
//!
//! Modules:
//!
//! - [`waveform`]: transmit chain (bits, QPSK, root-raised-cosine shaping,
//!   frame/preamble construction)
//! - [`channel`]: received-signal model (multi-antenna channel, CFO, delay,
//!   jammers, AWGN) with SNR/SJR calibration
//! - [`stfilter`]: the spatio-temporal least-squares filter design, CFO grid
//!   search, and streaming solver
//! - [`baseline`]: two-stage minimum-eigenvector receiver for comparison
//! - [`receiver`]: matched filtering, symbol decisions, BER accounting
//! - [`theory`]: executable rank/recovery oracles for the noiseless
//!   exact-cancellation conditions
//! - [`harness`]: experiment configuration, Monte-Carlo trials, sweeps, and
//!   CSV/plot-data emission

pub mod baseline;
pub mod channel;
pub mod error;
pub mod harness;
pub mod receiver;
mod rng;
pub mod stfilter;
pub mod theory;
pub mod waveform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
