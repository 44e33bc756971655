//! Analytical and simulated performance of a reconfigurable-intelligent-surface
//! assisted two-way relaying network.
//!
//! Two users exchange signals through an `M`-element passive surface, either
//! with power-domain NOMA (superposed uplink, SIC at each receiver) or with
//! orthogonal time slots. The crate provides
//!
//! * [`model`] — system configuration, power allocation, SINR expressions;
//! * [`specfun`] — the special functions backing the closed-form results
//!   (normal integral, incomplete gamma, modified Bessel `K0`);
//! * [`quad`] — adaptive quadrature used by the ergodic-rate integrals and
//!   by test oracles;
//! * [`channel`] — a deterministic, seekable fading sampler;
//! * [`analytic`] — outage probability, ergodic rate, bounds, asymptotics;
//! * [`mcsim`] — a Monte Carlo estimator validating the analytic layer;
//! * [`metrics`] — throughput, energy efficiency, and slope/diversity fits.
//!
//! All analytic routines take linear (not dB) powers; conversion from dB
//! belongs to the caller.

// Reference constants (pinned oracle outputs, generated coefficient tables)
// deliberately keep every digit of the computation that produced them.
#![allow(clippy::excessive_precision)]

pub mod analytic;
pub mod channel;
pub mod mcsim;
pub mod metrics;
pub mod model;
pub mod quad;
pub mod specfun;
