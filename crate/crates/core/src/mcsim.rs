//! Monte Carlo validation layer.
//!
//! Estimates outage probability and ergodic rate by sampling the same
//! channel model the closed forms approximate. Determinism is absolute: the
//! trial space is cut into fixed batches of 2¹⁶ trials, every batch seeks
//! its own generator position (see [`crate::channel`]), partial results are
//! folded in batch order, and outage tallies are integers — so the estimate
//! is bit-identical for any thread count and any completion order.

use crate::channel::{ChannelRng, RngHandle};
use crate::model::{
    sinr_noma_d1, sinr_noma_d2, snr_oma_ris, snr_twr_oma, Scheme, SicMode, SystemConfig, User,
};
use rayon::prelude::*;
use thiserror::Error;

/// Trials per batch; one batch is the unit of parallel work and of
/// generator addressing.
const BATCH: u64 = 1 << 16;

/// Below this many observed failure events a proportion estimate is marked
/// statistically weak.
const CONFIDENCE_FLOOR: u64 = 100;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("simulation needs at least one trial")]
    ZeroTrials,
    #[error("transmit power must be positive and finite, got {0}")]
    InvalidPower(f64),
}

/// Which quantity a run estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimMetric {
    /// Probability that the link's SINR falls below its decoding threshold.
    Outage,
    /// Mean achievable rate `E[log2(1 + SINR)]`, slot-share included.
    ErgodicRate,
}

/// How the residual interference channel enters imperfect SIC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ResidualMode {
    /// Draw `|g_h|²` per trial — the physically faithful route.
    #[default]
    Random,
    /// Replace `|g_h|²` by its mean power, matching the closed forms.
    Averaged,
}

impl ResidualMode {
    pub fn label(self) -> &'static str {
        match self {
            ResidualMode::Random => "random",
            ResidualMode::Averaged => "averaged",
        }
    }
}

/// One fully specified simulation run.
#[derive(Debug, Clone)]
pub struct SimSpec<'a> {
    pub cfg: &'a SystemConfig,
    pub scheme: Scheme,
    pub user: User,
    pub sic: SicMode,
    pub metric: SimMetric,
    pub residual: ResidualMode,
    pub p_u: f64,
    pub trials: u64,
    pub handle: RngHandle,
}

/// A Monte Carlo estimate with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    /// Half-width of the normal-theory 95% confidence interval.
    pub ci95_half_width: f64,
    pub trials: u64,
    /// Set when the run saw too few informative events (fewer than 100
    /// failures for a proportion; fewer than 100 trials for a mean) for the
    /// normal-theory interval to be trusted.
    pub low_confidence: bool,
}

/// Per-batch partial results, merged in fixed batch order.
enum Partial {
    Fails(u64),
    Moments { sum: f64, sum_sq: f64 },
}

fn batch_partial(spec: &SimSpec, batch: u64) -> Partial {
    let start = batch * BATCH;
    let count = BATCH.min(spec.trials - start);
    let cfg = spec.cfg;
    let mut rng = ChannelRng::new(spec.handle, cfg.m, cfg.sigma_gh_sq);
    rng.seek_trial(start);

    // Orthogonal schemes occupy half the block per direction.
    let slot_share = match spec.scheme {
        Scheme::RisTwNoma => 1.0,
        Scheme::RisTwOma | Scheme::TwrOma => 0.5,
    };
    let gamma = match (spec.scheme, spec.user) {
        (Scheme::RisTwNoma, User::D1) => cfg.gamma_th2(),
        (Scheme::RisTwNoma, User::D2) => cfg.gamma_th1(),
        // orthogonal schemes honor the slot-compensation convention flag
        (_, User::D1) => cfg.oma_gamma_th2(),
        (_, User::D2) => cfg.oma_gamma_th1(),
    };

    let mut fails = 0u64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..count {
        let draw = rng.draw();
        let chi_sq = draw.chi * draw.chi;
        let sinr = match (spec.scheme, spec.user) {
            (Scheme::RisTwNoma, User::D1) => {
                let g_h_sq = match spec.residual {
                    ResidualMode::Random => draw.g_h_sq,
                    ResidualMode::Averaged => cfg.sigma_gh_sq,
                };
                sinr_noma_d1(cfg, spec.p_u, chi_sq, g_h_sq, spec.sic)
            }
            (Scheme::RisTwNoma, User::D2) => sinr_noma_d2(cfg, spec.p_u, chi_sq),
            (Scheme::RisTwOma, User::D1) => {
                snr_oma_ris(spec.p_u, chi_sq, cfg.a2, cfg.sigma_n1_sq)
            }
            (Scheme::RisTwOma, User::D2) => {
                snr_oma_ris(spec.p_u, chi_sq, cfg.a1, cfg.sigma_n2_sq)
            }
            (Scheme::TwrOma, User::D1) => {
                snr_twr_oma(spec.p_u, draw.h_direct_sq, cfg.a2, cfg.sigma_n1_sq)
            }
            (Scheme::TwrOma, User::D2) => {
                snr_twr_oma(spec.p_u, draw.h_direct_sq, cfg.a1, cfg.sigma_n2_sq)
            }
        };
        match spec.metric {
            SimMetric::Outage => {
                if sinr < gamma {
                    fails += 1;
                }
            }
            SimMetric::ErgodicRate => {
                let z = slot_share * (1.0 + sinr).log2();
                sum += z;
                sum_sq += z * z;
            }
        }
    }
    match spec.metric {
        SimMetric::Outage => Partial::Fails(fails),
        SimMetric::ErgodicRate => Partial::Moments { sum, sum_sq },
    }
}

/// Run one estimate. Batches execute on the current thread pool; the result
/// does not depend on how many threads that pool has.
pub fn simulate(spec: &SimSpec) -> Result<Estimate, SimError> {
    if spec.trials == 0 {
        return Err(SimError::ZeroTrials);
    }
    if !spec.p_u.is_finite() || spec.p_u <= 0.0 {
        return Err(SimError::InvalidPower(spec.p_u));
    }

    let n_batches = spec.trials.div_ceil(BATCH);
    // collect() preserves batch order, so the fold below is a fixed-shape
    // reduction no matter which threads produced which partial
    let partials: Vec<Partial> = (0..n_batches)
        .into_par_iter()
        .map(|b| batch_partial(spec, b))
        .collect();

    let n = spec.trials as f64;
    let estimate = match spec.metric {
        SimMetric::Outage => {
            let fails: u64 = partials
                .iter()
                .map(|p| match p {
                    Partial::Fails(f) => *f,
                    Partial::Moments { .. } => unreachable!("outage produces counts"),
                })
                .sum();
            let p_hat = fails as f64 / n;
            let std_error = (p_hat * (1.0 - p_hat) / n).sqrt();
            Estimate {
                value: p_hat,
                std_error,
                ci95_half_width: 1.96 * std_error,
                trials: spec.trials,
                low_confidence: fails < CONFIDENCE_FLOOR,
            }
        }
        SimMetric::ErgodicRate => {
            let (sum, sum_sq) = partials.iter().fold((0.0, 0.0), |(s, q), p| match p {
                Partial::Moments { sum, sum_sq } => (s + sum, q + sum_sq),
                Partial::Fails(_) => unreachable!("rate produces moments"),
            });
            let mean = sum / n;
            let variance = if spec.trials > 1 {
                ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            let std_error = (variance / n).sqrt();
            Estimate {
                value: mean,
                std_error,
                ci95_half_width: 1.96 * std_error,
                trials: spec.trials,
                low_confidence: spec.trials < CONFIDENCE_FLOOR,
            }
        }
    };
    Ok(estimate)
}
