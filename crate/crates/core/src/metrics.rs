//! System-level figures of merit derived from outage and rate: throughput,
//! energy efficiency, and the high-SNR fits (diversity order, rate slope)
//! used to verify the asymptotic claims.

use crate::model::Scheme;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("outage probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("rate must be nonnegative and finite, got {0}")]
    InvalidRate(f64),
    #[error("power must be positive and finite, got {0}")]
    InvalidPower(f64),
}

/// Power-consumption model for energy efficiency.
///
/// Total consumed power is `inefficiency · p_u + static`, where the static
/// part is the surface's per-element control power plus both user terminals
/// for the surface-assisted schemes, or the relay plus both terminals for
/// the baseline. All powers are linear watts on the same scale as `p_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerModel {
    /// Transmit-amplifier inefficiency multiplying the radiated power.
    pub amplifier_inefficiency: f64,
    /// Static control power of one reflecting element.
    pub element_power: f64,
    /// Static circuit power of one user terminal.
    pub user_power: f64,
    /// Static circuit power of the relay baseline.
    pub relay_power: f64,
    /// Elements drawing control power; `None` means all `m` of them.
    pub element_count: Option<u32>,
}

impl Default for PowerModel {
    fn default() -> Self {
        Self {
            amplifier_inefficiency: 1.2,
            element_power: 0.01,
            user_power: 0.01,
            relay_power: 0.01,
            element_count: None,
        }
    }
}

impl PowerModel {
    /// Static (signal-independent) consumption of one scheme.
    pub fn static_power(&self, scheme: Scheme, m: u32) -> f64 {
        let terminals = 2.0 * self.user_power;
        match scheme {
            Scheme::RisTwNoma | Scheme::RisTwOma => {
                let k = self.element_count.unwrap_or(m);
                f64::from(k) * self.element_power + terminals
            }
            Scheme::TwrOma => self.relay_power + terminals,
        }
    }

    /// Full consumption at transmit power `p_u`.
    pub fn total_power(&self, scheme: Scheme, m: u32, p_u: f64) -> f64 {
        self.amplifier_inefficiency * p_u + self.static_power(scheme, m)
    }
}

/// Delay-limited sum throughput: each target rate is delivered unless its
/// link is in outage, `T = (1 − p₁)·r₁ + (1 − p₂)·r₂`.
pub fn throughput_delay_limited(
    outage_1: f64,
    r1: f64,
    outage_2: f64,
    r2: f64,
) -> Result<f64, MetricError> {
    for p in [outage_1, outage_2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(MetricError::InvalidProbability(p));
        }
    }
    for r in [r1, r2] {
        if !r.is_finite() || r < 0.0 {
            return Err(MetricError::InvalidRate(r));
        }
    }
    Ok((1.0 - outage_1) * r1 + (1.0 - outage_2) * r2)
}

/// Delay-tolerant sum throughput: the two ergodic rates add (slot sharing is
/// already inside each rate).
pub fn throughput_delay_tolerant(rate_1: f64, rate_2: f64) -> Result<f64, MetricError> {
    for r in [rate_1, rate_2] {
        if !r.is_finite() || r < 0.0 {
            return Err(MetricError::InvalidRate(r));
        }
    }
    Ok(rate_1 + rate_2)
}

/// Energy efficiency in bits per channel use per watt.
pub fn energy_efficiency(
    rate: f64,
    model: &PowerModel,
    scheme: Scheme,
    m: u32,
    p_u: f64,
) -> Result<f64, MetricError> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(MetricError::InvalidRate(rate));
    }
    if !p_u.is_finite() || p_u <= 0.0 {
        return Err(MetricError::InvalidPower(p_u));
    }
    Ok(rate / model.total_power(scheme, m, p_u))
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("a log-domain fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("fit abscissae must be strictly increasing powers")]
    NotIncreasing,
    #[error("fit requires outage strictly inside (0, 1), got {0}")]
    DegenerateOutage(f64),
    #[error("fit values must be finite, got {0}")]
    NonFinite(f64),
}

fn check_grid(points: &[(f64, f64)]) -> Result<(), FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    for &(p, v) in points {
        if !p.is_finite() || p <= 0.0 || !v.is_finite() {
            return Err(FitError::NonFinite(if p.is_finite() { v } else { p }));
        }
    }
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(FitError::NotIncreasing);
        }
    }
    Ok(())
}

fn least_squares_slope(xy: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let n = xy.clone().count() as f64;
    let (sx, sy) = xy
        .clone()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = xy.fold((0.0, 0.0), |(num, den), (x, y)| {
        (num + (x - mx) * (y - my), den + (x - mx) * (x - mx))
    });
    num / den
}

/// Diversity order from an outage curve: the negative slope of
/// `log10(outage)` against `log10(p_u)` by least squares.
///
/// `points` are `(p_u, outage)` with strictly increasing linear powers and
/// outages strictly inside `(0, 1)`.
pub fn diversity_order_fit(points: &[(f64, f64)]) -> Result<f64, FitError> {
    check_grid(points)?;
    for &(_, p) in points {
        if p <= 0.0 || p >= 1.0 {
            return Err(FitError::DegenerateOutage(p));
        }
    }
    let xy = points.iter().map(|&(p_u, p)| (p_u.log10(), p.log10()));
    Ok(-least_squares_slope(xy))
}

/// High-SNR rate slope in bits per channel use per doubling of power: the
/// least-squares slope of rate against `log2(p_u)`.
///
/// `points` are `(p_u, rate)` with strictly increasing linear powers.
pub fn snr_slope_fit(points: &[(f64, f64)]) -> Result<f64, FitError> {
    check_grid(points)?;
    let xy = points.iter().map(|&(p_u, r)| (p_u.log2(), r));
    Ok(least_squares_slope(xy))
}
