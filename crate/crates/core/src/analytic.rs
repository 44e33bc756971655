//! Closed-form performance expressions: outage probabilities, their
//! high-SNR behaviour, and ergodic rates.
//!
//! Everything rests on one reduction: conditioned on the fading, each link's
//! SINR is a deterministic function of the squared cascade amplitude `χ²`,
//! so an outage event `SINR < γ` is the event `χ < A`, with the *amplitude
//! threshold* `A` collecting powers, weights, thresholds, and interference.
//! The cascade sum of `M` element amplitudes is then approximated as normal
//! with mean `M·π/4` and variance `M·(1 − π²/16)` (central limit route),
//! complemented by a provable convolution upper bound and its power-law
//! asymptote for diversity analysis.
//!
//! The imperfect-SIC expressions average the residual channel to its power
//! `σ_gh²`; the Monte Carlo layer can sample it instead, and the acceptance
//! suite compares the two routes.

use crate::model::{Scheme, SicMode, SystemConfig, User};
use crate::quad::{adaptive_simpson, QuadError};
use crate::specfun::{cascade_moments, erf, gamma_lower_regularized};
use std::f64::consts::{LN_2, PI};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("no closed form for scheme {} here", .0.label())]
    UnsupportedScheme(Scheme),
    #[error("the convolution bound needs an even element count, got m = {0}")]
    OddElementCount(u32),
    #[error("transmit power must be positive and finite, got {0}")]
    InvalidPower(f64),
    #[error("rate integral failed: {0}")]
    Integration(#[from] QuadError),
}

fn check_power(p_u: f64) -> Result<(), AnalyticError> {
    if p_u.is_finite() && p_u > 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::InvalidPower(p_u))
    }
}

/// Outage probability of a cascade-amplitude event `χ < arg` under the
/// normal approximation, with a flag reporting whether the raw value had to
/// be clamped into `[0, 1]` (it cannot for a genuine normal CDF; the flag
/// exists so emitted tables can prove it).
pub fn clt_outage_flagged(arg: f64, m: u32) -> (f64, bool) {
    let mom = cascade_moments();
    let mf = f64::from(m);
    let w = (mf / (2.0 * mom.variance)).sqrt() * (arg / mf - mom.mean);
    // |erf| is within 3e-20 of 1 here; returning the limit exactly also
    // absorbs infinite thresholds from degenerate allocation sweeps.
    if w >= 6.5 {
        return (1.0, false);
    }
    if w <= -6.5 {
        return (0.0, false);
    }
    let p = 0.5 * (1.0 + erf(w));
    let clamped = !(0.0..=1.0).contains(&p);
    (p.clamp(0.0, 1.0), clamped)
}

/// [`clt_outage_flagged`] without the diagnostic flag.
pub fn clt_outage(arg: f64, m: u32) -> f64 {
    clt_outage_flagged(arg, m).0
}

/// Amplitude the cascade must reach for successful decoding: the outage
/// event is `χ < amplitude_threshold(...)`. Defined for the two
/// surface-assisted schemes; the relay baseline has no cascade.
pub fn amplitude_threshold(
    cfg: &SystemConfig,
    scheme: Scheme,
    user: User,
    sic: SicMode,
    p_u: f64,
) -> Result<f64, AnalyticError> {
    check_power(p_u)?;
    let (numerator, weight) = match (scheme, user) {
        (Scheme::RisTwNoma, User::D1) => {
            let residual = match sic {
                SicMode::Perfect => 0.0,
                SicMode::Imperfect => cfg.epsilon * p_u * cfg.sigma_gh_sq,
            };
            (
                cfg.gamma_th2() * (residual + cfg.sigma_i1_sq + cfg.sigma_n1_sq),
                cfg.a2,
            )
        }
        (Scheme::RisTwNoma, User::D2) => (
            cfg.gamma_th1() * (cfg.sigma_i2_sq + cfg.sigma_n2_sq),
            cfg.a1,
        ),
        (Scheme::RisTwOma, User::D1) => (cfg.oma_gamma_th2() * cfg.sigma_n1_sq, cfg.a2),
        (Scheme::RisTwOma, User::D2) => (cfg.oma_gamma_th1() * cfg.sigma_n2_sq, cfg.a1),
        (Scheme::TwrOma, _) => return Err(AnalyticError::UnsupportedScheme(Scheme::TwrOma)),
    };
    // a zero rate target is met by any channel; resolve it before the
    // division so a degenerate zero weight cannot turn it into 0/0
    if numerator == 0.0 {
        return Ok(0.0);
    }
    Ok((numerator / (p_u * weight)).sqrt())
}

/// High-power limit of the near user's imperfect-SIC amplitude threshold:
/// the residual term scales with `p_u` exactly as the signal does, leaving
/// `√(γ·ε·σ_gh²/a2)` — the error floor's abscissa.
pub fn limiting_amplitude_threshold(cfg: &SystemConfig) -> f64 {
    (cfg.gamma_th2() * cfg.epsilon * cfg.sigma_gh_sq / cfg.a2).sqrt()
}

/// Outage probability with the clamp diagnostic, for any scheme.
///
/// `sic` matters only for the near user under superposed transmission; the
/// other links have no cancellation stage and ignore it.
pub fn outage_flagged(
    cfg: &SystemConfig,
    scheme: Scheme,
    user: User,
    sic: SicMode,
    p_u: f64,
) -> Result<(f64, bool), AnalyticError> {
    match scheme {
        Scheme::TwrOma => {
            check_power(p_u)?;
            let (gamma, weight, noise) = match user {
                User::D1 => (cfg.oma_gamma_th2(), cfg.a2, cfg.sigma_n1_sq),
                User::D2 => (cfg.oma_gamma_th1(), cfg.a1, cfg.sigma_n2_sq),
            };
            if gamma == 0.0 {
                // any channel meets a zero target even with a zero weight
                return Ok((0.0, false));
            }
            // single Rayleigh hop: |h|² is unit exponential
            Ok((-(-(gamma * noise) / (p_u * weight)).exp_m1(), false))
        }
        _ => {
            let arg = amplitude_threshold(cfg, scheme, user, sic, p_u)?;
            if arg == 0.0 {
                // the cascade amplitude is nonnegative, so the event
                // `χ < 0` is empty; skip the kernel, whose fitted normal
                // would leak a little mass below zero
                return Ok((0.0, false));
            }
            Ok(clt_outage_flagged(arg, cfg.m))
        }
    }
}

/// Outage probability for any scheme (flag discarded).
pub fn outage(
    cfg: &SystemConfig,
    scheme: Scheme,
    user: User,
    sic: SicMode,
    p_u: f64,
) -> Result<f64, AnalyticError> {
    Ok(outage_flagged(cfg, scheme, user, sic, p_u)?.0)
}

/// Natural log of the convolution-bound prefactor `π^m / 2^{3m/2}` together
/// with the gamma shape `3m/2`, shared by the bound and its asymptote.
fn bound_parts(m: u32) -> Result<(f64, u32), AnalyticError> {
    if !m.is_multiple_of(2) {
        return Err(AnalyticError::OddElementCount(m));
    }
    let mf = f64::from(m);
    let ln_pre = mf * PI.ln() - 1.5 * mf * LN_2;
    Ok((ln_pre, 3 * (m / 2)))
}

/// Provable upper bound on the superposed-scheme outage, from dominating the
/// element density `4x·K0(2x)` by `2√(πx)·e^{−2x}` — a scaled gamma density
/// whose `m`-fold convolution is available in closed form for even `m`.
pub fn outage_upper_bound(
    cfg: &SystemConfig,
    user: User,
    sic: SicMode,
    p_u: f64,
) -> Result<f64, AnalyticError> {
    let (ln_pre, shape) = bound_parts(cfg.m)?;
    let arg = amplitude_threshold(cfg, Scheme::RisTwNoma, user, sic, p_u)?;
    let p = gamma_lower_regularized(shape, 2.0 * arg).expect("valid shape and argument");
    Ok((ln_pre.exp() * p).min(1.0))
}

/// Leading power-law term of the bound as `p_u → ∞`. Deliberately not
/// clamped to 1: its raw ratio between two powers is exactly the diversity
/// power law, which the test suite asserts. For the near user under
/// imperfect SIC the threshold is replaced by its high-power limit, so the
/// value is a power-independent floor.
pub fn outage_asymptotic(
    cfg: &SystemConfig,
    user: User,
    sic: SicMode,
    p_u: f64,
) -> Result<f64, AnalyticError> {
    let (ln_pre, shape) = bound_parts(cfg.m)?;
    let arg = match (user, sic) {
        (User::D1, SicMode::Imperfect) => {
            check_power(p_u)?;
            limiting_amplitude_threshold(cfg)
        }
        _ => amplitude_threshold(cfg, Scheme::RisTwNoma, user, sic, p_u)?,
    };
    let ln_asym = ln_pre + f64::from(shape) * (2.0 * arg).ln() - ln_factorial_f64(shape);
    Ok(ln_asym.exp())
}

fn ln_factorial_f64(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// Ergodic rate in bits per channel use for a cascade link whose outage
/// amplitude at SINR threshold `y` is `amp(y)`:
/// `E[log2(1+SINR)] = (1/ln2)·∫₀^∞ Pr[SINR > y]/(1+y) dy`,
/// evaluated on `(0,1)` through `y = t/(1−t)`.
fn ergodic_clt<F: Fn(f64) -> f64>(m: u32, amp: F) -> Result<f64, AnalyticError> {
    let integrand = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let y = t / (1.0 - t);
        let survival = 1.0 - clt_outage(amp(y), m);
        if survival <= 0.0 {
            0.0
        } else {
            survival / (1.0 - t)
        }
    };
    // integrate in nats to 1e-6·ln2 so the rate is good to 1e-6 bits
    let nats = adaptive_simpson(integrand, 0.0, 1.0, 1e-6 * LN_2, 60)?;
    Ok(nats.value / LN_2)
}

/// Ergodic rate of one link. The superposed scheme uses the whole block;
/// each orthogonal-slot link runs half the time, so its rate is half the
/// one-slot rate. The relay baseline has no cascade closed form here and is
/// rejected — simulate it instead.
pub fn ergodic_rate(
    cfg: &SystemConfig,
    scheme: Scheme,
    user: User,
    sic: SicMode,
    p_u: f64,
) -> Result<f64, AnalyticError> {
    check_power(p_u)?;
    match scheme {
        Scheme::TwrOma => Err(AnalyticError::UnsupportedScheme(Scheme::TwrOma)),
        Scheme::RisTwNoma => {
            let m = cfg.m;
            match user {
                User::D1 => {
                    if cfg.a2 == 0.0 {
                        // zero weight: the SINR is identically zero
                        return Ok(0.0);
                    }
                    let residual = match sic {
                        SicMode::Perfect => 0.0,
                        SicMode::Imperfect => cfg.epsilon * p_u * cfg.sigma_gh_sq,
                    };
                    let den = residual + cfg.sigma_i1_sq + cfg.sigma_n1_sq;
                    ergodic_clt(m, |y| (y * den / (p_u * cfg.a2)).sqrt())
                }
                User::D2 => {
                    if cfg.a1 == 0.0 {
                        return Ok(0.0);
                    }
                    let den = cfg.sigma_i2_sq + cfg.sigma_n2_sq;
                    ergodic_clt(m, |y| (y * den / (p_u * cfg.a1)).sqrt())
                }
            }
        }
        Scheme::RisTwOma => {
            let (weight, noise) = match user {
                User::D1 => (cfg.a2, cfg.sigma_n1_sq),
                User::D2 => (cfg.a1, cfg.sigma_n2_sq),
            };
            if weight == 0.0 {
                return Ok(0.0);
            }
            let one_slot = ergodic_clt(cfg.m, |y| (y * noise / (p_u * weight)).sqrt())?;
            Ok(0.5 * one_slot)
        }
    }
}

/// Second moment of the cascade amplitude: `E[χ²] = (m·π/4)² + m·(1−π²/16)`.
pub fn cascade_second_moment(m: u32) -> f64 {
    let mom = cascade_moments();
    let mf = f64::from(m);
    (mf * mom.mean).powi(2) + mf * mom.variance
}

/// Jensen upper bound on the superposed-scheme ergodic rate:
/// `log2(1 + E[SINR])` with the residual averaged. Its high-SNR slope is
/// exactly one bit per 3 dB for the interference-free links.
pub fn ergodic_jensen_upper(
    cfg: &SystemConfig,
    user: User,
    sic: SicMode,
    p_u: f64,
) -> Result<f64, AnalyticError> {
    check_power(p_u)?;
    let e_chi_sq = cascade_second_moment(cfg.m);
    let mean_sinr = match user {
        User::D1 => {
            let residual = match sic {
                SicMode::Perfect => 0.0,
                SicMode::Imperfect => cfg.epsilon * p_u * cfg.sigma_gh_sq,
            };
            p_u * cfg.a2 * e_chi_sq / (residual + cfg.sigma_i1_sq + cfg.sigma_n1_sq)
        }
        User::D2 => p_u * cfg.a1 * e_chi_sq / (cfg.sigma_i2_sq + cfg.sigma_n2_sq),
    };
    Ok((1.0 + mean_sinr).log2())
}
