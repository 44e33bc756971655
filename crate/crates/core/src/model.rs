//! System model: multiple-access schemes, users, power allocation, and the
//! instantaneous SINR expressions everything else is built on.
//!
//! Two users `d1` and `d2` exchange information in one (NOMA) or two (OMA)
//! time slots via an `M`-element passive reflecting surface; a conventional
//! two-way relay serves as a second baseline. Power allocation weights
//! `a1 + a2 = 1` with `a2 > a1` put the larger share on the far user `d2`,
//! so `d1` decodes `d2`'s message first and cancels it — perfectly (`pSIC`)
//! or with a residual scaled by `epsilon` (`ipSIC`).

use thiserror::Error;

/// Multiple-access scheme under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Surface-assisted two-way link, both users transmit simultaneously.
    RisTwNoma,
    /// Surface-assisted two-way link, users occupy orthogonal slots.
    RisTwOma,
    /// Conventional two-way relay (no surface), orthogonal slots.
    TwrOma,
}

impl Scheme {
    /// Stable lowercase identifier used in emitted tables.
    pub fn label(self) -> &'static str {
        match self {
            Scheme::RisTwNoma => "ris_tw_noma",
            Scheme::RisTwOma => "ris_tw_oma",
            Scheme::TwrOma => "twr_oma",
        }
    }
}

/// Which terminal's reception is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    /// Near user: decodes the partner's strong signal, cancels, then its own.
    D1,
    /// Far user: treats the weaker signal as noise.
    D2,
}

impl User {
    pub fn label(self) -> &'static str {
        match self {
            User::D1 => "d1",
            User::D2 => "d2",
        }
    }
}

/// Successive-interference-cancellation quality at the near user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SicMode {
    /// Perfect cancellation: no residual term.
    Perfect,
    /// Imperfect cancellation: residual power `epsilon * p_u * |g_h|^2`.
    Imperfect,
}

impl SicMode {
    pub fn label(self) -> &'static str {
        match self {
            SicMode::Perfect => "psic",
            SicMode::Imperfect => "ipsic",
        }
    }
}

/// Invalid parameter combinations rejected at construction time.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("power allocation must satisfy a1 + a2 = 1, got a1 + a2 = {sum}")]
    AllocationSum { sum: f64 },
    #[error("power allocation weights must lie in (0, 1), got a1 = {a1}, a2 = {a2}")]
    AllocationRange { a1: f64, a2: f64 },
    #[error("far user must get the larger share, got a1 = {a1} >= a2 = {a2}")]
    AllocationOrder { a1: f64, a2: f64 },
    #[error("target rate must be nonnegative and finite, got {0}")]
    InvalidRate(f64),
    #[error("noise power must be positive and finite, got {0}")]
    InvalidNoise(f64),
    #[error("variance must be nonnegative and finite, got {0}")]
    InvalidVariance(f64),
    #[error("sic residual scale must lie in (0, 1], got {0}")]
    InvalidResidualScale(f64),
    #[error("element count must be at least 1")]
    NoElements,
}

/// Static network parameters shared by the analytic and simulation layers.
///
/// Powers and variances are linear; decibel conversion happens at the
/// configuration boundary, never inside the math.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Power allocation weight of the near user's own (weak) signal.
    pub a1: f64,
    /// Power allocation weight of the far user's (strong) signal.
    pub a2: f64,
    /// Target rate of the signal decoded at `d2` (bits per channel use).
    pub r1: f64,
    /// Target rate of the signal decoded at `d1` (bits per channel use).
    pub r2: f64,
    /// Variance of the residual-interference channel seen under ipSIC.
    pub sigma_gh_sq: f64,
    /// Loop/self-interference power at `d1`.
    pub sigma_i1_sq: f64,
    /// Loop/self-interference power at `d2`.
    pub sigma_i2_sq: f64,
    /// Additive noise power at `d1`.
    pub sigma_n1_sq: f64,
    /// Additive noise power at `d2`.
    pub sigma_n2_sq: f64,
    /// Fraction of the cancelled signal's power that survives ipSIC.
    pub epsilon: f64,
    /// Number of reflecting elements.
    pub m: u32,
    /// Use `2^(2R) − 1` decoding thresholds for the orthogonal (two-slot)
    /// schemes instead of the default `2^R − 1`. Off by default: the study
    /// compares schemes at the same per-signal target rate, but the doubled
    /// form compensates the halved slot time and is the textbook convention.
    pub oma_threshold_doubling: bool,
}

impl SystemConfig {
    /// Validated constructor enforcing every invariant, including the
    /// `a2 > a1` decoding-order requirement.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a1: f64,
        a2: f64,
        r1: f64,
        r2: f64,
        sigma_gh_sq: f64,
        sigma_i1_sq: f64,
        sigma_i2_sq: f64,
        sigma_n1_sq: f64,
        sigma_n2_sq: f64,
        epsilon: f64,
        m: u32,
    ) -> Result<Self, ModelError> {
        // NaN weights fall through to the sum check in `new_relaxed`
        if a1 >= a2 {
            return Err(ModelError::AllocationOrder { a1, a2 });
        }
        // strict operating points keep both weights interior
        if a1 <= 0.0 || a2 >= 1.0 {
            return Err(ModelError::AllocationRange { a1, a2 });
        }
        Self::new_relaxed(
            a1,
            a2,
            r1,
            r2,
            sigma_gh_sq,
            sigma_i1_sq,
            sigma_i2_sq,
            sigma_n1_sq,
            sigma_n2_sq,
            epsilon,
            m,
        )
    }

    /// Like [`SystemConfig::new`] but accepting the whole closed allocation
    /// simplex: any `a1, a2 ∈ [0, 1]` with `a1 + a2 = 1`, in either order.
    ///
    /// Allocation sweeps deliberately walk through inverted and degenerate
    /// splits, where the math degrades gracefully — a zero weight gives an
    /// infinite decoding threshold and thus certain outage. Everything else
    /// is still validated.
    #[allow(clippy::too_many_arguments)]
    pub fn new_relaxed(
        a1: f64,
        a2: f64,
        r1: f64,
        r2: f64,
        sigma_gh_sq: f64,
        sigma_i1_sq: f64,
        sigma_i2_sq: f64,
        sigma_n1_sq: f64,
        sigma_n2_sq: f64,
        epsilon: f64,
        m: u32,
    ) -> Result<Self, ModelError> {
        let sum = a1 + a2;
        if !sum.is_finite() || (sum - 1.0).abs() > 1e-12 {
            return Err(ModelError::AllocationSum { sum });
        }
        if !(0.0..=1.0).contains(&a1) || !(0.0..=1.0).contains(&a2) {
            return Err(ModelError::AllocationRange { a1, a2 });
        }
        for r in [r1, r2] {
            if !r.is_finite() || r < 0.0 {
                return Err(ModelError::InvalidRate(r));
            }
        }
        for n in [sigma_n1_sq, sigma_n2_sq] {
            if !n.is_finite() || n <= 0.0 {
                return Err(ModelError::InvalidNoise(n));
            }
        }
        for v in [sigma_gh_sq, sigma_i1_sq, sigma_i2_sq] {
            if !v.is_finite() || v < 0.0 {
                return Err(ModelError::InvalidVariance(v));
            }
        }
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 1.0 {
            return Err(ModelError::InvalidResidualScale(epsilon));
        }
        if m == 0 {
            return Err(ModelError::NoElements);
        }
        Ok(Self {
            a1,
            a2,
            r1,
            r2,
            sigma_gh_sq,
            sigma_i1_sq,
            sigma_i2_sq,
            sigma_n1_sq,
            sigma_n2_sq,
            epsilon,
            m,
            oma_threshold_doubling: false,
        })
    }

    /// SINR decoding threshold for the signal targeted at `d2`.
    pub fn gamma_th1(&self) -> f64 {
        threshold(self.r1)
    }

    /// SINR decoding threshold for the signal targeted at `d1`.
    pub fn gamma_th2(&self) -> f64 {
        threshold(self.r2)
    }

    /// [`Self::gamma_th1`] as seen by the orthogonal schemes, honoring the
    /// slot-compensation flag.
    pub fn oma_gamma_th1(&self) -> f64 {
        threshold(self.oma_rate_scale() * self.r1)
    }

    /// [`Self::gamma_th2`] as seen by the orthogonal schemes.
    pub fn oma_gamma_th2(&self) -> f64 {
        threshold(self.oma_rate_scale() * self.r2)
    }

    fn oma_rate_scale(&self) -> f64 {
        if self.oma_threshold_doubling {
            2.0
        } else {
            1.0
        }
    }

    /// Copy with a different element count.
    pub fn with_elements(&self, m: u32) -> Self {
        Self { m, ..self.clone() }
    }

    /// Copy with the orthogonal-scheme threshold convention switched.
    pub fn with_oma_threshold_doubling(&self, on: bool) -> Self {
        Self {
            oma_threshold_doubling: on,
            ..self.clone()
        }
    }
}

impl Default for SystemConfig {
    /// Baseline operating point used throughout the numerical studies:
    /// 0.2/0.8 allocation, 2 and 5 bit targets, residual channel at −6 dB,
    /// loop interference at −5 dB, unit noise, eight elements.
    fn default() -> Self {
        Self {
            a1: 0.2,
            a2: 0.8,
            r1: 2.0,
            r2: 5.0,
            sigma_gh_sq: db_to_linear(-6.0),
            sigma_i1_sq: db_to_linear(-5.0),
            sigma_i2_sq: db_to_linear(-5.0),
            sigma_n1_sq: 1.0,
            sigma_n2_sq: 1.0,
            epsilon: 1.0,
            m: 8,
            oma_threshold_doubling: false,
        }
    }
}

/// SINR threshold for a target rate in bits per channel use: `2^r − 1`.
pub fn threshold(rate: f64) -> f64 {
    rate.exp2() - 1.0
}

/// Convert decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Instantaneous SINR at `d1` when decoding `d2`'s signal (the first SIC
/// stage), given the squared cascade amplitude `chi_sq = χ²` and, under
/// ipSIC, the residual channel power `g_h_sq = |g_h|²`.
pub fn sinr_noma_d1(cfg: &SystemConfig, p_u: f64, chi_sq: f64, g_h_sq: f64, sic: SicMode) -> f64 {
    let residual = match sic {
        SicMode::Perfect => 0.0,
        SicMode::Imperfect => cfg.epsilon * p_u * g_h_sq,
    };
    p_u * cfg.a2 * chi_sq / (residual + cfg.sigma_i1_sq + cfg.sigma_n1_sq)
}

/// Instantaneous SINR at `d2`, which decodes its partner's signal while the
/// superposed weak component is already intended for it (self-interference
/// cancelled by design), leaving loop interference and noise.
pub fn sinr_noma_d2(cfg: &SystemConfig, p_u: f64, chi_sq: f64) -> f64 {
    p_u * cfg.a1 * chi_sq / (cfg.sigma_i2_sq + cfg.sigma_n2_sq)
}

/// Instantaneous SNR of the surface-assisted link in an orthogonal slot; the
/// partner transmits alone, so only thermal noise remains.
pub fn snr_oma_ris(p_u: f64, chi_sq: f64, weight: f64, noise: f64) -> f64 {
    p_u * weight * chi_sq / noise
}

/// Instantaneous SNR of the conventional relay baseline over a single
/// Rayleigh hop with squared amplitude `h_sq`.
pub fn snr_twr_oma(p_u: f64, h_sq: f64, weight: f64, noise: f64) -> f64 {
    p_u * weight * h_sq / noise
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn threshold_matches_hand_values() {
        assert_eq!(threshold(0.0), 0.0);
        assert_eq!(threshold(1.0), 1.0);
        assert_eq!(threshold(2.0), 3.0);
        assert_eq!(threshold(5.0), 31.0);
        assert_abs_diff_eq!(threshold(2.5), 2f64.powf(2.5) - 1.0, epsilon = 1e-15);
    }

    #[test]
    fn db_round_trip() {
        for &db in &[-30.0, -6.0, -5.0, 0.0, 10.0, 20.0, 30.0] {
            assert_abs_diff_eq!(linear_to_db(db_to_linear(db)), db, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(db_to_linear(-6.0), 0.251_188_643_150_958, epsilon = 1e-14);
        assert_abs_diff_eq!(db_to_linear(-5.0), 0.316_227_766_016_837_94, epsilon = 1e-14);
    }

    #[test]
    fn default_config_is_the_baseline_point() {
        let cfg = SystemConfig::default();
        assert_eq!(cfg.a1, 0.2);
        assert_eq!(cfg.a2, 0.8);
        assert_eq!(cfg.gamma_th1(), 3.0);
        assert_eq!(cfg.gamma_th2(), 31.0);
        assert_eq!(cfg.m, 8);
        assert_eq!(cfg.epsilon, 1.0);
        // validates against its own constructor
        let roundtrip = SystemConfig::new(
            cfg.a1,
            cfg.a2,
            cfg.r1,
            cfg.r2,
            cfg.sigma_gh_sq,
            cfg.sigma_i1_sq,
            cfg.sigma_i2_sq,
            cfg.sigma_n1_sq,
            cfg.sigma_n2_sq,
            cfg.epsilon,
            cfg.m,
        )
        .unwrap();
        assert_eq!(roundtrip, cfg);
    }

    #[test]
    fn orthogonal_threshold_convention_flag() {
        let cfg = SystemConfig::default();
        // off by default: same targets as the superposed scheme
        assert!(!cfg.oma_threshold_doubling);
        assert_eq!(cfg.oma_gamma_th1(), cfg.gamma_th1());
        assert_eq!(cfg.oma_gamma_th2(), cfg.gamma_th2());
        // on: the two-slot links must clear 2^(2R) − 1
        let doubled = cfg.with_oma_threshold_doubling(true);
        assert_eq!(doubled.oma_gamma_th1(), 15.0); // 2^4 − 1
        assert_eq!(doubled.oma_gamma_th2(), 1023.0); // 2^10 − 1
        // the superposed-scheme thresholds are untouched
        assert_eq!(doubled.gamma_th1(), 3.0);
        assert_eq!(doubled.gamma_th2(), 31.0);
    }

    #[test]
    fn constructor_rejects_bad_allocations() {
        let mk = |a1: f64, a2: f64| {
            SystemConfig::new(a1, a2, 2.0, 5.0, 0.25, 0.3, 0.3, 1.0, 1.0, 1.0, 8)
        };
        assert_eq!(
            mk(0.6, 0.4).unwrap_err(),
            ModelError::AllocationOrder { a1: 0.6, a2: 0.4 }
        );
        assert!(matches!(
            mk(0.2, 0.7).unwrap_err(),
            ModelError::AllocationSum { .. }
        ));
        assert!(matches!(
            mk(0.0, 1.0).unwrap_err(),
            ModelError::AllocationRange { .. }
        ));
    }

    #[test]
    fn relaxed_constructor_accepts_the_whole_simplex() {
        let mk = |a1: f64, a2: f64| {
            SystemConfig::new_relaxed(a1, a2, 2.0, 5.0, 0.25, 0.3, 0.3, 1.0, 1.0, 1.0, 8)
        };
        assert!(mk(0.6, 0.4).is_ok()); // inverted order
        assert!(mk(0.0, 1.0).is_ok()); // degenerate endpoints
        assert!(mk(1.0, 0.0).is_ok());
        assert!(matches!(
            mk(0.6, 0.5).unwrap_err(),
            ModelError::AllocationSum { .. }
        ));
        assert!(matches!(
            mk(-0.2, 1.2).unwrap_err(),
            ModelError::AllocationRange { .. }
        ));
    }

    #[test]
    fn constructor_rejects_degenerate_scalars() {
        let mk = |r2: f64, n1: f64, eps: f64, m: u32| {
            SystemConfig::new(0.2, 0.8, 2.0, r2, 0.25, 0.3, 0.3, n1, 1.0, eps, m)
        };
        assert_eq!(mk(-1.0, 1.0, 1.0, 8).unwrap_err(), ModelError::InvalidRate(-1.0));
        assert_eq!(mk(5.0, 0.0, 1.0, 8).unwrap_err(), ModelError::InvalidNoise(0.0));
        assert_eq!(
            mk(5.0, 1.0, 0.0, 8).unwrap_err(),
            ModelError::InvalidResidualScale(0.0)
        );
        assert_eq!(
            mk(5.0, 1.0, 1.5, 8).unwrap_err(),
            ModelError::InvalidResidualScale(1.5)
        );
        assert_eq!(mk(5.0, 1.0, 1.0, 0).unwrap_err(), ModelError::NoElements);
        // zero rate is a legitimate degenerate sweep endpoint
        assert!(mk(0.0, 1.0, 1.0, 8).is_ok());
    }

    #[test]
    fn near_user_sinr_with_and_without_residual() {
        let cfg = SystemConfig::default();
        let p_u = 10.0;
        // Perfect SIC: only loop interference and noise in the denominator.
        let psic = sinr_noma_d1(&cfg, p_u, 1.0, 0.7, SicMode::Perfect);
        assert_abs_diff_eq!(
            psic,
            10.0 * 0.8 / (cfg.sigma_i1_sq + 1.0),
            epsilon = 1e-14
        );
        // Imperfect SIC at epsilon = 1 with |g_h|² = 0.25 and χ² = 1:
        // 10·0.8 / (10·0.25 + 0.316... + 1) = 8 / 3.816...
        let ipsic = sinr_noma_d1(&cfg, p_u, 1.0, 0.25, SicMode::Imperfect);
        assert_abs_diff_eq!(
            ipsic,
            8.0 / (2.5 + db_to_linear(-5.0) + 1.0),
            epsilon = 1e-14
        );
        assert!(ipsic < psic);
    }

    #[test]
    fn far_user_sinr_scales_with_weak_weight() {
        let cfg = SystemConfig::default();
        let s = sinr_noma_d2(&cfg, 20.0, 2.0);
        assert_abs_diff_eq!(
            s,
            20.0 * 0.2 * 2.0 / (db_to_linear(-5.0) + 1.0),
            epsilon = 1e-14
        );
    }

    #[test]
    fn orthogonal_links_reduce_to_snr() {
        assert_abs_diff_eq!(snr_oma_ris(100.0, 0.5, 0.8, 2.0), 20.0, epsilon = 1e-15);
        assert_abs_diff_eq!(snr_twr_oma(100.0, 0.5, 0.8, 2.0), 20.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn sinrs_increase_with_power(p in 0.1f64..1e4, chi_sq in 1e-6f64..50.0) {
            let cfg = SystemConfig::default();
            let lo = sinr_noma_d2(&cfg, p, chi_sq);
            let hi = sinr_noma_d2(&cfg, p * 1.5, chi_sq);
            prop_assert!(hi > lo);
            // pSIC near-user SINR also scales linearly in power
            let lo1 = sinr_noma_d1(&cfg, p, chi_sq, 0.3, SicMode::Perfect);
            let hi1 = sinr_noma_d1(&cfg, p * 1.5, chi_sq, 0.3, SicMode::Perfect);
            prop_assert!(hi1 > lo1);
        }

        #[test]
        fn residual_saturates_near_user_sinr(p in 1.0f64..1e6, g in 0.01f64..4.0) {
            // Under ipSIC the SINR approaches a2·χ²/(ε·g_h²) as power grows;
            // it must never exceed that ceiling.
            let cfg = SystemConfig::default();
            let s = sinr_noma_d1(&cfg, p, 1.0, g, SicMode::Imperfect);
            prop_assert!(s <= cfg.a2 / (cfg.epsilon * g) + 1e-12);
        }

        #[test]
        fn threshold_monotone(r in 0.0f64..20.0, dr in 1e-9f64..1.0) {
            prop_assert!(threshold(r + dr) > threshold(r));
        }
    }
}
