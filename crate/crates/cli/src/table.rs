//! Result-table vocabulary: the row schema shared by the runner and the
//! emitters, the metric identifiers, and the canonical ordering that makes
//! output files reproducible byte for byte.

use ristw_core::mcsim::ResidualMode;
use ristw_core::model::{Scheme, SicMode, User};

/// Everything a sweep can compute. Analytic metrics never carry confidence
/// columns; Monte Carlo metrics always do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    OutageAnalytic,
    OutageUpper,
    OutageAsymptotic,
    OutageMc,
    ErgodicAnalytic,
    ErgodicMc,
    ThroughputDl,
    ThroughputDt,
    EnergyEfficiency,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::OutageAnalytic,
        Metric::OutageUpper,
        Metric::OutageAsymptotic,
        Metric::OutageMc,
        Metric::ErgodicAnalytic,
        Metric::ErgodicMc,
        Metric::ThroughputDl,
        Metric::ThroughputDt,
        Metric::EnergyEfficiency,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Metric::OutageAnalytic => "outage_analytic",
            Metric::OutageUpper => "outage_upper",
            Metric::OutageAsymptotic => "outage_asymptotic",
            Metric::OutageMc => "outage_mc",
            Metric::ErgodicAnalytic => "ergodic_analytic",
            Metric::ErgodicMc => "ergodic_mc",
            Metric::ThroughputDl => "throughput_dl",
            Metric::ThroughputDt => "throughput_dt",
            Metric::EnergyEfficiency => "energy_efficiency",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.label() == s)
    }

    /// Whether a metric is defined for a scheme. The incomplete-gamma bound
    /// and its asymptote exist only for the superposed scheme; the relay
    /// baseline has no closed-form ergodic rate, but its delay-tolerant
    /// throughput and energy efficiency fall back to simulation.
    pub fn supports(self, scheme: Scheme) -> bool {
        match self {
            Metric::OutageUpper | Metric::OutageAsymptotic => scheme == Scheme::RisTwNoma,
            Metric::ErgodicAnalytic => scheme != Scheme::TwrOma,
            _ => true,
        }
    }

    /// Metrics whose rows come from (or include) Monte Carlo estimates.
    pub fn is_simulated(self) -> bool {
        matches!(self, Metric::OutageMc | Metric::ErgodicMc)
    }

    /// Even-element assumption of the incomplete-gamma expressions.
    pub fn needs_even_elements(self) -> bool {
        matches!(self, Metric::OutageUpper | Metric::OutageAsymptotic)
    }

    fn rank(self) -> u8 {
        Self::ALL.iter().position(|m| *m == self).unwrap() as u8
    }
}

/// Which axis the sweep walks besides the transmit-power grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepVariable {
    #[default]
    Pu,
    AllocationTheta,
    MElements,
}

impl SweepVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::Pu => "pu",
            SweepVariable::AllocationTheta => "allocation_theta",
            SweepVariable::MElements => "m_elements",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [Self::Pu, Self::AllocationTheta, Self::MElements]
            .into_iter()
            .find(|v| v.label() == s)
    }
}

/// Which rate feeds the energy-efficiency ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateSource {
    #[default]
    DelayLimited,
    DelayTolerant,
}

impl RateSource {
    pub fn label(self) -> &'static str {
        match self {
            RateSource::DelayLimited => "delay_limited",
            RateSource::DelayTolerant => "delay_tolerant",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [Self::DelayLimited, Self::DelayTolerant]
            .into_iter()
            .find(|v| v.label() == s)
    }
}

/// Row-level user column: per-terminal metrics carry one terminal, sum
/// metrics (throughput, energy efficiency) span both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowUser {
    Single(User),
    Both,
}

impl RowUser {
    pub fn label(self) -> &'static str {
        match self {
            RowUser::Single(u) => u.label(),
            RowUser::Both => "both",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "d1" => Some(RowUser::Single(User::D1)),
            "d2" => Some(RowUser::Single(User::D2)),
            "both" => Some(RowUser::Both),
            _ => None,
        }
    }

    fn rank(self) -> u8 {
        match self {
            RowUser::Single(User::D1) => 0,
            RowUser::Single(User::D2) => 1,
            RowUser::Both => 2,
        }
    }
}

/// Quality flags carried per row, emitted `;`-joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFlag {
    /// An analytic kernel was clamped into [0, 1].
    Clamped,
    /// The Monte Carlo estimate saw too few informative events.
    LowConfidence,
}

impl RowFlag {
    pub fn label(self) -> &'static str {
        match self {
            RowFlag::Clamped => "clamped",
            RowFlag::LowConfidence => "low_confidence",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [Self::Clamped, Self::LowConfidence]
            .into_iter()
            .find(|f| f.label() == s)
    }
}

/// One emitted observation: a metric value at one grid point for one
/// scheme/user/SIC/residual combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scheme: Scheme,
    pub user: RowUser,
    /// `None` where no cancellation stage exists (far user, orthogonal
    /// schemes); emitted as `-`.
    pub sic: Option<SicMode>,
    /// `None` unless an imperfect-SIC simulation chose how to realize the
    /// residual; emitted as `-`.
    pub residual: Option<ResidualMode>,
    pub metric: Metric,
    pub pu_db: f64,
    pub m: u32,
    /// Allocation-sweep coordinate; `None` on other sweeps.
    pub theta: Option<f64>,
    pub value: f64,
    pub std_error: Option<f64>,
    pub ci95: Option<f64>,
    pub trials: Option<u64>,
    pub flags: Vec<RowFlag>,
}

fn scheme_rank(s: Scheme) -> u8 {
    match s {
        Scheme::RisTwNoma => 0,
        Scheme::RisTwOma => 1,
        Scheme::TwrOma => 2,
    }
}

fn sic_rank(s: Option<SicMode>) -> u8 {
    match s {
        None => 0,
        Some(SicMode::Perfect) => 1,
        Some(SicMode::Imperfect) => 2,
    }
}

fn residual_rank(r: Option<ResidualMode>) -> u8 {
    match r {
        None => 0,
        Some(ResidualMode::Random) => 1,
        Some(ResidualMode::Averaged) => 2,
    }
}

fn option_f64_cmp(a: Option<f64>, b: Option<f64>) -> std::cmp::Ordering {
    match (a, b) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.total_cmp(&y),
    }
}

/// Canonical output order: scheme, user, transmit power, element count,
/// allocation coordinate, SIC mode, metric, residual mode — so a plot's
/// curves come out as contiguous runs over the power axis.
pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        scheme_rank(a.scheme)
            .cmp(&scheme_rank(b.scheme))
            .then(a.user.rank().cmp(&b.user.rank()))
            .then(a.pu_db.total_cmp(&b.pu_db))
            .then(a.m.cmp(&b.m))
            .then(option_f64_cmp(a.theta, b.theta))
            .then(sic_rank(a.sic).cmp(&sic_rank(b.sic)))
            .then(a.metric.rank().cmp(&b.metric.rank()))
            .then(residual_rank(a.residual).cmp(&residual_rank(b.residual)))
    });
}

/// Canonical float form: 10 significant digits, scientific. Reformatting a
/// parsed value reproduces the same bytes, so files round-trip exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.9e}")
}

pub fn scheme_from_label(s: &str) -> Option<Scheme> {
    [Scheme::RisTwNoma, Scheme::RisTwOma, Scheme::TwrOma]
        .into_iter()
        .find(|v| v.label() == s)
}

pub fn sic_from_label(s: &str) -> Option<SicMode> {
    [SicMode::Perfect, SicMode::Imperfect]
        .into_iter()
        .find(|v| v.label() == s)
}

pub fn residual_from_label(s: &str) -> Option<ResidualMode> {
    [ResidualMode::Random, ResidualMode::Averaged]
        .into_iter()
        .find(|v| v.label() == s)
}
