//! Configuration ingestion: a documented TOML tree is parsed, merged over
//! the baseline defaults, converted from decibel units to linear at this
//! boundary (and nowhere else), and validated into a [`SweepSpec`].

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use ristw_core::metrics::PowerModel;
use ristw_core::model::{db_to_linear, ModelError, Scheme, SystemConfig, User};

use crate::table::{Metric, RateSource, SweepVariable};

/// A fully validated sweep: the cartesian product of the power grid (and
/// optionally an allocation or element-count grid) with the requested
/// schemes, users, and metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub figure_id: String,
    pub schemes: Vec<Scheme>,
    pub users: Vec<User>,
    pub metrics: Vec<Metric>,
    pub pu_grid_db: Vec<f64>,
    pub sweep_variable: SweepVariable,
    pub allocation_grid: Option<Vec<f64>>,
    pub m_grid: Option<Vec<u32>>,
    pub trials: u64,
    pub seed: u64,
    /// Which throughput feeds the energy-efficiency rows.
    pub ee_rate_source: RateSource,
    pub cfg: SystemConfig,
    pub power_model: PowerModel,
}

impl Default for SweepSpec {
    /// The baseline study point: all three schemes, both users, analytic
    /// and simulated outage over 0–30 dB, one million trials.
    fn default() -> Self {
        Self {
            figure_id: "custom".to_string(),
            schemes: vec![Scheme::RisTwNoma, Scheme::RisTwOma, Scheme::TwrOma],
            users: vec![User::D1, User::D2],
            metrics: vec![Metric::OutageAnalytic, Metric::OutageMc],
            pu_grid_db: (0..=6).map(|i| f64::from(i) * 5.0).collect(),
            sweep_variable: SweepVariable::Pu,
            allocation_grid: None,
            m_grid: None,
            trials: 1_000_000,
            seed: 42,
            ee_rate_source: RateSource::DelayLimited,
            cfg: SystemConfig::default(),
            power_model: PowerModel::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown {what} {value:?} (valid: {valid})")]
    UnknownName {
        what: &'static str,
        value: String,
        valid: String,
    },
    #[error("keys {a} and {b} both given; they set the same quantity")]
    ConflictingKeys { a: String, b: String },
    #[error("invalid system parameters: {0}")]
    Model(#[from] ModelError),
    #[error("{what} must not be empty")]
    EmptyList { what: &'static str },
    #[error("metric {metric} is not defined for any requested scheme ({schemes})")]
    UnsupportedMetric { metric: String, schemes: String },
    #[error(
        "metric {metric} assumes an even element count \
         (its incomplete-gamma form integrates element pairs), got m = {m}"
    )]
    OddElements { metric: String, m: u32 },
    #[error("sweep_variable = {sweep} requires a nonempty {needs}")]
    MissingGrid { sweep: String, needs: &'static str },
    #[error("{what} given but sweep_variable = {sweep} does not use it")]
    UnusedGrid { what: &'static str, sweep: String },
    #[error("allocation_grid entries must lie in [0, 1], got {0}")]
    AllocationOutOfRange(f64),
    #[error("m_grid entries must be at least 1")]
    ZeroElementsInGrid,
    #[error("{what} entries must be finite, got {got}")]
    NonFiniteEntry { what: &'static str, got: f64 },
    #[error("{what} must be positive and finite, got {got}")]
    NonPositive { what: &'static str, got: f64 },
    #[error("{what} must be nonnegative and finite, got {got}")]
    Negative { what: &'static str, got: f64 },
    #[error("trials must be at least 1")]
    ZeroTrials,
}

// ---- raw TOML shape -------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    figure_id: Option<String>,
    schemes: Option<Vec<String>>,
    users: Option<Vec<String>>,
    metrics: Option<Vec<String>>,
    sweep_variable: Option<String>,
    pu_grid_db: Option<Vec<f64>>,
    allocation_grid: Option<Vec<f64>>,
    m_grid: Option<Vec<u32>>,
    trials: Option<u64>,
    seed: Option<u64>,
    ee_rate_source: Option<String>,
    system: Option<RawSystem>,
    power_model: Option<RawPowerModel>,
}

/// Physical parameters. Ratios accept a linear key or a `*_db` twin;
/// giving both is an error, not a precedence puzzle.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    a1: Option<f64>,
    a2: Option<f64>,
    r1: Option<f64>,
    r2: Option<f64>,
    sigma_gh_sq: Option<f64>,
    sigma_gh_sq_db: Option<f64>,
    sigma_i1_sq: Option<f64>,
    sigma_i1_sq_db: Option<f64>,
    sigma_i2_sq: Option<f64>,
    sigma_i2_sq_db: Option<f64>,
    /// Shorthand setting both interference powers at once.
    sigma_i_sq: Option<f64>,
    sigma_i_sq_db: Option<f64>,
    sigma_n1_sq: Option<f64>,
    sigma_n1_sq_db: Option<f64>,
    sigma_n2_sq: Option<f64>,
    sigma_n2_sq_db: Option<f64>,
    /// Shorthand setting both noise powers at once.
    sigma_n_sq: Option<f64>,
    sigma_n_sq_db: Option<f64>,
    epsilon: Option<f64>,
    m: Option<u32>,
    oma_threshold_doubling: Option<bool>,
}

/// Consumption model. Powers are watts; `*_dbm` / `*_dbw` twins convert.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPowerModel {
    amplifier_inefficiency: Option<f64>,
    element_power: Option<f64>,
    element_power_dbm: Option<f64>,
    element_power_dbw: Option<f64>,
    user_power: Option<f64>,
    user_power_dbm: Option<f64>,
    user_power_dbw: Option<f64>,
    relay_power: Option<f64>,
    relay_power_dbm: Option<f64>,
    relay_power_dbw: Option<f64>,
    element_count: Option<u32>,
}

// ---- unit resolution ------------------------------------------------------

fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// One quantity, two spellings: linear or decibel ratio.
fn resolve_db(
    name: &'static str,
    linear: Option<f64>,
    db: Option<f64>,
) -> Result<Option<f64>, ConfigError> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(ConfigError::ConflictingKeys {
            a: name.to_string(),
            b: format!("{name}_db"),
        }),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(d)) => Ok(Some(db_to_linear(d))),
        (None, None) => Ok(None),
    }
}

/// One power, three spellings: watts, dBm, or dBW.
fn resolve_power(
    name: &'static str,
    watts: Option<f64>,
    dbm: Option<f64>,
    dbw: Option<f64>,
) -> Result<Option<f64>, ConfigError> {
    let spellings = [
        (watts, name.to_string()),
        (dbm.map(dbm_to_watts), format!("{name}_dbm")),
        (dbw.map(db_to_linear), format!("{name}_dbw")),
    ];
    let mut given = spellings.into_iter().filter(|(v, _)| v.is_some());
    match (given.next(), given.next()) {
        (Some((_, a)), Some((_, b))) => Err(ConfigError::ConflictingKeys { a, b }),
        (Some((v, _)), None) => Ok(v),
        _ => Ok(None),
    }
}

// ---- parsing --------------------------------------------------------------

fn parse_names<T: Copy>(
    what: &'static str,
    names: &[String],
    lookup: impl Fn(&str) -> Option<T>,
    valid: &str,
    rank: impl Fn(T) -> u8,
) -> Result<Vec<T>, ConfigError> {
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let v = lookup(name).ok_or_else(|| ConfigError::UnknownName {
            what,
            value: name.clone(),
            valid: valid.to_string(),
        })?;
        out.push(v);
    }
    out.sort_by_key(|v| rank(*v));
    out.dedup_by_key(|v| rank(*v));
    Ok(out)
}

fn scheme_rank(s: Scheme) -> u8 {
    match s {
        Scheme::RisTwNoma => 0,
        Scheme::RisTwOma => 1,
        Scheme::TwrOma => 2,
    }
}

fn build_system(raw: RawSystem) -> Result<SystemConfig, ConfigError> {
    let d = SystemConfig::default();

    let shared_i = resolve_db("sigma_i_sq", raw.sigma_i_sq, raw.sigma_i_sq_db)?;
    let i1 = resolve_db("sigma_i1_sq", raw.sigma_i1_sq, raw.sigma_i1_sq_db)?;
    let i2 = resolve_db("sigma_i2_sq", raw.sigma_i2_sq, raw.sigma_i2_sq_db)?;
    if shared_i.is_some() && (i1.is_some() || i2.is_some()) {
        return Err(ConfigError::ConflictingKeys {
            a: "sigma_i_sq".to_string(),
            b: "sigma_i1_sq / sigma_i2_sq".to_string(),
        });
    }
    let shared_n = resolve_db("sigma_n_sq", raw.sigma_n_sq, raw.sigma_n_sq_db)?;
    let n1 = resolve_db("sigma_n1_sq", raw.sigma_n1_sq, raw.sigma_n1_sq_db)?;
    let n2 = resolve_db("sigma_n2_sq", raw.sigma_n2_sq, raw.sigma_n2_sq_db)?;
    if shared_n.is_some() && (n1.is_some() || n2.is_some()) {
        return Err(ConfigError::ConflictingKeys {
            a: "sigma_n_sq".to_string(),
            b: "sigma_n1_sq / sigma_n2_sq".to_string(),
        });
    }
    let gh = resolve_db("sigma_gh_sq", raw.sigma_gh_sq, raw.sigma_gh_sq_db)?;

    let cfg = SystemConfig::new(
        raw.a1.unwrap_or(d.a1),
        raw.a2.unwrap_or(d.a2),
        raw.r1.unwrap_or(d.r1),
        raw.r2.unwrap_or(d.r2),
        gh.unwrap_or(d.sigma_gh_sq),
        i1.or(shared_i).unwrap_or(d.sigma_i1_sq),
        i2.or(shared_i).unwrap_or(d.sigma_i2_sq),
        n1.or(shared_n).unwrap_or(d.sigma_n1_sq),
        n2.or(shared_n).unwrap_or(d.sigma_n2_sq),
        raw.epsilon.unwrap_or(d.epsilon),
        raw.m.unwrap_or(d.m),
    )?;
    Ok(if raw.oma_threshold_doubling.unwrap_or(false) {
        cfg.with_oma_threshold_doubling(true)
    } else {
        cfg
    })
}

fn build_power_model(raw: RawPowerModel) -> Result<PowerModel, ConfigError> {
    let d = PowerModel::default();
    let model = PowerModel {
        amplifier_inefficiency: raw
            .amplifier_inefficiency
            .unwrap_or(d.amplifier_inefficiency),
        element_power: resolve_power(
            "element_power",
            raw.element_power,
            raw.element_power_dbm,
            raw.element_power_dbw,
        )?
        .unwrap_or(d.element_power),
        user_power: resolve_power(
            "user_power",
            raw.user_power,
            raw.user_power_dbm,
            raw.user_power_dbw,
        )?
        .unwrap_or(d.user_power),
        relay_power: resolve_power(
            "relay_power",
            raw.relay_power,
            raw.relay_power_dbm,
            raw.relay_power_dbw,
        )?
        .unwrap_or(d.relay_power),
        element_count: raw.element_count,
    };
    if !model.amplifier_inefficiency.is_finite() || model.amplifier_inefficiency <= 0.0 {
        return Err(ConfigError::NonPositive {
            what: "amplifier_inefficiency",
            got: model.amplifier_inefficiency,
        });
    }
    for (what, p) in [
        ("element_power", model.element_power),
        ("user_power", model.user_power),
        ("relay_power", model.relay_power),
    ] {
        if !p.is_finite() || p < 0.0 {
            return Err(ConfigError::Negative { what, got: p });
        }
    }
    Ok(model)
}

/// Parse a TOML document into a validated sweep. An empty document yields
/// the baseline defaults.
pub fn parse_spec(text: &str) -> Result<SweepSpec, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let base = SweepSpec::default();

    let schemes = match &raw.schemes {
        Some(names) => parse_names(
            "scheme",
            names,
            crate::table::scheme_from_label,
            "ris_tw_noma, ris_tw_oma, twr_oma",
            scheme_rank,
        )?,
        None => base.schemes,
    };
    let users = match &raw.users {
        Some(names) => parse_names(
            "user",
            names,
            |s| match s {
                "d1" => Some(User::D1),
                "d2" => Some(User::D2),
                _ => None,
            },
            "d1, d2",
            |u| match u {
                User::D1 => 0,
                User::D2 => 1,
            },
        )?,
        None => base.users,
    };
    let metrics = match &raw.metrics {
        Some(names) => parse_names(
            "metric",
            names,
            Metric::from_label,
            "outage_analytic, outage_upper, outage_asymptotic, outage_mc, \
             ergodic_analytic, ergodic_mc, throughput_dl, throughput_dt, \
             energy_efficiency",
            |m| Metric::ALL.iter().position(|x| *x == m).unwrap() as u8,
        )?,
        None => base.metrics,
    };
    let sweep_variable = match &raw.sweep_variable {
        Some(name) => SweepVariable::from_label(name).ok_or_else(|| ConfigError::UnknownName {
            what: "sweep_variable",
            value: name.clone(),
            valid: "pu, allocation_theta, m_elements".to_string(),
        })?,
        None => base.sweep_variable,
    };
    let ee_rate_source = match &raw.ee_rate_source {
        Some(name) => RateSource::from_label(name).ok_or_else(|| ConfigError::UnknownName {
            what: "ee_rate_source",
            value: name.clone(),
            valid: "delay_limited, delay_tolerant".to_string(),
        })?,
        None => base.ee_rate_source,
    };

    let spec = SweepSpec {
        figure_id: raw.figure_id.unwrap_or(base.figure_id),
        schemes,
        users,
        metrics,
        pu_grid_db: raw.pu_grid_db.unwrap_or(base.pu_grid_db),
        sweep_variable,
        allocation_grid: raw.allocation_grid,
        m_grid: raw.m_grid,
        trials: raw.trials.unwrap_or(base.trials),
        seed: raw.seed.unwrap_or(base.seed),
        ee_rate_source,
        cfg: build_system(raw.system.unwrap_or_default())?,
        power_model: build_power_model(raw.power_model.unwrap_or_default())?,
    };
    validate(&spec)?;
    Ok(spec)
}

/// Read and parse a config file.
pub fn load_config(path: &Path) -> Result<SweepSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text)
}

/// Cross-field checks. Also run by the binary after flag overrides.
pub fn validate(spec: &SweepSpec) -> Result<(), ConfigError> {
    if spec.schemes.is_empty() {
        return Err(ConfigError::EmptyList { what: "schemes" });
    }
    if spec.users.is_empty() {
        return Err(ConfigError::EmptyList { what: "users" });
    }
    if spec.metrics.is_empty() {
        return Err(ConfigError::EmptyList { what: "metrics" });
    }
    if spec.pu_grid_db.is_empty() {
        return Err(ConfigError::EmptyList { what: "pu_grid_db" });
    }
    for &p in &spec.pu_grid_db {
        if !p.is_finite() {
            return Err(ConfigError::NonFiniteEntry {
                what: "pu_grid_db",
                got: p,
            });
        }
    }
    if spec.trials == 0 {
        return Err(ConfigError::ZeroTrials);
    }

    match spec.sweep_variable {
        SweepVariable::Pu => {
            if spec.allocation_grid.is_some() {
                return Err(ConfigError::UnusedGrid {
                    what: "allocation_grid",
                    sweep: spec.sweep_variable.label().to_string(),
                });
            }
            if spec.m_grid.is_some() {
                return Err(ConfigError::UnusedGrid {
                    what: "m_grid",
                    sweep: spec.sweep_variable.label().to_string(),
                });
            }
        }
        SweepVariable::AllocationTheta => {
            if spec.m_grid.is_some() {
                return Err(ConfigError::UnusedGrid {
                    what: "m_grid",
                    sweep: spec.sweep_variable.label().to_string(),
                });
            }
            let grid = spec
                .allocation_grid
                .as_deref()
                .filter(|g| !g.is_empty())
                .ok_or(ConfigError::MissingGrid {
                    sweep: spec.sweep_variable.label().to_string(),
                    needs: "allocation_grid",
                })?;
            for &theta in grid {
                if !theta.is_finite() {
                    return Err(ConfigError::NonFiniteEntry {
                        what: "allocation_grid",
                        got: theta,
                    });
                }
                if !(0.0..=1.0).contains(&theta) {
                    return Err(ConfigError::AllocationOutOfRange(theta));
                }
            }
        }
        SweepVariable::MElements => {
            if spec.allocation_grid.is_some() {
                return Err(ConfigError::UnusedGrid {
                    what: "allocation_grid",
                    sweep: spec.sweep_variable.label().to_string(),
                });
            }
            let grid = spec
                .m_grid
                .as_deref()
                .filter(|g| !g.is_empty())
                .ok_or(ConfigError::MissingGrid {
                    sweep: spec.sweep_variable.label().to_string(),
                    needs: "m_grid",
                })?;
            if grid.contains(&0) {
                return Err(ConfigError::ZeroElementsInGrid);
            }
        }
    }

    let scheme_list = spec
        .schemes
        .iter()
        .map(|s| s.label())
        .collect::<Vec<_>>()
        .join(", ");
    for &metric in &spec.metrics {
        if !spec.schemes.iter().any(|&s| metric.supports(s)) {
            return Err(ConfigError::UnsupportedMetric {
                metric: metric.label().to_string(),
                schemes: scheme_list.clone(),
            });
        }
        if metric.needs_even_elements() {
            let mut element_counts = vec![spec.cfg.m];
            if spec.sweep_variable == SweepVariable::MElements {
                if let Some(grid) = &spec.m_grid {
                    element_counts = grid.clone();
                }
            }
            if let Some(&m) = element_counts.iter().find(|&&m| m % 2 != 0) {
                return Err(ConfigError::OddElements {
                    metric: metric.label().to_string(),
                    m,
                });
            }
        }
    }
    Ok(())
}
