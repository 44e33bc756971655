//! Sweep execution: a validated spec is expanded into a flat list of fully
//! specified evaluation points, each computed independently (closed form or
//! simulation) into one output row. Rows are content-addressed to their own
//! random-number streams, so the result is identical no matter how the work
//! is scheduled across threads.

use rayon::prelude::*;
use thiserror::Error;

use ristw_core::analytic::{self, AnalyticError};
use ristw_core::channel::RngHandle;
use ristw_core::mcsim::{simulate, Estimate, ResidualMode, SimError, SimMetric, SimSpec};
use ristw_core::metrics::{self, MetricError};
use ristw_core::model::{db_to_linear, ModelError, Scheme, SicMode, SystemConfig, User};

use crate::config::SweepSpec;
use crate::table::{sort_rows, Metric, Row, RowFlag, RowUser, SweepVariable};

/// One evaluation point: everything needed to produce a single row.
#[derive(Debug, Clone)]
pub struct Task {
    pub cfg: SystemConfig,
    pub scheme: Scheme,
    pub user: RowUser,
    pub sic: Option<SicMode>,
    pub residual: Option<ResidualMode>,
    pub metric: Metric,
    pub pu_db: f64,
    pub p_u: f64,
    pub m: u32,
    pub theta: Option<f64>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("system construction failed for {point}: {source}")]
    Model { point: String, source: ModelError },
    #[error("evaluation failed for {point}: {source}")]
    Analytic {
        point: String,
        source: AnalyticError,
    },
    #[error("simulation failed for {point}: {source}")]
    Sim { point: String, source: SimError },
    #[error("aggregation failed for {point}: {source}")]
    Metric { point: String, source: MetricError },
}

fn describe(task: &Task) -> String {
    let theta = task
        .theta
        .map_or(String::new(), |t| format!(", theta = {t}"));
    format!(
        "{} / {} / {} (sic {}, residual {}) at pu = {} dB, m = {}{theta}",
        task.metric.label(),
        task.scheme.label(),
        task.user.label(),
        task.sic.map_or("-", SicMode::label),
        task.residual.map_or("-", ResidualMode::label),
        task.pu_db,
        task.m,
    )
}

// ---- expansion ------------------------------------------------------------

fn axis_points(spec: &SweepSpec) -> Result<Vec<(SystemConfig, Option<f64>)>, RunError> {
    let base = &spec.cfg;
    match spec.sweep_variable {
        SweepVariable::Pu => Ok(vec![(base.clone(), None)]),
        SweepVariable::AllocationTheta => spec
            .allocation_grid
            .as_deref()
            .unwrap_or_default()
            .iter()
            .map(|&theta| {
                SystemConfig::new_relaxed(
                    1.0 - theta,
                    theta,
                    base.r1,
                    base.r2,
                    base.sigma_gh_sq,
                    base.sigma_i1_sq,
                    base.sigma_i2_sq,
                    base.sigma_n1_sq,
                    base.sigma_n2_sq,
                    base.epsilon,
                    base.m,
                )
                // the relaxed constructor does not carry optional conventions
                .map(|cfg| {
                    (
                        cfg.with_oma_threshold_doubling(base.oma_threshold_doubling),
                        Some(theta),
                    )
                })
                .map_err(|source| RunError::Model {
                    point: format!("allocation split theta = {theta}"),
                    source,
                })
            })
            .collect(),
        SweepVariable::MElements => Ok(spec
            .m_grid
            .as_deref()
            .unwrap_or_default()
            .iter()
            .map(|&m| (base.with_elements(m), None))
            .collect()),
    }
}

/// Throughput and efficiency summarize both links in one row; the outage
/// and rate metrics produce a row per requested user.
fn is_aggregate(metric: Metric) -> bool {
    matches!(
        metric,
        Metric::ThroughputDl | Metric::ThroughputDt | Metric::EnergyEfficiency
    )
}

const NOMA_SIC_VARIANTS: [Option<SicMode>; 2] = [Some(SicMode::Perfect), Some(SicMode::Imperfect)];
const NO_SIC: [Option<SicMode>; 1] = [None];

#[allow(clippy::too_many_arguments)]
fn push_tasks(
    tasks: &mut Vec<Task>,
    spec: &SweepSpec,
    cfg: &SystemConfig,
    theta: Option<f64>,
    pu_db: f64,
    p_u: f64,
    scheme: Scheme,
    metric: Metric,
) {
    let make = |user, sic, residual| Task {
        cfg: cfg.clone(),
        scheme,
        user,
        sic,
        residual,
        metric,
        pu_db,
        p_u,
        m: cfg.m,
        theta,
    };

    if is_aggregate(metric) {
        // one row per scheme, split by cancellation quality where it exists
        let sics: &[Option<SicMode>] = if scheme == Scheme::RisTwNoma {
            &NOMA_SIC_VARIANTS
        } else {
            &NO_SIC
        };
        for &sic in sics {
            tasks.push(make(RowUser::Both, sic, None));
        }
        return;
    }

    for &user in &spec.users {
        // only the near user of the superposed scheme runs a cancellation
        // stage; everywhere else the distinction does not exist
        let sics: &[Option<SicMode>] = if scheme == Scheme::RisTwNoma && user == User::D1 {
            &NOMA_SIC_VARIANTS
        } else {
            &NO_SIC
        };
        for &sic in sics {
            // the residual channel model only matters when a simulation
            // actually draws the residual term
            let residuals: &[Option<ResidualMode>] = if metric.is_simulated()
                && scheme == Scheme::RisTwNoma
                && user == User::D1
                && sic == Some(SicMode::Imperfect)
            {
                &[Some(ResidualMode::Random), Some(ResidualMode::Averaged)]
            } else {
                &[None]
            };
            for &residual in residuals {
                tasks.push(make(RowUser::Single(user), sic, residual));
            }
        }
    }
}

/// Expand a spec into its full task list (grid points × schemes × metrics ×
/// users × cancellation/residual variants).
pub fn expand(spec: &SweepSpec) -> Result<Vec<Task>, RunError> {
    let points = axis_points(spec)?;
    let mut tasks = Vec::new();
    for (cfg, theta) in &points {
        for &pu_db in &spec.pu_grid_db {
            let p_u = db_to_linear(pu_db);
            for &scheme in &spec.schemes {
                for &metric in &spec.metrics {
                    if metric.supports(scheme) {
                        push_tasks(&mut tasks, spec, cfg, *theta, pu_db, p_u, scheme, metric);
                    }
                }
            }
        }
    }
    Ok(tasks)
}

// ---- execution ------------------------------------------------------------

fn fnv1a_64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
    })
}

/// Stream identifier for a task's random draws. The residual mode is
/// deliberately excluded: the faithful and averaged residual rows then
/// consume identical channel draws, so their gap reflects the modeling
/// change alone rather than sampling noise.
fn task_stream(task: &Task) -> u64 {
    let theta = task
        .theta
        .map_or_else(|| "-".to_string(), |t| format!("{:016x}", t.to_bits()));
    let desc = format!(
        "{}|{}|{}|{}|{:016x}|{}|{theta}",
        task.metric.label(),
        task.scheme.label(),
        task.user.label(),
        task.sic.map_or("-", SicMode::label),
        task.pu_db.to_bits(),
        task.m,
    );
    fnv1a_64(desc.as_bytes())
}

struct Outcome {
    value: f64,
    std_error: Option<f64>,
    ci95: Option<f64>,
    trials: Option<u64>,
    flags: Vec<RowFlag>,
}

impl Outcome {
    fn analytic(value: f64) -> Self {
        Self {
            value,
            std_error: None,
            ci95: None,
            trials: None,
            flags: Vec::new(),
        }
    }

    fn analytic_flagged(value: f64, clamped: bool) -> Self {
        Self {
            flags: if clamped {
                vec![RowFlag::Clamped]
            } else {
                Vec::new()
            },
            ..Self::analytic(value)
        }
    }

    fn from_estimate(est: Estimate) -> Self {
        Self {
            value: est.value,
            std_error: Some(est.std_error),
            ci95: Some(est.ci95_half_width),
            trials: Some(est.trials),
            flags: if est.low_confidence {
                vec![RowFlag::LowConfidence]
            } else {
                Vec::new()
            },
        }
    }
}

fn single_user(task: &Task) -> User {
    match task.user {
        RowUser::Single(user) => user,
        RowUser::Both => unreachable!("per-user metrics are expanded with a single user"),
    }
}

fn analytic_err(task: &Task) -> impl Fn(AnalyticError) -> RunError + '_ {
    move |source| RunError::Analytic {
        point: describe(task),
        source,
    }
}

fn metric_err(task: &Task) -> impl Fn(MetricError) -> RunError + '_ {
    move |source| RunError::Metric {
        point: describe(task),
        source,
    }
}

/// Both links' outage folded into delivered rate; orthogonal schemes pay
/// their two-slot factor here, at the aggregation layer.
fn delay_limited_outcome(task: &Task) -> Result<Outcome, RunError> {
    let sic_d1 = task.sic.unwrap_or(SicMode::Perfect);
    let (p1, c1) = analytic::outage_flagged(&task.cfg, task.scheme, User::D1, sic_d1, task.p_u)
        .map_err(analytic_err(task))?;
    let (p2, c2) =
        analytic::outage_flagged(&task.cfg, task.scheme, User::D2, SicMode::Perfect, task.p_u)
            .map_err(analytic_err(task))?;
    let mut throughput = metrics::throughput_delay_limited(p1, task.cfg.r1, p2, task.cfg.r2)
        .map_err(metric_err(task))?;
    if task.scheme != Scheme::RisTwNoma {
        throughput *= 0.5;
    }
    Ok(Outcome::analytic_flagged(throughput, c1 || c2))
}

/// Sum of ergodic rates. The relay baseline has no closed form, so each
/// direction is estimated on its own substream and the independent errors
/// are added in quadrature.
fn delay_tolerant_outcome(
    task: &Task,
    spec: &SweepSpec,
    handle: RngHandle,
) -> Result<Outcome, RunError> {
    if task.scheme == Scheme::TwrOma {
        let mut value = 0.0;
        let mut variance = 0.0;
        let mut low_confidence = false;
        for (i, user) in [User::D1, User::D2].into_iter().enumerate() {
            let est = simulate(&SimSpec {
                cfg: &task.cfg,
                scheme: task.scheme,
                user,
                sic: SicMode::Perfect,
                metric: SimMetric::ErgodicRate,
                residual: ResidualMode::default(),
                p_u: task.p_u,
                trials: spec.trials,
                handle: handle.substream(i as u64),
            })
            .map_err(|source| RunError::Sim {
                point: describe(task),
                source,
            })?;
            value += est.value;
            variance += est.std_error * est.std_error;
            low_confidence |= est.low_confidence;
        }
        let std_error = variance.sqrt();
        return Ok(Outcome {
            value,
            std_error: Some(std_error),
            ci95: Some(1.96 * std_error),
            trials: Some(spec.trials),
            flags: if low_confidence {
                vec![RowFlag::LowConfidence]
            } else {
                Vec::new()
            },
        });
    }

    let sic_d1 = task.sic.unwrap_or(SicMode::Perfect);
    let r1 = analytic::ergodic_rate(&task.cfg, task.scheme, User::D1, sic_d1, task.p_u)
        .map_err(analytic_err(task))?;
    let r2 = analytic::ergodic_rate(&task.cfg, task.scheme, User::D2, SicMode::Perfect, task.p_u)
        .map_err(analytic_err(task))?;
    let throughput = metrics::throughput_delay_tolerant(r1, r2).map_err(metric_err(task))?;
    Ok(Outcome::analytic(throughput))
}

/// Evaluate one task into one row.
pub fn execute(task: &Task, spec: &SweepSpec) -> Result<Row, RunError> {
    let handle = RngHandle::new(spec.seed, task_stream(task));
    let sic_eff = task.sic.unwrap_or(SicMode::Perfect);

    let outcome = match task.metric {
        Metric::OutageAnalytic => {
            let user = single_user(task);
            let (p, clamped) =
                analytic::outage_flagged(&task.cfg, task.scheme, user, sic_eff, task.p_u)
                    .map_err(analytic_err(task))?;
            Outcome::analytic_flagged(p, clamped)
        }
        Metric::OutageUpper => {
            let user = single_user(task);
            let p = analytic::outage_upper_bound(&task.cfg, user, sic_eff, task.p_u)
                .map_err(analytic_err(task))?;
            Outcome::analytic(p)
        }
        Metric::OutageAsymptotic => {
            let user = single_user(task);
            let p = analytic::outage_asymptotic(&task.cfg, user, sic_eff, task.p_u)
                .map_err(analytic_err(task))?;
            Outcome::analytic(p)
        }
        Metric::ErgodicAnalytic => {
            let user = single_user(task);
            let rate = analytic::ergodic_rate(&task.cfg, task.scheme, user, sic_eff, task.p_u)
                .map_err(analytic_err(task))?;
            Outcome::analytic(rate)
        }
        Metric::OutageMc | Metric::ErgodicMc => {
            let sim_metric = if task.metric == Metric::OutageMc {
                SimMetric::Outage
            } else {
                SimMetric::ErgodicRate
            };
            let est = simulate(&SimSpec {
                cfg: &task.cfg,
                scheme: task.scheme,
                user: single_user(task),
                sic: sic_eff,
                metric: sim_metric,
                residual: task.residual.unwrap_or_default(),
                p_u: task.p_u,
                trials: spec.trials,
                handle,
            })
            .map_err(|source| RunError::Sim {
                point: describe(task),
                source,
            })?;
            Outcome::from_estimate(est)
        }
        Metric::ThroughputDl => delay_limited_outcome(task)?,
        Metric::ThroughputDt => delay_tolerant_outcome(task, spec, handle)?,
        Metric::EnergyEfficiency => {
            let rate = match spec.ee_rate_source {
                crate::table::RateSource::DelayLimited => delay_limited_outcome(task)?,
                crate::table::RateSource::DelayTolerant => {
                    delay_tolerant_outcome(task, spec, handle)?
                }
            };
            let value =
                metrics::energy_efficiency(rate.value, &spec.power_model, task.scheme, task.m, task.p_u)
                    .map_err(metric_err(task))?;
            // a Monte Carlo rate estimate carries its uncertainty through
            // the (deterministic) division by consumed power
            let total = spec.power_model.total_power(task.scheme, task.m, task.p_u);
            Outcome {
                value,
                std_error: rate.std_error.map(|s| s / total),
                ci95: rate.ci95.map(|c| c / total),
                trials: rate.trials,
                flags: rate.flags,
            }
        }
    };

    Ok(Row {
        scheme: task.scheme,
        user: task.user,
        sic: task.sic,
        residual: task.residual,
        metric: task.metric,
        pu_db: task.pu_db,
        m: task.m,
        theta: task.theta,
        value: outcome.value,
        std_error: outcome.std_error,
        ci95: outcome.ci95,
        trials: outcome.trials,
        flags: outcome.flags,
    })
}

/// Run a whole sweep: expand, evaluate every task (in parallel), and return
/// the rows in canonical order. Output is a pure function of the `SweepSpec` —
/// thread count and scheduling cannot change a single byte.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<Row>, RunError> {
    let tasks = expand(spec)?;
    let mut rows = tasks
        .par_iter()
        .map(|task| execute(task, spec))
        .collect::<Result<Vec<_>, _>>()?;
    sort_rows(&mut rows);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::RateSource;

    fn quick_spec() -> SweepSpec {
        SweepSpec {
            pu_grid_db: vec![10.0],
            trials: 2_000,
            ..SweepSpec::default()
        }
    }

    #[test]
    fn default_point_expands_to_the_documented_variant_count() {
        // per scheme: analytic rows d1-psic, d1-ipsic, d2 = 3 for the
        // superposed scheme, 2 otherwise; simulated adds the residual split
        let spec = quick_spec();
        let tasks = expand(&spec).unwrap();
        let count = |metric, scheme| {
            tasks
                .iter()
                .filter(|t| t.metric == metric && t.scheme == scheme)
                .count()
        };
        assert_eq!(count(Metric::OutageAnalytic, Scheme::RisTwNoma), 3);
        assert_eq!(count(Metric::OutageMc, Scheme::RisTwNoma), 4);
        assert_eq!(count(Metric::OutageAnalytic, Scheme::RisTwOma), 2);
        assert_eq!(count(Metric::OutageMc, Scheme::TwrOma), 2);
        assert_eq!(tasks.len(), 15);
    }

    #[test]
    fn residual_variants_share_a_draw_stream() {
        let spec = quick_spec();
        let tasks = expand(&spec).unwrap();
        let streams: Vec<u64> = tasks
            .iter()
            .filter(|t| {
                t.metric == Metric::OutageMc
                    && t.scheme == Scheme::RisTwNoma
                    && t.sic == Some(SicMode::Imperfect)
            })
            .map(task_stream)
            .collect();
        assert_eq!(streams.len(), 2);
        assert_eq!(streams[0], streams[1]);

        // while distinct points get distinct streams
        let all: std::collections::HashSet<u64> = tasks.iter().map(task_stream).collect();
        assert_eq!(all.len(), tasks.len() - 1);
    }

    #[test]
    fn sweep_output_is_reproducible_and_sorted() {
        let spec = quick_spec();
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
        let mut resorted = a.clone();
        sort_rows(&mut resorted);
        assert_eq!(a, resorted);

        for row in &a {
            if row.metric.is_simulated() {
                assert!(row.std_error.is_some() && row.ci95.is_some());
                assert_eq!(row.trials, Some(2_000));
            } else {
                assert!(row.std_error.is_none() && row.ci95.is_none() && row.trials.is_none());
            }
        }
    }

    #[test]
    fn orthogonal_delay_limited_throughput_pays_the_slot_factor() {
        let spec = SweepSpec {
            metrics: vec![Metric::ThroughputDl],
            ..quick_spec()
        };
        let rows = run_sweep(&spec).unwrap();
        let oma = rows
            .iter()
            .find(|r| r.scheme == Scheme::RisTwOma)
            .unwrap();
        let cfg = &spec.cfg;
        let p_u = db_to_linear(10.0);
        let p1 = analytic::outage(cfg, Scheme::RisTwOma, User::D1, SicMode::Perfect, p_u).unwrap();
        let p2 = analytic::outage(cfg, Scheme::RisTwOma, User::D2, SicMode::Perfect, p_u).unwrap();
        let expected = 0.5 * ((1.0 - p1) * cfg.r1 + (1.0 - p2) * cfg.r2);
        approx::assert_abs_diff_eq!(oma.value, expected, epsilon = 1e-12);
        assert_eq!(oma.user, RowUser::Both);
        assert!(oma.sic.is_none());

        let noma: Vec<_> = rows
            .iter()
            .filter(|r| r.scheme == Scheme::RisTwNoma)
            .collect();
        assert_eq!(noma.len(), 2);
        assert!(noma.iter().all(|r| r.sic.is_some()));
    }

    #[test]
    fn efficiency_rows_scale_the_rate_by_consumed_power() {
        let spec = SweepSpec {
            metrics: vec![Metric::ThroughputDl, Metric::EnergyEfficiency],
            ee_rate_source: RateSource::DelayLimited,
            ..quick_spec()
        };
        let rows = run_sweep(&spec).unwrap();
        for scheme in [Scheme::RisTwOma, Scheme::TwrOma] {
            let rate = rows
                .iter()
                .find(|r| r.scheme == scheme && r.metric == Metric::ThroughputDl)
                .unwrap();
            let ee = rows
                .iter()
                .find(|r| r.scheme == scheme && r.metric == Metric::EnergyEfficiency)
                .unwrap();
            let total = spec
                .power_model
                .total_power(scheme, spec.cfg.m, db_to_linear(10.0));
            approx::assert_abs_diff_eq!(ee.value, rate.value / total, epsilon = 1e-12);
        }
    }

    #[test]
    fn relay_delay_tolerant_rows_carry_simulation_uncertainty() {
        let spec = SweepSpec {
            metrics: vec![Metric::ThroughputDt],
            ..quick_spec()
        };
        let rows = run_sweep(&spec).unwrap();
        let twr = rows.iter().find(|r| r.scheme == Scheme::TwrOma).unwrap();
        assert!(twr.std_error.is_some());
        assert_eq!(twr.trials, Some(2_000));
        assert!(twr.value > 0.0);
        let oma = rows.iter().find(|r| r.scheme == Scheme::RisTwOma).unwrap();
        assert!(oma.std_error.is_none());
    }

    #[test]
    fn allocation_sweep_carries_the_threshold_convention() {
        let mut spec = SweepSpec {
            sweep_variable: SweepVariable::AllocationTheta,
            allocation_grid: Some(vec![0.0, 0.5, 1.0]),
            ..quick_spec()
        };
        spec.cfg = spec.cfg.with_oma_threshold_doubling(true);
        let tasks = expand(&spec).unwrap();
        assert!(!tasks.is_empty());
        assert!(tasks.iter().all(|t| t.cfg.oma_threshold_doubling));
        assert!(tasks.iter().all(|t| t.theta.is_some()));
        // the endpoint grids construct degenerate but valid allocations
        assert!(tasks.iter().any(|t| t.cfg.a2 == 0.0));
        assert!(tasks.iter().any(|t| t.cfg.a2 == 1.0));
    }
}
