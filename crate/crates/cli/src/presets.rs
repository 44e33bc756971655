//! Canned sweep definitions reproducing the study's figure data at the
//! published operating points. Each preset is a complete [`SweepSpec`];
//! command-line overrides (trials, seed) are applied on top by the binary.

use ristw_core::model::{db_to_linear, Scheme, SystemConfig, User};

use crate::config::SweepSpec;
use crate::table::{Metric, RateSource, SweepVariable};

fn grid(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

fn noma_only(spec: &mut SweepSpec) {
    spec.schemes = vec![Scheme::RisTwNoma];
}

/// All available preset identifiers, in catalogue order.
pub fn ids() -> &'static [&'static str] {
    &[
        "fig2", "fig4", "fig5", "fig6", "fig7", "fig7_m5", "fig7_m6", "fig8", "fig9", "fig10",
        "fig11", "fig12", "fig13",
    ]
}

/// Look up a preset by identifier.
pub fn by_id(id: &str) -> Option<SweepSpec> {
    let mut spec = SweepSpec {
        figure_id: id.to_string(),
        ..SweepSpec::default()
    };
    match id {
        // outage vs transmit power, all schemes, with the analytic bound
        // and its high-power tail for the simultaneous scheme
        "fig2" => {
            spec.metrics = vec![
                Metric::OutageAnalytic,
                Metric::OutageUpper,
                Metric::OutageAsymptotic,
                Metric::OutageMc,
            ];
        }
        // same sweep at lowered target rates
        "fig4" => {
            spec.cfg = SystemConfig::new(
                spec.cfg.a1,
                spec.cfg.a2,
                1.0,
                4.0,
                spec.cfg.sigma_gh_sq,
                spec.cfg.sigma_i1_sq,
                spec.cfg.sigma_i2_sq,
                spec.cfg.sigma_n1_sq,
                spec.cfg.sigma_n2_sq,
                spec.cfg.epsilon,
                spec.cfg.m,
            )
            .expect("preset parameters are valid");
        }
        // near user under imperfect cancellation, weaker residual channel
        "fig5" => {
            noma_only(&mut spec);
            spec.users = vec![User::D1];
            spec.pu_grid_db = grid(0.0, 5.0, 40.0);
            spec.cfg = SystemConfig::new(
                spec.cfg.a1,
                spec.cfg.a2,
                spec.cfg.r1,
                spec.cfg.r2,
                db_to_linear(-8.0),
                spec.cfg.sigma_i1_sq,
                spec.cfg.sigma_i2_sq,
                spec.cfg.sigma_n1_sq,
                spec.cfg.sigma_n2_sq,
                spec.cfg.epsilon,
                spec.cfg.m,
            )
            .expect("preset parameters are valid");
        }
        // outage vs power for several element counts
        "fig6" => {
            noma_only(&mut spec);
            spec.pu_grid_db = grid(0.0, 5.0, 40.0);
            spec.sweep_variable = SweepVariable::MElements;
            spec.m_grid = Some(vec![2, 4, 8]);
        }
        // outage vs power-allocation split at two power levels
        "fig7" | "fig7_m5" | "fig7_m6" => {
            noma_only(&mut spec);
            spec.sweep_variable = SweepVariable::AllocationTheta;
            spec.allocation_grid = Some((0..=20).map(|i| f64::from(i) / 20.0).collect());
            spec.pu_grid_db = vec![15.0, 30.0];
            let m = if id == "fig7_m6" { 6 } else { 5 };
            spec.cfg = spec.cfg.with_elements(m);
        }
        // delay-limited throughput, all schemes
        "fig8" => {
            spec.metrics = vec![Metric::ThroughputDl];
        }
        // ergodic rate for the surface-assisted schemes
        "fig9" => {
            spec.schemes = vec![Scheme::RisTwNoma, Scheme::RisTwOma];
            spec.metrics = vec![Metric::ErgodicAnalytic, Metric::ErgodicMc];
        }
        // ergodic rate vs power for several element counts
        "fig10" => {
            noma_only(&mut spec);
            spec.metrics = vec![Metric::ErgodicAnalytic, Metric::ErgodicMc];
            spec.sweep_variable = SweepVariable::MElements;
            spec.m_grid = Some(vec![2, 4, 8]);
        }
        // delay-tolerant throughput, all schemes
        "fig11" => {
            spec.metrics = vec![Metric::ThroughputDt];
        }
        // energy efficiency on delay-limited throughput
        "fig12" => {
            spec.metrics = vec![Metric::EnergyEfficiency];
            spec.ee_rate_source = RateSource::DelayLimited;
        }
        // energy efficiency on delay-tolerant throughput, lossier amplifier
        "fig13" => {
            spec.metrics = vec![Metric::EnergyEfficiency];
            spec.ee_rate_source = RateSource::DelayTolerant;
            spec.power_model.amplifier_inefficiency = 2.0;
        }
        _ => return None,
    }
    crate::config::validate(&spec).expect("presets are self-consistent");
    Some(spec)
}
