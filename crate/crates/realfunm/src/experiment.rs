//! Batches of generated instances, run in parallel.

use rayon::prelude::*;
use realfunm_core::funm::{funm_with_clock, FunmConfig, FunmReport};
use realfunm_core::harness::{gen_instance_with, metrics, ErrorMetrics, ExperimentSpec};
use realfunm_core::scalarfun::catalog_get;
use realfunm_core::Result;

use crate::report::StdClock;

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub trial: u64,
    pub report: FunmReport,
}

impl TrialOutcome {
    pub fn metrics(&self) -> &ErrorMetrics {
        self.report.metrics.as_ref().expect("trial outcomes carry metrics")
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub trials: Vec<TrialOutcome>,
    pub mean: ErrorMetrics,
}

/// Generates and solves one trial. The partition origin is pinned to the
/// generator's lowest interval unless `cfg` sets one.
pub fn run_trial(spec: &ExperimentSpec, cfg: &FunmConfig, trial: u64) -> Result<TrialOutcome> {
    let gen_f = catalog_get(&spec.func, spec.gen_digits)?;
    let inst = gen_instance_with(spec, trial, &gen_f)?;
    let f = catalog_get(&spec.func, cfg.scalar_digits)?;
    let cfg = FunmConfig { origin: cfg.origin.or(Some(spec.origin())), ..cfg.clone() };
    let out = funm_with_clock(&inst.t, &f, &cfg, &StdClock::default())?;
    let m = metrics(&out.f, &inst.f_ref, &out.partition)?.with_kappas(inst.kappa_s, inst.kappa_t);
    let mut report = out.report;
    report.metrics = Some(m);
    Ok(TrialOutcome { trial, report })
}

pub fn run_experiment(spec: &ExperimentSpec, cfg: &FunmConfig) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let trials = (0..spec.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(spec, cfg, t))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<ErrorMetrics> = trials.iter().map(|t| *t.metrics()).collect();
    let mean = ErrorMetrics::mean(&all).ok_or_else(|| realfunm_core::Error::InvalidParameter("no trials".into()))?;
    Ok(ExperimentOutcome { trials, mean })
}
