//! Approximation ratio and the per-run / cross-run statistics built on it.
//!
//! `AR(x) = F(x) / F_max` when the first `n` bits of `x` decode to a feasible
//! assignment, and `0` otherwise. Slack bits never influence the ratio.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::classical::{check_feasible, objective};
use crate::instance::{Assignment, Instance};
use crate::samples::SampleSet;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("F_max must be positive, got {0}")]
    DegenerateOptimum(f64),
    #[error("bit vector of length {got} is shorter than the {n} decision variables")]
    TooShort { n: usize, got: usize },
    #[error("{n} decision bits requested but the instance has {expected}")]
    WrongDecisionCount { n: usize, expected: usize },
    #[error("sample set is empty")]
    EmptySamples,
    #[error("at least 2 runs are needed for a confidence interval, got {0}")]
    TooFewRuns(usize),
}

/// AR of one bitstring; `n` is the number of decision variables.
pub fn approximation_ratio(inst: &Instance, f_max: f64, bits: &[bool], n: usize) -> Result<f64, EvalError> {
    if !(f_max > 0.0) {
        return Err(EvalError::DegenerateOptimum(f_max));
    }
    if n != inst.variable_count() {
        return Err(EvalError::WrongDecisionCount { n, expected: inst.variable_count() });
    }
    if bits.len() < n {
        return Err(EvalError::TooShort { n, got: bits.len() });
    }
    let a = Assignment::from_bits(inst, &bits[..n]);
    if check_feasible(inst, &a).feasible() {
        Ok(objective(inst, &a) / f_max)
    } else {
        Ok(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub expected_ar: f64,
    pub best_ar: f64,
    pub feasible_fraction: f64,
    pub reads: u64,
}

pub fn run_metrics(inst: &Instance, f_max: f64, samples: &SampleSet, n: usize) -> Result<RunMetrics, EvalError> {
    if samples.is_empty() || samples.total_reads == 0 {
        return Err(EvalError::EmptySamples);
    }
    let mut weighted = 0.0;
    let mut best: f64 = 0.0;
    let mut feasible = 0u64;
    for e in &samples.entries {
        let bits = e.bits.get(..n).ok_or(EvalError::TooShort { n, got: e.bits.len() })?;
        let a = Assignment::from_bits(inst, bits);
        let ar = approximation_ratio(inst, f_max, &e.bits, n)?;
        if check_feasible(inst, &a).feasible() {
            feasible += e.count;
        }
        weighted += ar * e.count as f64;
        best = best.max(ar);
    }
    let reads = samples.total_reads;
    Ok(RunMetrics {
        expected_ar: weighted / reads as f64,
        best_ar: best,
        feasible_fraction: feasible as f64 / reads as f64,
        reads,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub mean_expected_ar: f64,
    pub mean_best_ar: f64,
    pub ci95_expected: f64,
    pub ci95_best: f64,
    pub runs: usize,
}

/// Two-sided 97.5 % Student-t quantile with `dof` degrees of freedom.
pub fn t_critical_975(dof: usize) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

/// Sample mean and 95 % t-interval half-width.
pub fn mean_and_ci95(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, t_critical_975(values.len() - 1) * var.sqrt() / k.sqrt())
}

pub fn aggregate(runs: &[RunMetrics]) -> Result<AggregateMetrics, EvalError> {
    if runs.len() < 2 {
        return Err(EvalError::TooFewRuns(runs.len()));
    }
    let expected: Vec<f64> = runs.iter().map(|r| r.expected_ar).collect();
    let best: Vec<f64> = runs.iter().map(|r| r.best_ar).collect();
    let (mean_expected_ar, ci95_expected) = mean_and_ci95(&expected);
    let (mean_best_ar, ci95_best) = mean_and_ci95(&best);
    Ok(AggregateMetrics { mean_expected_ar, mean_best_ar, ci95_expected, ci95_best, runs: runs.len() })
}
