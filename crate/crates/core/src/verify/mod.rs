//! Verification suites: sampled residuals of every identity, with
//! tolerances, negative controls and convergence-order estimates.
//!
//! This layer runs in `f64`; the tolerances below assume double precision.

mod checks;
mod convergence;
mod suite;

use std::f64::consts::TAU;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fields::FieldError;
use crate::operators::{Backend, DerivativeEngine, OperatorError};
use crate::quat::{DomainError, SphericalPoint};

pub use checks::*;
pub use convergence::{default_h0, estimate_convergence_order, Convergence, ConvergenceRow};
pub use suite::{
    applies, expectation, identity_targets, known_names, run_field_check, run_suite, select_checks,
    select_fields, Expectation, IdentityTarget, Outcome, Suite, FIELD_CHECKS, IDENTITY_CHECKS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid sampling plan: {0}")]
    Config(String),
    #[error("no admissible sample points")]
    EmptySample,
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
    #[error("unknown field selector {0:?}")]
    UnknownField(String),
    #[error("check {check} does not apply to {field}")]
    NotApplicable { check: String, field: String },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

impl From<DomainError> for VerifyError {
    fn from(e: DomainError) -> Self {
        VerifyError::Operator(e.into())
    }
}

impl From<FieldError> for VerifyError {
    fn from(e: FieldError) -> Self {
        VerifyError::Operator(e.into())
    }
}

/// Minimum distance, in the `t + ir` plane, between a sample and a seed pole.
pub const POLE_CLEARANCE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SampleMode {
    Random,
    /// Cell-centred grid with `per_axis` nodes on each of `t, r, α, β`.
    Grid { per_axis: usize },
}

/// Sampling box and point count. `α` always covers the full circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub t_min: f64,
    pub t_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub n_samples: usize,
    pub rng_seed: u64,
    #[serde(flatten)]
    pub mode: SampleMode,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            t_min: -1.5,
            t_max: 1.5,
            r_min: 0.4,
            r_max: 2.5,
            beta_min: 0.35,
            beta_max: std::f64::consts::PI - 0.35,
            n_samples: 256,
            rng_seed: 12345,
            mode: SampleMode::Random,
        }
    }
}

impl SamplingPlan {
    pub fn with_n(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn grid(mut self, per_axis: usize) -> Self {
        self.mode = SampleMode::Grid { per_axis };
        self
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: &str| Err(VerifyError::Config(m.to_string()));
        let all_finite = [self.t_min, self.t_max, self.r_min, self.r_max, self.beta_min, self.beta_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return bad("box bounds must be finite");
        }
        if self.r_min <= 0.0 {
            return bad("r_min must be positive");
        }
        if self.beta_min <= 0.0 || self.beta_max >= std::f64::consts::PI {
            return bad("beta range must lie inside (0, pi)");
        }
        if self.t_min >= self.t_max || self.r_min >= self.r_max || self.beta_min >= self.beta_max {
            return bad("empty box");
        }
        match self.mode {
            SampleMode::Random if self.n_samples == 0 => bad("n must be positive"),
            SampleMode::Grid { per_axis: 0 } => bad("grid needs at least one node per axis"),
            _ => Ok(()),
        }
    }
}

fn clear_of_poles(p: &SphericalPoint<f64>, poles: &[Complex<f64>]) -> bool {
    let z = Complex::new(p.t, p.r);
    poles.iter().all(|c| (z - c).norm() >= POLE_CLEARANCE)
}

/// Deterministic sample points for `plan`, avoiding `poles` (in the
/// `t + ir` plane). Random mode resamples rejected points; grid mode drops
/// them.
pub fn sample_points(
    plan: &SamplingPlan,
    poles: &[Complex<f64>],
) -> Result<Vec<SphericalPoint<f64>>, VerifyError> {
    plan.validate()?;
    let lerp = |lo: f64, hi: f64, s: f64| lo + (hi - lo) * s;
    let points: Vec<_> = match plan.mode {
        SampleMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.rng_seed);
            let mut out = Vec::with_capacity(plan.n_samples);
            let max_draws = plan.n_samples.saturating_mul(1000).max(1000);
            let mut draws = 0usize;
            while out.len() < plan.n_samples && draws < max_draws {
                draws += 1;
                let p = SphericalPoint::new(
                    lerp(plan.t_min, plan.t_max, rng.random()),
                    lerp(plan.r_min, plan.r_max, rng.random()),
                    TAU * rng.random::<f64>(),
                    lerp(plan.beta_min, plan.beta_max, rng.random()),
                );
                if clear_of_poles(&p, poles) {
                    out.push(p);
                }
            }
            out
        }
        SampleMode::Grid { per_axis } => {
            let m = per_axis as f64;
            let node = |k: usize| (k as f64 + 0.5) / m;
            let mut out = Vec::with_capacity(per_axis.pow(4));
            for a in 0..per_axis {
                for b in 0..per_axis {
                    for c in 0..per_axis {
                        for d in 0..per_axis {
                            let p = SphericalPoint::new(
                                lerp(plan.t_min, plan.t_max, node(a)),
                                lerp(plan.r_min, plan.r_max, node(b)),
                                TAU * node(c),
                                lerp(plan.beta_min, plan.beta_max, node(d)),
                            );
                            if clear_of_poles(&p, poles) {
                                out.push(p);
                            }
                        }
                    }
                }
            }
            out
        }
    };
    if points.is_empty() {
        return Err(VerifyError::EmptySample);
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstPoint {
    pub t: f64,
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl From<SphericalPoint<f64>> for WorstPoint {
    fn from(p: SphericalPoint<f64>) -> Self {
        Self {
            t: p.t,
            r: p.r,
            alpha: p.alpha,
            beta: p.beta,
        }
    }
}

/// Aggregated residual statistics of one check over one sample set.
///
/// `rel_max = max_abs / (1 + scale)`, with `scale` the largest magnitude of
/// the identity's reference side over the sample. `pass ⇔ rel_max ≤ tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub check: String,
    pub field: String,
    pub backend: String,
    pub h: f64,
    pub n: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub rel_max: f64,
    pub worst_point: WorstPoint,
    pub tol: f64,
    pub pass: bool,
}

/// Pointwise residuals collected in any order and any partition.
///
/// Finalizing sorts by sample index before reducing, so the result does not
/// depend on how the samples were split or merged.
#[derive(Debug, Clone, Default)]
pub struct Accumulator {
    entries: Vec<(usize, f64, f64, SphericalPoint<f64>)>,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `residual` (an absolute norm) and the reference magnitude
    /// `scale` at sample `index`.
    pub fn push(&mut self, index: usize, residual: f64, scale: f64, p: SphericalPoint<f64>) {
        self.entries.push((index, residual, scale, p));
    }

    pub fn merge(mut self, other: Accumulator) -> Self {
        self.entries.extend(other.entries);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn finalize(
        mut self,
        check: &str,
        field: &str,
        engine: &DerivativeEngine<f64>,
        tol: f64,
    ) -> Result<ResidualReport, VerifyError> {
        if self.entries.is_empty() {
            return Err(VerifyError::EmptySample);
        }
        self.entries.sort_by_key(|e| e.0);
        let mut max_abs = f64::NEG_INFINITY;
        let mut worst = self.entries[0].3;
        let mut sum = 0.0;
        let mut scale = 0.0f64;
        for &(_, res, s, p) in &self.entries {
            // NaN residuals count as infinitely bad.
            let res = if res.is_nan() { f64::INFINITY } else { res };
            if res > max_abs {
                max_abs = res;
                worst = p;
            }
            sum += res;
            scale = scale.max(s);
        }
        let n = self.entries.len();
        let mean_abs = (sum / n as f64).min(max_abs);
        let rel_max = max_abs / (1.0 + scale);
        Ok(ResidualReport {
            check: check.to_string(),
            field: field.to_string(),
            backend: engine.descriptor(),
            h: if engine.backend == Backend::Analytic && !uses_inner_step(check) {
                0.0
            } else {
                engine.h
            },
            n,
            max_abs,
            mean_abs,
            rel_max,
            worst_point: worst.into(),
            tol,
            pass: rel_max <= tol,
        })
    }
}

/// Checks whose analytic variant still differences analytic partials.
fn uses_inner_step(check: &str) -> bool {
    matches!(
        check,
        "harmonic_v_over_r"
            | "theorem"
            | "theorem_dbar"
            | "theorem_direct"
            | "second_angular_identity"
            | "angular_laplace_relation"
            | "operator_commutation"
            | "angular_v_holomorphy"
    )
}

/// Evaluates `residual` at every point, in parallel chunks, and collects
/// `(residual, scale)` pairs.
pub(crate) fn collect<F>(points: &[SphericalPoint<f64>], residual: F) -> Result<Accumulator, VerifyError>
where
    F: Fn(&SphericalPoint<f64>) -> Result<(f64, f64), VerifyError> + Sync,
{
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let chunk = points.len().div_ceil(threads).max(16);
    let parts: Vec<Result<Accumulator, VerifyError>> = std::thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .enumerate()
            .map(|(c, pts)| {
                let residual = &residual;
                s.spawn(move || {
                    let mut acc = Accumulator::new();
                    for (k, p) in pts.iter().enumerate() {
                        let (res, scale) = residual(p)?;
                        acc.push(c * chunk + k, res, scale, *p);
                    }
                    Ok(acc)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("residual worker panicked"))
            .collect()
    });
    let mut acc = Accumulator::new();
    for part in parts {
        acc = acc.merge(part?);
    }
    Ok(acc)
}
