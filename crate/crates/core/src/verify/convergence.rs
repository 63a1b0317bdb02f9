use serde::Serialize;

use super::suite::run_field_check;
use super::{SamplingPlan, VerifyError};
use crate::fields::StructuredField;
use crate::operators::{Backend, DerivativeEngine};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub rel_max: f64,
}

/// Residual table over `h0, h0/2, …` and the fitted order, unless the
/// residual sits at its floor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergence {
    pub check: String,
    pub field: String,
    pub backend: String,
    pub rows: Vec<ConvergenceRow>,
    pub order: Option<f64>,
    pub floor_reached: bool,
}

/// Residuals below this are rounding noise.
const FLOOR: f64 = 1e-12;

/// Default starting step, large enough that truncation dominates rounding
/// over a few halvings.
pub fn default_h0(backend: Backend) -> f64 {
    match backend {
        Backend::Fd2 => 0.1,
        Backend::Fd4 => 0.2,
        Backend::Analytic => 1e-3,
    }
}

/// Least-squares slope of `ln rel_max` against `ln h` over `levels` halvings
/// of `h0`.
pub fn estimate_convergence_order(
    check: &str,
    f: &StructuredField<f64>,
    plan: &SamplingPlan,
    backend: Backend,
    h0: f64,
    levels: usize,
) -> Result<Convergence, VerifyError> {
    if levels < 3 {
        return Err(VerifyError::Config("convergence needs at least 3 levels".into()));
    }
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(VerifyError::Config("h0 must be positive".into()));
    }
    let mut rows = Vec::with_capacity(levels);
    let mut h = h0;
    for _ in 0..levels {
        let engine = DerivativeEngine::new(backend, h);
        let report = run_field_check(check, f, plan, &engine)?;
        rows.push(ConvergenceRow {
            h,
            rel_max: report.rel_max,
        });
        h /= 2.0;
    }
    let res: Vec<f64> = rows.iter().map(|r| r.rel_max).collect();
    let lo = res.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = res.iter().cloned().fold(0.0, f64::max);
    let floor_reached = backend == Backend::Analytic
        || !lo.is_finite()
        || hi < FLOOR
        || lo <= 0.0
        || hi / lo < 1.5;
    let order = if floor_reached {
        None
    } else {
        let xs: Vec<f64> = rows.iter().map(|r| r.h.ln()).collect();
        let ys: Vec<f64> = res.iter().map(|r| r.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        Some(sxy / sxx)
    };
    Ok(Convergence {
        check: check.to_string(),
        field: f.name().to_string(),
        backend: backend.as_str().to_string(),
        rows,
        order,
        floor_reached,
    })
}
